//! Derivative-free minimizers used by the fitting code.

/// Outcome of a one-dimensional bounded minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum1d {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    /// Width criterion met and the minimizer is not pinned to a bracket end.
    pub converged: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search on `[lo, hi]`, stopping once the bracket width drops
/// below `rel_tol * max(1, |x|)`.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64, max_iter: usize) -> Minimum1d
where
    F: FnMut(f64) -> f64,
{
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    let mut evaluations = 2;
    let mut width_met = false;
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= rel_tol * mid.abs().max(1.0) {
            width_met = true;
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
        evaluations += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Minimum1d {
        x,
        value,
        evaluations,
        converged: width_met && value.is_finite(),
    }
}

/// Scans `grid_points` equally spaced points of `[lo, hi]`, then refines the
/// best cell with a golden-section search. The returned value never exceeds
/// the best grid value.
pub fn grid_golden<F>(mut f: F, lo: f64, hi: f64, grid_points: usize, rel_tol: f64) -> Minimum1d
where
    F: FnMut(f64) -> f64,
{
    assert!(grid_points >= 3 && hi > lo);
    let step = (hi - lo) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        })
        .collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid_points - 1)];
    let refined = golden_section(&mut f, a, b, rel_tol, 500);
    let evaluations = grid_points + refined.evaluations;
    let (x, value) = if refined.value <= values[best] {
        (refined.x, refined.value)
    } else {
        (grid[best], values[best])
    };
    let edge_tol = 10.0 * rel_tol * x.abs().max(1.0);
    let pinned = (x - lo).abs() <= edge_tol || (hi - x).abs() <= edge_tol;
    Minimum1d {
        x,
        value,
        evaluations,
        converged: refined.converged && !pinned && value.is_finite(),
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Stop when the simplex's value spread is below `ftol * (1 + |f_best|)`.
    pub ftol: f64,
    pub max_evaluations: usize,
    /// Per-coordinate offsets of the initial simplex vertices.
    pub initial_step: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimumNd {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex minimization with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
pub fn nelder_mead<F>(mut f: F, start: &[f64], opts: &NelderMeadOptions) -> MinimumNd
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    assert_eq!(opts.initial_step.len(), dim);
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += opts.initial_step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evaluations)).collect();
    let mut converged = false;

    while evaluations < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        let worst = values[dim];
        if best.is_finite() && (worst - best).abs() <= opts.ftol * (1.0 + best.abs()) {
            converged = true;
            break;
        }
        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0_f64, f64::max);
        let scale = simplex[0].iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if best.is_finite() && size <= 1e-13 * scale {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(1.0);
        let fr = eval(&reflected, &mut evaluations);
        if fr < values[0] {
            let expanded = along(2.0);
            let fe = eval(&expanded, &mut evaluations);
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[dim] {
            let c = along(0.5);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        } else {
            let c = along(-0.5);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        };
        if fc < values[dim].min(fr) {
            simplex[dim] = contracted;
            values[dim] = fc;
            continue;
        }
        for i in 1..=dim {
            let shrunk: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, v)| b + 0.5 * (v - b))
                .collect();
            values[i] = eval(&shrunk, &mut evaluations);
            simplex[i] = shrunk;
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    MinimumNd {
        x: simplex[best].clone(),
        value: values[best],
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 1.3).powi(2), -5.0, 5.0, 1e-10, 500);
        assert!(m.converged);
        assert!((m.x - 1.3).abs() < 1e-8);
    }

    #[test]
    fn grid_golden_flags_boundary_minimum() {
        let m = grid_golden(|x| x, 0.0, 1.0, 100, 1e-8);
        assert!(!m.converged);
        assert!(m.x < 1e-6);
    }

    #[test]
    fn grid_golden_beats_its_grid() {
        let f = |x: f64| (x - 0.123_456).powi(2) + 0.1 * (7.0 * x).sin();
        let m = grid_golden(f, -3.0, 3.0, 100, 1e-8);
        for i in 0..100 {
            let x = -3.0 + 6.0 * i as f64 / 99.0;
            assert!(m.value <= f(x));
        }
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            ftol: 1e-14,
            max_evaluations: 20_000,
            initial_step: vec![0.5, 0.5],
        };
        let m = nelder_mead(rosen, &[-1.2, 1.0], &opts);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_respects_evaluation_budget() {
        let opts = NelderMeadOptions {
            ftol: 0.0,
            max_evaluations: 50,
            initial_step: vec![1.0; 3],
        };
        let m = nelder_mead(|x| x.iter().map(|v| v * v).sum(), &[3.0, -2.0, 1.0], &opts);
        assert!(m.evaluations <= 55);
    }
}
