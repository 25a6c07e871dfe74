use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Scale on which a parameter is differentiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Positive parameter, differentiated in `log θ` and mapped back by the
    /// delta method.
    Log,
    Linear,
}

/// Relative central-difference step on the working scale.
pub const HESSIAN_STEP: f64 = 1e-4;

/// Central-difference Hessian of `f` at `z`, with step
/// `HESSIAN_STEP * max(1, |zᵢ|)` per coordinate.
pub fn numerical_hessian<F>(mut f: F, z: &[f64]) -> DMatrix<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = z.len();
    let h: Vec<f64> = z.iter().map(|v| HESSIAN_STEP * v.abs().max(1.0)).collect();
    let f0 = f(z);
    let mut point = z.to_vec();
    let mut eval = |point: &mut Vec<f64>, moves: &[(usize, f64)]| {
        for &(i, d) in moves {
            point[i] = z[i] + d;
        }
        let v = f(point);
        for &(i, _) in moves {
            point[i] = z[i];
        }
        v
    };
    let mut hess = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let fp = eval(&mut point, &[(i, h[i])]);
        let fm = eval(&mut point, &[(i, -h[i])]);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = eval(&mut point, &[(i, h[i]), (j, h[j])]);
            let fpm = eval(&mut point, &[(i, h[i]), (j, -h[j])]);
            let fmp = eval(&mut point, &[(i, -h[i]), (j, h[j])]);
            let fmm = eval(&mut point, &[(i, -h[i]), (j, -h[j])]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Standard errors from the inverse Hessian of a negative log-likelihood at
/// its minimizer `theta_hat` (natural scale).
///
/// Returns `NotPositiveDefinite` when the Hessian cannot be Cholesky
/// factored, i.e. `theta_hat` is not a strict local minimum.
pub fn standard_errors<F>(mut nllh: F, theta_hat: &[f64], scales: &[Scale]) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(theta_hat.len(), scales.len());
    let to_natural = |z: &[f64]| -> Vec<f64> {
        z.iter()
            .zip(scales)
            .map(|(&v, s)| match s {
                Scale::Log => v.exp(),
                Scale::Linear => v,
            })
            .collect()
    };
    let z_hat: Vec<f64> = theta_hat
        .iter()
        .zip(scales)
        .map(|(&v, s)| match s {
            Scale::Log => v.ln(),
            Scale::Linear => v,
        })
        .collect();
    let hess = numerical_hessian(|z| nllh(&to_natural(z)), &z_hat);
    if hess.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite("non-finite curvature".into()));
    }
    let chol = hess.clone().cholesky().ok_or_else(|| {
        let eig = hess.symmetric_eigenvalues();
        Error::NotPositiveDefinite(format!(
            "smallest eigenvalue {:.3e}",
            eig.iter().copied().fold(f64::INFINITY, f64::min)
        ))
    })?;
    let dim = theta_hat.len();
    let mut ses = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut e = DVector::zeros(dim);
        e[i] = 1.0;
        let col = chol.solve(&e);
        let var = col[i];
        let se = var.max(0.0).sqrt();
        ses.push(match scales[i] {
            Scale::Log => theta_hat[i] * se,
            Scale::Linear => se,
        });
    }
    Ok(ses)
}
