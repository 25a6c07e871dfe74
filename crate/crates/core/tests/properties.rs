use domecast::bayes::{chain_summary, PosteriorChain};
use domecast::forecast::plugin_remaining_quantile;
use domecast::likelihood::nllh_aggregate;
use domecast::{parse_catalog, Catalog, CompositionClass, EruptionRecord, GPaParams, ModelKind};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = GPaParams> {
    (0.05f64..20.0, 0.01f64..100.0).prop_map(|(a, b)| GPaParams::new(a, b).unwrap())
}

fn class() -> impl Strategy<Value = CompositionClass> {
    prop_oneof![
        Just(CompositionClass::Mafic),
        Just(CompositionClass::Intermediate),
        Just(CompositionClass::Evolved)
    ]
}

fn record() -> impl Strategy<Value = EruptionRecord> {
    (
        "[A-Za-z][A-Za-z ]{0,12}[a-z]",
        1500.0f64..2020.0,
        1e-3f64..300.0,
        any::<bool>(),
        class(),
        proptest::option::of(35.0f64..80.0),
    )
        .prop_map(|(name, start, t, c, class, x)| EruptionRecord::new(name, start, t, c, class, x).unwrap())
}

fn catalog() -> impl Strategy<Value = Catalog> {
    proptest::collection::vec(record(), 1..40).prop_map(|r| Catalog::new(r, None).unwrap())
}

proptest! {
    #[test]
    fn quantile_inverts_survival(p in params(), q in 0.0f64..0.999) {
        let t = p.quantile(q).unwrap();
        let back = 1.0 - p.survival(t).unwrap();
        prop_assert!((back - q).abs() < 1e-9, "{back} vs {q}");
    }

    #[test]
    fn conditional_survival_is_a_ratio(p in params(), s in 0.0f64..200.0, t in 0.0f64..200.0) {
        let lhs = p.condition_on_age(s).unwrap().log_survival(t).unwrap();
        let rhs = p.log_survival(s + t).unwrap() - p.log_survival(s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn density_is_minus_survival_slope(p in params(), t in 0.0f64..50.0) {
        let h = 1e-5 * (1.0 + t);
        let lo = (t - h).max(0.0);
        let slope = (p.survival(lo).unwrap() - p.survival(t + h).unwrap()) / (t + h - lo);
        let f = p.density(t).unwrap();
        let f_mid = p.density(0.5 * (lo + t + h)).unwrap();
        prop_assert!((slope - f_mid).abs() <= 1e-5 * f.max(1e-12) + 1e-12, "{slope} vs {f_mid}");
    }

    #[test]
    fn remaining_quantile_grows_with_age(p in params(), s in 0.0f64..100.0, ds in 0.01f64..50.0, q in 0.01f64..0.99) {
        let a = plugin_remaining_quantile(&p, s, q).unwrap();
        let b = plugin_remaining_quantile(&p, s + ds, q).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn nllh_is_additive(left in catalog(), right in catalog(), p in params()) {
        let joint = nllh_aggregate(&left.concat(&right), &p);
        let parts = nllh_aggregate(&left, &p) + nllh_aggregate(&right, &p);
        prop_assert!((joint - parts).abs() <= 1e-9 * (1.0 + joint.abs()));
    }

    #[test]
    fn summary_ignores_record_order(c in catalog(), seed in any::<u64>()) {
        let mut records = c.records().to_vec();
        let n = records.len();
        for i in (1..n).rev() {
            records.swap(i, (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize);
        }
        let shuffled = Catalog::new(records, None).unwrap();
        prop_assert_eq!(c.summarize(), shuffled.summarize());
    }

    #[test]
    fn catalog_csv_round_trips(c in catalog()) {
        let back = parse_catalog(&c.to_csv_string()).unwrap();
        prop_assert_eq!(back.records(), c.records());
    }

    #[test]
    fn chain_summary_ignores_draw_order(draws in proptest::collection::vec((0.1f64..5.0, 0.1f64..5.0), 100..200)) {
        let fwd: Vec<Vec<f64>> = draws.iter().map(|&(a, b)| vec![a, b]).collect();
        let rev: Vec<Vec<f64>> = fwd.iter().rev().cloned().collect();
        let s1 = chain_summary(&PosteriorChain::from_draws(ModelKind::Aggregate, fwd).unwrap()).unwrap();
        let s2 = chain_summary(&PosteriorChain::from_draws(ModelKind::Aggregate, rev).unwrap()).unwrap();
        for (x, y) in s1.parameters.iter().zip(&s2.parameters) {
            prop_assert!((x.mean - y.mean).abs() < 1e-12);
            prop_assert_eq!(x.q50, y.q50);
            prop_assert_eq!(x.q975, y.q975);
        }
    }
}
