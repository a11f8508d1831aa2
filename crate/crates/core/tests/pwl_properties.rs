use proptest::prelude::*;

use maxop::{Family, PwlFunction};

mod common;
use common::pwl;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn same_function(f: &PwlFunction, g: &PwlFunction) -> bool {
    f.breakpoints().len() == g.breakpoints().len()
        && f.breakpoints().iter().zip(g.breakpoints()).all(|(a, b)| close(*a, *b, 1e-12))
        && f.values().iter().zip(g.values()).all(|(a, b)| close(*a, *b, 1e-12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sobolev_embedding(f in pwl()) {
        prop_assert!(f.linf_norm() <= 0.5 * f.deriv_l1_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn interpolation(f in pwl(), p in 1.0f64..20.0) {
        let bound = f.linf_norm().powf(1.0 - 1.0 / p) * f.l1_norm().powf(1.0 / p);
        prop_assert!(f.lq_norm(p).unwrap() <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn lq_norm_matches_midpoint_sum(f in pwl(), p in 1.0f64..6.0) {
        let (lo, hi) = f.support().unwrap();
        let n = 20_000;
        let dx = (hi - lo) / n as f64;
        let sum: f64 = (0..n).map(|i| f.eval(lo + (i as f64 + 0.5) * dx).abs().powf(p) * dx).sum();
        prop_assert!(close(f.lq_norm(p).unwrap(), sum.powf(1.0 / p), 1e-3));
    }

    #[test]
    fn abs_is_idempotent(f in pwl()) {
        let a = f.abs();
        prop_assert!(same_function(&a.abs(), &a));
        prop_assert!(close(a.l1_norm(), f.l1_norm(), 1e-12));
        for x in [-2.5, -1.0, 0.1, 0.7, 2.0] {
            prop_assert!(close(a.eval(x), f.eval(x).abs(), 1e-12));
        }
    }

    #[test]
    fn add_is_associative(f in pwl(), g in pwl(), h in pwl()) {
        let left = f.add(&g).add(&h);
        let right = f.add(&g.add(&h));
        prop_assert_eq!(left.breakpoints().len(), right.breakpoints().len());
        for x in left.breakpoints() {
            prop_assert!(close(left.eval(*x), right.eval(*x), 1e-12));
        }
    }

    #[test]
    fn sub_inverts_add(f in pwl(), g in pwl()) {
        prop_assert!(f.sub(&f).is_zero());
        let back = f.add(&g).sub(&g);
        for x in f.breakpoints() {
            prop_assert!(close(back.eval(*x), f.eval(*x), 1e-12));
        }
    }

    #[test]
    fn scaling_and_translation(f in pwl(), c in -3.0f64..3.0, h in -2.0f64..2.0, x in -5.0f64..5.0) {
        prop_assert!(close(f.scale(c).eval(x), c * f.eval(x), 1e-12));
        prop_assert!(close(f.translate(h).eval(x), f.eval(x - h), 1e-9));
        prop_assert!(close(f.translate(h).w11_norm(), f.w11_norm(), 1e-9));
    }

    #[test]
    fn family_distances_shrink(f in pwl(), j in 1u32..64) {
        let near = f.sample_perturbation(Family::Scaling, j + 1).unwrap().sub(&f).w11_norm();
        let far = f.sample_perturbation(Family::Scaling, j).unwrap().sub(&f).w11_norm();
        prop_assert!(near <= far * (1.0 + 1e-12));
        let shifted = f.sample_perturbation(Family::Translate, j).unwrap();
        prop_assert!(f.abs_derivative_distance(&shifted) <= 2.0 * f.deriv_l1_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn json_round_trip(f in pwl()) {
        let back: PwlFunction = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert!(same_function(&back, &f));
    }
}

#[test]
fn json_rejects_nonzero_endpoints() {
    let bad = r#"{"breakpoints": [0.0, 1.0, 2.0], "values": [0.5, 1.0, 0.0]}"#;
    assert!(serde_json::from_str::<PwlFunction>(bad).is_err());
}
