use num_traits::{Signed, Zero};
use proptest::prelude::*;

use maxop::discrete::{
    average_shift_inequality_check, centered_max_value, compare_maximal, maximal_profile, total_variation_of_max,
    uncentered_max_value, MaxKind,
};
use maxop::rational::{self, frac};
use maxop::signal::{Exponent, LpNorm};
use maxop::{DiscreteSignal, Rational};

fn value() -> impl Strategy<Value = Rational> {
    (-8i64..=8, prop::sample::select(vec![1i64, 2, 4, 8])).prop_map(|(p, q)| frac(p, q))
}

fn signal() -> impl Strategy<Value = DiscreteSignal> {
    (-10i64..=10, prop::collection::vec(value(), 1..14)).prop_map(|(o, v)| DiscreteSignal::from_values(o, v))
}

fn kind() -> impl Strategy<Value = MaxKind> {
    prop::sample::select(vec![MaxKind::Centered, MaxKind::Uncentered])
}

fn exact(n: LpNorm) -> Rational {
    match n {
        LpNorm::Exact(r) => r,
        other => panic!("expected an exact norm, got {other:?}"),
    }
}

fn max_at(f: &DiscreteSignal, kind: MaxKind, n: i64) -> Rational {
    match kind {
        MaxKind::Centered => centered_max_value(f, n).value,
        MaxKind::Uncentered => uncentered_max_value(f, n).value,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn variation_is_a_seminorm(f in signal(), g in signal(), c in value()) {
        prop_assert!(f.add(&g).variation() <= f.variation() + g.variation());
        prop_assert_eq!(f.scale(&c).variation(), c.abs() * f.variation());
    }

    #[test]
    fn variation_is_l1_of_derivative(f in signal()) {
        prop_assert_eq!(exact(f.derivative().lp_norm(Exponent::Finite(1.0))), f.variation());
    }

    #[test]
    fn abs_is_l1_contractive(f in signal(), g in signal()) {
        let lhs = exact(f.abs().sub(&g.abs()).lp_norm(Exponent::Finite(1.0)));
        prop_assert!(lhs <= exact(f.sub(&g).lp_norm(Exponent::Finite(1.0))));
    }

    #[test]
    fn sup_below_bv(f in signal(), g in signal()) {
        let d = f.sub(&g);
        prop_assert!(exact(d.lp_norm(Exponent::Infinity)) <= d.bv_norm());
    }

    #[test]
    fn uncentered_variation_bound(f in signal()) {
        prop_assert!(total_variation_of_max(&f, MaxKind::Uncentered).unwrap() <= f.variation());
    }

    #[test]
    fn domination(f in signal()) {
        let c = maximal_profile(&f, MaxKind::Centered, -30, 30).unwrap();
        let u = maximal_profile(&f, MaxKind::Uncentered, -30, 30).unwrap();
        for n in -30..=30 {
            let (mc, mu) = (c.value(n).unwrap(), u.value(n).unwrap());
            prop_assert!(*mc >= f.eval(n).abs());
            prop_assert!(mu >= mc);
        }
    }

    #[test]
    fn homogeneity_and_sublinearity(f in signal(), g in signal(), c in value(), k in kind(), n in -25i64..=25) {
        prop_assert_eq!(max_at(&f.scale(&c), k, n), c.abs() * max_at(&f, k, n));
        prop_assert!(max_at(&f.add(&g), k, n) <= max_at(&f, k, n) + max_at(&g, k, n));
    }

    #[test]
    fn reflection(f in signal(), k in kind(), n in -25i64..=25) {
        prop_assert_eq!(max_at(&f.reflect(), k, -n), max_at(&f, k, n));
    }

    #[test]
    fn maximal_distance_bounds(f in signal(), g in signal(), k in kind()) {
        let cmp = compare_maximal(&f, &g, k).unwrap();
        let d = f.sub(&g);
        prop_assert!(cmp.sup_diff <= exact(d.lp_norm(Exponent::Infinity)));
        prop_assert!(cmp.sup_diff <= d.bv_norm());
        prop_assert!(cmp.deriv_sup_diff <= rational::int(2) * &cmp.sup_diff);
        prop_assert!(cmp.var_diff >= (&cmp.var_g - &cmp.var_f).abs());
        if d.support().is_none() {
            prop_assert!(cmp.var_diff.is_zero());
        }
    }

    #[test]
    fn shift_inequality(f in signal(), m in -40i64..=40, n in -40i64..=40, r in 0u64..=40) {
        prop_assert!(average_shift_inequality_check(&f, m, n, r).passed);
    }

    #[test]
    fn tails_bound_the_centered_operator_from_below(a in value(), b in value(), at in -5i64..=5, n in -40i64..=40) {
        let f = DiscreteSignal::step(a.clone(), b.clone(), at);
        let v = centered_max_value(&f, n).value;
        prop_assert!(v >= (a.abs() + b.abs()) / rational::int(2));
        prop_assert!(v >= f.eval(n).abs());
    }
}
