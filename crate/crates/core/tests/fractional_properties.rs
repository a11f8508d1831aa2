use proptest::prelude::*;

use maxop::fractional::{brute_force_eval, derivative_lq_norm, BetaParams, FractionalMaximal, GridSpec};
use maxop::PwlFunction;

mod common;
use common::pwl;

/// `‖(M̃_{1/2} hat)′‖₂` for the unit hat, frozen from a tight quadrature run
/// and confirmed by [`hat_derivative_norm_by_central_differences`].
const HAT_DERIVATIVE_NORM: f64 = 0.206955330660;

fn beta() -> impl Strategy<Value = f64> {
    prop_oneof![prop::sample::select(vec![0.25, 0.5, 0.75]), 0.1f64..0.9]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Balls through `x` that meet the support have radius at least `d/2`,
    /// so `M̃_β f(x) ≤ ½(d/2)^{β−1}‖f‖₁ = 2^{−β}d^{β−1}‖f‖₁`.
    #[test]
    fn positive_with_decay_bound(f in pwl(), b in beta(), d in 0.01f64..40.0, right in any::<bool>()) {
        let m = FractionalMaximal::new(&f, BetaParams::new(b).unwrap());
        let (lo, hi) = f.support().unwrap();
        let x = if right { hi + d } else { lo - d };
        let v = m.uncentered(x);
        prop_assert!(v > 0.0);
        prop_assert!(v <= 2f64.powf(-b) * d.powf(b - 1.0) * f.l1_norm() * (1.0 + 1e-9));
    }

    /// Good balls reaching past a point `y` right of the support have radius
    /// at least `(x − y)/2`, and the value only drops further right.
    #[test]
    fn far_field_claims(f in pwl(), b in beta(), gap in 0.0f64..2.0, z_off in 0.0f64..3.0, step in 0.0f64..3.0) {
        let m = FractionalMaximal::new(&f, BetaParams::new(b).unwrap());
        let y = f.support().unwrap().1 + gap;
        let z = y + z_off + 1e-6;
        let w = z + step;
        let (bz, bw) = (m.good_ball(z).unwrap(), m.good_ball(w).unwrap());
        for (x, ball) in [(z, bz), (w, bw)] {
            if ball.a < y {
                prop_assert!(ball.radius >= (x - y) / 2.0);
            }
        }
        if bz.a < y && bw.a < y {
            prop_assert!(bw.value <= bz.value * (1.0 + 1e-12));
        }
    }

    #[test]
    fn homogeneity(f in pwl(), b in beta(), c in -3.0f64..3.0, x in -5.0f64..5.0) {
        let p = BetaParams::new(b).unwrap();
        let v = FractionalMaximal::new(&f, p).uncentered(x);
        let scaled = FractionalMaximal::new(&f.scale(c), p).uncentered(x);
        prop_assert!((scaled - c.abs() * v).abs() <= 1e-12 * v.max(1.0));
    }

    #[test]
    fn monotone_in_the_absolute_value(f in pwl(), g in pwl(), b in beta(), x in -5.0f64..5.0) {
        let p = BetaParams::new(b).unwrap();
        let bigger = f.abs().add(&g.abs());
        let small = FractionalMaximal::new(&f, p).uncentered(x);
        let big = FractionalMaximal::new(&bigger, p).uncentered(x);
        prop_assert!(small <= big * (1.0 + 1e-12));
    }

    #[test]
    fn centered_below_uncentered(f in pwl(), b in beta(), x in -5.0f64..5.0) {
        let m = FractionalMaximal::new(&f, BetaParams::new(b).unwrap());
        prop_assert!(m.centered(x) <= m.uncentered(x) * (1.0 + 1e-12));
    }

    #[test]
    fn good_ball_attains_the_value(f in pwl(), b in beta(), x in -5.0f64..5.0) {
        let m = FractionalMaximal::new(&f, BetaParams::new(b).unwrap());
        let ball = m.good_ball(x).unwrap();
        prop_assert!(ball.a <= x && x <= ball.b);
        prop_assert!((m.phi(ball.a, ball.b) - ball.value).abs() <= 1e-12 * ball.value.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn agrees_with_grid_oracle(f in pwl(), b in beta(), x in -4.0f64..4.0) {
        let p = BetaParams::new(b).unwrap();
        let exact = FractionalMaximal::new(&f, p).uncentered(x);
        let o = brute_force_eval(&f, p, x, 2e-3).unwrap();
        prop_assert!(o.value <= exact * (1.0 + 1e-12) + 1e-15, "oracle {} above {}", o.value, exact);
        prop_assert!(exact - o.value <= o.modulus + 1e-12, "gap {} above modulus {}", exact - o.value, o.modulus);
    }
}

#[test]
fn hat_derivative_norm_regression() {
    let p = BetaParams::new(0.5).unwrap();
    let r = derivative_lq_norm(&PwlFunction::hat(0.0, 1.0), p, &GridSpec::default()).unwrap();
    assert!((r.norm - HAT_DERIVATIVE_NORM).abs() <= 1e-6, "{r:?}");
    assert!(r.norm_error <= 1e-6);
}

/// Trapezoid rule over central differences of the values on `[−60, 60]`,
/// plus the far-field tail where the good ball covers the whole support and
/// `(M̃f)′(x) = −2^{−3/2}(|x| + 1)^{−3/2}`.
#[test]
fn hat_derivative_norm_by_central_differences() {
    let m = FractionalMaximal::new(&PwlFunction::hat(0.0, 1.0), BetaParams::new(0.5).unwrap());
    let (l, step, h) = (60.0f64, 2e-4f64, 1e-6f64);
    let n = (2.0 * l / step) as usize;
    let mut sum = 0.0;
    for i in 0..=n {
        let x = -l + i as f64 * step;
        let d = (m.uncentered(x + h) - m.uncentered(x - h)) / (2.0 * h);
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        sum += w * d * d * step;
    }
    let tail = 2.0 * (0.125 / 2.0) / (l + 1.0).powi(2);
    let estimate = (sum + tail).sqrt();
    assert!((estimate - HAT_DERIVATIVE_NORM).abs() <= 1e-6, "{estimate}");
}
