//! Discrete centered and uncentered Hardy–Littlewood maximal operators.
//!
//! For a signal `f` on `ℤ`,
//!
//! ```text
//! Mf(n) = sup_{r ≥ 0} (2r + 1)⁻¹ Σ_{|k| ≤ r} |f(n + k)|
//! M̃f(n) = sup_{r, s ≥ 0} (r + s + 1)⁻¹ Σ_{k = −r}^{s} |f(n + k)|
//! ```
//!
//! Both suprema are computed exactly. Once a window reaches into both
//! constant tails the average is a ratio of linear functions of the radius,
//! so only finitely many radii need to be searched and the rest is settled
//! by the limit of that ratio. When the supremum is only approached in the
//! limit the result carries [`Reach::AtInfinity`].

mod extrema;
mod kernel;
mod tail;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::signal::DiscreteSignal;

pub use extrema::{
    critical_set, extrema_decomposition, kurka_sums, lemma7_cases, lemma7_witness, Extremum, ExtremaDecomposition, ExtremumKind,
    KurkaSums, Lemma7Case, Lemma7Witness, UpperEnd,
};
pub use tail::{compare_maximal, MaximalComparison};

use kernel::Engine;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxKind {
    Centered,
    Uncentered,
}

impl std::str::FromStr for MaxKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centered" => Ok(MaxKind::Centered),
            "uncentered" => Ok(MaxKind::Uncentered),
            other => Err(Error::InvalidArgument(format!("unknown operator kind {other:?}"))),
        }
    }
}

/// Where the supremum at a point is attained.
///
/// `Finite { left, right }` is the window `[n − left, n + right]`; for the
/// centered operator `left == right` is the minimal good radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reach {
    Finite { left: u64, right: u64 },
    AtInfinity,
}

impl Reach {
    pub fn radius(&self) -> Option<u64> {
        match *self {
            Reach::Finite { left, right } if left == right => Some(left),
            _ => None,
        }
    }

    pub fn is_attained(&self) -> bool {
        matches!(self, Reach::Finite { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxValue {
    pub value: Rational,
    pub reach: Reach,
}

pub fn centered_max_value(f: &DiscreteSignal, n: i64) -> MaxValue {
    let (value, reach) = Engine::new(f, n).centered(n);
    MaxValue { value, reach }
}

pub fn uncentered_max_value(f: &DiscreteSignal, n: i64) -> MaxValue {
    let (value, reach) = Engine::new(f, n).uncentered(n);
    MaxValue { value, reach }
}

/// Exact values of `Mf` or `M̃f` on an integer window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximalProfile {
    pub kind: MaxKind,
    pub window_offset: i64,
    #[serde(with = "rational::serde_str::vec")]
    pub values: Vec<Rational>,
    pub good_radii: Vec<Reach>,
    /// Limit of the maximal function at −∞.
    #[serde(with = "rational::serde_str")]
    pub left_limit: Rational,
    /// Limit of the maximal function at +∞.
    #[serde(with = "rational::serde_str")]
    pub right_limit: Rational,
    /// Value just left of the window.
    #[serde(with = "rational::serde_str")]
    pub outside_left: Rational,
    /// Value just right of the window.
    #[serde(with = "rational::serde_str")]
    pub outside_right: Rational,
    /// The source signal is constant, hence so is its maximal function.
    pub flat: bool,
    /// Zero tails and the window covers the support: the maximal function
    /// decreases strictly to 0 on both sides of the window.
    pub decays_outside: bool,
}

impl MaximalProfile {
    pub fn window(&self) -> (i64, i64) {
        (self.window_offset, self.window_offset + self.values.len() as i64 - 1)
    }

    pub fn contains(&self, n: i64) -> bool {
        let (lo, hi) = self.window();
        (lo..=hi).contains(&n)
    }

    /// Value at `n`, including the two neighbours just outside the window.
    pub fn value(&self, n: i64) -> Option<&Rational> {
        let (lo, hi) = self.window();
        if n == lo - 1 {
            Some(&self.outside_left)
        } else if n == hi + 1 {
            Some(&self.outside_right)
        } else if (lo..=hi).contains(&n) {
            Some(&self.values[(n - lo) as usize])
        } else {
            None
        }
    }

    pub fn reach(&self, n: i64) -> Option<Reach> {
        self.contains(n).then(|| self.good_radii[(n - self.window_offset) as usize])
    }

    /// Σ |Mf(n + 1) − Mf(n)| for `n ∈ [lo, hi − 1]` inside the window.
    pub fn window_variation(&self) -> Rational {
        self.values.windows(2).map(|w| (&w[1] - &w[0]).abs()).sum()
    }

    /// Variation over `[x, y] ⊂ window`.
    pub fn variation_between(&self, x: i64, y: i64) -> Rational {
        (x..y).map(|n| (self.value(n + 1).unwrap() - self.value(n).unwrap()).abs()).sum()
    }

    /// Exact `Var(Mf)` over all of `ℤ`; requires zero tails and a window
    /// containing the support.
    pub fn total_variation(&self) -> Result<Rational> {
        if self.flat {
            return Ok(Rational::zero());
        }
        if !self.decays_outside {
            let (lo, hi) = self.window();
            return Err(Error::WindowMissesSupport { lo, hi });
        }
        Ok(self.window_variation() + self.values.first().unwrap() + self.values.last().unwrap())
    }
}

pub fn maximal_profile(f: &DiscreteSignal, kind: MaxKind, lo: i64, hi: i64) -> Result<MaximalProfile> {
    if lo > hi {
        return Err(Error::EmptyInterval { lo, hi });
    }
    let engine = Engine::new(f, lo.abs().max(hi.abs()) + 1);
    let eval = |n: i64| match kind {
        MaxKind::Centered => engine.centered(n),
        MaxKind::Uncentered => engine.uncentered(n),
    };
    let (values, good_radii): (Vec<_>, Vec<_>) = (lo..=hi).into_par_iter().map(eval).unzip();
    let tl = f.tail_left.abs();
    let tr = f.tail_right.abs();
    let (left_limit, right_limit) = match kind {
        MaxKind::Centered => {
            let mid = (&tl + &tr) / rational::int(2);
            (rational::max(tl.clone(), mid.clone()), rational::max(tr.clone(), mid))
        }
        MaxKind::Uncentered => {
            let m = rational::max(tl.clone(), tr.clone());
            (m.clone(), m)
        }
    };
    let decays_outside = f.has_zero_tails()
        && match f.support() {
            Some((s, e)) => lo <= s && e <= hi,
            None => true,
        };
    Ok(MaximalProfile {
        kind,
        window_offset: lo,
        values,
        good_radii,
        left_limit,
        right_limit,
        outside_left: eval(lo - 1).0,
        outside_right: eval(hi + 1).0,
        flat: f.variation().is_zero(),
        decays_outside,
    })
}

/// Exact `Var(Mf)` (or `Var(M̃f)`) over `ℤ` for a zero-tail signal.
pub fn total_variation_of_max(f: &DiscreteSignal, kind: MaxKind) -> Result<Rational> {
    if !f.has_zero_tails() {
        return Err(Error::NonzeroTail);
    }
    match f.support() {
        None => Ok(Rational::zero()),
        Some((s, e)) => maximal_profile(f, kind, s, e)?.total_variation(),
    }
}

/// `A_r f(n)`: centered average of radius `r`.
pub fn centered_average(f: &DiscreteSignal, n: i64, r: u64) -> Rational {
    let r = r as i64;
    f.window_average(n - r, n + r).expect("nonempty window")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftCheck {
    pub passed: bool,
    /// `A_r f(m) − (A_r f(n) − 2C|m − n|/(2r + 1))`.
    pub slack: Rational,
}

/// Checks `A_r f(m) ≥ A_r f(n) − 2C|m − n|/(2r + 1)` with `C = ‖f‖_∞`.
pub fn average_shift_inequality_check(f: &DiscreteSignal, m: i64, n: i64, r: u64) -> ShiftCheck {
    let c = f.sup_abs();
    let lhs = centered_average(f, m, r);
    let shift = rational::int(2) * c * rational::int((m - n).abs()) / rational::int(2 * r as i64 + 1);
    let rhs = centered_average(f, n, r) - shift;
    let slack = lhs - rhs;
    ShiftCheck { passed: !slack.is_negative(), slack }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn two_spikes() -> DiscreteSignal {
        DiscreteSignal::from_values(0, vec![int(1), int(0), int(0), int(0), int(0), int(1)])
    }

    #[test]
    fn centered_examples() {
        let d = DiscreteSignal::delta(0);
        assert_eq!(centered_max_value(&d, 0), MaxValue { value: int(1), reach: Reach::Finite { left: 0, right: 0 } });
        assert_eq!(centered_max_value(&d, 3), MaxValue { value: frac(1, 7), reach: Reach::Finite { left: 3, right: 3 } });
        let step = DiscreteSignal::step(int(1), int(0), 0);
        assert_eq!(centered_max_value(&step, 10), MaxValue { value: frac(1, 2), reach: Reach::AtInfinity });
    }

    #[test]
    fn uncentered_examples() {
        let d = DiscreteSignal::delta(0);
        assert_eq!(uncentered_max_value(&d, 3), MaxValue { value: frac(1, 4), reach: Reach::Finite { left: 3, right: 0 } });
        let c = DiscreteSignal::constant(int(-3));
        assert_eq!(uncentered_max_value(&c, 17), MaxValue { value: int(3), reach: Reach::Finite { left: 0, right: 0 } });
        let chi = DiscreteSignal::from_values(0, vec![int(1), int(1)]);
        assert_eq!(uncentered_max_value(&chi, 2), MaxValue { value: frac(2, 3), reach: Reach::Finite { left: 2, right: 0 } });
    }

    #[test]
    fn profile_examples() {
        let d = DiscreteSignal::delta(0);
        let p = maximal_profile(&d, MaxKind::Centered, -6, 6).unwrap();
        for n in -6..=6i64 {
            assert_eq!(p.value(n).unwrap(), &frac(1, 2 * n.abs() + 1));
        }
        let p = maximal_profile(&d, MaxKind::Uncentered, -6, 6).unwrap();
        for n in -6..=6i64 {
            assert_eq!(p.value(n).unwrap(), &frac(1, n.abs() + 1));
        }
        assert_eq!(p.total_variation().unwrap(), int(2));

        let p = maximal_profile(&two_spikes(), MaxKind::Centered, -2, 7).unwrap();
        assert_eq!(p.value(1).unwrap(), &frac(1, 3));
        assert_eq!(p.value(2).unwrap(), &frac(2, 7));
        assert_eq!(p.value(3).unwrap(), &frac(2, 7));
        assert_eq!(p.value(4).unwrap(), &frac(1, 3));
    }

    #[test]
    fn profile_requires_support_for_total_variation() {
        let p = maximal_profile(&two_spikes(), MaxKind::Centered, 1, 7).unwrap();
        assert!(matches!(p.total_variation(), Err(Error::WindowMissesSupport { .. })));
        assert!(maximal_profile(&two_spikes(), MaxKind::Centered, 3, 2).is_err());
    }

    #[test]
    fn total_variation_examples() {
        assert_eq!(total_variation_of_max(&DiscreteSignal::delta(0), MaxKind::Uncentered).unwrap(), int(2));
        assert_eq!(total_variation_of_max(&DiscreteSignal::zero(), MaxKind::Centered).unwrap(), int(0));
        assert_eq!(total_variation_of_max(&two_spikes(), MaxKind::Centered).unwrap(), frac(24, 7));
        let step = DiscreteSignal::step(int(1), int(0), 0);
        assert!(matches!(total_variation_of_max(&step, MaxKind::Centered), Err(Error::NonzeroTail)));
    }

    #[test]
    fn limits_with_tails() {
        let f = DiscreteSignal::new(int(1), int(3), 0, vec![int(0)]);
        let p = maximal_profile(&f, MaxKind::Centered, -3, 3).unwrap();
        assert_eq!(p.left_limit, int(2));
        assert_eq!(p.right_limit, int(3));
        let p = maximal_profile(&f, MaxKind::Uncentered, -3, 3).unwrap();
        assert_eq!(p.left_limit, int(3));
        // far left the uncentered operator still reaches the right tail
        assert_eq!(uncentered_max_value(&f, -50).reach, Reach::AtInfinity);
        assert_eq!(uncentered_max_value(&f, -50).value, int(3));
    }

    #[test]
    fn shift_inequality_examples() {
        let d = DiscreteSignal::delta(0);
        let c = average_shift_inequality_check(&d, 0, 1, 1);
        assert!(c.passed);
        assert_eq!(c.slack, frac(2, 3));
        let c = average_shift_inequality_check(&d, 4, 4, 2);
        assert!(c.passed);
        assert_eq!(c.slack, int(0));
    }
}
