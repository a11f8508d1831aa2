//! Alternating local extrema of a maximal profile and the quantities built
//! on them: rise/fall sums, the critical set of maxima that lie strictly
//! above `|f|`, and the witness point bounding such a maximum from below.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{MaxKind, MaximalProfile, Reach};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::signal::DiscreteSignal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Max,
    Min,
}

/// A maximal constancy interval `[lo, hi]` strictly above (max) or below
/// (min) both of its neighbours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub kind: ExtremumKind,
    pub lo: i64,
    pub hi: i64,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtremaDecomposition {
    pub intervals: Vec<Extremum>,
}

impl ExtremaDecomposition {
    pub fn maxima(&self) -> impl Iterator<Item = (usize, &Extremum)> {
        self.intervals.iter().enumerate().filter(|(_, e)| e.kind == ExtremumKind::Max)
    }

    /// Consecutive (local min, local max) pairs with the minimum on the left.
    pub fn rising_pairs(&self) -> impl Iterator<Item = (&Extremum, &Extremum)> {
        self.intervals
            .windows(2)
            .filter(|w| w[0].kind == ExtremumKind::Min && w[1].kind == ExtremumKind::Max)
            .map(|w| (&w[0], &w[1]))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

pub fn extrema_decomposition(p: &MaximalProfile) -> Result<ExtremaDecomposition> {
    if p.flat {
        return Ok(ExtremaDecomposition::default());
    }
    let (lo, hi) = p.window();
    // plateaus as (start, end) index pairs
    let mut plateaus: Vec<(i64, i64)> = Vec::new();
    let mut start = lo;
    for n in lo..=hi {
        if n == hi || p.values[(n + 1 - lo) as usize] != p.values[(n - lo) as usize] {
            plateaus.push((start, n));
            start = n + 1;
        }
    }
    let mut intervals = Vec::new();
    for &(x, y) in &plateaus {
        let v = p.value(x).unwrap();
        let left = p.value(x - 1).unwrap();
        let right = p.value(y + 1).unwrap();
        if (x == lo && left == v) || (y == hi && right == v) {
            return Err(Error::AmbiguousBoundary(format!(
                "plateau [{x}, {y}] continues past the window [{lo}, {hi}]"
            )));
        }
        let kind = if left < v && right < v {
            ExtremumKind::Max
        } else if left > v && right > v {
            ExtremumKind::Min
        } else {
            continue;
        };
        intervals.push(Extremum { kind, lo: x, hi: y, value: v.clone() });
    }
    Ok(ExtremaDecomposition { intervals })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperEnd {
    Finite(i64),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KurkaSums {
    /// Total rise between consecutive anchors.
    #[serde(with = "rational::serde_str")]
    pub s1: Rational,
    /// Total fall between consecutive anchors.
    #[serde(with = "rational::serde_str")]
    pub s2: Rational,
    pub k: i64,
    pub u: UpperEnd,
}

/// Rise and fall sums of the profile over `[k, u]`.
///
/// The anchors are `k`, the right ends of all extrema strictly inside the
/// range, and `u`. With `u = ∞` the last anchor is the limit at +∞, which
/// needs a profile that decays outside its window.
pub fn kurka_sums(p: &MaximalProfile, d: &ExtremaDecomposition, k: i64, u: UpperEnd) -> Result<KurkaSums> {
    let (lo, hi) = p.window();
    if !(lo..=hi).contains(&k) {
        return Err(Error::InvalidArgument(format!("k = {k} outside window [{lo}, {hi}]")));
    }
    let upper = match u {
        UpperEnd::Finite(u) => {
            if u < k || u > hi {
                return Err(Error::InvalidArgument(format!("u = {u} outside [{k}, {hi}]")));
            }
            u
        }
        UpperEnd::Infinity => {
            if !(p.decays_outside || p.flat) {
                return Err(Error::Precondition("u = ∞ needs a profile that decays outside its window".into()));
            }
            hi + 1
        }
    };
    let mut anchors: Vec<Rational> = vec![p.value(k).unwrap().clone()];
    for e in &d.intervals {
        if e.hi > k && e.hi < upper {
            anchors.push(e.value.clone());
        }
    }
    match u {
        UpperEnd::Finite(u) => {
            if u > k {
                anchors.push(p.value(u).unwrap().clone())
            }
        }
        UpperEnd::Infinity => anchors.push(p.right_limit.clone()),
    }
    let mut s1 = Rational::zero();
    let mut s2 = Rational::zero();
    for w in anchors.windows(2) {
        let delta = &w[1] - &w[0];
        if delta.is_positive() {
            s1 += delta;
        } else {
            s2 -= delta;
        }
    }
    Ok(KurkaSums { s1, s2, k, u })
}

/// Local maxima (by index into `d.intervals`) whose rise `[b₊, a₊]` lies in
/// `[k, v]`, that stay strictly above `|f|`, and whose good radius at `a₊`
/// reaches back to `k`. `b₊` is the right end of the preceding local
/// minimum, or `k` when there is none.
pub fn critical_set(
    p: &MaximalProfile,
    d: &ExtremaDecomposition,
    f: &DiscreteSignal,
    k: i64,
    v: UpperEnd,
) -> Vec<usize> {
    let within = |x: i64| match v {
        UpperEnd::Finite(v) => x <= v,
        UpperEnd::Infinity => true,
    };
    let mut out = Vec::new();
    for (i, e) in d.maxima() {
        let b_plus = d.intervals[..i]
            .iter()
            .rev()
            .find(|m| m.kind == ExtremumKind::Min)
            .map(|m| m.hi)
            .unwrap_or(k);
        if b_plus < k || !within(e.hi) {
            continue;
        }
        if (e.lo..=e.hi).any(|a| p.value(a).unwrap() == &f.eval(a).abs()) {
            continue;
        }
        let reaches_back = match p.reach(e.hi) {
            Some(Reach::Finite { left, .. }) => e.hi - left as i64 <= k,
            Some(Reach::AtInfinity) => true,
            None => false,
        };
        if reaches_back {
            out.push(i);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma7Witness {
    pub s: i64,
    /// `Mf(b₊) + (Mf(a₊) − Mf(b₊))(2r + 1) / (2(a₊ − b₊))`.
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    /// `|f(s)|`.
    #[serde(with = "rational::serde_str")]
    pub attained_value: Rational,
    /// Good radius at `a₊`.
    pub radius: u64,
}

impl Lemma7Witness {
    pub fn holds(&self) -> bool {
        self.attained_value >= self.bound
    }
}

/// Finds `s` maximising `|f|` over `[a₊ + r − 2(a₊ − b₊), a₊ + r]` for a
/// local maximum `[a₋, a₊]` of the centered profile preceded by a local
/// minimum `[b₋, b₊]`, with `r` the good radius at `a₊`.
pub fn lemma7_witness(
    f: &DiscreteSignal,
    p: &MaximalProfile,
    local_max: &Extremum,
    local_min: &Extremum,
) -> Result<Lemma7Witness> {
    let (a_minus, a_plus) = (local_max.lo, local_max.hi);
    let (b_minus, b_plus) = (local_min.lo, local_min.hi);
    if a_plus == b_plus {
        return Err(Error::Precondition("a₊ = b₊ makes the bound undefined".into()));
    }
    if p.kind != MaxKind::Centered {
        return Err(Error::Precondition("the witness is defined for the centered operator".into()));
    }
    if b_plus >= a_minus {
        return Err(Error::Precondition(format!("minimum end {b_plus} is not left of maximum start {a_minus}")));
    }
    let lookup = |n: i64| {
        p.value(n)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("point {n} outside the profile window")))
    };
    let top = lookup(a_plus)?;
    let bottom = lookup(b_plus)?;
    for a in a_minus..=a_plus {
        if lookup(a)? != top {
            return Err(Error::Precondition(format!("[{a_minus}, {a_plus}] is not a plateau")));
        }
    }
    if !(lookup(a_minus - 1)? < top && lookup(a_plus + 1)? < top) {
        return Err(Error::Precondition(format!("[{a_minus}, {a_plus}] is not a local maximum")));
    }
    for b in b_minus..=b_plus {
        if lookup(b)? != bottom {
            return Err(Error::Precondition(format!("[{b_minus}, {b_plus}] is not a plateau")));
        }
    }
    if !(lookup(b_minus - 1)? > bottom && lookup(b_plus + 1)? > bottom) {
        return Err(Error::Precondition(format!("[{b_minus}, {b_plus}] is not a local minimum")));
    }
    let mut increasing = true;
    let mut decreasing = true;
    for n in b_plus..a_minus {
        let (x, y) = (lookup(n)?, lookup(n + 1)?);
        increasing &= x <= y;
        decreasing &= x >= y;
    }
    if !(increasing || decreasing) {
        return Err(Error::Precondition(format!("profile is not monotone on [{b_plus}, {a_minus}]")));
    }
    if let Some(a) = (a_minus..=a_plus).find(|&a| top == f.eval(a).abs()) {
        return Err(Error::Precondition(format!("Mf({a}) = |f({a})| on the maximum")));
    }
    let radius = match p.reach(a_plus) {
        Some(Reach::Finite { left, .. }) => left,
        _ => return Err(Error::Precondition(format!("no attained good radius at {a_plus}"))),
    };
    let r = radius as i64;
    let gap = a_plus - b_plus;
    let bound = &bottom + (&top - &bottom) * rational::int(2 * r + 1) / rational::int(2 * gap);
    let lo = a_plus + r - 2 * gap;
    let hi = a_plus + r;
    let mut s = lo;
    let mut best = f.eval(lo).abs();
    for n in lo + 1..=hi {
        let v = f.eval(n).abs();
        if v > best {
            best = v;
            s = n;
        }
    }
    Ok(Lemma7Witness { s, bound, attained_value: best, radius })
}

/// A qualifying (local min, local max) configuration and its witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma7Case {
    /// Found on the reflected signal `n ↦ f(−n)`, i.e. with the minimum on
    /// the right in the original orientation.
    pub reflected: bool,
    pub local_min: Extremum,
    pub local_max: Extremum,
    pub witness: Lemma7Witness,
}

/// Every rising (min, max) pair of the centered profile of `f`, in both
/// orientations, that meets the witness preconditions.
pub fn lemma7_cases(f: &DiscreteSignal) -> Result<Vec<Lemma7Case>> {
    if !f.has_zero_tails() {
        return Err(Error::NonzeroTail);
    }
    let mut out = Vec::new();
    for (reflected, g) in [(false, f.clone()), (true, f.reflect())] {
        let Some((lo, hi)) = g.support() else { continue };
        let p = super::maximal_profile(&g, MaxKind::Centered, lo, hi)?;
        let d = extrema_decomposition(&p)?;
        for (min, max) in d.rising_pairs() {
            match lemma7_witness(&g, &p, max, min) {
                Ok(witness) => out.push(Lemma7Case { reflected, local_min: min.clone(), local_max: max.clone(), witness }),
                Err(Error::Precondition(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::maximal_profile;
    use crate::rational::{frac, int};

    fn two_spikes() -> DiscreteSignal {
        DiscreteSignal::from_values(0, vec![int(1), int(0), int(0), int(0), int(0), int(1)])
    }

    #[test]
    fn decomposition_of_two_spikes() {
        let p = maximal_profile(&two_spikes(), MaxKind::Centered, -3, 8).unwrap();
        let d = extrema_decomposition(&p).unwrap();
        let got: Vec<_> = d.intervals.iter().map(|e| (e.kind, e.lo, e.hi, e.value.clone())).collect();
        assert_eq!(
            got,
            vec![
                (ExtremumKind::Max, 0, 0, int(1)),
                (ExtremumKind::Min, 2, 3, frac(2, 7)),
                (ExtremumKind::Max, 5, 5, int(1)),
            ]
        );
    }

    #[test]
    fn decomposition_of_constant_and_delta() {
        let c = DiscreteSignal::constant(int(2));
        let p = maximal_profile(&c, MaxKind::Centered, -3, 3).unwrap();
        assert!(extrema_decomposition(&p).unwrap().is_empty());
        let p = maximal_profile(&DiscreteSignal::delta(0), MaxKind::Centered, -4, 4).unwrap();
        let d = extrema_decomposition(&p).unwrap();
        assert_eq!(d.intervals.len(), 1);
        assert_eq!((d.intervals[0].kind, d.intervals[0].lo, d.intervals[0].hi), (ExtremumKind::Max, 0, 0));
    }

    #[test]
    fn decomposition_rejects_open_plateau() {
        // right tail 1 keeps the profile at 1 past the window
        let f = DiscreteSignal::new(int(0), int(1), 0, vec![int(0), int(1)]);
        let p = maximal_profile(&f, MaxKind::Centered, -2, 3).unwrap();
        assert!(matches!(extrema_decomposition(&p), Err(Error::AmbiguousBoundary(_))));
    }

    #[test]
    fn kurka_on_two_spikes() {
        let p = maximal_profile(&two_spikes(), MaxKind::Centered, -3, 8).unwrap();
        let d = extrema_decomposition(&p).unwrap();
        let k = kurka_sums(&p, &d, 0, UpperEnd::Finite(5)).unwrap();
        assert_eq!(k.s1, frac(5, 7));
        assert_eq!(k.s2, frac(5, 7));
        let k = kurka_sums(&p, &d, 0, UpperEnd::Infinity).unwrap();
        assert_eq!(k.s1, frac(5, 7));
        assert_eq!(k.s2, frac(5, 7) + int(1));
        // monotone stretch after the last maximum
        let k = kurka_sums(&p, &d, 5, UpperEnd::Finite(8)).unwrap();
        assert_eq!(k.s1, int(0));
    }

    #[test]
    fn critical_set_excludes_maxima_touching_f() {
        let f = two_spikes();
        let p = maximal_profile(&f, MaxKind::Centered, -3, 8).unwrap();
        let d = extrema_decomposition(&p).unwrap();
        assert!(critical_set(&p, &d, &f, -3, UpperEnd::Infinity).is_empty());
        let c = DiscreteSignal::constant(int(1));
        let pc = maximal_profile(&c, MaxKind::Centered, 0, 4).unwrap();
        let dc = extrema_decomposition(&pc).unwrap();
        assert!(critical_set(&pc, &dc, &c, 0, UpperEnd::Infinity).is_empty());
    }

    fn lifted_max() -> DiscreteSignal {
        // Mf = 2, 2/3, 4/5, 2/3, 2: local maximum at 2 strictly above f(2) = 0
        DiscreteSignal::from_values(0, vec![int(2), int(0), int(0), int(0), int(2)])
    }

    #[test]
    fn witness_on_lifted_maximum() {
        let f = lifted_max();
        let p = maximal_profile(&f, MaxKind::Centered, -12, 20).unwrap();
        let d = extrema_decomposition(&p).unwrap();
        let (min, max) = d
            .rising_pairs()
            .find(|(_, mx)| (mx.lo..=mx.hi).all(|a| p.value(a).unwrap() != &f.eval(a).abs()))
            .expect("a lifted maximum");
        let w = lemma7_witness(&f, &p, max, min).unwrap();
        assert!(w.holds(), "{w:?}");
        assert_eq!((w.bound.clone(), w.radius), (int(1), 2));
        let r = w.radius as i64;
        assert!(min.hi <= w.s && w.s <= max.hi + r);
    }

    #[test]
    fn witness_guards() {
        let f = two_spikes();
        let p = maximal_profile(&f, MaxKind::Centered, -3, 8).unwrap();
        let d = extrema_decomposition(&p).unwrap();
        let (min, max) = (&d.intervals[1], &d.intervals[2]);
        // Mf(5) = f(5): precondition fails
        assert!(matches!(lemma7_witness(&f, &p, max, min), Err(Error::Precondition(_))));
        let degenerate = Extremum { kind: ExtremumKind::Min, lo: 5, hi: 5, value: int(1) };
        let err = lemma7_witness(&f, &p, max, &degenerate).unwrap_err();
        assert!(err.to_string().contains("a₊ = b₊"));
    }
}
