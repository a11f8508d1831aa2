//! Exact distances between two maximal functions over all of `ℤ`.
//!
//! Right of the support `[s, e]` of a zero-tail signal the maximal function
//! is an upper envelope of hyperbolas
//!
//! ```text
//! Mf(n) = max_{t ∈ [s, e]} P(t) / (c(n − t) + 1),   P(t) = Σ_{k ≥ t} |f(k)|,
//! ```
//!
//! with `c = 2` (centered) or `c = 1` (uncentered). Taking reciprocals turns
//! this into a lower envelope of lines, so it splits into finitely many
//! pieces, each a single hyperbola. On a piece shared by two signals their
//! difference has at most one real critical point, which makes variation
//! and sup norm of the difference finite computations. The left side is
//! handled by reflection.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{maximal_profile, MaxKind, MaximalProfile};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::signal::DiscreteSignal;

#[derive(Clone, Debug)]
struct Piece {
    start: i64,
    t: i64,
    mass: Rational,
}

/// Right-tail envelope, valid for `n > end`.
#[derive(Clone, Debug)]
struct Envelope {
    c: i64,
    end: i64,
    pieces: Vec<Piece>,
}

impl Envelope {
    fn new(f: &DiscreteSignal, kind: MaxKind, from: i64) -> Envelope {
        let c = match kind {
            MaxKind::Centered => 2,
            MaxKind::Uncentered => 1,
        };
        let Some((s, e)) = f.support() else {
            return Envelope { c, end: from - 1, pieces: Vec::new() };
        };
        debug_assert!(from > e);
        // mass[i] = P(s + i)
        let mut mass: Vec<Rational> = (s..=e).map(|k| f.eval(k).abs()).collect();
        for i in (0..mass.len().saturating_sub(1)).rev() {
            let next = mass[i + 1].clone();
            mass[i] += next;
        }
        let value = |i: usize, x: i64| &mass[i] / rational::int(c * (x - s - i as i64) + 1);
        let best_at = |x: i64| {
            // largest value, ties to the largest t
            let mut best = mass.len() - 1;
            let mut best_v = value(best, x);
            for i in (0..mass.len() - 1).rev() {
                let v = value(i, x);
                if v > best_v {
                    best = i;
                    best_v = v;
                }
            }
            best
        };
        let mut pieces = Vec::new();
        let mut x = from;
        let mut cur = best_at(x);
        loop {
            pieces.push(Piece { start: x, t: s + cur as i64, mass: mass[cur].clone() });
            // only heavier lines can overtake later
            let t = s + cur as i64;
            let mut next: Option<i64> = None;
            for (i, m) in mass.iter().enumerate() {
                if m <= &mass[cur] {
                    continue;
                }
                let t2 = s + i as i64;
                // P₂(c(x − t) + 1) > P₁(c(x − t₂) + 1)
                let num = &mass[cur] * rational::int(1 - c * t2) - m * rational::int(1 - c * t);
                let den = rational::int(c) * (m - &mass[cur]);
                let q = num / den;
                let first = (q.floor().to_integer() + BigInt::from(1)).to_i64().unwrap_or(i64::MAX).max(x + 1);
                next = Some(next.map_or(first, |n| n.min(first)));
            }
            match next {
                Some(nx) if nx < i64::MAX => {
                    x = nx;
                    cur = best_at(x);
                }
                _ => break,
            }
        }
        Envelope { c, end: from - 1, pieces }
    }

    fn piece(&self, n: i64) -> Option<&Piece> {
        let idx = self.pieces.partition_point(|p| p.start <= n);
        idx.checked_sub(1).map(|i| &self.pieces[i])
    }

    fn eval(&self, n: i64) -> Rational {
        debug_assert!(n > self.end);
        match self.piece(n) {
            Some(p) => &p.mass / rational::int(self.c * (n - p.t) + 1),
            None => Rational::zero(),
        }
    }
}

/// Exact comparison of `Mg` against `Mf` over `ℤ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalComparison {
    /// `Var(Mg − Mf)`, equal to `‖Mg − Mf‖_BV` since both vanish at −∞.
    pub var_diff: Rational,
    /// `‖Mg − Mf‖_∞`.
    pub sup_diff: Rational,
    /// `‖(Mg)′ − (Mf)′‖_∞`.
    pub deriv_sup_diff: Rational,
    pub var_f: Rational,
    pub var_g: Rational,
    /// Profiles over the common window.
    pub profile_f: MaximalProfile,
    pub profile_g: MaximalProfile,
}

struct TailStats {
    var: Rational,
    sup: Rational,
    deriv_sup: Rational,
}

/// Tail of `D = Mg − Mf` on `[start, ∞)`, where `start` is at or right of
/// both supports and `d_start = D(start)`.
///
/// `known` is a lower bound on the derivative sup already established
/// elsewhere; it only serves to prune the search.
fn right_tail(
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    kind: MaxKind,
    start: i64,
    d_start: Rational,
    known: &Rational,
) -> TailStats {
    let ef = Envelope::new(f, kind, start + 1);
    let eg = Envelope::new(g, kind, start + 1);
    let c = ef.c;
    let d_at = |n: i64| if n == start { d_start.clone() } else { eg.eval(n) - ef.eval(n) };

    // integer points between which D is monotone
    let mut bounds: Vec<i64> = ef.pieces.iter().chain(eg.pieces.iter()).map(|p| p.start).collect();
    bounds.push(start + 1);
    bounds.sort_unstable();
    bounds.dedup();
    let mut points: Vec<i64> = vec![start];
    for (i, &a) in bounds.iter().enumerate() {
        let b = bounds.get(i + 1).map(|&b| b - 1);
        points.push(a);
        if let Some(b) = b {
            points.push(b);
        }
        let (pf, pg) = (ef.piece(a), eg.piece(a));
        if let (Some(pf), Some(pg)) = (pf, pg) {
            for x in critical_neighbourhood(c, pf, pg) {
                if x >= a && b.is_none_or(|b| x <= b) {
                    points.push(x);
                }
            }
        }
    }
    points.sort_unstable();
    points.dedup();
    let values: Vec<Rational> = points.iter().map(|&n| d_at(n)).collect();
    let mut var = values.last().map(|v| v.abs()).unwrap_or_default();
    for w in values.windows(2) {
        var += (&w[1] - &w[0]).abs();
    }
    let sup = values.iter().map(|v| v.abs()).fold(Rational::zero(), rational::max);

    let deriv_sup = if var.is_zero() {
        Rational::zero()
    } else {
        tail_step_sup(&ef, &eg, start, &bounds, &d_at, known)
    };
    TailStats { var, sup, deriv_sup }
}

/// `max_{n ≥ start} |D(n + 1) − D(n)|`, or `known` if that is larger.
///
/// Between consecutive piece starts both envelopes are single hyperbolas,
/// and `D(n + 1) − D(n) = c(B/(V(V + c)) − A/(U(U + c)))` with both terms
/// positive and decreasing in `n`. On a range `[lo, hi]` that pins the step
/// between `c(p(hi) − q(lo))` and `c(p(lo) − q(hi))`, a bound that tightens
/// under bisection. Ranges are split until the bound falls below the best
/// step found.
fn tail_step_sup(
    ef: &Envelope,
    eg: &Envelope,
    start: i64,
    bounds: &[i64],
    d_at: &dyn Fn(i64) -> Rational,
    known: &Rational,
) -> Rational {
    let step = |n: i64| (d_at(n + 1) - d_at(n)).abs();
    let mut best = rational::max(known.clone(), step(start));
    // ranges of n whose steps stay on one pair of hyperbolas
    let mut pending: Vec<(i64, Option<i64>)> = Vec::new();
    for (i, &a) in bounds.iter().enumerate() {
        match bounds.get(i + 1) {
            Some(&b) => {
                // the step from b − 1 crosses into the next pair
                best = rational::max(best, step(b - 1));
                if b - 2 >= a {
                    pending.push((a, Some(b - 2)));
                }
            }
            None => pending.push((a, None)),
        }
    }
    let term = |e: &Envelope, n: Option<i64>, at: i64| -> Rational {
        let (Some(n), Some(p)) = (n, e.piece(at)) else { return Rational::zero() };
        let v = e.c * (n - p.t) + 1;
        &p.mass / (rational::int(v) * rational::int(v + e.c))
    };
    let c = rational::int(ef.c);
    while let Some((lo, hi)) = pending.pop() {
        let (p_lo, p_hi) = (term(ef, Some(lo), lo), term(ef, hi, lo));
        let (q_lo, q_hi) = (term(eg, Some(lo), lo), term(eg, hi, lo));
        let bound = &c * rational::max((&p_hi - &q_lo).abs(), (&p_lo - &q_hi).abs());
        if bound <= best {
            continue;
        }
        best = rational::max(best, step(lo));
        match hi {
            Some(hi) if hi - lo <= 4 => {
                for n in lo + 1..=hi {
                    best = rational::max(best, step(n));
                }
            }
            Some(hi) => {
                best = rational::max(best, step(hi));
                let mid = lo + (hi - lo) / 2;
                pending.push((lo + 1, Some(mid)));
                pending.push((mid + 1, Some(hi - 1)));
            }
            None => {
                let mid = lo + (lo - start).max(4);
                pending.push((mid + 1, None));
                pending.push((lo + 1, Some(mid)));
            }
        }
    }
    best
}

/// Integers around the real critical point of `A/(cx + α) − B/(cx + β)`.
fn critical_neighbourhood(c: i64, pf: &Piece, pg: &Piece) -> Vec<i64> {
    let a = rational::to_f64(&pg.mass);
    let b = rational::to_f64(&pf.mass);
    if a == 0.0 || b == 0.0 || pf.mass == pg.mass {
        return Vec::new();
    }
    let alpha = (1 - c * pg.t) as f64;
    let beta = (1 - c * pf.t) as f64;
    let (sa, sb) = (a.sqrt(), b.sqrt());
    let x = (sa * beta - sb * alpha) / (c as f64 * (sb - sa));
    if !x.is_finite() || x.abs() > 1e15 {
        return Vec::new();
    }
    let lo = x.floor() as i64;
    (lo - 2..=lo + 3).collect()
}

/// Exact variation, sup and derivative-sup distances between `Mg` and `Mf`
/// for zero-tail signals.
pub fn compare_maximal(f: &DiscreteSignal, g: &DiscreteSignal, kind: MaxKind) -> Result<MaximalComparison> {
    if !f.has_zero_tails() || !g.has_zero_tails() {
        return Err(Error::NonzeroTail);
    }
    let (lo, hi) = match (f.support(), g.support()) {
        (None, None) => (0, 0),
        (Some(a), None) | (None, Some(a)) => a,
        (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
    };
    let pf = maximal_profile(f, kind, lo, hi)?;
    let pg = maximal_profile(g, kind, lo, hi)?;
    let diff: Vec<Rational> = pg.values.iter().zip(&pf.values).map(|(a, b)| a - b).collect();

    let mut var_diff = Rational::zero();
    let mut deriv_sup = Rational::zero();
    for w in diff.windows(2) {
        let step = (&w[1] - &w[0]).abs();
        var_diff += &step;
        deriv_sup = rational::max(deriv_sup, step);
    }
    let right = right_tail(f, g, kind, hi, diff.last().unwrap().clone(), &deriv_sup);
    let left = right_tail(&f.reflect(), &g.reflect(), kind, -lo, diff[0].clone(), &deriv_sup);
    var_diff += right.var + left.var;
    let deriv_sup = rational::max(deriv_sup, rational::max(right.deriv_sup, left.deriv_sup));
    let sup = diff.iter().map(|v| v.abs()).fold(rational::max(right.sup, left.sup), rational::max);
    Ok(MaximalComparison {
        var_diff,
        sup_diff: sup,
        deriv_sup_diff: deriv_sup,
        var_f: pf.total_variation()?,
        var_g: pg.total_variation()?,
        profile_f: pf,
        profile_g: pg,
    })
}
