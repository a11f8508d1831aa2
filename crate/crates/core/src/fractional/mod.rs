//! The fractional maximal operator on piecewise-linear functions.
//!
//! For `0 < β < 1` and an interval `[a, b]` write
//!
//! ```text
//! Φ(a, b) = ((b − a)/2)^β · (1/(b − a)) ∫_a^b |f| = 2^{−β} (b − a)^{β−1} (I(b) − I(a)),
//! ```
//!
//! where `I` is a primitive of `|f|`. The non-centered operator is the sup
//! of `Φ` over `a ≤ x ≤ b` and the centered one restricts to `a = x − r`,
//! `b = x + r`. Since `|f|` is piecewise linear, `I` is piecewise quadratic
//! and the sup can be found exactly: split the `(a, b)` rectangle into
//! cells on which both endpoints stay in one linear piece; inside a cell
//! every stationarity condition of `Φ` reduces to a quadratic equation.

mod oracle;
mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pwl::PwlFunction;

pub use oracle::{brute_force_eval, holder_bound_check, HolderCheck, OracleValue};
pub use quadrature::{derivative_lq_distance, derivative_lq_norm, GridSpec, LqEstimate};

/// Relative tolerance defining the set of near-maximal intervals.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub beta: f64,
    /// `1/(1 − β)`
    pub q: f64,
    /// `1/β`, the Hölder conjugate of `q`
    pub q_conj: f64,
}

impl BetaParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.05..=0.95).contains(&beta) {
            return Err(Error::BetaOutOfRange(beta));
        }
        Ok(BetaParams { beta, q: 1.0 / (1.0 - beta), q_conj: 1.0 / beta })
    }
}

/// A maximizing interval for the non-centered operator at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodBall {
    pub a: f64,
    pub b: f64,
    pub radius: f64,
    pub value: f64,
}

/// A piece of `|f|` restricted to `[lo, hi]`, with the primitive at `lo`.
#[derive(Clone, Copy, Debug)]
struct Span {
    lo: f64,
    hi: f64,
    g: f64,
    slope: f64,
    integral: f64,
}

impl Span {
    fn g_at(&self, x: f64) -> f64 {
        self.g + self.slope * (x - self.lo)
    }

    fn integral_at(&self, x: f64) -> f64 {
        let t = x - self.lo;
        self.integral + t * (self.g + 0.5 * self.slope * t)
    }
}

/// `|f|` prepared for repeated evaluation of the operator.
#[derive(Clone, Debug)]
pub struct FractionalMaximal {
    params: BetaParams,
    xs: Vec<f64>,
    g: Vec<f64>,
    slope: Vec<f64>,
    cum: Vec<f64>,
    sup: f64,
    /// `2^{−β}`
    factor: f64,
}

impl FractionalMaximal {
    pub fn new(f: &PwlFunction, params: BetaParams) -> Self {
        let h = f.abs();
        let xs = h.breakpoints().to_vec();
        let g = h.values().to_vec();
        let slope: Vec<f64> = xs.windows(2).zip(g.windows(2)).map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0])).collect();
        let mut cum = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            cum[i] = cum[i - 1] + 0.5 * (xs[i] - xs[i - 1]) * (g[i] + g[i - 1]);
        }
        let sup = g.iter().fold(0.0f64, |m, &v| m.max(v));
        FractionalMaximal { params, xs, g, slope, cum, sup, factor: 2f64.powf(-params.beta) }
    }

    pub fn params(&self) -> BetaParams {
        self.params
    }

    pub fn is_zero(&self) -> bool {
        self.sup == 0.0
    }

    /// `‖f‖₁`
    pub fn mass(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        if self.is_zero() {
            None
        } else {
            Some((self.xs[0], *self.xs.last().unwrap()))
        }
    }

    pub(crate) fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    /// Segment `k` with `xs[k] ≤ x < xs[k + 1]`.
    fn segment(&self, x: f64) -> Option<usize> {
        let n = self.xs.len();
        if n < 2 || x < self.xs[0] || x >= self.xs[n - 1] {
            return None;
        }
        Some(self.xs.partition_point(|&p| p <= x) - 1)
    }

    /// `|f|(x)`
    pub fn abs_value(&self, x: f64) -> f64 {
        match self.segment(x) {
            Some(k) => self.g[k] + self.slope[k] * (x - self.xs[k]),
            None => 0.0,
        }
    }

    /// `∫_{−∞}^x |f|`
    pub fn primitive(&self, x: f64) -> f64 {
        match self.segment(x) {
            Some(k) => {
                let t = x - self.xs[k];
                self.cum[k] + t * (self.g[k] + 0.5 * self.slope[k] * t)
            }
            None if !self.xs.is_empty() && x >= self.xs[self.xs.len() - 1] => self.mass(),
            None => 0.0,
        }
    }

    /// `Φ(a, b)`; zero for degenerate intervals.
    pub fn phi(&self, a: f64, b: f64) -> f64 {
        let len = b - a;
        if len <= 0.0 {
            return 0.0;
        }
        self.factor * len.powf(self.params.beta - 1.0) * (self.primitive(b) - self.primitive(a))
    }

    /// Splits `[lo, hi]` at the breakpoints of `|f|`.
    fn spans(&self, lo: f64, hi: f64) -> Vec<Span> {
        let span = |lo: f64, hi: f64| {
            let mid = 0.5 * (lo + hi);
            let slope = self.segment(mid).map_or(0.0, |k| self.slope[k]);
            Span { lo, hi, g: self.abs_value(lo), slope, integral: self.primitive(lo) }
        };
        if lo >= hi {
            return vec![span(lo, lo)];
        }
        let mut cuts = vec![lo];
        cuts.extend(self.xs.iter().copied().filter(|&p| p > lo && p < hi));
        cuts.push(hi);
        cuts.windows(2).map(|w| span(w[0], w[1])).collect()
    }

    /// Upper bound for `Φ` on a cell, from `F ≤ F_max` and `F ≤ L‖f‖_∞`.
    fn cell_bound(&self, sa: &Span, sb: &Span) -> f64 {
        let f_max = sb.integral_at(sb.hi) - sa.integral;
        let (l_min, l_max) = ((sb.lo - sa.hi).max(0.0), sb.hi - sa.lo);
        if l_max <= 0.0 || f_max <= 0.0 {
            return 0.0;
        }
        let beta = self.params.beta;
        let l = (f_max / self.sup).clamp(l_min.max(f64::MIN_POSITIVE), l_max);
        self.factor * (l.powf(beta - 1.0) * f_max).min(l.powf(beta) * self.sup)
    }

    fn cell_candidates(&self, sa: &Span, sb: &Span, out: &mut Vec<(f64, f64)>) {
        let beta = self.params.beta;
        let tol_a = 1e-12 * (1.0 + sa.lo.abs().max(sa.hi.abs()));
        let tol_b = 1e-12 * (1.0 + sb.lo.abs().max(sb.hi.abs()));
        for &a in &[sa.lo, sa.hi] {
            for &b in &[sb.lo, sb.hi] {
                out.push((a, b));
            }
        }
        // b free on an edge a = const: g(b)·L = (1 − β)F
        if sb.hi > sb.lo {
            for &a in &[sa.lo, sa.hi] {
                let u = sb.g;
                let s = sb.slope;
                let d = sb.lo - a;
                let c = sb.integral - sa.integral_at(a);
                let width = sb.hi - sb.lo;
                for t in quadratic_roots(0.5 * s * (1.0 + beta), beta * u + s * d, u * d - (1.0 - beta) * c) {
                    if t > -tol_b && t < width + tol_b {
                        out.push((a, sb.lo + t.clamp(0.0, width)));
                    }
                }
            }
        }
        // a free on an edge b = const: g(a)·L = (1 − β)F
        if sa.hi > sa.lo {
            for &b in &[sb.lo, sb.hi] {
                let u = sa.g;
                let s = sa.slope;
                let d = b - sa.lo;
                let c = sb.integral_at(b) - sa.integral;
                let width = sa.hi - sa.lo;
                for t in quadratic_roots(-0.5 * s * (1.0 + beta), s * d - beta * u, u * d - (1.0 - beta) * c) {
                    if t > -tol_a && t < width + tol_a {
                        out.push((sa.lo + t.clamp(0.0, width), b));
                    }
                }
            }
        }
        // interior: g(a) = g(b) = (1 − β)F/L, a quadratic along the line g(a) = g(b)
        if sa.hi > sa.lo && sb.hi > sb.lo && (sa.slope != 0.0 || sb.slope != 0.0) {
            let (a0, b0) = if sa.slope.abs() >= sb.slope.abs() {
                let b0 = 0.5 * (sb.lo + sb.hi);
                (sa.lo + (sb.g_at(b0) - sa.g) / sa.slope, b0)
            } else {
                let a0 = 0.5 * (sa.lo + sa.hi);
                (a0, sb.lo + (sa.g_at(a0) - sb.g) / sb.slope)
            };
            let g0 = sa.g_at(a0);
            let l0 = b0 - a0;
            let f0 = sb.integral_at(b0) - sa.integral_at(a0);
            let k = sa.slope * sb.slope;
            let delta = sa.slope - sb.slope;
            let roots = quadratic_roots(0.5 * k * delta * (1.0 + beta), beta * delta * g0 + k * l0, g0 * l0 - (1.0 - beta) * f0);
            for tau in roots {
                let a = a0 + sb.slope * tau;
                let b = b0 + sa.slope * tau;
                if a > sa.lo - tol_a && a < sa.hi + tol_a && b > sb.lo - tol_b && b < sb.hi + tol_b {
                    out.push((a.clamp(sa.lo, sa.hi), b.clamp(sb.lo, sb.hi)));
                }
            }
        }
    }

    /// Admissible ranges for the endpoints at `x`; outside them `Φ` only loses.
    fn endpoint_ranges(&self, x: f64) -> ((f64, f64), (f64, f64)) {
        let (p0, pm) = (self.xs[0], *self.xs.last().unwrap());
        let a_range = if x <= p0 { (x, x) } else { (p0, x.min(pm)) };
        let b_range = if x >= pm { (x, x) } else { (x.max(p0), pm) };
        (a_range, b_range)
    }

    /// All near-maximal candidate intervals at `x`, with the sup.
    fn search(&self, x: f64) -> (f64, Vec<(f64, f64, f64)>) {
        let ((a_lo, a_hi), (b_lo, b_hi)) = self.endpoint_ranges(x);
        let a_spans = self.spans(a_lo, a_hi);
        let b_spans = self.spans(b_lo, b_hi);
        let mut cells: Vec<(f64, usize, usize)> = Vec::with_capacity(a_spans.len() * b_spans.len());
        for (i, sa) in a_spans.iter().enumerate() {
            for (k, sb) in b_spans.iter().enumerate() {
                cells.push((self.cell_bound(sa, sb), i, k));
            }
        }
        cells.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut best = 0.0f64;
        let mut near: Vec<(f64, f64, f64)> = Vec::new();
        let mut buf = Vec::new();
        for &(bound, i, k) in &cells {
            if bound < best * (1.0 - TIE_TOL) || bound == 0.0 {
                break;
            }
            buf.clear();
            self.cell_candidates(&a_spans[i], &b_spans[k], &mut buf);
            for &(a, b) in &buf {
                let v = self.phi(a, b);
                if v >= best * (1.0 - TIE_TOL) && v > 0.0 {
                    near.push((a, b, v));
                    if v > best {
                        best = v;
                        near.retain(|c| c.2 >= best * (1.0 - TIE_TOL));
                    }
                }
            }
        }
        (best, near)
    }

    /// Non-centered operator at `x`.
    pub fn uncentered(&self, x: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.search(x).0
    }

    /// The maximizing interval at `x`: among the near-maximal ones, the one
    /// with the largest left end, then the smallest right end.
    pub fn good_ball(&self, x: f64) -> Result<GoodBall> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let (best, near) = self.search(x);
        let (a, b) = tie_break(&near).expect("a nonzero function has a maximizing interval");
        Ok(GoodBall { a, b, radius: 0.5 * (b - a), value: best })
    }

    /// `(M̃f)′(x) = r^{β−1}(|f|(b) − |f|(a))/2` on the good ball.
    pub fn derivative_at(&self, x: f64) -> Result<f64> {
        let ball = self.good_ball(x)?;
        Ok(self.derivative_on(&ball))
    }

    pub(crate) fn derivative_on(&self, ball: &GoodBall) -> f64 {
        let r = ball.radius;
        0.5 * r.powf(self.params.beta - 1.0) * (self.abs_value(ball.b) - self.abs_value(ball.a))
    }

    /// Centered operator at `x`, with the smallest maximizing radius.
    pub fn centered_with_radius(&self, x: f64) -> (f64, f64) {
        if self.is_zero() {
            return (0.0, 0.0);
        }
        let beta = self.params.beta;
        let r_max = self.xs.iter().fold(0.0f64, |m, &p| m.max((p - x).abs()));
        let mut cuts: Vec<f64> = self.xs.iter().map(|&p| (p - x).abs()).filter(|&r| r > 0.0).collect();
        cuts.push(0.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let value = |r: f64| {
            if r <= 0.0 {
                return 0.0;
            }
            0.5 * r.powf(beta - 1.0) * (self.primitive(x + r) - self.primitive(x - r))
        };
        let mut candidates: Vec<f64> = cuts.iter().copied().filter(|&r| r > 0.0).collect();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi > r_max {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let sigma = self.segment(x + mid).map_or(0.0, |k| self.slope[k]) - self.segment(x - mid).map_or(0.0, |k| self.slope[k]);
            let s_lo = self.abs_value(x + lo) + self.abs_value(x - lo);
            let f_lo = self.primitive(x + lo) - self.primitive(x - lo);
            // r·S(r) = (1 − β)F(r) with t = r − lo
            for t in quadratic_roots(0.5 * sigma * (1.0 + beta), beta * s_lo + sigma * lo, lo * s_lo - (1.0 - beta) * f_lo) {
                if t > 0.0 && t < hi - lo {
                    candidates.push(lo + t);
                }
            }
        }
        let best = candidates.iter().map(|&r| value(r)).fold(0.0f64, f64::max);
        let radius = candidates
            .iter()
            .copied()
            .filter(|&r| value(r) >= best * (1.0 - TIE_TOL))
            .fold(f64::INFINITY, f64::min);
        (best, radius)
    }

    pub fn centered(&self, x: f64) -> f64 {
        self.centered_with_radius(x).0
    }
}

/// Largest `a`, then smallest `b`.
fn tie_break(near: &[(f64, f64, f64)]) -> Option<(f64, f64)> {
    near.iter().max_by(|p, q| p.0.total_cmp(&q.0).then(q.1.total_cmp(&p.1))).map(|c| (c.0, c.1))
}

/// Real roots of `a t² + b t + c`, degrading to the linear case.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-14 * b * b.max(4.0 * (a * c).abs()) {
        return Vec::new();
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

pub fn eval_uncentered(f: &PwlFunction, p: BetaParams, x: f64) -> f64 {
    FractionalMaximal::new(f, p).uncentered(x)
}

pub fn eval_centered(f: &PwlFunction, p: BetaParams, x: f64) -> f64 {
    FractionalMaximal::new(f, p).centered(x)
}

pub fn good_ball(f: &PwlFunction, p: BetaParams, x: f64) -> Result<GoodBall> {
    FractionalMaximal::new(f, p).good_ball(x)
}

pub fn derivative_at(f: &PwlFunction, p: BetaParams, x: f64) -> Result<f64> {
    FractionalMaximal::new(f, p).derivative_at(x)
}
