//! `L^q` norms of `(M̃_β f)′` by adaptive Gauss–Kronrod quadrature.
//!
//! The derivative is piecewise smooth with jumps where the good ball
//! switches, so intervals are refined globally by largest error estimate
//! until the total estimate meets the tolerance. Outside the support the
//! derivative obeys `|(M̃_β f)′(x)| ≤ 2^{−β}(1 − β)‖f‖₁ d^{β−2}` with `d` the
//! distance to the support, which gives the analytic tail bound
//! `(2^{−β}(1 − β)‖f‖₁)^q d^{−q}/q` used to truncate the domain.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BetaParams, FractionalMaximal};
use crate::error::{Error, Result};
use crate::pwl::PwlFunction;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances for the derivative norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Target for the quadrature error relative to `∫|·|^q`.
    pub rel_tol: f64,
    /// Absolute floor for the quadrature error target.
    pub abs_tol: f64,
    /// Bound on the discarded tail of `∫|·|^q`.
    pub tail_tol: f64,
    /// Intervals narrower than this (relative to `max(1, |x|)`) are not split.
    pub min_width: f64,
    pub max_evals: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { rel_tol: 1e-6, abs_tol: 1e-12, tail_tol: 1e-10, min_width: 1e-13, max_evals: 4_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LqEstimate {
    /// `(∫|·|^q)^{1/q}`
    pub norm: f64,
    pub integral: f64,
    pub quadrature_error: f64,
    pub truncation_error: f64,
    /// Error estimate carried over to `norm`.
    pub norm_error: f64,
    pub domain: (f64, f64),
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64 + Sync>(h: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let nodes: Vec<f64> = (0..15)
        .map(|i| match i {
            7 => c,
            i if i < 7 => c - half * XGK[i],
            i => c + half * XGK[14 - i],
        })
        .collect();
    let fx: Vec<f64> = nodes.par_iter().map(|&x| h(x)).collect();
    let mut k = WGK[7] * fx[7];
    let mut g = WG[3] * fx[7];
    for i in 0..7 {
        let pair = fx[i] + fx[14 - i];
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    Piece { a, b, value: k * half, error: ((k - g) * half).abs() }
}

struct Integral {
    value: f64,
    error: f64,
    evaluations: usize,
}

/// Globally adaptive integration over consecutive `cuts`.
fn integrate<F: Fn(f64) -> f64 + Sync>(h: &F, cuts: &[f64], spec: &GridSpec) -> Result<Integral> {
    let mut heap: BinaryHeap<Piece> = cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| kronrod(h, w[0], w[1])).collect();
    let mut evaluations = 15 * heap.len();
    let mut frozen: Vec<Piece> = Vec::new();
    let totals = |heap: &BinaryHeap<Piece>, frozen: &[Piece]| {
        heap.iter().chain(frozen).fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap, &frozen);
    let mut since_resum = 0;
    loop {
        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let width_floor = spec.min_width * worst.a.abs().max(worst.b.abs()).max(1.0);
        if worst.b - worst.a <= width_floor {
            frozen.push(worst);
            continue;
        }
        if evaluations >= spec.max_evals {
            heap.push(worst);
            break;
        }
        let m = 0.5 * (worst.a + worst.b);
        let left = kronrod(h, worst.a, m);
        let right = kronrod(h, m, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        since_resum += 1;
        if since_resum == 256 {
            (value, error) = totals(&heap, &frozen);
            since_resum = 0;
        }
    }
    let (value, error) = totals(&heap, &frozen);
    Ok(Integral { value, error, evaluations })
}

/// `∫_ℝ |Σ cᵢ (M̃_β fᵢ)′|^q` with every `fᵢ` sharing `β`.
fn derivative_power_integral(terms: &[(FractionalMaximal, f64)], p: BetaParams, spec: &GridSpec) -> Result<LqEstimate> {
    let q = p.q;
    let active: Vec<&(FractionalMaximal, f64)> = terms.iter().filter(|(m, c)| !m.is_zero() && *c != 0.0).collect();
    let hull = active
        .iter()
        .filter_map(|(m, _)| m.support())
        .fold(None, |acc: Option<(f64, f64)>, (lo, hi)| Some(acc.map_or((lo, hi), |(a, b)| (a.min(lo), b.max(hi)))));
    let Some((lo, hi)) = hull else {
        return Ok(LqEstimate {
            norm: 0.0,
            integral: 0.0,
            quadrature_error: 0.0,
            truncation_error: 0.0,
            norm_error: 0.0,
            domain: (0.0, 0.0),
            evaluations: 0,
        });
    };
    let beta = p.beta;
    let tail_const: f64 = active.iter().map(|(m, c)| c.abs() * 2f64.powf(-beta) * (1.0 - beta) * m.mass()).sum();
    let width = (hi - lo).max(1.0);
    // both tails together stay below tail_tol
    let reach = (tail_const * (2.0 / (q * spec.tail_tol)).powf(1.0 / q)).max(width);
    let truncation_error = 2.0 * tail_const.powf(q) * reach.powf(-q) / q;

    let mut cuts: Vec<f64> = active.iter().flat_map(|(m, _)| m.breakpoints().iter().copied()).collect();
    let mut d = 0.25 * width;
    while d < reach {
        cuts.push(hi + d);
        cuts.push(lo - d);
        d *= 2.0;
    }
    cuts.push(hi + reach);
    cuts.push(lo - reach);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let h = |x: f64| {
        let d: f64 = active.iter().map(|(m, c)| c * m.derivative_at(x).unwrap_or(0.0)).sum();
        d.abs().powf(q)
    };
    let integral = integrate(&h, &cuts, spec)?;
    let target = spec.abs_tol.max(spec.rel_tol * integral.value.abs());
    if integral.error > target {
        return Err(Error::QuadratureTolerance { estimate: integral.error, tol: target });
    }
    let total_error = integral.error + truncation_error;
    let norm = integral.value.max(0.0).powf(1.0 / q);
    let norm_error = if norm > 0.0 {
        (integral.value + total_error).powf(1.0 / q) - norm
    } else {
        total_error.powf(1.0 / q)
    };
    Ok(LqEstimate {
        norm,
        integral: integral.value,
        quadrature_error: integral.error,
        truncation_error,
        norm_error,
        domain: (lo - reach, hi + reach),
        evaluations: integral.evaluations,
    })
}

/// `‖(M̃_β f)′‖_q` with `q = 1/(1 − β)`.
pub fn derivative_lq_norm(f: &PwlFunction, p: BetaParams, grid: &GridSpec) -> Result<LqEstimate> {
    derivative_power_integral(&[(FractionalMaximal::new(f, p), 1.0)], p, grid)
}

/// `‖(M̃_β f)′ − (M̃_β g)′‖_q`.
pub fn derivative_lq_distance(f: &PwlFunction, g: &PwlFunction, p: BetaParams, grid: &GridSpec) -> Result<LqEstimate> {
    derivative_power_integral(&[(FractionalMaximal::new(f, p), 1.0), (FractionalMaximal::new(g, p), -1.0)], p, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        for deg in 0..=21 {
            let h = move |x: f64| x.powi(deg);
            let piece = kronrod(&h, -0.5, 1.5);
            let exact = (1.5f64.powi(deg + 1) - (-0.5f64).powi(deg + 1)) / (deg + 1) as f64;
            assert!((piece.value - exact).abs() < 1e-13 * exact.abs().max(1.0), "degree {deg}");
            if deg <= 13 {
                assert!(piece.error < 1e-12 * exact.abs().max(1.0), "degree {deg}");
            }
        }
    }

    #[test]
    fn adaptive_handles_jumps() {
        let h = |x: f64| if x < 0.3 { 1.0 } else { x * x };
        let spec = GridSpec { rel_tol: 1e-11, ..GridSpec::default() };
        let r = integrate(&h, &[-1.0, 2.0], &spec).unwrap();
        let exact = 1.3 + (8.0 - 0.027) / 3.0;
        assert!((r.value - exact).abs() < 1e-9, "{} vs {exact}", r.value);
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let p = BetaParams::new(0.5).unwrap();
        let r = derivative_lq_norm(&PwlFunction::zero(), p, &GridSpec::default()).unwrap();
        assert_eq!(r.norm, 0.0);
    }

    #[test]
    fn norm_is_homogeneous() {
        let p = BetaParams::new(0.5).unwrap();
        let hat = PwlFunction::hat(0.0, 1.0);
        let spec = GridSpec::default();
        let a = derivative_lq_norm(&hat, p, &spec).unwrap();
        let b = derivative_lq_norm(&hat.scale(2.5), p, &spec).unwrap();
        assert!((b.norm - 2.5 * a.norm).abs() < 1e-6 * a.norm, "{a:?} {b:?}");
        let d = derivative_lq_distance(&hat.scale(1.25), &hat, p, &spec).unwrap();
        assert!((d.norm - 0.25 * a.norm).abs() < 1e-6 * a.norm);
    }
}
