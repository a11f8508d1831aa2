//! Grid oracle for the non-centered operator and the Hölder bound check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BetaParams;
use crate::error::{Error, Result};
use crate::pwl::PwlFunction;

/// A lower bound `value` on the supremum with `sup − value ≤ modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    pub modulus: f64,
}

/// `∫_{−∞}^t |f|` summed segment by segment.
fn primitive(g: &PwlFunction, t: f64) -> f64 {
    let (xs, vs) = (g.breakpoints(), g.values());
    let mut total = 0.0;
    for i in 1..xs.len() {
        let (x0, x1) = (xs[i - 1], xs[i]);
        if t <= x0 {
            break;
        }
        let hi = t.min(x1);
        let v_hi = vs[i - 1] + (vs[i] - vs[i - 1]) * (hi - x0) / (x1 - x0);
        total += 0.5 * (hi - x0) * (vs[i - 1] + v_hi);
    }
    total
}

/// Max of `Φ` over intervals with both ends on the grid `x + hℤ`.
///
/// The search is truncated by the radius bound that any interval beating
/// the whole-support interval must satisfy.
pub fn brute_force_eval(f: &PwlFunction, p: BetaParams, x: f64, h: f64) -> Result<OracleValue> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidArgument(format!("grid step must be positive, got {h}")));
    }
    let g = f.abs();
    let Some((p0, pm)) = g.support() else {
        return Ok(OracleValue { value: 0.0, modulus: 0.0 });
    };
    let beta = p.beta;
    let factor = 2f64.powf(-beta);
    let mass = primitive(&g, pm);
    let phi = |a: f64, b: f64| factor * (b - a).powf(beta - 1.0) * (primitive(&g, b) - primitive(&g, a));
    let v0 = phi(x.min(p0), x.max(pm));
    // ((b − a)/2)^{β−1}‖f‖₁/2 ≥ v₀
    let r_max = (mass / (2.0 * v0)).powf(1.0 / (1.0 - beta));
    let l_max = 2.0 * r_max + 2.0 * h;
    let a_far = (x - l_max).max(x.min(p0) - h);
    let b_far = (x + l_max).min(x.max(pm) + h);
    let na = ((x - a_far) / h).ceil() as usize;
    let nb = ((b_far - x) / h).ceil() as usize;
    let ia: Vec<f64> = (0..=na).map(|i| primitive(&g, x - i as f64 * h)).collect();
    let ib: Vec<f64> = (0..=nb).map(|k| primitive(&g, x + k as f64 * h)).collect();
    let pow: Vec<f64> = (0..=na + nb).map(|n| (n as f64 * h).powf(beta - 1.0)).collect();
    let value = (0..=na)
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            for (k, right) in ib.iter().enumerate() {
                let n = i + k;
                if n == 0 || n as f64 * h > l_max {
                    continue;
                }
                best = best.max(pow[n] * (right - ia[i]));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
        * factor;
    // an optimal interval of length L* is covered by a grid interval of length ≤ L* + 2h,
    // and Φ* ≤ 2^{−β}L*^β‖f‖_∞ forces L* ≥ (2^β v₀/‖f‖_∞)^{1/β}
    let sup = g.linf_norm();
    let l_min = (v0 / (factor * sup)).powf(1.0 / beta);
    let upper = factor * f.lq_norm(1.0 / beta)?;
    let modulus = upper * (1.0 - (1.0 + 2.0 * h / l_min).powf(beta - 1.0));
    Ok(OracleValue { value: value.max(v0), modulus })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderCheck {
    pub passed: bool,
    pub max_ratio: f64,
    /// `2^{−β}‖f‖_{1/β}`
    pub bound: f64,
}

/// Checks `M̃_β f(x) ≤ 2^{−β}‖f‖_{1/β}` at the given points.
pub fn holder_bound_check(f: &PwlFunction, p: BetaParams, points: &[f64]) -> Result<HolderCheck> {
    let bound = 2f64.powf(-p.beta) * f.lq_norm(p.q_conj)?;
    if bound == 0.0 {
        return Ok(HolderCheck { passed: true, max_ratio: 0.0, bound });
    }
    let m = super::FractionalMaximal::new(f, p);
    let values: Vec<f64> = points.par_iter().map(|&x| m.uncentered(x)).collect();
    let passed = values.iter().all(|&v| v <= bound + 1e-9);
    let max_ratio = values.iter().fold(0.0f64, |r, &v| r.max(v / bound));
    Ok(HolderCheck { passed, max_ratio, bound })
}
