//! Continuous, compactly supported piecewise-linear functions on `ℝ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Family;

/// Breakpoints closer than this (relative to their magnitude) are merged.
pub const BREAKPOINT_TOL: f64 = 1e-12;

/// A continuous piecewise-linear function, affine between consecutive
/// breakpoints and zero outside `[first, last]`.
///
/// The values at the first and last breakpoints are zero. The empty
/// breakpoint list is the zero function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPwl", into = "RawPwl")]
pub struct PwlFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPwl {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawPwl> for PwlFunction {
    type Error = Error;

    fn try_from(raw: RawPwl) -> Result<Self> {
        PwlFunction::new(raw.breakpoints, raw.values)
    }
}

impl From<PwlFunction> for RawPwl {
    fn from(f: PwlFunction) -> Self {
        RawPwl { breakpoints: f.breakpoints, values: f.values }
    }
}

fn same_point(x: f64, y: f64) -> bool {
    (x - y).abs() <= BREAKPOINT_TOL * x.abs().max(y.abs()).max(1.0)
}

impl PwlFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.len() == 1 {
            return Err(Error::InvalidArgument("a single breakpoint does not define a function".into()));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("breakpoints and values must be finite".into()));
        }
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut xs: Vec<f64> = Vec::with_capacity(breakpoints.len());
        let mut vs: Vec<f64> = Vec::with_capacity(values.len());
        for (&x, &v) in breakpoints.iter().zip(&values) {
            if let Some(&last) = xs.last() {
                if same_point(last, x) {
                    if (vs.last().unwrap() - v).abs() > 1e-9 * scale {
                        return Err(Error::InvalidArgument(format!("jump at breakpoint {x}")));
                    }
                    continue;
                }
                if x < last {
                    return Err(Error::InvalidArgument("breakpoints must be strictly increasing".into()));
                }
            }
            xs.push(x);
            vs.push(v);
        }
        if xs.len() == 1 {
            return Err(Error::InvalidArgument("support collapses to a point".into()));
        }
        if let (Some(first), Some(last)) = (vs.first(), vs.last()) {
            if first.abs() > BREAKPOINT_TOL * scale || last.abs() > BREAKPOINT_TOL * scale {
                return Err(Error::InvalidArgument("values at the first and last breakpoints must be 0".into()));
            }
            let n = vs.len();
            vs[0] = 0.0;
            vs[n - 1] = 0.0;
        }
        Ok(PwlFunction { breakpoints: xs, values: vs })
    }

    pub fn zero() -> Self {
        PwlFunction { breakpoints: Vec::new(), values: Vec::new() }
    }

    /// Tent of height 1 on `[center − half_width, center + half_width]`.
    pub fn hat(center: f64, half_width: f64) -> Self {
        PwlFunction {
            breakpoints: vec![center - half_width, center, center + half_width],
            values: vec![0.0, 1.0, 0.0],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `[first, last]` breakpoint; `None` for the zero function.
    pub fn support(&self) -> Option<(f64, f64)> {
        if self.is_zero() {
            return None;
        }
        Some((self.breakpoints[0], *self.breakpoints.last().unwrap()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        if bp.is_empty() || x <= bp[0] || x >= bp[bp.len() - 1] {
            return 0.0;
        }
        let i = bp.partition_point(|&p| p <= x) - 1;
        let t = (x - bp[i]) / (bp[i + 1] - bp[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// Drops interior breakpoints that lie on the line through their
    /// neighbours and zero runs at either end.
    pub fn canonical(&self) -> PwlFunction {
        let scale = self.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let n = self.breakpoints.len();
        if self.is_zero() {
            return PwlFunction::zero();
        }
        let first = (0..n).find(|&i| self.values[i + 1] != 0.0).unwrap();
        let last = (0..n).rev().find(|&i| self.values[i - 1] != 0.0).unwrap();
        let mut xs = vec![self.breakpoints[first]];
        let mut vs = vec![0.0];
        for i in first + 1..last {
            let (x0, v0) = (*xs.last().unwrap(), *vs.last().unwrap());
            let (x1, v1) = (self.breakpoints[i + 1], self.values[i + 1]);
            let (x, v) = (self.breakpoints[i], self.values[i]);
            let interp = v0 + (x - x0) / (x1 - x0) * (v1 - v0);
            if (interp - v).abs() > BREAKPOINT_TOL * scale {
                xs.push(x);
                vs.push(v);
            }
        }
        xs.push(self.breakpoints[last]);
        vs.push(0.0);
        PwlFunction { breakpoints: xs, values: vs }
    }

    /// `|f|`, with every zero crossing inserted as a breakpoint.
    pub fn abs(&self) -> PwlFunction {
        let mut xs = Vec::with_capacity(self.breakpoints.len());
        let mut vs = Vec::with_capacity(self.values.len());
        for i in 0..self.breakpoints.len() {
            let (x, v) = (self.breakpoints[i], self.values[i]);
            if i > 0 {
                let (px, pv) = (self.breakpoints[i - 1], self.values[i - 1]);
                if pv * v < 0.0 {
                    let z = px + (x - px) * pv / (pv - v);
                    if z > px && z < x {
                        xs.push(z);
                        vs.push(0.0);
                    }
                }
            }
            xs.push(x);
            vs.push(v.abs());
        }
        PwlFunction { breakpoints: xs, values: vs }
    }

    fn merged_breakpoints(&self, other: &PwlFunction) -> Vec<f64> {
        let mut xs: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| same_point(*a, *b));
        xs
    }

    pub fn add(&self, other: &PwlFunction) -> PwlFunction {
        let xs = self.merged_breakpoints(other);
        let vs = xs.iter().map(|&x| self.eval(x) + other.eval(x)).collect();
        PwlFunction { breakpoints: xs, values: vs }.canonical()
    }

    pub fn sub(&self, other: &PwlFunction) -> PwlFunction {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> PwlFunction {
        if c == 0.0 {
            return PwlFunction::zero();
        }
        PwlFunction { breakpoints: self.breakpoints.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    /// `f(· − h)`.
    pub fn translate(&self, h: f64) -> PwlFunction {
        PwlFunction { breakpoints: self.breakpoints.iter().map(|x| x + h).collect(), values: self.values.clone() }
    }

    pub fn l1_norm(&self) -> f64 {
        let g = self.abs();
        g.breakpoints.windows(2).zip(g.values.windows(2)).map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1])).sum()
    }

    /// `‖f′‖₁`.
    pub fn deriv_l1_norm(&self) -> f64 {
        self.values.windows(2).map(|v| (v[1] - v[0]).abs()).sum()
    }

    pub fn w11_norm(&self) -> f64 {
        self.l1_norm() + self.deriv_l1_norm()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖f‖_p` for `p ≥ 1`, integrating `|affine|^p` in closed form.
    pub fn lq_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!("exponent must be at least 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.linf_norm());
        }
        let g = self.abs();
        let mut total = 0.0;
        for (x, v) in g.breakpoints.windows(2).zip(g.values.windows(2)) {
            total += (x[1] - x[0]) * mean_power(v[0], v[1], p);
        }
        Ok(total.powf(1.0 / p))
    }

    /// `‖|f|′ − |g|′‖₁`.
    pub fn abs_derivative_distance(&self, other: &PwlFunction) -> f64 {
        let (fa, ga) = (self.abs(), other.abs());
        let xs = fa.merged_breakpoints(&ga);
        let d: Vec<f64> = xs.iter().map(|&x| fa.eval(x) - ga.eval(x)).collect();
        d.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    /// The `j`-th member of a perturbation family; `Additive` uses the unit hat.
    pub fn sample_perturbation(&self, family: Family, j: u32) -> Result<PwlFunction> {
        self.perturb_with(family, j, &PwlFunction::hat(0.0, 1.0))
    }

    pub fn perturb_with(&self, family: Family, j: u32, bump: &PwlFunction) -> Result<PwlFunction> {
        if j == 0 {
            return Err(Error::InvalidArgument("j must be at least 1".into()));
        }
        let h = 1.0 / j as f64;
        Ok(match family {
            Family::Scaling => self.scale(1.0 + h),
            Family::Additive => self.add(&bump.scale(h)),
            Family::Translate => self.translate(h),
        })
    }
}

/// `(1/(b−a))∫_a^b |affine|^p` for an affine function from `u ≥ 0` to `v ≥ 0`.
fn mean_power(u: f64, v: f64, p: f64) -> f64 {
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    if hi == 0.0 {
        return 0.0;
    }
    let eps = 1.0 - lo / hi;
    // (1 − (1 − ε)^{p+1}) / ((p + 1)ε)
    let factor = if eps < 1e-6 {
        1.0 - p * eps / 2.0 + p * (p - 1.0) * eps * eps / 6.0
    } else {
        (1.0 - (lo / hi).powf(p + 1.0)) / ((p + 1.0) * eps)
    };
    hi.powf(p) * factor
}
