//! Eventually-constant sequences on the integers.
//!
//! A [`DiscreteSignal`] stores a finite window of exact values and the two
//! constants the sequence takes to the left and to the right of it. Every
//! norm and variation of such a sequence is a finite exact sum.

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscreteSignal {
    #[serde(with = "rational::serde_str")]
    pub tail_left: Rational,
    #[serde(with = "rational::serde_str")]
    pub tail_right: Rational,
    pub offset: i64,
    #[serde(with = "rational::serde_str::vec")]
    pub values: Vec<Rational>,
}

/// Exponent of an `ℓ^p` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

/// Result of [`DiscreteSignal::lp_norm`].
#[derive(Clone, Debug, PartialEq)]
pub enum LpNorm {
    Exact(Rational),
    /// Non-integer exponent, evaluated in `f64`.
    Approx(f64),
    /// A nonzero tail makes every finite-`p` sum diverge.
    Infinite,
}

impl DiscreteSignal {
    pub fn new(tail_left: Rational, tail_right: Rational, offset: i64, values: Vec<Rational>) -> Self {
        DiscreteSignal { tail_left, tail_right, offset, values }
    }

    /// Zero tails, `values[i]` placed at `offset + i`.
    pub fn from_values(offset: i64, values: Vec<Rational>) -> Self {
        Self::new(Rational::zero(), Rational::zero(), offset, values)
    }

    pub fn zero() -> Self {
        Self::from_values(0, Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(c.clone(), c, 0, Vec::new())
    }

    /// Unit mass at `at`.
    pub fn delta(at: i64) -> Self {
        Self::from_values(at, vec![rational::int(1)])
    }

    /// `left` for `n < at`, `right` for `n >= at`.
    pub fn step(left: Rational, right: Rational, at: i64) -> Self {
        Self::new(left, right, at, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One past the last window index.
    pub fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    pub fn eval(&self, n: i64) -> Rational {
        if n < self.offset {
            self.tail_left.clone()
        } else if n >= self.end() {
            self.tail_right.clone()
        } else {
            self.values[(n - self.offset) as usize].clone()
        }
    }

    pub fn eval_ref(&self, n: i64) -> &Rational {
        if n < self.offset {
            &self.tail_left
        } else if n >= self.end() {
            &self.tail_right
        } else {
            &self.values[(n - self.offset) as usize]
        }
    }

    pub fn has_zero_tails(&self) -> bool {
        self.tail_left.is_zero() && self.tail_right.is_zero()
    }

    /// Smallest interval outside of which `f` is zero, `None` if `f ≡ 0`.
    /// Only meaningful for zero tails.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.values.iter().position(|v| !v.is_zero())?;
        let last = self.values.iter().rposition(|v| !v.is_zero())?;
        Some((self.offset + first as i64, self.offset + last as i64))
    }

    /// Same function with window entries equal to the adjacent tail removed.
    pub fn canonical(&self) -> DiscreteSignal {
        let mut lo = 0;
        let mut hi = self.values.len();
        while lo < hi && self.values[lo] == self.tail_left {
            lo += 1;
        }
        while hi > lo && self.values[hi - 1] == self.tail_right {
            hi -= 1;
        }
        let mut offset = self.offset + lo as i64;
        if lo == hi && self.tail_left == self.tail_right {
            offset = 0;
        }
        DiscreteSignal::new(
            self.tail_left.clone(),
            self.tail_right.clone(),
            offset,
            self.values[lo..hi].to_vec(),
        )
    }

    /// `n ↦ f(n + 1) − f(n)`.
    pub fn derivative(&self) -> DiscreteSignal {
        let start = self.offset - 1;
        let values = (start..self.end()).map(|n| self.eval(n + 1) - self.eval(n)).collect();
        DiscreteSignal::from_values(start, values).canonical()
    }

    pub fn variation(&self) -> Rational {
        let mut total = Rational::zero();
        let mut prev = &self.tail_left;
        for v in self.values.iter().chain(std::iter::once(&self.tail_right)) {
            total += (v - prev).abs();
            prev = v;
        }
        total
    }

    /// `|f(−∞)| + Var(f)`.
    pub fn bv_norm(&self) -> Rational {
        self.tail_left.abs() + self.variation()
    }

    pub fn lp_norm(&self, p: Exponent) -> LpNorm {
        match p {
            Exponent::Infinity => {
                let m = self
                    .values
                    .iter()
                    .map(|v| v.abs())
                    .fold(rational::max(self.tail_left.abs(), self.tail_right.abs()), rational::max);
                LpNorm::Exact(m)
            }
            Exponent::Finite(p) => {
                if !self.has_zero_tails() {
                    return LpNorm::Infinite;
                }
                if p.fract() == 0.0 && p >= 1.0 {
                    let k = p as usize;
                    let sum: Rational = self.values.iter().map(|v| num_traits::pow(v.abs(), k)).sum();
                    if k == 1 {
                        LpNorm::Exact(sum)
                    } else {
                        LpNorm::Approx(rational::to_f64(&sum).powf(1.0 / p))
                    }
                } else {
                    let sum: f64 = self.values.iter().map(|v| rational::to_f64(&v.abs()).powf(p)).sum();
                    LpNorm::Approx(sum.powf(1.0 / p))
                }
            }
        }
    }

    /// Mean of `|f|` over the `y − x + 1` integers of `[x, y]`.
    pub fn window_average(&self, x: i64, y: i64) -> Result<Rational> {
        if x > y {
            return Err(Error::EmptyInterval { lo: x, hi: y });
        }
        let sum = self.abs_sum(x, y);
        Ok(sum / rational::int(y - x + 1))
    }

    /// `Σ_{k=x}^{y} |f(k)|`, zero for an empty range.
    pub fn abs_sum(&self, x: i64, y: i64) -> Rational {
        if x > y {
            return Rational::zero();
        }
        let mut sum = Rational::zero();
        let left_count = (self.offset.min(y + 1) - x).max(0);
        if left_count > 0 {
            sum += self.tail_left.abs() * rational::int(left_count);
        }
        let right_count = (y + 1 - self.end().max(x)).max(0);
        if right_count > 0 {
            sum += self.tail_right.abs() * rational::int(right_count);
        }
        let lo = x.max(self.offset);
        let hi = y.min(self.end() - 1);
        for n in lo..=hi {
            sum += self.values[(n - self.offset) as usize].abs();
        }
        sum
    }

    fn zip_with(&self, other: &DiscreteSignal, op: impl Fn(&Rational, &Rational) -> Rational) -> DiscreteSignal {
        let (lo, hi) = match (self.is_empty(), other.is_empty()) {
            (true, true) => (self.offset.min(other.offset), self.offset.max(other.offset)),
            (false, true) => (self.offset.min(other.offset), self.end().max(other.offset)),
            (true, false) => (self.offset.min(other.offset), other.end().max(self.offset)),
            (false, false) => (self.offset.min(other.offset), self.end().max(other.end())),
        };
        let values = (lo..hi).map(|n| op(self.eval_ref(n), other.eval_ref(n))).collect();
        DiscreteSignal::new(
            op(&self.tail_left, &other.tail_left),
            op(&self.tail_right, &other.tail_right),
            lo,
            values,
        )
        .canonical()
    }

    pub fn add(&self, other: &DiscreteSignal) -> DiscreteSignal {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DiscreteSignal) -> DiscreteSignal {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> DiscreteSignal {
        DiscreteSignal::new(
            &self.tail_left * c,
            &self.tail_right * c,
            self.offset,
            self.values.iter().map(|v| v * c).collect(),
        )
        .canonical()
    }

    pub fn abs(&self) -> DiscreteSignal {
        DiscreteSignal::new(
            self.tail_left.abs(),
            self.tail_right.abs(),
            self.offset,
            self.values.iter().map(|v| v.abs()).collect(),
        )
        .canonical()
    }

    /// `n ↦ f(−n)`.
    pub fn reflect(&self) -> DiscreteSignal {
        let mut values = self.values.clone();
        values.reverse();
        DiscreteSignal::new(self.tail_right.clone(), self.tail_left.clone(), 1 - self.end(), values)
    }

    /// Largest `|f(n)|` over `ℤ`.
    pub fn sup_abs(&self) -> Rational {
        match self.lp_norm(Exponent::Infinity) {
            LpNorm::Exact(m) => m,
            _ => unreachable!(),
        }
    }

    pub fn to_f64_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl PartialEq for DiscreteSignal {
    fn eq(&self, other: &Self) -> bool {
        let a = self.canonical();
        let b = other.canonical();
        a.tail_left == b.tail_left && a.tail_right == b.tail_right && a.offset == b.offset && a.values == b.values
    }
}

impl fmt::Display for DiscreteSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[..{} | @{}:", rational::format(&self.tail_left), self.offset)?;
        for v in &self.values {
            write!(f, " {}", rational::format(v))?;
        }
        write!(f, " | {}..]", rational::format(&self.tail_right))
    }
}
