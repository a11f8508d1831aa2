//! Integer search kernel behind the discrete maximal operators.
//!
//! `|f|` is rescaled by the lcm of its denominators so every window sum is
//! an integer; averages are compared by cross-multiplication. The kernel is
//! generic over the integer type so that small inputs run on `i128` and
//! everything else falls back to `BigInt` with identical logic.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::Reach;
use crate::rational::Rational;
use crate::signal::DiscreteSignal;

pub(crate) trait Int:
    Clone + Ord + Debug + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + From<i64> + Send + Sync
{
    fn to_big(&self) -> BigInt;
}

impl Int for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Int for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// A candidate average `sum / len` (in scaled units).
#[derive(Clone, Debug)]
struct Avg<T> {
    sum: T,
    len: i64,
}

impl<T: Int> Avg<T> {
    fn cmp(&self, other: &Avg<T>) -> Ordering {
        (self.sum.clone() * T::from(other.len)).cmp(&(other.sum.clone() * T::from(self.len)))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Kernel<T> {
    offset: i64,
    /// prefix[i] = Σ_{k<i} |values[k]| (scaled)
    prefix: Vec<T>,
    left: T,
    right: T,
}

impl<T: Int> Kernel<T> {
    fn build(signal: &DiscreteSignal, scale: &BigInt, conv: impl Fn(BigInt) -> T) -> Self {
        let scaled = |r: &Rational| -> T {
            let v = r.abs() * Rational::from_integer(scale.clone());
            debug_assert!(v.is_integer());
            conv(v.to_integer())
        };
        let mut prefix = Vec::with_capacity(signal.values.len() + 1);
        let mut acc = T::zero();
        prefix.push(acc.clone());
        for v in &signal.values {
            acc = acc + scaled(v);
            prefix.push(acc.clone());
        }
        Kernel { offset: signal.offset, prefix, left: scaled(&signal.tail_left), right: scaled(&signal.tail_right) }
    }

    fn len(&self) -> i64 {
        self.prefix.len() as i64 - 1
    }

    /// Last window index; `offset − 1` for an empty window.
    fn last(&self) -> i64 {
        self.offset + self.len() - 1
    }

    /// Σ_{k=x}^{y} |f(k)| in scaled units, `x ≤ y`.
    fn sum(&self, x: i64, y: i64) -> T {
        let end = self.offset + self.len();
        let mut total = T::zero();
        let left_count = (self.offset.min(y + 1) - x).max(0);
        if left_count > 0 {
            total = total + self.left.clone() * T::from(left_count);
        }
        let right_count = (y + 1 - end.max(x)).max(0);
        if right_count > 0 {
            total = total + self.right.clone() * T::from(right_count);
        }
        let lo = x.max(self.offset);
        let hi = y.min(end - 1);
        if lo <= hi {
            let a = (lo - self.offset) as usize;
            let b = (hi - self.offset + 1) as usize;
            total = total + self.prefix[b].clone() - self.prefix[a].clone();
        }
        total
    }

    /// Sup over radii `r ≥ 0` of the centered average at `n`.
    fn centered(&self, n: i64) -> (T, i64, Reach) {
        let o = self.offset;
        let e = self.last();
        // radius at which both sides reach into the tails
        let r_tail = (n - o + 1).max(e + 1 - n).max(0);
        // radii below the distance to the window only see a single tail value
        let dist = if n < o {
            o - n
        } else if n > e {
            n - e
        } else {
            0
        };
        let mut best = Avg { sum: self.sum(n, n), len: 1 };
        let mut best_r = 0;
        for r in dist.max(1)..=r_tail {
            let cand = Avg { sum: self.sum(n - r, n + r), len: 2 * r + 1 };
            if cand.cmp(&best) == Ordering::Greater {
                best = cand;
                best_r = r;
            }
        }
        // beyond r_tail the average is (α + βr)/(2r + 1); its sup is β/2 in the limit
        let beta = self.left.clone() + self.right.clone();
        let limit = Avg { sum: beta, len: 2 };
        if limit.cmp(&best) == Ordering::Greater {
            return (limit.sum, limit.len, Reach::AtInfinity);
        }
        let r = best_r as u64;
        (best.sum, best.len, Reach::Finite { left: r, right: r })
    }

    /// Sup over windows `[n − r, n + s]` of the average at `n`.
    fn uncentered(&self, n: i64) -> (T, i64, Reach) {
        let o = self.offset;
        let e = self.last();
        let r_tail = (n - o + 1).max(0);
        let s_tail = (e + 1 - n).max(0);
        let r_min = if n > e { n - e } else { 1 };
        let s_min = if n < o { o - n } else { 1 };
        let rs = std::iter::once(0).chain(r_min..=r_tail);
        let mut best = Avg { sum: self.sum(n, n), len: 1 };
        let (mut best_r, mut best_s) = (0i64, 0i64);
        for r in rs {
            let ss = std::iter::once(0).chain(s_min..=s_tail);
            for s in ss {
                if r == 0 && s == 0 {
                    continue;
                }
                let cand = Avg { sum: self.sum(n - r, n + s), len: r + s + 1 };
                let better = match cand.cmp(&best) {
                    Ordering::Greater => true,
                    Ordering::Equal => (r + s, r) < (best_r + best_s, best_r),
                    Ordering::Less => false,
                };
                if better {
                    best = cand;
                    best_r = r;
                    best_s = s;
                }
            }
        }
        let tail = self.left.clone().max(self.right.clone());
        let limit = Avg { sum: tail, len: 1 };
        if limit.cmp(&best) == Ordering::Greater {
            return (limit.sum, limit.len, Reach::AtInfinity);
        }
        (best.sum, best.len, Reach::Finite { left: best_r as u64, right: best_s as u64 })
    }
}

/// Kernel specialised to the smallest integer type that cannot overflow
/// for the queried range of points.
#[derive(Clone, Debug)]
pub(crate) enum Engine {
    Small(Kernel<i128>, BigInt),
    Big(Kernel<BigInt>, BigInt),
}

impl Engine {
    /// `span` bounds `|n|` for every point that will be queried.
    pub(crate) fn new(signal: &DiscreteSignal, span: i64) -> Engine {
        let mut scale = BigInt::from(1);
        for r in signal.values.iter().chain([&signal.tail_left, &signal.tail_right]) {
            scale = scale.lcm(r.denom());
        }
        let mut max_abs = BigInt::zero();
        let mut total = BigInt::zero();
        for r in signal.values.iter().chain([&signal.tail_left, &signal.tail_right]) {
            let v = (r.abs() * Rational::from_integer(scale.clone())).to_integer();
            total += &v;
            if v > max_abs {
                max_abs = v;
            }
        }
        // every window sum is at most total + max_abs · width, and is multiplied by a width
        let width = 2 * (span.unsigned_abs() as i128 + signal.offset.unsigned_abs() as i128 + signal.len() as i128 + 2) + 1;
        let width = BigInt::from(width);
        let bound = (&total + &max_abs * &width) * &width;
        let fits = bound.bits() < 120;
        if fits {
            let k = Kernel::build(signal, &scale, |b| b.to_i128().expect("checked bound"));
            Engine::Small(k, scale)
        } else {
            Engine::Big(Kernel::build(signal, &scale, |b| b), scale)
        }
    }

    fn finish<T: Int>(sum: T, len: i64, reach: Reach, scale: &BigInt) -> (Rational, Reach) {
        let value = Rational::new(sum.to_big(), BigInt::from(len) * scale);
        (value, reach)
    }

    pub(crate) fn centered(&self, n: i64) -> (Rational, Reach) {
        match self {
            Engine::Small(k, scale) => {
                let (s, l, r) = k.centered(n);
                Self::finish(s, l, r, scale)
            }
            Engine::Big(k, scale) => {
                let (s, l, r) = k.centered(n);
                Self::finish(s, l, r, scale)
            }
        }
    }

    pub(crate) fn uncentered(&self, n: i64) -> (Rational, Reach) {
        match self {
            Engine::Small(k, scale) => {
                let (s, l, r) = k.uncentered(n);
                Self::finish(s, l, r, scale)
            }
            Engine::Big(k, scale) => {
                let (s, l, r) = k.uncentered(n);
                Self::finish(s, l, r, scale)
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn is_small(&self) -> bool {
        matches!(self, Engine::Small(..))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn huge_values_fall_back_to_bigint() {
        let big = Rational::new(BigInt::from(10).pow(40), BigInt::from(3));
        let f = DiscreteSignal::from_values(0, vec![big.clone(), int(1)]);
        let engine = Engine::new(&f, 10);
        assert!(!engine.is_small());
        assert_eq!(engine.centered(0).0, big);
        let small = Engine::new(&DiscreteSignal::from_values(0, vec![frac(1, 3)]), 10);
        assert!(small.is_small());
    }

    #[test]
    fn both_paths_agree() {
        let f = DiscreteSignal::new(frac(1, 2), frac(1, 3), -2, vec![int(2), frac(-5, 4), int(0), int(3)]);
        let scale = BigInt::from(12);
        let small = Kernel::<i128>::build(&f, &scale, |b| b.to_i128().unwrap());
        let big = Kernel::<BigInt>::build(&f, &scale, |b| b);
        for n in -12..12 {
            let (a, la, ra) = small.centered(n);
            let (b, lb, rb) = big.centered(n);
            assert_eq!((BigInt::from(a), la, ra), (b, lb, rb));
            let (a, la, ra) = small.uncentered(n);
            let (b, lb, rb) = big.uncentered(n);
            assert_eq!((BigInt::from(a), la, ra), (b, lb, rb));
        }
    }
}
