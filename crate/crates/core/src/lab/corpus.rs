//! Seeded corpora of discrete signals and piecewise-linear functions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pwl::PwlFunction;
use crate::rational::{frac, Rational};
use crate::signal::DiscreteSignal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    #[serde(alias = "disc")]
    Discrete,
    Pwl,
}

impl FromStr for CorpusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disc" | "discrete" => Ok(CorpusKind::Discrete),
            "pwl" => Ok(CorpusKind::Pwl),
            _ => Err(Error::InvalidArgument(format!("unknown corpus kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteParams {
    pub max_support: usize,
    pub max_numerator: i64,
    pub denominators: Vec<i64>,
    /// Offsets are drawn from `[−offset_range, offset_range − len]`.
    pub offset_range: i64,
}

impl Default for DiscreteParams {
    fn default() -> Self {
        DiscreteParams { max_support: 64, max_numerator: 8, denominators: vec![1, 2, 4, 8], offset_range: 32 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PwlParams {
    pub max_breakpoints: usize,
    /// Breakpoints lie in `[−half_width, half_width]`.
    pub half_width: f64,
    pub max_value: f64,
    /// Smallest gap between consecutive breakpoints.
    pub min_gap: f64,
}

impl Default for PwlParams {
    fn default() -> Self {
        PwlParams { max_breakpoints: 16, half_width: 4.0, max_value: 2.0, min_gap: 1e-2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "items", rename_all = "lowercase")]
pub enum Corpus {
    Discrete(Vec<DiscreteSignal>),
    Pwl(Vec<PwlFunction>),
}

impl Corpus {
    pub fn len(&self) -> usize {
        match self {
            Corpus::Discrete(v) => v.len(),
            Corpus::Pwl(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Zero-tail signals with support length in `1..=max_support`.
pub fn discrete_corpus(seed: u64, count: usize, params: &DiscreteParams) -> Vec<DiscreteSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=params.max_support);
            let hi = (params.offset_range - len as i64).max(-params.offset_range);
            let offset = rng.gen_range(-params.offset_range..=hi);
            let values: Vec<Rational> = (0..len)
                .map(|_| {
                    let p = rng.gen_range(-params.max_numerator..=params.max_numerator);
                    let q = *params.denominators.choose(&mut rng).expect("at least one denominator");
                    frac(p, q)
                })
                .collect();
            DiscreteSignal::from_values(offset, values)
        })
        .collect()
}

/// Functions with `3..=max_breakpoints` breakpoints and zero endpoints.
pub fn pwl_corpus(seed: u64, count: usize, params: &PwlParams) -> Vec<PwlFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(3..=params.max_breakpoints.max(3));
        let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-params.half_width..=params.half_width)).collect();
        xs.sort_by(f64::total_cmp);
        if xs.windows(2).any(|w| w[1] - w[0] < params.min_gap) {
            continue;
        }
        let vs: Vec<f64> = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.0 } else { rng.gen_range(-params.max_value..=params.max_value) })
            .collect();
        out.push(PwlFunction::new(xs, vs).expect("generated breakpoints are valid"));
    }
    out
}

pub fn generate_corpus(seed: u64, count: usize, kind: CorpusKind) -> Result<Corpus> {
    if count == 0 {
        return Err(Error::InvalidArgument("corpus count must be at least 1".into()));
    }
    Ok(match kind {
        CorpusKind::Discrete => Corpus::Discrete(discrete_corpus(seed, count, &DiscreteParams::default())),
        CorpusKind::Pwl => Corpus::Pwl(pwl_corpus(seed, count, &PwlParams::default())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn deterministic_and_seed_dependent() {
        let a = generate_corpus(1, 1, CorpusKind::Discrete).unwrap();
        assert_eq!(a, generate_corpus(1, 1, CorpusKind::Discrete).unwrap());
        assert_ne!(a, generate_corpus(2, 1, CorpusKind::Discrete).unwrap());
        let p = generate_corpus(1, 3, CorpusKind::Pwl).unwrap();
        assert_eq!(p, generate_corpus(1, 3, CorpusKind::Pwl).unwrap());
        assert_ne!(p, generate_corpus(2, 3, CorpusKind::Pwl).unwrap());
        assert!(generate_corpus(1, 0, CorpusKind::Pwl).is_err());
    }

    #[test]
    fn representation_invariants() {
        for f in discrete_corpus(7, 200, &DiscreteParams::default()) {
            assert!(f.has_zero_tails());
            assert!((1..=64).contains(&f.len()));
            assert!(f.offset >= -32 && f.end() <= 32);
            for v in &f.values {
                assert!(v.numer().magnitude() <= &num_bigint::BigUint::from(8u32));
                assert!([1, 2, 4, 8].iter().any(|&q| (v * int(q)).is_integer()));
            }
        }
        for f in pwl_corpus(7, 200, &PwlParams::default()) {
            let xs = f.breakpoints();
            assert!(xs.len() <= 16);
            assert!(xs.iter().all(|x| x.abs() <= 4.0));
            assert_eq!((f.values()[0], *f.values().last().unwrap()), (0.0, 0.0));
        }
    }
}
