//! Convergence experiments `f_j → f` for both operators.

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Check, ExperimentReport, Metadata, Metric, ReportKind, ReportRow};
use crate::discrete::{compare_maximal, extrema_decomposition, kurka_sums, MaxKind, MaximalProfile, UpperEnd};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::fractional::{derivative_lq_distance, derivative_lq_norm, BetaParams, FractionalMaximal, GridSpec};
use crate::pwl::PwlFunction;
use crate::rational::{self, Rational};
use crate::signal::DiscreteSignal;

fn check_js(js: &[u32]) -> Result<()> {
    if js.is_empty() || js[0] == 0 || js.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("j list must be nonempty, positive and strictly increasing".into()));
    }
    Ok(())
}

fn strictly_decreasing(name: &str, values: &[f64]) -> Check {
    let passed = values.windows(2).all(|w| w[1] < w[0]) || values.iter().all(|&v| v == 0.0);
    Check { name: name.into(), passed, detail: format!("{values:?}") }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteConfig {
    pub kind: MaxKind,
    /// The `g` of the additive family; [`default_bump`] when unset.
    pub bump: Option<DiscreteSignal>,
}

impl Default for DiscreteConfig {
    fn default() -> Self {
        DiscreteConfig { kind: MaxKind::Centered, bump: None }
    }
}

/// A unit spike two steps right of the support of `f`.
///
/// A bump overlapping the support can cancel `f` at some `j` (for example
/// `f(n) = −1/4` and `g = δₙ` give `|f_2| = |f|`), so the distances would not
/// be monotone in `j` for reasons that have nothing to do with the operator.
pub fn default_bump(f: &DiscreteSignal) -> DiscreteSignal {
    DiscreteSignal::delta(f.support().map_or(0, |(_, e)| e + 2))
}

/// The `j`-th member of a discrete family; translation is not defined on `ℤ`.
pub fn discrete_perturbation(f: &DiscreteSignal, family: Family, j: u32, bump: &DiscreteSignal) -> Result<DiscreteSignal> {
    if j == 0 {
        return Err(Error::InvalidArgument("j must be at least 1".into()));
    }
    let h = rational::frac(1, j as i64);
    match family {
        Family::Scaling => Ok(f.scale(&(rational::int(1) + h))),
        Family::Additive => Ok(f.add(&bump.scale(&h))),
        Family::Translate => Err(Error::InvalidArgument("the translate family needs a continuous argument".into())),
    }
}

/// Rise and fall identities on `[lo, hi]` and on `[lo, ∞)`.
fn kurka_identities(p: &MaximalProfile) -> Result<(Rational, Rational, bool)> {
    let d = extrema_decomposition(p)?;
    let (lo, hi) = p.window();
    let at = |n: i64| p.value(n).unwrap().clone();
    let finite = kurka_sums(p, &d, lo, UpperEnd::Finite(hi))?;
    let ok_finite = &finite.s1 + &finite.s2 == p.variation_between(lo, hi)
        && (&finite.s1 - &finite.s2).abs() == (at(lo) - at(hi)).abs();
    let tail = kurka_sums(p, &d, lo, UpperEnd::Infinity)?;
    let tail_var = p.variation_between(lo, hi) + (at(hi) - &p.right_limit).abs();
    let ok_tail = &tail.s1 + &tail.s2 == tail_var && (&tail.s1 - &tail.s2).abs() == (at(lo) - &p.right_limit).abs();
    Ok((finite.s1, finite.s2, ok_finite && ok_tail))
}

pub fn run_discrete_experiment(f: &DiscreteSignal, family: Family, js: &[u32]) -> Result<ExperimentReport> {
    run_discrete_experiment_with(f, family, js, &DiscreteConfig::default())
}

pub fn run_discrete_experiment_with(
    f: &DiscreteSignal,
    family: Family,
    js: &[u32],
    cfg: &DiscreteConfig,
) -> Result<ExperimentReport> {
    check_js(js)?;
    let bump = cfg.bump.clone().unwrap_or_else(|| default_bump(f));
    if !f.has_zero_tails() || !bump.has_zero_tails() {
        return Err(Error::NonzeroTail);
    }
    let rows: Vec<(ReportRow, bool, bool)> = js
        .par_iter()
        .map(|&j| {
            let fj = discrete_perturbation(f, family, j, &bump)?;
            let input = fj.sub(f).bv_norm();
            let cmp = compare_maximal(f, &fj, cfg.kind)?;
            let (s1, s2, kurka_ok) = kurka_identities(&cmp.profile_g)?;
            let sup_ok = cmp.sup_diff <= input;
            let gap = (&cmp.var_g - &cmp.var_f).abs();
            let row = ReportRow {
                j,
                input_dist: Metric::Exact(input),
                out_dist_primary: Metric::Exact(cmp.var_diff),
                out_dist_sup: Metric::Exact(cmp.sup_diff),
                extra: vec![
                    Metric::Exact(cmp.deriv_sup_diff),
                    Metric::Exact(cmp.var_g),
                    Metric::Exact(cmp.var_f),
                    Metric::Exact(gap),
                    Metric::Exact(s1),
                    Metric::Exact(s2),
                ],
            };
            Ok((row, sup_ok, kurka_ok))
        })
        .collect::<Result<_>>()?;
    let inputs: Vec<f64> = rows.iter().map(|r| r.0.input_dist.to_f64()).collect();
    let checks = vec![
        Check {
            name: "sup_bound".into(),
            passed: rows.iter().all(|r| r.1),
            detail: "‖Mf_j − Mf‖_∞ ≤ ‖f_j − f‖_BV on every row".into(),
        },
        Check {
            name: "kurka_identities".into(),
            passed: rows.iter().all(|r| r.2),
            detail: "S₁ + S₂ equals the variation and |S₁ − S₂| the endpoint gap, on [lo, hi] and [lo, ∞)".into(),
        },
        strictly_decreasing("input_decreasing", &inputs),
    ];
    Ok(ExperimentReport {
        kind: ReportKind::Discrete,
        family,
        metadata: Metadata { operator: Some(cfg.kind), ..Metadata::default() },
        extra_columns: ["deriv_sup", "var_mf_j", "var_mf", "var_gap", "kurka_s1", "kurka_s2"].map(String::from).to_vec(),
        rows: rows.into_iter().map(|r| r.0).collect(),
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalConfig {
    pub grid: GridSpec,
    /// Uniform sample count for the sup distance, on top of all breakpoints.
    pub sup_samples: usize,
    /// The `g` of the additive family.
    pub bump: PwlFunction,
}

impl Default for FractionalConfig {
    fn default() -> Self {
        FractionalConfig { grid: GridSpec::default(), sup_samples: 801, bump: PwlFunction::hat(0.0, 1.0) }
    }
}

fn sample_points(fs: &[&PwlFunction], n: usize) -> Vec<f64> {
    let hull = fs
        .iter()
        .filter_map(|f| f.support())
        .fold(None, |acc: Option<(f64, f64)>, (lo, hi)| Some(acc.map_or((lo, hi), |(a, b)| (a.min(lo), b.max(hi)))));
    let Some((lo, hi)) = hull else { return vec![0.0] };
    let pad = (hi - lo).max(1.0);
    let (a, b) = (lo - pad, hi + pad);
    let mut pts: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n.max(2) - 1) as f64).collect();
    pts.extend(fs.iter().flat_map(|f| f.breakpoints().iter().copied()));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

pub fn run_fractional_experiment(
    f: &PwlFunction,
    family: Family,
    beta: f64,
    js: &[u32],
    grid: &GridSpec,
) -> Result<ExperimentReport> {
    let cfg = FractionalConfig { grid: *grid, ..FractionalConfig::default() };
    run_fractional_experiment_with(f, family, beta, js, &cfg)
}

pub fn run_fractional_experiment_with(
    f: &PwlFunction,
    family: Family,
    beta: f64,
    js: &[u32],
    cfg: &FractionalConfig,
) -> Result<ExperimentReport> {
    check_js(js)?;
    let p = BetaParams::new(beta)?;
    let norm_f = derivative_lq_norm(f, p, &cfg.grid)?;
    let m = FractionalMaximal::new(f, p);
    let factor = 2f64.powf(-beta);
    let rows: Vec<(ReportRow, bool, bool)> = js
        .par_iter()
        .map(|&j| {
            let fj = f.perturb_with(family, j, &cfg.bump)?;
            let diff = fj.sub(f);
            let dist = derivative_lq_distance(&fj, f, p, &cfg.grid)?;
            let norm_j = derivative_lq_norm(&fj, p, &cfg.grid)?;
            let mj = FractionalMaximal::new(&fj, p);
            let sup = sample_points(&[f, &fj], cfg.sup_samples)
                .par_iter()
                .map(|&x| (mj.uncentered(x) - m.uncentered(x)).abs())
                .reduce(|| 0.0, f64::max);
            let holder = factor * diff.lq_norm(p.q_conj)?;
            let interp = factor * diff.linf_norm().powf(1.0 / p.q) * diff.l1_norm().powf(1.0 / p.q_conj);
            let row = ReportRow {
                j,
                input_dist: Metric::Approx(diff.w11_norm()),
                out_dist_primary: Metric::Approx(dist.norm),
                out_dist_sup: Metric::Approx(sup),
                extra: vec![
                    Metric::Approx(norm_j.norm),
                    Metric::Approx(norm_f.norm),
                    Metric::Approx(holder),
                    Metric::Approx(interp),
                    Metric::Approx(fj.abs_derivative_distance(f)),
                    Metric::Approx(dist.norm_error),
                ],
            };
            Ok((row, sup <= holder + 1e-6, holder <= interp + 1e-6))
        })
        .collect::<Result<_>>()?;
    let inputs: Vec<f64> = rows.iter().map(|r| r.0.input_dist.to_f64()).collect();
    let checks = vec![
        Check {
            name: "holder_chain".into(),
            passed: rows.iter().all(|r| r.1),
            detail: "sampled ‖M̃f_j − M̃f‖_∞ ≤ 2^{−β}‖f_j − f‖_{1/β} + 1e−6 on every row".into(),
        },
        Check {
            name: "interpolation_chain".into(),
            passed: rows.iter().all(|r| r.2),
            detail: "2^{−β}‖f_j − f‖_{1/β} ≤ 2^{−β}‖f_j − f‖_∞^{1−β}‖f_j − f‖₁^β + 1e−6 on every row".into(),
        },
        strictly_decreasing("input_decreasing", &inputs),
    ];
    Ok(ExperimentReport {
        kind: ReportKind::Fractional,
        family,
        metadata: Metadata {
            beta: Some(beta),
            grid: Some(cfg.grid),
            sup_samples: Some(cfg.sup_samples),
            ..Metadata::default()
        },
        extra_columns: ["norm_mf_j", "norm_mf", "holder_rhs", "interp_rhs", "abs_deriv_dist", "quad_err"]
            .map(String::from)
            .to_vec(),
        rows: rows.into_iter().map(|r| r.0).collect(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn delta_with_additive_delta3() {
        let js = [1, 2, 4, 8, 16, 32, 64, 128, 256];
        let cfg = DiscreteConfig { bump: Some(DiscreteSignal::delta(3)), ..DiscreteConfig::default() };
        let r = run_discrete_experiment_with(&DiscreteSignal::delta(0), Family::Additive, &js, &cfg).unwrap();
        assert!(r.all_checks_passed(), "{:?}", r.checks);
        let primary: Vec<&Rational> = r.rows.iter().map(|row| row.out_dist_primary.as_exact().unwrap()).collect();
        assert!(primary.windows(2).all(|w| w[1] <= w[0]));
        assert!(primary[8] * int(20) <= *primary[0]);
        assert_eq!(r.rows[2].input_dist, Metric::Exact(frac(1, 2)));
    }

    #[test]
    fn discrete_scaling_is_homogeneous() {
        let f = DiscreteSignal::from_values(-1, vec![int(1), frac(-3, 2), int(0), frac(1, 4)]);
        let r = run_discrete_experiment(&f, Family::Scaling, &[1, 3]).unwrap();
        let var_j = r.column("var_mf_j").unwrap();
        let var_f = r.column("var_mf").unwrap();
        assert_eq!(var_j[0].as_exact().unwrap(), &(var_f[0].as_exact().unwrap() * int(2)));
        assert_eq!(var_j[1].as_exact().unwrap(), &(var_f[1].as_exact().unwrap() * frac(4, 3)));
        assert!(run_discrete_experiment(&f, Family::Translate, &[1]).is_err());
    }

    #[test]
    fn zero_reports() {
        let r = run_discrete_experiment(&DiscreteSignal::zero(), Family::Scaling, &[1, 2]).unwrap();
        assert!(r.rows.iter().all(|row| row.out_dist_primary.to_f64() == 0.0 && row.input_dist.to_f64() == 0.0));
        let r = run_fractional_experiment(&PwlFunction::zero(), Family::Translate, 0.5, &[1, 4], &GridSpec::default()).unwrap();
        assert!(r.rows.iter().all(|row| row.out_dist_primary.to_f64() == 0.0 && row.out_dist_sup.to_f64() == 0.0));
        assert!(r.all_checks_passed());
    }

    #[test]
    fn fractional_scaling_is_homogeneous() {
        let hat = PwlFunction::hat(0.0, 1.0);
        let r = run_fractional_experiment(&hat, Family::Scaling, 0.5, &[1, 4, 16], &GridSpec::default()).unwrap();
        assert!(r.all_checks_passed(), "{:?}", r.checks);
        for row in &r.rows {
            let norm = row.extra[1].to_f64();
            let expected = norm / row.j as f64;
            assert!((row.out_dist_primary.to_f64() - expected).abs() < 1e-5 * norm, "{row:?}");
        }
    }

    #[test]
    fn hat_translates_strictly_decrease() {
        let hat = PwlFunction::hat(0.0, 1.0);
        let r = run_fractional_experiment(&hat, Family::Translate, 0.5, &[1, 4, 16, 64], &GridSpec::default()).unwrap();
        assert!(r.all_checks_passed(), "{:?}", r.checks);
        let d: Vec<f64> = r.rows.iter().map(|row| row.out_dist_primary.to_f64()).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }
}
