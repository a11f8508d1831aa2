use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use maxop::discrete::{
    extrema_decomposition, kurka_sums, lemma7_cases, maximal_profile, total_variation_of_max, MaxKind, UpperEnd,
};
use maxop::fractional::{derivative_lq_norm, BetaParams, FractionalMaximal, GridSpec};
use maxop::lab::{
    discrete_corpus, emit_report, generate_corpus, run_discrete_experiment_with, run_fractional_experiment_with, Corpus,
    CorpusKind, DiscreteConfig, DiscreteParams, ExperimentReport, FractionalConfig, ReportFormat,
};
use maxop::rational;
use maxop::{DiscreteSignal, Family, PwlFunction};

#[derive(Parser)]
#[command(name = "maxop", version, about = "Discrete and fractional maximal operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Profile of the discrete maximal function on a window.
    DiscMax {
        #[arg(long, default_value = "centered")]
        kind: MaxKind,
        #[arg(long)]
        input: PathBuf,
        /// `lo:hi`
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact total variation of a zero-tail signal and of its maximal function.
    DiscVar {
        #[arg(long, default_value = "centered")]
        kind: MaxKind,
        #[arg(long)]
        input: PathBuf,
    },
    /// Witness search over every qualifying (min, max) pair of a seeded corpus.
    Lemma7Scan {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Rise and fall sums of the maximal function from `k` to `u`.
    Kurka {
        #[arg(long, default_value = "centered")]
        kind: MaxKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        /// An integer or `inf`; defaults to `inf`.
        #[arg(long, default_value = "inf", allow_hyphen_values = true)]
        u: String,
        /// `lo:hi`; defaults to the support.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Fractional maximal function sampled on `a:b:n`, as CSV.
    FracMax {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        points: String,
        #[arg(long)]
        centered: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The good ball and derivative at one point.
    GoodBall {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// `L^q` norm of the derivative of the fractional maximal function.
    DerivLq {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        /// Relative tolerance on `∫|·|^q`.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Convergence experiments.
    #[command(subcommand)]
    Continuity(Continuity),
    /// Write a seeded corpus, one JSON file per element.
    Corpus {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        kind: CorpusKind,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    family: Family,
    /// Comma-separated, strictly increasing.
    #[arg(long, default_value = "1,4,16,64")]
    js: String,
    /// Bump for the additive family; defaults to the unit hat, or a unit
    /// spike just right of the support for signals.
    #[arg(long)]
    bump: Option<PathBuf>,
    /// `.json` for JSON, anything else for CSV; stdout gets CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Continuity {
    Frac {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    Disc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "centered")]
        kind: MaxKind,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_out(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    write_out(None, &serde_json::to_string_pretty(value)?)
}

fn parse_window(s: &str) -> anyhow::Result<(i64, i64)> {
    let (lo, hi) = s.split_once(':').context("window must look like lo:hi")?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn parse_points(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else { bail!("points must look like a:b:n") };
    let (a, b, n): (f64, f64, usize) = (a.trim().parse()?, b.trim().parse()?, n.trim().parse()?);
    if n == 0 {
        bail!("need at least one point");
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn parse_js(s: &str) -> anyhow::Result<Vec<u32>> {
    s.split(',').map(|t| t.trim().parse::<u32>().with_context(|| format!("bad j {t:?}"))).collect()
}

fn finish_report(report: &ExperimentReport, out: Option<&Path>) -> anyhow::Result<bool> {
    match out {
        Some(path) => emit_report(report, ReportFormat::for_path(path), path)?,
        None => write_out(None, &report.to_csv()?)?,
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} ({})", c.name, c.detail);
    }
    Ok(report.all_checks_passed())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::DiscMax { kind, input, window, out } => {
            let f: DiscreteSignal = read_json(&input)?;
            let (lo, hi) = parse_window(&window)?;
            let p = maximal_profile(&f, kind, lo, hi)?;
            write_out(out.as_deref(), &serde_json::to_string_pretty(&p)?)?;
        }
        Command::DiscVar { kind, input } => {
            let f: DiscreteSignal = read_json(&input)?;
            let var_max = total_variation_of_max(&f, kind)?;
            print_json(&json!({
                "kind": kind,
                "var_f": rational::format(&f.variation()),
                "bv_norm_f": rational::format(&f.bv_norm()),
                "var_max": rational::format(&var_max),
            }))?;
        }
        Command::Lemma7Scan { seed, count } => {
            let corpus = discrete_corpus(seed, count, &DiscreteParams::default());
            let mut configurations = 0usize;
            let mut reflected = 0usize;
            let mut failures = Vec::new();
            for (i, f) in corpus.iter().enumerate() {
                for case in lemma7_cases(f)? {
                    configurations += 1;
                    reflected += case.reflected as usize;
                    if !case.witness.holds() {
                        failures.push(json!({ "signal": i, "case": case }));
                    }
                }
            }
            let ok = failures.is_empty();
            print_json(&json!({
                "seed": seed,
                "signals": count,
                "configurations": configurations,
                "reflected": reflected,
                "failures": failures,
            }))?;
            return Ok(ok);
        }
        Command::Kurka { kind, input, k, u, window } => {
            let f: DiscreteSignal = read_json(&input)?;
            let (lo, hi) = match window {
                Some(w) => parse_window(&w)?,
                None => f.support().unwrap_or((k, k)),
            };
            let u = if u == "inf" { UpperEnd::Infinity } else { UpperEnd::Finite(u.parse()?) };
            let hi = match u {
                UpperEnd::Finite(u) => hi.max(u),
                UpperEnd::Infinity => hi,
            };
            let p = maximal_profile(&f, kind, lo.min(k), hi.max(k))?;
            let d = extrema_decomposition(&p)?;
            let sums = kurka_sums(&p, &d, k, u)?;
            print_json(&json!({ "sums": sums, "extrema": d.intervals }))?;
        }
        Command::FracMax { input, beta, points, centered, out } => {
            let f: PwlFunction = read_json(&input)?;
            let m = FractionalMaximal::new(&f, BetaParams::new(beta)?);
            let xs = parse_points(&points)?;
            let rows: Vec<[String; 5]> = xs
                .iter()
                .map(|&x| -> anyhow::Result<[String; 5]> {
                    let fmt = |v: f64| v.to_string();
                    if centered {
                        let (v, r) = m.centered_with_radius(x);
                        let (a, b) = if m.is_zero() { (String::new(), String::new()) } else { (fmt(x - r), fmt(x + r)) };
                        return Ok([fmt(x), fmt(v), a, b, String::new()]);
                    }
                    if m.is_zero() {
                        return Ok([fmt(x), fmt(0.0), String::new(), String::new(), fmt(0.0)]);
                    }
                    let ball = m.good_ball(x)?;
                    let d = m.derivative_at(x)?;
                    Ok([fmt(x), fmt(ball.value), fmt(ball.a), fmt(ball.b), fmt(d)])
                })
                .collect::<anyhow::Result<_>>()?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "value", "a", "b", "derivative"])?;
            for r in rows {
                w.write_record(&r)?;
            }
            write_out(out.as_deref(), &String::from_utf8(w.into_inner()?)?)?;
        }
        Command::GoodBall { input, beta, x } => {
            let f: PwlFunction = read_json(&input)?;
            let m = FractionalMaximal::new(&f, BetaParams::new(beta)?);
            let ball = m.good_ball(x)?;
            print_json(&json!({ "x": x, "ball": ball, "derivative": m.derivative_at(x)? }))?;
        }
        Command::DerivLq { input, beta, tol } => {
            let f: PwlFunction = read_json(&input)?;
            let grid = GridSpec { rel_tol: tol, ..GridSpec::default() };
            print_json(&derivative_lq_norm(&f, BetaParams::new(beta)?, &grid)?)?;
        }
        Command::Continuity(Continuity::Frac { common, beta, tol }) => {
            let f: PwlFunction = read_json(&common.input)?;
            let mut cfg = FractionalConfig::default();
            cfg.grid.rel_tol = tol;
            if let Some(b) = &common.bump {
                cfg.bump = read_json(b)?;
            }
            let report = run_fractional_experiment_with(&f, common.family, beta, &parse_js(&common.js)?, &cfg)?;
            return finish_report(&report, common.out.as_deref());
        }
        Command::Continuity(Continuity::Disc { common, kind }) => {
            let f: DiscreteSignal = read_json(&common.input)?;
            let mut cfg = DiscreteConfig { kind, ..DiscreteConfig::default() };
            if let Some(b) = &common.bump {
                cfg.bump = Some(read_json(b)?);
            }
            let report = run_discrete_experiment_with(&f, common.family, &parse_js(&common.js)?, &cfg)?;
            return finish_report(&report, common.out.as_deref());
        }
        Command::Corpus { seed, count, kind, out } => {
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let texts: Vec<String> = match generate_corpus(seed, count, kind)? {
                Corpus::Discrete(v) => v.iter().map(serde_json::to_string_pretty).collect::<Result<_, _>>()?,
                Corpus::Pwl(v) => v.iter().map(serde_json::to_string_pretty).collect::<Result<_, _>>()?,
            };
            for (i, t) in texts.iter().enumerate() {
                fs::write(out.join(format!("{i:04}.json")), t)?;
            }
            eprintln!("wrote {} files to {}", texts.len(), out.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("MAXOP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
