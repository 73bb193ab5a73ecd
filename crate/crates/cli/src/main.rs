mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use reccalc::optstop::{self, t_f, t_p};
use reccalc::recordlaw::{self, EuKind};
use reccalc::simulate::{self, MonteCarlo, Problem};
use reccalc::verify::{self, Suite, VerifyConfig};

use crate::report::{Field, Format, Report, Row};

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(
    name = "reccalc",
    version,
    about = "Best-choice problems on the planar Poisson process"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Master seed of randomized commands
    #[arg(long, global = true, env = "RECCALC_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker threads for Monte Carlo (0 = all cores, 1 = sequential)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal thresholds and values
    Values,
    /// Record-count probability p_j(t), q_j(t), or under threshold s
    Prob {
        #[arg(value_enum)]
        kind: CountKind,
        /// Area (`inf` allowed with --s)
        #[arg(long, value_parser = parse_area)]
        t: f64,
        /// Threshold; omit for the plain count law
        #[arg(long, value_parser = parse_positive)]
        s: Option<f64>,
        /// Number of records
        #[arg(long)]
        j: usize,
    },
    /// Monte Carlo estimate of a threshold policy
    Simulate {
        #[arg(value_enum)]
        problem: ProblemArg,
        /// Area (`inf` for FI and VC)
        #[arg(long, value_parser = parse_area)]
        t: f64,
        /// Threshold, or `optimal`
        #[arg(long, value_parser = parse_threshold, default_value = "optimal")]
        s: Threshold,
        /// Number of trials
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Samples of the k-th reversed box area
    Dist {
        #[arg(value_enum)]
        kind: EuArg,
        /// Index from the top, at least 1
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        /// Number of samples
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Density of the winning stop position on [0, 1] at t = ∞
    Winrate {
        /// Threshold, or `optimal`
        #[arg(long, value_parser = parse_threshold, default_value = "optimal")]
        s: Threshold,
        /// Grid points including both ends
        #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
        points: u64,
    },
    /// CDF of the stop coordinate on [0, 1)
    Stoptime {
        /// Area
        #[arg(long, value_parser = parse_area, default_value = "inf")]
        t: f64,
        /// Threshold, or `optimal`
        #[arg(long, value_parser = parse_threshold, default_value = "optimal")]
        s: Threshold,
        /// Grid points starting at 0
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        points: u64,
    },
    /// Run the named self-checks
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Trials per Monte Carlo check
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CountKind {
    P,
    Q,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    Fi,
    Vc,
    Hc,
    Duration,
    Binpack,
}

impl ProblemArg {
    fn problem(self) -> Problem {
        match self {
            ProblemArg::Fi => Problem::FI,
            ProblemArg::Vc => Problem::VC,
            ProblemArg::Hc => Problem::HC,
            ProblemArg::Duration => Problem::Duration,
            ProblemArg::Binpack => Problem::Binpack,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ProblemArg::Fi => "fi",
            ProblemArg::Vc => "vc",
            ProblemArg::Hc => "hc",
            ProblemArg::Duration => "duration",
            ProblemArg::Binpack => "binpack",
        }
    }

    fn optimal(self) -> f64 {
        match self {
            ProblemArg::Fi | ProblemArg::Binpack => t_f(),
            _ => t_p(),
        }
    }

    /// Exact value of the threshold policy.
    fn exact(self, t: f64, s: f64) -> reccalc::Result<f64> {
        match self {
            ProblemArg::Fi | ProblemArg::Binpack => recordlaw::p_threshold_count(t, s, 1),
            ProblemArg::Vc | ProblemArg::Hc => recordlaw::q_threshold_count(t, s, 1),
            ProblemArg::Duration => optstop::duration_value(t, s),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EuArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Identities,
    Mc,
}

#[derive(Debug, Clone, Copy)]
enum Threshold {
    Optimal,
    Value(f64),
}

impl Threshold {
    fn resolve(self, optimal: f64) -> f64 {
        match self {
            Threshold::Optimal => optimal,
            Threshold::Value(s) => s,
        }
    }
}

fn parse_area(s: &str) -> Result<f64, String> {
    match s {
        "inf" | "Inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        _ => {
            let t: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
            if t.is_finite() && t >= 0.0 {
                Ok(t)
            } else {
                Err(format!("area must be ≥ 0 or `inf`, got {s}"))
            }
        }
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("threshold must be a positive number, got {s}"))
    }
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    if s == "optimal" {
        Ok(Threshold::Optimal)
    } else {
        parse_positive(s).map(Threshold::Value)
    }
}

/// Outcome of a command: the report and whether every check passed.
struct Outcome {
    report: Report,
    passed: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self {
            report,
            passed: true,
        }
    }
}

fn cmd_values() -> reccalc::Result<Report> {
    let mut r = Report::new("values", "value", None);
    let g = optstop::greedy_optimum()?;
    for (name, v) in [
        ("t_F", optstop::solve_tf()?.root),
        ("v_F", optstop::value_fi(f64::INFINITY)?),
        ("t_P", optstop::solve_tp()?.root),
        ("v_P", optstop::v_p()?),
        ("greedy_area", g.area),
        ("greedy_value", g.value),
    ] {
        r.push(Row::new(vec![("name", name.into())], v));
    }
    Ok(r)
}

fn cmd_prob(kind: CountKind, t: f64, s: Option<f64>, j: usize) -> reccalc::Result<Report> {
    let value = match (kind, s) {
        (CountKind::P, None) => recordlaw::p_count(t, j)?,
        (CountKind::Q, None) => recordlaw::q_count(t, j)?,
        (CountKind::P, Some(s)) => recordlaw::p_threshold_count(t, s, j)?,
        (CountKind::Q, Some(s)) => recordlaw::q_threshold_count(t, s, j)?,
    };
    let mut r = Report::new("prob", "value", None);
    let name = match kind {
        CountKind::P => "p",
        CountKind::Q => "q",
    };
    let s = s.map(Field::Real).unwrap_or_else(|| "".into());
    r.push(Row::new(
        vec![
            ("kind", name.into()),
            ("t", t.into()),
            ("s", s),
            ("j", j.into()),
        ],
        value,
    ));
    Ok(r)
}

fn cmd_simulate(
    problem: ProblemArg,
    t: f64,
    s: Threshold,
    n: u64,
    mc: &MonteCarlo,
    seed: u64,
) -> reccalc::Result<Report> {
    let s = s.resolve(problem.optimal());
    let est = simulate::estimate_policy(problem.problem(), t, s, n, mc)?;
    let exact = problem.exact(t, s)?;
    let mut r = Report::new("simulate", "mean", Some(seed));
    r.push(Row {
        params: vec![
            ("problem", problem.name().into()),
            ("t", t.into()),
            ("s", s.into()),
            ("n", n.into()),
            ("exact", exact.into()),
        ],
        value: est.mean,
        std_error: Some(est.std_error),
    });
    Ok(r)
}

fn cmd_dist(kind: EuArg, k: u64, n: u64, mc: &MonteCarlo, seed: u64) -> reccalc::Result<Report> {
    let (eu, name) = match kind {
        EuArg::A => (EuKind::A, "A"),
        EuArg::B => (EuKind::B, "B"),
        EuArg::C => (EuKind::C, "C"),
    };
    let k = k as usize;
    simulate::sample_eu(eu, k, &mut simulate::trial_rng(seed, 0))?;
    let xs = mc.collect(n, |rng| simulate::sample_eu(eu, k, rng).expect("k ≥ 1"))?;
    let mut r = Report::new("dist", "value", Some(seed));
    for (i, x) in xs.into_iter().enumerate() {
        r.push(Row::new(
            vec![("kind", name.into()), ("k", k.into()), ("index", i.into())],
            x,
        ));
    }
    Ok(r)
}

fn cmd_winrate(s: Threshold, points: u64) -> reccalc::Result<Report> {
    let s = s.resolve(t_f());
    let mut r = Report::new("winrate", "density", None);
    for i in 0..points {
        let xi = i as f64 / (points - 1) as f64;
        r.push(Row::new(
            vec![("s", s.into()), ("xi", xi.into())],
            optstop::win_rate_density(xi, s)?,
        ));
    }
    Ok(r)
}

fn cmd_stoptime(t: f64, s: Threshold, points: u64) -> reccalc::Result<Report> {
    let s = s.resolve(t_f());
    let mut r = Report::new("stoptime", "cdf", None);
    for i in 0..points {
        let xi = i as f64 / points as f64;
        r.push(Row::new(
            vec![("t", t.into()), ("s", s.into()), ("xi", xi.into())],
            optstop::stop_time_cdf(t, xi, s)?,
        ));
    }
    Ok(r)
}

fn cmd_verify(suite: SuiteArg, n: u64, seed: u64, workers: usize) -> Outcome {
    let suite = match suite {
        SuiteArg::All => None,
        SuiteArg::Identities => Some(Suite::Identities),
        SuiteArg::Mc => Some(Suite::Mc),
    };
    let cfg = VerifyConfig {
        seed,
        workers,
        trials: n,
    };
    let mut report = Report::new("verify", "measured", Some(seed));
    let mut failed = 0;
    for c in verify::registry()
        .iter()
        .filter(|c| suite.is_none_or(|s| s == c.suite))
    {
        let res = c.run(&cfg);
        let status = if res.passed { "PASS" } else { "FAIL" };
        eprintln!("{status}  {}: {}", res.name, res.detail);
        failed += (!res.passed) as usize;
        let suite = match res.suite {
            Suite::Identities => "identities",
            Suite::Mc => "mc",
        };
        report.push(Row::new(
            vec![
                ("check", res.name.into()),
                ("suite", suite.into()),
                ("status", status.into()),
                ("metric", res.metric.as_str().into()),
                ("detail", res.detail.into()),
            ],
            res.measured,
        ));
    }
    eprintln!(
        "{} checks, {} passed, {failed} failed",
        report.rows.len(),
        report.rows.len() - failed
    );
    Outcome {
        report,
        passed: failed == 0,
    }
}

fn dispatch(cli: &Cli) -> reccalc::Result<Outcome> {
    let mc = MonteCarlo::new(cli.seed).with_workers(cli.workers);
    Ok(match cli.command {
        Command::Values => cmd_values()?.into(),
        Command::Prob { kind, t, s, j } => cmd_prob(kind, t, s, j)?.into(),
        Command::Simulate { problem, t, s, n } => {
            cmd_simulate(problem, t, s, n, &mc, cli.seed)?.into()
        }
        Command::Dist { kind, k, n } => cmd_dist(kind, k, n, &mc, cli.seed)?.into(),
        Command::Winrate { s, points } => cmd_winrate(s, points)?.into(),
        Command::Stoptime { t, s, points } => cmd_stoptime(t, s, points)?.into(),
        Command::Verify { suite, n } => cmd_verify(suite, n, cli.seed, cli.workers),
    })
}

fn write(cli: &Cli, report: &Report) -> Result<()> {
    match &cli.out {
        Some(path) => report.write(cli.format, BufWriter::new(File::create(path)?)),
        None => report.write(cli.format, BufWriter::new(io::stdout().lock())),
    }
}

/// Invalid arguments exit with 2, numerical failures with 1.
fn exit_code(e: &reccalc::Error) -> u8 {
    use reccalc::Error::*;
    match e {
        Domain { .. } | Unsupported(_) | Degenerate(_) | Index { .. } => 2,
        Overflow { .. } | Precision { .. } | Bracket { .. } => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = write(&cli, &outcome.report) {
        let _ = writeln!(io::stderr(), "error: {e}");
        return ExitCode::from(1);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
