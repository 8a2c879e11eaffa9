//! The `wglab` command line.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wglab_core::limit_theory::{
    asymptotic_tail, limiting_tv_closed_form, limiting_tv_quadrature, CltPlan, CovMatrix2,
    LimitParams, LIMIT_COVARIANCE,
};
use wglab_core::tv_mc::{ProfileRecord, Side, TvPlan};
use wglab_core::RngState;

use crate::config::{ExperimentConfig, Preset};
use crate::error::{Error, Result};
use crate::parallel::{default_workers, workers_from_env, Runner};
use crate::sweep::run_experiment;

/// Wishart versus shifted GOE: total variation experiments.
#[derive(Debug, Parser)]
#[command(name = "wglab", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo estimate of TV(W(n, d), M(n, d)) at one point.
    Tv(TvArgs),
    /// Limiting distance at ratio c: closed form, quadrature and large-c tail.
    Limit(LimitArgs),
    /// Empirical covariance of the first and third spectral power sums.
    Clt(CltArgs),
    /// Run a (c, n) sweep and write sweep.csv (and figure1.svg).
    Sweep(SweepArgs),
    /// Per-draw log-ratio decomposition on the GOE side, as CSV.
    Profile(ProfileArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Goe,
    Wishart,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Goe => Side::Goe,
            SideArg::Wishart => Side::Wishart,
        }
    }
}

#[derive(Debug, Args)]
struct TvArgs {
    /// Matrix order.
    #[arg(long)]
    n: usize,
    /// Degrees of freedom, at least n.
    #[arg(long)]
    d: u64,
    /// Number of draws.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Which ensemble to sample from.
    #[arg(long, value_enum, default_value_t = SideArg::Goe)]
    side: SideArg,
}

#[derive(Debug, Args)]
struct LimitArgs {
    /// Ratio d / n^3.
    #[arg(long)]
    c: f64,
}

#[derive(Debug, Args)]
struct CltArgs {
    /// Matrix order.
    #[arg(long)]
    n: usize,
    /// Number of independent matrices.
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Experiment config file.
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment instead of a file.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Override out_dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Override samples.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// Matrix order.
    #[arg(long)]
    n: usize,
    /// Degrees of freedom, at least n.
    #[arg(long)]
    d: u64,
    /// Number of draws.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// One line of `wglab profile`.
#[derive(Debug, Serialize)]
struct ProfileRow {
    index: u64,
    alpha: f64,
    s0: Option<f64>,
    s1: Option<f64>,
    s2: Option<f64>,
    s3: Option<f64>,
    s4: Option<f64>,
    remainder: Option<f64>,
    in_q: bool,
    psd: bool,
    integrand: f64,
}

impl From<&ProfileRecord> for ProfileRow {
    fn from(r: &ProfileRecord) -> Self {
        let t = r.breakdown.terms;
        ProfileRow {
            index: r.index,
            alpha: r.breakdown.alpha_exact,
            s0: t.map(|t| t.s0),
            s1: t.map(|t| t.s1),
            s2: t.map(|t| t.s2),
            s3: t.map(|t| t.s3),
            s4: t.map(|t| t.s4),
            remainder: t.map(|t| t.remainder),
            in_q: r.breakdown.in_q,
            psd: r.breakdown.psd,
            integrand: r.integrand,
        }
    }
}

fn runner() -> Result<Runner> {
    Runner::from_env_or(default_workers())
}

fn stdout_error(e: io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn tv(a: &TvArgs, out: &mut dyn Write) -> Result<()> {
    let plan = TvPlan::new(a.n, a.d, a.samples, a.side.into(), RngState::new(a.seed))?;
    let est = runner()?.run(&plan)?;
    writeln!(
        out,
        "side: {}\nn: {}\nd: {}\nsamples: {}\nseed: {}\ntv: {}\nstderr: {}\nci99: {} {}\nfrac_in_q: {}\nfrac_psd: {}",
        est.side.as_str(),
        est.n,
        est.d,
        est.samples,
        est.seed,
        est.mean,
        est.stderr,
        est.ci_lo,
        est.ci_hi,
        est.frac_in_q,
        est.frac_psd
    )
    .map_err(stdout_error)
}

fn limit(a: &LimitArgs, out: &mut dyn Write) -> Result<()> {
    let p = LimitParams::new(a.c)?;
    let q = limiting_tv_quadrature(p)?;
    writeln!(
        out,
        "closed_form: {}\nquadrature: {}\nquadrature_abs_error: {}\nasymptote: {}",
        limiting_tv_closed_form(p),
        q.value,
        q.abs_error,
        asymptotic_tail(p)
    )
    .map_err(stdout_error)
}

fn clt(a: &CltArgs, out: &mut dyn Write) -> Result<()> {
    let pairs = runner()?.run(&CltPlan::new(a.n, a.reps, RngState::new(a.seed))?)?;
    let c = CovMatrix2::from_pairs(&pairs)?;
    let t = LIMIT_COVARIANCE;
    writeln!(
        out,
        "n: {}\nreps: {}\nseed: {}\nc11: {}\nc12: {}\nc22: {}\nlimit: {} {} {}",
        a.n, a.reps, a.seed, c.c11, c.c12, c.c22, t.c11, t.c12, t.c22
    )
    .map_err(stdout_error)
}

fn sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut cfg = match (&a.config, a.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(p)) => p.config(),
        (None, None) => unreachable!("clap requires one source"),
    };
    if let Some(dir) = &a.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(s) = a.samples {
        cfg.samples = s;
    }
    cfg.validate()?;
    let runner = Runner::new(workers_from_env()?.unwrap_or(cfg.workers))?;
    let art = run_experiment(&cfg, &runner, |r| {
        // progress is best effort
        let _ = writeln!(
            err,
            "c={} n={} d={} tv_mc={} tv_stderr={} tv_limit={}",
            r.c, r.n, r.d, r.tv_mc, r.tv_stderr, r.tv_limit
        );
    })?;
    writeln!(out, "csv: {}", art.csv.display()).map_err(stdout_error)?;
    if let Some(svg) = &art.svg {
        writeln!(out, "svg: {}", svg.display()).map_err(stdout_error)?;
    }
    Ok(())
}

fn profile(a: &ProfileArgs, out: &mut dyn Write) -> Result<()> {
    let plan = TvPlan::new(a.n, a.d, a.samples, Side::Goe, RngState::new(a.seed))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let csv_err = |source| Error::Csv {
        path: PathBuf::from("<stdout>"),
        source,
    };
    for rec in plan.profile() {
        w.serialize(ProfileRow::from(&rec?)).map_err(csv_err)?;
    }
    w.flush().map_err(stdout_error)
}

fn is_broken_pipe(e: &Error) -> bool {
    match e {
        Error::Io { source, .. } => source.kind() == io::ErrorKind::BrokenPipe,
        Error::Csv { source, .. } => {
            matches!(source.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe)
        }
        _ => false,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Tv(a) => tv(a, out),
        Command::Limit(a) => limit(a, out),
        Command::Clt(a) => clt(a, out),
        Command::Sweep(a) => sweep(a, out, err),
        Command::Profile(a) => profile(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) if is_broken_pipe(&e) => 0,
        Err(e) => {
            let _ = writeln!(err, "wglab: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("wglab").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn field(text: &str, key: &str) -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}: ")))
            .unwrap_or_else(|| panic!("{key} missing in {text}"))
            .parse()
            .unwrap()
    }

    #[test]
    fn limit_prints_three_values() {
        let (code, out, _) = call(&["limit", "--c", "0.0208333"]);
        assert_eq!(code, 0);
        let cf = field(&out, "closed_form");
        assert!((cf - field(&out, "quadrature")).abs() <= 1e-9);
        assert!(field(&out, "asymptote") > 0.0);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["tv", "--n", "2"]).0, 2);
        assert_eq!(call(&["tv", "--n", "2", "--d", "4", "--bogus"]).0, 2);
        assert_eq!(call(&["sweep"]).0, 2);
        assert_eq!(
            call(&["sweep", "--preset", "figure1", "--config", "x"]).0,
            2
        );
        assert_eq!(
            call(&["sweep", "--preset", "figure1", "--samples", "0"]).0,
            2
        );
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["tv", "--side", "both", "--n", "1", "--d", "1"]).0, 2);
        for args in [&["frobnicate"][..], &["limit", "--c", "1", "--bogus"]] {
            let (code, _, err) = call(args);
            assert_eq!(code, 2);
            assert!(err.contains("Usage"), "{err}");
        }
    }

    #[test]
    fn invalid_parameters_exit_two() {
        assert_eq!(call(&["tv", "--n", "5", "--d", "4"]).0, 2);
        assert_eq!(call(&["limit", "--c", "-1"]).0, 2);
        assert_eq!(call(&["clt", "--n", "1"]).0, 2);
        let (code, _, err) = call(&["sweep", "--config", "/nonexistent/wglab.conf"]);
        assert_eq!(code, 1);
        assert!(err.contains("/nonexistent/wglab.conf"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("profile"));
    }

    #[test]
    fn tv_is_deterministic() {
        let args = [
            "tv",
            "--n",
            "3",
            "--d",
            "12",
            "--samples",
            "3000",
            "--seed",
            "9",
            "--side",
            "wishart",
        ];
        let a = call(&args);
        assert_eq!(a.0, 0);
        assert_eq!(a, call(&args));
        assert!((0.0..=1.0).contains(&field(&a.1, "tv")));
        assert!(a.1.contains("side: wishart_side"));
    }

    #[test]
    fn profile_streams_csv() {
        let (code, out, _) = call(&[
            "profile",
            "--n",
            "4",
            "--d",
            "64",
            "--samples",
            "5",
            "--seed",
            "2",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(
            lines[0],
            "index,alpha,s0,s1,s2,s3,s4,remainder,in_q,psd,integrand"
        );
        for (i, l) in lines[1..].iter().enumerate() {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols.len(), 11);
            assert_eq!(cols[0], i.to_string());
        }
    }

    #[test]
    fn clt_prints_covariance() {
        let (code, out, _) = call(&["clt", "--n", "10", "--reps", "200", "--seed", "1"]);
        assert_eq!(code, 0);
        assert!(field(&out, "c11") > 0.0 && field(&out, "c22") > 0.0);
    }
}
