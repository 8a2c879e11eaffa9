//! The `(c, n)` sweep behind the `figure1` preset.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use wglab_core::limit_theory::{limiting_tv_closed_form, LimitParams};
use wglab_core::tv_mc::{Side, TvPlan};
use wglab_core::RngState;

use crate::config::{degrees_of_freedom, ExperimentConfig};
use crate::error::{Error, Result};
use crate::parallel::Runner;
use crate::{svg, table};

/// CSV file name inside `out_dir`.
pub const CSV_NAME: &str = "sweep.csv";
/// SVG file name inside `out_dir`.
pub const SVG_NAME: &str = "figure1.svg";

/// One grid point. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Ratio `d / n^3` requested.
    pub c: f64,
    /// Matrix order.
    pub n: u64,
    /// `round(c n^3)`.
    pub d: u64,
    /// GOE-side Monte Carlo estimate of the distance.
    pub tv_mc: f64,
    /// Its standard error.
    pub tv_stderr: f64,
    /// `Erf(1 / (4 sqrt(3 c)))`.
    pub tv_limit: f64,
    /// Fraction of draws with the spectrum inside the window.
    pub frac_in_q: f64,
    /// Wall-clock seconds, or 0 unless timing was requested.
    pub runtime_s: f64,
    /// Seed; `wglab tv --n n --d d --seed seed` reproduces `tv_mc`.
    pub seed: u64,
}

/// Runs every grid point in `(c, n)` order, reporting each row to `on_row`.
pub fn run_sweep_with<F>(
    cfg: &ExperimentConfig,
    runner: &Runner,
    mut on_row: F,
) -> Result<Vec<SweepRow>>
where
    F: FnMut(&SweepRow),
{
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.c_grid.len() * cfg.n_list.len());
    for (c, n) in cfg.grid_pairs() {
        let d = degrees_of_freedom(c, n) as u64;
        let start = Instant::now();
        let plan = TvPlan::new(n, d, cfg.samples, Side::Goe, RngState::new(cfg.seed))?;
        let est = runner.run(&plan)?;
        let elapsed = start.elapsed().as_secs_f64();
        let row = SweepRow {
            c,
            n: n as u64,
            d,
            tv_mc: est.mean,
            tv_stderr: est.stderr,
            tv_limit: limiting_tv_closed_form(LimitParams::new(c)?),
            frac_in_q: est.frac_in_q,
            runtime_s: if cfg.record_timing { elapsed } else { 0.0 },
            seed: cfg.seed,
        };
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}

/// [`run_sweep_with`] without progress reporting.
pub fn run_sweep(cfg: &ExperimentConfig, runner: &Runner) -> Result<Vec<SweepRow>> {
    run_sweep_with(cfg, runner, |_| {})
}

/// Files written by [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    /// The sweep table.
    pub csv: PathBuf,
    /// The figure, when requested.
    pub svg: Option<PathBuf>,
    /// Rows as written.
    pub rows: Vec<SweepRow>,
}

/// Sweeps, writes `sweep.csv` and, if asked, renders `figure1.svg` from the
/// CSV just written.
pub fn run_experiment<F>(cfg: &ExperimentConfig, runner: &Runner, on_row: F) -> Result<Artifacts>
where
    F: FnMut(&SweepRow),
{
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let rows = run_sweep_with(cfg, runner, on_row)?;
    let csv = cfg.out_dir.join(CSV_NAME);
    table::write_rows(&rows, &csv)?;
    let svg = if cfg.emit_svg {
        let path = cfg.out_dir.join(SVG_NAME);
        svg::emit_figure1_svg(&table::read_rows(&csv)?, &path)?;
        Some(path)
    } else {
        None
    };
    Ok(Artifacts { csv, svg, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use wglab_core::tv_mc::tv_estimate_goe_side;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn single_point_limit_is_erf_one() {
        let c = cfg("c_grid = 0.020833333333333332\nn_list = 16\nsamples = 200\nseed = 3\n");
        let rows = run_sweep(&c, &Runner::new(2).unwrap()).unwrap();
        assert_eq!(rows.len(), 1);
        let r = rows[0];
        assert_eq!((r.n, r.d, r.seed), (16, 85, 3));
        assert!((r.tv_limit - 0.842_700_792_949_714_9).abs() < 1e-12);
        assert_eq!(r.runtime_s, 0.0);
        let direct = tv_estimate_goe_side(16, 85, 200, RngState::new(3)).unwrap();
        assert_eq!(r.tv_mc, direct.mean);
        assert_eq!(r.tv_stderr, direct.stderr);
        assert_eq!(r.frac_in_q, direct.frac_in_q);
    }

    #[test]
    fn rows_follow_grid_order() {
        let c = cfg("c_grid = 1, 2\nn_list = 2, 3\nsamples = 10\n");
        let mut seen = Vec::new();
        let rows = run_sweep_with(&c, &Runner::new(1).unwrap(), |r| seen.push((r.c, r.n))).unwrap();
        assert_eq!(seen, vec![(1.0, 2), (1.0, 3), (2.0, 2), (2.0, 3)]);
        assert_eq!(
            rows.iter().map(|r| r.d).collect::<Vec<_>>(),
            vec![8, 27, 16, 54]
        );
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.tv_mc) && (0.0..=1.0).contains(&r.tv_limit));
        }
    }

    #[test]
    fn timing_only_when_requested() {
        let c = cfg("c_grid = 1\nn_list = 4\nsamples = 50\nrecord_timing = true\n");
        let rows = run_sweep(&c, &Runner::new(1).unwrap()).unwrap();
        assert!(rows[0].runtime_s > 0.0);
    }
}
