//! Flat `key = value` experiment configs.
//!
//! ```text
//! # comment
//! c_grid = 0.25, 0.5, 1, 2
//! n_list = 8, 16, 32
//! samples = 100000
//! seed = 1
//! workers = 4
//! out_dir = out/convergence
//! emit_svg = false
//! ```
//!
//! `c_grid` and `n_list` are required; everything else has a default.
//! `record_timing` (default `false`) fills the `runtime_s` column with wall
//! clock time, which makes the CSV vary from run to run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default Monte Carlo budget per grid point.
pub const DEFAULT_SAMPLES: u64 = 100_000;
/// Default master seed.
pub const DEFAULT_SEED: u64 = 1;
/// Default output directory.
pub const DEFAULT_OUT_DIR: &str = "wglab-out";
/// Fewest distinct `c` values the figure accepts.
pub const MIN_FIGURE_POINTS: usize = 5;

const FIGURE1: &str = "\
# Limiting total variation distance near c = 0, with an n = 32 overlay.
c_grid = 0.001, 0.002, 0.003, 0.005, 0.0075, 0.01, 0.015, 0.02, 0.03, 0.04, 0.05
n_list = 32
samples = 100000
seed = 1
workers = 4
out_dir = wglab-out/figure1
emit_svg = true
";

const CONVERGENCE: &str = "\
# Finite-n estimates against the limit across the critical window.
c_grid = 0.25, 0.5, 1, 2
n_list = 8, 16, 32
samples = 100000
seed = 1
workers = 4
out_dir = wglab-out/convergence
emit_svg = false
";

/// Built-in configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// `c` from 0.001 to 0.05 at `n = 32`, with the figure.
    Figure1,
    /// `c` in {0.25, 0.5, 1, 2} at `n` in {8, 16, 32}.
    Convergence,
}

impl Preset {
    /// The preset as config text.
    pub fn text(self) -> &'static str {
        match self {
            Preset::Figure1 => FIGURE1,
            Preset::Convergence => CONVERGENCE,
        }
    }

    /// The parsed preset.
    pub fn config(self) -> ExperimentConfig {
        ExperimentConfig::parse(self.text()).expect("built-in presets are valid")
    }
}

/// A `(c, n)` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Strictly increasing positive ratios `c = d / n^3`.
    pub c_grid: Vec<f64>,
    /// Strictly increasing matrix orders.
    pub n_list: Vec<usize>,
    /// Monte Carlo draws per grid point.
    pub samples: u64,
    /// Master seed, shared by every grid point.
    pub seed: u64,
    /// Threads; `WGLAB_WORKERS` takes precedence.
    pub workers: usize,
    /// Where `sweep.csv` and `figure1.svg` go.
    pub out_dir: PathBuf,
    /// Also write the figure.
    pub emit_svg: bool,
    /// Store wall-clock time per row instead of 0.
    pub record_timing: bool,
}

/// `round(c n^3)`.
pub fn degrees_of_freedom(c: f64, n: usize) -> f64 {
    let nf = n as f64;
    (c * nf * nf * nf).round()
}

/// Largest `d` accepted, so that `d` and `c n^3` are exact in `f64`.
const MAX_D: f64 = 9_007_199_254_740_992.0;

fn parse_value<T: FromStr>(key: &str, v: &str, line: usize) -> Result<T> {
    v.parse()
        .map_err(|_| Error::config(format!("line {line}: cannot parse {key} value {v:?}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str, line: usize) -> Result<Vec<T>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|item| parse_value(key, item.trim(), line))
        .collect()
}

fn parse_bool(key: &str, v: &str, line: usize) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::config(format!(
            "line {line}: {key} must be true or false, got {v:?}"
        ))),
    }
}

impl ExperimentConfig {
    /// Parses and validates config text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c_grid = None;
        let mut n_list = None;
        let mut cfg = ExperimentConfig {
            c_grid: Vec::new(),
            n_list: Vec::new(),
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            workers: crate::parallel::default_workers(),
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
            emit_svg: false,
            record_timing: false,
        };
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {line}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(Error::config(format!("line {line}: duplicate key {key}")));
            }
            seen.push(key.to_string());
            match key {
                "c_grid" => c_grid = Some(parse_list(key, value, line)?),
                "n_list" => n_list = Some(parse_list(key, value, line)?),
                "samples" => cfg.samples = parse_value(key, value, line)?,
                "seed" => cfg.seed = parse_value(key, value, line)?,
                "workers" => cfg.workers = parse_value(key, value, line)?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "emit_svg" => cfg.emit_svg = parse_bool(key, value, line)?,
                "record_timing" => cfg.record_timing = parse_bool(key, value, line)?,
                _ => return Err(Error::config(format!("line {line}: unknown key {key}"))),
            }
        }
        cfg.c_grid = c_grid.ok_or_else(|| Error::config("missing c_grid"))?;
        cfg.n_list = n_list.ok_or_else(|| Error::config("missing n_list"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Checks the grid and budget.
    pub fn validate(&self) -> Result<()> {
        if self.c_grid.is_empty() {
            return Err(Error::config("c_grid is empty"));
        }
        if self.n_list.is_empty() {
            return Err(Error::config("n_list is empty"));
        }
        if let Some(c) = self.c_grid.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::config(format!(
                "c_grid entry {c} is not a positive number"
            )));
        }
        if let Some(w) = self.c_grid.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "c_grid must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if self.n_list.contains(&0) {
            return Err(Error::config("n_list entries must be at least 1"));
        }
        if let Some(w) = self.n_list.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "n_list must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if self.samples < 2 {
            return Err(Error::config("samples must be at least 2"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        for (c, n) in self.grid_pairs() {
            let d = degrees_of_freedom(c, n);
            if d < n as f64 {
                return Err(Error::config(format!(
                    "(c, n) = ({c}, {n}) gives d = round(c n^3) = {d} < n"
                )));
            }
            if d > MAX_D {
                return Err(Error::config(format!(
                    "(c, n) = ({c}, {n}) gives d = {d:e}, too large"
                )));
            }
        }
        if self.emit_svg && self.c_grid.len() < MIN_FIGURE_POINTS {
            return Err(Error::config(format!(
                "emit_svg needs at least {MIN_FIGURE_POINTS} c values, c_grid has {}",
                self.c_grid.len()
            )));
        }
        Ok(())
    }

    /// `(c, n)` in sweep order: `c` outer, `n` inner.
    pub fn grid_pairs(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.c_grid
            .iter()
            .flat_map(move |&c| self.n_list.iter().map(move |&n| (c, n)))
    }

    /// Config text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut s = String::new();
        let _ = writeln!(
            s,
            "c_grid = {}",
            join(self.c_grid.iter().map(|c| c.to_string()).collect())
        );
        let _ = writeln!(
            s,
            "n_list = {}",
            join(self.n_list.iter().map(|n| n.to_string()).collect())
        );
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "workers = {}", self.workers);
        let _ = writeln!(s, "out_dir = {}", self.out_dir.display());
        let _ = writeln!(s, "emit_svg = {}", self.emit_svg);
        let _ = writeln!(s, "record_timing = {}", self.record_timing);
        s
    }
}
