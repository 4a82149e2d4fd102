//! Command-line front end: model selection, parameter sweeps, CSV/JSON
//! emission, figure-panel data, and the `verify` subcommand.
//!
//! Configuration can come from a JSON file (`--config`), with flags
//! overriding file values. Outputs are deterministic for a given
//! `(config, seed)`: floats are printed with 17 significant digits and
//! every file carries a comment header with the version and a hash of
//! the effective configuration.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex;
use crate::error::{Error, Result};
use crate::exponents;
use crate::grid::fmt_f64;
use crate::ising;
use crate::markov::{MarkovModel, MarkovPair};
use crate::meanfield;
use crate::tent::{self, square::SquareModel, zeta, OrbitTable, TentPotential};
use crate::verify;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "fluctuon", version, about = "entropy production, entropic pressures, and rate functions for a small model zoo")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct Common {
    /// JSON config file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sweep spec `axis:lo:hi:steps`, repeatable (first = outer axis)
    #[arg(long)]
    pub sweep: Vec<String>,
    /// Output path (defaults to stdout)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized checks
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-state Markov chain against its time reversal
    Markov {
        #[command(flatten)]
        common: Common,
        /// Model JSON file: {"P": [[...]], "labels": [...]}
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Mean-field lattice gas under particle-hole involution
    Gas {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        /// Volume for finite-volume quantities
        #[arg(long)]
        volume: Option<u64>,
        /// Pre-baked figure panel: rate | pressure | hoeffding
        #[arg(long)]
        figure: Option<String>,
    },
    /// One-dimensional Ising chain under spin flip
    Ising {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long = "J", allow_negative_numbers = true)]
        coupling: Option<f64>,
        #[arg(long = "h", allow_negative_numbers = true)]
        field: Option<f64>,
        #[arg(long)]
        volume: Option<u64>,
    },
    /// Tent-map pressure from prime-period orbit sums
    Tent {
        #[command(flatten)]
        common: Common,
        /// Potential exponent p in ]0,1[
        #[arg(long = "p")]
        exponent: Option<f64>,
        /// Comma-separated prime periods for convergence sweeps
        #[arg(long, value_delimiter = ',')]
        periods: Vec<u32>,
        /// Single period for critical-coupling estimates
        #[arg(long)]
        period: Option<u32>,
        /// Pre-baked figure panel: convergence | consistency | kappa-critical
        #[arg(long)]
        figure: Option<String>,
    },
    /// Two-potential tent-square map and its fluctuation theorem
    Square {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long)]
        p2: Option<f64>,
        /// Couplings; critical values from the orbit table when omitted
        #[arg(long, allow_negative_numbers = true)]
        kappa1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        kappa2: Option<f64>,
        #[arg(long)]
        period: Option<u32>,
    },
    /// Stein/Chernoff/Hoeffding error exponents for a Markov chain
    Exponents {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Largest horizon
        #[arg(long)]
        t: Option<usize>,
    },
    /// Run the invariant suite
    Verify {
        /// Run every criterion (the default)
        #[arg(long)]
        all: bool,
        /// Only criteria whose name contains this substring
        #[arg(long)]
        check: Option<String>,
        /// Period-23 orbit tables instead of 19
        #[arg(long)]
        full: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// One sweep axis.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Sweep {
    pub axis: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Sweep {
    fn parse(text: &str) -> Result<Sweep> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::InvalidParameter(format!("sweep must be axis:lo:hi:steps, got {text}")));
        }
        let lo: f64 = parts[1].parse().map_err(|_| Error::InvalidParameter(format!("bad sweep lo {}", parts[1])))?;
        let hi: f64 = parts[2].parse().map_err(|_| Error::InvalidParameter(format!("bad sweep hi {}", parts[2])))?;
        let steps: usize =
            parts[3].parse().map_err(|_| Error::InvalidParameter(format!("bad sweep steps {}", parts[3])))?;
        if steps < 2 {
            return Err(Error::InvalidParameter(format!("sweep needs steps >= 2, got {steps}")));
        }
        Ok(Sweep { axis: parts[0].to_string(), lo, hi, steps })
    }

    fn points(&self) -> Vec<f64> {
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.lo + i as f64 * h).collect()
    }
}

/// Effective run configuration; serialized canonically for hashing.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct RunConfig {
    pub model: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub sweep: Vec<Sweep>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunConfig {
    fn load(path: &PathBuf) -> Result<RunConfig> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("config {path:?}: {e}")))
    }

    fn merge_common(&mut self, common: &Common) -> Result<()> {
        if !common.sweep.is_empty() {
            self.sweep = common.sweep.iter().map(|s| Sweep::parse(s)).collect::<Result<_>>()?;
        }
        if let Some(path) = &common.output {
            self.output = Some(path.display().to_string());
        }
        if common.format.is_some() {
            self.format = common.format;
        }
        if common.seed.is_some() {
            self.seed = common.seed;
        }
        Ok(())
    }

    fn set_f64(&mut self, key: &str, value: Option<f64>) {
        if let Some(v) = value {
            self.params.insert(key.into(), serde_json::json!(v));
        }
    }

    fn get_f64(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).and_then(|v| v.as_f64()).unwrap_or(default)
    }

    fn get_u64(&self, key: &str, default: u64) -> u64 {
        self.params.get(key).and_then(|v| v.as_u64()).unwrap_or(default)
    }

    fn get_str(&self, key: &str) -> Option<String> {
        self.params.get(key).and_then(|v| v.as_str()).map(str::to_string)
    }

    fn hash(&self) -> u64 {
        // FNV-1a over the canonical serialization of the semantic
        // payload; the output location does not change the numbers
        let mut semantic = self.clone();
        semantic.output = None;
        let text = serde_json::to_string(&semantic).expect("config serializes");
        let mut acc: u64 = 0xcbf29ce484222325;
        for b in text.bytes() {
            acc ^= b as u64;
            acc = acc.wrapping_mul(0x100000001b3);
        }
        acc
    }
}

/// One table cell: a number (printed with 17 significant digits) or a
/// label.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.to_string())
    }
}

fn num_row(values: Vec<f64>) -> Vec<Cell> {
    values.into_iter().map(Cell::Num).collect()
}

/// A rectangular result table.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub units: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: Vec<&'static str>, units: Vec<&'static str>) -> Self {
        assert_eq!(columns.len(), units.len());
        Table { columns, units, rows: Vec::new() }
    }

    fn emit(&self, config: &RunConfig) -> Result<String> {
        let mut text = String::new();
        let units: Vec<String> =
            self.columns.iter().zip(&self.units).map(|(c, u)| format!("{c}:{u}")).collect();
        match config.format.unwrap_or_default() {
            Format::Csv => {
                writeln!(
                    text,
                    "# fluctuon={VERSION} config-hash={:016x} units={}",
                    config.hash(),
                    units.join(",")
                )
                .expect("string write");
                writeln!(text, "{}", self.columns.join(",")).expect("string write");
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|cell| match cell {
                            Cell::Num(v) => fmt_f64(*v),
                            Cell::Text(s) => s.clone(),
                        })
                        .collect();
                    writeln!(text, "{}", cells.join(",")).expect("string write");
                }
            }
            Format::Json => {
                let rows: Vec<Vec<serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|cell| match cell {
                                Cell::Num(v) => serde_json::json!(v),
                                Cell::Text(s) => serde_json::json!(s),
                            })
                            .collect()
                    })
                    .collect();
                let doc = serde_json::json!({
                    "version": VERSION,
                    "config_hash": format!("{:016x}", config.hash()),
                    "columns": self.columns,
                    "units": units,
                    "rows": rows,
                });
                writeln!(text, "{}", serde_json::to_string_pretty(&doc).expect("json serializes"))
                    .expect("string write");
            }
        }
        Ok(text)
    }
}

fn write_output(config: &RunConfig, table: &Table) -> Result<()> {
    let text = table.emit(config)?;
    match &config.output {
        Some(path) => fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn single_sweep(config: &RunConfig) -> Result<&Sweep> {
    match config.sweep.as_slice() {
        [s] => Ok(s),
        [] => Err(Error::InvalidParameter("this command needs a --sweep axis:lo:hi:steps".into())),
        _ => Err(Error::InvalidParameter("this command takes exactly one sweep axis".into())),
    }
}

fn markov_pair(config: &RunConfig) -> Result<MarkovPair> {
    let model = match config.get_str("model_file") {
        Some(path) => MarkovModel::from_json(&fs::read_to_string(path)?)?,
        // default chain: the biased 3-cycle
        None => MarkovModel::from_transitions(&[
            vec![0.1, 0.7, 0.2],
            vec![0.2, 0.1, 0.7],
            vec![0.7, 0.2, 0.1],
        ])?,
    };
    MarkovPair::time_reversal(model)
}

fn run_markov(config: &RunConfig) -> Result<()> {
    let pair = markov_pair(config)?;
    let sweep = single_sweep(config)?;
    let table = match sweep.axis.as_str() {
        "alpha" => {
            let mut table = Table::new(vec!["alpha", "e_alpha"], vec!["1", "nats"]);
            let rows: Result<Vec<Vec<f64>>> = sweep
                .points()
                .par_iter()
                .map(|&a| Ok(vec![a, pair.entropic_pressure(a)?]))
                .collect();
            table.rows = rows?.into_iter().map(num_row).collect();
            table
        }
        "s" => {
            let (rate, rate_hat) =
                pair.rate_functions((-3.0, 4.0, 2801), (sweep.lo, sweep.hi, sweep.steps))?;
            let mut table = Table::new(vec!["s", "I", "I_hat"], vec!["nats", "nats", "nats"]);
            table.rows = rate
                .nodes()
                .zip(rate_hat.values())
                .map(|((s, v), &vh)| num_row(vec![s, v, vh]))
                .collect();
            table
        }
        other => {
            return Err(Error::InvalidParameter(format!("markov sweeps alpha or s, not {other}")))
        }
    };
    write_output(config, &table)
}

fn run_gas(config: &RunConfig, figure: Option<&str>) -> Result<()> {
    if let Some(panel) = figure {
        return gas_figure(config, panel);
    }
    if config.sweep.len() == 2 {
        let table = outer_product(config, &["beta", "mu"], gas_table)?;
        return write_output(config, &table);
    }
    let table = gas_table(config)?;
    write_output(config, &table)
}

fn gas_table(config: &RunConfig) -> Result<Table> {
    let beta = config.get_f64("beta", 1.0);
    let mu = config.get_f64("mu", -1.8);
    let sweep = single_sweep(config)?;
    let table = match sweep.axis.as_str() {
        "alpha" => {
            let mut table = Table::new(
                vec!["beta", "mu", "alpha", "e_alpha"],
                vec!["1/energy", "energy", "1", "nats"],
            );
            let rows: Vec<Vec<f64>> = sweep
                .points()
                .par_iter()
                .map(|&a| vec![beta, mu, a, meanfield::entropic_pressure(beta, mu, a)])
                .collect();
            table.rows = rows.into_iter().map(num_row).collect();
            table
        }
        "s" => {
            let mut table =
                Table::new(vec!["beta", "mu", "s", "I"], vec!["1/energy", "energy", "nats", "nats"]);
            let rows: Result<Vec<Vec<f64>>> = sweep
                .points()
                .par_iter()
                .map(|&s| Ok(vec![beta, mu, s, meanfield::rate_function(beta, mu, s)?]))
                .collect();
            table.rows = rows?.into_iter().map(num_row).collect();
            table
        }
        "mu" => {
            let mut table =
                Table::new(vec!["beta", "mu", "p", "rho"], vec!["1/energy", "energy", "energy", "1"]);
            let rows: Vec<Vec<f64>> = sweep
                .points()
                .par_iter()
                .map(|&m| vec![beta, m, meanfield::pressure(beta, m), meanfield::rho(beta, m)])
                .collect();
            table.rows = rows.into_iter().map(num_row).collect();
            table
        }
        "beta" => {
            let mut table =
                Table::new(vec!["beta", "mu", "p", "rho"], vec!["1/energy", "energy", "energy", "1"]);
            let rows: Vec<Vec<f64>> = sweep
                .points()
                .par_iter()
                .map(|&b| vec![b, mu, meanfield::pressure(b, mu), meanfield::rho(b, mu)])
                .collect();
            table.rows = rows.into_iter().map(num_row).collect();
            table
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "gas sweeps alpha, s, mu, or beta, not {other}"
            )))
        }
    };
    Ok(table)
}

/// Cartesian product of an outer parameter sweep with the inner table
/// sweep; rows are concatenated in outer-major order.
fn outer_product(
    config: &RunConfig,
    axes: &[&str],
    inner: impl Fn(&RunConfig) -> Result<Table>,
) -> Result<Table> {
    let outer = config.sweep[0].clone();
    if !axes.contains(&outer.axis.as_str()) {
        return Err(Error::InvalidParameter(format!(
            "outer sweep axis must be one of {axes:?}, got {}",
            outer.axis
        )));
    }
    let mut merged: Option<Table> = None;
    for v in outer.points() {
        let mut sub = config.clone();
        sub.params.insert(outer.axis.clone(), serde_json::json!(v));
        sub.sweep = vec![config.sweep[1].clone()];
        let table = inner(&sub)?;
        match &mut merged {
            None => merged = Some(table),
            Some(m) => m.rows.extend(table.rows),
        }
    }
    Ok(merged.expect("outer sweep has at least 2 points"))
}

fn gas_figure(config: &RunConfig, panel: &str) -> Result<()> {
    match panel {
        // rate panels in the rescaled variable s_hat = s/(beta(mu+2))
        "rate" => {
            let mut table = Table::new(
                vec!["beta", "mu", "s_hat", "I"],
                vec!["1/energy", "energy", "1", "nats"],
            );
            for &beta in &[0.9, 1.8] {
                for &mu in &[-2.0, -1.8, -1.6, -1.4] {
                    for k in 0..=400 {
                        let s_hat = -1.0 + 2.0 * k as f64 / 400.0;
                        let r = 0.5 * (1.0 + s_hat);
                        let value = beta * meanfield::pressure(beta, mu)
                            - meanfield::free_energy(beta, mu, r);
                        table.rows.push(num_row(vec![beta, mu, s_hat, value]));
                    }
                }
            }
            write_output(config, &table)
        }
        "pressure" => {
            let mut table =
                Table::new(vec!["beta", "mu", "p", "rho"], vec!["1/energy", "energy", "energy", "1"]);
            for &beta in &[0.6, 0.9, 1.2, 1.8] {
                for k in 0..=400 {
                    let mu = -3.0 + 2.0 * k as f64 / 400.0;
                    table
                        .rows
                        .push(num_row(vec![beta, mu, meanfield::pressure(beta, mu), meanfield::rho(beta, mu)]));
                }
            }
            write_output(config, &table)
        }
        "hoeffding" => {
            let mu = -1.9;
            let mut table = Table::new(vec!["beta", "mu", "u", "f"], vec!["1/energy", "energy", "nats", "nats"]);
            for &beta in &[0.8, 0.9, 1.0, 1.1, 1.2] {
                let e = crate::grid::GridFunction::sample(-1.0, 2.0, 3001, |a| {
                    meanfield::entropic_pressure(beta, mu, a)
                })?;
                let sd = convex::structure_data(&e)?;
                for k in 0..=200 {
                    let u = 1.2 * sd.s1_lower * k as f64 / 200.0;
                    table.rows.push(num_row(vec![beta, mu, u, convex::hoeffding_f(&e, u)]));
                }
            }
            write_output(config, &table)
        }
        other => Err(Error::InvalidParameter(format!(
            "gas figures: rate, pressure, hoeffding (got {other})"
        ))),
    }
}

fn run_ising(config: &RunConfig) -> Result<()> {
    if config.sweep.len() == 2 {
        let table = outer_product(config, &["beta", "J", "h"], ising_table)?;
        return write_output(config, &table);
    }
    let table = ising_table(config)?;
    write_output(config, &table)
}

fn ising_table(config: &RunConfig) -> Result<Table> {
    let beta = config.get_f64("beta", 1.0);
    let coupling = config.get_f64("J", 1.0);
    let field = config.get_f64("h", 0.5);
    let sweep = single_sweep(config)?;
    let table = match sweep.axis.as_str() {
        "alpha" => {
            let mut table = Table::new(
                vec!["beta", "J", "h", "alpha", "e_alpha"],
                vec!["1/energy", "energy", "energy", "1", "nats"],
            );
            let rows: Vec<Vec<f64>> = sweep
                .points()
                .par_iter()
                .map(|&a| {
                    vec![beta, coupling, field, a, ising::entropic_pressure(beta, coupling, field, a)]
                })
                .collect();
            table.rows = rows.into_iter().map(num_row).collect();
            table
        }
        "s" => {
            let rate = ising::rate_function(beta, coupling, field, sweep.lo, sweep.hi, sweep.steps)?;
            let mut table = Table::new(
                vec!["beta", "J", "h", "s", "I"],
                vec!["1/energy", "energy", "energy", "nats", "nats"],
            );
            table.rows = rate.nodes().map(|(s, v)| num_row(vec![beta, coupling, field, s, v])).collect();
            table
        }
        "h" => {
            let mut table = Table::new(
                vec!["beta", "J", "h", "p"],
                vec!["1/energy", "energy", "energy", "energy"],
            );
            let rows: Vec<Vec<f64>> = sweep
                .points()
                .par_iter()
                .map(|&hh| vec![beta, coupling, hh, ising::pressure_closed(beta, coupling, hh)])
                .collect();
            table.rows = rows.into_iter().map(num_row).collect();
            table
        }
        other => {
            return Err(Error::InvalidParameter(format!("ising sweeps alpha, s, or h, not {other}")))
        }
    };
    Ok(table)
}

fn run_tent(config: &RunConfig, figure: Option<&str>) -> Result<()> {
    let exponent = config.get_f64("p", 0.7);
    let period = config.get_u64("period", 19) as u32;
    let periods: Vec<u32> = config
        .params
        .get("periods")
        .and_then(|v| v.as_array())
        .map(|a| a.iter().filter_map(|v| v.as_u64()).map(|v| v as u32).collect())
        .unwrap_or_else(|| vec![3, 5, 7, 11, 13]);

    match figure {
        Some("convergence") | None if figure.is_some() || !config.sweep.is_empty() => {
            // kappa sweep across the period list (the convergence panel)
            let sweep = if config.sweep.is_empty() {
                Sweep { axis: "kappa".into(), lo: 0.0, hi: 3.0, steps: 241 }
            } else {
                single_sweep(config)?.clone()
            };
            if sweep.axis == "kappa" {
                let pot = TentPotential::new(exponent)?;
                let mut columns: Vec<&'static str> = vec!["kappa"];
                let mut units: Vec<&'static str> = vec!["1"];
                let mut all_sums = Vec::new();
                for &t in &periods {
                    let table = OrbitTable::primitive_orbits(t)?;
                    all_sums.push((t, table.potential_sums(&pot)));
                    columns.push(Box::leak(format!("p{t}").into_boxed_str()));
                    units.push("nats");
                }
                let mut table = Table::new(columns, units);
                let rows: Vec<Vec<f64>> = sweep
                    .points()
                    .par_iter()
                    .map(|&kappa| {
                        let mut row = vec![kappa];
                        for (t, sums) in &all_sums {
                            row.push(tent::pressure_approx_from_sums(*t, sums, kappa));
                        }
                        row
                    })
                    .collect();
                table.rows = rows.into_iter().map(num_row).collect();
                return write_output(config, &table);
            }
            if sweep.axis == "p" {
                // critical-coupling curve over the exponent
                let mut table = Table::new(
                    vec!["p", "kappa_c", "kappa_minus", "kappa_plus"],
                    vec!["1", "1", "1", "1"],
                );
                for p in sweep.points() {
                    let pot = TentPotential::new(p)?;
                    let (k_lo, k_hi) = zeta::critical_brackets(p)?;
                    let kc = tent::kappa_critical_estimate(&pot, period, 4.0 * k_hi)?
                        .unwrap_or(f64::NAN);
                    table.rows.push(num_row(vec![p, kc, k_lo, k_hi]));
                }
                return write_output(config, &table);
            }
            Err(Error::InvalidParameter(format!("tent sweeps kappa or p, not {}", sweep.axis)))
        }
        Some("consistency") => {
            let pot = TentPotential::new(exponent)?;
            let table_orbits = OrbitTable::primitive_orbits(period)?;
            let sums = table_orbits.potential_sums(&pot);
            let (k_lo, _) = zeta::critical_brackets(exponent)?;
            let mut table = Table::new(
                vec!["kappa", "p_t", "mu_minus", "mu_plus"],
                vec!["1", "nats", "nats", "nats"],
            );
            for k in 0..=120 {
                let kappa = 0.995 * k_lo * k as f64 / 120.0;
                if kappa <= 0.0 {
                    continue;
                }
                let (mu_lo, mu_hi) = zeta::pressure_brackets(exponent, kappa)?;
                let approx = tent::pressure_approx_from_sums(period, &sums, kappa);
                table.rows.push(num_row(vec![kappa, approx, mu_lo, mu_hi]));
            }
            write_output(config, &table)
        }
        Some("kappa-critical") => {
            let mut table = Table::new(
                vec!["p", "kappa_c", "kappa_minus", "kappa_plus"],
                vec!["1", "1", "1", "1"],
            );
            for k in 1..=17 {
                let p = 0.05 * k as f64;
                let pot = TentPotential::new(p)?;
                let (k_lo, k_hi) = zeta::critical_brackets(p)?;
                let kc =
                    tent::kappa_critical_estimate(&pot, period, 4.0 * k_hi)?.unwrap_or(f64::NAN);
                table.rows.push(num_row(vec![p, kc, k_lo, k_hi]));
            }
            write_output(config, &table)
        }
        Some(other) => Err(Error::InvalidParameter(format!(
            "tent figures: convergence, consistency, kappa-critical (got {other})"
        ))),
        None => Err(Error::InvalidParameter("tent needs --sweep or --figure".into())),
    }
}

fn square_model(config: &RunConfig) -> Result<SquareModel> {
    let p1 = config.get_f64("p1", 0.9);
    let p2 = config.get_f64("p2", 0.1);
    let period = config.get_u64("period", 19) as u32;
    let pot1 = TentPotential::new(p1)?;
    let pot2 = TentPotential::new(p2)?;
    let table = OrbitTable::primitive_orbits(period)?;
    let k1 = match config.params.get("kappa1").and_then(|v| v.as_f64()) {
        Some(k) => k,
        None => tent::kappa_critical_from_sums(period, &table.potential_sums(&pot1), 100.0)?
            .ok_or_else(|| Error::SeriesDiverges("no transition detected below kappa_max = 100".into()))?,
    };
    let k2 = match config.params.get("kappa2").and_then(|v| v.as_f64()) {
        Some(k) => k,
        None => tent::kappa_critical_from_sums(period, &table.potential_sums(&pot2), 100.0)?
            .ok_or_else(|| Error::SeriesDiverges("no transition detected below kappa_max = 100".into()))?,
    };
    SquareModel::new(pot1, pot2, k1, k2, period)
}

fn run_square(config: &RunConfig) -> Result<()> {
    let model = square_model(config)?;
    let sweep = single_sweep(config)?;
    let table = match sweep.axis.as_str() {
        "alpha" => {
            let curve = model.pressure_curve(sweep.lo, sweep.hi, sweep.steps)?;
            let mut table = Table::new(vec!["alpha", "e"], vec!["1", "nats"]);
            table.rows = curve.nodes().map(|(a, v)| num_row(vec![a, v])).collect();
            table
        }
        "s" => {
            let rate = model.rate(1.0, 801, sweep.lo, sweep.hi, sweep.steps)?;
            let mut table = Table::new(vec!["s", "I"], vec!["nats", "nats"]);
            table.rows = rate.nodes().map(|(s, v)| num_row(vec![s, v])).collect();
            table
        }
        other => {
            return Err(Error::InvalidParameter(format!("square sweeps alpha or s, not {other}")))
        }
    };
    write_output(config, &table)
}

fn run_exponents(config: &RunConfig) -> Result<()> {
    let pair = markov_pair(config)?;
    let t = config.get_u64("t", 12) as usize;
    let t_list = [t / 3, 2 * t / 3, t];
    let mut table =
        Table::new(vec!["t", "quantity", "value", "target"], vec!["steps", "1", "nats", "nats"]);
    let mut push = |tt: usize, quantity: String, value: f64, target: f64| {
        table.rows.push(vec![
            Cell::Num(tt as f64),
            Cell::Text(quantity),
            Cell::Num(value),
            Cell::Num(target),
        ]);
    };
    let stein = exponents::stein_exponent(&pair, &t_list, 0.95)?;
    for &(tt, est) in &stein.estimates {
        push(tt, "stein".into(), est, stein.target);
    }
    push(t, "stein_trend".into(), stein.trend, stein.target);
    let chernoff = exponents::chernoff_exponent(&pair, &t_list)?;
    for &(tt, est) in &chernoff.estimates {
        push(tt, "chernoff".into(), est, chernoff.target);
    }
    let e = pair.pressure_curve(-1.0, 2.0, 3001)?;
    let sd = convex::structure_data(&e)?;
    let u_grid: Vec<f64> = (0..=8)
        .map(|k| 0.1 * sd.s_star + (0.9 * sd.s1_lower - 0.1 * sd.s_star) * k as f64 / 8.0)
        .collect();
    for sample in exponents::hoeffding_curve(&pair, t, &u_grid, &e)? {
        push(t, format!("hoeffding(u={})", fmt_f64(sample.u)), sample.empirical, sample.target);
    }
    write_output(config, &table)
}

pub fn run_verify(all: bool, check: Option<String>, full: bool, seed: u64) -> i32 {
    let _ = all; // the full suite is the default; --check narrows it
    let full = full || std::env::var("FLUCTUON_ACCEPT_FULL").is_ok();
    let selected: Vec<&str> = verify::CRITERIA
        .iter()
        .copied()
        .filter(|name| check.as_ref().is_none_or(|f| name.contains(f.as_str())))
        .collect();
    if selected.is_empty() {
        eprintln!("no criterion matches {check:?}; known: {:?}", verify::CRITERIA);
        return 2;
    }
    let mut failures = 0;
    for name in selected {
        let result = verify::run_one(name, full, seed).expect("name from the criteria list");
        println!("[{}] {} — {}", if result.passed { "PASS" } else { "FAIL" }, result.name, result.detail);
        if !result.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        eprintln!("{failures} criteria failed");
        3
    } else {
        0
    }
}

/// Entry point used by `main`; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Verify { all, check, full, seed } => {
            return run_verify(all, check, full, seed.unwrap_or(1));
        }
        Command::Markov { ref common, ref model } => {
            build_config("markov", common, |config| {
                if let Some(path) = model {
                    config
                        .params
                        .insert("model_file".into(), serde_json::json!(path.display().to_string()));
                }
                Ok(())
            })
            .and_then(|config| run_markov(&config))
        }
        Command::Gas { ref common, beta, mu, volume, ref figure } => {
            build_config("gas", common, |config| {
                config.set_f64("beta", beta);
                config.set_f64("mu", mu);
                if let Some(v) = volume {
                    config.params.insert("volume".into(), serde_json::json!(v));
                }
                Ok(())
            })
            .and_then(|config| run_gas(&config, figure.as_deref()))
        }
        Command::Ising { ref common, beta, coupling, field, volume } => {
            build_config("ising", common, |config| {
                config.set_f64("beta", beta);
                config.set_f64("J", coupling);
                config.set_f64("h", field);
                if let Some(v) = volume {
                    config.params.insert("volume".into(), serde_json::json!(v));
                }
                Ok(())
            })
            .and_then(|config| run_ising(&config))
        }
        Command::Tent { ref common, exponent, ref periods, period, ref figure } => {
            build_config("tent", common, |config| {
                config.set_f64("p", exponent);
                if !periods.is_empty() {
                    config.params.insert("periods".into(), serde_json::json!(periods));
                }
                if let Some(t) = period {
                    config.params.insert("period".into(), serde_json::json!(t));
                }
                Ok(())
            })
            .and_then(|config| run_tent(&config, figure.as_deref()))
        }
        Command::Square { ref common, p1, p2, kappa1, kappa2, period } => {
            build_config("square", common, |config| {
                config.set_f64("p1", p1);
                config.set_f64("p2", p2);
                config.set_f64("kappa1", kappa1);
                config.set_f64("kappa2", kappa2);
                if let Some(t) = period {
                    config.params.insert("period".into(), serde_json::json!(t));
                }
                Ok(())
            })
            .and_then(|config| run_square(&config))
        }
        Command::Exponents { ref common, ref model, t } => {
            build_config("exponents", common, |config| {
                if let Some(path) = model {
                    config
                        .params
                        .insert("model_file".into(), serde_json::json!(path.display().to_string()));
                }
                if let Some(tt) = t {
                    config.params.insert("t".into(), serde_json::json!(tt));
                }
                Ok(())
            })
            .and_then(|config| run_exponents(&config))
        }
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn build_config(
    model: &str,
    common: &Common,
    fill: impl FnOnce(&mut RunConfig) -> Result<()>,
) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.model = model.to_string();
    config.merge_common(common)?;
    fill(&mut config)?;
    Ok(config)
}

/// Invalid configuration exits 2; numerical failures exit 3.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::InvalidGrid(_)
        | Error::NotStochastic(_)
        | Error::MissingNode(_)
        | Error::GridMismatch(_)
        | Error::DegenerateDirection
        | Error::Io(_) => 2,
        _ => 3,
    }
}

/// Reads `FLUCTUON_THREADS` and configures the global worker pool.
pub fn configure_threads() {
    if let Ok(text) = std::env::var("FLUCTUON_THREADS") {
        if let Ok(n) = text.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
}
