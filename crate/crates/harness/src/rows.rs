//! The flat result-row schema shared by every experiment, and its CSV form.
//!
//! The header is fixed; optional cells are empty. Floats are printed with 17
//! significant digits so re-parsing is bit-faithful. The wall-time column is
//! last so golden comparisons can strip it.

use std::io::Write;

use resdim_core::Result;

/// Column names, in emission order.
pub const HEADER: &[&str] = &[
    "experiment",
    "master_seed",
    "state_dim",
    "input_dim",
    "target_norm",
    "leak_rate",
    "driver",
    "period",
    "block_count",
    "coordinates",
    "scale",
    "dt",
    "t_end",
    "t_transient",
    "washout_fraction",
    "steps",
    "initial_conditions",
    "rho",
    "seed_index",
    "method",
    "range_policy",
    "n_radii",
    "max_points",
    "point_count",
    "dimension_estimate",
    "fit_residual",
    "fit_lo",
    "fit_hi",
    "lyapunov_lambda1",
    "lyapunov_spectrum",
    "lyapunov_dimension_bound",
    "g2_full_rank_fraction",
    "sigma_min",
    "persistence_fraction",
    "driver_dimension",
    "driver_lambda_min_inv",
    "status",
    "wall_time_seconds",
];

/// One output row. Config identifiers are flattened in, so the row alone
/// suffices to re-run itself.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub master_seed: u64,
    pub state_dim: usize,
    pub input_dim: usize,
    pub target_norm: f64,
    pub leak_rate: f64,
    pub driver: String,
    pub period: Option<usize>,
    pub block_count: Option<usize>,
    /// Semicolon-separated coordinate indices (empty for block drivers).
    pub coordinates: String,
    pub scale: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub t_transient: Option<f64>,
    pub washout_fraction: Option<f64>,
    pub steps: Option<usize>,
    pub initial_conditions: Option<usize>,
    pub rho: Option<f64>,
    pub seed_index: Option<u64>,
    pub method: String,
    pub range_policy: String,
    pub n_radii: usize,
    pub max_points: usize,
    pub point_count: Option<usize>,
    pub dimension_estimate: Option<f64>,
    pub fit_residual: Option<f64>,
    pub fit_lo: Option<usize>,
    pub fit_hi: Option<usize>,
    pub lyapunov_lambda1: Option<f64>,
    /// Semicolon-separated descending exponents.
    pub lyapunov_spectrum: String,
    pub lyapunov_dimension_bound: Option<f64>,
    pub g2_full_rank_fraction: Option<f64>,
    pub sigma_min: Option<f64>,
    pub persistence_fraction: Option<f64>,
    pub driver_dimension: Option<f64>,
    pub driver_lambda_min_inv: Option<f64>,
    pub status: String,
    pub wall_time_seconds: f64,
}

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_float(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ResultRow {
    pub fn to_cells(&self) -> Vec<String> {
        vec![
            self.experiment.clone(),
            self.master_seed.to_string(),
            self.state_dim.to_string(),
            self.input_dim.to_string(),
            fmt_float(self.target_norm),
            fmt_float(self.leak_rate),
            self.driver.clone(),
            opt_usize(self.period),
            opt_usize(self.block_count),
            self.coordinates.clone(),
            opt_float(self.scale),
            opt_float(self.dt),
            opt_float(self.t_end),
            opt_float(self.t_transient),
            opt_float(self.washout_fraction),
            opt_usize(self.steps),
            opt_usize(self.initial_conditions),
            opt_float(self.rho),
            self.seed_index.map(|v| v.to_string()).unwrap_or_default(),
            self.method.clone(),
            self.range_policy.clone(),
            self.n_radii.to_string(),
            self.max_points.to_string(),
            opt_usize(self.point_count),
            opt_float(self.dimension_estimate),
            opt_float(self.fit_residual),
            opt_usize(self.fit_lo),
            opt_usize(self.fit_hi),
            opt_float(self.lyapunov_lambda1),
            self.lyapunov_spectrum.clone(),
            opt_float(self.lyapunov_dimension_bound),
            opt_float(self.g2_full_rank_fraction),
            opt_float(self.sigma_min),
            opt_float(self.persistence_fraction),
            opt_float(self.driver_dimension),
            opt_float(self.driver_lambda_min_inv),
            self.status.clone(),
            fmt_float(self.wall_time_seconds),
        ]
    }
}

/// Write the fixed header plus one line per row.
pub fn write_rows<W: Write>(mut out: W, rows: &[ResultRow]) -> Result<()> {
    writeln!(out, "{}", HEADER.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.to_cells().join(","))?;
    }
    Ok(())
}

/// A CSV document with the wall-time column (the last one) blanked, for
/// byte-level reproducibility comparisons.
pub fn strip_wall_time(csv: &str) -> String {
    csv.lines()
        .map(|line| match line.rfind(',') {
            Some(pos) => &line[..pos],
            None => line,
        })
        .map(|l| format!("{l}\n"))
        .collect()
}
