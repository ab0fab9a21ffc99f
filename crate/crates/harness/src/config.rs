//! Declarative experiment configs: a line-oriented `key = value` format with
//! `[section]` headers. Unknown keys and constraint violations are hard
//! errors carrying the offending line number.

use std::fmt;

use resdim_core::dimension::{CurveKind, RangePolicy};
use resdim_core::drivers::OdeKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Global(String),
}

fn err_at<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Line {
        line,
        message: message.into(),
    })
}

/// Which pipeline a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    LowerBound,
    UpperBound,
    RankSweep,
    Lyapunov,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::LowerBound => "lower-bound",
            ExperimentKind::UpperBound => "upper-bound",
            ExperimentKind::RankSweep => "rank-sweep",
            ExperimentKind::Lyapunov => "lyapunov",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirConfig {
    pub state_dim: usize,
    pub target_norm: f64,
    pub leak_rate: f64,
    /// Master seed of the experiment; every stream is derived from it.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DriverConfig {
    Ode { system: OdeKind, params: [f64; 3] },
    PeriodicBlocks {
        period: usize,
        input_dim: usize,
        block_count: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationConfig {
    pub coordinates: Vec<usize>,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dt: f64,
    pub t_end: f64,
    pub t_transient: f64,
    pub washout_fraction: f64,
    /// Driven steps per run; `None` means one pass over the whole window.
    pub steps: Option<usize>,
    pub initial_conditions: usize,
    /// Spectral-norm grid for the upper-bound sweep.
    pub rho_grid: Vec<f64>,
    /// Seeds in a rank sweep.
    pub trials: usize,
    /// Perturbation-persistence settings for rank sweeps (radius 0 = off).
    pub perturbation_radius: f64,
    pub perturbation_trials: usize,
    /// QR cadence for Lyapunov runs.
    pub renorm_every: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionConfig {
    pub method: CurveKind,
    pub n_radii: usize,
    pub range_policy: RangePolicy,
    pub theiler_window: usize,
    pub max_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub reservoir: ReservoirConfig,
    pub driver: DriverConfig,
    pub observation: ObservationConfig,
    pub run: RunConfig,
    pub dimension: DimensionConfig,
    pub output_path: String,
}

pub fn default_rho_grid() -> Vec<f64> {
    let (lo, hi, n) = (0.05, 1.5, 30usize);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

impl ExperimentConfig {
    /// Re-emit in the canonical section order; `parse(emit(c)) == c`.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str("[experiment]\n");
        out.push_str(&format!("kind = {}\n\n", self.kind));

        out.push_str("[reservoir]\n");
        out.push_str(&format!("state_dim = {}\n", self.reservoir.state_dim));
        out.push_str(&format!("target_norm = {}\n", fmt_f64(self.reservoir.target_norm)));
        out.push_str(&format!("leak_rate = {}\n", fmt_f64(self.reservoir.leak_rate)));
        out.push_str(&format!("seed = {}\n\n", self.reservoir.seed));

        out.push_str("[driver]\n");
        match &self.driver {
            DriverConfig::Ode { system, params } => {
                let name = match system {
                    OdeKind::Lorenz => "lorenz",
                    OdeKind::Rossler => "rossler",
                };
                out.push_str(&format!("system = {name}\n"));
                out.push_str(&format!(
                    "params = {},{},{}\n",
                    fmt_f64(params[0]),
                    fmt_f64(params[1]),
                    fmt_f64(params[2])
                ));
            }
            DriverConfig::PeriodicBlocks {
                period,
                input_dim,
                block_count,
            } => {
                out.push_str(&format!("period = {period}\n"));
                out.push_str(&format!("input_dim = {input_dim}\n"));
                out.push_str(&format!("block_count = {block_count}\n"));
            }
        }
        out.push('\n');

        out.push_str("[observation]\n");
        let coords: Vec<String> = self
            .observation
            .coordinates
            .iter()
            .map(|c| c.to_string())
            .collect();
        out.push_str(&format!("coordinates = {}\n", coords.join(",")));
        out.push_str(&format!("scale = {}\n\n", fmt_f64(self.observation.scale)));

        out.push_str("[run]\n");
        out.push_str(&format!("dt = {}\n", fmt_f64(self.run.dt)));
        out.push_str(&format!("t_end = {}\n", fmt_f64(self.run.t_end)));
        out.push_str(&format!("t_transient = {}\n", fmt_f64(self.run.t_transient)));
        out.push_str(&format!(
            "washout_fraction = {}\n",
            fmt_f64(self.run.washout_fraction)
        ));
        if let Some(steps) = self.run.steps {
            out.push_str(&format!("steps = {steps}\n"));
        }
        out.push_str(&format!(
            "initial_conditions = {}\n",
            self.run.initial_conditions
        ));
        let grid: Vec<String> = self.run.rho_grid.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&format!("rho_grid = {}\n", grid.join(",")));
        out.push_str(&format!("trials = {}\n", self.run.trials));
        out.push_str(&format!(
            "perturbation_radius = {}\n",
            fmt_f64(self.run.perturbation_radius)
        ));
        out.push_str(&format!(
            "perturbation_trials = {}\n",
            self.run.perturbation_trials
        ));
        out.push_str(&format!("renorm_every = {}\n\n", self.run.renorm_every));

        out.push_str("[dimension]\n");
        let method = match self.dimension.method {
            CurveKind::Correlation => "correlation",
            CurveKind::BoxCounting => "box-counting",
        };
        out.push_str(&format!("method = {method}\n"));
        out.push_str(&format!("radii = {}\n", self.dimension.n_radii));
        let policy = match self.dimension.range_policy {
            RangePolicy::Auto => "auto".to_string(),
            RangePolicy::Manual { lo, hi } => format!("manual:{lo}..{hi}"),
        };
        out.push_str(&format!("range_policy = {policy}\n"));
        out.push_str(&format!("theiler = {}\n", self.dimension.theiler_window));
        out.push_str(&format!("max_points = {}\n\n", self.dimension.max_points));

        out.push_str("[output]\n");
        out.push_str(&format!("path = {}\n", self.output_path));
        out
    }
}

fn fmt_f64(v: f64) -> String {
    // Shortest representation that round-trips.
    let s = format!("{v}");
    if s.parse::<f64>() == Ok(v) {
        s
    } else {
        format!("{v:.17e}")
    }
}

/// One raw `key = value` with its source line, grouped per section.
struct RawItem {
    line: usize,
    key: String,
    value: String,
}

/// Parse and validate a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    const SECTIONS: &[&str] = &[
        "experiment",
        "reservoir",
        "driver",
        "observation",
        "run",
        "dimension",
        "output",
    ];
    let mut sections: std::collections::HashMap<String, Vec<RawItem>> = Default::default();
    let mut current: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or(ConfigError::Line {
                    line: line_no,
                    message: format!("malformed section header `{raw_line}`"),
                })?
                .trim()
                .to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return err_at(line_no, format!("unknown section `[{name}]`"));
            }
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err_at(line_no, format!("expected `key = value`, got `{line}`"));
        };
        let section = current
            .clone()
            .ok_or(ConfigError::Line {
                line: line_no,
                message: "key appears before any [section] header".into(),
            })?;
        sections.entry(section).or_default().push(RawItem {
            line: line_no,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        });
    }

    let mut take = SectionReader::new(&mut sections);

    // [experiment]
    let kind_item = take.required("experiment", "kind")?;
    let kind = match kind_item.value.as_str() {
        "lower-bound" => ExperimentKind::LowerBound,
        "upper-bound" => ExperimentKind::UpperBound,
        "rank-sweep" => ExperimentKind::RankSweep,
        "lyapunov" => ExperimentKind::Lyapunov,
        other => return err_at(kind_item.line, format!("unknown experiment kind `{other}`")),
    };
    take.finish_section("experiment")?;

    // [reservoir]
    let state_dim = take.required("reservoir", "state_dim")?.parse_usize()?;
    let target_norm = take
        .optional("reservoir", "target_norm")
        .map(|i| i.parse_f64())
        .transpose()?
        .unwrap_or(0.99);
    let leak_item = take.optional("reservoir", "leak_rate");
    let (leak_rate, leak_line) = match leak_item {
        Some(i) => (i.parse_f64()?, i.line),
        None => (1.0, 0),
    };
    if !(leak_rate > 0.0 && leak_rate <= 1.0) {
        return err_at(
            leak_line,
            format!("leak_rate = {leak_rate} violates the constraint (0,1]"),
        );
    }
    let seed = take
        .optional("reservoir", "seed")
        .map(|i| i.parse_u64())
        .transpose()?
        .unwrap_or(0);
    if state_dim == 0 {
        return Err(ConfigError::Global("state_dim must be >= 1".into()));
    }
    if !(target_norm > 0.0) {
        return Err(ConfigError::Global("target_norm must be positive".into()));
    }
    take.finish_section("reservoir")?;

    // [driver]
    let driver = {
        let system = take.optional("driver", "system");
        match system {
            Some(sys_item) => {
                let system = match sys_item.value.as_str() {
                    "lorenz" => OdeKind::Lorenz,
                    "rossler" => OdeKind::Rossler,
                    other => {
                        return err_at(sys_item.line, format!("unknown driver system `{other}`"))
                    }
                };
                let params = match take.optional("driver", "params") {
                    Some(item) => item.parse_f64_triple()?,
                    None => match system {
                        OdeKind::Lorenz => [10.0, 28.0, 8.0 / 3.0],
                        OdeKind::Rossler => [0.2, 0.2, 5.7],
                    },
                };
                DriverConfig::Ode { system, params }
            }
            None => {
                let period = take.required("driver", "period")?.parse_usize()?;
                let input_dim = take.required("driver", "input_dim")?.parse_usize()?;
                let bc_item = take.required("driver", "block_count")?;
                let block_count = bc_item.parse_usize()?;
                if period == 0 || input_dim == 0 || block_count == 0 {
                    return err_at(
                        bc_item.line,
                        "period, input_dim and block_count must be >= 1",
                    );
                }
                DriverConfig::PeriodicBlocks {
                    period,
                    input_dim,
                    block_count,
                }
            }
        }
    };
    take.finish_section("driver")?;

    // [observation]
    let coordinates = match take.optional("observation", "coordinates") {
        Some(item) => {
            let coords: Result<Vec<usize>, _> = item
                .value
                .split(',')
                .map(|v| v.trim().parse::<usize>())
                .collect();
            match coords {
                Ok(c) if !c.is_empty() => c,
                _ => return err_at(item.line, format!("bad coordinate list `{}`", item.value)),
            }
        }
        None => vec![0, 1, 2],
    };
    let scale = take
        .optional("observation", "scale")
        .map(|i| i.parse_f64())
        .transpose()?
        .unwrap_or(0.01);
    take.finish_section("observation")?;

    // [run]
    let dt = take
        .optional("run", "dt")
        .map(|i| i.parse_f64())
        .transpose()?
        .unwrap_or(0.01);
    let t_end = take
        .optional("run", "t_end")
        .map(|i| i.parse_f64())
        .transpose()?
        .unwrap_or(50.0);
    let t_transient = take
        .optional("run", "t_transient")
        .map(|i| i.parse_f64())
        .transpose()?
        .unwrap_or(10.0);
    let washout_item = take.optional("run", "washout_fraction");
    let (washout_fraction, washout_line) = match washout_item {
        Some(i) => (i.parse_f64()?, i.line),
        None => (0.95, 0),
    };
    if !(washout_fraction > 0.0 && washout_fraction < 1.0) {
        return err_at(
            washout_line,
            format!("washout_fraction = {washout_fraction} violates the constraint (0,1)"),
        );
    }
    let steps = take
        .optional("run", "steps")
        .map(|i| i.parse_usize())
        .transpose()?;
    let initial_conditions = take
        .optional("run", "initial_conditions")
        .map(|i| i.parse_usize())
        .transpose()?
        .unwrap_or(20);
    let rho_grid = match take.optional("run", "rho_grid") {
        Some(item) => {
            let grid: Result<Vec<f64>, _> = item
                .value
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect();
            match grid {
                Ok(g) if !g.is_empty() && g.iter().all(|v| *v > 0.0) => g,
                _ => return err_at(item.line, format!("bad rho grid `{}`", item.value)),
            }
        }
        None => default_rho_grid(),
    };
    let trials = take
        .optional("run", "trials")
        .map(|i| i.parse_usize())
        .transpose()?
        .unwrap_or(100);
    let perturbation_radius = take
        .optional("run", "perturbation_radius")
        .map(|i| i.parse_f64())
        .transpose()?
        .unwrap_or(0.0);
    let perturbation_trials = take
        .optional("run", "perturbation_trials")
        .map(|i| i.parse_usize())
        .transpose()?
        .unwrap_or(50);
    let renorm_every = take
        .optional("run", "renorm_every")
        .map(|i| i.parse_usize())
        .transpose()?
        .unwrap_or(10);
    take.finish_section("run")?;

    // [dimension]
    let method = match take.optional("dimension", "method") {
        Some(item) => match item.value.as_str() {
            "correlation" => CurveKind::Correlation,
            "box-counting" => CurveKind::BoxCounting,
            other => return err_at(item.line, format!("unknown dimension method `{other}`")),
        },
        None => CurveKind::Correlation,
    };
    let n_radii = take
        .optional("dimension", "radii")
        .map(|i| i.parse_usize())
        .transpose()?
        .unwrap_or(24);
    let range_policy = match take.optional("dimension", "range_policy") {
        Some(item) => {
            if item.value == "auto" {
                RangePolicy::Auto
            } else if let Some(range) = item.value.strip_prefix("manual:") {
                let Some((lo, hi)) = range.split_once("..") else {
                    return err_at(item.line, "manual range must look like `manual:lo..hi`");
                };
                match (lo.trim().parse(), hi.trim().parse()) {
                    (Ok(lo), Ok(hi)) => RangePolicy::Manual { lo, hi },
                    _ => return err_at(item.line, format!("bad manual range `{}`", item.value)),
                }
            } else {
                return err_at(
                    item.line,
                    format!("unknown range policy `{}`", item.value),
                );
            }
        }
        None => RangePolicy::Auto,
    };
    let theiler_window = take
        .optional("dimension", "theiler")
        .map(|i| i.parse_usize())
        .transpose()?
        .unwrap_or(10);
    let max_points = take
        .optional("dimension", "max_points")
        .map(|i| i.parse_usize())
        .transpose()?
        .unwrap_or(100_000);
    take.finish_section("dimension")?;

    // [output]
    let output_path = take
        .optional("output", "path")
        .map(|i| i.value.clone())
        .unwrap_or_else(|| "results.csv".to_string());
    take.finish_section("output")?;

    let config = ExperimentConfig {
        kind,
        reservoir: ReservoirConfig {
            state_dim,
            target_norm,
            leak_rate,
            seed,
        },
        driver,
        observation: ObservationConfig { coordinates, scale },
        run: RunConfig {
            dt,
            t_end,
            t_transient,
            washout_fraction,
            steps,
            initial_conditions,
            rho_grid,
            trials,
            perturbation_radius,
            perturbation_trials,
            renorm_every,
        },
        dimension: DimensionConfig {
            method,
            n_radii,
            range_policy,
            theiler_window,
            max_points,
        },
        output_path,
    };
    validate_cross_constraints(&config)?;
    Ok(config)
}

fn validate_cross_constraints(config: &ExperimentConfig) -> Result<(), ConfigError> {
    match (&config.kind, &config.driver) {
        (ExperimentKind::LowerBound | ExperimentKind::RankSweep, DriverConfig::PeriodicBlocks { period, input_dim, .. }) => {
            if period * input_dim < config.reservoir.state_dim {
                return Err(ConfigError::Global(format!(
                    "constraint m * N_in >= N_r violated: {} * {} < {}",
                    period, input_dim, config.reservoir.state_dim
                )));
            }
        }
        (ExperimentKind::LowerBound | ExperimentKind::RankSweep, DriverConfig::Ode { .. }) => {
            return Err(ConfigError::Global(format!(
                "{} experiments need a periodic-block driver (period/input_dim/block_count)",
                config.kind
            )));
        }
        (ExperimentKind::UpperBound, DriverConfig::PeriodicBlocks { .. }) => {
            return Err(ConfigError::Global(
                "upper-bound experiments need an ODE driver (system = lorenz | rossler)".into(),
            ));
        }
        _ => {}
    }
    if let DriverConfig::Ode { .. } = &config.driver {
        if let Some(&bad) = config.observation.coordinates.iter().find(|&&c| c >= 3) {
            return Err(ConfigError::Global(format!(
                "observation coordinate {bad} out of range for 3-dimensional drivers"
            )));
        }
        if !(config.run.dt > 0.0) || !(config.run.t_transient < config.run.t_end) {
            return Err(ConfigError::Global(
                "run needs dt > 0 and t_transient < t_end".into(),
            ));
        }
    }
    if config.dimension.n_radii < 2 {
        return Err(ConfigError::Global("need at least 2 radii".into()));
    }
    Ok(())
}

struct SectionReader<'a> {
    sections: &'a mut std::collections::HashMap<String, Vec<RawItem>>,
}

impl<'a> SectionReader<'a> {
    fn new(sections: &'a mut std::collections::HashMap<String, Vec<RawItem>>) -> Self {
        Self { sections }
    }

    fn pop(&mut self, section: &str, key: &str) -> Option<RawItem> {
        let items = self.sections.get_mut(section)?;
        let pos = items.iter().position(|i| i.key == key)?;
        Some(items.remove(pos))
    }

    fn optional(&mut self, section: &str, key: &str) -> Option<RawItem> {
        self.pop(section, key)
    }

    fn required(&mut self, section: &str, key: &str) -> Result<RawItem, ConfigError> {
        self.pop(section, key).ok_or_else(|| {
            ConfigError::Global(format!("missing required key `{key}` in [{section}]"))
        })
    }

    /// Any keys left in the section are unknown: hard error.
    fn finish_section(&mut self, section: &str) -> Result<(), ConfigError> {
        if let Some(items) = self.sections.get(section) {
            if let Some(item) = items.first() {
                return err_at(
                    item.line,
                    format!("unknown key `{}` in [{section}]", item.key),
                );
            }
        }
        Ok(())
    }
}

impl RawItem {
    fn parse_usize(&self) -> Result<usize, ConfigError> {
        self.value
            .parse()
            .map_err(|_| ConfigError::Line {
                line: self.line,
                message: format!("`{}` expects an unsigned integer, got `{}`", self.key, self.value),
            })
    }

    fn parse_u64(&self) -> Result<u64, ConfigError> {
        self.value
            .parse()
            .map_err(|_| ConfigError::Line {
                line: self.line,
                message: format!("`{}` expects a u64, got `{}`", self.key, self.value),
            })
    }

    fn parse_f64(&self) -> Result<f64, ConfigError> {
        self.value
            .parse()
            .map_err(|_| ConfigError::Line {
                line: self.line,
                message: format!("`{}` expects a float, got `{}`", self.key, self.value),
            })
    }

    fn parse_f64_triple(&self) -> Result<[f64; 3], ConfigError> {
        let parts: Result<Vec<f64>, _> = self
            .value
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect();
        match parts {
            Ok(p) if p.len() == 3 => Ok([p[0], p[1], p[2]]),
            _ => err_at(
                self.line,
                format!("`{}` expects three comma-separated floats", self.key),
            ),
        }
    }
}
