//! One-dimensional parameter sweeps emitting fixed-schema CSV rows.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use laser_uav::coverage::{self, Metric};
use laser_uav::montecarlo::{self, SimulationOutcome};
use laser_uav::{Error as CoreError, QuadratureSpec, Scenario, SimulationConfig};

use crate::config::db_to_linear;
use crate::manifest::RunManifest;

pub const CSV_HEADER: &str = "axis,axis_value,metric,engine,value,std_error,n_iterations";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    LbdDensity,
    BetaDb,
    DeltaS,
    PComm,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::LbdDensity => "lbd_density",
            Axis::BetaDb => "beta_db",
            Axis::DeltaS => "delta_s",
            Axis::PComm => "p_comm",
        }
    }

    /// Copy of `base` with this axis set to `value`.
    pub fn apply(&self, base: &Scenario, value: f64) -> Scenario {
        let mut s = base.clone();
        match self {
            Axis::LbdDensity => s.network.density = value,
            Axis::BetaDb => s.snr_threshold = db_to_linear(value),
            Axis::DeltaS => s.channel.split = value,
            Axis::PComm => s.power.p_comm = value,
        }
        s
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lbd_density" => Ok(Axis::LbdDensity),
            "beta_db" => Ok(Axis::BetaDb),
            "delta_s" => Ok(Axis::DeltaS),
            "p_comm" => Ok(Axis::PComm),
            other => Err(format!(
                "unknown axis `{other}` (expected lbd_density, beta_db, delta_s or p_comm)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Analytic,
    MonteCarlo,
    Both,
}

impl Engine {
    pub fn analytic(&self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }

    pub fn montecarlo(&self) -> bool {
        matches!(self, Engine::MonteCarlo | Engine::Both)
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "montecarlo" => Ok(Engine::MonteCarlo),
            "both" => Ok(Engine::Both),
            other => Err(format!("unknown engine `{other}` (expected analytic, montecarlo or both)")),
        }
    }
}

/// One CSV data row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis: Axis,
    pub axis_value: f64,
    /// Metric name, optionally tagged with a `[variant]` suffix.
    pub metric: String,
    pub engine: &'static str,
    pub value: f64,
    pub std_error: Option<f64>,
    pub n_iterations: Option<u64>,
}

impl Row {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.axis,
            self.axis_value,
            self.metric,
            self.engine,
            self.value,
            self.std_error.map(|v| v.to_string()).unwrap_or_default(),
            self.n_iterations.map(|v| v.to_string()).unwrap_or_default(),
        )
    }
}

/// A failed grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepError {
    pub axis: Axis,
    pub index: usize,
    pub value: f64,
    pub source: CoreError,
}

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "grid point {} ({} = {})", self.index, self.axis, self.value)
    }
}

/// Sweep request.
#[derive(Debug, Clone)]
pub struct SweepPlan<'a> {
    pub base: &'a Scenario,
    pub axis: Axis,
    pub grid: &'a [f64],
    pub metrics: &'a [Metric],
    pub engine: Engine,
    pub simulation: SimulationConfig,
    pub quadrature: QuadratureSpec,
    /// Appended to every metric name as `metric[label]`.
    pub label: Option<String>,
}

pub fn validate_grid(grid: &[f64]) -> Result<(), String> {
    if grid.is_empty() {
        return Err("grid is empty".into());
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err("grid contains a non-finite value".into());
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err("grid must be strictly increasing".into());
    }
    Ok(())
}

/// Evaluates every grid point (in parallel when enabled) and returns rows
/// ordered by grid index, then metric, then engine.
pub fn run_sweep(plan: &SweepPlan<'_>) -> Result<Vec<Row>, SweepError> {
    let per_point = map_ordered(plan.grid, |index, value| {
        point_rows(plan, value).map_err(|source| SweepError {
            axis: plan.axis,
            index,
            value,
            source,
        })
    });
    let mut rows = Vec::new();
    for result in per_point {
        rows.extend(result?);
    }
    Ok(rows)
}

fn point_rows(plan: &SweepPlan<'_>, value: f64) -> Result<Vec<Row>, CoreError> {
    let scenario = plan.axis.apply(plan.base, value);
    let simulated: Option<SimulationOutcome> = if plan.engine.montecarlo() {
        Some(montecarlo::simulate(&scenario, &plan.simulation)?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(plan.metrics.len() * 2);
    for &metric in plan.metrics {
        let name = match &plan.label {
            Some(label) => format!("{metric}[{label}]"),
            None => metric.to_string(),
        };
        if plan.engine.analytic() {
            rows.push(Row {
                axis: plan.axis,
                axis_value: value,
                metric: name.clone(),
                engine: "analytic",
                value: coverage::coverage(&scenario, metric, &plan.quadrature)?,
                std_error: None,
                n_iterations: None,
            });
        }
        if let Some(outcome) = &simulated {
            let est = outcome.estimate(metric);
            rows.push(Row {
                axis: plan.axis,
                axis_value: value,
                metric: name,
                engine: "montecarlo",
                value: est.estimate,
                std_error: Some(est.std_error),
                n_iterations: Some(est.iterations),
            });
        }
    }
    Ok(rows)
}

#[cfg(feature = "parallel")]
fn map_ordered<T, F>(grid: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, f64) -> T + Sync,
{
    use rayon::prelude::*;
    grid.par_iter().enumerate().map(|(i, &v)| f(i, v)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_ordered<T, F>(grid: &[f64], f: F) -> Vec<T>
where
    F: Fn(usize, f64) -> T,
{
    grid.iter().enumerate().map(|(i, &v)| f(i, v)).collect()
}

/// Writes the manifest header, any extra `# key: value` notes, the column
/// header and the rows.
pub fn write_csv<W: Write>(w: &mut W, manifest: &RunManifest, notes: &[String], rows: &[Row]) -> io::Result<()> {
    manifest.write_header(w)?;
    for note in notes {
        writeln!(w, "# {note}")?;
    }
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.to_csv())?;
    }
    Ok(())
}

/// `start:stop:n` with `n` log-spaced points (inclusive).
pub fn log_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let (a, b) = (start.ln(), stop.ln());
    let mut grid: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    grid[0] = start;
    grid[n - 1] = stop;
    grid
}

/// `start:stop:n` with `n` evenly spaced points (inclusive).
pub fn lin_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect()
}

/// Parses `a,b,c`, `log:start:stop:n` or `lin:start:stop:n`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    let ranged = |rest: &str| -> Result<(f64, f64, usize), String> {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:n, found `{rest}`"));
        }
        let start = parts[0].trim().parse::<f64>().map_err(|_| format!("bad start `{}`", parts[0]))?;
        let stop = parts[1].trim().parse::<f64>().map_err(|_| format!("bad stop `{}`", parts[1]))?;
        let n = parts[2].trim().parse::<usize>().map_err(|_| format!("bad count `{}`", parts[2]))?;
        if n == 0 {
            return Err("point count must be positive".into());
        }
        Ok((start, stop, n))
    };
    let grid = if let Some(rest) = spec.strip_prefix("log:") {
        let (a, b, n) = ranged(rest)?;
        if !(a > 0.0 && b > 0.0) {
            return Err("log grid bounds must be positive".into());
        }
        log_grid(a, b, n)
    } else if let Some(rest) = spec.strip_prefix("lin:") {
        let (a, b, n) = ranged(rest)?;
        lin_grid(a, b, n)
    } else {
        spec.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad grid value `{p}`")))
            .collect::<Result<Vec<_>, _>>()?
    };
    validate_grid(&grid)?;
    Ok(grid)
}
