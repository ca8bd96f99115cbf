//! Preset sweeps for the four standard coverage curves.

use laser_uav::coverage::Metric;
use laser_uav::{QuadratureSpec, Scenario, SimulationConfig};

use crate::config::db_to_linear;
use crate::sweep::{lin_grid, log_grid, run_sweep, Axis, Engine, Row, SweepError, SweepPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Energy coverage vs LBD density, with and without turbulence.
    Energy,
    /// SNR coverage vs LBD density for several thresholds.
    Snr,
    /// Joint coverage vs SNR threshold at `delta_s = 1e-6`.
    JointBeta,
    /// Joint coverage vs power-splitting factor at 55 dB.
    JointDelta,
}

impl Figure {
    pub fn command(&self) -> &'static str {
        match self {
            Figure::Energy => "fig-energy",
            Figure::Snr => "fig-snr",
            Figure::JointBeta => "fig-joint-beta",
            Figure::JointDelta => "fig-joint-delta",
        }
    }
}

/// One curve of a figure.
#[derive(Debug, Clone)]
pub struct FigureSeries {
    pub label: String,
    pub base: Scenario,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub metrics: Vec<Metric>,
}

pub const FIGURE_DENSITIES: [f64; 3] = [0.5e-6, 1e-6, 2e-6];

fn density_grid() -> Vec<f64> {
    log_grid(1e-8, 1e-5, 31)
}

pub fn beta_grid() -> Vec<f64> {
    lin_grid(30.0, 70.0, 41)
}

pub fn delta_grid() -> Vec<f64> {
    let mut grid = log_grid(1e-9, 1e-1, 25);
    grid.extend([0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999]);
    grid
}

pub fn figure_series(figure: Figure, base: &Scenario) -> Vec<FigureSeries> {
    match figure {
        Figure::Energy => [10.0, 50.0]
            .into_iter()
            .map(|p_comm| {
                let mut s = base.clone();
                s.power.p_comm = p_comm;
                FigureSeries {
                    label: format!("p_comm={p_comm}"),
                    base: s,
                    axis: Axis::LbdDensity,
                    grid: density_grid(),
                    metrics: vec![Metric::EnergyNoTurbulence, Metric::Energy],
                }
            })
            .collect(),
        Figure::Snr => [50.0, 55.0, 60.0]
            .into_iter()
            .map(|beta_db| {
                let mut s = base.clone();
                s.snr_threshold = db_to_linear(beta_db);
                FigureSeries {
                    label: format!("beta_db={beta_db}"),
                    base: s,
                    axis: Axis::LbdDensity,
                    grid: density_grid(),
                    metrics: vec![Metric::Snr],
                }
            })
            .collect(),
        Figure::JointBeta => FIGURE_DENSITIES
            .into_iter()
            .map(|density| {
                let mut s = base.with_density(density);
                s.channel.split = 1e-6;
                FigureSeries {
                    label: format!("lbd_density={density:e}"),
                    base: s,
                    axis: Axis::BetaDb,
                    grid: beta_grid(),
                    metrics: vec![Metric::Joint],
                }
            })
            .collect(),
        Figure::JointDelta => FIGURE_DENSITIES
            .into_iter()
            .map(|density| {
                let mut s = base.with_density(density);
                s.snr_threshold = db_to_linear(55.0);
                FigureSeries {
                    label: format!("lbd_density={density:e}"),
                    base: s,
                    axis: Axis::DeltaS,
                    grid: delta_grid(),
                    metrics: vec![Metric::Joint],
                }
            })
            .collect(),
    }
}

/// Rows of every series of `figure`, series after series.
pub fn run_figure(
    figure: Figure,
    base: &Scenario,
    engine: Engine,
    simulation: SimulationConfig,
    quadrature: QuadratureSpec,
) -> Result<Vec<Row>, SweepError> {
    let mut rows = Vec::new();
    for series in figure_series(figure, base) {
        let plan = SweepPlan {
            base: &series.base,
            axis: series.axis,
            grid: &series.grid,
            metrics: &series.metrics,
            engine,
            simulation,
            quadrature,
            label: Some(series.label.clone()),
        };
        rows.extend(run_sweep(&plan)?);
    }
    Ok(rows)
}
