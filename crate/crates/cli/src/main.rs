use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use laser_uav::coverage::{self, CriticalRadius, Metric};
use laser_uav::{QuadratureSpec, Sampling, Scenario, SimulationConfig};
use laser_uav_cli::config::{default_scenario, load_scenario, LoadedScenario};
use laser_uav_cli::design::run_density_design;
use laser_uav_cli::error::CliError;
use laser_uav_cli::figures::{run_figure, Figure};
use laser_uav_cli::manifest::RunManifest;
use laser_uav_cli::sweep::{parse_grid, run_sweep, write_csv, Axis, Engine, Row, SweepError, SweepPlan};

#[derive(Parser)]
#[command(name = "laser-uav", version, about = "Coverage analysis for laser-powered UAVs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic coverage probabilities for a scenario.
    Analytic {
        #[command(flatten)]
        common: Common,
        /// Comma-separated metrics (default: all).
        #[arg(long)]
        metrics: Option<String>,
    },
    /// Monte Carlo coverage estimates for a scenario.
    Montecarlo {
        #[command(flatten)]
        common: Common,
        /// Comma-separated metrics (default: energy,snr,joint).
        #[arg(long)]
        metrics: Option<String>,
    },
    /// Sweep one parameter over a grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// lbd_density, beta_db, delta_s or p_comm.
        #[arg(long)]
        axis: String,
        /// `a,b,c`, `lin:start:stop:n` or `log:start:stop:n`.
        #[arg(long)]
        grid: String,
        /// Comma-separated metrics (default: joint).
        #[arg(long, default_value = "joint")]
        metrics: String,
    },
    /// Minimum LBD density reaching a target coverage.
    DensityDesign {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: f64,
        /// energy_no_turbulence, energy, snr or joint.
        #[arg(long, default_value = "energy")]
        metric: String,
    },
    /// Energy coverage vs density, p_comm in {10, 50} W, with and without turbulence.
    FigEnergy {
        #[command(flatten)]
        common: Common,
    },
    /// SNR coverage vs density for 50, 55 and 60 dB thresholds.
    FigSnr {
        #[command(flatten)]
        common: Common,
    },
    /// Joint coverage vs SNR threshold (30-70 dB) at delta_s = 1e-6.
    FigJointBeta {
        #[command(flatten)]
        common: Common,
    },
    /// Joint coverage vs power-splitting factor at a 55 dB threshold.
    FigJointDelta {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Direct,
    Window,
}

#[derive(Args)]
struct Common {
    /// Scenario file (`key = value` lines). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    iterations: u64,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// analytic, montecarlo or both.
    #[arg(long)]
    engine: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "direct")]
    sampling: SamplingArg,
    /// Half-width of the square simulation window in metres (window sampling).
    #[arg(long, default_value_t = 150_000.0)]
    window_half_width: f64,
}

impl Common {
    fn engine(&self, default: Engine) -> Result<Engine, CliError> {
        match &self.engine {
            Some(s) => s.parse().map_err(CliError::Usage),
            None => Ok(default),
        }
    }

    fn simulation(&self) -> SimulationConfig {
        SimulationConfig {
            iterations: self.iterations,
            sampling: match self.sampling {
                SamplingArg::Direct => Sampling::DirectNearest,
                SamplingArg::Window => Sampling::WindowPpp {
                    half_width: self.window_half_width,
                },
            },
            seed: self.seed.unwrap_or(0),
        }
    }

    fn scenario(&self) -> Result<LoadedScenario, CliError> {
        let loaded = match &self.config {
            Some(path) => load_scenario(path)?,
            None => default_scenario(),
        };
        for note in &loaded.notes {
            eprintln!("note: {note}");
        }
        Ok(loaded)
    }

    fn manifest(&self, command: &str, loaded: &LoadedScenario, engine: Engine) -> RunManifest {
        let seed = engine.montecarlo().then(|| self.seed.unwrap_or(0));
        RunManifest::new(command, loaded.fingerprint(), seed)
    }

    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn parse_metrics(list: &str) -> Result<Vec<Metric>, CliError> {
    list.split(',')
        .map(|m| m.parse::<Metric>().map_err(CliError::Usage))
        .collect()
}

fn sweep_failure(err: SweepError) -> CliError {
    CliError::core(err.to_string(), err.source)
}

fn scenario_notes(loaded: &LoadedScenario) -> Vec<String> {
    let s = &loaded.scenario;
    let mut notes = vec![format!("turbulence: {}", s.turbulence.name())];
    if let laser_uav::TurbulenceModel::LogNormal(ln) = &s.turbulence {
        notes.push(format!("scintillation_path: {}", ln.path.as_str()));
    }
    notes
}

fn emit(common: &Common, manifest: &RunManifest, notes: &[String], rows: &[Row]) -> Result<(), CliError> {
    let mut out = common.writer()?;
    write_csv(&mut out, manifest, notes, rows)?;
    out.flush()?;
    Ok(())
}

fn point_command(
    name: &str,
    common: &Common,
    metrics: Option<&str>,
    default_engine: Engine,
    default_metrics: &[Metric],
) -> Result<(), CliError> {
    let loaded = common.scenario()?;
    let engine = common.engine(default_engine)?;
    let metrics = match metrics {
        Some(list) => parse_metrics(list)?,
        None => default_metrics.to_vec(),
    };
    let s: &Scenario = &loaded.scenario;
    let plan = SweepPlan {
        base: s,
        axis: Axis::LbdDensity,
        grid: &[s.network.density],
        metrics: &metrics,
        engine,
        simulation: common.simulation(),
        quadrature: QuadratureSpec::default(),
        label: None,
    };
    let rows = run_sweep(&plan).map_err(sweep_failure)?;

    let mut notes = scenario_notes(&loaded);
    if engine.analytic() {
        let radius = coverage::critical_radius(s).map_err(|e| CliError::core("critical radius", e))?;
        notes.push(match radius {
            CriticalRadius::Radius(r) => format!("critical_radius_m: {r}"),
            CriticalRadius::NoCoverage => "critical_radius_m: none (no coverage)".to_string(),
            CriticalRadius::Unbounded => "critical_radius_m: unbounded".to_string(),
        });
        let k = coverage::k_factor(s).map_err(|e| CliError::core("k factor", e))?;
        notes.push(format!("k_factor: {k}"));
    }
    emit(common, &common.manifest(name, &loaded, engine), &notes, &rows)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analytic { common, metrics } => {
            point_command("analytic", &common, metrics.as_deref(), Engine::Analytic, &Metric::ALL)
        }
        Command::Montecarlo { common, metrics } => point_command(
            "montecarlo",
            &common,
            metrics.as_deref(),
            Engine::MonteCarlo,
            &[Metric::Energy, Metric::Snr, Metric::Joint],
        ),
        Command::Sweep {
            common,
            axis,
            grid,
            metrics,
        } => {
            let loaded = common.scenario()?;
            let axis: Axis = axis.parse().map_err(CliError::Usage)?;
            let grid = parse_grid(&grid).map_err(CliError::Usage)?;
            let metrics = parse_metrics(&metrics)?;
            let engine = common.engine(Engine::Analytic)?;
            let plan = SweepPlan {
                base: &loaded.scenario,
                axis,
                grid: &grid,
                metrics: &metrics,
                engine,
                simulation: common.simulation(),
                quadrature: QuadratureSpec::default(),
                label: None,
            };
            let rows = run_sweep(&plan).map_err(sweep_failure)?;
            emit(&common, &common.manifest("sweep", &loaded, engine), &scenario_notes(&loaded), &rows)
        }
        Command::DensityDesign { common, target, metric } => {
            let loaded = common.scenario()?;
            let metric: Metric = metric.parse().map_err(CliError::Usage)?;
            let report = run_density_design(&loaded.scenario, target, metric, &QuadratureSpec::default())
                .map_err(|e| CliError::core("density design", e))?;
            let manifest = common.manifest("density-design", &loaded, Engine::Analytic);
            let mut out = common.writer()?;
            report.write(&mut out, &manifest)?;
            out.flush()?;
            Ok(())
        }
        Command::FigEnergy { common } => figure(Figure::Energy, &common),
        Command::FigSnr { common } => figure(Figure::Snr, &common),
        Command::FigJointBeta { common } => figure(Figure::JointBeta, &common),
        Command::FigJointDelta { common } => figure(Figure::JointDelta, &common),
    }
}

fn figure(fig: Figure, common: &Common) -> Result<(), CliError> {
    let loaded = common.scenario()?;
    let engine = common.engine(Engine::Analytic)?;
    let rows = run_figure(
        fig,
        &loaded.scenario,
        engine,
        common.simulation(),
        QuadratureSpec::default(),
    )
    .map_err(sweep_failure)?;
    emit(
        common,
        &common.manifest(fig.command(), &loaded, engine),
        &scenario_notes(&loaded),
        &rows,
    )
}

fn threads_of(command: &Command) -> Option<usize> {
    match command {
        Command::Analytic { common, .. }
        | Command::Montecarlo { common, .. }
        | Command::Sweep { common, .. }
        | Command::DensityDesign { common, .. }
        | Command::FigEnergy { common }
        | Command::FigSnr { common }
        | Command::FigJointBeta { common }
        | Command::FigJointDelta { common } => common.threads,
    }
}

#[cfg(feature = "parallel")]
fn run_with_threads(command: Command) -> Result<(), CliError> {
    match threads_of(&command) {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
            pool.install(|| run(command))
        }
        None => run(command),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_with_threads(command: Command) -> Result<(), CliError> {
    let _ = threads_of(&command);
    run(command)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_with_threads(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
