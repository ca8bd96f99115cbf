//! Monte Carlo estimation of the coverage metrics.
//!
//! Iterations are split into fixed-size blocks. Block `i` draws from a
//! ChaCha8 stream keyed by `(seed, i)`, and blocks only return integer hit
//! counts, so the merged estimate is bit-identical for any number of worker
//! threads (or none).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::coverage::{Metric, NetworkModel, Scenario};
use crate::error::{Error, Result};

/// Iterations per independent random stream.
pub const BLOCK_SIZE: u64 = 8192;

/// How the serving-LBD distance is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Sampling {
    /// Inverse-CDF draw from the exact nearest-neighbour law.
    #[default]
    DirectNearest,
    /// Full Poisson realisation in a square window of the given half-width (m)
    /// centred on the UAV projection.
    WindowPpp { half_width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub iterations: u64,
    pub sampling: Sampling,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            sampling: Sampling::DirectNearest,
            seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self, network: &NetworkModel) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", "must be >= 1"));
        }
        if let Sampling::WindowPpp { half_width } = self.sampling {
            let minimum = 10.0 / (network.density * PI).sqrt();
            if !(half_width >= minimum) || !half_width.is_finite() {
                return Err(Error::WindowTooSmall { half_width, minimum });
            }
        }
        Ok(())
    }
}

/// Empirical coverage probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageEstimate {
    pub metric: Metric,
    pub estimate: f64,
    pub std_error: f64,
    pub iterations: u64,
    pub seed: u64,
}

impl CoverageEstimate {
    fn from_hits(metric: Metric, hits: u64, iterations: u64, seed: u64) -> Self {
        let n = iterations as f64;
        let p = hits as f64 / n;
        Self {
            metric,
            estimate: p,
            std_error: (p * (1.0 - p) / n).sqrt(),
            iterations,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    energy_no_turbulence: u64,
    energy: u64,
    snr: u64,
    joint: u64,
    window_redraws: u64,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            energy_no_turbulence: self.energy_no_turbulence + other.energy_no_turbulence,
            energy: self.energy + other.energy,
            snr: self.snr + other.snr,
            joint: self.joint + other.joint,
            window_redraws: self.window_redraws + other.window_redraws,
        }
    }
}

/// Hit counts for every metric, all evaluated on the same `(R, h_t)` draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOutcome {
    tally: Tally,
    pub iterations: u64,
    pub seed: u64,
}

impl SimulationOutcome {
    pub fn estimate(&self, metric: Metric) -> CoverageEstimate {
        let hits = match metric {
            Metric::EnergyNoTurbulence => self.tally.energy_no_turbulence,
            Metric::Energy => self.tally.energy,
            Metric::Snr => self.tally.snr,
            Metric::Joint => self.tally.joint,
        };
        CoverageEstimate::from_hits(metric, hits, self.iterations, self.seed)
    }

    /// Window realisations that held no LBD and were drawn again.
    pub fn window_redraws(&self) -> u64 {
        self.tally.window_redraws
    }
}

/// Horizontal distance with nearest-neighbour CDF value `1 - u`, `u` in `(0, 1]`.
pub fn nearest_distance_from_uniform(u: f64, density: f64) -> f64 {
    (-u.ln() / (PI * density)).sqrt()
}

/// Draws the horizontal distance to the nearest LBD.
pub fn sample_nearest_distance<R: Rng + ?Sized>(
    network: &NetworkModel,
    config: &SimulationConfig,
    rng: &mut R,
) -> Result<f64> {
    config.validate(network)?;
    let mut redraws = 0;
    Ok(draw_distance(network.density, &config.sampling, rng, &mut redraws))
}

fn draw_distance<R: Rng + ?Sized>(density: f64, sampling: &Sampling, rng: &mut R, redraws: &mut u64) -> f64 {
    match *sampling {
        Sampling::DirectNearest => {
            let u = 1.0 - rng.random::<f64>();
            nearest_distance_from_uniform(u, density)
        }
        Sampling::WindowPpp { half_width } => {
            let mean = density * 4.0 * half_width * half_width;
            let poisson = Poisson::new(mean).expect("window mean is positive and finite");
            loop {
                let count = poisson.sample(rng) as u64;
                if count == 0 {
                    *redraws += 1;
                    continue;
                }
                let mut best = f64::INFINITY;
                for _ in 0..count {
                    let x = rng.random_range(-half_width..half_width);
                    let y = rng.random_range(-half_width..half_width);
                    best = best.min(x * x + y * y);
                }
                return best.sqrt();
            }
        }
    }
}

/// Thresholds shared by every block.
struct Prepared<'a> {
    scenario: &'a Scenario,
    consumed: f64,
    noise_scale: f64,
}

impl Prepared<'_> {
    fn run_block(&self, config: &SimulationConfig, block: u64) -> Tally {
        let start = block * BLOCK_SIZE;
        let len = BLOCK_SIZE.min(config.iterations - start);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(block);

        let s = self.scenario;
        let split = s.channel.split;
        let mut tally = Tally::default();
        for _ in 0..len {
            let r = draw_distance(s.network.density, &config.sampling, &mut rng, &mut tally.window_redraws);
            let geom = s.network.geometry(r);
            let received = s.channel.received_power(&geom);
            let fade = s.turbulence.sample(s.turbulence.variance_at(&geom), &mut rng);

            let harvested = (1.0 - split) * received;
            let energy_ok = fade * harvested > self.consumed;
            let snr_ok = s.receiver.responsivity * fade * split * received / self.noise_scale > s.snr_threshold;
            tally.energy_no_turbulence += u64::from(harvested > self.consumed);
            tally.energy += u64::from(energy_ok);
            tally.snr += u64::from(snr_ok);
            tally.joint += u64::from(energy_ok && snr_ok);
        }
        tally
    }
}

fn prepare<'a>(scenario: &'a Scenario, config: &SimulationConfig) -> Result<Prepared<'a>> {
    scenario.validate()?;
    config.validate(&scenario.network)?;
    Ok(Prepared {
        scenario,
        consumed: scenario.power.total_consumed_power()?,
        noise_scale: scenario.receiver.noise_power_scale(),
    })
}

fn block_count(config: &SimulationConfig) -> u64 {
    config.iterations.div_ceil(BLOCK_SIZE)
}

/// Runs the simulation on the calling thread.
pub fn simulate_sequential(scenario: &Scenario, config: &SimulationConfig) -> Result<SimulationOutcome> {
    let prepared = prepare(scenario, config)?;
    let tally = (0..block_count(config))
        .map(|b| prepared.run_block(config, b))
        .fold(Tally::default(), Tally::merge);
    Ok(SimulationOutcome {
        tally,
        iterations: config.iterations,
        seed: config.seed,
    })
}

/// Runs the simulation, spreading blocks over the current rayon pool when the
/// `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn simulate(scenario: &Scenario, config: &SimulationConfig) -> Result<SimulationOutcome> {
    use rayon::prelude::*;

    let prepared = prepare(scenario, config)?;
    let tally = (0..block_count(config))
        .into_par_iter()
        .map(|b| prepared.run_block(config, b))
        .reduce(Tally::default, Tally::merge);
    Ok(SimulationOutcome {
        tally,
        iterations: config.iterations,
        seed: config.seed,
    })
}

#[cfg(not(feature = "parallel"))]
pub fn simulate(scenario: &Scenario, config: &SimulationConfig) -> Result<SimulationOutcome> {
    simulate_sequential(scenario, config)
}

/// Monte Carlo estimate of a single metric.
pub fn estimate_coverage(
    scenario: &Scenario,
    metric: Metric,
    config: &SimulationConfig,
) -> Result<CoverageEstimate> {
    Ok(simulate(scenario, config)?.estimate(metric))
}
