//! Analytic coverage probabilities for a UAV served by its nearest LBD.
//!
//! The LBDs form a homogeneous planar Poisson process, so the horizontal
//! distance `R` to the serving LBD has density `2 pi lambda r exp(-lambda pi r^2)`.
//! Every metric below is an expectation over that law of the conditional
//! coverage probability given `R = r`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::channel::{FsoChannelParams, Geometry, LogNormalTurbulence, ScintillationPath, TurbulenceModel};
use crate::error::{Error, Result};
use crate::numerics::{integrate_expectation_over_nearest_distance_split, lambert_w0_from_ln, QuadratureSpec};
use crate::power::UavPowerModel;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Density search interval for [`required_density`] (LBDs per m^2).
pub const DENSITY_BRACKET: (f64, f64) = (1e-12, 1e-2);
const DENSITY_MAX_ITER: usize = 200;
const DENSITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkModel {
    /// LBDs per m^2.
    pub density: f64,
    /// UAV altitude (m).
    pub altitude: f64,
}

impl NetworkModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.density > 0.0) || !self.density.is_finite() {
            return Err(Error::invalid("lbd_density", "must be finite and > 0"));
        }
        if !(self.altitude > 0.0) || !self.altitude.is_finite() {
            return Err(Error::invalid("altitude", "must be finite and > 0"));
        }
        Ok(())
    }

    pub fn geometry(&self, horizontal_distance: f64) -> Geometry {
        Geometry {
            altitude: self.altitude,
            horizontal_distance,
        }
    }
}

/// Shot-noise-limited photodetector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverParams {
    /// Photodiode responsivity (A/W).
    pub responsivity: f64,
    /// Optical wavelength (m).
    pub wavelength: f64,
    /// Modulation bandwidth (Hz).
    pub bandwidth: f64,
}

impl Default for ReceiverParams {
    fn default() -> Self {
        Self {
            responsivity: 0.5,
            wavelength: 0.785e-6,
            bandwidth: 1e9,
        }
    }
}

impl ReceiverParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("responsivity", self.responsivity),
            ("wavelength", self.wavelength),
            ("bandwidth", self.bandwidth),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Photon energy `h c / lambda` (J).
    pub fn photon_energy(&self) -> f64 {
        PLANCK * SPEED_OF_LIGHT / self.wavelength
    }

    /// Shot-noise denominator `2 h nu df` (W).
    pub fn noise_power_scale(&self) -> f64 {
        2.0 * self.photon_energy() * self.bandwidth
    }

    /// SNR for `information_power` watts reaching the detector with fade `h_t`.
    pub fn snr(&self, information_power: f64, fade: f64) -> f64 {
        self.responsivity * fade * information_power / self.noise_power_scale()
    }
}

/// Complete experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: NetworkModel,
    pub channel: FsoChannelParams,
    pub turbulence: TurbulenceModel,
    pub receiver: ReceiverParams,
    pub power: UavPowerModel,
    /// Linear SNR threshold.
    pub snr_threshold: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        let receiver = ReceiverParams::default();
        Self {
            network: NetworkModel {
                density: 1e-6,
                altitude: 100.0,
            },
            channel: FsoChannelParams::default(),
            turbulence: TurbulenceModel::LogNormal(LogNormalTurbulence {
                cn2: 0.5e-14,
                wavenumber: 2.0 * PI / receiver.wavelength,
                path: ScintillationPath::Horizontal,
            }),
            receiver,
            power: UavPowerModel::default(),
            snr_threshold: 1e5,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.channel.validate()?;
        self.turbulence.validate()?;
        self.receiver.validate()?;
        self.power.validate()?;
        if !(self.snr_threshold > 0.0) || !self.snr_threshold.is_finite() {
            return Err(Error::invalid("snr_threshold", "must be finite and > 0"));
        }
        Ok(())
    }

    pub fn with_density(&self, density: f64) -> Self {
        let mut s = self.clone();
        s.network.density = density;
        s
    }

    /// Received-power level `h_t p_rec` needed to meet consumption.
    fn energy_threshold(&self) -> Result<f64> {
        Ok(self.power.total_consumed_power()? / (1.0 - self.channel.split))
    }

    /// Received-power level `h_t p_rec` needed to reach the SNR threshold.
    fn snr_threshold_power(&self) -> f64 {
        self.receiver.noise_power_scale() * self.snr_threshold
            / (self.channel.split * self.receiver.responsivity)
    }
}

/// Coverage metric selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// Energy coverage with the fade forced to 1.
    EnergyNoTurbulence,
    Energy,
    Snr,
    Joint,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::EnergyNoTurbulence,
        Metric::Energy,
        Metric::Snr,
        Metric::Joint,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::EnergyNoTurbulence => "energy_no_turbulence",
            Metric::Energy => "energy",
            Metric::Snr => "snr",
            Metric::Joint => "joint",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "energy_no_turbulence" | "energy_noturb" => Ok(Metric::EnergyNoTurbulence),
            "energy" => Ok(Metric::Energy),
            "snr" => Ok(Metric::Snr),
            "joint" => Ok(Metric::Joint),
            other => Err(format!(
                "unknown metric `{other}` (expected energy_no_turbulence, energy, snr or joint)"
            )),
        }
    }
}

/// Outcome of the critical-radius computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalRadius {
    /// Largest horizontal distance (m) at which harvested power still meets
    /// consumption.
    Radius(f64),
    /// Harvested power falls short even directly overhead.
    NoCoverage,
    /// Zero consumption: any distance is covered.
    Unbounded,
}

impl CriticalRadius {
    pub fn radius(&self) -> Option<f64> {
        match self {
            CriticalRadius::Radius(r) => Some(*r),
            _ => None,
        }
    }
}

/// Critical horizontal distance beyond which the noiseless harvested power no
/// longer covers propulsion plus payload.
///
/// With attenuation the slant distance solves `X^2 exp(zX) = C` for
/// `X = D + d dtheta`, `z = alpha/dtheta`, giving
/// `d* = (2/alpha) W0((alpha / (2 dtheta)) sqrt(C)) - D/dtheta`. The Lambert W
/// argument is assembled in log space. Without attenuation the inverse-square
/// law is inverted directly.
pub fn critical_radius(scenario: &Scenario) -> Result<CriticalRadius> {
    scenario.validate()?;
    let ch = &scenario.channel;
    let consumed = scenario.power.total_consumed_power()?;
    let harvest_scale = (1.0 - ch.split) * ch.aperture_efficiency * ch.p_trans;
    if harvest_scale <= 0.0 {
        return Ok(CriticalRadius::NoCoverage);
    }
    if consumed == 0.0 {
        return Ok(CriticalRadius::Unbounded);
    }

    let h = scenario.network.altitude;
    Ok(match horizontal_radius_at_power(ch, h, harvest_scale, consumed)? {
        Some(r) => CriticalRadius::Radius(r),
        None => CriticalRadius::NoCoverage,
    })
}

/// Horizontal distance at which `scale * exp(-alpha d) / (D + d dtheta)^2`
/// falls to `target`, or `None` when it is already below `target` overhead.
fn horizontal_radius_at_power(
    ch: &FsoChannelParams,
    altitude: f64,
    scale: f64,
    target: f64,
) -> Result<Option<f64>> {
    let slant = if ch.attenuation > 0.0 {
        let z = ch.attenuation / ch.angular_spread;
        let ln_c = scale.ln() + z * ch.beam_size - target.ln();
        let ln_arg = (0.5 * z).ln() + 0.5 * ln_c;
        let w = lambert_w0_from_ln(ln_arg)?;
        2.0 / ch.attenuation * w - ch.beam_size / ch.angular_spread
    } else {
        ((scale / target).sqrt() - ch.beam_size) / ch.angular_spread
    };
    if !(slant > altitude) {
        return Ok(None);
    }
    Ok(Some(((slant - altitude) * (slant + altitude)).sqrt()))
}

/// Energy coverage without turbulence: `1 - exp(-lambda pi R*^2)`.
pub fn energy_coverage_no_turbulence(scenario: &Scenario) -> Result<f64> {
    Ok(match critical_radius(scenario)? {
        CriticalRadius::Radius(r) => -(-scenario.network.density * PI * r * r).exp_m1(),
        CriticalRadius::NoCoverage => 0.0,
        CriticalRadius::Unbounded => 1.0,
    })
}

/// Energy coverage averaged over the scenario's turbulence model.
///
/// Conditional on `R = r` the UAV is covered when `h_t > a(r)` with
/// `a(r) = (p_prop + p_comm) / p_harv(r)`.
pub fn energy_coverage(scenario: &Scenario, spec: &QuadratureSpec) -> Result<f64> {
    scenario.validate()?;
    if scenario.channel.split >= 1.0 {
        return Ok(0.0);
    }
    let threshold = scenario.energy_threshold()?;
    conditional_exceedance_average(scenario, threshold, spec)
}

/// SNR coverage: `P(delta_s eta h_t p_rec(R) / (2 h nu df) > beta)`.
pub fn snr_coverage(scenario: &Scenario, spec: &QuadratureSpec) -> Result<f64> {
    scenario.validate()?;
    if scenario.channel.split == 0.0 {
        return Ok(0.0);
    }
    conditional_exceedance_average(scenario, scenario.snr_threshold_power(), spec)
}

/// `E_R[ P(h_t p_rec(R) > threshold | R) ]`.
fn conditional_exceedance_average(
    scenario: &Scenario,
    threshold: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let ch = &scenario.channel;
    let turbulence = &scenario.turbulence;
    let network = scenario.network;
    let g = |r: f64| {
        let geom = network.geometry(r);
        let level = threshold / ch.received_power(&geom);
        turbulence.exceedance(turbulence.variance_at(&geom), level)
    };
    // Without turbulence g is an indicator that drops at this radius; with
    // turbulence the transition is centred near it.
    let scale = ch.aperture_efficiency * ch.p_trans;
    let transition = if threshold > 0.0 && scale > 0.0 {
        horizontal_radius_at_power(ch, network.altitude, scale, threshold)?
    } else {
        None
    };
    let splits: Vec<f64> = transition.into_iter().collect();
    integrate_expectation_over_nearest_distance_split(g, network.density, &splits, spec)
}

/// Ratio of the energy and SNR received-power thresholds:
/// `eta delta_s (p_prop + p_comm) / (2 h nu df beta (1 - delta_s))`.
///
/// Returns `f64::INFINITY` when `delta_s = 1`.
pub fn k_factor(scenario: &Scenario) -> Result<f64> {
    scenario.validate()?;
    let split = scenario.channel.split;
    if split >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let consumed = scenario.power.total_consumed_power()?;
    Ok(scenario.receiver.responsivity * split * consumed
        / (scenario.receiver.noise_power_scale() * scenario.snr_threshold * (1.0 - split)))
}

/// Joint energy and SNR coverage. Both events compare the same quantity
/// `h_t p_rec(R)` against a threshold, so the joint event is whichever of the
/// two has the larger threshold.
pub fn joint_coverage(scenario: &Scenario, spec: &QuadratureSpec) -> Result<f64> {
    if k_factor(scenario)? > 1.0 {
        energy_coverage(scenario, spec)
    } else {
        snr_coverage(scenario, spec)
    }
}

pub fn coverage(scenario: &Scenario, metric: Metric, spec: &QuadratureSpec) -> Result<f64> {
    match metric {
        Metric::EnergyNoTurbulence => energy_coverage_no_turbulence(scenario),
        Metric::Energy => energy_coverage(scenario, spec),
        Metric::Snr => snr_coverage(scenario, spec),
        Metric::Joint => joint_coverage(scenario, spec),
    }
}

/// Smallest LBD density (per m^2) at which `metric` reaches `target`.
///
/// Closed form for [`Metric::EnergyNoTurbulence`]; otherwise bisection in
/// `log(lambda)` over [`DENSITY_BRACKET`]. The scenario's own density is
/// ignored.
pub fn required_density(
    scenario: &Scenario,
    target: f64,
    metric: Metric,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid("target", format!("must lie in (0, 1), got {target}")));
    }
    scenario.validate()?;

    let energy_without_fading = metric == Metric::EnergyNoTurbulence
        || (metric == Metric::Energy && scenario.turbulence == TurbulenceModel::None);
    if energy_without_fading {
        return match critical_radius(scenario)? {
            CriticalRadius::Radius(r) => Ok(-(-target).ln_1p() / (PI * r * r)),
            CriticalRadius::NoCoverage => Err(Error::Uncoverable),
            CriticalRadius::Unbounded => Err(Error::invalid(
                "p_prop + p_comm",
                "zero consumption is covered at every density",
            )),
        };
    }

    let eval = |log_lambda: f64| coverage(&scenario.with_density(log_lambda.exp()), metric, spec);
    let (mut lo, mut hi) = (DENSITY_BRACKET.0.ln(), DENSITY_BRACKET.1.ln());
    let f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if f_hi == 0.0 {
        return Err(Error::Uncoverable);
    }
    if !(f_lo <= target && target <= f_hi) {
        return Err(Error::Bracket {
            lo: DENSITY_BRACKET.0,
            hi: DENSITY_BRACKET.1,
            f_lo,
            f_hi,
            target,
        });
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..DENSITY_MAX_ITER {
        mid = 0.5 * (lo + hi);
        let f_mid = eval(mid)?;
        if (f_mid - target).abs() <= DENSITY_TOL || hi - lo < 1e-14 {
            break;
        }
        if f_mid < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid.exp())
}
