//! Free-space optical link budget and atmospheric scintillation models.

use std::io::Read;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::std_normal_cdf;

/// Below this variance the Log-Normal fade is treated as the constant 1.
pub const MIN_SCINTILLATION_VARIANCE: f64 = 1e-12;

/// Link-budget constants of the laser beam director to UAV channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoChannelParams {
    /// LBD transmit power (W).
    pub p_trans: f64,
    /// Product of harvester efficiency, receiver aperture area and optical
    /// efficiency (m^2).
    pub aperture_efficiency: f64,
    /// Initial beam size D (m).
    pub beam_size: f64,
    /// Angular spread of the beam (rad).
    pub angular_spread: f64,
    /// Attenuation coefficient of the medium (1/m).
    pub attenuation: f64,
    /// Fraction of received power routed to the information stream.
    pub split: f64,
}

impl Default for FsoChannelParams {
    fn default() -> Self {
        Self {
            p_trans: 600.0,
            aperture_efficiency: 0.004,
            beam_size: 0.1,
            angular_spread: 3.4e-5,
            attenuation: 1e-6,
            split: 1e-5,
        }
    }
}

impl FsoChannelParams {
    pub fn validate(&self) -> Result<()> {
        positive("p_trans", self.p_trans)?;
        positive("aperture_efficiency", self.aperture_efficiency)?;
        positive("beam_size", self.beam_size)?;
        positive("angular_spread", self.angular_spread)?;
        if !(self.attenuation >= 0.0) || !self.attenuation.is_finite() {
            return Err(Error::invalid("attenuation", "must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.split) {
            return Err(Error::invalid("split_delta_s", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Received optical power over a slant path of length `d` (m), before
    /// power splitting.
    pub fn received_power_at_slant(&self, d: f64) -> f64 {
        let spread = self.beam_size + d * self.angular_spread;
        self.aperture_efficiency * self.p_trans * (-self.attenuation * d).exp() / (spread * spread)
    }

    /// Total optical power reaching the UAV from the serving LBD.
    pub fn received_power(&self, geom: &Geometry) -> f64 {
        self.received_power_at_slant(geom.path_length())
    }

    /// Power routed to the harvester, `(1 - split)` of the received power.
    pub fn harvested_power(&self, geom: &Geometry) -> f64 {
        (1.0 - self.split) * self.received_power(geom)
    }

    /// Power routed to the photodetector, `split` of the received power.
    pub fn information_power(&self, geom: &Geometry) -> f64 {
        self.split * self.received_power(geom)
    }
}

/// Position of the UAV relative to its serving LBD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub altitude: f64,
    pub horizontal_distance: f64,
}

impl Geometry {
    pub fn new(altitude: f64, horizontal_distance: f64) -> Result<Self> {
        positive("altitude", altitude)?;
        if !(horizontal_distance >= 0.0) {
            return Err(Error::invalid("horizontal_distance", "must be >= 0"));
        }
        Ok(Self {
            altitude,
            horizontal_distance,
        })
    }

    /// Slant distance between the UAV and the LBD.
    pub fn path_length(&self) -> f64 {
        self.horizontal_distance.hypot(self.altitude)
    }
}

/// Which distance enters the scintillation variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScintillationPath {
    /// Horizontal distance between the UAV projection and the LBD.
    #[default]
    Horizontal,
    /// Slant UAV-LBD distance.
    Slant,
}

impl ScintillationPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScintillationPath::Horizontal => "horizontal",
            ScintillationPath::Slant => "slant",
        }
    }
}

/// Parameters of the weak-turbulence Log-Normal fade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalTurbulence {
    /// Refractive-index structure parameter at the UAV altitude (m^-2/3).
    pub cn2: f64,
    /// Optical wavenumber (1/m).
    pub wavenumber: f64,
    pub path: ScintillationPath,
}

impl LogNormalTurbulence {
    pub fn validate(&self) -> Result<()> {
        positive("cn2", self.cn2)?;
        positive("wavenumber", self.wavenumber)
    }

    /// Variance parameter for a UAV at `geom`; zero when the relevant distance
    /// is zero.
    pub fn variance_at(&self, geom: &Geometry) -> f64 {
        let distance = match self.path {
            ScintillationPath::Horizontal => geom.horizontal_distance,
            ScintillationPath::Slant => geom.path_length(),
        };
        if distance > 0.0 {
            0.3 * self.wavenumber.powf(7.0 / 6.0) * self.cn2 * distance.powf(11.0 / 6.0)
        } else {
            0.0
        }
    }
}

/// `sigma^2 = 0.3 k^(7/6) Cn^2 r^(11/6)`.
pub fn scintillation_variance(turbulence: &LogNormalTurbulence, distance: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::Domain {
            what: "scintillation_variance",
            value: distance,
        });
    }
    Ok(0.3 * turbulence.wavenumber.powf(7.0 / 6.0) * turbulence.cn2 * distance.powf(11.0 / 6.0))
}

/// Empirical fade distribution given as a piecewise-linear CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    points: Vec<(f64, f64)>,
}

impl TabulatedCdf {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Tabulated("need at least two grid points".into()));
        }
        for (i, &(h, f)) in points.iter().enumerate() {
            if !(h >= 0.0) || !h.is_finite() {
                return Err(Error::Tabulated(format!("row {}: h = {h} must be finite and >= 0", i + 1)));
            }
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Tabulated(format!("row {}: F = {f} outside [0, 1]", i + 1)));
            }
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Tabulated(format!("row {}: h is not strictly increasing", i + 2)));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::Tabulated(format!("row {}: F decreases", i + 2)));
            }
        }
        if points.last().map(|p| p.1) != Some(1.0) {
            return Err(Error::Tabulated("last F value must equal 1".into()));
        }
        Ok(Self { points })
    }

    /// Reads a two-column `h,F` CSV with a header row.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut points = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Tabulated(e.to_string()))?;
            if record.len() != 2 {
                return Err(Error::Tabulated(format!(
                    "row {}: expected 2 columns, found {}",
                    i + 1,
                    record.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Tabulated(format!("row {}: cannot parse `{s}`", i + 1)))
            };
            points.push((parse(&record[0])?, parse(&record[1])?));
        }
        Self::new(points)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Tabulated(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn cdf(&self, h: f64) -> f64 {
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        if h < first.0 {
            return 0.0;
        }
        if h >= last.0 {
            return 1.0;
        }
        let idx = self.points.partition_point(|p| p.0 <= h);
        let (h0, f0) = self.points[idx - 1];
        let (h1, f1) = self.points[idx];
        f0 + (f1 - f0) * (h - h0) / (h1 - h0)
    }

    /// Generalised inverse of [`cdf`](Self::cdf) for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let first = self.points[0];
        if u <= first.1 {
            return first.0;
        }
        let idx = self.points.partition_point(|p| p.1 < u);
        let idx = idx.min(self.points.len() - 1);
        let (h0, f0) = self.points[idx - 1];
        let (h1, f1) = self.points[idx];
        if f1 == f0 {
            return h1;
        }
        h0 + (h1 - h0) * (u - f0) / (f1 - f0)
    }
}

/// Distribution of the multiplicative turbulence fade `h_t`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum TurbulenceModel {
    /// No turbulence: `h_t = 1`.
    #[default]
    None,
    /// `ln h_t ~ Normal(-2 sigma^2, 4 sigma^2)`, unit mean.
    LogNormal(LogNormalTurbulence),
    TabulatedCdf(TabulatedCdf),
}

impl TurbulenceModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            TurbulenceModel::LogNormal(ln) => ln.validate(),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TurbulenceModel::None => "none",
            TurbulenceModel::LogNormal(_) => "lognormal",
            TurbulenceModel::TabulatedCdf(_) => "tabulated",
        }
    }

    /// Variance parameter at `geom`; zero for models without one.
    pub fn variance_at(&self, geom: &Geometry) -> f64 {
        match self {
            TurbulenceModel::LogNormal(ln) => ln.variance_at(geom),
            _ => 0.0,
        }
    }

    /// `P(h_t <= h)`. `sigma2` is used by the Log-Normal variant only.
    pub fn cdf(&self, sigma2: f64, h: f64) -> f64 {
        match self {
            TurbulenceModel::None => step_at_one(h),
            TurbulenceModel::LogNormal(_) => {
                if sigma2 < MIN_SCINTILLATION_VARIANCE {
                    return step_at_one(h);
                }
                if h <= 0.0 {
                    return 0.0;
                }
                let sigma = sigma2.sqrt();
                std_normal_cdf((h.ln() + 2.0 * sigma2) / (2.0 * sigma))
            }
            TurbulenceModel::TabulatedCdf(t) => t.cdf(h),
        }
    }

    /// `P(h_t > h)`, evaluated on the upper tail directly so that small
    /// exceedance probabilities keep their relative precision.
    pub fn exceedance(&self, sigma2: f64, h: f64) -> f64 {
        match self {
            TurbulenceModel::LogNormal(_) if sigma2 >= MIN_SCINTILLATION_VARIANCE => {
                if h <= 0.0 {
                    return 1.0;
                }
                let sigma = sigma2.sqrt();
                std_normal_cdf(-(h.ln() + 2.0 * sigma2) / (2.0 * sigma))
            }
            _ => 1.0 - self.cdf(sigma2, h),
        }
    }

    /// Draws one fade value.
    pub fn sample<R: Rng + ?Sized>(&self, sigma2: f64, rng: &mut R) -> f64 {
        match self {
            TurbulenceModel::None => 1.0,
            TurbulenceModel::LogNormal(_) => {
                if sigma2 < MIN_SCINTILLATION_VARIANCE {
                    return 1.0;
                }
                let z: f64 = rng.sample(StandardNormal);
                (-2.0 * sigma2 + 2.0 * sigma2.sqrt() * z).exp()
            }
            TurbulenceModel::TabulatedCdf(t) => t.quantile(rng.random::<f64>()),
        }
    }
}

fn step_at_one(h: f64) -> f64 {
    if h >= 1.0 {
        1.0
    } else {
        0.0
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}
