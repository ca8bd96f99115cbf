use std::io::{self, Write};

use laser_uav::coverage::{self, Metric};
use laser_uav::{Error as CoreError, QuadratureSpec, Scenario};

use crate::manifest::RunManifest;

/// Square metres in 10 km^2.
const TEN_KM2: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    pub metric: Metric,
    pub target: f64,
    /// LBDs per m^2.
    pub density: f64,
}

impl DensityReport {
    pub fn lbds_per_10km2(&self) -> f64 {
        self.density * TEN_KM2
    }

    pub fn write<W: Write>(&self, w: &mut W, manifest: &RunManifest) -> io::Result<()> {
        manifest.write_header(w)?;
        writeln!(w, "metric,target,density_per_m2,lbds_per_10km2")?;
        writeln!(
            w,
            "{},{},{:e},{:.4}",
            self.metric,
            self.target,
            self.density,
            self.lbds_per_10km2()
        )
    }
}

pub fn run_density_design(
    scenario: &Scenario,
    target: f64,
    metric: Metric,
    spec: &QuadratureSpec,
) -> Result<DensityReport, CoreError> {
    let density = coverage::required_density(scenario, target, metric, spec)?;
    Ok(DensityReport {
        metric,
        target,
        density,
    })
}
