//! Energy, SNR and joint coverage of a laser-powered UAV served by the
//! nearest laser beam director (LBD) of a planar Poisson network.
//!
//! [`coverage`] holds the analytic routes (closed form and quadrature),
//! [`montecarlo`] the simulation used to validate them.

// Validation uses `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod coverage;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod power;

pub use channel::{FsoChannelParams, Geometry, LogNormalTurbulence, ScintillationPath, TabulatedCdf, TurbulenceModel};
pub use coverage::{CriticalRadius, Metric, NetworkModel, ReceiverParams, Scenario};
pub use error::{Error, Result};
pub use montecarlo::{CoverageEstimate, Sampling, SimulationConfig};
pub use numerics::QuadratureSpec;
pub use power::{FixedWingParams, Propulsion, RotaryWingParams, UavPowerModel};
