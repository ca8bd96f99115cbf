//! Special functions and quadrature shared by the analytic coverage routines.

mod lambert;
mod normal;
mod quadrature;

pub use lambert::{lambert_w0, lambert_w0_from_ln};
pub use normal::std_normal_cdf;
pub use quadrature::{
    integrate_adaptive, integrate_expectation_over_nearest_distance,
    integrate_expectation_over_nearest_distance_split, QuadratureSpec,
    NEAREST_DISTANCE_U_MAX,
};
