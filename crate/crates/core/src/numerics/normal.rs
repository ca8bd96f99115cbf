use std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal cumulative distribution function.
///
/// Evaluated through the complementary error function so that both tails keep
/// full relative precision.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    (0.5 * libm::erfc(-z * FRAC_1_SQRT_2)).clamp(0.0, 1.0)
}
