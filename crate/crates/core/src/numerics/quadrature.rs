use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Truncation point of the `u = lambda * pi * r^2` substitution. The neglected
/// tail mass is `exp(-30) < 1e-13`.
pub const NEAREST_DISTANCE_U_MAX: f64 = 30.0;

/// Initial partition of `[0, U_MAX]`. Geometric near zero so that integrands
/// supported only on a tiny neighbourhood of `u = 0` are still sampled.
const NEAREST_DISTANCE_BREAKS: [f64; 13] = [
    0.0, 1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, NEAREST_DISTANCE_U_MAX,
];

/// Controls for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub max_subdivisions: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            max_subdivisions: 2000,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn new(max_subdivisions: usize, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let spec = Self {
            max_subdivisions,
            abs_tol,
            rel_tol,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be positive"));
        }
        if !(self.abs_tol >= 0.0) || !(self.rel_tol >= 0.0) {
            return Err(Error::invalid("abs_tol/rel_tol", "tolerances must be >= 0"));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::invalid("abs_tol/rel_tol", "tolerances cannot both be zero"));
        }
        Ok(())
    }
}

// 21-point Gauss-Kronrod rule (QUADPACK qk21). Gauss nodes sit at the odd
// indices of XGK.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = WGK[10] * f_center;
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, error }
}

/// Globally adaptive 21-point Gauss-Kronrod integration over the intervals
/// delimited by `breaks` (ascending, at least two points).
///
/// The panel with the largest error estimate is bisected until the summed
/// error drops below `max(abs_tol, rel_tol * |I|)` or the panel budget runs out.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("breaks", "need two or more ascending points"));
    }
    let mut heap: BinaryHeap<Panel> = breaks
        .windows(2)
        .map(|w| gauss_kronrod_21(&f, w[0], w[1]))
        .collect();
    let mut panels = heap.len();
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature {
                estimate: total,
                error_estimate: error,
                subdivisions: panels,
            });
        }
        if error <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels >= spec.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total,
                error_estimate: error,
                subdivisions: panels,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel can no longer be split in floating point: accept it as is.
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        heap.push(gauss_kronrod_21(&f, worst.a, mid));
        heap.push(gauss_kronrod_21(&f, mid, worst.b));
        panels += 1;
    }
}

/// Expectation of `g(R)` where `R` is the distance from the origin to the
/// nearest point of a planar Poisson process with intensity `density`:
/// `int_0^inf g(r) 2 pi lambda r exp(-lambda pi r^2) dr`.
///
/// Computed after the substitution `u = lambda pi r^2`, which turns the weight
/// into `exp(-u)`; the integral is truncated at [`NEAREST_DISTANCE_U_MAX`] and
/// the result clamped to `[0, 1]`.
pub fn integrate_expectation_over_nearest_distance<G: Fn(f64) -> f64>(
    g: G,
    density: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate_expectation_over_nearest_distance_split(g, density, &[], spec)
}

/// As [`integrate_expectation_over_nearest_distance`], with extra panel
/// boundaries at the radii in `split_radii`. Use it when `g` jumps or turns
/// sharply at a known radius: the error estimate of a single Gauss-Kronrod
/// panel straddling a jump can be badly optimistic.
pub fn integrate_expectation_over_nearest_distance_split<G: Fn(f64) -> f64>(
    g: G,
    density: f64,
    split_radii: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(density > 0.0) || !density.is_finite() {
        return Err(Error::invalid("density", format!("must be positive, got {density}")));
    }
    let mut breaks = NEAREST_DISTANCE_BREAKS.to_vec();
    for &r in split_radii {
        let u = density * PI * r * r;
        if u.is_finite() && u > 0.0 && u < NEAREST_DISTANCE_U_MAX {
            breaks.push(u);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|b, a| *b - *a <= 1e-12 * a.abs().max(1e-300));
    let scale = 1.0 / (density * PI);
    let integrand = |u: f64| g((u * scale).sqrt()) * (-u).exp();
    integrate_adaptive(integrand, &breaks, spec).map(|v| v.clamp(0.0, 1.0))
}
