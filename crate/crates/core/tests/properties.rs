use std::f64::consts::{E, PI};

use laser_uav::coverage::{self, CriticalRadius, Metric};
use laser_uav::numerics::{integrate_expectation_over_nearest_distance_split, lambert_w0, std_normal_cdf};
use laser_uav::{
    FsoChannelParams, LogNormalTurbulence, NetworkModel, Propulsion, QuadratureSpec, Scenario, ScintillationPath,
    TurbulenceModel, UavPowerModel,
};
use proptest::prelude::*;

fn channel_strategy() -> impl Strategy<Value = FsoChannelParams> {
    (
        100.0..3000.0f64,
        1e-3..1e-2f64,
        0.02..0.3f64,
        -5.0..-3.5f64,
        prop_oneof![Just(0.0), (-8.0..-4.0f64).prop_map(|e| 10f64.powf(e))],
        -7.0..-0.5f64,
    )
        .prop_map(|(p_trans, ap, d, log_spread, alpha, log_split)| FsoChannelParams {
            p_trans,
            aperture_efficiency: ap,
            beam_size: d,
            angular_spread: 10f64.powf(log_spread),
            attenuation: alpha,
            split: 10f64.powf(log_split),
        })
}

fn scenario_strategy() -> impl Strategy<Value = Scenario> {
    (channel_strategy(), 30.0..400.0f64, 5.0..300.0f64, 0.0..50.0f64).prop_map(|(channel, h, p_prop, p_comm)| {
        Scenario {
            network: NetworkModel { density: 1e-6, altitude: h },
            channel,
            turbulence: TurbulenceModel::None,
            power: UavPowerModel { propulsion: Propulsion::FixedDraw(p_prop), p_comm },
            ..Default::default()
        }
    })
}

/// Root of harvested power = consumption by bisection on r.
fn bisect_radius(s: &Scenario) -> f64 {
    let target = s.power.total_consumed_power().unwrap();
    let f = |r: f64| s.channel.harvested_power(&s.network.geometry(r)) - target;
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lambert_residual(t in -9.0..10.0f64) {
        let x = -1.0 / E + 10f64.powf(t);
        let w = lambert_w0(x).unwrap();
        prop_assert!(w >= -1.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn lambert_monotone(a in -0.36..1e6f64, b in -0.36..1e6f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(lambert_w0(lo).unwrap() <= lambert_w0(hi).unwrap());
    }

    #[test]
    fn normal_cdf_symmetry(z in -10.0..10.0f64) {
        prop_assert!((std_normal_cdf(z) + std_normal_cdf(-z) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn indicator_integral(r0 in 1.0..1e5f64, log_lambda in -10.0..-3.0f64) {
        let lambda = 10f64.powf(log_lambda);
        let v = integrate_expectation_over_nearest_distance_split(
            |r| if r <= r0 { 1.0 } else { 0.0 },
            lambda,
            &[r0],
            &QuadratureSpec::default(),
        ).unwrap();
        let exact = -(-lambda * PI * r0 * r0).exp_m1();
        prop_assert!((v - exact).abs() <= 1e-8, "{} vs {}", v, exact);
    }

    #[test]
    fn received_power_decreasing(channel in channel_strategy(), h in 10.0..500.0f64) {
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let g = NetworkModel { density: 1e-6, altitude: h }.geometry(i as f64 * 50.0);
            let p = channel.received_power(&g);
            prop_assert!(p > 0.0 && p < prev);
            prev = p;
        }
    }

    #[test]
    fn split_conserves_power(channel in channel_strategy(), r in 0.0..1e4f64) {
        let g = NetworkModel { density: 1e-6, altitude: 100.0 }.geometry(r);
        let total = channel.received_power(&g);
        let parts = channel.harvested_power(&g) + channel.information_power(&g);
        prop_assert!((parts - total).abs() <= 4.0 * f64::EPSILON * total);
    }

    #[test]
    fn critical_radius_root(s in scenario_strategy()) {
        if let CriticalRadius::Radius(r) = coverage::critical_radius(&s).unwrap() {
            let consumed = s.power.total_consumed_power().unwrap();
            let p = s.channel.harvested_power(&s.network.geometry(r));
            prop_assert!((p - consumed).abs() / consumed <= 1e-9);
            let oracle = bisect_radius(&s);
            prop_assert!((r - oracle).abs() <= 1e-6 * oracle.max(1e-3));
        } else {
            // Not coverable: even overhead harvest is insufficient.
            let consumed = s.power.total_consumed_power().unwrap();
            prop_assert!(s.channel.harvested_power(&s.network.geometry(0.0)) <= consumed * (1.0 + 1e-9));
        }
    }

    #[test]
    fn joint_is_binding_metric(s in scenario_strategy(), log_beta in 2.0..8.0f64, turbulent in any::<bool>()) {
        let mut s = s;
        s.snr_threshold = 10f64.powf(log_beta);
        if turbulent {
            s.turbulence = TurbulenceModel::LogNormal(LogNormalTurbulence {
                cn2: 1e-14,
                wavenumber: 8e6,
                path: ScintillationPath::Horizontal,
            });
        }
        let spec = QuadratureSpec::default();
        let joint = coverage::joint_coverage(&s, &spec).unwrap();
        let expected = if coverage::k_factor(&s).unwrap() > 1.0 {
            coverage::energy_coverage(&s, &spec).unwrap()
        } else {
            coverage::snr_coverage(&s, &spec).unwrap()
        };
        prop_assert_eq!(joint, expected);
        let e = coverage::energy_coverage(&s, &spec).unwrap();
        let snr = coverage::snr_coverage(&s, &spec).unwrap();
        prop_assert!(joint <= e.min(snr) + 1e-9);
    }
}

#[test]
fn quadrature_matches_closed_form_grid() {
    let s = Scenario { turbulence: TurbulenceModel::None, ..Default::default() };
    let spec = QuadratureSpec::default();
    for i in 0..=30 {
        let lambda = 1e-8 * 10f64.powf(i as f64 / 10.0);
        let s = s.with_density(lambda);
        let quad = coverage::energy_coverage(&s, &spec).unwrap();
        let closed = coverage::energy_coverage_no_turbulence(&s).unwrap();
        assert!((quad - closed).abs() <= 1e-8, "lambda {lambda}: {quad} vs {closed}");
    }
}

#[test]
fn coverage_monotone_in_density() {
    let spec = QuadratureSpec::default();
    let base = Scenario::default();
    for metric in Metric::ALL {
        let mut prev = 0.0;
        for i in 0..=40 {
            let lambda = 1e-9 * 10f64.powf(i as f64 / 8.0);
            let v = coverage::coverage(&base.with_density(lambda), metric, &spec).unwrap();
            assert!(v >= prev - 1e-10, "{metric} at {lambda}: {v} < {prev}");
            prev = v;
        }
    }
}

#[test]
fn energy_nonincreasing_in_comm_power() {
    let spec = QuadratureSpec::default();
    let mut prev = 1.0;
    for i in 0..=25 {
        let mut s = Scenario::default();
        s.power.p_comm = i as f64 * 4.0;
        let v = coverage::energy_coverage(&s, &spec).unwrap();
        assert!(v <= prev + 1e-10);
        prev = v;
    }
}

#[test]
fn tabulated_step_matches_no_turbulence() {
    // A CDF jumping from 0 to 1 just above h = 1 reproduces the deterministic case.
    let table = laser_uav::TabulatedCdf::new(vec![(1.0 - 1e-12, 0.0), (1.0, 1.0)]).unwrap();
    let spec = QuadratureSpec::default();
    let base = Scenario { turbulence: TurbulenceModel::TabulatedCdf(table), ..Default::default() };
    let none = Scenario { turbulence: TurbulenceModel::None, ..Default::default() };
    let a = coverage::energy_coverage(&base, &spec).unwrap();
    let b = coverage::energy_coverage(&none, &spec).unwrap();
    assert!((a - b).abs() < 1e-6);
}
