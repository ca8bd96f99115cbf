//! Acceptance suite. Runs every criterion in sequence, prints one PASS/FAIL
//! line each, and exits non-zero if any failed.
//!
//! `cargo test --test acceptance`

use std::f64::consts::{E, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use laser_uav::coverage::{self, CriticalRadius, Metric};
use laser_uav::montecarlo::simulate;
use laser_uav::numerics::{lambert_w0, std_normal_cdf};
use laser_uav::power::propulsion_power_fixed_wing;
use laser_uav::{
    FixedWingParams, FsoChannelParams, LogNormalTurbulence, NetworkModel, Propulsion, QuadratureSpec, Scenario,
    ScintillationPath, SimulationConfig, TurbulenceModel, UavPowerModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_laser-uav");

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("special functions", Duration::from_secs(1), special_functions),
        ("critical radius root", Duration::from_secs(5), critical_radius_root),
        ("analytic vs monte carlo", Duration::from_secs(60), analytic_vs_monte_carlo),
        ("fixed-wing propulsion", Duration::from_secs(1), fixed_wing_propulsion),
        ("density threshold", Duration::from_secs(5), density_threshold),
        ("K crossing", Duration::from_secs(10), k_crossing),
        ("turbulence normalisation", Duration::from_secs(5), turbulence_normalisation),
        ("monotonicity", Duration::from_secs(10), monotonicity),
        ("joint = binding metric", Duration::from_secs(60), joint_structure),
        ("determinism", Duration::from_secs(10), determinism),
    ];

    let mut failed = Vec::new();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let ok = out.passed && in_time;
        let timing = if in_time {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s, over the {}s budget", elapsed.as_secs_f64(), budget.as_secs())
        };
        println!(
            "[{}] criterion {:>2}: {:<26} {} ({timing})",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            name,
            out.detail
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------- scenarios

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn random_channel(rng: &mut ChaCha8Rng) -> FsoChannelParams {
    FsoChannelParams {
        p_trans: rng.random_range(200.0..2000.0),
        aperture_efficiency: rng.random_range(1e-3..1e-2),
        beam_size: rng.random_range(0.05..0.2),
        angular_spread: log_uniform(rng, 1e-5, 1e-4),
        attenuation: if rng.random_bool(0.1) { 0.0 } else { log_uniform(rng, 1e-7, 1e-4) },
        split: log_uniform(rng, 1e-7, 0.5),
    }
}

fn random_turbulence(rng: &mut ChaCha8Rng) -> TurbulenceModel {
    if rng.random_bool(0.25) {
        return TurbulenceModel::None;
    }
    TurbulenceModel::LogNormal(LogNormalTurbulence {
        cn2: log_uniform(rng, 1e-16, 2e-14),
        wavenumber: 2.0 * PI / rng.random_range(0.6e-6..1.6e-6),
        path: if rng.random_bool(0.5) { ScintillationPath::Horizontal } else { ScintillationPath::Slant },
    })
}

/// Random scenario with a finite critical radius. Density is chosen so the
/// turbulence-free energy coverage lies in [0.2, 0.95].
fn random_coverable(rng: &mut ChaCha8Rng) -> (Scenario, f64) {
    loop {
        let s = Scenario {
            network: NetworkModel { density: 1e-6, altitude: rng.random_range(50.0..300.0) },
            channel: random_channel(rng),
            turbulence: random_turbulence(rng),
            power: UavPowerModel {
                propulsion: Propulsion::FixedDraw(rng.random_range(20.0..200.0)),
                p_comm: rng.random_range(0.0..50.0),
            },
            ..Default::default()
        };
        if let CriticalRadius::Radius(r) = coverage::critical_radius(&s).unwrap() {
            if r > 10.0 {
                let target: f64 = rng.random_range(0.2..0.95);
                let density = -(-target).ln_1p() / (PI * r * r);
                return (s.with_density(density), r);
            }
        }
    }
}

/// Noise-normalised SNR with unit fade at horizontal distance `r`.
fn snr_at(s: &Scenario, r: f64) -> f64 {
    s.receiver.snr(s.channel.information_power(&s.network.geometry(r)), 1.0)
}

fn bisect_radius(s: &Scenario) -> f64 {
    let target = s.power.total_consumed_power().unwrap();
    let f = |r: f64| s.channel.harvested_power(&s.network.geometry(r)) - target;
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn run_cli(args: &[&str], threads: Option<&str>) -> std::process::Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env("SOURCE_DATE_EPOCH", "1700000000");
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    cmd.output().expect("failed to launch laser-uav")
}

fn data_rows(stdout: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8_lossy(stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

// ---------------------------------------------------------------- criteria

fn special_functions() -> Outcome {
    let n = 10_000;
    let (t0, t1) = (1e-9f64.ln(), (1e10 + 1.0 / E).ln());
    let mut worst_w: f64 = 0.0;
    for i in 0..n {
        let x = -1.0 / E + (t0 + (t1 - t0) * i as f64 / (n - 1) as f64).exp();
        match lambert_w0(x) {
            Ok(w) => worst_w = worst_w.max((w * w.exp() - x).abs() / x.abs().max(1.0)),
            Err(e) => return outcome(false, format!("lambert_w0({x}) failed: {e}")),
        }
    }

    // Composite Simpson on the density from 0 to |z|, 20000 panels.
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    let oracle = |z: f64| {
        let m = 20_000;
        let h = z.abs() / m as f64;
        let mut s = phi(0.0) + phi(z.abs());
        for k in 1..m {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * phi(k as f64 * h);
        }
        let half_mass = s * h / 3.0;
        if z >= 0.0 {
            0.5 + half_mass
        } else {
            0.5 - half_mass
        }
    };
    let mut worst_phi: f64 = 0.0;
    for i in 0..1000 {
        let z = -10.0 + 20.0 * i as f64 / 999.0;
        worst_phi = worst_phi.max((std_normal_cdf(z) - oracle(z)).abs());
    }
    outcome(
        worst_w <= 1e-12 && worst_phi <= 1e-12,
        format!("max scaled W residual {worst_w:.2e}, max Phi error {worst_phi:.2e}"),
    )
}

fn critical_radius_root() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let (mut worst_root, mut worst_oracle): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let (s, r) = random_coverable(&mut rng);
        let consumed = s.power.total_consumed_power().unwrap();
        let p = s.channel.harvested_power(&s.network.geometry(r));
        worst_root = worst_root.max((p - consumed).abs() / consumed);
        let oracle = bisect_radius(&s);
        worst_oracle = worst_oracle.max((r - oracle).abs() / oracle);
    }
    outcome(
        worst_root <= 1e-9 && worst_oracle <= 1e-6,
        format!("max root error {worst_root:.2e}, max deviation from bisection {worst_oracle:.2e}"),
    )
}

/// Scenario whose SNR threshold puts turbulence-free SNR coverage in
/// [0.2, 0.9], so no metric sits at exactly 0 or 1 (where the simulated
/// standard error collapses to zero).
fn random_mc_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let (mut s, _) = random_coverable(rng);
    let target: f64 = rng.random_range(0.2..0.9);
    let r = (-(-target).ln_1p() / (PI * s.network.density)).sqrt();
    s.snr_threshold = snr_at(&s, r);
    s
}

fn analytic_vs_monte_carlo() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let metrics = [Metric::Energy, Metric::Snr, Metric::Joint];
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let scenarios: Vec<Scenario> = (0..20).map(|_| random_mc_scenario(&mut rng)).collect();
    for (i, s) in scenarios.iter().enumerate() {
        let config = SimulationConfig { iterations: 100_000, seed: 1000 + i as u64, ..Default::default() };
        let out = simulate(s, &config).unwrap();
        for metric in metrics {
            let a = coverage::coverage(s, metric, &spec).unwrap();
            let e = out.estimate(metric);
            let z = (a - e.estimate).abs() / e.std_error;
            worst = worst.max(if z.is_nan() { 0.0 } else { z });
            let within = (a - e.estimate).abs() <= 3.0 * e.std_error;
            if !within {
                failures.push((i, metric, a));
            }
        }
    }
    let mut detail = format!("60 comparisons, worst |z| {worst:.2}");
    let passed = match failures.as_slice() {
        [] => true,
        [(i, metric, a)] => {
            let config = SimulationConfig { iterations: 100_000, seed: 0xF8E5_u64 + *i as u64, ..Default::default() };
            let e = simulate(&scenarios[*i], &config).unwrap().estimate(*metric);
            let ok = (a - e.estimate).abs() <= 3.0 * e.std_error;
            detail.push_str(&format!("; scenario {i} {metric} rerun on fresh seed: {}", if ok { "ok" } else { "failed" }));
            ok
        }
        many => {
            detail.push_str(&format!("; {} comparisons outside 3 SE", many.len()));
            false
        }
    };
    outcome(passed, detail)
}

fn fixed_wing_propulsion() -> Outcome {
    let p = propulsion_power_fixed_wing(&FixedWingParams::default(), [30.0, 0.0, 0.0], [0.0; 3]).unwrap();
    outcome((p - 100.0).abs() <= 0.1, format!("{p:.4} W"))
}

fn density_threshold() -> Outcome {
    let out = run_cli(&["density-design", "--target", "0.9", "--metric", "energy"], None);
    if !out.status.success() {
        return outcome(false, format!("exit status {}", out.status));
    }
    let rows = data_rows(&out.stdout);
    let density: f64 = match rows.first().and_then(|r| r.get(2)).and_then(|v| v.parse().ok()) {
        Some(d) => d,
        None => return outcome(false, "could not parse density-design output"),
    };
    outcome(
        (0.40e-6..=0.65e-6).contains(&density),
        format!("density {density:.4e} /m^2, accepted range [4.0e-7, 6.5e-7]"),
    )
}

fn k_crossing() -> Outcome {
    let mut s = Scenario::default();
    s.channel.split = 1e-6;
    if (s.power.total_consumed_power().unwrap() - 110.0).abs() > 0.01 {
        return outcome(false, "default consumption is not 110 W");
    }
    // K is inversely proportional to beta, so the crossing is 10 log10 K(beta = 1).
    s.snr_threshold = 1.0;
    let crossing_db = 10.0 * coverage::k_factor(&s).unwrap().log10();
    let crossing_ok = (50.0..=50.8).contains(&crossing_db);

    let out = run_cli(&["fig-joint-beta"], None);
    if !out.status.success() {
        return outcome(false, format!("fig-joint-beta exit status {}", out.status));
    }
    let mut series: std::collections::BTreeMap<String, Vec<(f64, f64)>> = Default::default();
    for row in data_rows(&out.stdout) {
        let (beta, value): (f64, f64) = (row[1].parse().unwrap(), row[4].parse().unwrap());
        series.entry(row[2].clone()).or_default().push((beta, value));
    }
    let mut shape_ok = !series.is_empty();
    let mut max_flat_variation: f64 = 0.0;
    for points in series.values() {
        let flat: Vec<f64> = points.iter().filter(|p| p.0 <= 49.0).map(|p| p.1).collect();
        let spread = flat.iter().cloned().fold(f64::MIN, f64::max) - flat.iter().cloned().fold(f64::MAX, f64::min);
        max_flat_variation = max_flat_variation.max(spread);
        let tail: Vec<f64> = points.iter().filter(|p| p.0 >= 52.0).map(|p| p.1).collect();
        shape_ok &= flat.len() > 1 && spread < 1e-6 && tail.len() > 1 && tail.windows(2).all(|w| w[1] < w[0]);
    }
    outcome(
        crossing_ok && shape_ok,
        format!(
            "K = 1 at {crossing_db:.3} dB; {} series, flat-segment variation {max_flat_variation:.1e}, {}",
            series.len(),
            if shape_ok { "strictly decreasing from 52 dB" } else { "shape check failed" }
        ),
    )
}

fn turbulence_normalisation() -> Outcome {
    let model = TurbulenceModel::LogNormal(LogNormalTurbulence {
        cn2: 0.5e-14,
        wavenumber: 2.0 * PI / 0.785e-6,
        path: ScintillationPath::Horizontal,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut detail = Vec::new();
    let mut passed = true;
    for &s2 in &[0.01, 0.05, 0.2] {
        let n = 1_000_000;
        let mut draws: Vec<f64> = (0..n).map(|_| model.sample(s2, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let z = (mean - 1.0).abs() / (var / n as f64).sqrt();
        draws.sort_by(f64::total_cmp);
        let ks = draws
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let f = model.cdf(s2, h);
                (f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f)
            })
            .fold(0.0, f64::max);
        let critical = 1.628 / (n as f64).sqrt();
        passed &= z <= 3.0 && ks < critical;
        detail.push(format!("s2={s2}: |z|={z:.2} KS={ks:.1e}"));
    }
    outcome(passed, format!("{} (KS 1% critical {:.1e})", detail.join(", "), 1.628 / 1000.0))
}

fn monotonicity() -> Outcome {
    let spec = QuadratureSpec::default();
    // Slack for quadrature noise on flat stretches.
    let slack = 1e-9;
    let base = Scenario::default();
    let mut checks = 0;
    let mut violations = Vec::new();

    let mut check = |label: &str, values: Vec<f64>, increasing: bool| {
        checks += 1;
        let ok = values
            .windows(2)
            .all(|w| if increasing { w[1] >= w[0] - slack } else { w[1] <= w[0] + slack });
        if !ok {
            violations.push(label.to_owned());
        }
    };

    let densities: Vec<f64> = (0..20).map(|i| 1e-8 * 10f64.powf(4.0 * i as f64 / 19.0)).collect();
    for metric in [Metric::Energy, Metric::Snr, Metric::Joint] {
        for beta_db in [45.0, 55.0] {
            let mut s = base.clone();
            s.snr_threshold = 10f64.powf(beta_db / 10.0);
            let v = densities.iter().map(|&d| coverage::coverage(&s.with_density(d), metric, &spec).unwrap()).collect();
            check(&format!("{metric} vs density at {beta_db} dB"), v, true);
        }
    }
    for density in [0.5e-6, 2e-6] {
        let v = (0..20)
            .map(|i| {
                let mut s = base.with_density(density);
                s.power.p_comm = 5.0 * i as f64;
                coverage::energy_coverage(&s, &spec).unwrap()
            })
            .collect();
        check(&format!("energy vs p_comm at {density}"), v, false);
        let v = (0..20)
            .map(|i| {
                let mut s = base.with_density(density);
                s.snr_threshold = 10f64.powf((30.0 + 40.0 * i as f64 / 19.0) / 10.0);
                coverage::snr_coverage(&s, &spec).unwrap()
            })
            .collect();
        check(&format!("snr vs beta at {density}"), v, false);
    }
    let detail = if violations.is_empty() {
        format!("{checks} grids of 20 points monotone")
    } else {
        format!("violations: {}", violations.join("; "))
    };
    outcome(violations.is_empty(), detail)
}

fn joint_structure() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut below, mut above, mut analytic_bad, mut mc_bad) = (0, 0, 0, 0);
    for i in 0..50 {
        let (mut s, _) = random_coverable(&mut rng);
        // Alternate sides of K = 1 so both regimes are covered.
        let k = if i % 2 == 0 { log_uniform(&mut rng, 0.1, 0.95) } else { log_uniform(&mut rng, 1.05, 10.0) };
        s.snr_threshold = 1.0;
        s.snr_threshold = coverage::k_factor(&s).unwrap() / k;
        let k = coverage::k_factor(&s).unwrap();
        if k > 1.0 {
            above += 1;
        } else {
            below += 1;
        }
        let binding = if k > 1.0 { Metric::Energy } else { Metric::Snr };
        let joint = coverage::joint_coverage(&s, &spec).unwrap();
        if joint != coverage::coverage(&s, binding, &spec).unwrap() {
            analytic_bad += 1;
        }
        let config = SimulationConfig { iterations: 100_000, seed: 500 + i, ..Default::default() };
        let out = simulate(&s, &config).unwrap();
        let (j, b) = (out.estimate(Metric::Joint), out.estimate(binding));
        let combined = (j.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        let within = (j.estimate - b.estimate).abs() <= 3.0 * combined;
        if !within {
            mc_bad += 1;
        }
    }
    outcome(
        analytic_bad == 0 && mc_bad == 0 && below > 0 && above > 0,
        format!("{below} scenarios with K < 1, {above} with K > 1; analytic mismatches {analytic_bad}, simulation mismatches {mc_bad}"),
    )
}

fn determinism() -> Outcome {
    let args = ["montecarlo", "--iterations", "200000", "--seed", "42"];
    let runs: Vec<_> = [Some("1"), Some("4"), Some("4")].iter().map(|t| run_cli(&args, *t)).collect();
    if let Some(bad) = runs.iter().find(|o| !o.status.success()) {
        return outcome(false, format!("montecarlo exit status {}", bad.status));
    }
    let identical = runs.windows(2).all(|w| w[0].stdout == w[1].stdout);
    outcome(
        identical && !runs[0].stdout.is_empty(),
        format!(
            "{} bytes, 1 vs 4 workers and repeat run {}",
            runs[0].stdout.len(),
            if identical { "byte-identical" } else { "differ" }
        ),
    )
}
