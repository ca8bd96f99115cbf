//! Scenario files: flat `key = value` lines, `#` comments, SI units.
//!
//! Every key is optional. Missing keys fall back to the reference parameter
//! set; the few defaults that correct commonly misprinted constants are
//! reported back as provenance notes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use laser_uav::{
    Error as CoreError, FixedWingParams, FsoChannelParams, LogNormalTurbulence, NetworkModel, Propulsion,
    ReceiverParams, RotaryWingParams, Scenario, ScintillationPath, TabulatedCdf, TurbulenceModel, UavPowerModel,
};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Every key accepted in a scenario file.
pub const KNOWN_KEYS: &[&str] = &[
    "lbd_density",
    "altitude",
    "p_trans",
    "aperture_efficiency",
    "beam_size",
    "angular_spread",
    "attenuation",
    "split_delta_s",
    "turbulence",
    "cn2",
    "wavenumber",
    "scintillation_path",
    "turbulence_cdf_file",
    "wavelength",
    "responsivity",
    "bandwidth",
    "snr_threshold",
    "snr_threshold_db",
    "uav_type",
    "p_comm",
    "p_prop",
    "c1",
    "c2",
    "mass",
    "velocity",
    "acceleration",
    "speed",
    "rotor_p0",
    "rotor_pi",
    "rotor_tip_speed",
    "rotor_v0",
    "rotor_d0",
    "rotor_solidity",
    "air_density",
    "rotor_disc_area",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: key `{key}` given more than once")]
    Duplicate { key: String, line: usize },
    #[error("line {line}: key `{key}`: {reason}")]
    InvalidValue { key: String, line: usize, reason: String },
    #[error("missing required key `{key}`: {reason}")]
    Missing { key: String, reason: String },
    #[error("{}key `{key}` violates an invariant: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invariant {
        key: String,
        line: Option<usize>,
        reason: String,
    },
}

/// A resolved scenario plus what was learnt while resolving it.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    /// Notes about corrected defaults that were applied.
    pub notes: Vec<String>,
    /// Canonical `key -> value` map of the resolved parameters.
    pub resolved: BTreeMap<String, String>,
}

impl LoadedScenario {
    /// SHA-256 over the canonical resolved parameters (first 16 hex digits).
    /// Independent of key order and formatting in the source file.
    pub fn fingerprint(&self) -> String {
        fingerprint_of(&self.resolved)
    }
}

pub fn fingerprint_of(resolved: &BTreeMap<String, String>) -> String {
    let mut hasher = Sha256::new();
    for (k, v) in resolved {
        hasher.update(k.as_bytes());
        hasher.update(b"=");
        hasher.update(v.as_bytes());
        hasher.update(b"\n");
    }
    let digest = hasher.finalize();
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<LoadedScenario, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text, path.parent())
}

/// The built-in scenario, as if loaded from an empty file.
pub fn default_scenario() -> LoadedScenario {
    parse_scenario("", None).expect("defaults are valid")
}

struct Entries {
    map: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(_, l)| *l)
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some((raw, line)) => raw.parse::<f64>().map_err(|_| ConfigError::InvalidValue {
                key: key.to_string(),
                line: *line,
                reason: format!("`{raw}` is not a number"),
            }),
        }
    }

    fn vec3_or(&self, key: &str, default: [f64; 3]) -> Result<[f64; 3], ConfigError> {
        let Some((raw, line)) = self.map.get(key) else {
            return Ok(default);
        };
        let bad = |reason: String| ConfigError::InvalidValue {
            key: key.to_string(),
            line: *line,
            reason,
        };
        let parts = raw
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad(format!("`{p}` is not a number"))))
            .collect::<Result<Vec<_>, _>>()?;
        match parts.as_slice() {
            [x] => Ok([*x, 0.0, 0.0]),
            [x, y, z] => Ok([*x, *y, *z]),
            _ => Err(bad("expected a scalar or three comma-separated components".into())),
        }
    }

    fn choice<'a>(&self, key: &str, default: &'a str, allowed: &[&'a str]) -> Result<&'a str, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some((raw, line)) => {
                let v = raw.to_ascii_lowercase();
                allowed.iter().copied().find(|a| *a == v).ok_or_else(|| ConfigError::InvalidValue {
                    key: key.to_string(),
                    line: *line,
                    reason: format!("`{raw}` is not one of {}", allowed.join(", ")),
                })
            }
        }
    }
}

fn parse_entries(text: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        }
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { key, line });
        }
        if map.contains_key(&key) {
            return Err(ConfigError::Duplicate { key, line });
        }
        map.insert(key, (value, line));
    }
    Ok(Entries { map })
}

/// Parses scenario text. Relative `turbulence_cdf_file` paths resolve against
/// `base_dir`.
pub fn parse_scenario(text: &str, base_dir: Option<&Path>) -> Result<LoadedScenario, ConfigError> {
    let e = parse_entries(text)?;
    let mut notes = Vec::new();
    let mut resolved = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        resolved.insert(k.to_string(), v);
    };

    let network = NetworkModel {
        density: e.f64_or("lbd_density", 1e-6)?,
        altitude: e.f64_or("altitude", 100.0)?,
    };
    put("lbd_density", num(network.density));
    put("altitude", num(network.altitude));

    let channel = FsoChannelParams {
        p_trans: e.f64_or("p_trans", 600.0)?,
        aperture_efficiency: e.f64_or("aperture_efficiency", 0.004)?,
        beam_size: e.f64_or("beam_size", 0.1)?,
        angular_spread: e.f64_or("angular_spread", 3.4e-5)?,
        attenuation: e.f64_or("attenuation", 1e-6)?,
        split: e.f64_or("split_delta_s", 1e-5)?,
    };
    put("p_trans", num(channel.p_trans));
    put("aperture_efficiency", num(channel.aperture_efficiency));
    put("beam_size", num(channel.beam_size));
    put("angular_spread", num(channel.angular_spread));
    put("attenuation", num(channel.attenuation));
    put("split_delta_s", num(channel.split));

    let receiver = ReceiverParams {
        responsivity: e.f64_or("responsivity", 0.5)?,
        wavelength: e.f64_or("wavelength", 0.785e-6)?,
        bandwidth: e.f64_or("bandwidth", 1e9)?,
    };
    put("responsivity", num(receiver.responsivity));
    put("wavelength", num(receiver.wavelength));
    put("bandwidth", num(receiver.bandwidth));

    let turbulence = match e.choice("turbulence", "lognormal", &["none", "lognormal", "tabulated"])? {
        "none" => TurbulenceModel::None,
        "lognormal" => {
            if !e.has("cn2") {
                notes.push(
                    "cn2 defaulted to 0.5e-14 m^-2/3; the value 0.5e14 found in some parameter tables \
                     would make the scintillation variance astronomically large"
                        .to_string(),
                );
            }
            if !e.has("wavenumber") {
                notes.push(format!(
                    "wavenumber defaulted to 2*pi/wavelength = {:.6e} 1/m (set `wavenumber` to override, \
                     e.g. 5.92e6 for a 1.06 um beam)",
                    2.0 * PI / receiver.wavelength
                ));
            }
            let path = match e.choice("scintillation_path", "horizontal", &["horizontal", "slant"])? {
                "slant" => ScintillationPath::Slant,
                _ => ScintillationPath::Horizontal,
            };
            TurbulenceModel::LogNormal(LogNormalTurbulence {
                cn2: e.f64_or("cn2", 0.5e-14)?,
                wavenumber: e.f64_or("wavenumber", 2.0 * PI / receiver.wavelength)?,
                path,
            })
        }
        _ => {
            let Some((file, line)) = e.map.get("turbulence_cdf_file") else {
                return Err(ConfigError::Missing {
                    key: "turbulence_cdf_file".into(),
                    reason: "required when turbulence = tabulated".into(),
                });
            };
            let mut path = PathBuf::from(file);
            if path.is_relative() {
                if let Some(dir) = base_dir {
                    path = dir.join(path);
                }
            }
            let table = TabulatedCdf::from_path(&path).map_err(|err| ConfigError::InvalidValue {
                key: "turbulence_cdf_file".into(),
                line: *line,
                reason: err.to_string(),
            })?;
            TurbulenceModel::TabulatedCdf(table)
        }
    };
    put("turbulence", turbulence.name().to_string());
    match &turbulence {
        TurbulenceModel::LogNormal(ln) => {
            put("cn2", num(ln.cn2));
            put("wavenumber", num(ln.wavenumber));
            put("scintillation_path", ln.path.as_str().to_string());
        }
        TurbulenceModel::TabulatedCdf(t) => {
            let table = t.points().iter().map(|(h, f)| format!("{}:{}", num(*h), num(*f))).collect::<Vec<_>>();
            put("turbulence_cdf", table.join(";"));
        }
        TurbulenceModel::None => {}
    }

    let snr_threshold = match (e.map.get("snr_threshold"), e.map.get("snr_threshold_db")) {
        (Some(_), Some((_, line))) => {
            return Err(ConfigError::InvalidValue {
                key: "snr_threshold_db".into(),
                line: *line,
                reason: "give either snr_threshold or snr_threshold_db, not both".into(),
            })
        }
        (None, Some(_)) => db_to_linear(e.f64_or("snr_threshold_db", 50.0)?),
        _ => e.f64_or("snr_threshold", 1e5)?,
    };
    put("snr_threshold", num(snr_threshold));

    let p_comm = e.f64_or("p_comm", 10.0)?;
    put("p_comm", num(p_comm));
    let propulsion = match e.choice("uav_type", "fixed_wing", &["fixed_wing", "rotary_wing", "fixed_draw"])? {
        "fixed_wing" => {
            if !e.has("c1") {
                notes.push(
                    "c1 defaulted to 9.26e-4 kg/m; with c2 = 2250 this gives 100 W at 30 m/s level flight \
                     (the value 9.26e4 found in some parameter tables does not)"
                        .to_string(),
                );
            }
            let d = FixedWingParams::default();
            let params = FixedWingParams {
                c1: e.f64_or("c1", d.c1)?,
                c2: e.f64_or("c2", d.c2)?,
                mass: e.f64_or("mass", d.mass)?,
            };
            let velocity = e.vec3_or("velocity", [30.0, 0.0, 0.0])?;
            let acceleration = e.vec3_or("acceleration", [0.0; 3])?;
            put("uav_type", "fixed_wing".into());
            put("c1", num(params.c1));
            put("c2", num(params.c2));
            put("mass", num(params.mass));
            put("velocity", vec3(velocity));
            put("acceleration", vec3(acceleration));
            Propulsion::FixedWing {
                params,
                velocity,
                acceleration,
            }
        }
        "rotary_wing" => {
            let d = RotaryWingParams::default();
            let params = RotaryWingParams {
                blade_profile_p0: e.f64_or("rotor_p0", d.blade_profile_p0)?,
                induced_pi: e.f64_or("rotor_pi", d.induced_pi)?,
                tip_speed: e.f64_or("rotor_tip_speed", d.tip_speed)?,
                mean_induced_velocity: e.f64_or("rotor_v0", d.mean_induced_velocity)?,
                fuselage_drag_ratio: e.f64_or("rotor_d0", d.fuselage_drag_ratio)?,
                rotor_solidity: e.f64_or("rotor_solidity", d.rotor_solidity)?,
                air_density: e.f64_or("air_density", d.air_density)?,
                rotor_disc_area: e.f64_or("rotor_disc_area", d.rotor_disc_area)?,
            };
            let speed = e.f64_or("speed", 10.0)?;
            put("uav_type", "rotary_wing".into());
            put("rotor_p0", num(params.blade_profile_p0));
            put("rotor_pi", num(params.induced_pi));
            put("rotor_tip_speed", num(params.tip_speed));
            put("rotor_v0", num(params.mean_induced_velocity));
            put("rotor_d0", num(params.fuselage_drag_ratio));
            put("rotor_solidity", num(params.rotor_solidity));
            put("air_density", num(params.air_density));
            put("rotor_disc_area", num(params.rotor_disc_area));
            put("speed", num(speed));
            Propulsion::RotaryWing { params, speed }
        }
        _ => {
            let p = e.f64_or("p_prop", 100.0)?;
            put("uav_type", "fixed_draw".into());
            put("p_prop", num(p));
            Propulsion::FixedDraw(p)
        }
    };

    let scenario = Scenario {
        network,
        channel,
        turbulence,
        receiver,
        power: UavPowerModel { propulsion, p_comm },
        snr_threshold,
    };
    scenario.validate().map_err(|err| invariant_error(&e, err))?;
    scenario
        .power
        .total_consumed_power()
        .map_err(|err| invariant_error(&e, err))?;

    Ok(LoadedScenario {
        scenario,
        notes,
        resolved,
    })
}

fn invariant_error(e: &Entries, err: CoreError) -> ConfigError {
    let key = match &err {
        CoreError::InvalidParameter { name, .. } => name.to_string(),
        CoreError::Domain { what, .. } if what.contains("speed") => {
            if e.has("speed") { "speed" } else { "velocity" }.to_string()
        }
        _ => "scenario".to_string(),
    };
    let line = e
        .line(&key)
        .or_else(|| (key == "snr_threshold").then(|| e.line("snr_threshold_db")).flatten());
    let reason = match err {
        CoreError::InvalidParameter { reason, .. } => reason,
        other => other.to_string(),
    };
    ConfigError::Invariant { key, line, reason }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn vec3(v: [f64; 3]) -> String {
    format!("{},{},{}", num(v[0]), num(v[1]), num(v[2]))
}

impl fmt::Display for LoadedScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.resolved {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_scenario() {
        let loaded = parse_scenario("", None).unwrap();
        let s = &loaded.scenario;
        assert_eq!(s.channel.split, 1e-5);
        assert_eq!(s.network.altitude, 100.0);
        assert_eq!(s.channel.p_trans, 600.0);
        assert_eq!(s.power.p_comm, 10.0);
        assert!((s.power.total_consumed_power().unwrap() - 110.0).abs() < 0.01);
        assert!(matches!(s.turbulence, TurbulenceModel::LogNormal(_)));
        assert_eq!(loaded.notes.len(), 3);
        assert_eq!(*s, Scenario::default());
    }

    #[test]
    fn invalid_split_names_key_and_line() {
        let err = parse_scenario("# comment\nsplit_delta_s = 1.5\n", None).unwrap_err();
        match err {
            ConfigError::Invariant { key, line, .. } => {
                assert_eq!(key, "split_delta_s");
                assert_eq!(line, Some(2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_and_malformed() {
        assert!(matches!(
            parse_scenario("altitud = 3", None),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(parse_scenario("altitude 3", None), Err(ConfigError::Syntax { .. })));
        assert!(matches!(
            parse_scenario("altitude = abc", None),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            parse_scenario("altitude = 3\naltitude = 4", None),
            Err(ConfigError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(
            parse_scenario("turbulence = tabulated", None),
            Err(ConfigError::Missing { .. })
        ));
        assert!(matches!(
            parse_scenario("snr_threshold = 3\nsnr_threshold_db = 4", None),
            Err(ConfigError::InvalidValue { .. })
        ));
    }

    #[test]
    fn db_threshold_and_overrides() {
        let loaded = parse_scenario("snr_threshold_db = 55\nlbd_density = 0.52e-6\nc1 = 9.26e4", None).unwrap();
        assert!((loaded.scenario.snr_threshold - 10f64.powf(5.5)).abs() < 1e-6);
        assert_eq!(loaded.scenario.network.density, 0.52e-6);
        assert_eq!(loaded.notes.len(), 2);
    }

    #[test]
    fn fingerprint_ignores_order_and_format() {
        let a = parse_scenario("altitude = 120\np_comm = 50\n", None).unwrap();
        let b = parse_scenario("# reordered\np_comm=5e1\n\naltitude =   1.2e2\n", None).unwrap();
        let c = parse_scenario("altitude = 121\np_comm = 50\n", None).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn other_uav_types() {
        let r = parse_scenario("uav_type = rotary_wing\nspeed = 10\np_comm = 0", None).unwrap();
        assert!((r.scenario.power.total_consumed_power().unwrap() - 126.37).abs() < 0.01);
        let d = parse_scenario("uav_type = fixed_draw\np_prop = 100", None).unwrap();
        assert_eq!(d.scenario.power.total_consumed_power().unwrap(), 110.0);
        let err = parse_scenario("uav_type = rotary_wing\nspeed = 0", None).unwrap_err();
        assert!(matches!(err, ConfigError::Invariant { ref key, line: Some(2), .. } if key == "speed"));
        let err = parse_scenario("velocity = 0", None).unwrap_err();
        assert!(matches!(err, ConfigError::Invariant { ref key, .. } if key == "velocity"));
    }

    #[test]
    fn tabulated_turbulence_from_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("fade.csv"), "h,F\n0.5,0\n1,0.5\n1.5,1\n").unwrap();
        std::fs::write(
            dir.path().join("scenario.cfg"),
            "turbulence = tabulated\nturbulence_cdf_file = fade.csv\n",
        )
        .unwrap();
        let loaded = load_scenario(dir.path().join("scenario.cfg")).unwrap();
        assert!(matches!(loaded.scenario.turbulence, TurbulenceModel::TabulatedCdf(_)));
    }
}
