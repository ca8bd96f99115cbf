//! UAV power consumption: propulsion plus communication payload.

use crate::error::{Error, Result};

/// Gravitational acceleration used by the fixed-wing model (m/s^2).
pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedWingParams {
    /// kg/m
    pub c1: f64,
    /// kg m^3 / s^4
    pub c2: f64,
    /// kg
    pub mass: f64,
}

impl Default for FixedWingParams {
    fn default() -> Self {
        // Mass is not used in level flight; 10 kg is a placeholder.
        Self {
            c1: 9.26e-4,
            c2: 2250.0,
            mass: 10.0,
        }
    }
}

impl FixedWingParams {
    pub fn validate(&self) -> Result<()> {
        positive("c1", self.c1)?;
        positive("c2", self.c2)?;
        positive("mass", self.mass)
    }
}

/// Rotary-wing coefficients. Defaults follow the standard example from the
/// rotary-wing energy literature, not measured hardware.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotaryWingParams {
    /// Blade profile power in hover (W).
    pub blade_profile_p0: f64,
    /// Induced power in hover (W).
    pub induced_pi: f64,
    /// Rotor blade tip speed (m/s).
    pub tip_speed: f64,
    /// Mean rotor induced velocity in hover (m/s).
    pub mean_induced_velocity: f64,
    pub fuselage_drag_ratio: f64,
    pub rotor_solidity: f64,
    /// kg/m^3
    pub air_density: f64,
    /// m^2
    pub rotor_disc_area: f64,
}

impl Default for RotaryWingParams {
    fn default() -> Self {
        Self {
            blade_profile_p0: 80.0,
            induced_pi: 88.0,
            tip_speed: 120.0,
            mean_induced_velocity: 4.03,
            fuselage_drag_ratio: 0.6,
            rotor_solidity: 0.05,
            air_density: 1.225,
            rotor_disc_area: 0.503,
        }
    }
}

impl RotaryWingParams {
    pub fn validate(&self) -> Result<()> {
        positive("rotor_p0", self.blade_profile_p0)?;
        positive("rotor_pi", self.induced_pi)?;
        positive("rotor_tip_speed", self.tip_speed)?;
        positive("rotor_v0", self.mean_induced_velocity)?;
        positive("rotor_d0", self.fuselage_drag_ratio)?;
        positive("rotor_solidity", self.rotor_solidity)?;
        positive("air_density", self.air_density)?;
        positive("rotor_disc_area", self.rotor_disc_area)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Propulsion {
    FixedWing {
        params: FixedWingParams,
        velocity: [f64; 3],
        acceleration: [f64; 3],
    },
    RotaryWing {
        params: RotaryWingParams,
        speed: f64,
    },
    /// Constant propulsion draw (W).
    FixedDraw(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavPowerModel {
    pub propulsion: Propulsion,
    /// Communication and on-board processing payload (W).
    pub p_comm: f64,
}

impl Default for UavPowerModel {
    fn default() -> Self {
        Self {
            propulsion: Propulsion::FixedWing {
                params: FixedWingParams::default(),
                velocity: [30.0, 0.0, 0.0],
                acceleration: [0.0; 3],
            },
            p_comm: 10.0,
        }
    }
}

impl UavPowerModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_comm >= 0.0) || !self.p_comm.is_finite() {
            return Err(Error::invalid("p_comm", "must be finite and >= 0"));
        }
        match self.propulsion {
            Propulsion::FixedWing { params, velocity, .. } => {
                params.validate()?;
                if norm(velocity) == 0.0 {
                    return Err(Error::invalid("velocity", "fixed-wing speed must be > 0"));
                }
            }
            Propulsion::RotaryWing { params, speed } => {
                params.validate()?;
                positive("speed", speed)?;
            }
            Propulsion::FixedDraw(p) => {
                if !(p >= 0.0) || !p.is_finite() {
                    return Err(Error::invalid("p_prop", "must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }

    pub fn propulsion_power(&self) -> Result<f64> {
        match self.propulsion {
            Propulsion::FixedWing {
                params,
                velocity,
                acceleration,
            } => propulsion_power_fixed_wing(&params, velocity, acceleration),
            Propulsion::RotaryWing { params, speed } => propulsion_power_rotary(&params, speed),
            Propulsion::FixedDraw(p) => Ok(p),
        }
    }

    /// Propulsion plus communication power.
    pub fn total_consumed_power(&self) -> Result<f64> {
        Ok(self.propulsion_power()? + self.p_comm)
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Fixed-wing propulsion power for velocity `v` and acceleration `a`:
///
/// `| c1 |v|^3 + c2/|v| (1 + (|a|^2 - (a.v)^2/|v|^2) / g^2) + m a.v |`
pub fn propulsion_power_fixed_wing(params: &FixedWingParams, v: [f64; 3], a: [f64; 3]) -> Result<f64> {
    let speed = norm(v);
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(Error::Domain {
            what: "propulsion_power_fixed_wing (speed)",
            value: speed,
        });
    }
    let av = dot(a, v);
    let normal_accel_sq = dot(a, a) - av * av / (speed * speed);
    let p = params.c1 * speed.powi(3)
        + params.c2 / speed * (1.0 + normal_accel_sq / (GRAVITY * GRAVITY))
        + params.mass * av;
    Ok(p.abs())
}

/// Rotary-wing propulsion power at forward speed `speed`:
///
/// `P0 (1 + 3 v^2 / U_tip^2) + Pi v0 / v + d0 rho s A v^3 / 2`
pub fn propulsion_power_rotary(params: &RotaryWingParams, speed: f64) -> Result<f64> {
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(Error::Domain {
            what: "propulsion_power_rotary (speed)",
            value: speed,
        });
    }
    let blade = params.blade_profile_p0 * (1.0 + 3.0 * speed * speed / (params.tip_speed * params.tip_speed));
    let induced = params.induced_pi * params.mean_induced_velocity / speed;
    let parasite = 0.5
        * params.fuselage_drag_ratio
        * params.air_density
        * params.rotor_solidity
        * params.rotor_disc_area
        * speed.powi(3);
    Ok(blade + induced + parasite)
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}
