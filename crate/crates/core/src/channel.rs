//! Link model for dual-downlink entanglement distribution.
//!
//! An SPDC source on the satellite emits `n` photon pairs per pulse with the
//! thermal distribution `p(n) = (n+1) N^n / (N+1)^(n+2)`. Each photon of a pair
//! travels one arm to a ground station; an arm's transmissivity combines
//! device efficiencies, diffraction-limited aperture coupling and
//! atmospheric absorption along the slant path.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orbital::{elevation_angle, EcefPosition, GeometryError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("mean photon number must be non-negative, got {0}")]
    NegativePhotonNumber(f64),
    #[error("link length must be positive, got {0} m")]
    NonPositiveLength(f64),
    #[error("elevation {elevation} deg is below the {limit} deg limit")]
    BelowElevationLimit { elevation: f64, limit: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Physical constants of the source, terminals and atmosphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    /// Source wavelength, meters.
    pub wavelength: f64,
    /// Mean photon number per mode of the SPDC source.
    pub pump_power: f64,
    /// Source repetition rate, pulses per second.
    pub rep_rate: f64,
    pub eta_s: f64,
    pub eta_g: f64,
    /// Transmitter aperture radius, meters.
    pub r_s: f64,
    /// Receiver aperture radius, meters.
    pub r_g: f64,
    /// Atmospheric shell thickness, meters.
    pub t_a: f64,
    /// Minimum elevation, degrees.
    pub theta_e: f64,
    pub p_d_day: f64,
    pub p_d_night: f64,
    /// Clear-sky atmospheric transmissivity at zenith.
    pub eta_zenith_atm: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            wavelength: 737e-9,
            pump_power: 0.078,
            rep_rate: 1e9,
            eta_s: 0.707,
            eta_g: 0.707,
            r_s: 0.1,
            r_g: 1.0,
            t_a: 5000.0,
            theta_e: 20.0,
            p_d_day: 3e-3,
            p_d_night: 3e-7,
            eta_zenith_atm: 0.5,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), String> {
        let probs = [
            ("eta_s", self.eta_s),
            ("eta_g", self.eta_g),
            ("p_d_day", self.p_d_day),
            ("p_d_night", self.p_d_night),
            ("eta_zenith_atm", self.eta_zenith_atm),
        ];
        for (name, v) in probs {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        let positive = [
            ("wavelength", self.wavelength),
            ("rep_rate", self.rep_rate),
            ("r_s", self.r_s),
            ("r_g", self.r_g),
            ("t_a", self.t_a),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.pump_power >= 0.0) {
            return Err(format!("pump_power must be non-negative, got {}", self.pump_power));
        }
        if !(0.0..90.0).contains(&self.theta_e) {
            return Err(format!("theta_e must lie in [0, 90), got {}", self.theta_e));
        }
        Ok(())
    }

    pub fn dark_click(&self, is_day: bool) -> f64 {
        if is_day {
            self.p_d_day
        } else {
            self.p_d_night
        }
    }
}

/// Per-arm transmissivities and the resulting pair rate and fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkMetrics {
    pub transmissivity_1: f64,
    pub transmissivity_2: f64,
    /// Entangled bits per second.
    pub rate: f64,
    /// `None` when no coincidences are expected at all.
    pub fidelity: Option<f64>,
}

/// Probability of `n` pairs in one pulse for mean photon number `ns`.
pub fn photon_number_dist(ns: f64, n: u32) -> Result<f64, ChannelError> {
    if !(ns >= 0.0) {
        return Err(ChannelError::NegativePhotonNumber(ns));
    }
    let n_i = n as i32;
    Ok(f64::from(n + 1) * ns.powi(n_i) / (ns + 1.0).powi(n_i + 2))
}

/// Diffraction-limited aperture coupling `min{1, (pi r_s r_g / (lambda L))^2}`.
pub fn free_space_transmissivity(length: f64, params: &ChannelParams) -> Result<f64, ChannelError> {
    if !(length > 0.0) {
        return Err(ChannelError::NonPositiveLength(length));
    }
    let k = std::f64::consts::PI * params.r_s * params.r_g / (params.wavelength * length);
    Ok((k * k).min(1.0))
}

/// Exponential absorption over the slant path through the atmospheric shell:
/// `eta_zenith ^ (1 / sin(elevation))`.
pub fn atmospheric_transmissivity(elevation: f64, params: &ChannelParams) -> Result<f64, ChannelError> {
    if elevation < params.theta_e {
        return Err(ChannelError::BelowElevationLimit {
            elevation,
            limit: params.theta_e,
        });
    }
    let slant = params.t_a / elevation.to_radians().sin();
    Ok(params.eta_zenith_atm.powf(slant / params.t_a))
}

/// End-to-end transmissivity of one satellite-to-station arm.
pub fn arm_transmissivity(
    sat: &EcefPosition,
    gs: &EcefPosition,
    params: &ChannelParams,
) -> Result<f64, ChannelError> {
    let elevation = elevation_angle(gs, sat)?;
    let atm = atmospheric_transmissivity(elevation, params)?;
    let fs = free_space_transmissivity(sat.distance(gs), params)?;
    Ok(params.eta_s * params.eta_g * fs * atm)
}

/// How a pair of arm transmissivities turns into rate and fidelity.
pub trait EntanglementModel {
    fn rate(&self, eta1: f64, eta2: f64) -> f64;
    fn fidelity(&self, eta1: f64, eta2: f64, p_dark: f64) -> Option<f64>;
}

impl EntanglementModel for ChannelParams {
    fn rate(&self, eta1: f64, eta2: f64) -> f64 {
        pair_rate(eta1, eta2, self)
    }

    fn fidelity(&self, eta1: f64, eta2: f64, p_dark: f64) -> Option<f64> {
        pair_fidelity(eta1, eta2, p_dark, self)
    }
}

fn p_n(params: &ChannelParams, n: u32) -> f64 {
    // pump_power is validated non-negative on every public entry point
    photon_number_dist(params.pump_power.max(0.0), n).unwrap_or(0.0)
}

/// Heralded single-pair coincidences per second: `tau p(1) eta1 eta2`.
pub fn pair_rate(eta1: f64, eta2: f64, params: &ChannelParams) -> f64 {
    params.rep_rate * p_n(params, 1) * eta1 * eta2
}

/// Fidelity of a coincidence, counting genuine single pairs as perfect and
/// multi-pair or dark-click coincidences as maximally mixed (fidelity 1/4).
pub fn pair_fidelity(eta1: f64, eta2: f64, p_dark: f64, params: &ChannelParams) -> Option<f64> {
    let p1 = p_n(params, 1);
    let p2 = p_n(params, 2);
    let at_least_one = |eta: f64| 1.0 - (1.0 - eta) * (1.0 - eta);
    let signal = p1 * eta1 * eta2;
    let multi = p2 * at_least_one(eta1) * at_least_one(eta2);
    let click = |eta: f64| p1 * eta + p2 * at_least_one(eta);
    let dark = p_dark * (click(eta1) + click(eta2)) + p_dark * p_dark;
    let total = signal + multi + dark;
    if total <= 0.0 {
        return None;
    }
    Some(((signal + (multi + dark) / 4.0) / total).clamp(0.0, 1.0))
}

/// Weight of serving stations `gs_a` and `gs_b` from `sat`. Zero when either
/// arm is below the elevation limit.
pub fn connection_weight(
    sat: &EcefPosition,
    gs_a: &EcefPosition,
    gs_b: &EcefPosition,
    params: &ChannelParams,
    is_day: bool,
) -> LinkMetrics {
    let arms = (
        arm_transmissivity(sat, gs_a, params),
        arm_transmissivity(sat, gs_b, params),
    );
    match arms {
        (Ok(eta1), Ok(eta2)) => LinkMetrics {
            transmissivity_1: eta1,
            transmissivity_2: eta2,
            rate: params.rate(eta1, eta2),
            fidelity: params.fidelity(eta1, eta2, params.dark_click(is_day)),
        },
        _ => LinkMetrics {
            transmissivity_1: 0.0,
            transmissivity_2: 0.0,
            rate: 0.0,
            fidelity: None,
        },
    }
}
