use std::f64::consts::TAU;

use thiserror::Error;

use super::{gmst_rad, EcefPosition, OrbitalElements};

const KEPLER_TOL: f64 = 1e-12;
const KEPLER_MAX_ITER: usize = 50;
const CIRCULAR_ECC: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagationError {
    #[error("Kepler's equation did not converge (M = {mean_anomaly} rad, e = {eccentricity})")]
    NoConvergence {
        mean_anomaly: f64,
        eccentricity: f64,
    },
}

/// Solves `E - e sin E = M` for the eccentric anomaly by Newton iteration.
///
/// Eccentricities below 1e-8 are treated as circular and return `M` directly.
pub fn solve_kepler(mean_anomaly: f64, eccentricity: f64) -> Result<f64, PropagationError> {
    let m = mean_anomaly.rem_euclid(TAU);
    if eccentricity < CIRCULAR_ECC {
        return Ok(m);
    }
    let fail = PropagationError::NoConvergence {
        mean_anomaly: m,
        eccentricity,
    };
    if !(0.0..1.0).contains(&eccentricity) {
        return Err(fail);
    }
    let mut e_anom = if eccentricity > 0.8 { std::f64::consts::PI } else { m };
    for _ in 0..KEPLER_MAX_ITER {
        let f = e_anom - eccentricity * e_anom.sin() - m;
        let df = 1.0 - eccentricity * e_anom.cos();
        let step = f / df;
        e_anom -= step;
        if step.abs() < KEPLER_TOL {
            return Ok(e_anom);
        }
    }
    Err(fail)
}

/// Earth-centred inertial position at `t` (Unix seconds), two-body motion.
pub fn propagate_eci(el: &OrbitalElements, t: f64) -> Result<[f64; 3], PropagationError> {
    let n = el.mean_motion_rad_s();
    let a = el.semi_major_axis();
    let e = el.eccentricity;
    let m = el.mean_anomaly_at_epoch.to_radians() + n * (t - el.epoch);
    let ecc_anom = solve_kepler(m, e)?;

    // Perifocal coordinates.
    let (sin_e, cos_e) = ecc_anom.sin_cos();
    let p = a * (cos_e - e);
    let q = a * (1.0 - e * e).sqrt() * sin_e;

    let (so, co) = el.raan.to_radians().sin_cos();
    let (si, ci) = el.inclination.to_radians().sin_cos();
    let (sw, cw) = el.arg_perigee.to_radians().sin_cos();

    // R3(-raan) R1(-i) R3(-argp)
    let x = (co * cw - so * sw * ci) * p + (-co * sw - so * cw * ci) * q;
    let y = (so * cw + co * sw * ci) * p + (-so * sw + co * cw * ci) * q;
    let z = (sw * si) * p + (cw * si) * q;
    Ok([x, y, z])
}

/// Earth-fixed position at `t`: the inertial position rotated by Greenwich sidereal angle.
pub fn propagate_position(el: &OrbitalElements, t: f64) -> Result<EcefPosition, PropagationError> {
    let [x, y, z] = propagate_eci(el, t)?;
    let (s, c) = gmst_rad(t).sin_cos();
    Ok(EcefPosition {
        x: c * x + s * y,
        y: -s * x + c * y,
        z,
    })
}
