//! Orbital state, propagation and Earth geometry on a spherical Earth.

mod ephemeris;
mod geometry;
mod kepler;
mod sun;
mod tle;
mod walker;

pub use ephemeris::{parse_ephemeris_csv, Ephemeris, EphemerisError};
pub use geometry::{
    elevation_angle, footprint_radius, geodetic_to_ecef, great_circle_distance, sub_point,
    EcefPosition, GeodeticPoint, GeometryError,
};
pub use kepler::{propagate_eci, propagate_position, solve_kepler, PropagationError};
pub use sun::{gmst_rad, julian_date, sun_elevation};
pub use tle::{format_tle, parse_tle, parse_tle_file, TleError, TleErrorKind};
pub use walker::{generate_walker_constellation, WalkerSpec};

use serde::{Deserialize, Serialize};

/// Mean Earth radius, meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Earth gravitational parameter, m^3/s^2.
pub const MU_EARTH: f64 = 3.986004e14;
pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Mean orbital elements of one satellite. Angles in degrees, epoch in Unix seconds (UTC).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    pub satellite_id: String,
    pub epoch: f64,
    pub inclination: f64,
    pub raan: f64,
    pub eccentricity: f64,
    pub arg_perigee: f64,
    pub mean_anomaly_at_epoch: f64,
    /// Revolutions per day.
    pub mean_motion: f64,
}

impl OrbitalElements {
    pub fn mean_motion_rad_s(&self) -> f64 {
        self.mean_motion * 2.0 * std::f64::consts::PI / SECONDS_PER_DAY
    }

    /// Semi-major axis from Kepler's third law, meters.
    pub fn semi_major_axis(&self) -> f64 {
        let n = self.mean_motion_rad_s();
        (MU_EARTH / (n * n)).cbrt()
    }

    pub fn period_seconds(&self) -> f64 {
        SECONDS_PER_DAY / self.mean_motion
    }

    /// Mean motion (rev/day) of a circular orbit at `altitude` meters.
    pub fn mean_motion_for_altitude(altitude: f64) -> f64 {
        let a = EARTH_RADIUS_M + altitude;
        (MU_EARTH / (a * a * a)).sqrt() * SECONDS_PER_DAY / (2.0 * std::f64::consts::PI)
    }
}

/// Wraps an angle in degrees into `[0, 360)`.
pub fn normalize_deg(angle: f64) -> f64 {
    let a = angle.rem_euclid(360.0);
    if a >= 360.0 {
        0.0
    } else {
        a
    }
}

/// Uniform slot grid over a simulation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Unix seconds, UTC.
    pub start: f64,
    pub slot_seconds: u32,
    pub slot_count: u32,
}

impl TimeGrid {
    pub fn new(start: f64, slot_seconds: u32, slot_count: u32) -> Self {
        assert!(slot_seconds > 0 && slot_count > 0);
        Self {
            start,
            slot_seconds,
            slot_count,
        }
    }

    /// One day of one-minute slots starting at `start`.
    pub fn day(start: f64) -> Self {
        Self::new(start, 60, 1440)
    }

    pub fn slot_start(&self, slot: u32) -> f64 {
        self.start + f64::from(slot) * f64::from(self.slot_seconds)
    }

    pub fn span_seconds(&self) -> f64 {
        f64::from(self.slot_seconds) * f64::from(self.slot_count)
    }

    pub fn slots(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        (0..self.slot_count).map(move |s| (s, self.slot_start(s)))
    }
}
