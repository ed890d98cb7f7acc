use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::EARTH_RADIUS_M;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("station and satellite positions coincide")]
    CoincidentPoints,
}

/// Latitude/longitude in degrees, altitude in meters above the mean sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPoint {
    pub latitude: f64,
    pub longitude: f64,
    pub altitude: f64,
}

impl GeodeticPoint {
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Self {
        Self {
            latitude,
            longitude,
            altitude,
        }
    }

    pub fn on_ground(latitude: f64, longitude: f64) -> Self {
        Self::new(latitude, longitude, 0.0)
    }
}

/// Earth-centred Earth-fixed cartesian position, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcefPosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EcefPosition {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn distance(&self, o: &Self) -> f64 {
        self.sub(o).norm()
    }

    /// Rotation about the polar axis by `angle` radians.
    pub fn rotate_z(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

pub fn geodetic_to_ecef(p: &GeodeticPoint) -> EcefPosition {
    let r = EARTH_RADIUS_M + p.altitude;
    let (slat, clat) = p.latitude.to_radians().sin_cos();
    let (slon, clon) = p.longitude.to_radians().sin_cos();
    EcefPosition::new(r * clat * clon, r * clat * slon, r * slat)
}

/// Spherical latitude/longitude/altitude of an Earth-fixed point.
pub fn sub_point(p: &EcefPosition) -> GeodeticPoint {
    let r = p.norm();
    let lat = (p.z / r).clamp(-1.0, 1.0).asin().to_degrees();
    let mut lon = p.y.atan2(p.x).to_degrees();
    if lon >= 180.0 {
        lon -= 360.0;
    }
    GeodeticPoint::new(lat, lon, r - EARTH_RADIUS_M)
}

/// Elevation of `sat` above the local horizontal plane at `gs`, degrees in `(-90, 90]`.
pub fn elevation_angle(gs: &EcefPosition, sat: &EcefPosition) -> Result<f64, GeometryError> {
    let los = sat.sub(gs);
    let range = los.norm();
    let r = gs.norm();
    if range == 0.0 || r == 0.0 {
        return Err(GeometryError::CoincidentPoints);
    }
    let sin_el = (los.dot(gs) / (range * r)).clamp(-1.0, 1.0);
    Ok(sin_el.asin().to_degrees())
}

/// Haversine distance along the mean sphere, meters.
pub fn great_circle_distance(a: &GeodeticPoint, b: &GeodeticPoint) -> f64 {
    let (la, lb) = (a.latitude.to_radians(), b.latitude.to_radians());
    let dlat = lb - la;
    let dlon = (b.longitude - a.longitude).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + la.cos() * lb.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().clamp(0.0, 1.0).asin()
}

/// Ground radius of the region seeing a satellite at `altitude` above `min_elevation` degrees.
pub fn footprint_radius(altitude: f64, min_elevation: f64) -> f64 {
    let eps = min_elevation.to_radians();
    let central = (EARTH_RADIUS_M * eps.cos() / (EARTH_RADIUS_M + altitude))
        .clamp(-1.0, 1.0)
        .acos()
        - eps;
    (EARTH_RADIUS_M * central).max(0.0)
}
