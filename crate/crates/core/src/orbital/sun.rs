use super::{GeodeticPoint, SECONDS_PER_DAY};

const J2000: f64 = 2_451_545.0;

pub fn julian_date(unix: f64) -> f64 {
    unix / SECONDS_PER_DAY + 2_440_587.5
}

/// Greenwich mean sidereal angle in radians, linear in days since J2000.
pub fn gmst_rad(unix: f64) -> f64 {
    let d = julian_date(unix) - J2000;
    (280.460_618_37 + 360.985_647_366_29 * d)
        .rem_euclid(360.0)
        .to_radians()
}

/// Solar elevation in degrees at `gs` and `t` (Unix seconds).
///
/// Low-precision solar coordinates (mean longitude and anomaly with a two-term
/// equation of centre); good to a fraction of a degree over 2000-2100.
pub fn sun_elevation(gs: &GeodeticPoint, t: f64) -> f64 {
    let n = julian_date(t) - J2000;
    let mean_lon = (280.460 + 0.985_647_4 * n).rem_euclid(360.0);
    let g = (357.528 + 0.985_600_3 * n).rem_euclid(360.0).to_radians();
    let ecl_lon = (mean_lon + 1.915 * g.sin() + 0.020 * (2.0 * g).sin()).to_radians();
    let obliquity = (23.439 - 0.000_000_4 * n).to_radians();

    let ra = (obliquity.cos() * ecl_lon.sin()).atan2(ecl_lon.cos());
    let dec = (obliquity.sin() * ecl_lon.sin()).asin();
    let hour_angle = gmst_rad(t) + gs.longitude.to_radians() - ra;
    let lat = gs.latitude.to_radians();
    let sin_el = lat.sin() * dec.sin() + lat.cos() * dec.cos() * hour_angle.cos();
    sin_el.clamp(-1.0, 1.0).asin().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    // 2023-09-23 00:00:00 UTC, hours after the September equinox.
    const SEP_EQUINOX_DAY: f64 = 1_695_427_200.0;
    // 2023-12-22 00:00:00 UTC
    const DEC_SOLSTICE_DAY: f64 = 1_703_203_200.0;

    fn extreme_over_day(gs: &GeodeticPoint, day: f64, max: bool) -> f64 {
        (0..1440)
            .map(|m| sun_elevation(gs, day + 60.0 * m as f64))
            .fold(if max { f64::MIN } else { f64::MAX }, |a, b| if max { a.max(b) } else { a.min(b) })
    }

    #[test]
    fn j2000_epoch() {
        // 2000-01-01 12:00:00 UTC
        assert!((julian_date(946_728_000.0) - J2000).abs() < 1e-9);
        assert!((gmst_rad(946_728_000.0).to_degrees() - 280.46061837).abs() < 1e-6);
    }

    #[test]
    fn equator_noon_and_midnight_at_equinox() {
        let gs = GeodeticPoint::on_ground(0.0, 0.0);
        let noon = extreme_over_day(&gs, SEP_EQUINOX_DAY, true);
        let midnight = extreme_over_day(&gs, SEP_EQUINOX_DAY, false);
        assert!((noon - 90.0).abs() < 2.0, "{noon}");
        assert!((midnight + 90.0).abs() < 2.0, "{midnight}");
    }

    #[test]
    fn winter_solstice_noon_at_45_north() {
        // 90 - 45 - 23.44
        let expected = 90.0 - 45.0 - 23.44;
        let gs = GeodeticPoint::on_ground(45.0, 10.0);
        let noon = extreme_over_day(&gs, DEC_SOLSTICE_DAY, true);
        assert!((noon - expected).abs() < 1.0, "{noon}");
    }

    #[test]
    fn noon_near_twelve_utc_at_greenwich() {
        let gs = GeodeticPoint::on_ground(0.0, 0.0);
        let (best, _) = (0..1440)
            .map(|m| (m, sun_elevation(&gs, SEP_EQUINOX_DAY + 60.0 * m as f64)))
            .fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        // equation of time in late September is about +7.5 min
        assert!((best as i32 - 712).abs() <= 3, "{best}");
    }

    #[test]
    fn threshold_crossings_are_even() {
        for &(lat, lon) in &[(0.0, 0.0), (51.5, -0.1), (-33.9, 151.2), (35.7, 139.7), (64.0, -21.0)] {
            let gs = GeodeticPoint::on_ground(lat, lon);
            for &threshold in &[-45.0, -6.0, 0.0, 10.0, 30.0] {
                let samples: Vec<bool> = (0..=1440)
                    .map(|m| sun_elevation(&gs, SEP_EQUINOX_DAY + 60.0 * m as f64) > threshold)
                    .collect();
                let crossings = samples.windows(2).filter(|w| w[0] != w[1]).count();
                assert_eq!(samples[0], samples[1440], "lat {lat} threshold {threshold}");
                if threshold == 0.0 && lat.abs() < 60.0 {
                    assert_eq!(crossings, 2, "one sunrise and one sunset");
                }
                assert_eq!(crossings % 2, 0, "lat {lat} threshold {threshold}");
            }
        }
    }
}
