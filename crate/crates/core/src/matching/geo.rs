use thiserror::Error;

use crate::kg::GeoPoint;

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("coordinate out of range: lat {lat}, lon {lon}")]
pub struct RangeError {
    pub lat: f64,
    pub lon: f64,
}

/// Great-circle distance in meters on a sphere of radius 6371 km.
pub fn haversine(a: GeoPoint, b: GeoPoint) -> Result<f64, RangeError> {
    for p in [a, b] {
        if !p.in_range() {
            return Err(RangeError { lat: p.lat, lon: p.lon });
        }
    }
    Ok(haversine_unchecked(a, b))
}

pub(crate) fn haversine_unchecked(a: GeoPoint, b: GeoPoint) -> f64 {
    let p1 = a.lat.to_radians();
    let p2 = b.lat.to_radians();
    let dp = (b.lat - a.lat).to_radians();
    let dl = (b.lon - a.lon).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}
