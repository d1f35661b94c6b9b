//! Physical constants used throughout the toolkit.
//!
//! Internal units are km, km/s, and seconds everywhere; conversion to meters
//! happens only at reporting boundaries.

/// Earth gravitational parameter GM (km³/s²).
pub const MU_EARTH: f64 = 398600.4418;

/// Earth equatorial radius (km), WGS84 semi-major axis.
pub const R_EARTH: f64 = 6378.137;

/// Second zonal harmonic coefficient of Earth's gravity field.
pub const J2: f64 = 1.08262668e-3;

/// Earth rotation rate (rad/s).
pub const OMEGA_EARTH: f64 = 7.2921159e-5;

/// WGS84 flattening.
pub const WGS84_F: f64 = 1.0 / 298.257223563;

/// WGS84 first eccentricity squared, e² = f(2 − f).
pub const WGS84_E2: f64 = WGS84_F * (2.0 - WGS84_F);

/// Meters per kilometer, for unit conversions at model boundaries.
pub const M_PER_KM: f64 = 1000.0;
