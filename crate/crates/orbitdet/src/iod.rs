//! Initial orbit determination: trilateration from ground-station ranges and
//! the Gibbs method turning three coplanar position vectors into a full state.

use thiserror::Error;

use crate::constants::{R_EARTH, WGS84_E2};
use crate::frames::ecef_to_eci;
use crate::state::{Epoch, Frame, StateError, StateVector, Vec3};

/// A ground site given in geodetic coordinates on the WGS84 ellipsoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStation {
    /// Geodetic latitude (rad), |lat| ≤ π/2.
    pub latitude: f64,
    /// Longitude (rad), normalized to (−π, π].
    pub longitude: f64,
    /// Altitude above the ellipsoid (km).
    pub altitude: f64,
}

impl GroundStation {
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Result<Self, IodError> {
        if !latitude.is_finite() || latitude.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(IodError::InvalidStation("latitude out of range"));
        }
        if !longitude.is_finite() {
            return Err(IodError::InvalidStation("longitude not finite"));
        }
        if altitude <= -1.0 || altitude.is_nan() {
            return Err(IodError::InvalidStation("altitude below -1 km"));
        }
        let mut lon = longitude % (2.0 * std::f64::consts::PI);
        if lon > std::f64::consts::PI {
            lon -= 2.0 * std::f64::consts::PI;
        } else if lon <= -std::f64::consts::PI {
            lon += 2.0 * std::f64::consts::PI;
        }
        Ok(GroundStation {
            latitude,
            longitude: lon,
            altitude,
        })
    }

    /// Convenience constructor from degrees.
    pub fn from_degrees(lat_deg: f64, lon_deg: f64, altitude_km: f64) -> Result<Self, IodError> {
        Self::new(lat_deg.to_radians(), lon_deg.to_radians(), altitude_km)
    }

    /// Unit outward normal of the ellipsoid at this station (ECEF).
    pub fn up(&self) -> Vec3 {
        let (sin_lat, cos_lat) = self.latitude.sin_cos();
        let (sin_lon, cos_lon) = self.longitude.sin_cos();
        Vec3::new(cos_lat * cos_lon, cos_lat * sin_lon, sin_lat)
    }
}

/// A range (and optional range-rate) observation of the satellite from a station.
///
/// Range-rate is carried for completeness but unused by the position-only
/// trilateration solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeMeasurement {
    pub station: GroundStation,
    pub epoch: Epoch,
    /// km, > 0.
    pub range: f64,
    /// km/s.
    pub range_rate: Option<f64>,
}

impl RangeMeasurement {
    pub fn new(
        station: GroundStation,
        epoch: Epoch,
        range: f64,
        range_rate: Option<f64>,
    ) -> Result<Self, IodError> {
        if range <= 0.0 || !range.is_finite() {
            return Err(IodError::InvalidRange(range));
        }
        Ok(RangeMeasurement {
            station,
            epoch,
            range,
            range_rate,
        })
    }
}

/// Default coplanarity tolerance for Gibbs, as |sin| of the out-of-plane
/// angle; 0.0175 ≈ 1°.
pub const DEFAULT_COPLANARITY_TOL: f64 = 0.0175;

/// Pairs of input vectors closer than this angular separation are rejected
/// as ill-conditioned (0.1°).
const MIN_SEPARATION_RAD: f64 = 0.1 * std::f64::consts::PI / 180.0;

/// Epochs must agree within this tolerance for simultaneous-range solves (s).
const EPOCH_TOL_S: f64 = 1e-6;

#[derive(Debug, Clone, Error)]
pub enum IodError {
    #[error("invalid ground station: {0}")]
    InvalidStation(&'static str),
    #[error("range must be positive and finite, got {0}")]
    InvalidRange(f64),
    #[error("range measurements must share an epoch within {EPOCH_TOL_S} s")]
    EpochMismatch,
    #[error("degenerate station geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("ranges admit no real intersection (inconsistent measurements)")]
    InfeasibleRanges,
    #[error("position vectors are not coplanar: out-of-plane sine {deviation:.4} exceeds tolerance {tolerance:.4}")]
    NonCoplanar { deviation: f64, tolerance: f64 },
    #[error("ill-conditioned geometry: vectors separated by less than 0.1 degrees")]
    IllConditioned,
    #[error("measurement epochs must be strictly increasing")]
    NonIncreasingEpochs,
    #[error("IOD failed at epoch {epoch} (triplet {index}): {source}")]
    AtEpoch {
        index: usize,
        epoch: Epoch,
        #[source]
        source: Box<IodError>,
    },
    #[error(transparent)]
    State(#[from] StateError),
}

/// WGS84 geodetic coordinates to an ECEF position (km).
pub fn geodetic_to_ecef(g: &GroundStation) -> Vec3 {
    let (sin_lat, cos_lat) = g.latitude.sin_cos();
    let (sin_lon, cos_lon) = g.longitude.sin_cos();
    // prime vertical radius of curvature
    let n = R_EARTH / (1.0 - WGS84_E2 * sin_lat * sin_lat).sqrt();
    Vec3::new(
        (n + g.altitude) * cos_lat * cos_lon,
        (n + g.altitude) * cos_lat * sin_lon,
        (n * (1.0 - WGS84_E2) + g.altitude) * sin_lat,
    )
}

/// Both algebraic solutions of the three-sphere intersection, unordered.
///
/// [`trilaterate`] picks the above-Earth branch; this variant exposes the
/// sibling solution for diagnostic use.
pub fn trilaterate_both(
    m1: &RangeMeasurement,
    m2: &RangeMeasurement,
    m3: &RangeMeasurement,
) -> Result<(Vec3, Vec3), IodError> {
    let t0 = m1.epoch.seconds();
    if (m2.epoch.seconds() - t0).abs() > EPOCH_TOL_S
        || (m3.epoch.seconds() - t0).abs() > EPOCH_TOL_S
    {
        return Err(IodError::EpochMismatch);
    }

    let s1 = geodetic_to_ecef(&m1.station);
    let s2 = geodetic_to_ecef(&m2.station);
    let s3 = geodetic_to_ecef(&m3.station);

    // orthonormal basis of the station plane, origin at s1
    let d21 = s2 - s1;
    let d = d21.norm();
    if d < 1e-9 {
        return Err(IodError::DegenerateGeometry("two stations coincide"));
    }
    let ex = d21 / d;
    let d31 = s3 - s1;
    let i = ex.dot(&d31);
    let ey_raw = d31 - ex * i;
    let ey_norm = ey_raw.norm();
    if ey_norm < 1e-9 {
        return Err(IodError::DegenerateGeometry("stations are collinear"));
    }
    let ey = ey_raw / ey_norm;
    let ez = ex.cross(&ey);
    let j = ey.dot(&d31);

    let (r1, r2, r3) = (m1.range, m2.range, m3.range);
    let x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let y = (r1 * r1 - r3 * r3 + i * i + j * j - 2.0 * i * x) / (2.0 * j);
    let z_sq = r1 * r1 - x * x - y * y;
    // allow round-off grazing contact; anything clearly negative is infeasible
    let z = if z_sq >= 0.0 {
        z_sq.sqrt()
    } else if z_sq > -1e-9 * r1 * r1 {
        0.0
    } else {
        return Err(IodError::InfeasibleRanges);
    };

    let base = s1 + ex * x + ey * y;
    Ok((base + ez * z, base - ez * z))
}

/// Satellite ECEF position (km) from three simultaneous ranges.
///
/// Of the two sphere-intersection solutions, returns the one farther from the
/// geocenter: satellites sit above the stations.
pub fn trilaterate(
    m1: &RangeMeasurement,
    m2: &RangeMeasurement,
    m3: &RangeMeasurement,
) -> Result<Vec3, IodError> {
    let (a, b) = trilaterate_both(m1, m2, m3)?;
    Ok(if a.norm() >= b.norm() { a } else { b })
}

/// Gibbs method: velocity at the middle of three coplanar geocentric
/// positions (same inertial frame, time-ordered).
///
/// Returns v₂ (km/s) from
/// N = |r₁|(r₂×r₃) + |r₂|(r₃×r₁) + |r₃|(r₁×r₂),
/// D = r₁×r₂ + r₂×r₃ + r₃×r₁,
/// S = r₁(|r₂|−|r₃|) + r₂(|r₃|−|r₁|) + r₃(|r₁|−|r₂|),
/// v₂ = √(μ/(N·D)) (D×r₂/|r₂| + S).
pub fn gibbs(r1: &Vec3, r2: &Vec3, r3: &Vec3, mu: f64) -> Result<Vec3, IodError> {
    gibbs_with_tolerance(r1, r2, r3, mu, DEFAULT_COPLANARITY_TOL)
}

/// [`gibbs`] with an explicit coplanarity tolerance (|sin| of the
/// out-of-plane angle).
pub fn gibbs_with_tolerance(
    r1: &Vec3,
    r2: &Vec3,
    r3: &Vec3,
    mu: f64,
    coplanarity_tol: f64,
) -> Result<Vec3, IodError> {
    let n1 = r1.norm();
    let n2 = r2.norm();
    let n3 = r3.norm();

    // pairwise angular separation guard
    for (a, b) in [(r1, r2), (r2, r3), (r1, r3)] {
        let cos_sep = (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0);
        if cos_sep.acos() < MIN_SEPARATION_RAD {
            return Err(IodError::IllConditioned);
        }
    }

    let z23 = r2.cross(r3);
    let z23_norm = z23.norm();
    if z23_norm < 1e-12 {
        return Err(IodError::IllConditioned);
    }
    let deviation = (r1.dot(&z23) / (n1 * z23_norm)).abs();
    if deviation > coplanarity_tol {
        return Err(IodError::NonCoplanar {
            deviation,
            tolerance: coplanarity_tol,
        });
    }

    let z12 = r1.cross(r2);
    let z31 = r3.cross(r1);
    let n_vec = z23 * n1 + z31 * n2 + z12 * n3;
    let d_vec = z12 + z23 + z31;
    let s_vec = r1 * (n2 - n3) + r2 * (n3 - n1) + r3 * (n1 - n2);

    let nd = n_vec.norm() * d_vec.norm();
    if nd < 1e-12 {
        return Err(IodError::DegenerateGeometry("Gibbs N or D vanished"));
    }

    Ok((d_vec.cross(r2) / n2 + s_vec) * (mu / nd).sqrt())
}

/// Full classical IOD chain: trilaterate three epochs of simultaneous
/// ranges, rotate the fixes into the inertial frame, and apply Gibbs.
///
/// Returns the complete state at the middle epoch, inertial frame. Any
/// constituent failure is labeled with the offending epoch.
pub fn iod_pipeline(triplets: &[[RangeMeasurement; 3]; 3]) -> Result<StateVector, IodError> {
    let epochs: Vec<Epoch> = triplets.iter().map(|t| t[0].epoch).collect();
    if !(epochs[0].seconds() < epochs[1].seconds() && epochs[1].seconds() < epochs[2].seconds()) {
        return Err(IodError::NonIncreasingEpochs);
    }

    let mut positions_eci = Vec::with_capacity(3);
    for (index, triplet) in triplets.iter().enumerate() {
        let at = |e: IodError| IodError::AtEpoch {
            index,
            epoch: epochs[index],
            source: Box::new(e),
        };
        let p_ecef = trilaterate(&triplet[0], &triplet[1], &triplet[2]).map_err(at)?;
        let s_ecef =
            StateVector::new(epochs[index], p_ecef, Vec3::zeros(), Frame::Ecef).map_err(|e| {
                IodError::AtEpoch {
                    index,
                    epoch: epochs[index],
                    source: Box::new(e.into()),
                }
            })?;
        let s_eci = ecef_to_eci(&s_ecef).map_err(|e| IodError::AtEpoch {
            index,
            epoch: epochs[index],
            source: Box::new(e.into()),
        })?;
        positions_eci.push(s_eci.position);
    }

    let v2 = gibbs(
        &positions_eci[0],
        &positions_eci[1],
        &positions_eci[2],
        crate::constants::MU_EARTH,
    )?;
    Ok(StateVector::new(
        epochs[1],
        positions_eci[1],
        v2,
        Frame::Eci,
    )?)
}
