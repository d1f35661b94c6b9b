//! Keplerian orbital elements and conversion to/from Cartesian states.

use thiserror::Error;

use crate::constants::MU_EARTH;
use crate::state::{Epoch, Frame, StateError, StateVector, Vec3};

/// Classical orbital elements; angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalElements {
    /// Semi-major axis (km).
    pub semi_major_axis: f64,
    /// Eccentricity; only closed orbits (e < 1) are supported.
    pub eccentricity: f64,
    /// Inclination (rad).
    pub inclination: f64,
    /// Right ascension of ascending node (rad).
    pub raan: f64,
    /// Argument of periapsis (rad).
    pub arg_periapsis: f64,
    /// True anomaly (rad).
    pub true_anomaly: f64,
}

impl OrbitalElements {
    /// Circular equatorial orbit of the given radius, at true anomaly 0.
    pub fn circular(radius_km: f64) -> Self {
        OrbitalElements {
            semi_major_axis: radius_km,
            eccentricity: 0.0,
            inclination: 0.0,
            raan: 0.0,
            arg_periapsis: 0.0,
            true_anomaly: 0.0,
        }
    }

    /// Orbital period 2π√(a³/μ) (s).
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI * (self.semi_major_axis.powi(3) / MU_EARTH).sqrt()
    }
}

#[derive(Debug, Clone, Error)]
pub enum ElementsError {
    #[error("only closed orbits are supported, got eccentricity {0}")]
    UnsupportedOrbit(f64),
    #[error("invalid elements: {0}")]
    Invalid(&'static str),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Inertial Cartesian state from Keplerian elements at the given epoch.
pub fn elements_to_state(el: &OrbitalElements, epoch: Epoch) -> Result<StateVector, ElementsError> {
    if el.eccentricity >= 1.0 {
        return Err(ElementsError::UnsupportedOrbit(el.eccentricity));
    }
    if el.eccentricity < 0.0 {
        return Err(ElementsError::Invalid("eccentricity must be non-negative"));
    }
    if el.semi_major_axis <= 0.0 || el.semi_major_axis.is_nan() {
        return Err(ElementsError::Invalid("semi-major axis must be positive"));
    }

    let p = el.semi_major_axis * (1.0 - el.eccentricity * el.eccentricity);
    let (sin_nu, cos_nu) = el.true_anomaly.sin_cos();
    let r_mag = p / (1.0 + el.eccentricity * cos_nu);

    // perifocal frame
    let r_pqw = Vec3::new(r_mag * cos_nu, r_mag * sin_nu, 0.0);
    let v_factor = (MU_EARTH / p).sqrt();
    let v_pqw = Vec3::new(
        -v_factor * sin_nu,
        v_factor * (el.eccentricity + cos_nu),
        0.0,
    );

    let (sin_raan, cos_raan) = el.raan.sin_cos();
    let (sin_argp, cos_argp) = el.arg_periapsis.sin_cos();
    let (sin_i, cos_i) = el.inclination.sin_cos();

    let rot = nalgebra::Matrix3::new(
        cos_raan * cos_argp - sin_raan * sin_argp * cos_i,
        -cos_raan * sin_argp - sin_raan * cos_argp * cos_i,
        sin_raan * sin_i,
        sin_raan * cos_argp + cos_raan * sin_argp * cos_i,
        -sin_raan * sin_argp + cos_raan * cos_argp * cos_i,
        -cos_raan * sin_i,
        sin_argp * sin_i,
        cos_argp * sin_i,
        cos_i,
    );

    Ok(StateVector::new(
        epoch,
        rot * r_pqw,
        rot * v_pqw,
        Frame::Eci,
    )?)
}

/// Keplerian elements recovered from an inertial Cartesian state.
///
/// Degenerate geometries use the usual conventions: equatorial orbits take
/// RAAN = 0, circular orbits take argument of periapsis = 0 and fold the
/// longitude into the true anomaly.
pub fn state_to_elements(s: &StateVector) -> Result<OrbitalElements, ElementsError> {
    if s.frame != Frame::Eci {
        return Err(StateError::FrameMismatch {
            expected: Frame::Eci,
            found: s.frame,
        }
        .into());
    }
    let r = s.position;
    let v = s.velocity;
    let r_mag = r.norm();
    let h = r.cross(&v);
    let h_mag = h.norm();
    if h_mag < 1e-12 {
        return Err(ElementsError::Invalid("degenerate rectilinear trajectory"));
    }

    let energy = v.norm_squared() / 2.0 - MU_EARTH / r_mag;
    if energy >= 0.0 {
        return Err(ElementsError::UnsupportedOrbit(f64::INFINITY));
    }
    let a = -MU_EARTH / (2.0 * energy);

    let e_vec = (r * (v.norm_squared() - MU_EARTH / r_mag) - v * r.dot(&v)) / MU_EARTH;
    let e = e_vec.norm();
    if e >= 1.0 {
        return Err(ElementsError::UnsupportedOrbit(e));
    }

    let inclination = (h.z / h_mag).clamp(-1.0, 1.0).acos();
    let n = Vec3::new(-h.y, h.x, 0.0); // node vector ẑ×h
    let n_mag = n.norm();

    let eps = 1e-11;
    let raan = if n_mag > eps {
        wrap_angle(n.y.atan2(n.x))
    } else {
        0.0
    };

    let (arg_periapsis, true_anomaly) = if e > eps {
        let argp = if n_mag > eps {
            let mut w = ((n.dot(&e_vec)) / (n_mag * e)).clamp(-1.0, 1.0).acos();
            if e_vec.z < 0.0 {
                w = 2.0 * std::f64::consts::PI - w;
            }
            w
        } else {
            // equatorial: measure from the x-axis, signed by h_z
            let mut w = e_vec.y.atan2(e_vec.x);
            if h.z < 0.0 {
                w = -w;
            }
            wrap_angle(w)
        };
        let mut nu = ((e_vec.dot(&r)) / (e * r_mag)).clamp(-1.0, 1.0).acos();
        if r.dot(&v) < 0.0 {
            nu = 2.0 * std::f64::consts::PI - nu;
        }
        (wrap_angle(argp), wrap_angle(nu))
    } else if n_mag > eps {
        // circular inclined: argument of latitude stands in for nu
        let mut u = ((n.dot(&r)) / (n_mag * r_mag)).clamp(-1.0, 1.0).acos();
        if r.z < 0.0 {
            u = 2.0 * std::f64::consts::PI - u;
        }
        (0.0, wrap_angle(u))
    } else {
        // circular equatorial: true longitude
        let mut l = r.y.atan2(r.x);
        if h.z < 0.0 {
            l = -l;
        }
        (0.0, wrap_angle(l))
    };

    Ok(OrbitalElements {
        semi_major_axis: a,
        eccentricity: e,
        inclination,
        raan,
        arg_periapsis,
        true_anomaly,
    })
}

fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = a % two_pi;
    if w < 0.0 {
        w += two_pi;
    }
    w
}
