//! Foundational state, time, and covariance types shared by every module.

use nalgebra::{SMatrix, Vector3};
use thiserror::Error;

use crate::constants::R_EARTH;

/// 3-component vector of km (position context) or km/s (velocity context).
pub type Vec3 = Vector3<f64>;

/// 6×6 matrix, row/column order [x, y, z, vx, vy, vz].
pub type Matrix6 = SMatrix<f64, 6, 6>;

/// 3×6 measurement Jacobian shape.
pub type Matrix3x6 = SMatrix<f64, 3, 6>;

/// States whose radius falls below `R_EARTH − SANITY_MARGIN_KM` are rejected
/// at construction; the margin exists so that near-surface geometry (ground
/// stations, reentry edge cases) is still representable.
const SANITY_MARGIN_KM: f64 = 100.0;

/// Errors from core type construction and frame conversion.
#[derive(Debug, Clone, Error)]
pub enum StateError {
    #[error("epoch must be finite and non-negative, got {0}")]
    InvalidEpoch(f64),
    #[error("non-finite component in {0}")]
    NonFinite(&'static str),
    #[error("state radius {radius_km:.3} km is more than {SANITY_MARGIN_KM} km inside the Earth")]
    InsideEarth { radius_km: f64 },
    #[error("expected frame {expected:?}, found {found:?}")]
    FrameMismatch { expected: Frame, found: Frame },
    #[error("covariance asymmetric: max |m - mᵀ| = {max_asymmetry:.3e} exceeds tolerance")]
    AsymmetricCovariance { max_asymmetry: f64 },
    #[error("covariance not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
}

/// Scenario-relative time in seconds.
///
/// There is no calendar arithmetic anywhere in the toolkit; an epoch is just
/// seconds past scenario start.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Epoch(f64);

impl Epoch {
    pub const ZERO: Epoch = Epoch(0.0);

    pub fn new(seconds: f64) -> Result<Self, StateError> {
        if !seconds.is_finite() || seconds < 0.0 {
            return Err(StateError::InvalidEpoch(seconds));
        }
        Ok(Epoch(seconds))
    }

    /// Seconds past scenario start.
    pub fn seconds(&self) -> f64 {
        self.0
    }

    /// This epoch shifted forward by `dt` seconds.
    pub fn plus(&self, dt: f64) -> Result<Self, StateError> {
        Epoch::new(self.0 + dt)
    }
}

impl std::fmt::Display for Epoch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "t={}s", self.0)
    }
}

/// Reference frame tag carried by every state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Earth-centered inertial; dynamics are integrated here.
    Eci,
    /// Earth-centered Earth-fixed, rotating uniformly at `OMEGA_EARTH`.
    Ecef,
}

/// Satellite position and velocity at an epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub epoch: Epoch,
    /// km
    pub position: Vec3,
    /// km/s
    pub velocity: Vec3,
    pub frame: Frame,
}

impl StateVector {
    pub fn new(
        epoch: Epoch,
        position: Vec3,
        velocity: Vec3,
        frame: Frame,
    ) -> Result<Self, StateError> {
        if !position.iter().all(|c| c.is_finite()) {
            return Err(StateError::NonFinite("position"));
        }
        if !velocity.iter().all(|c| c.is_finite()) {
            return Err(StateError::NonFinite("velocity"));
        }
        let radius = position.norm();
        if radius <= R_EARTH - SANITY_MARGIN_KM {
            return Err(StateError::InsideEarth { radius_km: radius });
        }
        Ok(StateVector {
            epoch,
            position,
            velocity,
            frame,
        })
    }

    /// Geocentric distance (km).
    pub fn radius(&self) -> f64 {
        self.position.norm()
    }

    /// Speed (km/s).
    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }

    /// Specific orbital energy v²/2 − μ/r (km²/s²).
    pub fn specific_energy(&self) -> f64 {
        self.speed().powi(2) / 2.0 - crate::constants::MU_EARTH / self.radius()
    }

    /// Specific angular momentum r × v (km²/s).
    pub fn angular_momentum(&self) -> Vec3 {
        self.position.cross(&self.velocity)
    }

    /// Semi-major axis from vis-viva (km); negative for hyperbolic states.
    pub fn semi_major_axis(&self) -> f64 {
        -crate::constants::MU_EARTH / (2.0 * self.specific_energy())
    }

    /// The six state components as [x, y, z, vx, vy, vz].
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.position.x,
            self.position.y,
            self.position.z,
            self.velocity.x,
            self.velocity.y,
            self.velocity.z,
        ]
    }
}

/// Symmetric positive-semidefinite 6×6 uncertainty matrix.
///
/// Units are km² on the position block, km²/s on the cross blocks, and
/// km²/s² on the velocity block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance6(Matrix6);

/// Relative tolerance on |m − mᵀ| for accepting user-provided covariances.
const SYMMETRY_REL_TOL: f64 = 1e-9;

/// Eigenvalues may sit this far below zero, relative to the trace, before the
/// matrix is rejected as indefinite.
const PSD_REL_TOL: f64 = 1e-12;

impl Covariance6 {
    /// Validates symmetry (within `1e-9` relative) and positive
    /// semidefiniteness (eigenvalues ≥ −1e-12·trace).
    pub fn new(m: Matrix6) -> Result<Self, StateError> {
        let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let max_asym = (m - m.transpose())
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        if max_asym > SYMMETRY_REL_TOL * scale.max(f64::EPSILON) {
            return Err(StateError::AsymmetricCovariance {
                max_asymmetry: max_asym,
            });
        }
        let sym = (m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigenvalues();
        let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let trace = sym.trace();
        if min_eig < -PSD_REL_TOL * trace.abs().max(f64::EPSILON) {
            return Err(StateError::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Covariance6(sym))
    }

    /// Diagonal covariance from per-axis position and velocity variances.
    pub fn diagonal(pos_var: f64, vel_var: f64) -> Self {
        let mut m = Matrix6::zeros();
        for i in 0..3 {
            m[(i, i)] = pos_var;
            m[(i + 3, i + 3)] = vel_var;
        }
        Covariance6(m)
    }

    /// Diagonal covariance from per-axis position and velocity standard deviations.
    pub fn from_sigmas(pos_sigma: f64, vel_sigma: f64) -> Self {
        Self::diagonal(pos_sigma * pos_sigma, vel_sigma * vel_sigma)
    }

    pub fn zero() -> Self {
        Covariance6(Matrix6::zeros())
    }

    pub fn matrix(&self) -> &Matrix6 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Round-off hygiene for filter updates: forces exact symmetry via
    /// (m + mᵀ)/2 without re-running the PSD eigen check.
    pub(crate) fn resymmetrized(m: Matrix6) -> Self {
        Covariance6((m + m.transpose()) * 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_rejects_negative_and_non_finite() {
        assert!(Epoch::new(-1.0).is_err());
        assert!(Epoch::new(f64::NAN).is_err());
        assert!(Epoch::new(0.0).is_ok());
    }

    #[test]
    fn state_rejects_non_finite_components() {
        let bad = Vec3::new(f64::NAN, 0.0, 0.0);
        assert!(matches!(
            StateVector::new(Epoch::ZERO, bad, Vec3::zeros(), Frame::Eci),
            Err(StateError::NonFinite("position"))
        ));
    }

    #[test]
    fn state_rejects_deep_subsurface_position() {
        let r = Vec3::new(1000.0, 0.0, 0.0);
        assert!(matches!(
            StateVector::new(Epoch::ZERO, r, Vec3::zeros(), Frame::Eci),
            Err(StateError::InsideEarth { .. })
        ));
        // near-surface is fine (ground stations live here)
        let surface = Vec3::new(R_EARTH, 0.0, 0.0);
        assert!(StateVector::new(Epoch::ZERO, surface, Vec3::zeros(), Frame::Ecef).is_ok());
    }

    #[test]
    fn covariance_rejects_asymmetric_input() {
        let mut m = Matrix6::identity();
        m[(0, 1)] = 1.0;
        assert!(matches!(
            Covariance6::new(m),
            Err(StateError::AsymmetricCovariance { .. })
        ));
    }

    #[test]
    fn covariance_rejects_indefinite_input() {
        let mut m = Matrix6::identity();
        m[(2, 2)] = -0.5;
        assert!(matches!(
            Covariance6::new(m),
            Err(StateError::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn covariance_accepts_psd_and_zero() {
        assert!(Covariance6::new(Matrix6::identity()).is_ok());
        assert!(Covariance6::new(Matrix6::zeros()).is_ok());
        let d = Covariance6::diagonal(1e-4, 1e-8);
        assert_eq!(d.matrix()[(0, 0)], 1e-4);
        assert_eq!(d.matrix()[(5, 5)], 1e-8);
    }

    #[test]
    fn energy_of_circular_orbit() {
        use crate::constants::MU_EARTH;
        let r = 7000.0;
        let v = (MU_EARTH / r).sqrt();
        let s = StateVector::new(
            Epoch::ZERO,
            Vec3::new(r, 0.0, 0.0),
            Vec3::new(0.0, v, 0.0),
            Frame::Eci,
        )
        .unwrap();
        // E = −μ/2a with a = r for circular
        let expected = -MU_EARTH / (2.0 * r);
        assert!((s.specific_energy() - expected).abs() < 1e-12 * expected.abs());
        assert!((s.semi_major_axis() - r).abs() < 1e-9);
    }
}
