//! Conversions between the inertial (ECI) and rotating (ECEF) frames.
//!
//! Earth rotation is modeled as uniform rotation about the z-axis at
//! `OMEGA_EARTH`; no polar motion, precession, or nutation. The rotation
//! angle at epoch t is θ = ω·t with θ = 0 at scenario start, so the two
//! frames coincide at t = 0.

use nalgebra::Matrix3;

use crate::constants::OMEGA_EARTH;
use crate::state::{Frame, StateError, StateVector, Vec3};

/// Rotation matrix taking ECI coordinates to ECEF coordinates at epoch t (s).
pub fn eci_to_ecef_rotation(t: f64) -> Matrix3<f64> {
    let theta = OMEGA_EARTH * t;
    let (s, c) = theta.sin_cos();
    Matrix3::new(
        c, s, 0.0, //
        -s, c, 0.0, //
        0.0, 0.0, 1.0,
    )
}

/// Earth angular velocity vector (rad/s) in either frame (both share the z-axis).
pub fn earth_angular_velocity() -> Vec3 {
    Vec3::new(0.0, 0.0, OMEGA_EARTH)
}

/// Rotates an inertial state into the Earth-fixed frame at its epoch.
///
/// The velocity transforms as v_ecef = Θ(v_eci − ω×r_eci), accounting for the
/// frame's own rotation.
pub fn eci_to_ecef(s: &StateVector) -> Result<StateVector, StateError> {
    if s.frame != Frame::Eci {
        return Err(StateError::FrameMismatch {
            expected: Frame::Eci,
            found: s.frame,
        });
    }
    let rot = eci_to_ecef_rotation(s.epoch.seconds());
    let omega = earth_angular_velocity();
    let position = rot * s.position;
    let velocity = rot * (s.velocity - omega.cross(&s.position));
    StateVector::new(s.epoch, position, velocity, Frame::Ecef)
}

/// Exact inverse of [`eci_to_ecef`] at the same epoch.
pub fn ecef_to_eci(s: &StateVector) -> Result<StateVector, StateError> {
    if s.frame != Frame::Ecef {
        return Err(StateError::FrameMismatch {
            expected: Frame::Ecef,
            found: s.frame,
        });
    }
    let rot = eci_to_ecef_rotation(s.epoch.seconds()).transpose();
    let omega = earth_angular_velocity();
    let position = rot * s.position;
    let velocity = rot * s.velocity + omega.cross(&position);
    StateVector::new(s.epoch, position, velocity, Frame::Eci)
}

/// ECEF position of a state in either frame.
pub(crate) fn position_ecef(s: &StateVector) -> Vec3 {
    match s.frame {
        Frame::Ecef => s.position,
        Frame::Eci => eci_to_ecef_rotation(s.epoch.seconds()) * s.position,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Epoch;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn state(t: f64, r: Vec3, v: Vec3, frame: Frame) -> StateVector {
        StateVector::new(Epoch::new(t).unwrap(), r, v, frame).unwrap()
    }

    #[test]
    fn zero_epoch_is_a_relabel() {
        let s = state(
            0.0,
            Vec3::new(7000.0, 123.0, -456.0),
            Vec3::new(1.0, 2.0, 3.0),
            Frame::Eci,
        );
        let e = eci_to_ecef(&s).unwrap();
        assert_eq!(e.frame, Frame::Ecef);
        assert_eq!(e.position, s.position);
        // velocity picks up the −ω×r term even at t=0
        let omega = earth_angular_velocity();
        assert_relative_eq!(
            e.velocity,
            s.velocity - omega.cross(&s.position),
            epsilon = 1e-15
        );
    }

    #[test]
    fn full_revolution_restores_position() {
        let t = 2.0 * PI / OMEGA_EARTH;
        let s = state(t, Vec3::new(7000.0, 0.0, 0.0), Vec3::zeros(), Frame::Eci);
        let e = eci_to_ecef(&s).unwrap();
        assert_relative_eq!(e.position.x, 7000.0, epsilon = 1e-6);
        assert_relative_eq!(e.position.y, 0.0, epsilon = 1e-6);
        assert_relative_eq!(e.position.z, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn quarter_revolution_hand_evaluated() {
        // Hand evaluation: θ = π/2 gives Θ = [[0,1,0],[−1,0,0],[0,0,1]], so
        // (7000,0,0) lands on (0,−7000,0); with v_eci = 0 the ECEF velocity is
        // Θ(−ω×r) = Θ(0,−7000ω,0) = (−7000ω, 0, 0).
        let t = (PI / 2.0) / OMEGA_EARTH;
        let s = state(t, Vec3::new(7000.0, 0.0, 0.0), Vec3::zeros(), Frame::Eci);
        let e = eci_to_ecef(&s).unwrap();
        assert_relative_eq!(e.position.x, 0.0, epsilon = 1e-6);
        assert_relative_eq!(e.position.y, -7000.0, epsilon = 1e-6);
        assert_relative_eq!(e.position.z, 0.0, epsilon = 1e-6);
        assert_relative_eq!(e.velocity.x, -7000.0 * OMEGA_EARTH, epsilon = 1e-12);
        assert_relative_eq!(e.velocity.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(e.velocity.z, 0.0, epsilon = 1e-12);

        // and back
        let back = ecef_to_eci(&e).unwrap();
        assert_relative_eq!(back.position, s.position, epsilon = 1e-9);
        assert_relative_eq!(back.velocity, s.velocity, epsilon = 1e-12);
    }

    #[test]
    fn wrong_frame_is_rejected() {
        let s = state(
            10.0,
            Vec3::new(7000.0, 0.0, 0.0),
            Vec3::zeros(),
            Frame::Ecef,
        );
        assert!(matches!(
            eci_to_ecef(&s),
            Err(StateError::FrameMismatch { .. })
        ));
        let s = state(10.0, Vec3::new(7000.0, 0.0, 0.0), Vec3::zeros(), Frame::Eci);
        assert!(matches!(
            ecef_to_eci(&s),
            Err(StateError::FrameMismatch { .. })
        ));
    }
}
