//! Property tests for the algebraic invariants: frame round-trips, Gibbs
//! geometry, trilateration residuals, geodetic normals, and RMSE behavior.

use orbitdet::constants::MU_EARTH;
use orbitdet::frames::{ecef_to_eci, eci_to_ecef};
use orbitdet::harness::rmse;
use orbitdet::iod::{geodetic_to_ecef, gibbs, trilaterate, GroundStation, RangeMeasurement};
use orbitdet::{Epoch, Frame, StateVector, Vec3};

use proptest::prelude::*;

fn finite_state() -> impl Strategy<Value = StateVector> {
    (
        0.0..200_000.0f64,   // epoch seconds
        6600.0..45_000.0f64, // radius
        -1.0..1.0f64,        // direction components
        -1.0..1.0f64,
        -1.0..1.0f64,
        -8.0..8.0f64, // velocity components
        -8.0..8.0f64,
        -8.0..8.0f64,
    )
        .prop_filter_map(
            "direction must not vanish",
            |(t, r, dx, dy, dz, vx, vy, vz)| {
                let dir = Vec3::new(dx, dy, dz);
                if dir.norm() < 1e-3 {
                    return None;
                }
                let position = dir.normalize() * r;
                let velocity = Vec3::new(vx, vy, vz);
                StateVector::new(Epoch::new(t).unwrap(), position, velocity, Frame::Eci).ok()
            },
        )
}

proptest! {
    #[test]
    fn frame_round_trip_is_identity(s in finite_state()) {
        let there = eci_to_ecef(&s).unwrap();
        let back = ecef_to_eci(&there).unwrap();
        let pos_rel = (back.position - s.position).norm() / s.position.norm();
        prop_assert!(pos_rel < 1e-9, "position round-trip error {pos_rel}");
        let vel_scale = s.velocity.norm().max(1.0);
        let vel_rel = (back.velocity - s.velocity).norm() / vel_scale;
        prop_assert!(vel_rel < 1e-9, "velocity round-trip error {vel_rel}");
    }

    #[test]
    fn rotation_preserves_position_norm(s in finite_state()) {
        let there = eci_to_ecef(&s).unwrap();
        let diff = (there.position.norm() - s.position.norm()).abs();
        prop_assert!(diff <= 1e-9 * s.position.norm());
    }

    #[test]
    fn gibbs_on_circular_arcs_matches_kepler(
        r in 6600.0..45_000.0f64,
        start in 0.0..std::f64::consts::TAU,
        step1 in 0.02..0.25f64,
        step2 in 0.02..0.25f64,
    ) {
        let angles = [start, start + step1, start + step1 + step2];
        let pts: Vec<Vec3> = angles
            .iter()
            .map(|a| Vec3::new(r * a.cos(), r * a.sin(), 0.0))
            .collect();
        let v2 = gibbs(&pts[0], &pts[1], &pts[2], MU_EARTH).unwrap();

        // scale-consistency with Kepler
        let expected = (MU_EARTH / r).sqrt();
        let rel = ((v2.norm() - expected) / expected).abs();
        prop_assert!(rel < 1e-9, "speed off by {rel} relative at r = {r}");

        // output lies in the orbital plane
        let normal = pts[0].cross(&pts[2]);
        let out_of_plane = v2.dot(&normal).abs() / (normal.norm() * v2.norm());
        prop_assert!(out_of_plane < 1e-9);
    }

    #[test]
    fn trilateration_residuals_vanish_on_noiseless_ranges(
        sat_radius in 6700.0..7600.0f64,
        sat_lat in -60.0..60.0f64,
        sat_lon in -180.0..180.0f64,
        off1 in -6.0..-2.0f64,
        off2 in 2.0..6.0f64,
        off3 in -6.0..6.0f64,
    ) {
        let lat = sat_lat.to_radians();
        let lon = sat_lon.to_radians();
        let sat = Vec3::new(
            sat_radius * lat.cos() * lon.cos(),
            sat_radius * lat.cos() * lon.sin(),
            sat_radius * lat.sin(),
        );
        // stations scattered around the sub-satellite point; the third one is
        // pushed off the great circle so the geometry is never collinear
        let stations = [
            GroundStation::from_degrees((sat_lat + off1).clamp(-85.0, 85.0), sat_lon + off1, 0.0).unwrap(),
            GroundStation::from_degrees((sat_lat + off2).clamp(-85.0, 85.0), sat_lon - off2, 0.2).unwrap(),
            GroundStation::from_degrees((sat_lat + off3).clamp(-85.0, 85.0), sat_lon + off3 + 8.0, 0.5).unwrap(),
        ];
        let ms: Vec<RangeMeasurement> = stations
            .iter()
            .map(|g| {
                let range = (sat - geodetic_to_ecef(g)).norm();
                RangeMeasurement::new(*g, Epoch::ZERO, range, None).unwrap()
            })
            .collect();
        let p = trilaterate(&ms[0], &ms[1], &ms[2]).unwrap();
        for m in &ms {
            let residual = ((p - geodetic_to_ecef(&m.station)).norm() - m.range).abs();
            prop_assert!(residual < 1e-9, "residual {residual} km");
        }
    }

    #[test]
    fn altitude_moves_stations_along_the_ellipsoid_normal(
        lat in -89.0..89.0f64,
        lon in -180.0..180.0f64,
        alt in 0.0..5.0f64,
    ) {
        let g0 = GroundStation::from_degrees(lat, lon, 0.0).unwrap();
        let gh = GroundStation::from_degrees(lat, lon, alt).unwrap();
        let diff = geodetic_to_ecef(&gh) - geodetic_to_ecef(&g0);
        prop_assert!((diff.norm() - alt).abs() < 1e-9);
        if alt > 1e-6 {
            let along_normal = diff.normalize().dot(&g0.up());
            prop_assert!((along_normal - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rmse_is_permutation_invariant_and_scales_linearly(
        values in proptest::collection::vec((-50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64), 1..40),
        c in 0.0..10.0f64,
        rotation in 0usize..40,
    ) {
        let errors: Vec<Vec3> = values.iter().map(|(x, y, z)| Vec3::new(*x, *y, *z)).collect();
        let base = rmse(&errors).unwrap();

        let mut permuted = errors.clone();
        permuted.rotate_left(rotation % errors.len());
        let shuffled = rmse(&permuted).unwrap();
        prop_assert!((base - shuffled).abs() <= 1e-12 * base.max(1.0));

        let scaled: Vec<Vec3> = errors.iter().map(|e| e * c).collect();
        let scaled_rmse = rmse(&scaled).unwrap();
        prop_assert!((scaled_rmse - c * base).abs() <= 1e-9 * (c * base).max(1e-9));
    }
}
