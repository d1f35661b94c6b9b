//! Initial orbit determination from ground-station ranges.
//!
//! Three stations range the satellite simultaneously at three epochs.
//! Trilateration recovers each position fix, and the Gibbs method converts
//! the three fixes into a full state at the middle epoch, which is compared
//! against the propagated truth.
//!
//! ```bash
//! cargo run -p orbitdet --example initial_orbit_determination
//! ```

use orbitdet::dynamics::{propagate, ForceModel, IntegratorConfig};
use orbitdet::elements::{elements_to_state, OrbitalElements};
use orbitdet::frames::eci_to_ecef;
use orbitdet::iod::{geodetic_to_ecef, iod_pipeline, trilaterate, GroundStation};
use orbitdet::measurements::range_observations;
use orbitdet::Epoch;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stations = [
        GroundStation::from_degrees(-10.0, -5.0, 0.1)?,
        GroundStation::from_degrees(8.0, 2.0, 0.4)?,
        GroundStation::from_degrees(15.0, 6.0, 0.0)?,
    ];
    println!("stations (ECEF):");
    for (i, g) in stations.iter().enumerate() {
        let p = geodetic_to_ecef(g);
        println!("  {}: {:9.2} {:9.2} {:9.2} km", i + 1, p.x, p.y, p.z);
    }

    let truth0 = elements_to_state(&OrbitalElements::circular(7000.0), Epoch::ZERO)?;
    let fm = ForceModel::two_body();
    let cfg = IntegratorConfig::rkf45(1e-12, 1e-12);
    let sigma_range = 0.01; // 10 m ranging noise

    // simultaneous range triplets at t = 0, 60, 120 s
    let mut triplets = Vec::new();
    println!("\nrange observations (sigma = {} km):", sigma_range);
    for (k, t) in [0.0, 60.0, 120.0].iter().enumerate() {
        let truth = propagate(&truth0, &fm, &cfg, *t)?;
        let obs = range_observations(&truth, &stations, sigma_range, 42 + k as u64)?;
        println!(
            "  t = {:5.0} s: ranges {:8.3} / {:8.3} / {:8.3} km",
            t, obs[0].range, obs[1].range, obs[2].range
        );
        triplets.push(obs);
    }
    let triplets = [triplets[0], triplets[1], triplets[2]];

    // trilateration alone recovers the middle fix
    let truth_mid = propagate(&truth0, &fm, &cfg, 60.0)?;
    let fix = trilaterate(&triplets[1][0], &triplets[1][1], &triplets[1][2])?;
    let fix_err = (fix - eci_to_ecef(&truth_mid)?.position).norm();
    println!(
        "\ntrilaterated fix at t = 60 s, error vs truth: {:.4} km",
        fix_err
    );

    // the full pipeline adds Gibbs for the velocity
    let estimate = iod_pipeline(&triplets)?;
    let pos_err = (estimate.position - truth_mid.position).norm();
    let vel_err = (estimate.velocity - truth_mid.velocity).norm();
    println!("\nIOD state at the middle epoch (ECI):");
    println!(
        "  r = {:9.3} {:9.3} {:9.3} km",
        estimate.position.x, estimate.position.y, estimate.position.z
    );
    println!(
        "  v = {:9.4} {:9.4} {:9.4} km/s",
        estimate.velocity.x, estimate.velocity.y, estimate.velocity.z
    );
    println!("  position error = {pos_err:.4} km");
    println!("  velocity error = {vel_err:.6} km/s");
    Ok(())
}
