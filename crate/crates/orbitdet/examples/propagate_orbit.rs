//! Cowell propagation with selectable force models.
//!
//! Propagates a 500 km circular LEO for one orbital period under two-body
//! gravity alone, then with J2, then with J2 + drag, and prints what each
//! perturbation does to the trajectory.
//!
//! ```bash
//! cargo run -p orbitdet --example propagate_orbit
//! ```

use orbitdet::constants::MU_EARTH;
use orbitdet::dynamics::{propagate, ForceModel, IntegratorConfig};
use orbitdet::elements::{elements_to_state, OrbitalElements};
use orbitdet::Epoch;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let elements = OrbitalElements {
        semi_major_axis: 6878.137,
        eccentricity: 0.0,
        inclination: 51.6f64.to_radians(),
        raan: 0.0,
        arg_periapsis: 0.0,
        true_anomaly: 0.0,
    };
    let initial = elements_to_state(&elements, Epoch::ZERO)?;
    let period = elements.period();
    let cfg = IntegratorConfig::rkf45(1e-12, 1e-12);

    println!("initial state (ECI):");
    println!(
        "  r = {:9.3} {:9.3} {:9.3} km",
        initial.position.x, initial.position.y, initial.position.z
    );
    println!(
        "  v = {:9.4} {:9.4} {:9.4} km/s",
        initial.velocity.x, initial.velocity.y, initial.velocity.z
    );
    println!("  period = {:.1} s", period);

    // two-body: the orbit closes on itself and conserves energy
    let two_body = propagate(&initial, &ForceModel::two_body(), &cfg, period)?;
    let close_err = (two_body.position - initial.position).norm();
    let energy_drift = ((two_body.specific_energy() - initial.specific_energy())
        / initial.specific_energy())
    .abs();
    println!("\ntwo-body, one period:");
    println!("  period-return error  = {close_err:.3e} km");
    println!("  relative energy drift = {energy_drift:.3e}");

    // J2 precesses the node; the orbit no longer closes
    let j2 = propagate(&initial, &ForceModel::two_body_j2(), &cfg, period)?;
    println!("\ntwo-body + J2, one period:");
    println!(
        "  displacement vs two-body = {:.3} km",
        (j2.position - two_body.position).norm()
    );
    println!(
        "  h_z drift (conserved for axisymmetric fields) = {:.3e}",
        ((j2.angular_momentum().z - initial.angular_momentum().z) / initial.angular_momentum().z)
            .abs()
    );

    // drag dissipates energy and shrinks the orbit
    let full = propagate(&initial, &ForceModel::leo_default(), &cfg, period)?;
    println!("\ntwo-body + J2 + drag, one period:");
    println!(
        "  semi-major axis change = {:+.6} km",
        full.semi_major_axis() - initial.semi_major_axis()
    );

    // sample ephemeris, quarter-period spacing
    println!("\nephemeris (two-body, quarter-period samples):");
    println!(
        "  {:>8}  {:>10} {:>10} {:>10}  {:>8}",
        "t (s)", "x (km)", "y (km)", "z (km)", "|r| (km)"
    );
    for k in 0..=4 {
        let t = period * k as f64 / 4.0;
        let s = propagate(&initial, &ForceModel::two_body(), &cfg, t)?;
        println!(
            "  {:8.1}  {:10.2} {:10.2} {:10.2}  {:8.2}",
            t,
            s.position.x,
            s.position.y,
            s.position.z,
            s.radius()
        );
    }

    // sanity: circular speed recomputed from the constants
    println!(
        "\ncircular speed at 6878.137 km: {:.4} km/s",
        (MU_EARTH / 6878.137f64).sqrt()
    );
    Ok(())
}
