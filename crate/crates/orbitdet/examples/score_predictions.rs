//! Scoring externally produced position predictions against a truth
//! ephemeris.
//!
//! Writes a truth file from a propagated orbit, fabricates a prediction file
//! with a constant 5 km offset, and scores it with the same RMSE aggregates
//! the Monte-Carlo reports use. Any outside pipeline that writes the
//! four-column exchange format can be scored the same way (see README).
//!
//! ```bash
//! cargo run -p orbitdet --example score_predictions
//! ```

use orbitdet::dynamics::{ForceModel, IntegratorConfig};
use orbitdet::elements::{elements_to_state, OrbitalElements};
use orbitdet::frames::eci_to_ecef;
use orbitdet::harness::{score_predictions, write_ephemeris, EphemerisRecord};
use orbitdet::measurements::simulate_truth;
use orbitdet::{Epoch, Vec3};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let initial = elements_to_state(&OrbitalElements::circular(6878.137), Epoch::ZERO)?;
    let truth = simulate_truth(
        &initial,
        &ForceModel::two_body_j2(),
        &IntegratorConfig::default(),
        600.0,
        10.0,
    )?;

    // truth ephemeris in the exchange format (ECEF positions)
    let records: Vec<EphemerisRecord> = truth
        .iter()
        .map(|s| {
            let ecef = eci_to_ecef(s).expect("truth is inertial");
            Ok(EphemerisRecord {
                epoch_s: s.epoch.seconds(),
                position: ecef.position,
            })
        })
        .collect::<Result<_, Box<dyn std::error::Error>>>()?;

    // a fake external predictor: truth shifted by a 3-4-5 offset
    let offset = Vec3::new(3.0, 4.0, 0.0);
    let predicted: Vec<EphemerisRecord> = records
        .iter()
        .map(|r| EphemerisRecord {
            epoch_s: r.epoch_s,
            position: r.position + offset,
        })
        .collect();

    let dir = std::env::temp_dir().join(format!("orbitdet-score-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let truth_path = dir.join("truth.csv");
    let pred_path = dir.join("predictions.csv");
    std::fs::write(&truth_path, write_ephemeris(&records))?;
    std::fs::write(&pred_path, write_ephemeris(&predicted))?;
    println!("wrote {} records to {}\n", records.len(), dir.display());

    let perfect = score_predictions(&truth_path, &truth_path)?;
    println!(
        "truth vs itself:   RMSE = {:.4} km",
        perfect.average_rmse_km
    );

    let offset_score = score_predictions(&pred_path, &truth_path)?;
    println!(
        "3-4-5 offset file: RMSE = {:.4} km",
        offset_score.average_rmse_km
    );

    println!("\nper-epoch error series (first 3 rows of steps.csv):");
    for (t, e) in offset_score.step_series.iter().take(3) {
        println!("  t = {t:>5} s   error = {e:.4} km");
    }

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
