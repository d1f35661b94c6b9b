//! How the EKFFG-vs-Cowell gap scales with dropout duration.
//!
//! Sweeps contact losses from 10 to 120 minutes and reports the paired
//! average-RMSE ratio at each point.
//!
//! ```bash
//! cargo run --release -p orbitdet --example dropout_sweep
//! ```

use orbitdet::harness::{sweep_dropout, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario {
        n_runs: 10,
        ..Scenario::default()
    };

    let durations: Vec<f64> = [10.0, 30.0, 60.0, 90.0, 120.0]
        .iter()
        .map(|m| m * 60.0)
        .collect();
    let report = sweep_dropout(&sc, &durations)?;
    print!("{}", report.render_table());
    Ok(())
}
