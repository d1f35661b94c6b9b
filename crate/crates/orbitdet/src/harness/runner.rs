//! Monte-Carlo experiment execution.
//!
//! Runs are distributed over a rayon pool (size from `ORBITDET_WORKERS`, else
//! rayon's default) and reduced in run order, so parallelism never changes
//! output bytes. Per-run randomness derives from `base seed + run index`:
//! ChaCha8 stream 0 drives measurement noise, stream 1 drives initial-state
//! draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::dynamics::propagate;
use crate::elements::elements_to_state;
use crate::filters::{run_filter, FilterConfig, FilterState, FilterVariant, Measurement};
use crate::iod::iod_pipeline;
use crate::measurements::{range_observations, simulate_truth, synthesize_measurements};
use crate::state::{Covariance6, Epoch, Frame, StateVector, Vec3};

use super::report::{RunOutcome, RunReport, SweepReport, SweepRow};
use super::scenario::{InitialOrbit, Scenario};
use super::HarnessError;

/// Environment variable bounding the Monte-Carlo worker count.
pub const WORKERS_ENV_VAR: &str = "ORBITDET_WORKERS";

fn in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let workers = std::env::var(WORKERS_ENV_VAR)
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    match workers {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// Inertial truth state at t = 0 for a scenario.
fn initial_truth_state(sc: &Scenario) -> Result<StateVector, HarnessError> {
    match &sc.orbit {
        InitialOrbit::Elements(el) => Ok(elements_to_state(el, Epoch::ZERO)?),
        InitialOrbit::State(s) => match s.frame {
            Frame::Eci => Ok(*s),
            Frame::Ecef => Ok(crate::frames::ecef_to_eci(s)?),
        },
    }
}

fn filter_config(sc: &Scenario) -> FilterConfig {
    FilterConfig {
        force_model: sc.force_model,
        integrator: sc.integrator,
        noise: sc.noise_config(),
    }
}

struct SingleRun {
    rmse_km: f64,
    step_errors_km: Vec<f64>,
}

/// Draws at most 3+3 normal samples from stream 1; skipped entirely for zero
/// sigmas so that exact scenarios stay exact.
fn sample_state_error(rng: &mut ChaCha8Rng, pos_sigma: f64, vel_sigma: f64) -> (Vec3, Vec3) {
    let mut draw3 = |sigma: f64| {
        if sigma > 0.0 {
            let normal = Normal::new(0.0, sigma).expect("finite sigma");
            Vec3::new(normal.sample(rng), normal.sample(rng), normal.sample(rng))
        } else {
            Vec3::zeros()
        }
    };
    (draw3(pos_sigma), draw3(vel_sigma))
}

fn per_run_truth(
    sc: &Scenario,
    initial: &StateVector,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<StateVector>, String> {
    let start = if sc.orbit_jitter_km > 0.0 {
        let (jitter, _) = sample_state_error(rng, sc.orbit_jitter_km, 0.0);
        StateVector::new(
            initial.epoch,
            initial.position + jitter,
            initial.velocity,
            initial.frame,
        )
        .map_err(|e| e.to_string())?
    } else {
        *initial
    };
    simulate_truth(
        &start,
        &sc.force_model,
        &sc.integrator,
        sc.duration_s,
        sc.cadence_s,
    )
    .map_err(|e| e.to_string())
}

fn run_single(
    sc: &Scenario,
    run: usize,
    initial: &StateVector,
    shared_truth: Option<&[StateVector]>,
) -> Result<SingleRun, String> {
    let run_seed = sc.seed.wrapping_add(run as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    rng.set_stream(1);

    let local_truth;
    let truth: &[StateVector] = match shared_truth {
        Some(t) => t,
        None => {
            local_truth = per_run_truth(sc, initial, &mut rng)?;
            &local_truth
        }
    };

    let (pos_err, vel_err) =
        sample_state_error(&mut rng, sc.init_pos_sigma_km, sc.init_vel_sigma_km_s);
    let estimate0 = StateVector::new(
        truth[0].epoch,
        truth[0].position + pos_err,
        truth[0].velocity + vel_err,
        truth[0].frame,
    )
    .map_err(|e| e.to_string())?;
    let fs = FilterState::new(
        estimate0,
        Covariance6::from_sigmas(sc.init_pos_sigma_km, sc.init_vel_sigma_km_s),
    );

    let sched = sc.schedule(run_seed).map_err(|e| e.to_string())?;
    let measurements = synthesize_measurements(truth, &sched).map_err(|e| e.to_string())?;

    let schedule: Vec<(f64, Option<Measurement>)> = measurements[1..]
        .iter()
        .map(|m| (sc.cadence_s, *m))
        .collect();

    let cfg = filter_config(sc);
    let history = run_filter(fs, &schedule, sc.variant, &cfg).map_err(|e| e.to_string())?;

    finish_run(&history, &truth[1..])
}

fn finish_run(history: &[FilterState], truth_tail: &[StateVector]) -> Result<SingleRun, String> {
    debug_assert_eq!(history.len(), truth_tail.len());
    let step_errors_km: Vec<f64> = history
        .iter()
        .zip(truth_tail)
        .map(|(fs, t)| (fs.estimate.position - t.position).norm())
        .collect();
    if step_errors_km.is_empty() {
        return Err("schedule produced no steps".to_string());
    }
    let rmse_km =
        (step_errors_km.iter().map(|e| e * e).sum::<f64>() / step_errors_km.len() as f64).sqrt();
    Ok(SingleRun {
        rmse_km,
        step_errors_km,
    })
}

fn collect_report(
    sc: &Scenario,
    variant: FilterVariant,
    results: Vec<Result<SingleRun, String>>,
) -> Result<RunReport, HarnessError> {
    let outcomes: Vec<RunOutcome> = results
        .iter()
        .enumerate()
        .map(|(run, r)| RunOutcome {
            run,
            result: r.as_ref().map(|s| s.rmse_km).map_err(|e| e.clone()),
        })
        .collect();

    // mean per-step error across successful runs, on the cadence grid
    let mut step_series = Vec::new();
    let successes: Vec<&SingleRun> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    if let Some(first) = successes.first() {
        let n_steps = first.step_errors_km.len();
        for i in 0..n_steps {
            let mean =
                successes.iter().map(|s| s.step_errors_km[i]).sum::<f64>() / successes.len() as f64;
            let t = (i + 1) as f64 * sc.cadence_s;
            step_series.push((t, mean));
        }
    }

    RunReport::from_outcomes(
        sc.name.clone(),
        variant.name().to_string(),
        sc.seed,
        outcomes,
        step_series,
    )
}

/// Runs `sc.n_runs` seeded Monte-Carlo repetitions of the scenario's filter
/// variant and aggregates their RMSE.
pub fn run_scenario(sc: &Scenario) -> Result<RunReport, HarnessError> {
    run_scenario_as(sc, sc.variant)
}

/// [`run_scenario`] with the variant overridden; comparisons pair the same
/// seeds across variants.
pub fn run_scenario_as(sc: &Scenario, variant: FilterVariant) -> Result<RunReport, HarnessError> {
    let mut sc = sc.clone();
    sc.variant = variant;
    let initial = initial_truth_state(&sc)?;

    let shared_truth = if sc.orbit_jitter_km > 0.0 {
        None
    } else {
        Some(simulate_truth(
            &initial,
            &sc.force_model,
            &sc.integrator,
            sc.duration_s,
            sc.cadence_s,
        )?)
    };

    let results: Vec<Result<SingleRun, String>> = in_pool(|| {
        (0..sc.n_runs)
            .into_par_iter()
            .map(|run| run_single(&sc, run, &initial, shared_truth.as_deref()))
            .collect()
    });

    collect_report(&sc, variant, results)
}

/// Salted per-epoch seed for IOD range noise, independent of the measurement
/// and initial-state streams.
fn range_seed(run_seed: u64, epoch_index: usize) -> u64 {
    run_seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(epoch_index as u64 + 1))
}

fn iod_single(
    sc: &Scenario,
    run: usize,
    initial: &StateVector,
    shared_truth: Option<&[StateVector]>,
    middle_index: usize,
) -> Result<SingleRun, String> {
    let setup = sc.iod.as_ref().expect("caller validated IOD setup");
    let run_seed = sc.seed.wrapping_add(run as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    rng.set_stream(1);

    let local_truth;
    let (truth, run_initial): (&[StateVector], StateVector) = match shared_truth {
        Some(t) => (t, *initial),
        None => {
            local_truth = per_run_truth(sc, initial, &mut rng)?;
            let start = local_truth[0];
            (&local_truth, start)
        }
    };

    // simultaneous-range triplets at the three IOD epochs
    let stations = [setup.stations[0], setup.stations[1], setup.stations[2]];
    let mut triplets = Vec::with_capacity(3);
    for (k, t) in setup.epochs_s.iter().enumerate() {
        let truth_at = propagate(&run_initial, &sc.force_model, &sc.integrator, *t)
            .map_err(|e| format!("initialization failed: {e}"))?;
        let obs = range_observations(
            &truth_at,
            &stations,
            setup.range_sigma_km,
            range_seed(run_seed, k),
        )
        .map_err(|e| format!("initialization failed: {e}"))?;
        triplets.push(obs);
    }
    let triplets = [triplets[0], triplets[1], triplets[2]];
    let estimate0 = iod_pipeline(&triplets).map_err(|e| format!("initialization failed: {e}"))?;

    let fs = FilterState::new(
        estimate0,
        Covariance6::from_sigmas(sc.init_pos_sigma_km, sc.init_vel_sigma_km_s),
    );

    let sched = sc.schedule(run_seed).map_err(|e| e.to_string())?;
    let measurements = synthesize_measurements(truth, &sched).map_err(|e| e.to_string())?;

    let schedule: Vec<(f64, Option<Measurement>)> = measurements[middle_index + 1..]
        .iter()
        .map(|m| (sc.cadence_s, *m))
        .collect();

    let cfg = filter_config(sc);
    let history = run_filter(fs, &schedule, sc.variant, &cfg).map_err(|e| e.to_string())?;

    finish_run(&history, &truth[middle_index + 1..])
}

/// The full classical pipeline: trilateration and Gibbs seed the filter's
/// initial state at the middle IOD epoch, then the scenario's filter variant
/// runs over the remaining schedule.
pub fn iod_then_filter(sc: &Scenario) -> Result<RunReport, HarnessError> {
    let setup = sc
        .iod
        .as_ref()
        .ok_or_else(|| HarnessError::InvalidScenario("iod_then_filter needs iod.* keys".into()))?;
    let [_, t2, t3] = setup.epochs_s;
    let ticks = t2 / sc.cadence_s;
    if (ticks - ticks.round()).abs() > 1e-6 {
        return Err(HarnessError::InvalidScenario(
            "the middle IOD epoch must lie on the measurement cadence grid".into(),
        ));
    }
    if t3 >= sc.duration_s {
        return Err(HarnessError::InvalidScenario(
            "IOD epochs must fall before the scenario duration".into(),
        ));
    }
    let middle_index = ticks.round() as usize;

    let initial = initial_truth_state(sc)?;
    let shared_truth = if sc.orbit_jitter_km > 0.0 {
        None
    } else {
        Some(simulate_truth(
            &initial,
            &sc.force_model,
            &sc.integrator,
            sc.duration_s,
            sc.cadence_s,
        )?)
    };

    let results: Vec<Result<SingleRun, String>> = in_pool(|| {
        (0..sc.n_runs)
            .into_par_iter()
            .map(|run| iod_single(sc, run, &initial, shared_truth.as_deref(), middle_index))
            .collect()
    });

    collect_report(sc, sc.variant, results)
}

/// Default dropout start when a scenario without windows is swept (s).
const DEFAULT_DROPOUT_START_S: f64 = 600.0;

/// Reruns the scenario across dropout durations, pairing EKFFG against the
/// Cowell propagator on identical seeds, and reports the average-RMSE ratio
/// per duration.
pub fn sweep_dropout(sc: &Scenario, durations_s: &[f64]) -> Result<SweepReport, HarnessError> {
    if durations_s.is_empty() {
        return Err(HarnessError::InvalidScenario(
            "sweep needs at least one duration".into(),
        ));
    }
    let start = sc
        .dropouts
        .first()
        .map(|d| d.0)
        .unwrap_or(DEFAULT_DROPOUT_START_S);
    let mut rows = Vec::with_capacity(durations_s.len());
    for &d in durations_s {
        if d <= 0.0 || !d.is_finite() {
            return Err(HarnessError::InvalidScenario(
                "sweep durations must be positive".into(),
            ));
        }
        let mut point = sc.clone();
        point.dropouts = vec![(start, start + d)];
        point.duration_s = start + d;
        let ekffg = run_scenario_as(&point, FilterVariant::Ekffg)?;
        let cowell = run_scenario_as(&point, FilterVariant::Cowell)?;
        rows.push(SweepRow {
            dropout_s: d,
            ekffg_avg_rmse_km: ekffg.average_rmse_km,
            cowell_avg_rmse_km: cowell.average_rmse_km,
            ratio: ekffg.average_rmse_km / cowell.average_rmse_km,
        });
    }
    Ok(SweepReport {
        scenario: sc.name.clone(),
        runs_per_point: sc.n_runs,
        base_seed: sc.seed,
        rows,
    })
}
