//! Truth-trajectory simulation, GPS measurement synthesis with seeded
//! Gaussian noise, and contact-loss scheduling.
//!
//! All randomness flows through ChaCha8 seeded from the schedule, so a given
//! seed reproduces measurement sequences bit-for-bit on any platform.

use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::dynamics::{propagate, DynamicsError, ForceModel, IntegratorConfig};
use crate::filters::Measurement;
use crate::frames::eci_to_ecef;
use crate::iod::{geodetic_to_ecef, GroundStation, IodError, RangeMeasurement};
use crate::state::{Epoch, Frame, StateError, StateVector, Vec3};

/// A contact-loss interval during which no measurements are delivered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropoutWindow {
    pub start: Epoch,
    pub end: Epoch,
}

impl DropoutWindow {
    pub fn new(start: Epoch, end: Epoch) -> Result<Self, MeasurementError> {
        if start.seconds() < end.seconds() {
            Ok(DropoutWindow { start, end })
        } else {
            Err(MeasurementError::InvalidWindow)
        }
    }

    /// Inclusive containment on both edges: a tick on the boundary is lost.
    pub fn contains(&self, epoch: Epoch) -> bool {
        let t = epoch.seconds();
        t >= self.start.seconds() && t <= self.end.seconds()
    }
}

/// When and how GPS measurements are produced.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSchedule {
    /// Seconds between measurement ticks.
    pub cadence: f64,
    /// Non-overlapping, sorted contact-loss windows.
    pub windows: Vec<DropoutWindow>,
    /// Per-axis noise standard deviation (km).
    pub sigma: f64,
    /// RNG seed; identical seeds give bit-identical sequences.
    pub seed: u64,
}

impl MeasurementSchedule {
    pub fn new(
        cadence: f64,
        mut windows: Vec<DropoutWindow>,
        sigma: f64,
        seed: u64,
    ) -> Result<Self, MeasurementError> {
        if cadence <= 0.0 || !cadence.is_finite() {
            return Err(MeasurementError::InvalidCadence(cadence));
        }
        if sigma < 0.0 || !sigma.is_finite() {
            return Err(MeasurementError::InvalidSigma(sigma));
        }
        windows.sort_by(|a, b| a.start.seconds().total_cmp(&b.start.seconds()));
        for pair in windows.windows(2) {
            if pair[1].start.seconds() <= pair[0].end.seconds() {
                return Err(MeasurementError::OverlappingWindows);
            }
        }
        Ok(MeasurementSchedule {
            cadence,
            windows,
            sigma,
            seed,
        })
    }

    fn in_dropout(&self, epoch: Epoch) -> bool {
        self.windows.iter().any(|w| w.contains(epoch))
    }
}

#[derive(Debug, Clone, Error)]
pub enum MeasurementError {
    #[error("dropout window must have start < end")]
    InvalidWindow,
    #[error("dropout windows overlap")]
    OverlappingWindows,
    #[error("cadence must be positive, got {0}")]
    InvalidCadence(f64),
    #[error("noise sigma must be non-negative, got {0}")]
    InvalidSigma(f64),
    #[error("duration and step must be positive (duration {duration}, step {step})")]
    InvalidSpan { duration: f64, step: f64 },
    #[error("truth trajectory is empty")]
    EmptyTruth,
    #[error(
        "satellite below the horizon of station (lat {lat_deg:.2}°, lon {lon_deg:.2}°): sine of elevation {sin_elevation:.4}"
    )]
    BelowHorizon {
        lat_deg: f64,
        lon_deg: f64,
        sin_elevation: f64,
    },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Iod(#[from] IodError),
}

/// Dense truth trajectory sampled at a fixed step; `floor(duration/step)+1`
/// states including the initial one. Integration between samples uses the
/// supplied (normally adaptive) integrator.
pub fn simulate_truth(
    initial: &StateVector,
    fm: &ForceModel,
    cfg: &IntegratorConfig,
    duration: f64,
    step: f64,
) -> Result<Vec<StateVector>, MeasurementError> {
    if duration < 0.0 || step <= 0.0 || !duration.is_finite() || !step.is_finite() {
        return Err(MeasurementError::InvalidSpan { duration, step });
    }
    let n = (duration / step).floor() as usize;
    let mut states = Vec::with_capacity(n + 1);
    states.push(*initial);
    let mut current = *initial;
    for _ in 0..n {
        current = propagate(&current, fm, cfg, step)?;
        states.push(current);
    }
    Ok(states)
}

/// Noisy ECEF position measurements aligned with a truth trajectory.
///
/// A measurement is emitted at every truth sample whose epoch is a cadence
/// tick outside all dropout windows; other entries are `None`. Noise is
/// N(0, σ²I) per axis from ChaCha8 seeded with `sched.seed`, and each
/// measurement is stamped with that σ²I covariance.
pub fn synthesize_measurements(
    truth: &[StateVector],
    sched: &MeasurementSchedule,
) -> Result<Vec<Option<Measurement>>, MeasurementError> {
    if truth.is_empty() {
        return Err(MeasurementError::EmptyTruth);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sched.seed);
    let normal = Normal::new(0.0, sched.sigma.max(f64::MIN_POSITIVE)).unwrap();
    let noise_cov = Matrix3::identity() * sched.sigma * sched.sigma;

    let mut out = Vec::with_capacity(truth.len());
    for state in truth {
        let t = state.epoch.seconds();
        let ticks = t / sched.cadence;
        let on_tick = (ticks - ticks.round()).abs() < 1e-6;
        if !on_tick || sched.in_dropout(state.epoch) {
            out.push(None);
            continue;
        }
        let exact = match state.frame {
            Frame::Ecef => state.position,
            Frame::Eci => eci_to_ecef(state)?.position,
        };
        let noise = if sched.sigma > 0.0 {
            Vec3::new(
                normal.sample(&mut rng),
                normal.sample(&mut rng),
                normal.sample(&mut rng),
            )
        } else {
            Vec3::zeros()
        };
        let m = Measurement::new(state.epoch, exact + noise, noise_cov)
            .expect("synthesized measurement is finite with PSD covariance");
        out.push(Some(m));
    }
    Ok(out)
}

/// Simultaneous range (and range-rate) observations of a truth state from
/// three stations.
///
/// Every station must see the satellite above its local horizon. Range noise
/// is N(0, σ²) from ChaCha8 seeded with `seed`.
pub fn range_observations(
    truth: &StateVector,
    stations: &[GroundStation; 3],
    sigma_range: f64,
    seed: u64,
) -> Result<[RangeMeasurement; 3], MeasurementError> {
    let ecef = match truth.frame {
        Frame::Ecef => *truth,
        Frame::Eci => eci_to_ecef(truth)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma_range.max(f64::MIN_POSITIVE)).unwrap();

    let mut out = Vec::with_capacity(3);
    for station in stations {
        let site = geodetic_to_ecef(station);
        let los = ecef.position - site;
        let sin_elevation = los.normalize().dot(&station.up());
        if sin_elevation <= 0.0 {
            return Err(MeasurementError::BelowHorizon {
                lat_deg: station.latitude.to_degrees(),
                lon_deg: station.longitude.to_degrees(),
                sin_elevation,
            });
        }
        let noise = if sigma_range > 0.0 {
            normal.sample(&mut rng)
        } else {
            0.0
        };
        let range = los.norm() + noise;
        // station is fixed in ECEF, so the relative velocity is the
        // satellite's own ECEF velocity
        let range_rate = los.dot(&ecef.velocity) / los.norm();
        out.push(RangeMeasurement::new(
            *station,
            truth.epoch,
            range,
            Some(range_rate),
        )?);
    }
    Ok([out[0], out[1], out[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MU_EARTH;
    use crate::elements::{elements_to_state, OrbitalElements};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn circular_initial(r: f64) -> StateVector {
        elements_to_state(&OrbitalElements::circular(r), Epoch::ZERO).unwrap()
    }

    #[test]
    fn zero_duration_gives_the_initial_state_only() {
        let s = circular_initial(7000.0);
        let truth = simulate_truth(
            &s,
            &ForceModel::two_body(),
            &IntegratorConfig::default(),
            0.0,
            10.0,
        )
        .unwrap();
        assert_eq!(truth.len(), 1);
        assert_eq!(truth[0], s);
    }

    #[test]
    fn sample_count_is_floor_duration_over_step_plus_one() {
        let s = circular_initial(7000.0);
        let truth = simulate_truth(
            &s,
            &ForceModel::two_body(),
            &IntegratorConfig::default(),
            100.0,
            10.0,
        )
        .unwrap();
        assert_eq!(truth.len(), 11);
        assert_relative_eq!(truth.last().unwrap().epoch.seconds(), 100.0, epsilon = 1e-9);
    }

    #[test]
    fn quarter_period_sampling_walks_the_circle() {
        let r = 7000.0;
        let s = circular_initial(r);
        let period = 2.0 * PI * (r.powi(3) / MU_EARTH).sqrt();
        let cfg = IntegratorConfig::rkf45(1e-12, 1e-12);
        let truth =
            simulate_truth(&s, &ForceModel::two_body(), &cfg, period, period / 4.0).unwrap();
        assert_eq!(truth.len(), 5);
        for state in &truth {
            assert_relative_eq!(state.radius(), r, epsilon = 1e-6);
        }
        // 90° apart: dot products of consecutive positions vanish
        for pair in truth.windows(2) {
            let cosang = pair[0].position.dot(&pair[1].position) / (r * r);
            assert!(cosang.abs() < 1e-6);
        }
    }

    #[test]
    fn noiseless_measurements_equal_ecef_truth() {
        let s = circular_initial(7000.0);
        let truth = simulate_truth(
            &s,
            &ForceModel::two_body(),
            &IntegratorConfig::default(),
            60.0,
            10.0,
        )
        .unwrap();
        let sched = MeasurementSchedule::new(10.0, vec![], 0.0, 1).unwrap();
        let ms = synthesize_measurements(&truth, &sched).unwrap();
        assert_eq!(ms.len(), truth.len());
        for (state, m) in truth.iter().zip(&ms) {
            let m = m.expect("every tick delivers");
            let exact = eci_to_ecef(state).unwrap().position;
            assert_eq!(m.position, exact);
        }
    }

    #[test]
    fn full_span_window_suppresses_everything() {
        let s = circular_initial(7000.0);
        let truth = simulate_truth(
            &s,
            &ForceModel::two_body(),
            &IntegratorConfig::default(),
            60.0,
            10.0,
        )
        .unwrap();
        let window = DropoutWindow::new(Epoch::ZERO, Epoch::new(61.0).unwrap()).unwrap();
        let sched = MeasurementSchedule::new(10.0, vec![window], 0.01, 1).unwrap();
        let ms = synthesize_measurements(&truth, &sched).unwrap();
        assert!(ms.iter().all(|m| m.is_none()));
    }

    #[test]
    fn no_measurement_falls_inside_a_window() {
        let s = circular_initial(7000.0);
        let truth = simulate_truth(
            &s,
            &ForceModel::two_body(),
            &IntegratorConfig::default(),
            600.0,
            10.0,
        )
        .unwrap();
        let window =
            DropoutWindow::new(Epoch::new(100.0).unwrap(), Epoch::new(400.0).unwrap()).unwrap();
        let sched = MeasurementSchedule::new(10.0, vec![window], 0.01, 7).unwrap();
        let ms = synthesize_measurements(&truth, &sched).unwrap();
        for m in ms.iter().flatten() {
            assert!(!window.contains(m.epoch));
        }
        // ticks outside the window all deliver
        let delivered = ms.iter().flatten().count();
        assert_eq!(delivered, truth.len() - 31);
    }

    #[test]
    fn noise_statistics_match_the_configured_sigma() {
        let s = circular_initial(7000.0);
        let sigma = 0.01;
        // hold the truth fixed so only noise varies
        let truth = vec![s; 1000]
            .into_iter()
            .enumerate()
            .map(|(i, mut st)| {
                st.epoch = Epoch::new(i as f64 * 10.0).unwrap();
                st
            })
            .collect::<Vec<_>>();
        let sched = MeasurementSchedule::new(10.0, vec![], sigma, 12345).unwrap();
        let ms = synthesize_measurements(&truth, &sched).unwrap();
        let mut errors = Vec::with_capacity(truth.len());
        for (state, m) in truth.iter().zip(ms.iter()) {
            let exact = eci_to_ecef(state).unwrap().position;
            errors.push(m.unwrap().position - exact);
        }
        let n = errors.len() as f64;
        for i in 0..3 {
            let mean = errors.iter().map(|e| e[i]).sum::<f64>() / n;
            let sd = (errors
                .iter()
                .map(|e| (e[i] - mean) * (e[i] - mean))
                .sum::<f64>()
                / n)
                .sqrt();
            assert!((0.009..=0.011).contains(&sd), "axis {i} sample sd {sd}");
        }
        // full empirical covariance within 10% of sigma²·I
        let var = sigma * sigma;
        for i in 0..3 {
            for j in 0..3 {
                let cov = errors.iter().map(|e| e[i] * e[j]).sum::<f64>() / n;
                let expected = if i == j { var } else { 0.0 };
                assert!(
                    (cov - expected).abs() <= 0.1 * var,
                    "cov[{i}][{j}] = {cov:e} strays from {expected:e}"
                );
            }
        }
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let s = circular_initial(7000.0);
        let truth = simulate_truth(
            &s,
            &ForceModel::two_body(),
            &IntegratorConfig::default(),
            300.0,
            10.0,
        )
        .unwrap();
        let sched = MeasurementSchedule::new(10.0, vec![], 0.01, 77).unwrap();
        let a = synthesize_measurements(&truth, &sched).unwrap();
        let b = synthesize_measurements(&truth, &sched).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            match (x, y) {
                (Some(mx), Some(my)) => {
                    assert_eq!(mx.position, my.position);
                    assert_eq!(mx.epoch, my.epoch);
                }
                (None, None) => {}
                _ => panic!("delivery pattern diverged"),
            }
        }
    }

    #[test]
    fn range_observation_hand_evaluated() {
        // satellite at (7000,0,0) ECEF, station at the equatorial prime
        // meridian: range is the radial gap
        let sat = StateVector::new(
            Epoch::ZERO,
            Vec3::new(7000.0, 0.0, 0.0),
            Vec3::zeros(),
            Frame::Ecef,
        )
        .unwrap();
        let stations = [
            GroundStation::new(0.0, 0.0, 0.0).unwrap(),
            GroundStation::from_degrees(5.0, 3.0, 0.0).unwrap(),
            GroundStation::from_degrees(-4.0, -2.0, 0.0).unwrap(),
        ];
        let obs = range_observations(&sat, &stations, 0.0, 1).unwrap();
        assert_relative_eq!(obs[0].range, 7000.0 - 6378.137, max_relative = 1e-12);
        // zero velocity along the line of sight gives zero range-rate
        assert_relative_eq!(obs[0].range_rate.unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn antipodal_station_is_below_horizon() {
        let sat = StateVector::new(
            Epoch::ZERO,
            Vec3::new(7000.0, 0.0, 0.0),
            Vec3::zeros(),
            Frame::Ecef,
        )
        .unwrap();
        let stations = [
            GroundStation::from_degrees(0.0, 180.0, 0.0).unwrap(),
            GroundStation::from_degrees(5.0, 3.0, 0.0).unwrap(),
            GroundStation::from_degrees(-4.0, -2.0, 0.0).unwrap(),
        ];
        let err = range_observations(&sat, &stations, 0.0, 1).unwrap_err();
        match err {
            MeasurementError::BelowHorizon { lon_deg, .. } => {
                assert_relative_eq!(lon_deg, 180.0, epsilon = 1e-9)
            }
            other => panic!("expected below-horizon, got {other:?}"),
        }
    }

    #[test]
    fn tangential_velocity_gives_zero_range_rate_radial_gives_speed() {
        let stations = [
            GroundStation::new(0.0, 0.0, 0.0).unwrap(),
            GroundStation::from_degrees(5.0, 3.0, 0.0).unwrap(),
            GroundStation::from_degrees(-4.0, -2.0, 0.0).unwrap(),
        ];
        // radial climb straight above station 0: range-rate = speed
        let sat = StateVector::new(
            Epoch::ZERO,
            Vec3::new(7000.0, 0.0, 0.0),
            Vec3::new(3.0, 0.0, 0.0),
            Frame::Ecef,
        )
        .unwrap();
        let obs = range_observations(&sat, &stations, 0.0, 1).unwrap();
        assert_relative_eq!(obs[0].range_rate.unwrap(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn schedule_rejects_bad_configuration() {
        assert!(MeasurementSchedule::new(0.0, vec![], 0.01, 1).is_err());
        assert!(MeasurementSchedule::new(10.0, vec![], -0.5, 1).is_err());
        let w1 = DropoutWindow::new(Epoch::ZERO, Epoch::new(100.0).unwrap()).unwrap();
        let w2 = DropoutWindow::new(Epoch::new(50.0).unwrap(), Epoch::new(150.0).unwrap()).unwrap();
        assert!(matches!(
            MeasurementSchedule::new(10.0, vec![w1, w2], 0.01, 1),
            Err(MeasurementError::OverlappingWindows)
        ));
        assert!(DropoutWindow::new(Epoch::new(5.0).unwrap(), Epoch::new(5.0).unwrap()).is_err());
    }
}
