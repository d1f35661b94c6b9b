//! The three estimation algorithms compared by the harness: the extended
//! Kalman filter, the EKF with a frozen GPS fix (EKFFG), and the pure Cowell
//! propagator.
//!
//! Filtering runs in the inertial frame; GPS measurements arrive as ECEF
//! positions and are bridged by the measurement model h and its Jacobian H.

use nalgebra::Matrix3;
use thiserror::Error;

use crate::dynamics::{
    propagate, state_transition_jacobian, DynamicsError, ForceModel, IntegratorConfig,
};
use crate::frames::{eci_to_ecef_rotation, position_ecef};
use crate::state::{Covariance6, Epoch, Frame, Matrix3x6, Matrix6, StateError, StateVector, Vec3};

/// A timestamped GPS position observation with its noise covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub epoch: Epoch,
    /// Observed position (km, ECEF).
    pub position: Vec3,
    /// Per-measurement noise covariance (km²), as stamped by the generator.
    pub noise: Matrix3<f64>,
}

impl Measurement {
    pub fn new(epoch: Epoch, position: Vec3, noise: Matrix3<f64>) -> Result<Self, FilterError> {
        if !position.iter().all(|c| c.is_finite()) {
            return Err(StateError::NonFinite("measurement position").into());
        }
        let asym = (noise - noise.transpose()).norm();
        if asym > 1e-9 * noise.norm().max(f64::EPSILON) {
            return Err(StateError::AsymmetricCovariance {
                max_asymmetry: asym,
            }
            .into());
        }
        let min_eig = noise.symmetric_eigenvalues().min();
        if min_eig < -1e-12 * noise.trace().abs().max(f64::EPSILON) {
            return Err(StateError::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
            }
            .into());
        }
        Ok(Measurement {
            epoch,
            position,
            noise,
        })
    }

    /// Isotropic measurement with per-axis standard deviation sigma (km).
    pub fn isotropic(epoch: Epoch, position: Vec3, sigma: f64) -> Result<Self, FilterError> {
        Self::new(epoch, position, Matrix3::identity() * sigma * sigma)
    }
}

/// Process and observation noise covariances used by the filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Process noise added to the predicted covariance each step (km² blocks).
    pub process: Covariance6,
    /// Observation noise assumed in the update (km²).
    pub observation: Matrix3<f64>,
}

impl NoiseConfig {
    pub fn new(process: Covariance6, observation: Matrix3<f64>) -> Self {
        NoiseConfig {
            process,
            observation,
        }
    }

    /// Diagonal process noise plus isotropic observation noise from sigma (km).
    pub fn diagonal(q_pos: f64, q_vel: f64, r_sigma: f64) -> Self {
        NoiseConfig {
            process: Covariance6::diagonal(q_pos, q_vel),
            observation: Matrix3::identity() * r_sigma * r_sigma,
        }
    }
}

impl Default for NoiseConfig {
    /// LEO GPS-class defaults per 10 s step: Q = diag(1e-8 km², 1e-10 km²/s²),
    /// R = (10 m)² per axis.
    fn default() -> Self {
        Self::diagonal(1e-8, 1e-10, 0.01)
    }
}

/// Dynamics and noise models shared by every step of a filter run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FilterConfig {
    pub force_model: ForceModel,
    pub integrator: IntegratorConfig,
    pub noise: NoiseConfig,
}

/// Estimate, covariance, and (for EKFFG) the frozen GPS fix.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    /// x̂ (inertial frame).
    pub estimate: StateVector,
    /// P.
    pub covariance: Covariance6,
    /// Most recently delivered measurement; the z that EKFFG keeps using
    /// across contact gaps.
    pub last_gps_fix: Option<Measurement>,
}

impl FilterState {
    pub fn new(estimate: StateVector, covariance: Covariance6) -> Self {
        FilterState {
            estimate,
            covariance,
            last_gps_fix: None,
        }
    }
}

/// Which step operation [`run_filter`] folds over the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterVariant {
    /// Ordinary EKF: update whenever a measurement is delivered.
    Ekf,
    /// EKF with fixed GPS coordinates: updates against the last received fix
    /// even when no new measurement arrives.
    Ekffg,
    /// Prediction only; measurements are ignored entirely.
    Cowell,
}

impl FilterVariant {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ekf" => Some(FilterVariant::Ekf),
            "ekffg" => Some(FilterVariant::Ekffg),
            "cowell" => Some(FilterVariant::Cowell),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FilterVariant::Ekf => "ekf",
            FilterVariant::Ekffg => "ekffg",
            FilterVariant::Cowell => "cowell",
        }
    }
}

/// Innovation covariances with a condition number beyond this are treated as
/// numerically singular.
const MAX_CONDITION: f64 = 1e12;

/// Measurement epoch must match the post-prediction epoch this closely (s).
const MEAS_EPOCH_TOL_S: f64 = 1e-6;

#[derive(Debug, Clone, Error)]
pub enum FilterError {
    #[error("step interval must be positive, got {0}")]
    InvalidStep(f64),
    #[error("measurement epoch {measurement} does not match filter epoch {filter}")]
    EpochMismatch { measurement: Epoch, filter: Epoch },
    #[error("innovation covariance numerically singular (condition {condition:.3e})")]
    SingularInnovation { condition: f64 },
    #[error("EKFFG requires a previously received GPS fix")]
    NoFix,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A filter run that aborted mid-schedule; carries the history up to the
/// failing step.
#[derive(Debug, Error)]
#[error("filter run failed at step {step}: {source}")]
pub struct FilterRunError {
    pub step: usize,
    pub history: Vec<FilterState>,
    #[source]
    pub source: FilterError,
}

/// h: the GPS-observable ECEF position of a state.
pub fn measurement_model(s: &StateVector) -> Vec3 {
    position_ecef(s)
}

/// H = ∂h/∂x: `[Θ(t) | 0]` with Θ the ECI→ECEF rotation at the state's epoch
/// (exactly `[I | 0]` for ECEF states).
pub fn measurement_jacobian(s: &StateVector) -> Matrix3x6 {
    let rot = match s.frame {
        Frame::Eci => eci_to_ecef_rotation(s.epoch.seconds()),
        Frame::Ecef => Matrix3::identity(),
    };
    let mut h = Matrix3x6::zeros();
    h.fixed_view_mut::<3, 3>(0, 0).copy_from(&rot);
    h
}

/// Prediction phase shared by all variants: propagate the estimate and
/// propagate the covariance as F P Fᵀ + Q.
fn predict(fs: &FilterState, cfg: &FilterConfig, dt: f64) -> Result<FilterState, FilterError> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(FilterError::InvalidStep(dt));
    }
    let predicted = propagate(&fs.estimate, &cfg.force_model, &cfg.integrator, dt)?;
    let f = state_transition_jacobian(&fs.estimate, &cfg.force_model, dt, &cfg.integrator)?;
    let p = f * fs.covariance.matrix() * f.transpose() + cfg.noise.process.matrix();
    Ok(FilterState {
        estimate: predicted,
        covariance: Covariance6::resymmetrized(p),
        last_gps_fix: fs.last_gps_fix,
    })
}

/// Measurement update against an ECEF position z, in place.
fn update(fs: &mut FilterState, z: &Vec3, cfg: &FilterConfig) -> Result<(), FilterError> {
    let h = measurement_jacobian(&fs.estimate);
    let predicted_meas = measurement_model(&fs.estimate);
    let innovation = z - predicted_meas;

    let p = *fs.covariance.matrix();
    let s: Matrix3<f64> = h * p * h.transpose() + cfg.noise.observation;
    let s = (s + s.transpose()) * 0.5;

    let eig = s.symmetric_eigenvalues();
    let (min_eig, max_eig) = (eig.min(), eig.max());
    let condition = if min_eig > 0.0 {
        max_eig / min_eig
    } else {
        f64::INFINITY
    };
    if condition > MAX_CONDITION {
        return Err(FilterError::SingularInnovation { condition });
    }
    let chol = nalgebra::Cholesky::new(s).ok_or(FilterError::SingularInnovation { condition })?;

    // K = P Hᵀ S⁻¹ through the factorization: Kᵀ = S⁻¹ (H P)
    let hp: Matrix3x6 = h * p;
    let k = chol.solve(&hp).transpose();

    let correction = k * innovation;
    let est = &fs.estimate;
    fs.estimate = StateVector::new(
        est.epoch,
        est.position + Vec3::new(correction[0], correction[1], correction[2]),
        est.velocity + Vec3::new(correction[3], correction[4], correction[5]),
        est.frame,
    )?;
    let p_updated = (Matrix6::identity() - k * h) * p;
    fs.covariance = Covariance6::resymmetrized(p_updated);
    Ok(())
}

/// One EKF step: predict over dt, then update if a measurement is delivered.
///
/// A delivered measurement must carry the post-prediction epoch and refreshes
/// `last_gps_fix`. With no measurement the step is pure prediction, identical
/// to [`cowell_only_step`].
pub fn ekf_step(
    fs: &FilterState,
    z: Option<&Measurement>,
    cfg: &FilterConfig,
    dt: f64,
) -> Result<FilterState, FilterError> {
    let mut next = predict(fs, cfg, dt)?;
    if let Some(m) = z {
        if (m.epoch.seconds() - next.estimate.epoch.seconds()).abs() > MEAS_EPOCH_TOL_S {
            return Err(FilterError::EpochMismatch {
                measurement: m.epoch,
                filter: next.estimate.epoch,
            });
        }
        update(&mut next, &m.position, cfg)?;
        next.last_gps_fix = Some(*m);
    }
    Ok(next)
}

/// One EKFFG step: predict over dt, then update against the frozen fix
/// regardless of its age. The fix itself is left unchanged.
pub fn ekffg_step(
    fs: &FilterState,
    cfg: &FilterConfig,
    dt: f64,
) -> Result<FilterState, FilterError> {
    let fix = fs.last_gps_fix.ok_or(FilterError::NoFix)?;
    let mut next = predict(fs, cfg, dt)?;
    update(&mut next, &fix.position, cfg)?;
    Ok(next)
}

/// One pure-propagation step: state and covariance predicted, no update.
pub fn cowell_only_step(
    fs: &FilterState,
    cfg: &FilterConfig,
    dt: f64,
) -> Result<FilterState, FilterError> {
    predict(fs, cfg, dt)
}

/// Folds the chosen step operation over a (dt, optional measurement)
/// schedule, returning the full estimate history (one entry per step).
///
/// EKFFG refreshes its frozen fix from every delivered measurement and keeps
/// updating against it across gaps; Cowell ignores measurements entirely. A
/// step failure aborts the run, returning the history so far inside the error.
pub fn run_filter(
    initial: FilterState,
    schedule: &[(f64, Option<Measurement>)],
    variant: FilterVariant,
    cfg: &FilterConfig,
) -> Result<Vec<FilterState>, FilterRunError> {
    let mut history: Vec<FilterState> = Vec::with_capacity(schedule.len());
    let mut current = initial;
    for (step, (dt, z)) in schedule.iter().enumerate() {
        let result = match variant {
            FilterVariant::Ekf => ekf_step(&current, z.as_ref(), cfg, *dt),
            FilterVariant::Ekffg => match z {
                Some(m) => ekf_step(&current, Some(m), cfg, *dt),
                None => ekffg_step(&current, cfg, *dt),
            },
            FilterVariant::Cowell => cowell_only_step(&current, cfg, *dt),
        };
        match result {
            Ok(next) => {
                history.push(next.clone());
                current = next;
            }
            Err(source) => {
                return Err(FilterRunError {
                    step,
                    history,
                    source,
                })
            }
        }
    }
    Ok(history)
}
