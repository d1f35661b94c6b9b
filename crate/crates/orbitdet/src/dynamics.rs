//! Force models and numerical integration of the equations of motion.
//!
//! The state-transition function f propagates [r, v] under two-body gravity
//! plus optional J2 and atmospheric drag perturbations, integrated by either
//! fixed-step RK4 or adaptive RKF45. Every filter and the truth simulator go
//! through [`propagate`].

use nalgebra::SVector;
use thiserror::Error;

use crate::constants::{J2, MU_EARTH, M_PER_KM, OMEGA_EARTH, R_EARTH};
use crate::state::{Epoch, Frame, Matrix6, StateError, StateVector, Vec3};

/// Cannonball drag model parameters with a single exponential atmosphere layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragParams {
    /// Drag coefficient (dimensionless).
    pub cd: f64,
    /// Area-to-mass ratio (m²/kg).
    pub area_to_mass: f64,
    /// Reference density (kg/m³) at `h0`.
    pub rho0: f64,
    /// Reference altitude (km).
    pub h0: f64,
    /// Scale height (km).
    pub scale_height: f64,
}

impl Default for DragParams {
    fn default() -> Self {
        DragParams {
            cd: 2.2,
            area_to_mass: 0.01,
            rho0: 3.614e-13,
            h0: 700.0,
            scale_height: 88.667,
        }
    }
}

impl DragParams {
    fn validate(&self) -> Result<(), DynamicsError> {
        if self.cd > 0.0 && self.area_to_mass > 0.0 && self.scale_height > 0.0 {
            Ok(())
        } else {
            Err(DynamicsError::InvalidDragParams)
        }
    }

    /// Atmospheric density (kg/m³) at altitude h (km above the surface).
    pub fn density(&self, altitude_km: f64) -> f64 {
        self.rho0 * (-(altitude_km - self.h0) / self.scale_height).exp()
    }
}

/// Composition of accelerations acting on the satellite.
///
/// Two-body gravity is always included; J2 and drag are optional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceModel {
    j2: bool,
    drag: Option<DragParams>,
    #[cfg(test)]
    frozen: bool,
}

impl ForceModel {
    /// Keplerian two-body gravity only.
    pub fn two_body() -> Self {
        ForceModel {
            j2: false,
            drag: None,
            #[cfg(test)]
            frozen: false,
        }
    }

    /// Two-body plus the J2 oblateness harmonic.
    pub fn two_body_j2() -> Self {
        Self::two_body().with_j2(true)
    }

    /// Two-body, J2, and default cannonball drag; the full LEO model.
    pub fn leo_default() -> Self {
        Self::two_body()
            .with_j2(true)
            .with_drag(Some(DragParams::default()))
    }

    pub fn with_j2(mut self, enabled: bool) -> Self {
        self.j2 = enabled;
        self
    }

    pub fn with_drag(mut self, drag: Option<DragParams>) -> Self {
        self.drag = drag;
        self
    }

    pub fn j2_enabled(&self) -> bool {
        self.j2
    }

    pub fn drag_params(&self) -> Option<&DragParams> {
        self.drag.as_ref()
    }

    fn validate(&self) -> Result<(), DynamicsError> {
        if let Some(d) = &self.drag {
            d.validate()?;
        }
        Ok(())
    }

    /// All accelerations disabled, so f becomes the identity map. Test support
    /// for filter fixed-point checks only.
    #[cfg(test)]
    pub(crate) fn frozen() -> Self {
        ForceModel {
            j2: false,
            drag: None,
            frozen: true,
        }
    }

    fn is_frozen(&self) -> bool {
        #[cfg(test)]
        {
            self.frozen
        }
        #[cfg(not(test))]
        {
            false
        }
    }
}

impl Default for ForceModel {
    fn default() -> Self {
        Self::leo_default()
    }
}

/// Integration method and its controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegratorConfig {
    /// Classical fixed-step RK4; `step` in seconds.
    Rk4 { step: f64 },
    /// Adaptive Runge–Kutta–Fehlberg 4(5) with local extrapolation.
    Rkf45 {
        rel_tol: f64,
        abs_tol: f64,
        /// Smallest admissible step (s); going below it raises
        /// [`DynamicsError::StepUnderflow`].
        min_step: f64,
        /// Largest admissible step (s).
        max_step: f64,
    },
}

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        IntegratorConfig::Rk4 { step }
    }

    pub fn rkf45(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorConfig::Rkf45 {
            rel_tol,
            abs_tol,
            min_step: 1e-6,
            max_step: 600.0,
        }
    }

    fn validate(&self) -> Result<(), DynamicsError> {
        let ok = match *self {
            IntegratorConfig::Rk4 { step } => step > 0.0 && step.is_finite(),
            IntegratorConfig::Rkf45 {
                rel_tol,
                abs_tol,
                min_step,
                max_step,
            } => rel_tol > 0.0 && abs_tol > 0.0 && min_step > 0.0 && min_step <= max_step,
        };
        if ok {
            Ok(())
        } else {
            Err(DynamicsError::InvalidIntegratorConfig)
        }
    }
}

impl Default for IntegratorConfig {
    /// Accurate enough that truth orbits are far better than the filter
    /// errors measured against them.
    fn default() -> Self {
        IntegratorConfig::rkf45(1e-10, 1e-12)
    }
}

#[derive(Debug, Clone, Error)]
pub enum DynamicsError {
    #[error("state radius {radius_km:.3} km is at or below the Earth's surface")]
    Subsurface { radius_km: f64 },
    #[error("trajectory reentered the atmosphere boundary at {epoch}")]
    Reentry { epoch: Epoch },
    #[error("step size underflow at {epoch}: tolerance unreachable at min_step")]
    StepUnderflow { epoch: Epoch },
    #[error("propagation interval must be non-negative and finite, got {0}")]
    InvalidInterval(f64),
    #[error("drag parameters must be positive (cd, area-to-mass, scale height)")]
    InvalidDragParams,
    #[error("integrator configuration invalid (steps and tolerances must be positive)")]
    InvalidIntegratorConfig,
    #[error(transparent)]
    State(#[from] StateError),
}

type Y6 = SVector<f64, 6>;

/// Total acceleration (km/s²) on an inertial-frame state.
///
/// Drag uses the velocity relative to the co-rotating atmosphere,
/// v_rel = v − ω×r, and the exponential density profile of [`DragParams`].
pub fn acceleration(s: &StateVector, fm: &ForceModel) -> Result<Vec3, DynamicsError> {
    if s.frame != Frame::Eci {
        return Err(StateError::FrameMismatch {
            expected: Frame::Eci,
            found: s.frame,
        }
        .into());
    }
    fm.validate()?;
    let r = s.radius();
    if r <= R_EARTH {
        return Err(DynamicsError::Subsurface { radius_km: r });
    }
    Ok(accel_unchecked(&s.position, &s.velocity, fm))
}

fn accel_unchecked(position: &Vec3, velocity: &Vec3, fm: &ForceModel) -> Vec3 {
    if fm.is_frozen() {
        return Vec3::zeros();
    }
    let r = position.norm();
    let r3 = r * r * r;
    let mut acc = position * (-MU_EARTH / r3);

    if fm.j2 {
        let r2 = r * r;
        let z2_r2 = (position.z / r) * (position.z / r);
        let factor = -1.5 * J2 * MU_EARTH * R_EARTH * R_EARTH / (r2 * r3);
        acc.x += factor * position.x * (1.0 - 5.0 * z2_r2);
        acc.y += factor * position.y * (1.0 - 5.0 * z2_r2);
        acc.z += factor * position.z * (3.0 - 5.0 * z2_r2);
    }

    if let Some(drag) = &fm.drag {
        let omega = Vec3::new(0.0, 0.0, OMEGA_EARTH);
        let v_rel = velocity - omega.cross(position);
        let v_rel_mag = v_rel.norm();
        if v_rel_mag > 0.0 {
            let rho = drag.density(r - R_EARTH);
            // ρ·(A/m) is 1/m; the M_PER_KM factor keeps the result in km/s²
            // for velocities given in km/s.
            let k = -0.5 * rho * drag.cd * drag.area_to_mass * M_PER_KM * v_rel_mag;
            acc += v_rel * k;
        }
    }

    acc
}

fn deriv(y: &Y6, fm: &ForceModel) -> Y6 {
    let position = Vec3::new(y[0], y[1], y[2]);
    let velocity = Vec3::new(y[3], y[4], y[5]);
    let a = accel_unchecked(&position, &velocity, fm);
    Y6::from_column_slice(&[y[3], y[4], y[5], a.x, a.y, a.z])
}

/// Numerically integrates the state over [t, t+dt] via Cowell's method.
///
/// The returned epoch is exactly t+dt. The state must be inertial; the
/// harness converts ECEF inputs before propagating.
pub fn propagate(
    s: &StateVector,
    fm: &ForceModel,
    cfg: &IntegratorConfig,
    dt: f64,
) -> Result<StateVector, DynamicsError> {
    if s.frame != Frame::Eci {
        return Err(StateError::FrameMismatch {
            expected: Frame::Eci,
            found: s.frame,
        }
        .into());
    }
    fm.validate()?;
    cfg.validate()?;
    if !dt.is_finite() || dt < 0.0 {
        return Err(DynamicsError::InvalidInterval(dt));
    }
    if dt == 0.0 {
        return Ok(*s);
    }
    if s.radius() <= R_EARTH {
        return Err(DynamicsError::Subsurface {
            radius_km: s.radius(),
        });
    }

    let y0 = Y6::from_column_slice(&s.to_array());
    let y_final = match *cfg {
        IntegratorConfig::Rk4 { step } => integrate_rk4(y0, fm, dt, step, s.epoch)?,
        IntegratorConfig::Rkf45 {
            rel_tol,
            abs_tol,
            min_step,
            max_step,
        } => integrate_rkf45(y0, fm, dt, rel_tol, abs_tol, min_step, max_step, s.epoch)?,
    };

    let epoch = s.epoch.plus(dt)?;
    Ok(StateVector::new(
        epoch,
        Vec3::new(y_final[0], y_final[1], y_final[2]),
        Vec3::new(y_final[3], y_final[4], y_final[5]),
        Frame::Eci,
    )?)
}

fn check_above_surface(y: &Y6, epoch: Epoch, tau: f64) -> Result<(), DynamicsError> {
    let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
    if !r.is_finite() || r <= R_EARTH {
        let t = epoch.seconds() + tau;
        return Err(DynamicsError::Reentry {
            epoch: Epoch::new(t.max(0.0)).unwrap_or(Epoch::ZERO),
        });
    }
    Ok(())
}

fn rk4_step(y: &Y6, fm: &ForceModel, h: f64) -> Y6 {
    let k1 = deriv(y, fm);
    let k2 = deriv(&(y + k1 * (h / 2.0)), fm);
    let k3 = deriv(&(y + k2 * (h / 2.0)), fm);
    let k4 = deriv(&(y + k3 * h), fm);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

fn integrate_rk4(
    mut y: Y6,
    fm: &ForceModel,
    dt: f64,
    step: f64,
    epoch: Epoch,
) -> Result<Y6, DynamicsError> {
    // uniform substeps so that dt lands exactly and multiples of `step`
    // integrate with `step` itself
    let n = (dt / step).ceil().max(1.0) as usize;
    let h = dt / n as f64;
    let mut tau = 0.0;
    for _ in 0..n {
        y = rk4_step(&y, fm, h);
        tau += h;
        check_above_surface(&y, epoch, tau)?;
    }
    Ok(y)
}

// Fehlberg 4(5) tableau.
const RKF_C: [f64; 5] = [1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0];
const RKF_A: [[f64; 5]; 5] = [
    [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [
        -8.0 / 27.0,
        2.0,
        -3544.0 / 2565.0,
        1859.0 / 4104.0,
        -11.0 / 40.0,
    ],
];
/// 5th-order weights; the solution is propagated with these (local extrapolation).
const RKF_B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
/// 4th-order weights; the B5−B4 difference drives the error estimate.
const RKF_B4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -1.0 / 5.0,
    0.0,
];

#[allow(clippy::too_many_arguments)]
fn integrate_rkf45(
    mut y: Y6,
    fm: &ForceModel,
    dt: f64,
    rel_tol: f64,
    abs_tol: f64,
    min_step: f64,
    max_step: f64,
    epoch: Epoch,
) -> Result<Y6, DynamicsError> {
    let mut tau = 0.0;
    let mut h = dt.min(max_step);

    while tau < dt {
        h = h.min(dt - tau);

        let k1 = deriv(&y, fm);
        let k2 = deriv(&(y + k1 * (RKF_A[0][0] * h)), fm);
        let k3 = deriv(&(y + (k1 * RKF_A[1][0] + k2 * RKF_A[1][1]) * h), fm);
        let k4 = deriv(
            &(y + (k1 * RKF_A[2][0] + k2 * RKF_A[2][1] + k3 * RKF_A[2][2]) * h),
            fm,
        );
        let k5 = deriv(
            &(y + (k1 * RKF_A[3][0] + k2 * RKF_A[3][1] + k3 * RKF_A[3][2] + k4 * RKF_A[3][3]) * h),
            fm,
        );
        let k6 = deriv(
            &(y + (k1 * RKF_A[4][0]
                + k2 * RKF_A[4][1]
                + k3 * RKF_A[4][2]
                + k4 * RKF_A[4][3]
                + k5 * RKF_A[4][4])
                * h),
            fm,
        );
        let _ = RKF_C; // nodes are implicit in the autonomous system

        let ks = [k1, k2, k3, k4, k5, k6];
        let mut y5 = y;
        let mut err = Y6::zeros();
        for (i, k) in ks.iter().enumerate() {
            y5 += k * (RKF_B5[i] * h);
            err += k * ((RKF_B5[i] - RKF_B4[i]) * h);
        }

        // RMS of the componentwise error over its tolerance scale
        let mut sum = 0.0;
        for i in 0..6 {
            let scale = abs_tol + rel_tol * y[i].abs().max(y5[i].abs());
            let e = err[i] / scale;
            sum += e * e;
        }
        let err_norm = (sum / 6.0).sqrt();

        if err_norm <= 1.0 {
            y = y5;
            tau += h;
            check_above_surface(&y, epoch, tau)?;
            let grow = if err_norm < 1e-12 {
                5.0
            } else {
                (0.9 * err_norm.powf(-0.2)).min(5.0)
            };
            h = (h * grow).min(max_step);
        } else {
            if h <= min_step {
                let t = epoch.seconds() + tau;
                return Err(DynamicsError::StepUnderflow {
                    epoch: Epoch::new(t).unwrap_or(Epoch::ZERO),
                });
            }
            let shrink = (0.9 * err_norm.powf(-0.25)).max(0.1);
            h = (h * shrink).max(min_step);
        }
    }

    Ok(y)
}

/// Finite-difference perturbation sizes for the state-transition Jacobian.
const FD_POS_DELTA_KM: f64 = 1e-5;
const FD_VEL_DELTA_KM_S: f64 = 1e-8;

/// F_t = ∂f/∂x of [`propagate`] over dt, by central finite differences.
///
/// Column j perturbs state component j by ±δ (1e-5 km for position, 1e-8 km/s
/// for velocity) and propagates both variants, keeping the force model fully
/// pluggable. dt = 0 yields the exact identity.
pub fn state_transition_jacobian(
    s: &StateVector,
    fm: &ForceModel,
    dt: f64,
    cfg: &IntegratorConfig,
) -> Result<Matrix6, DynamicsError> {
    if dt == 0.0 {
        return Ok(Matrix6::identity());
    }
    let mut f = Matrix6::zeros();
    let base = s.to_array();
    for j in 0..6 {
        let delta = if j < 3 {
            FD_POS_DELTA_KM
        } else {
            FD_VEL_DELTA_KM_S
        };
        let mut plus = base;
        let mut minus = base;
        plus[j] += delta;
        minus[j] -= delta;
        let sp = perturbed_state(s, &plus)?;
        let sm = perturbed_state(s, &minus)?;
        let fp = propagate(&sp, fm, cfg, dt)?.to_array();
        let fm_ = propagate(&sm, fm, cfg, dt)?.to_array();
        for i in 0..6 {
            f[(i, j)] = (fp[i] - fm_[i]) / (2.0 * delta);
        }
    }
    Ok(f)
}

fn perturbed_state(s: &StateVector, components: &[f64; 6]) -> Result<StateVector, DynamicsError> {
    Ok(StateVector::new(
        s.epoch,
        Vec3::new(components[0], components[1], components[2]),
        Vec3::new(components[3], components[4], components[5]),
        s.frame,
    )?)
}
