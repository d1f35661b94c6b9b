//! Scenario files: a versioned plain-text key/value format.
//!
//! Lines hold `key value...` pairs separated by whitespace; `#` starts a
//! comment; the first directive must be `version 1`. Unknown keys are errors
//! so that a typo can never silently fall back to a default. Keys not present
//! take the documented defaults (the README lists the full schema).

use std::path::Path;

use thiserror::Error;

use crate::dynamics::{DragParams, ForceModel, IntegratorConfig};
use crate::elements::OrbitalElements;
use crate::filters::{FilterVariant, NoiseConfig};
use crate::iod::GroundStation;
use crate::measurements::{DropoutWindow, MeasurementSchedule};
use crate::state::{Epoch, Frame, StateVector, Vec3};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("i/o error reading scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario must begin with a `version 1` directive")]
    MissingVersion,
    #[error("unsupported scenario version `{0}` (expected 1)")]
    UnsupportedVersion(String),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Initial truth orbit, either as Keplerian elements or a raw state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialOrbit {
    Elements(OrbitalElements),
    State(StateVector),
}

/// Ground-station geometry for the IOD-seeded pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct IodSetup {
    /// Exactly three stations.
    pub stations: Vec<GroundStation>,
    /// Strictly increasing observation epochs (s); the middle one must lie on
    /// the measurement cadence grid.
    pub epochs_s: [f64; 3],
    /// Range noise standard deviation (km).
    pub range_sigma_km: f64,
}

impl Default for IodSetup {
    fn default() -> Self {
        IodSetup {
            stations: Vec::new(),
            epochs_s: [0.0, 60.0, 120.0],
            range_sigma_km: 0.01,
        }
    }
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub orbit: InitialOrbit,
    pub force_model: ForceModel,
    pub integrator: IntegratorConfig,
    /// Per-axis process noise, position block (km² per step).
    pub q_pos_km2: f64,
    /// Per-axis process noise, velocity block (km²/s² per step).
    pub q_vel_km2_s2: f64,
    /// Observation noise the filter assumes, per axis (km).
    pub r_sigma_km: f64,
    /// Initial estimate error standard deviations; also the IOD-seeded
    /// initial covariance.
    pub init_pos_sigma_km: f64,
    pub init_vel_sigma_km_s: f64,
    /// Seconds between measurement ticks.
    pub cadence_s: f64,
    /// True noise applied to synthesized measurements, per axis (km).
    pub meas_sigma_km: f64,
    /// Contact-loss intervals, (start s, end s).
    pub dropouts: Vec<(f64, f64)>,
    pub duration_s: f64,
    pub variant: FilterVariant,
    pub n_runs: usize,
    pub seed: u64,
    /// Per-run initial-orbit position jitter (km); 0 disables it and lets all
    /// runs share one truth trajectory.
    pub orbit_jitter_km: f64,
    pub iod: Option<IodSetup>,
}

impl Default for Scenario {
    /// 500 km circular LEO, 10 s GPS cadence, and a 90-minute dropout
    /// starting at t = 600 s.
    fn default() -> Self {
        Scenario {
            name: "leo-dropout-default".to_string(),
            orbit: InitialOrbit::Elements(OrbitalElements {
                semi_major_axis: 6878.137,
                eccentricity: 0.0,
                inclination: 51.6f64.to_radians(),
                raan: 0.0,
                arg_periapsis: 0.0,
                true_anomaly: 0.0,
            }),
            force_model: ForceModel::leo_default(),
            integrator: IntegratorConfig::default(),
            q_pos_km2: 1e-8,
            q_vel_km2_s2: 1e-10,
            r_sigma_km: 0.01,
            init_pos_sigma_km: 1.0,
            init_vel_sigma_km_s: 1e-3,
            cadence_s: 10.0,
            meas_sigma_km: 0.01,
            dropouts: vec![(600.0, 6000.0)],
            duration_s: 6000.0,
            variant: FilterVariant::Ekf,
            n_runs: 25,
            seed: 1,
            orbit_jitter_km: 0.0,
            iod: None,
        }
    }
}

impl Scenario {
    pub fn noise_config(&self) -> NoiseConfig {
        NoiseConfig::diagonal(self.q_pos_km2, self.q_vel_km2_s2, self.r_sigma_km)
    }

    /// Measurement schedule for one run, seeded per run.
    pub fn schedule(&self, run_seed: u64) -> Result<MeasurementSchedule, super::HarnessError> {
        let mut windows = Vec::with_capacity(self.dropouts.len());
        for (start, end) in &self.dropouts {
            windows.push(DropoutWindow::new(Epoch::new(*start)?, Epoch::new(*end)?)?);
        }
        Ok(MeasurementSchedule::new(
            self.cadence_s,
            windows,
            self.meas_sigma_km,
            run_seed,
        )?)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        if self.n_runs < 1 {
            return Err(ScenarioError::Invalid(
                "run.n_runs must be at least 1".into(),
            ));
        }
        if self.duration_s <= 0.0 || !self.duration_s.is_finite() {
            return Err(ScenarioError::Invalid(
                "run.duration_s must be positive".into(),
            ));
        }
        if self.cadence_s <= 0.0 || !self.cadence_s.is_finite() {
            return Err(ScenarioError::Invalid(
                "schedule.cadence_s must be positive".into(),
            ));
        }
        if let InitialOrbit::Elements(el) = &self.orbit {
            if el.semi_major_axis <= crate::constants::R_EARTH {
                return Err(ScenarioError::Invalid(
                    "orbit.a_km must exceed the Earth radius".into(),
                ));
            }
            if !(0.0..1.0).contains(&el.eccentricity) {
                return Err(ScenarioError::Invalid(
                    "orbit.e must satisfy 0 <= e < 1".into(),
                ));
            }
        }
        if let Some(iod) = &self.iod {
            if iod.stations.len() != 3 {
                return Err(ScenarioError::Invalid(format!(
                    "exactly three iod.station lines are required, found {}",
                    iod.stations.len()
                )));
            }
            let [t1, t2, t3] = iod.epochs_s;
            if !(t1 < t2 && t2 < t3) {
                return Err(ScenarioError::Invalid(
                    "iod.epochs_s must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut sc = Scenario::default();
    // elements under construction; orbit.rv overrides them entirely
    let mut elements = match sc.orbit {
        InitialOrbit::Elements(el) => el,
        InitialOrbit::State(_) => unreachable!("default scenario uses elements"),
    };
    let mut saw_rv = false;
    let mut saw_element_key = false;
    let mut saw_version = false;
    let mut iod: Option<IodSetup> = None;
    let mut dropouts: Option<Vec<(f64, f64)>> = None;
    // integrator fields accumulate before assembly
    let (mut method, mut step_s, mut rel_tol, mut abs_tol, mut min_step, mut max_step) = (
        "rkf45".to_string(),
        10.0f64,
        1e-10f64,
        1e-12f64,
        1e-6f64,
        600.0f64,
    );
    let mut drag = DragParams::default();
    let mut drag_on = true;
    let mut j2_on = true;
    let mut rv = [0.0f64; 6];

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().expect("non-empty line has a first token");
        let values: Vec<&str> = parts.collect();

        let bad = |message: String| ScenarioError::BadValue {
            line: line_no,
            key: key.to_string(),
            message,
        };
        let one = || -> Result<&str, ScenarioError> {
            if values.len() == 1 {
                Ok(values[0])
            } else {
                Err(bad(format!(
                    "expected exactly one value, found {}",
                    values.len()
                )))
            }
        };
        let parse_f64 = |s: &str| -> Result<f64, ScenarioError> {
            s.parse::<f64>()
                .map_err(|e| bad(format!("`{s}` is not a number ({e})")))
        };

        if !saw_version {
            if key != "version" {
                return Err(ScenarioError::MissingVersion);
            }
            let v = one()?;
            if v != "1" {
                return Err(ScenarioError::UnsupportedVersion(v.to_string()));
            }
            saw_version = true;
            continue;
        }

        match key {
            "version" => return Err(bad("duplicate version directive".into())),
            "name" => {
                if values.is_empty() {
                    return Err(bad("expected a name".into()));
                }
                sc.name = values.join(" ");
            }
            "orbit.a_km" => {
                elements.semi_major_axis = parse_f64(one()?)?;
                saw_element_key = true;
            }
            "orbit.e" => {
                elements.eccentricity = parse_f64(one()?)?;
                saw_element_key = true;
            }
            "orbit.i_deg" => {
                elements.inclination = parse_f64(one()?)?.to_radians();
                saw_element_key = true;
            }
            "orbit.raan_deg" => {
                elements.raan = parse_f64(one()?)?.to_radians();
                saw_element_key = true;
            }
            "orbit.argp_deg" => {
                elements.arg_periapsis = parse_f64(one()?)?.to_radians();
                saw_element_key = true;
            }
            "orbit.nu_deg" => {
                elements.true_anomaly = parse_f64(one()?)?.to_radians();
                saw_element_key = true;
            }
            "orbit.rv" => {
                if values.len() != 6 {
                    return Err(bad(
                        "expected 6 values: x y z vx vy vz (km, km/s, ECI)".into()
                    ));
                }
                for (i, v) in values.iter().enumerate() {
                    rv[i] = parse_f64(v)?;
                }
                saw_rv = true;
            }
            "forces.j2" => j2_on = parse_bool(one()?).map_err(&bad)?,
            "forces.drag" => drag_on = parse_bool(one()?).map_err(&bad)?,
            "forces.cd" => drag.cd = parse_f64(one()?)?,
            "forces.area_to_mass_m2_per_kg" => drag.area_to_mass = parse_f64(one()?)?,
            "forces.rho0_kg_per_m3" => drag.rho0 = parse_f64(one()?)?,
            "forces.h0_km" => drag.h0 = parse_f64(one()?)?,
            "forces.scale_height_km" => drag.scale_height = parse_f64(one()?)?,
            "integrator.method" => {
                let m = one()?;
                if m != "rk4" && m != "rkf45" {
                    return Err(bad(format!("unknown method `{m}` (rk4 or rkf45)")));
                }
                method = m.to_string();
            }
            "integrator.step_s" => step_s = parse_f64(one()?)?,
            "integrator.rel_tol" => rel_tol = parse_f64(one()?)?,
            "integrator.abs_tol" => abs_tol = parse_f64(one()?)?,
            "integrator.min_step_s" => min_step = parse_f64(one()?)?,
            "integrator.max_step_s" => max_step = parse_f64(one()?)?,
            "noise.q_pos_km2" => sc.q_pos_km2 = parse_f64(one()?)?,
            "noise.q_vel_km2_s2" => sc.q_vel_km2_s2 = parse_f64(one()?)?,
            "noise.r_sigma_km" => sc.r_sigma_km = parse_f64(one()?)?,
            "init.pos_sigma_km" => sc.init_pos_sigma_km = parse_f64(one()?)?,
            "init.vel_sigma_km_s" => sc.init_vel_sigma_km_s = parse_f64(one()?)?,
            "schedule.cadence_s" => sc.cadence_s = parse_f64(one()?)?,
            "schedule.sigma_km" => sc.meas_sigma_km = parse_f64(one()?)?,
            "schedule.dropout_s" => {
                if values.len() != 2 {
                    return Err(bad("expected two values: start_s end_s".into()));
                }
                let start = parse_f64(values[0])?;
                let end = parse_f64(values[1])?;
                dropouts.get_or_insert_with(Vec::new).push((start, end));
            }
            "run.duration_s" => sc.duration_s = parse_f64(one()?)?,
            "run.variant" => {
                let v = one()?;
                sc.variant = FilterVariant::parse(v)
                    .ok_or_else(|| bad(format!("unknown variant `{v}` (ekf, ekffg, cowell)")))?;
            }
            "run.n_runs" => {
                sc.n_runs = one()?
                    .parse::<usize>()
                    .map_err(|e| bad(format!("not a count ({e})")))?;
            }
            "run.seed" => {
                sc.seed = one()?
                    .parse::<u64>()
                    .map_err(|e| bad(format!("not a seed ({e})")))?;
            }
            "run.orbit_jitter_km" => sc.orbit_jitter_km = parse_f64(one()?)?,
            "iod.station" => {
                if values.len() != 3 {
                    return Err(bad("expected three values: lat_deg lon_deg alt_km".into()));
                }
                let lat = parse_f64(values[0])?;
                let lon = parse_f64(values[1])?;
                let alt = parse_f64(values[2])?;
                let station =
                    GroundStation::from_degrees(lat, lon, alt).map_err(|e| bad(e.to_string()))?;
                iod.get_or_insert_with(IodSetup::default)
                    .stations
                    .push(station);
            }
            "iod.epochs_s" => {
                if values.len() != 3 {
                    return Err(bad("expected three epochs: t1 t2 t3".into()));
                }
                let setup = iod.get_or_insert_with(IodSetup::default);
                for (i, v) in values.iter().enumerate() {
                    setup.epochs_s[i] = parse_f64(v)?;
                }
            }
            "iod.range_sigma_km" => {
                iod.get_or_insert_with(IodSetup::default).range_sigma_km = parse_f64(one()?)?;
            }
            _ => {
                return Err(ScenarioError::UnknownKey {
                    line: line_no,
                    key: key.to_string(),
                })
            }
        }
    }

    if !saw_version {
        return Err(ScenarioError::MissingVersion);
    }
    if saw_rv && saw_element_key {
        return Err(ScenarioError::Invalid(
            "orbit.rv cannot be combined with orbit element keys".into(),
        ));
    }

    sc.orbit = if saw_rv {
        let state = StateVector::new(
            Epoch::ZERO,
            Vec3::new(rv[0], rv[1], rv[2]),
            Vec3::new(rv[3], rv[4], rv[5]),
            Frame::Eci,
        )
        .map_err(|e| ScenarioError::Invalid(format!("orbit.rv: {e}")))?;
        InitialOrbit::State(state)
    } else {
        InitialOrbit::Elements(elements)
    };

    sc.force_model = ForceModel::two_body()
        .with_j2(j2_on)
        .with_drag(drag_on.then_some(drag));
    sc.integrator = if method == "rk4" {
        IntegratorConfig::Rk4 { step: step_s }
    } else {
        IntegratorConfig::Rkf45 {
            rel_tol,
            abs_tol,
            min_step,
            max_step,
        }
    };
    if let Some(d) = dropouts {
        sc.dropouts = d;
    }
    sc.iod = iod;
    sc.validate()?;
    Ok(sc)
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("`{other}` is not a boolean (true or false)")),
    }
}
