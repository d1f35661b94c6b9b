//! Run reports, RMSE, and table/CSV rendering.

use crate::state::Vec3;

use super::HarnessError;

/// How the "Top 25% RMSE" aggregate is computed; recorded in every report.
pub const TOP25_DEFINITION: &str = "mean RMSE of the best quartile of runs";

/// Root mean square of Euclidean position errors (km).
pub fn rmse(errors: &[Vec3]) -> Result<f64, HarnessError> {
    if errors.is_empty() {
        return Err(HarnessError::EmptyInput);
    }
    let sum_sq: f64 = errors.iter().map(|e| e.norm_squared()).sum();
    Ok((sum_sq / errors.len() as f64).sqrt())
}

/// RMSE between paired predicted and truth positions (km).
pub fn rmse_paired(predicted: &[Vec3], truth: &[Vec3]) -> Result<f64, HarnessError> {
    if predicted.len() != truth.len() {
        return Err(HarnessError::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let errors: Vec<Vec3> = predicted.iter().zip(truth).map(|(p, t)| p - t).collect();
    rmse(&errors)
}

/// Outcome of a single Monte-Carlo run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Run index within the scenario (seed = base seed + index).
    pub run: usize,
    /// RMSE (km), or the error that excluded this run from the aggregates.
    pub result: Result<f64, String>,
}

/// Aggregated results of one scenario/variant.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub variant: String,
    pub runs_requested: usize,
    pub base_seed: u64,
    /// One entry per requested run, in run order.
    pub outcomes: Vec<RunOutcome>,
    pub failures: usize,
    /// Mean RMSE over successful runs (km).
    pub average_rmse_km: f64,
    /// Minimum RMSE over successful runs (km).
    pub best_rmse_km: f64,
    /// Mean RMSE of the best quartile of successful runs (km).
    pub top25_rmse_km: f64,
    /// Plot-ready series: (t seconds, mean position error km over successful runs).
    pub step_series: Vec<(f64, f64)>,
}

impl RunReport {
    /// Builds the aggregates from per-run outcomes; `Err` when no run succeeded.
    pub fn from_outcomes(
        scenario: String,
        variant: String,
        base_seed: u64,
        outcomes: Vec<RunOutcome>,
        step_series: Vec<(f64, f64)>,
    ) -> Result<Self, HarnessError> {
        let runs_requested = outcomes.len();
        let successes: Vec<f64> = outcomes
            .iter()
            .filter_map(|o| o.result.as_ref().ok())
            .copied()
            .collect();
        if successes.is_empty() {
            let first_error = outcomes
                .iter()
                .find_map(|o| o.result.as_ref().err())
                .cloned()
                .unwrap_or_else(|| "no runs attempted".to_string());
            return Err(HarnessError::AllRunsFailed {
                attempted: runs_requested,
                first_error,
            });
        }
        let failures = runs_requested - successes.len();
        let (average, best, top25) = aggregate(&successes);
        assert!(
            best <= top25 && top25 <= average,
            "aggregate ordering violated: {best} / {top25} / {average}"
        );
        Ok(RunReport {
            scenario,
            variant,
            runs_requested,
            base_seed,
            outcomes,
            failures,
            average_rmse_km: average,
            best_rmse_km: best,
            top25_rmse_km: top25,
            step_series,
        })
    }

    /// Human-readable table, RMSE in km at four decimals.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Scenario: {}    Variant: {}\n",
            self.scenario, self.variant
        ));
        out.push_str(&format!(
            "Runs: {} requested, {} failed    Base seed: {}\n\n",
            self.runs_requested, self.failures, self.base_seed
        ));
        out.push_str("  run       RMSE (km)\n");
        for o in &self.outcomes {
            match &o.result {
                Ok(v) => out.push_str(&format!("  {:>3}  {:>14.4}\n", o.run, v)),
                Err(e) => out.push_str(&format!("  {:>3}  failed: {}\n", o.run, e)),
            }
        }
        out.push_str(&format!(
            "\n  Average RMSE (km): {:>14.4}\n  Best observed (km): {:>13.4}\n  Top 25% RMSE (km): {:>14.4}\n",
            self.average_rmse_km, self.best_rmse_km, self.top25_rmse_km
        ));
        out.push_str(&format!("\nTop 25% = {}.\n", TOP25_DEFINITION));
        out
    }

    /// Machine-readable CSV; all floats use shortest round-trip formatting.
    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# orbitdet report v1\n");
        out.push_str(&format!("# top25 = {}\n", TOP25_DEFINITION));
        out.push_str(&format!("scenario,{}\n", self.scenario));
        out.push_str(&format!("variant,{}\n", self.variant));
        out.push_str(&format!("runs_requested,{}\n", self.runs_requested));
        out.push_str(&format!("base_seed,{}\n", self.base_seed));
        out.push_str(&format!("failures,{}\n", self.failures));
        out.push_str(&format!("average_rmse_km,{}\n", self.average_rmse_km));
        out.push_str(&format!("best_rmse_km,{}\n", self.best_rmse_km));
        out.push_str(&format!("top25_rmse_km,{}\n", self.top25_rmse_km));
        out.push_str("run,status,rmse_km\n");
        for o in &self.outcomes {
            match &o.result {
                Ok(v) => out.push_str(&format!("{},ok,{}\n", o.run, v)),
                Err(e) => out.push_str(&format!("{},failed,{}\n", o.run, e.replace(',', ";"))),
            }
        }
        out
    }

    /// Plot-ready two-column per-step error series.
    pub fn render_steps_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# per-step mean position error over successful runs\n");
        out.push_str("t_s,mean_error_km\n");
        for (t, e) in &self.step_series {
            out.push_str(&format!("{},{}\n", t, e));
        }
        out
    }
}

/// (average, best, mean of the best ceil(n/4) runs).
fn aggregate(rmses: &[f64]) -> (f64, f64, f64) {
    let n = rmses.len();
    let mut sorted = rmses.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let average = rmses.iter().sum::<f64>() / n as f64;
    let best = sorted[0];
    let k = n.div_ceil(4);
    let top25 = sorted[..k].iter().sum::<f64>() / k as f64;
    (average, best, top25)
}

/// One dropout duration of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub dropout_s: f64,
    pub ekffg_avg_rmse_km: f64,
    pub cowell_avg_rmse_km: f64,
    /// EKFFG average over Cowell average.
    pub ratio: f64,
}

/// Dropout-duration sweep results.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub scenario: String,
    pub runs_per_point: usize,
    pub base_seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Dropout sweep: {}    ({} runs per point, base seed {})\n\n",
            self.scenario, self.runs_per_point, self.base_seed
        ));
        out.push_str("  dropout (min)   EKFFG avg RMSE (km)   Cowell avg RMSE (km)      ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "  {:>13.1}  {:>20.4}  {:>21.4}  {:>9.2}\n",
                r.dropout_s / 60.0,
                r.ekffg_avg_rmse_km,
                r.cowell_avg_rmse_km,
                r.ratio
            ));
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# orbitdet sweep v1\n");
        out.push_str(&format!("# scenario,{}\n", self.scenario));
        out.push_str("dropout_s,ekffg_avg_rmse_km,cowell_avg_rmse_km,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.dropout_s, r.ekffg_avg_rmse_km, r.cowell_avg_rmse_km, r.ratio
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_trivial_cases() {
        assert_eq!(rmse(&[Vec3::zeros(), Vec3::zeros()]).unwrap(), 0.0);
        // 3-4-5 triangle
        assert_eq!(rmse(&[Vec3::new(3.0, 4.0, 0.0)]).unwrap(), 5.0);
        // hand computation: √((1+1)/2) = 1
        let e = rmse(&[Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)]).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rmse_rejects_empty_input() {
        assert!(matches!(rmse(&[]), Err(HarnessError::EmptyInput)));
    }

    #[test]
    fn rmse_paired_checks_lengths() {
        let a = vec![Vec3::zeros()];
        let b = vec![Vec3::zeros(), Vec3::zeros()];
        assert!(matches!(
            rmse_paired(&a, &b),
            Err(HarnessError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn aggregate_ordering_holds() {
        let rmses = [5.0, 1.0, 3.0, 2.0, 4.0, 9.0, 7.0, 8.0];
        let (avg, best, top25) = aggregate(&rmses);
        assert!(best <= top25 && top25 <= avg);
        assert_eq!(best, 1.0);
        // ceil(8/4) = 2 best runs: (1+2)/2
        assert_eq!(top25, 1.5);
        assert_eq!(avg, 4.875);
    }

    #[test]
    fn report_excludes_failures_from_aggregates() {
        let outcomes = vec![
            RunOutcome {
                run: 0,
                result: Ok(2.0),
            },
            RunOutcome {
                run: 1,
                result: Err("boom".to_string()),
            },
            RunOutcome {
                run: 2,
                result: Ok(4.0),
            },
        ];
        let r = RunReport::from_outcomes("s".into(), "ekf".into(), 1, outcomes, vec![]).unwrap();
        assert_eq!(r.failures, 1);
        assert_eq!(r.average_rmse_km, 3.0);
        assert_eq!(r.best_rmse_km, 2.0);
    }

    #[test]
    fn all_failures_is_an_error() {
        let outcomes = vec![RunOutcome {
            run: 0,
            result: Err("x".into()),
        }];
        assert!(matches!(
            RunReport::from_outcomes("s".into(), "ekf".into(), 1, outcomes, vec![]),
            Err(HarnessError::AllRunsFailed { .. })
        ));
    }

    #[test]
    fn csv_sanitizes_error_commas() {
        let outcomes = vec![
            RunOutcome {
                run: 0,
                result: Ok(1.0),
            },
            RunOutcome {
                run: 1,
                result: Err("a, b".into()),
            },
        ];
        let r = RunReport::from_outcomes("s".into(), "ekf".into(), 1, outcomes, vec![]).unwrap();
        let csv = r.render_csv();
        assert!(csv.contains("1,failed,a; b"));
    }
}
