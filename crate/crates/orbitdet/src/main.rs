//! Command-line front end over the orbitdet harness.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use orbitdet::filters::FilterVariant;
use orbitdet::harness::{
    iod_then_filter, load_scenario, run_scenario, score_predictions, sweep_dropout, HarnessError,
    RunReport, Scenario, SweepReport,
};

const USAGE: &str = "\
orbitdet — satellite orbit determination toolkit

USAGE:
  orbitdet simulate --scenario <file> [--variant ekf|ekffg|cowell] [--runs N]
                    [--seed N] [--out <dir>] [--format table|csv]
  orbitdet iod      --scenario <file> [--runs N] [--seed N] [--out <dir>]
                    [--format table|csv]
  orbitdet score    --predictions <file> --truth <file> [--out <dir>]
                    [--format table|csv]
  orbitdet sweep    --scenario <file> [--minutes a,b,c] [--runs N] [--seed N]
                    [--out <dir>] [--format table|csv]

Set ORBITDET_WORKERS to bound the Monte-Carlo worker count.

EXIT CODES: 0 success, 1 usage error, 2 scenario/parse error, 3 numerical failure.";

#[derive(Clone, Copy, PartialEq)]
enum OutputFormat {
    Table,
    Csv,
}

#[derive(Default)]
struct Opts {
    scenario: Option<PathBuf>,
    variant: Option<FilterVariant>,
    runs: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    predictions: Option<PathBuf>,
    truth: Option<PathBuf>,
    minutes: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn usage_error(message: &str) -> u8 {
    eprintln!("error: {message}\n\n{USAGE}");
    1
}

fn harness_exit_code(err: &HarnessError) -> u8 {
    match err {
        HarnessError::Scenario(_)
        | HarnessError::Score(_)
        | HarnessError::InvalidScenario(_)
        | HarnessError::Io(_) => 2,
        _ => 3,
    }
}

fn run(args: &[String]) -> Result<(), u8> {
    let Some(command) = args.first() else {
        return Err(usage_error("missing subcommand"));
    };
    if command == "--help" || command == "-h" || command == "help" {
        println!("{USAGE}");
        return Ok(());
    }
    let opts = parse_opts(&args[1..])?;

    match command.as_str() {
        "simulate" => {
            let sc = load_with_overrides(&opts, true)?;
            let report = run_scenario(&sc).map_err(report_harness_error)?;
            emit_run_report(&report, &opts)
        }
        "iod" => {
            let sc = load_with_overrides(&opts, false)?;
            let report = iod_then_filter(&sc).map_err(report_harness_error)?;
            emit_run_report(&report, &opts)
        }
        "score" => {
            let Some(pred) = &opts.predictions else {
                return Err(usage_error("score requires --predictions <file>"));
            };
            let Some(truth) = &opts.truth else {
                return Err(usage_error("score requires --truth <file>"));
            };
            let report = score_predictions(pred, truth).map_err(report_harness_error)?;
            emit_run_report(&report, &opts)
        }
        "sweep" => {
            let sc = load_with_overrides(&opts, false)?;
            let minutes = opts
                .minutes
                .clone()
                .unwrap_or_else(|| vec![10.0, 30.0, 60.0, 90.0, 120.0]);
            let durations: Vec<f64> = minutes.iter().map(|m| m * 60.0).collect();
            let report = sweep_dropout(&sc, &durations).map_err(report_harness_error)?;
            emit_sweep_report(&report, &opts)
        }
        other => Err(usage_error(&format!("unknown subcommand `{other}`"))),
    }
}

fn parse_opts(args: &[String]) -> Result<Opts, u8> {
    let mut opts = Opts::default();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| -> Result<&String, u8> {
            it.next()
                .ok_or_else(|| usage_error(&format!("{name} requires a value")))
        };
        match flag.as_str() {
            "--scenario" => opts.scenario = Some(PathBuf::from(value("--scenario")?)),
            "--variant" => {
                let v = value("--variant")?;
                opts.variant = Some(
                    FilterVariant::parse(v)
                        .ok_or_else(|| usage_error(&format!("unknown variant `{v}`")))?,
                );
            }
            "--runs" => {
                let v = value("--runs")?;
                opts.runs = Some(
                    v.parse::<usize>()
                        .map_err(|_| usage_error(&format!("--runs expects a count, got `{v}`")))?,
                );
            }
            "--seed" => {
                let v = value("--seed")?;
                opts.seed =
                    Some(v.parse::<u64>().map_err(|_| {
                        usage_error(&format!("--seed expects an integer, got `{v}`"))
                    })?);
            }
            "--out" => opts.out = Some(PathBuf::from(value("--out")?)),
            "--format" => {
                let v = value("--format")?;
                opts.format = Some(match v.as_str() {
                    "table" => OutputFormat::Table,
                    "csv" => OutputFormat::Csv,
                    other => {
                        return Err(usage_error(&format!(
                            "--format expects table or csv, got `{other}`"
                        )))
                    }
                });
            }
            "--predictions" => opts.predictions = Some(PathBuf::from(value("--predictions")?)),
            "--truth" => opts.truth = Some(PathBuf::from(value("--truth")?)),
            "--minutes" => {
                let v = value("--minutes")?;
                let mut minutes = Vec::new();
                for part in v.split(',') {
                    let m = part.trim().parse::<f64>().map_err(|_| {
                        usage_error(&format!("--minutes expects numbers, got `{part}`"))
                    })?;
                    minutes.push(m);
                }
                opts.minutes = Some(minutes);
            }
            other => return Err(usage_error(&format!("unknown flag `{other}`"))),
        }
    }
    Ok(opts)
}

fn load_with_overrides(opts: &Opts, allow_variant: bool) -> Result<Scenario, u8> {
    let Some(path) = &opts.scenario else {
        return Err(usage_error("missing --scenario <file>"));
    };
    let mut sc = load_scenario(path).map_err(|e| {
        eprintln!("error: {e}");
        2
    })?;
    if let Some(v) = opts.variant {
        if !allow_variant {
            return Err(usage_error("--variant applies to the simulate subcommand"));
        }
        sc.variant = v;
    }
    if let Some(n) = opts.runs {
        sc.n_runs = n;
    }
    if let Some(s) = opts.seed {
        sc.seed = s;
    }
    if sc.n_runs < 1 {
        return Err(usage_error("--runs must be at least 1"));
    }
    Ok(sc)
}

fn report_harness_error(err: HarnessError) -> u8 {
    eprintln!("error: {err}");
    harness_exit_code(&err)
}

fn write_out(path: &Path, contents: &str) -> Result<(), u8> {
    std::fs::write(path, contents).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        2
    })
}

fn emit_run_report(report: &RunReport, opts: &Opts) -> Result<(), u8> {
    match opts.format.unwrap_or(OutputFormat::Table) {
        OutputFormat::Table => print!("{}", report.render_table()),
        OutputFormat::Csv => print!("{}", report.render_csv()),
    }
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir).map_err(|e| {
            eprintln!("error: cannot create {}: {e}", dir.display());
            2
        })?;
        write_out(&dir.join("report.txt"), &report.render_table())?;
        write_out(&dir.join("report.csv"), &report.render_csv())?;
        write_out(&dir.join("steps.csv"), &report.render_steps_csv())?;
    }
    Ok(())
}

fn emit_sweep_report(report: &SweepReport, opts: &Opts) -> Result<(), u8> {
    match opts.format.unwrap_or(OutputFormat::Table) {
        OutputFormat::Table => print!("{}", report.render_table()),
        OutputFormat::Csv => print!("{}", report.render_csv()),
    }
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir).map_err(|e| {
            eprintln!("error: cannot create {}: {e}", dir.display());
            2
        })?;
        write_out(&dir.join("sweep.txt"), &report.render_table())?;
        write_out(&dir.join("sweep.csv"), &report.render_csv())?;
    }
    Ok(())
}
