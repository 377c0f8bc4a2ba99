//! Command-line entry point.
//!
//! Exit codes: 0 success / all cases pass, 1 test or parse failures,
//! 2 usage or configuration error, 3 I/O or schema error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};

use crate::config::ControllerConfig;
use crate::harness::{self, evaluate, load_scenario, render_report, CaseResult, CaseStatus, Report, RunError};
use crate::nmea::{knots_to_kph, parse_rmc, FixStatus, RmcData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURES: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "motoguard", version, about = "Motorcycle safety controller: scenario replay and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay one scenario and write its event log.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// key=value config file applied over the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the event log here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every `*.jsonl` scenario in a directory and report the results.
    Eval {
        #[arg(long)]
        scenario_dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the text report here and the structured report to `<path>.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Parse NMEA RMC sentences.
    #[command(group(ArgGroup::new("input").required(true).args(["line", "file"])))]
    Nmea {
        #[arg(long)]
        line: Option<String>,
        /// One sentence per line.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

/// Parse `args` (including the program name) and execute.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match cli.command {
        Command::Simulate { scenario, config, out: dest } => {
            cmd_simulate(&scenario, config.as_deref(), dest.as_deref(), out, err)
        }
        Command::Eval {
            scenario_dir,
            config,
            report,
        } => cmd_eval(&scenario_dir, config.as_deref(), report.as_deref(), out, err),
        Command::Nmea { line, file } => cmd_nmea(line.as_deref(), file.as_deref(), out, err),
    }
}

/// Defaults, or the defaults overlaid with a config file. Errors carry the
/// exit code to use.
fn load_config(path: Option<&Path>) -> Result<ControllerConfig, (i32, String)> {
    let Some(path) = path else {
        return Ok(ControllerConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| (EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
    let cfg = ControllerConfig::from_kv_text(&text).map_err(|e| (EXIT_USAGE, format!("{}: {e}", path.display())))?;
    cfg.validate().map_err(|e| (EXIT_USAGE, e.to_string()))?;
    Ok(cfg)
}

fn cmd_simulate(
    scenario: &Path,
    config: Option<&Path>,
    dest: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let base = match load_config(config) {
        Ok(c) => c,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return code;
        }
    };
    let sc = match load_scenario(scenario) {
        Ok(sc) => sc,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", scenario.display());
            return EXIT_IO;
        }
    };
    let log = match harness::run(&sc, &base) {
        Ok(log) => log,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                RunError::Override(_) | RunError::Config(_) => EXIT_USAGE,
                RunError::Contract { .. } => EXIT_IO,
            };
        }
    };
    let text = log.to_jsonl();
    match dest {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_IO;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    EXIT_OK
}

fn scenario_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

/// Evaluate every scenario file under `dir`, in file-name order.
pub fn evaluate_dir(dir: &Path, base: &ControllerConfig) -> std::io::Result<Report> {
    let files = scenario_files(dir)?;
    let cases = files
        .iter()
        .enumerate()
        .map(|(i, path)| {
            let id = format!("TC-{:02}", i + 1);
            match load_scenario(path) {
                Ok(sc) => evaluate(&sc, base, id),
                Err(e) => {
                    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    CaseResult {
                        id,
                        objective: name.clone(),
                        name,
                        actions: "-".into(),
                        expected: "-".into(),
                        status: CaseStatus::NotExecuted,
                        cm: Default::default(),
                        mismatches: Vec::new(),
                        error: Some(format!("{}: {e}", path.display())),
                    }
                }
            }
        })
        .collect();
    Ok(Report::build(cases))
}

fn cmd_eval(
    dir: &Path,
    config: Option<&Path>,
    report_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let base = match load_config(config) {
        Ok(c) => c,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return code;
        }
    };
    let report = match evaluate_dir(dir, &base) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", dir.display());
            return EXIT_IO;
        }
    };
    if report.cases.is_empty() {
        let _ = writeln!(err, "error: no *.jsonl scenarios in {}", dir.display());
        return EXIT_USAGE;
    }
    let text = render_report(&report);
    match report_path {
        Some(path) => {
            let mut json_path = path.as_os_str().to_owned();
            json_path.push(".json");
            if let Err(e) = fs::write(path, &text).and_then(|_| fs::write(&json_path, report.to_json())) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_IO;
            }
            let _ = writeln!(out, "report written to {}", path.display());
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_FAILURES
    }
}

fn describe_rmc(r: &RmcData) -> String {
    let status = match r.status {
        FixStatus::Active => "A",
        FixStatus::Void => "V",
    };
    // the parser rejects negative speeds, so the conversion cannot fail
    let kph = knots_to_kph(r.speed_knots).unwrap_or(f64::NAN);
    format!(
        "time={} date={} status={} lat={:.6} lon={:.6} speed_kn={} speed_kph={:.3} course={}",
        r.utc_time, r.date, status, r.point.lat_deg, r.point.lon_deg, r.speed_knots, kph, r.course_deg
    )
}

fn cmd_nmea(line: Option<&str>, file: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text;
    let lines: Vec<&str> = match (line, file) {
        (Some(l), None) => vec![l],
        (None, Some(path)) => {
            text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
                    return EXIT_IO;
                }
            };
            text.lines().filter(|l| !l.trim().is_empty()).collect()
        }
        // clap's argument group makes the sources exclusive and required
        _ => {
            let _ = writeln!(err, "error: give exactly one of --line or --file");
            return EXIT_USAGE;
        }
    };
    let mut failed = false;
    for l in lines {
        match parse_rmc(l) {
            Ok(r) => {
                let _ = writeln!(out, "OK {}", describe_rmc(&r));
            }
            Err(e) => {
                failed = true;
                let _ = writeln!(out, "ERR {}: {e}", e.name());
            }
        }
    }
    if failed {
        EXIT_FAILURES
    } else {
        EXIT_OK
    }
}
