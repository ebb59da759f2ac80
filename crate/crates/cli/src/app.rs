//! Subcommand implementations. Each returns an [`Outcome`] or a
//! [`CliError`]; `main` turns these into exit codes.

use std::io::Write;
use std::path::{Path, PathBuf};

use effthermo_core::dynamics::Trajectory;
use effthermo_core::laws::{zero_temperature_limit_check, AuditSummary, LimitTable, Tolerances};
use effthermo_core::scenarios::{preset, Scenario, ScenarioRun, PRESET_NAMES};
use rayon::prelude::*;

use crate::config::{apply_parameter, ConfigFile, SweepConfig};
use crate::ledger::{self, Cell, Format, Table};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub format: Format,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub tol_identity: Option<f64>,
    pub tol_inequality: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out: PathBuf::from("out"),
            format: Format::Csv,
            seed: None,
            workers: None,
            tol_identity: None,
            tol_inequality: None,
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    /// Human-readable description of the first failed audit.
    pub failure: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed { 0 } else { 1 }
    }
}

/// A path to an existing file is read as a config; otherwise the argument
/// must be a preset name.
pub fn load_source(scenario: &str) -> Result<ConfigFile, CliError> {
    let path = Path::new(scenario);
    if path.is_file() {
        return ConfigFile::load(path);
    }
    if PRESET_NAMES.contains(&scenario) {
        return Ok(ConfigFile { preset: Some(scenario.to_string()), ..ConfigFile::default() });
    }
    Err(CliError::config(
        "scenario",
        format!("`{scenario}` is neither a config file nor a preset ({})", PRESET_NAMES.join(", ")),
    ))
}

fn tolerances(cfg: &ConfigFile, opts: &RunOptions) -> Result<Tolerances, CliError> {
    let mut tol = cfg.tolerances.apply(Tolerances::default())?;
    for (name, flag, slot) in [
        ("--tol-identity", opts.tol_identity, &mut tol.identity),
        ("--tol-inequality", opts.tol_inequality, &mut tol.inequality),
    ] {
        if let Some(x) = flag {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(CliError::config(name, format!("must be a nonnegative number, got {x}")));
            }
            *slot = x;
        }
    }
    Ok(tol)
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn first_failure(summaries: &[AuditSummary]) -> Option<String> {
    summaries.iter().find(|s| !s.passed()).map(|s| match &s.first_violation {
        Some(v) => format!("audit `{}` failed: first violation at row {} (t = {}): {}", s.name, v.row, v.t, v.detail),
        None => format!("audit `{}` failed", s.name),
    })
}

fn summaries(run: &ScenarioRun) -> Vec<AuditSummary> {
    run.audits.iter().map(|a| a.summary.clone()).collect()
}

fn write_outputs(run: &ScenarioRun, name: &str, dir: &Path, suffix: &str, format: Format) -> Result<(), CliError> {
    let ext = format.extension();
    ledger::ledger(&run.trajectory).write(&dir.join(format!("ledger{suffix}.{ext}")), format, name)?;
    ledger::audit_table(&summaries(run)).write(&dir.join(format!("audits{suffix}.{ext}")), format, name)
}

fn report_final(traj: &Trajectory, w: &mut dyn Write) -> std::io::Result<()> {
    let last = traj.snapshots.last().expect("trajectories have at least one snapshot");
    let first = traj.initial();
    writeln!(w, "at t = {} (Q: heat extracted, W: work extracted, ΔE = −Q − W):", last.t)?;
    writeln!(w, "  {:<8} {:>13} {:>13} {:>13} {:>13} {:>13}", "", "ΔE", "Q", "W", "T(0)", "T(t)")?;
    for ((sub, r), r0) in traj.system.subsystems().iter().zip(&last.subsystems).zip(&first.subsystems) {
        writeln!(
            w,
            "  {:<8} {:>13.6e} {:>13.6e} {:>13.6e} {:>13.6e} {:>13.6e}",
            sub.label,
            r.energy - r0.energy,
            r.heat,
            r.work,
            r0.temperature,
            r.temperature
        )?;
    }
    writeln!(w, "  E_int = {:.6e}, sigma = {:.6e} nats", last.interaction_energy, last.sigma)
}

fn io_out(e: std::io::Error) -> CliError {
    CliError::Output(e.to_string())
}

/// Runs one scenario, writes `ledger.<ext>` and `audits.<ext>` under
/// `opts.out` and prints a report.
pub fn run(source: &str, opts: &RunOptions, w: &mut dyn Write) -> Result<Outcome, CliError> {
    let cfg = load_source(source)?;
    let scenario = cfg.scenario(opts.seed)?;
    let tol = tolerances(&cfg, opts)?;
    let result = scenario.run(&tol)?;
    create_dir(&opts.out)?;
    write_outputs(&result, &scenario.name, &opts.out, "", opts.format)?;

    let traj = &result.trajectory;
    writeln!(
        w,
        "scenario {}: {} subsystems, {} snapshots, t in [0, {}]",
        scenario.name,
        traj.system.len(),
        traj.snapshots.len(),
        scenario.times.t_end
    )
    .map_err(io_out)?;
    for a in &result.audits {
        writeln!(w, "{}", a.summary).map_err(io_out)?;
    }
    report_final(traj, w).map_err(io_out)?;
    let sums = summaries(&result);
    Ok(Outcome { passed: result.passed(), failure: first_failure(&sums) })
}

/// Validated sweep: the scenario for every value, in order.
fn sweep_entries(scenario: &Scenario, sweep: &SweepConfig) -> Result<Vec<Scenario>, CliError> {
    if sweep.values.is_empty() {
        return Err(CliError::config("sweep.values", "needs at least one value"));
    }
    sweep
        .values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if !v.is_finite() {
                return Err(CliError::config(format!("sweep.values[{k}]"), format!("{v} is not finite")));
            }
            apply_parameter(scenario, &sweep.parameter, v).map_err(|m| CliError::config("sweep.parameter", m))
        })
        .collect()
}

/// The zero-temperature limit table when sweeping `T_<label>` over strictly
/// decreasing positive values.
fn limit_table_for(scenario: &Scenario, sweep: &SweepConfig) -> Result<Option<LimitTable>, CliError> {
    let Some(label) = sweep.parameter.strip_prefix("T_") else { return Ok(None) };
    let v = &sweep.values;
    if v.iter().any(|&x| x <= 0.0) || v.windows(2).any(|p| p[1] >= p[0]) {
        log::warn!("limit table skipped: T values must be positive and strictly decreasing");
        return Ok(None);
    }
    let (system, _) = scenario.build()?;
    let b = system.index_of(label)?;
    let locals = scenario
        .subsystems
        .iter()
        .zip(system.subsystems())
        .map(|(spec, sub)| spec.initial.build(&sub.hamiltonian))
        .collect::<Result<Vec<_>, _>>()?;
    let t = sweep.time.unwrap_or(scenario.times.t_end);
    Ok(Some(zero_temperature_limit_check(&system, &locals, b, v, t)?))
}

/// Runs every sweep value (concurrently, up to `opts.workers`), writing
/// `ledger_<k>` and `audits_<k>` per value plus a combined `sweep` table,
/// and `limit_table` for temperature sweeps.
pub fn sweep(source: &str, opts: &RunOptions, w: &mut dyn Write) -> Result<Outcome, CliError> {
    let cfg = load_source(source)?;
    let sweep = cfg.sweep.clone().ok_or_else(|| CliError::config("sweep", "missing [sweep] section"))?;
    let scenario = cfg.scenario(opts.seed)?;
    let tol = tolerances(&cfg, opts)?;
    let entries = sweep_entries(&scenario, &sweep)?;
    let limit = limit_table_for(&entries[0], &sweep)?;
    create_dir(&opts.out)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Output(e.to_string()))?;
    let results: Vec<Result<ScenarioRun, CliError>> = pool.install(|| {
        entries
            .par_iter()
            .enumerate()
            .map(|(k, s)| {
                let run = s.run(&tol)?;
                write_outputs(&run, &s.name, &opts.out, &format!("_{k}"), opts.format)?;
                Ok(run)
            })
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let labels: Vec<String> = scenario.subsystems.iter().map(|s| s.label.clone()).collect();
    let mut columns = vec!["index".to_string(), sweep.parameter.clone(), "status".into()];
    for l in &labels {
        columns.push(format!("Q_{l}"));
        columns.push(format!("W_{l}"));
    }
    columns.extend(["sigma", "max_identity_residual"].map(String::from));
    let mut rows = Vec::new();
    let mut failure = None;
    for (k, (run, &value)) in runs.iter().zip(&sweep.values).enumerate() {
        let last = run.trajectory.snapshots.last().expect("nonempty trajectory");
        let mut row = vec![Cell::Int(k), Cell::Num(value), Cell::Text(if run.passed() { "PASS" } else { "FAIL" }.into())];
        for r in &last.subsystems {
            row.push(Cell::Num(r.heat));
            row.push(Cell::Num(r.work));
        }
        let max_res = run
            .trajectory
            .snapshots
            .iter()
            .map(|s| s.identity_residual)
            .filter(|x| x.is_finite())
            .fold(f64::NAN, f64::max);
        row.push(Cell::Num(last.sigma));
        row.push(Cell::Num(max_res));
        rows.push(row);
        if failure.is_none() {
            failure = first_failure(&summaries(run)).map(|f| format!("{} = {value}: {f}", sweep.parameter));
        }
        writeln!(w, "[{k}] {} = {value}: {}", sweep.parameter, if run.passed() { "PASS" } else { "FAIL" })
            .map_err(io_out)?;
    }
    let ext = opts.format.extension();
    Table { columns, rows }.write(&opts.out.join(format!("sweep.{ext}")), opts.format, &scenario.name)?;
    if let Some(table) = &limit {
        ledger::limit_table(table).write(&opts.out.join(format!("limit_table.{ext}")), opts.format, &scenario.name)?;
        writeln!(
            w,
            "limit table for {} at t = {}: monotone = {}, final/first deviation = {:.3e}",
            table.subsystem, table.time, table.monotone, table.final_ratio
        )
        .map_err(io_out)?;
    }
    Ok(Outcome { passed: failure.is_none(), failure })
}

pub fn describe(name: &str) -> &'static str {
    match name {
        "ex1_ground_ground" => "two resonant qubits, both in the ground state, σx⊗σx coupling",
        "ex2_pure_pure" => "excited qubit and a qutrit in (|0⟩+|2⟩)/√2, exchange coupling",
        "three_body_chain" => "three thermal qubits (β = 0.5, 1, 2) in a σx⊗σx chain, with ergotropy decay",
        "random" => "two random subsystems (dims 2-4) in Gibbs states, random coupling (--seed)",
        "random_ground" => "random pair with B at zero temperature (--seed; odd seeds: degenerate ground)",
        _ => "",
    }
}

/// Lists presets, or prints the full config of one.
pub fn presets(show: Option<&str>, seed: Option<u64>, w: &mut dyn Write) -> Result<Outcome, CliError> {
    match show {
        None => {
            for name in PRESET_NAMES {
                writeln!(w, "{name:<20} {}", describe(name)).map_err(io_out)?;
            }
        }
        Some(name) => {
            let s = preset(name, seed.unwrap_or(0)).map_err(|e| CliError::config("preset", e.to_string()))?;
            w.write_all(ConfigFile::from_scenario(&s).to_toml()?.as_bytes()).map_err(io_out)?;
        }
    }
    Ok(Outcome { passed: true, failure: None })
}

/// Parses and builds everything without propagating.
pub fn validate(source: &str, opts: &RunOptions, w: &mut dyn Write) -> Result<Outcome, CliError> {
    let cfg = load_source(source)?;
    let scenario = cfg.scenario(opts.seed)?;
    tolerances(&cfg, opts)?;
    let (system, _) = scenario.build()?;
    scenario.time_grid()?;
    if let Some(sweep) = &cfg.sweep {
        for s in sweep_entries(&scenario, sweep)? {
            s.build()?;
        }
    }
    writeln!(
        w,
        "ok: {} ({} subsystems, total dim {}, {} time points, {} audits)",
        scenario.name,
        system.len(),
        system.total_dim(),
        scenario.times.points,
        scenario.audits.len()
    )
    .map_err(io_out)?;
    Ok(Outcome { passed: true, failure: None })
}
