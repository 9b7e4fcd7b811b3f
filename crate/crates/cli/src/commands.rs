//! The four subcommands: `run`, `dump-state`, `verify`, and `grid-info`.
//!
//! `run` and `dump-state` share a pipeline: load the config, build grid,
//! envelope and weight, parse the circuit, prepare the input branch
//! (encoded from logical angles or reloaded from a dump), compile for the
//! configured backend, execute, and enforce the probability self-check.
//! `run` then writes the metrics file (plus an optional sweep CSV);
//! `dump-state` writes one state dump per outcome instead.

use std::io::Write;
use std::path::{Path, PathBuf};

use modvar::verify::run_suite;
use modvar::{
    compare_backends, compile, encode_logical, execute, logical_fidelity, make_envelope,
    make_weight, parse_circuit, Backend, BranchState, CircuitIr, Envelope, Execution, GridSpec,
    TwoModeState, WeightSpec,
};

use crate::config::{load_config, LoadedConfig};
use crate::output::{
    csv_line, load_state_dump, state_dump_json, write_artifact, Json,
};
use crate::{CliError, CliResult};

/// Prints a progress line, ignoring a closed stdout (e.g. piped to `head`)
/// so downstream pipe handling never aborts the file work.
fn say(line: &str) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

/// Shared command-line arguments for config-driven subcommands.
#[derive(Debug, Clone)]
pub struct RunArgs {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Pins the global worker pool size; call once at startup. With one worker
/// (the default) runs are bit-stable.
pub fn init_workers(workers: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build_global();
}

struct Prepared {
    cfg: LoadedConfig,
    grid: GridSpec,
    weight: WeightSpec,
    ir: CircuitIr,
    input: BranchState,
    seed: u64,
}

fn read_circuit(path: &Path) -> CliResult<CircuitIr> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read circuit {}: {e}", path.display())))?;
    parse_circuit(&text)
        .map_err(|e| CliError::Config(format!("circuit {}: {e}", path.display())))
}

fn encode_input(cfg: &LoadedConfig, envelope: &Envelope, qubits: usize) -> CliResult<BranchState> {
    let (chi, phi, chi_b, phi_b) = match &cfg.raw.input {
        Some(input) => (
            input.chi,
            input.phi,
            input.chi_b.unwrap_or(input.chi),
            input.phi_b.unwrap_or(input.phi),
        ),
        None => (0.0, 0.0, 0.0, 0.0),
    };
    if qubits == 1 {
        if cfg
            .raw
            .input
            .as_ref()
            .is_some_and(|i| i.chi_b.is_some() || i.phi_b.is_some())
        {
            return Err(CliError::Config(
                "second-mode input angles given for a one-qubit circuit".to_string(),
            ));
        }
        return Ok(BranchState::Single(encode_logical(chi, phi, envelope)?));
    }
    let a = encode_logical(chi, phi, envelope)?;
    let b = encode_logical(chi_b, phi_b, envelope)?;
    Ok(BranchState::Two(TwoModeState::product(&a, &b)))
}

fn prepare(args: &RunArgs) -> CliResult<Prepared> {
    let cfg = load_config(&args.config)?;
    let grid = cfg.grid()?;
    let envelope = make_envelope(grid, cfg.envelope_family())?;
    let weight = make_weight(grid, cfg.weight_family())?;
    let ir = match cfg.circuit_path() {
        Some(path) => read_circuit(&path)?,
        None => {
            // No circuit means pass-through; arity follows the input.
            let qubits = match (&cfg.raw.input_state, &cfg.raw.input) {
                (Some(_), _) => 0, // resolved below from the dump
                (None, Some(input)) if input.chi_b.is_some() || input.phi_b.is_some() => 2,
                _ => 1,
            };
            CircuitIr {
                qubits,
                gates: Vec::new(),
            }
        }
    };
    let input = match cfg.input_state_path() {
        Some(path) => {
            if cfg.raw.input.is_some() {
                return Err(CliError::Config(
                    "config gives both input angles and an input state file".to_string(),
                ));
            }
            load_state_dump(&path, grid)?
        }
        None => {
            let qubits = if ir.qubits == 0 { 1 } else { ir.qubits };
            encode_input(&cfg, &envelope, qubits)?
        }
    };
    let modes = match &input {
        BranchState::Single(_) => 1,
        BranchState::Two(_) => 2,
    };
    let ir = if ir.qubits == 0 {
        CircuitIr {
            qubits: modes,
            gates: ir.gates,
        }
    } else {
        ir
    };
    if ir.qubits != modes {
        return Err(CliError::Config(format!(
            "circuit declares {} qubit(s) but the input covers {modes} mode(s)",
            ir.qubits
        )));
    }
    let seed = cfg.seed(args.seed);
    Ok(Prepared {
        cfg,
        grid,
        weight,
        ir,
        input,
        seed,
    })
}

fn check_invariants(run: &Execution, tolerance: f64) -> CliResult<()> {
    let drift = (run.total_probability - 1.0).abs();
    if !drift.is_finite() || drift > tolerance {
        return Err(CliError::Invariant(format!(
            "total probability drifted by {drift:.3e} (tolerance {tolerance:.3e})"
        )));
    }
    Ok(())
}

fn out_dir(args: &RunArgs) -> CliResult<PathBuf> {
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("cannot create output directory {}: {e}", dir.display())))?;
    Ok(dir)
}

fn outcome_json(
    outcome: &modvar::ExecutedOutcome,
    reference: Option<&modvar::ExecutedOutcome>,
) -> CliResult<Json> {
    let bits: String = outcome.bits.iter().map(|b| char::from(b'0' + b)).collect();
    let mut purity = Json::Null;
    let mut entropy = Json::Null;
    let mut bloch = Json::Null;
    let mut marginal_entropy = Json::Null;
    if let Some(readout) = &outcome.readout {
        purity = Json::Float(readout.purity());
        entropy = Json::Float(readout.entropy_bits());
        if let Some(v) = readout.bloch() {
            bloch = Json::floats(v);
        }
        if readout.dim() == 4 {
            marginal_entropy = Json::Float(readout.marginal(0)?.entropy_bits());
        }
    }
    let mut cv_overlap = Json::Null;
    let mut fidelity = Json::Null;
    if let Some(exact) = reference {
        if outcome.probability > 0.0 {
            cv_overlap = Json::Float(match (&outcome.state, &exact.state) {
                (BranchState::Single(a), BranchState::Single(b)) => a.overlap(b)?,
                (BranchState::Two(a), BranchState::Two(b)) => a.overlap(b)?,
                _ => return Err(CliError::Config("mismatched state arities".to_string())),
            });
        }
        if let (Some(a), Some(b)) = (&outcome.readout, &exact.readout) {
            fidelity = Json::Float(logical_fidelity(a.rho(), b.rho())?);
        }
    }
    Ok(Json::map([
        ("bits", Json::Text(bits)),
        ("bloch", bloch),
        ("cv_overlap_vs_exact", cv_overlap),
        ("decode_fidelity_vs_exact", fidelity),
        ("entropy_bits", entropy),
        ("marginal_entropy_bits", marginal_entropy),
        ("probability", Json::Float(outcome.probability)),
        ("purity", purity),
    ]))
}

fn run_pipeline(prep: &Prepared) -> CliResult<(Execution, Execution)> {
    let schedule = compile(&prep.ir, prep.cfg.backend(), &prep.weight)?;
    let run = execute(&schedule, &prep.input)?;
    check_invariants(&run, prep.cfg.tolerance())?;
    let exact = if prep.cfg.backend() == Backend::Exact {
        run.clone()
    } else {
        let schedule = compile(&prep.ir, Backend::Exact, &prep.weight)?;
        execute(&schedule, &prep.input)?
    };
    Ok((run, exact))
}

fn sweep_csv(prep: &Prepared) -> CliResult<Option<String>> {
    let Some(sweep) = &prep.cfg.raw.sweep else {
        return Ok(None);
    };
    if prep.cfg.raw.input_state.is_some() {
        return Err(CliError::Config(
            "sweep requires logical input angles, not an input state file".to_string(),
        ));
    }
    let mut text = String::from(
        "theta_width,probability,cv_overlap,decode_fidelity,total_probability\n",
    );
    for &width in &sweep.theta_widths {
        let family = prep.cfg.envelope_family_with_width(width)?;
        let envelope = make_envelope(prep.grid, family)?;
        let input = encode_input(&prep.cfg, &envelope, prep.ir.qubits)?;
        let cmp = compare_backends(&prep.ir, &input, &prep.weight)?;
        let first = cmp
            .outcomes
            .first()
            .ok_or_else(|| CliError::Config("sweep circuit produced no outcomes".to_string()))?;
        text.push_str(&csv_line(&[
            width,
            first.probability,
            first.cv_overlap.unwrap_or(f64::NAN),
            first.decode_fidelity.unwrap_or(f64::NAN),
            cmp.total_probability,
        ]));
    }
    Ok(Some(text))
}

fn metrics_json(prep: &Prepared, run: &Execution, exact: &Execution) -> CliResult<Json> {
    let mut outcomes = Vec::with_capacity(run.outcomes.len());
    let reference = exact.outcomes.first();
    for outcome in &run.outcomes {
        outcomes.push(outcome_json(outcome, reference)?);
    }
    Ok(Json::map([
        ("backend", Json::Text(prep.cfg.backend_name().to_string())),
        (
            "circuit",
            match &prep.cfg.raw.circuit {
                Some(name) => Json::Text(name.clone()),
                None => Json::Null,
            },
        ),
        (
            "grid",
            Json::map([
                (
                    "period_count",
                    Json::UInt(prep.grid.period_count() as u64),
                ),
                (
                    "samples_per_period",
                    Json::UInt(prep.grid.samples_per_period() as u64),
                ),
            ]),
        ),
        ("outcomes", Json::List(outcomes)),
        ("seed", Json::UInt(prep.seed)),
        (
            "self_check_tolerance",
            Json::Float(prep.cfg.tolerance()),
        ),
        ("total_probability", Json::Float(run.total_probability)),
        (
            "warnings",
            Json::List(run.warnings.iter().cloned().map(Json::Text).collect()),
        ),
    ]))
}

/// `run`: execute the configured circuit and write metrics (and sweep CSV).
pub fn cmd_run(args: &RunArgs) -> CliResult<()> {
    let prep = prepare(args)?;
    let (run, exact) = run_pipeline(&prep)?;
    let dir = out_dir(args)?;
    let metrics_path = dir.join(prep.cfg.metrics_name());
    write_artifact(&metrics_path, &metrics_json(&prep, &run, &exact)?.render())?;
    say(&format!(
        "wrote {} ({} outcome(s), total probability {:.6})",
        metrics_path.display(),
        run.outcomes.len(),
        run.total_probability
    ));
    if let Some(csv) = sweep_csv(&prep)? {
        let sweep_path = dir.join(prep.cfg.sweep_name());
        write_artifact(&sweep_path, &csv)?;
        say(&format!("wrote {}", sweep_path.display()));
    }
    Ok(())
}

/// `dump-state`: execute the pipeline and write one dump per outcome.
pub fn cmd_dump_state(args: &RunArgs) -> CliResult<()> {
    let prep = prepare(args)?;
    let (run, _) = run_pipeline(&prep)?;
    let dir = out_dir(args)?;
    for outcome in &run.outcomes {
        let bits: String = outcome.bits.iter().map(|b| char::from(b'0' + b)).collect();
        let name = if bits.is_empty() {
            format!("{}.json", prep.cfg.state_prefix())
        } else {
            format!("{}_{bits}.json", prep.cfg.state_prefix())
        };
        let path = dir.join(name);
        write_artifact(&path, &state_dump_json(&outcome.state).render())?;
        say(&format!("wrote {}", path.display()));
    }
    Ok(())
}

/// `verify`: run a self-check suite; non-zero exit when a check fails.
pub fn cmd_verify(suite: &str, seed: u64) -> CliResult<()> {
    let report = run_suite(suite, seed).map_err(|e| CliError::Config(e.to_string()))?;
    say(&format!("suite {suite}, seed {seed}"));
    for check in &report.checks {
        let tag = if check.pass { "PASS" } else { "FAIL" };
        say(&format!("  [{tag}] {:<40} {}", check.name, check.detail));
    }
    if report.passed() {
        say("result: PASS");
        Ok(())
    } else {
        say("result: FAIL");
        Err(CliError::Invariant(format!("suite {suite} failed")))
    }
}

/// `grid-info`: print the derived grid quantities for a config.
pub fn cmd_grid_info(config: &Path) -> CliResult<()> {
    let cfg = load_config(config)?;
    let grid = cfg.grid()?;
    let info = Json::map([
        ("dim", Json::UInt(grid.dim() as u64)),
        ("dk", Json::Float(grid.dk())),
        ("dtheta", Json::Float(grid.dtheta())),
        ("fibers", Json::UInt((grid.dim() / 2) as u64)),
        ("period_count", Json::UInt(grid.period_count() as u64)),
        (
            "samples_per_period",
            Json::UInt(grid.samples_per_period() as u64),
        ),
    ]);
    let _ = write!(std::io::stdout(), "{}", info.render());
    Ok(())
}
