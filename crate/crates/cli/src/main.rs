//! `riskmdp`: solve and simulate risk-sensitive continuous-time Markov
//! decision processes from JSON model files.
//!
//! Exit codes: 0 success, 1 solver did not converge, 2 input error.

mod report;
mod schema;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use riskmdp_core::bellman::ValueTable;
use riskmdp_core::ext_real::ExtReal;
use riskmdp_core::model::{
    augment_discounted, augment_finite_horizon, CtmdpModel, ModelPayload, TerminalCost,
    TimeVaryingModel,
};
use riskmdp_core::simulate::{
    estimate_utility, heavy_tail_risk, EstimateOptions, SimOptions, SimPolicy,
};
use riskmdp_core::solver::{
    classify_states, evaluate_policy, extract_policy, residual, value_iteration, SolveOptions,
    StateClass, StationaryPolicy,
};
use riskmdp_core::timegrid::{
    damped_interior, discounted_value, extract_markov_policy, finite_horizon_value,
    MarkovPolicyGrid, MarkovValueGrid,
};

use report::{write_report, GridSection, JsonReal, RunReport};
use schema::{LoadError, LoadedModel, PolicyFile};

#[derive(Parser)]
#[command(
    name = "riskmdp",
    version,
    about = "Risk-sensitive CTMDP solvers: expected exponential utility of total cost"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Report destination: a file for json (stdout when omitted), a
    /// directory for csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json (full report) or csv (one file per table).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SolverArgs {
    /// Convergence threshold on the sup-norm change over finite entries.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Iterates above this are treated as +inf and flagged suspected.
    #[arg(long, default_value_t = 1e15)]
    cap: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Value iteration, optimal policy, residuals and state classification.
    Solve {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Value iteration with the per-iteration trace.
    Iterate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Value of a supplied stationary policy.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimality-equation residual of a supplied value table.
    Check {
        #[arg(long)]
        model: PathBuf,
        /// JSON file {"values": {state: number | "inf"}}.
        #[arg(long)]
        values: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Finite-horizon value and Markov policy by backward integration.
    SolveHorizon {
        #[arg(long)]
        model: PathBuf,
        /// Horizon T (defaults to the model file's T).
        #[arg(long)]
        horizon: Option<f64>,
        /// Discount exponent (defaults to the model file's alpha, else 0).
        #[arg(long)]
        alpha: Option<f64>,
        /// Grid spacing and RK4 substep.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Discounted value via horizon truncation with a certified error bound.
    SolveDiscounted {
        #[arg(long)]
        model: PathBuf,
        /// Discount rate (defaults to the model file's alpha).
        #[arg(long)]
        alpha: Option<f64>,
        /// Tail truncation error bound.
        #[arg(long, default_value_t = 1e-8)]
        tail_tol: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of the exponential utility under a policy.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        /// Trajectories per initial state.
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e6)]
        t_max: f64,
        #[arg(long, default_value_t = 1_000_000)]
        jump_cap: usize,
        /// Initial state label; all states when omitted.
        #[arg(long)]
        x0: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Load(#[from] LoadError),
    #[error("{0}")]
    Core(#[from] riskmdp_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

/// Worker count: RISKMDP_THREADS when set, hardware parallelism otherwise.
fn worker_count() -> usize {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("RISKMDP_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).unwrap_or(hw),
        Err(_) => hw,
    }
}

fn command_echo() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn homogeneous(loaded: &LoadedModel) -> Result<&CtmdpModel, CliError> {
    match &loaded.doc.payload {
        ModelPayload::Homogeneous(m) => Ok(m),
        ModelPayload::Discounted { .. } => Err(CliError::Input(
            "this command needs a homogeneous model; use solve-discounted for discounted kinds"
                .into(),
        )),
        other_kind => Err(CliError::Input(format!(
            "this command needs a homogeneous model, got kind {:?}",
            kind_name(other_kind)
        ))),
    }
}

fn kind_name(p: &ModelPayload) -> &'static str {
    match p {
        ModelPayload::Homogeneous(_) => "homogeneous",
        ModelPayload::TimeVarying(_) => "time-varying",
        ModelPayload::FiniteHorizon { .. } => "finite-horizon",
        ModelPayload::Discounted { .. } => "discounted",
    }
}

fn value_map(states: &[String], v: &ValueTable) -> BTreeMap<String, ExtReal> {
    states
        .iter()
        .enumerate()
        .map(|(x, s)| (s.clone(), v.get(x)))
        .collect()
}

fn residual_map(states: &[String], res: &[Option<f64>]) -> BTreeMap<String, JsonReal> {
    states
        .iter()
        .zip(res)
        .filter_map(|(s, r)| r.map(|r| (s.clone(), JsonReal(r))))
        .collect()
}

fn stationary_policy_file(
    states: &[String],
    actions: &[String],
    policy: &StationaryPolicy,
) -> PolicyFile {
    PolicyFile::Stationary {
        actions: states
            .iter()
            .enumerate()
            .map(|(x, s)| (s.clone(), actions[policy.action(x)].clone()))
            .collect(),
    }
}

fn markov_policy_file(
    states: &[String],
    actions: &[String],
    policy: &MarkovPolicyGrid,
) -> PolicyFile {
    PolicyFile::MarkovGrid {
        times: policy.times().to_vec(),
        actions: states
            .iter()
            .enumerate()
            .map(|(x, s)| {
                let labels = (0..policy.times().len())
                    .map(|k| actions[policy.action(k, x)].clone())
                    .collect();
                (s.clone(), labels)
            })
            .collect(),
    }
}

fn grid_section(states: &[String], grid: &MarkovValueGrid) -> GridSection {
    GridSection {
        times: grid.times().to_vec(),
        values: states
            .iter()
            .enumerate()
            .map(|(x, s)| {
                let series = (0..grid.times().len()).map(|k| grid.value(k, x)).collect();
                (s.clone(), series)
            })
            .collect(),
    }
}

fn uniform_grid(t_end: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(CliError::Input(format!(
            "horizon must be positive and finite, got {t_end}"
        )));
    }
    if !step.is_finite() || step <= 0.0 {
        return Err(CliError::Input(format!(
            "step must be positive and finite, got {step}"
        )));
    }
    let cells = (t_end / step).ceil().max(1.0) as usize;
    Ok((0..=cells).map(|k| t_end * k as f64 / cells as f64).collect())
}

fn class_maps(
    states: &[String],
    classes: &[StateClass],
) -> (BTreeMap<String, String>, Vec<String>) {
    let label = |c: &StateClass| match c {
        StateClass::Finite => "finite",
        StateClass::InfiniteExact => "infinite-exact",
        StateClass::InfiniteSuspected => "infinite-suspected",
    };
    let map = states
        .iter()
        .zip(classes)
        .map(|(s, c)| (s.clone(), label(c).to_string()))
        .collect();
    let infinite: Vec<String> = states
        .iter()
        .zip(classes)
        .filter(|(_, c)| **c != StateClass::Finite)
        .map(|(s, _)| s.clone())
        .collect();
    (map, infinite)
}

fn dispatch(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Solve {
            model,
            solver,
            output,
        } => {
            let loaded = schema::load_model(&model)?;
            let m = homogeneous(&loaded)?;
            let opts = SolveOptions {
                tol: solver.tol,
                max_iter: solver.max_iter,
                cap: solver.cap,
            };
            let clock = Instant::now();
            let (v, trace) = value_iteration(m, &opts)?;
            let policy = extract_policy(m, &v);
            let res = residual(m, &v);
            let partition = classify_states(m, &v, &trace);
            let elapsed = clock.elapsed().as_secs_f64();

            let states = m.states();
            let mut rep = report_for(&loaded, &model, "solve");
            rep.params = solver_params(&solver);
            rep.converged = Some(trace.converged);
            rep.value = Some(value_map(states, &v));
            rep.residual = Some(residual_map(states, &res));
            rep.policy = Some(stationary_policy_file(states, m.actions(), &policy));
            let (classes, infinite) = class_maps(states, &partition.classes);
            rep.state_classes = Some(classes);
            if !infinite.is_empty() {
                rep.notes.push(format!(
                    "policy at infinite-valued states is unconstrained by theory: {infinite:?}"
                ));
            }
            rep.trace = Some(trace);
            rep.wall_clock_secs = elapsed;
            emit(&rep, states, &output)?;
            Ok(exit_for_convergence(rep.converged))
        }
        Command::Iterate {
            model,
            solver,
            output,
        } => {
            let loaded = schema::load_model(&model)?;
            let m = homogeneous(&loaded)?;
            let opts = SolveOptions {
                tol: solver.tol,
                max_iter: solver.max_iter,
                cap: solver.cap,
            };
            let clock = Instant::now();
            let (v, trace) = value_iteration(m, &opts)?;
            let elapsed = clock.elapsed().as_secs_f64();
            let states = m.states();
            let mut rep = report_for(&loaded, &model, "iterate");
            rep.params = solver_params(&solver);
            rep.converged = Some(trace.converged);
            rep.value = Some(value_map(states, &v));
            rep.trace = Some(trace);
            rep.wall_clock_secs = elapsed;
            emit(&rep, states, &output)?;
            Ok(exit_for_convergence(rep.converged))
        }
        Command::Evaluate {
            model,
            policy,
            solver,
            output,
        } => {
            let loaded = schema::load_model(&model)?;
            let m = homogeneous(&loaded)?;
            let policy_file = schema::load_policy(&policy)?;
            let f = schema::stationary_policy(&policy_file, m.states(), m.actions())?;
            let opts = SolveOptions {
                tol: solver.tol,
                max_iter: solver.max_iter,
                cap: solver.cap,
            };
            let clock = Instant::now();
            let (v, trace) = evaluate_policy(m, &f, &opts)?;
            let elapsed = clock.elapsed().as_secs_f64();
            let states = m.states();
            let mut rep = report_for(&loaded, &model, "evaluate");
            rep.params = solver_params(&solver);
            rep.converged = Some(trace.converged);
            rep.value = Some(value_map(states, &v));
            rep.policy = Some(stationary_policy_file(states, m.actions(), &f));
            rep.trace = Some(trace);
            rep.wall_clock_secs = elapsed;
            emit(&rep, states, &output)?;
            Ok(exit_for_convergence(rep.converged))
        }
        Command::Check {
            model,
            values,
            output,
        } => {
            let loaded = schema::load_model(&model)?;
            let m = homogeneous(&loaded)?;
            let file = schema::load_values(&values)?;
            let mut table = Vec::with_capacity(m.n_states());
            for s in m.states() {
                let v = file.values.get(s).ok_or_else(|| {
                    CliError::Input(format!("value table misses state {s:?}"))
                })?;
                table.push(*v);
            }
            let table = ValueTable::from_values(table)?;
            let clock = Instant::now();
            let res = residual(m, &table);
            let elapsed = clock.elapsed().as_secs_f64();
            let states = m.states();
            let skipped: Vec<String> = states
                .iter()
                .zip(&res)
                .filter(|(_, r)| r.is_none())
                .map(|(s, _)| s.clone())
                .collect();
            let mut rep = report_for(&loaded, &model, "check");
            rep.converged = None;
            rep.value = Some(value_map(states, &table));
            rep.residual = Some(residual_map(states, &res));
            if !skipped.is_empty() {
                rep.notes
                    .push(format!("infinite-valued states skipped: {skipped:?}"));
            }
            rep.wall_clock_secs = elapsed;
            emit(&rep, states, &output)?;
            Ok(0)
        }
        Command::SolveHorizon {
            model,
            horizon,
            alpha,
            step,
            output,
        } => {
            let loaded = schema::load_model(&model)?;
            let (base, file_horizon, file_alpha, terminal) = match &loaded.doc.payload {
                ModelPayload::FiniteHorizon {
                    base,
                    horizon,
                    alpha,
                    terminal,
                } => (base.clone(), Some(*horizon), Some(*alpha), terminal.clone()),
                ModelPayload::TimeVarying(m) => {
                    (m.clone(), loaded.horizon, loaded.alpha, TerminalCost::zero(m.n_states()))
                }
                ModelPayload::Homogeneous(m) => (
                    TimeVaryingModel::from_homogeneous(m),
                    loaded.horizon,
                    loaded.alpha,
                    TerminalCost::zero(m.n_states()),
                ),
                ModelPayload::Discounted { .. } => {
                    return Err(CliError::Input(
                        "solve-horizon does not apply to discounted models".into(),
                    ))
                }
            };
            let horizon = horizon.or(file_horizon).ok_or_else(|| {
                CliError::Input("no horizon: pass --horizon or set T in the model file".into())
            })?;
            let alpha = alpha.or(file_alpha).unwrap_or(0.0);
            let grid = uniform_grid(horizon, step)?;
            let clock = Instant::now();
            let vg = finite_horizon_value(&base, horizon, alpha, &terminal, &grid, step)?;
            let interior = damped_interior(&base, alpha, Some(horizon))?;
            let policy = extract_markov_policy(&interior, &vg);
            // Step-halving estimate of the integration error at t = 0.
            let coarse_grid = uniform_grid(horizon, 2.0 * step)?;
            let coarse =
                finite_horizon_value(&base, horizon, alpha, &terminal, &coarse_grid, 2.0 * step)?;
            let integration_estimate = (0..base.n_states())
                .map(|x| (vg.value(0, x) - coarse.value(0, x)).abs() / 15.0)
                .fold(0.0, f64::max);
            let elapsed = clock.elapsed().as_secs_f64();

            let states = base.states().to_vec();
            let mut rep = report_for(&loaded, &model, "solve-horizon");
            rep.params.insert("T".into(), horizon);
            rep.params.insert("alpha".into(), alpha);
            rep.params.insert("step".into(), step);
            rep.converged = None;
            rep.value = Some(
                states
                    .iter()
                    .enumerate()
                    .map(|(x, s)| (s.clone(), ExtReal::finite(vg.value(0, x))))
                    .collect(),
            );
            rep.policy = Some(markov_policy_file(&states, base.actions(), &policy));
            rep.grid = Some(grid_section(&states, &vg));
            rep.certified_error = Some(integration_estimate);
            rep.notes.push(
                "certified_error is the step-halving estimate of the integration error at t=0"
                    .into(),
            );
            rep.wall_clock_secs = elapsed;
            emit(&rep, &states, &output)?;
            Ok(0)
        }
        Command::SolveDiscounted {
            model,
            alpha,
            tail_tol,
            step,
            output,
        } => {
            let loaded = schema::load_model(&model)?;
            let (base, file_alpha) = match &loaded.doc.payload {
                ModelPayload::Discounted { base, alpha } => (base.clone(), Some(*alpha)),
                ModelPayload::Homogeneous(m) => (m.clone(), loaded.alpha),
                other => {
                    return Err(CliError::Input(format!(
                        "solve-discounted needs a discounted or homogeneous model, got {:?}",
                        kind_name(other)
                    )))
                }
            };
            let alpha = alpha.or(file_alpha).ok_or_else(|| {
                CliError::Input("no discount: pass --alpha or set alpha in the model file".into())
            })?;
            let clock = Instant::now();
            let sol = discounted_value(&base, alpha, tail_tol, step)?;
            let policy = extract_markov_policy(&sol.damped_model, &sol.grid);
            let elapsed = clock.elapsed().as_secs_f64();

            let states = base.states().to_vec();
            let mut rep = report_for(&loaded, &model, "solve-discounted");
            rep.params.insert("alpha".into(), alpha);
            rep.params.insert("tail_tol".into(), tail_tol);
            rep.params.insert("step".into(), step);
            rep.converged = None;
            rep.value = Some(value_map(&states, &sol.value));
            rep.policy = Some(markov_policy_file(&states, base.actions(), &policy));
            rep.grid = Some(grid_section(&states, &sol.grid));
            rep.truncation_horizon = Some(sol.horizon);
            rep.certified_error = Some(sol.certified_error);
            rep.notes.push(format!(
                "certified absolute error = tail bound {:.3e} + integration estimate {:.3e}",
                sol.tail_bound, sol.integration_error_estimate
            ));
            rep.wall_clock_secs = elapsed;
            emit(&rep, &states, &output)?;
            Ok(0)
        }
        Command::Simulate {
            model,
            policy,
            n,
            seed,
            t_max,
            jump_cap,
            x0,
            output,
        } => {
            let loaded = schema::load_model(&model)?;
            let (tv, base_homogeneous) = match &loaded.doc.payload {
                ModelPayload::Homogeneous(m) => {
                    (TimeVaryingModel::from_homogeneous(m), Some(m.clone()))
                }
                ModelPayload::TimeVarying(m) => (m.clone(), None),
                ModelPayload::Discounted { base, alpha } => {
                    (augment_discounted(base, *alpha)?, Some(base.clone()))
                }
                ModelPayload::FiniteHorizon {
                    base,
                    horizon,
                    alpha,
                    terminal,
                } => (augment_finite_horizon(base, *horizon, *alpha, terminal)?, None),
            };
            let policy_file = schema::load_policy(&policy)?;
            let stationary;
            let markov;
            let sim_policy = match &policy_file {
                PolicyFile::Stationary { .. } => {
                    stationary =
                        schema::stationary_policy(&policy_file, tv.states(), tv.actions())?;
                    SimPolicy::Stationary(&stationary)
                }
                PolicyFile::MarkovGrid { .. } => {
                    markov = schema::markov_policy(&policy_file, tv.states(), tv.actions())?;
                    SimPolicy::Grid(&markov)
                }
            };
            let initial_states: Vec<usize> = match &x0 {
                Some(label) => vec![tv.state_index(label).ok_or_else(|| {
                    CliError::Input(format!("unknown initial state {label:?}"))
                })?],
                None => (0..tv.n_states()).collect(),
            };
            let workers = worker_count();
            let opts = EstimateOptions {
                n_samples: n,
                seed,
                workers,
                sim: SimOptions { t_max, jump_cap },
            };
            let clock = Instant::now();
            let mut estimates = BTreeMap::new();
            for &x in &initial_states {
                let est = estimate_utility(&tv, sim_policy, x, &opts)?;
                estimates.insert(tv.states()[x].clone(), est);
            }
            let elapsed = clock.elapsed().as_secs_f64();

            let states = tv.states().to_vec();
            let mut rep = report_for(&loaded, &model, "simulate");
            rep.params.insert("n".into(), n as f64);
            rep.params.insert("seed".into(), seed as f64);
            rep.params.insert("t_max".into(), t_max);
            rep.params.insert("jump_cap".into(), jump_cap as f64);
            rep.params.insert("workers".into(), workers as f64);
            rep.converged = None;
            rep.policy = Some(policy_file);
            rep.estimates = Some(estimates);
            if let Some(base) = &base_homogeneous {
                let warn = initial_states.iter().any(|&x| heavy_tail_risk(base, x));
                rep.heavy_tail_warning = Some(warn);
                if warn {
                    rep.notes.push(
                        "a reachable state has c(x,a) >= q_x(a)/2: the utility may have \
                         infinite variance and standard errors may be unreliable"
                            .into(),
                    );
                }
            }
            rep.wall_clock_secs = elapsed;
            emit(&rep, &states, &output)?;
            Ok(0)
        }
    }
}

fn report_for(loaded: &LoadedModel, path: &std::path::Path, _cmd: &str) -> RunReport {
    RunReport::new(
        command_echo(),
        path.display().to_string(),
        loaded.doc.kind(),
        loaded.digest.clone(),
    )
}

fn solver_params(s: &SolverArgs) -> BTreeMap<String, f64> {
    let mut p = BTreeMap::new();
    p.insert("tol".into(), s.tol);
    p.insert("max_iter".into(), s.max_iter as f64);
    p.insert("cap".into(), s.cap);
    p
}

fn exit_for_convergence(converged: Option<bool>) -> u8 {
    match converged {
        Some(false) => 1,
        _ => 0,
    }
}

fn emit(rep: &RunReport, states: &[String], output: &OutputArgs) -> Result<(), CliError> {
    write_report(rep, states, &output.format, output.out.as_deref())?;
    Ok(())
}
