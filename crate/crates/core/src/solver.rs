//! Value iteration and policy machinery for homogeneous models.
//!
//! Iteration starts from `V ≡ 1` and applies the Bellman operator; the
//! iterates are pointwise nondecreasing and converge (possibly to `+∞`) to
//! the minimal solution of the optimality equation. Convergence is measured
//! by the sup-norm change over entries finite in consecutive iterates; `+∞`
//! entries are compared by tag. A finite iterate exceeding the cap is forced
//! to `+∞` and stays there; the classification then separates states whose
//! infinity carries an exact certificate from those that merely ran past the
//! cap.

use std::time::Instant;

use serde::Serialize;

use crate::bellman::{bellman_apply, bellman_apply_policy, jump_mass, ValueTable};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::model::CtmdpModel;

/// A deterministic stationary selector `f: S → A`, stored as action indices.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPolicy {
    actions: Vec<usize>,
}

impl StationaryPolicy {
    pub fn new(actions: Vec<usize>) -> StationaryPolicy {
        StationaryPolicy { actions }
    }

    pub fn action(&self, x: usize) -> usize {
        self.actions[x]
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Checks totality and range against a model.
    pub fn validate(&self, m: &CtmdpModel) -> Result<()> {
        if self.actions.len() != m.n_states() {
            return Err(Error::InvalidModel(format!(
                "policy covers {} states, model has {}",
                self.actions.len(),
                m.n_states()
            )));
        }
        for (x, &a) in self.actions.iter().enumerate() {
            if a >= m.n_actions() {
                return Err(Error::ActionOutOfRange {
                    state: x,
                    action: a,
                    n_actions: m.n_actions(),
                });
            }
        }
        Ok(())
    }
}

/// One recorded iteration: the sup-norm change over entries finite in both
/// iterates (`inf` when some entry turned infinite), the count of infinite
/// entries afterwards, and wall-clock time.
#[derive(Debug, Clone, Serialize)]
pub struct IterationStep {
    pub delta: ExtReal,
    pub inf_count: usize,
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    pub steps: Vec<IterationStep>,
    pub iterations: usize,
    pub converged: bool,
}

/// Numerical controls for the monotone iterations.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Convergence threshold on the sup-norm change over finite entries.
    pub tol: f64,
    pub max_iter: usize,
    /// Finite iterates above this are forced to `+∞` (and later reported as
    /// suspected rather than certified).
    pub cap: f64,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions {
            tol: 1e-10,
            max_iter: 10_000,
            cap: 1e15,
        }
    }
}

impl SolveOptions {
    fn check(&self) -> Result<()> {
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "tol",
                requirement: "strictly positive",
                value: self.tol,
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                requirement: "at least 1",
                value: 0.0,
            });
        }
        if !self.cap.is_finite() || self.cap <= 1.0 {
            return Err(Error::InvalidParameter {
                name: "cap",
                requirement: "finite and greater than 1",
                value: self.cap,
            });
        }
        Ok(())
    }
}

fn monotone_iteration<F>(n: usize, opts: &SolveOptions, mut apply: F) -> (ValueTable, IterationTrace)
where
    F: FnMut(&ValueTable) -> ValueTable,
{
    let mut v = ValueTable::uniform_one(n);
    let mut forced = vec![false; n];
    let mut steps = Vec::new();
    let mut converged = false;

    for _ in 0..opts.max_iter {
        let clock = Instant::now();
        let mut next = apply(&v);
        let mut delta_finite = 0.0f64;
        let mut turned_infinite = false;
        for (x, forced_here) in forced.iter_mut().enumerate() {
            if *forced_here {
                next.set(x, ExtReal::INFINITY);
            } else if let Some(val) = next.get(x).finite_value() {
                if val > opts.cap {
                    next.set(x, ExtReal::INFINITY);
                    *forced_here = true;
                }
            }
            match (v.get(x).finite_value(), next.get(x).finite_value()) {
                (Some(old), Some(new)) => delta_finite = delta_finite.max((new - old).abs()),
                (Some(_), None) => turned_infinite = true,
                (None, None) => {}
                (None, Some(_)) => {
                    // Monotone iterates cannot fall back from infinity.
                    debug_assert!(false, "infinite entry became finite");
                    turned_infinite = true;
                }
            }
        }
        let delta = if turned_infinite {
            ExtReal::INFINITY
        } else {
            ExtReal::finite(delta_finite)
        };
        steps.push(IterationStep {
            delta,
            inf_count: next.n_infinite(),
            elapsed_secs: clock.elapsed().as_secs_f64(),
        });
        v = next;
        if delta < ExtReal::finite(opts.tol) {
            converged = true;
            break;
        }
    }

    let trace = IterationTrace {
        iterations: steps.len(),
        converged,
        steps,
    };
    (v, trace)
}

/// Monotone value iteration from `V ≡ 1` toward the minimal solution.
///
/// Non-convergence within `max_iter` is reported in the trace, not as an
/// error.
pub fn value_iteration(m: &CtmdpModel, opts: &SolveOptions) -> Result<(ValueTable, IterationTrace)> {
    opts.check()?;
    Ok(monotone_iteration(m.n_states(), opts, |v| bellman_apply(m, v)))
}

/// Minimal value of a fixed policy, by monotone iteration of the restricted
/// operator from `V ≡ 1`.
pub fn evaluate_policy(
    m: &CtmdpModel,
    policy: &StationaryPolicy,
    opts: &SolveOptions,
) -> Result<(ValueTable, IterationTrace)> {
    opts.check()?;
    policy.validate(m)?;
    Ok(monotone_iteration(m.n_states(), opts, |v| {
        bellman_apply_policy(m, policy, v).expect("policy was validated")
    }))
}

/// The optimality-equation bracket
/// `Σ_y V(y) q̃(y|x,a) − (q_x(a) − c(x,a)) V(x)`, evaluated in extended
/// arithmetic: an infinite jump mass dominates (`∞ − ∞ := ∞`), and an
/// infinite `V(x)` weighs in with the sign of `q − c` (`0·∞ := 0`).
pub fn bracket(m: &CtmdpModel, v: &ValueTable, x: usize, a: usize) -> f64 {
    let jm = jump_mass(m, x, a, v);
    let Some(jm) = jm.finite_value() else {
        return f64::INFINITY;
    };
    let margin = m.exit_rate(x, a) - m.cost(x, a);
    match v.get(x).finite_value() {
        Some(vx) => jm - margin * vx,
        None => {
            if margin > 0.0 {
                f64::NEG_INFINITY
            } else if margin == 0.0 {
                jm
            } else {
                f64::INFINITY
            }
        }
    }
}

/// Greedy selector achieving the per-state infimum of the bracket; ties break
/// toward the lowest action index.
///
/// At states with `V(x) = +∞` the same argmin is still taken, but nothing
/// constrains that choice, so consumers should treat it as a placeholder.
pub fn extract_policy(m: &CtmdpModel, v: &ValueTable) -> StationaryPolicy {
    let actions = (0..m.n_states())
        .map(|x| {
            let mut best = 0usize;
            let mut best_val = bracket(m, v, x, 0);
            for a in 1..m.n_actions() {
                let val = bracket(m, v, x, a);
                if val < best_val {
                    best = a;
                    best_val = val;
                }
            }
            best
        })
        .collect();
    StationaryPolicy::new(actions)
}

/// Per-state value of the optimality-equation infimum; zero at a fixed point.
/// States with `V(x) = +∞` are skipped (`None`).
pub fn residual(m: &CtmdpModel, v: &ValueTable) -> Vec<Option<f64>> {
    (0..m.n_states())
        .map(|x| {
            if v.get(x).is_infinite() {
                return None;
            }
            let inf = (0..m.n_actions())
                .map(|a| bracket(m, v, x, a))
                .fold(f64::INFINITY, f64::min);
            Some(inf)
        })
        .collect()
}

/// How a state's value is classified after iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateClass {
    /// The value is finite.
    Finite,
    /// Certified infinite: the case table fires for every action, or every
    /// action jumps with positive rate onto a certified state.
    InfiniteExact,
    /// Ran past the cap without a certificate; possibly finite but huge.
    InfiniteSuspected,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatePartition {
    pub classes: Vec<StateClass>,
}

impl StatePartition {
    pub fn finite(&self) -> Vec<usize> {
        self.of_class(StateClass::Finite)
    }

    pub fn infinite_exact(&self) -> Vec<usize> {
        self.of_class(StateClass::InfiniteExact)
    }

    pub fn infinite_suspected(&self) -> Vec<usize> {
        self.of_class(StateClass::InfiniteSuspected)
    }

    fn of_class(&self, class: StateClass) -> Vec<usize> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == class)
            .map(|(x, _)| x)
            .collect()
    }
}

/// States provably infinite from the model alone: the fixpoint of
/// "every action either satisfies the divergence case table (`q = 0 < c` or
/// `0 < q ≤ c`) or jumps with positive rate onto an already certified state".
pub fn exact_infinite_states(m: &CtmdpModel) -> Vec<bool> {
    let n = m.n_states();
    let case_table = |x: usize, a: usize| {
        let q = m.exit_rate(x, a);
        let c = m.cost(x, a);
        if q == 0.0 {
            c > 0.0
        } else {
            c >= q
        }
    };
    let mut certified = vec![false; n];
    loop {
        let mut changed = false;
        for x in 0..n {
            if certified[x] {
                continue;
            }
            let all_infinite = (0..m.n_actions()).all(|a| {
                case_table(x, a)
                    || m.jump_row(x, a)
                        .iter()
                        .enumerate()
                        .any(|(y, &rate)| rate > 0.0 && certified[y])
            });
            if all_infinite {
                certified[x] = true;
                changed = true;
            }
        }
        if !changed {
            return certified;
        }
    }
}

/// Splits the state set into finite-valued, certified-infinite, and
/// capped/suspected-infinite states.
pub fn classify_states(m: &CtmdpModel, v: &ValueTable, _trace: &IterationTrace) -> StatePartition {
    let certified = exact_infinite_states(m);
    let classes = (0..m.n_states())
        .map(|x| {
            if v.get(x).is_finite() {
                StateClass::Finite
            } else if certified[x] {
                StateClass::InfiniteExact
            } else {
                StateClass::InfiniteSuspected
            }
        })
        .collect();
    StatePartition { classes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xr(v: f64) -> ExtReal {
        ExtReal::from_f64(v).unwrap()
    }

    fn chain(q: f64, c: f64) -> CtmdpModel {
        CtmdpModel::new(
            vec!["work".into(), "done".into()],
            vec!["go".into()],
            vec![vec![vec![0.0, q]], vec![vec![0.0, 0.0]]],
            vec![vec![c], vec![0.0]],
        )
        .unwrap()
    }

    fn two_action_chain() -> CtmdpModel {
        CtmdpModel::new(
            vec!["work".into(), "done".into()],
            vec!["slow".into(), "fast".into()],
            vec![
                vec![vec![0.0, 2.0], vec![0.0, 4.0]],
                vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            ],
            vec![vec![1.0, 1.0], vec![0.0, 0.0]],
        )
        .unwrap()
    }

    fn opts(tol: f64) -> SolveOptions {
        SolveOptions {
            tol,
            ..SolveOptions::default()
        }
    }

    #[test]
    fn absorbing_chain_reaches_fixed_point_in_one_application() {
        let m = chain(2.0, 1.0);
        let (v, trace) = value_iteration(&m, &opts(1e-12)).unwrap();
        assert_eq!(v.get(0), xr(2.0));
        assert_eq!(v.get(1), ExtReal::ONE);
        assert!(trace.converged);
        assert!(trace.iterations <= 2);
        // The first application does all the work; the second confirms.
        assert_eq!(trace.steps[0].delta, xr(1.0));
    }

    #[test]
    fn zero_cost_model_keeps_the_seed() {
        let m = CtmdpModel::new(
            vec!["a".into(), "b".into()],
            vec!["u".into()],
            vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
            vec![vec![0.0], vec![0.0]],
        )
        .unwrap();
        let (v, trace) = value_iteration(&m, &opts(1e-12)).unwrap();
        assert_eq!(v.get(0), ExtReal::ONE);
        assert_eq!(v.get(1), ExtReal::ONE);
        assert!(trace.converged && trace.iterations == 1);
    }

    #[test]
    fn trap_state_is_flagged_exact_immediately() {
        // c ≥ q under the only action: divergent no matter what.
        let m = chain(1.0, 2.0);
        let (v, trace) = value_iteration(&m, &opts(1e-10)).unwrap();
        assert_eq!(v.get(0), ExtReal::INFINITY);
        assert_eq!(trace.steps[0].inf_count, 1);
        let partition = classify_states(&m, &v, &trace);
        assert_eq!(partition.classes[0], StateClass::InfiniteExact);
        assert_eq!(partition.classes[1], StateClass::Finite);
    }

    #[test]
    fn greedy_policy_picks_the_cheaper_action() {
        let m = two_action_chain();
        let (v, _) = value_iteration(&m, &opts(1e-12)).unwrap();
        assert_eq!(v.get(0), xr(4.0 / 3.0));
        let f = extract_policy(&m, &v);
        assert_eq!(f.action(0), 1);
    }

    #[test]
    fn duplicate_actions_tie_break_low() {
        let m = CtmdpModel::new(
            vec!["work".into(), "done".into()],
            vec!["u0".into(), "u1".into()],
            vec![
                vec![vec![0.0, 2.0], vec![0.0, 2.0]],
                vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            ],
            vec![vec![1.0, 1.0], vec![0.0, 0.0]],
        )
        .unwrap();
        let (v, _) = value_iteration(&m, &opts(1e-12)).unwrap();
        let f = extract_policy(&m, &v);
        assert_eq!(f.actions(), &[0, 0]);
    }

    #[test]
    fn residual_vanishes_at_the_fixed_point() {
        let m = chain(2.0, 1.0);
        let (v, _) = value_iteration(&m, &opts(1e-12)).unwrap();
        let res = residual(&m, &v);
        assert!(res[0].unwrap().abs() <= 1e-9);
        assert!(res[1].unwrap().abs() <= 1e-9);

        // At the seed the bracket is q̃·1 − (q − c)·1 = 1.
        let seed = ValueTable::uniform_one(2);
        let res = residual(&m, &seed);
        assert!((res[0].unwrap() - 1.0).abs() < 1e-14);

        // Infinite states are skipped.
        let trap = chain(1.0, 2.0);
        let (v, _) = value_iteration(&trap, &opts(1e-10)).unwrap();
        let res = residual(&trap, &v);
        assert!(res[0].is_none());
    }

    #[test]
    fn policy_evaluation_recovers_each_action_value() {
        let m = two_action_chain();
        let slow = StationaryPolicy::new(vec![0, 0]);
        let (v, trace) = evaluate_policy(&m, &slow, &opts(1e-12)).unwrap();
        assert!(trace.converged);
        assert_eq!(v.get(0), xr(2.0));

        let fast = StationaryPolicy::new(vec![1, 0]);
        let (v, _) = evaluate_policy(&m, &fast, &opts(1e-12)).unwrap();
        assert_eq!(v.get(0), xr(4.0 / 3.0));

        // The optimal policy reproduces the value-iteration table.
        let (vstar, _) = value_iteration(&m, &opts(1e-12)).unwrap();
        let f = extract_policy(&m, &vstar);
        let (vf, _) = evaluate_policy(&m, &f, &opts(1e-12)).unwrap();
        assert_eq!(vf.get(0), vstar.get(0));
        assert_eq!(vf.get(1), vstar.get(1));
    }

    #[test]
    fn policy_into_a_trap_diverges() {
        // Action 0 jumps to a trap, action 1 to a clean absorbing state.
        let m = CtmdpModel::new(
            vec!["start".into(), "trap".into(), "done".into()],
            vec!["left".into(), "right".into()],
            vec![
                vec![vec![0.0, 3.0, 0.0], vec![0.0, 0.0, 3.0]],
                vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
                vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
            ],
            vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![0.0, 0.0]],
        )
        .unwrap();
        let into_trap = StationaryPolicy::new(vec![0, 0, 0]);
        let (v, _) = evaluate_policy(&m, &into_trap, &SolveOptions::default()).unwrap();
        assert_eq!(v.get(0), ExtReal::INFINITY);
        assert_eq!(v.get(1), ExtReal::INFINITY);
        assert_eq!(v.get(2), ExtReal::ONE);

        let (vstar, _) = value_iteration(&m, &SolveOptions::default()).unwrap();
        assert!(vstar.get(0).is_finite());
    }

    #[test]
    fn geometric_growth_is_suspected_not_certified() {
        // Ping-pong pair with per-hop factor 1/(1-0.6) = 2.5 > 1: the value
        // diverges, but no action satisfies the case table.
        let m = CtmdpModel::new(
            vec!["a".into(), "b".into()],
            vec!["u".into()],
            vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
            vec![vec![0.6], vec![0.6]],
        )
        .unwrap();
        let (v, trace) = value_iteration(&m, &SolveOptions::default()).unwrap();
        assert_eq!(v.get(0), ExtReal::INFINITY);
        assert!(!trace.converged || trace.steps.last().unwrap().inf_count == 2);
        let partition = classify_states(&m, &v, &trace);
        assert_eq!(partition.classes[0], StateClass::InfiniteSuspected);
        assert_eq!(partition.classes[1], StateClass::InfiniteSuspected);
    }

    #[test]
    fn infinite_counts_never_decrease() {
        let m = CtmdpModel::new(
            vec!["a".into(), "b".into(), "trap".into()],
            vec!["u".into()],
            vec![
                vec![vec![0.0, 1.0, 0.0]],
                vec![vec![0.0, 0.0, 1.0]],
                vec![vec![0.0, 0.0, 0.0]],
            ],
            vec![vec![0.1], vec![0.1], vec![1.0]],
        )
        .unwrap();
        let (_, trace) = value_iteration(&m, &SolveOptions::default()).unwrap();
        for pair in trace.steps.windows(2) {
            assert!(pair[1].inf_count >= pair[0].inf_count);
        }
        // The trap certificate propagates upstream within three iterations.
        assert!(trace.steps.len() >= 3);
        assert_eq!(trace.steps[2].inf_count, 3);
    }

    #[test]
    fn rejects_bad_options() {
        let m = chain(2.0, 1.0);
        assert!(value_iteration(&m, &opts(0.0)).is_err());
        assert!(value_iteration(
            &m,
            &SolveOptions {
                max_iter: 0,
                ..SolveOptions::default()
            }
        )
        .is_err());
        assert!(value_iteration(
            &m,
            &SolveOptions {
                cap: f64::INFINITY,
                ..SolveOptions::default()
            }
        )
        .is_err());
    }
}
