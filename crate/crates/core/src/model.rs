//! Model types for controlled jump processes.
//!
//! A [`CtmdpModel`] is the homogeneous primitive: finite state and action
//! sets, off-diagonal jump rates `q̃(y|x,a)` and cost rates `c(x,a)`. The
//! generator is conservative by construction (the exit rate is defined as the
//! off-diagonal row sum) and stable because the tables are finite.
//!
//! A [`TimeVaryingModel`] carries time profiles instead of constants. The two
//! reformulation constructors produce them from simpler data:
//! [`augment_discounted`] damps the cost rate by `e^{-αt}` while leaving the
//! rates untouched, and [`augment_finite_horizon`] additionally zeroes all
//! rates from the horizon `T` on and replaces the cost beyond `T` with the
//! decaying terminal charge `e^{-(t-T)} g(x)`, whose total mass is exactly
//! `g(x)`. Both constructions ride on the time-shift drift
//! `(t, x) ↦ (t + s, x)`.

use crate::error::{Error, Result};
use crate::profile::TimeProfile;

/// The time component of the time-shift drift: `(t, x) ↦ (t + s, x)`.
///
/// The state component is the identity, so only the clock moves.
pub fn drift_shift(t: f64, s: f64) -> f64 {
    t + s
}

/// Finite homogeneous model: states, actions, jump rates and cost rates.
#[derive(Debug, Clone, PartialEq)]
pub struct CtmdpModel {
    states: Vec<String>,
    actions: Vec<String>,
    /// `jump_rate[x][a][y]` = q̃(y|x,a); diagonal entries are structurally 0.
    jump_rate: Vec<Vec<Vec<f64>>>,
    /// `exit_rate[x][a]` = Σ_y q̃(y|x,a), summed in state order.
    exit_rate: Vec<Vec<f64>>,
    /// `cost[x][a]` = c(x,a).
    cost: Vec<Vec<f64>>,
}

impl CtmdpModel {
    /// Builds a model from dense tables. Shapes must match, all entries must
    /// be non-NaN, and diagonal rate entries must be zero; sign violations
    /// are left to [`ModelDoc::validate`].
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        jump_rate: Vec<Vec<Vec<f64>>>,
        cost: Vec<Vec<f64>>,
    ) -> Result<CtmdpModel> {
        let n = states.len();
        let m = actions.len();
        if n == 0 || m == 0 {
            return Err(Error::InvalidModel(
                "state and action sets must be nonempty".into(),
            ));
        }
        if jump_rate.len() != n || cost.len() != n {
            return Err(Error::InvalidModel("rate/cost tables must have one row per state".into()));
        }
        for x in 0..n {
            if jump_rate[x].len() != m || cost[x].len() != m {
                return Err(Error::InvalidModel(format!(
                    "state {:?} must have one entry per action",
                    states[x]
                )));
            }
            for a in 0..m {
                if jump_rate[x][a].len() != n {
                    return Err(Error::InvalidModel(format!(
                        "rate row ({:?}, {:?}) must have one entry per target state",
                        states[x], actions[a]
                    )));
                }
                if jump_rate[x][a][x] != 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "diagonal rate entry ({:?}, {:?}) must be zero; exit rates are derived",
                        states[x], actions[a]
                    )));
                }
                if jump_rate[x][a].iter().any(|r| r.is_nan()) || cost[x][a].is_nan() {
                    return Err(Error::InvalidModel(format!(
                        "NaN entry at ({:?}, {:?})",
                        states[x], actions[a]
                    )));
                }
            }
        }
        let exit_rate = jump_rate
            .iter()
            .map(|per_action| {
                per_action
                    .iter()
                    .map(|row| row.iter().sum::<f64>())
                    .collect()
            })
            .collect();
        Ok(CtmdpModel {
            states,
            actions,
            jump_rate,
            exit_rate,
            cost,
        })
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    pub fn action_index(&self, label: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == label)
    }

    /// q̃(y|x,a)
    pub fn jump_rate(&self, x: usize, a: usize, y: usize) -> f64 {
        self.jump_rate[x][a][y]
    }

    /// The full jump-rate row q̃(·|x,a) in state order.
    pub fn jump_row(&self, x: usize, a: usize) -> &[f64] {
        &self.jump_rate[x][a]
    }

    /// q_x(a) = Σ_y q̃(y|x,a)
    pub fn exit_rate(&self, x: usize, a: usize) -> f64 {
        self.exit_rate[x][a]
    }

    pub fn cost(&self, x: usize, a: usize) -> f64 {
        self.cost[x][a]
    }

    /// max over (x, a) of c(x,a).
    pub fn max_cost(&self) -> f64 {
        self.cost
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(0.0, f64::max)
    }
}

/// Nonhomogeneous model: every rate and cost entry is a time profile.
#[derive(Debug, Clone)]
pub struct TimeVaryingModel {
    states: Vec<String>,
    actions: Vec<String>,
    jump_rate: Vec<Vec<Vec<TimeProfile>>>,
    exit_rate: Vec<Vec<TimeProfile>>,
    cost: Vec<Vec<TimeProfile>>,
    /// Time beyond which all rates vanish, when known.
    horizon_hint: Option<f64>,
}

impl TimeVaryingModel {
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        jump_rate: Vec<Vec<Vec<TimeProfile>>>,
        cost: Vec<Vec<TimeProfile>>,
        horizon_hint: Option<f64>,
    ) -> Result<TimeVaryingModel> {
        let n = states.len();
        let m = actions.len();
        if n == 0 || m == 0 {
            return Err(Error::InvalidModel(
                "state and action sets must be nonempty".into(),
            ));
        }
        if jump_rate.len() != n || cost.len() != n {
            return Err(Error::InvalidModel("rate/cost tables must have one row per state".into()));
        }
        let mut exit_rate = Vec::with_capacity(n);
        for x in 0..n {
            if jump_rate[x].len() != m || cost[x].len() != m {
                return Err(Error::InvalidModel(format!(
                    "state {:?} must have one entry per action",
                    states[x]
                )));
            }
            let mut per_action = Vec::with_capacity(m);
            for a in 0..m {
                if jump_rate[x][a].len() != n {
                    return Err(Error::InvalidModel(format!(
                        "rate row ({:?}, {:?}) must have one entry per target state",
                        states[x], actions[a]
                    )));
                }
                if !jump_rate[x][a][x].is_zero() {
                    return Err(Error::InvalidModel(format!(
                        "diagonal rate entry ({:?}, {:?}) must be zero",
                        states[x], actions[a]
                    )));
                }
                let mut total = TimeProfile::zero();
                for profile in &jump_rate[x][a] {
                    total = total.add(profile)?;
                }
                per_action.push(total);
            }
            exit_rate.push(per_action);
        }
        Ok(TimeVaryingModel {
            states,
            actions,
            jump_rate,
            exit_rate,
            cost,
            horizon_hint,
        })
    }

    /// Lifts a homogeneous model to constant profiles.
    pub fn from_homogeneous(m: &CtmdpModel) -> TimeVaryingModel {
        let n = m.n_states();
        let na = m.n_actions();
        let jump_rate = (0..n)
            .map(|x| {
                (0..na)
                    .map(|a| {
                        (0..n)
                            .map(|y| TimeProfile::constant(m.jump_rate(x, a, y).max(0.0)).unwrap())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let cost = (0..n)
            .map(|x| {
                (0..na)
                    .map(|a| TimeProfile::constant(m.cost(x, a).max(0.0)).unwrap())
                    .collect()
            })
            .collect();
        TimeVaryingModel::new(
            m.states().to_vec(),
            m.actions().to_vec(),
            jump_rate,
            cost,
            None,
        )
        .expect("homogeneous lift is structurally valid")
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    pub fn action_index(&self, label: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == label)
    }

    pub fn horizon_hint(&self) -> Option<f64> {
        self.horizon_hint
    }

    pub fn jump_profile(&self, x: usize, a: usize, y: usize) -> &TimeProfile {
        &self.jump_rate[x][a][y]
    }

    pub fn exit_profile(&self, x: usize, a: usize) -> &TimeProfile {
        &self.exit_rate[x][a]
    }

    pub fn cost_profile(&self, x: usize, a: usize) -> &TimeProfile {
        &self.cost[x][a]
    }

    /// q̃(y|t,x,a)
    pub fn jump_rate_at(&self, t: f64, x: usize, a: usize, y: usize) -> f64 {
        self.jump_rate[x][a][y].eval(t)
    }

    /// q_{(t,x)}(a)
    pub fn exit_rate_at(&self, t: f64, x: usize, a: usize) -> f64 {
        self.exit_rate[x][a].eval(t)
    }

    pub fn cost_at(&self, t: f64, x: usize, a: usize) -> f64 {
        self.cost[x][a].eval(t)
    }
}

/// Nonnegative terminal cost `g(x)` per state; the implicit cemetery carries 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalCost {
    g: Vec<f64>,
}

impl TerminalCost {
    pub fn new(g: Vec<f64>) -> Result<TerminalCost> {
        for (x, &v) in g.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "terminal cost for state index {x} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(TerminalCost { g })
    }

    pub fn zero(n_states: usize) -> TerminalCost {
        TerminalCost {
            g: vec![0.0; n_states],
        }
    }

    pub fn get(&self, x: usize) -> f64 {
        self.g[x]
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.g
    }
}

/// Cost-damping reformulation of the discounted problem: rates are kept,
/// the cost rate becomes `e^{-αt} c(x,a)`, and the drift is the time shift.
pub fn augment_discounted(m: &CtmdpModel, alpha: f64) -> Result<TimeVaryingModel> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            requirement: "strictly positive",
            value: alpha,
        });
    }
    let n = m.n_states();
    let na = m.n_actions();
    let jump_rate = (0..n)
        .map(|x| {
            (0..na)
                .map(|a| {
                    (0..n)
                        .map(|y| TimeProfile::constant(m.jump_rate(x, a, y).max(0.0)).unwrap())
                        .collect()
                })
                .collect()
        })
        .collect();
    let cost = (0..n)
        .map(|x| {
            (0..na)
                .map(|a| TimeProfile::exp_decay(m.cost(x, a).max(0.0), alpha).unwrap())
                .collect()
        })
        .collect();
    TimeVaryingModel::new(m.states().to_vec(), m.actions().to_vec(), jump_rate, cost, None)
}

/// Finite-horizon reformulation: on `[0, T)` the cost is damped by `e^{-αt}`,
/// all rates vanish from `T` on, and the cost past `T` is the terminal charge
/// `e^{-(t-T)} g(x)` whose total mass `∫_T^∞ e^{-(s-T)} g(x) ds` equals
/// `g(x)` exactly.
pub fn augment_finite_horizon(
    m: &TimeVaryingModel,
    horizon: f64,
    alpha: f64,
    terminal: &TerminalCost,
) -> Result<TimeVaryingModel> {
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "horizon",
            requirement: "strictly positive",
            value: horizon,
        });
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            requirement: "nonnegative",
            value: alpha,
        });
    }
    if terminal.len() != m.n_states() {
        return Err(Error::InvalidModel(format!(
            "terminal cost has {} entries for {} states",
            terminal.len(),
            m.n_states()
        )));
    }
    let n = m.n_states();
    let na = m.n_actions();
    let mut jump_rate = Vec::with_capacity(n);
    let mut cost = Vec::with_capacity(n);
    for x in 0..n {
        let mut rate_rows = Vec::with_capacity(na);
        let mut cost_row = Vec::with_capacity(na);
        for a in 0..na {
            let rows: Result<Vec<TimeProfile>> = (0..n)
                .map(|y| m.jump_profile(x, a, y).with_tail(horizon, 0.0, 0.0))
                .collect();
            rate_rows.push(rows?);
            let damped = m.cost_profile(x, a).damped(alpha)?;
            cost_row.push(damped.with_tail(horizon, terminal.get(x), 1.0)?);
        }
        jump_rate.push(rate_rows);
        cost.push(cost_row);
    }
    TimeVaryingModel::new(
        m.states().to_vec(),
        m.actions().to_vec(),
        jump_rate,
        cost,
        Some(horizon),
    )
}

/// What a model document describes.
#[derive(Debug, Clone)]
pub enum ModelPayload {
    Homogeneous(CtmdpModel),
    TimeVarying(TimeVaryingModel),
    FiniteHorizon {
        base: TimeVaryingModel,
        horizon: f64,
        alpha: f64,
        terminal: TerminalCost,
    },
    Discounted { base: CtmdpModel, alpha: f64 },
}

/// A loaded model plus its metadata.
#[derive(Debug, Clone)]
pub struct ModelDoc {
    pub name: Option<String>,
    pub description: Option<String>,
    pub payload: ModelPayload,
}

impl ModelDoc {
    pub fn kind(&self) -> &'static str {
        match self.payload {
            ModelPayload::Homogeneous(_) => "homogeneous",
            ModelPayload::TimeVarying(_) => "time-varying",
            ModelPayload::FiniteHorizon { .. } => "finite-horizon",
            ModelPayload::Discounted { .. } => "discounted",
        }
    }
}

/// One invariant violation, as data: the offending entry and what is wrong
/// with it.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Violation {
    /// Path naming the entry, e.g. `rates["on"]["run"]["off"]` or
    /// `costs["on"]["run"] on t in [0, 2)`.
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Violation {
        Violation {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Checks every type invariant and returns the violations found; an empty
/// list means the document is valid. Violations are data, not failures.
pub fn validate_model(doc: &ModelDoc) -> Vec<Violation> {
    let mut out = Vec::new();
    match &doc.payload {
        ModelPayload::Homogeneous(m) => validate_homogeneous(m, &mut out),
        ModelPayload::TimeVarying(m) => validate_time_varying(m, &mut out),
        ModelPayload::FiniteHorizon {
            base,
            horizon,
            alpha,
            terminal,
        } => {
            validate_time_varying(base, &mut out);
            if !horizon.is_finite() || *horizon <= 0.0 {
                out.push(Violation::new("T", format!("horizon must be positive, got {horizon}")));
            }
            if !alpha.is_finite() || *alpha < 0.0 {
                out.push(Violation::new(
                    "alpha",
                    format!("discount must be nonnegative, got {alpha}"),
                ));
            }
            for (x, &g) in terminal.values().iter().enumerate() {
                if !g.is_finite() || g < 0.0 {
                    out.push(Violation::new(
                        format!("terminal_g[{:?}]", base.states()[x]),
                        format!("terminal cost must be finite and nonnegative, got {g}"),
                    ));
                }
            }
        }
        ModelPayload::Discounted { base, alpha } => {
            validate_homogeneous(base, &mut out);
            if !alpha.is_finite() || *alpha <= 0.0 {
                out.push(Violation::new(
                    "alpha",
                    format!("discount must be strictly positive, got {alpha}"),
                ));
            }
        }
    }
    out
}

fn validate_homogeneous(m: &CtmdpModel, out: &mut Vec<Violation>) {
    for x in 0..m.n_states() {
        for a in 0..m.n_actions() {
            for y in 0..m.n_states() {
                let r = m.jump_rate(x, a, y);
                if !r.is_finite() || r < 0.0 {
                    out.push(Violation::new(
                        format!(
                            "rates[{:?}][{:?}][{:?}]",
                            m.states()[x],
                            m.actions()[a],
                            m.states()[y]
                        ),
                        format!("jump rate must be finite and nonnegative, got {r}"),
                    ));
                }
            }
            let c = m.cost(x, a);
            if !c.is_finite() || c < 0.0 {
                out.push(Violation::new(
                    format!("costs[{:?}][{:?}]", m.states()[x], m.actions()[a]),
                    format!("cost rate must be finite and nonnegative, got {c}"),
                ));
            }
        }
    }
}

fn validate_time_varying(m: &TimeVaryingModel, out: &mut Vec<Violation>) {
    for x in 0..m.n_states() {
        for a in 0..m.n_actions() {
            for y in 0..m.n_states() {
                check_profile_nonneg(
                    m.jump_profile(x, a, y),
                    &format!(
                        "rates[{:?}][{:?}][{:?}]",
                        m.states()[x],
                        m.actions()[a],
                        m.states()[y]
                    ),
                    out,
                );
            }
            check_profile_nonneg(
                m.cost_profile(x, a),
                &format!("costs[{:?}][{:?}]", m.states()[x], m.actions()[a]),
                out,
            );
        }
    }
}

/// Samples each piece at its endpoints and a few interior points. Piecewise
/// polynomials with isolated sign dips between samples can escape this check;
/// evaluation sites are where violations surface.
fn check_profile_nonneg(p: &TimeProfile, path: &str, out: &mut Vec<Violation>) {
    let mut lo = 0.0f64;
    let mut cuts: Vec<f64> = p.breakpoints().collect();
    cuts.push(f64::INFINITY);
    for hi in cuts {
        let span = if hi.is_finite() { hi - lo } else { 4.0 };
        for k in 0..=8 {
            let t = lo + span * k as f64 / 8.0;
            let v = p.eval(t);
            if !v.is_finite() || v < 0.0 {
                out.push(Violation::new(
                    format!("{path} on t in [{lo}, {hi})"),
                    format!("profile evaluates to {v} at t={t}"),
                ));
                break;
            }
        }
        lo = hi;
    }
}
