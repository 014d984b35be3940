//! Backward integration of the optimality equation along the time shift.
//!
//! For nonhomogeneous models the value function `V(t, x)` satisfies, between
//! jumps,
//!
//! ```text
//! dV/dt = -inf_a { Σ_y V(t,y) q̃(y|t,x,a) + (cost(t,x,a) - q_{(t,x)}(a)) V(t,x) }
//! ```
//!
//! integrated backward from terminal data. The per-stage minimum over actions
//! makes the right-hand side only piecewise smooth; classic RK4 is used
//! anyway, with a step-halving error estimate where a certificate is needed.
//! Finite-horizon problems supply the terminal condition `e^{g(x)}` (the
//! decaying terminal charge integrates to exactly `g`), and discounted
//! problems truncate at a horizon chosen from the tail bound
//! `1 ≤ V(t,x) ≤ exp(c_max e^{-αt}/α)` and integrate the cost-damped model.

use serde::Serialize;

use crate::bellman::ValueTable;
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::model::{augment_discounted, CtmdpModel, TerminalCost, TimeVaryingModel};

/// Value function on a time grid: `value(t_k, x)` for strictly increasing
/// grid times starting at 0, every entry in `[1, ∞)`.
#[derive(Debug, Clone, Serialize)]
pub struct MarkovValueGrid {
    times: Vec<f64>,
    /// `values[k][x]`
    values: Vec<Vec<f64>>,
}

impl MarkovValueGrid {
    fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> MarkovValueGrid {
        debug_assert_eq!(times.len(), values.len());
        MarkovValueGrid { times, values }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn value(&self, k: usize, x: usize) -> f64 {
        self.values[k][x]
    }

    pub fn values_at(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn n_states(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Values at `t = 0`, the answer to the original problem.
    pub fn initial_values(&self) -> &[f64] {
        &self.values[0]
    }
}

/// Deterministic Markov selector on the same grid, piecewise constant in `t`
/// on `[t_k, t_{k+1})`.
#[derive(Debug, Clone, Serialize)]
pub struct MarkovPolicyGrid {
    times: Vec<f64>,
    /// `actions[k][x]`
    actions: Vec<Vec<usize>>,
}

impl MarkovPolicyGrid {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn action(&self, k: usize, x: usize) -> usize {
        self.actions[k][x]
    }

    pub fn actions_at(&self, k: usize) -> &[usize] {
        &self.actions[k]
    }

    /// Action in force at absolute time `t` (the last cell extends to `∞`).
    pub fn action_at_time(&self, t: f64, x: usize) -> usize {
        let k = self.times.iter().rposition(|&tk| tk <= t).unwrap_or(0);
        self.actions[k][x]
    }

    pub fn from_parts(times: Vec<f64>, actions: Vec<Vec<usize>>) -> MarkovPolicyGrid {
        MarkovPolicyGrid { times, actions }
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            requirement: "nonempty",
            value: 0.0,
        });
    }
    if grid[0] != 0.0 {
        return Err(Error::InvalidParameter {
            name: "grid",
            requirement: "starting at t = 0",
            value: grid[0],
        });
    }
    for w in grid.windows(2) {
        if !w[1].is_finite() || w[1] <= w[0] {
            return Err(Error::InvalidParameter {
                name: "grid",
                requirement: "strictly increasing and finite",
                value: w[1],
            });
        }
    }
    Ok(())
}

/// `-inf_a { Σ_y V(y) q̃(y|t,x,a) + (cost - q) V(x) }` per state.
fn backward_rhs(m: &TimeVaryingModel, t: f64, v: &[f64], out: &mut [f64]) {
    let n = m.n_states();
    for x in 0..n {
        let mut best = f64::INFINITY;
        for a in 0..m.n_actions() {
            let mut mass = 0.0;
            for (y, &vy) in v.iter().enumerate() {
                let r = m.jump_rate_at(t, x, a, y);
                if r != 0.0 {
                    mass += r * vy;
                }
            }
            let q = m.exit_rate_at(t, x, a);
            let c = m.cost_at(t, x, a);
            let val = mass + (c - q) * v[x];
            if val < best {
                best = val;
            }
        }
        out[x] = -best;
    }
}

fn check_floor(v: &[f64], t: f64) -> Result<()> {
    for (x, &val) in v.iter().enumerate() {
        if !val.is_finite() || val < 1.0 - 1e-9 {
            return Err(Error::BackwardUnderflow {
                t,
                state: x,
                value: val,
            });
        }
    }
    Ok(())
}

/// Integrates the optimality equation backward from `terminal` at the last
/// grid time down to `t = 0` with RK4 substeps of size at most `substep`.
///
/// The output reproduces `terminal` exactly at the final grid time. Any
/// intermediate value falling below `1 - 1e-9` aborts with a diagnostic,
/// which signals a too-large step or an invalid model, never bad data.
pub fn solve_backward(
    m: &TimeVaryingModel,
    grid: &[f64],
    terminal: &[f64],
    substep: f64,
) -> Result<MarkovValueGrid> {
    check_grid(grid)?;
    if terminal.len() != m.n_states() {
        return Err(Error::InvalidModel(format!(
            "terminal data has {} entries for {} states",
            terminal.len(),
            m.n_states()
        )));
    }
    for (x, &v) in terminal.iter().enumerate() {
        if !v.is_finite() || v < 1.0 {
            return Err(Error::ValueBelowFloor { state: x, value: v });
        }
    }
    if !substep.is_finite() || substep <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "substep",
            requirement: "strictly positive",
            value: substep,
        });
    }

    let n = m.n_states();
    let k_last = grid.len() - 1;
    let mut values = vec![vec![0.0; n]; grid.len()];
    values[k_last] = terminal.to_vec();

    let mut v = terminal.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    for cell in (0..k_last).rev() {
        let (t_lo, t_hi) = (grid[cell], grid[cell + 1]);
        let span = t_hi - t_lo;
        // The slack keeps span/substep == 1 ± ulp from rounding up to 2.
        let n_sub = ((span / substep) - 1e-9).ceil().max(1.0) as usize;
        let h = span / n_sub as f64;
        let mut t = t_hi;
        for _ in 0..n_sub {
            backward_rhs(m, t, &v, &mut k1);
            for x in 0..n {
                stage[x] = v[x] - 0.5 * h * k1[x];
            }
            check_floor(&stage, t)?;
            backward_rhs(m, t - 0.5 * h, &stage, &mut k2);
            for x in 0..n {
                stage[x] = v[x] - 0.5 * h * k2[x];
            }
            check_floor(&stage, t)?;
            backward_rhs(m, t - 0.5 * h, &stage, &mut k3);
            for x in 0..n {
                stage[x] = v[x] - h * k3[x];
            }
            check_floor(&stage, t)?;
            backward_rhs(m, t - h, &stage, &mut k4);
            for x in 0..n {
                v[x] -= h / 6.0 * (k1[x] + 2.0 * k2[x] + 2.0 * k3[x] + k4[x]);
            }
            t -= h;
            check_floor(&v, t)?;
        }
        values[cell] = v.clone();
    }

    Ok(MarkovValueGrid::new(grid.to_vec(), values))
}

/// Finite-horizon value: backward solve of the `e^{-αt}`-damped model on
/// `[0, T]` from the terminal condition `V(T, x) = e^{g(x)}`.
///
/// The decaying terminal charge `e^{-(t-T)} g(x)` accrues exactly `g(x)` after
/// `T`, which is where the terminal condition comes from. A single-point grid
/// `{0}` is the degenerate `T → 0` limit and returns the terminal alone.
pub fn finite_horizon_value(
    m: &TimeVaryingModel,
    horizon: f64,
    alpha: f64,
    g: &TerminalCost,
    grid: &[f64],
    substep: f64,
) -> Result<MarkovValueGrid> {
    check_grid(grid)?;
    if g.len() != m.n_states() {
        return Err(Error::InvalidModel(format!(
            "terminal cost has {} entries for {} states",
            g.len(),
            m.n_states()
        )));
    }
    let end = *grid.last().unwrap();
    if (end - horizon).abs() > 1e-9 * horizon.abs().max(1.0) {
        return Err(Error::InvalidParameter {
            name: "grid",
            requirement: "ending at the horizon T",
            value: end,
        });
    }
    let terminal: Vec<f64> = (0..m.n_states()).map(|x| g.get(x).exp()).collect();
    if terminal.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidModel(
            "terminal cost too large: e^{g(x)} overflows".into(),
        ));
    }
    if grid.len() == 1 {
        return Ok(MarkovValueGrid::new(grid.to_vec(), vec![terminal]));
    }
    let interior = damped_interior(m, alpha, Some(horizon))?;
    solve_backward(&interior, grid, &terminal, substep)
}

/// Interior dynamics of the horizon problem on `[0, T]`: the cost damped by
/// `e^{-αt}`, rates untouched. The tail replacement of the full reformulation
/// only differs on `t ≥ T`, where the backward solve must see left limits.
/// Policy extraction for a horizon solve should run against this model.
pub fn damped_interior(
    m: &TimeVaryingModel,
    alpha: f64,
    horizon_hint: Option<f64>,
) -> Result<TimeVaryingModel> {
    let n = m.n_states();
    let na = m.n_actions();
    let mut cost = Vec::with_capacity(n);
    let mut rates = Vec::with_capacity(n);
    for x in 0..n {
        let mut cost_row = Vec::with_capacity(na);
        let mut rate_rows = Vec::with_capacity(na);
        for a in 0..na {
            cost_row.push(m.cost_profile(x, a).damped(alpha)?);
            rate_rows.push(
                (0..n)
                    .map(|y| m.jump_profile(x, a, y).clone())
                    .collect::<Vec<_>>(),
            );
        }
        cost.push(cost_row);
        rates.push(rate_rows);
    }
    TimeVaryingModel::new(
        m.states().to_vec(),
        m.actions().to_vec(),
        rates,
        cost,
        horizon_hint,
    )
}

/// Output of the discounted solve: the value `L*(x) = V(0, x)`, the grid it
/// came from, and the error certificate.
#[derive(Debug, Clone)]
pub struct DiscountedSolution {
    pub value: ValueTable,
    pub grid: MarkovValueGrid,
    /// Model with the `e^{-αt}`-damped cost that was integrated (and that
    /// Markov-policy extraction should run against).
    pub damped_model: TimeVaryingModel,
    /// Truncation horizon `T_h`.
    pub horizon: f64,
    /// Tail truncation error bound (the requested `tail_tol`).
    pub tail_bound: f64,
    /// Step-halving (Richardson) estimate of the integration error at `t=0`.
    pub integration_error_estimate: f64,
    /// `tail_bound + integration_error_estimate`.
    pub certified_error: f64,
}

/// Discounted value via truncation: picks the smallest horizon `T_h` with
/// `exp(c_max e^{-αT_h}/α) - 1 ≤ tail_tol`, sets `V(T_h, ·) ≡ 1` and solves
/// the damped model backward to `t = 0`.
pub fn discounted_value(
    m: &CtmdpModel,
    alpha: f64,
    tail_tol: f64,
    grid_step: f64,
) -> Result<DiscountedSolution> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            requirement: "strictly positive",
            value: alpha,
        });
    }
    if !tail_tol.is_finite() || tail_tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tail_tol",
            requirement: "strictly positive",
            value: tail_tol,
        });
    }
    if !grid_step.is_finite() || grid_step <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "grid_step",
            requirement: "strictly positive",
            value: grid_step,
        });
    }

    let damped = augment_discounted(m, alpha)?;
    let c_max = m.max_cost();
    // Tail bound: 1 ≤ V(t,x) ≤ exp(∫_t^∞ e^{-αs} c_max ds) = exp(c_max e^{-αt}/α),
    // so the horizon needs c_max e^{-αT}/α ≤ ln(1 + tail_tol).
    let horizon = if c_max == 0.0 {
        0.0
    } else {
        (c_max / (alpha * tail_tol.ln_1p())).ln().max(0.0) / alpha
    };

    let n = m.n_states();
    if horizon == 0.0 {
        let grid = MarkovValueGrid::new(vec![0.0], vec![vec![1.0; n]]);
        return Ok(DiscountedSolution {
            value: ValueTable::from_values(vec![ExtReal::ONE; n]).unwrap(),
            grid,
            damped_model: damped,
            horizon: 0.0,
            tail_bound: tail_tol,
            integration_error_estimate: 0.0,
            certified_error: tail_tol,
        });
    }

    let cells = (horizon / grid_step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=cells)
        .map(|k| horizon * k as f64 / cells as f64)
        .collect();
    let terminal = vec![1.0; n];
    // One RK4 step per grid cell; a doubled-step pass supplies the estimate.
    let fine = solve_backward(&damped, &grid, &terminal, horizon / cells as f64)?;
    let coarse_cells = (cells / 2).max(1);
    let coarse_grid: Vec<f64> = (0..=coarse_cells)
        .map(|k| horizon * k as f64 / coarse_cells as f64)
        .collect();
    let coarse = solve_backward(
        &damped,
        &coarse_grid,
        &terminal,
        horizon / coarse_cells as f64,
    )?;
    let est = fine
        .initial_values()
        .iter()
        .zip(coarse.initial_values())
        .map(|(f, c)| (f - c).abs() / 15.0)
        .fold(0.0, f64::max);

    let value = ValueTable::from_values(
        fine.initial_values()
            .iter()
            .map(|&v| ExtReal::finite(v.max(1.0)))
            .collect(),
    )
    .unwrap();
    Ok(DiscountedSolution {
        value,
        grid: fine,
        damped_model: damped,
        horizon,
        tail_bound: tail_tol,
        integration_error_estimate: est,
        certified_error: tail_tol + est,
    })
}

/// Greedy deterministic Markov selector on the grid: per `(t_k, x)` the
/// action minimizing `Σ_y L(t_k,y) q̃(y|t_k,x,a) + (cost(t_k,x,a) - q) L(t_k,x)`,
/// ties toward the lowest index.
pub fn extract_markov_policy(m: &TimeVaryingModel, grid: &MarkovValueGrid) -> MarkovPolicyGrid {
    let n = m.n_states();
    let actions = grid
        .times()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let v = grid.values_at(k);
            (0..n)
                .map(|x| {
                    let mut best = 0usize;
                    let mut best_val = f64::INFINITY;
                    for a in 0..m.n_actions() {
                        let mut mass = 0.0;
                        for (y, &vy) in v.iter().enumerate() {
                            let r = m.jump_rate_at(t, x, a, y);
                            if r != 0.0 {
                                mass += r * vy;
                            }
                        }
                        let val = mass
                            + (m.cost_at(t, x, a) - m.exit_rate_at(t, x, a)) * v[x];
                        if val < best_val {
                            best = a;
                            best_val = val;
                        }
                    }
                    best
                })
                .collect()
        })
        .collect();
    MarkovPolicyGrid {
        times: grid.times().to_vec(),
        actions,
    }
}
