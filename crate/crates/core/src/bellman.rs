//! The exponential-utility Bellman operator of the embedded discrete-time
//! problem, specialized to finite homogeneous models.
//!
//! Watching the process only at jump instants turns the continuous-time
//! problem into a discrete-time one whose per-stage integral has a closed
//! form under a constant action: with exit rate `q`, cost rate `c` and
//! jump mass `jm = Σ_y q̃(y|x,a)·V(y)`,
//!
//! ```text
//! ∫₀^∞ e^{-(q-c)t} · jm dt  +  e^{-∫₀^∞ q}·e^{∫₀^∞ c}
//! ```
//!
//! collapses to the case table implemented by [`sojourn_value`]. The operator
//! applies it per state and minimizes over actions; deterministic constant
//! actions suffice for homogeneous finite models, so the minimization ranges
//! over the action set rather than relaxed controls.

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::model::CtmdpModel;
use crate::solver::StationaryPolicy;

/// A `[1, ∞]`-valued function over the state set.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    values: Vec<ExtReal>,
}

impl ValueTable {
    /// The value-iteration seed `V ≡ 1`.
    pub fn uniform_one(n_states: usize) -> ValueTable {
        ValueTable {
            values: vec![ExtReal::ONE; n_states],
        }
    }

    /// Wraps values, enforcing the floor `V(x) ≥ 1`.
    pub fn from_values(values: Vec<ExtReal>) -> Result<ValueTable> {
        for (x, v) in values.iter().enumerate() {
            if *v < ExtReal::ONE {
                return Err(Error::ValueBelowFloor {
                    state: x,
                    value: v.to_f64(),
                });
            }
        }
        Ok(ValueTable { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: usize) -> ExtReal {
        self.values[x]
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn n_infinite(&self) -> usize {
        self.values.iter().filter(|v| v.is_infinite()).count()
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &ValueTable) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a <= b)
    }

    pub(crate) fn set(&mut self, x: usize, v: ExtReal) {
        self.values[x] = v;
    }
}

/// Closed form of the per-stage integral for constant exit rate `q`, cost
/// rate `c` and jump mass `jm`:
///
/// * `q = 0, c = 0`: no jump ever, no cost: `1`;
/// * `q = 0, c > 0`: no jump with positive cost forever: `∞`;
/// * `0 < q ≤ c`: the integrand `e^{(c-q)t}·jm` with `jm ≥ q > 0` does not
///   decay and the integral diverges to `∞`;
/// * `q > c`: geometric decay, `jm / (q - c)` (infinite iff `jm = ∞`).
///
/// Rejects the inconsistent combination `q = 0` with `jm > 0` (a zero exit
/// rate cannot carry jump mass).
pub fn sojourn_value(q: f64, c: f64, jump_mass: ExtReal) -> Result<ExtReal> {
    debug_assert!(q.is_finite() && q >= 0.0, "exit rate must be finite nonnegative");
    debug_assert!(c.is_finite() && c >= 0.0, "cost rate must be finite nonnegative");
    if q == 0.0 {
        if jump_mass > ExtReal::ZERO {
            return Err(Error::ZeroRatePositiveJumpMass {
                jump_mass: jump_mass.to_f64(),
            });
        }
        return Ok(if c == 0.0 {
            ExtReal::ONE
        } else {
            ExtReal::INFINITY
        });
    }
    if c >= q {
        return Ok(ExtReal::INFINITY);
    }
    Ok(jump_mass / ExtReal::finite(q - c))
}

/// `Σ_y q̃(y|x,a) · V(y)` in state order, with `0·∞ := 0` so that unreachable
/// infinite-valued states contribute nothing.
pub fn jump_mass(m: &CtmdpModel, x: usize, a: usize, v: &ValueTable) -> ExtReal {
    let mut total = ExtReal::ZERO;
    for (y, &rate) in m.jump_row(x, a).iter().enumerate() {
        if rate == 0.0 {
            continue;
        }
        total = total + ExtReal::finite(rate) * v.get(y);
    }
    total
}

/// Value of taking action `a` at state `x` against the continuation table.
pub fn action_value(m: &CtmdpModel, x: usize, a: usize, v: &ValueTable) -> ExtReal {
    sojourn_value(m.exit_rate(x, a), m.cost(x, a), jump_mass(m, x, a, v))
        .expect("jump mass is zero whenever the exit rate is zero")
}

/// One application of the Bellman operator: `TV(x) = min_a` of the per-action
/// sojourn value. Ties break toward the lowest action index.
pub fn bellman_apply(m: &CtmdpModel, v: &ValueTable) -> ValueTable {
    debug_assert_eq!(v.len(), m.n_states());
    let values = (0..m.n_states())
        .map(|x| {
            (0..m.n_actions())
                .map(|a| action_value(m, x, a, v))
                .min()
                .expect("action set is nonempty")
        })
        .collect();
    ValueTable { values }
}

/// The operator restricted to a fixed selector: evaluation at `f(x)` instead
/// of the minimum.
pub fn bellman_apply_policy(
    m: &CtmdpModel,
    policy: &StationaryPolicy,
    v: &ValueTable,
) -> Result<ValueTable> {
    debug_assert_eq!(v.len(), m.n_states());
    let mut values = Vec::with_capacity(m.n_states());
    for x in 0..m.n_states() {
        let a = policy.action(x);
        if a >= m.n_actions() {
            return Err(Error::ActionOutOfRange {
                state: x,
                action: a,
                n_actions: m.n_actions(),
            });
        }
        values.push(action_value(m, x, a, v));
    }
    Ok(ValueTable { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CtmdpModel;
    use proptest::prelude::*;

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

    #[test]
    fn sojourn_case_table() {
        // Absorbing zero-cost state: e^0.
        assert_eq!(sojourn_value(0.0, 0.0, ExtReal::ZERO).unwrap(), ExtReal::ONE);
        // Moment generating function of Exp(2) at 1: 2/(2-1).
        assert_eq!(sojourn_value(2.0, 1.0, xr(2.0)).unwrap(), xr(2.0));
        // Critical rate: the integrand never decays.
        assert_eq!(sojourn_value(1.0, 1.0, xr(1.0)).unwrap(), ExtReal::INFINITY);
        // Absorbing with positive cost accrues infinite cost mass.
        assert_eq!(sojourn_value(0.0, 3.0, ExtReal::ZERO).unwrap(), ExtReal::INFINITY);
        // Subcritical cost: c > q.
        assert_eq!(sojourn_value(1.0, 2.0, xr(1.0)).unwrap(), ExtReal::INFINITY);
        // Infinite jump mass propagates.
        assert_eq!(
            sojourn_value(2.0, 1.0, ExtReal::INFINITY).unwrap(),
            ExtReal::INFINITY
        );
        assert!(sojourn_value(0.0, 0.0, xr(1.0)).is_err());
    }

    #[test]
    fn operator_on_absorbing_chain() {
        let m = chain(2.0, 1.0);
        let v = ValueTable::uniform_one(2);
        let tv = bellman_apply(&m, &v);
        assert_eq!(tv.get(0), xr(2.0));
        assert_eq!(tv.get(1), ExtReal::ONE);
    }

    #[test]
    fn operator_minimizes_over_actions() {
        let m = two_action_chain();
        let v = ValueTable::uniform_one(2);
        let tv = bellman_apply(&m, &v);
        // min(2/(2-1), 4/(4-1)) = 4/3
        assert_eq!(tv.get(0), xr(4.0 / 3.0));
    }

    #[test]
    fn zero_cost_absorbing_model_is_a_fixed_point() {
        let m = CtmdpModel::new(
            vec!["a".into(), "b".into()],
            vec!["u".into()],
            vec![vec![vec![0.0, 0.0]], vec![vec![0.0, 0.0]]],
            vec![vec![0.0], vec![0.0]],
        )
        .unwrap();
        let v = ValueTable::uniform_one(2);
        assert_eq!(bellman_apply(&m, &v), v);
    }

    #[test]
    fn policy_restriction_matches_chosen_action() {
        let m = two_action_chain();
        let v = ValueTable::uniform_one(2);
        let fast = StationaryPolicy::new(vec![1, 0]);
        let tv = bellman_apply_policy(&m, &fast, &v).unwrap();
        assert_eq!(tv.get(0), xr(4.0 / 3.0));
        let slow = StationaryPolicy::new(vec![0, 0]);
        let tv = bellman_apply_policy(&m, &slow, &v).unwrap();
        assert_eq!(tv.get(0), xr(2.0));

        // Single-action model: restriction and minimization coincide.
        let m1 = chain(2.0, 1.0);
        let f = StationaryPolicy::new(vec![0, 0]);
        assert_eq!(
            bellman_apply_policy(&m1, &f, &v).unwrap(),
            bellman_apply(&m1, &v)
        );

        let bad = StationaryPolicy::new(vec![7, 0]);
        assert!(bellman_apply_policy(&m, &bad, &v).is_err());
    }

    #[test]
    fn unreachable_infinite_state_contributes_nothing() {
        // q̃ = 0 toward an infinite-valued state: 0·∞ := 0 keeps the mass zero.
        let m = chain(2.0, 1.0);
        let v =
            ValueTable::from_values(vec![ExtReal::ONE, ExtReal::ONE]).unwrap();
        let mut v_inf = v.clone();
        v_inf.set(0, ExtReal::INFINITY);
        // State 1 is absorbing and does not see state 0.
        let tv = bellman_apply(&m, &v_inf);
        assert_eq!(tv.get(1), ExtReal::ONE);
    }

    #[test]
    fn value_table_enforces_floor() {
        assert!(ValueTable::from_values(vec![xr(0.5)]).is_err());
        assert!(ValueTable::from_values(vec![xr(1.0), ExtReal::INFINITY]).is_ok());
    }

    prop_compose! {
        /// Random small model with exit rates below 5 and costs below 1.
        fn small_model()(n in 2usize..5, na in 1usize..4)(
            n in Just(n),
            na in Just(na),
            raw_rates in proptest::collection::vec(0.0..1.0f64, n * na * n),
            costs in proptest::collection::vec(0.0..1.0f64, n * na),
        ) -> CtmdpModel {
            let scale = 5.0 / n as f64;
            let states = (0..n).map(|i| format!("s{i}")).collect();
            let actions = (0..na).map(|i| format!("a{i}")).collect();
            let mut rates = vec![vec![vec![0.0; n]; na]; n];
            let mut cost = vec![vec![0.0; na]; n];
            for x in 0..n {
                for a in 0..na {
                    for y in 0..n {
                        if y != x {
                            rates[x][a][y] = raw_rates[(x * na + a) * n + y] * scale;
                        }
                    }
                    cost[x][a] = costs[x * na + a];
                }
            }
            CtmdpModel::new(states, actions, rates, cost).unwrap()
        }
    }

    fn table_like(m: &CtmdpModel, raw: &[f64]) -> ValueTable {
        ValueTable::from_values(
            (0..m.n_states())
                .map(|x| xr(1.0 + raw[x % raw.len()].abs()))
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn operator_is_monotone(
            m in small_model(),
            lo in proptest::collection::vec(0.0..10.0f64, 8),
            bump in proptest::collection::vec(0.0..5.0f64, 8),
        ) {
            let u = table_like(&m, &lo);
            let w = ValueTable::from_values(
                (0..m.n_states())
                    .map(|x| u.get(x) + xr(bump[x % bump.len()]))
                    .collect(),
            ).unwrap();
            let tu = bellman_apply(&m, &u);
            let tw = bellman_apply(&m, &w);
            prop_assert!(tu.le(&tw), "operator broke pointwise order");
        }

        #[test]
        fn operator_preserves_floor(
            m in small_model(),
            raw in proptest::collection::vec(0.0..10.0f64, 8),
        ) {
            let v = table_like(&m, &raw);
            let tv = bellman_apply(&m, &v);
            for x in 0..m.n_states() {
                prop_assert!(tv.get(x) >= ExtReal::ONE);
            }
        }

        #[test]
        fn any_policy_dominates_the_minimum(
            m in small_model(),
            raw in proptest::collection::vec(0.0..10.0f64, 8),
            picks in proptest::collection::vec(0usize..4, 8),
        ) {
            let v = table_like(&m, &raw);
            let f = StationaryPolicy::new(
                (0..m.n_states()).map(|x| picks[x] % m.n_actions()).collect(),
            );
            let restricted = bellman_apply_policy(&m, &f, &v).unwrap();
            let minimized = bellman_apply(&m, &v);
            prop_assert!(minimized.le(&restricted));
        }
    }
}
