//! Solvers and simulation for risk-sensitive continuous-time Markov decision
//! processes: minimize the expected exponential utility `E[e^{∫ c}]` of total
//! nonnegative cost under controlled jump rates.
//!
//! The pieces fit together as follows:
//!
//! * [`ext_real`]: arithmetic on `[0, ∞]` with the conventions (`0·∞ := 0`,
//!   `0/0 := 0`) that the utility calculus relies on;
//! * [`profile`]: piecewise polynomial-exponential functions of time, closed
//!   under integration and inversion;
//! * [`model`]: homogeneous and time-varying model types, validation, and
//!   the discounted / finite-horizon reformulations;
//! * [`bellman`]: the embedded discrete-time Bellman operator with its
//!   closed-form sojourn integral;
//! * [`solver`]: monotone value iteration, policy extraction and
//!   evaluation, residuals, and infinite-value classification;
//! * [`timegrid`]: backward RK4 integration for nonhomogeneous,
//!   finite-horizon and discounted problems;
//! * [`simulate`]: exact jump-process sampling and reproducible Monte Carlo
//!   estimation, the solver's independent cross-check.

pub mod bellman;
pub mod error;
pub mod ext_real;
pub mod model;
pub mod profile;
pub mod simulate;
pub mod solver;
pub mod timegrid;

pub use bellman::{bellman_apply, bellman_apply_policy, sojourn_value, ValueTable};
pub use error::{Error, Result};
pub use ext_real::{no_jump_term, ExtReal};
pub use model::{
    augment_discounted, augment_finite_horizon, validate_model, CtmdpModel, ModelDoc,
    ModelPayload, TerminalCost, TimeVaryingModel, Violation,
};
pub use profile::TimeProfile;
pub use simulate::{
    estimate_utility, estimate_utility_stationary, heavy_tail_risk, sample_sojourn,
    sample_trajectory, EstimateOptions, McEstimate, SimOptions, SimPolicy, TrajectorySample,
};
pub use solver::{
    classify_states, evaluate_policy, extract_policy, residual, value_iteration, IterationTrace,
    SolveOptions, StateClass, StatePartition, StationaryPolicy,
};
pub use timegrid::{
    discounted_value, extract_markov_policy, finite_horizon_value, solve_backward,
    DiscountedSolution, MarkovPolicyGrid, MarkovValueGrid,
};
