use thiserror::Error;

/// Errors produced by model construction, solvers and samplers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("inconsistent sojourn data: zero exit rate with positive jump mass {jump_mass}")]
    ZeroRatePositiveJumpMass { jump_mass: f64 },

    #[error("action index {action} out of range for state {state} ({n_actions} actions)")]
    ActionOutOfRange {
        state: usize,
        action: usize,
        n_actions: usize,
    },

    #[error("value table entry for state {state} is {value}, below the floor of 1")]
    ValueBelowFloor { state: usize, value: f64 },

    #[error(
        "backward integration produced {value} at t={t} for state {state} (below 1); \
         reduce the step size or check the model"
    )]
    BackwardUnderflow { t: f64, state: usize, value: f64 },

    #[error("invalid time profile: {0}")]
    InvalidProfile(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
