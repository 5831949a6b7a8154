use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid mismatch: expected {expected} samples, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("state does not match the model: {0}")]
    ModelMismatch(&'static str),

    #[error("state has no velocity component")]
    MissingVelocity,

    #[error("initial guess is degenerate (stabilizing factor is 0/0)")]
    DegenerateGuess,

    #[error("linear symbol vanishes at wavenumber {wavenumber}")]
    Resonance { wavenumber: f64 },

    #[error("implicit stage did not converge in {iterations} iterations (last increment {increment:e})")]
    InnerSolverDiverged { iterations: usize, increment: f64 },

    #[error("state became non-finite at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("ill-posed regime: negative radicand at x = {x}")]
    IllPosedRegime { x: f64 },

    #[error("phase-speed minimizer undefined (requires alpha > 0 and T > 0)")]
    UndefinedMinimizer,

    #[error("profile does not decay inside the window (edge magnitude {edge:e})")]
    WindowTooSmall { edge: f64 },

    #[error("evolution trace is empty")]
    EmptyTrace,
}

pub type Result<T> = core::result::Result<T, Error>;
