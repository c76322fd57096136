use thiserror::Error;

/// Crate-level error. Every variant is tagged with the module that raised it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("orlicz: {0}")]
    Orlicz(String),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("bounds: {0}")]
    Bounds(String),
    #[error("process: {0}")]
    Process(String),
    #[error("planner: {0}")]
    Planner(String),
    /// No truncation level reaches the target because the approximation
    /// errors of the leading coefficients accumulate faster than the tail
    /// decays.
    #[error(
        "planner: irreducible approximation error: smallest achievable bound {floor_nu:.6e} \
         (at N = {n_at_floor}, gamma_N = {gamma_min:.6e}) exceeds the target {nu_target:.6e}"
    )]
    IrreducibleApproximation {
        floor_nu: f64,
        n_at_floor: usize,
        gamma_min: f64,
        nu_target: f64,
    },
    /// The bound plateaus above the target, or the theorem's threshold is
    /// never met, within the searched range of N.
    #[error("planner: target {nu_target:.6e} unreachable up to N = {max_n}: {reason}")]
    Unreachable {
        nu_target: f64,
        max_n: usize,
        reason: String,
    },
    #[error("simulate: {0}")]
    Simulate(String),
    #[error("validate: {0}")]
    Validate(String),
    #[error("spec file {path}, line {line}: {message}")]
    SpecParse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("cli: {0}")]
    Cli(String),
}

pub type Result<T> = std::result::Result<T, Error>;
