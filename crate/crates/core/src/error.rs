use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("pole of f near z = {z}")]
    Pole { z: f64 },
    #[error("{what} at z = {z}")]
    Domain { what: &'static str, z: f64 },
    #[error("solution escaped to |f| > 1e6 near z = {z}")]
    PoleEscape { z: f64 },
    #[error("f crossed zero near z = {z}")]
    ZeroCrossing { z: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("difference is not constant: spread {spread:e} around {offset}")]
    Inconsistent { offset: f64, spread: f64 },
    #[error("wavefunction is singular near x = {x}")]
    SingularWavefunction { x: f64 },
    #[error("grid has {n} points, need at least {min}")]
    GridTooCoarse { n: usize, min: usize },
    #[error("potential magnitude exceeds 1e12 at x = {x}")]
    SingularPotential { x: f64 },
    #[error("level {level} did not converge")]
    Convergence { level: usize },
    #[error("refinement budget exceeded at n = {n}")]
    BudgetExceeded { n: usize },
}
