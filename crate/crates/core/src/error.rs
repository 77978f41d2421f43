use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid market parameters: {0}")]
    InvalidParams(String),

    /// With zero transport cost and unequal prices every consumer buys from
    /// the cheaper firm, so no indifference point exists.
    #[error("split point undefined: t = 0 with p1 = {p1} != p2 = {p2}")]
    DegenerateSplit { p1: f64, p2: f64 },

    #[error("degenerate instance: {0}")]
    Degenerate(&'static str),

    #[error("outside model domain: {0}")]
    Domain(String),

    #[error("infinite entanglement has no finite strategy map; use the limit-mode solvers")]
    InfiniteGamma,

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
