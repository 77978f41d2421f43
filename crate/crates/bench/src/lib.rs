//! Fixtures shared by the solver benchmarks.

use hotelling_core::{Gamma, MarketParams};

/// Unit market at transport cost `t`.
pub fn market(t: f64, gamma: Gamma) -> MarketParams {
    MarketParams::new(1.0, t, 1.0, gamma).expect("valid fixture")
}

/// Representative entanglement levels: classical, moderate, strong.
pub fn gammas() -> [Gamma; 3] {
    [Gamma::ZERO, Gamma::three_quarters(), Gamma::Finite(3.0)]
}
