//! Equilibria of the Hotelling location duopoly on a line segment, in its
//! classical form and with locations chosen through an entangling strategy
//! map.
//!
//! - [`model`]: demand and profit primitives, classical closed forms.
//! - [`quantum`]: the entangling map and the fixed-price quantum equilibrium.
//! - [`twostage`]: locations then free prices, solved by backward induction.
//! - [`oracle`]: grid and finite-difference checks that only evaluate payoffs.

pub mod checks;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod params;
pub mod quantum;
pub mod tolerance;
pub mod twostage;

pub use equilibrium::{Diagnostics, EquilibriumResult, Outcome, Regime, StrategyProfile};
pub use error::{Error, Result};
pub use oracle::{DeviationReport, GridSpec, JointDeviationReport};
pub use params::{Gamma, MarketParams, UNIT_COST};
pub use quantum::{QuantumCoords, RegionLabel};
pub use twostage::{TwoStageSolution, TwoStageSolver};
