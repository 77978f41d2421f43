use std::fmt;

use crate::quantum::RegionLabel;

/// Locations and prices chosen by the two firms.
///
/// `a` is firm A's distance from the left end, `b` firm B's distance from the
/// right end. When the profile comes from a quantized game, `coords` holds
/// the pre-image coordinates `(x1, x2)` whose image is `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyProfile {
    pub a: f64,
    pub b: f64,
    pub p1: f64,
    pub p2: f64,
    pub coords: Option<[f64; 2]>,
}

impl StrategyProfile {
    pub fn new(a: f64, b: f64, p1: f64, p2: f64) -> Self {
        StrategyProfile {
            a,
            b,
            p1,
            p2,
            coords: None,
        }
    }

    /// Both firms at the given locations, charging the same price.
    pub fn at_price(a: f64, b: f64, price: f64) -> Self {
        Self::new(a, b, price, price)
    }

    pub fn with_coords(self, x1: f64, x2: f64) -> Self {
        StrategyProfile {
            coords: Some([x1, x2]),
            ..self
        }
    }

    /// Exchange the roles of the two firms.
    pub fn swapped(&self) -> Self {
        StrategyProfile {
            a: self.b,
            b: self.a,
            p1: self.p2,
            p2: self.p1,
            coords: self.coords.map(|[x1, x2]| [x2, x1]),
        }
    }
}

/// Which branch of the piecewise equilibrium applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Both firms on the admissible boundary `a = b = L/2`.
    Corner,
    Interior,
    /// Transport cost beyond the range where demand stays non-negative.
    OutOfRange,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Corner => "corner",
            Regime::Interior => "interior",
            Regime::OutOfRange => "out_of_range",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub profile: StrategyProfile,
    pub u1: f64,
    pub u2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Largest absolute own-strategy FOC residual at the returned profile.
    pub foc_residual: f64,
    /// A bound of the admissible location set is active.
    pub boundary_active: bool,
    /// Smallest own-location derivative sampled when a corner solution is
    /// justified by a sign argument. Positive means the argument held.
    pub boundary_gradient: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumResult {
    pub regime: Regime,
    /// Region of the entangled game, for solvers of the quantized model.
    pub region: Option<RegionLabel>,
    /// `None` exactly when the regime is `OutOfRange`.
    pub outcome: Option<Outcome>,
    pub diagnostics: Diagnostics,
}

impl EquilibriumResult {
    pub fn out_of_range(region: Option<RegionLabel>) -> Self {
        EquilibriumResult {
            regime: Regime::OutOfRange,
            region,
            outcome: None,
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn profile(&self) -> Option<&StrategyProfile> {
        self.outcome.as_ref().map(|o| &o.profile)
    }

    pub fn profits(&self) -> Option<(f64, f64)> {
        self.outcome.map(|o| (o.u1, o.u2))
    }

    /// Whether the result satisfies its own acceptance rule: FOC residual
    /// within `tol` unless a boundary is active.
    pub fn is_certified(&self, tol: f64) -> bool {
        match self.regime {
            Regime::OutOfRange => self.outcome.is_none(),
            _ => {
                self.outcome.is_some()
                    && (self.diagnostics.boundary_active || self.diagnostics.foc_residual <= tol)
            }
        }
    }
}
