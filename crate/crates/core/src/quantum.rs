//! Entangled location strategies for the fixed-price market.
//!
//! Each firm picks a pre-image coordinate `x_i`; the locations actually
//! played are the image under a hyperbolic rotation of rapidity `γ`:
//!
//! ```text
//! a = x1 cosh γ + x2 sinh γ
//! b = x2 cosh γ + x1 sinh γ
//! ```
//!
//! The map has unit determinant, so it is invertible for every finite `γ`,
//! and it is the identity at `γ = 0`. Closed forms below are written in terms
//! of `F = e^{-2γ}` so that the maximal-entanglement limit is simply `F = 0`.

use std::fmt;

use crate::equilibrium::{EquilibriumResult, Regime};
use crate::error::{Error, Result};
use crate::model::{self, fixed_price_result, profits_fixed_price};
use crate::params::{Gamma, MarketParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumCoords {
    pub x1: f64,
    pub x2: f64,
    pub gamma: Gamma,
}

impl QuantumCoords {
    pub fn new(x1: f64, x2: f64, gamma: Gamma) -> Self {
        QuantumCoords { x1, x2, gamma }
    }
}

/// Locations `(a, b)` played by the pre-image coordinates.
pub fn strategy_map(coords: &QuantumCoords) -> Result<(f64, f64)> {
    let g = coords.gamma.finite().ok_or(Error::InfiniteGamma)?;
    let (c, s) = (g.cosh(), g.sinh());
    Ok((
        coords.x1 * c + coords.x2 * s,
        coords.x2 * c + coords.x1 * s,
    ))
}

/// Pre-image of the locations `(a, b)`.
pub fn inverse_strategy_map(a: f64, b: f64, gamma: Gamma) -> Result<QuantumCoords> {
    let g = gamma.finite().ok_or(Error::InfiniteGamma)?;
    let (c, s) = (g.cosh(), g.sinh());
    Ok(QuantumCoords::new(a * c - b * s, b * c - a * s, gamma))
}

/// Fixed-price profits when the firms play `coords`.
///
/// Uses `coords.gamma`; the entanglement stored in `params` is ignored.
pub fn quantum_profits_fixed_price(
    coords: &QuantumCoords,
    params: &MarketParams,
) -> Result<(f64, f64)> {
    let (a, b) = strategy_map(coords)?;
    Ok(profits_fixed_price(a, b, params))
}

/// Own-coordinate derivatives of the fixed-price profits, normalized by
/// `e^γ`.
///
/// Moving `x1` shifts both locations, so the derivative picks up the
/// cross-effect on firm A's profit of firm B's location. The normalization
/// keeps the magnitude comparable across `γ` and gives the finite directional
/// derivative along `(1, 1)/2` in the limit.
pub fn normalized_coordinate_gradient(a: f64, b: f64, params: &MarketParams) -> (f64, f64) {
    let (own, cross) = params.gamma.own_direction();
    let (da1, db2) = model::fixed_price_location_gradient(a, b, params);
    // ∂u1/∂b and ∂u2/∂a share the same form.
    let rival = params.price * (-0.5 + 0.25 * params.transport * (params.length - a - b));
    (own * da1 + cross * rival, own * db2 + cross * rival)
}

/// Transport-cost ranges of the entangled fixed-price game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// `t < (1 - tanh γ)/L`: corner equilibrium, profits as in the classical game.
    Region1,
    /// `(1 - tanh γ)/L <= t < 1/L`.
    Region2,
    /// `1/L <= t <= 2/L`.
    Region3,
    OutOfRange,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::Region1 => "region1",
            RegionLabel::Region2 => "region2",
            RegionLabel::Region3 => "region3",
            RegionLabel::OutOfRange => "out_of_range",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Transport cost `(1 - tanh γ)/L` below which the corner solution survives.
pub fn corner_threshold(params: &MarketParams) -> f64 {
    let f = params.gamma.decay();
    // 1 - tanh γ = 2F / (1 + F)
    2.0 * f / (1.0 + f) / params.length
}

pub fn classify_region(params: &MarketParams) -> RegionLabel {
    let t = params.transport;
    if t > params.fixed_price_transport_limit() {
        RegionLabel::OutOfRange
    } else if t >= params.full_transport_limit() {
        RegionLabel::Region3
    } else if t >= corner_threshold(params) {
        RegionLabel::Region2
    } else {
        RegionLabel::Region1
    }
}

/// Symmetric interior location of the entangled game,
/// `(2F + Lt) / (2t(2 + F))` with `F = e^{-2γ}`.
///
/// Equal to `L/2` at the corner threshold, `(2 + Lt)/6t` at `γ = 0` and
/// `L/4` in the limit.
pub fn quantum_interior_location(params: &MarketParams) -> f64 {
    let f = params.gamma.decay();
    let (l, t) = (params.length, params.transport);
    (2.0 * f + l * t) / (2.0 * t * (2.0 + f))
}

/// Symmetric interior pre-image coordinate `x1 = x2 = a e^{-γ}`.
pub fn quantum_interior_coordinate(params: &MarketParams) -> Result<f64> {
    let g = params.gamma.finite().ok_or(Error::InfiniteGamma)?;
    Ok(quantum_interior_location(params) * (-g).exp())
}

/// Symmetric Nash equilibrium of the entangled fixed-price game.
///
/// Finite `γ` results carry the pre-image coordinates of the returned
/// locations; the limit mode does not, since they vanish there.
pub fn quantum_fixed_price_ne(params: &MarketParams) -> Result<EquilibriumResult> {
    params.validate()?;
    let region = classify_region(params);
    let half = params.half_length();
    let (regime, location) = match region {
        RegionLabel::OutOfRange => return Ok(EquilibriumResult::out_of_range(Some(region))),
        RegionLabel::Region1 => (Regime::Corner, half),
        RegionLabel::Region2 | RegionLabel::Region3 => {
            if params.transport == 0.0 {
                return Err(Error::Degenerate(
                    "zero transport cost under maximal entanglement has no interior solution",
                ));
            }
            (Regime::Interior, quantum_interior_location(params).clamp(0.0, half))
        }
    };

    let mut result = fixed_price_result(regime, location, params);
    result.region = Some(region);
    let (g1, g2) = normalized_coordinate_gradient(location, location, params);
    result.diagnostics.foc_residual = g1.abs().max(g2.abs());
    if result.diagnostics.boundary_active {
        result.diagnostics.boundary_gradient = Some(g1.min(g2));
    }
    if let Some(outcome) = result.outcome.as_mut() {
        if !params.gamma.is_infinite() {
            let coords = inverse_strategy_map(location, location, params.gamma)?;
            outcome.profile = outcome.profile.with_coords(coords.x1, coords.x2);
        }
    }
    Ok(result)
}

/// Quantum-minus-classical equilibrium profit of one firm.
///
/// Zero in the first region, where both games end in the corner.
pub fn profit_difference(params: &MarketParams) -> Result<f64> {
    params.validate()?;
    if params.gamma.is_infinite() {
        return Err(Error::InfiniteGamma);
    }
    let f = params.gamma.decay();
    let MarketParams {
        length: l,
        transport: t,
        price: p0,
        ..
    } = *params;
    match classify_region(params) {
        RegionLabel::Region1 => Ok(0.0),
        RegionLabel::Region2 => {
            let lt = l * t;
            Ok(p0 * (2.0 * f + lt) * (-2.0 * f + (1.0 + f) * lt)
                / (4.0 * (f + 2.0) * (f + 2.0) * t))
        }
        RegionLabel::Region3 => {
            let quantum = f * (l * t - 4.0) / (4.0 * t * (f + 2.0));
            let classical = 0.25 * l - (2.0 + l * t) / (6.0 * t);
            Ok(p0 * t * (classical * classical - quantum * quantum))
        }
        RegionLabel::OutOfRange => Err(Error::Domain(format!(
            "transport cost {t} exceeds 2/L = {}",
            params.fixed_price_transport_limit()
        ))),
    }
}
