//! Demand and profit primitives of the line market, and the closed-form
//! equilibria of its classical variants.
//!
//! Two demand specifications are covered. In the unit-density market every
//! consumer buys one unit and firms compete in prices after choosing
//! locations. In the fixed-price market both firms sell at the retail price
//! `p0` and demand per unit length decays linearly with the distance to the
//! serving firm, `D = 1 - t|s - s'|`, which turns the game into a pure
//! location contest.

use crate::equilibrium::{Diagnostics, EquilibriumResult, Outcome, Regime, StrategyProfile};
use crate::error::{Error, Result};
use crate::numeric::central_difference;
use crate::params::MarketParams;
use crate::tolerance;

/// Demand per unit length at consumer position `s` served from `s_prime`.
///
/// Negative outside the admissible transport range; callers that stay in
/// range never evaluate it at a served point where it is negative.
pub fn demand_density(s: f64, s_prime: f64, t: f64) -> f64 {
    1.0 - t * (s - s_prime).abs()
}

/// Reach `(x, y)` of each firm towards the other, i.e. the distances from
/// firm A and from firm B to the indifferent consumer.
///
/// `x + y = L - a - b` always holds. With zero transport cost the split is
/// only defined for equal prices, where it falls midway between the firms.
pub fn split_point(profile: &StrategyProfile, params: &MarketParams) -> Result<(f64, f64)> {
    let StrategyProfile { a, b, p1, p2, .. } = *profile;
    let gap = params.length - a - b;
    if gap < 0.0 {
        return Err(Error::Domain(format!(
            "firms cross: a + b = {} exceeds L = {}",
            a + b,
            params.length
        )));
    }
    let t = params.transport;
    if t == 0.0 {
        if p1 != p2 {
            return Err(Error::DegenerateSplit { p1, p2 });
        }
        return Ok((0.5 * gap, 0.5 * gap));
    }
    let shift = (p1 - p2) / t;
    let x = 0.5 * (gap - shift);
    Ok((x, gap - x))
}

/// Quantities sold at equal prices under linearly decaying demand.
///
/// Each firm serves its hinterland and half of the gap between the firms;
/// demand is integrated with distance measured from the serving firm.
pub fn quantities_fixed_price(a: f64, b: f64, params: &MarketParams) -> (f64, f64) {
    let t = params.transport;
    let half_gap = 0.5 * (params.length - a - b);
    let q1 = a + half_gap - 0.5 * t * (a * a + half_gap * half_gap);
    let q2 = b + half_gap - 0.5 * t * (b * b + half_gap * half_gap);
    (q1, q2)
}

/// Profits `p0 * q_i` of the fixed-price location game.
pub fn profits_fixed_price(a: f64, b: f64, params: &MarketParams) -> (f64, f64) {
    let (q1, q2) = quantities_fixed_price(a, b, params);
    (params.price * q1, params.price * q2)
}

/// Own-location derivatives `(∂u1/∂a, ∂u2/∂b)` of the fixed-price profits.
pub fn fixed_price_location_gradient(a: f64, b: f64, params: &MarketParams) -> (f64, f64) {
    let MarketParams {
        length: l,
        transport: t,
        price: p0,
        ..
    } = *params;
    let overlap = 0.5 * (a + b - l);
    (
        p0 * (0.5 - 0.5 * t * (2.0 * a + overlap)),
        p0 * (0.5 - 0.5 * t * (2.0 * b + overlap)),
    )
}

/// Profit of each firm when both sit at the market centre, `p0 (L/2 - L²t/8)`.
pub fn corner_profit(params: &MarketParams) -> f64 {
    let MarketParams {
        length: l,
        transport: t,
        price: p0,
        ..
    } = *params;
    p0 * (0.5 * l - l * l * t / 8.0)
}

/// Symmetric fixed-price profit `p0 [L/2 - t((a - L/4)² + L²/16)]` with both
/// firms at distance `a` from their ends.
pub fn symmetric_fixed_price_profit(a: f64, params: &MarketParams) -> f64 {
    let MarketParams {
        length: l,
        transport: t,
        price: p0,
        ..
    } = *params;
    let d = a - 0.25 * l;
    p0 * (0.5 * l - t * (d * d + l * l / 16.0))
}

/// Interior classical location `(2 + Lt) / 6t`.
pub fn classical_interior_location(params: &MarketParams) -> f64 {
    let (l, t) = (params.length, params.transport);
    (2.0 + l * t) / (6.0 * t)
}

/// Nash equilibrium of the classical fixed-price location game.
///
/// Below `t = 1/L` both own-location derivatives stay positive and the firms
/// meet at the centre. On `[1/L, 2/L]` the first-order conditions have the
/// symmetric root `(2 + Lt)/6t`. Beyond `2/L` demand turns negative and the
/// instance is reported out of range.
pub fn classical_fixed_price_ne(params: &MarketParams) -> Result<EquilibriumResult> {
    params.validate()?;
    let t = params.transport;
    if t > params.fixed_price_transport_limit() {
        return Ok(EquilibriumResult::out_of_range(None));
    }
    let half = params.half_length();
    let (regime, location) = if t < params.full_transport_limit() {
        (Regime::Corner, half)
    } else {
        (Regime::Interior, classical_interior_location(params).clamp(0.0, half))
    };
    Ok(fixed_price_result(regime, location, params))
}

/// Assemble a symmetric fixed-price equilibrium at `a = b = location`.
pub(crate) fn fixed_price_result(
    regime: Regime,
    location: f64,
    params: &MarketParams,
) -> EquilibriumResult {
    let (u1, u2) = profits_fixed_price(location, location, params);
    let (g1, g2) = fixed_price_location_gradient(location, location, params);
    let boundary_active = regime == Regime::Corner;
    EquilibriumResult {
        regime,
        region: None,
        outcome: Some(Outcome {
            profile: StrategyProfile::at_price(location, location, params.price),
            u1,
            u2,
        }),
        diagnostics: Diagnostics {
            iterations: 0,
            foc_residual: g1.abs().max(g2.abs()),
            boundary_active,
            boundary_gradient: boundary_active.then_some(g1.min(g2)),
        },
    }
}

/// Prices and profits of a price-stage equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceStage {
    pub p1: f64,
    pub p2: f64,
    pub u1: f64,
    pub u2: f64,
}

/// Profits `p1 (a + x)` and `p2 (b + y)` of the unit-density market.
pub fn original_profits(profile: &StrategyProfile, params: &MarketParams) -> Result<(f64, f64)> {
    let (x, y) = split_point(profile, params)?;
    Ok((profile.p1 * (profile.a + x), profile.p2 * (profile.b + y)))
}

/// Price-stage equilibrium of the unit-density market for given locations.
pub fn original_price_stage_ne(a: f64, b: f64, params: &MarketParams) -> Result<PriceStage> {
    let (l, t) = (params.length, params.transport);
    if t <= 0.0 {
        return Err(Error::Degenerate(
            "zero transport cost drives both prices to marginal cost",
        ));
    }
    let lead = (a - b) / 3.0;
    let m1 = l + lead;
    let m2 = l - lead;
    Ok(PriceStage {
        p1: t * m1,
        p2: t * m2,
        u1: 0.5 * t * m1 * m1,
        u2: 0.5 * t * m2 * m2,
    })
}

/// Location-stage equilibrium of the unit-density market.
///
/// With prices re-equilibrated, each firm's reduced profit strictly increases
/// as it moves towards the other, so both end at the centre. The sign of that
/// derivative is sampled on a small interior grid and recorded in the
/// diagnostics.
pub fn original_location_stage_ne(params: &MarketParams) -> Result<EquilibriumResult> {
    params.validate()?;
    let half = params.half_length();
    let step = tolerance::LOCATION_FD_STEP * params.length;
    let reduced = |a: f64, b: f64| original_price_stage_ne(a, b, params).map(|s| (s.u1, s.u2));

    let mut min_gradient = f64::INFINITY;
    let samples = 5;
    for i in 1..=samples {
        for j in 1..=samples {
            let a = half * i as f64 / (samples + 1) as f64;
            let b = half * j as f64 / (samples + 1) as f64;
            reduced(a, b)?;
            let g1 = central_difference(|a| reduced(a, b).map_or(f64::NAN, |u| u.0), a, step);
            let g2 = central_difference(|b| reduced(a, b).map_or(f64::NAN, |u| u.1), b, step);
            min_gradient = min_gradient.min(g1).min(g2);
        }
    }

    let stage = original_price_stage_ne(half, half, params)?;
    Ok(EquilibriumResult {
        regime: Regime::Corner,
        region: None,
        outcome: Some(Outcome {
            profile: StrategyProfile::new(half, half, stage.p1, stage.p2),
            u1: stage.u1,
            u2: stage.u2,
        }),
        diagnostics: Diagnostics {
            iterations: 0,
            foc_residual: 0.0,
            boundary_active: true,
            boundary_gradient: Some(min_gradient),
        },
    })
}

/// How consumers are counted when averaging travel distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// One consumer per unit length.
    Uniform,
    /// Each position weighted by its demand density.
    Density,
}

/// Mean distance from a consumer to the firm serving it, with equal prices.
pub fn average_travel_distance(
    a: f64,
    b: f64,
    params: &MarketParams,
    weighting: Weighting,
) -> f64 {
    let half_gap = 0.5 * (params.length - a - b);
    let arms = [a, half_gap, b, half_gap];
    match weighting {
        Weighting::Uniform => arms.iter().map(|d| 0.5 * d * d).sum::<f64>() / params.length,
        Weighting::Density => {
            let t = params.transport;
            let travel: f64 = arms.iter().map(|d| 0.5 * d * d - t * d * d * d / 3.0).sum();
            let mass: f64 = arms.iter().map(|d| d - 0.5 * t * d * d).sum();
            travel / mass
        }
    }
}
