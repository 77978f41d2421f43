//! Oracle checks wired to the payoff functions of each game.
//!
//! Deviations are taken in the strategy space the firms actually control:
//! locations in the classical games, pre-image coordinates in the entangled
//! ones. With infinite entanglement a unilateral move shifts both locations
//! by the same amount, so deviations there are diagonal shifts. Images are
//! clamped to `[0, L/2]²` before payoffs are evaluated.

use crate::error::Result;
use crate::model::{original_price_stage_ne, original_profits, profits_fixed_price};
use crate::oracle::{
    verify_nash_1d_with_grids, verify_two_stage, DeviationReport, DeviationSemantics, GridSpec,
    JointDeviationReport,
};
use crate::params::{Gamma, MarketParams};
use crate::quantum::{inverse_strategy_map, strategy_map, QuantumCoords};
use crate::twostage::{full_profits, PriceSolver};
use crate::StrategyProfile;

/// Default deviation tolerance, `1e-6 · p0 · L`.
pub fn default_tolerance(params: &MarketParams) -> f64 {
    1e-6 * params.price * params.length
}

/// Location-stage strategies of both firms and the map from them to
/// locations.
#[derive(Debug, Clone, Copy)]
struct StrategySpace {
    gamma: Gamma,
    half: f64,
    /// Candidate locations, anchoring the infinite-γ diagonal shifts.
    anchor: (f64, f64),
}

impl StrategySpace {
    fn new(params: &MarketParams, a: f64, b: f64) -> Self {
        StrategySpace {
            gamma: params.gamma,
            half: params.half_length(),
            anchor: (a, b),
        }
    }

    /// Strategies that play the candidate locations.
    fn candidate(&self) -> Result<[f64; 2]> {
        let (a, b) = self.anchor;
        Ok(match self.gamma {
            Gamma::Infinite => [a, b],
            g => {
                let c = inverse_strategy_map(a, b, g)?;
                [c.x1, c.x2]
            }
        })
    }

    fn locations(&self, s: [f64; 2]) -> (f64, f64) {
        let (a, b) = match self.gamma {
            Gamma::Infinite => {
                let (a0, b0) = self.anchor;
                (s[0] + (s[1] - b0), s[1] + (s[0] - a0))
            }
            g => strategy_map(&QuantumCoords::new(s[0], s[1], g)).expect("finite gamma"),
        };
        (a.clamp(0.0, self.half), b.clamp(0.0, self.half))
    }

    /// Deviations of `player` that sweep its own location over `[0, L/2]`
    /// with the rival's strategy held at `s`.
    fn grid(&self, s: [f64; 2], player: usize, points: usize, tol: f64) -> Result<GridSpec> {
        match self.gamma {
            Gamma::Infinite => GridSpec::new(0.0, self.half, points, tol),
            Gamma::Finite(g) => {
                let (c, sh) = (g.cosh(), g.sinh());
                let rival = s[1 - player];
                GridSpec::new(-rival * sh / c, (self.half - rival * sh) / c, points, tol)
            }
        }
    }
}

/// Unilateral location deviations in the fixed-price game at `a = (a, b)`.
///
/// Works for the classical game and for every entanglement level. The
/// reported `argmax_deviation` is in the deviating firm's own strategy
/// coordinate.
pub fn fixed_price_deviations(
    params: &MarketParams,
    a: f64,
    b: f64,
    points: usize,
    tol: f64,
) -> Result<[DeviationReport; 2]> {
    let space = StrategySpace::new(params, a, b);
    let candidate = space.candidate()?;
    let grids = [
        space.grid(candidate, 0, points, tol)?,
        space.grid(candidate, 1, points, tol)?,
    ];
    let payoff = |s: [f64; 2]| {
        let (a, b) = space.locations(s);
        let (u1, u2) = profits_fixed_price(a, b, params);
        [u1, u2]
    };
    Ok(verify_nash_1d_with_grids(candidate, payoff, [&grids[0], &grids[1]]))
}

fn price_grid(p1: f64, p2: f64, params: &MarketParams, points: usize, tol: f64) -> Result<GridSpec> {
    let top = 3.0 * p1.max(p2);
    let top = if top > 0.0 {
        top
    } else {
        params.transport * params.length
    };
    GridSpec::new(0.0, top, points, tol)
}

/// Subgame-perfect (or fixed-rival-price) deviations of both firms in the
/// free-price game, at stored locations `(a, b)` and prices `(p1, p2)`.
#[allow(clippy::too_many_arguments)]
pub fn two_stage_deviations(
    params: &MarketParams,
    profile: &StrategyProfile,
    location_points: usize,
    price_points: usize,
    tol: f64,
    semantics: DeviationSemantics,
) -> Result<[JointDeviationReport; 2]> {
    let space = StrategySpace::new(params, profile.a, profile.b);
    let candidate = space.candidate()?;
    let prices = price_grid(profile.p1, profile.p2, params, price_points, tol)?;
    let solver = PriceSolver::fine();
    let payoffs = |s: [f64; 2], p: [f64; 2]| {
        let (a, b) = space.locations(s);
        full_profits(a, b, p[0], p[1], params)
            .ok()
            .map(|(u1, u2)| [u1, u2])
    };
    let equilibrate = |s: [f64; 2]| {
        let (a, b) = space.locations(s);
        solver.solve(a, b, params).ok().map(|eq| [eq.p1, eq.p2])
    };
    let mut reports = Vec::with_capacity(2);
    for player in 0..2 {
        let grid = space.grid(candidate, player, location_points, tol)?;
        reports.push(verify_two_stage(
            payoffs,
            equilibrate,
            candidate,
            [profile.p1, profile.p2],
            player,
            &grid,
            &prices,
            semantics,
        ));
    }
    Ok([reports[0], reports[1]])
}

/// Subgame-perfect deviations in the unit-density market.
pub fn original_deviations(
    params: &MarketParams,
    profile: &StrategyProfile,
    location_points: usize,
    price_points: usize,
    tol: f64,
) -> Result<[JointDeviationReport; 2]> {
    let half = params.half_length();
    let prices = price_grid(profile.p1, profile.p2, params, price_points, tol)?;
    let locations = GridSpec::new(0.0, half, location_points, tol)?;
    let l = params.length;
    let payoffs = |s: [f64; 2], p: [f64; 2]| {
        let trial = StrategyProfile::new(s[0], s[1], p[0], p[1]);
        let (x, _) = crate::model::split_point(&trial, params).ok()?;
        if !(0.0..=l).contains(&(s[0] + x)) {
            return None;
        }
        original_profits(&trial, params).ok().map(|(u1, u2)| [u1, u2])
    };
    let equilibrate = |s: [f64; 2]| {
        original_price_stage_ne(s[0], s[1], params)
            .ok()
            .map(|st| [st.p1, st.p2])
    };
    let candidate = [profile.a, profile.b];
    let stage_prices = [profile.p1, profile.p2];
    Ok(std::array::from_fn(|player| {
        verify_two_stage(
            payoffs,
            equilibrate,
            candidate,
            stage_prices,
            player,
            &locations,
            &prices,
            DeviationSemantics::SubgamePerfect,
        )
    }))
}
