//! The free-price game: firms choose locations, then prices, under linearly
//! decaying demand.
//!
//! Solved by backward induction restricted to symmetric outcomes. The price
//! stage is an equilibrium of two concave one-dimensional problems, found by
//! damped best-response iteration. The location stage is a scalar root-find
//! on the symmetric first-order condition, whose derivative is taken by
//! central differences with prices re-equilibrated at every trial location.
//!
//! In the entangled variant firms move pre-image coordinates instead of
//! locations, so the location FOC is a directional derivative along
//! `(cosh γ, sinh γ)`. Its maximal-entanglement limit is the diagonal
//! direction, where the equilibrium coincides with the joint-profit optimum
//! and has a closed form.

use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_section_max, linspace};
use crate::params::{Gamma, MarketParams};
use crate::quantum::inverse_strategy_map;
use crate::tolerance;

/// Firm A's profit with locations `(own, rival)` and prices `(p_own, p_rival)`.
/// Firm B's profit is the same expression with the roles exchanged.
fn firm_profit(own: f64, rival: f64, p_own: f64, p_rival: f64, l: f64, t: f64) -> f64 {
    let reach = own_reach(own, rival, p_own, p_rival, l, t);
    p_own * (own + reach - 0.5 * t * (own * own + reach * reach))
}

fn own_reach(own: f64, rival: f64, p_own: f64, p_rival: f64, l: f64, t: f64) -> f64 {
    0.5 * (l - own - rival) + 0.5 * (p_rival - p_own) / t
}

/// `∂u/∂p_own`.
fn own_price_slope(own: f64, rival: f64, p_own: f64, p_rival: f64, l: f64, t: f64) -> f64 {
    let x = own_reach(own, rival, p_own, p_rival, l, t);
    let q = own + x - 0.5 * t * (own * own + x * x);
    q - p_own * (1.0 - t * x) / (2.0 * t)
}

/// `∂²u/∂p_own²`, strictly negative on the admissible price interval.
fn own_price_curvature(own: f64, rival: f64, p_own: f64, p_rival: f64, l: f64, t: f64) -> f64 {
    let x = own_reach(own, rival, p_own, p_rival, l, t);
    -(1.0 - t * x) / t - p_own / (4.0 * t)
}

/// Prices for which the indifferent consumer stays inside `[0, L]`.
fn price_interval(own: f64, rival: f64, p_rival: f64, l: f64, t: f64) -> (f64, f64) {
    let lo = (p_rival - t * (l - own + rival)).max(0.0);
    let hi = p_rival + t * (l + own - rival);
    (lo, hi.max(lo))
}

fn check_transport(params: &MarketParams) -> Result<()> {
    if admissible(params) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "free-price game needs 0 < t <= 1/L = {}, got t = {}",
            params.full_transport_limit(),
            params.transport
        )))
    }
}

/// Whether the transport cost lies in `(0, 1/L]`, the range on which demand
/// stays positive whatever prices the firms choose.
pub fn admissible(params: &MarketParams) -> bool {
    params.transport > 0.0 && params.transport <= params.full_transport_limit()
}

/// Profits of the free-price game.
///
/// Fails when the indifferent consumer would fall outside the market.
pub fn full_profits(a: f64, b: f64, p1: f64, p2: f64, params: &MarketParams) -> Result<(f64, f64)> {
    check_transport(params)?;
    let (l, t) = (params.length, params.transport);
    let split = a + own_reach(a, b, p1, p2, l, t);
    if !(0.0..=l).contains(&split) {
        return Err(Error::Domain(format!(
            "indifferent consumer at {split} lies outside [0, {l}] for a={a}, b={b}, p1={p1}, p2={p2}"
        )));
    }
    Ok((firm_profit(a, b, p1, p2, l, t), firm_profit(b, a, p2, p1, l, t)))
}

/// Own-price derivatives `(∂u1/∂p1, ∂u2/∂p2)` of the free-price profits.
pub fn price_gradient(a: f64, b: f64, p1: f64, p2: f64, params: &MarketParams) -> (f64, f64) {
    let (l, t) = (params.length, params.transport);
    (
        own_price_slope(a, b, p1, p2, l, t),
        own_price_slope(b, a, p2, p1, l, t),
    )
}

/// Best response of the firm at `own` to a rival at `rival` charging `p_rival`.
///
/// Golden-section search brackets the maximizer of the concave profit, then a
/// few Newton steps on the analytic own-price slope polish it to working
/// precision.
pub fn best_response_price(own: f64, rival: f64, p_rival: f64, params: &MarketParams) -> f64 {
    best_response_from(own, rival, p_rival, params, None)
}

/// Best response starting Newton from `start` when given. Falls back to the
/// golden-section bracket if Newton does not settle inside the price interval.
fn best_response_from(
    own: f64,
    rival: f64,
    p_rival: f64,
    params: &MarketParams,
    start: Option<f64>,
) -> f64 {
    let (l, t) = (params.length, params.transport);
    let (lo, hi) = price_interval(own, rival, p_rival, l, t);
    if hi <= lo {
        return lo;
    }
    if let Some(p) = start.and_then(|p| newton_polish(own, rival, p_rival, l, t, (lo, hi), p)) {
        return p;
    }
    let p = golden_section_max(
        |p| firm_profit(own, rival, p, p_rival, l, t),
        lo,
        hi,
        1e-4 * (hi - lo),
    );
    newton_polish(own, rival, p_rival, l, t, (lo, hi), p).unwrap_or(p)
}

/// Newton iteration on the own-price slope. `None` unless it converges.
fn newton_polish(
    own: f64,
    rival: f64,
    p_rival: f64,
    l: f64,
    t: f64,
    (lo, hi): (f64, f64),
    start: f64,
) -> Option<f64> {
    let mut p = start.clamp(lo, hi);
    for _ in 0..12 {
        let slope = own_price_slope(own, rival, p, p_rival, l, t);
        let curvature = own_price_curvature(own, rival, p, p_rival, l, t);
        if curvature.is_nan() || curvature >= 0.0 {
            return None;
        }
        let next = (p - slope / curvature).clamp(lo, hi);
        let moved = (next - p).abs();
        p = next;
        if moved <= 4.0 * f64::EPSILON * p.abs().max(f64::MIN_POSITIVE) {
            return Some(p);
        }
        // Pinned at a bound with the slope still pushing outward.
        if moved == 0.0 {
            return Some(p);
        }
    }
    let slope = own_price_slope(own, rival, p, p_rival, l, t);
    (slope.abs() <= 1e-14 || p == lo || p == hi).then_some(p)
}

/// Price-stage equilibrium and how it was reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceEquilibrium {
    pub p1: f64,
    pub p2: f64,
    /// Largest absolute own-price FOC at the returned prices.
    pub residual: f64,
    pub iterations: usize,
}

/// Damped best-response iteration for the price stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceSolver {
    /// Weight kept on the previous iterate.
    pub damping: f64,
    /// Stop once both prices move less than this in one iteration.
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for PriceSolver {
    fn default() -> Self {
        PriceSolver {
            damping: tolerance::PRICE_DAMPING,
            step_tol: tolerance::PRICE_STEP,
            max_iter: 10_000,
        }
    }
}

impl PriceSolver {
    /// Tighter stopping rule, for callers that difference profits across
    /// nearby locations.
    pub fn fine() -> Self {
        PriceSolver {
            step_tol: 1e-14,
            ..Self::default()
        }
    }

    pub fn solve(&self, a: f64, b: f64, params: &MarketParams) -> Result<PriceEquilibrium> {
        let guess = symmetric_price_guess(0.5 * (a + b), params);
        self.solve_from(a, b, params, (guess, guess))
    }

    pub fn solve_from(
        &self,
        a: f64,
        b: f64,
        params: &MarketParams,
        guess: (f64, f64),
    ) -> Result<PriceEquilibrium> {
        check_transport(params)?;
        let (mut p1, mut p2) = guess;
        let keep = self.damping;
        let mut last: Option<(f64, f64)> = None;
        for iteration in 1..=self.max_iter {
            let r1 = best_response_from(a, b, p2, params, last.map(|r| r.0));
            let r2 = best_response_from(b, a, p1, params, last.map(|r| r.1));
            last = Some((r1, r2));
            let n1 = keep * p1 + (1.0 - keep) * r1;
            let n2 = keep * p2 + (1.0 - keep) * r2;
            let step = (n1 - p1).abs().max((n2 - p2).abs());
            p1 = n1;
            p2 = n2;
            if step < self.step_tol {
                let (g1, g2) = price_gradient(a, b, p1, p2, params);
                let residual = g1.abs().max(g2.abs());
                if residual > tolerance::INNER_FOC {
                    return Err(Error::NonConvergence {
                        solver: "price stage",
                        iterations: iteration,
                        residual,
                    });
                }
                return Ok(PriceEquilibrium {
                    p1,
                    p2,
                    residual,
                    iterations: iteration,
                });
            }
        }
        let (g1, g2) = price_gradient(a, b, p1, p2, params);
        Err(Error::NonConvergence {
            solver: "price stage",
            iterations: self.max_iter,
            residual: g1.abs().max(g2.abs()),
        })
    }
}

/// Symmetric price-stage price `2tq / (1 - t(L/2 - a))` with both firms at `a`.
fn symmetric_price_guess(a: f64, params: &MarketParams) -> f64 {
    let (l, t) = (params.length, params.transport);
    let h = 0.5 * l - a;
    let q = a + h - 0.5 * t * (a * a + h * h);
    (2.0 * t * q / (1.0 - t * h)).max(0.0)
}

/// Price-stage Nash equilibrium at locations `(a, b)`.
pub fn price_stage_ne(a: f64, b: f64, params: &MarketParams) -> Result<(f64, f64)> {
    PriceSolver::default()
        .solve(a, b, params)
        .map(|eq| (eq.p1, eq.p2))
}

/// Symmetric subgame-perfect outcome of the two-stage game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStageSolution {
    pub a: f64,
    pub b: f64,
    pub p1: f64,
    pub p2: f64,
    pub u1: f64,
    pub u2: f64,
    pub gamma: Gamma,
    /// Pre-image coordinates for finite non-zero `γ`.
    pub coords: Option<[f64; 2]>,
    pub converged: bool,
    /// The location sits on a bound of `[0, L/2]`.
    pub boundary: bool,
    pub inner_residual: f64,
    /// Location FOC residual, projected onto the feasible set at a bound.
    pub outer_residual: f64,
    /// Raw location FOC (per unit image displacement) at the solution.
    pub location_gradient: f64,
    /// Sign changes of the location FOC found by the bracketing scan.
    pub foc_sign_changes: usize,
}

impl TwoStageSolution {
    pub fn multiple_roots(&self) -> bool {
        self.foc_sign_changes > 1
    }
}

/// Backward-induction solver for symmetric outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStageSolver {
    pub scan_points: usize,
    /// Finite-difference step of the location FOC, as a fraction of `L`.
    pub fd_step: f64,
    /// Price solver for bracketing the FOC sign.
    pub scan_prices: PriceSolver,
    /// Price solver for root refinement and the reported solution.
    pub refine_prices: PriceSolver,
}

impl Default for TwoStageSolver {
    fn default() -> Self {
        TwoStageSolver {
            scan_points: tolerance::LOCATION_SCAN_POINTS,
            fd_step: tolerance::LOCATION_FD_STEP,
            scan_prices: PriceSolver::fine(),
            refine_prices: PriceSolver::fine(),
        }
    }
}

impl TwoStageSolver {
    /// Location FOC at the symmetric point `a = b = location`, as the
    /// derivative of firm A's profit along the image direction of its own
    /// strategy. `prices` carries a warm start in and an estimate of the
    /// symmetric equilibrium prices out.
    pub fn location_foc(
        &self,
        location: f64,
        params: &MarketParams,
        solver: &PriceSolver,
        prices: &mut (f64, f64),
    ) -> Result<f64> {
        let (own, cross) = params.gamma.own_direction();
        let h = self.fd_step * params.length;
        let guess = *prices;
        let side = |sign: f64, guess: (f64, f64)| -> Result<(f64, PriceEquilibrium)> {
            let a = location + sign * own * h;
            let b = location + sign * cross * h;
            let eq = solver.solve_from(a, b, params, guess)?;
            Ok((full_profits(a, b, eq.p1, eq.p2, params)?.0, eq))
        };
        let (up, eq_up) = side(1.0, guess)?;
        // The two sides are 2h apart; the first answer is the better start.
        let (down, eq_down) = side(-1.0, (eq_up.p1, eq_up.p2))?;
        *prices = (0.5 * (eq_up.p1 + eq_down.p1), 0.5 * (eq_up.p2 + eq_down.p2));
        Ok((up - down) / (2.0 * h))
    }

    /// Symmetric equilibrium for the entanglement stored in `params`.
    ///
    /// The infinite-`γ` limit is evaluated by [`limit_location`] and
    /// [`limit_profit`]; use [`TwoStageSolver::solve_numeric`] to run the
    /// iterative solver along the limiting direction instead.
    pub fn solve(&self, params: &MarketParams) -> Result<TwoStageSolution> {
        if params.gamma.is_infinite() {
            self.solve_limit(params)
        } else {
            self.solve_numeric(params)
        }
    }

    pub fn solve_numeric(&self, params: &MarketParams) -> Result<TwoStageSolution> {
        params.validate()?;
        check_transport(params)?;
        let half = params.half_length();

        let grid = linspace(0.0, half, self.scan_points.max(2));
        let mut warm = {
            let p = symmetric_price_guess(0.0, params);
            (p, p)
        };
        let mut focs = Vec::with_capacity(grid.len());
        let mut scan_prices = Vec::with_capacity(grid.len());
        for &a in &grid {
            // Prices move smoothly with location; extrapolate the last two.
            if let [.., before, last] = scan_prices[..] {
                let (b1, b2): (f64, f64) = before;
                let (l1, l2): (f64, f64) = last;
                warm = ((2.0 * l1 - b1).max(0.0), (2.0 * l2 - b2).max(0.0));
            }
            focs.push(self.location_foc(a, params, &self.scan_prices, &mut warm)?);
            scan_prices.push(warm);
        }

        let sign_changes = focs
            .windows(2)
            .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
            .count();

        let mut candidates = Vec::new();
        for (k, w) in focs.windows(2).enumerate() {
            if w[0] > 0.0 && w[1] <= 0.0 {
                let mut prices = scan_prices[k];
                let root = bisect(
                    |a| {
                        self.location_foc(a, params, &self.refine_prices, &mut prices)
                            .unwrap_or(f64::NAN)
                    },
                    grid[k],
                    grid[k + 1],
                    1e-13 * params.length,
                );
                if let Some(root) = root {
                    candidates.push(root);
                }
            }
        }
        if focs.last().is_some_and(|&f| f > 0.0) {
            candidates.push(half);
        }
        if focs.first().is_some_and(|&f| f < 0.0) {
            candidates.push(0.0);
        }
        if candidates.is_empty() {
            return Err(Error::NonConvergence {
                solver: "location stage",
                iterations: grid.len(),
                residual: focs.iter().fold(f64::INFINITY, |m, f| m.min(f.abs())),
            });
        }

        let mut best: Option<TwoStageSolution> = None;
        for location in candidates {
            let solution = self.assemble(location, params, sign_changes)?;
            if best.is_none_or(|b| solution.u1 > b.u1) {
                best = Some(solution);
            }
        }
        Ok(best.expect("candidates is non-empty"))
    }

    fn solve_limit(&self, params: &MarketParams) -> Result<TwoStageSolution> {
        params.validate()?;
        let location = limit_location(params)?;
        let mut solution = self.assemble(location, params, 1)?;
        let profit = limit_profit(params)?;
        solution.u1 = profit;
        solution.u2 = profit;
        Ok(solution)
    }

    fn assemble(
        &self,
        location: f64,
        params: &MarketParams,
        sign_changes: usize,
    ) -> Result<TwoStageSolution> {
        let half = params.half_length();
        let eq = self.refine_prices.solve(location, location, params)?;
        let (u1, u2) = full_profits(location, location, eq.p1, eq.p2, params)?;
        let mut warm = (eq.p1, eq.p2);
        let gradient = self.location_foc(location, params, &self.refine_prices, &mut warm)?;
        let at_upper = location >= half;
        let at_lower = location <= 0.0;
        let outer_residual = if (at_upper && gradient >= 0.0) || (at_lower && gradient <= 0.0) {
            0.0
        } else {
            gradient.abs()
        };
        let coords = match params.gamma {
            Gamma::Finite(g) if g != 0.0 => {
                let c = inverse_strategy_map(location, location, params.gamma)?;
                Some([c.x1, c.x2])
            }
            _ => None,
        };
        Ok(TwoStageSolution {
            a: location,
            b: location,
            p1: eq.p1,
            p2: eq.p2,
            u1,
            u2,
            gamma: params.gamma,
            coords,
            converged: eq.residual <= tolerance::INNER_FOC
                && outer_residual <= tolerance::OUTER_FOC,
            boundary: at_upper || at_lower,
            inner_residual: eq.residual,
            outer_residual,
            location_gradient: gradient,
            foc_sign_changes: sign_changes,
        })
    }
}

/// Classical (`γ = 0`) symmetric subgame-perfect equilibrium.
pub fn classical_twostage_symmetric_ne(params: &MarketParams) -> Result<TwoStageSolution> {
    TwoStageSolver::default().solve(&params.with_gamma(Gamma::ZERO))
}

/// Symmetric equilibrium with entangled locations and classical prices.
pub fn quantum_twostage_symmetric_ne(params: &MarketParams) -> Result<TwoStageSolution> {
    TwoStageSolver::default().solve(params)
}

fn limit_transport(params: &MarketParams) -> Result<(f64, f64)> {
    let (l, t) = (params.length, params.transport);
    if t <= 0.0 {
        return Err(Error::Degenerate("the limit closed forms divide by t"));
    }
    check_transport(params)?;
    Ok((l, t))
}

/// `64 - 56Lt + 7L²t²`, positive for `Lt <= 1`.
fn limit_discriminant(lt: f64) -> f64 {
    64.0 - 56.0 * lt + 7.0 * lt * lt
}

/// Symmetric location of the maximal-entanglement equilibrium,
/// `(-8 + 5Lt + √(64 - 56Lt + 7L²t²)) / 12t`.
pub fn limit_location(params: &MarketParams) -> Result<f64> {
    let (l, t) = limit_transport(params)?;
    let lt = l * t;
    Ok((-8.0 + 5.0 * lt + limit_discriminant(lt).sqrt()) / (12.0 * t))
}

/// Profit of each firm at the maximal-entanglement equilibrium.
pub fn limit_profit(params: &MarketParams) -> Result<f64> {
    let (l, t) = limit_transport(params)?;
    let lt = l * t;
    let root = limit_discriminant(lt).sqrt();
    let numerator = 5.0 * lt * lt + lt * (-40.0 + root) - 4.0 * (-8.0 + root);
    Ok(numerator * numerator / (54.0 * t * (4.0 - lt + root)))
}

/// Profit of each firm when both sit at distance `a` from their ends and
/// play the price-stage equilibrium,
/// `t[8a²t + L(-4 - 4at + Lt)]² / 16(2 + 2at - Lt)`.
pub fn symmetric_profit_curve(a: f64, params: &MarketParams) -> Result<f64> {
    let (l, t) = (params.length, params.transport);
    let denominator = 16.0 * (2.0 + 2.0 * a * t - l * t);
    if denominator <= 0.0 {
        return Err(Error::Domain(format!(
            "symmetric profit denominator {denominator} is not positive at a = {a}"
        )));
    }
    let inner = 8.0 * a * a * t + l * (-4.0 - 4.0 * a * t + l * t);
    Ok(t * inner * inner / denominator)
}
