//! Brute-force verification that knows only how to evaluate payoffs.
//!
//! Nothing here calls a closed-form equilibrium expression: every check takes
//! the payoff (and, for two-stage games, a price-stage solver) as closures, so
//! an analytic solution and its verification never share a derivation.

use crate::error::{Error, Result};

/// Uniform grid of candidate strategies for one player.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lower: f64,
    pub upper: f64,
    /// Odd, so the midpoint is on the grid.
    pub points: usize,
    /// Largest profit gain still accepted as "no profitable deviation".
    pub tolerance: f64,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 2001;

    pub fn new(lower: f64, upper: f64, points: usize, tolerance: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && upper > lower) {
            return Err(Error::InvalidParams(format!(
                "grid bounds must satisfy lower < upper, got [{lower}, {upper}]"
            )));
        }
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "grid needs an odd number of points >= 3, got {points}"
            )));
        }
        if tolerance.is_nan() || tolerance < 0.0 {
            return Err(Error::InvalidParams(format!("negative tolerance {tolerance}")));
        }
        Ok(GridSpec {
            lower,
            upper,
            points,
            tolerance,
        })
    }

    pub fn step(&self) -> f64 {
        (self.upper - self.lower) / (self.points - 1) as f64
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            self.upper
        } else {
            self.lower + self.step() * k as f64
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|k| self.value(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationReport {
    /// Largest gain over the candidate's own payoff; never negative because
    /// the null deviation is always considered.
    pub max_gain: f64,
    pub argmax_deviation: f64,
    pub passed: bool,
}

impl DeviationReport {
    fn null(strategy: f64, tolerance: f64) -> Self {
        DeviationReport {
            max_gain: 0.0,
            argmax_deviation: strategy,
            passed: 0.0 <= tolerance,
        }
    }
}

fn with_strategy(profile: [f64; 2], player: usize, s: f64) -> [f64; 2] {
    let mut p = profile;
    p[player] = s;
    p
}

/// Largest unilateral gain of each player over a grid of deviations.
pub fn verify_nash_1d<F>(profile: [f64; 2], payoff: F, grid: &GridSpec) -> [DeviationReport; 2]
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    verify_nash_1d_with_grids(profile, payoff, [grid, grid])
}

/// [`verify_nash_1d`] with a separate deviation grid per player.
///
/// Non-finite payoffs mark infeasible deviations and are skipped. Among
/// equal gains the smallest grid index wins.
pub fn verify_nash_1d_with_grids<F>(
    profile: [f64; 2],
    payoff: F,
    grids: [&GridSpec; 2],
) -> [DeviationReport; 2]
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    let base = payoff(profile);
    std::array::from_fn(|player| {
        let grid = grids[player];
        let mut report = DeviationReport::null(profile[player], grid.tolerance);
        if !base[player].is_finite() {
            report.max_gain = f64::INFINITY;
            report.passed = false;
            return report;
        }
        for s in grid.values() {
            let u = payoff(with_strategy(profile, player, s))[player];
            let gain = u - base[player];
            if gain.is_finite() && gain > report.max_gain {
                report.max_gain = gain;
                report.argmax_deviation = s;
            }
        }
        report.passed = report.max_gain <= grid.tolerance;
        report
    })
}

/// Smallest-index maximizer of `player`'s payoff on the grid.
pub fn grid_best_response<F>(payoff: &F, profile: [f64; 2], player: usize, grid: &GridSpec) -> f64
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    let mut best = (grid.lower, f64::NEG_INFINITY);
    for s in grid.values() {
        let u = payoff(with_strategy(profile, player, s))[player];
        if u > best.1 {
            best = (s, u);
        }
    }
    best.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsStatus {
    /// Neither player's best response changed over a full round.
    Converged,
    /// The profile returned to the one from two rounds earlier.
    Cycle,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsOutcome {
    pub profile: [f64; 2],
    pub rounds: usize,
    pub status: DynamicsStatus,
}

/// Alternating exact grid best responses, player 0 first.
pub fn best_response_dynamics<F>(
    payoff: F,
    initial: [f64; 2],
    grid: &GridSpec,
    max_rounds: usize,
) -> DynamicsOutcome
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    let mut profile = initial;
    let mut history: Vec<[f64; 2]> = vec![initial];
    for round in 1..=max_rounds {
        let mut next = profile;
        next[0] = grid_best_response(&payoff, next, 0, grid);
        next[1] = grid_best_response(&payoff, next, 1, grid);
        if next == profile {
            return DynamicsOutcome {
                profile,
                rounds: round,
                status: DynamicsStatus::Converged,
            };
        }
        if history.len() >= 2 && history[history.len() - 2] == next {
            return DynamicsOutcome {
                profile: next,
                rounds: round,
                status: DynamicsStatus::Cycle,
            };
        }
        history.push(next);
        profile = next;
    }
    DynamicsOutcome {
        profile,
        rounds: max_rounds,
        status: DynamicsStatus::MaxIterations,
    }
}

/// Central-difference gradient of `f` at `point`.
pub fn finite_diff_gradient<F: Fn(&[f64]) -> f64>(f: F, point: &[f64], step: f64) -> Vec<f64> {
    let mut probe = point.to_vec();
    (0..point.len())
        .map(|i| {
            probe[i] = point[i] + step;
            let up = f(&probe);
            probe[i] = point[i] - step;
            let down = f(&probe);
            probe[i] = point[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// Adaptive Simpson quadrature of `f` over `[lo, hi]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        refine(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + refine(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }

    if hi == lo {
        return 0.0;
    }
    let (fa, fb) = (f(lo), f(hi));
    let (m, fm, whole) = simpson(&f, lo, fa, hi, fb);
    refine(&f, lo, fa, hi, fb, m, fm, whole, tol, 50)
}

/// What the rival does when one firm deviates in the location stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationSemantics {
    /// Both prices re-equilibrate after the location deviation, and the
    /// deviator may additionally pick any price on the grid against the
    /// rival's re-equilibrated price. This is the subgame-perfect check.
    SubgamePerfect,
    /// The deviator moves location and price jointly while the rival keeps
    /// its candidate price. Not the solution concept of the two-stage game;
    /// kept as a cruder diagnostic.
    FixedRivalPrice,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDeviationReport {
    pub max_gain: f64,
    /// Stage-one strategy and price of the most profitable deviation.
    pub argmax_deviation: (f64, f64),
    /// Stage-one deviations whose price subgame could not be solved.
    pub unsolved: usize,
    pub passed: bool,
}

/// Unilateral (stage-one strategy, price) deviations of `player` in a
/// two-stage game.
///
/// `payoffs(stage1, prices)` returns `None` where the game is undefined.
/// `equilibrate(stage1)` returns the price-stage equilibrium for given
/// stage-one strategies. The candidate's own stage-one strategy is always
/// tested alongside the grid, which covers pure price deviations.
#[allow(clippy::too_many_arguments)]
pub fn verify_two_stage<P, E>(
    payoffs: P,
    equilibrate: E,
    stage1: [f64; 2],
    prices: [f64; 2],
    player: usize,
    stage1_grid: &GridSpec,
    price_grid: &GridSpec,
    semantics: DeviationSemantics,
) -> JointDeviationReport
where
    P: Fn([f64; 2], [f64; 2]) -> Option<[f64; 2]>,
    E: Fn([f64; 2]) -> Option<[f64; 2]>,
{
    let rival = 1 - player;
    let mut report = JointDeviationReport {
        max_gain: 0.0,
        argmax_deviation: (stage1[player], prices[player]),
        unsolved: 0,
        passed: false,
    };
    let Some(base) = payoffs(stage1, prices).map(|u| u[player]) else {
        report.max_gain = f64::INFINITY;
        return report;
    };

    let strategies = std::iter::once(stage1[player]).chain(stage1_grid.values());
    for s in strategies {
        let deviated = with_strategy(stage1, player, s);
        let (rival_price, own_price) = match semantics {
            DeviationSemantics::SubgamePerfect => match equilibrate(deviated) {
                Some(eq) => (eq[rival], Some(eq[player])),
                None => {
                    report.unsolved += 1;
                    continue;
                }
            },
            DeviationSemantics::FixedRivalPrice => (prices[rival], None),
        };
        for p in own_price.into_iter().chain(price_grid.values()) {
            let mut trial = prices;
            trial[player] = p;
            trial[rival] = rival_price;
            if let Some(u) = payoffs(deviated, trial) {
                let gain = u[player] - base;
                if gain.is_finite() && gain > report.max_gain {
                    report.max_gain = gain;
                    report.argmax_deviation = (s, p);
                }
            }
        }
    }
    report.passed = report.unsolved == 0 && report.max_gain <= stage1_grid.tolerance;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(0.0, 1.0, 4, 0.0).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1, 0.0).is_err());
        assert!(GridSpec::new(1.0, 1.0, 3, 0.0).is_err());
        assert!(GridSpec::new(0.0, 1.0, 3, -1.0).is_err());
        let g = GridSpec::new(0.0, 0.5, 2001, 1e-6).unwrap();
        assert_eq!(g.value(1000), 0.25);
        assert_eq!(g.value(2000), 0.5);
        assert_eq!(g.values().count(), 2001);
    }

    #[test]
    fn constant_payoff_has_zero_gain() {
        let g = GridSpec::new(0.0, 1.0, 11, 0.0).unwrap();
        let reports = verify_nash_1d([0.3, 0.7], |_| [1.0, 1.0], &g);
        for r in reports {
            assert_eq!(r.max_gain, 0.0);
            assert!(r.passed);
        }
    }

    #[test]
    fn detects_profitable_deviation() {
        // Each player wants to sit at 0.25 whatever the other does.
        let payoff = |s: [f64; 2]| [-(s[0] - 0.25).powi(2), -(s[1] - 0.25).powi(2)];
        let g = GridSpec::new(0.0, 1.0, 101, 1e-9).unwrap();
        let [r0, r1] = verify_nash_1d([0.5, 0.25], payoff, &g);
        assert!(!r0.passed);
        assert_eq!(r0.argmax_deviation, 0.25);
        assert!((r0.max_gain - 0.0625).abs() < 1e-15);
        assert!(r1.passed);
    }

    #[test]
    fn dynamics_converge_in_coordination_game() {
        let payoff = |s: [f64; 2]| [-(s[0] - 0.5 * s[1] - 0.2).powi(2), -(s[1] - 0.5 * s[0] - 0.2).powi(2)];
        let g = GridSpec::new(0.0, 1.0, 1001, 0.0).unwrap();
        let out = best_response_dynamics(payoff, [0.0, 0.0], &g, 100);
        assert_eq!(out.status, DynamicsStatus::Converged);
        assert!((out.profile[0] - 0.4).abs() <= g.step() + 1e-12, "{out:?}");
        assert!((out.profile[1] - 0.4).abs() <= g.step() + 1e-12);
    }

    #[test]
    fn dynamics_report_cycles() {
        // Matching pennies on {0, 0.5, 1}: player 0 matches, player 1 mismatches.
        let payoff = |s: [f64; 2]| {
            let m = if (s[0] - s[1]).abs() < 1e-12 { 1.0 } else { -1.0 };
            [m, -m]
        };
        let g = GridSpec::new(0.0, 1.0, 3, 0.0).unwrap();
        let out = best_response_dynamics(payoff, [0.0, 0.0], &g, 50);
        assert_eq!(out.status, DynamicsStatus::Cycle);
    }

    #[test]
    fn dynamics_respect_iteration_cap() {
        let payoff = |s: [f64; 2]| [-(s[0] - s[1] - 0.1).powi(2), -(s[1] - s[0] - 0.1).powi(2)];
        let g = GridSpec::new(0.0, 1.0, 101, 0.0).unwrap();
        let out = best_response_dynamics(payoff, [0.0, 0.0], &g, 2);
        assert_eq!(out.status, DynamicsStatus::MaxIterations);
        assert_eq!(out.rounds, 2);
    }

    #[test]
    fn gradient_of_constant_and_quadratic() {
        let g = finite_diff_gradient(|_| 3.0, &[0.1, 0.2], 1e-4);
        assert!(g.iter().all(|d| d.abs() < 1e-8));
        let g = finite_diff_gradient(|x| x[0] * x[0] + 3.0 * x[0] * x[1], &[1.0, 2.0], 1e-5);
        assert!((g[0] - 8.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn quadrature_of_kinked_integrand() {
        let v = integrate(|s| 1.0 - 2.0 * (s - 0.3).abs(), 0.0, 0.6, 1e-13);
        assert!((v - (0.6 - 2.0 * 0.09)).abs() < 1e-12);
        let v = integrate(|s| s.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn two_stage_check_sees_price_deviations() {
        // Stage one is irrelevant; each firm's profit peaks at price 1.
        let payoffs = |_: [f64; 2], p: [f64; 2]| Some([-(p[0] - 1.0).powi(2), -(p[1] - 1.0).powi(2)]);
        let eq = |_: [f64; 2]| Some([1.0, 1.0]);
        let loc = GridSpec::new(0.0, 1.0, 11, 1e-9).unwrap();
        let price = GridSpec::new(0.0, 2.0, 21, 1e-9).unwrap();
        let ok = verify_two_stage(
            payoffs,
            eq,
            [0.5, 0.5],
            [1.0, 1.0],
            0,
            &loc,
            &price,
            DeviationSemantics::SubgamePerfect,
        );
        assert!(ok.passed);
        let bad = verify_two_stage(
            payoffs,
            eq,
            [0.5, 0.5],
            [0.5, 1.0],
            0,
            &loc,
            &price,
            DeviationSemantics::FixedRivalPrice,
        );
        assert!(!bad.passed);
        assert_eq!(bad.argmax_deviation.1, 1.0);
    }

    #[test]
    fn two_stage_check_counts_unsolved_subgames() {
        let payoffs = |_: [f64; 2], _: [f64; 2]| Some([0.0, 0.0]);
        let eq = |s: [f64; 2]| (s[0] < 0.5).then_some([1.0, 1.0]);
        let loc = GridSpec::new(0.0, 1.0, 11, 1e-9).unwrap();
        let price = GridSpec::new(0.0, 2.0, 3, 1e-9).unwrap();
        let r = verify_two_stage(
            payoffs,
            eq,
            [0.2, 0.2],
            [1.0, 1.0],
            0,
            &loc,
            &price,
            DeviationSemantics::SubgamePerfect,
        );
        assert!(r.unsolved > 0);
        assert!(!r.passed);
    }
}
