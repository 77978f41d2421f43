//! Single-instance solves and oracle checks behind every subcommand.

use hotelling_core::checks::{
    default_tolerance, fixed_price_deviations, original_deviations, two_stage_deviations,
};
use hotelling_core::model::{classical_fixed_price_ne, original_location_stage_ne, original_price_stage_ne};
use hotelling_core::oracle::DeviationSemantics;
use hotelling_core::quantum::{profit_difference, quantum_fixed_price_ne};
use hotelling_core::twostage::{admissible, price_stage_ne};
use hotelling_core::{
    EquilibriumResult, Error, Gamma, MarketParams, Regime, RegionLabel, StrategyProfile,
    TwoStageSolution, TwoStageSolver,
};

use crate::error::CliError;
use crate::table::{Model, RowRegime, SweepRow};

/// Everything `solve` prints about one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub model: Model,
    pub params: MarketParams,
    pub row: SweepRow,
    pub region: Option<RegionLabel>,
    pub coords: Option<[f64; 2]>,
    /// Named solver diagnostics, in print order.
    pub diagnostics: Vec<(&'static str, String)>,
}

fn regime(r: Regime) -> RowRegime {
    match r {
        Regime::Corner => RowRegime::Corner,
        Regime::Interior => RowRegime::Interior,
        Regime::OutOfRange => RowRegime::OutOfRange,
    }
}

fn fill(row: &mut SweepRow, profile: &StrategyProfile, u1: f64, u2: f64) {
    row.a = Some(profile.a);
    row.b = Some(profile.b);
    row.p1 = Some(profile.p1);
    row.p2 = Some(profile.p2);
    row.u1 = Some(u1);
    row.u2 = Some(u2);
}

fn check_model_gamma(model: Model, gamma: Gamma) -> Result<(), CliError> {
    if model == Model::Original && !gamma.is_classical() {
        return Err(CliError::Usage(
            "the original model has no entangled variant; use --gamma 0".into(),
        ));
    }
    Ok(())
}

/// Solves one instance. Degenerate and out-of-range instances come back as
/// rows with the matching regime; only non-convergence and invalid input are
/// errors.
pub fn solve(model: Model, params: &MarketParams) -> Result<Report, CliError> {
    params.validate()?;
    check_model_gamma(model, params.gamma)?;
    match model {
        Model::Original => solve_original(params),
        Model::Fixed => solve_fixed(params),
        Model::Full => solve_full(params, None),
    }
}

fn report(model: Model, params: &MarketParams, row: SweepRow) -> Report {
    Report {
        model,
        params: *params,
        row,
        region: None,
        coords: None,
        diagnostics: Vec::new(),
    }
}

fn degenerate(model: Model, params: &MarketParams, why: Error) -> Report {
    let mut r = report(
        model,
        params,
        SweepRow::empty(params.gamma, params.transport, RowRegime::Degenerate),
    );
    r.diagnostics.push(("note", why.to_string()));
    r
}

fn push_result_diagnostics(r: &mut Report, res: &EquilibriumResult) {
    if res.outcome.is_none() {
        r.diagnostics
            .push(("note", "transport cost outside [0, 2/L]".to_string()));
        return;
    }
    let d = &res.diagnostics;
    r.diagnostics.push(("foc_residual", crate::format::number(d.foc_residual)));
    r.diagnostics.push(("boundary_active", d.boundary_active.to_string()));
    if let Some(g) = d.boundary_gradient {
        r.diagnostics.push(("boundary_gradient", crate::format::number(g)));
    }
}

fn solve_original(params: &MarketParams) -> Result<Report, CliError> {
    let res = match original_location_stage_ne(params) {
        Ok(res) => res,
        Err(e @ Error::Degenerate(_)) => return Ok(degenerate(Model::Original, params, e)),
        Err(e) => return Err(e.into()),
    };
    let mut row = SweepRow::empty(params.gamma, params.transport, regime(res.regime));
    let o = res.outcome.expect("corner outcome");
    fill(&mut row, &o.profile, o.u1, o.u2);
    let mut r = report(Model::Original, params, row);
    push_result_diagnostics(&mut r, &res);
    Ok(r)
}

fn solve_fixed(params: &MarketParams) -> Result<Report, CliError> {
    let res = if params.gamma.is_classical() {
        classical_fixed_price_ne(params)
    } else {
        quantum_fixed_price_ne(params)
    };
    let res = match res {
        Ok(res) => res,
        Err(e @ Error::Degenerate(_)) => return Ok(degenerate(Model::Fixed, params, e)),
        Err(e) => return Err(e.into()),
    };
    let mut row = SweepRow::empty(params.gamma, params.transport, regime(res.regime));
    let mut coords = None;
    if let Some(o) = res.outcome {
        fill(&mut row, &o.profile, o.u1, o.u2);
        coords = o.profile.coords;
        row.u_diff = Some(match params.gamma {
            Gamma::Infinite => {
                let classical = classical_fixed_price_ne(&params.with_gamma(Gamma::ZERO))?;
                o.u1 - classical.profits().expect("in range").0
            }
            _ => profit_difference(params)?,
        });
    }
    let mut r = report(Model::Fixed, params, row);
    r.region = res.region;
    r.coords = coords;
    push_result_diagnostics(&mut r, &res);
    Ok(r)
}

/// Solves the two-stage game. `baseline` is the classical profit at the same
/// transport cost, when already known.
pub fn solve_full(params: &MarketParams, baseline: Option<f64>) -> Result<Report, CliError> {
    let gamma = params.gamma;
    if !admissible(params) {
        let mut r = report(
            Model::Full,
            params,
            SweepRow::empty(gamma, params.transport, RowRegime::OutOfRange),
        );
        r.diagnostics
            .push(("note", "transport cost outside (0, 1/L]".to_string()));
        return Ok(r);
    }
    let sol = two_stage(params)?;
    let mut row = SweepRow::empty(
        gamma,
        params.transport,
        if sol.boundary {
            RowRegime::Corner
        } else {
            RowRegime::Interior
        },
    );
    fill(
        &mut row,
        &StrategyProfile::new(sol.a, sol.b, sol.p1, sol.p2),
        sol.u1,
        sol.u2,
    );
    let base = match (gamma.is_classical(), baseline) {
        (true, _) => sol.u1,
        (false, Some(u)) => u,
        (false, None) => two_stage(&params.with_gamma(Gamma::ZERO))?.u1,
    };
    row.u_diff = Some(sol.u1 - base);
    let mut r = report(Model::Full, params, row);
    r.coords = sol.coords;
    let n = crate::format::number;
    r.diagnostics.extend([
        ("inner_residual", n(sol.inner_residual)),
        ("outer_residual", n(sol.outer_residual)),
        ("location_gradient", n(sol.location_gradient)),
        ("boundary_active", sol.boundary.to_string()),
        ("foc_sign_changes", sol.foc_sign_changes.to_string()),
        ("multiple_roots", sol.multiple_roots().to_string()),
    ]);
    Ok(r)
}

fn two_stage(params: &MarketParams) -> Result<TwoStageSolution, CliError> {
    let sol = TwoStageSolver::default().solve(params)?;
    if !sol.converged {
        return Err(CliError::NonConvergence(format!(
            "two-stage solve at t={} gamma={}: inner residual {}, outer residual {}",
            params.transport, params.gamma, sol.inner_residual, sol.outer_residual
        )));
    }
    Ok(sol)
}

/// Oracle settings; `None` picks the model default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    pub grid_points: Option<usize>,
    pub tolerance: Option<f64>,
}

/// Per-firm outcome of an oracle check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmCheck {
    pub max_gain: f64,
    /// Most profitable deviation: strategy coordinate and, for price games,
    /// the price.
    pub argmax: (f64, Option<f64>),
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub profile: StrategyProfile,
    pub tolerance: f64,
    pub grid_points: usize,
    pub firms: [FirmCheck; 2],
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.firms.iter().all(|f| f.passed)
    }

    pub fn max_gain(&self) -> f64 {
        self.firms[0].max_gain.max(self.firms[1].max_gain)
    }
}

fn defaults(model: Model, params: &MarketParams, opts: VerifyOptions) -> (usize, f64) {
    match model {
        Model::Fixed => (
            opts.grid_points.unwrap_or(hotelling_core::oracle::GridSpec::DEFAULT_POINTS),
            opts.tolerance.unwrap_or_else(|| default_tolerance(params)),
        ),
        Model::Full | Model::Original => (
            opts.grid_points.unwrap_or(101),
            opts.tolerance.unwrap_or(1e-5 * params.length),
        ),
    }
}

/// Runs the oracle at locations `(a, b)`. Price-stage games play the
/// price equilibrium of those locations.
pub fn verify_at(
    model: Model,
    params: &MarketParams,
    a: f64,
    b: f64,
    opts: VerifyOptions,
) -> Result<Verification, CliError> {
    check_model_gamma(model, params.gamma)?;
    let (points, tol) = defaults(model, params, opts);
    let half = params.half_length();
    if !(0.0..=half).contains(&a) || !(0.0..=half).contains(&b) {
        return Err(CliError::Usage(format!(
            "locations must lie in [0, L/2], got ({a}, {b})"
        )));
    }
    let (profile, firms) = match model {
        Model::Fixed => {
            let prof = StrategyProfile::at_price(a, b, params.price);
            let reps = fixed_price_deviations(params, a, b, points, tol)?;
            (
                prof,
                reps.map(|r| FirmCheck {
                    max_gain: r.max_gain,
                    argmax: (r.argmax_deviation, None),
                    passed: r.passed,
                }),
            )
        }
        Model::Full | Model::Original => {
            let prof = if model == Model::Full {
                if !admissible(params) {
                    return Err(CliError::Domain(format!(
                        "transport cost {} outside (0, 1/L]",
                        params.transport
                    )));
                }
                let (p1, p2) = price_stage_ne(a, b, params)?;
                StrategyProfile::new(a, b, p1, p2)
            } else {
                let st = original_price_stage_ne(a, b, params)?;
                StrategyProfile::new(a, b, st.p1, st.p2)
            };
            let reps = if model == Model::Full {
                two_stage_deviations(
                    params,
                    &prof,
                    points,
                    points,
                    tol,
                    DeviationSemantics::SubgamePerfect,
                )?
            } else {
                original_deviations(params, &prof, points, points, tol)?
            };
            (
                prof,
                reps.map(|r| FirmCheck {
                    max_gain: r.max_gain,
                    argmax: (r.argmax_deviation.0, Some(r.argmax_deviation.1)),
                    passed: r.passed,
                }),
            )
        }
    };
    Ok(Verification {
        profile,
        tolerance: tol,
        grid_points: points,
        firms,
    })
}

/// Solves and then runs the oracle on the solution.
pub fn verify_solution(
    model: Model,
    params: &MarketParams,
    opts: VerifyOptions,
) -> Result<Verification, CliError> {
    let r = solve(model, params)?;
    match (r.row.regime, r.row.a, r.row.b) {
        (RowRegime::OutOfRange, ..) => Err(CliError::Domain(format!(
            "no equilibrium to verify: t={} is out of range",
            params.transport
        ))),
        (RowRegime::Degenerate, ..) => Err(CliError::Domain(
            "no equilibrium to verify: degenerate instance".into(),
        )),
        (_, Some(a), Some(b)) => verify_at(model, params, a, b, opts),
        _ => unreachable!("solved rows carry locations"),
    }
}
