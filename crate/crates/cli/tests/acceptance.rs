//! Acceptance gate: nine criteria, one PASS/FAIL line each. Exits non-zero
//! if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hotelling_cli::table::{parse_csv, SweepRow};
use hotelling_cli::RowRegime;
use hotelling_core::checks::{fixed_price_deviations, two_stage_deviations};
use hotelling_core::model::{
    average_travel_distance, classical_fixed_price_ne, original_price_stage_ne, original_profits,
    profits_fixed_price, Weighting,
};
use hotelling_core::numeric::golden_section_max;
use hotelling_core::oracle::{finite_diff_gradient, DeviationSemantics};
use hotelling_core::quantum::{
    classify_region, corner_threshold, profit_difference, quantum_fixed_price_ne,
    quantum_interior_location,
};
use hotelling_core::twostage::{limit_location, limit_profit, symmetric_profit_curve};
use hotelling_core::{Gamma, MarketParams, Regime, RegionLabel, StrategyProfile, TwoStageSolver};

// Tolerances, pinned.
const REDUCTION_TOL: f64 = 1e-9;
const CASE_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-6;
const LIMIT_LOCATION_TOL: f64 = 1e-8;
const TRAVEL_TOL: f64 = 1e-12;
const THRESHOLD_TOL: f64 = 1e-9;
const DIFFERENCE_TOL: f64 = 1e-10;
const NONNEGATIVE_SLACK: f64 = 1e-12;
const ARGMAX_TOL: f64 = 1e-6;
const MAX_VALUE_TOL: f64 = 1e-9;
const TWO_STAGE_GAIN_TOL: f64 = 1e-5;
const ORDERING_SLACK: f64 = 1e-8;
const CONTINUITY_TOL: f64 = 1e-9;
const FOC_TOL: f64 = 1e-6;

const FIGURE_BUDGET: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn params(t: f64, gamma: Gamma) -> MarketParams {
    MarketParams::new(1.0, t, 1.0, gamma).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || {
        format!("took {elapsed:?}, budget {budget:?}")
    })
}

/// Profit of either firm when both stand `a` from their ends at price p0,
/// from the quantity each serves under linearly decaying demand.
fn symmetric_fixed_profit(a: f64, p: &MarketParams) -> f64 {
    let (l, t) = (p.length, p.transport);
    let d = a - 0.25 * l;
    p.price * (0.5 * l - t * (d * d + l * l / 16.0))
}

/// Points in (0, L/2)² spread by the additive golden-ratio sequence.
fn scattered(n: usize, half: f64) -> Vec<(f64, f64)> {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let (s1, s2) = (1.0 / phi, 1.0 / (phi * phi));
    (1..=n)
        .map(|k| {
            let k = k as f64;
            let u = (0.5 + k * s1).fract();
            let v = (0.5 + k * s2).fract();
            (half * (0.02 + 0.96 * u), half * (0.02 + 0.96 * v))
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 1..=200 {
        let p = params(2.0 * k as f64 / 200.0, Gamma::ZERO);
        let q = quantum_fixed_price_ne(&p).map_err(|e| e.to_string())?;
        let c = classical_fixed_price_ne(&p).map_err(|e| e.to_string())?;
        let (qp, cp) = (q.profile().unwrap(), c.profile().unwrap());
        let (qu, cu) = (q.profits().unwrap(), c.profits().unwrap());
        for d in [qp.a - cp.a, qp.b - cp.b, qu.0 - cu.0, qu.1 - cu.1] {
            worst = worst.max(d.abs());
        }
    }
    ensure(worst <= REDUCTION_TOL, || format!("max deviation {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("max deviation {worst:e} over 200 t-points"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let p = params(1.5, Gamma::ZERO);
    let res = classical_fixed_price_ne(&p).map_err(|e| e.to_string())?;
    let prof = *res.profile().ok_or("no profile at t=1.5")?;
    let expected_a = 3.5 / 9.0;
    let expected_u = symmetric_fixed_profit(expected_a, &p);
    let (u1, u2) = res.profits().unwrap();
    ensure(
        res.regime == Regime::Interior
            && (prof.a - expected_a).abs() <= CASE_TOL
            && (prof.b - expected_a).abs() <= CASE_TOL
            && (u1 - expected_u).abs() <= CASE_TOL
            && (u2 - expected_u).abs() <= CASE_TOL,
        || format!("got a={} b={} u={u1}, expected a={expected_a} u={expected_u}", prof.a, prof.b),
    )?;
    let reports =
        fixed_price_deviations(&p, prof.a, prof.b, 2001, ORACLE_TOL).map_err(|e| e.to_string())?;
    let gain = reports[0].max_gain.max(reports[1].max_gain);
    ensure(reports.iter().all(|r| r.passed) && gain <= ORACLE_TOL, || {
        format!("oracle max_gain {gain:e}")
    })?;
    let out = classical_fixed_price_ne(&params(2.5, Gamma::ZERO)).map_err(|e| e.to_string())?;
    ensure(out.regime == Regime::OutOfRange && out.outcome.is_none(), || {
        format!("t=2.5 classified {:?}", out.regime)
    })?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("a=b={:.12}, u={:.12}, oracle max_gain {gain:e}, t=2.5 out_of_range", prof.a, u1))
}

fn criterion_3() -> Outcome {
    let mut worst_a = 0.0f64;
    let mut worst_travel = 0.0f64;
    for t in [0.5, 1.0, 1.5, 2.0] {
        let p = params(t, Gamma::Finite(20.0));
        let res = quantum_fixed_price_ne(&p).map_err(|e| e.to_string())?;
        let prof = res.profile().ok_or("no profile")?;
        worst_a = worst_a.max((prof.a - 0.25).abs()).max((prof.b - 0.25).abs());
        let travel = average_travel_distance(prof.a, prof.b, &p, Weighting::Uniform);
        worst_travel = worst_travel.max((travel - 0.125).abs());
    }
    ensure(worst_a <= LIMIT_LOCATION_TOL, || format!("location off L/4 by {worst_a:e}"))?;
    ensure(worst_travel <= TRAVEL_TOL, || format!("travel off L/8 by {worst_travel:e}"))?;
    Ok(format!("|a-L/4| <= {worst_a:e}, |travel-L/8| <= {worst_travel:e}"))
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for g in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let base = params(1.0, Gamma::Finite(g));
        let threshold = (1.0 - g.tanh()) / base.length;
        let p = base.with_transport(threshold);
        ensure((corner_threshold(&base) - threshold).abs() <= 1e-15, || {
            format!("threshold mismatch at γ={g}")
        })?;
        worst = worst.max((quantum_interior_location(&p) - 0.5 * p.length).abs());
    }
    ensure(worst <= THRESHOLD_TOL, || format!("gap {worst:e}"))?;
    Ok(format!("max gap to L/2 {worst:e}"))
}

fn direct_difference(p: &MarketParams) -> Result<f64, String> {
    let q = quantum_fixed_price_ne(p).map_err(|e| e.to_string())?;
    let qa = q.profile().ok_or("no quantum profile")?.a;
    let c = classical_fixed_price_ne(&p.with_gamma(Gamma::ZERO)).map_err(|e| e.to_string())?;
    let ca = c.profile().ok_or("no classical profile")?.a;
    Ok(profits_fixed_price(qa, qa, p).0 - profits_fixed_price(ca, ca, p).0)
}

fn criterion_5() -> Outcome {
    let gammas: Vec<f64> = (0..10).map(|k| 0.1 + 0.45 * k as f64).collect();
    let mut worst = 0.0f64;
    let mut counts = [0usize; 2];
    for (region, lo_hi) in [(RegionLabel::Region2, 0usize), (RegionLabel::Region3, 1)] {
        for &g in &gammas {
            let base = params(1.0, Gamma::Finite(g));
            let (lo, hi) = if lo_hi == 0 {
                (corner_threshold(&base), 0.999)
            } else {
                (1.0, 2.0)
            };
            for k in 0..5 {
                let t = lo + (hi - lo) * k as f64 / 4.0;
                let p = base.with_transport(t);
                ensure(classify_region(&p) == region, || {
                    format!("γ={g} t={t} not in {region}")
                })?;
                let printed = profit_difference(&p).map_err(|e| e.to_string())?;
                let direct = direct_difference(&p)?;
                worst = worst.max((printed - direct).abs());
                counts[lo_hi] += 1;
            }
        }
    }
    ensure(worst <= DIFFERENCE_TOL, || format!("closed form vs direct {worst:e}"))?;
    // Sign and monotonicity on a γ ladder at fixed t.
    let ladder = [0.0, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0];
    for k in 0..=80 {
        let t = 2.0 * k as f64 / 80.0;
        let mut prev = f64::NEG_INFINITY;
        for g in ladder {
            let d = profit_difference(&params(t, Gamma::Finite(g))).map_err(|e| e.to_string())?;
            ensure(d >= -NONNEGATIVE_SLACK, || format!("negative difference {d} at γ={g} t={t}"))?;
            ensure(d >= prev - NONNEGATIVE_SLACK, || {
                format!("difference falls with γ at t={t}: {prev} -> {d}")
            })?;
            prev = d;
        }
    }
    Ok(format!(
        "{}+{} pairs, max |closed form - direct| {worst:e}, nonnegative and nondecreasing in γ",
        counts[0], counts[1]
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (mut worst_a, mut worst_u) = (0.0f64, 0.0f64);
    for k in 1..=20 {
        let p = params(k as f64 / 20.0, Gamma::ZERO);
        let curve = |a: f64| symmetric_profit_curve(a, &p).unwrap_or(f64::NEG_INFINITY);
        let argmax = golden_section_max(curve, 0.0, 0.5 * p.length, 1e-12);
        let a30 = limit_location(&p).map_err(|e| e.to_string())?;
        let u31 = limit_profit(&p).map_err(|e| e.to_string())?;
        worst_a = worst_a.max((argmax - a30).abs());
        worst_u = worst_u.max((curve(argmax) - u31).abs());
    }
    ensure(worst_a <= ARGMAX_TOL && worst_u <= MAX_VALUE_TOL, || {
        format!("argmax gap {worst_a:e}, value gap {worst_u:e}")
    })?;
    within(start.elapsed(), Duration::from_secs(2))?;
    Ok(format!("argmax gap {worst_a:e}, value gap {worst_u:e}"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let solver = TwoStageSolver::default();
    let mut worst_gain = 0.0f64;
    let mut checked = 0;
    let mut min_slack = f64::INFINITY;
    for k in 1..=20 {
        let t = k as f64 / 20.0;
        let mut profits = Vec::new();
        for g in [Gamma::ZERO, Gamma::three_quarters(), Gamma::Infinite] {
            let p = params(t, g);
            let sol = solver.solve(&p).map_err(|e| format!("γ={g} t={t}: {e}"))?;
            profits.push(sol.u1);
            if g.is_infinite() || !sol.converged {
                continue;
            }
            let prof = StrategyProfile::new(sol.a, sol.b, sol.p1, sol.p2);
            let reports = two_stage_deviations(
                &p,
                &prof,
                101,
                101,
                TWO_STAGE_GAIN_TOL,
                DeviationSemantics::SubgamePerfect,
            )
            .map_err(|e| e.to_string())?;
            for r in reports {
                worst_gain = worst_gain.max(r.max_gain);
                ensure(r.passed, || format!("γ={g} t={t}: deviation gains {:e}", r.max_gain))?;
            }
            checked += 1;
        }
        min_slack = min_slack.min(profits[1] - profits[0]).min(profits[2] - profits[1]);
    }
    ensure(checked == 40, || format!("only {checked} of 40 solves converged"))?;
    ensure(min_slack >= -ORDERING_SLACK, || format!("ordering slack {min_slack:e}"))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{checked} solutions, worst max_gain {worst_gain:e}, ordering slack {min_slack:e}, {:.1?}",
        start.elapsed()
    ))
}

fn run_figure(id: &str, out: &PathBuf) -> Result<(Duration, Vec<u8>), String> {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_hotelling"))
        .args(["figure", id, "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(status.status.success(), || {
        format!("{id} failed: {}", String::from_utf8_lossy(&status.stderr))
    })?;
    Ok((elapsed, std::fs::read(out).map_err(|e| e.to_string())?))
}

fn by_gamma(rows: &[SweepRow]) -> Vec<Vec<SweepRow>> {
    let mut groups: Vec<Vec<SweepRow>> = Vec::new();
    for row in rows {
        match groups.last_mut() {
            Some(g) if g[0].gamma == row.gamma => g.push(*row),
            _ => groups.push(vec![*row]),
        }
    }
    groups
}

fn solved(row: &SweepRow) -> bool {
    matches!(row.regime, RowRegime::Corner | RowRegime::Interior)
}

fn figure_properties(id: &str, rows: &[SweepRow]) -> Result<(), String> {
    let groups = by_gamma(rows);
    let expected_gammas = if matches!(id, "fig6" | "fig7") { 3 } else { 9 };
    ensure(groups.len() == expected_gammas && groups.iter().all(|g| g.len() == 101), || {
        format!("{id}: unexpected shape {} groups", groups.len())
    })?;
    match id {
        "fig2" | "fig3" | "fig4" | "fig5" => {
            for row in rows {
                let degenerate_ok = row.regime == RowRegime::Degenerate
                    && row.gamma.is_infinite()
                    && row.t == 0.0;
                ensure(solved(row) || degenerate_ok, || format!("{id}: unsolved row {row:?}"))?;
                if let Some(d) = row.u_diff {
                    ensure(d >= -NONNEGATIVE_SLACK, || format!("{id}: negative u_diff {row:?}"))?;
                }
            }
            for k in 0..101 {
                let mut prev = f64::NEG_INFINITY;
                for row in groups.iter().map(|g| &g[k]) {
                    if let Some(d) = row.u_diff {
                        ensure(d >= prev - NONNEGATIVE_SLACK, || {
                            format!("{id}: u_diff not increasing in γ at t={}", row.t)
                        })?;
                        prev = d;
                    }
                }
            }
        }
        "fig6" | "fig7" => {
            for ((r0, r1), r2) in groups[0].iter().zip(&groups[1]).zip(&groups[2]) {
                let (a0, a1, a2) = (r0.a.unwrap(), r1.a.unwrap(), r2.a.unwrap());
                let (u0, u1, u2) = (r0.u1.unwrap(), r1.u1.unwrap(), r2.u1.unwrap());
                let t = r0.t;
                ensure(a2 <= a1 + ORDERING_SLACK && a1 <= a0 + ORDERING_SLACK, || {
                    format!("{id}: location ordering broken at t={t}: {a2} {a1} {a0}")
                })?;
                ensure(u0 <= u1 + ORDERING_SLACK && u1 <= u2 + ORDERING_SLACK, || {
                    format!("{id}: profit ordering broken at t={t}: {u0} {u1} {u2}")
                })?;
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let dir = std::env::temp_dir().join(format!("hotelling-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut tables = Vec::new();
    let mut slowest = Duration::ZERO;
    for id in ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"] {
        let (t1, first) = run_figure(id, &dir.join(format!("{id}-a.csv")))?;
        let (t2, second) = run_figure(id, &dir.join(format!("{id}-b.csv")))?;
        within(t1.max(t2), FIGURE_BUDGET).map_err(|e| format!("{id}: {e}"))?;
        slowest = slowest.max(t1).max(t2);
        ensure(first == second, || format!("{id}: runs differ"))?;
        ensure(!first.contains(&b'\r'), || format!("{id}: CR in output"))?;
        let text = String::from_utf8(first).map_err(|e| e.to_string())?;
        let rows = parse_csv(&text).map_err(|e| e.to_string())?;
        figure_properties(id, &rows)?;
        tables.push(rows);
    }
    // fig5 starts where fig3 ends.
    let (fig3, fig5) = (by_gamma(&tables[1]), by_gamma(&tables[3]));
    let mut worst = 0.0f64;
    for (g3, g5) in fig3.iter().zip(&fig5) {
        let (end, start) = (g3.last().unwrap(), &g5[0]);
        ensure(end.gamma == start.gamma && end.t == start.t, || "fig3/fig5 grids do not meet".into())?;
        worst = worst.max((end.u_diff.unwrap() - start.u_diff.unwrap()).abs());
    }
    ensure(worst <= CONTINUITY_TOL, || format!("fig3/fig5 jump {worst:e}"))?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "6 figures deterministic, properties hold, fig3/fig5 jump {worst:e}, slowest {slowest:.1?}"
    ))
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    let p = params(0.8, Gamma::ZERO);
    for (a, b) in [(0.1, 0.3), (0.25, 0.25), (0.45, 0.05)] {
        let st = original_price_stage_ne(a, b, &p).map_err(|e| e.to_string())?;
        let u = |z: &[f64]| original_profits(&StrategyProfile::new(a, b, z[0], z[1]), &p).unwrap();
        let g1 = finite_diff_gradient(|z| u(z).0, &[st.p1, st.p2], 1e-6)[0];
        let g2 = finite_diff_gradient(|z| u(z).1, &[st.p1, st.p2], 1e-6)[1];
        worst = worst.max(g1.abs()).max(g2.abs());
    }
    for t in [1.0, 1.25, 1.5, 1.75, 2.0] {
        let p = params(t, Gamma::ZERO);
        let prof = *classical_fixed_price_ne(&p).unwrap().profile().unwrap();
        let z = [prof.a, prof.b];
        let g1 = finite_diff_gradient(|z| profits_fixed_price(z[0], z[1], &p).0, &z, 1e-6)[0];
        let g2 = finite_diff_gradient(|z| profits_fixed_price(z[0], z[1], &p).1, &z, 1e-6)[1];
        worst = worst.max(g1.abs()).max(g2.abs());
    }
    ensure(worst <= FOC_TOL, || format!("FOC residual {worst:e}"))?;
    let p = params(1.0, Gamma::ZERO);
    let mut min_slope = f64::INFINITY;
    for (a, b) in scattered(50, p.half_length()) {
        let reduced = |z: &[f64]| original_price_stage_ne(z[0], z[1], &p).unwrap().u1;
        min_slope = min_slope.min(finite_diff_gradient(reduced, &[a, b], 1e-6)[0]);
    }
    ensure(min_slope > 0.0, || format!("∂u1/∂a = {min_slope} at a sampled point"))?;
    Ok(format!("max FOC residual {worst:e}, min ∂u1/∂a {min_slope:.6} over 50 points"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("gamma=0 reduction", criterion_1),
        ("paper case values", criterion_2),
        ("maximal-entanglement limit", criterion_3),
        ("threshold continuity", criterion_4),
        ("difference-formula consistency", criterion_5),
        ("cooperative-optimum equivalence", criterion_6),
        ("two-stage solver validity", criterion_7),
        ("figure reproduction", criterion_8),
        ("gradient spot-checks", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
