//! Parameter sweeps and the figure presets built on them.

use std::collections::HashMap;

use hotelling_core::numeric::linspace;
use hotelling_core::{Gamma, MarketParams};

use crate::error::CliError;
use crate::solve::{self, VerifyOptions};
use crate::table::{Model, RowRegime, SweepRow, SweepTable};

/// Transport-cost points per figure curve.
pub const FIGURE_POINTS: usize = 101;

/// Entanglement levels drawn in the fixed-price figures.
pub const FIXED_FIGURE_GAMMAS: [f64; 9] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, f64::INFINITY];

/// Parses a comma-separated list such as `0,0.5,inf`.
pub fn parse_gamma_list(s: &str) -> Result<Vec<Gamma>, CliError> {
    s.split(',')
        .map(|g| g.parse::<Gamma>().map_err(CliError::from))
        .collect()
}

/// Parses `start:end[:count]` or a single value. `count` is the number of
/// points, endpoints included; `default_count` applies when it is absent.
pub fn parse_range(s: &str, default_count: Option<usize>) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad range {s:?}, expected start:end[:count]"));
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let (start, end, count) = match parts.as_slice() {
        [v] => return Ok(vec![num(v)?]),
        [a, b] => (num(a)?, num(b)?, default_count.ok_or_else(|| {
            CliError::Usage(format!("range {s:?} needs a point count (start:end:count or --steps)"))
        })?),
        [a, b, c] => (
            num(a)?,
            num(b)?,
            c.trim().parse::<usize>().map_err(|_| bad())?,
        ),
        _ => return Err(bad()),
    };
    if count < 2 {
        return Err(CliError::Usage(format!("a range needs at least 2 points, got {count}")));
    }
    if !(start.is_finite() && end.is_finite()) || end < start {
        return Err(bad());
    }
    Ok(linspace(start, end, count))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub model: Model,
    pub base: MarketParams,
    pub gammas: Vec<Gamma>,
    pub ts: Vec<f64>,
    /// Run the oracle on every solved row.
    pub verify: Option<VerifyOptions>,
}

/// Summary of a sweep's oracle pass.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweepCheck {
    pub verified: usize,
    pub failed: usize,
    pub worst_gain: f64,
}

pub fn sweep(spec: &SweepSpec) -> Result<(SweepTable, SweepCheck), CliError> {
    let mut rows = Vec::with_capacity(spec.gammas.len() * spec.ts.len());
    let mut check = SweepCheck::default();
    // Classical two-stage profits, keyed by the bits of t.
    let mut baseline: HashMap<u64, f64> = HashMap::new();
    let mut gammas = spec.gammas.clone();
    // Classical rows first so their profits seed the differences.
    gammas.sort_by_key(|g| !g.is_classical());
    for &gamma in &gammas {
        for &t in &spec.ts {
            let params = MarketParams::new(spec.base.length, t, spec.base.price, gamma)?;
            let report = if spec.model == Model::Full {
                solve::solve_full(&params, baseline.get(&t.to_bits()).copied())?
            } else {
                solve::solve(spec.model, &params)?
            };
            let mut row = report.row;
            if spec.model == Model::Full && gamma.is_classical() {
                if let Some(u) = row.u1 {
                    baseline.insert(t.to_bits(), u);
                }
            }
            if let (Some(opts), Some(a), Some(b)) = (spec.verify, row.a, row.b) {
                let v = solve::verify_at(spec.model, &params, a, b, opts)?;
                row.max_gain = Some(v.max_gain());
                check.verified += 1;
                check.failed += usize::from(!v.passed());
                check.worst_gain = check.worst_gain.max(v.max_gain());
            }
            rows.push(row);
        }
    }
    Ok((
        SweepTable::new(spec.model, &spec.base, spec.verify.is_some(), rows),
        check,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Figure {
    /// Entangled fixed-price profits for t in [0, 1/L].
    Fig2,
    /// Entangled minus classical fixed-price profit for t in [0, 1/L].
    Fig3,
    /// Entangled fixed-price profits for t in [1/L, 2/L].
    Fig4,
    /// Entangled minus classical fixed-price profit for t in [1/L, 2/L].
    Fig5,
    /// Two-stage equilibrium locations for t in (0, 1/L].
    Fig6,
    /// Two-stage equilibrium profits for t in (0, 1/L].
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }

    /// Sweep behind the figure, at `p0 = 1`, `L = 1`.
    ///
    /// Paired figures share a sweep; one plots `u1`, the other `u_diff`
    /// (fixed price) or `a` and `u1` (two-stage).
    pub fn spec(self) -> SweepSpec {
        let base = MarketParams::default();
        let l = base.length;
        let fixed_gammas = FIXED_FIGURE_GAMMAS
            .iter()
            .map(|&g| {
                if g.is_infinite() {
                    Gamma::Infinite
                } else {
                    Gamma::Finite(g)
                }
            })
            .collect();
        let (model, gammas, ts) = match self {
            Figure::Fig2 | Figure::Fig3 => (
                Model::Fixed,
                fixed_gammas,
                linspace(0.0, 1.0 / l, FIGURE_POINTS),
            ),
            Figure::Fig4 | Figure::Fig5 => (
                Model::Fixed,
                fixed_gammas,
                linspace(1.0 / l, 2.0 / l, FIGURE_POINTS),
            ),
            Figure::Fig6 | Figure::Fig7 => (
                Model::Full,
                vec![Gamma::ZERO, Gamma::three_quarters(), Gamma::Infinite],
                (1..=FIGURE_POINTS)
                    .map(|k| k as f64 / (FIGURE_POINTS as f64 * l))
                    .collect(),
            ),
        };
        SweepSpec {
            model,
            base,
            gammas,
            ts,
            verify: None,
        }
    }
}

pub fn figure(id: Figure) -> Result<SweepTable, CliError> {
    sweep(&id.spec()).map(|(table, _)| table)
}

/// Whether a row came out of an actual solve.
pub fn solved(row: &SweepRow) -> bool {
    matches!(row.regime, RowRegime::Corner | RowRegime::Interior)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:2:5", None).unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_range("1.5", None).unwrap(), vec![1.5]);
        assert_eq!(parse_range("0:1", Some(3)).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_range("0:1", None).is_err());
        assert!(parse_range("0:1:1", None).is_err());
        assert!(parse_range("1:0:3", None).is_err());
        assert!(parse_range("a:b", Some(2)).is_err());
    }

    #[test]
    fn gamma_lists() {
        let g = parse_gamma_list("0,1,inf").unwrap();
        assert_eq!(g, vec![Gamma::ZERO, Gamma::Finite(1.0), Gamma::Infinite]);
        assert!(parse_gamma_list("0,-1").is_err());
    }

    #[test]
    fn fixed_sweep_row_count() {
        let spec = SweepSpec {
            model: Model::Fixed,
            base: MarketParams::default(),
            gammas: parse_gamma_list("0,1,inf").unwrap(),
            ts: parse_range("0.1:2.0:20", None).unwrap(),
            verify: None,
        };
        let (table, _) = sweep(&spec).unwrap();
        assert_eq!(table.rows().len(), 60);
    }
}
