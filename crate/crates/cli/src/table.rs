//! Sweep rows and their CSV encoding.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::str::FromStr;

use hotelling_core::{Gamma, MarketParams};

use crate::error::CliError;
use crate::format;

pub const HEADER: &str = "gamma,t,regime,a,b,p1,p2,u1,u2,u_diff";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Model {
    /// Unit demand density, locations then prices.
    Original,
    /// Fixed retail price, linearly decaying demand.
    Fixed,
    /// Linearly decaying demand, locations then prices.
    Full,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Original => "original",
            Model::Fixed => "fixed",
            Model::Full => "full",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRegime {
    Corner,
    Interior,
    OutOfRange,
    /// The instance has no well-defined solution, e.g. zero transport cost
    /// under maximal entanglement.
    Degenerate,
}

impl RowRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            RowRegime::Corner => "corner",
            RowRegime::Interior => "interior",
            RowRegime::OutOfRange => "out_of_range",
            RowRegime::Degenerate => "degenerate",
        }
    }
}

impl FromStr for RowRegime {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "corner" => RowRegime::Corner,
            "interior" => RowRegime::Interior,
            "out_of_range" => RowRegime::OutOfRange,
            "degenerate" => RowRegime::Degenerate,
            _ => return Err(CliError::Usage(format!("unknown regime {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub gamma: Gamma,
    pub t: f64,
    pub regime: RowRegime,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub u1: Option<f64>,
    pub u2: Option<f64>,
    pub u_diff: Option<f64>,
    /// Largest profitable deviation found by the oracle, when verified.
    pub max_gain: Option<f64>,
}

impl SweepRow {
    pub fn empty(gamma: Gamma, t: f64, regime: RowRegime) -> Self {
        SweepRow {
            gamma,
            t,
            regime,
            a: None,
            b: None,
            p1: None,
            p2: None,
            u1: None,
            u2: None,
            u_diff: None,
            max_gain: None,
        }
    }

    fn key(&self) -> (f64, f64) {
        let g = match self.gamma {
            Gamma::Finite(g) => g,
            Gamma::Infinite => f64::INFINITY,
        };
        (g, self.t)
    }

    pub fn fields(&self) -> [Option<f64>; 7] {
        [self.a, self.b, self.p1, self.p2, self.u1, self.u2, self.u_diff]
    }

    /// The row as one CSV line, newline included.
    pub fn csv_line(&self, with_gain: bool) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{},{},{}",
            format::gamma(self.gamma),
            format::number(self.t),
            self.regime.as_str()
        );
        for f in self.fields() {
            out.push(',');
            out.push_str(&format::optional(f));
        }
        if with_gain {
            out.push(',');
            out.push_str(&format::optional(self.max_gain));
        }
        out.push('\n');
        out
    }
}

fn compare(a: &SweepRow, b: &SweepRow) -> Ordering {
    let (ka, kb) = (a.key(), b.key());
    ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
}

/// Rows of one sweep plus the settings they were produced with.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub model: Model,
    pub length: f64,
    pub price: f64,
    pub verified: bool,
    rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new(model: Model, params: &MarketParams, verified: bool, mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by(compare);
        SweepTable {
            model,
            length: params.length,
            price: params.price,
            verified,
            rows,
        }
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(HEADER);
        if self.verified {
            out.push_str(",max_gain");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line(self.verified));
        }
        out
    }

    /// One-line description of the settings, for the terminal.
    pub fn metadata(&self) -> String {
        format!(
            "hotelling {} model={} L={} p0={} rows={}",
            env!("CARGO_PKG_VERSION"),
            self.model.as_str(),
            format::number(self.length),
            format::number(self.price),
            self.rows.len()
        )
    }
}

fn parse_field(s: &str) -> Result<Option<f64>, CliError> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| CliError::Usage(format!("bad number {s:?}")))
}

/// Parses CSV produced by [`SweepTable::to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if !header.starts_with(HEADER) {
        return Err(CliError::Usage(format!("unexpected header {header:?}")));
    }
    lines
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() < 10 {
                return Err(CliError::Usage(format!("short row {line:?}")));
            }
            let gamma: Gamma = cols[0].parse()?;
            let t = parse_field(cols[1])?.ok_or_else(|| CliError::Usage("missing t".into()))?;
            let mut row = SweepRow::empty(gamma, t, cols[2].parse()?);
            let v: Vec<Option<f64>> = cols[3..10]
                .iter()
                .map(|c| parse_field(c))
                .collect::<Result<_, _>>()?;
            (row.a, row.b, row.p1, row.p2, row.u1, row.u2, row.u_diff) =
                (v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
            if let Some(g) = cols.get(10) {
                row.max_gain = parse_field(g)?;
            }
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_sort_with_infinity_last() {
        let p = MarketParams::default();
        let rows = vec![
            SweepRow::empty(Gamma::Infinite, 0.1, RowRegime::Corner),
            SweepRow::empty(Gamma::Finite(1.0), 0.5, RowRegime::Corner),
            SweepRow::empty(Gamma::Finite(1.0), 0.2, RowRegime::Corner),
            SweepRow::empty(Gamma::ZERO, 2.0, RowRegime::Corner),
        ];
        let table = SweepTable::new(Model::Fixed, &p, false, rows);
        let keys: Vec<_> = table.rows().iter().map(|r| (r.gamma, r.t)).collect();
        assert_eq!(
            keys,
            vec![
                (Gamma::ZERO, 2.0),
                (Gamma::Finite(1.0), 0.2),
                (Gamma::Finite(1.0), 0.5),
                (Gamma::Infinite, 0.1)
            ]
        );
    }

    #[test]
    fn csv_round_trip() {
        let p = MarketParams::default();
        let mut row = SweepRow::empty(Gamma::Infinite, 1.0, RowRegime::Interior);
        row.a = Some(0.25);
        row.u1 = Some(1.0 / 3.0);
        let table = SweepTable::new(Model::Fixed, &p, true, vec![row]);
        let csv = table.to_csv();
        assert_eq!(
            csv,
            "gamma,t,regime,a,b,p1,p2,u1,u2,u_diff,max_gain\ninf,1,interior,0.25,,,,0.333333333333,,,\n"
        );
        let back = parse_csv(&csv).unwrap();
        assert_eq!(back[0].a, Some(0.25));
        assert_eq!(back[0].b, None);
        assert_eq!(back[0].gamma, Gamma::Infinite);
    }
}
