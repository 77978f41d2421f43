use std::process::{Command, Output};

use hotelling_cli::solve::solve;
use hotelling_cli::table::{parse_csv, HEADER};
use hotelling_cli::{Model, RowRegime};
use hotelling_core::{Gamma, MarketParams};

fn hotelling(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hotelling"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// The machine-readable part of `solve` output: header and one row.
fn solve_row(args: &[&str]) -> (Output, hotelling_cli::SweepRow) {
    let out = hotelling(args);
    let text = stdout(&out);
    let at = text.find(HEADER).expect("csv block");
    let rows = parse_csv(&text[at..]).unwrap();
    assert_eq!(rows.len(), 1);
    (out, rows[0])
}

#[test]
fn solve_classical_interior() {
    let (out, row) = solve_row(&["solve", "fixed", "--L", "1", "--p0", "1", "--t", "1.5", "--gamma", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(row.regime, RowRegime::Interior);
    let a = (2.0 + 1.5) / 9.0;
    assert!((row.a.unwrap() - a).abs() < 1e-11);
    let u = 0.5 - 1.5 * ((a - 0.25f64).powi(2) + 1.0 / 16.0);
    assert!((row.u1.unwrap() - u).abs() < 1e-11);
    assert!((row.u1.unwrap() - 0.377315).abs() < 1e-6);
}

#[test]
fn solve_maximal_entanglement() {
    let (out, row) = solve_row(&["solve", "fixed", "--L", "1", "--p0", "1", "--t", "1", "--gamma", "inf"]);
    assert!(out.status.success());
    assert_eq!((row.a, row.b), (Some(0.25), Some(0.25)));
}

#[test]
fn solve_out_of_range_exits_zero() {
    let (out, row) = solve_row(&["solve", "fixed", "--L", "1", "--t", "2.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(row.regime, RowRegime::OutOfRange);
    assert_eq!(row.u1, None);
}

#[test]
fn exit_codes() {
    assert_eq!(hotelling(&["solve", "fixed"]).status.code(), Some(2));
    assert_eq!(hotelling(&["solve", "fixed", "--t", "-1"]).status.code(), Some(2));
    assert_eq!(hotelling(&["solve", "original", "--t", "1", "--gamma", "1"]).status.code(), Some(2));
    assert_eq!(hotelling(&["figure", "fig1"]).status.code(), Some(2));
    assert_eq!(hotelling(&["sweep", "fixed", "--t", "1:0:3"]).status.code(), Some(2));
    assert_eq!(hotelling(&["solve", "fixed", "--t", "0", "--gamma", "inf"]).status.code(), Some(4));
    assert_eq!(hotelling(&["verify", "full", "--t", "2"]).status.code(), Some(4));
}

#[test]
fn sweep_row_count_and_order() {
    let out = hotelling(&["sweep", "fixed", "--gamma", "0,1,inf", "--t", "0.1:2.0:20"]);
    assert!(out.status.success());
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 60);
    let key = |r: &hotelling_cli::SweepRow| {
        let g = match r.gamma {
            Gamma::Finite(g) => g,
            Gamma::Infinite => f64::INFINITY,
        };
        (g, r.t)
    };
    assert!(rows.windows(2).all(|w| key(&w[0]) < key(&w[1])));
}

#[test]
fn sweep_zero_transport_edge() {
    let out = hotelling(&["sweep", "fixed", "--t", "0:2:5", "--gamma", "0.5,inf"]);
    let rows = parse_csv(&stdout(&out)).unwrap();
    let at_zero: Vec<_> = rows.iter().filter(|r| r.t == 0.0).collect();
    assert_eq!(at_zero[0].regime, RowRegime::Corner);
    assert_eq!(at_zero[1].regime, RowRegime::Degenerate);
    assert_eq!(at_zero[1].a, None);
}

#[test]
fn sweep_full_with_oracle() {
    let out = hotelling(&["sweep", "full", "--gamma", "0", "--t", "0.1:1.0:10", "--verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with(&format!("{HEADER},max_gain\n")));
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 10);
    for r in rows {
        assert!(r.max_gain.unwrap() <= 1e-5, "{r:?}");
    }
}

#[test]
fn verify_examples() {
    let pass = hotelling(&["verify", "fixed", "--t", "1.5", "--gamma", "0"]);
    assert_eq!(pass.status.code(), Some(0));
    assert!(stdout(&pass).trim_end().ends_with("passed"));

    let entangled = hotelling(&["verify", "fixed", "--t", "1", "--gamma", "0.693147"]);
    assert_eq!(entangled.status.code(), Some(0));
    assert!(stdout(&entangled).contains("a=0.33333"));

    let forced = hotelling(&["verify", "fixed", "--t", "1.5", "--gamma", "0", "--force-profile", "0.5,0.5"]);
    assert_eq!(forced.status.code(), Some(1));
    let text = stdout(&forced);
    assert!(text.trim_end().ends_with("failed"));
    assert!(text.contains("max_gain=0.0166"));
}

#[test]
fn csv_rows_round_trip_through_solve() {
    let out = hotelling(&["sweep", "fixed", "--gamma", "0,0.3,2,inf", "--t", "0:2:9"]);
    let mut rows = parse_csv(&stdout(&out)).unwrap();
    let full = hotelling(&["sweep", "full", "--gamma", "0,0.69314718056,inf", "--t", "0.2:1:3"]);
    let full_rows = parse_csv(&stdout(&full)).unwrap();
    let n_fixed = rows.len();
    rows.extend(full_rows);
    for (k, row) in rows.iter().enumerate() {
        let model = if k < n_fixed { Model::Fixed } else { Model::Full };
        let p = MarketParams::new(1.0, row.t, 1.0, row.gamma).unwrap();
        let again = solve(model, &p).unwrap().row;
        assert_eq!(again.regime, row.regime);
        for (x, y) in [(again.u1, row.u1), (again.u2, row.u2)] {
            match (x, y) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-9, "{row:?}"),
                (None, None) => {}
                _ => panic!("presence differs for {row:?}"),
            }
        }
    }
}

#[test]
fn output_is_deterministic() {
    let dir = std::env::temp_dir().join(format!("hotelling-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    for path in [&a, &b] {
        let out = Command::new(env!("CARGO_BIN_EXE_hotelling"))
            .args(["sweep", "full", "--gamma", "0,0.5", "--t", "0.25:1:4", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success());
        assert!(stdout(&out).contains("rows=8"));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert!(!x.contains(&b'\r'));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn original_model_sweep() {
    let out = hotelling(&["sweep", "original", "--t", "0:1:3"]);
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows[0].regime, RowRegime::Degenerate);
    assert_eq!(rows[2].regime, RowRegime::Corner);
    // Corner prices tL and profits tL²/2.
    assert_eq!(rows[2].p1, Some(1.0));
    assert_eq!(rows[2].u1, Some(0.5));
    assert_eq!(rows[2].u_diff, None);
    let v = hotelling(&["verify", "original", "--t", "1"]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}
