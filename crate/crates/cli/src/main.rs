use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hotelling_cli::format::{gamma as fmt_gamma, number};
use hotelling_cli::solve::{self, Report, Verification, VerifyOptions};
use hotelling_cli::sweep::{self, parse_gamma_list, parse_range, SweepSpec};
use hotelling_cli::table::{SweepTable, HEADER};
use hotelling_cli::{CliError, Figure, Model, RowRegime};
use hotelling_core::{Gamma, MarketParams};

#[derive(Parser)]
#[command(name = "hotelling", version, about = "Equilibria of Hotelling location duopolies, classical and entangled")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Market {
    /// Market length.
    #[arg(long = "L", default_value_t = 1.0)]
    length: f64,
    /// Retail price of the fixed-price game.
    #[arg(long = "p0", default_value_t = 1.0)]
    price: f64,
}

#[derive(Args, Clone, Copy)]
struct Oracle {
    /// Points per strategy grid in the deviation check.
    #[arg(long = "grid-points")]
    grid_points: Option<usize>,
    /// Largest deviation gain still accepted.
    #[arg(long)]
    tol: Option<f64>,
}

impl From<Oracle> for VerifyOptions {
    fn from(o: Oracle) -> Self {
        VerifyOptions {
            grid_points: o.grid_points,
            tolerance: o.tol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single instance.
    Solve {
        model: Model,
        #[command(flatten)]
        market: Market,
        /// Transport cost per unit distance.
        #[arg(long)]
        t: f64,
        /// Entanglement parameter, or `inf`.
        #[arg(long, default_value = "0")]
        gamma: Gamma,
    },
    /// Solve a grid of (gamma, t) instances and write CSV.
    Sweep {
        model: Model,
        #[command(flatten)]
        market: Market,
        /// Comma-separated entanglement levels; `inf` allowed.
        #[arg(long, default_value = "0")]
        gamma: String,
        /// Transport costs as `start:end[:count]` or a single value.
        #[arg(long)]
        t: String,
        /// Point count for a `start:end` range.
        #[arg(long)]
        steps: Option<usize>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the deviation oracle on every row and add a max_gain column.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        oracle: Oracle,
    },
    /// Write the data behind one of the figures.
    Figure {
        id: Figure,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an equilibrium against unilateral deviations.
    Verify {
        model: Model,
        #[command(flatten)]
        market: Market,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value = "0")]
        gamma: Gamma,
        /// Check the locations `a,b` instead of the solver's answer.
        #[arg(long = "force-profile", value_name = "A,B")]
        force_profile: Option<String>,
        #[command(flatten)]
        oracle: Oracle,
    },
}

fn params(market: Market, t: f64, gamma: Gamma) -> Result<MarketParams, CliError> {
    Ok(MarketParams::new(market.length, t, market.price, gamma)?)
}

fn print_report(r: &Report) {
    let row = &r.row;
    println!("model              {}", r.model.as_str());
    println!("L                  {}", number(r.params.length));
    println!("p0                 {}", number(r.params.price));
    println!("t                  {}", number(row.t));
    println!("gamma              {}", fmt_gamma(row.gamma));
    println!("regime             {}", row.regime.as_str());
    if let Some(region) = r.region {
        println!("region             {region}");
    }
    let fields = ["a", "b", "p1", "p2", "u1", "u2", "u_diff"];
    for (name, value) in fields.iter().zip(row.fields()) {
        if let Some(v) = value {
            println!("{name:<18} {}", number(v));
        }
    }
    if let Some([x1, x2]) = r.coords {
        println!("x1                 {}", number(x1));
        println!("x2                 {}", number(x2));
    }
    for (name, value) in &r.diagnostics {
        println!("{name:<18} {value}");
    }
    println!();
    println!("{HEADER}");
    print!("{}", row.csv_line(false));
}

fn print_verification(v: &Verification) {
    let p = &v.profile;
    println!(
        "profile            a={} b={} p1={} p2={}",
        number(p.a),
        number(p.b),
        number(p.p1),
        number(p.p2)
    );
    println!("grid_points        {}", v.grid_points);
    println!("tolerance          {}", number(v.tolerance));
    for (name, f) in ["A", "B"].iter().zip(&v.firms) {
        println!(
            "firm {name}             max_gain={} argmax={}{} {}",
            number(f.max_gain),
            number(f.argmax.0),
            f.argmax
                .1
                .map(|p| format!(" price={}", number(p)))
                .unwrap_or_default(),
            if f.passed { "passed" } else { "failed" }
        );
    }
    println!("{}", if v.passed() { "passed" } else { "failed" });
}

fn emit(table: &SweepTable, out: Option<&Path>) -> Result<(), CliError> {
    let csv = table.to_csv();
    match out {
        Some(path) => {
            std::fs::write(path, csv)?;
            println!("{}", table.metadata());
            println!("wrote {}", path.display());
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
            eprintln!("{}", table.metadata());
        }
    }
    Ok(())
}

fn parse_pair(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("expected a,b but got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Solve {
            model,
            market,
            t,
            gamma,
        } => {
            let r = solve::solve(model, &params(market, t, gamma)?)?;
            print_report(&r);
            // Out-of-range instances are a valid answer; degenerate ones are not.
            Ok(if r.row.regime == RowRegime::Degenerate {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Sweep {
            model,
            market,
            gamma,
            t,
            steps,
            out,
            verify,
            oracle,
        } => {
            let base = params(market, 1.0, Gamma::ZERO)?;
            let ts = parse_range(&t, steps)?;
            if ts.len() == 1 && steps.is_some() {
                return Err(CliError::Usage("--steps needs a start:end range".into()));
            }
            let spec = SweepSpec {
                model,
                base,
                gammas: parse_gamma_list(&gamma)?,
                ts,
                verify: verify.then(|| oracle.into()),
            };
            let (table, check) = sweep::sweep(&spec)?;
            emit(&table, out.as_deref())?;
            if verify {
                let msg = format!(
                    "verified {} rows, {} failed, worst max_gain {}",
                    check.verified,
                    check.failed,
                    number(check.worst_gain)
                );
                if out.is_some() {
                    println!("{msg}");
                } else {
                    eprintln!("{msg}");
                }
                if check.failed > 0 {
                    return Ok(ExitCode::FAILURE);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure { id, out } => {
            let table = sweep::figure(id)?;
            emit(&table, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            model,
            market,
            t,
            gamma,
            force_profile,
            oracle,
        } => {
            let p = params(market, t, gamma)?;
            let v = match force_profile {
                Some(s) => {
                    let (a, b) = parse_pair(&s)?;
                    solve::verify_at(model, &p, a, b, oracle.into())?
                }
                None => solve::verify_solution(model, &p, oracle.into())?,
            };
            print_verification(&v);
            Ok(if v.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hotelling: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
