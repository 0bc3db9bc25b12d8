//! capbound: certified capacity bounds for 1D and 2D constrained systems.
//!
//! Exit codes: 0 success, 2 usage error, 3 size guard exceeded,
//! 4 soundness (symmetry) gate failure.

use capbound::bounds::{
    cw_upper_bound, finite_count_upper, lower_bound, optimize_lower_bound, strip_upper_bound,
    Constraint2D, LowerParams,
};
use capbound::error::CapError;
use capbound::oracle;
use capbound::phi::{MaxEntropicParams, PhiTable};
use capbound::presets::{constraint_1d, constraint_2d};
use capbound::report::{round_directed, BoundReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "capbound", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Clone, Copy, ValueEnum)]
enum UpperMethod {
    Strip,
    Cw,
    Finite,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bound on the capacity of a 2D constraint
    Lower(LowerArgs),
    /// Upper bound on the capacity of a 2D constraint
    Upper(UpperArgs),
    /// Exact capacities of the chg2 / odd families
    Exact {
        #[arg(long)]
        family: String,
        #[arg(long)]
        dim: u32,
    },
    /// Exact array counts by brute force
    Count(CountArgs),
    /// Batch bound runs from a CSV spec file
    Table {
        /// CSV rows: constraint,delta,mu,alpha,p,q,phi
        #[arg(long)]
        spec: String,
        /// worker threads (default: rayon's choice)
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct LowerArgs {
    #[arg(long)]
    constraint: String,
    #[arg(long)]
    mu: usize,
    #[arg(long)]
    alpha: usize,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    q: usize,
    /// phi selection: maxent | ones | optimize | file:PATH
    #[arg(long, default_value = "maxent")]
    phi: String,
    /// delta for the max-entropic heuristic
    #[arg(long, default_value_t = 0)]
    delta: usize,
    /// evaluation budget for --phi optimize
    #[arg(long, default_value_t = 120)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// relative eigenvalue certificate tolerance
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args)]
struct UpperArgs {
    #[arg(long)]
    constraint: String,
    #[arg(long, value_enum)]
    method: UpperMethod,
    /// strip width for --method strip
    #[arg(long)]
    n: Option<usize>,
    /// half-width for --method cw (widths 2k and 2k+2p)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// dimensions for --method finite
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    constraint: String,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// isotropic dimension (uses a 1D constraint token)
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
}

fn exit_code(e: &CapError) -> i32 {
    match e {
        CapError::SizeGuard { .. } => 3,
        CapError::SymmetryGate(_) | CapError::PhiAnnihilatesStrip => 4,
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn run(cli: Cli) -> Result<(), CapError> {
    match cli.command {
        Command::Lower(args) => {
            let c = constraint_2d(&args.constraint)?;
            let (report, _) = run_lower(&c, &args)?;
            emit(&report, args.format, true);
            Ok(())
        }
        Command::Upper(args) => {
            let c = constraint_2d(&args.constraint)?;
            let report = match args.method {
                UpperMethod::Strip => {
                    let n = args.n.ok_or_else(|| {
                        CapError::InvalidParams("--method strip needs --n".into())
                    })?;
                    strip_upper_bound(&c, n, args.tol)?
                }
                UpperMethod::Cw => {
                    let k = args
                        .k
                        .ok_or_else(|| CapError::InvalidParams("--method cw needs --k".into()))?;
                    cw_upper_bound(&c, k, args.p, args.tol)?
                }
                UpperMethod::Finite => {
                    let (m, n) = match (args.rows, args.cols) {
                        (Some(m), Some(n)) => (m, n),
                        _ => {
                            return Err(CapError::InvalidParams(
                                "--method finite needs --rows and --cols".into(),
                            ))
                        }
                    };
                    finite_count_upper(&c, m, n)?
                }
            };
            emit(&report, args.format, false);
            Ok(())
        }
        Command::Exact { family, dim } => {
            let r = oracle::exact_capacity(&family, dim)?;
            println!("{}", r.as_f64());
            Ok(())
        }
        Command::Count(args) => {
            let count = match (args.rows, args.cols, args.dim, args.n) {
                (Some(m), Some(n), None, None) => {
                    let c = constraint_2d(&args.constraint)?;
                    oracle::count_arrays_2d(&c.original, m, n)?
                }
                (None, None, Some(d), Some(n)) => {
                    let c = constraint_1d(&args.constraint)?;
                    oracle::count_arrays_isotropic(&c, d, n)?
                }
                _ => {
                    return Err(CapError::InvalidParams(
                        "count needs either --rows/--cols (2D) or --dim/--n (isotropic)".into(),
                    ))
                }
            };
            println!("{}", count.count);
            Ok(())
        }
        Command::Table { spec, jobs } => run_table(&spec, jobs),
    }
}

fn parse_phi(c: &Constraint2D, args: &LowerArgs) -> Result<(PhiTable, Option<usize>), CapError> {
    let lp = MaxEntropicParams {
        delta: args.delta,
        mu: args.mu,
        alpha: args.alpha,
    };
    match args.phi.as_str() {
        "maxent" => Ok((c.max_entropic(lp)?, Some(args.delta))),
        "ones" => Ok((c.ones_phi(args.mu, args.alpha)?, None)),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CapError::Parse(format!("{path}: {e}")))?;
                let ve = c.ve_names()?;
                Ok((PhiTable::from_text(args.mu, args.alpha, ve, &text)?, None))
            } else {
                Err(CapError::InvalidParams(format!(
                    "unknown phi mode {other}; use maxent | ones | optimize | file:PATH"
                )))
            }
        }
    }
}

fn run_lower(c: &Constraint2D, args: &LowerArgs) -> Result<(BoundReport, PhiTable), CapError> {
    let lp = LowerParams {
        mu: args.mu,
        alpha: args.alpha,
        p: args.p,
        q: args.q,
        delta: None,
    };
    if args.phi == "optimize" {
        let init = c.max_entropic(MaxEntropicParams {
            delta: args.delta,
            mu: args.mu,
            alpha: args.alpha,
        })?;
        let (phi, report, _) = optimize_lower_bound(c, lp, &init, args.budget, args.seed)?;
        return Ok((report, phi));
    }
    let (phi, delta) = parse_phi(c, args)?;
    let report = lower_bound(c, LowerParams { delta, ..lp }, &phi, args.tol)?;
    Ok((report, phi))
}

fn emit(report: &BoundReport, format: Format, lower: bool) {
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Plain => println!(
            "{} {} bound={}",
            report.method,
            report.constraint,
            round_directed(report.bound, 10, lower)
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let p = &report.params;
            let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                "constraint",
                "method",
                "mu",
                "alpha",
                "p",
                "q",
                "delta",
                "bound",
            ])
            .and_then(|_| {
                w.write_record([
                    report.constraint.clone(),
                    report.method.clone(),
                    opt(p.mu),
                    opt(p.alpha),
                    opt(p.p),
                    opt(p.q),
                    opt(p.delta),
                    round_directed(report.bound, 10, lower),
                ])
            })
            .and_then(|_| w.flush().map_err(csv::Error::from))
            .expect("stdout");
        }
    }
}

struct TableRow {
    constraint: String,
    delta: usize,
    mu: usize,
    alpha: usize,
    p: usize,
    q: usize,
    phi: String,
}

fn run_table(spec_path: &str, jobs: Option<usize>) -> Result<(), CapError> {
    if let Some(j) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .ok();
    }
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| CapError::Parse(format!("{spec_path}: {e}")))?;
    let mut rows: Vec<TableRow> = Vec::new();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(text.as_bytes());
    for record in reader.records() {
        let r = record.map_err(|e| CapError::Parse(e.to_string()))?;
        if r.len() != 7 {
            return Err(CapError::Parse(format!(
                "table rows need 7 fields (constraint,delta,mu,alpha,p,q,phi), got {}",
                r.len()
            )));
        }
        let num = |i: usize| -> Result<usize, CapError> {
            r[i].trim()
                .parse()
                .map_err(|_| CapError::Parse(format!("bad number {:?}", &r[i])))
        };
        rows.push(TableRow {
            constraint: r[0].trim().to_string(),
            delta: num(1)?,
            mu: num(2)?,
            alpha: num(3)?,
            p: num(4)?,
            q: num(5)?,
            phi: r[6].trim().to_string(),
        });
    }

    let results: Vec<(TableRow, Result<(String, String), CapError>)> = rows
        .into_par_iter()
        .map(|row| {
            let out = table_row(&row);
            (row, out)
        })
        .collect();

    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record([
        "constraint",
        "delta",
        "mu",
        "alpha",
        "p",
        "q",
        "phi",
        "bound",
        "cw_baseline",
        "error",
    ])
    .map_err(|e| CapError::Parse(e.to_string()))?;
    for (row, out) in results {
        let (bound, baseline, err) = match out {
            Ok((b, c)) => (b, c, String::new()),
            Err(e) => (String::new(), String::new(), e.to_string()),
        };
        w.write_record([
            row.constraint,
            row.delta.to_string(),
            row.mu.to_string(),
            row.alpha.to_string(),
            row.p.to_string(),
            row.q.to_string(),
            row.phi,
            bound,
            baseline,
            err,
        ])
        .map_err(|e| CapError::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| CapError::Parse(e.to_string()))?;
    Ok(())
}

fn table_row(row: &TableRow) -> Result<(String, String), CapError> {
    let c = constraint_2d(&row.constraint)?;
    let lp = LowerParams {
        mu: row.mu,
        alpha: row.alpha,
        p: row.p,
        q: row.q,
        delta: Some(row.delta),
    };
    let report = match row.phi.as_str() {
        "maxent" => {
            let phi = c.max_entropic(MaxEntropicParams {
                delta: row.delta,
                mu: row.mu,
                alpha: row.alpha,
            })?;
            lower_bound(&c, lp, &phi, 1e-12)?
        }
        "ones" => {
            let phi = c.ones_phi(row.mu, row.alpha)?;
            lower_bound(&c, LowerParams { delta: None, ..lp }, &phi, 1e-12)?
        }
        other => {
            let mut parts = other.split(':');
            if parts.next() != Some("optimize") {
                return Err(CapError::InvalidParams(format!("unknown phi mode {other}")));
            }
            let budget = parts
                .next()
                .map(|s| s.parse().map_err(|_| CapError::Parse("bad budget".into())))
                .transpose()?
                .unwrap_or(120);
            let seed = parts
                .next()
                .map(|s| s.parse().map_err(|_| CapError::Parse("bad seed".into())))
                .transpose()?
                .unwrap_or(0);
            let init = c.max_entropic(MaxEntropicParams {
                delta: row.delta,
                mu: row.mu,
                alpha: row.alpha,
            })?;
            optimize_lower_bound(&c, lp, &init, budget, seed)?.1
        }
    };
    let baseline = lower_bound(
        &c,
        LowerParams { delta: None, ..lp },
        &c.ones_phi(row.mu, row.alpha)?,
        1e-12,
    )?;
    Ok((
        round_directed(report.bound, 10, true),
        round_directed(baseline.bound, 10, true),
    ))
}
