use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use deltadyn::json::{basis_json, delta_flow_json};
use deltadyn::numeric::{default_kinds, lambert_grid, lambert_residual};
use deltadyn::parse::{parse_map, parse_op, parse_polynomial};
use deltadyn::solver::ForwardSolver;
use deltadyn::verify::{parse_groups, run, summary_json, VerifyConfig};
use deltadyn::{
    delta_flow, iterate, numeric_closed_form_check, BasicSequence, GaussianRational, NumericConfig,
    Rational, Scalar, XSeries,
};

#[derive(Parser)]
#[command(name = "deltadyn", version, about = "Exact flows of autonomous delta-type systems QΦ = f(Φ)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve y_{n+1} = g(y_n) in closed form and/or by iteration
    Solve(SolveArgs),
    /// Coefficients of the delta flow of f, monomial and basic forms
    Flow(FlowArgs),
    /// The basic sequence of a delta operator as a β matrix
    Basis(BasisArgs),
    /// Run the exact invariant suite
    Verify(VerifyArgs),
    /// Floating-point checks of the exponential closed forms
    Numcheck(NumcheckArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Field {
    #[value(name = "Q")]
    Q,
    #[value(name = "Qi")]
    Qi,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Closed,
    Iterate,
    Both,
}

#[derive(Args)]
struct SolveArgs {
    /// `logistic:μ`, `quadratic:c` or a polynomial in x
    #[arg(long)]
    map: String,
    #[arg(long)]
    x0: String,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long, value_enum, default_value = "Q")]
    field: Field,
    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct FlowArgs {
    /// Generator f as a polynomial in x
    #[arg(long = "gen", conflicts_with = "map", required_unless_present = "map")]
    generator: Option<String>,
    /// A map g; the generator is g − x
    #[arg(long)]
    map: Option<String>,
    #[arg(long, default_value = "forward")]
    op: String,
    #[arg(long, default_value_t = 10)]
    order: usize,
    #[arg(long, value_enum, default_value = "Q")]
    field: Field,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct BasisArgs {
    #[arg(long, default_value = "forward")]
    op: String,
    #[arg(long, default_value_t = 16)]
    depth: usize,
    #[arg(long, value_enum, default_value = "Q")]
    field: Field,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    order: usize,
    #[arg(long, default_value_t = 16)]
    depth: usize,
    /// `all` or a comma-separated list of core, autonomous, umbral,
    /// deltaflow, solver, numeric
    #[arg(long, default_value = "all")]
    ops: String,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct NumcheckArgs {
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Terms in each partial sum
    #[arg(long, default_value_t = 64)]
    depth: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => match a.field {
            Field::Q => solve::<Rational>(&a),
            Field::Qi => solve::<GaussianRational>(&a),
        },
        Command::Flow(a) => match a.field {
            Field::Q => flow::<Rational>(&a),
            Field::Qi => flow::<GaussianRational>(&a),
        },
        Command::Basis(a) => match a.field {
            Field::Q => basis::<Rational>(&a),
            Field::Qi => basis::<GaussianRational>(&a),
        },
        Command::Verify(a) => verify(&a),
        Command::Numcheck(a) => numcheck(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether every closed value matched its iterate.
fn solve<F: Scalar>(a: &SolveArgs) -> Result<bool> {
    let g: XSeries<F> = parse_map(&a.map).with_context(|| format!("parsing map `{}`", a.map))?;
    let x0 = F::parse_exact(&a.x0).with_context(|| format!("parsing x0 `{}`", a.x0))?;
    let closed = match a.mode {
        Mode::Iterate => None,
        _ => {
            let solver = ForwardSolver::new(&g, a.steps)?;
            Some((0..=a.steps).map(|n| solver.solve(&x0, n)).collect::<deltadyn::Result<Vec<F>>>()?)
        }
    };
    let iterated = match a.mode {
        Mode::Closed => None,
        _ => Some(iterate(&g, &x0, a.steps)?),
    };
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 0..=a.steps {
        let c = closed.as_ref().map(|v| v[n].clone());
        let i = iterated.as_ref().map(|v| v[n].clone());
        let equal = match (&c, &i) {
            (Some(c), Some(i)) => Some(c == i),
            _ => None,
        };
        ok &= equal != Some(false);
        rows.push((n, c, i, equal));
    }
    match a.format {
        Format::Csv => {
            let mut header = vec!["n"];
            if closed.is_some() {
                header.push("closed");
            }
            if iterated.is_some() {
                header.push("iterated");
            }
            if a.mode == Mode::Both {
                header.push("equal");
            }
            println!("{}", header.join(","));
            for (n, c, i, eq) in &rows {
                let mut cols = vec![n.to_string()];
                cols.extend(c.iter().map(ToString::to_string));
                cols.extend(i.iter().map(ToString::to_string));
                cols.extend(eq.iter().map(ToString::to_string));
                println!("{}", cols.join(","));
            }
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(n, c, i, eq)| {
                    json!({
                        "n": n,
                        "closed": c.as_ref().map(ToString::to_string),
                        "iterated": i.as_ref().map(ToString::to_string),
                        "equal": eq,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&json!({ "map": a.map, "x0": a.x0, "rows": rows }))?);
        }
    }
    if !ok {
        eprintln!("closed form and iteration disagree");
    }
    Ok(ok)
}

fn flow<F: Scalar>(a: &FlowArgs) -> Result<bool> {
    let f: XSeries<F> = match (&a.generator, &a.map) {
        (Some(gen), _) => parse_polynomial(gen).with_context(|| format!("parsing generator `{gen}`"))?,
        (None, Some(map)) => &parse_map::<F>(map).with_context(|| format!("parsing map `{map}`"))? - &XSeries::x(),
        (None, None) => bail!("one of --gen or --map is required"),
    };
    let op = parse_op::<F>(&a.op, a.order)?;
    let phi = delta_flow(&f, &op, a.order)?;
    // monomial form first, then basic
    let forms = delta_flow_json(&phi);
    match a.format {
        Format::Json => println!("{}", serde_json::to_string(&forms)?),
        Format::Csv => {
            println!("form,n,coeffs");
            for (form, m) in ["monomial", "basic"].into_iter().zip(&forms) {
                for (n, row) in m.coeffs.iter().enumerate() {
                    println!("{form},{n},{}", row.join(" "));
                }
            }
        }
    }
    Ok(true)
}

fn basis<F: Scalar>(a: &BasisArgs) -> Result<bool> {
    let op = parse_op::<F>(&a.op, a.depth)?;
    let b = BasicSequence::generate(&op, a.depth)?;
    let m = basis_json(&b);
    match a.format {
        Format::Json => println!("{}", serde_json::to_string(&m)?),
        Format::Csv => {
            for row in &m.coeffs {
                println!("{}", row.join(","));
            }
        }
    }
    Ok(true)
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    let cfg = VerifyConfig { order: a.order, depth: a.depth, seed: a.seed, groups: parse_groups(&a.ops)? };
    let reports = run(&cfg);
    match a.format {
        Format::Json => println!("{}", summary_json(&cfg, &reports)),
        Format::Csv => {
            println!("group,name,passed,residual,detail");
            for r in &reports {
                println!("{},{},{},{:e},\"{}\"", r.group, r.name, r.passed, r.residual, r.detail.replace('"', "'"));
            }
        }
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn numcheck(a: &NumcheckArgs) -> Result<bool> {
    let cfg = NumericConfig { tolerance: a.tolerance, depth: a.depth, ..NumericConfig::default() };
    cfg.validate()?;
    let (zero, one) = (Rational::from_i64(0), Rational::from_i64(1));
    let mut ok = true;
    let mut rows = Vec::new();
    for kind in default_kinds(&cfg) {
        for (sa, st) in &cfg.samples {
            let row = match numeric_closed_form_check(&kind, sa, &zero, st, &one, &cfg) {
                Ok(r) => {
                    let pass = r.within(cfg.tolerance);
                    ok &= pass;
                    json!({ "kind": r.kind, "a": sa.to_string(), "t": st.to_string(), "partial_sum": r.partial_sum,
                            "closed_form": r.closed_form, "deviation": r.deviation, "passed": pass })
                }
                Err(e) => {
                    ok = false;
                    json!({ "kind": kind.name(), "a": sa.to_string(), "t": st.to_string(), "error": e.to_string(),
                            "passed": false })
                }
            };
            rows.push(row);
        }
    }
    let lambert = lambert_grid()
        .into_iter()
        .map(lambert_residual)
        .collect::<deltadyn::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ok &= lambert < 1e-12;
    match a.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "tolerance": cfg.tolerance, "checks": rows, "lambert_max_residual": lambert }))?
        ),
        Format::Csv => {
            println!("kind,a,t,deviation,passed");
            for r in &rows {
                println!("{},{},{},{},{}", r["kind"].as_str().unwrap_or(""), r["a"].as_str().unwrap_or(""),
                    r["t"].as_str().unwrap_or(""), r["deviation"], r["passed"]);
            }
            println!("lambert,,,{lambert:e},{}", lambert < 1e-12);
        }
    }
    Ok(ok)
}
