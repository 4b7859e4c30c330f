//! `sbo`: build, apply and verify symmetry breaking operators from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sbo_core::coeffs::{a, alpha, b, beta};
use sbo_core::dsl::{parse_op_on, parse_rational, pretty_print, Bindings};
use sbo_core::singular::{build, verify_annihilated};
use sbo_core::{family, run_suite, Config, FamilySpec, GaussianRational, OpExpr, PolyForm, Presentation, Rational, Scalar, Sig, SUITES};
use serde_json::{json, Value};

/// Largest exit status reported by `check`.
const EXIT_CAP: usize = 100;

#[derive(Parser)]
#[command(name = "sbo", version, about = "Conformal symmetry breaking operators on differential forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    Normal,
    Geometric,
}

#[derive(Args)]
struct Common {
    /// Ambient dimension.
    #[arg(long)]
    n: usize,
    /// Evaluate at this rational value of lambda, written `num` or `num/den`.
    #[arg(long, value_parser = parse_lambda)]
    lambda: Option<Rational>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct Selector {
    /// Family type 1..=4.
    #[arg(long = "type")]
    family_type: u8,
    /// Form degree of the source.
    #[arg(long)]
    p: usize,
    /// Operator order, equal to the homogeneity of the singular vector.
    #[arg(long)]
    order: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Print the coefficients `a_j`, `b_j`, `alpha_i`, `beta_i` of order index N.
    Coeffs {
        #[command(flatten)]
        common: Common,
        /// The index N.
        #[arg(long)]
        order: u32,
    },
    /// Print a family member.
    Family {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sel: Selector,
        #[arg(long, value_enum, default_value = "normal")]
        presentation: Shape,
    },
    /// Apply a family member, or an operator written in the operator language, to a form given as JSON.
    Apply {
        #[command(flatten)]
        common: Common,
        #[arg(long = "type", requires_all = ["p", "order"], conflicts_with = "op")]
        family_type: Option<u8>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        order: Option<u32>,
        /// Operator text such as `dbar` or `d iota i_n`. It acts on R^n or on the slice R^(n-1) according to the dimension of the form.
        #[arg(long)]
        op: Option<String>,
        /// The form as JSON, or `@path` to read it from a file.
        #[arg(long)]
        form: String,
    },
    /// Build a singular vector and check that it is annihilated.
    Singular {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sel: Selector,
    },
    /// Run identity suites.  The exit status is the number of failing cases, capped.
    Check {
        /// A suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 4)]
        order_max: u32,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn parse_lambda(text: &str) -> std::result::Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn evaluated(s: &Scalar, lambda: &Option<Rational>) -> Scalar {
    match lambda {
        Some(x) => Scalar::constant(s.eval_at(&GaussianRational::real(x.clone()))),
        None => s.clone(),
    }
}

fn specialized(e: OpExpr, lambda: &Option<Rational>) -> OpExpr {
    match lambda {
        Some(x) => e.specialize(&GaussianRational::real(x.clone())),
        None => e,
    }
}

fn emit(format: Format, text: String, value: Value) -> Result<()> {
    match format {
        Format::Text => println!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value)?),
    }
    Ok(())
}

fn coeffs(common: &Common, big: u32) -> Result<()> {
    let n = common.n as i64;
    let mut table = Vec::new();
    for (name, f) in [("a", a as fn(u32, u32, i64) -> _), ("b", b), ("alpha", alpha), ("beta", beta)] {
        let values = (0..=big)
            .map(|j| f(big, j, n).map(|s| evaluated(&s, &common.lambda).to_string()))
            .collect::<sbo_core::Result<Vec<_>>>()?;
        table.push((name, values));
    }
    let text = table
        .iter()
        .flat_map(|(name, vals)| vals.iter().enumerate().map(move |(j, v)| format!("{name}_{j} = {v}")))
        .collect::<Vec<_>>()
        .join("\n");
    let value = json!({
        "n": common.n,
        "N": big,
        "lambda": common.lambda.as_ref().map_or("lambda".to_string(), |x| x.to_string()),
        "coefficients": table.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
    });
    emit(common.format, text, value)
}

fn family_of(n: usize, sel: &Selector, shape: Shape) -> Result<OpExpr> {
    let presentation = if shape == Shape::Geometric { Presentation::Geometric } else { Presentation::Normal };
    let spec = FamilySpec::new(sel.family_type, n, sel.p, sel.order, presentation);
    Ok(family(&spec)?)
}

fn read_form(arg: &str) -> Result<PolyForm> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => arg.to_string(),
    };
    let v: Value = serde_json::from_str(&text).context("form is not valid JSON")?;
    Ok(PolyForm::from_json(&v)?)
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Coeffs { common, order } => coeffs(&common, order)?,
        Command::Family { common, sel, presentation } => {
            let e = specialized(family_of(common.n, &sel, presentation)?, &common.lambda);
            emit(common.format, pretty_print(&e), e.to_json())?;
        }
        Command::Apply { common, family_type, p, order, op, form } => {
            let w = read_form(&form)?;
            let deg = w.degree().max(0);
            let source = if w.dim() == common.n {
                Sig::ambient(common.n, deg)
            } else if w.dim() + 1 == common.n {
                Sig::slice(common.n, deg)
            } else {
                bail!("form lives on R^{} but --n is {}", w.dim(), common.n);
            };
            let e = match (family_type, op) {
                (Some(t), None) => {
                    let sel = Selector { family_type: t, p: p.unwrap_or_default(), order: order.unwrap_or_default() };
                    family_of(common.n, &sel, Shape::Normal)?
                }
                (None, Some(text)) => parse_op_on(&text, source, &Bindings::new(common.n, deg as usize))?,
                _ => bail!("give either --type/--p/--order or --op"),
            };
            let e = specialized(e, &common.lambda);
            let out = e.apply(&w)?;
            emit(common.format, out.to_string(), out.to_json())?;
        }
        Command::Singular { common, sel } => {
            let v = build(sel.family_type, common.n, sel.p, sel.order)?;
            let v = match &common.lambda {
                Some(x) if v.lambda.is_none() => v.specialize(x),
                _ => v,
            };
            let report = verify_annihilated(&v)?;
            let mut value = v.to_json();
            value["annihilated"] = json!(report.passed());
            let text = format!("{}\nannihilated: {}", serde_json::to_string_pretty(&v.to_json())?, report.passed());
            emit(common.format, text, value)?;
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Check { suite, n_max, order_max, report, format } => {
            let cfg = Config { n_max, order_max };
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut reports = Vec::new();
            for name in names {
                let r = run_suite(name, &cfg)?;
                if format == Format::Text {
                    let status = if r.passed() { "PASS" } else { "FAIL" };
                    println!("{status} {:<13} {:>5} cases {:>4} failed {:>7} ms", r.suite, r.cases.len(), r.failures().count(), r.millis);
                    for f in r.failures().take(5) {
                        println!("  {} {}", f.name, f.params);
                    }
                }
                reports.push(r);
            }
            let failed: usize = reports.iter().map(|r| r.failures().count()).sum();
            let value = json!({
                "n_max": n_max,
                "order_max": order_max,
                "cases_failed": failed,
                "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            if let Some(path) = report {
                std::fs::write(&path, serde_json::to_string_pretty(&value)?).with_context(|| format!("writing {}", path.display()))?;
            }
            if format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&value)?);
            }
            return Ok(ExitCode::from(failed.min(EXIT_CAP) as u8));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
