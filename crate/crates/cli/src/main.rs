use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use hypermin::arith::{factorize, val_p, FactoredInteger};
use hypermin::curve::{MobiusChange, PointedEquation, WeierstrassEquation};
use hypermin::localize::{local_verdict, LocalModel, LocalReport, MinimalityStatus, Witness};
use hypermin::minimize::{minimize_with, AssemblyMode};
use hypermin::oracle::bfs_local_min;
use hypermin::pointed::minimize_pointed_with;
use hypermin::zpoly::ZPoly;
use hypermin::Error;

#[derive(Parser)]
#[command(name = "hypermin", version, about = "Minimal Weierstrass equations of hyperelliptic curves over Z")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factored discriminant of the equation.
    Disc(CurveArgs),
    /// Globally minimal (or pointed-minimal) equation.
    Minimize {
        #[command(flatten)]
        curve: CurveArgs,
        /// Treat the input as a pointed equation and allow only x = u^2 x1 + c.
        #[arg(long)]
        pointed: bool,
        #[arg(long, value_enum, default_value_t = Assembly::SmallT)]
        assembly: Assembly,
    },
    /// Local minimality and uniqueness at one prime.
    Check {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        prime: BigInt,
    },
    /// Normal model at one prime.
    Normalize {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        prime: BigInt,
    },
    /// Compare minimize against a brute-force search at one prime.
    Verify {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        prime: BigInt,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, required_unless_present = "stdin")]
    genus: Option<usize>,
    /// Coefficients of Q, constant term first; empty for Q = 0.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Coefficients of P, constant term first.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "stdin")]
    p: Option<String>,
    /// Known primes dividing the discriminant.
    #[arg(long)]
    factors: Option<String>,
    /// Read {"genus", "q", "p", "factors"} as JSON from standard input.
    #[arg(long)]
    stdin: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Assembly {
    SmallT,
    ExactM,
}

enum Failure {
    Lib(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Lib(e) => match e {
                Error::FactorizationIncomplete(_) => 3,
                Error::OracleTimeout(_) => 4,
                Error::Internal(_) => 1,
                _ => 2,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Input(_) => "parse",
            Failure::Lib(e) => match e {
                Error::FactorizationIncomplete(_) => "incomplete-factorization",
                Error::OracleTimeout(_) => "oracle-timeout",
                Error::SingularCurve => "singular",
                Error::PointedShape(_) => "pointed-shape",
                Error::DegreeMismatch(_) => "degree",
                Error::InvalidArgument(_) => "invalid-argument",
                Error::Internal(_) => "internal",
                _ => "invalid",
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(s) => s.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

struct Input {
    eq: WeierstrassEquation,
    hints: Vec<BigInt>,
}

fn parse_list(s: &str, what: &str) -> Result<Vec<BigInt>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigInt>().map_err(|_| Failure::Input(format!("{what}: cannot parse '{t}' as an integer"))))
        .collect()
}

fn json_list(v: Option<&Value>, what: &str) -> Result<Vec<BigInt>, Failure> {
    match v {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::String(s)) => parse_list(s, what),
        Some(Value::Array(items)) => items
            .iter()
            .map(|x| {
                let t = match x {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(Failure::Input(format!("{what}: expected integers"))),
                };
                t.trim().parse::<BigInt>().map_err(|_| Failure::Input(format!("{what}: cannot parse '{t}' as an integer")))
            })
            .collect(),
        Some(_) => Err(Failure::Input(format!("{what}: expected a list or a comma-separated string"))),
    }
}

fn read_input(args: &CurveArgs) -> Result<Input, Failure> {
    let (g, q, p, hints) = if args.stdin {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        let v: Value = serde_json::from_str(&buf).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        let g = v
            .get("genus")
            .and_then(Value::as_u64)
            .ok_or_else(|| Failure::Input("stdin: missing integer field 'genus'".into()))?;
        (g as usize, json_list(v.get("q"), "q")?, json_list(v.get("p"), "p")?, json_list(v.get("factors"), "factors")?)
    } else {
        let g = args.genus.ok_or_else(|| Failure::Input("--genus is required".into()))?;
        let q = parse_list(args.q.as_deref().unwrap_or(""), "q")?;
        let p = parse_list(args.p.as_deref().unwrap_or(""), "p")?;
        let hints = parse_list(args.factors.as_deref().unwrap_or(""), "factors")?;
        (g, q, p, hints)
    };
    let eq = WeierstrassEquation::new(g, ZPoly::new(q), ZPoly::new(p))?;
    Ok(Input { eq, hints })
}

fn coeffs_json(h: &ZPoly) -> Value {
    Value::Array(h.coeffs().iter().map(|a| Value::String(a.to_string())).collect())
}

fn number(n: &BigInt) -> Value {
    serde_json::from_str(&n.to_string()).expect("integer literal is valid JSON")
}

fn disc_json(f: &FactoredInteger) -> Value {
    json!({
        "sign": f.sign,
        "factors": f.factors.iter().map(|(p, e)| json!([number(p), e])).collect::<Vec<_>>(),
        "cofactor": f.cofactor.to_string(),
    })
}

fn disc_text(f: &FactoredInteger) -> String {
    let factors = f.factors.iter().map(|(p, e)| format!("{p}^{e}")).collect::<Vec<_>>().join("*");
    format!("sign={} factors={} cofactor={}", f.sign, if factors.is_empty() { "1".into() } else { factors }, f.cofactor)
}

fn change_json(ch: &MobiusChange) -> Value {
    let m = &ch.m;
    json!({
        "matrix": [[m.a.to_string(), m.b.to_string()], [m.c.to_string(), m.d.to_string()]],
        "e": ch.e.to_string(),
        "h": coeffs_json(&ch.h),
    })
}

fn reports_json(reports: &[LocalReport]) -> Value {
    reports
        .iter()
        .map(|r| {
            json!({
                "prime": number(&r.p),
                "epsilon": r.epsilon,
                "v_before": r.v_delta_before,
                "v_after": r.v_delta_after,
            })
        })
        .collect()
}

fn equation_json(eq: &WeierstrassEquation) -> serde_json::Map<String, Value> {
    let mut out = serde_json::Map::new();
    out.insert("genus".into(), json!(eq.g));
    out.insert("q".into(), coeffs_json(&eq.q));
    out.insert("p".into(), coeffs_json(&eq.p));
    out
}

fn text_from_json(v: &Value, prefix: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                if k == "disc" {
                    continue;
                }
                text_from_json(x, &key, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object()) => {
            let flat: Vec<String> = items.iter().map(|x| compact(x)).collect();
            out.push(format!("{prefix}: [{}]", flat.join(", ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                text_from_json(x, &format!("{prefix}[{i}]"), out);
            }
        }
        other => out.push(format!("{prefix}: {}", compact(other))),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(compact).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn emit(doc: Value, disc: Option<&FactoredInteger>, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&doc).expect("serializable")),
        Format::Text => {
            let mut lines = Vec::new();
            text_from_json(&doc, "", &mut lines);
            if let Some(f) = disc {
                lines.push(format!("disc: {}", disc_text(f)));
            }
            for l in lines {
                println!("{l}");
            }
        }
    }
}

fn status_name(s: MinimalityStatus) -> &'static str {
    match s {
        MinimalityStatus::NotMinimal => "not_minimal",
        _ => "minimal",
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Disc(args) => {
            let input = read_input(&args)?;
            let f = factorize(&input.eq.discriminant(), &input.hints);
            let mut doc = equation_json(&input.eq);
            doc.insert("disc".into(), disc_json(&f));
            emit(Value::Object(doc), Some(&f), args.format);
            if !f.is_complete() {
                return Err(Error::FactorizationIncomplete(f.cofactor).into());
            }
        }
        Command::Minimize { curve, pointed, assembly } => {
            let input = read_input(&curve)?;
            let mode = match assembly {
                Assembly::SmallT => AssemblyMode::SmallT,
                Assembly::ExactM => AssemblyMode::ExactM,
            };
            if pointed {
                let eq = PointedEquation::try_from(input.eq)?;
                let res = minimize_pointed_with(&eq, &input.hints, mode)?;
                let g = eq.equation().g;
                let mut doc = equation_json(res.eq_min.equation());
                let mut change = change_json(&res.change.to_mobius(g));
                change["u"] = Value::String(res.change.u.to_string());
                change["c"] = Value::String(res.change.c.to_string());
                doc.insert("change".into(), change);
                doc.insert("disc".into(), disc_json(&res.delta_min));
                doc.insert("reports".into(), reports_json(&res.reports));
                emit(Value::Object(doc), Some(&res.delta_min), curve.format);
            } else {
                let res = minimize_with(&input.eq, &input.hints, mode)?;
                let mut doc = equation_json(&res.eq_min);
                doc.insert("change".into(), change_json(&res.change));
                doc.insert("disc".into(), disc_json(&res.delta_min));
                doc.insert("reports".into(), reports_json(&res.reports));
                emit(Value::Object(doc), Some(&res.delta_min), curve.format);
            }
        }
        Command::Check { curve, prime } => {
            let input = read_input(&curve)?;
            let verdict = local_verdict(&input.eq, &prime)?;
            let mut doc = json!({
                "prime": number(&prime),
                "status": status_name(verdict.status),
                "unique": verdict.status == MinimalityStatus::MinimalUnique,
            });
            match verdict.witness {
                Some(Witness::Point { point, lambda }) => {
                    doc["witness"] = json!({ "point": point.to_string(), "lambda": lambda });
                }
                Some(Witness::Normalization { v_drop }) => {
                    doc["witness"] = json!({ "normalization_drop": v_drop });
                }
                None => {}
            }
            emit(doc, None, curve.format);
        }
        Command::Normalize { curve, prime } => {
            let input = read_input(&curve)?;
            let (model, v_drop) = LocalModel::normalize(&input.eq, &prime)?;
            let mut doc = json!({
                "prime": number(&prime),
                "epsilon": model.epsilon(),
                "v_drop": v_drop,
            });
            match &model {
                LocalModel::Even { q, p } => {
                    doc["q"] = coeffs_json(q);
                    doc["p"] = coeffs_json(p);
                }
                LocalModel::Odd { f, .. } => doc["f"] = coeffs_json(f),
            }
            emit(doc, None, curve.format);
        }
        Command::Verify { curve, prime, depth } => {
            let input = read_input(&curve)?;
            let oracle = bfs_local_min(&input.eq, &prime, depth)?;
            let res = minimize_with(&input.eq, &input.hints, AssemblyMode::SmallT)?;
            let v_min = val_p(&res.eq_min.discriminant(), &prime).finite().unwrap_or(0);
            let doc = json!({
                "prime": number(&prime),
                "depth": depth,
                "oracle_v": oracle,
                "minimize_v": v_min,
                "agree": oracle == v_min,
            });
            emit(doc, None, curve.format);
            if oracle != v_min {
                return Err(Error::Internal(format!("oracle found v = {oracle} at {prime} but minimize gives {v_min}")).into());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind(), f.message().replace('\n', " "));
            ExitCode::from(f.exit_code())
        }
    }
}
