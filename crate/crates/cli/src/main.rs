use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use quadmot::coefficients::{fmt_fraction, parse_rational};
use quadmot::fixedpoint::{phi, psi_with};
use quadmot::homotopy::{TateComplex, Verdict};
use quadmot::motivealg::{quadric_motive, rost_split, Flavor, MotiveAtom, MotiveObject, WeightComplex};
use quadmot::quadform::{is_isotropic, witt_decompose, FieldContext, PfisterSymbol, QuadraticForm};
use quadmot::verify::{
    check_hu, check_invertibility, check_shift_lemma, corpus_contexts, emit_tables, overall,
    pattern_contexts, CaseReport, LabeledContext, MAX_TABLE_N,
};

/// Quadratic forms, quadric motives and their images in Tate complexes.
#[derive(Parser)]
#[command(name = "quadmot", version)]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on the isotropic-vector search over ℚ.
    #[arg(long, global = true, env = "QUADMOT_MAX_CANDIDATES")]
    max_candidates: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Is the form isotropic over the field?
    Isotropy {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
    },
    /// Witt index and anisotropic part.
    Witt {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
    },
    /// Decomposition of a quadric or Rost motive over the field.
    Motive {
        #[arg(long, default_value = "Q")]
        field: String,
        /// Projective quadric of this form.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "atom")]
        form: Option<String>,
        /// With --form: the deformed quadric {φ = a·z²} instead.
        #[arg(long, allow_hyphen_values = true, requires = "form")]
        deformed: Option<String>,
        /// Any atom in the usual syntax, e.g. R(2,3){1}.
        #[arg(long, allow_hyphen_values = true)]
        atom: Option<String>,
    },
    /// Φ of a weight complex (JSON file) over a context.
    Phi {
        #[arg(long, visible_alias = "field")]
        context: String,
        #[arg(long)]
        complex: PathBuf,
    },
    /// Ψ of a weight complex (JSON file) over ℤ[1/e].
    Psi {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, default_value_t = 1)]
        e: u64,
    },
    /// Minimal model of a Tate complex (JSON file).
    Minimize {
        #[arg(long)]
        complex: PathBuf,
    },
    /// Invertibility of a Tate complex (JSON file), or of the functor images of
    /// the affine quadric {φ = a}.
    Invertible {
        #[arg(long, conflicts_with_all = ["form", "a"])]
        complex: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, requires = "a")]
        form: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "form")]
        a: Option<String>,
        /// Restrict to this context (plus Ψ); default: ℚ, ℝ and two tailored patterns.
        #[arg(long)]
        field: Option<String>,
    },
    /// The Hu identity for (ā, b) under the three splitting patterns and Ψ.
    Hu {
        #[arg(long, allow_hyphen_values = true)]
        symbol: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// An extra context, checked after being classified into a pattern.
        #[arg(long)]
        field: Option<String>,
    },
    /// Raw and simplified Φ images of the affine Pfister complexes.
    Tables {
        #[arg(long)]
        n: usize,
    },
    /// C(ψ ⊥ ℍ) ≃ C(ψ){1} under Φ over the field and under Ψ.
    Shiftlemma {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value = "Q")]
        field: String,
    },
}

enum Failure {
    /// Bad flags or input files.
    Usage(String),
    /// The engine could not decide: resource limits, silent scripted tables.
    Oracle(String),
}

impl Failure {
    fn oracle(e: impl std::fmt::Display) -> Self {
        Failure::Oracle(e.to_string())
    }
}

struct Output {
    text: String,
    json: Value,
    code: u8,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, code: 0 }
    }

    fn verdict(text: String, json: Value, v: Verdict) -> Self {
        let code = match v {
            Verdict::True => 0,
            Verdict::False => 1,
            Verdict::Indeterminate => 3,
        };
        Output { text, json, code }
    }
}

fn parse_form(flag: &str, input: &str) -> Result<QuadraticForm, Failure> {
    let body = input
        .trim()
        .trim_start_matches(['<', '⟨'])
        .trim_end_matches(['>', '⟩']);
    let mut entries = vec![];
    for (i, part) in body.split(',').enumerate() {
        let q = parse_rational(part.trim()).map_err(|_| {
            Failure::Usage(format!(
                "--{flag} {input}: entry {} ({:?}) is not a rational number",
                i + 1,
                part.trim()
            ))
        })?;
        entries.push(q);
    }
    QuadraticForm::new(entries).map_err(|e| Failure::Usage(format!("--{flag} {input}: {e}")))
}

fn parse_scalar(flag: &str, input: &str) -> Result<num_rational::BigRational, Failure> {
    let q = parse_rational(input.trim())
        .map_err(|_| Failure::Usage(format!("--{flag} {input:?}: not a rational number")))?;
    if q == num_rational::BigRational::from_integer(0.into()) {
        return Err(Failure::Usage(format!("--{flag} must be nonzero")));
    }
    Ok(q)
}

fn parse_symbol(input: &str) -> Result<PfisterSymbol, Failure> {
    input
        .parse()
        .map_err(|e| Failure::Usage(format!("--symbol {input}: {e}")))
}

/// Q, R, F<p>, geometric or scripted:<path>.
fn parse_field(input: &str, max_candidates: Option<u64>) -> Result<FieldContext, Failure> {
    let usage = |msg: String| Failure::Usage(format!("--field {input}: {msg}"));
    if let Some(path) = input.strip_prefix("scripted:") {
        let text = std::fs::read_to_string(path).map_err(|e| usage(e.to_string()))?;
        return FieldContext::scripted_from_json(&text).map_err(|e| usage(e.to_string()));
    }
    match input {
        "Q" | "q" | "ℚ" => Ok(match max_candidates {
            Some(m) => FieldContext::Rationals { max_candidates: m },
            None => FieldContext::rationals(),
        }),
        "R" | "r" | "ℝ" => Ok(FieldContext::Reals),
        "geometric" => Ok(FieldContext::Geometric),
        other => {
            let digits = other
                .strip_prefix('F')
                .map(|s| s.trim_start_matches('_'))
                .ok_or_else(|| usage("expected Q, R, F<p>, geometric or scripted:<path>".into()))?;
            let p: u64 = digits.parse().map_err(|_| usage(format!("{digits:?} is not a prime")))?;
            FieldContext::finite(p).map_err(|e| usage(e.to_string()))
        }
    }
}

fn labeled(input: &str, max_candidates: Option<u64>) -> Result<LabeledContext, Failure> {
    let ctx = parse_field(input, max_candidates)?;
    Ok(LabeledContext::new(
        if input.starts_with("scripted:") { input.to_string() } else { ctx.label() },
        ctx,
    ))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_weight_complex(path: &Path) -> Result<WeightComplex, Failure> {
    WeightComplex::from_json(&read_json(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_tate_complex(path: &Path) -> Result<TateComplex, Failure> {
    TateComplex::from_json(&read_json(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn complex_output(label: &str, c: &TateComplex) -> Output {
    let m = c.minimize();
    Output::ok(
        format!("{label}: {c}\nminimal: {m}"),
        json!({
            "complex": c.to_json(),
            "display": c.to_string(),
            "minimal": m.to_json(),
            "minimal_display": m.to_string(),
        }),
    )
}

fn report_lines(reports: &[CaseReport]) -> String {
    reports
        .iter()
        .map(|r| {
            format!(
                "{:<5} {:<28} {:<28} {}: {} vs {}",
                r.verdict, r.context, r.label, r.input, r.computed, r.expected
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn motive_json(obj: &MotiveObject) -> Value {
    Value::Array(obj.atoms().iter().map(|a| Value::String(a.to_string())).collect())
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let mc = cli.max_candidates;
    match cli.command {
        Command::Isotropy { field, form } => {
            let ctx = parse_field(&field, mc)?;
            let f = parse_form("form", &form)?;
            let iso = is_isotropic(&ctx, &f).map_err(Failure::oracle)?;
            let word = if iso { "isotropic" } else { "anisotropic" };
            Ok(Output::ok(
                word.into(),
                json!({"field": ctx.label(), "form": f.to_string(), "isotropic": iso}),
            ))
        }
        Command::Witt { field, form } => {
            let ctx = parse_field(&field, mc)?;
            let f = parse_form("form", &form)?;
            let (m, an) = witt_decompose(&ctx, &f).map_err(Failure::oracle)?;
            Ok(Output::ok(
                format!("witt index {m}, anisotropic part {an}"),
                json!({"field": ctx.label(), "form": f.to_string(), "witt_index": m, "anisotropic": an.to_string()}),
            ))
        }
        Command::Motive { field, form, deformed, atom } => {
            let ctx = parse_field(&field, mc)?;
            let (input, obj) = match (form, atom) {
                (Some(form), None) => {
                    let f = parse_form("form", &form)?;
                    let flavor = match deformed {
                        Some(a) => Flavor::Deformed(parse_scalar("deformed", &a)?),
                        None => Flavor::Projective,
                    };
                    let atom = MotiveAtom::Quadric { form: f.clone(), twist: 0, flavor: flavor.clone() };
                    (atom.to_string(), quadric_motive(&ctx, &f, &flavor).map_err(Failure::oracle)?)
                }
                (None, Some(atom)) => {
                    let a: MotiveAtom = atom
                        .parse()
                        .map_err(|e| Failure::Usage(format!("--atom {atom}: {e}")))?;
                    (a.to_string(), rost_split(&ctx, &a).map_err(Failure::oracle)?)
                }
                _ => return Err(Failure::Usage("motive needs exactly one of --form or --atom".into())),
            };
            let shown = if obj.is_empty() { "0".to_string() } else { obj.to_string() };
            Ok(Output::ok(
                format!("{input} = {shown}"),
                json!({"field": ctx.label(), "input": input, "summands": motive_json(&obj)}),
            ))
        }
        Command::Phi { context, complex } => {
            let ctx = parse_field(&context, mc)?;
            let wc = read_weight_complex(&complex)?;
            let c = phi(&ctx, &wc).map_err(Failure::oracle)?;
            Ok(complex_output(&format!("Φ[{}]", ctx.label()), &c))
        }
        Command::Psi { complex, e } => {
            let wc = read_weight_complex(&complex)?;
            if e == 0 || e % 2 == 0 {
                return Err(Failure::Usage(format!("--e {e}: must be odd and positive")));
            }
            let c = psi_with(&wc, e).map_err(Failure::oracle)?;
            Ok(complex_output("Ψ", &c))
        }
        Command::Minimize { complex } => {
            let c = read_tate_complex(&complex)?;
            Ok(complex_output("input", &c))
        }
        Command::Invertible { complex, form, a, field } => match (complex, form, a) {
            (Some(path), None, None) => {
                let c = read_tate_complex(&path)?;
                let m = c.minimize();
                let v = m.is_invertible();
                Ok(Output::verdict(
                    format!("{v}: {m}"),
                    json!({"verdict": v, "minimal": m.to_json(), "minimal_display": m.to_string()}),
                    v,
                ))
            }
            (None, Some(form), Some(a)) => {
                let f = parse_form("form", &form)?;
                let a = parse_scalar("a", &a)?;
                let ctxs = match field {
                    Some(field) => vec![labeled(&field, mc)?],
                    None => corpus_contexts(&f, &a).map_err(Failure::oracle)?,
                };
                let reports = check_invertibility(&f, &a, &ctxs).map_err(Failure::oracle)?;
                let v = overall(&reports);
                Ok(Output::verdict(
                    format!("{}\n{}", report_lines(&reports), verdict_line(v, "functor images invertible")),
                    json!({"verdict": v, "reports": reports}),
                    v,
                ))
            }
            _ => Err(Failure::Usage("invertible needs --complex, or --form with --a".into())),
        },
        Command::Hu { symbol, b, field } => {
            let s = parse_symbol(&symbol)?;
            let b = parse_scalar("b", &b)?;
            let mut ctxs = pattern_contexts(&s, &b).map_err(Failure::oracle)?;
            if let Some(field) = field {
                ctxs.push(labeled(&field, mc)?);
            }
            let reports = check_hu(&s, &b, &ctxs).map_err(Failure::oracle)?;
            let v = overall(&reports);
            let text = match v {
                Verdict::True => "VERIFIED (3 patterns + Psi)".to_string(),
                _ => format!("{}\n{}", report_lines(&reports), verdict_line(v, "hu identity")),
            };
            Ok(Output::verdict(
                text,
                json!({"symbol": s.to_string(), "b": fmt_fraction(&b), "verdict": v, "reports": reports}),
                v,
            ))
        }
        Command::Tables { n } => {
            if n == 0 || n > MAX_TABLE_N {
                return Err(Failure::Usage(format!("--n {n}: must lie in 1..={MAX_TABLE_N}")));
            }
            let t = emit_tables(n).map_err(Failure::oracle)?;
            let text = t
                .cells
                .iter()
                .map(|c| {
                    format!(
                        "{:<9} {:<15} raw {}  simplified {}{}",
                        c.row,
                        c.column.name(),
                        c.raw,
                        c.simplified,
                        if c.matches { "" } else { "  MISMATCH" }
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            let v = Verdict::from(t.all_match());
            Ok(Output::verdict(text, serde_json::to_value(&t).expect("tables serialize"), v))
        }
        Command::Shiftlemma { form, a, field } => {
            let f = parse_form("form", &form)?;
            let a = parse_scalar("a", &a)?;
            let ctx = parse_field(&field, mc)?;
            let v = check_shift_lemma(&f, &a, &ctx).map_err(Failure::oracle)?;
            Ok(Output::verdict(
                v.to_string(),
                json!({"form": f.to_string(), "a": fmt_fraction(&a), "field": ctx.label(), "verdict": v}),
                v,
            ))
        }
    }
}

fn verdict_line(v: Verdict, what: &str) -> String {
    match v {
        Verdict::True => format!("VERIFIED ({what})"),
        Verdict::False => format!("FAILED ({what})"),
        Verdict::Indeterminate => format!("INDETERMINATE ({what})"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            let body = if json {
                serde_json::to_string_pretty(&out.json).expect("json output")
            } else {
                out.text
            };
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            ExitCode::from(out.code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Oracle(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
