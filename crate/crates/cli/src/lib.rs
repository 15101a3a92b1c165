//! Command-line front end: argument model, command dispatch and rendering.
//!
//! Every command produces a JSON value. The human format is a rendering of
//! that value, so both formats always carry the same content.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qfq::fiber::{center_dim_solve, specialize, FiberPoint};
use qfq::hilbert::{
    euler_characteristic, hilbert_polynomial, sheaf_cohomology, RatPolynomial, TwistMultiset,
};
use qfq::index::{enumerate_index_set, weight_histogram};
use qfq::qparams::{
    act_permute, canonical_generic, classify_with, enumerate_generic, ActionSet, Permutation,
    QMatrix,
};
use qfq::rewrite::{graded_dimension, is_central, normal_form, quintic_relation, Monomial, Word};
use qfq::structure::{
    build_table, cy_certificate, verify_associativity, StructureTable, TableFile, VerifyMode,
};

pub const SHEAF_ALGEBRA_TWISTS: &str = "0:1,-1:121,-2:381,-3:121,-4:1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Human,
}

#[derive(Debug, Parser)]
#[command(name = "qfq", version, about = "Exact computations for the quantum Fermat quintic threefold")]
pub struct RunConfig {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate generic admissible matrices and split them into orbits.
    Classify {
        /// Extra action set to partition under, e.g. "permute,twist".
        #[arg(long)]
        actions: Option<ActionSet>,
        /// Include every generic matrix in the output.
        #[arg(long)]
        emit_matrices: bool,
    },
    /// Build the 625 x 625 structure table of a matrix.
    BuildTable {
        /// Matrix JSON file, or an inline JSON array.
        #[arg(long)]
        matrix: String,
        /// Output file; the table goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check associativity of a table file.
    Verify {
        #[arg(long)]
        table: PathBuf,
        /// exact, full, sampled or sampled=N.
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Triple count for sampled mode.
        #[arg(long)]
        samples: Option<u64>,
        /// Seed for sampled mode; required there.
        #[arg(long)]
        seed: Option<u64>,
        /// Maximum number of triples for full mode.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Analyze the fibre algebra of a table at a point.
    Fiber {
        #[arg(long)]
        table: PathBuf,
        /// Five comma-separated rationals summing to zero.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Also solve the commutant system for the center dimension.
        #[arg(long)]
        cross_check: bool,
    },
    /// Hilbert polynomial and line-bundle cohomology of a twist multiset.
    Hilbert {
        /// Pairs twist:multiplicity.
        #[arg(long, allow_hyphen_values = true, default_value = SHEAF_ALGEBRA_TWISTS)]
        twists: String,
        /// Evaluate at this n.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<i64>,
        /// Cohomology table at --at, or on -5..=10 without it.
        #[arg(long)]
        cohomology: bool,
    },
    /// Standard form of a word in the generators.
    NormalForm {
        #[arg(long)]
        matrix: String,
        /// Comma-separated generator indices, e.g. "1,0,3,3".
        #[arg(long)]
        word: String,
    },
    /// Run the reproduction suite and emit one JSON summary.
    Report,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qfq::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{what}: {source}")]
    Json {
        what: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        use qfq::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::Parse(_) => "parse",
                E::NotAdmissible(_) => "not_admissible",
                E::PointOffHyperplane(_) | E::ZeroPoint => "invalid_point",
                E::BudgetExceeded { .. } => "budget_exceeded",
                E::AssociativityViolation { .. } => "associativity_violation",
                E::MalformedTable(_) => "malformed_table",
                _ => "invalid_input",
            },
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "parse",
            CliError::Usage(_) => "usage",
            CliError::VerificationFailed(_) => "verification_failed",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Result of a command. `failure` is set when the command ran but its
/// verdict is negative; the value is still emitted.
#[derive(Debug)]
pub struct Output {
    pub value: Value,
    pub failure: Option<CliError>,
}

impl Output {
    fn ok(value: Value) -> Output {
        Output {
            value,
            failure: None,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("output types serialize to JSON")
}

pub fn run(config: &RunConfig) -> CliResult<Output> {
    match config.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            pool.install(|| dispatch(&config.command))
        }
        None => dispatch(&config.command),
    }
}

fn dispatch(cmd: &Command) -> CliResult<Output> {
    match cmd {
        Command::Classify {
            actions,
            emit_matrices,
        } => classify_cmd(*actions, *emit_matrices),
        Command::BuildTable { matrix, out } => build_table_cmd(matrix, out.as_deref()),
        Command::Verify {
            table,
            mode,
            samples,
            seed,
            budget,
        } => {
            let mode = parse_mode(mode, *samples, *seed, *budget)?;
            verify_cmd(table, mode)
        }
        Command::Fiber {
            table,
            point,
            cross_check,
        } => fiber_cmd(table, point, *cross_check),
        Command::Hilbert {
            twists,
            at,
            cohomology,
        } => hilbert_cmd(twists, *at, *cohomology),
        Command::NormalForm { matrix, word } => {
            let n = read_matrix(matrix)?;
            let w = Word::from_str(word)?;
            let nf = normal_form(&w, &n)?;
            Ok(Output::ok(json!({
                "word": w.letters(),
                "normal_form": to_value(&nf),
                "display": nf.to_string(),
            })))
        }
        Command::Report => Ok(Output::ok(report()?)),
    }
}

/// Builds a verification mode; sampled runs must name their seed.
pub fn parse_mode(
    mode: &str,
    samples: Option<u64>,
    seed: Option<u64>,
    budget: Option<u64>,
) -> CliResult<VerifyMode> {
    let (name, inline) = match mode.split_once('=') {
        Some((n, c)) => (n, Some(c)),
        None => (mode, None),
    };
    match name {
        "exact" if inline.is_none() => Ok(VerifyMode::ExactBilinear),
        "full" if inline.is_none() => Ok(VerifyMode::FullTriple { budget }),
        "sampled" => {
            let count = match inline {
                Some(c) => c
                    .parse()
                    .map_err(|_| CliError::Usage(format!("invalid sample count {c:?} in --mode")))?,
                None => samples.ok_or_else(|| {
                    CliError::Usage("sampled mode needs a count: --mode sampled=N or --samples N".into())
                })?,
            };
            let seed = seed.ok_or_else(|| CliError::Usage("sampled mode requires --seed".into()))?;
            Ok(VerifyMode::Sampled { count, seed })
        }
        _ => Err(CliError::Usage(format!(
            "unknown mode {mode:?}; expected exact, full, sampled or sampled=N"
        ))),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A matrix given inline as JSON or as a path to a JSON file.
pub fn read_matrix(arg: &str) -> CliResult<QMatrix> {
    let (what, text) = if arg.trim_start().starts_with('[') {
        ("inline matrix".to_string(), arg.to_string())
    } else {
        (arg.to_string(), read_text(Path::new(arg))?)
    };
    serde_json::from_str(&text).map_err(|source| CliError::Json { what, source })
}

pub fn read_table(path: &Path) -> CliResult<StructureTable> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let tf: TableFile =
        serde_json::from_reader(BufReader::new(file)).map_err(|source| CliError::Json {
            what: path.display().to_string(),
            source,
        })?;
    Ok(StructureTable::from_file(&tf)?)
}

fn classify_cmd(actions: Option<ActionSet>, emit: bool) -> CliResult<Output> {
    let report = classify_with(actions);
    let mut v = to_value(&report);
    if emit {
        v["generic_matrices"] = to_value(&enumerate_generic());
    }
    Ok(Output::ok(v))
}

fn build_table_cmd(matrix: &str, out: Option<&Path>) -> CliResult<Output> {
    let n = read_matrix(matrix)?;
    let t = build_table(&n)?;
    let file = t.to_file();
    match out {
        None => Ok(Output::ok(to_value(&file))),
        Some(path) => {
            let io = |source| CliError::Io {
                path: path.display().to_string(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(io)?);
            serde_json::to_writer(&mut w, &file).map_err(|source| CliError::Json {
                what: path.display().to_string(),
                source,
            })?;
            w.flush().map_err(io)?;
            Ok(Output::ok(json!({
                "source_matrix": to_value(&n),
                "entries": file.entries.len(),
                "out": path.display().to_string(),
            })))
        }
    }
}

fn verify_cmd(path: &Path, mode: VerifyMode) -> CliResult<Output> {
    let t = read_table(path)?;
    let report = verify_associativity(&t, mode)?;
    let failure = (!report.passed).then(|| {
        let detail = match &report.violation {
            Some(v) => format!("{:?} violation at {:?}, {:?}, {:?}", v.kind, v.a, v.b, v.c),
            None => "no violation recorded".into(),
        };
        CliError::VerificationFailed(detail)
    });
    Ok(Output {
        value: to_value(&report),
        failure,
    })
}

fn fiber_cmd(path: &Path, point: &str, cross_check: bool) -> CliResult<Output> {
    let p = FiberPoint::from_str(point)?;
    let t = read_table(path)?;
    let f = specialize(&t, &p)?;
    let report = f.analyze();
    let mut v = to_value(&report);
    v["point_display"] = json!(p.to_string());
    if cross_check {
        v["center_dim_solved"] = json!(center_dim_solve(&f));
    }
    Ok(Output::ok(v))
}

fn polynomial_json(p: &RatPolynomial) -> Value {
    json!({ "coefficients": to_value(p), "display": p.to_string() })
}

fn cohomology_row(tw: &TwistMultiset, n: i64) -> Value {
    let h = sheaf_cohomology(tw, n);
    json!({ "n": n, "h": h.map(|x| x.to_string()), "chi": euler_characteristic(&h).to_string() })
}

fn hilbert_cmd(twists: &str, at: Option<i64>, cohomology: bool) -> CliResult<Output> {
    let tw = TwistMultiset::from_str(twists)?;
    let p = hilbert_polynomial(&tw);
    let mut v = json!({
        "twists": tw.parts(),
        "rank": tw.rank(),
        "polynomial": polynomial_json(&p),
    });
    if let Some(n) = at {
        v["value"] = json!({ "n": n, "p": p.eval(n).to_string() });
    }
    if cohomology {
        let range: Vec<i64> = match at {
            Some(n) => vec![n],
            None => (-5..=10).collect(),
        };
        v["cohomology"] = Value::Array(range.into_iter().map(|n| cohomology_row(&tw, n)).collect());
    }
    Ok(Output::ok(v))
}

/// The reproduction suite as one JSON document.
pub fn report() -> CliResult<Value> {
    let classification = classify_with(None);
    let class_ok =
        classification.generic_count == 3000 && classification.orbit_count_all_actions == 1;

    let histogram = weight_histogram(&enumerate_index_set());
    let hist_ok = histogram == [1, 121, 381, 121, 1];

    let canon = canonical_generic();
    let cert = cy_certificate(&canon)?;

    // Swapping rows 0 and 1 moves the zero row, so no generator is central.
    let n = act_permute(&canon, &Permutation::new(&[1, 0, 2, 3, 4])?);
    let quintic_zero = quintic_relation(&n)?.is_zero();
    let mut fifth_powers_central = true;
    let mut generators_central = Vec::new();
    for i in 0..5 {
        let mut e = [0; 5];
        e[i] = 5;
        fifth_powers_central &= is_central(&normal_form(&Monomial(e).to_word(), &n)?, &n)?;
        e[i] = 1;
        generators_central.push(is_central(&normal_form(&Monomial(e).to_word(), &n)?, &n)?);
    }

    let tw = TwistMultiset::sheaf_algebra();
    let p = hilbert_polynomial(&tw);
    let bridge: Vec<Value> = (0..=3i64)
        .map(|k| {
            let g = graded_dimension(5 * k as u64).to_string();
            let h = p.eval(k).to_string();
            json!({ "n": k, "graded_dimension": g, "hilbert_polynomial": h, "equal": g == h })
        })
        .collect();
    let bridge_ok = bridge.iter().all(|b| b["equal"] == json!(true));

    let mut cohomology_ok = true;
    let rows: Vec<Value> = (-5..=10)
        .map(|k| {
            let h = sheaf_cohomology(&tw, k);
            let chi = euler_characteristic(&h);
            cohomology_ok &= h[1] == 0 && h[2] == 0 && p.eval_int(k) == Some(chi);
            cohomology_row(&tw, k)
        })
        .collect();

    let checks = json!({
        "classification": class_ok,
        "grading_histogram": hist_ok,
        "cy_certificate": cert.associativity.passed && cert.nondegenerate && cert.symmetric,
        "centrality": quintic_zero && fifth_powers_central,
        "dimension_bridge": bridge_ok,
        "cohomology": cohomology_ok,
    });
    let all_passed = checks.as_object().unwrap().values().all(|v| v == &json!(true));
    Ok(json!({
        "classification": {
            "admissible_count": classification.admissible_count,
            "generic_count": classification.generic_count,
            "orbit_count_all_actions": classification.orbit_count_all_actions,
            "orbit_count_without_scaling": classification.orbit_count_without_scaling,
            "canonical_representative": to_value(&canon),
        },
        "grading_histogram": histogram,
        "cy_certificate": to_value(&cert),
        "centrality": {
            "matrix": to_value(&n),
            "quintic_relation_zero": quintic_zero,
            "fifth_powers_central": fifth_powers_central,
            "generators_central": generators_central,
        },
        "dimension_bridge": bridge,
        "hilbert_polynomial": polynomial_json(&p),
        "cohomology": rows,
        "checks": checks,
        "all_passed": all_passed,
    }))
}

/// Renders a value in the requested format.
pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("values always serialize"),
        Format::Human => {
            let mut out = String::new();
            render_human(v, 0, &mut out);
            out.trim_end().to_string()
        }
    }
}

pub fn render_error(e: &CliError, format: Format) -> String {
    match format {
        Format::Json => e.to_json().to_string(),
        Format::Human => format!("error ({}): {e}", e.kind()),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Array(items) if items.iter().all(|x| is_scalar(x) || inline(x).is_some()) => {
            let parts: Vec<String> = items
                .iter()
                .map(|x| inline(x).unwrap_or_else(|| scalar(x)))
                .collect();
            let s = format!("[{}]", parts.join(", "));
            (s.len() <= 100).then_some(s)
        }
        _ => None,
    }
}

fn render_human(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_scalar(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                } else if let Some(s) = inline(x) {
                    out.push_str(&format!("{pad}{k}: {s}\n"));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_human(x, depth + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_scalar(x) {
                    out.push_str(&format!("{pad}- {}\n", scalar(x)));
                } else if let Some(s) = inline(x) {
                    out.push_str(&format!("{pad}- {s}\n"));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_human(x, depth + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!(parse_mode("exact", None, None, None).unwrap(), VerifyMode::ExactBilinear);
        assert_eq!(
            parse_mode("full", None, None, Some(10)).unwrap(),
            VerifyMode::FullTriple { budget: Some(10) }
        );
        assert_eq!(
            parse_mode("sampled=500", None, Some(3), None).unwrap(),
            VerifyMode::Sampled { count: 500, seed: 3 }
        );
        assert_eq!(
            parse_mode("sampled", Some(7), Some(1), None).unwrap(),
            VerifyMode::Sampled { count: 7, seed: 1 }
        );
        assert!(matches!(parse_mode("sampled=500", None, None, None), Err(CliError::Usage(_))));
        assert!(matches!(parse_mode("sampled", None, Some(1), None), Err(CliError::Usage(_))));
        assert!(matches!(parse_mode("fast", None, None, None), Err(CliError::Usage(_))));
        assert!(matches!(parse_mode("exact=3", None, None, None), Err(CliError::Usage(_))));
    }

    #[test]
    fn inline_matrix_errors_carry_position() {
        let err = read_matrix("[[0,1,2,3,4],[4,0").unwrap_err();
        assert_eq!(err.kind(), "parse");
        assert!(err.to_string().contains("line 1 column"), "{err}");
    }

    #[test]
    fn human_rendering_of_nested_values() {
        let v = json!({ "a": 1, "b": [1, 2], "c": { "d": "x" }, "e": [{ "f": true }] });
        assert_eq!(render(&v, Format::Human), "a: 1\nb: [1, 2]\nc:\n  d: x\ne:\n  -\n    f: true");
    }

    #[test]
    fn error_record_shape() {
        let e = CliError::Usage("bad".into());
        assert_eq!(e.to_json(), json!({ "error": { "kind": "usage", "message": "bad" } }));
        assert_eq!(e.exit_code(), 2);
    }
}
