//! Command-line front end.
//!
//! Three subcommands cover the library surface:
//!
//! * `homology` prints the first homology profile of a manifold, together
//!   with the torsion linking pairing when the presentation provides one;
//! * `invariant <cs|bf|rt|tv>` evaluates one invariant family at a coupling
//!   (`--k`) or level (`--level`), printing the value, any exact closed
//!   form, and a cross-check against it;
//! * `verify <suite>` runs a verification suite over a parameter grid and
//!   exits nonzero when any asserted identity fails.
//!
//! Manifolds are given with `--manifold` as a well-known name (`s3`,
//! `s1xs2`, `rp3`, `rp3-heegaard`, `lens(p,q)`), inline JSON, or a path to a
//! JSON file.  Output is a human-readable table by default or JSON with
//! `--output json`; in JSON mode errors are structured objects on stderr.
//! Identical invocations produce byte-identical output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse/usage error,
//! 3 input invariant violation (including brute-force caps), 4 unsupported
//! presentation for the requested computation, 5 no invariant exists at the
//! requested level.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::category::{CategoryZn, Epsilon, verify_ribbon_axioms};
use crate::linalg::IntegerMatrix;
use crate::manifolds::{
    lens_chain, lens_space, matrix_to_json, number_from_bigint, parse_manifold, resolve_named,
    serialize_manifold, ManifoldError, ManifoldPresentation, SurgeryLink,
};
use crate::partition::{
    bf_partition_bruteforce, cs_abs_squared_closed, cs_partition, verify_lemma2, PartitionError,
};
use crate::report::{rel_close, CrossCheckError, Report};
use crate::rt::{
    kirby_blowup_check, rt_at_level, rt_odd, tau_abs_squared_closed, tau_odd_abs_squared_closed,
    verify_lemma3_part1, Normalization, RtError,
};
use crate::tv::{tv_algebraic, tv_bruteforce, verify_lemma3_tv, TvError};
use crate::VERIFY_TOLERANCE;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_NO_INVARIANT: i32 = 5;

#[derive(Parser)]
#[command(
    name = "abinv",
    version,
    about = "Abelian 3-manifold invariants: partition functions, surgery invariants, state sums",
    color = clap::ColorChoice::Never
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print first homology and, when available, the torsion linking pairing
    Homology {
        #[command(flatten)]
        source: SourceArg,
        #[arg(long, value_enum, default_value = "table")]
        output: OutputMode,
    },
    /// Evaluate one invariant of the selected manifold
    Invariant {
        /// Which invariant family to evaluate
        #[arg(value_enum)]
        which: InvariantKind,
        #[command(flatten)]
        source: SourceArg,
        /// Coupling constant for the partition functions (cs, bf)
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: Option<u64>,
        /// Root-of-unity level for the surgery invariant and state sum (rt, tv)
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        level: Option<u64>,
        /// Prefactor convention for the surgery invariant
        #[arg(long, value_enum, default_value = "moo")]
        normalization: NormalizationArg,
        #[arg(long, value_enum, default_value = "table")]
        output: OutputMode,
    },
    /// Run a verification suite; exits nonzero when any check fails
    Verify {
        /// Which suite to run
        #[arg(value_enum)]
        suite: Suite,
        /// Manifold for manifold-specific suites (default: the named fixtures)
        #[arg(long)]
        manifold: Option<String>,
        /// Largest torsion order in generated grids
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(i64).range(1..=64))]
        pmax: i64,
        /// Largest coupling constant in generated grids
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=64))]
        kmax: u64,
        /// Largest level in generated grids
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..=256))]
        nmax: u64,
        /// Prefactor convention for the blow-up suite
        #[arg(long, value_enum, default_value = "moo")]
        normalization: NormalizationArg,
        #[arg(long, value_enum, default_value = "table")]
        output: OutputMode,
    },
}

#[derive(Args)]
struct SourceArg {
    /// Manifold: a name (s3, s1xs2, rp3, rp3-heegaard, lens(p,q)),
    /// inline JSON, or a path to a JSON file
    #[arg(long)]
    manifold: String,
}

/// Invariant families the `invariant` subcommand and the embedding API accept.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InvariantKind {
    /// Chiral partition function (takes a coupling `k`).
    Cs,
    /// Doubled partition function (takes a coupling `k`).
    Bf,
    /// Surgery invariant (takes a level).
    Rt,
    /// State sum (takes a level).
    Tv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormalizationArg {
    Moo,
    Raw,
}

impl From<NormalizationArg> for Normalization {
    fn from(arg: NormalizationArg) -> Normalization {
        match arg {
            NormalizationArg::Moo => Normalization::Moo,
            NormalizationArg::Raw => Normalization::Raw,
        }
    }
}

/// Verification suites the `verify` subcommand and the embedding API accept.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Partition-function identities over a lens-space grid.
    Lemma2,
    /// Surgery invariant vs rescaled chiral partition function.
    Lemma3Rt,
    /// State sum vs cohomology count vs doubled partition function.
    Lemma3Tv,
    /// Braiding/twist/duality axioms of the cyclic label categories.
    Ribbon,
    /// Blow-up stability of the surgery invariant.
    Kirby,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Table,
    Json,
}

/// A successful command: exit code plus both renderings of the result.
struct Outcome {
    exit: i32,
    json: Value,
    table: String,
}

/// A failed command: exit code plus a structured error object.
struct Failure {
    exit: i32,
    kind: &'static str,
    message: String,
    extra: Vec<(&'static str, Value)>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            exit: EXIT_PARSE,
            kind: "usage",
            message: message.into(),
            extra: vec![],
        }
    }

    fn parse(message: impl Into<String>) -> Failure {
        Failure {
            exit: EXIT_PARSE,
            kind: "parse",
            message: message.into(),
            extra: vec![],
        }
    }

    fn input(message: impl Into<String>) -> Failure {
        Failure {
            exit: EXIT_INPUT,
            kind: "input",
            message: message.into(),
            extra: vec![],
        }
    }

    fn unsupported(needed: &str, supported: &[&str]) -> Failure {
        Failure {
            exit: EXIT_UNSUPPORTED,
            kind: "unsupported-presentation",
            message: format!(
                "this computation needs {needed}; supported presentations: {}",
                supported.join(", ")
            ),
            extra: vec![(
                "supported",
                Value::Array(supported.iter().map(|s| Value::String(s.to_string())).collect()),
            )],
        }
    }

    fn no_invariant(message: impl Into<String>) -> Failure {
        Failure {
            exit: EXIT_NO_INVARIANT,
            kind: "no-invariant-at-level",
            message: message.into(),
            extra: vec![],
        }
    }
}

fn manifold_failure(e: ManifoldError) -> Failure {
    match e {
        ManifoldError::Schema { pointer, message } => Failure {
            exit: EXIT_PARSE,
            kind: "schema",
            message: format!("at {pointer}: {message}"),
            extra: vec![("pointer", Value::String(pointer))],
        },
        other => Failure::input(other.to_string()),
    }
}

fn partition_failure(e: PartitionError) -> Failure {
    match e {
        PartitionError::TorsionTooLarge { .. } => Failure::input(e.to_string()),
        PartitionError::InvalidCoupling => Failure::usage(e.to_string()),
    }
}

fn rt_failure(e: RtError) -> Failure {
    match e {
        RtError::EvenLevel | RtError::NoInvariantAtLevel => Failure::no_invariant(e.to_string()),
        RtError::InvalidLevel => Failure::usage(e.to_string()),
        RtError::SumTooLarge { .. } | RtError::DimensionMismatch => Failure::input(e.to_string()),
    }
}

fn tv_failure(e: TvError) -> Failure {
    match e {
        TvError::InvalidLevel => Failure::usage(e.to_string()),
        other => Failure::input(other.to_string()),
    }
}

fn cross_check_failure(e: CrossCheckError) -> Failure {
    match e {
        CrossCheckError::Rt(inner) => rt_failure(inner),
        CrossCheckError::Partition(inner) => partition_failure(inner),
        CrossCheckError::Manifold(inner) => manifold_failure(inner),
        CrossCheckError::Complex(inner) => tv_failure(inner),
        CrossCheckError::UnsupportedPresentation { needed } => Failure {
            exit: EXIT_UNSUPPORTED,
            kind: "unsupported-presentation",
            message: format!("this computation needs {needed}"),
            extra: vec![("supported", Value::String(needed.to_string()))],
        },
    }
}

/// Entry point shared by the binary and the tests: parses `args`, runs the
/// command, writes to the given streams, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let raw: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let wants_json = raw.iter().any(|a| a == "--output=json")
        || raw.windows(2).any(|w| w[0] == "--output" && w[1] == "json");
    let cli = match Cli::try_parse_from(raw.iter().cloned()) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                if wants_json {
                    let obj = json!({"error": {
                        "exit": EXIT_PARSE,
                        "kind": "usage",
                        "message": rendered,
                    }});
                    let _ = writeln!(err, "{}", pretty(&obj));
                } else {
                    let _ = write!(err, "{rendered}");
                }
                return EXIT_PARSE;
            }
            // --help and --version render to stdout with success.
            let _ = write!(out, "{rendered}");
            return EXIT_OK;
        }
    };

    let (mode, result) = dispatch(cli);
    match result {
        Ok(outcome) => {
            match mode {
                OutputMode::Json => {
                    let _ = writeln!(out, "{}", pretty(&outcome.json));
                }
                OutputMode::Table => {
                    let _ = write!(out, "{}", outcome.table);
                }
            }
            outcome.exit
        }
        Err(failure) => {
            match mode {
                OutputMode::Json => {
                    let _ = writeln!(err, "{}", pretty(&failure_json(&failure)));
                }
                OutputMode::Table => {
                    let _ = writeln!(err, "error: {}", failure.message);
                }
            }
            failure.exit
        }
    }
}

/// The structured `{"error": {...}}` rendering of a failure.
fn failure_json(failure: &Failure) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("exit".into(), json!(failure.exit));
    obj.insert("kind".into(), json!(failure.kind));
    obj.insert("message".into(), json!(failure.message));
    for (key, value) in &failure.extra {
        obj.insert((*key).into(), value.clone());
    }
    json!({ "error": obj })
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json values serialize")
}

fn dispatch(cli: Cli) -> (OutputMode, Result<Outcome, Failure>) {
    match cli.command {
        Command::Homology { source, output } => (output, run_homology(&source.manifold)),
        Command::Invariant {
            which,
            source,
            k,
            level,
            normalization,
            output,
        } => (
            output,
            run_invariant(which, &source.manifold, k, level, normalization.into()),
        ),
        Command::Verify {
            suite,
            manifold,
            pmax,
            kmax,
            nmax,
            normalization,
            output,
        } => (
            output,
            run_verify(suite, manifold.as_deref(), pmax, kmax, nmax, normalization.into()),
        ),
    }
}

/// Resolves `--manifold`: well-known name, inline JSON, or file path.
fn load_manifold(source: &str) -> Result<ManifoldPresentation, Failure> {
    match resolve_named(source) {
        Ok(Some(manifold)) => return Ok(manifold),
        Ok(None) => {}
        Err(e) => return Err(manifold_failure(e)),
    }
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        std::fs::read_to_string(source)
            .map_err(|e| Failure::parse(format!("cannot read manifold file '{source}': {e}")))?
    };
    parse_manifold(&text).map_err(manifold_failure)
}

fn run_homology(source: &str) -> Result<Outcome, Failure> {
    homology_outcome(&load_manifold(source)?)
}

fn homology_outcome(manifold: &ManifoldPresentation) -> Result<Outcome, Failure> {
    let profile = manifold.profile();
    let torsion: Vec<Value> = profile.torsion().iter().map(number_from_bigint).collect();

    let mut obj = serde_json::Map::new();
    obj.insert("b1".into(), json!(profile.b1()));
    obj.insert("torsion".into(), Value::Array(torsion));
    obj.insert("manifold".into(), serialize_manifold(manifold));

    let mut table = String::new();
    table.push_str(&format!("b1: {}\n", profile.b1()));
    table.push_str(&format!(
        "torsion: [{}]\n",
        profile
            .torsion()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    ));

    match manifold.linking_form() {
        Ok(Some(form)) if form.rank() > 0 => {
            obj.insert("q_matrix".into(), matrix_to_json(form.numerators()));
            table.push_str("linking pairing numerators (entry (i,j) is over p_i):\n");
            for i in 0..form.rank() {
                let row: Vec<String> = (0..form.rank())
                    .map(|j| form.numerators().get(i, j).to_string())
                    .collect();
                table.push_str(&format!("  [{}]\n", row.join(", ")));
            }
        }
        Ok(Some(_)) => {}
        Ok(None) => {
            let note = "linking pairing unavailable for this presentation";
            obj.insert("note".into(), json!(note));
            table.push_str(&format!("note: {note}\n"));
        }
        Err(e) => {
            let note = format!("linking pairing unavailable: {e}");
            obj.insert("note".into(), json!(note));
            table.push_str(&format!("note: {note}\n"));
        }
    }

    Ok(Outcome {
        exit: EXIT_OK,
        json: Value::Object(obj),
        table,
    })
}

fn complex_json(value: crate::category::ComplexValue) -> Value {
    json!({"re": value.re, "im": value.im})
}

fn run_invariant(
    which: InvariantKind,
    source: &str,
    k: Option<u64>,
    level: Option<u64>,
    normalization: Normalization,
) -> Result<Outcome, Failure> {
    invariant_outcome(&load_manifold(source)?, which, k, level, normalization)
}

fn invariant_outcome(
    manifold: &ManifoldPresentation,
    which: InvariantKind,
    k: Option<u64>,
    level: Option<u64>,
    normalization: Normalization,
) -> Result<Outcome, Failure> {
    match which {
        InvariantKind::Cs => {
            let k = k.ok_or_else(|| Failure::usage("invariant cs requires --k"))?;
            run_cs(manifold, k)
        }
        InvariantKind::Bf => {
            let k = k.ok_or_else(|| Failure::usage("invariant bf requires --k"))?;
            run_bf(manifold, k)
        }
        InvariantKind::Rt => {
            let level = level.ok_or_else(|| Failure::usage("invariant rt requires --level"))?;
            run_rt(manifold, level, normalization)
        }
        InvariantKind::Tv => {
            let level = level.ok_or_else(|| Failure::usage("invariant tv requires --level"))?;
            run_tv(manifold, level)
        }
    }
}

/// Presentations that lower to an explicit linking pairing.
const LINKING_PRESENTATIONS: [&str; 6] = [
    "lens(p,q)",
    "surgery",
    "homology (with q_matrix when torsion is present)",
    "sphere",
    "s1xs2",
    "connected-sum of these",
];

fn require_linking_form(
    manifold: &ManifoldPresentation,
) -> Result<crate::topology::LinkingForm, Failure> {
    match manifold.linking_form() {
        Ok(Some(form)) => Ok(form),
        Ok(None) => Err(Failure::unsupported(
            "an explicit torsion linking pairing",
            &LINKING_PRESENTATIONS,
        )),
        Err(e) => Err(manifold_failure(e)),
    }
}

fn run_cs(manifold: &ManifoldPresentation, k: u64) -> Result<Outcome, Failure> {
    let profile = manifold.profile();
    let form = require_linking_form(manifold)?;
    let result = cs_partition(&form, k).map_err(partition_failure)?;
    let closed = cs_abs_squared_closed(&profile, k).map_err(partition_failure)?;
    let abs_squared = result.value.abs_squared();
    let closed_f = closed.to_f64().unwrap_or(f64::INFINITY);
    let pass = rel_close(abs_squared, closed_f, VERIFY_TOLERANCE);

    let mut obj = serde_json::Map::new();
    obj.insert("invariant".into(), json!("cs"));
    obj.insert("k".into(), json!(k));
    obj.insert("manifold".into(), serialize_manifold(manifold));
    obj.insert("value".into(), complex_json(result.value));
    obj.insert("abs_squared".into(), json!(abs_squared));
    obj.insert("closed_abs_squared".into(), number_from_bigint(&closed));
    obj.insert("cross_check_pass".into(), json!(pass));
    obj.insert(
        "formula".into(),
        json!("Z_cs(k) = sum over kappa in T of exp(+2 pi i k Q(kappa, kappa))"),
    );
    if form.rank() == 0 {
        obj.insert("exact".into(), json!({"kind": "integer", "value": 1}));
    }

    let table = format!(
        "invariant: cs (chiral partition function)\nmanifold: {}\nk: {k}\nvalue: {}\n|Z|^2: {:.9} \
         (closed form {closed}) [{}]\n",
        serde_json::to_string(&serialize_manifold(manifold)).expect("serializable"),
        result.value,
        abs_squared,
        if pass { "pass" } else { "MISMATCH" },
    );
    Ok(Outcome {
        exit: EXIT_OK,
        json: Value::Object(obj),
        table,
    })
}

fn run_bf(manifold: &ManifoldPresentation, k: u64) -> Result<Outcome, Failure> {
    let form = require_linking_form(manifold)?;
    let result = bf_partition_bruteforce(&form, k).map_err(partition_failure)?;
    let closed = result.closed_form.clone().expect("doubled sum always has a closed form");
    let closed_f = closed.to_f64().unwrap_or(f64::INFINITY);
    let pass = rel_close(result.value.re, closed_f, VERIFY_TOLERANCE)
        && result.value.im.abs() <= VERIFY_TOLERANCE * (1.0 + result.value.re.abs());

    let mut obj = serde_json::Map::new();
    obj.insert("invariant".into(), json!("bf"));
    obj.insert("k".into(), json!(k));
    obj.insert("manifold".into(), serialize_manifold(manifold));
    obj.insert("value".into(), complex_json(result.value));
    obj.insert(
        "exact".into(),
        json!({"kind": "integer", "value": number_from_bigint(&closed)}),
    );
    obj.insert("cross_check_pass".into(), json!(pass));
    obj.insert(
        "formula".into(),
        json!(
            "Z_bf(k) = sum over kappa, tau in T of exp(-2 pi i k Q(kappa, tau)) \
             = prod over j of gcd(k, p_j) p_j"
        ),
    );

    let table = format!(
        "invariant: bf (doubled partition function)\nmanifold: {}\nk: {k}\nvalue: {closed} \
         (brute force {:.9}) [{}]\n",
        serde_json::to_string(&serialize_manifold(manifold)).expect("serializable"),
        result.value.re,
        if pass { "pass" } else { "MISMATCH" },
    );
    Ok(Outcome {
        exit: EXIT_OK,
        json: Value::Object(obj),
        table,
    })
}

/// Presentations that lower to a surgery link.
const SURGERY_PRESENTATIONS: [&str; 5] =
    ["surgery", "lens(p,q)", "sphere", "s1xs2", "connected-sum of these"];

fn run_rt(
    manifold: &ManifoldPresentation,
    level: u64,
    normalization: Normalization,
) -> Result<Outcome, Failure> {
    let link = manifold
        .surgery_link()
        .ok_or_else(|| Failure::unsupported("surgery data", &SURGERY_PRESENTATIONS))?;
    let result = rt_at_level(&link, level, normalization).map_err(rt_failure)?;
    let profile = manifold.profile();
    let closed = match normalization {
        Normalization::Moo if level % 4 == 0 => {
            Some(tau_abs_squared_closed(&profile, level / 4).map_err(rt_failure)?)
        }
        Normalization::Moo => Some(tau_odd_abs_squared_closed(&profile, level).map_err(rt_failure)?),
        Normalization::Raw => None,
    };
    let abs_squared = result.value.abs_squared();

    let mut obj = serde_json::Map::new();
    obj.insert("invariant".into(), json!("rt"));
    obj.insert("level".into(), json!(level));
    obj.insert("normalization".into(), json!(result.normalization.to_string()));
    obj.insert("manifold".into(), serialize_manifold(manifold));
    obj.insert("value".into(), complex_json(result.value));
    obj.insert("abs_squared".into(), json!(abs_squared));
    let mut cross_note = String::new();
    if let Some(closed) = &closed {
        let closed_f = closed.to_f64().unwrap_or(f64::INFINITY);
        let pass = rel_close(abs_squared, closed_f, VERIFY_TOLERANCE);
        obj.insert("closed_abs_squared".into(), number_from_bigint(closed));
        obj.insert("cross_check_pass".into(), json!(pass));
        cross_note = format!(
            "|tau|^2: {abs_squared:.9} (closed form {closed}) [{}]\n",
            if pass { "pass" } else { "MISMATCH" }
        );
    }
    obj.insert(
        "formula".into(),
        json!(match (normalization, level % 2) {
            (Normalization::Raw, _) =>
                "tau_N = Delta^sigma N^((-sigma-m-1)/2) sum over (Z_N)^m of exp(2 pi i pLp / N)",
            (Normalization::Moo, 0) =>
                "tau_4k = (Delta'/|Delta'|)^sigma |Delta'|^-m sum over (Z_2k)^m of \
                 exp(2 pi i pLp / 4k), |Delta'|^2 = 2k",
            (Normalization::Moo, _) =>
                "tau_n = (Delta/|Delta|)^sigma |Delta|^-m sum over (Z_n)^m of \
                 exp(2 pi i pLp / n), |Delta|^2 = n",
        }),
    );
    if link.components() == 0 && normalization == Normalization::Moo {
        obj.insert("exact".into(), json!({"kind": "integer", "value": 1}));
    }

    let table = format!(
        "invariant: rt (surgery invariant, {} normalization)\nmanifold: {}\nlevel: {level}\n\
         value: {}\n{cross_note}",
        result.normalization,
        serde_json::to_string(&serialize_manifold(manifold)).expect("serializable"),
        result.value,
    );
    Ok(Outcome {
        exit: EXIT_OK,
        json: Value::Object(obj),
        table,
    })
}

/// Presentations that lower to a cell decomposition.
const CELL_PRESENTATIONS: [&str; 5] = ["cells", "sphere", "s1xs2", "lens(p,q)", "rp3-heegaard"];

fn run_tv(manifold: &ManifoldPresentation, level: u64) -> Result<Outcome, Failure> {
    let complex = manifold
        .cell_complex()
        .ok_or_else(|| Failure::unsupported("a cell decomposition", &CELL_PRESENTATIONS))?;
    let value = tv_algebraic(&complex, level).map_err(tv_failure)?;

    let mut obj = serde_json::Map::new();
    obj.insert("invariant".into(), json!("tv"));
    obj.insert("level".into(), json!(level));
    obj.insert("manifold".into(), serialize_manifold(manifold));
    obj.insert(
        "value".into(),
        json!({"re": value.to_f64().unwrap_or(f64::INFINITY), "im": 0.0}),
    );
    obj.insert(
        "exact".into(),
        json!({"kind": "integer", "value": number_from_bigint(&value)}),
    );
    let cross_note = match tv_bruteforce(&complex, level) {
        Ok(brute) => {
            let pass = brute == value;
            obj.insert("bruteforce".into(), number_from_bigint(&brute));
            obj.insert("cross_check_pass".into(), json!(pass));
            format!(
                "brute-force cross-check: {brute} [{}]\n",
                if pass { "pass" } else { "MISMATCH" }
            )
        }
        Err(TvError::EnumerationTooLarge { .. }) => {
            obj.insert("bruteforce_skipped".into(), json!(true));
            "brute-force cross-check skipped: enumeration above cap\n".to_string()
        }
        Err(e) => return Err(tv_failure(e)),
    };
    obj.insert(
        "formula".into(),
        json!("Y_n = number of closed edge labelings over Z_n / n^(v-1)"),
    );

    let table = format!(
        "invariant: tv (state sum)\nmanifold: {}\nlevel: {level}\nvalue: {value}\n{cross_note}",
        serde_json::to_string(&serialize_manifold(manifold)).expect("serializable"),
    );
    Ok(Outcome {
        exit: EXIT_OK,
        json: Value::Object(obj),
        table,
    })
}

fn run_verify(
    suite: Suite,
    manifold: Option<&str>,
    pmax: i64,
    kmax: u64,
    nmax: u64,
    normalization: Normalization,
) -> Result<Outcome, Failure> {
    let target = match manifold {
        Some(source) => Some((source.to_string(), load_manifold(source)?)),
        None => None,
    };
    verify_outcome(suite, target, pmax, kmax, nmax, normalization)
}

fn verify_outcome(
    suite: Suite,
    manifold: Option<(String, ManifoldPresentation)>,
    pmax: i64,
    kmax: u64,
    nmax: u64,
    normalization: Normalization,
) -> Result<Outcome, Failure> {
    let (name, reports) = match suite {
        Suite::Lemma2 => ("lemma2", verify_suite_lemma2(pmax, kmax)?),
        Suite::Lemma3Rt => ("lemma3-rt", verify_suite_lemma3_rt(pmax, kmax)?),
        Suite::Lemma3Tv => ("lemma3-tv", verify_suite_lemma3_tv(manifold, nmax)?),
        Suite::Ribbon => ("ribbon", verify_suite_ribbon(nmax)?),
        Suite::Kirby => ("kirby", verify_suite_kirby(nmax, normalization)?),
    };
    let passed = reports.iter().all(Report::passed);
    let failed = reports.iter().filter(|r| !r.passed()).count();

    let json = json!({
        "suite": name,
        "passed": passed,
        "report_count": reports.len(),
        "reports": serde_json::to_value(&reports).expect("reports serialize"),
    });
    let mut table = String::new();
    for report in &reports {
        table.push_str(&report.render_table());
    }
    table.push_str(&format!(
        "suite {name}: {} reports, {failed} failed -> {}\n",
        reports.len(),
        if passed { "PASS" } else { "FAIL" },
    ));
    Ok(Outcome {
        exit: if passed { EXIT_OK } else { EXIT_VERIFICATION_FAILED },
        json,
        table,
    })
}

/// Coprime residues 1 <= q <= p.
fn coprime_residues(p: i64) -> Vec<i64> {
    (1..=p).filter(|q| q.gcd(&p) == 1).collect()
}

fn verify_suite_lemma2(pmax: i64, kmax: u64) -> Result<Vec<Report>, Failure> {
    let mut reports = Vec::new();
    for p in 1..=pmax {
        for q in coprime_residues(p) {
            let (profile, form) = lens_space(p, q).map_err(manifold_failure)?;
            for k in 1..=kmax {
                let mut report =
                    verify_lemma2(&profile, &form, k).map_err(partition_failure)?;
                report.title = format!("L({p},{q}): {}", report.title);
                reports.push(report);
            }
        }
    }
    // One representative with a free factor: the identities degenerate to 1.
    let free = crate::topology::HomologyProfile::new(1, vec![]).expect("valid profile");
    let empty = crate::topology::LinkingForm::empty();
    for k in 1..=kmax {
        let mut report = verify_lemma2(&free, &empty, k).map_err(partition_failure)?;
        report.title = format!("S1xS2: {}", report.title);
        reports.push(report);
    }
    Ok(reports)
}

fn verify_suite_lemma3_rt(pmax: i64, kmax: u64) -> Result<Vec<Report>, Failure> {
    let mut links: Vec<(String, SurgeryLink)> = vec![
        ("empty link".to_string(), SurgeryLink::empty()),
        (
            "zero-framed unknot".to_string(),
            SurgeryLink::new(IntegerMatrix::from_rows(&[vec![0]])).expect("symmetric"),
        ),
    ];
    for p in 2..=pmax {
        for q in coprime_residues(p) {
            links.push((
                format!("chain({p},{q})"),
                lens_chain(p, q).map_err(manifold_failure)?,
            ));
        }
    }
    let mut reports = Vec::new();
    for (name, link) in &links {
        for k in 1..=kmax {
            let mut report = verify_lemma3_part1(link, k).map_err(cross_check_failure)?;
            report.title = format!("{name}: {}", report.title);
            reports.push(report);
        }
        // Odd levels: the squared modulus counts cohomology classes.
        let profile = link.homology();
        let mut odd = Report::new(format!("{name}: odd-level |tau|^2 counts cohomology"));
        for n in (1..=(2 * kmax + 1)).filter(|n| n % 2 == 1) {
            let tau = rt_odd(link, n).map_err(rt_failure)?;
            let closed = tau_odd_abs_squared_closed(&profile, n).map_err(rt_failure)?;
            odd.push(
                format!("level {n}"),
                format!("{:.9}", tau.value.abs_squared()),
                closed.to_string(),
                rel_close(
                    tau.value.abs_squared(),
                    closed.to_f64().unwrap_or(f64::INFINITY),
                    VERIFY_TOLERANCE,
                ),
            );
        }
        reports.push(odd);
    }
    Ok(reports)
}

fn verify_suite_lemma3_tv(
    manifold: Option<(String, ManifoldPresentation)>,
    nmax: u64,
) -> Result<Vec<Report>, Failure> {
    let targets: Vec<(String, ManifoldPresentation)> = match manifold {
        Some(target) => vec![target],
        None => ["s3", "s1xs2", "rp3", "rp3-heegaard", "lens(6,1)"]
            .iter()
            .map(|name| {
                let m = resolve_named(name)
                    .expect("fixture names are valid")
                    .expect("fixture names resolve");
                (name.to_string(), m)
            })
            .collect(),
    };
    let mut reports = Vec::new();
    for (name, m) in &targets {
        for n in 1..=nmax {
            let mut report = verify_lemma3_tv(m, n).map_err(cross_check_failure)?;
            report.title = format!("{name}: {}", report.title);
            reports.push(report);
        }
    }
    Ok(reports)
}

fn verify_suite_ribbon(nmax: u64) -> Result<Vec<Report>, Failure> {
    let mut reports = Vec::new();
    for n in 1..=nmax {
        for epsilon in [Epsilon::Plus, Epsilon::Minus] {
            let category = CategoryZn::new(n, epsilon)
                .map_err(|e| Failure::input(e.to_string()))?;
            reports.push(verify_ribbon_axioms(&category));
        }
    }
    Ok(reports)
}

/// Deterministic family of small symmetric linking matrices for the blow-up
/// suite: every 1x1 framing in [-6, 6], then 2x2 matrices in a fixed order.
fn kirby_link_family() -> Vec<SurgeryLink> {
    let mut links = vec![SurgeryLink::empty()];
    for d in -6..=6i64 {
        links.push(SurgeryLink::new(IntegerMatrix::from_rows(&[vec![d]])).expect("symmetric"));
    }
    'outer: for a in -2..=2i64 {
        for b in 0..=2i64 {
            for c in -1..=1i64 {
                if links.len() >= 40 {
                    break 'outer;
                }
                links.push(
                    SurgeryLink::new(IntegerMatrix::from_rows(&[vec![a, b], vec![b, c]]))
                        .expect("symmetric"),
                );
            }
        }
    }
    links
}

/// Embedding API: resolves a manifold description (well-known name, inline
/// JSON, or file path), or returns `(status, error_json)` following the same
/// taxonomy as the command-line interface.
pub fn api_parse_manifold(spec: &str) -> Result<ManifoldPresentation, (i32, String)> {
    load_manifold(spec).map_err(|failure| (failure.exit, pretty(&failure_json(&failure))))
}

/// Embedding API: the homology summary as `(status, json)`.
pub fn api_homology(manifold: &ManifoldPresentation) -> (i32, String) {
    finish_api(homology_outcome(manifold))
}

/// Embedding API: one invariant evaluation as `(status, json)`. `parameter`
/// is the coupling for the partition functions and the level for the surgery
/// invariant and the state sum.
pub fn api_invariant(
    manifold: &ManifoldPresentation,
    which: InvariantKind,
    parameter: u64,
    normalization: Normalization,
) -> (i32, String) {
    let (k, level) = match which {
        InvariantKind::Cs | InvariantKind::Bf => (Some(parameter), None),
        InvariantKind::Rt | InvariantKind::Tv => (None, Some(parameter)),
    };
    finish_api(invariant_outcome(manifold, which, k, level, normalization))
}

/// Embedding API: one verification suite as `(status, json)`; status 0 means
/// every check passed, 1 means the suite ran and some check failed.
pub fn api_verify(
    suite: Suite,
    manifold: Option<&ManifoldPresentation>,
    pmax: i64,
    kmax: u64,
    nmax: u64,
    normalization: Normalization,
) -> (i32, String) {
    let target = manifold.map(|m| ("given manifold".to_string(), m.clone()));
    finish_api(verify_outcome(suite, target, pmax, kmax, nmax, normalization))
}

fn finish_api(result: Result<Outcome, Failure>) -> (i32, String) {
    match result {
        Ok(outcome) => (outcome.exit, pretty(&outcome.json)),
        Err(failure) => (failure.exit, pretty(&failure_json(&failure))),
    }
}

fn verify_suite_kirby(nmax: u64, normalization: Normalization) -> Result<Vec<Report>, Failure> {
    let levels: Vec<u64> = [3, 5, 8, 12].into_iter().filter(|l| *l <= nmax).collect();
    if levels.is_empty() {
        return Err(Failure::usage("the blow-up suite needs --nmax >= 3"));
    }
    let links = kirby_link_family();
    let mut reports = Vec::new();
    for level in levels {
        for (index, link) in links.iter().enumerate() {
            let mut report =
                kirby_blowup_check(link, level, normalization).map_err(rt_failure)?;
            report.title = format!("link {index}: {}", report.title);
            reports.push(report);
        }
    }
    Ok(reports)
}
