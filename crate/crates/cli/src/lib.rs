//! The `arclab` command line.
//!
//! [`run`] parses arguments, executes one command and writes its report to
//! the given stream. The process exit code is the returned value: `0` when
//! everything checked out, `1` on a verification mismatch or red flag, `2`
//! on a usage or parse error.

use std::io::Write;
use std::sync::Arc;

use arclab::convex::{convex_cuts_bounded, max_divisible, ConvexCut};
use arclab::hahn::{parse_series, HahnField};
use arclab::logic::{eval_decidable, eval_sampled, parse_formula_over, Assignment, EvalOutcome};
use arclab::oag::{parse_group, LexWord};
use arclab::valuations::{
    classification_report_with, differential_verify_with, enumerate_definable, example,
    v_p_descriptor, verify_thm_defblrcf, Checks, ClassificationReport, DifferentialConfig,
    DifferentialReport, ReportConfig, EXAMPLES,
};
use arclab::Error;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "arclab",
    version,
    about = "Definable henselian valuations on Hahn series fields"
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Seed for all sampling.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Random series per differential run, and candidates per sampled quantifier.
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    /// Candidates per quantifier when refuting clauses in differential runs.
    /// Defaults to --samples for `verify phi-p` and `verify phi-pn` and to 0
    /// (no refutation) for reports.
    #[arg(long, global = true)]
    pub witness_samples: Option<usize>,
    /// Primes shown in tables.
    #[arg(long, global = true, value_delimiter = ',', default_value = "2,3,5,7")]
    pub primes: Vec<u64>,
    /// Series precision, as a multiple of the leading unit of the group.
    #[arg(long, global = true, default_value_t = 8)]
    pub cutoff: i64,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Value group analysis.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Henselian valuations of R((G)).
    #[command(subcommand)]
    Valuations(ValuationsCmd),
    /// Formulas in the language of rings.
    #[command(subcommand)]
    Formula(FormulaCmd),
    /// Verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Full report for a built-in example; lists them without a name.
    Examples { name: Option<String> },
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// n_p, the convex subgroups and the derived verdicts.
    Analyze { group: String },
}

#[derive(Subcommand, Debug)]
enum ValuationsCmd {
    /// The definable henselian valuations and the named coarsenings.
    List { group: String },
}

#[derive(Subcommand, Debug)]
enum FormulaCmd {
    /// Evaluates a formula at series values.
    Eval {
        #[arg(long)]
        group: String,
        #[arg(long)]
        expr: String,
        /// Bindings such as `x = t^(1,0); y = 2 - t^(0,1)`, separated by `;`.
        #[arg(long, default_value = "")]
        at: String,
        /// Sample quantifiers instead of deciding them.
        #[arg(long)]
        sampled: bool,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// phi_p against the ring of v_p.
    PhiP {
        #[arg(long)]
        group: String,
        #[arg(short)]
        p: u64,
    },
    /// phi_(p,n) against the ring of v_(p,n).
    PhiPn {
        #[arg(long)]
        group: String,
        #[arg(short)]
        p: u64,
        #[arg(short)]
        n: u32,
    },
    /// The three conditions for a definable valuation with real closed residue field.
    Thm26 {
        #[arg(long)]
        group: String,
    },
    /// The full classification with differential checks.
    Classification {
        #[arg(long)]
        group: String,
    },
}

/// A failure mapped to an exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn group_of(text: &str) -> std::result::Result<LexWord, Failure> {
    parse_group(text).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("group `{text}`: {e}"),
    })
}

fn report_config(c: &RunConfig, samples: usize) -> ReportConfig {
    ReportConfig {
        display_primes: c.primes.clone(),
        samples,
        witness_samples: c.witness_samples.unwrap_or(0),
        seed: c.seed,
        cutoff: c.cutoff,
    }
}

fn emit<T: Serialize>(
    c: &RunConfig,
    out: &mut dyn Write,
    value: &T,
    text: &str,
) -> std::io::Result<()> {
    if c.json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(value).expect("serializable")
        )
    } else {
        write!(out, "{text}")
    }
}

fn report_exit(r: &ClassificationReport) -> i32 {
    if r.passed() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let c = &cli.config;
    for &p in &c.primes {
        if !arclab::primes::is_prime(p) {
            return Err(Error::NotPrime(p).into());
        }
    }
    match &cli.command {
        Command::Group(GroupCmd::Analyze { group }) => {
            let r = classification_report_with(&group_of(group)?, &report_config(c, 0))?;
            emit(c, out, &r, &r.to_string())?;
            Ok(report_exit(&r))
        }
        Command::Valuations(ValuationsCmd::List { group }) => {
            valuations_list(c, &group_of(group)?, out)
        }
        Command::Formula(FormulaCmd::Eval {
            group,
            expr,
            at,
            sampled,
        }) => formula_eval(c, &group_of(group)?, expr, at, *sampled, out),
        Command::Verify(v) => verify(c, v, out),
        Command::Examples { name: None } => {
            for e in EXAMPLES {
                writeln!(out, "{:<8} {:<32} {}", e.name, e.group, e.description)?;
            }
            Ok(EXIT_OK)
        }
        Command::Examples { name: Some(name) } => {
            let e = example(name).ok_or_else(|| Failure {
                code: EXIT_USAGE,
                message: format!("unknown example `{name}`; try `arclab examples`"),
            })?;
            let w = group_of(e.group)?.named(e.name);
            let r = classification_report_with(&w, &report_config(c, c.samples))?;
            let text = format!("example {}: {}\n{r}", e.name, e.description);
            emit(c, out, &r, &text)?;
            Ok(report_exit(&r))
        }
    }
}

#[derive(Serialize)]
struct NamedValuation {
    name: String,
    cut: String,
}

#[derive(Serialize)]
struct DefinableItem {
    cut: String,
    labels: Vec<String>,
    formula: &'static str,
    trivial: bool,
}

#[derive(Serialize)]
struct ValuationList {
    group: String,
    named: Vec<NamedValuation>,
    definable: Vec<DefinableItem>,
}

fn valuations_list(c: &RunConfig, w: &LexWord, out: &mut dyn Write) -> Outcome {
    let g = Arc::new(w.clone());
    let mut named = vec![NamedValuation {
        name: "v_K".into(),
        cut: ConvexCut::bottom(w).label(w),
    }];
    named.push(NamedValuation {
        name: "v_0".into(),
        cut: max_divisible(w).label(w),
    });
    for &p in &c.primes {
        named.push(NamedValuation {
            name: format!("v_{p}"),
            cut: v_p_descriptor(&g, p)?.cut.label(w),
        });
    }
    named.push(NamedValuation {
        name: "trivial".into(),
        cut: ConvexCut::TOP.label(w),
    });
    let definable: Vec<DefinableItem> = enumerate_definable(w, &c.primes)
        .iter()
        .map(|d| DefinableItem {
            cut: d.label(w),
            labels: d.labels.iter().map(|l| l.to_string()).collect(),
            formula: d.formula(),
            trivial: d.is_trivial(),
        })
        .collect();
    let mut text = format!("group: {w}\n");
    let chain: Vec<String> = convex_cuts_bounded(w, 3)
        .iter()
        .map(|k| k.label(w))
        .collect();
    text += &format!(
        "convex subgroups: {}{}\n",
        chain.join(" > "),
        if chain_is_cut_short(w) {
            " (tower cuts abbreviated)"
        } else {
            ""
        }
    );
    for n in &named {
        text += &format!("{:<8} = {}\n", n.name, n.cut);
    }
    text += "definable:\n";
    for d in &definable {
        let trivial = if d.trivial {
            " (trivial valuation)"
        } else {
            ""
        };
        text += &format!(
            "  {:<36} {} via {}{trivial}\n",
            d.cut,
            d.labels.join(" "),
            d.formula
        );
    }
    emit(
        c,
        out,
        &ValuationList {
            group: w.to_string(),
            named,
            definable,
        },
        &text,
    )?;
    Ok(EXIT_OK)
}

fn chain_is_cut_short(w: &LexWord) -> bool {
    w.components.iter().any(|k| k.is_tower())
}

/// Splits `x = ...; y = ...` into bindings.
fn parse_bindings(k: &HahnField, at: &str) -> std::result::Result<Assignment, Failure> {
    let mut env = Assignment::new();
    for part in at.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = part.split_once('=').ok_or_else(|| Failure {
            code: EXIT_USAGE,
            message: format!("binding `{part}` needs the form name = series"),
        })?;
        let s = parse_series(&k.group, value.trim()).map_err(|e| Failure {
            code: EXIT_USAGE,
            message: format!("value of `{}`: {e}", name.trim()),
        })?;
        env.insert(name.trim().to_string(), s);
    }
    Ok(env)
}

#[derive(Serialize)]
struct FormulaResult {
    formula: String,
    at: Vec<(String, String)>,
    method: &'static str,
    value: Option<bool>,
    outcome: String,
    witness: Vec<(String, String)>,
}

fn formula_eval(
    c: &RunConfig,
    w: &LexWord,
    expr: &str,
    at: &str,
    sampled: bool,
    out: &mut dyn Write,
) -> Outcome {
    let k = HahnField::new(w.clone(), c.cutoff)?;
    let f = parse_formula_over(expr, &k.group)?;
    let env = parse_bindings(&k, at)?;
    let decided = if sampled {
        None
    } else {
        Some(eval_decidable(&f, &env, &k))
    };
    let mut res = FormulaResult {
        formula: f.to_string(),
        at: env
            .iter()
            .map(|(v, s)| (v.clone(), s.to_string()))
            .collect(),
        method: "decision",
        value: None,
        outcome: String::new(),
        witness: Vec::new(),
    };
    match decided {
        Some(Ok(b)) => {
            res.value = Some(b);
            res.outcome = b.to_string();
        }
        Some(Err(e @ Error::UnsupportedQuantifierPattern(_)))
        | Some(Err(e @ Error::Precision(_))) => {
            res.outcome = format!("undecided ({e}); sampled: ");
            sampled_into(&mut res, &f, &env, &k, c)?;
        }
        Some(Err(e)) => return Err(e.into()),
        None => sampled_into(&mut res, &f, &env, &k, c)?,
    }
    let mut text = format!("{}\n", res.formula);
    for (v, s) in &res.at {
        text += &format!("  {v} = {s}\n");
    }
    text += &format!("{}: {}\n", res.method, res.outcome);
    for (v, s) in &res.witness {
        text += &format!("  {v} = {s}\n");
    }
    emit(c, out, &res, &text)?;
    Ok(EXIT_OK)
}

fn sampled_into(
    res: &mut FormulaResult,
    f: &arclab::logic::Formula,
    env: &Assignment,
    k: &HahnField,
    c: &RunConfig,
) -> std::result::Result<(), Failure> {
    res.method = "sampling";
    let o = eval_sampled(f, env, k, c.samples, c.seed)?;
    let (label, witness) = match &o {
        EvalOutcome::True => ("true", None),
        EvalOutcome::Witnessed(a) => ("true, witnessed by", Some(a)),
        EvalOutcome::False => ("false", None),
        EvalOutcome::FalsifiedBy(a) => ("false, refuted by", Some(a)),
        EvalOutcome::UnknownOnSample => ("unknown on the sample", None),
    };
    res.value = match o {
        EvalOutcome::UnknownOnSample => None,
        _ => Some(o.holds()),
    };
    res.outcome.push_str(label);
    if let Some(a) = witness {
        res.witness = a
            .iter()
            .filter(|(v, _)| !env.contains_key(*v))
            .map(|(v, s)| (v.clone(), s.to_string()))
            .collect();
    }
    Ok(())
}

fn differential_text(r: &DifferentialReport, what: &str) -> String {
    let mut s = format!(
        "{what} over {}: {} samples + {} boundary monomials, {} mismatches\n",
        r.group,
        r.samples,
        r.boundary,
        r.mismatches.len()
    );
    s += &format!(
        "clause instances rejected by the decision: {} refuted by sampling, {} not\n",
        r.refuted, r.unrefuted
    );
    for m in &r.mismatches {
        s += &format!(
            "MISMATCH {} at x = {}: expected {}, got {}\n",
            m.check, m.x, m.expected, m.got
        );
    }
    s
}

fn verify(c: &RunConfig, v: &VerifyCmd, out: &mut dyn Write) -> Outcome {
    let dcfg = |checks| DifferentialConfig {
        samples: c.samples,
        seed: c.seed,
        witness_samples: c.witness_samples.unwrap_or(c.samples),
        checks,
    };
    match v {
        VerifyCmd::PhiP { group, p } => {
            let k = HahnField::new(group_of(group)?, c.cutoff)?;
            let r = differential_verify_with(&k, *p, 0, dcfg(Checks::PhiP))?;
            emit(
                c,
                out,
                &r,
                &differential_text(&r, &format!("phi_{p} against v_{p}")),
            )?;
            Ok(if r.passed() { EXIT_OK } else { EXIT_MISMATCH })
        }
        VerifyCmd::PhiPn { group, p, n } => {
            let k = HahnField::new(group_of(group)?, c.cutoff)?;
            let r = differential_verify_with(&k, *p, *n, dcfg(Checks::PhiPn))?;
            emit(
                c,
                out,
                &r,
                &differential_text(&r, &format!("phi_({p},{n}) against v_({p},{n})")),
            )?;
            Ok(if r.passed() { EXIT_OK } else { EXIT_MISMATCH })
        }
        VerifyCmd::Thm26 { group } => {
            let w = group_of(group)?;
            let r = verify_thm_defblrcf(&w);
            let text = format!(
                "group: {w}\n(1) some definable henselian valuation has real closed residue field: {}\n\
                 (2) some prime p has G_p = G_0: {} (primes: {})\n(3) v_0 is definable: {}\nconsistent: {}\n",
                r.cond1, r.cond2, r.primes, r.cond3, r.consistent
            );
            emit(c, out, &r, &text)?;
            Ok(if r.consistent { EXIT_OK } else { EXIT_MISMATCH })
        }
        VerifyCmd::Classification { group } => {
            let r = classification_report_with(&group_of(group)?, &report_config(c, c.samples))?;
            emit(c, out, &r, &r.to_string())?;
            Ok(report_exit(&r))
        }
    }
}
