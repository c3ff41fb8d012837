//! Batch command-line surface.
//!
//! Every command prints one JSON report (or a plain table with `--plain`) and
//! exits with 0 on success, 1 when a checked property fails or a request is
//! refused, and 2 on malformed input.

use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cayley::{ball, central_power_length_upper, growth_compare, GroupContext, DEFAULT_RADIUS_CAP};
use crate::dehn::{is_trivial_in_g_with, MoveRecord, Strategy};
use crate::extension::{
    evaluate, evaluate_with, extension_presentation, order_probe, parse_alpha, AlphaSequence,
    ExtensionElement,
};
use crate::invariants::{are_distinguished, is_rich, weak_boundedness_bound};
use crate::smallcancellation::{proper_power_relators, verify_metric_condition};
use crate::words::Word;

pub const RADIUS_CAP_ENV: &str = "QICLASS_RADIUS_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qiclass", version, about = "Word problem, central extensions and class invariants for the small-cancellation group G")]
pub struct Cli {
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    plain: bool,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupKind {
    #[value(name = "G")]
    G,
    #[value(name = "GxZ")]
    GxZ,
    /// The extension E_alpha (requires --alpha).
    #[value(name = "E")]
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    Deterministic,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check C'(lambda) and the no-proper-power property for r_0..r_max.
    Check {
        #[arg(long, value_parser = parse_lambda)]
        lambda: Ratio<i64>,
        #[arg(long, default_value_t = 10)]
        max_index: usize,
    },
    /// Decide whether a word is trivial in G, or evaluate it in E_alpha.
    Solve {
        word: String,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, value_enum, default_value_t = StrategyKind::Deterministic)]
        strategy: StrategyKind,
    },
    /// Rich / weakly bounded certificates, and distinguishedness of two sequences.
    Invariants {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: Option<String>,
    },
    /// Exact ball sizes in the Cayley graph.
    Ball {
        #[arg(long, value_enum, default_value_t = GroupKind::G)]
        group: GroupKind,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        radius: usize,
        /// Overrides QICLASS_RADIUS_CAP and the built-in cap.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Side-by-side ball sizes; defaults to E_alpha against GxZ.
    Compare {
        #[arg(long, value_enum, default_value_t = GroupKind::E)]
        left: GroupKind,
        #[arg(long, value_enum, default_value_t = GroupKind::GxZ)]
        right: GroupKind,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// A word over the generators of G equal to z^n in E_alpha.
    Zpower {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u32,
        /// Relator indices searched for the gcd witness; defaults to the whole representation.
        #[arg(long)]
        max_index: Option<usize>,
    },
    /// Exhaustive search for w != 1 with w^k = 1.
    ProbeTorsion {
        #[arg(long, value_enum, default_value_t = GroupKind::G)]
        group: GroupKind,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        #[arg(long, default_value_t = 4)]
        max_exp: u32,
    },
    /// Print the truncated presentation of E_alpha.
    Presentation {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 3)]
        max_index: usize,
    },
}

fn parse_lambda(text: &str) -> Result<Ratio<i64>, String> {
    let lambda: Ratio<i64> = text
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a rational number like 1/7"))?;
    if lambda <= Ratio::from_integer(0) || lambda >= Ratio::from_integer(1) {
        return Err(format!("lambda must satisfy 0 < lambda < 1, got {lambda}"));
    }
    Ok(lambda)
}

/// Stable JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub verdict: String,
    pub witnesses: Vec<Value>,
    pub trace: Vec<MoveRecord>,
    pub counts: Vec<u64>,
    pub bound: Option<u64>,
    pub seed: u64,
    pub elapsed_ms: u64,
    pub version: String,
}

impl RunReport {
    fn new(command: &str, inputs: Value, seed: u64) -> RunReport {
        RunReport {
            command: command.to_string(),
            inputs,
            verdict: String::new(),
            witnesses: Vec::new(),
            trace: Vec::new(),
            counts: Vec::new(),
            bound: None,
            seed,
            elapsed_ms: 0,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// What a command produced: exit code, stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Outcome {
    code: i32,
    report: RunReport,
    plain: String,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn parse_word(text: &str) -> Result<Word, InputError> {
    Word::parse(text).map_err(|e| InputError(format!("word: {e}")))
}

fn parse_seq(name: &str, text: &str) -> Result<AlphaSequence, InputError> {
    parse_alpha(text).map_err(|e| InputError(format!("{name}: {e}")))
}

fn context(kind: GroupKind, alpha: Option<&str>) -> Result<GroupContext, InputError> {
    Ok(match kind {
        GroupKind::G => GroupContext::G,
        GroupKind::GxZ => GroupContext::GxZ,
        GroupKind::E => {
            let text = alpha.ok_or_else(|| InputError("group E requires --alpha".into()))?;
            GroupContext::Extension(parse_seq("alpha", text)?)
        }
    })
}

fn radius_cap(flag: Option<usize>) -> Result<usize, InputError> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(RADIUS_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| InputError(format!("{RADIUS_CAP_ENV}=`{v}` is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_RADIUS_CAP),
    }
}

fn element_json(e: &ExtensionElement) -> Value {
    json!({ "g_word": e.g_word.to_string(), "z_exp": e.z_exp })
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok(mut outcome) => {
            outcome.report.elapsed_ms = start.elapsed().as_millis() as u64;
            let stdout = if cli.plain {
                outcome.plain
            } else {
                serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n"
            };
            CliOutput {
                code: outcome.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(InputError(msg)) => CliOutput {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn execute(cli: &Cli) -> Result<Outcome, InputError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Check { lambda, max_index } => cmd_check(*lambda, *max_index, seed),
        Command::Solve { word, alpha, strategy } => cmd_solve(word, alpha.as_deref(), *strategy, seed),
        Command::Invariants { alpha, beta } => cmd_invariants(alpha, beta.as_deref(), seed),
        Command::Ball { group, alpha, radius, cap } => {
            cmd_ball(*group, alpha.as_deref(), *radius, radius_cap(*cap)?, seed)
        }
        Command::Compare { left, right, alpha, radius, cap } => {
            cmd_compare(*left, *right, alpha.as_deref(), *radius, radius_cap(*cap)?, seed)
        }
        Command::Zpower { alpha, n, max_index } => cmd_zpower(alpha, *n, *max_index, seed),
        Command::ProbeTorsion { group, alpha, max_len, max_exp } => {
            cmd_probe(*group, alpha.as_deref(), *max_len, *max_exp, seed)
        }
        Command::Presentation { alpha, max_index } => cmd_presentation(alpha, *max_index, seed),
    }
}

fn cmd_check(lambda: Ratio<i64>, max_index: usize, seed: u64) -> Result<Outcome, InputError> {
    let metric = verify_metric_condition(lambda, max_index)?;
    let powers = proper_power_relators(max_index);
    let pass = metric.pass && powers.is_empty();
    let mut report = RunReport::new(
        "check",
        json!({ "lambda": lambda.to_string(), "max_index": max_index }),
        seed,
    );
    report.verdict = if pass { "PASS" } else { "FAIL" }.to_string();
    report.witnesses.push(json!({ "kind": "worst_piece", "ratio": metric.worst_ratio, "piece": metric.worst }));
    for (index, w) in &metric.first_violations {
        report.witnesses.push(json!({ "kind": "violation", "relator_index": index, "piece": w }));
    }
    for (index, root, k) in &powers {
        report.witnesses.push(json!({ "kind": "proper_power", "relator_index": index, "root": root, "exponent": k }));
    }
    report.witnesses.push(json!({
        "kind": "summary",
        "checked_range": format!("0..={max_index}"),
        "checked_words": metric.checked_words,
        "violating_words": metric.violations,
        "proper_powers": powers.len(),
    }));
    let mut plain = format!(
        "C'({lambda}) on r_0..r_{max_index}: {}\nworst piece ratio {} at r_{} ({}): {}\n",
        if metric.pass { "PASS" } else { "FAIL" },
        metric.worst_ratio,
        metric.worst.relator_index,
        metric.worst.piece_length,
        metric.worst.piece,
    );
    plain.push_str(&format!("violating symmetrized words: {}\n", metric.violations));
    plain.push_str(&format!("proper powers: {}\n", powers.len()));
    plain.push_str(&format!("verdict: {}\n", report.verdict));
    Ok(Outcome {
        code: if pass { EXIT_OK } else { EXIT_VIOLATION },
        report,
        plain,
    })
}

fn cmd_solve(word: &str, alpha: Option<&str>, strategy: StrategyKind, seed: u64) -> Result<Outcome, InputError> {
    let w = parse_word(word)?;
    let strat = match strategy {
        StrategyKind::Deterministic => Strategy::Deterministic,
        StrategyKind::Random => Strategy::SeededRandom(seed),
    };
    let mut report = RunReport::new(
        "solve",
        json!({ "word": w.to_string(), "alpha": alpha, "strategy": format!("{strategy:?}").to_lowercase() }),
        seed,
    );
    let (trivial, trace, element) = match alpha {
        Some(text) => {
            let a = parse_seq("alpha", text)?;
            let (e, trace) = evaluate_with(&a, &w, strat);
            (e.g_word.is_empty() && e.z_exp == 0, trace, Some(e))
        }
        None => {
            let (trivial, trace) = is_trivial_in_g_with(&w, strat)?;
            (trivial, trace, None)
        }
    };
    report.verdict = if trivial { "trivial" } else { "nontrivial" }.to_string();
    let mut normal = json!({ "initial": trace.initial.to_string(), "final": trace.final_word.to_string() });
    if let Some(e) = &element {
        normal["z_exp"] = json!(e.z_exp);
    }
    report.witnesses.push(normal);
    report.trace = trace.records();
    let mut plain = format!("verdict: {}\nfinal word: {}\n", report.verdict, trace.final_word);
    if let Some(e) = &element {
        plain.push_str(&format!("element: {e}\n"));
    }
    plain.push_str("moves (position, relator, sign, rotation, matched):\n");
    for m in &report.trace {
        plain.push_str(&format!(
            "  {}\t{}\t{:+}\t{}\t{}\n",
            m.position, m.relator_index, m.sign, m.rotation, m.matched_length
        ));
    }
    Ok(Outcome { code: EXIT_OK, report, plain })
}

fn cmd_invariants(alpha: &str, beta: Option<&str>, seed: u64) -> Result<Outcome, InputError> {
    let a = parse_seq("alpha", alpha)?;
    let b = beta.map(|t| parse_seq("beta", t)).transpose()?;
    let mut report = RunReport::new("invariants", json!({ "alpha": a, "beta": b }), seed);
    let mut verdicts = Vec::new();
    let mut plain = String::new();
    for (name, seq) in std::iter::once(("alpha", &a)).chain(b.as_ref().map(|s| ("beta", s))) {
        let rich = is_rich(seq);
        let cert = weak_boundedness_bound(seq);
        let rich_text = if rich.rich {
            "rich".to_string()
        } else {
            format!("not rich (gcd {})", rich.gcd)
        };
        verdicts.push(format!("{name}: {rich_text}"));
        report.witnesses.push(json!({
            "kind": "rich",
            "sequence": name,
            "rich": rich.rich,
            "gcd": rich.gcd,
            "witness": rich.witness,
        }));
        report.witnesses.push(json!({
            "kind": "weakly_bounded",
            "sequence": name,
            "bound": cert.bound,
            "criterion": cert.criterion,
        }));
        plain.push_str(&format!("{name} = {seq}: {rich_text}; bound {}\n", cert.bound));
    }
    report.bound = Some(a.bound());
    if let Some(b) = &b {
        match are_distinguished(&a, b) {
            Some(d) => {
                verdicts.push("distinguished".into());
                plain.push_str(&format!(
                    "distinguished by {} (alpha: {}, beta: {})\n",
                    d.witness, d.value_alpha, d.value_beta
                ));
                report.witnesses.push(json!({
                    "kind": "distinguished",
                    "witness": d.witness,
                    "value_alpha": d.value_alpha,
                    "value_beta": d.value_beta,
                }));
            }
            None => {
                verdicts.push("not distinguished".into());
                plain.push_str("not distinguished (equal kernels)\n");
            }
        }
    }
    report.verdict = verdicts.join("; ");
    Ok(Outcome { code: EXIT_OK, report, plain })
}

fn refusal(mut report: RunReport, err: impl std::fmt::Display) -> Outcome {
    report.verdict = format!("refused: {err}");
    let plain = format!("{}\n", report.verdict);
    Outcome {
        code: EXIT_VIOLATION,
        report,
        plain,
    }
}

fn cmd_ball(kind: GroupKind, alpha: Option<&str>, radius: usize, cap: usize, seed: u64) -> Result<Outcome, InputError> {
    let ctx = context(kind, alpha)?;
    let report = RunReport::new(
        "ball",
        json!({ "group": ctx.to_string(), "radius": radius, "cap": cap }),
        seed,
    );
    match ball(&ctx, radius, cap) {
        Ok(growth) => {
            let mut report = report;
            report.verdict = "ok".into();
            report.counts = growth.counts.clone();
            Ok(Outcome {
                code: EXIT_OK,
                plain: growth.to_table(),
                report,
            })
        }
        Err(e) => Ok(refusal(report, e)),
    }
}

fn cmd_compare(
    left: GroupKind,
    right: GroupKind,
    alpha: Option<&str>,
    radius: usize,
    cap: usize,
    seed: u64,
) -> Result<Outcome, InputError> {
    let (l, r) = (context(left, alpha)?, context(right, alpha)?);
    let report = RunReport::new(
        "compare",
        json!({ "left": l.to_string(), "right": r.to_string(), "radius": radius, "cap": cap }),
        seed,
    );
    match growth_compare(&l, &r, radius, cap) {
        Ok(cmp) => {
            let mut report = report;
            report.verdict = if cmp.left.counts == cmp.right.counts {
                "equal counts"
            } else {
                "counts differ"
            }
            .into();
            report.counts = cmp.left.counts.clone();
            report.witnesses.push(json!({ "context": cmp.left.context, "counts": cmp.left.counts }));
            report.witnesses.push(json!({ "context": cmp.right.context, "counts": cmp.right.counts }));
            report.witnesses.push(json!({ "ratios": cmp.ratios }));
            Ok(Outcome {
                code: EXIT_OK,
                plain: cmp.to_table(),
                report,
            })
        }
        Err(e) => Ok(refusal(report, e)),
    }
}

fn cmd_zpower(alpha: &str, n: u32, max_index: Option<usize>, seed: u64) -> Result<Outcome, InputError> {
    let a = parse_seq("alpha", alpha)?;
    let max_index = max_index.unwrap_or(a.representative_len() - 1);
    let report = RunReport::new(
        "zpower",
        json!({ "alpha": a, "n": n, "max_index": max_index }),
        seed,
    );
    let word = match central_power_length_upper(&a, n, max_index) {
        Ok(w) => w,
        Err(e) => return Ok(refusal(report, e)),
    };
    let e = evaluate(&a, &word);
    let certified = e == ExtensionElement::central(i64::from(n));
    let mut report = report;
    report.verdict = if certified { "certified" } else { "FAIL" }.into();
    report.bound = Some(word.len() as u64);
    report.witnesses.push(json!({
        "word": word.to_string(),
        "length": word.len(),
        "evaluates_to": element_json(&e),
    }));
    let plain = format!(
        "z^{n} = {word}\nlength {} (upper bound on |z^{n}|), evaluates to {e}: {}\n",
        word.len(),
        report.verdict
    );
    Ok(Outcome {
        code: if certified { EXIT_OK } else { EXIT_VIOLATION },
        report,
        plain,
    })
}

fn cmd_probe(kind: GroupKind, alpha: Option<&str>, max_len: usize, max_exp: u32, seed: u64) -> Result<Outcome, InputError> {
    let ctx = context(kind, alpha)?;
    let witnesses = order_probe(&ctx, max_len, max_exp);
    let mut report = RunReport::new(
        "probe-torsion",
        json!({ "group": ctx.to_string(), "max_len": max_len, "max_exp": max_exp }),
        seed,
    );
    report.verdict = if witnesses.is_empty() {
        "no torsion found".into()
    } else {
        "torsion found".into()
    };
    report.witnesses = witnesses
        .iter()
        .map(|t| json!({ "word": t.word.to_string(), "exponent": t.exponent }))
        .collect();
    let plain = format!(
        "{} in {} (word length <= {max_len}, exponent <= {max_exp})\n",
        report.verdict, ctx
    );
    Ok(Outcome {
        code: if witnesses.is_empty() { EXIT_OK } else { EXIT_VIOLATION },
        report,
        plain,
    })
}

fn cmd_presentation(alpha: &str, max_index: usize, seed: u64) -> Result<Outcome, InputError> {
    let a = parse_seq("alpha", alpha)?;
    let p = extension_presentation(&a, max_index);
    let mut report = RunReport::new("presentation", json!({ "alpha": a, "max_index": max_index }), seed);
    report.verdict = "ok".into();
    report.witnesses = p
        .relators
        .iter()
        .chain(&p.commutators)
        .map(|w| Value::String(w.to_string()))
        .collect();
    Ok(Outcome {
        code: EXIT_OK,
        plain: p.to_text(),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> CliOutput {
        run(std::iter::once("qiclass").chain(args.iter().copied()))
    }

    fn report(out: &CliOutput) -> RunReport {
        serde_json::from_str(&out.stdout).expect("report parses")
    }

    #[test]
    fn lambda_parsing() {
        assert_eq!(parse_lambda("1/7").unwrap(), Ratio::new(1, 7));
        assert!(parse_lambda("0").is_err());
        assert!(parse_lambda("1").is_err());
        assert!(parse_lambda("x").is_err());
    }

    #[test]
    fn check_fails_with_tiny_lambda() {
        let out = run_args(&["check", "--lambda", "1/100", "--max-index", "0"]);
        assert_eq!(out.code, 1);
        assert_eq!(report(&out).verdict, "FAIL");
    }

    #[test]
    fn check_rejects_zero_lambda() {
        assert_eq!(run_args(&["check", "--lambda", "0"]).code, 2);
    }

    #[test]
    fn solve_relator() {
        let out = run_args(&["solve", "a1 a2 a1^-1 a2^-1 a3 a4 a3^-1 a4^-1"]);
        assert_eq!(out.code, 0);
        let r = report(&out);
        assert_eq!(r.verdict, "trivial");
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn solve_bad_word_is_input_error() {
        assert_eq!(run_args(&["solve", "a9"]).code, 2);
        assert_eq!(run_args(&["solve", "z"]).code, 2);
        assert_eq!(run_args(&["solve", "--alpha", "1,(", "a1"]).code, 2);
    }

    #[test]
    fn ball_requires_alpha_for_extension() {
        assert_eq!(run_args(&["ball", "--group", "E", "--radius", "1"]).code, 2);
    }

    #[test]
    fn ball_over_cap_is_refused() {
        let out = run_args(&["ball", "--radius", "5", "--cap", "3"]);
        assert_eq!(out.code, 1);
        assert!(report(&out).verdict.starts_with("refused"));
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_args(&["--help"]).code, 0);
    }
}
