//! Command-line front-end: `prove`, `check` and `translate`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | provable, or a valid countermodel was checked |
//! | 1 | unprovable, or the checked model forces the formula at its root |
//! | 2 | parse or flag error, non-tree labelled input, frame violation in `check` |
//! | 3 | budget exceeded |
//! | 4 | an emitted proof or countermodel failed its own verification |

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::calculus::check_proof;
use crate::formula::{self, Formula};
use crate::model::{extract_countermodel, Model};
use crate::search::{prove, search_sequent, Budget, Options, SearchResult, Verdict};
use crate::sequent::{EnrichedSequent, Sequent};
use crate::translate::{fl_nested, tr_labelled, LabelledSequent, Polarised};

pub const EXIT_ERROR: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ikp",
    version,
    about = "Decision procedure for intuitionistic modal logic IK"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a formula, or every line of a batch file.
    Prove {
        /// Formula text, e.g. "box (p -> q) -> box p -> box q".
        #[arg(required_unless_present = "batch", conflicts_with = "batch")]
        formula: Option<String>,
        /// One formula per line; `#` starts a comment.
        #[arg(long, value_name = "FILE")]
        batch: Option<PathBuf>,
        #[command(flatten)]
        out: OutputFlags,
        #[command(flatten)]
        budget: BudgetFlags,
    },
    /// Check a JSON model against a formula.
    Check {
        /// Model file in JSON, or `-` for stdin.
        model: PathBuf,
        formula: String,
    },
    /// Translate a labelled or polarised nested sequent into a bi-nested sequent.
    Translate {
        #[arg(value_enum)]
        from: Source,
        /// Input text, or `-` for stdin.
        input: String,
        /// Run proof search on the result.
        #[arg(long)]
        prove: bool,
        #[command(flatten)]
        out: OutputFlags,
        #[command(flatten)]
        budget: BudgetFlags,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Source {
    /// `xRy, x<=y, x:A |- y:B`.
    Labelled,
    /// `+A, -B, [ +C, { -D } ]`.
    Polarised,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelFormat {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct OutputFlags {
    /// Print the replay-checked proof when the verdict is provable.
    #[arg(long)]
    pub proof: bool,
    /// Print the verified countermodel when the verdict is unprovable.
    #[arg(long, value_enum, value_name = "FORMAT")]
    pub countermodel: Option<ModelFormat>,
    /// Print the search trace, one JSON event per line.
    #[arg(long)]
    pub trace: bool,
    /// Print search statistics as JSON on stderr.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Clone, Debug, clap::Args)]
pub struct BudgetFlags {
    /// Maximum number of rule applications.
    #[arg(long, value_name = "N")]
    pub max_steps: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long, value_name = "SECS")]
    pub timeout: Option<f64>,
}

impl BudgetFlags {
    fn budget(&self) -> Result<Budget, String> {
        let mut b = Budget::default();
        if let Some(n) = self.max_steps {
            b.max_rule_applications = n;
        }
        if let Some(t) = self.timeout {
            b.max_time = Duration::try_from_secs_f64(t).map_err(|e| format!("--timeout: {e}"))?;
        }
        Ok(b)
    }
}

/// Parses `args` and runs the command, writing to `out` and `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Prove {
            formula,
            batch,
            out: flags,
            budget,
        } => match batch {
            Some(path) => run_batch(&path, &budget, out),
            None => run_prove(
                formula.as_deref().unwrap_or_default(),
                &flags,
                &budget,
                out,
                err,
            ),
        },
        Command::Check { model, formula } => run_check(&model, &formula, out),
        Command::Translate {
            from,
            input,
            prove,
            out: flags,
            budget,
        } => run_translate(from, &input, prove, &flags, &budget, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

impl Failure {
    fn usage(msg: impl ToString) -> Self {
        Failure(EXIT_ERROR, msg.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(EXIT_ERROR, e.to_string())
    }
}

fn read_input(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(arg.to_string())
    }
}

fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Provable => 0,
        Verdict::Unprovable => 1,
        Verdict::BudgetExceeded => EXIT_BUDGET,
    }
}

fn run_prove(
    text: &str,
    flags: &OutputFlags,
    budget: &BudgetFlags,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let a = formula::parse(text).map_err(Failure::usage)?;
    let opts = Options {
        budget: budget.budget().map_err(Failure::usage)?,
        trace: flags.trace,
    };
    let r = prove(&a, opts);
    report(&r, flags, out, err)
}

/// Prints the verdict and requested artifacts, verifying each before it is shown.
fn report(
    r: &SearchResult,
    flags: &OutputFlags,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let v = r.outcome.verdict();
    writeln!(out, "{v}")?;
    if flags.proof && v == Verdict::Provable {
        let d = r.outcome.derivation();
        check_proof(d).map_err(|e| Failure(EXIT_INTERNAL, format!("proof replay: {e}")))?;
        write!(out, "{}", d.to_text())?;
    }
    if let (Some(fmt), Some(leaf)) = (flags.countermodel, r.outcome.leaf()) {
        let m = extract_countermodel(leaf)
            .map_err(|e| Failure(EXIT_INTERNAL, format!("countermodel: {e}")))?;
        match fmt {
            ModelFormat::Json => writeln!(out, "{}", m.to_json())?,
            ModelFormat::Dot => write!(out, "{}", m.to_dot())?,
            ModelFormat::Text => write!(out, "{}", m.to_text())?,
        }
    }
    if flags.trace {
        for ev in &r.trace {
            writeln!(
                out,
                "{}",
                serde_json::to_string(ev).expect("trace events serialize")
            )?;
        }
    }
    if flags.stats {
        writeln!(
            err,
            "{}",
            serde_json::to_string(&r.stats).expect("stats serialize")
        )?;
    }
    Ok(exit_code(v))
}

/// One result line of a batch run.
fn batch_line(text: &str, opts: Options) -> Result<Verdict, String> {
    let a = formula::parse(text).map_err(|e| e.to_string())?;
    let r = prove(&a, opts);
    match &r.outcome {
        o if o.verdict() == Verdict::Provable => {
            check_proof(o.derivation()).map_err(|e| format!("proof replay: {e}"))?
        }
        o => {
            if let Some(leaf) = o.leaf() {
                let m = extract_countermodel(leaf).map_err(|e| format!("countermodel: {e}"))?;
                if !m.refutes(&a) {
                    return Err("countermodel does not refute the formula".into());
                }
            }
        }
    }
    Ok(r.outcome.verdict())
}

fn run_batch(path: &PathBuf, budget: &BudgetFlags, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let opts = Options {
        budget: budget.budget().map_err(Failure::usage)?,
        trace: false,
    };
    let jobs: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let results: Vec<std::sync::Mutex<Option<Result<Verdict, String>>>> =
        jobs.iter().map(|_| std::sync::Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(_, line)) = jobs.get(k) else { break };
                *results[k].lock().expect("no poisoning") = Some(batch_line(line, opts));
            });
        }
    });
    let mut failed = false;
    for ((lineno, line), res) in jobs.iter().zip(results) {
        match res
            .into_inner()
            .expect("no poisoning")
            .expect("every job ran")
        {
            Ok(v) => writeln!(out, "{lineno}\t{v}\t{line}")?,
            Err(e) => {
                failed = true;
                writeln!(out, "{lineno}\terror\t{e}")?;
            }
        }
    }
    Ok(if failed { EXIT_ERROR } else { 0 })
}

fn run_check(path: &PathBuf, text: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let json = if path.as_os_str() == "-" {
        read_input("-")?
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
    };
    let m = Model::from_json(&json).map_err(|e| Failure::usage(format!("model: {e}")))?;
    let a: Formula = formula::parse(text).map_err(Failure::usage)?;
    let violations = m.check_frame();
    if !violations.is_empty() {
        for v in &violations {
            writeln!(out, "violation: {v}")?;
        }
        return Ok(EXIT_ERROR);
    }
    if m.forces(m.root, &a) {
        writeln!(out, "forced at root {}", m.root)?;
        Ok(1)
    } else {
        writeln!(out, "countermodel: root {} does not force {a}", m.root)?;
        Ok(0)
    }
}

fn run_translate(
    from: Source,
    input: &str,
    then_prove: bool,
    flags: &OutputFlags,
    budget: &BudgetFlags,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let text = read_input(input)?;
    let s: Sequent = match from {
        Source::Labelled => {
            let ls = LabelledSequent::parse(&text).map_err(Failure::usage)?;
            tr_labelled(&ls).map_err(Failure::usage)?
        }
        Source::Polarised => {
            let (ctx, filler) = Polarised::parse(&text).map_err(Failure::usage)?;
            fl_nested(&ctx, &filler)
        }
    };
    writeln!(out, "{s}")?;
    if !then_prove {
        return Ok(0);
    }
    let opts = Options {
        budget: budget.budget().map_err(Failure::usage)?,
        trace: flags.trace,
    };
    let r = search_sequent(EnrichedSequent::new(s), opts);
    report(&r, flags, out, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ikp").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn prove_exit_codes() {
        assert_eq!(call(&["prove", "p -> p"]).0, 0);
        assert_eq!(call(&["prove", "p"]).0, 1);
        assert_eq!(call(&["prove", "p -> "]).0, 2);
        assert_eq!(call(&["prove", "p | ~p", "--max-steps", "1"]).0, 3);
    }

    #[test]
    fn flag_errors_exit_two() {
        assert_eq!(call(&["prove"]).0, 2);
        assert_eq!(call(&["prove", "p", "--countermodel", "xml"]).0, 2);
        assert_eq!(call(&["prove", "p", "--timeout", "-1"]).0, 2);
    }

    #[test]
    fn verdict_is_the_first_line() {
        let (_, out, _) = call(&["prove", "p | ~p", "--countermodel", "text"]);
        assert_eq!(out.lines().next(), Some("unprovable"));
        assert!(out.contains("root"));
    }
}
