//! Proves the IK axioms and the standard non-theorems, replaying every proof.
//!
//! ```bash
//! cargo run --example prove_axioms
//! ```

use ikp::calculus::check_proof;
use ikp::oracle::axiom_corpus;
use ikp::search::{prove, Options, Verdict};

fn main() {
    for entry in axiom_corpus() {
        let r = prove(&entry.formula, Options::default());
        let verdict = r.outcome.verdict();
        let replay = match verdict {
            Verdict::Provable => match check_proof(r.outcome.derivation()) {
                Ok(()) => "replayed",
                Err(_) => "REPLAY FAILED",
            },
            _ => "-",
        };
        println!(
            "{:<16} {:<12} {:>4} rules  {replay:<10} {}",
            entry.name,
            verdict.to_string(),
            r.stats.rule_applications,
            entry.formula
        );
        assert_eq!(verdict, entry.expected, "{}", entry.name);
    }
}
