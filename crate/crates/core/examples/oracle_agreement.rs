//! Compares the prover with brute-force model enumeration on a few formulas.
//!
//! ```bash
//! cargo run --example oracle_agreement -- 'box (p | q) -> box p | dia q'
//! ```

use ikp::formula::parse;
use ikp::oracle::bounded_countermodel_search;
use ikp::search::{prove, Options, Verdict};

const BOUND: usize = 3;

fn main() {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = [
            "dia (p | q) -> dia p | dia q",
            "box (p | q) -> box p | dia q",
            "(dia p -> box q) -> box (p -> q)",
            "~~box p -> box ~~p",
            "box ~~p -> ~~box p",
        ]
        .map(String::from)
        .to_vec();
    }
    for text in inputs {
        let a = parse(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        let verdict = prove(&a, Options::default()).outcome.verdict();
        let oracle = bounded_countermodel_search(&a, BOUND);
        let agree = match (&oracle, verdict) {
            (Some(_), Verdict::Provable) => "DISAGREE",
            (_, Verdict::BudgetExceeded) => "budget",
            _ => "ok",
        };
        let found = oracle.map_or("none".to_string(), |m| format!("{} worlds", m.worlds.len()));
        println!(
            "{agree:<8} prover {verdict:<11} oracle {found:<9} {text}",
            verdict = verdict.to_string()
        );
    }
}
