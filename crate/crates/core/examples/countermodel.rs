//! Extracts and verifies a countermodel for an unprovable formula.
//!
//! ```bash
//! cargo run --example countermodel -- '~dia ~p -> box p'
//! ```

use ikp::formula::parse;
use ikp::model::extract_countermodel;
use ikp::search::{prove, Options};

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "~dia ~p -> box p".to_string());
    let a = parse(&text).unwrap_or_else(|e| panic!("{e}"));
    let r = prove(&a, Options::default());
    println!("{text}: {}", r.outcome.verdict());
    let Some(leaf) = r.outcome.leaf() else {
        return;
    };
    println!("saturated leaf: {leaf}");

    // extract_countermodel checks the frame and the truth lemma before returning.
    let m = extract_countermodel(leaf).expect("a verified countermodel");
    assert!(m.refutes(&a));
    print!("{}", m.to_text());
    println!();
    print!("{}", m.to_dot());
}
