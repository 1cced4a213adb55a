//! The sequent `box a -> false, box b -> false =>` makes naive search diverge:
//! every ImpL branch opens a fresh implication block with the same content.
//! Blocking stops it and the trace records where.
//!
//! ```bash
//! cargo run --example blocking
//! ```

use ikp::search::{search_sequent, Options, TraceEvent};
use ikp::sequent::{EnrichedSequent, Sequent};

fn main() {
    let seed = Sequent::parse("box a -> false, box b -> false =>").expect("seed parses");
    let opts = Options {
        trace: true,
        ..Options::default()
    };
    let r = search_sequent(EnrichedSequent::new(seed), opts);
    println!(
        "{} after {} rule applications",
        r.outcome.verdict(),
        r.stats.rule_applications
    );
    for ev in &r.trace {
        if let TraceEvent::Blocked {
            node,
            component,
            blocker,
        } = ev
        {
            println!("node {node}: {component} blocked by {blocker}");
        }
    }
    if let Some(leaf) = r.outcome.leaf() {
        println!("leaf: {leaf}");
    }
}
