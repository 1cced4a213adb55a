//! Translates tree-like labelled sequents into bi-nested ones and proves them.
//!
//! ```bash
//! cargo run --example translate_labelled
//! ```

use ikp::search::{search_sequent, Options};
use ikp::sequent::EnrichedSequent;
use ikp::translate::{tr_labelled, LabelledSequent};

fn main() {
    let inputs = [
        "x0<=x1; x1Rx2; x2:A |- x0:A&B",
        "x0<=x1; x1Rx2 |- x0:A&B, x2:A",
        "xRy; x:box p |- y:p",
        "x<=y; xRz; x:dia p -> box q; z:p |- y:box q",
        // Not tree-like: x and z both lack a parent.
        "xRy; z<=y; x:A |- z:B",
    ];
    for text in inputs {
        let ls = LabelledSequent::parse(text).expect("labelled sequent parses");
        match tr_labelled(&ls) {
            Ok(s) => {
                let verdict = search_sequent(EnrichedSequent::new(s.clone()), Options::default())
                    .outcome
                    .verdict();
                println!("{text}\n  => {s}\n  {verdict}");
            }
            Err(e) => println!("{text}\n  rejected: {e}"),
        }
    }
}
