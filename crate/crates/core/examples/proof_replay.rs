//! Serialises a proof, reads it back and replays it. A tampered copy is rejected.
//!
//! ```bash
//! cargo run --example proof_replay
//! ```

use ikp::calculus::{check_proof, Derivation, NodeStatus};
use ikp::formula::parse;
use ikp::search::{prove, Options};

fn main() {
    let a = parse("box (p -> q) -> (dia p -> dia q)").unwrap();
    let r = prove(&a, Options::default());
    let d = r.outcome.derivation();
    print!("{}", d.to_text());

    let json = d.to_json();
    let back = Derivation::from_json(&json).expect("round trip");
    assert_eq!(&back, d);
    println!("replay: {:?}", check_proof(&back));

    // Empty the root succedent of an axiom leaf: it no longer matches its parent.
    let mut broken = back.clone();
    let leaf = broken
        .nodes
        .iter()
        .position(|n| n.status == NodeStatus::Axiomatic)
        .expect("an axiom leaf");
    broken.nodes[leaf].sequent.root.succ.clear();
    println!("tampered replay: {:?}", check_proof(&broken));
}
