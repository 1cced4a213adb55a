//! Builds models by hand, checks the frame conditions and evaluates formulas.
//!
//! ```bash
//! cargo run --example check_model
//! ```

use std::collections::{BTreeMap, BTreeSet};

use ikp::formula::parse;
use ikp::model::{reflexive_transitive_closure, Model};

fn model(n: u32, leq: &[(u32, u32)], acc: &[(u32, u32)], val: &[(u32, &str)]) -> Model {
    let worlds: BTreeSet<u32> = (0..n).collect();
    let mut v: BTreeMap<u32, BTreeSet<_>> = BTreeMap::new();
    for &(w, p) in val {
        v.entry(w).or_default().insert(p.into());
    }
    Model {
        leq: reflexive_transitive_closure(&worlds, &leq.iter().copied().collect()),
        worlds,
        acc: acc.iter().copied().collect(),
        val: v,
        root: 0,
    }
}

fn main() {
    // 0 ≤ 1, with p only at 1: refutes excluded middle.
    let m = model(2, &[(0, 1)], &[], &[(1, "p")]);
    let em = parse("p | ~p").unwrap();
    println!("frame: {:?}", m.check_frame());
    println!("0 forces {em}: {}", m.forces(0, &em));

    // 0 R 1 and 1 ≤ 2 with nothing above 0: backward confluence fails.
    let bad = model(3, &[(1, 2)], &[(0, 1)], &[]);
    for v in bad.check_frame() {
        println!("violation: {v}");
    }

    // The JSON form is what `ikp check` reads.
    println!("{}", m.to_json());
}
