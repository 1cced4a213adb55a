//! Flattens a polarised nested sequent with a marked filler, as produced by a
//! nested-calculus derivation, into a bi-nested sequent.
//!
//! The filler sits in braces. Inputs carry `+`, outputs `-`.
//!
//! ```bash
//! cargo run --example translate_nested -- '+A, [ { -B } ]'
//! ```

use ikp::translate::{contextualise, fl_nested, Polarised};

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "+A, +B, [ +C, -D ], [ { +H, [ +J ] }, -E, [ -F ] ]".to_string());
    let (ctx, filler) = Polarised::parse(&text).unwrap_or_else(|e| panic!("{e}"));
    let c = contextualise(&ctx, &filler);
    println!("context   {ctx}");
    println!("filler    {filler}");
    println!("ancestor  {}", c.ancestor);
    println!("node      {}", c.node);
    for child in &c.children {
        println!("child     {child}");
    }
    println!("flattened {}", fl_nested(&ctx, &filler));
}
