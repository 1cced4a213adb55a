//! Brute-force refutation by finite model enumeration, and the axiom corpus.
//!
//! The evaluator here is separate from [`crate::model`]: worlds are bit positions
//! and every connective is computed as a world mask. Models found are converted to
//! [`Model`] so callers can verify them with the other implementation.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::formula::Formula;
use crate::model::{reflexive_transitive_closure, Model, World};
use crate::search::Verdict;

/// Largest bound accepted by [`bounded_countermodel_search`].
pub const MAX_WORLDS: usize = 4;

/// A frame over worlds `0..n`: `up[w]` and `succ[w]` are bitmasks.
#[derive(Clone, Debug)]
struct Frame {
    n: usize,
    up: Vec<u32>,
    succ: Vec<u32>,
}

/// Partial orders compatible with the numeric order of worlds.
///
/// Every finite poset has a linear extension, so these cover all posets up to renaming.
fn orders(n: usize) -> Vec<Vec<u32>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for bits in 0u32..(1 << pairs.len()) {
        let mut up: Vec<u32> = (0..n).map(|i| 1 << i).collect();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if bits & (1 << k) != 0 {
                up[i] |= 1 << j;
            }
        }
        let transitive = (0..n).all(|i| {
            (0..n)
                .filter(|&j| up[i] & (1 << j) != 0)
                .all(|j| up[j] & !up[i] == 0)
        });
        if transitive {
            out.push(up);
        }
    }
    out
}

fn confluent(up: &[u32], succ: &[u32]) -> bool {
    let n = up.len();
    for x in 0..n {
        for x2 in bits(up[x]) {
            // Forward: every R-successor of x has an ≤-upper bound among successors of x2.
            for z in bits(succ[x]) {
                if up[z] & succ[x2] == 0 {
                    return false;
                }
            }
        }
        for z in bits(succ[x]) {
            // Backward: every ≤-successor of z is reached from some x' ≥ x.
            let reach = bits(up[x]).fold(0, |acc, x2| acc | succ[x2]);
            if up[z] & !reach != 0 {
                return false;
            }
        }
    }
    true
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

fn up_sets(up: &[u32]) -> Vec<u32> {
    let n = up.len();
    (0u32..(1 << n))
        .filter(|&s| bits(s).all(|w| up[w] & !s == 0))
        .collect()
}

fn eval(f: &Formula, frame: &Frame, val: &BTreeMap<&str, u32>) -> u32 {
    use Formula as F;
    let all = (1u32 << frame.n) - 1;
    match f {
        F::Atom(p) => val.get(&**p).copied().unwrap_or(0),
        F::Bottom => 0,
        F::Top => all,
        F::And(a, b) => eval(a, frame, val) & eval(b, frame, val),
        F::Or(a, b) => eval(a, frame, val) | eval(b, frame, val),
        F::Imp(a, b) => {
            let bad = eval(a, frame, val) & !eval(b, frame, val);
            (0..frame.n)
                .filter(|&w| frame.up[w] & bad == 0)
                .fold(0, |m, w| m | 1 << w)
        }
        F::Box(a) => {
            let good = eval(a, frame, val);
            let local: u32 = (0..frame.n)
                .filter(|&w| frame.succ[w] & !good == 0)
                .fold(0, |m, w| m | 1 << w);
            (0..frame.n)
                .filter(|&w| frame.up[w] & !local == 0)
                .fold(0, |m, w| m | 1 << w)
        }
        F::Dia(a) => {
            let good = eval(a, frame, val);
            (0..frame.n)
                .filter(|&w| frame.succ[w] & good != 0)
                .fold(0, |m, w| m | 1 << w)
        }
    }
}

/// Searches frame-valid models with at most `max_worlds` worlds for one refuting `a`.
///
/// Models are tried by increasing size, then order, accessibility and valuation in a
/// fixed order, so the result is deterministic. The root is the least refuting world.
pub fn bounded_countermodel_search(a: &Formula, max_worlds: usize) -> Option<Model> {
    assert!(
        max_worlds <= MAX_WORLDS,
        "bound {max_worlds} exceeds {MAX_WORLDS}"
    );
    let atoms: Vec<Arc<str>> = a.atoms().into_iter().collect();
    for n in 1..=max_worlds {
        for up in orders(n) {
            let ups = up_sets(&up);
            for r in 0u64..(1 << (n * n)) {
                let succ: Vec<u32> = (0..n)
                    .map(|w| ((r >> (w * n)) & ((1 << n) - 1)) as u32)
                    .collect();
                if !confluent(&up, &succ) {
                    continue;
                }
                let frame = Frame {
                    n,
                    up: up.clone(),
                    succ,
                };
                let mut choice = vec![0usize; atoms.len()];
                loop {
                    let val: BTreeMap<&str, u32> = atoms
                        .iter()
                        .zip(&choice)
                        .map(|(p, &k)| (&**p, ups[k]))
                        .collect();
                    let holds = eval(a, &frame, &val);
                    let all = (1u32 << n) - 1;
                    if holds != all {
                        let root = (!holds & all).trailing_zeros() as usize;
                        return Some(to_model(&frame, &atoms, &val, root));
                    }
                    // Next valuation, odometer style.
                    let mut k = 0;
                    while k < choice.len() {
                        choice[k] += 1;
                        if choice[k] < ups.len() {
                            break;
                        }
                        choice[k] = 0;
                        k += 1;
                    }
                    if k == choice.len() {
                        break;
                    }
                }
            }
        }
    }
    None
}

fn to_model(frame: &Frame, atoms: &[Arc<str>], val: &BTreeMap<&str, u32>, root: usize) -> Model {
    let worlds: BTreeSet<World> = (0..frame.n as World).collect();
    let gen: BTreeSet<(World, World)> = (0..frame.n)
        .flat_map(|w| bits(frame.up[w]).map(move |v| (w as World, v as World)))
        .collect();
    let acc = (0..frame.n)
        .flat_map(|w| bits(frame.succ[w]).map(move |v| (w as World, v as World)))
        .collect();
    let mut v: BTreeMap<World, BTreeSet<Arc<str>>> = BTreeMap::new();
    for p in atoms {
        for w in bits(val[&**p]) {
            v.entry(w as World).or_default().insert(p.clone());
        }
    }
    Model {
        leq: reflexive_transitive_closure(&worlds, &gen),
        worlds,
        acc,
        val: v,
        root: root as World,
    }
}

/// One corpus entry: a name, the formula text and the expected verdict.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub formula: Formula,
    pub expected: Verdict,
}

/// The IK axioms at atoms, then standard non-theorems.
pub fn axiom_corpus() -> Vec<CorpusEntry> {
    let table: [(&str, &str, Verdict); 10] = [
        ("ax1", "box (p -> q) -> (box p -> box q)", Verdict::Provable),
        ("ax2", "box (p -> q) -> (dia p -> dia q)", Verdict::Provable),
        ("ax3", "dia (p | q) -> (dia p | dia q)", Verdict::Provable),
        ("ax4", "(dia p -> box q) -> box (p -> q)", Verdict::Provable),
        ("ax5", "~dia false", Verdict::Provable),
        ("excluded-middle", "p | ~p", Verdict::Unprovable),
        ("t", "box p -> p", Verdict::Unprovable),
        ("dia-to-box", "dia p -> box p", Verdict::Unprovable),
        ("dual-dia", "~box ~p -> dia p", Verdict::Unprovable),
        ("dual-box", "~dia ~p -> box p", Verdict::Unprovable),
    ];
    table
        .into_iter()
        .map(|(name, text, expected)| CorpusEntry {
            name,
            formula: crate::formula::parse(text).expect("corpus formulas parse"),
            expected,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn order_counts() {
        // Labelled posets with a fixed linear extension: 1, 2, 7, 40 for n = 1..4.
        let counts: Vec<usize> = (1..=4).map(|n| orders(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 7, 40]);
    }

    #[test]
    fn excluded_middle_needs_two_worlds() {
        let f = parse("p | ~p").unwrap();
        assert!(bounded_countermodel_search(&f, 1).is_none());
        let m = bounded_countermodel_search(&f, 2).unwrap();
        assert_eq!(m.worlds.len(), 2);
        assert!(m.refutes(&f));
    }

    #[test]
    fn valid_formulas_have_no_small_countermodel() {
        assert!(bounded_countermodel_search(&parse("p -> p").unwrap(), 3).is_none());
        assert!(bounded_countermodel_search(&parse("dia false -> false").unwrap(), 3).is_none());
        for e in axiom_corpus() {
            let found = bounded_countermodel_search(&e.formula, 3);
            if e.expected == Verdict::Provable {
                assert!(found.is_none(), "{}", e.name);
            }
        }
    }

    #[test]
    fn non_theorems_have_oracle_countermodels() {
        for e in axiom_corpus() {
            if e.expected == Verdict::Unprovable {
                let m = bounded_countermodel_search(&e.formula, 3)
                    .unwrap_or_else(|| panic!("{} has a small countermodel", e.name));
                assert!(m.refutes(&e.formula), "{}", e.name);
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn bitmask_evaluation_matches_model_forcing(f in crate::formula::arb::formula(3)) {
            if let Some(m) = bounded_countermodel_search(&f, 2) {
                proptest::prop_assert!(m.check_frame().is_empty());
                proptest::prop_assert!(!m.forces(m.root, &f));
            }
        }
    }
}
