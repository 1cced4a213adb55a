//! Finite bi-relational models, forcing, frame checks and countermodel extraction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{blockers, is_global_saturated};
use crate::formula::Formula;
use crate::sequent::{structurally_included, Ann, EnrichedSequent, Sequent};

pub type World = u32;

/// A finite model. `leq` is expected to be the full pre-order, not a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub worlds: BTreeSet<World>,
    pub leq: BTreeSet<(World, World)>,
    pub acc: BTreeSet<(World, World)>,
    pub val: BTreeMap<World, BTreeSet<Arc<str>>>,
    pub root: World,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownWorld(World),
    NotReflexive(World),
    NotTransitive(World, World, World),
    NotHereditary {
        lower: World,
        upper: World,
        atom: Arc<str>,
    },
    /// `x ≤ x'` and `x R z` with no `z'` such that `x' R z'` and `z ≤ z'`.
    ForwardConfluence {
        x: World,
        x2: World,
        z: World,
    },
    /// `x R z` and `z ≤ z'` with no `x'` such that `x ≤ x'` and `x' R z'`.
    BackwardConfluence {
        x: World,
        z: World,
        z2: World,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownWorld(w) => write!(f, "world {w} is used but not declared"),
            Violation::NotReflexive(w) => write!(f, "leq is not reflexive at {w}"),
            Violation::NotTransitive(a, b, c) => {
                write!(
                    f,
                    "leq is not transitive: {a} <= {b} <= {c} but not {a} <= {c}"
                )
            }
            Violation::NotHereditary { lower, upper, atom } => {
                write!(
                    f,
                    "valuation not hereditary: {atom} holds at {lower} but not at {upper}"
                )
            }
            Violation::ForwardConfluence { x, x2, z } => {
                write!(
                    f,
                    "FC fails: {x} <= {x2}, {x} R {z}, no matching successor of {x2}"
                )
            }
            Violation::BackwardConfluence { x, z, z2 } => {
                write!(
                    f,
                    "BC fails: {x} R {z}, {z} <= {z2}, no matching predecessor of {z2}"
                )
            }
        }
    }
}

impl Model {
    fn up(&self, w: World) -> impl Iterator<Item = World> + '_ {
        self.leq.range((w, 0)..=(w, World::MAX)).map(|&(_, v)| v)
    }

    fn succ(&self, w: World) -> impl Iterator<Item = World> + '_ {
        self.acc.range((w, 0)..=(w, World::MAX)).map(|&(_, v)| v)
    }

    fn holds(&self, w: World, p: &str) -> bool {
        self.val.get(&w).is_some_and(|v| v.contains(p))
    }

    /// Every violated frame condition, each with its witnesses.
    pub fn check_frame(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mentioned = self
            .leq
            .iter()
            .chain(&self.acc)
            .flat_map(|&(a, b)| [a, b])
            .chain(self.val.keys().copied())
            .chain([self.root]);
        let unknown: BTreeSet<World> = mentioned.filter(|w| !self.worlds.contains(w)).collect();
        out.extend(unknown.into_iter().map(Violation::UnknownWorld));
        for &w in &self.worlds {
            if !self.leq.contains(&(w, w)) {
                out.push(Violation::NotReflexive(w));
            }
        }
        for &(a, b) in &self.leq {
            for c in self.up(b) {
                if !self.leq.contains(&(a, c)) {
                    out.push(Violation::NotTransitive(a, b, c));
                }
            }
            if let Some(va) = self.val.get(&a) {
                for p in va {
                    if !self.holds(b, p) {
                        out.push(Violation::NotHereditary {
                            lower: a,
                            upper: b,
                            atom: p.clone(),
                        });
                    }
                }
            }
        }
        for &(x, x2) in &self.leq {
            for z in self.succ(x) {
                if !self.succ(x2).any(|z2| self.leq.contains(&(z, z2))) {
                    out.push(Violation::ForwardConfluence { x, x2, z });
                }
            }
        }
        for &(x, z) in &self.acc {
            for z2 in self.up(z) {
                if !self.up(x).any(|x2| self.acc.contains(&(x2, z2))) {
                    out.push(Violation::BackwardConfluence { x, z, z2 });
                }
            }
        }
        out
    }

    pub fn forces(&self, w: World, a: &Formula) -> bool {
        use Formula as F;
        match a {
            F::Atom(p) => self.holds(w, p),
            F::Bottom => false,
            F::Top => true,
            F::And(x, y) => self.forces(w, x) && self.forces(w, y),
            F::Or(x, y) => self.forces(w, x) || self.forces(w, y),
            F::Imp(x, y) => self.up(w).all(|v| !self.forces(v, x) || self.forces(v, y)),
            F::Box(x) => self.up(w).all(|v| self.succ(v).all(|u| self.forces(u, x))),
            F::Dia(x) => self.succ(w).any(|u| self.forces(u, x)),
        }
    }

    /// Forcing of sequents: some antecedent formula fails or some succedent element holds.
    pub fn forces_sequent(&self, w: World, s: &Sequent) -> bool {
        s.ante.iter().any(|a| !self.forces(w, a))
            || s.succ.iter().any(|a| self.forces(w, a))
            || s.iblocks
                .iter()
                .any(|b| self.up(w).all(|v| self.forces_sequent(v, b)))
            || s.mblocks
                .iter()
                .any(|b| self.succ(w).all(|v| self.forces_sequent(v, b)))
    }

    /// A valid countermodel for `a`: the frame checks pass and the root does not force `a`.
    pub fn refutes(&self, a: &Formula) -> bool {
        self.check_frame().is_empty() && !self.forces(self.root, a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelJson::from(self)).expect("models serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let j: ModelJson = serde_json::from_str(text)?;
        Ok(j.into())
    }

    /// Graphviz rendering; `leq` is drawn without reflexive and transitive edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph model {\n  rankdir=BT;\n");
        for &w in &self.worlds {
            let val: Vec<&str> = self
                .val
                .get(&w)
                .into_iter()
                .flatten()
                .map(|p| &**p)
                .collect();
            let shape = if w == self.root {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(
                out,
                "  w{w} [shape={shape}, label=\"{w}\\n{{{}}}\"];",
                val.join(",")
            );
        }
        for (a, b) in self.leq_cover() {
            let _ = writeln!(out, "  w{a} -> w{b} [label=\"<=\", style=dashed];");
        }
        for &(a, b) in &self.acc {
            let _ = writeln!(out, "  w{a} -> w{b} [label=\"R\"];");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "root {}", self.root);
        for &w in &self.worlds {
            let val: Vec<&str> = self
                .val
                .get(&w)
                .into_iter()
                .flatten()
                .map(|p| &**p)
                .collect();
            let _ = writeln!(out, "world {w}: {{{}}}", val.join(", "));
        }
        for (a, b) in self.leq_cover() {
            let _ = writeln!(out, "{a} <= {b}");
        }
        for &(a, b) in &self.acc {
            let _ = writeln!(out, "{a} R {b}");
        }
        out
    }

    /// Strict `leq` pairs that are not implied by transitivity.
    fn leq_cover(&self) -> Vec<(World, World)> {
        self.leq
            .iter()
            .copied()
            .filter(|&(a, b)| a != b)
            .filter(|&(a, b)| {
                !self.up(a).any(|c| {
                    c != a && c != b && self.leq.contains(&(c, b)) && !self.leq.contains(&(b, c))
                })
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct WorldJson {
    id: World,
    #[serde(default)]
    val: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    worlds: Vec<WorldJson>,
    #[serde(default)]
    leq: Vec<(World, World)>,
    #[serde(rename = "R", default)]
    acc: Vec<(World, World)>,
    root: World,
}

impl From<&Model> for ModelJson {
    fn from(m: &Model) -> Self {
        ModelJson {
            worlds: m
                .worlds
                .iter()
                .map(|&id| WorldJson {
                    id,
                    val: m
                        .val
                        .get(&id)
                        .into_iter()
                        .flatten()
                        .map(|p| p.to_string())
                        .collect(),
                })
                .collect(),
            leq: m.leq.iter().copied().collect(),
            acc: m.acc.iter().copied().collect(),
            root: m.root,
        }
    }
}

impl From<ModelJson> for Model {
    fn from(j: ModelJson) -> Self {
        Model {
            worlds: j.worlds.iter().map(|w| w.id).collect(),
            val: j
                .worlds
                .into_iter()
                .filter(|w| !w.val.is_empty())
                .map(|w| (w.id, w.val.into_iter().map(Arc::from).collect()))
                .collect(),
            leq: j.leq.into_iter().collect(),
            acc: j.acc.into_iter().collect(),
            root: j.root,
        }
    }
}

// ---------------------------------------------------------------------------
// Extraction

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NullityReport {
    pub null: BTreeSet<Ann>,
    /// `relies[l2] = l1` when the component `l2` relies on `l1`.
    pub relies: BTreeMap<Ann, Ann>,
}

/// Components relied on by another component of the same sequent are null.
pub fn nullity(e: &EnrichedSequent) -> NullityReport {
    let present: BTreeSet<Ann> = e.root.annotations().into_iter().collect();
    let mut out = NullityReport::default();
    for &(l1, l2) in &e.rel {
        if present.contains(&l1) && present.contains(&l2) {
            out.null.insert(l1);
            out.relies.insert(l2, l1);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("the sequent is not global-saturated")]
    NotSaturated,
    #[error("extracted model violates a frame condition: {0}")]
    Frame(Violation),
    #[error("truth lemma fails at world {world}: {formula} in the {side}")]
    TruthLemma {
        world: World,
        formula: Formula,
        side: &'static str,
    },
}

struct Index<'a> {
    comp: BTreeMap<Ann, &'a Sequent>,
}

impl<'a> Index<'a> {
    fn new(s: &'a Sequent) -> Self {
        let mut comp = BTreeMap::new();
        let mut stack = vec![s];
        while let Some(t) = stack.pop() {
            comp.insert(t.ann, t);
            stack.extend(t.iblocks.iter().chain(&t.mblocks));
        }
        Index { comp }
    }
}

/// Builds the model of a global-saturated leaf and verifies it.
///
/// Worlds are the annotations of non-null components outside blocked subtrees. The
/// pre-order is generated by three kinds of steps, each also requiring structural
/// inclusion: implication children, implication children replaced by their reliant
/// copy or by the blocker they stand for, and modal children of related worlds.
pub fn extract_countermodel(e: &EnrichedSequent) -> Result<Model, ExtractError> {
    if !is_global_saturated(e) {
        return Err(ExtractError::NotSaturated);
    }
    let m = build_model(e);
    if let Some(v) = m.check_frame().into_iter().next() {
        return Err(ExtractError::Frame(v));
    }
    truth_lemma(e, &m)?;
    Ok(m)
}

/// The model without any verification.
pub fn build_model(e: &EnrichedSequent) -> Model {
    let idx = Index::new(&e.root);
    let nulls = nullity(e);
    // A blocked component is replaced by its outermost blocker, which is unblocked and
    // has the same antecedent and sharp succedent. Its subtree contributes no worlds.
    let comps = e.root.components();
    let stand_in: BTreeMap<Ann, Ann> = comps
        .iter()
        .filter_map(|(p, t)| {
            let b = blockers(p, &e.root).pop()?;
            Some((t.ann, e.root.get(&b).expect("blocker exists").ann))
        })
        .collect();
    let worlds: BTreeSet<World> = comps
        .iter()
        .filter(|(p, t)| {
            !nulls.null.contains(&t.ann) && !p.0.iter().any(|(_, a)| stand_in.contains_key(a))
        })
        .map(|(_, t)| t.ann)
        .collect();
    // Follows reliance from a null component to the world that stands for it.
    let relied_by: BTreeMap<Ann, Ann> = nulls.relies.iter().map(|(&l2, &l1)| (l1, l2)).collect();
    let representative = |mut a: Ann| -> Option<Ann> {
        let mut steps = 0;
        loop {
            if let Some(&b) = stand_in.get(&a) {
                a = b;
            } else if let Some(&b) = relied_by.get(&a) {
                a = b;
            } else {
                break;
            }
            steps += 1;
            if steps > relied_by.len() + stand_in.len() {
                return None;
            }
        }
        worlds.contains(&a).then_some(a)
    };
    let included = |a: Ann, b: Ann| structurally_included(idx.comp[&a], idx.comp[&b]);

    let mut leq0: BTreeSet<(World, World)> = BTreeSet::new();
    for &a in &worlds {
        let t = idx.comp[&a];
        for child in &t.iblocks {
            if let Some(b) = representative(child.ann) {
                if included(a, b) {
                    leq0.insert((a, b));
                }
            }
        }
    }
    // Modal children of related worlds, to a fixpoint.
    let modal_children: BTreeMap<World, Vec<World>> = worlds
        .iter()
        .map(|&w| {
            let kids = idx.comp[&w]
                .mblocks
                .iter()
                .map(|m| m.ann)
                .filter(|a| worlds.contains(a))
                .collect();
            (w, kids)
        })
        .collect();
    loop {
        let mut added = Vec::new();
        for &(t1, t2) in &leq0 {
            for &a in &modal_children[&t1] {
                for &b in &modal_children[&t2] {
                    if !leq0.contains(&(a, b)) && included(a, b) {
                        added.push((a, b));
                    }
                }
            }
        }
        if added.is_empty() {
            break;
        }
        leq0.extend(added);
    }

    let leq = reflexive_transitive_closure(&worlds, &leq0);
    let acc = modal_children
        .iter()
        .flat_map(|(&w, kids)| kids.iter().map(move |&k| (w, k)))
        .collect();
    let val = worlds
        .iter()
        .filter_map(|&w| {
            let atoms: BTreeSet<Arc<str>> = idx.comp[&w]
                .ante
                .iter()
                .filter_map(|f| match f {
                    Formula::Atom(p) => Some(p.clone()),
                    _ => None,
                })
                .collect();
            (!atoms.is_empty()).then_some((w, atoms))
        })
        .collect();
    Model {
        worlds,
        leq,
        acc,
        val,
        root: e.root.ann,
    }
}

#[allow(clippy::needless_range_loop)]
pub fn reflexive_transitive_closure(
    worlds: &BTreeSet<World>,
    rel: &BTreeSet<(World, World)>,
) -> BTreeSet<(World, World)> {
    let ids: Vec<World> = worlds.iter().copied().collect();
    let pos: BTreeMap<World, usize> = ids.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let n = ids.len();
    let mut m = vec![vec![false; n]; n];
    for i in 0..n {
        m[i][i] = true;
    }
    for (a, b) in rel {
        if let (Some(&i), Some(&j)) = (pos.get(a), pos.get(b)) {
            m[i][j] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if m[i][j] {
                out.insert((ids[i], ids[j]));
            }
        }
    }
    out
}

/// Antecedent formulas of each world are forced and succedent formulas are not.
pub fn truth_lemma(e: &EnrichedSequent, m: &Model) -> Result<(), ExtractError> {
    for (_, t) in e.root.components() {
        if !m.worlds.contains(&t.ann) {
            continue;
        }
        for a in &t.ante {
            if !m.forces(t.ann, a) {
                return Err(ExtractError::TruthLemma {
                    world: t.ann,
                    formula: a.clone(),
                    side: "antecedent",
                });
            }
        }
        for a in &t.succ {
            if m.forces(t.ann, a) {
                return Err(ExtractError::TruthLemma {
                    world: t.ann,
                    formula: a.clone(),
                    side: "succedent",
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod arb {
    use super::*;
    use proptest::prelude::*;

    /// Frame-valid models: an up-closed pre-order, R closed under both confluences.
    pub fn model() -> impl Strategy<Value = Model> {
        (1usize..=4)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec(any::<bool>(), n * n),
                    proptest::collection::vec(any::<bool>(), n * n),
                    proptest::collection::vec(0u8..8, n),
                )
            })
            .prop_map(|(n, le, r, v)| {
                let worlds: BTreeSet<World> = (0..n as World).collect();
                let gen: BTreeSet<(World, World)> = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| i < j && le[i * n + j])
                    .map(|(i, j)| (i as World, j as World))
                    .collect();
                let leq = reflexive_transitive_closure(&worlds, &gen);
                let mut acc: BTreeSet<(World, World)> = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| r[i * n + j])
                    .map(|(i, j)| (i as World, j as World))
                    .collect();
                // Closing R upwards on both sides gives both confluence conditions.
                let snapshot = acc.clone();
                for &(x, z) in &snapshot {
                    for &(x0, a) in &leq {
                        if x0 == x {
                            for &(z0, d) in &leq {
                                if z0 == z {
                                    acc.insert((a, d));
                                }
                            }
                        }
                    }
                }
                let mut val: BTreeMap<World, BTreeSet<Arc<str>>> = BTreeMap::new();
                for (w, bits) in v.iter().enumerate() {
                    for (k, p) in ["p", "q", "r"].iter().enumerate() {
                        if bits & (1 << k) != 0 {
                            for &(a, b) in &leq {
                                if a == w as World {
                                    val.entry(b).or_default().insert(Arc::from(*p));
                                }
                            }
                        }
                    }
                }
                Model {
                    worlds,
                    leq,
                    acc,
                    val,
                    root: 0,
                }
            })
    }
}
