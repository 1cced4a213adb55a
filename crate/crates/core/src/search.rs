//! Terminating backward proof search.
//!
//! The loop works on the leftmost open leaf. It runs the highest phase the leaf
//! qualifies for: EXP4 when every component is R3-saturated or blocked, EXP3 when
//! R2, EXP2 when R1, EXP1 otherwise. A leaf that is global-saturated stops the
//! search with a failed branch.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::calculus::{
    self, active_components, axiom_instance, impl_ancestors, is_axiomatic, is_blocked,
    is_global_saturated, pending, r3_saturated, r4_saturated, saturated_at, Derivation, Group,
    NodeId, NodeStatus, Rel, RuleInstance,
};
use crate::formula::Formula;
use crate::sequent::{Ann, BlockKind, EnrichedSequent, Path, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_rule_applications: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_rule_applications: 1_000_000,
            max_time: Duration::from_secs(60),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub rule_applications: u64,
    pub phases: u64,
    pub nodes: usize,
    /// Components that were blocked before a phase and not after it.
    pub invariance_violations: u64,
    /// Phase calls whose focus did not reach the group's local conditions.
    pub monotonicity_violations: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum TraceEvent {
    Rule {
        node: NodeId,
        rule: calculus::RuleId,
        focus: Path,
        principal: calculus::Principal,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        fresh: Vec<Ann>,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        rel_added: Vec<(Ann, Ann)>,
    },
    Blocked {
        node: NodeId,
        component: Path,
        blocker: Path,
    },
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Provable(Derivation),
    Unprovable {
        derivation: Derivation,
        leaf: NodeId,
    },
    BudgetExceeded {
        derivation: Derivation,
    },
}

impl Outcome {
    pub fn verdict(&self) -> Verdict {
        match self {
            Outcome::Provable(_) => Verdict::Provable,
            Outcome::Unprovable { .. } => Verdict::Unprovable,
            Outcome::BudgetExceeded { .. } => Verdict::BudgetExceeded,
        }
    }

    pub fn derivation(&self) -> &Derivation {
        match self {
            Outcome::Provable(d) => d,
            Outcome::Unprovable { derivation, .. } | Outcome::BudgetExceeded { derivation } => {
                derivation
            }
        }
    }

    /// The global-saturated leaf of a failed search.
    pub fn leaf(&self) -> Option<&EnrichedSequent> {
        match self {
            Outcome::Unprovable { derivation, leaf } => Some(&derivation.node(*leaf).sequent),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Provable,
    Unprovable,
    BudgetExceeded,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Provable => "provable",
            Verdict::Unprovable => "unprovable",
            Verdict::BudgetExceeded => "budget-exceeded",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub stats: Stats,
    pub trace: Vec<TraceEvent>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub budget: Budget,
    pub trace: bool,
}

pub fn prove(a: &Formula, opts: Options) -> SearchResult {
    search_sequent(EnrichedSequent::goal(a.clone()), opts)
}

/// Searches from an arbitrary enriched sequent instead of `⇒ A`.
pub fn search_sequent(start: EnrichedSequent, opts: Options) -> SearchResult {
    let mut s = Searcher::new(start, opts);
    let outcome = s.run();
    s.stats.nodes = s.d.len();
    s.stats.elapsed = s.started.elapsed();
    SearchResult {
        outcome,
        stats: s.stats,
        trace: s.trace,
    }
}

#[derive(Debug)]
pub struct OutOfBudget;

/// Mutable search state: the derivation, the fresh counter and the bookkeeping.
pub struct Searcher {
    d: Derivation,
    next: Ann,
    opts: Options,
    started: Instant,
    stats: Stats,
    trace: Vec<TraceEvent>,
    /// `(component, blocker)` annotation pairs already traced.
    reported_blocks: BTreeSet<(Ann, Ann)>,
}

impl Searcher {
    pub fn new(start: EnrichedSequent, opts: Options) -> Self {
        let mut used = start.root.max_ann();
        for &(a, b) in &start.rel {
            used = used.max(a).max(b);
        }
        Searcher {
            d: Derivation::new(start),
            next: used + 1,
            opts,
            started: Instant::now(),
            stats: Stats::default(),
            trace: Vec::new(),
            reported_blocks: BTreeSet::new(),
        }
    }

    pub fn derivation(&self) -> &Derivation {
        &self.d
    }

    fn run(&mut self) -> Outcome {
        loop {
            let Some(leaf) = self.first_open_leaf() else {
                return Outcome::Provable(self.d.clone());
            };
            let s = &self.d.node(leaf).sequent;
            if let Some(ax) = axiom_instance(&s.root) {
                self.d.expand(leaf, ax).expect("axiom instance is valid");
                continue;
            }
            if is_global_saturated(s) {
                let root = s.root.clone();
                self.report_blocks(leaf, &root);
                self.d.nodes[leaf].status = NodeStatus::Saturated;
                return Outcome::Unprovable {
                    derivation: self.d.clone(),
                    leaf,
                };
            }
            if self.step(leaf).is_err() {
                return Outcome::BudgetExceeded {
                    derivation: self.d.clone(),
                };
            }
        }
    }

    fn first_open_leaf(&self) -> Option<NodeId> {
        self.d
            .leaves()
            .into_iter()
            .find(|&id| self.d.node(id).status == NodeStatus::Open)
    }

    /// One iteration of the inner loop on `leaf`: picks the phase and runs it on every focus.
    fn step(&mut self, leaf: NodeId) -> Result<(), OutOfBudget> {
        self.stats.phases += 1;
        let s = self.d.node(leaf).sequent.root.clone();
        let (group, foci) = select_phase(&s, &self.d.node(leaf).sequent.rel);
        self.report_blocks(leaf, &s);
        let blocked_before: Vec<Path> = s
            .component_paths()
            .into_iter()
            .filter(|p| is_blocked(p, &s).is_some())
            .collect();
        let mut node = leaf;
        for focus in &foci {
            node = self.exp_phase(group, node, focus)?;
        }
        let after = &self.d.node(node).sequent.root;
        if !is_axiomatic(after) {
            for p in &blocked_before {
                if is_blocked(p, after).is_none() {
                    self.stats.invariance_violations += 1;
                }
            }
        }
        Ok(())
    }

    fn report_blocks(&mut self, node: NodeId, s: &Sequent) {
        if !self.opts.trace {
            return;
        }
        for (path, t) in s.components() {
            if r3_saturated(t) {
                continue;
            }
            if let Some(blocker) = is_blocked(&path, s) {
                let key = (
                    t.ann,
                    self.d
                        .node(node)
                        .sequent
                        .root
                        .get(&blocker)
                        .map_or(0, |b| b.ann),
                );
                if self.reported_blocks.insert(key) {
                    self.trace.push(TraceEvent::Blocked {
                        node,
                        component: path,
                        blocker,
                    });
                }
            }
        }
    }

    /// Applies group rules at `focus` above `node` until its local conditions hold,
    /// following the leftmost premise of branching rules. Right premises stay open and
    /// are resumed by later steps. Returns the leaf reached.
    pub fn exp_phase(
        &mut self,
        group: Group,
        node: NodeId,
        focus: &Path,
    ) -> Result<NodeId, OutOfBudget> {
        let mut id = node;
        loop {
            let e = self.d.node(id).sequent.clone();
            let s = &e.root;
            if is_axiomatic(s) {
                return Ok(id);
            }
            let Some(inst) = self.next_instance(s, &e.rel, group, focus) else {
                if !locally_saturated(s, &e.rel, group, focus) {
                    self.stats.monotonicity_violations += 1;
                }
                return Ok(id);
            };
            id = self.apply(id, inst)?[0];
        }
    }

    fn next_instance(
        &mut self,
        s: &Sequent,
        rel: &Rel,
        group: Group,
        focus: &Path,
    ) -> Option<RuleInstance> {
        let t = s.get(focus)?;
        let scope: Vec<(Path, &Sequent)> = if group == Group::R1 {
            modal_closure(focus, t)
        } else {
            vec![(focus.clone(), t)]
        };
        for (path, c) in scope {
            if let Some((rule, principal)) = pending(c, group, rel).into_iter().next() {
                return Some(
                    calculus::instantiate(s, &path, rule, principal, &mut self.next)
                        .expect("pending instances are well formed"),
                );
            }
        }
        None
    }

    fn apply(&mut self, id: NodeId, inst: RuleInstance) -> Result<Vec<NodeId>, OutOfBudget> {
        if self.stats.rule_applications >= self.opts.budget.max_rule_applications
            || (self.stats.rule_applications.is_multiple_of(256)
                && self.started.elapsed() > self.opts.budget.max_time)
        {
            return Err(OutOfBudget);
        }
        self.stats.rule_applications += 1;
        let before = self.d.node(id).sequent.rel.clone();
        let event = self.opts.trace.then(|| (inst.clone(), before));
        let kids = self
            .d
            .expand(id, inst)
            .expect("search only builds valid instances");
        if let Some((inst, before)) = event {
            let after = &self.d.node(kids[0]).sequent.rel;
            self.trace.push(TraceEvent::Rule {
                node: id,
                rule: inst.rule,
                focus: inst.focus,
                principal: inst.principal,
                fresh: inst.fresh,
                rel_added: after.difference(&before).copied().collect(),
            });
        }
        Ok(kids)
    }
}

/// `t` and its descendants through modal blocks only, in pre-order.
fn modal_closure<'a>(focus: &Path, t: &'a Sequent) -> Vec<(Path, &'a Sequent)> {
    let mut out = Vec::new();
    let mut stack = vec![(focus.clone(), t)];
    while let Some((p, c)) = stack.pop() {
        for m in c.mblocks.iter().rev() {
            stack.push((p.child(BlockKind::Modal, m.ann), m));
        }
        out.push((p, c));
    }
    out
}

fn locally_saturated(s: &Sequent, rel: &Rel, group: Group, focus: &Path) -> bool {
    let Some(t) = s.get(focus) else {
        return true;
    };
    match group {
        Group::R1 => calculus::r1_saturated(t),
        g => pending(t, g, rel).is_empty(),
    }
}

/// The phase to run on a non-saturated leaf and its foci, in pre-order.
pub fn select_phase(s: &Sequent, rel: &Rel) -> (Group, Vec<Path>) {
    let comps = active_components(s);
    let saturated = |g: Group| comps.iter().all(|(_, t)| saturated_at(t, g, rel));
    if saturated(Group::R3) {
        let foci = comps
            .iter()
            .filter(|(_, t)| !r4_saturated(t, rel))
            .filter(|(p, t)| {
                t.mblocks.iter().all(|m| {
                    m.iblocks.iter().all(|u| {
                        let up = p
                            .child(BlockKind::Modal, m.ann)
                            .child(BlockKind::Impl, u.ann);
                        r4_saturated(u, rel) || is_blocked(&up, s).is_some()
                    })
                })
            })
            .map(|(p, _)| p.clone())
            .collect();
        (Group::R4, foci)
    } else if saturated(Group::R2) {
        let candidates: BTreeSet<Path> = comps
            .iter()
            .filter(|(_, t)| !saturated_at(t, Group::R3, rel))
            .map(|(p, _)| p.clone())
            .collect();
        let foci = comps
            .iter()
            .map(|(p, _)| p)
            .filter(|p| candidates.contains(*p))
            .filter(|p| !impl_ancestors(p).iter().any(|a| candidates.contains(a)))
            .cloned()
            .collect();
        (Group::R3, foci)
    } else if saturated(Group::R1) {
        let foci = comps
            .iter()
            .filter(|(_, t)| !saturated_at(t, Group::R2, rel))
            .map(|(p, _)| p.clone())
            .collect();
        (Group::R2, foci)
    } else {
        let foci = comps
            .iter()
            .filter(|(_, t)| !saturated_at(t, Group::R1, rel))
            .map(|(p, _)| p.clone())
            .collect();
        (Group::R1, foci)
    }
}
