//! Rules of the cumulative annotated calculus, their saturation conditions,
//! saturation levels, blocking, derivations and proof replay.
//!
//! Every rule is cumulative: the principal formula or block stays in the premise.
//! [`premises`] is the single place where rule schemas are spelled out; both the
//! search loop and the replay checker go through it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::sequent::{
    sharp_equivalent, structurally_included, Ann, BlockKind, EnrichedSequent, Path, Sequent,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    BotL,
    TopR,
    Id,
    AndL,
    AndR,
    OrL,
    OrR,
    ImpL,
    #[serde(rename = "ImpR_in")]
    ImpRIn,
    #[serde(rename = "ImpR_new")]
    ImpRNew,
    BoxL,
    BoxR,
    DiaL,
    DiaR,
    Trans,
    InterFC,
    InterBC,
}

/// Rule groups, in the order proof search saturates them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    /// Propositional and modal rules other than `BoxR` and `ImpR`.
    R1,
    /// `Trans` and `InterFC`.
    R2,
    /// `BoxR` and `ImpR`.
    R3,
    /// `InterBC`.
    R4,
}

impl RuleId {
    pub const ALL: [RuleId; 17] = [
        RuleId::BotL,
        RuleId::TopR,
        RuleId::Id,
        RuleId::AndL,
        RuleId::AndR,
        RuleId::OrL,
        RuleId::OrR,
        RuleId::ImpL,
        RuleId::ImpRIn,
        RuleId::ImpRNew,
        RuleId::BoxL,
        RuleId::BoxR,
        RuleId::DiaL,
        RuleId::DiaR,
        RuleId::Trans,
        RuleId::InterFC,
        RuleId::InterBC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::BotL => "BotL",
            RuleId::TopR => "TopR",
            RuleId::Id => "Id",
            RuleId::AndL => "AndL",
            RuleId::AndR => "AndR",
            RuleId::OrL => "OrL",
            RuleId::OrR => "OrR",
            RuleId::ImpL => "ImpL",
            RuleId::ImpRIn => "ImpR_in",
            RuleId::ImpRNew => "ImpR_new",
            RuleId::BoxL => "BoxL",
            RuleId::BoxR => "BoxR",
            RuleId::DiaL => "DiaL",
            RuleId::DiaR => "DiaR",
            RuleId::Trans => "Trans",
            RuleId::InterFC => "InterFC",
            RuleId::InterBC => "InterBC",
        }
    }

    pub fn is_axiom(self) -> bool {
        matches!(self, RuleId::BotL | RuleId::TopR | RuleId::Id)
    }

    pub fn group(self) -> Option<Group> {
        match self {
            RuleId::BotL | RuleId::TopR | RuleId::Id => None,
            RuleId::BoxR | RuleId::ImpRIn | RuleId::ImpRNew => Some(Group::R3),
            RuleId::Trans | RuleId::InterFC => Some(Group::R2),
            RuleId::InterBC => Some(Group::R4),
            _ => Some(Group::R1),
        }
    }

    pub fn arity(self) -> usize {
        match self {
            RuleId::BotL | RuleId::TopR | RuleId::Id => 0,
            RuleId::AndR | RuleId::OrL | RuleId::ImpL => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a rule acts on inside its focused component.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Principal {
    Formula(Formula),
    /// A formula of the focus together with one of its modal children.
    FormulaBlock(Formula, Ann),
    /// An implication child of the focus.
    Block(Ann),
    /// An implication child and a modal child of the focus.
    BlockPair {
        iblock: Ann,
        mblock: Ann,
    },
    /// A modal child of the focus and an implication child of that modal child.
    Nested {
        mblock: Ann,
        iblock: Ann,
    },
}

impl fmt::Display for Principal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Principal::Formula(a) => write!(f, "{a}"),
            Principal::FormulaBlock(a, m) => write!(f, "{a} / [{m}]"),
            Principal::Block(i) => write!(f, "<{i}>"),
            Principal::BlockPair { iblock, mblock } => write!(f, "<{iblock}> / [{mblock}]"),
            Principal::Nested { mblock, iblock } => write!(f, "[{mblock}]<{iblock}>"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub focus: Path,
    pub principal: Principal,
    /// Annotations introduced by the rule, in pre-order of the new components.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fresh: Vec<Ann>,
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {} on {}", self.rule, self.focus, self.principal)?;
        if !self.fresh.is_empty() {
            let fresh: Vec<String> = self.fresh.iter().map(Ann::to_string).collect();
            write!(f, " fresh {}", fresh.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct RuleError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError(msg.into()))
}

// ---------------------------------------------------------------------------
// Axioms

/// The first axiom instance in pre-order, if any.
pub fn axiom_instance(s: &Sequent) -> Option<RuleInstance> {
    for (path, t) in s.components() {
        let hit = if t.ante.contains(&Formula::Bottom) {
            Some((RuleId::BotL, Formula::Bottom))
        } else if t.succ.contains(&Formula::Top) {
            Some((RuleId::TopR, Formula::Top))
        } else {
            t.ante
                .iter()
                .find(|f| f.is_atom() && t.succ.contains(*f))
                .map(|p| (RuleId::Id, p.clone()))
        };
        if let Some((rule, f)) = hit {
            return Some(RuleInstance {
                rule,
                focus: path,
                principal: Principal::Formula(f),
                fresh: Vec::new(),
            });
        }
    }
    None
}

pub fn is_axiomatic(s: &Sequent) -> bool {
    axiom_instance(s).is_some()
}

fn axiom_witnessed(s: &Sequent, inst: &RuleInstance) -> bool {
    let Some(t) = s.get(&inst.focus) else {
        return false;
    };
    match (inst.rule, &inst.principal) {
        (RuleId::BotL, Principal::Formula(Formula::Bottom)) => t.ante.contains(&Formula::Bottom),
        (RuleId::TopR, Principal::Formula(Formula::Top)) => t.succ.contains(&Formula::Top),
        (RuleId::Id, Principal::Formula(p)) => {
            p.is_atom() && t.ante.contains(p) && t.succ.contains(p)
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Saturation conditions

/// Whether the saturation condition of `rule` holds for `principal` in the component `t`.
///
/// Returns `true` when the principal is not present, since then there is nothing to do.
pub fn condition_holds(rule: RuleId, principal: &Principal, t: &Sequent) -> bool {
    use Formula as F;
    match (rule, principal) {
        (RuleId::AndL, Principal::Formula(F::And(a, b))) => {
            t.ante.contains(&**a) && t.ante.contains(&**b)
        }
        (RuleId::AndR, Principal::Formula(F::And(a, b))) => {
            t.succ.contains(&**a) || t.succ.contains(&**b)
        }
        (RuleId::OrL, Principal::Formula(F::Or(a, b))) => {
            t.ante.contains(&**a) || t.ante.contains(&**b)
        }
        (RuleId::OrR, Principal::Formula(F::Or(a, b))) => {
            t.succ.contains(&**a) && t.succ.contains(&**b)
        }
        (RuleId::ImpL, Principal::Formula(F::Imp(a, b))) => {
            t.succ.contains(&**a) || t.ante.contains(&**b)
        }
        (RuleId::ImpRIn | RuleId::ImpRNew, Principal::Formula(F::Imp(a, b))) => {
            (t.ante.contains(&**a) && t.succ.contains(&**b))
                || t.iblocks
                    .iter()
                    .any(|i| i.ante.contains(&**a) && i.succ.contains(&**b))
        }
        (RuleId::BoxL, Principal::FormulaBlock(F::Box(a), m)) => t
            .block(BlockKind::Modal, *m)
            .is_none_or(|m| m.ante.contains(&**a)),
        (RuleId::BoxR, Principal::Formula(F::Box(a))) => {
            t.mblocks.iter().any(|m| m.succ.contains(&**a))
                || t.iblocks
                    .iter()
                    .any(|i| i.mblocks.iter().any(|m| m.succ.contains(&**a)))
        }
        (RuleId::DiaL, Principal::Formula(F::Dia(a))) => {
            t.mblocks.iter().any(|m| m.ante.contains(&**a))
        }
        (RuleId::DiaR, Principal::FormulaBlock(F::Dia(a), m)) => t
            .block(BlockKind::Modal, *m)
            .is_none_or(|m| m.succ.contains(&**a)),
        (RuleId::Trans, Principal::Block(i)) => t
            .block(BlockKind::Impl, *i)
            .is_none_or(|i| t.ante.is_subset(&i.ante)),
        (RuleId::InterFC, Principal::BlockPair { iblock, mblock }) => {
            match (
                t.block(BlockKind::Impl, *iblock),
                t.block(BlockKind::Modal, *mblock),
            ) {
                (Some(i), Some(m)) => i.mblocks.iter().any(|x| structurally_included(m, x)),
                _ => true,
            }
        }
        (RuleId::InterBC, Principal::Nested { mblock, iblock }) => {
            let Some(u) = t
                .block(BlockKind::Modal, *mblock)
                .and_then(|m| m.block(BlockKind::Impl, *iblock))
            else {
                return true;
            };
            t.iblocks
                .iter()
                .any(|i| i.mblocks.iter().any(|x| structurally_included(u, x)))
        }
        _ => true,
    }
}

/// Reliance pairs `(original, copy)`.
pub type Rel = BTreeSet<(Ann, Ann)>;

/// The condition search uses before applying a rule.
///
/// It agrees with [`condition_holds`] except for InterBC, whose witness must also be
/// a copy relying on `S₁`. Countermodel extraction makes `S₁` null through that pair;
/// a witness that is merely `⊆^S`-larger leaves a world with no backward partner.
pub fn search_condition_holds(rule: RuleId, principal: &Principal, t: &Sequent, rel: &Rel) -> bool {
    let (RuleId::InterBC, Principal::Nested { mblock, iblock }) = (rule, principal) else {
        return condition_holds(rule, principal, t);
    };
    let Some(u) = t
        .block(BlockKind::Modal, *mblock)
        .and_then(|m| m.block(BlockKind::Impl, *iblock))
    else {
        return true;
    };
    t.iblocks.iter().any(|i| {
        i.mblocks
            .iter()
            .any(|x| rel.contains(&(u.ann, x.ann)) && structurally_included(u, x))
    })
}

/// Candidate `(rule, principal)` pairs of `group` at `t`, saturated or not, in rule order.
fn candidates(t: &Sequent, group: Group) -> Vec<(RuleId, Principal)> {
    use Formula as F;
    let mut out = Vec::new();
    match group {
        Group::R1 => {
            for f in &t.ante {
                match f {
                    F::And(..) => out.push((RuleId::AndL, Principal::Formula(f.clone()))),
                    F::Or(..) => out.push((RuleId::OrL, Principal::Formula(f.clone()))),
                    F::Imp(..) => out.push((RuleId::ImpL, Principal::Formula(f.clone()))),
                    F::Box(_) => {
                        for m in &t.mblocks {
                            out.push((RuleId::BoxL, Principal::FormulaBlock(f.clone(), m.ann)));
                        }
                    }
                    F::Dia(_) => out.push((RuleId::DiaL, Principal::Formula(f.clone()))),
                    _ => {}
                }
            }
            for f in &t.succ {
                match f {
                    F::And(..) => out.push((RuleId::AndR, Principal::Formula(f.clone()))),
                    F::Or(..) => out.push((RuleId::OrR, Principal::Formula(f.clone()))),
                    F::Dia(_) => {
                        for m in &t.mblocks {
                            out.push((RuleId::DiaR, Principal::FormulaBlock(f.clone(), m.ann)));
                        }
                    }
                    _ => {}
                }
            }
        }
        Group::R2 => {
            for i in &t.iblocks {
                out.push((RuleId::Trans, Principal::Block(i.ann)));
            }
            for i in &t.iblocks {
                for m in &t.mblocks {
                    out.push((
                        RuleId::InterFC,
                        Principal::BlockPair {
                            iblock: i.ann,
                            mblock: m.ann,
                        },
                    ));
                }
            }
        }
        Group::R3 => {
            for f in &t.succ {
                match f {
                    F::Imp(a, _) => {
                        let rule = if t.ante.contains(&**a) {
                            RuleId::ImpRIn
                        } else {
                            RuleId::ImpRNew
                        };
                        out.push((rule, Principal::Formula(f.clone())));
                    }
                    F::Box(_) => out.push((RuleId::BoxR, Principal::Formula(f.clone()))),
                    _ => {}
                }
            }
        }
        Group::R4 => {
            for m in &t.mblocks {
                for u in &m.iblocks {
                    out.push((
                        RuleId::InterBC,
                        Principal::Nested {
                            mblock: m.ann,
                            iblock: u.ann,
                        },
                    ));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out
}

/// Unsaturated `(rule, principal)` pairs of `group` at `t`; branching rules last.
pub fn pending(t: &Sequent, group: Group, rel: &Rel) -> Vec<(RuleId, Principal)> {
    let mut out: Vec<_> = candidates(t, group)
        .into_iter()
        .filter(|(r, p)| !search_condition_holds(*r, p, t, rel))
        .collect();
    out.sort_by_key(|(r, _)| r.arity() > 1);
    out
}

/// Whether `rule` is saturated for every principal at `focus`.
pub fn saturated_for(rule: RuleId, focus: &Path, s: &Sequent) -> bool {
    let Some(t) = s.get(focus) else {
        return true;
    };
    let Some(group) = rule.group() else {
        return match rule {
            RuleId::BotL => !t.ante.contains(&Formula::Bottom),
            RuleId::TopR => !t.succ.contains(&Formula::Top),
            _ => !t.ante.iter().any(|f| f.is_atom() && t.succ.contains(f)),
        };
    };
    candidates(t, group)
        .iter()
        .filter(|(r, _)| *r == rule || (rule_is_impr(rule) && rule_is_impr(*r)))
        .all(|(r, p)| condition_holds(*r, p, t))
}

fn rule_is_impr(r: RuleId) -> bool {
    matches!(r, RuleId::ImpRIn | RuleId::ImpRNew)
}

fn local_ok(t: &Sequent, group: Group) -> bool {
    candidates(t, group)
        .iter()
        .all(|(r, p)| condition_holds(*r, p, t))
}

/// R1 conditions at `t` and at every component reachable through modal blocks only.
pub fn r1_saturated(t: &Sequent) -> bool {
    local_ok(t, Group::R1) && t.mblocks.iter().all(r1_saturated)
}

pub fn r2_saturated(t: &Sequent) -> bool {
    r1_saturated(t) && local_ok(t, Group::R2)
}

pub fn r3_saturated(t: &Sequent) -> bool {
    r2_saturated(t) && local_ok(t, Group::R3)
}

pub fn r4_saturated(t: &Sequent, rel: &Rel) -> bool {
    r3_saturated(t)
        && candidates(t, Group::R4)
            .iter()
            .all(|(r, p)| search_condition_holds(*r, p, t, rel))
}

pub fn saturated_at(t: &Sequent, group: Group, rel: &Rel) -> bool {
    match group {
        Group::R1 => r1_saturated(t),
        Group::R2 => r2_saturated(t),
        Group::R3 => r3_saturated(t),
        Group::R4 => r4_saturated(t, rel),
    }
}

/// Highest level reached by the component at `focus`; `None` if not even R1.
pub fn saturation_level(focus: &Path, s: &Sequent, rel: &Rel) -> Option<Group> {
    let t = s.get(focus)?;
    let mut level = None;
    for g in [Group::R1, Group::R2, Group::R3, Group::R4] {
        if saturated_at(t, g, rel) {
            level = Some(g);
        } else {
            break;
        }
    }
    level
}

// ---------------------------------------------------------------------------
// Blocking

/// Strict ancestors reached from `focus` by implication steps only, nearest first.
pub fn impl_ancestors(focus: &Path) -> Vec<Path> {
    let mut out = Vec::new();
    let mut cur = focus.clone();
    while let Some((BlockKind::Impl, _)) = cur.last() {
        cur = cur.parent().expect("non-empty path has a parent");
        out.push(cur.clone());
    }
    out
}

/// Every component that blocks `focus`: an R3-saturated implication-ancestor `≃` to it.
pub fn blockers(focus: &Path, s: &Sequent) -> Vec<Path> {
    let Some(t) = s.get(focus) else {
        return Vec::new();
    };
    impl_ancestors(focus)
        .into_iter()
        .filter(|a| {
            let anc = s.get(a).expect("ancestor exists");
            sharp_equivalent(anc, t) && r3_saturated(anc)
        })
        .collect()
}

/// The nearest blocker of `focus`, if any.
pub fn is_blocked(focus: &Path, s: &Sequent) -> Option<Path> {
    blockers(focus, s).into_iter().next()
}

/// Components that take part in search: those neither blocked nor inside a blocked one.
///
/// A blocked component stands for its blocker, so nothing in its subtree is expanded.
pub fn active_components(s: &Sequent) -> Vec<(Path, &Sequent)> {
    let mut frozen: BTreeSet<Ann> = BTreeSet::new();
    let mut out = Vec::new();
    for (p, t) in s.components() {
        let parent_frozen = p.0.len() >= 2 && frozen.contains(&p.0[p.0.len() - 2].1);
        if parent_frozen || is_blocked(&p, s).is_some() {
            frozen.insert(t.ann);
        } else {
            out.push((p, t));
        }
    }
    out
}

/// Every component is R`i`-saturated, blocked, or inside a blocked component.
pub fn is_global_saturated_at(s: &Sequent, group: Group, rel: &Rel) -> bool {
    active_components(s)
        .iter()
        .all(|(_, t)| saturated_at(t, group, rel))
}

pub fn is_global_saturated(e: &EnrichedSequent) -> bool {
    !is_axiomatic(&e.root) && is_global_saturated_at(&e.root, Group::R4, &e.rel)
}

// ---------------------------------------------------------------------------
// Rule application

/// Number of fresh annotations an instance of `rule` needs on `principal` in `t`.
fn fresh_needed(rule: RuleId, principal: &Principal, t: &Sequent) -> Result<usize, RuleError> {
    Ok(match (rule, principal) {
        (RuleId::ImpRNew | RuleId::DiaL, _) => 1,
        (RuleId::BoxR, _) => 2,
        (RuleId::InterFC, Principal::BlockPair { mblock, .. }) => t
            .block(BlockKind::Modal, *mblock)
            .ok_or_else(|| RuleError(format!("no modal block [{mblock}]")))?
            .num_components(),
        (RuleId::InterBC, Principal::Nested { mblock, iblock }) => {
            1 + t
                .block(BlockKind::Modal, *mblock)
                .and_then(|m| m.block(BlockKind::Impl, *iblock))
                .ok_or_else(|| RuleError(format!("no block [{mblock}]<{iblock}>")))?
                .num_components()
        }
        _ => 0,
    })
}

/// Builds a concrete instance, drawing fresh annotations from `*next`.
pub fn instantiate(
    s: &Sequent,
    focus: &Path,
    rule: RuleId,
    principal: Principal,
    next: &mut Ann,
) -> Result<RuleInstance, RuleError> {
    let t = s
        .get(focus)
        .ok_or_else(|| RuleError(format!("no component at {focus}")))?;
    let n = fresh_needed(rule, &principal, t)?;
    let fresh = (0..n as Ann).map(|k| *next + k).collect();
    *next += n as Ann;
    Ok(RuleInstance {
        rule,
        focus: focus.clone(),
        principal,
        fresh,
    })
}

/// All non-redundant instances of `group` in `e`, by focus pre-order.
///
/// Each instance draws its fresh annotations independently from `max + 1`.
pub fn applicable_instances(e: &EnrichedSequent, group: Group) -> Vec<RuleInstance> {
    if is_axiomatic(&e.root) {
        return Vec::new();
    }
    let base = e.root.max_ann() + 1;
    let mut out = Vec::new();
    for (path, t) in e.root.components() {
        for (rule, principal) in pending(t, group, &e.rel) {
            let mut next = base;
            if let Ok(inst) = instantiate(&e.root, &path, rule, principal, &mut next) {
                out.push(inst);
            }
        }
    }
    out
}

fn copy_with(t: &Sequent, fresh: &mut impl Iterator<Item = Ann>) -> (Sequent, Vec<(Ann, Ann)>) {
    let mut next = 0;
    let (mut copy, pairs0) = t.renumbered(&mut next);
    // Renumber 0.. into the supplied annotations, preserving pre-order.
    let map: Vec<Ann> = (0..next)
        .map(|_| fresh.next().expect("enough fresh annotations"))
        .collect();
    fn apply(s: &mut Sequent, map: &[Ann]) {
        s.ann = map[s.ann as usize];
        for b in s.iblocks.iter_mut().chain(s.mblocks.iter_mut()) {
            apply(b, map);
        }
    }
    apply(&mut copy, &map);
    let pairs = pairs0
        .into_iter()
        .map(|(orig, tmp)| (orig, map[tmp as usize]))
        .collect();
    (copy, pairs)
}

/// Premises of `inst` applied to `conc`.
pub fn premises(
    conc: &EnrichedSequent,
    inst: &RuleInstance,
) -> Result<Vec<EnrichedSequent>, RuleError> {
    use Formula as F;
    let t = conc
        .root
        .get(&inst.focus)
        .ok_or_else(|| RuleError(format!("no component at {}", inst.focus)))?;
    if inst.rule.is_axiom() {
        return if axiom_witnessed(&conc.root, inst) {
            Ok(Vec::new())
        } else {
            err(format!("{} is not witnessed at {}", inst.rule, inst.focus))
        };
    }
    let need = fresh_needed(inst.rule, &inst.principal, t)?;
    if inst.fresh.len() != need {
        return err(format!(
            "{} needs {need} fresh annotations, got {}",
            inst.rule,
            inst.fresh.len()
        ));
    }
    let used: BTreeSet<Ann> = conc.root.annotations().into_iter().collect();
    let fresh_set: BTreeSet<Ann> = inst.fresh.iter().copied().collect();
    if fresh_set.len() != inst.fresh.len() || fresh_set.iter().any(|a| used.contains(a)) {
        return err("fresh annotations collide with the conclusion");
    }

    let edit = |f: &dyn Fn(&mut Sequent)| -> EnrichedSequent {
        let mut out = conc.clone();
        f(out.root.get_mut(&inst.focus).expect("focus exists"));
        out
    };
    let need_ante = |a: &Formula| -> Result<(), RuleError> {
        if t.ante.contains(a) {
            Ok(())
        } else {
            err(format!("{a} is not in the antecedent at {}", inst.focus))
        }
    };
    let need_succ = |a: &Formula| -> Result<(), RuleError> {
        if t.succ.contains(a) {
            Ok(())
        } else {
            err(format!("{a} is not in the succedent at {}", inst.focus))
        }
    };
    let mut fresh = inst.fresh.iter().copied();

    let out = match (inst.rule, &inst.principal) {
        (RuleId::AndL, Principal::Formula(f @ F::And(a, b))) => {
            need_ante(f)?;
            vec![edit(&|s| {
                s.ante.insert((**a).clone());
                s.ante.insert((**b).clone());
            })]
        }
        (RuleId::AndR, Principal::Formula(f @ F::And(a, b))) => {
            need_succ(f)?;
            vec![
                edit(&|s| {
                    s.succ.insert((**a).clone());
                }),
                edit(&|s| {
                    s.succ.insert((**b).clone());
                }),
            ]
        }
        (RuleId::OrL, Principal::Formula(f @ F::Or(a, b))) => {
            need_ante(f)?;
            vec![
                edit(&|s| {
                    s.ante.insert((**a).clone());
                }),
                edit(&|s| {
                    s.ante.insert((**b).clone());
                }),
            ]
        }
        (RuleId::OrR, Principal::Formula(f @ F::Or(a, b))) => {
            need_succ(f)?;
            vec![edit(&|s| {
                s.succ.insert((**a).clone());
                s.succ.insert((**b).clone());
            })]
        }
        (RuleId::ImpL, Principal::Formula(f @ F::Imp(a, b))) => {
            need_ante(f)?;
            vec![
                edit(&|s| {
                    s.succ.insert((**a).clone());
                }),
                edit(&|s| {
                    s.ante.insert((**b).clone());
                }),
            ]
        }
        (RuleId::ImpRIn, Principal::Formula(f @ F::Imp(a, b))) => {
            need_succ(f)?;
            if !t.ante.contains(&**a) {
                return err(format!("ImpR_in needs {a} in the antecedent"));
            }
            vec![edit(&|s| {
                s.succ.insert((**b).clone());
            })]
        }
        (RuleId::ImpRNew, Principal::Formula(f @ F::Imp(a, b))) => {
            need_succ(f)?;
            if t.ante.contains(&**a) {
                return err(format!("ImpR_new needs {a} outside the antecedent"));
            }
            let k = fresh.next().expect("counted");
            let block = Sequent::empty(k)
                .with_ante([(**a).clone()])
                .with_succ([(**b).clone()]);
            vec![edit(&|s| s.push_block(BlockKind::Impl, block.clone()))]
        }
        (RuleId::BoxL, Principal::FormulaBlock(f @ F::Box(a), m)) => {
            need_ante(f)?;
            if t.block(BlockKind::Modal, *m).is_none() {
                return err(format!("no modal block [{m}]"));
            }
            vec![edit(&|s| {
                let path = Path::root().child(BlockKind::Modal, *m);
                s.get_mut(&path)
                    .expect("checked")
                    .ante
                    .insert((**a).clone());
            })]
        }
        (RuleId::BoxR, Principal::Formula(f @ F::Box(a))) => {
            need_succ(f)?;
            let k = fresh.next().expect("counted");
            let h = fresh.next().expect("counted");
            let block = Sequent::empty(k).with_mblock(Sequent::empty(h).with_succ([(**a).clone()]));
            vec![edit(&|s| s.push_block(BlockKind::Impl, block.clone()))]
        }
        (RuleId::DiaL, Principal::Formula(f @ F::Dia(a))) => {
            need_ante(f)?;
            let k = fresh.next().expect("counted");
            let block = Sequent::empty(k).with_ante([(**a).clone()]);
            vec![edit(&|s| s.push_block(BlockKind::Modal, block.clone()))]
        }
        (RuleId::DiaR, Principal::FormulaBlock(f @ F::Dia(a), m)) => {
            need_succ(f)?;
            if t.block(BlockKind::Modal, *m).is_none() {
                return err(format!("no modal block [{m}]"));
            }
            vec![edit(&|s| {
                let path = Path::root().child(BlockKind::Modal, *m);
                s.get_mut(&path)
                    .expect("checked")
                    .succ
                    .insert((**a).clone());
            })]
        }
        (RuleId::Trans, Principal::Block(i)) => {
            if t.block(BlockKind::Impl, *i).is_none() {
                return err(format!("no implication block <{i}>"));
            }
            vec![edit(&|s| {
                let gamma = s.ante.clone();
                let path = Path::root().child(BlockKind::Impl, *i);
                s.get_mut(&path).expect("checked").ante.extend(gamma);
            })]
        }
        (RuleId::InterFC, Principal::BlockPair { iblock, mblock }) => {
            if t.block(BlockKind::Impl, *iblock).is_none() {
                return err(format!("no implication block <{iblock}>"));
            }
            let m = t
                .block(BlockKind::Modal, *mblock)
                .ok_or_else(|| RuleError(format!("no modal block [{mblock}]")))?;
            let (copy, _) = copy_with(&m.local_positive(), &mut fresh);
            vec![edit(&|s| {
                let path = Path::root().child(BlockKind::Impl, *iblock);
                s.get_mut(&path)
                    .expect("checked")
                    .push_block(BlockKind::Modal, copy.clone());
            })]
        }
        (RuleId::InterBC, Principal::Nested { mblock, iblock }) => {
            let u = t
                .block(BlockKind::Modal, *mblock)
                .and_then(|m| m.block(BlockKind::Impl, *iblock))
                .ok_or_else(|| RuleError(format!("no block [{mblock}]<{iblock}>")))?;
            let k = fresh.next().expect("counted");
            let (copy, pairs) = copy_with(u, &mut fresh);
            let block = Sequent::empty(k).with_mblock(copy);
            let mut out = edit(&|s| s.push_block(BlockKind::Impl, block.clone()));
            // Pairs internal to U carry over to the copy, so a witness copied along
            // with U still relies on the component it stands for.
            let image: BTreeMap<Ann, Ann> = pairs.iter().copied().collect();
            let inherited: Vec<(Ann, Ann)> = out
                .rel
                .iter()
                .filter_map(|(a, b)| Some((*image.get(a)?, *image.get(b)?)))
                .collect();
            out.rel.extend(pairs);
            out.rel.extend(inherited);
            vec![out]
        }
        (rule, principal) => {
            return err(format!("{rule} cannot act on {principal}"));
        }
    };
    Ok(out)
}

// ---------------------------------------------------------------------------
// Derivations

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    /// Has a rule instance and premises.
    Internal,
    /// Closed by an axiom instance.
    Axiomatic,
    /// Global-saturated leaf: the branch fails.
    Saturated,
    /// Left unexpanded.
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub sequent: EnrichedSequent,
    pub status: NodeStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<RuleInstance>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeId>,
}

/// A derivation stored as an arena; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub nodes: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("node {node}: {reason}")]
pub struct ProofError {
    pub node: NodeId,
    pub reason: String,
}

impl Derivation {
    pub fn new(root: EnrichedSequent) -> Self {
        Derivation {
            nodes: vec![Node {
                id: 0,
                sequent: root,
                status: NodeStatus::Open,
                instance: None,
                children: Vec::new(),
            }],
        }
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Expands the open leaf `id` with `inst`, returning the new child ids.
    pub fn expand(&mut self, id: NodeId, inst: RuleInstance) -> Result<Vec<NodeId>, RuleError> {
        let prem = premises(&self.nodes[id].sequent, &inst)?;
        let mut ids = Vec::with_capacity(prem.len());
        for p in prem {
            let cid = self.nodes.len();
            self.nodes.push(Node {
                id: cid,
                sequent: p,
                status: NodeStatus::Open,
                instance: None,
                children: Vec::new(),
            });
            ids.push(cid);
        }
        let node = &mut self.nodes[id];
        node.status = if inst.rule.is_axiom() {
            NodeStatus::Axiomatic
        } else {
            NodeStatus::Internal
        };
        node.instance = Some(inst);
        node.children = ids.clone();
        Ok(ids)
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![0];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id];
            if n.children.is_empty() {
                out.push(id);
            } else {
                stack.extend(n.children.iter().rev());
            }
        }
        out
    }

    /// Rule applications on the path from the root to `leaf`.
    pub fn branch(&self, leaf: NodeId) -> Vec<&RuleInstance> {
        let mut parent = vec![None; self.nodes.len()];
        for n in &self.nodes {
            for &c in &n.children {
                parent[c] = Some(n.id);
            }
        }
        let mut out = Vec::new();
        let mut cur = parent[leaf];
        while let Some(id) = cur {
            out.push(self.nodes[id].instance.as_ref().expect("internal node"));
            cur = parent[id];
        }
        out.reverse();
        out
    }

    pub fn count_rules(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.status == NodeStatus::Internal)
            .count()
    }

    /// Line-indented rendering, two spaces per level.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, depth)) = stack.pop() {
            let n = &self.nodes[id];
            for _ in 0..depth {
                out.push_str("  ");
            }
            out.push_str(&n.sequent.to_string());
            match (&n.instance, n.status) {
                (Some(inst), _) => {
                    out.push_str("    by ");
                    out.push_str(&inst.to_string());
                }
                (None, NodeStatus::Saturated) => out.push_str("    saturated"),
                (None, _) => out.push_str("    open"),
            }
            out.push('\n');
            for &c in n.children.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivations serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn cumulative(conc: &Sequent, prem: &Sequent) -> Result<(), String> {
    let index = prem.index();
    for (_, c) in conc.components() {
        let path = index
            .get(&c.ann)
            .ok_or_else(|| format!("component {} disappeared", c.ann))?;
        let p = prem.get(path).expect("indexed");
        if !c.ante.is_subset(&p.ante) || !c.succ.is_subset(&p.succ) {
            return Err(format!("component {} lost formulas", c.ann));
        }
        for b in &c.iblocks {
            if p.block(BlockKind::Impl, b.ann).is_none() {
                return Err(format!("block <{}> moved", b.ann));
            }
        }
        for b in &c.mblocks {
            if p.block(BlockKind::Modal, b.ann).is_none() {
                return Err(format!("block [{}] moved", b.ann));
            }
        }
    }
    Ok(())
}

/// Replays every rule application. Leaves are not required to be axiomatic.
pub fn check_steps(d: &Derivation) -> Result<(), ProofError> {
    if d.nodes.is_empty() {
        return Err(ProofError {
            node: 0,
            reason: "empty derivation".into(),
        });
    }
    let fail = |node, reason: String| ProofError { node, reason };
    let mut seen = vec![false; d.nodes.len()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let n = d
            .nodes
            .get(id)
            .ok_or_else(|| fail(id, "dangling child id".into()))?;
        if std::mem::replace(&mut seen[id], true) {
            return Err(fail(id, "node reached twice".into()));
        }
        if n.id != id {
            return Err(fail(id, "node id mismatch".into()));
        }
        if !n.sequent.root.annotations_unique() {
            return Err(fail(id, "duplicate annotations".into()));
        }
        let Some(inst) = &n.instance else {
            if !n.children.is_empty() {
                return Err(fail(id, "children without a rule".into()));
            }
            if n.status == NodeStatus::Saturated && !is_global_saturated(&n.sequent) {
                return Err(fail(
                    id,
                    "leaf marked saturated is not global-saturated".into(),
                ));
            }
            continue;
        };
        let expect = premises(&n.sequent, inst).map_err(|e| fail(id, e.0))?;
        if expect.len() != inst.rule.arity() {
            return Err(fail(
                id,
                format!("{} must have {} premises", inst.rule, inst.rule.arity()),
            ));
        }
        if expect.len() != n.children.len() {
            return Err(fail(id, "wrong number of premises".into()));
        }
        if inst.rule.is_axiom() {
            if n.status != NodeStatus::Axiomatic {
                return Err(fail(id, "axiom node not marked axiomatic".into()));
            }
            continue;
        }
        if n.status != NodeStatus::Internal {
            return Err(fail(id, "rule node not marked internal".into()));
        }
        // Side conditions, checked directly rather than through `premises`.
        if let (RuleId::ImpRIn | RuleId::ImpRNew, Principal::Formula(Formula::Imp(a, _))) =
            (inst.rule, &inst.principal)
        {
            let gamma = &n.sequent.root.get(&inst.focus).expect("replayed").ante;
            if gamma.contains(&**a) != (inst.rule == RuleId::ImpRIn) {
                return Err(fail(
                    id,
                    "ImpR variant does not match the antecedent".into(),
                ));
            }
        }
        let used: BTreeSet<Ann> = n.sequent.root.annotations().into_iter().collect();
        if inst.fresh.iter().any(|a| used.contains(a)) {
            return Err(fail(id, "annotation reused".into()));
        }
        for (&c, e) in n.children.iter().zip(&expect) {
            let child = d
                .nodes
                .get(c)
                .ok_or_else(|| fail(id, "dangling child id".into()))?;
            if &child.sequent != e {
                return Err(fail(
                    c,
                    format!("premise mismatch: expected {e}, found {}", child.sequent),
                ));
            }
            if !n.sequent.rel.is_subset(&child.sequent.rel) {
                return Err(fail(c, "reliance pairs were dropped".into()));
            }
            let added = child.sequent.rel.len() - n.sequent.rel.len();
            if inst.rule == RuleId::InterBC {
                if let Principal::Nested { iblock, .. } = inst.principal {
                    let u = n
                        .sequent
                        .root
                        .components()
                        .into_iter()
                        .find(|(_, s)| s.ann == iblock)
                        .map(|(_, s)| s.num_components())
                        .unwrap_or(0);
                    if added < u {
                        return Err(fail(c, "InterBC must relate every copied component".into()));
                    }
                }
            } else if added != 0 {
                return Err(fail(c, "only InterBC extends reliance pairs".into()));
            }
            cumulative(&n.sequent.root, &child.sequent.root).map_err(|r| fail(c, r))?;
            queue.push_back(c);
        }
    }
    Ok(())
}

/// A proof: every step replays and every leaf is closed by an axiom.
pub fn check_proof(d: &Derivation) -> Result<(), ProofError> {
    check_steps(d)?;
    for id in d.leaves() {
        let n = &d.nodes[id];
        let closed =
            matches!(&n.instance, Some(i) if i.rule.is_axiom()) && is_axiomatic(&n.sequent.root);
        if !closed {
            return Err(ProofError {
                node: id,
                reason: format!("leaf {} is not axiomatic", n.sequent),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse as f;

    fn s(text: &str) -> Sequent {
        Sequent::parse(text).unwrap()
    }

    fn e(text: &str) -> EnrichedSequent {
        EnrichedSequent::parse(text).unwrap()
    }

    #[test]
    fn axioms() {
        assert!(is_axiomatic(&s("p => p")));
        assert!(is_axiomatic(&s("=> <false, q => r>")));
        assert!(is_axiomatic(&s("=> [=> true]")));
        assert!(!is_axiomatic(&s("p => q")));
        assert!(!is_axiomatic(&s("p => [=> p]")));
    }

    #[test]
    fn impr_new_creates_block() {
        let conc = e("=>{0} p -> q");
        let insts = applicable_instances(&conc, Group::R3);
        assert_eq!(insts.len(), 1);
        assert_eq!(insts[0].rule, RuleId::ImpRNew);
        let prem = premises(&conc, &insts[0]).unwrap();
        assert_eq!(prem[0].root.to_string(), "=>{0} p -> q, < p =>{1} q >");
    }

    #[test]
    fn interbc_example() {
        let conc = e("box r =>{1} q, [ r =>{2} s, < p =>{3} q, [ q =>{4} ] > ]");
        let inst = RuleInstance {
            rule: RuleId::InterBC,
            focus: Path::root(),
            principal: Principal::Nested {
                mblock: 2,
                iblock: 3,
            },
            fresh: vec![5, 6, 7],
        };
        let prem = premises(&conc, &inst).unwrap();
        assert_eq!(prem.len(), 1);
        let expected = Sequent::parse(
            "box r =>{1} q, [ r =>{2} s, < p =>{3} q, [ q =>{4} ] > ], < =>{5} [ p =>{6} q, [ q =>{7} ] ] >",
        )
        .unwrap();
        assert_eq!(prem[0].root, expected);
        assert_eq!(prem[0].rel, BTreeSet::from([(3, 6), (4, 7)]));
    }

    #[test]
    fn interbc_carries_internal_pairs_to_the_copy() {
        let conc = EnrichedSequent::parse(
            "(4, 5); =>{1} [ =>{2} < =>{3} [ =>{4} p ], < =>{6} [ =>{5} p ] > > ]",
        )
        .unwrap();
        let inst = RuleInstance {
            rule: RuleId::InterBC,
            focus: Path::root(),
            principal: Principal::Nested {
                mblock: 2,
                iblock: 3,
            },
            fresh: vec![7, 8, 9, 10, 11],
        };
        let prem = premises(&conc, &inst).unwrap();
        // Implication blocks come first in pre-order: 3→8, 6→9, 5→10, 4→11.
        // The inner pair (4, 5) becomes (11, 10).
        assert_eq!(
            prem[0].rel,
            BTreeSet::from([(3, 8), (4, 5), (4, 11), (5, 10), (6, 9), (11, 10)])
        );
        check_steps_single(&conc, &inst, &prem[0]);
    }

    fn check_steps_single(conc: &EnrichedSequent, inst: &RuleInstance, prem: &EnrichedSequent) {
        let mut d = Derivation::new(conc.clone());
        let kids = d.expand(0, inst.clone()).unwrap();
        assert_eq!(&d.node(kids[0]).sequent, prem);
        check_steps(&d).unwrap();
    }

    #[test]
    fn search_requires_a_reliant_interbc_witness() {
        let t = Sequent::parse("=>{0} [ =>{1} < p =>{2} > ], < =>{3} [ p, q =>{4} ] >").unwrap();
        let principal = Principal::Nested {
            mblock: 1,
            iblock: 2,
        };
        assert!(condition_holds(RuleId::InterBC, &principal, &t));
        assert!(!search_condition_holds(
            RuleId::InterBC,
            &principal,
            &t,
            &Rel::new()
        ));
        let rel = Rel::from([(2, 4)]);
        assert!(search_condition_holds(
            RuleId::InterBC,
            &principal,
            &t,
            &rel
        ));
    }

    #[test]
    fn dial_creates_modal_block() {
        let conc = e("dia p =>{0}");
        let insts = applicable_instances(&conc, Group::R1);
        assert_eq!(insts.len(), 1);
        assert_eq!(insts[0].rule, RuleId::DiaL);
        let prem = premises(&conc, &insts[0]).unwrap();
        assert_eq!(prem[0].root.to_string(), "dia p =>{0} [ p =>{1} ]");
    }

    #[test]
    fn conditions() {
        let t = s("p & q, p, q =>");
        assert!(condition_holds(
            RuleId::AndL,
            &Principal::Formula(f("p & q").unwrap()),
            &t
        ));
        let t = s("=> p -> q");
        assert!(!condition_holds(
            RuleId::ImpRNew,
            &Principal::Formula(f("p -> q").unwrap()),
            &t
        ));
        let t = s("a, b =>{0} <a, b, c =>{1}>");
        assert!(condition_holds(RuleId::Trans, &Principal::Block(1), &t));
        assert!(saturated_for(RuleId::Trans, &Path::root(), &t));
    }

    #[test]
    fn levels() {
        assert_eq!(
            saturation_level(&Path::root(), &s("=>"), &Rel::new()),
            Some(Group::R4)
        );
        assert_eq!(
            saturation_level(&Path::root(), &s("=> p -> q"), &Rel::new()),
            Some(Group::R2)
        );
        assert_eq!(
            saturation_level(&Path::root(), &s("p => p & q"), &Rel::new()),
            None
        );
    }

    // Independent enumeration of the R1 conditions, formula by formula.
    fn r1_by_hand(t: &Sequent) -> bool {
        use Formula as F;
        let ante_ok = t.ante.iter().all(|x| match x {
            F::And(a, b) => t.ante.contains(&**a) && t.ante.contains(&**b),
            F::Or(a, b) => t.ante.contains(&**a) || t.ante.contains(&**b),
            F::Imp(a, b) => t.succ.contains(&**a) || t.ante.contains(&**b),
            F::Box(a) => t.mblocks.iter().all(|m| m.ante.contains(&**a)),
            F::Dia(a) => t.mblocks.iter().any(|m| m.ante.contains(&**a)),
            _ => true,
        });
        let succ_ok = t.succ.iter().all(|x| match x {
            F::And(a, b) => t.succ.contains(&**a) || t.succ.contains(&**b),
            F::Or(a, b) => t.succ.contains(&**a) && t.succ.contains(&**b),
            F::Dia(a) => t.mblocks.iter().all(|m| m.succ.contains(&**a)),
            _ => true,
        });
        ante_ok && succ_ok && t.mblocks.iter().all(r1_by_hand)
    }

    proptest::proptest! {
        #[test]
        fn r1_matches_hand_enumeration(t in crate::sequent::arb::sequent()) {
            proptest::prop_assert_eq!(r1_saturated(&t), r1_by_hand(&t));
        }

        #[test]
        fn instances_are_non_redundant_and_cumulative(t in crate::sequent::arb::sequent()) {
            let conc = EnrichedSequent::new(t);
            for g in [Group::R1, Group::R2, Group::R3, Group::R4] {
                for inst in applicable_instances(&conc, g) {
                    let focus = conc.root.get(&inst.focus).unwrap();
                    proptest::prop_assert!(!search_condition_holds(
                        inst.rule,
                        &inst.principal,
                        focus,
                        &conc.rel
                    ));
                    let prem = premises(&conc, &inst).unwrap();
                    proptest::prop_assert_eq!(prem.len(), inst.rule.arity());
                    for p in &prem {
                        proptest::prop_assert!(p.root.annotations_unique());
                        proptest::prop_assert!(cumulative(&conc.root, &p.root).is_ok());
                        proptest::prop_assert!(conc.rel.is_subset(&p.rel));
                    }
                    // After a non-branching step the condition is met.
                    if prem.len() == 1 {
                        let after = prem[0].root.get(&inst.focus).unwrap();
                        proptest::prop_assert!(search_condition_holds(
                            inst.rule,
                            &inst.principal,
                            after,
                            &prem[0].rel
                        ));
                    }
                }
            }
        }
    }

    #[test]
    fn blocking_example() {
        // <1> is R3-saturated and has the same ♯ as <5> nested below it.
        let t = s(
            "G =>{0} <G =>{1} X, [ =>{2} a ], <G =>{3} X, [ =>{4} b ], <G =>{5} X, [ =>{6} a ]> > >",
        );
        let inner = Path(vec![
            (BlockKind::Impl, 1),
            (BlockKind::Impl, 3),
            (BlockKind::Impl, 5),
        ]);
        assert_eq!(
            is_blocked(&inner, &t),
            Some(Path(vec![(BlockKind::Impl, 1)]))
        );
        assert_eq!(is_blocked(&Path::root(), &t), None);
        let u = s("p =>{0} q & r, <p =>{1} q>");
        assert_eq!(is_blocked(&Path(vec![(BlockKind::Impl, 1)]), &u), None);
    }

    #[test]
    fn replay_single_axiom_and_rejects_open_leaf() {
        let mut d = Derivation::new(e("p =>{0} p"));
        let inst = axiom_instance(&d.root().sequent.root).unwrap();
        d.expand(0, inst).unwrap();
        assert!(check_proof(&d).is_ok());

        let d = Derivation::new(e("=>{0} p"));
        assert!(check_proof(&d).is_err());
    }

    #[test]
    fn replay_detects_tampering() {
        let mut d = Derivation::new(e("=>{0} p -> p"));
        let inst = applicable_instances(&d.root().sequent, Group::R3).remove(0);
        let kids = d.expand(0, inst).unwrap();
        let ax = axiom_instance(&d.node(kids[0]).sequent.root).unwrap();
        d.expand(kids[0], ax).unwrap();
        assert!(check_proof(&d).is_ok());
        let json = d.to_json();
        let back = Derivation::from_json(&json).unwrap();
        assert_eq!(back, d);
        let mut bad = d.clone();
        bad.nodes[1].sequent.root.succ.insert(f("q").unwrap());
        assert!(check_proof(&bad).is_err());
    }
}
