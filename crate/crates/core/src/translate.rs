//! Sequent-level translations into bi-nested sequents.
//!
//! `tr` maps tree-like labelled sequents: `≤`-successors become implication blocks
//! and `R`-successors become modal blocks. `fl` maps polarised nested sequents,
//! possibly with a hole, to flat bi-nested sequents (no implication blocks).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Cursor, Formula, ParseError, Tok};
use crate::sequent::{Ann, BlockKind, Sequent};

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("not tree-like: {0}")]
    NotTreeLike(String),
    #[error("relational atoms do not form a tree: {0}")]
    NotTree(String),
}

// ---------------------------------------------------------------------------
// Labelled sequents

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Leq,
    R,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelledSequent {
    pub rel: Vec<(Relation, String, String)>,
    pub left: Vec<(String, Formula)>,
    pub right: Vec<(String, Formula)>,
}

impl fmt::Display for LabelledSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut left: Vec<String> = self
            .rel
            .iter()
            .map(|(k, x, y)| match k {
                Relation::Leq => format!("{x}<={y}"),
                Relation::R => format!("{x}R{y}"),
            })
            .collect();
        left.extend(self.left.iter().map(|(x, a)| format!("{x}:{a}")));
        let right: Vec<String> = self.right.iter().map(|(x, a)| format!("{x}:{a}")).collect();
        write!(f, "{} |- {}", left.join("; "), right.join("; "))
    }
}

/// Splits an identifier like `xRy` into two labels.
fn split_r(word: &str) -> Option<(String, String)> {
    let (x, y) = word.split_once('R')?;
    (!x.is_empty() && !y.is_empty() && !y.contains('R')).then(|| (x.to_string(), y.to_string()))
}

fn label(cur: &mut Cursor) -> Result<String, ParseError> {
    match cur.bump() {
        Tok::Ident(x) => Ok(x),
        _ => Err(ParseError::new(cur.pos(), "expected a label")),
    }
}

impl LabelledSequent {
    /// Reads `x<=y; yRz; z:A |- x:A&B`. Items may be separated by `;` or `,`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut cur = Cursor::new(text)?;
        let mut out = LabelledSequent::default();
        let mut right = false;
        loop {
            match cur.peek().clone() {
                Tok::Eof => break,
                Tok::Semi | Tok::Comma => {
                    cur.bump();
                }
                Tok::Turnstile | Tok::Arrow(None) if !right => {
                    cur.bump();
                    right = true;
                }
                Tok::Ident(word) => {
                    let at = cur.pos();
                    cur.bump();
                    match cur.peek().clone() {
                        Tok::Colon => {
                            cur.bump();
                            let f = cur.formula()?;
                            let side = if right { &mut out.right } else { &mut out.left };
                            side.push((word, f));
                        }
                        Tok::Le | Tok::Ident(_) if right => {
                            return Err(ParseError::new(
                                at,
                                "relational atoms belong left of `|-`",
                            ));
                        }
                        Tok::Le => {
                            cur.bump();
                            out.rel.push((Relation::Leq, word, label(&mut cur)?));
                        }
                        Tok::Ident(r) if r == "R" => {
                            cur.bump();
                            out.rel.push((Relation::R, word, label(&mut cur)?));
                        }
                        _ => match split_r(&word) {
                            Some(_) if right => {
                                return Err(ParseError::new(
                                    at,
                                    "relational atoms belong left of `|-`",
                                ))
                            }
                            Some((x, y)) => out.rel.push((Relation::R, x, y)),
                            None => {
                                return Err(cur.unexpected("expected `:`, `<=` or `R`"));
                            }
                        },
                    }
                }
                _ => return Err(cur.unexpected("expected a labelled formula or relational atom")),
            }
        }
        if !right {
            return Err(ParseError::new(text.len(), "missing `|-`"));
        }
        Ok(out)
    }

    /// Labels in order of first appearance.
    fn labels(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let all = self
            .rel
            .iter()
            .flat_map(|(_, x, y)| [x, y])
            .chain(self.left.iter().map(|(x, _)| x))
            .chain(self.right.iter().map(|(x, _)| x));
        for x in all {
            if seen.insert(x.clone()) {
                out.push(x.clone());
            }
        }
        out
    }

    fn rel_labels(&self) -> BTreeSet<&str> {
        self.rel
            .iter()
            .flat_map(|(_, x, y)| [x.as_str(), y.as_str()])
            .collect()
    }

    fn reachable(&self, from: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([from.to_string()]);
        let mut stack = vec![from.to_string()];
        while let Some(x) = stack.pop() {
            for (_, a, b) in &self.rel {
                if *a == x && seen.insert(b.clone()) {
                    stack.push(b.clone());
                }
            }
        }
        seen
    }

    /// The rooted label: every relational label is reachable from it and every
    /// formula label is relational or the root itself.
    pub fn is_tree_like(&self) -> Option<String> {
        let rel = self.rel_labels();
        let roots: Vec<String> = self
            .labels()
            .into_iter()
            .filter(|x| {
                let reach = self.reachable(x);
                rel.iter().all(|y| reach.contains(*y))
                    && self
                        .left
                        .iter()
                        .chain(&self.right)
                        .all(|(y, _)| y == x || rel.contains(y.as_str()))
            })
            .collect();
        match roots.as_slice() {
            [x] => Some(x.clone()),
            _ => None,
        }
    }
}

/// Translates a tree-like labelled sequent. Annotations number labels in pre-order
/// from the root; siblings follow first appearance, `≤`-children before `R`-children.
pub fn tr_labelled(ls: &LabelledSequent) -> Result<Sequent, TranslateError> {
    let root = ls
        .is_tree_like()
        .ok_or_else(|| TranslateError::NotTreeLike(ls.to_string()))?;
    let edges: BTreeSet<(Relation, &str, &str)> = ls
        .rel
        .iter()
        .map(|(k, x, y)| (*k, x.as_str(), y.as_str()))
        .collect();
    let mut incoming: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, _, y) in &edges {
        *incoming.entry(y).or_default() += 1;
    }
    if incoming.contains_key(root.as_str()) {
        return Err(TranslateError::NotTree(format!(
            "root {root} has a predecessor"
        )));
    }
    if let Some((y, _)) = incoming.iter().find(|(_, &n)| n > 1) {
        return Err(TranslateError::NotTree(format!(
            "label {y} has several predecessors"
        )));
    }
    let order: BTreeMap<String, usize> = ls
        .labels()
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();
    let children = |x: &str, kind: Relation| -> Vec<String> {
        let mut kids: Vec<String> = edges
            .iter()
            .filter(|(k, a, _)| *k == kind && *a == x)
            .map(|(_, _, b)| b.to_string())
            .collect();
        kids.sort_by_key(|k| order[k]);
        kids
    };
    fn build(
        x: &str,
        ls: &LabelledSequent,
        children: &dyn Fn(&str, Relation) -> Vec<String>,
        next: &mut Ann,
    ) -> Sequent {
        let mut s = Sequent::empty(*next);
        *next += 1;
        s.ante.extend(
            ls.left
                .iter()
                .filter(|(y, _)| y == x)
                .map(|(_, a)| a.clone()),
        );
        s.succ.extend(
            ls.right
                .iter()
                .filter(|(y, _)| y == x)
                .map(|(_, a)| a.clone()),
        );
        for y in children(x, Relation::Leq) {
            let b = build(&y, ls, children, next);
            s.push_block(BlockKind::Impl, b);
        }
        for y in children(x, Relation::R) {
            let b = build(&y, ls, children, next);
            s.push_block(BlockKind::Modal, b);
        }
        s
    }
    let mut next = 0;
    Ok(build(&root, ls, &children, &mut next))
}

// ---------------------------------------------------------------------------
// Polarised nested sequents

/// A polarised nested sequent: input (left) formulas, output (right) formulas and
/// modal children. `hole` marks the node holding the hole of a context.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polarised {
    pub input: Vec<Formula>,
    pub output: Vec<Formula>,
    pub children: Vec<Polarised>,
    pub hole: bool,
}

impl fmt::Display for Polarised {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.hole {
            parts.push("{}".into());
        }
        parts.extend(self.input.iter().map(|a| format!("+{a}")));
        parts.extend(self.output.iter().map(|a| format!("-{a}")));
        parts.extend(self.children.iter().map(|c| format!("[ {c} ]")));
        f.write_str(&parts.join(", "))
    }
}

impl Polarised {
    pub fn depth(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    fn holes(&self) -> usize {
        usize::from(self.hole) + self.children.iter().map(Polarised::holes).sum::<usize>()
    }

    /// `Σ{Π}`: the filler's formulas join the hole's node, its blocks come first.
    pub fn fill(&self, filler: &Polarised) -> Polarised {
        let mut out = self.clone();
        out.fill_in_place(filler);
        out
    }

    fn fill_in_place(&mut self, filler: &Polarised) -> bool {
        if self.hole {
            self.hole = false;
            self.input.extend(filler.input.iter().cloned());
            self.output.extend(filler.output.iter().cloned());
            let rest = std::mem::take(&mut self.children);
            self.children = filler.children.iter().cloned().chain(rest).collect();
            return true;
        }
        self.children.iter_mut().any(|c| c.fill_in_place(filler))
    }

    /// Reads `+A, -B, [ +C ]`; `+` marks input and `-` output formulas. One `{ .. }`
    /// may appear as the hole, its contents being the filler. Without a hole the
    /// whole sequent is the filler of a hole at the root.
    pub fn parse(text: &str) -> Result<(Polarised, Polarised), ParseError> {
        let mut cur = Cursor::new(text)?;
        let mut filler = None;
        let mut ctx = polarised_seq(&mut cur, &mut filler)?;
        cur.finish()?;
        match filler {
            Some(f) => Ok((ctx, f)),
            None => {
                let ctx_empty = Polarised {
                    hole: true,
                    ..Polarised::default()
                };
                ctx.hole = false;
                Ok((ctx_empty, ctx))
            }
        }
    }
}

fn polarised_seq(
    cur: &mut Cursor,
    filler: &mut Option<Polarised>,
) -> Result<Polarised, ParseError> {
    let mut out = Polarised::default();
    loop {
        match cur.peek() {
            Tok::Plus => {
                cur.bump();
                out.input.push(cur.formula()?);
            }
            Tok::Minus => {
                cur.bump();
                out.output.push(cur.formula()?);
            }
            Tok::LBracket => {
                cur.bump();
                out.children.push(polarised_seq(cur, filler)?);
                cur.expect(&Tok::RBracket)?;
            }
            // `[]` lexes as a box; here it is an empty block.
            Tok::Box => {
                cur.bump();
                out.children.push(Polarised::default());
            }
            Tok::LBrace => {
                let at = cur.pos();
                cur.bump();
                if filler.is_some() || out.hole {
                    return Err(ParseError::new(at, "at most one hole is allowed"));
                }
                let mut none = None;
                let inner = polarised_seq(cur, &mut none)?;
                if none.is_some() {
                    return Err(ParseError::new(at, "holes cannot nest"));
                }
                cur.expect(&Tok::RBrace)?;
                *filler = Some(inner);
                out.hole = true;
            }
            _ => return Ok(out),
        }
        if !cur.eat(&Tok::Comma) {
            return Ok(out);
        }
    }
}

/// The decomposition of `Σ{Π}` around the hole's node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contextualised {
    /// `Σ_a{ }`: everything outside the hole's node and below it.
    pub ancestor: Polarised,
    /// `Π' = fm(Π), Ξ`: the formulas at the hole's node.
    pub node: Polarised,
    /// Blocks of `Π`, then the children sequent `Σ_c`.
    pub children: Vec<Polarised>,
}

pub fn contextualise(ctx: &Polarised, filler: &Polarised) -> Contextualised {
    assert_eq!(ctx.holes(), 1, "a context has exactly one hole");
    let filled = ctx.fill(filler);
    fn split(ctx: &Polarised, filled: &Polarised) -> Option<Contextualised> {
        if ctx.hole {
            return Some(Contextualised {
                ancestor: Polarised {
                    hole: true,
                    ..Polarised::default()
                },
                node: Polarised {
                    input: filled.input.clone(),
                    output: filled.output.clone(),
                    ..Polarised::default()
                },
                children: filled.children.clone(),
            });
        }
        for (i, (c, fc)) in ctx.children.iter().zip(&filled.children).enumerate() {
            if let Some(mut inner) = split(c, fc) {
                let mut anc = filled.clone();
                anc.children[i] = inner.ancestor;
                inner.ancestor = anc;
                return Some(inner);
            }
        }
        None
    }
    split(ctx, &filled).expect("the hole exists")
}

/// `fl(Σ{Π})`, computed through the contextualised variant.
pub fn fl_nested(ctx: &Polarised, filler: &Polarised) -> Sequent {
    let c = contextualise(ctx, filler);
    let mut next = 0;
    let (mut g, hole) = flatten_context(&c.ancestor, &mut next);
    let hole = hole.expect("the ancestor context keeps the hole");
    let mut body = Sequent::empty(0);
    body.ante.extend(c.node.input.iter().cloned());
    body.succ.extend(c.node.output.iter().cloned());
    for child in &c.children {
        body.push_block(BlockKind::Modal, flatten(child, &mut next));
    }
    let path = g.index()[&hole].clone();
    let target = g.get_mut(&path).expect("hole component exists");
    body.ann = target.ann;
    *target = merge(std::mem::replace(target, Sequent::empty(0)), body);
    g
}

fn merge(mut a: Sequent, b: Sequent) -> Sequent {
    a.ante.extend(b.ante);
    a.succ.extend(b.succ);
    for m in b.mblocks {
        a.push_block(BlockKind::Modal, m);
    }
    a
}

/// Flattens a hole-free polarised sequent, numbering components in pre-order.
pub fn flatten(p: &Polarised, next: &mut Ann) -> Sequent {
    flatten_context(p, next).0
}

fn flatten_context(p: &Polarised, next: &mut Ann) -> (Sequent, Option<Ann>) {
    let mut s = Sequent::empty(*next);
    *next += 1;
    let mut hole = p.hole.then_some(s.ann);
    s.ante.extend(p.input.iter().cloned());
    s.succ.extend(p.output.iter().cloned());
    for c in &p.children {
        let (b, h) = flatten_context(c, next);
        hole = hole.or(h);
        s.push_block(BlockKind::Modal, b);
    }
    (s, hole)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn shape(text: &str) -> crate::sequent::Shape {
        Sequent::parse(text).unwrap().shape()
    }

    #[test]
    fn tree_like_labels() {
        let ls = LabelledSequent::parse("|- x:A").unwrap();
        assert_eq!(ls.is_tree_like().as_deref(), Some("x"));
        let ls = LabelledSequent::parse("x<=u; uRz; z:A |- x:A&B").unwrap();
        assert_eq!(ls.is_tree_like().as_deref(), Some("x"));
        let ls = LabelledSequent::parse("xRy; z<=y; x:A |- z:B").unwrap();
        assert_eq!(ls.is_tree_like(), None);
        let ls = LabelledSequent::parse("xRy; x:A |- z:B").unwrap();
        assert_eq!(ls.is_tree_like(), None);
    }

    #[test]
    fn tr_follows_the_inductive_clauses() {
        // The left formula x2:A lands in the antecedent of the deepest block.
        let ls = LabelledSequent::parse("x0<=x1; x1Rx2; x2:A |- x0:A&B").unwrap();
        let s = tr_labelled(&ls).unwrap();
        assert_eq!(s.to_string(), "=>{0} A & B, < =>{1} [ A =>{2} ] >");
        // With x2:A on the right the printed form ⇒₀ A∧B, ⟨⇒₁ [⇒₂ A]⟩ comes out.
        let ls = LabelledSequent::parse("x0<=x1; x1Rx2 |- x0:A&B, x2:A").unwrap();
        let s = tr_labelled(&ls).unwrap();
        assert_eq!(s.shape(), shape("=>{0} A&B, < =>{1} [ =>{2} A ] >"));
        assert_eq!(s.annotations(), vec![0, 1, 2]);
    }

    #[test]
    fn tr_single_and_modal() {
        let s = tr_labelled(&LabelledSequent::parse("|- x:A").unwrap()).unwrap();
        assert_eq!(s.to_string(), "=>{0} A");
        let s = tr_labelled(&LabelledSequent::parse("x R y; x:box A; y:A |-").unwrap()).unwrap();
        assert_eq!(s.to_string(), "box A =>{0} [ A =>{1} ]");
    }

    #[test]
    fn tr_rejects_sharing() {
        let ls = LabelledSequent::parse("x<=y; x<=z; y<=w; z<=w |- x:p").unwrap();
        assert!(matches!(tr_labelled(&ls), Err(TranslateError::NotTree(_))));
        let ls = LabelledSequent::parse("xRy; z<=y; x:A |- z:B").unwrap();
        assert!(matches!(
            tr_labelled(&ls),
            Err(TranslateError::NotTreeLike(_))
        ));
    }

    #[test]
    fn fl_worked_example() {
        let (ctx, filler) =
            Polarised::parse("+A, +B, [ +C, -D ], [ { +H, [ +J ] }, -E, [ -F ] ]").unwrap();
        assert_eq!(filler.to_string(), "+H, [ +J ]");
        let c = contextualise(&ctx, &filler);
        assert_eq!(c.ancestor.to_string(), "+A, +B, [ +C, -D ], [ {} ]");
        assert_eq!(c.node.to_string(), "+H, -E");
        assert_eq!(c.children.len(), 2);
        let s = fl_nested(&ctx, &filler);
        assert_eq!(
            s.shape(),
            shape("A, B => [C => D], [H => E, [J =>], [=> F]]")
        );
        assert!(s.components().iter().all(|(_, t)| t.iblocks.is_empty()));
    }

    #[test]
    fn fl_depth_zero() {
        let (ctx, filler) = Polarised::parse("+A, -B").unwrap();
        assert_eq!(fl_nested(&ctx, &filler).to_string(), "A =>{0} B");
    }

    // Independent node-by-node reading of the filled tree.
    fn naive(p: &Polarised) -> crate::sequent::Shape {
        crate::sequent::Shape {
            ante: p.input.iter().cloned().collect(),
            succ: p.output.iter().cloned().collect(),
            iblocks: BTreeSet::new(),
            mblocks: p.children.iter().map(naive).collect(),
        }
    }

    proptest::proptest! {
        #[test]
        fn fl_matches_naive_flattening(
            a in crate::formula::arb::formula(2),
            b in crate::formula::arb::formula(2),
            path in proptest::collection::vec(0usize..2, 0..3),
        ) {
            // A small tree of depth three with the hole placed along `path`.
            let leaf = |f: &Formula| Polarised { output: vec![f.clone()], ..Polarised::default() };
            let mut ctx = Polarised {
                input: vec![a.clone()],
                children: vec![leaf(&b), Polarised {
                    input: vec![b.clone()],
                    children: vec![leaf(&a), leaf(&b)],
                    ..Polarised::default()
                }],
                ..Polarised::default()
            };
            let mut node = &mut ctx;
            for &i in &path {
                if node.children.is_empty() { break; }
                let k = i.min(node.children.len() - 1);
                node = &mut node.children[k];
            }
            node.hole = true;
            let filler = Polarised { input: vec![b.clone()], output: vec![a.clone()], children: vec![leaf(&a)], hole: false };
            let s = fl_nested(&ctx, &filler);
            proptest::prop_assert_eq!(s.shape(), naive(&ctx.fill(&filler)));
            proptest::prop_assert!(s.annotations_unique());
        }
    }

    #[test]
    fn polarised_errors() {
        assert!(Polarised::parse("{ +A }, [ {} ]").is_err());
        assert!(Polarised::parse("+A, [").is_err());
        assert!(parse("p").is_ok());
    }
}
