//! Annotated, set-based bi-nested sequents.
//!
//! A sequent `Γ =>{n} Δ` has a formula-set antecedent and a succedent made of
//! formulas, implication blocks `<S>` and modal blocks `[S]`. Every component
//! carries an annotation that is unique inside the enclosing top-level sequent.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::formula::{Cursor, Formula, ParseError, Tok};

pub type Ann = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    /// `<...>`: an implication block.
    Impl,
    /// `[...]`: a modal block.
    Modal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub ann: Ann,
    pub ante: BTreeSet<Formula>,
    pub succ: BTreeSet<Formula>,
    /// Kept sorted by annotation.
    pub iblocks: Vec<Sequent>,
    /// Kept sorted by annotation.
    pub mblocks: Vec<Sequent>,
}

/// Route from the root to a component, one `(kind, annotation)` step per block.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<(BlockKind, Ann)>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, kind: BlockKind, ann: Ann) -> Path {
        let mut steps = self.0.clone();
        steps.push((kind, ann));
        Path(steps)
    }

    pub fn parent(&self) -> Option<Path> {
        if self.0.is_empty() {
            None
        } else {
            Some(Path(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<(BlockKind, Ann)> {
        self.0.last().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if `self` is a proper prefix of `other`.
    pub fn is_strict_prefix_of(&self, other: &Path) -> bool {
        self.0.len() < other.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(".");
        }
        for (kind, ann) in &self.0 {
            match kind {
                BlockKind::Impl => write!(f, "<{ann}>")?,
                BlockKind::Modal => write!(f, "[{ann}]")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Path {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "." || s.is_empty() {
            return Ok(Path::root());
        }
        let mut steps = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let (kind, close) = match bytes[i] {
                b'<' => (BlockKind::Impl, '>'),
                b'[' => (BlockKind::Modal, ']'),
                _ => return Err(ParseError::new(i, "expected `<` or `[` in path")),
            };
            let end = s[i..]
                .find(close)
                .ok_or_else(|| ParseError::new(i, "unterminated path step"))?;
            let ann = s[i + 1..i + end]
                .parse::<Ann>()
                .map_err(|_| ParseError::new(i + 1, "path step must be an annotation"))?;
            steps.push((kind, ann));
            i += end + 1;
        }
        Ok(Path(steps))
    }
}

impl Serialize for Path {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Path {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Annotation-free, set-based image of a sequent, used for content comparison.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    pub ante: BTreeSet<Formula>,
    pub succ: BTreeSet<Formula>,
    pub iblocks: BTreeSet<Shape>,
    pub mblocks: BTreeSet<Shape>,
}

fn insert_sorted(blocks: &mut Vec<Sequent>, s: Sequent) {
    let at = blocks.partition_point(|b| b.ann < s.ann);
    blocks.insert(at, s);
}

impl Sequent {
    pub fn empty(ann: Ann) -> Sequent {
        Sequent {
            ann,
            ante: BTreeSet::new(),
            succ: BTreeSet::new(),
            iblocks: Vec::new(),
            mblocks: Vec::new(),
        }
    }

    /// `=>{0} f`, the start of a proof search.
    pub fn goal(f: Formula) -> Sequent {
        let mut s = Sequent::empty(0);
        s.succ.insert(f);
        s
    }

    pub fn with_ante(mut self, fs: impl IntoIterator<Item = Formula>) -> Self {
        self.ante.extend(fs);
        self
    }

    pub fn with_succ(mut self, fs: impl IntoIterator<Item = Formula>) -> Self {
        self.succ.extend(fs);
        self
    }

    pub fn with_iblock(mut self, s: Sequent) -> Self {
        self.push_block(BlockKind::Impl, s);
        self
    }

    pub fn with_mblock(mut self, s: Sequent) -> Self {
        self.push_block(BlockKind::Modal, s);
        self
    }

    pub fn push_block(&mut self, kind: BlockKind, s: Sequent) {
        match kind {
            BlockKind::Impl => insert_sorted(&mut self.iblocks, s),
            BlockKind::Modal => insert_sorted(&mut self.mblocks, s),
        }
    }

    pub fn blocks(&self, kind: BlockKind) -> &[Sequent] {
        match kind {
            BlockKind::Impl => &self.iblocks,
            BlockKind::Modal => &self.mblocks,
        }
    }

    pub fn block(&self, kind: BlockKind, ann: Ann) -> Option<&Sequent> {
        let blocks = self.blocks(kind);
        blocks
            .binary_search_by_key(&ann, |b| b.ann)
            .ok()
            .map(|i| &blocks[i])
    }

    fn block_mut(&mut self, kind: BlockKind, ann: Ann) -> Option<&mut Sequent> {
        let blocks = match kind {
            BlockKind::Impl => &mut self.iblocks,
            BlockKind::Modal => &mut self.mblocks,
        };
        match blocks.binary_search_by_key(&ann, |b| b.ann) {
            Ok(i) => Some(&mut blocks[i]),
            Err(_) => None,
        }
    }

    pub fn get(&self, path: &Path) -> Option<&Sequent> {
        let mut cur = self;
        for &(kind, ann) in &path.0 {
            cur = cur.block(kind, ann)?;
        }
        Some(cur)
    }

    pub fn get_mut(&mut self, path: &Path) -> Option<&mut Sequent> {
        let mut cur = self;
        for &(kind, ann) in &path.0 {
            cur = cur.block_mut(kind, ann)?;
        }
        Some(cur)
    }

    /// All components `T ∈⁺ self` in pre-order; implication blocks before modal blocks.
    pub fn components(&self) -> Vec<(Path, &Sequent)> {
        let mut out = Vec::new();
        self.collect_components(Path::root(), &mut out);
        out
    }

    fn collect_components<'a>(&'a self, here: Path, out: &mut Vec<(Path, &'a Sequent)>) {
        out.push((here.clone(), self));
        for b in &self.iblocks {
            b.collect_components(here.child(BlockKind::Impl, b.ann), out);
        }
        for b in &self.mblocks {
            b.collect_components(here.child(BlockKind::Modal, b.ann), out);
        }
    }

    pub fn component_paths(&self) -> Vec<Path> {
        self.components().into_iter().map(|(p, _)| p).collect()
    }

    pub fn path_of(&self, ann: Ann) -> Option<Path> {
        self.components()
            .into_iter()
            .find(|(_, s)| s.ann == ann)
            .map(|(p, _)| p)
    }

    /// Annotation → path for every component.
    pub fn index(&self) -> BTreeMap<Ann, Path> {
        self.components()
            .into_iter()
            .map(|(p, s)| (s.ann, p))
            .collect()
    }

    pub fn annotations(&self) -> Vec<Ann> {
        self.components().into_iter().map(|(_, s)| s.ann).collect()
    }

    pub fn max_ann(&self) -> Ann {
        self.annotations().into_iter().max().unwrap_or(0)
    }

    pub fn annotations_unique(&self) -> bool {
        let anns = self.annotations();
        let set: BTreeSet<Ann> = anns.iter().copied().collect();
        set.len() == anns.len()
    }

    pub fn num_components(&self) -> usize {
        1 + self
            .iblocks
            .iter()
            .map(Sequent::num_components)
            .sum::<usize>()
            + self
                .mblocks
                .iter()
                .map(Sequent::num_components)
                .sum::<usize>()
    }

    pub fn has_blocks(&self) -> bool {
        !self.iblocks.is_empty() || !self.mblocks.is_empty()
    }

    /// `Λ ⇒ Θ*`: the antecedent together with the local positive part of the succedent.
    ///
    /// Formulas and implication blocks of the succedent are dropped; modal blocks are
    /// kept and treated recursively.
    pub fn local_positive(&self) -> Sequent {
        Sequent {
            ann: self.ann,
            ante: self.ante.clone(),
            succ: BTreeSet::new(),
            iblocks: Vec::new(),
            mblocks: self.mblocks.iter().map(Sequent::local_positive).collect(),
        }
    }

    /// `Γ ⇒ Δ♯`: implication blocks removed at every depth.
    pub fn sharp(&self) -> Sequent {
        Sequent {
            ann: self.ann,
            ante: self.ante.clone(),
            succ: self.succ.clone(),
            iblocks: Vec::new(),
            mblocks: self.mblocks.iter().map(Sequent::sharp).collect(),
        }
    }

    pub fn shape(&self) -> Shape {
        Shape {
            ante: self.ante.clone(),
            succ: self.succ.clone(),
            iblocks: self.iblocks.iter().map(Sequent::shape).collect(),
            mblocks: self.mblocks.iter().map(Sequent::shape).collect(),
        }
    }

    /// Content equality, ignoring annotations and duplicate blocks.
    pub fn same_content(&self, other: &Sequent) -> bool {
        self.shape() == other.shape()
    }

    /// `md(S)`: modal blocks count one level, implication blocks none.
    pub fn modal_depth(&self) -> usize {
        let fmls = self
            .ante
            .iter()
            .chain(self.succ.iter())
            .map(Formula::modal_depth)
            .max()
            .unwrap_or(0);
        let ib = self
            .iblocks
            .iter()
            .map(Sequent::modal_depth)
            .max()
            .unwrap_or(0);
        let mb = self
            .mblocks
            .iter()
            .map(|b| b.modal_depth() + 1)
            .max()
            .unwrap_or(0);
        fmls.max(ib).max(mb)
    }

    /// A copy whose components are renumbered from `*next` upwards in pre-order,
    /// together with the `(original, copy)` annotation pairs.
    pub fn renumbered(&self, next: &mut Ann) -> (Sequent, Vec<(Ann, Ann)>) {
        let mut pairs = Vec::new();
        let copy = self.renumber_into(next, &mut pairs);
        (copy, pairs)
    }

    fn renumber_into(&self, next: &mut Ann, pairs: &mut Vec<(Ann, Ann)>) -> Sequent {
        let ann = *next;
        *next += 1;
        pairs.push((self.ann, ann));
        let iblocks = self
            .iblocks
            .iter()
            .map(|b| b.renumber_into(next, pairs))
            .collect();
        let mblocks = self
            .mblocks
            .iter()
            .map(|b| b.renumber_into(next, pairs))
            .collect();
        Sequent {
            ann,
            ante: self.ante.clone(),
            succ: self.succ.clone(),
            iblocks,
            mblocks,
        }
    }

    /// `T°`: a copy whose annotations all lie above every annotation in `used`.
    pub fn fresh_copy(&self, used: &BTreeSet<Ann>) -> (Sequent, Vec<(Ann, Ann)>) {
        let mut next = used.iter().next_back().map_or(0, |m| m + 1);
        self.renumbered(&mut next)
    }

    /// Renders without annotations, e.g. `A, B => [C => D]`.
    pub fn plain(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, false);
        out
    }

    fn write(&self, out: &mut String, annotated: bool) {
        let ante: Vec<String> = self.ante.iter().map(Formula::to_string).collect();
        out.push_str(&ante.join(", "));
        if !ante.is_empty() {
            out.push(' ');
        }
        out.push_str("=>");
        if annotated {
            out.push_str(&format!("{{{}}}", self.ann));
        }
        let mut first = true;
        let mut sep = |out: &mut String| {
            out.push_str(if first { " " } else { ", " });
            first = false;
        };
        for f in &self.succ {
            sep(out);
            out.push_str(&f.to_string());
        }
        for b in &self.iblocks {
            sep(out);
            out.push_str("< ");
            b.write(out, annotated);
            out.push_str(" >");
        }
        for b in &self.mblocks {
            sep(out);
            out.push_str("[ ");
            b.write(out, annotated);
            out.push_str(" ]");
        }
    }

    /// Parses the textual format `G , A => D , <S> , [T]` with optional `=>{n}`
    /// annotations. Missing annotations are filled in with fresh numbers.
    pub fn parse(text: &str) -> Result<Sequent, ParseError> {
        let mut cur = Cursor::new(text)?;
        let raw = read_sequent(&mut cur)?;
        cur.finish()?;
        raw.resolve()
    }
}

/// `S₁ ⊆^S S₂`: antecedent inclusion plus existential matching of modal children.
pub fn structurally_included(s1: &Sequent, s2: &Sequent) -> bool {
    s1.ante.is_subset(&s2.ante)
        && s1
            .mblocks
            .iter()
            .all(|t1| s2.mblocks.iter().any(|t2| structurally_included(t1, t2)))
}

/// `S₁ ≃ S₂`.
pub fn sharp_equivalent(s1: &Sequent, s2: &Sequent) -> bool {
    s1.ante == s2.ante && s1.sharp().shape() == s2.sharp().shape()
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write(&mut out, true);
        f.write_str(&out)
    }
}

impl FromStr for Sequent {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Sequent::parse(s)
    }
}

impl Serialize for Sequent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Sequent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct RawSequent {
    pos: usize,
    ann: Option<Ann>,
    ante: BTreeSet<Formula>,
    succ: BTreeSet<Formula>,
    blocks: Vec<(BlockKind, RawSequent)>,
}

fn read_sequent(cur: &mut Cursor) -> Result<RawSequent, ParseError> {
    let pos = cur.pos();
    let mut ante = BTreeSet::new();
    if cur.at_formula_start() {
        ante.insert(cur.formula()?);
        while cur.eat(&Tok::Comma) {
            ante.insert(cur.formula()?);
        }
    }
    let ann = match cur.bump() {
        Tok::Arrow(a) => a,
        _ => return Err(ParseError::new(cur.pos(), "expected `=>`")),
    };
    let mut succ = BTreeSet::new();
    let mut blocks = Vec::new();
    let mut expect_item = false;
    loop {
        match cur.peek() {
            Tok::LAngle | Tok::LBracket => {
                let (kind, close) = if cur.peek() == &Tok::LAngle {
                    (BlockKind::Impl, Tok::RAngle)
                } else {
                    (BlockKind::Modal, Tok::RBracket)
                };
                cur.bump();
                let inner = read_sequent(cur)?;
                cur.expect(&close)?;
                blocks.push((kind, inner));
            }
            _ if cur.at_formula_start() => {
                succ.insert(cur.formula()?);
            }
            _ if expect_item => return Err(cur.unexpected("expected a formula or a block")),
            _ => break,
        }
        expect_item = cur.eat(&Tok::Comma);
        if !expect_item {
            break;
        }
    }
    Ok(RawSequent {
        pos,
        ann,
        ante,
        succ,
        blocks,
    })
}

impl RawSequent {
    fn resolve(self) -> Result<Sequent, ParseError> {
        let mut given = BTreeMap::new();
        self.collect_given(&mut given)?;
        let mut next = given.keys().next_back().map_or(0, |m| m + 1);
        Ok(self.build(&mut next))
    }

    fn collect_given(&self, seen: &mut BTreeMap<Ann, usize>) -> Result<(), ParseError> {
        if let Some(a) = self.ann {
            if seen.insert(a, self.pos).is_some() {
                return Err(ParseError::new(
                    self.pos,
                    format!("annotation {a} used twice"),
                ));
            }
        }
        for (_, b) in &self.blocks {
            b.collect_given(seen)?;
        }
        Ok(())
    }

    fn build(self, next: &mut Ann) -> Sequent {
        let ann = self.ann.unwrap_or_else(|| {
            let a = *next;
            *next += 1;
            a
        });
        let mut s = Sequent {
            ann,
            ante: self.ante,
            succ: self.succ,
            iblocks: Vec::new(),
            mblocks: Vec::new(),
        };
        for (kind, b) in self.blocks {
            let child = b.build(next);
            s.push_block(kind, child);
        }
        s
    }
}

/// `𝒜; S`: a sequent together with its reliance pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnrichedSequent {
    pub rel: BTreeSet<(Ann, Ann)>,
    pub root: Sequent,
}

impl EnrichedSequent {
    pub fn new(root: Sequent) -> Self {
        EnrichedSequent {
            rel: BTreeSet::new(),
            root,
        }
    }

    pub fn goal(f: Formula) -> Self {
        EnrichedSequent::new(Sequent::goal(f))
    }

    /// Parses `(3,6), (4,7); S` or a bare sequent.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        match text.find(';') {
            None => Ok(EnrichedSequent::new(Sequent::parse(text)?)),
            Some(cut) => {
                let mut rel = BTreeSet::new();
                let head = &text[..cut];
                let mut rest = head.trim_start();
                while !rest.trim().is_empty() {
                    let offset = head.len() - rest.len();
                    let close = rest
                        .find(')')
                        .filter(|_| rest.starts_with('('))
                        .ok_or_else(|| ParseError::new(offset, "expected `(a, b)`"))?;
                    let inner = &rest[1..close];
                    let mut parts = inner.split(',').map(str::trim);
                    let a = parts.next().and_then(|x| x.parse().ok());
                    let b = parts.next().and_then(|x| x.parse().ok());
                    match (a, b, parts.next()) {
                        (Some(a), Some(b), None) => {
                            rel.insert((a, b));
                        }
                        _ => return Err(ParseError::new(offset, "expected `(a, b)`")),
                    }
                    rest = rest[close + 1..]
                        .trim_start()
                        .trim_start_matches(',')
                        .trim_start();
                }
                let root = Sequent::parse(&text[cut + 1..]).map_err(|e| ParseError {
                    pos: e.pos + cut + 1,
                    message: e.message,
                })?;
                Ok(EnrichedSequent { rel, root })
            }
        }
    }
}

impl fmt::Display for EnrichedSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.rel.is_empty() {
            let pairs: Vec<String> = self
                .rel
                .iter()
                .map(|(a, b)| format!("({a}, {b})"))
                .collect();
            write!(f, "{}; ", pairs.join(", "))?;
        }
        write!(f, "{}", self.root)
    }
}

impl Serialize for EnrichedSequent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EnrichedSequent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        EnrichedSequent::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod arb {
    use super::*;
    use crate::formula::arb::formula;
    use proptest::prelude::*;

    fn fset() -> impl Strategy<Value = BTreeSet<Formula>> {
        prop::collection::btree_set(formula(1), 0..3)
    }

    /// Small sequents with unique annotations.
    pub fn sequent() -> impl Strategy<Value = Sequent> {
        let leaf = (fset(), fset()).prop_map(|(a, s)| Sequent::empty(0).with_ante(a).with_succ(s));
        let tree = leaf.prop_recursive(3, 12, 3, |inner| {
            (
                fset(),
                fset(),
                prop::collection::vec(inner.clone(), 0..2),
                prop::collection::vec(inner, 0..3),
            )
                .prop_map(|(a, s, ib, mb)| {
                    let mut out = Sequent::empty(0).with_ante(a).with_succ(s);
                    out.iblocks = ib;
                    out.mblocks = mb;
                    out
                })
        });
        tree.prop_map(|s| s.renumbered(&mut 0).0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse as f;
    use proptest::prelude::*;

    fn s(text: &str) -> Sequent {
        Sequent::parse(text).unwrap()
    }

    // Independent reference for Δ*: works on shapes rather than sequents.
    fn positive_ref(sh: &Shape) -> BTreeSet<Shape> {
        sh.mblocks
            .iter()
            .map(|b| Shape {
                ante: b.ante.clone(),
                succ: BTreeSet::new(),
                iblocks: BTreeSet::new(),
                mblocks: positive_ref(b),
            })
            .collect()
    }

    fn md_ref(s: &Sequent) -> usize {
        let mut best = 0;
        for x in s.ante.iter().chain(&s.succ) {
            best = best.max(x.modal_depth());
        }
        for b in &s.iblocks {
            best = best.max(md_ref(b));
        }
        for b in &s.mblocks {
            best = best.max(1 + md_ref(b));
        }
        best
    }

    #[test]
    fn parse_and_print() {
        let t = s("p =>{4} false");
        assert_eq!(t.ann, 4);
        assert_eq!(t.to_string(), "p =>{4} false");
        let t = s("=>{0} A & B, < =>{1} [ =>{2} A ] >");
        assert_eq!(t.to_string(), "=>{0} A & B, < =>{1} [ =>{2} A ] >");
        assert_eq!(t.plain(), "=> A & B, < => [ => A ] >");
    }

    #[test]
    fn missing_annotations_are_filled() {
        let t = s("p => <q => r>, [=>{1} s]");
        assert!(t.annotations_unique());
        assert_eq!(t.num_components(), 3);
        assert_eq!(t.mblocks[0].ann, 1);
    }

    #[test]
    fn rejects_malformed() {
        assert!(Sequent::parse("p => <q => r").is_err());
        assert!(Sequent::parse("p q => r").is_err());
        assert!(Sequent::parse("=>{1} [=>{1} p]").is_err());
        assert!(Sequent::parse("p, => q").is_err());
    }

    #[test]
    fn components_in_preorder() {
        assert_eq!(s("=>{0}").components().len(), 1);
        let t = s("p =>{1} <q =>{2} r>");
        let comps = t.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1].1.ann, 2);
        assert_eq!(comps[1].0, Path(vec![(BlockKind::Impl, 2)]));

        let s1 = s("p, q => r, [s & r => p, [p | q => s, <s => t>]]");
        let comps = s1.components();
        assert_eq!(comps.len(), 4);
        let inner = &comps[3];
        assert_eq!(inner.1.ante, BTreeSet::from([f("s").unwrap()]));
        // Reached through modal steps, then one implication step.
        assert_eq!(inner.0.last().unwrap().0, BlockKind::Impl);
    }

    #[test]
    fn path_round_trip() {
        let p = Path(vec![(BlockKind::Impl, 3), (BlockKind::Modal, 7)]);
        assert_eq!(p.to_string(), "<3>[7]");
        assert_eq!("<3>[7]".parse::<Path>().unwrap(), p);
        assert_eq!(".".parse::<Path>().unwrap(), Path::root());
    }

    #[test]
    fn local_positive_examples() {
        let t = s("=> a, <b => c>");
        assert!(t.local_positive().mblocks.is_empty());
        let t = s("=> a, [l => m]");
        assert_eq!(t.local_positive().mblocks[0].plain(), "l =>");
        let t = s("=> [l1 => q, [l2 => m]]");
        assert_eq!(t.local_positive().plain(), "=> [ l1 => [ l2 => ] ]");
        assert_eq!(t.local_positive().shape().mblocks, positive_ref(&t.shape()));
    }

    #[test]
    fn sharp_examples() {
        let s1 = s("a => b, <c => d, [e => f]>, [g => h]");
        let s2 = s("a => b, [g => h, <c => d>], <e => f>");
        assert_eq!(s1.sharp().plain(), "a => b, [ g => h ]");
        assert_eq!(s2.sharp().plain(), "a => b, [ g => h ]");
        assert!(sharp_equivalent(&s1, &s2));
        assert!(!sharp_equivalent(&s("p => q"), &s("p => r")));
        let flat = s("a => b, [c => d]");
        assert_eq!(flat.sharp(), flat);
    }

    #[test]
    fn structural_inclusion_examples() {
        let s1 = s("p, q => r, [s & r => p, [p | q => s, <s => t>]]");
        let s2 = s("p, q, r -> s => s, [s & r => [p | q => t]]");
        let s3 = s("p, q => r, <s & r => [p | q => s, [s => t]]>");
        assert!(structurally_included(&s1, &s2));
        assert!(!structurally_included(&s1, &s3));
        assert!(structurally_included(&s1, &s1));
    }

    #[test]
    fn inclusion_is_existential_not_injective() {
        let a = s("=> [p =>], [p =>]");
        let b = s("=> [p, q =>]");
        assert!(structurally_included(&a, &b));
        assert!(!structurally_included(&b, &a));
    }

    #[test]
    fn fresh_copy_examples() {
        let de = s("D =>{5} E");
        let (copy, pairs) = de.fresh_copy(&BTreeSet::from([3, 5]));
        assert_eq!(copy.ann, 6);
        assert_eq!(pairs, vec![(5, 6)]);

        let t = s("=>{1} <=>{2}>, [=>{3}]");
        let mut used: BTreeSet<Ann> = t.annotations().into_iter().collect();
        let (c1, p1) = t.fresh_copy(&used);
        assert_eq!(p1.len(), 3);
        used.extend(c1.annotations());
        let (c2, _) = t.fresh_copy(&used);
        let a1: BTreeSet<Ann> = c1.annotations().into_iter().collect();
        let a2: BTreeSet<Ann> = c2.annotations().into_iter().collect();
        assert!(a1.is_disjoint(&a2));
        assert!(c1.same_content(&t));
    }

    #[test]
    fn sequent_modal_depth_examples() {
        assert_eq!(s("=> p").modal_depth(), 0);
        assert_eq!(s("=> [=> p]").modal_depth(), 1);
        let t = s("=> <=> [=> p]>");
        assert_eq!(t.modal_depth(), 1);
        assert_eq!(md_ref(&t), 1);
    }

    #[test]
    fn enriched_round_trip() {
        let e = EnrichedSequent::parse("(3, 6), (4, 7); []r =>{1} q").unwrap();
        assert_eq!(e.rel, BTreeSet::from([(3, 6), (4, 7)]));
        assert_eq!(e.to_string(), "(3, 6), (4, 7); box r =>{1} q");
        assert_eq!(EnrichedSequent::parse(&e.to_string()).unwrap(), e);
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(t in arb::sequent()) {
            prop_assert_eq!(Sequent::parse(&t.to_string()).unwrap(), t);
        }

        #[test]
        fn sharp_equivalence_is_an_equivalence(a in arb::sequent(), b in arb::sequent(), c in arb::sequent()) {
            prop_assert!(sharp_equivalent(&a, &a));
            prop_assert_eq!(sharp_equivalent(&a, &b), sharp_equivalent(&b, &a));
            if sharp_equivalent(&a, &b) && sharp_equivalent(&b, &c) {
                prop_assert!(sharp_equivalent(&a, &c));
            }
            // Anything equals its own ♯-image up to ≃.
            prop_assert!(sharp_equivalent(&a, &a.sharp()));
        }

        #[test]
        fn inclusion_preorder_on_components(t in arb::sequent()) {
            let comps: Vec<&Sequent> = t.components().into_iter().map(|(_, c)| c).collect();
            for x in &comps {
                prop_assert!(structurally_included(x, x));
                for y in &comps {
                    for z in &comps {
                        if structurally_included(x, y) && structurally_included(y, z) {
                            prop_assert!(structurally_included(x, z));
                        }
                    }
                }
            }
        }

        #[test]
        fn measures_are_idempotent(t in arb::sequent()) {
            prop_assert_eq!(t.sharp().sharp(), t.sharp());
            prop_assert_eq!(t.local_positive().local_positive(), t.local_positive());
            prop_assert_eq!(t.local_positive().shape().mblocks, positive_ref(&t.shape()));
            prop_assert_eq!(t.modal_depth(), md_ref(&t));
        }

        #[test]
        fn copies_are_fresh(t in arb::sequent()) {
            let used: BTreeSet<Ann> = t.annotations().into_iter().collect();
            let (c, pairs) = t.fresh_copy(&used);
            prop_assert!(c.annotations_unique());
            prop_assert_eq!(pairs.len(), t.num_components());
            prop_assert!(c.annotations().iter().all(|a| !used.contains(a)));
            prop_assert!(c.same_content(&t));
        }
    }
}
