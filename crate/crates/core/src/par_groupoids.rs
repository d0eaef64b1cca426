//! Parenthesized (labelled) permutations and the morphism calculus of the
//! parenthesized braid (m)operads: generator words, endpoints, moperadic
//! compositions, the Γ-action and equality through braid evaluation.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde_json::{json, Value};

use crate::braid_engine::{self, block_cross, full_twist, AnnularBraidWord, BraidWord};
use crate::graded_lie::{GammaVector, Strand};
use crate::Error;

/// Full binary tree whose leaves are strand names, optionally labelled in `Z/N`.
/// Strand 0 is the frozen strand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ParObject {
    Leaf(Strand, Option<u32>),
    Pair(Box<ParObject>, Box<ParObject>),
}

impl ParObject {
    pub fn leaf(name: Strand) -> Self {
        ParObject::Leaf(name, None)
    }

    pub fn labelled(name: Strand, label: u32) -> Self {
        ParObject::Leaf(name, Some(label))
    }

    pub fn pair(a: ParObject, b: ParObject) -> Self {
        ParObject::Pair(Box::new(a), Box::new(b))
    }

    /// Parses `((0 1_1) 2_0)`; the outer parentheses of a pair may be omitted.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let toks = tokenize(text)?;
        let mut pos = 0;
        let items = parse_items(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::Parse(format!("unbalanced parentheses in {text:?}")));
        }
        let obj = match items.len() {
            1 => items.into_iter().next().unwrap(),
            2 => {
                let mut it = items.into_iter();
                ParObject::pair(it.next().unwrap(), it.next().unwrap())
            }
            k => return Err(Error::Parse(format!("expected a binary tree, found {k} top-level items in {text:?}"))),
        };
        obj.validate()?;
        Ok(obj)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let names = self.leaves();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::Invalid(format!("repeated leaf in {self}")));
        }
        let labelled = self.leaf_data().iter().filter(|(n, l)| *n != 0 && l.is_some()).count();
        if labelled != 0 && labelled != names.iter().filter(|n| **n != 0).count() {
            return Err(Error::Invalid(format!("partially labelled object {self}")));
        }
        if let Some((_, Some(_))) = self.leaf_data().iter().find(|(n, _)| *n == 0) {
            return Err(Error::Invalid("the frozen strand carries no label".into()));
        }
        Ok(())
    }

    /// In-order leaf names.
    pub fn leaves(&self) -> Vec<Strand> {
        self.leaf_data().into_iter().map(|(n, _)| n).collect()
    }

    pub fn leaf_data(&self) -> Vec<(Strand, Option<u32>)> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<(Strand, Option<u32>)>) {
        match self {
            ParObject::Leaf(n, l) => out.push((*n, *l)),
            ParObject::Pair(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            ParObject::Leaf(..) => 1,
            ParObject::Pair(a, b) => a.size() + b.size(),
        }
    }

    pub fn contains(&self, name: Strand) -> bool {
        self.leaves().contains(&name)
    }

    pub fn has_frozen(&self) -> bool {
        self.contains(0)
    }

    pub fn is_labelled(&self) -> bool {
        self.leaf_data().iter().any(|(_, l)| l.is_some())
    }

    pub fn labels(&self) -> BTreeMap<Strand, u32> {
        self.leaf_data().into_iter().filter_map(|(n, l)| l.map(|l| (n, l))).collect()
    }

    pub fn label_of(&self, name: Strand) -> Option<u32> {
        self.leaf_data().into_iter().find(|(n, _)| *n == name).and_then(|(_, l)| l)
    }

    /// Same tree with labels forgotten.
    pub fn unlabelled(&self) -> ParObject {
        self.map_leaves(&mut |n, _| ParObject::Leaf(n, None))
    }

    pub fn map_leaves(&self, f: &mut impl FnMut(Strand, Option<u32>) -> ParObject) -> ParObject {
        match self {
            ParObject::Leaf(n, l) => f(*n, *l),
            ParObject::Pair(a, b) => ParObject::pair(a.map_leaves(f), b.map_leaves(f)),
        }
    }

    /// Adds `gv` to the labels (unlabelled leaves stay unlabelled).
    pub fn shift_labels(&self, gv: &GammaVector) -> ParObject {
        self.map_leaves(&mut |n, l| ParObject::Leaf(n, l.map(|l| (l + gv.get(n)) % gv.modulus)))
    }

    /// Offset of the subtree equal to `pattern`, searching in-order.
    pub(crate) fn find(&self, pattern: &ParObject) -> Option<usize> {
        if self == pattern {
            return Some(0);
        }
        match self {
            ParObject::Leaf(..) => None,
            ParObject::Pair(a, b) => a.find(pattern).or_else(|| b.find(pattern).map(|o| o + a.size())),
        }
    }

    pub(crate) fn replace(&self, pattern: &ParObject, with: &ParObject) -> Option<ParObject> {
        if self == pattern {
            return Some(with.clone());
        }
        match self {
            ParObject::Leaf(..) => None,
            ParObject::Pair(a, b) => {
                if let Some(a2) = a.replace(pattern, with) {
                    Some(ParObject::Pair(Box::new(a2), b.clone()))
                } else {
                    b.replace(pattern, with).map(|b2| ParObject::Pair(a.clone(), Box::new(b2)))
                }
            }
        }
    }

    /// Removes a leaf; `None` when nothing remains.
    pub fn delete(&self, name: Strand) -> Option<ParObject> {
        match self {
            ParObject::Leaf(n, _) if *n == name => None,
            ParObject::Leaf(..) => Some(self.clone()),
            ParObject::Pair(a, b) => match (a.delete(name), b.delete(name)) {
                (Some(a), Some(b)) => Some(ParObject::pair(a, b)),
                (Some(x), None) | (None, Some(x)) => Some(x),
                (None, None) => None,
            },
        }
    }

    pub fn rename(&self, f: &impl Fn(Strand) -> Strand) -> ParObject {
        self.map_leaves(&mut |n, l| ParObject::Leaf(f(n), l))
    }
}

impl fmt::Display for ParObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParObject::Leaf(n, None) => write!(f, "{n}"),
            ParObject::Leaf(n, Some(l)) => write!(f, "{n}_{l}"),
            ParObject::Pair(a, b) => write!(f, "({a} {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Leaf(Strand, Option<u32>),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, Error> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let number = |i: &mut usize| -> Result<u32, Error> {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        chars[start..*i]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| Error::Parse(format!("expected a number at offset {start} in {text:?}")))
    };
    while i < chars.len() {
        match chars[i] {
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            c if c.is_ascii_digit() => {
                let name = number(&mut i)?;
                let label = if i < chars.len() && chars[i] == '_' {
                    i += 1;
                    Some(number(&mut i)?)
                } else {
                    None
                };
                out.push(Tok::Leaf(name, label));
            }
            c => return Err(Error::Parse(format!("unexpected {c:?} in {text:?}"))),
        }
    }
    Ok(out)
}

fn parse_items(toks: &[Tok], pos: &mut usize) -> Result<Vec<ParObject>, Error> {
    let mut items = Vec::new();
    while *pos < toks.len() {
        match &toks[*pos] {
            Tok::Leaf(n, l) => {
                items.push(ParObject::Leaf(*n, *l));
                *pos += 1;
            }
            Tok::Open => {
                *pos += 1;
                let inner = parse_items(toks, pos)?;
                if toks.get(*pos) != Some(&Tok::Close) {
                    return Err(Error::Parse("missing ')'".into()));
                }
                *pos += 1;
                match inner.len() {
                    1 => items.push(inner.into_iter().next().unwrap()),
                    2 => {
                        let mut it = inner.into_iter();
                        items.push(ParObject::pair(it.next().unwrap(), it.next().unwrap()));
                    }
                    k => return Err(Error::Parse(format!("parenthesized group of {k} items"))),
                }
            }
            Tok::Close => break,
        }
    }
    Ok(items)
}

/// `outer ∘_i inner` for an unlabelled inner object on strands `1..=m`; the
/// label of `i` is broadcast onto the inserted leaves.
pub fn obj_compose_i(outer: &ParObject, i: Strand, inner: &ParObject) -> Result<ParObject, Error> {
    if !outer.contains(i) || i == 0 {
        return Err(Error::Invalid(format!("{outer} has no non-frozen strand {i}")));
    }
    if inner.has_frozen() || inner.is_labelled() {
        return Err(Error::Invalid(format!("inserted object {inner} must be an unlabelled parenthesized permutation")));
    }
    let m = inner.size() as Strand;
    Ok(outer.map_leaves(&mut |n, l| {
        if n == i {
            inner.map_leaves(&mut |k, _| ParObject::Leaf(k + i - 1, l))
        } else {
            ParObject::Leaf(if n > i { n + m - 1 } else { n }, l)
        }
    }))
}

/// `outer ∘_0 inner`: the object `inner` (containing 0) replaces the frozen leaf.
pub fn obj_compose_0(outer: &ParObject, inner: &ParObject) -> Result<ParObject, Error> {
    if !outer.has_frozen() || !inner.has_frozen() {
        return Err(Error::Invalid("both objects of a ∘_0 composition need the frozen strand".into()));
    }
    let m = (inner.size() - 1) as Strand;
    Ok(outer.map_leaves(&mut |n, l| if n == 0 { inner.clone() } else { ParObject::Leaf(n + m, l) }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    R,
    Rtilde,
    Phi,
    E,
    Psi,
}

impl Head {
    pub fn name(self) -> &'static str {
        match self {
            Head::R => "R",
            Head::Rtilde => "Rt",
            Head::Phi => "Phi",
            Head::E => "E",
            Head::Psi => "Psi",
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "R" => Head::R,
            "Rt" | "Rtilde" => Head::Rtilde,
            "Phi" => Head::Phi,
            "E" => Head::E,
            "Psi" => Head::Psi,
            _ => return Err(Error::Parse(format!("unknown generator {s:?}"))),
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Head::R | Head::Rtilde | Head::E => 2,
            Head::Phi | Head::Psi => 3,
        }
    }

    fn is_moperadic(self) -> bool {
        matches!(self, Head::E | Head::Psi)
    }
}

/// One generator letter. Blocks are subtrees of the forward source, with the
/// labels they carry there (so they encode the Γ-translate of the generator).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenInstance {
    pub head: Head,
    pub blocks: Vec<ParObject>,
    pub exponent: i8,
}

impl GenInstance {
    pub fn new(head: Head, blocks: Vec<ParObject>, exponent: i8) -> Result<Self, Error> {
        if blocks.len() != head.arity() {
            return Err(Error::Invalid(format!("{} takes {} blocks, got {}", head.name(), head.arity(), blocks.len())));
        }
        if exponent != 1 && exponent != -1 {
            return Err(Error::Invalid("exponent must be ±1".into()));
        }
        for (k, b) in blocks.iter().enumerate() {
            let frozen_ok = if head.is_moperadic() && k == 0 { b.leaves()[0] == 0 } else { !b.has_frozen() };
            if !frozen_ok {
                return Err(Error::Invalid(format!(
                    "block {k} of {} must {}contain the frozen strand",
                    head.name(),
                    if head.is_moperadic() && k == 0 { "start with and " } else { "not " }
                )));
            }
        }
        let joined = blocks.iter().skip(1).fold(blocks[0].clone(), |a, b| ParObject::pair(a, b.clone()));
        joined.validate()?;
        Ok(GenInstance { head, blocks, exponent })
    }

    pub fn inverse(&self) -> Self {
        GenInstance { exponent: -self.exponent, ..self.clone() }
    }

    /// Γ-translate carried by the letter: labels of its non-frozen source leaves.
    pub fn gamma_shift(&self, modulus: u32) -> GammaVector {
        let comps = self.blocks.iter().flat_map(|b| b.labels()).map(|(n, l)| (n, l as i64));
        GammaVector::new(modulus, comps)
    }

    fn forward_source(&self) -> ParObject {
        let b = &self.blocks;
        match self.head {
            Head::R | Head::Rtilde | Head::E => ParObject::pair(b[0].clone(), b[1].clone()),
            Head::Phi | Head::Psi => ParObject::pair(ParObject::pair(b[0].clone(), b[1].clone()), b[2].clone()),
        }
    }

    fn forward_target(&self, modulus: Option<u32>) -> ParObject {
        let b = &self.blocks;
        match self.head {
            Head::R | Head::Rtilde => ParObject::pair(b[1].clone(), b[0].clone()),
            Head::Phi | Head::Psi => ParObject::pair(b[0].clone(), ParObject::pair(b[1].clone(), b[2].clone())),
            Head::E => {
                let a = match modulus {
                    Some(n) => b[1].map_leaves(&mut |k, l| ParObject::Leaf(k, l.map(|l| (l + 1) % n))),
                    None => b[1].clone(),
                };
                ParObject::pair(b[0].clone(), a)
            }
        }
    }

    /// Applies the letter to `obj`; returns the new object and the offset of
    /// the affected subtree.
    pub fn apply(&self, obj: &ParObject, modulus: Option<u32>) -> Result<(ParObject, usize), Error> {
        let (from, to) = if self.exponent > 0 {
            (self.forward_source(), self.forward_target(modulus))
        } else {
            (self.forward_target(modulus), self.forward_source())
        };
        let offset = obj
            .find(&from)
            .ok_or_else(|| Error::EndpointMismatch(format!("{self} does not apply to {obj}: no subtree {from}")))?;
        Ok((obj.replace(&from, &to).expect("subtree found"), offset))
    }

    /// Braid of the letter on `strands` strands when its subtree starts at `offset`.
    fn braid(&self, offset: usize, strands: usize) -> BraidWord {
        let sizes: Vec<usize> = self.blocks.iter().map(|b| b.size()).collect();
        let forward = match self.head {
            Head::R => block_cross(sizes[0], sizes[1]),
            Head::Rtilde => block_cross(sizes[1], sizes[0]).inverse(),
            Head::Phi | Head::Psi => BraidWord::identity(sizes.iter().sum()),
            // The moving block turns once around the frozen block, carrying its own framing.
            Head::E => full_twist(sizes[0] + sizes[1]).compose(&full_twist(sizes[0]).inverse().shifted(0, sizes[0] + sizes[1])),
        };
        let w = if self.exponent > 0 { forward } else { forward.inverse() };
        w.shifted(offset, strands)
    }

    fn map_blocks(&self, f: &mut impl FnMut(&ParObject) -> ParObject) -> GenInstance {
        GenInstance { head: self.head, blocks: self.blocks.iter().map(f).collect(), exponent: self.exponent }
    }

    pub fn to_json(&self, modulus: Option<u32>) -> Value {
        let shift = modulus.map(|n| {
            let gv = self.gamma_shift(n);
            Value::Object(gv.comps.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
        });
        json!({
            "head": self.head.name(),
            "blocks": self.blocks.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "shift": shift,
            "exp": self.exponent,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let head = Head::parse(v["head"].as_str().ok_or_else(|| Error::Parse("letter without head".into()))?)?;
        let blocks = v["blocks"]
            .as_array()
            .ok_or_else(|| Error::Parse("letter without blocks".into()))?
            .iter()
            .map(|b| b.as_str().ok_or_else(|| Error::Parse("block must be a string".into())).and_then(ParObject::parse))
            .collect::<Result<Vec<_>, _>>()?;
        let exp = v.get("exp").and_then(Value::as_i64).unwrap_or(1) as i8;
        GenInstance::new(head, blocks, exp)
    }
}

impl fmt::Display for GenInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        write!(f, "{}[{}]", self.head.name(), blocks.join("; "))?;
        if self.exponent < 0 {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// Composable word of generator letters, composed left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorWord {
    pub source: ParObject,
    pub letters: Vec<GenInstance>,
    pub modulus: Option<u32>,
    target: ParObject,
}

impl MorWord {
    pub fn identity(source: ParObject, modulus: Option<u32>) -> Result<Self, Error> {
        source.validate()?;
        if modulus.is_some() != source.is_labelled() && source.size() > usize::from(source.has_frozen()) {
            return Err(Error::Invalid(format!("object {source} does not match modulus {modulus:?}")));
        }
        Ok(MorWord { target: source.clone(), source, letters: Vec::new(), modulus })
    }

    pub fn new(source: ParObject, letters: Vec<GenInstance>, modulus: Option<u32>) -> Result<Self, Error> {
        let mut w = MorWord::identity(source, modulus)?;
        for l in letters {
            w.push(l)?;
        }
        Ok(w)
    }

    pub fn generator(head: Head, source: ParObject, blocks: Vec<ParObject>, modulus: Option<u32>) -> Result<Self, Error> {
        MorWord::new(source, vec![GenInstance::new(head, blocks, 1)?], modulus)
    }

    fn push(&mut self, letter: GenInstance) -> Result<(), Error> {
        if letter.head.is_moperadic() && !self.source.has_frozen() {
            return Err(Error::Invalid(format!("{} needs an object with the frozen strand", letter.head.name())));
        }
        let (t, _) = letter.apply(&self.target, self.modulus)?;
        self.target = t;
        self.letters.push(letter);
        Ok(())
    }

    /// Parses letters such as `Psi[0; 1_0; 2_0] E[(0 1_1); 2_0]^-1` starting at `source`.
    pub fn parse(source: &str, word: &str, modulus: Option<u32>) -> Result<Self, Error> {
        let src = ParObject::parse(source)?;
        let mut letters = Vec::new();
        let mut rest = word.trim();
        while !rest.is_empty() {
            let open = rest.find('[').ok_or_else(|| Error::Parse(format!("expected '[' in {rest:?}")))?;
            let close = rest.find(']').ok_or_else(|| Error::Parse(format!("expected ']' in {rest:?}")))?;
            let head = Head::parse(rest[..open].trim())?;
            let blocks = rest[open + 1..close].split(';').map(ParObject::parse).collect::<Result<Vec<_>, _>>()?;
            rest = rest[close + 1..].trim_start();
            let exp = if let Some(r) = rest.strip_prefix("^-1") {
                rest = r.trim_start();
                -1
            } else {
                1
            };
            letters.push(GenInstance::new(head, blocks, exp)?);
        }
        MorWord::new(src, letters, modulus)
    }

    pub fn target(&self) -> &ParObject {
        &self.target
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    pub fn compose(&self, other: &MorWord) -> Result<MorWord, Error> {
        if self.target != other.source || self.modulus != other.modulus {
            return Err(Error::EndpointMismatch(format!("target {} vs source {}", self.target, other.source)));
        }
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Ok(MorWord { source: self.source.clone(), letters, modulus: self.modulus, target: other.target.clone() })
    }

    pub fn invert(&self) -> MorWord {
        MorWord {
            source: self.target.clone(),
            letters: self.letters.iter().rev().map(GenInstance::inverse).collect(),
            modulus: self.modulus,
            target: self.source.clone(),
        }
    }

    pub fn strands(&self) -> usize {
        self.source.size()
    }

    /// Braid image: R is a positive block crossing, Φ and Ψ are straight, and
    /// `E^{P,A}` is `Δ²_{P∪A} Δ_P^{-2}`. Strand positions follow the in-order leaves.
    pub fn evaluate_to_braid(&self) -> BraidWord {
        let n = self.strands();
        let mut obj = self.source.clone();
        let mut out = BraidWord::identity(n);
        for l in &self.letters {
            let (next, offset) = l.apply(&obj, self.modulus).expect("validated word");
            out = out.compose(&l.braid(offset, n));
            obj = next;
        }
        out
    }

    pub fn gamma_act(&self, gv: &GammaVector) -> Result<MorWord, Error> {
        if self.modulus != Some(gv.modulus) {
            return Err(Error::Invalid("Γ acts only on labelled words of the same modulus".into()));
        }
        let letters = self.letters.iter().map(|l| l.map_blocks(&mut |b| b.shift_labels(gv))).collect();
        MorWord::new(self.source.shift_labels(gv), letters, self.modulus)
    }

    /// Deletes a strand; letters with an emptied block degenerate to identities.
    pub fn delete_strand(&self, name: Strand) -> Result<MorWord, Error> {
        if name == 0 || !self.source.contains(name) {
            return Err(Error::Invalid(format!("cannot delete strand {name}")));
        }
        let source = self.source.delete(name).ok_or_else(|| Error::Invalid("nothing left".into()))?;
        let mut letters = Vec::new();
        for l in &self.letters {
            let blocks: Option<Vec<ParObject>> = l.blocks.iter().map(|b| b.delete(name)).collect();
            if let Some(blocks) = blocks {
                letters.push(GenInstance::new(l.head, blocks, l.exponent)?);
            }
        }
        MorWord::new(source, letters, self.modulus)
    }

    /// Renames strands to `0/1..` in increasing order of their names.
    pub fn normalize_names(&self) -> Result<MorWord, Error> {
        let mut names = self.source.leaves();
        names.sort_unstable();
        let start = if names.first() == Some(&0) { 0 } else { 1 };
        let map: BTreeMap<Strand, Strand> = names.iter().enumerate().map(|(k, n)| (*n, k as Strand + start)).collect();
        let f = |n: Strand| map[&n];
        let letters = self.letters.iter().map(|l| l.map_blocks(&mut |b| b.rename(&f))).collect();
        MorWord::new(self.source.rename(&f), letters, self.modulus)
    }

    /// Number of `E` letters (with sign) moving each non-frozen strand, modulo `modulus`.
    pub fn gamma_weight(&self, modulus: u32) -> Result<GammaVector, Error> {
        if self.source.unlabelled() != self.target.unlabelled() {
            return Err(Error::Invalid("gamma weight is defined on endomorphisms".into()));
        }
        let mut counts: BTreeMap<Strand, i64> =
            self.source.leaves().into_iter().filter(|n| *n != 0).map(|n| (n, 0)).collect();
        for l in self.letters.iter().filter(|l| l.head == Head::E) {
            for n in l.blocks[1].leaves() {
                *counts.get_mut(&n).expect("strand of the word") += l.exponent as i64;
            }
        }
        Ok(GammaVector::new(modulus, counts))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_string(),
            "target": self.target.to_string(),
            "modulus": self.modulus,
            "letters": self.letters.iter().map(|l| l.to_json(self.modulus)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let source = ParObject::parse(v["source"].as_str().ok_or_else(|| Error::Parse("word without source".into()))?)?;
        let modulus = v.get("modulus").and_then(Value::as_u64).map(|n| n as u32);
        let letters = v["letters"]
            .as_array()
            .ok_or_else(|| Error::Parse("word without letters".into()))?
            .iter()
            .map(GenInstance::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        let w = MorWord::new(source, letters, modulus)?;
        if let Some(t) = v.get("target").and_then(Value::as_str) {
            if ParObject::parse(t)? != w.target {
                return Err(Error::EndpointMismatch(format!("declared target {t} but computed {}", w.target)));
            }
        }
        Ok(w)
    }
}

impl fmt::Display for MorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{} -> {} : {}", self.source, self.target, if letters.is_empty() { "id".into() } else { letters.join(" ") })
    }
}

/// Equality in the presented groupoid: same endpoints (labels included) and equal braid images.
pub fn equal_morphisms(a: &MorWord, b: &MorWord) -> Result<bool, Error> {
    if a.modulus != b.modulus || a.source.has_frozen() != b.source.has_frozen() {
        return Err(Error::Invalid("words of different flavors".into()));
    }
    if a.source != b.source || a.target != b.target {
        return Ok(false);
    }
    braid_engine::equal(&a.evaluate_to_braid(), &b.evaluate_to_braid())
}

/// `outer ∘_i inner` with `inner` a word of the operad (no frozen strand, no labels).
pub fn mor_compose_i(outer: &MorWord, i: Strand, inner: &MorWord) -> Result<MorWord, Error> {
    if inner.modulus.is_some() || inner.source.has_frozen() {
        return Err(Error::Invalid("∘_i inserts an unlabelled operad word".into()));
    }
    let m = inner.source.size() as Strand;
    let rename_outer = |n: Strand| if n > i { n + m - 1 } else { n };
    let substitute = |b: &ParObject| {
        b.map_leaves(&mut |n, l| {
            if n == i {
                inner.source.map_leaves(&mut |k, _| ParObject::Leaf(k + i - 1, l))
            } else {
                ParObject::Leaf(rename_outer(n), l)
            }
        })
    };
    let mut letters: Vec<GenInstance> = outer.letters.iter().map(|l| l.map_blocks(&mut |b| substitute(b))).collect();
    let label = outer.target.label_of(i);
    letters.extend(
        inner
            .letters
            .iter()
            .map(|l| l.map_blocks(&mut |b| b.map_leaves(&mut |k, _| ParObject::Leaf(k + i - 1, label)))),
    );
    MorWord::new(obj_compose_i(&outer.source, i, &inner.source)?, letters, outer.modulus)
}

/// `outer ∘_0 inner`: the word `inner` (with frozen strand) is inserted at the frozen strand.
pub fn mor_compose_0(outer: &MorWord, inner: &MorWord) -> Result<MorWord, Error> {
    if outer.modulus != inner.modulus {
        return Err(Error::Invalid("∘_0 of words with different moduli".into()));
    }
    let m = (inner.source.size() - 1) as Strand;
    let substitute = |b: &ParObject| {
        b.map_leaves(&mut |n, l| if n == 0 { inner.source.clone() } else { ParObject::Leaf(n + m, l) })
    };
    let mut letters: Vec<GenInstance> = outer.letters.iter().map(|l| l.map_blocks(&mut |b| substitute(b))).collect();
    letters.extend(inner.letters.iter().cloned());
    MorWord::new(obj_compose_0(&outer.source, &inner.source)?, letters, outer.modulus)
}

/// `(E^{0,1_0})^{(p)} = E^{0,1_0} E^{0,1_1} ⋯ E^{0,1_{p-1}}`.
pub fn e_power(p: usize, modulus: u32) -> MorWord {
    let src = ParObject::pair(ParObject::leaf(0), ParObject::labelled(1, 0));
    let letters = (0..p)
        .map(|k| {
            GenInstance::new(Head::E, vec![ParObject::leaf(0), ParObject::labelled(1, (k as u32) % modulus)], 1)
                .expect("valid letter")
        })
        .collect();
    MorWord::new(src, letters, Some(modulus)).expect("labels chain")
}

fn pairs(obj: &ParObject, out: &mut Vec<(ParObject, ParObject)>) {
    if let ParObject::Pair(a, b) = obj {
        out.push(((**a).clone(), (**b).clone()));
        pairs(a, out);
        pairs(b, out);
    }
}

/// Every letter (either exponent) whose endpoint occurs in `obj`.
pub fn applicable_letters(obj: &ParObject, modulus: Option<u32>) -> Vec<GenInstance> {
    let starts_frozen = |o: &ParObject| o.leaves()[0] == 0;
    let unshift = |o: &ParObject| match modulus {
        Some(n) => o.map_leaves(&mut |k, l| ParObject::Leaf(k, l.map(|l| (l + n - 1) % n))),
        None => o.clone(),
    };
    let mut ps = Vec::new();
    pairs(obj, &mut ps);
    let mut out = Vec::new();
    for (a, b) in ps {
        let plain = !a.has_frozen() && !b.has_frozen();
        if plain {
            for head in [Head::R, Head::Rtilde] {
                out.extend(GenInstance::new(head, vec![a.clone(), b.clone()], 1));
                out.extend(GenInstance::new(head, vec![b.clone(), a.clone()], -1));
            }
        }
        if starts_frozen(&a) && !b.has_frozen() {
            out.extend(GenInstance::new(Head::E, vec![a.clone(), b.clone()], 1));
            out.extend(GenInstance::new(Head::E, vec![a.clone(), unshift(&b)], -1));
        }
        if let ParObject::Pair(a1, a2) = &a {
            let head = if starts_frozen(a1) { Head::Psi } else { Head::Phi };
            out.extend(GenInstance::new(head, vec![(**a1).clone(), (**a2).clone(), b.clone()], 1));
        }
        if let ParObject::Pair(b1, b2) = &b {
            let head = if starts_frozen(&a) { Head::Psi } else { Head::Phi };
            out.extend(GenInstance::new(head, vec![a.clone(), (**b1).clone(), (**b2).clone()], -1));
        }
    }
    out
}

/// Random walk of `len` letters from `source`.
pub fn random_word<R: Rng + ?Sized>(source: &ParObject, len: usize, modulus: Option<u32>, rng: &mut R) -> Result<MorWord, Error> {
    let mut w = MorWord::identity(source.clone(), modulus)?;
    for _ in 0..len {
        let choices = applicable_letters(w.target(), modulus);
        if choices.is_empty() {
            break;
        }
        let l = choices[rng.gen_range(0..choices.len())].clone();
        w.push(l)?;
    }
    Ok(w)
}

/// Endomorphism `w_1 w_2^{-1}` of `source` from two random walks of at most
/// `max_len / 2` letters each that end at the same object.
pub fn random_endomorphism<R: Rng + ?Sized>(
    source: &ParObject,
    max_len: usize,
    modulus: Option<u32>,
    rng: &mut R,
) -> Result<MorWord, Error> {
    let half = max_len / 2;
    for _ in 0..1000 {
        let w1 = random_word(source, rng.gen_range(0..=half), modulus, rng)?;
        let w2 = random_word(source, rng.gen_range(0..=half), modulus, rng)?;
        if w1.target() == w2.target() {
            return w1.compose(&w2.invert());
        }
    }
    MorWord::identity(source.clone(), modulus)
}

/// Linking numbers of the braid image with the frozen strand, keyed by strand name.
pub fn braid_linking(a: &MorWord) -> Result<BTreeMap<Strand, i64>, Error> {
    let ann = AnnularBraidWord::new(a.evaluate_to_braid())?;
    let names = a.source.leaves();
    if names[0] != 0 {
        return Err(Error::Invalid("frozen strand must be leftmost".into()));
    }
    Ok(names[1..].iter().copied().zip(braid_engine::linking_with_zero(&ann)).collect())
}

pub const PAB_TAGS: [&str; 4] = ["U", "H1", "H2", "P"];
pub const PAB1_TAGS: [&str; 4] = ["cU", "MP", "RP", "O"];
pub const PABGAMMA_TAGS: [&str; 4] = ["tU", "tMP", "tRP", "tO"];

#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub tag: String,
    pub source: String,
    pub target: String,
    pub holds: bool,
    pub sides: Vec<(String, String)>,
    pub lhs_braid: String,
    pub rhs_braid: String,
}

impl RelationCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "tag": self.tag,
            "source": self.source,
            "target": self.target,
            "pass": self.holds,
            "sides": self.sides.iter().map(|(l, r)| json!({"lhs": l, "rhs": r})).collect::<Vec<_>>(),
            "lhs_braid": self.lhs_braid,
            "rhs_braid": self.rhs_braid,
        })
    }
}

fn compare(tag: &str, lhs: &MorWord, rhs: &MorWord) -> Result<RelationCheck, Error> {
    Ok(RelationCheck {
        tag: tag.into(),
        source: lhs.source.to_string(),
        target: lhs.target().to_string(),
        holds: equal_morphisms(lhs, rhs)?,
        sides: vec![(lhs.to_string(), rhs.to_string())],
        lhs_braid: lhs.evaluate_to_braid().to_text(0),
        rhs_braid: rhs.evaluate_to_braid().to_text(0),
    })
}

/// Unit relations: deleting any non-frozen strand of `gen` gives an identity.
fn unit_check(tag: &str, gen: &MorWord, deletable: &[Strand]) -> Result<RelationCheck, Error> {
    let mut holds = true;
    let mut sides = Vec::new();
    for &d in deletable {
        let deleted = gen.delete_strand(d)?.normalize_names()?;
        let id = MorWord::identity(deleted.source.clone(), deleted.modulus)?;
        let pos = gen.source.leaves().iter().position(|n| *n == d).expect("strand present");
        let cabled = braid_engine::cable(&gen.evaluate_to_braid(), pos, 0)?;
        holds &= equal_morphisms(&deleted, &id)? && braid_engine::is_identity(&cabled);
        sides.push((deleted.to_string(), id.to_string()));
    }
    Ok(RelationCheck {
        tag: tag.into(),
        source: gen.source.to_string(),
        target: gen.target().to_string(),
        holds,
        sides,
        lhs_braid: gen.evaluate_to_braid().to_text(0),
        rhs_braid: String::new(),
    })
}

/// Builds both sides of a catalogue relation and compares them. `modulus` is
/// used by the labelled tags only.
pub fn check_relation(tag: &str, modulus: u32) -> Result<RelationCheck, Error> {
    let p = |s: &str, w: &str| MorWord::parse(s, w, None);
    let n = Some(modulus);
    let t = |s: &str, w: &str| MorWord::parse(s, w, n);
    match tag {
        "U" => unit_check(tag, &p("((1 2) 3)", "Phi[1; 2; 3]")?, &[1, 2, 3]),
        "H1" => compare(tag, &p("((1 2) 3)", "R[1; 2] Phi[2; 1; 3] R[1; 3]")?, &p("((1 2) 3)", "Phi[1; 2; 3] R[1; (2 3)] Phi[2; 3; 1]")?),
        "H2" => compare(tag, &p("((1 2) 3)", "Rt[1; 2] Phi[2; 1; 3] Rt[1; 3]")?, &p("((1 2) 3)", "Phi[1; 2; 3] Rt[1; (2 3)] Phi[2; 3; 1]")?),
        "P" => compare(
            tag,
            &p("(((1 2) 3) 4)", "Phi[(1 2); 3; 4] Phi[1; 2; (3 4)]")?,
            &p("(((1 2) 3) 4)", "Phi[1; 2; 3] Phi[1; (2 3); 4] Phi[2; 3; 4]")?,
        ),
        "cU" => unit_check(tag, &p("((0 1) 2)", "Psi[0; 1; 2]")?, &[1, 2]),
        "MP" => compare(
            tag,
            &p("(((0 1) 2) 3)", "Psi[(0 1); 2; 3] Psi[0; 1; (2 3)]")?,
            &p("(((0 1) 2) 3)", "Psi[0; 1; 2] Psi[0; (1 2); 3] Phi[1; 2; 3]")?,
        ),
        "RP" => compare(tag, &p("((0 1) 2)", "Psi[0; 1; 2] E[0; (1 2)] Psi[0; 1; 2]^-1")?, &p("((0 1) 2)", "E[0; 1] E[(0 1); 2]")?),
        "O" => compare(
            tag,
            &p("((0 1) 2)", "E[(0 1); 2]")?,
            &p("((0 1) 2)", "Psi[0; 1; 2] R[1; 2] Psi[0; 2; 1]^-1 E[0; 2] Psi[0; 2; 1] R[2; 1] Psi[0; 1; 2]^-1")?,
        ),
        "tU" => unit_check(tag, &t("((0 1_0) 2_0)", "Psi[0; 1_0; 2_0]")?, &[1, 2]),
        "tMP" => compare(
            tag,
            &t("(((0 1_0) 2_0) 3_0)", "Psi[(0 1_0); 2_0; 3_0] Psi[0; 1_0; (2_0 3_0)]")?,
            &t("(((0 1_0) 2_0) 3_0)", "Psi[0; 1_0; 2_0] Psi[0; (1_0 2_0); 3_0] Phi[1_0; 2_0; 3_0]")?,
        ),
        "tRP" => {
            let one = 1 % modulus;
            compare(
                tag,
                &t("((0 1_0) 2_0)", &format!("Psi[0; 1_0; 2_0] E[0; (1_0 2_0)] Psi[0; 1_{one}; 2_{one}]^-1"))?,
                &t("((0 1_0) 2_0)", &format!("E[0; 1_0] E[(0 1_{one}); 2_0]"))?,
            )
        }
        "tO" => {
            let one = 1 % modulus;
            compare(
                tag,
                &t("((0 1_0) 2_0)", "E[(0 1_0); 2_0]")?,
                &t(
                    "((0 1_0) 2_0)",
                    &format!(
                        "Psi[0; 1_0; 2_0] R[1_0; 2_0] Psi[0; 2_0; 1_0]^-1 E[0; 2_0] \
                         Psi[0; 2_{one}; 1_0] R[2_{one}; 1_0] Psi[0; 1_0; 2_{one}]^-1"
                    ),
                )?,
            )
        }
        _ => Err(Error::Invalid(format!("unknown relation tag {tag:?}"))),
    }
}

/// Tags of a presentation: `pab`, `pab1` or `pabgamma`.
pub fn catalogue(which: &str) -> Result<&'static [&'static str], Error> {
    match which {
        "pab" => Ok(&PAB_TAGS),
        "pab1" => Ok(&PAB1_TAGS),
        "pabgamma" => Ok(&PABGAMMA_TAGS),
        _ => Err(Error::Invalid(format!("unknown presentation {which:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["((0 1_1) 2_0)", "(1 2)", "7", "((1 2) (3 4))"] {
            assert_eq!(ParObject::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(ParObject::parse("(0 1) 2").unwrap(), ParObject::parse("((0 1) 2)").unwrap());
        assert!(ParObject::parse("(1 2 3)").is_err());
        assert!(ParObject::parse("(1 1)").is_err());
        assert!(ParObject::parse("(0_1 1_0)").is_err());
    }

    #[test]
    fn inverse_letters_use_the_target_pattern() {
        let w = MorWord::parse("((0 1_1) 2_1)", "Psi[0; 1_1; 2_1]", Some(3)).unwrap();
        assert_eq!(w.target().to_string(), "(0 (1_1 2_1))");
        let e = MorWord::parse("(0 1_1)", "E[0; 1_0]^-1", Some(3)).unwrap();
        assert_eq!(e.target().to_string(), "(0 1_0)");
    }
}
