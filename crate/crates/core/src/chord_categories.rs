//! Parenthesized (N-)chord diagrams. Morphisms of `CD^Γ` are modelled as a
//! crossed product: a payload `u ∈ U(t^Γ)` followed by a pure label shift `δ`,
//! composed by `(u, δ)·(v, ε) = (u · δ⋅v, δ + ε)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::graded_lie::{
    gamma_action, inclusion, mop_compose_0_morphism, mop_compose_i_morphism, rename_strands, t_algebra,
    tgamma_algebra, GammaVector, LieAlgebra, LieElement, Strand,
};
use crate::par_groupoids::{obj_compose_0, obj_compose_i, ParObject};
use crate::uea::{map_uea, UEAElement};
use crate::Error;

fn non_frozen(obj: &ParObject) -> Vec<Strand> {
    let mut s: Vec<Strand> = obj.leaves().into_iter().filter(|n| *n != 0).collect();
    s.sort_unstable();
    s
}

fn labels_of(obj: &ParObject, n: u32) -> GammaVector {
    let mut gv = GammaVector::zero(n, &non_frozen(obj));
    for (k, l) in obj.labels() {
        gv.comps.insert(k, l % n);
    }
    gv
}

/// `δ⋅u`, the Γ-action extended multiplicatively to the enveloping algebra.
pub fn gamma_act_uea(delta: &GammaVector, u: &UEAElement) -> Result<UEAElement, Error> {
    if delta.is_zero() {
        return Ok(u.clone());
    }
    map_uea(&gamma_action(&u.alg, delta)?, u)
}

/// Morphism of `CD^Γ(n)`: labellings `src → tgt` and a payload over `t^Γ` on the strands.
#[derive(Clone, Debug, PartialEq)]
pub struct CDGammaMorphism {
    pub src: GammaVector,
    pub tgt: GammaVector,
    pub u: UEAElement,
}

impl CDGammaMorphism {
    pub fn new(src: GammaVector, tgt: GammaVector, u: UEAElement) -> Result<Self, Error> {
        if src.modulus != tgt.modulus || src.comps.keys().ne(tgt.comps.keys()) {
            return Err(Error::Invalid("source and target labellings differ in shape".into()));
        }
        Ok(CDGammaMorphism { src, tgt, u })
    }

    pub fn identity(labels: &GammaVector, alg: &Arc<LieAlgebra>, trunc: usize) -> Self {
        CDGammaMorphism { src: labels.clone(), tgt: labels.clone(), u: UEAElement::one(alg, trunc) }
    }

    pub fn shift(&self) -> GammaVector {
        self.tgt.add(&self.src.neg())
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &CDGammaMorphism) -> Result<CDGammaMorphism, Error> {
        if self.tgt != other.src {
            return Err(Error::EndpointMismatch(format!("{:?} vs {:?}", self.tgt.comps, other.src.comps)));
        }
        let v = gamma_act_uea(&self.shift(), &other.u)?;
        Ok(CDGammaMorphism { src: self.src.clone(), tgt: other.tgt.clone(), u: self.u.multiply(&v)? })
    }

    pub fn inverse(&self) -> Result<CDGammaMorphism, Error> {
        let v = gamma_act_uea(&self.shift().neg(), &self.u.inverse()?)?;
        Ok(CDGammaMorphism { src: self.tgt.clone(), tgt: self.src.clone(), u: v })
    }

    pub fn add(&self, other: &CDGammaMorphism) -> Result<CDGammaMorphism, Error> {
        if self.src != other.src || self.tgt != other.tgt {
            return Err(Error::EndpointMismatch("sum of morphisms with different endpoints".into()));
        }
        Ok(CDGammaMorphism { u: self.u.add(&other.u), ..self.clone() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdHead {
    X,
    H,
    A,
    K,
    L,
    B,
}

impl CdHead {
    pub fn parse(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "X" => CdHead::X,
            "H" => CdHead::H,
            "a" => CdHead::A,
            "K" => CdHead::K,
            "L" => CdHead::L,
            "b" => CdHead::B,
            _ => return Err(Error::Parse(format!("unknown chord generator {s:?}"))),
        })
    }

    fn arity(self) -> usize {
        match self {
            CdHead::A | CdHead::B => 3,
            _ => 2,
        }
    }

    fn frozen_first(self) -> bool {
        matches!(self, CdHead::K | CdHead::L | CdHead::B)
    }
}

/// Morphism of `PaCD^Γ`: parenthesized labelled endpoints over a `CD^Γ` payload.
#[derive(Clone, Debug, PartialEq)]
pub struct PaCDGammaMorphism {
    pub src: ParObject,
    pub tgt: ParObject,
    pub payload: CDGammaMorphism,
}

impl PaCDGammaMorphism {
    pub fn alg(&self) -> &Arc<LieAlgebra> {
        &self.payload.u.alg
    }

    pub fn modulus(&self) -> u32 {
        self.payload.src.modulus
    }

    pub fn trunc(&self) -> usize {
        self.payload.u.trunc
    }

    pub fn identity(obj: &ParObject, n: u32, trunc: usize) -> Result<Self, Error> {
        if !obj.has_frozen() {
            return Err(Error::Invalid(format!("{obj} lacks the frozen strand")));
        }
        let alg = tgamma_algebra(&non_frozen(obj), n, trunc);
        Ok(PaCDGammaMorphism {
            src: obj.clone(),
            tgt: obj.clone(),
            payload: CDGammaMorphism::identity(&labels_of(obj, n), &alg, trunc),
        })
    }

    /// Generator applied inside `obj`. Blocks carry their source labels; the
    /// payload does not depend on them.
    pub fn generator(head: CdHead, obj: &ParObject, blocks: &[ParObject], exponent: i8, n: u32, trunc: usize) -> Result<Self, Error> {
        if blocks.len() != head.arity() {
            return Err(Error::Invalid(format!("{head:?} takes {} blocks", head.arity())));
        }
        for (k, b) in blocks.iter().enumerate() {
            let ok = if head.frozen_first() && k == 0 { b.leaves()[0] == 0 } else { !b.has_frozen() };
            if !ok {
                return Err(Error::Invalid(format!("block {k} of {head:?} has a misplaced frozen strand")));
            }
        }
        let id = PaCDGammaMorphism::identity(obj, n, trunc)?;
        let alg = id.alg().clone();
        let pair = |a: &ParObject, b: &ParObject| ParObject::pair(a.clone(), b.clone());
        let bump = |b: &ParObject| b.map_leaves(&mut |k, l| ParObject::Leaf(k, l.map(|l| (l + 1) % n)));
        let (from, to) = match head {
            CdHead::X => (pair(&blocks[0], &blocks[1]), pair(&blocks[1], &blocks[0])),
            CdHead::H | CdHead::K => (pair(&blocks[0], &blocks[1]), pair(&blocks[0], &blocks[1])),
            CdHead::L => (pair(&blocks[0], &blocks[1]), pair(&blocks[0], &bump(&blocks[1]))),
            CdHead::A | CdHead::B => (
                pair(&pair(&blocks[0], &blocks[1]), &blocks[2]),
                pair(&blocks[0], &pair(&blocks[1], &blocks[2])),
            ),
        };
        let lie = match head {
            CdHead::H => {
                let mut acc = LieElement::zero(&alg);
                for a in blocks[0].leaves() {
                    for b in blocks[1].leaves() {
                        acc = acc.add(&LieElement::t(&alg, a, b, 0));
                    }
                }
                Some(acc)
            }
            CdHead::K => Some(k_payload(&alg, &blocks[0].leaves(), &blocks[1].leaves())),
            _ => None,
        };
        if lie.is_some() && exponent < 0 {
            return Err(Error::Invalid("chord generators are not group-like; use sums, not inverses".into()));
        }
        let (from, to) = if exponent > 0 { (from, to) } else { (to, from) };
        if obj.find(&from).is_none() {
            return Err(Error::EndpointMismatch(format!("{head:?} does not apply to {obj}: no subtree {from}")));
        }
        let tgt = obj.replace(&from, &to).expect("subtree found");
        let u = match lie {
            Some(l) => UEAElement::from_lie(&l.truncated(trunc)),
            None => UEAElement::one(&alg, trunc),
        };
        let payload = CDGammaMorphism::new(labels_of(obj, n), labels_of(&tgt, n), u)?;
        Ok(PaCDGammaMorphism { src: obj.clone(), tgt, payload })
    }

    /// Parses a left-to-right word such as `b[0; 1_0; 2_0] L[0; (1_0 2_0)] b[0; 1_1; 2_1]^-1`.
    pub fn parse(source: &str, word: &str, n: u32, trunc: usize) -> Result<Self, Error> {
        let mut m = PaCDGammaMorphism::identity(&ParObject::parse(source)?, n, trunc)?;
        let mut rest = word.trim();
        while !rest.is_empty() {
            let open = rest.find('[').ok_or_else(|| Error::Parse(format!("expected '[' in {rest:?}")))?;
            let close = rest.find(']').ok_or_else(|| Error::Parse(format!("expected ']' in {rest:?}")))?;
            let head = CdHead::parse(rest[..open].trim())?;
            let blocks = rest[open + 1..close].split(';').map(ParObject::parse).collect::<Result<Vec<_>, _>>()?;
            rest = rest[close + 1..].trim_start();
            let exp = if let Some(r) = rest.strip_prefix("^-1") {
                rest = r.trim_start();
                -1
            } else {
                1
            };
            let g = PaCDGammaMorphism::generator(head, &m.tgt, &blocks, exp, n, trunc)?;
            m = m.compose(&g)?;
        }
        Ok(m)
    }

    /// Morphism between any two parenthesizations with the given payload.
    pub fn lift(src: &ParObject, tgt: &ParObject, u: UEAElement) -> Result<Self, Error> {
        if non_frozen(src) != non_frozen(tgt) || !src.has_frozen() || !tgt.has_frozen() {
            return Err(Error::Invalid(format!("{src} and {tgt} have different strands")));
        }
        let n = u.alg.presentation.gamma_modulus;
        let payload = CDGammaMorphism::new(labels_of(src, n), labels_of(tgt, n), u)?;
        Ok(PaCDGammaMorphism { src: src.clone(), tgt: tgt.clone(), payload })
    }

    pub fn compose(&self, other: &PaCDGammaMorphism) -> Result<Self, Error> {
        if self.tgt != other.src {
            return Err(Error::EndpointMismatch(format!("target {} vs source {}", self.tgt, other.src)));
        }
        Ok(PaCDGammaMorphism { src: self.src.clone(), tgt: other.tgt.clone(), payload: self.payload.compose(&other.payload)? })
    }

    pub fn inverse(&self) -> Result<Self, Error> {
        Ok(PaCDGammaMorphism { src: self.tgt.clone(), tgt: self.src.clone(), payload: self.payload.inverse()? })
    }

    pub fn add(&self, other: &PaCDGammaMorphism) -> Result<Self, Error> {
        if self.src != other.src || self.tgt != other.tgt {
            return Err(Error::EndpointMismatch(format!("{} → {} vs {} → {}", self.src, self.tgt, other.src, other.tgt)));
        }
        Ok(PaCDGammaMorphism { payload: self.payload.add(&other.payload)?, ..self.clone() })
    }

    /// Translation of the endpoint labels; payloads are unchanged.
    pub fn gamma_act(&self, gv: &GammaVector) -> Result<Self, Error> {
        let src = self.src.shift_labels(gv);
        let tgt = self.tgt.shift_labels(gv);
        let n = self.modulus();
        let payload = CDGammaMorphism::new(labels_of(&src, n), labels_of(&tgt, n), self.payload.u.clone())?;
        Ok(PaCDGammaMorphism { src, tgt, payload })
    }

    pub fn to_json(&self) -> Value {
        json!({"src": self.src.to_string(), "tgt": self.tgt.to_string(), "N": self.modulus(), "payload": self.payload.u.to_json()})
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let get = |k: &str| v[k].as_str().ok_or_else(|| Error::Parse(format!("missing {k}")));
        let src = ParObject::parse(get("src")?)?;
        let tgt = ParObject::parse(get("tgt")?)?;
        let n = v["N"].as_u64().ok_or_else(|| Error::Parse("missing N".into()))? as u32;
        let u = UEAElement::from_json(&v["payload"])?;
        if src.unlabelled().leaves().iter().collect::<std::collections::BTreeSet<_>>()
            != tgt.unlabelled().leaves().iter().collect()
        {
            return Err(Error::Invalid("endpoints have different strands".into()));
        }
        Ok(PaCDGammaMorphism { payload: CDGammaMorphism::new(labels_of(&src, n), labels_of(&tgt, n), u)?, src, tgt })
    }
}

impl fmt::Display for PaCDGammaMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : {:?}", self.src, self.tgt, self.payload.u)
    }
}

/// `K^{P,A} = Σ_{a∈A} t_{0a} + Σ_{q<r∈A} Σ_γ t^γ_{qr} + Σ_{a∈A, j∈P∖0} Σ_γ t^γ_{ja}`.
pub fn k_payload(alg: &Arc<LieAlgebra>, p: &[Strand], a: &[Strand]) -> LieElement {
    let n = alg.presentation.gamma_modulus as i64;
    let mut acc = LieElement::zero(alg);
    for (k, x) in a.iter().enumerate() {
        acc = acc.add(&LieElement::t0(alg, *x));
        for y in a[k + 1..].iter().chain(p.iter().filter(|j| **j != 0)) {
            for g in 0..n {
                acc = acc.add(&LieElement::t(alg, *y, *x, g));
            }
        }
    }
    acc
}

/// Morphism of the classical `PaCD` (no frozen strand) used as inner argument of `∘_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PaCDMorphism {
    pub src: ParObject,
    pub tgt: ParObject,
    pub u: UEAElement,
}

impl PaCDMorphism {
    /// Word in `X`, `H`, `a` starting at an unlabelled object without strand 0.
    pub fn parse(source: &str, word: &str, trunc: usize) -> Result<Self, Error> {
        let src = ParObject::parse(source)?;
        if src.has_frozen() || src.is_labelled() {
            return Err(Error::Invalid("classical chord diagrams live on unlabelled objects without 0".into()));
        }
        let mut strands = src.leaves();
        strands.sort_unstable();
        let alg = t_algebra(&strands, trunc);
        let mut m = PaCDMorphism { tgt: src.clone(), src, u: UEAElement::one(&alg, trunc) };
        let mut rest = word.trim();
        while !rest.is_empty() {
            let open = rest.find('[').ok_or_else(|| Error::Parse(format!("expected '[' in {rest:?}")))?;
            let close = rest.find(']').ok_or_else(|| Error::Parse(format!("expected ']' in {rest:?}")))?;
            let head = CdHead::parse(rest[..open].trim())?;
            let blocks = rest[open + 1..close].split(';').map(ParObject::parse).collect::<Result<Vec<_>, _>>()?;
            rest = rest[close + 1..].trim_start();
            let inv = if let Some(r) = rest.strip_prefix("^-1") {
                rest = r.trim_start();
                true
            } else {
                false
            };
            let pair = |a: &ParObject, b: &ParObject| ParObject::pair(a.clone(), b.clone());
            let (from, to, lie) = match (head, blocks.as_slice()) {
                (CdHead::X, [a, b]) => (pair(a, b), pair(b, a), None),
                (CdHead::H, [a, b]) => {
                    let mut acc = LieElement::zero(&alg);
                    for x in a.leaves() {
                        for y in b.leaves() {
                            acc = acc.add(&LieElement::t(&alg, x, y, 0));
                        }
                    }
                    (pair(a, b), pair(a, b), Some(acc))
                }
                (CdHead::A, [a, b, c]) => (pair(&pair(a, b), c), pair(a, &pair(b, c)), None),
                _ => return Err(Error::Invalid(format!("{head:?} with {} blocks is not a classical generator", blocks.len()))),
            };
            if lie.is_some() && inv {
                return Err(Error::Invalid("H is not group-like".into()));
            }
            let (from, to) = if inv { (to, from) } else { (from, to) };
            if m.tgt.find(&from).is_none() {
                return Err(Error::EndpointMismatch(format!("{head:?} does not apply to {}", m.tgt)));
            }
            m.tgt = m.tgt.replace(&from, &to).expect("subtree found");
            if let Some(l) = lie {
                m.u = m.u.multiply(&UEAElement::from_lie(&l))?;
            }
        }
        Ok(m)
    }
}

fn rename_outer(
    alg: &Arc<LieAlgebra>,
    f: impl Fn(Strand) -> Strand,
) -> Result<(Arc<LieAlgebra>, crate::graded_lie::LieMorphism), Error> {
    let map: BTreeMap<Strand, Strand> = alg.presentation.strands().into_iter().map(|s| (s, f(s))).collect();
    rename_strands(alg, &map)
}

/// `outer ∘_i inner` for a classical inner morphism.
pub fn cd_mop_compose_i(outer: &PaCDGammaMorphism, i: Strand, inner: &PaCDMorphism) -> Result<PaCDGammaMorphism, Error> {
    let n = outer.modulus();
    let trunc = outer.trunc().min(inner.u.trunc);
    let m = inner.src.size() as Strand;
    let (ren_alg, ren) = rename_outer(outer.alg(), |s| if s > i { s + m - 1 } else { s })?;
    let inner_names: Vec<Strand> = (i..i + m).collect();
    let (big, ins) = mop_compose_i_morphism(&ren_alg, i, &inner_names)?;
    let u1 = map_uea(&ins, &map_uea(&ren, &outer.payload.u)?)?;
    let (inner_ren_alg, inner_ren) = rename_strands(&inner.u.alg, &(1..=m).map(|k| (k, k + i - 1)).collect())?;
    let big_sorted = tgamma_algebra(&big.presentation.strands(), n, big.max_degree);
    let incl = inclusion(&inner_ren_alg, &big_sorted)?;
    let u2 = map_uea(&incl, &map_uea(&inner_ren, &inner.u)?)?;
    let to_sorted = inclusion(&big, &big_sorted)?;
    let u1 = map_uea(&to_sorted, &u1)?;
    let src = obj_compose_i(&outer.src, i, &inner.src)?;
    let mid = obj_compose_i(&outer.tgt, i, &inner.src)?;
    let tgt = obj_compose_i(&outer.tgt, i, &inner.tgt)?;
    let first = PaCDGammaMorphism {
        payload: CDGammaMorphism::new(labels_of(&src, n), labels_of(&mid, n), u1.truncated(trunc))?,
        src,
        tgt: mid.clone(),
    };
    let second = PaCDGammaMorphism {
        payload: CDGammaMorphism::new(labels_of(&mid, n), labels_of(&tgt, n), u2.truncated(trunc))?,
        src: mid,
        tgt,
    };
    first.compose(&second)
}

/// `outer ∘_0 inner`: the inner morphism is inserted at the frozen strand.
pub fn cd_mop_compose_0(outer: &PaCDGammaMorphism, inner: &PaCDGammaMorphism) -> Result<PaCDGammaMorphism, Error> {
    let n = outer.modulus();
    if inner.modulus() != n {
        return Err(Error::Invalid("moduli differ".into()));
    }
    let trunc = outer.trunc().min(inner.trunc());
    let m = (inner.src.size() - 1) as Strand;
    let (ren_alg, ren) = rename_outer(outer.alg(), |s| s + m)?;
    let inner_names = non_frozen(&inner.src);
    let (big, ins) = mop_compose_0_morphism(&ren_alg, &inner_names)?;
    let big_sorted = tgamma_algebra(&big.presentation.strands(), n, big.max_degree);
    let u1 = map_uea(&inclusion(&big, &big_sorted)?, &map_uea(&ins, &map_uea(&ren, &outer.payload.u)?)?)?;
    let u2 = map_uea(&inclusion(inner.alg(), &big_sorted)?, &inner.payload.u)?;
    let src = obj_compose_0(&outer.src, &inner.src)?;
    let mid = obj_compose_0(&outer.tgt, &inner.src)?;
    let tgt = obj_compose_0(&outer.tgt, &inner.tgt)?;
    let first = PaCDGammaMorphism {
        payload: CDGammaMorphism::new(labels_of(&src, n), labels_of(&mid, n), u1.truncated(trunc))?,
        src,
        tgt: mid.clone(),
    };
    let second = PaCDGammaMorphism {
        payload: CDGammaMorphism::new(labels_of(&mid, n), labels_of(&tgt, n), u2.truncated(trunc))?,
        src: mid,
        tgt,
    };
    first.compose(&second)
}

pub const CD_TAGS: [&str; 7] = ["30", "31", "32", "33", "34", "35", "36"];

#[derive(Clone, Debug)]
pub struct CdRelationCheck {
    pub tag: String,
    pub source: String,
    pub target: String,
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
}

impl CdRelationCheck {
    pub fn to_json(&self) -> Value {
        json!({"tag": self.tag, "source": self.source, "target": self.target, "pass": self.holds, "lhs": self.lhs, "rhs": self.rhs})
    }
}

/// `(L^{0,1_0})^{(k)}` as an endpoint-only lift: payload 1, strand 1 shifted by `k`.
/// Morphisms of the fake pull-back only see labellings, so any parenthesization works.
fn l_power(obj: &ParObject, k: u32, n: u32, d: usize) -> Result<PaCDGammaMorphism, Error> {
    let shift = GammaVector::new(n, [(1, k as i64)]);
    let tgt = obj.shift_labels(&shift);
    let id = PaCDGammaMorphism::identity(obj, n, d)?;
    PaCDGammaMorphism::lift(obj, &tgt, id.payload.u)
}

/// Checks one of the relations among `K`, `L`, `b` and the classical generators
/// in the crossed-product model at truncation `d`.
pub fn check_cd_relation(tag: &str, n: u32, d: usize) -> Result<CdRelationCheck, Error> {
    let w = |s: &str, t: &str| PaCDGammaMorphism::parse(s, t, n, d);
    let one = 1 % n;
    let (lhs, rhs) = match tag {
        "30" => {
            let obj = ParObject::parse("(0 1_0)")?;
            let mut lhs = PaCDGammaMorphism::identity(&obj, n, d)?;
            for j in 0..n {
                lhs = lhs.compose(&w(&lhs.tgt.to_string(), &format!("L[0; 1_{j}]"))?)?;
            }
            (lhs, w("(0 1_0)", "")?)
        }
        "31" => (w("(0 1_0)", &format!("L[0; 1_0] K[0; 1_{one}]"))?, w("(0 1_0)", "K[0; 1_0] L[0; 1_0]")?),
        "32" => (
            w("(((0 1_0) 2_0) 3_0)", "b[(0 1_0); 2_0; 3_0] b[0; 1_0; (2_0 3_0)]")?,
            w("(((0 1_0) 2_0) 3_0)", "b[0; 1_0; 2_0] b[0; (1_0 2_0); 3_0] a[1_0; 2_0; 3_0]")?,
        ),
        "33" => (
            w("((0 1_0) 2_0)", &format!("b[0; 1_0; 2_0] L[0; (1_0 2_0)] b[0; 1_{one}; 2_{one}]^-1"))?,
            w("((0 1_0) 2_0)", &format!("L[0; 1_0] L[(0 1_{one}); 2_0]"))?,
        ),
        "34" => (
            w("((0 1_0) 2_0)", "L[(0 1_0); 2_0]")?,
            w(
                "((0 1_0) 2_0)",
                &format!(
                    "b[0; 1_0; 2_0] X[1_0; 2_0] b[0; 2_0; 1_0]^-1 L[0; 2_0] b[0; 2_{one}; 1_0] X[2_{one}; 1_0] b[0; 1_0; 2_{one}]^-1"
                ),
            )?,
        ),
        "35" => {
            let src = "(0 (1_0 2_0))";
            let lhs = w(src, "K[0; (1_0 2_0)]")?;
            let mut total = w(src, "b[0; 1_0; 2_0]^-1 K[0; 1_0] b[0; 1_0; 2_0]")?;
            total = total.add(&w(src, "X[1_0; 2_0] b[0; 2_0; 1_0]^-1 K[0; 2_0] b[0; 2_0; 1_0] X[2_0; 1_0]")?)?;
            let obj = ParObject::parse(src)?;
            for k in 0..n {
                let lk = l_power(&obj, k, n, d)?;
                let h = w(&lk.tgt.to_string(), &format!("H[1_{k}; 2_0]"))?;
                total = total.add(&lk.compose(&h)?.compose(&lk.inverse()?)?)?;
            }
            (lhs, total)
        }
        "36" => {
            let src = "((0 1_0) 2_0)";
            let lhs = w(src, "K[(0 1_0); 2_0]")?;
            let mut total =
                w(src, "b[0; 1_0; 2_0] X[1_0; 2_0] b[0; 2_0; 1_0]^-1 K[0; 2_0] b[0; 2_0; 1_0] X[2_0; 1_0] b[0; 1_0; 2_0]^-1")?;
            let obj = ParObject::parse(src)?;
            for k in 0..n {
                let lk = l_power(&obj, k, n, d)?;
                let lkb = lk.compose(&w(&lk.tgt.to_string(), &format!("b[0; 1_{k}; 2_0]"))?)?;
                let h = w(&lkb.tgt.to_string(), &format!("H[1_{k}; 2_0]"))?;
                total = total.add(&lkb.compose(&h)?.compose(&lkb.inverse()?)?)?;
            }
            (lhs, total)
        }
        _ => return Err(Error::Invalid(format!("unknown chord relation tag {tag:?}"))),
    };
    Ok(CdRelationCheck {
        tag: tag.into(),
        source: lhs.src.to_string(),
        target: lhs.tgt.to_string(),
        holds: lhs == rhs,
        lhs: format!("{:?}", lhs.payload.u),
        rhs: format!("{:?}", rhs.payload.u),
    })
}
