//! Truncated universal enveloping algebras in PBW normal form, group-like
//! elements, exp/log, conjugation and substitution.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::graded_lie::{algebra, common_algebra, LieAlgebra, LieElement, LieMorphism, LiePresentation};
use crate::linalg::SparseVec;
use crate::rational::{fmt_q, parse_q, q, Q};
use crate::Error;

/// Non-decreasing sequence of global Lie basis indices.
pub type Monomial = Vec<u32>;

#[derive(Clone)]
pub struct UEAElement {
    pub alg: Arc<LieAlgebra>,
    pub trunc: usize,
    pub terms: BTreeMap<Monomial, Q>,
}

impl fmt::Debug for UEAElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let labels: Vec<String> = m.iter().map(|i| self.alg.basis_label(*i as usize)).collect();
                format!("({c}){}", labels.join("·"))
            })
            .collect();
        write!(f, "{}", if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

impl PartialEq for UEAElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg.id() == other.alg.id() && self.sub(other).is_zero()
    }
}

fn mono_degree(alg: &LieAlgebra, m: &[u32]) -> usize {
    m.iter().map(|i| alg.basis_degree(*i as usize)).sum()
}

/// `m · e` in PBW normal form. The product is homogeneous, so the cache does
/// not depend on truncation.
fn mul_mono_elem(alg: &LieAlgebra, m: &[u32], e: u32) -> Vec<(Monomial, Q)> {
    match m.last() {
        None => return vec![(vec![e], Q::one())],
        Some(&l) if l <= e => {
            let mut v = m.to_vec();
            v.push(e);
            return vec![(v, Q::one())];
        }
        _ => {}
    }
    let key = (m.to_vec(), e);
    if let Some(r) = alg.pbw_cache.lock().unwrap().get(&key) {
        return r.clone();
    }
    let l = *m.last().unwrap();
    let head = &m[..m.len() - 1];
    let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
    for (n, a) in mul_mono_elem(alg, head, e) {
        for (p, b) in mul_mono_elem(alg, &n, l) {
            *acc.entry(p).or_insert_with(Q::zero) += &a * b;
        }
    }
    for (f, c) in alg.bracket_basis(l as usize, e as usize) {
        for (p, b) in mul_mono_elem(alg, head, f as u32) {
            *acc.entry(p).or_insert_with(Q::zero) += &c * b;
        }
    }
    let r: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    alg.pbw_cache.lock().unwrap().insert(key, r.clone());
    r
}

impl UEAElement {
    pub fn zero(alg: &Arc<LieAlgebra>, trunc: usize) -> Self {
        UEAElement { alg: alg.clone(), trunc: trunc.min(alg.max_degree), terms: BTreeMap::new() }
    }

    pub fn one(alg: &Arc<LieAlgebra>, trunc: usize) -> Self {
        let mut u = Self::zero(alg, trunc);
        u.terms.insert(Vec::new(), Q::one());
        u
    }

    pub fn scalar(alg: &Arc<LieAlgebra>, trunc: usize, c: Q) -> Self {
        let mut u = Self::zero(alg, trunc);
        if !c.is_zero() {
            u.terms.insert(Vec::new(), c);
        }
        u
    }

    pub fn from_lie(a: &LieElement) -> Self {
        let mut u = Self::zero(&a.alg, a.trunc);
        for (i, c) in &a.coords {
            u.terms.insert(vec![*i as u32], c.clone());
        }
        u
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant(&self) -> Q {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn truncated(&self, t: usize) -> Self {
        let t = t.min(self.trunc);
        UEAElement {
            alg: self.alg.clone(),
            trunc: t,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| mono_degree(&self.alg, m) <= t)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn degree_part(&self, d: usize) -> Self {
        UEAElement {
            alg: self.alg.clone(),
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| mono_degree(&self.alg, m) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Lowest degree carrying a nonzero term.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| mono_degree(&self.alg, m)).min()
    }

    fn combine(&self, other: &Self, c: &Q) -> Result<Self, Error> {
        let alg = common_algebra(&self.alg, &other.alg)?;
        let t = self.trunc.min(other.trunc);
        let mut out = self.truncated(t);
        out.alg = alg;
        for (m, x) in &other.truncated(t).terms {
            let e = out.terms.entry(m.clone()).or_insert_with(Q::zero);
            *e += c * x;
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &Q::one()).expect("handle mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &-Q::one()).expect("handle mismatch")
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = self.clone();
        if c.is_zero() {
            out.terms.clear();
        } else {
            for v in out.terms.values_mut() {
                *v *= c;
            }
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, Error> {
        let alg = common_algebra(&self.alg, &other.alg)?;
        let t = self.trunc.min(other.trunc);
        let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            let d1 = mono_degree(&alg, m1);
            if d1 > t {
                continue;
            }
            for (m2, c2) in &other.terms {
                if d1 + mono_degree(&alg, m2) > t {
                    continue;
                }
                let mut cur: Vec<(Monomial, Q)> = vec![(m1.clone(), c1 * c2)];
                for e in m2 {
                    let mut next: BTreeMap<Monomial, Q> = BTreeMap::new();
                    for (n, a) in &cur {
                        for (p, b) in mul_mono_elem(&alg, n, *e) {
                            *next.entry(p).or_insert_with(Q::zero) += a * b;
                        }
                    }
                    cur = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                }
                for (p, c) in cur {
                    *acc.entry(p).or_insert_with(Q::zero) += c;
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(UEAElement { alg, trunc: t, terms: acc })
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.multiply(other).expect("handle mismatch")
    }

    /// Inverse of an element with invertible constant term, as a geometric series.
    pub fn inverse(&self) -> Result<Self, Error> {
        let c = self.constant();
        if c.is_zero() {
            return Err(Error::Invalid("element is not invertible".into()));
        }
        let ci = c.recip();
        let x = self.scale(&ci).sub(&Self::one(&self.alg, self.trunc));
        let mut term = Self::one(&self.alg, self.trunc);
        let mut sum = term.clone();
        for _ in 0..self.trunc {
            term = term.mul(&x).scale(&-Q::one());
            sum = sum.add(&term);
        }
        Ok(sum.scale(&ci))
    }

    /// Length-one part as a Lie element.
    pub fn lie_part(&self) -> LieElement {
        let mut out = LieElement::zero(&self.alg);
        out.trunc = self.trunc;
        for (m, c) in &self.terms {
            if m.len() == 1 {
                out.coords.insert(m[0] as usize, c.clone());
            }
        }
        out
    }

    /// Nonzero terms of length other than one.
    pub fn non_lie_terms(&self) -> usize {
        self.terms.keys().filter(|m| m.len() != 1).count()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms.iter().map(|(m, c)| json!([m, fmt_q(c)])).collect();
        json!({"algebra": self.alg.id(), "max_degree": self.alg.max_degree, "trunc": self.trunc, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let bad = |m: &str| Error::Parse(format!("enveloping element: {m}"));
        let id = v["algebra"].as_str().ok_or_else(|| bad("missing algebra"))?;
        let d = v["max_degree"].as_u64().ok_or_else(|| bad("missing max_degree"))? as usize;
        let alg = algebra(LiePresentation::from_id(id)?, d)?;
        let trunc = v["trunc"].as_u64().ok_or_else(|| bad("missing trunc"))? as usize;
        let mut u = Self::zero(&alg, trunc);
        for t in v["terms"].as_array().ok_or_else(|| bad("missing terms"))? {
            let m: Monomial = t[0]
                .as_array()
                .ok_or_else(|| bad("monomial"))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as u32))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("monomial"))?;
            if m.windows(2).any(|w| w[0] > w[1]) || m.iter().any(|i| *i as usize >= alg.dim()) {
                return Err(bad("monomial not in PBW order"));
            }
            if mono_degree(&alg, &m) > trunc {
                return Err(bad("monomial above truncation"));
            }
            let c = parse_q(t[1].as_str().ok_or_else(|| bad("coefficient"))?).ok_or_else(|| bad("coefficient"))?;
            if !c.is_zero() {
                u.terms.insert(m, c);
            }
        }
        Ok(u)
    }
}

/// `exp` of a Lie element, truncated at its truncation degree.
pub fn exp(a: &LieElement) -> GroupLike {
    let x = UEAElement::from_lie(a);
    let mut term = UEAElement::one(&a.alg, a.trunc);
    let mut sum = term.clone();
    for k in 1..=a.trunc {
        term = term.mul(&x).scale(&Q::new(1.into(), (k as i64).into()));
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
    }
    GroupLike(sum)
}

/// `log` of an element with constant term 1; fails unless the result is primitive.
pub fn log(u: &UEAElement) -> Result<LieElement, Error> {
    if !u.constant().is_one() {
        return Err(Error::NotGroupLike("constant term is not 1".into()));
    }
    let x = u.sub(&UEAElement::one(&u.alg, u.trunc));
    let mut term = UEAElement::one(&u.alg, u.trunc);
    let mut sum = UEAElement::zero(&u.alg, u.trunc);
    for k in 1..=u.trunc {
        term = term.mul(&x);
        if term.is_zero() {
            break;
        }
        let c = Q::new(if k % 2 == 1 { 1.into() } else { (-1).into() }, (k as i64).into());
        sum = sum.add(&term.scale(&c));
    }
    if sum.non_lie_terms() > 0 {
        return Err(Error::NotGroupLike(format!("log has {} non-primitive terms", sum.non_lie_terms())));
    }
    Ok(sum.lie_part())
}

/// Point of the prounipotent group `exp(ĝ)`, stored in `U(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupLike(pub UEAElement);

impl GroupLike {
    pub fn one(alg: &Arc<LieAlgebra>, trunc: usize) -> Self {
        GroupLike(UEAElement::one(alg, trunc))
    }

    pub fn new(u: UEAElement) -> Result<Self, Error> {
        log(&u)?;
        Ok(GroupLike(u))
    }

    pub fn alg(&self) -> &Arc<LieAlgebra> {
        &self.0.alg
    }

    pub fn trunc(&self) -> usize {
        self.0.trunc
    }

    pub fn log(&self) -> LieElement {
        log(&self.0).expect("group-like")
    }

    pub fn mul(&self, other: &Self) -> Self {
        GroupLike(self.0.mul(&other.0))
    }

    pub fn inv(&self) -> Self {
        exp(&self.log().neg())
    }

    /// `g^λ = exp(λ log g)`.
    pub fn pow(&self, lambda: &Q) -> Self {
        exp(&self.log().scale(lambda))
    }

    pub fn truncated(&self, t: usize) -> Self {
        GroupLike(self.0.truncated(t))
    }

    pub fn is_one(&self) -> bool {
        self.0.sub(&UEAElement::one(&self.0.alg, self.0.trunc)).is_zero()
    }

    /// `Ad(g)(a) = g a g^{-1}` on enveloping elements.
    pub fn ad(&self, a: &UEAElement) -> UEAElement {
        self.0.mul(a).mul(&self.inv().0)
    }

    /// `Ad(g)` on Lie elements, as `exp(ad log g)`.
    pub fn ad_lie(&self, a: &LieElement) -> LieElement {
        let l = self.log();
        let t = a.trunc.min(l.trunc);
        let mut term = a.truncated(t);
        let mut sum = term.clone();
        for k in 1..=t {
            term = l.br(&term).scale(&Q::new(1.into(), (k as i64).into()));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
        }
        sum
    }

    /// Lowest degree in which `self` differs from `other`.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        self.0.sub(&other.0).min_degree()
    }

    pub fn to_json(&self) -> Value {
        self.0.to_json()
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        Self::new(UEAElement::from_json(v)?)
    }
}

pub fn multiply_all(items: &[&GroupLike]) -> GroupLike {
    let mut it = items.iter();
    let first = (*it.next().expect("nonempty product")).clone();
    it.fold(first, |a, b| a.mul(b))
}

/// Applies a Lie morphism to a group-like by substituting into its logarithm.
pub fn map_group(m: &LieMorphism, g: &GroupLike) -> Result<GroupLike, Error> {
    Ok(exp(&m.apply(&g.log())?))
}

/// Applies a Lie morphism multiplicatively to an enveloping element.
pub fn map_uea(m: &LieMorphism, u: &UEAElement) -> Result<UEAElement, Error> {
    if u.alg.id() != m.source.id() {
        return Err(Error::HandleMismatch(u.alg.id().to_string(), m.source.id().to_string()));
    }
    let t = u.trunc.min(m.target.max_degree);
    let mut images: BTreeMap<u32, UEAElement> = BTreeMap::new();
    let mut out = UEAElement::zero(&m.target, t);
    for (mono, c) in &u.terms {
        let mut prod = UEAElement::scalar(&m.target, t, c.clone());
        for e in mono {
            let img = images
                .entry(*e)
                .or_insert_with(|| {
                    let mut b = LieElement::basis(&u.alg, *e as usize);
                    b.trunc = t;
                    UEAElement::from_lie(&m.apply(&b).unwrap())
                })
                .clone();
            prod = prod.mul(&img);
        }
        out = out.add(&prod);
    }
    Ok(out)
}

/// Substitutes Lie elements for the generators of a free algebra in `log f`.
pub fn lie_substitute(f: &GroupLike, args: &[LieElement]) -> Result<GroupLike, Error> {
    let src = f.alg();
    if !src.is_relation_free() {
        return Err(Error::Invalid(format!("{} is not free", src.id())));
    }
    if args.len() != src.presentation.generators.len() {
        return Err(Error::Invalid(format!(
            "expected {} arguments, got {}",
            src.presentation.generators.len(),
            args.len()
        )));
    }
    let Some(first) = args.first() else {
        return Err(Error::Invalid("no arguments".into()));
    };
    let target = first.alg.clone();
    let t = args.iter().map(|a| a.trunc).min().unwrap().min(f.trunc());
    let m = LieMorphism::new_unchecked(src, &target, args.iter().map(|a| a.truncated(t)).collect())?;
    let mut l = f.log();
    l = l.truncated(t);
    Ok(exp(&m.apply(&l)?))
}

/// `f(g_1, …, g_k)` for group-like arguments: `exp(ℓ(log g_1, …))` with `ℓ = log f`.
pub fn group_substitute(f: &GroupLike, args: &[GroupLike]) -> Result<GroupLike, Error> {
    let logs: Vec<LieElement> = args.iter().map(|g| g.log()).collect();
    lie_substitute(f, &logs)
}

/// Image of `g ∈ exp(f_{N+1})` (generators `X, y0, …`) in `exp(f_2)` under
/// `X ↦ x^N`, `y(a) ↦ x^a y x^{-a}`.
pub fn kernel_embed_phi_n(g: &GroupLike, f2: &Arc<LieAlgebra>) -> Result<GroupLike, Error> {
    let n = g.alg().presentation.generators.len() as i64 - 1;
    let x = LieElement::gen(f2, "x");
    let y = LieElement::gen(f2, "y");
    let mut args = vec![x.scale(&q(n))];
    for a in 0..n {
        args.push(exp(&x.scale(&q(a))).ad_lie(&y));
    }
    lie_substitute(g, &args)
}

/// Number of PBW monomials of each total degree `0..=d`.
pub fn pbw_dimensions(alg: &LieAlgebra, d: usize) -> Vec<usize> {
    let mut counts = vec![0usize; d + 1];
    counts[0] = 1;
    for i in 0..alg.dim() {
        let di = alg.basis_degree(i);
        if di > d {
            continue;
        }
        for total in di..=d {
            counts[total] += counts[total - di];
        }
    }
    counts
}

/// Lie element with coordinates `p/q`, `|p| ≤ 3`, `q ∈ 1..=3`, on every basis
/// vector of degree `lo..=hi` (clipped to `trunc`), each present with probability 1/2.
pub fn random_lie<R: Rng + ?Sized>(alg: &Arc<LieAlgebra>, trunc: usize, lo: usize, hi: usize, rng: &mut R) -> LieElement {
    let mut e = LieElement::zero(alg).truncated(trunc);
    for d in lo.max(1)..=hi.min(trunc).min(alg.max_degree) {
        for i in alg.degree_range(d) {
            if rng.gen_bool(0.5) {
                let c = Q::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into());
                if !c.is_zero() {
                    e.coords.insert(i, c);
                }
            }
        }
    }
    e
}

/// `exp` of [`random_lie`].
pub fn random_group_like<R: Rng + ?Sized>(alg: &Arc<LieAlgebra>, trunc: usize, lo: usize, hi: usize, rng: &mut R) -> GroupLike {
    exp(&random_lie(alg, trunc, lo, hi, rng))
}

pub fn sparse_from(u: &UEAElement) -> SparseVec {
    let mut v = SparseVec::new();
    let mut keys: Vec<&Monomial> = u.terms.keys().collect();
    keys.sort();
    for (i, k) in keys.into_iter().enumerate() {
        v.insert(i, u.terms[k].clone());
    }
    v
}
