//! Graded Lie algebras given by degree-one generators and homogeneous relations:
//! free Lie algebras, the infinitesimal braid algebras `t_I` and their cyclotomic
//! versions `t_I^Γ`, with moperadic insertions and the Γ-action.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::linalg::{add_scaled, Echelon, SparseVec};
use crate::lyndon::FreeLie;
use crate::rational::{fmt_q, parse_q, q, Q};
use crate::Error;

/// Strand names. The name 0 is reserved for the frozen strand.
pub type Strand = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorSymbol {
    /// `t_{0i}`
    T0(Strand),
    /// `t^α_{ij}` with `i < j`; the classical `t_{ij}` is `α = 0`, `N = 1`.
    T(Strand, Strand, u32),
    Free(String),
}

impl GeneratorSymbol {
    /// Canonical `t^α_{ij}`, using `t^α_{ij} = t^{-α}_{ji}`.
    pub fn t(i: Strand, j: Strand, alpha: i64, n: u32) -> Result<Self, Error> {
        if i == j || i == 0 || j == 0 {
            return Err(Error::Invalid(format!("t^{alpha}_{{{i}{j}}} is not a generator")));
        }
        let n = n as i64;
        if i < j {
            Ok(GeneratorSymbol::T(i, j, alpha.rem_euclid(n) as u32))
        } else {
            Ok(GeneratorSymbol::T(j, i, (-alpha).rem_euclid(n) as u32))
        }
    }

    pub fn name(&self) -> String {
        match self {
            GeneratorSymbol::T0(i) => format!("t0.{i}"),
            GeneratorSymbol::T(i, j, a) => format!("t.{i}.{j}.{a}"),
            GeneratorSymbol::Free(s) => s.clone(),
        }
    }

    pub fn parse(s: &str) -> Self {
        let parts: Vec<&str> = s.split('.').collect();
        match parts.as_slice() {
            ["t0", i] => match i.parse() {
                Ok(i) => GeneratorSymbol::T0(i),
                Err(_) => GeneratorSymbol::Free(s.to_string()),
            },
            ["t", i, j, a] => match (i.parse(), j.parse(), a.parse()) {
                (Ok(i), Ok(j), Ok(a)) if i < j => GeneratorSymbol::T(i, j, a),
                _ => GeneratorSymbol::Free(s.to_string()),
            },
            _ => GeneratorSymbol::Free(s.to_string()),
        }
    }
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Formal Lie expression in the generators of a presentation.
#[derive(Clone, Debug)]
pub enum LieExpr {
    Gen(GeneratorSymbol),
    Sum(Vec<(Q, LieExpr)>),
    Bracket(Box<LieExpr>, Box<LieExpr>),
}

impl LieExpr {
    pub fn gen(s: GeneratorSymbol) -> Self {
        LieExpr::Gen(s)
    }

    pub fn sum(terms: impl IntoIterator<Item = LieExpr>) -> Self {
        LieExpr::Sum(terms.into_iter().map(|t| (Q::one(), t)).collect())
    }

    pub fn br(a: LieExpr, b: LieExpr) -> Self {
        LieExpr::Bracket(Box::new(a), Box::new(b))
    }

    /// Degree if homogeneous.
    pub fn degree(&self) -> Option<usize> {
        match self {
            LieExpr::Gen(_) => Some(1),
            LieExpr::Sum(ts) => {
                let ds: BTreeSet<_> = ts.iter().map(|(_, t)| t.degree()).collect();
                if ds.len() == 1 {
                    *ds.iter().next().unwrap()
                } else {
                    None
                }
            }
            LieExpr::Bracket(a, b) => Some(a.degree()? + b.degree()?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Free,
    /// `t_I` on the given strand names.
    Classical(Vec<Strand>),
    /// `t_I^Γ` on the given non-frozen strand names.
    Cyclotomic(Vec<Strand>, u32),
    Custom(String),
}

type BracketTable = HashMap<(usize, usize), Vec<(usize, Q)>>;
pub(crate) type PbwTable = HashMap<(Vec<u32>, u32), Vec<(Vec<u32>, Q)>>;

#[derive(Clone, Debug)]
pub struct LiePresentation {
    pub family: Family,
    pub generators: Vec<GeneratorSymbol>,
    pub relations: Vec<LieExpr>,
    pub gamma_modulus: u32,
}

fn t_expr(i: Strand, j: Strand, a: i64, n: u32) -> LieExpr {
    LieExpr::Gen(GeneratorSymbol::t(i, j, a, n).unwrap())
}

impl LiePresentation {
    pub fn free(generators: Vec<GeneratorSymbol>) -> Self {
        let labels = generators.iter().filter(|g| matches!(g, GeneratorSymbol::T(1, 2, _))).count() as u32;
        LiePresentation { family: Family::Free, generators, relations: Vec::new(), gamma_modulus: labels.max(1) }
    }

    pub fn free_named(names: &[&str]) -> Self {
        Self::free(names.iter().map(|s| GeneratorSymbol::Free(s.to_string())).collect())
    }

    /// `t_I`: `[t_ij, t_kl] = 0` for disjoint pairs, `[t_ij, t_ik + t_jk] = 0`.
    pub fn classical(strands: &[Strand]) -> Self {
        let mut s = strands.to_vec();
        s.sort_unstable();
        s.dedup();
        let mut generators = Vec::new();
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                generators.push(GeneratorSymbol::T(i, j, 0));
            }
        }
        let mut relations = Vec::new();
        for (x, g) in generators.iter().enumerate() {
            for h in &generators[x + 1..] {
                if let (GeneratorSymbol::T(i, j, _), GeneratorSymbol::T(k, l, _)) = (g, h) {
                    if i != k && i != l && j != k && j != l {
                        relations.push(LieExpr::br(LieExpr::Gen(g.clone()), LieExpr::Gen(h.clone())));
                    }
                }
            }
        }
        for &i in &s {
            for &j in &s {
                for &k in &s {
                    if i != j && j != k && i != k {
                        relations.push(LieExpr::br(
                            t_expr(i, j, 0, 1),
                            LieExpr::sum([t_expr(i, k, 0, 1), t_expr(j, k, 0, 1)]),
                        ));
                    }
                }
            }
        }
        LiePresentation { family: Family::Classical(s), generators, relations, gamma_modulus: 1 }
    }

    /// `t_I^Γ` with `Γ = Z/N`, relations (tL), (t4T), (t4T̄), (t6T̄); (tS) is
    /// built into the generator normalisation.
    pub fn cyclotomic(strands: &[Strand], n: u32) -> Self {
        assert!(n >= 1);
        let mut s = strands.to_vec();
        s.sort_unstable();
        s.dedup();
        assert!(!s.contains(&0), "0 is the frozen strand");
        let mut generators: Vec<GeneratorSymbol> = s.iter().map(|&i| GeneratorSymbol::T0(i)).collect();
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                for al in 0..n {
                    generators.push(GeneratorSymbol::T(i, j, al));
                }
            }
        }
        let ni = n as i64;
        let mut relations = Vec::new();
        let g = |x: GeneratorSymbol| LieExpr::Gen(x);
        // (tL)
        for &i in &s {
            for (a, &j) in s.iter().enumerate() {
                for &k in &s[a + 1..] {
                    if i != j && i != k {
                        for al in 0..n {
                            relations.push(LieExpr::br(g(GeneratorSymbol::T0(i)), g(GeneratorSymbol::T(j, k, al))));
                        }
                    }
                }
            }
        }
        let pairs: Vec<(Strand, Strand)> =
            s.iter().enumerate().flat_map(|(a, &i)| s[a + 1..].iter().map(move |&j| (i, j))).collect();
        for (x, &(i, j)) in pairs.iter().enumerate() {
            for &(k, l) in &pairs[x + 1..] {
                if i != k && i != l && j != k && j != l {
                    for al in 0..n {
                        for be in 0..n {
                            relations.push(LieExpr::br(
                                g(GeneratorSymbol::T(i, j, al)),
                                g(GeneratorSymbol::T(k, l, be)),
                            ));
                        }
                    }
                }
            }
        }
        // (t4T)
        for &i in &s {
            for &j in &s {
                for &k in &s {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    for al in 0..ni {
                        for be in 0..ni {
                            relations.push(LieExpr::br(
                                t_expr(i, j, al, n),
                                LieExpr::sum([t_expr(i, k, al + be, n), t_expr(j, k, be, n)]),
                            ));
                        }
                    }
                }
            }
        }
        // (t4T̄) and (t6T̄)
        for &i in &s {
            for &j in &s {
                if i == j {
                    continue;
                }
                let sum_ij = |extra: Vec<LieExpr>| {
                    let mut v = extra;
                    v.extend((0..ni).map(|al| t_expr(i, j, al, n)));
                    LieExpr::sum(v)
                };
                relations.push(LieExpr::br(g(GeneratorSymbol::T0(i)), sum_ij(vec![g(GeneratorSymbol::T0(j))])));
                for al in 0..ni {
                    relations.push(LieExpr::br(
                        sum_ij(vec![g(GeneratorSymbol::T0(i)), g(GeneratorSymbol::T0(j))]),
                        t_expr(i, j, al, n),
                    ));
                }
            }
        }
        LiePresentation { family: Family::Cyclotomic(s, n), generators, relations, gamma_modulus: n }
    }

    /// Stable identifier, also used for JSON round trips.
    pub fn id(&self) -> String {
        let join = |v: &[Strand]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        match &self.family {
            Family::Free => format!(
                "free:{}",
                self.generators.iter().map(|g| g.name()).collect::<Vec<_>>().join(",")
            ),
            Family::Classical(s) => format!("t:{}", join(s)),
            Family::Cyclotomic(s, n) => format!("tgamma:{n}:{}", join(s)),
            Family::Custom(name) => format!("custom:{name}"),
        }
    }

    pub fn from_id(id: &str) -> Result<Self, Error> {
        let bad = || Error::Invalid(format!("unknown algebra id {id:?}"));
        let strands = |s: &str| -> Result<Vec<Strand>, Error> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',').map(|x| x.parse().map_err(|_| bad())).collect()
        };
        if let Some(rest) = id.strip_prefix("free:") {
            let gens = rest.split(',').filter(|s| !s.is_empty()).map(GeneratorSymbol::parse).collect();
            Ok(Self::free(gens))
        } else if let Some(rest) = id.strip_prefix("t:") {
            Ok(Self::classical(&strands(rest)?))
        } else if let Some(rest) = id.strip_prefix("tgamma:") {
            let (n, s) = rest.split_once(':').ok_or_else(bad)?;
            Ok(Self::cyclotomic(&strands(s)?, n.parse().map_err(|_| bad())?))
        } else {
            Err(bad())
        }
    }

    pub fn strands(&self) -> Vec<Strand> {
        match &self.family {
            Family::Classical(s) | Family::Cyclotomic(s, _) => s.clone(),
            _ => Vec::new(),
        }
    }
}

/// A presented graded Lie algebra truncated at `max_degree`.
pub struct LieAlgebra {
    pub presentation: LiePresentation,
    pub max_degree: usize,
    id: String,
    free: FreeLie,
    gen_index: HashMap<GeneratorSymbol, usize>,
    ideal: Vec<Echelon>,
    basis: Vec<usize>,
    offsets: Vec<usize>,
    quotient_index: HashMap<usize, usize>,
    structure: Mutex<BracketTable>,
    pub(crate) pbw_cache: Mutex<PbwTable>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieAlgebra({}, D={}, dims={:?})", self.id, self.max_degree, self.dims())
    }
}

impl LieAlgebra {
    pub fn build(presentation: LiePresentation, max_degree: usize) -> Result<Self, Error> {
        if max_degree == 0 {
            return Err(Error::Invalid("max degree must be positive".into()));
        }
        let k = presentation.generators.len();
        if k > 250 {
            return Err(Error::Invalid("too many generators".into()));
        }
        let mut gen_index = HashMap::new();
        for (i, g) in presentation.generators.iter().enumerate() {
            if gen_index.insert(g.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate generator {g}")));
            }
        }
        let free = FreeLie::new(k, max_degree);
        let mut by_degree: BTreeMap<usize, Vec<SparseVec>> = BTreeMap::new();
        for r in &presentation.relations {
            let d = r
                .degree()
                .ok_or_else(|| Error::Invalid("inhomogeneous relation".into()))?;
            if d < 2 {
                return Err(Error::Invalid("relations must have degree at least 2".into()));
            }
            if d <= max_degree {
                by_degree.entry(d).or_default().push(eval_free(&free, &gen_index, r)?);
            }
        }
        let mut ideal = vec![Echelon::new(), Echelon::new()];
        for d in 2..=max_degree {
            let mut e = Echelon::new();
            for v in by_degree.remove(&d).unwrap_or_default() {
                e.insert(v);
            }
            for row in ideal[d - 1].rows() {
                for g in 0..k {
                    let gv: SparseVec = [(g, Q::one())].into_iter().collect();
                    e.insert(free.bracket(&gv, row));
                }
            }
            ideal.push(e);
        }
        let mut basis = Vec::new();
        let mut offsets = vec![0, 0];
        for d in 1..=max_degree {
            for i in free.degree_range(d) {
                if !ideal[d].is_pivot(i) {
                    basis.push(i);
                }
            }
            offsets.push(basis.len());
        }
        let quotient_index = basis.iter().enumerate().map(|(q, f)| (*f, q)).collect();
        let id = presentation.id();
        Ok(LieAlgebra {
            presentation,
            max_degree,
            id,
            free,
            gen_index,
            ideal,
            basis,
            offsets,
            quotient_index,
            structure: Mutex::new(HashMap::new()),
            pbw_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dims(&self) -> Vec<usize> {
        (1..=self.max_degree).map(|d| self.offsets[d + 1] - self.offsets[d]).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Global basis indices of degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        if d == 0 || d > self.max_degree {
            return 0..0;
        }
        self.offsets[d]..self.offsets[d + 1]
    }

    pub fn basis_degree(&self, i: usize) -> usize {
        self.free.degree(self.basis[i])
    }

    pub fn free(&self) -> &FreeLie {
        &self.free
    }

    /// Free-Lie (Lyndon) index of a quotient basis element.
    pub fn basis_word(&self, i: usize) -> usize {
        self.basis[i]
    }

    pub fn generator_index(&self, g: &GeneratorSymbol) -> Option<usize> {
        self.gen_index.get(g).copied()
    }

    /// Human-readable bracket form of a basis element.
    pub fn basis_label(&self, i: usize) -> String {
        self.free_label(self.basis[i])
    }

    fn free_label(&self, w: usize) -> String {
        match self.free.factor(w) {
            None => self.presentation.generators[self.free.word(w)[0] as usize].name(),
            Some((u, v)) => format!("[{},{}]", self.free_label(u), self.free_label(v)),
        }
    }

    /// Projects a free-Lie vector onto the quotient basis.
    pub fn project(&self, v: &SparseVec) -> SparseVec {
        let mut by_deg: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (i, c) in v {
            let d = self.free.degree(*i);
            if d <= self.max_degree {
                by_deg.entry(d).or_default().insert(*i, c.clone());
            }
        }
        let mut out = SparseVec::new();
        for (d, mut w) in by_deg {
            self.ideal[d].reduce(&mut w);
            for (i, c) in w {
                out.insert(self.quotient_index[&i], c);
            }
        }
        out
    }

    /// Bracket of two quotient basis elements.
    pub fn bracket_basis(&self, a: usize, b: usize) -> Vec<(usize, Q)> {
        if a == b || self.basis_degree(a) + self.basis_degree(b) > self.max_degree {
            return Vec::new();
        }
        if a > b {
            return self.bracket_basis(b, a).into_iter().map(|(i, c)| (i, -c)).collect();
        }
        if let Some(r) = self.structure.lock().unwrap().get(&(a, b)) {
            return r.clone();
        }
        let raw: SparseVec = self
            .free
            .bracket_basis(self.basis[a], self.basis[b])
            .into_iter()
            .map(|(i, c)| (i, q(c)))
            .collect();
        let r: Vec<(usize, Q)> = self.project(&raw).into_iter().collect();
        self.structure.lock().unwrap().insert((a, b), r.clone());
        r
    }

    pub fn is_relation_free(&self) -> bool {
        self.presentation.relations.is_empty()
    }
}

fn eval_free(free: &FreeLie, gen_index: &HashMap<GeneratorSymbol, usize>, e: &LieExpr) -> Result<SparseVec, Error> {
    Ok(match e {
        LieExpr::Gen(g) => {
            let i = gen_index.get(g).ok_or_else(|| Error::Invalid(format!("unknown generator {g}")))?;
            [(*i, Q::one())].into_iter().collect()
        }
        LieExpr::Sum(ts) => {
            let mut out = SparseVec::new();
            for (c, t) in ts {
                add_scaled(&mut out, c, &eval_free(free, gen_index, t)?);
            }
            out
        }
        LieExpr::Bracket(a, b) => free.bracket(&eval_free(free, gen_index, a)?, &eval_free(free, gen_index, b)?),
    })
}

type Registry = Mutex<HashMap<(String, usize), Arc<LieAlgebra>>>;

static REGISTRY: OnceLock<Registry> = OnceLock::new();

/// Builds (or fetches from the process-wide cache) the algebra of a presentation.
pub fn algebra(presentation: LiePresentation, max_degree: usize) -> Result<Arc<LieAlgebra>, Error> {
    let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (presentation.id(), max_degree);
    let cacheable = !matches!(presentation.family, Family::Custom(_));
    if cacheable {
        if let Some(a) = reg.lock().unwrap().get(&key) {
            return Ok(a.clone());
        }
    }
    let a = Arc::new(LieAlgebra::build(presentation, max_degree)?);
    if cacheable {
        reg.lock().unwrap().entry(key).or_insert_with(|| a.clone());
    }
    Ok(a)
}

pub fn free_algebra(names: &[&str], d: usize) -> Arc<LieAlgebra> {
    algebra(LiePresentation::free_named(names), d).expect("free algebra")
}

pub fn t_algebra(strands: &[Strand], d: usize) -> Arc<LieAlgebra> {
    algebra(LiePresentation::classical(strands), d).expect("t algebra")
}

pub fn tgamma_algebra(strands: &[Strand], n: u32, d: usize) -> Arc<LieAlgebra> {
    algebra(LiePresentation::cyclotomic(strands, n), d).expect("t^Γ algebra")
}

/// `t̄_2^Γ ≅ f_{N+1}` on `t_{01}, t^0_{12}, …, t^{N-1}_{12}`.
pub fn tbar2_algebra(n: u32, d: usize) -> Arc<LieAlgebra> {
    let mut gens = vec![GeneratorSymbol::T0(1)];
    gens.extend((0..n).map(|a| GeneratorSymbol::T(1, 2, a)));
    algebra(LiePresentation::free(gens), d).expect("free algebra")
}

/// `f_{N+1}` on `X, y0, …, y{N-1}` (the kernel of `F_2 → Z/N`).
pub fn kernel_algebra(n: u32, d: usize) -> Arc<LieAlgebra> {
    let mut names = vec!["X".to_string()];
    names.extend((0..n).map(|a| format!("y{a}")));
    algebra(LiePresentation::free(names.into_iter().map(GeneratorSymbol::Free).collect()), d).expect("free algebra")
}

#[derive(Clone)]
pub struct LieElement {
    pub alg: Arc<LieAlgebra>,
    pub trunc: usize,
    pub coords: SparseVec,
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.coords.iter().map(|(i, c)| format!("({}){}", c, self.alg.basis_label(*i))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl PartialEq for LieElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg.id() == other.alg.id() && {
            let t = self.trunc.min(other.trunc);
            self.truncated(t).coords == other.truncated(t).coords
        }
    }
}

/// Checks two handles are compatible and returns the one with the smaller cap.
pub fn common_algebra(a: &Arc<LieAlgebra>, b: &Arc<LieAlgebra>) -> Result<Arc<LieAlgebra>, Error> {
    if a.id() != b.id() {
        return Err(Error::HandleMismatch(a.id().to_string(), b.id().to_string()));
    }
    Ok(if a.max_degree <= b.max_degree { a.clone() } else { b.clone() })
}

impl LieElement {
    pub fn zero(alg: &Arc<LieAlgebra>) -> Self {
        LieElement { alg: alg.clone(), trunc: alg.max_degree, coords: SparseVec::new() }
    }

    pub fn basis(alg: &Arc<LieAlgebra>, i: usize) -> Self {
        let mut e = Self::zero(alg);
        e.coords.insert(i, Q::one());
        e
    }

    pub fn from_free(alg: &Arc<LieAlgebra>, v: &SparseVec) -> Self {
        LieElement { alg: alg.clone(), trunc: alg.max_degree, coords: alg.project(v) }
    }

    pub fn generator(alg: &Arc<LieAlgebra>, g: &GeneratorSymbol) -> Result<Self, Error> {
        let i = alg
            .generator_index(g)
            .ok_or_else(|| Error::Invalid(format!("{g} is not a generator of {}", alg.id())))?;
        let v: SparseVec = [(i, Q::one())].into_iter().collect();
        Ok(Self::from_free(alg, &v))
    }

    /// `t0.i` / `t.i.j.a` / free name, canonicalised.
    pub fn gen(alg: &Arc<LieAlgebra>, name: &str) -> Self {
        Self::generator(alg, &GeneratorSymbol::parse(name)).unwrap()
    }

    /// `t^α_{ij}` in any orientation.
    pub fn t(alg: &Arc<LieAlgebra>, i: Strand, j: Strand, alpha: i64) -> Self {
        let g = GeneratorSymbol::t(i, j, alpha, alg.presentation.gamma_modulus).unwrap();
        Self::generator(alg, &g).unwrap()
    }

    pub fn t0(alg: &Arc<LieAlgebra>, i: Strand) -> Self {
        Self::generator(alg, &GeneratorSymbol::T0(i)).unwrap()
    }

    pub fn from_expr(alg: &Arc<LieAlgebra>, e: &LieExpr) -> Result<Self, Error> {
        Ok(Self::from_free(alg, &eval_free(&alg.free, &alg.gen_index, e)?))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn truncated(&self, t: usize) -> Self {
        let t = t.min(self.trunc);
        let range_end = if t == 0 { 0 } else { self.alg.offsets[t.min(self.alg.max_degree) + 1] };
        LieElement {
            alg: self.alg.clone(),
            trunc: t,
            coords: self.coords.range(..range_end).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    pub fn degree_part(&self, d: usize) -> Self {
        let r = self.alg.degree_range(d);
        LieElement {
            alg: self.alg.clone(),
            trunc: self.trunc,
            coords: self.coords.range(r).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// Lowest degree with a nonzero coordinate.
    pub fn min_degree(&self) -> Option<usize> {
        self.coords.keys().next().map(|i| self.alg.basis_degree(*i))
    }

    fn combine(&self, other: &Self, c: &Q) -> Result<Self, Error> {
        let alg = common_algebra(&self.alg, &other.alg)?;
        let t = self.trunc.min(other.trunc);
        let mut out = self.truncated(t);
        out.alg = alg;
        add_scaled(&mut out.coords, c, &other.truncated(t).coords);
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &Q::one()).expect("handle mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &-Q::one()).expect("handle mismatch")
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, Error> {
        self.combine(other, &Q::one())
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = self.clone();
        if c.is_zero() {
            out.coords.clear();
        } else {
            for v in out.coords.values_mut() {
                *v *= c;
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn bracket(&self, other: &Self) -> Result<Self, Error> {
        let alg = common_algebra(&self.alg, &other.alg)?;
        let t = self.trunc.min(other.trunc);
        let mut out = SparseVec::new();
        for (a, ca) in &self.coords {
            let da = alg.basis_degree(*a);
            for (b, cb) in &other.coords {
                if da + alg.basis_degree(*b) > t {
                    continue;
                }
                let c = ca * cb;
                for (i, ci) in alg.bracket_basis(*a, *b) {
                    let e = out.entry(i).or_insert_with(Q::zero);
                    *e += &c * ci;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(LieElement { alg, trunc: t, coords: out })
    }

    pub fn br(&self, other: &Self) -> Self {
        self.bracket(other).expect("handle mismatch")
    }

    /// Coordinates as `degree → [(position within degree, coefficient)]`.
    pub fn by_degree(&self) -> BTreeMap<usize, Vec<(usize, Q)>> {
        let mut out: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
        for (i, c) in &self.coords {
            let d = self.alg.basis_degree(*i);
            out.entry(d).or_default().push((i - self.alg.offsets[d], c.clone()));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let coords: serde_json::Map<String, Value> = self
            .by_degree()
            .into_iter()
            .map(|(d, v)| (d.to_string(), Value::Array(v.iter().map(|(i, c)| json!([i, fmt_q(c)])).collect())))
            .collect();
        json!({"algebra": self.alg.id(), "max_degree": self.alg.max_degree, "trunc": self.trunc, "coords": coords})
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let bad = |m: &str| Error::Parse(format!("lie element: {m}"));
        let id = v["algebra"].as_str().ok_or_else(|| bad("missing algebra"))?;
        let d = v["max_degree"].as_u64().ok_or_else(|| bad("missing max_degree"))? as usize;
        let alg = algebra(LiePresentation::from_id(id)?, d)?;
        let mut e = Self::zero(&alg);
        e.trunc = v["trunc"].as_u64().map(|t| t as usize).unwrap_or(d).min(d);
        let coords = v["coords"].as_object().ok_or_else(|| bad("missing coords"))?;
        for (deg, entries) in coords {
            let deg: usize = deg.parse().map_err(|_| bad("degree"))?;
            let range = alg.degree_range(deg);
            for ent in entries.as_array().ok_or_else(|| bad("entries"))? {
                let i = ent[0].as_u64().ok_or_else(|| bad("index"))? as usize;
                let c = parse_q(ent[1].as_str().ok_or_else(|| bad("coefficient"))?).ok_or_else(|| bad("coefficient"))?;
                if range.start + i >= range.end {
                    return Err(bad("index out of range"));
                }
                if !c.is_zero() {
                    e.coords.insert(range.start + i, c);
                }
            }
        }
        Ok(e)
    }
}

/// A Lie algebra morphism given by the images of the generators of a source
/// presentation. Images may be inhomogeneous.
pub struct LieMorphism {
    pub source: Arc<LieAlgebra>,
    pub target: Arc<LieAlgebra>,
    pub images: Vec<LieElement>,
    memo: Mutex<HashMap<usize, LieElement>>,
}

impl LieMorphism {
    /// Builds the morphism and checks that every relation maps to zero.
    pub fn new(source: &Arc<LieAlgebra>, target: &Arc<LieAlgebra>, images: Vec<LieElement>) -> Result<Self, Error> {
        let m = Self::new_unchecked(source, target, images)?;
        for (ri, r) in source.presentation.relations.iter().enumerate() {
            let v = eval_free(&source.free, &source.gen_index, r)?;
            let img = m.apply_free(&v);
            if !img.is_zero() {
                return Err(Error::RelationNotPreserved(format!("relation #{ri} maps to {img}")));
            }
        }
        Ok(m)
    }

    pub fn new_unchecked(
        source: &Arc<LieAlgebra>,
        target: &Arc<LieAlgebra>,
        images: Vec<LieElement>,
    ) -> Result<Self, Error> {
        if images.len() != source.presentation.generators.len() {
            return Err(Error::Invalid("wrong number of generator images".into()));
        }
        let target_trunc = target.max_degree;
        let mut imgs = Vec::new();
        for im in images {
            let alg = common_algebra(target, &im.alg)?;
            let mut im = im.truncated(target_trunc);
            im.alg = alg;
            imgs.push(im);
        }
        let target = if let Some(im) = imgs.first() { im.alg.clone() } else { target.clone() };
        Ok(LieMorphism { source: source.clone(), target, images: imgs, memo: Mutex::new(HashMap::new()) })
    }

    /// Morphism given by a function on generator symbols.
    pub fn from_fn(
        source: &Arc<LieAlgebra>,
        target: &Arc<LieAlgebra>,
        f: impl Fn(&GeneratorSymbol) -> LieElement,
    ) -> Result<Self, Error> {
        let images = source.presentation.generators.iter().map(f).collect();
        Self::new(source, target, images)
    }

    fn image_of_word(&self, w: usize) -> LieElement {
        if let Some(e) = self.memo.lock().unwrap().get(&w) {
            return e.clone();
        }
        let free = self.source.free();
        let img = match free.factor(w) {
            None => self.images[free.word(w)[0] as usize].clone(),
            Some((u, v)) => {
                let a = self.image_of_word(u);
                let b = self.image_of_word(v);
                a.br(&b)
            }
        };
        self.memo.lock().unwrap().insert(w, img.clone());
        img
    }

    fn apply_free(&self, v: &SparseVec) -> LieElement {
        let mut out = LieElement::zero(&self.target);
        for (w, c) in v {
            if self.source.free().degree(*w) > self.target.max_degree {
                continue;
            }
            out = out.add(&self.image_of_word(*w).scale(c));
        }
        out
    }

    pub fn apply(&self, a: &LieElement) -> Result<LieElement, Error> {
        if a.alg.id() != self.source.id() {
            return Err(Error::HandleMismatch(a.alg.id().to_string(), self.source.id().to_string()));
        }
        let mut out = LieElement::zero(&self.target);
        for (i, c) in &a.coords {
            if a.alg.basis_degree(*i) > out.trunc {
                continue;
            }
            out = out.add(&self.image_of_word(a.alg.basis_word(*i)).scale(c));
        }
        Ok(out.truncated(a.trunc))
    }
}

/// Element of `Γ^I`, `Γ = Z/N`, indexed by strand names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GammaVector {
    pub modulus: u32,
    pub comps: BTreeMap<Strand, u32>,
}

impl GammaVector {
    pub fn zero(modulus: u32, strands: &[Strand]) -> Self {
        GammaVector { modulus, comps: strands.iter().map(|s| (*s, 0)).collect() }
    }

    pub fn new(modulus: u32, comps: impl IntoIterator<Item = (Strand, i64)>) -> Self {
        GammaVector {
            modulus,
            comps: comps.into_iter().map(|(s, c)| (s, c.rem_euclid(modulus as i64) as u32)).collect(),
        }
    }

    pub fn get(&self, s: Strand) -> u32 {
        self.comps.get(&s).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let keys: BTreeSet<Strand> = self.comps.keys().chain(other.comps.keys()).copied().collect();
        GammaVector {
            modulus: self.modulus,
            comps: keys.into_iter().map(|k| (k, (self.get(k) + other.get(k)) % self.modulus)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        GammaVector {
            modulus: self.modulus,
            comps: self.comps.iter().map(|(k, v)| (*k, (self.modulus - v) % self.modulus)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|v| *v == 0)
    }
}

fn sum(alg: &Arc<LieAlgebra>, terms: impl IntoIterator<Item = LieElement>) -> LieElement {
    terms.into_iter().fold(LieElement::zero(alg), |a, b| a.add(&b))
}

fn cyclotomic_data(alg: &Arc<LieAlgebra>) -> Result<(Vec<Strand>, u32), Error> {
    match &alg.presentation.family {
        Family::Cyclotomic(s, n) => Ok((s.clone(), *n)),
        _ => Err(Error::Invalid(format!("{} is not a cyclotomic algebra", alg.id()))),
    }
}

/// The Γ-action on `t_I^Γ`: `γ_i·t^α_{ir} = t^{α+γ}_{ir}`, `t_{0p}` fixed.
pub fn gamma_action(alg: &Arc<LieAlgebra>, gv: &GammaVector) -> Result<LieMorphism, Error> {
    let (_, n) = cyclotomic_data(alg)?;
    if gv.modulus != n {
        return Err(Error::Invalid(format!("modulus {} does not match N={n}", gv.modulus)));
    }
    LieMorphism::from_fn(alg, alg, |g| match g {
        GeneratorSymbol::T(i, j, a) => {
            LieElement::t(alg, *i, *j, *a as i64 + gv.get(*i) as i64 - gv.get(*j) as i64)
        }
        _ => LieElement::generator(alg, g).unwrap(),
    })
}

pub fn gamma_act(gv: &GammaVector, a: &LieElement) -> Result<LieElement, Error> {
    gamma_action(&a.alg, gv)?.apply(a)
}

/// Relabelling `t^α_{ij} ↦ t^{kα}_{ij}` for a unit `k` of `Z/N`.
pub fn relabel_action(alg: &Arc<LieAlgebra>, k: i64) -> Result<LieMorphism, Error> {
    let (_, n) = cyclotomic_data(alg)?;
    if num_integer::gcd(k.rem_euclid(n as i64), n as i64) != 1 {
        return Err(Error::Invalid(format!("{k} is not a unit mod {n}")));
    }
    LieMorphism::from_fn(alg, alg, |g| match g {
        GeneratorSymbol::T(i, j, a) => LieElement::t(alg, *i, *j, *a as i64 * k),
        _ => LieElement::generator(alg, g).unwrap(),
    })
}

/// Renames strands via `rename` (bijective on the strand set).
pub fn rename_strands(
    source: &Arc<LieAlgebra>,
    rename: &BTreeMap<Strand, Strand>,
) -> Result<(Arc<LieAlgebra>, LieMorphism), Error> {
    let r = |s: &Strand| *rename.get(s).unwrap_or(s);
    let d = source.max_degree;
    match &source.presentation.family {
        Family::Cyclotomic(s, n) => {
            let target = tgamma_algebra(&s.iter().map(r).collect::<Vec<_>>(), *n, d);
            let m = LieMorphism::from_fn(source, &target, |g| match g {
                GeneratorSymbol::T0(i) => LieElement::t0(&target, r(i)),
                GeneratorSymbol::T(i, j, a) => LieElement::t(&target, r(i), r(j), *a as i64),
                GeneratorSymbol::Free(_) => unreachable!(),
            })?;
            Ok((target, m))
        }
        Family::Classical(s) => {
            let target = t_algebra(&s.iter().map(r).collect::<Vec<_>>(), d);
            let m = LieMorphism::from_fn(source, &target, |g| match g {
                GeneratorSymbol::T(i, j, _) => LieElement::t(&target, r(i), r(j), 0),
                _ => unreachable!(),
            })?;
            Ok((target, m))
        }
        _ => Err(Error::Invalid("renaming needs a strand-indexed algebra".into())),
    }
}

fn check_disjoint(a: &[Strand], b: &[Strand]) -> Result<(), Error> {
    if let Some(c) = a.iter().find(|x| b.contains(x)) {
        return Err(Error::Invalid(format!("strand name {c} clashes")));
    }
    if b.contains(&0) {
        return Err(Error::Invalid("inner strands may not contain 0".into()));
    }
    Ok(())
}

/// Outer part of `∘_i`: `t^Γ_I → t^Γ_{J ⊔ I∖{i}}`.
pub fn mop_compose_i_morphism(
    source: &Arc<LieAlgebra>,
    i: Strand,
    inner: &[Strand],
) -> Result<(Arc<LieAlgebra>, LieMorphism), Error> {
    if i == 0 {
        return Err(Error::Invalid("∘_0 is not a strand insertion".into()));
    }
    if inner.is_empty() {
        return Err(Error::Invalid("inner arity must be nonempty".into()));
    }
    let d = source.max_degree;
    match &source.presentation.family {
        Family::Cyclotomic(s, n) => {
            if !s.contains(&i) {
                return Err(Error::Invalid(format!("strand {i} not in {}", source.id())));
            }
            let rest: Vec<Strand> = s.iter().copied().filter(|x| *x != i).collect();
            check_disjoint(&rest, inner)?;
            let mut all = rest.clone();
            all.extend_from_slice(inner);
            let target = tgamma_algebra(&all, *n, d);
            let tg = &target;
            let n = *n as i64;
            let m = LieMorphism::from_fn(source, &target, |g| match g {
                GeneratorSymbol::T0(j) if *j != i => LieElement::t0(tg, *j),
                GeneratorSymbol::T0(_) => {
                    let mut terms: Vec<LieElement> = inner.iter().map(|p| LieElement::t0(tg, *p)).collect();
                    for (a, q) in inner.iter().enumerate() {
                        for r in &inner[a + 1..] {
                            terms.extend((0..n).map(|c| LieElement::t(tg, *q, *r, c)));
                        }
                    }
                    sum(tg, terms)
                }
                GeneratorSymbol::T(j, k, a) => {
                    let a = *a as i64;
                    if *j == i {
                        sum(tg, inner.iter().map(|r| LieElement::t(tg, *r, *k, a)))
                    } else if *k == i {
                        sum(tg, inner.iter().map(|r| LieElement::t(tg, *j, *r, a)))
                    } else {
                        LieElement::t(tg, *j, *k, a)
                    }
                }
                GeneratorSymbol::Free(_) => unreachable!(),
            })?;
            Ok((target, m))
        }
        Family::Classical(s) => {
            if !s.contains(&i) {
                return Err(Error::Invalid(format!("strand {i} not in {}", source.id())));
            }
            let rest: Vec<Strand> = s.iter().copied().filter(|x| *x != i).collect();
            check_disjoint(&rest, inner)?;
            let mut all = rest.clone();
            all.extend_from_slice(inner);
            let target = t_algebra(&all, d);
            let tg = &target;
            let m = LieMorphism::from_fn(source, &target, |g| match g {
                GeneratorSymbol::T(j, k, _) => {
                    if *j == i {
                        sum(tg, inner.iter().map(|r| LieElement::t(tg, *r, *k, 0)))
                    } else if *k == i {
                        sum(tg, inner.iter().map(|r| LieElement::t(tg, *j, *r, 0)))
                    } else {
                        LieElement::t(tg, *j, *k, 0)
                    }
                }
                _ => unreachable!(),
            })?;
            Ok((target, m))
        }
        _ => Err(Error::Invalid("insertion needs a strand-indexed algebra".into())),
    }
}

pub fn mop_compose_i(a: &LieElement, i: Strand, inner: &[Strand]) -> Result<LieElement, Error> {
    mop_compose_i_morphism(&a.alg, i, inner)?.1.apply(a)
}

/// Outer part of `∘_0`: `t^Γ_I → t^Γ_{J ⊔ I}`, `t_{0i} ↦ t_{0i} + Σ_γ Σ_j t^γ_{ji}`.
pub fn mop_compose_0_morphism(
    source: &Arc<LieAlgebra>,
    inner: &[Strand],
) -> Result<(Arc<LieAlgebra>, LieMorphism), Error> {
    let (s, n) = cyclotomic_data(source)?;
    check_disjoint(&s, inner)?;
    let mut all = s.clone();
    all.extend_from_slice(inner);
    let target = tgamma_algebra(&all, n, source.max_degree);
    let tg = &target;
    let m = LieMorphism::from_fn(source, &target, |g| match g {
        GeneratorSymbol::T0(i) => {
            let mut terms = vec![LieElement::t0(tg, *i)];
            for j in inner {
                terms.extend((0..n as i64).map(|c| LieElement::t(tg, *j, *i, c)));
            }
            sum(tg, terms)
        }
        _ => LieElement::generator(tg, g).unwrap(),
    })?;
    Ok((target, m))
}

pub fn mop_compose_0(a: &LieElement, inner: &[Strand]) -> Result<LieElement, Error> {
    mop_compose_0_morphism(&a.alg, inner)?.1.apply(a)
}

/// Inclusion of an algebra into one whose generator set contains the same symbols
/// (inner part of `∘_0`); classical `t_{pq}` go to `t^0_{pq}` (inner part of `∘_i`).
pub fn inclusion(source: &Arc<LieAlgebra>, target: &Arc<LieAlgebra>) -> Result<LieMorphism, Error> {
    let n = target.presentation.gamma_modulus;
    let mut images = Vec::new();
    for g in &source.presentation.generators {
        let img = match (&source.presentation.family, g) {
            (Family::Classical(_), GeneratorSymbol::T(i, j, _)) => {
                LieElement::generator(target, &GeneratorSymbol::t(*i, *j, 0, n)?)?
            }
            _ => LieElement::generator(target, g)?,
        };
        images.push(img);
    }
    LieMorphism::new(source, target, images)
}

/// The central element `c = t_{01} + t_{02} + Σ_α t^α_{12}` of an arity-2 `t^Γ`.
pub fn central_element(alg: &Arc<LieAlgebra>) -> Result<LieElement, Error> {
    let (s, n) = cyclotomic_data(alg)?;
    if s.len() != 2 {
        return Err(Error::Invalid("central element needs arity 2".into()));
    }
    let (i, j) = (s[0], s[1]);
    let mut terms = vec![LieElement::t0(alg, i), LieElement::t0(alg, j)];
    terms.extend((0..n as i64).map(|a| LieElement::t(alg, i, j, a)));
    Ok(sum(alg, terms))
}

/// Projection `t_2^Γ → t̄_2^Γ ≅ f_{N+1}` (strands 1, 2), killing the center.
pub fn center_quotient(source: &Arc<LieAlgebra>) -> Result<(Arc<LieAlgebra>, LieMorphism), Error> {
    let (s, n) = cyclotomic_data(source)?;
    if s != [1, 2] {
        return Err(Error::Invalid("center quotient is defined on strands {1,2}".into()));
    }
    let target = tbar2_algebra(n, source.max_degree);
    let tg = &target;
    let m = LieMorphism::from_fn(source, &target, |g| match g {
        GeneratorSymbol::T0(2) => {
            let mut terms = vec![LieElement::t0(tg, 1).neg()];
            terms.extend((0..n as i64).map(|a| LieElement::t(tg, 1, 2, a).neg()));
            sum(tg, terms)
        }
        _ => LieElement::generator(tg, g).unwrap(),
    })?;
    Ok((target, m))
}

/// Degree-one substitution given by generator images.
pub fn substitute(m: &LieMorphism, a: &LieElement) -> Result<LieElement, Error> {
    m.apply(a)
}
