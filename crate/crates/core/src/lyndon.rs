//! Free Lie algebras in the Lyndon basis, realised inside the tensor algebra.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::linalg::SparseVec;
use crate::rational::Q;

pub type Word = Vec<u8>;

/// Lyndon words over `0..k` of length at most `n`, in lexicographic order.
pub fn lyndon_words(k: usize, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if k == 0 || n == 0 {
        return out;
    }
    let top = (k - 1) as u8;
    let mut w: Word = vec![0];
    loop {
        out.push(w.clone());
        let m = w.len();
        while w.len() < n {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        match w.last_mut() {
            Some(c) => *c += 1,
            None => break,
        }
    }
    out
}

/// Necklace count: dimension of the degree-`d` part of the free Lie algebra on `k` generators.
pub fn witt(k: usize, d: usize) -> usize {
    let mut total: i128 = 0;
    for e in 1..=d {
        if d.is_multiple_of(e) {
            total += mobius(d / e) as i128 * (k as i128).pow(e as u32);
        }
    }
    (total / d as i128) as usize
}

fn mobius(n: usize) -> i32 {
    let mut n = n;
    let mut res = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            res = -res;
        }
        p += 1;
    }
    if n > 1 {
        res = -res;
    }
    res
}

type Tensor = BTreeMap<Word, i64>;

type BracketImage = Vec<(usize, i64)>;

/// Free Lie algebra on `k` generators through degree `max_degree`.
/// Basis elements are indexed globally, degree-major, lexicographic within a degree.
pub struct FreeLie {
    pub k: usize,
    pub max_degree: usize,
    words: Vec<Word>,
    degree_start: Vec<usize>,
    index: HashMap<Word, usize>,
    factor: Vec<Option<(usize, usize)>>,
    expansion: Vec<Vec<(Word, i64)>>,
    bracket_cache: Mutex<HashMap<(usize, usize), BracketImage>>,
}

impl FreeLie {
    pub fn new(k: usize, max_degree: usize) -> Self {
        let mut all = lyndon_words(k, max_degree);
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut degree_start = vec![0; max_degree + 2];
        for d in 1..=max_degree + 1 {
            degree_start[d] = all.iter().filter(|w| w.len() < d).count();
        }
        let index: HashMap<Word, usize> = all.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut factor = Vec::with_capacity(all.len());
        let mut expansion: Vec<Vec<(Word, i64)>> = Vec::with_capacity(all.len());
        for w in &all {
            if w.len() == 1 {
                factor.push(None);
                expansion.push(vec![(w.clone(), 1)]);
                continue;
            }
            let (u, v) = (1..w.len())
                .find_map(|i| {
                    let v = index.get(&w[i..])?;
                    Some((index[&w[..i]], *v))
                })
                .expect("standard factorisation");
            factor.push(Some((u, v)));
            let mut t = Tensor::new();
            for (a, ca) in &expansion[u] {
                for (b, cb) in &expansion[v] {
                    let mut ab = a.clone();
                    ab.extend_from_slice(b);
                    *t.entry(ab).or_insert(0) += ca * cb;
                    let mut ba = b.clone();
                    ba.extend_from_slice(a);
                    *t.entry(ba).or_insert(0) -= ca * cb;
                }
            }
            expansion.push(t.into_iter().filter(|(_, c)| *c != 0).collect());
        }
        FreeLie {
            k,
            max_degree,
            words: all,
            degree_start,
            index,
            factor,
            expansion,
            bracket_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.words[i].len()
    }

    pub fn index_of(&self, w: &[u8]) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Global indices of the degree-`d` basis.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        self.degree_start[d]..self.degree_start[d + 1]
    }

    /// Standard factorisation `w = uv`, or `None` for a generator.
    pub fn factor(&self, i: usize) -> Option<(usize, usize)> {
        self.factor[i]
    }

    pub fn expansion(&self, i: usize) -> &[(Word, i64)] {
        &self.expansion[i]
    }

    /// Rewrites a homogeneous Lie polynomial of the tensor algebra in the Lyndon basis.
    fn to_lyndon(&self, mut t: Tensor) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        while let Some((w, c)) = t.iter().next().map(|(w, c)| (w.clone(), *c)) {
            let i = *self.index.get(&w).expect("not a Lie element");
            out.push((i, c));
            for (u, cu) in &self.expansion[i] {
                let e = t.entry(u.clone()).or_insert(0);
                *e -= c * cu;
                if *e == 0 {
                    t.remove(u);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// `[P_a, P_b]` in the Lyndon basis; empty if the degree exceeds the cap.
    pub fn bracket_basis(&self, a: usize, b: usize) -> Vec<(usize, i64)> {
        if a == b || self.degree(a) + self.degree(b) > self.max_degree {
            return Vec::new();
        }
        if a > b {
            return self.bracket_basis(b, a).into_iter().map(|(i, c)| (i, -c)).collect();
        }
        if let Some(r) = self.bracket_cache.lock().unwrap().get(&(a, b)) {
            return r.clone();
        }
        let mut t = Tensor::new();
        for (u, cu) in &self.expansion[a] {
            for (v, cv) in &self.expansion[b] {
                let mut uv = u.clone();
                uv.extend_from_slice(v);
                *t.entry(uv).or_insert(0) += cu * cv;
                let mut vu = v.clone();
                vu.extend_from_slice(u);
                *t.entry(vu).or_insert(0) -= cu * cv;
            }
        }
        t.retain(|_, c| *c != 0);
        let r = self.to_lyndon(t);
        self.bracket_cache.lock().unwrap().insert((a, b), r.clone());
        r
    }

    pub fn bracket(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, ca) in x {
            for (b, cb) in y {
                if self.degree(*a) + self.degree(*b) > self.max_degree {
                    continue;
                }
                let c = ca * cb;
                for (i, ci) in self.bracket_basis(*a, *b) {
                    let e = out.entry(i).or_insert_with(|| Q::from_integer(0.into()));
                    *e += &c * Q::from_integer(ci.into());
                }
            }
        }
        out.retain(|_, c| *c != Q::from_integer(0.into()));
        out
    }
}
