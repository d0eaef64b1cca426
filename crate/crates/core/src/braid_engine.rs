//! Braid words, the word problem via the integral loop-coordinate action,
//! permutations, cabling, linking numbers with the frozen strand.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::Error;

/// Word in the Artin generators of `B_n`. Letter `(k, ±1)` crosses the strands
/// at 0-based positions `k` and `k+1`; `+1` is the positive crossing, where the
/// strand moving left-to-right passes in front.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<(usize, i8)>,
}

impl BraidWord {
    pub fn identity(strands: usize) -> Self {
        BraidWord { strands, letters: Vec::new() }
    }

    pub fn new(strands: usize, letters: Vec<(usize, i8)>) -> Result<Self, Error> {
        for (k, s) in &letters {
            if k + 1 >= strands || (*s != 1 && *s != -1) {
                return Err(Error::Invalid(format!("letter ({k},{s}) out of range for {strands} strands")));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Single positive or negative generator at 0-based position `k`.
    pub fn sigma(strands: usize, k: usize, sign: i8) -> Self {
        BraidWord::new(strands, vec![(k, sign)]).expect("generator in range")
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn compose(&self, other: &BraidWord) -> BraidWord {
        assert_eq!(self.strands, other.strands, "strand count mismatch");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands, letters }
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|(k, s)| (*k, -s)).collect() }
    }

    /// Shifts all letters `offset` positions to the right inside `strands` strands.
    pub fn shifted(&self, offset: usize, strands: usize) -> BraidWord {
        BraidWord::new(strands, self.letters.iter().map(|(k, s)| (k + offset, *s)).collect())
            .expect("shift in range")
    }

    /// `perm[p]` is the final position of the strand starting at position `p`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect();
        for (k, _) in &self.letters {
            at.swap(*k, k + 1);
        }
        let mut perm = vec![0; self.strands];
        for (pos, strand) in at.iter().enumerate() {
            perm[*strand] = pos;
        }
        perm
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().iter().enumerate().all(|(i, p)| i == *p)
    }

    /// Text form with generator indices offset by `base` (1 for `B_n`, 0 for annular words).
    pub fn to_text(&self, base: usize) -> String {
        self.letters
            .iter()
            .map(|(k, s)| if *s > 0 { format!("s{}", k + base) } else { format!("s{}^-1", k + base) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse(text: &str, strands: usize, base: usize) -> Result<Self, Error> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let body = tok.strip_prefix('s').ok_or_else(|| Error::Parse(format!("bad letter {tok:?}")))?;
            let (idx, sign) = match body.split_once('^') {
                Some((i, "-1")) => (i, -1),
                Some((i, "1")) => (i, 1),
                None => (body, 1),
                _ => return Err(Error::Parse(format!("bad exponent in {tok:?}"))),
            };
            let idx: usize = idx.parse().map_err(|_| Error::Parse(format!("bad index in {tok:?}")))?;
            if idx < base {
                return Err(Error::Parse(format!("index below {base} in {tok:?}")));
            }
            letters.push((idx - base, sign));
        }
        BraidWord::new(strands, letters)
    }

    pub fn to_signed(&self, base: usize) -> Vec<i64> {
        self.letters.iter().map(|(k, s)| (*s as i64) * (k + base) as i64).collect()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", self.to_text(1))
        }
    }
}

/// Braid on strands `0..=n` whose permutation fixes the frozen strand 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnularBraidWord(pub BraidWord);

impl AnnularBraidWord {
    pub fn new(w: BraidWord) -> Result<Self, Error> {
        if w.strands == 0 || w.permutation()[0] != 0 {
            return Err(Error::Invalid("annular braid must fix strand 0".into()));
        }
        Ok(AnnularBraidWord(w))
    }

    /// Non-frozen strand count `n`.
    pub fn arity(&self) -> usize {
        self.0.strands - 1
    }
}

fn pos(x: &BigInt) -> BigInt {
    if x.is_positive() {
        x.clone()
    } else {
        BigInt::zero()
    }
}

fn neg(x: &BigInt) -> BigInt {
    if x.is_negative() {
        x.clone()
    } else {
        BigInt::zero()
    }
}

/// Loop coordinates `(a, b)` of an integral lamination of a disk with `n` punctures.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Loop {
    a: Vec<BigInt>,
    b: Vec<BigInt>,
}

impl Loop {
    fn apply(&mut self, punctures: usize, k: usize, sign: i8) {
        let n = punctures;
        let i = k + 1;
        let (a, b) = (&mut self.a, &mut self.b);
        if sign > 0 {
            if i == 1 {
                let (a1, b1) = (a[0].clone(), b[0].clone());
                a[0] = -&b1 + pos(&(&a1 + pos(&b1)));
                b[0] = &a1 + pos(&b1);
            } else if i == n - 1 {
                let (an, bn) = (a[n - 3].clone(), b[n - 3].clone());
                a[n - 3] = -&bn + neg(&(&an + neg(&bn)));
                b[n - 3] = &an + neg(&bn);
            } else {
                let (ap, bp, ai, bi) = (a[i - 2].clone(), b[i - 2].clone(), a[i - 1].clone(), b[i - 1].clone());
                let z = -&ap - neg(&bp) + &ai + pos(&bi);
                a[i - 2] = &ap - pos(&bp) - pos(&(pos(&bi) - &z));
                b[i - 2] = &bi - pos(&z);
                a[i - 1] = &ai - neg(&bi) - neg(&(neg(&bp) + &z));
                b[i - 1] = &bp + pos(&z);
            }
        } else if i == 1 {
            let (a1, b1) = (a[0].clone(), b[0].clone());
            a[0] = &b1 - pos(&(pos(&b1) - &a1));
            b[0] = pos(&b1) - &a1;
        } else if i == n - 1 {
            let (an, bn) = (a[n - 3].clone(), b[n - 3].clone());
            a[n - 3] = &bn - neg(&(neg(&bn) - &an));
            b[n - 3] = neg(&bn) - &an;
        } else {
            let (ap, bp, ai, bi) = (a[i - 2].clone(), b[i - 2].clone(), a[i - 1].clone(), b[i - 1].clone());
            let z = &ap - neg(&bp) - &ai + pos(&bi);
            a[i - 2] = &ap + pos(&bp) + pos(&(pos(&bi) - &z));
            b[i - 2] = &bi - pos(&z);
            a[i - 1] = &ai + neg(&bi) + neg(&(neg(&bp) + &z));
            b[i - 1] = &bp + pos(&z);
        }
    }
}

fn test_loops(punctures: usize) -> Vec<Loop> {
    let m = punctures - 2;
    let mut loops = vec![Loop { a: vec![BigInt::zero(); m], b: vec![BigInt::from(-1); m] }];
    for j in 0..m {
        let mut l = Loop { a: vec![BigInt::zero(); m], b: vec![BigInt::zero(); m] };
        l.b[j] = BigInt::from(-1);
        loops.push(l.clone());
        l.b[j] = BigInt::from(1);
        loops.push(l.clone());
        l.b[j] = BigInt::zero();
        l.a[j] = BigInt::from(1);
        loops.push(l);
    }
    loops
}

/// Images of a family of test laminations. One extra strand is added on the
/// right so that the center of `B_n` acts nontrivially.
fn loop_images(w: &BraidWord) -> Vec<Loop> {
    let punctures = w.strands + 1;
    let mut loops = test_loops(punctures);
    for l in &mut loops {
        for (k, s) in &w.letters {
            l.apply(punctures, *k, *s);
        }
    }
    loops
}

fn free_reduce(letters: &[(usize, i8)]) -> Vec<(usize, i8)> {
    let mut out: Vec<(usize, i8)> = Vec::new();
    for l in letters {
        if out.last() == Some(&(l.0, -l.1)) {
            out.pop();
        } else {
            out.push(*l);
        }
    }
    out
}

/// Decides equality in `B_n`.
pub fn equal(a: &BraidWord, b: &BraidWord) -> Result<bool, Error> {
    if a.strands != b.strands {
        return Err(Error::Invalid(format!("strand counts {} and {} differ", a.strands, b.strands)));
    }
    if a.permutation() != b.permutation() {
        return Ok(false);
    }
    let diff = a.compose(&b.inverse());
    let reduced = free_reduce(&diff.letters);
    if reduced.is_empty() {
        return Ok(true);
    }
    if a.strands < 2 {
        return Ok(true);
    }
    let w = BraidWord { strands: a.strands, letters: reduced };
    let punctures = w.strands + 1;
    Ok(loop_images(&w) == test_loops(punctures))
}

pub fn is_identity(a: &BraidWord) -> bool {
    equal(a, &BraidWord::identity(a.strands)).expect("same strand count")
}

/// `x_{ij}` for 1-based strands `1 ≤ i < j ≤ n`.
pub fn elementary_pure(i: usize, j: usize, n: usize) -> Result<BraidWord, Error> {
    if !(1 <= i && i < j && j <= n) {
        return Err(Error::Invalid(format!("bad strands ({i},{j}) for B_{n}")));
    }
    annular_elementary_pure(i - 1, j - 1, n)
}

/// `x_{ij}` for 0-based strands `i < j` among `strands` strands (so `x_{01} = σ_0²`).
pub fn annular_elementary_pure(i: usize, j: usize, strands: usize) -> Result<BraidWord, Error> {
    if !(i < j && j < strands) {
        return Err(Error::Invalid(format!("bad strands ({i},{j})")));
    }
    let mut letters: Vec<(usize, i8)> = (i + 1..j).rev().map(|k| (k, 1)).collect();
    letters.push((i, 1));
    letters.push((i, 1));
    letters.extend((i + 1..j).map(|k| (k, -1)));
    BraidWord::new(strands, letters)
}

/// Positive crossing of a block of `a` strands over the adjacent block of `b`
/// strands to its right, as a word on `a + b` strands.
pub fn block_cross(a: usize, b: usize) -> BraidWord {
    let mut letters = Vec::with_capacity(a * b);
    for i in (0..a).rev() {
        for k in i..i + b {
            letters.push((k, 1));
        }
    }
    BraidWord { strands: a + b, letters }
}

/// Full twist `Δ²` of `k` strands.
pub fn full_twist(k: usize) -> BraidWord {
    let mut letters = Vec::new();
    for _ in 0..k {
        letters.extend((0..k.saturating_sub(1)).map(|j| (j, 1i8)));
    }
    BraidWord { strands: k, letters }
}

/// Replaces the strand starting at 0-based position `i` by `m` parallel strands
/// (`m = 0` deletes it).
pub fn cable(a: &BraidWord, i: usize, m: usize) -> Result<BraidWord, Error> {
    if i >= a.strands {
        return Err(Error::Invalid(format!("no strand {i}")));
    }
    let new_strands = a.strands + m - 1;
    let width = |s: usize| if s == i { m } else { 1 };
    let mut at: Vec<usize> = (0..a.strands).collect();
    let mut letters = Vec::new();
    for (k, s) in &a.letters {
        let offset: usize = at[..*k].iter().map(|s| width(*s)).sum();
        let (wa, wb) = (width(at[*k]), width(at[k + 1]));
        let piece = if *s > 0 { block_cross(wa, wb) } else { block_cross(wb, wa).inverse() };
        letters.extend(piece.letters.iter().map(|(j, e)| (j + offset, *e)));
        at.swap(*k, k + 1);
    }
    BraidWord::new(new_strands, letters)
}

/// Cables every starting position `p` into `widths[p]` strands.
pub fn cable_all(a: &BraidWord, widths: &[usize]) -> BraidWord {
    assert_eq!(widths.len(), a.strands);
    let total: usize = widths.iter().sum();
    let mut at: Vec<usize> = (0..a.strands).collect();
    let mut letters = Vec::new();
    for (k, s) in &a.letters {
        let offset: usize = at[..*k].iter().map(|s| widths[*s]).sum();
        let (wa, wb) = (widths[at[*k]], widths[at[k + 1]]);
        let piece = if *s > 0 { block_cross(wa, wb) } else { block_cross(wb, wa).inverse() };
        letters.extend(piece.letters.iter().map(|(j, e)| (j + offset, *e)));
        at.swap(*k, k + 1);
    }
    BraidWord { strands: total, letters }
}

/// Linking numbers of each strand (by starting position `1..=n`) with strand 0:
/// half the signed count of crossings with strand 0.
pub fn linking_with_zero(a: &AnnularBraidWord) -> Vec<i64> {
    let w = &a.0;
    let mut at: Vec<usize> = (0..w.strands).collect();
    let mut twice = vec![0i64; w.strands];
    for (k, s) in &w.letters {
        let (x, y) = (at[*k], at[k + 1]);
        if x == 0 {
            twice[y] += *s as i64;
        } else if y == 0 {
            twice[x] += *s as i64;
        }
        at.swap(*k, k + 1);
    }
    twice[1..].iter().map(|t| t / 2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: usize, l: &[(usize, i8)]) -> BraidWord {
        BraidWord::new(n, l.to_vec()).unwrap()
    }

    #[test]
    fn basic_equalities() {
        assert!(equal(&w(3, &[(0, 1), (1, 1), (0, 1)]), &w(3, &[(1, 1), (0, 1), (1, 1)])).unwrap());
        assert!(equal(&w(4, &[(0, 1), (2, 1)]), &w(4, &[(2, 1), (0, 1)])).unwrap());
        assert!(!equal(&w(2, &[(0, 1), (0, 1)]), &BraidWord::identity(2)).unwrap());
        assert!(!equal(&full_twist(3), &BraidWord::identity(3)).unwrap());
    }

    #[test]
    fn letters_act_invertibly_and_satisfy_relations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let n = rng.gen_range(3..8);
            let l = Loop {
                a: (0..n - 2).map(|_| BigInt::from(rng.gen_range(-6..7))).collect(),
                b: (0..n - 2).map(|_| BigInt::from(rng.gen_range(-6..7))).collect(),
            };
            let k = rng.gen_range(0..n - 1);
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            let mut m = l.clone();
            m.apply(n, k, s);
            m.apply(n, k, -s);
            assert_eq!(m, l);
            if k + 2 < n {
                let run = |word: &[(usize, i8)]| {
                    let mut m = l.clone();
                    for (k, s) in word {
                        m.apply(n, *k, *s);
                    }
                    m
                };
                assert_eq!(run(&[(k, s), (k + 1, s), (k, s)]), run(&[(k + 1, s), (k, s), (k + 1, s)]));
            }
        }
    }

    #[test]
    fn block_crossings() {
        assert_eq!(block_cross(1, 1).letters, vec![(0, 1)]);
        assert!(block_cross(1, 0).is_empty());
        assert_eq!(block_cross(2, 1).to_text(1), "s2 s1");
    }
}
