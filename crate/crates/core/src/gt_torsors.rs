//! Associators, cyclotomic associators and the Grothendieck-Teichmüller type
//! groups acting on them, all as truncated group-like series over the
//! rationals: element types, defining equations, group laws and actions.
//!
//! Series conventions: `f`, `φ`, `g ∈ GRT_1` live in `exp(f_2)` on `x, y`
//! (for `GT`, `x, y` are the logarithms of the free generators); `ψ` and `h`
//! live in `exp(t̄_2^Γ)` on `t_{01}, t^0_{12}, …`; the `GTM` series `g` lives
//! in `exp(f_{N+1})` on `X, y(0), …, y(N-1)`.

use std::sync::Arc;
use std::thread;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::graded_lie::{
    center_quotient, free_algebra, gamma_action, kernel_algebra, t_algebra, tbar2_algebra, tgamma_algebra,
    GammaVector, LieAlgebra, LieElement,
};
use crate::rational::{fmt_q, parse_q, q, Q};
use crate::uea::{exp, lie_substitute, map_uea, GroupLike, UEAElement};
use crate::Error;

/// Argument order of the `GT` multiplication law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GtLaw {
    /// `f_1(x^{λ_2}, f_2 y^{λ_2} f_2^{-1}) f_2`.
    Substitution,
    /// `f_1(f_2^{-1} x^{λ_2} f_2, y^{λ_2}) f_2`.
    ConjugatedFirst,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GTElement {
    pub lambda: Q,
    pub f: GroupLike,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GTMElement {
    pub base: GTElement,
    pub g: GroupLike,
    pub modulus: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GRTElement {
    pub lambda: Q,
    pub g: GroupLike,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GRTGammaElement {
    pub lambda: Q,
    pub g: GroupLike,
    pub h: GroupLike,
    pub modulus: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssocTuple {
    pub mu: Q,
    pub phi: GroupLike,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycAssocTuple {
    pub base: AssocTuple,
    pub psi: GroupLike,
    pub modulus: u32,
}

fn nonzero(c: &Q, what: &str) -> Result<(), Error> {
    if c.is_zero() {
        Err(Error::Invalid(format!("{what} must be nonzero")))
    } else {
        Ok(())
    }
}

fn expect_alg(g: &GroupLike, alg: &Arc<LieAlgebra>, what: &str) -> Result<(), Error> {
    if g.alg().id() != alg.id() {
        return Err(Error::HandleMismatch(g.alg().id().to_string(), format!("{} ({what})", alg.id())));
    }
    Ok(())
}

fn same_trunc(a: &GroupLike, b: &GroupLike) -> Result<(), Error> {
    if a.trunc() != b.trunc() {
        return Err(Error::Invalid(format!("truncation mismatch: {} vs {}", a.trunc(), b.trunc())));
    }
    Ok(())
}

pub fn f2_algebra(d: usize) -> Arc<LieAlgebra> {
    free_algebra(&["x", "y"], d)
}

fn xy(t: usize, d: usize) -> (LieElement, LieElement) {
    let f2 = f2_algebra(d);
    (LieElement::gen(&f2, "x").truncated(t), LieElement::gen(&f2, "y").truncated(t))
}

fn subst(f: &GroupLike, args: &[LieElement]) -> GroupLike {
    lie_substitute(f, args).expect("substitution arguments match the free generators")
}

fn max_deg(g: &GroupLike) -> usize {
    g.alg().max_degree
}

impl GTElement {
    pub fn new(lambda: Q, f: GroupLike) -> Result<Self, Error> {
        nonzero(&lambda, "λ")?;
        expect_alg(&f, &f2_algebra(max_deg(&f)), "f")?;
        Ok(GTElement { lambda, f })
    }

    pub fn identity(d: usize) -> Self {
        GTElement { lambda: Q::one(), f: GroupLike::one(&f2_algebra(d), d) }
    }
}

impl GRTElement {
    pub fn new(lambda: Q, g: GroupLike) -> Result<Self, Error> {
        nonzero(&lambda, "λ")?;
        expect_alg(&g, &f2_algebra(max_deg(&g)), "g")?;
        Ok(GRTElement { lambda, g })
    }

    pub fn identity(d: usize) -> Self {
        GRTElement { lambda: Q::one(), g: GroupLike::one(&f2_algebra(d), d) }
    }
}

impl GTMElement {
    pub fn new(base: GTElement, g: GroupLike, modulus: u32) -> Result<Self, Error> {
        expect_alg(&g, &kernel_algebra(modulus, max_deg(&g)), "g")?;
        same_trunc(&base.f, &g)?;
        Ok(GTMElement { base, g, modulus })
    }

    pub fn identity(n: u32, d: usize) -> Self {
        GTMElement { base: GTElement::identity(d), g: GroupLike::one(&kernel_algebra(n, d), d), modulus: n }
    }

    /// `μ_1` with `λ = 1 + μ_1 N`.
    pub fn mu1(&self) -> Q {
        (&self.base.lambda - Q::one()) / q(self.modulus as i64)
    }
}

impl GRTGammaElement {
    pub fn new(lambda: Q, g: GroupLike, h: GroupLike, modulus: u32) -> Result<Self, Error> {
        nonzero(&lambda, "λ")?;
        expect_alg(&g, &f2_algebra(max_deg(&g)), "g")?;
        expect_alg(&h, &tbar2_algebra(modulus, max_deg(&h)), "h")?;
        same_trunc(&g, &h)?;
        Ok(GRTGammaElement { lambda, g, h, modulus })
    }

    pub fn identity(n: u32, d: usize) -> Self {
        GRTGammaElement {
            lambda: Q::one(),
            g: GroupLike::one(&f2_algebra(d), d),
            h: GroupLike::one(&tbar2_algebra(n, d), d),
            modulus: n,
        }
    }
}

impl AssocTuple {
    pub fn new(mu: Q, phi: GroupLike) -> Result<Self, Error> {
        nonzero(&mu, "μ")?;
        expect_alg(&phi, &f2_algebra(max_deg(&phi)), "φ")?;
        Ok(AssocTuple { mu, phi })
    }
}

impl CycAssocTuple {
    pub fn new(base: AssocTuple, psi: GroupLike, modulus: u32) -> Result<Self, Error> {
        expect_alg(&psi, &tbar2_algebra(modulus, max_deg(&psi)), "ψ")?;
        same_trunc(&base.phi, &psi)?;
        Ok(CycAssocTuple { base, psi, modulus })
    }

    /// `μ_1 = μ/N`, the exponent of `t_{01}` in the image of `E`.
    pub fn mu1(&self) -> Q {
        &self.base.mu / q(self.modulus as i64)
    }
}

/// `g(λ·a_1, …)`: multiplies the degree-`d` part of `log g` by `λ^d`.
pub fn dilate(g: &GroupLike, lambda: &Q) -> GroupLike {
    let mut l = g.log();
    let alg = l.alg.clone();
    for (i, c) in l.coords.iter_mut() {
        let d = alg.basis_degree(*i) as i32;
        *c *= num_traits::pow::Pow::pow(lambda, d);
    }
    exp(&l)
}

/// `Ad(e^{a})(b)` for Lie elements.
fn ad_exp(a: &LieElement, b: &LieElement) -> LieElement {
    exp(a).ad_lie(b)
}

// ---------------------------------------------------------------------------
// t̄_2^Γ helpers

fn tbar_t01(tb: &Arc<LieAlgebra>, t: usize) -> LieElement {
    LieElement::t0(tb, 1).truncated(t)
}

fn tbar_ta(tb: &Arc<LieAlgebra>, a: i64, t: usize) -> LieElement {
    LieElement::t(tb, 1, 2, a).truncated(t)
}

/// `a·s = s(t_{01} | t^a_{12}, …, t^{a+N-1}_{12})`.
pub fn shift_tbar(s: &GroupLike, a: i64, n: u32) -> GroupLike {
    let tb = s.alg().clone();
    let t = s.trunc();
    let mut args = vec![tbar_t01(&tb, t)];
    args.extend((0..n as i64).map(|c| tbar_ta(&tb, a + c, t)));
    subst(s, &args)
}

// ---------------------------------------------------------------------------
// group laws

pub fn gt_compose_with(a: &GTElement, b: &GTElement, law: GtLaw) -> Result<GTElement, Error> {
    same_trunc(&a.f, &b.f)?;
    let t = b.f.trunc();
    let (x, y) = xy(t, max_deg(&b.f));
    let l2 = &b.lambda;
    let args = match law {
        GtLaw::Substitution => vec![x.scale(l2), b.f.ad_lie(&y.scale(l2))],
        GtLaw::ConjugatedFirst => vec![b.f.inv().ad_lie(&x.scale(l2)), y.scale(l2)],
    };
    Ok(GTElement { lambda: &a.lambda * l2, f: subst(&a.f, &args).mul(&b.f) })
}

pub fn gt_compose(a: &GTElement, b: &GTElement) -> Result<GTElement, Error> {
    gt_compose_with(a, b, GtLaw::Substitution)
}

/// `(λ_1λ_2, g_1(λ_2 x, λ_2 Ad(g_2)(y)) g_2)`.
pub fn grt_compose(a: &GRTElement, b: &GRTElement) -> Result<GRTElement, Error> {
    same_trunc(&a.g, &b.g)?;
    let t = b.g.trunc();
    let (x, y) = xy(t, max_deg(&b.g));
    let l2 = &b.lambda;
    let args = vec![x.scale(l2), b.g.ad_lie(&y.scale(l2))];
    Ok(GRTElement { lambda: &a.lambda * l2, g: subst(&a.g, &args).mul(&b.g) })
}

/// `k^×`-rescaling `g(x, y) ↦ g(λx, λy)`.
pub fn rescale_grt(g: &GroupLike, lambda: &Q) -> GroupLike {
    dilate(g, lambda)
}

/// `y(c)` for any integer `c`, using `y(c + N) = X y(c) X^{-1}`.
fn kernel_y(kal: &Arc<LieAlgebra>, n: u32, c: i64, t: usize) -> LieElement {
    let x = LieElement::gen(kal, "X").truncated(t);
    let base = LieElement::gen(kal, &format!("y{}", c.rem_euclid(n as i64))).truncated(t);
    let k = c.div_euclid(n as i64);
    ad_exp(&x.scale(&q(k)), &base)
}

/// `σ_a g = g(X | y(a), …, y(a+N-1))`.
fn shift_kernel(g: &GroupLike, a: i64, n: u32) -> GroupLike {
    let kal = g.alg().clone();
    let t = g.trunc();
    let mut args = vec![LieElement::gen(&kal, "X").truncated(t)];
    args.extend((0..n as i64).map(|c| kernel_y(&kal, n, a + c, t)));
    subst(g, &args)
}

/// `g = g_1(X^{λ_2} | G_2(y(0)), …) g_2` with
/// `G_2(y(a)) = Ad(X^{a(λ_2-1)/N} σ_a g_2)(y(a)^{λ_2})`.
pub fn gtm_compose(a: &GTMElement, b: &GTMElement) -> Result<GTMElement, Error> {
    if a.modulus != b.modulus {
        return Err(Error::Invalid("moduli differ".into()));
    }
    same_trunc(&a.g, &b.g)?;
    let n = b.modulus;
    let base = gt_compose(&a.base, &b.base)?;
    let kal = b.g.alg().clone();
    let t = b.g.trunc();
    let l2 = &b.base.lambda;
    let x = LieElement::gen(&kal, "X").truncated(t);
    let mut args = vec![x.scale(l2)];
    for c in 0..n as i64 {
        let pre = exp(&x.scale(&(q(c) * (l2 - Q::one()) / q(n as i64))));
        let conj = pre.mul(&shift_kernel(&b.g, c, n));
        args.push(conj.ad_lie(&kernel_y(&kal, n, c, t).scale(l2)));
    }
    Ok(GTMElement { base, g: subst(&a.g, &args).mul(&b.g), modulus: n })
}

/// `S_b`: `t_{01} ↦ λ t_{01}`, `t^a_{12} ↦ λ Ad(a·h)(t^a_{12})`.
fn grtgamma_substitution_args(b: &GRTGammaElement) -> Vec<LieElement> {
    let tb = b.h.alg().clone();
    let t = b.h.trunc();
    let mut args = vec![tbar_t01(&tb, t).scale(&b.lambda)];
    for a in 0..b.modulus as i64 {
        args.push(shift_tbar(&b.h, a, b.modulus).ad_lie(&tbar_ta(&tb, a, t).scale(&b.lambda)));
    }
    args
}

/// `(λ_1λ_2, g_1 * g_2, S_{b_2}(h_1) h_2)`.
pub fn grtgamma_compose(a: &GRTGammaElement, b: &GRTGammaElement) -> Result<GRTGammaElement, Error> {
    if a.modulus != b.modulus {
        return Err(Error::Invalid("moduli differ".into()));
    }
    same_trunc(&a.h, &b.h)?;
    let g = grt_compose(&GRTElement { lambda: a.lambda.clone(), g: a.g.clone() }, &GRTElement {
        lambda: b.lambda.clone(),
        g: b.g.clone(),
    })?;
    let h = subst(&a.h, &grtgamma_substitution_args(b)).mul(&b.h);
    Ok(GRTGammaElement { lambda: g.lambda, g: g.g, h, modulus: a.modulus })
}

// ---------------------------------------------------------------------------
// actions

/// `(λμ, f(e^{μx}, Ad(φ)(e^{μy})) φ)`.
pub fn act_gt_on_assoc(a: &GTElement, t: &AssocTuple) -> Result<AssocTuple, Error> {
    same_trunc(&a.f, &t.phi)?;
    let (x, y) = xy(t.phi.trunc(), max_deg(&t.phi));
    let args = vec![x.scale(&t.mu), t.phi.ad_lie(&y.scale(&t.mu))];
    Ok(AssocTuple { mu: &a.lambda * &t.mu, phi: subst(&a.f, &args).mul(&t.phi) })
}

/// `(λμ, φ(λx, Ad(g)(λy)) g)`.
pub fn act_assoc_grt(t: &AssocTuple, b: &GRTElement) -> Result<AssocTuple, Error> {
    same_trunc(&b.g, &t.phi)?;
    let (x, y) = xy(t.phi.trunc(), max_deg(&t.phi));
    let args = vec![x.scale(&b.lambda), b.g.ad_lie(&y.scale(&b.lambda))];
    Ok(AssocTuple { mu: &b.lambda * &t.mu, phi: subst(&t.phi, &args).mul(&b.g) })
}

/// Images of `X, y(0), …` in `t̄_2^Γ` under the substitution of the left
/// action: `X ↦ μ t_{01}`, `y(a) ↦ Ad(e^{(aμ/N)t_{01}} a·ψ)(μ t^a_{12})`.
fn gtm_substitution_args(t: &CycAssocTuple) -> Vec<LieElement> {
    let tb = t.psi.alg().clone();
    let d = t.psi.trunc();
    let n = t.modulus;
    let mu = &t.base.mu;
    let t01 = tbar_t01(&tb, d);
    let mut args = vec![t01.scale(mu)];
    for a in 0..n as i64 {
        let conj = exp(&t01.scale(&(q(a) * mu / q(n as i64)))).mul(&shift_tbar(&t.psi, a, n));
        args.push(conj.ad_lie(&tbar_ta(&tb, a, d).scale(mu)));
    }
    args
}

/// `(λμ, f·φ, g(ρ(X) | ρ(y(0)), …) ψ)`.
pub fn act_gtm_on_cycassoc(a: &GTMElement, t: &CycAssocTuple) -> Result<CycAssocTuple, Error> {
    if a.modulus != t.modulus {
        return Err(Error::Invalid("moduli differ".into()));
    }
    same_trunc(&a.g, &t.psi)?;
    let base = act_gt_on_assoc(&a.base, &t.base)?;
    let psi = subst(&a.g, &gtm_substitution_args(t)).mul(&t.psi);
    Ok(CycAssocTuple { base, psi, modulus: t.modulus })
}

/// `(λμ, φ·g, S_b(ψ) h)`.
pub fn act_cycassoc_grtgamma(t: &CycAssocTuple, b: &GRTGammaElement) -> Result<CycAssocTuple, Error> {
    if b.modulus != t.modulus {
        return Err(Error::Invalid("moduli differ".into()));
    }
    same_trunc(&b.h, &t.psi)?;
    let base = act_assoc_grt(&t.base, &GRTElement { lambda: b.lambda.clone(), g: b.g.clone() })?;
    let psi = subst(&t.psi, &grtgamma_substitution_args(b)).mul(&b.h);
    Ok(CycAssocTuple { base, psi, modulus: t.modulus })
}

// ---------------------------------------------------------------------------
// defining equations

/// One defining equation `lhs = rhs` in a truncated enveloping algebra.
#[derive(Clone, Debug)]
pub struct Equation {
    pub name: String,
    pub lhs: UEAElement,
    pub rhs: UEAElement,
}

impl Equation {
    fn new(name: &str, lhs: UEAElement, rhs: UEAElement) -> Self {
        Equation { name: name.to_string(), lhs, rhs }
    }

    fn is_one(name: &str, lhs: GroupLike) -> Self {
        let rhs = UEAElement::one(&lhs.0.alg, lhs.trunc());
        Equation::new(name, lhs.0, rhs)
    }

    pub fn residual(&self) -> UEAElement {
        self.lhs.sub(&self.rhs)
    }

    /// Lowest degree in which the two sides differ.
    pub fn first_failure(&self) -> Option<usize> {
        self.residual().min_degree()
    }
}

type Job<'a> = Box<dyn FnOnce() -> Equation + Send + 'a>;

fn run_jobs(jobs: Vec<Job<'_>>) -> Vec<Equation> {
    thread::scope(|s| {
        let handles: Vec<_> = jobs.into_iter().map(|j| s.spawn(j)).collect();
        handles.into_iter().map(|h| h.join().expect("equation worker panicked")).collect()
    })
}

fn tt(alg: &Arc<LieAlgebra>, i: u32, j: u32, a: i64, t: usize) -> LieElement {
    LieElement::t(alg, i, j, a).truncated(t)
}

fn t0(alg: &Arc<LieAlgebra>, i: u32, t: usize) -> LieElement {
    LieElement::t0(alg, i).truncated(t)
}

/// `s(y, x) s(x, y) = 1`.
pub fn duality_equation(s: &GroupLike) -> Equation {
    let (x, y) = xy(s.trunc(), max_deg(s));
    Equation::is_one("duality", subst(s, &[y, x]).mul(s))
}

/// `φ^{1,2,3} e^{μt_{23}/2} φ^{2,3,1} e^{μt_{31}/2} φ^{3,1,2} e^{μt_{12}/2} = e^{μ(t_{12}+t_{13}+t_{23})/2}`.
pub fn hexagon_equation(mu: &Q, phi: &GroupLike) -> Equation {
    let t = phi.trunc();
    let t3 = t_algebra(&[1, 2, 3], max_deg(phi));
    let (t12, t13, t23) = (tt(&t3, 1, 2, 0, t), tt(&t3, 1, 3, 0, t), tt(&t3, 2, 3, 0, t));
    let half = mu / q(2);
    let e = |a: &LieElement| exp(&a.scale(&half));
    let p = |a: &LieElement, b: &LieElement| subst(phi, &[a.clone(), b.clone()]);
    let lhs = p(&t12, &t23).mul(&e(&t23)).mul(&p(&t23, &t13)).mul(&e(&t13)).mul(&p(&t13, &t12)).mul(&e(&t12));
    let rhs = exp(&t12.add(&t13).add(&t23).scale(&half));
    Equation::new("hexagon", lhs.0, rhs.0)
}

/// `φ^{1,2,3} φ^{1,23,4} φ^{2,3,4} = φ^{12,3,4} φ^{1,2,34}` in `exp(t̂_4)`.
pub fn pentagon_equation(phi: &GroupLike) -> Equation {
    let t = phi.trunc();
    let t4 = t_algebra(&[1, 2, 3, 4], max_deg(phi));
    let e = |i, j| tt(&t4, i, j, 0, t);
    let p = |a: LieElement, b: LieElement| subst(phi, &[a, b]);
    let lhs = p(e(1, 2), e(2, 3)).mul(&p(e(1, 2).add(&e(1, 3)), e(2, 4).add(&e(3, 4)))).mul(&p(e(2, 3), e(3, 4)));
    let rhs = p(e(1, 3).add(&e(2, 3)), e(3, 4)).mul(&p(e(1, 2), e(2, 3).add(&e(2, 4))));
    Equation::new("pentagon", lhs.0, rhs.0)
}

pub fn assoc_equations(t: &AssocTuple) -> Vec<Equation> {
    let (mu, phi) = (&t.mu, &t.phi);
    run_jobs(vec![
        Box::new(move || duality_equation(phi)),
        Box::new(move || hexagon_equation(mu, phi)),
        Box::new(move || pentagon_equation(phi)),
    ])
}

/// `ψ(t_{0i} | t^a_{ij})` in an algebra containing strands `i, j`.
fn psi_at(psi: &GroupLike, alg: &Arc<LieAlgebra>, i: u32, j: u32, shift: i64, n: u32) -> GroupLike {
    let t = psi.trunc();
    let mut args = vec![t0(alg, i, t)];
    args.extend((0..n as i64).map(|a| tt(alg, i, j, a + shift, t)));
    subst(psi, &args)
}

/// `ψ^{01,2,3} ψ^{0,1,23} = ψ^{0,1,2} ψ^{0,12,3} φ^{1,2,3}` in `exp(t̂_3^Γ)`.
pub fn mixed_pentagon_equation(psi: &GroupLike, phi: &GroupLike, n: u32) -> Equation {
    let t = psi.trunc();
    let a3 = tgamma_algebra(&[1, 2, 3], n, max_deg(psi));
    let ni = n as i64;
    let sum12 = (0..ni).fold(LieElement::zero(&a3).truncated(t), |s, c| s.add(&tt(&a3, 1, 2, c, t)));
    let ps = |first: LieElement, rest: &dyn Fn(i64) -> LieElement| {
        let mut args = vec![first];
        args.extend((0..ni).map(rest));
        subst(psi, &args)
    };
    let p01_2_3 = ps(t0(&a3, 2, t).add(&sum12), &|a| tt(&a3, 2, 3, a, t));
    let p0_1_23 = ps(t0(&a3, 1, t), &|a| tt(&a3, 1, 2, a, t).add(&tt(&a3, 1, 3, a, t)));
    let p0_1_2 = ps(t0(&a3, 1, t), &|a| tt(&a3, 1, 2, a, t));
    let p0_12_3 =
        ps(t0(&a3, 1, t).add(&t0(&a3, 2, t)).add(&sum12), &|a| tt(&a3, 1, 3, a, t).add(&tt(&a3, 2, 3, a, t)));
    let f123 = subst(phi, &[tt(&a3, 1, 2, 0, t), tt(&a3, 2, 3, 0, t)]);
    Equation::new("mixed pentagon", p01_2_3.mul(&p0_1_23).0, p0_1_2.mul(&p0_12_3).mul(&f123).0)
}

fn project_tbar(u: &UEAElement) -> UEAElement {
    let (_, m) = center_quotient(&u.alg).expect("arity-two cyclotomic algebra");
    map_uea(&m, u).expect("matching handles")
}

/// `e^{(μ/N)t_{01}} ψ^{0,1,2} e^{(μ/2)t^0_{12}} (ψ^{0,2,1})^{-1} e^{(μ/N)t_{02}}
/// α·(ψ^{0,2,1} e^{(μ/2)t^0_{12}} (ψ^{0,1,2})^{-1}) = 1` in `exp(t̄̂_2^Γ)`,
/// with `α = (0̄, γ)`.
pub fn octogon_equation(mu: &Q, psi: &GroupLike, n: u32, gamma: i64) -> Equation {
    let t = psi.trunc();
    let a2 = tgamma_algebra(&[1, 2], n, max_deg(psi));
    let mu1 = mu / q(n as i64);
    let half = mu / q(2);
    let p012 = psi_at(psi, &a2, 1, 2, 0, n);
    let p021 = psi_at(psi, &a2, 2, 1, 0, n);
    let e_t12 = exp(&tt(&a2, 1, 2, 0, t).scale(&half));
    let a = exp(&t0(&a2, 1, t).scale(&mu1))
        .mul(&p012)
        .mul(&e_t12)
        .mul(&p021.inv())
        .mul(&exp(&t0(&a2, 2, t).scale(&mu1)));
    let b = p021.mul(&e_t12).mul(&p012.inv());
    let alpha = GammaVector::new(n, [(1, 0), (2, gamma)]);
    let ab = map_uea(&gamma_action(&a2, &alpha).expect("cyclotomic"), &b.0).expect("matching handles");
    let lhs = project_tbar(&a.0.mul(&ab));
    let rhs = UEAElement::one(&lhs.alg, lhs.trunc);
    Equation::new("octogon", lhs, rhs)
}

pub fn cycassoc_equations(t: &CycAssocTuple, gamma: i64) -> Vec<Equation> {
    let (mu, phi, psi, n) = (&t.base.mu, &t.base.phi, &t.psi, t.modulus);
    run_jobs(vec![
        Box::new(move || duality_equation(phi)),
        Box::new(move || hexagon_equation(mu, phi)),
        Box::new(move || pentagon_equation(phi)),
        Box::new(move || mixed_pentagon_equation(psi, phi, n)),
        Box::new(move || octogon_equation(mu, psi, n, gamma)),
    ])
}

/// `g^{1,2,3} g^{2,3,1} g^{3,1,2} = 1`.
pub fn grt_cyclic_equation(g: &GroupLike) -> Equation {
    let t = g.trunc();
    let t3 = t_algebra(&[1, 2, 3], max_deg(g));
    let (t12, t13, t23) = (tt(&t3, 1, 2, 0, t), tt(&t3, 1, 3, 0, t), tt(&t3, 2, 3, 0, t));
    let p = |a: &LieElement, b: &LieElement| subst(g, &[a.clone(), b.clone()]);
    Equation::is_one("cyclic", p(&t12, &t23).mul(&p(&t23, &t13)).mul(&p(&t13, &t12)))
}

/// `t_{12} + Ad(g^{1,2,3})(t_{23}) + Ad(g^{2,1,3})(t_{13}) = t_{12} + t_{13} + t_{23}`.
pub fn grt_ad_sum_equation(g: &GroupLike) -> Equation {
    let t = g.trunc();
    let t3 = t_algebra(&[1, 2, 3], max_deg(g));
    let (t12, t13, t23) = (tt(&t3, 1, 2, 0, t), tt(&t3, 1, 3, 0, t), tt(&t3, 2, 3, 0, t));
    let g123 = subst(g, &[t12.clone(), t23.clone()]);
    let g213 = subst(g, &[t12.clone(), t13.clone()]);
    let lhs = t12.add(&g123.ad_lie(&t23)).add(&g213.ad_lie(&t13));
    let rhs = t12.add(&t13).add(&t23);
    Equation::new("ad-sum", UEAElement::from_lie(&lhs), UEAElement::from_lie(&rhs))
}

pub fn grt_equations(b: &GRTElement) -> Vec<Equation> {
    let g = &b.g;
    run_jobs(vec![
        Box::new(move || duality_equation(g)),
        Box::new(move || grt_cyclic_equation(g)),
        Box::new(move || grt_ad_sum_equation(g)),
        Box::new(move || pentagon_equation(g)),
    ])
}

/// `h^{0,1,2} (h^{0,2,1})^{-1} h(t_{02} | t^{γ}_{12}, t^{γ-1}_{12}, …) h(t_{01} | t^{γ}_{12}, …)^{-1} = 1`.
pub fn grtgamma_first_equation(h: &GroupLike, n: u32, gamma: i64) -> Equation {
    let a2 = tgamma_algebra(&[1, 2], n, max_deg(h));
    let h012 = psi_at(h, &a2, 1, 2, 0, n);
    let h021 = psi_at(h, &a2, 2, 1, 0, n);
    let h_second = psi_at(h, &a2, 2, 1, -gamma, n);
    let h_first = psi_at(h, &a2, 1, 2, gamma, n);
    let lhs = h012.mul(&h021.inv()).mul(&h_second).mul(&h_first.inv());
    let lhs = project_tbar(&lhs.0);
    let rhs = UEAElement::one(&lhs.alg, lhs.trunc);
    Equation::new("grtgamma-1", lhs, rhs)
}

/// `t_{01} + Σ_a Ad(a·h)(t^a_{12}) + Ad(h^{0,1,2}(h^{0,2,1})^{-1})(t_{02}) = 0` in `t̄̂_2^Γ`.
pub fn grtgamma_second_equation(h: &GroupLike, n: u32) -> Equation {
    let t = h.trunc();
    let a2 = tgamma_algebra(&[1, 2], n, max_deg(h));
    let mut sum = t0(&a2, 1, t);
    for a in 0..n as i64 {
        sum = sum.add(&psi_at(h, &a2, 1, 2, a, n).ad_lie(&tt(&a2, 1, 2, a, t)));
    }
    let conj = psi_at(h, &a2, 1, 2, 0, n).mul(&psi_at(h, &a2, 2, 1, 0, n).inv());
    sum = sum.add(&conj.ad_lie(&t0(&a2, 2, t)));
    let lhs = project_tbar(&UEAElement::from_lie(&sum));
    let rhs = UEAElement::zero(&lhs.alg, lhs.trunc);
    Equation::new("grtgamma-2", lhs, rhs)
}

pub fn grtgamma_equations(b: &GRTGammaElement, gamma: i64) -> Vec<Equation> {
    let (g, h, n) = (&b.g, &b.h, b.modulus);
    let mut eqs = grt_equations(&GRTElement { lambda: b.lambda.clone(), g: g.clone() });
    eqs.extend(run_jobs(vec![
        Box::new(move || grtgamma_first_equation(h, n, gamma)),
        Box::new(move || grtgamma_second_equation(h, n)),
        Box::new(move || {
            let mut e = mixed_pentagon_equation(h, g, n);
            e.name = "grtgamma-3".into();
            e
        }),
    ]));
    eqs
}

/// `x_1^ν f(x_1,x_2) x_2^ν f(x_2,x_3) x_3^ν f(x_3,x_1) = 1`, `x_1x_2x_3 = 1`, `ν = (λ-1)/2`.
pub fn gt_hexagon_equation(lambda: &Q, f: &GroupLike) -> Equation {
    let (x, y) = xy(f.trunc(), max_deg(f));
    let z = exp(&y).mul(&exp(&x)).log().neg();
    let nu = (lambda - Q::one()) / q(2);
    let p = |a: &LieElement, b: &LieElement| subst(f, &[a.clone(), b.clone()]);
    let e = |a: &LieElement| exp(&a.scale(&nu));
    let lhs = e(&x).mul(&p(&x, &y)).mul(&e(&y)).mul(&p(&y, &z)).mul(&e(&z)).mul(&p(&z, &x));
    Equation::is_one("hexagon", lhs)
}

/// An element `K x^s` of the completion of `F_2` relative to `F_2 → Z/N`,
/// `x ↦ 1̄`, `y ↦ 0̄`, with `K` in the completed kernel `F̂_{N+1}` on
/// `X = x^N`, `y(a) = x^a y x^{-a}`.
#[derive(Clone)]
struct RelElem {
    k: GroupLike,
    s: i64,
    n: u32,
}

impl RelElem {
    fn kernel(k: GroupLike, n: u32) -> Self {
        RelElem { k, s: 0, n }
    }

    fn x_power(kal: &Arc<LieAlgebra>, n: u32, t: usize, s: i64) -> Self {
        RelElem { k: GroupLike::one(kal, t), s, n }
    }

    /// `x^s K x^{-s}`.
    fn conj_x(k: &GroupLike, n: u32, s: i64) -> GroupLike {
        if s == 0 {
            return k.clone();
        }
        let kal = k.alg().clone();
        let t = k.trunc();
        let mut args = vec![LieElement::gen(&kal, "X").truncated(t)];
        args.extend((0..n as i64).map(|a| kernel_y(&kal, n, a + s, t)));
        subst(k, &args)
    }

    fn mul(&self, o: &RelElem) -> RelElem {
        RelElem { k: self.k.mul(&RelElem::conj_x(&o.k, self.n, self.s)), s: self.s + o.s, n: self.n }
    }

    fn inv(&self) -> RelElem {
        RelElem { k: RelElem::conj_x(&self.k.inv(), self.n, -self.s), s: -self.s, n: self.n }
    }

    /// The kernel element `K X^{s/N}`; `s` must be divisible by `N`.
    fn into_kernel(self) -> GroupLike {
        let n = self.n as i64;
        assert_eq!(self.s.rem_euclid(n), 0, "element outside the kernel");
        let kal = self.k.alg().clone();
        let x = LieElement::gen(&kal, "X").truncated(self.k.trunc());
        self.k.mul(&exp(&x.scale(&q(self.s / n))))
    }

    /// `w^λ := w (w^N)^{(λ-1)/N}` for `w` of degree `±1` in `Z/N`.
    fn lambda_power(&self, lambda: &Q) -> RelElem {
        let mut wn = RelElem::x_power(self.k.alg(), self.n, self.k.trunc(), 0);
        for _ in 0..self.n {
            wn = wn.mul(self);
        }
        let mu1 = (lambda - Q::one()) / q(self.n as i64);
        let big = exp(&wn.into_kernel().log().scale(&mu1));
        self.mul(&RelElem::kernel(big, self.n))
    }
}

/// `g(w^N | w^a v w^{-a})` for `w` of degree `1̄` and `v` in the kernel.
fn g_at(g: &GroupLike, w: &RelElem, v: &RelElem, n: u32) -> RelElem {
    let mut args = Vec::new();
    let mut wn = RelElem::x_power(g.alg(), n, g.trunc(), 0);
    for _ in 0..n {
        wn = wn.mul(w);
    }
    args.push(wn.into_kernel().log());
    let mut wa = RelElem::x_power(g.alg(), n, g.trunc(), 0);
    for _ in 0..n {
        args.push(wa.mul(v).mul(&wa.inv()).into_kernel().log());
        wa = wa.mul(w);
    }
    RelElem::kernel(subst(g, &args), n)
}

/// `x^λ g(x,y) y^{(λ-1)/2} g(z,y)^{-1} z^λ g(z,y) y^{(λ+1)/2} g(x,y)^{-1} = 1` with `zyx = 1`,
/// in the completion of `F_2` relative to `F_2 → Z/N`, where `x` carries the
/// generator of `Γ` and `w^λ = w (w^N)^{(λ-1)/N}`; `g(z, y)` is read with `z`
/// in place of `x`. The relabelling `α` of the defining octogon is the
/// inverse of the deck transformation carried by `x` (`γ = 1`); for other
/// units `γ` the element is first relabelled by `γ^{-1}`.
pub fn gtm_octogon_equation(lambda: &Q, g: &GroupLike, n: u32, gamma: i64) -> Equation {
    let t = g.trunc();
    let kal = g.alg().clone();
    let g = &relabel_kernel_unit(g, n, gamma);
    let x = RelElem::x_power(&kal, n, t, 1);
    let y = RelElem::kernel(exp(&LieElement::gen(&kal, "y0").truncated(t)), n);
    let ypow = |e: &Q| RelElem::kernel(exp(&LieElement::gen(&kal, "y0").truncated(t).scale(e)), n);
    let z = x.inv().mul(&y.inv());
    let gx = g_at(g, &x, &y, n);
    let gz = g_at(g, &z, &y, n);
    let half = |c: i64| (lambda + q(c)) / q(2);
    let lhs = x
        .lambda_power(lambda)
        .mul(&gx)
        .mul(&ypow(&half(-1)))
        .mul(&gz.inv())
        .mul(&z.lambda_power(lambda))
        .mul(&gz)
        .mul(&ypow(&half(1)))
        .mul(&gx.inv());
    Equation::is_one("cyclotomic octogon", lhs.into_kernel())
}

/// `y(a) ↦ y(ka)` on `F̂_{N+1}` for the inverse `k` of the unit `γ`.
fn relabel_kernel_unit(g: &GroupLike, n: u32, gamma: i64) -> GroupLike {
    let ni = n as i64;
    if gamma.rem_euclid(ni) == 1 % ni {
        return g.clone();
    }
    let k = (1..ni).find(|k| (k * gamma).rem_euclid(ni) == 1).expect("γ must be a unit mod N");
    let kal = g.alg().clone();
    let t = g.trunc();
    let mut args = vec![LieElement::gen(&kal, "X").truncated(t)];
    args.extend((0..ni).map(|a| LieElement::gen(&kal, &format!("y{}", (k * a).rem_euclid(ni))).truncated(t)));
    subst(g, &args)
}

// ---------------------------------------------------------------------------
// validation

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMethod {
    Direct,
    /// Through the action on a reference (cyclotomic) associator.
    Torsor,
}

#[derive(Clone, Debug)]
pub struct EquationVerdict {
    pub name: String,
    pub method: CheckMethod,
    /// Lowest degree at which the equation fails, if any.
    pub first_failure: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub kind: String,
    pub degree: usize,
    pub verdicts: Vec<EquationVerdict>,
    pub notes: Vec<(String, String)>,
}

impl ValidationReport {
    fn new(kind: &str, degree: usize) -> Self {
        ValidationReport { kind: kind.into(), degree, verdicts: Vec::new(), notes: Vec::new() }
    }

    fn push(&mut self, eqs: Vec<Equation>, method: CheckMethod, prefix: &str) {
        for e in eqs {
            self.verdicts.push(EquationVerdict {
                name: format!("{prefix}{}", e.name),
                method,
                first_failure: e.first_failure(),
            });
        }
    }

    pub fn passes(&self) -> bool {
        self.verdicts.iter().all(|v| v.first_failure.is_none())
    }

    /// Largest `d` such that every equation holds through degree `d`.
    pub fn certified_degree(&self) -> usize {
        self.verdicts.iter().filter_map(|v| v.first_failure).map(|d| d - 1).min().unwrap_or(self.degree)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.verdicts.iter().filter_map(|v| v.first_failure).min()
    }

    pub fn to_json(&self) -> Value {
        let verdicts: Vec<Value> = self
            .verdicts
            .iter()
            .map(|v| {
                json!({
                    "equation": v.name,
                    "method": match v.method { CheckMethod::Direct => "direct", CheckMethod::Torsor => "torsor" },
                    "holds": v.first_failure.is_none(),
                    "first_failure": v.first_failure,
                })
            })
            .collect();
        let notes: serde_json::Map<String, Value> =
            self.notes.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        json!({
            "kind": self.kind,
            "degree": self.degree,
            "passes": self.passes(),
            "certified_degree": self.certified_degree(),
            "equations": verdicts,
            "notes": notes,
        })
    }
}

pub fn validate_assoc(t: &AssocTuple) -> ValidationReport {
    let mut r = ValidationReport::new("assoc", t.phi.trunc());
    r.push(assoc_equations(t), CheckMethod::Direct, "");
    r
}

/// Validates a cyclotomic associator for `α = (0̄, γ)`; `γ = 1` is the standard case.
pub fn validate_cycassoc(t: &CycAssocTuple, gamma: i64) -> ValidationReport {
    let mut r = ValidationReport::new("cycassoc", t.psi.trunc());
    r.push(cycassoc_equations(t, gamma), CheckMethod::Direct, "");
    r.notes.push(("mu1".into(), fmt_q(&t.mu1())));
    r
}

pub fn validate_grt(b: &GRTElement) -> ValidationReport {
    let mut r = ValidationReport::new("grt", b.g.trunc());
    r.push(grt_equations(b), CheckMethod::Direct, "");
    r
}

pub fn validate_grtgamma(b: &GRTGammaElement, gamma: i64) -> ValidationReport {
    let mut r = ValidationReport::new("grtgamma", b.h.trunc());
    r.push(grtgamma_equations(b, gamma), CheckMethod::Direct, "");
    r
}

fn missing(what: &str, cmd: &str) -> Error {
    Error::MissingReference(format!("{what} needs a reference associator; run `{cmd}` first and pass it in"))
}

/// Duality and hexagon directly; the pentagon through the action on `reference`.
pub fn validate_gt(a: &GTElement, reference: Option<&AssocTuple>) -> Result<ValidationReport, Error> {
    let reference = reference.ok_or_else(|| missing("the GT pentagon", "solve associator"))?;
    let f = &a.f;
    let lambda = &a.lambda;
    let mut r = ValidationReport::new("gt", f.trunc());
    r.push(
        run_jobs(vec![Box::new(move || duality_equation(f)), Box::new(move || gt_hexagon_equation(lambda, f))]),
        CheckMethod::Direct,
        "",
    );
    let image = act_gt_on_assoc(a, reference)?;
    r.push(vec![pentagon_equation(&image.phi)], CheckMethod::Torsor, "");
    Ok(r)
}

/// `(λ, f)` as for [`validate_gt`], the cyclotomic octogon directly (for
/// `α = γ`), and the mixed pentagon through the action on `reference`.
pub fn validate_gtm(a: &GTMElement, reference: Option<&CycAssocTuple>, gamma: i64) -> Result<ValidationReport, Error> {
    let reference = reference.ok_or_else(|| missing("the GTM mixed pentagon", "solve cyclotomic"))?;
    if reference.modulus != a.modulus {
        return Err(Error::Invalid("reference has a different modulus".into()));
    }
    let mut r = validate_gt(&a.base, Some(&reference.base))?;
    r.kind = "gtm".into();
    r.push(vec![gtm_octogon_equation(&a.base.lambda, &a.g, a.modulus, gamma)], CheckMethod::Direct, "");
    let image = act_gtm_on_cycassoc(a, reference)?;
    r.push(vec![mixed_pentagon_equation(&image.psi, &image.base.phi, a.modulus)], CheckMethod::Torsor, "");
    r.notes.push(("mu1".into(), fmt_q(&a.mu1())));
    Ok(r)
}

// ---------------------------------------------------------------------------
// JSON

/// Any of the six element kinds, for file round trips.
#[derive(Clone, Debug, PartialEq)]
pub enum TorsorElement {
    Gt(GTElement),
    Gtm(GTMElement),
    Grt(GRTElement),
    GrtGamma(GRTGammaElement),
    Assoc(AssocTuple),
    CycAssoc(CycAssocTuple),
}

impl TorsorElement {
    pub fn kind(&self) -> &'static str {
        match self {
            TorsorElement::Gt(_) => "gt",
            TorsorElement::Gtm(_) => "gtm",
            TorsorElement::Grt(_) => "grt",
            TorsorElement::GrtGamma(_) => "grtgamma",
            TorsorElement::Assoc(_) => "assoc",
            TorsorElement::CycAssoc(_) => "cycassoc",
        }
    }

    pub fn to_json(&self, certified_degree: Option<usize>) -> Value {
        let (scalar_name, scalar, n, series) = match self {
            TorsorElement::Gt(a) => ("lambda", &a.lambda, None, json!({"f": a.f.to_json()})),
            TorsorElement::Gtm(a) => {
                ("lambda", &a.base.lambda, Some(a.modulus), json!({"f": a.base.f.to_json(), "g": a.g.to_json()}))
            }
            TorsorElement::Grt(b) => ("lambda", &b.lambda, None, json!({"g": b.g.to_json()})),
            TorsorElement::GrtGamma(b) => {
                ("lambda", &b.lambda, Some(b.modulus), json!({"g": b.g.to_json(), "h": b.h.to_json()}))
            }
            TorsorElement::Assoc(t) => ("mu", &t.mu, None, json!({"phi": t.phi.to_json()})),
            TorsorElement::CycAssoc(t) => {
                ("mu", &t.base.mu, Some(t.modulus), json!({"phi": t.base.phi.to_json(), "psi": t.psi.to_json()}))
            }
        };
        let mut v = json!({"kind": self.kind(), scalar_name: fmt_q(scalar), "series": series});
        if let Some(n) = n {
            v["N"] = json!(n);
        }
        if let Some(d) = certified_degree {
            v["certified_degree"] = json!(d);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let bad = |m: &str| Error::Parse(format!("element file: {m}"));
        let kind = v["kind"].as_str().ok_or_else(|| bad("missing kind"))?;
        let scalar = |name: &str| -> Result<Q, Error> {
            parse_q(v[name].as_str().ok_or_else(|| bad(&format!("missing {name}")))?)
                .ok_or_else(|| bad(&format!("bad {name}")))
        };
        let series = |name: &str| -> Result<GroupLike, Error> {
            let s = v["series"].get(name).ok_or_else(|| bad(&format!("missing series {name}")))?;
            GroupLike::from_json(s)
        };
        let modulus = || -> Result<u32, Error> {
            v["N"].as_u64().filter(|n| *n >= 1).map(|n| n as u32).ok_or_else(|| bad("missing N"))
        };
        Ok(match kind {
            "gt" => TorsorElement::Gt(GTElement::new(scalar("lambda")?, series("f")?)?),
            "gtm" => TorsorElement::Gtm(GTMElement::new(
                GTElement::new(scalar("lambda")?, series("f")?)?,
                series("g")?,
                modulus()?,
            )?),
            "grt" => TorsorElement::Grt(GRTElement::new(scalar("lambda")?, series("g")?)?),
            "grtgamma" => {
                TorsorElement::GrtGamma(GRTGammaElement::new(scalar("lambda")?, series("g")?, series("h")?, modulus()?)?)
            }
            "assoc" => TorsorElement::Assoc(AssocTuple::new(scalar("mu")?, series("phi")?)?),
            "cycassoc" => TorsorElement::CycAssoc(CycAssocTuple::new(
                AssocTuple::new(scalar("mu")?, series("phi")?)?,
                series("psi")?,
                modulus()?,
            )?),
            other => return Err(bad(&format!("unknown kind {other:?}"))),
        })
    }
}
