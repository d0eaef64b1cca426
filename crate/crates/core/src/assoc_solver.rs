//! Degree-by-degree construction of truncated associators and cyclotomic
//! associators. At each degree the unknowns are the coordinates of the
//! degree-`d` part of the logarithm; the defining equations, read in degree
//! `d`, are affine in them and are solved exactly.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::thread;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::graded_lie::{kernel_algebra, tbar2_algebra, LieAlgebra, LieElement};
use crate::gt_torsors::{
    act_assoc_grt, act_cycassoc_grtgamma, act_gt_on_assoc, act_gtm_on_cycassoc, assoc_equations,
    cycassoc_equations, f2_algebra, validate_assoc, validate_cycassoc, AssocTuple, CycAssocTuple, GRTElement,
    GRTGammaElement, GTElement, GTMElement, TorsorElement,
};
use crate::linalg::{solve_affine_with, SparseVec};
use crate::rational::{fmt_q, Q};
use crate::uea::{exp, GroupLike, Monomial, UEAElement};
use crate::Error;

/// Values for coordinates left free by the equations, keyed by
/// `(degree, position within the degree)`. Absent entries are 0.
pub type FreeChoices = BTreeMap<(usize, usize), Q>;

#[derive(Clone, Debug)]
pub struct DegreeStats {
    pub degree: usize,
    pub equations: usize,
    pub unknowns: usize,
    pub rank: usize,
    /// Dimension of the affine solution space in this degree.
    pub dimension: usize,
    /// Nonzero coordinates of the chosen degree-`d` part of the logarithm.
    pub representative: Vec<(String, Q)>,
}

impl DegreeStats {
    pub fn to_json(&self) -> Value {
        let rep: Vec<Value> = self.representative.iter().map(|(l, c)| json!([l, fmt_q(c)])).collect();
        json!({
            "degree": self.degree,
            "equations": self.equations,
            "unknowns": self.unknowns,
            "rank": self.rank,
            "dimension": self.dimension,
            "representative": rep,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SeriesSolution {
    pub series: GroupLike,
    pub degrees: Vec<DegreeStats>,
}

type Residual<'a> = dyn Fn(&GroupLike) -> Vec<UEAElement> + Sync + 'a;

fn degree_rows(res: &[UEAElement], d: usize) -> BTreeMap<(usize, Monomial), Q> {
    let mut out = BTreeMap::new();
    for (k, r) in res.iter().enumerate() {
        for (m, c) in r.degree_part(d).terms {
            out.insert((k, m), c);
        }
    }
    out
}

fn dump_system(alg: &Arc<LieAlgebra>, d: usize, rows: &[(SparseVec, Q)]) -> String {
    let range = alg.degree_range(d);
    let unknowns: Vec<String> = range.clone().map(|i| alg.basis_label(i)).collect();
    let rows: Vec<Value> = rows
        .iter()
        .map(|(a, b)| {
            let coeffs: Vec<Value> = a.iter().map(|(j, c)| json!([j, fmt_q(c)])).collect();
            json!({"coefficients": coeffs, "rhs": fmt_q(b)})
        })
        .collect();
    json!({"algebra": alg.id(), "degree": d, "unknowns": unknowns, "rows": rows}).to_string()
}

/// Solves `residual(exp(ℓ)) = 0` for `ℓ` in `alg`, one degree at a time,
/// from degree `start` up to `degree`; the degree-`< start` part of `ℓ` is 0.
/// The residual, read in degree `d`, must be affine in the degree-`d`
/// coordinates once the lower ones are fixed.
pub fn solve_series(
    alg: &Arc<LieAlgebra>,
    degree: usize,
    start: usize,
    choices: &FreeChoices,
    residual: &Residual<'_>,
) -> Result<SeriesSolution, Error> {
    if degree > alg.max_degree {
        return Err(Error::Invalid(format!("degree {degree} exceeds the algebra cap {}", alg.max_degree)));
    }
    let mut log = LieElement::zero(alg);
    let mut degrees = Vec::new();
    for d in start.max(1)..=degree {
        let base = log.truncated(d);
        let range = alg.degree_range(d);
        let n = range.len();
        let r0 = degree_rows(&residual(&exp(&base)), d);
        let cols: Vec<BTreeMap<(usize, Monomial), Q>> = thread::scope(|s| {
            let handles: Vec<_> = range
                .clone()
                .map(|i| {
                    let mut e = base.clone();
                    e.coords.insert(i, Q::one());
                    s.spawn(move || degree_rows(&residual(&exp(&e)), d))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("solver worker panicked")).collect()
        });
        let mut keyed: BTreeMap<(usize, Monomial), (SparseVec, Q)> = BTreeMap::new();
        for (key, c) in &r0 {
            keyed.entry(key.clone()).or_insert_with(|| (SparseVec::new(), Q::zero())).1 = -c.clone();
        }
        for (j, col) in cols.iter().enumerate() {
            let keys: std::collections::BTreeSet<&(usize, Monomial)> = col.keys().chain(r0.keys()).collect();
            for key in keys {
                let a = col.get(key).cloned().unwrap_or_else(Q::zero) - r0.get(key).cloned().unwrap_or_else(Q::zero);
                if !a.is_zero() {
                    keyed.entry(key.clone()).or_insert_with(|| (SparseVec::new(), Q::zero())).0.insert(j, a);
                }
            }
        }
        let rows: Vec<(SparseVec, Q)> = keyed.into_values().collect();
        let sol = solve_affine_with(&rows, n, |j| choices.get(&(d, j)).cloned().unwrap_or_else(Q::zero))
            .map_err(|_| Error::Obstruction { degree: d, details: dump_system(alg, d, &rows) })?;
        let mut rep = Vec::new();
        for (j, v) in sol.values.iter().enumerate() {
            if !v.is_zero() {
                log.coords.insert(range.start + j, v.clone());
                rep.push((alg.basis_label(range.start + j), v.clone()));
            }
        }
        degrees.push(DegreeStats {
            degree: d,
            equations: rows.len(),
            unknowns: n,
            rank: sol.rank,
            dimension: n - sol.rank,
            representative: rep,
        });
    }
    Ok(SeriesSolution { series: exp(&log.truncated(degree)), degrees })
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub kind: String,
    pub certified_degree: usize,
    pub solution: TorsorElement,
    pub degrees: Vec<DegreeStats>,
}

impl SolveReport {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "certified_degree": self.certified_degree,
            "solution": self.solution.to_json(Some(self.certified_degree)),
            "degrees": self.degrees.iter().map(|d| d.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn assoc(&self) -> Option<&AssocTuple> {
        match &self.solution {
            TorsorElement::Assoc(t) => Some(t),
            _ => None,
        }
    }

    pub fn cycassoc(&self) -> Option<&CycAssocTuple> {
        match &self.solution {
            TorsorElement::CycAssoc(t) => Some(t),
            _ => None,
        }
    }
}

fn residuals(eqs: Vec<crate::gt_torsors::Equation>) -> Vec<UEAElement> {
    eqs.iter().map(|e| e.residual()).collect()
}

pub fn solve_associator(mu: &Q, degree: usize) -> Result<SolveReport, Error> {
    solve_associator_with(mu, degree, &FreeChoices::new())
}

/// Duality, hexagon and pentagon, solved for `log φ` in `f_2`.
pub fn solve_associator_with(mu: &Q, degree: usize, choices: &FreeChoices) -> Result<SolveReport, Error> {
    if mu.is_zero() {
        return Err(Error::Invalid("μ must be nonzero".into()));
    }
    if degree == 0 {
        return Err(Error::Invalid("degree must be at least 1".into()));
    }
    let f2 = f2_algebra(degree);
    let res = |phi: &GroupLike| residuals(assoc_equations(&AssocTuple { mu: mu.clone(), phi: phi.clone() }));
    let sol = solve_series(&f2, degree, 1, choices, &res)?;
    let t = AssocTuple { mu: mu.clone(), phi: sol.series };
    let certified_degree = validate_assoc(&t).certified_degree();
    Ok(SolveReport { kind: "assoc".into(), certified_degree, solution: TorsorElement::Assoc(t), degrees: sol.degrees })
}

pub fn solve_cyclotomic(base: &AssocTuple, n: u32, degree: usize) -> Result<SolveReport, Error> {
    solve_cyclotomic_with(base, n, degree, &FreeChoices::new(), 1)
}

/// Mixed pentagon and octogon (for `α = (0̄, γ)`), solved for `log ψ` in
/// `t̄_2^Γ`, over a fixed `(μ, φ)`.
pub fn solve_cyclotomic_with(
    base: &AssocTuple,
    n: u32,
    degree: usize,
    choices: &FreeChoices,
    gamma: i64,
) -> Result<SolveReport, Error> {
    if n == 0 {
        return Err(Error::Invalid("N must be at least 1".into()));
    }
    if degree == 0 || degree > base.phi.trunc() {
        return Err(Error::Invalid(format!("degree must be in 1..={}", base.phi.trunc())));
    }
    let base_report = validate_assoc(base);
    if base_report.certified_degree() < degree {
        return Err(Error::Invalid(format!(
            "base associator only holds through degree {}",
            base_report.certified_degree()
        )));
    }
    let tb = tbar2_algebra(n, degree);
    let base = AssocTuple { mu: base.mu.clone(), phi: rebase(&base.phi, &f2_algebra(degree)) };
    let res = |psi: &GroupLike| {
        let t = CycAssocTuple { base: AssocTuple { mu: base.mu.clone(), phi: base.phi.truncated(psi.trunc()) }, psi: psi.clone(), modulus: n };
        // the base equations hold already; only the ψ-equations carry unknowns
        residuals(cycassoc_equations(&t, gamma).into_iter().skip(3).collect())
    };
    let sol = solve_series(&tb, degree, 1, choices, &res)?;
    let t = CycAssocTuple { base, psi: sol.series, modulus: n };
    let certified_degree = validate_cycassoc(&t, gamma).certified_degree();
    Ok(SolveReport {
        kind: "cycassoc".into(),
        certified_degree,
        solution: TorsorElement::CycAssoc(t),
        degrees: sol.degrees,
    })
}

/// Moves a series to the same presentation with a different degree cap.
pub fn rebase(g: &GroupLike, alg: &Arc<LieAlgebra>) -> GroupLike {
    if g.alg().id() == alg.id() && g.alg().max_degree == alg.max_degree {
        return g.clone();
    }
    let l = g.log();
    let t = l.trunc.min(alg.max_degree);
    let mut out = LieElement::zero(alg).truncated(t);
    for d in 1..=t {
        let (src, dst) = (l.alg.degree_range(d), alg.degree_range(d));
        for (i, c) in l.coords.range(src.clone()) {
            out.coords.insert(dst.start + (i - src.start), c.clone());
        }
    }
    exp(&out)
}

// ---------------------------------------------------------------------------
// transitivity and freeness probes

fn same_degree(a: &GroupLike, b: &GroupLike) -> Result<usize, Error> {
    if a.trunc() != b.trunc() {
        return Err(Error::Invalid("truncation mismatch".into()));
    }
    Ok(a.trunc())
}

/// The `GRT` element `b` with `t·b = t'`, found degree by degree.
pub fn grt_between(t: &AssocTuple, t2: &AssocTuple) -> Result<(GRTElement, SeriesSolution), Error> {
    let d = same_degree(&t.phi, &t2.phi)?;
    let lambda = &t2.mu / &t.mu;
    let res = |g: &GroupLike| {
        let t_d = AssocTuple { mu: t.mu.clone(), phi: t.phi.truncated(g.trunc()) };
        let out = act_assoc_grt(&t_d, &GRTElement { lambda: lambda.clone(), g: g.clone() }).expect("matching truncation");
        vec![out.phi.0.sub(&t2.phi.truncated(g.trunc()).0)]
    };
    let sol = solve_series(t.phi.alg(), d, 1, &FreeChoices::new(), &res)?;
    Ok((GRTElement { lambda, g: sol.series.clone() }, sol))
}

/// The `GT` element `a` with `a·t = t'`, found degree by degree.
pub fn gt_between(t: &AssocTuple, t2: &AssocTuple) -> Result<(GTElement, SeriesSolution), Error> {
    let d = same_degree(&t.phi, &t2.phi)?;
    let lambda = &t2.mu / &t.mu;
    let res = |f: &GroupLike| {
        let t_d = AssocTuple { mu: t.mu.clone(), phi: t.phi.truncated(f.trunc()) };
        let out = act_gt_on_assoc(&GTElement { lambda: lambda.clone(), f: f.clone() }, &t_d).expect("matching truncation");
        vec![out.phi.0.sub(&t2.phi.truncated(f.trunc()).0)]
    };
    let sol = solve_series(t.phi.alg(), d, 1, &FreeChoices::new(), &res)?;
    Ok((GTElement { lambda, f: sol.series.clone() }, sol))
}

/// The `GRT^Γ` element `b` with `t·b = t'`.
pub fn grtgamma_between(t: &CycAssocTuple, t2: &CycAssocTuple) -> Result<(GRTGammaElement, SeriesSolution), Error> {
    if t.modulus != t2.modulus {
        return Err(Error::Invalid("moduli differ".into()));
    }
    let d = same_degree(&t.psi, &t2.psi)?;
    let (g, _) = grt_between(&t.base, &t2.base)?;
    let res = |h: &GroupLike| {
        let k = h.trunc();
        let t_d = truncate_cyc(t, k);
        let b = GRTGammaElement { lambda: g.lambda.clone(), g: g.g.truncated(k), h: h.clone(), modulus: t.modulus };
        let out = act_cycassoc_grtgamma(&t_d, &b).expect("matching truncation");
        vec![out.psi.0.sub(&t2.psi.truncated(k).0)]
    };
    let sol = solve_series(t.psi.alg(), d, 1, &FreeChoices::new(), &res)?;
    Ok((GRTGammaElement { lambda: g.lambda, g: g.g, h: sol.series.clone(), modulus: t.modulus }, sol))
}

/// The `GTM` element `a` with `a·t = t'`.
pub fn gtm_between(t: &CycAssocTuple, t2: &CycAssocTuple) -> Result<(GTMElement, SeriesSolution), Error> {
    if t.modulus != t2.modulus {
        return Err(Error::Invalid("moduli differ".into()));
    }
    let d = same_degree(&t.psi, &t2.psi)?;
    let (f, _) = gt_between(&t.base, &t2.base)?;
    let kal = kernel_algebra(t.modulus, t.psi.alg().max_degree);
    let res = |g: &GroupLike| {
        let k = g.trunc();
        let t_d = truncate_cyc(t, k);
        let a = GTMElement {
            base: GTElement { lambda: f.lambda.clone(), f: f.f.truncated(k) },
            g: g.clone(),
            modulus: t.modulus,
        };
        let out = act_gtm_on_cycassoc(&a, &t_d).expect("matching truncation");
        vec![out.psi.0.sub(&t2.psi.truncated(k).0)]
    };
    let sol = solve_series(&kal, d, 1, &FreeChoices::new(), &res)?;
    Ok((GTMElement { base: f, g: sol.series.clone(), modulus: t.modulus }, sol))
}

fn truncate_cyc(t: &CycAssocTuple, k: usize) -> CycAssocTuple {
    CycAssocTuple {
        base: AssocTuple { mu: t.base.mu.clone(), phi: t.base.phi.truncated(k) },
        psi: t.psi.truncated(k),
        modulus: t.modulus,
    }
}

/// Per-degree dimension of the solution space of `x·t = t` (left and right
/// stabilizers) together with whether the solution found is the identity.
#[derive(Clone, Debug)]
pub struct StabilizerProbe {
    pub side: String,
    pub dimensions: Vec<usize>,
    pub trivial: bool,
}

impl StabilizerProbe {
    fn from(side: &str, sol: &SeriesSolution) -> Self {
        StabilizerProbe {
            side: side.into(),
            dimensions: sol.degrees.iter().map(|d| d.dimension).collect(),
            trivial: sol.series.is_one() && sol.degrees.iter().all(|d| d.dimension == 0),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"side": self.side, "dimensions": self.dimensions, "trivial": self.trivial})
    }
}

pub fn stabilizers_assoc(t: &AssocTuple) -> Result<Vec<StabilizerProbe>, Error> {
    let (_, left) = gt_between(t, t)?;
    let (_, right) = grt_between(t, t)?;
    Ok(vec![StabilizerProbe::from("GT", &left), StabilizerProbe::from("GRT", &right)])
}

pub fn stabilizers_cycassoc(t: &CycAssocTuple) -> Result<Vec<StabilizerProbe>, Error> {
    let (_, left) = gtm_between(t, t)?;
    let (_, right) = grtgamma_between(t, t)?;
    Ok(vec![StabilizerProbe::from("GTM", &left), StabilizerProbe::from("GRT^Γ", &right)])
}
