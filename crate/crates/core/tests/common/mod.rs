#![allow(dead_code)]

use std::sync::OnceLock;

use moperad::assoc_solver::{solve_associator, solve_associator_with, solve_cyclotomic_with, FreeChoices};
use moperad::graded_lie::{kernel_algebra, tbar2_algebra};
use moperad::gt_torsors::*;
use moperad::rational::{q, qf, Q};
use moperad::uea::random_group_like;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const D: usize = 3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn assoc(mu: i64) -> AssocTuple {
    solve_associator(&q(mu), D).unwrap().assoc().unwrap().clone()
}

/// μ = 1 with the free degree-3 coordinates set to 1, so it differs from `assoc(1)`.
pub fn assoc_shifted() -> AssocTuple {
    let mut ch = FreeChoices::new();
    ch.insert((3, 0), q(1));
    ch.insert((3, 1), q(1));
    solve_associator_with(&q(1), D, &ch).unwrap().assoc().unwrap().clone()
}

pub fn cyc(base: &AssocTuple, n: u32, free_value: i64) -> CycAssocTuple {
    let mut ch = FreeChoices::new();
    for d in 1..=D {
        for j in 0..8 {
            ch.insert((d, j), q(free_value));
        }
    }
    solve_cyclotomic_with(base, n, D, &ch, 1).unwrap().cycassoc().unwrap().clone()
}

pub fn cyc_fixture(n: u32) -> &'static CycAssocTuple {
    static C: [OnceLock<CycAssocTuple>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    C[(n - 1) as usize].get_or_init(|| cyc(&assoc(1), n, 0))
}

pub fn random_lambda<R: Rng>(r: &mut R) -> Q {
    const CHOICES: [(i64, i64); 6] = [(1, 1), (2, 1), (-1, 1), (1, 2), (3, 1), (-2, 3)];
    let (a, b) = CHOICES[r.gen_range(0..CHOICES.len())];
    qf(a, b)
}

pub fn random_gt<R: Rng>(r: &mut R) -> GTElement {
    GTElement::new(random_lambda(r), random_group_like(&f2_algebra(D), D, 1, D, r)).unwrap()
}

pub fn random_grt<R: Rng>(r: &mut R) -> GRTElement {
    GRTElement::new(random_lambda(r), random_group_like(&f2_algebra(D), D, 1, D, r)).unwrap()
}

pub fn random_gtm<R: Rng>(r: &mut R, n: u32) -> GTMElement {
    let base = random_gt(r);
    GTMElement::new(base, random_group_like(&kernel_algebra(n, D), D, 1, D, r), n).unwrap()
}

pub fn random_grtgamma<R: Rng>(r: &mut R, n: u32) -> GRTGammaElement {
    let g = random_group_like(&f2_algebra(D), D, 1, D, r);
    let h = random_group_like(&tbar2_algebra(n, D), D, 1, D, r);
    GRTGammaElement::new(random_lambda(r), g, h, n).unwrap()
}
