mod common;

use common::*;
use moperad::assoc_solver::{grt_between, grtgamma_between, gt_between, gtm_between};
use moperad::graded_lie::LieElement;
use moperad::gt_torsors::*;
use moperad::rational::{q, qf};
use moperad::uea::{exp, random_group_like};
use moperad::Error;

const SAMPLES: usize = 20;

#[test]
fn identities_act_trivially() {
    let t = assoc(1);
    assert_eq!(act_gt_on_assoc(&GTElement::identity(D), &t).unwrap(), t);
    assert_eq!(act_assoc_grt(&t, &GRTElement::identity(D)).unwrap(), t);
    for n in 1..=3 {
        let c = cyc_fixture(n);
        assert_eq!(&act_gtm_on_cycassoc(&GTMElement::identity(n, D), c).unwrap(), c);
        assert_eq!(&act_cycassoc_grtgamma(c, &GRTGammaElement::identity(n, D)).unwrap(), c);
    }
}

#[test]
fn identities_are_neutral_and_validate() {
    let mut r = rng(1);
    let a = random_gt(&mut r);
    let id = GTElement::identity(D);
    assert_eq!(gt_compose(&id, &a).unwrap(), a);
    assert_eq!(gt_compose(&a, &id).unwrap(), a);
    let b = random_grt(&mut r);
    assert_eq!(grt_compose(&GRTElement::identity(D), &b).unwrap(), b);
    let m = random_gtm(&mut r, 2);
    assert_eq!(gtm_compose(&GTMElement::identity(2, D), &m).unwrap(), m);
    assert_eq!(gtm_compose(&m, &GTMElement::identity(2, D)).unwrap(), m);
    let h = random_grtgamma(&mut r, 2);
    assert_eq!(grtgamma_compose(&h, &GRTGammaElement::identity(2, D)).unwrap(), h);
    assert_eq!(grtgamma_compose(&GRTGammaElement::identity(2, D), &h).unwrap(), h);

    let t = assoc(1);
    assert!(validate_gt(&id, Some(&t)).unwrap().passes());
    assert!(validate_grt(&GRTElement::identity(D)).passes());
    for n in 1..=3 {
        assert!(validate_gtm(&GTMElement::identity(n, D), Some(cyc_fixture(n)), 1).unwrap().passes());
        assert!(validate_grtgamma(&GRTGammaElement::identity(n, D), 1).passes());
    }
}

#[test]
fn grtgamma_law_with_unit_second_factor() {
    let mut r = rng(2);
    let a = random_grtgamma(&mut r, 3);
    let unit = GRTGammaElement::identity(3, D);
    let c = grtgamma_compose(&a, &unit).unwrap();
    assert_eq!(c.h, a.h);
}

#[test]
fn lambda_components_multiply() {
    let mut r = rng(3);
    let mut a = random_gt(&mut r);
    let mut b = random_gt(&mut r);
    a.lambda = q(2);
    b.lambda = q(3);
    assert_eq!(gt_compose(&a, &b).unwrap().lambda, q(6));
    let mut m1 = random_gtm(&mut r, 2);
    let mut m2 = random_gtm(&mut r, 2);
    m1.base.lambda = q(3);
    m2.base.lambda = qf(1, 3);
    assert_eq!(gtm_compose(&m1, &m2).unwrap().base.lambda, q(1));
    let t = assoc(1);
    assert_eq!(act_gt_on_assoc(&a, &t).unwrap().mu, q(2));
    assert_eq!(act_assoc_grt(&t, &GRTElement::new(q(5), random_group_like(&f2_algebra(D), D, 1, D, &mut r)).unwrap()).unwrap().mu, q(5));
}

#[test]
fn rescaling_is_degreewise() {
    let f2 = f2_algebra(D);
    let x = LieElement::gen(&f2, "x");
    let y = LieElement::gen(&f2, "y");
    let l = x.add(&x.br(&y)).add(&x.br(&x.br(&y)));
    let g = rescale_grt(&exp(&l), &q(2));
    let expected = x.scale(&q(2)).add(&x.br(&y).scale(&q(4))).add(&x.br(&x.br(&y)).scale(&q(8)));
    assert_eq!(g.log(), expected);
}

#[test]
fn group_laws_are_associative() {
    let mut r = rng(4);
    for _ in 0..SAMPLES {
        let (a, b, c) = (random_gt(&mut r), random_gt(&mut r), random_gt(&mut r));
        let left = gt_compose(&gt_compose(&a, &b).unwrap(), &c).unwrap();
        let right = gt_compose(&a, &gt_compose(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
        let (a, b, c) = (random_grt(&mut r), random_grt(&mut r), random_grt(&mut r));
        let left = grt_compose(&grt_compose(&a, &b).unwrap(), &c).unwrap();
        let right = grt_compose(&a, &grt_compose(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }
    for n in 1..=3 {
        for _ in 0..4 {
            let (a, b, c) = (random_gtm(&mut r, n), random_gtm(&mut r, n), random_gtm(&mut r, n));
            let left = gtm_compose(&gtm_compose(&a, &b).unwrap(), &c).unwrap();
            let right = gtm_compose(&a, &gtm_compose(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
            let (a, b, c) = (random_grtgamma(&mut r, n), random_grtgamma(&mut r, n), random_grtgamma(&mut r, n));
            let left = grtgamma_compose(&grtgamma_compose(&a, &b).unwrap(), &c).unwrap();
            let right = grtgamma_compose(&a, &grtgamma_compose(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }
}

#[test]
fn classical_torsor_compatibility() {
    let t = assoc(1);
    let mut r = rng(5);
    for _ in 0..SAMPLES {
        let (a, b) = (random_gt(&mut r), random_gt(&mut r));
        let once = act_gt_on_assoc(&gt_compose(&a, &b).unwrap(), &t).unwrap();
        let twice = act_gt_on_assoc(&a, &act_gt_on_assoc(&b, &t).unwrap()).unwrap();
        assert_eq!(once, twice);

        let (c, d) = (random_grt(&mut r), random_grt(&mut r));
        let once = act_assoc_grt(&t, &grt_compose(&c, &d).unwrap()).unwrap();
        let twice = act_assoc_grt(&act_assoc_grt(&t, &c).unwrap(), &d).unwrap();
        assert_eq!(once, twice);

        let lr = act_assoc_grt(&act_gt_on_assoc(&a, &t).unwrap(), &c).unwrap();
        let rl = act_gt_on_assoc(&a, &act_assoc_grt(&t, &c).unwrap()).unwrap();
        assert_eq!(lr, rl);
    }
}

#[test]
fn cyclotomic_torsor_compatibility() {
    let mut r = rng(6);
    for n in 1..=3 {
        let t = cyc_fixture(n);
        let samples = if n == 2 { SAMPLES } else { 6 };
        for _ in 0..samples {
            let (a, b) = (random_gtm(&mut r, n), random_gtm(&mut r, n));
            let once = act_gtm_on_cycassoc(&gtm_compose(&a, &b).unwrap(), t).unwrap();
            let twice = act_gtm_on_cycassoc(&a, &act_gtm_on_cycassoc(&b, t).unwrap()).unwrap();
            assert_eq!(once, twice, "GTM N={n}");

            let (c, d) = (random_grtgamma(&mut r, n), random_grtgamma(&mut r, n));
            let once = act_cycassoc_grtgamma(t, &grtgamma_compose(&c, &d).unwrap()).unwrap();
            let twice = act_cycassoc_grtgamma(&act_cycassoc_grtgamma(t, &c).unwrap(), &d).unwrap();
            assert_eq!(once, twice, "GRT^Γ N={n}");

            let lr = act_cycassoc_grtgamma(&act_gtm_on_cycassoc(&a, t).unwrap(), &c).unwrap();
            let rl = act_gtm_on_cycassoc(&a, &act_cycassoc_grtgamma(t, &c).unwrap()).unwrap();
            assert_eq!(lr, rl, "commutation N={n}");
        }
    }
}

#[test]
fn conjugated_first_law_is_not_compatible() {
    // The variant with the conjugation on the first argument breaks both
    // associativity and compatibility with the action on some samples.
    let t = assoc(1);
    let mut r = rng(7);
    let mut assoc_failures = 0;
    let mut torsor_failures = 0;
    for _ in 0..SAMPLES {
        let (a, b, c) = (random_gt(&mut r), random_gt(&mut r), random_gt(&mut r));
        let law = GtLaw::ConjugatedFirst;
        let left = gt_compose_with(&gt_compose_with(&a, &b, law).unwrap(), &c, law).unwrap();
        let right = gt_compose_with(&a, &gt_compose_with(&b, &c, law).unwrap(), law).unwrap();
        assoc_failures += usize::from(left != right);
        let once = act_gt_on_assoc(&gt_compose_with(&a, &b, law).unwrap(), &t).unwrap();
        let twice = act_gt_on_assoc(&a, &act_gt_on_assoc(&b, &t).unwrap()).unwrap();
        torsor_failures += usize::from(once != twice);
    }
    assert!(assoc_failures > 0 && torsor_failures > 0, "{assoc_failures} {torsor_failures}");
}

#[test]
fn actions_are_free_on_solver_output() {
    let t = assoc(1);
    for p in moperad::assoc_solver::stabilizers_assoc(&t).unwrap() {
        assert!(p.trivial, "{}", p.to_json());
    }
    for n in 1..=3 {
        for p in moperad::assoc_solver::stabilizers_cycassoc(cyc_fixture(n)).unwrap() {
            assert!(p.trivial, "N={n} {}", p.to_json());
        }
    }
    let mut r = rng(8);
    for _ in 0..SAMPLES {
        let a = random_gt(&mut r);
        if !a.f.is_one() || a.lambda != q(1) {
            assert_ne!(act_gt_on_assoc(&a, &t).unwrap(), t);
        }
    }
}

#[test]
fn elements_between_associators_validate_and_close() {
    let p1 = assoc(1);
    let p2 = assoc_shifted();
    let p3 = assoc(2);
    assert_ne!(p1.phi, p2.phi);

    let (f12, _) = gt_between(&p1, &p2).unwrap();
    let (f23, _) = gt_between(&p2, &p3).unwrap();
    assert_eq!(act_gt_on_assoc(&f12, &p1).unwrap(), p2);
    assert_eq!(f23.lambda, q(2));
    assert!(validate_gt(&f12, Some(&p1)).unwrap().passes());
    assert!(validate_gt(&f23, Some(&p1)).unwrap().passes());
    let f13 = gt_compose(&f23, &f12).unwrap();
    assert!(validate_gt(&f13, Some(&p1)).unwrap().passes());
    assert_eq!(act_gt_on_assoc(&f13, &p1).unwrap(), p3);

    let (g12, _) = grt_between(&p1, &p2).unwrap();
    let (g23, _) = grt_between(&p2, &p3).unwrap();
    assert!(validate_grt(&g12).passes());
    assert!(validate_grt(&g23).passes());
    let g13 = grt_compose(&g12, &g23).unwrap();
    assert!(validate_grt(&g13).passes());
    assert_eq!(act_assoc_grt(&p1, &g13).unwrap(), p3);
}

#[test]
fn cyclotomic_elements_between_validate_and_close() {
    for n in 1..=2 {
        let c1 = cyc_fixture(n).clone();
        let c2 = cyc(&assoc_shifted(), n, 1);
        let c3 = cyc(&assoc(2), n, 0);

        let (m12, _) = gtm_between(&c1, &c2).unwrap();
        let (m23, _) = gtm_between(&c2, &c3).unwrap();
        assert_eq!(m23.base.lambda, q(2));
        assert_eq!(act_gtm_on_cycassoc(&m12, &c1).unwrap(), c2);
        assert!(validate_gtm(&m12, Some(&c1), 1).unwrap().passes(), "N={n}");
        assert!(validate_gtm(&m23, Some(&c1), 1).unwrap().passes(), "N={n}");
        let m13 = gtm_compose(&m23, &m12).unwrap();
        assert!(validate_gtm(&m13, Some(&c1), 1).unwrap().passes(), "N={n}");
        assert_eq!(act_gtm_on_cycassoc(&m13, &c1).unwrap(), c3);

        let (h12, _) = grtgamma_between(&c1, &c2).unwrap();
        let (h23, _) = grtgamma_between(&c2, &c3).unwrap();
        assert!(validate_grtgamma(&h12, 1).passes(), "N={n}");
        assert!(validate_grtgamma(&h23, 1).passes(), "N={n}");
        let h13 = grtgamma_compose(&h12, &h23).unwrap();
        assert!(validate_grtgamma(&h13, 1).passes(), "N={n}");
        assert_eq!(act_cycassoc_grtgamma(&c1, &h13).unwrap(), c3);
    }
}

#[test]
fn perturbations_are_detected() {
    let p = assoc(1);
    let f2 = p.phi.alg().clone();
    let xy = LieElement::gen(&f2, "x").br(&LieElement::gen(&f2, "y"));
    let bad = AssocTuple { mu: p.mu.clone(), phi: p.phi.mul(&exp(&xy.scale(&qf(1, 5)).truncated(D))) };
    let report = validate_assoc(&bad);
    let hex = report.verdicts.iter().find(|v| v.name == "hexagon").unwrap();
    assert_eq!(hex.first_failure, Some(2));

    // GT hexagon and GTM octogon are not vacuous
    let c1 = cyc_fixture(2);
    let c3 = cyc(&assoc(2), 2, 0);
    let (m, _) = gtm_between(c1, &c3).unwrap();
    let x = LieElement::gen(&f2, "x");
    let f_bad = m.base.f.mul(&exp(&xy.truncated(D)));
    assert_eq!(gt_hexagon_equation(&m.base.lambda, &f_bad).first_failure(), Some(2));
    let f_bad = m.base.f.mul(&exp(&x.br(&xy).truncated(D)));
    assert!(duality_equation(&f_bad).first_failure() == Some(3) || gt_hexagon_equation(&m.base.lambda, &f_bad).first_failure() == Some(3));
    let kal = m.g.alg().clone();
    let (big_x, y0, y1) = (LieElement::gen(&kal, "X"), LieElement::gen(&kal, "y0"), LieElement::gen(&kal, "y1"));
    let octogon = |l: &LieElement| gtm_octogon_equation(&m.base.lambda, &m.g.mul(&exp(&l.truncated(D))), 2, 1).first_failure();
    assert_eq!(octogon(&y0.br(&big_x)), Some(2));
    assert_eq!(octogon(&y0.br(&y1)), Some(3));
    assert_eq!(octogon(&big_x), Some(3));

    // the GRT^Γ equations reject random h
    let mut r = rng(9);
    for n in 1..=3 {
        let mut b = GRTGammaElement::identity(n, D);
        b.h = random_group_like(&b.h.alg().clone(), D, 2, D, &mut r);
        assert!(!validate_grtgamma(&b, 1).passes(), "N={n}");
        b.h = random_group_like(&b.h.alg().clone(), D, 1, 1, &mut r);
        if !b.h.is_one() {
            assert!(!validate_grtgamma(&b, 1).passes(), "N={n}");
        }
    }
}

#[test]
fn validators_need_a_reference() {
    assert!(matches!(validate_gt(&GTElement::identity(D), None), Err(Error::MissingReference(_))));
    let e = validate_gtm(&GTMElement::identity(2, D), None, 1).unwrap_err();
    assert!(e.to_string().contains("solve cyclotomic"));
}

#[test]
fn truncation_mismatch_is_an_error() {
    let a = GTElement::identity(D);
    let b = GTElement::identity(2);
    assert!(gt_compose(&a, &b).is_err());
}

#[test]
fn element_files_round_trip() {
    let mut r = rng(10);
    let elements = vec![
        TorsorElement::Gt(random_gt(&mut r)),
        TorsorElement::Grt(random_grt(&mut r)),
        TorsorElement::Gtm(random_gtm(&mut r, 3)),
        TorsorElement::GrtGamma(random_grtgamma(&mut r, 2)),
        TorsorElement::Assoc(assoc(1)),
        TorsorElement::CycAssoc(cyc_fixture(2).clone()),
    ];
    for e in elements {
        let v = e.to_json(Some(3));
        let text = serde_json::to_string(&v).unwrap();
        let back = TorsorElement::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, e, "{}", e.kind());
        assert_eq!(v["certified_degree"], 3);
    }
    assert!(TorsorElement::from_json(&serde_json::json!({"kind": "nope"})).is_err());
}
