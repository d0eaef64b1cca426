use moperad::braid_engine::{self, block_cross, cable, full_twist, is_identity, BraidWord};
use moperad::graded_lie::GammaVector;
use moperad::par_groupoids::*;

fn obj(s: &str) -> ParObject {
    ParObject::parse(s).unwrap()
}

#[test]
fn generator_endpoints() {
    let psi = MorWord::generator(Head::Psi, obj("((0 1) 2)"), vec![obj("0"), obj("1"), obj("2")], None).unwrap();
    assert_eq!(psi.target(), &obj("(0 (1 2))"));
    let e = MorWord::generator(Head::E, obj("(0 1_0)"), vec![obj("0"), obj("1_0")], Some(3)).unwrap();
    assert_eq!(e.target(), &obj("(0 1_1)"));
    let r = MorWord::generator(Head::R, obj("(1 2)"), vec![obj("1"), obj("2")], None).unwrap();
    assert_eq!(r.target(), &obj("(2 1)"));
    assert!(MorWord::generator(Head::E, obj("(1 2)"), vec![obj("1"), obj("2")], None).is_err());
    assert!(MorWord::generator(Head::R, obj("((1 2) 3)"), vec![obj("1"), obj("3")], None).is_err());
}

#[test]
fn generator_braids() {
    let phi = MorWord::parse("((1 2) 3)", "Phi[1; 2; 3]", None).unwrap();
    assert!(is_identity(&phi.evaluate_to_braid()));
    let e = MorWord::parse("(0 1)", "E[0; 1]", None).unwrap();
    assert!(braid_engine::equal(&e.evaluate_to_braid(), &BraidWord::parse("s0 s0", 2, 0).unwrap()).unwrap());
    let r = MorWord::parse("(1 2)", "R[1; 2]", None).unwrap();
    assert_eq!(r.evaluate_to_braid(), BraidWord::sigma(2, 0, 1));
    let rt = MorWord::parse("(1 2)", "Rt[1; 2]", None).unwrap();
    assert_eq!(rt.target(), r.target());
    assert!(!equal_morphisms(&r, &rt).unwrap());
}

#[test]
fn compose_and_invert() {
    let w = MorWord::parse("((0 1) 2)", "Psi[0; 1; 2] R[1; 2] Psi[0; 2; 1]^-1 E[0; 2]", None).unwrap();
    let id = MorWord::identity(w.source.clone(), None).unwrap();
    assert!(equal_morphisms(&w.compose(&w.invert()).unwrap(), &id).unwrap());
    assert!(w.compose(&w).is_err());
    let psi = MorWord::parse("((0 1) 2)", "Psi[0; 1; 2]", None).unwrap();
    assert!(equal_morphisms(&psi.compose(&psi.invert()).unwrap(), &id).unwrap());
    let e = MorWord::parse("(0 1)", "E[0; 1]", None).unwrap();
    assert!(!equal_morphisms(&e, &e.invert()).unwrap());
}

#[test]
fn label_wraps_after_n_turns() {
    for n in 1..=4 {
        let w = e_power(n as usize, n);
        assert!(w.is_endomorphism());
        assert!(w.gamma_weight(n).unwrap().is_zero());
        let partial = e_power(1, n);
        assert_eq!(partial.gamma_weight(n).unwrap().get(1), 1 % n);
    }
}

#[test]
fn object_compositions() {
    let a = obj("((0 2_1) 1_2)");
    assert_eq!(obj_compose_i(&a, 2, &obj("((1 2) 3)")).unwrap(), obj("((0 ((2_1 3_1) 4_1)) 1_2)"));
    assert_eq!(obj_compose_0(&a, &obj("((0 2_3) 1_0)")).unwrap(), obj("((((0 2_3) 1_0) 4_1) 3_2)"));
    assert_eq!(obj_compose_i(&obj("(1 2)"), 2, &obj("1")).unwrap(), obj("(1 2)"));
    assert!(obj_compose_0(&obj("(1 2)"), &obj("(0 1)")).is_err());
}

#[test]
fn morphism_compositions() {
    let r = MorWord::parse("(1 2)", "R[1; 2]", None).unwrap();
    let id12 = MorWord::identity(obj("(1 2)"), None).unwrap();
    let c = mor_compose_i(&r, 1, &id12).unwrap();
    assert_eq!(c.source, obj("((1 2) 3)"));
    assert_eq!(c.target(), &obj("(3 (1 2))"));
    assert!(braid_engine::equal(&c.evaluate_to_braid(), &block_cross(2, 1)).unwrap());

    let id = mor_compose_i(&id12, 2, &id12).unwrap();
    assert!(id.letters.is_empty());

    let psi = MorWord::parse("((0 1) 2)", "Psi[0; 1; 2]", None).unwrap();
    let pp = mor_compose_0(&psi, &psi).unwrap();
    assert_eq!(pp.source, obj("((((0 1) 2) 3) 4)"));
    assert_eq!(pp.target(), &obj("((0 (1 2)) (3 4))"));
}

fn random_pab_word(seed: u64) -> MorWord {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut w = MorWord::identity(obj("((1 2) 3)"), None).unwrap();
    for _ in 0..6 {
        let choices = [
            "R[1; 2]", "R[2; 1]", "R[(1 2); 3]", "R[3; (1 2)]", "Rt[1; 2]", "Phi[1; 2; 3]", "Phi[1; 2; 3]^-1",
            "R[(2 1); 3]", "R[2; 3]", "R[3; 2]", "R[1; 3]", "R[3; 1]", "Phi[2; 1; 3]", "Phi[3; 1; 2]^-1",
        ];
        for _ in 0..20 {
            let pick = choices[rng.gen_range(0..choices.len())];
            let step = MorWord::parse(&w.target().to_string(), pick, None);
            if let Ok(step) = step {
                w = w.compose(&step).unwrap();
                break;
            }
        }
    }
    w
}

#[test]
fn evaluation_is_a_functor_for_insertions() {
    let inner = MorWord::parse("(1 2)", "R[1; 2]", None).unwrap();
    for seed in 0..20 {
        let f = random_pab_word(seed);
        for i in 1..=3u32 {
            let c = mor_compose_i(&f, i, &inner).unwrap();
            let pos = f.source.leaves().iter().position(|n| *n == i).unwrap();
            let tpos = f.target().leaves().iter().position(|n| *n == i).unwrap();
            let expect = cable(&f.evaluate_to_braid(), pos, 2).unwrap().compose(&BraidWord::sigma(4, tpos, 1));
            assert!(braid_engine::equal(&c.evaluate_to_braid(), &expect).unwrap(), "seed {seed} i {i}");
        }
    }
    // The frozen insertion is plain cabling of strand 0, also for E.
    let e = MorWord::parse("(0 1)", "E[0; 1]", None).unwrap();
    let inner0 = MorWord::identity(obj("(0 1)"), None).unwrap();
    let c = mor_compose_0(&e, &inner0).unwrap();
    assert_eq!(c.to_string(), MorWord::parse("((0 1) 2)", "E[(0 1); 2]", None).unwrap().to_string());
    assert!(braid_engine::equal(&c.evaluate_to_braid(), &cable(&e.evaluate_to_braid(), 0, 2).unwrap()).unwrap());
    // Inserting into the moving strand of E carries the framing twist of the inserted block.
    let c = mor_compose_i(&e, 1, &MorWord::identity(obj("(1 2)"), None).unwrap()).unwrap();
    let expect = cable(&e.evaluate_to_braid(), 1, 2).unwrap().compose(&full_twist(2).shifted(1, 3));
    assert!(braid_engine::equal(&c.evaluate_to_braid(), &expect).unwrap());
}

#[test]
fn gamma_action_commutes_with_compositions() {
    let n = 3;
    let a = MorWord::parse("((0 1_0) 2_0)", "Psi[0; 1_0; 2_0] E[0; (1_0 2_0)] Psi[0; 1_1; 2_1]^-1", Some(n)).unwrap();
    let b = MorWord::parse("((0 1_1) 2_1)", "E[(0 1_1); 2_1] Psi[0; 1_1; 2_2]", Some(n)).unwrap();
    let gv = GammaVector::new(n, [(1, 2), (2, 1)]);
    let ab = a.compose(&b).unwrap();
    assert_eq!(ab.gamma_act(&gv).unwrap(), a.gamma_act(&gv).unwrap().compose(&b.gamma_act(&gv).unwrap()).unwrap());

    let r = MorWord::parse("(1 2)", "R[1; 2]", None).unwrap();
    let gv1 = GammaVector::new(n, [(1, 2), (2, 1)]);
    let lhs = mor_compose_i(&a, 2, &r).unwrap().gamma_act(&GammaVector::new(n, [(1, 2), (2, 1), (3, 1)])).unwrap();
    let rhs = mor_compose_i(&a.gamma_act(&gv1).unwrap(), 2, &r).unwrap();
    assert_eq!(lhs, rhs);

    let e = MorWord::parse("(0 1_0)", "E[0; 1_0]", Some(n)).unwrap();
    let lhs = mor_compose_0(&a, &e).unwrap().gamma_act(&GammaVector::new(n, [(1, 1), (2, 2), (3, 1)])).unwrap();
    let rhs = mor_compose_0(&a.gamma_act(&gv1).unwrap(), &e.gamma_act(&GammaVector::new(n, [(1, 1)])).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn gamma_weight_matches_linking_numbers() {
    let n = 4;
    let words = [
        ("(0 1)", "E[0; 1]"),
        ("((0 1) 2)", "E[0; 1] E[(0 1); 2]"),
        ("((0 1) 2)", "Psi[0; 1; 2] E[0; (1 2)] E[0; (1 2)] Psi[0; 1; 2]^-1 E[0; 1]^-1"),
        ("((0 1) 2)", "Psi[0; 1; 2] R[1; 2] Psi[0; 2; 1]^-1 E[0; 2] Psi[0; 2; 1] R[2; 1] Psi[0; 1; 2]^-1"),
        ("((0 1) 2)", "Psi[0; 1; 2] R[1; 2] R[2; 1] Psi[0; 1; 2]^-1"),
    ];
    for (s, w) in words {
        let w = MorWord::parse(s, w, None).unwrap();
        assert!(w.is_endomorphism());
        let gw = w.gamma_weight(n).unwrap();
        for (strand, link) in braid_linking(&w).unwrap() {
            assert_eq!(gw.get(strand) as i64, link.rem_euclid(n as i64), "{w}");
        }
    }
    let plain = MorWord::parse("((0 1) 2)", "Psi[0; 1; 2] R[1; 2] R[2; 1] Psi[0; 1; 2]^-1", None).unwrap();
    assert!(plain.gamma_weight(n).unwrap().is_zero());
    assert_eq!(MorWord::parse("(0 1)", "E[0; 1]", None).unwrap().gamma_weight(n).unwrap().get(1), 1);
}

#[test]
fn labels_follow_the_covering() {
    let n = 3;
    let w = MorWord::parse(
        "((0 1_0) 2_0)",
        "Psi[0; 1_0; 2_0] R[1_0; 2_0] Psi[0; 2_0; 1_0]^-1 E[0; 2_0] Psi[0; 2_1; 1_0] R[2_1; 1_0] Psi[0; 1_0; 2_1]^-1",
        Some(n),
    )
    .unwrap();
    let gw = w.gamma_weight(n).unwrap();
    for (strand, label) in w.target().labels() {
        assert_eq!(label, (w.source.label_of(strand).unwrap() + gw.get(strand)) % n);
    }
}

#[test]
fn every_catalogue_relation_holds() {
    for which in ["pab", "pab1", "pabgamma"] {
        for tag in catalogue(which).unwrap() {
            for n in [1, 2, 3, 5] {
                let r = check_relation(tag, n).unwrap();
                assert!(r.holds, "{tag} N={n}: {:?}", r.sides);
            }
        }
    }
    assert_eq!(check_relation("tRP", 3).unwrap().target, "((0 1_1) 2_1)");
    assert_eq!(check_relation("tO", 3).unwrap().target, "((0 1_0) 2_1)");
    assert!(check_relation("nope", 2).is_err());
}

#[test]
fn relations_are_not_vacuous() {
    // Swapping crossing types or dropping the E letter breaks the relations.
    let lhs = MorWord::parse("((1 2) 3)", "R[1; 2] Phi[2; 1; 3] R[1; 3]", None).unwrap();
    let bad = MorWord::parse("((1 2) 3)", "Phi[1; 2; 3] Rt[1; (2 3)] Phi[2; 3; 1]", None).unwrap();
    assert!(!equal_morphisms(&lhs, &bad).unwrap());
    let o = MorWord::parse("((0 1) 2)", "E[(0 1); 2]", None).unwrap();
    let bad = MorWord::parse("((0 1) 2)", "Psi[0; 1; 2] R[1; 2] R[2; 1] Psi[0; 1; 2]^-1", None).unwrap();
    assert!(!equal_morphisms(&o, &bad).unwrap());
}

#[test]
fn e_powers_are_distinct() {
    let n = 3;
    let e1 = MorWord::parse("(0 1)", "E[0; 1]", None).unwrap();
    let e2 = e1.compose(&e1).unwrap();
    let id = MorWord::identity(e1.source.clone(), None).unwrap();
    assert!(!equal_morphisms(&e1, &e2).unwrap());
    assert!(!equal_morphisms(&e1, &id).unwrap());
    assert!(!equal_morphisms(&e2, &id).unwrap());
    let l1 = e_power(1, n);
    let l2 = e_power(2, n);
    assert_ne!(l1.target(), l2.target());
}

#[test]
fn json_round_trip() {
    let w = MorWord::parse("((0 1_0) 2_0)", "Psi[0; 1_0; 2_0] E[0; (1_0 2_0)] Psi[0; 1_1; 2_1]^-1", Some(3)).unwrap();
    let v = w.to_json();
    assert_eq!(MorWord::from_json(&v).unwrap(), w);
    let mut broken = v.clone();
    broken["target"] = serde_json::json!("((0 1_0) 2_0)");
    assert!(MorWord::from_json(&broken).is_err());
}

#[test]
fn linking_vector_identifies_the_covering() {
    let w = MorWord::parse("(0 1)", "E[0; 1]", None).unwrap();
    let b = w.evaluate_to_braid();
    assert!(braid_engine::equal(&b, &full_twist(2)).unwrap());
    assert!(b.is_pure());
}

#[test]
fn gamma_weight_matches_linking_on_random_words() {
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let sources = ["(0 1)", "((0 1) 2)", "(0 (1 2))", "(((0 1) 2) 3)", "((0 1) (2 3))", "(0 ((1 2) 3))"];
    let mut nontrivial = 0;
    for s in sources {
        let src = ParObject::parse(s).unwrap();
        for _ in 0..100 {
            let w = random_endomorphism(&src, 10, None, &mut rng).unwrap();
            assert!(w.letters.len() <= 10);
            assert!(w.is_endomorphism());
            let links = braid_linking(&w).unwrap();
            nontrivial += usize::from(links.values().any(|l| *l != 0));
            for n in 1..=4 {
                let gw = w.gamma_weight(n).unwrap();
                for (strand, link) in &links {
                    assert_eq!(gw.get(*strand) as i64, link.rem_euclid(n as i64), "{w}");
                }
            }
        }
    }
    assert!(nontrivial > 100);
}

#[test]
fn random_words_are_valid_in_the_labelled_groupoid() {
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let src = ParObject::parse("((0 1_0) 2_1)").unwrap();
    for _ in 0..50 {
        let w = random_word(&src, 8, Some(3), &mut rng).unwrap();
        let back = w.compose(&w.invert()).unwrap();
        assert!(equal_morphisms(&back, &MorWord::identity(src.clone(), Some(3)).unwrap()).unwrap());
    }
}
