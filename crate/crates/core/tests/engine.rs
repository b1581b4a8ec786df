use proptest::prelude::*;

use pcgroup::commutator::{k_set, k_set_pairs};
use pcgroup::constructions::{build_free_class2, GroupRecipe};
use pcgroup::format::{emit_presentation, parse_presentation, presentation_digest};
use pcgroup::series::{derived_subgroup, lower_central, power_subgroup};
use pcgroup::witness::{find_theorem_b_witness, replay_certificate, WitnessCertificate};
use pcgroup::{Element, Gate, PcPresentation, Subgroup, Word};

fn corpus() -> Vec<(GroupRecipe, PcPresentation)> {
    GroupRecipe::corpus(5)
        .into_iter()
        .map(|r| (r.clone(), r.build().unwrap()))
        .collect()
}

#[test]
fn corpus_orders_and_round_trip() {
    let expected = [3, 3, 3, 6, 6, 6, 6, 8];
    for ((r, g), n) in corpus().into_iter().zip(expected) {
        assert_eq!(g.n(), n, "{r}");
        assert!(g.to_builder().check_consistency().is_ok());
        let text = emit_presentation(&g);
        let back = parse_presentation(&text).unwrap();
        assert_eq!(back, g, "{r}");
        assert_eq!(presentation_digest(&back), presentation_digest(&g));
    }
}

#[test]
fn free_class2_is_class_two_exponent_p() {
    let f = build_free_class2(5, 3).unwrap();
    let gate = Gate::default();
    assert!(lower_central(&f.pres, 3).is_trivial());
    assert!(power_subgroup(&f.pres, &Subgroup::whole(&f.pres), 1, &gate)
        .unwrap()
        .is_trivial());
    for i in 0..3 {
        for j in 0..3 {
            let c = f.pres.comm(&f.generator(i), &f.generator(j));
            let m = f.bivector(&c).unwrap();
            if i != j {
                assert_eq!(m[i][j], 1, "[a{i}, a{j}]");
                assert_eq!(m[j][i], 4);
            }
        }
    }
}

#[test]
fn k_set_methods_agree() {
    let gate = Gate::default();
    for recipe in [
        "heisenberg",
        "extraspecial(p=5,exp=p^2)",
        "free-class2(p=3,d=3)",
        "semidirect-cyclic",
    ] {
        let g = recipe.parse::<GroupRecipe>().unwrap().build().unwrap();
        assert_eq!(
            k_set(&g, None, &gate).unwrap(),
            k_set_pairs(&g, &gate).unwrap(),
            "{recipe}"
        );
    }
}

#[test]
fn certificate_survives_json() {
    let g = GroupRecipe::Huppert { p: 5 }.build().unwrap();
    let gate = Gate::default();
    let cert = find_theorem_b_witness(&g, false, &gate).unwrap();
    let text = serde_json::to_string(&cert).unwrap();
    let back: WitnessCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);
    assert!(replay_certificate(&g, &back, &gate).unwrap().pass());
}

#[test]
fn derived_subgroup_of_quotient_tower() {
    let g = GroupRecipe::Huppert { p: 7 }.build().unwrap();
    let d = derived_subgroup(&g, &Subgroup::whole(&g));
    assert_eq!(d.order_log(), 4);
}

fn word_strategy(n: usize, p: i64) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..n, -p..=p), 0..16).prop_map(Word)
}

fn element_strategy(n: usize, p: u8) -> impl Strategy<Value = Element> {
    prop::collection::vec(0..p, n).prop_map(|v| Element::from_exponents(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn collection_is_a_homomorphism(u in word_strategy(6, 5), v in word_strategy(6, 5)) {
        let g = GroupRecipe::Huppert { p: 5 }.build().unwrap();
        prop_assert_eq!(g.collect(&u.concat(&v)), g.mul(&g.collect(&u), &g.collect(&v)));
    }

    #[test]
    fn multiplication_is_associative(
        a in element_strategy(8, 5),
        b in element_strategy(8, 5),
        c in element_strategy(8, 5),
    ) {
        let g = GroupRecipe::SemidirectPowerful { p: 5 }.build().unwrap();
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        prop_assert!(g.mul(&a, &g.inv(&a)).is_identity());
        prop_assert_eq!(g.pow(&a, 25 * 5), g.identity());
    }

    #[test]
    fn commutator_identities(a in element_strategy(6, 5), b in element_strategy(6, 5)) {
        let g = GroupRecipe::FreeClass2 { p: 5, d: 3 }.build().unwrap();
        let ab = g.comm(&a, &b);
        prop_assert_eq!(g.inv(&ab), g.comm(&b, &a));
        prop_assert_eq!(g.mul(&g.mul(&b, &a), &ab), g.mul(&a, &b));
    }
}
