mod common;

use proptest::prelude::*;
use quasigroups::decompose::Arg;
use quasigroups::generate::{planted, random_isotope, random_perm, random_quasigroup, rng_from_seed};
use quasigroups::{
    decomposition_tree, fixtures, is_reducible, lemma3_normalize, lemma4_agreement, try_group, Perm, QPredicate, QTable,
};

use common::{brute_force_reducible, pred};

#[test]
fn reducibility_matches_definition_oracle() {
    let mut rng = rng_from_seed(31);
    let mut seen = [0usize; 2];
    for (order, arity) in [(3, 3), (4, 3), (4, 3), (4, 3), (2, 4), (3, 4), (4, 2)] {
        for _ in 0..4 {
            let t = random_quasigroup(order, arity, &mut rng).unwrap();
            let r = is_reducible(&pred(&t));
            assert_eq!(r, brute_force_reducible(&t), "order {order} arity {arity}");
            seen[r as usize] += 1;
        }
    }
    // both answers occur
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn fixture_is_irreducible_by_both_methods() {
    let t = fixtures::irreducible_4ary_order4().unwrap().table;
    assert!(!brute_force_reducible(&t));
    assert!(!is_reducible(&pred(&t)));
    let tree = decomposition_tree(&pred(&t));
    assert!(tree.is_single_node());
}

#[test]
fn sum_tree_has_two_levels() {
    let m = pred(&QTable::cyclic_sum(4, 3).unwrap());
    let tree = decomposition_tree(&m);
    assert_eq!(tree.node_count(), 2);
    assert!(matches!(&tree.root.args[0], Arg::Sub(n) if n.positions() == vec![0, 1]));
    assert_eq!(tree.to_predicate().unwrap(), m);
}

#[test]
fn planted_trees_rebuild_and_have_irreducible_nodes() {
    let mut rng = rng_from_seed(2);
    for groups in [vec![vec![0, 1], vec![2, 3, 4], vec![5]], vec![vec![0, 3], vec![1, 4], vec![2, 5]]] {
        let p = planted(3, &groups, None, &mut rng).unwrap();
        let tree = decomposition_tree(&p.predicate);
        assert_eq!(tree.to_predicate().unwrap(), p.predicate);
        for node in tree.node_predicates() {
            assert!(!is_reducible(node));
        }
    }
}

#[test]
fn groups_outside_range_are_rejected() {
    let m = pred(&QTable::cyclic_sum(3, 3).unwrap());
    for g in [vec![0], vec![0, 1, 2], vec![0, 4], vec![1, 1]] {
        assert!(try_group(&m, &g).is_err(), "{g:?}");
    }
}

#[test]
fn slice_agreement_detects_relabeling() {
    let mut rng = rng_from_seed(5);
    let c = pred(&random_quasigroup(3, 3, &mut rng).unwrap());
    let b = random_quasigroup(3, 2, &mut rng).unwrap();
    let pi = random_perm(3, &mut rng);
    // b̃ = π∘b and C̃ undoes π on its first argument
    let b_t = b.then(&pi);
    let inv = pi.inverse();
    let id = Perm::identity(3);
    let c_t = c.defining_table().precompose(&[inv, id.clone(), id]).unwrap();
    let c_t = QPredicate::from_table(&c_t).unwrap();
    assert!(lemma4_agreement(&c, &c_t, &b, &b_t).unwrap());
    let other = random_quasigroup(3, 2, &mut rng).unwrap();
    if other != b {
        let _ = lemma4_agreement(&c, &c, &b, &other).unwrap();
    }
}

fn small_table(max_arity: usize) -> impl Strategy<Value = QTable> {
    (2usize..=4, 1usize..=max_arity, any::<u64>())
        .prop_map(|(order, arity, seed)| random_quasigroup(order, arity, &mut rng_from_seed(seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reducibility_is_isotopy_invariant(t in small_table(4), seed in any::<u64>()) {
        let iso = random_isotope(&t, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(is_reducible(&pred(&t)), is_reducible(&pred(&iso)));
    }

    #[test]
    fn trees_reproduce_their_input(t in small_table(4)) {
        let m = pred(&t);
        prop_assert_eq!(decomposition_tree(&m).to_predicate().unwrap(), m);
    }

    #[test]
    fn section_normalization_holds_pointwise(order in 2usize..=4, k in 1usize..=3, l in 1usize..=3, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let c = random_quasigroup(order, k, &mut rng).unwrap();
        let b = random_quasigroup(order, l, &mut rng).unwrap();
        let n = lemma3_normalize(&c, &b).unwrap();
        prop_assert!(n.c0.is_valid() && n.b0.is_valid() && n.a.is_valid());
    }

    #[test]
    fn slice_agreement_never_reports_inconsistency(order in 2usize..=3, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let c = pred(&random_quasigroup(order, 3, &mut rng).unwrap());
        let c_t = pred(&random_quasigroup(order, 3, &mut rng).unwrap());
        let b = random_quasigroup(order, 2, &mut rng).unwrap();
        let b_t = random_quasigroup(order, 2, &mut rng).unwrap();
        prop_assert!(lemma4_agreement(&c, &c_t, &b, &b_t).is_ok());
        prop_assert!(lemma4_agreement(&c, &c, &b, &b).unwrap());
    }
}
