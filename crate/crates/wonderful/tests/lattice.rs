mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use wonderful::fixtures::*;
use wonderful::homology::{homology_from_atoms, homology_gm_oracle, BettiTable};
use wonderful::lattice::{contract_nested_poset, is_antichain, LatticeError, SubgraphPoset};
use wonderful::{EdgeSet, Graph};

fn es(ix: &[usize]) -> EdgeSet {
    EdgeSet::from_indices(ix.iter().copied())
}

fn set(v: &[EdgeSet]) -> BTreeSet<EdgeSet> {
    v.iter().copied().collect()
}

fn table(pairs: &[(i64, u64)]) -> BettiTable {
    pairs.iter().copied().collect()
}

#[test]
fn divergent_lattice_examples() {
    let d = dunce();
    let l = SubgraphPoset::divergent_lattice(&d).unwrap();
    assert_eq!(l.elements(), &[EdgeSet::EMPTY, dunce_fish(), d.all()]);
    let l = SubgraphPoset::divergent_lattice(&fish()).unwrap();
    assert_eq!(l.elements(), &[EdgeSet::EMPTY, fish().all()]);
    let g = insertion(2);
    let l = SubgraphPoset::divergent_lattice(&g).unwrap();
    assert_eq!(l.elements(), &[EdgeSet::EMPTY, insertion_level(1), insertion_level(2)]);
    let tri = Graph::from_edges(2, &[(0, 1), (0, 1), (0, 1)], 4).unwrap();
    assert!(matches!(SubgraphPoset::divergent_lattice(&tri), Err(LatticeError::NotAtMostLog(_))));
    let split = Graph::from_edges(4, &[(0, 1), (0, 1), (2, 3), (2, 3)], 4).unwrap();
    assert_eq!(SubgraphPoset::divergent_lattice(&split).unwrap_err(), LatticeError::Disconnected);
}

#[test]
fn saturated_poset_examples() {
    let k = k3();
    let p = SubgraphPoset::saturated_poset(&k).unwrap();
    assert_eq!(p.elements(), &[EdgeSet::EMPTY, es(&[0]), es(&[1]), es(&[2]), k.all()]);
    let one = Graph::from_edges(2, &[(0, 1)], 4).unwrap();
    assert_eq!(SubgraphPoset::saturated_poset(&one).unwrap().len(), 2);
    let k = k4();
    let p = SubgraphPoset::saturated_poset(&k).unwrap();
    assert_eq!(p.len(), 15);
    let expect: BTreeSet<EdgeSet> = std::iter::once(EdgeSet::EMPTY)
        .chain((0..6).map(EdgeSet::single))
        .chain(k4_matchings())
        .chain(k4_triangles())
        .chain(std::iter::once(k.all()))
        .collect();
    assert_eq!(set(p.elements()), expect);
    assert!(p.is_lattice());
    // In the saturated poset the join of two edges of a triangle is the triangle.
    assert_eq!(p.join(es(&[0]), es(&[1])), Some(es(&[0, 1, 5])));
}

#[test]
fn lattice_properties_hold_on_divergent_fixtures() {
    for (name, g) in all_named() {
        if let Ok(l) = SubgraphPoset::divergent_lattice(&g) {
            let rep = l.check_lattice_properties();
            assert!(rep.passed(), "{name}: {rep:?}");
        }
    }
}

#[test]
fn fake_poset_fails_meet_check() {
    let g = k3();
    let fake = SubgraphPoset::generic(&g, vec![es(&[0, 1]), es(&[0, 2]), g.all()]);
    let rep = fake.check_lattice_properties();
    assert!(!rep.passed());
    assert_eq!(rep.meet_is_intersection, Some(vec![es(&[0, 1]), es(&[0, 2])]));
}

#[test]
fn irreducibles_of_saturated_k4() {
    let k = k4();
    let p = SubgraphPoset::saturated_poset(&k).unwrap();
    let irr = p.irreducibles();
    let expect: BTreeSet<EdgeSet> =
        (0..6).map(EdgeSet::single).chain(k4_triangles()).chain(std::iter::once(k.all())).collect();
    assert_eq!(set(&irr), expect);
    for m in k4_matchings() {
        assert!(!irr.contains(&m));
    }
    assert_eq!(set(&p.irreducibles_brute_force()), expect);
}

#[test]
fn irreducibles_of_bubbles() {
    for n in 2..=3 {
        let g = bubble(n);
        let l = SubgraphPoset::divergent_lattice(&g).unwrap();
        let irr = l.irreducibles();
        assert_eq!(irr.len(), n * (n + 1) / 2);
        let blocks: BTreeSet<EdgeSet> =
            (1..=n).flat_map(|k| (1..=n + 1 - k).map(move |l| bubble_block(n, k, l))).collect();
        // The top block is the whole graph.
        assert_eq!(set(&irr), blocks);
    }
    let l = SubgraphPoset::divergent_lattice(&fish()).unwrap();
    assert_eq!(l.irreducibles(), vec![fish().all()]);
}

#[test]
fn irreducibles_agree_with_definition() {
    for (name, g) in all_named() {
        for l in [SubgraphPoset::divergent_lattice(&g).ok(), SubgraphPoset::saturated_poset(&g).ok()].into_iter().flatten() {
            if l.len() > 40 {
                continue;
            }
            assert_eq!(set(&l.irreducibles()), set(&l.irreducibles_brute_force()), "{name} {:?}", l.kind());
        }
    }
    for g in common::small_connected(4, 6, 4) {
        if let Ok(l) = SubgraphPoset::divergent_lattice(&g) {
            assert_eq!(set(&l.irreducibles()), set(&l.irreducibles_brute_force()), "{:?}", g.edges());
        }
    }
}

#[test]
fn building_set_validation() {
    let d = dunce();
    let l = SubgraphPoset::divergent_lattice(&d).unwrap();
    assert!(l.validate_building_set(&l.nonempty()).is_ok());
    let p = SubgraphPoset::saturated_poset(&k4()).unwrap();
    let irr = p.irreducibles();
    assert!(p.validate_building_set(&irr).is_ok());
    let t = k4_triangles()[0];
    let without: Vec<EdgeSet> = irr.iter().copied().filter(|&e| e != t).collect();
    assert_eq!(p.validate_building_set(&without), Err(t));
    // Irreducibles are contained in every building set.
    assert!(p.validate_building_set(&p.nonempty()).is_ok());
    let without_edge: Vec<EdgeSet> = p.nonempty().into_iter().filter(|&e| e != EdgeSet::single(0)).collect();
    assert!(p.validate_building_set(&without_edge).is_err());
}

#[test]
fn nested_sets_of_dunce() {
    let d = dunce();
    let b = SubgraphPoset::divergent_lattice(&d).unwrap().minimal_building_set();
    assert_eq!(b.members, vec![dunce_fish(), d.all()]);
    assert_eq!(b.nested_sets(), vec![vec![dunce_fish()], vec![d.all()], vec![dunce_fish(), d.all()]]);
    let bm = SubgraphPoset::divergent_lattice(&d).unwrap().maximal_building_set();
    assert_eq!(bm.max_nested_cardinality(), 2);
}

#[test]
fn nested_sets_of_insertion_chains() {
    for n in 2..=4 {
        let g = insertion(n);
        let l = SubgraphPoset::divergent_lattice(&g).unwrap();
        let levels: Vec<EdgeSet> = (1..=n).map(insertion_level).collect();
        assert_eq!(l.nonempty(), levels);
        let b = l.maximal_building_set();
        assert_eq!(b.nested_sets().len(), (1 << n) - 1);
        assert_eq!(b.max_nested_cardinality(), n);
        assert_eq!(l.irreducibles(), levels);
    }
}

#[test]
fn nested_sets_of_nm_bubble() {
    let g = nm_bubble(1, 1);
    let l = SubgraphPoset::divergent_lattice(&g).unwrap();
    let (g1, h1) = (nm_left(1), nm_right(1, 1));
    assert_eq!(set(l.elements()), set(&[EdgeSet::EMPTY, g1, h1, g1.union(h1), g.all()]));
    let b = l.minimal_building_set();
    assert_eq!(set(&b.members), set(&[g1, h1, g.all()]));
    assert_eq!(b.nested_sets().len(), 7);
    let g = nm_bubble(2, 1);
    let l = SubgraphPoset::divergent_lattice(&g).unwrap();
    assert_eq!(set(&l.irreducibles()), set(&[nm_left(1), nm_left(2), nm_right(2, 1), g.all()]));
}

#[test]
fn nested_sets_for_maximal_building_set_are_chains() {
    for (name, g) in all_named() {
        let Ok(l) = SubgraphPoset::divergent_lattice(&g) else { continue };
        if l.len() == 1 {
            continue;
        }
        let b = l.maximal_building_set();
        let nested = b.nested_sets();
        let chains = (1u64..(1 << b.members.len()))
            .filter(|m| {
                let s: Vec<EdgeSet> =
                    (0..b.members.len()).filter(|&i| m >> i & 1 == 1).map(|i| b.members[i]).collect();
                s.iter().all(|&x| s.iter().all(|&y| x.is_subset(y) || y.is_subset(x)))
            })
            .count();
        assert_eq!(nested.len(), chains, "{name}");
        assert_eq!(b.maximal_nested_sizes().len(), 1, "{name}");
    }
}

#[test]
fn nested_cardinalities() {
    assert_eq!(SubgraphPoset::divergent_lattice(&fish()).unwrap().maximal_building_set().max_nested_cardinality(), 1);
    let b = SubgraphPoset::divergent_lattice(&bubble(3)).unwrap().minimal_building_set();
    assert_eq!(b.max_nested_cardinality(), 5);
    for n in b.nested_sets() {
        assert!(b.is_nested(&n));
        for k in 0..n.len() {
            let mut sub = n.clone();
            sub.remove(k);
            assert!(sub.is_empty() || b.is_nested(&sub));
        }
    }
}

#[test]
fn contracted_nested_poset_three_fish_ring() {
    let g = bubble(3);
    let (g1, g2, g3) = (bubble_block(3, 1, 1), bubble_block(3, 1, 2), bubble_block(3, 1, 3));
    let gg = bubble_block(3, 2, 1);
    let n = [g1, g2, g3, gg, g.all()];
    let b = SubgraphPoset::divergent_lattice(&g).unwrap().minimal_building_set();
    assert!(b.is_nested(&n));
    let q = contract_nested_poset(&g, &n, &[g1, g3, gg]);
    let maxi: BTreeSet<EdgeSet> = q.maximal().into_iter().map(|i| q.members[i]).collect();
    assert_eq!(maxi, set(&[g1, g3, gg, g.all()]));
    assert!(q.is_below(g2, gg));
    assert!(!q.is_below(gg, g.all()));
    assert!(!q.is_below(g2, g.all()));
    let top = q.index(g.all()).unwrap();
    assert!(q.covers.contains(&(None, top)));
    assert_eq!(q.contracted[top], g.all().minus(gg.union(g3)));
}

#[test]
fn contracted_nested_poset_trivial_cases() {
    let g = insertion(3);
    let chain: Vec<EdgeSet> = (1..=3).map(insertion_level).collect();
    let q = contract_nested_poset(&g, &chain, &[]);
    assert!(q.is_below(chain[0], chain[1]) && q.is_below(chain[0], chain[2]) && q.is_below(chain[1], chain[2]));
    assert_eq!(q.contracted, chain);
    let q = contract_nested_poset(&g, &chain, &chain);
    assert_eq!(q.maximal(), vec![0, 1, 2]);
    assert!(q.covers.iter().all(|c| c.0.is_none()));
    assert_eq!(q.contracted[2], chain[2].minus(chain[1]));
}

#[test]
fn homology_examples() {
    let h = |g: &Graph| {
        let l = SubgraphPoset::divergent_lattice(g).unwrap();
        (homology_from_atoms(&l), homology_gm_oracle(&l))
    };
    let (a, o) = h(&fish());
    assert_eq!(a, table(&[(0, 1), (3, 1)]));
    assert_eq!(o, a);
    let (a, o) = h(&dunce());
    assert_eq!(a, table(&[(0, 1), (3, 1)]));
    assert_eq!(o, a);
    let (a, o) = h(&bubble(2));
    assert_eq!(a, table(&[(0, 1), (3, 2), (6, 1)]));
    assert_eq!(o, a);
    let (a, o) = h(&bubble(3));
    assert_eq!(a, table(&[(0, 1), (3, 3), (6, 3), (9, 1)]));
    assert_eq!(o, a);
}

#[test]
fn homology_methods_agree_on_small_graphs() {
    let mut seen = 0;
    for (_, g) in all_named() {
        if let Ok(l) = SubgraphPoset::divergent_lattice(&g) {
            assert_eq!(homology_from_atoms(&l), homology_gm_oracle(&l));
            seen += 1;
        }
    }
    for g in common::small_connected(4, 6, 4) {
        if let Ok(l) = SubgraphPoset::divergent_lattice(&g) {
            assert_eq!(homology_from_atoms(&l), homology_gm_oracle(&l), "{:?}", g.edges());
            seen += 1;
        }
    }
    assert!(seen > 20);
}

#[test]
fn homology_with_atoms_of_different_sizes() {
    // Fish {0,1} and K4 on {1,2,3,4} sharing vertex 1: atoms of dimension 4 and 12.
    let edges = [(0, 1), (0, 1), (1, 2), (2, 3), (3, 4), (4, 1), (2, 4), (1, 3)];
    let g = Graph::from_edges(5, &edges, 4).unwrap();
    let l = SubgraphPoset::divergent_lattice(&g).unwrap();
    assert_eq!(l.atoms().len(), 2);
    let a = homology_from_atoms(&l);
    assert_eq!(a, table(&[(0, 1), (3, 1), (11, 1), (14, 1)]));
    assert_eq!(homology_gm_oracle(&l), a);
}

fn arb_log_graph() -> impl Strategy<Value = Graph> {
    prop::collection::vec((0usize..5, 0usize..5), 1..=9).prop_filter_map("at most log and connected", |raw| {
        let edges: Vec<(usize, usize)> = raw.into_iter().filter(|(a, b)| a != b).collect();
        let g = Graph::from_edges(5, &edges, 4).ok()?;
        let used = g.touched(g.all()).count_ones() as usize;
        let g = g.restrict(g.all()).graph;
        (used >= 2 && g.is_connected() && g.at_most_log(g.all()).is_ok()).then_some(g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divergent_lattice_axioms(g in arb_log_graph()) {
        let l = SubgraphPoset::divergent_lattice(&g).unwrap();
        prop_assert!(l.check_lattice_properties().passed());
        let irr = l.irreducibles();
        prop_assert!(l.validate_building_set(&irr).is_ok());
        prop_assert!(l.validate_building_set(&l.nonempty()).is_ok());
        prop_assert_eq!(homology_from_atoms(&l), homology_gm_oracle(&l));
        let b = l.minimal_building_set();
        for n in b.nested_sets() {
            for k in 0..n.len() {
                let mut sub = n.clone();
                sub.remove(k);
                prop_assert!(sub.is_empty() || b.is_nested(&sub));
            }
            let anti: Vec<EdgeSet> = n.iter().copied().filter(|&x| !n.iter().any(|&y| x.is_proper_subset(y))).collect();
            prop_assert!(is_antichain(&anti));
        }
        if l.len() > 1 {
            prop_assert_eq!(l.maximal_building_set().maximal_nested_sizes().len(), 1);
        }
    }

    #[test]
    fn adapted_tree_exists_for_divergent_lattice(g in arb_log_graph()) {
        let l = SubgraphPoset::divergent_lattice(&g).unwrap();
        let t = g.adapted_spanning_tree(&l.nonempty()).unwrap();
        prop_assert!(g.check_adapted(t.edges, &l.nonempty()).is_ok());
    }
}
