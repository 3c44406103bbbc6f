mod common;

use causal_blocking::graph::d_separated_bits;
use causal_blocking::bitset::BitSet;
use causal_blocking::{d_separated, Admg};
use common::{arb_admg, load, oracle_d_separated, set, Expansion, CORPUS_GRAPHS};
use proptest::prelude::*;

/// Every singleton pair with every conditioning set drawn from the other nodes.
fn exhaustive_agreement(g: &Admg) -> usize {
    let n = g.len();
    let e = Expansion::new(g);
    let mut checked = 0;
    for a in 0..n {
        for b in a + 1..n {
            let paths = e.paths(a, b);
            let rest: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
            for mask in 0u32..(1 << rest.len()) {
                let mut given = vec![false; n];
                let mut bits = BitSet::new(n);
                for (j, &v) in rest.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        given[v] = true;
                        bits.insert(v);
                    }
                }
                let expected = !paths.iter().any(|p| e.path_open(p, &given));
                let got = d_separated_bits(
                    g,
                    &BitSet::from_indices(n, [a]),
                    &BitSet::from_indices(n, [b]),
                    &bits,
                );
                assert_eq!(got, expected, "{} vs {} given {:?}", g.name(a), g.name(b), g.to_node_set(&bits));
                let swapped = d_separated_bits(
                    g,
                    &BitSet::from_indices(n, [b]),
                    &BitSet::from_indices(n, [a]),
                    &bits,
                );
                assert_eq!(got, swapped);
                checked += 1;
            }
        }
    }
    checked
}

#[test]
fn agrees_with_path_enumeration_on_small_corpus_graphs() {
    for name in CORPUS_GRAPHS {
        let g = load(name);
        if g.len() <= 10 {
            assert!(exhaustive_agreement(&g) > 0 || g.len() < 2, "{name}");
        }
    }
}

#[test]
fn fig5a_collider_at_v2() {
    let g = load("fig5a.graph");
    assert!(!d_separated(&g, &set(&["Y"]), &set(&["V4"]), &set(&["V1", "V2"])).unwrap());
    let (y, v4) = (g.index_of("Y").unwrap(), g.index_of("V4").unwrap());
    let given = [g.index_of("V1").unwrap(), g.index_of("V2").unwrap()];
    assert!(!oracle_d_separated(&g, y, v4, &given));
}

#[test]
fn three_element_set_fails_where_v4_is_a_spouse_of_y() {
    // with V4 <-> Y, conditioning on V4 opens V3 <-> V4 <-> Y
    for name in ["fig5b.graph", "fig6a.graph", "fig6b.graph", "fig7a.graph"] {
        let g = load(name);
        let given = set(&["V1", "V2", "V4", "X"]);
        assert!(!d_separated(&g, &set(&["Y"]), &set(&["V3"]), &given).unwrap(), "{name}");
        let idx: Vec<usize> = given.iter().map(|id| g.index_of(id.as_str()).unwrap()).collect();
        let (y, v3) = (g.index_of("Y").unwrap(), g.index_of("V3").unwrap());
        assert!(!oracle_d_separated(&g, y, v3, &idx), "{name}");
    }
}

#[test]
fn disconnected_nodes_are_always_separated() {
    let g = Admg::new(&["A", "B", "C", "X", "Y"], &[("A", "B"), ("X", "Y")], &[("B", "X")], "X", "Y").unwrap();
    let c = g.index_of("C").unwrap();
    let n = g.len();
    for mask in 0u32..(1 << n) {
        if mask >> c & 1 == 1 || mask & 1 == 1 {
            continue;
        }
        let given = BitSet::from_indices(n, (0..n).filter(|&v| mask >> v & 1 == 1));
        assert!(d_separated_bits(&g, &BitSet::from_indices(n, [0]), &BitSet::from_indices(n, [c]), &given));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_graphs_agree_with_oracle(g in arb_admg(7), seed in any::<u64>()) {
        let n = g.len();
        let e = Expansion::new(&g);
        let mut s = seed;
        for a in 0..n {
            for b in a + 1..n {
                let paths = e.paths(a, b);
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let given: Vec<bool> = (0..n).map(|v| v != a && v != b && (s >> (v + 7)) & 1 == 1).collect();
                let bits = BitSet::from_indices(n, (0..n).filter(|&v| given[v]));
                let expected = !paths.iter().any(|p| e.path_open(p, &given));
                prop_assert_eq!(
                    d_separated_bits(&g, &BitSet::from_indices(n, [a]), &BitSet::from_indices(n, [b]), &bits),
                    expected
                );
            }
        }
    }
}
