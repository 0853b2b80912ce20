use proptest::prelude::*;

use sparsedisc::coloring::eval_f;
use sparsedisc::instance::{
    gen_beck_fiala, gen_random, gen_random_beck_fiala, gen_random_edge_coverage,
    gen_random_partitions, read_instance, sparsity, validate, write_instance, CoverageInstance,
};

fn mask_to_set(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|j| mask >> j & 1 == 1).collect()
}

fn check_monotone_submodular(inst: &CoverageInstance) {
    let n = inst.n();
    for f in inst.functions() {
        let values: Vec<usize> = (0u32..1 << n)
            .map(|m| eval_f(f, &mask_to_set(m, n)))
            .collect();
        assert_eq!(values[0], 0);
        for mask in 0u32..1 << n {
            for j in 0..n {
                if mask >> j & 1 == 1 {
                    continue;
                }
                let with = mask | 1 << j;
                assert!(values[with as usize] >= values[mask as usize]);
                // marginal gains shrink for supersets
                for sup in 0u32..1 << n {
                    if sup & mask == mask && sup >> j & 1 == 0 {
                        let small = values[with as usize] - values[mask as usize];
                        let big = values[(sup | 1 << j) as usize] - values[sup as usize];
                        assert!(big <= small);
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_instances_are_sparse(n in 4usize..80, m in 1usize..5, t in 1usize..4,
                                   lo in 1usize..4, extra in 0usize..4, seed: u64) {
        let hi = (lo + extra).min(n);
        let inst = gen_random(n, m, t, (lo.min(hi), hi), seed).unwrap();
        prop_assert!(sparsity(&inst) <= t);
        prop_assert_eq!(sparsity(&inst), inst.t());
        prop_assert!(validate(&inst).is_ok());
        prop_assert_eq!(inst.m(), m);
    }

    #[test]
    fn round_trip_is_identity(n in 2usize..30, m in 1usize..4, t in 1usize..3, seed: u64) {
        let inst = gen_random(n, m, t, (1, 4.min(n)), seed).unwrap();
        let text = write_instance(&inst);
        let back = read_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn generators_are_monotone_and_submodular(seed: u64, which in 0usize..4) {
        let n = 7;
        let inst = match which {
            0 => gen_random(n, 2, 2, (1, 4), seed).unwrap(),
            1 => gen_random_beck_fiala(n, 4, 2, (1, 4), seed).unwrap(),
            2 => gen_random_partitions(n, 3, 2, seed).unwrap(),
            _ => gen_random_edge_coverage(n, 5, 2, seed).unwrap(),
        };
        check_monotone_submodular(&inst);
    }

    #[test]
    fn beck_fiala_counts_intersections(edges in prop::collection::vec(
        prop::collection::btree_set(0usize..8, 1..6), 1..5)) {
        let edges: Vec<Vec<usize>> = edges.into_iter().map(|e| e.into_iter().collect()).collect();
        let inst = gen_beck_fiala(8, &edges).unwrap();
        for mask in 0u32..1 << 8 {
            let t = mask_to_set(mask, 8);
            for (f, e) in inst.functions().iter().zip(&edges) {
                prop_assert_eq!(eval_f(f, &t), e.iter().filter(|&&j| t[j]).count());
            }
        }
    }
}

#[test]
fn unsorted_input_is_canonicalized() {
    let inst = read_instance(r#"{"n": 4, "functions": [{"sets": [[3, 1, 1], [2]]}]}"#).unwrap();
    assert_eq!(inst.functions()[0].sets(), &[vec![1, 3], vec![2]]);
    assert!(read_instance(r#"{"functions": []}"#).is_err());
    assert!(read_instance(r#"{"n": 2, "functions": [], "extra": 1}"#).is_err());
}
