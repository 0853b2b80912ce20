use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparsedisc::lp::{
    fractional_support, round_in_expectation, round_in_expectation_observed, vertex_solution,
    LinearSystem,
};

fn random_system(rng: &mut ChaCha8Rng, r: usize, v: usize) -> (LinearSystem<f64>, Vec<f64>) {
    let x0: Vec<f64> = (0..v).map(|_| rng.gen_range(0.0..1.0)).collect();
    let rows: Vec<Vec<f64>> = (0..r)
        .map(|_| (0..v).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let b = rows
        .iter()
        .map(|row| row.iter().zip(&x0).map(|(a, x)| a * x).sum())
        .collect();
    (LinearSystem::from_rows(v, rows, b).unwrap(), x0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vertex_contract(seed: u64, r in 1usize..6, extra in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sys, x0) = random_system(&mut rng, r, r + extra);
        let x = vertex_solution(&sys, &x0).unwrap();
        let support = fractional_support(&x);
        prop_assert!(sys.residual(&x) <= 1e-7);
        prop_assert!(support.len() <= r);
        prop_assert!(sys.kernel_direction(&support).is_none());
        prop_assert!(x.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn every_step_stays_feasible(seed: u64, r in 1usize..5, extra in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sys, x0) = random_system(&mut rng, r, r + extra);
        let mut steps = 0;
        let x = round_in_expectation_observed(&sys, &x0, &mut rng, |x| {
            assert!(sys.residual(x) <= 1e-7);
            assert!(x.iter().all(|&v| (0.0..=1.0).contains(&v)));
            steps += 1;
        })
        .unwrap();
        let support = fractional_support(&x);
        prop_assert!(sys.kernel_direction(&support).is_none());
        prop_assert!(steps <= r + extra);
    }

    #[test]
    fn same_seed_same_sample(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sys, x0) = random_system(&mut rng, 3, 9);
        let a = round_in_expectation(&sys, &x0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = round_in_expectation(&sys, &x0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn vertex_example_four_by_twelve() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (sys, x0) = random_system(&mut rng, 4, 12);
    let x = vertex_solution(&sys, &x0).unwrap();
    assert!(fractional_support(&x).len() <= 4);
    assert!(sys.residual(&x) <= 1e-7);
}

#[test]
fn integral_start_is_kept() {
    let sys = LinearSystem::from_rows(3, vec![vec![1.0, 1.0, 1.0]], vec![1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..10 {
        assert_eq!(
            round_in_expectation(&sys, &[0.0, 0.0, 1.0], &mut rng).unwrap(),
            vec![0.0, 0.0, 1.0]
        );
    }
}

#[test]
fn mean_is_preserved_on_nine_variables() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (sys, x0) = random_system(&mut rng, 3, 9);
    let n = 20_000;
    let mut mean = [0.0; 9];
    for _ in 0..n {
        let x = round_in_expectation(&sys, &x0, &mut rng).unwrap();
        for (m, v) in mean.iter_mut().zip(&x) {
            *m += v / n as f64;
        }
    }
    let tol = 4.0 * (0.25f64 / n as f64).sqrt();
    for (m, x) in mean.iter().zip(&x0) {
        assert!((m - x).abs() <= tol);
    }
}

#[test]
fn single_precision_walk() {
    let sys = LinearSystem::<f32>::from_rows(
        4,
        vec![vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 1.0]],
        vec![1.0, 1.0],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = round_in_expectation(&sys, &[0.3, 0.7, 0.5, 0.5], &mut rng).unwrap();
    assert!(fractional_support(&x).is_empty());
    assert!(sys.residual(&x) <= 1e-3);
}
