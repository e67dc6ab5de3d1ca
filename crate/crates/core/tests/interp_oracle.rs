mod common;

use common::*;
use osgp_core::genops::crossover_standard;
use osgp_core::interp::{eval_tree, mse, Evaluator, MemoEvaluator};
use osgp_core::{ExpressionTree, Quality};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn evaluator_matches_recursive_oracle_on_full_primitive_set() {
    let mut r = rng(11);
    let prims = full(4);
    let ds = random_dataset(&mut r, 4, 40);
    let rows = ds.to_rows();
    let mut ev = Evaluator::new();
    let mut non_finite = 0;
    for _ in 0..3000 {
        let tree = random_tree(&mut r, &prims, 1, 60);
        let got = ev.eval(&tree, &ds).unwrap();
        for (row, &g) in rows.iter().zip(&got) {
            let want = scalar_eval(&tree, row);
            assert!(bits_equal(g, want), "{tree}: got {g}, oracle {want}");
            non_finite += usize::from(!want.is_finite());
        }
        ev.recycle(got);
    }
    // the random data should reach the interesting corners
    assert!(non_finite > 0);
}

#[test]
fn mixed_arity_trees_match_oracle() {
    let mut r = rng(12);
    let prims = mixed_arity(3);
    let ds = random_dataset(&mut r, 3, 25);
    let rows = ds.to_rows();
    for _ in 0..2000 {
        let tree = random_tree(&mut r, &prims, 1, 80);
        let got = eval_tree(&tree, &ds).unwrap();
        for (row, &g) in rows.iter().zip(&got) {
            assert!(bits_equal(g, scalar_eval(&tree, row)), "{tree}");
        }
    }
}

#[test]
fn constant_only_trees_broadcast() {
    let mut r = rng(13);
    let ds = random_dataset(&mut r, 2, 3);
    let t: ExpressionTree = "2.5".parse().unwrap();
    assert_eq!(eval_tree(&t, &ds).unwrap(), vec![2.5; 3]);
    let t: ExpressionTree = "(DIV 3 (SUB 2 2))".parse().unwrap();
    assert_eq!(eval_tree(&t, &ds).unwrap(), vec![1.0; 3]);
}

#[test]
fn repeated_evaluation_is_identical() {
    let mut r = rng(14);
    let prims = full(3);
    let ds = random_dataset(&mut r, 3, 30);
    let mut ev = Evaluator::new();
    for _ in 0..200 {
        let tree = random_tree(&mut r, &prims, 5, 40);
        let a = ev.eval(&tree, &ds).unwrap();
        let b = eval_tree(&tree, &ds).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn memoized_evaluation_matches_plain_evaluation() {
    let mut r = rng(5);
    let prims = full(3);
    let ds = random_dataset(&mut r, 3, 30);
    let mut plain = Evaluator::new();
    // tiny budget so the memo is flushed repeatedly
    for (min_size, bytes) in [(2, 1 << 30), (8, 1 << 30), (2, 20 * 30 * 8)] {
        let mut memo = MemoEvaluator::with_limits(&ds, min_size, bytes);
        let mut pool: Vec<ExpressionTree> = (0..30).map(|_| random_tree(&mut r, &prims, 1, 80)).collect();
        for _ in 0..3000 {
            let a = r.random_range(0..pool.len());
            let b = r.random_range(0..pool.len());
            let child = crossover_standard(&pool[a], &pool[b], &mut r);
            let want = plain.eval(&child, &ds).unwrap();
            let got = memo.eval(&child).unwrap();
            assert!(want.iter().zip(&got).all(|(x, y)| bits_equal(*x, *y)), "{child}");
            assert_eq!(
                memo.fitness(&child).unwrap().value().to_bits(),
                mse(&want, ds.targets()).unwrap().value().to_bits()
            );
            if child.len() < 200 {
                pool[a] = child;
            }
        }
        assert!(memo.remembered() > 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn arithmetic_trees_stay_finite_on_unit_inputs(tree in tree_strategy(arithmetic(3), 1, 80), seed in any::<u64>()) {
        use rand::Rng;
        let mut r = rng(seed);
        let cols: Vec<Vec<f64>> = (0..4).map(|_| (0..20).map(|_| r.random_range(-1.0..=1.0)).collect()).collect();
        let ds = osgp_core::Dataset::from_columns(
            vec!["a".into(), "b".into(), "c".into(), "y".into()], cols, 3).unwrap();
        let out = eval_tree(&tree, &ds).unwrap();
        prop_assert!(out.iter().all(|v| v.is_finite()), "{}", tree);
    }

    #[test]
    fn mse_is_nonnegative_and_zero_only_on_exact_match(p in prop::collection::vec(-1e3f64..1e3, 1..30), shift in -5.0f64..5.0) {
        let q = mse(&p, &p).unwrap();
        prop_assert_eq!(q, Quality::new(0.0));
        let t: Vec<f64> = p.iter().map(|v| v + shift).collect();
        let q = mse(&p, &t).unwrap();
        prop_assert!(q.value() >= 0.0);
        if t != p {
            prop_assert!(q.value() > 0.0);
        }
    }
}
