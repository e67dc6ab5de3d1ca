//! Monte-Carlo checks of the stated sampling distributions.

mod common;

use common::*;
use osgp_core::engine::{proportional_select, select_parents};
use osgp_core::genops::ptc2;
use osgp_core::problems::shuffle_dataset;
use osgp_core::{CrossoverKind, Dataset, ExpressionTree, Individual, Population, Quality, Symbol};
use rand::Rng;
use std::collections::HashMap;

fn within_3_sigma(count: usize, n: usize, p: f64) -> bool {
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - n as f64 * p).abs() <= 3.0 * sigma
}

fn pop_with(qualities: &[f64]) -> Population {
    Population {
        members: qualities
            .iter()
            .map(|&q| Individual { tree: ExpressionTree::leaf(Symbol::Variable(0)), quality: Quality::new(q) })
            .collect(),
        generation: 0,
    }
}

#[test]
fn random_node_internal_frequency() {
    let mut r = rng(41);
    let prims = arithmetic(5);
    let tree = ptc2(&mut r, 100, &prims);
    assert!(tree.len() >= 100);
    let n = 100_000;
    let internal = (0..n).filter(|_| tree.node_at(&tree.random_node(&mut r, 0.9)).unwrap().symbol().arity() > 0).count();
    let f = internal as f64 / n as f64;
    assert!((0.87..=0.93).contains(&f), "{f}");
}

#[test]
fn random_node_edge_cases() {
    let mut r = rng(42);
    let leaf = ExpressionTree::leaf(Symbol::Variable(0));
    let add: ExpressionTree = "(ADD x1 x2)".parse().unwrap();
    for _ in 0..100 {
        assert!(leaf.random_node(&mut r, 0.9).path().is_empty());
        assert!(add.random_node(&mut r, 1.0).path().is_empty());
    }
}

#[test]
fn ptc2_size_window_and_mean() {
    let mut r = rng(43);
    let prims = arithmetic(10);
    let n = 10_000;
    let mut total = 0usize;
    for _ in 0..n {
        let target = r.random_range(3..=50);
        let t = ptc2(&mut r, target, &prims);
        assert!(t.is_consistent());
        assert!((target..=target + 1).contains(&t.len()));
        assert!((3..=51).contains(&t.len()));
        total += t.len();
    }
    let mean = total as f64 / n as f64;
    assert!((25.0..=29.0).contains(&mean), "{mean}");
    assert_eq!(ptc2(&mut r, 3, &prims).len(), 3);
    assert_eq!(ptc2(&mut r, 1, &prims).len(), 1);
    assert_eq!(ptc2(&mut r, 0, &prims).len(), 1);
}

#[test]
fn ptc2_overshoot_is_bounded_by_max_arity() {
    let mut r = rng(44);
    let prims = full(4);
    for _ in 0..5000 {
        let target = r.random_range(1..=60);
        let t = ptc2(&mut r, target, &prims);
        assert!(t.len() >= target && t.len() <= target + 2, "{target} -> {}", t.len());
    }
}

#[test]
fn mixed_dispatch_is_uniform() {
    let mut r = rng(45);
    let prims = full(3);
    let a = random_tree(&mut r, &prims, 10, 20);
    let b = random_tree(&mut r, &prims, 10, 20);
    let n = 50_000;
    let mut counts: HashMap<CrossoverKind, usize> = HashMap::new();
    for _ in 0..n {
        *counts.entry(CrossoverKind::Mixed.apply(&a, &b, &mut r).1).or_default() += 1;
    }
    assert_eq!(counts.len(), 5);
    for k in CrossoverKind::CONCRETE {
        let f = counts[&k] as f64 / n as f64;
        assert!((0.19..=0.21).contains(&f), "{k}: {f}");
    }
}

#[test]
fn proportional_selection_follows_weights() {
    let mut r = rng(46);
    let n = 100_000;
    let pop = pop_with(&[0.0, 1.0, 2.0]);
    let mut c = [0usize; 3];
    for _ in 0..n {
        c[proportional_select(&pop, &mut r).unwrap()] += 1;
    }
    assert!(within_3_sigma(c[0], n, 2.0 / 3.0) && within_3_sigma(c[1], n, 1.0 / 3.0), "{c:?}");
    assert_eq!(c[2], 0);

    let pop = pop_with(&[0.5; 4]);
    let mut c = [0usize; 4];
    for _ in 0..n {
        c[proportional_select(&pop, &mut r).unwrap()] += 1;
    }
    assert!(c.iter().all(|&k| within_3_sigma(k, n, 0.25)), "{c:?}");

    // worst-sentinel members never win while finite ones have weight
    let pop = pop_with(&[f64::INFINITY, 0.0, 1.0]);
    for _ in 0..1000 {
        assert_eq!(proportional_select(&pop, &mut r).unwrap(), 1);
    }
}

#[test]
fn second_parent_is_uniform() {
    let mut r = rng(47);
    let pop = pop_with(&[0.0, 1.0]);
    let n = 40_000;
    let mut second = [0usize; 2];
    for _ in 0..n {
        let (i, j) = select_parents(&pop, &mut r).unwrap();
        assert_eq!(i, 0);
        second[j] += 1;
    }
    assert!(within_3_sigma(second[0], n, 0.5), "{second:?}");
    assert!(select_parents(&pop_with(&[1.0]), &mut r).is_err());
}

#[test]
fn shuffle_orders_are_uniform() {
    let mut r = rng(48);
    let ds = Dataset::from_rows(vec!["k".into(), "y".into()], &[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]], 1).unwrap();
    let n = 10_000;
    let mut counts: HashMap<Vec<u8>, usize> = HashMap::new();
    for _ in 0..n {
        let s = shuffle_dataset(&ds, &mut r);
        *counts.entry(s.column(0).iter().map(|&v| v as u8).collect()).or_default() += 1;
    }
    assert_eq!(counts.len(), 6);
    assert!(counts.values().all(|&c| within_3_sigma(c, n, 1.0 / 6.0)), "{counts:?}");
}
