#![allow(dead_code)]

use osgp_core::genops::ptc2;
use osgp_core::trees::ConstantSampler;
use osgp_core::{Dataset, ExpressionTree, Function, NodeCoord, PrimitiveSet, Symbol};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vars(n: usize) -> Vec<(usize, String)> {
    (0..n).map(|i| (i, format!("x{}", i + 1))).collect()
}

pub fn arithmetic(n_vars: usize) -> PrimitiveSet {
    PrimitiveSet::new(Function::ARITHMETIC.to_vec(), vars(n_vars), None).unwrap()
}

/// All eighteen primitives plus real constants.
pub fn full(n_vars: usize) -> PrimitiveSet {
    PrimitiveSet::new(
        Function::ALL.to_vec(),
        vars(n_vars),
        Some(ConstantSampler::Real { lo: -20.0, hi: 20.0 }),
    )
    .unwrap()
}

/// A small set with a unary, binary and ternary function, so shapes vary a lot.
pub fn mixed_arity(n_vars: usize) -> PrimitiveSet {
    PrimitiveSet::new(
        vec![Function::Sin, Function::Add, Function::Mul, Function::IfThenElse],
        vars(n_vars),
        Some(ConstantSampler::Integer { lo: 1, hi: 5 }),
    )
    .unwrap()
}

pub fn random_tree(rng: &mut ChaCha8Rng, prims: &PrimitiveSet, lo: usize, hi: usize) -> ExpressionTree {
    let target = rng.random_range(lo..=hi);
    ptc2(rng, target, prims)
}

/// Proptest strategy: a tree grown from a seed, so shrinking shrinks seeds.
pub fn tree_strategy(prims: PrimitiveSet, lo: usize, hi: usize) -> impl Strategy<Value = ExpressionTree> {
    any::<u64>().prop_map(move |s| random_tree(&mut rng(s), &prims, lo, hi))
}

pub fn random_dataset(rng: &mut ChaCha8Rng, n_vars: usize, rows: usize) -> Dataset {
    let mut cols: Vec<Vec<f64>> = (0..=n_vars)
        .map(|_| {
            (0..rows)
                .map(|_| match rng.random_range(0..6) {
                    0 => 0.0,
                    1 => rng.random_range(-3..=3) as f64,
                    _ => rng.random_range(-2.0..2.0),
                })
                .collect()
        })
        .collect();
    // target column is irrelevant to evaluation
    cols[n_vars] = vec![0.0; rows];
    let names = (0..=n_vars).map(|i| format!("c{i}")).collect();
    Dataset::from_columns(names, cols, n_vars).unwrap()
}

/// Straight recursive evaluation of one row, written independently of the
/// library interpreter.
pub fn scalar_eval(tree: &ExpressionTree, row: &[f64]) -> f64 {
    fn go(nodes: &[Symbol], pos: &mut usize, row: &[f64]) -> f64 {
        let sym = nodes[*pos];
        *pos += 1;
        let f = match sym {
            Symbol::Variable(i) => return row[i],
            Symbol::Constant(c) => return c,
            Symbol::Function(f) => f,
        };
        let args: Vec<f64> = (0..f.arity()).map(|_| go(nodes, pos, row)).collect();
        let t = |v: f64| v > 0.0;
        let b = |v: bool| if v { 1.0 } else { 0.0 };
        match f {
            Function::Add => args[0] + args[1],
            Function::Sub => args[0] - args[1],
            Function::Mul => args[0] * args[1],
            Function::Div => {
                if args[1] == 0.0 {
                    1.0
                } else {
                    args[0] / args[1]
                }
            }
            Function::Log => {
                if args[0] == 0.0 {
                    0.0
                } else {
                    args[0].abs().ln()
                }
            }
            Function::Exp => args[0].exp(),
            Function::Signum => {
                if args[0].is_nan() {
                    f64::NAN
                } else if args[0] == 0.0 {
                    0.0
                } else {
                    args[0].signum()
                }
            }
            Function::Sin => args[0].sin(),
            Function::Cos => args[0].cos(),
            Function::Tan => args[0].tan(),
            Function::IfThenElse => {
                if t(args[0]) {
                    args[1]
                } else {
                    args[2]
                }
            }
            Function::LessThan => b(args[0] < args[1]),
            Function::GreaterThan => b(args[0] > args[1]),
            Function::Equal => b(args[0] == args[1]),
            Function::Not => b(!t(args[0])),
            Function::And => b(t(args[0]) && t(args[1])),
            Function::Or => b(t(args[0]) || t(args[1])),
            Function::Xor => b(t(args[0]) != t(args[1])),
        }
    }
    let mut pos = 0;
    let v = go(tree.nodes(), &mut pos, row);
    assert_eq!(pos, tree.len());
    v
}

/// Common region by recursion over coordinates, using only public
/// coordinate lookups. Returns `(coord, interior)` in preorder.
pub fn brute_common_region(a: &ExpressionTree, b: &ExpressionTree) -> Vec<(NodeCoord, bool)> {
    fn walk(a: &ExpressionTree, b: &ExpressionTree, at: NodeCoord, out: &mut Vec<(NodeCoord, bool)>) {
        let na = a.node_at(&at).unwrap().symbol().arity();
        let nb = b.node_at(&at).unwrap().symbol().arity();
        out.push((at.clone(), na == nb && na > 0));
        if na == nb {
            for k in 0..na {
                walk(a, b, at.child(k), out);
            }
        }
    }
    let mut out = Vec::new();
    walk(a, b, NodeCoord::root(), &mut out);
    out
}

pub fn bits_equal(x: f64, y: f64) -> bool {
    x == y || (x.is_nan() && y.is_nan())
}
