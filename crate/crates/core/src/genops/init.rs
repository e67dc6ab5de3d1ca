use rand::Rng;

use crate::trees::{ExpressionTree, PrimitiveSet, Symbol};

/// Probabilistic tree creation (PTC2).
///
/// Grows a tree by repeatedly expanding a uniformly chosen open slot with a
/// uniformly chosen function until the committed nodes plus the open slots
/// reach `target_size`, then closes every open slot with a terminal. The
/// result has between `target_size` and `target_size + max_arity - 1`
/// nodes. A target of 0 is treated as 1.
pub fn ptc2<R: Rng + ?Sized>(rng: &mut R, target_size: usize, prims: &PrimitiveSet) -> ExpressionTree {
    let target = target_size.max(1);
    if target == 1 {
        return ExpressionTree::leaf(prims.random_terminal(rng));
    }

    // Arena of nodes; `None` marks an open slot.
    let mut labels: Vec<Option<Symbol>> = Vec::with_capacity(target + prims.max_arity());
    let mut children: Vec<Vec<usize>> = Vec::with_capacity(target + prims.max_arity());
    let mut open: Vec<usize> = Vec::new();

    let expand = |node: usize,
                  labels: &mut Vec<Option<Symbol>>,
                  children: &mut Vec<Vec<usize>>,
                  open: &mut Vec<usize>,
                  rng: &mut R| {
        let f = prims.random_function(rng);
        labels[node] = Some(Symbol::Function(f));
        for _ in 0..f.arity() {
            let slot = labels.len();
            labels.push(None);
            children.push(Vec::new());
            children[node].push(slot);
            open.push(slot);
        }
    };

    labels.push(None);
    children.push(Vec::new());
    expand(0, &mut labels, &mut children, &mut open, rng);
    let mut committed = 1;

    while committed + open.len() < target {
        let pick = rng.random_range(0..open.len());
        let slot = open.swap_remove(pick);
        expand(slot, &mut labels, &mut children, &mut open, rng);
        committed += 1;
    }
    for slot in open {
        labels[slot] = Some(prims.random_terminal(rng));
    }

    let mut prefix = Vec::with_capacity(labels.len());
    let mut stack = vec![0usize];
    while let Some(n) = stack.pop() {
        prefix.push(labels[n].expect("all slots closed"));
        stack.extend(children[n].iter().rev());
    }
    ExpressionTree::from_prefix_unchecked(prefix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{ConstantSampler, Function};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arith() -> PrimitiveSet {
        PrimitiveSet::new(
            Function::ARITHMETIC.to_vec(),
            (0..10).map(|i| (i, format!("x{}", i + 1))).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn target_one_is_a_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for target in [0, 1] {
            let t = ptc2(&mut rng, target, &arith());
            assert_eq!(t.len(), 1);
            assert!(t.root().is_terminal());
        }
    }

    #[test]
    fn binary_target_three_is_exact() {
        // With binary functions every expansion adds one committed node and
        // one net open slot, so from size 3 upwards the target is hit exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let t = ptc2(&mut rng, 3, &arith());
            assert_eq!(t.len(), 3);
            assert_eq!(t.internal_count(), 1);
            assert!(t.is_consistent());
        }
        for target in 3..60 {
            assert_eq!(ptc2(&mut rng, target, &arith()).len(), target | 1);
        }
    }

    #[test]
    fn mixed_arity_overshoot_window() {
        let prims = PrimitiveSet::new(
            Function::ALL.to_vec(),
            (0..10).map(|i| (i, format!("x{}", i + 1))).collect(),
            Some(ConstantSampler::Real { lo: -20.0, hi: 20.0 }),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let target = rng.random_range(1..=50);
            let t = ptc2(&mut rng, target, &prims);
            assert!(t.is_consistent());
            assert!(t.len() >= target && t.len() <= target + 2, "{} vs {}", t.len(), target);
        }
    }
}
