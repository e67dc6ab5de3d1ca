use rand::Rng;

use crate::trees::{ExpressionTree, PrimitiveSet, Symbol};

/// Node class a single-point mutation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationClass {
    Function,
    Terminal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationOutcome {
    FunctionReplaced,
    TerminalReplaced,
    /// Nothing in the primitive set could replace any node; the tree is
    /// returned unchanged.
    NoReplacement,
}

#[derive(Clone, Debug)]
pub struct Mutation {
    pub tree: ExpressionTree,
    pub outcome: MutationOutcome,
}

/// Replaces one symbol while keeping the tree shape. Picks the function or
/// terminal class with equal probability, then a node within that class.
pub fn single_point_mutation<R: Rng + ?Sized>(
    tree: &ExpressionTree,
    rng: &mut R,
    prims: &PrimitiveSet,
) -> Mutation {
    let class = if rng.random_bool(0.5) {
        MutationClass::Function
    } else {
        MutationClass::Terminal
    };
    mutate_class(tree, rng, prims, class)
}

/// Single-point mutation with the class fixed by the caller. Falls back to
/// the other class when the requested one has no candidate.
pub fn mutate_class<R: Rng + ?Sized>(
    tree: &ExpressionTree,
    rng: &mut R,
    prims: &PrimitiveSet,
    class: MutationClass,
) -> Mutation {
    let attempt = |class, rng: &mut R| match class {
        MutationClass::Function => mutate_function(tree, rng, prims),
        MutationClass::Terminal => mutate_terminal(tree, rng, prims),
    };
    let other = match class {
        MutationClass::Function => MutationClass::Terminal,
        MutationClass::Terminal => MutationClass::Function,
    };
    attempt(class, rng)
        .or_else(|| attempt(other, rng))
        .unwrap_or_else(|| Mutation {
            tree: tree.clone(),
            outcome: MutationOutcome::NoReplacement,
        })
}

fn mutate_function<R: Rng + ?Sized>(
    tree: &ExpressionTree,
    rng: &mut R,
    prims: &PrimitiveSet,
) -> Option<Mutation> {
    let has_alternative = |arity: usize| prims.functions().iter().filter(|f| f.arity() == arity).count() > 1;
    let eligible: Vec<usize> = tree
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_terminal() && has_alternative(s.arity()))
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() {
        return None;
    }
    let index = eligible[rng.random_range(0..eligible.len())];
    let current = tree.nodes()[index];
    let alternatives: Vec<Symbol> = prims
        .functions()
        .iter()
        .map(|&f| Symbol::Function(f))
        .filter(|s| s.arity() == current.arity() && *s != current)
        .collect();
    let replacement = alternatives[rng.random_range(0..alternatives.len())];
    Some(Mutation {
        tree: tree.relabel_at(index, replacement),
        outcome: MutationOutcome::FunctionReplaced,
    })
}

fn mutate_terminal<R: Rng + ?Sized>(
    tree: &ExpressionTree,
    rng: &mut R,
    prims: &PrimitiveSet,
) -> Option<Mutation> {
    // A lone variable without constants can only be replaced by itself.
    if prims.terminal_choices() < 2 && prims.constants().is_none() {
        return None;
    }
    let leaves = tree.len() - tree.internal_count();
    let k = rng.random_range(0..leaves);
    let index = tree
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_terminal())
        .nth(k)
        .map(|(i, _)| i)
        .expect("k < leaf count");
    let replacement = prims.random_terminal(rng);
    Some(Mutation {
        tree: tree.relabel_at(index, replacement),
        outcome: MutationOutcome::TerminalReplaced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::Function;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arith(vars: usize) -> PrimitiveSet {
        PrimitiveSet::new(
            Function::ARITHMETIC.to_vec(),
            (0..vars).map(|i| (i, format!("x{}", i + 1))).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn leaf_stays_a_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let leaf: ExpressionTree = "x1".parse().unwrap();
        for class in [MutationClass::Terminal, MutationClass::Function] {
            let m = mutate_class(&leaf, &mut rng, &arith(10), class);
            assert_eq!(m.outcome, MutationOutcome::TerminalReplaced);
            assert_eq!(m.tree.len(), 1);
            assert!(m.tree.root().is_terminal());
        }
    }

    #[test]
    fn function_branch_picks_a_different_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tree: ExpressionTree = "(ADD x1 x2)".parse().unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let m = mutate_class(&tree, &mut rng, &arith(10), MutationClass::Function);
            assert_eq!(m.outcome, MutationOutcome::FunctionReplaced);
            let Symbol::Function(f) = m.tree.root() else { panic!() };
            assert_ne!(f, Function::Add);
            seen.insert(f);
        }
        assert_eq!(
            seen.into_iter().collect::<Vec<_>>(),
            vec![Function::Sub, Function::Mul, Function::Div]
        );
    }

    #[test]
    fn no_replacement_is_signalled() {
        let prims = PrimitiveSet::new(vec![Function::Add], vec![(0, "x1".into())], None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tree: ExpressionTree = "(ADD x1 x1)".parse().unwrap();
        let m = single_point_mutation(&tree, &mut rng, &prims);
        assert_eq!(m.outcome, MutationOutcome::NoReplacement);
        assert_eq!(m.tree, tree);
    }

    #[test]
    fn unique_arity_functions_fall_back_to_terminals() {
        let prims = PrimitiveSet::new(
            vec![Function::IfThenElse, Function::Add],
            vec![(0, "x1".into()), (1, "x2".into())],
            None,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tree: ExpressionTree = "(IF-THEN-ELSE x1 x2 x1)".parse().unwrap();
        let m = mutate_class(&tree, &mut rng, &prims, MutationClass::Function);
        assert_eq!(m.outcome, MutationOutcome::TerminalReplaced);
        assert_eq!(m.tree.root(), tree.root());
    }
}
