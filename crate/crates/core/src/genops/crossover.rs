//! Subtree crossovers. Every operator returns one child built from a copy
//! of the first parent with material taken from the second.

use rand::Rng;

use super::region::{common_region, RegionPair};
use crate::trees::{ExpressionTree, NodeCoord};

/// Probability of choosing an internal node as a crossover point.
pub const INTERNAL_BIAS: f64 = 0.9;

/// Subtree swap at two independently chosen, internally biased points.
pub fn crossover_standard<R: Rng + ?Sized>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    rng: &mut R,
) -> ExpressionTree {
    let cut = p1.random_index(rng, INTERNAL_BIAS);
    let donor = p2.random_index(rng, INTERNAL_BIAS);
    p1.replace_at(cut, &p2.nodes()[donor..p2.subtree_end(donor)])
}

/// Subtree swap at one uniformly chosen common-region position.
pub fn crossover_onepoint<R: Rng + ?Sized>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    rng: &mut R,
) -> ExpressionTree {
    let region = common_region(p1, p2);
    let pair = &region.pairs[rng.random_range(0..region.len())];
    swap_at(p1, p2, pair)
}

fn swap_at(p1: &ExpressionTree, p2: &ExpressionTree, pair: &RegionPair) -> ExpressionTree {
    let end = p2.subtree_end(pair.b);
    p1.replace_at(pair.a, &p2.nodes()[pair.b..end])
}

/// Uniform crossover with a fair coin per common-region pair.
pub fn crossover_uniform<R: Rng + ?Sized>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    rng: &mut R,
) -> ExpressionTree {
    uniform_with(p1, p2, |_| rng.random_bool(0.5))
}

/// Uniform crossover driven by `take`, asked once per common-region pair in
/// preorder. On `true` an interior pair takes the second parent's label and
/// a boundary pair takes the second parent's whole subtree.
pub fn uniform_with<F: FnMut(&RegionPair) -> bool>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    mut take: F,
) -> ExpressionTree {
    let region = common_region(p1, p2);
    let mut nodes = Vec::with_capacity(p1.len().max(p2.len()));
    // Boundary pairs have no descendants in the region, so the preorder walk
    // over pairs interleaves cleanly with copying p1 material between them.
    let mut cursor = 0;
    for pair in &region.pairs {
        debug_assert!(pair.a >= cursor);
        nodes.extend_from_slice(&p1.nodes()[cursor..pair.a]);
        let keep = !take(pair);
        if pair.interior {
            nodes.push(if keep { p1.nodes()[pair.a] } else { p2.nodes()[pair.b] });
            cursor = pair.a + 1;
        } else {
            let (src, at) = if keep { (p1, pair.a) } else { (p2, pair.b) };
            nodes.extend_from_slice(&src.nodes()[at..src.subtree_end(at)]);
            cursor = p1.subtree_end(pair.a);
        }
    }
    nodes.extend_from_slice(&p1.nodes()[cursor..]);
    ExpressionTree::from_prefix_unchecked(nodes)
}

/// Sizes involved in one size-fair or homologous crossover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeFairEvent {
    pub cut: usize,
    pub removed: usize,
    pub donor: usize,
    pub inserted: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SizeGroup {
    Smaller,
    Equal,
    Larger,
}

/// Picks the size group of the inserted subtree. Candidates are all donor
/// subtrees with size at most `2l + 1`. The equal-size group gets
/// probability `|equal| / total`; the rest is split between smaller and
/// larger so that the expected size change is zero. An empty side hands
/// its mass to the other side.
fn choose_group<R: Rng + ?Sized>(removed: usize, sizes: &[usize], rng: &mut R) -> SizeGroup {
    let (mut n_small, mut n_eq, mut n_large) = (0usize, 0usize, 0usize);
    let (mut dec, mut inc) = (0usize, 0usize);
    for &s in sizes.iter().filter(|&&s| s <= 2 * removed + 1) {
        match s.cmp(&removed) {
            std::cmp::Ordering::Less => {
                n_small += 1;
                dec += removed - s;
            }
            std::cmp::Ordering::Equal => n_eq += 1,
            std::cmp::Ordering::Greater => {
                n_large += 1;
                inc += s - removed;
            }
        }
    }
    let total = n_small + n_eq + n_large;
    assert!(total > 0, "every leaf is a candidate when removed >= 1");

    let p_eq = n_eq as f64 / total as f64;
    let rest = 1.0 - p_eq;
    let (p_small, _p_large) = match (n_small, n_large) {
        (0, 0) => (0.0, 0.0),
        (0, _) => (0.0, rest),
        (_, 0) => (rest, 0.0),
        _ => {
            let mean_dec = dec as f64 / n_small as f64;
            let mean_inc = inc as f64 / n_large as f64;
            let p_large = rest * mean_dec / (mean_dec + mean_inc);
            (rest - p_large, p_large)
        }
    };
    let u: f64 = rng.random();
    if u < p_eq {
        SizeGroup::Equal
    } else if u < p_eq + p_small {
        SizeGroup::Smaller
    } else if n_large > 0 {
        SizeGroup::Larger
    } else if n_small > 0 {
        SizeGroup::Smaller
    } else {
        SizeGroup::Equal
    }
}

fn in_group(size: usize, removed: usize, group: SizeGroup) -> bool {
    match group {
        SizeGroup::Smaller => size < removed,
        SizeGroup::Equal => size == removed,
        SizeGroup::Larger => size > removed && size <= 2 * removed + 1,
    }
}

fn size_fair_impl<R: Rng + ?Sized>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    rng: &mut R,
    homologous: bool,
) -> (ExpressionTree, SizeFairEvent) {
    let cut = p1.random_index(rng, INTERNAL_BIAS);
    let removed = p1.subtree_len(cut);
    let sizes = p2.subtree_sizes();
    let group = choose_group(removed, &sizes, rng);
    let candidates: Vec<usize> = (0..sizes.len())
        .filter(|&i| in_group(sizes[i], removed, group))
        .collect();
    debug_assert!(!candidates.is_empty());

    let donor = if homologous {
        let target = p1.coord_of(cut);
        let coords = p2.coords();
        let distance = |i: usize| target.prefix_distance(&coords[i]);
        let best = candidates.iter().map(|&i| distance(i)).min().expect("non-empty");
        let closest: Vec<usize> = candidates.into_iter().filter(|&i| distance(i) == best).collect();
        closest[rng.random_range(0..closest.len())]
    } else {
        candidates[rng.random_range(0..candidates.len())]
    };
    let end = p2.subtree_end(donor);
    let child = p1.replace_at(cut, &p2.nodes()[donor..end]);
    let event = SizeFairEvent {
        cut,
        removed,
        donor,
        inserted: end - donor,
    };
    (child, event)
}

/// Size-fair crossover: the inserted subtree is at most `2l + 1` nodes,
/// `l` being the size of the removed one, and the expected size change is
/// zero whenever both smaller and larger candidates exist.
pub fn crossover_sizefair<R: Rng + ?Sized>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    rng: &mut R,
) -> ExpressionTree {
    size_fair_impl(p1, p2, rng, false).0
}

pub fn sizefair_with_event<R: Rng + ?Sized>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    rng: &mut R,
) -> (ExpressionTree, SizeFairEvent) {
    size_fair_impl(p1, p2, rng, false)
}

/// Homologous crossover: size-fair group selection, then the candidate
/// positionally closest to the crossover point in the first parent.
pub fn crossover_homologous<R: Rng + ?Sized>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    rng: &mut R,
) -> ExpressionTree {
    size_fair_impl(p1, p2, rng, true).0
}

pub fn homologous_with_event<R: Rng + ?Sized>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    rng: &mut R,
) -> (ExpressionTree, SizeFairEvent) {
    size_fair_impl(p1, p2, rng, true)
}

/// Distance used by homologous crossover between two positions.
pub fn positional_distance(a: &NodeCoord, b: &NodeCoord) -> usize {
    a.prefix_distance(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> ExpressionTree {
        s.parse().unwrap()
    }

    #[test]
    fn standard_example() {
        let p1 = t("(ADD x1 x2)");
        let p2 = t("(MUL x3 x4)");
        let child = p1.replace_at(1, p2.nodes());
        assert_eq!(child, t("(ADD (MUL x3 x4) x2)"));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let c = crossover_standard(&p1, &p2, &mut rng);
            assert!(c.is_consistent());
            assert!([1, 3, 5].contains(&c.len()));
        }
    }

    #[test]
    fn onepoint_from_leaf_parent_yields_donor() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p2 = t("(ADD x1 (SIN x2))");
        for _ in 0..20 {
            assert_eq!(crossover_onepoint(&t("x5"), &p2, &mut rng), p2);
        }
    }

    #[test]
    fn uniform_extremes() {
        let p1 = t("(ADD (MUL x1 x2) (SIN x3))");
        let p2 = t("(SUB (DIV x4 (ADD x5 x6)) x7)");
        assert_eq!(uniform_with(&p1, &p2, |_| false), p1);
        assert_eq!(uniform_with(&p1, &p2, |_| true), p2);
        // take only the root label
        assert_eq!(
            uniform_with(&p1, &p2, |p| p.coord.depth() == 0),
            t("(SUB (MUL x1 x2) (SIN x3))")
        );
        // take only the second boundary pair
        assert_eq!(
            uniform_with(&p1, &p2, |p| p.coord.0 == vec![1]),
            t("(ADD (MUL x1 x2) x7)")
        );
    }

    #[test]
    fn size_fair_with_only_leaves() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p1 = t("(ADD x1 x2)");
        let p2 = t("x9");
        for _ in 0..100 {
            let (child, ev) = sizefair_with_event(&p1, &p2, &mut rng);
            assert!(ev.inserted <= 2 * ev.removed + 1);
            if ev.removed == 1 {
                assert_eq!(child.len(), p1.len());
            }
        }
    }

    #[test]
    fn group_probabilities_balance_size_change() {
        // removed = 3, candidates: sizes 1 (x4), 3 (x2), 5 (x1), 7 (x1), 9 excluded
        let sizes = [1, 1, 1, 1, 3, 3, 5, 7, 9];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[choose_group(3, &sizes, &mut rng) as usize] += 1;
        }
        // p_eq = 2/8; mean decrease 2, mean increase 3 => p_large = 0.75*2/5 = 0.3, p_small = 0.45
        let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        assert!((freq[0] - 0.45).abs() < 0.01, "{freq:?}");
        assert!((freq[1] - 0.25).abs() < 0.01, "{freq:?}");
        assert!((freq[2] - 0.30).abs() < 0.01, "{freq:?}");
    }

    #[test]
    fn homologous_prefers_same_position() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = t("(ADD (MUL x1 x2) (SUB (SIN x3) x4))");
        for _ in 0..500 {
            let (child, ev) = homologous_with_event(&p, &p, &mut rng);
            if ev.removed == ev.inserted {
                assert_eq!(ev.cut, ev.donor);
                assert_eq!(child, p);
            }
        }
    }
}
