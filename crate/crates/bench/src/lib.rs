//! Fixtures shared by the benchmarks.

use osgp_core::genops::ptc2;
use osgp_core::problems::gen_poly10;
use osgp_core::{ExpressionTree, Problem, ProblemKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Poly-10 with the default 100 rows.
pub fn poly10() -> Problem {
    Problem::new(ProblemKind::Poly10, gen_poly10(&mut rng(0), 100)).expect("valid problem")
}

/// `count` PTC2 trees of roughly `size` nodes.
pub fn trees(problem: &Problem, size: usize, count: usize, seed: u64) -> Vec<ExpressionTree> {
    let mut r = rng(seed);
    (0..count).map(|_| ptc2(&mut r, size, &problem.prims)).collect()
}
