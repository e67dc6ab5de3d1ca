//! Solution creation and variation operators.

mod crossover;
mod init;
mod mutation;
mod region;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::trees::ExpressionTree;

pub use crossover::{
    crossover_homologous, crossover_onepoint, crossover_sizefair, crossover_standard,
    crossover_uniform, homologous_with_event, positional_distance, sizefair_with_event,
    uniform_with, SizeFairEvent, INTERNAL_BIAS,
};
pub use init::ptc2;
pub use mutation::{mutate_class, single_point_mutation, Mutation, MutationClass, MutationOutcome};
pub use region::{common_region, CommonRegion, RegionPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverKind {
    Standard,
    Onepoint,
    Uniform,
    Sizefair,
    Homologous,
    Mixed,
}

impl CrossoverKind {
    pub const ALL: [CrossoverKind; 6] = [
        CrossoverKind::Standard,
        CrossoverKind::Onepoint,
        CrossoverKind::Uniform,
        CrossoverKind::Sizefair,
        CrossoverKind::Homologous,
        CrossoverKind::Mixed,
    ];

    /// The operators `Mixed` draws from.
    pub const CONCRETE: [CrossoverKind; 5] = [
        CrossoverKind::Standard,
        CrossoverKind::Onepoint,
        CrossoverKind::Uniform,
        CrossoverKind::Sizefair,
        CrossoverKind::Homologous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CrossoverKind::Standard => "standard",
            CrossoverKind::Onepoint => "onepoint",
            CrossoverKind::Uniform => "uniform",
            CrossoverKind::Sizefair => "sizefair",
            CrossoverKind::Homologous => "homologous",
            CrossoverKind::Mixed => "mixed",
        }
    }

    /// Produces one child. Returns the concrete operator that ran, which
    /// differs from `self` only for `Mixed`.
    pub fn apply<R: Rng + ?Sized>(
        self,
        p1: &ExpressionTree,
        p2: &ExpressionTree,
        rng: &mut R,
    ) -> (ExpressionTree, CrossoverKind) {
        let kind = match self {
            CrossoverKind::Mixed => Self::CONCRETE[rng.random_range(0..Self::CONCRETE.len())],
            k => k,
        };
        let child = match kind {
            CrossoverKind::Standard => crossover_standard(p1, p2, rng),
            CrossoverKind::Onepoint => crossover_onepoint(p1, p2, rng),
            CrossoverKind::Uniform => crossover_uniform(p1, p2, rng),
            CrossoverKind::Sizefair => crossover_sizefair(p1, p2, rng),
            CrossoverKind::Homologous => crossover_homologous(p1, p2, rng),
            CrossoverKind::Mixed => unreachable!(),
        };
        (child, kind)
    }
}

impl fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CrossoverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        CrossoverKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| {
                let valid: Vec<&str> = CrossoverKind::ALL.iter().map(|k| k.name()).collect();
                Error::config(
                    "crossover",
                    format!("unknown kind `{s}`, expected one of: {}", valid.join(", ")),
                )
            })
    }
}

/// Uniform draw over the five concrete operators, then delegation.
pub fn crossover_mixed<R: Rng + ?Sized>(
    p1: &ExpressionTree,
    p2: &ExpressionTree,
    rng: &mut R,
) -> (ExpressionTree, CrossoverKind) {
    CrossoverKind::Mixed.apply(p1, p2, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_parse() {
        for k in CrossoverKind::ALL {
            assert_eq!(k.name().parse::<CrossoverKind>().unwrap(), k);
        }
        assert_eq!("one-point".parse::<CrossoverKind>().unwrap(), CrossoverKind::Onepoint);
        assert_eq!("Size_Fair".parse::<CrossoverKind>().unwrap(), CrossoverKind::Sizefair);
        let err = "bogus".parse::<CrossoverKind>().unwrap_err().to_string();
        for k in CrossoverKind::ALL {
            assert!(err.contains(k.name()), "{err}");
        }
    }
}
