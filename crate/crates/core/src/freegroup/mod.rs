//! Exact combinatorics of the free group on `r` generators: reduced
//! words, word-metric spheres and balls, the sign character, and
//! homomorphisms into matrix or permutation groups.
//!
//! Letters are packed one per byte: generator `i` is `2*i`, its inverse
//! is `2*i + 1`, so `letter ^ 1` inverts a letter. Enumeration is
//! depth-first lexicographic in this letter order, which makes every
//! stream deterministic without storing whole spheres.

mod enumerate;
mod hom;
mod profinite;
mod word;

pub use enumerate::{walk_ball, walk_ball_with, walk_count, BallVisitor, NeumaierSum, SphereIter};
pub use hom::{GroupHom, HomImages};
pub use profinite::{profinite_metric, SubgroupChain};
pub use word::{sign_character, Letter, ReducedWord};

use crate::{Error, Result};

/// Number of reduced words of length exactly `n` in the free group of
/// rank `r`: one for `n = 0`, otherwise `2r (2r-1)^(n-1)`.
pub fn sphere_size(rank: usize, n: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    let q = (2 * rank - 1) as u128;
    2 * rank as u128 * q.pow((n - 1) as u32)
}

/// Number of reduced words of length at most `n`.
pub fn ball_size(rank: usize, n: usize) -> u128 {
    (0..=n).map(|k| sphere_size(rank, k)).sum()
}

/// Check an enumeration request against an element budget before any
/// work is done. Counts come from the closed form, so a run can never
/// overshoot silently.
pub fn check_budget(rank: usize, radius: usize, budget: u64) -> Result<()> {
    if rank < 2 {
        return Err(Error::Config(format!("free group rank must be >= 2, got {rank}")));
    }
    let required = ball_size(rank, radius);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_sizes_closed_form() {
        assert_eq!(sphere_size(2, 0), 1);
        assert_eq!(sphere_size(2, 1), 4);
        assert_eq!(sphere_size(2, 2), 12);
        assert_eq!(sphere_size(2, 3), 36);
        assert_eq!(sphere_size(3, 1), 6);
        assert_eq!(sphere_size(3, 2), 30);
        assert_eq!(ball_size(2, 2), 17);
    }

    #[test]
    fn budget_is_a_hard_error() {
        let err = check_budget(3, 12, 100_000_000).unwrap_err();
        match err {
            Error::BudgetExceeded { required, budget } => {
                assert!(required > budget as u128);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        check_budget(2, 10, 100_000_000).unwrap();
    }
}
