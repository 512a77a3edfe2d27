//! Explicit size budgets for the exhaustive kernels.
//!
//! Every enumeration-heavy operation takes a [`Budget`] and fails with
//! [`Error::SizeBudgetExceeded`](crate::Error::SizeBudgetExceeded) instead of
//! silently truncating when an instance is beyond desk scale.

/// Caps on the work an operation is allowed to perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of stored terms in any multivariate polynomial product.
    pub max_terms: usize,
    /// Maximum number of domain points visited by exhaustive verification.
    pub max_points: u64,
    /// Maximum number of tuple evaluations in solution searches.
    pub max_tuples: u64,
    /// Maximum number of (candidate, point) checks in the exact slice-rank search.
    pub max_rank_steps: u64,
}

impl Default for Budget {
    // max_points sits well below max_terms on purpose: an indicator that is
    // representable but whose domain is too big to sweep is the regime where
    // sampled verification takes over.
    fn default() -> Self {
        Budget {
            max_terms: 1 << 22,
            max_points: 1 << 16,
            max_tuples: 1 << 20,
            max_rank_steps: 1 << 22,
        }
    }
}

impl Budget {
    /// A budget with every cap set to `n` (terms capped at `usize` range).
    pub fn uniform(n: u64) -> Self {
        Budget {
            max_terms: usize::try_from(n).unwrap_or(usize::MAX),
            max_points: n,
            max_tuples: n,
            max_rank_steps: n,
        }
    }
}
