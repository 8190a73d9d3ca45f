//! Numerical thresholds and search budgets.

use serde::{Deserialize, Serialize};

/// Thresholds used throughout the crate. All values are relative unless
/// the field name says otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Singular values above `rank_rel * sigma_max` count towards rank.
    pub rank_rel: f64,
    /// Absolute floor for the rank threshold.
    pub rank_abs: f64,
    /// PSD acceptance: `lambda_min >= -psd_rel * max(1, lambda_max)`.
    pub psd_rel: f64,
    /// Residual threshold for verifying stresses, Gale matrices and witnesses.
    pub verify_rel: f64,
    /// An (r+1)-subset is affinely dependent when its smallest singular value
    /// is at most this times its diameter.
    pub affine_dependence_rel: f64,
    /// Smallest singular value below which a Gale submatrix is singular.
    pub gale_minor: f64,
    /// Minimum eigenvalue a trace-normalized Psi needs to count as positive definite.
    pub psd_success: f64,
    /// Minimum eigenvalue (relative to the largest) accepted for a Farkas certificate.
    pub farkas_psd: f64,
    /// Two EDMs differing by more than this (relative) are not congruent.
    pub noncongruence_rel: f64,
    /// PSD slack allowed while line-searching equivalent projected Gram matrices.
    pub line_search_rel: f64,
    /// Largest number of subsets enumerated by combinatorial checks.
    pub combinatorial_cap: u128,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: 1e-9,
            rank_abs: 1e-12,
            psd_rel: 1e-9,
            verify_rel: 1e-9,
            affine_dependence_rel: 1e-8,
            gale_minor: 1e-8,
            psd_success: 1e-7,
            farkas_psd: 1e-10,
            noncongruence_rel: 1e-6,
            line_search_rel: 1e-14,
            combinatorial_cap: 1_000_000,
        }
    }
}

impl Tolerances {
    /// Thresholds suited to `f32` arithmetic.
    pub fn single_precision() -> Self {
        Self {
            rank_rel: 1e-4,
            rank_abs: 1e-6,
            psd_rel: 1e-4,
            verify_rel: 1e-4,
            affine_dependence_rel: 1e-4,
            gale_minor: 1e-4,
            psd_success: 1e-3,
            farkas_psd: 1e-5,
            noncongruence_rel: 1e-2,
            line_search_rel: 1e-6,
            combinatorial_cap: 1_000_000,
        }
    }

    pub fn all_positive(&self) -> bool {
        [
            self.rank_rel,
            self.rank_abs,
            self.psd_rel,
            self.verify_rel,
            self.affine_dependence_rel,
            self.gale_minor,
            self.psd_success,
            self.farkas_psd,
            self.noncongruence_rel,
            self.line_search_rel,
        ]
        .iter()
        .all(|t| *t > 0.0)
    }
}

/// Work limits for the randomized searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub restarts: usize,
    pub iterations: usize,
    pub falsifier_samples: usize,
    pub lateration_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { restarts: 50, iterations: 500, falsifier_samples: 200, lateration_nodes: 100_000 }
    }
}
