//! Equivalent frameworks obtained by moving along the slice
//! `{X_p + M(y) : X >= 0}` of projected Gram matrices, where `M(y)` changes
//! only the squared distances of missing pairs.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::edm::{build_v_basis, edm_from_configuration, gram_offset, projected_gram_with, VBasis};
use crate::error::{Result, RigidityError};
use crate::framework::{equivalence_residual, Configuration, Framework};
use crate::linalg;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

const MAX_DOUBLINGS: usize = 64;
const BISECTIONS: usize = 100;

/// A framework equivalent to, but not congruent with, the input.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentFrameworkWitness<T: Real> {
    /// Unit direction over the missing pairs.
    pub direction: Vec<T>,
    pub t: T,
    /// Largest feasible step along `direction`.
    pub t_max: T,
    /// `X_q = X_p + M(t * direction)`.
    pub x_q: DMatrix<T>,
    /// Recovered points, one row per vertex, in dimension `dim`.
    pub q: Configuration<T>,
    pub dim: usize,
    pub equivalence_residual: T,
    /// Largest change of a squared distance, relative to the largest one.
    pub distance_change: T,
}

/// Precomputed data for line searches on one framework.
pub struct Slice<'a, T: Real> {
    framework: &'a Framework<T>,
    v: VBasis<T>,
    x_p: DMatrix<T>,
    missing: Vec<(usize, usize)>,
    lambda_scale: T,
    max_distance: T,
}

impl<'a, T: Real> Slice<'a, T> {
    pub fn new(framework: &'a Framework<T>) -> Self {
        let v = build_v_basis::<T>(framework.n());
        let x_p = projected_gram_with(framework.config(), &v).matrix().clone();
        let lambda_scale = linalg::sym_eigen(&x_p).max();
        let max_distance = linalg::max_abs(edm_from_configuration(framework.config()).matrix());
        Self { framework, v, x_p, missing: framework.missing_edges(), lambda_scale, max_distance }
    }

    pub fn missing(&self) -> &[(usize, usize)] {
        &self.missing
    }

    fn point(&self, y: &[T], t: T) -> DMatrix<T> {
        let scaled: Vec<T> = y.iter().map(|&v| v * t).collect();
        &self.x_p + gram_offset(&self.missing, &scaled, &self.v)
    }

    fn feasible(&self, y: &[T], t: T, tol: &Tolerances) -> bool {
        linalg::min_eigenvalue(&self.point(y, t)) >= -T::lit(tol.line_search_rel) * self.lambda_scale
    }

    /// Smallest step whose half could still move a distance by more than the
    /// non-congruence threshold.
    fn useful_step(&self, y: &[T], tol: &Tolerances) -> T {
        let ymax = y.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        T::lit(2.0 * tol.noncongruence_rel) * self.max_distance / ymax
    }

    /// Largest t with `X_p + M(t y)` PSD up to the line-search slack, found
    /// by doubling and bisection.
    pub fn max_feasible_step(&self, y: &[T], tol: &Tolerances) -> T {
        let offset_norm = linalg::spectral_norm(&gram_offset(&self.missing, y, &self.v));
        if offset_norm == T::zero() {
            return T::zero();
        }
        let mut hi = T::lit(1e-3) * self.lambda_scale / offset_norm;
        let mut lo = T::zero();
        let mut doublings = 0;
        while self.feasible(y, hi, tol) {
            lo = hi;
            hi += hi;
            doublings += 1;
            if doublings >= MAX_DOUBLINGS {
                return lo;
            }
        }
        for _ in 0..BISECTIONS {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.feasible(y, mid, tol) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Recovers q from `X_p + M(t y)` and verifies it.
    pub fn witness_at(&self, y: &[T], t: T, t_max: T, tol: &Tolerances) -> Result<EquivalentFrameworkWitness<T>> {
        if y.len() != self.missing.len() {
            return Err(RigidityError::SizeMismatch { expected: self.missing.len(), found: y.len() });
        }
        let x_q = linalg::symmetrize(&self.point(y, t));
        let eig_x = linalg::sym_eigen(&x_q);
        if eig_x.min() < -T::lit(tol.line_search_rel) * self.lambda_scale {
            return Err(RigidityError::VerificationFailed(format!("X_q is not PSD (lambda_min {:e})", eig_x.min().as_f64())));
        }
        let vm = self.v.matrix();
        let gram = linalg::symmetrize(&(vm * &x_q * vm.transpose()));
        let eig = linalg::sym_eigen(&gram);
        let thr = linalg::rank_threshold(eig.max().max(T::zero()), tol);
        let keep: Vec<usize> = (0..eig.values.len()).rev().filter(|&k| eig.values[k] > thr).collect();
        let n = self.framework.n();
        let q = DMatrix::from_fn(n, keep.len(), |i, a| eig.vectors[(i, keep[a])] * eig.values[keep[a]].sqrt());
        let q = Configuration::unchecked(q);
        let equivalence = equivalence_residual(self.framework.graph(), self.framework.config(), &q)?;
        if equivalence > T::lit(tol.verify_rel) {
            return Err(RigidityError::VerificationFailed(format!(
                "recovered framework changes an edge length (residual {:e})",
                equivalence.as_f64()
            )));
        }
        let dq = edm_from_configuration(&q);
        let dp = edm_from_configuration(self.framework.config());
        let distance_change = linalg::max_abs(&(dq.matrix() - dp.matrix())) / self.max_distance;
        if distance_change <= T::lit(tol.noncongruence_rel) {
            return Err(RigidityError::DegenerateWitness);
        }
        Ok(EquivalentFrameworkWitness {
            direction: y.to_vec(),
            t,
            t_max,
            x_q,
            dim: keep.len(),
            q,
            equivalence_residual: equivalence,
            distance_change,
        })
    }

    /// Tries direction `y`: `None` when no useful step exists.
    pub fn try_direction(&self, y: &[T], tol: &Tolerances) -> Option<EquivalentFrameworkWitness<T>> {
        if !self.feasible(y, self.useful_step(y, tol), tol) {
            return None;
        }
        let t_max = self.max_feasible_step(y, tol);
        self.witness_at(y, t_max * T::lit(0.5), t_max, tol).ok()
    }
}

/// Witnesses at each step in `ts` along `y`; steps outside `[0, t_max]`
/// are rejected.
pub fn sweep_direction<T: Real>(
    framework: &Framework<T>,
    y: &[T],
    ts: &[T],
    tol: &Tolerances,
) -> Result<Vec<EquivalentFrameworkWitness<T>>> {
    let slice = Slice::new(framework);
    let t_max = slice.max_feasible_step(y, tol);
    ts.iter()
        .map(|&t| {
            if t < T::zero() || t > t_max {
                return Err(RigidityError::VerificationFailed(format!(
                    "step {:e} outside the feasible range [0, {:e}]",
                    t.as_f64(),
                    t_max.as_f64()
                )));
            }
            slice.witness_at(y, t, t_max, tol)
        })
        .collect()
}

/// Samples directions (every coordinate axis in both signs, then Gaussian
/// directions) until `samples` directions have been tried; returns the first
/// verified witness.
pub fn equivalent_framework_search<T: Real>(
    framework: &Framework<T>,
    seed: u64,
    samples: usize,
    tol: &Tolerances,
) -> Option<EquivalentFrameworkWitness<T>> {
    let slice = Slice::new(framework);
    let m = slice.missing().len();
    if m == 0 {
        return None;
    }
    let mut tried = 0;
    for k in 0..m {
        for sign in [T::one(), -T::one()] {
            if tried >= samples {
                return None;
            }
            tried += 1;
            let mut y = vec![T::zero(); m];
            y[k] = sign;
            if let Some(w) = slice.try_direction(&y, tol) {
                return Some(w);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while tried < samples {
        tried += 1;
        let raw: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let y: Vec<T> = raw.iter().map(|&x| T::lit(x / norm)).collect();
        if let Some(w) = slice.try_direction(&y, tol) {
            return Some(w);
        }
    }
    None
}
