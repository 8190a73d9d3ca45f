//! Maximization of the smallest eigenvalue over an affine slice
//! `{sum c_k B_k : sum c_k tr(B_k) = target}` of a subspace of symmetric
//! matrices. The objective is concave; it is climbed with averaged
//! eigenvector subgradients and diminishing steps, restarted from
//! perturbations of the trace-weighted centre.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

const INITIAL_STEP: f64 = 0.25;
const RESTART_SPREAD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<T: Real> {
    /// Coefficients of the best point found.
    pub coeffs: Vec<T>,
    /// The best point itself.
    pub matrix: DMatrix<T>,
    pub lambda_min: T,
    pub success: bool,
    /// Restart that produced the best point.
    pub restart: usize,
    pub iterations: usize,
}

/// Maximizes `lambda_min(sum c_k B_k)` subject to `sum c_k tr(B_k) = target`.
/// The basis must be orthonormal in the trace inner product. The search stops
/// at the first point with `lambda_min >= success`; restarts run in order and
/// draw from independent streams of a generator seeded with `seed`.
#[allow(clippy::too_many_arguments)]
pub fn maximize_min_eigenvalue<T: Real>(
    basis: &[DMatrix<T>],
    target: T,
    success: T,
    restarts: usize,
    iterations: usize,
    seed: u64,
    tol: &Tolerances,
) -> Option<SearchOutcome<T>> {
    let d = basis.len();
    if d == 0 {
        return None;
    }
    let t = DVector::from_iterator(d, basis.iter().map(|b| b.trace()));
    let t_norm = t.norm();
    let m = basis[0].nrows();
    if t_norm <= T::lit(tol.rank_rel) * T::from_usize(m).expect("usize fits").sqrt() {
        // every element is traceless, hence never positive definite
        return None;
    }
    let c0 = &t * (target / (t_norm * t_norm));
    let null = linalg::null_space(&DMatrix::from_row_slice(1, d, t.as_slice()), tol);
    let radius = c0.norm();

    let evaluate = |c: &DVector<T>| {
        let mat = linalg::combine(basis, c.as_slice());
        let eig = linalg::sym_eigen(&mat);
        (mat, eig)
    };

    let mut best: Option<SearchOutcome<T>> = None;
    for restart in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let mut w = DVector::<T>::zeros(null.ncols());
        if restart > 0 {
            for x in w.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut rng);
                *x = T::lit(g * RESTART_SPREAD) * radius;
            }
        }
        let mut local_best: Option<(DVector<T>, DMatrix<T>, T, usize)> = None;
        for j in 0..iterations.max(1) {
            let c = &c0 + &null * &w;
            let (mat, eig) = evaluate(&c);
            let lam = eig.min();
            if local_best.as_ref().is_none_or(|b| lam > b.2) {
                local_best = Some((c.clone(), mat, lam, j + 1));
            }
            if lam >= success || null.ncols() == 0 {
                break;
            }
            let step = T::lit(INITIAL_STEP) * radius / T::from_usize(j + 1).expect("usize fits").sqrt();
            // epsilon-subgradient: average over the eigenvalues near the bottom
            let band = step * T::lit(0.5) * (target.abs() / T::from_usize(m).expect("usize fits")) / radius;
            let mut g = DVector::<T>::zeros(d);
            let mut count = T::zero();
            for (idx, &val) in eig.values.iter().enumerate() {
                if val > lam + band {
                    break;
                }
                let u = eig.vectors.column(idx);
                for (k, b) in basis.iter().enumerate() {
                    g[k] += (u.transpose() * b * u)[(0, 0)];
                }
                count += T::one();
            }
            let g = g / count;
            let dir = null.transpose() * g;
            let dn = dir.norm();
            if dn <= T::lit(1e-15) {
                break;
            }
            w += dir * (step / dn);
        }
        let (coeffs, matrix, lambda_min, iters) = local_best.expect("at least one iteration");
        let success_here = lambda_min >= success;
        if best.as_ref().is_none_or(|b| lambda_min > b.lambda_min) {
            best = Some(SearchOutcome {
                coeffs: coeffs.iter().copied().collect(),
                matrix,
                lambda_min,
                success: success_here,
                restart,
                iterations: iters,
            });
        }
        if success_here || null.ncols() == 0 {
            break;
        }
    }
    best
}
