//! Dense linear-algebra kernels shared by the rigidity modules.
//!
//! Everything here works on small dense matrices (n up to a few hundred).
//! Numerical rank always means "singular values above
//! `max(rank_rel * sigma_max, rank_abs)`".

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use crate::scalar::Real;
use crate::tolerance::Tolerances;

pub fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

pub fn is_symmetric<T: Real>(m: &DMatrix<T>, rel: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = max_abs(m);
    let tol = T::lit(rel) * scale;
    (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

/// Largest absolute entry (0 for an empty matrix).
pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending and
/// eigenvector columns in matching order.
#[derive(Debug, Clone)]
pub struct SortedEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: DMatrix<T>,
}

impl<T: Real> SortedEigen<T> {
    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }
}

pub fn sym_eigen<T: Real>(m: &DMatrix<T>) -> SortedEigen<T> {
    let n = m.nrows();
    if n == 0 {
        return SortedEigen { values: Vec::new(), vectors: DMatrix::zeros(0, 0) };
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(Ordering::Equal));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    SortedEigen { values, vectors }
}

pub fn min_eigenvalue<T: Real>(m: &DMatrix<T>) -> T {
    sym_eigen(m).min()
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<T> = SVD::new(m.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    s
}

pub fn rank_threshold<T: Real>(sigma_max: T, tol: &Tolerances) -> T {
    (T::lit(tol.rank_rel) * sigma_max).max(T::lit(tol.rank_abs))
}

pub fn rank_of_values<T: Real>(sorted_desc: &[T], tol: &Tolerances) -> usize {
    let Some(&top) = sorted_desc.first() else { return 0 };
    let thr = rank_threshold(top, tol);
    sorted_desc.iter().filter(|s| **s > thr).count()
}

pub fn numerical_rank<T: Real>(m: &DMatrix<T>, tol: &Tolerances) -> usize {
    rank_of_values(&singular_values(m), tol)
}

/// Numerical rank of a symmetric matrix from its eigenvalue magnitudes.
pub fn symmetric_rank<T: Real>(eig: &SortedEigen<T>, tol: &Tolerances) -> usize {
    let mut mags: Vec<T> = eig.values.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    rank_of_values(&mags, tol)
}

pub fn spectral_norm<T: Real>(m: &DMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// Flips each column so that its largest-magnitude entry is positive
/// (first such entry on ties).
pub fn normalize_column_signs<T: Real>(m: &mut DMatrix<T>) {
    for mut col in m.column_iter_mut() {
        let mut best = T::zero();
        let mut sign_negative = false;
        for x in col.iter() {
            if x.abs() > best {
                best = x.abs();
                sign_negative = *x < T::zero();
            }
        }
        if sign_negative {
            col.neg_mut();
        }
    }
}

/// Orthonormal basis (as columns) of `{x : a x = 0}`, deterministic signs.
pub fn null_space<T: Real>(a: &DMatrix<T>, tol: &Tolerances) -> DMatrix<T> {
    let n = a.ncols();
    if a.nrows() == 0 || max_abs(a) == T::zero() {
        return DMatrix::identity(n, n);
    }
    let svd = SVD::new(a.clone(), false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().fold(T::zero(), |m, s| m.max(*s));
    let thr = rank_threshold(sigma_max, tol);
    let rows: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > thr).collect();
    let row_space = DMatrix::from_fn(rows.len(), n, |r, c| v_t[(rows[r], c)]);
    complement_of_orthonormal_rows(&row_space)
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// (orthonormal) rows of `rows`.
pub fn complement_of_orthonormal_rows<T: Real>(rows: &DMatrix<T>) -> DMatrix<T> {
    let n = rows.ncols();
    let k = rows.nrows();
    if k == 0 {
        return DMatrix::identity(n, n);
    }
    if k >= n {
        return DMatrix::zeros(n, 0);
    }
    let projector = DMatrix::identity(n, n) - rows.transpose() * rows;
    let eig = sym_eigen(&projector);
    let half = T::lit(0.5);
    let cols: Vec<usize> = (0..n).filter(|&i| eig.values[i] > half).collect();
    let mut basis = DMatrix::from_fn(n, cols.len(), |r, c| eig.vectors[(r, cols[c])]);
    normalize_column_signs(&mut basis);
    basis
}

/// Orthonormal basis (columns) for the column space of `m`.
pub fn column_space<T: Real>(m: &DMatrix<T>, tol: &Tolerances) -> DMatrix<T> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested U");
    let sigma_max = svd.singular_values.iter().fold(T::zero(), |a, s| a.max(*s));
    let thr = rank_threshold(sigma_max, tol);
    let cols: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > thr).collect();
    let mut basis = DMatrix::from_fn(m.nrows(), cols.len(), |r, c| u[(r, cols[c])]);
    normalize_column_signs(&mut basis);
    basis
}

/// Minimum-norm least-squares solution of `a x = b` via the pseudo-inverse.
pub fn lstsq<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, tol: &Tolerances) -> DMatrix<T> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return DMatrix::zeros(n, b.ncols());
    }
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sigma_max = svd.singular_values.iter().fold(T::zero(), |acc, s| acc.max(*s));
    let thr = rank_threshold(sigma_max, tol);
    let mut x = DMatrix::zeros(n, b.ncols());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= thr {
            continue;
        }
        let coeff = u.column(k).transpose() * b / s;
        x += v_t.row(k).transpose() * coeff;
    }
    x
}

/// Symmetric PSD square root; negative eigenvalues are clipped to zero.
pub fn psd_sqrt<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    let eig = sym_eigen(m);
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= T::zero() {
            continue;
        }
        let v = eig.vectors.column(k);
        out += v * v.transpose() * lam.sqrt();
    }
    out
}

pub fn sym_dim(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Basis of the symmetric k x k matrices, orthonormal in the trace inner
/// product: `E_aa` first, then `(E_ab + E_ba)/sqrt(2)` for `a < b`.
pub fn sym_basis<T: Real>(k: usize) -> Vec<DMatrix<T>> {
    let mut basis = Vec::with_capacity(sym_dim(k));
    for a in 0..k {
        let mut m = DMatrix::zeros(k, k);
        m[(a, a)] = T::one();
        basis.push(m);
    }
    let off = T::one() / T::lit(2.0).sqrt();
    for a in 0..k {
        for b in (a + 1)..k {
            let mut m = DMatrix::zeros(k, k);
            m[(a, b)] = off;
            m[(b, a)] = off;
            basis.push(m);
        }
    }
    basis
}

pub fn trace_inner<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.component_mul(b).sum()
}

pub fn combine<T: Real>(basis: &[DMatrix<T>], coeffs: &[T]) -> DMatrix<T> {
    let (r, c) = basis.first().map_or((0, 0), |m| m.shape());
    basis.iter().zip(coeffs).fold(DMatrix::zeros(r, c), |acc, (b, &x)| acc + b * x)
}

/// Largest principal-angle sine between the spans of two matrices with
/// orthonormal columns.
pub fn subspace_sine<T: Real>(q1: &DMatrix<T>, q2: &DMatrix<T>) -> T {
    if q1.ncols() != q2.ncols() {
        return T::one();
    }
    let r1 = q2 - q1 * (q1.transpose() * q2);
    let r2 = q1 - q2 * (q2.transpose() * q1);
    spectral_norm(&r1).max(spectral_norm(&r2))
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Lexicographic k-subsets of `0..n`.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in (i + 1)..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
