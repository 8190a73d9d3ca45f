//! Euclidean distance matrices and the projected Gram representation.
//!
//! With V an n x (n-1) matrix satisfying `V^T e = 0`, `V^T V = I`, the maps
//! `T_V(D) = -1/2 V^T D V` and
//! `K_V(X) = diag(VXV^T) e^T + e diag(VXV^T)^T - 2 VXV^T`
//! are mutually inverse between hollow symmetric n x n matrices and
//! symmetric (n-1) x (n-1) matrices. A hollow D is an EDM of embedding
//! dimension r iff `T_V(D)` is PSD of rank r.

use nalgebra::DMatrix;

use crate::error::{Result, RigidityError};
use crate::framework::{Configuration, SimpleGraph};
use crate::linalg::{self, SortedEigen};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Matrix of squared pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Edm<T: Real>(DMatrix<T>);

impl<T: Real> Edm<T> {
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.0
    }
}

/// Orthonormal basis of `{x : e^T x = 0}` stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct VBasis<T: Real>(DMatrix<T>);

impl<T: Real> VBasis<T> {
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }
}

/// `X = -1/2 V^T D V`, the projected Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedGram<T: Real>(DMatrix<T>);

impl<T: Real> ProjectedGram<T> {
    pub fn new(x: DMatrix<T>) -> Self {
        Self(x)
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    /// Splits the eigenvectors into the top-`r` block W (column space) and
    /// the remaining block U (null space).
    pub fn spectral_split(&self, r: usize) -> SpectralSplit<T> {
        let eig = linalg::sym_eigen(&self.0);
        let m = self.0.nrows();
        let r = r.min(m);
        let mut w = DMatrix::from_fn(m, r, |i, k| eig.vectors[(i, m - 1 - k)]);
        let mut u = DMatrix::from_fn(m, m - r, |i, k| eig.vectors[(i, k)]);
        linalg::normalize_column_signs(&mut w);
        linalg::normalize_column_signs(&mut u);
        let lambda = (0..r).map(|k| eig.values[m - 1 - k]).collect();
        SpectralSplit { w, u, lambda }
    }
}

/// Eigenvector blocks of a projected Gram matrix of rank r.
#[derive(Debug, Clone)]
pub struct SpectralSplit<T: Real> {
    /// (n-1) x r, eigenvectors of the r largest eigenvalues (descending).
    pub w: DMatrix<T>,
    /// (n-1) x r_bar, eigenvectors spanning the null space.
    pub u: DMatrix<T>,
    pub lambda: Vec<T>,
}

pub fn edm_from_configuration<T: Real>(config: &Configuration<T>) -> Edm<T> {
    let p = config.matrix();
    let n = p.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = (p.row(i) - p.row(j)).norm_squared();
            d[(i, j)] = dij;
            d[(j, i)] = dij;
        }
    }
    Edm(d)
}

/// Deterministic V from the Householder reflector sending `e/sqrt(n)` to
/// `-e_1`, with its first column dropped. Row 0 of V is `-1/sqrt(n)`
/// everywhere; the lower block is `I - a^2/(1+a) ee^T` with `a = 1/sqrt(n)`.
pub fn build_v_basis<T: Real>(n: usize) -> VBasis<T> {
    assert!(n >= 2, "V basis needs n >= 2");
    let a = T::one() / T::from_usize(n).expect("usize fits").sqrt();
    let c = a * a / (T::one() + a);
    VBasis(DMatrix::from_fn(n, n - 1, |i, j| {
        if i == 0 {
            -a
        } else if i == j + 1 {
            T::one() - c
        } else {
            -c
        }
    }))
}

fn check_hollow_symmetric<T: Real>(d: &DMatrix<T>) -> Result<()> {
    if !linalg::is_symmetric(d, 1e-12) {
        return Err(RigidityError::NotSymmetric);
    }
    let scale = linalg::max_abs(d);
    let tol = T::lit(1e-12) * scale;
    for i in 0..d.nrows() {
        if d[(i, i)].abs() > tol {
            return Err(RigidityError::NotHollow { index: i + 1, value: d[(i, i)].as_f64() });
        }
    }
    Ok(())
}

/// `T_V(D) = -1/2 V^T D V` for a hollow symmetric D.
pub fn tv<T: Real>(d: &DMatrix<T>, v: &VBasis<T>) -> Result<ProjectedGram<T>> {
    if d.nrows() != v.n() || !d.is_square() {
        return Err(RigidityError::SizeMismatch { expected: v.n(), found: d.nrows() });
    }
    check_hollow_symmetric(d)?;
    let x = v.0.transpose() * d * &v.0 * T::lit(-0.5);
    Ok(ProjectedGram(linalg::symmetrize(&x)))
}

/// `K_V(X)`; the result is hollow and symmetric.
pub fn kv<T: Real>(x: &DMatrix<T>, v: &VBasis<T>) -> DMatrix<T> {
    let b = &v.0 * x * v.0.transpose();
    let n = b.nrows();
    DMatrix::from_fn(n, n, |i, j| if i == j { T::zero() } else { b[(i, i)] + b[(j, j)] - (b[(i, j)] + b[(j, i)]) })
}

/// Outcome of an EDM test.
#[derive(Debug, Clone, PartialEq)]
pub struct EdmCheck {
    pub is_edm: bool,
    pub embedding_dim: usize,
    pub min_eigenvalue: f64,
}

/// Tests `T_V(D) >= 0` and reports its numerical rank.
pub fn edm_check<T: Real>(d: &DMatrix<T>, tol: &Tolerances) -> Result<EdmCheck> {
    let v = build_v_basis::<T>(d.nrows());
    let x = tv(d, &v)?;
    let eig = linalg::sym_eigen(x.matrix());
    let nonnegative = d.iter().all(|&x| x >= -T::lit(tol.psd_rel) * linalg::max_abs(d));
    Ok(EdmCheck {
        is_edm: nonnegative && is_psd(&eig, tol.psd_rel),
        embedding_dim: linalg::symmetric_rank(&eig, tol),
        min_eigenvalue: eig.min().as_f64(),
    })
}

/// `lambda_min >= -rel * max(1, lambda_max)`.
pub fn is_psd<T: Real>(eig: &SortedEigen<T>, rel: f64) -> bool {
    eig.min() >= -T::lit(rel) * eig.max().max(T::one())
}

/// `X = V^T P P^T V`; invariant under translation of the points.
pub fn projected_gram<T: Real>(config: &Configuration<T>) -> ProjectedGram<T> {
    let v = build_v_basis::<T>(config.n());
    projected_gram_with(config, &v)
}

pub fn projected_gram_with<T: Real>(config: &Configuration<T>, v: &VBasis<T>) -> ProjectedGram<T> {
    let vp = v.0.transpose() * config.matrix();
    ProjectedGram(linalg::symmetrize(&(&vp * vp.transpose())))
}

/// `M^{ij} = T_V(E^{ij}) = -1/2 (v_i v_j^T + v_j v_i^T)` with `v_i` row i of V.
pub fn basis_matrix_mij<T: Real>(i: usize, j: usize, v: &VBasis<T>) -> Result<DMatrix<T>> {
    let n = v.n();
    for k in [i, j] {
        if k >= n {
            return Err(RigidityError::IndexOutOfRange { index: k + 1, n });
        }
    }
    let vi = v.0.row(i).transpose();
    let vj = v.0.row(j).transpose();
    Ok((&vi * vj.transpose() + &vj * vi.transpose()) * T::lit(-0.5))
}

/// `E(y)`: symmetric, `y_k` at missing pair k, zero elsewhere.
pub fn cal_e<T: Real>(graph: &SimpleGraph, missing: &[(usize, usize)], y: &[T]) -> Result<DMatrix<T>> {
    if y.len() != missing.len() {
        return Err(RigidityError::SizeMismatch { expected: missing.len(), found: y.len() });
    }
    let n = graph.n();
    let mut e = DMatrix::zeros(n, n);
    for (&(i, j), &val) in missing.iter().zip(y) {
        e[(i, j)] = val;
        e[(j, i)] = val;
    }
    Ok(e)
}

/// `M(y) = sum_k y_k M^{ij}` over missing pairs, i.e. `-1/2 V^T E(y) V`.
pub fn gram_offset<T: Real>(missing: &[(usize, usize)], y: &[T], v: &VBasis<T>) -> DMatrix<T> {
    let m = v.n() - 1;
    let mut out = DMatrix::zeros(m, m);
    for (&(i, j), &val) in missing.iter().zip(y) {
        let vi = v.0.row(i).transpose();
        let vj = v.0.row(j).transpose();
        out += (&vi * vj.transpose() + &vj * vi.transpose()) * (val * T::lit(-0.5));
    }
    out
}
