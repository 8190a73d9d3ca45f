//! Equilibrium stresses and stress matrices.
//!
//! A symmetric S is a stress matrix of G(p) iff `[P^T; e^T] S = 0` and
//! `s_ij = 0` on every missing pair; equivalently `S = Z Psi Z^T` with
//! `z_i^T Psi z_j = 0` on missing pairs. The stress space is parametrized by
//! Psi, where those conditions are linear.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::edm::is_psd;
use crate::error::{Result, RigidityError};
use crate::framework::{Framework, SimpleGraph};
use crate::gale::{gale_matrix, GaleMatrix};
use crate::linalg;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct StressMatrix<T: Real>(DMatrix<T>);

impl<T: Real> StressMatrix<T> {
    /// Wraps a matrix without checks; see [`verify_stress`].
    pub fn from_matrix_unchecked(s: DMatrix<T>) -> Self {
        Self(s)
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.0
    }
}

/// `Psi` such that `S = Z Psi Z^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiMatrix<T: Real>(DMatrix<T>);

impl<T: Real> PsiMatrix<T> {
    pub fn new(psi: DMatrix<T>) -> Self {
        Self(linalg::symmetrize(&psi))
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    /// Rescales so that the trace equals the dimension (no-op on zero trace).
    pub fn trace_normalized(&self) -> Self {
        let tr = self.0.trace();
        if tr == T::zero() {
            return self.clone();
        }
        Self(&self.0 * (T::from_usize(self.0.nrows()).expect("usize fits") / tr))
    }
}

/// Edge stresses aligned with `graph.edges()` read back from a stress matrix.
pub fn omega_from_stress<T: Real>(graph: &SimpleGraph, s: &DMatrix<T>) -> Vec<T> {
    graph.edges().iter().map(|&(i, j)| -s[(i, j)]).collect()
}

/// Assembles the stress matrix of `omega` (one value per edge, in
/// `graph.edges()` order) after checking the equilibrium condition.
pub fn stress_from_omega<T: Real>(framework: &Framework<T>, omega: &[T], tol: &Tolerances) -> Result<StressMatrix<T>> {
    let graph = framework.graph();
    if omega.len() != graph.edges().len() {
        return Err(RigidityError::SizeMismatch { expected: graph.edges().len(), found: omega.len() });
    }
    let (n, r) = (framework.n(), framework.dim());
    let p = framework.config().matrix();
    let mut s = DMatrix::zeros(n, n);
    let mut force = DMatrix::<T>::zeros(n, r);
    for (&(i, j), &w) in graph.edges().iter().zip(omega) {
        s[(i, j)] = -w;
        s[(j, i)] = -w;
        s[(i, i)] += w;
        s[(j, j)] += w;
        let d = p.row(i) - p.row(j);
        let mut fi = force.row_mut(i);
        fi += &d * w;
        let mut fj = force.row_mut(j);
        fj -= &d * w;
    }
    let residual = force.row_iter().fold(T::zero(), |acc, row| acc.max(row.norm()));
    let scale = omega.iter().fold(T::zero(), |acc, w| acc.max(w.abs())) * framework.config().diameter();
    if residual > T::lit(tol.verify_rel) * scale {
        return Err(RigidityError::NotEquilibrium { residual: residual.as_f64() });
    }
    Ok(StressMatrix(s))
}

/// `S = Z Psi Z^T`, rejected when an entry on a missing pair is nonzero.
pub fn stress_from_psi<T: Real>(gale: &GaleMatrix<T>, psi: &DMatrix<T>, graph: &SimpleGraph, tol: &Tolerances) -> Result<StressMatrix<T>> {
    let k = gale.dim();
    if psi.shape() != (k, k) {
        return Err(RigidityError::SizeMismatch { expected: k, found: psi.nrows() });
    }
    let psi = linalg::symmetrize(psi);
    let z = gale.matrix();
    let s = linalg::symmetrize(&(z * psi * z.transpose()));
    let thr = T::lit(tol.verify_rel) * linalg::max_abs(&s);
    for (i, j) in crate::framework::missing_edges(graph) {
        if s[(i, j)].abs() > thr {
            return Err(RigidityError::SparsityViolated { i: i + 1, j: j + 1, value: s[(i, j)].as_f64() });
        }
    }
    Ok(StressMatrix(s))
}

/// Diagnostics for a candidate stress matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    /// `|[P^T; e^T] S|_F`.
    pub equilibrium_residual: f64,
    /// Largest `|s_ij|` over missing pairs.
    pub max_missing_entry: f64,
    pub frobenius_norm: f64,
    /// Eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub psd: bool,
    /// `rank <= n - r - 1`.
    pub rank_bound_ok: bool,
    pub symmetric: bool,
    /// Symmetric, in equilibrium, sparse on missing pairs and within the rank bound.
    pub passes: bool,
}

pub fn verify_stress<T: Real>(framework: &Framework<T>, s: &DMatrix<T>, tol: &Tolerances) -> StressReport {
    let n = framework.n();
    let ext = framework.config().extended_matrix();
    let symmetric = s.shape() == (n, n) && linalg::is_symmetric(s, 1e-12);
    if s.shape() != (n, n) {
        return StressReport {
            equilibrium_residual: f64::INFINITY,
            max_missing_entry: f64::INFINITY,
            frobenius_norm: s.norm().as_f64(),
            eigenvalues: Vec::new(),
            rank: 0,
            psd: false,
            rank_bound_ok: false,
            symmetric,
            passes: false,
        };
    }
    let eq = (&ext * s).norm();
    let s_norm = s.norm();
    let max_missing = framework.missing_edges().iter().fold(T::zero(), |acc, &(i, j)| acc.max(s[(i, j)].abs()));
    let eig = linalg::sym_eigen(s);
    let rank = linalg::symmetric_rank(&eig, tol);
    let rank_bound_ok = rank <= framework.gale_dim();
    let verify = T::lit(tol.verify_rel);
    let eq_ok = eq <= verify * ext.norm().max(T::one()) * s_norm;
    let sparse_ok = max_missing <= verify * linalg::max_abs(s);
    StressReport {
        equilibrium_residual: eq.as_f64(),
        max_missing_entry: max_missing.as_f64(),
        frobenius_norm: s_norm.as_f64(),
        eigenvalues: eig.values.iter().map(|v| v.as_f64()).collect(),
        rank,
        psd: is_psd(&eig, tol.psd_rel),
        rank_bound_ok,
        symmetric,
        passes: symmetric && eq_ok && sparse_ok && rank_bound_ok,
    }
}

/// Linear map `Psi -> (z_i^T Psi z_j)` over missing pairs, written in the
/// orthonormal symmetric basis of [`linalg::sym_basis`]: one row per missing
/// pair, one column per basis element.
pub fn psi_constraint_matrix<T: Real>(gale: &GaleMatrix<T>, missing: &[(usize, usize)]) -> DMatrix<T> {
    let basis = linalg::sym_basis::<T>(gale.dim());
    DMatrix::from_fn(missing.len(), basis.len(), |row, col| {
        let (i, j) = missing[row];
        (gale.transform(i).transpose() * &basis[col] * gale.transform(j))[(0, 0)]
    })
}

/// Orthonormal (trace inner product) basis of
/// `{Psi symmetric : z_i^T Psi z_j = 0 for all missing pairs}`.
#[derive(Debug, Clone)]
pub struct StressSpaceBasis<T: Real> {
    pub gale: GaleMatrix<T>,
    pub elements: Vec<DMatrix<T>>,
}

impl<T: Real> StressSpaceBasis<T> {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Stress matrix `Z Psi Z^T` for `Psi = sum c_k B_k`.
    pub fn stress(&self, coeffs: &[T]) -> DMatrix<T> {
        let psi = linalg::combine(&self.elements, coeffs);
        let z = self.gale.matrix();
        z * psi * z.transpose()
    }

    /// Largest constraint violation over the basis elements.
    pub fn constraint_residual(&self, graph: &SimpleGraph) -> T {
        let missing = crate::framework::missing_edges(graph);
        let mut worst = T::zero();
        for b in &self.elements {
            for &(i, j) in &missing {
                let v = (self.gale.transform(i).transpose() * b * self.gale.transform(j))[(0, 0)];
                worst = worst.max(v.abs());
            }
        }
        worst
    }
}

pub fn stress_space_basis<T: Real>(framework: &Framework<T>, tol: &Tolerances) -> Result<StressSpaceBasis<T>> {
    let gale = gale_matrix(framework.config(), tol)?;
    stress_space_basis_with(framework, gale, tol)
}

pub fn stress_space_basis_with<T: Real>(framework: &Framework<T>, gale: GaleMatrix<T>, tol: &Tolerances) -> Result<StressSpaceBasis<T>> {
    if gale.dim() == 0 {
        return Err(RigidityError::NullSpaceTrivial);
    }
    let missing = framework.missing_edges();
    let a = psi_constraint_matrix(&gale, &missing);
    let coeffs = linalg::null_space(&a, tol);
    let sym = linalg::sym_basis::<T>(gale.dim());
    let elements = coeffs.column_iter().map(|c| linalg::combine(&sym, c.as_slice())).collect();
    Ok(StressSpaceBasis { gale, elements })
}
