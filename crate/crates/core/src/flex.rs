//! Affine flexes. A framework has an affinely equivalent, non-congruent
//! companion iff its edge directions lie on a quadric at infinity, i.e. a
//! nonzero symmetric Phi has `d^T Phi d = 0` for every edge direction d.
//! Three detectors are provided: the edge form, the Gale form
//! `V^T E(y) Z = 0` over missing pairs, and the reduced form `E(y) Z_hat = 0`.

use nalgebra::DMatrix;

use crate::edm::build_v_basis;
use crate::error::{Result, RigidityError};
use crate::framework::{congruence_check, equivalence_residual, Configuration, Framework};
use crate::gale::{GaleMatrix, SpecialGaleMatrix};
use crate::linalg;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Nonzero symmetric r x r matrix annihilating all edge directions,
/// normalized to unit Frobenius norm.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadricPhi<T: Real>(DMatrix<T>);

impl<T: Real> QuadricPhi<T> {
    /// Rejects zero and non-symmetric input; rescales to unit norm.
    pub fn new(phi: DMatrix<T>) -> Result<Self> {
        if !linalg::is_symmetric(&phi, 1e-12) {
            return Err(RigidityError::NotSymmetric);
        }
        let norm = phi.norm();
        if norm == T::zero() {
            return Err(RigidityError::DegenerateWitness);
        }
        Ok(Self(phi / norm))
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    /// Largest `|d^T Phi d|` over unit edge directions.
    pub fn edge_residual(&self, framework: &Framework<T>) -> T {
        unit_edge_directions(framework).iter().fold(T::zero(), |acc, d| acc.max((d.transpose() * &self.0 * d)[(0, 0)].abs()))
    }
}

/// `q_i = A p_i` with the same edge lengths as `p` but a different EDM.
#[derive(Debug, Clone, PartialEq)]
pub struct FlexWitness<T: Real> {
    pub q: Configuration<T>,
    pub a: DMatrix<T>,
    /// Relative edge-length discrepancy between p and q.
    pub equivalence_residual: T,
    /// Largest change of a squared distance, relative to the largest one.
    pub distance_change: T,
}

fn unit_edge_directions<T: Real>(framework: &Framework<T>) -> Vec<nalgebra::DVector<T>> {
    let p = framework.config().matrix();
    framework
        .graph()
        .edges()
        .iter()
        .map(|&(i, j)| {
            let d = (p.row(i) - p.row(j)).transpose();
            let len = d.norm();
            // a zero-length edge constrains nothing
            if len == T::zero() {
                d
            } else {
                d / len
            }
        })
        .collect()
}

/// One row per edge, one column per element of [`linalg::sym_basis`].
pub fn edge_quadric_system<T: Real>(framework: &Framework<T>) -> DMatrix<T> {
    let basis = linalg::sym_basis::<T>(framework.dim());
    let dirs = unit_edge_directions(framework);
    DMatrix::from_fn(dirs.len(), basis.len(), |e, k| (dirs[e].transpose() * &basis[k] * &dirs[e])[(0, 0)])
}

/// Orthonormal basis of all quadrics at infinity through the edge directions.
pub fn quadric_basis_edges<T: Real>(framework: &Framework<T>, tol: &Tolerances) -> Vec<DMatrix<T>> {
    let basis = linalg::sym_basis::<T>(framework.dim());
    let null = linalg::null_space(&edge_quadric_system(framework), tol);
    null.column_iter().map(|c| linalg::combine(&basis, c.as_slice())).collect()
}

pub fn quadratic_at_infinity_edges<T: Real>(framework: &Framework<T>, tol: &Tolerances) -> Option<QuadricPhi<T>> {
    quadric_basis_edges(framework, tol).into_iter().next().and_then(|phi| QuadricPhi::new(phi).ok())
}

/// Columns `vec(V^T E^{ij} Z)` for each missing pair.
pub fn gale_flex_system<T: Real>(framework: &Framework<T>, gale: &GaleMatrix<T>) -> DMatrix<T> {
    let n = framework.n();
    let v = build_v_basis::<T>(n);
    let missing = framework.missing_edges();
    let k = gale.dim();
    let mut a = DMatrix::zeros((n - 1) * k, missing.len());
    for (col, &(i, j)) in missing.iter().enumerate() {
        let vi = v.matrix().row(i).transpose();
        let vj = v.matrix().row(j).transpose();
        let block = &vi * gale.matrix().row(j) + &vj * gale.matrix().row(i);
        a.column_mut(col).copy_from_slice(block.as_slice());
    }
    a
}

/// Orthonormal basis (columns) of `{y : V^T E(y) Z = 0}`.
pub fn gale_flex_basis<T: Real>(framework: &Framework<T>, gale: &GaleMatrix<T>, tol: &Tolerances) -> Result<DMatrix<T>> {
    if gale.dim() == 0 {
        return Err(RigidityError::NullSpaceTrivial);
    }
    let m = framework.missing_edges().len();
    if m == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    Ok(linalg::null_space(&gale_flex_system(framework, gale), tol))
}

/// A unit-norm y over missing pairs with `V^T E(y) Z = 0`, if one exists.
pub fn quadratic_at_infinity_gale<T: Real>(framework: &Framework<T>, gale: &GaleMatrix<T>, tol: &Tolerances) -> Result<Option<Vec<T>>> {
    let basis = gale_flex_basis(framework, gale, tol)?;
    Ok(first_column(&basis))
}

fn first_column<T: Real>(basis: &DMatrix<T>) -> Option<Vec<T>> {
    (basis.ncols() > 0).then(|| basis.column(0).iter().copied().collect())
}

/// Solves `E(y) Z_hat = 0` after checking that `Z_hat` has the zero pattern
/// forced by sparsity of the stress.
pub fn reduced_flex_system<T: Real>(framework: &Framework<T>, z_hat: &SpecialGaleMatrix<T>, tol: &Tolerances) -> Result<Option<Vec<T>>> {
    let residual = z_hat.pattern_residual(framework.graph());
    if residual > T::lit(tol.verify_rel) {
        return Err(RigidityError::PatternViolated { max_entry: residual.as_f64() });
    }
    let missing = framework.missing_edges();
    if missing.is_empty() {
        return Ok(None);
    }
    let zh = z_hat.matrix();
    let scale = linalg::max_abs(zh);
    let (n, k) = zh.shape();
    let mut a = DMatrix::zeros(n * k, missing.len());
    for (col, &(i, j)) in missing.iter().enumerate() {
        let mut block = DMatrix::<T>::zeros(n, k);
        block.row_mut(i).copy_from(&(zh.row(j) / scale));
        block.row_mut(j).copy_from(&(zh.row(i) / scale));
        a.column_mut(col).copy_from_slice(block.as_slice());
    }
    Ok(first_column(&linalg::null_space(&a, tol)))
}

/// Builds `q_i = A p_i` with `A = sqrt(I - delta Phi)`, `delta = 1/(2|Phi|_2)`.
pub fn affine_witness_from_phi<T: Real>(framework: &Framework<T>, phi: &QuadricPhi<T>, tol: &Tolerances) -> Result<FlexWitness<T>> {
    let r = framework.dim();
    let phi = phi.matrix();
    let delta = T::one() / (T::lit(2.0) * linalg::spectral_norm(phi));
    let a = linalg::psd_sqrt(&(DMatrix::identity(r, r) - phi * delta));
    let q = Configuration::unchecked(framework.config().matrix() * &a);
    let equivalence = equivalence_residual(framework.graph(), framework.config(), &q)?;
    if equivalence > T::lit(tol.verify_rel) {
        return Err(RigidityError::VerificationFailed(format!(
            "affine witness changes an edge length (residual {:e})",
            equivalence.as_f64()
        )));
    }
    if congruence_check(framework.config(), &q, tol.noncongruence_rel)? {
        return Err(RigidityError::DegenerateWitness);
    }
    let dp = crate::edm::edm_from_configuration(framework.config());
    let dq = crate::edm::edm_from_configuration(&q);
    let distance_change = linalg::max_abs(&(dp.matrix() - dq.matrix())) / linalg::max_abs(dp.matrix());
    Ok(FlexWitness { q, a, equivalence_residual: equivalence, distance_change })
}

/// Edge-form detection followed by witness construction.
pub fn find_affine_flex<T: Real>(framework: &Framework<T>, tol: &Tolerances) -> Result<Option<(QuadricPhi<T>, FlexWitness<T>)>> {
    match quadratic_at_infinity_edges(framework, tol) {
        None => Ok(None),
        Some(phi) => {
            let witness = affine_witness_from_phi(framework, &phi, tol)?;
            Ok(Some((phi, witness)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::framework::{equivalence_check, parse_framework};
    use crate::gale::gale_matrix;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn four_cycle() -> Framework<f64> {
        parse_framework("4 2\n0 0\n1 0\n1 1\n0 1\n4\n1 2\n2 3\n3 4\n1 4\n").unwrap()
    }

    #[test]
    fn square_has_no_quadric() {
        let f = fixtures::square();
        // oracle: the three equations phi11 = 0, phi22 = 0, phi11 + 2 phi12 + phi22 = 0
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 2.0]);
        assert_eq!(linalg::numerical_rank(&a, &tol()), 3);
        assert!(quadratic_at_infinity_edges(&f, &tol()).is_none());
        let z = gale_matrix(f.config(), &tol()).unwrap();
        assert!(quadratic_at_infinity_gale(&f, &z, &tol()).unwrap().is_none());
    }

    #[test]
    fn single_edge_cases() {
        let line = parse_framework("2 1\n0\n3\n1\n1 2\n").unwrap();
        assert!(quadratic_at_infinity_edges(&line, &tol()).is_none());
        let path = parse_framework("3 2\n0 0\n1 0\n0 1\n2\n1 2\n1 3\n").unwrap();
        // two directions leave a one-dimensional family of quadrics
        assert_eq!(quadric_basis_edges(&path, &tol()).len(), 1);
    }

    #[test]
    fn axis_aligned_cycle_has_the_cross_quadric() {
        let f = four_cycle();
        let phi = quadratic_at_infinity_edges(&f, &tol()).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]) / 2f64.sqrt();
        let err = (phi.matrix() - &expect).norm().min((phi.matrix() + &expect).norm());
        assert!(err < 1e-12);
        assert!(phi.edge_residual(&f) < 1e-14);
    }

    #[test]
    fn witness_of_axis_aligned_cycle() {
        let f = four_cycle();
        let (_, w) = find_affine_flex(&f, &tol()).unwrap().unwrap();
        assert!(equivalence_check(f.graph(), f.config(), &w.q, 1e-9).unwrap());
        assert!(!congruence_check(f.config(), &w.q, 1e-6).unwrap());
        // oracle: both diagonals change, all sides keep length 1
        let q = w.q.matrix();
        let d13 = (q.row(0) - q.row(2)).norm_squared();
        let d24 = (q.row(1) - q.row(3)).norm_squared();
        assert!((d13 - 2.0).abs() > 0.1 && (d24 - 2.0).abs() > 0.1);
        assert!((d13 + d24 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_phi_is_rejected() {
        assert!(QuadricPhi::new(DMatrix::<f64>::zeros(2, 2)).is_err());
    }

    #[test]
    fn complete_graph_has_no_gale_flex() {
        let f = parse_framework("4 2\n0 0\n2 0\n0 2\n1 3\n6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n").unwrap();
        let z = gale_matrix(f.config(), &tol()).unwrap();
        assert!(quadratic_at_infinity_gale(&f, &z, &tol()).unwrap().is_none());
    }

    #[test]
    fn gale_form_finds_flex_of_cycle() {
        let f = four_cycle();
        let z = gale_matrix(f.config(), &tol()).unwrap();
        let y = quadratic_at_infinity_gale(&f, &z, &tol()).unwrap().unwrap();
        // oracle: the affine witness changes the diagonals by opposite amounts
        assert_eq!(y.len(), 2);
        assert!((y[0] + y[1]).abs() < 1e-12 && y[0].abs() > 0.5);
    }
}
