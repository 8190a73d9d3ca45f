//! Gale matrices: bases of the null space of the extended configuration
//! matrix `[P^T; e^T]`, the general-position tests, and the special Gale
//! matrix built from a stress of full rank.

use nalgebra::DMatrix;

use crate::edm::{build_v_basis, projected_gram_with};
use crate::error::{Result, RigidityError};
use crate::framework::{Configuration, SimpleGraph};
use crate::linalg::{self, Combinations};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Number of offending subsets kept in diagnostics.
const MAX_REPORTED_SUBSETS: usize = 32;

/// n x r_bar matrix whose columns span the null space of `[P^T; e^T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaleMatrix<T: Real> {
    z: DMatrix<T>,
}

impl<T: Real> GaleMatrix<T> {
    /// Validates that `z` has full column rank `n - 1 - r` and is annihilated
    /// by the extended configuration matrix.
    pub fn new(config: &Configuration<T>, z: DMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let expected = (config.n() - 1).saturating_sub(config.dim());
        if z.nrows() != config.n() || z.ncols() != expected {
            return Err(RigidityError::SizeMismatch { expected, found: z.ncols() });
        }
        if expected == 0 {
            return Err(RigidityError::NullSpaceTrivial);
        }
        let ext = config.extended_matrix();
        let residual = (&ext * &z).norm();
        if residual > T::lit(tol.verify_rel) * ext.norm() * z.norm() {
            return Err(RigidityError::VerificationFailed(format!("Gale residual |[P^T; e^T] Z| = {:e}", residual.as_f64())));
        }
        if linalg::numerical_rank(&z, tol) != expected {
            return Err(RigidityError::VerificationFailed("Gale matrix is rank deficient".into()));
        }
        Ok(Self { z })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    /// r_bar.
    pub fn dim(&self) -> usize {
        self.z.ncols()
    }

    /// Gale transform of point i as a column vector.
    pub fn transform(&self, i: usize) -> nalgebra::DVector<T> {
        self.z.row(i).transpose()
    }
}

/// Orthonormal Gale matrix; each column's largest-magnitude entry is positive.
pub fn gale_matrix<T: Real>(config: &Configuration<T>, tol: &Tolerances) -> Result<GaleMatrix<T>> {
    if config.n() <= config.dim() + 1 {
        return Err(RigidityError::NullSpaceTrivial);
    }
    let z = linalg::null_space(&config.extended_matrix(), tol);
    GaleMatrix::new(config, z, tol)
}

/// Gale matrix `VU` obtained from the null space of the projected Gram
/// matrix, with the companion factor Q solving `VW = PQ`.
#[derive(Debug, Clone)]
pub struct ProjectedGale<T: Real> {
    pub gale: GaleMatrix<T>,
    pub q: DMatrix<T>,
    /// `|VW - PQ|` for the least-squares Q.
    pub vw_residual: T,
}

pub fn gale_from_projected_gram<T: Real>(config: &Configuration<T>, tol: &Tolerances) -> Result<ProjectedGale<T>> {
    let (n, r) = (config.n(), config.dim());
    if n <= r + 1 {
        return Err(RigidityError::NullSpaceTrivial);
    }
    let v = build_v_basis::<T>(n);
    let split = projected_gram_with(config, &v).spectral_split(r);
    let mut z = v.matrix() * &split.u;
    linalg::normalize_column_signs(&mut z);
    let p = crate::framework::center_configuration(config).matrix().clone();
    let vw = v.matrix() * &split.w;
    let q = linalg::lstsq(&p, &vw, tol);
    let vw_residual = (&vw - &p * &q).norm();
    if vw_residual > T::lit(tol.verify_rel) * vw.norm().max(T::one()) {
        return Err(RigidityError::VerificationFailed(format!("VW - PQ residual {:e}", vw_residual.as_f64())));
    }
    if linalg::numerical_rank(&q, tol) != r {
        return Err(RigidityError::VerificationFailed("Q is singular".into()));
    }
    let gale = GaleMatrix::new(config, z, tol)?;
    Ok(ProjectedGale { gale, q, vw_residual })
}

/// Result of the general-position test.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralPosition {
    pub in_general_position: bool,
    /// Affinely dependent (r+1)-subsets, 0-based, at most 32 reported.
    pub dependent_subsets: Vec<Vec<usize>>,
    /// Smallest ratio sigma_min / diameter over all subsets.
    pub min_margin: f64,
}

/// Whether no r+1 of the points are affinely dependent.
pub fn general_position_check<T: Real>(config: &Configuration<T>, tol: &Tolerances) -> GeneralPosition {
    let (n, r) = (config.n(), config.dim());
    let p = config.matrix();
    let mut dependent_subsets = Vec::new();
    let mut in_general_position = true;
    let mut min_margin = f64::INFINITY;
    for subset in Combinations::new(n, r + 1) {
        let sub = DMatrix::from_fn(r + 1, r, |a, b| p[(subset[a], b)]);
        let centroid = sub.row_mean();
        let centered = DMatrix::from_fn(r + 1, r, |a, b| sub[(a, b)] - centroid[b]);
        let mut diameter = T::zero();
        for a in 0..=r {
            for b in (a + 1)..=r {
                diameter = diameter.max((sub.row(a) - sub.row(b)).norm());
            }
        }
        let sigma_min = linalg::singular_values(&centered).last().copied().unwrap_or_else(T::zero);
        let margin = if diameter > T::zero() { (sigma_min / diameter).as_f64() } else { 0.0 };
        min_margin = min_margin.min(margin);
        if margin <= tol.affine_dependence_rel {
            in_general_position = false;
            if dependent_subsets.len() < MAX_REPORTED_SUBSETS {
                dependent_subsets.push(subset);
            }
        }
    }
    GeneralPosition { in_general_position, dependent_subsets, min_margin }
}

/// Outcome of enumerating the r_bar x r_bar row submatrices of a Gale matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaleMinors {
    pub all_nonsingular: bool,
    /// Row subsets (0-based) whose submatrix is singular, at most 32 reported.
    pub singular_rows: Vec<Vec<usize>>,
}

/// Checks that every r_bar x r_bar submatrix of Z is nonsingular, which is
/// equivalent to general position of the underlying configuration.
pub fn gale_submatrix_check<T: Real>(gale: &GaleMatrix<T>, tol: &Tolerances) -> Result<GaleMinors> {
    let (n, k) = (gale.n(), gale.dim());
    if k == 0 {
        return Err(RigidityError::NullSpaceTrivial);
    }
    let count = linalg::binomial(n, k);
    if count > tol.combinatorial_cap {
        return Err(RigidityError::CombinatorialBudgetExceeded { count, cap: tol.combinatorial_cap });
    }
    let z = gale.matrix();
    let thr = T::lit(tol.gale_minor) * linalg::spectral_norm(z);
    let mut singular_rows = Vec::new();
    let mut all_nonsingular = true;
    for rows in Combinations::new(n, k) {
        let sub = DMatrix::from_fn(k, k, |a, b| z[(rows[a], b)]);
        let sigma_min = linalg::singular_values(&sub).last().copied().unwrap_or_else(T::zero);
        if sigma_min <= thr {
            all_nonsingular = false;
            if singular_rows.len() < MAX_REPORTED_SUBSETS {
                singular_rows.push(rows);
            }
        }
    }
    Ok(GaleMinors { all_nonsingular, singular_rows })
}

/// `Z_hat = Z Psi Z_2^T` with `Z_2` the last r_bar rows of Z. When
/// `Z Psi Z^T` is a stress matrix, `Z_hat` is its last r_bar columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialGaleMatrix<T: Real> {
    z_hat: DMatrix<T>,
}

impl<T: Real> SpecialGaleMatrix<T> {
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.z_hat
    }

    /// Largest `|z_hat_ij|` (relative to the largest entry) over
    /// `j < r_bar` and `i` non-adjacent to vertex `n - r_bar + j`.
    pub fn pattern_residual(&self, graph: &SimpleGraph) -> T {
        let (n, k) = self.z_hat.shape();
        let scale = linalg::max_abs(&self.z_hat);
        if scale == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for j in 0..k {
            let v = n - k + j;
            for i in (0..n).filter(|&i| i != v && !graph.has_edge(i, v)) {
                worst = worst.max(self.z_hat[(i, j)].abs());
            }
        }
        worst / scale
    }
}

pub fn special_gale<T: Real>(gale: &GaleMatrix<T>, psi: &DMatrix<T>, tol: &Tolerances) -> Result<SpecialGaleMatrix<T>> {
    let (n, k) = (gale.n(), gale.dim());
    if psi.shape() != (k, k) {
        return Err(RigidityError::SizeMismatch { expected: k, found: psi.nrows() });
    }
    let z = gale.matrix();
    let z2 = z.rows(n - k, k).into_owned();
    let z2_min = linalg::singular_values(&z2).last().copied().unwrap_or_else(T::zero);
    if z2_min <= T::lit(tol.gale_minor) * linalg::spectral_norm(z) {
        return Err(RigidityError::SingularZ2);
    }
    let s = linalg::singular_values(psi);
    if s.first().is_none_or(|top| *s.last().unwrap() <= linalg::rank_threshold(*top, tol)) {
        return Err(RigidityError::SingularPsi);
    }
    Ok(SpecialGaleMatrix { z_hat: z * psi * z2.transpose() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn assert_proportional(col: &DMatrix<f64>, expect: &[f64]) {
        let e = DMatrix::from_column_slice(expect.len(), 1, expect);
        let cos = (col.transpose() * &e)[(0, 0)] / (col.norm() * e.norm());
        assert!((cos.abs() - 1.0).abs() < 1e-12, "cosine {cos}");
    }

    #[test]
    fn square_gale_is_alternating() {
        let z = gale_matrix(fixtures::square().config(), &tol()).unwrap();
        assert_eq!(z.dim(), 1);
        assert_proportional(z.matrix(), &[1.0, -1.0, 1.0, -1.0]);
        let pg = gale_from_projected_gram(fixtures::square().config(), &tol()).unwrap();
        assert_proportional(pg.gale.matrix(), &[1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn counterexample_gale_residual_and_span() {
        let f = fixtures::counterexample();
        let z = gale_matrix(f.config(), &tol()).unwrap();
        assert_eq!(z.matrix().shape(), (5, 2));
        assert!((f.config().extended_matrix() * z.matrix()).norm() <= 1e-10);
        let pg = gale_from_projected_gram(f.config(), &tol()).unwrap();
        assert!(linalg::subspace_sine(z.matrix(), pg.gale.matrix()) < 1e-8);
        assert!(pg.vw_residual <= 1e-10);
        assert_eq!(linalg::numerical_rank(&pg.q, &tol()), 2);
    }

    #[test]
    fn simplex_has_trivial_null_space() {
        let f = fixtures::simplex(4);
        assert_eq!(gale_matrix(f.config(), &tol()), Err(RigidityError::NullSpaceTrivial));
        assert!(gale_from_projected_gram(f.config(), &tol()).is_err());
    }

    #[test]
    fn general_position_fixtures() {
        assert!(general_position_check(fixtures::square().config(), &tol()).in_general_position);
        let ce = general_position_check(fixtures::counterexample().config(), &tol());
        assert!(!ce.in_general_position);
        assert_eq!(ce.dependent_subsets, vec![vec![1, 3, 4]]);
        assert!(general_position_check(fixtures::lateration().config(), &tol()).in_general_position);
    }

    #[test]
    fn lateration_triangles_have_positive_area() {
        // brute-force oracle: all C(5,3) triangle areas via the shoelace formula
        let f = fixtures::lateration();
        let p = f.config().matrix();
        let mut count = 0;
        for s in Combinations::new(5, 3) {
            let (a, b, c) = (s[0], s[1], s[2]);
            let area = ((p[(b, 0)] - p[(a, 0)]) * (p[(c, 1)] - p[(a, 1)]) - (p[(c, 0)] - p[(a, 0)]) * (p[(b, 1)] - p[(a, 1)])).abs();
            assert!(area > 0.0);
            count += 1;
        }
        assert_eq!(count, 10);
    }

    #[test]
    fn gale_minors_match_general_position() {
        let sq = gale_matrix(fixtures::square().config(), &tol()).unwrap();
        assert!(gale_submatrix_check(&sq, &tol()).unwrap().all_nonsingular);
        let ce = gale_matrix(fixtures::counterexample().config(), &tol()).unwrap();
        let minors = gale_submatrix_check(&ce, &tol()).unwrap();
        assert!(!minors.all_nonsingular);
        // rows {1,3} are the complement of the collinear triple {2,4,5}
        assert_eq!(minors.singular_rows, vec![vec![0, 2]]);
        let lat = gale_matrix(fixtures::lateration().config(), &tol()).unwrap();
        assert!(gale_submatrix_check(&lat, &tol()).unwrap().all_nonsingular);
    }

    #[test]
    fn minor_enumeration_respects_cap() {
        let lat = gale_matrix(fixtures::lateration().config(), &tol()).unwrap();
        let tight = Tolerances { combinatorial_cap: 5, ..tol() };
        assert_eq!(gale_submatrix_check(&lat, &tight), Err(RigidityError::CombinatorialBudgetExceeded { count: 10, cap: 5 }));
    }

    #[test]
    fn special_gale_with_identity_on_square() {
        let f = fixtures::square();
        let z = gale_matrix(f.config(), &tol()).unwrap();
        let zh = special_gale(&z, &DMatrix::identity(1, 1), &tol()).unwrap();
        // r_bar = 1: Z_hat = Z * z_4, a multiple of Z
        let factor = z.matrix()[(3, 0)];
        assert!((zh.matrix() - z.matrix() * factor).amax() < 1e-15);
        assert!((f.config().extended_matrix() * zh.matrix()).amax() <= 1e-9);
        assert_eq!(special_gale(&z, &DMatrix::zeros(1, 1), &tol()), Err(RigidityError::SingularPsi));
    }

    #[test]
    fn special_gale_detects_singular_trailing_block() {
        // rows {4,5} of the Gale matrix are singular when p1, p2, p3 are collinear
        let f =
            crate::framework::parse_framework("5 2\n0 0\n3 0\n1.5 0\n1 1\n4 1\n9\n1 2\n1 3\n1 4\n1 5\n2 3\n2 4\n2 5\n3 4\n3 5\n").unwrap();
        let z = gale_matrix(f.config(), &tol()).unwrap();
        assert_eq!(special_gale(&z, &DMatrix::identity(2, 2), &tol()), Err(RigidityError::SingularZ2));
    }
}
