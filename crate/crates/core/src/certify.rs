//! Decision procedures for universal rigidity.
//!
//! Sufficient conditions: a positive definite Psi in the stress space
//! together with general position, or together with the absence of an affine
//! flex. When no positive definite Psi exists, a nonzero PSD matrix
//! `sum x_ij Z^T E^{ij} Z` over missing pairs certifies it. Non-rigidity is
//! shown by explicit equivalent frameworks.

use nalgebra::DMatrix;

use crate::error::{Result, RigidityError};
use crate::falsify::{equivalent_framework_search, EquivalentFrameworkWitness};
use crate::flex::{find_affine_flex, FlexWitness, QuadricPhi};
use crate::framework::Framework;
use crate::gale::{gale_matrix, general_position_check, GaleMatrix};
use crate::lateration::{find_lateration_order, purify};
use crate::linalg;
use crate::scalar::Real;
use crate::search::maximize_min_eigenvalue;
use crate::stress::{stress_space_basis_with, verify_stress, StressSpaceBasis};
use crate::tolerance::{Budget, Tolerances};

/// Singular values above this count when restricting a subspace to a face.
const FACE_RANK_ABS: f64 = 1e-6;

const PSI_STREAM: u64 = 0x5053_4931;
const FARKAS_STREAM: u64 = 0x4641_524b;
const FALSIFY_STREAM: u64 = 0x4641_4c53;

/// Positive definite Psi with `trace = r_bar` and its stress matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiCertificate<T: Real> {
    pub gale: GaleMatrix<T>,
    pub psi: DMatrix<T>,
    pub stress: DMatrix<T>,
    pub lambda_min: T,
}

impl<T: Real> PsiCertificate<T> {
    fn new(gale: GaleMatrix<T>, psi: DMatrix<T>) -> Self {
        let k = gale.dim();
        let tr = psi.trace();
        let psi = linalg::symmetrize(&(psi * (T::from_usize(k).expect("usize fits") / tr)));
        let z = gale.matrix();
        let stress = linalg::symmetrize(&(z * &psi * z.transpose()));
        let lambda_min = linalg::min_eigenvalue(&psi);
        Self { gale, psi, stress, lambda_min }
    }

    /// Checks the stress conditions from scratch.
    pub fn verify(&self, framework: &Framework<T>, tol: &Tolerances) -> Result<()> {
        let z = self.gale.matrix();
        let stress = z * &self.psi * z.transpose();
        let report = verify_stress(framework, &stress, tol);
        let lambda_min = linalg::min_eigenvalue(&linalg::symmetrize(&self.psi));
        if !report.passes || !report.psd || report.rank != framework.gale_dim() || lambda_min < T::lit(tol.psd_success) {
            return Err(RigidityError::VerificationFailed(format!(
                "stress certificate: passes={}, psd={}, rank={}, lambda_min(Psi)={:e}",
                report.passes,
                report.psd,
                report.rank,
                lambda_min.as_f64()
            )));
        }
        Ok(())
    }
}

/// Nonzero PSD `A = sum x_ij Z^T E^{ij} Z`, scaled so that `max |x_ij| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate<T: Real> {
    pub missing: Vec<(usize, usize)>,
    pub x: Vec<T>,
    pub a: DMatrix<T>,
    pub eigenvalues: Vec<T>,
    /// Dimension of the face on which A was found (equals r_bar when A is definite).
    pub face_dim: usize,
}

impl<T: Real> FarkasCertificate<T> {
    pub fn verify(&self, gale: &GaleMatrix<T>, tol: &Tolerances) -> Result<()> {
        let a = farkas_matrix(gale, &self.missing, &self.x);
        let eig = linalg::sym_eigen(&a);
        if eig.max() <= T::zero() || eig.min() < -T::lit(tol.farkas_psd) * eig.max() {
            return Err(RigidityError::VerificationFailed(format!(
                "Farkas matrix eigenvalues [{:e}, {:e}]",
                eig.min().as_f64(),
                eig.max().as_f64()
            )));
        }
        Ok(())
    }
}

/// `sum_k x_k Z^T E^{ij} Z` over the listed pairs.
pub fn farkas_matrix<T: Real>(gale: &GaleMatrix<T>, missing: &[(usize, usize)], x: &[T]) -> DMatrix<T> {
    let k = gale.dim();
    let mut a = DMatrix::zeros(k, k);
    for (&(i, j), &xv) in missing.iter().zip(x) {
        let zi = gale.transform(i);
        let zj = gale.transform(j);
        a += (&zi * zj.transpose() + &zj * zi.transpose()) * xv;
    }
    a
}

/// Searches the stress space for a positive definite Psi.
pub fn max_rank_psd_stress_search<T: Real>(
    framework: &Framework<T>,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
) -> Result<Option<PsiCertificate<T>>> {
    let gale = gale_matrix(framework.config(), tol)?;
    max_rank_psd_stress_search_with(framework, gale, seed, budget, tol)
}

pub fn max_rank_psd_stress_search_with<T: Real>(
    framework: &Framework<T>,
    gale: GaleMatrix<T>,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
) -> Result<Option<PsiCertificate<T>>> {
    let basis = stress_space_basis_with(framework, gale, tol)?;
    Ok(psi_search(&basis, seed, budget, tol).0)
}

/// Returns the certificate, if any, and the best `lambda_min` reached on the
/// slice `trace Psi = r_bar`.
fn psi_search<T: Real>(
    basis: &StressSpaceBasis<T>,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
) -> (Option<PsiCertificate<T>>, Option<T>) {
    let k = T::from_usize(basis.gale.dim()).expect("usize fits");
    let outcome =
        maximize_min_eigenvalue(&basis.elements, k, T::lit(tol.psd_success), budget.restarts, budget.iterations, seed ^ PSI_STREAM, tol);
    match outcome {
        Some(o) if o.success => (Some(PsiCertificate::new(basis.gale.clone(), o.matrix)), Some(o.lambda_min)),
        Some(o) => (None, Some(o.lambda_min)),
        None => (None, None),
    }
}

/// Searches for the alternative to a positive definite Psi.
pub fn farkas_alternative_search<T: Real>(
    framework: &Framework<T>,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
) -> Result<Option<FarkasCertificate<T>>> {
    let gale = gale_matrix(framework.config(), tol)?;
    farkas_alternative_search_with(framework, gale, seed, budget, tol)
}

pub fn farkas_alternative_search_with<T: Real>(
    framework: &Framework<T>,
    gale: GaleMatrix<T>,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
) -> Result<Option<FarkasCertificate<T>>> {
    let basis = stress_space_basis_with(framework, gale, tol)?;
    let missing = framework.missing_edges();
    if missing.is_empty() {
        return Ok(None);
    }
    let k = basis.gale.dim();
    let Some((a, face_dim)) = psd_in_complement(&basis.elements, k, seed ^ FARKAS_STREAM, budget, tol, 0) else {
        return Ok(None);
    };
    // x from the svec coordinates of A in terms of the Z^T E^{ij} Z
    let sym = linalg::sym_basis::<T>(k);
    let generators: Vec<DMatrix<T>> = missing.iter().map(|&(i, j)| farkas_matrix(&basis.gale, &[(i, j)], &[T::one()])).collect();
    let g = DMatrix::from_fn(sym.len(), generators.len(), |b, c| linalg::trace_inner(&sym[b], &generators[c]));
    let rhs = DMatrix::from_fn(sym.len(), 1, |b, _| linalg::trace_inner(&sym[b], &a));
    let x = linalg::lstsq(&g, &rhs, tol);
    let scale = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return Ok(None);
    }
    let x: Vec<T> = x.iter().map(|&v| v / scale).collect();
    let a = farkas_matrix(&basis.gale, &missing, &x);
    let eigenvalues = linalg::sym_eigen(&a).values.as_slice().to_vec();
    let cert = FarkasCertificate { missing, x, a, eigenvalues, face_dim };
    Ok(cert.verify(&basis.gale, tol).is_ok().then_some(cert))
}

/// Nonzero PSD matrix orthogonal to the span of `l` (orthonormal, m x m),
/// found by lambda_min ascent on the complement or, failing that, on a face
/// exposed by the best near-singular element of `l`.
fn psd_in_complement<T: Real>(
    l: &[DMatrix<T>],
    m: usize,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
    depth: usize,
) -> Option<(DMatrix<T>, usize)> {
    let sym = linalg::sym_basis::<T>(m);
    let coords = DMatrix::from_fn(l.len(), sym.len(), |a, b| linalg::trace_inner(&l[a], &sym[b]));
    let complement = linalg::complement_of_orthonormal_rows(&coords);
    if complement.ncols() == 0 {
        return None;
    }
    let perp: Vec<DMatrix<T>> = complement.column_iter().map(|c| linalg::combine(&sym, c.as_slice())).collect();
    let mf = T::from_usize(m).expect("usize fits");
    let success = T::lit(tol.psd_success);
    let seed = seed.wrapping_add(depth as u64);
    if let Some(out) = maximize_min_eigenvalue(&perp, mf, success, budget.restarts, budget.iterations, seed, tol) {
        if out.success {
            return Some((out.matrix, m));
        }
    }
    if l.is_empty() || m == 1 {
        return None;
    }
    // a definite element of l would rule out any PSD matrix in the complement
    let best = maximize_min_eigenvalue(l, mf, success, budget.restarts, budget.iterations, seed ^ PSI_STREAM, tol)?;
    if best.success {
        return None;
    }
    let eig = linalg::sym_eigen(&best.matrix);
    let face_tol = Tolerances { rank_rel: 0.0, rank_abs: FACE_RANK_ABS, ..*tol };
    for k in 1..m {
        let basis_k = eig.vectors.columns(0, k).into_owned();
        let sym_k = linalg::sym_basis::<T>(k);
        let restricted =
            DMatrix::from_fn(sym_k.len(), l.len(), |a, b| linalg::trace_inner(&sym_k[a], &(basis_k.transpose() * &l[b] * &basis_k)));
        let span = linalg::column_space(&restricted, &face_tol);
        let l_k: Vec<DMatrix<T>> = span.column_iter().map(|c| linalg::combine(&sym_k, c.as_slice())).collect();
        if let Some((c, face)) = psd_in_complement(&l_k, k, seed, budget, tol, depth + 1) {
            return Some((&basis_k * c * basis_k.transpose(), face));
        }
    }
    None
}

/// Outcome of scanning a stress space of dimension at most 3 on a grid of
/// directions (both signs of the single basis element in dimension 1).
#[derive(Debug, Clone, PartialEq)]
pub struct PsdScan {
    pub stress_space_dim: usize,
    pub directions: usize,
    /// Directions whose Psi is PSD.
    pub psd_directions: usize,
    /// Largest rank among PSD directions.
    pub max_psd_rank: usize,
    /// Largest `lambda_min(Psi) / |Psi|_F` over all directions.
    pub max_normalized_lambda_min: f64,
}

/// Grid scan of the unit sphere of the stress space; `resolution` is the
/// number of angle steps per coordinate. Dimension 0 yields an empty scan.
pub fn stress_space_psd_scan<T: Real>(framework: &Framework<T>, resolution: usize, tol: &Tolerances) -> Result<PsdScan> {
    let gale = gale_matrix(framework.config(), tol)?;
    let basis = stress_space_basis_with(framework, gale, tol)?;
    let d = basis.dim();
    if d > 3 {
        return Err(RigidityError::CombinatorialBudgetExceeded { count: d as u128, cap: 3 });
    }
    let directions: Vec<Vec<f64>> = match d {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..resolution)
            .map(|a| {
                let th = std::f64::consts::TAU * a as f64 / resolution as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let mut out = Vec::new();
            for a in 0..=resolution {
                let phi = std::f64::consts::PI * a as f64 / resolution as f64;
                let ring = if a == 0 || a == resolution { 1 } else { 2 * resolution };
                for b in 0..ring {
                    let th = std::f64::consts::TAU * b as f64 / ring as f64;
                    out.push(vec![phi.sin() * th.cos(), phi.sin() * th.sin(), phi.cos()]);
                }
            }
            out
        }
    };
    let mut scan = PsdScan {
        stress_space_dim: d,
        directions: directions.len(),
        psd_directions: 0,
        max_psd_rank: 0,
        max_normalized_lambda_min: f64::NEG_INFINITY,
    };
    for c in &directions {
        let coeffs: Vec<T> = c.iter().map(|&v| T::lit(v)).collect();
        let psi = linalg::combine(&basis.elements, &coeffs);
        let eig = linalg::sym_eigen(&psi);
        let norm = psi.norm();
        scan.max_normalized_lambda_min = scan.max_normalized_lambda_min.max((eig.min() / norm).as_f64());
        if crate::edm::is_psd(&eig, tol.psd_rel) {
            scan.psd_directions += 1;
            scan.max_psd_rank = scan.max_psd_rank.max(linalg::symmetric_rank(&eig, tol));
        }
    }
    Ok(scan)
}

/// One-sided test: a PSD stress of rank `n - r - 1` implies dimensional
/// rigidity; `false` only means no such stress was found.
pub fn dimensional_rigidity_sufficient<T: Real>(framework: &Framework<T>, seed: u64, budget: &Budget, tol: &Tolerances) -> Result<bool> {
    framework.require_certifiable()?;
    Ok(max_rank_psd_stress_search(framework, seed, budget, tol)?.is_some())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    UniversallyRigid,
    NotUniversallyRigid,
    DimensionallyRigidSufficient,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::UniversallyRigid => "UniversallyRigid",
            Verdict::NotUniversallyRigid => "NotUniversallyRigid",
            Verdict::DimensionallyRigidSufficient => "DimensionallyRigidSufficient",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    /// Process exit code for the verdict.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::UniversallyRigid => 0,
            Verdict::NotUniversallyRigid => 1,
            Verdict::DimensionallyRigidSufficient | Verdict::Inconclusive => 2,
        }
    }
}

/// Which argument produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    CompleteGraph,
    /// Positive definite Psi and points in general position.
    GeneralPositionStress,
    /// Positive definite Psi and no quadric at infinity through the edge directions.
    StressWithoutAffineFlex,
    /// Positive definite Psi only: dimensional rigidity.
    DimensionalRigidityStress,
    AffineFlex,
    EquivalentFramework,
    None,
}

impl Path {
    pub fn as_str(self) -> &'static str {
        match self {
            Path::CompleteGraph => "complete-graph",
            Path::GeneralPositionStress => "general-position-stress",
            Path::StressWithoutAffineFlex => "stress-without-affine-flex",
            Path::DimensionalRigidityStress => "dimensional-rigidity-stress",
            Path::AffineFlex => "affine-flex",
            Path::EquivalentFramework => "equivalent-framework",
            Path::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StressSource {
    Purification,
    Search,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evidence<T: Real> {
    CompleteGraph,
    Stress {
        certificate: PsiCertificate<T>,
        source: StressSource,
        general_position: Option<bool>,
        /// `Some(true)` when the edge-form flex test found no quadric.
        flex_free: Option<bool>,
    },
    Flex {
        phi: QuadricPhi<T>,
        witness: FlexWitness<T>,
    },
    Equivalent(EquivalentFrameworkWitness<T>),
    Farkas {
        gale: GaleMatrix<T>,
        certificate: FarkasCertificate<T>,
    },
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaterationStatus {
    NotTried,
    Found,
    NotLateration,
    BudgetExceeded,
    PurificationFailed,
}

impl LaterationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LaterationStatus::NotTried => "not-tried",
            LaterationStatus::Found => "found",
            LaterationStatus::NotLateration => "none",
            LaterationStatus::BudgetExceeded => "budget-exceeded",
            LaterationStatus::PurificationFailed => "purification-failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub min_degree: usize,
    pub lateration: Option<LaterationStatus>,
    pub stress_space_dim: Option<usize>,
    /// Best `lambda_min` of a trace-`r_bar` Psi reached by the search.
    pub best_lambda_min: Option<f64>,
    pub farkas_found: Option<bool>,
    pub general_position: Option<bool>,
    pub flex_found: Option<bool>,
    pub falsifier_samples: Option<usize>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T: Real> {
    pub verdict: Verdict,
    pub path: Path,
    pub evidence: Evidence<T>,
    pub diagnostics: Diagnostics,
}

impl<T: Real> Certificate<T> {
    /// Re-checks the evidence independently of how it was found.
    pub fn reverify(&self, framework: &Framework<T>, tol: &Tolerances) -> Result<()> {
        match (&self.verdict, &self.evidence) {
            (Verdict::UniversallyRigid, Evidence::CompleteGraph) => {
                if framework.graph().is_complete() {
                    Ok(())
                } else {
                    Err(RigidityError::VerificationFailed("graph is not complete".into()))
                }
            }
            (Verdict::UniversallyRigid | Verdict::DimensionallyRigidSufficient, Evidence::Stress { certificate, .. }) => {
                certificate.verify(framework, tol)?;
                if self.verdict == Verdict::DimensionallyRigidSufficient {
                    return Ok(());
                }
                let general = general_position_check(framework.config(), tol).in_general_position;
                if general || find_affine_flex(framework, tol)?.is_none() {
                    Ok(())
                } else {
                    Err(RigidityError::VerificationFailed("not in general position and an affine flex exists".into()))
                }
            }
            (Verdict::NotUniversallyRigid, Evidence::Flex { witness, .. }) => check_witness(framework, &witness.q, tol),
            (Verdict::NotUniversallyRigid, Evidence::Equivalent(w)) => check_witness(framework, &w.q, tol),
            (Verdict::Inconclusive, Evidence::Farkas { gale, certificate }) => certificate.verify(gale, tol),
            (Verdict::Inconclusive, Evidence::None) => Ok(()),
            _ => Err(RigidityError::VerificationFailed(format!("evidence does not support verdict {}", self.verdict.as_str()))),
        }
    }
}

fn check_witness<T: Real>(framework: &Framework<T>, q: &crate::framework::Configuration<T>, tol: &Tolerances) -> Result<()> {
    let eq = crate::framework::equivalence_check(framework.graph(), framework.config(), q, tol.verify_rel)?;
    let congruent = crate::framework::congruence_check(framework.config(), q, tol.noncongruence_rel)?;
    if eq && !congruent {
        Ok(())
    } else {
        Err(RigidityError::VerificationFailed(format!("witness: equivalent={eq}, congruent={congruent}")))
    }
}

fn general_position_if_affordable<T: Real>(framework: &Framework<T>, tol: &Tolerances) -> Option<bool> {
    (linalg::binomial(framework.n(), framework.dim() + 1) <= tol.combinatorial_cap)
        .then(|| general_position_check(framework.config(), tol).in_general_position)
}

/// Runs flex detection and the equivalent-framework search, in that order.
fn falsify<T: Real>(
    framework: &Framework<T>,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
    diag: &mut Diagnostics,
) -> Result<Option<Certificate<T>>> {
    let flex = find_affine_flex(framework, tol)?;
    diag.flex_found = Some(flex.is_some());
    if let Some((phi, witness)) = flex {
        return Ok(Some(Certificate {
            verdict: Verdict::NotUniversallyRigid,
            path: Path::AffineFlex,
            evidence: Evidence::Flex { phi, witness },
            diagnostics: diag.clone(),
        }));
    }
    diag.falsifier_samples = Some(budget.falsifier_samples);
    Ok(equivalent_framework_search(framework, seed ^ FALSIFY_STREAM, budget.falsifier_samples, tol).map(|w| Certificate {
        verdict: Verdict::NotUniversallyRigid,
        path: Path::EquivalentFramework,
        evidence: Evidence::Equivalent(w),
        diagnostics: diag.clone(),
    }))
}

/// The full decision cascade. Deterministic in `(framework, seed, budget)`.
pub fn certify_universal_rigidity<T: Real>(
    framework: &Framework<T>,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
) -> Result<Certificate<T>> {
    let n = framework.n();
    let r = framework.dim();
    let min_degree = (0..n).map(|v| framework.graph().degree(v)).min().unwrap_or(0);
    let mut diag = Diagnostics { min_degree, ..Diagnostics::default() };
    if framework.graph().is_complete() {
        return Ok(Certificate {
            verdict: Verdict::UniversallyRigid,
            path: Path::CompleteGraph,
            evidence: Evidence::CompleteGraph,
            diagnostics: diag,
        });
    }
    framework.require_certifiable()?;

    let inconclusive = |diag: Diagnostics, evidence: Evidence<T>| Certificate {
        verdict: Verdict::Inconclusive,
        path: Path::None,
        evidence,
        diagnostics: diag,
    };

    if min_degree <= r {
        diag.notes.push(format!("vertex of degree {min_degree} <= r: no PSD stress of rank n-r-1 exists"));
        return Ok(match falsify(framework, seed, budget, tol, &mut diag)? {
            Some(c) => c,
            None => inconclusive(diag, Evidence::None),
        });
    }

    let gale = gale_matrix(framework.config(), tol)?;
    let basis = stress_space_basis_with(framework, gale.clone(), tol)?;
    diag.stress_space_dim = Some(basis.dim());

    let mut found: Option<(PsiCertificate<T>, StressSource)> = None;
    match find_lateration_order(framework.graph(), r, budget.lateration_nodes) {
        Ok(Some(order)) => match purify(framework, &order, &gale, tol) {
            Ok(p) => {
                diag.lateration = Some(LaterationStatus::Found);
                let cert = PsiCertificate::new(gale.clone(), p.psi);
                diag.best_lambda_min = Some(cert.lambda_min.as_f64());
                found = Some((cert, StressSource::Purification));
            }
            Err(e) => {
                diag.lateration = Some(LaterationStatus::PurificationFailed);
                diag.notes.push(format!("purification failed: {e}"));
            }
        },
        Ok(None) => diag.lateration = Some(LaterationStatus::NotLateration),
        Err(_) => diag.lateration = Some(LaterationStatus::BudgetExceeded),
    }
    if found.is_none() {
        let (cert, best) = psi_search(&basis, seed, budget, tol);
        diag.best_lambda_min = best.map(|v| v.as_f64());
        found = cert.map(|c| (c, StressSource::Search));
    }

    if let Some((certificate, source)) = found {
        let general = general_position_if_affordable(framework, tol);
        diag.general_position = general;
        if general == Some(true) {
            return Ok(Certificate {
                verdict: Verdict::UniversallyRigid,
                path: Path::GeneralPositionStress,
                evidence: Evidence::Stress { certificate, source, general_position: general, flex_free: None },
                diagnostics: diag,
            });
        }
        let flex = find_affine_flex(framework, tol)?;
        diag.flex_found = Some(flex.is_some());
        return Ok(match flex {
            None => Certificate {
                verdict: Verdict::UniversallyRigid,
                path: Path::StressWithoutAffineFlex,
                evidence: Evidence::Stress { certificate, source, general_position: general, flex_free: Some(true) },
                diagnostics: diag,
            },
            Some((phi, witness)) => {
                diag.notes.push("dimensionally rigid: PSD stress of rank n-r-1 found".into());
                Certificate {
                    verdict: Verdict::NotUniversallyRigid,
                    path: Path::AffineFlex,
                    evidence: Evidence::Flex { phi, witness },
                    diagnostics: diag,
                }
            }
        });
    }

    let farkas = farkas_alternative_search_with(framework, gale.clone(), seed, budget, tol)?;
    diag.farkas_found = Some(farkas.is_some());
    if let Some(certificate) = farkas {
        diag.notes.push("no positive definite Psi exists; sufficient conditions do not apply".into());
        return Ok(match falsify(framework, seed, budget, tol, &mut diag)? {
            Some(c) => c,
            None => inconclusive(diag, Evidence::Farkas { gale, certificate }),
        });
    }
    diag.notes.push("neither a positive definite Psi nor its alternative was found within budget".into());
    Ok(inconclusive(diag, Evidence::None))
}

/// Dimensional rigidity from a PSD stress of rank `n - r - 1`, when found.
pub fn certify_dimensional_rigidity<T: Real>(
    framework: &Framework<T>,
    seed: u64,
    budget: &Budget,
    tol: &Tolerances,
) -> Result<Certificate<T>> {
    framework.require_certifiable()?;
    let min_degree = (0..framework.n()).map(|v| framework.graph().degree(v)).min().unwrap_or(0);
    let diagnostics = Diagnostics { min_degree, ..Diagnostics::default() };
    Ok(match max_rank_psd_stress_search(framework, seed, budget, tol)? {
        Some(certificate) => Certificate {
            verdict: Verdict::DimensionallyRigidSufficient,
            path: Path::DimensionalRigidityStress,
            evidence: Evidence::Stress { certificate, source: StressSource::Search, general_position: None, flex_free: None },
            diagnostics,
        },
        None => Certificate { verdict: Verdict::Inconclusive, path: Path::None, evidence: Evidence::None, diagnostics },
    })
}
