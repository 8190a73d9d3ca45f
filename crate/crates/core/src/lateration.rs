//! (r+1)-lateration graphs and the purification process that turns the
//! pre-stress `Z Z^T` into a PSD stress matrix of rank `n - r - 1`.
//!
//! A vertex order is an (r+1)-lateration order when its first r+1 vertices
//! form a clique and every later vertex has at least r+1 earlier neighbours.

use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::error::{Result, RigidityError};
use crate::framework::{Framework, SimpleGraph};
use crate::gale::GaleMatrix;
use crate::linalg;
use crate::scalar::Real;
use crate::stress::{verify_stress, StressMatrix, StressReport};
use crate::tolerance::Tolerances;

/// A permutation of the vertices (0-based) satisfying the lateration
/// conditions for dimension `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaterationOrder {
    order: Vec<usize>,
    r: usize,
}

impl LaterationOrder {
    /// Validates `order` against `graph`.
    pub fn new(graph: &SimpleGraph, order: Vec<usize>, r: usize) -> Result<Self> {
        let n = graph.n();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
            return Err(RigidityError::VerificationFailed("not a permutation of the vertices".into()));
        }
        if n < r + 1 {
            return Err(RigidityError::DimensionTooLarge { r, n });
        }
        for a in 0..=r {
            for b in 0..a {
                if !graph.has_edge(order[a], order[b]) {
                    return Err(RigidityError::VerificationFailed(format!(
                        "vertices {} and {} of the initial clique are not adjacent",
                        order[b] + 1,
                        order[a] + 1
                    )));
                }
            }
        }
        for k in (r + 1)..n {
            let earlier = order[..k].iter().filter(|&&u| graph.has_edge(u, order[k])).count();
            if earlier < r + 1 {
                return Err(RigidityError::VerificationFailed(format!("vertex {} has only {earlier} earlier neighbours", order[k] + 1)));
            }
        }
        Ok(Self { order, r })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(k, &v)| k == v)
    }
}

/// Searches for an (r+1)-lateration order by reverse elimination with
/// backtracking. `Ok(None)` means no order exists; running out of `max_nodes`
/// search nodes is reported as [`RigidityError::BudgetExceeded`].
pub fn find_lateration_order(graph: &SimpleGraph, r: usize, max_nodes: usize) -> Result<Option<LaterationOrder>> {
    let n = graph.n();
    if n < r + 1 {
        return Ok(None);
    }
    // necessary: every vertex outside the clique has r+1 neighbours, and the
    // clique vertices have r each plus at least one later neighbour unless n = r+1
    let floor = if n == r + 1 { r } else { r + 1 };
    if (0..n).any(|v| graph.degree(v) < floor) {
        return Ok(None);
    }
    let mut search = Elimination { graph, r, nodes: 0, max_nodes, failed: HashSet::new() };
    let mut remaining = vec![true; n];
    let mut removed = Vec::with_capacity(n);
    if !search.run(&mut remaining, &mut removed)? {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| remaining[v]).collect();
    order.extend(removed.iter().rev());
    LaterationOrder::new(graph, order, r).map(Some)
}

struct Elimination<'a> {
    graph: &'a SimpleGraph,
    r: usize,
    nodes: usize,
    max_nodes: usize,
    failed: HashSet<Vec<bool>>,
}

impl Elimination<'_> {
    fn run(&mut self, remaining: &mut Vec<bool>, removed: &mut Vec<usize>) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(RigidityError::BudgetExceeded { nodes: self.max_nodes });
        }
        let n = self.graph.n();
        let alive: Vec<usize> = (0..n).filter(|&v| remaining[v]).collect();
        if alive.len() == self.r + 1 {
            return Ok(alive.iter().all(|&a| alive.iter().all(|&b| a == b || self.graph.has_edge(a, b))));
        }
        if self.failed.contains(remaining) {
            return Ok(false);
        }
        let inner_degree = |v: usize| alive.iter().filter(|&&u| self.graph.has_edge(u, v)).count();
        let mut candidates: Vec<(usize, usize)> = alive.iter().map(|&v| (inner_degree(v), v)).filter(|&(d, _)| d > self.r).collect();
        candidates.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        for (_, v) in candidates {
            remaining[v] = false;
            removed.push(v);
            if self.run(remaining, removed)? {
                return Ok(true);
            }
            removed.pop();
            remaining[v] = true;
        }
        self.failed.insert(remaining.clone());
        Ok(false)
    }
}

/// Any `beta != 0` zeroes the column; `beta^2 = |q| / |p|` minimizes
/// `|beta p - q / beta|`, the size of the rank-one update, which keeps the
/// growth of S under control.
fn balanced_scale<T: Real>(p: &nalgebra::DVector<T>, q: &nalgebra::DVector<T>) -> T {
    let (pn, qn) = (p.norm(), q.norm());
    if qn > T::zero() && pn > T::zero() {
        (qn / pn).sqrt()
    } else {
        T::one()
    }
}

/// One column update of the purification process, in lateration positions.
#[derive(Debug, Clone, PartialEq)]
pub struct PurificationStep {
    /// 0-based position in the lateration order of the purified column.
    pub k: usize,
    /// Original label of that vertex (0-based).
    pub vertex: usize,
    /// Earlier non-neighbours of the vertex (positions).
    pub non_neighbors: Vec<usize>,
    /// Rows of Z used for the square block (positions).
    pub rows: Vec<usize>,
    pub xi_norm: f64,
    /// `|Z^k xi - b|` after the solve.
    pub solve_residual: f64,
    /// Largest `|s_ik|` over the purified non-neighbours after the update.
    pub column_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Purification<T: Real> {
    pub stress: StressMatrix<T>,
    /// `Psi = I + sum xi xi^T`, so that `S = Z Psi Z^T` for the input Z.
    pub psi: DMatrix<T>,
    pub steps: Vec<PurificationStep>,
    pub report: StressReport,
}

pub fn purify<T: Real>(
    framework: &Framework<T>,
    order: &LaterationOrder,
    gale: &GaleMatrix<T>,
    tol: &Tolerances,
) -> Result<Purification<T>> {
    purify_observed(framework, order, gale, tol, |_, _| {})
}

/// Like [`purify`], calling `observe(k, S)` after each step with the current
/// pre-stress expressed in lateration positions.
pub fn purify_observed<T: Real>(
    framework: &Framework<T>,
    order: &LaterationOrder,
    gale: &GaleMatrix<T>,
    tol: &Tolerances,
    mut observe: impl FnMut(usize, &DMatrix<T>),
) -> Result<Purification<T>> {
    let (n, r) = (framework.n(), framework.dim());
    framework.require_certifiable()?;
    if order.r() != r || order.order().len() != n || gale.n() != n {
        return Err(RigidityError::SizeMismatch { expected: n, found: order.order().len() });
    }
    let k_dim = gale.dim();
    let perm = order.order();
    let graph = framework.graph();
    let z = DMatrix::from_fn(n, k_dim, |a, b| gale.matrix()[(perm[a], b)]);
    let adjacent = |a: usize, b: usize| graph.has_edge(perm[a], perm[b]);
    let singular_thr = T::lit(tol.gale_minor) * linalg::spectral_norm(&z);

    let mut s = &z * z.transpose();
    let mut psi = DMatrix::<T>::identity(k_dim, k_dim);
    let mut steps = Vec::new();
    for k in ((r + 2)..n).rev() {
        let non_neighbors: Vec<usize> = (0..k).filter(|&i| !adjacent(i, k)).collect();
        let mut rows: Vec<usize> = non_neighbors.iter().copied().chain(k..n).collect();
        if rows.len() > k_dim {
            return Err(RigidityError::VerificationFailed(format!(
                "purification block for vertex {} has {} rows, expected {k_dim}",
                perm[k] + 1,
                rows.len()
            )));
        }
        let padding: Vec<usize> = (0..k).filter(|&i| adjacent(i, k)).take(k_dim - rows.len()).collect();
        rows.extend(&padding);

        let zk = DMatrix::from_fn(k_dim, k_dim, |a, b| z[(rows[a], b)]);
        let svd = zk.clone().svd(true, true);
        let sigma_min = svd.singular_values.iter().fold(T::max_value().expect("bounded"), |m, &x| m.min(x));
        if sigma_min <= singular_thr {
            return Err(RigidityError::SingularZk { k: perm[k] + 1 });
        }
        // xi = beta p - q / beta solves Z^k xi = b with b_k = beta and
        // b_i = -s_ik / beta on the non-neighbours
        let mut e_k = nalgebra::DVector::<T>::zeros(k_dim);
        let mut s_col = nalgebra::DVector::<T>::zeros(k_dim);
        for (a, &row) in rows.iter().enumerate() {
            if row == k {
                e_k[a] = T::one();
            } else if row < k && !adjacent(row, k) {
                s_col[a] = s[(row, k)];
            }
        }
        let solve = |rhs: &nalgebra::DVector<T>| svd.solve(rhs, T::zero()).map_err(|e| RigidityError::VerificationFailed(e.to_string()));
        let p = solve(&e_k)?;
        let q = solve(&s_col)?;
        let beta = balanced_scale(&p, &q);
        let xi = &p * beta - &q / beta;
        let b = &e_k * beta - &s_col / beta;
        let solve_residual = (&zk * &xi - &b).norm();
        let u = &z * &xi;
        s += &u * u.transpose();
        psi += &xi * xi.transpose();
        let column_residual = non_neighbors.iter().fold(T::zero(), |m, &i| m.max(s[(i, k)].abs()));
        steps.push(PurificationStep {
            k,
            vertex: perm[k],
            non_neighbors,
            rows,
            xi_norm: xi.norm().as_f64(),
            solve_residual: solve_residual.as_f64(),
            column_residual: column_residual.as_f64(),
        });
        observe(k, &s);
    }

    let mut original = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            original[(perm[a], perm[b])] = s[(a, b)];
        }
    }
    let original = linalg::symmetrize(&original);
    let psi = linalg::symmetrize(&psi);
    let report = verify_stress(framework, &original, tol);
    let norm = original.norm().as_f64();
    if !report.passes || !report.psd || report.rank != k_dim || report.max_missing_entry > tol.verify_rel * norm {
        return Err(RigidityError::VerificationFailed(format!(
            "purified stress: passes={}, psd={}, rank={} (expected {k_dim}), max missing entry {:e}",
            report.passes, report.psd, report.rank, report.max_missing_entry
        )));
    }
    Ok(Purification { stress: StressMatrix::from_matrix_unchecked(original), psi, steps, report })
}
