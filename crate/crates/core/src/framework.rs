//! Graphs, point configurations and bar frameworks.
//!
//! Vertices are 0-based everywhere in the API; the framework file format and
//! human-facing reports use 1-based labels, converted in [`parse_framework`]
//! and [`Framework::to_text`].

use std::collections::VecDeque;

use nalgebra::{DMatrix, RowDVector};

use crate::edm::edm_from_configuration;
use crate::error::{Result, RigidityError};
use crate::linalg;
use crate::scalar::Real;
use crate::textio::format_g17;
use crate::tolerance::Tolerances;

/// A connected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<bool>,
}

impl SimpleGraph {
    /// Builds a graph from 0-based edges, in any orientation.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![false; n * n];
        let mut list = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(RigidityError::IndexOutOfRange { index: v + 1, n });
                }
            }
            if a == b {
                return Err(RigidityError::SelfLoop(a + 1));
            }
            let (i, j) = (a.min(b), a.max(b));
            if adjacency[i * n + j] {
                return Err(RigidityError::DuplicateEdge(i + 1, j + 1));
            }
            adjacency[i * n + j] = true;
            adjacency[j * n + i] = true;
            list.push((i, j));
        }
        list.sort_unstable();
        let graph = Self { n, edges: list, adjacency };
        if !graph.is_connected() {
            return Err(RigidityError::Disconnected);
        }
        Ok(graph)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        Self::new(n, edges).expect("complete graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges `(i, j)` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.adjacency[i * self.n + j]
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.has_edge(i, j)).count()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Adjacency matrix `H`.
    pub fn adjacency_matrix<T: Real>(&self) -> DMatrix<T> {
        DMatrix::from_fn(self.n, self.n, |i, j| if self.has_edge(i, j) { T::one() } else { T::zero() })
    }

    /// Graph on the same vertex set with labels permuted: vertex `order[k]`
    /// of `self` becomes vertex `k` of the result.
    pub fn relabeled(&self, order: &[usize]) -> Self {
        let mut position = vec![0; self.n];
        for (k, &v) in order.iter().enumerate() {
            position[v] = k;
        }
        Self::new(self.n, self.edges.iter().map(|&(i, j)| (position[i], position[j]))).expect("relabeling preserves validity")
    }

    fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// All non-adjacent pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn missing_edges(graph: &SimpleGraph) -> Vec<(usize, usize)> {
    let n = graph.n();
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).filter(|&(i, j)| !graph.has_edge(i, j)).collect()
}

/// `n` points affinely spanning R^r, stored as the n x r configuration matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration<T: Real> {
    points: DMatrix<T>,
}

impl<T: Real> Configuration<T> {
    /// Validates that the rows of `points` affinely span R^r.
    pub fn new(points: DMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let expected = points.ncols();
        let rank = affine_rank(&points, tol);
        if rank != expected || points.nrows() < expected + 1 {
            return Err(RigidityError::NotAffineSpanning { rank, expected });
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[Vec<T>], tol: &Tolerances) -> Result<Self> {
        let n = rows.len();
        let r = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != r) {
            return Err(RigidityError::SizeMismatch { expected: r, found: bad.len() });
        }
        Self::new(DMatrix::from_fn(n, r, |i, j| rows[i][j]), tol)
    }

    /// Wraps points without the affine-span check (witness configurations
    /// may live in any dimension and are validated by their producers).
    pub fn unchecked(points: DMatrix<T>) -> Self {
        Self { points }
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    /// The configuration matrix P (row i is point i).
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.points
    }

    pub fn point(&self, i: usize) -> RowDVector<T> {
        self.points.row(i).into_owned()
    }

    pub fn centroid(&self) -> RowDVector<T> {
        self.points.row_mean()
    }

    /// The (r+1) x n extended configuration matrix `[P^T; e^T]`.
    pub fn extended_matrix(&self) -> DMatrix<T> {
        let (n, r) = self.points.shape();
        DMatrix::from_fn(r + 1, n, |a, i| if a < r { self.points[(i, a)] } else { T::one() })
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> T {
        let n = self.n();
        let mut best = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max((self.points.row(i) - self.points.row(j)).norm());
            }
        }
        best
    }

    pub fn cast<U: Real>(&self) -> Configuration<U> {
        Configuration { points: self.points.map(|x| x.cast::<U>()) }
    }
}

/// Numerical rank of the centered coordinate matrix.
pub fn affine_rank<T: Real>(points: &DMatrix<T>, tol: &Tolerances) -> usize {
    if points.nrows() == 0 {
        return 0;
    }
    let centroid = points.row_mean();
    let centered = DMatrix::from_fn(points.nrows(), points.ncols(), |i, j| points[(i, j)] - centroid[j]);
    linalg::numerical_rank(&centered, tol)
}

/// Subtracts the centroid from every point.
pub fn center_configuration<T: Real>(config: &Configuration<T>) -> Configuration<T> {
    let c = config.centroid();
    let p = config.matrix();
    Configuration { points: DMatrix::from_fn(p.nrows(), p.ncols(), |i, j| p[(i, j)] - c[j]) }
}

/// Whether `p` and `q` generate the same EDM, entrywise within `tol`
/// relative to the larger of the two EDMs.
pub fn congruence_check<T: Real>(p: &Configuration<T>, q: &Configuration<T>, tol: f64) -> Result<bool> {
    if p.n() != q.n() {
        return Err(RigidityError::SizeMismatch { expected: p.n(), found: q.n() });
    }
    let dp = edm_from_configuration(p);
    let dq = edm_from_configuration(q);
    let scale = linalg::max_abs(dp.matrix()).max(linalg::max_abs(dq.matrix()));
    Ok(linalg::max_abs(&(dp.matrix() - dq.matrix())) <= T::lit(tol) * scale)
}

/// Largest edge-length-squared discrepancy between `p` and `q` over the
/// edges of `graph`, relative to the largest squared edge length of `p`.
pub fn equivalence_residual<T: Real>(graph: &SimpleGraph, p: &Configuration<T>, q: &Configuration<T>) -> Result<T> {
    if p.n() != q.n() || p.n() != graph.n() {
        return Err(RigidityError::SizeMismatch { expected: graph.n(), found: q.n() });
    }
    let dp = edm_from_configuration(p);
    let dq = edm_from_configuration(q);
    let mut scale = T::zero();
    let mut worst = T::zero();
    for &(i, j) in graph.edges() {
        scale = scale.max(dp.matrix()[(i, j)]);
        worst = worst.max((dp.matrix()[(i, j)] - dq.matrix()[(i, j)]).abs());
    }
    Ok(if scale > T::zero() { worst / scale } else { worst })
}

/// Whether `H o D_q = H o D_p` within `tol` (relative).
pub fn equivalence_check<T: Real>(graph: &SimpleGraph, p: &Configuration<T>, q: &Configuration<T>, tol: f64) -> Result<bool> {
    Ok(equivalence_residual(graph, p, q)? <= T::lit(tol))
}

/// A graph together with a configuration on the same vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework<T: Real> {
    graph: SimpleGraph,
    config: Configuration<T>,
}

impl<T: Real> Framework<T> {
    pub fn new(graph: SimpleGraph, config: Configuration<T>) -> Result<Self> {
        if graph.n() != config.n() {
            return Err(RigidityError::SizeMismatch { expected: graph.n(), found: config.n() });
        }
        Ok(Self { graph, config })
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn config(&self) -> &Configuration<T> {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    /// `r_bar = n - 1 - r`, the dimension of the Gale space.
    pub fn gale_dim(&self) -> usize {
        (self.n() - 1).saturating_sub(self.dim())
    }

    pub fn missing_edges(&self) -> Vec<(usize, usize)> {
        missing_edges(&self.graph)
    }

    /// Errors unless `r <= n - 2`, the standing hypothesis of the certificates.
    pub fn require_certifiable(&self) -> Result<()> {
        if self.dim() + 2 > self.n() {
            return Err(RigidityError::DimensionTooLarge { r: self.dim(), n: self.n() });
        }
        Ok(())
    }

    pub fn centered(&self) -> Self {
        Self { graph: self.graph.clone(), config: center_configuration(&self.config) }
    }

    /// Same framework with vertex `order[k]` moved to position `k`.
    pub fn relabeled(&self, order: &[usize]) -> Self {
        let p = self.config.matrix();
        let points = DMatrix::from_fn(p.nrows(), p.ncols(), |k, a| p[(order[k], a)]);
        Self { graph: self.graph.relabeled(order), config: Configuration { points } }
    }

    pub fn cast<U: Real>(&self) -> Framework<U> {
        Framework { graph: self.graph.clone(), config: self.config.cast() }
    }

    /// Serializes to the framework file format with `%.17g` coordinates.
    pub fn to_text(&self) -> String {
        write_framework_text(&self.graph, &self.config)
    }
}

/// Writes a graph and configuration in the framework file format.
pub fn write_framework_text<T: Real>(graph: &SimpleGraph, config: &Configuration<T>) -> String {
    let mut out = format!("{} {}\n", config.n(), config.dim());
    for i in 0..config.n() {
        let coords: Vec<String> = config.matrix().row(i).iter().map(|x| format_g17(x.as_f64())).collect();
        out.push_str(&coords.join(" "));
        out.push('\n');
    }
    out.push_str(&format!("{}\n", graph.edges().len()));
    for &(i, j) in graph.edges() {
        out.push_str(&format!("{} {}\n", i + 1, j + 1));
    }
    out
}

/// Parses the framework file format:
///
/// ```text
/// # comment lines start with '#'
/// n r
/// <n lines of r coordinates>
/// m
/// <m lines "i j", 1 <= i < j <= n>
/// ```
pub fn parse_framework(text: &str) -> Result<Framework<f64>> {
    parse_framework_with(text, &Tolerances::default())
}

pub fn parse_framework_with(text: &str, tol: &Tolerances) -> Result<Framework<f64>> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next_line = |what: &str| {
        lines.next().ok_or_else(|| RigidityError::MalformedFile { line: 0, message: format!("unexpected end of file, expected {what}") })
    };

    let (line, header) = next_line("header `n r`")?;
    let header = parse_numbers::<usize>(line, header)?;
    let [n, r] = header[..] else {
        return Err(malformed(line, "header must be `n r`"));
    };
    if n == 0 || r == 0 {
        return Err(malformed(line, "n and r must be positive"));
    }

    let mut coords = Vec::with_capacity(n * r);
    for _ in 0..n {
        let (line, text) = next_line("point coordinates")?;
        let row = parse_numbers::<f64>(line, text)?;
        if row.len() != r {
            return Err(malformed(line, &format!("expected {r} coordinates, found {}", row.len())));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(malformed(line, "non-finite coordinate"));
        }
        coords.extend(row);
    }

    let (line, count) = next_line("edge count")?;
    let count = parse_numbers::<usize>(line, count)?;
    let [m] = count[..] else {
        return Err(malformed(line, "edge count line must hold one integer"));
    };
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, text) = next_line("edge `i j`")?;
        let pair = parse_numbers::<usize>(line, text)?;
        let [i, j] = pair[..] else {
            return Err(malformed(line, "edge line must be `i j`"));
        };
        for v in [i, j] {
            if v == 0 || v > n {
                return Err(RigidityError::IndexOutOfRange { index: v, n });
            }
        }
        edges.push((i - 1, j - 1));
    }
    if let Some((line, _)) = lines.next() {
        return Err(malformed(line, "trailing content after edge list"));
    }

    let graph = SimpleGraph::new(n, edges)?;
    let config = Configuration::new(DMatrix::from_row_slice(n, r, &coords), tol)?;
    Framework::new(graph, config)
}

fn malformed(line: usize, message: &str) -> RigidityError {
    RigidityError::MalformedFile { line, message: message.to_string() }
}

fn parse_numbers<N: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<N>> {
    text.split_whitespace().map(|tok| tok.parse::<N>().map_err(|_| malformed(line, &format!("bad token `{tok}`")))).collect()
}
