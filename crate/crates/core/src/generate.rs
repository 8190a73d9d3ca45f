//! Seeded random frameworks for property tests and benchmarks.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::framework::{Configuration, Framework, SimpleGraph};
use crate::gale::general_position_check;
use crate::tolerance::Tolerances;

const MAX_ATTEMPTS: usize = 1000;

fn gaussian_points(rng: &mut ChaCha8Rng, n: usize, r: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, r, |_, _| StandardNormal.sample(rng))
}

/// Random (r+1)-lateration framework on n vertices in general position.
/// Each vertex after the initial clique is joined to exactly r+1 earlier
/// vertices; with `shuffle` the labels are permuted afterwards.
pub fn random_lateration(rng: &mut ChaCha8Rng, r: usize, n: usize, shuffle: bool) -> Framework<f64> {
    assert!(n >= r + 2, "need n >= r + 2");
    let tol = Tolerances::default();
    let mut edges = Vec::new();
    for a in 0..=r {
        for b in 0..a {
            edges.push((b, a));
        }
    }
    let mut earlier: Vec<usize> = Vec::new();
    for k in (r + 1)..n {
        earlier.clear();
        earlier.extend(0..k);
        earlier.shuffle(rng);
        edges.extend(earlier.iter().take(r + 1).map(|&u| (u, k)));
    }
    let mut labels: Vec<usize> = (0..n).collect();
    if shuffle {
        labels.shuffle(rng);
    }
    let graph = SimpleGraph::new(n, edges.iter().map(|&(a, b)| (labels[a], labels[b]))).expect("lateration graphs are connected");
    for _ in 0..MAX_ATTEMPTS {
        let points = gaussian_points(rng, n, r);
        let Ok(config) = Configuration::new(points, &tol) else { continue };
        if general_position_check(&config, &tol).in_general_position {
            return Framework::new(graph, config).expect("sizes agree");
        }
    }
    panic!("no general-position configuration found");
}

/// `count` lateration frameworks with r in {1, 2, 3} and `5 <= n <= 12`.
pub fn lateration_corpus(seed: u64, count: usize) -> Vec<Framework<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.random_range(1..=3);
            let n = rng.random_range(5.max(r + 2)..=12);
            random_lateration(&mut rng, r, n, true)
        })
        .collect()
}

/// Random connected graph: a random spanning tree plus each other pair with
/// probability `density`.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> SimpleGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut adjacent = vec![false; n * n];
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        let (a, b) = (parent.min(order[k]), parent.max(order[k]));
        adjacent[a * n + b] = true;
        edges.push((a, b));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if !adjacent[a * n + b] && rng.random_bool(density) {
                edges.push((a, b));
            }
        }
    }
    SimpleGraph::new(n, edges).expect("spanning tree keeps the graph connected")
}

type Edges = Vec<(usize, usize)>;

/// Distinct points of the `4^r` grid, each one a rook move away from an
/// earlier point, joined only by axis-parallel bars.
fn rook_lattice(rng: &mut ChaCha8Rng, n: usize, r: usize, density: f64) -> Option<(DMatrix<f64>, Edges)> {
    let mut rows: Vec<Vec<u8>> = vec![(0..r).map(|_| rng.random_range(0..4)).collect()];
    let mut edges = Vec::new();
    let mut attempts = 0;
    while rows.len() < n {
        attempts += 1;
        if attempts > 50 * n {
            return None;
        }
        let parent = rng.random_range(0..rows.len());
        let mut row = rows[parent].clone();
        row[rng.random_range(0..r)] = rng.random_range(0..4);
        if rows.contains(&row) {
            continue;
        }
        edges.push((parent, rows.len()));
        rows.push(row);
    }
    let axis_parallel = |i: usize, j: usize| (0..r).filter(|&c| rows[i][c] != rows[j][c]).count() == 1;
    for j in 0..n {
        for i in 0..j {
            if !edges.contains(&(i, j)) && axis_parallel(i, j) && rng.random_bool(density) {
                edges.push((i, j));
            }
        }
    }
    Some((DMatrix::from_fn(n, r, |i, c| f64::from(rows[i][c])), edges))
}

/// Mixed corpus: r in {1, 2, 3}, `r + 3 <= n <= 10`, densities from sparse
/// to nearly complete; about a third of the configurations are drawn from a
/// small integer grid so that degenerate directions occur, and for r > 1 most
/// of those keep only axis-parallel bars, which is where affine flexes live.
pub fn mixed_corpus(seed: u64, count: usize) -> Vec<Framework<f64>> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r = rng.random_range(1..=3);
        let n = rng.random_range((r + 3)..=10);
        let density = rng.random_range(0.15..0.95);
        let mut graph = random_connected_graph(&mut rng, n, density);
        let grid = rng.random_bool(0.3);
        let points = if grid && r > 1 && rng.random_bool(0.6) {
            let Some((points, edges)) = rook_lattice(&mut rng, n, r, density) else { continue };
            graph = SimpleGraph::new(n, edges).expect("rook moves keep the graph connected");
            points
        } else if grid {
            DMatrix::from_fn(n, r, |_, _| rng.random_range(0..3) as f64)
        } else {
            gaussian_points(&mut rng, n, r)
        };
        let distinct = (0..n).all(|i| (0..i).all(|j| points.row(i) != points.row(j)));
        if !distinct {
            continue;
        }
        let Ok(config) = Configuration::new(points, &tol) else { continue };
        out.push(Framework::new(graph, config).expect("sizes agree"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lateration::find_lateration_order;

    #[test]
    fn corpora_are_reproducible() {
        assert_eq!(lateration_corpus(3, 5), lateration_corpus(3, 5));
        assert_eq!(mixed_corpus(3, 5), mixed_corpus(3, 5));
    }

    #[test]
    fn lateration_corpus_is_recognized() {
        for f in lateration_corpus(0, 20) {
            assert!((5..=12).contains(&f.n()));
            assert!(find_lateration_order(f.graph(), f.dim(), 100_000).unwrap().is_some());
        }
    }
}
