//! The shipped example frameworks.
//!
//! * square: unit square with one diagonal, missing edge (2,4).
//! * counterexample: five planar points with missing edges (1,2) and (3,4);
//!   points 2, 4 and 5 are collinear.
//! * lateration: a 3-lateration graph on five points in general position.
//! * simplex: regular simplex on n points with the complete graph.

use crate::edm::build_v_basis;
use crate::framework::{parse_framework, Configuration, Framework, SimpleGraph};
use crate::tolerance::Tolerances;

pub const SQUARE_TEXT: &str = "\
# unit square, K4 minus the diagonal (2,4)
4 2
0 0
1 0
1 1
0 1
5
1 2
1 3
1 4
2 3
3 4
";

pub const COUNTEREXAMPLE_TEXT: &str = "\
# dimensionally rigid, no PSD stress of rank 2; p2, p4, p5 collinear
5 2
-3 -5
1 2
0 -1
2 0
0 4
8
1 3
1 4
1 5
2 3
2 4
2 5
3 5
4 5
";

pub const LATERATION_TEXT: &str = "\
# 3-lateration graph: clique on {1,2,3,4}, vertex 5 joined to 1, 2, 3
5 2
0 0
3 0
0 3
1 1
4 1
9
1 2
1 3
1 4
1 5
2 3
2 4
2 5
3 4
3 5
";

pub fn square() -> Framework<f64> {
    parse_framework(SQUARE_TEXT).expect("square fixture is valid")
}

pub fn counterexample() -> Framework<f64> {
    parse_framework(COUNTEREXAMPLE_TEXT).expect("counterexample fixture is valid")
}

pub fn lateration() -> Framework<f64> {
    parse_framework(LATERATION_TEXT).expect("lateration fixture is valid")
}

/// Regular simplex with edge length sqrt(2) in R^(n-1): point i is row i of
/// the V basis, so the centroid sits at the origin.
pub fn simplex(n: usize) -> Framework<f64> {
    let v = build_v_basis::<f64>(n);
    let points = v.matrix().clone();
    let config = Configuration::new(points, &Tolerances::default()).expect("simplex spans");
    Framework::new(SimpleGraph::complete(n), config).expect("sizes agree")
}

/// `(file name, contents)` for every shipped fixture.
pub fn all_texts() -> Vec<(&'static str, String)> {
    vec![
        ("square.fw", SQUARE_TEXT.to_string()),
        ("counterexample.fw", COUNTEREXAMPLE_TEXT.to_string()),
        ("lateration.fw", LATERATION_TEXT.to_string()),
        ("simplex.fw", simplex(4).to_text()),
    ]
}
