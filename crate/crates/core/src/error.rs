use thiserror::Error;

/// Errors raised by framework construction, the linear-algebra kernels and
/// the certification routines. Vertex labels in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RigidityError {
    #[error("malformed framework file (line {line}): {message}")]
    MalformedFile { line: usize, message: String },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("points do not affinely span R^{expected} (numerical rank {rank})")]
    NotAffineSpanning { rank: usize, expected: usize },
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("matrix is not hollow (diagonal entry {index} = {value:e})")]
    NotHollow { index: usize, value: f64 },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("null space of the extended configuration matrix is trivial")]
    NullSpaceTrivial,
    #[error("{count} minors exceed the enumeration cap {cap}")]
    CombinatorialBudgetExceeded { count: u128, cap: u128 },
    #[error("trailing block of the Gale matrix is singular")]
    SingularZ2,
    #[error("Psi matrix is singular")]
    SingularPsi,
    #[error("omega is not an equilibrium stress (residual {residual:e})")]
    NotEquilibrium { residual: f64 },
    #[error("stress entry on missing pair ({i}, {j}) is {value:e}")]
    SparsityViolated { i: usize, j: usize, value: f64 },
    #[error("special Gale matrix lacks the required zero pattern (max entry {max_entry:e})")]
    PatternViolated { max_entry: f64 },
    #[error("affine witness is congruent to the input framework")]
    DegenerateWitness,
    #[error("purification block Z^{k} is singular")]
    SingularZk { k: usize },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("search budget of {nodes} nodes exhausted")]
    BudgetExceeded { nodes: usize },
    #[error("dimension r = {r} exceeds n - 2 = {}", .n.saturating_sub(2))]
    DimensionTooLarge { r: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, RigidityError>;
