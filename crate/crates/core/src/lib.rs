//! Numerical certification of universal and dimensional rigidity for bar
//! frameworks, built around Gale matrices and stress matrices.
//!
//! All numerical routines are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod certify;
pub mod edm;
pub mod error;
pub mod falsify;
pub mod fixtures;
pub mod flex;
pub mod framework;
pub mod gale;
pub mod generate;
pub mod lateration;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod search;
pub mod stress;
pub mod textio;
pub mod tolerance;

pub use error::{Result, RigidityError};
pub use framework::{missing_edges, parse_framework, parse_framework_with, SimpleGraph};
pub use scalar::Real;
pub use tolerance::{Budget, Tolerances};

pub type Configuration = framework::Configuration<f64>;
pub type Framework = framework::Framework<f64>;
pub type GaleMatrix = gale::GaleMatrix<f64>;
pub type StressMatrix = stress::StressMatrix<f64>;
pub type PsiMatrix = stress::PsiMatrix<f64>;

pub type Certificate = certify::Certificate<f64>;
pub type StressSpaceBasis = stress::StressSpaceBasis<f64>;
pub type EquivalentFrameworkWitness = falsify::EquivalentFrameworkWitness<f64>;
pub type FlexWitness = flex::FlexWitness<f64>;

pub type Configuration32 = framework::Configuration<f32>;
pub type Framework32 = framework::Framework<f32>;
pub type GaleMatrix32 = gale::GaleMatrix<f32>;
