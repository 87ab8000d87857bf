//! Curvature obstructions to local limiting Carleman weights.
//!
//! From a metric given in coordinates this crate computes the Weyl operator
//! and tests the eigenflag property (dimension ≥ 4), or computes the
//! Cotton-York tensor and tests whether it is singular (dimension 3). A
//! failure of either condition at a point rules out a limiting Carleman
//! weight on any neighborhood of that point.
//!
//! The expression evaluator, jets and tensor kernels are generic over the
//! scalar type; the aliases below fix the common `f64` instantiations.

pub mod bivector;
pub mod curvature;
pub mod cy;
pub mod dsl;
pub mod eigenflag;
pub mod error;
pub mod field;
pub mod genericity;
pub mod jet;
pub mod json;
pub mod perturbation;
pub mod report;
pub mod scalar;
pub mod tensor;

pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use scalar::{Field, Real, Scalar};

pub type Jet = jet::Jet3<f64>;
pub type Matrix = tensor::Matrix<f64>;
pub type Tensor3 = tensor::Tensor<f64, 3>;
pub type Tensor4 = tensor::Tensor<f64, 4>;
pub type CurvaturePackage = curvature::CurvaturePackage<f64>;
pub type MetricJets = field::MetricJets<f64>;

/// Version string stamped into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
