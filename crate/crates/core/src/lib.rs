//! Numerical Riemannian geometry of the qutrit density matrices under the
//! Bures metric.
//!
//! The pipeline runs from an Euler-angle parameterization of the states
//! ([`state_space`]) through the metric ([`metric`]), its curvature
//! ([`curvature`], or exactly via [`submersion`]) and the Spin(7) split of the curvature two-form ([`spin7`])
//! to pointwise curvature invariants ([`invariants`], [`forms`]) and their
//! integrals over the manifold ([`quadrature`]).

pub mod curvature;
pub mod error;
pub mod forms;
pub mod invariants;
pub mod metric;
pub mod quadrature;
pub mod spin7;
pub mod state_space;
pub mod submersion;
pub mod validation;

pub use curvature::{CurvatureTwoForm, FrameChoice, JetOptions, RiemannAtPoint};
pub use error::{BuresError, Result};
pub use forms::{MatrixForm, ScalarForm};
pub use invariants::InvariantRow;
pub use metric::{MetricAtPoint, MetricConfig, MetricField, QubitBures, QutritBures};
pub use quadrature::{CurvatureSource, Estimate, Method, QuadratureSpec, Survey};
pub use spin7::{DualityOperator, PairIndex};
pub use state_space::{Coord, HermitianState, ParameterPoint, Spectrum};
