//! Superattracting polynomial skew products `f(z, w) = (p(z), q(z, w))`:
//! Newton polygon classification, weight intervals, invariant wedges, Green
//! functions and Böttcher coordinates near the origin.

pub mod algebra;
pub mod blowup;
pub mod bottcher;
pub mod error;
pub mod format;
pub mod green;
pub mod newton;
pub mod oracles;
pub mod regions;
pub mod weights;

pub use algebra::{BiPoly, ComplexScalar, Rational, SkewProduct, UniPoly, Wide};
pub use error::{Error, Result};
pub use green::{GreenConfig, GreenEstimate, GreenKind, GreenValue, Termination};
pub use newton::{classify, Case, Classification, NewtonPolygon};
pub use regions::{Basin, BasinLabel, WedgeSpec};
