//! Inverse design of stacked blade sections.
//!
//! Each blade section is recovered from a prescribed tangential velocity
//! distribution by the classical canonical-circle construction, corrected so
//! that the contour closes and the speed at infinity is honoured. Adjacent
//! sections are joined by a velocity field that is a polynomial of degree one
//! or two in the transversal coordinate `h`, and reconstructed contours are
//! placed relative to each other by least squares, ruled-surface area, or a
//! lift surrogate.

pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod oracle;
pub mod pipeline;
pub mod planar;
pub mod positioning;
pub mod spline;

pub use error::{Error, Result};
pub use geometry::{Contour, Point2, RuledTriangulation};
pub use harmonic::{AnalyticSeries, BoundarySamples, Orientation};
pub use planar::{BladeSolution, CircleCorrespondence, ClosureReport, VelocityDistribution};
pub use spline::{FieldResiduals, LinearSplineField, QuadraticSplineField};
