//! Gilbert-Varshamov type lower bounds on the rate of codes inside binary
//! constrained systems presented by labelled graphs.
//!
//! [`system::System`] is the usual entry point; the modules below it expose
//! the matrices, eigenvalue solvers and curve procedures individually.

pub mod curve;
pub mod eigen;
pub mod error;
pub mod graphs;
pub mod gv;
pub mod mr;
pub mod plot;
pub mod polymat;
pub mod product;
pub mod roots;
pub mod singlestate;
pub mod system;

pub use curve::{Curve, CurvePoint, Segment};
pub use eigen::SolverConfig;
pub use error::{Error, Result};
pub use graphs::LabelledGraph;
pub use system::{System, SystemSpec};
