//! Optimal transport for costs that may take the value `+∞`.
//!
//! The crate decides (strong) compatibility of measure pairs through Hall
//! polytopes, solves semi-discrete transport by dual ascent on the weight map,
//! solves discrete transport with forbidden pairs by min-cost flow, certifies
//! cyclic monotonicity and path-boundedness of finite pair sets, rebuilds
//! potentials from them, and provides the calculus of the polar cost
//! `p(x, y) = -ln(<x, y> - 1)` (A-transform, polar subgradient).

#![allow(clippy::needless_range_loop)]

pub mod cost;
pub mod discrete_ot;
pub mod duality;
mod error;
pub mod flow;
pub mod hall;
pub mod io;
pub mod measures;
pub mod polarcalc;
pub mod semidiscrete;
pub mod xreal;

pub use cost::{finiteness_set, CostFunction, Point, TableCost};
pub use discrete_ot::{BipartiteInstance, HallReport, HallWitness, Split};
pub use duality::{Certificate, PairSet, Potential};
pub use error::{Error, Result};
pub use hall::{Classification, FaceDescriptor, HallPolytope};
pub use measures::{DiscreteMeasure, Disk, Provenance, QuadratureMeasure};
pub use polarcalc::{GeomConvexFn, GridSpec};
pub use semidiscrete::{CellPartition, SemiDiscrete, SolveOptions, SolveReport, TransportPlan, WeightVector};
pub use xreal::{Convention, XReal};
