//! Topological entropy of piecewise-monotone interval maps.
//!
//! The crate builds truncated Markov diagrams of interval maps over natural
//! partitions, counts closed paths in oriented graphs exactly, estimates
//! entropy along three routes (lap growth, diagram spectral radius, closed
//! path growth), assembles one-dimensional upper-bound reports, and
//! constructs windowed sinusoidal perturbations near flat homoclinic
//! connections together with certified horseshoe lower bounds.

pub mod analysis;
pub mod builtins;
pub mod error;
pub mod graphs;
pub mod hofbauer;
pub mod maps;
pub mod perturb;
pub mod poly;
pub mod scalar;
pub mod symbolic;

pub use error::{Error, Result};
pub use graphs::{ClosedPath, OrientedGraph, ParryMeasure, Period};
pub use hofbauer::{DiagramVertex, HofbauerDiagram};
pub use maps::{BranchFn, CriticalSet, NaturalPartition, Orbit, Piece, PiecewiseMonotoneMap};
pub use scalar::{Interval, Scalar};
pub use symbolic::{CylinderInterval, Word};
