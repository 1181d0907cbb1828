//! Shadow calculus for 2-knots: decorated encoding graphs, group
//! presentations, homology, knot groups, Alexander polynomials, graph moves
//! and banded unlink diagrams.

pub mod alexander;
pub mod banded;
pub mod encoding_graph;
pub mod error;
pub mod fp_group;
pub mod grid;
pub mod half;
pub mod homology;
pub mod knot_shadow;
pub mod moves;
pub mod van_kampen;

pub use alexander::LaurentPoly;
pub use banded::{BandedUnlinkDiagram, CombinatorialMap, ShadowReport};
pub use encoding_graph::{DecoratedGraph, Edge, End, PortionSpec, ValidationReport, VertexKind};
pub use error::{Error, Result};
pub use fp_group::{GenOrigin, GenSym, Letter, Presentation, Word};
pub use half::HalfInt;
pub use homology::{AbelianGroup, IntMatrix, SnfResult};
pub use knot_shadow::{Classification, KnotShadow};
pub use moves::{MoveKind, RuleTable, Site};
pub use van_kampen::Pi1Result;
