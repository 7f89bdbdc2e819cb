//! Combinatorics of AF-algebras presented by Bratteli diagrams and of the
//! graphs whose C*-algebras realize them.
//!
//! The library is generic over exact integer scalar types (see [`num`]);
//! the aliases below fix the common choices.

pub mod decide;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod ideals;
pub mod io;
pub mod ktheory;
pub mod model;
pub mod num;
pub mod random;
pub mod realize;
pub mod separation;
pub mod telescope;

pub use error::{Error, Result};
pub use graph::{Mult, MultGraph};
pub use model::{
    validate_diagram, BratteliDiagram, DiagramBuilder, Issue, LabelRule, Level, MultMatrix,
    TailStep, TailTemplate, ValidationReport, Vertex, VertexRef,
};
pub use num::{Coeff, Count};
pub use telescope::{
    check_equivalence_witness, path_matrix, prefix_isomorphic, telescope, EquivalenceReport,
    Subsequence, Telescoped,
};

use num_bigint::{BigInt, BigUint};

/// Diagram with machine-width counts; overflow is reported, never wrapped.
pub type Diagram = BratteliDiagram<u64>;
/// Diagram with arbitrary-precision counts.
pub type BigDiagram = BratteliDiagram<BigUint>;
pub type Graph = MultGraph<u64>;
pub type BigGraph = MultGraph<BigUint>;
pub type K0Vec = ktheory::K0Vector<i64>;
pub type BigK0Vec = ktheory::K0Vector<BigInt>;
