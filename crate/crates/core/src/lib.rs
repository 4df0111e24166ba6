//! Combinatorial disjunctive constraints (CDCs): representability tests,
//! biclique covers of conflict graphs, exact cover search, and MIP
//! formulations together with exact checks of their validity and idealness.

pub mod cdc;
pub mod covers;
pub mod formulations;
pub mod generators;
pub mod geometry;
pub mod io;
pub mod nodeset;
pub mod search;

pub use cdc::{Cdc, CdcError, ConflictGraph, ConflictHypergraph};
pub use covers::{BicliqueCover, IbScheme, Level};
pub use formulations::MipModel;
pub use nodeset::NodeSet;
