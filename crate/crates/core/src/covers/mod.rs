//! Biclique covers of conflict graphs and the constructions that produce them.
//!
//! A level is a pair `(A, B)` of disjoint node sets whose every cross pair is
//! a conflict edge. A cover is a list of levels whose cross pairs together
//! hit every edge. Levels with an empty side cover nothing; they are kept and
//! reported as trivial so that level positions stay meaningful, and
//! [`BicliqueCover::depth`] counts only the nontrivial ones.

mod chain;
mod gray;
mod grid;
mod parity;
mod scheme;

pub use chain::{
    double_cover, multilinear_cover, product_cover, sos2_cover_with_code, sos2_gray_cover, sosk_cover,
    sosk_cover_bound, sosk_half_cover, stars_cover, union_cover,
};
pub use gray::{ceil_log2, GrayCode};
pub use grid::{
    chromatic_triangulation_cover, even_degree_condition, odd_degree_example, stitch_stars_grid, triangulation_cover,
    used_diagonal_degree, ChromaticOutcome, ClassReport, ParityClass,
};
pub use parity::{single_biclique_test, BicliqueTest};
pub use scheme::{cover_to_scheme, scheme_to_cover, IbScheme};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cdc::ConflictGraph;
use crate::nodeset::NodeSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("node count mismatch: expected {expected}, found {found}")]
    NodeCountMismatch { expected: usize, found: usize },
    #[error("pair ({0}, {1}) is not a conflict edge")]
    NotAConflictEdge(usize, usize),
    #[error("scheme is not pairwise")]
    NotPairwise,
    #[error("{0}")]
    Generator(#[from] crate::generators::GeneratorError),
}

/// One biclique `A x B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level {
    pub a: NodeSet,
    pub b: NodeSet,
}

impl Level {
    pub fn new(a: NodeSet, b: NodeSet) -> Self {
        Self { a, b }
    }

    pub fn is_trivial(&self) -> bool {
        self.a.is_empty() || self.b.is_empty()
    }

    pub fn covers(&self, u: usize, v: usize) -> bool {
        (self.a.contains(u) && self.b.contains(v)) || (self.a.contains(v) && self.b.contains(u))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BicliqueCover {
    pub node_count: usize,
    pub levels: Vec<Level>,
}

impl BicliqueCover {
    pub fn new(node_count: usize, levels: Vec<Level>) -> Self {
        Self { node_count, levels }
    }

    pub fn empty(node_count: usize) -> Self {
        Self::new(node_count, Vec::new())
    }

    /// Number of nontrivial levels.
    pub fn depth(&self) -> usize {
        self.levels.iter().filter(|l| !l.is_trivial()).count()
    }

    /// Copy without trivial levels.
    pub fn nontrivial(&self) -> Self {
        Self::new(self.node_count, self.levels.iter().filter(|l| !l.is_trivial()).cloned().collect())
    }

    /// Renders levels with the given labels, one `({..}, {..})` per line.
    pub fn pretty(&self, labels: &[String]) -> String {
        let side = |s: &NodeSet| {
            let items: Vec<&str> = s.iter().map(|i| labels[i].as_str()).collect();
            format!("{{{}}}", items.join(", "))
        };
        self.levels.iter().map(|l| format!("({}, {})\n", side(&l.a), side(&l.b))).collect()
    }

    pub fn to_file(&self) -> CoverFile {
        CoverFile {
            nodes: self.node_count,
            levels: self.levels.iter().map(|l| LevelFile { a: l.a.to_vec(), b: l.b.to_vec() }).collect(),
        }
    }

    pub fn from_file(f: &CoverFile) -> Self {
        Self::new(
            f.nodes,
            f.levels.iter().map(|l| Level::new(l.a.iter().copied().collect(), l.b.iter().copied().collect())).collect(),
        )
    }
}

/// On-disk cover: 0-based node indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFile {
    pub nodes: usize,
    pub levels: Vec<LevelFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelFile {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverViolation {
    NodeCountMismatch { graph: usize, cover: usize },
    IndexOutOfRange { level: usize, index: usize },
    Overlap { level: usize, nodes: Vec<usize> },
    NonEdge { level: usize, u: usize, v: usize },
    Uncovered { u: usize, v: usize },
}

/// Checks that every level is a biclique of `graph` and that the levels
/// cover every edge. Reports every violation found.
pub fn validate_cover(graph: &ConflictGraph, cover: &BicliqueCover) -> Result<(), Vec<CoverViolation>> {
    let n = graph.node_count();
    if cover.node_count != n {
        return Err(vec![CoverViolation::NodeCountMismatch { graph: n, cover: cover.node_count }]);
    }
    let mut errors = Vec::new();
    for (j, l) in cover.levels.iter().enumerate() {
        if let Some(index) = l.a.union(&l.b).last().filter(|&m| m >= n) {
            errors.push(CoverViolation::IndexOutOfRange { level: j, index });
            continue;
        }
        let both = l.a.intersection(&l.b);
        if !both.is_empty() {
            errors.push(CoverViolation::Overlap { level: j, nodes: both.to_vec() });
        }
        for u in &l.a {
            for v in l.b.difference(graph.neighbors(u)).iter().filter(|&v| v != u) {
                errors.push(CoverViolation::NonEdge { level: j, u: u.min(v), v: u.max(v) });
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    for (u, v) in graph.edges() {
        if !cover.levels.iter().any(|l| l.covers(u, v)) {
            errors.push(CoverViolation::Uncovered { u, v });
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

pub fn is_valid_cover(graph: &ConflictGraph, cover: &BicliqueCover) -> bool {
    validate_cover(graph, cover).is_ok()
}
