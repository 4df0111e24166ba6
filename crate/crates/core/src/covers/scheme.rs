//! Independent-branching schemes.

use super::{BicliqueCover, CoverError, Level};
use crate::cdc::Cdc;
use crate::nodeset::NodeSet;

/// A `k`-way scheme: each level lists `k` alternatives and a set is feasible
/// when, at every level, some alternative contains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IbScheme {
    node_count: usize,
    k: usize,
    levels: Vec<Vec<NodeSet>>,
}

impl IbScheme {
    pub fn new(node_count: usize, k: usize, levels: Vec<Vec<NodeSet>>) -> Self {
        Self { node_count, k, levels }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn levels(&self) -> &[Vec<NodeSet>] {
        &self.levels
    }

    pub fn admits(&self, t: &NodeSet) -> bool {
        self.levels.iter().all(|alts| alts.iter().any(|l| t.is_subset(l)))
    }

    /// Compares the admitted sets with the CDC's feasible sets on every
    /// subset of the ground set. Exponential in `|J|`, which must be below 64.
    pub fn represents(&self, cdc: &Cdc) -> bool {
        let n = cdc.len();
        assert!(n < 64, "exhaustive comparison needs fewer than 64 nodes");
        if n != self.node_count {
            return false;
        }
        (0u64..1 << n).all(|mask| {
            let t = NodeSet::from_mask(mask);
            self.admits(&t) == cdc.is_feasible(&t).unwrap_or(false)
        })
    }
}

/// Two-way scheme `L = J \ A`, `R = J \ B` for each level.
pub fn cover_to_scheme(cover: &BicliqueCover) -> IbScheme {
    let n = cover.node_count;
    let levels = cover.levels.iter().map(|l| vec![l.a.complement(n), l.b.complement(n)]).collect();
    IbScheme::new(n, 2, levels)
}

/// Inverse of [`cover_to_scheme`].
pub fn scheme_to_cover(scheme: &IbScheme) -> Result<BicliqueCover, CoverError> {
    if scheme.k != 2 || scheme.levels.iter().any(|l| l.len() != 2) {
        return Err(CoverError::NotPairwise);
    }
    let n = scheme.node_count;
    let levels = scheme.levels.iter().map(|alts| Level::new(alts[0].complement(n), alts[1].complement(n))).collect();
    Ok(BicliqueCover::new(n, levels))
}
