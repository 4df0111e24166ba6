//! Combinatorial disjunctive constraints and their conflict structure.
//!
//! A CDC is a finite ground set `J` together with a family of feasible sets.
//! A subset `T` of `J` is feasible when it fits inside one of the sets. The
//! infeasible pairs form the conflict graph and the inclusion-minimal
//! infeasible sets form the conflict hypergraph, whose rank decides which
//! independent-branching schemes exist.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::covers::IbScheme;
use crate::nodeset::NodeSet;

/// Default node bound for maximal-independent-set enumeration.
pub const PAIRWISE_NODE_LIMIT: usize = 40;

/// Largest ground set for which a derived scheme is re-checked against the
/// CDC by enumerating every subset.
pub const SCHEME_CHECK_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CdcError {
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("feasible set {0} is empty")]
    EmptySet(usize),
    #[error("family of feasible sets is empty")]
    EmptyFamily,
    #[error("feasible set {redundant} is contained in feasible set {container}")]
    RedundantSet { redundant: usize, container: usize },
    #[error("labels not covered by any feasible set: {0:?}")]
    CoverageGap(Vec<String>),
    #[error("index {index} out of range for ground set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("cardinality cap {0} is below 2")]
    CapTooSmall(usize),
    #[error("instance has {nodes} nodes, above the limit of {limit}")]
    SizeLimit { nodes: usize, limit: usize },
    #[error("conflict hypergraph has rank above the cap {cap}")]
    RankExceedsCap { cap: usize },
    #[error("derived scheme does not represent the CDC")]
    SchemeMismatch,
}

/// A validated CDC over dense indices `0..labels.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cdc {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    sets: Vec<NodeSet>,
}

impl Cdc {
    /// Builds a CDC and rejects empty, redundant or non-covering families.
    pub fn new<L, S, T>(labels: L, sets: S) -> Result<Self, CdcError>
    where
        L: IntoIterator,
        L::Item: Into<String>,
        S: IntoIterator<Item = T>,
        T: IntoIterator,
        T::Item: AsRef<str>,
    {
        let (labels, index) = index_labels(labels)?;
        let sets = resolve_sets(&index, sets)?;
        Self::from_index_sets(labels, sets)
    }

    /// Like [`Cdc::new`] but drops empty, duplicated and dominated sets
    /// instead of rejecting them. Returns the input positions that were
    /// dropped.
    pub fn normalized<L, S, T>(labels: L, sets: S) -> Result<(Self, Vec<usize>), CdcError>
    where
        L: IntoIterator,
        L::Item: Into<String>,
        S: IntoIterator<Item = T>,
        T: IntoIterator,
        T::Item: AsRef<str>,
    {
        let (labels, index) = index_labels(labels)?;
        let sets = resolve_sets(&index, sets)?;
        let mut dropped = Vec::new();
        let mut kept = Vec::new();
        for (i, s) in sets.iter().enumerate() {
            let dominated =
                s.is_empty() || sets.iter().enumerate().any(|(j, t)| j != i && s.is_subset(t) && (s != t || j < i));
            if dominated {
                dropped.push(i);
            } else {
                kept.push(s.clone());
            }
        }
        Ok((Self::from_index_sets(labels, kept)?, dropped))
    }

    /// Strict construction from index sets.
    pub fn from_index_sets(labels: Vec<String>, sets: Vec<NodeSet>) -> Result<Self, CdcError> {
        let (labels, index) = index_labels(labels)?;
        let n = labels.len();
        if sets.is_empty() {
            return Err(CdcError::EmptyFamily);
        }
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(CdcError::EmptySet(i));
            }
            if let Some(m) = s.last().filter(|&m| m >= n) {
                return Err(CdcError::IndexOutOfRange { index: m, size: n });
            }
        }
        for (i, s) in sets.iter().enumerate() {
            for (j, t) in sets.iter().enumerate() {
                if i != j && s.is_subset(t) {
                    let (redundant, container) = if s == t { (i.max(j), i.min(j)) } else { (i, j) };
                    return Err(CdcError::RedundantSet { redundant, container });
                }
            }
        }
        let covered = sets.iter().fold(NodeSet::new(), |acc, s| acc.union(s));
        let gap: Vec<String> = covered.complement(n).iter().map(|i| labels[i].clone()).collect();
        if !gap.is_empty() {
            return Err(CdcError::CoverageGap(gap));
        }
        Ok(Self { labels, index, sets })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn sets(&self) -> &[NodeSet] {
        &self.sets
    }

    /// Size of the ground set.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Maps labels to a node set.
    pub fn set_of<I>(&self, labels: I) -> Result<NodeSet, CdcError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        labels
            .into_iter()
            .map(|l| {
                let l = l.as_ref();
                self.index_of(l).ok_or_else(|| CdcError::UnknownLabel(l.to_string()))
            })
            .collect()
    }

    pub fn labels_of(&self, set: &NodeSet) -> Vec<String> {
        set.iter().map(|i| self.labels[i].clone()).collect()
    }

    /// True iff `t` is contained in some feasible set.
    pub fn is_feasible(&self, t: &NodeSet) -> Result<bool, CdcError> {
        if let Some(m) = t.last().filter(|&m| m >= self.len()) {
            return Err(CdcError::IndexOutOfRange { index: m, size: self.len() });
        }
        Ok(self.contains(t))
    }

    fn contains(&self, t: &NodeSet) -> bool {
        self.sets.iter().any(|s| t.is_subset(s))
    }

    /// Graph on `J` whose edges are the infeasible pairs.
    pub fn conflict_graph(&self) -> ConflictGraph {
        let n = self.len();
        let mut g = ConflictGraph::new(n);
        let mut together = vec![NodeSet::new(); n];
        for s in &self.sets {
            for u in s {
                together[u] = together[u].union(s);
            }
        }
        for (u, near) in together.iter().enumerate() {
            for v in near.complement(n).iter().filter(|&v| v > u) {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Minimal infeasible sets of size at most `cap`.
    ///
    /// Search continues past the cap only to decide whether larger minimal
    /// infeasible sets exist, in which case `truncated_at` is set.
    pub fn minimal_infeasible_sets(&self, cap: usize) -> Result<ConflictHypergraph, CdcError> {
        if cap < 2 {
            return Err(CdcError::CapTooSmall(cap));
        }
        let n = self.len();
        let mut edges = Vec::new();
        let mut truncated_at = None;
        let mut level: Vec<NodeSet> = (0..n).map(NodeSet::singleton).collect();
        let mut c = 2;
        while !level.is_empty() {
            let known: HashSet<&NodeSet> = level.iter().collect();
            let mut next = Vec::new();
            let mut found_beyond = false;
            for f in &level {
                let top = f.last().unwrap_or(0);
                for v in top + 1..n {
                    let mut t = f.clone();
                    t.insert(v);
                    let closed = f.iter().all(|w| {
                        let mut sub = t.clone();
                        sub.remove(w);
                        known.contains(&sub)
                    });
                    if !closed {
                        continue;
                    }
                    if self.contains(&t) {
                        next.push(t);
                    } else if c <= cap {
                        edges.push(t);
                    } else {
                        found_beyond = true;
                        break;
                    }
                }
                if found_beyond {
                    break;
                }
            }
            if found_beyond {
                truncated_at = Some(cap);
                break;
            }
            level = next;
            c += 1;
        }
        edges.sort_by_key(|e| (e.len(), e.to_vec()));
        let rank = edges.iter().map(NodeSet::len).max().unwrap_or(0);
        Ok(ConflictHypergraph { node_count: n, edges, rank, truncated_at })
    }

    /// Full conflict hypergraph.
    pub fn conflict_hypergraph(&self) -> ConflictHypergraph {
        self.minimal_infeasible_sets(self.len().max(2)).expect("cap of at least 2 is always accepted")
    }

    /// True iff a `k`-way independent-branching scheme exists, i.e. every
    /// minimal infeasible set has at most `k` elements.
    pub fn k_way_representable(&self, k: usize) -> Result<bool, CdcError> {
        if k < 2 {
            return Err(CdcError::CapTooSmall(k));
        }
        Ok(self.minimal_infeasible_sets(k)?.truncated_at.is_none())
    }

    /// Pairwise test comparing the family with the maximal independent sets
    /// of the conflict graph.
    pub fn pairwise_representability(&self, node_limit: usize) -> Result<Pairwise, CdcError> {
        if self.len() > node_limit {
            return Err(CdcError::SizeLimit { nodes: self.len(), limit: node_limit });
        }
        let g = self.conflict_graph();
        let family: HashSet<&NodeSet> = self.sets.iter().collect();
        let mut witness = None;
        g.for_each_maximal_independent_set(&mut |s| {
            if witness.is_none() && !family.contains(s) {
                witness = Some(s.clone());
            }
        });
        Ok(Pairwise { representable: witness.is_none(), witness })
    }

    /// Pairwise test with the default node limit.
    pub fn is_pairwise_representable(&self) -> Result<bool, CdcError> {
        Ok(self.pairwise_representability(PAIRWISE_NODE_LIMIT)?.representable)
    }

    /// Scheme whose `j`-th level offers `J \ {e}` for each element `e` of
    /// the `j`-th minimal infeasible set, padded with empty alternatives up
    /// to the rank.
    pub fn cnf_ib_scheme(&self, cap: usize) -> Result<IbScheme, CdcError> {
        let h = self.minimal_infeasible_sets(cap)?;
        if h.truncated_at.is_some() {
            return Err(CdcError::RankExceedsCap { cap });
        }
        let n = self.len();
        let k = h.rank.max(2);
        let levels = h
            .edges
            .iter()
            .map(|e| {
                let mut alts: Vec<NodeSet> = e.iter().map(|v| NodeSet::singleton(v).complement(n)).collect();
                alts.resize(k, NodeSet::new());
                alts
            })
            .collect();
        let scheme = IbScheme::new(n, k, levels);
        if n <= SCHEME_CHECK_LIMIT && !scheme.represents(self) {
            return Err(CdcError::SchemeMismatch);
        }
        Ok(scheme)
    }
}

fn index_labels<L>(labels: L) -> Result<(Vec<String>, HashMap<String, usize>), CdcError>
where
    L: IntoIterator,
    L::Item: Into<String>,
{
    let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(CdcError::DuplicateLabel(l.clone()));
        }
    }
    Ok((labels, index))
}

fn resolve_sets<S, T>(index: &HashMap<String, usize>, sets: S) -> Result<Vec<NodeSet>, CdcError>
where
    S: IntoIterator<Item = T>,
    T: IntoIterator,
    T::Item: AsRef<str>,
{
    sets.into_iter()
        .map(|s| {
            s.into_iter()
                .map(|l| {
                    let l = l.as_ref();
                    index.get(l).copied().ok_or_else(|| CdcError::UnknownLabel(l.to_string()))
                })
                .collect()
        })
        .collect()
}

/// Outcome of the pairwise test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairwise {
    pub representable: bool,
    /// A maximal independent set of the conflict graph that is not feasible.
    pub witness: Option<NodeSet>,
}

/// Inclusion-minimal infeasible sets, sorted by size then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictHypergraph {
    pub node_count: usize,
    pub edges: Vec<NodeSet>,
    /// Largest hyperedge found within the cap, 0 when there is none.
    pub rank: usize,
    /// Set to the cap when larger minimal infeasible sets exist.
    pub truncated_at: Option<usize>,
}

/// Simple undirected graph on `0..n` stored as adjacency bitsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    adj: Vec<NodeSet>,
}

impl ConflictGraph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![NodeSet::new(); n] }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, CdcError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(n);
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(CdcError::IndexOutOfRange { index: x, size: n });
                }
            }
            if u != v {
                g.add_edge(u, v);
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop {u}");
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|a| a.contains(v))
    }

    pub fn neighbors(&self, u: usize) -> &NodeSet {
        &self.adj[u]
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.node_count()).flat_map(|u| self.adj[u].iter().filter(move |&v| v > u).map(move |v| (u, v))).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(NodeSet::len).sum::<usize>() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Calls `f` on every maximal independent set (Bron-Kerbosch with
    /// pivoting on the complement).
    pub fn for_each_maximal_independent_set(&self, f: &mut dyn FnMut(&NodeSet)) {
        let n = self.node_count();
        let non_adj: Vec<NodeSet> = (0..n)
            .map(|u| {
                let mut s = self.adj[u].complement(n);
                s.remove(u);
                s
            })
            .collect();
        bron_kerbosch(&non_adj, NodeSet::new(), NodeSet::full(n), NodeSet::new(), f);
    }

    pub fn maximal_independent_sets(&self) -> Vec<NodeSet> {
        let mut out = Vec::new();
        self.for_each_maximal_independent_set(&mut |s| out.push(s.clone()));
        out.sort_by_key(NodeSet::to_vec);
        out
    }

    /// Graphviz rendering with the given node labels.
    pub fn to_dot(&self, labels: &[String]) -> String {
        use std::fmt::Write;
        let mut out = String::from("graph conflicts {\n");
        for (i, l) in labels.iter().enumerate().take(self.node_count()) {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", l.replace('"', "\\\""));
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  n{u} -- n{v};");
        }
        out.push_str("}\n");
        out
    }
}

fn bron_kerbosch(nbr: &[NodeSet], r: NodeSet, mut p: NodeSet, mut x: NodeSet, f: &mut dyn FnMut(&NodeSet)) {
    if p.is_empty() && x.is_empty() {
        f(&r);
        return;
    }
    let pivot = p.union(&x).iter().max_by_key(|&u| nbr[u].intersection(&p).len()).expect("p or x is nonempty");
    for v in p.difference(&nbr[pivot]).to_vec() {
        let mut r2 = r.clone();
        r2.insert(v);
        bron_kerbosch(nbr, r2, p.intersection(&nbr[v]), x.intersection(&nbr[v]), f);
        p.remove(v);
        x.insert(v);
    }
}
