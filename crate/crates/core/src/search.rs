//! Exact minimum biclique cover search and lower bounds on cover depth.
//!
//! The search branches on which maximal biclique covers the first
//! uncovered edge. Any cover can be grown level by level into maximal
//! bicliques and reordered so that each level covers the first edge left
//! by its predecessors, so this loses no solutions.

use std::collections::HashSet;

use thiserror::Error;

use crate::cdc::{Cdc, ConflictGraph};
use crate::covers::{ceil_log2, BicliqueCover, Level};
use crate::formulations::{FormulationError, MipModel, Rational, Role, Sense};
use crate::nodeset::NodeSet;

/// Default and hard maximum node count for the exact search (edge sets
/// are kept in a `u128`).
pub const EXACT_NODE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("graph has {nodes} nodes, exact search is limited to {limit}")]
    SizeLimit { nodes: usize, limit: usize },
    #[error("depth must be at least 1")]
    BadDepth,
    #[error(transparent)]
    Formulation(#[from] FormulationError),
}

/// Any formulation of an irredundant CDC needs `ceil(log2 |S|)` binaries.
pub fn log_lower_bound(cdc: &Cdc) -> usize {
    ceil_log2(cdc.sets().len())
}

/// `min(k, n - k)`: the first `k` points and the last `k` points each need
/// separating from the opposite end.
pub fn sosk_lower_bound(n: usize, k: usize) -> usize {
    k.min(n.saturating_sub(k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    /// A cover of depth at most the requested one, or `None` when the
    /// search space is exhausted.
    pub cover: Option<BicliqueCover>,
    pub explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCover {
    pub depth: usize,
    pub cover: BicliqueCover,
    /// Depth at which deepening started.
    pub start: usize,
    pub explored: u64,
}

struct Instance {
    n: usize,
    adj: Vec<u64>,
    edges: Vec<(usize, usize)>,
    /// Maximal bicliques `(A, B, covered edges)` with the edge's smaller
    /// endpoint in `A`, per edge.
    bicliques: Vec<Vec<(u64, u64, u128)>>,
    /// Edges sharing a biclique with each edge.
    compatible: Vec<u128>,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

fn bits128(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

impl Instance {
    fn new(graph: &ConflictGraph, limit: usize) -> Result<Self, SearchError> {
        let n = graph.node_count();
        let limit = limit.min(EXACT_NODE_LIMIT);
        if n > limit {
            return Err(SearchError::SizeLimit { nodes: n, limit });
        }
        let adj: Vec<u64> = (0..n).map(|u| graph.neighbors(u).to_mask().expect("fewer than 64 nodes")).collect();
        let edges = graph.edges();
        let mut edge_id = vec![vec![usize::MAX; n]; n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            edge_id[u][v] = i;
            edge_id[v][u] = i;
        }
        let covered = |a: u64, b: u64| -> u128 {
            bits(a).flat_map(|x| bits(b).map(move |y| (x, y))).fold(0u128, |acc, (x, y)| acc | 1 << edge_id[x][y])
        };
        let common = |s: u64| bits(s).fold((1u64 << n) - 1, |acc, x| acc & adj[x]);
        let bicliques = edges
            .iter()
            .map(|&(u, v)| {
                let free = adj[v] & !(1 << u);
                let mut out = Vec::new();
                // Every subset of the free part, by increasing mask.
                let mut sub = 0u64;
                loop {
                    let a = sub | 1 << u;
                    let b = common(a);
                    if common(b) == a {
                        out.push((a, b, covered(a, b)));
                    }
                    if sub == free {
                        break;
                    }
                    sub = (sub.wrapping_sub(free)) & free;
                }
                out
            })
            .collect();
        let compatible = edges
            .iter()
            .map(|&(a, b)| {
                edges.iter().enumerate().fold(0u128, |acc, (j, &(c, d))| {
                    let shares = a == c || a == d || b == c || b == d;
                    let cross = |p: usize, q: usize| adj[p] >> q & 1 == 1;
                    let ok = shares || (cross(a, d) && cross(c, b)) || (cross(a, c) && cross(b, d));
                    if ok {
                        acc | 1 << j
                    } else {
                        acc
                    }
                })
            })
            .collect();
        Ok(Self { n, adj, edges, bicliques, compatible })
    }

    fn all_edges(&self) -> u128 {
        if self.edges.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.edges.len()) - 1
        }
    }

    /// Levels needed for the uncovered edges: a set of pairwise
    /// incompatible edges needs one level each, and a clique on `m` nodes
    /// needs `ceil(log2 m)`.
    fn lower_bound(&self, uncovered: u128) -> usize {
        let mut fooling = 0u128;
        let mut size = 0;
        for e in bits128(uncovered) {
            if self.compatible[e] & fooling == 0 {
                fooling |= 1 << e;
                size += 1;
            }
        }
        let mut clique: Vec<usize> = Vec::new();
        for u in 0..self.n {
            let joins = clique.iter().all(|&w| {
                self.adj[u] >> w & 1 == 1 && {
                    let (x, y) = (w.min(u), w.max(u));
                    let e = self.edges.binary_search(&(x, y)).expect("adjacent pair is an edge");
                    uncovered >> e & 1 == 1
                }
            });
            if joins {
                clique.push(u);
            }
        }
        size.max(ceil_log2(clique.len()))
    }
}

struct Search<'a> {
    inst: &'a Instance,
    explored: u64,
    failed: HashSet<(u128, usize)>,
    chosen: Vec<(u64, u64)>,
}

impl Search<'_> {
    fn run(&mut self, uncovered: u128, remaining: usize) -> bool {
        self.explored += 1;
        if uncovered == 0 {
            return true;
        }
        if remaining == 0
            || self.failed.contains(&(uncovered, remaining))
            || self.inst.lower_bound(uncovered) > remaining
        {
            return false;
        }
        let e = uncovered.trailing_zeros() as usize;
        let mut options: Vec<(u64, u64, u128)> =
            self.inst.bicliques[e].iter().map(|&(a, b, c)| (a, b, c & uncovered)).collect();
        options.sort_by(|x, y| y.2.count_ones().cmp(&x.2.count_ones()).then((x.0, x.1).cmp(&(y.0, y.1))));
        let mut kept: Vec<(u64, u64, u128)> = Vec::new();
        for o in options {
            if !kept.iter().any(|k| o.2 & !k.2 == 0) {
                kept.push(o);
            }
        }
        for (a, b, c) in kept {
            self.chosen.push((a, b));
            if self.run(uncovered & !c, remaining - 1) {
                return true;
            }
            self.chosen.pop();
        }
        self.failed.insert((uncovered, remaining));
        false
    }

    fn cover(&self) -> BicliqueCover {
        let levels =
            self.chosen.iter().map(|&(a, b)| Level::new(NodeSet::from_mask(a), NodeSet::from_mask(b))).collect();
        BicliqueCover::new(self.inst.n, levels)
    }
}

/// Decides whether a cover of depth at most `t` exists.
pub fn min_cover_decide(graph: &ConflictGraph, t: usize) -> Result<Decision, SearchError> {
    min_cover_decide_with_limit(graph, t, EXACT_NODE_LIMIT)
}

pub fn min_cover_decide_with_limit(graph: &ConflictGraph, t: usize, limit: usize) -> Result<Decision, SearchError> {
    let inst = Instance::new(graph, limit)?;
    let mut s = Search { inst: &inst, explored: 0, failed: HashSet::new(), chosen: Vec::new() };
    let found = s.run(inst.all_edges(), t);
    Ok(Decision { cover: found.then(|| s.cover()), explored: s.explored })
}

/// Minimum-depth cover by iterative deepening from `lower_bound` (raised
/// to the instance's own bound).
pub fn min_cover_from(graph: &ConflictGraph, lower_bound: usize, limit: usize) -> Result<MinCover, SearchError> {
    let inst = Instance::new(graph, limit)?;
    let start = lower_bound.max(inst.lower_bound(inst.all_edges()));
    let mut explored = 0;
    for t in start.. {
        let mut s = Search { inst: &inst, explored: 0, failed: HashSet::new(), chosen: Vec::new() };
        let found = s.run(inst.all_edges(), t);
        explored += s.explored;
        if found {
            let cover = s.cover();
            return Ok(MinCover { depth: cover.levels.len(), cover, start, explored });
        }
    }
    unreachable!("the star cover bounds the depth")
}

/// Minimum cover of an arbitrary graph; deepening starts at 0.
pub fn min_cover(graph: &ConflictGraph) -> Result<MinCover, SearchError> {
    min_cover_from(graph, 0, EXACT_NODE_LIMIT)
}

/// Minimum cover of a strict CDC's conflict graph; deepening starts at
/// [`log_lower_bound`].
pub fn min_cover_cdc(cdc: &Cdc, limit: usize) -> Result<MinCover, SearchError> {
    min_cover_from(&cdc.conflict_graph(), log_lower_bound(cdc), limit)
}

/// The cover-existence model on `graph` with `t` levels, with the indices
/// needed to decode its solutions.
#[derive(Debug, Clone)]
pub struct FeasibilityMip {
    pub model: MipModel,
    pub node_count: usize,
    pub depth: usize,
    /// `x[r][j]` and `y[r][j]` variable indices.
    pub x: Vec<Vec<usize>>,
    pub y: Vec<Vec<usize>>,
    /// `(r, s, [z_j])` for each pair `r < s`.
    pub z: Vec<(usize, usize, Vec<usize>)>,
}

impl FeasibilityMip {
    /// `A^j = {r : x_rj = 1}`, `B^j = {r : y_rj = 1}`.
    pub fn decode(&self, values: &[Rational]) -> BicliqueCover {
        let one = |v: usize| values[v] == Rational::from_integer(1.into());
        let levels = (0..self.depth)
            .map(|j| {
                let a = (0..self.node_count).filter(|&r| one(self.x[r][j])).collect();
                let b = (0..self.node_count).filter(|&r| one(self.y[r][j])).collect();
                Level::new(a, b)
            })
            .collect();
        BicliqueCover::new(self.node_count, levels)
    }
}

/// Binary program whose solutions are exactly the covers of `graph` with
/// `t` levels: `z^{rs}_j` is 1 iff level `j` separates `r` from `s`.
pub fn feasibility_mip(graph: &ConflictGraph, t: usize) -> Result<FeasibilityMip, SearchError> {
    if t == 0 {
        return Err(SearchError::BadDepth);
    }
    let n = graph.node_count();
    let one = || Rational::from_integer(1.into());
    let neg = || Rational::from_integer((-1).into());
    let mut m = MipModel::new("covermip");
    let declare = |m: &mut MipModel, prefix: &str, role: Role| -> Result<Vec<Vec<usize>>, FormulationError> {
        (0..n).map(|r| (1..=t).map(|j| m.add_binary(format!("{prefix}_{r}_{j}"), role)).collect()).collect()
    };
    let x = declare(&mut m, "x", Role::X)?;
    let y = declare(&mut m, "y", Role::Y)?;
    let mut z = Vec::new();
    for r in 0..n {
        for s in r + 1..n {
            let zs = (1..=t).map(|j| m.add_binary(format!("z_{r}_{s}_{j}"), Role::Z)).collect::<Result<Vec<_>, _>>()?;
            z.push((r, s, zs));
        }
    }
    for (r, s, zs) in &z {
        let (r, s) = (*r, *s);
        for (j, &zj) in zs.iter().enumerate() {
            let upper = [
                ("xx", x[r][j], x[s][j]),
                ("xyr", x[r][j], y[r][j]),
                ("xys", x[s][j], y[s][j]),
                ("yy", y[r][j], y[s][j]),
            ];
            for (tag, p, q) in upper {
                m.add_constraint(
                    format!("sep_{tag}_{r}_{s}_{}", j + 1),
                    [(zj, one()), (p, neg()), (q, neg())],
                    Sense::Le,
                    Rational::from_integer(0.into()),
                )?;
            }
            for (tag, p, q) in [("xy", x[r][j], y[s][j]), ("yx", x[s][j], y[r][j])] {
                m.add_constraint(
                    format!("sep_{tag}_{r}_{s}_{}", j + 1),
                    [(zj, one()), (p, neg()), (q, neg())],
                    Sense::Ge,
                    neg(),
                )?;
            }
        }
    }
    for r in 0..n {
        for j in 0..t {
            m.add_constraint(format!("side_{r}_{}", j + 1), [(x[r][j], one()), (y[r][j], one())], Sense::Le, one())?;
        }
    }
    for (r, s, zs) in &z {
        let terms = zs.iter().map(|&v| (v, one()));
        if graph.has_edge(*r, *s) {
            m.add_constraint(format!("cover_{r}_{s}"), terms, Sense::Ge, one())?;
        } else {
            m.add_constraint(format!("exclude_{r}_{s}"), terms, Sense::Eq, Rational::from_integer(0.into()))?;
        }
    }
    Ok(FeasibilityMip { model: m, node_count: n, depth: t, x, y, z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{stars_cover, validate_cover};
    use crate::generators::{sos2, sosk};

    fn graph(n: usize, mask: u32) -> ConflictGraph {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        ConflictGraph::from_edges(n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p))
            .unwrap()
    }

    /// Plain enumeration over all level sequences of `(A, B)` with
    /// disjoint sides and `A x B` inside the edge set.
    fn brute_min_depth(g: &ConflictGraph) -> usize {
        let n = g.node_count();
        let edges = g.edges();
        let mut levels = Vec::new();
        for code in 0..3u32.pow(n as u32) {
            let (mut a, mut b, mut c) = (0u64, 0u64, code);
            for v in 0..n {
                match c % 3 {
                    1 => a |= 1 << v,
                    2 => b |= 1 << v,
                    _ => {}
                }
                c /= 3;
            }
            if bits(a).all(|x| bits(b).all(|y| g.has_edge(x, y))) {
                let cov: u64 = edges.iter().enumerate().fold(0, |acc, (i, &(u, v))| {
                    let hit = (a >> u & 1 == 1 && b >> v & 1 == 1) || (a >> v & 1 == 1 && b >> u & 1 == 1);
                    if hit {
                        acc | 1 << i
                    } else {
                        acc
                    }
                });
                levels.push(cov);
            }
        }
        let all = (1u64 << edges.len()) - 1;
        let mut reach: HashSet<u64> = [0].into();
        for d in 0.. {
            if reach.contains(&all) {
                return d;
            }
            reach = reach.iter().flat_map(|r| levels.iter().map(move |l| r | l)).collect();
        }
        unreachable!()
    }

    #[test]
    fn bounds() {
        assert_eq!(log_lower_bound(&sos2(5).unwrap()), 2);
        assert_eq!(log_lower_bound(&sosk(10, 3).unwrap()), 3);
        assert_eq!(sosk_lower_bound(6, 3), 3);
        assert_eq!(sosk_lower_bound(8, 4), 4);
    }

    #[test]
    fn sos3_six_needs_three_levels() {
        let g = sosk(6, 3).unwrap().conflict_graph();
        let d = min_cover_decide(&g, 2).unwrap();
        assert!(d.cover.is_none());
        let d3 = min_cover_decide(&g, 3).unwrap();
        validate_cover(&g, d3.cover.as_ref().unwrap()).unwrap();
        let m = min_cover(&g).unwrap();
        assert_eq!(m.depth, 3);
        assert_eq!(min_cover_cdc(&sos2(5).unwrap(), 16).unwrap().depth, 2);
        assert_eq!(min_cover(&g).unwrap(), m);
    }

    #[test]
    fn trivial_and_limits() {
        let g = ConflictGraph::new(4);
        assert_eq!(min_cover_decide(&g, 0).unwrap().cover, Some(BicliqueCover::empty(4)));
        assert!(matches!(min_cover(&ConflictGraph::new(17)), Err(SearchError::SizeLimit { .. })));
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        for n in 1..=5 {
            let pairs = n * (n - 1) / 2;
            for mask in 0..1u32 << pairs {
                let g = graph(n, mask);
                let m = min_cover(&g).unwrap();
                validate_cover(&g, &m.cover).unwrap();
                assert_eq!(m.depth, brute_min_depth(&g), "n={n} mask={mask}");
                assert!(m.depth <= stars_cover(&g).depth());
            }
        }
    }

    #[test]
    fn feasibility_model_shape_and_decoding() {
        let g = sosk(6, 3).unwrap().conflict_graph();
        let f = feasibility_mip(&g, 2).unwrap();
        assert_eq!(f.model.binaries().count(), 54);
        let zero = vec![Rational::from_integer(0.into()); f.model.variables().len()];
        assert_eq!(f.decode(&zero).depth(), 0);
        assert!(!f.model.is_satisfied(&zero));
        let empty = feasibility_mip(&ConflictGraph::new(3), 1).unwrap();
        let zero = vec![Rational::from_integer(0.into()); empty.model.variables().len()];
        assert!(empty.model.is_satisfied(&zero));
        assert_eq!(feasibility_mip(&g, 0).unwrap_err(), SearchError::BadDepth);
    }
}
