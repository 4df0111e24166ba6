//! Covers for chains, lattices and windowed chains.
//!
//! Node `i` (0-based) of a chain is the point labelled `i + 1`.

use super::gray::{ceil_log2, GrayCode};
use super::{BicliqueCover, CoverError, Level};
use crate::cdc::ConflictGraph;
use crate::nodeset::NodeSet;

fn bad(msg: String) -> CoverError {
    CoverError::BadParameter(msg)
}

/// One star `{u} x {v > u adjacent to u}` per node that has such a `v`.
pub fn stars_cover(graph: &ConflictGraph) -> BicliqueCover {
    let n = graph.node_count();
    let levels = (0..n)
        .filter_map(|u| {
            let b: NodeSet = graph.neighbors(u).iter().filter(|&v| v > u).collect();
            (!b.is_empty()).then(|| Level::new(NodeSet::singleton(u), b))
        })
        .collect();
    BicliqueCover::new(n, levels)
}

/// Per bit of the code: the chain nodes whose two incident segments both
/// have that bit clear, and those whose two segments both have it set.
/// Segment `s` joins nodes `s - 1` and `s` and carries word `s - 1`; the end
/// nodes see their single segment twice.
pub(super) fn chain_bit_sides(n: usize, code: &GrayCode) -> Vec<(NodeSet, NodeSet)> {
    debug_assert_eq!(code.len() + 1, n);
    (0..code.width)
        .map(|j| {
            let mut zeros = NodeSet::new();
            let mut ones = NodeSet::new();
            for node in 0..n {
                let left = code.bit(node.saturating_sub(1).min(n - 2), j);
                let right = code.bit(node.min(n - 2), j);
                match (left, right) {
                    (false, false) => {
                        zeros.insert(node);
                    }
                    (true, true) => {
                        ones.insert(node);
                    }
                    _ => {}
                }
            }
            (zeros, ones)
        })
        .collect()
}

/// Cover of the SOS2 conflict graph on `n` nodes built from a Gray code on
/// its `n - 1` segments: level `j` pairs the nodes where bit `j` stays 0
/// with those where it stays 1.
pub fn sos2_cover_with_code(n: usize, code: &GrayCode) -> Result<BicliqueCover, CoverError> {
    if n < 3 || code.len() != n - 1 || !code.is_gray() {
        return Err(bad(format!("need a Gray code on {} words for {n} nodes", n.saturating_sub(1))));
    }
    let levels = chain_bit_sides(n, code).into_iter().map(|(a, b)| Level::new(a, b)).collect();
    Ok(BicliqueCover::new(n, levels))
}

/// Depth `ceil(log2(n - 1))` cover of the SOS2 conflict graph.
pub fn sos2_gray_cover(n: usize) -> Result<BicliqueCover, CoverError> {
    if n < 3 {
        return Err(bad(format!("gray cover needs N >= 3, got {n}")));
    }
    sos2_cover_with_code(n, &GrayCode::reflected(n - 1)?)
}

/// Lifts a cover of the SOS2 graph on `m + 1` nodes to one on `2m + 1`
/// nodes by mirroring every level about the middle node and appending the
/// level that separates the two halves.
pub fn double_cover(cover: &BicliqueCover) -> Result<BicliqueCover, CoverError> {
    if cover.node_count < 2 {
        return Err(bad(format!("doubling needs at least 2 nodes, got {}", cover.node_count)));
    }
    let m = cover.node_count - 1;
    let mirror = |s: &NodeSet| -> NodeSet { s.iter().flat_map(|u| [u, 2 * m - u]).collect() };
    let mut levels: Vec<Level> = cover.levels.iter().map(|l| Level::new(mirror(&l.a), mirror(&l.b))).collect();
    levels.push(Level::new(NodeSet::range(0, m), NodeSet::range(m + 1, 2 * m + 1)));
    Ok(BicliqueCover::new(2 * m + 1, levels))
}

/// Cover of the disjunctive product of graphs given one cover per factor.
/// Nodes of the product are flattened row-major with the first factor
/// slowest; each factor level `(A, B)` becomes the slab pair
/// `(J_1 x .. x A x .. x J_eta, J_1 x .. x B x .. x J_eta)`.
pub fn product_cover(covers: &[BicliqueCover], sizes: &[usize]) -> Result<BicliqueCover, CoverError> {
    if covers.len() != sizes.len() || sizes.is_empty() {
        return Err(bad(format!("{} covers for {} factors", covers.len(), sizes.len())));
    }
    for (c, &d) in covers.iter().zip(sizes) {
        if c.node_count != d {
            return Err(CoverError::NodeCountMismatch { expected: d, found: c.node_count });
        }
    }
    let total: usize = sizes.iter().product();
    let stride = |i: usize| -> usize { sizes[i + 1..].iter().product() };
    let mut levels = Vec::new();
    for (i, c) in covers.iter().enumerate() {
        let s = stride(i);
        let slab = |side: &NodeSet| -> NodeSet { (0..total).filter(|&p| side.contains(p / s % sizes[i])).collect() };
        levels.extend(c.levels.iter().map(|l| Level::new(slab(&l.a), slab(&l.b))));
    }
    Ok(BicliqueCover::new(total, levels))
}

/// Product of Gray covers for the unit-box grid with the given extents;
/// depth `sum ceil(log2(d_i - 1))`.
pub fn multilinear_cover(dims: &[usize]) -> Result<BicliqueCover, CoverError> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(bad(format!("multilinear cover needs extents >= 2, got {dims:?}")));
    }
    let covers = dims
        .iter()
        .map(|&d| if d == 2 { Ok(BicliqueCover::empty(2)) } else { sos2_gray_cover(d) })
        .collect::<Result<Vec<_>, _>>()?;
    product_cover(&covers, dims)
}

/// Concatenation of covers on a common node set.
pub fn union_cover(node_count: usize, covers: &[BicliqueCover]) -> Result<BicliqueCover, CoverError> {
    let mut levels = Vec::new();
    for c in covers {
        if c.node_count != node_count {
            return Err(CoverError::NodeCountMismatch { expected: node_count, found: c.node_count });
        }
        levels.extend(c.levels.iter().cloned());
    }
    Ok(BicliqueCover::new(node_count, levels))
}

/// Depth `N/2` cover of the SOSk conflict graph for even `N` and
/// `k <= N/2`. Level `j` (1-based) takes `A = {1..j} u {j+N/2+k..N}` and
/// for `B` every node outside `A` that conflicts with all of `A`, which
/// contains `{j+k..j+N/2}`.
pub fn sosk_half_cover(n: usize, k: usize) -> Result<BicliqueCover, CoverError> {
    if !n.is_multiple_of(2) || k == 0 || 2 * k > n {
        return Err(bad(format!("half cover needs even N and 1 <= k <= N/2, got N={n} k={k}")));
    }
    let h = n / 2;
    let levels = (1..=h)
        .map(|j| {
            let a: NodeSet = (1..=j).chain(j + h + k..=n).map(|t| t - 1).collect();
            let b: NodeSet = (1..=n)
                .filter(|&t| !a.contains(t - 1) && a.iter().all(|u| (u + 1).abs_diff(t) >= k))
                .map(|t| t - 1)
                .collect();
            Level::new(a, b)
        })
        .collect();
    Ok(BicliqueCover::new(n, levels))
}

/// Cover of the SOSk conflict graph with depth at most
/// `ceil(log2(ceil(N/k) - 1)) + 3k`.
///
/// The chain is padded to a multiple of `k` and cut into blocks of `k`. A
/// Gray cover of the block chain separates nodes whose blocks are two or
/// more apart; `3k` stencil levels pair each node `w` with the window
/// `[w + k, w + 2k]`. Padding is removed at the end; levels it empties are
/// kept as trivial levels.
pub fn sosk_cover(n: usize, k: usize) -> Result<BicliqueCover, CoverError> {
    if k == 0 || k > n {
        return Err(bad(format!("sosk cover needs 1 <= k <= N, got N={n} k={k}")));
    }
    let blocks = n.div_ceil(k);
    let padded = blocks * k;
    let mut levels = Vec::new();
    if blocks >= 3 {
        let code = GrayCode::reflected(blocks - 1)?;
        for (za, zb) in chain_bit_sides(blocks, &code) {
            let expand = |s: &NodeSet| -> NodeSet { s.iter().flat_map(|blk| blk * k..(blk + 1) * k).collect() };
            levels.push(Level::new(expand(&za), expand(&zb)));
        }
    }
    let reps = padded.div_ceil(3 * k);
    for jp in 1..=3 * k {
        let mut a = NodeSet::new();
        let mut b = NodeSet::new();
        for i in 1..=reps {
            let w = jp + (3 * i - 3) * k;
            if w <= padded {
                a.insert(w - 1);
            }
            let lo = jp + (3 * i - 2) * k;
            let hi = (jp + (3 * i - 1) * k).min(padded);
            b.extend((lo..=hi).map(|t| t - 1));
        }
        levels.push(Level::new(a, b));
    }
    let keep = NodeSet::range(0, n);
    let levels = levels.into_iter().map(|l| Level::new(l.a.intersection(&keep), l.b.intersection(&keep))).collect();
    Ok(BicliqueCover::new(n, levels))
}

/// `ceil(log2(ceil(N/k) - 1)) + 3k`, the depth bound of [`sosk_cover`].
pub fn sosk_cover_bound(n: usize, k: usize) -> usize {
    let blocks = n.div_ceil(k);
    let gray = if blocks >= 3 { ceil_log2(blocks - 1) } else { 0 };
    gray + 3 * k
}
