#![allow(dead_code)]

use disjunct::generators::{cardinality, multilinear_grid, sosk, triangulation_to_cdc, Diagonal, GridTriangulation};
use disjunct::geometry::{partition_to_cdc, square_ring, triangle_ring};
use disjunct::{Cdc, NodeSet};

/// Every triangulation of an `m x n` grid, one per diagonal pattern.
pub fn all_triangulations(m: usize, n: usize) -> Vec<GridTriangulation> {
    let cells = (m - 1) * (n - 1);
    (0..1u64 << cells)
        .map(|mask| {
            GridTriangulation::from_diagonals(m, n, |x, y| {
                let cell = (x as usize - 1) * (n - 1) + (y as usize - 1);
                if mask >> cell & 1 == 0 {
                    Diagonal::Rising
                } else {
                    Diagonal::Falling
                }
            })
        })
        .collect()
}

pub fn grid_shapes(max_nodes: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(dims) = stack.pop() {
        let size: usize = dims.iter().product();
        if dims.len() >= 2 {
            out.push(dims.clone());
        }
        if dims.len() < max_len {
            for d in 2..=max_nodes / size {
                let mut next = dims.clone();
                next.push(d);
                stack.push(next);
            }
        }
    }
    out.sort();
    out
}

/// Strict CDCs from every generator with at most `max_nodes` ground
/// elements. Triangulations with more than `max_patterns` diagonal
/// patterns are skipped.
pub fn corpus(max_nodes: usize, max_patterns: usize) -> Vec<(String, Cdc)> {
    let mut out = Vec::new();
    for n in 2..=max_nodes {
        for k in 1..=n {
            out.push((format!("sosk({n},{k})"), sosk(n, k).unwrap()));
        }
        for l in 1..n {
            out.push((format!("cardinality({n},{l})"), cardinality(n, l).unwrap()));
        }
    }
    for dims in grid_shapes(max_nodes, 3) {
        out.push((format!("multilinear{dims:?}"), multilinear_grid(&dims).unwrap()));
    }
    for m in 2..=max_nodes {
        for n in 2..=max_nodes / m {
            if 1usize << ((m - 1) * (n - 1)) > max_patterns {
                continue;
            }
            for (i, t) in all_triangulations(m, n).iter().enumerate() {
                out.push((format!("triangulation({m},{n})#{i}"), triangulation_to_cdc(t).unwrap()));
            }
        }
    }
    for (name, p) in [("square_ring", square_ring()), ("triangle_ring", triangle_ring())] {
        let c = partition_to_cdc(&p).unwrap();
        if c.labels().len() <= max_nodes {
            out.push((name.to_string(), c));
        }
    }
    out
}

pub fn set(items: &[usize]) -> NodeSet {
    items.iter().copied().collect()
}

/// 1-based labels to a 0-based set.
pub fn set1(items: &[usize]) -> NodeSet {
    items.iter().map(|i| i - 1).collect()
}
