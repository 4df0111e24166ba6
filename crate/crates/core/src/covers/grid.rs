//! Covers for grid triangulations.
//!
//! Grid point `(x, y)` (1-based) is node `(x - 1) * N + (y - 1)`. Pairs more
//! than one step apart in some coordinate are always in conflict and are
//! covered by Gray levels along each axis. What remains are the diagonals
//! of unit cells that the triangulation does not use.

use super::chain::chain_bit_sides;
use super::gray::{ceil_log2, GrayCode};
use super::parity::{single_biclique_test, BicliqueTest};
use super::{BicliqueCover, CoverError, Level};
use crate::cdc::ConflictGraph;
use crate::generators::{triangulation_to_cdc, Diagonal, GridTriangulation};
use crate::nodeset::NodeSet;

/// Gray levels separating grid points by their first (`axis == 0`) or
/// second coordinate. Level `j` puts in `A` the points whose two incident
/// segments have bit `j` set and in `B` those where it is clear.
fn axis_levels(m: usize, n: usize, axis: usize) -> Result<Vec<Level>, CoverError> {
    let len = if axis == 0 { m } else { n };
    if len < 3 {
        return Ok(Vec::new());
    }
    let code = GrayCode::reflected(len - 1)?;
    let coord = |p: usize| if axis == 0 { p / n } else { p % n };
    Ok(chain_bit_sides(len, &code)
        .into_iter()
        .map(|(zeros, ones)| {
            let lift = |s: &NodeSet| -> NodeSet { (0..m * n).filter(|&p| s.contains(coord(p))).collect() };
            Level::new(lift(&ones), lift(&zeros))
        })
        .collect())
}

const DIAGONALS: [(i64, i64); 4] = [(-1, -1), (-1, 1), (1, -1), (1, 1)];

/// Stencil level for offset `u` in `{0,1,2}^2`: `A` holds the grid points
/// congruent to `u` modulo 3 and `B` the diagonal neighbours of those
/// points that they conflict with.
pub fn stitch_stars_grid(graph: &ConflictGraph, m: usize, n: usize, u: (usize, usize)) -> Result<Level, CoverError> {
    if u.0 > 2 || u.1 > 2 {
        return Err(CoverError::BadParameter(format!("offset {u:?} outside {{0,1,2}}^2")));
    }
    if graph.node_count() != m * n {
        return Err(CoverError::NodeCountMismatch { expected: m * n, found: graph.node_count() });
    }
    let idx = |x: i64, y: i64| ((x - 1) as usize) * n + (y - 1) as usize;
    let inside = |x: i64, y: i64| (1..=m as i64).contains(&x) && (1..=n as i64).contains(&y);
    let mut a = NodeSet::new();
    let mut b = NodeSet::new();
    for x in (1..=m as i64).filter(|x| x.rem_euclid(3) as usize == u.0) {
        for y in (1..=n as i64).filter(|y| y.rem_euclid(3) as usize == u.1) {
            let w = idx(x, y);
            a.insert(w);
            for (dx, dy) in DIAGONALS {
                let (x2, y2) = (x + dx, y + dy);
                if inside(x2, y2) && graph.has_edge(w, idx(x2, y2)) {
                    b.insert(idx(x2, y2));
                }
            }
        }
    }
    Ok(Level::new(a, b))
}

/// Cover with `ceil(log2(M-1)) + ceil(log2(N-1)) + 9` levels: Gray levels
/// along each axis followed by the nine stencil levels. Diagonal conflicts
/// are covered only by the stencil levels.
pub fn triangulation_cover(t: &GridTriangulation) -> Result<BicliqueCover, CoverError> {
    let graph = triangulation_to_cdc(t)?.conflict_graph();
    let (m, n) = (t.m, t.n);
    let mut levels = axis_levels(m, n, 0)?;
    levels.extend(axis_levels(m, n, 1)?);
    for u0 in 0..3 {
        for u1 in 0..3 {
            levels.push(stitch_stars_grid(&graph, m, n, (u0, u1))?);
        }
    }
    debug_assert_eq!(levels.len(), ceil_log2(m - 1) + ceil_log2(n - 1) + 9);
    Ok(BicliqueCover::new(m * n, levels))
}

/// Colour class of a grid point: `Even` when `x + y` is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    Even,
    Odd,
}

impl ParityClass {
    pub const BOTH: [ParityClass; 2] = [ParityClass::Even, ParityClass::Odd];

    fn of(x: i64, y: i64) -> Self {
        if (x + y) % 2 == 0 {
            ParityClass::Even
        } else {
            ParityClass::Odd
        }
    }

    pub fn other(self) -> Self {
        match self {
            ParityClass::Even => ParityClass::Odd,
            ParityClass::Odd => ParityClass::Even,
        }
    }
}

/// Per-class data of the chromatic construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    pub class: ParityClass,
    /// Conflicting diagonals inside the class, as node pairs.
    pub conflicts: Vec<(usize, usize)>,
    /// `None` when there are no conflicting diagonals in the class.
    pub test: Option<BicliqueTest>,
    /// Degree condition on the other class that guarantees a colouring.
    pub even_degree_condition: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChromaticOutcome {
    /// Present when every class admits a colouring.
    pub cover: Option<BicliqueCover>,
    pub classes: [ClassReport; 2],
}

/// Unordered same-class diagonal pairs `(w, w + v)` inside the grid.
fn class_diagonals(t: &GridTriangulation, class: ParityClass) -> Vec<((i64, i64), (i64, i64))> {
    let mut out = Vec::new();
    for x in 1..t.m as i64 {
        for y in 1..t.n as i64 {
            for (p, q) in [((x, y), (x + 1, y + 1)), ((x + 1, y), (x, y + 1))] {
                if ParityClass::of(p.0, p.1) == class {
                    out.push((p, q));
                }
            }
        }
    }
    out
}

fn conflicting_diagonals(t: &GridTriangulation, graph: &ConflictGraph, class: ParityClass) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = class_diagonals(t, class)
        .into_iter()
        .map(|(p, q)| {
            let (i, j) = (t.index(p), t.index(q));
            (i.min(j), i.max(j))
        })
        .filter(|&(i, j)| graph.has_edge(i, j))
        .collect();
    out.sort_unstable();
    out
}

/// Number of cell diagonals used by the triangulation that end at `p`.
pub fn used_diagonal_degree(t: &GridTriangulation, graph: &ConflictGraph, p: (i64, i64)) -> usize {
    DIAGONALS
        .iter()
        .map(|&(dx, dy)| (p.0 + dx, p.1 + dy))
        .filter(|&q| t.contains(q) && !graph.has_edge(t.index(p), t.index(q)))
        .count()
}

/// Whether every interior point of class `r` ends an even number of used
/// diagonals. Around such a point the four diagonals of the other class
/// form a 4-cycle with an even number of conflicts, so when the condition
/// holds the other class admits a colouring.
pub fn even_degree_condition(t: &GridTriangulation, r: ParityClass) -> Result<bool, CoverError> {
    let graph = triangulation_to_cdc(t)?.conflict_graph();
    Ok(even_degree_condition_on(t, &graph, r))
}

fn even_degree_condition_on(t: &GridTriangulation, graph: &ConflictGraph, r: ParityClass) -> bool {
    (2..t.m as i64).all(|x| {
        (2..t.n as i64)
            .filter(|&y| ParityClass::of(x, y) == r)
            .all(|y| used_diagonal_degree(t, graph, (x, y)).is_multiple_of(2))
    })
}

/// A 3x4 triangulation where point (2,3) ends a single used diagonal, so
/// the degree condition fails for the even class, yet both classes can be
/// coloured.
pub fn odd_degree_example() -> GridTriangulation {
    GridTriangulation::from_diagonals(3, 4, |x, y| if (x, y) == (1, 3) { Diagonal::Rising } else { Diagonal::Falling })
}

/// Gray levels along both axes plus at most one level per colour class,
/// obtained by 2-colouring each class so that its conflicting diagonals
/// join opposite colours and its used diagonals join equal colours.
pub fn chromatic_triangulation_cover(t: &GridTriangulation) -> Result<ChromaticOutcome, CoverError> {
    let graph = triangulation_to_cdc(t)?.conflict_graph();
    let (m, n) = (t.m, t.n);
    let mut levels = axis_levels(m, n, 0)?;
    levels.extend(axis_levels(m, n, 1)?);
    let mut ok = true;
    let reports = ParityClass::BOTH.map(|class| {
        let conflicts = conflicting_diagonals(t, &graph, class);
        let test = if conflicts.is_empty() {
            None
        } else {
            Some(single_biclique_test(&graph, &conflicts).expect("diagonals are conflict edges"))
        };
        match &test {
            Some(BicliqueTest::Biclique(level)) => levels.push(level.clone()),
            Some(BicliqueTest::OddCycle(_)) => ok = false,
            None => {}
        }
        ClassReport {
            class,
            conflicts,
            test,
            even_degree_condition: even_degree_condition_on(t, &graph, class.other()),
        }
    });
    Ok(ChromaticOutcome { cover: ok.then(|| BicliqueCover::new(m * n, levels)), classes: reports })
}
