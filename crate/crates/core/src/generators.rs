//! Standard CDC families and grid triangulations.
//!
//! Chain families label their elements `"1".."N"`. Lattice families label a
//! point by its comma-joined 1-based coordinates, e.g. `"2,3"`, and order the
//! ground set row-major (first coordinate slowest).

use std::collections::HashMap;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cdc::{Cdc, CdcError};
use crate::nodeset::NodeSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("invalid triangulation: {0:?}")]
    InvalidTriangulation(Vec<TriangulationViolation>),
    #[error(transparent)]
    Cdc(#[from] CdcError),
}

fn bad(msg: impl Into<String>) -> GeneratorError {
    GeneratorError::BadParameter(msg.into())
}

fn chain_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// `N` points in a line where only two consecutive ones may be nonzero.
pub fn sos2(n: usize) -> Result<Cdc, GeneratorError> {
    if n < 2 {
        return Err(bad(format!("sos2 needs N >= 2, got {n}")));
    }
    sosk(n, 2)
}

/// Windows of `k` consecutive points out of `N`.
pub fn sosk(n: usize, k: usize) -> Result<Cdc, GeneratorError> {
    if k == 0 || k > n {
        return Err(bad(format!("sosk needs 1 <= k <= N, got N={n} k={k}")));
    }
    let sets = (0..=n - k).map(|s| NodeSet::range(s, s + k)).collect();
    Ok(Cdc::from_index_sets(chain_labels(n), sets)?)
}

/// All `l`-element subsets of `n` points.
pub fn cardinality(n: usize, l: usize) -> Result<Cdc, GeneratorError> {
    if l == 0 || l > n || n > 63 {
        return Err(bad(format!("cardinality needs 1 <= l <= n <= 63, got n={n} l={l}")));
    }
    let mut sets = Vec::new();
    let mut comb: Vec<usize> = (0..l).collect();
    loop {
        sets.push(comb.iter().copied().collect());
        let Some(i) = (0..l).rev().find(|&i| comb[i] < n - l + i) else {
            break;
        };
        comb[i] += 1;
        for j in i + 1..l {
            comb[j] = comb[j - 1] + 1;
        }
    }
    Ok(Cdc::from_index_sets(chain_labels(n), sets)?)
}

/// Row-major enumeration of the lattice `[1,d_1] x ... x [1,d_eta]`.
pub fn lattice_points(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=d).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Row-major index of a 1-based lattice point.
pub fn lattice_index(dims: &[usize], point: &[usize]) -> usize {
    dims.iter().zip(point).fold(0, |acc, (&d, &x)| acc * d + (x - 1))
}

pub fn point_label(point: &[usize]) -> String {
    point.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Lattice points where the feasible sets are the unit boxes.
pub fn multilinear_grid(dims: &[usize]) -> Result<Cdc, GeneratorError> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(bad(format!("multilinear grid needs every extent >= 2, got {dims:?}")));
    }
    let points = lattice_points(dims);
    let labels = points.iter().map(|p| point_label(p)).collect();
    let cells = lattice_points(&dims.iter().map(|d| d - 1).collect::<Vec<_>>());
    let sets = cells
        .iter()
        .map(|c| {
            lattice_points(&vec![2; dims.len()])
                .iter()
                .map(|off| {
                    let p: Vec<usize> = c.iter().zip(off).map(|(a, o)| a + o - 1).collect();
                    lattice_index(dims, &p)
                })
                .collect()
        })
        .collect();
    Ok(Cdc::from_index_sets(labels, sets)?)
}

pub type GridPoint = (i64, i64);

/// Triangles with vertices on the lattice `[1,M] x [1,N]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridTriangulation {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub triangles: Vec<Vec<GridPoint>>,
}

/// Which diagonal splits a unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagonal {
    /// From the lower-left to the upper-right corner.
    Rising,
    /// From the upper-left to the lower-right corner.
    Falling,
}

impl GridTriangulation {
    /// Builds the triangulation that splits cell `(x, y)` (its lower-left
    /// corner, 1-based) along `diagonal(x, y)`.
    pub fn from_diagonals(m: usize, n: usize, mut diagonal: impl FnMut(i64, i64) -> Diagonal) -> Self {
        let mut triangles = Vec::with_capacity(2 * (m - 1) * (n - 1));
        for x in 1..m as i64 {
            for y in 1..n as i64 {
                let (ll, lr, ul, ur) = ((x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1));
                match diagonal(x, y) {
                    Diagonal::Rising => {
                        triangles.push(vec![ll, lr, ur]);
                        triangles.push(vec![ll, ul, ur]);
                    }
                    Diagonal::Falling => {
                        triangles.push(vec![ll, lr, ul]);
                        triangles.push(vec![lr, ul, ur]);
                    }
                }
            }
        }
        Self { m, n, triangles }
    }

    pub fn node_count(&self) -> usize {
        self.m * self.n
    }

    /// Row-major index of a 1-based grid point.
    pub fn index(&self, p: GridPoint) -> usize {
        (p.0 as usize - 1) * self.n + (p.1 as usize - 1)
    }

    pub fn point(&self, index: usize) -> GridPoint {
        ((index / self.n) as i64 + 1, (index % self.n) as i64 + 1)
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        (1..=self.m as i64).contains(&p.0) && (1..=self.n as i64).contains(&p.1)
    }

    /// Diagonal used in each cell, keyed by the lower-left corner.
    pub fn diagonals(&self) -> Result<HashMap<GridPoint, Diagonal>, GeneratorError> {
        validate_triangulation(self).map_err(GeneratorError::InvalidTriangulation)?;
        let mut out = HashMap::new();
        for t in &self.triangles {
            let x = t.iter().map(|p| p.0).min().unwrap_or(0);
            let y = t.iter().map(|p| p.1).min().unwrap_or(0);
            let rising = t.contains(&(x, y)) && t.contains(&(x + 1, y + 1));
            out.insert((x, y), if rising { Diagonal::Rising } else { Diagonal::Falling });
        }
        Ok(out)
    }
}

/// Alternating pattern where every cell is split through its corners with
/// even coordinate sum. Requires odd `M` and `N`.
pub fn union_jack(m: usize, n: usize) -> Result<GridTriangulation, GeneratorError> {
    if m < 3 || n < 3 || m.is_multiple_of(2) || n.is_multiple_of(2) {
        return Err(bad(format!("union jack needs odd M, N >= 3, got {m}x{n}")));
    }
    Ok(GridTriangulation::from_diagonals(
        m,
        n,
        |x, y| {
            if (x + y) % 2 == 0 {
                Diagonal::Rising
            } else {
                Diagonal::Falling
            }
        },
    ))
}

/// Every cell split from lower-left to upper-right.
pub fn k1(m: usize, n: usize) -> Result<GridTriangulation, GeneratorError> {
    check_grid(m, n)?;
    Ok(GridTriangulation::from_diagonals(m, n, |_, _| Diagonal::Rising))
}

/// Each cell's diagonal is drawn from xoshiro256** seeded with `seed`,
/// one draw per cell in row-major order, top bit deciding.
pub fn random_triangulation(m: usize, n: usize, seed: u64) -> Result<GridTriangulation, GeneratorError> {
    check_grid(m, n)?;
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    Ok(GridTriangulation::from_diagonals(m, n, |_, _| {
        if rng.next_u64() >> 63 == 0 {
            Diagonal::Rising
        } else {
            Diagonal::Falling
        }
    }))
}

fn check_grid(m: usize, n: usize) -> Result<(), GeneratorError> {
    if m < 2 || n < 2 {
        return Err(bad(format!("grid needs M, N >= 2, got {m}x{n}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriangulationViolation {
    BadDimensions,
    VertexCount {
        triangle: usize,
    },
    OutOfGrid {
        triangle: usize,
    },
    RepeatedVertex {
        triangle: usize,
    },
    /// Two vertices are more than one step apart in some coordinate.
    NotRegularGrid {
        triangle: usize,
    },
    Overlap {
        first: usize,
        second: usize,
    },
    Gap {
        cell: GridPoint,
    },
}

/// Checks that the triangles are unit lattice triangles that partition the
/// rectangle `[1,M] x [1,N]`.
pub fn validate_triangulation(t: &GridTriangulation) -> Result<(), Vec<TriangulationViolation>> {
    use TriangulationViolation::*;
    if t.m < 2 || t.n < 2 {
        return Err(vec![BadDimensions]);
    }
    let mut errors = Vec::new();
    let mut cells: HashMap<GridPoint, Vec<(usize, GridPoint)>> = HashMap::new();
    for (i, tri) in t.triangles.iter().enumerate() {
        if tri.len() != 3 {
            errors.push(VertexCount { triangle: i });
            continue;
        }
        if tri.iter().any(|&p| !t.contains(p)) {
            errors.push(OutOfGrid { triangle: i });
            continue;
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            errors.push(RepeatedVertex { triangle: i });
            continue;
        }
        let (x0, x1) = (tri.iter().map(|p| p.0).min().unwrap(), tri.iter().map(|p| p.0).max().unwrap());
        let (y0, y1) = (tri.iter().map(|p| p.1).min().unwrap(), tri.iter().map(|p| p.1).max().unwrap());
        if x1 - x0 != 1 || y1 - y0 != 1 {
            errors.push(NotRegularGrid { triangle: i });
            continue;
        }
        let omitted = [(x0, y0), (x0 + 1, y0), (x0, y0 + 1), (x0 + 1, y0 + 1)]
            .into_iter()
            .find(|c| !tri.contains(c))
            .expect("three distinct corners of a cell leave one out");
        cells.entry((x0, y0)).or_default().push((i, omitted));
    }
    for x in 1..t.m as i64 {
        for y in 1..t.n as i64 {
            let tris = cells.get(&(x, y)).map(Vec::as_slice).unwrap_or(&[]);
            for (a, &(i, oi)) in tris.iter().enumerate() {
                for &(j, oj) in &tris[a + 1..] {
                    let opposite = oi.0 != oj.0 && oi.1 != oj.1;
                    if !opposite {
                        errors.push(Overlap { first: i, second: j });
                    }
                }
            }
            if tris.len() < 2 {
                errors.push(Gap { cell: (x, y) });
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// CDC whose feasible sets are the triangles, labelled `"x,y"` row-major.
pub fn triangulation_to_cdc(t: &GridTriangulation) -> Result<Cdc, GeneratorError> {
    validate_triangulation(t).map_err(GeneratorError::InvalidTriangulation)?;
    let labels = (0..t.node_count())
        .map(|i| {
            let (x, y) = t.point(i);
            format!("{x},{y}")
        })
        .collect();
    let sets = t.triangles.iter().map(|tri| tri.iter().map(|&p| t.index(p)).collect()).collect();
    Ok(Cdc::from_index_sets(labels, sets)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sos2_sets_are_consecutive_pairs() {
        let c = sos2(4).unwrap();
        assert_eq!(c.labels(), ["1", "2", "3", "4"]);
        let s: Vec<Vec<usize>> = c.sets().iter().map(NodeSet::to_vec).collect();
        assert_eq!(s, vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
        assert!(sos2(1).is_err());
        assert!(sosk(3, 4).is_err());
    }

    #[test]
    fn cardinality_counts() {
        assert_eq!(cardinality(6, 3).unwrap().sets().len(), 20);
        assert_eq!(cardinality(5, 5).unwrap().sets().len(), 1);
        assert_eq!(cardinality(4, 1).unwrap().sets().len(), 4);
    }

    #[test]
    fn multilinear_labels_are_row_major() {
        let c = multilinear_grid(&[2, 3]).unwrap();
        assert_eq!(c.labels(), ["1,1", "1,2", "1,3", "2,1", "2,2", "2,3"]);
        let s: Vec<Vec<usize>> = c.sets().iter().map(NodeSet::to_vec).collect();
        assert_eq!(s, vec![vec![0, 1, 3, 4], vec![1, 2, 4, 5]]);
        assert_eq!(multilinear_grid(&[3, 3, 3]).unwrap().sets().len(), 8);
    }

    #[test]
    fn union_jack_3x3_is_a_star_around_the_centre() {
        let t = union_jack(3, 3).unwrap();
        assert_eq!(t.triangles.len(), 8);
        assert!(t.triangles.iter().all(|tri| tri.contains(&(2, 2))));
        assert!(union_jack(4, 3).is_err());
        validate_triangulation(&t).unwrap();
    }

    #[test]
    fn random_triangulation_is_reproducible() {
        let a = random_triangulation(6, 6, 7).unwrap();
        assert_eq!(a, random_triangulation(6, 6, 7).unwrap());
        assert_ne!(a, random_triangulation(6, 6, 8).unwrap());
        validate_triangulation(&a).unwrap();
    }

    #[test]
    fn validation_reports_problems() {
        use TriangulationViolation::*;
        let mut t = k1(3, 3).unwrap();
        t.triangles.pop();
        assert_eq!(validate_triangulation(&t), Err(vec![Gap { cell: (2, 2) }]));
        t.triangles.push(vec![(2, 2), (3, 2), (2, 3)]);
        assert_eq!(validate_triangulation(&t), Err(vec![Overlap { first: 6, second: 7 }]));
        t.triangles[7] = vec![(1, 1), (3, 3), (2, 2)];
        assert!(validate_triangulation(&t).unwrap_err().contains(&NotRegularGrid { triangle: 7 }));
        t.triangles[7] = vec![(1, 1), (1, 1), (2, 2)];
        assert!(validate_triangulation(&t).unwrap_err().contains(&RepeatedVertex { triangle: 7 }));
        t.triangles[7] = vec![(3, 3), (4, 3), (3, 4)];
        assert!(validate_triangulation(&t).unwrap_err().contains(&OutOfGrid { triangle: 7 }));
    }

    #[test]
    fn triangulation_cdc_labels() {
        let c = triangulation_to_cdc(&k1(2, 3).unwrap()).unwrap();
        assert_eq!(c.labels(), ["1,1", "1,2", "1,3", "2,1", "2,2", "2,3"]);
        assert_eq!(c.sets().len(), 4);
    }
}
