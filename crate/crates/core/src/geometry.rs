//! Polyhedral partitions in the plane with exact rational coordinates.
//!
//! A partition is a list of convex polygons with pairwise disjoint interiors
//! such that no polygon vertex lies on another polygon except as one of its
//! vertices. Lowering a partition gives a CDC over the distinct vertices
//! whose feasible sets are the polygons' vertex sets; its conflict
//! hypergraph never has rank above 3.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde_json::Value;
use thiserror::Error;

use crate::cdc::{Cdc, CdcError};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
    #[error("malformed partition: {0}")]
    Format(String),
    #[error("invalid partition: {0:?}")]
    Invalid(Vec<PartitionViolation>),
    #[error("conflict hypergraph has rank at least {at_least}, above 3")]
    TheoremViolation { at_least: usize },
    #[error(transparent)]
    Cdc(#[from] CdcError),
}

/// Parses `"p/q"`, integers, and finite decimals such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, GeometryError> {
    let err = || GeometryError::Parse(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Self::new(Rational::from_integer(x.into()), Rational::from_integer(y.into()))
    }

    /// `"x,y"` with each coordinate written as an integer or `p/q`.
    pub fn label(&self) -> String {
        format!("{},{}", render_rational(&self.x), render_rational(&self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

/// Twice the signed area of `(a, b, c)`; positive for a left turn.
fn cross(a: &Point, b: &Point, c: &Point) -> Rational {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarPartition {
    pub polygons: Vec<Vec<Point>>,
}

impl PlanarPartition {
    pub fn new(polygons: Vec<Vec<Point>>) -> Self {
        Self { polygons }
    }

    /// Reads `{"polygons": [[[x, y], ...], ...]}` where coordinates are
    /// strings or JSON numbers.
    pub fn from_json(v: &Value) -> Result<Self, GeometryError> {
        let fmt_err = |m: &str| GeometryError::Format(m.to_string());
        let polys = v.get("polygons").and_then(Value::as_array).ok_or_else(|| fmt_err("missing \"polygons\" array"))?;
        let coord = |c: &Value| -> Result<Rational, GeometryError> {
            match c {
                Value::String(s) => parse_rational(s),
                Value::Number(n) => parse_rational(&n.to_string()),
                _ => Err(fmt_err("coordinate must be a string or number")),
            }
        };
        let polygons = polys
            .iter()
            .map(|p| {
                p.as_array()
                    .ok_or_else(|| fmt_err("polygon must be an array"))?
                    .iter()
                    .map(|pt| match pt.as_array().map(Vec::as_slice) {
                        Some([x, y]) => Ok(Point::new(coord(x)?, coord(y)?)),
                        _ => Err(fmt_err("vertex must be a pair")),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { polygons })
    }

    pub fn to_json(&self) -> Value {
        let polys = self
            .polygons
            .iter()
            .map(|p| {
                Value::Array(
                    p.iter()
                        .map(|v| {
                            Value::Array(vec![
                                Value::String(render_rational(&v.x)),
                                Value::String(render_rational(&v.y)),
                            ])
                        })
                        .collect(),
                )
            })
            .collect();
        serde_json::json!({ "polygons": Value::Array(polys) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionViolation {
    TooFewVertices {
        polygon: usize,
    },
    RepeatedVertex {
        polygon: usize,
    },
    /// Not strictly convex in counter-clockwise order.
    NonConvex {
        polygon: usize,
    },
    Overlap {
        first: usize,
        second: usize,
    },
    /// `vertex` lies in `polygon` without being one of its vertices.
    InternalVertex {
        vertex: Point,
        polygon: usize,
    },
}

fn strictly_convex_ccw(p: &[Point]) -> bool {
    let n = p.len();
    (0..n).all(|i| {
        let (a, b) = (&p[i], &p[(i + 1) % n]);
        (0..n).filter(|&j| j != i && j != (i + 1) % n).all(|j| cross(a, b, &p[j]).is_positive())
    })
}

/// Some edge line of one polygon has the other on its closed outer side.
fn interiors_disjoint(p: &[Point], q: &[Point]) -> bool {
    let separates = |p: &[Point], q: &[Point]| {
        (0..p.len()).any(|i| {
            let (a, b) = (&p[i], &p[(i + 1) % p.len()]);
            q.iter().all(|v| !cross(a, b, v).is_positive())
        })
    };
    separates(p, q) || separates(q, p)
}

fn in_closed_polygon(p: &[Point], v: &Point) -> bool {
    (0..p.len()).all(|i| !cross(&p[i], &p[(i + 1) % p.len()], v).is_negative())
}

pub fn validate_partition(part: &PlanarPartition) -> Result<(), Vec<PartitionViolation>> {
    use PartitionViolation::*;
    let mut errors = Vec::new();
    let mut good = vec![false; part.polygons.len()];
    for (i, p) in part.polygons.iter().enumerate() {
        if p.len() < 3 {
            errors.push(TooFewVertices { polygon: i });
        } else if (0..p.len()).any(|a| (a + 1..p.len()).any(|b| p[a] == p[b])) {
            errors.push(RepeatedVertex { polygon: i });
        } else if !strictly_convex_ccw(p) {
            errors.push(NonConvex { polygon: i });
        } else {
            good[i] = true;
        }
    }
    let polys = &part.polygons;
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            if good[i] && good[j] && !interiors_disjoint(&polys[i], &polys[j]) {
                errors.push(Overlap { first: i, second: j });
            }
        }
    }
    for (j, q) in polys.iter().enumerate().filter(|&(j, _)| good[j]) {
        let mut seen: Vec<&Point> = Vec::new();
        for (i, p) in polys.iter().enumerate() {
            if i == j {
                continue;
            }
            for v in p {
                if !q.contains(v) && !seen.contains(&v) && in_closed_polygon(q, v) {
                    seen.push(v);
                    errors.push(InternalVertex { vertex: v.clone(), polygon: j });
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// CDC over the distinct vertices, in order of first appearance, labelled
/// `"x,y"`.
pub fn partition_to_cdc(part: &PlanarPartition) -> Result<Cdc, GeometryError> {
    validate_partition(part).map_err(GeometryError::Invalid)?;
    let mut index: HashMap<&Point, usize> = HashMap::new();
    let mut labels = Vec::new();
    for v in part.polygons.iter().flatten() {
        index.entry(v).or_insert_with(|| {
            labels.push(v.label());
            labels.len() - 1
        });
    }
    let sets = part.polygons.iter().map(|p| p.iter().map(|v| index[v]).collect()).collect();
    Ok(Cdc::from_index_sets(labels, sets)?)
}

/// Rank of the conflict hypergraph of the lowered CDC; a minimal infeasible
/// set with more than 3 elements is reported as a violation.
pub fn partition_rank(part: &PlanarPartition) -> Result<usize, GeometryError> {
    let h = partition_to_cdc(part)?.minimal_infeasible_sets(3)?;
    match h.truncated_at {
        None => Ok(h.rank),
        Some(_) => Err(GeometryError::TheoremViolation { at_least: 4 }),
    }
}

fn poly(pts: &[(i64, i64)]) -> Vec<Point> {
    pts.iter().map(|&(x, y)| Point::int(x, y)).collect()
}

/// Two unit squares sitting on a 2x1 rectangle: their shared corner lies on
/// the rectangle's top edge.
pub fn t_junction() -> PlanarPartition {
    PlanarPartition::new(vec![
        poly(&[(0, 0), (2, 0), (2, 1), (0, 1)]),
        poly(&[(0, 1), (1, 1), (1, 2), (0, 2)]),
        poly(&[(1, 1), (2, 1), (2, 2), (1, 2)]),
    ])
}

/// Four trapezoids around a square hole; every minimal infeasible set is a
/// pair.
pub fn square_ring() -> PlanarPartition {
    PlanarPartition::new(vec![
        poly(&[(0, 0), (3, 0), (2, 1), (1, 1)]),
        poly(&[(3, 0), (3, 3), (2, 2), (2, 1)]),
        poly(&[(3, 3), (0, 3), (1, 2), (2, 2)]),
        poly(&[(0, 3), (0, 0), (1, 1), (1, 2)]),
    ])
}

/// Three trapezoids around a triangular hole; the hole's corners form a
/// minimal infeasible triple.
pub fn triangle_ring() -> PlanarPartition {
    PlanarPartition::new(vec![
        poly(&[(0, 0), (12, 0), (9, 2), (3, 2)]),
        poly(&[(12, 0), (6, 12), (6, 8), (9, 2)]),
        poly(&[(6, 12), (0, 0), (3, 2), (6, 8)]),
    ])
}

/// Random pieces on a 3x2 block of unit cells (at most 12 vertices): each
/// cell is left empty, kept whole, split along a diagonal, or reduced to one
/// triangle, and horizontally adjacent whole cells may merge into a
/// rectangle. The result is not always a valid partition.
pub fn random_partition(seed: u64) -> PlanarPartition {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut polygons = Vec::new();
    let mut merged = [[false; 2]; 3];
    for y in 0..2i64 {
        for x in 0..3i64 {
            if merged[x as usize][y as usize] {
                continue;
            }
            let (ll, lr, ur, ul) = ((x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1));
            match rng.next_u64() % 8 {
                0 => {}
                1 if x < 2 => {
                    merged[x as usize + 1][y as usize] = true;
                    polygons.push(poly(&[ll, (x + 2, y), (x + 2, y + 1), ul]));
                }
                1 | 2 => polygons.push(poly(&[ll, lr, ur, ul])),
                3 => {
                    polygons.push(poly(&[ll, lr, ur]));
                    polygons.push(poly(&[ll, ur, ul]));
                }
                4 => {
                    polygons.push(poly(&[ll, lr, ul]));
                    polygons.push(poly(&[lr, ur, ul]));
                }
                5 => polygons.push(poly(&[ll, lr, ur])),
                6 => polygons.push(poly(&[lr, ur, ul])),
                _ => polygons.push(poly(&[ll, lr, ul])),
            }
        }
    }
    if polygons.is_empty() {
        polygons.push(poly(&[(0, 0), (1, 0), (1, 1)]));
    }
    PlanarPartition::new(polygons)
}
