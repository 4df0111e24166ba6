//! Vertex enumeration of a relaxation by exhaustive choice of active rows,
//! using fraction-free Gauss-Jordan elimination in checked `i128`.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{FormulationError, MipModel, Rational, Sense, VarKind};

pub const IDEALNESS_VAR_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Idealness {
    /// Every vertex has integral binaries.
    Ideal { vertices: usize },
    /// A vertex with a fractional binary coordinate.
    Fractional { vertex: Vec<Rational> },
}

impl Idealness {
    pub fn is_ideal(&self) -> bool {
        matches!(self, Idealness::Ideal { .. })
    }
}

type Row = Vec<i128>;

const OVERFLOW: FormulationError = FormulationError::Overflow;

fn to_i128(r: &num_bigint::BigInt) -> Result<i128, FormulationError> {
    r.to_i128().ok_or(OVERFLOW)
}

/// Integer row `a . x <= b` (or `=`), scaled by the lcm of denominators.
fn integer_row(n: usize, terms: &[(usize, Rational)], rhs: &Rational, negate: bool) -> Result<Row, FormulationError> {
    let lcm = terms.iter().map(|(_, c)| c.denom().clone()).fold(rhs.denom().clone(), |a, d| a.lcm(&d));
    let scale = |r: &Rational| -> Result<i128, FormulationError> {
        let v = to_i128(&(r.numer() * (&lcm / r.denom())))?;
        Ok(if negate { -v } else { v })
    };
    let mut row = vec![0i128; n + 1];
    for (v, c) in terms {
        row[*v] = scale(c)?;
    }
    row[n] = scale(rhs)?;
    Ok(row)
}

fn normalize(row: &mut Row) {
    let g = row.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        row.iter_mut().for_each(|x| *x /= g);
    }
}

/// `row * p[c] - p * row[c]`, eliminating column `c`.
fn eliminate(row: &mut Row, p: &Row, c: usize) -> Result<(), FormulationError> {
    let (f, g) = (p[c], row[c]);
    if g == 0 {
        return Ok(());
    }
    for (x, y) in row.iter_mut().zip(p) {
        *x = x.checked_mul(f).and_then(|a| y.checked_mul(g).and_then(|b| a.checked_sub(b))).ok_or(OVERFLOW)?;
    }
    if f < 0 {
        row.iter_mut().for_each(|x| *x = -*x);
    }
    normalize(row);
    Ok(())
}

/// Reduced echelon form: each row has a pivot column that is zero in all
/// other rows.
#[derive(Clone)]
struct Echelon {
    n: usize,
    rows: Vec<(usize, Row)>,
}

enum Added {
    Independent(Echelon),
    Dependent,
    Inconsistent,
}

impl Echelon {
    fn add(&self, mut row: Row) -> Result<Added, FormulationError> {
        for (c, p) in &self.rows {
            eliminate(&mut row, p, *c)?;
        }
        let Some(c) = (0..self.n).find(|&c| row[c] != 0) else {
            return Ok(if row[self.n] == 0 { Added::Dependent } else { Added::Inconsistent });
        };
        let mut next = self.clone();
        for (_, p) in next.rows.iter_mut() {
            eliminate(p, &row, c)?;
        }
        next.rows.push((c, row));
        Ok(Added::Independent(next))
    }

    /// Unique solution when the rank is full.
    fn solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (c, r) in &self.rows {
            x[*c] = Rational::new(r[self.n].into(), r[*c].into());
        }
        x
    }
}

struct Search<'a> {
    n: usize,
    ineq: &'a [Row],
    binaries: &'a [usize],
    seen: BTreeSet<Vec<Rational>>,
    witness: Option<Vec<Rational>>,
}

impl Search<'_> {
    fn feasible(&self, x: &[Rational]) -> Result<bool, FormulationError> {
        let den = x.iter().fold(num_bigint::BigInt::from(1), |a, q| a.lcm(q.denom()));
        let den = to_i128(&den)?;
        let nums: Vec<i128> = x
            .iter()
            .map(|q| to_i128(&(q.numer() * (num_bigint::BigInt::from(den) / q.denom()))))
            .collect::<Result<_, _>>()?;
        for r in self.ineq {
            let mut lhs = 0i128;
            for (a, v) in r[..self.n].iter().zip(&nums) {
                if *a != 0 {
                    lhs = a.checked_mul(*v).and_then(|p| lhs.checked_add(p)).ok_or(OVERFLOW)?;
                }
            }
            if lhs > r[self.n].checked_mul(den).ok_or(OVERFLOW)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn run(&mut self, e: &Echelon, from: usize) -> Result<(), FormulationError> {
        if self.witness.is_some() {
            return Ok(());
        }
        if e.rows.len() == self.n {
            let x = e.solution();
            if !self.seen.contains(&x) && self.feasible(&x)? {
                if self.binaries.iter().any(|&b| !x[b].is_integer()) {
                    self.witness = Some(x);
                    return Ok(());
                }
                self.seen.insert(x);
            }
            return Ok(());
        }
        let needed = self.n - e.rows.len();
        for i in from..self.ineq.len() {
            if self.ineq.len() - i < needed {
                break;
            }
            if let Added::Independent(next) = e.add(self.ineq[i].clone())? {
                self.run(&next, i + 1)?;
            }
        }
        Ok(())
    }
}

/// Enumerates the vertices of the relaxation (binaries relaxed to
/// `[0, 1]`) and reports the first one with a fractional binary, if any.
pub fn idealness_check(model: &MipModel) -> Result<Idealness, FormulationError> {
    idealness_check_with_limit(model, IDEALNESS_VAR_LIMIT)
}

pub fn idealness_check_with_limit(model: &MipModel, limit: usize) -> Result<Idealness, FormulationError> {
    let n = model.variables().len();
    if n > limit {
        return Err(FormulationError::SizeLimit { vars: n, limit });
    }
    let mut eq = Vec::new();
    let mut ineq = Vec::new();
    for c in model.constraints() {
        match c.sense {
            Sense::Eq => eq.push(integer_row(n, &c.terms, &c.rhs, false)?),
            Sense::Le => ineq.push(integer_row(n, &c.terms, &c.rhs, false)?),
            Sense::Ge => ineq.push(integer_row(n, &c.terms, &c.rhs, true)?),
        }
    }
    for (v, var) in model.variables().iter().enumerate() {
        let unit = Rational::from_integer(1.into());
        if let Some(l) = &var.lower {
            ineq.push(integer_row(n, &[(v, unit.clone())], l, true)?);
        }
        if let Some(u) = &var.upper {
            ineq.push(integer_row(n, &[(v, unit)], u, false)?);
        }
    }
    let mut e = Echelon { n, rows: Vec::new() };
    for r in eq {
        match e.add(r)? {
            Added::Independent(next) => e = next,
            Added::Dependent => {}
            Added::Inconsistent => return Ok(Idealness::Ideal { vertices: 0 }),
        }
    }
    let binaries: Vec<usize> = (0..n).filter(|&v| model.variables()[v].kind == VarKind::Binary).collect();
    let mut s = Search { n, ineq: &ineq, binaries: &binaries, seen: BTreeSet::new(), witness: None };
    s.run(&e, 0)?;
    Ok(match s.witness {
        Some(vertex) => Idealness::Fractional { vertex },
        None => Idealness::Ideal { vertices: s.seen.len() },
    })
}
