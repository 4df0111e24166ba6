//! Exact bound propagation and a dense phase-1 simplex, generic over the
//! scalar so callers can try the fast `i128` rational before falling back
//! to arbitrary precision.

use std::collections::VecDeque;

use super::scalar::{Overflow, Scalar};
use super::{MipModel, Rational, Sense, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Infeasible;

/// Variable bounds; `None` is infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
}

impl Bounds {
    pub fn of(model: &MipModel) -> Self {
        Self {
            lower: model.variables().iter().map(|v| v.lower.clone()).collect(),
            upper: model.variables().iter().map(|v| v.upper.clone()).collect(),
        }
    }

    pub fn fix(&mut self, v: usize, value: Rational) {
        self.lower[v] = Some(value.clone());
        self.upper[v] = Some(value);
    }

    pub fn is_fixed(&self, v: usize) -> bool {
        matches!((&self.lower[v], &self.upper[v]), (Some(l), Some(u)) if l == u)
    }

    /// Upper bound is exactly zero.
    pub fn forced_zero(&self, v: usize) -> bool {
        self.upper[v].as_ref().is_some_and(num_traits::Zero::is_zero)
    }
}

/// Bound tightening over all rows until a fixpoint or a work limit.
pub fn propagate(model: &MipModel, bounds: &mut Bounds) -> Result<(), Infeasible> {
    let prop = Propagator::<Rational>::new(model).expect("rationals do not overflow");
    let mut d = Domains { lower: bounds.lower.clone(), upper: bounds.upper.clone() };
    match prop.run(&mut d, None) {
        Ok(()) => {
            *bounds = Bounds { lower: d.lower, upper: d.upper };
            Ok(())
        }
        Err(Stop::Infeasible) => Err(Infeasible),
        Err(Stop::Overflow) => unreachable!("rationals do not overflow"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    Infeasible,
    Overflow,
}

impl From<Overflow> for Stop {
    fn from(_: Overflow) -> Self {
        Stop::Overflow
    }
}

/// [`Bounds`] over any scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Domains<T> {
    pub lower: Vec<Option<T>>,
    pub upper: Vec<Option<T>>,
}

impl<T: Scalar> Domains<T> {
    pub(crate) fn of(model: &MipModel) -> Result<Self, Overflow> {
        let conv = |b: &Option<Rational>| b.as_ref().map(T::from_rational).transpose();
        Ok(Self {
            lower: model.variables().iter().map(|v| conv(&v.lower)).collect::<Result<_, _>>()?,
            upper: model.variables().iter().map(|v| conv(&v.upper)).collect::<Result<_, _>>()?,
        })
    }

    pub(crate) fn fix(&mut self, v: usize, value: T) {
        self.lower[v] = Some(value.clone());
        self.upper[v] = Some(value);
    }

    pub(crate) fn is_fixed(&self, v: usize) -> bool {
        matches!((&self.lower[v], &self.upper[v]), (Some(l), Some(u)) if l == u)
    }

    fn check(&self, v: usize) -> Result<(), Stop> {
        match (&self.lower[v], &self.upper[v]) {
            (Some(l), Some(u)) if l > u => Err(Stop::Infeasible),
            _ => Ok(()),
        }
    }

    fn tighter_upper(&mut self, v: usize, x: T) -> bool {
        if self.upper[v].as_ref().is_none_or(|u| x < *u) {
            self.upper[v] = Some(x);
            true
        } else {
            false
        }
    }

    fn tighter_lower(&mut self, v: usize, x: T) -> bool {
        if self.lower[v].as_ref().is_none_or(|l| x > *l) {
            self.lower[v] = Some(x);
            true
        } else {
            false
        }
    }
}

struct Row<T> {
    terms: Vec<(usize, T)>,
    sense: Sense,
    rhs: T,
    /// The row as one or two `sum a x <= b` forms.
    forms: Vec<(Vec<(usize, T)>, T)>,
}

/// Model rows converted to one scalar type, shared by propagation and the
/// simplex.
pub(crate) struct Propagator<T> {
    rows: Vec<Row<T>>,
    rows_of: Vec<Vec<usize>>,
    binary: Vec<bool>,
}

impl<T: Scalar> Propagator<T> {
    pub(crate) fn new(model: &MipModel) -> Result<Self, Overflow> {
        let mut rows_of = vec![Vec::new(); model.variables().len()];
        let mut rows = Vec::with_capacity(model.constraints().len());
        for (r, c) in model.constraints().iter().enumerate() {
            let terms: Vec<(usize, T)> =
                c.terms.iter().map(|(v, a)| Ok((*v, T::from_rational(a)?))).collect::<Result<_, Overflow>>()?;
            let rhs = T::from_rational(&c.rhs)?;
            let negated = || (terms.iter().map(|(v, a)| (*v, a.neg())).collect(), rhs.neg());
            let forms = match c.sense {
                Sense::Le => vec![(terms.clone(), rhs.clone())],
                Sense::Ge => vec![negated()],
                Sense::Eq => vec![(terms.clone(), rhs.clone()), negated()],
            };
            for (v, _) in &terms {
                rows_of[*v].push(r);
            }
            rows.push(Row { terms, sense: c.sense, rhs, forms });
        }
        let binary = model.variables().iter().map(|v| v.kind == VarKind::Binary).collect();
        Ok(Self { rows, rows_of, binary })
    }

    /// Propagates rows touching `changed`, or every row when `None`.
    pub(crate) fn run(&self, b: &mut Domains<T>, changed: Option<&[usize]>) -> Result<(), Stop> {
        let m = self.rows.len();
        let mut queued = vec![false; m];
        let mut queue = VecDeque::new();
        let push = |r: usize, queued: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
            if !queued[r] {
                queued[r] = true;
                queue.push_back(r);
            }
        };
        match changed {
            None => (0..m).for_each(|r| push(r, &mut queued, &mut queue)),
            Some(vs) => vs.iter().flat_map(|&v| &self.rows_of[v]).for_each(|&r| push(r, &mut queued, &mut queue)),
        }
        for v in 0..b.lower.len() {
            b.check(v)?;
        }
        let mut budget = 64 * m.max(1) + 1024;
        let mut touched = Vec::new();
        while let Some(r) = queue.pop_front() {
            queued[r] = false;
            budget -= 1;
            if budget == 0 {
                break;
            }
            touched.clear();
            for (terms, rhs) in &self.rows[r].forms {
                self.tighten(b, terms, rhs, &mut touched)?;
            }
            for &v in &touched {
                for &r2 in &self.rows_of[v] {
                    if r2 != r {
                        push(r2, &mut queued, &mut queue);
                    }
                }
            }
        }
        Ok(())
    }

    /// Tightens `sum a x <= rhs`.
    fn tighten(&self, b: &mut Domains<T>, terms: &[(usize, T)], rhs: &T, touched: &mut Vec<usize>) -> Result<(), Stop> {
        let min_term = |b: &Domains<T>, v: usize, a: &T| -> Result<Option<T>, Overflow> {
            let bound = if a.is_positive() { &b.lower[v] } else { &b.upper[v] };
            bound.as_ref().map(|x| a.mul(x)).transpose()
        };
        let mut finite = T::zero();
        let mut infinite = None;
        let mut unbounded = 0;
        // Largest possible single-term range, to skip rows with no slack
        // to give.
        let mut widest: Option<T> = Some(T::zero());
        let mut mins = Vec::with_capacity(terms.len());
        for (v, a) in terms {
            let t = min_term(b, *v, a)?;
            match &t {
                Some(x) => finite = finite.add(x)?,
                None => {
                    unbounded += 1;
                    infinite = Some(*v);
                }
            }
            widest = match (&widest, &b.lower[*v], &b.upper[*v]) {
                (Some(w), Some(l), Some(u)) => {
                    let range = u.sub(l)?.mul(a)?;
                    let range = if range.is_negative() { range.neg() } else { range };
                    Some(if range > *w { range } else { w.clone() })
                }
                _ => None,
            };
            mins.push(t);
        }
        if unbounded == 0 && finite > *rhs {
            return Err(Stop::Infeasible);
        }
        if unbounded > 1 {
            return Ok(());
        }
        let slack = rhs.sub(&finite)?;
        if unbounded == 0 && widest.is_some_and(|w| w <= slack) {
            return Ok(());
        }
        for ((v, a), t) in terms.iter().zip(&mins) {
            let rest_slack = match (t, infinite) {
                (Some(t), None) => slack.add(t)?,
                (None, Some(_)) => slack.clone(),
                _ => continue,
            };
            let limit = rest_slack.div(a)?;
            let changed = if a.is_positive() {
                let limit = if self.binary[*v] { limit.floor() } else { limit };
                b.tighter_upper(*v, limit)
            } else {
                let limit = if self.binary[*v] { limit.ceil() } else { limit };
                b.tighter_lower(*v, limit)
            };
            if changed {
                b.check(*v)?;
                touched.push(*v);
            }
        }
        Ok(())
    }

    /// A point satisfying every row and bound (integrality ignored), or
    /// `None`.
    pub(crate) fn lp_feasible(&self, b: &Domains<T>) -> Result<Option<Vec<T>>, Overflow> {
        let n = b.lower.len();
        let mut cols = 0usize;
        let mut next = || {
            cols += 1;
            cols - 1
        };
        let mut rows: Vec<LpRow<T>> = Vec::new();
        let mut maps = Vec::with_capacity(n);
        let mut caps = Vec::new();
        for v in 0..n {
            let map = match (&b.lower[v], &b.upper[v]) {
                (Some(l), Some(u)) if l == u => Map::Fixed(l.clone()),
                (Some(l), Some(u)) => {
                    let c = next();
                    caps.push((c, u.sub(l)?));
                    Map::Shift(l.clone(), c)
                }
                (Some(l), None) => Map::Shift(l.clone(), next()),
                (None, Some(u)) => Map::Flip(u.clone(), next()),
                (None, None) => Map::Split(next(), next()),
            };
            maps.push(map);
        }
        for row in &self.rows {
            let mut rhs = row.rhs.clone();
            let mut terms = Vec::new();
            for (v, a) in &row.terms {
                match &maps[*v] {
                    Map::Fixed(x) => rhs = rhs.sub(&a.mul(x)?)?,
                    Map::Shift(l, col) => {
                        rhs = rhs.sub(&a.mul(l)?)?;
                        terms.push((*col, a.clone()));
                    }
                    Map::Flip(u, col) => {
                        rhs = rhs.sub(&a.mul(u)?)?;
                        terms.push((*col, a.neg()));
                    }
                    Map::Split(p, q) => {
                        terms.push((*p, a.clone()));
                        terms.push((*q, a.neg()));
                    }
                }
            }
            if terms.is_empty() {
                let holds = match row.sense {
                    Sense::Le => !rhs.is_negative(),
                    Sense::Eq => rhs.is_zero(),
                    Sense::Ge => !rhs.is_positive(),
                };
                if !holds {
                    return Ok(None);
                }
                continue;
            }
            rows.push((terms, row.sense, rhs));
        }
        // Every column is nonnegative, so a row `sum a y <= r` with all
        // `a > 0` caps each of its columns at `r / a`; explicit caps it
        // implies are dropped.
        let mut implied: Vec<Option<T>> = vec![None; cols];
        for (terms, sense, rhs) in &rows {
            if *sense != Sense::Ge && terms.iter().all(|(_, a)| a.is_positive()) {
                for (c, a) in terms {
                    let cap = rhs.div(a)?;
                    if implied[*c].as_ref().is_none_or(|x| cap < *x) {
                        implied[*c] = Some(cap);
                    }
                }
            }
        }
        for (c, cap) in caps {
            if implied[c].as_ref().is_none_or(|x| cap < *x) {
                rows.push((vec![(c, T::one())], Sense::Le, cap));
            }
        }
        let Some(y) = phase_one(cols, &rows)? else { return Ok(None) };
        let point = maps
            .iter()
            .map(|m| match m {
                Map::Fixed(x) => Ok(x.clone()),
                Map::Shift(l, c) => l.add(&y[*c]),
                Map::Flip(u, c) => u.sub(&y[*c]),
                Map::Split(p, q) => y[*p].sub(&y[*q]),
            })
            .collect::<Result<_, _>>()?;
        Ok(Some(point))
    }
}

/// How an original variable is expressed in nonnegative columns.
enum Map<T> {
    Fixed(T),
    /// `lower + col`
    Shift(T, usize),
    /// `upper - col`
    Flip(T, usize),
    /// `pos - neg`
    Split(usize, usize),
}

/// Rational wrapper over [`Propagator::lp_feasible`].
#[cfg(test)]
pub(crate) fn lp_feasible(model: &MipModel, b: &Bounds) -> Option<Vec<Rational>> {
    let prop = Propagator::<Rational>::new(model).expect("rationals do not overflow");
    let d = Domains { lower: b.lower.clone(), upper: b.upper.clone() };
    prop.lp_feasible(&d).expect("rationals do not overflow")
}

/// Sparse row `terms sense rhs`.
type LpRow<T> = (Vec<(usize, T)>, Sense, T);

/// Feasible `y >= 0` for the rows, via Bland's rule on the sum of
/// artificials.
fn phase_one<T: Scalar>(cols: usize, rows: &[LpRow<T>]) -> Result<Option<Vec<T>>, Overflow> {
    let m = rows.len();
    let slacks = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let width = cols + slacks + m + 1;
    let rhs_col = width - 1;
    let mut t = vec![vec![T::zero(); width]; m];
    let mut basis = vec![0usize; m];
    let mut slack = cols;
    let mut artificial = Vec::new();
    for (i, (terms, sense, rhs)) in rows.iter().enumerate() {
        let flip = rhs.is_negative();
        let sign = |x: T| if flip { x.neg() } else { x };
        for (c, a) in terms {
            t[i][*c] = t[i][*c].add(&sign(a.clone()))?;
        }
        t[i][rhs_col] = sign(rhs.clone());
        let mut slack_col = None;
        if *sense != Sense::Eq {
            let s = if *sense == Sense::Le { T::one() } else { T::one().neg() };
            t[i][slack] = sign(s);
            slack_col = Some(slack);
            slack += 1;
        }
        match slack_col {
            Some(s) if t[i][s].is_positive() => basis[i] = s,
            _ => {
                let a = cols + slacks + artificial.len();
                t[i][a] = T::one();
                basis[i] = a;
                artificial.push(i);
            }
        }
    }
    let art_start = cols + slacks;
    let art_end = art_start + artificial.len();
    // Objective row: minimise the artificials, expressed in nonbasic terms.
    let mut obj = vec![T::zero(); width];
    for &i in &artificial {
        for (c, x) in t[i].iter().enumerate() {
            if c < art_start || c == rhs_col {
                obj[c] = obj[c].sub(x)?;
            }
        }
    }
    while let Some(enter) = (0..art_end).find(|&c| obj[c].is_negative()) {
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = t[i][rhs_col].div(&t[i][enter])?;
                let better = match &leave {
                    None => true,
                    Some((j, r)) => ratio < *r || (ratio == *r && basis[i] < basis[*j]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else { return Ok(None) };
        let piv = t[p][enter].clone();
        for x in t[p].iter_mut() {
            if !x.is_zero() {
                *x = x.div(&piv)?;
            }
        }
        let prow = t[p].clone();
        let nonzero: Vec<usize> = (0..width).filter(|&c| !prow[c].is_zero()).collect();
        for (i, row) in t.iter_mut().enumerate() {
            if i != p && !row[enter].is_zero() {
                let f = row[enter].clone();
                for &c in &nonzero {
                    row[c] = row[c].sub(&f.mul(&prow[c])?)?;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for &c in &nonzero {
                obj[c] = obj[c].sub(&f.mul(&prow[c])?)?;
            }
        }
        basis[p] = enter;
    }
    if !obj[rhs_col].is_zero() {
        return Ok(None);
    }
    let mut y = vec![T::zero(); cols];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < cols {
            y[bv] = t[i][rhs_col].clone();
        }
    }
    Ok(Some(y))
}
