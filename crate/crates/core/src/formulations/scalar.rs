//! Exact scalars for the propagation and simplex kernels: arbitrary
//! precision rationals, and a fast rational whose parts stay within `i64`
//! so that every intermediate product fits in `i128`.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::Rational;

/// A value left the range of the fast scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) trait Scalar: Clone + Ord + Debug + Send + Sync {
    fn from_rational(r: &Rational) -> Result<Self, Overflow>;
    #[cfg(test)]
    fn to_rational(&self) -> Rational;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Result<Self, Overflow>;
    fn sub(&self, o: &Self) -> Result<Self, Overflow>;
    fn mul(&self, o: &Self) -> Result<Self, Overflow>;
    /// `o` must be nonzero.
    fn div(&self, o: &Self) -> Result<Self, Overflow>;
    fn neg(&self) -> Self;
    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;
    fn signum(&self) -> Ordering;

    fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Result<Self, Overflow> {
        Ok(r.clone())
    }

    #[cfg(test)]
    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        Rational::from_integer(1.into())
    }

    fn add(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self + o)
    }

    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self - o)
    }

    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self * o)
    }

    fn div(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self / o)
    }

    fn neg(&self) -> Self {
        -self
    }

    fn floor(&self) -> Self {
        Rational::floor(self)
    }

    fn ceil(&self) -> Self {
        Rational::ceil(self)
    }

    fn signum(&self) -> Ordering {
        if Signed::is_positive(self) {
            Ordering::Greater
        } else if Signed::is_negative(self) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

const LIMIT: i128 = i64::MAX as i128;

/// Reduced `n / d` with `d > 0` and `|n|, d <= i64::MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Small {
    n: i128,
    d: i128,
}

impl Small {
    fn make(n: i128, d: i128) -> Result<Self, Overflow> {
        let g = n.gcd(&d);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        if n.abs() > LIMIT || d > LIMIT {
            return Err(Overflow);
        }
        Ok(Self { n, d })
    }
}

impl Ord for Small {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.n * o.d).cmp(&(o.n * self.d))
    }
}

impl PartialOrd for Small {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Scalar for Small {
    fn from_rational(r: &Rational) -> Result<Self, Overflow> {
        let n = r.numer().to_i128().ok_or(Overflow)?;
        let d = r.denom().to_i128().ok_or(Overflow)?;
        Self::make(n, d)
    }

    #[cfg(test)]
    fn to_rational(&self) -> Rational {
        Rational::new(self.n.into(), self.d.into())
    }

    fn zero() -> Self {
        Self { n: 0, d: 1 }
    }

    fn one() -> Self {
        Self { n: 1, d: 1 }
    }

    fn add(&self, o: &Self) -> Result<Self, Overflow> {
        if self.d == o.d {
            return Self::make(self.n + o.n, self.d);
        }
        Self::make(self.n * o.d + o.n * self.d, self.d * o.d)
    }

    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        Self::make(self.n * o.n, self.d * o.d)
    }

    fn div(&self, o: &Self) -> Result<Self, Overflow> {
        Self::make(self.n * o.d, self.d * o.n)
    }

    fn neg(&self) -> Self {
        Self { n: -self.n, d: self.d }
    }

    fn floor(&self) -> Self {
        Self { n: self.n.div_euclid(self.d), d: 1 }
    }

    fn ceil(&self) -> Self {
        Self { n: -(-self.n).div_euclid(self.d), d: 1 }
    }

    fn signum(&self) -> Ordering {
        self.n.cmp(&0)
    }
}
