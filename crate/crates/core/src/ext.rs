//! Exact rationals extended by the symbol `inf`, and C-multiplicities.
//!
//! `inf` only ever appears in multiplicity positions. Q-divisors hold finite
//! rationals exclusively.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as an exact rational.
pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Renders `p/q`, or `p` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Floor of a rational as `i64`. Panics only on values far outside the
/// engine's working range.
pub fn floor_i64(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("integer out of i64 range")
}

pub fn ceil_i64(x: &Q) -> i64 {
    x.ceil().to_integer().to_i64().expect("integer out of i64 range")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(Q),
    Infinity,
}

impl ExtRational {
    pub fn int(n: i64) -> Self {
        ExtRational::Finite(qi(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            ExtRational::Finite(x) => Some(x),
            ExtRational::Infinity => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }

    /// `inf - finite = inf`; subtracting `inf` is undefined.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => Ok(ExtRational::Finite(a - b)),
            (ExtRational::Infinity, ExtRational::Finite(_)) => Ok(ExtRational::Infinity),
            _ => Err(Error::UndefinedInfinity(format!("{self} - {other}"))),
        }
    }

    /// `inf` times a positive finite value (or `inf`) is `inf`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => Ok(ExtRational::Finite(a * b)),
            (ExtRational::Infinity, ExtRational::Infinity) => Ok(ExtRational::Infinity),
            (ExtRational::Infinity, ExtRational::Finite(x))
            | (ExtRational::Finite(x), ExtRational::Infinity) => {
                if x.is_positive() {
                    Ok(ExtRational::Infinity)
                } else {
                    Err(Error::UndefinedInfinity(format!("{self} * {other}")))
                }
            }
        }
    }

    /// `inf/inf = 1`, `finite/inf = 0`, `inf/positive = inf`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => {
                if b.is_zero() {
                    Err(Error::UndefinedInfinity(format!("{self} / 0")))
                } else {
                    Ok(ExtRational::Finite(a / b))
                }
            }
            (ExtRational::Infinity, ExtRational::Infinity) => Ok(ExtRational::Finite(Q::one())),
            (ExtRational::Finite(_), ExtRational::Infinity) => Ok(ExtRational::Finite(Q::zero())),
            (ExtRational::Infinity, ExtRational::Finite(b)) => {
                if b.is_positive() {
                    Ok(ExtRational::Infinity)
                } else {
                    Err(Error::UndefinedInfinity(format!("{self} / {other}")))
                }
            }
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
            (ExtRational::Finite(_), ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Infinity, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(x) => write!(f, "{}", fmt_q(x)),
            ExtRational::Infinity => write!(f, "inf"),
        }
    }
}

impl From<Q> for ExtRational {
    fn from(x: Q) -> Self {
        ExtRational::Finite(x)
    }
}

/// A C-multiplicity: a positive integer or `inf`. `Finite(1)` is the
/// multiplicity off the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl Multiplicity {
    pub const ONE: Multiplicity = Multiplicity::Finite(1);

    pub fn is_finite(&self) -> bool {
        matches!(self, Multiplicity::Finite(_))
    }

    pub fn finite(&self) -> Option<u64> {
        match self {
            Multiplicity::Finite(m) => Some(*m),
            Multiplicity::Infinite => None,
        }
    }

    /// The boundary coefficient `(m-1)/m`, with `inf` giving 1.
    pub fn coefficient(&self) -> Q {
        match self {
            Multiplicity::Finite(m) => q(*m as i64 - 1, *m as i64),
            Multiplicity::Infinite => Q::one(),
        }
    }

    /// `1/m`, with `1/inf = 0`.
    pub fn inverse(&self) -> Q {
        match self {
            Multiplicity::Finite(m) => q(1, *m as i64),
            Multiplicity::Infinite => Q::zero(),
        }
    }

    /// Inverts [`Multiplicity::coefficient`]: `0` gives 1, `1` gives `inf`,
    /// `(m-1)/m` gives `m`; anything else is `None`.
    pub fn from_coefficient(c: &Q) -> Option<Multiplicity> {
        if c.is_zero() {
            return Some(Multiplicity::ONE);
        }
        if c.is_one() {
            return Some(Multiplicity::Infinite);
        }
        if c.is_negative() || c > &Q::one() {
            return None;
        }
        let m = (Q::one() - c).recip();
        if m.is_integer() {
            m.to_integer().to_u64().map(Multiplicity::Finite)
        } else {
            None
        }
    }

    pub fn to_ext(&self) -> ExtRational {
        match self {
            Multiplicity::Finite(m) => ExtRational::int(*m as i64),
            Multiplicity::Infinite => ExtRational::Infinity,
        }
    }

    /// Product with `inf` absorbing (all multiplicities are positive).
    pub fn times(&self, k: u64) -> Multiplicity {
        match self {
            Multiplicity::Finite(m) => Multiplicity::Finite(m * k),
            Multiplicity::Infinite => Multiplicity::Infinite,
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(m) => write!(f, "{m}"),
            Multiplicity::Infinite => write!(f, "inf"),
        }
    }
}

/// Least common multiple of the finite entries; 1 for none.
pub fn lcm_finite<'a>(ms: impl IntoIterator<Item = &'a Multiplicity>) -> u64 {
    ms.into_iter()
        .filter_map(|m| m.finite())
        .fold(1u64, |acc, m| acc.lcm(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_conventions() {
        let inf = ExtRational::Infinity;
        let two = ExtRational::int(2);
        assert_eq!(inf.mul(&two).unwrap(), inf);
        assert_eq!(inf.sub(&two).unwrap(), inf);
        assert_eq!(inf.div(&inf).unwrap(), ExtRational::int(1));
        assert_eq!(two.div(&inf).unwrap(), ExtRational::int(0));
        assert!(inf.mul(&ExtRational::int(0)).is_err());
        assert!(two.sub(&inf).is_err());
        assert!(two < inf);
    }

    #[test]
    fn coefficient_round_trip() {
        for m in 1..40u64 {
            let mult = Multiplicity::Finite(m);
            assert_eq!(Multiplicity::from_coefficient(&mult.coefficient()), Some(mult));
        }
        assert_eq!(
            Multiplicity::from_coefficient(&Q::one()),
            Some(Multiplicity::Infinite)
        );
        assert_eq!(Multiplicity::from_coefficient(&q(1, 3)), None);
        assert_eq!(Multiplicity::from_coefficient(&q(3, 2)), None);
        assert_eq!(Multiplicity::from_coefficient(&q(-1, 2)), None);
    }

    #[test]
    fn multiplicity_order_puts_inf_last() {
        assert!(Multiplicity::Finite(1000) < Multiplicity::Infinite);
        assert_eq!(lcm_finite(&[Multiplicity::Finite(4), Multiplicity::Infinite, Multiplicity::Finite(6)]), 12);
    }
}
