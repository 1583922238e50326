//! Weil Q-divisors with exact coefficients and C-pair boundaries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ext::{fmt_q, lcm_finite, ExtRational, Multiplicity, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeKind {
    /// The hyperplane `{x_axis = 0}` of a named chart (0-based axis).
    Coordinate { chart: String, axis: usize },
    Abstract,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeDivisor {
    id: String,
    kind: PrimeKind,
}

impl PrimeDivisor {
    pub fn abstract_prime(id: impl Into<String>) -> Self {
        PrimeDivisor { id: id.into(), kind: PrimeKind::Abstract }
    }

    pub fn coordinate(id: impl Into<String>, chart: impl Into<String>, axis: usize) -> Self {
        PrimeDivisor {
            id: id.into(),
            kind: PrimeKind::Coordinate { chart: chart.into(), axis },
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> &PrimeKind {
        &self.kind
    }

    /// The axis if this is a coordinate hyperplane of `chart`.
    pub fn axis_in(&self, chart: &str) -> Option<usize> {
        match &self.kind {
            PrimeKind::Coordinate { chart: c, axis } if c == chart => Some(*axis),
            _ => None,
        }
    }
}

impl fmt::Display for PrimeDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// A finite formal sum of primes with rational coefficients, zero terms
/// dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QDivisor {
    terms: BTreeMap<PrimeDivisor, Q>,
}

impl QDivisor {
    pub fn zero() -> Self {
        QDivisor::default()
    }

    pub fn prime(p: PrimeDivisor) -> Self {
        QDivisor::term(p, Q::one())
    }

    pub fn term(p: PrimeDivisor, c: Q) -> Self {
        let mut d = QDivisor::zero();
        d.add_term(p, c);
        d
    }

    /// Sums repeated primes.
    pub fn from_terms(terms: impl IntoIterator<Item = (PrimeDivisor, Q)>) -> Self {
        let mut d = QDivisor::zero();
        for (p, c) in terms {
            d.add_term(p, c);
        }
        d
    }

    /// Rejects `inf` coefficients.
    pub fn try_from_ext(terms: impl IntoIterator<Item = (PrimeDivisor, ExtRational)>) -> Result<Self> {
        let mut d = QDivisor::zero();
        for (p, c) in terms {
            match c {
                ExtRational::Finite(x) => d.add_term(p, x),
                ExtRational::Infinity => return Err(Error::InfiniteCoefficient(p.id().to_string())),
            }
        }
        Ok(d)
    }

    pub fn add_term(&mut self, p: PrimeDivisor, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(p.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn coeff(&self, p: &PrimeDivisor) -> Q {
        self.terms.get(p).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PrimeDivisor, &Q)> {
        self.terms.iter()
    }

    pub fn support(&self) -> BTreeSet<PrimeDivisor> {
        self.terms.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn map(&self, f: impl Fn(&Q) -> Q) -> QDivisor {
        QDivisor::from_terms(self.terms.iter().map(|(p, c)| (p.clone(), f(c))))
    }

    pub fn scale(&self, k: &Q) -> QDivisor {
        self.map(|c| c * k)
    }

    pub fn floor(&self) -> QDivisor {
        self.map(|c| c.floor())
    }

    pub fn ceil(&self) -> QDivisor {
        self.map(|c| c.ceil())
    }

    pub fn frac(&self) -> QDivisor {
        self.map(|c| c - c.floor())
    }

    /// Every prime of the support with coefficient 1.
    pub fn reduce(&self) -> QDivisor {
        self.map(|_| Q::one())
    }

    /// Termwise `self >= other` over the union of supports.
    pub fn geq(&self, other: &QDivisor) -> bool {
        (self - other).is_effective()
    }

    pub fn leq(&self, other: &QDivisor) -> bool {
        other.geq(self)
    }

    pub fn is_effective(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Integral with all coefficients equal to 1.
    pub fn is_reduced(&self) -> bool {
        self.terms.values().all(|c| c.is_one())
    }

    /// Keeps the terms whose prime satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&PrimeDivisor) -> bool) -> QDivisor {
        QDivisor::from_terms(
            self.terms
                .iter()
                .filter(|(p, _)| keep(p))
                .map(|(p, c)| (p.clone(), c.clone())),
        )
    }
}

pub fn floor_div(d: &QDivisor) -> QDivisor {
    d.floor()
}

pub fn ceil_div(d: &QDivisor) -> QDivisor {
    d.ceil()
}

pub fn frac_part(d: &QDivisor) -> QDivisor {
    d.frac()
}

pub fn reduce_div(d: &QDivisor) -> QDivisor {
    d.reduce()
}

impl Add for &QDivisor {
    type Output = QDivisor;
    fn add(self, rhs: &QDivisor) -> QDivisor {
        let mut out = self.clone();
        for (p, c) in rhs.terms() {
            out.add_term(p.clone(), c.clone());
        }
        out
    }
}

impl Add for QDivisor {
    type Output = QDivisor;
    fn add(self, rhs: QDivisor) -> QDivisor {
        &self + &rhs
    }
}

impl Neg for &QDivisor {
    type Output = QDivisor;
    fn neg(self) -> QDivisor {
        self.map(|c| -c)
    }
}

impl Neg for QDivisor {
    type Output = QDivisor;
    fn neg(self) -> QDivisor {
        -&self
    }
}

impl Sub for &QDivisor {
    type Output = QDivisor;
    fn sub(self, rhs: &QDivisor) -> QDivisor {
        self + &(-rhs)
    }
}

impl Sub for QDivisor {
    type Output = QDivisor;
    fn sub(self, rhs: QDivisor) -> QDivisor {
        &self - &rhs
    }
}

impl fmt::Display for QDivisor {
    /// `2/3*P + -1*E`; `0` for the zero divisor.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, c)| format!("{}*{}", fmt_q(c), p))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Boundary of a C-pair in multiplicity form. Every stored multiplicity is
/// at least 2 or `inf`; primes not listed have multiplicity 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CPairBoundary {
    terms: BTreeMap<PrimeDivisor, Multiplicity>,
}

impl CPairBoundary {
    pub fn empty() -> Self {
        CPairBoundary::default()
    }

    pub fn from_multiplicities(
        terms: impl IntoIterator<Item = (PrimeDivisor, Multiplicity)>,
    ) -> Result<Self> {
        let mut b = CPairBoundary::empty();
        for (p, m) in terms {
            b.insert(p, m)?;
        }
        Ok(b)
    }

    /// Sets the multiplicity of `p`; `m = 1` removes it.
    pub fn insert(&mut self, p: PrimeDivisor, m: Multiplicity) -> Result<()> {
        match m {
            Multiplicity::Finite(0) => Err(Error::InvalidMultiplicity("0".into())),
            Multiplicity::Finite(1) => {
                self.terms.remove(&p);
                Ok(())
            }
            _ => {
                self.terms.insert(p, m);
                Ok(())
            }
        }
    }

    /// Reads a Q-divisor as a C-pair boundary.
    pub fn as_cpair(d: &QDivisor) -> Result<Self> {
        let mut b = CPairBoundary::empty();
        for (p, c) in d.terms() {
            match Multiplicity::from_coefficient(c) {
                Some(m) if m != Multiplicity::ONE => {
                    b.terms.insert(p.clone(), m);
                }
                _ => {
                    return Err(Error::NotStandardCoefficient {
                        prime: p.id().to_string(),
                        coefficient: fmt_q(c),
                    })
                }
            }
        }
        Ok(b)
    }

    /// The induced Q-divisor `sum (m-1)/m * D_i`.
    pub fn to_qdivisor(&self) -> QDivisor {
        QDivisor::from_terms(self.terms.iter().map(|(p, m)| (p.clone(), m.coefficient())))
    }

    pub fn multiplicity(&self, p: &PrimeDivisor) -> Multiplicity {
        self.terms.get(p).copied().unwrap_or(Multiplicity::ONE)
    }

    /// C-multiplicity along `p` as an extended rational.
    pub fn c_multiplicity(&self, p: &PrimeDivisor) -> ExtRational {
        self.multiplicity(p).to_ext()
    }

    /// `sum over finite m_i of (1/m_i) * D_i`.
    pub fn d_orb(&self) -> QDivisor {
        QDivisor::from_terms(
            self.terms
                .iter()
                .filter(|(_, m)| m.is_finite())
                .map(|(p, m)| (p.clone(), m.inverse())),
        )
    }

    pub fn components(&self) -> impl Iterator<Item = (&PrimeDivisor, &Multiplicity)> {
        self.terms.iter()
    }

    pub fn support(&self) -> BTreeSet<PrimeDivisor> {
        self.terms.keys().cloned().collect()
    }

    pub fn contains(&self, p: &PrimeDivisor) -> bool {
        self.terms.contains_key(p)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// All multiplicities are `inf` (a log pair).
    pub fn is_log(&self) -> bool {
        self.terms.values().all(|m| !m.is_finite())
    }

    /// Least common multiple of the finite multiplicities.
    pub fn lcm(&self) -> u64 {
        lcm_finite(self.terms.values())
    }
}

pub fn as_cpair(d: &QDivisor) -> Result<CPairBoundary> {
    CPairBoundary::as_cpair(d)
}

pub fn c_multiplicity(b: &CPairBoundary, h: &PrimeDivisor) -> ExtRational {
    b.c_multiplicity(h)
}

pub fn d_orb(b: &CPairBoundary) -> QDivisor {
    b.d_orb()
}

impl fmt::Display for CPairBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.terms.iter().map(|(p, m)| format!("{p}: m={m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
