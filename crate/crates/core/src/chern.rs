//! Total C-Chern classes in a truncated graded ring.
//!
//! Classes are polynomials in named symbols of fixed positive degree with
//! exact rational coefficients; every product is truncated above the
//! dimension.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ext::{fmt_q, Multiplicity, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRing {
    dim: usize,
    names: Vec<String>,
    degrees: Vec<usize>,
}

impl GradedRing {
    pub fn new(dim: usize, symbols: impl IntoIterator<Item = (String, usize)>) -> Result<Arc<Self>> {
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (name, deg) in symbols {
            if deg == 0 {
                return Err(Error::TruncationOverflow(format!("symbol {name} has degree 0")));
            }
            if names.contains(&name) {
                return Err(Error::TruncationOverflow(format!("symbol {name} declared twice")));
            }
            names.push(name);
            degrees.push(deg);
        }
        Ok(Arc::new(GradedRing { dim, names, degrees }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.names.iter().map(String::as_str).zip(self.degrees.iter().copied())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn weight(&self, mono: &[u32]) -> usize {
        mono.iter().zip(&self.degrees).map(|(e, d)| *e as usize * d).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedClass {
    ring: Arc<GradedRing>,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl GradedClass {
    pub fn constant(ring: &Arc<GradedRing>, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; ring.names.len()], c);
        }
        GradedClass { ring: ring.clone(), terms }
    }

    pub fn one(ring: &Arc<GradedRing>) -> Self {
        GradedClass::constant(ring, Q::one())
    }

    pub fn zero(ring: &Arc<GradedRing>) -> Self {
        GradedClass::constant(ring, Q::zero())
    }

    pub fn symbol(ring: &Arc<GradedRing>, name: &str) -> Result<Self> {
        let k = ring.index_of(name).ok_or_else(|| Error::UnknownPrime(name.to_string()))?;
        let mut mono = vec![0; ring.names.len()];
        mono[k] = 1;
        let mut c = GradedClass::zero(ring);
        c.add_term(mono, Q::one());
        Ok(c)
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    fn add_term(&mut self, mono: Vec<u32>, c: Q) {
        if c.is_zero() || self.ring.weight(&mono) > self.ring.dim {
            return;
        }
        let slot = self.terms.entry(mono.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&mono);
        }
    }

    fn same_ring(&self, other: &GradedClass) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::TruncationOverflow("classes live in different rings".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedClass) -> Result<GradedClass> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedClass) -> Result<GradedClass> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, k: &Q) -> GradedClass {
        let mut out = GradedClass::zero(&self.ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &GradedClass) -> Result<GradedClass> {
        self.same_ring(other)?;
        let mut out = GradedClass::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Vec<u32> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Homogeneous part of degree `k`.
    pub fn part(&self, k: usize) -> GradedClass {
        GradedClass {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.ring.weight(m) == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&vec![0; self.ring.names.len()]).cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficient of a degree-one symbol.
    pub fn linear_coeff(&self, name: &str) -> Q {
        match self.ring.index_of(name) {
            Some(k) => {
                let mut mono = vec![0; self.ring.names.len()];
                mono[k] = 1;
                self.terms.get(&mono).cloned().unwrap_or_else(Q::zero)
            }
            None => Q::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(1 - x)^(-1) = 1 + x + x^2 + ...` for `x` without constant term.
    pub fn geometric_series(x: &GradedClass) -> Result<GradedClass> {
        if !x.constant_term().is_zero() {
            return Err(Error::TruncationOverflow("series needs a class without constant term".into()));
        }
        let mut out = GradedClass::one(&x.ring);
        let mut power = GradedClass::one(&x.ring);
        for _ in 0..x.ring.dim {
            power = power.mul(x)?;
            out = out.add(&power)?;
        }
        Ok(out)
    }
}

impl fmt::Display for GradedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut parts: Vec<(usize, String)> = Vec::new();
        for (m, c) in &self.terms {
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(k, e)| {
                    if *e == 1 {
                        self.ring.names[k].clone()
                    } else {
                        format!("{}^{}", self.ring.names[k], e)
                    }
                })
                .collect();
            let s = if vars.is_empty() {
                fmt_q(c)
            } else if c.is_one() {
                vars.join("*")
            } else {
                format!("{}*{}", fmt_q(c), vars.join("*"))
            };
            parts.push((self.ring.weight(m), s));
        }
        parts.sort();
        let joined: Vec<String> = parts.into_iter().map(|(_, s)| s).collect();
        f.write_str(&joined.join(" + "))
    }
}

/// How `c(O_{D_i})` is obtained.
#[derive(Clone, Debug, Default)]
pub enum ChernConvention {
    /// `c(O_D) = c(O(-D))^(-1) = 1 + D + D^2 + ...`.
    #[default]
    StructureSequence,
    /// Caller-supplied classes keyed by symbol name.
    Custom(BTreeMap<String, GradedClass>),
}

/// `c(O_D)` from `0 -> O(-D) -> O -> O_D -> 0`.
pub fn structure_sheaf_class(ring: &Arc<GradedRing>, d: &str) -> Result<GradedClass> {
    GradedClass::geometric_series(&GradedClass::symbol(ring, d)?)
}

/// `c(Omega^1_X) * prod_i ((m_i - 1)/m_i c(O_{D_i}) + 1/m_i)`.
pub fn total_c_chern(
    c_omega: &GradedClass,
    components: &[(String, Multiplicity)],
    convention: &ChernConvention,
) -> Result<GradedClass> {
    let ring = c_omega.ring().clone();
    let mut out = c_omega.clone();
    for (name, m) in components {
        let k = ring.index_of(name).ok_or_else(|| Error::UnknownPrime(name.clone()))?;
        if ring.degrees[k] != 1 {
            return Err(Error::TruncationOverflow(format!("boundary class {name} must have degree 1")));
        }
        let c_o = match convention {
            ChernConvention::StructureSequence => structure_sheaf_class(&ring, name)?,
            ChernConvention::Custom(map) => map
                .get(name)
                .cloned()
                .ok_or_else(|| Error::UnknownPrime(name.clone()))?,
        };
        let factor = c_o.scale(&m.coefficient()).add(&GradedClass::constant(&ring, m.inverse()))?;
        out = out.mul(&factor)?;
    }
    Ok(out)
}

/// Degree-one part of `c(Omega^1_X) + sum (m_i - 1)/m_i [D_i]`, the expected
/// first C-Chern class.
pub fn expected_c1(c_omega: &GradedClass, components: &[(String, Multiplicity)]) -> Result<GradedClass> {
    let ring = c_omega.ring().clone();
    let mut out = c_omega.part(1);
    for (name, m) in components {
        out = out.add(&GradedClass::symbol(&ring, name)?.scale(&m.coefficient()))?;
    }
    Ok(out)
}
