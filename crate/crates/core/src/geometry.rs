//! Charts, monomial covers and divisorially presented morphisms.
//!
//! Axes are 0-based in the API. A monomial cover with exponent matrix `E`
//! maps source coordinates `x` to target coordinates `y_j = prod_i x_i^E[i][j]`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::divisor::{CPairBoundary, PrimeDivisor, QDivisor};
use crate::error::{Error, Result};
use crate::ext::qi;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    name: String,
    axes: Vec<String>,
}

impl Chart {
    /// Axes named `x1..xd`.
    pub fn new(name: impl Into<String>, dim: usize) -> Result<Self> {
        Chart::with_axes(name, (1..=dim).map(|i| format!("x{i}")).collect())
    }

    pub fn with_axes(name: impl Into<String>, axes: Vec<String>) -> Result<Self> {
        let name = name.into();
        if axes.is_empty() {
            return Err(Error::InvalidChart(format!("{name} has dimension 0")));
        }
        let unique: BTreeSet<&String> = axes.iter().collect();
        if unique.len() != axes.len() {
            return Err(Error::InvalidChart(format!("{name} repeats an axis name")));
        }
        Ok(Chart { name, axes })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[String] {
        &self.axes
    }

    pub fn axis_name(&self, axis: usize) -> Result<&str> {
        self.axes
            .get(axis)
            .map(String::as_str)
            .ok_or(Error::AxisOutOfRange { axis, dim: self.dim() })
    }

    /// The coordinate hyperplane `{x_axis = 0}`, named `chart.axis`.
    pub fn hyperplane(&self, axis: usize) -> Result<PrimeDivisor> {
        let axis_name = self.axis_name(axis)?;
        Ok(PrimeDivisor::coordinate(
            format!("{}.{}", self.name, axis_name),
            self.name.clone(),
            axis,
        ))
    }

    pub fn hyperplanes(&self) -> Vec<PrimeDivisor> {
        (0..self.dim()).map(|i| self.hyperplane(i).expect("axis in range")).collect()
    }

    pub fn axis_of(&self, p: &PrimeDivisor) -> Option<usize> {
        p.axis_in(&self.name).filter(|&a| a < self.dim())
    }

    /// Multiplicity per axis of a boundary supported on coordinate
    /// hyperplanes of this chart.
    pub fn axis_multiplicities(&self, b: &CPairBoundary) -> Result<Vec<crate::ext::Multiplicity>> {
        let mut out = vec![crate::ext::Multiplicity::ONE; self.dim()];
        for (p, m) in b.components() {
            let axis = self
                .axis_of(p)
                .ok_or_else(|| Error::NotCoordinateBoundary(p.id().to_string()))?;
            out[axis] = *m;
        }
        Ok(out)
    }

    /// Boundary on this chart from per-axis multiplicities.
    pub fn boundary(&self, mults: &[crate::ext::Multiplicity]) -> Result<CPairBoundary> {
        if mults.len() != self.dim() {
            return Err(Error::InvalidChart(format!(
                "{} multiplicities for a chart of dimension {}",
                mults.len(),
                self.dim()
            )));
        }
        CPairBoundary::from_multiplicities(
            mults.iter().enumerate().map(|(i, m)| (self.hyperplane(i).expect("axis in range"), *m)),
        )
    }
}

/// Pull-back of Q-divisors along a morphism.
pub trait PullBack {
    fn pullback(&self, d: &QDivisor) -> Result<QDivisor>;
}

pub fn pullback_qdiv(f: &impl PullBack, d: &QDivisor) -> Result<QDivisor> {
    f.pullback(d)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialCover {
    source: Chart,
    target: Chart,
    exponents: Vec<Vec<u64>>,
}

pub(crate) fn determinant(m: &[Vec<u64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

impl MonomialCover {
    pub fn new(source: Chart, target: Chart, exponents: Vec<Vec<u64>>) -> Result<Self> {
        let d = source.dim();
        if target.dim() != d {
            return Err(Error::ChartMismatch {
                expected: format!("dimension {d}"),
                found: format!("{} of dimension {}", target.name(), target.dim()),
            });
        }
        if exponents.len() != d || exponents.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidExponents(format!("expected a {d}x{d} matrix")));
        }
        if determinant(&exponents).is_zero() {
            return Err(Error::SingularExponents);
        }
        Ok(MonomialCover { source, target, exponents })
    }

    pub fn diagonal(source: Chart, target: Chart, exps: &[u64]) -> Result<Self> {
        let d = exps.len();
        let m = (0..d)
            .map(|i| (0..d).map(|j| if i == j { exps[i] } else { 0 }).collect())
            .collect();
        MonomialCover::new(source, target, m)
    }

    pub fn identity(chart: Chart) -> Self {
        let d = chart.dim();
        MonomialCover::diagonal(chart.clone(), chart, &vec![1; d]).expect("identity is regular")
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn exponents(&self) -> &[Vec<u64>] {
        &self.exponents
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.exponents[i][j]
    }

    pub fn determinant(&self) -> BigInt {
        determinant(&self.exponents)
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.exponents[i][j] == 0))
    }

    pub fn diagonal_exponents(&self) -> Option<Vec<u64>> {
        self.is_diagonal().then(|| (0..self.dim()).map(|i| self.exponents[i][i]).collect())
    }

    /// Finite exactly when every row and column has one nonzero entry.
    pub fn is_finite(&self) -> bool {
        let d = self.dim();
        let rows = (0..d).all(|i| (0..d).filter(|&j| self.exponents[i][j] != 0).count() == 1);
        let cols = (0..d).all(|j| (0..d).filter(|&i| self.exponents[i][j] != 0).count() == 1);
        rows && cols
    }

    /// Pull-back of the target hyperplane `{y_j = 0}`: column `j`.
    pub fn pullback_hyperplane(&self, j: usize) -> QDivisor {
        QDivisor::from_terms((0..self.dim()).map(|i| {
            (
                self.source.hyperplane(i).expect("axis in range"),
                qi(self.exponents[i][j] as i64),
            )
        }))
    }

    /// `K_source - gamma^* K_target = sum_i (rowsum_i - 1) {x_i = 0}`.
    pub fn relative_canonical(&self) -> QDivisor {
        QDivisor::from_terms(self.exponents.iter().enumerate().map(|(i, row)| {
            let s: u64 = row.iter().sum();
            (self.source.hyperplane(i).expect("axis in range"), qi(s as i64 - 1))
        }))
    }

    /// Target hyperplanes over which some source hyperplane ramifies: a row
    /// supported on the single column `j` with entry greater than one.
    pub fn branch(&self) -> BTreeSet<PrimeDivisor> {
        let d = self.dim();
        let mut out = BTreeSet::new();
        for row in &self.exponents {
            let nz: Vec<usize> = (0..d).filter(|&j| row[j] != 0).collect();
            if nz.len() == 1 && row[nz[0]] > 1 {
                out.insert(self.target.hyperplane(nz[0]).expect("axis in range"));
            }
        }
        out
    }

    /// Source hyperplanes along which the cover ramifies.
    pub fn ramification(&self) -> BTreeSet<PrimeDivisor> {
        let d = self.dim();
        (0..d)
            .filter(|&i| {
                let nz: Vec<usize> = (0..d).filter(|&j| self.exponents[i][j] != 0).collect();
                nz.len() == 1 && self.exponents[i][nz[0]] > 1
            })
            .map(|i| self.source.hyperplane(i).expect("axis in range"))
            .collect()
    }

    /// `self` followed by `g`, i.e. `g . self`.
    pub fn then(&self, g: &MonomialCover) -> Result<MonomialCover> {
        compose(self, g)
    }

    pub fn to_divisorial(&self) -> DivisorialMorphism {
        let mut phi = DivisorialMorphism::new(self.source.hyperplanes(), self.target.hyperplanes());
        for j in 0..self.dim() {
            let t = self.target.hyperplane(j).expect("axis in range");
            phi.set_pullback(t, self.pullback_hyperplane(j))
                .expect("columns of a regular matrix are nonzero");
        }
        phi
    }
}

impl PullBack for MonomialCover {
    fn pullback(&self, d: &QDivisor) -> Result<QDivisor> {
        let mut out = QDivisor::zero();
        for (p, c) in d.terms() {
            let j = self
                .target
                .axis_of(p)
                .ok_or_else(|| Error::UnknownPrime(p.id().to_string()))?;
            out = &out + &self.pullback_hyperplane(j).scale(c);
        }
        Ok(out)
    }
}

/// `g . f` for `f: A -> B` and `g: B -> C`; the exponent matrix is `E_f E_g`.
pub fn compose(f: &MonomialCover, g: &MonomialCover) -> Result<MonomialCover> {
    if f.target != g.source {
        return Err(Error::ChartMismatch {
            expected: f.target.name().to_string(),
            found: g.source.name().to_string(),
        });
    }
    let d = f.dim();
    let mut m = vec![vec![0u64; d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut s: u64 = 0;
            for k in 0..d {
                s = f.exponents[i][k]
                    .checked_mul(g.exponents[k][j])
                    .and_then(|x| s.checked_add(x))
                    .ok_or_else(|| Error::InvalidExponents("exponent overflow".into()))?;
            }
            m[i][j] = s;
        }
    }
    MonomialCover::new(f.source.clone(), g.target.clone(), m)
}

/// A morphism known only through the pull-back multiplicities of target
/// primes. Target primes listed in `image_inside` contain the image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorialMorphism {
    source: BTreeSet<PrimeDivisor>,
    target: BTreeSet<PrimeDivisor>,
    pullback: BTreeMap<PrimeDivisor, QDivisor>,
    exceptional: BTreeSet<PrimeDivisor>,
    image_inside: BTreeSet<PrimeDivisor>,
}

impl DivisorialMorphism {
    pub fn new(
        source: impl IntoIterator<Item = PrimeDivisor>,
        target: impl IntoIterator<Item = PrimeDivisor>,
    ) -> Self {
        DivisorialMorphism {
            source: source.into_iter().collect(),
            target: target.into_iter().collect(),
            pullback: BTreeMap::new(),
            exceptional: BTreeSet::new(),
            image_inside: BTreeSet::new(),
        }
    }

    /// Identity on a set of primes.
    pub fn identity(primes: impl IntoIterator<Item = PrimeDivisor>) -> Self {
        let primes: BTreeSet<PrimeDivisor> = primes.into_iter().collect();
        let mut phi = DivisorialMorphism::new(primes.clone(), primes.clone());
        for p in primes {
            phi.pullback.insert(p.clone(), QDivisor::prime(p));
        }
        phi
    }

    pub fn add_source_prime(&mut self, p: PrimeDivisor) {
        self.source.insert(p);
    }

    pub fn add_target_prime(&mut self, p: PrimeDivisor) {
        self.target.insert(p);
    }

    /// Records `phi^* t = d`; `d` must be a nonzero effective integral
    /// divisor on source primes.
    pub fn set_pullback(&mut self, t: PrimeDivisor, d: QDivisor) -> Result<()> {
        if !self.target.contains(&t) {
            return Err(Error::UnknownPrime(t.id().to_string()));
        }
        if d.is_zero() {
            return Err(Error::InvalidMorphism(format!("pull-back of {t} is zero")));
        }
        for (s, c) in d.terms() {
            if !self.source.contains(s) {
                return Err(Error::UnknownPrime(s.id().to_string()));
            }
            if !c.is_integer() || c.is_negative() {
                return Err(Error::InvalidMorphism(format!(
                    "multiplicity of {s} in the pull-back of {t} must be a non-negative integer"
                )));
            }
        }
        self.pullback.insert(t, d);
        Ok(())
    }

    pub fn mark_exceptional(&mut self, e: PrimeDivisor) -> Result<()> {
        if !self.source.contains(&e) {
            return Err(Error::UnknownPrime(e.id().to_string()));
        }
        self.exceptional.insert(e);
        Ok(())
    }

    pub fn mark_image_inside(&mut self, t: PrimeDivisor) -> Result<()> {
        if !self.target.contains(&t) {
            return Err(Error::UnknownPrime(t.id().to_string()));
        }
        self.image_inside.insert(t);
        Ok(())
    }

    pub fn source_primes(&self) -> &BTreeSet<PrimeDivisor> {
        &self.source
    }

    pub fn target_primes(&self) -> &BTreeSet<PrimeDivisor> {
        &self.target
    }

    pub fn exceptional(&self) -> &BTreeSet<PrimeDivisor> {
        &self.exceptional
    }

    pub fn image_inside(&self) -> &BTreeSet<PrimeDivisor> {
        &self.image_inside
    }

    pub fn pullback_of(&self, t: &PrimeDivisor) -> Result<&QDivisor> {
        self.pullback
            .get(t)
            .ok_or_else(|| Error::UnknownPrime(t.id().to_string()))
    }

    /// `mult_s phi^* t` as an integer.
    pub fn multiplicity(&self, s: &PrimeDivisor, t: &PrimeDivisor) -> Result<u64> {
        let c = self.pullback_of(t)?.coeff(s);
        Ok(c.to_integer().to_u64().expect("validated non-negative integer"))
    }

    /// Checks that no exceptional prime is the only preimage of a target
    /// prime (it would then be a strict transform).
    pub fn validate(&self) -> Result<()> {
        for t in &self.target {
            let d = self.pullback_of(t)?;
            if d.support().iter().all(|s| self.exceptional.contains(s)) {
                return Err(Error::InvalidMorphism(format!(
                    "{t} pulls back to exceptional primes only"
                )));
            }
        }
        Ok(())
    }

    /// The target prime a non-exceptional source prime maps onto: the unique
    /// target prime whose pull-back contains it.
    pub fn image_of(&self, s: &PrimeDivisor) -> Result<Option<PrimeDivisor>> {
        if self.exceptional.contains(s) {
            return Ok(None);
        }
        let hits: Vec<&PrimeDivisor> = self
            .pullback
            .iter()
            .filter(|(_, d)| !d.coeff(s).is_zero())
            .map(|(t, _)| t)
            .collect();
        match hits.as_slice() {
            [t] => Ok(Some((*t).clone())),
            [] => Err(Error::InvalidMorphism(format!("{s} has no declared image"))),
            _ => Err(Error::InvalidMorphism(format!("{s} lies over several target primes"))),
        }
    }

    /// Push-forward along a birational morphism: exceptional terms are
    /// dropped, the rest map onto their images.
    pub fn pushforward_birational(&self, d: &QDivisor) -> Result<QDivisor> {
        let mut out = QDivisor::zero();
        for (s, c) in d.terms() {
            if !self.source.contains(s) {
                return Err(Error::UnknownPrime(s.id().to_string()));
            }
            if let Some(t) = self.image_of(s)? {
                out.add_term(t, c.clone());
            }
        }
        Ok(out)
    }
}

impl PullBack for DivisorialMorphism {
    fn pullback(&self, d: &QDivisor) -> Result<QDivisor> {
        let mut out = QDivisor::zero();
        for (t, c) in d.terms() {
            out = &out + &self.pullback_of(t)?.scale(c);
        }
        Ok(out)
    }
}

/// Restriction of a coordinate-hyperplane pair to `{x_axis = 0}`. A
/// boundary component along that hyperplane is removed first.
pub fn restrict_pair(chart: &Chart, b: &CPairBoundary, axis: usize) -> Result<(Chart, CPairBoundary)> {
    let axis_name = chart.axis_name(axis)?.to_string();
    if chart.dim() < 2 {
        return Err(Error::InvalidChart(format!("cannot restrict the curve chart {}", chart.name())));
    }
    let axes: Vec<String> = chart
        .axes()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != axis)
        .map(|(_, a)| a.clone())
        .collect();
    let sub = Chart::with_axes(format!("{}|{}", chart.name(), axis_name), axes)?;
    let mut out = CPairBoundary::empty();
    for (p, m) in b.components() {
        let i = chart
            .axis_of(p)
            .ok_or_else(|| Error::NotCoordinateBoundary(p.id().to_string()))?;
        if i == axis {
            continue;
        }
        let j = if i > axis { i - 1 } else { i };
        out.insert(sub.hyperplane(j)?, *m)?;
    }
    Ok((sub, out))
}
