//! Morphism criteria on divisorially presented data.
//!
//! The orbifold criterion and the pluricanonical pull-back test are reported
//! separately; they are never merged into a single verdict.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::adapted::{compute_adapted, BasisTensor, CoverSetup};
use crate::divisor::{CPairBoundary, PrimeDivisor, QDivisor};
use crate::error::{Error, Result};
use crate::ext::{qi, ExtRational, Multiplicity, Q};
use crate::geometry::{DivisorialMorphism, PullBack};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// A violated inequality `lhs >= rhs` at the pair `(source, target)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub source: PrimeDivisor,
    pub target: PrimeDivisor,
    pub lhs: ExtRational,
    pub rhs: ExtRational,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}): {} < {}", self.source, self.target, self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismVerdict {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
}

impl MorphismVerdict {
    fn from_witnesses(witnesses: Vec<Witness>) -> Self {
        MorphismVerdict { verdict: Verdict::from_bool(witnesses.is_empty()), witnesses }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// `(mult_{D_X} phi^* D_Y) * (mult_C D_X) >= mult_C D_Y` for every source
/// prime `D_X` over every target prime `D_Y`.
pub fn orbifold_morphism(
    phi: &DivisorialMorphism,
    b_x: &CPairBoundary,
    b_y: &CPairBoundary,
) -> Result<MorphismVerdict> {
    for t in b_y.support() {
        if !phi.target_primes().contains(&t) {
            return Err(Error::UnknownPrime(t.id().to_string()));
        }
        if phi.image_inside().contains(&t) {
            return Err(Error::InvalidMorphism(format!("the image lies inside the boundary component {t}")));
        }
    }
    for s in b_x.support() {
        if !phi.source_primes().contains(&s) {
            return Err(Error::UnknownPrime(s.id().to_string()));
        }
    }
    let mut witnesses = Vec::new();
    for t in phi.target_primes() {
        let rhs = b_y.c_multiplicity(t);
        for (s, k) in phi.pullback_of(t)?.terms() {
            let lhs = ExtRational::Finite(k.clone()).mul(&b_x.c_multiplicity(s))?;
            if lhs < rhs {
                witnesses.push(Witness { source: s.clone(), target: t.clone(), lhs, rhs: rhs.clone() });
            }
        }
    }
    Ok(MorphismVerdict::from_witnesses(witnesses))
}

/// The local normal form: one source boundary component `{x = 0}` of
/// multiplicity `n`, target components `{y_i = 0}` of multiplicity `n_i`
/// with `y_i = x^(a_i)` up to units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcNormalForm {
    pub n: Multiplicity,
    pub components: Vec<(u64, Multiplicity)>,
}

impl NcNormalForm {
    /// Presentation as a divisorial morphism with source prime `S` and
    /// target primes `T1, T2, ...`. Components with `a_i = 0` do not meet
    /// the source component and are left out.
    pub fn to_divisorial(&self) -> Result<(DivisorialMorphism, CPairBoundary, CPairBoundary)> {
        let s = PrimeDivisor::abstract_prime("S");
        let targets: Vec<(PrimeDivisor, u64, Multiplicity)> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, (a, _))| *a > 0)
            .map(|(i, (a, m))| (PrimeDivisor::abstract_prime(format!("T{}", i + 1)), *a, *m))
            .collect();
        let mut phi = DivisorialMorphism::new([s.clone()], targets.iter().map(|t| t.0.clone()));
        for (t, a, _) in &targets {
            phi.set_pullback(t.clone(), QDivisor::term(s.clone(), qi(*a as i64)))?;
        }
        let b_x = CPairBoundary::from_multiplicities([(s, self.n)])?;
        let b_y = CPairBoundary::from_multiplicities(targets.into_iter().map(|(t, _, m)| (t, m)))?;
        Ok((phi, b_x, b_y))
    }
}

/// Decides the normal form through adapted one-forms. With
/// `N = n * prod n_i`, the cover `z -> z^N` is adapted to the source pair,
/// and the adapted generator `y_i^(1/n_i) dlog y_i` pulls back to a multiple
/// of `z^(N a_i / n_i - 1) dz`; the component passes iff this lies in the
/// adapted one-forms of the source.
pub fn nc_cmorphism(nf: &NcNormalForm) -> Result<MorphismVerdict> {
    let s = PrimeDivisor::abstract_prime("S");
    let mut witnesses = Vec::new();
    let finite_targets: Vec<u64> = nf.components.iter().filter_map(|(_, m)| m.finite()).collect();
    for (i, (a, n_i)) in nf.components.iter().enumerate() {
        if *a == 0 {
            continue;
        }
        let t = PrimeDivisor::abstract_prime(format!("T{}", i + 1));
        let lhs = ExtRational::int(*a as i64).mul(&nf.n.to_ext())?;
        let rhs = n_i.to_ext();
        let ok = match (nf.n, n_i) {
            (Multiplicity::Infinite, _) => true,
            (Multiplicity::Finite(_), Multiplicity::Infinite) => false,
            (Multiplicity::Finite(n), Multiplicity::Finite(m)) => {
                let big_n = finite_targets
                    .iter()
                    .try_fold(n, |acc, x| acc.checked_mul(*x))
                    .ok_or_else(|| Error::InvalidMorphism("normal form multiplicities too large".into()))?;
                let setup = CoverSetup::diagonal(&[Multiplicity::Finite(n)], &[big_n])?;
                let sheaf = compute_adapted(&setup, 1, 1)?;
                let dz = BasisTensor::new(1, vec![vec![0]])?;
                let allowance = sheaf.allowance(&dz).expect("one-form basis")[0];
                let exponent = (big_n * a / m) as i64 - 1;
                exponent >= -allowance
            }
        };
        if !ok {
            witnesses.push(Witness { source: s.clone(), target: t, lhs, rhs });
        }
    }
    Ok(MorphismVerdict::from_witnesses(witnesses))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluricanonicalReport {
    pub verdict: Verdict,
    /// `(m K_X + floor(m B_X)) - phi^* (m K_Y + floor(m B_Y))`.
    pub defect: QDivisor,
}

/// Whether pull-back of pluricanonical forms extends: the defect must be
/// effective.
pub fn pluricanonical_pullback(
    phi: &DivisorialMorphism,
    k_x: &QDivisor,
    b_x: &CPairBoundary,
    k_y: &QDivisor,
    b_y: &CPairBoundary,
    m: u64,
) -> Result<PluricanonicalReport> {
    if m == 0 {
        return Err(Error::InvalidMorphism("pluricanonical degree must be positive".into()));
    }
    let mq = qi(m as i64);
    let upstairs = &k_x.scale(&mq) + &b_x.to_qdivisor().scale(&mq).floor();
    let downstairs = &k_y.scale(&mq) + &b_y.to_qdivisor().scale(&mq).floor();
    let defect = &upstairs - &phi.pullback(&downstairs)?;
    Ok(PluricanonicalReport { verdict: Verdict::from_bool(defect.is_effective()), defect })
}

/// Canonical divisors of source and target of a presented morphism.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CanonicalModel {
    pub k_source: Option<QDivisor>,
    pub k_target: Option<QDivisor>,
}

impl CanonicalModel {
    pub fn new(k_source: QDivisor, k_target: QDivisor) -> Self {
        CanonicalModel { k_source: Some(k_source), k_target: Some(k_target) }
    }

    /// `K_X = phi^* K_Y + sum a_E E`.
    pub fn from_discrepancies(
        phi: &DivisorialMorphism,
        k_target: QDivisor,
        discrepancies: impl IntoIterator<Item = (PrimeDivisor, Q)>,
    ) -> Result<Self> {
        let mut k_source = phi.pullback(&k_target)?;
        for (e, a) in discrepancies {
            if !phi.exceptional().contains(&e) {
                return Err(Error::InvalidMorphism(format!("{e} is not exceptional")));
            }
            k_source.add_term(e, a);
        }
        Ok(CanonicalModel::new(k_source, k_target))
    }

    fn get(&self) -> Result<(&QDivisor, &QDivisor)> {
        match (&self.k_source, &self.k_target) {
            (Some(s), Some(t)) => Ok((s, t)),
            (None, _) => Err(Error::MissingCanonical("K_source".into())),
            (_, None) => Err(Error::MissingCanonical("K_target".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogCanonicalReport {
    pub verdict: Verdict,
    /// `a(E)` with `K_X + phi^{-1}_* B = phi^*(K_Y + B) + sum a(E) E`.
    pub discrepancies: BTreeMap<PrimeDivisor, Q>,
    /// `(K_X + B_X) - phi^*(K_Y + B)` for the supplied source boundary, or
    /// for the strict transform when none is given.
    pub relative: QDivisor,
}

/// Strict transform of a divisor: non-exceptional preimage components.
pub fn strict_transform(phi: &DivisorialMorphism, d: &QDivisor) -> Result<QDivisor> {
    let mut out = QDivisor::zero();
    for (t, c) in d.terms() {
        for (s, _) in phi.pullback_of(t)?.terms() {
            if !phi.exceptional().contains(s) {
                out.add_term(s.clone(), c.clone());
            }
        }
    }
    Ok(out)
}

/// Log canonical iff every exceptional discrepancy is at least -1.
pub fn log_canonical_check(
    phi: &DivisorialMorphism,
    model: &CanonicalModel,
    b: &CPairBoundary,
    b_x: Option<&CPairBoundary>,
) -> Result<LogCanonicalReport> {
    let (k_x, k_y) = model.get()?;
    let by = b.to_qdivisor();
    let pulled = phi.pullback(&(k_y + &by))?;
    let strict = strict_transform(phi, &by)?;
    let diff = &(k_x + &strict) - &pulled;
    let discrepancies: BTreeMap<PrimeDivisor, Q> =
        phi.exceptional().iter().map(|e| (e.clone(), diff.coeff(e))).collect();
    let ok = discrepancies.values().all(|a| a >= &-Q::one());
    let relative = match b_x {
        Some(bx) => &(k_x + &bx.to_qdivisor()) - &pulled,
        None => diff,
    };
    Ok(LogCanonicalReport { verdict: Verdict::from_bool(ok), discrepancies, relative })
}

/// `phi^* D_1 >= D_2` for the identity: termwise comparison of boundaries.
pub fn compare_boundaries(b1: &CPairBoundary, b2: &CPairBoundary) -> MorphismVerdict {
    let d1 = b1.to_qdivisor();
    let d2 = b2.to_qdivisor();
    let mut witnesses = Vec::new();
    for p in d2.support() {
        let lhs = d1.coeff(&p);
        let rhs = d2.coeff(&p);
        if lhs < rhs {
            witnesses.push(Witness {
                source: p.clone(),
                target: p,
                lhs: ExtRational::Finite(lhs),
                rhs: ExtRational::Finite(rhs),
            });
        }
    }
    debug_assert_eq!(witnesses.is_empty(), d1.geq(&d2));
    MorphismVerdict::from_witnesses(witnesses)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBirationalReport {
    pub verdict: Verdict,
    /// `alpha^*(alpha_* K_Z + D_X)`.
    pub lhs: QDivisor,
    /// `beta^*(beta_* K_Z + D_Y)`.
    pub rhs: QDivisor,
}

pub fn b_birational(
    alpha: &DivisorialMorphism,
    beta: &DivisorialMorphism,
    k_z: &QDivisor,
    b_x: &CPairBoundary,
    b_y: &CPairBoundary,
) -> Result<BBirationalReport> {
    if alpha.source_primes() != beta.source_primes() {
        return Err(Error::InvalidMorphism("alpha and beta must share their source".into()));
    }
    let lhs = alpha.pullback(&(&alpha.pushforward_birational(k_z)? + &b_x.to_qdivisor()))?;
    let rhs = beta.pullback(&(&beta.pushforward_birational(k_z)? + &b_y.to_qdivisor()))?;
    let verdict = Verdict::from_bool(lhs == rhs);
    Ok(BBirationalReport { verdict, lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::q;

    fn p(id: &str) -> PrimeDivisor {
        PrimeDivisor::abstract_prime(id)
    }

    #[test]
    fn normal_form_arithmetic() {
        let nf = NcNormalForm { n: Multiplicity::Finite(2), components: vec![(2, Multiplicity::Finite(3))] };
        assert!(nc_cmorphism(&nf).unwrap().passed());
        let nf = NcNormalForm { n: Multiplicity::Finite(1), components: vec![(1, Multiplicity::Finite(2))] };
        let v = nc_cmorphism(&nf).unwrap();
        assert!(!v.passed());
        assert_eq!(v.witnesses[0].lhs, ExtRational::int(1));
        let nf = NcNormalForm { n: Multiplicity::Infinite, components: vec![(1, Multiplicity::Infinite)] };
        assert!(nc_cmorphism(&nf).unwrap().passed());
        let nf = NcNormalForm { n: Multiplicity::Finite(7), components: vec![(3, Multiplicity::Infinite)] };
        assert!(!nc_cmorphism(&nf).unwrap().passed());
    }

    #[test]
    fn identity_with_equal_boundaries() {
        let d = p("D");
        let phi = DivisorialMorphism::identity([d.clone()]);
        let b = CPairBoundary::from_multiplicities([(d.clone(), Multiplicity::Finite(2))]).unwrap();
        let r = pluricanonical_pullback(&phi, &QDivisor::zero(), &b, &QDivisor::zero(), &b, 4).unwrap();
        assert!(r.defect.is_zero());
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(orbifold_morphism(&phi, &b, &b).unwrap().passed());
    }

    #[test]
    fn boundary_comparison() {
        let d = p("D");
        let two = CPairBoundary::from_multiplicities([(d.clone(), Multiplicity::Finite(2))]).unwrap();
        let three = CPairBoundary::from_multiplicities([(d.clone(), Multiplicity::Finite(3))]).unwrap();
        assert!(compare_boundaries(&three, &two).passed());
        let v = compare_boundaries(&two, &three);
        assert!(!v.passed());
        assert_eq!(v.witnesses[0].rhs, ExtRational::Finite(q(2, 3)));
    }

    #[test]
    fn smooth_model_is_log_canonical() {
        let d = p("D");
        let phi = DivisorialMorphism::identity([d]);
        let model = CanonicalModel::new(QDivisor::zero(), QDivisor::zero());
        let r = log_canonical_check(&phi, &model, &CPairBoundary::empty(), None).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.discrepancies.is_empty());
        assert!(matches!(
            log_canonical_check(&phi, &CanonicalModel::default(), &CPairBoundary::empty(), None),
            Err(Error::MissingCanonical(_))
        ));
    }

    #[test]
    fn image_inside_the_boundary_is_rejected() {
        let d = p("D");
        let mut phi = DivisorialMorphism::identity([d.clone()]);
        phi.mark_image_inside(d.clone()).unwrap();
        let b = CPairBoundary::from_multiplicities([(d, Multiplicity::Finite(2))]).unwrap();
        assert!(matches!(orbifold_morphism(&phi, &b, &b), Err(Error::InvalidMorphism(_))));
    }
}
