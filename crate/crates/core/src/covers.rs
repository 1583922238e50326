//! Adapted covers, cyclic covers and quotient pairs.

use std::collections::{BTreeMap, BTreeSet};

use crate::divisor::{CPairBoundary, PrimeDivisor, QDivisor};
use crate::error::{Error, Result};
use crate::ext::Multiplicity;
use crate::geometry::{Chart, DivisorialMorphism, MonomialCover, PullBack};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverClassification {
    pub is_finite: bool,
    pub is_adapted: bool,
    pub is_strongly_adapted: bool,
    pub is_uniformization: bool,
    pub branch: BTreeSet<PrimeDivisor>,
    pub branch_in_support: bool,
    /// `gamma^* D_orb`.
    pub pulled_back_orb: QDivisor,
}

/// Adapted means `gamma^* D_orb` is integral, strongly adapted that it is
/// also reduced. A uniformization is a finite strongly adapted cover whose
/// branch locus lies in the boundary.
pub fn classify_cover(gamma: &MonomialCover, b: &CPairBoundary) -> Result<CoverClassification> {
    gamma.target().axis_multiplicities(b)?;
    let pulled = gamma.pullback(&b.d_orb())?;
    let is_adapted = pulled.is_integral();
    let is_strongly_adapted = is_adapted && pulled.is_reduced();
    let branch = gamma.branch();
    let support = b.support();
    let branch_in_support = branch.iter().all(|p| support.contains(p));
    let is_finite = gamma.is_finite();
    Ok(CoverClassification {
        is_finite,
        is_adapted,
        is_strongly_adapted,
        is_uniformization: is_finite && is_strongly_adapted && branch_in_support,
        branch,
        branch_in_support,
        pulled_back_orb: pulled,
    })
}

/// Cyclic cover `y^n = prod f_i^(n/m_i)` of a boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicCoverSpec {
    pub degree: u64,
    pub exponents: BTreeMap<PrimeDivisor, u64>,
}

pub fn cyclic_adapted_cover(b: &CPairBoundary) -> CyclicCoverSpec {
    let n = b.lcm();
    let exponents = b
        .components()
        .filter_map(|(p, m)| m.finite().map(|m| (p.clone(), n / m)))
        .collect();
    CyclicCoverSpec { degree: n, exponents }
}

impl CyclicCoverSpec {
    /// Local model on a chart whose boundary is coordinate: over `D_i` the
    /// normalized cover ramifies with index `n / (n/m_i) = m_i`.
    pub fn local_cover(&self, chart: &Chart) -> Result<MonomialCover> {
        let mut exps = vec![1u64; chart.dim()];
        for (p, e) in &self.exponents {
            let axis = chart
                .axis_of(p)
                .ok_or_else(|| Error::NotCoordinateBoundary(p.id().to_string()))?;
            exps[axis] = self.degree / e;
        }
        let source = Chart::with_axes(format!("{}^", chart.name()), chart.axes().to_vec())?;
        MonomialCover::diagonal(source, chart.clone(), &exps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientEntry {
    pub prime: PrimeDivisor,
    /// `(H', mult_H' q^* H, mult_C,H' B_X)` for each preimage component.
    pub preimages: Vec<(PrimeDivisor, u64, Multiplicity)>,
    pub m_h: Multiplicity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientData {
    pub entries: Vec<QuotientEntry>,
    /// `q^* (D_Q)_orb` is integral and reduced.
    pub strongly_adapted: bool,
}

/// Quotient boundary `m_H = (mult_H' q^* H) * (mult_C,H' B_X)`.
pub fn quotient_pair(b_x: &CPairBoundary, q: &DivisorialMorphism) -> Result<(CPairBoundary, QuotientData)> {
    let mut boundary = CPairBoundary::empty();
    let mut entries = Vec::new();
    for h in q.target_primes() {
        let pulled = q.pullback_of(h)?;
        let preimages: Vec<(PrimeDivisor, u64, Multiplicity)> = pulled
            .terms()
            .map(|(s, _)| {
                let k = q.multiplicity(s, h).expect("prime of the pull-back");
                (s.clone(), k, b_x.multiplicity(s))
            })
            .collect();
        let values: BTreeSet<Multiplicity> = preimages.iter().map(|(_, k, m)| m.times(*k)).collect();
        if values.len() != 1 {
            let shown: Vec<String> = values.iter().map(|m| m.to_string()).collect();
            return Err(Error::InconsistentOrbit {
                prime: h.id().to_string(),
                values: shown.join(", "),
            });
        }
        let m_h = *values.iter().next().expect("one value");
        boundary.insert(h.clone(), m_h)?;
        entries.push(QuotientEntry { prime: h.clone(), preimages, m_h });
    }
    let pulled = q.pullback(&boundary.d_orb())?;
    let strongly_adapted = pulled.is_integral() && pulled.is_reduced();
    Ok((boundary, QuotientData { entries, strongly_adapted }))
}

/// The pair `(X, D'_X)`: quotient of `(X^, (gamma^* floor(B))_red)` by the
/// deck group of a Galois monomial cover.
pub fn galois_quotient_boundary(gamma: &MonomialCover, b: &CPairBoundary) -> Result<CPairBoundary> {
    let log_part = CPairBoundary::from_multiplicities(
        b.components()
            .filter(|(_, m)| !m.is_finite())
            .map(|(p, m)| (p.clone(), *m)),
    )?;
    let upstairs = gamma.pullback(&log_part.to_qdivisor())?.reduce();
    let b_hat = CPairBoundary::from_multiplicities(
        upstairs.support().into_iter().map(|p| (p, Multiplicity::Infinite)),
    )?;
    Ok(quotient_pair(&b_hat, &gamma.to_divisorial())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{q, qi, Multiplicity::*};

    fn line(name: &str) -> Chart {
        Chart::with_axes(name, vec!["z".into()]).unwrap()
    }

    #[test]
    fn power_map_over_one_point() {
        let x = line("X");
        for m in [2u64, 3, 5] {
            let b = x.boundary(&[Finite(m)]).unwrap();
            for alpha in 1..=3u64 {
                let g = MonomialCover::diagonal(line("Xh"), x.clone(), &[alpha * m]).unwrap();
                let c = classify_cover(&g, &b).unwrap();
                assert!(c.is_adapted);
                assert_eq!(c.is_strongly_adapted, alpha == 1);
                assert_eq!(c.is_uniformization, alpha == 1);
                assert_eq!(
                    c.pulled_back_orb,
                    QDivisor::term(g.source().hyperplane(0).unwrap(), qi(alpha as i64))
                );
            }
        }
    }

    #[test]
    fn identity_is_not_adapted_to_a_finite_boundary() {
        let x = line("X");
        let c = classify_cover(&MonomialCover::identity(x.clone()), &x.boundary(&[Finite(2)]).unwrap()).unwrap();
        assert!(!c.is_adapted);
    }

    #[test]
    fn surface_cover_along_one_axis() {
        let x = Chart::with_axes("X", vec!["x".into(), "y".into()]).unwrap();
        let xh = Chart::with_axes("Xh", vec!["x".into(), "y".into()]).unwrap();
        let b = x.boundary(&[Finite(1), Finite(3)]).unwrap();
        for alpha in 1..=3u64 {
            let g = MonomialCover::diagonal(xh.clone(), x.clone(), &[1, 3 * alpha]).unwrap();
            let c = classify_cover(&g, &b).unwrap();
            assert!(c.is_adapted);
            assert_eq!(c.is_uniformization, alpha == 1);
        }
    }

    #[test]
    fn cyclic_cover_degrees() {
        let x = Chart::new("X", 2).unwrap();
        let b = x.boundary(&[Finite(2), Finite(3)]).unwrap();
        let spec = cyclic_adapted_cover(&b);
        assert_eq!(spec.degree, 6);
        let exps: Vec<u64> = spec.exponents.values().copied().collect();
        assert_eq!(exps, vec![3, 2]);
        let cover = spec.local_cover(&x).unwrap();
        assert!(classify_cover(&cover, &b).unwrap().is_strongly_adapted);

        let inf = x.boundary(&[Infinite, Finite(1)]).unwrap();
        assert_eq!(cyclic_adapted_cover(&inf).degree, 1);
        let four = x.boundary(&[Finite(4), Finite(1)]).unwrap();
        let s4 = cyclic_adapted_cover(&four);
        assert_eq!((s4.degree, s4.exponents.values().copied().collect::<Vec<_>>()), (4, vec![1]));
    }

    #[test]
    fn quotient_of_power_map() {
        let g = MonomialCover::diagonal(line("Xh"), line("X"), &[3]).unwrap();
        let (dq, data) = quotient_pair(&CPairBoundary::empty(), &g.to_divisorial()).unwrap();
        assert_eq!(dq.to_qdivisor(), QDivisor::term(line("X").hyperplane(0).unwrap(), q(2, 3)));
        assert!(data.strongly_adapted);

        let b_inf = line("Xh").boundary(&[Infinite]).unwrap();
        let g2 = MonomialCover::diagonal(line("Xh"), line("X"), &[2]).unwrap();
        let (dq2, _) = quotient_pair(&b_inf, &g2.to_divisorial()).unwrap();
        assert_eq!(dq2.to_qdivisor(), QDivisor::prime(line("X").hyperplane(0).unwrap()));
    }

    #[test]
    fn quotient_without_ramification_divisor() {
        // A^2 -> A^2/{+-1}: the quotient map is etale in codimension one, so
        // the divisorial presentation has only trivial multiplicities.
        let h = PrimeDivisor::abstract_prime("H");
        let h1 = PrimeDivisor::abstract_prime("H'");
        let mut q = DivisorialMorphism::new([h1.clone()], [h.clone()]);
        q.set_pullback(h, QDivisor::prime(h1)).unwrap();
        let (dq, data) = quotient_pair(&CPairBoundary::empty(), &q).unwrap();
        assert!(dq.is_empty());
        assert!(data.strongly_adapted);
    }

    #[test]
    fn inconsistent_orbit() {
        let h = PrimeDivisor::abstract_prime("H");
        let a = PrimeDivisor::abstract_prime("A");
        let b = PrimeDivisor::abstract_prime("B");
        let mut q = DivisorialMorphism::new([a.clone(), b.clone()], [h.clone()]);
        q.set_pullback(h, QDivisor::from_terms([(a.clone(), qi(2)), (b, qi(2))])).unwrap();
        let bx = CPairBoundary::from_multiplicities([(a, Finite(2))]).unwrap();
        assert!(matches!(quotient_pair(&bx, &q), Err(Error::InconsistentOrbit { .. })));
    }
}
