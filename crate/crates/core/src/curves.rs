//! Orbifold curves: degrees, Riemann-Hurwitz, irregularity of covers and
//! the C-Kodaira dimension.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ext::{lcm_finite, qi, Multiplicity, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbifoldCurve {
    genus: u64,
    points: Vec<Multiplicity>,
}

impl OrbifoldCurve {
    pub fn new(genus: u64, points: impl IntoIterator<Item = Multiplicity>) -> Result<Self> {
        let points: Vec<Multiplicity> = points.into_iter().collect();
        for m in &points {
            if let Multiplicity::Finite(k) = m {
                if *k < 2 {
                    return Err(Error::InvalidMultiplicity(k.to_string()));
                }
            }
        }
        Ok(OrbifoldCurve { genus, points })
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }

    pub fn points(&self) -> &[Multiplicity] {
        &self.points
    }

    pub fn with_point(&self, m: Multiplicity) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.push(m);
        OrbifoldCurve::new(self.genus, pts)
    }

    fn lcm(&self) -> u64 {
        lcm_finite(&self.points)
    }
}

impl fmt::Display for OrbifoldCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|m| m.to_string()).collect();
        write!(f, "genus {} points [{}]", self.genus, pts.join(","))
    }
}

/// `deg(K + D) = 2g - 2 + sum (m_j - 1)/m_j`.
pub fn curve_degree(c: &OrbifoldCurve) -> Q {
    c.points
        .iter()
        .fold(qi(2 * c.genus as i64 - 2), |acc, m| acc + m.coefficient())
}

/// A cover of a curve. `profiles[j]` is the ramification over the j-th
/// marked point; `extra` lists branch points outside the boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveCover {
    pub degree: u64,
    pub profiles: Vec<Vec<u64>>,
    pub extra: Vec<Vec<u64>>,
}

impl CurveCover {
    pub fn etale(degree: u64, marked: usize) -> Self {
        CurveCover {
            degree,
            profiles: vec![vec![1; degree as usize]; marked],
            extra: Vec::new(),
        }
    }

    fn validate(&self, c: &OrbifoldCurve) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::InvalidProfile("degree 0".into()));
        }
        if self.profiles.len() != c.points.len() {
            return Err(Error::InvalidProfile(format!(
                "{} profiles for {} marked points",
                self.profiles.len(),
                c.points.len()
            )));
        }
        for p in self.profiles.iter().chain(&self.extra) {
            if p.contains(&0) || p.iter().sum::<u64>() != self.degree {
                return Err(Error::InvalidProfile(format!("{p:?} is not a partition of {}", self.degree)));
            }
        }
        Ok(())
    }
}

/// Genus of the total space from `2g^ - 2 = d(2g - 2) + sum (e - 1)`.
pub fn riemann_hurwitz_genus(c: &OrbifoldCurve, cover: &CurveCover) -> Result<u64> {
    cover.validate(c)?;
    let ram: i64 = cover
        .profiles
        .iter()
        .chain(&cover.extra)
        .flatten()
        .map(|e| *e as i64 - 1)
        .sum();
    let total = cover.degree as i64 * (2 * c.genus as i64 - 2) + ram;
    if total % 2 != 0 {
        return Err(Error::NonIntegralGenus(total.to_string()));
    }
    let g = total / 2 + 1;
    if g < 0 {
        return Err(Error::InvalidProfile(format!("negative genus {g}")));
    }
    Ok(g as u64)
}

/// Genera along an etale tower `X_k -> ... -> X_0` of the given degrees.
pub fn etale_tower(genus: u64, degrees: &[u64]) -> Result<Vec<u64>> {
    let mut out = vec![genus];
    let mut g = genus;
    for d in degrees {
        g = riemann_hurwitz_genus(&OrbifoldCurve::new(g, [])?, &CurveCover::etale(*d, 0))?;
        out.push(g);
    }
    Ok(out)
}

/// Section count of a line bundle, exact or bracketed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionCount {
    Exact(u64),
    Range { lower: u64, upper: u64 },
}

impl SectionCount {
    pub fn exact(self) -> Option<u64> {
        match self {
            SectionCount::Exact(k) => Some(k),
            SectionCount::Range { lower, upper } if lower == upper => Some(lower),
            _ => None,
        }
    }
}

impl fmt::Display for SectionCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectionCount::Exact(k) => write!(f, "{k}"),
            SectionCount::Range { lower, upper } => write!(f, "[{lower}, {upper}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrregularityReport {
    pub cover_genus: u64,
    /// Coefficients `a_P` of the twist `K_X^ + sum a_P P`, one per point of
    /// the cover over the boundary and the extra branch points.
    pub twist: Vec<i64>,
    pub degree: i64,
    pub q: SectionCount,
}

/// `h^0` of the adapted 1-forms `K_X^ + sum a_P P` on the cover, with
/// `a_P = 1 - e_P/m` over finite points and `a_P = 1` over points of
/// multiplicity inf.
pub fn curve_irregularity(c: &OrbifoldCurve, cover: &CurveCover) -> Result<IrregularityReport> {
    let g_hat = riemann_hurwitz_genus(c, cover)?;
    let mut twist = Vec::new();
    let mut log_points = 0u64;
    for (m, profile) in c.points.iter().zip(&cover.profiles) {
        for e in profile {
            match m {
                Multiplicity::Infinite => {
                    twist.push(1);
                    log_points += 1;
                }
                Multiplicity::Finite(m) => {
                    if e % m != 0 {
                        return Err(Error::NotAdapted(format!("ramification {e} over a point of multiplicity {m}")));
                    }
                    twist.push(1 - (e / m) as i64);
                }
            }
        }
    }
    for profile in &cover.extra {
        twist.extend(profile.iter().map(|e| 1 - *e as i64));
    }
    let g = g_hat as i64;
    let degree = 2 * g - 2 + twist.iter().sum::<i64>();
    let negative = twist.iter().any(|a| *a < 0);
    let q = if g == 0 {
        SectionCount::Exact((degree + 1).max(0) as u64)
    } else if !negative {
        SectionCount::Exact(if log_points == 0 { g_hat } else { g_hat + log_points - 1 })
    } else if degree < 0 {
        SectionCount::Exact(0)
    } else if degree > 2 * g - 2 {
        SectionCount::Exact((degree - g + 1) as u64)
    } else {
        let ambient = if log_points == 0 { g_hat } else { g_hat + log_points - 1 };
        SectionCount::Range {
            lower: (degree - g + 1).max(0) as u64,
            upper: ambient.min((degree / 2 + 1) as u64),
        }
    };
    Ok(IrregularityReport { cover_genus: g_hat, twist, degree, q })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kappa {
    NegInfinity,
    Zero,
    One,
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kappa::NegInfinity => "-inf",
            Kappa::Zero => "0",
            Kappa::One => "1",
        })
    }
}

/// One step of the pluricanonical scan on a rational curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanEntry {
    pub m: u64,
    /// `deg floor(m (K + D))`.
    pub degree: i64,
    pub h0: u64,
}

/// `deg floor(m(K + D))` on a rational curve and its section counts for
/// `m = 1..=2L`, with `L` the lcm of the finite multiplicities.
pub fn kappa_scan(c: &OrbifoldCurve) -> Vec<ScanEntry> {
    let bound = 2 * c.lcm();
    (1..=bound)
        .map(|m| {
            let mut degree = m as i64 * (2 * c.genus as i64 - 2);
            for p in &c.points {
                degree += match p {
                    Multiplicity::Infinite => m as i64,
                    Multiplicity::Finite(k) => (m * (k - 1) / k) as i64,
                };
            }
            // Riemann-Roch on P^1; other genera only use the degrees.
            let h0 = if c.genus == 0 { (degree + 1).max(0) as u64 } else { 0 };
            ScanEntry { m, degree, h0 }
        })
        .collect()
}

/// C-Kodaira dimension of `(C, D)`. On a rational curve it is read off the
/// section counts of [`kappa_scan`]; otherwise from the sign of the degree.
pub fn curve_kappa(c: &OrbifoldCurve) -> Kappa {
    if c.genus == 0 {
        let scan = kappa_scan(c);
        let l = scan.len() / 2;
        if scan.iter().all(|e| e.h0 == 0) {
            Kappa::NegInfinity
        } else if scan[2 * l - 1].h0 > scan[l - 1].h0 {
            Kappa::One
        } else {
            Kappa::Zero
        }
    } else {
        let d = curve_degree(c);
        if d.is_positive() {
            Kappa::One
        } else if d.is_zero() {
            Kappa::Zero
        } else {
            Kappa::NegInfinity
        }
    }
}

/// A curve is special when its canonical sheaf is not big.
pub fn curve_is_special(c: &OrbifoldCurve) -> bool {
    curve_kappa(c) < Kappa::One
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{q, Multiplicity::*};

    fn curve(g: u64, ms: &[Multiplicity]) -> OrbifoldCurve {
        OrbifoldCurve::new(g, ms.iter().copied()).unwrap()
    }

    #[test]
    fn degrees() {
        let c237 = curve(0, &[Finite(2), Finite(3), Finite(7)]);
        // 1/2 + 2/3 + 6/7 = 85/42
        assert_eq!(curve_degree(&c237), q(85 - 84, 42));
        assert_eq!(curve_degree(&curve(1, &[])), qi(0));
        assert_eq!(curve_degree(&curve(0, &[Infinite])), qi(-1));
    }

    #[test]
    fn kappa_values() {
        assert_eq!(curve_kappa(&curve(0, &[Finite(2), Finite(3), Finite(6)])), Kappa::Zero);
        assert_eq!(curve_kappa(&curve(0, &[Finite(2), Finite(3), Finite(7)])), Kappa::One);
        assert_eq!(curve_kappa(&curve(0, &[Finite(2), Finite(3), Finite(5)])), Kappa::NegInfinity);
        assert_eq!(curve_kappa(&curve(2, &[])), Kappa::One);
        assert_eq!(curve_kappa(&curve(1, &[])), Kappa::Zero);
        assert_eq!(curve_kappa(&curve(0, &[Infinite, Infinite])), Kappa::Zero);
        assert!(curve_is_special(&curve(1, &[])));
        assert!(!curve_is_special(&curve(2, &[])));
    }

    #[test]
    fn scan_at_six() {
        let scan = kappa_scan(&curve(0, &[Finite(2), Finite(3), Finite(6)]));
        assert_eq!(scan.len(), 12);
        assert_eq!((scan[5].degree, scan[5].h0), (0, 1));
        assert_eq!((scan[0].degree, scan[0].h0), (-2, 0));
    }

    #[test]
    fn riemann_hurwitz() {
        assert_eq!(riemann_hurwitz_genus(&curve(2, &[]), &CurveCover::etale(3, 0)).unwrap(), 4);
        let zk = CurveCover { degree: 5, profiles: vec![vec![5], vec![5]], extra: vec![] };
        assert_eq!(riemann_hurwitz_genus(&curve(0, &[Finite(5), Finite(5)]), &zk).unwrap(), 0);
        let hyper = CurveCover { degree: 2, profiles: vec![], extra: vec![vec![2]; 6] };
        assert_eq!(riemann_hurwitz_genus(&curve(0, &[]), &hyper).unwrap(), 2);
        let odd = CurveCover { degree: 2, profiles: vec![], extra: vec![vec![2]] };
        assert!(matches!(riemann_hurwitz_genus(&curve(0, &[]), &odd), Err(Error::NonIntegralGenus(_))));
        let bad = CurveCover { degree: 2, profiles: vec![], extra: vec![vec![3]] };
        assert!(matches!(riemann_hurwitz_genus(&curve(0, &[]), &bad), Err(Error::InvalidProfile(_))));
        assert_eq!(etale_tower(2, &[2, 2, 2]).unwrap(), vec![2, 3, 5, 9]);
    }

    #[test]
    fn irregularity() {
        let r = curve_irregularity(&curve(2, &[]), &CurveCover::etale(3, 0)).unwrap();
        assert_eq!(r.q, SectionCount::Exact(4));

        let c = curve(0, &[Finite(2), Finite(2)]);
        let cov = CurveCover { degree: 2, profiles: vec![vec![2], vec![2]], extra: vec![] };
        let r = curve_irregularity(&c, &cov).unwrap();
        assert_eq!((r.degree, r.q), (-2, SectionCount::Exact(0)));

        let not = CurveCover { degree: 3, profiles: vec![vec![3], vec![3]], extra: vec![] };
        assert!(matches!(curve_irregularity(&c, &not), Err(Error::NotAdapted(_))));

        // Double cover of an elliptic curve branched at two points of
        // multiplicity 2: genus 2, twist 0.
        let e = curve(1, &[Finite(2), Finite(2)]);
        let r = curve_irregularity(&e, &CurveCover { degree: 2, profiles: vec![vec![2], vec![2]], extra: vec![] }).unwrap();
        assert_eq!((r.cover_genus, r.q), (2, SectionCount::Exact(2)));
    }
}
