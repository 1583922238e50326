//! Seeded randomized cross-checks between independent computations.
//!
//! Each instance draws from its own ChaCha stream, so reports do not depend
//! on the execution mode.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adapted::{
    compute_adapted, residue_kernel_p1, sym_product_degree, uniformization_equivalence, CoverSetup, OracleContext,
    DEFAULT_MAX_TENSORS,
};
use crate::chern::{expected_c1, total_c_chern, ChernConvention, GradedClass, GradedRing};
use crate::divisor::{PrimeDivisor, QDivisor};
use crate::error::Result;
use crate::ext::{Multiplicity, Q};
use crate::geometry::{compose, Chart, MonomialCover, PullBack};
use crate::morphisms::{nc_cmorphism, orbifold_morphism, NcNormalForm};
use crate::par::{map_range, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepKind {
    Oracle,
    Residue,
    Uniformization,
    Nc,
    Chern,
    SymProduct,
    Floor,
    Functoriality,
}

impl SweepKind {
    pub const ALL: [SweepKind; 8] = [
        SweepKind::Oracle,
        SweepKind::Residue,
        SweepKind::Uniformization,
        SweepKind::Nc,
        SweepKind::Chern,
        SweepKind::SymProduct,
        SweepKind::Floor,
        SweepKind::Functoriality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Oracle => "oracle",
            SweepKind::Residue => "residue",
            SweepKind::Uniformization => "uniformization",
            SweepKind::Nc => "nc",
            SweepKind::Chern => "chern",
            SweepKind::SymProduct => "sym-product",
            SweepKind::Floor => "floor",
            SweepKind::Functoriality => "functoriality",
        }
    }

    fn offset(self) -> u64 {
        SweepKind::ALL.iter().position(|k| *k == self).expect("listed") as u64 * 1_000_003
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SweepKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown sweep kind {s}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub kind: SweepKind,
    pub seed: u64,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sweep {} seed={} instances={} failures={}",
            self.kind, self.seed, self.instances, self.failures
        )?;
        if let Some(w) = &self.first_failure {
            write!(f, " first={w}")?;
        }
        Ok(())
    }
}

/// Runs `count` instances of `kind`. An `Err` from an instance counts as a
/// failure.
pub fn run_sweep(kind: SweepKind, count: usize, seed: u64, exec: Execution) -> SweepReport {
    let outcomes: Vec<Option<String>> = map_range(count, exec, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(kind.offset()).wrapping_add(i as u64));
        let r = match kind {
            SweepKind::Oracle => oracle_instance(&mut rng),
            SweepKind::Residue => residue_instance(&mut rng),
            SweepKind::Uniformization => uniformization_instance(&mut rng),
            SweepKind::Nc => nc_instance(&mut rng),
            SweepKind::Chern => chern_instance(&mut rng),
            SweepKind::SymProduct => sym_product_instance(&mut rng),
            SweepKind::Floor => floor_instance(&mut rng),
            SweepKind::Functoriality => functoriality_instance(&mut rng),
        };
        match r {
            Ok(None) => None,
            Ok(Some(msg)) => Some(format!("#{i}: {msg}")),
            Err(e) => Some(format!("#{i}: error: {e}")),
        }
    });
    let failures = outcomes.iter().filter(|o| o.is_some()).count();
    SweepReport {
        kind,
        seed,
        instances: count,
        failures,
        first_failure: outcomes.into_iter().flatten().next(),
    }
}

fn random_multiplicity(rng: &mut ChaCha8Rng) -> Multiplicity {
    match rng.gen_range(0..5) {
        0 => Multiplicity::ONE,
        1 => Multiplicity::Finite(2),
        2 => Multiplicity::Finite(3),
        3 => Multiplicity::Finite(4),
        _ => Multiplicity::Infinite,
    }
}

/// A diagonal setup with `d <= 3`, `c_i <= 6` and `m_i` in `{1, 2, 3, 4, inf}`.
/// Adapted setups use exponents divisible by the finite multiplicities.
pub fn random_setup(rng: &mut ChaCha8Rng, adapted: bool) -> Result<CoverSetup> {
    let d = rng.gen_range(1..=3);
    let mults: Vec<Multiplicity> = (0..d).map(|_| random_multiplicity(rng)).collect();
    let exps: Vec<u64> = mults
        .iter()
        .map(|m| match (adapted, m) {
            (true, Multiplicity::Finite(k)) if *k >= 2 => k * rng.gen_range(1..=6 / k),
            _ => rng.gen_range(1..=6),
        })
        .collect();
    CoverSetup::diagonal(&mults, &exps)
}

fn describe(s: &CoverSetup) -> String {
    let m: Vec<String> = s.multiplicities().iter().map(|m| m.to_string()).collect();
    let c = s.cover().diagonal_exponents().unwrap_or_default();
    format!("m={:?} c={:?}", m, c)
}

fn oracle_instance(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let adapted = rng.gen_bool(0.5);
    let s = random_setup(rng, adapted)?;
    let n = rng.gen_range(1..=3);
    for p in 1..=s.dim() {
        let sheaf = compute_adapted(&s, n, p)?;
        let ctx = OracleContext::new(&s, n, p, DEFAULT_MAX_TENSORS)?;
        for (k, t) in ctx.tensors().iter().enumerate() {
            let a = sheaf.allowance(t).expect("same basis");
            if ctx.oracle_allowance(k) != a {
                return Ok(Some(format!("{} n={n} p={p} {t:?}: oracle {:?} closed {:?}", describe(&s), ctx.oracle_allowance(k), a)));
            }
            if let Some(e) = ctx.scan_corner(k, a, 2) {
                return Ok(Some(format!("{} n={n} p={p} {t:?}: membership differs at {e:?}", describe(&s))));
            }
        }
    }
    Ok(None)
}

fn residue_instance(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let adapted = rng.gen_bool(0.5);
    let s = random_setup(rng, adapted)?;
    let r = residue_kernel_p1(&s)?;
    let a = compute_adapted(&s, 1, 1)?;
    Ok((r != a).then(|| format!("{}: residue {:?} adapted {:?}", describe(&s), r.entries(), a.entries())))
}

fn uniformization_instance(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let s = random_setup(rng, true)?;
    let r = uniformization_equivalence(&s, 3)?;
    Ok((!r.consistent()).then(|| format!("{}: {:?} uniformization={}", describe(&s), r.equalities, r.uniformization)))
}

fn nc_instance(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let n = if rng.gen_bool(0.2) { Multiplicity::Infinite } else { Multiplicity::Finite(rng.gen_range(1..=6)) };
    let k = rng.gen_range(1..=3);
    let components = (0..k)
        .map(|_| {
            let m = if rng.gen_bool(0.2) { Multiplicity::Infinite } else { Multiplicity::Finite(rng.gen_range(2..=6)) };
            (rng.gen_range(0..=6), m)
        })
        .collect();
    let nf = NcNormalForm { n, components };
    let chain = nc_cmorphism(&nf)?;
    let (phi, b_x, b_y) = nf.to_divisorial()?;
    let direct = orbifold_morphism(&phi, &b_x, &b_y)?;
    Ok((chain.verdict != direct.verdict).then(|| format!("{nf:?}: chain {} orbifold {}", chain.verdict, direct.verdict)))
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    Q::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=6)))
}

fn chern_instance(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let dim = rng.gen_range(1..=4);
    let k = rng.gen_range(0..=3);
    let mut symbols: Vec<(String, usize)> = (1..=dim).map(|i| (format!("c{i}"), i)).collect();
    symbols.extend((1..=k).map(|i| (format!("D{i}"), 1)));
    symbols.push(("h".into(), 1));
    let ring: Arc<GradedRing> = GradedRing::new(dim, symbols.clone())?;
    let mut omega = GradedClass::one(&ring);
    for (name, _) in &symbols {
        let term = GradedClass::symbol(&ring, name)?.scale(&random_q(rng));
        omega = omega.add(&term)?;
        if rng.gen_bool(0.3) {
            let h = GradedClass::symbol(&ring, "h")?;
            omega = omega.add(&term.mul(&h)?)?;
        }
    }
    let comps: Vec<(String, Multiplicity)> = (1..=k)
        .map(|i| {
            let m = match rng.gen_range(0..4) {
                0 => Multiplicity::Infinite,
                _ => Multiplicity::Finite(rng.gen_range(1..=7)),
            };
            (format!("D{i}"), m)
        })
        .collect();
    let total = total_c_chern(&omega, &comps, &ChernConvention::default())?;
    let expected = expected_c1(&omega, &comps)?;
    let ok = total.part(1) == expected && total.constant_term() == omega.constant_term();
    Ok((!ok).then(|| format!("dim={dim} omega={omega} comps={comps:?}: c1 {} expected {expected}", total.part(1))))
}

fn sym_product_instance(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let adapted = rng.gen_bool(0.5);
    let s = random_setup(rng, adapted)?;
    let n1 = rng.gen_range(1..=2);
    let n2 = rng.gen_range(1..=2);
    let p = rng.gen_range(1..=s.dim());
    let r = sym_product_degree(&s, n1, n2, p)?;
    if !r.superadditive {
        return Ok(Some(format!("{} n1={n1} n2={n2} p={p}: {:?}", describe(&s), r.first_violation)));
    }
    if r.adapted && r.sym_equalities.iter().any(|e| !e.1) {
        return Ok(Some(format!("{} p={p}: Sym_C differs from Sym {:?}", describe(&s), r.sym_equalities)));
    }
    Ok(None)
}

fn floor_instance(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let primes: Vec<PrimeDivisor> = (0..3).map(|i| PrimeDivisor::abstract_prime(format!("P{i}"))).collect();
    let d = QDivisor::from_terms(primes.iter().map(|p| (p.clone(), random_q(rng))));
    if &d.floor() + &d.frac() != d {
        return Ok(Some(format!("floor + frac != D for {d}")));
    }
    if !d.frac().is_effective() || d.frac().terms().any(|(_, c)| *c >= Q::from_integer(1.into())) {
        return Ok(Some(format!("frac out of [0,1) for {d}")));
    }
    let n1 = Q::from_integer(rng.gen_range(1i64..=12).into());
    let n2 = Q::from_integer(rng.gen_range(1i64..=12).into());
    let lhs = &d.scale(&n1).floor() + &d.scale(&n2).floor();
    let rhs = d.scale(&(&n1 + &n2)).floor();
    Ok((!lhs.leq(&rhs)).then(|| format!("floor superadditivity fails for {d} n1={n1} n2={n2}")))
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<u64>> {
    loop {
        let m: Vec<Vec<u64>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { rng.gen_range(1..=3) } else { rng.gen_range(0..=1) * rng.gen_range(0..=2) }).collect())
            .collect();
        if crate::geometry::determinant(&m) != BigInt::from(0) {
            return m;
        }
    }
}

fn functoriality_instance(rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let d = rng.gen_range(1..=3);
    let a = Chart::new("A", d)?;
    let b = Chart::new("B", d)?;
    let c = Chart::new("C", d)?;
    let f = MonomialCover::new(a, b.clone(), random_matrix(rng, d))?;
    let g = MonomialCover::new(b, c.clone(), random_matrix(rng, d))?;
    let div = QDivisor::from_terms(c.hyperplanes().into_iter().map(|p| (p, random_q(rng))));
    let direct = compose(&f, &g)?.pullback(&div)?;
    let stepwise = f.pullback(&g.pullback(&div)?)?;
    if direct != stepwise {
        return Ok(Some(format!("(g.f)^* {div} = {direct} but f^* g^* = {stepwise}")));
    }
    let other = QDivisor::from_terms(c.hyperplanes().into_iter().map(|p| (p, random_q(rng))));
    let sum = g.pullback(&(&div + &other))?;
    let parts = &g.pullback(&div)? + &g.pullback(&other)?;
    if sum != parts {
        return Ok(Some(format!("pull-back is not additive on {div} and {other}")));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass_in_both_modes() {
        for kind in SweepKind::ALL {
            let par = run_sweep(kind, 20, 7, Execution::Parallel);
            let seq = run_sweep(kind, 20, 7, Execution::Sequential);
            assert_eq!(par, seq);
            assert!(par.passed(), "{par}");
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in SweepKind::ALL {
            assert_eq!(kind.name().parse::<SweepKind>().unwrap(), kind);
        }
    }
}
