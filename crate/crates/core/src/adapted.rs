//! Adapted tensor sheaves on monomial covers of coordinate-hyperplane pairs.
//!
//! A sheaf of (n,p)-tensors on the cover is stored as pole allowances: for
//! each monomial basis tensor `t = prod_k dx_{I_k}` of `Sym^n Omega^p` and each
//! axis `i`, the largest pole order `a_i(t)` such that `x^(-a) t` is a local
//! section. Negative values force vanishing.
//!
//! For a basis tensor let `K = m_i(t)` be the number of blocks containing
//! axis `i`. On a diagonal cover with exponents `c_i` over multiplicities
//! `m_i`, the adapted allowance is `K` on `inf` axes and
//! `floor(K c_i (m_i - 1)/m_i) - (c_i - 1) K` elsewhere.
//!
//! [`OracleContext`] decides membership directly for arbitrary monomial
//! covers by pulling back the downstairs generators, expanding them in the
//! logarithmic basis upstairs and solving the resulting linear system.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::covers::{classify_cover, CoverClassification};
use crate::divisor::CPairBoundary;
use crate::error::{Error, Result};
use crate::ext::{floor_i64, q, Multiplicity, Q};
use crate::geometry::{compose, determinant, Chart, MonomialCover, PullBack};
use crate::par::{map_vec, Execution};

pub const DEFAULT_MAX_TENSORS: usize = 100_000;

/// A monomial basis tensor of `Sym^n Omega^p`: a sorted multiset of `n`
/// sorted `p`-subsets of axes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisTensor {
    p: usize,
    blocks: Vec<Vec<usize>>,
}

impl BasisTensor {
    pub fn new(p: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.len();
        let mut blocks = blocks;
        for b in blocks.iter_mut() {
            b.sort_unstable();
            let distinct = b.windows(2).all(|w| w[0] != w[1]);
            if b.len() != p || !distinct {
                return Err(Error::DegreeOutOfRange { n, p, dim: b.len() });
            }
        }
        if n == 0 || p == 0 {
            return Err(Error::DegreeOutOfRange { n, p, dim: 0 });
        }
        blocks.sort();
        Ok(BasisTensor { p, blocks })
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `m_i(t)`: the number of blocks containing each axis.
    pub fn counts(&self, d: usize) -> Vec<i64> {
        let mut k = vec![0i64; d];
        for b in &self.blocks {
            for &i in b {
                k[i] += 1;
            }
        }
        k
    }

    /// Symmetric product: concatenation of blocks.
    pub fn mul(&self, other: &BasisTensor) -> Result<BasisTensor> {
        if self.p != other.p {
            return Err(Error::DegreeOutOfRange { n: other.n(), p: other.p, dim: self.p });
        }
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        BasisTensor::new(self.p, blocks)
    }

    /// `dx dy` for one-forms, `dx^dy dx^dz` for higher forms.
    pub fn render(&self, axes: &[String]) -> String {
        self.blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&i| format!("d{}", axes.get(i).map(String::as_str).unwrap_or("?")))
                    .collect::<Vec<_>>()
                    .join("^")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `p`-subsets of `0..d` in lexicographic order.
pub fn p_subsets(d: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, p, &mut Vec::new(), &mut out);
    out
}

/// Multisets of size `n` drawn from `0..k`, as sorted index vectors.
fn multisets(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i, k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, n, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// `C(C(d,p) + n - 1, n)`, saturating.
pub fn basis_tensor_count(d: usize, n: usize, p: usize) -> u128 {
    if p > d {
        return 0;
    }
    let k = binomial(d as u128, p as u128);
    binomial(k + n as u128 - 1, n as u128)
}

fn check_degrees(d: usize, n: usize, p: usize) -> Result<()> {
    if n == 0 || p == 0 || p > d {
        return Err(Error::DegreeOutOfRange { n, p, dim: d });
    }
    Ok(())
}

/// All basis tensors of `Sym^n Omega^p` in dimension `d`, sorted.
pub fn enumerate_tensors(d: usize, n: usize, p: usize, max_tensors: usize) -> Result<Vec<BasisTensor>> {
    check_degrees(d, n, p)?;
    let count = basis_tensor_count(d, n, p);
    if count > max_tensors as u128 {
        return Err(Error::TooManyTensors { count, cap: max_tensors });
    }
    let subsets = p_subsets(d, p);
    let out: Vec<BasisTensor> = multisets(subsets.len(), n)
        .into_iter()
        .map(|ms| BasisTensor {
            p,
            blocks: ms.into_iter().map(|k| subsets[k].clone()).collect(),
        })
        .collect();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdaptedOptions {
    pub max_tensors: usize,
    pub exec: Execution,
}

impl Default for AdaptedOptions {
    fn default() -> Self {
        AdaptedOptions { max_tensors: DEFAULT_MAX_TENSORS, exec: Execution::Parallel }
    }
}

/// A cover `gamma: X^ -> X` with a boundary on coordinate hyperplanes of `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSetup {
    cover: MonomialCover,
    boundary: CPairBoundary,
    mults: Vec<Multiplicity>,
}

impl CoverSetup {
    pub fn new(cover: MonomialCover, boundary: CPairBoundary) -> Result<Self> {
        let mults = cover.target().axis_multiplicities(&boundary)?;
        Ok(CoverSetup { cover, boundary, mults })
    }

    /// `X = A^d` with axes `x1..xd`, cover `X^ -> X` by `x_i -> x_i^c_i`.
    pub fn diagonal(mults: &[Multiplicity], exps: &[u64]) -> Result<Self> {
        if mults.len() != exps.len() {
            return Err(Error::InvalidExponents("one exponent per axis expected".into()));
        }
        let x = Chart::new("X", mults.len())?;
        let xh = Chart::new("Xh", mults.len())?;
        let cover = MonomialCover::diagonal(xh, x.clone(), exps)?;
        let boundary = x.boundary(mults)?;
        CoverSetup::new(cover, boundary)
    }

    pub fn dim(&self) -> usize {
        self.cover.dim()
    }

    pub fn cover(&self) -> &MonomialCover {
        &self.cover
    }

    pub fn boundary(&self) -> &CPairBoundary {
        &self.boundary
    }

    /// Multiplicity of each target axis (1 off the boundary).
    pub fn multiplicities(&self) -> &[Multiplicity] {
        &self.mults
    }

    pub fn classify(&self) -> CoverClassification {
        classify_cover(&self.cover, &self.boundary).expect("validated at construction")
    }

    fn diagonal_axes(&self) -> Result<Vec<AxisData>> {
        let c = self.cover.diagonal_exponents().ok_or(Error::NonDiagonal)?;
        Ok(c.iter()
            .zip(&self.mults)
            .map(|(&c, &m)| AxisData { c: c as i64, m })
            .collect())
    }
}

#[derive(Clone, Copy, Debug)]
struct AxisData {
    c: i64,
    m: Multiplicity,
}

impl AxisData {
    /// Fractional part of the boundary coefficient.
    fn frac(&self) -> Q {
        match self.m {
            Multiplicity::Finite(m) if m >= 2 => q(m as i64 - 1, m as i64),
            _ => Q::zero(),
        }
    }

    fn is_log(&self) -> bool {
        !self.m.is_finite()
    }

    fn in_boundary(&self) -> bool {
        self.m != Multiplicity::ONE
    }

    fn kahler(&self, k: i64) -> i64 {
        -(self.c - 1) * k
    }

    fn b_bound(&self, k: i64) -> i64 {
        if self.in_boundary() {
            k
        } else {
            0
        }
    }

    fn adapted(&self, k: i64) -> i64 {
        let v = if self.is_log() {
            k
        } else {
            floor_i64(&(self.frac() * Q::from_integer(BigInt::from(k * self.c)))) + self.kahler(k)
        };
        v.min(self.b_bound(k))
    }

    fn a_literal(&self, n: i64, k: i64) -> i64 {
        let twist = floor_i64(&(self.frac() * Q::from_integer(BigInt::from(n * self.c))));
        if self.is_log() {
            twist + k
        } else {
            twist + self.kahler(k)
        }
    }
}

/// The sheaves compared by the inclusion checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SheafKind {
    /// `gamma^* Sym^n Omega^p_X`.
    PullbackKahler,
    /// `Sym^n` of the adapted p-forms.
    SymOfForms,
    /// Adapted tensors.
    Adapted,
    /// `gamma^* Sym^n Omega^p_X(log D)`.
    PullbackLog,
    /// `Sym^n Omega^p(log gamma^* D)`, the B-sheaf.
    LogPulledBack,
    /// `Sym^n Omega^p(log gamma^* floor(D))`.
    LogFloor,
    /// `O(floor(n gamma^* {D})) (x) gamma^* Sym^n Omega^p_X(log floor(D))`.
    ALiteral,
    /// Intersection of the A- and B-sheaves.
    LiteralIntersection,
}

impl SheafKind {
    pub fn name(&self) -> &'static str {
        match self {
            SheafKind::PullbackKahler => "gamma^* Sym^n Omega^p",
            SheafKind::SymOfForms => "Sym^n (Omega^p_C)",
            SheafKind::Adapted => "Sym^n_C Omega^p",
            SheafKind::PullbackLog => "gamma^* Sym^n Omega^p(log D)",
            SheafKind::LogPulledBack => "Sym^n Omega^p(log gamma^* D)",
            SheafKind::LogFloor => "Sym^n Omega^p(log gamma^* floor D)",
            SheafKind::ALiteral => "A_{n,p}",
            SheafKind::LiteralIntersection => "A_{n,p} cap B_{n,p}",
        }
    }

    fn allowance(&self, ax: &AxisData, n: i64, k: i64, blocks_with_axis: i64) -> i64 {
        match self {
            SheafKind::PullbackKahler => ax.kahler(k),
            SheafKind::SymOfForms => blocks_with_axis * ax.adapted(1),
            SheafKind::Adapted => ax.adapted(k),
            SheafKind::PullbackLog => {
                if ax.in_boundary() {
                    k
                } else {
                    ax.kahler(k)
                }
            }
            SheafKind::LogPulledBack => ax.b_bound(k),
            SheafKind::LogFloor => {
                if ax.is_log() {
                    k
                } else {
                    0
                }
            }
            SheafKind::ALiteral => ax.a_literal(n, k),
            SheafKind::LiteralIntersection => ax.a_literal(n, k).min(ax.b_bound(k)),
        }
    }
}

impl fmt::Display for SheafKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pole allowances per basis tensor for fixed `(n, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleAllowanceSheaf {
    pub n: usize,
    pub p: usize,
    pub axes: Vec<String>,
    entries: Vec<(BasisTensor, Vec<i64>)>,
}

impl PoleAllowanceSheaf {
    pub fn entries(&self) -> &[(BasisTensor, Vec<i64>)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn allowance(&self, t: &BasisTensor) -> Option<&[i64]> {
        self.entries
            .binary_search_by(|(u, _)| u.cmp(t))
            .ok()
            .map(|k| self.entries[k].1.as_slice())
    }

    /// Termwise `self <= other`, i.e. sheaf inclusion.
    pub fn leq(&self, other: &PoleAllowanceSheaf) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|((t, a), (u, b))| t == u && a.iter().zip(b).all(|(x, y)| x <= y))
    }

    /// Local generators `x^(-a) t`, e.g. `z^1 dz`.
    pub fn generators(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|(t, a)| {
                let mono: Vec<String> = a
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(i, &v)| format!("{}^{}", self.axes[i], -v))
                    .collect();
                let tensor = t.render(&self.axes);
                if mono.is_empty() {
                    tensor
                } else {
                    format!("{} {}", mono.join(" "), tensor)
                }
            })
            .collect()
    }
}

fn tabulate(
    s: &CoverSetup,
    n: usize,
    p: usize,
    opts: &AdaptedOptions,
    f: impl Fn(&BasisTensor) -> Vec<i64> + Sync + Send,
) -> Result<PoleAllowanceSheaf> {
    let d = s.dim();
    let tensors = enumerate_tensors(d, n, p, opts.max_tensors)?;
    let exec = if tensors.len() >= 256 { opts.exec } else { Execution::Sequential };
    let values = map_vec(&tensors, exec, &f);
    Ok(PoleAllowanceSheaf {
        n,
        p,
        axes: s.cover.source().axes().to_vec(),
        entries: tensors.into_iter().zip(values).collect(),
    })
}

/// Closed-form allowances of one of the standard sheaves.
pub fn standard_sheaf(
    s: &CoverSetup,
    n: usize,
    p: usize,
    kind: SheafKind,
    opts: &AdaptedOptions,
) -> Result<PoleAllowanceSheaf> {
    check_degrees(s.dim(), n, p)?;
    let axes = s.diagonal_axes()?;
    tabulate(s, n, p, opts, |t| {
        let k = t.counts(axes.len());
        axes.iter()
            .enumerate()
            .map(|(i, ax)| kind.allowance(ax, n as i64, k[i], k[i]))
            .collect()
    })
}

pub fn compute_adapted(s: &CoverSetup, n: usize, p: usize) -> Result<PoleAllowanceSheaf> {
    standard_sheaf(s, n, p, SheafKind::Adapted, &AdaptedOptions::default())
}

pub fn compute_adapted_with(s: &CoverSetup, n: usize, p: usize, opts: &AdaptedOptions) -> Result<PoleAllowanceSheaf> {
    standard_sheaf(s, n, p, SheafKind::Adapted, opts)
}

pub fn a_sheaf(s: &CoverSetup, n: usize, p: usize) -> Result<PoleAllowanceSheaf> {
    standard_sheaf(s, n, p, SheafKind::ALiteral, &AdaptedOptions::default())
}

pub fn b_sheaf(s: &CoverSetup, n: usize, p: usize) -> Result<PoleAllowanceSheaf> {
    standard_sheaf(s, n, p, SheafKind::LogPulledBack, &AdaptedOptions::default())
}

pub fn literal_intersection(s: &CoverSetup, n: usize, p: usize) -> Result<PoleAllowanceSheaf> {
    standard_sheaf(s, n, p, SheafKind::LiteralIntersection, &AdaptedOptions::default())
}

/// One-forms through the residue sequence: the logarithmic allowance of
/// `gamma^* Omega^1(log D)`, with the log coefficient along each finite
/// component forced to vanish to order `ceil((1/m_i) gamma^* D_i)`.
pub fn residue_kernel_p1(s: &CoverSetup) -> Result<PoleAllowanceSheaf> {
    residue_kernel(s, 1, 1)
}

pub fn residue_kernel(s: &CoverSetup, n: usize, p: usize) -> Result<PoleAllowanceSheaf> {
    if (n, p) != (1, 1) {
        return Err(Error::DegreeOutOfRange { n, p, dim: s.dim() });
    }
    let d = s.dim();
    if !s.cover.is_diagonal() {
        return Err(Error::NonDiagonal);
    }
    let log = standard_sheaf(s, 1, 1, SheafKind::PullbackLog, &AdaptedOptions::default())?;
    let source = s.cover.source();
    let mut vanishing = vec![0i64; d];
    for (prime, m) in s.boundary.components() {
        if !m.is_finite() {
            continue;
        }
        let pulled = s
            .cover
            .pullback(&crate::divisor::QDivisor::term(prime.clone(), m.inverse()))?
            .ceil();
        for (sp, c) in pulled.terms() {
            let axis = source.axis_of(sp).expect("pull-back lives on source axes");
            let v = c.to_integer().to_i64().expect("small");
            vanishing[axis] = vanishing[axis].max(v);
        }
    }
    let entries = log
        .entries
        .iter()
        .map(|(t, a)| {
            let i = t.blocks()[0][0];
            let mut a = a.clone();
            if vanishing[i] > 0 {
                a[i] = a[i].min(1 - vanishing[i]);
            }
            (t.clone(), a)
        })
        .collect();
    Ok(PoleAllowanceSheaf { entries, ..log })
}

/// Direct membership test for arbitrary monomial covers.
///
/// Downstairs, the adapted generators are `y^(w) dlog y_T` with
/// `w_j = 1/m_j` on finite components, `0` on `inf` components and `1`
/// elsewhere. Upstairs these become `x^(w E^T) sum_S M[T][S] dlog x_S`. A
/// tensor `x^e t_S0 = x^(e + u_S0) dlog x_S0` lies in the module iff every
/// coefficient of its expansion in the generators is regular.
#[derive(Clone, Debug)]
pub struct OracleContext {
    d: usize,
    n: usize,
    p: usize,
    tensors: Vec<BasisTensor>,
    support: Vec<Vec<usize>>,
    den: i64,
    w_adapted: Vec<Vec<i64>>,
    w_literal: Vec<Vec<i64>>,
    twist: Vec<i64>,
    counts: Vec<Vec<i64>>,
    w_log: Vec<Vec<i64>>,
}

fn invert(m: Vec<Vec<BigRational>>) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

impl OracleContext {
    pub fn new(s: &CoverSetup, n: usize, p: usize, max_tensors: usize) -> Result<Self> {
        let d = s.dim();
        let tensors = enumerate_tensors(d, n, p, max_tensors)?;
        let e = s.cover.exponents();
        let subsets = p_subsets(d, p);
        let subset_index: HashMap<Vec<usize>, usize> =
            subsets.iter().cloned().enumerate().map(|(k, s)| (s, k)).collect();
        let tensor_index: HashMap<Vec<usize>, usize> = tensors
            .iter()
            .enumerate()
            .map(|(k, t)| (t.blocks.iter().map(|b| subset_index[b]).collect(), k))
            .collect();

        // dlog y_J = sum_I det E[I,J] dlog x_I
        let minors: Vec<Vec<BigInt>> = subsets
            .iter()
            .map(|jset| {
                subsets
                    .iter()
                    .map(|iset| {
                        let sub: Vec<Vec<u64>> = iset
                            .iter()
                            .map(|&i| jset.iter().map(|&j| e[i][j]).collect())
                            .collect();
                        determinant(&sub)
                    })
                    .collect()
            })
            .collect();

        let nt = tensors.len();
        let mut m = vec![vec![Q::zero(); nt]; nt];
        for (ti, t) in tensors.iter().enumerate() {
            let mut poly: HashMap<Vec<usize>, BigInt> = HashMap::from([(Vec::new(), BigInt::one())]);
            for block in &t.blocks {
                let row = &minors[subset_index[block]];
                let mut next: HashMap<Vec<usize>, BigInt> = HashMap::new();
                for (mono, coeff) in &poly {
                    for (k, minor) in row.iter().enumerate() {
                        if minor.is_zero() {
                            continue;
                        }
                        let mut mono2 = mono.clone();
                        let pos = mono2.partition_point(|&x| x <= k);
                        mono2.insert(pos, k);
                        *next.entry(mono2).or_insert_with(BigInt::zero) += coeff * minor;
                    }
                }
                poly = next;
            }
            for (mono, coeff) in poly {
                if !coeff.is_zero() {
                    m[ti][tensor_index[&mono]] = Q::from_integer(coeff);
                }
            }
        }
        let minv = invert(m).ok_or(Error::SingularExponents)?;
        let support: Vec<Vec<usize>> = (0..nt)
            .map(|s0| (0..nt).filter(|&t| !minv[s0][t].is_zero()).collect())
            .collect();

        let mults = s.multiplicities();
        let den = crate::ext::lcm_finite(mults.iter()) as i64;
        // weights per target axis, scaled by den
        let w_frac: Vec<i64> = mults
            .iter()
            .map(|m| match m {
                Multiplicity::Finite(1) => den,
                Multiplicity::Finite(m) => den / *m as i64,
                Multiplicity::Infinite => 0,
            })
            .collect();
        let w_a: Vec<i64> = mults.iter().map(|m| if m.is_finite() { 1 } else { 0 }).collect();
        let weigh = |t: &BasisTensor, w: &[i64]| -> Vec<i64> {
            (0..d)
                .map(|i| {
                    t.blocks
                        .iter()
                        .flat_map(|b| b.iter())
                        .map(|&j| w[j] * e[i][j] as i64)
                        .sum()
                })
                .collect()
        };
        let w_adapted = tensors.iter().map(|t| weigh(t, &w_frac)).collect();
        let w_literal = tensors.iter().map(|t| weigh(t, &w_a)).collect();

        let fracs: Vec<Q> = mults
            .iter()
            .map(|m| match m {
                Multiplicity::Finite(m) if *m >= 2 => q(*m as i64 - 1, *m as i64),
                _ => Q::zero(),
            })
            .collect();
        let twist = (0..d)
            .map(|i| {
                let c: Q = (0..d).fold(Q::zero(), |acc, j| acc + &fracs[j] * Q::from_integer(BigInt::from(e[i][j])));
                floor_i64(&(c * Q::from_integer(BigInt::from(n))))
            })
            .collect();

        let log_axis: Vec<bool> = (0..d)
            .map(|i| (0..d).any(|j| e[i][j] > 0 && mults[j] != Multiplicity::ONE))
            .collect();
        let counts: Vec<Vec<i64>> = tensors.iter().map(|t| t.counts(d)).collect();
        let w_log = counts
            .iter()
            .map(|k| (0..d).map(|i| if log_axis[i] { 0 } else { k[i] }).collect())
            .collect();

        Ok(OracleContext { d, n, p, tensors, support, den, w_adapted, w_literal, twist, counts, w_log })
    }

    pub fn tensors(&self) -> &[BasisTensor] {
        &self.tensors
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.n, self.p)
    }

    pub fn index_of(&self, t: &BasisTensor) -> Option<usize> {
        self.tensors.binary_search(t).ok()
    }

    /// `x^e t` is an adapted tensor.
    pub fn in_adapted(&self, s0: usize, e: &[i64]) -> bool {
        let u = &self.counts[s0];
        self.support[s0].iter().all(|&t| {
            let w = &self.w_adapted[t];
            (0..self.d).all(|i| self.den * (e[i] + u[i]) >= w[i])
        })
    }

    /// The allowance the oracle itself implies for `t_S0`: the smallest `e`
    /// with `x^e t_S0` adapted, negated.
    pub fn oracle_allowance(&self, s0: usize) -> Vec<i64> {
        let u = &self.counts[s0];
        (0..self.d)
            .map(|i| {
                let need = self.support[s0]
                    .iter()
                    .map(|&t| self.w_adapted[t][i].div_euclid(self.den) + i64::from(self.w_adapted[t][i].rem_euclid(self.den) != 0))
                    .max()
                    .unwrap_or(i64::MIN / 2);
                u[i] - need
            })
            .collect()
    }

    /// Checks `in_adapted(e) <=> e >= -a` on the box of radius `r` around
    /// `-a`.
    pub fn scan_corner(&self, s0: usize, allowance: &[i64], r: i64) -> Option<Vec<i64>> {
        scan_box(self.d, r, |off| {
            let e: Vec<i64> = off.iter().zip(allowance).map(|(o, a)| o - a).collect();
            let closed = off.iter().all(|o| *o >= 0);
            self.in_adapted(s0, &e) != closed
        })
        .map(|off| off.iter().zip(allowance).map(|(o, a)| o - a).collect())
    }

    /// `x^e t` lies in the literal A-sheaf.
    pub fn in_a_literal(&self, s0: usize, e: &[i64]) -> bool {
        let u = &self.counts[s0];
        self.support[s0].iter().all(|&t| {
            let w = &self.w_literal[t];
            (0..self.d).all(|i| e[i] + u[i] + self.twist[i] >= w[i])
        })
    }

    /// `x^e t` lies in `Sym^n Omega^p(log gamma^* D)`.
    pub fn in_b(&self, s0: usize, e: &[i64]) -> bool {
        let u = &self.counts[s0];
        let w = &self.w_log[s0];
        (0..self.d).all(|i| e[i] + u[i] >= w[i])
    }

    /// Checks `in_adapted(e) <=> e >= -a` on the box `[-r, r]^d`; returns
    /// the first disagreeing exponent vector.
    pub fn scan_threshold(&self, s0: usize, allowance: &[i64], r: i64) -> Option<Vec<i64>> {
        scan_box(self.d, r, |e| {
            let closed = e.iter().zip(allowance).all(|(x, a)| *x >= -a);
            self.in_adapted(s0, e) != closed
        })
    }

    /// Same as [`OracleContext::scan_threshold`] for an arbitrary predicate.
    pub fn scan_predicate(&self, allowance: &[i64], r: i64, member: impl Fn(&[i64]) -> bool) -> Option<Vec<i64>> {
        scan_box(self.d, r, |e| {
            let closed = e.iter().zip(allowance).all(|(x, a)| *x >= -a);
            member(e) != closed
        })
    }
}

fn scan_box(d: usize, r: i64, mut bad: impl FnMut(&[i64]) -> bool) -> Option<Vec<i64>> {
    let mut e = vec![-r; d];
    loop {
        if bad(&e) {
            return Some(e);
        }
        let mut k = 0;
        loop {
            if k == d {
                return None;
            }
            if e[k] < r {
                e[k] += 1;
                break;
            }
            e[k] = -r;
            k += 1;
        }
    }
}

/// Decides whether `x^e t` is an adapted tensor, without closed forms.
pub fn membership_oracle(s: &CoverSetup, n: usize, p: usize, t: &BasisTensor, e: &[i64]) -> Result<bool> {
    let ctx = OracleContext::new(s, n, p, DEFAULT_MAX_TENSORS)?;
    let k = ctx
        .index_of(t)
        .ok_or(Error::DegreeOutOfRange { n: t.n(), p: t.p(), dim: s.dim() })?;
    Ok(ctx.in_adapted(k, e))
}

/// Decides membership in the literal intersection of the A- and B-sheaves.
pub fn literal_membership_oracle(s: &CoverSetup, n: usize, p: usize, t: &BasisTensor, e: &[i64]) -> Result<bool> {
    let ctx = OracleContext::new(s, n, p, DEFAULT_MAX_TENSORS)?;
    let k = ctx
        .index_of(t)
        .ok_or(Error::DegreeOutOfRange { n: t.n(), p: t.p(), dim: s.dim() })?;
    Ok(ctx.in_a_literal(k, e) && ctx.in_b(k, e))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionEntry {
    pub smaller: SheafKind,
    pub larger: SheafKind,
    pub holds: bool,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionReport {
    pub n: usize,
    pub p: usize,
    pub entries: Vec<InclusionEntry>,
}

impl InclusionReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }

    pub fn find(&self, smaller: SheafKind, larger: SheafKind) -> Option<&InclusionEntry> {
        self.entries.iter().find(|e| e.smaller == smaller && e.larger == larger)
    }

    /// The inclusion of adapted tensors into `Sym^n Omega^p(log gamma^* floor D)`.
    pub fn iota(&self) -> &InclusionEntry {
        self.find(SheafKind::Adapted, SheafKind::LogFloor).expect("always reported")
    }
}

pub const INCLUSION_CHAIN: [(SheafKind, SheafKind); 6] = [
    (SheafKind::PullbackKahler, SheafKind::SymOfForms),
    (SheafKind::SymOfForms, SheafKind::Adapted),
    (SheafKind::Adapted, SheafKind::PullbackLog),
    (SheafKind::PullbackLog, SheafKind::LogPulledBack),
    (SheafKind::Adapted, SheafKind::LogFloor),
    (SheafKind::LogFloor, SheafKind::LogPulledBack),
];

pub fn check_inclusions(s: &CoverSetup, n: usize, p: usize) -> Result<InclusionReport> {
    check_inclusions_with(s, n, p, &AdaptedOptions::default())
}

pub fn check_inclusions_with(s: &CoverSetup, n: usize, p: usize, opts: &AdaptedOptions) -> Result<InclusionReport> {
    let mut cache: HashMap<SheafKind, PoleAllowanceSheaf> = HashMap::new();
    for (a, b) in INCLUSION_CHAIN {
        for k in [a, b] {
            if !cache.contains_key(&k) {
                cache.insert(k, standard_sheaf(s, n, p, k, opts)?);
            }
        }
    }
    let entries = INCLUSION_CHAIN
        .iter()
        .map(|&(a, b)| InclusionEntry {
            smaller: a,
            larger: b,
            holds: cache[&a].leq(&cache[&b]),
            equal: cache[&a] == cache[&b],
        })
        .collect();
    Ok(InclusionReport { n, p, entries })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformizationReport {
    pub adapted: bool,
    pub uniformization: bool,
    /// `(n, p, iota equality)` for every tested degree pair.
    pub equalities: Vec<(usize, usize, bool)>,
}

impl UniformizationReport {
    pub fn exists_equal(&self) -> bool {
        self.equalities.iter().any(|e| e.2)
    }

    pub fn all_equal(&self) -> bool {
        self.equalities.iter().all(|e| e.2)
    }

    /// The three statements agree.
    pub fn consistent(&self) -> bool {
        self.exists_equal() == self.all_equal() && self.all_equal() == self.uniformization
    }
}

/// Equality of `iota_{n,p}` for all `1 <= n <= n_max`, `1 <= p <= d`.
pub fn uniformization_equivalence(s: &CoverSetup, n_max: usize) -> Result<UniformizationReport> {
    let c = s.classify();
    let mut equalities = Vec::new();
    for n in 1..=n_max {
        for p in 1..=s.dim() {
            let a = standard_sheaf(s, n, p, SheafKind::Adapted, &AdaptedOptions::default())?;
            let l = standard_sheaf(s, n, p, SheafKind::LogFloor, &AdaptedOptions::default())?;
            equalities.push((n, p, a == l));
        }
    }
    Ok(UniformizationReport { adapted: c.is_adapted, uniformization: c.is_uniformization, equalities })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymProductReport {
    pub pairs_checked: usize,
    pub superadditive: bool,
    pub first_violation: Option<(BasisTensor, BasisTensor)>,
    pub adapted: bool,
    /// `(n, Sym^n_C == Sym^n(Omega^p_C))` for `n1`, `n2`, `n1 + n2`.
    pub sym_equalities: Vec<(usize, bool)>,
}

/// `a(t1) + a(t2) <= a(t1 t2)` for all basis tensors of degrees `n1`, `n2`.
pub fn sym_product_degree(s: &CoverSetup, n1: usize, n2: usize, p: usize) -> Result<SymProductReport> {
    let opts = AdaptedOptions::default();
    let s1 = standard_sheaf(s, n1, p, SheafKind::Adapted, &opts)?;
    let s2 = standard_sheaf(s, n2, p, SheafKind::Adapted, &opts)?;
    let s12 = standard_sheaf(s, n1 + n2, p, SheafKind::Adapted, &opts)?;
    let mut pairs_checked = 0;
    let mut first_violation = None;
    for (t1, a1) in s1.entries() {
        for (t2, a2) in s2.entries() {
            pairs_checked += 1;
            let prod = t1.mul(t2)?;
            let a12 = s12.allowance(&prod).expect("product is a basis tensor");
            let ok = (0..s.dim()).all(|i| a1[i] + a2[i] <= a12[i]);
            if !ok && first_violation.is_none() {
                first_violation = Some((t1.clone(), t2.clone()));
            }
        }
    }
    let mut sym_equalities = Vec::new();
    for n in [n1, n2, n1 + n2] {
        let c = standard_sheaf(s, n, p, SheafKind::Adapted, &opts)?;
        let f = standard_sheaf(s, n, p, SheafKind::SymOfForms, &opts)?;
        sym_equalities.push((n, c == f));
    }
    Ok(SymProductReport {
        pairs_checked,
        superadditive: first_violation.is_none(),
        first_violation,
        adapted: s.classify().is_adapted,
        sym_equalities,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorialityReport {
    pub gamma: MonomialCover,
    pub inclusion_holds: bool,
    pub equality: bool,
    pub beta_adapted: bool,
    pub pulled_back: PoleAllowanceSheaf,
    pub direct: PoleAllowanceSheaf,
}

/// Compares `alpha^*` of the allowances for `(X, B, beta)` with those for
/// `(X, B, beta . alpha)`. Pulling back multiplies an allowance by
/// `c^alpha_i` and subtracts the Jacobian shift `(c^alpha_i - 1) m_i(t)`.
pub fn functoriality_check(
    alpha: &MonomialCover,
    beta: &MonomialCover,
    b: &CPairBoundary,
    n: usize,
    p: usize,
) -> Result<FunctorialityReport> {
    if alpha.target() != beta.source() {
        return Err(Error::FactorizationMismatch(format!(
            "alpha lands in {}, beta starts at {}",
            alpha.target().name(),
            beta.source().name()
        )));
    }
    let ca = alpha
        .diagonal_exponents()
        .ok_or_else(|| Error::FactorizationMismatch("alpha is not diagonal".into()))?;
    if !beta.is_diagonal() {
        return Err(Error::FactorizationMismatch("beta is not diagonal".into()));
    }
    let gamma = compose(alpha, beta)?;
    let sb = CoverSetup::new(beta.clone(), b.clone())?;
    let sg = CoverSetup::new(gamma.clone(), b.clone())?;
    let ab = compute_adapted(&sb, n, p)?;
    let ag = compute_adapted(&sg, n, p)?;
    let d = alpha.dim();
    let entries = ab
        .entries()
        .iter()
        .map(|(t, a)| {
            let k = t.counts(d);
            let pulled = (0..d)
                .map(|i| ca[i] as i64 * a[i] - (ca[i] as i64 - 1) * k[i])
                .collect();
            (t.clone(), pulled)
        })
        .collect();
    let pulled_back = PoleAllowanceSheaf { entries, axes: ag.axes.clone(), ..ab };
    Ok(FunctorialityReport {
        gamma,
        inclusion_holds: pulled_back.leq(&ag),
        equality: pulled_back == ag,
        beta_adapted: sb.classify().is_adapted,
        pulled_back,
        direct: ag,
    })
}

/// `d(x^v)` is an adapted one-form, decided from the allowances.
pub fn differential_is_adapted(s: &CoverSetup, v: &[u64]) -> Result<bool> {
    let sheaf = compute_adapted(s, 1, 1)?;
    let d = s.dim();
    for i in 0..d {
        if v[i] == 0 {
            continue;
        }
        let t = BasisTensor::new(1, vec![vec![i]])?;
        let a = sheaf.allowance(&t).expect("one-form basis");
        let ok = (0..d).all(|j| {
            let e = v[j] as i64 - if i == j { 1 } else { 0 };
            e >= -a[j]
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `div f >= sum (mult gamma^* Delta_X / mult_C Delta_X) Delta` over the
/// components of `div f`, for `f = x^v` on a finite cover.
pub fn zero_divisor_criterion(s: &CoverSetup, v: &[u64]) -> Result<bool> {
    let cover = s.cover();
    if !cover.is_finite() {
        return Err(Error::NotAdapted("the cover is not finite".into()));
    }
    let source = cover.source();
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        let delta_hat = source.hyperplane(i)?;
        let j = (0..s.dim()).find(|&j| cover.entry(i, j) != 0).expect("finite cover");
        let delta_x = cover.target().hyperplane(j)?;
        let mult = cover.pullback(&crate::divisor::QDivisor::prime(delta_x.clone()))?.coeff(&delta_hat);
        let bound = crate::ext::ExtRational::Finite(mult).div(&s.boundary().c_multiplicity(&delta_x))?;
        let lhs = crate::ext::ExtRational::int(vi as i64);
        if lhs < bound {
            return Ok(false);
        }
    }
    Ok(true)
}
