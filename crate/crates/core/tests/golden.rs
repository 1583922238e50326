//! Worked examples with independently derived expectations.

use std::collections::BTreeMap;

use cpair_core::adapted::{
    a_sheaf, compute_adapted, literal_intersection, standard_sheaf, AdaptedOptions, BasisTensor, CoverSetup, SheafKind,
};
use cpair_core::covers::{classify_cover, galois_quotient_boundary, quotient_pair};
use cpair_core::curves::{
    curve_degree, curve_irregularity, curve_is_special, curve_kappa, kappa_scan, riemann_hurwitz_genus, CurveCover,
    Kappa, OrbifoldCurve, SectionCount,
};
use cpair_core::morphisms::{
    b_birational, compare_boundaries, log_canonical_check, nc_cmorphism, orbifold_morphism, pluricanonical_pullback,
    CanonicalModel, NcNormalForm, Verdict,
};
use cpair_core::{q, qi, CPairBoundary, Chart, DivisorialMorphism, ExtRational, MonomialCover, Multiplicity, PrimeDivisor, PullBack, QDivisor, Q};
use Multiplicity::{Finite, Infinite};

fn prime(id: &str) -> PrimeDivisor {
    PrimeDivisor::abstract_prime(id)
}

fn boundary(terms: &[(&str, Multiplicity)]) -> CPairBoundary {
    CPairBoundary::from_multiplicities(terms.iter().map(|(p, m)| (prime(p), *m))).unwrap()
}

// Generators on the line: gamma^* Omega^1 = <z^(am-1) dz>, adapted
// <z^(a-1) dz>, log <z^-1 dz>.
#[test]
fn line_tables() {
    let dz = BasisTensor::new(1, vec![vec![0]]).unwrap();
    for m in [2u64, 3, 5] {
        for alpha in 1..=3u64 {
            let s = CoverSetup::diagonal(&[Finite(m)], &[alpha * m]).unwrap();
            let opts = AdaptedOptions::default();
            let kahler = standard_sheaf(&s, 1, 1, SheafKind::PullbackKahler, &opts).unwrap();
            let adapted = compute_adapted(&s, 1, 1).unwrap();
            let log = standard_sheaf(&s, 1, 1, SheafKind::PullbackLog, &opts).unwrap();
            assert_eq!(kahler.allowance(&dz).unwrap(), &[1 - (alpha * m) as i64]);
            assert_eq!(adapted.allowance(&dz).unwrap(), &[1 - alpha as i64]);
            assert_eq!(log.allowance(&dz).unwrap(), &[1]);
            // one-dimensional case: O(gamma^* D) (x) gamma^* Omega^1
            let twist = (alpha * (m - 1)) as i64;
            assert_eq!(adapted.allowance(&dz).unwrap()[0], twist + 1 - (alpha * m) as i64);
        }
    }
}

#[test]
fn surface_tables_and_strict_supersheaf() {
    let dx = BasisTensor::new(1, vec![vec![0]]).unwrap();
    let dy = BasisTensor::new(1, vec![vec![1]]).unwrap();
    for m in [2u64, 3, 5] {
        for alpha in 1..=3u64 {
            let s = CoverSetup::diagonal(&[Multiplicity::ONE, Finite(m)], &[1, alpha * m]).unwrap();
            let adapted = compute_adapted(&s, 1, 1).unwrap();
            assert_eq!(adapted.allowance(&dx).unwrap(), &[0, 0]);
            assert_eq!(adapted.allowance(&dy).unwrap(), &[0, 1 - alpha as i64]);
            let a = a_sheaf(&s, 1, 1).unwrap();
            let cap = literal_intersection(&s, 1, 1).unwrap();
            // O(gamma^* D) (x) gamma^* Omega^1 = <y^(-a(m-1)) dx, y^(a-1) dy>
            assert_eq!(a.allowance(&dx).unwrap(), &[0, (alpha * (m - 1)) as i64]);
            assert_eq!(a.allowance(&dy).unwrap(), &[0, 1 - alpha as i64]);
            assert!(a.allowance(&dx).unwrap()[1] > cap.allowance(&dx).unwrap()[1]);
            assert_eq!(cap, adapted);
        }
    }
}

#[test]
fn cover_classification_examples() {
    let x = Chart::with_axes("X", vec!["x".into(), "y".into()]).unwrap();
    let xh = Chart::with_axes("Xh", vec!["x".into(), "y".into()]).unwrap();
    for m in [2u64, 3, 5] {
        let b = x.boundary(&[Multiplicity::ONE, Finite(m)]).unwrap();
        for alpha in 1..=3 {
            let g = MonomialCover::diagonal(xh.clone(), x.clone(), &[1, alpha * m]).unwrap();
            let c = classify_cover(&g, &b).unwrap();
            assert!(c.is_adapted);
            assert_eq!(c.is_uniformization, alpha == 1);
        }
    }
}

/// Polynomials in two variables with integer coefficients.
type Poly = BTreeMap<(u32, u32), i64>;

fn poly(terms: &[((u32, u32), i64)]) -> Poly {
    let mut p = Poly::new();
    for (k, c) in terms {
        *p.entry(*k).or_default() += c;
    }
    p.retain(|_, c| *c != 0);
    p
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for ((i, j), c) in a {
        for ((k, l), d) in b {
            *out.entry((i + k, j + l)).or_default() += c * d;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (k, c) in b {
        *out.entry(*k).or_default() += c;
    }
    out.retain(|_, c| *c != 0);
    out
}

// (x^2 + y^2)^2 - x^3 + 3 x y^2
fn paquerette_polynomial() -> Poly {
    let r = poly(&[((2, 0), 1), ((0, 2), 1)]);
    add(&mul(&r, &r), &poly(&[((3, 0), -1), ((1, 2), 3)]))
}

#[test]
fn paquerette_multiplicity_from_the_equation() {
    let f = paquerette_polynomial();
    let order = f.keys().map(|(i, j)| i + j).min().unwrap();
    assert_eq!(order, 3);
    let cone: Vec<_> = f.iter().filter(|((i, j), _)| i + j == order).collect();
    assert_eq!(cone, vec![(&(1, 2), &3), (&(3, 0), &-1)]);
    // the tangent cone x (3y^2 - x^2) has three distinct real lines: in
    // t = x/y it is -t^3 + 3t, with discriminant 108 > 0
    let (a, b, c, d) = (-1i64, 0i64, 3i64, 0i64);
    let disc = 18 * a * b * c * d - 4 * b.pow(3) * d + b * b * c * c - 4 * a * c.pow(3) - 27 * a * a * d * d;
    assert_eq!(disc, 108);
}

fn paquerette_global() -> (DivisorialMorphism, CPairBoundary, CPairBoundary) {
    let mult = paquerette_polynomial().keys().map(|(i, j)| i + j).min().unwrap() as i64;
    let mut pi = DivisorialMorphism::new([prime("Ps"), prime("E")], [prime("P")]);
    pi.set_pullback(prime("P"), QDivisor::from_terms([(prime("Ps"), qi(1)), (prime("E"), qi(mult))])).unwrap();
    pi.mark_exceptional(prime("E")).unwrap();
    (pi, boundary(&[("Ps", Finite(3))]), boundary(&[("P", Finite(3))]))
}

#[test]
fn paquerette_global_and_local() {
    let (pi, bx, by) = paquerette_global();
    assert_eq!(pi.pullback(&by.to_qdivisor()).unwrap(), QDivisor::from_terms([(prime("Ps"), q(2, 3)), (prime("E"), qi(2))]));
    assert!(orbifold_morphism(&pi, &bx, &by).unwrap().passed());

    let mut local = DivisorialMorphism::new(
        ["P1s", "P2s", "P3s", "E"].map(prime),
        ["P1", "P2", "P3"].map(prime),
    );
    for i in 1..=3 {
        local
            .set_pullback(
                prime(&format!("P{i}")),
                QDivisor::from_terms([(prime(&format!("P{i}s")), qi(1)), (prime("E"), qi(1))]),
            )
            .unwrap();
    }
    local.mark_exceptional(prime("E")).unwrap();
    let bx = boundary(&[("P1s", Finite(3)), ("P2s", Finite(3)), ("P3s", Finite(3))]);
    let by = boundary(&[("P1", Finite(3)), ("P2", Finite(3)), ("P3", Finite(3))]);
    let v = orbifold_morphism(&local, &bx, &by).unwrap();
    assert_eq!(v.verdict, Verdict::Fail);
    let w = &v.witnesses[0];
    assert_eq!((w.source.id(), w.target.id()), ("E", "P1"));
    assert_eq!((w.lhs.clone(), w.rhs.clone()), (ExtRational::int(1), ExtRational::int(3)));
    assert_eq!(v.witnesses.len(), 3);
}

/// Discrepancy of the blow-up of a smooth surface point read off the chart
/// `(x, t) -> (x, x t)`.
fn blowup_discrepancy() -> Q {
    let src = Chart::with_axes("Bl", vec!["x".into(), "t".into()]).unwrap();
    let tgt = Chart::with_axes("Y", vec!["u".into(), "v".into()]).unwrap();
    let chart = MonomialCover::new(src.clone(), tgt, vec![vec![1, 1], vec![0, 1]]).unwrap();
    chart.relative_canonical().coeff(&src.hyperplane(0).unwrap())
}

fn three_lines_data() -> (DivisorialMorphism, QDivisor, CPairBoundary, QDivisor, CPairBoundary) {
    let targets = ["D1", "D2", "D3"];
    let mut phi = DivisorialMorphism::new(["D1s", "D2s", "D3s", "E"].map(prime), targets.map(prime));
    for t in targets {
        phi.set_pullback(prime(t), QDivisor::from_terms([(prime(&format!("{t}s")), qi(1)), (prime("E"), qi(1))]))
            .unwrap();
    }
    phi.mark_exceptional(prime("E")).unwrap();
    let k_x = QDivisor::term(prime("E"), blowup_discrepancy());
    let b_x = boundary(&[("D1s", Finite(3)), ("D2s", Finite(3)), ("D3s", Finite(2)), ("E", Finite(3))]);
    let b_y = boundary(&[("D1", Finite(3)), ("D2", Finite(3)), ("D3", Finite(2))]);
    (phi, k_x, b_x, QDivisor::zero(), b_y)
}

#[test]
fn three_lines_blow_up() {
    assert_eq!(blowup_discrepancy(), qi(1));
    let (phi, k_x, b_x, k_y, b_y) = three_lines_data();
    assert!(orbifold_morphism(&phi, &b_x, &b_y).unwrap().passed());
    let r = pluricanonical_pullback(&phi, &k_x, &b_x, &k_y, &b_y, 6).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.defect, QDivisor::term(prime("E"), qi(-1)));
    let model = CanonicalModel::new(k_x.clone(), k_y.clone());
    let lc = log_canonical_check(&phi, &model, &b_y, Some(&b_x)).unwrap();
    assert_eq!(lc.relative, QDivisor::term(prime("E"), q(-1, 6)));
    // a(E) = 1 - (2/3 + 2/3 + 1/2)
    assert_eq!(lc.discrepancies[&prime("E")], q(-5, 6));
    assert_eq!(lc.verdict, Verdict::Pass);

    let nf = NcNormalForm { n: Finite(3), components: vec![(1, Finite(3)), (1, Finite(3)), (1, Finite(2))] };
    assert!(nc_cmorphism(&nf).unwrap().passed());
}

#[test]
fn line_through_blown_up_point() {
    let mut phi = DivisorialMorphism::new(["Hs", "Ls", "E"].map(prime), ["H", "L"].map(prime));
    phi.set_pullback(prime("H"), QDivisor::prime(prime("Hs"))).unwrap();
    phi.set_pullback(prime("L"), QDivisor::from_terms([(prime("Ls"), qi(1)), (prime("E"), qi(1))])).unwrap();
    phi.mark_exceptional(prime("E")).unwrap();
    let alpha = DivisorialMorphism::identity(["Hs", "Ls", "E"].map(prime));
    let k_z = QDivisor::from_terms([(prime("Hs"), qi(-3)), (prime("E"), blowup_discrepancy())]);
    let b_x = boundary(&[("Ls", Infinite)]);
    let b_y = boundary(&[("L", Infinite)]);
    let r = b_birational(&alpha, &phi, &k_z, &b_x, &b_y).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.lhs, QDivisor::from_terms([(prime("Hs"), qi(-3)), (prime("Ls"), qi(1)), (prime("E"), qi(1))]));
    let v = orbifold_morphism(&phi, &b_x, &b_y).unwrap();
    assert_eq!(v.verdict, Verdict::Fail);
    assert_eq!(v.witnesses.len(), 1);
    assert_eq!(v.witnesses[0].source.id(), "E");
    assert_eq!((v.witnesses[0].lhs.clone(), v.witnesses[0].rhs.clone()), (ExtRational::int(1), ExtRational::Infinity));
}

/// Toric discrepancy of the ray `v` subdividing the cone spanned by `u1`,
/// `u2`: `a = <m, v> - 1` where `<m, u1> = <m, u2> = 1`.
fn toric_discrepancy(u1: (i64, i64), u2: (i64, i64), v: (i64, i64)) -> Q {
    let det = u1.0 * u2.1 - u1.1 * u2.0;
    let m0 = q(u2.1 - u1.1, det);
    let m1 = q(u1.0 - u2.0, det);
    m0 * qi(v.0) + m1 * qi(v.1) - qi(1)
}

#[test]
fn a1_resolution() {
    let a = toric_discrepancy((0, 1), (2, -1), (1, 0));
    assert_eq!(a, qi(0));
    let e = prime("E");
    let mut phi = DivisorialMorphism::new([e.clone()], []);
    phi.mark_exceptional(e.clone()).unwrap();
    let k_x = QDivisor::term(e.clone(), a.clone());
    let b_x = boundary(&[("E", Finite(2))]);
    let r = pluricanonical_pullback(&phi, &k_x, &b_x, &QDivisor::zero(), &CPairBoundary::empty(), 2).unwrap();
    assert_eq!(r.defect, QDivisor::prime(e.clone()));
    assert_eq!(r.verdict, Verdict::Pass);
    let model = CanonicalModel::new(k_x, QDivisor::zero());
    let lc = log_canonical_check(&phi, &model, &CPairBoundary::empty(), None).unwrap();
    assert_eq!(lc.discrepancies[&e], qi(0));
    assert_eq!(lc.verdict, Verdict::Pass);
}

fn line(name: &str) -> Chart {
    Chart::with_axes(name, vec!["z".into()]).unwrap()
}

#[test]
fn cyclic_quotients() {
    for k in 2..=12u64 {
        let g = MonomialCover::diagonal(line("Xh"), line("X"), &[k]).unwrap();
        let (dq, data) = quotient_pair(&CPairBoundary::empty(), &g.to_divisorial()).unwrap();
        let zero = line("X").hyperplane(0).unwrap();
        assert_eq!(dq.to_qdivisor(), QDivisor::term(zero.clone(), q(k as i64 - 1, k as i64)));
        assert!(data.strongly_adapted);
        assert!(classify_cover(&g, &dq).unwrap().is_strongly_adapted);

        for m in [Finite(2), Finite(3), Finite(4), Finite(6), Infinite] {
            let b = line("X").boundary(&[m]).unwrap();
            let d_prime = galois_quotient_boundary(&g, &b).unwrap();
            let hand = match m {
                Finite(m) => k >= m,
                Infinite => true,
            };
            assert_eq!(compare_boundaries(&d_prime, &b).passed(), hand, "k={k} m={m}");
        }
    }
}

#[test]
fn curve_examples() {
    let c237 = OrbifoldCurve::new(0, [Finite(2), Finite(3), Finite(7)]).unwrap();
    let by_hand = q(1, 2) + q(2, 3) + q(6, 7) - qi(2);
    assert_eq!(curve_degree(&c237), by_hand);
    assert_eq!(by_hand, q(1, 42));
    assert_eq!(curve_kappa(&c237), Kappa::One);
    assert!(!curve_is_special(&c237));
    let scan = kappa_scan(&c237);
    assert_eq!(scan[41].degree, 1);

    let c236 = OrbifoldCurve::new(0, [Finite(2), Finite(3), Finite(6)]).unwrap();
    assert_eq!(curve_degree(&c236), qi(0));
    assert_eq!(kappa_scan(&c236)[5].degree, 3 + 4 + 5 - 12);
    assert_eq!(curve_kappa(&c236), Kappa::Zero);

    let g2 = OrbifoldCurve::new(2, []).unwrap();
    assert_eq!(riemann_hurwitz_genus(&g2, &CurveCover::etale(3, 0)).unwrap(), 4);
    assert_eq!(curve_irregularity(&g2, &CurveCover::etale(3, 0)).unwrap().q, SectionCount::Exact(4));

    let p1 = OrbifoldCurve::new(0, [Finite(2), Finite(2)]).unwrap();
    let sq = CurveCover { degree: 2, profiles: vec![vec![2], vec![2]], extra: vec![] };
    let r = curve_irregularity(&p1, &sq).unwrap();
    assert!(r.degree <= -2);
    assert_eq!(r.q, SectionCount::Exact(0));
    // the twist agrees with the adapted one-forms of z -> z^2 over m = 2
    let s = CoverSetup::diagonal(&[Finite(2)], &[2]).unwrap();
    let dz = BasisTensor::new(1, vec![vec![0]]).unwrap();
    assert_eq!(compute_adapted(&s, 1, 1).unwrap().allowance(&dz).unwrap(), &[r.twist[0]]);
}
