//! Resolution of declarations and execution of checks.
//!
//! Declarations are resolved up front; a bad declaration aborts the run. A
//! check may only refer to names declared above it, and any error it raises
//! is recorded in its report entry.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use cpair_core::adapted::{
    basis_tensor_count, check_inclusions_with, compute_adapted_with, functoriality_check, residue_kernel_p1,
    standard_sheaf, sym_product_degree, uniformization_equivalence, AdaptedOptions, BasisTensor, CoverSetup,
    OracleContext, SheafKind, DEFAULT_MAX_TENSORS,
};
use cpair_core::chern::{expected_c1, total_c_chern, ChernConvention, GradedClass, GradedRing};
use cpair_core::covers::{classify_cover, cyclic_adapted_cover, galois_quotient_boundary, quotient_pair};
use cpair_core::curves::{
    curve_degree, curve_irregularity, curve_is_special, curve_kappa, etale_tower, kappa_scan, riemann_hurwitz_genus,
    CurveCover, OrbifoldCurve,
};
use cpair_core::ext::fmt_q;
use cpair_core::geometry::restrict_pair;
use cpair_core::morphisms::{
    b_birational, compare_boundaries, log_canonical_check, nc_cmorphism, orbifold_morphism, pluricanonical_pullback,
    CanonicalModel, MorphismVerdict, NcNormalForm, Verdict,
};
use cpair_core::sweep::{run_sweep, SweepKind};
use cpair_core::{
    CPairBoundary, Chart, DivisorialMorphism, Execution, MonomialCover, Multiplicity, PrimeDivisor, QDivisor,
};

use crate::ast::*;
use crate::error::DslError;
use crate::printer::format_arg;
use crate::report::{CheckReport, Field, Report, Status, WitnessOut};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub max_tensors: usize,
    pub seed: u64,
    pub strict: bool,
    pub exec: Execution,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_tensors: DEFAULT_MAX_TENSORS, seed: 0, strict: false, exec: Execution::Parallel }
    }
}

#[derive(Clone, Debug)]
struct PairDecl {
    chart: Option<Chart>,
    boundary: CPairBoundary,
}

#[derive(Clone, Debug)]
struct MorphDecl {
    phi: DivisorialMorphism,
    source: String,
    target: String,
    k_source: Option<QDivisor>,
    k_target: Option<QDivisor>,
}

#[derive(Clone, Debug)]
struct ChernDecl {
    omega: GradedClass,
    components: Vec<(String, Multiplicity)>,
    convention: ChernConvention,
}

#[derive(Default)]
struct Env {
    lines: HashMap<String, usize>,
    charts: HashMap<String, Chart>,
    pairs: HashMap<String, PairDecl>,
    monomials: HashMap<String, MonomialCover>,
    morphisms: HashMap<String, MorphDecl>,
    curves: HashMap<String, OrbifoldCurve>,
    covers: HashMap<String, (String, CurveCover)>,
    cherns: HashMap<String, ChernDecl>,
}

type CheckResult<T> = std::result::Result<T, String>;

fn core_err(line: usize) -> impl Fn(cpair_core::Error) -> DslError {
    move |e| DslError::semantic(line, e.to_string())
}

impl Env {
    fn build(doc: &Document) -> Result<Env, DslError> {
        let mut env = Env::default();
        for Located { line, stmt } in &doc.items {
            let line = *line;
            if let Some(name) = stmt.declared_name() {
                if env.lines.insert(name.to_string(), line).is_some() {
                    return Err(DslError::semantic(line, format!("{name} is declared twice")));
                }
            }
            match stmt {
                Statement::Chart { name, dim, axes } => {
                    let chart = match axes {
                        Some(a) => Chart::with_axes(name.clone(), a.clone()),
                        None => Chart::new(name.clone(), *dim),
                    }
                    .map_err(core_err(line))?;
                    env.charts.insert(name.clone(), chart);
                }
                Statement::Pair { name, chart, items } => {
                    let chart = match chart {
                        Some(c) => Some(env.chart(c, line)?.clone()),
                        None => None,
                    };
                    let mut boundary = CPairBoundary::empty();
                    for (m, p) in items {
                        let prime = match p {
                            PrimeRef::Coord(i) => match &chart {
                                Some(c) => c.hyperplane(i - 1).map_err(core_err(line))?,
                                None => {
                                    return Err(DslError::semantic(line, format!("pair {name} has no chart for coord {i}")))
                                }
                            },
                            PrimeRef::Name(n) => env.prime(n, chart.as_ref()),
                        };
                        boundary.insert(prime, *m).map_err(core_err(line))?;
                    }
                    env.pairs.insert(name.clone(), PairDecl { chart, boundary });
                }
                Statement::Monomial { name, source, target, matrix } => {
                    let src = env.chart(source, line)?.clone();
                    let tgt = env.chart(target, line)?.clone();
                    let cover = MonomialCover::new(src, tgt, matrix.clone()).map_err(core_err(line))?;
                    env.monomials.insert(name.clone(), cover);
                }
                Statement::Morphism { name, source, target, items } => {
                    let decl = env.morphism(source, target, items, line)?;
                    env.morphisms.insert(name.clone(), decl);
                }
                Statement::Curve { name, genus, points } => {
                    let c = OrbifoldCurve::new(*genus, points.iter().copied()).map_err(core_err(line))?;
                    env.curves.insert(name.clone(), c);
                }
                Statement::CurveCover { name, curve, degree, profiles, extra } => {
                    let c = env
                        .curves
                        .get(curve)
                        .ok_or_else(|| DslError::UnknownName { line, name: curve.clone() })?;
                    let cover = match profiles {
                        Some(p) => CurveCover { degree: *degree, profiles: p.clone(), extra: extra.clone() },
                        None => CurveCover { extra: extra.clone(), ..CurveCover::etale(*degree, c.points().len()) },
                    };
                    env.covers.insert(name.clone(), (curve.clone(), cover));
                }
                Statement::Chern { name, dim, items } => {
                    let decl = chern_decl(*dim, items, line)?;
                    env.cherns.insert(name.clone(), decl);
                }
                Statement::Check { .. } => {}
            }
        }
        Ok(env)
    }

    fn chart(&self, name: &str, line: usize) -> Result<&Chart, DslError> {
        self.charts.get(name).ok_or_else(|| DslError::UnknownName { line, name: name.to_string() })
    }

    /// An axis name of `chart`, a `CHART.axis` reference, or an abstract
    /// prime.
    fn prime(&self, name: &str, chart: Option<&Chart>) -> PrimeDivisor {
        if let Some(c) = chart {
            if let Some(i) = c.axes().iter().position(|a| a == name) {
                return c.hyperplane(i).expect("axis in range");
            }
        }
        if let Some((c, axis)) = name.split_once('.') {
            if let Some(chart) = self.charts.get(c) {
                if let Some(i) = chart.axes().iter().position(|a| a == axis) {
                    return chart.hyperplane(i).expect("axis in range");
                }
            }
        }
        PrimeDivisor::abstract_prime(name)
    }

    fn divisor(&self, d: &DivisorExpr) -> QDivisor {
        QDivisor::from_terms(d.iter().map(|(c, n)| (self.prime(n, None), c.clone())))
    }

    fn morphism(&self, source: &str, target: &str, items: &[MorphItem], line: usize) -> Result<MorphDecl, DslError> {
        let mut sources: Vec<PrimeDivisor> = Vec::new();
        let mut targets: Vec<PrimeDivisor> = Vec::new();
        if let Some(p) = self.pairs.get(source) {
            sources.extend(p.boundary.support());
        }
        if let Some(p) = self.pairs.get(target) {
            targets.extend(p.boundary.support());
        }
        let mut k_source = None;
        let mut k_target = None;
        for it in items {
            match it {
                MorphItem::Pullback { target, divisor } => {
                    targets.push(self.prime(target, None));
                    sources.extend(self.divisor(divisor).support());
                }
                MorphItem::Exceptional(e) => sources.push(self.prime(e, None)),
                MorphItem::ImageIn(t) => targets.push(self.prime(t, None)),
                MorphItem::KSource(d) => {
                    let d = self.divisor(d);
                    sources.extend(d.support());
                    k_source = Some(d);
                }
                MorphItem::KTarget(d) => {
                    let d = self.divisor(d);
                    targets.extend(d.support());
                    k_target = Some(d);
                }
            }
        }
        let mut phi = DivisorialMorphism::new(sources, targets);
        for it in items {
            match it {
                MorphItem::Pullback { target, divisor } => {
                    phi.set_pullback(self.prime(target, None), self.divisor(divisor)).map_err(core_err(line))?
                }
                MorphItem::Exceptional(e) => phi.mark_exceptional(self.prime(e, None)).map_err(core_err(line))?,
                MorphItem::ImageIn(t) => phi.mark_image_inside(self.prime(t, None)).map_err(core_err(line))?,
                _ => {}
            }
        }
        Ok(MorphDecl { phi, source: source.to_string(), target: target.to_string(), k_source, k_target })
    }
}

fn poly_class(ring: &Arc<GradedRing>, p: &PolyExpr) -> cpair_core::Result<GradedClass> {
    let mut out = GradedClass::zero(ring);
    for (c, factors) in p {
        let mut term = GradedClass::constant(ring, c.clone());
        for (name, k) in factors {
            let s = GradedClass::symbol(ring, name)?;
            for _ in 0..*k {
                term = term.mul(&s)?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

fn chern_decl(dim: usize, items: &[ChernItem], line: usize) -> Result<ChernDecl, DslError> {
    let symbols = items.iter().filter_map(|it| match it {
        ChernItem::Symbol { name, degree } => Some((name.clone(), *degree)),
        _ => None,
    });
    let ring = GradedRing::new(dim, symbols).map_err(core_err(line))?;
    let mut omega = GradedClass::one(&ring);
    let mut components = Vec::new();
    let mut custom = BTreeMap::new();
    for it in items {
        match it {
            ChernItem::Omega(p) => omega = poly_class(&ring, p).map_err(core_err(line))?,
            ChernItem::Component { name, m } => components.push((name.clone(), *m)),
            ChernItem::Structure { name, class } => {
                custom.insert(name.clone(), poly_class(&ring, class).map_err(core_err(line))?);
            }
            ChernItem::Symbol { .. } => {}
        }
    }
    let convention = if custom.is_empty() {
        ChernConvention::StructureSequence
    } else {
        ChernConvention::Custom(custom)
    };
    Ok(ChernDecl { omega, components, convention })
}

/// Parses and runs a document.
pub fn check_text(text: &str, opts: &RunOptions) -> Result<Report, DslError> {
    run(&crate::parser::parse(text)?, opts)
}

pub fn run(doc: &Document, opts: &RunOptions) -> Result<Report, DslError> {
    let env = Env::build(doc)?;
    let mut report = Report::default();
    for (k, located) in doc.checks().enumerate() {
        let Statement::Check { kind, args } = &located.stmt else { unreachable!() };
        let ctx = Ctx { env: &env, line: located.line, args, opts };
        let mut entry = CheckReport {
            index: k + 1,
            line: located.line,
            kind: kind.clone(),
            args: args.iter().map(format_arg).collect(),
            status: Status::Ok,
            values: BTreeMap::new(),
            witnesses: Vec::new(),
            error: None,
        };
        match ctx.dispatch(kind) {
            Ok(out) => {
                entry.status = out.status;
                entry.values = out.values;
                entry.witnesses = out.witnesses;
            }
            Err(e) => {
                entry.status = Status::Error;
                entry.error = Some(e);
            }
        }
        let stop = opts.strict && entry.status == Status::Error;
        report.push(entry);
        if stop {
            break;
        }
    }
    Ok(report)
}

struct Outcome {
    status: Status,
    values: BTreeMap<String, Field>,
    witnesses: Vec<WitnessOut>,
}

impl Outcome {
    fn new(status: Status) -> Self {
        Outcome { status, values: BTreeMap::new(), witnesses: Vec::new() }
    }

    fn set(&mut self, key: &str, v: impl Into<Field>) -> &mut Self {
        self.values.insert(key.to_string(), v.into());
        self
    }

    fn verdict(v: &MorphismVerdict) -> Self {
        let mut out = Outcome::new(Status::from_bool(v.verdict == Verdict::Pass));
        out.witnesses = v
            .witnesses
            .iter()
            .map(|w| WitnessOut {
                source: w.source.to_string(),
                target: w.target.to_string(),
                lhs: w.lhs.to_string(),
                rhs: w.rhs.to_string(),
            })
            .collect();
        out
    }
}

fn boundary_list(b: &CPairBoundary) -> Vec<String> {
    b.components().map(|(p, m)| format!("{p}: m={m}")).collect()
}

fn entry_lines(axes: &[String], entries: &[(BasisTensor, Vec<i64>)]) -> (Vec<String>, Vec<String>) {
    let mut generators = Vec::new();
    let mut allowances = Vec::new();
    for (t, a) in entries {
        let tensor = t.render(axes);
        let mono: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0)
            .map(|(i, v)| format!("{}^{}", axes[i], -v))
            .collect();
        generators.push(if mono.is_empty() { tensor.clone() } else { format!("{} {}", mono.join(" "), tensor) });
        let shown: Vec<String> = a.iter().map(i64::to_string).collect();
        allowances.push(format!("{tensor}: [{}]", shown.join(", ")));
    }
    (generators, allowances)
}

fn sheaf_kind(name: &str) -> CheckResult<SheafKind> {
    Ok(match name {
        "kahler" => SheafKind::PullbackKahler,
        "sym" => SheafKind::SymOfForms,
        "adapted" => SheafKind::Adapted,
        "log" => SheafKind::PullbackLog,
        "b" => SheafKind::LogPulledBack,
        "log-floor" => SheafKind::LogFloor,
        "a" => SheafKind::ALiteral,
        "a-cap-b" => SheafKind::LiteralIntersection,
        _ => return Err(format!("unknown sheaf {name}")),
    })
}

fn value_multiplicity(v: &Value) -> CheckResult<Multiplicity> {
    match v {
        Value::Int(0) => Err("multiplicity 0".into()),
        Value::Int(m) => Ok(Multiplicity::Finite(*m)),
        Value::Word(w) if w == "inf" => Ok(Multiplicity::Infinite),
        _ => Err("expected a multiplicity".into()),
    }
}

fn value_list(v: &Value) -> CheckResult<&[Value]> {
    match v {
        Value::List(vs) => Ok(vs),
        _ => Err("expected a list".into()),
    }
}

fn value_int(v: &Value) -> CheckResult<u64> {
    match v {
        Value::Int(n) => Ok(*n),
        _ => Err("expected an integer".into()),
    }
}

struct Ctx<'a> {
    env: &'a Env,
    line: usize,
    args: &'a [Arg],
    opts: &'a RunOptions,
}

impl<'a> Ctx<'a> {
    fn positional(&self, i: usize) -> Option<&'a Value> {
        self.args.iter().filter(|a| a.key.is_none()).nth(i).map(|a| &a.value)
    }

    fn key(&self, k: &str) -> Option<&'a Value> {
        self.args.iter().find(|a| a.key.as_deref() == Some(k)).map(|a| &a.value)
    }

    fn word(&self, i: usize, what: &str) -> CheckResult<&'a str> {
        match self.positional(i) {
            Some(Value::Word(w)) => Ok(w),
            _ => Err(format!("argument {} must name a {what}", i + 1)),
        }
    }

    fn opt_word(&self, i: usize) -> Option<&'a str> {
        match self.positional(i) {
            Some(Value::Word(w)) => Some(w),
            _ => None,
        }
    }

    fn int(&self, i: usize, what: &str) -> CheckResult<u64> {
        match self.positional(i) {
            Some(Value::Int(n)) => Ok(*n),
            _ => Err(format!("argument {} must be the integer {what}", i + 1)),
        }
    }

    fn lookup<T>(&self, map: &'a HashMap<String, T>, name: &str, what: &str) -> CheckResult<&'a T> {
        match (map.get(name), self.env.lines.get(name)) {
            (Some(v), Some(l)) if *l < self.line => Ok(v),
            (Some(_), _) => Err(format!("{what} {name} is declared below this check")),
            (None, _) => Err(format!("unknown {what} {name}")),
        }
    }

    fn pair(&self, name: &str) -> CheckResult<&'a PairDecl> {
        self.lookup(&self.env.pairs, name, "pair")
    }

    fn monomial(&self, name: &str) -> CheckResult<&'a MonomialCover> {
        self.lookup(&self.env.monomials, name, "monomial cover")
    }

    fn morphism(&self, name: &str) -> CheckResult<&'a MorphDecl> {
        self.lookup(&self.env.morphisms, name, "morphism")
    }

    /// The pair at position `i`, or the named header pair of a morphism.
    fn pair_or(&self, i: usize, header: &str) -> CheckResult<&'a PairDecl> {
        match self.opt_word(i) {
            Some(w) => self.pair(w),
            None => self.pair(header).map_err(|_| format!("no pair given and {header} is not a declared pair")),
        }
    }

    fn setup(&self) -> CheckResult<CoverSetup> {
        let g = self.monomial(self.word(0, "monomial cover")?)?;
        let b = self.pair(self.word(1, "pair")?)?;
        CoverSetup::new(g.clone(), b.boundary.clone()).map_err(|e| e.to_string())
    }

    fn adapted_opts(&self) -> AdaptedOptions {
        AdaptedOptions { max_tensors: self.opts.max_tensors, exec: self.opts.exec }
    }

    fn guard(&self, d: usize, n: usize, p: usize) -> CheckResult<()> {
        let count = basis_tensor_count(d, n, p);
        if count > self.opts.max_tensors as u128 {
            return Err(cpair_core::Error::TooManyTensors { count, cap: self.opts.max_tensors }.to_string());
        }
        Ok(())
    }

    fn dispatch(&self, kind: &str) -> CheckResult<Outcome> {
        match kind {
            "classify" => self.classify(),
            "cyclic-cover" => self.cyclic_cover(),
            "adapted-sheaf" => self.adapted_sheaf(),
            "oracle" => self.oracle(),
            "inclusions" => self.inclusions(),
            "residue" => self.residue(),
            "sym-product" => self.sym_product(),
            "functoriality" => self.functoriality(),
            "uniformization" => self.uniformization(),
            "orbifold" => self.orbifold(),
            "nc-cmorphism" => self.nc(),
            "pluricanonical" => self.pluricanonical(),
            "compare" => self.compare(),
            "log-canonical" => self.log_canonical(),
            "b-birational" => self.b_birational(),
            "quotient" => self.quotient(),
            "galois-quotient" => self.galois_quotient(),
            "chern" => self.chern(),
            "curve" => self.curve(),
            "riemann-hurwitz" => self.riemann_hurwitz(),
            "irregularity" => self.irregularity(),
            "etale-tower" => self.etale_tower(),
            "restrict" => self.restrict(),
            "sweep" => self.sweep(),
            _ => Err(format!("unknown check kind {kind}")),
        }
    }

    fn classify(&self) -> CheckResult<Outcome> {
        let g = self.monomial(self.word(0, "monomial cover")?)?;
        let b = self.pair(self.word(1, "pair")?)?;
        let c = classify_cover(g, &b.boundary).map_err(|e| e.to_string())?;
        let mut out = Outcome::new(Status::Ok);
        out.set("finite", c.is_finite)
            .set("adapted", c.is_adapted)
            .set("strongly_adapted", c.is_strongly_adapted)
            .set("uniformization", c.is_uniformization)
            .set("branch", c.branch.iter().map(|p| p.to_string()).collect::<Vec<_>>())
            .set("branch_in_support", c.branch_in_support)
            .set("pulled_back_orb", c.pulled_back_orb.to_string());
        Ok(out)
    }

    fn cyclic_cover(&self) -> CheckResult<Outcome> {
        let b = self.pair(self.word(0, "pair")?)?;
        let spec = cyclic_adapted_cover(&b.boundary);
        let mut out = Outcome::new(Status::Ok);
        out.set("degree", spec.degree.to_string())
            .set("exponents", spec.exponents.iter().map(|(p, e)| format!("{p}: {e}")).collect::<Vec<_>>());
        if let Some(chart) = &b.chart {
            let local = spec.local_cover(chart).map_err(|e| e.to_string())?;
            let exps = local.diagonal_exponents().expect("diagonal by construction");
            let c = classify_cover(&local, &b.boundary).map_err(|e| e.to_string())?;
            out.set("local_exponents", exps.iter().map(u64::to_string).collect::<Vec<_>>())
                .set("local_adapted", c.is_adapted);
        }
        Ok(out)
    }

    fn degrees(&self, at: usize) -> CheckResult<(usize, usize)> {
        Ok((self.int(at, "n")? as usize, self.int(at + 1, "p")? as usize))
    }

    fn adapted_sheaf(&self) -> CheckResult<Outcome> {
        let s = self.setup()?;
        let (n, p) = self.degrees(2)?;
        let kind = match self.key("sheaf") {
            Some(Value::Word(w)) => sheaf_kind(w)?,
            Some(_) => return Err("sheaf= takes a name".into()),
            None => SheafKind::Adapted,
        };
        let axes = s.cover().source().axes().to_vec();
        let (entries, route) = if s.cover().is_diagonal() {
            let sheaf = standard_sheaf(&s, n, p, kind, &self.adapted_opts()).map_err(|e| e.to_string())?;
            (sheaf.entries().to_vec(), "closed form")
        } else if kind == SheafKind::Adapted {
            let ctx = OracleContext::new(&s, n, p, self.opts.max_tensors).map_err(|e| e.to_string())?;
            let entries = ctx
                .tensors()
                .iter()
                .enumerate()
                .map(|(k, t)| (t.clone(), ctx.oracle_allowance(k)))
                .collect();
            (entries, "membership oracle")
        } else {
            return Err(cpair_core::Error::NonDiagonal.to_string());
        };
        let (generators, allowances) = entry_lines(&axes, &entries);
        let mut out = Outcome::new(Status::Ok);
        out.set("sheaf", kind.name())
            .set("route", route)
            .set("generators", generators)
            .set("allowances", allowances);
        Ok(out)
    }

    fn oracle(&self) -> CheckResult<Outcome> {
        let s = self.setup()?;
        let (n, p) = self.degrees(2)?;
        let ctx = OracleContext::new(&s, n, p, self.opts.max_tensors).map_err(|e| e.to_string())?;
        let closed = if s.cover().is_diagonal() {
            Some(compute_adapted_with(&s, n, p, &self.adapted_opts()).map_err(|e| e.to_string())?)
        } else {
            None
        };
        let axes = s.cover().source().axes();
        let mut mismatches = Vec::new();
        for (k, t) in ctx.tensors().iter().enumerate() {
            let a = ctx.oracle_allowance(k);
            if let Some(c) = &closed {
                if c.allowance(t) != Some(a.as_slice()) {
                    mismatches.push(format!("{}: oracle {:?}, closed form {:?}", t.render(axes), a, c.allowance(t)));
                    continue;
                }
            }
            if let Some(e) = ctx.scan_corner(k, &a, 2) {
                mismatches.push(format!("{}: membership changes inside the box at {:?}", t.render(axes), e));
            }
        }
        let mut out = Outcome::new(Status::from_bool(mismatches.is_empty()));
        out.set("tensors", ctx.tensors().len().to_string())
            .set("closed_form_compared", closed.is_some())
            .set("mismatches", mismatches);
        Ok(out)
    }

    fn inclusions(&self) -> CheckResult<Outcome> {
        let s = self.setup()?;
        let (n, p) = self.degrees(2)?;
        let r = check_inclusions_with(&s, n, p, &self.adapted_opts()).map_err(|e| e.to_string())?;
        let lines = r
            .entries
            .iter()
            .map(|e| {
                let rel = match (e.holds, e.equal) {
                    (true, true) => "equal",
                    (true, false) => "strict",
                    (false, _) => "fails",
                };
                format!("{} <= {}: {rel}", e.smaller, e.larger)
            })
            .collect::<Vec<_>>();
        let mut out = Outcome::new(Status::from_bool(r.all_hold()));
        out.set("inclusions", lines).set("iota_equal", r.iota().equal);
        Ok(out)
    }

    fn residue(&self) -> CheckResult<Outcome> {
        let s = self.setup()?;
        let res = residue_kernel_p1(&s).map_err(|e| e.to_string())?;
        let adapted = compute_adapted_with(&s, 1, 1, &self.adapted_opts()).map_err(|e| e.to_string())?;
        let mut out = Outcome::new(Status::from_bool(res == adapted));
        out.set("residue_generators", res.generators()).set("adapted_generators", adapted.generators());
        Ok(out)
    }

    fn sym_product(&self) -> CheckResult<Outcome> {
        let s = self.setup()?;
        let n1 = self.int(2, "n1")? as usize;
        let n2 = self.int(3, "n2")? as usize;
        let p = self.int(4, "p")? as usize;
        self.guard(s.dim(), n1 + n2, p)?;
        let r = sym_product_degree(&s, n1, n2, p).map_err(|e| e.to_string())?;
        let equal = r.sym_equalities.iter().all(|(_, e)| *e);
        let mut out = Outcome::new(Status::from_bool(r.superadditive && (!r.adapted || equal)));
        out.set("pairs_checked", r.pairs_checked.to_string())
            .set("superadditive", r.superadditive)
            .set("adapted", r.adapted)
            .set(
                "sym_equals_adapted",
                r.sym_equalities.iter().map(|(n, e)| format!("n={n}: {e}")).collect::<Vec<_>>(),
            );
        if let Some((t1, t2)) = &r.first_violation {
            let axes = s.cover().source().axes();
            out.set("first_violation", format!("{} * {}", t1.render(axes), t2.render(axes)));
        }
        Ok(out)
    }

    fn functoriality(&self) -> CheckResult<Outcome> {
        let alpha = self.monomial(self.word(0, "monomial cover")?)?;
        let beta = self.monomial(self.word(1, "monomial cover")?)?;
        let b = self.pair(self.word(2, "pair")?)?;
        let (n, p) = self.degrees(3)?;
        self.guard(alpha.dim(), n, p)?;
        let r = functoriality_check(alpha, beta, &b.boundary, n, p).map_err(|e| e.to_string())?;
        let ok = r.inclusion_holds && (!r.beta_adapted || r.equality);
        let gamma: Vec<String> = r.gamma.diagonal_exponents().unwrap_or_default().iter().map(u64::to_string).collect();
        let mut out = Outcome::new(Status::from_bool(ok));
        out.set("gamma_exponents", gamma)
            .set("inclusion_holds", r.inclusion_holds)
            .set("equality", r.equality)
            .set("beta_adapted", r.beta_adapted);
        Ok(out)
    }

    fn uniformization(&self) -> CheckResult<Outcome> {
        let s = self.setup()?;
        let n_max = match self.key("nmax") {
            Some(v) => value_int(v)? as usize,
            None => 3,
        };
        for p in 1..=s.dim() {
            self.guard(s.dim(), n_max, p)?;
        }
        let r = uniformization_equivalence(&s, n_max).map_err(|e| e.to_string())?;
        let status = if r.adapted { Status::from_bool(r.consistent()) } else { Status::Ok };
        let mut out = Outcome::new(status);
        out.set("adapted", r.adapted)
            .set("uniformization", r.uniformization)
            .set("exists_equal", r.exists_equal())
            .set("all_equal", r.all_equal())
            .set(
                "iota_equalities",
                r.equalities.iter().map(|(n, p, e)| format!("({n}, {p}): {e}")).collect::<Vec<_>>(),
            );
        Ok(out)
    }

    fn orbifold(&self) -> CheckResult<Outcome> {
        let m = self.morphism(self.word(0, "morphism")?)?;
        let bx = self.pair_or(1, &m.source)?;
        let by = self.pair_or(2, &m.target)?;
        let v = orbifold_morphism(&m.phi, &bx.boundary, &by.boundary).map_err(|e| e.to_string())?;
        Ok(Outcome::verdict(&v))
    }

    fn nc(&self) -> CheckResult<Outcome> {
        let n = value_multiplicity(self.key("n").ok_or("missing n=")?)?;
        let a = value_list(self.key("a").ok_or("missing a=")?)?;
        let t = value_list(self.key("targets").ok_or("missing targets=")?)?;
        if a.len() != t.len() {
            return Err(format!("{} exponents for {} targets", a.len(), t.len()));
        }
        let components = a
            .iter()
            .zip(t)
            .map(|(a, t)| Ok((value_int(a)?, value_multiplicity(t)?)))
            .collect::<CheckResult<Vec<_>>>()?;
        let nf = NcNormalForm { n, components };
        let v = nc_cmorphism(&nf).map_err(|e| e.to_string())?;
        let (phi, bx, by) = nf.to_divisorial().map_err(|e| e.to_string())?;
        let orb = orbifold_morphism(&phi, &bx, &by).map_err(|e| e.to_string())?;
        let mut out = Outcome::verdict(&v);
        out.set("orbifold_criterion", orb.verdict.to_string());
        Ok(out)
    }

    fn canonical(&self, m: &MorphDecl) -> CheckResult<(QDivisor, QDivisor)> {
        match (&m.k_source, &m.k_target) {
            (Some(s), Some(t)) => Ok((s.clone(), t.clone())),
            (None, _) => Err(cpair_core::Error::MissingCanonical("K_source".into()).to_string()),
            (_, None) => Err(cpair_core::Error::MissingCanonical("K_target".into()).to_string()),
        }
    }

    fn pluricanonical(&self) -> CheckResult<Outcome> {
        let m = self.morphism(self.word(0, "morphism")?)?;
        let deg = self.int(1, "m")?;
        let bx = self.pair_or(2, &m.source)?;
        let by = self.pair_or(3, &m.target)?;
        let (kx, ky) = self.canonical(m)?;
        let r = pluricanonical_pullback(&m.phi, &kx, &bx.boundary, &ky, &by.boundary, deg).map_err(|e| e.to_string())?;
        let mut out = Outcome::new(Status::from_bool(r.verdict == Verdict::Pass));
        out.set("defect", r.defect.to_string());
        Ok(out)
    }

    fn compare(&self) -> CheckResult<Outcome> {
        let b1 = self.pair(self.word(0, "pair")?)?;
        let b2 = self.pair(self.word(1, "pair")?)?;
        Ok(Outcome::verdict(&compare_boundaries(&b1.boundary, &b2.boundary)))
    }

    fn log_canonical(&self) -> CheckResult<Outcome> {
        let m = self.morphism(self.word(0, "morphism")?)?;
        let by = self.pair_or(1, &m.target)?;
        let bx = match self.opt_word(2) {
            Some(w) => Some(self.pair(w)?),
            None => self.pair(&m.source).ok(),
        };
        let model = CanonicalModel { k_source: m.k_source.clone(), k_target: m.k_target.clone() };
        let r = log_canonical_check(&m.phi, &model, &by.boundary, bx.map(|b| &b.boundary)).map_err(|e| e.to_string())?;
        let mut out = Outcome::new(Status::from_bool(r.verdict == Verdict::Pass));
        out.set(
            "discrepancies",
            r.discrepancies.iter().map(|(e, a)| format!("{e}: {}", fmt_q(a))).collect::<Vec<_>>(),
        )
        .set("relative", r.relative.to_string());
        Ok(out)
    }

    fn b_birational(&self) -> CheckResult<Outcome> {
        let alpha = self.morphism(self.word(0, "morphism")?)?;
        let beta = self.morphism(self.word(1, "morphism")?)?;
        let bx = self.pair_or(2, &alpha.target)?;
        let by = self.pair_or(3, &beta.target)?;
        let kz = alpha
            .k_source
            .as_ref()
            .ok_or_else(|| cpair_core::Error::MissingCanonical(format!("K_source of {}", alpha.source)).to_string())?;
        let r = b_birational(&alpha.phi, &beta.phi, kz, &bx.boundary, &by.boundary).map_err(|e| e.to_string())?;
        let mut out = Outcome::new(Status::from_bool(r.verdict == Verdict::Pass));
        out.set("lhs", r.lhs.to_string()).set("rhs", r.rhs.to_string());
        Ok(out)
    }

    fn quotient_map(&self, name: &str) -> CheckResult<DivisorialMorphism> {
        if let Ok(g) = self.monomial(name) {
            return Ok(g.to_divisorial());
        }
        self.morphism(name).map(|m| m.phi.clone()).map_err(|_| format!("unknown map {name}"))
    }

    fn quotient(&self) -> CheckResult<Outcome> {
        let q = self.quotient_map(self.word(0, "map")?)?;
        let b = self.pair(self.word(1, "pair")?)?;
        let (dq, data) = quotient_pair(&b.boundary, &q).map_err(|e| e.to_string())?;
        let entries = data
            .entries
            .iter()
            .map(|e| {
                let pre: Vec<String> = e.preimages.iter().map(|(s, k, m)| format!("{s} (k={k}, m={m})")).collect();
                format!("{}: m={} from {}", e.prime, e.m_h, pre.join(", "))
            })
            .collect::<Vec<_>>();
        let mut out = Outcome::new(Status::from_bool(data.strongly_adapted));
        out.set("boundary", boundary_list(&dq))
            .set("divisor", dq.to_qdivisor().to_string())
            .set("entries", entries)
            .set("strongly_adapted", data.strongly_adapted);
        Ok(out)
    }

    fn galois_quotient(&self) -> CheckResult<Outcome> {
        let g = self.monomial(self.word(0, "monomial cover")?)?;
        let b = self.pair(self.word(1, "pair")?)?;
        let d_prime = galois_quotient_boundary(g, &b.boundary).map_err(|e| e.to_string())?;
        let mut out = Outcome::verdict(&compare_boundaries(&d_prime, &b.boundary));
        out.set("quotient_boundary", d_prime.to_qdivisor().to_string())
            .set("boundary", b.boundary.to_qdivisor().to_string());
        Ok(out)
    }

    fn chern(&self) -> CheckResult<Outcome> {
        let c = self.lookup(&self.env.cherns, self.word(0, "chern datum")?, "chern datum")?;
        let total = total_c_chern(&c.omega, &c.components, &c.convention).map_err(|e| e.to_string())?;
        let c1 = expected_c1(&c.omega, &c.components).map_err(|e| e.to_string())?;
        let dim = c.omega.ring().dim();
        let parts = (0..=dim).map(|k| format!("{k}: {}", total.part(k))).collect::<Vec<_>>();
        let mut out = Outcome::new(Status::from_bool(total.part(1) == c1));
        out.set("total", total.to_string()).set("parts", parts).set("expected_c1", c1.to_string());
        Ok(out)
    }

    fn curve(&self) -> CheckResult<Outcome> {
        let c = self.lookup(&self.env.curves, self.word(0, "curve")?, "curve")?;
        let scan = kappa_scan(c)
            .iter()
            .map(|e| format!("m={}: deg={} h0={}", e.m, e.degree, e.h0))
            .collect::<Vec<_>>();
        let mut out = Outcome::new(Status::Ok);
        out.set("degree", fmt_q(&curve_degree(c)))
            .set("kappa", curve_kappa(c).to_string())
            .set("special", curve_is_special(c))
            .set("scan", scan);
        Ok(out)
    }

    fn curve_cover(&self) -> CheckResult<(&'a OrbifoldCurve, &'a CurveCover)> {
        let (curve, cover) = self.lookup(&self.env.covers, self.word(0, "curve cover")?, "curve cover")?;
        Ok((self.lookup(&self.env.curves, curve, "curve")?, cover))
    }

    fn riemann_hurwitz(&self) -> CheckResult<Outcome> {
        let (c, cover) = self.curve_cover()?;
        let g = riemann_hurwitz_genus(c, cover).map_err(|e| e.to_string())?;
        let mut out = Outcome::new(Status::Ok);
        out.set("genus", g.to_string());
        Ok(out)
    }

    fn irregularity(&self) -> CheckResult<Outcome> {
        let (c, cover) = self.curve_cover()?;
        let r = curve_irregularity(c, cover).map_err(|e| e.to_string())?;
        let mut out = Outcome::new(Status::Ok);
        out.set("cover_genus", r.cover_genus.to_string())
            .set("twist", r.twist.iter().map(i64::to_string).collect::<Vec<_>>())
            .set("twist_degree", r.degree.to_string())
            .set("q", r.q.to_string());
        Ok(out)
    }

    fn etale_tower(&self) -> CheckResult<Outcome> {
        let g = self.int(0, "genus")?;
        let degrees = value_list(self.positional(1).ok_or("missing degree list")?)?
            .iter()
            .map(value_int)
            .collect::<CheckResult<Vec<_>>>()?;
        let genera = etale_tower(g, &degrees).map_err(|e| e.to_string())?;
        let mut out = Outcome::new(Status::Ok);
        out.set("genera", genera.iter().map(u64::to_string).collect::<Vec<_>>());
        Ok(out)
    }

    fn restrict(&self) -> CheckResult<Outcome> {
        let b = self.pair(self.word(0, "pair")?)?;
        let axis = self.int(1, "axis")? as usize;
        let chart = b.chart.as_ref().ok_or("restriction needs a pair on a chart")?;
        if axis == 0 {
            return Err("axes are numbered from 1".into());
        }
        let (sub, rb) = restrict_pair(chart, &b.boundary, axis - 1).map_err(|e| e.to_string())?;
        let mut out = Outcome::new(Status::Ok);
        out.set("chart", sub.name()).set("boundary", boundary_list(&rb));
        Ok(out)
    }

    fn sweep(&self) -> CheckResult<Outcome> {
        let kind: SweepKind = self.word(0, "sweep kind")?.parse()?;
        let count = self.int(1, "count")? as usize;
        let r = run_sweep(kind, count, self.opts.seed, self.opts.exec);
        let mut out = Outcome::new(Status::from_bool(r.passed()));
        out.set("instances", r.instances.to_string())
            .set("failures", r.failures.to_string())
            .set("seed", r.seed.to_string());
        if let Some(f) = r.first_failure {
            out.set("first_failure", f);
        }
        Ok(out)
    }
}
