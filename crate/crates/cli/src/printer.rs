//! Canonical reprint of a document: one statement per line, blocks indented
//! by two spaces, multiplicities as `m=K`.

use std::fmt::Write;

use cpair_core::ext::fmt_q;
use cpair_core::Q;
use num_traits::{One, Signed};

use crate::ast::*;

pub fn format_document(doc: &Document) -> String {
    let mut out = String::new();
    for item in &doc.items {
        out.push_str(&format_statement(&item.stmt));
        out.push('\n');
    }
    out
}

fn signed_terms(terms: impl Iterator<Item = (Q, String)>) -> String {
    let mut out = String::new();
    for (k, (c, body)) in terms.enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        let term = if body.is_empty() {
            fmt_q(&a)
        } else if a.is_one() {
            body
        } else {
            format!("{}*{}", fmt_q(&a), body)
        };
        match (k, neg) {
            (0, false) => out.push_str(&term),
            (0, true) => write!(out, "-{term}").unwrap(),
            (_, false) => write!(out, " + {term}").unwrap(),
            (_, true) => write!(out, " - {term}").unwrap(),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn format_divisor(d: &DivisorExpr) -> String {
    signed_terms(d.iter().map(|(c, n)| (c.clone(), n.clone())))
}

pub fn format_poly(p: &PolyExpr) -> String {
    signed_terms(p.iter().map(|(c, fs)| {
        let body: Vec<String> = fs
            .iter()
            .map(|(n, k)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
            .collect();
        (c.clone(), body.join("*"))
    }))
}

pub fn format_value(v: &Value) -> String {
    match v {
        Value::Int(n) => n.to_string(),
        Value::Word(w) => w.clone(),
        Value::List(vs) => format!("[{}]", vs.iter().map(format_value).collect::<Vec<_>>().join(", ")),
    }
}

pub fn format_arg(a: &Arg) -> String {
    match &a.key {
        Some(k) => format!("{k}={}", format_value(&a.value)),
        None => format_value(&a.value),
    }
}

fn int_rows(rows: &[Vec<u64>]) -> String {
    let inner: Vec<String> = rows
        .iter()
        .map(|r| format!("[{}]", r.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", inner.join(", "))
}

fn block(head: String, lines: Vec<String>) -> String {
    if lines.is_empty() {
        return format!("{head} {{}}");
    }
    let mut out = format!("{head} {{\n");
    for l in lines {
        writeln!(out, "  {l}").unwrap();
    }
    out.push('}');
    out
}

pub fn format_statement(s: &Statement) -> String {
    match s {
        Statement::Chart { name, dim, axes } => match axes {
            Some(a) => format!("chart {name} dim {dim} axes {}", a.join(" ")),
            None => format!("chart {name} dim {dim}"),
        },
        Statement::Pair { name, chart, items } => {
            let head = match chart {
                Some(c) => format!("pair {name} on {c}"),
                None => format!("pair {name}"),
            };
            let lines = items
                .iter()
                .map(|(m, p)| match p {
                    PrimeRef::Coord(i) => format!("m={m} coord {i}"),
                    PrimeRef::Name(n) => format!("m={m} {n}"),
                })
                .collect();
            block(head, lines)
        }
        Statement::Monomial { name, source, target, matrix } => {
            format!("monomial {name} : {source} -> {target} matrix {}", int_rows(matrix))
        }
        Statement::Morphism { name, source, target, items } => {
            let lines = items
                .iter()
                .map(|it| match it {
                    MorphItem::Pullback { target, divisor } => format!("pullback {target} = {}", format_divisor(divisor)),
                    MorphItem::Exceptional(e) => format!("exceptional {e}"),
                    MorphItem::KSource(d) => format!("K_source = {}", format_divisor(d)),
                    MorphItem::KTarget(d) => format!("K_target = {}", format_divisor(d)),
                    MorphItem::ImageIn(t) => format!("image_in {t}"),
                })
                .collect();
            block(format!("morphism {name} : {source} -> {target}"), lines)
        }
        Statement::Curve { name, genus, points } => {
            let pts: Vec<String> = points.iter().map(|m| m.to_string()).collect();
            format!("curve {name} genus {genus} points [{}]", pts.join(", "))
        }
        Statement::CurveCover { name, curve, degree, profiles, extra } => {
            let mut out = format!("curvecover {name} of {curve} degree {degree}");
            match profiles {
                Some(p) => write!(out, " profiles {}", int_rows(p)).unwrap(),
                None => out.push_str(" etale"),
            }
            if !extra.is_empty() {
                write!(out, " extra {}", int_rows(extra)).unwrap();
            }
            out
        }
        Statement::Chern { name, dim, items } => {
            let lines = items
                .iter()
                .map(|it| match it {
                    ChernItem::Symbol { name, degree } => format!("symbol {name} {degree}"),
                    ChernItem::Omega(p) => format!("omega = {}", format_poly(p)),
                    ChernItem::Component { name, m } => format!("component {name} m={m}"),
                    ChernItem::Structure { name, class } => format!("structure {name} = {}", format_poly(class)),
                })
                .collect();
            block(format!("chern {name} dim {dim}"), lines)
        }
        Statement::Check { kind, args } => {
            let mut out = format!("check {kind}");
            for a in args {
                write!(out, " {}", format_arg(a)).unwrap();
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn round_trip() {
        let src = "chart X dim 2 axes x y\npair B on X { (2/4) coord 1; m=inf y }\n\
                   monomial g : Xh -> X matrix [[2,0],[0,1]]\n\
                   morphism f : A -> B { pullback P = Ps + 3*E ; exceptional E ; K_source = -E + 0 ; image_in Q }\n\
                   curve C genus 0 points [2, 3, inf]\ncurvecover T of C degree 2 profiles [[2],[1,1],[1,1]] extra [[2]]\n\
                   curvecover U of C degree 3 etale\n\
                   chern S dim 2 { symbol c1 1; symbol D 1; omega = 1 - c1 + 1/2*c1^2 ; component D m=2 ; structure D = D }\n\
                   check nc-cmorphism n=3 a=[1, 2] targets=[3,inf]\n";
        let once = parse(src).unwrap();
        let printed = format_document(&once);
        let twice = parse(&printed).unwrap();
        assert_eq!(once.statements(), twice.statements());
        assert_eq!(printed, format_document(&twice));
        assert!(printed.contains("m=2 coord 1"));
        assert!(printed.contains("K_source = -E\n"));
        assert!(printed.contains("omega = 1 - c1 + 1/2*c1^2"));
    }

    #[test]
    fn empty_blocks_and_zero() {
        let d = parse("pair B {}\nmorphism f : A -> B { K_target = 0 }").unwrap();
        assert_eq!(format_document(&d), "pair B {}\nmorphism f : A -> B {\n  K_target = 0\n}\n");
    }
}
