//! Recursive-descent parser for the line-oriented document grammar.

use cpair_core::{Error as CoreError, Multiplicity, Q};
use num_traits::Zero;

use crate::ast::*;
use crate::error::DslError;
use crate::lexer::{lex, Tok, Token};

pub fn parse(text: &str) -> Result<Document, DslError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut items = Vec::new();
    loop {
        p.skip_newlines();
        if p.peek().tok == Tok::Eof {
            break;
        }
        let line = p.peek().line;
        let stmt = p.statement()?;
        p.end_statement()?;
        items.push(Located { line, stmt });
    }
    Ok(Document { items })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Int(n) => format!("'{n}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Arrow => "'->'".into(),
        Tok::Newline => "end of line".into(),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn err(&self, what: &str) -> DslError {
        let t = self.peek();
        DslError::syntax(t.line, t.col, format!("expected {what}, found {}", describe(&t.tok)))
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), DslError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.err(&format!("'{c}'")))
        }
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == w)
    }

    fn keyword(&mut self, w: &str) -> Result<(), DslError> {
        if self.at_word(w) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&format!("'{w}'")))
        }
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.err("a name")),
        }
    }

    fn int(&mut self) -> Result<u64, DslError> {
        match self.peek().tok {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.err("an integer")),
        }
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.bump();
        }
    }

    fn end_statement(&mut self) -> Result<(), DslError> {
        match self.peek().tok {
            Tok::Newline | Tok::Eof => Ok(()),
            _ => Err(self.err("end of line")),
        }
    }

    fn at_item_end(&self) -> bool {
        matches!(self.peek().tok, Tok::Newline | Tok::Eof | Tok::Sym(';') | Tok::Sym('}'))
    }

    /// Runs `item` for each entry of a `{ ... }` block; entries are separated
    /// by `;` or line breaks.
    fn block<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, DslError>) -> Result<Vec<T>, DslError> {
        self.expect_sym('{')?;
        let mut out = Vec::new();
        loop {
            while matches!(self.peek().tok, Tok::Newline | Tok::Sym(';')) {
                self.bump();
            }
            if self.eat_sym('}') {
                return Ok(out);
            }
            if self.peek().tok == Tok::Eof {
                return Err(self.err("'}'"));
            }
            out.push(item(self)?);
            if !self.at_item_end() {
                return Err(self.err("';', '}' or end of line"));
            }
        }
    }

    fn list<T>(&mut self, mut elem: impl FnMut(&mut Self) -> Result<T, DslError>) -> Result<Vec<T>, DslError> {
        self.expect_sym('[')?;
        let mut out = Vec::new();
        self.skip_newlines();
        if self.eat_sym(']') {
            return Ok(out);
        }
        loop {
            self.skip_newlines();
            out.push(elem(self)?);
            self.skip_newlines();
            if self.eat_sym(']') {
                return Ok(out);
            }
            self.expect_sym(',')?;
        }
    }

    fn multiplicity(&mut self) -> Result<Multiplicity, DslError> {
        if self.at_word("inf") {
            self.bump();
            return Ok(Multiplicity::Infinite);
        }
        let (line, col) = (self.peek().line, self.peek().col);
        match self.int()? {
            0 => Err(DslError::Coefficient {
                line,
                col,
                source: CoreError::InvalidMultiplicity("0".into()),
            }),
            m => Ok(Multiplicity::Finite(m)),
        }
    }

    /// `p` or `p/q`, without sign.
    fn rational(&mut self) -> Result<Q, DslError> {
        let num = self.int()?;
        if self.eat_sym('/') {
            let (line, col) = (self.peek().line, self.peek().col);
            let den = self.int()?;
            if den == 0 {
                return Err(DslError::syntax(line, col, "zero denominator"));
            }
            return Ok(Q::new((num as i64).into(), (den as i64).into()));
        }
        Ok(Q::from_integer((num as i64).into()))
    }

    fn statement(&mut self) -> Result<Statement, DslError> {
        let head = self.ident().map_err(|_| self.err("a statement keyword"))?;
        match head.as_str() {
            "chart" => self.chart(),
            "pair" => self.pair(),
            "monomial" => self.monomial(),
            "morphism" => self.morphism(),
            "curve" => self.curve(),
            "curvecover" => self.curve_cover(),
            "chern" => self.chern(),
            "check" => self.check(),
            _ => {
                let t = &self.toks[self.pos - 1];
                Err(DslError::syntax(t.line, t.col, format!("unknown statement '{head}'")))
            }
        }
    }

    fn chart(&mut self) -> Result<Statement, DslError> {
        let name = self.ident()?;
        self.keyword("dim")?;
        let dim = self.int()? as usize;
        let axes = if self.at_word("axes") {
            let line = self.bump().line;
            let mut axes = Vec::new();
            while let Tok::Ident(_) = self.peek().tok {
                axes.push(self.ident()?);
            }
            if axes.len() != dim {
                return Err(DslError::semantic(line, format!("chart {name} has dim {dim} but {} axes", axes.len())));
            }
            Some(axes)
        } else {
            None
        };
        Ok(Statement::Chart { name, dim, axes })
    }

    fn prime_ref(&mut self) -> Result<PrimeRef, DslError> {
        if self.at_word("coord") && matches!(self.peek_at(1), Tok::Int(_)) {
            self.bump();
            let (line, col) = (self.peek().line, self.peek().col);
            let i = self.int()? as usize;
            if i == 0 {
                return Err(DslError::syntax(line, col, "coordinates are numbered from 1"));
            }
            return Ok(PrimeRef::Coord(i));
        }
        Ok(PrimeRef::Name(self.ident()?))
    }

    fn pair_item(&mut self) -> Result<(Multiplicity, PrimeRef), DslError> {
        let (line, col) = (self.peek().line, self.peek().col);
        if self.eat_sym('(') {
            let c = self.rational()?;
            self.expect_sym(')')?;
            let prime = self.prime_ref()?;
            let m = Multiplicity::from_coefficient(&c).ok_or_else(|| DslError::Coefficient {
                line,
                col,
                source: CoreError::NotStandardCoefficient {
                    prime: match &prime {
                        PrimeRef::Coord(i) => format!("coord {i}"),
                        PrimeRef::Name(n) => n.clone(),
                    },
                    coefficient: cpair_core::ext::fmt_q(&c),
                },
            })?;
            return Ok((m, prime));
        }
        if self.at_word("m") && self.peek_at(1) == &Tok::Sym('=') {
            self.bump();
            self.bump();
            let m = self.multiplicity()?;
            return Ok((m, self.prime_ref()?));
        }
        Err(self.err("a coefficient '(a/b)' or 'm=K'"))
    }

    fn pair(&mut self) -> Result<Statement, DslError> {
        let name = self.ident()?;
        let chart = if self.at_word("on") {
            self.bump();
            Some(self.ident()?)
        } else {
            None
        };
        let items = self.block(Self::pair_item)?;
        Ok(Statement::Pair { name, chart, items })
    }

    fn arrow_header(&mut self) -> Result<(String, String, String), DslError> {
        let name = self.ident()?;
        self.expect_sym(':')?;
        let source = self.ident()?;
        if self.peek().tok != Tok::Arrow {
            return Err(self.err("'->'"));
        }
        self.bump();
        let target = self.ident()?;
        Ok((name, source, target))
    }

    fn monomial(&mut self) -> Result<Statement, DslError> {
        let (name, source, target) = self.arrow_header()?;
        self.keyword("matrix")?;
        let matrix = self.list(|p| p.list(Self::int))?;
        Ok(Statement::Monomial { name, source, target, matrix })
    }

    /// Signed sum of terms `c * f1^k1 * f2 ...`.
    fn poly(&mut self) -> Result<PolyExpr, DslError> {
        let mut out = Vec::new();
        let mut negative = if self.eat_sym('-') {
            true
        } else {
            self.eat_sym('+');
            false
        };
        loop {
            let mut coeff = None;
            if matches!(self.peek().tok, Tok::Int(_)) {
                coeff = Some(self.rational()?);
            } else if self.at_sym('(') {
                self.bump();
                coeff = Some(self.rational()?);
                self.expect_sym(')')?;
            }
            let mut factors = Vec::new();
            if coeff.is_none() || self.eat_sym('*') || matches!(self.peek().tok, Tok::Ident(_)) {
                loop {
                    let f = self.ident()?;
                    let k = if self.eat_sym('^') { self.int()? as u32 } else { 1 };
                    factors.push((f, k));
                    if !self.eat_sym('*') {
                        break;
                    }
                }
            }
            let c = coeff.unwrap_or_else(|| Q::from_integer(1.into()));
            out.push((if negative { -c } else { c }, factors));
            if self.eat_sym('+') {
                negative = false;
            } else if self.eat_sym('-') {
                negative = true;
            } else {
                return Ok(out);
            }
        }
    }

    fn divisor(&mut self) -> Result<DivisorExpr, DslError> {
        let line = self.peek().line;
        let mut out = Vec::new();
        for (c, factors) in self.poly()? {
            match factors.as_slice() {
                [] if c.is_zero() => {}
                [(name, 1)] => out.push((c, name.clone())),
                _ => return Err(DslError::semantic(line, "divisors are sums of c*NAME terms")),
            }
        }
        Ok(out)
    }

    fn morph_item(&mut self) -> Result<MorphItem, DslError> {
        let key = self.ident().map_err(|_| self.err("a morphism entry"))?;
        match key.as_str() {
            "pullback" => {
                let target = self.ident()?;
                self.expect_sym('=')?;
                Ok(MorphItem::Pullback { target, divisor: self.divisor()? })
            }
            "exceptional" => Ok(MorphItem::Exceptional(self.ident()?)),
            "image_in" => Ok(MorphItem::ImageIn(self.ident()?)),
            "K_source" => {
                self.expect_sym('=')?;
                Ok(MorphItem::KSource(self.divisor()?))
            }
            "K_target" => {
                self.expect_sym('=')?;
                Ok(MorphItem::KTarget(self.divisor()?))
            }
            _ => {
                let t = &self.toks[self.pos - 1];
                Err(DslError::syntax(t.line, t.col, format!("unknown morphism entry '{key}'")))
            }
        }
    }

    fn morphism(&mut self) -> Result<Statement, DslError> {
        let (name, source, target) = self.arrow_header()?;
        let items = self.block(Self::morph_item)?;
        Ok(Statement::Morphism { name, source, target, items })
    }

    fn curve(&mut self) -> Result<Statement, DslError> {
        let name = self.ident()?;
        self.keyword("genus")?;
        let genus = self.int()?;
        let points = if self.at_word("points") {
            self.bump();
            self.list(Self::multiplicity)?
        } else {
            Vec::new()
        };
        Ok(Statement::Curve { name, genus, points })
    }

    fn curve_cover(&mut self) -> Result<Statement, DslError> {
        let name = self.ident()?;
        self.keyword("of")?;
        let curve = self.ident()?;
        self.keyword("degree")?;
        let degree = self.int()?;
        let profiles = if self.at_word("etale") {
            self.bump();
            None
        } else {
            self.keyword("profiles")?;
            Some(self.list(|p| p.list(Self::int))?)
        };
        let extra = if self.at_word("extra") {
            self.bump();
            self.list(|p| p.list(Self::int))?
        } else {
            Vec::new()
        };
        Ok(Statement::CurveCover { name, curve, degree, profiles, extra })
    }

    fn chern_item(&mut self) -> Result<ChernItem, DslError> {
        let key = self.ident().map_err(|_| self.err("a chern entry"))?;
        match key.as_str() {
            "symbol" => {
                let name = self.ident()?;
                Ok(ChernItem::Symbol { name, degree: self.int()? as usize })
            }
            "omega" => {
                self.expect_sym('=')?;
                Ok(ChernItem::Omega(self.poly()?))
            }
            "component" => {
                let name = self.ident()?;
                self.keyword("m")?;
                self.expect_sym('=')?;
                Ok(ChernItem::Component { name, m: self.multiplicity()? })
            }
            "structure" => {
                let name = self.ident()?;
                self.expect_sym('=')?;
                Ok(ChernItem::Structure { name, class: self.poly()? })
            }
            _ => {
                let t = &self.toks[self.pos - 1];
                Err(DslError::syntax(t.line, t.col, format!("unknown chern entry '{key}'")))
            }
        }
    }

    fn chern(&mut self) -> Result<Statement, DslError> {
        let name = self.ident()?;
        self.keyword("dim")?;
        let dim = self.int()? as usize;
        let items = self.block(Self::chern_item)?;
        Ok(Statement::Chern { name, dim, items })
    }

    fn value(&mut self) -> Result<Value, DslError> {
        match self.peek().tok {
            Tok::Int(n) => {
                self.bump();
                Ok(Value::Int(n))
            }
            Tok::Ident(_) => Ok(Value::Word(self.glued_word()?)),
            Tok::Sym('[') => Ok(Value::List(self.list(Self::value)?)),
            _ => Err(self.err("a value")),
        }
    }

    /// A name, with `-`-joined parts when written without spaces, as in
    /// `adapted-sheaf`.
    fn glued_word(&mut self) -> Result<String, DslError> {
        let mut last = self.peek().clone();
        let mut word = self.ident()?;
        while self.at_sym('-') && last.touches(self.peek()) {
            let dash = self.peek().clone();
            if !dash.touches(&self.toks[self.pos + 1]) {
                break;
            }
            self.bump();
            last = self.peek().clone();
            word.push('-');
            word.push_str(&self.ident()?);
        }
        Ok(word)
    }

    fn check(&mut self) -> Result<Statement, DslError> {
        let kind = self.glued_word().map_err(|_| self.err("a check kind"))?;
        let mut args = Vec::new();
        while !matches!(self.peek().tok, Tok::Newline | Tok::Eof) {
            if matches!(self.peek().tok, Tok::Ident(_)) && self.peek_at(1) == &Tok::Sym('=') {
                let key = self.ident()?;
                self.bump();
                args.push(Arg { key: Some(key), value: self.value()? });
            } else {
                args.push(Arg { key: None, value: self.value()? });
            }
        }
        Ok(Statement::Check { kind, args })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cpair_core::q;

    #[test]
    fn pairs_normalize_coefficients() {
        let a = parse("pair B on X { (1/2) coord 1 ; m=inf P }").unwrap();
        let b = parse("pair B on X {\n  m=2 coord 1\n  (1) P\n}").unwrap();
        assert_eq!(a.statements(), b.statements());
    }

    #[test]
    fn non_standard_coefficient_reports_its_line() {
        let e = parse("chart X dim 1\npair B on X {\n  (1/3) coord 1\n}").unwrap_err();
        assert_eq!(e.line(), 3);
        assert!(matches!(e, DslError::Coefficient { source: CoreError::NotStandardCoefficient { .. }, .. }));
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let e = parse("chart X dim\n").unwrap_err();
        assert_eq!(e, DslError::syntax(1, 12, "expected an integer, found end of line"));
        let e = parse("monomial g : A B matrix [[1]]").unwrap_err();
        assert!(matches!(e, DslError::Syntax { line: 1, col: 16, .. }));
    }

    #[test]
    fn divisors_and_polynomials() {
        let d = parse("morphism f : A -> B { K_source = -3*H + 1/6*E - F ; pullback T = S + 2 E }").unwrap();
        let Statement::Morphism { items, .. } = &d.items[0].stmt else { panic!() };
        assert_eq!(
            items[0],
            MorphItem::KSource(vec![(q(-3, 1), "H".into()), (q(1, 6), "E".into()), (q(-1, 1), "F".into())])
        );
        let c = parse("chern S dim 2 { omega = 1 + c1 + (1/2)*c1^2 }").unwrap();
        let Statement::Chern { items, .. } = &c.items[0].stmt else { panic!() };
        let ChernItem::Omega(p) = &items[0] else { panic!() };
        assert_eq!(p[2], (q(1, 2), vec![("c1".into(), 2)]));
        assert!(parse("morphism f : A -> B { K_source = H^2 }").is_err());
    }

    #[test]
    fn check_kinds_glue_hyphens() {
        let d = parse("check nc-cmorphism n=3 a=[1,1] targets=[3,inf]\ncheck adapted-sheaf g B 1 1").unwrap();
        let Statement::Check { kind, args } = &d.items[0].stmt else { panic!() };
        assert_eq!(kind, "nc-cmorphism");
        assert_eq!(args[2].value, Value::List(vec![Value::Int(3), Value::Word("inf".into())]));
        let Statement::Check { kind, args } = &d.items[1].stmt else { panic!() };
        assert_eq!((kind.as_str(), args.len()), ("adapted-sheaf", 4));
    }

    #[test]
    fn empty_document() {
        assert!(parse("").unwrap().items.is_empty());
        assert!(parse("# only a comment\n\n").unwrap().items.is_empty());
    }
}
