//! Syntax tree of a document. Coefficients are validated and normalized at
//! parse time, so two documents that differ only in spelling compare equal.

use cpair_core::{Multiplicity, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeRef {
    /// `coord i`, 1-based.
    Coord(usize),
    Name(String),
}

/// `c * name`; a sum of these is a divisor.
pub type DivisorExpr = Vec<(Q, String)>;

/// A polynomial: coefficient times a product of powers.
pub type PolyExpr = Vec<(Q, Vec<(String, u32)>)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphItem {
    Pullback { target: String, divisor: DivisorExpr },
    Exceptional(String),
    KSource(DivisorExpr),
    KTarget(DivisorExpr),
    ImageIn(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChernItem {
    Symbol { name: String, degree: usize },
    Omega(PolyExpr),
    Component { name: String, m: Multiplicity },
    /// Overrides `c(O_D)` for one component.
    Structure { name: String, class: PolyExpr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(u64),
    Word(String),
    List(Vec<Value>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub key: Option<String>,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Chart {
        name: String,
        dim: usize,
        axes: Option<Vec<String>>,
    },
    Pair {
        name: String,
        chart: Option<String>,
        items: Vec<(Multiplicity, PrimeRef)>,
    },
    Monomial {
        name: String,
        source: String,
        target: String,
        matrix: Vec<Vec<u64>>,
    },
    Morphism {
        name: String,
        source: String,
        target: String,
        items: Vec<MorphItem>,
    },
    Curve {
        name: String,
        genus: u64,
        points: Vec<Multiplicity>,
    },
    CurveCover {
        name: String,
        curve: String,
        degree: u64,
        /// `None` for an etale cover.
        profiles: Option<Vec<Vec<u64>>>,
        extra: Vec<Vec<u64>>,
    },
    Chern {
        name: String,
        dim: usize,
        items: Vec<ChernItem>,
    },
    Check {
        kind: String,
        args: Vec<Arg>,
    },
}

impl Statement {
    pub fn declared_name(&self) -> Option<&str> {
        match self {
            Statement::Chart { name, .. }
            | Statement::Pair { name, .. }
            | Statement::Monomial { name, .. }
            | Statement::Morphism { name, .. }
            | Statement::Curve { name, .. }
            | Statement::CurveCover { name, .. }
            | Statement::Chern { name, .. } => Some(name),
            Statement::Check { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub line: usize,
    pub stmt: Statement,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub items: Vec<Located>,
}

impl Document {
    /// Statements without positions, for comparisons across reformatting.
    pub fn statements(&self) -> Vec<&Statement> {
        self.items.iter().map(|l| &l.stmt).collect()
    }

    pub fn checks(&self) -> impl Iterator<Item = &Located> {
        self.items.iter().filter(|l| matches!(l.stmt, Statement::Check { .. }))
    }
}
