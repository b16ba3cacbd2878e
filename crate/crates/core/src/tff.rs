//! TFF0 syntax tree and printer, shared by the emitter and the checker.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TffSort {
    Int,
    Rat,
    Real,
    Bool,
    Individual,
}

impl TffSort {
    pub fn from_sumo(ty: &str) -> TffSort {
        match ty {
            crate::kb::INTEGER => TffSort::Int,
            crate::kb::REAL => TffSort::Real,
            crate::kb::RATIONAL => TffSort::Rat,
            _ => TffSort::Individual,
        }
    }

    pub fn parse(s: &str) -> Option<TffSort> {
        Some(match s {
            "$int" => TffSort::Int,
            "$rat" => TffSort::Rat,
            "$real" => TffSort::Real,
            "$o" => TffSort::Bool,
            "$i" => TffSort::Individual,
            _ => return None,
        })
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, TffSort::Int | TffSort::Rat | TffSort::Real)
    }

    /// Coercion from `self` into `target`, if the conversion is a widening.
    pub fn widening_to(self, target: TffSort) -> Option<&'static str> {
        match (self, target) {
            (TffSort::Int, TffSort::Real) | (TffSort::Rat, TffSort::Real) => Some("$to_real"),
            (TffSort::Int, TffSort::Rat) => Some("$to_rat"),
            _ => None,
        }
    }

    /// Common numeric sort two operands can be widened to.
    pub fn numeric_join(a: TffSort, b: TffSort) -> Option<TffSort> {
        if !a.is_numeric() || !b.is_numeric() {
            return None;
        }
        let rank = |s: TffSort| match s {
            TffSort::Int => 0,
            TffSort::Rat => 1,
            _ => 2,
        };
        Some(if rank(a) >= rank(b) { a } else { b })
    }
}

impl fmt::Display for TffSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TffSort::Int => "$int",
            TffSort::Rat => "$rat",
            TffSort::Real => "$real",
            TffSort::Bool => "$o",
            TffSort::Individual => "$i",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TffType {
    Sort(TffSort),
    /// Argument sorts and result sort; predicates return `$o`.
    Map(Vec<TffSort>, TffSort),
}

impl TffType {
    pub fn args(&self) -> &[TffSort] {
        match self {
            TffType::Sort(_) => &[],
            TffType::Map(a, _) => a,
        }
    }

    pub fn result(&self) -> TffSort {
        match self {
            TffType::Sort(s) | TffType::Map(_, s) => *s,
        }
    }
}

impl fmt::Display for TffType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TffType::Sort(s) => write!(f, "{s}"),
            TffType::Map(args, r) if args.len() == 1 => write!(f, "{} > {r}", args[0]),
            TffType::Map(args, r) => {
                let a: Vec<String> = args.iter().map(ToString::to_string).collect();
                write!(f, "({}) > {r}", a.join(" * "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TffTerm {
    Var(String),
    /// Function application or constant (empty argument list).
    App(String, Vec<TffTerm>),
    Int(String),
    Rat(String),
    Real(String),
    Distinct(String),
}

impl TffTerm {
    pub fn app(name: &str, args: Vec<TffTerm>) -> TffTerm {
        TffTerm::App(name.to_string(), args)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TffQuant {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TffFormula {
    True,
    False,
    Pred(String, Vec<TffTerm>),
    Eq(TffTerm, TffTerm),
    Neq(TffTerm, TffTerm),
    Not(Box<TffFormula>),
    And(Vec<TffFormula>),
    Or(Vec<TffFormula>),
    Implies(Box<TffFormula>, Box<TffFormula>),
    Iff(Box<TffFormula>, Box<TffFormula>),
    Quant(TffQuant, Vec<(String, Option<TffSort>)>, Box<TffFormula>),
}

impl TffFormula {
    pub fn implies(a: TffFormula, b: TffFormula) -> TffFormula {
        TffFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn not(a: TffFormula) -> TffFormula {
        TffFormula::Not(Box::new(a))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    Axiom,
    Conjecture,
    Type,
    Other(String),
}

impl Role {
    pub fn parse(s: &str) -> Role {
        match s {
            "axiom" => Role::Axiom,
            "conjecture" => Role::Conjecture,
            "type" => Role::Type,
            other => Role::Other(other.to_string()),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Axiom => f.write_str("axiom"),
            Role::Conjecture => f.write_str("conjecture"),
            Role::Type => f.write_str("type"),
            Role::Other(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitBody {
    Formula(TffFormula),
    Decl(String, TffType),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TffUnit {
    pub name: String,
    pub role: Role,
    pub body: UnitBody,
    /// Printed as a `%` line above the unit.
    pub comment: Option<String>,
    /// Line of the unit in the text it was parsed from.
    pub line: usize,
}

impl TffUnit {
    pub fn formula(name: &str, role: Role, f: TffFormula) -> TffUnit {
        TffUnit { name: name.to_string(), role, body: UnitBody::Formula(f), comment: None, line: 0 }
    }

    pub fn decl(name: &str, symbol: &str, ty: TffType) -> TffUnit {
        TffUnit { name: name.to_string(), role: Role::Type, body: UnitBody::Decl(symbol.to_string(), ty), comment: None, line: 0 }
    }
}

fn write_args(out: &mut String, args: &[TffTerm]) {
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_term(out, a);
    }
    out.push(')');
}

pub fn write_term(out: &mut String, t: &TffTerm) {
    match t {
        TffTerm::Var(v) => out.push_str(v),
        TffTerm::App(f, args) => {
            out.push_str(f);
            write_args(out, args);
        }
        TffTerm::Int(s) | TffTerm::Rat(s) | TffTerm::Real(s) => out.push_str(s),
        TffTerm::Distinct(s) => {
            out.push('"');
            for c in s.chars() {
                if c == '"' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('"');
        }
    }
}

fn write_operand(out: &mut String, f: &TffFormula) {
    if matches!(f, TffFormula::Quant(..) | TffFormula::Not(_)) {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    } else {
        write_formula(out, f);
    }
}

fn write_nary(out: &mut String, op: &str, parts: &[TffFormula]) {
    out.push('(');
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.push_str(op);
        }
        write_operand(out, p);
    }
    out.push(')');
}

/// Single-line rendering; every binary connective is parenthesised.
pub fn write_formula(out: &mut String, f: &TffFormula) {
    match f {
        TffFormula::True => out.push_str("$true"),
        TffFormula::False => out.push_str("$false"),
        TffFormula::Pred(p, args) => {
            out.push_str(p);
            write_args(out, args);
        }
        TffFormula::Eq(a, b) | TffFormula::Neq(a, b) => {
            out.push('(');
            write_term(out, a);
            out.push_str(if matches!(f, TffFormula::Eq(..)) { " = " } else { " != " });
            write_term(out, b);
            out.push(')');
        }
        TffFormula::Not(a) => {
            out.push_str("~ ");
            write_operand(out, a);
        }
        TffFormula::And(ps) => write_nary(out, " & ", ps),
        TffFormula::Or(ps) => write_nary(out, " | ", ps),
        TffFormula::Implies(a, b) => write_nary(out, " => ", &[(**a).clone(), (**b).clone()]),
        TffFormula::Iff(a, b) => write_nary(out, " <=> ", &[(**a).clone(), (**b).clone()]),
        TffFormula::Quant(q, vars, body) => {
            out.push_str(match q {
                TffQuant::Forall => "! [",
                TffQuant::Exists => "? [",
            });
            for (i, (v, s)) in vars.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(v);
                if let Some(s) = s {
                    out.push_str(&format!(" : {s}"));
                }
            }
            out.push_str("] : ");
            write_operand(out, body);
        }
    }
}

impl fmt::Display for TffTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for TffFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for TffUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = &self.comment {
            writeln!(f, "% {c}")?;
        }
        match &self.body {
            UnitBody::Formula(body) => write!(f, "tff({}, {}, {}).", self.name, self.role, body),
            UnitBody::Decl(sym, ty) => write!(f, "tff({}, {}, {}: {}).", self.name, self.role, sym, ty),
        }
    }
}

/// Units one per line (plus comment lines), in the given order.
pub fn print_units(units: &[TffUnit]) -> String {
    let mut out = String::new();
    for u in units {
        out.push_str(&u.to_string());
        out.push('\n');
    }
    out
}
