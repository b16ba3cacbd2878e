//! Rendering of annotated formulas as TFF0: builtin mapping, sort
//! coercions, universal closure and symbol declarations.

use crate::formula::{Connective, Formula, Head, Quantifier};
use crate::infer::SortEnv;
use crate::kb::{ArgType, KnowledgeBase, Signature, INTEGER, RATIONAL, REAL};
use crate::rename::RenameTable;
use crate::tff::{Role, TffFormula, TffQuant, TffSort, TffTerm, TffType, TffUnit};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const COMPARISONS: &[(&str, &str)] = &[
    ("greaterThan", "$greater"),
    ("lessThan", "$less"),
    ("greaterThanOrEqualTo", "$greatereq"),
    ("lessThanOrEqualTo", "$lesseq"),
];

pub const ARITHMETIC: &[(&str, &str)] = &[
    ("AdditionFn", "$sum"),
    ("SubtractionFn", "$difference"),
    ("MultiplicationFn", "$product"),
    ("DivisionFn", "$quotient"),
];

/// SUMO names that never survive into output when applied to numbers.
pub fn builtin_bases() -> BTreeSet<String> {
    COMPARISONS.iter().chain(ARITHMETIC).map(|(s, _)| s.to_string()).chain(["equal".to_string()]).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmitOptions {
    /// Map FloorFn/CeilingFn on numbers to `$to_int($floor(..))`/`$to_int($ceiling(..))`.
    pub builtin_floor_ceiling: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("{message}")]
    SortMismatch {
        message: String,
        /// A numeric literal landed in an individual-sorted slot.
        literal: bool,
    },
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("{symbol} declared as {first} and as {second}")]
    ConflictingDeclaration { symbol: String, first: String, second: String },
    #[error("duplicate unit name {0}")]
    DuplicateUnit(String),
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect()
}

pub fn tff_symbol(name: &str) -> String {
    format!("s__{}", sanitize(name))
}

pub fn tff_var(name: &str) -> String {
    format!("V__{}", sanitize(name))
}

/// KIF decimal text in TPTP real syntax.
pub fn tptp_real(text: &str) -> String {
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", text.strip_prefix('+').unwrap_or(text)),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => body.split_at(i),
        None => (body, ""),
    };
    let mut m = mantissa.to_string();
    if m.starts_with('.') {
        m.insert(0, '0');
    }
    if m.ends_with('.') {
        m.push('0');
    }
    if !m.contains('.') && exp.is_empty() {
        m.push_str(".0");
    }
    format!("{sign}{m}{exp}")
}

fn is_literal(t: &TffTerm) -> bool {
    matches!(t, TffTerm::Int(_) | TffTerm::Rat(_) | TffTerm::Real(_))
}

/// Wrap `t` so a `from`-sorted term fits a `to`-sorted slot.
pub fn coerce(t: TffTerm, from: TffSort, to: TffSort) -> Result<TffTerm, EmitError> {
    if from == to {
        return Ok(t);
    }
    match from.widening_to(to) {
        Some(c) => Ok(TffTerm::App(c.to_string(), vec![t])),
        None => Err(EmitError::SortMismatch { message: format!("{t} has sort {from}, expected {to}"), literal: is_literal(&t) }),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Declarations {
    entries: BTreeMap<String, (TffType, String)>,
}

impl Declarations {
    /// Record `symbol : ty`; `origin` names where it was first needed.
    pub fn insert(&mut self, symbol: &str, ty: TffType, origin: &str) -> Result<(), EmitError> {
        match self.entries.get(symbol) {
            Some((prev, first)) if *prev != ty => Err(EmitError::ConflictingDeclaration {
                symbol: symbol.to_string(),
                first: format!("{prev} ({first})"),
                second: format!("{ty} ({origin})"),
            }),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(symbol.to_string(), (ty, origin.to_string()));
                Ok(())
            }
        }
    }

    pub fn merge(&mut self, other: &Declarations) -> Result<(), EmitError> {
        for (s, (ty, origin)) in &other.entries {
            self.insert(s, ty.clone(), origin)?;
        }
        Ok(())
    }

    pub fn get(&self, symbol: &str) -> Option<&TffType> {
        self.entries.get(symbol).map(|(t, _)| t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `func_def_N`, then `pred_def_N`, then `const_def_N`, symbols sorted within each.
    pub fn units(&self) -> Vec<TffUnit> {
        let mut groups: [Vec<TffUnit>; 3] = Default::default();
        for (sym, (ty, _)) in &self.entries {
            let g = match ty {
                TffType::Map(_, TffSort::Bool) | TffType::Sort(TffSort::Bool) => 1,
                TffType::Map(..) => 0,
                TffType::Sort(_) => 2,
            };
            let prefix = ["func_def", "pred_def", "const_def"][g];
            let name = format!("{prefix}_{}", groups[g].len());
            groups[g].push(TffUnit::decl(&name, sym, ty.clone()));
        }
        groups.into_iter().flatten().collect()
    }
}

pub struct Emitter<'a> {
    kb: &'a KnowledgeBase,
    table: &'a RenameTable,
    opts: EmitOptions,
}

struct Ctx<'a> {
    env: &'a SortEnv,
    decls: Declarations,
    origin: String,
    bound: Vec<(String, TffSort)>,
}

impl Ctx<'_> {
    fn declare(&mut self, symbol: &str, ty: TffType) -> Result<(), EmitError> {
        let origin = self.origin.clone();
        self.decls.insert(symbol, ty, &origin)
    }

    fn var_sort(&self, v: &str) -> TffSort {
        let name = tff_var(v);
        if let Some((_, s)) = self.bound.iter().rev().find(|(n, _)| *n == name) {
            return *s;
        }
        env_sort(self.env, v)
    }
}

fn env_sort(env: &SortEnv, v: &str) -> TffSort {
    match env.var_types.get(v) {
        Some(t) if !t.class_marker => TffSort::from_sumo(&t.ty),
        _ => TffSort::Individual,
    }
}

fn child(path: &[usize], i: usize) -> Vec<usize> {
    let mut p = path.to_vec();
    p.push(i);
    p
}

fn has_quantifier(f: &Formula) -> bool {
    let mut found = false;
    f.walk(&mut |_, n| found |= matches!(n, Formula::Quant { .. }));
    found
}

fn simplify(f: TffFormula) -> TffFormula {
    use TffFormula as F;
    match f {
        F::Not(a) => match simplify(*a) {
            F::True => F::False,
            F::False => F::True,
            a => F::not(a),
        },
        F::And(ps) => {
            let mut out = Vec::new();
            for p in ps.into_iter().map(simplify) {
                match p {
                    F::True => {}
                    F::False => return F::False,
                    F::And(inner) => out.extend(inner),
                    p => out.push(p),
                }
            }
            match out.len() {
                0 => F::True,
                1 => out.pop().unwrap(),
                _ => F::And(out),
            }
        }
        F::Or(ps) => {
            let mut out = Vec::new();
            for p in ps.into_iter().map(simplify) {
                match p {
                    F::False => {}
                    F::True => return F::True,
                    F::Or(inner) => out.extend(inner),
                    p => out.push(p),
                }
            }
            match out.len() {
                0 => F::False,
                1 => out.pop().unwrap(),
                _ => F::Or(out),
            }
        }
        F::Implies(a, b) => match (simplify(*a), simplify(*b)) {
            (F::True, b) => b,
            (F::False, _) | (_, F::True) => F::True,
            (a, F::False) => F::not(a),
            (a, b) => F::implies(a, b),
        },
        F::Iff(a, b) => match (simplify(*a), simplify(*b)) {
            (F::True, x) | (x, F::True) => x,
            (F::False, x) | (x, F::False) => simplify(F::not(x)),
            (a, b) => F::Iff(Box::new(a), Box::new(b)),
        },
        F::Quant(q, vars, body) => match simplify(*body) {
            b @ (F::True | F::False) => b,
            b => F::Quant(q, vars, Box::new(b)),
        },
        other => other,
    }
}

fn lookup<'t>(table: &'t [(&str, &'static str)], name: &str) -> Option<&'static str> {
    table.iter().find(|(s, _)| *s == name).map(|(_, b)| *b)
}

impl<'a> Emitter<'a> {
    pub fn new(kb: &'a KnowledgeBase, table: &'a RenameTable, opts: EmitOptions) -> Self {
        Emitter { kb, table, opts }
    }

    fn base<'n>(&'n self, name: &'n str) -> &'n str {
        self.table.get(name).map_or(name, |v| v.base_name.as_str())
    }

    fn signature(&self, name: &str, arity: usize) -> Option<Signature> {
        match self.table.get(name) {
            Some(v) => Some(v.signature(self.kb.signature(&v.base_name), arity)),
            None => self.kb.signature(name).cloned(),
        }
    }

    fn slot_sort(&self, t: Option<&ArgType>) -> TffSort {
        match t {
            Some(a) if !a.class_marker => TffSort::from_sumo(&self.kb.promotion_target(&a.ty)),
            _ => TffSort::Individual,
        }
    }

    fn term(&self, ctx: &mut Ctx, path: &[usize], node: &Formula) -> Result<(TffTerm, TffSort), EmitError> {
        match node {
            Formula::Var(v) => Ok((TffTerm::Var(tff_var(v)), ctx.var_sort(v))),
            Formula::Int(i) => Ok((TffTerm::Int(i.to_string()), TffSort::Int)),
            Formula::Real(s) => Ok((TffTerm::Real(tptp_real(s)), TffSort::Real)),
            Formula::Str(s) => Ok((TffTerm::Distinct(s.clone()), TffSort::Individual)),
            Formula::Sym(s) if ctx.env.constants.contains_key(s) => {
                let sort = TffSort::from_sumo(&ctx.env.constants[s]);
                let name = tff_symbol(s);
                ctx.declare(&name, TffType::Sort(sort))?;
                Ok((TffTerm::App(name, vec![]), sort))
            }
            Formula::Sym(s) => {
                let name = if self.kb.signature(s).is_some() || self.table.is_variant(s) {
                    format!("{}__m", tff_symbol(s))
                } else {
                    tff_symbol(s)
                };
                ctx.declare(&name, TffType::Sort(TffSort::Individual))?;
                Ok((TffTerm::App(name, vec![]), TffSort::Individual))
            }
            Formula::Apply { head: Head::Const(h), args } => self.application(ctx, path, h, args),
            Formula::Apply { head: Head::Var(v), .. } => Err(EmitError::Unsupported(format!("function variable ?{v}"))),
            Formula::RowVar(v) => Err(EmitError::Unsupported(format!("row variable @{v}"))),
            Formula::Conn { .. } | Formula::Quant { .. } => Err(EmitError::Unsupported("formula in term position".into())),
        }
    }

    fn args(&self, ctx: &mut Ctx, path: &[usize], args: &[Formula]) -> Result<Vec<(TffTerm, TffSort)>, EmitError> {
        args.iter().enumerate().map(|(i, a)| self.term(ctx, &child(path, i), a)).collect()
    }

    fn check_renamed(&self, h: &str) -> Result<(), EmitError> {
        if self.table.is_variant(h) {
            Ok(())
        } else {
            Err(EmitError::Internal(format!("{h} applied to numbers was not renamed")))
        }
    }

    fn joined(terms: Vec<(TffTerm, TffSort)>) -> Result<(Vec<TffTerm>, TffSort), EmitError> {
        let join = terms
            .iter()
            .map(|(_, s)| *s)
            .try_fold(None, |acc: Option<TffSort>, s| match acc {
                None => Some(Some(s)),
                Some(a) => TffSort::numeric_join(a, s).map(Some),
            })
            .flatten()
            .ok_or_else(|| EmitError::Internal("no common numeric sort".into()))?;
        let out = terms.into_iter().map(|(t, s)| coerce(t, s, join)).collect::<Result<_, _>>()?;
        Ok((out, join))
    }

    fn application(&self, ctx: &mut Ctx, path: &[usize], h: &str, args: &[Formula]) -> Result<(TffTerm, TffSort), EmitError> {
        let terms = self.args(ctx, path, args)?;
        let base = self.base(h);
        let all_numeric = !terms.is_empty() && terms.iter().all(|(_, s)| s.is_numeric());
        if let (Some(op), true) = (lookup(ARITHMETIC, base), all_numeric) {
            self.check_renamed(h)?;
            let (ts, join) = Self::joined(terms)?;
            let op = if op == "$quotient" && join == TffSort::Int { "$quotient_e" } else { op };
            return Ok((TffTerm::App(op.into(), ts), join));
        }
        if self.opts.builtin_floor_ceiling && (base == "FloorFn" || base == "CeilingFn") && all_numeric && terms.len() == 1 {
            let op = if base == "FloorFn" { "$floor" } else { "$ceiling" };
            let inner = TffTerm::App(op.into(), vec![terms[0].0.clone()]);
            return Ok((TffTerm::App("$to_int".into(), vec![inner]), TffSort::Int));
        }
        let sig = self.signature(h, args.len());
        let mut out = Vec::new();
        let mut sorts = Vec::new();
        for (i, (t, s)) in terms.into_iter().enumerate() {
            let want = self.slot_sort(sig.as_ref().and_then(|g| g.arg(i + 1)));
            out.push(coerce(t, s, want).map_err(|e| self.slot_error(e, h, i + 1))?);
            sorts.push(want);
        }
        let result = self.slot_sort(sig.as_ref().and_then(|g| g.range_type.as_ref()));
        let name = tff_symbol(h);
        ctx.declare(&name, TffType::Map(sorts, result))?;
        Ok((TffTerm::App(name, out), result))
    }

    fn slot_error(&self, e: EmitError, h: &str, pos: usize) -> EmitError {
        match e {
            EmitError::SortMismatch { message, literal } => {
                EmitError::SortMismatch { message: format!("argument {pos} of {}: {message}", tff_symbol(h)), literal }
            }
            e => e,
        }
    }

    fn atom(&self, ctx: &mut Ctx, path: &[usize], h: &str, args: &[Formula]) -> Result<TffFormula, EmitError> {
        let base = self.base(h);
        if base == "equal" && args.len() == 2 {
            let mut terms = self.args(ctx, path, args)?;
            let (b, sb) = terms.pop().unwrap();
            let (a, sa) = terms.pop().unwrap();
            if sa == sb {
                return Ok(TffFormula::Eq(a, b));
            }
            let (ts, _) = Self::joined(vec![(a, sa), (b, sb)]).map_err(|_| EmitError::SortMismatch {
                message: format!("equality between {sa} and {sb}"),
                literal: false,
            })?;
            let mut it = ts.into_iter();
            return Ok(TffFormula::Eq(it.next().unwrap(), it.next().unwrap()));
        }
        if let Some(op) = lookup(COMPARISONS, base).filter(|_| args.len() == 2) {
            let terms = self.args(ctx, path, args)?;
            if terms.iter().all(|(_, s)| s.is_numeric()) {
                self.check_renamed(h)?;
                let (ts, _) = Self::joined(terms)?;
                return Ok(TffFormula::Pred(op.into(), ts));
            }
        }
        if h == "instance" && args.len() == 2 {
            let (t, s) = self.term(ctx, &child(path, 0), &args[0])?;
            if s.is_numeric() {
                return match (&args[1], s) {
                    (Formula::Sym(c), _) if c == REAL => Ok(TffFormula::True),
                    (Formula::Sym(c), TffSort::Int) if c == INTEGER || c == RATIONAL => Ok(TffFormula::True),
                    (Formula::Sym(c), TffSort::Rat) if c == RATIONAL => Ok(TffFormula::True),
                    (Formula::Sym(c), _) if c == INTEGER => Ok(TffFormula::Pred("$is_int".into(), vec![t])),
                    (Formula::Sym(c), _) if c == RATIONAL => Ok(TffFormula::Pred("$is_rat".into(), vec![t])),
                    _ => Err(EmitError::SortMismatch {
                        message: format!("s__instance applied to {s} at position 1"),
                        literal: is_literal(&t),
                    }),
                };
            }
        }
        let terms = self.args(ctx, path, args)?;
        let sig = self.signature(h, args.len());
        let mut out = Vec::new();
        let mut sorts = Vec::new();
        for (i, (t, s)) in terms.into_iter().enumerate() {
            let want = self.slot_sort(sig.as_ref().and_then(|g| g.arg(i + 1)));
            out.push(coerce(t, s, want).map_err(|e| self.slot_error(e, h, i + 1))?);
            sorts.push(want);
        }
        let name = tff_symbol(h);
        ctx.declare(&name, TffType::Map(sorts, TffSort::Bool))?;
        Ok(TffFormula::Pred(name, out))
    }

    fn formula(&self, ctx: &mut Ctx, path: &[usize], node: &Formula) -> Result<TffFormula, EmitError> {
        match node {
            Formula::Conn { kind, args } => {
                let parts: Vec<TffFormula> =
                    args.iter().enumerate().map(|(i, a)| self.formula(ctx, &child(path, i), a)).collect::<Result<_, _>>()?;
                let mut it = parts.into_iter();
                Ok(match kind {
                    Connective::And => TffFormula::And(it.collect()),
                    Connective::Or => TffFormula::Or(it.collect()),
                    Connective::Not => TffFormula::not(it.next().unwrap()),
                    Connective::Implies => TffFormula::implies(it.next().unwrap(), it.next().unwrap()),
                    Connective::Iff => TffFormula::Iff(Box::new(it.next().unwrap()), Box::new(it.next().unwrap())),
                })
            }
            Formula::Quant { kind, vars, body } => {
                let depth = ctx.bound.len();
                let mut tv = Vec::new();
                for v in vars {
                    let s = env_sort(ctx.env, v);
                    tv.push((tff_var(v), Some(s)));
                    ctx.bound.push((tff_var(v), s));
                }
                let b = self.formula(ctx, &child(path, 0), body);
                ctx.bound.truncate(depth);
                let q = if *kind == Quantifier::Forall { TffQuant::Forall } else { TffQuant::Exists };
                Ok(TffFormula::Quant(q, tv, Box::new(b?)))
            }
            Formula::Apply { head: Head::Const(h), args } => self.atom(ctx, path, h, args),
            Formula::Sym(s) => {
                let name = tff_symbol(s);
                ctx.declare(&name, TffType::Sort(TffSort::Bool))?;
                Ok(TffFormula::Pred(name, vec![]))
            }
            Formula::Apply { head: Head::Var(v), .. } => Err(EmitError::Unsupported(format!("predicate variable ?{v}"))),
            Formula::Var(v) => Err(EmitError::Unsupported(format!("variable ?{v} in formula position"))),
            other => Err(EmitError::Unsupported(format!("{other} in formula position"))),
        }
    }

    fn closure(&self, env: &SortEnv, vars: &[String], body: TffFormula, q: TffQuant) -> TffFormula {
        if vars.is_empty() {
            return body;
        }
        let tv = vars.iter().map(|v| (tff_var(v), Some(env_sort(env, v)))).collect();
        TffFormula::Quant(q, tv, Box::new(body))
    }

    /// One formula, or two for a top-level `<=>` that must be split. Free
    /// variables are closed universally in first-appearance order.
    pub fn emit_axiom(&self, f: &Formula, env: &SortEnv, origin: &str) -> Result<(Vec<TffFormula>, Declarations), EmitError> {
        let mut ctx = Ctx { env, decls: Declarations::default(), origin: origin.to_string(), bound: Vec::new() };
        let out = match f {
            Formula::Conn { kind: Connective::Iff, args } if args.len() == 2 => {
                let (a, b) = (&args[0], &args[1]);
                let (fa, fb) = (a.free_vars(), b.free_vars());
                let ea = self.formula(&mut ctx, &[0], a)?;
                let eb = self.formula(&mut ctx, &[1], b)?;
                let same: bool = fa.iter().collect::<BTreeSet<_>>() == fb.iter().collect::<BTreeSet<_>>();
                let all = f.free_vars();
                if same && !has_quantifier(a) && !has_quantifier(b) {
                    vec![self.closure(env, &all, TffFormula::Iff(Box::new(ea), Box::new(eb)), TffQuant::Forall)]
                } else if same {
                    vec![
                        self.closure(env, &all, TffFormula::implies(ea.clone(), eb.clone()), TffQuant::Forall),
                        self.closure(env, &all, TffFormula::implies(eb, ea), TffQuant::Forall),
                    ]
                } else {
                    let only_a: Vec<String> = fa.iter().filter(|v| !fb.contains(v)).cloned().collect();
                    let back = TffFormula::implies(eb.clone(), self.closure(env, &only_a, ea.clone(), TffQuant::Exists));
                    vec![
                        self.closure(env, &all, TffFormula::implies(ea, eb), TffQuant::Forall),
                        self.closure(env, &fb, back, TffQuant::Forall),
                    ]
                }
            }
            _ => {
                let body = self.formula(&mut ctx, &[], f)?;
                vec![self.closure(env, &f.free_vars(), body, TffQuant::Forall)]
            }
        };
        let out = out.into_iter().map(simplify).filter(|g| *g != TffFormula::True).collect();
        Ok((out, ctx.decls))
    }
}

/// Render `f` under `env` as TFF formula text, one line per emitted unit body.
pub fn emit_formula(
    kb: &KnowledgeBase,
    table: &RenameTable,
    f: &Formula,
    env: &SortEnv,
    opts: EmitOptions,
) -> Result<Vec<String>, EmitError> {
    let (fs, _) = Emitter::new(kb, table, opts).emit_axiom(f, env, "<formula>")?;
    Ok(fs.iter().map(ToString::to_string).collect())
}

/// Declarations first, then the axioms in the order given.
pub fn emit_file(decls: &Declarations, axioms: &[TffUnit]) -> Result<String, EmitError> {
    let mut units = decls.units();
    units.extend(axioms.iter().cloned());
    let mut seen = BTreeSet::new();
    for u in &units {
        if !seen.insert(u.name.as_str()) {
            return Err(EmitError::DuplicateUnit(u.name.clone()));
        }
    }
    Ok(crate::tff::print_units(&units))
}

pub fn axiom_unit(name: &str, role: Role, f: TffFormula, comment: Option<String>) -> TffUnit {
    let mut u = TffUnit::formula(name, role, f);
    u.comment = comment;
    u
}
