//! Numeric subtypes: the table of defining conditions, guard injection for
//! promoted variables and replacement of `(instance x T)` literals.

use crate::diag::Diagnostic;
use crate::formula::{Connective, Formula, Head, Quantifier};
use crate::infer::{base_numeric, SubtypeRecord};
use crate::kb::{KnowledgeBase, INTEGER, REAL};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefinitionalTable {
    pub conditions: BTreeMap<String, Formula>,
    pub bound_var: BTreeMap<String, String>,
}

impl DefinitionalTable {
    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    /// The condition for `ty` with its bound variable replaced by `term`.
    pub fn instantiate(&self, ty: &str, term: &Formula) -> Option<Formula> {
        let cond = self.conditions.get(ty)?;
        let var = self.bound_var.get(ty)?;
        Some(cond.substitute(&BTreeMap::from([(var.clone(), term.clone())])))
    }
}

/// Numeric types that get a table entry: everything strictly below
/// RealNumber except Integer itself.
pub fn is_table_type(kb: &KnowledgeBase, ty: &str) -> bool {
    kb.is_real_like(ty) && ty != REAL && ty != INTEGER
}

fn instance_of_var(f: &Formula) -> Option<(&str, &str)> {
    match f {
        Formula::Apply { head: Head::Const(h), args } if h == "instance" => match args.as_slice() {
            [Formula::Var(v), Formula::Sym(t)] => Some((v, t)),
            _ => None,
        },
        _ => None,
    }
}

/// Drop `(instance ?v Base)` conjuncts restating the variable's base type.
fn strip_base_assertions(f: &Formula, var: &str) -> Option<Formula> {
    let is_base_assertion =
        |c: &Formula| matches!(instance_of_var(c), Some((v, t)) if v == var && base_numeric(t));
    match f {
        Formula::Conn { kind: Connective::And, args } => {
            Formula::and_of(args.iter().filter(|c| !is_base_assertion(c)).cloned().collect())
        }
        c if is_base_assertion(c) => None,
        c => Some(c.clone()),
    }
}

/// `(T, ?v, consequent)` for `(=> (instance ?v T) C)` and `(<=> (instance ?v T) C)`
/// with T a numeric subtype.
pub fn definition_parts<'a>(kb: &KnowledgeBase, f: &'a Formula) -> Option<(String, String, &'a Formula)> {
    let Formula::Conn { kind: Connective::Implies | Connective::Iff, args } = f else { return None };
    let (v, t) = instance_of_var(&args[0])?;
    is_table_type(kb, t).then(|| (t.to_string(), v.to_string(), &args[1]))
}

/// Cache the consequent of every definition in axiom order. A later
/// definition of the same type replaces an earlier one.
pub fn build_definitional_table(kb: &KnowledgeBase) -> (DefinitionalTable, Vec<Diagnostic>) {
    let mut table = DefinitionalTable::default();
    let mut diags = Vec::new();
    for sf in kb.axioms() {
        let Some((ty, var, consequent)) = definition_parts(kb, &sf.formula) else { continue };
        let Some(cond) = strip_base_assertions(consequent, &var) else { continue };
        if let Some(prev) = table.conditions.get(&ty) {
            if prev != &cond {
                diags.push(Diagnostic::note(Some(&sf.source), format!("condition for {ty} replaced by a later definition")));
            }
        }
        table.conditions.insert(ty.clone(), cond);
        table.bound_var.insert(ty, var);
    }
    (table, diags)
}

/// Wrap `f` in one guard per promoted variable, first variable outermost.
pub fn inject_antecedent_constraints(
    table: &DefinitionalTable,
    f: &Formula,
    records: &[SubtypeRecord],
) -> (Formula, Vec<Diagnostic>) {
    let mut records = records.to_vec();
    records.sort();
    records.dedup();
    let mut diags = Vec::new();
    let mut out = f.clone();
    for r in records.iter().rev() {
        match table.instantiate(&r.subtype, &Formula::var(&r.var)) {
            Some(guard) => out = Formula::implies(guard, out),
            None => diags.push(Diagnostic::warning(None, format!("no defining condition for {}; ?{} left unguarded", r.subtype, r.var))),
        }
    }
    (out, diags)
}

/// Table types whose conditions characterise `ty`: itself, then its
/// ancestors below the base sorts, most specific first.
pub fn condition_types(kb: &KnowledgeBase, table: &DefinitionalTable, ty: &str) -> Vec<String> {
    let mut ancestors: Vec<String> = kb
        .ancestors_of(ty)
        .into_iter()
        .filter(|a| a != ty && is_table_type(kb, a) && !base_numeric(a) && table.conditions.contains_key(a))
        .collect();
    ancestors.sort_by(|a, b| kb.ancestors_of(b).len().cmp(&kb.ancestors_of(a).len()).then(a.cmp(b)));
    let mut out = Vec::new();
    if table.conditions.contains_key(ty) {
        out.push(ty.to_string());
    }
    out.extend(ancestors);
    out
}

/// The conjunction replacing `(instance term ty)`. With `prune`, ancestor
/// conditions already implied by the type's own condition are left out.
pub fn subtype_condition(
    kb: &KnowledgeBase,
    table: &DefinitionalTable,
    ty: &str,
    term: &Formula,
    prune: bool,
) -> Option<Formula> {
    let types = condition_types(kb, table, ty);
    let (own, rest) = types.split_first()?;
    let own_cond = table.instantiate(own, term)?;
    let mut parts = vec![own_cond];
    let samples = samples_for(&kb.promotion_target(ty));
    for t in rest {
        if prune && entails(table, own, t, &samples) {
            continue;
        }
        parts.push(table.instantiate(t, term)?);
    }
    Formula::and_of(parts)
}

/// Replace every `(instance x T)` with T a numeric subtype by its defining
/// condition.
pub fn replace_instance_literals(
    kb: &KnowledgeBase,
    table: &DefinitionalTable,
    f: &Formula,
    prune: bool,
) -> (Formula, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    fn go(kb: &KnowledgeBase, table: &DefinitionalTable, node: &Formula, prune: bool, diags: &mut Vec<Diagnostic>) -> Formula {
        if let Formula::Apply { head: Head::Const(h), args } = node {
            if h == "instance" && args.len() == 2 {
                if let Formula::Sym(t) = &args[1] {
                    if is_table_type(kb, t) && !base_numeric(t) {
                        return match subtype_condition(kb, table, t, &args[0], prune) {
                            Some(c) => c,
                            None => {
                                diags.push(Diagnostic::warning(None, format!("no defining condition for {t}")));
                                node.clone()
                            }
                        };
                    }
                }
            }
            return node.clone();
        }
        match node {
            Formula::Conn { kind, args } => {
                Formula::Conn { kind: *kind, args: args.iter().map(|a| go(kb, table, a, prune, diags)).collect() }
            }
            Formula::Quant { kind, vars, body } => {
                Formula::Quant { kind: *kind, vars: vars.clone(), body: Box::new(go(kb, table, body, prune, diags)) }
            }
            other => other.clone(),
        }
    }
    let out = go(kb, table, f, prune, &mut diags);
    (out, diags)
}

/// Replacement restricted to the consequent of a top-level implication.
pub fn replace_consequent_instance(kb: &KnowledgeBase, table: &DefinitionalTable, f: &Formula) -> (Formula, Vec<Diagnostic>) {
    match f {
        Formula::Conn { kind: Connective::Implies, args } => {
            let (c, d) = replace_instance_literals(kb, table, &args[1], false);
            (Formula::implies(args[0].clone(), c), d)
        }
        _ => (f.clone(), Vec::new()),
    }
}

fn samples_for(sort: &str) -> Vec<BigRational> {
    let ints = (-6..=12).map(|i| BigRational::from_integer(BigInt::from(i)));
    if sort == INTEGER {
        return ints.collect();
    }
    let halves = [-7, -3, -1, 1, 3, 7, 21].into_iter().map(|n| BigRational::new(BigInt::from(n), BigInt::from(2)));
    ints.chain(halves).collect()
}

/// Sampled entailment: wherever `a`'s condition holds, `b`'s does too.
fn entails(table: &DefinitionalTable, a: &str, b: &str, samples: &[BigRational]) -> bool {
    let x = Formula::var("__x");
    let (Some(ca), Some(cb)) = (table.instantiate(a, &x), table.instantiate(b, &x)) else { return false };
    samples.iter().all(|s| {
        let env = BTreeMap::from([("__x".to_string(), s.clone())]);
        match eval_formula(&ca, &env) {
            Some(false) => true,
            Some(true) => eval_formula(&cb, &env) == Some(true),
            None => false,
        }
    })
}

pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (neg, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    let scale = BigInt::from(10).pow(frac.len() as u32);
    let n: BigInt = format!("{whole}{frac}").parse().ok()?;
    let r = BigRational::new(n, scale);
    Some(if neg { -r } else { r })
}

/// Exact evaluation of arithmetic terms; `None` for anything uninterpreted.
pub fn eval_term(t: &Formula, env: &BTreeMap<String, BigRational>) -> Option<BigRational> {
    match t {
        Formula::Int(i) => Some(BigRational::from_integer(i.clone())),
        Formula::Real(s) => parse_decimal(s),
        Formula::Var(v) => env.get(v).cloned(),
        Formula::Apply { head: Head::Const(h), args } => {
            let vals: Option<Vec<BigRational>> = args.iter().map(|a| eval_term(a, env)).collect();
            let vals = vals?;
            match (h.as_str(), vals.as_slice()) {
                ("AdditionFn", [a, b]) => Some(a + b),
                ("SubtractionFn", [a, b]) => Some(a - b),
                ("MultiplicationFn", [a, b]) => Some(a * b),
                ("DivisionFn", [a, b]) if !b.is_zero() => Some(a / b),
                ("RemainderFn", [a, b]) if !b.is_zero() && a.is_integer() && b.is_integer() => {
                    Some(a - b * (a / b).floor())
                }
                ("SignumFn", [a]) => Some(a.signum()),
                ("FloorFn", [a]) => Some(a.floor()),
                ("CeilingFn", [a]) => Some(a.ceil()),
                ("AbsoluteValueFn", [a]) => Some(a.abs()),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Evaluate a closed arithmetic condition. Quantifiers range over a small
/// window of positive integers, enough for the number definitions.
pub fn eval_formula(f: &Formula, env: &BTreeMap<String, BigRational>) -> Option<bool> {
    match f {
        Formula::Conn { kind, args } => {
            let vals: Option<Vec<bool>> = args.iter().map(|a| eval_formula(a, env)).collect();
            let vals = vals?;
            Some(match kind {
                Connective::And => vals.iter().all(|b| *b),
                Connective::Or => vals.iter().any(|b| *b),
                Connective::Not => !vals[0],
                Connective::Implies => !vals[0] || vals[1],
                Connective::Iff => vals[0] == vals[1],
            })
        }
        Formula::Quant { kind, vars, body } => {
            let window: Vec<BigRational> = (1..=24).map(|i| BigRational::from_integer(BigInt::from(i))).collect();
            let mut results = Vec::new();
            let mut assignments = vec![env.clone()];
            for v in vars {
                assignments = assignments
                    .into_iter()
                    .flat_map(|e| {
                        window.iter().map(move |x| {
                            let mut e = e.clone();
                            e.insert(v.clone(), x.clone());
                            e
                        })
                    })
                    .collect();
            }
            for e in &assignments {
                results.push(eval_formula(body, e)?);
            }
            Some(match kind {
                Quantifier::Forall => results.iter().all(|b| *b),
                Quantifier::Exists => results.iter().any(|b| *b),
            })
        }
        Formula::Apply { head: Head::Const(h), args } if args.len() == 2 => {
            if h == "instance" {
                let x = eval_term(&args[0], env)?;
                return match &args[1] {
                    Formula::Sym(t) if t == INTEGER => Some(x.is_integer()),
                    Formula::Sym(t) if t == REAL || t == "RationalNumber" => Some(true),
                    _ => None,
                };
            }
            let a = eval_term(&args[0], env)?;
            let b = eval_term(&args[1], env)?;
            match h.as_str() {
                "equal" => Some(a == b),
                "greaterThan" => Some(a > b),
                "lessThan" => Some(a < b),
                "greaterThanOrEqualTo" => Some(a >= b),
                "lessThanOrEqualTo" => Some(a <= b),
                _ => None,
            }
        }
        _ => None,
    }
}

/// True when `x` satisfies the condition for `ty`.
pub fn satisfies(table: &DefinitionalTable, ty: &str, x: &BigRational) -> Option<bool> {
    let cond = table.instantiate(ty, &Formula::var("__x"))?;
    eval_formula(&cond, &BTreeMap::from([("__x".to_string(), x.clone())]))
}
