//! Sort checking of TFF0 problems.

use crate::diag::Diagnostic;
use crate::formula::Source;
use crate::tff::{TffFormula, TffSort, TffTerm, TffType, TffUnit, UnitBody};
use crate::tff_parse::{parse_tff, TffParseError};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    /// Undeclared symbols are errors instead of warnings.
    pub strict: bool,
    /// Used in diagnostic locations.
    pub file: String,
}

fn same_numeric(name: &str, args: &[TffSort], n: usize) -> Result<TffSort, String> {
    if args.len() != n {
        return Err(format!("{name} expects {n} argument(s), got {}", args.len()));
    }
    let s = args[0];
    if !s.is_numeric() {
        return Err(format!("{name} expects numeric arguments, got {s}"));
    }
    if args.iter().any(|a| *a != s) {
        let shown: Vec<String> = args.iter().map(ToString::to_string).collect();
        return Err(format!("{name} arguments must share one numeric sort, got ({})", shown.join(", ")));
    }
    Ok(s)
}

fn builtin_fn(name: &str, args: &[TffSort]) -> Option<Result<TffSort, String>> {
    Some(match name {
        "$uminus" | "$floor" | "$ceiling" | "$truncate" | "$round" => same_numeric(name, args, 1),
        "$sum" | "$difference" | "$product" | "$quotient_e" | "$quotient_t" | "$quotient_f" | "$remainder_e"
        | "$remainder_t" | "$remainder_f" => same_numeric(name, args, 2),
        "$quotient" => same_numeric(name, args, 2).and_then(|s| {
            if s == TffSort::Int {
                Err("$quotient is not defined on $int".to_string())
            } else {
                Ok(s)
            }
        }),
        "$to_int" => same_numeric(name, args, 1).map(|_| TffSort::Int),
        "$to_rat" => same_numeric(name, args, 1).map(|_| TffSort::Rat),
        "$to_real" => same_numeric(name, args, 1).map(|_| TffSort::Real),
        _ => return None,
    })
}

fn builtin_pred(name: &str, args: &[TffSort]) -> Option<Result<(), String>> {
    let n = match name {
        "$less" | "$lesseq" | "$greater" | "$greatereq" => 2,
        "$is_int" | "$is_rat" => 1,
        _ => return None,
    };
    Some(same_numeric(name, args, n).map(|_| ()))
}

pub fn is_builtin(name: &str) -> bool {
    builtin_fn(name, &[]).is_some() || builtin_pred(name, &[]).is_some() || name == "$true" || name == "$false"
}

struct Checker<'a> {
    opts: &'a CheckOptions,
    decls: BTreeMap<String, TffType>,
    inferred: BTreeMap<String, TffType>,
    diags: Vec<Diagnostic>,
    src: Option<Source>,
}

impl Checker<'_> {
    fn error(&mut self, msg: String) {
        self.diags.push(Diagnostic::error(self.src.as_ref(), msg));
    }

    fn undeclared(&mut self, name: &str, args: &[Option<TffSort>], result: TffSort) -> Option<TffSort> {
        if let Some(prev) = self.inferred.get(name).cloned() {
            let arity_ok = prev.args().len() == args.len() && prev.result() == result;
            if !arity_ok {
                self.error(format!("undeclared symbol {name} used inconsistently"));
                return None;
            }
        } else {
            let msg = format!("undeclared symbol {name}, assuming {} arguments of sort $i", args.len());
            if self.opts.strict {
                self.error(msg);
            } else {
                self.diags.push(Diagnostic::warning(self.src.as_ref(), msg));
            }
            let ty = if args.is_empty() { TffType::Sort(result) } else { TffType::Map(vec![TffSort::Individual; args.len()], result) };
            self.inferred.insert(name.to_string(), ty);
        }
        for (i, a) in args.iter().enumerate() {
            if let Some(a) = a {
                if *a != TffSort::Individual {
                    self.error(format!("argument {} of undeclared {name} has sort {a}, expected $i", i + 1));
                }
            }
        }
        Some(result)
    }

    fn apply(&mut self, name: &str, args: &[Option<TffSort>], want_pred: bool) -> Option<TffSort> {
        if let Some(ty) = self.decls.get(name).cloned() {
            let is_pred = ty.result() == TffSort::Bool;
            if is_pred != want_pred {
                let role = if want_pred { "predicate" } else { "term" };
                self.error(format!("{name} of type {ty} used as a {role}"));
                return None;
            }
            if ty.args().len() != args.len() {
                self.error(format!("{name} expects {} argument(s), got {}", ty.args().len(), args.len()));
                return None;
            }
            for (i, (want, got)) in ty.args().iter().zip(args).enumerate() {
                if let Some(got) = got {
                    if got != want {
                        self.error(format!("argument {} of {name} has sort {got}, expected {want}", i + 1));
                    }
                }
            }
            return Some(ty.result());
        }
        if name.starts_with('$') {
            let known: Option<Vec<TffSort>> = args.iter().copied().collect();
            let res = if want_pred {
                builtin_pred(name, known.as_deref().unwrap_or(&[])).map(|r| r.map(|_| TffSort::Bool))
            } else {
                builtin_fn(name, known.as_deref().unwrap_or(&[]))
            };
            return match res {
                None => {
                    self.error(format!("unknown builtin {name}"));
                    None
                }
                Some(_) if known.is_none() => None,
                Some(Ok(s)) => Some(s),
                Some(Err(e)) => {
                    self.error(e);
                    None
                }
            };
        }
        self.undeclared(name, args, if want_pred { TffSort::Bool } else { TffSort::Individual })
    }

    fn term(&mut self, t: &TffTerm, env: &[(String, TffSort)]) -> Option<TffSort> {
        match t {
            TffTerm::Var(v) => match env.iter().rev().find(|(n, _)| n == v) {
                Some((_, s)) => Some(*s),
                None => {
                    self.error(format!("unbound variable {v}"));
                    None
                }
            },
            TffTerm::Int(_) => Some(TffSort::Int),
            TffTerm::Rat(_) => Some(TffSort::Rat),
            TffTerm::Real(_) => Some(TffSort::Real),
            TffTerm::Distinct(_) => Some(TffSort::Individual),
            TffTerm::App(f, args) => {
                let sorts: Vec<Option<TffSort>> = args.iter().map(|a| self.term(a, env)).collect();
                self.apply(f, &sorts, false)
            }
        }
    }

    fn formula(&mut self, f: &TffFormula, env: &mut Vec<(String, TffSort)>) {
        match f {
            TffFormula::True | TffFormula::False => {}
            TffFormula::Pred(p, args) => {
                let sorts: Vec<Option<TffSort>> = args.iter().map(|a| self.term(a, env)).collect();
                self.apply(p, &sorts, true);
            }
            TffFormula::Eq(a, b) | TffFormula::Neq(a, b) => {
                let (sa, sb) = (self.term(a, env), self.term(b, env));
                if let (Some(sa), Some(sb)) = (sa, sb) {
                    if sa != sb {
                        self.error(format!("equality between {sa} and {sb}: {a} vs {b}"));
                    }
                }
            }
            TffFormula::Not(a) => self.formula(a, env),
            TffFormula::And(ps) | TffFormula::Or(ps) => ps.iter().for_each(|p| self.formula(p, env)),
            TffFormula::Implies(a, b) | TffFormula::Iff(a, b) => {
                self.formula(a, env);
                self.formula(b, env);
            }
            TffFormula::Quant(_, vars, body) => {
                let depth = env.len();
                for (v, s) in vars {
                    let s = s.unwrap_or(TffSort::Individual);
                    if s == TffSort::Bool {
                        self.error(format!("variable {v} cannot range over $o"));
                    }
                    env.push((v.clone(), s));
                }
                self.formula(body, env);
                env.truncate(depth);
            }
        }
    }
}

/// Sort-check parsed units; declarations may appear anywhere in the problem.
pub fn check_units(units: &[TffUnit], opts: &CheckOptions) -> Vec<Diagnostic> {
    let mut ck = Checker { opts, decls: BTreeMap::new(), inferred: BTreeMap::new(), diags: Vec::new(), src: None };
    let mut names = BTreeSet::new();
    for u in units {
        ck.src = Some(Source { file: opts.file.clone(), line: u.line });
        if !names.insert(u.name.clone()) {
            ck.diags.push(Diagnostic::warning(ck.src.as_ref(), format!("duplicate unit name {}", u.name)));
        }
        let UnitBody::Decl(sym, ty) = &u.body else { continue };
        if sym.starts_with('$') {
            ck.error(format!("cannot redeclare builtin {sym}"));
            continue;
        }
        if ty.args().contains(&TffSort::Bool) {
            ck.error(format!("{sym} takes an argument of sort $o"));
        }
        match ck.decls.get(sym) {
            Some(prev) if prev != ty => ck.error(format!("{sym} redeclared as {ty}, previously {prev}")),
            Some(_) => {}
            None => {
                ck.decls.insert(sym.clone(), ty.clone());
            }
        }
    }
    for u in units {
        ck.src = Some(Source { file: opts.file.clone(), line: u.line });
        if let UnitBody::Formula(f) = &u.body {
            ck.formula(f, &mut Vec::new());
        }
    }
    ck.diags
}

pub fn check_tff_text(text: &str, opts: &CheckOptions) -> Result<Vec<Diagnostic>, TffParseError> {
    Ok(check_units(&parse_tff(text)?, opts))
}
