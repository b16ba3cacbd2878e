//! KIF formula trees and the structural helpers shared by every pipeline stage.

use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
    Not,
    Implies,
    Iff,
}

impl Connective {
    pub fn keyword(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Not => "not",
            Connective::Implies => "=>",
            Connective::Iff => "<=>",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "and" => Connective::And,
            "or" => Connective::Or,
            "not" => Connective::Not,
            "=>" => Connective::Implies,
            "<=>" => Connective::Iff,
            _ => return None,
        })
    }

    /// Returns `true` when `n` arguments are allowed.
    pub fn accepts_arity(self, n: usize) -> bool {
        match self {
            Connective::Not => n == 1,
            Connective::Implies | Connective::Iff => n == 2,
            Connective::And | Connective::Or => n >= 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// Head of an application: a constant relation/function name, or a
/// predicate variable such as `?REL` in `(?REL ?I1 ?I2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Const(String),
    Var(String),
}

impl Head {
    pub fn name(&self) -> &str {
        match self {
            Head::Const(n) | Head::Var(n) => n,
        }
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Head::Const(n) => Some(n),
            Head::Var(_) => None,
        }
    }
}

/// A SUO-KIF expression. Variables are stored without their `?` sigil and
/// row variables without their `@`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    RowVar(String),
    Sym(String),
    Str(String),
    Int(BigInt),
    /// Decimal literal kept verbatim.
    Real(String),
    Apply { head: Head, args: Vec<Formula> },
    Conn { kind: Connective, args: Vec<Formula> },
    Quant { kind: Quantifier, vars: Vec<String>, body: Box<Formula> },
}

/// Position of a node inside a formula: the child indices taken from the root.
/// For applications, argument `i` (1-based in KIF terms) is child `i - 1`.
pub type Path = Vec<usize>;

impl Formula {
    pub fn app(head: &str, args: Vec<Formula>) -> Formula {
        Formula::Apply { head: Head::Const(head.to_string()), args }
    }

    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn sym(name: &str) -> Formula {
        Formula::Sym(name.to_string())
    }

    pub fn int(v: i64) -> Formula {
        Formula::Int(BigInt::from(v))
    }

    pub fn conn(kind: Connective, args: Vec<Formula>) -> Formula {
        Formula::Conn { kind, args }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Conn { kind: Connective::Implies, args: vec![a, b] }
    }

    /// Conjunction that collapses singletons and flattens nested `and`.
    pub fn and_of(parts: Vec<Formula>) -> Option<Formula> {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::Conn { kind: Connective::And, args } => flat.extend(args),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => None,
            1 => flat.pop(),
            _ => Some(Formula::Conn { kind: Connective::And, args: flat }),
        }
    }

    pub fn head_const(&self) -> Option<&str> {
        match self {
            Formula::Apply { head: Head::Const(h), .. } => Some(h),
            _ => None,
        }
    }

    pub fn is_literal_number(&self) -> bool {
        matches!(self, Formula::Int(_) | Formula::Real(_))
    }

    pub fn children(&self) -> &[Formula] {
        match self {
            Formula::Apply { args, .. } | Formula::Conn { args, .. } => args,
            Formula::Quant { body, .. } => std::slice::from_ref(body.as_ref()),
            _ => &[],
        }
    }

    pub fn children_mut(&mut self) -> &mut [Formula] {
        match self {
            Formula::Apply { args, .. } | Formula::Conn { args, .. } => args,
            Formula::Quant { body, .. } => std::slice::from_mut(body.as_mut()),
            _ => &mut [],
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Formula> {
        let mut node = self;
        for &i in path {
            node = node.children().get(i)?;
        }
        Some(node)
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Formula> {
        let mut node = self;
        for &i in path {
            node = node.children_mut().get_mut(i)?;
        }
        Some(node)
    }

    /// Pre-order traversal with paths.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&Path, &'a Formula)) {
        fn go<'a>(node: &'a Formula, path: &mut Path, f: &mut impl FnMut(&Path, &'a Formula)) {
            f(path, node);
            for (i, c) in node.children().iter().enumerate() {
                path.push(i);
                go(c, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f);
    }

    /// All variable names, including bound ones and predicate variables,
    /// in order of first appearance.
    pub fn all_vars(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |n: &str| {
            if seen.insert(n.to_string()) {
                out.push(n.to_string());
            }
        };
        self.walk(&mut |_, node| match node {
            Formula::Var(v) => push(v),
            Formula::Apply { head: Head::Var(v), .. } => push(v),
            Formula::Quant { vars, .. } => vars.iter().for_each(|v| push(v)),
            _ => {}
        });
        out
    }

    /// Free variables in order of first appearance.
    pub fn free_vars(&self) -> Vec<String> {
        fn go(node: &Formula, bound: &mut Vec<String>, seen: &mut BTreeSet<String>, out: &mut Vec<String>) {
            let mut note = |v: &String, bound: &Vec<String>| {
                if !bound.contains(v) && seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            };
            match node {
                Formula::Var(v) => note(v, bound),
                Formula::Apply { head, args } => {
                    if let Head::Var(v) = head {
                        note(v, bound);
                    }
                    for a in args {
                        go(a, bound, seen, out);
                    }
                }
                Formula::Conn { args, .. } => {
                    for a in args {
                        go(a, bound, seen, out);
                    }
                }
                Formula::Quant { vars, body, .. } => {
                    let n = bound.len();
                    bound.extend(vars.iter().cloned());
                    go(body, bound, seen, out);
                    bound.truncate(n);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut BTreeSet::new(), &mut out);
        out
    }

    /// Constant symbols mentioned anywhere: atoms and application heads.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |_, node| match node {
            Formula::Sym(s) => {
                out.insert(s.clone());
            }
            Formula::Apply { head: Head::Const(h), .. } => {
                out.insert(h.clone());
            }
            _ => {}
        });
        out
    }

    pub fn contains_row_var(&self) -> bool {
        let mut found = false;
        self.walk(&mut |_, node| match node {
            Formula::RowVar(_) => found = true,
            Formula::Quant { vars, .. } if vars.iter().any(|v| v.starts_with('@')) => found = true,
            _ => {}
        });
        found
    }

    /// Replace free occurrences of variables (as terms or predicate heads).
    /// Bound variables of inner quantifiers that would capture a free
    /// variable of a replacement are renamed apart.
    pub fn substitute(&self, map: &BTreeMap<String, Formula>) -> Formula {
        let mut taken: BTreeSet<String> = self.all_vars().into_iter().collect();
        for f in map.values() {
            taken.extend(f.all_vars());
        }
        self.subst_inner(map, &mut taken)
    }

    fn subst_inner(&self, map: &BTreeMap<String, Formula>, taken: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Formula::Apply { head, args } => {
                let args = args.iter().map(|a| a.subst_inner(map, taken)).collect();
                let head = match head {
                    Head::Var(v) => match map.get(v) {
                        Some(Formula::Sym(s)) => Head::Const(s.clone()),
                        Some(Formula::Var(w)) => Head::Var(w.clone()),
                        _ => head.clone(),
                    },
                    h => h.clone(),
                };
                Formula::Apply { head, args }
            }
            Formula::Conn { kind, args } => Formula::Conn {
                kind: *kind,
                args: args.iter().map(|a| a.subst_inner(map, taken)).collect(),
            },
            Formula::Quant { kind, vars, body } => {
                let mut inner = map.clone();
                for v in vars {
                    inner.remove(v);
                }
                let incoming: BTreeSet<String> = inner.values().flat_map(|f| f.free_vars()).collect();
                let mut new_vars = Vec::with_capacity(vars.len());
                for v in vars {
                    if incoming.contains(v) {
                        let fresh = fresh_name(v, taken);
                        inner.insert(v.clone(), Formula::Var(fresh.clone()));
                        new_vars.push(fresh);
                    } else {
                        new_vars.push(v.clone());
                    }
                }
                Formula::Quant { kind: *kind, vars: new_vars, body: Box::new(body.subst_inner(&inner, taken)) }
            }
            _ => self.clone(),
        }
    }

    /// Rename bound variables so that every quantifier binds names that are
    /// distinct from each other and from the free variables.
    pub fn rename_bound_apart(&self) -> Formula {
        let mut taken: BTreeSet<String> = self.free_vars().into_iter().collect();
        self.rename_apart_inner(&BTreeMap::new(), &mut taken)
    }

    fn rename_apart_inner(&self, map: &BTreeMap<String, String>, taken: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::Var(v) => Formula::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Formula::Apply { head, args } => Formula::Apply {
                head: match head {
                    Head::Var(v) => Head::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
                    h => h.clone(),
                },
                args: args.iter().map(|a| a.rename_apart_inner(map, taken)).collect(),
            },
            Formula::Conn { kind, args } => Formula::Conn {
                kind: *kind,
                args: args.iter().map(|a| a.rename_apart_inner(map, taken)).collect(),
            },
            Formula::Quant { kind, vars, body } => {
                let mut inner = map.clone();
                let mut new_vars = Vec::new();
                for v in vars {
                    let name = if taken.contains(v) { fresh_name(v, taken) } else { v.clone() };
                    taken.insert(name.clone());
                    inner.insert(v.clone(), name.clone());
                    new_vars.push(name);
                }
                Formula::Quant { kind: *kind, vars: new_vars, body: Box::new(body.rename_apart_inner(&inner, taken)) }
            }
            _ => self.clone(),
        }
    }

    /// Replace every occurrence of the constant `from` (atom or head) with `to`.
    pub fn rename_symbol(&self, from: &str, to: &str) -> Formula {
        let mut out = self.clone();
        fn go(node: &mut Formula, from: &str, to: &str) {
            match node {
                Formula::Sym(s) if s == from => *s = to.to_string(),
                Formula::Apply { head: Head::Const(h), .. } if h == from => *h = to.to_string(),
                _ => {}
            }
            for c in node.children_mut() {
                go(c, from, to);
            }
        }
        go(&mut out, from, to);
        out
    }
}

/// Pick `base1`, `base2`, ... avoiding `taken`; the result is added to `taken`.
pub fn fresh_name(base: &str, taken: &mut BTreeSet<String>) -> String {
    if !taken.contains(base) {
        taken.insert(base.to_string());
        return base.to_string();
    }
    let mut i = 1usize;
    loop {
        let candidate = format!("{base}{i}");
        if !taken.contains(&candidate) {
            taken.insert(candidate.clone());
            return candidate;
        }
        i += 1;
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::kif::print_kif(self))
    }
}

/// Where a top-level formula came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub file: String,
    pub line: usize,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourcedFormula {
    pub formula: Formula,
    pub source: Source,
    /// Unique within a translation run.
    pub label: String,
}
