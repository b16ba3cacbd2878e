//! Sort inference: variable types, comparison constraints, propagation
//! through functions, promotion of numeric subtypes and literal typing.

use crate::diag::Diagnostic;
use crate::formula::{Formula, Head, Path};
use crate::kb::{KnowledgeBase, ENTITY, INTEGER, QUANTITY, RATIONAL, REAL};
use std::collections::BTreeMap;
use std::fmt;

const FIXPOINT_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarType {
    pub ty: String,
    /// The variable denotes a class (`?Y` in `(subclass ?Y PureSubstance)`).
    pub class_marker: bool,
}

impl fmt::Display for VarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.ty, if self.class_marker { "+" } else { "" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubtypeRecord {
    pub var: String,
    pub subtype: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SortEnv {
    pub var_types: BTreeMap<String, VarType>,
    /// Resolved type of each function occurrence, keyed by tree path.
    pub returns: BTreeMap<Path, String>,
    /// Resolved type of each numeric literal. `None` marks an integer literal
    /// not yet pinned by its context.
    pub literals: BTreeMap<Path, Option<String>>,
    pub promotions: Vec<SubtypeRecord>,
    /// Constants with a numeric class, at their promoted type: `Pi` is
    /// RealNumber given `(instance Pi PositiveRealNumber)`.
    pub constants: BTreeMap<String, String>,
    /// Passes taken by the last propagation fixpoint.
    pub iterations: usize,
}

impl SortEnv {
    pub fn var_type(&self, v: &str) -> Option<&str> {
        self.var_types.get(v).map(|t| t.ty.as_str())
    }

    /// `[?A=T1, ?B=T2+]` in variable-name order.
    pub fn render_vars(&self) -> String {
        let parts: Vec<String> = self.var_types.iter().map(|(v, t)| format!("?{v}={t}")).collect();
        format!("[{}]", parts.join(", "))
    }

    /// Resolved type of a literal; integer literals never pinned default to Integer.
    pub fn literal_type(&self, path: &[usize], f: &Formula) -> String {
        match (self.literals.get(path), f) {
            (Some(Some(t)), _) => t.clone(),
            (_, Formula::Real(_)) => REAL.to_string(),
            _ => INTEGER.to_string(),
        }
    }

    /// Resolved SUMO type of the term at `path`, if it is a variable,
    /// function occurrence or numeric literal.
    pub fn term_type(&self, f: &Formula, path: &[usize]) -> Option<String> {
        match f.at(path)? {
            Formula::Var(v) => self.var_type(v).map(String::from),
            Formula::Apply { .. } => self.returns.get(path).cloned(),
            lit @ (Formula::Int(_) | Formula::Real(_)) => Some(self.literal_type(path, lit)),
            Formula::Sym(s) => self.constants.get(s).cloned(),
            _ => None,
        }
    }
}

/// The three types with a native TFF sort.
pub fn base_numeric(ty: &str) -> bool {
    ty == INTEGER || ty == REAL || ty == RATIONAL
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Slot {
    Var(String),
    Ret(Path),
    IntLit(Path),
    RealLit(Path),
    Const(String),
    Other,
}

#[derive(Debug, Clone)]
struct Occ {
    path: Path,
    head: String,
    args: Vec<Slot>,
}

fn slot_for(arg: &Formula, path: Path) -> Slot {
    match arg {
        Formula::Var(v) => Slot::Var(v.clone()),
        Formula::Apply { head: Head::Const(_), .. } => Slot::Ret(path),
        Formula::Int(_) => Slot::IntLit(path),
        Formula::Real(_) => Slot::RealLit(path),
        Formula::Sym(s) => Slot::Const(s.clone()),
        _ => Slot::Other,
    }
}

fn occurrences(f: &Formula) -> Vec<Occ> {
    let mut out = Vec::new();
    f.walk(&mut |path, node| {
        if let Formula::Apply { head: Head::Const(h), args } = node {
            let slots = args
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let mut p = path.clone();
                    p.push(i);
                    slot_for(a, p)
                })
                .collect();
            out.push(Occ { path: path.clone(), head: h.clone(), args: slots });
        }
    });
    out
}

/// Paths of applications standing in term position.
fn function_paths(f: &Formula) -> Vec<Path> {
    let mut out = Vec::new();
    f.walk(&mut |path, node| {
        if let Formula::Apply { args, .. } = node {
            for (i, a) in args.iter().enumerate() {
                if let Formula::Apply { .. } = a {
                    let mut p = path.clone();
                    p.push(i);
                    out.push(p);
                }
            }
        }
    });
    out
}

/// Comparable → the more specific; otherwise their closest common ancestor.
fn narrow(kb: &KnowledgeBase, a: &str, b: &str) -> String {
    kb.narrower(a, b).unwrap_or_else(|| kb.common_ancestor(a, b))
}

struct Constraints {
    instance: Vec<String>,
    class: Vec<String>,
}

/// Step 1: each variable gets the most specific of the types its argument
/// positions demand; function occurrences start at their declared range.
pub fn collect_variable_types(kb: &KnowledgeBase, f: &Formula) -> (SortEnv, Vec<Diagnostic>) {
    collect_seeded(kb, f, &BTreeMap::new())
}

fn collect_seeded(kb: &KnowledgeBase, f: &Formula, seed: &BTreeMap<String, String>) -> (SortEnv, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let mut cons: BTreeMap<String, Constraints> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for v in f.all_vars() {
        order.push(v.clone());
        cons.insert(v, Constraints { instance: Vec::new(), class: Vec::new() });
    }
    let mut env = SortEnv::default();
    for occ in occurrences(f) {
        let sig = kb.signature(&occ.head);
        if sig.is_none() && !kb.knows_type(&occ.head) && !kb.is_extended_to_quantities(&occ.head) {
            diags.push(Diagnostic::warning(None, format!("no signature for {}; arguments treated as individuals", occ.head)));
        }
        for (i, slot) in occ.args.iter().enumerate() {
            let declared = sig.and_then(|s| s.arg(i + 1));
            match slot {
                Slot::Var(v) => {
                    let c = cons.get_mut(v).expect("variable collected");
                    if let Some(d) = declared {
                        if d.class_marker {
                            c.class.push(d.ty.clone());
                        } else {
                            c.instance.push(d.ty.clone());
                        }
                    }
                }
                Slot::IntLit(p) => {
                    if let Some(d) = declared.filter(|d| kb.is_real_like(&d.ty)) {
                        env.literals.insert(p.clone(), Some(d.ty.clone()));
                    }
                }
                Slot::Const(c) => {
                    if let Some(t) = kb.numeric_constant_type(c) {
                        env.constants.insert(c.clone(), kb.promotion_target(&t));
                    }
                }
                _ => {}
            }
        }
        match (occ.head.as_str(), occ.args.as_slice(), f.at(&occ.path)) {
            ("instance", [Slot::Var(v), _], Some(Formula::Apply { args, .. })) => {
                if let Formula::Sym(c) = &args[1] {
                    cons.get_mut(v).expect("variable collected").instance.push(c.clone());
                }
            }
            ("subclass", [Slot::Var(v), _], Some(Formula::Apply { args, .. })) => {
                if let Formula::Sym(c) = &args[1] {
                    cons.get_mut(v).expect("variable collected").class.push(c.clone());
                }
            }
            _ => {}
        }
    }
    f.walk(&mut |path, node| {
        if let Formula::Real(_) = node {
            env.literals.insert(path.clone(), Some(REAL.to_string()));
        } else if let Formula::Int(_) = node {
            env.literals.entry(path.clone()).or_insert(None);
        }
    });
    for v in order {
        let c = &cons[&v];
        let (types, class_marker) = if c.class.is_empty() {
            (c.instance.clone(), false)
        } else {
            (c.class.clone(), true)
        };
        let mut ty = ENTITY.to_string();
        for t in &types {
            let next = narrow(kb, &ty, t);
            if kb.narrower(&ty, t).is_none() && !kb.is_quantity_like(&ty) {
                diags.push(Diagnostic::note(None, format!("?{v}: {ty} and {t} are incomparable; using {next}")));
            }
            ty = next;
        }
        if let Some(s) = seed.get(&v) {
            if kb.is_sub(s, &ty) {
                ty = s.clone();
            }
        }
        env.var_types.insert(v, VarType { ty, class_marker });
    }
    for p in function_paths(f) {
        let head = f.at(&p).and_then(Formula::head_const).unwrap_or_default();
        let range = kb.signature(head).and_then(|s| s.range_type.as_ref()).map(|r| r.ty.clone());
        env.returns.insert(p, range.unwrap_or_else(|| ENTITY.to_string()));
    }
    (env, diags)
}

fn slot_type(env: &SortEnv, slot: &Slot) -> Option<String> {
    match slot {
        Slot::Var(v) => env.var_types.get(v).filter(|t| !t.class_marker).map(|t| t.ty.clone()),
        Slot::Ret(p) => env.returns.get(p).cloned(),
        Slot::IntLit(p) | Slot::RealLit(p) => env.literals.get(p).cloned().flatten(),
        Slot::Const(c) => env.constants.get(c).cloned(),
        Slot::Other => None,
    }
}

fn set_slot(env: &mut SortEnv, slot: &Slot, ty: &str) -> bool {
    let target = match slot {
        Slot::Var(v) => match env.var_types.get_mut(v) {
            Some(t) if !t.class_marker => &mut t.ty,
            _ => return false,
        },
        Slot::Ret(p) => match env.returns.get_mut(p) {
            Some(t) => t,
            None => return false,
        },
        Slot::IntLit(p) => {
            let entry = env.literals.entry(p.clone()).or_insert(None);
            if entry.as_deref() == Some(ty) {
                return false;
            }
            *entry = Some(ty.to_string());
            return true;
        }
        Slot::RealLit(_) | Slot::Const(_) | Slot::Other => return false,
    };
    if target == ty {
        false
    } else {
        *target = ty.to_string();
        true
    }
}

/// Functions polymorphic over all quantities: every position is Quantity or Number.
fn is_quantity_polymorphic(kb: &KnowledgeBase, head: &str) -> bool {
    let Some(sig) = kb.signature(head) else { return false };
    let Some(range) = &sig.range_type else { return false };
    sig.arity() > 0
        && std::iter::once(range).chain(sig.arg_types.iter()).all(|a| !a.class_marker && kb.is_ambiguous_quantity(&a.ty))
}

/// Bring all members of a comparison (or of a polymorphic function together
/// with its result) to their common type.
fn resolve_group(kb: &KnowledgeBase, env: &mut SortEnv, members: &[Slot], carve_out: bool) -> bool {
    let concrete: Vec<String> = members.iter().filter_map(|s| slot_type(env, s)).collect();
    let above_quantity = |t: &str| kb.is_sub(QUANTITY, t) && t != QUANTITY;
    if concrete.iter().any(|t| !kb.is_quantity_like(t) && !above_quantity(t)) {
        return false;
    }
    let quantities: Vec<&String> = concrete.iter().filter(|t| kb.is_quantity_like(t)).collect();
    let Some((first, rest)) = quantities.split_first() else { return false };
    let mut m = (*first).clone();
    for t in rest {
        m = if carve_out { kb.meet_numeric(&m, t) } else { narrow(kb, &m, t) };
    }
    let mut changed = false;
    for s in members {
        match (s, slot_type(env, s)) {
            (Slot::RealLit(_) | Slot::Const(_) | Slot::Other, _) => {}
            (Slot::IntLit(_), None) => {
                if kb.is_real_like(&m) {
                    changed |= set_slot(env, s, &m);
                }
            }
            (_, None) => {}
            (_, Some(t)) => {
                let keep = kb.is_quantity_like(&t) && (kb.is_sub(&t, &m) || (carve_out && (t == REAL || t == RATIONAL)));
                if !keep {
                    changed |= set_slot(env, s, &m);
                }
            }
        }
    }
    changed
}

fn group_pass(kb: &KnowledgeBase, occs: &[Occ], env: &mut SortEnv) -> bool {
    let mut changed = false;
    for occ in occs {
        if kb.is_extended_to_quantities(&occ.head) && occ.args.len() == 2 {
            changed |= resolve_group(kb, env, &occ.args, true);
        } else if is_quantity_polymorphic(kb, &occ.head) && !occ.path.is_empty() {
            let mut members = vec![Slot::Ret(occ.path.clone())];
            members.extend(occ.args.iter().cloned());
            changed |= resolve_group(kb, env, &members, false);
        }
    }
    changed
}

/// Step 2: operands of comparisons (and, transitively, of quantity-polymorphic
/// functions feeding them) are brought to their lowest common type.
pub fn constrain_comparison_types(kb: &KnowledgeBase, f: &Formula, env: &SortEnv) -> SortEnv {
    let occs = occurrences(f);
    let mut env = env.clone();
    for _ in 0..FIXPOINT_LIMIT {
        if !group_pass(kb, &occs, &mut env) {
            break;
        }
    }
    env
}

fn domain_pass(kb: &KnowledgeBase, occs: &[Occ], env: &mut SortEnv) -> bool {
    let mut changed = false;
    for occ in occs {
        let Some(sig) = kb.signature(&occ.head) else { continue };
        for (i, slot) in occ.args.iter().enumerate() {
            let Some(d) = sig.arg(i + 1).filter(|d| !d.class_marker) else { continue };
            match (slot, slot_type(env, slot)) {
                (Slot::IntLit(_), None) if kb.is_real_like(&d.ty) => changed |= set_slot(env, slot, &d.ty),
                (Slot::Var(_) | Slot::Ret(_), Some(t)) if t != d.ty && kb.is_sub(&d.ty, &t) => {
                    changed |= set_slot(env, slot, &d.ty)
                }
                _ => {}
            }
        }
    }
    changed
}

/// Fixpoint of argument-domain narrowing and comparison/function grouping.
pub fn propagate_function_types(kb: &KnowledgeBase, f: &Formula, env: &SortEnv) -> SortEnv {
    let occs = occurrences(f);
    let mut env = env.clone();
    env.iterations = 0;
    while env.iterations < FIXPOINT_LIMIT {
        env.iterations += 1;
        let a = domain_pass(kb, &occs, &mut env);
        let b = group_pass(kb, &occs, &mut env);
        if !a && !b {
            break;
        }
    }
    env
}

/// Step 3: lift numeric subtypes to Integer / RationalNumber / RealNumber,
/// recording the variables that lost information.
pub fn promote_types(kb: &KnowledgeBase, env: &SortEnv) -> SortEnv {
    let mut env = env.clone();
    for (v, t) in env.var_types.iter_mut() {
        if t.class_marker || !kb.is_proper_numeric_subtype(&t.ty) {
            continue;
        }
        let record = SubtypeRecord { var: v.clone(), subtype: t.ty.clone() };
        if !env.promotions.contains(&record) {
            env.promotions.push(record);
        }
        t.ty = kb.promotion_target(&t.ty);
    }
    for t in env.returns.values_mut() {
        *t = kb.promotion_target(t);
    }
    for t in env.literals.values_mut().flatten() {
        *t = kb.promotion_target(t);
    }
    env
}

/// Step 4: integer literals whose resolved type is RealNumber become reals.
pub fn promote_integer_literals(f: &Formula, env: &SortEnv) -> (Formula, SortEnv) {
    let mut out = f.clone();
    for (path, ty) in &env.literals {
        if ty.as_deref() != Some(REAL) {
            continue;
        }
        if let Some(node) = out.at_mut(path) {
            if let Formula::Int(i) = node {
                *node = Formula::Real(format!("{i}.0"));
            }
        }
    }
    (out, env.clone())
}

/// Environments after each inference step, for inspection and tests.
#[derive(Debug, Clone)]
pub struct InferenceTrace {
    pub collected: SortEnv,
    pub constrained: SortEnv,
    pub propagated: SortEnv,
    pub promoted: SortEnv,
    pub diagnostics: Vec<Diagnostic>,
}

impl InferenceTrace {
    pub fn env(&self) -> &SortEnv {
        &self.promoted
    }
}

/// Steps 1-3 plus propagation. `seed` pre-narrows variables whose type is
/// known from an earlier pass.
pub fn infer_seeded(kb: &KnowledgeBase, f: &Formula, seed: &BTreeMap<String, String>) -> InferenceTrace {
    let (collected, diagnostics) = collect_seeded(kb, f, seed);
    let constrained = constrain_comparison_types(kb, f, &collected);
    let propagated = propagate_function_types(kb, f, &constrained);
    let promoted = promote_types(kb, &propagated);
    InferenceTrace { collected, constrained, propagated, promoted, diagnostics }
}

pub fn infer(kb: &KnowledgeBase, f: &Formula) -> InferenceTrace {
    infer_seeded(kb, f, &BTreeMap::new())
}

/// Re-run propagation and promotion after variables were pinned externally.
pub fn repropagate(kb: &KnowledgeBase, f: &Formula, env: &SortEnv) -> SortEnv {
    let constrained = constrain_comparison_types(kb, f, env);
    let propagated = propagate_function_types(kb, f, &constrained);
    promote_types(kb, &propagated)
}
