//! Rewrites applied to whole axioms before sort inference.

use crate::diag::Diagnostic;
use crate::formula::{fresh_name, Connective, Formula, Head, SourcedFormula};
use crate::kb::KnowledgeBase;
use std::collections::{BTreeMap, BTreeSet};

pub const ARITHMETIC_FUNCTIONS: &[&str] = &["AdditionFn", "SubtractionFn", "MultiplicationFn", "DivisionFn"];
pub const MEASURE_FN: &str = "MeasureFn";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionPolicy {
    pub excluded_types: BTreeSet<String>,
}

impl Default for ExclusionPolicy {
    fn default() -> Self {
        ExclusionPolicy {
            excluded_types: ["IrrationalNumber", "BinaryNumber", "ImaginaryNumber", "ComplexNumber"]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

impl ExclusionPolicy {
    pub fn with_types<I: IntoIterator<Item = S>, S: Into<String>>(types: I) -> Self {
        ExclusionPolicy { excluded_types: types.into_iter().map(Into::into).collect() }
    }

    /// The excluded type that `ty` falls under, if any.
    pub fn excluded_by<'a>(&'a self, kb: &KnowledgeBase, ty: &str) -> Option<&'a str> {
        self.excluded_types.iter().find(|x| kb.is_sub(ty, x)).map(String::as_str)
    }

    pub fn excluded_symbol<'a>(&'a self, kb: &KnowledgeBase, f: &Formula) -> Option<(String, &'a str)> {
        f.symbols().into_iter().find_map(|s| self.excluded_by(kb, &s).map(|x| (s, x)))
    }
}

/// Split `axioms` into those free of excluded types and those mentioning one,
/// the latter paired with the reason.
pub fn exclude_unsupported(
    kb: &KnowledgeBase,
    axioms: Vec<SourcedFormula>,
    policy: &ExclusionPolicy,
) -> (Vec<SourcedFormula>, Vec<(SourcedFormula, String)>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for sf in axioms {
        match policy.excluded_symbol(kb, &sf.formula) {
            Some((sym, ty)) if sym == ty => dropped.push((sf, format!("mentions excluded type {ty}"))),
            Some((sym, ty)) => dropped.push((sf, format!("mentions {sym}, a kind of excluded type {ty}"))),
            None => kept.push(sf),
        }
    }
    (kept, dropped)
}

fn antecedent_conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Conn { kind: Connective::Implies | Connective::Iff, args } => match &args[0] {
            Formula::Conn { kind: Connective::And, args } => args.iter().collect(),
            other => vec![other],
        },
        _ => Vec::new(),
    }
}

fn instance_constraint(conjunct: &Formula, var: &str) -> Option<String> {
    match conjunct {
        Formula::Apply { head: Head::Const(h), args } if h == "instance" => match args.as_slice() {
            [Formula::Var(v), Formula::Sym(c)] if v == var => Some(c.clone()),
            _ => None,
        },
        _ => None,
    }
}

fn remove_conjunct(f: &Formula, target: &Formula) -> Formula {
    let Formula::Conn { kind, args } = f else { return f.clone() };
    let antecedent = match &args[0] {
        Formula::Conn { kind: Connective::And, args: cs } => {
            Formula::and_of(cs.iter().filter(|c| *c != target).cloned().collect())
        }
        a if a == target => None,
        a => Some(a.clone()),
    };
    match antecedent {
        Some(a) => Formula::conn(*kind, vec![a, args[1].clone()]),
        None => args[1].clone(),
    }
}

fn predicate_vars(f: &Formula) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    f.walk(&mut |_, node| {
        if let Formula::Apply { head: Head::Var(v), .. } = node {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
    });
    out
}

/// One copy of `sf` per combination of relations satisfying the class
/// constraints on its predicate variables.
pub fn instantiate_predicate_variables(
    kb: &KnowledgeBase,
    sf: &SourcedFormula,
) -> (Vec<SourcedFormula>, Vec<Diagnostic>) {
    let pvars = predicate_vars(&sf.formula);
    if pvars.is_empty() {
        return (vec![sf.clone()], Vec::new());
    }
    let mut partial = vec![(sf.formula.clone(), sf.label.clone())];
    for pv in &pvars {
        let mut next = Vec::new();
        for (f, label) in &partial {
            let found = antecedent_conjuncts(f)
                .into_iter()
                .find_map(|c| instance_constraint(c, pv).map(|class| (c.clone(), class)));
            let Some((conjunct, class)) = found else {
                let msg = format!("predicate variable ?{pv} has no class constraint in the antecedent; axiom dropped");
                return (Vec::new(), vec![Diagnostic::warning(Some(&sf.source), msg)]);
            };
            let stripped = remove_conjunct(f, &conjunct);
            for rel in kb.instances_of(&class) {
                let map = BTreeMap::from([(pv.clone(), Formula::Sym(rel.clone()))]);
                next.push((stripped.substitute(&map), format!("{label}_{rel}")));
            }
        }
        partial = next;
    }
    let out = partial
        .into_iter()
        .map(|(formula, label)| SourcedFormula { formula, source: sf.source.clone(), label })
        .collect();
    (out, Vec::new())
}

fn is_arithmetic(f: &Formula) -> bool {
    f.head_const().is_some_and(|h| ARITHMETIC_FUNCTIONS.contains(&h))
}

/// Split every quantity-typed variable that takes part in arithmetic into
/// `(MeasureFn ?N__V ?U__V)`; the arithmetic then acts on the number and the
/// result keeps the unit. `var_types` holds the step-1 type of each variable.
pub fn rewrite_quantity_arithmetic(
    kb: &KnowledgeBase,
    f: &Formula,
    var_types: &BTreeMap<String, String>,
) -> (Formula, Vec<Diagnostic>) {
    let mut split: Vec<String> = Vec::new();
    let mut diags = Vec::new();
    f.walk(&mut |_, node| {
        if !is_arithmetic(node) {
            return;
        }
        for a in node.children() {
            if let Formula::Var(v) = a {
                if var_types.get(v).is_some_and(|t| kb.is_physical_quantity(t)) && !split.contains(v) {
                    split.push(v.clone());
                }
            }
        }
    });
    if split.is_empty() {
        return (f.clone(), diags);
    }
    // A split variable also sitting in a number-only slot cannot be both.
    let mut conflicted = BTreeSet::new();
    f.walk(&mut |_, node| {
        let Formula::Apply { head: Head::Const(h), args } = node else { return };
        let Some(sig) = kb.signature(h) else { return };
        for (i, a) in args.iter().enumerate() {
            if let (Formula::Var(v), Some(at)) = (a, sig.arg(i + 1)) {
                if split.contains(v) && kb.is_real_like(&at.ty) {
                    conflicted.insert(v.clone());
                }
            }
        }
    });
    for v in &conflicted {
        diags.push(Diagnostic::warning(None, format!("?{v} is used both as a quantity and as a number; left unsplit")));
    }
    split.retain(|v| !conflicted.contains(v));
    if split.is_empty() {
        return (f.clone(), diags);
    }

    let mut taken: BTreeSet<String> = f.all_vars().into_iter().collect();
    let parts: BTreeMap<String, (String, String)> = split
        .iter()
        .map(|v| {
            let n = fresh_name(&format!("N__{v}"), &mut taken);
            let u = fresh_name(&format!("U__{v}"), &mut taken);
            (v.clone(), (n, u))
        })
        .collect();
    let units: BTreeSet<&str> = parts.values().map(|(_, u)| u.as_str()).collect();

    fn measure(n: Formula, u: &str) -> Formula {
        Formula::app(MEASURE_FN, vec![n, Formula::var(u)])
    }

    fn go(
        node: &Formula,
        parts: &BTreeMap<String, (String, String)>,
        units: &BTreeSet<&str>,
        diags: &mut Vec<Diagnostic>,
    ) -> Formula {
        match node {
            Formula::Var(v) => match parts.get(v) {
                Some((n, u)) => measure(Formula::var(n), u),
                None => node.clone(),
            },
            Formula::Quant { kind, vars, body } => {
                let vars = vars
                    .iter()
                    .flat_map(|v| match parts.get(v) {
                        Some((n, u)) => vec![n.clone(), u.clone()],
                        None => vec![v.clone()],
                    })
                    .collect();
                Formula::Quant { kind: *kind, vars, body: Box::new(go(body, parts, units, diags)) }
            }
            Formula::Apply { head, args } if is_arithmetic(node) => {
                let mut unit: Option<String> = None;
                let mut distinct_units = 0;
                let new_args = args
                    .iter()
                    .map(|a| {
                        let rewritten = go(a, parts, units, diags);
                        // Unwrap quantities produced by this rewrite.
                        match rewritten {
                            Formula::Apply { head: Head::Const(ref h), ref args }
                                if h == MEASURE_FN
                                    && matches!(&args[1], Formula::Var(u) if units.contains(u.as_str())) =>
                            {
                                let Formula::Var(u) = &args[1] else { unreachable!() };
                                if unit.as_deref() != Some(u) {
                                    distinct_units += 1;
                                }
                                unit.get_or_insert_with(|| u.clone());
                                args[0].clone()
                            }
                            other => other,
                        }
                    })
                    .collect();
                let applied = Formula::Apply { head: head.clone(), args: new_args };
                if distinct_units > 1 {
                    diags.push(Diagnostic::note(
                        None,
                        format!("{} combines quantities with independent units; result takes the first unit", head.name()),
                    ));
                }
                match unit {
                    Some(u) => measure(applied, &u),
                    None => applied,
                }
            }
            Formula::Apply { head, args } => Formula::Apply {
                head: head.clone(),
                args: args.iter().map(|a| go(a, parts, units, diags)).collect(),
            },
            Formula::Conn { kind, args } => {
                Formula::Conn { kind: *kind, args: args.iter().map(|a| go(a, parts, units, diags)).collect() }
            }
            _ => node.clone(),
        }
    }

    let out = go(f, &parts, &units, &mut diags);
    (out, diags)
}
