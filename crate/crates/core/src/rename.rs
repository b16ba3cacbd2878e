//! Suffix renaming of numerically resolved relations and functions, axiom
//! doubling for quantity-level axioms and signature variants.

use crate::formula::{Formula, Head, SourcedFormula};
use crate::infer::{repropagate, SortEnv};
use crate::kb::{ArgType, KnowledgeBase, Signature, INTEGER, RATIONAL, REAL};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SortCode {
    In,
    Re,
    Ra,
}

impl SortCode {
    pub fn of_type(ty: &str) -> Option<SortCode> {
        match ty {
            INTEGER => Some(SortCode::In),
            REAL => Some(SortCode::Re),
            RATIONAL => Some(SortCode::Ra),
            _ => None,
        }
    }

    pub fn sumo_type(self) -> &'static str {
        match self {
            SortCode::In => INTEGER,
            SortCode::Re => REAL,
            SortCode::Ra => RATIONAL,
        }
    }

    /// Widest of two codes: Integer < Rational < Real.
    pub fn join(self, other: SortCode) -> SortCode {
        let rank = |c: SortCode| match c {
            SortCode::In => 0,
            SortCode::Ra => 1,
            SortCode::Re => 2,
        };
        if rank(self) >= rank(other) {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for SortCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SortCode::In => "In",
            SortCode::Re => "Re",
            SortCode::Ra => "Ra",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenameError {
    #[error("position {0} has non-numeric type {1}")]
    NonNumeric(usize, String),
}

/// `__<pos><code>...`, with a trailing `Fn` for functions.
pub fn render_suffix(position_sorts: &[(usize, SortCode)], is_function: bool) -> String {
    let mut s = String::from("__");
    for (p, c) in position_sorts {
        s.push_str(&format!("{p}{c}"));
    }
    if is_function {
        s.push_str("Fn");
    }
    s
}

/// Suffix for a signature given as `(position, SUMO type)` pairs.
pub fn suffix_for(sig: &[(usize, &str)], is_function: bool) -> Result<String, RenameError> {
    let codes = sig
        .iter()
        .map(|(p, t)| SortCode::of_type(t).map(|c| (*p, c)).ok_or_else(|| RenameError::NonNumeric(*p, t.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(render_suffix(&codes, is_function))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignatureVariant {
    pub base_name: String,
    /// Position 0 is the range for functions and the shared operand sort
    /// for comparisons.
    pub position_sorts: Vec<(usize, SortCode)>,
    pub is_function: bool,
}

impl SignatureVariant {
    pub fn name(&self) -> String {
        format!("{}{}", self.base_name, render_suffix(&self.position_sorts, self.is_function))
    }

    pub fn code_at(&self, position: usize) -> Option<SortCode> {
        self.position_sorts.iter().find(|(p, _)| *p == position).map(|(_, c)| *c)
    }

    /// Signature of the variant: suffixed positions take their code's type,
    /// the rest keep the base declaration.
    pub fn signature(&self, base: Option<&Signature>, arity: usize) -> Signature {
        let arity = base.map_or(arity, |b| b.arity().max(arity));
        let arg_types = (1..=arity)
            .map(|p| match self.code_at(p) {
                Some(c) => ArgType { ty: c.sumo_type().to_string(), class_marker: false },
                None => base
                    .and_then(|b| b.arg(p).cloned())
                    .unwrap_or(ArgType { ty: crate::kb::ENTITY.to_string(), class_marker: false }),
            })
            .collect();
        let range_type = if self.is_function {
            Some(match self.code_at(0) {
                Some(c) => ArgType { ty: c.sumo_type().to_string(), class_marker: false },
                None => base
                    .and_then(|b| b.range_type.clone())
                    .unwrap_or(ArgType { ty: crate::kb::ENTITY.to_string(), class_marker: false }),
            })
        } else {
            None
        };
        Signature { name: self.name(), arg_types, range_type }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenameTable {
    variants: BTreeMap<String, SignatureVariant>,
}

impl RenameTable {
    pub fn register(&mut self, v: SignatureVariant) -> String {
        let name = v.name();
        self.variants.entry(name.clone()).or_insert(v);
        name
    }

    pub fn get(&self, name: &str) -> Option<&SignatureVariant> {
        self.variants.get(name)
    }

    pub fn is_variant(&self, name: &str) -> bool {
        self.variants.contains_key(name)
    }

    pub fn variants(&self) -> impl Iterator<Item = &SignatureVariant> {
        self.variants.values()
    }

    pub fn variants_of(&self, base: &str) -> Vec<&SignatureVariant> {
        self.variants.values().filter(|v| v.base_name == base).collect()
    }

    pub fn bases(&self) -> BTreeSet<String> {
        self.variants.values().map(|v| v.base_name.clone()).collect()
    }

    pub fn merge(&mut self, other: &RenameTable) {
        for v in other.variants.values() {
            self.register(v.clone());
        }
    }

    pub fn len(&self) -> usize {
        self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }
}

fn code_at_path(env: &SortEnv, f: &Formula, path: &[usize]) -> Option<SortCode> {
    env.term_type(f, path).as_deref().and_then(SortCode::of_type)
}

fn declared_code(kb: &KnowledgeBase, t: Option<&ArgType>) -> Option<SortCode> {
    t.filter(|a| !a.class_marker).and_then(|a| SortCode::of_type(&kb.promotion_target(&a.ty)))
}

/// Variant an occurrence resolves to, if it needs one.
fn variant_for(kb: &KnowledgeBase, f: &Formula, env: &SortEnv, path: &[usize], head: &str, arity: usize) -> Option<SignatureVariant> {
    let arg_code = |i: usize| {
        let mut p = path.to_vec();
        p.push(i);
        code_at_path(env, f, &p)
    };
    if kb.is_extended_to_quantities(head) && arity == 2 {
        let (a, b) = (arg_code(0)?, arg_code(1)?);
        return Some(SignatureVariant {
            base_name: head.to_string(),
            position_sorts: vec![(0, a.join(b)), (1, a), (2, b)],
            is_function: false,
        });
    }
    let is_term = !path.is_empty() && matches!(f.at(&path[..path.len() - 1]), Some(Formula::Apply { .. }));
    let mut positions = Vec::new();
    if is_term {
        if let Some(c) = env.returns.get(path).and_then(|t| SortCode::of_type(t)) {
            positions.push((0, c));
        }
    }
    for i in 0..arity {
        if let Some(c) = arg_code(i) {
            positions.push((i + 1, c));
        }
    }
    if positions.is_empty() {
        return None;
    }
    if !is_term {
        let sig = kb.signature(head);
        let differs = positions.iter().any(|(p, c)| declared_code(kb, sig.and_then(|s| s.arg(*p))) != Some(*c));
        if !differs {
            return None;
        }
    }
    Some(SignatureVariant { base_name: head.to_string(), position_sorts: positions, is_function: is_term })
}

/// `(instance t C)` with a numeric `t` and a base numeric class is decided
/// by the sort itself and left alone.
fn is_sort_test(f: &Formula, env: &SortEnv, path: &[usize]) -> bool {
    let Some(Formula::Apply { head: Head::Const(h), args }) = f.at(path) else { return false };
    if h != "instance" || args.len() != 2 {
        return false;
    }
    let mut p = path.to_vec();
    p.push(0);
    matches!(&args[1], Formula::Sym(c) if SortCode::of_type(c).is_some()) && code_at_path(env, f, &p).is_some()
}

/// Step 5: replace every occurrence whose resolved signature is numeric by
/// its variant name, registering the variant in `table`.
pub fn rename_numeric_relations(kb: &KnowledgeBase, f: &Formula, env: &SortEnv, table: &mut RenameTable) -> Formula {
    let mut renames: Vec<(Vec<usize>, String)> = Vec::new();
    f.walk(&mut |path, node| {
        let Formula::Apply { head: Head::Const(h), args } = node else { return };
        if table.is_variant(h) || is_sort_test(f, env, path) {
            return;
        }
        if let Some(v) = variant_for(kb, f, env, path, h, args.len()) {
            renames.push((path.clone(), table.register(v)));
        }
    });
    let mut out = f.clone();
    for (path, name) in renames {
        if let Some(Formula::Apply { head, .. }) = out.at_mut(&path) {
            *head = Head::Const(name);
        }
    }
    out
}

/// Quantity- or Number-typed terms could stand for plain numbers.
pub fn ambiguous_vars(kb: &KnowledgeBase, env: &SortEnv) -> Vec<String> {
    env.var_types
        .iter()
        .filter(|(_, t)| !t.class_marker && kb.is_ambiguous_quantity(&t.ty))
        .map(|(v, _)| v.clone())
        .collect()
}

/// Step 6: axioms with quantity-level variables get a second, numeric
/// version in which those variables are real numbers.
pub fn double_axiom(kb: &KnowledgeBase, f: &Formula, env: &SortEnv) -> Vec<SortEnv> {
    let ambiguous = ambiguous_vars(kb, env);
    if ambiguous.is_empty() {
        return vec![env.clone()];
    }
    let mut numeric = env.clone();
    for v in &ambiguous {
        if let Some(t) = numeric.var_types.get_mut(v) {
            t.ty = REAL.to_string();
        }
    }
    for t in numeric.returns.values_mut() {
        if kb.is_ambiguous_quantity(t) {
            *t = REAL.to_string();
        }
    }
    let numeric = repropagate(kb, f, &numeric);
    vec![env.clone(), numeric]
}

fn variant_codes(kb: &KnowledgeBase, ty: &str) -> Vec<SortCode> {
    if kb.is_sub(ty, INTEGER) {
        if ty == INTEGER {
            vec![]
        } else {
            vec![SortCode::In]
        }
    } else if kb.is_sub(ty, RATIONAL) {
        vec![SortCode::In]
    } else if kb.is_sub(ty, REAL) {
        vec![SortCode::In, SortCode::Ra]
    } else if kb.is_ambiguous_quantity(ty) || ty == "PhysicalDimension" {
        vec![SortCode::In, SortCode::Re, SortCode::Ra]
    } else {
        vec![]
    }
}

/// Numeric variants a signature needs besides its original: one per sort
/// code admitted by some quantity-typed position.
pub fn generate_signature_variants(kb: &KnowledgeBase, name: &str) -> BTreeSet<SignatureVariant> {
    let Some(sig) = kb.signature(name) else { return BTreeSet::new() };
    let is_function = sig.is_function();
    let mut positions: Vec<(usize, &ArgType)> = sig.arg_types.iter().enumerate().map(|(i, a)| (i + 1, a)).collect();
    if let Some(r) = &sig.range_type {
        positions.insert(0, (0, r));
    }
    let per_pos: Vec<(usize, Vec<SortCode>, Option<SortCode>)> = positions
        .iter()
        .filter(|(_, a)| !a.class_marker)
        .map(|(p, a)| (*p, variant_codes(kb, &a.ty), SortCode::of_type(&kb.promotion_target(&a.ty))))
        .collect();
    let codes: BTreeSet<SortCode> = per_pos.iter().flat_map(|(_, c, _)| c.iter().copied()).collect();
    let mut out = BTreeSet::new();
    for code in codes {
        let position_sorts: Vec<(usize, SortCode)> = per_pos
            .iter()
            .filter_map(|(p, allowed, fixed)| if allowed.contains(&code) { Some((*p, code)) } else { fixed.map(|f| (*p, f)) })
            .collect();
        out.insert(SignatureVariant { base_name: name.to_string(), position_sorts, is_function });
    }
    out
}

/// Every axiom mentioning a base term, duplicated once per variant with the
/// variant's name substituted. Bases in `skip` are never copied.
pub fn copy_axioms_for_renamed_terms(
    axioms: &[SourcedFormula],
    table: &RenameTable,
    skip: &BTreeSet<String>,
) -> Vec<SourcedFormula> {
    let mut out = Vec::new();
    for base in table.bases() {
        if skip.contains(&base) {
            continue;
        }
        let variants = table.variants_of(&base);
        for sf in axioms.iter().filter(|sf| sf.formula.symbols().contains(&base)) {
            for v in &variants {
                let name = v.name();
                out.push(SourcedFormula {
                    formula: sf.formula.rename_symbol(&base, &name),
                    source: sf.source.clone(),
                    label: format!("{}{}", sf.label, render_suffix(&v.position_sorts, v.is_function)),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::infer::infer;
    use crate::kb::load_kb;
    use crate::kif::{parse_formula, parse_kif_named};

    fn kb_with(extra: &str) -> KnowledgeBase {
        let mut axioms = bundled::background_axioms();
        axioms.extend(parse_kif_named(extra, "extra.kif").unwrap());
        load_kb(&axioms).unwrap()
    }

    #[test]
    fn suffix_examples() {
        assert_eq!(suffix_for(&[(0, "RealNumber"), (1, "RealNumber"), (2, "RealNumber")], false).unwrap(), "__0Re1Re2Re");
        assert_eq!(suffix_for(&[(0, "Integer"), (1, "Integer"), (2, "Integer")], false).unwrap(), "__0In1In2In");
        assert_eq!(suffix_for(&[(0, "Integer"), (1, "RealNumber")], true).unwrap(), "__0In1ReFn");
        assert_eq!(suffix_for(&[(1, "Quantity")], false), Err(RenameError::NonNumeric(1, "Quantity".into())));
    }

    #[test]
    fn comparisons_renamed() {
        let kb = kb_with("(domain approximateDiameter 2 LengthMeasure) (subclass LengthMeasure PhysicalQuantity)");
        let f = parse_formula("(=> (and (approximateDiameter ?LD (MeasureFn ?Size Micrometer)) (lessThan 500 ?Size)) (p ?LD))")
            .unwrap();
        let t = infer(&kb, &f);
        let (g, env) = crate::infer::promote_integer_literals(&f, t.env());
        let mut table = RenameTable::default();
        let h = rename_numeric_relations(&kb, &g, &env, &mut table);
        let text = h.to_string();
        assert!(text.contains("(lessThan__0Re1Re2Re 500.0 ?Size)"), "{text}");
        assert!(text.contains("(MeasureFn__1ReFn ?Size Micrometer)"), "{text}");
    }

    #[test]
    fn remainder_renamed() {
        let kb = kb_with("");
        let f = parse_formula("(=> (equal (RemainderFn ?NUMBER1 ?NUMBER2) ?NUMBER) (equal (SignumFn ?NUMBER2) (SignumFn ?NUMBER)))")
            .unwrap();
        let t = infer(&kb, &f);
        let mut table = RenameTable::default();
        let g = rename_numeric_relations(&kb, &f, t.env(), &mut table);
        assert!(g.to_string().contains("(RemainderFn__0Re1Re2ReFn ?NUMBER1 ?NUMBER2)"), "{g}");
    }

    #[test]
    fn no_numeric_no_change() {
        let kb = kb_with("(domain p 1 Object)");
        let f = parse_formula("(=> (p ?X) (p ?X))").unwrap();
        let t = infer(&kb, &f);
        let mut table = RenameTable::default();
        assert_eq!(rename_numeric_relations(&kb, &f, t.env(), &mut table), f);
        assert!(table.is_empty());
    }

    #[test]
    fn doubling() {
        let kb = kb_with("(domain q 1 Quantity)");
        let f = parse_formula("(=> (q ?X) (greaterThan ?X ?Y))").unwrap();
        let t = infer(&kb, &f);
        let versions = double_axiom(&kb, &f, t.env());
        assert_eq!(versions.len(), 2);
        assert_eq!(versions[1].var_type("X"), Some("RealNumber"));
        assert_eq!(versions[1].var_type("Y"), Some("RealNumber"));
        let g = parse_formula("(=> (equal (RemainderFn ?A ?B) ?C) (equal (SignumFn ?B) (SignumFn ?C)))").unwrap();
        assert_eq!(double_axiom(&kb, &g, infer(&kb, &g).env()).len(), 1);
        let closed = parse_formula("(q 1)").unwrap();
        assert_eq!(double_axiom(&kb, &closed, infer(&kb, &closed).env()).len(), 1);
    }

    #[test]
    fn variants_by_argument_type() {
        let kb = kb_with("(domain pn 1 Number) (domain pi 1 Integer) (domain pnn 1 NonnegativeRealNumber) (domain pp 1 PositiveInteger)");
        assert_eq!(generate_signature_variants(&kb, "pn").len(), 3);
        assert!(generate_signature_variants(&kb, "pi").is_empty());
        let nn: Vec<String> = generate_signature_variants(&kb, "pnn").iter().map(|v| v.name()).collect();
        assert_eq!(nn, ["pnn__1In", "pnn__1Ra"]);
        let pp: Vec<String> = generate_signature_variants(&kb, "pp").iter().map(|v| v.name()).collect();
        assert_eq!(pp, ["pp__1In"]);
    }

    #[test]
    fn copies_per_variant() {
        let axioms = parse_kif_named("(p (RemainderFn ?A ?B)) (q ?C) (r (RemainderFn 1 2))", "a.kif").unwrap();
        let mut table = RenameTable::default();
        for code in [SortCode::In, SortCode::Re] {
            table.register(SignatureVariant {
                base_name: "RemainderFn".into(),
                position_sorts: vec![(0, code), (1, code), (2, code)],
                is_function: true,
            });
        }
        let copies = copy_axioms_for_renamed_terms(&axioms, &table, &BTreeSet::new());
        assert_eq!(copies.len(), 4);
        assert!(copies.iter().all(|c| !c.formula.symbols().contains("RemainderFn")));
        assert!(copy_axioms_for_renamed_terms(&axioms, &RenameTable::default(), &BTreeSet::new()).is_empty());
    }
}
