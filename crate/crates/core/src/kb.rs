//! Indexed view of a knowledge base: class hierarchy, relation signatures,
//! instance facts and the numeric-type queries used by sort inference.

use crate::formula::{Formula, SourcedFormula};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const ENTITY: &str = "Entity";
pub const QUANTITY: &str = "Quantity";
pub const NUMBER: &str = "Number";
pub const REAL: &str = "RealNumber";
pub const RATIONAL: &str = "RationalNumber";
pub const INTEGER: &str = "Integer";
pub const PHYSICAL_QUANTITY: &str = "PhysicalQuantity";
pub const EXTENDED_TO_QUANTITIES: &str = "RelationExtendedToQuantities";

/// KIF relations that only declare structure and are never translated.
pub const DECLARATION_RELATIONS: &[&str] =
    &["subclass", "domain", "range", "domainSubclass", "rangeSubclass", "documentation", "format", "termFormat"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("subclass cycle: {}", .0.join(" -> "))]
    SubclassCycle(Vec<String>),
    #[error("conflicting domain for {relation} argument {position}: {first} vs {second}")]
    ConflictingDomain { relation: String, position: usize, first: String, second: String },
    #[error("conflicting range for {relation}: {first} vs {second}")]
    ConflictingRange { relation: String, first: String, second: String },
    #[error("unknown type `{0}`")]
    UnknownType(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SumoNumericClass {
    IntegerLike,
    RationalLike,
    RealLike,
    QuantityLike,
    NonNumeric,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgType {
    pub ty: String,
    /// Declared with `domainSubclass`: the argument is a class, not an instance.
    pub class_marker: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    /// Position `i` (1-based in KIF) is stored at index `i - 1`.
    pub arg_types: Vec<ArgType>,
    pub range_type: Option<ArgType>,
}

impl Signature {
    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }

    pub fn is_function(&self) -> bool {
        self.range_type.is_some()
    }

    pub fn arg(&self, position: usize) -> Option<&ArgType> {
        position.checked_sub(1).and_then(|i| self.arg_types.get(i))
    }
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    parents: BTreeMap<String, BTreeSet<String>>,
    /// Reflexive-transitive ancestors of every known type.
    ancestors: BTreeMap<String, BTreeSet<String>>,
    types: BTreeSet<String>,
    instance_of: BTreeMap<String, BTreeSet<String>>,
    signatures: BTreeMap<String, Signature>,
    extended_to_quantities: BTreeSet<String>,
    axioms: Vec<SourcedFormula>,
}

fn ground_args(args: &[Formula]) -> Option<Vec<String>> {
    args.iter()
        .map(|a| match a {
            Formula::Sym(s) => Some(s.clone()),
            Formula::Int(i) => Some(i.to_string()),
            _ => None,
        })
        .collect()
}

/// Index `axioms`. Declarations are absorbed; every other formula (ground
/// `instance` facts included) is kept in [`KnowledgeBase::axioms`].
pub fn load_kb(axioms: &[SourcedFormula]) -> Result<KnowledgeBase, KbError> {
    let mut kb = KnowledgeBase::default();
    kb.types.insert(ENTITY.to_string());
    let mut domains: BTreeMap<String, BTreeMap<usize, ArgType>> = BTreeMap::new();
    let mut ranges: BTreeMap<String, ArgType> = BTreeMap::new();

    for sf in axioms {
        let Formula::Apply { head, args } = &sf.formula else {
            kb.axioms.push(sf.clone());
            continue;
        };
        let (Some(rel), Some(ground)) = (head.as_const(), ground_args(args)) else {
            kb.axioms.push(sf.clone());
            continue;
        };
        match (rel, ground.as_slice()) {
            ("subclass", [child, parent]) => {
                kb.parents.entry(child.clone()).or_default().insert(parent.clone());
                kb.types.insert(child.clone());
                kb.types.insert(parent.clone());
            }
            ("instance", [inst, class]) => {
                kb.instance_of.entry(inst.clone()).or_default().insert(class.clone());
                kb.types.insert(class.clone());
                if class == EXTENDED_TO_QUANTITIES {
                    kb.extended_to_quantities.insert(inst.clone());
                }
                kb.axioms.push(sf.clone());
            }
            ("domain" | "domainSubclass", [relation, pos, ty]) => {
                let Ok(position) = pos.parse::<usize>() else {
                    kb.axioms.push(sf.clone());
                    continue;
                };
                let arg = ArgType { ty: ty.clone(), class_marker: rel == "domainSubclass" };
                kb.types.insert(ty.clone());
                let slot = domains.entry(relation.clone()).or_default();
                match slot.get(&position) {
                    Some(prev) if prev != &arg => {
                        return Err(KbError::ConflictingDomain {
                            relation: relation.clone(),
                            position,
                            first: prev.ty.clone(),
                            second: ty.clone(),
                        })
                    }
                    _ => {
                        slot.insert(position, arg);
                    }
                }
            }
            ("range" | "rangeSubclass", [function, ty]) => {
                let arg = ArgType { ty: ty.clone(), class_marker: rel == "rangeSubclass" };
                kb.types.insert(ty.clone());
                match ranges.get(function) {
                    Some(prev) if prev != &arg => {
                        return Err(KbError::ConflictingRange {
                            relation: function.clone(),
                            first: prev.ty.clone(),
                            second: ty.clone(),
                        })
                    }
                    _ => {
                        ranges.insert(function.clone(), arg);
                    }
                }
            }
            (r, _) if DECLARATION_RELATIONS.contains(&r) => {}
            _ => kb.axioms.push(sf.clone()),
        }
    }

    let names: BTreeSet<String> = domains.keys().chain(ranges.keys()).cloned().collect();
    for name in names {
        let by_pos = domains.remove(&name).unwrap_or_default();
        let arity = by_pos.keys().copied().max().unwrap_or(0);
        let arg_types = (1..=arity)
            .map(|p| by_pos.get(&p).cloned().unwrap_or(ArgType { ty: ENTITY.into(), class_marker: false }))
            .collect();
        let range_type = ranges.remove(&name);
        kb.signatures.insert(name.clone(), Signature { name, arg_types, range_type });
    }

    kb.close_hierarchy()?;
    Ok(kb)
}

impl KnowledgeBase {
    fn close_hierarchy(&mut self) -> Result<(), KbError> {
        // Colour-marking DFS doubles as cycle detection.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        fn visit(
            t: &str,
            parents: &BTreeMap<String, BTreeSet<String>>,
            marks: &mut BTreeMap<String, Mark>,
            stack: &mut Vec<String>,
            closure: &mut BTreeMap<String, BTreeSet<String>>,
        ) -> Result<(), KbError> {
            match marks.get(t) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Active) => {
                    let start = stack.iter().position(|s| s == t).unwrap_or(0);
                    let mut cycle = stack[start..].to_vec();
                    cycle.push(t.to_string());
                    return Err(KbError::SubclassCycle(cycle));
                }
                None => {}
            }
            marks.insert(t.to_string(), Mark::Active);
            stack.push(t.to_string());
            let mut acc = BTreeSet::from([t.to_string()]);
            if let Some(ps) = parents.get(t) {
                for p in ps {
                    visit(p, parents, marks, stack, closure)?;
                    acc.extend(closure[p].iter().cloned());
                }
            }
            stack.pop();
            marks.insert(t.to_string(), Mark::Done);
            closure.insert(t.to_string(), acc);
            Ok(())
        }
        let mut marks = BTreeMap::new();
        let mut closure = BTreeMap::new();
        for t in self.types.clone() {
            visit(&t, &self.parents, &mut marks, &mut Vec::new(), &mut closure)?;
        }
        self.ancestors = closure;
        Ok(())
    }

    pub fn axioms(&self) -> &[SourcedFormula] {
        &self.axioms
    }

    pub fn signature(&self, name: &str) -> Option<&Signature> {
        self.signatures.get(name)
    }

    pub fn signatures(&self) -> impl Iterator<Item = &Signature> {
        self.signatures.values()
    }

    /// Register a synthesized signature (used for suffixed variants).
    pub fn add_signature(&mut self, sig: Signature) {
        self.signatures.insert(sig.name.clone(), sig);
    }

    pub fn extended_to_quantities(&self) -> &BTreeSet<String> {
        &self.extended_to_quantities
    }

    pub fn is_extended_to_quantities(&self, relation: &str) -> bool {
        self.extended_to_quantities.contains(relation)
    }

    pub fn knows_type(&self, t: &str) -> bool {
        self.types.contains(t)
    }

    pub fn types(&self) -> impl Iterator<Item = &String> {
        self.types.iter()
    }

    pub fn direct_parents(&self, t: &str) -> impl Iterator<Item = &String> {
        self.parents.get(t).into_iter().flatten()
    }

    pub fn classes_of(&self, constant: &str) -> impl Iterator<Item = &String> {
        self.instance_of.get(constant).into_iter().flatten()
    }

    /// Narrowest numeric class `constant` is asserted to be an instance of.
    pub fn numeric_constant_type(&self, constant: &str) -> Option<String> {
        self.classes_of(constant).filter(|c| self.is_real_like(c)).fold(None, |acc, c| match acc {
            None => Some(c.clone()),
            Some(a) => Some(self.meet_numeric(&a, c)),
        })
    }

    /// Constants asserted (directly or via a subclass) to be instances of `class`.
    pub fn instances_of(&self, class: &str) -> BTreeSet<String> {
        self.instance_of
            .iter()
            .filter(|(_, cs)| cs.iter().any(|c| self.is_sub(c, class)))
            .map(|(i, _)| i.clone())
            .collect()
    }

    /// Reflexive-transitive subclass test; unknown names are an error.
    pub fn is_subclass_of(&self, child: &str, ancestor: &str) -> Result<bool, KbError> {
        for t in [child, ancestor] {
            if !self.knows_type(t) {
                return Err(KbError::UnknownType(t.to_string()));
            }
        }
        Ok(self.is_sub(child, ancestor))
    }

    /// Total variant of [`Self::is_subclass_of`]: unknown types are related
    /// only to themselves and to `Entity`.
    pub fn is_sub(&self, child: &str, ancestor: &str) -> bool {
        child == ancestor
            || ancestor == ENTITY
            || self.ancestors.get(child).is_some_and(|a| a.contains(ancestor))
    }

    pub fn ancestors_of(&self, t: &str) -> BTreeSet<String> {
        let mut a = self.ancestors.get(t).cloned().unwrap_or_else(|| BTreeSet::from([t.to_string()]));
        a.insert(ENTITY.to_string());
        a
    }

    pub fn numeric_class(&self, t: &str) -> SumoNumericClass {
        if self.is_sub(t, INTEGER) {
            SumoNumericClass::IntegerLike
        } else if self.is_sub(t, RATIONAL) {
            SumoNumericClass::RationalLike
        } else if self.is_sub(t, REAL) {
            SumoNumericClass::RealLike
        } else if self.is_sub(t, QUANTITY) {
            SumoNumericClass::QuantityLike
        } else {
            SumoNumericClass::NonNumeric
        }
    }

    pub fn is_quantity_like(&self, t: &str) -> bool {
        self.is_sub(t, QUANTITY)
    }

    /// Below RealNumber (inclusive): has a numeric TFF sort.
    pub fn is_real_like(&self, t: &str) -> bool {
        self.is_sub(t, REAL)
    }

    /// `Quantity` or `Number`: could denote either a plain number or a
    /// quantity with units.
    pub fn is_ambiguous_quantity(&self, t: &str) -> bool {
        t != REAL && self.is_sub(t, QUANTITY) && self.is_sub(REAL, t)
    }

    /// Below Quantity but outside the Number branch.
    pub fn is_physical_quantity(&self, t: &str) -> bool {
        self.is_sub(t, QUANTITY) && !self.is_sub(t, NUMBER) && !self.is_sub(REAL, t)
    }

    /// A numeric class strictly below one of the three TFF number sorts.
    pub fn is_proper_numeric_subtype(&self, t: &str) -> bool {
        self.is_real_like(t) && ![INTEGER, RATIONAL, REAL].contains(&t)
    }

    /// Most specific common ancestor. Among several minimal candidates the
    /// deepest (then alphabetically first) wins.
    pub fn common_ancestor(&self, a: &str, b: &str) -> String {
        let aa = self.ancestors_of(a);
        let bb = self.ancestors_of(b);
        let common: Vec<&String> = aa.intersection(&bb).collect();
        let minimal: Vec<&String> = common
            .iter()
            .copied()
            .filter(|c| !common.iter().any(|d| d != c && self.is_sub(d, c)))
            .collect();
        minimal
            .into_iter()
            .max_by(|x, y| {
                let dx = self.ancestors_of(x).len();
                let dy = self.ancestors_of(y).len();
                dx.cmp(&dy).then_with(|| y.cmp(x))
            })
            .cloned()
            .unwrap_or_else(|| ENTITY.to_string())
    }

    /// The more specific of two comparable types, else `None`.
    pub fn narrower(&self, a: &str, b: &str) -> Option<String> {
        if self.is_sub(a, b) {
            Some(a.to_string())
        } else if self.is_sub(b, a) {
            Some(b.to_string())
        } else {
            None
        }
    }

    /// Lowest common type of two comparison operands. A RealNumber or
    /// RationalNumber operand is never narrowed by an integer-like one;
    /// incomparable types meet at their most specific common ancestor.
    pub fn meet_numeric(&self, t1: &str, t2: &str) -> String {
        let int_like = |t: &str| self.is_sub(t, INTEGER);
        for wide in [REAL, RATIONAL] {
            if (t1 == wide && int_like(t2)) || (t2 == wide && int_like(t1)) {
                return wide.to_string();
            }
        }
        self.narrower(t1, t2).unwrap_or_else(|| self.common_ancestor(t1, t2))
    }

    /// TFF-representable base a numeric type is promoted to. Integer wins
    /// over RealNumber for multiply-inherited classes.
    pub fn promotion_target(&self, t: &str) -> String {
        if self.is_sub(t, INTEGER) {
            INTEGER.to_string()
        } else if self.is_sub(t, RATIONAL) {
            RATIONAL.to_string()
        } else if self.is_sub(t, REAL) {
            REAL.to_string()
        } else {
            t.to_string()
        }
    }

    /// True when `name` denotes a function: declared range, or SUMO's `Fn` naming.
    pub fn is_function(&self, name: &str) -> bool {
        self.signatures.get(name).map_or(name.ends_with("Fn"), |s| s.is_function() || name.ends_with("Fn"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::kif::parse_kif;

    fn kb() -> KnowledgeBase {
        bundled::background_kb().unwrap()
    }

    #[test]
    fn signature_from_domain_and_range() {
        let src = parse_kif("(domain RemainderFn 1 Quantity) (domain RemainderFn 2 Quantity) (range RemainderFn Quantity)").unwrap();
        let kb = load_kb(&src).unwrap();
        let sig = kb.signature("RemainderFn").unwrap();
        assert_eq!(sig.arg_types.iter().map(|a| a.ty.as_str()).collect::<Vec<_>>(), ["Quantity", "Quantity"]);
        assert_eq!(sig.range_type.as_ref().unwrap().ty, "Quantity");
        assert!(kb.axioms().is_empty());
    }

    #[test]
    fn extended_to_quantities_indexed() {
        let kb = load_kb(&parse_kif("(instance lessThanOrEqualTo RelationExtendedToQuantities)").unwrap()).unwrap();
        assert!(kb.is_extended_to_quantities("lessThanOrEqualTo"));
    }

    #[test]
    fn empty_input_is_fine() {
        let kb = load_kb(&[]).unwrap();
        assert!(kb.axioms().is_empty());
        assert_eq!(kb.signatures().count(), 0);
    }

    #[test]
    fn cycle_is_reported() {
        let e = load_kb(&parse_kif("(subclass A B) (subclass B C) (subclass C A)").unwrap()).unwrap_err();
        match e {
            KbError::SubclassCycle(c) => {
                assert_eq!(c.first(), c.last());
                assert_eq!(c.len(), 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn conflicting_domain_rejected() {
        let e = load_kb(&parse_kif("(domain p 1 Integer) (domain p 1 RealNumber)").unwrap()).unwrap_err();
        assert!(matches!(e, KbError::ConflictingDomain { position: 1, .. }));
    }

    #[test]
    fn subclass_queries() {
        let kb = kb();
        assert!(kb.is_subclass_of("EvenInteger", "Integer").unwrap());
        assert!(kb.is_subclass_of("Integer", "Integer").unwrap());
        assert!(kb.is_subclass_of("PositiveInteger", "NonnegativeRealNumber").unwrap());
        assert!(!kb.is_subclass_of("RealNumber", "Integer").unwrap());
        assert_eq!(kb.is_subclass_of("Nope", "Integer"), Err(KbError::UnknownType("Nope".into())));
    }

    #[test]
    fn meet_examples() {
        let kb = kb();
        assert_eq!(kb.meet_numeric("Quantity", "RealNumber"), "RealNumber");
        assert_eq!(kb.meet_numeric("RealNumber", "Integer"), "RealNumber");
        assert_eq!(kb.meet_numeric("Integer", "RealNumber"), "RealNumber");
        assert_eq!(kb.meet_numeric("EvenInteger", "OddInteger"), "Integer");
        assert_eq!(kb.meet_numeric("Quantity", "NegativeInteger"), "NegativeInteger");
        assert_eq!(kb.meet_numeric("EvenInteger", "RationalNumber"), "RationalNumber");
    }

    #[test]
    fn promotion_examples() {
        let kb = kb();
        assert_eq!(kb.promotion_target("NegativeInteger"), "Integer");
        assert_eq!(kb.promotion_target("PositiveInteger"), "Integer");
        assert_eq!(kb.promotion_target("PositiveRealNumber"), "RealNumber");
        assert_eq!(kb.promotion_target("RationalNumber"), "RationalNumber");
        assert_eq!(kb.promotion_target("RealNumber"), "RealNumber");
        assert_eq!(kb.promotion_target("Quantity"), "Quantity");
    }

    #[test]
    fn numeric_classes_are_cumulative() {
        let kb = kb();
        assert_eq!(kb.numeric_class("PrimeNumber"), SumoNumericClass::IntegerLike);
        assert_eq!(kb.numeric_class("RationalNumber"), SumoNumericClass::RationalLike);
        assert_eq!(kb.numeric_class("NonnegativeRealNumber"), SumoNumericClass::RealLike);
        assert_eq!(kb.numeric_class("TimeDuration"), SumoNumericClass::QuantityLike);
        assert_eq!(kb.numeric_class("Object"), SumoNumericClass::NonNumeric);
        assert!(kb.is_ambiguous_quantity("Number"));
        assert!(kb.is_ambiguous_quantity("Quantity"));
        assert!(!kb.is_ambiguous_quantity("RealNumber"));
        assert!(kb.is_physical_quantity("TimeDuration"));
    }
}
