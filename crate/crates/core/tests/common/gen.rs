//! Random formulas for the property suites.

use num_bigint::BigInt;
use proptest::prelude::*;
use sumo_tff::formula::{Connective, Formula, Head, Quantifier};
use sumo_tff::tff::{TffFormula, TffQuant, TffSort, TffTerm};

/// Extra signatures the pipeline fuzzer draws on.
pub const FUZZ_VOCAB: &str = "
(domain pInt 1 Integer)
(domain pReal 1 RealNumber)
(domain pPos 1 PositiveInteger)
(domain pRat 1 RationalNumber)
(domain pNonneg 1 NonnegativeRealNumber)
(domain pObj 1 Object)
(instance Robot1 Object)
(instance MyCar Object)
(instance Seven PositiveInteger)
(instance Half PositiveRealNumber)
";

const KIF_SYMS: &[&str] = &["Robot1", "MyCar", "Micrometer", "Integer", "Foo_Bar", "x-1"];
const KIF_HEADS: &[&str] = &["p", "q", "AdditionFn", "MeasureFn", "greaterThan", "instance"];
const VARS: &[&str] = &["X", "Y", "Z", "NUMBER1"];

fn pick(xs: &'static [&'static str]) -> impl Strategy<Value = String> {
    proptest::sample::select(xs).prop_map(str::to_string)
}

fn kif_term() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        pick(VARS).prop_map(Formula::Var),
        pick(KIF_SYMS).prop_map(Formula::Sym),
        (-1000i64..1000).prop_map(|i| Formula::Int(BigInt::from(i))),
        (-99i64..99, 1u32..99).prop_map(|(a, b)| Formula::Real(format!("{a}.{b}"))),
        "[a-z ]{0,8}".prop_map(Formula::Str),
        pick(VARS).prop_map(Formula::RowVar),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        (pick(KIF_HEADS), prop::collection::vec(inner, 1..4))
            .prop_map(|(h, args)| Formula::Apply { head: Head::Const(h), args })
    })
}

fn kif_atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        (pick(KIF_HEADS), prop::collection::vec(kif_term(), 1..4))
            .prop_map(|(h, args)| Formula::Apply { head: Head::Const(h), args }),
        (pick(VARS), prop::collection::vec(kif_term(), 1..3)).prop_map(|(v, args)| Formula::Apply { head: Head::Var(v), args }),
    ]
}

/// Arbitrary well-formed KIF sentences.
pub fn kif_formula() -> impl Strategy<Value = Formula> {
    kif_atom().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Formula::conn(Connective::Not, vec![a])),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Formula::conn(Connective::And, v)),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Formula::conn(Connective::Or, v)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::conn(Connective::Iff, vec![a, b])),
            (prop::bool::ANY, prop::sample::subsequence(VARS, 1..3), inner).prop_map(|(all, vs, b)| Formula::Quant {
                kind: if all { Quantifier::Forall } else { Quantifier::Exists },
                vars: vs.into_iter().map(String::from).collect(),
                body: Box::new(b),
            }),
        ]
    })
}

fn tff_term() -> impl Strategy<Value = TffTerm> {
    let leaf = prop_oneof![
        pick(&["V__X", "V__Y", "X0"]).prop_map(TffTerm::Var),
        pick(&["s__a", "s__Robot1", "c"]).prop_map(|c| TffTerm::App(c, vec![])),
        (-500i64..500).prop_map(|i| TffTerm::Int(i.to_string())),
        (-50i64..50, 1i64..9).prop_map(|(a, b)| TffTerm::Rat(format!("{a}/{b}"))),
        (-50i64..50, 1u32..99).prop_map(|(a, b)| TffTerm::Real(format!("{a}.{b}"))),
    ];
    leaf.prop_recursive(3, 10, 3, |inner| {
        (pick(&["s__f", "$sum", "$to_real", "g"]), prop::collection::vec(inner, 1..3)).prop_map(|(f, a)| TffTerm::App(f, a))
    })
}

fn tff_sort() -> impl Strategy<Value = Option<TffSort>> {
    prop_oneof![
        Just(None),
        Just(Some(TffSort::Int)),
        Just(Some(TffSort::Rat)),
        Just(Some(TffSort::Real)),
        Just(Some(TffSort::Individual)),
    ]
}

/// Arbitrary TFF formulas (not necessarily well sorted).
pub fn tff_formula() -> impl Strategy<Value = TffFormula> {
    let atom = prop_oneof![
        (pick(&["s__p", "$less", "q"]), prop::collection::vec(tff_term(), 1..3)).prop_map(|(p, a)| TffFormula::Pred(p, a)),
        (tff_term(), tff_term()).prop_map(|(a, b)| TffFormula::Eq(a, b)),
        (tff_term(), tff_term()).prop_map(|(a, b)| TffFormula::Neq(a, b)),
        Just(TffFormula::True),
        Just(TffFormula::False),
    ];
    atom.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| TffFormula::Not(Box::new(a))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(TffFormula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(TffFormula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TffFormula::Implies(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TffFormula::Iff(Box::new(a), Box::new(b))),
            (prop::bool::ANY, prop::collection::vec((pick(&["V__X", "V__Y", "X0"]), tff_sort()), 1..3), inner).prop_map(
                |(all, vs, b)| TffFormula::Quant(if all { TffQuant::Forall } else { TffQuant::Exists }, vs, Box::new(b))
            ),
        ]
    })
}

const NUM_VARS: &[&str] = &["N1", "N2", "N3"];
const OBJ_VARS: &[&str] = &["A", "B"];
const UNITS: &[&str] = &["Micrometer", "KelvinDegree", "PoundMass"];
const NUM_TYPES: &[&str] = &[
    "Integer",
    "PositiveInteger",
    "NegativeInteger",
    "NonnegativeInteger",
    "EvenInteger",
    "OddInteger",
    "PrimeNumber",
    "PositiveRealNumber",
    "NegativeRealNumber",
    "NonnegativeRealNumber",
    "RationalNumber",
    "RealNumber",
];

fn num_term() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        3 => pick(NUM_VARS).prop_map(Formula::Var),
        1 => (-5i64..20).prop_map(Formula::int),
        1 => pick(&["2.5", "0.5", "-1.25"]).prop_map(Formula::Real),
        1 => pick(&["Seven", "Half"]).prop_map(Formula::Sym),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (pick(&["AdditionFn", "SubtractionFn", "MultiplicationFn", "DivisionFn", "RemainderFn"]), inner.clone(), inner.clone())
                .prop_map(|(f, a, b)| Formula::app(&f, vec![a, b])),
            (pick(&["SignumFn", "FloorFn", "CeilingFn"]), inner).prop_map(|(f, a)| Formula::app(&f, vec![a])),
        ]
    })
}

fn obj_term() -> impl Strategy<Value = Formula> {
    prop_oneof![pick(OBJ_VARS).prop_map(Formula::Var), pick(&["Robot1", "MyCar"]).prop_map(Formula::Sym)]
}

fn measure_term() -> impl Strategy<Value = Formula> {
    (num_term(), pick(UNITS)).prop_map(|(n, u)| Formula::app("MeasureFn", vec![n, Formula::Sym(u)]))
}

fn pipeline_atom() -> impl Strategy<Value = Formula> {
    let cmp = || pick(&["greaterThan", "lessThan", "greaterThanOrEqualTo", "lessThanOrEqualTo", "equal"]);
    prop_oneof![
        3 => (cmp(), num_term(), num_term()).prop_map(|(c, a, b)| Formula::app(&c, vec![a, b])),
        2 => (pick(NUM_VARS), pick(NUM_TYPES)).prop_map(|(v, t)| Formula::app("instance", vec![Formula::Var(v), Formula::Sym(t)])),
        1 => (obj_term(), measure_term()).prop_map(|(o, m)| Formula::app("measure", vec![o, m])),
        1 => (obj_term(), obj_term()).prop_map(|(a, b)| Formula::app("part", vec![a, b])),
        1 => obj_term().prop_map(|a| Formula::app("pObj", vec![a])),
        2 => (pick(&["pInt", "pReal", "pPos", "pRat", "pNonneg"]), num_term()).prop_map(|(p, n)| Formula::app(&p, vec![n])),
        1 => (cmp(), measure_term(), measure_term()).prop_map(|(c, a, b)| Formula::app(&c, vec![a, b])),
    ]
}

/// KIF axioms over the shared test vocabulary plus `FUZZ_VOCAB`.
pub fn pipeline_formula() -> impl Strategy<Value = Formula> {
    pipeline_atom().prop_recursive(3, 12, 3, |inner| {
        let vars = prop::sample::subsequence(&["N1", "N2", "N3", "A", "B"][..], 1..3);
        prop_oneof![
            inner.clone().prop_map(|a| Formula::conn(Connective::Not, vec![a])),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Formula::conn(Connective::And, v)),
            prop::collection::vec(inner.clone(), 2..3).prop_map(|v| Formula::conn(Connective::Or, v)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::conn(Connective::Iff, vec![a, b])),
            (prop::bool::ANY, vars, inner).prop_map(|(all, vs, b)| Formula::Quant {
                kind: if all { Quantifier::Forall } else { Quantifier::Exists },
                vars: vs.into_iter().map(String::from).collect(),
                body: Box::new(b),
            }),
        ]
    })
}
