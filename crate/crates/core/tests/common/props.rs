//! Property checks shared by the property tests and the acceptance report.

use super::gen::{kif_formula, pipeline_formula, tff_formula, FUZZ_VOCAB};
use super::*;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use std::collections::BTreeSet;
use sumo_tff::check::check_tff_text;
use sumo_tff::formula::{Connective, Formula};
use sumo_tff::infer::infer;
use sumo_tff::kb::KnowledgeBase;
use sumo_tff::pipeline::TranslateOptions;
use sumo_tff::tff::{write_formula, TffFormula, TffTerm};
use sumo_tff::tff_parse::parse_tff_formula;
use sumo_tff::{bundled, parse_formula, print_kif};

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

/// KIF print/parse round trip.
pub fn kif_round_trip(cases: u32) -> Result<(), String> {
    run(cases, kif_formula(), |f| {
        let text = print_kif(&f);
        let back = parse_formula(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        if back != f {
            return Err(TestCaseError::fail(format!("{text} reparsed as {}", print_kif(&back))));
        }
        Ok(())
    })
}

/// TFF print/parse round trip.
pub fn tff_round_trip(cases: u32) -> Result<(), String> {
    run(cases, tff_formula(), |f| {
        let mut text = String::new();
        write_formula(&mut text, &f);
        let back = parse_tff_formula(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e:?}")))?;
        if back != f {
            return Err(TestCaseError::fail(format!("{text} reparsed as {back:?}")));
        }
        Ok(())
    })
}

pub struct FuzzPipeline {
    pub translator: sumo_tff::pipeline::Translator,
}

impl FuzzPipeline {
    pub fn new() -> Self {
        let mut user = vocabulary();
        user.extend(parse_kif_named(FUZZ_VOCAB, "fuzz_vocab.kif").unwrap());
        FuzzPipeline { translator: Translator::new(&user, TranslateOptions { jobs: 1, ..TranslateOptions::default() }).unwrap() }
    }
}

fn tff_instance_of_subtype(kb: &KnowledgeBase, f: &TffFormula) -> Option<String> {
    let mut found = None;
    visit(f, &mut |g| {
        if let TffFormula::Pred(p, args) = g {
            if p == "s__instance" && args.len() == 2 {
                if let TffTerm::App(c, a) = &args[1] {
                    let class = c.trim_start_matches("s__");
                    if a.is_empty() && kb.is_proper_numeric_subtype(class) {
                        found = Some(class.to_string());
                    }
                }
            }
        }
    });
    found
}

fn visit(f: &TffFormula, k: &mut impl FnMut(&TffFormula)) {
    k(f);
    match f {
        TffFormula::Not(a) | TffFormula::Quant(_, _, a) => visit(a, k),
        TffFormula::And(ps) | TffFormula::Or(ps) => ps.iter().for_each(|p| visit(p, k)),
        TffFormula::Implies(a, b) | TffFormula::Iff(a, b) => {
            visit(a, k);
            visit(b, k);
        }
        _ => {}
    }
}

/// Problems reaching `t`'s output: checker errors, or a surviving
/// instance literal over a numeric subtype.
pub fn output_problems(kb: &KnowledgeBase, t: &Translation) -> Vec<String> {
    let mut out = Vec::new();
    match t.to_tff() {
        Err(e) => out.push(format!("emit failed: {e}")),
        Ok(text) => match check_tff_text(&text, &Default::default()) {
            Err(e) => out.push(format!("output does not parse: {e:?}\n{text}")),
            Ok(diags) => {
                out.extend(diags.iter().filter(|d| d.is_error()).map(|d| format!("{d}\n{text}")));
            }
        },
    }
    for u in &t.axioms {
        if let UnitBody::Formula(f) = &u.body {
            if let Some(c) = tff_instance_of_subtype(kb, f) {
                out.push(format!("{}: instance of {c} survives", u.name));
            }
        }
    }
    out
}

/// Every translation of random axioms emits a checker-clean file free of
/// numeric-subtype instance literals.
pub fn pipeline_closure(cases: u32) -> Result<(), String> {
    let fp = FuzzPipeline::new();
    let kb = fp.translator.kb().clone();
    run(cases, proptest::collection::vec(pipeline_formula(), 1..4), |fs| {
        let text: String = fs.iter().map(|f| print_kif(f) + "\n").collect();
        let axioms = parse_kif_named(&text, "fuzz.kif").map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        let t = fp.translator.translate(&axioms);
        let problems = output_problems(&kb, &t);
        if problems.is_empty() {
            Ok(())
        } else {
            Err(TestCaseError::fail(format!("input:\n{text}\n{}", problems.join("\n"))))
        }
    })
}

/// promotion_target is idempotent and meet_numeric commutative on every
/// pair of quantity types in the bundled hierarchy.
pub fn hierarchy_laws() -> Result<(), String> {
    let kb = bundled::background_kb().map_err(|e| e.to_string())?;
    let types: Vec<String> = kb.types().filter(|t| kb.is_quantity_like(t)).cloned().collect();
    if types.len() < 20 {
        return Err(format!("only {} quantity types", types.len()));
    }
    for t in &types {
        let p = kb.promotion_target(t);
        if kb.promotion_target(&p) != p {
            return Err(format!("promotion of {t} not idempotent"));
        }
        if kb.meet_numeric(t, t) != *t {
            return Err(format!("meet({t},{t}) != {t}"));
        }
        for u in &types {
            if kb.meet_numeric(t, u) != kb.meet_numeric(u, t) {
                return Err(format!("meet({t},{u}) not commutative"));
            }
        }
    }
    Ok(())
}

fn shuffle_conjuncts(f: &Formula, rng: &mut rand::rngs::StdRng) -> Formula {
    match f {
        Formula::Conn { kind, args } => {
            let mut args: Vec<Formula> = args.iter().map(|a| shuffle_conjuncts(a, rng)).collect();
            if matches!(kind, Connective::And | Connective::Or) {
                args.shuffle(rng);
            }
            Formula::Conn { kind: *kind, args }
        }
        Formula::Quant { kind, vars, body } => {
            Formula::Quant { kind: *kind, vars: vars.clone(), body: Box::new(shuffle_conjuncts(body, rng)) }
        }
        other => other.clone(),
    }
}

/// All reference inputs plus the Robot-small fixture.
pub fn golden_corpus() -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> =
        REFERENCE_CASES.iter().map(|n| (format!("{n}.kif"), fixture(&format!("reference/{n}.kif")))).collect();
    files.push(("robot_small.kif".into(), fixture("robot_small.kif")));
    files
}

/// Inferred variable types do not depend on conjunct order, and the set of
/// translated formulas does not depend on axiom order or worker count.
pub fn inference_determinism(rounds: u64) -> Result<(), String> {
    let mut axioms = Vec::new();
    for (name, text) in golden_corpus() {
        axioms.extend(parse_kif_named(&text, &name).map_err(|e| e.to_string())?);
    }
    let tr = translator_for(&axioms);
    let kb = tr.kb();
    let baseline = tr.translate(&axioms);
    let bodies = |t: &Translation| -> BTreeSet<String> {
        t.axioms
            .iter()
            .filter_map(|u| match &u.body {
                UnitBody::Formula(f) => {
                    let mut s = String::new();
                    write_formula(&mut s, f);
                    Some(s)
                }
                UnitBody::Decl(..) => None,
            })
            .collect()
    };
    let want = bodies(&baseline);
    for seed in 0..rounds {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for sf in &axioms {
            let a = infer(kb, &sf.formula).env().var_types.clone();
            let b = infer(kb, &shuffle_conjuncts(&sf.formula, &mut rng)).env().var_types.clone();
            if a != b {
                return Err(format!("{}: types differ after shuffling conjuncts", sf.source));
            }
        }
        let mut shuffled = axioms.clone();
        shuffled.shuffle(&mut rng);
        let opts = TranslateOptions { jobs: 1 + (seed as usize % 4), ..TranslateOptions::default() };
        let mut user = vocabulary();
        user.extend(shuffled.iter().cloned());
        let t = Translator::new(&user, opts).map_err(|e| e.to_string())?.translate(&shuffled);
        if bodies(&t) != want {
            return Err(format!("seed {seed}: translation depends on axiom order"));
        }
        if baseline.to_tff().ok() != tr.translate(&axioms).to_tff().ok() {
            return Err("repeated translation is not byte-identical".into());
        }
    }
    Ok(())
}
