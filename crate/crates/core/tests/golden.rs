mod common;

use common::*;
use sumo_tff::infer::infer;
use sumo_tff::numeric::{inject_antecedent_constraints, replace_instance_literals};
use sumo_tff::{parse_formula, parse_kif_named};

#[test]
fn particulate_matter() {
    reference_matches("particulate").unwrap();
}

#[test]
fn desert_uses_sumo_comparison() {
    reference_matches("desert").unwrap();
    let t = translate_snippet("desert.kif", &fixture("reference/desert.kif"));
    assert_eq!(formulas_from(&t, "desert.kif").len(), 1);
}

#[test]
fn remainder_real_version() {
    reference_matches("remainder").unwrap();
}

#[test]
fn pure_substance() {
    reference_matches("pure_substance").unwrap();
}

#[test]
fn liquid_drop_forward() {
    reference_matches("liquid_drop").unwrap();
    let t = translate_snippet("liquid_drop.kif", &fixture("reference/liquid_drop.kif"));
    assert_eq!(formulas_from(&t, "liquid_drop.kif").len(), 2);
}

#[test]
fn ceiling_coercion() {
    reference_matches("ceiling").unwrap();
}

fn stage_two(name: &str) -> (sumo_tff::Formula, sumo_tff::Formula, sumo_tff::pipeline::Translator) {
    let axioms = parse_kif_named(&fixture(&format!("reference/{name}.kif")), name).unwrap();
    let tr = translator_for(&axioms);
    let want = parse_formula(&fixture(&format!("reference/{name}.stage2.kif"))).unwrap();
    (axioms[0].formula.clone(), want, tr)
}

#[test]
fn week_guard_all_stages() {
    let (f, want, tr) = stage_two("week");
    let env = infer(tr.kb(), &f).env().clone();
    let (guarded, diags) = inject_antecedent_constraints(tr.definitional_table(), &f, &env.promotions);
    assert!(diags.is_empty());
    assert_eq!(guarded, want);
    reference_matches("week").unwrap();
}

#[test]
fn richter_consequent_all_stages() {
    let (f, want, tr) = stage_two("richter");
    let (replaced, diags) = replace_instance_literals(tr.kb(), tr.definitional_table(), &f, true);
    assert!(diags.is_empty());
    assert_eq!(replaced, want);
    reference_matches("richter").unwrap();
}

#[test]
fn uncoerced_ceiling_reference_is_ill_sorted() {
    let text = format!(
        "tff(d, type, s__CeilingFn__0In1ReFn: $real > $int).\ntff(a, axiom, {}).",
        fixture("reference/ceiling.tff").trim()
    );
    let d = sumo_tff::check::check_tff_text(&text, &Default::default()).unwrap();
    assert_eq!(d.iter().filter(|d| d.is_error()).count(), 1);
}
