//! Background ontology shipped with the translator: the Quantity hierarchy,
//! core relation signatures and the SUMO number definitions.

use crate::formula::SourcedFormula;
use crate::kb::{load_kb, KbError, KnowledgeBase};
use crate::kif::parse_kif_named;

pub const FILES: &[(&str, &str)] = &[
    ("quantity_hierarchy.kif", include_str!("../fixtures/quantity_hierarchy.kif")),
    ("core_signatures.kif", include_str!("../fixtures/core_signatures.kif")),
    ("number_defs.kif", include_str!("../fixtures/number_defs.kif")),
];

pub fn background_axioms() -> Vec<SourcedFormula> {
    FILES
        .iter()
        .flat_map(|(name, text)| parse_kif_named(text, name).expect("bundled ontology parses"))
        .collect()
}

pub fn background_kb() -> Result<KnowledgeBase, KbError> {
    load_kb(&background_axioms())
}
