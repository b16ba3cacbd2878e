//! SUO-KIF to TFF0 translation with native arithmetic.

pub mod bundled;
pub mod check;
pub mod cli;
pub mod diag;
pub mod emit;
pub mod formula;
pub mod infer;
pub mod kb;
pub mod kif;
pub mod numeric;
pub mod pipeline;
pub mod preprocess;
pub mod prover;
pub mod rename;
pub mod tff;
pub mod tff_parse;

pub use formula::{Formula, Source, SourcedFormula};
pub use kb::{load_kb, KbError, KnowledgeBase, SumoNumericClass};
pub use kif::{parse_formula, parse_kif, parse_kif_named, print_kif, ParseError};
