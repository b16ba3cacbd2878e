//! End-to-end translation of a KIF knowledge base into a TFF problem.

use crate::bundled;
use crate::diag::{Diagnostic, Severity};
use crate::emit::{axiom_unit, builtin_bases, emit_file, Declarations, EmitError, EmitOptions, Emitter};
use crate::formula::{Connective, Formula, Quantifier, Source, SourcedFormula};
use crate::infer::{infer, infer_seeded, promote_integer_literals, SubtypeRecord};
use crate::kb::{load_kb, ArgType, KbError, KnowledgeBase, Signature};
use crate::kif::{parse_kif_named, ParseError};
use crate::numeric::{
    build_definitional_table, definition_parts, inject_antecedent_constraints, is_table_type, replace_instance_literals,
    DefinitionalTable,
};
use crate::preprocess::{exclude_unsupported, instantiate_predicate_variables, rewrite_quantity_arithmetic, ExclusionPolicy};
use crate::rename::{SignatureVariant, copy_axioms_for_renamed_terms, double_axiom, generate_signature_variants, rename_numeric_relations, RenameTable};
use crate::tff::{Role, TffUnit};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Relations whose ground facts only feed the signature index.
const ABSORBED: &[&str] = &["domain", "domainSubclass", "range", "rangeSubclass", "documentation", "format", "termFormat"];

#[derive(Debug, Clone)]
pub struct TranslateOptions {
    /// Unit names are `kb_<kb_name>_<n>`.
    pub kb_name: String,
    pub exclusion: ExclusionPolicy,
    /// Register every numeric variant of each signature used, not only the
    /// ones occurring in axioms.
    pub exhaustive_variants: bool,
    pub emit: EmitOptions,
    /// Worker threads for per-axiom work; 0 lets the pool decide.
    pub jobs: usize,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            kb_name: "SUMO".into(),
            exclusion: ExclusionPolicy::default(),
            exhaustive_variants: false,
            emit: EmitOptions::default(),
            jobs: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("{file}: {error}")]
    Parse { file: String, error: ParseError },
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Emit(#[from] EmitError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub axioms_in: usize,
    pub axioms_out: usize,
    pub doubled: usize,
    pub dropped: usize,
    pub variants: usize,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "axioms in: {}, axioms out: {}, doubled: {}, dropped: {}, variants: {}",
            self.axioms_in, self.axioms_out, self.doubled, self.dropped, self.variants
        )
    }
}

#[derive(Debug, Clone)]
pub struct Translation {
    pub axioms: Vec<TffUnit>,
    pub declarations: Declarations,
    pub diagnostics: Vec<Diagnostic>,
    pub renames: RenameTable,
    pub summary: Summary,
}

impl Translation {
    pub fn to_tff(&self) -> Result<String, EmitError> {
        emit_file(&self.declarations, &self.axioms)
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

#[derive(Debug, Default)]
struct Outcome {
    formulas: Vec<(crate::tff::TffFormula, Role)>,
    decls: Declarations,
    table: RenameTable,
    diags: Vec<Diagnostic>,
    dropped: bool,
    doubled: bool,
}

impl Outcome {
    fn drop_with(mut self, d: Diagnostic) -> Outcome {
        self.diags.push(d);
        self.dropped = true;
        self.formulas.clear();
        self
    }
}

fn sourced(mut diags: Vec<Diagnostic>, src: &Source) -> Vec<Diagnostic> {
    for d in &mut diags {
        if d.source.is_none() {
            d.source = Some(src.clone());
        }
    }
    diags
}

fn higher_order(f: &Formula) -> bool {
    let mut found = false;
    f.walk(&mut |_, n| {
        if let Formula::Apply { args, .. } = n {
            found |= args.iter().any(|a| matches!(a, Formula::Conn { .. } | Formula::Quant { .. }));
        }
    });
    found
}

fn absorbed(f: &Formula) -> bool {
    f.head_const().is_some_and(|h| ABSORBED.contains(&h))
}

/// Guards for promoted variables: free ones wrap the axiom, bound ones go
/// directly under their quantifier.
fn inject_guards(table: &DefinitionalTable, f: &Formula, records: &[SubtypeRecord]) -> (Formula, Vec<Diagnostic>) {
    let free: BTreeSet<String> = f.free_vars().into_iter().collect();
    let (top, inner): (Vec<_>, Vec<_>) = records.iter().cloned().partition(|r| free.contains(&r.var));
    let mut diags = Vec::new();
    fn go(table: &DefinitionalTable, node: &Formula, inner: &[SubtypeRecord], diags: &mut Vec<Diagnostic>) -> Formula {
        match node {
            Formula::Quant { kind, vars, body } => {
                let mut b = go(table, body, inner, diags);
                let mut guards = Vec::new();
                for v in vars {
                    for r in inner.iter().filter(|r| &r.var == v) {
                        match table.instantiate(&r.subtype, &Formula::var(v)) {
                            Some(g) => guards.push(g),
                            None => diags.push(Diagnostic::warning(None, format!("no defining condition for {}; ?{v} left unguarded", r.subtype))),
                        }
                    }
                }
                if let Some(g) = Formula::and_of(guards) {
                    b = match kind {
                        Quantifier::Forall => Formula::implies(g, b),
                        Quantifier::Exists => Formula::conn(Connective::And, vec![g, b]),
                    };
                }
                Formula::Quant { kind: *kind, vars: vars.clone(), body: Box::new(b) }
            }
            Formula::Conn { kind, args } => {
                Formula::Conn { kind: *kind, args: args.iter().map(|a| go(table, a, inner, diags)).collect() }
            }
            other => other.clone(),
        }
    }
    let body = go(table, f, &inner, &mut diags);
    let (out, more) = inject_antecedent_constraints(table, &body, &top);
    diags.extend(more);
    (out, diags)
}

/// Variables typed by an `(instance ?v T)` literal with T a numeric subtype;
/// their constraint survives as the literal's replacement.
fn instance_typed(kb: &KnowledgeBase, f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    f.walk(&mut |_, n| {
        if let Formula::Apply { args, .. } = n {
            if n.head_const() == Some("instance") && args.len() == 2 {
                if let (Formula::Var(v), Formula::Sym(t)) = (&args[0], &args[1]) {
                    if is_table_type(kb, t) {
                        out.insert(v.clone());
                    }
                }
            }
        }
    });
    out
}

/// Variant signature that keeps the base's numeric subtype wherever it
/// promotes to the variant's sort, so guards still apply to copies.
fn variant_signature(kb: &KnowledgeBase, v: &SignatureVariant) -> Signature {
    let base = kb.signature(&v.base_name);
    let mut sig = v.signature(base, 0);
    let Some(b) = base else { return sig };
    let keep = |ours: &mut ArgType, theirs: Option<&ArgType>| {
        if let Some(t) = theirs.filter(|t| !t.class_marker && kb.promotion_target(&t.ty) == ours.ty) {
            *ours = t.clone();
        }
    };
    for (i, a) in sig.arg_types.iter_mut().enumerate() {
        keep(a, b.arg(i + 1));
    }
    if let Some(r) = sig.range_type.as_mut() {
        keep(r, b.range_type.as_ref());
    }
    sig
}

pub struct Translator {
    kb: KnowledgeBase,
    table: DefinitionalTable,
    opts: TranslateOptions,
    setup: Vec<Diagnostic>,
}

impl Translator {
    /// Knowledge base of the bundled background plus `user` axioms.
    pub fn new(user: &[SourcedFormula], opts: TranslateOptions) -> Result<Translator, KbError> {
        let mut all = bundled::background_axioms();
        all.extend(user.iter().cloned());
        let kb = load_kb(&all)?;
        let (table, mut setup) = build_definitional_table(&kb);
        setup.retain(|d| !d.source.as_ref().is_some_and(|s| bundled::FILES.iter().any(|(name, _)| *name == s.file)));
        Ok(Translator { kb, table, opts, setup })
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn definitional_table(&self) -> &DefinitionalTable {
        &self.table
    }

    fn process(&self, kb: &KnowledgeBase, sf: &SourcedFormula, known: &RenameTable) -> Outcome {
        let mut out = Outcome::default();
        let src = &sf.source;
        let f = sf.formula.rename_bound_apart();
        if f.contains_row_var() {
            return out.drop_with(Diagnostic::warning(Some(src), "row variables are not supported; axiom dropped"));
        }
        if higher_order(&f) {
            return out.drop_with(Diagnostic::warning(Some(src), "higher-order content cannot be translated; axiom dropped"));
        }
        let trace0 = infer(kb, &f);
        out.diags.extend(sourced(trace0.diagnostics.clone(), src));
        for (v, t) in &trace0.collected.var_types {
            if let Some(x) = self.opts.exclusion.excluded_by(kb, &t.ty) {
                return out.drop_with(Diagnostic::note(Some(src), format!("?{v} has excluded type {x}; axiom dropped")));
            }
        }
        let env0 = trace0.env();
        let types0: BTreeMap<String, String> = env0.var_types.iter().map(|(v, t)| (v.clone(), t.ty.clone())).collect();
        let (f, d) = rewrite_quantity_arithmetic(kb, &f, &types0);
        out.diags.extend(sourced(d, src));

        let from_instances = instance_typed(kb, &f);
        let present: BTreeSet<String> = f.all_vars().into_iter().collect();
        let records: Vec<SubtypeRecord> = env0
            .promotions
            .iter()
            .filter(|r| present.contains(&r.var) && !from_instances.contains(&r.var))
            .cloned()
            .collect();
        let (f, d) = replace_instance_literals(kb, &self.table, &f, true);
        out.diags.extend(sourced(d, src));
        let (f, d) = inject_guards(&self.table, &f, &records);
        out.diags.extend(sourced(d, src));

        let seed: BTreeMap<String, String> =
            env0.var_types.iter().filter(|(_, t)| !t.class_marker).map(|(v, t)| (v.clone(), t.ty.clone())).collect();
        let trace1 = infer_seeded(kb, &f, &seed);
        let versions = double_axiom(kb, &f, trace1.env());
        out.doubled = versions.len() > 1;
        let mut table = known.clone();
        let mut results = Vec::new();
        for (k, env) in versions.iter().enumerate() {
            let (fk, envk) = promote_integer_literals(&f, env);
            let fk = rename_numeric_relations(kb, &fk, &envk, &mut table);
            let emitter = Emitter::new(kb, &table, self.opts.emit);
            match emitter.emit_axiom(&fk, &envk, &src.to_string()) {
                Ok((fs, decls)) => results.push((fs, decls)),
                Err(EmitError::SortMismatch { message, .. }) if out.doubled && k == 0 => {
                    out.diags.push(Diagnostic::note(Some(src), format!("quantity version omitted: {message}")));
                }
                Err(e @ EmitError::Unsupported(_)) => {
                    return out.drop_with(Diagnostic::warning(Some(src), format!("{e}; axiom dropped")));
                }
                Err(e) => return out.drop_with(Diagnostic::error(Some(src), format!("{e}; axiom dropped"))),
            }
        }
        for (fs, decls) in results {
            if let Err(e) = out.decls.merge(&decls) {
                return out.drop_with(Diagnostic::error(Some(src), format!("{e}; axiom dropped")));
            }
            out.formulas.extend(fs.into_iter().map(|f| (f, Role::Axiom)));
        }
        if out.formulas.is_empty() {
            return out.drop_with(Diagnostic::note(Some(src), "axiom is trivially true after translation; dropped"));
        }
        let mut fresh = RenameTable::default();
        for v in table.variants() {
            if !known.is_variant(&v.name()) {
                fresh.register(v.clone());
            }
        }
        out.table = fresh;
        out
    }

    fn run<T: Send>(&self, items: &[SourcedFormula], f: impl Fn(&SourcedFormula) -> T + Sync + Send) -> Vec<T> {
        if self.opts.jobs == 1 {
            return items.iter().map(f).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.opts.jobs).build();
        match pool {
            Ok(p) => p.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        }
    }

    /// Translate `axioms` (normally the user files) against this knowledge base.
    pub fn translate(&self, axioms: &[SourcedFormula]) -> Translation {
        self.translate_with_conjectures(axioms, &[])
    }

    pub fn translate_with_conjectures(&self, axioms: &[SourcedFormula], conjectures: &[SourcedFormula]) -> Translation {
        let mut diags = self.setup.clone();
        let mut summary = Summary { axioms_in: axioms.len(), ..Summary::default() };

        let mut work = Vec::new();
        for sf in axioms {
            if absorbed(&sf.formula) {
                continue;
            }
            if definition_parts(&self.kb, &sf.formula).is_some() {
                diags.push(Diagnostic::note(Some(&sf.source), "numeric subtype definition absorbed into the condition table"));
                continue;
            }
            let (expanded, d) = instantiate_predicate_variables(&self.kb, sf);
            if expanded.is_empty() {
                summary.dropped += 1;
            }
            diags.extend(d);
            work.extend(expanded);
        }
        let (kept, excluded) = exclude_unsupported(&self.kb, work, &self.opts.exclusion);
        for (sf, why) in &excluded {
            diags.push(Diagnostic::note(Some(&sf.source), format!("{why}; axiom dropped")));
        }
        summary.dropped += excluded.len();

        let empty = RenameTable::default();
        let outcomes = self.run(&kept, |sf| self.process(&self.kb, sf, &empty));
        let mut table = RenameTable::default();
        for o in &outcomes {
            table.merge(&o.table);
        }
        if self.opts.exhaustive_variants {
            let used: BTreeSet<String> = kept.iter().flat_map(|sf| sf.formula.symbols()).collect();
            for name in used {
                for v in generate_signature_variants(&self.kb, &name) {
                    table.register(v);
                }
            }
        }

        // Copies of the axioms on each renamed term, translated once more
        // against a knowledge base that knows the variant signatures.
        let mut kb2 = self.kb.clone();
        for v in table.variants() {
            kb2.add_signature(variant_signature(&self.kb, v));
        }
        let copies = copy_axioms_for_renamed_terms(&kept, &table, &builtin_bases());
        let copy_outcomes = self.run(&copies, |sf| self.process(&kb2, sf, &table));

        let mut units = Vec::new();
        let mut decls = Declarations::default();
        let mut seen = BTreeSet::new();
        let mut n = 0usize;
        let mut push = |f: crate::tff::TffFormula, role: Role, src: &Source, units: &mut Vec<TffUnit>| {
            let text = f.to_string();
            if !seen.insert((text, role.to_string())) {
                return;
            }
            n += 1;
            let name = format!("kb_{}_{n}", self.opts.kb_name);
            units.push(axiom_unit(&name, role, f, Some(src.to_string())));
        };
        for (sf, o) in kept.iter().zip(outcomes) {
            diags.extend(o.diags);
            if o.dropped {
                summary.dropped += 1;
                continue;
            }
            if let Err(e) = decls.merge(&o.decls) {
                diags.push(Diagnostic::error(Some(&sf.source), e.to_string()));
                summary.dropped += 1;
                continue;
            }
            summary.doubled += o.doubled as usize;
            for (f, role) in o.formulas {
                push(f, role, &sf.source, &mut units);
            }
        }
        for (sf, o) in copies.iter().zip(copy_outcomes) {
            if o.dropped {
                let msgs: Vec<String> = o.diags.iter().filter(|d| d.severity > Severity::Note).map(|d| d.message.clone()).collect();
                if !msgs.is_empty() {
                    diags.push(Diagnostic::note(Some(&sf.source), format!("copy {} not translated: {}", sf.label, msgs.join("; "))));
                }
                continue;
            }
            if decls.merge(&o.decls).is_err() {
                diags.push(Diagnostic::note(Some(&sf.source), format!("copy {} conflicts with existing declarations", sf.label)));
                continue;
            }
            for (f, role) in o.formulas {
                push(f, role, &sf.source, &mut units);
            }
        }
        for sf in conjectures {
            let o = self.process(&kb2, sf, &table);
            diags.extend(o.diags);
            if o.dropped {
                continue;
            }
            if let Err(e) = decls.merge(&o.decls) {
                diags.push(Diagnostic::error(Some(&sf.source), e.to_string()));
                continue;
            }
            for (f, _) in o.formulas {
                push(f, Role::Conjecture, &sf.source, &mut units);
            }
        }
        summary.axioms_out = units.iter().filter(|u| u.role == Role::Axiom).count();
        summary.variants = table.len();
        Translation { axioms: units, declarations: decls, diagnostics: diags, renames: table, summary }
    }
}

/// Parse named KIF texts and translate them against the bundled background.
pub fn translate_texts(files: &[(String, String)], opts: TranslateOptions) -> Result<Translation, TranslateError> {
    let mut axioms = Vec::new();
    for (name, text) in files {
        axioms.extend(parse_kif_named(text, name).map_err(|error| TranslateError::Parse { file: name.clone(), error })?);
    }
    let t = Translator::new(&axioms, opts)?;
    Ok(t.translate(&axioms))
}
