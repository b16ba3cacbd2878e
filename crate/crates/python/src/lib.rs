//! Python bindings: parsing, translation, checking and the type-hierarchy
//! queries.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use sumo_tff::check::{check_tff_text, CheckOptions};
use sumo_tff::emit::EmitOptions;
use sumo_tff::pipeline::{self, TranslateOptions};
use sumo_tff::preprocess::ExclusionPolicy;
use sumo_tff::{bundled, KnowledgeBase, SourcedFormula};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed KIF sentence with its source location.
#[pyclass(frozen, eq, skip_from_py_object, module = "sumo_tff_py")]
#[derive(Clone, PartialEq)]
pub struct Formula {
    inner: SourcedFormula,
}

#[pymethods]
impl Formula {
    #[getter]
    fn source(&self) -> String {
        self.inner.source.to_string()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    fn __str__(&self) -> String {
        sumo_tff::print_kif(&self.inner.formula)
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.__str__())
    }
}

/// Parse KIF text into formulas.
#[pyfunction]
#[pyo3(signature = (text, file = "input.kif"))]
fn parse_kif(text: &str, file: &str) -> PyResult<Vec<Formula>> {
    let fs = sumo_tff::parse_kif_named(text, file).map_err(value_err)?;
    Ok(fs.into_iter().map(|inner| Formula { inner }).collect())
}

/// Canonical KIF text of a formula.
#[pyfunction]
fn print_kif(formula: &Formula) -> String {
    formula.__str__()
}

fn load_user(texts: Vec<String>) -> PyResult<Vec<SourcedFormula>> {
    let mut out = Vec::new();
    for (i, t) in texts.iter().enumerate() {
        out.extend(sumo_tff::parse_kif_named(t, &format!("input{i}.kif")).map_err(value_err)?);
    }
    Ok(out)
}

/// Type hierarchy of the bundled ontology plus any extra KIF texts.
#[pyclass(frozen, module = "sumo_tff_py")]
pub struct Hierarchy {
    kb: KnowledgeBase,
}

#[pymethods]
impl Hierarchy {
    #[new]
    #[pyo3(signature = (texts = Vec::new()))]
    fn new(texts: Vec<String>) -> PyResult<Self> {
        let mut axioms = bundled::background_axioms();
        axioms.extend(load_user(texts)?);
        let kb = sumo_tff::load_kb(&axioms).map_err(value_err)?;
        Ok(Hierarchy { kb })
    }

    fn is_subclass_of(&self, child: &str, ancestor: &str) -> PyResult<bool> {
        self.kb.is_subclass_of(child, ancestor).map_err(value_err)
    }

    fn promotion_target(&self, ty: &str) -> String {
        self.kb.promotion_target(ty)
    }

    fn meet_numeric(&self, a: &str, b: &str) -> String {
        self.kb.meet_numeric(a, b)
    }
}

/// Result of one translation run.
#[pyclass(frozen, module = "sumo_tff_py")]
pub struct Translation {
    #[pyo3(get)]
    tff: String,
    #[pyo3(get)]
    diagnostics: Vec<String>,
    #[pyo3(get)]
    has_errors: bool,
    summary: pipeline::Summary,
}

#[pymethods]
impl Translation {
    #[getter]
    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        let s = &self.summary;
        d.set_item("axioms_in", s.axioms_in)?;
        d.set_item("axioms_out", s.axioms_out)?;
        d.set_item("doubled", s.doubled)?;
        d.set_item("dropped", s.dropped)?;
        d.set_item("variants", s.variants)?;
        Ok(d)
    }

    fn __str__(&self) -> String {
        self.tff.clone()
    }
}

impl Translation {
    fn from_core(t: pipeline::Translation) -> PyResult<Self> {
        let tff = t.to_tff().map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(Translation {
            tff,
            diagnostics: t.diagnostics.iter().map(ToString::to_string).collect(),
            has_errors: t.has_errors(),
            summary: t.summary,
        })
    }
}

/// Translator over the bundled ontology plus the given KIF texts.
#[pyclass(frozen, module = "sumo_tff_py")]
pub struct Translator {
    inner: pipeline::Translator,
    user: Vec<SourcedFormula>,
}

#[pymethods]
impl Translator {
    #[new]
    #[pyo3(signature = (texts = Vec::new(), kb_name = "SUMO", exclude = None, exhaustive_variants = false, builtin_floor_ceiling = false))]
    fn new(
        texts: Vec<String>,
        kb_name: &str,
        exclude: Option<Vec<String>>,
        exhaustive_variants: bool,
        builtin_floor_ceiling: bool,
    ) -> PyResult<Self> {
        let user = load_user(texts)?;
        let opts = TranslateOptions {
            kb_name: kb_name.to_string(),
            exclusion: exclude.map(ExclusionPolicy::with_types).unwrap_or_default(),
            exhaustive_variants,
            emit: EmitOptions { builtin_floor_ceiling },
            jobs: 0,
        };
        let inner = pipeline::Translator::new(&user, opts).map_err(value_err)?;
        Ok(Translator { inner, user })
    }

    /// Translate the texts given at construction, or `axioms` when passed.
    #[pyo3(signature = (axioms = None, conjectures = None))]
    fn translate(&self, py: Python<'_>, axioms: Option<&str>, conjectures: Option<&str>) -> PyResult<Translation> {
        let axioms = match axioms {
            Some(t) => sumo_tff::parse_kif_named(t, "axioms.kif").map_err(value_err)?,
            None => self.user.clone(),
        };
        let conj = match conjectures {
            Some(t) => sumo_tff::parse_kif_named(t, "query.kif").map_err(value_err)?,
            None => Vec::new(),
        };
        let t = py.detach(|| self.inner.translate_with_conjectures(&axioms, &conj));
        Translation::from_core(t)
    }

    fn definitional_table(&self) -> Vec<(String, String, String)> {
        let table = self.inner.definitional_table();
        table
            .conditions
            .iter()
            .map(|(ty, c)| (ty.clone(), table.bound_var.get(ty).cloned().unwrap_or_default(), sumo_tff::print_kif(c)))
            .collect()
    }
}

/// Translate KIF texts in one call.
#[pyfunction]
fn translate(texts: Vec<String>) -> PyResult<Translation> {
    let files: Vec<(String, String)> = texts.into_iter().enumerate().map(|(i, t)| (format!("input{i}.kif"), t)).collect();
    let t = pipeline::translate_texts(&files, TranslateOptions::default()).map_err(value_err)?;
    Translation::from_core(t)
}

/// Sort-check TFF text; returns the error messages.
#[pyfunction]
#[pyo3(signature = (text, strict = false))]
fn check_tff(text: &str, strict: bool) -> PyResult<Vec<String>> {
    let opts = CheckOptions { strict, file: "input.tff".into() };
    let diags = check_tff_text(text, &opts).map_err(|e| value_err(format!("{e:?}")))?;
    Ok(diags.iter().filter(|d| d.is_error()).map(ToString::to_string).collect())
}

/// Rename suffix for `(position, SUMO type)` pairs, e.g. `__0In1ReFn`.
#[pyfunction]
#[pyo3(signature = (signature, is_function = false))]
fn suffix_for(signature: Vec<(usize, String)>, is_function: bool) -> PyResult<String> {
    let sig: Vec<(usize, &str)> = signature.iter().map(|(p, t)| (*p, t.as_str())).collect();
    sumo_tff::rename::suffix_for(&sig, is_function).map_err(value_err)
}

#[pymodule]
fn sumo_tff_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_class::<Hierarchy>()?;
    m.add_class::<Translation>()?;
    m.add_class::<Translator>()?;
    m.add_function(wrap_pyfunction!(parse_kif, m)?)?;
    m.add_function(wrap_pyfunction!(print_kif, m)?)?;
    m.add_function(wrap_pyfunction!(translate, m)?)?;
    m.add_function(wrap_pyfunction!(check_tff, m)?)?;
    m.add_function(wrap_pyfunction!(suffix_for, m)?)?;
    Ok(())
}
