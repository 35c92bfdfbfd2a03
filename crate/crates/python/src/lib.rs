//! Python bindings: steps, solution sets and bundles, the distance and
//! indicator functions, the planar projection and report rendering.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use archspread_core::analysis::{self, analyze};
use archspread_core::distance::{self as dist, DistanceWeights};
use archspread_core::encoding::{build_encoding, build_encoding_from_steps, encode_sequence, encode_step};
use archspread_core::indicators::{self as ind, IndicatorOptions, MasMode, MaxDScale};
use archspread_core::io::{self, AnalysisBundle, ReportFormat};
use archspread_core::model;
use archspread_core::projection;
use archspread_core::synth;

create_exception!(archspread, ArchspreadError, PyValueError, "Invalid input to an archspread operation.");

fn err(e: archspread_core::Error) -> PyErr {
    ArchspreadError::new_err(e.to_string())
}

fn weights(w_pred: f64) -> PyResult<DistanceWeights> {
    DistanceWeights::from_pred(w_pred).map_err(err)
}

/// One refactoring action: a transformation name and its arguments.
#[pyclass(name = "Step", module = "archspread", skip_from_py_object, frozen, eq)]
#[derive(Clone, PartialEq)]
pub struct Step(model::TransformationStep);

#[pymethods]
impl Step {
    #[new]
    #[pyo3(signature = (name, args = Vec::new()))]
    fn new(name: String, args: Vec<String>) -> Self {
        Step(model::TransformationStep::new(name, args))
    }

    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn args(&self) -> Vec<String> {
        self.0.args.clone()
    }

    fn __repr__(&self) -> String {
        format!("Step({:?}, {:?})", self.0.name, self.0.args)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

fn steps(seq: &[PyRef<'_, Step>]) -> Vec<model::TransformationStep> {
    seq.iter().map(|s| s.0.clone()).collect()
}

/// A design alternative: objective values and the refactoring sequence that
/// produced it.
#[pyclass(name = "Solution", module = "archspread", skip_from_py_object, frozen)]
#[derive(Clone)]
pub struct Solution(model::ArchitectureSolution);

#[pymethods]
impl Solution {
    #[new]
    #[pyo3(signature = (id, objectives, sequence = Vec::new()))]
    fn new(id: String, objectives: Vec<f64>, sequence: Vec<PyRef<'_, Step>>) -> Self {
        Solution(model::ArchitectureSolution::new(id, objectives, steps(&sequence)))
    }

    #[getter]
    fn id(&self) -> &str {
        &self.0.id
    }

    #[getter]
    fn objectives(&self) -> Vec<f64> {
        self.0.objectives.clone()
    }

    #[getter]
    fn sequence(&self) -> Vec<Step> {
        self.0.sequence.iter().cloned().map(Step).collect()
    }

    fn __repr__(&self) -> String {
        format!("Solution({:?}, {:?}, <{} steps>)", self.0.id, self.0.objectives, self.0.sequence.len())
    }
}

/// A labelled set of solutions scored together.
#[pyclass(name = "SolutionSet", module = "archspread", skip_from_py_object, frozen)]
#[derive(Clone)]
pub struct SolutionSet(model::SolutionSet);

#[pymethods]
impl SolutionSet {
    #[new]
    fn new(label: String, objective_names: Vec<String>, solutions: Vec<PyRef<'_, Solution>>) -> Self {
        SolutionSet(model::SolutionSet::new(label, objective_names, solutions.iter().map(|s| s.0.clone()).collect()))
    }

    #[getter]
    fn label(&self) -> &str {
        &self.0.label
    }

    #[getter]
    fn objective_names(&self) -> Vec<String> {
        self.0.objective_names.clone()
    }

    #[getter]
    fn solutions(&self) -> Vec<Solution> {
        self.0.solutions.iter().cloned().map(Solution).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Every violated invariant, as readable messages; empty when valid.
    fn validate(&self) -> Vec<String> {
        model::validate_solution_set(&self.0).iter().map(|v| v.to_string()).collect()
    }

    fn __repr__(&self) -> String {
        format!("SolutionSet({:?}, <{} solutions>)", self.0.label, self.0.len())
    }
}

/// Symmetric matrix of architectural distances.
#[pyclass(name = "DistanceMatrix", module = "archspread", skip_from_py_object, frozen)]
#[derive(Clone)]
pub struct DistanceMatrix(model::DistanceMatrix);

#[pymethods]
impl DistanceMatrix {
    /// Wraps explicit rows. `max_d` is the largest attainable distance used to
    /// normalize MAS.
    #[new]
    fn new(ids: Vec<String>, rows: Vec<Vec<f64>>, max_d: f64) -> PyResult<Self> {
        let n = rows.len();
        if ids.len() != n {
            return Err(ArchspreadError::new_err(format!("{} ids for {n} rows", ids.len())));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(ArchspreadError::new_err(format!("row of length {} in a {n}x{n} matrix", r.len())));
        }
        if !(max_d.is_finite() && max_d >= 0.0) {
            return Err(ArchspreadError::new_err(format!("max_d must be finite and non-negative, got {max_d}")));
        }
        let largest = rows.iter().flatten().copied().fold(max_d, f64::max);
        let l_pad = if largest.is_finite() { largest.ceil() as usize } else { 0 };
        let dm = model::DistanceMatrix::from_rows(ids, &rows, l_pad, max_d);
        let problems = dm.check_invariants();
        if !problems.is_empty() {
            return Err(ArchspreadError::new_err(problems.join("; ")));
        }
        Ok(DistanceMatrix(dm))
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.0.ids.clone()
    }

    #[getter]
    fn max_d(&self) -> f64 {
        self.0.max_d
    }

    #[getter]
    fn l_pad(&self) -> usize {
        self.0.l_pad
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.0.n()).map(|i| self.0.row(i).to_vec()).collect()
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }

    fn __getitem__(&self, index: (usize, usize)) -> PyResult<f64> {
        let (i, j) = index;
        let n = self.0.n();
        if i >= n || j >= n {
            return Err(pyo3::exceptions::PyIndexError::new_err(format!("({i}, {j}) outside {n}x{n}")));
        }
        Ok(self.0.get(i, j))
    }
}

/// Spread indicators of one set.
#[pyclass(name = "IndicatorResult", module = "archspread", skip_from_py_object, frozen, get_all)]
#[derive(Clone)]
pub struct IndicatorResult {
    set_label: String,
    n: usize,
    o: usize,
    ms: f64,
    mas: f64,
    max_d: f64,
    l_pad: usize,
    diagnostics: Vec<String>,
}

impl From<&ind::IndicatorResult> for IndicatorResult {
    fn from(r: &ind::IndicatorResult) -> Self {
        IndicatorResult {
            set_label: r.set_label.clone(),
            n: r.n,
            o: r.o,
            ms: r.ms,
            mas: r.mas,
            max_d: r.max_d,
            l_pad: r.l_pad,
            diagnostics: r.diagnostics.clone(),
        }
    }
}

impl IndicatorResult {
    fn core(&self) -> ind::IndicatorResult {
        ind::IndicatorResult {
            set_label: self.set_label.clone(),
            n: self.n,
            o: self.o,
            ms: self.ms,
            mas: self.mas,
            max_d: self.max_d,
            l_pad: self.l_pad,
            diagnostics: self.diagnostics.clone(),
        }
    }
}

#[pymethods]
impl IndicatorResult {
    fn __repr__(&self) -> String {
        format!("IndicatorResult({:?}, ms={}, mas={})", self.set_label, self.ms, self.mas)
    }
}

/// Planar coordinates with fidelity measures.
#[pyclass(name = "Projection", module = "archspread", skip_from_py_object, frozen, get_all)]
#[derive(Clone)]
pub struct Projection {
    ids: Vec<String>,
    coords: Vec<(f64, f64)>,
    stress: f64,
    eigenvalue_share: f64,
    diagnostics: Vec<String>,
}

impl From<&projection::Projection2D> for Projection {
    fn from(p: &projection::Projection2D) -> Self {
        Projection {
            ids: p.ids.clone(),
            coords: p.coords.iter().map(|c| (c[0], c[1])).collect(),
            stress: p.stress,
            eigenvalue_share: p.eigenvalue_share,
            diagnostics: p.diagnostics.clone(),
        }
    }
}

/// A document of solution sets, optionally with the search tree their
/// sequences come from.
#[pyclass(name = "Bundle", module = "archspread", skip_from_py_object, frozen)]
pub struct Bundle {
    inner: AnalysisBundle,
    warnings: Vec<String>,
}

#[pymethods]
impl Bundle {
    #[new]
    #[pyo3(signature = (name, sets))]
    fn new(name: String, sets: Vec<PyRef<'_, SolutionSet>>) -> Self {
        let sets = sets.iter().map(|s| s.0.clone()).collect();
        Bundle { inner: AnalysisBundle { name, sets, tree: None, provenance: None }, warnings: vec![] }
    }

    /// Parses and validates a bundle from JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let parsed = io::parse_bundle(text).map_err(err)?;
        Ok(Bundle { inner: parsed.bundle, warnings: parsed.warnings })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| pyo3::exceptions::PyOSError::new_err(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// A seeded synthetic bundle of `sets` sets with `n` solutions each.
    #[staticmethod]
    fn synth(seed: u64, sets: usize, n: usize) -> PyResult<Self> {
        if sets == 0 || n == 0 {
            return Err(ArchspreadError::new_err("sets and n must be at least 1"));
        }
        Ok(Bundle { inner: synth::synth_bundle(seed, sets, n).map_err(err)?, warnings: vec![] })
    }

    fn to_json(&self) -> String {
        io::bundle_to_json(&self.inner)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn sets(&self) -> Vec<SolutionSet> {
        self.inner.sets.iter().cloned().map(SolutionSet).collect()
    }

    /// Unknown fields skipped while parsing.
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.warnings.clone()
    }

    /// Scores every set; see the `archspread compare` command for the options.
    #[pyo3(signature = (w_pred = 0.5, per_set_maxd = false, mas_allpairs = false, normalize_objectives = false, max_d = None, projection = true))]
    fn analyze(
        &self,
        w_pred: f64,
        per_set_maxd: bool,
        mas_allpairs: bool,
        normalize_objectives: bool,
        max_d: Option<BTreeMap<String, f64>>,
        projection: bool,
    ) -> PyResult<Analysis> {
        let options = IndicatorOptions {
            scale: if per_set_maxd { MaxDScale::PerSet } else { MaxDScale::Shared },
            mode: if mas_allpairs { MasMode::AllPairs } else { MasMode::Eccentricity },
            max_d_overrides: max_d.unwrap_or_default(),
            normalize_objectives,
        };
        Ok(Analysis(analyze(&self.inner, weights(w_pred)?, &options, projection).map_err(err)?))
    }

    fn __len__(&self) -> usize {
        self.inner.sets.len()
    }
}

/// Indicators, correlation and projection of a bundle.
#[pyclass(name = "Analysis", module = "archspread", skip_from_py_object, frozen)]
pub struct Analysis(analysis::Analysis);

#[pymethods]
impl Analysis {
    #[getter]
    fn results(&self) -> Vec<IndicatorResult> {
        self.0.results.iter().map(IndicatorResult::from).collect()
    }

    /// `{"n", "pearson", "spearman"}`, or `None` with fewer than three sets.
    #[getter]
    fn correlation<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        correlation_dict(py, &self.0.correlation)
    }

    /// The joint projection of all sets; pooled ids are `label/id`.
    #[getter]
    fn projection(&self) -> Option<Projection> {
        self.0.projection.as_ref().map(|p| Projection::from(&p.projection))
    }

    /// The report as JSON, or as `(summary_csv, points_csv)` for `"csv"`.
    #[pyo3(signature = (format = "json"))]
    fn report<'py>(&self, py: Python<'py>, format: &str) -> PyResult<Bound<'py, PyAny>> {
        match format {
            "json" => Ok(self.0.render(ReportFormat::Json).main.into_pyobject(py)?.into_any()),
            "csv" => {
                let docs = self.0.render(ReportFormat::Csv);
                Ok((docs.main, docs.points).into_pyobject(py)?.into_any())
            }
            other => Err(ArchspreadError::new_err(format!("unknown report format {other:?}"))),
        }
    }

    fn svg(&self) -> Option<String> {
        self.0.svg()
    }
}

fn correlation_dict<'py>(
    py: Python<'py>,
    c: &archspread_core::Result<ind::SpreadCorrelation>,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    match c {
        Ok(c) => {
            let d = PyDict::new(py);
            d.set_item("n", c.n)?;
            d.set_item("pearson", c.pearson)?;
            d.set_item("spearman", c.spearman)?;
            Ok(Some(d))
        }
        Err(_) => Ok(None),
    }
}

/// Distance between two steps in [0, 1]; `None` stands for a padding step.
#[pyfunction]
#[pyo3(signature = (a, b, w_pred = 0.5))]
fn step_distance(a: Option<PyRef<'_, Step>>, b: Option<PyRef<'_, Step>>, w_pred: f64) -> PyResult<f64> {
    let w = weights(w_pred)?;
    let present: Vec<&model::TransformationStep> = [&a, &b].into_iter().flatten().map(|s| &s.0).collect();
    let table = build_encoding_from_steps(present.iter().copied());
    let a = a.map(|s| encode_step(&s.0, &table)).transpose().map_err(err)?;
    let b = b.map(|s| encode_step(&s.0, &table)).transpose().map_err(err)?;
    dist::step_distance(a.as_ref(), b.as_ref(), w).map_err(err)
}

/// Sum of step distances after padding the shorter sequence.
#[pyfunction]
#[pyo3(signature = (a, b, w_pred = 0.5))]
fn sequence_distance(a: Vec<PyRef<'_, Step>>, b: Vec<PyRef<'_, Step>>, w_pred: f64) -> PyResult<f64> {
    let w = weights(w_pred)?;
    let (a, b) = (steps(&a), steps(&b));
    let table = build_encoding_from_steps(a.iter().chain(&b));
    let ea = encode_sequence(&a, &table).map_err(err)?;
    let eb = encode_sequence(&b, &table).map_err(err)?;
    dist::sequence_distance(&ea, &eb, w).map_err(err)
}

/// Pairwise distances of a set's solutions.
#[pyfunction]
#[pyo3(signature = (set, w_pred = 0.5))]
fn distance_matrix(set: PyRef<'_, SolutionSet>, w_pred: f64) -> PyResult<DistanceMatrix> {
    let table = build_encoding(std::slice::from_ref(&set.0));
    Ok(DistanceMatrix(dist::distance_matrix(&set.0, &table, weights(w_pred)?).map_err(err)?))
}

/// Objective-space spread: the diagonal of the objectives' bounding box.
#[pyfunction]
fn max_spread(set: PyRef<'_, SolutionSet>) -> f64 {
    ind::max_spread(&set.0)
}

/// Architectural spread of a distance matrix in [0, 1].
#[pyfunction]
#[pyo3(signature = (matrix, max_d = None, all_pairs = false))]
fn max_architectural_spread(matrix: PyRef<'_, DistanceMatrix>, max_d: Option<f64>, all_pairs: bool) -> PyResult<f64> {
    let mode = if all_pairs { MasMode::AllPairs } else { MasMode::Eccentricity };
    Ok(ind::mas_with_diagnostics(&matrix.0, max_d, mode).map_err(err)?.value)
}

/// Indicators for several sets sharing one encoding.
#[pyfunction]
#[pyo3(signature = (sets, w_pred = 0.5, per_set_maxd = false))]
fn indicators(sets: Vec<PyRef<'_, SolutionSet>>, w_pred: f64, per_set_maxd: bool) -> PyResult<Vec<IndicatorResult>> {
    let sets: Vec<model::SolutionSet> = sets.iter().map(|s| s.0.clone()).collect();
    let table = build_encoding(&sets);
    let options = IndicatorOptions {
        scale: if per_set_maxd { MaxDScale::PerSet } else { MaxDScale::Shared },
        ..IndicatorOptions::default()
    };
    let results = ind::indicators_for(&sets, &table, weights(w_pred)?, &options).map_err(err)?;
    Ok(results.iter().map(IndicatorResult::from).collect())
}

/// Pearson and Spearman correlation between MS and MAS across sets.
#[pyfunction]
fn spread_correlation<'py>(py: Python<'py>, results: Vec<PyRef<'_, IndicatorResult>>) -> PyResult<Bound<'py, PyDict>> {
    let core: Vec<ind::IndicatorResult> = results.iter().map(|r| r.core()).collect();
    let c = ind::spread_correlation(&core);
    if let Err(e) = &c {
        return Err(err(e.clone()));
    }
    Ok(correlation_dict(py, &c)?.expect("computed"))
}

/// Classical multidimensional scaling into the plane.
#[pyfunction]
fn mds_project(matrix: PyRef<'_, DistanceMatrix>) -> Projection {
    Projection::from(&projection::mds_project(&matrix.0))
}

#[pymodule]
#[pyo3(name = "archspread")]
pub fn archspread(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ArchspreadError", m.py().get_type::<ArchspreadError>())?;
    m.add_class::<Step>()?;
    m.add_class::<Solution>()?;
    m.add_class::<SolutionSet>()?;
    m.add_class::<DistanceMatrix>()?;
    m.add_class::<IndicatorResult>()?;
    m.add_class::<Projection>()?;
    m.add_class::<Bundle>()?;
    m.add_class::<Analysis>()?;
    m.add_function(wrap_pyfunction!(step_distance, m)?)?;
    m.add_function(wrap_pyfunction!(sequence_distance, m)?)?;
    m.add_function(wrap_pyfunction!(distance_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(max_spread, m)?)?;
    m.add_function(wrap_pyfunction!(max_architectural_spread, m)?)?;
    m.add_function(wrap_pyfunction!(indicators, m)?)?;
    m.add_function(wrap_pyfunction!(spread_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(mds_project, m)?)?;
    Ok(())
}
