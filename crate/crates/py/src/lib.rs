//! Python bindings. Snapshots cross the boundary as `(time, {network: label})`
//! and weights as plain dicts; `None` weights mean uniform.

use std::collections::BTreeMap;

use catchscope::analysis::{self, Linkage, SweepParams};
use catchscope::eval::{self, ScenarioSpec, ScoreOptions};
use catchscope::ingest::{self, InputFormat};
use catchscope::{quantify, CatchmentLabel, GroundTruthEvent, NetworkId, Visibility};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: catchscope::Error) -> PyErr {
    match e {
        catchscope::Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_label(text: &str) -> PyResult<CatchmentLabel> {
    CatchmentLabel::parse(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse_linkage(text: &str) -> PyResult<Linkage> {
    match text {
        "average" => Ok(Linkage::Average),
        "single" => Ok(Linkage::Single),
        _ => Err(PyValueError::new_err(format!(
            "unknown linkage `{text}`; expected average or single"
        ))),
    }
}

/// One routing snapshot: a label per network at a single time.
#[pyclass(name = "Snapshot", module = "catchscope", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySnapshot(catchscope::Snapshot);

#[pymethods]
impl PySnapshot {
    #[new]
    fn new(time: i64, entries: BTreeMap<String, String>) -> PyResult<Self> {
        let mut s = catchscope::Snapshot::new(time);
        for (network, label) in entries {
            s.set(NetworkId::new(network), parse_label(&label)?);
        }
        Ok(PySnapshot(s))
    }

    #[getter]
    fn time(&self) -> i64 {
        self.0.time
    }

    #[getter]
    fn entries(&self) -> BTreeMap<String, String> {
        self.0
            .iter()
            .map(|(n, l)| (n.as_str().to_string(), l.to_string()))
            .collect()
    }

    /// Label of `network`; `"unknown"` when absent.
    fn label(&self, network: &str) -> String {
        self.0.label(&NetworkId::new(network)).to_string()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Snapshot(time={}, networks={})", self.0.time, self.0.len())
    }
}

fn weights(raw: Option<BTreeMap<String, f64>>) -> PyResult<catchscope::WeightVector> {
    match raw {
        None => Ok(catchscope::WeightVector::uniform()),
        Some(map) => catchscope::WeightVector::from_pairs(map).map_err(to_py),
    }
}

fn unwrap_series(snapshots: &[PyRef<'_, PySnapshot>]) -> Vec<catchscope::Snapshot> {
    snapshots.iter().map(|s| s.0.clone()).collect()
}

/// Pairwise similarity over a snapshot series.
#[pyclass(name = "SimilarityMatrix", module = "catchscope", frozen)]
struct PySimilarityMatrix(analysis::SimilarityMatrix);

#[pymethods]
impl PySimilarityMatrix {
    #[new]
    fn new(times: Vec<i64>, values: Vec<Vec<f64>>) -> PyResult<Self> {
        let flat = values.into_iter().flatten().collect();
        analysis::SimilarityMatrix::new(times, flat)
            .map(PySimilarityMatrix)
            .map_err(to_py)
    }

    #[getter]
    fn times(&self) -> Vec<i64> {
        self.0.times().to_vec()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.0.len() || j >= self.0.len() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.0.get(i, j))
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        (0..self.0.len()).map(|i| self.0.row(i).to_vec()).collect()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Cluster membership of each snapshot at one threshold.
#[pyclass(name = "ModeAssignment", module = "catchscope", frozen)]
struct PyModeAssignment(analysis::ModeAssignment);

#[pymethods]
impl PyModeAssignment {
    #[getter]
    fn threshold(&self) -> f64 {
        self.0.threshold()
    }

    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.0.labels()
    }

    #[getter]
    fn cluster_count(&self) -> usize {
        self.0.cluster_count()
    }

    #[getter]
    fn mode_ids(&self) -> Vec<usize> {
        self.0.mode_ids().iter().copied().collect()
    }

    fn members(&self, cluster: usize) -> Vec<i64> {
        self.0.members(cluster)
    }
}

/// Weighted flow between labels from one snapshot to the next.
#[pyclass(name = "TransitionMatrix", module = "catchscope", frozen)]
struct PyTransitionMatrix(quantify::TransitionMatrix);

#[pymethods]
impl PyTransitionMatrix {
    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().iter().map(|l| l.to_string()).collect()
    }

    #[getter]
    fn cells(&self) -> Vec<Vec<f64>> {
        let n = self.0.labels().len();
        (0..n)
            .map(|i| (0..n).map(|j| self.0.cell(i, j)).collect())
            .collect()
    }

    fn get(&self, source: &str, target: &str) -> PyResult<f64> {
        Ok(self.0.get(&parse_label(source)?, &parse_label(target)?))
    }

    fn total(&self) -> f64 {
        self.0.total()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }
}

#[pyfunction]
#[pyo3(signature = (text, format = "canonical"))]
fn parse_snapshots(text: &str, format: &str) -> PyResult<Vec<PySnapshot>> {
    let format = match format {
        "canonical" => InputFormat::CanonicalRows,
        "verfploeter" => InputFormat::VerfploeterTable,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown format `{other}`; expected canonical or verfploeter"
            )))
        }
    };
    let snaps = ingest::parse_snapshots(text, format).map_err(to_py)?;
    Ok(snaps.into_iter().map(PySnapshot).collect())
}

#[pyfunction]
#[pyo3(signature = (a, b, weights = None))]
fn similarity(
    a: PyRef<'_, PySnapshot>,
    b: PyRef<'_, PySnapshot>,
    weights: Option<BTreeMap<String, f64>>,
) -> PyResult<f64> {
    analysis::similarity(&a.0, &b.0, &self::weights(weights)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (snapshots, weights = None))]
fn similarity_matrix(
    snapshots: Vec<PyRef<'_, PySnapshot>>,
    weights: Option<BTreeMap<String, f64>>,
) -> PyResult<PySimilarityMatrix> {
    let w = self::weights(weights)?;
    analysis::similarity_matrix(&unwrap_series(&snapshots), &w)
        .map(PySimilarityMatrix)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (matrix, threshold, linkage = "average"))]
fn hac_cluster(
    matrix: PyRef<'_, PySimilarityMatrix>,
    threshold: f64,
    linkage: &str,
) -> PyResult<PyModeAssignment> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(PyValueError::new_err("threshold must lie in [0, 1]"));
    }
    Ok(PyModeAssignment(analysis::hac_cluster_with(
        &matrix.0,
        threshold,
        parse_linkage(linkage)?,
    )))
}

#[pyfunction]
#[pyo3(signature = (matrix, max_modes = 15, min_size = 2, step = 0.01, linkage = "average"))]
fn select_modes(
    matrix: PyRef<'_, PySimilarityMatrix>,
    max_modes: usize,
    min_size: usize,
    step: f64,
    linkage: &str,
) -> PyResult<PyModeAssignment> {
    let params = SweepParams {
        max_modes,
        min_size,
        step,
        linkage: parse_linkage(linkage)?,
    };
    analysis::select_modes(&matrix.0, &params)
        .map(PyModeAssignment)
        .map_err(to_py)
}

/// Returns `(time, score)` for each detected routing change.
#[pyfunction]
#[pyo3(signature = (snapshots, weights = None, window = 15, delta = 0.05))]
fn detect_changes(
    snapshots: Vec<PyRef<'_, PySnapshot>>,
    weights: Option<BTreeMap<String, f64>>,
    window: usize,
    delta: f64,
) -> PyResult<Vec<(i64, f64)>> {
    let params = analysis::ChangeParams { window, delta };
    let events = analysis::detect_changes(
        &unwrap_series(&snapshots),
        &self::weights(weights)?,
        &params,
    )
    .map_err(to_py)?;
    Ok(events.into_iter().map(|e| (e.time, e.score)).collect())
}

#[pyfunction]
#[pyo3(signature = (snapshot, weights = None))]
fn aggregate(
    snapshot: PyRef<'_, PySnapshot>,
    weights: Option<BTreeMap<String, f64>>,
) -> PyResult<BTreeMap<String, f64>> {
    let a = quantify::aggregate(&snapshot.0, &self::weights(weights)?);
    Ok(a.counts.iter().map(|(l, v)| (l.to_string(), *v)).collect())
}

#[pyfunction]
#[pyo3(signature = (a, b, weights = None))]
fn transition_matrix(
    a: PyRef<'_, PySnapshot>,
    b: PyRef<'_, PySnapshot>,
    weights: Option<BTreeMap<String, f64>>,
) -> PyResult<PyTransitionMatrix> {
    Ok(PyTransitionMatrix(quantify::transition_matrix(
        &a.0,
        &b.0,
        &self::weights(weights)?,
    )))
}

/// Builds a synthetic series from a TOML scenario. Returns the snapshots and
/// the planted events as `(time, operator, visibility)`.
#[pyfunction]
#[pyo3(signature = (scenario, seed = 0))]
#[allow(clippy::type_complexity)]
fn generate_scenario(
    scenario: &str,
    seed: u64,
) -> PyResult<(Vec<PySnapshot>, Vec<(i64, String, String)>)> {
    let spec = ScenarioSpec::from_toml(scenario).map_err(to_py)?;
    let (snaps, events) = eval::generate_scenario(&spec, seed).map_err(to_py)?;
    Ok((
        snaps.into_iter().map(PySnapshot).collect(),
        events
            .into_iter()
            .map(|e| (e.time, e.operator, e.visibility.as_str().to_string()))
            .collect(),
    ))
}

/// Scores detection times against `(time, operator, visibility)` events.
#[pyfunction]
#[pyo3(signature = (detections, events, window_minutes = 10, match_window_minutes = 10, strict = false))]
fn score_detections(
    detections: Vec<i64>,
    events: Vec<(i64, String, String)>,
    window_minutes: u32,
    match_window_minutes: u32,
    strict: bool,
) -> PyResult<BTreeMap<String, f64>> {
    let log = events
        .into_iter()
        .map(|(time, operator, visibility)| {
            let v: Visibility = visibility.parse().map_err(PyValueError::new_err)?;
            Ok(GroundTruthEvent::new(time, operator, v))
        })
        .collect::<PyResult<Vec<_>>>()?;
    let groups = eval::group_events(&log, window_minutes);
    let options = ScoreOptions {
        match_window_minutes,
        strict,
    };
    let r = eval::score_detections(&detections, &groups, &options);
    Ok(BTreeMap::from([
        ("tp".to_string(), r.tp as f64),
        ("fn".to_string(), r.fn_ as f64),
        ("tn".to_string(), r.tn as f64),
        ("fp".to_string(), r.fp as f64),
        ("extra".to_string(), r.extra as f64),
        ("recall".to_string(), r.recall()),
        ("accuracy".to_string(), r.accuracy()),
        ("precision".to_string(), r.precision()),
    ]))
}

#[pyfunction]
fn adjusted_rand_index(a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    eval::adjusted_rand_index(&a, &b).map_err(to_py)
}

#[pymodule(name = "catchscope")]
fn catchscope_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySnapshot>()?;
    m.add_class::<PySimilarityMatrix>()?;
    m.add_class::<PyModeAssignment>()?;
    m.add_class::<PyTransitionMatrix>()?;
    m.add_function(wrap_pyfunction!(parse_snapshots, m)?)?;
    m.add_function(wrap_pyfunction!(similarity, m)?)?;
    m.add_function(wrap_pyfunction!(similarity_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(hac_cluster, m)?)?;
    m.add_function(wrap_pyfunction!(select_modes, m)?)?;
    m.add_function(wrap_pyfunction!(detect_changes, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(transition_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(score_detections, m)?)?;
    m.add_function(wrap_pyfunction!(adjusted_rand_index, m)?)?;
    Ok(())
}
