//! Python bindings: maps, moves, searches and certificates.

use flipkit::pipeline::{self, EquivalenceCertificate, Strategies};
use flipkit::search::{self, FlipMode, SearchBudget};
use flipkit::{io, moves, seeds, Error, Move, SurfaceClass, TriangulationMap};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(flipkit, FlipkitError, PyException);
create_exception!(flipkit, ExhaustedError, FlipkitError);

fn err(e: Error) -> PyErr {
    match e {
        Error::Exhausted => ExhaustedError::new_err(e.to_string()),
        _ => FlipkitError::new_err(e.to_string()),
    }
}

fn mode(name: &str) -> PyResult<FlipMode> {
    match name {
        "regular" => Ok(FlipMode::RegularFlips),
        "all" => Ok(FlipMode::AllFlips),
        _ => Err(FlipkitError::new_err(format!("unknown mode {name}"))),
    }
}

fn surface(chi: i64, orientable: bool) -> PyResult<SurfaceClass> {
    let s = SurfaceClass { euler_characteristic: chi, orientable };
    if s.is_valid() {
        Ok(s)
    } else {
        Err(FlipkitError::new_err(format!("no closed surface with chi={chi}, orientable={orientable}")))
    }
}

/// A triangulation of a closed surface stored as a flag system.
#[pyclass(name = "Map", frozen)]
struct PyMap(TriangulationMap);

#[pymethods]
impl PyMap {
    /// Parses map or facet-list JSON.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::load_map(text).map(PyMap).map_err(err)
    }

    #[staticmethod]
    fn from_faces(faces: Vec<[u64; 3]>) -> PyResult<Self> {
        TriangulationMap::from_face_triples(&faces).map(PyMap).map_err(err)
    }

    #[staticmethod]
    fn seed(name: &str) -> PyResult<Self> {
        seeds::named_seed(name).map(PyMap).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (chi, v, orientable=true))]
    fn standard(chi: i64, v: usize, orientable: bool) -> PyResult<Self> {
        seeds::standard_seed(surface(chi, orientable)?, v).map(PyMap).map_err(err)
    }

    fn to_json(&self) -> String {
        io::map_to_json(&self.0)
    }

    fn counts(&self) -> (usize, usize, usize) {
        self.0.counts()
    }

    fn euler_characteristic(&self) -> i64 {
        self.0.euler_characteristic()
    }

    fn is_orientable(&self) -> bool {
        self.0.is_orientable()
    }

    fn is_regular(&self) -> bool {
        self.0.is_regular()
    }

    /// Hex canonical key; equal iff the maps are isomorphic.
    fn key(&self) -> String {
        flipkit::canonical_key(&self.0).to_hex()
    }

    /// Applies a move ("flip", "contract" or "subdivide") by canonical rank.
    fn apply(&self, kind: &str, target: usize) -> PyResult<Self> {
        let mv = match kind {
            "flip" => Move::flip(target),
            "contract" => Move::contract(target),
            "subdivide" => Move::subdivide(target),
            _ => return Err(FlipkitError::new_err(format!("unknown move {kind}"))),
        };
        moves::apply_move(&self.0, mv).map(PyMap).map_err(err)
    }

    fn regular_flip_count(&self) -> usize {
        self.0.edges().into_iter().filter(|&e| moves::is_regular_flip(&self.0, e)).count()
    }

    fn barycentric(&self) -> Self {
        PyMap(moves::barycentric(&self.0))
    }

    /// Returns the irreducible map and the contraction script as JSON.
    fn reduce(&self) -> PyResult<(Self, String)> {
        let (s, script) = moves::reduce_to_irreducible(&self.0).map_err(err)?;
        Ok((PyMap(s), script.to_json()))
    }

    fn __repr__(&self) -> String {
        let (v, e, f) = self.0.counts();
        format!("Map(v={v}, e={e}, f={f}, chi={})", self.0.euler_characteristic())
    }

    fn __eq__(&self, other: &PyMap) -> bool {
        flipkit::canonical_key(&self.0) == flipkit::canonical_key(&other.0)
    }
}

/// A verified regular-flip certificate.
#[pyclass(name = "Certificate", frozen)]
struct PyCertificate(EquivalenceCertificate);

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        EquivalenceCertificate::from_json(text).map(PyCertificate).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __len__(&self) -> usize {
        self.0.script.len()
    }

    #[getter]
    fn strategy(&self) -> Vec<String> {
        self.0.strategy.clone()
    }

    /// Replays the certificate; returns (accepted, reason).
    fn verify(&self) -> (bool, Option<String>) {
        let v = pipeline::verify_certificate(&self.0);
        (v.accepted, v.reason)
    }
}

/// Shortest flip script from `a` to `b`, as script JSON.
#[pyfunction]
#[pyo3(signature = (a, b, mode_name="regular", max_nodes=1_000_000))]
fn find_path(py: Python<'_>, a: &PyMap, b: &PyMap, mode_name: &str, max_nodes: usize) -> PyResult<String> {
    let m = mode(mode_name)?;
    py.detach(|| search::find_path(&a.0, &b.0, m, SearchBudget::nodes(max_nodes)))
        .map(|s| s.to_json())
        .map_err(err)
}

/// (total, regular) numbers of triangulations with `v` vertices.
#[pyfunction]
#[pyo3(signature = (chi, v, orientable=true, max_nodes=1_000_000))]
fn enumerate(py: Python<'_>, chi: i64, v: usize, orientable: bool, max_nodes: usize) -> PyResult<(usize, usize)> {
    let s = surface(chi, orientable)?;
    let en = py.detach(|| search::enumerate(s, v, SearchBudget::nodes(max_nodes))).map_err(err)?;
    Ok((en.keys.len(), en.regular_keys().len()))
}

#[pyfunction]
#[pyo3(signature = (a, b, direct=true, theorem=true, max_nodes=1_000_000))]
fn certify(
    py: Python<'_>,
    a: &PyMap,
    b: &PyMap,
    direct: bool,
    theorem: bool,
    max_nodes: usize,
) -> PyResult<PyCertificate> {
    let strategies = Strategies { direct, theorem };
    py.detach(|| pipeline::certify_equivalence(&a.0, &b.0, SearchBudget::nodes(max_nodes), strategies))
        .map(PyCertificate)
        .map_err(err)
}

/// (N, irreducible bound) for Euler characteristic `chi`.
#[pyfunction]
fn thresholds(chi: i64) -> (i64, i64) {
    let t = pipeline::Thresholds::for_chi(chi);
    (t.n, t.irreducible_bound)
}

#[pymodule(name = "flipkit")]
fn flipkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMap>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(find_path, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(thresholds, m)?)?;
    m.add("FlipkitError", m.py().get_type::<FlipkitError>())?;
    m.add("ExhaustedError", m.py().get_type::<ExhaustedError>())?;
    Ok(())
}
