//! Python bindings for `bertini-core`.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use bertini_core::bounds::{self, BoundQuery, PointMode, SolveOptions, ZetaSpec};
use bertini_core::error::Error;
use bertini_core::gf::FieldSpec;
use bertini_core::harness::{self, ExperimentPlan, Mode, Suite, SuiteParams};
use bertini_core::polyring::{FormTuple, HomogeneousForm};
use bertini_core::rigor::{default_bits, Enclosure};
use bertini_core::scheme::{self, EmbeddedScheme, SectionEngine};
use bertini_core::zeta::{self, WeilModel, ZetaQuery, ZetaSource, DEFAULT_E_CUTOFF};

create_exception!(bertini, BertiniError, PyException);
create_exception!(bertini, DomainError, BertiniError);
create_exception!(bertini, CapacityError, BertiniError);
create_exception!(bertini, UnsatWithinCap, BertiniError);
create_exception!(bertini, DivergenceError, BertiniError);
create_exception!(bertini, ParseError, BertiniError);

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Domain(_) => DomainError::new_err(msg),
        Error::Capacity(_) => CapacityError::new_err(msg),
        Error::UnsatWithinCap(_) => UnsatWithinCap::new_err(msg),
        Error::Divergence(_) => DivergenceError::new_err(msg),
        Error::Parse(_) => ParseError::new_err(msg),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for bertini_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

fn to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (v.to_string(),))?.unbind())
}

fn bits_or_default(bits: Option<u32>) -> u32 {
    bits.unwrap_or_else(default_bits)
}

/// A finite field `F_q` with its modulus.
#[pyclass(name = "Field", module = "bertini", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyField(FieldSpec);

#[pymethods]
impl PyField {
    /// `Field("9")`, `Field("3^2")` or `Field("3^2:1,0,1")`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        FieldSpec::parse(spec).py().map(PyField)
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p()
    }

    #[getter]
    fn m(&self) -> u32 {
        self.0.m()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.q()
    }

    #[getter]
    fn modulus(&self) -> Vec<u32> {
        self.0.modulus().to_vec()
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        self.0.add(a, b)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        self.0.mul(a, b)
    }

    fn inv(&self, a: u32) -> PyResult<u32> {
        self.0.inv(a).py()
    }

    fn pow(&self, a: u32, e: u64) -> u32 {
        self.0.pow(a, e)
    }

    fn __repr__(&self) -> String {
        format!("Field('{}')", self.0.name())
    }
}

/// A closed real interval with dyadic endpoints.
#[pyclass(name = "Enclosure", module = "bertini", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEnclosure(Enclosure);

#[pymethods]
impl PyEnclosure {
    /// Enclose a decimal or `a/b` literal.
    #[new]
    #[pyo3(signature = (value, bits=None))]
    fn new(value: &str, bits: Option<u32>) -> PyResult<Self> {
        Enclosure::parse(value, bits_or_default(bits)).py().map(PyEnclosure)
    }

    #[getter]
    fn lo(&self) -> f64 {
        self.0.lo_f64()
    }

    #[getter]
    fn hi(&self) -> f64 {
        self.0.hi_f64()
    }

    #[getter]
    fn bits(&self) -> u32 {
        self.0.bits()
    }

    /// Endpoints as decimal strings rounded outward.
    #[pyo3(signature = (digits=20))]
    fn endpoints(&self, digits: u32) -> (String, String) {
        (self.0.lo_string(digits), self.0.hi_string(digits))
    }

    /// Whether the exact rational `a/b` lies inside.
    fn contains(&self, value: &str) -> PyResult<bool> {
        let r = BigRational::from_str(value).map_err(|_| ParseError::new_err(format!("bad rational '{value}'")))?;
        Ok(self.0.contains_rational(&r))
    }

    fn __add__(&self, o: &PyEnclosure) -> PyEnclosure {
        PyEnclosure(self.0.add(&o.0))
    }

    fn __sub__(&self, o: &PyEnclosure) -> PyEnclosure {
        PyEnclosure(self.0.sub(&o.0))
    }

    fn __mul__(&self, o: &PyEnclosure) -> PyEnclosure {
        PyEnclosure(self.0.mul(&o.0))
    }

    fn __truediv__(&self, o: &PyEnclosure) -> PyResult<PyEnclosure> {
        self.0.div(&o.0).py().map(PyEnclosure)
    }

    fn sqrt(&self) -> PyResult<PyEnclosure> {
        self.0.sqrt().py().map(PyEnclosure)
    }

    fn ln(&self) -> PyResult<PyEnclosure> {
        self.0.ln().py().map(PyEnclosure)
    }

    fn exp(&self) -> PyEnclosure {
        PyEnclosure(self.0.exp())
    }

    fn __repr__(&self) -> String {
        format!("Enclosure{}", self.0)
    }
}

/// A variety with known point counts: projective spaces, elliptic curves
/// and their products.
#[pyclass(name = "WeilModel", module = "bertini", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWeilModel(WeilModel);

#[pymethods]
impl PyWeilModel {
    /// `WeilModel("pn:2@gf:3")`, `WeilModel("segre-power:elliptic:a=0^2@gf:3")`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        WeilModel::parse(spec, None).py().map(PyWeilModel)
    }

    #[getter]
    fn q(&self) -> u64 {
        self.0.q()
    }

    #[getter]
    fn dim(&self) -> u32 {
        self.0.dim()
    }

    /// `#X(F_{q^e})`.
    fn point_count(&self, e: u32) -> BigUint {
        self.0.point_count(e)
    }

    /// Closed-point counts `a_1..a_{e_max}`.
    fn closed_points(&self, e_max: u32) -> Vec<BigUint> {
        self.0.closed_points(e_max)
    }

    fn __repr__(&self) -> String {
        format!("WeilModel('{}')", self.0)
    }
}

/// A projective scheme given by equations.
#[pyclass(name = "Scheme", module = "bertini", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScheme(EmbeddedScheme);

#[pymethods]
impl PyScheme {
    /// `Scheme("pn:2", "2")` or `Scheme("ci:3;x0*x1-x2*x3", "3")`.
    #[new]
    fn new(spec: &str, gf: &str) -> PyResult<Self> {
        let f = FieldSpec::parse(gf).py()?;
        EmbeddedScheme::parse(spec, &f).py().map(PyScheme)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn degree(&self) -> u64 {
        self.0.degree()
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.0.ambient_r()
    }

    /// `(N_e, a_e)` for `e = 1..e_max`.
    fn census(&self, e_max: u32) -> PyResult<(Vec<u64>, Vec<u64>)> {
        let c = scheme::census(&self.0, e_max).py()?;
        Ok((c.n, c.a))
    }

    /// Classify the tuple `forms` with the Gröbner engine.
    fn decide(&self, forms: Vec<String>) -> PyResult<&'static str> {
        let fs = forms
            .iter()
            .map(|s| HomogeneousForm::parse(self.0.field(), self.0.nvars(), s))
            .collect::<bertini_core::Result<Vec<_>>>()
            .py()?;
        let t = FormTuple::new(fs).py()?;
        scheme::section_decide(&self.0, &t, SectionEngine::Groebner).py().map(|v| v.as_str())
    }

    fn __repr__(&self) -> String {
        format!("Scheme('{}', '{}')", self.0, self.0.field().name())
    }
}

/// `ζ_X(s)`; `s` defaults to `dim + 1/2`.
#[pyfunction]
#[pyo3(signature = (model, s=None, e_cutoff=DEFAULT_E_CUTOFF, bits=None))]
fn zeta_value(model: &PyWeilModel, s: Option<&str>, e_cutoff: u32, bits: Option<u32>) -> PyResult<PyEnclosure> {
    let mut q = ZetaQuery::half_past(ZetaSource::Model(model.0.clone()));
    if let Some(s) = s {
        q.s = BigRational::from_str(s).map_err(|_| ParseError::new_err(format!("bad rational '{s}'")))?;
    }
    q.e_cutoff = e_cutoff;
    zeta::zeta_enclosure(&q, bits_or_default(bits)).py().map(PyEnclosure)
}

/// The limiting Euler product for `k` sections.
#[pyfunction]
#[pyo3(signature = (model, k, e_cutoff=DEFAULT_E_CUTOFF, bits=None))]
fn euler_product(model: &PyWeilModel, k: u32, e_cutoff: u32, bits: Option<u32>) -> PyResult<PyEnclosure> {
    let src = ZetaSource::Model(model.0.clone());
    zeta::euler_product_enclosure(&src, model.0.dim(), k, e_cutoff, bits_or_default(bits)).py().map(PyEnclosure)
}

/// `L(q, n, k)` as the string `"a/b"`.
#[pyfunction]
fn l_fraction(q: u64, n: u32, k: u32) -> PyResult<String> {
    bounds::l_fraction(&BigInt::from(q), n, k).py().map(|r| r.to_string())
}

#[allow(clippy::too_many_arguments)]
fn query(
    q: u64,
    r: u32,
    n: u32,
    deg: BigUint,
    k: Option<u32>,
    model: Option<&PyWeilModel>,
    en_upper: bool,
    points: Option<u64>,
) -> PyResult<BoundQuery> {
    let mut bq = BoundQuery::new(q, r, n, deg).py()?;
    if let Some(k) = k {
        bq = bq.with_k(k).py()?;
    }
    if let Some(m) = model {
        bq = bq.with_zeta(ZetaSpec::Model { model: m.0.clone(), e_cutoff: DEFAULT_E_CUTOFF });
    } else if en_upper {
        bq = bq.with_zeta(ZetaSpec::EnUpper { n, q });
    }
    if let Some(v) = points {
        bq = bq.with_points(PointMode::Exact(v));
    }
    Ok(bq)
}

fn opts(bits: Option<u32>) -> SolveOptions {
    SolveOptions { start_bits: bits_or_default(bits), ..SolveOptions::default() }
}

/// Least certified `d` for `k` sections; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (q, r, n, deg=BigUint::from(1u32), k=None, model=None, en_upper=false, points=None, bits=None))]
#[allow(clippy::too_many_arguments)]
fn bound_thm_b(
    py: Python<'_>,
    q: u64,
    r: u32,
    n: u32,
    deg: BigUint,
    k: Option<u32>,
    model: Option<PyRef<'_, PyWeilModel>>,
    en_upper: bool,
    points: Option<u64>,
    bits: Option<u32>,
) -> PyResult<Py<PyAny>> {
    let bq = query(q, r, n, deg, k, model.as_deref(), en_upper, points)?;
    let rep = py.detach(|| bounds::bound_thm_b(&bq, &opts(bits))).py()?;
    to_py(py, &rep.to_json())
}

/// Curve degree and genus bound for a smooth curve on `X`.
#[pyfunction]
#[pyo3(signature = (q, r, n, deg=BigUint::from(1u32), model=None, en_upper=false, points=None, bits=None))]
#[allow(clippy::too_many_arguments)]
fn bound_general(
    py: Python<'_>,
    q: u64,
    r: u32,
    n: u32,
    deg: BigUint,
    model: Option<PyRef<'_, PyWeilModel>>,
    en_upper: bool,
    points: Option<u64>,
    bits: Option<u32>,
) -> PyResult<Py<PyAny>> {
    let bq = query(q, r, n, deg, None, model.as_deref(), en_upper, points)?;
    let rep = py.detach(|| bounds::bound_general(&bq, &opts(bits))).py()?;
    to_py(py, &rep.to_json())
}

/// The simple abelian variety pipeline.
#[pyfunction]
fn bound_simple(py: Python<'_>, q: u64, n: u32, deg: BigUint) -> PyResult<Py<PyAny>> {
    let bq = BoundQuery::new(q, n, n, deg).py()?;
    let rep = bounds::bound_simple(&bq, &SolveOptions::default()).py()?;
    to_py(py, &rep.to_json())
}

/// `B_{n,q}`.
#[pyfunction]
#[pyo3(signature = (n, q, bits=None))]
fn corollary(py: Python<'_>, n: u32, q: u64, bits: Option<u32>) -> PyResult<Py<PyAny>> {
    let rep = py.detach(|| bounds::corollary_pipeline(n, q, &opts(bits))).py()?;
    to_py(py, &rep.to_json())
}

/// Whether `g - sqrt(log log g / (6 log q)) >= n` is certified.
#[pyfunction]
#[pyo3(signature = (n, q, g, bits=None))]
fn ehr(n: BigUint, q: u64, g: BigUint, bits: Option<u32>) -> PyResult<String> {
    let v = bounds::ehr_constraint(&n, q, &g, bits_or_default(bits)).py()?;
    Ok(format!("{v:?}").to_lowercase())
}

fn plan(
    x: &PyScheme,
    degrees: Vec<u32>,
    count: Option<u64>,
    seed: Option<u64>,
    engine: &str,
    e_max: u32,
    partitions: u64,
) -> PyResult<ExperimentPlan> {
    let mode = match (count, seed) {
        (None, None) => Mode::Exhaustive,
        (Some(count), Some(seed)) => Mode::Sample { count, seed },
        _ => return Err(DomainError::new_err("sampling needs both count and seed")),
    };
    let engine = match engine {
        "groebner" => SectionEngine::Groebner,
        "pointscan" => SectionEngine::PointScan { e_max },
        e => return Err(ParseError::new_err(format!("unknown engine '{e}'"))),
    };
    Ok(ExperimentPlan::new(x.0.clone(), degrees, mode, engine).py()?.with_partitions(partitions))
}

/// Fraction of tuples of the given degrees cutting `x` smoothly.
/// Exhaustive unless `count` and `seed` are given.
#[pyfunction]
#[pyo3(signature = (x, degrees, count=None, seed=None, engine="groebner", e_max=8, partitions=16))]
#[allow(clippy::too_many_arguments)]
fn run_fraction(
    py: Python<'_>,
    x: &PyScheme,
    degrees: Vec<u32>,
    count: Option<u64>,
    seed: Option<u64>,
    engine: &str,
    e_max: u32,
    partitions: u64,
) -> PyResult<Py<PyAny>> {
    let p = plan(x, degrees, count, seed, engine, e_max, partitions)?;
    let r = py.detach(|| harness::run_fraction(&p)).py()?;
    let mut j = r.to_json();
    if !r.exhaustive {
        let (lo, hi) = harness::sample_ci(&r, 0.05).py()?;
        j["ci95"] = serde_json::json!([lo, hi]);
    }
    to_py(py, &j)
}

/// Exhaustive fraction against the Euler product and error term.
#[pyfunction]
#[pyo3(signature = (x, degrees, e_cutoff=DEFAULT_E_CUTOFF, bits=None))]
fn verify_bk(py: Python<'_>, x: &PyScheme, degrees: Vec<u32>, e_cutoff: u32, bits: Option<u32>) -> PyResult<Py<PyAny>> {
    let p = plan(x, degrees, None, None, "groebner", 8, 16)?;
    let r = py.detach(|| harness::verify_bk(&p, e_cutoff, bits_or_default(bits))).py()?;
    to_py(py, &r.to_json())
}

/// Run a verifier suite: `lemma33` (needs `seed`), `lemma34`, `prop32`, `lemma52`.
#[pyfunction]
#[pyo3(signature = (name, seed=None, sequences=10_000, qmax=9, nmax=6, tmax=6))]
fn verify_suite(
    py: Python<'_>,
    name: &str,
    seed: Option<u64>,
    sequences: u64,
    qmax: u64,
    nmax: u32,
    tmax: u32,
) -> PyResult<Py<PyAny>> {
    let suite = Suite::from_str(name).py()?;
    let mut p = SuiteParams { sequences, qmax, nmax, tmax, ..SuiteParams::default() };
    if suite == Suite::Lemma33 {
        p.seed = seed.ok_or_else(|| DomainError::new_err("lemma33 is randomized; pass seed"))?;
    }
    let r = py.detach(|| harness::verify_lemma_suite(suite, &p)).py()?;
    to_py(py, &r.to_json())
}

/// Run the command line in-process; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn cli(args: Vec<String>) -> (i32, String, String) {
    bertini_core::cli::run(std::iter::once("bertini".to_string()).chain(args))
}

#[pymodule]
fn bertini(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyField>()?;
    m.add_class::<PyEnclosure>()?;
    m.add_class::<PyWeilModel>()?;
    m.add_class::<PyScheme>()?;
    m.add_function(wrap_pyfunction!(zeta_value, m)?)?;
    m.add_function(wrap_pyfunction!(euler_product, m)?)?;
    m.add_function(wrap_pyfunction!(l_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(bound_thm_b, m)?)?;
    m.add_function(wrap_pyfunction!(bound_general, m)?)?;
    m.add_function(wrap_pyfunction!(bound_simple, m)?)?;
    m.add_function(wrap_pyfunction!(corollary, m)?)?;
    m.add_function(wrap_pyfunction!(ehr, m)?)?;
    m.add_function(wrap_pyfunction!(run_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(verify_bk, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    m.add("BertiniError", py.get_type::<BertiniError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("CapacityError", py.get_type::<CapacityError>())?;
    m.add("UnsatWithinCap", py.get_type::<UnsatWithinCap>())?;
    m.add("DivergenceError", py.get_type::<DivergenceError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    Ok(())
}
