//! Python bindings: code and scheme construction, the four engines,
//! decay fits, threshold and Lambda estimates, and ion rates.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tdqec::analysis::{self, PlTable, SizeConvention};
use tdqec::codes::{self, build_repetition};
use tdqec::engines::{
    codeword_start, gillespie_ensemble, infidelity_series, lindblad_dense_evolve, mcwf_ensemble,
    weight_chain_generator, weight_chain_transient, EngineKind, EngineOutput, LogicalState, SimConfig, TimeSeries,
};
use tdqec::ion::{IonParams, Tone, ToneSet};
use tdqec::opcore::{StateVector, C64};
use tdqec::pipeline::SchemeSpec;

fn err(e: tdqec::Error) -> PyErr {
    use tdqec::Error as E;
    match e {
        E::InvalidCodeSize(_)
        | E::TruncationOutOfRange { .. }
        | E::InvalidIonParams(_)
        | E::InvalidTones(_)
        | E::InvalidConfig(_)
        | E::DimensionMismatch { .. }
        | E::SyndromeLength { .. }
        | E::DegenerateData(_)
        | E::InsufficientSizes { .. }
        | E::DegenerateTarget(_)
        | E::NoSuppression { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

#[pyclass(name = "RepetitionCode", frozen)]
struct PyCode(codes::RepetitionCode);

#[pymethods]
impl PyCode {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        build_repetition(n).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn ell(&self) -> usize {
        self.0.ell()
    }

    /// Parity checks as bit masks over neighbouring qubits.
    fn checks(&self) -> Vec<u64> {
        self.0.checks()
    }

    fn __repr__(&self) -> String {
        format!("RepetitionCode(n={})", self.0.n())
    }
}

#[pyclass(name = "IonParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyIonParams(IonParams);

#[pymethods]
impl PyIonParams {
    #[new]
    #[pyo3(signature = (omega, delta_big, delta_small, g_coupling, kappa_eng, sequential_groups = 1))]
    fn new(
        omega: f64,
        delta_big: f64,
        delta_small: f64,
        g_coupling: f64,
        kappa_eng: f64,
        sequential_groups: usize,
    ) -> PyResult<Self> {
        let p = IonParams { omega, delta_big, delta_small, g_coupling, kappa_eng, sequential_groups };
        p.validate().map_err(err)?;
        Ok(Self(p))
    }

    fn peak_rate(&self) -> f64 {
        self.0.peak_rate()
    }

    /// Lorentzian center for coupling `g` (defaults to `g_coupling`).
    #[pyo3(signature = (g = None))]
    fn center(&self, g: Option<f64>) -> f64 {
        self.0.center(g.unwrap_or(self.0.g_coupling))
    }
}

/// `[(x0, g or None), ...]`, or every correctable weight when omitted.
fn tone_set(tones: Option<Vec<(usize, Option<f64>)>>, ell: usize) -> ToneSet {
    match tones {
        Some(t) => ToneSet { tones: t.into_iter().map(|(x0, g)| Tone { x0, g }).collect() },
        None => ToneSet::full(ell),
    }
}

#[pyclass(name = "JumpSet", frozen)]
struct PyJumpSet(codes::JumpSet);

#[pymethods]
impl PyJumpSet {
    #[staticmethod]
    fn lookup(n: usize, gamma_c: f64, gamma_e: f64) -> PyResult<Self> {
        SchemeSpec::LookupTable.build(n, gamma_c, gamma_e).map(Self).map_err(err)
    }

    /// Trickle-down correction up to order `m` (all orders by default).
    #[staticmethod]
    #[pyo3(signature = (n, gamma_c, gamma_e, m = None))]
    fn trickle(n: usize, gamma_c: f64, gamma_e: f64, m: Option<usize>) -> PyResult<Self> {
        SchemeSpec::TrickleDown { m }.build(n, gamma_c, gamma_e).map(Self).map_err(err)
    }

    #[staticmethod]
    fn three_qubit(gamma_c: f64, gamma_e: f64) -> PyResult<Self> {
        SchemeSpec::ThreeQubit.build(3, gamma_c, gamma_e).map(Self).map_err(err)
    }

    #[staticmethod]
    fn uncorrected(n: usize, gamma_e: f64) -> PyResult<Self> {
        SchemeSpec::Uncorrected.build(n, 0.0, gamma_e).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, params, gamma_e, tones = None))]
    fn ion(n: usize, params: &PyIonParams, gamma_e: f64, tones: Option<Vec<(usize, Option<f64>)>>) -> PyResult<Self> {
        let code = build_repetition(n).map_err(err)?;
        let tones = tone_set(tones, code.ell());
        tdqec::ion::build_ion_jump_set(code, &params.0, &tones, gamma_e).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn ell(&self) -> usize {
        self.0.code.ell()
    }

    #[getter]
    fn gamma_e(&self) -> f64 {
        self.0.gamma_e
    }

    #[getter]
    fn num_corrections(&self) -> usize {
        self.0.corrections.len()
    }

    #[getter]
    fn num_errors(&self) -> usize {
        self.0.errors.len()
    }

    /// Total jump rate out of basis state `bits`.
    fn total_rate(&self, bits: u64) -> f64 {
        self.0.total_rate(bits)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("jump sets serialize")
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("JumpSet(n={}, corrections={}, errors={})", self.0.n(), self.0.corrections.len(), self.0.errors.len())
    }
}

fn series_dict<'py>(py: Python<'py>, s: &TimeSeries) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("times", s.times.clone())?;
    d.set_item("values", s.values.clone())?;
    d.set_item("stderr", s.stderr.clone())?;
    Ok(d)
}

/// Decoded infidelity at absolute `times`. `engine` is one of
/// `chain`, `dense`, `mcwf`, `gillespie`; `alpha`, `beta` give the logical
/// state (default `(|0_L> + i|1_L>)/sqrt(2)`). Returns a dict with
/// `times`, `values` and `stderr` (None for exact engines).
#[pyfunction]
#[pyo3(signature = (jumps, times, engine = "chain", n_traj = 1000, seed = 0, dt = None, alpha = None, beta = None))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    jumps: &PyJumpSet,
    times: Vec<f64>,
    engine: &str,
    n_traj: usize,
    seed: u64,
    dt: Option<f64>,
    alpha: Option<(f64, f64)>,
    beta: Option<(f64, f64)>,
) -> PyResult<Bound<'py, PyDict>> {
    let engine: EngineKind = engine.parse().map_err(err)?;
    let initial = match (alpha, beta) {
        (None, None) => LogicalState::default(),
        (a, b) => {
            let c = |z: Option<(f64, f64)>| z.map_or(C64::new(0.0, 0.0), |(re, im)| C64::new(re, im));
            LogicalState::new(c(a), c(b)).map_err(err)?
        }
    };
    let set = &jumps.0;
    let series = py
        .detach(|| -> tdqec::Result<TimeSeries> {
            match engine {
                EngineKind::Chain => {
                    let gen = weight_chain_generator(set.code, set)?;
                    let mut s = weight_chain_transient(&gen, &codeword_start(set.n()), &times)?;
                    let k = initial.flip_factor();
                    s.values.iter_mut().for_each(|v| *v *= k);
                    Ok(s)
                }
                EngineKind::Dense => {
                    let rho0 = StateVector::logical(initial.alpha, initial.beta, set.n())?.projector();
                    let states = lindblad_dense_evolve(&rho0, set, &times)?;
                    infidelity_series(&EngineOutput::Densities { times: times.clone(), states }, set.code, &initial)
                }
                EngineKind::Mcwf | EngineKind::Gillespie => {
                    let cfg = SimConfig {
                        t_max: times.last().copied().unwrap_or(0.0),
                        t_grid: times.clone(),
                        n_traj,
                        dt,
                        master_seed: seed,
                        engine,
                        initial,
                    };
                    let run = if engine == EngineKind::Mcwf { mcwf_ensemble } else { gillespie_ensemble };
                    Ok(run(set, &cfg)?.0)
                }
            }
        })
        .map_err(err)?;
    series_dict(py, &series)
}

#[pyclass(name = "FitResult", frozen, get_all)]
struct PyFit {
    epsilon: f64,
    tau: f64,
    p_l: f64,
    covariance: [[f64; 2]; 2],
    residual_norm: f64,
    iterations: usize,
    converged: bool,
}

#[pymethods]
impl PyFit {
    fn __repr__(&self) -> String {
        format!("FitResult(epsilon={:.6e}, tau={:.6e}, p_l={:.6e})", self.epsilon, self.tau, self.p_l)
    }
}

impl From<analysis::FitResult> for PyFit {
    fn from(f: analysis::FitResult) -> Self {
        Self {
            epsilon: f.epsilon,
            tau: f.tau,
            p_l: f.p_l,
            covariance: f.covariance,
            residual_norm: f.residual_norm,
            iterations: f.iterations,
            converged: f.converged,
        }
    }
}

/// Fits `I = (1 - exp(-eps (t - tau))) / 2` to an infidelity curve with
/// times in units of `1/gamma_e`.
#[pyfunction]
fn fit_infidelity(times: Vec<f64>, values: Vec<f64>, ell: usize) -> PyResult<PyFit> {
    let series = TimeSeries { times, values, stderr: None };
    analysis::fit_infidelity(&series, ell).map(PyFit::from).map_err(err)
}

/// Exact fitted logical error rate of one `(scheme, n, gamma_e)` cell.
#[pyfunction]
#[pyo3(signature = (scheme, n, gamma_c, gamma_e, m = None))]
fn fit_cell(scheme: &str, n: usize, gamma_c: f64, gamma_e: f64, m: Option<usize>) -> PyResult<PyFit> {
    let spec = match scheme {
        "lookup" => SchemeSpec::LookupTable,
        "trickle" => SchemeSpec::TrickleDown { m },
        "three_qubit" => SchemeSpec::ThreeQubit,
        "none" => SchemeSpec::Uncorrected,
        other => return Err(PyValueError::new_err(format!("unknown scheme {other:?}"))),
    };
    tdqec::pipeline::fit_cell(&spec, n, gamma_c, gamma_e).map(PyFit::from).map_err(err)
}

fn table(sizes: Vec<usize>, gamma_es: Vec<f64>, p_l: Vec<Vec<Option<f64>>>) -> PyResult<PlTable> {
    PlTable::new(sizes, gamma_es, p_l).map_err(err)
}

/// Pairwise crossings of `p_L(gamma_e)` curves; `p_l[i][j]` belongs to
/// `sizes[i]` and `gamma_es[j]`, with None for missing cells.
#[pyfunction]
fn threshold<'py>(
    py: Python<'py>,
    sizes: Vec<usize>,
    gamma_es: Vec<f64>,
    p_l: Vec<Vec<Option<f64>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let t = analysis::threshold_estimate(&table(sizes, gamma_es, p_l)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("median", t.median)?;
    d.set_item("extreme_pair", t.extreme_pair)?;
    let crossings: Vec<(usize, usize, f64)> = t.crossings.iter().map(|c| (c.n_small, c.n_large, c.gamma_e)).collect();
    d.set_item("crossings", crossings)?;
    Ok(d)
}

/// Suppression factor per error rate and the fit `Lambda = A/gamma_e + B`.
#[pyfunction]
fn lambda_estimate<'py>(
    py: Python<'py>,
    sizes: Vec<usize>,
    gamma_es: Vec<f64>,
    p_l: Vec<Vec<Option<f64>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let l = analysis::lambda_estimate(&table(sizes, gamma_es, p_l)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("a", l.a)?;
    d.set_item("b", l.b)?;
    d.set_item("gamma_e_star", l.gamma_e_star)?;
    let points: Vec<(f64, f64)> = l.points.iter().map(|p| (p.gamma_e, p.mean)).collect();
    d.set_item("points", points)?;
    Ok(d)
}

/// Code size reaching `target` at `gamma_e`; returns `(exponent, n_real, n)`.
#[pyfunction]
#[pyo3(signature = (gamma_e_star, prefactor, gamma_e, target, convention = "distance"))]
fn extrapolate_qubits(
    gamma_e_star: f64,
    prefactor: f64,
    gamma_e: f64,
    target: f64,
    convention: &str,
) -> PyResult<(f64, f64, usize)> {
    let convention = match convention {
        "distance" => SizeConvention::Distance,
        "shifted" => SizeConvention::Shifted,
        other => return Err(PyValueError::new_err(format!("unknown convention {other:?}"))),
    };
    let x = analysis::extrapolate_qubits(gamma_e_star, prefactor, gamma_e, target, convention).map_err(err)?;
    Ok((x.exponent, x.n_real, x.n))
}

/// `(c, desired, undesired, desired_normalized, undesired_normalized)`.
type RateRow = (usize, f64, f64, f64, f64);

/// One row per coset weight `c = 0..=ell`.
#[pyfunction]
#[pyo3(signature = (n, params, tones = None))]
fn ion_rates(n: usize, params: &PyIonParams, tones: Option<Vec<(usize, Option<f64>)>>) -> PyResult<Vec<RateRow>> {
    let tones = tone_set(tones, n.saturating_sub(1) / 2);
    let rows = tdqec::ion::rates_table(n, &params.0, &tones).map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.c, r.desired_rate, r.undesired_rate, r.desired_normalized, r.undesired_normalized))
        .collect())
}

/// Engineered rate at continuous weight `x` for a single coupling.
#[pyfunction]
fn kappa_eff(x: f64, params: &PyIonParams) -> PyResult<f64> {
    tdqec::ion::kappa_eff(x, &params.0).map_err(err)
}

/// Number of distinct coset projectors in one trickle-down jump.
#[pyfunction]
fn n_proj_count(n: usize, ell: usize) -> PyResult<u128> {
    codes::n_proj_count(n, ell).map_err(err)
}

#[pymodule]
fn tdqec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCode>()?;
    m.add_class::<PyIonParams>()?;
    m.add_class::<PyJumpSet>()?;
    m.add_class::<PyFit>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(fit_infidelity, m)?)?;
    m.add_function(wrap_pyfunction!(fit_cell, m)?)?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(extrapolate_qubits, m)?)?;
    m.add_function(wrap_pyfunction!(ion_rates, m)?)?;
    m.add_function(wrap_pyfunction!(kappa_eff, m)?)?;
    m.add_function(wrap_pyfunction!(n_proj_count, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
