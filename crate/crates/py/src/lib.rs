//! Python bindings: `import mtlg`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use mtlg_core::config::GateFile;
use mtlg_core::device::{self, DeviceModel, MemristorState, Programmer};
use mtlg_core::gate::{self, boundary_grid, boundary_notes};
use mtlg_core::netfile::parse_netlist_str_with;
use mtlg_core::synth::{self, SynthesisResult, SynthesisSpec};
use mtlg_core::transient::{self, ClockSpec, TransientParams};
use mtlg_core::units::parse_weights;
use mtlg_core::{GateConfig, InputVector, Tap, TieRule, TruthTable, VoltageLevels};

create_exception!(
    mtlg,
    ModelError,
    PyException,
    "Infeasible, unresolved or out-of-range model input."
);

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn model_err(e: impl ToString) -> PyErr {
    ModelError::new_err(e.to_string())
}

fn tie_rule(name: &str) -> PyResult<TieRule> {
    name.parse().map_err(value_err)
}

fn profile(name: &str) -> PyResult<DeviceModel> {
    match name {
        "kohm" => Ok(DeviceModel::kohm()),
        "mohm" => Ok(DeviceModel::mohm()),
        other => Err(value_err(format!(
            "unknown profile {other:?} (expected kohm or mohm)"
        ))),
    }
}

/// Input bits as `"011"` or `[0, 1, 1]`, x1 first.
#[derive(FromPyObject)]
enum Bits {
    Text(String),
    List(Vec<i64>),
}

impl Bits {
    fn vector(&self) -> PyResult<InputVector> {
        match self {
            Bits::Text(s) => InputVector::parse(s).map_err(value_err),
            Bits::List(v) => v
                .iter()
                .map(|&b| match b {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(value_err(format!("input bits must be 0 or 1, got {other}"))),
                })
                .collect::<PyResult<Vec<_>>>()
                .map(InputVector::new),
        }
    }
}

fn parse_target(target: &str, n: usize) -> PyResult<TruthTable> {
    let t = target.trim();
    if !t.is_empty() && t.chars().all(|c| c == '0' || c == '1') {
        TruthTable::from_bitstring(t).map_err(value_err)
    } else {
        TruthTable::named(t, n).map_err(value_err)
    }
}

/// A threshold gate: input memristances, threshold memristances (ohms).
#[pyclass(name = "Gate", module = "mtlg", frozen, skip_from_py_object)]
struct PyGate {
    inner: GateConfig,
}

#[pymethods]
impl PyGate {
    #[new]
    #[pyo3(signature = (inputs, thresholds, tie_rule = "input-wins", v_dd = 0.65, v_high = 0.9, v_low = 0.0))]
    fn new(
        inputs: Vec<f64>,
        thresholds: Vec<f64>,
        tie_rule: &str,
        v_dd: f64,
        v_high: f64,
        v_low: f64,
    ) -> PyResult<Self> {
        let levels = VoltageLevels {
            v_dd,
            v_high,
            v_low,
        };
        let inner = GateConfig::new(inputs, thresholds)
            .and_then(|g| g.with_levels(levels))
            .map_err(value_err)?
            .with_tie_rule(self::tie_rule(tie_rule)?);
        Ok(PyGate { inner })
    }

    /// Builds a gate from `"M1,...,Mn;TH1,..."` with k/M suffixes.
    #[staticmethod]
    #[pyo3(signature = (weights, tie_rule = "input-wins"))]
    fn from_weights(weights: &str, tie_rule: &str) -> PyResult<Self> {
        let (inputs, thresholds) = parse_weights(weights).map_err(value_err)?;
        let inner = GateConfig::new(inputs, thresholds)
            .map_err(value_err)?
            .with_tie_rule(self::tie_rule(tie_rule)?);
        Ok(PyGate { inner })
    }

    #[getter]
    fn inputs(&self) -> Vec<f64> {
        self.inner.input_memristances().to_vec()
    }

    #[getter]
    fn thresholds(&self) -> Vec<f64> {
        self.inner.threshold_memristances().to_vec()
    }

    #[getter]
    fn n_inputs(&self) -> usize {
        self.inner.n_inputs()
    }

    #[getter]
    fn tie_rule(&self) -> &'static str {
        self.inner.tie_rule().name()
    }

    /// `(ca, co)` for one input vector.
    fn evaluate(&self, bits: Bits) -> PyResult<(bool, bool)> {
        let out = self.inner.evaluate(&bits.vector()?).map_err(value_err)?;
        Ok((out.ca, out.co))
    }

    /// `(i_in, i_th)` in amperes.
    fn branch_currents(&self, bits: Bits) -> PyResult<(f64, f64)> {
        let c = self
            .inner
            .branch_currents(&bits.vector()?)
            .map_err(value_err)?;
        Ok((c.i_in, c.i_th))
    }

    /// CA for every row; index 0 is the all-zeros input.
    fn truth_table(&self) -> PyResult<Vec<bool>> {
        Ok(self
            .inner
            .truth_table()
            .map_err(value_err)?
            .outputs()
            .to_vec())
    }

    /// CA table as a bit string, all-ones row first.
    fn bitstring(&self) -> PyResult<String> {
        Ok(self.inner.truth_table().map_err(value_err)?.to_bitstring())
    }

    fn classify(&self) -> PyResult<String> {
        let table = self.inner.truth_table().map_err(value_err)?;
        Ok(gate::classify(&table).to_string())
    }

    /// `(g, g_t)`: input conductances and threshold conductance.
    fn hyperplane(&self) -> (Vec<f64>, f64) {
        let h = self.inner.hyperplane();
        (h.g, h.g_t)
    }

    /// Classified grid over `[0,1]^n` as CSV text.
    #[pyo3(signature = (resolution = 101))]
    fn boundary_csv(&self, resolution: usize) -> PyResult<String> {
        Ok(boundary_grid(&self.inner, resolution)
            .map_err(value_err)?
            .to_csv())
    }

    fn boundary_notes(&self) -> PyResult<Vec<String>> {
        boundary_notes(&self.inner).map_err(value_err)
    }

    /// Clocked simulation; returns `(csv, resolved_per_cycle)`.
    #[pyo3(signature = (inputs, period = 2e-3, duty_eq = 0.5, sample_dt = None, tau = 100e-9, r_sense = 10e3, v_meta_floor = 1e-6))]
    #[allow(clippy::too_many_arguments)]
    fn simulate(
        &self,
        inputs: Vec<Bits>,
        period: f64,
        duty_eq: f64,
        sample_dt: Option<f64>,
        tau: f64,
        r_sense: f64,
        v_meta_floor: f64,
    ) -> PyResult<(String, Vec<bool>)> {
        let seq = inputs
            .iter()
            .map(Bits::vector)
            .collect::<PyResult<Vec<_>>>()?;
        let clock = ClockSpec {
            period,
            duty_eq,
            n_cycles: seq.len(),
            sample_dt: sample_dt.unwrap_or(period / 200.0),
        };
        let params = TransientParams {
            tau,
            r_sense,
            v_meta_floor,
        };
        let trace = transient::simulate(&self.inner, &seq, &clock, &params).map_err(value_err)?;
        Ok((
            trace.to_csv(),
            trace.cycles.iter().map(|c| c.resolved).collect(),
        ))
    }

    /// The gate file text read by `mtlg --gate`.
    #[pyo3(signature = (tap = "CA"))]
    fn to_toml(&self, tap: &str) -> PyResult<String> {
        let tap: Tap = tap.parse().map_err(value_err)?;
        Ok(GateFile::from_config(&self.inner, tap).to_toml())
    }

    fn __repr__(&self) -> String {
        format!(
            "Gate(inputs={:?}, thresholds={:?}, tie_rule={:?})",
            self.inner.input_memristances(),
            self.inner.threshold_memristances(),
            self.inner.tie_rule().name()
        )
    }
}

/// A synthesized gate.
#[pyclass(name = "Design", module = "mtlg", frozen, skip_from_py_object)]
struct PyDesign {
    inner: synth::Design,
}

#[pymethods]
impl PyDesign {
    #[getter]
    fn tap(&self) -> String {
        self.inner.tap.to_string()
    }

    #[getter]
    fn memristances(&self) -> Vec<f64> {
        self.inner.memristances.clone()
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.inner.threshold_memristance
    }

    #[getter]
    fn margin(&self) -> f64 {
        self.inner.achieved_margin
    }

    #[getter]
    fn quantized_levels(&self) -> Vec<usize> {
        self.inner.quantized_levels.clone()
    }

    #[getter]
    fn quantized_pass(&self) -> bool {
        self.inner.quantized_check.pass
    }

    #[getter]
    fn quantized_worst_margin(&self) -> f64 {
        self.inner.quantized_check.worst_margin
    }

    /// The continuous design.
    fn gate(&self) -> PyGate {
        PyGate {
            inner: self.inner.config.clone(),
        }
    }

    /// The design snapped to device levels.
    fn quantized_gate(&self) -> PyGate {
        PyGate {
            inner: self.inner.quantized_config.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Design(tap={}, memristances={:?}, threshold={}, margin={:.4})",
            self.inner.tap,
            self.inner.memristances,
            self.inner.threshold_memristance,
            self.inner.achieved_margin
        )
    }
}

/// Class name of a truth table given as a bit string (all-ones row first).
#[pyfunction]
fn classify(bits: &str) -> PyResult<String> {
    let table = TruthTable::from_bitstring(bits).map_err(value_err)?;
    Ok(gate::classify(&table).to_string())
}

/// `(separable, witness)`; the witness is `None` for separable targets.
#[pyfunction]
#[pyo3(signature = (target, n = 2))]
fn check_separability(target: &str, n: usize) -> PyResult<(bool, Option<String>)> {
    let sep = synth::check_separability(&parse_target(target, n)?).map_err(value_err)?;
    Ok((sep.is_separable(), sep.witness().map(|w| w.to_string())))
}

/// Synthesizes a gate; raises `ModelError` with the witness when infeasible.
#[pyfunction]
#[pyo3(signature = (target, n = 2, min_margin = 0.05, allow_complement = false, profile = "kohm", tie_rule = "input-wins"))]
fn synthesize(
    target: &str,
    n: usize,
    min_margin: f64,
    allow_complement: bool,
    profile: &str,
    tie_rule: &str,
) -> PyResult<PyDesign> {
    let mut spec = SynthesisSpec::new(parse_target(target, n)?, self::profile(profile)?);
    spec.min_margin_rel = min_margin;
    spec.allow_complement = allow_complement;
    spec.tie_rule = self::tie_rule(tie_rule)?;
    match synth::synthesize(&spec).map_err(model_err)? {
        SynthesisResult::Feasible(d) => Ok(PyDesign { inner: *d }),
        SynthesisResult::Infeasible(w) => Err(model_err(format!("not realizable: {w}"))),
    }
}

/// `(level, resistance)` of the nearest device level.
#[pyfunction]
#[pyo3(signature = (resistance, profile = "kohm"))]
fn quantize(resistance: f64, profile: &str) -> PyResult<(usize, f64)> {
    device::quantize(resistance, &self::profile(profile)?).map_err(model_err)
}

/// `(pulses, final_resistance)` of a closed-loop programming run.
#[pyfunction]
#[pyo3(signature = (target, start = None, tol = 0.01, max_pulses = 200, seed = 0, profile = "kohm"))]
fn program_to_target(
    target: f64,
    start: Option<f64>,
    tol: f64,
    max_pulses: usize,
    seed: u64,
    profile: &str,
) -> PyResult<(usize, f64)> {
    let model = self::profile(profile)?;
    let state = match start {
        Some(r) => MemristorState::new(model, r),
        None => MemristorState::reset(model),
    }
    .map_err(model_err)?;
    let report = Programmer::new(seed)
        .program(state, target, tol, max_pulses)
        .map_err(model_err)?;
    Ok((report.pulses(), report.state.resistance()))
}

/// Latch settle time in seconds, or `None` when unresolved.
#[pyfunction]
#[pyo3(signature = (delta_i, tau = 100e-9, r_sense = 10e3, v_meta_floor = 1e-6, v_dd = 0.65))]
fn settle_time(delta_i: f64, tau: f64, r_sense: f64, v_meta_floor: f64, v_dd: f64) -> Option<f64> {
    let params = TransientParams {
        tau,
        r_sense,
        v_meta_floor,
    };
    let levels = VoltageLevels {
        v_dd,
        ..VoltageLevels::default()
    };
    transient::settle_time(delta_i, &params, &levels).time()
}

/// Output tables of a netlist file's text: `[("C.CA", "0110"), ...]`.
#[pyfunction]
#[pyo3(signature = (text, tie_rule = "input-wins"))]
fn netlist_truth_tables(text: &str, tie_rule: &str) -> PyResult<Vec<(String, String)>> {
    let net = parse_netlist_str_with(text, self::tie_rule(tie_rule)?).map_err(value_err)?;
    let tables = net.network_truth_table().map_err(model_err)?;
    Ok(net
        .outputs
        .iter()
        .zip(tables)
        .map(|((g, tap), t)| (format!("{}.{tap}", net.gates[*g].name), t.to_bitstring()))
        .collect())
}

#[pymodule]
pub fn mtlg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("ModelError", m.py().get_type::<ModelError>())?;
    m.add_class::<PyGate>()?;
    m.add_class::<PyDesign>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(check_separability, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(program_to_target, m)?)?;
    m.add_function(wrap_pyfunction!(settle_time, m)?)?;
    m.add_function(wrap_pyfunction!(netlist_truth_tables, m)?)?;
    Ok(())
}
