//! Python bindings for the photonic GEMM accelerator design-space toolkit.
//!
//! Build with `cargo build -p photonic-dse-py --release` and import the
//! produced `libphotonic_dse.so` as `photonic_dse` (see python/smoke_test.py).

use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use photonic_dse_core::link_budget::ScalabilityQuery;
use photonic_dse_core::mapper::AcceleratorConfig;
use photonic_dse_core::simulator::{self, CountsMode};
use photonic_dse_core::workload;
use photonic_dse_core::{DpuOrganization, ParamSet};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_org(org: &str) -> PyResult<DpuOrganization> {
    DpuOrganization::from_str(org).map_err(err)
}

fn params_from(path: Option<PathBuf>) -> PyResult<ParamSet> {
    match path {
        Some(p) => ParamSet::from_file(&p).map_err(err),
        None => Ok(ParamSet::default()),
    }
}

/// The three organization names.
#[pyfunction]
fn organizations() -> Vec<&'static str> {
    vec!["asmw", "masw", "smwa"]
}

/// Crosstalk effects present in an organization.
#[pyfunction]
fn crosstalk_profile(org: &str) -> PyResult<HashMap<&'static str, bool>> {
    let p = photonic_dse_core::crosstalk_profile(parse_org(org)?);
    Ok(HashMap::from([
        ("inter_modulation", p.inter_modulation),
        ("cross_weight", p.cross_weight),
        ("filter_truncation", p.filter_truncation),
    ]))
}

/// Total through loss in dB for `n` channels at a per-device out-of-band loss.
#[pyfunction]
#[pyo3(signature = (org, n, per_device_obl_db = 0.01))]
fn through_loss_db(org: &str, n: u32, per_device_obl_db: f64) -> PyResult<f64> {
    photonic_dse_core::through_loss_db(parse_org(org)?, n, per_device_obl_db).map_err(err)
}

/// Aggregate network penalty in dB.
#[pyfunction]
fn network_penalty_db(org: &str) -> PyResult<f64> {
    Ok(photonic_dse_core::network_penalty_db(parse_org(org)?))
}

/// FSR-limited channel count for the default spectral parameters.
#[pyfunction]
#[pyo3(signature = (fsr_nm = 50.0, channel_spacing_nm = 0.25))]
fn fsr_limited_channels(fsr_nm: f64, channel_spacing_nm: f64) -> PyResult<u32> {
    let spectral = photonic_dse_core::SpectralParams {
        fsr_nm,
        fwhm_nm: 0.7,
        channel_spacing_nm,
    };
    photonic_dse_core::fsr_limited_channels(&spectral).map_err(err)
}

/// Receiver noise current density in A/sqrt(Hz) at a detector power in W.
#[pyfunction]
#[pyo3(signature = (p_pd_opt_w, params_path = None))]
fn noise_beta(p_pd_opt_w: f64, params_path: Option<PathBuf>) -> PyResult<f64> {
    photonic_dse_core::noise_beta(p_pd_opt_w, &params_from(params_path)?.link).map_err(err)
}

/// Effective number of bits at a detector power (W) and data rate (GS/s).
#[pyfunction]
#[pyo3(signature = (p_pd_opt_w, datarate_gsps, params_path = None))]
fn enob(p_pd_opt_w: f64, datarate_gsps: f64, params_path: Option<PathBuf>) -> PyResult<f64> {
    photonic_dse_core::enob(p_pd_opt_w, datarate_gsps, &params_from(params_path)?.link)
        .map_err(err)
}

/// Minimum detector power (dBm) for a bit precision at a data rate.
#[pyfunction]
#[pyo3(signature = (bit_precision, datarate_gsps, params_path = None))]
fn solve_p_pd_opt(
    bit_precision: f64,
    datarate_gsps: f64,
    params_path: Option<PathBuf>,
) -> PyResult<f64> {
    photonic_dse_core::solve_p_pd_opt(
        bit_precision,
        datarate_gsps,
        &params_from(params_path)?.link,
    )
    .map_err(err)
}

/// Delivered optical power (dBm) at the photodetector for fan-in n, fan-out m.
#[pyfunction]
#[pyo3(signature = (n, m, org, params_path = None))]
fn link_output_power(n: u32, m: u32, org: &str, params_path: Option<PathBuf>) -> PyResult<f64> {
    let p = params_from(params_path)?;
    photonic_dse_core::link_output_power(n, m, parse_org(org)?, &p.link, &p.penalties)
        .map_err(err)
}

/// Largest supported DPE size: returns (p_pd_opt_dbm, n_max, fsr_capped).
#[pyfunction]
#[pyo3(signature = (bit_precision, datarate_gsps, org, params_path = None))]
fn max_n(
    bit_precision: u8,
    datarate_gsps: f64,
    org: &str,
    params_path: Option<PathBuf>,
) -> PyResult<(Option<f64>, u32, bool)> {
    let r = photonic_dse_core::max_n(
        &ScalabilityQuery {
            bit_precision,
            datarate_gsps,
            org: parse_org(org)?,
        },
        &params_from(params_path)?,
    )
    .map_err(err)?;
    Ok((r.p_pd_opt_dbm, r.n_max, r.fsr_capped))
}

/// Full scalability sweep; rows are dicts keyed like the CSV header.
#[pyfunction]
#[pyo3(signature = (b_list, dr_list, orgs, params_path = None))]
fn sweep_scalability(
    py: Python<'_>,
    b_list: Vec<u8>,
    dr_list: Vec<f64>,
    orgs: Vec<String>,
    params_path: Option<PathBuf>,
) -> PyResult<Vec<Py<PyAny>>> {
    let orgs: Vec<DpuOrganization> = orgs
        .iter()
        .map(|s| parse_org(s))
        .collect::<PyResult<_>>()?;
    let rows = photonic_dse_core::sweep_scalability(
        &b_list,
        &dr_list,
        &orgs,
        &params_from(params_path)?,
    )
    .map_err(err)?;
    rows.iter()
        .map(|r| {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("org", r.org.name().to_ascii_lowercase())?;
            d.set_item("datarate_gsps", r.datarate_gsps)?;
            d.set_item("bit_precision", r.bit_precision)?;
            d.set_item("p_pd_opt_dbm", r.p_pd_opt_dbm)?;
            d.set_item("n_max", r.n_max)?;
            d.set_item("fsr_capped", r.fsr_capped)?;
            Ok(d.into_any().unbind())
        })
        .collect()
}

/// Bit-slice expansion: (input_slices, weight_slices, passes).
#[pyfunction]
fn bit_slices(model_bits: u32, hw_bits: u32) -> (u32, u32, u32) {
    let s = workload::bit_slices(model_bits, hw_bits);
    (s.input_slices, s.weight_slices, s.passes)
}

/// Published (N, DPU count) for an organization at a data rate.
#[pyfunction]
fn paper_dpu_config(org: &str, datarate_gsps: f64) -> PyResult<Option<(u32, u32)>> {
    Ok(photonic_dse_core::paper_dpu_config(
        parse_org(org)?,
        datarate_gsps,
    ))
}

/// A loaded CNN model descriptor.
#[pyclass(name = "CnnModel")]
struct PyCnnModel {
    inner: photonic_dse_core::CnnModel,
}

#[pymethods]
impl PyCnnModel {
    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn layer_count(&self) -> usize {
        self.inner.layers.len()
    }

    #[getter]
    fn gemm_layer_count(&self) -> usize {
        self.inner.gemm_layer_count()
    }

    fn total_macs(&self) -> PyResult<u64> {
        self.inner.total_macs().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "CnnModel(name='{}', layers={})",
            self.inner.name,
            self.inner.layers.len()
        )
    }
}

/// Load a model descriptor CSV.
#[pyfunction]
fn load_model(path: PathBuf) -> PyResult<PyCnnModel> {
    Ok(PyCnnModel {
        inner: workload::load_model(&path).map_err(err)?,
    })
}

fn report_to_dict(py: Python<'_>, r: &simulator::SimReport) -> PyResult<Py<PyAny>> {
    let d = pyo3::types::PyDict::new(py);
    d.set_item("model", &r.model)?;
    d.set_item("org", r.org.name().to_ascii_lowercase())?;
    d.set_item("datarate_gsps", r.datarate_gsps)?;
    d.set_item("n", r.n)?;
    d.set_item("m", r.m)?;
    d.set_item("dpu_count", r.dpu_count)?;
    d.set_item("latency_s", r.latency_s)?;
    d.set_item("energy_j", r.energy_j)?;
    d.set_item("avg_power_w", r.avg_power_w)?;
    d.set_item("area_mm2", r.area_mm2)?;
    d.set_item("fps", r.fps)?;
    d.set_item("fps_per_w", r.fps_per_w)?;
    d.set_item("fps_per_w_per_mm2", r.fps_per_w_per_mm2)?;
    d.set_item("degenerate", r.degenerate)?;
    let breakdown = pyo3::types::PyDict::new(py);
    for (comp, e) in &r.breakdown {
        breakdown.set_item(comp.name(), e)?;
    }
    d.set_item("energy_breakdown_j", breakdown)?;
    Ok(d.into_any().unbind())
}

/// Simulate one inference; paper_counts=True uses the published
/// (N, DPU count) table, otherwise n and dpu_count must be given.
#[pyfunction]
#[pyo3(signature = (model, org, datarate_gsps, n = None, dpu_count = None, paper_counts = false))]
fn run_inference(
    py: Python<'_>,
    model: &PyCnnModel,
    org: &str,
    datarate_gsps: f64,
    n: Option<u32>,
    dpu_count: Option<u32>,
    paper_counts: bool,
) -> PyResult<Py<PyAny>> {
    let org = parse_org(org)?;
    let config = if paper_counts {
        AcceleratorConfig::paper(org, datarate_gsps).map_err(err)?
    } else {
        match (n, dpu_count) {
            (Some(n), Some(c)) => AcceleratorConfig::new(org, n, c, datarate_gsps),
            _ => {
                return Err(PyValueError::new_err(
                    "pass n and dpu_count, or paper_counts=True",
                ))
            }
        }
    };
    let report = simulator::run_inference(&model.inner, &config).map_err(err)?;
    report_to_dict(py, &report)
}

/// Compare organizations across models and data rates; returns a dict with
/// "rows" (absolute + normalized metrics) and "gmeans".
#[pyfunction]
#[pyo3(signature = (model_paths, orgs = None, dr_list = None, paper_counts = true))]
fn compare(
    py: Python<'_>,
    model_paths: Vec<PathBuf>,
    orgs: Option<Vec<String>>,
    dr_list: Option<Vec<f64>>,
    paper_counts: bool,
) -> PyResult<Py<PyAny>> {
    let models: Vec<_> = model_paths
        .iter()
        .map(|p| workload::load_model(p).map_err(err))
        .collect::<PyResult<_>>()?;
    let orgs: Vec<DpuOrganization> = orgs
        .unwrap_or_else(|| vec!["asmw".into(), "masw".into(), "smwa".into()])
        .iter()
        .map(|s| parse_org(s))
        .collect::<PyResult<_>>()?;
    let dr_list = dr_list.unwrap_or_else(|| vec![1.0, 5.0, 10.0]);
    let mode = if paper_counts {
        CountsMode::Paper
    } else {
        CountsMode::AreaProportionate
    };
    let cmp = simulator::compare_accelerators(
        &models,
        &orgs,
        &dr_list,
        mode,
        &ParamSet::default(),
        simulator::sweep_threads(),
    )
    .map_err(err)?;
    let out = pyo3::types::PyDict::new(py);
    let rows: Vec<Py<PyAny>> = cmp
        .rows
        .iter()
        .map(|row| {
            let d = report_to_dict(py, &row.report)?;
            let bound = d.bind(py);
            bound.set_item("norm_fps", row.norm_fps)?;
            bound.set_item("norm_fps_per_w", row.norm_fps_per_w)?;
            bound.set_item("norm_fps_per_w_per_mm2", row.norm_fps_per_w_per_mm2)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    out.set_item("rows", rows)?;
    let gmeans: Vec<Py<PyAny>> = cmp
        .gmeans
        .iter()
        .map(|g| {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("org", g.org.name().to_ascii_lowercase())?;
            d.set_item("datarate_gsps", g.datarate_gsps)?;
            d.set_item("gmean_fps", g.gmean_fps)?;
            d.set_item("gmean_fps_per_w", g.gmean_fps_per_w)?;
            d.set_item("gmean_fps_per_w_per_mm2", g.gmean_fps_per_w_per_mm2)?;
            Ok(d.into_any().unbind())
        })
        .collect::<PyResult<_>>()?;
    out.set_item("gmeans", gmeans)?;
    Ok(out.into_any().unbind())
}

#[pymodule]
fn photonic_dse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(organizations, m)?)?;
    m.add_function(wrap_pyfunction!(crosstalk_profile, m)?)?;
    m.add_function(wrap_pyfunction!(through_loss_db, m)?)?;
    m.add_function(wrap_pyfunction!(network_penalty_db, m)?)?;
    m.add_function(wrap_pyfunction!(fsr_limited_channels, m)?)?;
    m.add_function(wrap_pyfunction!(noise_beta, m)?)?;
    m.add_function(wrap_pyfunction!(enob, m)?)?;
    m.add_function(wrap_pyfunction!(solve_p_pd_opt, m)?)?;
    m.add_function(wrap_pyfunction!(link_output_power, m)?)?;
    m.add_function(wrap_pyfunction!(max_n, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_scalability, m)?)?;
    m.add_function(wrap_pyfunction!(bit_slices, m)?)?;
    m.add_function(wrap_pyfunction!(paper_dpu_config, m)?)?;
    m.add_function(wrap_pyfunction!(load_model, m)?)?;
    m.add_function(wrap_pyfunction!(run_inference, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_class::<PyCnnModel>()?;
    Ok(())
}
