//! Python bindings: images, the three detectors, scene synthesis and
//! scoring.

use std::f64::consts::PI;

use ::arcscan as core;
use core::baselines::{EvmConfig, RhtConfig};
use core::csa::{ArcRecord, CsaConfig};
use core::eval::{GroundTruth, SceneSpec, Tolerance};
use core::raster::{BinaryImage, Pixel};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A binary raster image; `True` pixels are object pixels.
#[pyclass(name = "Image", module = "arcscan")]
pub struct PyImage {
    inner: BinaryImage,
}

#[pymethods]
impl PyImage {
    #[new]
    fn new(width: usize, height: usize) -> PyResult<Self> {
        if width == 0 || height == 0 {
            return Err(to_py(core::Error::EmptyImage));
        }
        Ok(PyImage {
            inner: BinaryImage::new(width, height),
        })
    }

    /// Reads PNG, PGM or PBM; gray levels below `threshold` are object pixels.
    #[staticmethod]
    #[pyo3(signature = (path, threshold = 128))]
    fn load(path: &str, threshold: u8) -> PyResult<Self> {
        core::raster::load_binary(path, threshold)
            .map(|inner| PyImage { inner })
            .map_err(to_py)
    }

    /// Builds an image from rows of truthy values.
    #[staticmethod]
    fn from_rows(rows: Vec<Vec<bool>>) -> PyResult<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(PyValueError::new_err("rows differ in length"));
        }
        BinaryImage::from_bits(width, height, rows.concat())
            .map(|inner| PyImage { inner })
            .map_err(to_py)
    }

    /// PNG for `.png` paths, PBM otherwise.
    fn save(&self, path: &str) -> PyResult<()> {
        core::raster::save_binary(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    fn count(&self) -> usize {
        self.inner.count()
    }

    fn get(&self, x: i32, y: i32) -> bool {
        self.inner.get(Pixel::new(x, y))
    }

    fn set(&mut self, x: i32, y: i32, value: bool) -> PyResult<()> {
        let p = Pixel::new(x, y);
        if !self.inner.in_bounds(p) {
            return Err(PyValueError::new_err(format!("({x}, {y}) is outside the image")));
        }
        self.inner.set(p, value);
        Ok(())
    }

    fn object_pixels(&self) -> Vec<(i32, i32)> {
        self.inner.object_pixels().map(|p| (p.x, p.y)).collect()
    }

    fn thin(&self) -> Self {
        PyImage {
            inner: core::raster::thin(&self.inner),
        }
    }

    fn rotate(&self, degrees: f64) -> Self {
        PyImage {
            inner: core::raster::rotate(&self.inner, degrees),
        }
    }

    /// Flips `round(fraction * width * height)` seeded random pixels.
    #[pyo3(signature = (fraction, seed = 0))]
    fn add_noise(&self, fraction: f64, seed: u64) -> PyResult<Self> {
        core::raster::add_salt_pepper(&self.inner, fraction, seed)
            .map(|inner| PyImage { inner })
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Image({}x{}, {} object pixels)",
            self.inner.width(),
            self.inner.height(),
            self.inner.count()
        )
    }
}

/// A detected circle or arc.
#[pyclass(name = "Arc", module = "arcscan", frozen)]
pub struct PyArc {
    inner: ArcRecord,
}

#[pymethods]
impl PyArc {
    #[getter]
    fn center(&self) -> (f64, f64) {
        (self.inner.center.x, self.inner.center.y)
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    /// `"sagitta"` or `"hough"`.
    #[getter]
    fn source(&self) -> &'static str {
        match self.inner.source {
            core::csa::ArcSource::Sagitta => "sagitta",
            core::csa::ArcSource::Hough => "hough",
        }
    }

    #[getter]
    fn closed(&self) -> bool {
        self.inner.segment.is_closed()
    }

    #[getter]
    fn endpoints(&self) -> ((i32, i32), (i32, i32)) {
        let (a, b) = self.inner.segment.endpoints();
        ((a.x, a.y), (b.x, b.y))
    }

    /// Skeleton pixels of the arc, joined pieces included.
    fn skeleton(&self) -> Vec<(i32, i32)> {
        self.inner.skeleton_pixels().map(|p| (p.x, p.y)).collect()
    }

    /// Input pixels attributed to the arc.
    fn pixels(&self) -> Vec<(i32, i32)> {
        self.inner.absorbed.iter().map(|p| (p.x, p.y)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Arc(center=({:.2}, {:.2}), radius={:.2}, closed={})",
            self.inner.center.x,
            self.inner.center.y,
            self.inner.radius,
            self.inner.segment.is_closed()
        )
    }
}

fn wrap(arcs: Vec<ArcRecord>) -> Vec<PyArc> {
    arcs.into_iter().map(|inner| PyArc { inner }).collect()
}

/// Ground truth of a synthetic scene.
#[pyclass(name = "Truth", module = "arcscan", frozen)]
pub struct PyTruth {
    inner: GroundTruth,
}

#[pymethods]
impl PyTruth {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        GroundTruth::load(path).map(|inner| PyTruth { inner }).map_err(to_py)
    }

    /// Writes the JSON and its two mask images next to it.
    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path).map_err(to_py)
    }

    /// `(cx, cy, r)` of every true circle or arc.
    #[getter]
    fn primitives(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .primitives
            .iter()
            .map(|p| (p.center.x, p.center.y, p.radius))
            .collect()
    }

    #[getter]
    fn arc_mask(&self) -> PyImage {
        PyImage {
            inner: self.inner.arc_mask.clone(),
        }
    }

    #[getter]
    fn curves_mask(&self) -> PyImage {
        PyImage {
            inner: self.inner.all_curves_mask.clone(),
        }
    }
}

/// Chord-and-sagitta detection.
#[pyfunction]
#[pyo3(signature = (image, tau_h = 2, tau_c = 7, delta_phi = PI / 18.0, budget = 2000))]
fn detect(py: Python<'_>, image: &PyImage, tau_h: i64, tau_c: usize, delta_phi: f64, budget: usize) -> PyResult<Vec<PyArc>> {
    let cfg = CsaConfig {
        tau_h,
        tau_c,
        delta_phi,
        hough_triple_budget: budget,
        ..CsaConfig::default()
    };
    let img = &image.inner;
    py.detach(|| core::csa::detect(img, &cfg)).map(wrap).map_err(to_py)
}

/// Randomized Hough transform.
#[pyfunction]
#[pyo3(signature = (image, n_t = 2, t_r = 0.46, seed = 0, max_steps = 100_000))]
fn rht_detect(py: Python<'_>, image: &PyImage, n_t: u32, t_r: f64, seed: u64, max_steps: usize) -> PyResult<Vec<PyArc>> {
    let cfg = RhtConfig {
        n_t,
        t_r,
        rng_seed: seed,
        max_steps,
        ..RhtConfig::default()
    };
    let img = &image.inner;
    py.detach(|| core::baselines::rht_detect(img, &cfg)).map(wrap).map_err(to_py)
}

/// Effective voting method.
#[pyfunction]
#[pyo3(signature = (image, t_e = 0.5, samples = 200, seed = 0))]
fn evm_detect(py: Python<'_>, image: &PyImage, t_e: f64, samples: usize, seed: u64) -> PyResult<Vec<PyArc>> {
    let cfg = EvmConfig {
        t_e,
        sample_count: samples,
        rng_seed: seed,
        ..EvmConfig::default()
    };
    let img = &image.inner;
    py.detach(|| core::baselines::evm_detect(img, &cfg)).map(wrap).map_err(to_py)
}

/// Draws a scene from a JSON description, or a random one from `seed`.
#[pyfunction]
#[pyo3(signature = (spec = None, seed = 0, width = 800, height = 800))]
fn synth_scene(spec: Option<&str>, seed: u64, width: usize, height: usize) -> PyResult<(PyImage, PyTruth)> {
    let spec = match spec {
        Some(text) => serde_json::from_str::<SceneSpec>(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        None => core::eval::random_scene_spec(seed, width, height),
    };
    let (img, truth) = core::eval::synth_scene(&spec).map_err(to_py)?;
    Ok((PyImage { inner: img }, PyTruth { inner: truth }))
}

fn report_dict<'py>(py: Python<'py>, m: &core::eval::MetricsReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n_c", m.n_c)?;
    d.set_item("n_g", m.n_g)?;
    d.set_item("n_p", m.n_p)?;
    d.set_item("n_fa", m.n_fa)?;
    d.set_item("n_fr", m.n_fr)?;
    d.set_item("e1", m.e1.unwrap_or(f64::INFINITY))?;
    d.set_item("e2", m.e2)?;
    d.set_item("ad", m.ad)?;
    Ok(d)
}

/// E1, E2 and AD from pixel counts.
#[pyfunction]
fn metrics_from_counts(py: Python<'_>, n_c: usize, n_g: usize, n_p: usize, n_fa: usize, n_fr: usize) -> PyResult<Bound<'_, PyDict>> {
    report_dict(py, &core::eval::MetricsReport::from_counts(n_c, n_g, n_p, n_fa, n_fr))
}

/// Pixel metrics and primitive matching of detections against a truth.
#[pyfunction]
#[pyo3(signature = (arcs, truth, center_tol = 2.0, radius_tol = 2.0, radius_rel_tol = 0.02))]
fn evaluate<'py>(
    py: Python<'py>,
    arcs: Vec<PyRef<'py, PyArc>>,
    truth: &PyTruth,
    center_tol: f64,
    radius_tol: f64,
    radius_rel_tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let recs: Vec<ArcRecord> = arcs.iter().map(|a| a.inner.clone()).collect();
    let t = &truth.inner;
    let mask = core::eval::detected_mask(&recs, t.width(), t.height());
    let metrics = core::eval::compute_metrics(&mask, t).map_err(to_py)?;
    let tol = Tolerance {
        center: center_tol,
        radius: radius_tol,
        radius_rel: radius_rel_tol,
    };
    let m = core::eval::match_primitives(&core::eval::circles_of(&recs), &t.primitives, &tol);
    let d = report_dict(py, &metrics)?;
    d.set_item("matched", m.matched)?;
    d.set_item("missed", m.missed)?;
    d.set_item("spurious", m.spurious)?;
    Ok(d)
}

/// Radius and centre from chord `a b` and the arc pixel `foot` under its
/// midpoint: returns `(radius, (cx, cy), sagitta, chord)`.
#[pyfunction]
fn sagitta_estimate(a: (i32, i32), b: (i32, i32), foot: (i32, i32)) -> PyResult<(f64, (f64, f64), f64, f64)> {
    let p = |t: (i32, i32)| Pixel::new(t.0, t.1);
    let e = core::digigeom::sagitta_estimate(p(a), p(b), p(foot)).map_err(to_py)?;
    Ok((e.radius, (e.center.x, e.center.y), e.sagitta_len, e.chord_len))
}

/// Pixels of the midpoint circle, in curve order.
#[pyfunction]
fn circle_pixels(cx: i32, cy: i32, r: i32) -> PyResult<Vec<(i32, i32)>> {
    core::digigeom::circle_curve(Pixel::new(cx, cy), r)
        .map(|v| v.into_iter().map(|p| (p.x, p.y)).collect())
        .map_err(to_py)
}

/// Circle and circular-arc detection in binary raster images.
#[pymodule(name = "arcscan")]
mod arcscan_module {
    #[pymodule_export]
    use super::{
        circle_pixels, detect, evaluate, evm_detect, metrics_from_counts, rht_detect, sagitta_estimate, synth_scene,
        PyArc, PyImage, PyTruth,
    };
}
