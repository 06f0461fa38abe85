//! Python bindings for `rlseg`.
//!
//! ```python
//! import pyrlseg as rs
//! doc = rs.CompressedDoc.from_rle(open("page.rlc", "rb").read())
//! block = rs.extract_block(doc, rs.BlockSpec(100, 400, 200, 500))
//! rs.characterize(block, doc, rs.BlockSpec(100, 400, 200, 500), log_base="2")
//! ```

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use rlseg::features::{self, Quadrant};
use rlseg::io::{self as rio, EolMode, MhBits, MhOptions, PbmFormat};
use rlseg::synth::{self, InkStyle};

create_exception!(pyrlseg, RlsegError, PyValueError, "Invalid input or arguments.");
create_exception!(pyrlseg, ParseError, RlsegError, "Malformed PBM, RLC1 or MH data.");
create_exception!(pyrlseg, ConsistencyError, RlsegError, "An internal consistency check failed.");

fn to_py(err: rlseg::Error) -> PyErr {
    match err {
        rlseg::Error::Parse { .. } => ParseError::new_err(err.to_string()),
        rlseg::Error::Inconsistent(_) => ConsistencyError::new_err(err.to_string()),
        _ => RlsegError::new_err(err.to_string()),
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for rlseg::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn log_base(s: &str) -> PyResult<rlseg::LogBase> {
    s.parse().or_py()
}

fn eol_mode(s: &str) -> PyResult<EolMode> {
    match s {
        "required" => Ok(EolMode::Required),
        "forbidden" => Ok(EolMode::Forbidden),
        _ => Err(RlsegError::new_err(format!("eol must be \"required\" or \"forbidden\", not {s:?}"))),
    }
}

/// A run-length compressed binary image; each row alternates background and
/// foreground runs, background first.
#[pyclass(module = "pyrlseg", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct CompressedDoc {
    inner: rlseg::CompressedDoc,
}

impl From<rlseg::CompressedDoc> for CompressedDoc {
    fn from(inner: rlseg::CompressedDoc) -> Self {
        CompressedDoc { inner }
    }
}

#[pymethods]
impl CompressedDoc {
    #[new]
    fn new(width: usize, height: usize, rows: Vec<Vec<usize>>) -> PyResult<Self> {
        let rows = rows.into_iter().map(rlseg::RunRow::new).collect();
        Ok(rlseg::CompressedDoc::new(width, height, rows).or_py()?.into())
    }

    /// From a list of rows of 0/1 pixels.
    #[staticmethod]
    fn from_pixels(rows: Vec<Vec<u8>>) -> PyResult<Self> {
        let grid = rlseg::PixelGrid::from_rows(&rows).or_py()?;
        Ok(rlseg::encode_image(&grid).into())
    }

    #[staticmethod]
    fn from_rle(data: &[u8]) -> PyResult<Self> {
        Ok(rio::read_rle(data).or_py()?.into())
    }

    #[staticmethod]
    fn from_pbm(data: &[u8]) -> PyResult<Self> {
        Ok(rlseg::encode_image(&rio::read_pbm(data).or_py()?).into())
    }

    #[staticmethod]
    #[pyo3(signature = (data, width, height, eol = "required", byte_align = false))]
    fn from_mh(data: &[u8], width: usize, height: usize, eol: &str, byte_align: bool) -> PyResult<Self> {
        let options = MhOptions {
            eol: eol_mode(eol)?,
            byte_align,
        };
        let bits = MhBits::from_bytes(data.to_vec());
        Ok(rio::mh_decode_image(&bits, width, height, options).or_py()?.into())
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<usize>> {
        self.inner.rows().iter().map(|r| r.runs().to_vec()).collect()
    }

    #[getter]
    fn run_count(&self) -> usize {
        self.inner.run_count()
    }

    fn is_canonical(&self) -> bool {
        self.inner.is_canonical()
    }

    fn canonicalized(&self) -> Self {
        self.inner.canonicalized().into()
    }

    fn to_pixels(&self) -> Vec<Vec<u8>> {
        rlseg::decode_image(&self.inner).to_rows()
    }

    fn to_rle<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &rio::write_rle(&self.inner))
    }

    #[pyo3(signature = (plain = false))]
    fn to_pbm<'py>(&self, py: Python<'py>, plain: bool) -> Bound<'py, PyBytes> {
        let fmt = if plain { PbmFormat::Plain } else { PbmFormat::Raw };
        PyBytes::new(py, &rio::write_pbm(&rlseg::decode_image(&self.inner), fmt))
    }

    #[pyo3(signature = (eol = "required", byte_align = false))]
    fn to_mh<'py>(&self, py: Python<'py>, eol: &str, byte_align: bool) -> PyResult<Bound<'py, PyBytes>> {
        let options = MhOptions {
            eol: eol_mode(eol)?,
            byte_align,
        };
        Ok(PyBytes::new(py, rio::mh_encode_image(&self.inner, options).as_bytes()))
    }

    fn __repr__(&self) -> String {
        format!(
            "CompressedDoc(width={}, height={}, runs={})",
            self.inner.width(),
            self.inner.height(),
            self.inner.run_count()
        )
    }
}

/// Block rectangle, 1-indexed and inclusive; x selects rows, y columns.
#[pyclass(module = "pyrlseg", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSpec {
    inner: rlseg::BlockSpec,
}

#[pymethods]
impl BlockSpec {
    #[new]
    fn new(x1: usize, x2: usize, y1: usize, y2: usize) -> Self {
        BlockSpec {
            inner: rlseg::BlockSpec::new(x1, x2, y1, y2),
        }
    }

    #[staticmethod]
    fn full(width: usize, height: usize) -> Self {
        BlockSpec {
            inner: rlseg::BlockSpec::full(width, height),
        }
    }

    #[getter]
    fn x1(&self) -> usize {
        self.inner.x1
    }

    #[getter]
    fn x2(&self) -> usize {
        self.inner.x2
    }

    #[getter]
    fn y1(&self) -> usize {
        self.inner.y1
    }

    #[getter]
    fn y2(&self) -> usize {
        self.inner.y2
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    fn validate(&self, width: usize, height: usize) -> PyResult<()> {
        self.inner.validate(width, height).or_py()
    }

    /// Maps `inner`, given in this block's coordinates, to the outer frame.
    fn compose(&self, inner: &BlockSpec) -> Self {
        BlockSpec {
            inner: self.inner.compose(&inner.inner),
        }
    }

    fn __repr__(&self) -> String {
        let s = self.inner;
        format!("BlockSpec(x1={}, x2={}, y1={}, y2={})", s.x1, s.x2, s.y1, s.y2)
    }
}

#[pyfunction]
fn extract_block(doc: &CompressedDoc, spec: &BlockSpec) -> PyResult<CompressedDoc> {
    Ok(rlseg::extract_block(&doc.inner, &spec.inner).or_py()?.into())
}

/// Returns `(block, {"rows_visited", "runs_visited", "runs_emitted"})`.
#[pyfunction]
fn extract_block_with_stats<'py>(
    py: Python<'py>,
    doc: &CompressedDoc,
    spec: &BlockSpec,
) -> PyResult<(CompressedDoc, Bound<'py, PyDict>)> {
    let (block, stats) = rlseg::extract_block_with_stats(&doc.inner, &spec.inner).or_py()?;
    let d = PyDict::new(py);
    d.set_item("rows_visited", stats.rows_visited)?;
    d.set_item("runs_visited", stats.runs_visited)?;
    d.set_item("runs_emitted", stats.runs_emitted)?;
    Ok((block.into(), d))
}

/// `(p1, r1, p2, r2)` for each block row.
#[pyfunction]
fn position_table(doc: &CompressedDoc, spec: &BlockSpec) -> PyResult<Vec<(usize, usize, usize, usize)>> {
    let table = rlseg::build_position_table(&doc.inner, &spec.inner).or_py()?;
    Ok(table.records.iter().map(|r| (r.p1, r.r1, r.p2, r.r2)).collect())
}

#[pyfunction]
fn locate_boundaries(row: Vec<usize>, y1: usize, y2: usize) -> PyResult<(usize, usize, usize, usize)> {
    let (r, _) = rlseg::locate_boundaries(&rlseg::RunRow::new(row), y1, y2).or_py()?;
    Ok((r.p1, r.r1, r.p2, r.r2))
}

#[pyfunction]
fn trim_row(row: Vec<usize>, record: (usize, usize, usize, usize)) -> PyResult<Vec<usize>> {
    let (p1, r1, p2, r2) = record;
    let rec = rlseg::BoundaryRecord { p1, r1, p2, r2 };
    Ok(rlseg::trim_row(&rlseg::RunRow::new(row), &rec).or_py()?.into_runs())
}

fn report_dict<'py>(py: Python<'py>, r: &rlseg::FeatureReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("density", r.density)?;
    d.set_item("ceq", r.ceq)?;
    d.set_item("seq", r.seq)?;
    d.set_item(
        "mode",
        match r.context.mode {
            rlseg::Mode::Absolute => "absolute",
            rlseg::Mode::Relative => "relative",
        },
    )?;
    d.set_item("log_base", r.context.log_base.to_string())?;
    Ok(d)
}

/// Density, CEQ and SEQ of `block`. Absolute unless `doc_dims=(rows, cols)`
/// and `origin=(x1, y1)` are both given.
#[pyfunction]
#[pyo3(signature = (block, log_base = "e", doc_dims = None, origin = None))]
fn block_features<'py>(
    py: Python<'py>,
    block: &CompressedDoc,
    log_base: &str,
    doc_dims: Option<(usize, usize)>,
    origin: Option<(usize, usize)>,
) -> PyResult<Bound<'py, PyDict>> {
    let base = self::log_base(log_base)?;
    let dims = rlseg::Dims::new(block.inner.height(), block.inner.width());
    let ctx = match (doc_dims, origin) {
        (None, None) => rlseg::FeatureContext::absolute(dims, base),
        (Some((rows, cols)), Some(origin)) => {
            rlseg::FeatureContext::relative(dims, rlseg::Dims::new(rows, cols), origin, base)
        }
        _ => return Err(RlsegError::new_err("relative features need both doc_dims and origin")),
    };
    report_dict(py, &features::report(&block.inner, &ctx).or_py()?)
}

/// Absolute features, plus relative/document features and the quadrant label
/// when `doc` and `spec` are given.
#[pyfunction]
#[pyo3(signature = (block, doc = None, spec = None, log_base = "e"))]
fn characterize<'py>(
    py: Python<'py>,
    block: &CompressedDoc,
    doc: Option<&CompressedDoc>,
    spec: Option<&BlockSpec>,
    log_base: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let c = rlseg::characterize(
        &block.inner,
        doc.map(|d| &d.inner),
        spec.map(|s| &s.inner),
        self::log_base(log_base)?,
    )
    .or_py()?;
    let d = PyDict::new(py);
    d.set_item("absolute", report_dict(py, &c.absolute)?)?;
    d.set_item("relative", c.relative.as_ref().map(|r| report_dict(py, r)).transpose()?)?;
    d.set_item("document", c.document.as_ref().map(|r| report_dict(py, r)).transpose()?)?;
    d.set_item("quadrant", c.quadrant.as_ref().map(Quadrant::to_string))?;
    Ok(d)
}

/// Pixel accuracy in percent between two equally sized images.
#[pyfunction]
fn accuracy_pixel(a: &CompressedDoc, b: &CompressedDoc) -> PyResult<f64> {
    let r = rlseg::accuracy_pixel(&rlseg::decode_image(&a.inner), &rlseg::decode_image(&b.inner)).or_py()?;
    Ok(r.percentage)
}

/// Run-matrix accuracy in percent.
#[pyfunction]
fn accuracy_compressed(a: &CompressedDoc, b: &CompressedDoc) -> PyResult<f64> {
    Ok(rlseg::accuracy_compressed(&a.inner, &b.inner).or_py()?.percentage)
}

/// Pixel-domain crop of `doc`, re-encoded; the reference for `extract_block`.
#[pyfunction]
fn oracle_crop(doc: &CompressedDoc, spec: &BlockSpec) -> PyResult<CompressedDoc> {
    let crop = rlseg::oracle_crop(&rlseg::decode_image(&doc.inner), &spec.inner).or_py()?;
    Ok(rlseg::encode_image(&crop).into())
}

/// Seeded synthetic page; `style` is "text" or "uniform".
#[pyfunction]
#[pyo3(signature = (width, height, ink = 0.1, style = "text", seed = 0))]
fn synthetic_document(width: usize, height: usize, ink: f64, style: &str, seed: u64) -> PyResult<CompressedDoc> {
    let style = match style {
        "text" => InkStyle::TextLike,
        "uniform" => InkStyle::Uniform,
        _ => return Err(RlsegError::new_err(format!("style must be \"text\" or \"uniform\", not {style:?}"))),
    };
    if width == 0 || height == 0 || width > rlseg::rle::MAX_DIM || height > rlseg::rle::MAX_DIM {
        return Err(RlsegError::new_err(format!("invalid dimensions {width}x{height}")));
    }
    if !(0.0..=1.0).contains(&ink) {
        return Err(RlsegError::new_err(format!("ink must be in [0, 1], got {ink}")));
    }
    Ok(synth::synthetic_document(width, height, ink, style, seed).into())
}

#[pymodule]
fn pyrlseg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("RlsegError", py.get_type::<RlsegError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("ConsistencyError", py.get_type::<ConsistencyError>())?;
    m.add_class::<CompressedDoc>()?;
    m.add_class::<BlockSpec>()?;
    m.add_function(wrap_pyfunction!(extract_block, m)?)?;
    m.add_function(wrap_pyfunction!(extract_block_with_stats, m)?)?;
    m.add_function(wrap_pyfunction!(position_table, m)?)?;
    m.add_function(wrap_pyfunction!(locate_boundaries, m)?)?;
    m.add_function(wrap_pyfunction!(trim_row, m)?)?;
    m.add_function(wrap_pyfunction!(block_features, m)?)?;
    m.add_function(wrap_pyfunction!(characterize, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy_pixel, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy_compressed, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_crop, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_document, m)?)?;
    Ok(())
}
