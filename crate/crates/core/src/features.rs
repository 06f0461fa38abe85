//! Density and entropy characterization computed straight from runs.
//!
//! * density: foreground pixels over the block area (absolute) or over the
//!   source document area (relative).
//! * CEQ: per-row binary entropy of `p = transitions / T`, summed over rows.
//!   `T` is the block width (absolute) or the document width (relative).
//! * SEQ: for every color transition at column `pos` of row `r`,
//!   `(r/m) * ((pos/n) * log(n/pos) + (m - pos/n) * log(m / (m + n - pos)))`,
//!   summed over transitions and rows. In relative mode `r`, `pos`, `m`, `n`
//!   are taken in document coordinates.
//!
//! A transition's `pos` is the column of the last pixel before the color
//! change, i.e. the cumulative run sum at the boundary.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::block::{extract_block, BlockSpec};
use crate::error::{Error, Result};
use crate::rle::{run_color, CompressedDoc, RunRow, FOREGROUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LogBase {
    Two,
    #[default]
    E,
    Ten,
}

impl LogBase {
    pub fn value(self) -> f64 {
        match self {
            LogBase::Two => 2.0,
            LogBase::E => std::f64::consts::E,
            LogBase::Ten => 10.0,
        }
    }

    fn ln_base(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::E => 1.0,
            LogBase::Ten => std::f64::consts::LN_10,
        }
    }

    pub fn log(self, x: f64) -> f64 {
        x.ln() / self.ln_base()
    }

    pub const ALL: [LogBase; 3] = [LogBase::Two, LogBase::E, LogBase::Ten];
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::E => "e",
            LogBase::Ten => "10",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" | "E" => Ok(LogBase::E),
            "10" => Ok(LogBase::Ten),
            other => Err(Error::Config(format!(
                "unsupported log base {other:?} (expected 2, e or 10)"
            ))),
        }
    }
}

impl Serialize for LogBase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dims {
    pub rows: usize,
    pub cols: usize,
}

impl Dims {
    pub fn new(rows: usize, cols: usize) -> Self {
        Dims { rows, cols }
    }

    pub fn area(&self) -> u64 {
        self.rows as u64 * self.cols as u64
    }
}

/// Normalization context for one feature report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureContext {
    pub mode: Mode,
    pub block_dims: Dims,
    /// Source document size; required in relative mode.
    pub doc_dims: Option<Dims>,
    /// 1-indexed (x1, y1) of the block in the document; required in relative mode.
    pub block_origin: Option<(usize, usize)>,
    pub log_base: LogBase,
}

impl FeatureContext {
    pub fn absolute(block_dims: Dims, log_base: LogBase) -> Self {
        FeatureContext {
            mode: Mode::Absolute,
            block_dims,
            doc_dims: None,
            block_origin: None,
            log_base,
        }
    }

    pub fn relative(block_dims: Dims, doc_dims: Dims, origin: (usize, usize), log_base: LogBase) -> Self {
        FeatureContext {
            mode: Mode::Relative,
            block_dims,
            doc_dims: Some(doc_dims),
            block_origin: Some(origin),
            log_base,
        }
    }

    /// Relative context for the block `spec` cut from a `doc_dims` document.
    pub fn for_spec(spec: &BlockSpec, doc_dims: Dims, log_base: LogBase) -> Self {
        FeatureContext::relative(
            Dims::new(spec.height(), spec.width()),
            doc_dims,
            (spec.x1, spec.y1),
            log_base,
        )
    }

    /// Checks the context against a block of `rows` x `cols` and returns the
    /// normalization frame `(row offset, col offset, m, n)`.
    pub(crate) fn frame(&self, rows: usize, cols: usize) -> Result<(usize, usize, usize, usize)> {
        if self.block_dims != Dims::new(rows, cols) {
            return Err(Error::Config(format!(
                "context describes a {}x{} block but the block is {}x{}",
                self.block_dims.rows, self.block_dims.cols, rows, cols
            )));
        }
        match self.mode {
            Mode::Absolute => Ok((0, 0, rows, cols)),
            Mode::Relative => {
                let doc = self
                    .doc_dims
                    .ok_or_else(|| Error::Config("relative mode requires document dimensions".into()))?;
                let (x1, y1) = self
                    .block_origin
                    .ok_or_else(|| Error::Config("relative mode requires the block origin".into()))?;
                if x1 == 0 || y1 == 0 || x1 - 1 + rows > doc.rows || y1 - 1 + cols > doc.cols {
                    return Err(Error::Config(format!(
                        "a {}x{} block at ({x1}, {y1}) does not fit a {}x{} document",
                        rows, cols, doc.rows, doc.cols
                    )));
                }
                Ok((x1 - 1, y1 - 1, doc.rows, doc.cols))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeatureReport {
    pub density: f64,
    pub ceq: f64,
    pub seq: f64,
    pub context: FeatureContext,
}

/// Iterates the non-empty runs of a row, merging neighbours of equal color,
/// as `(color, end column)` pairs with 1-indexed inclusive end columns.
fn segments(row: &RunRow) -> impl Iterator<Item = (u8, u64)> + '_ {
    let mut iter = row
        .runs()
        .iter()
        .enumerate()
        .filter(|(_, &len)| len > 0)
        .map(|(i, &len)| (run_color(i), len as u64))
        .peekable();
    let mut end = 0u64;
    std::iter::from_fn(move || {
        let (color, len) = iter.next()?;
        end += len;
        while let Some(&(c, l)) = iter.peek() {
            if c != color {
                break;
            }
            end += l;
            iter.next();
        }
        Some((color, end))
    })
}

/// Columns (1-indexed, last pixel before the change) where the color flips.
pub fn transition_positions(row: &RunRow) -> impl Iterator<Item = u64> + '_ {
    let mut segs = segments(row).peekable();
    std::iter::from_fn(move || {
        let (_, end) = segs.next()?;
        segs.peek().map(|_| end)
    })
}

/// Number of adjacent pixel pairs of opposite color.
pub fn transitions_in_row(row: &RunRow) -> usize {
    segments(row).count().saturating_sub(1)
}

pub fn foreground_pixels(row: &RunRow) -> u64 {
    row.runs()
        .iter()
        .enumerate()
        .filter(|(i, _)| run_color(*i) == FOREGROUND)
        .map(|(_, &len)| len as u64)
        .sum()
}

/// Exact density as `(foreground pixels, normalizing area)`.
pub fn density_fraction(block: &CompressedDoc, ctx: &FeatureContext) -> Result<(u64, u64)> {
    let (_, _, m, n) = ctx.frame(block.height(), block.width())?;
    let ink: u64 = block.rows().iter().map(foreground_pixels).sum();
    Ok((ink, m as u64 * n as u64))
}

pub fn density(block: &CompressedDoc, ctx: &FeatureContext) -> Result<f64> {
    let (ink, area) = density_fraction(block, ctx)?;
    Ok(ink as f64 / area as f64)
}

/// Relative density implied by an absolute density and the two areas.
pub fn relative_density_from_absolute(absolute: f64, block: Dims, doc: Dims) -> f64 {
    absolute * (block.area() as f64 / doc.area() as f64)
}

/// `p log(1/p) + (1-p) log(1/(1-p))` with the `0 log(1/0) = 0` limit.
pub fn binary_entropy(p: f64, base: LogBase) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { q * base.log(1.0 / q) };
    term(p) + term(1.0 - p)
}

/// Per-row CEQ terms, top to bottom.
pub fn ceq_row_terms(block: &CompressedDoc, ctx: &FeatureContext) -> Result<Vec<f64>> {
    let (_, _, _, n) = ctx.frame(block.height(), block.width())?;
    let total = n as f64;
    Ok(block
        .rows()
        .iter()
        .map(|row| binary_entropy(transitions_in_row(row) as f64 / total, ctx.log_base))
        .collect())
}

pub fn ceq(block: &CompressedDoc, ctx: &FeatureContext) -> Result<f64> {
    Ok(ceq_row_terms(block, ctx)?.into_iter().sum())
}

/// One SEQ term for a transition at column `pos` of row `r` in an `m` x `n` frame.
pub fn seq_term(r: f64, m: f64, n: f64, pos: f64, base: LogBase) -> f64 {
    (r / m) * ((pos / n) * base.log(n / pos) + (m - pos / n) * base.log(m / (m + n - pos)))
}

pub fn seq(block: &CompressedDoc, ctx: &FeatureContext) -> Result<f64> {
    let (row_off, col_off, m, n) = ctx.frame(block.height(), block.width())?;
    let (m, n) = (m as f64, n as f64);
    let mut total = 0.0;
    for (i, row) in block.rows().iter().enumerate() {
        let r = (row_off + i + 1) as f64;
        for pos in transition_positions(row) {
            total += seq_term(r, m, n, (col_off as u64 + pos) as f64, ctx.log_base);
        }
    }
    Ok(total)
}

pub fn report(block: &CompressedDoc, ctx: &FeatureContext) -> Result<FeatureReport> {
    Ok(FeatureReport {
        density: density(block, ctx)?,
        ceq: ceq(block, ctx)?,
        seq: seq(block, ctx)?,
        context: *ctx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    High,
    Low,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::High => "high",
            Level::Low => "low",
        })
    }
}

/// Block density and entropy relative to the source document's own values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Quadrant {
    pub density: Level,
    pub entropy: Level,
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} density, {} entropy", self.density, self.entropy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Characterization {
    pub absolute: FeatureReport,
    pub relative: Option<FeatureReport>,
    /// Absolute features of the whole source document.
    pub document: Option<FeatureReport>,
    pub quadrant: Option<Quadrant>,
}

/// Absolute features of `block`, plus relative features, document features
/// and the quadrant label when the source document and block spec are given.
///
/// Density is compared directly with the document's density. CEQ grows with
/// the number of rows, so the entropy comparison uses CEQ per row.
pub fn characterize(
    block: &CompressedDoc,
    doc: Option<&CompressedDoc>,
    spec: Option<&BlockSpec>,
    log_base: LogBase,
) -> Result<Characterization> {
    let block_dims = Dims::new(block.height(), block.width());
    let absolute = report(block, &FeatureContext::absolute(block_dims, log_base))?;
    let Some(doc) = doc else {
        return Ok(Characterization {
            absolute,
            relative: None,
            document: None,
            quadrant: None,
        });
    };
    let spec = spec.ok_or_else(|| Error::Config("relative characterization requires the block position".into()))?;
    let expected = extract_block(doc, spec)?;
    if expected != block.canonicalized() {
        return Err(Error::InvalidInput(format!(
            "block does not match {spec} of the {}x{} document",
            doc.height(),
            doc.width()
        )));
    }
    let doc_dims = Dims::new(doc.height(), doc.width());
    let relative = report(block, &FeatureContext::for_spec(spec, doc_dims, log_base))?;
    let document = report(doc, &FeatureContext::absolute(doc_dims, log_base))?;
    let level = |high: bool| if high { Level::High } else { Level::Low };
    let quadrant = Quadrant {
        density: level(absolute.density > document.density),
        entropy: level(absolute.ceq / block_dims.rows as f64 > document.ceq / doc_dims.rows as f64),
    };
    Ok(Characterization {
        absolute,
        relative: Some(relative),
        document: Some(document),
        quadrant: Some(quadrant),
    })
}
