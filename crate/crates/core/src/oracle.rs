//! Pixel-domain reference implementations and extraction accuracy metrics.
//!
//! Nothing here touches runs except `accuracy_compressed`, which compares run
//! matrices by definition. The feature formulas are re-derived over raw
//! pixels so that agreement with [`crate::features`] is independent evidence.

use serde::Serialize;

use crate::block::BlockSpec;
use crate::error::{Error, Result};
use crate::features::{FeatureContext, FeatureReport, LogBase, Mode};
use crate::rle::{CompressedDoc, PixelGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AccuracyMode {
    Pixel,
    Compressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyResult {
    /// In `[0, 100]`; exactly 100 iff the operands compare equal.
    pub percentage: f64,
    pub mode: AccuracyMode,
}

/// Copies rows `x1..=x2`, columns `y1..=y2` out of `grid`.
pub fn oracle_crop(grid: &PixelGrid, spec: &BlockSpec) -> Result<PixelGrid> {
    spec.validate(grid.width(), grid.height())?;
    let mut pixels = Vec::with_capacity(spec.height() * spec.width());
    for x in spec.x1..=spec.x2 {
        for y in spec.y1..=spec.y2 {
            pixels.push(grid.get(x - 1, y - 1));
        }
    }
    PixelGrid::new(spec.width(), spec.height(), pixels)
}

/// `[1 - sum|A - B| / (m n)] * 100` over two equally sized rasters.
pub fn accuracy_pixel(a: &PixelGrid, b: &PixelGrid) -> Result<AccuracyResult> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} versus {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    let diff: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&p, &q)| p.abs_diff(q) as u64)
        .sum();
    let cells = a.width() as u64 * a.height() as u64;
    Ok(AccuracyResult {
        percentage: (1.0 - diff as f64 / cells as f64) * 100.0,
        mode: AccuracyMode::Pixel,
    })
}

/// `[1 - sum_i sum_j |A_ij - B_ij| / (m * sum_j A_1j)] * 100` over run matrices.
///
/// Rows of different run counts are compared with the shorter one padded by
/// zero-length runs. The score is clamped at 0 since run differences can
/// exceed the pixel count.
pub fn accuracy_compressed(a: &CompressedDoc, b: &CompressedDoc) -> Result<AccuracyResult> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} versus {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    let mut diff = 0u64;
    for (ra, rb) in a.rows().iter().zip(b.rows()) {
        let (ra, rb) = (ra.runs(), rb.runs());
        for j in 0..ra.len().max(rb.len()) {
            let x = ra.get(j).copied().unwrap_or(0);
            let y = rb.get(j).copied().unwrap_or(0);
            diff += x.abs_diff(y) as u64;
        }
    }
    let first_row: u64 = a.rows()[0].runs().iter().map(|&r| r as u64).sum();
    let denom = a.height() as u64 * first_row;
    let score = (1.0 - diff as f64 / denom as f64) * 100.0;
    Ok(AccuracyResult {
        percentage: score.max(0.0),
        mode: AccuracyMode::Compressed,
    })
}

fn log_with(base: LogBase, x: f64) -> f64 {
    match base {
        LogBase::Two => x.log2(),
        LogBase::E => x.ln(),
        LogBase::Ten => x.log10(),
    }
}

/// Density, CEQ and SEQ of a raster block, computed pixel by pixel.
pub fn pixel_features(grid: &PixelGrid, ctx: &FeatureContext) -> Result<FeatureReport> {
    let (rows, cols) = (grid.height(), grid.width());
    if ctx.block_dims.rows != rows || ctx.block_dims.cols != cols {
        return Err(Error::Config("context does not describe this block".into()));
    }
    let (row_off, col_off, m, n) = match ctx.mode {
        Mode::Absolute => (0, 0, rows, cols),
        Mode::Relative => {
            let (Some(doc), Some((x1, y1))) = (ctx.doc_dims, ctx.block_origin) else {
                return Err(Error::Config("relative mode requires document dimensions and origin".into()));
            };
            if x1 < 1 || y1 < 1 || x1 + rows - 1 > doc.rows || y1 + cols - 1 > doc.cols {
                return Err(Error::Config("block does not fit the document".into()));
            }
            (x1 - 1, y1 - 1, doc.rows, doc.cols)
        }
    };
    let base = ctx.log_base;
    let (mf, nf) = (m as f64, n as f64);

    let mut ones = 0u64;
    let mut ceq = 0.0;
    let mut seq = 0.0;
    for i in 0..rows {
        let mut flips = 0usize;
        for j in 0..cols {
            if grid.get(i, j) == 1 {
                ones += 1;
            }
            if j + 1 < cols && grid.get(i, j) != grid.get(i, j + 1) {
                flips += 1;
                // column j+1 (1-indexed) is the last pixel before the change
                let pos = (col_off + j + 1) as f64;
                let r = (row_off + i + 1) as f64;
                let inner = (pos / nf) * log_with(base, nf / pos)
                    + (mf - pos / nf) * log_with(base, mf / (mf + nf - pos));
                seq += r / mf * inner;
            }
        }
        let p = flips as f64 / nf;
        let mut h = 0.0;
        if p > 0.0 {
            h += p * log_with(base, 1.0 / p);
        }
        if p < 1.0 {
            h += (1.0 - p) * log_with(base, 1.0 / (1.0 - p));
        }
        ceq += h;
    }
    Ok(FeatureReport {
        density: ones as f64 / (m as u64 * n as u64) as f64,
        ceq,
        seq,
        context: *ctx,
    })
}
