//! Run-length data model.
//!
//! Every row is stored as alternating run lengths starting with background
//! (white, `0`). A row whose first pixel is foreground (black, `1`) carries a
//! leading zero-length background run, so the run at 0-based position `i` is
//! foreground exactly when `i` is odd.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest accepted width or height.
pub const MAX_DIM: usize = (1 << 31) - 1;

pub const BACKGROUND: u8 = 0;
pub const FOREGROUND: u8 = 1;

/// Color of the run at 0-based position `index` under the background-first convention.
#[inline]
pub fn run_color(index: usize) -> u8 {
    (index & 1) as u8
}

/// One image row as an ordered list of run lengths, background first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct RunRow(Vec<usize>);

impl RunRow {
    pub fn new(runs: Vec<usize>) -> Self {
        RunRow(runs)
    }

    pub fn runs(&self) -> &[usize] {
        &self.0
    }

    pub fn into_runs(self) -> Vec<usize> {
        self.0
    }

    /// Number of stored runs, including a leading zero run if present.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pixel count covered by the row.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&r| r as u64).sum()
    }

    /// True when no run other than the leading background run is zero.
    pub fn is_canonical(&self) -> bool {
        !self.0.is_empty() && self.0.iter().skip(1).all(|&r| r > 0)
    }

    /// Whether the first pixel of the row is foreground.
    pub fn starts_with_foreground(&self) -> bool {
        self.0.first() == Some(&0) && self.0.len() > 1
    }
}

impl From<Vec<usize>> for RunRow {
    fn from(runs: Vec<usize>) -> Self {
        RunRow(runs)
    }
}

/// Row-major binary raster, one byte per pixel holding `0` or `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixelGrid {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl PixelGrid {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if pixels.len() as u128 != width as u128 * height as u128 {
            return Err(Error::InvalidInput(format!(
                "pixel buffer has {} entries, expected {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        if let Some(pos) = pixels.iter().position(|&p| p > 1) {
            return Err(Error::InvalidInput(format!(
                "pixel at row {}, column {} is {}, expected 0 or 1",
                pos / width + 1,
                pos % width + 1,
                pixels[pos]
            )));
        }
        Ok(PixelGrid {
            width,
            height,
            pixels,
        })
    }

    /// Builds a grid from nested rows. Ragged input is rejected.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut pixels = Vec::with_capacity(width * height);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != width {
                return Err(Error::InvalidInput(format!(
                    "ragged grid: row {} has {} pixels, row 1 has {}",
                    i + 1,
                    row.len(),
                    width
                )));
            }
            pixels.extend_from_slice(row);
        }
        PixelGrid::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// 0-indexed row access.
    pub fn row(&self, index: usize) -> &[u8] {
        &self.pixels[index * self.width..(index + 1) * self.width]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.pixels.chunks_exact(self.width)
    }

    /// 0-indexed pixel access.
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows().map(<[u8]>::to_vec).collect()
    }
}

/// An image held entirely as run-length rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CompressedDoc {
    width: usize,
    height: usize,
    rows: Vec<RunRow>,
}

impl CompressedDoc {
    /// Validates dimensions and that every row covers exactly `width` pixels.
    pub fn new(width: usize, height: usize, rows: Vec<RunRow>) -> Result<Self> {
        check_dims(width, height)?;
        if rows.len() != height {
            return Err(Error::InvalidInput(format!(
                "document declares height {} but has {} rows",
                height,
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let sum = row.total();
            if sum != width as u64 {
                return Err(Error::CorruptRow {
                    row: i + 1,
                    sum,
                    width,
                });
            }
        }
        Ok(CompressedDoc {
            width,
            height,
            rows,
        })
    }

    /// Caller guarantees the invariants checked by [`CompressedDoc::new`].
    pub(crate) fn from_parts(width: usize, height: usize, rows: Vec<RunRow>) -> Self {
        debug_assert_eq!(rows.len(), height);
        debug_assert!(rows.iter().all(|r| r.total() == width as u64));
        CompressedDoc {
            width,
            height,
            rows,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn rows(&self) -> &[RunRow] {
        &self.rows
    }

    /// 0-indexed row access.
    pub fn row(&self, index: usize) -> &RunRow {
        &self.rows[index]
    }

    pub fn into_rows(self) -> Vec<RunRow> {
        self.rows
    }

    /// Total stored runs across all rows.
    pub fn run_count(&self) -> usize {
        self.rows.iter().map(RunRow::len).sum()
    }

    pub fn is_canonical(&self) -> bool {
        self.rows.iter().all(RunRow::is_canonical)
    }

    pub fn canonicalized(&self) -> CompressedDoc {
        CompressedDoc::from_parts(
            self.width,
            self.height,
            self.rows.iter().map(canonicalize_row).collect(),
        )
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(format!(
            "image dimensions must be positive, got {width}x{height}"
        )));
    }
    if width > MAX_DIM || height > MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "image dimensions {width}x{height} exceed the limit of {MAX_DIM}"
        )));
    }
    Ok(())
}

/// Run-length encodes one row of pixels into canonical form.
pub fn encode_row(pixels: &[u8]) -> Result<RunRow> {
    if pixels.is_empty() {
        return Err(Error::InvalidInput("cannot encode an empty row".into()));
    }
    let mut runs = Vec::new();
    let mut color = BACKGROUND;
    let mut len = 0usize;
    for (col, &p) in pixels.iter().enumerate() {
        if p > 1 {
            return Err(Error::InvalidInput(format!(
                "pixel at column {} is {}, expected 0 or 1",
                col + 1,
                p
            )));
        }
        if p == color {
            len += 1;
        } else {
            runs.push(len);
            color = p;
            len = 1;
        }
    }
    runs.push(len);
    Ok(RunRow(runs))
}

/// Expands a run row back into pixels. The row must cover exactly `width` pixels.
pub fn decode_row(row: &RunRow, width: usize) -> Result<Vec<u8>> {
    let sum = row.total();
    if sum != width as u64 {
        return Err(Error::CorruptRow { row: 1, sum, width });
    }
    let mut out = Vec::with_capacity(width);
    for (i, &len) in row.runs().iter().enumerate() {
        out.extend(std::iter::repeat_n(run_color(i), len));
    }
    Ok(out)
}

pub fn encode_image(grid: &PixelGrid) -> CompressedDoc {
    let rows = grid
        .rows()
        .map(|r| encode_row(r).expect("grid rows are non-empty and binary"))
        .collect();
    CompressedDoc::from_parts(grid.width(), grid.height(), rows)
}

pub fn decode_image(doc: &CompressedDoc) -> PixelGrid {
    let mut pixels = Vec::with_capacity(doc.width() * doc.height());
    for row in doc.rows() {
        for (i, &len) in row.runs().iter().enumerate() {
            pixels.extend(std::iter::repeat_n(run_color(i), len));
        }
    }
    PixelGrid {
        width: doc.width(),
        height: doc.height(),
        pixels,
    }
}

/// Removes interior zero-length runs by merging the equal-colored neighbours
/// they separate. A leading zero run survives only if the row starts with
/// foreground.
pub fn canonicalize_row(row: &RunRow) -> RunRow {
    let mut out: Vec<usize> = Vec::with_capacity(row.len());
    // Color of the last pushed run, tracked separately since `out` may be empty.
    let mut last_color: Option<u8> = None;
    for (i, &len) in row.runs().iter().enumerate() {
        if len == 0 {
            continue;
        }
        let color = run_color(i);
        match last_color {
            Some(c) if c == color => *out.last_mut().unwrap() += len,
            Some(_) => out.push(len),
            None => {
                if color == FOREGROUND {
                    out.push(0);
                }
                out.push(len);
            }
        }
        last_color = Some(color);
    }
    if out.is_empty() {
        out.push(0);
    }
    RunRow(out)
}
