//! Locating and trimming a rectangular block inside run-length rows.
//!
//! Rows outside `x1..=x2` are skipped outright. Within each selected row a
//! single left-to-right scan accumulates run lengths until it reaches `y1`
//! (the start boundary) and then `y2` (the end boundary). The run holding
//! each boundary and the residue of that run form a [`BoundaryRecord`]; the
//! block's row is then the residue of the start run, the untouched interior
//! runs, and the end run shortened by its residue. No pixels are produced at
//! any point.

use std::fmt;

use serde::Serialize;

use crate::error::{Bound, Error, Result};
use crate::rle::{canonicalize_row, run_color, CompressedDoc, RunRow, FOREGROUND};

/// Rectangle to extract, 1-indexed and inclusive on both ends.
/// `x` selects rows, `y` selects columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BlockSpec {
    pub x1: usize,
    pub x2: usize,
    pub y1: usize,
    pub y2: usize,
}

impl BlockSpec {
    pub fn new(x1: usize, x2: usize, y1: usize, y2: usize) -> Self {
        BlockSpec { x1, x2, y1, y2 }
    }

    /// The spec covering a whole `width` x `height` image.
    pub fn full(width: usize, height: usize) -> Self {
        BlockSpec::new(1, height, 1, width)
    }

    /// Block anchored at (`x1`, `y1`) with the given size.
    pub fn from_origin(x1: usize, y1: usize, width: usize, height: usize) -> Self {
        BlockSpec::new(x1, x1 + height - 1, y1, y1 + width - 1)
    }

    pub fn height(&self) -> usize {
        self.x2 + 1 - self.x1
    }

    pub fn width(&self) -> usize {
        self.y2 + 1 - self.y1
    }

    pub fn area(&self) -> u64 {
        self.height() as u64 * self.width() as u64
    }

    /// Checks the spec against an image of the given size, reporting the
    /// first offending bound in x1, x2, y1, y2 order.
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        let check = |bound, value, min, max| {
            if value < min || value > max {
                Err(Error::OutOfBounds {
                    bound,
                    value,
                    min,
                    max,
                })
            } else {
                Ok(())
            }
        };
        check(Bound::X1, self.x1, 1, height)?;
        check(Bound::X2, self.x2, self.x1, height)?;
        check(Bound::Y1, self.y1, 1, width)?;
        check(Bound::Y2, self.y2, self.y1, width)
    }

    /// Maps `inner`, given in this block's own coordinates, into the frame
    /// this block was specified in.
    pub fn compose(&self, inner: &BlockSpec) -> BlockSpec {
        BlockSpec::new(
            self.x1 + inner.x1 - 1,
            self.x1 + inner.x2 - 1,
            self.y1 + inner.y1 - 1,
            self.y1 + inner.y2 - 1,
        )
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rows {}..={}, columns {}..={}",
            self.x1, self.x2, self.y1, self.y2
        )
    }
}

/// Where a block's column boundaries fall inside one row.
///
/// `p1`/`p2` are 1-indexed run positions. `r1` counts the pixels of run `p1`
/// from `y1` to that run's end; `r2` counts the pixels of run `p2` lying past
/// `y2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BoundaryRecord {
    pub p1: usize,
    pub r1: usize,
    pub p2: usize,
    pub r2: usize,
}

impl fmt::Display for BoundaryRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.p1, self.r1, self.p2, self.r2)
    }
}

/// One [`BoundaryRecord`] per selected row, in row order starting at `first_row`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositionTable {
    pub first_row: usize,
    pub records: Vec<BoundaryRecord>,
}

impl PositionTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl fmt::Display for PositionTable {
    /// One `P1 R1 P2 R2` line per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rec in &self.records {
            writeln!(f, "{rec}")?;
        }
        Ok(())
    }
}

/// Work counters for one extraction call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ExtractStats {
    pub rows_visited: usize,
    /// Runs read while scanning for boundaries.
    pub runs_visited: usize,
    /// Runs written to the block.
    pub runs_emitted: usize,
}

impl ExtractStats {
    /// Elementary run-level operations performed.
    pub fn cell_ops(&self) -> u64 {
        self.runs_visited as u64 + self.runs_emitted as u64
    }
}

/// Forward-only cursor over a row's cumulative run sums.
struct Scan<'a> {
    runs: &'a [usize],
    // 0-based index of the next run to read.
    next: usize,
    // Sum of runs[..next].
    sum: u64,
    visited: usize,
}

impl<'a> Scan<'a> {
    fn new(runs: &'a [usize]) -> Self {
        Scan {
            runs,
            next: 0,
            sum: 0,
            visited: 0,
        }
    }

    /// Advances to the first run whose cumulative sum reaches `column`.
    /// Returns that run's 0-based index and its cumulative sum. Calling again
    /// with a larger column resumes from where the last call stopped.
    fn seek(&mut self, column: usize) -> Result<(usize, u64)> {
        let target = column as u64;
        if self.next > 0 && self.sum >= target {
            return Ok((self.next - 1, self.sum));
        }
        while self.next < self.runs.len() {
            self.sum += self.runs[self.next] as u64;
            self.next += 1;
            self.visited += 1;
            if self.sum >= target {
                return Ok((self.next - 1, self.sum));
            }
        }
        Err(Error::ColumnOutOfRange {
            column,
            width: self.sum,
        })
    }
}

fn check_column(column: usize) -> Result<()> {
    if column == 0 {
        return Err(Error::ColumnOutOfRange { column, width: 0 });
    }
    Ok(())
}

/// Finds the run holding column `y1` and how many of its pixels lie at or
/// after `y1`. Returns `(p1, r1)` with `p1` 1-indexed.
pub fn locate_start(row: &RunRow, y1: usize) -> Result<(usize, usize)> {
    check_column(y1)?;
    let (idx, sum) = Scan::new(row.runs()).seek(y1)?;
    Ok((idx + 1, (sum - y1 as u64 + 1) as usize))
}

/// Finds the run holding column `y2` and how many of its pixels lie after
/// `y2`. Returns `(p2, r2)` with `p2` 1-indexed.
pub fn locate_end(row: &RunRow, y2: usize) -> Result<(usize, usize)> {
    check_column(y2)?;
    let (idx, sum) = Scan::new(row.runs()).seek(y2)?;
    Ok((idx + 1, (sum - y2 as u64) as usize))
}

/// Locates both boundaries in one pass; the end search resumes where the
/// start search stopped. Returns the record and the number of runs read.
pub fn locate_boundaries(row: &RunRow, y1: usize, y2: usize) -> Result<(BoundaryRecord, usize)> {
    check_column(y1)?;
    if y2 < y1 {
        return Err(Error::InvalidInput(format!(
            "end column {y2} precedes start column {y1}"
        )));
    }
    let mut scan = Scan::new(row.runs());
    let (i1, s1) = scan.seek(y1)?;
    let (i2, s2) = scan.seek(y2)?;
    let rec = BoundaryRecord {
        p1: i1 + 1,
        r1: (s1 - y1 as u64 + 1) as usize,
        p2: i2 + 1,
        r2: (s2 - y2 as u64) as usize,
    };
    Ok((rec, scan.visited))
}

/// Computes the position table for rows `x1..=x2`; other rows are not read.
pub fn build_position_table(doc: &CompressedDoc, spec: &BlockSpec) -> Result<PositionTable> {
    spec.validate(doc.width(), doc.height())?;
    let records = doc.rows()[spec.x1 - 1..spec.x2]
        .iter()
        .map(|row| locate_boundaries(row, spec.y1, spec.y2).map(|(rec, _)| rec))
        .collect::<Result<Vec<_>>>()?;
    Ok(PositionTable {
        first_row: spec.x1,
        records,
    })
}

/// Cuts the block's portion out of `row` using its boundary record.
///
/// A block that starts inside a foreground run gets a zero-length leading
/// background run so the color alternation is preserved. The result is
/// canonical.
pub fn trim_row(row: &RunRow, rec: &BoundaryRecord) -> Result<RunRow> {
    let runs = row.runs();
    let BoundaryRecord { p1, r1, p2, r2 } = *rec;
    if p1 == 0 || p1 > p2 || p2 > runs.len() {
        return Err(Error::Inconsistent(format!(
            "record {rec} does not fit a row of {} runs",
            runs.len()
        )));
    }
    let start_len = runs[p1 - 1];
    let end_len = runs[p2 - 1];
    if r1 == 0 || r1 > start_len || r2 >= end_len || (p1 == p2 && r1 <= r2) {
        return Err(Error::Inconsistent(format!(
            "residues in record {rec} do not match runs {start_len} and {end_len}"
        )));
    }

    let mut out = Vec::with_capacity(p2 - p1 + 2);
    if run_color(p1 - 1) == FOREGROUND {
        out.push(0);
    }
    if p1 == p2 {
        out.push(r1 - r2);
    } else {
        out.push(r1);
        out.extend_from_slice(&runs[p1..p2 - 1]);
        out.push(end_len - r2);
    }
    let trimmed = RunRow::new(out);
    if trimmed.is_canonical() {
        Ok(trimmed)
    } else {
        Ok(canonicalize_row(&trimmed))
    }
}

/// Extracts `spec` from `doc` without expanding any row to pixels.
pub fn extract_block(doc: &CompressedDoc, spec: &BlockSpec) -> Result<CompressedDoc> {
    extract_block_with_stats(doc, spec).map(|(block, _)| block)
}

/// [`extract_block`] plus the work counters for the call.
pub fn extract_block_with_stats(
    doc: &CompressedDoc,
    spec: &BlockSpec,
) -> Result<(CompressedDoc, ExtractStats)> {
    spec.validate(doc.width(), doc.height())?;
    let block_width = spec.width();
    let mut stats = ExtractStats::default();
    let mut rows = Vec::with_capacity(spec.height());
    for (offset, row) in doc.rows()[spec.x1 - 1..spec.x2].iter().enumerate() {
        let (rec, visited) = locate_boundaries(row, spec.y1, spec.y2)?;
        let trimmed = trim_row(row, &rec)?;
        let sum = trimmed.total();
        if sum != block_width as u64 {
            return Err(Error::Inconsistent(format!(
                "row {}: trimmed runs sum to {sum}, block width is {block_width}",
                spec.x1 + offset
            )));
        }
        stats.rows_visited += 1;
        stats.runs_visited += visited;
        stats.runs_emitted += trimmed.len();
        rows.push(trimmed);
    }
    Ok((
        CompressedDoc::from_parts(block_width, spec.height(), rows),
        stats,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rle::{decode_row, encode_row};

    fn row(runs: &[usize]) -> RunRow {
        RunRow::new(runs.to_vec())
    }

    // Column-enumeration oracle: walk pixels one at a time and note which run
    // each column belongs to.
    fn run_of_column(runs: &[usize], column: usize) -> (usize, usize, usize) {
        let mut col = 0;
        for (i, &len) in runs.iter().enumerate() {
            for k in 0..len {
                col += 1;
                if col == column {
                    // (1-indexed run, pixels from here to run end, pixels after here)
                    return (i + 1, len - k, len - k - 1);
                }
            }
        }
        panic!("column {column} out of range");
    }

    #[test]
    fn locate_start_examples() {
        assert_eq!(locate_start(&row(&[4, 4]), 3).unwrap(), (1, 2));
        assert_eq!(locate_start(&row(&[5]), 1).unwrap(), (1, 5));
        assert_eq!(locate_start(&row(&[2, 3]), 3).unwrap(), (2, 3));
        assert_eq!(run_of_column(&[2, 3], 3), (2, 3, 2));
    }

    #[test]
    fn locate_end_examples() {
        assert_eq!(locate_end(&row(&[4, 4]), 6).unwrap(), (2, 2));
        assert_eq!(locate_end(&row(&[4, 4]), 8).unwrap(), (2, 0));
        assert_eq!(locate_end(&row(&[1, 1, 1, 1]), 3).unwrap(), (3, 0));
    }

    #[test]
    fn locate_rejects_out_of_range_columns() {
        assert!(matches!(
            locate_start(&row(&[4, 4]), 9),
            Err(Error::ColumnOutOfRange { column: 9, width: 8 })
        ));
        assert!(locate_end(&row(&[4, 4]), 9).is_err());
        assert!(locate_start(&row(&[4, 4]), 0).is_err());
    }

    #[test]
    fn locate_skips_leading_zero_run() {
        assert_eq!(locate_start(&row(&[0, 8]), 1).unwrap(), (2, 8));
        assert_eq!(locate_start(&row(&[0, 8]), 2).unwrap(), (2, 7));
    }

    #[test]
    fn locate_agrees_with_column_enumeration() {
        for width in 1..=10usize {
            for bits in 0u32..(1 << width) {
                let pixels: Vec<u8> = (0..width).map(|i| ((bits >> i) & 1) as u8).collect();
                let r = encode_row(&pixels).unwrap();
                let mut last = (0, 0);
                for y in 1..=width {
                    let (p, after_incl, after) = run_of_column(r.runs(), y);
                    assert_eq!(locate_start(&r, y).unwrap(), (p, after_incl));
                    assert_eq!(locate_end(&r, y).unwrap(), (p, after));
                    // non-decreasing in y
                    assert!(p >= last.0);
                    last = (p, after);
                }
            }
        }
    }

    #[test]
    fn worked_example_record_and_trim() {
        let r = row(&[4, 4]);
        let (rec, visited) = locate_boundaries(&r, 3, 6).unwrap();
        assert_eq!(rec, BoundaryRecord { p1: 1, r1: 2, p2: 2, r2: 2 });
        assert_eq!(rec.to_string(), "1 2 2 2");
        assert_eq!(visited, 2);
        assert_eq!(trim_row(&r, &rec).unwrap(), row(&[2, 2]));
    }

    #[test]
    fn trim_single_run_cases() {
        let rec = BoundaryRecord { p1: 1, r1: 7, p2: 1, r2: 3 };
        assert_eq!(locate_boundaries(&row(&[10]), 4, 7).unwrap().0, rec);
        assert_eq!(trim_row(&row(&[10]), &rec).unwrap(), row(&[4]));

        // Block opening inside a foreground run.
        let fg = row(&[0, 8]);
        let rec = locate_boundaries(&fg, 2, 5).unwrap().0;
        assert_eq!(rec, BoundaryRecord { p1: 2, r1: 7, p2: 2, r2: 3 });
        let t = trim_row(&fg, &rec).unwrap();
        assert_eq!(t, row(&[0, 4]));
        assert_eq!(decode_row(&t, 4).unwrap(), vec![1; 4]);
    }

    #[test]
    fn trim_end_run_untouched_when_residue_zero() {
        let r = row(&[3, 2, 4]);
        let rec = locate_boundaries(&r, 2, 9).unwrap().0;
        assert_eq!(rec, BoundaryRecord { p1: 1, r1: 2, p2: 3, r2: 0 });
        assert_eq!(trim_row(&r, &rec).unwrap(), row(&[2, 2, 4]));
    }

    #[test]
    fn trim_rejects_inconsistent_records() {
        let r = row(&[4, 4]);
        for rec in [
            BoundaryRecord { p1: 0, r1: 1, p2: 1, r2: 0 },
            BoundaryRecord { p1: 2, r1: 1, p2: 1, r2: 0 },
            BoundaryRecord { p1: 1, r1: 5, p2: 2, r2: 0 },
            BoundaryRecord { p1: 1, r1: 0, p2: 2, r2: 0 },
            BoundaryRecord { p1: 1, r1: 2, p2: 2, r2: 4 },
            BoundaryRecord { p1: 1, r1: 2, p2: 1, r2: 2 },
            BoundaryRecord { p1: 1, r1: 2, p2: 3, r2: 0 },
        ] {
            assert!(matches!(trim_row(&r, &rec), Err(Error::Inconsistent(_))), "{rec}");
        }
    }

    #[test]
    fn spec_validation_names_bound() {
        let doc = CompressedDoc::new(8, 2, vec![row(&[8]), row(&[8])]).unwrap();
        let cases = [
            (BlockSpec::new(0, 1, 1, 1), Bound::X1),
            (BlockSpec::new(2, 1, 1, 1), Bound::X2),
            (BlockSpec::new(1, 3, 1, 1), Bound::X2),
            (BlockSpec::new(1, 2, 9, 9), Bound::Y1),
            (BlockSpec::new(1, 2, 4, 3), Bound::Y2),
            (BlockSpec::new(1, 2, 4, 9), Bound::Y2),
        ];
        for (spec, bound) in cases {
            match extract_block(&doc, &spec) {
                Err(Error::OutOfBounds { bound: b, .. }) => assert_eq!(b, bound, "{spec}"),
                other => panic!("{spec}: {other:?}"),
            }
        }
    }

    #[test]
    fn position_table_worked_example() {
        let doc = CompressedDoc::new(8, 3, vec![row(&[8]), row(&[4, 4]), row(&[4, 4])]).unwrap();
        let table = build_position_table(&doc, &BlockSpec::new(2, 3, 3, 6)).unwrap();
        assert_eq!(table.first_row, 2);
        assert_eq!(table.to_string(), "1 2 2 2\n1 2 2 2\n");
    }

    #[test]
    fn full_width_records() {
        let doc = CompressedDoc::new(6, 2, vec![row(&[0, 2, 4]), row(&[1, 1, 1, 3])]).unwrap();
        let table = build_position_table(&doc, &BlockSpec::full(6, 2)).unwrap();
        for (rec, r) in table.records.iter().zip(doc.rows()) {
            let first_nonzero = r.runs().iter().position(|&x| x > 0).unwrap();
            assert_eq!(rec.p1, first_nonzero + 1);
            assert_eq!(rec.r1, r.runs()[first_nonzero]);
            assert_eq!(rec.p2, r.len());
            assert_eq!(rec.r2, 0);
        }
        assert_eq!(extract_block(&doc, &BlockSpec::full(6, 2)).unwrap(), doc);
    }

    #[test]
    fn one_pixel_block() {
        let doc = CompressedDoc::new(3, 1, vec![row(&[1, 1, 1])]).unwrap();
        let b = extract_block(&doc, &BlockSpec::new(1, 1, 2, 2)).unwrap();
        assert_eq!((b.width(), b.height()), (1, 1));
        assert_eq!(b.rows(), &[row(&[0, 1])]);
    }

    #[test]
    fn stats_count_only_selected_rows() {
        let doc = CompressedDoc::new(
            8,
            4,
            vec![row(&[1, 1, 1, 1, 1, 1, 1, 1]), row(&[4, 4]), row(&[4, 4]), row(&[8])],
        )
        .unwrap();
        let (_, stats) = extract_block_with_stats(&doc, &BlockSpec::new(2, 3, 3, 6)).unwrap();
        assert_eq!(stats.rows_visited, 2);
        assert_eq!(stats.runs_visited, 4);
        assert_eq!(stats.runs_emitted, 4);
    }

    #[test]
    fn non_canonical_input_still_yields_canonical_block() {
        let doc = CompressedDoc::new(7, 1, vec![row(&[2, 0, 0, 5])]).unwrap();
        let b = extract_block(&doc, &BlockSpec::new(1, 1, 1, 7)).unwrap();
        assert_eq!(b.rows(), &[row(&[2, 5])]);
        let doc = CompressedDoc::new(7, 1, vec![row(&[2, 3, 0, 0, 2])]).unwrap();
        let b = extract_block(&doc, &BlockSpec::new(1, 1, 3, 6)).unwrap();
        assert_eq!(b.rows(), &[row(&[0, 3, 1])]);
    }
}
