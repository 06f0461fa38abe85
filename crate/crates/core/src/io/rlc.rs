//! RLC1 text format.
//!
//! ```text
//! RLC1
//! <width> <height>
//! <run> <run> ...      one line per row, background run first
//! ```
//!
//! Every line, including the last, ends with `\n`. Tokens are ASCII decimal
//! separated by single spaces with no leading or trailing whitespace.

use crate::error::{Error, Result};
use crate::rle::{canonicalize_row, CompressedDoc, RunRow};

pub const RLE_MAGIC: &str = "RLC1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RleHeader {
    pub width: usize,
    pub height: usize,
    /// Byte offset of the first row line.
    pub body_offset: usize,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::parse("RLC1", format!("line {line}"), message)
}

/// Splits off one `\n`-terminated line starting at `pos`.
fn take_line(bytes: &[u8], pos: usize, line_no: usize) -> Result<(&str, usize)> {
    let rest = &bytes[pos..];
    let end = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| err(line_no, if rest.is_empty() { "unexpected end of file" } else { "missing newline" }))?;
    let line = std::str::from_utf8(&rest[..end]).map_err(|_| err(line_no, "not valid ASCII"))?;
    Ok((line, pos + end + 1))
}

fn parse_tokens(line: &str, line_no: usize) -> Result<Vec<usize>> {
    if line.is_empty() {
        return Err(err(line_no, "empty line"));
    }
    line.split(' ')
        .enumerate()
        .map(|(i, tok)| {
            if tok.is_empty() {
                return Err(err(line_no, "unexpected whitespace"));
            }
            if !tok.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err(line_no, format!("token {} ({tok:?}) is not a decimal number", i + 1)));
            }
            tok.parse::<usize>()
                .map_err(|_| err(line_no, format!("token {} ({tok}) is too large", i + 1)))
        })
        .collect()
}

/// Reads and validates only the two header lines.
pub fn read_rle_header(bytes: &[u8]) -> Result<RleHeader> {
    let (magic, pos) = take_line(bytes, 0, 1)?;
    if magic != RLE_MAGIC {
        return Err(err(1, format!("bad magic {magic:?}, expected {RLE_MAGIC:?}")));
    }
    let (dims, body_offset) = take_line(bytes, pos, 2)?;
    let dims = parse_tokens(dims, 2)?;
    let [width, height] = dims[..] else {
        return Err(err(2, format!("expected \"<width> <height>\", found {} tokens", dims.len())));
    };
    if width == 0 || height == 0 || width > crate::rle::MAX_DIM || height > crate::rle::MAX_DIM {
        return Err(err(2, format!("invalid dimensions {width}x{height}")));
    }
    Ok(RleHeader {
        width,
        height,
        body_offset,
    })
}

/// Parses an RLC1 file. Row sums are checked against the declared width;
/// rows are kept exactly as written.
pub fn read_rle(bytes: &[u8]) -> Result<CompressedDoc> {
    let header = read_rle_header(bytes)?;
    let mut pos = header.body_offset;
    let mut rows = Vec::with_capacity(header.height);
    for row_no in 1..=header.height {
        if pos == bytes.len() {
            return Err(err(
                row_no + 2,
                format!("expected {} rows, found {}", header.height, row_no - 1),
            ));
        }
        let (line, next) = take_line(bytes, pos, row_no + 2)?;
        let runs = parse_tokens(line, row_no + 2)?;
        let sum = runs.iter().try_fold(0u64, |acc, &r| acc.checked_add(r as u64));
        match sum {
            Some(s) if s == header.width as u64 => {}
            _ => {
                return Err(Error::CorruptRow {
                    row: row_no,
                    sum: sum.unwrap_or(u64::MAX),
                    width: header.width,
                })
            }
        }
        rows.push(RunRow::new(runs));
        pos = next;
    }
    if pos != bytes.len() {
        return Err(err(
            header.height + 3,
            format!("expected {} rows, found trailing data", header.height),
        ));
    }
    CompressedDoc::new(header.width, header.height, rows)
}

/// Writes `doc` with every row in canonical form.
pub fn write_rle(doc: &CompressedDoc) -> Vec<u8> {
    let mut out = format!("{RLE_MAGIC}\n{} {}\n", doc.width(), doc.height());
    for row in doc.rows() {
        let canonical;
        let runs = if row.is_canonical() {
            row.runs()
        } else {
            canonical = canonicalize_row(row);
            canonical.runs()
        };
        for (i, r) in runs.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&r.to_string());
        }
        out.push('\n');
    }
    out.into_bytes()
}
