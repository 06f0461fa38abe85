//! PBM reader and writer (P1 plain, P4 raw). `1` is black/foreground.

use crate::error::{Error, Result};
use crate::rle::{PixelGrid, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PbmFormat {
    /// ASCII `P1`.
    Plain,
    /// Packed `P4`, rows padded to whole bytes.
    #[default]
    Raw,
}

const PLAIN_PIXELS_PER_LINE: usize = 35;

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::parse("PBM", format!("byte {offset}"), message)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read_dim(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as usize))
                .filter(|&v| v <= MAX_DIM)
                .ok_or_else(|| err(start, format!("{what} exceeds {MAX_DIM}")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.data.get(start) {
                None => err(start, format!("truncated header, expected {what}")),
                Some(&b) => err(start, format!("expected {what}, found byte 0x{b:02x}")),
            });
        }
        if value == 0 {
            return Err(err(start, format!("{what} must be positive")));
        }
        Ok(value)
    }
}

pub fn read_pbm(bytes: &[u8]) -> Result<PixelGrid> {
    let format = match bytes.get(..2) {
        Some(b"P1") => PbmFormat::Plain,
        Some(b"P4") => PbmFormat::Raw,
        _ => return Err(err(0, "bad magic, expected P1 or P4")),
    };
    let mut cur = Cursor { data: bytes, pos: 2 };
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        _ => return Err(err(2, "expected whitespace after magic")),
    }
    let width = cur.read_dim("width")?;
    let height = cur.read_dim("height")?;
    let total = width
        .checked_mul(height)
        .ok_or_else(|| err(cur.pos, "image dimensions overflow"))?;

    let mut pixels = Vec::with_capacity(total);
    match format {
        PbmFormat::Plain => {
            while pixels.len() < total {
                cur.skip_space_and_comments();
                match bytes.get(cur.pos) {
                    Some(b'0') => pixels.push(0),
                    Some(b'1') => pixels.push(1),
                    Some(&b) => return Err(err(cur.pos, format!("expected 0 or 1, found byte 0x{b:02x}"))),
                    None => {
                        return Err(err(
                            cur.pos,
                            format!("truncated raster: {} of {} pixels", pixels.len(), total),
                        ))
                    }
                }
                cur.pos += 1;
            }
        }
        PbmFormat::Raw => {
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(err(cur.pos, "expected a single whitespace byte before the raster")),
            }
            let stride = width.div_ceil(8);
            let needed = stride
                .checked_mul(height)
                .ok_or_else(|| err(cur.pos, "image dimensions overflow"))?;
            let raster = bytes
                .get(cur.pos..cur.pos + needed)
                .ok_or_else(|| {
                    err(
                        bytes.len(),
                        format!("truncated raster: {} of {} bytes", bytes.len() - cur.pos, needed),
                    )
                })?;
            for line in raster.chunks_exact(stride) {
                for x in 0..width {
                    pixels.push((line[x / 8] >> (7 - x % 8)) & 1);
                }
            }
        }
    }
    PixelGrid::new(width, height, pixels)
}

pub fn write_pbm(grid: &PixelGrid, format: PbmFormat) -> Vec<u8> {
    let (w, h) = (grid.width(), grid.height());
    match format {
        PbmFormat::Plain => {
            let mut out = format!("P1\n{w} {h}\n").into_bytes();
            out.reserve(2 * w * h);
            for row in grid.rows() {
                for line in row.chunks(PLAIN_PIXELS_PER_LINE) {
                    for (i, &p) in line.iter().enumerate() {
                        if i > 0 {
                            out.push(b' ');
                        }
                        out.push(b'0' + p);
                    }
                    out.push(b'\n');
                }
            }
            out
        }
        PbmFormat::Raw => {
            let mut out = format!("P4\n{w} {h}\n").into_bytes();
            let stride = w.div_ceil(8);
            out.reserve(stride * h);
            for row in grid.rows() {
                let mut packed = vec![0u8; stride];
                for (x, &p) in row.iter().enumerate() {
                    packed[x / 8] |= p << (7 - x % 8);
                }
                out.extend_from_slice(&packed);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_example() {
        let g = read_pbm(b"P1\n3 1\n1 1 0\n").unwrap();
        assert_eq!(g.to_rows(), vec![vec![1, 1, 0]]);
        assert_eq!(write_pbm(&g, PbmFormat::Plain), b"P1\n3 1\n1 1 0\n");
    }

    #[test]
    fn raw_example_ignores_padding() {
        let g = read_pbm(b"P4\n3 1\n\xDF").unwrap();
        assert_eq!(g.to_rows(), vec![vec![1, 1, 0]]);
        assert_eq!(write_pbm(&g, PbmFormat::Raw), b"P4\n3 1\n\xC0");
    }

    #[test]
    fn comments_and_packed_plain_digits() {
        let g = read_pbm(b"P1 # comment\n# another\n 4 # w\n2\n0110\n1001").unwrap();
        assert_eq!(g.to_rows(), vec![vec![0, 1, 1, 0], vec![1, 0, 0, 1]]);
    }

    #[test]
    fn plain_lines_wrap() {
        let g = PixelGrid::new(40, 1, vec![1; 40]).unwrap();
        let text = String::from_utf8(write_pbm(&g, PbmFormat::Plain)).unwrap();
        assert!(text.lines().all(|l| l.len() <= 70));
        assert_eq!(read_pbm(text.as_bytes()).unwrap(), g);
    }

    #[test]
    fn rejects_malformed_input() {
        for (input, needle) in [
            (&b"P2\n1 1\n0\n"[..], "bad magic"),
            (b"P1\n3 1\n1 1", "truncated raster"),
            (b"P1\n3 1\n1 2 0", "expected 0 or 1"),
            (b"P4\n9 2\n\x00\x00\x00", "truncated raster"),
            (b"P4\n0 2\n", "must be positive"),
            (b"P1\n99999999999999999999 1\n", "exceeds"),
            (b"P1\n3", "truncated header"),
            (b"P4\n3 1X\xFF", "single whitespace"),
        ] {
            let e = read_pbm(input).unwrap_err().to_string();
            assert!(e.contains(needle), "{e}");
            assert!(e.contains("byte "), "{e}");
        }
    }
}
