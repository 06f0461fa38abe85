//! ITU-T T.4 one-dimensional Modified Huffman coding.
//!
//! Each row is a sequence of alternating white and black run codes starting
//! with white; a black-first row begins with the white code for length 0.
//! A run is zero or more make-up codes (multiples of 64) followed by exactly
//! one terminating code (0..=63). Runs longer than 2560 repeat the 2560
//! make-up code. Bits are packed most significant bit first.
//!
//! Stream framing is controlled by [`MhOptions`]: with `EolMode::Required`
//! every row is preceded by the 12-bit EOL code `000000000001`, and with
//! `byte_align` each row's data (the EOL, when present) is padded with zero
//! fill so that it ends on a byte boundary.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::rle::{canonicalize_row, run_color, CompressedDoc, RunRow, BACKGROUND};

#[rustfmt::skip]
const WHITE_TERMINATING: [&str; 64] = [
    "00110101", "000111", "0111", "1000", "1011", "1100", "1110", "1111",
    "10011", "10100", "00111", "01000", "001000", "000011", "110100", "110101",
    "101010", "101011", "0100111", "0001100", "0001000", "0010111", "0000011", "0000100",
    "0101000", "0101011", "0010011", "0100100", "0011000", "00000010", "00000011", "00011010",
    "00011011", "00010010", "00010011", "00010100", "00010101", "00010110", "00010111", "00101000",
    "00101001", "00101010", "00101011", "00101100", "00101101", "00000100", "00000101", "00001010",
    "00001011", "01010010", "01010011", "01010100", "01010101", "00100100", "00100101", "01011000",
    "01011001", "01011010", "01011011", "01001010", "01001011", "00110010", "00110011", "00110100",
];

#[rustfmt::skip]
const BLACK_TERMINATING: [&str; 64] = [
    "0000110111", "010", "11", "10", "011", "0011", "0010", "00011",
    "000101", "000100", "0000100", "0000101", "0000111", "00000100", "00000111", "000011000",
    "0000010111", "0000011000", "0000001000", "00001100111", "00001101000", "00001101100", "00000110111", "00000101000",
    "00000010111", "00000011000", "000011001010", "000011001011", "000011001100", "000011001101", "000001101000", "000001101001",
    "000001101010", "000001101011", "000011010010", "000011010011", "000011010100", "000011010101", "000011010110", "000011010111",
    "000001101100", "000001101101", "000011011010", "000011011011", "000001010100", "000001010101", "000001010110", "000001010111",
    "000001100100", "000001100101", "000001010010", "000001010011", "000000100100", "000000110111", "000000111000", "000000100111",
    "000000101000", "000001011000", "000001011001", "000000101011", "000000101100", "000001011010", "000001100110", "000001100111",
];

/// Make-up codes for 64, 128, ..., 1728.
#[rustfmt::skip]
const WHITE_MAKEUP: [&str; 27] = [
    "11011", "10010", "010111", "0110111", "00110110", "00110111", "01100100", "01100101",
    "01101000", "01100111", "011001100", "011001101", "011010010", "011010011", "011010100", "011010101",
    "011010110", "011010111", "011011000", "011011001", "011011010", "011011011", "010011000", "010011001",
    "010011010", "011000", "010011011",
];

#[rustfmt::skip]
const BLACK_MAKEUP: [&str; 27] = [
    "0000001111", "000011001000", "000011001001", "000001011011", "000000110011", "000000110100", "000000110101", "0000001101100",
    "0000001101101", "0000001001010", "0000001001011", "0000001001100", "0000001001101", "0000001110010", "0000001110011", "0000001110100",
    "0000001110101", "0000001110110", "0000001110111", "0000001010010", "0000001010011", "0000001010100", "0000001010101", "0000001011010",
    "0000001011011", "0000001100100", "0000001100101",
];

/// Extended make-up codes for 1792, 1856, ..., 2560, shared by both colors.
#[rustfmt::skip]
const EXTENDED_MAKEUP: [&str; 13] = [
    "00000001000", "00000001100", "00000001101", "000000010010", "000000010011", "000000010100", "000000010101",
    "000000010110", "000000010111", "000000011100", "000000011101", "000000011110", "000000011111",
];

const EOL: Code = Code { bits: 0b0000_0000_0001, len: 12 };

pub const MAX_MAKEUP: usize = 2560;

/// Longest code in either table.
const PEEK_BITS: u32 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Code {
    bits: u16,
    len: u8,
}

impl Code {
    fn parse(s: &str) -> Code {
        Code {
            bits: u16::from_str_radix(s, 2).expect("binary code literal"),
            len: s.len() as u8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symbol {
    Invalid,
    Terminating(u16),
    Makeup(u16),
    Eol,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    symbol: Symbol,
    len: u8,
}

struct ColorTable {
    terminating: [Code; 64],
    /// Index `k` holds the code for `64 * (k + 1)`.
    makeup: [Code; 40],
    /// Indexed by the next [`PEEK_BITS`] bits of the stream.
    lookup: Vec<Entry>,
}

impl ColorTable {
    fn build(terminating: &[&str; 64], makeup: &[&str; 27]) -> ColorTable {
        let terminating = terminating.map(Code::parse);
        let mut all_makeup = [Code { bits: 0, len: 0 }; 40];
        for (slot, s) in all_makeup.iter_mut().zip(makeup.iter().chain(EXTENDED_MAKEUP.iter())) {
            *slot = Code::parse(s);
        }
        let mut lookup = vec![
            Entry {
                symbol: Symbol::Invalid,
                len: 0
            };
            1 << PEEK_BITS
        ];
        let mut place = |code: Code, symbol: Symbol| {
            let shift = PEEK_BITS - code.len as u32;
            let base = (code.bits as usize) << shift;
            for slot in &mut lookup[base..base + (1 << shift)] {
                assert_eq!(slot.symbol, Symbol::Invalid, "code table is not prefix-free");
                *slot = Entry {
                    symbol,
                    len: code.len,
                };
            }
        };
        for (run, &code) in terminating.iter().enumerate() {
            place(code, Symbol::Terminating(run as u16));
        }
        for (k, &code) in all_makeup.iter().enumerate() {
            place(code, Symbol::Makeup(64 * (k as u16 + 1)));
        }
        place(EOL, Symbol::Eol);
        ColorTable {
            terminating,
            makeup: all_makeup,
            lookup,
        }
    }
}

fn tables() -> &'static [ColorTable; 2] {
    static TABLES: OnceLock<[ColorTable; 2]> = OnceLock::new();
    TABLES.get_or_init(|| {
        [
            ColorTable::build(&WHITE_TERMINATING, &WHITE_MAKEUP),
            ColorTable::build(&BLACK_TERMINATING, &BLACK_MAKEUP),
        ]
    })
}

/// A bit string, most significant bit first within each byte.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MhBits {
    bytes: Vec<u8>,
    len: usize,
}

impl MhBits {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps `bytes`, using all of their bits.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len = bytes.len() * 8;
        MhBits { bytes, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes; the final byte is zero-padded.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn bit(&self, index: usize) -> bool {
        (self.bytes[index / 8] >> (7 - index % 8)) & 1 == 1
    }

    /// Renders the bits as a `0`/`1` string.
    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.bit(i) { '1' } else { '0' }).collect()
    }

    fn push_bits(&mut self, bits: u32, count: u8) {
        for i in (0..count).rev() {
            if self.len % 8 == 0 {
                self.bytes.push(0);
            }
            if (bits >> i) & 1 == 1 {
                let last = self.bytes.len() - 1;
                self.bytes[last] |= 1 << (7 - self.len % 8);
            }
            self.len += 1;
        }
    }

    fn push_code(&mut self, code: Code) {
        self.push_bits(code.bits as u32, code.len);
    }

    fn pad_zeros(&mut self, count: usize) {
        for _ in 0..count {
            self.push_bits(0, 1);
        }
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    len: usize,
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8], len: usize) -> Self {
        BitReader { bytes, len, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.len - self.pos
    }

    fn bit_at(&self, index: usize) -> u32 {
        ((self.bytes[index / 8] >> (7 - index % 8)) & 1) as u32
    }

    /// Next `count` bits, zero-filled past the end of the stream.
    fn peek(&self, count: u32) -> u32 {
        let mut v = 0;
        for i in 0..count as usize {
            let idx = self.pos + i;
            v = (v << 1) | if idx < self.len { self.bit_at(idx) } else { 0 };
        }
        v
    }

    fn read_bit(&mut self) -> Option<u32> {
        if self.pos >= self.len {
            return None;
        }
        let b = self.bit_at(self.pos);
        self.pos += 1;
        Some(b)
    }
}

fn err_at(row: usize, bit: usize, message: impl Into<String>) -> Error {
    Error::parse("MH", format!("row {row}, bit {bit}"), message)
}

/// Appends the codes for one run of `len` pixels of `color`.
fn encode_run(out: &mut MhBits, color: u8, mut len: usize) {
    let table = &tables()[color as usize];
    while len > MAX_MAKEUP {
        out.push_code(table.makeup[MAX_MAKEUP / 64 - 1]);
        len -= MAX_MAKEUP;
    }
    if len >= 64 {
        out.push_code(table.makeup[len / 64 - 1]);
    }
    out.push_code(table.terminating[len % 64]);
}

/// Reads one complete run (make-up codes then a terminating code).
fn decode_run(reader: &mut BitReader<'_>, color: u8, row: usize) -> Result<usize> {
    let table = &tables()[color as usize];
    let mut total = 0usize;
    loop {
        let at = reader.pos;
        if reader.remaining() == 0 {
            return Err(err_at(row, at, "premature end of stream inside row"));
        }
        let entry = table.lookup[reader.peek(PEEK_BITS) as usize];
        if entry.symbol != Symbol::Invalid && entry.len as usize > reader.remaining() {
            return Err(err_at(row, at, "premature end of stream inside a code"));
        }
        match entry.symbol {
            Symbol::Invalid => {
                let name = if color == BACKGROUND { "white" } else { "black" };
                return Err(err_at(row, at, format!("no {name} code matches")));
            }
            Symbol::Eol => return Err(err_at(row, at, "unexpected EOL inside row")),
            Symbol::Makeup(n) => {
                reader.pos += entry.len as usize;
                total += n as usize;
            }
            Symbol::Terminating(n) => {
                reader.pos += entry.len as usize;
                return Ok(total + n as usize);
            }
        }
    }
}

fn decode_row_at(reader: &mut BitReader<'_>, width: usize, row: usize) -> Result<RunRow> {
    let mut runs = Vec::new();
    let mut sum = 0usize;
    let mut needs_canonicalizing = false;
    while sum < width || runs.is_empty() {
        let color = run_color(runs.len());
        let start = reader.pos;
        let len = decode_run(reader, color, row)?;
        sum += len;
        if sum > width {
            return Err(err_at(row, start, format!("runs overrun the row width {width}")));
        }
        needs_canonicalizing |= len == 0 && !runs.is_empty();
        runs.push(len);
    }
    let row = RunRow::new(runs);
    Ok(if needs_canonicalizing {
        canonicalize_row(&row)
    } else {
        row
    })
}

/// Codes for a single run of `len` pixels of `color` (0 white, 1 black).
pub fn mh_encode_run(color: u8, len: usize) -> MhBits {
    let mut out = MhBits::new();
    encode_run(&mut out, color & 1, len);
    out
}

/// Reads one run of `color` from the start of `bits`; the bits must hold
/// exactly that run.
pub fn mh_decode_run(bits: &MhBits, color: u8) -> Result<usize> {
    let mut reader = BitReader::new(&bits.bytes, bits.len);
    let len = decode_run(&mut reader, color & 1, 1)?;
    if reader.remaining() != 0 {
        return Err(err_at(1, reader.pos, "trailing bits after run"));
    }
    Ok(len)
}

/// Encodes one row without framing.
pub fn mh_encode_row(row: &RunRow) -> MhBits {
    let mut out = MhBits::new();
    append_row(&mut out, row);
    out
}

fn append_row(out: &mut MhBits, row: &RunRow) {
    let canonical;
    let row = if row.is_canonical() {
        row
    } else {
        canonical = canonicalize_row(row);
        &canonical
    };
    for (i, &len) in row.runs().iter().enumerate() {
        encode_run(out, run_color(i), len);
    }
}

/// Decodes one unframed row of `width` pixels from the start of `bits`.
/// Bits after the row are ignored.
pub fn mh_decode_row(bits: &MhBits, width: usize) -> Result<RunRow> {
    if width == 0 {
        return Err(Error::InvalidInput("row width must be positive".into()));
    }
    let mut reader = BitReader::new(&bits.bytes, bits.len);
    decode_row_at(&mut reader, width, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EolMode {
    /// Every row is preceded by an EOL code.
    #[default]
    Required,
    /// EOL codes are an error anywhere in the stream.
    Forbidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MhOptions {
    pub eol: EolMode,
    pub byte_align: bool,
}

pub fn mh_encode_image(doc: &CompressedDoc, options: MhOptions) -> MhBits {
    let mut out = MhBits::new();
    for row in doc.rows() {
        match (options.eol, options.byte_align) {
            (EolMode::Required, true) => {
                let fill = (8 - (out.len() + EOL.len as usize) % 8) % 8;
                out.pad_zeros(fill);
                out.push_code(EOL);
            }
            (EolMode::Required, false) => out.push_code(EOL),
            (EolMode::Forbidden, true) => out.pad_zeros((8 - out.len() % 8) % 8),
            (EolMode::Forbidden, false) => {}
        }
        append_row(&mut out, row);
    }
    out
}

/// Consumes zero fill followed by the final `1` of an EOL.
fn read_eol(reader: &mut BitReader<'_>, row: usize, byte_align: bool) -> Result<()> {
    let start = reader.pos;
    let mut zeros = 0usize;
    loop {
        match reader.read_bit() {
            None => return Err(err_at(row, start, "premature end of stream, expected EOL")),
            Some(0) => zeros += 1,
            Some(_) => break,
        }
    }
    if zeros < 11 {
        return Err(err_at(row, start, "missing EOL before row"));
    }
    if byte_align && reader.pos % 8 != 0 {
        return Err(err_at(row, start, "EOL does not end on a byte boundary"));
    }
    Ok(())
}

fn skip_zero_fill(reader: &mut BitReader<'_>, row: usize) -> Result<()> {
    while reader.pos % 8 != 0 {
        let at = reader.pos;
        match reader.read_bit() {
            Some(0) => {}
            Some(_) => return Err(err_at(row, at, "non-zero fill bit")),
            None => return Err(err_at(row, at, "premature end of stream")),
        }
    }
    Ok(())
}

/// Decodes `height` rows of `width` pixels.
///
/// After the last row only zero fill and, in EOL mode, further EOL codes
/// (such as a return-to-control sequence) may follow.
pub fn mh_decode_image(
    bits: &MhBits,
    width: usize,
    height: usize,
    options: MhOptions,
) -> Result<CompressedDoc> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(format!("invalid dimensions {width}x{height}")));
    }
    let mut reader = BitReader::new(&bits.bytes, bits.len);
    let mut rows = Vec::with_capacity(height);
    for row in 1..=height {
        match options.eol {
            EolMode::Required => read_eol(&mut reader, row, options.byte_align)?,
            EolMode::Forbidden => {
                if options.byte_align {
                    skip_zero_fill(&mut reader, row)?;
                }
                if reader.remaining() == 0 {
                    return Err(err_at(row, reader.pos, "premature end of stream"));
                }
            }
        }
        rows.push(decode_row_at(&mut reader, width, row)?);
    }
    // trailer
    while reader.remaining() > 0 {
        let at = reader.pos;
        if reader.peek(1) == 0 {
            let zeros = (0..reader.remaining())
                .take_while(|&i| reader.bit_at(at + i) == 0)
                .count();
            if zeros == reader.remaining() {
                break;
            }
            if options.eol == EolMode::Required && zeros >= 11 {
                reader.pos += zeros + 1;
                continue;
            }
        }
        return Err(err_at(height, at, "unexpected data after the last row"));
    }
    CompressedDoc::new(width, height, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(runs: &[usize]) -> RunRow {
        RunRow::new(runs.to_vec())
    }

    fn bits(s: &str) -> MhBits {
        let mut b = MhBits::new();
        for c in s.chars() {
            b.push_bits((c == '1') as u32, 1);
        }
        b
    }

    #[test]
    fn tables_are_prefix_free() {
        // Building asserts that no two codes share a prefix.
        let t = tables();
        for table in t {
            let mut seen = std::collections::HashSet::new();
            for code in table.terminating.iter().chain(table.makeup.iter()) {
                assert!(seen.insert(*code));
            }
        }
    }

    #[test]
    fn white_four_is_1011() {
        let b = mh_encode_row(&row(&[4]));
        assert_eq!(b.to_bit_string(), "1011");
        assert_eq!(mh_decode_row(&b, 4).unwrap(), row(&[4]));
    }

    #[test]
    fn black_first_row_starts_with_white_zero() {
        let b = mh_encode_row(&row(&[0, 3]));
        // white 0 = 00110101, black 3 = 10
        assert_eq!(b.to_bit_string(), "0011010110");
        assert_eq!(mh_decode_row(&b, 3).unwrap(), row(&[0, 3]));
    }

    #[test]
    fn long_runs_use_makeup_codes() {
        // white 1728 + 0 (make-up 010011011, terminating 00110101)
        assert_eq!(mh_encode_row(&row(&[1728])).to_bit_string(), "01001101100110101");
        // 2560 + 2560 + 64 + 3 on black
        let r = row(&[0, 5187]);
        assert_eq!(mh_decode_row(&mh_encode_row(&r), 5187).unwrap(), r);
    }

    #[test]
    fn decode_errors() {
        // 0000000 prefix then 1 is no white code
        let e = mh_decode_row(&bits("0000000011111"), 4).unwrap_err().to_string();
        assert!(e.contains("no white code"), "{e}");
        // white 4 then black 3 overruns width 5
        let e = mh_decode_row(&bits("101110"), 5).unwrap_err().to_string();
        assert!(e.contains("overrun"), "{e}");
        // white 4 and nothing else, width 8
        let e = mh_decode_row(&bits("1011"), 8).unwrap_err().to_string();
        assert!(e.contains("premature end"), "{e}");
        // truncated code
        let e = mh_decode_row(&bits("00110"), 8).unwrap_err().to_string();
        assert!(e.contains("premature end"), "{e}");
        let e = mh_decode_row(&bits("000000000001"), 8).unwrap_err().to_string();
        assert!(e.contains("EOL"), "{e}");
    }

    #[test]
    fn image_framing() {
        let doc = CompressedDoc::new(8, 2, vec![row(&[4, 4]), row(&[0, 8])]).unwrap();
        for eol in [EolMode::Required, EolMode::Forbidden] {
            for byte_align in [false, true] {
                let opts = MhOptions { eol, byte_align };
                let b = mh_encode_image(&doc, opts);
                assert_eq!(mh_decode_image(&b, 8, 2, opts).unwrap(), doc, "{opts:?}");
            }
        }
        let b = mh_encode_image(&doc, MhOptions { eol: EolMode::Required, byte_align: false });
        assert!(b.to_bit_string().starts_with("000000000001"));
    }

    #[test]
    fn eol_mode_mismatch_is_detected() {
        let doc = CompressedDoc::new(8, 1, vec![row(&[4, 4])]).unwrap();
        let with = mh_encode_image(&doc, MhOptions { eol: EolMode::Required, byte_align: false });
        let without = mh_encode_image(&doc, MhOptions { eol: EolMode::Forbidden, byte_align: false });
        let forbid = MhOptions { eol: EolMode::Forbidden, byte_align: false };
        let require = MhOptions { eol: EolMode::Required, byte_align: false };
        let e = mh_decode_image(&with, 8, 1, forbid).unwrap_err().to_string();
        assert!(e.contains("EOL"), "{e}");
        let e = mh_decode_image(&without, 8, 1, require).unwrap_err().to_string();
        assert!(e.contains("EOL"), "{e}");
    }

    #[test]
    fn empty_stream_is_premature_end() {
        for eol in [EolMode::Required, EolMode::Forbidden] {
            let e = mh_decode_image(&MhBits::new(), 4, 1, MhOptions { eol, byte_align: false })
                .unwrap_err()
                .to_string();
            assert!(e.contains("premature end"), "{e}");
        }
    }

    #[test]
    fn trailing_rtc_and_fill_accepted_garbage_rejected() {
        let doc = CompressedDoc::new(8, 1, vec![row(&[8])]).unwrap();
        let opts = MhOptions { eol: EolMode::Required, byte_align: false };
        let mut b = mh_encode_image(&doc, opts);
        for _ in 0..6 {
            b.push_code(EOL);
        }
        b.pad_zeros(5);
        assert_eq!(mh_decode_image(&b, 8, 1, opts).unwrap(), doc);
        b.push_bits(0b101, 3);
        assert!(mh_decode_image(&b, 8, 1, opts).is_err());
    }

    #[test]
    fn single_white_row_wider_than_makeup_range() {
        let doc = CompressedDoc::new(3000, 1, vec![row(&[3000])]).unwrap();
        let opts = MhOptions::default();
        let b = mh_encode_image(&doc, opts);
        assert_eq!(mh_decode_image(&b, 3000, 1, opts).unwrap(), doc);
    }

    #[test]
    fn zero_length_interior_runs_decode_canonical() {
        // white 2, black 0, white 2: pixels are four whites
        let s = format!("{}{}{}", "0111", "0000110111", "0111");
        assert_eq!(mh_decode_row(&bits(&s), 4).unwrap(), row(&[4]));
    }
}
