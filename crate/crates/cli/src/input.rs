//! Reading documents from disk in any supported format.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use rlseg::io::{mh_decode_image, read_rle, read_rle_header, EolMode, MhOptions, RLE_MAGIC};
use rlseg::{encode_image, BlockSpec, CompressedDoc};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Rlc,
    Pbm,
    Mh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EolArg {
    Required,
    Forbidden,
}

impl From<EolArg> for EolMode {
    fn from(e: EolArg) -> Self {
        match e {
            EolArg::Required => EolMode::Required,
            EolArg::Forbidden => EolMode::Forbidden,
        }
    }
}

/// Raw T.4 streams carry no header, so their framing is given on the command line.
#[derive(Debug, Clone, Default, Args)]
pub struct MhArgs {
    /// Width of a raw MH input, in pixels
    #[arg(long)]
    pub width: Option<usize>,
    /// Height of a raw MH input, in rows
    #[arg(long)]
    pub height: Option<usize>,
    /// Whether a raw MH input has an EOL code before each row
    #[arg(long, value_enum)]
    pub eol: Option<EolArg>,
    /// Raw MH rows are padded to start on a byte boundary
    #[arg(long)]
    pub byte_align: bool,
}

impl MhArgs {
    fn given(&self) -> bool {
        self.width.is_some() || self.height.is_some() || self.eol.is_some() || self.byte_align
    }

    /// `(width, height, options)` when the input is declared to be MH.
    fn framing(&self) -> anyhow::Result<Option<(usize, usize, MhOptions)>> {
        if !self.given() {
            return Ok(None);
        }
        match (self.width, self.height, self.eol) {
            (Some(w), Some(h), Some(eol)) => Ok(Some((
                w,
                h,
                MhOptions {
                    eol: eol.into(),
                    byte_align: self.byte_align,
                },
            ))),
            _ => Err(Usage("raw MH input needs --width, --height and --eol".into()).into()),
        }
    }
}

/// A command-line usage problem (exit code 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Debug, Clone, Serialize)]
pub struct InputDescriptor {
    pub role: &'static str,
    pub path: PathBuf,
    pub format: Format,
    pub width: usize,
    pub height: usize,
    pub runs: usize,
}

pub struct Loaded {
    pub doc: CompressedDoc,
    pub format: Format,
}

impl Loaded {
    pub fn describe(&self, role: &'static str, path: &Path) -> InputDescriptor {
        InputDescriptor {
            role,
            path: path.to_path_buf(),
            format: self.format,
            width: self.doc.width(),
            height: self.doc.height(),
            runs: self.doc.run_count(),
        }
    }
}

pub fn read_bytes(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn sniff(bytes: &[u8]) -> Option<Format> {
    if bytes.starts_with(RLE_MAGIC.as_bytes()) {
        Some(Format::Rlc)
    } else if bytes.starts_with(b"P1") || bytes.starts_with(b"P4") {
        Some(Format::Pbm)
    } else {
        None
    }
}

/// Loads `path`, checking `spec` (when given) against the image size before
/// any row data is decoded.
pub fn load(path: &Path, mh: &MhArgs, spec: Option<&BlockSpec>) -> anyhow::Result<Loaded> {
    let bytes = read_bytes(path)?;
    let ctx = || format!("{}", path.display());
    if let Some((width, height, options)) = mh.framing()? {
        if let Some(spec) = spec {
            spec.validate(width, height)?;
        }
        let bits = rlseg::io::MhBits::from_bytes(bytes);
        let doc = mh_decode_image(&bits, width, height, options).with_context(ctx)?;
        return Ok(Loaded { doc, format: Format::Mh });
    }
    match sniff(&bytes) {
        Some(Format::Rlc) => {
            let header = read_rle_header(&bytes).with_context(ctx)?;
            if let Some(spec) = spec {
                spec.validate(header.width, header.height)?;
            }
            let doc = read_rle(&bytes).with_context(ctx)?;
            Ok(Loaded { doc, format: Format::Rlc })
        }
        Some(Format::Pbm) => {
            let grid = rlseg::io::read_pbm(&bytes).with_context(ctx)?;
            if let Some(spec) = spec {
                spec.validate(grid.width(), grid.height())?;
            }
            Ok(Loaded {
                doc: encode_image(&grid),
                format: Format::Pbm,
            })
        }
        _ => bail!(rlseg::Error::Parse {
            format: "input",
            at: "byte 0".into(),
            message: format!(
                "{} is neither RLC1 nor PBM; raw MH streams need --width, --height and --eol",
                path.display()
            ),
        }),
    }
}
