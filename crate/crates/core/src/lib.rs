//! Segmentation and characterization of a rectangular block directly on
//! run-length compressed binary document images.
//!
//! Images are held as [`CompressedDoc`]s: one [`RunRow`] of alternating
//! background/foreground run lengths per raster row. [`extract_block`] cuts a
//! [`BlockSpec`] rectangle out of the runs without expanding any row to
//! pixels, and [`features::characterize`] computes density and the CEQ/SEQ
//! entropy quantifiers of the block, either on its own (absolute) or in the
//! frame of the source document (relative). The [`oracle`] module holds the
//! pixel-domain reference used to check both.
//!
//! Coordinates are 1-indexed and inclusive: `x1..=x2` are rows, `y1..=y2`
//! are columns. Pixel value `1` is foreground (black).

pub mod block;
pub mod error;
pub mod features;
pub mod io;
pub mod oracle;
pub mod rle;
pub mod synth;

pub use block::{
    build_position_table, extract_block, extract_block_with_stats, locate_boundaries, locate_end,
    locate_start, trim_row, BlockSpec, BoundaryRecord, ExtractStats, PositionTable,
};
pub use error::{Bound, Error, Result};
pub use features::{
    characterize, Characterization, Dims, FeatureContext, FeatureReport, LogBase, Mode,
};
pub use oracle::{accuracy_compressed, accuracy_pixel, oracle_crop, pixel_features, AccuracyMode, AccuracyResult};
pub use rle::{
    canonicalize_row, decode_image, decode_row, encode_image, encode_row, CompressedDoc, PixelGrid,
    RunRow,
};
