//! External formats: Netpbm PBM rasters, the RLC1 run-length text format and
//! raw ITU-T T.4 one-dimensional Modified Huffman fax streams.

pub mod mh;
pub mod pbm;
pub mod rlc;

pub use mh::{
    mh_decode_image, mh_decode_row, mh_decode_run, mh_encode_image, mh_encode_row, mh_encode_run, EolMode, MhBits, MhOptions,
};
pub use pbm::{read_pbm, write_pbm, PbmFormat};
pub use rlc::{read_rle, read_rle_header, write_rle, RleHeader, RLE_MAGIC};
