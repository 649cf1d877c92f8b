//! Zero-error block codecs built from canonical Huffman tables.

pub mod block;
pub mod bsi;
pub mod huffman;

pub use block::{
    build_codebook, decode_ak, decode_multicast_block, decode_variable, encode_ak,
    encode_multicast_block, helper_positions, residual_stream, BlockKind, Codebook, EncodedBlock,
    Stream, COMMON_STREAM, HEADER_BITS,
};
pub use bsi::{decode_bsi, encode_bsi_messages, BsiCodebook};
pub use huffman::{Bits, CodeTable};
