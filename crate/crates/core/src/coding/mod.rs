//! Component-wise compression of large-alphabet samples: transform with
//! GLICA or BloGLICA, then code each component with an adaptive arithmetic
//! coder. Also the Huffman-with-dictionary and untransformed baselines.

pub mod arith;
mod blob;
mod huffman;
mod rate;

pub use blob::{compress, decompress, BlobHeader, CompressedBlob, Mode, Transform, MAGIC, VERSION};
pub use huffman::{huffman_code_lengths, huffman_dictionary_rate, DictionaryCost};
pub use rate::{marginal_rate_no_transform, RateReport};
