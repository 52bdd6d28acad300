//! Linear sketches over an indexed integer vector: one-sparse cells, L0
//! samplers and peeling sparse recovery. Sketches built from the same seed
//! merge by cell-wise addition.

mod cell;
mod l0;
mod sparse;

pub use cell::{CellDecode, Fingerprint, OneSparseCell};
pub use l0::{L0Decode, L0Hasher, L0Shape, L0Sketch, DEFAULT_L0_BUCKETS, DEFAULT_L0_ROWS};
pub use sparse::{SparseDecode, SparseRecoverySketch, SR_ROWS};
