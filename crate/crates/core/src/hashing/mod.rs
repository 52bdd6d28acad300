//! Polynomial k-wise independent hashing over the Mersenne field and the
//! random vertex partition built from it.

pub mod field;
mod kwise;
mod partition;

pub use kwise::{sample_kwise, KWiseHash};
pub use partition::{random_partition, Partition, PartitionMode, PARTITION_MAX_ATTEMPTS};
