//! Space-efficient α-approximate minimum vertex cover over dynamic graph
//! streams, with the linear sketches it is built from and exact oracles for
//! checking it.

pub mod codec;
pub mod error;
pub mod harness;
pub mod hashing;
pub mod mos;
pub mod ne_sampler;
pub mod oracle;
pub mod sketch;
pub mod small_opt;
pub mod solve;
pub mod stream;
pub mod tester;
pub mod util;
pub mod vc;

pub use error::{Error, Result};
