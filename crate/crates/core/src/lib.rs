//! Completely regular codes and equitable partitions in Hamming graphs.

pub mod canon;
pub mod classify;
pub mod constructions;
pub mod error;
pub mod gf;
pub mod hamming;
pub mod io;
pub mod partitions;
pub mod search;
pub mod symmetry;

pub use error::{Error, Result};
pub use hamming::{CodeSet, Face, Space, Word};
pub use partitions::{IntersectionArray, QuotientMatrix, VertexPartition};
