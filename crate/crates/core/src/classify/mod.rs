//! Classification engines: local reconstruction and the special-purpose drivers.

pub mod design;
pub mod local;
pub mod rows;
pub mod uniqueness;

pub use design::{design_argument_h84, DesignMode, DesignReport};
pub use local::{classify, extend, seed_pair, ClassifyOptions, ClassifyOutcome, ClassifyReport, LocalPair, Params, Side, StageReport};
pub use rows::{row_partitions_h54, RowReport};
pub use uniqueness::{steiner_triple_systems_13, unique_1369, UniquenessReport};
