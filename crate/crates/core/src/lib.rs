//! A batch-update dictionary built as a log-structured merge tree of
//! exponentially sized sorted levels.
//!
//! Updates arrive in fixed-size batches of `b` entries (inserts and
//! tombstone deletes mixed freely). A new batch is sorted and cascaded
//! through the levels by merging, so level `i` holds exactly `b * 2^i`
//! records or nothing, and level occupancy mirrors the binary
//! representation of the resident batch count `r`. Queries (lookup, count,
//! range) tolerate the stale records this leaves behind; [`Lsm::cleanup`]
//! removes them and compacts the structure.
//!
//! The crate also ships:
//! - [`SortedArray`]: a single-level baseline maintained by whole-array
//!   merge, semantically interchangeable with the LSM;
//! - [`Oracle`]: a brute-force reference used as ground truth in
//!   differential tests;
//! - [`bench`]: the workload generators and experiment runners behind the
//!   `lsm-bench` binary;
//! - [`dump`]: a line-oriented text format with a validating parser.
//!
//! See the `examples/` directory for one runnable example per capability.
//!
//! ```
//! use lsm_batch::{Lsm, LookupResult, UpdateEntry};
//!
//! let mut lsm = Lsm::with_batch_size(4).unwrap();
//! lsm.update_batch(&[
//!     UpdateEntry::Insert { key: 3, value: 30 },
//!     UpdateEntry::Insert { key: 7, value: 70 },
//!     UpdateEntry::Delete { key: 9 },
//!     UpdateEntry::Insert { key: 12, value: 120 },
//! ]).unwrap();
//! assert_eq!(lsm.lookup_one(7), LookupResult::Found(70));
//! assert_eq!(lsm.lookup_one(9), LookupResult::NotFound);
//! assert_eq!(lsm.count(&[(0, 15)]).unwrap(), vec![3]);
//! ```

pub mod bench;
pub mod bulk;
pub mod dump;
mod error;
mod lsm;
mod oracle;
mod query;
mod record;
mod sorted_array;

pub use error::{LsmError, Result};
pub use lsm::{ffz, pad_partial_batch, LookupResult, Lsm, LsmConfig, UpdateEntry, WorkCounters};
pub use oracle::Oracle;
pub use record::{KeyVariable, Record, MAX_ORIGINAL_KEY, PLACEBO_KEY};
pub use sorted_array::SortedArray;
