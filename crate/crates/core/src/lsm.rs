//! The batched LSM dictionary: fixed-size update batches cascaded through
//! exponentially sized sorted levels, tombstone deletion, stale-tolerant
//! queries, and a cleanup operation that compacts the structure.

use crate::bulk::{merge_by_original_key, sort_records};
use crate::error::{LsmError, Result};
use crate::query;
use crate::record::{Record, MAX_ORIGINAL_KEY};

/// Index of the least significant zero bit of `r`: the level where a new
/// batch settles, and the number of merges a new insertion performs.
pub fn ffz(r: usize) -> u32 {
    r.trailing_ones()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LsmConfig {
    batch_size: usize,
}

impl LsmConfig {
    /// Batch size must be a power of two >= 2.
    pub fn new(batch_size: usize) -> Result<Self> {
        if batch_size < 2 || !batch_size.is_power_of_two() {
            return Err(LsmError::InvalidConfig(batch_size));
        }
        Ok(LsmConfig { batch_size })
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }
}

/// One entry of an update batch. Deletes carry no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateEntry {
    Insert { key: u32, value: u32 },
    Delete { key: u32 },
}

impl UpdateEntry {
    pub fn key(&self) -> u32 {
        match *self {
            UpdateEntry::Insert { key, .. } | UpdateEntry::Delete { key } => key,
        }
    }
}

/// `NotFound` covers both "never inserted" and "deleted".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LookupResult {
    Found(u32),
    NotFound,
}

/// Cumulative work totals: the desk-scale stand-in for throughput numbers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkCounters {
    /// Records passed through a full sort.
    pub sorted_records: u64,
    /// Records touched by merges (both inputs of every merge).
    pub merged_records: u64,
    /// Records examined by cleanup's mark-and-compact pass.
    pub compacted_records: u64,
}

/// Grow-on-demand level storage. Level `i` holds exactly `b * 2^i` records
/// or is empty; occupancy mirrors the binary representation of `r`.
#[derive(Debug, Clone)]
pub struct Lsm {
    config: LsmConfig,
    r: usize,
    levels: Vec<Vec<Record>>,
    counters: WorkCounters,
}

/// Encode update entries into records: inserts become regular records,
/// deletes become tombstones with value 0.
fn encode_entries(entries: &[UpdateEntry]) -> Result<Vec<Record>> {
    entries
        .iter()
        .map(|e| {
            if e.key() > MAX_ORIGINAL_KEY {
                return Err(LsmError::KeyOutOfDomain(e.key()));
            }
            Ok(match *e {
                UpdateEntry::Insert { key, value } => Record::regular(key, value),
                UpdateEntry::Delete { key } => Record::tombstone(key),
            })
        })
        .collect()
}

/// Pad a partial batch to the full batch size by duplicating its last entry.
/// Only one of the duplicates stays visible to queries.
pub fn pad_partial_batch(entries: &[UpdateEntry], batch_size: usize) -> Result<Vec<UpdateEntry>> {
    if entries.is_empty() {
        return Err(LsmError::EmptyBatch);
    }
    if entries.len() > batch_size {
        return Err(LsmError::BatchSizeMismatch {
            expected: batch_size,
            actual: entries.len(),
        });
    }
    let mut out = entries.to_vec();
    out.resize(batch_size, *entries.last().unwrap());
    Ok(out)
}

impl Lsm {
    pub fn new(config: LsmConfig) -> Self {
        Lsm {
            config,
            r: 0,
            levels: Vec::new(),
            counters: WorkCounters::default(),
        }
    }

    pub fn with_batch_size(batch_size: usize) -> Result<Self> {
        Ok(Lsm::new(LsmConfig::new(batch_size)?))
    }

    pub fn config(&self) -> LsmConfig {
        self.config
    }

    pub fn batch_size(&self) -> usize {
        self.config.batch_size
    }

    /// Number of resident batches; level occupancy equals its set bits.
    pub fn resident_batches(&self) -> usize {
        self.r
    }

    /// Total resident records, stale ones included.
    pub fn len(&self) -> usize {
        self.r * self.config.batch_size
    }

    pub fn is_empty(&self) -> bool {
        self.r == 0
    }

    pub fn stats(&self) -> WorkCounters {
        self.counters
    }

    /// Read access to level storage; `levels()[i]` is empty or holds
    /// exactly `b * 2^i` records sorted by original key.
    pub fn levels(&self) -> &[Vec<Record>] {
        &self.levels
    }

    pub fn full_level_count(&self) -> u32 {
        self.r.count_ones()
    }

    fn full_levels(&self) -> Vec<&[Record]> {
        self.levels
            .iter()
            .filter(|l| !l.is_empty())
            .map(|l| l.as_slice())
            .collect()
    }

    /// Insert a mixed batch of exactly `b` entries: encode, sort by the full
    /// packed key, then cascade merges through full levels until the buffer
    /// lands in the first empty one.
    pub fn update_batch(&mut self, batch: &[UpdateEntry]) -> Result<()> {
        let b = self.config.batch_size;
        if batch.len() != b {
            return Err(LsmError::BatchSizeMismatch {
                expected: b,
                actual: batch.len(),
            });
        }
        let mut buffer = sort_records(&encode_entries(batch)?);
        self.counters.sorted_records += b as u64;

        let mut i = 0usize;
        while i < self.levels.len() && !self.levels[i].is_empty() {
            let older = std::mem::take(&mut self.levels[i]);
            self.counters.merged_records += (buffer.len() + older.len()) as u64;
            buffer = merge_by_original_key(&buffer, &older);
            i += 1;
        }
        if i >= self.levels.len() {
            self.levels.resize(i + 1, Vec::new());
        }
        self.levels[i] = buffer;
        self.r += 1;
        Ok(())
    }

    /// Deletion is insertion of a batch of tombstones.
    pub fn delete_batch(&mut self, keys: &[u32]) -> Result<()> {
        let batch: Vec<UpdateEntry> =
            keys.iter().map(|&key| UpdateEntry::Delete { key }).collect();
        self.update_batch(&batch)
    }

    /// Build from `k * b` insert entries in one global sort plus slicing,
    /// equivalent in query behavior to `k` sequential `update_batch` calls
    /// over consecutive `b`-sized slices.
    pub fn bulk_build(entries: &[UpdateEntry], config: LsmConfig) -> Result<Self> {
        let b = config.batch_size;
        if entries.len() % b != 0 {
            return Err(LsmError::SizeNotMultipleOfBatch {
                len: entries.len(),
                batch_size: b,
            });
        }
        if entries
            .iter()
            .any(|e| matches!(e, UpdateEntry::Delete { .. }))
        {
            return Err(LsmError::BulkBuildRequiresInserts);
        }
        let mut lsm = Lsm::new(config);
        if entries.is_empty() {
            return Ok(lsm);
        }
        // Tag with the logical batch index so that equal keys sort into
        // most-recent-first runs: the winning occurrence (latest batch,
        // earliest position within it) leads its run, which is what the
        // sequential insertion path would leave visible.
        let mut tagged: Vec<(Record, usize)> = encode_entries(entries)?
            .into_iter()
            .enumerate()
            .map(|(pos, rec)| (rec, pos / b))
            .collect();
        tagged.sort_by_key(|&(rec, batch)| (rec.original_key(), std::cmp::Reverse(batch)));
        lsm.counters.sorted_records += entries.len() as u64;

        let sorted: Vec<Record> = tagged.into_iter().map(|(rec, _)| rec).collect();
        lsm.r = entries.len() / b;
        lsm.redistribute(sorted);
        Ok(lsm)
    }

    /// Slice an ascending sorted run into the full levels implied by the
    /// set bits of `r`, smallest level taking the smallest keys.
    fn redistribute(&mut self, sorted: Vec<Record>) {
        debug_assert_eq!(sorted.len(), self.r * self.config.batch_size);
        self.levels.clear();
        let mut pos = 0usize;
        let mut bit = 0usize;
        let mut remaining = self.r;
        while remaining > 0 {
            let size = self.config.batch_size << bit;
            if remaining & 1 == 1 {
                self.levels.push(sorted[pos..pos + size].to_vec());
                pos += size;
            } else {
                self.levels.push(Vec::new());
            }
            remaining >>= 1;
            bit += 1;
        }
        debug_assert_eq!(pos, sorted.len());
    }

    pub fn lookup_one(&self, k: u32) -> LookupResult {
        query::lookup_one(&self.full_levels(), k)
    }

    /// Scan full levels from the most recent upward; the first record at the
    /// lower bound with a matching key decides the answer.
    pub fn lookup(&self, keys: &[u32]) -> Vec<LookupResult> {
        let levels = self.full_levels();
        keys.iter().map(|&k| query::lookup_one(&levels, k)).collect()
    }

    /// Lookup plus the number of binary-search probes it performed.
    pub fn lookup_one_counted(&self, k: u32) -> (LookupResult, u32) {
        query::lookup_one_counted(&self.full_levels(), k)
    }

    /// Total stage-1 candidates for one interval, before validation.
    pub fn candidate_count(&self, k1: u32, k2: u32) -> usize {
        query::candidate_count(&self.full_levels(), k1, k2)
    }

    /// Per query, the number of distinct keys in `[k1, k2]` whose most
    /// recent resident record is regular.
    pub fn count(&self, queries: &[(u32, u32)]) -> Result<Vec<usize>> {
        query::count(&self.full_levels(), queries)
    }

    /// Per-query start offsets into a flat list of valid `(key, value)`
    /// pairs, each query's pairs sorted by key.
    pub fn range(&self, queries: &[(u32, u32)]) -> Result<(Vec<usize>, Vec<(u32, u32)>)> {
        query::range(&self.full_levels(), queries)
    }

    /// Merge all full levels, drop tombstones, deleted and replaced records,
    /// pad with placebos to a multiple of `b`, and redistribute. Query
    /// results are unchanged; if nothing valid survives the structure
    /// resets to empty.
    pub fn cleanup(&mut self) {
        let full: Vec<Vec<Record>> = self
            .levels
            .iter_mut()
            .filter(|l| !l.is_empty())
            .map(std::mem::take)
            .collect();
        if full.is_empty() {
            self.levels.clear();
            self.r = 0;
            return;
        }
        // Smallest level first: it is the most recent, so it stays the
        // "newer" side of every merge.
        let mut merged: Option<Vec<Record>> = None;
        for level in full {
            merged = Some(match merged {
                None => level,
                Some(newer) => {
                    self.counters.merged_records += (newer.len() + level.len()) as u64;
                    merge_by_original_key(&newer, &level)
                }
            });
        }
        let merged = merged.unwrap();
        self.counters.compacted_records += merged.len() as u64;

        // A record is stale iff an earlier record shares its key or it is a
        // tombstone; placebos are tombstones and drop out here too.
        let mut valid = Vec::with_capacity(merged.len());
        let mut prev = None;
        for rec in &merged {
            let k = rec.original_key();
            if prev != Some(k) {
                valid.push(*rec);
                prev = Some(k);
            }
        }
        valid.retain(|r| r.key.is_regular());

        if valid.is_empty() {
            self.levels.clear();
            self.r = 0;
            return;
        }
        let b = self.config.batch_size;
        let total = valid.len().div_ceil(b) * b;
        valid.resize(total, Record::placebo());
        self.r = total / b;
        self.redistribute(valid);
    }

    /// Check the structural invariants: occupancy mirrors the bits of `r`,
    /// level sizes are exact, and every full level is sorted by original key.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let b = self.config.batch_size;
        for (i, level) in self.levels.iter().enumerate() {
            let full = self.r & (1 << i) != 0;
            if full != !level.is_empty() {
                return Err(format!(
                    "level {i} occupancy disagrees with r={} (bit set: {full}, records: {})",
                    self.r,
                    level.len()
                ));
            }
            if full && level.len() != b << i {
                return Err(format!(
                    "level {i} holds {} records, expected {}",
                    level.len(),
                    b << i
                ));
            }
            if level.windows(2).any(|w| w[0].original_key() > w[1].original_key()) {
                return Err(format!("level {i} is not sorted by original key"));
            }
        }
        if self.r >> self.levels.len() != 0 {
            return Err(format!(
                "r={} implies more levels than the {} allocated",
                self.r,
                self.levels.len()
            ));
        }
        Ok(())
    }

    /// Reassemble from parsed parts, validating invariants. Used by the dump
    /// parser; counters start at zero.
    pub(crate) fn from_parts(
        config: LsmConfig,
        r: usize,
        levels: Vec<Vec<Record>>,
    ) -> std::result::Result<Self, String> {
        let lsm = Lsm {
            config,
            r,
            levels,
            counters: WorkCounters::default(),
        };
        lsm.check_invariants()?;
        Ok(lsm)
    }
}
