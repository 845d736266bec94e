//! Sorted-array baseline: a single sorted level maintained by whole-array
//! merge. Shares the record encoding and query semantics with the LSM so
//! the two are interchangeable in differential tests.

use crate::bulk::{merge_by_original_key, sort_records};
use crate::error::{LsmError, Result};
use crate::lsm::{LookupResult, LsmConfig, UpdateEntry};
use crate::query;
use crate::record::{Record, MAX_ORIGINAL_KEY};
use crate::WorkCounters;

#[derive(Debug, Clone)]
pub struct SortedArray {
    config: LsmConfig,
    r: usize,
    records: Vec<Record>,
    counters: WorkCounters,
}

impl SortedArray {
    pub fn new(config: LsmConfig) -> Self {
        SortedArray {
            config,
            r: 0,
            records: Vec::new(),
            counters: WorkCounters::default(),
        }
    }

    pub fn with_batch_size(batch_size: usize) -> Result<Self> {
        Ok(SortedArray::new(LsmConfig::new(batch_size)?))
    }

    pub fn config(&self) -> LsmConfig {
        self.config
    }

    pub fn batch_size(&self) -> usize {
        self.config.batch_size()
    }

    pub fn resident_batches(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn stats(&self) -> WorkCounters {
        self.counters
    }

    /// Sort the batch and merge it with the whole array, batch as the newer
    /// side. The first batch just becomes the array; every later batch
    /// merges `old_len + b` records.
    pub fn update_batch(&mut self, batch: &[UpdateEntry]) -> Result<()> {
        let b = self.config.batch_size();
        if batch.len() != b {
            return Err(LsmError::BatchSizeMismatch {
                expected: b,
                actual: batch.len(),
            });
        }
        let encoded: Result<Vec<Record>> = batch
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
            .collect();
        let sorted = sort_records(&encoded?);
        self.counters.sorted_records += b as u64;
        if self.records.is_empty() {
            self.records = sorted;
        } else {
            self.counters.merged_records += (self.records.len() + b) as u64;
            self.records = merge_by_original_key(&sorted, &self.records);
        }
        self.r += 1;
        Ok(())
    }

    pub fn delete_batch(&mut self, keys: &[u32]) -> Result<()> {
        let batch: Vec<UpdateEntry> =
            keys.iter().map(|&key| UpdateEntry::Delete { key }).collect();
        self.update_batch(&batch)
    }

    fn as_levels(&self) -> Vec<&[Record]> {
        if self.records.is_empty() {
            Vec::new()
        } else {
            vec![self.records.as_slice()]
        }
    }

    pub fn lookup_one(&self, k: u32) -> LookupResult {
        query::lookup_one(&self.as_levels(), k)
    }

    pub fn lookup(&self, keys: &[u32]) -> Vec<LookupResult> {
        let levels = self.as_levels();
        keys.iter().map(|&k| query::lookup_one(&levels, k)).collect()
    }

    pub fn candidate_count(&self, k1: u32, k2: u32) -> usize {
        query::candidate_count(&self.as_levels(), k1, k2)
    }

    pub fn count(&self, queries: &[(u32, u32)]) -> Result<Vec<usize>> {
        query::count(&self.as_levels(), queries)
    }

    pub fn range(&self, queries: &[(u32, u32)]) -> Result<(Vec<usize>, Vec<(u32, u32)>)> {
        query::range(&self.as_levels(), queries)
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.records.len() != self.r * self.config.batch_size() {
            return Err(format!(
                "array holds {} records, expected r*b = {}",
                self.records.len(),
                self.r * self.config.batch_size()
            ));
        }
        if self
            .records
            .windows(2)
            .any(|w| w[0].original_key() > w[1].original_key())
        {
            return Err("array is not sorted by original key".into());
        }
        Ok(())
    }

    pub(crate) fn from_parts(
        config: LsmConfig,
        r: usize,
        records: Vec<Record>,
    ) -> std::result::Result<Self, String> {
        let sa = SortedArray {
            config,
            r,
            records,
            counters: WorkCounters::default(),
        };
        sa.check_invariants()?;
        Ok(sa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsm::Lsm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ins(key: u32, value: u32) -> UpdateEntry {
        UpdateEntry::Insert { key, value }
    }

    #[test]
    fn first_batch_becomes_the_array() {
        let mut sa = SortedArray::with_batch_size(4).unwrap();
        sa.update_batch(&[ins(9, 1), ins(2, 2), ins(5, 3), ins(7, 4)])
            .unwrap();
        let keys: Vec<u32> = sa.records().iter().map(|r| r.original_key()).collect();
        assert_eq!(keys, vec![2, 5, 7, 9]);
        assert_eq!(sa.stats().merged_records, 0);
        sa.check_invariants().unwrap();
    }

    #[test]
    fn length_and_merge_work_closed_form() {
        let b = 8usize;
        let r = 23usize;
        let mut sa = SortedArray::with_batch_size(b).unwrap();
        for j in 0..r {
            let batch: Vec<UpdateEntry> =
                (0..b as u32).map(|i| ins((j * b) as u32 + i, i)).collect();
            sa.update_batch(&batch).unwrap();
        }
        assert_eq!(sa.len(), r * b);
        // Sum over j of (j*b + b) for j = 1..r-1 equals b(r-1)(r+2)/2.
        let expected = (b * (r - 1) * (r + 2) / 2) as u64;
        assert_eq!(sa.stats().merged_records, expected);
    }

    #[test]
    fn matches_lsm_on_random_mixed_workload() {
        let b = 16usize;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut sa = SortedArray::with_batch_size(b).unwrap();
        let mut lsm = Lsm::with_batch_size(b).unwrap();
        for _ in 0..25 {
            let batch: Vec<UpdateEntry> = (0..b)
                .map(|_| {
                    let key = rng.gen_range(0..64u32);
                    if rng.gen_bool(0.3) {
                        UpdateEntry::Delete { key }
                    } else {
                        ins(key, rng.gen())
                    }
                })
                .collect();
            sa.update_batch(&batch).unwrap();
            lsm.update_batch(&batch).unwrap();

            let keys: Vec<u32> = (0..64).collect();
            assert_eq!(sa.lookup(&keys), lsm.lookup(&keys));
            let queries: Vec<(u32, u32)> = (0..32)
                .map(|_| {
                    let k1 = rng.gen_range(0..64u32);
                    (k1, k1 + rng.gen_range(0..16u32))
                })
                .collect();
            assert_eq!(sa.count(&queries).unwrap(), lsm.count(&queries).unwrap());
            assert_eq!(sa.range(&queries).unwrap(), lsm.range(&queries).unwrap());
        }
    }

    #[test]
    fn count_range_agreement() {
        let b = 8usize;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut sa = SortedArray::with_batch_size(b).unwrap();
        for _ in 0..10 {
            let batch: Vec<UpdateEntry> =
                (0..b).map(|_| ins(rng.gen_range(0..100u32), rng.gen())).collect();
            sa.update_batch(&batch).unwrap();
        }
        let queries: Vec<(u32, u32)> = (0..100)
            .map(|_| {
                let k1 = rng.gen_range(0..100u32);
                (k1, k1 + rng.gen_range(0..30u32))
            })
            .collect();
        let counts = sa.count(&queries).unwrap();
        let (offsets, pairs) = sa.range(&queries).unwrap();
        for (q, &c) in counts.iter().enumerate() {
            let end = offsets.get(q + 1).copied().unwrap_or(pairs.len());
            assert_eq!(c, end - offsets[q], "query {q}");
        }
    }

    #[test]
    fn invalid_range_rejected() {
        let sa = SortedArray::with_batch_size(4).unwrap();
        assert_eq!(
            sa.count(&[(9, 2)]).unwrap_err(),
            LsmError::InvalidRange { k1: 9, k2: 2 }
        );
        assert!(sa.range(&[(9, 2)]).is_err());
    }
}
