//! Brute-force reference dictionary used as ground truth in differential
//! tests. It replays batch semantics directly on a key -> (value, alive)
//! map; no sorting, no levels, no tombstone encoding.

use std::collections::BTreeMap;

use crate::error::{LsmError, Result};
use crate::lsm::{LookupResult, UpdateEntry};

#[derive(Debug, Clone, Default)]
pub struct Oracle {
    entries: BTreeMap<u32, (u32, bool)>,
    batch_log: Vec<Vec<UpdateEntry>>,
}

impl Oracle {
    pub fn new() -> Self {
        Oracle::default()
    }

    /// Apply one batch atomically. Within the batch, a key with any delete
    /// becomes dead; otherwise the first insert occurrence wins.
    pub fn apply_batch(&mut self, batch: &[UpdateEntry]) {
        self.batch_log.push(batch.to_vec());
        let mut outcome: BTreeMap<u32, (u32, bool)> = BTreeMap::new();
        for entry in batch {
            match *entry {
                UpdateEntry::Delete { key } => {
                    outcome.insert(key, (0, false));
                }
                UpdateEntry::Insert { key, value } => {
                    // A delete already seen for this key keeps the key dead;
                    // an earlier insert keeps its value.
                    outcome.entry(key).or_insert((value, true));
                }
            }
        }
        for (key, state) in outcome {
            self.entries.insert(key, state);
        }
    }

    pub fn lookup(&self, k: u32) -> LookupResult {
        match self.entries.get(&k) {
            Some(&(value, true)) => LookupResult::Found(value),
            _ => LookupResult::NotFound,
        }
    }

    pub fn count(&self, k1: u32, k2: u32) -> Result<usize> {
        if k1 > k2 {
            return Err(LsmError::InvalidRange { k1, k2 });
        }
        Ok(self
            .entries
            .range(k1..=k2)
            .filter(|(_, &(_, alive))| alive)
            .count())
    }

    pub fn range(&self, k1: u32, k2: u32) -> Result<Vec<(u32, u32)>> {
        if k1 > k2 {
            return Err(LsmError::InvalidRange { k1, k2 });
        }
        Ok(self
            .entries
            .range(k1..=k2)
            .filter(|(_, &(_, alive))| alive)
            .map(|(&k, &(v, _))| (k, v))
            .collect())
    }

    /// Alive keys, for workload generators that need the surviving set.
    pub fn alive_pairs(&self) -> Vec<(u32, u32)> {
        self.entries
            .iter()
            .filter(|(_, &(_, alive))| alive)
            .map(|(&k, &(v, _))| (k, v))
            .collect()
    }

    /// Rebuild from the batch log; the result must equal the incremental
    /// state.
    pub fn replay(&self) -> Oracle {
        let mut fresh = Oracle::new();
        for batch in &self.batch_log {
            fresh.apply_batch(batch);
        }
        fresh
    }

    pub fn entries(&self) -> &BTreeMap<u32, (u32, bool)> {
        &self.entries
    }
}
