//! Bulk query pipeline shared by the LSM and the sorted-array baseline.
//!
//! Callers pass their full levels ordered most-recent-first (smallest level
//! index first); the sorted array passes its single level. Count and range
//! run the five-stage pipeline: per-level bounds, exclusive scan, gather,
//! segmented sort, and validation of the first record of each equal-key run.

use crate::bulk::{
    exclusive_scan, lower_bound, lower_bound_counted, segmented_compact, segmented_sort_records,
    upper_bound, SegmentLayout,
};
use crate::error::{LsmError, Result};
use crate::lsm::LookupResult;
use crate::record::Record;

pub(crate) fn validate_ranges(queries: &[(u32, u32)]) -> Result<()> {
    for &(k1, k2) in queries {
        if k1 > k2 {
            return Err(LsmError::InvalidRange { k1, k2 });
        }
    }
    Ok(())
}

pub(crate) fn lookup_one(levels: &[&[Record]], k: u32) -> LookupResult {
    lookup_one_counted(levels, k).0
}

/// Lookup that also reports the total binary-search probe count, used to
/// check the per-query work bound.
pub(crate) fn lookup_one_counted(levels: &[&[Record]], k: u32) -> (LookupResult, u32) {
    let mut probes = 0;
    for level in levels {
        let (idx, p) = lower_bound_counted(level, k);
        probes += p;
        if idx < level.len() && level[idx].original_key() == k {
            let rec = level[idx];
            let result = if rec.key.is_regular() {
                LookupResult::Found(rec.value)
            } else {
                LookupResult::NotFound
            };
            return (result, probes);
        }
    }
    (LookupResult::NotFound, probes)
}

/// Total candidate records across all levels for one interval (stage 1 of
/// the count/range pipeline, summed).
pub(crate) fn candidate_count(levels: &[&[Record]], k1: u32, k2: u32) -> usize {
    levels
        .iter()
        .map(|level| upper_bound(level, k2) - lower_bound(level, k1))
        .sum()
}

struct Gathered {
    buffer: Vec<Record>,
    layout: SegmentLayout,
}

/// Stages 1-4: per-(query, level) bounds, exclusive scan for offsets, gather
/// with level 0 first (preserving recency), segmented sort per query.
fn gather_and_sort(levels: &[&[Record]], queries: &[(u32, u32)]) -> Gathered {
    let nl = levels.len();
    let mut bounds = Vec::with_capacity(queries.len() * nl);
    let mut counts = Vec::with_capacity(queries.len() * nl);
    for &(k1, k2) in queries {
        for level in levels {
            let l = lower_bound(level, k1);
            let u = upper_bound(level, k2);
            bounds.push((l, u));
            counts.push(u - l);
        }
    }
    let offsets = exclusive_scan(&counts);
    let total: usize = counts.iter().sum();

    let mut buffer = vec![Record::placebo(); total];
    for q in 0..queries.len() {
        for (i, level) in levels.iter().enumerate() {
            let idx = q * nl + i;
            let (l, u) = bounds[idx];
            buffer[offsets[idx]..offsets[idx] + (u - l)].copy_from_slice(&level[l..u]);
        }
    }

    let per_query: Vec<usize> = (0..queries.len())
        .map(|q| counts[q * nl..(q + 1) * nl].iter().sum())
        .collect();
    let layout = SegmentLayout::from_counts(&per_query);
    let buffer = segmented_sort_records(&buffer, &layout);
    Gathered { buffer, layout }
}

pub(crate) fn count(levels: &[&[Record]], queries: &[(u32, u32)]) -> Result<Vec<usize>> {
    validate_ranges(queries)?;
    let g = gather_and_sort(levels, queries);
    // Stage 5: the first record of each equal-key run speaks for the key.
    let mut out = Vec::with_capacity(queries.len());
    for seg in g.layout.segments() {
        let mut c = 0usize;
        let mut prev = None;
        for i in seg {
            let rec = g.buffer[i];
            let k = rec.original_key();
            if prev != Some(k) {
                if rec.key.is_regular() {
                    c += 1;
                }
                prev = Some(k);
            }
        }
        out.push(c);
    }
    Ok(out)
}

pub(crate) fn range(
    levels: &[&[Record]],
    queries: &[(u32, u32)],
) -> Result<(Vec<usize>, Vec<(u32, u32)>)> {
    validate_ranges(queries)?;
    let g = gather_and_sort(levels, queries);
    // Stage 5: mark the first record of each run valid iff regular, compact.
    let mut valid = vec![false; g.buffer.len()];
    for seg in g.layout.segments() {
        let mut prev = None;
        for i in seg {
            let rec = g.buffer[i];
            let k = rec.original_key();
            if prev != Some(k) {
                valid[i] = rec.key.is_regular();
                prev = Some(k);
            }
        }
    }
    let (compacted, seg_counts) = segmented_compact(&g.buffer, &valid, &g.layout);
    let offsets = exclusive_scan(&seg_counts);
    let pairs = compacted
        .into_iter()
        .map(|r| (r.original_key(), r.value))
        .collect();
    Ok((offsets, pairs))
}
