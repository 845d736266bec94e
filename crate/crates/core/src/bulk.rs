//! Deterministic bulk building blocks: stable sort, key-projected merge,
//! binary-search bounds, exclusive scan, segmented sort and compaction.
//!
//! All functions here are pure; they return fresh out-of-place results and
//! yield bit-identical output for identical input.

use std::ops::Range;

use crate::record::Record;

/// Stable sort by the full packed key variable, status bit included.
///
/// Sorting on the packed value puts a tombstone before a regular record of
/// the same original key; ties on equal packed keys keep input order.
pub fn sort_records(records: &[Record]) -> Vec<Record> {
    let mut out = records.to_vec();
    out.sort_by_key(|r| r.key.packed());
    out
}

/// Merge two runs sorted by original key, comparing on the original key only
/// (status bit excluded). On equal keys every record from `newer` precedes
/// every record from `older`; relative order within each input is kept.
pub fn merge_by_original_key(newer: &[Record], older: &[Record]) -> Vec<Record> {
    let mut out = Vec::with_capacity(newer.len() + older.len());
    let (mut i, mut j) = (0, 0);
    while i < newer.len() && j < older.len() {
        if older[j].original_key() < newer[i].original_key() {
            out.push(older[j]);
            j += 1;
        } else {
            out.push(newer[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&newer[i..]);
    out.extend_from_slice(&older[j..]);
    out
}

/// First index whose original key is >= `k`, or `level.len()` if none.
pub fn lower_bound(level: &[Record], k: u32) -> usize {
    lower_bound_counted(level, k).0
}

/// `lower_bound` that also reports how many records it probed.
pub fn lower_bound_counted(level: &[Record], k: u32) -> (usize, u32) {
    let (mut lo, mut hi) = (0usize, level.len());
    let mut probes = 0;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        probes += 1;
        if level[mid].original_key() < k {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    (lo, probes)
}

/// First index whose original key is > `k`, or `level.len()` if none.
pub fn upper_bound(level: &[Record], k: u32) -> usize {
    let (mut lo, mut hi) = (0usize, level.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if level[mid].original_key() <= k {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Exclusive prefix sum: `out[0] = 0`, `out[i] = out[i-1] + counts[i-1]`.
pub fn exclusive_scan(counts: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(counts.len());
    let mut acc = 0usize;
    for &c in counts {
        out.push(acc);
        acc += c;
    }
    out
}

/// Offsets-based partition of a contiguous record buffer into segments.
/// Segments may be empty; offsets are nondecreasing starting at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLayout {
    offsets: Vec<usize>,
    total: usize,
}

impl SegmentLayout {
    pub fn new(offsets: Vec<usize>, total: usize) -> Self {
        if let Some(&first) = offsets.first() {
            assert_eq!(first, 0, "segment offsets must start at 0");
        }
        assert!(
            offsets.windows(2).all(|w| w[0] <= w[1]),
            "segment offsets must be nondecreasing"
        );
        assert!(offsets.last().copied().unwrap_or(0) <= total);
        SegmentLayout { offsets, total }
    }

    pub fn from_counts(counts: &[usize]) -> Self {
        let offsets = exclusive_scan(counts);
        let total = counts.iter().sum();
        SegmentLayout { offsets, total }
    }

    pub fn segment_count(&self) -> usize {
        self.offsets.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn segments(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.offsets.len()).map(move |i| {
            let start = self.offsets[i];
            let end = self
                .offsets
                .get(i + 1)
                .copied()
                .unwrap_or(self.total);
            start..end
        })
    }
}

/// Sort each segment by original key only (status bits neglected), stable
/// within the segment. Segments do not mix.
pub fn segmented_sort_records(records: &[Record], layout: &SegmentLayout) -> Vec<Record> {
    assert_eq!(records.len(), layout.total());
    let mut out = records.to_vec();
    for seg in layout.segments() {
        out[seg].sort_by_key(|r| r.original_key());
    }
    out
}

/// Keep the flagged records of each segment, in order, in new contiguous
/// storage; also report each segment's surviving count.
pub fn segmented_compact(
    records: &[Record],
    valid: &[bool],
    layout: &SegmentLayout,
) -> (Vec<Record>, Vec<usize>) {
    assert_eq!(records.len(), valid.len());
    assert_eq!(records.len(), layout.total());
    let mut out = Vec::new();
    let mut counts = Vec::with_capacity(layout.segment_count());
    for seg in layout.segments() {
        let before = out.len();
        for i in seg {
            if valid[i] {
                out.push(records[i]);
            }
        }
        counts.push(out.len() - before);
    }
    (out, counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reg(k: u32, v: u32) -> Record {
        Record::regular(k, v)
    }

    fn tomb(k: u32) -> Record {
        Record::tombstone(k)
    }

    #[test]
    fn sort_puts_tombstone_before_regular_of_same_key() {
        let input = vec![reg(5, 1), tomb(5), reg(3, 2)];
        let out = sort_records(&input);
        assert_eq!(out, vec![reg(3, 2), tomb(5), reg(5, 1)]);
    }

    #[test]
    fn sort_empty() {
        assert_eq!(sort_records(&[]), Vec::<Record>::new());
    }

    #[test]
    fn sort_matches_comparison_oracle_on_random_input() {
        // Independent oracle: index-tagged comparison sort on (packed, index).
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let input: Vec<Record> = (0..1000)
            .map(|i| {
                let r = next();
                let key = (r as u32 >> 1) % 64; // force duplicates
                if r & 1 == 0 {
                    reg(key, i)
                } else {
                    tomb(key)
                }
            })
            .collect();
        let mut tagged: Vec<(u32, usize, Record)> = input
            .iter()
            .enumerate()
            .map(|(i, &r)| (r.key.packed(), i, r))
            .collect();
        tagged.sort_by_key(|&(p, i, _)| (p, i));
        let expected: Vec<Record> = tagged.into_iter().map(|(_, _, r)| r).collect();
        assert_eq!(sort_records(&input), expected);
    }

    #[test]
    fn merge_tie_rule() {
        let newer = vec![reg(3, 0), tomb(5)];
        let older = vec![tomb(3), reg(5, 0)];
        let out = merge_by_original_key(&newer, &older);
        assert_eq!(out, vec![reg(3, 0), tomb(3), tomb(5), reg(5, 0)]);
    }

    #[test]
    fn merge_identity() {
        let older = vec![reg(1, 9), reg(4, 8)];
        assert_eq!(merge_by_original_key(&[], &older), older);
        assert_eq!(merge_by_original_key(&older, &[]), older);
    }

    /// Oracle: concat tagged with (key, source), stable sort. Stability keeps
    /// within-input index order, so sorting on (key, source) is exactly the
    /// merge contract.
    fn merge_oracle(newer: &[Record], older: &[Record]) -> Vec<Record> {
        let mut tagged: Vec<(u32, u8, Record)> = newer
            .iter()
            .map(|&r| (r.original_key(), 0u8, r))
            .chain(older.iter().map(|&r| (r.original_key(), 1u8, r)))
            .collect();
        tagged.sort_by_key(|&(k, src, _)| (k, src));
        tagged.into_iter().map(|(_, _, r)| r).collect()
    }

    /// All sorted-by-original-key sequences of length `n` over keys 0..keys,
    /// with every status combination. Values number the elements so identity
    /// is visible in comparisons.
    fn all_sorted_runs(n: usize, keys: u32, base_value: u32) -> Vec<Vec<Record>> {
        fn rec(
            out: &mut Vec<Vec<Record>>,
            cur: &mut Vec<Record>,
            n: usize,
            keys: u32,
            min_key: u32,
            base_value: u32,
        ) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            let v = base_value + cur.len() as u32;
            for k in min_key..keys {
                cur.push(Record::regular(k, v));
                rec(out, cur, n, keys, k, base_value);
                cur.pop();
                cur.push(Record::tombstone(k));
                // tombstone values are all 0, identity comes from position
                rec(out, cur, n, keys, k, base_value);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(&mut out, &mut Vec::new(), n, keys, 0, base_value);
        out
    }

    #[test]
    fn merge_exhaustive_small_inputs() {
        // Every pair of sorted runs with combined size <= 8 over a 3-key
        // alphabet, compared against the concat-then-stable-sort oracle.
        for a in 0..=8usize {
            for b in 0..=(8 - a) {
                for newer in all_sorted_runs(a, 3, 100) {
                    for older in all_sorted_runs(b, 3, 200) {
                        assert_eq!(
                            merge_by_original_key(&newer, &older),
                            merge_oracle(&newer, &older),
                            "newer={newer:?} older={older:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn bounds_trivial_cases() {
        let level: Vec<Record> = [2u32, 4, 4, 9].iter().map(|&k| reg(k, 0)).collect();
        assert_eq!(lower_bound(&level, 4), 1);
        assert_eq!(lower_bound(&level, 10), 4);
        assert_eq!(upper_bound(&level, 4), 3);
        assert_eq!(upper_bound(&level, 1), 0);
    }

    #[test]
    fn bounds_match_linear_scan_exhaustive() {
        // All sorted multisets of length <= 64 over a 3-key alphabet.
        for n in 0..=64usize {
            for c0 in 0..=n {
                for c1 in 0..=(n - c0) {
                    let c2 = n - c0 - c1;
                    let mut level = Vec::with_capacity(n);
                    level.extend(std::iter::repeat(reg(0, 0)).take(c0));
                    level.extend(std::iter::repeat(reg(1, 0)).take(c1));
                    level.extend(std::iter::repeat(reg(2, 0)).take(c2));
                    for k in 0..=3u32 {
                        let lb = level.iter().position(|r| r.original_key() >= k).unwrap_or(n);
                        let ub = level.iter().position(|r| r.original_key() > k).unwrap_or(n);
                        assert_eq!(lower_bound(&level, k), lb);
                        assert_eq!(upper_bound(&level, k), ub);
                    }
                }
            }
        }
    }

    #[test]
    fn lower_bound_probe_budget() {
        for n in [0usize, 1, 2, 3, 7, 8, 1024, 1025] {
            let level: Vec<Record> = (0..n as u32).map(|k| reg(2 * k, 0)).collect();
            let budget = if n == 0 {
                0
            } else {
                (n as f64).log2().ceil() as u32 + 1
            };
            for k in 0..=(2 * n as u32) {
                let (_, probes) = lower_bound_counted(&level, k);
                assert!(probes <= budget, "n={n} k={k} probes={probes}");
            }
        }
    }

    #[test]
    fn exclusive_scan_examples() {
        assert_eq!(exclusive_scan(&[1, 2, 3]), vec![0, 1, 3]);
        assert_eq!(exclusive_scan(&[]), Vec::<usize>::new());
    }

    #[test]
    fn segmented_sort_examples() {
        let records = vec![reg(5, 0), reg(2, 1), reg(9, 2), reg(1, 3), reg(1, 4)];
        let layout = SegmentLayout::from_counts(&[2, 3]);
        let out = segmented_sort_records(&records, &layout);
        assert_eq!(out, vec![reg(2, 1), reg(5, 0), reg(1, 3), reg(1, 4), reg(9, 2)]);

        // Stability on equal original keys: tombstone stays first.
        let records = vec![tomb(7), reg(7, 1)];
        let layout = SegmentLayout::from_counts(&[2]);
        assert_eq!(segmented_sort_records(&records, &layout), records);
    }

    #[test]
    fn segmented_compact_examples() {
        let records = vec![reg(1, 0), reg(2, 0), reg(3, 0)];
        let layout = SegmentLayout::from_counts(&[3]);
        let (out, counts) = segmented_compact(&records, &[true, false, true], &layout);
        assert_eq!(out, vec![reg(1, 0), reg(3, 0)]);
        assert_eq!(counts, vec![2]);

        let layout = SegmentLayout::from_counts(&[1, 1, 1]);
        let (out, counts) = segmented_compact(&records, &[false, false, false], &layout);
        assert!(out.is_empty());
        assert_eq!(counts, vec![0, 0, 0]);
    }

    prop_compose! {
        fn arb_record(max_key: u32)(key in 0..max_key, v in any::<u32>(), reg in any::<bool>()) -> Record {
            if reg { Record::regular(key, v) } else { Record::tombstone(key) }
        }
    }

    proptest! {
        #[test]
        fn prop_sort_is_stable_and_sorted(input in prop::collection::vec(arb_record(32), 0..512)) {
            let mut tagged: Vec<(u32, usize, Record)> = input
                .iter()
                .enumerate()
                .map(|(i, &r)| (r.key.packed(), i, r))
                .collect();
            tagged.sort_by_key(|&(p, i, _)| (p, i));
            let expected: Vec<Record> = tagged.into_iter().map(|(_, _, r)| r).collect();
            prop_assert_eq!(sort_records(&input), expected);
        }

        #[test]
        fn prop_merge_matches_oracle(
            mut a in prop::collection::vec(arb_record(24), 0..256),
            mut b in prop::collection::vec(arb_record(24), 0..256),
        ) {
            a.sort_by_key(|r| r.original_key());
            b.sort_by_key(|r| r.original_key());
            prop_assert_eq!(merge_by_original_key(&a, &b), merge_oracle(&a, &b));
        }

        #[test]
        fn prop_bounds_match_linear_scan(
            mut level in prop::collection::vec(arb_record(64), 0..200),
            k in 0u32..70,
        ) {
            level.sort_by_key(|r| r.original_key());
            let n = level.len();
            let lb = level.iter().position(|r| r.original_key() >= k).unwrap_or(n);
            let ub = level.iter().position(|r| r.original_key() > k).unwrap_or(n);
            prop_assert_eq!(lower_bound(&level, k), lb);
            prop_assert_eq!(upper_bound(&level, k), ub);
        }

        #[test]
        fn prop_scan_differences_reconstruct_counts(counts in prop::collection::vec(0usize..1000, 0..300)) {
            let offsets = exclusive_scan(&counts);
            let total: usize = counts.iter().sum();
            let mut rebuilt = Vec::with_capacity(counts.len());
            for i in 0..offsets.len() {
                let next = offsets.get(i + 1).copied().unwrap_or(total);
                rebuilt.push(next - offsets[i]);
            }
            prop_assert_eq!(rebuilt, counts);
        }

        #[test]
        fn prop_segmented_sort_and_compact_match_per_segment_oracles(
            records in prop::collection::vec(arb_record(16), 0..200),
            seed in any::<u64>(),
        ) {
            // Derive a segmentation and validity flags from the seed.
            let mut s = seed | 1;
            let mut next = move || { s ^= s << 13; s ^= s >> 7; s ^= s << 17; s };
            let mut counts = Vec::new();
            let mut remaining = records.len();
            while remaining > 0 {
                let c = (next() as usize % remaining.min(16)) + 1;
                counts.push(c.min(remaining));
                remaining -= c.min(remaining);
            }
            if next() & 1 == 0 { counts.push(0); }
            let layout = SegmentLayout::from_counts(&counts);
            let valid: Vec<bool> = (0..records.len()).map(|_| next() & 1 == 1).collect();

            // Per-segment stable-sort oracle.
            let mut expected_sorted = records.clone();
            for seg in layout.segments() {
                expected_sorted[seg].sort_by_key(|r| r.original_key());
            }
            prop_assert_eq!(segmented_sort_records(&records, &layout), expected_sorted);

            // Per-segment filter oracle.
            let mut expected_compacted = Vec::new();
            let mut expected_counts = Vec::new();
            for seg in layout.segments() {
                let kept: Vec<Record> = seg.filter(|&i| valid[i]).map(|i| records[i]).collect();
                expected_counts.push(kept.len());
                expected_compacted.extend(kept);
            }
            let (out, out_counts) = segmented_compact(&records, &valid, &layout);
            prop_assert_eq!(out, expected_compacted);
            prop_assert_eq!(out_counts, expected_counts);
        }
    }

    #[test]
    fn sort_matches_oracle_at_scale() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let input: Vec<Record> = (0..1 << 16)
            .map(|i| {
                let key = rng.gen_range(0u32..1 << 12);
                if rng.gen_bool(0.8) {
                    reg(key, i)
                } else {
                    tomb(key)
                }
            })
            .collect();
        let mut tagged: Vec<(u32, usize, Record)> = input
            .iter()
            .enumerate()
            .map(|(i, &r)| (r.key.packed(), i, r))
            .collect();
        tagged.sort_by_key(|&(p, i, _)| (p, i));
        let expected: Vec<Record> = tagged.into_iter().map(|(_, _, r)| r).collect();
        assert_eq!(sort_records(&input), expected);
    }
}
