//! Batched count and range queries over key intervals.
//!
//! Run with: cargo run --example count_and_range

use lsm_batch::{Lsm, UpdateEntry};

fn main() {
    let mut lsm = Lsm::with_batch_size(4).unwrap();
    lsm.update_batch(&[
        UpdateEntry::Insert { key: 3, value: 100 },
        UpdateEntry::Insert { key: 7, value: 200 },
        UpdateEntry::Insert { key: 9, value: 300 },
        UpdateEntry::Insert { key: 12, value: 400 },
    ])
    .unwrap();
    lsm.update_batch(&[
        UpdateEntry::Insert { key: 3, value: 500 },
        UpdateEntry::Delete { key: 9 },
        UpdateEntry::Insert { key: 20, value: 600 },
        UpdateEntry::Insert { key: 21, value: 700 },
    ])
    .unwrap();

    // Intervals are inclusive on both ends. Stale records (the old value
    // of 3, the deleted 9) are filtered during validation, so the count
    // over [0, 15] is 3: keys 3, 7, 12.
    let queries = [(0u32, 15u32), (0, 31), (10, 20), (22, 30)];
    let counts = lsm.count(&queries).unwrap();
    for (&(k1, k2), c) in queries.iter().zip(&counts) {
        println!("count[{k1}, {k2}] = {c}");
    }

    // range returns one flat pair buffer plus per-query start offsets, so
    // a batch of queries costs one allocation pattern regardless of how
    // many hits each query has.
    let (offsets, pairs) = lsm.range(&queries).unwrap();
    for (q, &(k1, k2)) in queries.iter().enumerate() {
        let end = offsets.get(q + 1).copied().unwrap_or(pairs.len());
        println!("range[{k1}, {k2}] = {:?}", &pairs[offsets[q]..end]);
    }

    // candidate_count is the size of the stale-inclusive candidate set a
    // single query would gather -- the quantity that drives query cost.
    println!(
        "\ncandidates in [0, 31]: {} (vs {} live)",
        lsm.candidate_count(0, 31),
        counts[1]
    );
}
