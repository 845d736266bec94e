//! The LSM against the single-array baseline: same answers, less merge work.
//!
//! `SortedArray` keeps everything in one sorted run and re-merges the
//! whole array on every batch, so its cumulative merge work grows
//! quadratically in the number of batches; the LSM's grows as r log r.
//! Both structures are fed the same workload here and cross-checked
//! against the brute-force oracle.
//!
//! Run with: cargo run --example sorted_array_comparison --release

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lsm_batch::{Lsm, Oracle, SortedArray, UpdateEntry};

fn main() {
    let b = 1 << 10;
    let batches = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut lsm = Lsm::with_batch_size(b).unwrap();
    let mut sa = SortedArray::with_batch_size(b).unwrap();
    let mut oracle = Oracle::new();

    for _ in 0..batches {
        let batch: Vec<UpdateEntry> = (0..b)
            .map(|_| {
                let key = rng.gen_range(0..200_000u32);
                if rng.gen_bool(0.2) {
                    UpdateEntry::Delete { key }
                } else {
                    UpdateEntry::Insert { key, value: rng.gen() }
                }
            })
            .collect();
        lsm.update_batch(&batch).unwrap();
        sa.update_batch(&batch).unwrap();
        oracle.apply_batch(&batch);
    }

    let keys: Vec<u32> = (0..10_000).map(|_| rng.gen_range(0..220_000)).collect();
    let expected: Vec<_> = keys.iter().map(|&k| oracle.lookup(k)).collect();
    assert_eq!(lsm.lookup(&keys), expected);
    assert_eq!(sa.lookup(&keys), expected);

    let lsm_merged = lsm.stats().merged_records;
    let sa_merged = sa.stats().merged_records;
    println!("{} batches of {b}, both structures match the oracle on 10000 lookups", batches);
    println!("LSM merged records:          {lsm_merged:>12}");
    println!("sorted array merged records: {sa_merged:>12}");
    println!("work ratio: {:.1}x", sa_merged as f64 / lsm_merged as f64);
}
