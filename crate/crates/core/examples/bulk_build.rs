//! Build a structure from a whole insert-only dataset in one shot.
//!
//! `bulk_build` sorts once and slices the result directly into levels,
//! skipping the cascade of merges that sequential insertion would do,
//! while keeping the same semantics for duplicate keys (later entries
//! win).
//!
//! Run with: cargo run --example bulk_build --release

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lsm_batch::{Lsm, LsmConfig, UpdateEntry};

fn main() {
    let n = 1 << 20;
    let b = 1 << 10;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let entries: Vec<UpdateEntry> = (0..n)
        .map(|_| UpdateEntry::Insert {
            key: rng.gen_range(0..=lsm_batch::MAX_ORIGINAL_KEY),
            value: rng.gen(),
        })
        .collect();

    let t = Instant::now();
    let bulk = Lsm::bulk_build(&entries, LsmConfig::new(b).unwrap()).unwrap();
    let bulk_time = t.elapsed();

    let t = Instant::now();
    let mut seq = Lsm::with_batch_size(b).unwrap();
    for batch in entries.chunks(b) {
        seq.update_batch(batch).unwrap();
    }
    let seq_time = t.elapsed();

    println!("n = {n}, b = {b}");
    println!("bulk build:   {bulk_time:?}, merged counter {}", bulk.stats().merged_records);
    println!("sequential:   {seq_time:?}, merged counter {}", seq.stats().merged_records);

    // Both routes answer queries identically.
    let keys: Vec<u32> = (0..10_000).map(|_| rng.gen_range(0..=lsm_batch::MAX_ORIGINAL_KEY)).collect();
    assert_eq!(bulk.lookup(&keys), seq.lookup(&keys));
    assert_eq!(bulk.resident_batches(), seq.resident_batches());
    println!("10000 random lookups agree between the two builds");
}
