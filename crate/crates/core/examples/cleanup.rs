//! Cleanup: drop stale records and tombstones, repack the levels.
//!
//! Updates never remove anything; overwrites and deletes accumulate as
//! stale records that queries skip but still pay to scan past. `cleanup`
//! rebuilds the structure from its valid records only, padding the last
//! partial batch with placebo records so the occupancy law keeps holding.
//!
//! Run with: cargo run --example cleanup

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lsm_batch::{dump::dump_lsm, Lsm, UpdateEntry};

fn main() {
    let b = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut lsm = Lsm::with_batch_size(b).unwrap();

    // Churn a small key alphabet so most records end up stale.
    for _ in 0..8 {
        let batch: Vec<UpdateEntry> = (0..b)
            .map(|_| {
                let key = rng.gen_range(0..24u32);
                if rng.gen_bool(0.35) {
                    UpdateEntry::Delete { key }
                } else {
                    UpdateEntry::Insert { key, value: rng.gen_range(0..1000) }
                }
            })
            .collect();
        lsm.update_batch(&batch).unwrap();
    }

    let queries = [(0u32, 23u32)];
    let before = lsm.count(&queries).unwrap()[0];
    println!("before cleanup: {} records held, {} alive in [0, 23]", lsm.len(), before);
    println!("{}", dump_lsm(&lsm));

    lsm.cleanup();

    // Queries are unaffected; the footprint shrinks. Placebo records
    // (key 2147483647, rendered as a tombstone) fill out the last batch.
    assert_eq!(lsm.count(&queries).unwrap()[0], before);
    println!("after cleanup: {} records held, same {} alive", lsm.len(), before);
    println!("{}", dump_lsm(&lsm));

    // Running it again changes nothing.
    let snapshot = lsm.levels().to_vec();
    lsm.cleanup();
    assert_eq!(lsm.levels(), snapshot.as_slice());
    println!("cleanup is idempotent");
}
