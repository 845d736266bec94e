//! Insert and delete in fixed-size batches, then look keys up.
//!
//! Run with: cargo run --example basic_updates

use lsm_batch::{ffz, pad_partial_batch, LookupResult, Lsm, UpdateEntry};

fn main() {
    let b = 4;
    let mut lsm = Lsm::with_batch_size(b).unwrap();

    lsm.update_batch(&[
        UpdateEntry::Insert { key: 3, value: 100 },
        UpdateEntry::Insert { key: 7, value: 200 },
        UpdateEntry::Insert { key: 9, value: 300 },
        UpdateEntry::Insert { key: 12, value: 400 },
    ])
    .unwrap();

    // A second batch overwrites key 3 and deletes key 9. Deletes are
    // tombstones: they land in the structure like any other record and
    // shadow older values at query time.
    lsm.update_batch(&[
        UpdateEntry::Insert { key: 3, value: 500 },
        UpdateEntry::Delete { key: 9 },
        UpdateEntry::Insert { key: 20, value: 600 },
        UpdateEntry::Insert { key: 21, value: 700 },
    ])
    .unwrap();

    for k in [3, 7, 9, 12, 99] {
        match lsm.lookup_one(k) {
            LookupResult::Found(v) => println!("lookup({k}) = {v}"),
            LookupResult::NotFound => println!("lookup({k}) = not found"),
        }
    }

    // Level occupancy mirrors the bits of the resident batch count: with
    // r = 2 only level 1 is full.
    println!("\nresident batches: {}", lsm.resident_batches());
    for (i, level) in lsm.levels().iter().enumerate() {
        println!("level {i}: {} records", level.len());
    }
    println!("next batch goes to level {}", ffz(lsm.resident_batches()));

    // Partial batches must be padded to exactly b entries; the helper
    // repeats the last entry, which is harmless for both inserts and
    // deletes.
    let padded = pad_partial_batch(
        &[UpdateEntry::Insert { key: 42, value: 800 }],
        b,
    )
    .unwrap();
    assert_eq!(padded.len(), b);
    lsm.update_batch(&padded).unwrap();
    println!("\nafter padded batch: lookup(42) = {:?}", lsm.lookup_one(42));
}
