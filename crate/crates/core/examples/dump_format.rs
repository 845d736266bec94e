//! Serialize a structure to the text dump format and parse it back.
//!
//! Run with: cargo run --example dump_format

use lsm_batch::dump::{dump_lsm, dump_sorted_array, parse_dump, ParsedDump};
use lsm_batch::{Lsm, SortedArray, UpdateEntry};

fn main() {
    let batches = [
        vec![
            UpdateEntry::Insert { key: 3, value: 100 },
            UpdateEntry::Insert { key: 7, value: 200 },
            UpdateEntry::Insert { key: 9, value: 300 },
            UpdateEntry::Insert { key: 12, value: 400 },
        ],
        vec![
            UpdateEntry::Insert { key: 3, value: 500 },
            UpdateEntry::Delete { key: 9 },
            UpdateEntry::Insert { key: 20, value: 600 },
            UpdateEntry::Insert { key: 21, value: 700 },
        ],
    ];

    let mut lsm = Lsm::with_batch_size(4).unwrap();
    let mut sa = SortedArray::with_batch_size(4).unwrap();
    for batch in &batches {
        lsm.update_batch(batch).unwrap();
        sa.update_batch(batch).unwrap();
    }

    // Records print as key:R:value (regular) or key:T:value (tombstone).
    // Within a level, equal keys appear most-recent-first.
    let text = dump_lsm(&lsm);
    print!("{text}");
    print!("{}", dump_sorted_array(&sa));

    // The parser validates everything it reads: header shape, level
    // sizes, sort order, the occupancy law.
    match parse_dump(&text).unwrap() {
        ParsedDump::Lsm(parsed) => {
            assert_eq!(parsed.lookup_one(3), lsm.lookup_one(3));
            assert_eq!(dump_lsm(&parsed), text);
            println!("\nround-trip ok");
        }
        ParsedDump::SortedArray(_) => unreachable!(),
    }

    // Corrupt input is rejected rather than silently accepted.
    let bad = text.replace("3:R:500", "30:R:500");
    println!("corrupted dump -> {}", parse_dump(&bad).unwrap_err());
}
