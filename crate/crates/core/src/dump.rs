//! Line-oriented text dump of a structure, for golden tests and debugging.
//!
//! Header: `lsm b=<b> r=<r>` (or `sa b=<b> r=<r>`), then one line per full
//! level in ascending index order: `level <i>: <key>:<s>:<value> ...` with
//! `s` in {R, T}. The parser reconstructs the structure and validates all
//! structural invariants on load.

use std::fmt::Write as _;

use crate::error::{LsmError, Result};
use crate::lsm::{Lsm, LsmConfig};
use crate::record::{KeyVariable, Record};
use crate::sorted_array::SortedArray;

fn write_level(out: &mut String, i: usize, records: &[Record]) {
    let _ = write!(out, "level {i}:");
    for rec in records {
        let status = if rec.key.is_regular() { 'R' } else { 'T' };
        let _ = write!(out, " {}:{}:{}", rec.original_key(), status, rec.value);
    }
    out.push('\n');
}

pub fn dump_lsm(lsm: &Lsm) -> String {
    let mut out = format!("lsm b={} r={}\n", lsm.batch_size(), lsm.resident_batches());
    for (i, level) in lsm.levels().iter().enumerate() {
        if !level.is_empty() {
            write_level(&mut out, i, level);
        }
    }
    out
}

pub fn dump_sorted_array(sa: &SortedArray) -> String {
    let mut out = format!("sa b={} r={}\n", sa.batch_size(), sa.resident_batches());
    if !sa.is_empty() {
        write_level(&mut out, 0, sa.records());
    }
    out
}

#[derive(Debug, Clone)]
pub enum ParsedDump {
    Lsm(Lsm),
    SortedArray(SortedArray),
}

fn parse_err(msg: impl Into<String>) -> LsmError {
    LsmError::Parse(msg.into())
}

fn parse_record(token: &str) -> Result<Record> {
    let mut parts = token.split(':');
    let key: u32 = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(format!("bad key in record '{token}'")))?;
    let status = parts
        .next()
        .ok_or_else(|| parse_err(format!("missing status in record '{token}'")))?;
    let value: u32 = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(format!("bad value in record '{token}'")))?;
    if parts.next().is_some() {
        return Err(parse_err(format!("trailing fields in record '{token}'")));
    }
    let key = match status {
        "R" => KeyVariable::regular(key),
        "T" => KeyVariable::tombstone(key),
        other => return Err(parse_err(format!("bad status '{other}' in '{token}'"))),
    };
    Ok(Record { key, value })
}

pub fn parse_dump(text: &str) -> Result<ParsedDump> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty dump"))?;
    let mut fields = header.split_whitespace();
    let kind = fields.next().ok_or_else(|| parse_err("empty header"))?;
    let b: usize = fields
        .next()
        .and_then(|s| s.strip_prefix("b="))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err("header missing b=<batch size>"))?;
    let r: usize = fields
        .next()
        .and_then(|s| s.strip_prefix("r="))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err("header missing r=<resident batches>"))?;
    let config =
        LsmConfig::new(b).map_err(|e| parse_err(format!("bad batch size in header: {e}")))?;

    let mut levels: Vec<(usize, Vec<Record>)> = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix("level ")
            .ok_or_else(|| parse_err(format!("expected 'level <i>:' line, got '{line}'")))?;
        let (idx, records_part) = rest
            .split_once(':')
            .ok_or_else(|| parse_err(format!("missing ':' in level line '{line}'")))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad level index '{idx}'")))?;
        let records: Result<Vec<Record>> = records_part
            .split_whitespace()
            .map(parse_record)
            .collect();
        if let Some(&(prev, _)) = levels.last() {
            if idx <= prev {
                return Err(parse_err(format!(
                    "level indices must be strictly ascending, {idx} after {prev}"
                )));
            }
        }
        levels.push((idx, records?));
    }

    match kind {
        "lsm" => {
            let max_level = levels.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
            let mut storage = vec![Vec::new(); max_level.max(usize::BITS as usize - r.leading_zeros() as usize)];
            for (i, records) in levels {
                if i >= storage.len() {
                    storage.resize(i + 1, Vec::new());
                }
                storage[i] = records;
            }
            Lsm::from_parts(config, r, storage)
                .map(ParsedDump::Lsm)
                .map_err(parse_err)
        }
        "sa" => {
            let records = match levels.len() {
                0 => Vec::new(),
                1 if levels[0].0 == 0 => levels.into_iter().next().unwrap().1,
                _ => return Err(parse_err("sorted array dump must have a single level 0")),
            };
            SortedArray::from_parts(config, r, records)
                .map(ParsedDump::SortedArray)
                .map_err(parse_err)
        }
        other => Err(parse_err(format!("unknown structure kind '{other}'"))),
    }
}
