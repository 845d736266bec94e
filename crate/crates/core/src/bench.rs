//! Benchmark workloads and experiment runners behind the `lsm-bench`
//! binary: insertion sweeps, effective-rate curves, query benchmarks, and
//! cleanup timing, all emitting CSV rows.
//!
//! Every run is reproducible from its seed; wall-clock rows are
//! informational, while work counters and oracle cross-checks carry the
//! correctness weight. No timing row is emitted for a configuration whose
//! results failed the oracle cross-check.

use std::collections::HashSet;
use std::io::{self, Write};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LsmError, Result};
use crate::lsm::{ffz, LookupResult, Lsm, LsmConfig, UpdateEntry};
use crate::oracle::Oracle;
use crate::record::MAX_ORIGINAL_KEY;
use crate::sorted_array::SortedArray;

const KEY_DOMAIN: u64 = MAX_ORIGINAL_KEY as u64 + 1;
const LOOKUPS_PER_CHECKPOINT: usize = 16 * 1024;
const CHECKPOINTS: usize = 12;
const RANGE_QUERIES: usize = 4096;

/// Workload parameters shared by the experiment runners.
#[derive(Debug, Clone, Copy)]
pub struct WorkloadSpec {
    pub seed: u64,
    /// Total elements to insert; must be a multiple of `batch_size`.
    pub total: usize,
    pub batch_size: usize,
    /// Fraction of lookup keys drawn from the inserted set.
    pub exist_fraction: f64,
    /// Target expected number of resident elements per count/range query.
    pub range_l: u64,
}

impl WorkloadSpec {
    pub fn new(total: usize, batch_size: usize, seed: u64) -> Self {
        WorkloadSpec {
            seed,
            total,
            batch_size,
            exist_fraction: 1.0,
            range_l: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        LsmConfig::new(self.batch_size)?;
        if self.total == 0 || self.total % self.batch_size != 0 {
            return Err(LsmError::SpecInvalid(format!(
                "total {} must be a positive multiple of batch size {}",
                self.total, self.batch_size
            )));
        }
        if !(0.0..=1.0).contains(&self.exist_fraction) {
            return Err(LsmError::SpecInvalid(format!(
                "exist fraction {} outside [0, 1]",
                self.exist_fraction
            )));
        }
        if self.range_l < 1 {
            return Err(LsmError::SpecInvalid("range L must be >= 1".into()));
        }
        Ok(())
    }

    /// Query span giving an expected `range_l` resident uniform keys:
    /// `k2 = k1 + ceil(L * 2^31 / n)`.
    pub fn range_span(&self) -> u32 {
        ((self.range_l as u128 * (1u128 << 31)).div_ceil(self.total as u128)) as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    Lsm,
    Sa,
}

impl StructureKind {
    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Lsm => "lsm",
            StructureKind::Sa => "sa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Lookup,
    Count,
    Range,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Lookup => "lookup",
            QueryKind::Count => "count",
            QueryKind::Range => "range",
        }
    }
}

/// One CSV row: `experiment,structure,b,r,metric,value`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub experiment: String,
    pub structure: String,
    pub b: usize,
    pub r: usize,
    pub metric: String,
    pub value: f64,
}

impl ExperimentRow {
    fn new(
        experiment: &str,
        structure: &str,
        b: usize,
        r: usize,
        metric: &str,
        value: f64,
    ) -> Self {
        ExperimentRow {
            experiment: experiment.to_string(),
            structure: structure.to_string(),
            b,
            r,
            metric: metric.to_string(),
            value,
        }
    }

    /// Metrics whose values change run to run (wall-clock derived); the
    /// remaining rows are deterministic functions of the seed.
    pub fn is_timing(&self) -> bool {
        self.metric.contains("rate") || self.metric.ends_with("_ms")
    }
}

pub fn write_csv<W: Write>(rows: &[ExperimentRow], mut out: W) -> io::Result<()> {
    out.write_all(b"experiment,structure,b,r,metric,value\n")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:.6}",
            row.experiment, row.structure, row.b, row.r, row.metric, row.value
        )?;
    }
    Ok(())
}

pub fn harmonic_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.len() as f64 / values.iter().map(|v| 1.0 / v).sum::<f64>()
}

fn rate_meps(count: usize, seconds: f64) -> f64 {
    count as f64 / seconds / 1e6
}

/// Distinct random keys in the insertable domain.
fn gen_distinct_keys(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    let mut seen = HashSet::with_capacity(n);
    let mut keys = Vec::with_capacity(n);
    while keys.len() < n {
        let k = (rng.gen::<u64>() % KEY_DOMAIN) as u32;
        if seen.insert(k) {
            keys.push(k);
        }
    }
    keys
}

fn insert_batches(keys: &[u32], batch_size: usize) -> Vec<Vec<UpdateEntry>> {
    keys.chunks(batch_size)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&key| UpdateEntry::Insert { key, value: key ^ 0x5a5a_5a5a })
                .collect()
        })
        .collect()
}

/// Insertion-rate sweep: for each batch size, insert `total / b` batches
/// into a fresh LSM and a fresh sorted array, recording per-batch rates and
/// min/max/harmonic-mean summaries. Work-counter formulas are asserted
/// along the way.
pub fn run_insert_sweep(spec: &WorkloadSpec, batch_sizes: &[usize]) -> Result<Vec<ExperimentRow>> {
    let mut rows = Vec::new();
    for &b in batch_sizes {
        let per_b = WorkloadSpec { batch_size: b, ..*spec };
        per_b.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let keys = gen_distinct_keys(&mut rng, spec.total);
        let batches = insert_batches(&keys, b);
        let r_total = spec.total / b;

        let mut lsm = Lsm::with_batch_size(b)?;
        let mut lsm_rates = Vec::with_capacity(r_total);
        for (j, batch) in batches.iter().enumerate() {
            let merged_before = lsm.stats().merged_records;
            let t = Instant::now();
            lsm.update_batch(batch)?;
            let secs = t.elapsed().as_secs_f64();
            let delta = lsm.stats().merged_records - merged_before;
            assert_eq!(
                delta,
                2 * b as u64 * ((1u64 << ffz(j)) - 1),
                "merge-work formula violated at r={j}"
            );
            let rate = rate_meps(b, secs);
            lsm_rates.push(rate);
            rows.push(ExperimentRow::new("insert-sweep", "lsm", b, j + 1, "batch_rate_meps", rate));
        }

        let mut sa = SortedArray::with_batch_size(b)?;
        let mut sa_rates = Vec::with_capacity(r_total);
        for (j, batch) in batches.iter().enumerate() {
            let t = Instant::now();
            sa.update_batch(batch)?;
            let secs = t.elapsed().as_secs_f64();
            let rate = rate_meps(b, secs);
            sa_rates.push(rate);
            rows.push(ExperimentRow::new("insert-sweep", "sa", b, j + 1, "batch_rate_meps", rate));
        }
        let r = r_total as u64;
        assert_eq!(
            sa.stats().merged_records,
            b as u64 * (r - 1) * (r + 2) / 2,
            "sorted-array merge-work closed form violated"
        );

        for (name, rates) in [("lsm", &lsm_rates), ("sa", &sa_rates)] {
            let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = rates.iter().cloned().fold(0.0, f64::max);
            rows.push(ExperimentRow::new("insert-sweep", name, b, r_total, "min_rate_meps", min));
            rows.push(ExperimentRow::new("insert-sweep", name, b, r_total, "max_rate_meps", max));
            rows.push(ExperimentRow::new(
                "insert-sweep", name, b, r_total, "harmonic_mean_rate_meps",
                harmonic_mean(rates),
            ));
        }
    }
    Ok(rows)
}

/// Effective insertion rate: resident elements divided by cumulative time,
/// after every batch, for the LSM and the sorted array; cumulative merge
/// counters ride along for the deterministic work-ratio comparison.
pub fn run_effective_rate(spec: &WorkloadSpec) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    let b = spec.batch_size;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let keys = gen_distinct_keys(&mut rng, spec.total);
    let batches = insert_batches(&keys, b);

    let mut rows = Vec::new();
    for kind in [StructureKind::Lsm, StructureKind::Sa] {
        let mut lsm = Lsm::with_batch_size(b)?;
        let mut sa = SortedArray::with_batch_size(b)?;
        let mut cumulative = 0.0f64;
        for (j, batch) in batches.iter().enumerate() {
            let t = Instant::now();
            let merged = match kind {
                StructureKind::Lsm => {
                    lsm.update_batch(batch)?;
                    lsm.stats().merged_records
                }
                StructureKind::Sa => {
                    sa.update_batch(batch)?;
                    sa.stats().merged_records
                }
            };
            cumulative += t.elapsed().as_secs_f64();
            let r = j + 1;
            rows.push(ExperimentRow::new(
                "effective-rate", kind.name(), b, r, "effective_rate_meps",
                rate_meps(r * b, cumulative),
            ));
            rows.push(ExperimentRow::new(
                "effective-rate", kind.name(), b, r, "cumulative_merged", merged as f64,
            ));
        }
    }
    Ok(rows)
}

fn checksum_lookup(results: &[LookupResult]) -> u64 {
    let mut acc = 0u64;
    for r in results {
        acc = acc
            .wrapping_mul(31)
            .wrapping_add(match r {
                LookupResult::Found(v) => *v as u64 + 1,
                LookupResult::NotFound => 0,
            });
    }
    acc % 1_000_000_000
}

fn checksum_pairs(pairs: &[(u32, u32)]) -> u64 {
    let mut acc = 0u64;
    for &(k, v) in pairs {
        acc = acc.wrapping_mul(31).wrapping_add(k as u64 ^ (v as u64) << 1);
    }
    acc % 1_000_000_000
}

/// Query benchmark. Lookups sample a handful of resident-batch checkpoints
/// while inserting (the level mix, and with it the rate, depends on `r`);
/// count and range run against the fully built structure. Every result is
/// cross-checked against the oracle before timing rows are emitted.
pub fn run_query_bench(
    spec: &WorkloadSpec,
    kind: QueryKind,
    structures: &[StructureKind],
) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    match kind {
        QueryKind::Lookup => run_lookup_bench(spec, structures),
        QueryKind::Count | QueryKind::Range => run_count_range_bench(spec, kind, structures),
    }
}

fn run_lookup_bench(
    spec: &WorkloadSpec,
    structures: &[StructureKind],
) -> Result<Vec<ExperimentRow>> {
    let b = spec.batch_size;
    let r_total = spec.total / b;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let keys = gen_distinct_keys(&mut rng, spec.total);
    let inserted: HashSet<u32> = keys.iter().copied().collect();
    let batches = insert_batches(&keys, b);

    // Random resident-batch checkpoints, the desk-scale analog of sweeping
    // every possible r.
    let mut checkpoints: Vec<usize> = if r_total <= CHECKPOINTS {
        (1..=r_total).collect()
    } else {
        let mut set = HashSet::new();
        while set.len() < CHECKPOINTS {
            set.insert(rng.gen_range(1..=r_total));
        }
        let mut v: Vec<usize> = set.into_iter().collect();
        v.sort_unstable();
        v
    };
    checkpoints.dedup();

    let mut rows = Vec::new();
    for &structure in structures {
        let mut lsm = Lsm::with_batch_size(b)?;
        let mut sa = SortedArray::with_batch_size(b)?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9);
        let mut rates = Vec::new();
        let mut checksum = 0u64;
        let mut next_checkpoint = 0usize;

        for (j, batch) in batches.iter().enumerate() {
            match structure {
                StructureKind::Lsm => lsm.update_batch(batch)?,
                StructureKind::Sa => sa.update_batch(batch)?,
            }
            let r = j + 1;
            if next_checkpoint >= checkpoints.len() || checkpoints[next_checkpoint] != r {
                continue;
            }
            next_checkpoint += 1;

            let resident = &keys[..r * b];
            let resident_set: HashSet<u32> = resident.iter().copied().collect();
            let queries: Vec<u32> = (0..LOOKUPS_PER_CHECKPOINT.min(spec.total))
                .map(|_| {
                    if rng.gen_bool(spec.exist_fraction) {
                        resident[rng.gen_range(0..resident.len())]
                    } else {
                        loop {
                            let k = (rng.gen::<u64>() % KEY_DOMAIN) as u32;
                            if !inserted.contains(&k) {
                                break k;
                            }
                        }
                    }
                })
                .collect();

            // Warm-up pass, then the timed pass.
            let (results, secs) = match structure {
                StructureKind::Lsm => {
                    let _ = lsm.lookup(&queries);
                    let t = Instant::now();
                    let res = lsm.lookup(&queries);
                    (res, t.elapsed().as_secs_f64())
                }
                StructureKind::Sa => {
                    let _ = sa.lookup(&queries);
                    let t = Instant::now();
                    let res = sa.lookup(&queries);
                    (res, t.elapsed().as_secs_f64())
                }
            };

            // Oracle cross-check: none of the resident keys were deleted.
            for (&k, &res) in queries.iter().zip(results.iter()) {
                let expected = if resident_set.contains(&k) {
                    LookupResult::Found(k ^ 0x5a5a_5a5a)
                } else {
                    LookupResult::NotFound
                };
                if res != expected {
                    return Err(LsmError::SpecInvalid(format!(
                        "lookup cross-check failed for key {k} at r={r}"
                    )));
                }
            }

            let rate = rate_meps(queries.len(), secs) ;
            rates.push(rate);
            checksum = checksum.wrapping_add(checksum_lookup(&results)) % 1_000_000_000;
            rows.push(ExperimentRow::new(
                "lookup-bench", structure.name(), b, r, "rate_mqps", rate,
            ));
        }
        rows.push(ExperimentRow::new(
            "lookup-bench", structure.name(), b, r_total, "harmonic_mean_rate_mqps",
            harmonic_mean(&rates),
        ));
        rows.push(ExperimentRow::new(
            "lookup-bench", structure.name(), b, r_total, "checksum", checksum as f64,
        ));
    }
    Ok(rows)
}

fn run_count_range_bench(
    spec: &WorkloadSpec,
    kind: QueryKind,
    structures: &[StructureKind],
) -> Result<Vec<ExperimentRow>> {
    let b = spec.batch_size;
    let r_total = spec.total / b;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let keys = gen_distinct_keys(&mut rng, spec.total);
    let batches = insert_batches(&keys, b);

    let mut oracle = Oracle::new();
    for batch in &batches {
        oracle.apply_batch(batch);
    }

    let span = spec.range_span();
    let hi = MAX_ORIGINAL_KEY - span;
    let nq = RANGE_QUERIES.min(spec.total);
    let queries: Vec<(u32, u32)> = (0..nq)
        .map(|_| {
            let k1 = (rng.gen::<u64>() % (hi as u64 + 1)) as u32;
            (k1, k1 + span)
        })
        .collect();

    let expected_counts: Vec<usize> = queries
        .iter()
        .map(|&(k1, k2)| oracle.count(k1, k2).unwrap())
        .collect();

    let experiment = match kind {
        QueryKind::Count => "count-bench",
        _ => "range-bench",
    };
    let mut rows = Vec::new();
    for &structure in structures {
        let mut lsm = Lsm::with_batch_size(b)?;
        let mut sa = SortedArray::with_batch_size(b)?;
        for batch in &batches {
            match structure {
                StructureKind::Lsm => lsm.update_batch(batch)?,
                StructureKind::Sa => sa.update_batch(batch)?,
            }
        }

        let candidates: usize = queries
            .iter()
            .map(|&(k1, k2)| match structure {
                StructureKind::Lsm => lsm.candidate_count(k1, k2),
                StructureKind::Sa => sa.candidate_count(k1, k2),
            })
            .sum();
        let mean_candidates = candidates as f64 / nq as f64;

        let (secs, checksum) = match kind {
            QueryKind::Count => {
                let counts = match structure {
                    StructureKind::Lsm => lsm.count(&queries)?,
                    StructureKind::Sa => sa.count(&queries)?,
                };
                if counts != expected_counts {
                    return Err(LsmError::SpecInvalid("count cross-check failed".into()));
                }
                let t = Instant::now();
                let counts = match structure {
                    StructureKind::Lsm => lsm.count(&queries)?,
                    StructureKind::Sa => sa.count(&queries)?,
                };
                let secs = t.elapsed().as_secs_f64();
                let sum: usize = counts.iter().sum();
                (secs, sum as u64 % 1_000_000_000)
            }
            _ => {
                let (offsets, pairs) = match structure {
                    StructureKind::Lsm => lsm.range(&queries)?,
                    StructureKind::Sa => sa.range(&queries)?,
                };
                for (q, &(k1, k2)) in queries.iter().enumerate() {
                    let end = offsets.get(q + 1).copied().unwrap_or(pairs.len());
                    if pairs[offsets[q]..end] != oracle.range(k1, k2).unwrap() {
                        return Err(LsmError::SpecInvalid("range cross-check failed".into()));
                    }
                }
                let t = Instant::now();
                let (_, pairs) = match structure {
                    StructureKind::Lsm => lsm.range(&queries)?,
                    StructureKind::Sa => sa.range(&queries)?,
                };
                let secs = t.elapsed().as_secs_f64();
                (secs, checksum_pairs(&pairs))
            }
        };

        rows.push(ExperimentRow::new(
            experiment, structure.name(), b, r_total, "rate_mqps", rate_meps(nq, secs),
        ));
        rows.push(ExperimentRow::new(
            experiment, structure.name(), b, r_total, "mean_candidates", mean_candidates,
        ));
        rows.push(ExperimentRow::new(
            experiment, structure.name(), b, r_total, "checksum", checksum as f64,
        ));
    }
    Ok(rows)
}

/// Cleanup experiment: build, make a fraction of the records stale with
/// deletes and overwrites, then time cleanup against a rebuild from scratch
/// and a fixed query workload before and after the cleanup.
pub fn run_cleanup_bench(spec: &WorkloadSpec, stale_fraction: f64) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    if !(0.0..1.0).contains(&stale_fraction) {
        return Err(LsmError::SpecInvalid(format!(
            "stale fraction {stale_fraction} outside [0, 1)"
        )));
    }
    let b = spec.batch_size;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let keys = gen_distinct_keys(&mut rng, spec.total);

    let mut lsm = Lsm::with_batch_size(b)?;
    let mut oracle = Oracle::new();
    for batch in insert_batches(&keys, b) {
        lsm.update_batch(&batch)?;
        oracle.apply_batch(&batch);
    }

    // Stale phase: alternate delete and overwrite batches over distinct
    // already-inserted keys.
    let stale_batches = ((stale_fraction * spec.total as f64) as usize) / b;
    for (i, chunk) in keys.chunks(b).take(stale_batches).enumerate() {
        let batch: Vec<UpdateEntry> = if i % 2 == 0 {
            chunk.iter().map(|&key| UpdateEntry::Delete { key }).collect()
        } else {
            chunk
                .iter()
                .map(|&key| UpdateEntry::Insert { key, value: !key })
                .collect()
        };
        lsm.update_batch(&batch)?;
        oracle.apply_batch(&batch);
    }

    // Fixed query workload, reused before and after the cleanup.
    let lookup_keys: Vec<u32> = (0..4096)
        .map(|_| keys[rng.gen_range(0..keys.len())])
        .collect();
    let span = spec.range_span();
    let ranges: Vec<(u32, u32)> = (0..256)
        .map(|_| {
            let k1 = (rng.gen::<u64>() % (MAX_ORIGINAL_KEY - span) as u64) as u32;
            (k1, k1 + span)
        })
        .collect();

    let run_queries = |lsm: &Lsm| -> Result<(f64, Vec<LookupResult>, Vec<usize>, Vec<(u32, u32)>)> {
        let t = Instant::now();
        let lookups = lsm.lookup(&lookup_keys);
        let counts = lsm.count(&ranges)?;
        let (_, pairs) = lsm.range(&ranges)?;
        Ok((t.elapsed().as_secs_f64(), lookups, counts, pairs))
    };

    let full_before = lsm.full_level_count();
    let records_before = lsm.len();
    let (before_secs, l0, c0, p0) = run_queries(&lsm)?;

    let t = Instant::now();
    lsm.cleanup();
    let cleanup_secs = t.elapsed().as_secs_f64();
    lsm.check_invariants().map_err(LsmError::SpecInvalid)?;

    let (after_secs, l1, c1, p1) = run_queries(&lsm)?;
    if l0 != l1 || c0 != c1 || p0 != p1 {
        return Err(LsmError::SpecInvalid(
            "query results changed across cleanup".into(),
        ));
    }
    let full_after = lsm.full_level_count();
    assert!(full_after <= full_before);
    let records_after = lsm.len();

    // Rebuild-from-scratch comparison: bulk build of the surviving set.
    let alive = oracle.alive_pairs();
    let mut entries: Vec<UpdateEntry> = alive
        .iter()
        .map(|&(key, value)| UpdateEntry::Insert { key, value })
        .collect();
    let rebuild_secs = if entries.is_empty() {
        0.0
    } else {
        if entries.len() % b != 0 {
            let target = entries.len().div_ceil(b) * b;
            let last = *entries.last().unwrap();
            entries.resize(target, last);
        }
        let t = Instant::now();
        let rebuilt = Lsm::bulk_build(&entries, lsm.config())?;
        let secs = t.elapsed().as_secs_f64();
        drop(rebuilt);
        secs
    };

    let r = lsm.resident_batches();
    let rows = vec![
        ExperimentRow::new("cleanup-bench", "lsm", b, r, "cleanup_ms", cleanup_secs * 1e3),
        ExperimentRow::new("cleanup-bench", "lsm", b, r, "rebuild_ms", rebuild_secs * 1e3),
        ExperimentRow::new("cleanup-bench", "lsm", b, r, "query_before_ms", before_secs * 1e3),
        ExperimentRow::new("cleanup-bench", "lsm", b, r, "query_after_ms", after_secs * 1e3),
        ExperimentRow::new("cleanup-bench", "lsm", b, r, "full_levels_before", full_before as f64),
        ExperimentRow::new("cleanup-bench", "lsm", b, r, "full_levels_after", full_after as f64),
        ExperimentRow::new("cleanup-bench", "lsm", b, r, "records_before", records_before as f64),
        ExperimentRow::new("cleanup-bench", "lsm", b, r, "records_after", records_after as f64),
    ];
    Ok(rows)
}

/// Differential smoke test: random mixed schedules on duplicate-heavy key
/// alphabets, comparing the LSM, the sorted array, and the oracle after
/// every batch, with occupancy and merge-formula assertions. Returns the
/// number of comparisons performed.
pub fn run_diff_test(seed: u64, schedules: usize, batch_size: usize) -> Result<u64> {
    LsmConfig::new(batch_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0u64;
    for _ in 0..schedules {
        let alphabet = rng.gen_range(16..512u32);
        let n_batches = rng.gen_range(1..=12usize);
        let mut lsm = Lsm::with_batch_size(batch_size)?;
        let mut sa = SortedArray::with_batch_size(batch_size)?;
        let mut oracle = Oracle::new();

        for j in 0..n_batches {
            let batch: Vec<UpdateEntry> = (0..batch_size)
                .map(|_| {
                    let key = rng.gen_range(0..alphabet);
                    if rng.gen_bool(0.3) {
                        UpdateEntry::Delete { key }
                    } else {
                        UpdateEntry::Insert { key, value: rng.gen() }
                    }
                })
                .collect();

            let merged_before = lsm.stats().merged_records;
            lsm.update_batch(&batch)?;
            sa.update_batch(&batch)?;
            oracle.apply_batch(&batch);

            let delta = lsm.stats().merged_records - merged_before;
            if delta != 2 * batch_size as u64 * ((1u64 << ffz(j)) - 1) {
                return Err(LsmError::SpecInvalid(format!(
                    "merge-work formula violated at r={j}"
                )));
            }
            lsm.check_invariants().map_err(LsmError::SpecInvalid)?;
            sa.check_invariants().map_err(LsmError::SpecInvalid)?;

            for _ in 0..200 {
                let k = rng.gen_range(0..alphabet + 4);
                let expected = oracle.lookup(k);
                if lsm.lookup_one(k) != expected || sa.lookup_one(k) != expected {
                    return Err(LsmError::SpecInvalid(format!("lookup diverged on key {k}")));
                }
                checks += 1;
            }
            let queries: Vec<(u32, u32)> = (0..30)
                .map(|_| {
                    let k1 = rng.gen_range(0..alphabet);
                    (k1, k1 + rng.gen_range(0..alphabet / 4 + 1))
                })
                .collect();
            let expected: Vec<usize> = queries
                .iter()
                .map(|&(k1, k2)| oracle.count(k1, k2).unwrap())
                .collect();
            if lsm.count(&queries)? != expected || sa.count(&queries)? != expected {
                return Err(LsmError::SpecInvalid("count diverged".into()));
            }
            let expected_pairs: Vec<Vec<(u32, u32)>> = queries
                .iter()
                .map(|&(k1, k2)| oracle.range(k1, k2).unwrap())
                .collect();
            for (structure, (offsets, pairs)) in
                [lsm.range(&queries)?, sa.range(&queries)?].into_iter().enumerate()
            {
                for q in 0..queries.len() {
                    let end = offsets.get(q + 1).copied().unwrap_or(pairs.len());
                    if pairs[offsets[q]..end] != expected_pairs[q] {
                        return Err(LsmError::SpecInvalid(format!(
                            "range diverged on structure {structure} query {q}"
                        )));
                    }
                }
            }
            checks += 2 * queries.len() as u64;
        }
    }
    Ok(checks)
}
