//! Parallel scans over many series pairs with deterministic output order.
//!
//! The task index space (pair index for all-pairs, list position for pair
//! lists, series index for time mode) is cut into contiguous chunks. Workers
//! claim chunks from a shared counter, and the calling thread reassembles
//! finished chunks in index order before handing records to the sink, so the
//! output is identical for any worker count.

use std::collections::BTreeMap;
use std::io;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use log::info;

use crate::composition::{Composition, CompositionSpec};
use crate::correlation::{scan, scan_table, CompCorrValue, ScanOptions, ScanResult};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::filter::Filter;
use crate::segment::SegmentTable;
use crate::series::TimeSeries;

pub const DEFAULT_PAIR_MIN_PART: usize = 4;
pub const DEFAULT_TIME_MIN_PART: usize = 2;
pub const TIME_ID: &str = "time";

/// One output row of a multi-pair job.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub id_a: String,
    pub id_b: String,
    pub hcc: CompCorrValue,
    pub pearson: CompCorrValue,
    pub lcc: CompCorrValue,
    pub bcc: Option<Composition>,
    pub wcc: Option<Composition>,
}

impl PairRecord {
    pub fn from_scan(id_a: &str, id_b: &str, scan: &ScanResult) -> Self {
        Self {
            id_a: id_a.to_string(),
            id_b: id_b.to_string(),
            hcc: scan.hcc,
            pearson: scan.pearson,
            lcc: scan.lcc,
            bcc: scan.bcc.clone(),
            wcc: scan.wcc.clone(),
        }
    }
}

/// Destination for records, called in deterministic order from one thread.
pub trait RecordSink {
    fn accept(&mut self, record: &PairRecord) -> io::Result<()>;

    fn finish(&mut self) -> io::Result<()> {
        Ok(())
    }
}

impl RecordSink for Vec<PairRecord> {
    fn accept(&mut self, record: &PairRecord) -> io::Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub m: usize,
    pub filter: Filter,
    pub workers: usize,
    /// Tasks per chunk.
    pub chunk_size: usize,
    /// Log progress every this many tasks (0 disables).
    pub progress_every: u64,
    pub cancel: CancelToken,
}

impl JobConfig {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            filter: Filter::accept_all(),
            workers: 1,
            chunk_size: 512,
            progress_every: 10_000,
            cancel: CancelToken::default(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_filter(mut self, filter: Filter) -> Self {
        self.filter = filter;
        self
    }

    fn validate(&self, n: usize) -> Result<CompositionSpec> {
        if self.workers == 0 {
            return Err(Error::InvalidConfig(
                "worker count must be at least 1".into(),
            ));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidConfig("chunk size must be at least 1".into()));
        }
        CompositionSpec::new(n, self.m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    /// Tasks scanned.
    pub scanned: u64,
    /// Records that passed the filter and reached the sink.
    pub passed: u64,
    /// Tasks whose every compositional correlation was undefined.
    pub undefined: u64,
    /// Tasks scanned by each worker.
    pub per_worker: Vec<u64>,
    pub elapsed: Duration,
}

impl RunSummary {
    pub fn throughput(&self) -> f64 {
        let secs = self.elapsed.as_secs_f64();
        if secs > 0.0 {
            self.scanned as f64 / secs
        } else {
            f64::INFINITY
        }
    }
}

/// Number of unordered pairs among `s` series.
pub fn pair_count(s: usize) -> u64 {
    let s = s as u64;
    s * s.saturating_sub(1) / 2
}

/// The `k`-th unordered pair `(i, j)`, `i < j`, in row-major order.
pub fn pair_at(s: usize, k: u64) -> (usize, usize) {
    debug_assert!(k < pair_count(s));
    let s64 = s as u64;
    // pairs before row i
    let row_start = |i: u64| i * s64 - i * (i + 1) / 2;
    let (mut lo, mut hi) = (0u64, s64 - 1);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if row_start(mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = lo;
    let j = i + 1 + (k - row_start(i));
    (i as usize, j as usize)
}

struct ChunkOut {
    index: u64,
    worker: usize,
    records: Vec<PairRecord>,
    scanned: u64,
    undefined: u64,
}

fn run_tasks<'d, L, S>(
    total: u64,
    n: usize,
    config: &JobConfig,
    sink: &mut S,
    locate: L,
) -> Result<RunSummary>
where
    L: Fn(u64) -> (&'d TimeSeries, &'d TimeSeries) + Sync,
    S: RecordSink + ?Sized,
{
    let spec = config.validate(n)?;
    let started = Instant::now();
    let chunk = config.chunk_size as u64;
    let next_chunk = AtomicU64::new(0);
    let cancel = &config.cancel;
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::sync_channel::<Result<ChunkOut>>(config.workers * 2);

    let mut summary = RunSummary {
        scanned: 0,
        passed: 0,
        undefined: 0,
        per_worker: vec![0; config.workers],
        elapsed: Duration::ZERO,
    };
    let mut failure: Option<Error> = None;

    thread::scope(|scope| {
        for worker in 0..config.workers {
            let tx = tx.clone();
            let (locate, next_chunk, stop) = (&locate, &next_chunk, &stop);
            scope.spawn(move || {
                let mut table = SegmentTable::with_shape(spec.n(), spec.m());
                loop {
                    if stop.load(Ordering::Relaxed) || cancel.is_cancelled() {
                        break;
                    }
                    let index = next_chunk.fetch_add(1, Ordering::Relaxed);
                    let start = index.saturating_mul(chunk);
                    if start >= total {
                        break;
                    }
                    let end = (start + chunk).min(total);
                    let mut out = ChunkOut {
                        index,
                        worker,
                        records: Vec::new(),
                        scanned: 0,
                        undefined: 0,
                    };
                    let mut result = Ok(());
                    for k in start..end {
                        let (a, b) = locate(k);
                        table.fill(a.values(), b.values());
                        match scan_table(&table, ScanOptions::default()) {
                            Ok(r) => {
                                out.scanned += 1;
                                if r.n_evaluated == 0 {
                                    out.undefined += 1;
                                }
                                if config.filter.matches(r.hcc, r.pearson, r.lcc) {
                                    out.records.push(PairRecord::from_scan(a.id(), b.id(), &r));
                                }
                            }
                            Err(e) => {
                                result = Err(e);
                                break;
                            }
                        }
                    }
                    let msg = result.map(|()| out);
                    let failed = msg.is_err();
                    if tx.send(msg).is_err() || failed {
                        break;
                    }
                }
            });
        }
        drop(tx);

        // reassembly in chunk order
        let mut pending: BTreeMap<u64, ChunkOut> = BTreeMap::new();
        let mut next = 0u64;
        let mut last_report = 0u64;
        for msg in rx {
            let out = match msg {
                Ok(out) => out,
                Err(e) => {
                    failure.get_or_insert(e);
                    stop.store(true, Ordering::Relaxed);
                    continue;
                }
            };
            if failure.is_some() {
                continue;
            }
            pending.insert(out.index, out);
            while let Some(out) = pending.remove(&next) {
                next += 1;
                summary.scanned += out.scanned;
                summary.undefined += out.undefined;
                summary.per_worker[out.worker] += out.scanned;
                for rec in &out.records {
                    if let Err(source) = sink.accept(rec) {
                        failure = Some(Error::Sink {
                            written: summary.passed,
                            source,
                        });
                        stop.store(true, Ordering::Relaxed);
                        break;
                    }
                    summary.passed += 1;
                }
                if failure.is_some() {
                    break;
                }
                if config.progress_every > 0
                    && summary.scanned / config.progress_every > last_report / config.progress_every
                {
                    last_report = summary.scanned;
                    let rate = summary.scanned as f64 / started.elapsed().as_secs_f64().max(1e-9);
                    let eta = (total - summary.scanned) as f64 / rate;
                    info!(
                        "{}/{} scanned ({:.1}%), {:.0}/s, ETA {:.0}s",
                        summary.scanned,
                        total,
                        100.0 * summary.scanned as f64 / total as f64,
                        rate,
                        eta
                    );
                }
            }
        }
    });

    if let Some(e) = failure {
        return Err(e);
    }
    if summary.scanned < total {
        return Err(Error::Cancelled);
    }
    sink.finish().map_err(|source| Error::Sink {
        written: summary.passed,
        source,
    })?;
    summary.elapsed = started.elapsed();
    Ok(summary)
}

/// Scans every unordered pair `(i, j)`, `i < j`.
pub fn run_all_pairs<S: RecordSink + ?Sized>(
    dataset: &Dataset,
    config: &JobConfig,
    sink: &mut S,
) -> Result<RunSummary> {
    let series = dataset.series();
    let s = series.len();
    run_tasks(pair_count(s), dataset.n(), config, sink, |k| {
        let (i, j) = pair_at(s, k);
        (&series[i], &series[j])
    })
}

/// Scans the listed pairs in list order.
pub fn run_pair_list<S: RecordSink + ?Sized>(
    dataset: &Dataset,
    pairs: &[(String, String)],
    config: &JobConfig,
    sink: &mut S,
) -> Result<RunSummary> {
    let resolved = pairs
        .iter()
        .map(|(a, b)| Ok((dataset.get(a)?, dataset.get(b)?)))
        .collect::<Result<Vec<_>>>()?;
    run_tasks(resolved.len() as u64, dataset.n(), config, sink, |k| {
        resolved[k as usize]
    })
}

/// The series time is scanned against: the dataset's time labels when
/// present, else `0..n`.
pub fn time_series(dataset: &Dataset) -> Result<TimeSeries> {
    match dataset.time_labels() {
        Some(labels) => TimeSeries::new(TIME_ID, labels.to_vec()),
        None => TimeSeries::index(TIME_ID, dataset.n()),
    }
}

/// Scans each series against time, streaming to `sink`.
pub fn run_versus_time_into<S: RecordSink + ?Sized>(
    dataset: &Dataset,
    config: &JobConfig,
    sink: &mut S,
) -> Result<RunSummary> {
    let time = time_series(dataset)?;
    let series = dataset.series();
    run_tasks(series.len() as u64, dataset.n(), config, sink, |k| {
        (&series[k as usize], &time)
    })
}

/// One record per series, scanned against time.
pub fn run_versus_time(dataset: &Dataset, config: &JobConfig) -> Result<Vec<PairRecord>> {
    let mut records = Vec::with_capacity(dataset.len());
    run_versus_time_into(dataset, config, &mut records)?;
    Ok(records)
}

/// Full-detail scan of one pair looked up by id.
pub fn run_pair(
    dataset: &Dataset,
    id_a: &str,
    id_b: &str,
    m: usize,
    options: ScanOptions,
) -> Result<ScanResult> {
    let a = dataset.get(id_a)?;
    let b = dataset.get(id_b)?;
    scan(a, b, CompositionSpec::new(dataset.n(), m)?, options)
}
