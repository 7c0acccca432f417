//! Compositional correlation between time series.
//!
//! Every composition of the series length into contiguous parts of at least
//! `m` observations defines a correlation in which deviations are measured
//! from each part's own mean instead of the global mean. Scanning all of them
//! yields the highest and lowest compositional correlations (HCC/LCC) and the
//! compositions that attain them (BCC/WCC).

pub mod baselines;
pub mod composition;
pub mod correlation;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod filter;
pub mod output;
pub mod segment;
pub mod series;
pub mod synth;

pub use composition::{count, Composition, CompositionSpec, Compositions};
pub use correlation::{
    comp_correlation, comp_correlation_in, comp_covariance, comp_std_dev, comp_variance,
    part_correlations, scan, scan_table, scan_table_with, CloudPoint, CompCorrValue, Evaluation,
    ScanOptions, ScanResult,
};
pub use dataset::{load, Dataset, LoadOptions, LoadReport};
pub use engine::{
    run_all_pairs, run_pair, run_pair_list, run_versus_time, run_versus_time_into, JobConfig,
    PairRecord, RecordSink, RunSummary,
};
pub use error::{Error, Result};
pub use filter::Filter;
pub use segment::{SegmentSums, SegmentTable};
pub use series::TimeSeries;
pub use synth::{generate, SynthFunction, SynthSpec};
