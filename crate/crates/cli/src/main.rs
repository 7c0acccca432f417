use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use compcorr::engine::{self, DEFAULT_PAIR_MIN_PART, DEFAULT_TIME_MIN_PART};
use compcorr::output::{
    distribution_file_name, CloudWriter, DistributionWriter, RecordWriter, DEFAULT_PRECISION,
};
use compcorr::{
    count, generate, load, part_correlations, run_all_pairs, run_versus_time_into, scan_table_with,
    CompCorrValue, CompositionSpec, Dataset, Filter, JobConfig, LoadOptions, ScanResult,
    SegmentTable, SynthFunction, SynthSpec, TimeSeries,
};

#[derive(Parser)]
#[command(
    name = "compcorr",
    version,
    about = "Compositional correlation scans over time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan one pair and write its full distribution
    Pair(PairArgs),
    /// Scan every unordered pair of series
    AllPairs(AllPairsArgs),
    /// Scan every series against time
    TimeCorr(TimeArgs),
    /// Generate a synthetic curve and scan y against x
    Synth(SynthArgs),
    /// Export variance/covariance clouds for one pair
    Clouds(CloudArgs),
    /// Print the number of compositions of N with parts >= M
    Count(CountArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Delimited matrix: id column followed by one column per time point
    #[arg(short, long)]
    input: PathBuf,
    /// Field delimiter (detected from the first line by default)
    #[arg(long)]
    delimiter: Option<char>,
    /// Treat the first line as a header
    #[arg(long, conflicts_with = "no_header")]
    header: bool,
    /// Treat the first line as data
    #[arg(long)]
    no_header: bool,
}

impl InputArgs {
    fn load(&self) -> Result<(Dataset, String)> {
        let header = match (self.header, self.no_header) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        };
        let options = LoadOptions {
            delimiter: self.delimiter,
            header,
        };
        let (ds, report) = load(&self.input, options)?;
        log::info!("{}: {report}", self.input.display());
        for row in &report.excluded {
            log::warn!("line {}: excluded '{}': {}", row.line, row.id, row.reason);
        }
        let stem = self.input.file_stem().map_or_else(
            || "dataset".to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        Ok((ds, stem))
    }
}

#[derive(Args)]
struct Common {
    /// Minimum part size M (>= 2)
    #[arg(short = 'm', long, value_parser = clap::value_parser!(u64).range(2..))]
    min_part: Option<u64>,
    /// Decimal places in written values
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

impl Common {
    fn m(&self, default: usize) -> usize {
        self.min_part.map_or(default, |m| m as usize)
    }
}

#[derive(Args)]
struct PairArgs {
    id_a: String,
    id_b: String,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: Common,
    /// Directory for the distribution file
    #[arg(short, long, default_value = ".")]
    output: PathBuf,
}

#[derive(Args)]
struct JobArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: Common,
    /// Record file ("-" for standard output)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores)
    #[arg(short = 'j', long, env = "COMP_CORR_THREADS")]
    threads: Option<usize>,
    /// Keep only records matching e.g. "hcc>0.9 AND abs(pearson)<0.1"
    #[arg(long)]
    filter: Option<Filter>,
}

impl JobArgs {
    fn config(&self, m: usize) -> Result<JobConfig> {
        let workers = match self.threads {
            Some(0) => bail!("--threads must be at least 1"),
            Some(k) => k,
            None => std::thread::available_parallelism().map_or(1, |p| p.get()),
        };
        let mut config = JobConfig::new(m).with_workers(workers);
        if let Some(f) = &self.filter {
            config = config.with_filter(f.clone());
        }
        Ok(config)
    }
}

#[derive(Args)]
struct AllPairsArgs {
    #[command(flatten)]
    job: JobArgs,
    /// Also write the full distribution of every record that passes the filter,
    /// next to the record file
    #[arg(long)]
    emit_distribution: bool,
}

#[derive(Args)]
struct TimeArgs {
    #[command(flatten)]
    job: JobArgs,
}

#[derive(Args)]
struct CurveArgs {
    /// square, cubic_minus_x, quartic or monotone_cubic
    #[arg(short, long, default_value = "square")]
    function: SynthFunction,
    /// Sampling range LO:HI (defaults to the function's calibrated range)
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: Option<(f64, f64)>,
    /// Number of equal intervals; the curve has pieces + 1 points
    #[arg(long, default_value_t = 30)]
    pieces: usize,
}

impl CurveArgs {
    fn generate(&self) -> Result<(SynthSpec, TimeSeries, TimeSeries)> {
        let spec = match self.range {
            Some((lo, hi)) => SynthSpec::new(self.function, lo, hi, self.pieces)?,
            None => SynthSpec::with_default_range(self.function, self.pieces)?,
        };
        let (x, y) = generate(&spec)?;
        Ok((spec, x, y))
    }
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound '{lo}'"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad upper bound '{hi}'"))?;
    Ok((lo, hi))
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[command(flatten)]
    common: Common,
    /// Write the generated x and y series as a dataset
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the full distribution into this directory
    #[arg(long, value_name = "DIR")]
    emit_distribution: Option<PathBuf>,
}

#[derive(Args)]
struct CloudArgs {
    /// Series ids (default: y and x of the synthetic curve)
    ids: Vec<String>,
    /// Read the pair from a dataset instead of generating a curve
    #[arg(short, long)]
    input: Option<PathBuf>,
    #[arg(long)]
    delimiter: Option<char>,
    #[arg(long, conflicts_with = "no_header")]
    header: bool,
    #[arg(long)]
    no_header: bool,
    #[command(flatten)]
    curve: CurveArgs,
    #[command(flatten)]
    common: Common,
    /// Cloud file ("-" for standard output)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    n: usize,
    #[arg(short = 'm', long, default_value_t = 2)]
    min_part: usize,
}

/// Output file written under `<path>.partial` and renamed once complete,
/// so an aborted run never leaves a file that looks finished.
struct Output {
    target: Option<(PathBuf, PathBuf)>,
    writer: Box<dyn Write>,
}

impl Output {
    fn create(path: &Path) -> Result<Self> {
        if path == Path::new("-") {
            return Ok(Self {
                target: None,
                writer: Box::new(BufWriter::new(io::stdout().lock())),
            });
        }
        let mut partial = path.as_os_str().to_owned();
        partial.push(".partial");
        let partial = PathBuf::from(partial);
        let file =
            File::create(&partial).with_context(|| format!("creating {}", partial.display()))?;
        Ok(Self {
            target: Some((partial, path.to_path_buf())),
            writer: Box::new(BufWriter::new(file)),
        })
    }

    fn commit(mut self) -> Result<()> {
        self.writer.flush()?;
        drop(self.writer);
        if let Some((partial, path)) = self.target {
            fs::rename(&partial, &path)
                .with_context(|| format!("renaming {}", partial.display()))?;
        }
        Ok(())
    }
}

impl Write for Output {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.writer.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

/// Streams every composition's value to `path`, returning the scan summary.
fn write_distribution(
    a: &TimeSeries,
    b: &TimeSeries,
    m: usize,
    precision: usize,
    path: &Path,
) -> Result<ScanResult> {
    CompositionSpec::new(a.len(), m)?;
    let table = SegmentTable::build(a, b, m)?;
    let mut writer = DistributionWriter::new(Output::create(path)?, precision)?;
    let mut failure = None;
    let result = scan_table_with(&table, |parts, eval| {
        if failure.is_none() {
            failure = writer.row(parts, eval.value).err();
        }
    })?;
    if let Some(e) = failure {
        return Err(e).with_context(|| format!("writing {}", path.display()));
    }
    writer.into_inner()?.commit()?;
    Ok(result)
}

fn render_parts(values: &[CompCorrValue], precision: usize) -> String {
    values
        .iter()
        .map(|v| v.render(precision))
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_summary(a: &TimeSeries, b: &TimeSeries, r: &ScanResult, precision: usize) -> Result<()> {
    println!("pair     {} vs {}", a.id(), b.id());
    println!(
        "compositions evaluated {}, undefined {}",
        r.n_evaluated, r.n_undefined
    );
    println!("HCC      {}", r.hcc.render(precision));
    println!("r        {}", r.pearson.render(precision));
    println!("LCC      {}", r.lcc.render(precision));
    for (label, c) in [("BCC", &r.bcc), ("WCC", &r.wcc)] {
        match c {
            Some(c) => {
                let parts = part_correlations(a, b, c)?;
                println!(
                    "{label}      {c}  part r: {}",
                    render_parts(&parts, precision)
                );
            }
            None => println!("{label}      NA"),
        }
    }
    Ok(())
}

fn pair(args: PairArgs) -> Result<()> {
    let (ds, stem) = args.input.load()?;
    let m = args.common.m(DEFAULT_PAIR_MIN_PART);
    CompositionSpec::new(ds.n(), m)?;
    let (a, b) = (ds.get(&args.id_a)?, ds.get(&args.id_b)?);
    let path = args
        .output
        .join(distribution_file_name(&stem, a.id(), b.id(), ds.n(), m));
    let result = write_distribution(a, b, m, args.common.precision, &path)?;
    print_summary(a, b, &result, args.common.precision)?;
    println!("distribution written to {}", path.display());
    Ok(())
}

fn run_job(
    job: &JobArgs,
    stem: &str,
    kind: &str,
    m: usize,
    ds: &Dataset,
) -> Result<(PathBuf, Output)> {
    CompositionSpec::new(ds.n(), m)?;
    let path = job
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.{kind}.m{m}.tsv")));
    let out = Output::create(&path)?;
    Ok((path, out))
}

fn report(summary: &engine::RunSummary, path: &Path) {
    let line = format!(
        "scanned {} ({} with undefined values), wrote {} records to {} in {:.2?} ({:.0}/s)",
        summary.scanned,
        summary.undefined,
        summary.passed,
        path.display(),
        summary.elapsed,
        summary.throughput()
    );
    // keep standard output clean when records are streamed there
    if path == Path::new("-") {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn all_pairs(args: AllPairsArgs) -> Result<()> {
    let job = &args.job;
    let (ds, stem) = job.input.load()?;
    let m = job.common.m(DEFAULT_PAIR_MIN_PART);
    let config = job.config(m)?;
    let (path, out) = run_job(job, &stem, "pairs", m, &ds)?;
    let mut records = Vec::new();
    let mut writer = RecordWriter::new(out, job.common.precision)?;
    let summary = if args.emit_distribution {
        let mut tee = Tee(&mut writer, &mut records);
        run_all_pairs(&ds, &config, &mut tee)?
    } else {
        run_all_pairs(&ds, &config, &mut writer)?
    };
    writer.into_inner()?.commit()?;
    report(&summary, &path);
    if args.emit_distribution {
        let dir = match path.parent() {
            Some(p) if path != Path::new("-") => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        for rec in &records {
            let (a, b) = (ds.get(&rec.id_a)?, ds.get(&rec.id_b)?);
            let file = dir.join(distribution_file_name(&stem, a.id(), b.id(), ds.n(), m));
            write_distribution(a, b, m, job.common.precision, &file)?;
        }
        println!(
            "wrote {} distribution files to {}",
            records.len(),
            dir.display()
        );
    }
    Ok(())
}

struct Tee<'a, A, B>(&'a mut A, &'a mut B);

impl<A: engine::RecordSink, B: engine::RecordSink> engine::RecordSink for Tee<'_, A, B> {
    fn accept(&mut self, record: &engine::PairRecord) -> io::Result<()> {
        self.0.accept(record)?;
        self.1.accept(record)
    }

    fn finish(&mut self) -> io::Result<()> {
        self.0.finish()?;
        self.1.finish()
    }
}

fn time_corr(args: TimeArgs) -> Result<()> {
    let job = &args.job;
    let (ds, stem) = job.input.load()?;
    let m = job.common.m(DEFAULT_TIME_MIN_PART);
    let config = job.config(m)?;
    let (path, out) = run_job(job, &stem, "time", m, &ds)?;
    let mut writer = RecordWriter::new(out, job.common.precision)?;
    let summary = run_versus_time_into(&ds, &config, &mut writer)?;
    writer.into_inner()?.commit()?;
    report(&summary, &path);
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let (spec, x, y) = args.curve.generate()?;
    let m = args.common.m(2);
    let precision = args.common.precision;
    if let Some(path) = &args.output {
        let ds = Dataset::new(vec![x.clone(), y.clone()], None)?;
        let mut out = Output::create(path)?;
        ds.write_tsv(&mut out, None)?;
        out.commit()?;
    }
    println!(
        "{} on [{}, {}], {} pieces, n = {}, m = {}",
        spec.function,
        spec.x_min,
        spec.x_max,
        spec.pieces,
        spec.n(),
        m
    );
    let result = match &args.emit_distribution {
        Some(dir) => {
            let name = distribution_file_name(spec.function.name(), "y", "x", spec.n(), m);
            let path = dir.join(name);
            let r = write_distribution(&y, &x, m, precision, &path)?;
            println!("distribution written to {}", path.display());
            r
        }
        None => compcorr::scan(
            &y,
            &x,
            CompositionSpec::new(spec.n(), m)?,
            Default::default(),
        )?,
    };
    print_summary(&y, &x, &result, precision)
}

fn clouds(args: CloudArgs) -> Result<()> {
    let m = args.common.m(2);
    let (name, a, b) = match &args.input {
        Some(input) => {
            let [id_a, id_b] = args.ids.as_slice() else {
                bail!("clouds with --input needs exactly two series ids");
            };
            let input = InputArgs {
                input: input.clone(),
                delimiter: args.delimiter,
                header: args.header,
                no_header: args.no_header,
            };
            let (ds, stem) = input.load()?;
            (stem, ds.get(id_a)?.clone(), ds.get(id_b)?.clone())
        }
        None => {
            let (spec, x, y) = args.curve.generate()?;
            let pick = |id: &str| match id {
                "x" => Ok(x.clone()),
                "y" => Ok(y.clone()),
                other => bail!("synthetic curves only have series 'x' and 'y', not '{other}'"),
            };
            let (a, b) = match args.ids.as_slice() {
                [] => (y.clone(), x.clone()),
                [id_a, id_b] => (pick(id_a)?, pick(id_b)?),
                _ => bail!("expected zero or two series ids"),
            };
            (spec.function.name().to_string(), a, b)
        }
    };
    let n = a.len();
    CompositionSpec::new(n, m)?;
    let path = args.output.clone().unwrap_or_else(|| {
        PathBuf::from(format!("Clouds.{name}.{}.{}.n{n}.m{m}.txt", a.id(), b.id()))
    });
    let table = SegmentTable::build(&a, &b, m)?;
    let mut writer = CloudWriter::new(Output::create(&path)?, args.common.precision, n)?;
    let mut failure = None;
    let mut rows = 0u64;
    scan_table_with(&table, |_, eval| {
        if failure.is_none() {
            failure = writer.row(eval).err();
            rows += 1;
        }
    })?;
    if let Some(e) = failure {
        return Err(e).with_context(|| format!("writing {}", path.display()));
    }
    writer.into_inner()?.commit()?;
    println!("wrote {rows} cloud points to {}", path.display());
    Ok(())
}

fn count_cmd(args: CountArgs) -> Result<()> {
    CompositionSpec::new(args.n, args.min_part)?;
    println!("{}", count(args.n, args.min_part)?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Pair(a) => pair(a),
        Command::AllPairs(a) => all_pairs(a),
        Command::TimeCorr(a) => time_corr(a),
        Command::Synth(a) => synth(a),
        Command::Clouds(a) => clouds(a),
        Command::Count(a) => count_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
