//! Tab-separated result files.

use std::io::{self, Write};

use crate::composition::format_parts;
use crate::correlation::{CompCorrValue, Evaluation};
use crate::engine::{PairRecord, RecordSink};

pub const RECORD_HEADER: &str = "id_a\tid_b\thcc\tpearson\tlcc\tbcc\twcc";
pub const DISTRIBUTION_HEADER: &str = "composition\tr_c";
pub const CLOUD_HEADER: &str = "r_c\tvar_a\tvar_b\tcov";
pub const DEFAULT_PRECISION: usize = 6;

/// `Output.<dataset>.<idA>.<idB>.n<N>.m<M>.txt`
pub fn distribution_file_name(dataset: &str, id_a: &str, id_b: &str, n: usize, m: usize) -> String {
    format!("Output.{dataset}.{id_a}.{id_b}.n{n}.m{m}.txt")
}

fn render_composition(c: Option<&crate::Composition>) -> String {
    c.map_or_else(|| "NA".to_string(), |c| c.to_string())
}

pub fn format_record(record: &PairRecord, precision: usize) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
        record.id_a,
        record.id_b,
        record.hcc.render(precision),
        record.pearson.render(precision),
        record.lcc.render(precision),
        render_composition(record.bcc.as_ref()),
        render_composition(record.wcc.as_ref()),
    )
}

/// Writes pair records under the standard header.
pub struct RecordWriter<W: Write> {
    inner: W,
    precision: usize,
    written: u64,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(mut inner: W, precision: usize) -> io::Result<Self> {
        writeln!(inner, "{RECORD_HEADER}")?;
        Ok(Self {
            inner,
            precision,
            written: 0,
        })
    }

    pub fn written(&self) -> u64 {
        self.written
    }

    pub fn into_inner(mut self) -> io::Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

impl<W: Write> RecordSink for RecordWriter<W> {
    fn accept(&mut self, record: &PairRecord) -> io::Result<()> {
        writeln!(self.inner, "{}", format_record(record, self.precision))?;
        self.written += 1;
        Ok(())
    }

    fn finish(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Streams `composition<TAB>r_c` rows.
pub struct DistributionWriter<W: Write> {
    inner: W,
    precision: usize,
}

impl<W: Write> DistributionWriter<W> {
    pub fn new(mut inner: W, precision: usize) -> io::Result<Self> {
        writeln!(inner, "{DISTRIBUTION_HEADER}")?;
        Ok(Self { inner, precision })
    }

    pub fn row(&mut self, parts: &[usize], value: CompCorrValue) -> io::Result<()> {
        writeln!(
            self.inner,
            "{}\t{}",
            format_parts(parts),
            value.render(self.precision)
        )
    }

    pub fn into_inner(mut self) -> io::Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

/// Streams `r_c<TAB>var_a<TAB>var_b<TAB>cov` rows. Variances and covariances
/// are printed in scientific notation with `precision` fractional digits.
pub struct CloudWriter<W: Write> {
    inner: W,
    precision: usize,
    n: f64,
}

impl<W: Write> CloudWriter<W> {
    pub fn new(mut inner: W, precision: usize, n: usize) -> io::Result<Self> {
        writeln!(inner, "{CLOUD_HEADER}")?;
        Ok(Self {
            inner,
            precision,
            n: n as f64,
        })
    }

    pub fn row(&mut self, eval: &Evaluation) -> io::Result<()> {
        let p = self.precision;
        writeln!(
            self.inner,
            "{}\t{:.p$e}\t{:.p$e}\t{:.p$e}",
            eval.value.render(p),
            eval.sums.css_a / self.n,
            eval.sums.css_b / self.n,
            eval.sums.css_ab / self.n,
        )
    }

    pub fn into_inner(mut self) -> io::Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}
