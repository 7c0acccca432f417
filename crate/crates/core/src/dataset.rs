//! Delimited-text expression matrices: one series per row, id first.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone)]
pub struct Dataset {
    series: Vec<TimeSeries>,
    n: usize,
    time_labels: Option<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl Dataset {
    pub fn new(series: Vec<TimeSeries>, time_labels: Option<Vec<f64>>) -> Result<Self> {
        let first = series.first().ok_or(Error::EmptyDataset)?;
        let n = first.len();
        let mut index = HashMap::with_capacity(series.len());
        let mut dups = Vec::new();
        for (i, s) in series.iter().enumerate() {
            if s.len() != n {
                return Err(Error::MixedLengths {
                    id: s.id().to_string(),
                    len: s.len(),
                    expected: n,
                });
            }
            if index.insert(s.id().to_string(), i).is_some() && !dups.contains(&s.id().to_string())
            {
                dups.push(s.id().to_string());
            }
        }
        if !dups.is_empty() {
            return Err(Error::DuplicateIds(dups));
        }
        if let Some(labels) = &time_labels {
            if labels.len() != n || labels.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSeries {
                    id: "time".into(),
                    reason: format!("expected {n} finite time labels, got {}", labels.len()),
                });
            }
        }
        Ok(Self {
            series,
            n,
            time_labels,
            index,
        })
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Common series length.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time_labels(&self) -> Option<&[f64]> {
        self.time_labels.as_deref()
    }

    pub fn get(&self, id: &str) -> Result<&TimeSeries> {
        self.index
            .get(id)
            .map(|&i| &self.series[i])
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    /// Writes the tab-separated form read back by [`load`]. Values use the
    /// shortest exact representation unless `precision` is given.
    pub fn write_tsv<W: Write>(&self, mut w: W, precision: Option<usize>) -> std::io::Result<()> {
        let fmt_val = |v: f64| match precision {
            Some(p) => format!("{v:.p$}"),
            None => format!("{v}"),
        };
        write!(w, "id")?;
        match &self.time_labels {
            Some(labels) => labels.iter().try_for_each(|l| write!(w, "\t{l}"))?,
            None => (0..self.n).try_for_each(|i| write!(w, "\tt{i}"))?,
        }
        writeln!(w)?;
        for s in &self.series {
            write!(w, "{}", s.id())?;
            for &v in s.values() {
                write!(w, "\t{}", fmt_val(v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Field delimiter; auto-detected among tab, comma and semicolon when unset.
    pub delimiter: Option<char>,
    /// Whether the first line is a header; auto-detected when unset.
    pub header: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcludedRow {
    pub line: usize,
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadReport {
    pub rows_read: usize,
    pub excluded: Vec<ExcludedRow>,
    pub n: usize,
    pub delimiter: char,
    pub header: bool,
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let delim = match self.delimiter {
            '\t' => "tab".to_string(),
            c => format!("'{c}'"),
        };
        write!(
            f,
            "rows read: {}, rows excluded: {}, n: {}, delimiter: {}, header: {}",
            self.rows_read,
            self.excluded.len(),
            self.n,
            delim,
            if self.header { "yes" } else { "no" }
        )?;
        if !self.excluded.is_empty() {
            let ids: Vec<&str> = self.excluded.iter().map(|e| e.id.as_str()).collect();
            write!(f, " (excluded: {})", ids.join(", "))?;
        }
        Ok(())
    }
}

pub fn load(path: impl AsRef<Path>, options: LoadOptions) -> Result<(Dataset, LoadReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(BufReader::new(file), options).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

fn detect_delimiter(line: &str) -> char {
    [
        ('\t', line.matches('\t').count()),
        (',', line.matches(',').count()),
        (';', line.matches(';').count()),
    ]
    .into_iter()
    .fold(
        ('\t', 0),
        |best, cand| if cand.1 > best.1 { cand } else { best },
    )
    .0
}

fn parse_value(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses a delimited matrix from any reader.
pub fn parse<R: BufRead>(reader: R, options: LoadOptions) -> Result<(Dataset, LoadReport)> {
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: "<input>".into(),
            source,
        })?;
        let line = line.trim_end_matches('\r');
        if !line.trim().is_empty() {
            lines.push((i + 1, line.to_string()));
        }
    }
    let (_, first) = lines.first().ok_or(Error::EmptyDataset)?;
    let delimiter = options.delimiter.unwrap_or_else(|| detect_delimiter(first));
    let first_fields: Vec<&str> = first.split(delimiter).collect();
    if first_fields.len() < 3 {
        return Err(Error::Parse {
            line: lines[0].0,
            reason: format!(
                "expected an id and at least 2 values per row, found {} field(s)",
                first_fields.len()
            ),
        });
    }
    let width = first_fields.len();
    let header = options
        .header
        .unwrap_or_else(|| parse_value(first_fields[1]).is_none());
    let time_labels = if header {
        first_fields[1..]
            .iter()
            .map(|f| parse_value(f))
            .collect::<Option<Vec<f64>>>()
    } else {
        None
    };

    let mut series = Vec::new();
    let mut excluded = Vec::new();
    let mut seen = HashSet::new();
    let mut duplicates = Vec::new();
    let data = if header { &lines[1..] } else { &lines[..] };
    for (line_no, line) in data {
        let fields: Vec<&str> = line.split(delimiter).collect();
        if fields.len() != width {
            return Err(Error::Parse {
                line: *line_no,
                reason: format!("ragged row: {} fields, expected {width}", fields.len()),
            });
        }
        let id = fields[0].trim().to_string();
        let values: Vec<Option<f64>> = fields[1..].iter().map(|f| parse_value(f)).collect();
        if let Some(col) = values.iter().position(Option::is_none) {
            let reason = format!("missing or non-numeric value in column {}", col + 2);
            warn!("excluding row '{id}' (line {line_no}): {reason}");
            excluded.push(ExcludedRow {
                line: *line_no,
                id,
                reason,
            });
            continue;
        }
        if !seen.insert(id.clone()) {
            duplicates.push(id.clone());
        }
        series.push(TimeSeries::new(id, values.into_iter().flatten().collect())?);
    }
    if !duplicates.is_empty() {
        duplicates.dedup();
        return Err(Error::DuplicateIds(duplicates));
    }
    if series.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let report = LoadReport {
        rows_read: data.len(),
        excluded,
        n: width - 1,
        delimiter,
        header,
    };
    Ok((Dataset::new(series, time_labels)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(s: &str) -> Result<(Dataset, LoadReport)> {
        parse(s.as_bytes(), LoadOptions::default())
    }

    #[test]
    fn tsv_with_header() {
        let (ds, report) =
            parse_str("gene\tt1\tt2\tt3\nA\t1\t2\t3\nB\t2\t2\t1\nC\t0.5\t-1\t4e-1\n").unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.n(), 3);
        assert!(report.header);
        assert_eq!(report.delimiter, '\t');
        assert_eq!(ds.get("C").unwrap().values(), &[0.5, -1.0, 0.4]);
        assert!(ds.time_labels().is_none());
    }

    #[test]
    fn headerless_csv() {
        let (ds, report) = parse_str("A,1,2,3\nB,3,2,1\n").unwrap();
        assert!(!report.header);
        assert_eq!(report.delimiter, ',');
        assert_eq!(ds.series()[0].id(), "A");
    }

    #[test]
    fn semicolons_and_numeric_header_labels() {
        let opts = LoadOptions {
            delimiter: None,
            header: Some(true),
        };
        let (ds, report) = parse("id;40;50;60\nA;1;2;3\n".as_bytes(), opts).unwrap();
        assert_eq!(report.delimiter, ';');
        assert_eq!(ds.time_labels().unwrap(), &[40.0, 50.0, 60.0]);
    }

    #[test]
    fn missing_cells_exclude_the_row() {
        let (ds, report) =
            parse_str("id\ta\tb\tc\nA\t1\t2\t3\nB\t1\t\t3\nC\t1\tNA\t3\nD\t3\t2\t1\n").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(report.rows_read, 4);
        let ids: Vec<&str> = report.excluded.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, vec!["B", "C"]);
        assert!(report.to_string().contains("excluded: B, C"));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_str(""), Err(Error::EmptyDataset)));
        assert!(matches!(
            parse_str("id\ta\tb\nA\t\t1\n"),
            Err(Error::EmptyDataset)
        ));
        match parse_str("A\t1\t2\nB\t1\t2\t3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_str("A\t1\t2\nB\t1\t2\nA\t3\t4\n") {
            Err(Error::DuplicateIds(ids)) => assert_eq!(ids, vec!["A".to_string()]),
            other => panic!("{other:?}"),
        }
        assert!(parse_str("A\t1\n").is_err());
    }

    #[test]
    fn lookup_names_unknown_id() {
        let (ds, _) = parse_str("A\t1\t2\n").unwrap();
        assert_eq!(
            ds.get("ZZZ").unwrap_err().to_string(),
            "unknown series id 'ZZZ'"
        );
    }

    #[test]
    fn round_trip() {
        let text = "id\tt0\tt1\tt2\nA\t0.1\t-2.5\t3.0000001\nB\t1e-9\t2\t7\n";
        let (ds, _) = parse_str(text).unwrap();
        let mut out = Vec::new();
        ds.write_tsv(&mut out, None).unwrap();
        let (back, _) = parse(out.as_slice(), LoadOptions::default()).unwrap();
        for (x, y) in ds.series().iter().zip(back.series()) {
            assert_eq!(x, y);
        }

        let mut fixed = Vec::new();
        ds.write_tsv(&mut fixed, Some(3)).unwrap();
        let (back, _) = parse(fixed.as_slice(), LoadOptions::default()).unwrap();
        assert_eq!(back.get("A").unwrap().values(), &[0.1, -2.5, 3.0]);
    }

    #[test]
    fn round_trip_with_time_labels() {
        let series = vec![TimeSeries::new("g", vec![1.0, 2.0, 0.5]).unwrap()];
        let ds = Dataset::new(series, Some(vec![40.0, 50.0, 60.0])).unwrap();
        let mut out = Vec::new();
        ds.write_tsv(&mut out, None).unwrap();
        let opts = LoadOptions {
            delimiter: Some('\t'),
            header: Some(true),
        };
        let (back, _) = parse(out.as_slice(), opts).unwrap();
        assert_eq!(back.time_labels(), ds.time_labels());
        assert_eq!(back.series(), ds.series());
    }
}
