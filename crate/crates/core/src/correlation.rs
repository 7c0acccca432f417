//! Compositional variance, covariance and correlation, and the full scan over
//! every composition of a spec.

use std::fmt;

use crate::composition::{Composition, CompositionSpec};
use crate::error::{Error, Result};
use crate::segment::{SegmentSums, SegmentTable};
use crate::series::{check_same_length, TimeSeries};

/// Values this far past +/-1 are rounding and get clamped; anything further is a bug.
pub const CLAMP_SLACK: f64 = 1e-12;

/// A correlation value, or `Undefined` when either series has zero
/// (compositional) variance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum CompCorrValue {
    Defined(f64),
    Undefined,
}

impl CompCorrValue {
    pub fn get(self) -> Option<f64> {
        match self {
            Self::Defined(v) => Some(v),
            Self::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, Self::Defined(_))
    }

    /// Renders with `precision` decimals, `NA` when undefined.
    pub fn render(self, precision: usize) -> String {
        match self {
            Self::Defined(v) => format!("{v:.precision$}"),
            Self::Undefined => "NA".to_string(),
        }
    }

    /// `cov / sqrt(var_a * var_b)` with the undefined and clamping policy.
    /// Scale factors common to all three arguments cancel.
    pub fn from_moments(cov: f64, var_a: f64, var_b: f64) -> Result<Self> {
        if var_a == 0.0 || var_b == 0.0 {
            return Ok(Self::Undefined);
        }
        // sqrt(v*v) == v exactly, so identical series give exactly 1
        let prod = var_a * var_b;
        let denom = if prod.is_normal() {
            prod.sqrt()
        } else {
            var_a.sqrt() * var_b.sqrt()
        };
        let r = cov / denom;
        if r.abs() <= 1.0 {
            return Ok(Self::Defined(r));
        }
        if r.abs() - 1.0 <= CLAMP_SLACK {
            return Ok(Self::Defined(r.signum()));
        }
        Err(Error::Internal(format!(
            "correlation {r} outside [-1, 1] (cov={cov}, var_a={var_a}, var_b={var_b})"
        )))
    }
}

impl fmt::Display for CompCorrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Defined(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            Self::Undefined => f.write_str("NA"),
        }
    }
}

#[inline]
fn add(acc: SegmentSums, s: SegmentSums) -> SegmentSums {
    SegmentSums {
        css_a: acc.css_a + s.css_a,
        css_b: acc.css_b + s.css_b,
        css_ab: acc.css_ab + s.css_ab,
    }
}

/// Sums the part contributions of `c`, left to right.
fn composition_sums(table: &SegmentTable, c: &Composition) -> Result<SegmentSums> {
    c.check_length(table.n())?;
    let mut acc = SegmentSums::default();
    for (start, len) in c.segments() {
        acc = add(acc, table.segment_contrib(start, len)?);
    }
    Ok(acc)
}

fn pair_table(a: &TimeSeries, b: &TimeSeries, c: &Composition) -> Result<SegmentTable> {
    let n = check_same_length(a, b)?;
    c.check_length(n)?;
    let min_part = c.parts().iter().copied().min().unwrap_or(1);
    SegmentTable::build(a, b, min_part)
}

/// Mean squared deviation of each observation from its own part's mean.
pub fn comp_variance(a: &TimeSeries, c: &Composition) -> Result<f64> {
    let table = pair_table(a, a, c)?;
    Ok(composition_sums(&table, c)?.css_a / a.len() as f64)
}

pub fn comp_std_dev(a: &TimeSeries, c: &Composition) -> Result<f64> {
    comp_variance(a, c).map(f64::sqrt)
}

/// Mean product of within-part deviations of `a` and `b`.
pub fn comp_covariance(a: &TimeSeries, b: &TimeSeries, c: &Composition) -> Result<f64> {
    let table = pair_table(a, b, c)?;
    Ok(composition_sums(&table, c)?.css_ab / a.len() as f64)
}

pub fn comp_correlation(a: &TimeSeries, b: &TimeSeries, c: &Composition) -> Result<CompCorrValue> {
    let table = pair_table(a, b, c)?;
    comp_correlation_in(&table, c)
}

/// Compositional correlation of `c` using a prebuilt table.
pub fn comp_correlation_in(table: &SegmentTable, c: &Composition) -> Result<CompCorrValue> {
    let s = composition_sums(table, c)?;
    CompCorrValue::from_moments(s.css_ab, s.css_a, s.css_b)
}

/// Plain Pearson correlation of each part of `c`.
pub fn part_correlations(
    a: &TimeSeries,
    b: &TimeSeries,
    c: &Composition,
) -> Result<Vec<CompCorrValue>> {
    let table = pair_table(a, b, c)?;
    c.segments()
        .map(|(start, len)| {
            let s = table.segment_contrib(start, len)?;
            CompCorrValue::from_moments(s.css_ab, s.css_a, s.css_b)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanOptions {
    /// Keep every `(composition, r_c)`.
    pub distribution: bool,
    /// Keep every `(r_c, var_a, var_b, cov)`.
    pub clouds: bool,
}

/// One point of the variance/covariance clouds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint {
    pub r_c: CompCorrValue,
    pub var_a: f64,
    pub var_b: f64,
    pub cov: f64,
}

/// What the scan visitor sees for each composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: CompCorrValue,
    /// Summed centered sums over all parts (divide by n for Var_c/Cov_c).
    pub sums: SegmentSums,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub hcc: CompCorrValue,
    pub lcc: CompCorrValue,
    pub bcc: Option<Composition>,
    pub wcc: Option<Composition>,
    pub pearson: CompCorrValue,
    pub n_evaluated: u64,
    pub n_undefined: u64,
    pub distribution: Option<Vec<(Composition, CompCorrValue)>>,
    pub clouds: Option<Vec<CloudPoint>>,
}

/// Scans every composition of `spec` and reports the extremes.
pub fn scan(
    a: &TimeSeries,
    b: &TimeSeries,
    spec: CompositionSpec,
    options: ScanOptions,
) -> Result<ScanResult> {
    let n = check_same_length(a, b)?;
    if n != spec.n() {
        return Err(Error::InvalidSpec {
            n: spec.n(),
            m: spec.m(),
            reason: "spec length differs from the series length",
        });
    }
    let table = SegmentTable::build(a, b, spec.m())?;
    scan_table(&table, options)
}

pub fn scan_table(table: &SegmentTable, options: ScanOptions) -> Result<ScanResult> {
    let n = table.n() as f64;
    let mut distribution = options.distribution.then(Vec::new);
    let mut clouds = options.clouds.then(Vec::new);
    let mut result = if distribution.is_none() && clouds.is_none() {
        scan_table_with(table, |_, _| {})?
    } else {
        scan_table_with(table, |parts, eval| {
            if let Some(d) = distribution.as_mut() {
                d.push((Composition::from(parts), eval.value));
            }
            if let Some(c) = clouds.as_mut() {
                c.push(CloudPoint {
                    r_c: eval.value,
                    var_a: eval.sums.css_a / n,
                    var_b: eval.sums.css_b / n,
                    cov: eval.sums.css_ab / n,
                });
            }
        })?
    };
    result.distribution = distribution;
    result.clouds = clouds;
    Ok(result)
}

/// Scans every composition in canonical order, calling `visit` for each.
///
/// Part sums are accumulated left to right along a depth-first walk, so each
/// value is bit-identical to [`comp_correlation_in`] for the same composition.
pub fn scan_table_with<F>(table: &SegmentTable, visit: F) -> Result<ScanResult>
where
    F: FnMut(&[usize], &Evaluation),
{
    let mut walker = Walker {
        table,
        n: table.n(),
        m: table.m(),
        parts: Vec::with_capacity(table.n() / table.m() + 1),
        visit,
        hcc: f64::NEG_INFINITY,
        lcc: f64::INFINITY,
        bcc: Vec::new(),
        wcc: Vec::new(),
        pearson: CompCorrValue::Undefined,
        n_evaluated: 0,
        n_undefined: 0,
        error: None,
    };
    walker.descend(0, SegmentSums::default());
    if let Some(e) = walker.error {
        return Err(e);
    }
    let defined = walker.n_evaluated > 0;
    let pick = |v: f64, parts: Vec<usize>| {
        if defined {
            (
                CompCorrValue::Defined(v),
                Some(Composition::from(parts.as_slice())),
            )
        } else {
            (CompCorrValue::Undefined, None)
        }
    };
    let (hcc, bcc) = pick(walker.hcc, walker.bcc);
    let (lcc, wcc) = pick(walker.lcc, walker.wcc);
    Ok(ScanResult {
        hcc,
        lcc,
        bcc,
        wcc,
        pearson: walker.pearson,
        n_evaluated: walker.n_evaluated,
        n_undefined: walker.n_undefined,
        distribution: None,
        clouds: None,
    })
}

struct Walker<'t, F> {
    table: &'t SegmentTable,
    n: usize,
    m: usize,
    parts: Vec<usize>,
    visit: F,
    hcc: f64,
    lcc: f64,
    bcc: Vec<usize>,
    wcc: Vec<usize>,
    pearson: CompCorrValue,
    n_evaluated: u64,
    n_undefined: u64,
    error: Option<Error>,
}

impl<F> Walker<'_, F>
where
    F: FnMut(&[usize], &Evaluation),
{
    fn descend(&mut self, start: usize, acc: SegmentSums) {
        let rem = self.n - start;
        // Parts m..=rem-m leave a composable tail; the part `rem` closes the
        // composition and comes last in lexicographic order.
        let last_open = rem.saturating_sub(self.m);
        for len in self.m..=last_open {
            if self.error.is_some() {
                return;
            }
            let next = add(acc, self.table.get(start, len));
            self.parts.push(len);
            self.descend(start + len, next);
            self.parts.pop();
        }
        if self.error.is_some() {
            return;
        }
        let total = add(acc, self.table.get(start, rem));
        self.parts.push(rem);
        self.leaf(total);
        self.parts.pop();
    }

    #[inline]
    fn leaf(&mut self, sums: SegmentSums) {
        let value = match CompCorrValue::from_moments(sums.css_ab, sums.css_a, sums.css_b) {
            Ok(v) => v,
            Err(e) => {
                self.error = Some(e);
                return;
            }
        };
        match value {
            CompCorrValue::Defined(r) => {
                self.n_evaluated += 1;
                if r > self.hcc {
                    self.hcc = r;
                    self.bcc.clear();
                    self.bcc.extend_from_slice(&self.parts);
                }
                if r < self.lcc {
                    self.lcc = r;
                    self.wcc.clear();
                    self.wcc.extend_from_slice(&self.parts);
                }
            }
            CompCorrValue::Undefined => self.n_undefined += 1,
        }
        if self.parts.len() == 1 {
            self.pearson = value;
        }
        (self.visit)(&self.parts, &Evaluation { value, sums });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::count;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new("s", v.to_vec()).unwrap()
    }

    fn comp(p: &[usize]) -> Composition {
        Composition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn variance_examples() {
        assert_eq!(
            comp_variance(&ts(&[1.0, 1.0, 2.0, 2.0]), &comp(&[2, 2])).unwrap(),
            0.0
        );
        assert!(
            (comp_variance(&ts(&[1.0, 2.0, 3.0, 4.0]), &comp(&[4])).unwrap() - 1.25).abs() < 1e-15
        );
        // deviations are +/-0.5 at all four points: 4 * 0.25 / 4
        assert!(
            (comp_variance(&ts(&[1.0, 2.0, 3.0, 4.0]), &comp(&[2, 2])).unwrap() - 0.25).abs()
                < 1e-15
        );
        assert!(
            (comp_std_dev(&ts(&[1.0, 2.0, 3.0, 4.0]), &comp(&[4])).unwrap() - 1.25f64.sqrt()).abs()
                < 1e-15
        );
    }

    #[test]
    fn covariance_of_reversal() {
        let a = ts(&[1.0, 2.0, 3.0, 4.0]);
        let b = ts(&[4.0, 3.0, 2.0, 1.0]);
        assert!((comp_covariance(&a, &b, &comp(&[4])).unwrap() + 1.25).abs() < 1e-15);
    }

    #[test]
    fn two_point_cases() {
        let c = comp(&[2]);
        let r = |a: &[f64], b: &[f64]| comp_correlation(&ts(a), &ts(b), &c).unwrap();
        assert_eq!(r(&[1.0, 2.0], &[5.0, 9.0]), CompCorrValue::Defined(1.0));
        assert_eq!(r(&[1.0, 2.0], &[9.0, 5.0]), CompCorrValue::Defined(-1.0));
        assert_eq!(r(&[1.0, 2.0], &[7.0, 7.0]), CompCorrValue::Undefined);
        assert_eq!(r(&[3.0, 3.0], &[7.0, 7.0]), CompCorrValue::Undefined);
    }

    #[test]
    fn square_is_uncorrelated_with_symmetric_grid() {
        let x: Vec<f64> = (-15..=15).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let r = comp_correlation(&ts(&x), &ts(&y), &comp(&[31]))
            .unwrap()
            .get()
            .unwrap();
        assert!(r.abs() < 1e-12, "{r}");
    }

    #[test]
    fn composition_must_cover_series() {
        let a = ts(&[1.0, 2.0, 3.0, 4.0]);
        assert!(comp_variance(&a, &comp(&[2, 3])).is_err());
        assert!(comp_correlation(&a, &ts(&[1.0, 2.0, 3.0]), &comp(&[3])).is_err());
    }

    #[test]
    fn clamp_policy() {
        assert_eq!(
            CompCorrValue::from_moments(1.0 + 5e-13, 1.0, 1.0).unwrap(),
            CompCorrValue::Defined(1.0)
        );
        assert_eq!(
            CompCorrValue::from_moments(-1.0 - 5e-13, 1.0, 1.0).unwrap(),
            CompCorrValue::Defined(-1.0)
        );
        assert!(CompCorrValue::from_moments(1.0 + 1e-9, 1.0, 1.0).is_err());
    }

    #[test]
    fn scan_of_identical_series() {
        let a = ts(&[0.3, 1.2, -0.4, 2.2, 0.9, 1.1, -1.0, 0.0, 0.5]);
        let spec = CompositionSpec::new(9, 2).unwrap();
        let r = scan(
            &a,
            &a,
            spec,
            ScanOptions {
                distribution: true,
                clouds: false,
            },
        )
        .unwrap();
        assert_eq!(r.hcc, CompCorrValue::Defined(1.0));
        assert_eq!(r.lcc, CompCorrValue::Defined(1.0));
        assert_eq!(r.n_evaluated as u128, count(9, 2).unwrap());
        assert!(r
            .distribution
            .unwrap()
            .iter()
            .all(|(_, v)| *v == CompCorrValue::Defined(1.0)));
        // ties resolve to the first composition in canonical order
        assert_eq!(r.bcc.unwrap().parts(), &[2, 2, 2, 3]);
    }

    #[test]
    fn scan_of_constant_series_is_all_undefined() {
        let a = ts(&[2.0; 8]);
        let b = ts(&[1.0, 3.0, 2.0, 5.0, 4.0, 4.5, 0.0, 1.0]);
        let spec = CompositionSpec::new(8, 2).unwrap();
        let r = scan(&a, &b, spec, ScanOptions::default()).unwrap();
        assert_eq!(r.hcc, CompCorrValue::Undefined);
        assert_eq!(r.lcc, CompCorrValue::Undefined);
        assert_eq!(r.pearson, CompCorrValue::Undefined);
        assert!(r.bcc.is_none() && r.wcc.is_none());
        assert_eq!(r.n_evaluated, 0);
        assert_eq!(r.n_undefined, 13);
    }

    #[test]
    fn partially_undefined_scan_counts_both() {
        // b is constant on its first two observations only
        let a = ts(&[1.0, 2.0, 4.0, 3.0, 5.0, 6.0]);
        let b = ts(&[7.0, 7.0, 1.0, 2.0, 0.0, 3.0]);
        let spec = CompositionSpec::new(6, 2).unwrap();
        let r = scan(
            &a,
            &b,
            spec,
            ScanOptions {
                distribution: true,
                clouds: true,
            },
        )
        .unwrap();
        assert_eq!(r.n_evaluated + r.n_undefined, 5);
        let dist = r.distribution.unwrap();
        assert_eq!(dist.len(), 5);
        assert_eq!(r.clouds.unwrap().len(), 5);
        for (c, v) in &dist {
            assert_eq!(*v, comp_correlation(&a, &b, c).unwrap());
        }
    }

    #[test]
    fn scan_rejects_spec_mismatch() {
        let a = ts(&[1.0, 2.0, 3.0, 4.0]);
        let spec = CompositionSpec::new(5, 2).unwrap();
        assert!(scan(&a, &a, spec, ScanOptions::default()).is_err());
    }

    #[test]
    fn part_correlations_per_part() {
        let a = ts(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = ts(&[1.0, 2.0, 3.0, 3.0, 2.0, 1.0]);
        let got = part_correlations(&a, &b, &comp(&[3, 3])).unwrap();
        assert_eq!(
            got,
            vec![CompCorrValue::Defined(1.0), CompCorrValue::Defined(-1.0)]
        );
    }

    #[test]
    fn render_forms() {
        assert_eq!(CompCorrValue::Defined(0.5).render(3), "0.500");
        assert_eq!(CompCorrValue::Undefined.render(3), "NA");
        assert_eq!(format!("{:.2}", CompCorrValue::Defined(0.123)), "0.12");
    }
}
