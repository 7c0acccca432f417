//! Reference dependence measures: Pearson, Spearman and distance correlation.

use crate::correlation::CompCorrValue;
use crate::error::Result;
use crate::series::{check_same_length, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineReport {
    pub pearson: CompCorrValue,
    pub spearman: CompCorrValue,
    pub distance_correlation: f64,
}

pub fn report(a: &TimeSeries, b: &TimeSeries) -> Result<BaselineReport> {
    Ok(BaselineReport {
        pearson: pearson(a, b)?,
        spearman: spearman(a, b)?,
        distance_correlation: distance_correlation(a, b)?,
    })
}

pub fn pearson(a: &TimeSeries, b: &TimeSeries) -> Result<CompCorrValue> {
    check_same_length(a, b)?;
    pearson_slices(a.values(), b.values())
}

fn pearson_slices(x: &[f64], y: &[f64]) -> Result<CompCorrValue> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    CompCorrValue::from_moments(sxy, sxx, syy)
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

pub fn spearman(a: &TimeSeries, b: &TimeSeries) -> Result<CompCorrValue> {
    check_same_length(a, b)?;
    pearson_slices(&average_ranks(a.values()), &average_ranks(b.values()))
}

fn double_centered(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = (v[i] - v[j]).abs();
        }
    }
    let row_means: Vec<f64> = d
        .chunks(n)
        .map(|r| r.iter().sum::<f64>() / n as f64)
        .collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    // the distance matrix is symmetric, so column means equal row means
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] += grand - row_means[i] - row_means[j];
        }
    }
    d
}

/// Biased (V-statistic) sample distance correlation; 0 when either
/// distance variance vanishes.
pub fn distance_correlation(a: &TimeSeries, b: &TimeSeries) -> Result<f64> {
    let n = check_same_length(a, b)? as f64;
    let da = double_centered(a.values());
    let db = double_centered(b.values());
    let nn = n * n;
    let dcov2 = da.iter().zip(&db).map(|(x, y)| x * y).sum::<f64>() / nn;
    let dvar_a = da.iter().map(|x| x * x).sum::<f64>() / nn;
    let dvar_b = db.iter().map(|x| x * x).sum::<f64>() / nn;
    let denom = (dvar_a * dvar_b).sqrt();
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok((dcov2.max(0.0) / denom).sqrt().min(1.0))
}
