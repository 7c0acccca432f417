//! Centered sums for every contiguous segment of a series pair.
//!
//! The table is filled eagerly with a co-moment recurrence run forward from
//! every start position, so each entry depends only on the observations
//! inside its own segment. That keeps an outlier's influence confined to the
//! segments that contain it and avoids the cancellation of raw power sums on
//! series with large offsets.

use crate::error::{Error, Result};
use crate::series::{check_same_length, TimeSeries};

/// Centered sums of one segment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SegmentSums {
    /// `sum (a_j - mean_a)^2`
    pub css_a: f64,
    /// `sum (b_j - mean_b)^2`
    pub css_b: f64,
    /// `sum (a_j - mean_a)(b_j - mean_b)`
    pub css_ab: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SegmentTable {
    n: usize,
    m: usize,
    // offsets[s] is the index of segment (s, m); lengths m..=n-s follow it.
    offsets: Vec<usize>,
    sums: Vec<SegmentSums>,
    // (k-1)/k and 1/k for k = 1..=n
    weight: Vec<f64>,
    recip: Vec<f64>,
}

impl SegmentTable {
    pub fn build(a: &TimeSeries, b: &TimeSeries, m: usize) -> Result<Self> {
        let n = check_same_length(a, b)?;
        if m < 1 || n < m {
            return Err(Error::InvalidSpec {
                n,
                m,
                reason: "series length is shorter than the minimum part length",
            });
        }
        let mut table = Self::with_shape(n, m);
        table.fill(a.values(), b.values());
        Ok(table)
    }

    /// An empty table sized for series of length `n`; see [`fill`](Self::fill).
    pub fn with_shape(n: usize, m: usize) -> Self {
        assert!(m >= 1 && n >= m, "invalid table shape n={n} m={m}");
        let mut offsets = Vec::with_capacity(n + 1);
        let mut total = 0;
        for s in 0..n {
            offsets.push(total);
            total += (n - s + 1).saturating_sub(m);
        }
        offsets.push(total);
        let weight = (1..=n).map(|k| (k - 1) as f64 / k as f64).collect();
        let recip = (1..=n).map(|k| 1.0 / k as f64).collect();
        Self {
            n,
            m,
            offsets,
            sums: vec![SegmentSums::default(); total],
            weight,
            recip,
        }
    }

    /// Refills the table for a new pair of the same length, reusing storage.
    pub fn fill(&mut self, a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), self.n);
        assert_eq!(b.len(), self.n);
        let m = self.m;
        for s in 0..self.n {
            let mut mean_a = 0.0;
            let mut mean_b = 0.0;
            let mut acc = SegmentSums::default();
            let base = self.offsets[s];
            for (j, (&x, &y)) in a[s..].iter().zip(&b[s..]).enumerate() {
                let da = x - mean_a;
                let db = y - mean_b;
                let w = self.weight[j];
                // products formed before weighting so swapping a and b is exact
                acc.css_a += w * (da * da);
                acc.css_b += w * (db * db);
                acc.css_ab += w * (da * db);
                mean_a += da * self.recip[j];
                mean_b += db * self.recip[j];
                let len = j + 1;
                if len >= m {
                    self.sums[base + len - m] = acc;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Checked lookup of segment `(start, length)`.
    pub fn segment_contrib(&self, start: usize, length: usize) -> Result<SegmentSums> {
        if length < self.m || start.checked_add(length).is_none_or(|e| e > self.n) {
            return Err(Error::SegmentOutOfRange {
                start,
                length,
                n: self.n,
                m: self.m,
            });
        }
        Ok(self.get(start, length))
    }

    #[inline]
    pub(crate) fn get(&self, start: usize, length: usize) -> SegmentSums {
        debug_assert!(length >= self.m && start + length <= self.n);
        self.sums[self.offsets[start] + length - self.m]
    }
}
