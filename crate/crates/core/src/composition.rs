//! Integer compositions of a series length with a uniform minimum part size.
//!
//! Compositions are streamed in ascending lexicographic order of their parts
//! list. That order is the canonical one used everywhere else in the crate:
//! BCC/WCC ties resolve to the earliest composition, and distribution files
//! list compositions in it.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Series length `n` and minimum part length `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompositionSpec {
    n: usize,
    m: usize,
}

impl CompositionSpec {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidSpec {
                n,
                m,
                reason: "every part needs at least 2 observations (m >= 2)",
            });
        }
        if n < m {
            return Err(Error::InvalidSpec {
                n,
                m,
                reason: "series length is shorter than the minimum part length",
            });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn enumerate(&self) -> Compositions {
        Compositions::new(*self)
    }

    pub fn count(&self) -> Result<u128> {
        count(self.n, self.m)
    }

    /// Whether `parts` is a composition of `n` with every part at least `m`.
    pub fn admits(&self, parts: &[usize]) -> bool {
        !parts.is_empty()
            && parts.iter().all(|&p| p >= self.m)
            && parts.iter().try_fold(0usize, |acc, &p| acc.checked_add(p)) == Some(self.n)
    }
}

/// An ordered list of part lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(Vec<usize>);

impl Composition {
    /// Wraps a parts list; only checks that it is non-empty with no zero parts.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::CompositionMismatch {
                composition: format_parts(&parts),
                n: parts.iter().sum(),
            });
        }
        Ok(Self(parts))
    }

    pub fn single(n: usize) -> Self {
        Self(vec![n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of parts, `k`.
    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `(start, length)` of each part.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().scan(0usize, |start, &len| {
            let s = *start;
            *start += len;
            Some((s, len))
        })
    }

    pub(crate) fn check_length(&self, n: usize) -> Result<()> {
        if self.total() != n {
            return Err(Error::CompositionMismatch {
                composition: self.to_string(),
                n,
            });
        }
        Ok(())
    }

    pub fn into_parts(self) -> Vec<usize> {
        self.0
    }
}

impl From<&[usize]> for Composition {
    fn from(parts: &[usize]) -> Self {
        Self(parts.to_vec())
    }
}

pub(crate) fn format_parts(parts: &[usize]) -> String {
    let mut s = String::with_capacity(parts.len() * 3 + 2);
    s.push('[');
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&p.to_string());
    }
    s.push(']');
    s
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_parts(&self.0))
    }
}

impl FromStr for Composition {
    type Err = Error;

    /// Parses `[7,4,8,4]`; spaces after commas are tolerated.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            reason: format!("malformed composition '{s}'"),
        };
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let parts = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts)
    }
}

/// Streaming enumerator over all compositions of a spec.
///
/// Holds only the current parts list, so memory is O(n) regardless of how
/// many compositions exist.
#[derive(Debug, Clone)]
pub struct Compositions {
    m: usize,
    parts: Vec<usize>,
    started: bool,
    done: bool,
}

impl Compositions {
    pub fn new(spec: CompositionSpec) -> Self {
        let mut parts = Vec::with_capacity(spec.n / spec.m + 1);
        push_lex_min(&mut parts, spec.n, spec.m);
        Self {
            m: spec.m,
            parts,
            started: false,
            done: false,
        }
    }

    /// Advances in place and returns the new current composition, avoiding
    /// the allocation that `Iterator::next` makes.
    pub fn advance(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.parts);
        }
        // Only the second-to-last part can grow: it is the rightmost part with
        // a non-empty suffix. Grow it by the smallest amount that leaves a
        // composable remainder, then refill the suffix minimally.
        let k = self.parts.len();
        if k < 2 {
            self.done = true;
            return None;
        }
        let rest = self.parts[k - 1];
        let grow = if rest > self.m { 1 } else { rest };
        self.parts.truncate(k - 1);
        self.parts[k - 2] += grow;
        push_lex_min(&mut self.parts, rest - grow, self.m);
        Some(&self.parts)
    }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        self.advance().map(Composition::from)
    }
}

/// Appends the lexicographically smallest composition of `r` (0 or >= m).
fn push_lex_min(parts: &mut Vec<usize>, mut r: usize, m: usize) {
    while r >= 2 * m {
        parts.push(m);
        r -= m;
    }
    if r > 0 {
        parts.push(r);
    }
}

/// Number of compositions of `n` with all parts >= `m`, without enumerating.
pub fn count(n: usize, m: usize) -> Result<u128> {
    CompositionSpec::new(n, m)?;
    // c[x] = sum_{p=m..x} c[x-p] = sum_{y=0..x-m} c[y]; `running` tracks that sum.
    let mut c = vec![0u128; n + 1];
    c[0] = 1;
    let mut running = 0u128;
    for x in m..=n {
        running = running
            .checked_add(c[x - m])
            .ok_or(Error::CountOverflow { n, m })?;
        c[x] = running;
    }
    Ok(c[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(n: usize, m: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in m..=n {
            let rest = n - first;
            if rest != 0 && rest < m {
                continue;
            }
            for mut tail in brute(rest, m) {
                tail.insert(0, first);
                out.push(tail);
            }
        }
        out
    }

    fn all(n: usize, m: usize) -> Vec<Vec<usize>> {
        CompositionSpec::new(n, m)
            .unwrap()
            .enumerate()
            .map(Composition::into_parts)
            .collect()
    }

    #[test]
    fn small_tables() {
        assert_eq!(all(2, 2), vec![vec![2]]);
        assert_eq!(all(3, 2), vec![vec![3]]);
        assert_eq!(all(4, 2), vec![vec![2, 2], vec![4]]);
        assert_eq!(all(5, 2), vec![vec![2, 3], vec![3, 2], vec![5]]);
        assert_eq!(all(4, 4), vec![vec![4]]);
        assert_eq!(
            all(7, 2),
            vec![
                vec![2, 2, 3],
                vec![2, 3, 2],
                vec![2, 5],
                vec![3, 2, 2],
                vec![3, 4],
                vec![4, 3],
                vec![5, 2],
                vec![7],
            ]
        );
    }

    #[test]
    fn ten_matches_table_row() {
        let got = all(10, 2);
        assert_eq!(got.len(), 34);
        let mut table_row: Vec<Vec<usize>> =
            "[2, 2, 2, 2, 2]; [2, 2, 2, 4]; [2, 2, 3, 3]; [2, 2, 4, 2]; \
             [2, 2, 6]; [2, 3, 2, 3]; [2, 3, 3, 2]; [2, 3, 5]; [2, 4, 2, 2]; [2, 4, 4]; [2, 5, 3]; \
             [2, 6, 2]; [2, 8]; [3, 2, 2, 3]; [3, 2, 3, 2]; [3, 3, 2, 2]; [3, 2, 5]; [3, 3, 4]; \
             [3, 4, 3]; [3, 5, 2]; [3, 7]; [4, 2, 2, 2]; [4, 2, 4]; [4, 3, 3]; [4, 4, 2]; [4, 6]; \
             [5, 2, 3]; [5, 3, 2]; [5, 5]; [6, 2, 2]; [6, 4]; [7, 3]; [8, 2]; [10]"
                .split(';')
                .map(|c| c.parse::<Composition>().unwrap().into_parts())
                .collect();
        table_row.sort();
        assert_eq!(got, table_row);
    }

    #[test]
    fn matches_recursive_oracle() {
        for m in 2..=4 {
            for n in m..=12 {
                assert_eq!(all(n, m), brute(n, m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn counts() {
        assert_eq!(count(10, 2).unwrap(), 34);
        assert_eq!(count(23, 4).unwrap(), 250);
        assert_eq!(count(23, 3).unwrap(), 1278);
        assert_eq!(count(23, 2).unwrap(), 17711);
        assert_eq!(count(50, 2).unwrap(), 7_778_742_049);
        assert_eq!(count(2, 2).unwrap(), 1);
        assert!(count(100, 2).unwrap() > 200_000_000_000_000_000_000);
    }

    #[test]
    fn count_overflow_is_an_error() {
        assert!(matches!(count(200, 2), Err(Error::CountOverflow { .. })));
    }

    #[test]
    fn invalid_specs() {
        assert!(CompositionSpec::new(3, 1).is_err());
        assert!(CompositionSpec::new(3, 4).is_err());
        assert!(count(1, 2).is_err());
    }

    #[test]
    fn stream_length_equals_count() {
        for m in 2..=4 {
            for n in m..=16 {
                let spec = CompositionSpec::new(n, m).unwrap();
                assert_eq!(spec.enumerate().count() as u128, spec.count().unwrap());
            }
        }
    }

    #[test]
    fn fibonacci() {
        let (mut f1, mut f2) = (1u128, 1u128);
        // count(n, 2) = F_{n-1}; start at n = 2 -> F_1.
        for n in 2..=30 {
            assert_eq!(count(n, 2).unwrap(), f1, "n={n}");
            let next = f1 + f2;
            f1 = f2;
            f2 = next;
        }
    }

    #[test]
    fn parse_and_display() {
        let c: Composition = "[7, 4,8,4]".parse().unwrap();
        assert_eq!(c.to_string(), "[7,4,8,4]");
        assert_eq!(
            c.segments().collect::<Vec<_>>(),
            vec![(0, 7), (7, 4), (11, 8), (19, 4)]
        );
        assert!("7,4".parse::<Composition>().is_err());
        assert!("[]".parse::<Composition>().is_err());
    }

    proptest! {
        #[test]
        fn every_yield_is_valid(n in 2usize..28, m in 2usize..7) {
            prop_assume!(n >= m);
            let spec = CompositionSpec::new(n, m).unwrap();
            let mut prev: Option<Vec<usize>> = None;
            for c in spec.enumerate().take(5000) {
                prop_assert!(spec.admits(c.parts()));
                if let Some(p) = &prev {
                    prop_assert!(p.as_slice() < c.parts());
                }
                prev = Some(c.into_parts());
            }
        }
    }
}
