//! Record filters: comparisons on `hcc`, `lcc`, `pearson` and
//! `abs(pearson)` joined by `AND`, e.g. `hcc>0.9 AND abs(pearson)<0.1`.

use std::fmt;
use std::str::FromStr;

use crate::correlation::CompCorrValue;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Hcc,
    Lcc,
    Pearson,
    AbsPearson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub field: Field,
    pub op: Op,
    pub threshold: f64,
}

impl Comparison {
    fn holds(&self, hcc: CompCorrValue, pearson: CompCorrValue, lcc: CompCorrValue) -> bool {
        let value = match self.field {
            Field::Hcc => hcc.get(),
            Field::Lcc => lcc.get(),
            Field::Pearson => pearson.get(),
            Field::AbsPearson => pearson.get().map(f64::abs),
        };
        // undefined values never pass
        let Some(v) = value else { return false };
        match self.op {
            Op::Lt => v < self.threshold,
            Op::Le => v <= self.threshold,
            Op::Gt => v > self.threshold,
            Op::Ge => v >= self.threshold,
        }
    }
}

/// Conjunction of comparisons; the empty filter accepts everything.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Filter {
    clauses: Vec<Comparison>,
}

impl Filter {
    pub fn accept_all() -> Self {
        Self::default()
    }

    pub fn clauses(&self) -> &[Comparison] {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn matches(&self, hcc: CompCorrValue, pearson: CompCorrValue, lcc: CompCorrValue) -> bool {
        self.clauses.iter().all(|c| c.holds(hcc, pearson, lcc))
    }
}

fn parse_clause(expr: &str, clause: &str) -> Result<Comparison> {
    let err = |reason: String| Error::InvalidFilter {
        expr: expr.to_string(),
        reason,
    };
    let (pos, op, width) = ["<=", ">=", "<", ">"]
        .iter()
        .find_map(|tok| clause.find(tok).map(|p| (p, *tok, tok.len())))
        .ok_or_else(|| err(format!("no comparison operator in '{}'", clause.trim())))?;
    let op = match op {
        "<=" => Op::Le,
        ">=" => Op::Ge,
        "<" => Op::Lt,
        _ => Op::Gt,
    };
    let lhs: String = clause[..pos]
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let field = match lhs.to_ascii_lowercase().as_str() {
        "hcc" => Field::Hcc,
        "lcc" => Field::Lcc,
        "pearson" | "r" => Field::Pearson,
        "abs(pearson)" | "abs(r)" => Field::AbsPearson,
        other => return Err(err(format!("unknown field '{other}'"))),
    };
    let rhs = clause[pos + width..].trim();
    let threshold: f64 = rhs
        .parse()
        .map_err(|_| err(format!("threshold '{rhs}' is not a number")))?;
    if !(-1.0..=1.0).contains(&threshold) {
        return Err(err(format!("threshold {threshold} outside [-1, 1]")));
    }
    Ok(Comparison {
        field,
        op,
        threshold,
    })
}

impl FromStr for Filter {
    type Err = Error;

    fn from_str(expr: &str) -> Result<Self> {
        if expr.trim().is_empty() {
            return Ok(Self::default());
        }
        let mut clauses = Vec::new();
        let mut rest = expr;
        loop {
            // split on a standalone, case-insensitive AND
            let upper = rest.to_ascii_uppercase();
            let split = upper.match_indices("AND").map(|(i, _)| i).find(|&i| {
                let before = upper[..i].chars().last().is_none_or(char::is_whitespace);
                let after = upper[i + 3..]
                    .chars()
                    .next()
                    .is_none_or(char::is_whitespace);
                before && after
            });
            match split {
                Some(i) => {
                    clauses.push(parse_clause(expr, &rest[..i])?);
                    rest = &rest[i + 3..];
                }
                None => {
                    clauses.push(parse_clause(expr, rest)?);
                    break;
                }
            }
        }
        Ok(Self { clauses })
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            let field = match c.field {
                Field::Hcc => "hcc",
                Field::Lcc => "lcc",
                Field::Pearson => "pearson",
                Field::AbsPearson => "abs(pearson)",
            };
            let op = match c.op {
                Op::Lt => "<",
                Op::Le => "<=",
                Op::Gt => ">",
                Op::Ge => ">=",
            };
            write!(f, "{field}{op}{}", c.threshold)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CompCorrValue::{Defined as D, Undefined};

    #[test]
    fn parses_conjunction_with_abs() {
        let f: Filter = "hcc>0.9 AND abs(pearson)<0.1".parse().unwrap();
        assert_eq!(f.clauses().len(), 2);
        assert!(f.matches(D(0.95), D(0.05), D(-0.2)));
        assert!(f.matches(D(0.95), D(-0.05), D(-0.2)));
        assert!(!f.matches(D(0.95), D(0.15), D(-0.2)));
        assert!(!f.matches(D(0.9), D(0.0), D(0.0)));
        assert_eq!(f.to_string(), "hcc>0.9 AND abs(pearson)<0.1");
    }

    #[test]
    fn spacing_and_case() {
        let f: Filter = " lcc <= -0.9 and r >= 0 ".parse().unwrap();
        assert_eq!(
            f.clauses(),
            &[
                Comparison {
                    field: Field::Lcc,
                    op: Op::Le,
                    threshold: -0.9
                },
                Comparison {
                    field: Field::Pearson,
                    op: Op::Ge,
                    threshold: 0.0
                },
            ]
        );
    }

    #[test]
    fn undefined_never_passes() {
        let f: Filter = "pearson<1".parse().unwrap();
        assert!(!f.matches(D(0.5), Undefined, D(0.1)));
        assert!(Filter::accept_all().matches(Undefined, Undefined, Undefined));
        assert!("".parse::<Filter>().unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_expressions() {
        for bad in [
            "hcc",
            "foo>0.1",
            "hcc>x",
            "hcc>1.5",
            "hcc>0.9 AND",
            "hcc>0.9 OR lcc<0",
        ] {
            assert!(bad.parse::<Filter>().is_err(), "{bad}");
        }
    }
}
