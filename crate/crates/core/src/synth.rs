//! Polynomial test curves sampled on an equally spaced grid.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthFunction {
    /// `x^2`
    Square,
    /// `x^3 - x`
    CubicMinusX,
    /// `x^4 - 10x^2 + 9`
    Quartic,
    /// `x^3 + x^2 + 2x + 4`
    MonotoneCubic,
}

impl SynthFunction {
    pub const ALL: [SynthFunction; 4] = [
        Self::Square,
        Self::CubicMinusX,
        Self::Quartic,
        Self::MonotoneCubic,
    ];

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Square => x * x,
            Self::CubicMinusX => x * x * x - x,
            Self::Quartic => x * x * x * x - 10.0 * x * x + 9.0,
            Self::MonotoneCubic => x * x * x + x * x + 2.0 * x + 4.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Square => "square",
            Self::CubicMinusX => "cubic_minus_x",
            Self::Quartic => "quartic",
            Self::MonotoneCubic => "monotone_cubic",
        }
    }

    /// Default sampling range. The square curve is range-invariant on
    /// symmetric grids; the others were calibrated against reference
    /// HCC/LCC values (see README).
    pub fn default_range(self) -> (f64, f64) {
        match self {
            Self::Square => (-1.0, 1.0),
            Self::CubicMinusX => (-1.4, 1.4),
            Self::Quartic => (-3.5, 3.5),
            Self::MonotoneCubic => (-3.0, 2.0),
        }
    }
}

impl fmt::Display for SynthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SynthFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::InvalidSynth(format!(
                    "unknown function '{s}' (expected one of square, cubic_minus_x, quartic, monotone_cubic)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub function: SynthFunction,
    pub x_min: f64,
    pub x_max: f64,
    /// Number of equal intervals; the grid has `pieces + 1` points.
    pub pieces: usize,
}

impl SynthSpec {
    pub fn new(function: SynthFunction, x_min: f64, x_max: f64, pieces: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidSynth(format!(
                "range must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if pieces < 2 {
            return Err(Error::InvalidSynth(format!(
                "pieces must be >= 2, got {pieces}"
            )));
        }
        Ok(Self {
            function,
            x_min,
            x_max,
            pieces,
        })
    }

    pub fn with_default_range(function: SynthFunction, pieces: usize) -> Result<Self> {
        let (lo, hi) = function.default_range();
        Self::new(function, lo, hi, pieces)
    }

    pub fn n(&self) -> usize {
        self.pieces + 1
    }
}

/// Returns `(x, y)` with ids `x` and `y`.
pub fn generate(spec: &SynthSpec) -> Result<(TimeSeries, TimeSeries)> {
    let step = (spec.x_max - spec.x_min) / spec.pieces as f64;
    let x: Vec<f64> = (0..=spec.pieces)
        .map(|i| spec.x_min + i as f64 * step)
        .collect();
    let y = x.iter().map(|&v| spec.function.eval(v)).collect();
    Ok((TimeSeries::new("x", x)?, TimeSeries::new("y", y)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_square_grid() {
        let spec = SynthSpec::new(SynthFunction::Square, -1.0, 1.0, 2).unwrap();
        let (x, y) = generate(&spec).unwrap();
        assert_eq!(x.values(), &[-1.0, 0.0, 1.0]);
        assert_eq!(y.values(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn even_functions_give_even_sequences() {
        for f in [SynthFunction::Square, SynthFunction::Quartic] {
            let spec = SynthSpec::new(f, -15.0, 15.0, 30).unwrap();
            let (x, y) = generate(&spec).unwrap();
            let y = y.values();
            assert_eq!(x.len(), 31);
            for i in 0..=30 {
                assert_eq!(y[i], y[30 - i], "{f} i={i}");
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(SynthSpec::new(SynthFunction::Square, 1.0, 1.0, 30).is_err());
        assert!(SynthSpec::new(SynthFunction::Square, 1.0, -1.0, 30).is_err());
        assert!(SynthSpec::new(SynthFunction::Square, -1.0, 1.0, 1).is_err());
        assert!(SynthSpec::new(SynthFunction::Square, f64::NAN, 1.0, 3).is_err());
    }

    #[test]
    fn names_round_trip() {
        for f in SynthFunction::ALL {
            assert_eq!(f.name().parse::<SynthFunction>().unwrap(), f);
        }
        assert!("cosine".parse::<SynthFunction>().is_err());
    }

    #[test]
    fn polynomial_values() {
        assert_eq!(SynthFunction::CubicMinusX.eval(2.0), 6.0);
        assert_eq!(SynthFunction::Quartic.eval(1.0), 0.0);
        assert_eq!(SynthFunction::Quartic.eval(3.0), 0.0);
        assert_eq!(SynthFunction::MonotoneCubic.eval(-1.0), 2.0);
    }
}
