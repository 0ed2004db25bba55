//! The five two-dimensional multimodal test functions.
//!
//! All objectives are minimized. Ackley and Rastrigin follow their usual
//! textbook forms, De Jong's fifth function uses the standard 25-foxhole grid
//! on `[-65.536, 65.536]²`.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::swarm::{Bounds, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BenchmarkId {
    #[serde(rename = "f1")]
    F1SixHumpCamel,
    #[serde(rename = "f2")]
    F2Ackley,
    #[serde(rename = "f3")]
    F3Rastrigin,
    #[serde(rename = "f4")]
    F4Shubert,
    #[serde(rename = "f5")]
    F5DeJong5,
}

const FOXHOLE_COORDS: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 5] = [
        BenchmarkId::F1SixHumpCamel,
        BenchmarkId::F2Ackley,
        BenchmarkId::F3Rastrigin,
        BenchmarkId::F4Shubert,
        BenchmarkId::F5DeJong5,
    ];

    /// Short name used on the command line and in file names.
    pub fn key(self) -> &'static str {
        match self {
            BenchmarkId::F1SixHumpCamel => "f1",
            BenchmarkId::F2Ackley => "f2",
            BenchmarkId::F3Rastrigin => "f3",
            BenchmarkId::F4Shubert => "f4",
            BenchmarkId::F5DeJong5 => "f5",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            BenchmarkId::F1SixHumpCamel => "six-hump-camel",
            BenchmarkId::F2Ackley => "ackley",
            BenchmarkId::F3Rastrigin => "rastrigin",
            BenchmarkId::F4Shubert => "shubert",
            BenchmarkId::F5DeJong5 => "dejong5",
        }
    }

    pub fn dimension(self) -> usize {
        2
    }

    pub fn bounds(self) -> Bounds {
        let (lo, hi) = match self {
            BenchmarkId::F1SixHumpCamel => (vec![-1.9, -1.1], vec![1.9, 1.1]),
            BenchmarkId::F2Ackley => (vec![-5.0; 2], vec![5.0; 2]),
            BenchmarkId::F3Rastrigin | BenchmarkId::F4Shubert => (vec![-5.12; 2], vec![5.12; 2]),
            BenchmarkId::F5DeJong5 => (vec![-65.536; 2], vec![65.536; 2]),
        };
        Bounds::new(lo, hi).expect("static benchmark bounds are valid")
    }

    /// Total optima count used as the peak-ratio denominator in the
    /// published comparison tables (global + local).
    pub fn published_optima_count(self) -> usize {
        match self {
            BenchmarkId::F1SixHumpCamel => 6,
            BenchmarkId::F2Ackley | BenchmarkId::F3Rastrigin => 121,
            BenchmarkId::F4Shubert => 201,
            BenchmarkId::F5DeJong5 => 36,
        }
    }

    pub fn evaluate(self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(self, x: &[f64]) -> f64 {
        match self {
            BenchmarkId::F1SixHumpCamel => six_hump_camel(x[0], x[1]),
            BenchmarkId::F2Ackley => ackley(x),
            BenchmarkId::F3Rastrigin => rastrigin(x),
            BenchmarkId::F4Shubert => shubert(x),
            BenchmarkId::F5DeJong5 => dejong5(x[0], x[1]),
        }
    }

    pub fn problem(self) -> Problem {
        Problem::new(self.key(), self.bounds(), move |x: &[f64]| self.eval_unchecked(x))
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for BenchmarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchmarkId::ALL
            .into_iter()
            .find(|b| b.key().eq_ignore_ascii_case(s) || b.long_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "function",
                name: s.to_string(),
                valid: BenchmarkId::ALL
                    .map(|b| format!("{} ({})", b.key(), b.long_name()))
                    .join(", "),
            })
    }
}

pub fn six_hump_camel(x1: f64, x2: f64) -> f64 {
    let x1s = x1 * x1;
    let x2s = x2 * x2;
    (4.0 - 2.1 * x1s + x1s * x1s / 3.0) * x1s + x1 * x2 + (-4.0 + 4.0 * x2s) * x2s
}

pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sum_sq: f64 = x.iter().map(|v| v * v).sum();
    let sum_cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
    -20.0 * (-0.2 * (sum_sq / n).sqrt()).exp() - (sum_cos / n).exp() + 20.0 + E
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
}

pub fn shubert(x: &[f64]) -> f64 {
    x.iter()
        .map(|&v| {
            (1..=5)
                .map(|j| {
                    let j = j as f64;
                    j * ((j + 1.0) * v + j).cos()
                })
                .sum::<f64>()
        })
        .product()
}

/// Foxhole centers in the order of the usual `(a_1j, a_2j)` matrix.
pub fn foxholes() -> impl Iterator<Item = (f64, f64)> {
    (0..25).map(|j| (FOXHOLE_COORDS[j % 5], FOXHOLE_COORDS[j / 5]))
}

pub fn dejong5(x1: f64, x2: f64) -> f64 {
    let inner: f64 = foxholes()
        .enumerate()
        .map(|(j, (a1, a2))| 1.0 / ((j + 1) as f64 + (x1 - a1).powi(6) + (x2 - a2).powi(6)))
        .sum();
    1.0 / (0.002 + inner)
}
