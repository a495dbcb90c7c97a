//! Half-integer spin quantum numbers stored as `2J`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A spin quantum number `J`, stored as the integer `2J` so that
/// half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SpinQuantum {
    twice: u32,
}

impl SpinQuantum {
    pub const ZERO: SpinQuantum = SpinQuantum { twice: 0 };
    pub const HALF: SpinQuantum = SpinQuantum { twice: 1 };

    pub const fn from_twice(twice: u32) -> Self {
        SpinQuantum { twice }
    }

    pub const fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// Dimension `2J + 1` of the irreducible representation.
    pub const fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// Number of su(2J+1) generators, `(2J+1)^2 - 1 = 4J(J+1)`.
    pub const fn generator_count(self) -> usize {
        self.dim() * self.dim() - 1
    }

    /// `sum_m m^2 = J(J+1)(2J+1)/3`, the common squared trace norm of all
    /// generators.
    pub fn norm_sq(self) -> f64 {
        let j = self.value();
        j * (j + 1.0) * (2.0 * j + 1.0) / 3.0
    }

    /// Magnetic quantum numbers in basis order `J, J-1, ..., -J`.
    pub fn magnetic_numbers(self) -> impl Iterator<Item = f64> {
        let j = self.value();
        (0..self.dim()).map(move |k| j - k as f64)
    }

    pub(crate) fn require_nontrivial(self) -> Result<(), Error> {
        if self.twice == 0 {
            Err(Error::InvalidSpin("J must be at least 1/2".into()))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for SpinQuantum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for SpinQuantum {
    type Err = Error;

    /// Accepts `"3/2"`, `"1"`, `"2/2"`, `"0"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::InvalidSpin(s.to_string());
        match s.split_once('/') {
            Some((num, den)) => {
                let num: u32 = num.trim().parse().map_err(|_| bad())?;
                match den.trim() {
                    "1" => Ok(SpinQuantum::from_twice(2 * num)),
                    "2" => Ok(SpinQuantum::from_twice(num)),
                    _ => Err(bad()),
                }
            }
            None => {
                let v: u32 = s.parse().map_err(|_| bad())?;
                Ok(SpinQuantum::from_twice(2 * v))
            }
        }
    }
}

impl From<SpinQuantum> for String {
    fn from(j: SpinQuantum) -> String {
        j.to_string()
    }
}

impl TryFrom<String> for SpinQuantum {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}
