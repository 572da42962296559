//! One-clock regions: the points `{i}` and the open intervals `(i, i+1)` below `K`.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{half, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "i", rename_all = "lowercase")]
pub enum Region {
    Point(u64),
    Open(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegionError {
    #[error("valuation {value} outside [0, {k}]")]
    OutOfRange { value: String, k: u64 },
    #[error("region index {index} outside the {count} regions of K = {k}")]
    BadIndex { index: u64, count: u64, k: u64 },
}

impl Region {
    /// Position in the order `{0} < (0,1) < {1} < ... < {K}`.
    pub fn index(self) -> u64 {
        match self {
            Region::Point(i) => 2 * i,
            Region::Open(i) => 2 * i + 1,
        }
    }

    pub fn from_index(index: u64, k: u64) -> Result<Region, RegionError> {
        if index > 2 * k {
            return Err(RegionError::BadIndex { index, count: 2 * k + 1, k });
        }
        Ok(if index.is_multiple_of(2) { Region::Point(index / 2) } else { Region::Open(index / 2) })
    }

    pub fn is_thin(self) -> bool {
        matches!(self, Region::Point(_))
    }

    /// `i` for `{i}`, `i + 1/2` for `(i, i+1)`.
    pub fn representative(self) -> Rational {
        match self {
            Region::Point(i) => Rational::from_integer(i.into()),
            Region::Open(i) => Rational::from_integer(i.into()) + half(),
        }
    }

    pub fn lower(self) -> u64 {
        match self {
            Region::Point(i) | Region::Open(i) => i,
        }
    }

    /// Least integer in the closure from above: `i` for `{i}`, `i+1` for `(i, i+1)`.
    pub fn upper(self) -> u64 {
        match self {
            Region::Point(i) => i,
            Region::Open(i) => i + 1,
        }
    }

    pub fn in_closure(self, v: &Rational) -> bool {
        let lo = Rational::from_integer(self.lower().into());
        let hi = Rational::from_integer(self.upper().into());
        *v >= lo && *v <= hi
    }

    pub fn contains(self, v: &Rational) -> bool {
        match self {
            Region::Point(i) => *v == Rational::from_integer(i.into()),
            Region::Open(i) => {
                *v > Rational::from_integer(i.into()) && *v < Rational::from_integer((i + 1).into())
            }
        }
    }
}

impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Point(i) => write!(f, "{{{i}}}"),
            Region::Open(i) => write!(f, "({i},{})", i + 1),
        }
    }
}

pub fn all_regions(k: u64) -> Vec<Region> {
    (0..=2 * k).map(|i| Region::from_index(i, k).unwrap()).collect()
}

pub fn region_of(v: &Rational, k: u64) -> Result<Region, RegionError> {
    if v.is_negative() || *v > Rational::from_integer(k.into()) {
        return Err(RegionError::OutOfRange { value: v.to_string(), k });
    }
    let floor = v.numer().div_floor(v.denom());
    let i = floor.to_u64().expect("bounded by k");
    Ok(if v.is_integer() { Region::Point(i) } else { Region::Open(i) })
}

pub fn time_successor(z: Region, k: u64) -> Option<Region> {
    match z {
        Region::Point(i) if i < k => Some(Region::Open(i)),
        Region::Point(_) => None,
        Region::Open(i) => Some(Region::Point(i + 1)),
    }
}

/// `z` followed by its iterated time successors. The prefix ending at `z'` is the zone `[z, z']`.
pub fn future_regions(z: Region, k: u64) -> Vec<Region> {
    std::iter::successors(Some(z), |r| time_successor(*r, k)).collect()
}

pub fn time_to_boundary(v: &Rational, b: u64) -> Rational {
    let d = Rational::from_integer(b.into()) - v;
    if d.is_negative() {
        Rational::zero()
    } else {
        d
    }
}
