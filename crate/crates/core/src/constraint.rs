//! Single-clock constraints and their interval normal form.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{Int, Rational};
use crate::regions::Region;

/// Name of the only clock the input language accepts.
pub const CLOCK: &str = "x";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub op: CmpOp,
    pub bound: Int,
}

impl Atom {
    pub fn new(op: CmpOp, bound: impl Into<Int>) -> Self {
        Atom { op, bound: bound.into() }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", CLOCK, self.op.symbol(), self.bound)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("malformed atom {0:?}")]
    Malformed(String),
    #[error("constraint {0:?} mentions clock {1:?}; only {CLOCK:?} is declared")]
    UnknownClock(String, String),
    #[error("diagonal constraint {0:?} is not supported with a single clock")]
    Diagonal(String),
    #[error("bound in {0:?} must be a natural number")]
    BadBound(String),
}

/// The set `{ν | lo ⋈ ν ⋈ hi}`; `hi = None` means unbounded above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Int,
    pub lo_strict: bool,
    pub hi: Option<(Int, bool)>,
}

impl Interval {
    pub fn everything() -> Self {
        Interval { lo: Int::zero(), lo_strict: false, hi: None }
    }

    pub fn is_empty(&self) -> bool {
        match &self.hi {
            None => false,
            Some((hi, hi_strict)) => match self.lo.cmp(hi) {
                Ordering::Greater => true,
                Ordering::Equal => self.lo_strict || *hi_strict,
                Ordering::Less => false,
            },
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_strict) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_strict),
            Ordering::Less => (other.lo.clone(), other.lo_strict),
            Ordering::Equal => (self.lo.clone(), self.lo_strict || other.lo_strict),
        };
        let hi = match (&self.hi, &other.hi) {
            (None, h) | (h, None) => h.clone(),
            (Some((a, sa)), Some((b, sb))) => Some(match a.cmp(b) {
                Ordering::Less => (a.clone(), *sa),
                Ordering::Greater => (b.clone(), *sb),
                Ordering::Equal => (a.clone(), *sa || *sb),
            }),
        };
        Interval { lo, lo_strict, hi }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let lo = Rational::from_integer(self.lo.clone());
        let above = if self.lo_strict { *v > lo } else { *v >= lo };
        let below = match &self.hi {
            None => true,
            Some((hi, strict)) => {
                let hi = Rational::from_integer(hi.clone());
                if *strict {
                    *v < hi
                } else {
                    *v <= hi
                }
            }
        };
        above && below
    }

    /// Regions are either inside or disjoint from an integer-bounded interval.
    pub fn contains_region(&self, r: Region) -> bool {
        match r {
            Region::Point(i) => self.contains(&Rational::from_integer(BigInt::from(i))),
            Region::Open(i) => {
                let i = BigInt::from(i);
                let lo_ok = self.lo <= i;
                let hi_ok = match &self.hi {
                    None => true,
                    Some((hi, _)) => *hi >= &i + BigInt::one(),
                };
                lo_ok && hi_ok
            }
        }
    }

    /// True when the interval is bounded above by `k` (i.e. implies `x <= k`).
    pub fn bounded_by(&self, k: &Int) -> bool {
        matches!(&self.hi, Some((hi, _)) if hi <= k)
    }
}

/// A conjunction of atoms over the single clock, kept in canonical form:
/// the fewest atoms describing the same interval, sorted by bound then operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ClockConstraint {
    atoms: Vec<Atom>,
}

impl ClockConstraint {
    pub fn always() -> Self {
        ClockConstraint { atoms: Vec::new() }
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let interval = atoms.into_iter().fold(Interval::everything(), |acc, a| {
            acc.intersect(&atom_interval(&a))
        });
        Self::from_interval(&interval)
    }

    pub fn from_interval(iv: &Interval) -> Self {
        let mut atoms = Vec::new();
        if iv.is_empty() {
            atoms.push(Atom::new(CmpOp::Lt, 0));
        } else if matches!(&iv.hi, Some((hi, false)) if *hi == iv.lo) && !iv.lo_strict {
            atoms.push(Atom::new(CmpOp::Eq, iv.lo.clone()));
        } else {
            if iv.lo_strict {
                atoms.push(Atom::new(CmpOp::Gt, iv.lo.clone()));
            } else if iv.lo.is_positive() {
                atoms.push(Atom::new(CmpOp::Ge, iv.lo.clone()));
            }
            if let Some((hi, strict)) = &iv.hi {
                let op = if *strict { CmpOp::Lt } else { CmpOp::Le };
                atoms.push(Atom::new(op, hi.clone()));
            }
        }
        atoms.sort_by(|a, b| a.bound.cmp(&b.bound).then(a.op.cmp(&b.op)));
        ClockConstraint { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn interval(&self) -> Interval {
        self.atoms
            .iter()
            .fold(Interval::everything(), |acc, a| acc.intersect(&atom_interval(a)))
    }

    pub fn max_bound(&self) -> Option<&Int> {
        self.atoms.iter().map(|a| &a.bound).max()
    }

    pub fn scaled(&self, factor: &Int) -> Self {
        ClockConstraint {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { op: a.op, bound: &a.bound * factor })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConstraintError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::always());
        }
        let atoms = text
            .split('&')
            .map(parse_atom)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_atoms(atoms))
    }
}

impl fmt::Display for ClockConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl Serialize for ClockConstraint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ClockConstraint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        ClockConstraint::parse(&text).map_err(serde::de::Error::custom)
    }
}

fn atom_interval(a: &Atom) -> Interval {
    let b = a.bound.clone();
    match a.op {
        CmpOp::Lt => Interval { lo: Int::zero(), lo_strict: false, hi: Some((b, true)) },
        CmpOp::Le => Interval { lo: Int::zero(), lo_strict: false, hi: Some((b, false)) },
        CmpOp::Eq => Interval { lo: b.clone(), lo_strict: false, hi: Some((b, false)) },
        CmpOp::Ge => Interval { lo: b, lo_strict: false, hi: None },
        CmpOp::Gt => Interval { lo: b, lo_strict: true, hi: None },
    }
}

fn parse_atom(raw: &str) -> Result<Atom, ConstraintError> {
    let s = raw.trim();
    let ident_end = s
        .find(|c: char| !(c.is_alphanumeric() || c == '_'))
        .unwrap_or(s.len());
    let (clock, rest) = s.split_at(ident_end);
    if clock.is_empty() || clock.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return Err(ConstraintError::Malformed(s.to_string()));
    }
    let rest = rest.trim_start();
    if rest.starts_with('-') {
        return Err(ConstraintError::Diagonal(s.to_string()));
    }
    if clock != CLOCK {
        return Err(ConstraintError::UnknownClock(s.to_string(), clock.to_string()));
    }
    let (op, rest) = if let Some(r) = rest.strip_prefix("<=") {
        (CmpOp::Le, r)
    } else if let Some(r) = rest.strip_prefix(">=") {
        (CmpOp::Ge, r)
    } else if let Some(r) = rest.strip_prefix("==") {
        (CmpOp::Eq, r)
    } else if let Some(r) = rest.strip_prefix('<') {
        (CmpOp::Lt, r)
    } else if let Some(r) = rest.strip_prefix('>') {
        (CmpOp::Gt, r)
    } else if let Some(r) = rest.strip_prefix('=') {
        (CmpOp::Eq, r)
    } else {
        return Err(ConstraintError::Malformed(s.to_string()));
    };
    let rest = rest.trim();
    if rest.chars().any(|c| c.is_alphabetic()) {
        return Err(ConstraintError::Diagonal(s.to_string()));
    }
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return Err(ConstraintError::BadBound(s.to_string()));
    }
    let bound: Int = rest.parse().map_err(|_| ConstraintError::BadBound(s.to_string()))?;
    Ok(Atom { op, bound })
}
