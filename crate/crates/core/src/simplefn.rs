//! Simple functions `ν ↦ d` and `ν ↦ d − ν` with integer `d`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{Int, Rational};
use crate::regions::Region;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "FnRepr", try_from = "FnRepr")]
pub enum SimpleFn {
    Const(Int),
    Offset(Int),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Min,
    Max,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("extremum of an empty set of functions")]
pub struct EmptySet;

impl SimpleFn {
    pub fn constant(d: impl Into<Int>) -> Self {
        SimpleFn::Const(d.into())
    }

    pub fn offset(d: impl Into<Int>) -> Self {
        SimpleFn::Offset(d.into())
    }

    pub fn d(&self) -> &Int {
        match self {
            SimpleFn::Const(d) | SimpleFn::Offset(d) => d,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SimpleFn::Const(_) => "const",
            SimpleFn::Offset(_) => "offset",
        }
    }

    pub fn eval(&self, v: &Rational) -> Rational {
        match self {
            SimpleFn::Const(d) => Rational::from_integer(d.clone()),
            SimpleFn::Offset(d) => Rational::from_integer(d.clone()) - v,
        }
    }

    /// Value at an integer point, which is again an integer.
    pub fn eval_int(&self, v: &Int) -> Int {
        match self {
            SimpleFn::Const(d) => d.clone(),
            SimpleFn::Offset(d) => d - v,
        }
    }

    /// The same function plus the constant `c`.
    pub fn shift(&self, c: &Int) -> SimpleFn {
        match self {
            SimpleFn::Const(d) => SimpleFn::Const(d + c),
            SimpleFn::Offset(d) => SimpleFn::Offset(d + c),
        }
    }
}

impl fmt::Display for SimpleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleFn::Const(d) => write!(f, "{d}"),
            SimpleFn::Offset(d) => write!(f, "{d} - x"),
        }
    }
}

/// Integer offsets never make two simple functions cross strictly inside a region,
/// so comparing at the representative decides the whole region.
pub fn compare_on_region(f: &SimpleFn, g: &SimpleFn, z: Region) -> Ordering {
    let v = z.representative();
    f.eval(&v).cmp(&g.eval(&v))
}

/// Extremal member over `z`; ties go to the lowest index.
pub fn extremum_on_region<'a>(
    fs: impl IntoIterator<Item = &'a SimpleFn>,
    z: Region,
    direction: Direction,
) -> Result<(SimpleFn, usize), EmptySet> {
    let mut best: Option<(&SimpleFn, usize)> = None;
    for (i, f) in fs.into_iter().enumerate() {
        best = match best {
            None => Some((f, i)),
            Some((b, j)) => {
                let ord = compare_on_region(f, b, z);
                let better = match direction {
                    Direction::Min => ord == Ordering::Less,
                    Direction::Max => ord == Ordering::Greater,
                };
                if better {
                    Some((f, i))
                } else {
                    Some((b, j))
                }
            }
        };
    }
    best.map(|(f, i)| (f.clone(), i)).ok_or(EmptySet)
}

/// `ν ↦ price + rate·(b − ν) − g + next(ν')` where `ν'` is `0` after a reset and `b` otherwise.
pub fn step_compose(rate: i64, price: &Int, b: &Int, reset: bool, g: &Int, next: &SimpleFn) -> SimpleFn {
    let landed = if reset { Int::from(0) } else { b.clone() };
    let tail = price - g + next.eval_int(&landed);
    match rate {
        0 => SimpleFn::Const(tail),
        1 => SimpleFn::Offset(b + tail),
        _ => panic!("step_compose needs a binary rate, got {rate}"),
    }
}

/// Composition for a move that takes no time and keeps the clock: `ν ↦ price − g + next(ν)`.
pub fn stay_compose(price: &Int, g: &Int, next: &SimpleFn) -> SimpleFn {
    next.shift(&(price - g))
}

#[derive(Serialize, Deserialize)]
struct FnRepr {
    kind: String,
    d: serde_json::Number,
}

impl From<SimpleFn> for FnRepr {
    fn from(f: SimpleFn) -> Self {
        let d = f.d().to_string().parse().expect("integers are valid JSON numbers");
        FnRepr { kind: f.kind().to_string(), d }
    }
}

impl TryFrom<FnRepr> for SimpleFn {
    type Error = String;

    fn try_from(r: FnRepr) -> Result<Self, String> {
        let d: Int = r.d.to_string().parse().map_err(|_| format!("offset {} is not an integer", r.d))?;
        match r.kind.as_str() {
            "const" => Ok(SimpleFn::Const(d)),
            "offset" => Ok(SimpleFn::Offset(d)),
            other => Err(format!("unknown simple function kind {other:?}")),
        }
    }
}
