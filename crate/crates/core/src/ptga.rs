//! Priced timed game arenas over the single clock `x`: model, file format, validation, scaling.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::{ClockConstraint, ConstraintError, CLOCK};
use crate::rational::{Int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Min,
    Max,
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Owner::Min => "min",
            Owner::Max => "max",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub id: String,
    pub owner: Owner,
    pub rate: Int,
    pub invariant: ClockConstraint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: String,
    pub action: String,
    pub guard: ClockConstraint,
    pub resets: bool,
    pub to: String,
    pub price: Int,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ptga {
    pub k_bound: Int,
    pub initial: String,
    pub locations: Vec<Location>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("more than one clock declared: {0:?}")]
    MoreThanOneClock(Vec<String>),
    #[error("the clock must be named {CLOCK:?}, found {0:?}")]
    BadClock(Vec<String>),
    #[error("unknown location {id:?} referenced by {context}")]
    UnknownLocation { id: String, context: String },
    #[error("duplicate location id {0:?}")]
    DuplicateLocation(String),
    #[error("duplicate action {action:?} on location {from:?}")]
    DuplicateAction { from: String, action: String },
    #[error("in {context}: {source}")]
    Constraint { context: String, source: ConstraintError },
    #[error("{field} must be an integer, found {value}")]
    BadNumber { field: String, value: String },
    #[error("resets of {context} may only list {CLOCK:?}, found {found:?}")]
    BadReset { context: String, found: Vec<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagnosticCode {
    NonBinaryRate,
    NonPositiveBound,
    UnboundedInvariant,
    BoundExceedsK,
    UnsatisfiableGuard,
    InitialStateViolatesInvariant,
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    pub element: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn has(&self, code: DiagnosticCode) -> bool {
        self.diagnostics.iter().any(|d| d.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.diagnostics {
            writeln!(f, "{}: {} ({})", d.code, d.message, d.element)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    clocks: Vec<String>,
    k_bound: serde_json::Number,
    initial: String,
    locations: Vec<RawLocation>,
    edges: Vec<RawEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLocation {
    id: String,
    owner: Owner,
    rate: serde_json::Number,
    invariant: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    from: String,
    action: String,
    guard: String,
    resets: Vec<String>,
    to: String,
    price: serde_json::Number,
}

fn int_field(field: impl Into<String>, n: &serde_json::Number) -> Result<Int, ParseError> {
    let text = n.to_string();
    text.parse().map_err(|_| ParseError::BadNumber { field: field.into(), value: text })
}

fn number(n: &Int) -> serde_json::Number {
    n.to_string().parse().expect("integers are valid JSON numbers")
}

pub fn parse_ptga(text: &str) -> Result<Ptga, ParseError> {
    let raw: RawDoc = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.clocks.len() > 1 {
        return Err(ParseError::MoreThanOneClock(raw.clocks));
    }
    if raw.clocks != [CLOCK] {
        return Err(ParseError::BadClock(raw.clocks));
    }
    let k_bound = int_field("k_bound", &raw.k_bound)?;

    let mut seen = HashSet::new();
    let mut locations = Vec::with_capacity(raw.locations.len());
    for l in raw.locations {
        if !seen.insert(l.id.clone()) {
            return Err(ParseError::DuplicateLocation(l.id));
        }
        let invariant = ClockConstraint::parse(&l.invariant).map_err(|source| ParseError::Constraint {
            context: format!("invariant of {}", l.id),
            source,
        })?;
        locations.push(Location {
            rate: int_field(format!("rate of {}", l.id), &l.rate)?,
            id: l.id,
            owner: l.owner,
            invariant,
        });
    }
    if !seen.contains(&raw.initial) {
        return Err(ParseError::UnknownLocation { id: raw.initial, context: "initial".into() });
    }

    let mut actions = HashSet::new();
    let mut edges = Vec::with_capacity(raw.edges.len());
    for e in raw.edges {
        let context = format!("edge {} --{}--> {}", e.from, e.action, e.to);
        for id in [&e.from, &e.to] {
            if !seen.contains(id) {
                return Err(ParseError::UnknownLocation { id: id.clone(), context });
            }
        }
        if !actions.insert((e.from.clone(), e.action.clone())) {
            return Err(ParseError::DuplicateAction { from: e.from, action: e.action });
        }
        let resets = match e.resets.as_slice() {
            [] => false,
            [c] if c == CLOCK => true,
            _ => return Err(ParseError::BadReset { context, found: e.resets }),
        };
        let guard = ClockConstraint::parse(&e.guard)
            .map_err(|source| ParseError::Constraint { context: format!("guard of {context}"), source })?;
        edges.push(Edge {
            price: int_field(format!("price of {context}"), &e.price)?,
            from: e.from,
            action: e.action,
            guard,
            resets,
            to: e.to,
        });
    }
    Ok(Ptga { k_bound, initial: raw.initial, locations, edges })
}

impl Ptga {
    /// Canonical JSON text; `parse_ptga` reads it back to an equal value.
    pub fn to_json(&self) -> String {
        let raw = RawDoc {
            clocks: vec![CLOCK.to_string()],
            k_bound: number(&self.k_bound),
            initial: self.initial.clone(),
            locations: self
                .locations
                .iter()
                .map(|l| RawLocation {
                    id: l.id.clone(),
                    owner: l.owner,
                    rate: number(&l.rate),
                    invariant: l.invariant.to_string(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    from: e.from.clone(),
                    action: e.action.clone(),
                    guard: e.guard.to_string(),
                    resets: if e.resets { vec![CLOCK.to_string()] } else { vec![] },
                    to: e.to.clone(),
                    price: number(&e.price),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("plain data serializes")
    }

    pub fn location_index(&self, id: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.id == id)
    }

    pub fn location(&self, id: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.id == id)
    }

    /// Outgoing edge indices per location, in declaration order.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let index: HashMap<&str, usize> =
            self.locations.iter().enumerate().map(|(i, l)| (l.id.as_str(), i)).collect();
        let mut out = vec![Vec::new(); self.locations.len()];
        for (j, e) in self.edges.iter().enumerate() {
            out[index[e.from.as_str()]].push(j);
        }
        out
    }
}

pub fn validate(p: &Ptga) -> ValidationReport {
    let mut diagnostics = Vec::new();
    let mut push = |code, message: String, element: String| {
        diagnostics.push(Diagnostic { code, message, element })
    };
    let k = &p.k_bound;
    if !k.is_positive() {
        push(DiagnosticCode::NonPositiveBound, format!("k_bound must be positive, found {k}"), "k_bound".into());
    }
    let too_big = |c: &ClockConstraint| c.max_bound().is_some_and(|b| b > k);
    for l in &p.locations {
        let element = format!("location {}", l.id);
        if !(l.rate == Int::from(0) || l.rate.is_one()) {
            push(DiagnosticCode::NonBinaryRate, format!("rate {} is not 0 or 1", l.rate), element.clone());
        }
        if !l.invariant.interval().bounded_by(k) {
            push(
                DiagnosticCode::UnboundedInvariant,
                format!("invariant {:?} does not imply x <= {k}", l.invariant.to_string()),
                element.clone(),
            );
        }
        if too_big(&l.invariant) {
            push(DiagnosticCode::BoundExceedsK, format!("invariant constant exceeds {k}"), element);
        }
    }
    for e in &p.edges {
        let element = format!("edge {} --{}--> {}", e.from, e.action, e.to);
        if too_big(&e.guard) {
            push(DiagnosticCode::BoundExceedsK, format!("guard constant exceeds {k}"), element.clone());
        }
        if let Some(src) = p.location(&e.from) {
            if e.guard.interval().intersect(&src.invariant.interval()).is_empty() {
                push(
                    DiagnosticCode::UnsatisfiableGuard,
                    format!("guard {:?} is empty within the source invariant", e.guard.to_string()),
                    element,
                );
            }
        }
    }
    if let Some(init) = p.location(&p.initial) {
        if !init.invariant.interval().contains(&Rational::from_integer(Int::from(0))) {
            push(
                DiagnosticCode::InitialStateViolatesInvariant,
                format!("x = 0 violates invariant {:?}", init.invariant.to_string()),
                format!("location {}", init.id),
            );
        }
    }
    ValidationReport { ok: diagnostics.is_empty(), diagnostics }
}

/// Multiplies every constant, `K`, and every edge price by `factor`.
pub fn scale_constants(p: &Ptga, factor: &Int) -> Ptga {
    assert!(factor.is_positive(), "scale factor must be positive");
    Ptga {
        k_bound: &p.k_bound * factor,
        initial: p.initial.clone(),
        locations: p
            .locations
            .iter()
            .map(|l| Location { invariant: l.invariant.scaled(factor), ..l.clone() })
            .collect(),
        edges: p
            .edges
            .iter()
            .map(|e| Edge { guard: e.guard.scaled(factor), price: &e.price * factor, ..e.clone() })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "clocks": ["x"], "k_bound": 1, "initial": "l",
        "locations": [{"id": "l", "owner": "min", "rate": 1, "invariant": "x <= 1"}],
        "edges": [{"from": "l", "action": "a", "guard": "x = 1", "resets": ["x"], "to": "l", "price": 0}]
    }"#;

    fn with(patch: impl FnOnce(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(MINIMAL).unwrap();
        patch(&mut v);
        v.to_string()
    }

    #[test]
    fn parses_minimal_document() {
        let p = parse_ptga(MINIMAL).unwrap();
        assert_eq!(p.locations.len(), 1);
        assert_eq!(p.edges.len(), 1);
        assert!(p.edges[0].resets);
        assert!(validate(&p).ok);
    }

    #[test]
    fn rejects_structural_problems() {
        let two = with(|v| v["clocks"] = serde_json::json!(["x", "y"]));
        assert!(matches!(parse_ptga(&two), Err(ParseError::MoreThanOneClock(_))));
        let y = with(|v| v["clocks"] = serde_json::json!(["y"]));
        assert!(matches!(parse_ptga(&y), Err(ParseError::BadClock(_))));
        let unknown = with(|v| v["edges"][0]["to"] = "m".into());
        assert!(matches!(parse_ptga(&unknown), Err(ParseError::UnknownLocation { .. })));
        let dup = with(|v| {
            let l = v["locations"][0].clone();
            v["locations"].as_array_mut().unwrap().push(l);
        });
        assert!(matches!(parse_ptga(&dup), Err(ParseError::DuplicateLocation(_))));
        let dup_action = with(|v| {
            let e = v["edges"][0].clone();
            v["edges"].as_array_mut().unwrap().push(e);
        });
        assert!(matches!(parse_ptga(&dup_action), Err(ParseError::DuplicateAction { .. })));
        let frac = with(|v| v["edges"][0]["price"] = serde_json::json!(0.5));
        assert!(matches!(parse_ptga(&frac), Err(ParseError::BadNumber { .. })));
        let diag = with(|v| v["edges"][0]["guard"] = "x - y < 1".into());
        assert!(matches!(parse_ptga(&diag), Err(ParseError::Constraint { .. })));
    }

    #[test]
    fn reports_syntax_position() {
        match parse_ptga("{\n  \"clocks\": [\"x\",\n}") {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn validation_diagnostics() {
        let p = parse_ptga(&with(|v| v["locations"][0]["invariant"] = "x >= 1 & x <= 1".into())).unwrap();
        assert!(validate(&p).has(DiagnosticCode::InitialStateViolatesInvariant));
        let p = parse_ptga(&with(|v| v["locations"][0]["rate"] = (-1).into())).unwrap();
        assert!(validate(&p).has(DiagnosticCode::NonBinaryRate));
        let p = parse_ptga(&with(|v| v["locations"][0]["invariant"] = "".into())).unwrap();
        assert!(validate(&p).has(DiagnosticCode::UnboundedInvariant));
        let p = parse_ptga(&with(|v| v["edges"][0]["guard"] = "x = 3".into())).unwrap();
        let r = validate(&p);
        assert!(r.has(DiagnosticCode::BoundExceedsK) && r.has(DiagnosticCode::UnsatisfiableGuard));
        assert!(!r.ok);
    }

    #[test]
    fn scaling() {
        let p = parse_ptga(&with(|v| v["edges"][0]["price"] = 3.into())).unwrap();
        assert_eq!(scale_constants(&p, &Int::from(1)), p);
        let s = scale_constants(&p, &Int::from(5));
        assert_eq!(s.edges[0].guard.to_string(), "x = 5");
        assert_eq!(s.edges[0].price, Int::from(15));
        assert_eq!(s.k_bound, Int::from(5));
        assert_eq!(s.locations[0].rate, p.locations[0].rate);
    }

    #[test]
    fn round_trip() {
        let p = parse_ptga(MINIMAL).unwrap();
        let text = p.to_json();
        assert_eq!(parse_ptga(&text).unwrap(), p);
        assert_eq!(parse_ptga(&text).unwrap().to_json(), text);
    }

    #[test]
    fn huge_constants_survive() {
        let p = parse_ptga(MINIMAL).unwrap();
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        let s = scale_constants(&p, &big);
        assert_eq!(parse_ptga(&s.to_json()).unwrap(), s);
    }
}
