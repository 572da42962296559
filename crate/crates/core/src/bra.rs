//! Boundary region abstraction: boundary actions, their effect, and the finite reachable graph.

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write};

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::Interval;
use crate::ptga::{Owner, Ptga};
use crate::rational::{Int, Rational};
use crate::regions::{all_regions, future_regions, region_of, time_to_boundary, Region};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraState {
    pub location: usize,
    pub valuation: Rational,
    pub region: Region,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Exact,
    #[serde(rename = "lower")]
    LowerBoundary,
    #[serde(rename = "upper")]
    UpperBoundary,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Exact => "exact",
            Flavor::LowerBoundary => "lower",
            Flavor::UpperBoundary => "upper",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryAction {
    pub b: u64,
    pub edge: usize,
    pub action: String,
    pub target_region: Region,
    pub flavor: Flavor,
}

impl fmt::Display for BoundaryAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}, {}, {}", self.action, self.b, self.target_region, self.flavor)
    }
}

/// One outgoing move of a graph state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub action: BoundaryAction,
    pub target: usize,
    /// Reward evaluated at the source valuation.
    pub reward: Rational,
    pub price: Int,
    pub rate: i64,
    pub resets: bool,
    /// The boundary lies below the valuation, so the move takes no time.
    pub delay_zero: bool,
}

/// Equivalence class of a state: location, region of the valuation, and the region component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub location: usize,
    pub val_region: Region,
    pub target_region: Region,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraError {
    #[error("timelock: state {0} has no available boundary action")]
    TimelockDetected(String),
    #[error("action ({0}) is not available in state {1}")]
    NotAvailable(String, String),
    #[error("unknown location {0:?}")]
    UnknownLocation(String),
    #[error("location {0:?} has rate {1}; only 0 and 1 are supported")]
    UnsupportedRate(String, String),
    #[error("clock bound {0} is too large to enumerate regions")]
    BoundTooLarge(String),
    #[error("state {0} does not satisfy its location invariant")]
    InvalidState(String),
    #[error("reachable state {0} has a non-integral valuation")]
    NonIntegralValuation(String),
}

struct Ctx<'a> {
    p: &'a Ptga,
    k: u64,
    inv: Vec<Interval>,
    guard: Vec<Interval>,
    out: Vec<Vec<usize>>,
    target: Vec<usize>,
    rate: Vec<i64>,
}

impl<'a> Ctx<'a> {
    fn new(p: &'a Ptga) -> Result<Self, BraError> {
        let k = p.k_bound.to_u64().filter(|k| *k < u64::MAX / 4).ok_or_else(|| BraError::BoundTooLarge(p.k_bound.to_string()))?;
        let rate = p
            .locations
            .iter()
            .map(|l| match l.rate.to_i64() {
                Some(r @ (0 | 1)) => Ok(r),
                _ => Err(BraError::UnsupportedRate(l.id.clone(), l.rate.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let target = p
            .edges
            .iter()
            .map(|e| p.location_index(&e.to).ok_or_else(|| BraError::UnknownLocation(e.to.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ctx {
            p,
            k,
            inv: p.locations.iter().map(|l| l.invariant.interval()).collect(),
            guard: p.edges.iter().map(|e| e.guard.interval()).collect(),
            out: p.outgoing(),
            target,
            rate,
        })
    }

    fn describe(&self, s: &BraState) -> String {
        format!("({}, {}, {})", self.p.locations[s.location].id, s.valuation, s.region)
    }

    fn check_state(&self, s: &BraState) -> Result<(), BraError> {
        let ok = s.location < self.inv.len()
            && s.region.upper() <= self.k
            && s.region.in_closure(&s.valuation)
            && self.inv[s.location].contains_region(s.region);
        if ok {
            Ok(())
        } else {
            Err(BraError::InvalidState(if s.location < self.inv.len() {
                self.describe(s)
            } else {
                format!("{s:?}")
            }))
        }
    }

    fn actions(&self, s: &BraState) -> Vec<BoundaryAction> {
        let mut acts = Vec::new();
        for &e in &self.out[s.location] {
            let edge = &self.p.edges[e];
            for z in future_regions(s.region, self.k) {
                if !self.inv[s.location].contains_region(z) {
                    break;
                }
                if !self.guard[e].contains_region(z) {
                    continue;
                }
                let landing = if edge.resets { Region::Point(0) } else { z };
                if !self.inv[self.target[e]].contains_region(landing) {
                    continue;
                }
                let mk = |b, flavor| BoundaryAction { b, edge: e, action: edge.action.clone(), target_region: z, flavor };
                match z {
                    Region::Point(j) => acts.push(mk(j, Flavor::Exact)),
                    Region::Open(j) => {
                        acts.push(mk(j, Flavor::LowerBoundary));
                        acts.push(mk(j + 1, Flavor::UpperBoundary));
                    }
                }
            }
        }
        acts
    }

    fn apply(&self, s: &BraState, a: &BoundaryAction) -> (BraState, Transition) {
        let edge = &self.p.edges[a.edge];
        let b = Rational::from_integer(a.b.into());
        let delay = time_to_boundary(&s.valuation, a.b);
        let rate = self.rate[s.location];
        let reward = Rational::from_integer(edge.price.clone()) + Rational::from_integer(rate.into()) * &delay;
        let delay_zero = b < s.valuation;
        let next = if edge.resets {
            BraState { location: self.target[a.edge], valuation: Rational::zero(), region: Region::Point(0) }
        } else {
            let valuation = if delay_zero { s.valuation.clone() } else { b };
            BraState { location: self.target[a.edge], valuation, region: a.target_region }
        };
        let t = Transition {
            action: a.clone(),
            target: usize::MAX,
            reward,
            price: edge.price.clone(),
            rate,
            resets: edge.resets,
            delay_zero,
        };
        (next, t)
    }
}

pub fn available_actions(p: &Ptga, s: &BraState) -> Result<Vec<BoundaryAction>, BraError> {
    let ctx = Ctx::new(p)?;
    ctx.check_state(s)?;
    Ok(ctx.actions(s))
}

pub fn apply_action(p: &Ptga, s: &BraState, a: &BoundaryAction) -> Result<(BraState, Rational), BraError> {
    let ctx = Ctx::new(p)?;
    ctx.check_state(s)?;
    if !ctx.actions(s).contains(a) {
        return Err(BraError::NotAvailable(a.to_string(), ctx.describe(s)));
    }
    let (next, t) = ctx.apply(s, a);
    Ok((next, t.reward))
}

/// The finite game graph of the abstraction. States are stored in the `⪯` order:
/// location declaration index, then region of the valuation, then the region component.
#[derive(Clone, Debug)]
pub struct BraGraph {
    pub k: u64,
    pub location_ids: Vec<String>,
    pub location_owners: Vec<Owner>,
    pub states: Vec<BraState>,
    pub adjacency: Vec<Vec<Transition>>,
    pub start: usize,
    index: HashMap<Vertex, usize>,
}

impl BraGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn owner(&self, v: usize) -> Owner {
        self.location_owners[self.states[v].location]
    }

    pub fn vertex(&self, v: usize) -> Vertex {
        let s = &self.states[v];
        Vertex {
            location: s.location,
            val_region: region_of(&s.valuation, self.k).expect("stored valuations are in range"),
            target_region: s.region,
        }
    }

    pub fn find(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn describe(&self, v: usize) -> String {
        let s = &self.states[v];
        format!("({}, {}, {})", self.location_ids[s.location], s.valuation, s.region)
    }

    pub fn describe_vertex(&self, v: &Vertex) -> String {
        format!("({}, {}, {})", self.location_ids[v.location], v.val_region, v.target_region)
    }
}

type Explored = (Vec<BraState>, Vec<Vec<Transition>>, HashMap<BraState, usize>);

fn explore(ctx: &Ctx, seeds: &[BraState]) -> Explored {
    let mut states: Vec<BraState> = Vec::new();
    let mut index: HashMap<BraState, usize> = HashMap::new();
    let mut adjacency: Vec<Vec<Transition>> = Vec::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if !index.contains_key(s) {
            index.insert(s.clone(), states.len());
            states.push(s.clone());
            adjacency.push(Vec::new());
            queue.push_back(states.len() - 1);
        }
    }
    while let Some(i) = queue.pop_front() {
        let s = states[i].clone();
        let mut out = Vec::new();
        for a in ctx.actions(&s) {
            let (next, mut t) = ctx.apply(&s, &a);
            t.target = *index.entry(next.clone()).or_insert_with(|| {
                states.push(next);
                adjacency.push(Vec::new());
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            out.push(t);
        }
        adjacency[i] = out;
    }
    (states, adjacency, index)
}

fn reachable(adjacency: &[Vec<Transition>], from: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adjacency.len()];
    let mut stack: Vec<usize> = from.into_iter().collect();
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut seen[v], true) {
            stack.extend(adjacency[v].iter().map(|t| t.target).filter(|&w| !seen[w]));
        }
    }
    seen
}

fn finalize(ctx: &Ctx, explored: Explored, keep: &[bool], start: usize) -> BraGraph {
    let (states, adjacency, _) = explored;
    let k = ctx.k;
    let key = |s: &BraState| {
        (s.location, region_of(&s.valuation, k).expect("in range").index(), s.region.index())
    };
    let mut order: Vec<usize> = (0..states.len()).filter(|&i| keep[i]).collect();
    order.sort_by_key(|&i| key(&states[i]));
    let mut renumber = vec![usize::MAX; states.len()];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    let new_states: Vec<BraState> = order.iter().map(|&i| states[i].clone()).collect();
    let new_adj: Vec<Vec<Transition>> = order
        .iter()
        .map(|&i| {
            adjacency[i]
                .iter()
                .map(|t| Transition { target: renumber[t.target], ..t.clone() })
                .collect()
        })
        .collect();
    let mut g = BraGraph {
        k,
        location_ids: ctx.p.locations.iter().map(|l| l.id.clone()).collect(),
        location_owners: ctx.p.locations.iter().map(|l| l.owner).collect(),
        states: new_states,
        adjacency: new_adj,
        start: renumber[start],
        index: HashMap::new(),
    };
    for v in 0..g.len() {
        let prev = g.index.insert(g.vertex(v), v);
        assert!(prev.is_none(), "two states share the class {}", g.describe(v));
    }
    g
}

fn start_state(ctx: &Ctx, start: &str) -> Result<BraState, BraError> {
    let location = ctx.p.location_index(start).ok_or_else(|| BraError::UnknownLocation(start.to_string()))?;
    let s = BraState { location, valuation: Rational::zero(), region: Region::Point(0) };
    ctx.check_state(&s)?;
    Ok(s)
}

/// Breadth-first closure from `(start, 0, {0})`: the corner-point graph.
pub fn build_bra(p: &Ptga, start: &str) -> Result<BraGraph, BraError> {
    let ctx = Ctx::new(p)?;
    let s0 = start_state(&ctx, start)?;
    let explored = explore(&ctx, std::slice::from_ref(&s0));
    let (states, adjacency, _) = &explored;
    let mut dead: Vec<&BraState> = (0..states.len()).filter(|&i| adjacency[i].is_empty()).map(|i| &states[i]).collect();
    dead.sort_by_key(|s| (s.location, s.region.index()));
    if let Some(s) = dead.first() {
        return Err(BraError::TimelockDetected(ctx.describe(s)));
    }
    if let Some(s) = states.iter().find(|s| !s.valuation.is_integer()) {
        return Err(BraError::NonIntegralValuation(ctx.describe(s)));
    }
    let keep = vec![true; states.len()];
    Ok(finalize(&ctx, explored, &keep, 0))
}

/// Closure from `(start, 0, {0})` together with one representative state `(ℓ, rep(r), r)`
/// for every region `r` inside each invariant. Seeds that can run into a dead end are dropped;
/// the start seed must not.
pub fn build_class_bra(p: &Ptga, start: &str) -> Result<BraGraph, BraError> {
    let ctx = Ctx::new(p)?;
    let s0 = start_state(&ctx, start)?;
    let mut seeds = vec![s0.clone()];
    for (l, inv) in ctx.inv.iter().enumerate() {
        for r in all_regions(ctx.k) {
            if inv.contains_region(r) {
                seeds.push(BraState { location: l, valuation: r.representative(), region: r });
            }
        }
    }
    let explored = explore(&ctx, &seeds);
    let (states, adjacency, index) = &explored;
    let n = states.len();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, out) in adjacency.iter().enumerate() {
        for t in out {
            reverse[t.target].push(v);
        }
    }
    let mut doomed = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| adjacency[v].is_empty()).collect();
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut doomed[v], true) {
            stack.extend(reverse[v].iter().copied().filter(|&w| !doomed[w]));
        }
    }
    let start = index[&s0];
    if doomed[start] {
        let seen = reachable(adjacency, [start]);
        let mut dead: Vec<&BraState> =
            (0..n).filter(|&v| seen[v] && adjacency[v].is_empty()).map(|v| &states[v]).collect();
        dead.sort_by_key(|s| (s.location, s.region.index()));
        return Err(BraError::TimelockDetected(ctx.describe(dead[0])));
    }
    let good = seeds.iter().map(|s| index[s]).filter(|&v| !doomed[v]);
    let keep = reachable(adjacency, good);
    Ok(finalize(&ctx, explored, &keep, start))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz text; node label `ℓ | ν | ζ`, edge label `a, b, flavor, reward`.
pub fn export_dot(g: &BraGraph) -> String {
    let mut out = String::from("digraph bra {\n  node [shape=box];\n");
    for (v, s) in g.states.iter().enumerate() {
        let shape = if g.owner(v) == Owner::Max { ", style=rounded" } else { "" };
        let label = format!("{} | {} | {}", g.location_ids[s.location], s.valuation, s.region);
        let _ = writeln!(out, "  s{v} [label=\"{}\"{shape}];", dot_escape(&label));
    }
    for (v, ts) in g.adjacency.iter().enumerate() {
        for t in ts {
            let label = format!("{}, {}, {}, {}", t.action.action, t.action.b, t.action.flavor, t.reward);
            let _ = writeln!(out, "  s{v} -> s{} [label=\"{}\"];", t.target, dot_escape(&label));
        }
    }
    out.push_str("}\n");
    out
}

impl Transition {
    pub fn b_int(&self) -> Int {
        Int::from(self.action.b)
    }
}
