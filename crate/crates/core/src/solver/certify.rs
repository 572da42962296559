use std::fmt;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::evaluate::bias_candidate;
use super::integral::GainBiasSolution;
use crate::bra::{BraGraph, Vertex};
use crate::ptga::{scale_constants, Owner, Ptga};
use crate::rational::Rational;
use crate::regions::{future_regions, region_of, Region};
use crate::simplefn::{compare_on_region, extremum_on_region, Direction, SimpleFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equation {
    Gain,
    Bias,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub vertex: String,
    pub equation: Equation,
    pub lhs: String,
    pub rhs: String,
    pub action: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl CertificateReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        CertificateReport { ok: violations.is_empty(), violations }
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  {:?} at {}: {} vs {}", v.equation, v.vertex, v.lhs, v.rhs)?;
            if let Some(a) = &v.action {
                write!(f, " (action {a})")?;
            }
        }
        Ok(())
    }
}

fn direction(owner: Owner) -> Direction {
    match owner {
        Owner::Min => Direction::Min,
        Owner::Max => Direction::Max,
    }
}

fn pick<T: Ord + Clone>(owner: Owner, xs: impl Iterator<Item = (T, usize)>) -> Option<(T, usize)> {
    xs.reduce(|a, b| {
        let better = match owner {
            Owner::Min => b.0 < a.0,
            Owner::Max => b.0 > a.0,
        };
        if better {
            b
        } else {
            a
        }
    })
}

/// Recomputes both optimality equations at every vertex and lists each mismatch.
pub fn verify_opt(g: &BraGraph, gain: &[Rational], bias: &[SimpleFn]) -> CertificateReport {
    let mut violations = Vec::new();
    for v in 0..g.len() {
        let owner = g.owner(v);
        let acts = &g.adjacency[v];
        let vertex = g.describe(v);
        let Some((best, at)) = pick(owner, acts.iter().enumerate().map(|(i, t)| (gain[t.target].clone(), i))) else {
            continue;
        };
        if best != gain[v] {
            violations.push(Violation {
                vertex,
                equation: Equation::Gain,
                lhs: gain[v].to_string(),
                rhs: best.to_string(),
                action: Some(acts[at].action.to_string()),
            });
            continue;
        }
        if !gain[v].is_integer() {
            violations.push(Violation {
                vertex,
                equation: Equation::Gain,
                lhs: gain[v].to_string(),
                rhs: "an integer".into(),
                action: None,
            });
            continue;
        }
        let gv = gain[v].to_integer();
        let equal: Vec<usize> = (0..acts.len()).filter(|&i| gain[acts[i].target] == gain[v]).collect();
        let cands: Vec<SimpleFn> =
            equal.iter().map(|&i| bias_candidate(g, v, &acts[i], &gv, &bias[acts[i].target])).collect();
        let z = g.vertex(v).val_region;
        let (best, j) = extremum_on_region(&cands, z, direction(owner)).expect("the optimal move has equal gain");
        if compare_on_region(&bias[v], &best, z).is_ne() {
            violations.push(Violation {
                vertex,
                equation: Equation::Bias,
                lhs: bias[v].to_string(),
                rhs: best.to_string(),
                action: Some(acts[equal[j]].action.to_string()),
            });
        }
    }
    CertificateReport::from_violations(violations)
}

/// Checks the optimality equations of the timed game at concrete states `(ℓ, ν)`: for each
/// edge and each future region, the best delay into that region is found at one of its
/// closure endpoints, and the lifted gain and bias must match the best option.
pub fn check_lift(sol: &GainBiasSolution, ptga: &Ptga, samples: &[(String, Rational)]) -> CertificateReport {
    let p = scale_constants(ptga, &sol.scale);
    let g = &sol.graph;
    let k = g.k;
    let scale = Rational::from_integer(sol.scale.clone());
    let inv: Vec<_> = p.locations.iter().map(|l| l.invariant.interval()).collect();
    let out = p.outgoing();
    let mut violations = Vec::new();
    for (loc, v) in samples {
        let here = format!("({loc}, {v})");
        let mut fail = |equation, lhs: String, rhs: String, action: Option<String>| {
            violations.push(Violation { vertex: here.clone(), equation, lhs, rhs, action })
        };
        let Some(li) = p.location_index(loc) else {
            fail(Equation::Gain, "unknown location".into(), loc.clone(), None);
            continue;
        };
        let mu = v * &scale;
        let class = region_of(&mu, k).ok().filter(|z| inv[li].contains_region(*z));
        let Some(vi) = class.and_then(|z| g.find(&Vertex { location: li, val_region: z, target_region: z })) else {
            fail(Equation::Gain, "no solved class".into(), here.clone(), None);
            continue;
        };
        let z = class.expect("found");
        let owner = p.locations[li].owner;
        let (gv, bv) = (&sol.gain[vi], &sol.bias[vi]);
        let rate = Rational::from_integer(p.locations[li].rate.clone());
        let mut options: Vec<(Rational, Rational, String)> = Vec::new();
        for &e in &out[li] {
            let edge = &p.edges[e];
            let ti = p.location_index(&edge.to).expect("parsed arena");
            let guard = edge.guard.interval();
            for zp in future_regions(z, k) {
                if !inv[li].contains_region(zp) {
                    break;
                }
                let landing = if edge.resets { Region::Point(0) } else { zp };
                if !guard.contains_region(zp) || !inv[ti].contains_region(landing) {
                    continue;
                }
                let desc = format!("{} into {zp}", edge.action);
                let Some(wi) = g.find(&Vertex { location: ti, val_region: landing, target_region: landing }) else {
                    fail(Equation::Gain, "successor class missing".into(), desc, None);
                    continue;
                };
                let delays: Vec<Rational> = match zp {
                    Region::Point(j) => vec![Rational::from_integer(j.into()) - &mu],
                    Region::Open(j) => {
                        let lo = Rational::from_integer(j.into()) - &mu;
                        let lo = if lo < Rational::zero() { Rational::zero() } else { lo };
                        vec![lo, Rational::from_integer((j + 1).into()) - &mu]
                    }
                };
                let values = delays.iter().map(|t| {
                    let landed = if edge.resets { Rational::zero() } else { &mu + t };
                    Rational::from_integer(edge.price.clone()) + &rate * t - gv + sol.bias[wi].eval(&landed)
                });
                let best = pick(owner, values.map(|x| (x, 0))).expect("one or two delays").0;
                options.push((sol.gain[wi].clone(), best, desc));
            }
        }
        let Some((best_gain, at)) = pick(owner, options.iter().enumerate().map(|(i, o)| (o.0.clone(), i))) else {
            fail(Equation::Gain, "no move".into(), "a move".into(), None);
            continue;
        };
        if best_gain != *gv {
            fail(Equation::Gain, gv.to_string(), best_gain.to_string(), Some(options[at].2.clone()));
            continue;
        }
        let (best_bias, at) = pick(
            owner,
            options.iter().enumerate().filter(|(_, o)| o.0 == *gv).map(|(i, o)| (o.1.clone(), i)),
        )
        .expect("the optimal option has equal gain");
        let lhs = bv.eval(&mu);
        if lhs != best_bias {
            fail(Equation::Bias, lhs.to_string(), best_bias.to_string(), Some(options[at].2.clone()));
        }
    }
    CertificateReport::from_violations(violations)
}

/// Random states `(ℓ, ν)` (unscaled) whose class was solved.
pub fn lift_samples<R: Rng>(sol: &GainBiasSolution, n: usize, rng: &mut R) -> Vec<(String, Rational)> {
    let g = &sol.graph;
    let classes: Vec<Vertex> = (0..g.len()).map(|v| g.vertex(v)).filter(|v| v.val_region == v.target_region).collect();
    let scale = Rational::from_integer(sol.scale.clone());
    (0..n)
        .map(|_| {
            let c = classes[rng.gen_range(0..classes.len())];
            let scaled = match c.val_region {
                Region::Point(j) => Rational::from_integer(j.into()),
                Region::Open(j) => {
                    let q: i64 = rng.gen_range(2..=12);
                    let num: i64 = rng.gen_range(1..q);
                    Rational::from_integer(j.into()) + Rational::new(num.into(), q.into())
                }
            };
            (g.location_ids[c.location].clone(), scaled / &scale)
        })
        .collect()
}
