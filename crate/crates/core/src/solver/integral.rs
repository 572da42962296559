use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use super::certify::{verify_opt, CertificateReport};
use super::improve::solve_two_player;
use super::{SolveError, SolveOptions, Strategy};
use crate::bra::{build_bra, build_class_bra, BoundaryAction, BraGraph, Vertex};
use crate::finite::simple_cycles;
use crate::ptga::{scale_constants, validate, Owner, Ptga};
use crate::rational::{Int, Rational};
use crate::regions::region_of;
use crate::simplefn::SimpleFn;

/// Where the search for an integralizing scale starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InitialScale {
    /// Start at 1 and grow by the denominator of each non-integral gain met.
    #[default]
    One,
    /// Start at the lcm of the simple-cycle lengths of the unscaled corner-point graph.
    CycleLcm,
}

/// Certified solution of the scaled abstraction. Gains and biases are in scaled units.
#[derive(Clone, Debug)]
pub struct GainBiasSolution {
    pub scale: Int,
    /// Unscaled value at `(initial location, 0)`.
    pub value: Rational,
    pub graph: BraGraph,
    pub gain: Vec<Rational>,
    pub bias: Vec<SimpleFn>,
    pub min_strategy: Strategy,
    pub max_strategy: Strategy,
    pub certificate: CertificateReport,
    pub evaluations: usize,
    /// Scale factors tried, in order, ending with `scale`.
    pub scales_tried: Vec<Int>,
}

/// Lcm of the lengths of all simple cycles of `g` (1 if there are none).
pub fn cycle_lcm(g: &BraGraph, cap: usize) -> Result<Int, SolveError> {
    let succ: Vec<Vec<usize>> = g.adjacency.iter().map(|ts| ts.iter().map(|t| t.target).collect()).collect();
    let cycles = simple_cycles(&succ, cap)?;
    Ok(cycles.iter().fold(Int::one(), |acc, c| acc.lcm(&Int::from(c.len()))))
}

/// Scales the arena until every evaluated gain is integral, then solves and certifies it.
pub fn integralize_and_solve(ptga: &Ptga, start: &str, opts: &SolveOptions) -> Result<GainBiasSolution, SolveError> {
    let report = validate(ptga);
    if !report.ok {
        return Err(SolveError::Invalid(report));
    }
    if ptga.location_index(start).is_none() {
        return Err(SolveError::UnknownLocation(start.to_string()));
    }
    let mut scale = match opts.initial_scale {
        InitialScale::One => Int::one(),
        InitialScale::CycleLcm => cycle_lcm(&build_bra(ptga, start)?, opts.cycle_cap)?,
    };
    let mut scales_tried = Vec::new();
    loop {
        scales_tried.push(scale.clone());
        let scaled = scale_constants(ptga, &scale);
        let graph = build_class_bra(&scaled, start)?;
        match solve_two_player(&graph, opts) {
            Ok(r) => {
                let gain: Vec<Rational> = r.evaluation.gain.into_iter().map(Rational::from_integer).collect();
                let certificate = verify_opt(&graph, &gain, &r.evaluation.bias);
                if !certificate.ok {
                    return Err(SolveError::CertificateFailed(certificate.violations.len()));
                }
                let value = &gain[graph.start] / Rational::from_integer(scale.clone());
                return Ok(GainBiasSolution {
                    scale,
                    value,
                    graph,
                    gain,
                    bias: r.evaluation.bias,
                    min_strategy: r.mu,
                    max_strategy: r.chi,
                    certificate,
                    evaluations: r.evaluations,
                    scales_tried,
                });
            }
            Err(SolveError::NonIntegralGain { value, .. }) => {
                let next = &scale * value.denom();
                if next > opts.max_scale {
                    return Err(SolveError::ScaleEscalationExceeded { limit: opts.max_scale.clone(), gain: value });
                }
                scale = next;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Unscaled value at `(loc, v)`, read from the solved class `(loc, [𝓛·v], [𝓛·v])`.
pub fn value_at(sol: &GainBiasSolution, ptga: &Ptga, loc: &str, v: &Rational) -> Result<Rational, SolveError> {
    let li = ptga.location_index(loc).ok_or_else(|| SolveError::UnknownLocation(loc.to_string()))?;
    let outside = || SolveError::OutsideInvariant { location: loc.to_string(), valuation: v.clone() };
    if !ptga.locations[li].invariant.interval().contains(v) {
        return Err(outside());
    }
    let scale = Rational::from_integer(sol.scale.clone());
    let z = region_of(&(v * &scale), sol.graph.k).map_err(|_| outside())?;
    let idx = sol
        .graph
        .find(&Vertex { location: li, val_region: z, target_region: z })
        .ok_or_else(|| SolveError::UnreachableStateClass { location: loc.to_string(), valuation: v.clone() })?;
    Ok(&sol.gain[idx] / scale)
}

/// Whether the value at `(loc, 0)` is strictly below `r`.
pub fn decide_mpg(ptga: &Ptga, loc: &str, r: &Rational, opts: &SolveOptions) -> Result<bool, SolveError> {
    let sol = integralize_and_solve(ptga, loc, opts)?;
    Ok(value_at(&sol, ptga, loc, &Rational::from_integer(0.into()))? < *r)
}

#[derive(Serialize)]
struct VertexJson<'a> {
    location: &'a str,
    val_region: String,
    target_region: String,
    gain: String,
    bias: &'a SimpleFn,
}

#[derive(Serialize)]
struct ChoiceJson<'a> {
    location: &'a str,
    val_region: String,
    target_region: String,
    action: &'a str,
    b: u64,
    region: String,
    flavor: crate::bra::Flavor,
}

#[derive(Serialize)]
struct StrategiesJson<'a> {
    min: Vec<ChoiceJson<'a>>,
    max: Vec<ChoiceJson<'a>>,
}

#[derive(Serialize)]
struct SolutionJson<'a> {
    scale: serde_json::Number,
    value: String,
    vertices: Vec<VertexJson<'a>>,
    strategies: StrategiesJson<'a>,
    certificate: &'a CertificateReport,
}

impl GainBiasSolution {
    pub fn vertex(&self, v: usize) -> Vertex {
        self.graph.vertex(v)
    }

    /// The regionally constant strategy of `owner` as a map from vertex classes to actions.
    pub fn rcps(&self, owner: Owner) -> BTreeMap<Vertex, BoundaryAction> {
        let s = if owner == Owner::Min { &self.min_strategy } else { &self.max_strategy };
        (0..self.graph.len())
            .filter_map(|v| s[v].map(|a| (self.graph.vertex(v), self.graph.adjacency[v][a].action.clone())))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let g = &self.graph;
        let choices = |s: &Strategy| -> Vec<ChoiceJson<'_>> {
            (0..g.len())
                .filter_map(|v| {
                    let a = &g.adjacency[v][s[v]?].action;
                    let x = g.vertex(v);
                    Some(ChoiceJson {
                        location: &g.location_ids[x.location],
                        val_region: x.val_region.to_string(),
                        target_region: x.target_region.to_string(),
                        action: &a.action,
                        b: a.b,
                        region: a.target_region.to_string(),
                        flavor: a.flavor,
                    })
                })
                .collect()
        };
        let doc = SolutionJson {
            scale: self.scale.to_string().parse().expect("integer"),
            value: self.value.to_string(),
            vertices: (0..g.len())
                .map(|v| {
                    let x = g.vertex(v);
                    VertexJson {
                        location: &g.location_ids[x.location],
                        val_region: x.val_region.to_string(),
                        target_region: x.target_region.to_string(),
                        gain: self.gain[v].to_string(),
                        bias: &self.bias[v],
                    }
                })
                .collect(),
            strategies: StrategiesJson { min: choices(&self.min_strategy), max: choices(&self.max_strategy) },
            certificate: &self.certificate,
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }
}
