use super::{SolveError, Strategy};
use crate::bra::{BraGraph, Transition};
use crate::finite::optimal_cycle_nodes;
use crate::rational::{Int, Rational};
use crate::regions::Region;
use crate::simplefn::{compare_on_region, stay_compose, step_compose, SimpleFn};

/// Gain and bias of every vertex under a fixed profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub gain: Vec<Int>,
    pub bias: Vec<SimpleFn>,
}

/// `ν ↦ reward(ν) − g + next(ν')` for the move `t` out of vertex `v`, over the region of `v`'s valuation.
pub fn bias_candidate(g: &BraGraph, v: usize, t: &Transition, gain: &Int, next: &SimpleFn) -> SimpleFn {
    if !t.delay_zero {
        return step_compose(t.rate, &t.price, &t.b_int(), t.resets, gain, next);
    }
    if t.resets {
        return step_compose(0, &t.price, &Int::from(0), true, gain, next);
    }
    match g.vertex(v).val_region {
        Region::Point(i) => step_compose(0, &t.price, &Int::from(i), false, gain, next),
        Region::Open(_) => stay_compose(&t.price, gain, next),
    }
}

pub(crate) fn merge(g: &BraGraph, mu: &Strategy, chi: &Strategy) -> Result<Vec<usize>, SolveError> {
    (0..g.len())
        .map(|v| {
            mu[v]
                .or(chi[v])
                .filter(|&a| a < g.adjacency[v].len())
                .ok_or_else(|| SolveError::IncompleteProfile(g.describe(v)))
        })
        .collect()
}

/// Zero-player evaluation: each cycle of the functional graph gets its average reward as gain
/// and bias zero at its smallest vertex; biases flow backwards along the chosen moves.
pub fn eval_zero_player(g: &BraGraph, mu: &Strategy, chi: &Strategy) -> Result<Evaluation, SolveError> {
    let choice = merge(g, mu, chi)?;
    let n = g.len();
    let succ = |v: usize| g.adjacency[v][choice[v]].target;
    let mut state = vec![0u8; n];
    let mut gain: Vec<Option<Int>> = vec![None; n];
    let mut bias: Vec<Option<SimpleFn>> = vec![None; n];
    for v0 in 0..n {
        if state[v0] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = v0;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = succ(v);
        }
        if state[v] == 1 {
            let at = path.iter().position(|&u| u == v).expect("on the current path");
            let cycle: Vec<usize> = path.split_off(at);
            let total: Rational = cycle.iter().map(|&u| g.adjacency[u][choice[u]].reward.clone()).sum();
            let mean = total / Rational::from_integer(cycle.len().into());
            if !mean.is_integer() {
                return Err(SolveError::NonIntegralGain {
                    cycle: cycle.iter().map(|&u| g.describe(u)).collect(),
                    value: mean,
                });
            }
            let mean = mean.to_integer();
            for &u in &cycle {
                let t = &g.adjacency[u][choice[u]];
                if !g.vertex(u).val_region.is_thin() && !(t.delay_zero || t.rate == 0) {
                    return Err(SolveError::NonPointCycleVertex(g.describe(u)));
                }
            }
            let a = cycle.iter().position(|&u| u == *cycle.iter().min().unwrap()).unwrap();
            let ring: Vec<usize> = cycle[a..].iter().chain(&cycle[..a]).copied().collect();
            bias[ring[0]] = Some(SimpleFn::constant(0));
            for j in (1..ring.len()).rev() {
                let u = ring[j];
                let next = bias[ring[(j + 1) % ring.len()]].clone().expect("set");
                bias[u] = Some(bias_candidate(g, u, &g.adjacency[u][choice[u]], &mean, &next));
            }
            let anchor = ring[0];
            let back = bias[ring[1 % ring.len()]].clone().expect("set");
            let closed = bias_candidate(g, anchor, &g.adjacency[anchor][choice[anchor]], &mean, &back);
            let z = g.vertex(anchor).val_region;
            if compare_on_region(&closed, &SimpleFn::constant(0), z).is_ne() {
                return Err(SolveError::InconsistentCycle(g.describe(anchor)));
            }
            for &u in &ring {
                gain[u] = Some(mean.clone());
                state[u] = 2;
            }
        }
        for &u in path.iter().rev() {
            let w = succ(u);
            let gw = gain[w].clone().expect("successor evaluated");
            let next = bias[w].clone().expect("successor evaluated");
            bias[u] = Some(bias_candidate(g, u, &g.adjacency[u][choice[u]], &gw, &next));
            gain[u] = Some(gw);
            state[u] = 2;
        }
    }
    Ok(Evaluation {
        gain: gain.into_iter().map(|x| x.expect("all evaluated")).collect(),
        bias: bias.into_iter().map(|x| x.expect("all evaluated")).collect(),
    })
}

/// Re-anchors Min's converged response to `chi`: the smallest vertex of every zero-shifted
/// cycle of equal-gain moves may stop at bias zero, and every vertex takes the cheapest way
/// to such a stop. Falls back to `e` when the result fails the equations.
pub fn normalize_response(g: &BraGraph, chi: &Strategy, e: &Evaluation) -> Evaluation {
    let n = g.len();
    let moves: Vec<Vec<usize>> = (0..n)
        .map(|v| match chi[v] {
            Some(a) => vec![a],
            None => (0..g.adjacency[v].len()).filter(|&a| e.gain[g.adjacency[v][a].target] == e.gain[v]).collect(),
        })
        .collect();
    let mut shifted: Vec<Vec<(usize, Rational)>> = (0..n)
        .map(|v| {
            let thin = g.vertex(v).val_region.is_thin();
            moves[v]
                .iter()
                .map(|&a| &g.adjacency[v][a])
                .filter(|t| thin || t.delay_zero || t.rate == 0)
                .map(|t| (t.target, &t.reward - Rational::from_integer(e.gain[v].clone())))
                .collect()
        })
        .collect();
    shifted.push((0..n).map(|v| (v, Rational::from_integer(0.into()))).collect());
    let (on_cycle, tight) = optimal_cycle_nodes(&shifted, n, &Rational::from_integer(0.into()));
    // Zero-shifted cycles are the cycles of tight moves; `u` anchors one it is the smallest vertex of.
    let closes_at = |u: usize| {
        let mut seen = vec![false; n];
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            for &w in &tight[v] {
                if w == u {
                    return true;
                }
                if w > u && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    };
    let anchor: Vec<bool> = (0..n).map(|u| on_cycle[u] && closes_at(u)).collect();

    let mut bias: Vec<Option<SimpleFn>> = (0..n).map(|v| anchor[v].then(|| SimpleFn::constant(0))).collect();
    let mut settled = false;
    for _ in 0..=n {
        let mut changed = false;
        for v in 0..n {
            let z = g.vertex(v).val_region;
            for &a in &moves[v] {
                let t = &g.adjacency[v][a];
                let Some(next) = &bias[t.target] else { continue };
                let cand = bias_candidate(g, v, t, &e.gain[v], next);
                if bias[v].as_ref().is_none_or(|b| compare_on_region(&cand, b, z).is_lt()) {
                    bias[v] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }
    let Some(bias) = bias.into_iter().collect::<Option<Vec<_>>>().filter(|_| settled) else {
        return e.clone();
    };
    let solves = (0..n).all(|v| {
        let z = g.vertex(v).val_region;
        let mut cands = moves[v].iter().map(|&a| {
            let t = &g.adjacency[v][a];
            bias_candidate(g, v, t, &e.gain[v], &bias[t.target])
        });
        let first = cands.next().expect("a move keeps the gain");
        let best = cands.fold(first, |b, c| if compare_on_region(&c, &b, z).is_lt() { c } else { b });
        compare_on_region(&best, &bias[v], z).is_eq()
    });
    if solves {
        Evaluation { gain: e.gain.clone(), bias }
    } else {
        e.clone()
    }
}
