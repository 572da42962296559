use std::cmp::Ordering;
use std::collections::HashSet;

use super::evaluate::{bias_candidate, eval_zero_player, normalize_response, Evaluation};
use super::{SolveError, SolveOptions, Strategy};
use crate::bra::BraGraph;
use crate::ptga::Owner;
use crate::simplefn::{compare_on_region, SimpleFn};

/// Lowest-index action at every vertex of `owner`.
pub fn initial_strategy(g: &BraGraph, owner: Owner) -> Strategy {
    (0..g.len()).map(|v| (g.owner(v) == owner).then_some(0)).collect()
}

/// Compares `(G(succ), candidate bias)` pairs over the region of `v`'s valuation.
fn compare_moves(g: &BraGraph, v: usize, e: &Evaluation, a: usize, b: usize) -> Ordering {
    let (ta, tb) = (&g.adjacency[v][a], &g.adjacency[v][b]);
    let by_gain = e.gain[ta.target].cmp(&e.gain[tb.target]);
    if by_gain.is_ne() {
        return by_gain;
    }
    let gv = &e.gain[v];
    let fa: SimpleFn = bias_candidate(g, v, ta, gv, &e.bias[ta.target]);
    let fb: SimpleFn = bias_candidate(g, v, tb, gv, &e.bias[tb.target]);
    compare_on_region(&fa, &fb, g.vertex(v).val_region)
}

fn improve(g: &BraGraph, owner: Owner, current: &Strategy, e: &Evaluation) -> Strategy {
    let want = if owner == Owner::Min { Ordering::Less } else { Ordering::Greater };
    let mut next = current.clone();
    for v in (0..g.len()).filter(|&v| g.owner(v) == owner) {
        let cur = current[v].expect("strategy is total on its owner's vertices");
        let best = (0..g.adjacency[v].len())
            .reduce(|best, a| if compare_moves(g, v, e, a, best) == want { a } else { best })
            .expect("deadlock-free graph");
        if compare_moves(g, v, e, best, cur) == want {
            next[v] = Some(best);
        }
    }
    next
}

/// Switches a Min vertex only to a lexicographically smaller `(G(succ), bias)` move.
pub fn improve_min(g: &BraGraph, mu: &Strategy, e: &Evaluation) -> Strategy {
    improve(g, Owner::Min, mu, e)
}

/// Switches a Max vertex only to a lexicographically larger `(G(succ), bias)` move.
pub fn improve_max(g: &BraGraph, chi: &Strategy, e: &Evaluation) -> Strategy {
    improve(g, Owner::Max, chi, e)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub evaluation: Evaluation,
    /// Vertices whose choice changed to produce this step's profile.
    pub switched: Vec<usize>,
}

/// Evaluations in order: for each outer round, the inner Min steps, the last being the raw best response.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub rounds: Vec<Vec<Step>>,
    /// Max vertices switched before each round (empty for the first).
    pub max_switched: Vec<Vec<usize>>,
    /// Min's converged response of each round with its biases re-anchored.
    pub responses: Vec<Evaluation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoPlayer {
    pub evaluation: Evaluation,
    pub mu: Strategy,
    pub chi: Strategy,
    pub evaluations: usize,
    pub trace: Option<Trace>,
}

fn diff(a: &Strategy, b: &Strategy) -> Vec<usize> {
    (0..a.len()).filter(|&v| a[v] != b[v]).collect()
}

/// Nested strategy improvement: Max improves against Min's converged response.
pub fn solve_two_player(g: &BraGraph, opts: &SolveOptions) -> Result<TwoPlayer, SolveError> {
    let mut mu = initial_strategy(g, Owner::Min);
    let mut chi = initial_strategy(g, Owner::Max);
    let mut seen: HashSet<(Strategy, Strategy)> = HashSet::new();
    let mut evaluations = 0usize;
    let mut trace = opts.trace.then(Trace::default);
    let mut max_switched = Vec::new();
    loop {
        let mut round = Vec::new();
        let mut min_switched = Vec::new();
        let evaluation = loop {
            if evaluations >= opts.max_iters {
                return Err(SolveError::IterationCapExceeded(opts.max_iters));
            }
            if !seen.insert((mu.clone(), chi.clone())) {
                return Err(SolveError::ProfileRevisited(evaluations));
            }
            evaluations += 1;
            let e = eval_zero_player(g, &mu, &chi)?;
            let better = improve_min(g, &mu, &e);
            if trace.is_some() {
                round.push(Step { evaluation: e.clone(), switched: std::mem::take(&mut min_switched) });
            }
            if better == mu {
                break normalize_response(g, &chi, &e);
            }
            min_switched = diff(&mu, &better);
            mu = better;
        };
        if let Some(t) = trace.as_mut() {
            t.responses.push(evaluation.clone());
            t.rounds.push(round);
            t.max_switched.push(std::mem::take(&mut max_switched));
        }
        let better = improve_max(g, &chi, &evaluation);
        if better == chi {
            return Ok(TwoPlayer { evaluation, mu, chi, evaluations, trace });
        }
        max_switched = diff(&chi, &better);
        chi = better;
    }
}
