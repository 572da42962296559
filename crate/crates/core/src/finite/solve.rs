use std::cmp::Ordering;

use super::{min_cycle_mean, optimal_cycle_nodes, FiniteArena, FiniteError};
use crate::ptga::Owner;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestResponse {
    /// Chosen edge per Min node.
    pub mu: Vec<Option<usize>>,
    pub gain: Vec<Rational>,
    pub bias: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSolution {
    pub gain: Vec<Rational>,
    pub bias: Vec<Rational>,
    pub min_strategy: Vec<Option<usize>>,
    pub max_strategy: Vec<Option<usize>>,
    pub iterations: usize,
}

fn check_strategy(arena: &FiniteArena, chi: &[Option<usize>]) -> Result<(), FiniteError> {
    if chi.len() != arena.len() {
        return Err(FiniteError::BadStrategy(format!("{} entries for {} nodes", chi.len(), arena.len())));
    }
    for (v, &choice) in chi.iter().enumerate() {
        let ok = match (arena.owner(v), choice) {
            (Owner::Max, Some(e)) => arena.out(v).contains(&e),
            (Owner::Min, None) => true,
            _ => false,
        };
        if !ok {
            return Err(FiniteError::BadStrategy(format!("entry for node {:?}", arena.nodes()[v].id)));
        }
    }
    Ok(())
}

/// Min's best response to `chi`: gains are the cheapest reachable cycle means; biases are
/// shortest `G`-shifted distances, inside equal-gain moves, to any node on a zero-weight
/// shifted cycle.
pub fn best_response_min(arena: &FiniteArena, chi: &[Option<usize>]) -> Result<BestResponse, FiniteError> {
    check_strategy(arena, chi)?;
    let n = arena.len();
    let edges_of = |v: usize| -> Vec<usize> { chi[v].map_or_else(|| arena.out(v).to_vec(), |e| vec![e]) };
    let adj = arena.restricted(chi);
    let gain = (0..n).map(|s| min_cycle_mean(&adj, s)).collect::<Result<Vec<_>, _>>()?;

    // Equal-gain moves with shifted weights, plus a virtual source feeding every node.
    let mut shifted: Vec<Vec<(usize, Rational)>> = (0..n)
        .map(|u| {
            edges_of(u)
                .into_iter()
                .map(|e| arena.edge(e))
                .filter(|e| gain[e.to] == gain[u])
                .map(|e| (e.to, &e.weight - &gain[u]))
                .collect()
        })
        .collect();
    shifted.push((0..n).map(|v| (v, Rational::from_integer(0.into()))).collect());
    let (anchor, _) = optimal_cycle_nodes(&shifted, n, &Rational::from_integer(0.into()));

    let mut bias: Vec<Option<Rational>> = (0..n).map(|v| anchor[v].then(|| Rational::from_integer(0.into()))).collect();
    for round in 0..=n {
        let mut changed = false;
        for u in 0..n {
            for (w, x) in &shifted[u] {
                let Some(bw) = &bias[*w] else { continue };
                let cand = x + bw;
                if bias[u].as_ref().is_none_or(|b| cand < *b) {
                    bias[u] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        assert!(round < n, "negative shifted cycle among equal-gain moves");
    }
    let bias: Vec<Rational> = bias.into_iter().map(|b| b.expect("every node reaches an optimal cycle")).collect();

    let mu = (0..n)
        .map(|s| match arena.owner(s) {
            Owner::Max => None,
            Owner::Min => arena.out(s).iter().copied().find(|&e| {
                let e = arena.edge(e);
                gain[e.to] == gain[s] && bias[s] == &e.weight - &gain[s] + &bias[e.to]
            }),
        })
        .collect::<Vec<_>>();
    debug_assert!((0..n).all(|s| arena.owner(s) == Owner::Max || mu[s].is_some()));
    Ok(BestResponse { mu, gain, bias })
}

fn lex(a: &(Rational, Rational), b: &(Rational, Rational)) -> Ordering {
    a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1))
}

fn check_monotone(
    arena: &FiniteArena,
    before: &BestResponse,
    after: &BestResponse,
    old_chi: &[Option<usize>],
    new_chi: &[Option<usize>],
) -> Result<(), FiniteError> {
    for s in 0..arena.len() {
        let id = &arena.nodes()[s].id;
        let (g, g2) = (&before.gain[s], &after.gain[s]);
        if g2 < g {
            return Err(FiniteError::MonotonicityViolated(format!("gain at {id} fell from {g} to {g2}")));
        }
        let (b, b2) = (&before.bias[s], &after.bias[s]);
        if g2 == g && b2 < b {
            return Err(FiniteError::MonotonicityViolated(format!("bias at {id} fell from {b} to {b2}")));
        }
        if old_chi[s] != new_chi[s] && g2 == g && b2 == b {
            return Err(FiniteError::MonotonicityViolated(format!("switch at {id} did not improve")));
        }
    }
    Ok(())
}

/// Strategy improvement for Max against Min best responses.
pub fn solve_finite_mpg(arena: &FiniteArena, max_iters: usize) -> Result<FiniteSolution, FiniteError> {
    let n = arena.len();
    let mut chi: Vec<Option<usize>> =
        (0..n).map(|v| (arena.owner(v) == Owner::Max).then(|| arena.out(v)[0])).collect();
    let mut previous: Option<(BestResponse, Vec<Option<usize>>)> = None;
    for iteration in 1..=max_iters {
        let br = best_response_min(arena, &chi)?;
        if let Some((before, old_chi)) = &previous {
            check_monotone(arena, before, &br, old_chi, &chi)?;
        }
        let key = |s: usize, e: usize| {
            let e = arena.edge(e);
            (br.gain[e.to].clone(), &e.weight - &br.gain[s] + &br.bias[e.to])
        };
        let mut next = chi.clone();
        for s in (0..n).filter(|&s| arena.owner(s) == Owner::Max) {
            let current = chi[s].expect("Max node has a choice");
            let best = arena
                .out(s)
                .iter()
                .map(|&e| (e, key(s, e)))
                .reduce(|a, b| if lex(&b.1, &a.1) == Ordering::Greater { b } else { a })
                .expect("nonempty");
            if lex(&key(s, current), &best.1) == Ordering::Less {
                next[s] = Some(best.0);
            }
        }
        if next == chi {
            return Ok(FiniteSolution {
                gain: br.gain,
                bias: br.bias,
                min_strategy: br.mu,
                max_strategy: chi,
                iterations: iteration,
            });
        }
        previous = Some((br, chi));
        chi = next;
    }
    Err(FiniteError::IterationCapExceeded(max_iters))
}

/// Violations of the optimality equations, one message each; empty means `(G, B)` solves them.
pub fn verify_finite(arena: &FiniteArena, gain: &[Rational], bias: &[Rational]) -> Vec<String> {
    let mut violations = Vec::new();
    for s in 0..arena.len() {
        let id = &arena.nodes()[s].id;
        let pick = |xs: Vec<Rational>| match arena.owner(s) {
            Owner::Min => xs.into_iter().min(),
            Owner::Max => xs.into_iter().max(),
        };
        let succ = arena.out(s).iter().map(|&e| arena.edge(e));
        let g = pick(succ.clone().map(|e| gain[e.to].clone()).collect()).expect("nonempty");
        if g != gain[s] {
            violations.push(format!("gain at {id}: {} but the equation gives {g}", gain[s]));
            continue;
        }
        let b = pick(
            succ.filter(|e| gain[e.to] == gain[s]).map(|e| &e.weight - &gain[s] + &bias[e.to]).collect(),
        )
        .expect("an equal-gain move exists");
        if b != bias[s] {
            violations.push(format!("bias at {id}: {} but the equation gives {b}", bias[s]));
        }
    }
    violations
}
