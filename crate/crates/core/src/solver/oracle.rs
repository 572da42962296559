use std::collections::BTreeMap;

use super::SolveError;
use crate::bra::BraGraph;
use crate::finite::{min_cycle_mean, ArenaEdge, FiniteArena, FiniteError, Node};
use crate::ptga::Owner;
use crate::rational::Rational;

/// The abstraction as a plain finite arena: one node per state, one edge per boundary action.
pub fn bra_to_arena(g: &BraGraph) -> FiniteArena {
    let nodes = (0..g.len()).map(|v| Node { id: g.describe(v), owner: g.owner(v) }).collect();
    let edges = g
        .adjacency
        .iter()
        .enumerate()
        .flat_map(|(v, ts)| {
            ts.iter().map(move |t| ArenaEdge {
                from: v,
                label: t.action.to_string(),
                to: t.target,
                weight: t.reward.clone(),
            })
        })
        .collect();
    FiniteArena::new(nodes, edges).expect("deadlock-free graphs have an edge at every node")
}

struct Search<'a> {
    outer: Owner,
    /// Per vertex: distinct successors with the reward the vertex owner prefers.
    options: Vec<Vec<(usize, Rational)>>,
    start: usize,
    cap: u64,
    leaves: u64,
    g: &'a BraGraph,
}

impl Search<'_> {
    fn reachable(&self, fixed: &[Option<usize>]) -> Vec<usize> {
        let mut seen = vec![false; self.options.len()];
        let mut order = vec![self.start];
        seen[self.start] = true;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            let succ: Vec<usize> = match fixed[v] {
                Some(o) => vec![self.options[v][o].0],
                None => self.options[v].iter().map(|(w, _)| *w).collect(),
            };
            for w in succ {
                if !std::mem::replace(&mut seen[w], true) {
                    order.push(w);
                }
            }
            i += 1;
        }
        order
    }

    fn leaf_value(&self, fixed: &[Option<usize>]) -> Rational {
        // Inner player's best cycle; Max's is found as the cheapest cycle under negated rewards.
        let sign = if self.outer == Owner::Min { -1 } else { 1 };
        let sign = Rational::from_integer(sign.into());
        let adj: Vec<Vec<(usize, Rational)>> = (0..self.options.len())
            .map(|v| {
                let all = &self.options[v];
                match fixed[v] {
                    Some(o) => vec![(all[o].0, &all[o].1 * &sign)],
                    None => all.iter().map(|(w, r)| (*w, r * &sign)).collect(),
                }
            })
            .collect();
        min_cycle_mean(&adj, self.start).expect("deadlock-free") * sign
    }

    fn run(&mut self, fixed: &mut Vec<Option<usize>>) -> Result<Rational, FiniteError> {
        let pending = self
            .reachable(fixed)
            .into_iter()
            .filter(|&v| self.g.owner(v) == self.outer && fixed[v].is_none())
            .min();
        let Some(v) = pending else {
            self.leaves += 1;
            if self.leaves > self.cap {
                return Err(FiniteError::ProfileSpaceTooLarge { count: format!("more than {}", self.cap), cap: self.cap });
            }
            return Ok(self.leaf_value(fixed));
        };
        let mut best: Option<Rational> = None;
        for o in 0..self.options[v].len() {
            fixed[v] = Some(o);
            let x = self.run(fixed)?;
            let better = match self.outer {
                Owner::Min => best.as_ref().is_none_or(|b| x < *b),
                Owner::Max => best.as_ref().is_none_or(|b| x > *b),
            };
            if better {
                best = Some(x);
            }
        }
        fixed[v] = None;
        Ok(best.expect("at least one option"))
    }
}

/// Value at `start` by enumerating one player's regionally constant positional strategies on
/// the vertices they can actually reach, with the other player's best cycle as the response.
/// Determinacy lets either player be enumerated; the one with fewer profiles is.
pub fn oracle_min_max(g: &BraGraph, start: usize, cap: u64) -> Result<Rational, SolveError> {
    let options: Vec<Vec<(usize, Rational)>> = (0..g.len())
        .map(|v| {
            let mut by_succ: BTreeMap<usize, Rational> = BTreeMap::new();
            for t in &g.adjacency[v] {
                let keep = by_succ.get(&t.target).is_none_or(|r| match g.owner(v) {
                    Owner::Min => t.reward < *r,
                    Owner::Max => t.reward > *r,
                });
                if keep {
                    by_succ.insert(t.target, t.reward.clone());
                }
            }
            by_succ.into_iter().collect()
        })
        .collect();
    let mut search = Search { outer: Owner::Min, options, start, cap, leaves: 0, g };
    let everything = vec![None; g.len()];
    let bound = |owner: Owner, s: &Search| -> f64 {
        s.reachable(&everything)
            .into_iter()
            .filter(|&v| g.owner(v) == owner)
            .map(|v| (s.options[v].len() as f64).log2())
            .sum()
    };
    let (min_bits, max_bits) = (bound(Owner::Min, &search), bound(Owner::Max, &search));
    if max_bits < min_bits {
        search.outer = Owner::Max;
    }
    let bits = min_bits.min(max_bits);
    if bits > (cap.max(1) as f64).log2() {
        let count = format!("about 2^{}", bits.ceil());
        return Err(FiniteError::ProfileSpaceTooLarge { count, cap }.into());
    }
    Ok(search.run(&mut everything.clone())?)
}
