//! Minimum cycle means (Karp) with witnesses, and simple-cycle enumeration (Johnson).

use std::collections::VecDeque;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::FiniteError;
use crate::rational::Rational;

/// Weighted successor lists.
pub type Digraph = [Vec<(usize, Rational)>];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanCycle {
    pub mean: Rational,
    /// Starts at `min_node`; the closing edge back to it is implicit.
    pub cycle: Vec<usize>,
    /// Smallest node lying on any cycle of mean `mean` reachable from the source.
    pub min_node: usize,
}

trait Num: Clone + Ord + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + From<i64> {}
impl Num for i128 {}
impl Num for BigInt {}

/// Weights over a common denominator: `w = W / den`.
struct Scaled {
    den: BigInt,
    small: Option<Vec<Vec<(usize, i128)>>>,
    big: Vec<Vec<(usize, BigInt)>>,
}

fn scale(adj: &Digraph) -> Scaled {
    let den = adj
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, (_, w)| acc.lcm(w.denom()));
    let big: Vec<Vec<(usize, BigInt)>> = adj
        .iter()
        .map(|out| out.iter().map(|(v, w)| (*v, w.numer() * (&den / w.denom()))).collect())
        .collect();
    let limit = i64::MAX as i128 / (adj.len() as i128 + 2);
    let small = big
        .iter()
        .map(|out| {
            out.iter()
                .map(|(v, w)| w.to_i128().filter(|x| x.abs() < limit).map(|x| (*v, x)))
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>();
    Scaled { den, small, big }
}

fn reachable_order<T>(adj: &[Vec<(usize, T)>], from: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut order = vec![from];
    seen[from] = true;
    let mut i = 0;
    while i < order.len() {
        for (w, _) in &adj[order[i]] {
            if !seen[*w] {
                seen[*w] = true;
                order.push(*w);
            }
        }
        i += 1;
    }
    order
}

/// Minimum cycle mean reachable from `from`, as `(numerator, length)`.
fn karp_core<T: Num>(adj: &[Vec<(usize, T)>], from: usize) -> Option<(T, i64)> {
    let order = reachable_order(adj, from);
    let n = order.len();
    let mut local = vec![usize::MAX; adj.len()];
    for (i, &v) in order.iter().enumerate() {
        local[v] = i;
    }
    let mut d: Vec<Vec<Option<T>>> = vec![vec![None; n]; n + 1];
    d[0][0] = Some(T::from(0));
    for k in 1..=n {
        let (prev, rest) = d.split_at_mut(k);
        let (prev, cur) = (&prev[k - 1], &mut rest[0]);
        for (i, &u) in order.iter().enumerate() {
            let Some(du) = &prev[i] else { continue };
            for (w, weight) in &adj[u] {
                let cand = du.clone() + weight.clone();
                let slot = &mut cur[local[*w]];
                if slot.as_ref().is_none_or(|x| cand < *x) {
                    *slot = Some(cand);
                }
            }
        }
    }
    let mut best: Option<(T, i64)> = None;
    for v in 0..n {
        let Some(dn) = &d[n][v] else { continue };
        let mut worst: Option<(T, i64)> = None;
        for (k, row) in d.iter().enumerate().take(n) {
            let Some(dk) = &row[v] else { continue };
            let cand = (dn.clone() - dk.clone(), (n - k) as i64);
            if worst.as_ref().is_none_or(|w| cand.0.clone() * T::from(w.1) > w.0.clone() * T::from(cand.1)) {
                worst = Some(cand);
            }
        }
        let worst = worst.expect("row 0 or a later row is finite");
        if best.as_ref().is_none_or(|b| worst.0.clone() * T::from(b.1) < b.0.clone() * T::from(worst.1)) {
            best = Some(worst);
        }
    }
    best
}

fn to_rational<T: ToString>(num: T, len: i64, den: &BigInt) -> Rational {
    let num: BigInt = num.to_string().parse().expect("integer text");
    Rational::new(num, den * BigInt::from(len))
}

/// Exact minimum mean of a cycle reachable from `from`.
pub fn min_cycle_mean(adj: &Digraph, from: usize) -> Result<Rational, FiniteError> {
    let s = scale(adj);
    match &s.small {
        Some(small) => karp_core(small, from).map(|(n, l)| to_rational(n, l, &s.den)),
        None => karp_core(&s.big, from).map(|(n, l)| to_rational(n, l, &s.den)),
    }
    .ok_or(FiniteError::NoReachableCycle(from))
}

/// Nodes reachable from `from` that lie on a cycle of mean `mean`, where `mean` is the
/// minimum reachable cycle mean, together with the tight edges among them.
pub fn optimal_cycle_nodes(adj: &Digraph, from: usize, mean: &Rational) -> (Vec<bool>, Vec<Vec<usize>>) {
    let n = adj.len();
    let order = reachable_order(adj, from);
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    dist[from] = Some(Rational::from_integer(0.into()));
    for _ in 0..order.len() {
        let mut changed = false;
        for &u in &order {
            let Some(du) = dist[u].clone() else { continue };
            for (w, weight) in &adj[u] {
                let cand = &du + weight - mean;
                if dist[*w].as_ref().is_none_or(|x| cand < *x) {
                    dist[*w] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut tight = DiGraph::<usize, ()>::new();
    let ids: Vec<_> = (0..n).map(|v| tight.add_node(v)).collect();
    let mut tight_out = vec![Vec::new(); n];
    for &u in &order {
        let du = dist[u].as_ref().expect("reachable");
        for (w, weight) in &adj[u] {
            if du + weight - mean == *dist[*w].as_ref().expect("reachable") {
                tight.add_edge(ids[u], ids[*w], ());
                tight_out[u].push(*w);
            }
        }
    }
    let mut on_cycle = vec![false; n];
    for comp in tarjan_scc(&tight) {
        let nontrivial = comp.len() > 1 || tight_out[tight[comp[0]]].contains(&tight[comp[0]]);
        if nontrivial {
            for id in comp {
                on_cycle[tight[id]] = true;
            }
        }
    }
    for (u, out) in tight_out.iter_mut().enumerate() {
        out.retain(|w| on_cycle[u] && on_cycle[*w]);
    }
    (on_cycle, tight_out)
}

/// Minimum reachable cycle mean with a witness cycle through its smallest optimal node.
pub fn karp_min_mean(adj: &Digraph, from: usize) -> Result<MeanCycle, FiniteError> {
    if from >= adj.len() {
        return Err(FiniteError::NoReachableCycle(from));
    }
    let mean = min_cycle_mean(adj, from)?;
    let (on_cycle, tight) = optimal_cycle_nodes(adj, from, &mean);
    let min_node = on_cycle.iter().position(|&b| b).expect("an optimal cycle exists");
    // Shortest tight path from min_node back to itself; all tight cycles have the optimal mean.
    let mut parent = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::from([min_node]);
    let mut last = None;
    'bfs: while let Some(u) = queue.pop_front() {
        for &w in &tight[u] {
            if w == min_node {
                last = Some(u);
                break 'bfs;
            }
            if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut cycle = Vec::new();
    let mut v = last.expect("min_node lies on a tight cycle");
    while v != min_node {
        cycle.push(v);
        v = parent[v];
    }
    cycle.push(min_node);
    cycle.reverse();
    Ok(MeanCycle { mean, cycle, min_node })
}

/// Mean weight of the cycle `c[0] → c[1] → … → c[0]`, using the cheapest parallel edge.
pub fn cycle_mean(adj: &Digraph, c: &[usize]) -> Rational {
    let total: Rational = (0..c.len())
        .map(|i| {
            let (u, v) = (c[i], c[(i + 1) % c.len()]);
            adj[u].iter().filter(|(w, _)| *w == v).map(|(_, x)| x.clone()).min().expect("cycle edge exists")
        })
        .sum();
    total / Rational::from_integer(c.len().into())
}

/// All elementary cycles, each listed from its smallest node. Fails once more than `cap` exist.
pub fn simple_cycles(succ: &[Vec<usize>], cap: usize) -> Result<Vec<Vec<usize>>, FiniteError> {
    let n = succ.len();
    let succ: Vec<Vec<usize>> = succ
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let mut found = Vec::new();
    for s in 0..n {
        let mut g = DiGraph::<usize, ()>::new();
        let ids: Vec<_> = (s..n).map(|v| g.add_node(v)).collect();
        for u in s..n {
            for &w in succ[u].iter().filter(|&&w| w >= s) {
                g.add_edge(ids[u - s], ids[w - s], ());
            }
        }
        let comp = tarjan_scc(&g).into_iter().find(|c| c.iter().any(|&id| g[id] == s)).expect("s is present");
        let mut in_comp = vec![false; n];
        for id in comp {
            in_comp[g[id]] = true;
        }
        let mut search = Johnson {
            succ: &succ,
            in_comp,
            blocked: vec![false; n],
            b: vec![Vec::new(); n],
            stack: Vec::new(),
            found: &mut found,
            cap,
        };
        search.circuit(s, s)?;
    }
    Ok(found)
}

struct Johnson<'a> {
    succ: &'a [Vec<usize>],
    in_comp: Vec<bool>,
    blocked: Vec<bool>,
    b: Vec<Vec<usize>>,
    stack: Vec<usize>,
    found: &'a mut Vec<Vec<usize>>,
    cap: usize,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        for w in std::mem::take(&mut self.b[u]) {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }

    fn circuit(&mut self, v: usize, s: usize) -> Result<bool, FiniteError> {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        let succ = self.succ;
        for &w in &succ[v] {
            if !self.in_comp[w] {
                continue;
            }
            if w == s {
                if self.found.len() >= self.cap {
                    return Err(FiniteError::TooManyCycles(self.cap));
                }
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w, s)? {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in self.succ[v].iter().filter(|&&w| self.in_comp[w]) {
                if !self.b[w].contains(&v) {
                    self.b[w].push(v);
                }
            }
        }
        self.stack.pop();
        Ok(closed)
    }
}
