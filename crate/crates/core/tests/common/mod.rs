#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptga_core::finite::{ArenaEdge, FiniteArena, Node};
use ptga_core::ptga::parse_ptga;
use ptga_core::rational::rat;
use ptga_core::{Owner, Ptga};

pub const ORACLE_CAP: u64 = 1 << 20;

pub fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

fn random_guard<R: Rng>(rng: &mut R, m: u64) -> String {
    let lo = rng.gen_range(0..m);
    let hi = rng.gen_range(lo..=m);
    match rng.gen_range(0..5) {
        0 => String::new(),
        1 => format!("x = {lo}"),
        2 => format!("x > {lo}"),
        3 if lo == hi => format!("x <= {hi}"),
        3 if lo < hi => format!("x > {lo} & x < {hi}"),
        _ => format!("x >= {lo} & x <= {hi}"),
    }
}

/// Random one-clock binary-rate arena. Every location carries an invariant `x <= m` and an
/// edge with a trivial guard that resets the clock, so no state is stuck.
pub fn random_ptga_json(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4usize);
    let k = rng.gen_range(1..=3u64);
    let mut locations = Vec::new();
    let mut bounds = Vec::new();
    for i in 0..n {
        let owner = if rng.gen_bool(0.5) { "min" } else { "max" };
        let rate = rng.gen_range(0..=1);
        let m = rng.gen_range(1..=k);
        bounds.push(m);
        locations.push(serde_json::json!({
            "id": format!("l{i}"), "owner": owner, "rate": rate, "invariant": format!("x <= {m}")
        }));
    }
    let mut edges = Vec::new();
    for (i, &m) in bounds.iter().enumerate() {
        let extra = rng.gen_range(0..=2);
        for e in 0..=extra {
            let to = rng.gen_range(0..n);
            let price = rng.gen_range(-2..=2);
            let (guard, resets) = if e == 0 {
                (String::new(), true)
            } else {
                (random_guard(&mut rng, m), rng.gen_bool(0.5))
            };
            edges.push(serde_json::json!({
                "from": format!("l{i}"), "action": format!("a{i}_{e}"), "guard": guard,
                "resets": if resets { vec!["x"] } else { vec![] }, "to": format!("l{to}"), "price": price
            }));
        }
    }
    serde_json::to_string_pretty(&serde_json::json!({
        "clocks": ["x"], "k_bound": k, "initial": "l0", "locations": locations, "edges": edges
    }))
    .unwrap()
}

pub fn random_ptga(seed: u64) -> Ptga {
    parse_ptga(&random_ptga_json(seed)).unwrap()
}

/// Random arena with integer weights in `[-w, w]` and 1 to 3 moves per node.
pub fn random_arena(rng: &mut ChaCha8Rng, max_nodes: usize, w: i64) -> FiniteArena {
    let n = rng.gen_range(1..=max_nodes);
    let nodes = (0..n)
        .map(|i| Node {
            id: format!("n{i}"),
            owner: if rng.gen_bool(0.5) { Owner::Min } else { Owner::Max },
        })
        .collect();
    let mut edges = Vec::new();
    for from in 0..n {
        for j in 0..rng.gen_range(1..=3) {
            edges.push(ArenaEdge {
                from,
                label: format!("e{from}_{j}"),
                to: rng.gen_range(0..n),
                weight: rat(rng.gen_range(-w..=w)),
            });
        }
    }
    FiniteArena::new(nodes, edges).unwrap()
}
