#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptga_core::bra::{build_bra, Vertex};
use ptga_core::finite::{
    cycle_mean, enumerate_oracle_finite, karp_min_mean, simple_cycles, solve_finite_mpg, verify_finite, FiniteError,
};
use ptga_core::ptga::{parse_ptga, validate, DiagnosticCode};
use ptga_core::rational::ratio;
use ptga_core::regions::{region_of, Region};
use ptga_core::simplefn::{compare_on_region, extremum_on_region, step_compose, Direction};
use ptga_core::solver::{
    bias_candidate, check_lift, integralize_and_solve, lift_samples, oracle_min_max, solve_two_player, verify_opt,
    GainBiasSolution, SolveError, SolveOptions,
};
use ptga_core::{Int, Ptga, Rational, SimpleFn};

const RANDOM_INSTANCES: u64 = 250;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Solved {
    seed: u64,
    ptga: Ptga,
    sol: GainBiasSolution,
}

fn solve_random() -> Result<(Vec<Solved>, Duration), String> {
    let t = Instant::now();
    let mut out = Vec::new();
    for seed in 0..RANDOM_INSTANCES {
        let ptga = common::random_ptga(seed);
        let sol = integralize_and_solve(&ptga, &ptga.initial, &SolveOptions::default())
            .map_err(|e| format!("seed {seed}: {e}"))?;
        out.push(Solved { seed, ptga, sol });
    }
    Ok((out, t.elapsed()))
}

fn bias_fixture() -> (Ptga, GainBiasSolution, Duration) {
    let t = Instant::now();
    let p = parse_ptga(&common::fixture("bias.tga")).unwrap();
    let sol = integralize_and_solve(&p, &p.initial, &SolveOptions::default()).unwrap();
    (p, sol, t.elapsed())
}

fn criterion_1() -> Outcome {
    let (p, sol, took) = bias_fixture();
    check(sol.value == ratio(1, 2), || format!("value {}", sol.value))?;
    check(sol.scale == Int::from(2), || format!("scale {}", sol.scale))?;
    let start = sol.graph.start;
    check(sol.gain[start] == Rational::from_integer(1.into()), || format!("scaled gain {}", sol.gain[start]))?;
    let scale = Rational::from_integer(sol.scale.clone());
    let l1 = p.location_index("l1").unwrap();
    let g = &sol.graph;
    for i in 0..20 {
        let nu = ratio(i, 19);
        let mu = &nu * &scale;
        let z = region_of(&mu, g.k).unwrap();
        let v = g.find(&Vertex { location: l1, val_region: z, target_region: z }).unwrap();
        let gv = sol.gain[v].to_integer();
        let branch = |action: &str| -> Rational {
            g.adjacency[v]
                .iter()
                .filter(|t| t.action.action == action && sol.gain[t.target] == sol.gain[v])
                .map(|t| bias_candidate(g, v, t, &gv, &sol.bias[t.target]).eval(&mu))
                .min()
                .unwrap()
        };
        let delay_zero = branch("a14");
        let boundary = branch("a12");
        let want_zero = Rational::from_integer((-1).into()) * &scale;
        let want_boundary = (ratio(1, 2) - &nu) * &scale;
        check(delay_zero == want_zero, || format!("nu {nu}: delay-zero branch {delay_zero}, want {want_zero}"))?;
        check(boundary == want_boundary, || format!("nu {nu}: boundary branch {boundary}, want {want_boundary}"))?;
        let b = sol.bias[v].eval(&mu);
        let want = want_zero.min(want_boundary);
        check(b == want, || format!("nu {nu}: bias {b}, want {want}"))?;
    }
    check(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("value 1/2, scale 2, gain 1, 20 sampled valuations agree, {took:?}"))
}

fn criterion_2() -> Outcome {
    let p = parse_ptga(&common::fixture("nonbinary.tga")).map_err(|e| e.to_string())?;
    let report = validate(&p);
    check(!report.ok && report.has(DiagnosticCode::NonBinaryRate), || format!("report: {report}"))?;
    match integralize_and_solve(&p, &p.initial, &SolveOptions::default()) {
        Err(SolveError::Invalid(r)) if r.has(DiagnosticCode::NonBinaryRate) => {}
        other => return Err(format!("solve returned {other:?}")),
    }
    Ok("rejected with NonBinaryRate before solving".into())
}

fn criterion_3(instances: &[Solved], solve_time: Duration) -> Outcome {
    let t = Instant::now();
    let (mut scaled, mut corner, mut skipped) = (0, 0, Vec::new());
    for s in instances {
        let g = &s.sol.graph;
        match oracle_min_max(g, g.start, common::ORACLE_CAP) {
            Ok(o) => {
                check(o == s.sol.gain[g.start], || format!("seed {}: oracle {o}, solver {}", s.seed, s.sol.gain[g.start]))?;
                scaled += 1;
            }
            Err(SolveError::Finite(FiniteError::ProfileSpaceTooLarge { .. })) => {
                // Too many profiles on the scaled graph; the unscaled corner graph has the same value.
                let c = build_bra(&s.ptga, &s.ptga.initial).map_err(|e| format!("seed {}: {e}", s.seed))?;
                match oracle_min_max(&c, c.start, common::ORACLE_CAP) {
                    Ok(o) => {
                        check(o == s.sol.value, || format!("seed {}: corner oracle {o}, solver {}", s.seed, s.sol.value))?;
                        corner += 1;
                    }
                    Err(SolveError::Finite(FiniteError::ProfileSpaceTooLarge { .. })) => skipped.push(s.seed),
                    Err(e) => return Err(format!("seed {}: {e}", s.seed)),
                }
            }
            Err(e) => return Err(format!("seed {}: {e}", s.seed)),
        }
    }
    let took = solve_time + t.elapsed();
    let compared = scaled + corner;
    check(compared >= 200, || format!("only {compared} instances within the oracle cap"))?;
    check(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!(
        "{compared} instances agree exactly ({scaled} on the solved graph, {corner} on the unscaled corner graph), \
         {} over the profile cap {:?}, {took:?}",
        skipped.len(),
        skipped
    ))
}

fn corrupted_violations(sol: &GainBiasSolution, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let g = &sol.graph;
    let mut gain = sol.gain.clone();
    gain[g.start] += Rational::from_integer(1.into());
    check(!verify_opt(g, &gain, &sol.bias).ok, || "gain corruption went unnoticed".into())?;
    // A vertex whose moves all leave it: its bias appears only on its own left-hand side.
    let free: Vec<usize> = (0..g.len()).filter(|&v| g.adjacency[v].iter().all(|t| t.target != v)).collect();
    if free.is_empty() {
        return Ok(1);
    }
    let v = free[rng.gen_range(0..free.len())];
    let mut bias = sol.bias.clone();
    bias[v] = bias[v].shift(&Int::from(1));
    check(!verify_opt(g, &sol.gain, &bias).ok, || format!("bias shift at {} went unnoticed", g.describe(v)))?;
    let flippable: Vec<usize> = free.into_iter().filter(|&v| g.vertex(v).val_region != Region::Point(0)).collect();
    if flippable.is_empty() {
        return Ok(2);
    }
    let v = flippable[rng.gen_range(0..flippable.len())];
    let mut bias = sol.bias.clone();
    bias[v] = match &bias[v] {
        SimpleFn::Const(d) => SimpleFn::Offset(d.clone()),
        SimpleFn::Offset(d) => SimpleFn::Const(d.clone()),
    };
    check(!verify_opt(g, &sol.gain, &bias).ok, || format!("kind flip at {} went unnoticed", g.describe(v)))?;
    Ok(3)
}

fn criterion_4(instances: &[Solved]) -> Outcome {
    let (_, fixture, _) = bias_fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut corruptions = 0;
    for sol in std::iter::once(&fixture).chain(instances.iter().map(|s| &s.sol)) {
        let report = verify_opt(&sol.graph, &sol.gain, &sol.bias);
        check(report.ok && sol.certificate.ok, || format!("certificate: {report}"))?;
        corruptions += corrupted_violations(sol, &mut rng)?;
    }
    Ok(format!("{} certificates clean, {corruptions} corruptions all detected", instances.len() + 1))
}

fn criterion_5(instances: &[Solved]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in instances {
        let samples = lift_samples(&s.sol, 100, &mut rng);
        let report = check_lift(&s.sol, &s.ptga, &samples);
        check(report.ok, || format!("seed {}: {report}", s.seed))?;
    }
    Ok(format!("{} instances x 100 states, no violations", instances.len()))
}

fn random_fn(rng: &mut ChaCha8Rng) -> SimpleFn {
    let d = Int::from(rng.gen_range(-20..=20));
    if rng.gen_bool(0.5) {
        SimpleFn::Const(d)
    } else {
        SimpleFn::Offset(d)
    }
}

fn random_region(rng: &mut ChaCha8Rng) -> Region {
    let i = rng.gen_range(0..10);
    if rng.gen_bool(0.5) {
        Region::Point(i)
    } else {
        Region::Open(i)
    }
}

fn point_in(z: Region, rng: &mut ChaCha8Rng) -> Rational {
    match z {
        Region::Point(i) => Rational::from_integer(i.into()),
        Region::Open(i) => {
            let q = rng.gen_range(2..50i64);
            Rational::from_integer(i.into()) + ratio(rng.gen_range(1..q), q)
        }
    }
}

fn criterion_6() -> Outcome {
    const N: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..N {
        let (f, g, z) = (random_fn(&mut rng), random_fn(&mut rng), random_region(&mut rng));
        let ord = compare_on_region(&f, &g, z);
        for _ in 0..4 {
            let v = point_in(z, &mut rng);
            check(f.eval(&v).cmp(&g.eval(&v)) == ord, || format!("compare case {case}: {f} vs {g} at {v}"))?;
        }
    }
    for case in 0..N {
        let fs: Vec<SimpleFn> = (0..rng.gen_range(1..6)).map(|_| random_fn(&mut rng)).collect();
        let z = random_region(&mut rng);
        let dir = if rng.gen_bool(0.5) { Direction::Min } else { Direction::Max };
        let (best, i) = extremum_on_region(&fs, z, dir).map_err(|e| e.to_string())?;
        check(best == fs[i], || format!("extremum case {case}: index {i} does not hold {best}"))?;
        let v = point_in(z, &mut rng);
        for f in &fs {
            let ok = match dir {
                Direction::Min => best.eval(&v) <= f.eval(&v),
                Direction::Max => best.eval(&v) >= f.eval(&v),
            };
            check(ok, || format!("extremum case {case}: {best} beaten by {f} at {v}"))?;
        }
    }
    for case in 0..N {
        let rate = rng.gen_range(0..=1i64);
        let price = Int::from(rng.gen_range(-5..=5));
        let b = rng.gen_range(0..10u64);
        let reset = rng.gen_bool(0.5);
        let gain = Int::from(rng.gen_range(-5..=5));
        let next = random_fn(&mut rng);
        let f = step_compose(rate, &price, &Int::from(b), reset, &gain, &next);
        let bq = Rational::from_integer(b.into());
        let landed = if reset { Rational::zero() } else { bq.clone() };
        for _ in 0..4 {
            let v = bq.clone() * ratio(rng.gen_range(0..=20), 20);
            let direct = Rational::from_integer(price.clone()) + Rational::from_integer(rate.into()) * (&bq - &v)
                - Rational::from_integer(gain.clone())
                + next.eval(&landed);
            check(f.eval(&v) == direct, || format!("compose case {case}: {f} at {v} is not {direct}"))?;
        }
    }
    for case in 0..N {
        let f = random_fn(&mut rng);
        let a = ratio(rng.gen_range(-100..100), rng.gen_range(1..20));
        let b = ratio(rng.gen_range(-100..100), rng.gen_range(1..20));
        let mid = (&a + &b) / Rational::from_integer(2.into());
        let avg = (f.eval(&a) + f.eval(&b)) / Rational::from_integer(2.into());
        check(f.eval(&mid) == avg, || format!("midpoint case {case}: {f} on {a}, {b}"))?;
    }
    Ok(format!("4 x {N} cases, no failures"))
}

fn random_digraph(rng: &mut ChaCha8Rng) -> Vec<Vec<(usize, Rational)>> {
    let n = rng.gen_range(1..=6);
    (0..n)
        .map(|_| {
            (0..rng.gen_range(1..=3))
                .map(|_| (rng.gen_range(0..n), ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3))))
                .collect()
        })
        .collect()
}

fn reachable(adj: &[Vec<(usize, Rational)>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        for (w, _) in &adj[v] {
            if !std::mem::replace(&mut seen[*w], true) {
                stack.push(*w);
            }
        }
    }
    seen
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..500 {
        let adj = random_digraph(&mut rng);
        let succ: Vec<Vec<usize>> = adj.iter().map(|es| es.iter().map(|(w, _)| *w).collect()).collect();
        let seen = reachable(&adj, 0);
        let best = simple_cycles(&succ, 1_000_000)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|c| seen[c[0]])
            .map(|c| cycle_mean(&adj, &c))
            .min()
            .ok_or_else(|| format!("karp case {case}: no cycle"))?;
        let mc = karp_min_mean(&adj, 0).map_err(|e| format!("karp case {case}: {e}"))?;
        check(mc.mean == best, || format!("karp case {case}: {} vs enumeration {best}", mc.mean))?;
        check(cycle_mean(&adj, &mc.cycle) == mc.mean, || format!("karp case {case}: witness mean differs"))?;
    }
    let mut iterations = 0;
    for case in 0..500 {
        let arena = common::random_arena(&mut rng, 5, 3);
        let sol = solve_finite_mpg(&arena, 10_000).map_err(|e| format!("arena case {case}: {e}"))?;
        let oracle = enumerate_oracle_finite(&arena, 1 << 20).map_err(|e| format!("arena case {case}: {e}"))?;
        check(sol.gain == oracle, || format!("arena case {case}: {:?} vs oracle {:?}", sol.gain, oracle))?;
        let bad = verify_finite(&arena, &sol.gain, &sol.bias);
        check(bad.is_empty(), || format!("arena case {case}: {bad:?}"))?;
        iterations += sol.iterations;
    }
    let took = t.elapsed();
    check(took < Duration::from_secs(120), || format!("took {took:?}"))?;
    Ok(format!("500 Karp cases and 500 arenas exact, monotone over {iterations} iterations, {took:?}"))
}

fn run_cli(args: &[&str]) -> (Option<i32>, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_ptga")).args(args).output().expect("binary runs");
    (out.status.code(), out.stdout, out.stderr)
}

fn criterion_8(instances: &[Solved]) -> Outcome {
    let (_, fixture, _) = bias_fixture();
    let mut evaluations = 0;
    for sol in std::iter::once(&fixture).chain(instances.iter().map(|s| &s.sol)) {
        let opts = SolveOptions { trace: true, ..SolveOptions::default() };
        let tp = solve_two_player(&sol.graph, &opts).map_err(|e| e.to_string())?;
        check(tp.evaluation.gain.iter().map(|g| Rational::from_integer(g.clone())).eq(sol.gain.iter().cloned()), || {
            "re-solve differs".into()
        })?;
        evaluations += tp.evaluations;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = vec![common::fixture_path("bias.tga"), common::fixture_path("nonbinary.tga")];
    for seed in 0..5 {
        let path = dir.path().join(format!("r{seed}.tga"));
        std::fs::write(&path, common::random_ptga_json(seed)).map_err(|e| e.to_string())?;
        files.push(path.display().to_string());
    }
    let arena = common::fixture_path("choice.json");
    let mut invocations: Vec<Vec<String>> = Vec::new();
    for f in &files {
        for args in [
            vec!["solve", f.as_str()],
            vec!["solve", f.as_str(), "--json"],
            vec!["decide", f.as_str(), "--budget", "1/2"],
            vec!["check", f.as_str(), "--seed", "3"],
            vec!["oracle", f.as_str()],
            vec!["export-dot", f.as_str()],
        ] {
            invocations.push(args.into_iter().map(String::from).collect());
        }
    }
    invocations.push(vec!["finite-solve".into(), arena]);
    invocations.push(vec!["regions".into(), "--k".into(), "3".into()]);
    invocations.push(vec!["solve".into()]);
    for args in &invocations {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (run_cli(&args), run_cli(&args));
        check(a == b, || format!("`ptga {}` differs between runs", args.join(" ")))?;
    }
    let dots: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("g{i}.dot"));
            run_cli(&["export-dot", &files[0], "--out", &out.display().to_string()]);
            std::fs::read(out).unwrap_or_default()
        })
        .collect();
    check(!dots[0].is_empty() && dots[0] == dots[1], || "export-dot files differ".into())?;
    Ok(format!(
        "{} solves without a revisited profile ({evaluations} evaluations), {} CLI invocations byte-identical",
        instances.len() + 1,
        invocations.len() + 1
    ))
}

fn main() {
    let random = solve_random();
    let (instances, solve_time) = match &random {
        Ok((xs, t)) => (xs.as_slice(), *t),
        Err(_) => (&[][..], Duration::ZERO),
    };
    let need = |f: &dyn Fn() -> Outcome| -> Outcome {
        match &random {
            Ok(_) => f(),
            Err(e) => Err(format!("random instances failed to solve: {e}")),
        }
    };
    let results: Vec<(usize, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, need(&|| criterion_3(instances, solve_time))),
        (4, need(&|| criterion_4(instances))),
        (5, need(&|| criterion_5(instances))),
        (6, criterion_6()),
        (7, criterion_7()),
        (8, need(&|| criterion_8(instances))),
    ];
    let mut failed = 0;
    for (n, r) in &results {
        match r {
            Ok(msg) => println!("criterion {n}: PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL  {msg}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
