use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptga_core::bra::{build_class_bra, export_dot};
use ptga_core::finite::{solve_finite_mpg, FiniteArena};
use ptga_core::ptga::{parse_ptga, validate};
use ptga_core::rational::parse_rational;
use ptga_core::regions::all_regions;
use ptga_core::solver::{
    check_lift, decide_mpg, integralize_and_solve, lift_samples, oracle_min_max, verify_opt, GainBiasSolution,
    SolveError, SolveOptions,
};
use ptga_core::{Int, Ptga, Rational};

#[derive(Parser)]
#[command(name = "ptga", version, about = "Exact mean-payoff values of one-clock priced timed games")]
struct Cli {
    /// Largest scale factor tried while making gains integral.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    max_scale: u64,
    /// Bound on strategy evaluations.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_iters: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value at the initial location with clock 0, and certificate status.
    Solve {
        file: PathBuf,
        /// Print the full solution as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Whether the value at the initial location is strictly below the budget.
    Decide {
        file: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        budget: Rational,
    },
    /// Solve, then re-check the optimality equations on the graph and on sampled states.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Compare the solver against brute-force strategy enumeration.
    Oracle {
        file: PathBuf,
        /// Largest number of strategy profiles enumerated.
        #[arg(long, default_value_t = 1 << 20)]
        cap: u64,
    },
    /// Write the boundary region graph in DOT format.
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a finite arena given as JSON.
    FiniteSolve { file: PathBuf },
    /// List the regions of the clock up to bound K.
    Regions {
        #[arg(long)]
        k: u64,
    },
}

struct Failure {
    code: &'static str,
    message: String,
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let message = match &e {
            SolveError::Invalid(report) => report.to_string().trim_end().to_string(),
            _ => e.to_string(),
        };
        Failure { code: e.code(), message }
    }
}

fn fail(code: &'static str, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail("IoError", format!("{}: {e}", path.display())))
}

fn load(path: &PathBuf) -> Result<Ptga, Failure> {
    parse_ptga(&read(path)?).map_err(|e| fail("ParseError", e))
}

fn options(cli: &Cli) -> SolveOptions {
    SolveOptions { max_scale: Int::from(cli.max_scale), max_iters: cli.max_iters, ..SolveOptions::default() }
}

fn solve(cli: &Cli, p: &Ptga) -> Result<GainBiasSolution, Failure> {
    Ok(integralize_and_solve(p, &p.initial, &options(cli))?)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Solve { file, json } => {
            let p = load(file)?;
            let sol = solve(cli, &p)?;
            if *json {
                return Ok(sol.to_json());
            }
            Ok(format!("value = {}, certificate: {}\n", sol.value, sol.certificate))
        }
        Command::Decide { file, budget } => {
            let p = load(file)?;
            let below = decide_mpg(&p, &p.initial, budget, &options(cli))?;
            Ok(format!("{below}\n"))
        }
        Command::Check { file, seed, samples } => {
            let p = load(file)?;
            let sol = solve(cli, &p)?;
            let opt = verify_opt(&sol.graph, &sol.gain, &sol.bias);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let states = lift_samples(&sol, *samples, &mut rng);
            let lift = check_lift(&sol, &p, &states);
            let report = format!(
                "value = {}\nscale = {}\nvertices = {}\noptimality equations: {opt}\nlift at {} states: {lift}\n",
                sol.value,
                sol.scale,
                sol.graph.len(),
                states.len()
            );
            if opt.ok && lift.ok {
                Ok(report)
            } else {
                Err(fail("CertificateFailed", report.trim_end()))
            }
        }
        Command::Oracle { file, cap } => {
            let p = load(file)?;
            let sol = solve(cli, &p)?;
            let scale = Rational::from_integer(sol.scale.clone());
            let oracle = oracle_min_max(&sol.graph, sol.graph.start, *cap)? / scale;
            let verdict = if oracle == sol.value { "agree" } else { "DISAGREE" };
            let report = format!("solver = {}\noracle = {oracle}\n{verdict}\n", sol.value);
            if oracle == sol.value {
                Ok(report)
            } else {
                Err(fail("OracleMismatch", report.trim_end()))
            }
        }
        Command::ExportDot { file, out } => {
            let p = load(file)?;
            let report = validate(&p);
            if !report.ok {
                return Err(SolveError::Invalid(report).into());
            }
            let g = build_class_bra(&p, &p.initial).map_err(SolveError::from)?;
            let dot = export_dot(&g);
            match out {
                Some(path) => {
                    std::fs::write(path, dot).map_err(|e| fail("IoError", format!("{}: {e}", path.display())))?;
                    Ok(format!("wrote {} states to {}\n", g.len(), path.display()))
                }
                None => Ok(dot),
            }
        }
        Command::FiniteSolve { file } => {
            let arena = FiniteArena::from_json(&read(file)?).map_err(|e| fail("FiniteError", e))?;
            let sol = solve_finite_mpg(&arena, cli.max_iters).map_err(|e| fail("FiniteError", e))?;
            let mut out = String::new();
            for (v, node) in arena.nodes().iter().enumerate() {
                let choice = sol.min_strategy[v].or(sol.max_strategy[v]).map(|e| arena.edge(e).label.as_str());
                out.push_str(&format!(
                    "{} ({}): gain = {}, bias = {}, move = {}\n",
                    node.id,
                    node.owner,
                    sol.gain[v],
                    sol.bias[v],
                    choice.unwrap_or("-")
                ));
            }
            Ok(out)
        }
        Command::Regions { k } => {
            Ok(all_regions(*k).iter().enumerate().map(|(i, r)| format!("{i}: {r}\n")).collect())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error[{}]: {}", f.code, f.message);
            ExitCode::from(1)
        }
    }
}
