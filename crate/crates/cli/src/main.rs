use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pmp_core::bench::{run_bench, to_csv, BenchOptions, Preset};
use pmp_core::engine::verify;
use pmp_core::instance::{
    parse_instance, parse_solution, serialize_instance, serialize_solution, Instance, ParseWarning,
};
use pmp_core::oracle::{solve_exact, OracleOptions, OracleOutcome};
use pmp_core::{generate, run_portfolio, solve, BayClass, HeuristicConfig, Solution};

#[derive(Parser)]
#[command(
    name = "pmp",
    version,
    about = "Pre-marshalling solver: heuristic portfolio, exact oracle and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance
    Generate {
        /// Class label `T*W/H<n>`, e.g. `3*3/H5`
        #[arg(long, conflicts_with_all = ["width", "tiers", "height"])]
        class: Option<BayClass>,
        #[arg(long, short = 'w')]
        width: Option<usize>,
        #[arg(long, short = 't')]
        tiers: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Solve with a single configuration
    Solve {
        instance: PathBuf,
        /// Configuration label, e.g. `lookahead-what-minmax-stop`
        #[arg(long, short)]
        config: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run all 48 configurations and keep the shortest solution
    Portfolio {
        instance: PathBuf,
        /// Print the move count of every configuration to stderr
        #[arg(long)]
        table: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check a solution against an instance
    Verify {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Find an optimal solution by exhaustive search (tiny bays only)
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = 30)]
        cap: usize,
        /// Disable the transposition table
        #[arg(long)]
        no_transpositions: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Mean move counts over the benchmark classes as CSV
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    /// Slack `a` of the safe filling policy
    #[arg(long, default_value_t = 0)]
    safe_slack: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Column set: table1, table2, table3 or all
    #[arg(long, default_value = "table1", conflicts_with = "configs")]
    preset: String,
    /// Comma-separated configuration labels instead of a preset
    #[arg(long, value_delimiter = ',')]
    configs: Vec<String>,
    /// Comma-separated class labels; defaults to all 18 benchmark classes
    #[arg(long, value_delimiter = ',')]
    classes: Vec<BayClass>,
    /// Seeds 1..=N per class
    #[arg(long, default_value_t = 40)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    safe_slack: usize,
    #[arg(long)]
    threads: Option<usize>,
    /// Directory that receives an instance that fails
    #[arg(long)]
    dump_dir: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    for w in &parsed.warnings {
        match w {
            ParseWarning::DuplicatePriority(p) => {
                eprintln!("warning: priority {p} appears more than once")
            }
        }
    }
    let mut inst = parsed.value;
    if inst.name.is_empty() {
        inst.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok(inst)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_solution(output: Option<&Path>, sol: &Solution) -> Result<()> {
    emit(output, &serialize_solution(sol))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            class,
            width,
            tiers,
            height,
            seed,
            output,
        } => {
            let class = match (class, width, tiers, height) {
                (Some(c), ..) => c,
                (None, Some(w), Some(t), Some(h)) => BayClass::new(t, w, h),
                _ => bail!("give either --class or all of --width, --tiers and --height"),
            };
            let inst = generate::generate(class.width, class.tiers, class.max_height, seed)?;
            emit(output.as_deref(), &serialize_instance(&inst))
        }
        Command::Solve {
            instance,
            config,
            common,
        } => {
            let inst = read_instance(&instance)?;
            let cfg = HeuristicConfig::parse(&config, common.safe_slack)?;
            let sol =
                solve(&inst.bay, &cfg).with_context(|| format!("{} under {cfg}", inst.name))?;
            emit_solution(common.output.as_deref(), &sol)
        }
        Command::Portfolio {
            instance,
            table,
            common,
        } => {
            let inst = read_instance(&instance)?;
            let result =
                run_portfolio(&inst.bay, common.safe_slack).with_context(|| inst.name.clone())?;
            if table {
                for (label, outcome) in &result.per_config {
                    match outcome {
                        Ok(n) => eprintln!("{label} {n}"),
                        Err(e) => eprintln!("{label} failed: {e}"),
                    }
                }
                eprintln!(
                    "best {} ({}) in {:.3}s",
                    result.best_len(),
                    result.best.config_label,
                    result.wall_time.as_secs_f64()
                );
            }
            emit_solution(common.output.as_deref(), &result.best)
        }
        Command::Verify { instance, solution } => {
            let inst = read_instance(&instance)?;
            let text = fs::read_to_string(&solution)
                .with_context(|| format!("reading {}", solution.display()))?;
            let sol =
                parse_solution(&text).with_context(|| format!("parsing {}", solution.display()))?;
            verify(&inst.bay, &sol)?;
            println!("ok {} moves", sol.len());
            Ok(())
        }
        Command::Oracle {
            instance,
            cap,
            no_transpositions,
            output,
        } => {
            let inst = read_instance(&instance)?;
            let options = OracleOptions {
                move_cap: cap,
                transpositions: !no_transpositions,
            };
            match solve_exact(&inst.bay, options) {
                OracleOutcome::Solved(r) => {
                    eprintln!("optimum {} ({} nodes)", r.optimal_moves, r.nodes_expanded);
                    emit_solution(output.as_deref(), &r.solution)
                }
                OracleOutcome::CapExceeded {
                    move_cap,
                    nodes_expanded,
                } => {
                    bail!("no solution within {move_cap} moves ({nodes_expanded} nodes)")
                }
            }
        }
        Command::Bench(args) => bench(args),
    }
}

fn bench(args: BenchArgs) -> Result<()> {
    let columns = if args.configs.is_empty() {
        let Some(preset) = Preset::parse(&args.preset) else {
            bail!(
                "unknown preset {:?}, expected table1, table2, table3 or all",
                args.preset
            )
        };
        preset.configs(args.safe_slack)
    } else {
        args.configs
            .iter()
            .map(|l| HeuristicConfig::parse(l, args.safe_slack))
            .collect::<Result<_, _>>()?
    };
    let mut opts = BenchOptions::new(columns, args.safe_slack);
    if !args.classes.is_empty() {
        opts.classes = args.classes;
    }
    opts.seeds = (1..=args.seeds).collect();
    opts.dump_dir = args.dump_dir;
    if let Some(t) = args.threads {
        opts.threads = t;
    }
    let reports = run_bench(&opts)?;
    for r in &reports {
        eprintln!(
            "{} portfolio {:.3}s over {} instances",
            r.class,
            r.portfolio_time.as_secs_f64(),
            r.instances
        );
    }
    emit(args.output.as_deref(), &to_csv(&reports))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
