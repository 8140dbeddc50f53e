use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gtsearch_core::harness::corpus::{self, replay_corpus, write_corpus};
use gtsearch_core::harness::{fuzz, shrink, Algorithm, GeneratorConfig, Violation};
use gtsearch_core::reference::{
    minimax_alg, minimax_depth, minimax_spec, negamax_alg, negamax_depth, negamax_spec,
};
use gtsearch_core::witness::{check_negamax_tt_result, check_valid_table, witness_value_set};
use gtsearch_core::{
    dot, format, Error, Node, Result, Score, TranspositionTable, Verdict, Window, DEFAULT_GUARD,
    INFINITY,
};

/// Game-tree search with transposition tables, and witness-based checking.
///
/// Exit status: 0 success or satisfied, 1 violation or refuted, 2 usage or
/// input error, 3 unknown (expansion guard exceeded).
#[derive(Parser)]
#[command(name = "gtsearch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a tree with one algorithm and print the value.
    Eval {
        tree: PathBuf,
        /// minimax, minimax-alg, negamax, negamax-alg, failsoft, failhard,
        /// ttw, ttm, ttw-hybrid[-sad] or ttw-swapped[-sad].
        #[arg(long)]
        alg: String,
        #[command(flatten)]
        window: WindowArgs,
        /// Search depth; defaults to the tree height.
        #[arg(long)]
        depth: Option<usize>,
        /// Initial table snapshot for table-based searches.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Write the resulting table snapshot here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether VALUE is justified by some expansion of the tree.
    Check {
        tree: PathBuf,
        #[arg(allow_negative_numbers = true)]
        value: i64,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u64,
    },
    /// Decide whether every entry of a table snapshot is justified.
    CheckTable {
        table: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u64,
    },
    /// Run a fuzzing campaign and optionally write a violation corpus.
    Fuzz(FuzzArgs),
    /// Minimize a stored violation.
    Shrink {
        violation: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the values of all all-or-none expansions at a depth.
    Expansions {
        tree: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u64,
    },
    /// Render a tree, or the tree of a violation, as Graphviz DOT.
    Dot {
        file: PathBuf,
        /// Horizon to mark; a violation defaults to its probed depth.
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long, default_value_t = -INFINITY + 1, allow_negative_numbers = true)]
    alpha: i32,
    #[arg(long, default_value_t = INFINITY, allow_negative_numbers = true)]
    beta: i32,
}

impl WindowArgs {
    fn window(&self) -> Result<Window> {
        Window::new(self.alpha.into(), self.beta.into())
    }
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long)]
    alg: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    dup_prob: f64,
    #[arg(long, default_value_t = 5)]
    max_depth: usize,
    /// Child count range as MIN,MAX.
    #[arg(long, value_parser = pair::<usize>, default_value = "0,3")]
    branching: (usize, usize),
    /// Evaluation range as LO,HI.
    #[arg(long, value_parser = pair::<i64>, default_value = "-100,100", allow_hyphen_values = true)]
    eval_range: (i64, i64),
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: u64,
    /// Corpus directory. Existing violations in it are replayed first.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn pair<T: std::str::FromStr>(s: &str) -> std::result::Result<(T, T), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or("expected two comma-separated values")?;
    let parse = |x: &str| {
        x.trim()
            .parse::<T>()
            .map_err(|_| format!("invalid number `{x}`"))
    };
    Ok((parse(a)?, parse(b)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Eval {
            tree,
            alg,
            window,
            depth,
            table,
            out,
        } => {
            let u = read_tree(&tree)?;
            let depth = depth.unwrap_or(u.height());
            let w = window.window()?;
            let table = match table {
                Some(p) => TranspositionTable::from_json(&read(&p)?)?,
                None => TranspositionTable::new(),
            };
            let (value, table) = eval(&u, &alg, w, depth, table)?;
            println!("{value}");
            if let (Some(out), Some(table)) = (out, table) {
                fs::write(out, table.to_json() + "\n")?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            tree,
            value,
            window,
            depth,
            guard,
        } => {
            let u = read_tree(&tree)?;
            let depth = depth.unwrap_or(u.height());
            let report =
                check_negamax_tt_result(Score::new(value)?, &u, window.window()?, depth, guard)?;
            println!("{}", report.verdict());
            if let Some(w) = &report.witness {
                println!("{}", format::serialize(w));
            }
            Ok(exit_for(report.verdict()))
        }
        Command::CheckTable { table, guard } => {
            let table = TranspositionTable::from_json(&read(&table)?)?;
            let reports = check_valid_table(&table, guard)?;
            let mut worst = Verdict::Satisfied;
            for (key, report) in &reports {
                let e = table.get(key).expect("reported keys come from the table");
                let flag = serde_json::to_value(e.flag)?;
                println!(
                    "{} {} {} {} {}",
                    report.verdict(),
                    flag.as_str().unwrap_or_default(),
                    e.value,
                    e.depth,
                    format::serialize(key)
                );
                worst = combine(worst, report.verdict());
            }
            Ok(exit_for(worst))
        }
        Command::Fuzz(args) => cmd_fuzz(args),
        Command::Shrink {
            violation,
            guard,
            out,
        } => {
            let v = corpus::read_violation(&violation)?;
            let small = shrink(&v, guard)?;
            let text = corpus::to_json(&small);
            match out {
                Some(p) => fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Expansions { tree, depth, guard } => {
            let u = read_tree(&tree)?;
            match witness_value_set(&u, depth, guard) {
                Ok(values) => {
                    let items: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                    println!("{{{}}}", items.join(", "));
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::GuardExceeded(g)) => {
                    println!("unknown");
                    eprintln!("{g}");
                    Ok(ExitCode::from(3))
                }
                Err(e) => Err(e),
            }
        }
        Command::Dot { file, depth } => {
            let value: serde_json::Value =
                serde_json::from_str(&read(&file)?).map_err(|e| Error::Format {
                    path: file.display().to_string(),
                    message: e.to_string(),
                })?;
            let (u, horizon) = if value.get("schedule").is_some() {
                let v: Violation = serde_json::from_value(value)?;
                let probed = v.probe().1;
                (v.tree, Some(depth.unwrap_or(probed)))
            } else {
                (format::from_json(&value)?, depth)
            };
            print!("{}", dot::to_dot(&u, horizon));
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Returns the value and, for table-based searches, the resulting table.
fn eval(
    u: &Node,
    alg: &str,
    w: Window,
    depth: usize,
    table: TranspositionTable,
) -> Result<(Score, Option<TranspositionTable>)> {
    let full = depth >= u.height();
    let value = match alg {
        "minimax" if full => minimax_spec(u)?,
        "minimax" => minimax_depth(u, depth)?,
        "minimax-alg" => minimax_alg(&u.truncate(depth))?,
        "negamax" if full => negamax_spec(u)?,
        "negamax" => negamax_depth(u, depth)?,
        "negamax-alg" => negamax_alg(&u.truncate(depth))?,
        _ => {
            let algorithm: Algorithm = alg.parse()?;
            let (value, table) = algorithm.search(u, w, depth, table)?;
            return Ok((value, algorithm.uses_table().then_some(table)));
        }
    };
    Ok((value, None))
}

fn cmd_fuzz(args: FuzzArgs) -> Result<ExitCode> {
    let algorithm: Algorithm = args.alg.parse()?;
    let cfg = GeneratorConfig {
        max_depth: args.max_depth,
        branching: args.branching,
        eval_range: args.eval_range,
        duplicate_probability: args.dup_prob,
        seed: args.seed,
        ..GeneratorConfig::default()
    };
    cfg.validate()?;

    if let Some(dir) = &args.out {
        for r in replay_corpus(dir, args.guard)? {
            let status = if r.reproduced {
                "reproduced"
            } else {
                "not reproduced"
            };
            eprintln!("replay {} ({}): {status}", r.path.display(), r.algorithm);
        }
    }

    let report = fuzz(algorithm, &cfg, args.trials, args.guard)?;
    for t in &report.unknown_trials {
        eprintln!("trial {t}: guard exceeded");
    }
    let summary = match &args.out {
        Some(dir) => write_corpus(dir, &report, &cfg, args.guard)?,
        None => corpus::FuzzSummary::new(&report, &cfg, args.guard),
    };
    print!("{}", corpus::to_json(&summary));
    Ok(if report.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn exit_for(v: Verdict) -> ExitCode {
    match v {
        Verdict::Satisfied => ExitCode::SUCCESS,
        Verdict::Refuted => ExitCode::from(1),
        Verdict::Unknown => ExitCode::from(3),
    }
}

/// Refuted dominates unknown, which dominates satisfied.
fn combine(a: Verdict, b: Verdict) -> Verdict {
    let rank = |v| match v {
        Verdict::Satisfied => 0,
        Verdict::Unknown => 1,
        Verdict::Refuted => 2,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn read_tree(path: &Path) -> Result<Node> {
    format::parse(&read(path)?)
}
