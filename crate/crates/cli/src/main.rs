//! `sqgame`: solve, extract and verify strategies, run the oracle, play in
//! the terminal, or serve the HTTP API.

mod play;

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sqgame::report::{self, RunReportDocument, RunResult};
use sqgame::solver::{
    extract_strategy, oracle_minimax, solve_with, verify_strategy, GameValue, MaxMovesPolicy, Outcome, SearchConfig,
    SearchError, SearchObserver, StrategyTable, VerificationResult,
};
use sqgame::{strategies, MoveOrdering, Player};

static INTERRUPTED: AtomicBool = AtomicBool::new(false);

#[derive(Parser)]
#[command(name = "sqgame", version, about = "Square achievement game: solver, strategies and engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the game on an n x n board by exhaustive search.
    Solve(SolveArgs),
    /// Derive a strategy table for one side and write it to a file.
    Extract(ExtractArgs),
    /// Check a strategy table against every opponent line.
    Verify(VerifyArgs),
    /// Plain minimax value of the unrestricted game.
    Oracle {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
    },
    /// Play against the engine in the terminal.
    Play {
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=5))]
        n: u8,
        #[arg(long, value_enum)]
        human: Side,
        #[arg(long, env = strategies::STRATEGY_DIR_ENV)]
        strategy_dir: Option<PathBuf>,
    },
    /// Serve the game API over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Keep sessions in this file across restarts.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long, env = strategies::STRATEGY_DIR_ENV)]
        strategy_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    P1,
    P2,
}

impl From<Side> for Player {
    fn from(s: Side) -> Player {
        match s {
            Side::P1 => Player::One,
            Side::P2 => Player::Two,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Machine,
}

/// Search settings shared by `solve` and `extract`.
#[derive(Args)]
struct RuleArgs {
    /// `paper-n5`, `fixed(k)` (or just `k`), or `none`. Defaults to
    /// `paper-n5` on 5x5 and `none` elsewhere.
    #[arg(long)]
    max_moves: Option<MaxMovesPolicy>,
    /// Disable the column-symmetry filter.
    #[arg(long)]
    no_symmetry: bool,
    /// Disable the r <= c filter on the opening move.
    #[arg(long)]
    no_diagonal: bool,
    /// Disable the useful-vertex filter.
    #[arg(long)]
    no_useful_vertex: bool,
    /// `row-major` or `center-out`.
    #[arg(long)]
    ordering: Option<MoveOrdering>,
}

impl RuleArgs {
    fn config(&self, n: usize) -> SearchConfig {
        let mut cfg = strategies::derivation_config(n);
        if let Some(m) = self.max_moves {
            cfg.max_moves = m;
        }
        if self.no_symmetry {
            cfg.rules.use_symmetry_restriction = false;
        }
        if self.no_diagonal {
            cfg.rules.use_diagonal_first_move_restriction = false;
        }
        if self.no_useful_vertex {
            cfg.rules.useful_vertex_restriction_for.clear();
        }
        if let Some(o) = self.ordering {
            cfg.rules.move_ordering = o;
        }
        cfg
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Board size; repeat to run several sizes in turn.
    #[arg(long, required = true, value_parser = clap::value_parser!(u8).range(3..=5))]
    n: Vec<u8>,
    #[command(flatten)]
    rules: RuleArgs,
    /// Search both sides freely instead of fixing the proven side's moves
    /// from its strategy table.
    #[arg(long)]
    no_table: bool,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
    #[arg(long, env = strategies::STRATEGY_DIR_ENV)]
    strategy_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=5))]
    n: u8,
    #[arg(long, value_enum)]
    side: Side,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    rules: RuleArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    strategy: PathBuf,
    /// Check under this move limit instead of the one in the file.
    #[arg(long)]
    max_moves: Option<MaxMovesPolicy>,
}

/// Prints `+` every progress interval and stops the search on Ctrl-C.
struct Ticker {
    show: bool,
}

impl SearchObserver for Ticker {
    fn tick(&mut self, _moves_total: u64) {
        if self.show {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(b"+");
            let _ = out.flush();
        }
    }

    fn cancelled(&self) -> bool {
        INTERRUPTED.load(Ordering::Relaxed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Extract(args) => extract(args),
        Command::Verify(args) => verify(args),
        Command::Oracle { n } => oracle(n as usize),
        Command::Play { n, human, strategy_dir } => play::run(n as usize, human.into(), strategy_dir.as_deref()),
        Command::Serve {
            port,
            host,
            snapshot,
            strategy_dir,
        } => serve(SocketAddr::new(host, port), snapshot, strategy_dir),
    }
}

fn fail(msg: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn solve(args: SolveArgs) -> ExitCode {
    let _ = ctrlc::set_handler(|| INTERRUPTED.store(true, Ordering::Relaxed));
    let text = args.report == ReportFormat::Text;
    let mut doc = RunReportDocument::default();
    let mut all_ok = true;
    let mut ticker = Ticker { show: text };
    if text {
        print!("{}", report::text_banner(SearchConfig::new(3).progress_interval));
    }
    for n in args.n.iter().map(|&n| n as usize) {
        let cfg = args.rules.config(n);
        if let Err(e) = cfg.validate() {
            return fail(e, 2);
        }
        let side = strategies::guaranteed_side(n).expect("sizes 3..=5 have a proven side");
        let table = if args.no_table {
            None
        } else {
            match strategies::load(n, side, args.strategy_dir.as_deref()) {
                Ok(t) => t,
                Err(e) => return fail(e, 2),
            }
        };
        if text {
            print!("{}", report::text_start(n));
            if let Some(t) = &table {
                println!(
                    "{}'s moves fixed by its strategy table ({} states); max moves: {}",
                    side,
                    t.len(),
                    cfg.max_moves
                );
            }
            let _ = std::io::stdout().flush();
        }
        match solve_with(&cfg, table.as_ref(), &mut ticker) {
            Ok(rep) => {
                let result = RunResult::from_report(n, &rep);
                let aim = match side {
                    Player::One => Outcome::P1Win,
                    Player::Two => Outcome::NoP1Win,
                };
                all_ok &= rep.outcome == aim;
                if text {
                    print!("{}", report::text_result(&result));
                }
                doc.results.push(result);
            }
            Err(SearchError::Interrupted(partial)) => {
                let mut result = RunResult::from_report(n, &partial);
                result.outcome = "interrupted".into();
                if text {
                    print!("{}", report::text_interrupted(&result));
                } else {
                    doc.results.push(result);
                    println!("{}", doc.to_json());
                }
                return ExitCode::from(1);
            }
            Err(e) => return fail(e, 2),
        }
    }
    if !text {
        println!("{}", doc.to_json());
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn extract(args: ExtractArgs) -> ExitCode {
    let n = args.n as usize;
    let cfg = args.rules.config(n);
    let side: Player = args.side.into();
    let started = Instant::now();
    let table = match extract_strategy(&cfg, side) {
        Ok(t) => t,
        Err(e @ SearchError::ExtractionFailed { .. }) => return fail(e, 1),
        Err(e) => return fail(e, 2),
    };
    if let Err(e) = table.save(&args.out) {
        return fail(e, 1);
    }
    println!(
        "wrote {} ({} states, bound {} moves) in {} ms",
        args.out.display(),
        table.len(),
        table.bound,
        started.elapsed().as_millis()
    );
    ExitCode::SUCCESS
}

fn verify(args: VerifyArgs) -> ExitCode {
    let table = match StrategyTable::load(&args.strategy) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", args.strategy.display()), 2),
    };
    let mut cfg = SearchConfig::new(table.n)
        .with_rules(table.rules.clone())
        .with_max_moves(args.max_moves.unwrap_or(table.max_moves));
    cfg.progress_interval = u64::MAX;
    if let Err(e) = cfg.validate() {
        return fail(e, 2);
    }
    let started = Instant::now();
    let rep = verify_strategy(&table, &cfg);
    let ms = started.elapsed().as_millis();
    match &rep.result {
        VerificationResult::CounterexampleFound { line, reason } => {
            let moves: Vec<String> = line.iter().map(|p| format!("{} {}", p.r, p.c)).collect();
            println!("counterexample: {reason}");
            println!("line: {}", moves.join(", "));
            println!("{} states visited in {ms} ms", rep.states_visited);
            ExitCode::from(1)
        }
        ok => {
            let word = match ok {
                VerificationResult::AllLinesWin => "every line is a player one win",
                _ => "no line is a player one win",
            };
            println!(
                "verified: {word} ({} states, longest line {} moves, {ms} ms)",
                rep.states_visited, rep.max_depth
            );
            ExitCode::SUCCESS
        }
    }
}

fn oracle(n: usize) -> ExitCode {
    let started = Instant::now();
    match oracle_minimax(n) {
        Ok(v) => {
            let word = match v {
                GameValue::P1Win => "win",
                GameValue::P2Win => "loss",
                GameValue::Draw => "draw",
            };
            println!("n = {n}: {word} ({} ms)", started.elapsed().as_millis());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e, 2),
    }
}

fn serve(addr: SocketAddr, snapshot: Option<PathBuf>, strategy_dir: Option<PathBuf>) -> ExitCode {
    let tables = match sqgame_service::Tables::load(strategy_dir.as_deref()) {
        Ok(t) => t,
        Err(e) => return fail(e, 2),
    };
    let state = match snapshot {
        Some(path) => match sqgame_service::AppState::with_snapshot_file(tables, &path) {
            Ok(s) => s,
            Err(e) => return fail(format!("{}: {e}", path.display()), 1),
        },
        None => sqgame_service::AppState::new(tables),
    };
    let rt = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => return fail(e, 1),
    };
    match rt.block_on(sqgame_service::serve(addr, state)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(format!("cannot serve on {addr}: {e}"), 1),
    }
}
