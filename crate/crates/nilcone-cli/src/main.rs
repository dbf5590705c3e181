use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nilcone::hodge::Family;
use nilcone_cli::{ingest_str, run, Command, Report, RunOptions};

#[derive(Parser)]
#[command(
    name = "nilcone",
    version,
    about = "Weight filtrations, nilpotent orbits, weak fans and blow-up plans from scenario files"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario files; several are processed in parallel and reported in order.
    #[arg(required = true)]
    scenarios: Vec<PathBuf>,
    /// Print the JSON report.
    #[arg(long, conflicts_with = "md")]
    json: bool,
    /// Print the markdown report (the default).
    #[arg(long)]
    md: bool,
    /// Seed for randomized sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Type families for the weak-fan axiom, e.g. `I,IV`; overrides the scenario.
    #[arg(long, value_delimiter = ',', value_parser = parse_family)]
    phi: Option<Vec<Family>>,
    /// Refuse fan computations whose cones span more dimensions than this.
    #[arg(long)]
    max_dim: Option<usize>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: nilcone::hodge::HodgeError| e.to_string())
}

/// Exit code 2 for anything that prevented a verdict.
fn process(cli: &Cli, opts: &RunOptions, path: &PathBuf) -> Result<Report, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: cannot read: {e}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| format!("{}: ParseError: not UTF-8", path.display()))?;
    let scenario = ingest_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    run(cli.command, &scenario, &bytes, opts).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions {
        seed: cli.seed,
        phi: cli.phi.as_ref().map(|v| v.iter().copied().collect::<BTreeSet<_>>()),
        max_dim: cli.max_dim,
    };
    let results: Vec<Result<Report, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cli.scenarios.iter().map(|p| scope.spawn(|| process(&cli, &opts, p))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut code = 0;
    let mut reports = Vec::new();
    for r in results {
        match r {
            Ok(rep) => {
                code = code.max(rep.exit_code());
                reports.push(rep);
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                code = 2;
            }
        }
    }
    if cli.json {
        if let [single] = reports.as_slice() {
            print!("{}", single.to_json());
        } else {
            let all: Vec<&Report> = reports.iter().collect();
            print!("{}", nilcone_cli::json::to_string(&all));
        }
    } else {
        let md: Vec<String> = reports.iter().map(Report::to_markdown).collect();
        print!("{}", md.join("\n"));
    }
    ExitCode::from(code as u8)
}
