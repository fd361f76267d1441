use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use cerl_cli::commands::{self, EvalReport, ExploreSummary};
use cerl_core::config::NodeView;
use cerl_core::{print_node, props, BisimReport, ExplorationConfig};
use clap::{Parser, Subcommand};

/// Exit code for unreadable or malformed inputs.
const INPUT_ERROR: u8 = 65;

#[derive(Parser)]
#[command(name = "cerl", version, about = "Small-step semantics for a concurrent Core Erlang subset")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a sequential program.
    Eval {
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        fuel: u64,
    },
    /// Replay a trace from a node configuration.
    Run {
        node: PathBuf,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Enumerate the interleavings of a node.
    Explore {
        node: PathBuf,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[arg(long, default_value_t = 200_000)]
        states: usize,
        /// Write the transition system as JSON.
        #[arg(long)]
        lts: Option<PathBuf>,
    },
    /// Decide weak bisimilarity of two nodes within bounds.
    CheckEquiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[arg(long, default_value_t = 200_000)]
        states: usize,
    },
    /// Run the property suites.
    Props {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
    /// Serve the stepping session API.
    Serve {
        #[arg(long, env = "CERL_PORT", default_value_t = 7878)]
        port: u16,
    },
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<ExitCode> {
    let json = cli.json;
    match cli.command {
        Command::Eval { file, fuel } => {
            let report = commands::eval_source(commands::load_program(&file)?, fuel);
            if json {
                print_json(&report);
            } else {
                println!("{report}");
            }
            Ok(match report {
                EvalReport::Finished { .. } => ExitCode::SUCCESS,
                EvalReport::Suspended { .. } => ExitCode::from(3),
                EvalReport::OutOfFuel { .. } => ExitCode::from(4),
            })
        }
        Command::Run { node, trace } => {
            let start = commands::load_node(&node)?;
            let trace = commands::load_trace(&trace)?;
            match commands::replay(&start, &trace) {
                Ok(end) => {
                    if json {
                        print_json(&NodeView::of(&end));
                    } else {
                        print!("{}", print_node(&end));
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    if json {
                        print_json(&serde_json::json!({ "error": e.to_string(), "index": e.index }));
                    } else {
                        eprintln!("{e}");
                    }
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Explore { node, depth, states, lts } => {
            let start = commands::load_node(&node)?;
            let cfg = ExplorationConfig {
                depth_bound: depth,
                state_bound: states,
                tau_only: false,
            };
            let (system, doc) = commands::explore_node(&start, &cfg);
            if let Some(out) = lts {
                fs::write(&out, serde_json::to_string(&doc)?).with_context(|| format!("writing {}", out.display()))?;
            }
            let summary = ExploreSummary::of(&system);
            if json {
                print_json(&summary);
            } else {
                print!("{summary}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckEquiv { a, b, depth, states } => {
            let (a, b) = (commands::load_node(&a)?, commands::load_node(&b)?);
            let cfg = ExplorationConfig {
                depth_bound: depth,
                state_bound: states,
                tau_only: false,
            };
            let report = commands::check_equiv(&a, &b, &cfg);
            if json {
                print_json(&report);
            } else {
                println!("{report}");
            }
            Ok(ExitCode::from(match report {
                BisimReport::Holds { .. } => 0,
                BisimReport::FailsAt { .. } => 1,
                BisimReport::UnknownAtBound { .. } => 2,
            }))
        }
        Command::Props { seed, cases } => {
            let reports = props::run_all(seed, cases);
            if json {
                print_json(&reports);
            } else {
                for r in &reports {
                    println!("{r}");
                }
            }
            Ok(if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Serve { port } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(cerl_cli::serve(port))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if json {
                print_json(&serde_json::json!({ "error": format!("{e:#}") }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(INPUT_ERROR)
        }
    }
}
