//! File loading and the pure parts of each subcommand.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use cerl_core::config::{LtsDoc, NodeConfigDoc};
use cerl_core::seq::FrameStack;
use cerl_core::{
    explore, parse_expr, print_expr, print_value, run_trace, seq_eval, weakly_bisimilar, BisimReport,
    ExplorationConfig, Expr, Lts, Node, Process, RedexClass, ReplayError, SeqOutcome, Trace,
};
use serde::Serialize;

pub fn load_program(path: &Path) -> Result<Expr> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_expr(&src).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_node(path: &Path) -> Result<Node> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = NodeConfigDoc::from_json(&src).with_context(|| format!("loading {}", path.display()))?;
    doc.to_node().with_context(|| format!("loading {}", path.display()))
}

pub fn load_trace(path: &Path) -> Result<Trace> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&src).with_context(|| format!("parsing trace {}", path.display()))
}

/// Result of sequential evaluation, as printed by `eval`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum EvalReport {
    Finished { value: String },
    Suspended { class: String, redex: String, stack_depth: usize },
    OutOfFuel { redex: String, stack_depth: usize },
}

fn describe_class(c: &RedexClass) -> String {
    match c {
        RedexClass::Tau => "tau".into(),
        RedexClass::FinalValue(v) => format!("value {}", print_value(v)),
        RedexClass::ReceiveExp => "receive".into(),
        RedexClass::ConcDispatch(shape) => format!("dispatch {}", shape.bif()),
        RedexClass::Stuck(reason) => format!("stuck: {reason}"),
    }
}

pub fn eval_source(e: Expr, fuel: u64) -> EvalReport {
    match seq_eval(FrameStack::new(), e, fuel) {
        SeqOutcome::Finished(v) => EvalReport::Finished { value: print_value(&v) },
        SeqOutcome::Suspended { stack, redex, class } => EvalReport::Suspended {
            class: describe_class(&class),
            redex: print_expr(&redex),
            stack_depth: stack.len(),
        },
        SeqOutcome::OutOfFuel { stack, redex } => EvalReport::OutOfFuel {
            redex: print_expr(&redex),
            stack_depth: stack.len(),
        },
    }
}

impl std::fmt::Display for EvalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalReport::Finished { value } => write!(f, "{value}"),
            EvalReport::Suspended { class, redex, stack_depth } => {
                write!(f, "suspended ({class}) at {redex} with {stack_depth} frames")
            }
            EvalReport::OutOfFuel { redex, stack_depth } => {
                write!(f, "out of fuel at {redex} with {stack_depth} frames")
            }
        }
    }
}

pub fn replay(node: &Node, trace: &Trace) -> Result<Node, ReplayError> {
    run_trace(node, trace)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ExploreSummary {
    pub states: usize,
    pub edges: usize,
    pub truncated: usize,
    pub terminal_states: usize,
    /// Per pid, every value the process reaches with an empty stack.
    pub results: BTreeMap<u64, BTreeSet<String>>,
}

impl ExploreSummary {
    pub fn of(lts: &Lts) -> Self {
        let mut results: BTreeMap<u64, BTreeSet<String>> = BTreeMap::new();
        for (_, n) in lts.states() {
            for (pid, p) in n.pool.iter() {
                if let Process::Live(l) = p {
                    if let (true, Some(v)) = (l.stack.is_empty(), l.redex.as_value()) {
                        results.entry(pid.0).or_default().insert(print_value(v));
                    }
                }
            }
        }
        ExploreSummary {
            states: lts.len(),
            edges: lts.edges().len(),
            truncated: lts.truncated().count(),
            terminal_states: lts.terminal_states().count(),
            results,
        }
    }
}

impl std::fmt::Display for ExploreSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{} states, {} edges, {} truncated, {} terminal",
            self.states, self.edges, self.truncated, self.terminal_states
        )?;
        for (pid, values) in &self.results {
            let items: Vec<&str> = values.iter().map(String::as_str).collect();
            writeln!(f, "#{pid} results: {}", items.join(", "))?;
        }
        Ok(())
    }
}

/// Explores `node`, returning the system and its exportable form.
pub fn explore_node(node: &Node, cfg: &ExplorationConfig) -> (Lts, LtsDoc) {
    let lts = explore(node, cfg);
    let doc = LtsDoc::of(&lts);
    (lts, doc)
}

pub fn check_equiv(a: &Node, b: &Node, cfg: &ExplorationConfig) -> BisimReport {
    weakly_bisimilar(a, b, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cerl_core::corpus;

    #[test]
    fn mm_evaluates_to_its_result() {
        assert_eq!(
            eval_source(corpus::mm_program(), 10_000),
            EvalReport::Finished {
                value: "[1, 2, 3]".into()
            }
        );
    }

    #[test]
    fn receive_suspends() {
        let r = eval_source(parse_expr("let X = 1 in receive Y -> Y end").unwrap(), 100);
        assert!(matches!(r, EvalReport::Suspended { ref class, .. } if class == "receive"));
    }

    #[test]
    fn fuel_runs_out() {
        assert!(matches!(
            eval_source(corpus::mm_program(), 3),
            EvalReport::OutOfFuel { .. }
        ));
    }

    #[test]
    fn signal_order_summary_lists_both_outcomes() {
        let (lts, _) = explore_node(&corpus::signal_order_node(), &ExplorationConfig::depth(40));
        let s = ExploreSummary::of(&lts);
        assert_eq!(s.truncated, 0);
        let pid3 = &s.results[&3];
        assert!(pid3.contains("'fst'") && pid3.contains("'snd'"));
    }
}
