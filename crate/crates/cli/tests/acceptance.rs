//! Acceptance criteria, one line of output each.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cerl_cli::commands::{self, EvalReport, ExploreSummary};
use cerl_core::props::{self, PropertyReport};
use cerl_core::{
    corpus, explore, print_expr, Action, BisimReport, ExplorationConfig, Lts, Pid, Signal, Value,
};

const SEED: u64 = 20_240_601;

fn corpus_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    match limit {
        Some(l) if took > l => Err(format!("{out}; took {took:.2?}, limit {l:?}")),
        _ => Ok(format!("{out}; {took:.2?}")),
    }
}

fn require(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn suites(reports: &[PropertyReport], min_checks: usize) -> Outcome {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed() || r.checks < min_checks)
        .map(|r| r.to_string())
        .collect();
    if !bad.is_empty() {
        return Err(bad.join("; "));
    }
    Ok(reports
        .iter()
        .map(|r| match r.inconclusive {
            0 => format!("{} {}/{}", r.name, r.violations, r.checks),
            n => format!("{} {}/{} ({n} at bound)", r.name, r.violations, r.checks),
        })
        .collect::<Vec<_>>()
        .join(", "))
}

fn pid2_reaches(lts: &Lts, shown: &str) -> bool {
    lts.states().any(|(_, n)| {
        n.live(Pid(2))
            .is_some_and(|l| l.stack.is_empty() && print_expr(&l.redex) == shown)
    })
}

fn mm_evaluates() -> Outcome {
    timed(Some(Duration::from_secs(1)), || {
        let program = commands::load_program(&corpus_file("mm.cerl")).map_err(|e| e.to_string())?;
        let report = commands::eval_source(program, 100_000);
        require(
            report == EvalReport::Finished { value: "[1, 2, 3]".into() },
            format!("eval mm.cerl = {report}"),
        )
    })
}

fn signal_order_outcomes() -> Outcome {
    timed(Some(Duration::from_secs(10)), || {
        let node = commands::load_node(&corpus_file("signal_order.node")).map_err(|e| e.to_string())?;
        let (lts, _) = commands::explore_node(&node, &ExplorationConfig::depth(40));
        let s = ExploreSummary::of(&lts);
        let pid3 = s.results.get(&3).cloned().unwrap_or_default();
        require(
            s.truncated == 0 && pid3.contains("'fst'") && pid3.contains("'snd'"),
            format!("{} states, {} truncated, pid 3 results {:?}", s.states, s.truncated, pid3),
        )
    })
}

fn exit_examples() -> Outcome {
    timed(Some(Duration::from_secs(10)), || {
        let cfg = ExplorationConfig::default();
        let exit2 = commands::load_node(&corpus_file("exit_kill.node")).map_err(|e| e.to_string())?;
        let exit1 = commands::load_node(&corpus_file("exit_kill1.node")).map_err(|e| e.to_string())?;
        let killed = pid2_reaches(&explore(&exit2, &cfg), "['EXIT', #1, 'killed']");
        let kill = pid2_reaches(&explore(&exit1, &cfg), "['EXIT', #1, 'kill']");
        let trace = commands::load_trace(&corpus_file("traces/exit2.trace")).map_err(|e| e.to_string())?;
        let replayed = commands::replay(&exit2, &trace)
            .ok()
            .and_then(|n| n.live(Pid(2)).map(|l| print_expr(&l.redex)));
        require(
            killed && kill && replayed.as_deref() == Some("['EXIT', #1, 'killed']"),
            format!("exit/2 gives 'killed': {killed}, exit/1 gives 'kill': {kill}, trace replay: {replayed:?}"),
        )
    })
}

fn determinism() -> Outcome {
    suites(
        &[props::sequential_determinism(SEED, 1000), props::local_determinism(SEED, 1000)],
        1000,
    )
}

fn exit_table() -> Outcome {
    let t = props::exit_table();
    require(
        t.cases == 64 && t.passed() && t.no_rule.iter().all(|c| c.is_documented_gap()),
        format!(
            "{} cases, {} overlapping, {} without a rule, {} unexpected",
            t.cases,
            t.overlapping.len(),
            t.no_rule.len(),
            t.unexpected.len()
        ),
    )
}

fn signal_ordering() -> Outcome {
    timed(None, || {
        suites(&[props::signal_ordering(SEED, 500, &ExplorationConfig::depth(40))], 500)
    })
}

fn confluence() -> Outcome {
    timed(Some(Duration::from_secs(300)), || {
        suites(&props::confluence_suites(SEED, 20, 12), 1)
    })
}

fn bisimulations() -> Outcome {
    let cfg = ExplorationConfig {
        depth_bound: 400,
        ..ExplorationConfig::default()
    };
    let systems = props::corpus_systems(&cfg);
    let complete = systems.iter().all(|(_, l)| l.is_complete());
    let reports = [
        props::identity_bisimulation(&systems),
        props::mm_in_contexts(SEED, 10, &cfg),
    ];
    let line = suites(&reports, 10)?;
    let direct = cerl_core::weakly_bisimilar(&corpus::mm_node(), &corpus::mm_result_node(), &cfg);
    require(
        complete && direct.holds(),
        format!("{line}, mm against [1, 2, 3]: {direct}"),
    )
}

fn fixed_trace() -> Outcome {
    let (_, _, verdict) = props::fixed_trace_counterexample();
    let kill = Action::Arrive {
        src: Pid(1),
        dst: Pid(0),
        signal: Signal::exit(Value::atom("kill"), false),
    };
    match &verdict {
        BisimReport::FailsAt { action, .. } if *action == kill => Ok(verdict.to_string()),
        other => Err(format!("expected a failure on the kill arrival, got {other}")),
    }
}

fn replay() -> Outcome {
    suites(&[props::replay_soundness(SEED, 1000, 500)], 1000)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("mm evaluates to [1, 2, 3]", mm_evaluates),
        ("signal ordering example reaches 'fst' and 'snd'", signal_order_outcomes),
        ("exit examples reach 'killed' and 'kill' messages", exit_examples),
        ("sequential and process-local determinism", determinism),
        ("exit decision table", exit_table),
        ("signal ordering guarantee", signal_ordering),
        ("confluence, action ordering, chaining", confluence),
        ("identity and mm-in-context bisimulations", bisimulations),
        ("fixed trace is not a weak bisimulation", fixed_trace),
        ("replay soundness", replay),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
