//! Inputs shared by the benchmarks.

use cerl_core::{corpus, Expr, Node, Pid, Process};

/// A process that counts down from `n` through a recursive function.
pub fn countdown(n: u64) -> Expr {
    cerl_core::parse_expr(&format!(
        "letrec 'down'/1 = fun(N) -> case N of 0 then 'done' else apply 'down'/1(call '+'(N, -1)) end \
         in apply 'down'/1({n})"
    ))
    .expect("benchmark source parses")
}

/// `k` senders each sending one message to a shared receiver.
pub fn fan_in(k: u64) -> Node {
    let receiver = (0..k).fold("'ok'".to_string(), |body, _| format!("receive X -> {body} end"));
    let senders = (1..=k).map(|i| (Pid(i), Process::live(cerl_core::parse_expr(&format!("call '!'(#0, {i})")).expect("parses"))));
    Node::with_processes(std::iter::once((Pid(0), Process::live(cerl_core::parse_expr(&receiver).expect("parses")))).chain(senders))
}

pub fn corpus_nodes() -> Vec<(&'static str, Node)> {
    corpus::nodes()
}
