//! The worked example programs and nodes, built from concrete syntax.

use crate::node::Node;
use crate::process::{LiveProcess, Process};
use crate::surface::parse_expr;
use crate::syntax::{Expr, Pid, Value};

/// Maps the successor function over `[0, 1, 2]` with a recursive `'mm'/2`.
pub const MM_SOURCE: &str = "letrec 'mm'/2 = fun(F, E) ->
    case E of [H|T]
      then [ apply F(H) | apply 'mm'/2(F, T) ]
      else []
    end
  in apply 'mm'/2(fun(X) -> call '+'(X, 1) end, [0,1,2])";

/// Process 1 sends to 2 then 3; process 2 forwards to 3; process 3 receives.
pub const SIGNAL_ORDER: [(u64, &str); 3] = [
    (1, "let X = call '!'(#2, 'fst') in call '!'(#3, 'snd')"),
    (2, "receive X -> call '!'(#3, X) end"),
    (3, "receive X -> X end"),
];

/// Process 1 links to 2 and kills itself with `exit/2`.
pub const EXIT_KILL_2: &str = "let X = call 'link'(#2) in call 'exit'(#1, 'kill')";
/// Process 1 links to 2 and exits with `exit/1`.
pub const EXIT_KILL_1: &str = "let X = call 'link'(#2) in call 'exit'('kill')";
/// The trapping receiver of the exit examples.
pub const EXIT_RECEIVER: &str = "receive X -> X end";

fn parse(src: &str) -> Expr {
    parse_expr(src).expect("corpus sources parse")
}

pub fn mm_program() -> Expr {
    parse(MM_SOURCE)
}

/// The value `mm` computes.
pub fn mm_result() -> Value {
    Value::list([Value::int(1), Value::int(2), Value::int(3)])
}

pub fn signal_order_node() -> Node {
    Node::with_processes(SIGNAL_ORDER.iter().map(|(pid, src)| (Pid(*pid), Process::live(parse(src)))))
}

fn exit_node(sender: &str) -> Node {
    let mut receiver = LiveProcess::new(parse(EXIT_RECEIVER));
    receiver.trap = true;
    Node::with_processes([
        (Pid(1), Process::live(parse(sender))),
        (Pid(2), Process::Live(receiver)),
    ])
}

pub fn exit_kill_node() -> Node {
    exit_node(EXIT_KILL_2)
}

pub fn exit_kill1_node() -> Node {
    exit_node(EXIT_KILL_1)
}

/// A single process evaluating `mm`.
pub fn mm_node() -> Node {
    Node::with_processes([(Pid(1), Process::live(mm_program()))])
}

/// The node with the result of `mm` in place of the program.
pub fn mm_result_node() -> Node {
    Node::with_processes([(Pid(1), Process::live(Expr::Val(mm_result())))])
}

/// `let X = 0 in X` as process 0.
pub fn let_zero_node() -> Node {
    Node::with_processes([(Pid(0), Process::live(parse("let X = 0 in X")))])
}

/// Every example node, by name.
pub fn nodes() -> Vec<(&'static str, Node)> {
    vec![
        ("signal_order", signal_order_node()),
        ("exit_kill", exit_kill_node()),
        ("exit_kill1", exit_kill1_node()),
        ("mm", mm_node()),
        ("mm_result", mm_result_node()),
        ("let_zero", let_zero_node()),
    ]
}
