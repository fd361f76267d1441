//! Seeded random generators for terms, processes, actions and small nodes.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::node::{Ether, Node, ProcessPool};
use crate::process::{Action, LiveProcess, Mailbox, Process, Signal};
use crate::seq::{Frame, FrameStack};
use crate::syntax::{Expr, FunId, Pattern, Pid, Value, Var};

const ATOMS: &[&str] = &["a", "b", "ok", "normal", "kill", "killed", "true", "false", "x"];
const VARS: &[&str] = &["X", "Y", "Z", "W"];

pub fn atom_value<R: Rng>(rng: &mut R) -> Value {
    Value::atom(ATOMS.choose(rng).expect("non-empty"))
}

/// A first-order value: integers, atoms, pids and lists of those.
pub fn value<R: Rng>(rng: &mut R, depth: u32) -> Value {
    let choice = if depth == 0 { rng.gen_range(0..4) } else { rng.gen_range(0..6) };
    match choice {
        0 => Value::int(rng.gen_range(-3i64..10)),
        1 => atom_value(rng),
        2 => Value::pid(rng.gen_range(0..5)),
        3 => Value::Nil,
        4 => {
            let n = rng.gen_range(0..4);
            Value::list((0..n).map(|_| value(rng, depth - 1)).collect::<Vec<_>>())
        }
        _ => Value::cons(value(rng, depth - 1), value(rng, depth - 1)),
    }
}

/// A linear pattern over the given variable pool.
pub fn pattern<R: Rng>(rng: &mut R, depth: u32) -> Pattern {
    let mut free: Vec<&str> = VARS.to_vec();
    free.shuffle(rng);
    pattern_from(rng, depth, &mut free)
}

fn pattern_from<R: Rng>(rng: &mut R, depth: u32, free: &mut Vec<&str>) -> Pattern {
    let choice = if depth == 0 { rng.gen_range(0..5) } else { rng.gen_range(0..7) };
    match choice {
        0 => Pattern::Int(rng.gen_range(-3i64..10).into()),
        1 => Pattern::atom(ATOMS.choose(rng).expect("non-empty")),
        2 => Pattern::Pid(Pid(rng.gen_range(0..5))),
        3 => Pattern::Nil,
        4 | 5 => match free.pop() {
            Some(v) => Pattern::var(v),
            None => Pattern::Nil,
        },
        _ => {
            let h = pattern_from(rng, depth - 1, free);
            let t = pattern_from(rng, depth - 1, free);
            Pattern::Cons(Box::new(h), Box::new(t))
        }
    }
}

/// A pattern that certainly matches `v`, with fresh variables.
pub fn matching_pattern<R: Rng>(rng: &mut R, v: &Value) -> Pattern {
    let mut free: Vec<&str> = VARS.to_vec();
    free.shuffle(rng);
    matching_from(rng, v, &mut free)
}

fn matching_from<R: Rng>(rng: &mut R, v: &Value, free: &mut Vec<&str>) -> Pattern {
    if rng.gen_bool(0.3) {
        if let Some(x) = free.pop() {
            return Pattern::var(x);
        }
    }
    match v {
        Value::Int(i) => Pattern::Int(i.clone()),
        Value::Atom(a) => Pattern::Atom(a.clone()),
        Value::Pid(p) => Pattern::Pid(*p),
        Value::Nil => Pattern::Nil,
        Value::Cons(h, t) => {
            let ph = matching_from(rng, h, free);
            let pt = matching_from(rng, t, free);
            Pattern::Cons(Box::new(ph), Box::new(pt))
        }
        Value::Fun(_) => match free.pop() {
            Some(x) => Pattern::var(x),
            None => Pattern::Nil,
        },
    }
}

/// A closed, terminating sequential expression. `scope` lists variables
/// bound by the context.
pub fn seq_expr<R: Rng>(rng: &mut R, depth: u32, scope: &mut Vec<Var>) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..3) {
            0 if !scope.is_empty() => Expr::Var(scope.choose(rng).expect("non-empty").clone()),
            1 => Expr::int(rng.gen_range(0i64..5)),
            _ => Expr::Val(value(rng, 1)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..8) {
        0 => {
            let x = Var::new(VARS.choose(rng).expect("non-empty"));
            let bound = seq_expr(rng, d, scope);
            scope.push(x.clone());
            let body = seq_expr(rng, d, scope);
            scope.pop();
            Expr::Let {
                var: x,
                bound: bound.into(),
                body: body.into(),
            }
        }
        1 => Expr::cons(seq_expr(rng, d, scope), seq_expr(rng, d, scope)),
        2 => Expr::bif("+", vec![int_expr(rng, d), int_expr(rng, d)]),
        3 => {
            let scrutinee = seq_expr(rng, d, scope);
            let pat = pattern(rng, 2);
            let n = scope.len();
            scope.extend(pat.variables().into_iter().cloned());
            let then_branch = seq_expr(rng, d, scope);
            scope.truncate(n);
            let else_branch = seq_expr(rng, d, scope);
            Expr::case(scrutinee, pat, then_branch, else_branch).expect("generated patterns are linear")
        }
        4 => {
            let k = rng.gen_range(0..3usize);
            let params: Vec<Var> = VARS[..k].iter().map(Var::new).collect();
            let mut inner = params.clone();
            let body = seq_expr(rng, d, &mut inner);
            let f = Value::fun(FunId::new("g", k), params, body);
            let args = (0..k).map(|_| seq_expr(rng, d, scope)).collect();
            Expr::apply(Expr::Val(f), args)
        }
        5 => {
            // non-recursive letrec: the function never calls itself
            let k = rng.gen_range(0..3usize);
            let id = FunId::new("h", k);
            let params: Vec<Var> = VARS[..k].iter().map(Var::new).collect();
            let mut inner = params.clone();
            let body = seq_expr(rng, d, &mut inner);
            let args = (0..k).map(|_| seq_expr(rng, d, scope)).collect();
            Expr::letrec(id.clone(), params, body, Expr::apply(Expr::FunRef(id), args))
        }
        6 => Expr::list((0..rng.gen_range(0..4)).map(|_| seq_expr(rng, d, scope)).collect()),
        _ => bounded_recursion(rng),
    }
}

fn int_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.5) {
        Expr::int(rng.gen_range(-5i64..20))
    } else {
        Expr::bif("+", vec![int_expr(rng, depth - 1), int_expr(rng, depth - 1)])
    }
}

/// Recursion over a short list: sums its elements.
fn bounded_recursion<R: Rng>(rng: &mut R) -> Expr {
    let id = FunId::new("sum", 1);
    let body = Expr::case(
        Expr::var("L"),
        Pattern::Cons(Box::new(Pattern::var("H")), Box::new(Pattern::var("T"))),
        Expr::bif(
            "+",
            vec![Expr::var("H"), Expr::apply(Expr::FunRef(id.clone()), vec![Expr::var("T")])],
        ),
        Expr::int(0),
    )
    .expect("linear");
    let items = (0..rng.gen_range(0..4)).map(|i| Expr::int(i as i64)).collect();
    Expr::letrec(
        id.clone(),
        vec![Var::new("L")],
        body,
        Expr::apply(Expr::FunRef(id), vec![Expr::list(items)]),
    )
}

/// Any expression, possibly open or ill-formed (for determinism checks).
pub fn any_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..4) {
            0 => Expr::var(VARS.choose(rng).expect("non-empty")),
            1 => Expr::FunRef(FunId::new("f", rng.gen_range(0..2))),
            _ => Expr::Val(value(rng, 1)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..9) {
        0 => Expr::let_in(VARS.choose(rng).expect("non-empty"), any_expr(rng, d), any_expr(rng, d)),
        1 => Expr::cons(any_expr(rng, d), any_expr(rng, d)),
        2 => {
            let n = rng.gen_range(0..3);
            Expr::apply(any_expr(rng, d), (0..n).map(|_| any_expr(rng, d)).collect())
        }
        3 => {
            let n = rng.gen_range(0..3);
            let callee = if rng.gen_bool(0.7) {
                Expr::atom(["+", "!", "exit", "link", "self", "spawn", "process_flag", "foo"].choose(rng).expect("non-empty"))
            } else {
                any_expr(rng, d)
            };
            Expr::call(callee, (0..n).map(|_| any_expr(rng, d)).collect())
        }
        4 => Expr::case(any_expr(rng, d), pattern(rng, 2), any_expr(rng, d), any_expr(rng, d))
            .expect("generated patterns are linear"),
        5 => {
            let k = rng.gen_range(0..2usize);
            Expr::letrec(
                FunId::new("f", k),
                VARS[..k].iter().map(Var::new).collect(),
                any_expr(rng, d),
                any_expr(rng, d),
            )
        }
        6 => Expr::receive(vec![(pattern(rng, 1), any_expr(rng, d))]).expect("linear"),
        7 => {
            let k = rng.gen_range(0..2usize);
            Expr::Val(Value::fun(
                FunId::new("f", k),
                VARS[..k].iter().map(Var::new).collect(),
                any_expr(rng, d),
            ))
        }
        _ => seq_expr(rng, d, &mut Vec::new()),
    }
}

pub fn frame<R: Rng>(rng: &mut R) -> Frame {
    let e = |rng: &mut R| any_expr(rng, 2);
    match rng.gen_range(0..8) {
        0 => Frame::CallFun((0..rng.gen_range(0..3)).map(|_| e(rng)).collect()),
        1 => Frame::CallArgs {
            fun: if rng.gen_bool(0.7) { Value::atom("+") } else { value(rng, 1) },
            done: (0..rng.gen_range(0..2)).map(|_| value(rng, 1)).collect(),
            todo: (0..rng.gen_range(0..2)).map(|_| e(rng)).collect(),
        },
        2 => Frame::ApplyFun((0..rng.gen_range(0..3)).map(|_| e(rng)).collect()),
        3 => Frame::ApplyArgs {
            fun: if rng.gen_bool(0.5) {
                Value::fun(FunId::new("f", 1), vec![Var::new("X")], e(rng))
            } else {
                value(rng, 1)
            },
            done: (0..rng.gen_range(0..2)).map(|_| value(rng, 1)).collect(),
            todo: (0..rng.gen_range(0..2)).map(|_| e(rng)).collect(),
        },
        4 => Frame::Let {
            var: Var::new(VARS.choose(rng).expect("non-empty")),
            body: e(rng),
        },
        5 => Frame::Case {
            pat: pattern(rng, 2),
            then_branch: e(rng),
            else_branch: e(rng),
        },
        6 => Frame::ConsTail(e(rng)),
        _ => Frame::ConsHead(value(rng, 1)),
    }
}

pub fn frame_stack<R: Rng>(rng: &mut R, max: usize) -> FrameStack {
    let n = rng.gen_range(0..=max);
    FrameStack::from_top_first((0..n).map(|_| frame(rng)).collect::<Vec<_>>())
}

/// A random sequential configuration, possibly stuck.
pub fn seq_config<R: Rng>(rng: &mut R) -> (FrameStack, Expr) {
    (frame_stack(rng, 3), any_expr(rng, 3))
}

/// A single concurrent operation as an expression, aimed at `targets`.
pub fn conc_op<R: Rng>(rng: &mut R, targets: &[Pid]) -> Expr {
    let t = Expr::Val(Value::Pid(*targets.choose(rng).expect("non-empty")));
    match rng.gen_range(0..9) {
        0 | 1 => Expr::bif("!", vec![t, Expr::Val(value(rng, 1))]),
        2 => Expr::bif("exit", vec![t, Expr::Val(atom_value(rng))]),
        3 => Expr::bif("link", vec![t]),
        4 => Expr::bif("unlink", vec![t]),
        5 => Expr::bif("self", vec![]),
        6 => Expr::bif("process_flag", vec![Expr::atom("trap_exit"), Expr::atom(if rng.gen() { "true" } else { "false" })]),
        7 => Expr::bif(
            "spawn",
            vec![
                Expr::Val(Value::fun(FunId::new("child", 1), vec![Var::new("X")], Expr::var("X"))),
                Expr::list(vec![Expr::Val(atom_value(rng))]),
            ],
        ),
        _ => Expr::receive(vec![(Pattern::var("M"), Expr::var("M"))]).expect("linear"),
    }
}

/// A straight-line concurrent program of at most `len` operations, with
/// sequential noise, ending in a value, an `exit/1` or a receive.
pub fn conc_program<R: Rng>(rng: &mut R, len: usize, targets: &[Pid]) -> Expr {
    let n = rng.gen_range(0..=len);
    let tail = match rng.gen_range(0..4) {
        0 => Expr::bif("exit", vec![Expr::Val(atom_value(rng))]),
        1 => Expr::receive(vec![(Pattern::var("R"), Expr::var("R"))]).expect("linear"),
        _ => Expr::Val(atom_value(rng)),
    };
    (0..n).rev().fold(tail, |rest, i| {
        let op = if rng.gen_bool(0.2) {
            seq_expr(rng, 1, &mut Vec::new())
        } else {
            conc_op(rng, targets)
        };
        Expr::let_in(format!("V{i}"), op, rest)
    })
}

pub fn signal<R: Rng>(rng: &mut R) -> Signal {
    match rng.gen_range(0..5) {
        0 | 1 => Signal::message(value(rng, 1)),
        2 => Signal::exit(atom_value(rng), rng.gen()),
        3 => Signal::Link,
        _ => Signal::Unlink,
    }
}

/// A process with arbitrary state, reachable or not.
pub fn process<R: Rng>(rng: &mut R, pids: &[Pid]) -> Process {
    if rng.gen_bool(0.1) {
        let n = rng.gen_range(0..3);
        return Process::Dead(
            (0..n)
                .map(|_| (*pids.choose(rng).expect("non-empty"), atom_value(rng)))
                .collect(),
        );
    }
    let (stack, redex) = match rng.gen_range(0..3) {
        0 => (FrameStack::new(), conc_program(rng, 3, pids)),
        1 => (FrameStack::new(), conc_op(rng, pids)),
        _ => seq_config(rng),
    };
    Process::Live(LiveProcess {
        stack,
        redex,
        mailbox: Mailbox::from((0..rng.gen_range(0..3)).map(|_| value(rng, 1)).collect::<Vec<_>>()),
        links: (0..rng.gen_range(0..3)).map(|_| *pids.choose(rng).expect("non-empty")).collect(),
        trap: rng.gen(),
    })
}

/// An action for `me`: usually one the process can take, sometimes arbitrary.
pub fn action_for<R: Rng>(rng: &mut R, p: &Process, me: Pid, pids: &[Pid]) -> Action {
    let enabled = crate::process::local_enabled(p, me);
    if !enabled.is_empty() && rng.gen_bool(0.6) {
        let fresh = Pid(pids.iter().map(|p| p.0).max().unwrap_or(0) + 1);
        return enabled.choose(rng).expect("non-empty").clone().fill(fresh);
    }
    let other = *pids.choose(rng).expect("non-empty");
    match rng.gen_range(0..6) {
        0 => Action::Tau,
        1 => Action::Arrive {
            src: other,
            dst: me,
            signal: signal(rng),
        },
        2 => Action::Terminate,
        3 => Action::Receive { value: value(rng, 1) },
        4 => Action::Flag,
        _ => Action::Send {
            src: me,
            dst: other,
            signal: signal(rng),
        },
    }
}

/// A node of 1 to 3 processes running short concurrent programs, with a few
/// signals already in flight.
pub fn small_node<R: Rng>(rng: &mut R) -> Node {
    let n = rng.gen_range(1..=3u64);
    let pids: Vec<Pid> = (1..=n).map(Pid).collect();
    let mut pool = ProcessPool::new();
    for &pid in &pids {
        let mut live = LiveProcess::new(conc_program(rng, 2, &pids));
        live.trap = rng.gen_bool(0.3);
        if rng.gen_bool(0.3) {
            live.mailbox = Mailbox::from(vec![value(rng, 1)]);
        }
        pool.insert(pid, Process::Live(live));
    }
    let mut ether = Ether::new();
    for _ in 0..rng.gen_range(0..2) {
        let src = *pids.choose(rng).expect("non-empty");
        let dst = *pids.choose(rng).expect("non-empty");
        ether.push(src, dst, signal(rng));
    }
    Node::new(ether, pool)
}

/// A shared context around process `me`: frame stack, mailbox, links, flag,
/// in-flight signals and bystander processes.
#[derive(Clone, Debug)]
pub struct Context {
    pub stack: FrameStack,
    pub mailbox: Mailbox,
    pub links: Vec<Pid>,
    pub trap: bool,
    pub ether: Ether,
    pub others: ProcessPool,
}

impl Context {
    /// Places `redex` as process `me` inside this context.
    pub fn plug(&self, me: Pid, redex: Expr) -> Node {
        let mut pool = self.others.clone();
        pool.insert(
            me,
            Process::Live(LiveProcess {
                stack: self.stack.clone(),
                redex,
                mailbox: self.mailbox.clone(),
                links: self.links.clone(),
                trap: self.trap,
            }),
        );
        Node::new(self.ether.clone(), pool)
    }
}

pub fn context<R: Rng>(rng: &mut R, me: Pid) -> Context {
    let others: Vec<Pid> = (1..=rng.gen_range(0..=1u64)).map(|i| Pid(me.0 + i)).collect();
    let mut all = others.clone();
    all.push(me);
    let stack = match rng.gen_range(0..3) {
        0 => FrameStack::from_top_first([Frame::Let {
            var: Var::new("R"),
            body: Expr::var("R"),
        }]),
        1 => FrameStack::from_top_first([Frame::ConsTail(Expr::atom("head"))]),
        _ => FrameStack::new(),
    };
    let mut ether = Ether::new();
    for _ in 0..rng.gen_range(0..=2) {
        let src = *all.choose(rng).expect("non-empty");
        let signal = match rng.gen_range(0..4) {
            0 => Signal::Link,
            1 => Signal::exit(atom_value(rng), rng.gen()),
            _ => Signal::message(value(rng, 1)),
        };
        ether.push(src, me, signal);
    }
    let mut pool = ProcessPool::new();
    for &o in &others {
        pool.insert(o, Process::live(conc_program(rng, 1, &all)));
    }
    Context {
        stack,
        mailbox: Mailbox::from((0..rng.gen_range(0..=2)).map(|_| value(rng, 1)).collect::<Vec<_>>()),
        links: (0..rng.gen_range(0..=1)).map(|_| *all.choose(rng).expect("non-empty")).collect(),
        trap: rng.gen(),
        ether,
        others: pool,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_sequential_programs_terminate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let e = seq_expr(&mut rng, 4, &mut Vec::new());
            let out = crate::seq::seq_eval(FrameStack::new(), e.clone(), 100_000);
            assert!(!matches!(out, crate::seq::SeqOutcome::OutOfFuel { .. }), "{e:?}");
        }
    }

    #[test]
    fn generated_patterns_are_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            assert!(pattern(&mut rng, 3).check_linear().is_ok());
            let v = value(&mut rng, 2);
            assert!(crate::syntax::is_match(&matching_pattern(&mut rng, &v), &v));
        }
    }
}
