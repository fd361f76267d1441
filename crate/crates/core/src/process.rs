//! Processes, signals, actions and the labelled process-local relation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::seq::{classify_redex, seq_step, DispatchShape, FrameStack, RedexClass};
use crate::syntax::{bool_to_atom, match_bind, subst, Bindings, Expr, Pattern, Pid, Value};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Signal {
    Message { value: Value },
    /// `link` tells whether the exit travelled through a link.
    Exit { reason: Value, link: bool },
    Link,
    Unlink,
}

impl Signal {
    pub fn message(v: Value) -> Self {
        Signal::Message { value: v }
    }

    pub fn exit(reason: Value, link: bool) -> Self {
        Signal::Exit { reason, link }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Message { value } => write!(f, "msg {value}"),
            Signal::Exit { reason, link } => write!(f, "exit({reason}, {})", if *link { "tt" } else { "ff" }),
            Signal::Link => f.write_str("link"),
            Signal::Unlink => f.write_str("unlink"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Send { src: Pid, dst: Pid, signal: Signal },
    Arrive { src: Pid, dst: Pid, signal: Signal },
    Receive { value: Value },
    #[serde(rename = "self")]
    SelfPid { pid: Pid },
    Spawn { pid: Pid, fun: Value, args: Value },
    Tau,
    Terminate,
    Flag,
}

impl Action {
    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }

    pub fn is_spawn(&self) -> bool {
        matches!(self, Action::Spawn { .. })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Send { src, dst, signal } => write!(f, "send {src} -> {dst}: {signal}"),
            Action::Arrive { src, dst, signal } => write!(f, "arrive {src} -> {dst}: {signal}"),
            Action::Receive { value } => write!(f, "receive {value}"),
            Action::SelfPid { pid } => write!(f, "self {pid}"),
            Action::Spawn { pid, fun, args } => write!(f, "spawn {pid} = {fun} {args}"),
            Action::Tau => f.write_str("tau"),
            Action::Terminate => f.write_str("terminate"),
            Action::Flag => f.write_str("flag"),
        }
    }
}

/// Messages waiting to be received, oldest first.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mailbox(Vec<Value>);

impl Mailbox {
    pub fn new() -> Self {
        Mailbox::default()
    }

    pub fn push(&mut self, v: Value) {
        self.0.push(v);
    }

    /// Removes the first occurrence of `v`.
    pub fn pop_first(&mut self, v: &Value) -> bool {
        match self.0.iter().position(|m| m == v) {
            Some(i) => {
                self.0.remove(i);
                true
            }
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Value> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Value] {
        &self.0
    }
}

impl From<Vec<Value>> for Mailbox {
    fn from(v: Vec<Value>) -> Self {
        Mailbox(v)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct LiveProcess {
    pub stack: FrameStack,
    pub redex: Expr,
    pub mailbox: Mailbox,
    /// May hold duplicates; unlinking removes all of them.
    pub links: Vec<Pid>,
    pub trap: bool,
}

impl LiveProcess {
    pub fn new(redex: Expr) -> Self {
        LiveProcess {
            stack: FrameStack::new(),
            redex,
            mailbox: Mailbox::new(),
            links: Vec::new(),
            trap: false,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    Live(LiveProcess),
    /// Exit signals still owed to former links, in order.
    Dead(Vec<(Pid, Value)>),
}

impl Process {
    pub fn live(redex: Expr) -> Self {
        Process::Live(LiveProcess::new(redex))
    }

    pub fn as_live(&self) -> Option<&LiveProcess> {
        match self {
            Process::Live(p) => Some(p),
            Process::Dead(_) => None,
        }
    }

    pub fn is_live(&self) -> bool {
        matches!(self, Process::Live(_))
    }
}

/// How an arriving exit signal is handled.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExitOutcome {
    Drop,
    TerminateWith(Value),
    ConvertToMessage,
    /// No rule covers the configuration; the arrival is not enabled.
    NoRule,
}

/// Premises of the three exit-arrival rules, evaluated independently.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ExitPremises {
    pub drop: bool,
    pub terminate: bool,
    pub convert: bool,
}

pub fn exit_premises(trap: bool, reason: &Value, link: bool, src: Pid, me: Pid, links: &[Pid]) -> ExitPremises {
    let normal = reason.is_atom("normal");
    let kill = reason.is_atom("kill");
    let src_linked = links.contains(&src);
    let drop = (src != me && !trap && normal) || (!src_linked && link && src != me);
    let terminate = (kill && !link)
        || (!trap && !normal && (!link || src_linked))
        || (!trap && normal && src == me);
    let convert = trap && ((!link && !kill) || (link && src_linked));
    ExitPremises {
        drop,
        terminate,
        convert,
    }
}

/// Decides what an exit signal from `src` does to process `me`.
///
/// When an explicit `'kill'` meets a non-trapping process both termination
/// disjuncts hold; the reason then becomes `'killed'`.
pub fn exit_decision(trap: bool, reason: &Value, link: bool, src: Pid, me: Pid, links: &[Pid]) -> ExitOutcome {
    let premises = exit_premises(trap, reason, link, src, me, links);
    if premises.drop {
        ExitOutcome::Drop
    } else if premises.terminate {
        if reason.is_atom("kill") && !link {
            ExitOutcome::TerminateWith(Value::atom("killed"))
        } else {
            ExitOutcome::TerminateWith(reason.clone())
        }
    } else if premises.convert {
        ExitOutcome::ConvertToMessage
    } else {
        ExitOutcome::NoRule
    }
}

/// The oldest message matching any clause, the first clause it matches and
/// the resulting bindings.
pub fn receive_select(q: &Mailbox, clauses: &[(Pattern, Expr)]) -> Option<(usize, Value, Bindings)> {
    q.iter().find_map(|msg| {
        clauses
            .iter()
            .enumerate()
            .find_map(|(i, (p, _))| match_bind(p, msg).map(|b| (i, msg.clone(), b)))
    })
}

fn exit_message(src: Pid, reason: &Value) -> Value {
    Value::list([Value::atom("EXIT"), Value::Pid(src), reason.clone()])
}

fn terminated(links: &[Pid], reason: &Value) -> Process {
    Process::Dead(links.iter().map(|&l| (l, reason.clone())).collect())
}

/// The process-local relation: `Some(p')` iff `p --a--> p'`.
pub fn local_apply(p: &Process, a: &Action) -> Option<Process> {
    match p {
        Process::Dead(obligations) => match a {
            Action::Send {
                dst,
                signal: Signal::Exit { reason, link: true },
                ..
            } => match obligations.split_first() {
                Some(((to, r), rest)) if to == dst && r == reason => Some(Process::Dead(rest.to_vec())),
                _ => None,
            },
            _ => None,
        },
        Process::Live(live) => live_apply(live, a),
    }
}

fn live_apply(p: &LiveProcess, a: &Action) -> Option<Process> {
    let with = |stack: FrameStack, redex: Expr| {
        Some(Process::Live(LiveProcess {
            stack,
            redex,
            mailbox: p.mailbox.clone(),
            links: p.links.clone(),
            trap: p.trap,
        }))
    };
    match a {
        Action::Tau => {
            let (k, e) = seq_step(&p.stack, &p.redex)?;
            with(k, e)
        }
        Action::Arrive { src, dst, signal } => arrive(p, *src, *dst, signal),
        Action::Receive { value } => {
            let Expr::Receive(clauses) = &p.redex else { return None };
            let (i, msg, b) = receive_select(&p.mailbox, clauses)?;
            if &msg != value {
                return None;
            }
            let mut next = p.clone();
            next.redex = subst(&clauses[i].1, &b);
            next.mailbox.pop_first(value);
            Some(Process::Live(next))
        }
        Action::Terminate => match classify_redex(&p.stack, &p.redex) {
            RedexClass::FinalValue(_) => Some(terminated(&p.links, &Value::atom("normal"))),
            RedexClass::ConcDispatch(DispatchShape::Exit1 { reason }) => Some(terminated(&p.links, &reason)),
            _ => None,
        },
        Action::Send { dst, signal, .. } => {
            let RedexClass::ConcDispatch(shape) = classify_redex(&p.stack, &p.redex) else {
                return None;
            };
            let mut next = p.clone();
            next.stack.pop();
            match (shape, signal) {
                (DispatchShape::Send { target, payload }, Signal::Message { value })
                    if target == *dst && &payload == value =>
                {
                    next.redex = Expr::Val(payload);
                }
                (DispatchShape::Exit2 { target, reason }, Signal::Exit { reason: r, link: false })
                    if target == *dst && &reason == r =>
                {
                    next.redex = Expr::atom("true");
                }
                (DispatchShape::Link { target }, Signal::Link) if target == *dst => {
                    next.redex = Expr::atom("ok");
                    next.links.insert(0, target);
                }
                (DispatchShape::Unlink { target }, Signal::Unlink) if target == *dst => {
                    next.redex = Expr::atom("ok");
                    next.links.retain(|&l| l != target);
                }
                _ => return None,
            }
            Some(Process::Live(next))
        }
        Action::SelfPid { pid } => match classify_redex(&p.stack, &p.redex) {
            RedexClass::ConcDispatch(DispatchShape::SelfPid) => {
                let mut next = p.clone();
                next.stack.pop();
                next.redex = Expr::Val(Value::Pid(*pid));
                Some(Process::Live(next))
            }
            _ => None,
        },
        Action::Spawn { pid, fun, args } => match classify_redex(&p.stack, &p.redex) {
            RedexClass::ConcDispatch(DispatchShape::Spawn { fun: f, args: vs })
                if matches!(fun, Value::Fun(g) if *g == f) && &vs == args =>
            {
                let mut next = p.clone();
                next.stack.pop();
                next.redex = Expr::Val(Value::Pid(*pid));
                Some(Process::Live(next))
            }
            _ => None,
        },
        Action::Flag => match classify_redex(&p.stack, &p.redex) {
            RedexClass::ConcDispatch(DispatchShape::Flag { trap }) => {
                let mut next = p.clone();
                next.stack.pop();
                next.redex = Expr::Val(Value::Atom(bool_to_atom(p.trap)));
                next.trap = trap;
                Some(Process::Live(next))
            }
            _ => None,
        },
    }
}

fn arrive(p: &LiveProcess, src: Pid, dst: Pid, signal: &Signal) -> Option<Process> {
    let mut next = p.clone();
    match signal {
        Signal::Message { value } => next.mailbox.push(value.clone()),
        Signal::Exit { reason, link } => match exit_decision(p.trap, reason, *link, src, dst, &p.links) {
            ExitOutcome::Drop => {}
            ExitOutcome::TerminateWith(r) => return Some(terminated(&p.links, &r)),
            ExitOutcome::ConvertToMessage => next.mailbox.push(exit_message(src, reason)),
            ExitOutcome::NoRule => return None,
        },
        Signal::Link => next.links.insert(0, src),
        Signal::Unlink => next.links.retain(|&l| l != src),
    }
    Some(Process::Live(next))
}

/// A locally enabled move; spawns still need a fresh pid from the node.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ActionTemplate {
    Ready(Action),
    Spawn { fun: Value, args: Value },
}

impl ActionTemplate {
    pub fn fill(self, fresh: Pid) -> Action {
        match self {
            ActionTemplate::Ready(a) => a,
            ActionTemplate::Spawn { fun, args } => Action::Spawn { pid: fresh, fun, args },
        }
    }
}

/// Every non-arrival move of process `me`.
pub fn local_enabled(p: &Process, me: Pid) -> Vec<ActionTemplate> {
    let live = match p {
        Process::Dead(obligations) => {
            return obligations
                .first()
                .map(|(to, reason)| {
                    ActionTemplate::Ready(Action::Send {
                        src: me,
                        dst: *to,
                        signal: Signal::exit(reason.clone(), true),
                    })
                })
                .into_iter()
                .collect();
        }
        Process::Live(live) => live,
    };
    let ready = |a| vec![ActionTemplate::Ready(a)];
    match classify_redex(&live.stack, &live.redex) {
        RedexClass::Tau => ready(Action::Tau),
        RedexClass::FinalValue(_) => ready(Action::Terminate),
        RedexClass::ReceiveExp => {
            let Expr::Receive(clauses) = &live.redex else { unreachable!() };
            receive_select(&live.mailbox, clauses)
                .map(|(_, value, _)| ActionTemplate::Ready(Action::Receive { value }))
                .into_iter()
                .collect()
        }
        RedexClass::ConcDispatch(shape) => match shape {
            DispatchShape::Send { target, payload } => ready(Action::Send {
                src: me,
                dst: target,
                signal: Signal::message(payload),
            }),
            DispatchShape::Exit2 { target, reason } => ready(Action::Send {
                src: me,
                dst: target,
                signal: Signal::exit(reason, false),
            }),
            DispatchShape::Exit1 { .. } => ready(Action::Terminate),
            DispatchShape::Link { target } => ready(Action::Send {
                src: me,
                dst: target,
                signal: Signal::Link,
            }),
            DispatchShape::Unlink { target } => ready(Action::Send {
                src: me,
                dst: target,
                signal: Signal::Unlink,
            }),
            DispatchShape::SelfPid => ready(Action::SelfPid { pid: me }),
            DispatchShape::Spawn { fun, args } => vec![ActionTemplate::Spawn {
                fun: Value::Fun(fun),
                args,
            }],
            DispatchShape::Flag { .. } => ready(Action::Flag),
        },
        RedexClass::Stuck(_) => Vec::new(),
    }
}
