//! Ether, process pool, node, and the inter-process relation.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::process::{local_apply, local_enabled, Action, ActionTemplate, LiveProcess, Process, Signal};
use crate::seq::FrameStack;
use crate::syntax::{list_to_meta, Expr, Pid, Value};

/// In-flight signals keyed by (source, destination). Queues are FIFO and
/// never stored empty, so equal ethers compare equal structurally.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Ether(BTreeMap<(Pid, Pid), VecDeque<Signal>>);

impl Ether {
    pub fn new() -> Self {
        Ether::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, src: Pid, dst: Pid, s: Signal) {
        self.0.entry((src, dst)).or_default().push_back(s);
    }

    /// Pure form of [`Ether::push`].
    pub fn pushed(&self, src: Pid, dst: Pid, s: Signal) -> Ether {
        let mut out = self.clone();
        out.push(src, dst, s);
        out
    }

    /// The head of the (src, dst) queue and the ether without it.
    pub fn pop_first(&self, src: Pid, dst: Pid) -> Option<(Signal, Ether)> {
        let mut out = self.clone();
        let queue = out.0.get_mut(&(src, dst))?;
        let head = queue.pop_front()?;
        if queue.is_empty() {
            out.0.remove(&(src, dst));
        }
        Some((head, out))
    }

    pub fn queue(&self, src: Pid, dst: Pid) -> impl Iterator<Item = &Signal> {
        self.0.get(&(src, dst)).into_iter().flatten()
    }

    pub fn head(&self, src: Pid, dst: Pid) -> Option<&Signal> {
        self.0.get(&(src, dst)).and_then(|q| q.front())
    }

    pub fn edges(&self) -> impl Iterator<Item = (Pid, Pid, &VecDeque<Signal>)> {
        self.0.iter().map(|(&(s, d), q)| (s, d, q))
    }
}

#[derive(Serialize, Deserialize)]
struct EtherEntry {
    src: Pid,
    dst: Pid,
    signals: Vec<Signal>,
}

impl Serialize for Ether {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<EtherEntry> = self
            .edges()
            .map(|(src, dst, q)| EtherEntry {
                src,
                dst,
                signals: q.iter().cloned().collect(),
            })
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ether {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<EtherEntry>::deserialize(d)?;
        let mut ether = Ether::new();
        for e in entries {
            for s in e.signals {
                ether.push(e.src, e.dst, s);
            }
        }
        Ok(ether)
    }
}

/// Processes by identifier; iteration order is by pid.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct ProcessPool(BTreeMap<Pid, Process>);

impl ProcessPool {
    pub fn new() -> Self {
        ProcessPool::default()
    }

    pub fn get(&self, pid: Pid) -> Option<&Process> {
        self.0.get(&pid)
    }

    pub fn insert(&mut self, pid: Pid, p: Process) -> Option<Process> {
        self.0.insert(pid, p)
    }

    pub fn remove(&mut self, pid: Pid) -> Option<Process> {
        self.0.remove(&pid)
    }

    pub fn contains(&self, pid: Pid) -> bool {
        self.0.contains_key(&pid)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pid, &Process)> {
        self.0.iter().map(|(&p, proc_)| (p, proc_))
    }
}

impl FromIterator<(Pid, Process)> for ProcessPool {
    fn from_iter<T: IntoIterator<Item = (Pid, Process)>>(iter: T) -> Self {
        ProcessPool(iter.into_iter().collect())
    }
}

#[derive(Serialize, Deserialize)]
struct PoolEntry {
    pid: Pid,
    process: Process,
}

impl Serialize for ProcessPool {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<PoolEntry> = self
            .iter()
            .map(|(pid, p)| PoolEntry {
                pid,
                process: p.clone(),
            })
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProcessPool {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<PoolEntry>::deserialize(d)?;
        let mut pool = ProcessPool::new();
        for e in entries {
            if pool.insert(e.pid, e.process).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate pid {}", e.pid)));
            }
        }
        Ok(pool)
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Node {
    pub ether: Ether,
    pub pool: ProcessPool,
}

impl Node {
    pub fn new(ether: Ether, pool: ProcessPool) -> Self {
        Node { ether, pool }
    }

    pub fn with_processes(procs: impl IntoIterator<Item = (Pid, Process)>) -> Self {
        Node {
            ether: Ether::new(),
            pool: procs.into_iter().collect(),
        }
    }

    pub fn live(&self, pid: Pid) -> Option<&LiveProcess> {
        self.pool.get(pid).and_then(Process::as_live)
    }
}

/// One more than the largest pid mentioned by pool keys, ether keys or
/// link lists (1 for an empty node).
pub fn fresh_pid(node: &Node) -> Pid {
    let mut max = 0;
    for (pid, p) in node.pool.iter() {
        max = max.max(pid.0);
        match p {
            Process::Live(l) => {
                for l in &l.links {
                    max = max.max(l.0);
                }
            }
            Process::Dead(obligations) => {
                for (l, _) in obligations {
                    max = max.max(l.0);
                }
            }
        }
    }
    for (s, d, _) in node.ether.edges() {
        max = max.max(s.0).max(d.0);
    }
    Pid(max + 1)
}

/// The inter-process relation: `Some(Σ')` iff `Σ --pid:a--> Σ'`.
pub fn node_step(node: &Node, pid: Pid, a: &Action) -> Option<Node> {
    let p = node.pool.get(pid)?;
    match a {
        Action::Send { src, dst, signal } => {
            if *src != pid {
                return None;
            }
            let next = local_apply(p, a)?;
            let mut out = node.clone();
            out.ether.push(*src, *dst, signal.clone());
            out.pool.insert(pid, next);
            Some(out)
        }
        Action::Arrive { src, dst, signal } => {
            // the destination process takes the arrival step
            if *dst != pid || !p.is_live() {
                return None;
            }
            let (head, ether) = node.ether.pop_first(*src, *dst)?;
            if &head != signal {
                return None;
            }
            let next = local_apply(p, a)?;
            let mut out = Node {
                ether,
                pool: node.pool.clone(),
            };
            out.pool.insert(pid, next);
            Some(out)
        }
        Action::Terminate => {
            if matches!(p, Process::Dead(obl) if obl.is_empty()) {
                let mut out = node.clone();
                out.pool.remove(pid);
                return Some(out);
            }
            replace(node, pid, local_apply(p, a)?)
        }
        Action::Spawn { pid: child, fun, args } => {
            if node.pool.contains(*child) {
                return None;
            }
            let Value::Fun(f) = fun else { return None };
            let params = list_to_meta(args)?;
            if params.len() != f.params.len() {
                return None;
            }
            let next = local_apply(p, a)?;
            let mut out = node.clone();
            out.pool.insert(pid, next);
            let body = Expr::apply(Expr::Val(fun.clone()), params.into_iter().map(Expr::Val).collect());
            out.pool.insert(
                *child,
                Process::Live(LiveProcess {
                    stack: FrameStack::new(),
                    redex: body,
                    ..LiveProcess::new(Expr::Val(Value::Nil))
                }),
            );
            Some(out)
        }
        Action::SelfPid { pid: me } => {
            if *me != pid {
                return None;
            }
            replace(node, pid, local_apply(p, a)?)
        }
        Action::Tau | Action::Flag | Action::Receive { .. } => replace(node, pid, local_apply(p, a)?),
    }
}

fn replace(node: &Node, pid: Pid, p: Process) -> Option<Node> {
    let mut out = node.clone();
    out.pool.insert(pid, p);
    Some(out)
}

/// Every enabled `(pid, action)` pair. Spawns carry `fresh_pid`.
pub fn node_enabled(node: &Node) -> Vec<(Pid, Action)> {
    let mut out = Vec::new();
    let fresh = fresh_pid(node);
    for (pid, p) in node.pool.iter() {
        if matches!(p, Process::Dead(obl) if obl.is_empty()) {
            out.push((pid, Action::Terminate));
            continue;
        }
        for t in local_enabled(p, pid) {
            if let ActionTemplate::Spawn { fun, args } = &t {
                let arity_ok = match (fun, list_to_meta(args)) {
                    (Value::Fun(f), Some(vs)) => vs.len() == f.params.len(),
                    _ => false,
                };
                if !arity_ok {
                    continue;
                }
            }
            out.push((pid, t.fill(fresh)));
        }
    }
    for (src, dst, q) in node.ether.edges() {
        let Some(p @ Process::Live(_)) = node.pool.get(dst) else { continue };
        let Some(head) = q.front() else { continue };
        let a = Action::Arrive {
            src,
            dst,
            signal: head.clone(),
        };
        if local_apply(p, &a).is_some() {
            out.push((dst, a));
        }
    }
    out
}

/// Enabled moves restricted to τ.
pub fn tau_enabled(node: &Node) -> Vec<Pid> {
    node.pool
        .iter()
        .filter(|(pid, p)| local_enabled(p, *pid).contains(&ActionTemplate::Ready(Action::Tau)))
        .map(|(pid, _)| pid)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Pattern;

    fn pid(i: u64) -> Pid {
        Pid(i)
    }

    fn msg(a: &str) -> Signal {
        Signal::message(Value::atom(a))
    }

    fn receive_x() -> Expr {
        Expr::receive(vec![(Pattern::var("X"), Expr::var("X"))]).unwrap()
    }

    #[test]
    fn ether_is_fifo_per_edge() {
        let e = Ether::new().pushed(pid(1), pid(2), msg("fst")).pushed(pid(1), pid(3), msg("snd"));
        assert_eq!(e.queue(pid(1), pid(2)).count(), 1);
        assert_eq!(e.queue(pid(1), pid(3)).count(), 1);

        let (s, rest) = e.pop_first(pid(1), pid(3)).unwrap();
        assert_eq!(s, msg("snd"));
        assert_eq!(rest, Ether::new().pushed(pid(1), pid(2), msg("fst")));

        let two = Ether::new().pushed(pid(1), pid(2), msg("a")).pushed(pid(1), pid(2), msg("b"));
        let (first, rest) = two.pop_first(pid(1), pid(2)).unwrap();
        assert_eq!(first, msg("a"));
        assert_eq!(rest.pop_first(pid(1), pid(2)).unwrap(), (msg("b"), Ether::new()));
    }

    #[test]
    fn ether_empty_pops() {
        assert_eq!(Ether::new().pop_first(pid(1), pid(2)), None);
        let e = Ether::new().pushed(pid(1), pid(2), Signal::Link);
        assert_eq!(e.pop_first(pid(1), pid(2)), Some((Signal::Link, Ether::new())));
    }

    #[test]
    fn fresh_pid_examples() {
        let pool3 = Node::with_processes((1..=3).map(|i| (pid(i), Process::live(Expr::int(0)))));
        assert_eq!(fresh_pid(&pool3), pid(4));
        assert_eq!(fresh_pid(&Node::default()), pid(1));
        // scan oracle: pids 1 (pool) and 1, 9 (ether key) -> 10
        let mut n = Node::with_processes([(pid(1), Process::live(Expr::int(0)))]);
        n.ether.push(pid(1), pid(9), msg("x"));
        assert_eq!(fresh_pid(&n), pid(10));
    }

    #[test]
    fn terminated_process_is_removed() {
        let n = Node::with_processes([(pid(5), Process::Dead(vec![]))]);
        let after = node_step(&n, pid(5), &Action::Terminate).unwrap();
        assert!(after.pool.is_empty());
        assert_eq!(after.ether, n.ether);
    }

    #[test]
    fn arrival_requires_live_destination_and_head() {
        let mut n = Node::with_processes([(pid(2), Process::live(receive_x()))]);
        n.ether.push(pid(1), pid(2), msg("a"));
        n.ether.push(pid(1), pid(2), msg("b"));
        let second = Action::Arrive {
            src: pid(1),
            dst: pid(2),
            signal: msg("b"),
        };
        assert_eq!(node_step(&n, pid(2), &second), None);
        let first = Action::Arrive {
            src: pid(1),
            dst: pid(2),
            signal: msg("a"),
        };
        assert!(node_step(&n, pid(2), &first).is_some());
        assert_eq!(node_step(&n, pid(1), &first), None);

        let mut dead = Node::with_processes([(pid(2), Process::Dead(vec![(pid(7), Value::atom("x"))]))]);
        dead.ether.push(pid(1), pid(2), msg("a"));
        assert_eq!(node_step(&dead, pid(2), &first), None);
        assert!(node_enabled(&dead)
            .iter()
            .all(|(_, a)| !matches!(a, Action::Arrive { .. })));
    }

    #[test]
    fn spawn_creates_initial_process() {
        use crate::seq::Frame;
        use crate::syntax::{FunId, Var};
        let f = Value::fun(FunId::new("f", 1), vec![Var::new("X")], Expr::var("X"));
        let stack = FrameStack::from_top_first([Frame::CallArgs {
            fun: Value::atom("spawn"),
            done: vec![f.clone()],
            todo: vec![],
        }]);
        let parent = Process::Live(LiveProcess {
            stack,
            redex: Expr::Val(Value::list([Value::int(3)])),
            ..LiveProcess::new(Expr::int(0))
        });
        let n = Node::with_processes([(pid(1), parent)]);
        let enabled = node_enabled(&n);
        let spawn = Action::Spawn {
            pid: pid(2),
            fun: f.clone(),
            args: Value::list([Value::int(3)]),
        };
        assert_eq!(enabled, vec![(pid(1), spawn.clone())]);
        let after = node_step(&n, pid(1), &spawn).unwrap();
        assert_eq!(after.live(pid(1)).unwrap().redex, Expr::Val(Value::pid(2)));
        let child = after.live(pid(2)).unwrap();
        assert_eq!(child.redex, Expr::apply(Expr::Val(f.clone()), vec![Expr::int(3)]));
        assert!(child.mailbox.is_empty() && child.links.is_empty() && !child.trap);

        // any identifier outside the pool is acceptable for the rule
        let other = Action::Spawn {
            pid: pid(40),
            fun: f.clone(),
            args: Value::list([Value::int(3)]),
        };
        assert!(node_step(&n, pid(1), &other).is_some());
        let taken = Action::Spawn {
            pid: pid(1),
            fun: f.clone(),
            args: Value::list([Value::int(3)]),
        };
        assert_eq!(node_step(&n, pid(1), &taken), None);
    }

    #[test]
    fn spawn_with_wrong_argument_count_is_disabled() {
        use crate::seq::Frame;
        use crate::syntax::{FunId, Var};
        let f = Value::fun(FunId::new("f", 1), vec![Var::new("X")], Expr::var("X"));
        let stack = FrameStack::from_top_first([Frame::CallArgs {
            fun: Value::atom("spawn"),
            done: vec![f.clone()],
            todo: vec![],
        }]);
        let parent = Process::Live(LiveProcess {
            stack,
            redex: Expr::Val(Value::cons(Value::int(1), Value::int(2))),
            ..LiveProcess::new(Expr::int(0))
        });
        let n = Node::with_processes([(pid(1), parent)]);
        assert!(node_enabled(&n).is_empty());
    }

    #[test]
    fn empty_node_has_no_moves() {
        assert!(node_enabled(&Node::default()).is_empty());
    }
}
