//! Trace replay, bounded breadth-first exploration and seeded random runs.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::node::{node_enabled, node_step, Node};
use crate::process::Action;
use crate::syntax::Pid;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TraceStep {
    pub pid: Pid,
    pub action: Action,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pid, self.action)
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trace(pub Vec<TraceStep>);

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    pub fn push(&mut self, pid: Pid, action: Action) {
        self.0.push(TraceStep { pid, action });
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TraceStep> {
        self.0.iter()
    }
}

/// The step at `index` was not enabled when reached.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("trace step {index} ({step}) is not enabled")]
pub struct ReplayError {
    pub index: usize,
    pub step: TraceStep,
    /// The node reached just before the failing step.
    pub at: Box<Node>,
}

pub fn run_trace(start: &Node, trace: &Trace) -> Result<Node, ReplayError> {
    let mut cur = start.clone();
    for (index, step) in trace.iter().enumerate() {
        cur = match node_step(&cur, step.pid, &step.action) {
            Some(n) => n,
            None => {
                return Err(ReplayError {
                    index,
                    step: step.clone(),
                    at: Box::new(cur),
                })
            }
        };
    }
    Ok(cur)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExplorationConfig {
    pub depth_bound: usize,
    pub state_bound: usize,
    /// Follow only τ edges.
    pub tau_only: bool,
}

impl Default for ExplorationConfig {
    fn default() -> Self {
        ExplorationConfig {
            depth_bound: 64,
            state_bound: 200_000,
            tau_only: false,
        }
    }
}

impl ExplorationConfig {
    pub fn depth(depth_bound: usize) -> Self {
        ExplorationConfig {
            depth_bound,
            ..ExplorationConfig::default()
        }
    }
}

pub type StateId = usize;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub from: StateId,
    pub pid: Pid,
    pub action: Action,
    pub to: StateId,
}

/// A finite unfolding of the node relation. State 0 is the initial node.
#[derive(Clone, Debug)]
pub struct Lts {
    states: Vec<Node>,
    index: HashMap<Node, StateId>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    depth: Vec<usize>,
    truncated: Vec<bool>,
    tau_only: bool,
}

impl Lts {
    fn with_initial(init: Node, tau_only: bool) -> Self {
        let mut lts = Lts {
            states: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            out: Vec::new(),
            depth: Vec::new(),
            truncated: Vec::new(),
            tau_only,
        };
        lts.intern(init, 0);
        lts
    }

    fn intern(&mut self, n: Node, depth: usize) -> (StateId, bool) {
        if let Some(&id) = self.index.get(&n) {
            return (id, false);
        }
        let id = self.states.len();
        self.index.insert(n.clone(), id);
        self.states.push(n);
        self.out.push(Vec::new());
        self.depth.push(depth);
        self.truncated.push(false);
        (id, true)
    }

    pub fn initial(&self) -> StateId {
        0
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: StateId) -> &Node {
        &self.states[id]
    }

    pub fn states(&self) -> impl Iterator<Item = (StateId, &Node)> {
        self.states.iter().enumerate()
    }

    pub fn id_of(&self, n: &Node) -> Option<StateId> {
        self.index.get(n).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, id: StateId) -> impl Iterator<Item = &Edge> {
        self.out[id].iter().map(move |&e| &self.edges[e])
    }

    pub fn depth_of(&self, id: StateId) -> usize {
        self.depth[id]
    }

    /// Whether some outgoing move of `id` was not explored.
    pub fn is_truncated(&self, id: StateId) -> bool {
        self.truncated[id]
    }

    pub fn truncated(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.len()).filter(|&i| self.truncated[i])
    }

    pub fn is_complete(&self) -> bool {
        !self.truncated.iter().any(|&t| t)
    }

    pub fn tau_only(&self) -> bool {
        self.tau_only
    }

    /// States without any outgoing move that were fully explored.
    pub fn terminal_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.len()).filter(|&i| !self.truncated[i] && self.out[i].is_empty())
    }

    /// τ-successors of a state inside this LTS.
    pub fn tau_successors(&self, id: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.out_edges(id).filter(|e| e.action.is_tau()).map(|e| e.to)
    }

    /// States reachable through τ edges, `id` included.
    pub fn tau_closure(&self, id: StateId) -> Vec<StateId> {
        let mut seen = HashSet::from([id]);
        let mut order = vec![id];
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            i += 1;
            for t in self.tau_successors(s) {
                if seen.insert(t) {
                    order.push(t);
                }
            }
        }
        order
    }
}

fn successors(node: &Node, tau_only: bool) -> Vec<(Pid, Action, Node)> {
    node_enabled(node)
        .into_iter()
        .filter(|(_, a)| !tau_only || a.is_tau())
        .map(|(pid, a)| {
            let next = node_step(node, pid, &a).expect("enabled step must fire");
            (pid, a, next)
        })
        .collect()
}

/// Breadth-first exploration up to the configured bounds. Each layer's
/// successors are computed in parallel and merged in order, so the result
/// does not depend on the thread count.
pub fn explore(init: &Node, cfg: &ExplorationConfig) -> Lts {
    let mut lts = Lts::with_initial(init.clone(), cfg.tau_only);
    let mut layer: Vec<StateId> = vec![0];
    let mut depth = 0;
    while !layer.is_empty() {
        if depth >= cfg.depth_bound {
            for &s in &layer {
                let has_moves = !successors(&lts.states[s], cfg.tau_only).is_empty();
                lts.truncated[s] = has_moves;
            }
            break;
        }
        let expanded: Vec<Vec<(Pid, Action, Node)>> = layer
            .par_iter()
            .map(|&s| successors(&lts.states[s], cfg.tau_only))
            .collect();
        let mut next_layer = Vec::new();
        for (&from, succs) in layer.iter().zip(expanded) {
            for (pid, action, node) in succs {
                let known = lts.index.get(&node).copied();
                let to = match known {
                    Some(id) => id,
                    None if lts.len() >= cfg.state_bound => {
                        lts.truncated[from] = true;
                        continue;
                    }
                    None => {
                        let (id, _) = lts.intern(node, depth + 1);
                        next_layer.push(id);
                        id
                    }
                };
                let e = lts.edges.len();
                lts.edges.push(Edge { from, pid, action, to });
                lts.out[from].push(e);
            }
        }
        layer = next_layer;
        depth += 1;
    }
    lts
}

/// Runs up to `max_steps` uniformly chosen enabled steps.
pub fn random_run(start: &Node, seed: u64, max_steps: usize) -> (Node, Trace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = start.clone();
    let mut trace = Trace::new();
    for _ in 0..max_steps {
        let enabled = node_enabled(&cur);
        if enabled.is_empty() {
            break;
        }
        let (pid, a) = enabled[rng.gen_range(0..enabled.len())].clone();
        cur = node_step(&cur, pid, &a).expect("enabled step must fire");
        trace.push(pid, a);
    }
    (cur, trace)
}

/// Like [`random_run`] but restricted to τ steps.
pub fn random_tau_run(start: &Node, seed: u64, max_steps: usize) -> (Node, Trace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = start.clone();
    let mut trace = Trace::new();
    for _ in 0..max_steps {
        let taus = crate::node::tau_enabled(&cur);
        if taus.is_empty() {
            break;
        }
        let pid = taus[rng.gen_range(0..taus.len())];
        cur = node_step(&cur, pid, &Action::Tau).expect("enabled step must fire");
        trace.push(pid, Action::Tau);
    }
    (cur, trace)
}

/// Shortest trace from the initial state to `target`, following LTS edges.
pub fn path_to(lts: &Lts, target: StateId) -> Option<Trace> {
    let mut parent: HashMap<StateId, usize> = HashMap::new();
    let mut queue = VecDeque::from([lts.initial()]);
    let mut seen = HashSet::from([lts.initial()]);
    while let Some(s) = queue.pop_front() {
        if s == target {
            let mut steps = Vec::new();
            let mut cur = s;
            while let Some(&e) = parent.get(&cur) {
                let edge = &lts.edges[e];
                steps.push(TraceStep {
                    pid: edge.pid,
                    action: edge.action.clone(),
                });
                cur = edge.from;
            }
            steps.reverse();
            return Some(Trace(steps));
        }
        for &e in &lts.out[s] {
            let to = lts.edges[e].to;
            if seen.insert(to) {
                parent.insert(to, e);
                queue.push_back(to);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Process;
    use crate::syntax::Expr;

    #[test]
    fn empty_trace_is_identity() {
        let n = Node::with_processes([(Pid(1), Process::live(Expr::int(1)))]);
        assert_eq!(run_trace(&n, &Trace::new()), Ok(n));
    }

    #[test]
    fn single_value_process_has_three_states() {
        // Oracle by hand: Term yields Dead([]) (no links), then the pid is freed.
        let n = Node::with_processes([(Pid(1), Process::live(Expr::int(1)))]);
        let lts = explore(&n, &ExplorationConfig::default());
        assert_eq!(lts.len(), 3);
        assert_eq!(lts.edges().len(), 2);
        assert_eq!(lts.state(1), &Node::with_processes([(Pid(1), Process::Dead(vec![]))]));
        assert_eq!(lts.state(2), &Node::default());
        assert!(lts.is_complete());
    }

    #[test]
    fn empty_node_explores_to_one_state() {
        let lts = explore(&Node::default(), &ExplorationConfig::default());
        assert_eq!((lts.len(), lts.edges().len()), (1, 0));
    }

    #[test]
    fn depth_bound_marks_truncation() {
        let n = Node::with_processes([(Pid(1), Process::live(Expr::int(1)))]);
        let lts = explore(&n, &ExplorationConfig::depth(1));
        assert_eq!(lts.len(), 2);
        assert!(lts.is_truncated(1));
        assert!(!lts.is_truncated(0));
    }

    #[test]
    fn state_bound_marks_truncation() {
        let n = Node::with_processes([(Pid(1), Process::live(Expr::int(1)))]);
        let cfg = ExplorationConfig {
            state_bound: 2,
            ..ExplorationConfig::default()
        };
        let lts = explore(&n, &cfg);
        assert_eq!(lts.len(), 2);
        assert!(lts.is_truncated(1));
    }

    #[test]
    fn random_runs_are_seed_deterministic() {
        let n = Node::with_processes([
            (Pid(1), Process::live(Expr::let_in("X", Expr::int(0), Expr::var("X")))),
            (Pid(2), Process::live(Expr::int(3))),
        ]);
        assert_eq!(random_run(&n, 7, 100), random_run(&n, 7, 100));
        let (end, trace) = random_run(&n, 7, 100);
        assert_eq!(run_trace(&n, &trace), Ok(end));
        assert_eq!(random_run(&Node::default(), 1, 10).1, Trace::new());
    }

    #[test]
    fn stale_trace_reports_index() {
        let n = Node::with_processes([(Pid(1), Process::live(Expr::int(1)))]);
        let mut t = Trace::new();
        t.push(Pid(1), Action::Terminate);
        t.push(Pid(1), Action::Tau);
        let err = run_trace(&n, &t).unwrap_err();
        assert_eq!(err.index, 1);
    }
}
