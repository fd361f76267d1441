//! Strong and weak bisimulation checks over explored transition systems.
//!
//! A relation is a set of pairs of state ids: the left component indexes
//! the first LTS, the right one the second. States that were cut off by an
//! exploration bound never yield a positive verdict; checks touching them
//! report [`BisimReport::UnknownAtBound`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::explore::{explore, run_trace, ExplorationConfig, Lts, StateId, Trace};
use crate::node::{node_step, tau_enabled, Node};
use crate::process::Action;
use crate::syntax::Pid;

#[derive(Clone, Default, PartialEq, Eq, Debug, Serialize)]
pub struct NodeRelation {
    pairs: BTreeSet<(StateId, StateId)>,
}

impl NodeRelation {
    pub fn new() -> Self {
        NodeRelation::default()
    }

    pub fn insert(&mut self, l: StateId, r: StateId) -> bool {
        self.pairs.insert((l, r))
    }

    pub fn contains(&self, l: StateId, r: StateId) -> bool {
        self.pairs.contains(&(l, r))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.pairs.iter().copied()
    }

    /// Node equality on a single LTS.
    pub fn identity(lts: &Lts) -> Self {
        (0..lts.len()).map(|i| (i, i)).collect()
    }

    /// `(s, t)` whenever `t` is reachable from `s` by τ steps of any process.
    pub fn tau_star(lts: &Lts) -> Self {
        (0..lts.len())
            .flat_map(|s| lts.tau_closure(s).into_iter().map(move |t| (s, t)))
            .collect()
    }

    /// `(s, t)` whenever replaying `trace` from `s` ends in `t`.
    pub fn by_trace(left: &Lts, right: &Lts, trace: &Trace) -> Self {
        left.states()
            .filter_map(|(s, node)| {
                let end = run_trace(node, trace).ok()?;
                Some((s, right.id_of(&end)?))
            })
            .collect()
    }
}

impl FromIterator<(StateId, StateId)> for NodeRelation {
    fn from_iter<T: IntoIterator<Item = (StateId, StateId)>>(iter: T) -> Self {
        NodeRelation {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// Which side of a pair made the unanswered move.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BisimReport {
    Holds {
        witness: NodeRelation,
    },
    FailsAt {
        pair: (StateId, StateId),
        side: Side,
        pid: Pid,
        action: Action,
        reason: String,
    },
    UnknownAtBound {
        pairs: Vec<(StateId, StateId)>,
    },
}

impl BisimReport {
    pub fn holds(&self) -> bool {
        matches!(self, BisimReport::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, BisimReport::FailsAt { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, BisimReport::UnknownAtBound { .. })
    }
}

impl fmt::Display for BisimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BisimReport::Holds { witness } => write!(f, "holds (witness of {} pairs)", witness.len()),
            BisimReport::FailsAt {
                pair,
                side,
                pid,
                action,
                reason,
            } => write!(
                f,
                "fails at ({}, {}): {side:?} move {pid}: {action} {reason}",
                pair.0, pair.1
            ),
            BisimReport::UnknownAtBound { pairs } => {
                write!(f, "unknown: {} pairs touch exploration bounds", pairs.len())
            }
        }
    }
}

/// Pair check outcome for one direction.
enum PairCheck {
    Ok,
    Unknown,
    Fail(Pid, Action, String),
}

/// Strong bisimulation: each move must be answered by the same labelled
/// move with successors related.
pub fn check_bisimulation(r: &NodeRelation, left: &Lts, right: &Lts) -> BisimReport {
    let mut unknown = Vec::new();
    for (s, t) in r.iter() {
        if left.is_truncated(s) || right.is_truncated(t) {
            unknown.push((s, t));
            continue;
        }
        for (side, from, other, a, b) in [(Side::Left, s, t, left, right), (Side::Right, t, s, right, left)] {
            for e in a.out_edges(from) {
                let answered = b.out_edges(other).any(|f| {
                    f.pid == e.pid && f.action == e.action && {
                        let (l, r2) = if side == Side::Left { (e.to, f.to) } else { (f.to, e.to) };
                        r.contains(l, r2)
                    }
                });
                if !answered {
                    let reason = if b.out_edges(other).any(|f| f.pid == e.pid && f.action == e.action) {
                        "is answered only outside the relation"
                    } else {
                        "has no answer"
                    };
                    return BisimReport::FailsAt {
                        pair: (s, t),
                        side,
                        pid: e.pid,
                        action: e.action.clone(),
                        reason: reason.to_string(),
                    };
                }
            }
        }
    }
    if unknown.is_empty() {
        BisimReport::Holds { witness: r.clone() }
    } else {
        BisimReport::UnknownAtBound { pairs: unknown }
    }
}

/// For every state, the states reachable by `τ* (ι, a) τ*` grouped by the
/// visible label, and whether the search met a truncated state.
struct WeakMoves {
    moves: Vec<HashMap<(Pid, Action), HashSet<StateId>>>,
    incomplete: Vec<bool>,
}

impl WeakMoves {
    fn of(lts: &Lts) -> Self {
        let closures: Vec<Vec<StateId>> = (0..lts.len()).map(|s| lts.tau_closure(s)).collect();
        let mut moves = Vec::with_capacity(lts.len());
        let mut incomplete = Vec::with_capacity(lts.len());
        for s in 0..lts.len() {
            let mut m: HashMap<(Pid, Action), HashSet<StateId>> = HashMap::new();
            let mut cut = false;
            for &u in &closures[s] {
                cut |= lts.is_truncated(u);
                for e in lts.out_edges(u).filter(|e| !e.action.is_tau()) {
                    let targets = m.entry((e.pid, e.action.clone())).or_default();
                    for &w in &closures[e.to] {
                        cut |= lts.is_truncated(w);
                        targets.insert(w);
                    }
                }
            }
            moves.push(m);
            incomplete.push(cut);
        }
        WeakMoves { moves, incomplete }
    }
}

fn weak_pair_check(
    s: StateId,
    t: StateId,
    left: &Lts,
    right: &Lts,
    wl: &WeakMoves,
    wr: &WeakMoves,
    related: &dyn Fn(StateId, StateId) -> bool,
) -> (PairCheck, Side) {
    if left.is_truncated(s) || right.is_truncated(t) {
        return (PairCheck::Unknown, Side::Left);
    }
    let mut unknown = false;
    for (side, from, other, a, wb) in [(Side::Left, s, t, left, wr), (Side::Right, t, s, right, wl)] {
        for e in a.out_edges(from).filter(|e| !e.action.is_tau()) {
            let answers = wb.moves[other].get(&(e.pid, e.action.clone()));
            let answered = answers.is_some_and(|ws| {
                ws.iter().any(|&w| match side {
                    Side::Left => related(e.to, w),
                    Side::Right => related(w, e.to),
                })
            });
            if answered {
                continue;
            }
            if wb.incomplete[other] {
                unknown = true;
                continue;
            }
            let reason = if answers.is_some() {
                "is answered only outside the relation"
            } else {
                "has no weak answer"
            };
            return (PairCheck::Fail(e.pid, e.action.clone(), reason.to_string()), side);
        }
    }
    if unknown {
        (PairCheck::Unknown, Side::Left)
    } else {
        (PairCheck::Ok, Side::Left)
    }
}

/// Weak bisimulation: only visible moves need answers, by `τ* a τ*`.
pub fn check_weak_bisimulation(r: &NodeRelation, left: &Lts, right: &Lts) -> BisimReport {
    let wl = WeakMoves::of(left);
    let wr = WeakMoves::of(right);
    let related = |a, b| r.contains(a, b);
    let mut unknown = Vec::new();
    for (s, t) in r.iter() {
        match weak_pair_check(s, t, left, right, &wl, &wr, &related) {
            (PairCheck::Ok, _) => {}
            (PairCheck::Unknown, _) => unknown.push((s, t)),
            (PairCheck::Fail(pid, action, reason), side) => {
                return BisimReport::FailsAt {
                    pair: (s, t),
                    side,
                    pid,
                    action,
                    reason,
                }
            }
        }
    }
    if unknown.is_empty() {
        BisimReport::Holds { witness: r.clone() }
    } else {
        BisimReport::UnknownAtBound { pairs: unknown }
    }
}

/// Nodes reachable by at most `bound` τ steps of any process.
pub fn tau_reach(start: &Node, bound: usize) -> HashSet<Node> {
    let mut seen = HashSet::from([start.clone()]);
    let mut layer = vec![start.clone()];
    for _ in 0..bound {
        let mut next = Vec::new();
        for n in &layer {
            for pid in tau_enabled(n) {
                let m = node_step(n, pid, &Action::Tau).expect("enabled τ step fires");
                if seen.insert(m.clone()) {
                    next.push(m);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    seen
}

/// Why a pair left the relation: the side that moved, the move, and a reason.
type Refutation = (Side, Pid, Action, String);

type Pair = (StateId, StateId);

/// Greatest weak bisimulation over the explored product, computed twice:
/// optimistically (truncated states and incomplete searches never fail) to
/// establish failures, and pessimistically (they never hold) to establish a
/// witness.
fn greatest_weak_bisimulation(
    left: &Lts,
    right: &Lts,
    optimistic: bool,
) -> (HashSet<Pair>, HashMap<Pair, Refutation>) {
    let wl = WeakMoves::of(left);
    let wr = WeakMoves::of(right);
    let mut rel: HashSet<(StateId, StateId)> = HashSet::new();
    for s in 0..left.len() {
        for t in 0..right.len() {
            let cut = left.is_truncated(s) || right.is_truncated(t);
            if optimistic || !cut {
                rel.insert((s, t));
            }
        }
    }
    let mut removed = HashMap::new();
    loop {
        let mut drop = Vec::new();
        {
            let related = |a: StateId, b: StateId| rel.contains(&(a, b));
            for &(s, t) in &rel {
                if optimistic && (left.is_truncated(s) || right.is_truncated(t)) {
                    continue;
                }
                match weak_pair_check(s, t, left, right, &wl, &wr, &related) {
                    (PairCheck::Ok, _) => {}
                    (PairCheck::Unknown, _) if optimistic => {}
                    (PairCheck::Unknown, _) => drop.push(((s, t), None)),
                    (PairCheck::Fail(pid, action, reason), side) => {
                        drop.push(((s, t), Some((side, pid, action, reason))))
                    }
                }
            }
        }
        if drop.is_empty() {
            break;
        }
        for (pair, why) in drop {
            rel.remove(&pair);
            if let Some(why) = why {
                removed.insert(pair, why);
            }
        }
    }
    (rel, removed)
}

/// Decides whether two nodes are weakly bisimilar within the exploration
/// bounds of `cfg`.
pub fn weakly_bisimilar(a: &Node, b: &Node, cfg: &ExplorationConfig) -> BisimReport {
    let full = ExplorationConfig { tau_only: false, ..*cfg };
    let left = explore(a, &full);
    let right = explore(b, &full);
    weakly_bisimilar_lts(&left, &right)
}

/// As [`weakly_bisimilar`], on already explored systems (initial states 0).
pub fn weakly_bisimilar_lts(left: &Lts, right: &Lts) -> BisimReport {
    let init = (left.initial(), right.initial());
    let (opt, why) = greatest_weak_bisimulation(left, right, true);
    if !opt.contains(&init) {
        let (side, pid, action, reason) = why
            .get(&init)
            .cloned()
            .expect("removed pairs record a failing move");
        return BisimReport::FailsAt {
            pair: init,
            side,
            pid,
            action,
            reason,
        };
    }
    let (pess, _) = greatest_weak_bisimulation(left, right, false);
    if pess.contains(&init) {
        return BisimReport::Holds {
            witness: pess.into_iter().collect(),
        };
    }
    let mut touching: Vec<(StateId, StateId)> = opt
        .into_iter()
        .filter(|&(s, t)| left.is_truncated(s) || right.is_truncated(t))
        .collect();
    touching.sort_unstable();
    BisimReport::UnknownAtBound { pairs: touching }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{Process, Signal};
    use crate::syntax::{Expr, Value};

    fn single(e: Expr) -> Node {
        Node::with_processes([(Pid(1), Process::live(e))])
    }

    fn full(n: &Node) -> Lts {
        explore(n, &ExplorationConfig::default())
    }

    #[test]
    fn identity_is_a_bisimulation() {
        let lts = full(&single(Expr::let_in("X", Expr::int(0), Expr::var("X"))));
        assert!(check_bisimulation(&NodeRelation::identity(&lts), &lts, &lts).holds());
    }

    #[test]
    fn stuck_side_fails() {
        let live = full(&single(Expr::let_in("X", Expr::int(0), Expr::var("X"))));
        let empty = full(&Node::default());
        let r: NodeRelation = [(0, 0)].into_iter().collect();
        let report = check_bisimulation(&r, &live, &empty);
        assert!(matches!(
            report,
            BisimReport::FailsAt { side: Side::Left, action: Action::Tau, .. }
        ));
    }

    #[test]
    fn one_tau_step_pair_fails_strongly() {
        // Oracle by hand: state 0 steps by τ to state 1, which must answer with
        // a τ into a pair of the relation; only (0, 1) is related.
        let lts = full(&single(Expr::let_in("X", Expr::int(0), Expr::var("X"))));
        let s1 = lts.out_edges(0).next().unwrap().to;
        let r: NodeRelation = [(0, s1)].into_iter().collect();
        assert!(check_bisimulation(&r, &lts, &lts).fails());
        assert!(check_weak_bisimulation(&NodeRelation::tau_star(&lts), &lts, &lts).holds());
    }

    #[test]
    fn truncation_is_never_a_positive_verdict() {
        let n = single(Expr::let_in("X", Expr::int(0), Expr::var("X")));
        let lts = explore(&n, &ExplorationConfig::depth(1));
        assert!(check_bisimulation(&NodeRelation::identity(&lts), &lts, &lts).is_unknown());
        // A pending arrival is visible at the initial state but leads past the
        // bound.
        let mut m = n.clone();
        m.ether.push(Pid(2), Pid(1), Signal::message(Value::atom("m")));
        assert!(weakly_bisimilar(&m, &m, &ExplorationConfig::depth(1)).is_unknown());
        assert!(weakly_bisimilar(&m, &m, &ExplorationConfig::default()).holds());
    }

    #[test]
    fn tau_reach_examples() {
        let v = single(Expr::int(5));
        assert_eq!(tau_reach(&v, 10), HashSet::from([v.clone()]));
        let l = single(Expr::let_in("X", Expr::int(0), Expr::var("X")));
        assert_eq!(tau_reach(&l, 0).len(), 1);
        assert!(tau_reach(&l, 10).contains(&single(Expr::int(0))));
    }

    #[test]
    fn reflexivity_and_sequential_equivalence() {
        let l = single(Expr::let_in("X", Expr::int(0), Expr::var("X")));
        let cfg = ExplorationConfig::default();
        assert!(weakly_bisimilar(&l, &l, &cfg).holds());
        assert!(weakly_bisimilar(&l, &single(Expr::int(0)), &cfg).holds());
        assert!(weakly_bisimilar(&l, &single(Expr::int(1)), &cfg).holds());
    }

    #[test]
    fn extra_send_is_unanswerable() {
        // Oracle by hand: the left node must emit a 'fst' message the right one
        // never emits.
        let send = |v: &str| Expr::bif("!", vec![Expr::Val(Value::pid(2)), Expr::atom(v)]);
        let both = Node::with_processes([
            (Pid(1), Process::live(Expr::let_in("X", send("fst"), send("snd")))),
            (Pid(2), Process::live(Expr::receive(vec![(crate::syntax::Pattern::var("X"), Expr::var("X"))]).unwrap())),
        ]);
        let only = Node::with_processes([
            (Pid(1), Process::live(send("snd"))),
            (Pid(2), Process::live(Expr::receive(vec![(crate::syntax::Pattern::var("X"), Expr::var("X"))]).unwrap())),
        ]);
        // The initial states only have τ moves, so they are trivially related;
        // compare the first states where a send is enabled instead.
        let visible = |lts: &Lts| {
            let mut s = lts.initial();
            while lts.out_edges(s).all(|e| e.action.is_tau()) {
                s = lts.out_edges(s).next().expect("reaches a send").to;
            }
            s
        };
        let (l, r) = (full(&both), full(&only));
        let pair: NodeRelation = [(visible(&l), visible(&r))].into_iter().collect();
        match check_weak_bisimulation(&pair, &l, &r) {
            BisimReport::FailsAt { side, action, .. } => {
                assert_eq!(side, Side::Left);
                assert_eq!(
                    action,
                    Action::Send {
                        src: Pid(1),
                        dst: Pid(2),
                        signal: Signal::message(Value::atom("fst"))
                    }
                );
            }
            other => panic!("unexpected {other}"),
        }
    }
}
