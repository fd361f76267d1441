//! Executable semantics for a concurrent subset of Core Erlang.
//!
//! The semantics has three layers. [`seq`] is a deterministic frame-stack
//! machine for sequential expressions. [`process`] lifts it to processes with
//! mailboxes, links and the `trap_exit` flag, labelled by [`Action`]s. [`node`]
//! composes a process pool with an ether of in-flight signals.
//!
//! On top of the node relation, [`explore`] builds bounded labelled
//! transition systems, replays traces and runs seeded random schedules, and
//! [`equiv`] checks strong and weak bisimulations over them. [`props`] holds
//! executable property suites for the metatheory.

pub mod config;
pub mod corpus;
pub mod equiv;
pub mod error;
pub mod explore;
pub mod gen;
pub mod node;
pub mod process;
pub mod props;
pub mod seq;
pub mod surface;
pub mod syntax;

pub use config::{LtsDoc, NodeConfigDoc};
pub use equiv::{
    check_bisimulation, check_weak_bisimulation, tau_reach, weakly_bisimilar, BisimReport, NodeRelation,
};
pub use error::{ConfigError, ParseError, SyntaxError};
pub use explore::{explore, random_run, run_trace, ExplorationConfig, Lts, ReplayError, Trace, TraceStep};
pub use node::{fresh_pid, node_enabled, node_step, Ether, Node, ProcessPool};
pub use process::{
    exit_decision, local_apply, local_enabled, receive_select, Action, ActionTemplate, ExitOutcome, LiveProcess,
    Mailbox, Process, Signal,
};
pub use seq::{classify_redex, seq_eval, seq_step, DispatchShape, Frame, FrameStack, RedexClass, SeqOutcome};
pub use surface::{parse_expr, parse_pattern, parse_value, print_expr, print_node, print_value};
pub use syntax::{
    atom_to_bool, bool_to_atom, is_match, list_to_meta, match_bind, subst, Atom, Bindings, Expr, FunId, Pattern,
    Pid, Value, Var,
};
