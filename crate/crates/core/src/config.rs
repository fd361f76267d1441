//! JSON documents: node configurations, node renderings and LTS exports.
//!
//! Values inside configuration documents are written in the concrete
//! syntax, e.g. `"['EXIT', #1, 'kill']"`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ParseError};
use crate::explore::{Edge, Lts, StateId};
use crate::node::{Ether, Node, ProcessPool};
use crate::process::{LiveProcess, Mailbox, Process, Signal};
use crate::surface::{parse_expr, parse_value, print_expr, print_frame, print_value};
use crate::syntax::{Pid, Value};

/// A declarative initial node.
#[derive(Clone, Default, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfigDoc {
    #[serde(default)]
    pub processes: Vec<ProcessDoc>,
    #[serde(default)]
    pub ether: Vec<EtherDoc>,
}

#[derive(Clone, Default, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessDoc {
    pub pid: u64,
    /// Program of a live process.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    /// Link obligations of a terminated process: `[pid, reason]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dead: Option<Vec<(u64, String)>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mailbox: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trap: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtherDoc {
    pub src: u64,
    pub dst: u64,
    pub signals: Vec<SignalDoc>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalDoc {
    Message { value: String },
    Exit { reason: String, link: bool },
    Link,
    Unlink,
}

impl SignalDoc {
    fn to_signal(&self) -> Result<Signal, ParseError> {
        Ok(match self {
            SignalDoc::Message { value } => Signal::message(parse_value(value)?),
            SignalDoc::Exit { reason, link } => Signal::exit(parse_value(reason)?, *link),
            SignalDoc::Link => Signal::Link,
            SignalDoc::Unlink => Signal::Unlink,
        })
    }

    fn from_signal(s: &Signal) -> Self {
        match s {
            Signal::Message { value } => SignalDoc::Message {
                value: print_value(value),
            },
            Signal::Exit { reason, link } => SignalDoc::Exit {
                reason: print_value(reason),
                link: *link,
            },
            Signal::Link => SignalDoc::Link,
            Signal::Unlink => SignalDoc::Unlink,
        }
    }
}

impl NodeConfigDoc {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config documents serialize")
    }

    /// Builds the node, checking pids and parsing every embedded term.
    pub fn to_node(&self) -> Result<Node, ConfigError> {
        let mut pool = ProcessPool::new();
        for p in &self.processes {
            if pool.contains(Pid(p.pid)) {
                return Err(ConfigError::DuplicatePid(p.pid));
            }
            let wrap = |source| ConfigError::Parse { pid: p.pid, source };
            let process = match (&p.expr, &p.dead) {
                (Some(src), None) => {
                    let mut live = LiveProcess::new(parse_expr(src).map_err(wrap)?);
                    let mailbox = p
                        .mailbox
                        .iter()
                        .map(|m| parse_value(m))
                        .collect::<Result<Vec<Value>, _>>()
                        .map_err(wrap)?;
                    live.mailbox = Mailbox::from(mailbox);
                    live.links = p.links.iter().map(|&l| Pid(l)).collect();
                    live.trap = p.trap;
                    Process::Live(live)
                }
                (None, Some(obligations)) => Process::Dead(
                    obligations
                        .iter()
                        .map(|(to, r)| Ok((Pid(*to), parse_value(r)?)))
                        .collect::<Result<Vec<_>, ParseError>>()
                        .map_err(wrap)?,
                ),
                _ => return Err(ConfigError::MissingBody(p.pid)),
            };
            pool.insert(Pid(p.pid), process);
        }
        let mut ether = Ether::new();
        for e in &self.ether {
            for s in &e.signals {
                let signal = s.to_signal().map_err(|source| ConfigError::EtherValue {
                    src: e.src,
                    dst: e.dst,
                    source,
                })?;
                ether.push(Pid(e.src), Pid(e.dst), signal);
            }
        }
        Ok(Node::new(ether, pool))
    }

    /// The document describing `n`, when every live process has an empty
    /// frame stack.
    pub fn from_node(n: &Node) -> Option<Self> {
        let mut processes = Vec::new();
        for (pid, p) in n.pool.iter() {
            processes.push(match p {
                Process::Live(l) => {
                    if !l.stack.is_empty() {
                        return None;
                    }
                    ProcessDoc {
                        pid: pid.0,
                        expr: Some(print_expr(&l.redex)),
                        dead: None,
                        mailbox: l.mailbox.iter().map(print_value).collect(),
                        links: l.links.iter().map(|p| p.0).collect(),
                        trap: l.trap,
                    }
                }
                Process::Dead(obl) => ProcessDoc {
                    pid: pid.0,
                    dead: Some(obl.iter().map(|(p, r)| (p.0, print_value(r))).collect()),
                    ..ProcessDoc::default()
                },
            });
        }
        let ether = n
            .ether
            .edges()
            .map(|(src, dst, q)| EtherDoc {
                src: src.0,
                dst: dst.0,
                signals: q.iter().map(SignalDoc::from_signal).collect(),
            })
            .collect();
        Some(NodeConfigDoc { processes, ether })
    }
}

/// Human-oriented JSON view of a node: terms are rendered as text.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NodeView {
    pub ether: Vec<EtherDoc>,
    pub processes: Vec<ProcessView>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProcessView {
    Live {
        pid: u64,
        /// Frames, top first.
        stack: Vec<String>,
        redex: String,
        mailbox: Vec<String>,
        links: Vec<u64>,
        trap: bool,
    },
    Dead {
        pid: u64,
        obligations: Vec<(u64, String)>,
    },
}

impl NodeView {
    pub fn of(n: &Node) -> Self {
        let processes = n
            .pool
            .iter()
            .map(|(pid, p)| match p {
                Process::Live(l) => ProcessView::Live {
                    pid: pid.0,
                    stack: l.stack.iter_top_first().map(print_frame).collect(),
                    redex: print_expr(&l.redex),
                    mailbox: l.mailbox.iter().map(print_value).collect(),
                    links: l.links.iter().map(|p| p.0).collect(),
                    trap: l.trap,
                },
                Process::Dead(obl) => ProcessView::Dead {
                    pid: pid.0,
                    obligations: obl.iter().map(|(p, r)| (p.0, print_value(r))).collect(),
                },
            })
            .collect();
        let ether = n
            .ether
            .edges()
            .map(|(src, dst, q)| EtherDoc {
                src: src.0,
                dst: dst.0,
                signals: q.iter().map(SignalDoc::from_signal).collect(),
            })
            .collect();
        NodeView { ether, processes }
    }
}

/// LTS export: `{states: [{id, node}], edges: [{from, pid, action, to}], truncated: [ids]}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LtsDoc {
    pub states: Vec<LtsStateDoc>,
    pub edges: Vec<Edge>,
    pub truncated: Vec<StateId>,
    /// Witness relations exported alongside, as pairs of state ids.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relation: Vec<(StateId, StateId)>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LtsStateDoc {
    pub id: StateId,
    pub node: Node,
}

impl LtsDoc {
    pub fn of(lts: &Lts) -> Self {
        LtsDoc {
            states: lts
                .states()
                .map(|(id, node)| LtsStateDoc { id, node: node.clone() })
                .collect(),
            edges: lts.edges().to_vec(),
            truncated: lts.truncated().collect(),
            relation: Vec::new(),
        }
    }

    pub fn with_relation(mut self, pairs: impl IntoIterator<Item = (StateId, StateId)>) -> Self {
        self.relation = pairs.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        self
    }
}
