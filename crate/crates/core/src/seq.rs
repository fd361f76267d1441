//! Sequential frame-stack semantics.
//!
//! A configuration is a frame stack together with the expression under
//! reduction. Rules fall into three groups: push rules move the first
//! redex out of a construct and leave a frame behind, shift rules fill the
//! hole of the top frame and pick the next sub-expression from it, and pop
//! rules consume the top frame once its hole holds a value.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::syntax::{
    match_bind, subst, Atom, Bindings, Expr, FunId, FunValue, Pattern, Value, Var,
};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// `call □(e1, ..., ek)`
    CallFun(Vec<Expr>),
    /// `call v(v1, ..., □, ..., ek)`
    CallArgs {
        fun: Value,
        done: Vec<Value>,
        todo: Vec<Expr>,
    },
    /// `apply □(e1, ..., ek)`
    ApplyFun(Vec<Expr>),
    /// `apply v(v1, ..., □, ..., ek)`
    ApplyArgs {
        fun: Value,
        done: Vec<Value>,
        todo: Vec<Expr>,
    },
    /// `let x = □ in e`
    Let { var: Var, body: Expr },
    /// `case □ of p then e1 else e2 end`
    Case {
        pat: Pattern,
        then_branch: Expr,
        else_branch: Expr,
    },
    /// `[e | □]`: the tail is evaluated first.
    ConsTail(Expr),
    /// `[□ | v]`
    ConsHead(Value),
}

/// Continuation of a sequential computation; the last element is the top.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrameStack(Vec<Frame>);

impl FrameStack {
    pub fn new() -> Self {
        FrameStack(Vec::new())
    }

    /// Builds a stack from frames listed top first.
    pub fn from_top_first(frames: impl IntoIterator<Item = Frame, IntoIter: DoubleEndedIterator>) -> Self {
        FrameStack(frames.into_iter().rev().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn top(&self) -> Option<&Frame> {
        self.0.last()
    }

    pub fn push(&mut self, f: Frame) {
        self.0.push(f);
    }

    pub fn pop(&mut self) -> Option<Frame> {
        self.0.pop()
    }

    /// Frames from top to bottom.
    pub fn iter_top_first(&self) -> impl Iterator<Item = &Frame> {
        self.0.iter().rev()
    }
}

impl fmt::Debug for FrameStack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_stack(self))
    }
}

/// Which rule of the sequential relation fired.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SeqRule {
    PushLet,
    PushCons,
    PushApply,
    PushCall,
    PushCase,
    Letrec,
    ShiftApplyFun,
    ShiftCallFun,
    ShiftApplyArg,
    ShiftCallArg,
    ShiftCons,
    PopApply,
    PopPlus,
    PopLet,
    PopCons,
    PopCaseMatch,
    PopCaseElse,
}

impl SeqRule {
    pub fn is_push(self) -> bool {
        matches!(
            self,
            SeqRule::PushLet | SeqRule::PushCons | SeqRule::PushApply | SeqRule::PushCall | SeqRule::PushCase
        )
    }

    pub fn is_pop(self) -> bool {
        matches!(
            self,
            SeqRule::PopApply
                | SeqRule::PopPlus
                | SeqRule::PopLet
                | SeqRule::PopCons
                | SeqRule::PopCaseMatch
                | SeqRule::PopCaseElse
        )
    }
}

/// The completed frame configurations the process layer dispatches on.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum DispatchShape {
    Send { target: crate::syntax::Pid, payload: Value },
    Exit2 { target: crate::syntax::Pid, reason: Value },
    Exit1 { reason: Value },
    Link { target: crate::syntax::Pid },
    Unlink { target: crate::syntax::Pid },
    SelfPid,
    Spawn { fun: Arc<FunValue>, args: Value },
    Flag { trap: bool },
}

impl DispatchShape {
    pub fn bif(&self) -> &'static str {
        match self {
            DispatchShape::Send { .. } => "!",
            DispatchShape::Exit2 { .. } | DispatchShape::Exit1 { .. } => "exit",
            DispatchShape::Link { .. } => "link",
            DispatchShape::Unlink { .. } => "unlink",
            DispatchShape::SelfPid => "self",
            DispatchShape::Spawn { .. } => "spawn",
            DispatchShape::Flag { .. } => "process_flag",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum StuckReason {
    FreeVariable(String),
    UnboundFunction(FunId),
    ApplyNonFunction(Value),
    ArityMismatch { expected: usize, got: usize },
    BadArithmetic,
    UnknownBif { callee: Value, arity: usize },
    NonPidTarget(&'static str),
    BadSpawn,
    BadFlag,
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckReason::FreeVariable(x) => write!(f, "free variable {x}"),
            StuckReason::UnboundFunction(id) => write!(f, "unbound function {id:?}"),
            StuckReason::ApplyNonFunction(v) => write!(f, "apply of non-function {v}"),
            StuckReason::ArityMismatch { expected, got } => {
                write!(f, "arity mismatch: expected {expected}, got {got}")
            }
            StuckReason::BadArithmetic => f.write_str("'+' on non-integers"),
            StuckReason::UnknownBif { callee, arity } => write!(f, "unknown BIF {callee}/{arity}"),
            StuckReason::NonPidTarget(bif) => write!(f, "'{bif}' with non-pid target"),
            StuckReason::BadSpawn => f.write_str("'spawn' of a non-function"),
            StuckReason::BadFlag => f.write_str("invalid 'process_flag' arguments"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum RedexClass {
    Tau,
    FinalValue(Value),
    ReceiveExp,
    ConcDispatch(DispatchShape),
    Stuck(StuckReason),
}

/// One sequential step, or `None` when no rule applies.
pub fn seq_step(stack: &FrameStack, redex: &Expr) -> Option<(FrameStack, Expr)> {
    step_tagged(stack.clone(), redex.clone())
        .ok()
        .map(|(k, e, _)| (k, e))
}

/// One sequential step on owned inputs, reporting the rule. On failure the
/// configuration is handed back unchanged.
pub fn step_tagged(
    mut stack: FrameStack,
    redex: Expr,
) -> Result<(FrameStack, Expr, SeqRule), (FrameStack, Expr)> {
    let next = match &redex {
        Expr::Let { var, bound, body } => {
            stack.push(Frame::Let {
                var: var.clone(),
                body: (**body).clone(),
            });
            ((**bound).clone(), SeqRule::PushLet)
        }
        Expr::Cons(head, tail) => {
            stack.push(Frame::ConsTail((**head).clone()));
            ((**tail).clone(), SeqRule::PushCons)
        }
        Expr::Apply { fun, args } => {
            stack.push(Frame::ApplyFun(args.to_vec()));
            ((**fun).clone(), SeqRule::PushApply)
        }
        Expr::Call { fun, args } => {
            stack.push(Frame::CallFun(args.to_vec()));
            ((**fun).clone(), SeqRule::PushCall)
        }
        Expr::Case {
            scrutinee,
            pat,
            then_branch,
            else_branch,
        } => {
            stack.push(Frame::Case {
                pat: pat.clone(),
                then_branch: (**then_branch).clone(),
                else_branch: (**else_branch).clone(),
            });
            ((**scrutinee).clone(), SeqRule::PushCase)
        }
        Expr::Letrec {
            id,
            params,
            body,
            cont,
        } => {
            let f = Value::fun(id.clone(), params.clone(), (**body).clone());
            let mut b = Bindings::new();
            b.bind_fun(id.clone(), f);
            (subst(cont, &b), SeqRule::Letrec)
        }
        Expr::Val(v) => match value_step(&mut stack, v) {
            Some(next) => next,
            None => return Err((stack, redex)),
        },
        Expr::Var(_) | Expr::FunRef(_) | Expr::Receive(_) => return Err((stack, redex)),
    };
    Ok((stack, next.0, next.1))
}

/// Shift and pop rules. Only touches `stack` when a rule applies.
fn value_step(stack: &mut FrameStack, v: &Value) -> Option<(Expr, SeqRule)> {
    let top = stack.top()?;
    match top {
        Frame::ApplyFun(args) => {
            if args.is_empty() {
                let body = beta(v, &[])?;
                stack.pop();
                Some((body, SeqRule::PopApply))
            } else {
                let first = args[0].clone();
                let todo = args[1..].to_vec();
                replace_top(
                    stack,
                    Frame::ApplyArgs {
                        fun: v.clone(),
                        done: Vec::new(),
                        todo,
                    },
                );
                Some((first, SeqRule::ShiftApplyFun))
            }
        }
        Frame::CallFun(args) => {
            // zero-argument calls are dispatch points for the process layer
            let first = args.first()?.clone();
            let todo = args[1..].to_vec();
            replace_top(
                stack,
                Frame::CallArgs {
                    fun: v.clone(),
                    done: Vec::new(),
                    todo,
                },
            );
            Some((first, SeqRule::ShiftCallFun))
        }
        Frame::ApplyArgs { fun, done, todo } => {
            if let Some(next) = todo.first() {
                let next = next.clone();
                let mut done = done.clone();
                done.push(v.clone());
                let frame = Frame::ApplyArgs {
                    fun: fun.clone(),
                    done,
                    todo: todo[1..].to_vec(),
                };
                replace_top(stack, frame);
                Some((next, SeqRule::ShiftApplyArg))
            } else {
                let mut args = done.clone();
                args.push(v.clone());
                let body = beta(fun, &args)?;
                stack.pop();
                Some((body, SeqRule::PopApply))
            }
        }
        Frame::CallArgs { fun, done, todo } => {
            if let Some(next) = todo.first() {
                let next = next.clone();
                let mut done = done.clone();
                done.push(v.clone());
                let frame = Frame::CallArgs {
                    fun: fun.clone(),
                    done,
                    todo: todo[1..].to_vec(),
                };
                replace_top(stack, frame);
                Some((next, SeqRule::ShiftCallArg))
            } else {
                let result = sequential_bif(fun, done, v)?;
                stack.pop();
                Some((Expr::Val(result), SeqRule::PopPlus))
            }
        }
        Frame::Let { var, body } => {
            let b = Bindings::new().with_var(var.name(), v.clone());
            let next = subst(body, &b);
            stack.pop();
            Some((next, SeqRule::PopLet))
        }
        Frame::Case {
            pat,
            then_branch,
            else_branch,
        } => {
            let next = match match_bind(pat, v) {
                Some(b) => (subst(then_branch, &b), SeqRule::PopCaseMatch),
                None => (else_branch.clone(), SeqRule::PopCaseElse),
            };
            stack.pop();
            Some(next)
        }
        Frame::ConsTail(head) => {
            let head = head.clone();
            replace_top(stack, Frame::ConsHead(v.clone()));
            Some((head, SeqRule::ShiftCons))
        }
        Frame::ConsHead(tail) => {
            let list = Value::cons(v.clone(), tail.clone());
            stack.pop();
            Some((Expr::Val(list), SeqRule::PopCons))
        }
    }
}

fn replace_top(stack: &mut FrameStack, f: Frame) {
    stack.pop();
    stack.push(f);
}

/// `e[f/k ↦ fun, x1 ↦ v1, ..., xk ↦ vk]` for a function value of matching arity.
fn beta(fun: &Value, args: &[Value]) -> Option<Expr> {
    let Value::Fun(f) = fun else { return None };
    if f.params.len() != args.len() || f.id.arity != args.len() {
        return None;
    }
    let mut b = Bindings::new();
    b.bind_fun(f.id.clone(), fun.clone());
    for (x, v) in f.params.iter().zip(args) {
        b.bind_var(x.clone(), v.clone());
    }
    Some(subst(&f.body, &b))
}

/// The only sequential BIF is integer addition.
fn sequential_bif(fun: &Value, done: &[Value], last: &Value) -> Option<Value> {
    if !fun.is_atom("+") {
        return None;
    }
    match (done, last) {
        ([Value::Int(a)], Value::Int(b)) => Some(Value::Int(a + b)),
        _ => None,
    }
}

/// Classifies a configuration; exactly one class holds.
pub fn classify_redex(stack: &FrameStack, redex: &Expr) -> RedexClass {
    if seq_step(stack, redex).is_some() {
        return RedexClass::Tau;
    }
    let v = match redex {
        Expr::Receive(_) => return RedexClass::ReceiveExp,
        Expr::Var(x) => return RedexClass::Stuck(StuckReason::FreeVariable(x.name().to_string())),
        Expr::FunRef(id) => return RedexClass::Stuck(StuckReason::UnboundFunction(id.clone())),
        Expr::Val(v) => v,
        // every other expression form has a push rule
        _ => unreachable!("non-value expressions always step"),
    };
    let Some(top) = stack.top() else {
        return RedexClass::FinalValue(v.clone());
    };
    match classify_value_in(top, v) {
        Ok(shape) => RedexClass::ConcDispatch(shape),
        Err(reason) => RedexClass::Stuck(reason),
    }
}

fn classify_value_in(top: &Frame, v: &Value) -> Result<DispatchShape, StuckReason> {
    match top {
        Frame::CallFun(args) if args.is_empty() => {
            if v.is_atom("self") {
                Ok(DispatchShape::SelfPid)
            } else {
                Err(StuckReason::UnknownBif {
                    callee: v.clone(),
                    arity: 0,
                })
            }
        }
        Frame::CallArgs { fun, done, todo } if todo.is_empty() => {
            let name = fun.as_atom().map(Atom::name);
            match (name, done.as_slice()) {
                (Some("!"), [target]) => match target.as_pid() {
                    Some(target) => Ok(DispatchShape::Send {
                        target,
                        payload: v.clone(),
                    }),
                    None => Err(StuckReason::NonPidTarget("!")),
                },
                (Some("exit"), [target]) => match target.as_pid() {
                    Some(target) => Ok(DispatchShape::Exit2 {
                        target,
                        reason: v.clone(),
                    }),
                    None => Err(StuckReason::NonPidTarget("exit")),
                },
                (Some("exit"), []) => Ok(DispatchShape::Exit1 { reason: v.clone() }),
                (Some("link"), []) => match v.as_pid() {
                    Some(target) => Ok(DispatchShape::Link { target }),
                    None => Err(StuckReason::NonPidTarget("link")),
                },
                (Some("unlink"), []) => match v.as_pid() {
                    Some(target) => Ok(DispatchShape::Unlink { target }),
                    None => Err(StuckReason::NonPidTarget("unlink")),
                },
                (Some("spawn"), [Value::Fun(f)]) => Ok(DispatchShape::Spawn {
                    fun: f.clone(),
                    args: v.clone(),
                }),
                (Some("spawn"), [_]) => Err(StuckReason::BadSpawn),
                (Some("process_flag"), [flag]) if flag.is_atom("trap_exit") => {
                    match crate::syntax::atom_to_bool(v) {
                        Some(trap) => Ok(DispatchShape::Flag { trap }),
                        None => Err(StuckReason::BadFlag),
                    }
                }
                (Some("process_flag"), [_]) => Err(StuckReason::BadFlag),
                (Some("+"), [_]) => Err(StuckReason::BadArithmetic),
                _ => Err(StuckReason::UnknownBif {
                    callee: fun.clone(),
                    arity: done.len() + 1,
                }),
            }
        }
        Frame::ApplyFun(args) if args.is_empty() => Err(apply_failure(v, 0)),
        Frame::ApplyArgs { fun, done, todo } if todo.is_empty() => Err(apply_failure(fun, done.len() + 1)),
        _ => unreachable!("shift and pop rules cover every other frame"),
    }
}

fn apply_failure(fun: &Value, got: usize) -> StuckReason {
    match fun {
        Value::Fun(f) => StuckReason::ArityMismatch {
            expected: f.params.len(),
            got,
        },
        other => StuckReason::ApplyNonFunction(other.clone()),
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SeqOutcome {
    Finished(Value),
    Suspended {
        stack: FrameStack,
        redex: Expr,
        class: RedexClass,
    },
    OutOfFuel { stack: FrameStack, redex: Expr },
}

/// Iterates sequential steps until none applies or `fuel` steps were taken.
pub fn seq_eval(stack: FrameStack, redex: Expr, fuel: u64) -> SeqOutcome {
    seq_eval_logged(stack, redex, fuel, |_| {})
}

/// `seq_eval` reporting every rule that fired.
pub fn seq_eval_logged(
    mut stack: FrameStack,
    mut redex: Expr,
    fuel: u64,
    mut log: impl FnMut(SeqRule),
) -> SeqOutcome {
    for _ in 0..fuel {
        match step_tagged(stack, redex) {
            Ok((k, e, rule)) => {
                log(rule);
                stack = k;
                redex = e;
            }
            Err((k, e)) => return stop(k, e),
        }
    }
    if seq_step(&stack, &redex).is_some() {
        SeqOutcome::OutOfFuel { stack, redex }
    } else {
        stop(stack, redex)
    }
}

fn stop(stack: FrameStack, redex: Expr) -> SeqOutcome {
    match classify_redex(&stack, &redex) {
        RedexClass::FinalValue(v) => SeqOutcome::Finished(v),
        class => SeqOutcome::Suspended { stack, redex, class },
    }
}
