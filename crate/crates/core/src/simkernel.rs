//! Discrete-event execution of gradient following by message-passing modules.
//!
//! The mobile module picks its next motion from the distance field, asks each
//! helper to compress a piston, moves once every helper acknowledged, then has
//! them release before looking for the next step.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::gradient::{best_next, compute_field, DistanceField, FieldError};
use crate::lattice::{connector_toward, CellPos, Configuration, Deformation, ModuleId, PistonAxis};
use crate::motion::{apply, HelperPhase, MotionAction, MotionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimParams {
    /// Message latency.
    pub l_msg: u64,
    /// Duration of one piston compression or release.
    pub t_def: u64,
    /// Duration of one motion of the mobile module.
    pub t_move: u64,
    /// Reserved; runs do not depend on it.
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self { l_msg: 1, t_def: 10, t_move: 20, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    Deform { axis: PistonAxis, phase: HelperPhase },
    AckDeform,
    Release,
    AckRelease,
}

impl MessageKind {
    pub fn name(&self) -> &'static str {
        match self {
            MessageKind::Deform { .. } => "deform",
            MessageKind::AckDeform => "ack-deform",
            MessageKind::Release => "release",
            MessageKind::AckRelease => "ack-release",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub kind: MessageKind,
    pub src: ModuleId,
    pub dst: ModuleId,
    pub send_time: u64,
    pub deliver_time: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    MessageSent(Message),
    MessageDelivered(Message),
    /// `release` is set when the piston goes back to rest.
    DeformationStart { axis: PistonAxis, phase: HelperPhase, release: bool },
    DeformationEnd { axis: PistonAxis, phase: HelperPhase, release: bool },
    MotionStart { kind: MotionKind, pivot: CellPos, from: CellPos, to: CellPos },
    /// Mid-motion hand-over of the mover from one pivot connector to another.
    ConnectorSwap {
        pivot: ModuleId,
        pivot_from: usize,
        pivot_to: usize,
        mover_from: usize,
        mover_to: usize,
    },
    MotionComplete { from: CellPos, to: CellPos },
}

impl TraceEvent {
    pub fn name(&self) -> &'static str {
        match self {
            TraceEvent::MessageSent(_) => "message-sent",
            TraceEvent::MessageDelivered(_) => "message-delivered",
            TraceEvent::DeformationStart { .. } => "deformation-start",
            TraceEvent::DeformationEnd { .. } => "deformation-end",
            TraceEvent::MotionStart { .. } => "motion-start",
            TraceEvent::ConnectorSwap { .. } => "connector-swap",
            TraceEvent::MotionComplete { .. } => "motion-complete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub t: u64,
    pub seq: u64,
    /// Module the event happens on (receiver for deliveries).
    pub module: ModuleId,
    pub event: TraceEvent,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimTrace {
    pub records: Vec<TraceRecord>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn motions(&self) -> impl Iterator<Item = &TraceRecord> + '_ {
        self.records.iter().filter(|r| matches!(r.event, TraceEvent::MotionComplete { .. }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub trace: SimTrace,
    pub config: Configuration,
    /// Motions in execution order.
    pub actions: Vec<MotionAction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimError {
    UnknownModule(ModuleId),
    Field(FieldError),
    Unreachable(CellPos),
    Stuck(CellPos),
    ConnectivityLost,
    Deadlock,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::UnknownModule(id) => write!(f, "no module with id {id}"),
            SimError::Field(e) => write!(f, "{e}"),
            SimError::Unreachable(c) => write!(f, "start {c} cannot reach the goal"),
            SimError::Stuck(c) => write!(f, "no descending motion from {c}"),
            SimError::ConnectivityLost => f.write_str("configuration split during the run"),
            SimError::Deadlock => f.write_str("event queue drained before reaching the goal"),
        }
    }
}

impl core::error::Error for SimError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Wakeup {
    Deliver(usize),
    DeformEnd(ModuleId),
    MotionMid,
    MotionEnd,
}

/// One pending piston change of a helper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct PistonStep {
    axis: PistonAxis,
    phase: HelperPhase,
    release: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    WaitFirst,
    Moving,
    WaitSecond,
    WaitRelease,
}

#[derive(Debug, Default)]
struct Actor {
    deformation: Deformation,
    /// Piston changes still to run before answering `sender`.
    todo: Vec<PistonStep>,
    reply: Option<MessageKind>,
    sender: Option<ModuleId>,
}

struct Sim<'a> {
    params: &'a SimParams,
    config: Configuration,
    field: DistanceField,
    mobile: ModuleId,
    pos: CellPos,
    actors: BTreeMap<ModuleId, Actor>,
    queue: BinaryHeap<Reverse<(u64, u64, Wakeup)>>,
    messages: Vec<Message>,
    qseq: u64,
    now: u64,
    trace: SimTrace,
    actions: Vec<MotionAction>,
    current: Option<MotionAction>,
    stage: Stage,
    waited: usize,
    done: bool,
}

impl Sim<'_> {
    fn record(&mut self, module: ModuleId, event: TraceEvent) {
        let seq = self.trace.records.len() as u64;
        self.trace.records.push(TraceRecord { t: self.now, seq, module, event });
    }

    fn schedule(&mut self, at: u64, w: Wakeup) {
        self.queue.push(Reverse((at, self.qseq, w)));
        self.qseq += 1;
    }

    fn send(&mut self, src: ModuleId, dst: ModuleId, kind: MessageKind) {
        let msg = Message {
            kind,
            src,
            dst,
            send_time: self.now,
            deliver_time: self.now + self.params.l_msg,
        };
        self.record(src, TraceEvent::MessageSent(msg));
        self.messages.push(msg);
        self.schedule(msg.deliver_time, Wakeup::Deliver(self.messages.len() - 1));
    }

    fn follow_gradient(&mut self) -> Result<(), SimError> {
        if self.field.get(self.pos) == Some(0) {
            self.done = true;
            return Ok(());
        }
        let action = best_next(&self.config, self.pos, &self.field).map_err(|e| match e {
            FieldError::NotInField(c) => SimError::Unreachable(c),
            _ => SimError::Stuck(self.pos),
        })?;
        let wave: Vec<_> = action.first_wave().copied().collect();
        self.current = Some(action);
        self.stage = Stage::WaitFirst;
        self.waited = wave.len();
        for h in wave {
            self.send(self.mobile, h.module, MessageKind::Deform { axis: h.axis, phase: h.phase });
        }
        if self.waited == 0 {
            self.start_motion();
        }
        Ok(())
    }

    fn start_motion(&mut self) {
        let a = self.current.as_ref().expect("motion selected");
        let ev = TraceEvent::MotionStart { kind: a.kind, pivot: a.pivot, from: a.mover, to: a.goal };
        self.stage = Stage::Moving;
        self.record(self.mobile, ev);
        self.schedule(self.now + self.params.t_move / 2, Wakeup::MotionMid);
    }

    fn motion_mid(&mut self) {
        let a = self.current.clone().expect("motion selected");
        let pivot = self.config.get(a.pivot).expect("pivot occupied").id;
        let swap = TraceEvent::ConnectorSwap {
            pivot,
            pivot_from: connector_toward(a.pivot, a.mover).expect("adjacent"),
            pivot_to: connector_toward(a.pivot, a.goal).expect("adjacent"),
            mover_from: connector_toward(a.mover, a.pivot).expect("adjacent"),
            mover_to: connector_toward(a.goal, a.pivot).expect("adjacent"),
        };
        self.record(self.mobile, swap);
        let wave: Vec<_> = a.second_wave().copied().collect();
        self.waited = wave.len();
        if wave.is_empty() {
            self.finish_motion_later();
        } else {
            self.stage = Stage::WaitSecond;
            for h in wave {
                self.send(self.mobile, h.module, MessageKind::Deform { axis: h.axis, phase: h.phase });
            }
        }
    }

    fn finish_motion_later(&mut self) {
        self.stage = Stage::Moving;
        let rest = self.params.t_move - self.params.t_move / 2;
        self.schedule(self.now + rest, Wakeup::MotionEnd);
    }

    fn motion_end(&mut self) -> Result<(), SimError> {
        let a = self.current.clone().expect("motion selected");
        self.config = apply(&self.config, &a).map_err(|_| SimError::Stuck(self.pos))?;
        if !self.config.is_connected() {
            return Err(SimError::ConnectivityLost);
        }
        self.pos = a.goal;
        let helpers = a.helper_modules();
        self.waited = helpers.len();
        self.stage = Stage::WaitRelease;
        for h in helpers {
            self.send(self.mobile, h, MessageKind::Release);
        }
        if self.waited == 0 {
            self.complete_motion()?;
        }
        Ok(())
    }

    fn complete_motion(&mut self) -> Result<(), SimError> {
        let a = self.current.take().expect("motion selected");
        self.record(self.mobile, TraceEvent::MotionComplete { from: a.mover, to: a.goal });
        self.actions.push(a);
        self.follow_gradient()
    }

    fn run_step(&mut self, module: ModuleId) {
        let actor = self.actors.get_mut(&module).expect("known module");
        let Some(step) = actor.todo.first().copied() else {
            let to = actor.sender.take().expect("request pending");
            let reply = actor.reply.take().expect("request pending");
            self.send(module, to, reply);
            return;
        };
        actor.deformation = if step.release {
            Deformation::None
        } else {
            Deformation::Single { axis: step.axis, fraction: 1.0 }
        };
        let ev = TraceEvent::DeformationStart { axis: step.axis, phase: step.phase, release: step.release };
        self.record(module, ev);
        self.schedule(self.now + self.params.t_def, Wakeup::DeformEnd(module));
    }

    fn deliver(&mut self, idx: usize) -> Result<(), SimError> {
        let msg = self.messages[idx];
        self.record(msg.dst, TraceEvent::MessageDelivered(msg));
        match msg.kind {
            MessageKind::Deform { axis, phase } => {
                let actor = self.actors.get_mut(&msg.dst).expect("known module");
                if phase == HelperPhase::SecondHalf {
                    if let Deformation::Single { axis: held, .. } = actor.deformation {
                        actor.todo.push(PistonStep { axis: held, phase: HelperPhase::FirstHalf, release: true });
                    }
                }
                actor.todo.push(PistonStep { axis, phase, release: false });
                actor.reply = Some(MessageKind::AckDeform);
                actor.sender = Some(msg.src);
                self.run_step(msg.dst);
            }
            MessageKind::Release => {
                let actor = self.actors.get_mut(&msg.dst).expect("known module");
                if let Deformation::Single { axis, .. } = actor.deformation {
                    let phase = self
                        .current
                        .as_ref()
                        .and_then(|a| {
                            a.helper_deformations.iter().rev().find(|h| h.module == msg.dst && h.axis == axis)
                        })
                        .map_or(HelperPhase::Whole, |h| h.phase);
                    actor.todo.push(PistonStep { axis, phase, release: true });
                }
                actor.reply = Some(MessageKind::AckRelease);
                actor.sender = Some(msg.src);
                self.run_step(msg.dst);
            }
            MessageKind::AckDeform | MessageKind::AckRelease => {
                self.waited -= 1;
                if self.waited == 0 {
                    match self.stage {
                        Stage::WaitFirst => self.start_motion(),
                        Stage::WaitSecond => self.finish_motion_later(),
                        Stage::WaitRelease => self.complete_motion()?,
                        Stage::Moving => unreachable!("no acks awaited while moving"),
                    }
                }
            }
        }
        Ok(())
    }

    fn deform_end(&mut self, module: ModuleId) {
        let actor = self.actors.get_mut(&module).expect("known module");
        let step = actor.todo.remove(0);
        let ev = TraceEvent::DeformationEnd { axis: step.axis, phase: step.phase, release: step.release };
        self.record(module, ev);
        self.run_step(module);
    }
}

/// Moves module `mobile` to `goal` by repeated gradient descent, with helpers
/// coordinated by messages. The distance field is computed once, on the
/// configuration without the mobile.
pub fn run(
    config: &Configuration,
    goal: CellPos,
    mobile: ModuleId,
    params: &SimParams,
) -> Result<SimOutcome, SimError> {
    let start = config.position_of(mobile).ok_or(SimError::UnknownModule(mobile))?;
    let mut rest = config.clone();
    rest.remove(start);
    let field = compute_field(&rest, goal).map_err(SimError::Field)?;
    if !field.contains(start) {
        return Err(SimError::Unreachable(start));
    }
    let mut cfg = config.clone();
    cfg.clear_deformations();
    let actors = cfg.ids().map(|id| (id, Actor::default())).collect();
    let mut sim = Sim {
        params,
        config: cfg,
        field,
        mobile,
        pos: start,
        actors,
        queue: BinaryHeap::new(),
        messages: Vec::new(),
        qseq: 0,
        now: 0,
        trace: SimTrace::default(),
        actions: Vec::new(),
        current: None,
        stage: Stage::WaitFirst,
        waited: 0,
        done: false,
    };
    sim.follow_gradient()?;
    while !sim.done {
        let Some(Reverse((t, _, w))) = sim.queue.pop() else {
            return Err(SimError::Deadlock);
        };
        sim.now = t;
        match w {
            Wakeup::Deliver(idx) => sim.deliver(idx)?,
            Wakeup::DeformEnd(module) => sim.deform_end(module),
            Wakeup::MotionMid => sim.motion_mid(),
            Wakeup::MotionEnd => sim.motion_end()?,
        }
    }
    Ok(SimOutcome { trace: sim.trace, config: sim.config, actions: sim.actions })
}
