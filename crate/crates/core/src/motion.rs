//! The three pivot motion rules and their validation against a configuration.
//!
//! A motion moves a module `B` (the mover) around an adjacent module `A`
//! (the pivot) while the two stay latched. The pivot's active piston gives the
//! up direction `U`; `B` starts at `A + U - F` with
//!
//! ```text
//! R = BA × U,   F = U × R
//! ```
//!
//! and ends at `U - R` (turn left), `U + R` (turn right) or `U + F` (go ahead).
//! Each rule lists the cells around the pivot that must be empty, or may hold
//! a module that compresses a given piston to clear the path.

use alloc::vec::Vec;
use core::fmt;

use crate::lattice::{connector_toward, CellPos, Configuration, ModuleId, PistonAxis, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MotionKind {
    TurnLeft,
    TurnRight,
    GoAhead,
}

impl MotionKind {
    pub const ALL: [MotionKind; 3] = [MotionKind::TurnLeft, MotionKind::TurnRight, MotionKind::GoAhead];

    pub fn reversed(self) -> Self {
        match self {
            MotionKind::TurnLeft => MotionKind::TurnRight,
            MotionKind::TurnRight => MotionKind::TurnLeft,
            MotionKind::GoAhead => MotionKind::GoAhead,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MotionKind::TurnLeft => "turn-left",
            MotionKind::TurnRight => "turn-right",
            MotionKind::GoAhead => "go-ahead",
        }
    }
}

impl fmt::Display for MotionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Offset from the pivot as `u·U + r·R + f·F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rel {
    pub u: i8,
    pub r: i8,
    pub f: i8,
}

impl Rel {
    pub const fn new(u: i8, r: i8, f: i8) -> Self {
        Self { u, r, f }
    }

    pub fn mirrored(self) -> Self {
        Self { r: -self.r, ..self }
    }
}

/// A signed in-plane frame direction used by `def(X)` statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrameDir {
    PlusR,
    MinusR,
    PlusF,
    MinusF,
}

impl FrameDir {
    pub fn mirrored(self) -> Self {
        match self {
            FrameDir::PlusR => FrameDir::MinusR,
            FrameDir::MinusR => FrameDir::PlusR,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellStatus {
    /// `∅`
    Empty,
    /// `∅ ∨ def(X)`
    EmptyOrDeformed(FrameDir),
    /// `∅ ∨ def(X, Y)`: deformed along `X` first, along `Y` after mid-motion.
    EmptyOrDoubleDeformed(FrameDir, FrameDir),
}

impl CellStatus {
    pub fn mirrored(self) -> Self {
        match self {
            CellStatus::Empty => CellStatus::Empty,
            CellStatus::EmptyOrDeformed(x) => CellStatus::EmptyOrDeformed(x.mirrored()),
            CellStatus::EmptyOrDoubleDeformed(x, y) => {
                CellStatus::EmptyOrDoubleDeformed(x.mirrored(), y.mirrored())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellLabel {
    Goal,
    C,
    D,
    E,
    F,
    H,
    J,
    K,
}

impl CellLabel {
    pub fn name(self) -> &'static str {
        match self {
            CellLabel::Goal => "Goal",
            CellLabel::C => "C",
            CellLabel::D => "D",
            CellLabel::E => "E",
            CellLabel::F => "F",
            CellLabel::H => "H",
            CellLabel::J => "J",
            CellLabel::K => "K",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellRequirement {
    pub rel: Rel,
    pub status: CellStatus,
    pub label: CellLabel,
}

const fn req(u: i8, r: i8, f: i8, status: CellStatus, label: CellLabel) -> CellRequirement {
    CellRequirement { rel: Rel::new(u, r, f), status, label }
}

use CellLabel as L;
use CellStatus::{Empty, EmptyOrDeformed as Def, EmptyOrDoubleDeformed as Def2};
use FrameDir::{MinusF, MinusR, PlusF, PlusR};

static TURN_LEFT: [CellRequirement; 7] = [
    req(1, -1, 0, Empty, L::Goal),
    req(1, 0, 1, Def(MinusF), L::C),
    req(1, 1, 0, Def(MinusR), L::D),
    req(2, 1, -1, Def(MinusR), L::E),
    req(2, -1, -1, Def2(PlusR, PlusF), L::F),
    req(2, -1, 1, Def(MinusF), L::J),
    req(2, 0, 0, Empty, L::K),
];

static TURN_RIGHT: [CellRequirement; 7] = [
    req(1, 1, 0, Empty, L::Goal),
    req(1, -1, 0, Def(PlusR), L::C),
    req(1, 0, 1, Def(MinusF), L::D),
    req(2, -1, -1, Def(PlusR), L::E),
    req(2, 1, -1, Def2(MinusR, PlusF), L::F),
    req(2, 1, 1, Def(MinusF), L::H),
    req(2, 0, 0, Empty, L::K),
];

static GO_AHEAD: [CellRequirement; 8] = [
    req(1, 0, 1, Empty, L::Goal),
    req(1, -1, 0, Def(PlusR), L::C),
    req(1, 1, 0, Def(MinusR), L::D),
    req(2, -1, -1, Def(PlusR), L::E),
    req(2, 1, -1, Def(MinusR), L::F),
    req(2, 1, 1, Def(MinusR), L::H),
    req(2, -1, 1, Def(PlusR), L::J),
    req(2, 0, 0, Empty, L::K),
];

/// Cell requirements of a rule, in template order (goal first, `K` last).
pub fn rule_template(kind: MotionKind) -> &'static [CellRequirement] {
    match kind {
        MotionKind::TurnLeft => &TURN_LEFT,
        MotionKind::TurnRight => &TURN_RIGHT,
        MotionKind::GoAhead => &GO_AHEAD,
    }
}

/// Orientation `(U, R, F)` of a motion, each along one of the piston axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MotionFrame {
    pub up: PistonAxis,
    pub right: PistonAxis,
    pub front: PistonAxis,
}

impl MotionFrame {
    /// Frame for `mover` turning around `pivot` with up axis `up`.
    ///
    /// `None` unless the mover sits in the ring of four cells around `up`,
    /// i.e. `mover = pivot + U - F` for some `F ⟂ U`.
    pub fn new(pivot: CellPos, mover: CellPos, up: PistonAxis) -> Option<Self> {
        let u = up.site();
        let ab = mover.site() - pivot.site();
        if ab.dot(u) != 2 || ab.dot(ab) != 4 {
            return None;
        }
        let front = PistonAxis::from_site(u - ab)?;
        // R = BA × U = (F - U) × U = F × U
        let right = front.cross(up)?;
        Some(Self { up, right, front })
    }

    pub fn offset(&self, rel: Rel) -> Site {
        i32::from(rel.u) * self.up.site()
            + i32::from(rel.r) * self.right.site()
            + i32::from(rel.f) * self.front.site()
    }

    pub fn cell(&self, pivot: CellPos, rel: Rel) -> CellPos {
        (pivot.site() + self.offset(rel)).cell().expect("rule offsets land on lattice cells")
    }

    pub fn axis(&self, dir: FrameDir) -> PistonAxis {
        match dir {
            FrameDir::PlusR => self.right,
            FrameDir::MinusR => self.right.opposite(),
            FrameDir::PlusF => self.front,
            FrameDir::MinusF => self.front.opposite(),
        }
    }

    /// `U`, `R`, `F` as world vectors of length `√2·r`.
    pub fn world_vectors(&self, r: f64) -> [[f64; 3]; 3] {
        [self.up.site().world(r), self.right.site().world(r), self.front.site().world(r)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HelperPhase {
    /// Compressed before the motion, released after it.
    Whole,
    /// Compressed before the motion, switched at mid-motion.
    FirstHalf,
    /// Compressed at mid-motion, released after it.
    SecondHalf,
}

impl HelperPhase {
    pub fn name(self) -> &'static str {
        match self {
            HelperPhase::Whole => "whole",
            HelperPhase::FirstHalf => "first-half",
            HelperPhase::SecondHalf => "second-half",
        }
    }

    fn reversed(self) -> Self {
        match self {
            HelperPhase::FirstHalf => HelperPhase::SecondHalf,
            HelperPhase::SecondHalf => HelperPhase::FirstHalf,
            HelperPhase::Whole => HelperPhase::Whole,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HelperDeformation {
    pub module: ModuleId,
    pub cell: CellPos,
    pub axis: PistonAxis,
    pub phase: HelperPhase,
    pub label: CellLabel,
}

/// One instantiated motion rule.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionAction {
    pub kind: MotionKind,
    pub pivot: CellPos,
    pub mover: CellPos,
    pub frame: MotionFrame,
    pub goal: CellPos,
    pub requirements: Vec<CellRequirement>,
    /// Filled in by validation.
    pub helper_deformations: Vec<HelperDeformation>,
}

impl MotionAction {
    pub fn new(kind: MotionKind, pivot: CellPos, mover: CellPos, up: PistonAxis) -> Option<Self> {
        let frame = MotionFrame::new(pivot, mover, up)?;
        let requirements = rule_template(kind).to_vec();
        let goal = frame.cell(pivot, requirements[0].rel);
        Some(Self { kind, pivot, mover, frame, goal, requirements, helper_deformations: Vec::new() })
    }

    pub fn requirement_cells(&self) -> impl Iterator<Item = (CellPos, &CellRequirement)> + '_ {
        self.requirements.iter().map(|r| (self.frame.cell(self.pivot, r.rel), r))
    }

    /// Helpers compressed before the motion starts.
    pub fn first_wave(&self) -> impl Iterator<Item = &HelperDeformation> + '_ {
        self.helper_deformations.iter().filter(|h| h.phase != HelperPhase::SecondHalf)
    }

    pub fn second_wave(&self) -> impl Iterator<Item = &HelperDeformation> + '_ {
        self.helper_deformations.iter().filter(|h| h.phase == HelperPhase::SecondHalf)
    }

    /// Distinct helper modules, in first-appearance order.
    pub fn helper_modules(&self) -> Vec<ModuleId> {
        let mut out: Vec<ModuleId> = Vec::new();
        for h in &self.helper_deformations {
            if !out.contains(&h.module) {
                out.push(h.module);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// A cell that must be empty holds a module.
    Occupied(CellLabel),
    /// A helper would hang only on the connectors its piston rotates.
    HelperDetach(CellLabel),
    /// Lifting the mover splits the remaining modules.
    Disconnects,
    /// The action does not describe a mover next to a pivot in this configuration.
    Malformed,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::Occupied(l) => write!(f, "cell {} is occupied", l.name()),
            InvalidReason::HelperDetach(l) => {
                write!(f, "helper in cell {} would detach when deforming", l.name())
            }
            InvalidReason::Disconnects => f.write_str("moving the module disconnects the rest"),
            InvalidReason::Malformed => f.write_str("action does not match configuration"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid(Vec<HelperDeformation>),
    Invalid(InvalidReason),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionError {
    InvalidAction(InvalidReason),
}

impl fmt::Display for MotionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MotionError::InvalidAction(r) => write!(f, "invalid action: {r}"),
        }
    }
}

impl core::error::Error for MotionError {}

/// Every rule instance moving the module at `mover`, validated or not.
///
/// Ordered by pivot cell, then up axis, then rule kind.
pub fn candidate_actions(config: &Configuration, mover: CellPos) -> Vec<MotionAction> {
    let mut pivots: Vec<CellPos> = config.occupied_neighbors(mover).collect();
    pivots.sort_unstable();
    let mut out = Vec::new();
    for pivot in pivots {
        for up in PistonAxis::ALL {
            if MotionFrame::new(pivot, mover, up).is_none() {
                continue;
            }
            for kind in MotionKind::ALL {
                out.extend(MotionAction::new(kind, pivot, mover, up));
            }
        }
    }
    out
}

/// Candidate actions that pass validation, helper deformations filled in.
pub fn valid_actions(config: &Configuration, mover: CellPos) -> Vec<MotionAction> {
    let candidates = candidate_actions(config, mover);
    if candidates.is_empty() {
        return candidates;
    }
    let rest_connected = config.is_connected_without(Some(mover));
    candidates
        .into_iter()
        .filter_map(|mut a| match check(config, &a, rest_connected) {
            Verdict::Valid(h) => {
                a.helper_deformations = h;
                Some(a)
            }
            Verdict::Invalid(_) => None,
        })
        .collect()
}

pub fn validate(config: &Configuration, action: &MotionAction) -> Verdict {
    if !config.is_occupied(action.mover) {
        return Verdict::Invalid(InvalidReason::Malformed);
    }
    check(config, action, config.is_connected_without(Some(action.mover)))
}

fn check(config: &Configuration, action: &MotionAction, rest_connected: bool) -> Verdict {
    let well_formed = config.is_occupied(action.pivot)
        && config.is_occupied(action.mover)
        && MotionFrame::new(action.pivot, action.mover, action.frame.up) == Some(action.frame)
        && action.requirements.first().is_some_and(|r| r.label == CellLabel::Goal)
        && action.frame.cell(action.pivot, action.requirements[0].rel) == action.goal
        && action.goal != action.mover;
    if !well_formed {
        return Verdict::Invalid(InvalidReason::Malformed);
    }

    let mut helpers = Vec::new();
    for (cell, req) in action.requirement_cells() {
        let Some(occupant) = config.get(cell) else {
            continue;
        };
        let label = req.label;
        match req.status {
            CellStatus::Empty => return Verdict::Invalid(InvalidReason::Occupied(label)),
            CellStatus::EmptyOrDeformed(dir) => {
                let axis = action.frame.axis(dir);
                if !can_deform(config, cell, axis, action.mover) {
                    return Verdict::Invalid(InvalidReason::HelperDetach(label));
                }
                helpers.push(HelperDeformation {
                    module: occupant.id,
                    cell,
                    axis,
                    phase: HelperPhase::Whole,
                    label,
                });
            }
            CellStatus::EmptyOrDoubleDeformed(first, second) => {
                let (a1, a2) = (action.frame.axis(first), action.frame.axis(second));
                if !can_deform(config, cell, a1, action.mover)
                    || !can_deform(config, cell, a2, action.mover)
                {
                    return Verdict::Invalid(InvalidReason::HelperDetach(label));
                }
                helpers.push(HelperDeformation {
                    module: occupant.id,
                    cell,
                    axis: a1,
                    phase: HelperPhase::FirstHalf,
                    label,
                });
                helpers.push(HelperDeformation {
                    module: occupant.id,
                    cell,
                    axis: a2,
                    phase: HelperPhase::SecondHalf,
                    label,
                });
            }
        }
    }
    if !rest_connected {
        return Verdict::Invalid(InvalidReason::Disconnects);
    }
    Verdict::Valid(helpers)
}

/// A module may compress `axis` if some neighbour other than the mover holds
/// it through a connector that piston leaves in place.
pub fn can_deform(config: &Configuration, cell: CellPos, axis: PistonAxis, mover: CellPos) -> bool {
    let driven = axis.connectors();
    config.occupied_neighbors(cell).any(|n| {
        n != mover
            && connector_toward(cell, n).is_ok_and(|idx| !driven.contains(&idx))
    })
}

/// Executes a valid action: the mover lands on the goal and every module
/// returns to rest.
pub fn apply(config: &Configuration, action: &MotionAction) -> Result<Configuration, MotionError> {
    match validate(config, action) {
        Verdict::Valid(_) => {}
        Verdict::Invalid(r) => return Err(MotionError::InvalidAction(r)),
    }
    let mut next = config.clone();
    let moved = next.relocate(action.mover, action.goal);
    debug_assert!(moved);
    next.clear_deformations();
    Ok(next)
}

/// The motion bringing the mover back, around the same pivot and up axis.
pub fn inverse(action: &MotionAction) -> MotionAction {
    let mut back = MotionAction::new(
        action.kind.reversed(),
        action.pivot,
        action.goal,
        action.frame.up,
    )
    .expect("goal of a rule lies in the same ring around U");
    back.helper_deformations = action
        .helper_deformations
        .iter()
        .map(|h| HelperDeformation { phase: h.phase.reversed(), ..*h })
        .collect();
    back
}
