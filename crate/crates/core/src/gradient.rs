//! Motion-count distance field towards a goal cell, and greedy descent on it.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::{CellPos, Configuration, ModuleId, ModuleState};
use crate::motion::{apply, valid_actions, MotionAction, MotionError};

/// Minimal number of motions from each reachable cell to `goal`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    pub goal: CellPos,
    dist: BTreeMap<CellPos, u32>,
}

impl DistanceField {
    pub fn get(&self, cell: CellPos) -> Option<u32> {
        self.dist.get(&cell).copied()
    }

    pub fn contains(&self, cell: CellPos) -> bool {
        self.dist.contains_key(&cell)
    }

    /// Cells in canonical order with their distance.
    pub fn iter(&self) -> impl Iterator<Item = (CellPos, u32)> + '_ {
        self.dist.iter().map(|(c, d)| (*c, *d))
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn max_distance(&self) -> u32 {
        self.dist.values().copied().max().unwrap_or(0)
    }

    pub fn as_map(&self) -> &BTreeMap<CellPos, u32> {
        &self.dist
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldError {
    /// Goal is occupied or touches no module.
    GoalNotOnSurface(CellPos),
    /// The cell has no finite distance.
    NotInField(CellPos),
    /// No valid motion lowers the distance from this cell.
    Stuck(CellPos),
    Motion(MotionError),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::GoalNotOnSurface(c) => write!(f, "goal {c} is not a free surface cell"),
            FieldError::NotInField(c) => write!(f, "cell {c} cannot reach the goal"),
            FieldError::Stuck(c) => write!(f, "no descending motion from {c}"),
            FieldError::Motion(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FieldError {}

impl From<MotionError> for FieldError {
    fn from(e: MotionError) -> Self {
        FieldError::Motion(e)
    }
}

fn spare_id(config: &Configuration) -> ModuleId {
    config.ids().last().map_or(1, |m| m.saturating_add(1))
}

/// Breadth-first expansion from `goal`: a virtual module is dropped on each
/// frontier cell and every valid motion it could make names the next ring.
/// The configuration itself is left untouched.
pub fn compute_field(config: &Configuration, goal: CellPos) -> Result<DistanceField, FieldError> {
    if config.is_occupied(goal) || config.occupied_neighbors(goal).next().is_none() {
        return Err(FieldError::GoalNotOnSurface(goal));
    }
    let mut work = config.clone();
    let virtual_id = spare_id(config);
    let mut dist = BTreeMap::new();
    let mut queue = VecDeque::new();
    dist.insert(goal, 0u32);
    queue.push_back(goal);
    while let Some(cell) = queue.pop_front() {
        let d = dist[&cell];
        work.insert(ModuleState::new(virtual_id, cell))
            .expect("frontier cells are free");
        for action in valid_actions(&work, cell) {
            if let alloc::collections::btree_map::Entry::Vacant(v) = dist.entry(action.goal) {
                v.insert(d + 1);
                queue.push_back(action.goal);
            }
        }
        work.remove(cell);
    }
    Ok(DistanceField { goal, dist })
}

/// The valid motion from `from` whose goal has the smallest distance; ties go
/// to the first action in canonical order.
///
/// `from` may be free (a virtual mover is placed there) or hold the mover.
pub fn best_next(
    config: &Configuration,
    from: CellPos,
    field: &DistanceField,
) -> Result<MotionAction, FieldError> {
    let here = field.get(from).ok_or(FieldError::NotInField(from))?;
    let actions = if config.is_occupied(from) {
        valid_actions(config, from)
    } else {
        let mut work = config.clone();
        work.insert(ModuleState::new(spare_id(config), from))
            .expect("cell checked free");
        valid_actions(&work, from)
    };
    let mut best: Option<(u32, MotionAction)> = None;
    for action in actions {
        let Some(d) = field.get(action.goal) else {
            continue;
        };
        if best.as_ref().is_none_or(|(dmin, _)| d < *dmin) {
            best = Some((d, action));
        }
    }
    match best {
        Some((d, action)) if d < here => Ok(action),
        _ => Err(FieldError::Stuck(from)),
    }
}

/// Follows the field from `start` down to the goal.
pub fn descend(
    config: &Configuration,
    start: CellPos,
    field: &DistanceField,
) -> Result<Vec<MotionAction>, FieldError> {
    let mut remaining = field.get(start).ok_or(FieldError::NotInField(start))?;
    let mut work = config.clone();
    if !work.is_occupied(start) {
        work.insert(ModuleState::new(spare_id(config), start))
            .expect("cell checked free");
    }
    let mut pos = start;
    let mut plan = Vec::new();
    while remaining > 0 {
        let action = best_next(&work, pos, field)?;
        work = apply(&work, &action)?;
        pos = action.goal;
        remaining = field.get(pos).ok_or(FieldError::NotInField(pos))?;
        plan.push(action);
    }
    Ok(plan)
}
