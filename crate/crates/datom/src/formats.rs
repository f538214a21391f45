//! Text outputs: field CSV, plan and trace JSONL, layer renders and the
//! surface reachability report.
//!
//! Field CSV rows are `i,j,k,dist` in cell order. Viewers colour them by
//! distance:
//!
//! | dist | colour |
//! |------|--------|
//! | 0 | red |
//! | 1 | orange |
//! | 2 | yellow |
//! | 3 | green |
//! | 4 | blue |
//! | 5 | cyan |
//! | 6 | pink |
//! | 7 | grey |
//! | 8 | salmon |
//! | 9 and more | white |

use std::fmt::Write;

use datom_core::gradient::DistanceField;
use datom_core::lattice::Deformation;
use datom_core::motion::MotionAction;
use datom_core::simkernel::{MessageKind, SimTrace, TraceEvent};
use datom_core::{CellPos, Configuration};
use serde::Serialize;
use serde_json::{json, Value};

const COLORS: [&str; 10] =
    ["red", "orange", "yellow", "green", "blue", "cyan", "pink", "grey", "salmon", "white"];

pub fn dist_color(dist: u32) -> &'static str {
    COLORS[(dist as usize).min(COLORS.len() - 1)]
}

pub fn field_csv(field: &DistanceField) -> String {
    let mut out = String::from("i,j,k,dist\n");
    for (c, d) in field.iter() {
        writeln!(out, "{},{},{},{}", c.i, c.j, c.k, d).unwrap();
    }
    out
}

fn cell(c: CellPos) -> Value {
    json!([c.i, c.j, c.k])
}

fn action_json(step: usize, a: &MotionAction, field: Option<&DistanceField>) -> Value {
    let helpers: Vec<Value> = a
        .helper_deformations
        .iter()
        .map(|h| {
            json!({
                "module": h.module,
                "cell": cell(h.cell),
                "axis": h.axis.name(),
                "phase": h.phase.name(),
                "label": h.label.name(),
            })
        })
        .collect();
    let mut v = json!({
        "step": step,
        "kind": a.kind.name(),
        "pivot": cell(a.pivot),
        "from": cell(a.mover),
        "to": cell(a.goal),
        "up": a.frame.up.name(),
        "right": a.frame.right.name(),
        "front": a.frame.front.name(),
        "helpers": helpers,
    });
    if let Some(f) = field {
        v["dist"] = json!(f.get(a.goal));
    }
    v
}

/// One JSON object per motion, `dist` being the distance reached.
pub fn plan_jsonl(plan: &[MotionAction], field: &DistanceField) -> String {
    let mut out = String::new();
    for (n, a) in plan.iter().enumerate() {
        out.push_str(&action_json(n + 1, a, Some(field)).to_string());
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct TraceLine<'a> {
    t: u64,
    seq: u64,
    kind: &'a str,
    module: u32,
    detail: Value,
}

fn message_detail(m: &datom_core::simkernel::Message) -> Value {
    let mut v = json!({
        "message": m.kind.name(),
        "src": m.src,
        "dst": m.dst,
        "send_time": m.send_time,
        "deliver_time": m.deliver_time,
    });
    if let MessageKind::Deform { axis, phase } = m.kind {
        v["axis"] = json!(axis.name());
        v["phase"] = json!(phase.name());
    }
    v
}

/// One JSON object per trace record with fields `t, seq, kind, module, detail`.
pub fn trace_jsonl(trace: &SimTrace) -> String {
    let mut out = String::new();
    for r in &trace.records {
        let detail = match &r.event {
            TraceEvent::MessageSent(m) | TraceEvent::MessageDelivered(m) => message_detail(m),
            TraceEvent::DeformationStart { axis, phase, release }
            | TraceEvent::DeformationEnd { axis, phase, release } => json!({
                "axis": axis.name(),
                "phase": phase.name(),
                "release": release,
            }),
            TraceEvent::MotionStart { kind, pivot, from, to } => json!({
                "rule": kind.name(),
                "pivot": cell(*pivot),
                "from": cell(*from),
                "to": cell(*to),
            }),
            TraceEvent::ConnectorSwap { pivot, pivot_from, pivot_to, mover_from, mover_to } => json!({
                "pivot": pivot,
                "pivot_from": pivot_from,
                "pivot_to": pivot_to,
                "mover_from": mover_from,
                "mover_to": mover_to,
            }),
            TraceEvent::MotionComplete { from, to } => json!({"from": cell(*from), "to": cell(*to)}),
        };
        let line = TraceLine { t: r.t, seq: r.seq, kind: r.event.name(), module: r.module, detail };
        out.push_str(&serde_json::to_string(&line).expect("plain data"));
        out.push('\n');
    }
    out
}

/// ASCII view of plane `k`: `#` module, axis glyph for a compressed piston,
/// `G` goal, `.` empty. Rows run from high `j` to low `j`; odd planes are
/// shifted by half a cell. The window spans every module and the goal.
pub fn render(config: &Configuration, k: i32, goal: Option<CellPos>) -> String {
    let cells = config.cells().chain(goal);
    let (mut ilo, mut ihi, mut jlo, mut jhi) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
    for c in cells {
        ilo = ilo.min(c.i);
        ihi = ihi.max(c.i);
        jlo = jlo.min(c.j);
        jhi = jhi.max(c.j);
    }
    if ilo > ihi {
        (ilo, ihi, jlo, jhi) = (0, 0, 0, 0);
    }
    let mut out = format!("k={k} i={ilo}..{ihi} j={jlo}..{jhi}\n");
    for j in (jlo..=jhi).rev() {
        let mut row = String::new();
        if k.rem_euclid(2) == 1 {
            row.push(' ');
        }
        for i in ilo..=ihi {
            let c = CellPos::new(i, j, k);
            let ch = match config.get(c) {
                Some(m) => match m.deformation {
                    Deformation::Single { axis, fraction } if fraction > 0.0 => axis.glyph(),
                    _ => '#',
                },
                None if Some(c) == goal => 'G',
                None => '.',
            };
            if i > ilo {
                row.push(' ');
            }
            row.push(ch);
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Which free surface cells can reach the goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceReport {
    pub reachable: Vec<(CellPos, u32)>,
    pub unreachable: Vec<CellPos>,
}

impl SurfaceReport {
    pub fn new(config: &Configuration, field: &DistanceField) -> Self {
        let mut reachable = Vec::new();
        let mut unreachable = Vec::new();
        for c in config.free_surface_cells() {
            match field.get(c) {
                Some(d) => reachable.push((c, d)),
                None => unreachable.push(c),
            }
        }
        Self { reachable, unreachable }
    }

    pub fn total(&self) -> usize {
        self.reachable.len() + self.unreachable.len()
    }

    pub fn fraction(&self) -> f64 {
        if self.total() == 0 {
            return 1.0;
        }
        self.reachable.len() as f64 / self.total() as f64
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (c, d) in &self.reachable {
            writeln!(out, "{},{},{} reachable {}", c.i, c.j, c.k, d).unwrap();
        }
        for c in &self.unreachable {
            writeln!(out, "{},{},{} unreachable", c.i, c.j, c.k).unwrap();
        }
        writeln!(
            out,
            "surface={} reachable={} unreachable={} fraction={:.4}",
            self.total(),
            self.reachable.len(),
            self.unreachable.len(),
            self.fraction()
        )
        .unwrap();
        out
    }
}
