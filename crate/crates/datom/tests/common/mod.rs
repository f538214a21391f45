#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use datom_core::lattice::{neighbors, world_position};
use datom_core::motion::valid_actions;
use datom_core::simkernel::{SimTrace, TraceEvent};
use datom_core::{CellPos, Configuration, ModuleState};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_da70;

/// Seeded random connected configurations; sizes drawn from `2..=max`.
pub fn corpus(count: usize, max: usize) -> Vec<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..count)
        .map(|_| {
            let size = rng.gen_range(2..=max);
            let mut cells = vec![CellPos::new(0, 0, 0)];
            while cells.len() < size {
                let base = cells[rng.gen_range(0..cells.len())];
                let n = neighbors(base)[rng.gen_range(0..12)];
                if !cells.contains(&n) {
                    cells.push(n);
                }
            }
            Configuration::from_modules(
                1.0,
                cells.into_iter().enumerate().map(|(i, c)| (i as u32 + 1, c)),
            )
            .unwrap()
        })
        .collect()
}

/// Motion edges between free surface cells of a fixed configuration.
pub fn motion_graph(config: &Configuration) -> BTreeMap<CellPos, Vec<CellPos>> {
    let spare = config.ids().max().unwrap_or(0) + 1;
    let mut edges: BTreeMap<CellPos, Vec<CellPos>> = BTreeMap::new();
    for x in config.free_surface_cells() {
        let mut work = config.clone();
        work.insert(ModuleState::new(spare, x)).unwrap();
        edges.insert(x, valid_actions(&work, x).into_iter().map(|a| a.goal).collect());
    }
    edges
}

/// Shortest motion counts to `goal`: Dijkstra over reversed edges.
pub fn dijkstra_to(edges: &BTreeMap<CellPos, Vec<CellPos>>, goal: CellPos) -> BTreeMap<CellPos, u32> {
    let mut reverse: BTreeMap<CellPos, Vec<CellPos>> = BTreeMap::new();
    for (x, ys) in edges {
        for y in ys {
            reverse.entry(*y).or_default().push(*x);
        }
    }
    let mut dist = BTreeMap::new();
    let mut heap = BinaryHeap::from([Reverse((0u32, goal))]);
    while let Some(Reverse((d, c))) = heap.pop() {
        if dist.contains_key(&c) {
            continue;
        }
        dist.insert(c, d);
        for x in reverse.get(&c).into_iter().flatten() {
            if !dist.contains_key(x) {
                heap.push(Reverse((d + 1, *x)));
            }
        }
    }
    dist
}

/// Connectivity from world positions: modules touch when their centres are
/// `2r` apart.
pub fn touching_connected(cells: &BTreeSet<CellPos>, r: f64) -> bool {
    let pts: Vec<[f64; 3]> = cells.iter().map(|c| world_position(*c, r)).collect();
    if pts.is_empty() {
        return true;
    }
    let mut seen = vec![false; pts.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(a) = queue.pop_front() {
        for b in 0..pts.len() {
            if seen[b] {
                continue;
            }
            let d2: f64 = (0..3).map(|x| (pts[a][x] - pts[b][x]).powi(2)).sum();
            if (d2 - 4.0 * r * r).abs() < 1e-9 * r * r {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    seen.iter().all(|s| *s)
}

/// Replays the motions of a trace and checks every state it commits.
/// Returns the number of states checked, or a description of the first
/// violation.
pub fn replay_connectivity(start: &Configuration, trace: &SimTrace) -> Result<usize, String> {
    let mut cells: BTreeSet<CellPos> = start.cells().collect();
    let mut checked = 0;
    for r in &trace.records {
        if let TraceEvent::MotionComplete { from, to } = r.event {
            if !cells.remove(&from) || !cells.insert(to) {
                return Err(format!("seq {}: bad move {from} -> {to}", r.seq));
            }
            if !touching_connected(&cells, start.radius()) {
                return Err(format!("seq {}: split after {from} -> {to}", r.seq));
            }
            checked += 1;
        }
    }
    Ok(checked)
}
