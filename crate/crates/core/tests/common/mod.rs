#![allow(dead_code)]

use datom_core::lattice::{neighbors, CellPos, Configuration};
use proptest::prelude::*;

/// Grows a connected configuration: each step picks an existing module and one
/// of its 12 neighbours.
pub fn grow(steps: &[(usize, usize)]) -> Configuration {
    let mut cells = vec![CellPos::new(0, 0, 0)];
    for &(pick, dir) in steps {
        let base = cells[pick % cells.len()];
        let n = neighbors(base)[dir % 12];
        if !cells.contains(&n) {
            cells.push(n);
        }
    }
    Configuration::from_modules(
        1.0,
        cells.into_iter().enumerate().map(|(i, c)| (i as u32 + 1, c)),
    )
    .expect("grown configurations are connected")
}

pub fn config_strategy(max_modules: usize) -> impl Strategy<Value = Configuration> {
    prop::collection::vec((0usize..64, 0usize..12), 1..max_modules)
        .prop_map(|steps| grow(&steps))
}
