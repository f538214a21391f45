//! FCC lattice coordinates, piston axes and module configurations.
//!
//! Cells are addressed by [`CellPos`] `(i, j, k)`: `k` selects a horizontal
//! plane, `(i, j)` a site of the square lattice inside that plane. Odd planes
//! are shifted by `(r, r)` so that
//!
//! ```text
//! world(i, j, k) = (2r·i + r·(k mod 2), 2r·j + r·(k mod 2), √2·r·k)
//! ```
//!
//! and every cell has 12 neighbours at distance exactly `2r`.
//!
//! Internally most arithmetic happens on [`Site`], the same point expressed
//! as `(2i + p, 2j + p, k)` with `p = k mod 2`. World coordinates are then
//! `(x·r, y·r, √2·z·r)`, so neighbour offsets and piston axes are small integer
//! vectors and frame construction stays exact.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

/// Integer FCC lattice coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CellPos {
    pub i: i32,
    pub j: i32,
    pub k: i32,
}

impl CellPos {
    pub const fn new(i: i32, j: i32, k: i32) -> Self {
        Self { i, j, k }
    }

    #[inline]
    pub fn parity(self) -> i32 {
        self.k.rem_euclid(2)
    }

    pub fn site(self) -> Site {
        let p = self.parity();
        Site::new(2 * self.i + p, 2 * self.j + p, self.k)
    }

    pub fn offset(self, di: i32, dj: i32, dk: i32) -> Self {
        Self::new(self.i + di, self.j + dj, self.k + dk)
    }
}

impl fmt::Display for CellPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.k)
    }
}

impl From<[i32; 3]> for CellPos {
    fn from(v: [i32; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<CellPos> for [i32; 3] {
    fn from(p: CellPos) -> Self {
        [p.i, p.j, p.k]
    }
}

/// A lattice point (or lattice-relative vector) in doubled in-plane units.
///
/// A site is a cell centre iff `x ≡ y ≡ z (mod 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Site {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Site {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Self { x, y, z }
    }

    /// Cell whose centre is this site, if any.
    pub fn cell(self) -> Option<CellPos> {
        let p = self.z.rem_euclid(2);
        if (self.x - p).rem_euclid(2) != 0 || (self.y - p).rem_euclid(2) != 0 {
            return None;
        }
        Some(CellPos::new((self.x - p) / 2, (self.y - p) / 2, self.z))
    }

    /// Euclidean dot product in units of `r²`.
    #[inline]
    pub fn dot(self, o: Site) -> i32 {
        self.x * o.x + self.y * o.y + 2 * self.z * o.z
    }

    /// World vector in units of `r`.
    pub fn world(self, r: f64) -> [f64; 3] {
        [self.x as f64 * r, self.y as f64 * r, self.z as f64 * SQRT_2 * r]
    }
}

impl Add for Site {
    type Output = Site;
    fn add(self, o: Site) -> Site {
        Site::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Site {
    type Output = Site;
    fn sub(self, o: Site) -> Site {
        Site::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<Site> for i32 {
    type Output = Site;
    fn mul(self, s: Site) -> Site {
        Site::new(self * s.x, self * s.y, self * s.z)
    }
}

/// Site offsets from a cell to its neighbour through connector `P_i`.
///
/// Index `i` matches the connector numbering of the module layout, so
/// `CONNECTOR_OFFSETS[i]` is `2·P_i / r` written in site units.
pub const CONNECTOR_OFFSETS: [Site; 12] = [
    Site::new(2, 0, 0),
    Site::new(0, 2, 0),
    Site::new(1, 1, 1),
    Site::new(-1, 1, 1),
    Site::new(-1, -1, 1),
    Site::new(1, -1, 1),
    Site::new(-2, 0, 0),
    Site::new(0, -2, 0),
    Site::new(-1, -1, -1),
    Site::new(1, -1, -1),
    Site::new(1, 1, -1),
    Site::new(-1, 1, -1),
];

/// Index of the connector on the opposite side of the module.
#[inline]
pub const fn antipode(connector: usize) -> usize {
    (connector + 6) % 12
}

/// One of the six piston translation axes, in world orientation.
///
/// Compass names use `x` as east and `y` as north.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PistonAxis {
    /// `+z`
    Up,
    /// `-z`
    Down,
    /// `(1, 1, 0)/√2`
    NorthEast,
    /// `(-1, -1, 0)/√2`
    SouthWest,
    /// `(-1, 1, 0)/√2`
    NorthWest,
    /// `(1, -1, 0)/√2`
    SouthEast,
}

impl PistonAxis {
    pub const ALL: [PistonAxis; 6] = [
        PistonAxis::Up,
        PistonAxis::Down,
        PistonAxis::NorthEast,
        PistonAxis::SouthWest,
        PistonAxis::NorthWest,
        PistonAxis::SouthEast,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Self {
        use PistonAxis::*;
        match self {
            Up => Down,
            Down => Up,
            NorthEast => SouthWest,
            SouthWest => NorthEast,
            NorthWest => SouthEast,
            SouthEast => NorthWest,
        }
    }

    /// The axis scaled to length `√2·r`, in site units. Twice this vector
    /// reaches the second-nearest cell along the axis.
    pub fn site(self) -> Site {
        use PistonAxis::*;
        match self {
            Up => Site::new(0, 0, 1),
            Down => Site::new(0, 0, -1),
            NorthEast => Site::new(1, 1, 0),
            SouthWest => Site::new(-1, -1, 0),
            NorthWest => Site::new(-1, 1, 0),
            SouthEast => Site::new(1, -1, 0),
        }
    }

    pub fn unit(self) -> [f64; 3] {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        use PistonAxis::*;
        match self {
            Up => [0.0, 0.0, 1.0],
            Down => [0.0, 0.0, -1.0],
            NorthEast => [h, h, 0.0],
            SouthWest => [-h, -h, 0.0],
            NorthWest => [-h, h, 0.0],
            SouthEast => [h, -h, 0.0],
        }
    }

    pub fn from_site(s: Site) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.site() == s)
    }

    // (basis index, sign) in the right-handed orthonormal basis (NE, NW, Up).
    fn basis(self) -> (usize, i32) {
        use PistonAxis::*;
        match self {
            NorthEast => (0, 1),
            SouthWest => (0, -1),
            NorthWest => (1, 1),
            SouthEast => (1, -1),
            Up => (2, 1),
            Down => (2, -1),
        }
    }

    fn from_basis(index: usize, sign: i32) -> Self {
        use PistonAxis::*;
        match (index, sign > 0) {
            (0, true) => NorthEast,
            (0, false) => SouthWest,
            (1, true) => NorthWest,
            (1, false) => SouthEast,
            (2, true) => Up,
            _ => Down,
        }
    }

    /// Exact cross product; `None` when the axes are parallel.
    pub fn cross(self, other: Self) -> Option<Self> {
        let (a, sa) = self.basis();
        let (b, sb) = other.basis();
        if a == b {
            return None;
        }
        let c = 3 - a - b;
        let cyclic = (a + 1) % 3 == b;
        let sign = sa * sb * if cyclic { 1 } else { -1 };
        Some(Self::from_basis(c, sign))
    }

    /// The four connectors surrounding this axis, ascending.
    pub fn connectors(self) -> [usize; 4] {
        let u = self.site();
        let mut out = [0usize; 4];
        let mut n = 0;
        for (idx, off) in CONNECTOR_OFFSETS.iter().enumerate() {
            if off.dot(u) == 2 {
                out[n] = idx;
                n += 1;
            }
        }
        debug_assert_eq!(n, 4);
        out
    }

    pub fn name(self) -> &'static str {
        use PistonAxis::*;
        match self {
            Up => "up",
            Down => "down",
            NorthEast => "ne",
            SouthWest => "sw",
            NorthWest => "nw",
            SouthEast => "se",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }

    /// Render glyph: `+`/`-` vertical, `>`/`<` along NE/SW, `^`/`v` along NW/SE.
    pub fn glyph(self) -> char {
        use PistonAxis::*;
        match self {
            Up => '+',
            Down => '-',
            NorthEast => '>',
            SouthWest => '<',
            NorthWest => '^',
            SouthEast => 'v',
        }
    }
}

impl fmt::Display for PistonAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn world_position(pos: CellPos, r: f64) -> [f64; 3] {
    pos.site().world(r)
}

/// The 12 neighbours of `pos`, in connector order.
pub fn neighbors(pos: CellPos) -> [CellPos; 12] {
    let s = pos.site();
    CONNECTOR_OFFSETS.map(|off| (s + off).cell().expect("connector offsets preserve parity"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotANeighbor {
    pub from: CellPos,
    pub to: CellPos,
}

impl fmt::Display for NotANeighbor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is not adjacent to {}", self.to, self.from)
    }
}

impl core::error::Error for NotANeighbor {}

/// Index of the connector of `pos` facing `nbr`.
pub fn connector_toward(pos: CellPos, nbr: CellPos) -> Result<usize, NotANeighbor> {
    let d = nbr.site() - pos.site();
    CONNECTOR_OFFSETS
        .iter()
        .position(|&o| o == d)
        .ok_or(NotANeighbor { from: pos, to: nbr })
}

pub type ModuleId = u32;

/// Deformation state of one module. At most one piston is compressed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Deformation {
    #[default]
    None,
    Single { axis: PistonAxis, fraction: f64 },
}

impl Deformation {
    pub fn fraction(&self) -> f64 {
        match *self {
            Deformation::None => 0.0,
            Deformation::Single { fraction, .. } => fraction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuleState {
    pub id: ModuleId,
    pub pos: CellPos,
    pub deformation: Deformation,
}

impl ModuleState {
    pub fn new(id: ModuleId, pos: CellPos) -> Self {
        Self { id, pos, deformation: Deformation::None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigError {
    DuplicateCell(CellPos),
    DuplicateId(ModuleId),
    InvalidId(ModuleId),
    Disconnected,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::DuplicateCell(p) => write!(f, "two modules share cell {p}"),
            ConfigError::DuplicateId(id) => write!(f, "module id {id} used twice"),
            ConfigError::InvalidId(id) => write!(f, "module id {id} is not a positive integer"),
            ConfigError::Disconnected => f.write_str("configuration is not connected"),
        }
    }
}

impl core::error::Error for ConfigError {}

/// Occupied cells of the lattice and the modules sitting in them.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    radius: f64,
    modules: BTreeMap<CellPos, ModuleState>,
    ids: BTreeMap<ModuleId, CellPos>,
}

impl Configuration {
    pub fn new(radius: f64) -> Self {
        Self { radius, modules: BTreeMap::new(), ids: BTreeMap::new() }
    }

    /// Builds a configuration, rejecting shared cells, repeated ids and
    /// disconnected layouts.
    pub fn from_modules<I>(radius: f64, modules: I) -> Result<Self, ConfigError>
    where
        I: IntoIterator<Item = (ModuleId, CellPos)>,
    {
        let mut cfg = Self::new(radius);
        for (id, pos) in modules {
            cfg.insert(ModuleState::new(id, pos))?;
        }
        if !cfg.is_connected() {
            return Err(ConfigError::Disconnected);
        }
        Ok(cfg)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn insert(&mut self, module: ModuleState) -> Result<(), ConfigError> {
        if module.id == 0 {
            return Err(ConfigError::InvalidId(module.id));
        }
        if self.modules.contains_key(&module.pos) {
            return Err(ConfigError::DuplicateCell(module.pos));
        }
        if self.ids.contains_key(&module.id) {
            return Err(ConfigError::DuplicateId(module.id));
        }
        self.ids.insert(module.id, module.pos);
        self.modules.insert(module.pos, module);
        Ok(())
    }

    pub fn remove(&mut self, pos: CellPos) -> Option<ModuleState> {
        let m = self.modules.remove(&pos)?;
        self.ids.remove(&m.id);
        Some(m)
    }

    pub fn get(&self, pos: CellPos) -> Option<&ModuleState> {
        self.modules.get(&pos)
    }

    pub fn get_mut(&mut self, pos: CellPos) -> Option<&mut ModuleState> {
        self.modules.get_mut(&pos)
    }

    #[inline]
    pub fn is_occupied(&self, pos: CellPos) -> bool {
        self.modules.contains_key(&pos)
    }

    pub fn position_of(&self, id: ModuleId) -> Option<CellPos> {
        self.ids.get(&id).copied()
    }

    pub fn module(&self, id: ModuleId) -> Option<&ModuleState> {
        self.position_of(id).and_then(|p| self.modules.get(&p))
    }

    /// Modules in cell order.
    pub fn modules(&self) -> impl Iterator<Item = &ModuleState> {
        self.modules.values()
    }

    pub fn cells(&self) -> impl Iterator<Item = CellPos> + '_ {
        self.modules.keys().copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = ModuleId> + '_ {
        self.ids.keys().copied()
    }

    pub fn occupied_neighbors(&self, pos: CellPos) -> impl Iterator<Item = CellPos> + '_ {
        neighbors(pos).into_iter().filter(move |n| self.is_occupied(*n))
    }

    pub fn clear_deformations(&mut self) {
        for m in self.modules.values_mut() {
            m.deformation = Deformation::None;
        }
    }

    /// Moves the module at `from` to the empty cell `to`.
    pub(crate) fn relocate(&mut self, from: CellPos, to: CellPos) -> bool {
        if self.is_occupied(to) {
            return false;
        }
        let Some(mut m) = self.modules.remove(&from) else {
            return false;
        };
        m.pos = to;
        self.ids.insert(m.id, to);
        self.modules.insert(to, m);
        true
    }

    /// True iff the occupied cells form one 12-connected component.
    pub fn is_connected(&self) -> bool {
        self.is_connected_without(None)
    }

    pub(crate) fn is_connected_without(&self, skip: Option<CellPos>) -> bool {
        let total = self.modules.len() - usize::from(skip.is_some_and(|s| self.is_occupied(s)));
        let Some(start) = self.cells().find(|c| Some(*c) != skip) else {
            return true;
        };
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start);
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            for n in self.occupied_neighbors(c) {
                if Some(n) != skip && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.len() == total
    }

    /// Unoccupied cells adjacent to at least one module.
    pub fn free_surface_cells(&self) -> BTreeSet<CellPos> {
        let mut out = BTreeSet::new();
        for c in self.cells() {
            for n in neighbors(c) {
                if !self.is_occupied(n) {
                    out.insert(n);
                }
            }
        }
        out
    }

    /// Inclusive `(min, max)` corners of the occupied bounding box.
    pub fn bounds(&self) -> Option<(CellPos, CellPos)> {
        let mut it = self.cells();
        let first = it.next()?;
        let (mut lo, mut hi) = (first, first);
        for c in it {
            lo = CellPos::new(lo.i.min(c.i), lo.j.min(c.j), lo.k.min(c.k));
            hi = CellPos::new(hi.i.max(c.i), hi.j.max(c.j), hi.k.max(c.k));
        }
        Some((lo, hi))
    }
}

/// Free-standing form of [`Configuration::is_connected`].
pub fn is_connected(config: &Configuration) -> bool {
    config.is_connected()
}

pub fn free_surface_cells(config: &Configuration) -> BTreeSet<CellPos> {
    config.free_surface_cells()
}

/// Collects cells into a vector in canonical order.
pub fn sorted_cells<I: IntoIterator<Item = CellPos>>(cells: I) -> Vec<CellPos> {
    let mut v: Vec<CellPos> = cells.into_iter().collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
        libm::sqrt((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2))
    }

    #[test]
    fn world_position_convention() {
        assert_eq!(world_position(CellPos::new(0, 0, 0), 1.0), [0.0, 0.0, 0.0]);
        let p = world_position(CellPos::new(0, 0, 1), 1.0);
        assert_eq!(&p[..2], &[1.0, 1.0]);
        assert!((p[2] - SQRT_2).abs() < 1e-15);
        assert_eq!(world_position(CellPos::new(1, 0, 0), 1.0), [2.0, 0.0, 0.0]);
        // negative odd plane keeps the same shift
        let q = world_position(CellPos::new(0, 0, -1), 1.0);
        assert_eq!(&q[..2], &[1.0, 1.0]);
    }

    #[test]
    fn neighbor_offsets_by_parity() {
        let even = neighbors(CellPos::new(0, 0, 0));
        let up: BTreeSet<_> = even.iter().filter(|c| c.k == 1).copied().collect();
        let expect: BTreeSet<_> = [(0, 0, 1), (-1, 0, 1), (0, -1, 1), (-1, -1, 1)]
            .into_iter()
            .map(|(a, b, c)| CellPos::new(a, b, c))
            .collect();
        assert_eq!(up, expect);

        let odd = neighbors(CellPos::new(0, 0, 1));
        let up: BTreeSet<_> = odd.iter().filter(|c| c.k == 2).copied().collect();
        let expect: BTreeSet<_> = [(0, 0, 2), (1, 0, 2), (0, 1, 2), (1, 1, 2)]
            .into_iter()
            .map(|(a, b, c)| CellPos::new(a, b, c))
            .collect();
        assert_eq!(up, expect);
    }

    #[test]
    fn connector_toward_matches_layout() {
        let o = CellPos::new(0, 0, 0);
        assert_eq!(connector_toward(o, CellPos::new(1, 0, 0)), Ok(0));
        assert_eq!(connector_toward(o, CellPos::new(0, 0, 1)), Ok(2));
        assert!(connector_toward(o, CellPos::new(2, 0, 0)).is_err());
        for (idx, n) in neighbors(o).iter().enumerate() {
            assert_eq!(connector_toward(o, *n), Ok(idx));
            assert_eq!(connector_toward(*n, o), Ok(antipode(idx)));
        }
    }

    #[test]
    fn neighbor_distance_is_two_r() {
        for pos in [CellPos::new(3, -2, 0), CellPos::new(-1, 4, 5), CellPos::new(0, 0, -3)] {
            let w = world_position(pos, 1.5);
            for n in neighbors(pos) {
                assert!((dist(w, world_position(n, 1.5)) - 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn axis_cross_products() {
        use PistonAxis::*;
        assert_eq!(NorthEast.cross(NorthWest), Some(Up));
        assert_eq!(NorthWest.cross(Up), Some(NorthEast));
        assert_eq!(Up.cross(NorthEast), Some(NorthWest));
        assert_eq!(NorthWest.cross(NorthEast), Some(Down));
        assert_eq!(Up.cross(Down), None);
        // agree with the floating-point cross product
        for a in PistonAxis::ALL {
            for b in PistonAxis::ALL {
                let (ua, ub) = (a.unit(), b.unit());
                let c = [
                    ua[1] * ub[2] - ua[2] * ub[1],
                    ua[2] * ub[0] - ua[0] * ub[2],
                    ua[0] * ub[1] - ua[1] * ub[0],
                ];
                match a.cross(b) {
                    Some(x) => assert!(dist(c, x.unit()) < 1e-12, "{a} x {b}"),
                    None => assert!(dist(c, [0.0; 3]) < 1e-12),
                }
            }
        }
    }

    #[test]
    fn axis_groups() {
        assert_eq!(PistonAxis::Up.connectors(), [2, 3, 4, 5]);
        assert_eq!(PistonAxis::NorthEast.connectors(), [0, 1, 2, 10]);
    }

    #[test]
    fn connectivity_and_surface() {
        let pair = Configuration::from_modules(
            1.0,
            [(1, CellPos::new(0, 0, 0)), (2, CellPos::new(1, 0, 0))],
        )
        .unwrap();
        assert!(pair.is_connected());
        assert_eq!(pair.free_surface_cells().len(), 18);

        let far = Configuration::from_modules(
            1.0,
            [(1, CellPos::new(0, 0, 0)), (2, CellPos::new(3, 0, 0))],
        );
        assert_eq!(far, Err(ConfigError::Disconnected));

        let empty = Configuration::new(1.0);
        assert!(empty.is_connected());
        assert!(empty.free_surface_cells().is_empty());

        let dup = Configuration::from_modules(
            1.0,
            [(1, CellPos::new(0, 0, 0)), (2, CellPos::new(0, 0, 0))],
        );
        assert_eq!(dup, Err(ConfigError::DuplicateCell(CellPos::new(0, 0, 0))));
    }

    #[test]
    fn site_cell_round_trip() {
        for i in -3..3 {
            for j in -3..3 {
                for k in -3..3 {
                    let c = CellPos::new(i, j, k);
                    assert_eq!(c.site().cell(), Some(c));
                }
            }
        }
        assert_eq!(Site::new(1, 1, 0).cell(), None);
        assert_eq!(Site::new(1, 0, 1).cell(), None);
    }
}
