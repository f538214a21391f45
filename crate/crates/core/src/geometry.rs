//! Dimensions and 1-DOF deformation kinematics of a single module.
//!
//! All lengths scale linearly with the module radius `r`. The connector width
//! `c`, link length `e` and piston amplitude `a` follow from requiring the
//! four connectors around a compressed piston to line up on one face.
//!
//! The linkage is modelled in the plane spanned by a connector centre `P_i`
//! and its piston axis `u`. The connector pivots about `P_i`; its joint sits at
//! lever arm `c` from the pivot. A rigid link of length `e` couples that joint
//! to the piston edge, and the piston translates along `-u` by `d ∈ [0, a]`.
//! At rest the link is collinear with the piston; fully compressed it is
//! perpendicular to both the piston and the (rotated) connector.

use core::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use core::fmt;

use crate::lattice::PistonAxis;

const THREE_SQRT2_MINUS_ONE: f64 = 3.0 * SQRT_2 - 1.0;

/// `c / r` for the theoretical (zero-thickness) module.
pub const CONNECTOR_RATIO: f64 = 2.0 / THREE_SQRT2_MINUS_ONE;
/// `e / r` for the theoretical module.
pub const LINK_RATIO: f64 = (2.0 - SQRT_2) / THREE_SQRT2_MINUS_ONE;

/// How the corrected radius accounts for part thickness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThicknessConvention {
    /// `r' = r - t/2`. Gives `t < 0.165685·r`.
    #[default]
    Strict,
    /// `r' = r + t/2`. Gives `t < 0.19859·r`.
    Compat,
}

impl ThicknessConvention {
    fn corrected_radius(self, r: f64, t: f64) -> f64 {
        match self {
            ThicknessConvention::Strict => r - t / 2.0,
            ThicknessConvention::Compat => r + t / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryError {
    InvalidInput { r: f64, t: f64 },
    ThicknessTooLarge { t: f64, limit: f64 },
    FractionOutOfRange(f64),
    NoSolution { fraction: f64 },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::InvalidInput { r, t } => {
                write!(f, "radius must be > 0 and thickness >= 0 (got r={r}, t={t})")
            }
            GeometryError::ThicknessTooLarge { t, limit } => {
                write!(f, "thickness {t} is not below the link length bound {limit}")
            }
            GeometryError::FractionOutOfRange(x) => write!(f, "fraction {x} outside [0, 1]"),
            GeometryError::NoSolution { fraction } => {
                write!(f, "linkage has no closure at fraction {fraction}")
            }
        }
    }
}

impl core::error::Error for GeometryError {}

/// Every derived dimension of one module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatomParams {
    pub r: f64,
    pub t: f64,
    pub c: f64,
    pub e: f64,
    pub a: f64,
    pub r_corr: f64,
    pub c_corr: f64,
    pub e_corr: f64,
    /// Edge of the central cube, `c - t`.
    pub core_edge: f64,
    pub convention: ThicknessConvention,
}

impl DatomParams {
    /// Piston travel used by the linkage: the corrected connector width.
    pub fn amplitude_corr(&self) -> f64 {
        self.c_corr
    }
}

pub fn derive_params(r: f64, t: f64) -> Result<DatomParams, GeometryError> {
    derive_params_with(r, t, ThicknessConvention::Strict)
}

pub fn derive_params_with(
    r: f64,
    t: f64,
    convention: ThicknessConvention,
) -> Result<DatomParams, GeometryError> {
    if !(r.is_finite() && t.is_finite()) || r <= 0.0 || t < 0.0 {
        return Err(GeometryError::InvalidInput { r, t });
    }
    let c = CONNECTOR_RATIO * r;
    let e = LINK_RATIO * r;
    let r_corr = convention.corrected_radius(r, t);
    let c_corr = CONNECTOR_RATIO * r_corr;
    let e_corr = LINK_RATIO * r_corr;
    if t > 0.0 && t >= e_corr {
        return Err(GeometryError::ThicknessTooLarge { t, limit: max_thickness(r, convention) });
    }
    Ok(DatomParams {
        r,
        t,
        c,
        e,
        a: c,
        r_corr,
        c_corr,
        e_corr,
        core_edge: c - t,
        convention,
    })
}

/// Largest thickness for which `t < e'` still holds (the bound itself is
/// excluded). Solves `t = LINK_RATIO·r'(t)` in closed form.
pub fn max_thickness(r: f64, convention: ThicknessConvention) -> f64 {
    match convention {
        ThicknessConvention::Strict => LINK_RATIO * r / (1.0 + LINK_RATIO / 2.0),
        ThicknessConvention::Compat => LINK_RATIO * r / (1.0 - LINK_RATIO / 2.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ring {
    Equatorial,
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectorLayout {
    pub positions: [[f64; 3]; 12],
    pub ring: [Ring; 12],
}

pub fn connector_layout(r: f64) -> ConnectorLayout {
    let h = r / 2.0;
    let z = r * FRAC_1_SQRT_2;
    let positions = [
        [r, 0.0, 0.0],
        [0.0, r, 0.0],
        [h, h, z],
        [-h, h, z],
        [-h, -h, z],
        [h, -h, z],
        [-r, 0.0, 0.0],
        [0.0, -r, 0.0],
        [-h, -h, -z],
        [h, -h, -z],
        [h, h, -z],
        [-h, h, -z],
    ];
    let ring = core::array::from_fn(|i| match i {
        0 | 1 | 6 | 7 => Ring::Equatorial,
        2..=5 => Ring::Upper,
        _ => Ring::Lower,
    });
    ConnectorLayout { positions, ring }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PistonGroup {
    pub axis: PistonAxis,
    pub connectors: [usize; 4],
}

/// The six pistons and the four connectors each one drives.
///
/// Computed from the connector layout: a connector belongs to an axis when it
/// sits 45° away from it.
pub fn piston_groups() -> [PistonGroup; 6] {
    let layout = connector_layout(1.0);
    PistonAxis::ALL.map(|axis| {
        let u = axis.unit();
        let mut connectors = [0usize; 4];
        let mut n = 0;
        for (i, p) in layout.positions.iter().enumerate() {
            if dot(*p, u) > 0.5 {
                connectors[n] = i;
                n += 1;
            }
        }
        debug_assert_eq!(n, 4);
        PistonGroup { axis, connectors }
    })
}

/// Planar state of the linkage at a given compression fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkagePose {
    pub fraction: f64,
    pub piston_displacement: f64,
    /// Rotation of each driven connector about its pivot, degrees.
    pub connector_angle: f64,
    /// Fixed-link / connector joint, degrees.
    pub angle_p0: f64,
    /// Link / connector joint, degrees.
    pub angle_q0: f64,
    /// Link / piston joint, degrees.
    pub angle_q1: f64,
}

/// Planar linkage points in the `(x, y)` plane of connector 0 and the NE piston.
#[derive(Debug, Clone, Copy)]
struct Linkage {
    pivot: [f64; 2],
    lever: f64,
    link: f64,
    amplitude: f64,
    piston_rest: [f64; 2],
}

const U2: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
const V2: [f64; 2] = [-FRAC_1_SQRT_2, FRAC_1_SQRT_2];

impl Linkage {
    fn new(p: &DatomParams) -> Self {
        let pivot = [p.r_corr, 0.0];
        let lever = p.c_corr;
        let link = p.e_corr;
        let joint_rest = [pivot[0], pivot[1] + lever];
        let piston_rest = [joint_rest[0] + link * V2[0], joint_rest[1] + link * V2[1]];
        Self { pivot, lever, link, amplitude: p.amplitude_corr(), piston_rest }
    }

    fn piston_joint(&self, d: f64) -> [f64; 2] {
        [self.piston_rest[0] - d * U2[0], self.piston_rest[1] - d * U2[1]]
    }

    fn connector_joint(&self, theta: f64) -> [f64; 2] {
        [
            self.pivot[0] - self.lever * libm::sin(theta),
            self.pivot[1] + self.lever * libm::cos(theta),
        ]
    }

    /// Connector rotation closing the loop at displacement `d`, on the branch
    /// through `θ = 0` at rest.
    fn solve(&self, d: f64) -> Option<f64> {
        let jp = self.piston_joint(d);
        let dx = jp[0] - self.pivot[0];
        let dy = jp[1] - self.pivot[1];
        let rho = libm::hypot(dx, dy);
        let cos = (self.lever * self.lever + rho * rho - self.link * self.link)
            / (2.0 * self.lever * rho);
        const SLACK: f64 = 1e-12;
        if !(-1.0 - SLACK..=1.0 + SLACK).contains(&cos) {
            return None;
        }
        let alpha = libm::atan2(dy, dx);
        // joint direction is θ + 90°; rest closes on the `-acos` side
        let phi = alpha - libm::acos(cos.clamp(-1.0, 1.0));
        Some(wrap_pi(phi - core::f64::consts::FRAC_PI_2))
    }
}

fn wrap_pi(x: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut y = x % two_pi;
    if y > core::f64::consts::PI {
        y -= two_pi;
    } else if y < -core::f64::consts::PI {
        y += two_pi;
    }
    y
}

pub fn linkage_pose(params: &DatomParams, fraction: f64) -> Result<LinkagePose, GeometryError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(GeometryError::FractionOutOfRange(fraction));
    }
    let lk = Linkage::new(params);
    let d = fraction * lk.amplitude;
    let theta = lk.solve(d).ok_or(GeometryError::NoSolution { fraction })?;
    let jc = lk.connector_joint(theta);
    let jp = lk.piston_joint(d);
    // link direction, piston -> connector; rest direction is -v (i.e. -45°)
    let link_dir = libm::atan2(jc[1] - jp[1], jc[0] - jp[0]);
    let link_turn = wrap_pi(link_dir + core::f64::consts::FRAC_PI_4);
    let theta_deg = theta.to_degrees();
    let turn_deg = link_turn.to_degrees();
    Ok(LinkagePose {
        fraction,
        piston_displacement: d,
        connector_angle: theta_deg,
        angle_p0: -135.0 + theta_deg,
        angle_q0: -135.0 + turn_deg - theta_deg,
        angle_q1: 180.0 - turn_deg,
    })
}

/// `|Q0 - Q1| - e` for a pose: zero when the rigid link closes.
pub fn link_residual(params: &DatomParams, pose: &LinkagePose) -> f64 {
    let lk = Linkage::new(params);
    let jc = lk.connector_joint(pose.connector_angle.to_radians());
    let jp = lk.piston_joint(pose.piston_displacement);
    libm::hypot(jc[0] - jp[0], jc[1] - jp[1]) - lk.link
}

/// Outcome of the face-alignment check of a fully compressed module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentReport {
    /// The four driven connectors end up with normal `u` on one plane.
    pub coplanar: bool,
    /// Diagonal span `ℓ` of the two in-plane connectors at rest.
    pub span: f64,
    pub three_widths: f64,
    pub aligned: bool,
}

/// Whether compressing one piston lines its four connectors up on a common
/// face whose diagonal holds exactly three connector widths (`ℓ = 3c`).
pub fn aligned_connector_check(params: &DatomParams) -> bool {
    alignment_report(params).is_some_and(|r| r.aligned)
}

pub fn alignment_report(params: &DatomParams) -> Option<AlignmentReport> {
    const TOL: f64 = 1e-9;
    let pose = linkage_pose(params, 1.0).ok()?;
    let r = params.r_corr;
    let c = params.c_corr;
    let theta = pose.connector_angle.to_radians();
    let layout = connector_layout(r);
    let axis = PistonAxis::NorthEast;
    let u = axis.unit();

    let mut coplanar = true;
    let mut offsets = [0.0f64; 4];
    for (n, &idx) in axis.connectors().iter().enumerate() {
        let p = layout.positions[idx];
        let pn = scale(p, 1.0 / norm(p));
        // rotate the connector normal towards u about pn × u
        let k = cross(pn, u);
        let k = scale(k, 1.0 / norm(k));
        let kp = cross(k, pn);
        let normal = add(scale(pn, libm::cos(theta)), scale(kp, libm::sin(theta)));
        coplanar &= (dot(normal, u) - 1.0).abs() < TOL;
        offsets[n] = dot(p, u);
    }
    coplanar &= offsets.iter().all(|o| (o - offsets[0]).abs() < TOL * params.r);

    // rest corners of connectors 0 and 1 projected on the in-plane diagonal
    let v = [-FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];
    let corners = [
        [layout.positions[0][0], c / 2.0, 0.0],
        [layout.positions[0][0], -c / 2.0, 0.0],
        [c / 2.0, layout.positions[1][1], 0.0],
        [-c / 2.0, layout.positions[1][1], 0.0],
    ];
    let (lo, hi) = corners.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let s = dot(*p, v);
        (lo.min(s), hi.max(s))
    });
    let span = hi - lo;
    let three_widths = 3.0 * c;
    let aligned = coplanar && (span - three_widths).abs() < TOL * params.r;
    Some(AlignmentReport { coplanar, span, three_widths, aligned })
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    libm::sqrt(dot(a, a))
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
