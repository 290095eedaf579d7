//! Plane lattices, reduction to the moduli space `M`, and the flat-torus
//! invariants that seed every certification rule.
//!
//! A flat torus is `R^2 / Gamma` for a rank-2 lattice `Gamma`. Up to rotation,
//! scaling and reflection every such torus is `scale * Gamma_{xy}` for exactly
//! one point of
//!
//! ```text
//! M = { (x, y) : 0 <= x <= 1/2, y > 0, x^2 + y^2 >= 1 }
//! ```
//!
//! where `Gamma_{xy}` is spanned by `(1, 0)` and `(x, y)`. For a reduced point
//! the first generator realizes the flat systole, the flat area is `scale^2 y`,
//! and the scale-invariant ratio `V = area / sys^2` equals `y`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance for the `x^2 + y^2 >= 1` constraint of `M`: double-precision
/// Gauss reduction can land this far inside the unit circle on boundary ties.
pub const EPS_MOD: f64 = 1e-9;

/// A rank-2 lattice in the plane, spanned by `v1` and `v2`.
///
/// Orientation is normalized on construction so that `det(v1, v2) > 0`;
/// a degenerate pair is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub v1: [f64; 2],
    pub v2: [f64; 2],
}

fn det2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm2(a: [f64; 2]) -> f64 {
    dot2(a, a)
}

impl Lattice {
    /// Builds a lattice from two spanning vectors, flipping `v2` if needed so
    /// the basis is positively oriented.
    pub fn new(v1: [f64; 2], v2: [f64; 2]) -> Result<Self> {
        if !(v1.iter().chain(&v2).all(|t| t.is_finite())) {
            return Err(Error::DegenerateLattice);
        }
        let d = det2(v1, v2);
        let scale2 = norm2(v1).max(norm2(v2));
        if scale2 == 0.0 || d.abs() <= 1e-12 * scale2 {
            return Err(Error::DegenerateLattice);
        }
        let v2 = if d > 0.0 { v2 } else { [-v2[0], -v2[1]] };
        Ok(Lattice { v1, v2 })
    }

    /// Signed area of the fundamental parallelogram (positive by construction).
    pub fn det(&self) -> f64 {
        det2(self.v1, self.v2)
    }
}

/// A reduced conformal class: the point `(x, y)` of `M` together with the
/// length `scale` of the first reduced generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModuliPoint", into = "RawModuliPoint")]
pub struct ModuliPoint {
    x: f64,
    y: f64,
    scale: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawModuliPoint {
    x: f64,
    y: f64,
    scale: f64,
}

impl From<ModuliPoint> for RawModuliPoint {
    fn from(m: ModuliPoint) -> Self {
        RawModuliPoint { x: m.x, y: m.y, scale: m.scale }
    }
}

impl TryFrom<RawModuliPoint> for ModuliPoint {
    type Error = Error;
    fn try_from(r: RawModuliPoint) -> Result<Self> {
        ModuliPoint::new(r.x, r.y, r.scale)
    }
}

impl ModuliPoint {
    /// Validates membership in `M` (up to [`EPS_MOD`] on the circle) and a
    /// positive scale.
    pub fn new(x: f64, y: f64, scale: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && scale.is_finite()) {
            return Err(Error::InvalidModuli("non-finite component".into()));
        }
        if !(0.0..=0.5 + 1e-12).contains(&x) {
            return Err(Error::InvalidModuli(format!("x = {x} outside [0, 1/2]")));
        }
        if y <= 0.0 {
            return Err(Error::InvalidModuli(format!("y = {y} must be positive")));
        }
        if x * x + y * y < 1.0 - EPS_MOD {
            return Err(Error::InvalidModuli(format!(
                "(x, y) = ({x}, {y}) lies inside the unit circle"
            )));
        }
        if scale <= 0.0 {
            return Err(Error::InvalidModuli(format!("scale = {scale} must be positive")));
        }
        Ok(ModuliPoint { x: x.min(0.5), y, scale })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The lattice `scale * Gamma_{xy}` this point stands for.
    pub fn lattice(&self) -> Lattice {
        Lattice {
            v1: [self.scale, 0.0],
            v2: [self.scale * self.x, self.scale * self.y],
        }
    }

    /// Area of the flat torus, `scale^2 * y`.
    pub fn flat_area(&self) -> f64 {
        self.scale * self.scale * self.y
    }
}

/// The known unconditionally certified regions of moduli space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuliRegion {
    /// `y <= 1`.
    LiYau,
    /// `(x - 1/2)^2 + (y - 1)^2 <= 1/4`.
    MontielRos,
    /// Neither region; certification needs a metric-dependent rule.
    General,
}

impl std::fmt::Display for ModuliRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModuliRegion::LiYau => "li_yau",
            ModuliRegion::MontielRos => "montiel_ros",
            ModuliRegion::General => "general",
        })
    }
}

/// Reduces an arbitrary lattice to its point in `M`.
///
/// Gauss reduction: keep the shorter vector first and subtract integer
/// multiples of it from the second until the basis is reduced. The result is
/// normalized with `y > 0` (reflecting if necessary) and `0 <= x <= 1/2`
/// (both signs of `x` describe the same unoriented conformal class).
pub fn reduce(lattice: &Lattice) -> Result<ModuliPoint> {
    let mut b1 = lattice.v1;
    let mut b2 = lattice.v2;
    if det2(b1, b2).abs() <= 1e-12 * norm2(b1).max(norm2(b2)) {
        return Err(Error::DegenerateLattice);
    }
    for _ in 0..64 {
        if norm2(b2) < norm2(b1) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = (dot2(b2, b1) / norm2(b1)).round();
        if mu == 0.0 {
            break;
        }
        let cand = [b2[0] - mu * b1[0], b2[1] - mu * b1[1]];
        if norm2(cand) >= norm2(b2) {
            // Half-integer projection tie (x = 1/2 exactly); both
            // representatives fold onto the same moduli point.
            break;
        }
        b2 = cand;
    }
    let scale = norm2(b1).sqrt();
    let x = (dot2(b2, b1) / norm2(b1)).abs();
    let y = (det2(b1, b2) / norm2(b1)).abs();
    // Snap reduction roundoff onto the domain before validating.
    let x = x.clamp(0.0, 0.5);
    ModuliPoint::new(x, y, scale)
}

/// Length of the shortest nonzero lattice vector, `scale * 1` for a reduced
/// class. Computed by enumeration rather than trusting reducedness.
pub fn flat_systole(m: &ModuliPoint) -> f64 {
    let lat = m.lattice();
    let mut best = f64::INFINITY;
    for k in -2i32..=2 {
        for l in -2i32..=2 {
            if k == 0 && l == 0 {
                continue;
            }
            let v = [
                k as f64 * lat.v1[0] + l as f64 * lat.v2[0],
                k as f64 * lat.v1[1] + l as f64 * lat.v2[1],
            ];
            best = best.min(norm2(v).sqrt());
        }
    }
    best
}

/// `V = area / sys^2` of the flat torus; equals `y` on `M`.
pub fn flat_v(m: &ModuliPoint) -> f64 {
    let sys = flat_systole(m);
    m.flat_area() / (sys * sys)
}

/// Region classification with the fixed precedence Li-Yau before Montiel-Ros
/// (the two overlap near `(x, 1)` for `y <= 1`).
pub fn classify_region(m: &ModuliPoint) -> ModuliRegion {
    if m.y <= 1.0 {
        ModuliRegion::LiYau
    } else if (m.x - 0.5).powi(2) + (m.y - 1.0).powi(2) <= 0.25 {
        ModuliRegion::MontielRos
    } else {
        ModuliRegion::General
    }
}
