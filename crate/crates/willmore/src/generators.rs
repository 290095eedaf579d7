//! Generators for the classical cylindrical and conical metrics, random
//! trigonometric test metrics, and radial disk fields.
//!
//! # Cones in log-radius
//!
//! A cone of opening angle `beta` has conformal factor `u = a + b log r`
//! with `b = sin(beta) - 1`; `beta = 0` is the cylinder (`b = -1`) and
//! `beta = pi/2` the degenerate flat limit (`b = 0`). Writing `s = log r`
//! and `U(s) = u(e^s)`, the whole construction is piecewise linear in `s`:
//!
//! ```text
//!   lid        cap          wall           socket        flat
//!  U' = 0 | 0 -> b ramp | U' = b      | b -> 0 ramp | U = 0
//!         s1           s2            s3            s4 = log(2R)
//! ```
//!
//! The ramps are quintic smoothsteps, so `u` is C^2 everywhere and the key
//! integrals are exact: `int |K| darea = 2 pi int |U''| ds = 4 pi |b|
//! = 4 pi (1 - sin beta)` whatever the widths, and `osc u = |b| (W +
//! (d_cap + d_sock)/2)` where `W = s3 - s2` is the wall width. The wall
//! carries the cone's 3-d radii: chart log-width `W = log(R/rho)/sin(beta)`,
//! degenerating to `H/R` for the cylinder, which realizes the oscillation
//! lower bounds `osc u >= (1/sin(beta) - 1) log(R/rho)` and `osc u >= H/R`.
//!
//! Mollifier widths are specified as radial widths: the socket band spans
//! `[2R - smoothing, 2R]` and the cap band has the same radial width at its
//! own (much smaller) radius, clamped to half that radius so arbitrarily
//! deep cones remain constructible. The clamp and the band-resolution count
//! are reported in [`ConeSummary`] so under-resolved setups are visible.
//!
//! The oscillation family holds the carrier lattice fixed, doubles `osc u`
//! exactly at each step by solving for the wall width, and rescales the
//! support radius so the area excess (hence the area) is exactly constant;
//! `K_1` is width-independent and the systole never moves because `u >= 0`
//! vanishes near the systolic loops. Oscillation is thus unbounded at fixed
//! `K_1`, area, and systole.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{ScalarField, TorusGrid};
use crate::geometry::ConformalTorusMetric;
use crate::moduli::{self, ModuliPoint};
use crate::quad::adaptive_simpson;
use crate::{Error, Result};

/// Quintic smoothstep: C^2 ramp from `(0, 0)` to `(1, 1)` with vanishing
/// first and second derivatives at both ends. The construction itself only
/// needs the antiderivative [`i5`]; the ramp and its derivative back the
/// mollifier identity tests.
#[cfg(test)]
fn s5(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

/// Antiderivative of the quintic smoothstep, with `I5(0) = 0`;
/// `I5(1) = 1/2`.
fn i5(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        t - 0.5
    } else {
        let t4 = t * t * t * t;
        t4 * (2.5 + t * (-3.0 + t))
    }
}

/// Derivative of the quintic smoothstep.
#[cfg(test)]
fn s5d(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

/// A truncated cone (or cylinder) feature to be carved into a flat torus.
///
/// `r_outer` and `height` are the 3-d outer radius `R` and height `H` of the
/// truncated cone; its top radius is `rho = R - H sin(beta) > 0`. The
/// feature occupies the chart disk of radius `2 r_outer` around `center`
/// (given as lattice fractions and snapped to the nearest grid point), and
/// every mollifier band is `smoothing` wide in chart radius, clamped at the
/// cap as described in the module docs.
#[derive(Debug, Clone, Copy)]
pub struct ConeSpec {
    pub lattice: ModuliPoint,
    pub n1: usize,
    pub n2: usize,
    pub r_outer: f64,
    pub height: f64,
    pub beta: f64,
    /// Feature center as lattice fractions in `[0, 1)^2`.
    pub center: [f64; 2],
    pub smoothing: f64,
}

impl ConeSpec {
    /// Validates `R > 0`, `H > 0`, `beta` in `[0, pi/2]`, `rho > 0` and
    /// `0 < smoothing < R`. The fit against the torus is checked at
    /// generation time, when the grid is known to be needed.
    pub fn new(
        lattice: ModuliPoint,
        n1: usize,
        n2: usize,
        r_outer: f64,
        height: f64,
        beta: f64,
        smoothing: f64,
    ) -> Result<Self> {
        if !(r_outer > 0.0) || !r_outer.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cone radius must be positive, got {r_outer}"
            )));
        }
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cone height must be positive, got {height}"
            )));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&beta) {
            return Err(Error::InvalidInput(format!(
                "opening angle must lie in [0, pi/2], got {beta}"
            )));
        }
        let rho = r_outer - height * beta.sin();
        if !(rho > 0.0) {
            return Err(Error::InvalidInput(format!(
                "top radius rho = R - H sin(beta) must be positive, got {rho}"
            )));
        }
        if !(smoothing > 0.0 && smoothing < r_outer) {
            return Err(Error::InvalidInput(format!(
                "smoothing must lie in (0, R), got {smoothing}"
            )));
        }
        Ok(ConeSpec {
            lattice,
            n1,
            n2,
            r_outer,
            height,
            beta,
            center: [0.5, 0.5],
            smoothing,
        })
    }

    /// Same validation, but the height is given through the shape ratio:
    /// `R/rho` for a cone (`beta > 0`, ratio > 1) or `H/R` for a cylinder
    /// (`beta = 0`, ratio > 0).
    pub fn from_ratio(
        lattice: ModuliPoint,
        n1: usize,
        n2: usize,
        r_outer: f64,
        ratio: f64,
        beta: f64,
        smoothing: f64,
    ) -> Result<Self> {
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "shape ratio must be positive, got {ratio}"
            )));
        }
        let sb = beta.sin();
        let height = if sb > 0.0 {
            if ratio <= 1.0 {
                return Err(Error::InvalidInput(format!(
                    "cone ratio R/rho must exceed 1, got {ratio}"
                )));
            }
            r_outer * (1.0 - 1.0 / ratio) / sb
        } else {
            r_outer * ratio
        };
        ConeSpec::new(lattice, n1, n2, r_outer, height, beta, smoothing)
    }

    /// Moves the feature center (lattice fractions, wrapped into `[0, 1)`).
    pub fn with_center(mut self, center: [f64; 2]) -> Self {
        self.center = [center[0].rem_euclid(1.0), center[1].rem_euclid(1.0)];
        self
    }

    /// Top radius `rho = R - H sin(beta)` of the truncated cone.
    pub fn rho(&self) -> f64 {
        self.r_outer - self.height * self.beta.sin()
    }

    /// Chart log-width of the wall, `log(R/rho)/sin(beta)`, continued by its
    /// limit `H/R` at `beta = 0`.
    pub fn wall_log_width(&self) -> f64 {
        let sb = self.beta.sin();
        if sb < 1e-12 {
            self.height / self.r_outer
        } else {
            -(-self.height * sb / self.r_outer).ln_1p() / sb
        }
    }
}

/// The radial profile `U(s)`, `s = log r`, of a cone feature.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialProfile {
    b: f64,
    s1: f64,
    s2: f64,
    s3: f64,
    s4: f64,
    d_cap: f64,
    d_sock: f64,
    u_s3: f64,
    u_s2: f64,
    u_lid: f64,
}

impl RadialProfile {
    pub(crate) fn from_spec(spec: &ConeSpec) -> RadialProfile {
        let b = spec.beta.sin() - 1.0;
        let r2 = 2.0 * spec.r_outer;
        let w = spec.smoothing;
        let d_sock = -(-w / r2).ln_1p();
        let wall = spec.wall_log_width();
        let s4 = r2.ln();
        let s3 = s4 - d_sock;
        let s2 = s3 - wall;
        // Cap band: radial width `w` at the cap's own radius, clamped to
        // half that radius so deep cones stay constructible.
        let r_cap_out = s2.exp();
        let w_cap = w.min(0.5 * r_cap_out);
        let d_cap = -(-w_cap / r_cap_out).ln_1p();
        let s1 = s2 - d_cap;
        let u_s3 = -b * d_sock * 0.5;
        let u_s2 = u_s3 - b * wall;
        let u_lid = u_s2 - b * d_cap * 0.5;
        RadialProfile { b, s1, s2, s3, s4, d_cap, d_sock, u_s3, u_s2, u_lid }
    }

    /// `U(s)`.
    pub(crate) fn value_log(&self, s: f64) -> f64 {
        if s >= self.s4 {
            0.0
        } else if s >= self.s3 {
            let t = (s - self.s3) / self.d_sock;
            -self.b * self.d_sock * (0.5 - t + i5(t))
        } else if s >= self.s2 {
            self.u_s3 + self.b * (s - self.s3)
        } else if s >= self.s1 {
            let t = (s - self.s1) / self.d_cap;
            self.u_s2 - self.b * self.d_cap * (0.5 - i5(t))
        } else {
            self.u_lid
        }
    }

    /// `u(r)`; `r = 0` hits the lid plateau.
    pub(crate) fn value(&self, r: f64) -> f64 {
        if r <= 0.0 {
            self.u_lid
        } else {
            self.value_log(r.ln())
        }
    }

    /// `U''(s)`; supported in the two mollifier bands. Test oracle for the
    /// curvature mass of one band.
    #[cfg(test)]
    fn curvature_log(&self, s: f64) -> f64 {
        if s >= self.s3 && s < self.s4 {
            -self.b * s5d((s - self.s3) / self.d_sock) / self.d_sock
        } else if s >= self.s1 && s < self.s2 {
            self.b * s5d((s - self.s1) / self.d_cap) / self.d_cap
        } else {
            0.0
        }
    }

    /// Maximum of `u`, attained on the lid.
    #[cfg(test)]
    pub(crate) fn peak(&self) -> f64 {
        self.u_lid
    }
}

/// Closed-form and quadrature summary of a cone feature, independent of the
/// 2-d sampling.
#[derive(Debug, Clone, Copy)]
pub struct ConeSummary {
    pub beta: f64,
    /// Wall slope `b = sin(beta) - 1`.
    pub b: f64,
    /// `osc u = |b| (W + (d_cap + d_sock)/2)`, exact.
    pub osc_u: f64,
    /// `int |K| darea = 4 pi (1 - sin beta)`, exact and width-independent.
    pub k1: f64,
    /// Area added by the feature, `int (e^{2u} - 1) darea_0` (quadrature).
    pub area_excess: f64,
    /// Chart radius of the support disk, `2 r_outer`.
    pub r_support: f64,
    /// Chart radius of the lid plateau.
    pub r_lid: f64,
    /// Wall width in log-radius.
    pub wall_log_width: f64,
    /// Mollifier band widths in log-radius.
    pub cap_log_width: f64,
    pub socket_log_width: f64,
    /// Thinnest radial band measured in grid cells; values below about 4
    /// mean the sampled metric under-resolves the feature and measured
    /// curvature functionals will drift from the closed forms.
    pub min_band_cells: f64,
}

/// Analytic summary of the feature a [`ConeSpec`] generates.
pub fn cone_summary(spec: &ConeSpec) -> Result<ConeSummary> {
    ConeSpec::new(
        spec.lattice,
        spec.n1,
        spec.n2,
        spec.r_outer,
        spec.height,
        spec.beta,
        spec.smoothing,
    )?;
    let p = RadialProfile::from_spec(spec);
    let b = p.b;
    let wall = p.s3 - p.s2;
    let osc = -b * (wall + 0.5 * (p.d_cap + p.d_sock));
    let k1 = 4.0 * std::f64::consts::PI * (-b);
    let r_lid = p.s1.exp();
    // Lid contributes exactly; the three structured regions by quadrature.
    let lid = ((2.0 * p.u_lid).exp() - 1.0) * std::f64::consts::PI * r_lid * r_lid;
    let f = |s: f64| {
        2.0 * std::f64::consts::PI * ((2.0 * p.value_log(s)).exp() - 1.0) * (2.0 * s).exp()
    };
    let mut excess = lid;
    for (a, c) in [(p.s1, p.s2), (p.s2, p.s3), (p.s3, p.s4)] {
        excess += adaptive_simpson(&f, a, c, 1e-13 * (1.0 + lid.abs()));
    }
    let grid = TorusGrid::new(spec.lattice, spec.n1, spec.n2)?;
    let h = {
        let e1 = grid.e1();
        let e2 = grid.e2();
        let l1 = (e1[0] * e1[0] + e1[1] * e1[1]).sqrt() / spec.n1 as f64;
        let l2 = (e2[0] * e2[0] + e2[1] * e2[1]).sqrt() / spec.n2 as f64;
        l1.max(l2)
    };
    let cap_radial = p.s2.exp() - p.s1.exp();
    let sock_radial = p.s4.exp() - p.s3.exp();
    Ok(ConeSummary {
        beta: spec.beta,
        b,
        osc_u: osc,
        k1,
        area_excess: excess,
        r_support: 2.0 * spec.r_outer,
        r_lid,
        wall_log_width: wall,
        cap_log_width: p.d_cap,
        socket_log_width: p.d_sock,
        min_band_cells: cap_radial.min(sock_radial) / h,
    })
}

/// Samples the cone feature onto its grid.
///
/// The support disk (radius `2 r_outer`) must embed without touching any
/// noncontractible loop, i.e. stay strictly inside half the flat systole;
/// `u` is then exactly periodic and identically zero near the systolic
/// loops. The peak sits on a grid sample, so the measured oscillation equals
/// the analytic one exactly.
pub fn generate_cone(spec: &ConeSpec) -> Result<ConformalTorusMetric> {
    // Re-validate: specs are plain data and may have been edited.
    let spec = ConeSpec::new(
        spec.lattice,
        spec.n1,
        spec.n2,
        spec.r_outer,
        spec.height,
        spec.beta,
        spec.smoothing,
    )?
    .with_center(spec.center);
    let sys0 = moduli::flat_systole(&spec.lattice);
    let support = 2.0 * spec.r_outer;
    if support >= 0.5 * sys0 {
        return Err(Error::ConeDoesNotFit { support, limit: 0.5 * sys0 });
    }
    let grid = TorusGrid::new(spec.lattice, spec.n1, spec.n2)?;
    let profile = RadialProfile::from_spec(&spec);
    let i0 = (spec.center[0] * spec.n1 as f64).round() as usize % spec.n1;
    let j0 = (spec.center[1] * spec.n2 as f64).round() as usize % spec.n2;
    let c = grid.point(i0, j0);
    let mut samples = Vec::with_capacity(grid.len());
    for i in 0..spec.n1 {
        for j in 0..spec.n2 {
            let p = grid.point(i, j);
            let d = grid.min_image([p[0] - c[0], p[1] - c[1]]);
            let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
            samples.push(profile.value(r));
        }
    }
    Ok(ConformalTorusMetric::new(ScalarField::from_samples(grid, samples)?))
}

/// The `beta = 0` cone: a cylinder of radius `R` and height `H` capped off
/// and socketed into the flat torus; `osc u >= H/R`.
pub fn generate_cylinder(
    r_outer: f64,
    height: f64,
    lattice: ModuliPoint,
    n1: usize,
    n2: usize,
    center: [f64; 2],
    smoothing: f64,
) -> Result<ConformalTorusMetric> {
    let spec =
        ConeSpec::new(lattice, n1, n2, r_outer, height, 0.0, smoothing)?.with_center(center);
    generate_cone(&spec)
}

/// Carrier used by the oscillation family: unit square lattice, `128^2`.
fn family_carrier() -> (ModuliPoint, usize, usize) {
    (ModuliPoint::new(0.0, 1.0, 1.0).expect("unit square"), 128, 128)
}

/// Ratio of smoothing width to support radius used by the family.
const FAMILY_SMOOTHING_RATIO: f64 = 1.0 / 16.0;

/// Oscillation of the profile as a function of wall width, with the
/// family's smoothing; independent of `r_outer` because every band scales
/// with it. Strictly increasing in `wall`.
fn family_osc(beta: f64, wall: f64) -> f64 {
    let b = beta.sin() - 1.0;
    let d_sock = -(-FAMILY_SMOOTHING_RATIO / 2.0).ln_1p();
    let r_cap_rel = 2.0 * (-d_sock - wall).exp();
    let w_cap_rel = FAMILY_SMOOTHING_RATIO.min(0.5 * r_cap_rel);
    let d_cap = -(-w_cap_rel / r_cap_rel).ln_1p();
    -b * (wall + 0.5 * (d_cap + d_sock))
}

/// Wall width achieving a target oscillation (bisection; `family_osc` is
/// strictly increasing). Returns the upper bisection endpoint, so the
/// achieved oscillation never rounds below the target.
fn family_wall_for_osc(beta: f64, target: f64) -> f64 {
    let b = 1.0 - beta.sin();
    let mut lo = 0.0;
    let mut hi = target / b + 1.0;
    debug_assert!(family_osc(beta, hi) > target);
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if family_osc(beta, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// The specs behind [`unbounded_oscillation_family`]: fixed carrier lattice,
/// oscillation doubling exactly each step, support radius rescaled so the
/// area excess is exactly constant. Useful when the analytic summaries of
/// each step are wanted alongside the sampled metrics.
pub fn family_specs(beta: f64, steps: usize) -> Result<Vec<ConeSpec>> {
    if steps < 2 {
        return Err(Error::InvalidInput(format!(
            "oscillation family needs at least 2 steps, got {steps}"
        )));
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&beta) {
        return Err(Error::InvalidInput(format!(
            "family opening angle must lie in [0, pi/2), got {beta}"
        )));
    }
    let (lattice, n1, n2) = family_carrier();
    let r_ref = 0.15;
    let wall0 = 0.75;
    let osc0 = family_osc(beta, wall0);
    let sb = beta.sin();
    let height_for_wall = |r: f64, wall: f64| {
        if sb > 0.0 {
            // Invert wall = -ln(1 - H sin(beta)/R)/sin(beta).
            r * (-(-wall * sb).exp_m1()) / sb
        } else {
            r * wall
        }
    };
    let spec_with = |r: f64, wall: f64| {
        ConeSpec::new(
            lattice,
            n1,
            n2,
            r,
            height_for_wall(r, wall),
            beta,
            r * FAMILY_SMOOTHING_RATIO,
        )
    };
    let excess_ref = cone_summary(&spec_with(r_ref, wall0)?)?.area_excess;
    let mut specs = Vec::with_capacity(steps);
    for step in 0..steps {
        let wall = if step == 0 {
            wall0
        } else {
            // One-sided pad: the measured growth must never round below the
            // nominal power of two.
            family_wall_for_osc(beta, osc0 * (1u64 << step) as f64 * (1.0 + 1e-10))
        };
        // Area excess scales exactly as r^2 at fixed profile shape, so one
        // reference quadrature per step pins the radius.
        let excess_at_ref = cone_summary(&spec_with(r_ref, wall)?)?.area_excess;
        let r = r_ref * (excess_ref / excess_at_ref).sqrt();
        specs.push(spec_with(r, wall)?);
    }
    Ok(specs)
}

/// Metrics with identical `K_1`, area, systole, and carrier lattice whose
/// oscillation doubles at every step.
pub fn unbounded_oscillation_family(
    beta: f64,
    steps: usize,
) -> Result<Vec<ConformalTorusMetric>> {
    family_specs(beta, steps)?
        .iter()
        .map(generate_cone)
        .collect()
}

/// A deterministic random superposition of low-frequency lattice modes,
/// rescaled so `osc u` equals `amplitude` exactly (`amplitude = 0` gives the
/// flat metric). Mode indices are drawn from the smallest frequency box
/// containing `modes` distinct cosine modes.
///
/// Panics if the grid is smaller than `8 x 8` (the [`TorusGrid`] floor);
/// `amplitude` must be nonnegative and finite.
pub fn random_trig_metric(
    lattice: ModuliPoint,
    n1: usize,
    n2: usize,
    modes: usize,
    amplitude: f64,
    seed: u64,
) -> ConformalTorusMetric {
    assert!(
        amplitude >= 0.0 && amplitude.is_finite(),
        "amplitude must be nonnegative and finite, got {amplitude}"
    );
    let grid = TorusGrid::new(lattice, n1, n2).expect("grid at least 8 x 8");
    if modes == 0 || amplitude == 0.0 {
        return ConformalTorusMetric::flat(grid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Smallest frequency box with at least `modes` distinct cosine modes;
    // (p, q) and (-p, -q) describe the same real tone, so take canonical
    // representatives.
    let mut fmax = 1i64;
    while ((2 * fmax + 1) * (2 * fmax + 1) - 1) / 2 < modes as i64 {
        fmax += 1;
    }
    let mut pool = Vec::new();
    for p in -fmax..=fmax {
        for q in -fmax..=fmax {
            if q > 0 || (q == 0 && p > 0) {
                pool.push((p, q));
            }
        }
    }
    pool.shuffle(&mut rng);
    let chosen: Vec<(i64, i64, f64, f64)> = pool[..modes]
        .iter()
        .map(|&(p, q)| {
            let amp = rng.gen_range(0.5..1.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            (p, q, amp, phase)
        })
        .collect();
    let mut samples = Vec::with_capacity(grid.len());
    for i in 0..n1 {
        for j in 0..n2 {
            let f1 = i as f64 / n1 as f64;
            let f2 = j as f64 / n2 as f64;
            let mut v = 0.0;
            for &(p, q, a, phase) in &chosen {
                v += a
                    * (std::f64::consts::TAU * (q as f64 * f1 + p as f64 * f2) + phase).cos();
            }
            samples.push(v);
        }
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        let scale = amplitude / (hi - lo);
        for s in &mut samples {
            *s *= scale;
        }
    }
    ConformalTorusMetric::new(
        ScalarField::from_samples(grid, samples).expect("finite by construction"),
    )
}

/// Shape of a radial disk test field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskProfile {
    /// `u = m (1 - r^2)^3 >= 0`: positive curvature concentrated at the
    /// center, for the maximum bound.
    Cap,
    /// `u = -m (1 - r^2)^3 <= 0`: the mirror image, for the minimum bound.
    Well,
}

/// A radial C^2 field on the closed unit disk with `u = 0` on the boundary
/// (to first and second order), together with its exact curvature data.
#[derive(Debug, Clone)]
pub struct DiskField {
    profile: DiskProfile,
    magnitude: f64,
    n: usize,
    samples: Vec<f64>,
}

/// Builds a [`DiskField`] sampled on the `n x n` cell-center grid of
/// `[-1, 1]^2` (zero outside the disk); curvature functionals are evaluated
/// by polar quadrature of the analytic profile.
pub fn disk_test_field(profile: DiskProfile, magnitude: f64, n: usize) -> Result<DiskField> {
    if !(magnitude >= 0.0) || !magnitude.is_finite() {
        return Err(Error::InvalidInput(format!(
            "magnitude must be nonnegative and finite, got {magnitude}"
        )));
    }
    if n < 8 {
        return Err(Error::InvalidInput(format!(
            "disk grid {n} x {n} too coarse; need at least 8 samples per direction"
        )));
    }
    let sign = match profile {
        DiskProfile::Cap => 1.0,
        DiskProfile::Well => -1.0,
    };
    let mut samples = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = -1.0 + (2.0 * i as f64 + 1.0) / n as f64;
            let y = -1.0 + (2.0 * j as f64 + 1.0) / n as f64;
            let r2 = x * x + y * y;
            samples.push(if r2 <= 1.0 {
                sign * magnitude * (1.0 - r2).powi(3)
            } else {
                0.0
            });
        }
    }
    Ok(DiskField { profile, magnitude, n, samples })
}

impl DiskField {
    pub fn profile(&self) -> DiskProfile {
        self.profile
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major samples over `[-1, 1]^2`; zero outside the disk.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Whether cell `(i, j)` lies inside the disk.
    pub fn inside(&self, i: usize, j: usize) -> bool {
        let x = -1.0 + (2.0 * i as f64 + 1.0) / self.n as f64;
        let y = -1.0 + (2.0 * j as f64 + 1.0) / self.n as f64;
        x * x + y * y <= 1.0
    }

    /// `u(r)` of the analytic profile.
    pub fn value_at_radius(&self, r: f64) -> f64 {
        let sign = match self.profile {
            DiskProfile::Cap => 1.0,
            DiskProfile::Well => -1.0,
        };
        if r >= 1.0 {
            0.0
        } else {
            sign * self.magnitude * (1.0 - r * r).powi(3)
        }
    }

    /// Maximum of `u`, attained at the center for a cap.
    pub fn max_u(&self) -> f64 {
        match self.profile {
            DiskProfile::Cap => self.magnitude,
            DiskProfile::Well => 0.0,
        }
    }

    /// Minimum of `u`, attained at the center for a well.
    pub fn min_u(&self) -> f64 {
        match self.profile {
            DiskProfile::Cap => 0.0,
            DiskProfile::Well => -self.magnitude,
        }
    }

    /// Gaussian curvature `K = -e^{-2u} (u'' + u'/r)` of `e^{2u} g_euclid`;
    /// for this profile `u'' + u'/r = -12 sigma m (1 - r^2)(1 - 3 r^2)`.
    pub fn curvature_at_radius(&self, r: f64) -> f64 {
        let sign = match self.profile {
            DiskProfile::Cap => 1.0,
            DiskProfile::Well => -1.0,
        };
        if r >= 1.0 {
            return 0.0;
        }
        let lap = -12.0 * sign * self.magnitude * (1.0 - r * r) * (1.0 - 3.0 * r * r);
        -(-2.0 * self.value_at_radius(r)).exp() * lap
    }

    /// Curved area of the disk, `2 pi int e^{2u} r dr`.
    pub fn area(&self) -> f64 {
        let f = |r: f64| (2.0 * self.value_at_radius(r)).exp() * r;
        2.0 * std::f64::consts::PI * adaptive_simpson(&f, 0.0, 1.0, 1e-13)
    }

    /// `(K_p^+, K_p^-)`: the scale-invariant curvature functionals of the
    /// positive and negative curvature parts,
    /// `(int (K^{+/-})^p darea)^{1/p} area^{1 - 1/p}`, by polar quadrature
    /// split at the curvature sign change `r = 1/sqrt(3)`.
    pub fn curvature_functionals(&self, p: f64) -> Result<(f64, f64)> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidP(p));
        }
        let part = |positive: bool| {
            let f = |r: f64| {
                let k = self.curvature_at_radius(r);
                let k = if positive { k.max(0.0) } else { (-k).max(0.0) };
                k.powf(p) * (2.0 * self.value_at_radius(r)).exp() * r
            };
            let split = 1.0 / 3f64.sqrt();
            let a = adaptive_simpson(&f, 0.0, split, 1e-13);
            let b = adaptive_simpson(&f, split, 1.0, 1e-13);
            2.0 * std::f64::consts::PI * (a + b)
        };
        let area = self.area();
        let plus = part(true).powf(1.0 / p) * area.powf(1.0 - 1.0 / p);
        let minus = part(false).powf(1.0 / p) * area.powf(1.0 - 1.0 / p);
        Ok((plus, minus))
    }
}
