//! Intrinsic geometry of a conformal torus metric `g = e^{2u} g0`: Gaussian
//! curvature, scale-invariant curvature functionals, area, oscillation,
//! systole, and the consolidated report the certification rules consume.
//!
//! The scale-invariant quantities are
//!
//! ```text
//! K_p(g)  = ||K_g||_{L^p(g)} * area(g)^{1 - 1/p},
//! V(g)    = area(g) / sys(g)^2,
//! osc u   = max u - min u,
//! ```
//!
//! with `K_g = e^{-2u} lap(u)` in the nonnegative-spectrum convention and
//! `K^+ = max(K, 0)`, `K^- = max(-K, 0)` split pointwise before integration.
//! Replacing `u` by `u + c` rescales the metric and leaves all of them
//! unchanged.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fields::{self, ScalarField, TorusGrid};
use crate::moduli::{self, ModuliPoint};
use crate::systole;
pub use crate::systole::SystoleEstimate;
use crate::{Error, Result};

/// A torus metric written as `e^{2u} g0` with `g0` the flat metric of the
/// grid's moduli point.
#[derive(Debug, Clone)]
pub struct ConformalTorusMetric {
    u: ScalarField,
}

impl ConformalTorusMetric {
    /// Wraps a log conformal factor (finite by [`ScalarField`] construction).
    pub fn new(u: ScalarField) -> Self {
        ConformalTorusMetric { u }
    }

    /// The flat metric itself, `u = 0`.
    pub fn flat(grid: TorusGrid) -> Self {
        ConformalTorusMetric { u: ScalarField::zeros(grid) }
    }

    pub fn u(&self) -> &ScalarField {
        &self.u
    }

    pub fn grid(&self) -> TorusGrid {
        self.u.grid()
    }

    pub fn moduli(&self) -> ModuliPoint {
        self.grid().moduli()
    }

    /// Pointwise conformal factor `e^{2u}` (the area density w.r.t. `g0`).
    pub fn conformal_factor(&self) -> ScalarField {
        self.u.map(|v| (2.0 * v).exp())
    }

    /// Total area of `g`.
    pub fn area(&self) -> f64 {
        fields::integrate(&self.conformal_factor(), None).expect("same grid")
    }
}

/// Gaussian curvature `K_g = e^{-2u} lap(u)` (flat `g0` contributes nothing).
pub fn gaussian_curvature(metric: &ConformalTorusMetric) -> ScalarField {
    let lap = fields::laplacian(metric.u());
    lap.zip(metric.u(), |l, u| (-2.0 * u).exp() * l)
        .expect("same grid")
}

/// The curvature functionals `(K_1, K_p, K_p^+, K_p^-)`, all measured in the
/// metric `g` itself and multiplied by `area(g)^{1 - 1/p}` so they are scale
/// invariant. `K_1` always uses `p = 1`; the other three use the given `p`.
pub fn curvature_functionals(
    metric: &ConformalTorusMetric,
    p: f64,
) -> Result<(f64, f64, f64, f64)> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidP(p));
    }
    let lap = fields::laplacian(metric.u());
    let area = metric.area();
    // |K|^p darea_g = |lap u|^p e^{2u(1-p)} darea_0, and for p = 1 the
    // conformal factors cancel entirely.
    let k1 = fields::integrate(&lap.map(f64::abs), None)?;
    let lp = |part: fn(f64) -> f64| -> Result<f64> {
        let integrand = lap
            .zip(metric.u(), |l, u| part(l).powf(p) * (2.0 * u * (1.0 - p)).exp())
            .expect("same grid");
        Ok(fields::integrate(&integrand, None)?.powf(1.0 / p) * area.powf(1.0 - 1.0 / p))
    };
    let kp = lp(f64::abs)?;
    let kp_plus = lp(|l| l.max(0.0))?;
    let kp_minus = lp(|l| (-l).max(0.0))?;
    Ok((k1, kp, kp_plus, kp_minus))
}

/// Graph estimate of the shortest noncontractible loop of `g`, with its
/// documented one-sided tolerance.
pub fn conformal_systole(metric: &ConformalTorusMetric) -> SystoleEstimate {
    systole::estimate(metric.u())
}

/// `osc u = max u - min u` over the samples.
pub fn oscillation(metric: &ConformalTorusMetric) -> f64 {
    metric.u().max() - metric.u().min()
}

/// Every intrinsic quantity of one metric at one exponent `p`, in a single
/// serializable record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryReport {
    /// Conformal class and scale of the underlying flat metric.
    pub x: f64,
    pub y: f64,
    pub scale: f64,
    pub p: f64,
    pub area_g: f64,
    pub area_g0: f64,
    pub sys_g: f64,
    pub sys_g0: f64,
    #[serde(rename = "V_g")]
    pub v_g: f64,
    #[serde(rename = "V_g0")]
    pub v_g0: f64,
    pub osc_u: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "Kp")]
    pub kp: f64,
    #[serde(rename = "Kp_plus")]
    pub kp_plus: f64,
    #[serde(rename = "Kp_minus")]
    pub kp_minus: f64,
    /// `int K_g darea_g`; nonzero values flag under-resolution.
    pub gauss_bonnet_residual: f64,
    /// Worst-case relative error of `sys_g^2`; inequality rules consuming
    /// the systole must hold under this slack.
    pub tol_sys: f64,
}

impl GeometryReport {
    /// Report fields as ordered name/value pairs (for tables and witnesses).
    pub fn entries(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        m.insert("x".into(), self.x);
        m.insert("y".into(), self.y);
        m.insert("scale".into(), self.scale);
        m.insert("p".into(), self.p);
        m.insert("area_g".into(), self.area_g);
        m.insert("area_g0".into(), self.area_g0);
        m.insert("sys_g".into(), self.sys_g);
        m.insert("sys_g0".into(), self.sys_g0);
        m.insert("V_g".into(), self.v_g);
        m.insert("V_g0".into(), self.v_g0);
        m.insert("osc_u".into(), self.osc_u);
        m.insert("K1".into(), self.k1);
        m.insert("Kp".into(), self.kp);
        m.insert("Kp_plus".into(), self.kp_plus);
        m.insert("Kp_minus".into(), self.kp_minus);
        m.insert("gauss_bonnet_residual".into(), self.gauss_bonnet_residual);
        m.insert("tol_sys".into(), self.tol_sys);
        m
    }
}

/// Computes the full [`GeometryReport`] of a metric at exponent `p > 1`.
pub fn report(metric: &ConformalTorusMetric, p: f64) -> Result<GeometryReport> {
    let (k1, kp, kp_plus, kp_minus) = curvature_functionals(metric, p)?;
    let m = metric.moduli();
    let area_g = metric.area();
    let sys = conformal_systole(metric);
    let sys_g0 = moduli::flat_systole(&m);
    let lap = fields::laplacian(metric.u());
    let residual = fields::integrate(&lap, None)?;
    Ok(GeometryReport {
        x: m.x(),
        y: m.y(),
        scale: m.scale(),
        p,
        area_g,
        area_g0: m.flat_area(),
        sys_g: sys.length,
        sys_g0,
        v_g: area_g / (sys.length * sys.length),
        v_g0: moduli::flat_v(&m),
        osc_u: oscillation(metric),
        k1,
        kp,
        kp_plus,
        kp_minus,
        gauss_bonnet_residual: residual,
        tol_sys: sys.tol_sys(),
    })
}

/// Side of a level threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelSide {
    /// The closed superlevel set `{u >= v}`.
    Above,
    /// The closed sublevel set `{u <= v}`.
    Below,
}

/// Whether the grid samples on the given side of level `v` contain a loop
/// that is noncontractible on the torus.
///
/// The sets are closed: a loop `c` with `min u on c = v` lies in `{u >= v}`,
/// matching the way the mid-level oscillation bound quantifies over loops.
///
/// The masked samples form a 4-neighbor subgraph; a union-find structure
/// tracks each node's winding offset relative to its component root, and any
/// edge closing a cycle with inconsistent offsets exhibits a loop with
/// nonzero winding.
pub fn level_set_noncontractible(u: &ScalarField, v: f64, side: LevelSide) -> bool {
    let grid = u.grid();
    let (n1, n2) = (grid.n1(), grid.n2());
    let mask: Vec<bool> = u
        .samples()
        .iter()
        .map(|&s| match side {
            LevelSide::Above => s >= v,
            LevelSide::Below => s <= v,
        })
        .collect();

    let mut parent: Vec<u32> = (0..mask.len() as u32).collect();
    let mut offset: Vec<[i64; 2]> = vec![[0, 0]; mask.len()];

    // Winding offset of `x` relative to its root, with path compression.
    fn find(parent: &mut [u32], offset: &mut [[i64; 2]], x: usize) -> (usize, [i64; 2]) {
        let p = parent[x] as usize;
        if p == x {
            return (x, [0, 0]);
        }
        let (root, above) = find(parent, offset, p);
        offset[x] = [offset[x][0] + above[0], offset[x][1] + above[1]];
        parent[x] = root as u32;
        (root, offset[x])
    }

    for i in 0..n1 {
        for j in 0..n2 {
            let a = grid.index(i, j);
            if !mask[a] {
                continue;
            }
            // Steps +1 in i and +1 in j; crossing the seam adds one winding.
            let steps = [
                ((i + 1) % n1, j, [(i + 1 == n1) as i64, 0]),
                (i, (j + 1) % n2, [0, (j + 1 == n2) as i64]),
            ];
            for (ni, nj, d) in steps {
                let b = grid.index(ni, nj);
                if !mask[b] {
                    continue;
                }
                let (ra, oa) = find(&mut parent, &mut offset, a);
                let (rb, ob) = find(&mut parent, &mut offset, b);
                // Constraint: sheet(b) = sheet(a) + d.
                if ra == rb {
                    if ob[0] - oa[0] != d[0] || ob[1] - oa[1] != d[1] {
                        return true;
                    }
                } else {
                    parent[rb] = ra as u32;
                    offset[rb] = [oa[0] + d[0] - ob[0], oa[1] + d[1] - ob[1]];
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::ModuliPoint;

    fn grid(x: f64, y: f64, scale: f64, n1: usize, n2: usize) -> TorusGrid {
        TorusGrid::new(ModuliPoint::new(x, y, scale).unwrap(), n1, n2).unwrap()
    }

    /// A fixed band-limited test metric with both curvature signs.
    fn trig_metric(g: TorusGrid, amp: f64) -> ConformalTorusMetric {
        let m = g.moduli();
        let tau = 2.0 * std::f64::consts::PI;
        let u = ScalarField::from_fn(g, |w| {
            // Lattice-periodic by construction: phases are integer multiples
            // of the dual basis pairings.
            let a = w[0] / m.scale();
            let b = (w[1] / m.y() - w[0] * m.x() / m.scale() / m.y()) / m.scale();
            amp * ((tau * a).cos() + 0.6 * (tau * (a + b)).sin() + 0.3 * (tau * 2.0 * b).cos())
        });
        ConformalTorusMetric::new(u)
    }

    #[test]
    fn flat_metric_has_zero_curvature_and_trivial_report() {
        let g = grid(0.0, 2.0, 1.0, 16, 32);
        let m = ConformalTorusMetric::flat(g);
        assert!(gaussian_curvature(&m).samples().iter().all(|k| k.abs() < 1e-12));
        let r = report(&m, 2.0).unwrap();
        assert!((r.area_g - 2.0).abs() < 1e-12);
        assert!((r.sys_g - 1.0).abs() < 1e-12);
        assert!((r.v_g - 2.0).abs() < 1e-11);
        assert!((r.v_g0 - 2.0).abs() < 1e-12);
        assert_eq!(r.osc_u, 0.0);
        assert!(r.k1.abs() < 1e-12 && r.kp.abs() < 1e-12);
        assert!(r.kp_plus.abs() < 1e-12 && r.kp_minus.abs() < 1e-12);
        assert!(r.gauss_bonnet_residual.abs() < 1e-12);
    }

    #[test]
    fn curvature_matches_analytic_differentiation() {
        let g = grid(0.0, 1.0, 1.0, 64, 64);
        let tau = 2.0 * std::f64::consts::PI;
        let eps = 0.2;
        let u = ScalarField::from_fn(g, |w| eps * (tau * w[0]).cos());
        let metric = ConformalTorusMetric::new(u);
        let k = gaussian_curvature(&metric);
        let expected = ScalarField::from_fn(g, |w| {
            let c = (tau * w[0]).cos();
            4.0 * std::f64::consts::PI.powi(2) * eps * (-2.0 * eps * c).exp() * c
        });
        let max_diff = k
            .samples()
            .iter()
            .zip(expected.samples())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-10, "max diff {max_diff}");
    }

    #[test]
    fn gauss_bonnet_residual_is_spectrally_exact() {
        let g = grid(0.3, 1.2, 1.0, 128, 128);
        let m = trig_metric(g, 0.35);
        let r = report(&m, 2.0).unwrap();
        assert!(
            r.gauss_bonnet_residual.abs() <= 1e-6 * (1.0 + r.k1),
            "residual {}",
            r.gauss_bonnet_residual
        );
    }

    #[test]
    fn holder_monotonicity_in_p() {
        let g = grid(0.0, 1.4, 1.0, 64, 64);
        let m = trig_metric(g, 0.3);
        let ps = [1.25, 1.5, 2.0, 3.0, 5.0];
        let mut last = curvature_functionals(&m, ps[0]).unwrap().0; // K1
        for &p in &ps {
            let (_, kp, _, _) = curvature_functionals(&m, p).unwrap();
            assert!(
                kp >= last * (1.0 - 1e-12),
                "K_p not monotone at p = {p}: {kp} < {last}"
            );
            last = kp;
        }
    }

    #[test]
    fn functionals_reject_bad_p() {
        let g = grid(0.0, 1.0, 1.0, 16, 16);
        let m = ConformalTorusMetric::flat(g);
        assert!(matches!(curvature_functionals(&m, 1.0), Err(Error::InvalidP(_))));
        assert!(matches!(curvature_functionals(&m, 0.5), Err(Error::InvalidP(_))));
        assert!(matches!(curvature_functionals(&m, f64::NAN), Err(Error::InvalidP(_))));
    }

    #[test]
    fn rescaling_shifts_area_and_systole_but_not_invariants() {
        let g = grid(0.0, 1.3, 1.0, 48, 64);
        let base = trig_metric(g, 0.25);
        let c = 0.4;
        let shifted = ConformalTorusMetric::new(base.u().map(|v| v + c));
        let r0 = report(&base, 2.0).unwrap();
        let r1 = report(&shifted, 2.0).unwrap();
        assert!((r1.area_g - r0.area_g * (2.0 * c).exp()).abs() < 1e-10 * r1.area_g);
        assert!((r1.sys_g - r0.sys_g * c.exp()).abs() < 1e-10 * r1.sys_g);
        for (a, b) in [
            (r1.v_g, r0.v_g),
            (r1.kp, r0.kp),
            (r1.k1, r0.k1),
            (r1.kp_plus, r0.kp_plus),
            (r1.kp_minus, r0.kp_minus),
            (r1.osc_u, r0.osc_u),
        ] {
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn loewner_chain_under_systole_tolerance() {
        for (x, y, amp) in [(0.0, 1.0, 0.2), (0.3, 1.5, 0.3), (0.5, 0.9, 0.15)] {
            let g = grid(x, y, 1.0, 48, 48);
            let m = trig_metric(g, amp);
            let r = report(&m, 2.0).unwrap();
            assert!(
                r.v_g >= r.v_g0 * (1.0 - r.tol_sys),
                "V_g {} < V_g0 {} with tol {}",
                r.v_g,
                r.v_g0,
                r.tol_sys
            );
            assert!(
                r.v_g <= (2.0 * r.osc_u).exp() * r.v_g0 * (1.0 + r.tol_sys),
                "converse failed: V_g {} osc {}",
                r.v_g,
                r.osc_u
            );
            assert!(r.v_g0 >= 3f64.sqrt() / 2.0 - 1e-12);
        }
    }

    #[test]
    fn oscillation_examples() {
        let g = grid(0.0, 1.0, 1.0, 16, 16);
        assert_eq!(oscillation(&ConformalTorusMetric::flat(g)), 0.0);
        let mut samples = vec![0.0; g.len()];
        samples[3] = -1.0;
        samples[200] = 2.0;
        let m = ConformalTorusMetric::new(ScalarField::from_samples(g, samples).unwrap());
        assert_eq!(oscillation(&m), 3.0);
        let tau = 2.0 * std::f64::consts::PI;
        let eps = 0.05;
        let wave = ConformalTorusMetric::new(ScalarField::from_fn(g, |w| eps * (tau * w[0]).cos()));
        assert!((oscillation(&wave) - 2.0 * eps).abs() < 1e-12);
    }

    #[test]
    fn report_serializes_with_spec_field_names() {
        let g = grid(0.0, 2.0, 1.0, 16, 16);
        let r = report(&ConformalTorusMetric::flat(g), 2.0).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in [
            "area_g", "area_g0", "sys_g", "sys_g0", "V_g", "V_g0", "osc_u", "K1", "Kp",
            "Kp_plus", "Kp_minus", "p", "gauss_bonnet_residual", "tol_sys",
        ] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
    }

    #[test]
    fn level_sets_detect_winding() {
        let g = grid(0.0, 1.0, 1.0, 16, 16);
        // Full torus: noncontractible loops everywhere.
        let ones = ScalarField::from_fn(g, |_| 1.0);
        assert!(level_set_noncontractible(&ones, 0.0, LevelSide::Above));
        assert!(!level_set_noncontractible(&ones, 0.0, LevelSide::Below));

        // A band winding in the w1 direction.
        let band = ScalarField::from_fn(g, |w| {
            if (w[1] - 0.5).abs() < 0.2 {
                1.0
            } else {
                0.0
            }
        });
        assert!(level_set_noncontractible(&band, 0.5, LevelSide::Above));
        // Its complement also winds.
        assert!(level_set_noncontractible(&band, 0.5, LevelSide::Below));

        // A contractible blob does not.
        let blob = ScalarField::from_fn(g, |w| {
            let d2 = (w[0] - 0.5).powi(2) + (w[1] - 0.5).powi(2);
            if d2 < 0.04 {
                1.0
            } else {
                0.0
            }
        });
        assert!(!level_set_noncontractible(&blob, 0.5, LevelSide::Above));
        assert!(level_set_noncontractible(&blob, 0.5, LevelSide::Below));

        // A band with a gap is contractible.
        let cut = ScalarField::from_fn(g, |w| {
            if (w[1] - 0.5).abs() < 0.2 && w[0] > 0.15 {
                1.0
            } else {
                0.0
            }
        });
        assert!(!level_set_noncontractible(&cut, 0.5, LevelSide::Above));
    }
}
