//! Shortest noncontractible loop of `e^{2u} g0` on a weighted grid graph.
//!
//! Nodes are a coarse subsampling of the field grid; an edge is a straight
//! chord between nodes whose weight is the trapezoid quadrature of `e^u`
//! along the chord over the fine samples it passes through (for adjacent
//! fine nodes this reduces to flat length times the endpoint average). Graph
//! loops are polygonal loops, so the graph value is an upper estimate of the
//! continuous systole; conversely any continuous loop can be snapped to a
//! graph loop at the cost of the direction-set anisotropy factor
//!
//! ```text
//! factor = 1 / cos(theta_max / 2),
//! ```
//!
//! `theta_max` the largest angular gap between available step directions.
//! This is the documented one-sided tolerance: `length / factor <= sys <=
//! length`, up to chord-quadrature error which is second order in the grid
//! spacing. Certification rules consume the estimate through
//! [`SystoleEstimate::tol_sys`], the worst-case relative error of `sys^2`.
//!
//! The search runs an A* pass per basepoint in the lifted cover (sheets of
//! the universal cover indexed by winding numbers), targeting the translates
//! of the basepoint by every homotopy class that could still beat the best
//! loop found so far. Basepoints are the first `dmax` columns and rows of
//! the coarse grid: a loop with nonzero winding must cross a cut line, and
//! with steps of at most `dmax` cells it lands on one of those nodes.
//! Straight full-resolution axis loops seed the upper bound, so most A*
//! passes terminate immediately. The shared bound only ever shrinks, and a
//! pass is abandoned only when it provably cannot beat the bound, so the
//! result is deterministic regardless of scheduling.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::fields::ScalarField;

/// Graph systole value plus the anisotropy factor of the direction set used.
#[derive(Debug, Clone, Copy)]
pub struct SystoleEstimate {
    /// Length of the shortest noncontractible graph loop.
    pub length: f64,
    /// `length` overestimates the continuous systole by at most this factor.
    pub factor: f64,
}

impl SystoleEstimate {
    /// Worst-case relative error of `length^2` as an estimate of `sys^2`:
    /// `sys^2 >= length^2 / (1 + tol_sys)`. Inequality tests on `V = area /
    /// sys^2` must survive this slack to be sound.
    pub fn tol_sys(&self) -> f64 {
        self.factor * self.factor - 1.0
    }
}

/// Coprime step directions with coordinates up to `dmax`, both signs.
fn directions(dmax: i64) -> Vec<(i64, i64)> {
    let mut dirs = Vec::new();
    for di in -dmax..=dmax {
        for dj in -dmax..=dmax {
            if (di, dj) == (0, 0) {
                continue;
            }
            if gcd(di.unsigned_abs(), dj.unsigned_abs()) == 1 {
                dirs.push((di, dj));
            }
        }
    }
    dirs
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact anisotropy factor of a step set: the graph unit ball is the convex
/// hull of the normalized step vectors, so the worst direction sits halfway
/// across the largest angular gap and costs `1 / cos(gap / 2)`.
fn anisotropy_factor(steps: &[[f64; 2]]) -> f64 {
    let mut angles: Vec<f64> = steps.iter().map(|s| s[1].atan2(s[0])).collect();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    let mut max_gap: f64 = 0.0;
    for i in 0..n {
        let next = if i + 1 == n {
            angles[0] + 2.0 * std::f64::consts::PI
        } else {
            angles[i + 1]
        };
        max_gap = max_gap.max(next - angles[i]);
    }
    1.0 / (max_gap / 2.0).cos()
}

/// Smallest stride dividing `n` that brings the coarse axis size at or below
/// `target`; falls back to the full axis when `n` has no such divisor.
fn stride(n: usize, target: usize) -> usize {
    for s in 1..=n {
        if n % s == 0 && n / s <= target {
            return s;
        }
    }
    n
}

struct HeapItem {
    f: f64,
    g: f64,
    state: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we pop the smallest f.
        other.f.total_cmp(&self.f)
    }
}

fn atomic_min(cell: &AtomicU64, value: f64) {
    let mut current = cell.load(AtomicOrdering::Relaxed);
    while value < f64::from_bits(current) {
        match cell.compare_exchange_weak(
            current,
            value.to_bits(),
            AtomicOrdering::Relaxed,
            AtomicOrdering::Relaxed,
        ) {
            Ok(_) => return,
            Err(seen) => current = seen,
        }
    }
}

/// The graph, its precomputed edge weights, and the lifted-cover geometry
/// shared by every basepoint pass.
struct Search {
    m1: usize,
    m2: usize,
    sheets_a: i64,
    sheets_b: i64,
    dirs: Vec<(i64, i64)>,
    /// weight[node * dirs.len() + d]
    weights: Vec<f64>,
    /// Coarse cell vectors (plane step per +1 coarse index).
    c1: [f64; 2],
    c2: [f64; 2],
    min_eu: f64,
    /// Homotopy classes still worth searching, up to sign.
    classes: Vec<(i64, i64)>,
}

impl Search {
    fn nodes(&self) -> usize {
        self.m1 * self.m2
    }

    fn states(&self) -> usize {
        self.nodes() * ((2 * self.sheets_a + 1) * (2 * self.sheets_b + 1)) as usize
    }

    fn state(&self, i: usize, j: usize, a: i64, b: i64) -> usize {
        let sheet = ((a + self.sheets_a) * (2 * self.sheets_b + 1) + (b + self.sheets_b)) as usize;
        sheet * self.nodes() + i * self.m2 + j
    }

    /// Plane position of a lifted coarse node relative to coarse node (0,0).
    fn position(&self, i: usize, j: usize, a: i64, b: i64) -> [f64; 2] {
        let ii = i as f64 + a as f64 * self.m1 as f64;
        let jj = j as f64 + b as f64 * self.m2 as f64;
        [
            ii * self.c1[0] + jj * self.c2[0],
            ii * self.c1[1] + jj * self.c2[1],
        ]
    }

    /// Admissible heuristic: flat distance to the nearest remaining target,
    /// scaled by the global minimum of the conformal factor.
    fn heuristic(&self, pos: [f64; 2], targets: &[[f64; 2]]) -> f64 {
        let mut best = f64::INFINITY;
        for t in targets {
            let dx = pos[0] - t[0];
            let dy = pos[1] - t[1];
            best = best.min(dx.hypot(dy));
        }
        best * self.min_eu
    }

    /// Shortest loop through coarse node `(bi, bj)`: A* from the node to its
    /// nonzero translates in the lift. Returns infinity when pruned by the
    /// shared bound (the true value then cannot beat that bound).
    fn through(
        &self,
        bi: usize,
        bj: usize,
        best: &AtomicU64,
        dist: &mut [f64],
        touched: &mut Vec<usize>,
    ) -> f64 {
        for &s in touched.iter() {
            dist[s] = f64::INFINITY;
        }
        touched.clear();

        let base_pos = self.position(bi, bj, 0, 0);
        let mut targets = Vec::with_capacity(2 * self.classes.len());
        let mut target_pos = Vec::with_capacity(2 * self.classes.len());
        for &(k, l) in &self.classes {
            for (k, l) in [(k, l), (-k, -l)] {
                if k.abs() <= self.sheets_a && l.abs() <= self.sheets_b {
                    targets.push(self.state(bi, bj, k, l));
                    target_pos.push(self.position(bi, bj, k, l));
                }
            }
        }

        let mut heap = BinaryHeap::new();
        let start = self.state(bi, bj, 0, 0);
        dist[start] = 0.0;
        touched.push(start);
        heap.push(HeapItem {
            f: self.heuristic(base_pos, &target_pos),
            g: 0.0,
            state: start,
        });

        let ndirs = self.dirs.len();
        while let Some(item) = heap.pop() {
            if item.f >= f64::from_bits(best.load(AtomicOrdering::Relaxed)) {
                return f64::INFINITY;
            }
            if item.g > dist[item.state] {
                continue;
            }
            if targets.contains(&item.state) {
                atomic_min(best, item.g);
                return item.g;
            }
            let node = item.state % self.nodes();
            let sheet = item.state / self.nodes();
            let a = sheet as i64 / (2 * self.sheets_b + 1) - self.sheets_a;
            let b = sheet as i64 % (2 * self.sheets_b + 1) - self.sheets_b;
            let i = node / self.m2;
            let j = node % self.m2;
            for (d, &(di, dj)) in self.dirs.iter().enumerate() {
                let w = self.weights[node * ndirs + d];
                let ni_raw = i as i64 + di;
                let nj_raw = j as i64 + dj;
                let na = a + ni_raw.div_euclid(self.m1 as i64);
                let nb = b + nj_raw.div_euclid(self.m2 as i64);
                if na.abs() > self.sheets_a || nb.abs() > self.sheets_b {
                    continue;
                }
                let ni = ni_raw.rem_euclid(self.m1 as i64) as usize;
                let nj = nj_raw.rem_euclid(self.m2 as i64) as usize;
                let ns = self.state(ni, nj, na, nb);
                let ng = item.g + w;
                if ng < dist[ns] {
                    if dist[ns].is_infinite() {
                        touched.push(ns);
                    }
                    dist[ns] = ng;
                    let npos = self.position(ni, nj, na, nb);
                    heap.push(HeapItem {
                        f: ng + self.heuristic(npos, &target_pos),
                        g: ng,
                        state: ns,
                    });
                }
            }
        }
        f64::INFINITY
    }
}

/// Graph systole of `e^{2u} g0` for the log conformal factor `u`.
pub fn estimate(u: &ScalarField) -> SystoleEstimate {
    let grid = u.grid();
    let (n1, n2) = (grid.n1(), grid.n2());
    let eu: Vec<f64> = u.samples().iter().map(|&v| v.exp()).collect();
    let min_eu = eu.iter().copied().fold(f64::INFINITY, f64::min);
    let e1 = grid.e1();
    let e2 = grid.e2();
    let len1 = e1[0].hypot(e1[1]);
    let len2 = e2[0].hypot(e2[1]);

    // Straight closed loops along the two axes at full resolution; the
    // closed trapezoid rule is a plain sample sum. These seed the bound and
    // are themselves valid polygonal loops.
    let mut best0 = f64::INFINITY;
    for j in 0..n2 {
        let mut s = 0.0;
        for i in 0..n1 {
            s += eu[i * n2 + j];
        }
        best0 = best0.min(s * len1 / n1 as f64);
    }
    for i in 0..n1 {
        let mut s = 0.0;
        for j in 0..n2 {
            s += eu[i * n2 + j];
        }
        best0 = best0.min(s * len2 / n2 as f64);
    }

    let s1 = stride(n1, 128);
    let s2 = stride(n2, 128);
    let (m1, m2) = (n1 / s1, n2 / s2);
    let c1 = [e1[0] * s1 as f64 / n1 as f64, e1[1] * s1 as f64 / n1 as f64];
    let c2 = [e2[0] * s2 as f64 / n2 as f64, e2[1] * s2 as f64 / n2 as f64];

    // Direction set: prefer the 16-step set (coordinates up to 2); widen
    // while the coarse cells are skewed enough that the anisotropy exceeds
    // the budget of 0.07 on `tol_sys`. Every widening step shrinks the
    // largest angular gap, so the loop terminates quickly; the cap keeps the
    // per-node degree bounded on extremely sheared lattices.
    let mut dmax = 2i64;
    let mut dirs = directions(dmax);
    let step_vec = |&(di, dj): &(i64, i64)| {
        [
            di as f64 * c1[0] + dj as f64 * c2[0],
            di as f64 * c1[1] + dj as f64 * c2[1],
        ]
    };
    let mut factor = anisotropy_factor(&dirs.iter().map(step_vec).collect::<Vec<_>>());
    while factor * factor - 1.0 > 0.07 && dmax < 8 {
        dmax += 1;
        dirs = directions(dmax);
        factor = anisotropy_factor(&dirs.iter().map(step_vec).collect::<Vec<_>>());
    }

    // Homotopy classes that could still hold the optimum: length in class
    // (k, l) is at least min(e^u) times the flat length of k e1 + l e2.
    let mut classes = Vec::new();
    let mut kmax = 1i64;
    for k in -8i64..=8 {
        for l in -8i64..=8 {
            if (k, l) == (0, 0) || (k, l) < (-k, -l) {
                continue;
            }
            let v = [
                k as f64 * e1[0] + l as f64 * e2[0],
                k as f64 * e1[1] + l as f64 * e2[1],
            ];
            if min_eu * v[0].hypot(v[1]) <= best0 * (1.0 + 1e-12) {
                classes.push((k, l));
                kmax = kmax.max(k.abs()).max(l.abs());
            }
        }
    }

    // Sheets must cover every lifted node a sub-bound path can visit. Each
    // edge weighs at least min(e^u) times its flat length, so such a node
    // lies within flat distance best0 / min(e^u) of the basepoint, and its
    // sheet (a, b) satisfies |a e1 + b e2| <= radius + one cell diameter.
    let radius = best0 / min_eu + len1 + len2;
    let mut sheets_a = kmax;
    let mut sheets_b = kmax;
    for a in -8i64..=8 {
        for b in -8i64..=8 {
            let v = [
                a as f64 * e1[0] + b as f64 * e2[0],
                a as f64 * e1[1] + b as f64 * e2[1],
            ];
            if v[0].hypot(v[1]) <= radius {
                sheets_a = sheets_a.max(a.abs());
                sheets_b = sheets_b.max(b.abs());
            }
        }
    }
    let sheets_a = sheets_a.min(8);
    let sheets_b = sheets_b.min(8);

    // Chord weights: trapezoid of e^u over the fine samples under the chord.
    let ndirs = dirs.len();
    let mut weights = vec![0.0; m1 * m2 * ndirs];
    for (d, &(di, dj)) in dirs.iter().enumerate() {
        let fx = di * s1 as i64;
        let fy = dj * s2 as i64;
        let q = gcd(fx.unsigned_abs(), fy.unsigned_abs()) as i64;
        let (dx, dy) = (fx / q, fy / q);
        let chord = step_vec(&(di, dj));
        let chord_len = chord[0].hypot(chord[1]);
        for ci in 0..m1 {
            for cj in 0..m2 {
                let (i0, j0) = (ci * s1, cj * s2);
                let mut s = 0.0;
                for r in 0..=q {
                    let fi = (i0 as i64 + r * dx).rem_euclid(n1 as i64) as usize;
                    let fj = (j0 as i64 + r * dy).rem_euclid(n2 as i64) as usize;
                    let v = eu[fi * n2 + fj];
                    s += if r == 0 || r == q { 0.5 * v } else { v };
                }
                weights[(ci * m2 + cj) * ndirs + d] = s * chord_len / q as f64;
            }
        }
    }

    let search = Search {
        m1,
        m2,
        sheets_a,
        sheets_b,
        dirs,
        weights,
        c1,
        c2,
        min_eu,
        classes,
    };

    // Basepoints: first dmax columns and rows of the coarse grid (a cut
    // cover for steps of at most dmax coarse cells).
    let mut bases = Vec::new();
    for c in 0..(dmax as usize).min(m2) {
        for i in 0..m1 {
            bases.push((i, c));
        }
    }
    for r in 0..(dmax as usize).min(m1) {
        for j in (dmax as usize).min(m2)..m2 {
            bases.push((r, j));
        }
    }

    let best = AtomicU64::new(best0.to_bits());
    let states = search.states();
    let local_min = bases
        .par_iter()
        .map_init(
            || (vec![f64::INFINITY; states], Vec::new()),
            |(dist, touched), &(bi, bj)| search.through(bi, bj, &best, dist, touched),
        )
        .reduce(|| f64::INFINITY, f64::min);

    SystoleEstimate {
        length: best0.min(local_min),
        factor,
    }
}
