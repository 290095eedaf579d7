//! Periodic scalar fields on a lattice torus and their discrete Fourier
//! calculus: transforms, the flat spectral Laplacian, gradients, quadrature.
//!
//! Sample `(i, j)` of an `n1 x n2` grid sits at `w = (i/n1) e1 + (j/n2) e2`
//! in the plane, where `e1 = scale*(1, 0)` and `e2 = scale*(x, y)` span the
//! lattice. The matching Fourier basis consists of the waves
//! `exp(2 pi i <xi_pq, w>)` with skewed frequency vectors
//!
//! ```text
//! xi_pq = (q, (p - q x) / y) / scale,      <xi_pq, e1> = q,  <xi_pq, e2> = p,
//! ```
//!
//! so on samples a mode is a plain 2-d DFT mode: `q` is conjugate to `i` and
//! `p` to `j`. No re-gridding to a rectangle is ever needed; skew lattices are
//! handled exactly.
//!
//! Sign convention: the Laplacian has nonnegative spectrum, i.e. the mode
//! `(p, q)` is multiplied by `+4 pi^2 |xi_pq|^2`. With this convention the
//! Gaussian curvature of `e^{2u} g0` is `K = e^{-2u} laplacian(u)`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::moduli::ModuliPoint;
use crate::{Error, Result};

/// Discretization of a flat torus: a reduced lattice and sample counts along
/// the two generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    moduli: ModuliPoint,
    n1: usize,
    n2: usize,
}

impl TorusGrid {
    /// At least 8 samples per direction; anything less cannot carry even the
    /// lowest interesting modes.
    pub fn new(moduli: ModuliPoint, n1: usize, n2: usize) -> Result<Self> {
        if n1 < 8 || n2 < 8 {
            return Err(Error::InvalidInput(format!(
                "grid {n1} x {n2} too coarse; need at least 8 samples per direction"
            )));
        }
        Ok(TorusGrid { moduli, n1, n2 })
    }

    pub fn moduli(&self) -> ModuliPoint {
        self.moduli
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice generator along the `i` axis.
    pub fn e1(&self) -> [f64; 2] {
        self.moduli.lattice().v1
    }

    /// Lattice generator along the `j` axis.
    pub fn e2(&self) -> [f64; 2] {
        self.moduli.lattice().v2
    }

    /// Row-major sample index.
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n1 && j < self.n2);
        i * self.n2 + j
    }

    /// Plane position of sample `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        let e1 = self.e1();
        let e2 = self.e2();
        let a = i as f64 / self.n1 as f64;
        let b = j as f64 / self.n2 as f64;
        [a * e1[0] + b * e2[0], a * e1[1] + b * e2[1]]
    }

    /// Area of one grid cell, `scale^2 y / (n1 n2)`.
    pub fn cell_area(&self) -> f64 {
        self.moduli.flat_area() / self.len() as f64
    }

    /// Shortest representative of a plane displacement modulo the lattice.
    pub fn min_image(&self, d: [f64; 2]) -> [f64; 2] {
        let e1 = self.e1();
        let e2 = self.e2();
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        // Lattice coordinates of d, wrapped to [-1/2, 1/2).
        let a = (d[0] * e2[1] - d[1] * e2[0]) / det;
        let b = (e1[0] * d[1] - e1[1] * d[0]) / det;
        let a = a - a.round();
        let b = b - b.round();
        // The coordinate-wise wrap need not minimize Euclidean length on a
        // skew lattice; check the neighboring translates.
        let mut best = [f64::INFINITY, f64::INFINITY];
        let mut best_n = f64::INFINITY;
        for da in -1i32..=1 {
            for db in -1i32..=1 {
                let aa = a + da as f64;
                let bb = b + db as f64;
                let v = [aa * e1[0] + bb * e2[0], aa * e1[1] + bb * e2[1]];
                let n = v[0] * v[0] + v[1] * v[1];
                if n < best_n {
                    best_n = n;
                    best = v;
                }
            }
        }
        best
    }

    /// Frequency vector `xi_pq` for real-valued mode indices (real so that
    /// Nyquist liftings can be averaged).
    fn xi(&self, p: f64, q: f64) -> [f64; 2] {
        let m = self.moduli;
        [q / m.scale(), (p - q * m.x()) / (m.y() * m.scale())]
    }
}

/// A real periodic field sampled on a [`TorusGrid`], row-major in `(i, j)`.
///
/// Serializes as the field-file format
/// `{"lattice": {"x", "y", "scale"}, "grid": [n1, n2], "u": [samples]}`;
/// deserialization rejects wrong sample counts and non-finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldFile", into = "FieldFile")]
pub struct ScalarField {
    grid: TorusGrid,
    samples: Vec<f64>,
}

/// On-disk shape of a [`ScalarField`].
#[derive(Serialize, Deserialize)]
struct FieldFile {
    lattice: ModuliPoint,
    grid: [usize; 2],
    u: Vec<f64>,
}

impl From<ScalarField> for FieldFile {
    fn from(f: ScalarField) -> FieldFile {
        FieldFile {
            lattice: f.grid.moduli(),
            grid: [f.grid.n1(), f.grid.n2()],
            u: f.samples,
        }
    }
}

impl TryFrom<FieldFile> for ScalarField {
    type Error = Error;

    fn try_from(f: FieldFile) -> Result<ScalarField> {
        let grid = TorusGrid::new(f.lattice, f.grid[0], f.grid[1])?;
        ScalarField::from_samples(grid, f.u)
    }
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        ScalarField { grid, samples: vec![0.0; grid.len()] }
    }

    /// Samples a plane function onto the grid.
    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let mut samples = Vec::with_capacity(grid.len());
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                samples.push(f(grid.point(i, j)));
            }
        }
        ScalarField { grid, samples }
    }

    /// Wraps existing samples; rejects wrong length and non-finite entries.
    pub fn from_samples(grid: TorusGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples for a {} x {} grid, got {}",
                grid.len(),
                grid.n1(),
                grid.n2(),
                samples.len()
            )));
        }
        if !samples.iter().all(|s| s.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        Ok(ScalarField { grid, samples })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.samples[self.grid.index(i, j)]
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        neumaier_sum(self.samples.iter().copied()) / self.samples.len() as f64
    }

    /// Pointwise map onto the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            samples: self.samples.iter().map(|&s| f(s)).collect(),
        }
    }

    /// Pointwise combination of two fields on one grid.
    pub fn zip(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(ScalarField {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

/// Complex Fourier coefficients of a field, normalized so the `(0, 0)` entry
/// is the mean and `sum |c|^2` equals the mean of squared samples.
///
/// Layout mirrors the sample array: slot `(qi, pj)` at `qi * n2 + pj` holds
/// the mode with `q = qi` and `p = pj` read modulo the grid.
#[derive(Debug, Clone)]
pub struct FourierSpectrum {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

/// One or two integer liftings of a frequency slot; even grids have an
/// ambiguous Nyquist slot that represents both `+n/2` and `-n/2`.
fn liftings(k: usize, n: usize) -> ([f64; 2], usize) {
    if n % 2 == 0 && k == n / 2 {
        ([(n / 2) as f64, -((n / 2) as f64)], 2)
    } else if k <= n / 2 {
        ([k as f64, 0.0], 1)
    } else {
        ([k as f64 - n as f64, 0.0], 1)
    }
}

impl FourierSpectrum {
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// Coefficient of mode `(p, q)`, indices read modulo the grid.
    pub fn coeff(&self, p: i64, q: i64) -> Complex64 {
        let n1 = self.grid.n1() as i64;
        let n2 = self.grid.n2() as i64;
        let qi = q.rem_euclid(n1) as usize;
        let pj = p.rem_euclid(n2) as usize;
        self.coeffs[qi * self.grid.n2() + pj]
    }

    /// Real cosine/sine amplitudes of the canonical mode `(p, q)`: the field
    /// contribution is `A cos(2 pi <xi, w>) + B sin(2 pi <xi, w>)`. For the
    /// mean mode and self-conjugate Nyquist slots only `A` is meaningful.
    pub fn amplitude(&self, p: i64, q: i64) -> (f64, f64) {
        let c = self.coeff(p, q);
        let n1 = self.grid.n1() as i64;
        let n2 = self.grid.n2() as i64;
        let self_conjugate =
            (2 * q).rem_euclid(n1) == 0 && (2 * p).rem_euclid(n2) == 0;
        if self_conjugate {
            (c.re, 0.0)
        } else {
            (2.0 * c.re, -2.0 * c.im)
        }
    }

    /// Applies a complex multiplier given as a function of the lifted real
    /// frequency pair `(p, q)`. Nyquist slots average the multiplier over
    /// their liftings, which keeps real fields real: even multipliers get the
    /// symmetric value, odd ones (derivatives) vanish there.
    pub fn apply_multiplier(&self, m: impl Fn(f64, f64) -> Complex64) -> FourierSpectrum {
        let n1 = self.grid.n1();
        let n2 = self.grid.n2();
        let mut out = self.coeffs.clone();
        for qi in 0..n1 {
            let (qs, nq) = liftings(qi, n1);
            for pj in 0..n2 {
                let (ps, np) = liftings(pj, n2);
                let mut acc = Complex64::new(0.0, 0.0);
                for q in &qs[..nq] {
                    for p in &ps[..np] {
                        acc += m(*p, *q);
                    }
                }
                out[qi * n2 + pj] *= acc / (nq * np) as f64;
            }
        }
        FourierSpectrum { grid: self.grid, coeffs: out }
    }

    /// Inverse transform back to samples. Exact (to roundoff) inverse of
    /// [`dft`]; imaginary parts cancel for spectra of real fields.
    pub fn idft(&self) -> ScalarField {
        let mut buf = self.coeffs.clone();
        fft2(&mut buf, self.grid.n1(), self.grid.n2(), rustfft::FftDirection::Inverse);
        ScalarField {
            grid: self.grid,
            samples: buf.iter().map(|c| c.re).collect(),
        }
    }

    /// Sum of squared coefficient magnitudes (equals the mean of squared
    /// samples by Parseval).
    pub fn total_power(&self) -> f64 {
        neumaier_sum(self.coeffs.iter().map(|c| c.norm_sqr()))
    }

    /// Parseval sum `sum w(xi_pq) |c_pq|^2` over all modes, the spectral
    /// value of the mean of `w`-weighted squared derivatives. Nyquist slots
    /// average the weight over their liftings, matching [`apply_multiplier`].
    ///
    /// [`apply_multiplier`]: FourierSpectrum::apply_multiplier
    pub fn weighted_power(&self, w: impl Fn([f64; 2]) -> f64) -> f64 {
        let n1 = self.grid.n1();
        let n2 = self.grid.n2();
        let terms = (0..n1).flat_map(|qi| {
            let (qs, nq) = liftings(qi, n1);
            let w = &w;
            let grid = &self.grid;
            let coeffs = &self.coeffs;
            (0..n2).map(move |pj| {
                let (ps, np) = liftings(pj, n2);
                let mut acc = 0.0;
                for q in &qs[..nq] {
                    for p in &ps[..np] {
                        acc += w(grid.xi(*p, *q));
                    }
                }
                coeffs[qi * n2 + pj].norm_sqr() * acc / (nq * np) as f64
            })
        });
        neumaier_sum(terms)
    }

    /// Fraction of non-mean spectral power carried by modes beyond half the
    /// Nyquist frequency on either axis. A well-resolved smooth field keeps
    /// this tiny; values near 1 flag an under-resolved feature.
    pub fn high_frequency_fraction(&self) -> f64 {
        let n1 = self.grid.n1();
        let n2 = self.grid.n2();
        let mut total = 0.0;
        let mut high = 0.0;
        for qi in 0..n1 {
            let (qs, _) = liftings(qi, n1);
            for pj in 0..n2 {
                if qi == 0 && pj == 0 {
                    continue;
                }
                let (ps, _) = liftings(pj, n2);
                let pw = self.coeffs[qi * n2 + pj].norm_sqr();
                total += pw;
                if qs[0].abs() > n1 as f64 / 4.0 || ps[0].abs() > n2 as f64 / 4.0 {
                    high += pw;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            high / total
        }
    }
}

/// In-place 2-d FFT over the row-major `n1 x n2` buffer: rows (length `n2`)
/// first, then columns through a gather/scatter scratch.
fn fft2(buf: &mut [Complex64], n1: usize, n2: usize, dir: rustfft::FftDirection) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(n2, dir);
    let col_fft = planner.plan_fft(n1, dir);
    for row in buf.chunks_exact_mut(n2) {
        row_fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n1];
    for j in 0..n2 {
        for i in 0..n1 {
            col[i] = buf[i * n2 + j];
        }
        col_fft.process(&mut col);
        for i in 0..n1 {
            buf[i * n2 + j] = col[i];
        }
    }
}

/// Forward transform onto the lattice-adapted Fourier basis.
pub fn dft(field: &ScalarField) -> FourierSpectrum {
    let grid = field.grid();
    let mut buf: Vec<Complex64> =
        field.samples().iter().map(|&s| Complex64::new(s, 0.0)).collect();
    fft2(&mut buf, grid.n1(), grid.n2(), rustfft::FftDirection::Forward);
    let norm = 1.0 / grid.len() as f64;
    for c in &mut buf {
        *c *= norm;
    }
    FourierSpectrum { grid, coeffs: buf }
}

/// Spectral Laplacian of the flat metric with nonnegative-spectrum sign:
/// mode `(p, q)` is multiplied by `+4 pi^2 |xi_pq|^2`.
pub fn laplacian(field: &ScalarField) -> ScalarField {
    let grid = field.grid();
    dft(field)
        .apply_multiplier(|p, q| {
            let xi = grid.xi(p, q);
            let w = 4.0 * std::f64::consts::PI.powi(2) * (xi[0] * xi[0] + xi[1] * xi[1]);
            Complex64::new(w, 0.0)
        })
        .idft()
}

/// Spectral partial derivatives `(d/dw1, d/dw2)` in plane coordinates.
pub fn gradient(field: &ScalarField) -> (ScalarField, ScalarField) {
    let grid = field.grid();
    let spec = dft(field);
    let two_pi = 2.0 * std::f64::consts::PI;
    let dx = spec
        .apply_multiplier(|p, q| Complex64::new(0.0, two_pi * grid.xi(p, q)[0]))
        .idft();
    let dy = spec
        .apply_multiplier(|p, q| Complex64::new(0.0, two_pi * grid.xi(p, q)[1]))
        .idft();
    (dx, dy)
}

/// Pointwise flat gradient norm `|grad u|` via spectral partial derivatives.
pub fn grad_norm(field: &ScalarField) -> ScalarField {
    let (dx, dy) = gradient(field);
    dx.zip(&dy, |a, b| a.hypot(b)).expect("same grid")
}

/// Trigonometric interpolation onto a finer grid over the same lattice:
/// the unique band-limited extension, exact for fields the source grid
/// resolves. Ambiguous Nyquist slots split their weight over both liftings,
/// which keeps real fields real.
pub fn resample(field: &ScalarField, n1: usize, n2: usize) -> Result<ScalarField> {
    let src = field.grid();
    if n1 < src.n1() || n2 < src.n2() {
        return Err(Error::InvalidInput(format!(
            "resample only refines: {} x {} -> {n1} x {n2}",
            src.n1(),
            src.n2()
        )));
    }
    let dst = TorusGrid::new(src.moduli(), n1, n2)?;
    if dst == src {
        return Ok(field.clone());
    }
    let spec = dft(field);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dst.len()];
    for qi in 0..src.n1() {
        let (qs, nq) = liftings(qi, src.n1());
        for pj in 0..src.n2() {
            let (ps, np) = liftings(pj, src.n2());
            let share = spec.coeffs[qi * src.n2() + pj] / (nq * np) as f64;
            for q in &qs[..nq] {
                for p in &ps[..np] {
                    let qd = (*q as i64).rem_euclid(n1 as i64) as usize;
                    let pd = (*p as i64).rem_euclid(n2 as i64) as usize;
                    coeffs[qd * n2 + pd] += share;
                }
            }
        }
    }
    Ok(FourierSpectrum { grid: dst, coeffs }.idft())
}

/// Quadrature `sum samples * weight * cell_area`, exact for trigonometric
/// polynomials the grid resolves. Compensated summation keeps the result
/// independent of evaluation order.
pub fn integrate(field: &ScalarField, weight: Option<&ScalarField>) -> Result<f64> {
    let total = match weight {
        None => neumaier_sum(field.samples().iter().copied()),
        Some(w) => {
            if w.grid() != field.grid() {
                return Err(Error::GridMismatch);
            }
            neumaier_sum(
                field
                    .samples()
                    .iter()
                    .zip(w.samples())
                    .map(|(&a, &b)| a * b),
            )
        }
    };
    Ok(total * field.grid().cell_area())
}

/// Neumaier-compensated sum: deterministic and immune to cancellation between
/// large intermediate terms.
pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
