//! Uniform dyadic grids on a centered box, sampled functions, midpoint
//! quadrature, and a unitary discrete Fourier transform.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! - the domain is `[-L/2, L/2)^dim` with `N` points per axis, `h = L/N`;
//! - sample points are cell centers `x_i = -L/2 + (i + 1/2) h`;
//! - flat storage is row-major with axis 0 slowest;
//! - spectra are stored in wrapped FFT order; the signed frequency index
//!   runs over `{-N/2, ..., N/2 - 1}` per axis and the physical frequency
//!   is `k / L`;
//! - the DFT is unitary, so `sum |F_k|^2 = sum |f_j|^2` and
//!   `integrate(|f|^2) = h^dim * sum |F_k|^2`.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Hard cap on total point count; guards against accidental huge allocations.
pub const MAX_POINTS: usize = 1 << 26;

/// Whether out-of-box reads are zero (`Box`) or wrap periodically (`Torus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    Box,
    Torus,
}

/// A uniform grid on `[-L/2, L/2)^dim`, `dim` in 1..=3, `N` a power of two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    extent: f64,
    points_per_axis: usize,
    mode: GridMode,
}

impl Grid {
    pub fn new(dim: usize, extent: f64, points_per_axis: usize, mode: GridMode) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::invalid(format!("grid dim must be 1..=3, got {dim}")));
        }
        if !extent.is_finite() || extent <= 0.0 {
            return Err(Error::invalid(format!("grid extent must be positive, got {extent}")));
        }
        let n = points_per_axis;
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid(format!(
                "points per axis must be a power of two >= 2, got {n}"
            )));
        }
        if n.pow(dim as u32) > MAX_POINTS {
            return Err(Error::invalid(format!(
                "grid has {} points, budget is {MAX_POINTS}",
                n.pow(dim as u32)
            )));
        }
        Ok(Grid { dim, extent, points_per_axis: n, mode })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    /// Same geometry with the other read semantics.
    pub fn with_mode(&self, mode: GridMode) -> Grid {
        Grid { mode, ..*self }
    }

    /// Spacing `h = L / N`.
    pub fn spacing(&self) -> f64 {
        self.extent / self.points_per_axis as f64
    }

    /// Total number of points `N^dim`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Measure of one cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Measure of the whole box, `L^dim`.
    pub fn volume(&self) -> f64 {
        self.extent.powi(self.dim as i32)
    }

    /// Coordinate of the `i`-th cell center along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.extent + (i as f64 + 0.5) * self.spacing()
    }

    /// Per-axis index bounds as a padded `[usize; 3]` (unused axes are 1).
    pub fn shape(&self) -> [usize; 3] {
        let mut s = [1usize; 3];
        for d in s.iter_mut().take(self.dim) {
            *d = self.points_per_axis;
        }
        s
    }

    /// Row-major strides matching [`Grid::shape`].
    pub fn strides(&self) -> [usize; 3] {
        let s = self.shape();
        [s[1] * s[2], s[2], 1]
    }

    /// Multi-index of a flat index, padded with zeros.
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let st = self.strides();
        [flat / st[0], (flat / st[1]) % self.shape()[1], flat % self.shape()[2]]
    }

    /// Flat index of a multi-index.
    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        let st = self.strides();
        idx[0] * st[0] + idx[1] * st[1] + idx[2] * st[2]
    }

    /// Physical coordinates of a flat index, padded with zeros.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let mi = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coord(mi[a]);
        }
        x
    }

    /// Signed frequency index of a wrapped spectral index along one axis.
    pub fn signed_freq_index(&self, k: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Physical frequency vector `k/L` of a flat spectral index.
    pub fn frequency(&self, flat: usize) -> [f64; 3] {
        let mi = self.multi_index(flat);
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = self.signed_freq_index(mi[a]) as f64 / self.extent;
        }
        xi
    }
}

/// Real samples on a [`Grid`], stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps a value vector; all values must be finite and the length `N^dim`.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("grid function values".into()));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { values: vec![0.0; grid.len()], grid }
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64; 3]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Midpoint-rule integral `sum_i f(x_i) h^dim`.
    pub fn integrate(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) * self.grid.cell_volume()
    }

    /// Pointwise map; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        GridFunction::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_map(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("zip_map over different grids".into()));
        }
        GridFunction::new(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn abs(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Result<GridFunction> {
        self.map(|v| c * v)
    }

    /// Largest absolute value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Raw little-endian 64-bit floats, row-major.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Inverse of [`GridFunction::to_le_bytes`] for a known grid.
    pub fn from_le_bytes(grid: Grid, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != grid.len() * 8 {
            return Err(Error::invalid(format!(
                "byte count {} does not match grid size {} * 8",
                bytes.len(),
                grid.len()
            )));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(grid, values)
    }

    /// CSV rows `x0[,x1[,x2]],value`, one grid point per line.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let dim = self.grid.dim();
        for (i, v) in self.values.iter().enumerate() {
            let x = self.grid.point(i);
            for c in x.iter().take(dim) {
                write!(w, "{c:.17e},")?;
            }
            writeln!(w, "{v:.17e}")?;
        }
        Ok(())
    }

    /// Reads the sample nearest to an arbitrary physical point, honoring the
    /// grid mode: zero outside the box, or periodic wrap.
    pub fn sample_multilinear(&self, x: &[f64; 3]) -> f64 {
        let g = &self.grid;
        let n = g.points_per_axis as i64;
        let h = g.spacing();
        let dim = g.dim;
        // Fractional index coordinates: x = -L/2 + (t + 1/2) h.
        let mut base = [0i64; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..dim {
            let t = (x[a] + 0.5 * g.extent) / h - 0.5;
            let b = t.floor();
            base[a] = b as i64;
            frac[a] = t - b;
        }
        let mut acc = 0.0;
        let corners = 1usize << dim;
        for c in 0..corners {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            let mut in_box = true;
            for a in 0..dim {
                let bit = (c >> a) & 1;
                let j = base[a] + bit as i64;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                match g.mode {
                    GridMode::Torus => idx[a] = j.rem_euclid(n) as usize,
                    GridMode::Box => {
                        if (0..n).contains(&j) {
                            idx[a] = j as usize;
                        } else {
                            in_box = false;
                        }
                    }
                }
            }
            if in_box && w != 0.0 {
                acc += w * self.values[g.flat_index(idx)];
            }
        }
        acc
    }
}

/// Complex samples on a [`Grid`]; used for spectra and multiplier outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexGridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("complex grid function values".into()));
        }
        Ok(ComplexGridFunction { grid, values })
    }

    pub fn from_real(f: &GridFunction) -> Self {
        ComplexGridFunction {
            grid: *f.grid(),
            values: f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Pointwise modulus as a real function.
    pub fn modulus(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v.norm()).collect(),
        }
    }

    /// Real part as a real function.
    pub fn real_part(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v.re).collect(),
        }
    }

    /// Largest imaginary magnitude; a cheap check when a result should be real.
    pub fn max_imag_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.im.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }
}

/// Unitary DFT of a real field; see the module header for conventions.
pub fn dft(f: &GridFunction) -> ComplexGridFunction {
    dft_complex(&ComplexGridFunction::from_real(f))
}

/// Unitary DFT of a complex field.
pub fn dft_complex(f: &ComplexGridFunction) -> ComplexGridFunction {
    transform(f, true)
}

/// Unitary inverse DFT; `idft(dft(f))` reproduces `f` to roundoff.
pub fn idft(spectrum: &ComplexGridFunction) -> ComplexGridFunction {
    transform(spectrum, false)
}

fn transform(f: &ComplexGridFunction, forward: bool) -> ComplexGridFunction {
    let grid = *f.grid();
    let n = grid.points_per_axis();
    let mut buf = f.values().to_vec();

    // Phase table turning index-space FFTs into transforms against the
    // physical waves exp(+-2 pi i k x / L) with x measured from cell centers;
    // the 1/sqrt(N) per axis makes the whole transform unitary.
    let x0_over_l = -0.5 + 0.5 / n as f64;
    let scale = 1.0 / (n as f64).sqrt();
    let sign = if forward { -1.0 } else { 1.0 };
    let phases: Vec<Complex64> = (0..n)
        .map(|k| {
            let ks = grid.signed_freq_index(k) as f64;
            Complex64::from_polar(scale, sign * std::f64::consts::TAU * ks * x0_over_l)
        })
        .collect();

    let mut planner = FftPlanner::<f64>::new();
    let fft: Arc<dyn Fft<f64>> = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };

    let shape = grid.shape();
    let strides = grid.strides();
    for axis in 0..grid.dim() {
        if !forward {
            apply_axis_phase(&mut buf, &shape, strides[axis], axis, &phases);
        }
        fft_along_axis(&mut buf, n, strides[axis], &shape, axis, fft.as_ref());
        if forward {
            apply_axis_phase(&mut buf, &shape, strides[axis], axis, &phases);
        }
    }

    ComplexGridFunction { grid, values: buf }
}

fn fft_along_axis(
    buf: &mut [Complex64],
    n: usize,
    stride: usize,
    shape: &[usize; 3],
    axis: usize,
    fft: &dyn Fft<f64>,
) {
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for base in line_bases(shape, axis) {
        for (t, v) in line.iter_mut().enumerate() {
            *v = buf[base + t * stride];
        }
        fft.process(&mut line);
        for (t, v) in line.iter().enumerate() {
            buf[base + t * stride] = *v;
        }
    }
}

fn apply_axis_phase(
    buf: &mut [Complex64],
    shape: &[usize; 3],
    stride: usize,
    axis: usize,
    phases: &[Complex64],
) {
    for base in line_bases(shape, axis) {
        for (t, p) in phases.iter().enumerate() {
            buf[base + t * stride] *= p;
        }
    }
}

/// Neumaier-compensated sum; keeps quadrature and modular sums accurate well
/// below the tolerances the norm routines promise.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
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

/// Flat offsets of all lines along `axis` in a row-major array.
fn line_bases(shape: &[usize; 3], axis: usize) -> Vec<usize> {
    let strides = [shape[1] * shape[2], shape[2], 1];
    let mut bases = Vec::new();
    for i0 in 0..shape[0] {
        for i1 in 0..shape[1] {
            for i2 in 0..shape[2] {
                let idx = [i0, i1, i2];
                if idx[axis] != 0 {
                    continue;
                }
                bases.push(i0 * strides[0] + i1 * strides[1] + i2 * strides[2]);
            }
        }
    }
    bases
}
