//! Uniform one-dimensional grids, complex wavefields, and the transform
//! machinery connecting the position and momentum representations.
//!
//! Conventions (hbar = 1 throughout):
//!
//! - position grid `x_j = x0 + j dx`, `j = 0 .. N-1`, `N` a power of two;
//! - momentum grid `p_m = (m - N/2) dp` with `dp = 2 pi / (N dx)`, ascending;
//! - unitary transform `phi(p) = (2 pi)^(-1/2) ∫ psi(x) e^(-i p x) dx`,
//!   discretized by the trapezoid rule on the periodic domain, which makes
//!   the pair exactly unitary on the grid (Parseval holds to roundoff).

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid length {0} is not a power of two")]
    LengthNotPowerOfTwo(usize),
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("field is identically zero")]
    ZeroField,
    #[error("expected {expected:?} representation, got {got:?}")]
    WrongRepresentation {
        expected: Representation,
        got: Representation,
    },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Which explicate order a field belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    /// Column label used in exports: `x` or `p`.
    pub fn coordinate_label(&self) -> &'static str {
        match self {
            Representation::Position => "x",
            Representation::Momentum => "p",
        }
    }
}

/// Uniform grid with a power-of-two point count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    origin: f64,
    spacing: f64,
    len: usize,
}

impl Grid {
    pub fn new(origin: f64, spacing: f64, len: usize) -> Result<Self, GridError> {
        if !len.is_power_of_two() {
            return Err(GridError::LengthNotPowerOfTwo(len));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(GridError::BadSpacing(spacing));
        }
        Ok(Self {
            origin,
            spacing,
            len,
        })
    }

    /// Grid covering `[-half_width, half_width)` with `len` points.
    pub fn symmetric(half_width: f64, len: usize) -> Result<Self, GridError> {
        Self::new(-half_width, 2.0 * half_width / len as f64, len)
    }

    /// Self-dual grid: `dx = dp`, so position and momentum grids coincide.
    /// Requires `dx = sqrt(2 pi / N)`.
    pub fn self_dual(len: usize) -> Result<Self, GridError> {
        let spacing = (2.0 * PI / len as f64).sqrt();
        Self::new(-spacing * (len as f64) / 2.0, spacing, len)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, j: usize) -> f64 {
        self.origin + self.spacing * j as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|j| self.point(j))
    }

    /// Upper edge of the periodic domain (one spacing past the last point).
    pub fn upper_edge(&self) -> f64 {
        self.origin + self.spacing * self.len as f64
    }

    /// Grid of the conjugate representation.
    pub fn momentum_dual(&self) -> Grid {
        let dp = 2.0 * PI / (self.spacing * self.len as f64);
        Grid {
            origin: -dp * (self.len as f64) / 2.0,
            spacing: dp,
            len: self.len,
        }
    }

    /// Index range of the central `fraction` of the grid, used to keep
    /// residual aggregation away from the periodic boundary.
    pub fn interior(&self, fraction: f64) -> std::ops::Range<usize> {
        let margin = ((1.0 - fraction) / 2.0 * self.len as f64).ceil() as usize;
        margin..self.len - margin
    }
}

/// Discretized complex amplitude tagged with its representation.
#[derive(Debug, Clone)]
pub struct WaveField {
    grid: Grid,
    representation: Representation,
    values: Vec<Complex64>,
    time: f64,
}

impl WaveField {
    pub fn new(
        grid: Grid,
        representation: Representation,
        values: Vec<Complex64>,
        time: f64,
    ) -> Self {
        assert_eq!(values.len(), grid.len());
        Self {
            grid,
            representation,
            values,
            time,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    /// Discrete L2 norm `sqrt(sum |psi|^2 dx)`.
    pub fn norm(&self) -> f64 {
        (self
            .values
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            * self.grid.spacing())
        .sqrt()
    }

    /// Rescales to unit norm.
    pub fn normalize(&mut self) -> Result<(), GridError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(GridError::ZeroField);
        }
        for v in &mut self.values {
            *v /= n;
        }
        Ok(())
    }

    /// Weighted inner product `sum conj(a) b dx`.
    pub fn inner(&self, other: &WaveField) -> Result<Complex64, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.spacing())
    }

    /// Probability density `|psi|^2` per point.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Mean of the grid coordinate under `|psi|^2`.
    pub fn coordinate_mean(&self) -> f64 {
        let dx = self.grid.spacing();
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| self.grid.point(j) * v.norm_sqr() * dx)
            .sum()
    }

    /// Standard deviation of the grid coordinate under `|psi|^2`.
    pub fn coordinate_std(&self) -> f64 {
        let mean = self.coordinate_mean();
        let dx = self.grid.spacing();
        let var: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let d = self.grid.point(j) - mean;
                d * d * v.norm_sqr() * dx
            })
            .sum();
        var.sqrt()
    }

    fn expect_representation(&self, expected: Representation) -> Result<(), GridError> {
        if self.representation != expected {
            return Err(GridError::WrongRepresentation {
                expected,
                got: self.representation,
            });
        }
        Ok(())
    }

    /// Unitary transform to the momentum representation.
    pub fn to_momentum(&self) -> Result<WaveField, GridError> {
        self.expect_representation(Representation::Position)?;
        let dual = self.grid.momentum_dual();
        let ops = SpectralOps::new(&self.grid);
        // phi(p_m) = dx/sqrt(2 pi) e^{-i p_m x0} DFT[(-1)^j psi_j]_m
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| if j % 2 == 0 { *v } else { -*v })
            .collect();
        ops.forward.process(&mut buf);
        let scale = self.grid.spacing() / (2.0 * PI).sqrt();
        let x0 = self.grid.origin();
        let values = buf
            .iter()
            .enumerate()
            .map(|(m, v)| {
                let p = dual.point(m);
                v * Complex64::from_polar(scale, -p * x0)
            })
            .collect();
        Ok(WaveField::new(
            dual,
            Representation::Momentum,
            values,
            self.time,
        ))
    }

    /// Inverse of [`WaveField::to_momentum`]; requires the momentum grid to
    /// be the dual of `position_grid`.
    pub fn from_momentum(&self, position_grid: &Grid) -> Result<WaveField, GridError> {
        self.expect_representation(Representation::Momentum)?;
        if position_grid.momentum_dual() != self.grid {
            return Err(GridError::GridMismatch);
        }
        let ops = SpectralOps::new(position_grid);
        let x0 = position_grid.origin();
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .enumerate()
            .map(|(m, v)| {
                let p = self.grid.point(m);
                v * Complex64::from_polar(1.0, p * x0)
            })
            .collect();
        ops.inverse.process(&mut buf);
        let scale = self.grid.spacing() / (2.0 * PI).sqrt();
        let values = buf
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                v * Complex64::from(sign * scale)
            })
            .collect();
        Ok(WaveField::new(
            *position_grid,
            Representation::Position,
            values,
            self.time,
        ))
    }
}

/// FFT plans and the signed-frequency ladder for one grid shape.
pub struct SpectralOps {
    len: usize,
    spacing: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralOps {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len: grid.len(),
            spacing: grid.spacing(),
            forward: planner.plan_fft_forward(grid.len()),
            inverse: planner.plan_fft_inverse(grid.len()),
        }
    }

    /// Signed angular frequency for FFT bin `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.len;
        let k = if k < n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        };
        2.0 * PI * k / (n as f64 * self.spacing)
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / self.len as f64;
        for v in buf {
            *v *= scale;
        }
    }

    /// Spectral derivative of the given order on the periodic grid.
    pub fn derivative(&self, values: &[Complex64], order: u32) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        for (k, v) in buf.iter_mut().enumerate() {
            let ik = Complex64::new(0.0, self.frequency(k));
            *v *= ik.powu(order);
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        for v in &mut buf {
            *v *= scale;
        }
        buf
    }
}

/// Fourth-order central difference of `values` on a periodic grid.
pub fn fd4_second_derivative(values: &[f64], spacing: f64) -> Vec<f64> {
    let n = values.len();
    let h2 = spacing * spacing;
    (0..n)
        .map(|j| {
            let at = |off: isize| values[((j as isize + off).rem_euclid(n as isize)) as usize];
            (-at(-2) + 16.0 * at(-1) - 30.0 * at(0) + 16.0 * at(1) - at(2)) / (12.0 * h2)
        })
        .collect()
}

/// Fourth-order central first derivative on a periodic grid.
pub fn fd4_first_derivative(values: &[f64], spacing: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|j| {
            let at = |off: isize| values[((j as isize + off).rem_euclid(n as isize)) as usize];
            (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * spacing)
        })
        .collect()
}
