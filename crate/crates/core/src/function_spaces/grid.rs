use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{CVec, C64};

/// Uniform periodic grid `x_j = −L + j·(2L/P)`, `j = 0..P`, with `P` a power of two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    half_width: f64,
    points: usize,
}

impl LineGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Validation(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::Validation(format!(
                "grid point count must be a power of two >= 2, got {points}"
            )));
        }
        Ok(LineGrid { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    /// Angular frequencies of the DFT bins in FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        let p = self.points as i64;
        (0..p)
            .map(|k| {
                let k = if k < p / 2 { k } else { k - p };
                PI * k as f64 / self.half_width
            })
            .collect()
    }

    pub fn sample(&self, f: impl FnMut(f64) -> C64) -> SampledFunction {
        SampledFunction::new(*self, CVec::from_iterator(self.points, self.nodes().into_iter().map(f)))
    }

    pub(crate) fn forward(&self, values: &CVec) -> Vec<C64> {
        let mut buf: Vec<C64> = values.iter().copied().collect();
        FftPlanner::new().plan_fft_forward(self.points).process(&mut buf);
        buf
    }

    pub(crate) fn inverse(&self, mut spectrum: Vec<C64>) -> CVec {
        FftPlanner::new().plan_fft_inverse(self.points).process(&mut spectrum);
        let scale = 1.0 / self.points as f64;
        CVec::from_iterator(self.points, spectrum.into_iter().map(|z| z * scale))
    }
}

/// Function values on a [`LineGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: LineGrid,
    values: CVec,
}

impl SampledFunction {
    pub fn new(grid: LineGrid, values: CVec) -> Self {
        assert_eq!(values.len(), grid.points(), "sample count must match the grid");
        SampledFunction { grid, values }
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }

    pub fn values(&self) -> &CVec {
        &self.values
    }

    fn check_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::dim("sampled functions live on different grids"));
        }
        Ok(())
    }

    /// Quadrature inner product `h Σ_j f_j conj(g_j)`.
    pub fn inner(&self, other: &SampledFunction) -> Result<C64> {
        self.check_grid(other)?;
        Ok(other.values.dotc(&self.values) * self.grid.spacing())
    }

    pub fn norm(&self) -> f64 {
        (self.values.norm_squared() * self.grid.spacing()).sqrt()
    }

    pub fn distance(&self, other: &SampledFunction) -> Result<f64> {
        self.check_grid(other)?;
        Ok(((&self.values - &other.values).norm_squared() * self.grid.spacing()).sqrt())
    }

    /// Unitary DFT coefficients of `√h f`; their Euclidean inner product equals
    /// the quadrature inner product.
    pub fn to_coefficients(&self) -> CVec {
        let scale = (self.grid.spacing() / self.grid.points() as f64).sqrt();
        CVec::from_iterator(
            self.grid.points(),
            self.grid.forward(&self.values).into_iter().map(|z| z * scale),
        )
    }

    pub fn from_coefficients(grid: LineGrid, coeffs: &CVec) -> Result<Self> {
        if coeffs.len() != grid.points() {
            return Err(Error::dim(format!(
                "{} coefficients on a grid of {} points",
                coeffs.len(),
                grid.points()
            )));
        }
        let scale = (grid.points() as f64 / grid.spacing()).sqrt();
        let values = grid.inverse(coeffs.iter().map(|z| z * scale).collect());
        Ok(SampledFunction::new(grid, values))
    }

    /// Fraction of spectral energy in the outer eighth of the band near Nyquist.
    pub fn near_nyquist_fraction(&self) -> f64 {
        let spec = self.grid.forward(&self.values);
        let p = self.grid.points();
        let cutoff = 7 * p / 16;
        let total: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let high: f64 = spec
            .iter()
            .enumerate()
            .filter(|(k, _)| (*k).min(p - *k) > cutoff)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        high / total
    }

    /// Derivative through the Fourier symbol `i y`.
    pub fn derivative(&self) -> SampledFunction {
        let spec = self.grid.forward(&self.values);
        let ys = self.grid.frequencies();
        let spec = spec.into_iter().zip(ys).map(|(z, y)| z * C64::new(0.0, y)).collect();
        SampledFunction::new(self.grid, self.grid.inverse(spec))
    }

    /// `(x, re, im)` rows for CSV export.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        self.grid
            .nodes()
            .into_iter()
            .zip(self.values.iter())
            .map(|(x, z)| (x, z.re, z.im))
            .collect()
    }
}
