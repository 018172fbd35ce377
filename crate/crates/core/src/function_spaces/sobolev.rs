use crate::error::{Error, Result};
use crate::linalg::{identity_residual, CMat, C64};
use crate::sequence::SequenceFamily;
use crate::triplet::WeightedTriplet;

use super::grid::{LineGrid, SampledFunction};
use super::hermite::hermite_basis;

/// Largest near-Nyquist spectral fraction accepted before refining the grid.
pub const ALIASING_LIMIT: f64 = 1e-10;

const DEFAULT_POINTS: usize = 1024;
const MAX_POINTS: usize = 1 << 16;

/// Multiply the Fourier coefficients of `f` by `(1 + y²)^{s/2}`.
/// `s = 1` is `(I − D²)^{1/2}`, `s = −1` its inverse.
pub fn sobolev_multiplier(grid: &LineGrid, s: f64, f: &SampledFunction) -> Result<SampledFunction> {
    if f.grid() != grid {
        return Err(Error::dim("function is sampled on a different grid"));
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    let spec = grid.forward(f.values());
    let spec = spec
        .into_iter()
        .zip(grid.frequencies())
        .map(|(z, y)| z * (1.0 + y * y).powf(0.5 * s))
        .collect();
    Ok(SampledFunction::new(*grid, grid.inverse(spec)))
}

/// Default grid for `count` Hermite functions: `L = max(20, 2√(2M+1))`,
/// `P = 1024`, refined until the support and aliasing checks pass.
pub fn auto_grid(count: usize) -> Result<LineGrid> {
    let mut half_width = 20f64.max(2.0 * ((2 * count + 1) as f64).sqrt());
    let mut points = DEFAULT_POINTS;
    loop {
        let grid = LineGrid::new(half_width, points)?;
        match hermite_basis(&grid, count) {
            Err(Error::Support { .. }) if points < MAX_POINTS => {
                half_width *= 2.0;
                points *= 2;
            }
            Err(e) => return Err(e),
            Ok(phis) => {
                let worst = phis.iter().map(|f| f.near_nyquist_fraction()).fold(0.0, f64::max);
                if worst < ALIASING_LIMIT {
                    return Ok(grid);
                }
                if points >= MAX_POINTS {
                    return Err(Error::Validation(format!(
                        "near-Nyquist spectral fraction {worst:e} at the largest grid ({points} points)"
                    )));
                }
                points *= 2;
            }
        }
    }
}

/// The `W^{1,2}` family `ξ_n = (I − D²)^{-1/2} φ_n` and its diagnostics.
#[derive(Debug, Clone)]
pub struct SobolevBasis {
    pub grid: LineGrid,
    pub hermite: Vec<SampledFunction>,
    pub xi: Vec<SampledFunction>,
    /// Duals `ζ_n = (I − D²)^{1/2} φ_n` in `W^{-1,2}`.
    pub zeta: Vec<SampledFunction>,
    /// Family and dual in unitary Fourier coordinates, where the triplet is
    /// diagonal with weights `(1 + y²)^{1/2}`.
    pub family: SequenceFamily,
    /// `max_n ‖(I − D²)^{1/2} ξ_n − φ_n‖₂`.
    pub construction_residual: f64,
    /// `max |⟨φ_m, φ_n⟩ − δ_mn|` by quadrature.
    pub hermite_gram_residual: f64,
    /// `max |⟨ξ_i, ξ_j⟩′_{1,2} − δ_ij|`.
    pub modified_gram_residual: f64,
    /// `‖ξ_n‖₂` per `n`.
    pub xi_norms: Vec<f64>,
    /// `(‖ξ_n‖₂ + ‖Dξ_n‖₂) / ‖ξ_n‖′_{1,2}` per `n`; lies in `[1, √2]`.
    pub norm_ratios: Vec<f64>,
    /// Worst near-Nyquist spectral fraction of the inputs.
    pub aliasing: f64,
}

fn gram(fs: &[SampledFunction]) -> Result<CMat> {
    let m = fs.len();
    let mut g = CMat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            g[(i, j)] = fs[j].inner(&fs[i])?;
        }
    }
    Ok(g)
}

pub fn sobolev_basis(grid: &LineGrid, count: usize) -> Result<SobolevBasis> {
    let hermite = hermite_basis(grid, count)?;
    let xi = hermite
        .iter()
        .map(|f| sobolev_multiplier(grid, -1.0, f))
        .collect::<Result<Vec<_>>>()?;
    let zeta = hermite
        .iter()
        .map(|f| sobolev_multiplier(grid, 1.0, f))
        .collect::<Result<Vec<_>>>()?;
    let lifted = xi
        .iter()
        .map(|f| sobolev_multiplier(grid, 1.0, f))
        .collect::<Result<Vec<_>>>()?;

    let construction_residual = lifted
        .iter()
        .zip(&hermite)
        .map(|(a, b)| a.distance(b))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let hermite_gram_residual = identity_residual(&gram(&hermite)?);
    let modified_gram_residual = identity_residual(&gram(&lifted)?);
    let xi_norms = xi.iter().map(|f| f.norm()).collect();
    let norm_ratios = xi
        .iter()
        .zip(&lifted)
        .map(|(f, lf)| (f.norm() + f.derivative().norm()) / lf.norm())
        .collect();
    let aliasing = hermite.iter().map(|f| f.near_nyquist_fraction()).fold(0.0, f64::max);

    let weights: Vec<f64> = grid.frequencies().iter().map(|y| (1.0 + y * y).sqrt()).collect();
    let triplet = WeightedTriplet::new(weights, 1)?;
    let p = grid.points();
    let to_matrix = |fs: &[SampledFunction]| {
        let mut m = CMat::from_element(p, fs.len(), C64::new(0.0, 0.0));
        for (k, f) in fs.iter().enumerate() {
            m.set_column(k, &f.to_coefficients());
        }
        m
    };
    let family = SequenceFamily::new(to_matrix(&xi), triplet)?.with_dual(to_matrix(&zeta))?;

    Ok(SobolevBasis {
        grid: *grid,
        hermite,
        xi,
        zeta,
        family,
        construction_residual,
        hermite_gram_residual,
        modified_gram_residual,
        xi_norms,
        norm_ratios,
        aliasing,
    })
}
