use crate::error::{Error, Result};
use crate::linalg::{CVec, C64};

use super::grid::{LineGrid, SampledFunction};

/// Largest mass of `φ_n` allowed outside `[−L, L]`.
pub const SUPPORT_LIMIT: f64 = 1e-12;

/// `φ_0(x), ..., φ_{count−1}(x)` from the normalized three-term recurrence
/// `φ_{n+1} = √(2/(n+1)) x φ_n − √(n/(n+1)) φ_{n−1}`.
pub fn hermite_values(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let phi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(phi0);
    if count == 1 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * phi0);
    for n in 1..count - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Closed forms of `φ_0, φ_1, φ_2`; `None` for higher orders.
pub fn hermite_closed_form(n: usize, x: f64) -> Option<f64> {
    let g = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    match n {
        0 => Some(g),
        1 => Some(std::f64::consts::SQRT_2 * x * g),
        2 => Some((2.0 * x * x - 1.0) / std::f64::consts::SQRT_2 * g),
        _ => None,
    }
}

/// Mass of each `φ_n`, `n < count`, outside `[−L, L]`, by quadrature over `L ≤ |x| ≤ 2L`.
pub fn tail_mass(grid: &LineGrid, count: usize) -> Vec<f64> {
    let h = grid.spacing();
    let l = grid.half_width();
    let mut mass = vec![0.0; count];
    let steps = (l / h).ceil() as usize;
    for i in 0..=steps {
        let x = l + i as f64 * h;
        let w = if i == 0 || i == steps { 0.5 * h } else { h };
        for (m, v) in mass.iter_mut().zip(hermite_values(x, count)) {
            // φ_n(−x)² = φ_n(x)²
            *m += 2.0 * w * v * v;
        }
    }
    mass
}

/// Normalized Hermite functions `φ_0..φ_{count−1}` sampled on `grid`.
pub fn hermite_basis(grid: &LineGrid, count: usize) -> Result<Vec<SampledFunction>> {
    if count == 0 {
        return Err(Error::Validation("need at least one Hermite function".into()));
    }
    if let Some((n, &mass)) = tail_mass(grid, count)
        .iter()
        .enumerate()
        .find(|(_, m)| **m >= SUPPORT_LIMIT)
    {
        return Err(Error::Support { n, mass });
    }
    let p = grid.points();
    let mut columns = vec![CVec::zeros(p); count];
    for (j, x) in grid.nodes().into_iter().enumerate() {
        for (n, v) in hermite_values(x, count).into_iter().enumerate() {
            columns[n][j] = C64::new(v, 0.0);
        }
    }
    Ok(columns.into_iter().map(|v| SampledFunction::new(*grid, v)).collect())
}
