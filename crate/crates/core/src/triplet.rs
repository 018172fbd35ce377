//! Truncated weighted sequence-space model of a rigged Hilbert space
//! `D[t] ⊂ H ⊂ D×[t×]`.
//!
//! Vectors are coefficient columns against the canonical orthonormal basis.
//! Level `j ≥ 0` carries the seminorm `p_j(f) = ‖diag(w)^j U* f‖₂`, level `-j`
//! the dual norm `‖diag(w)^{-j} U* Φ‖₂`. `U` is the identity unless the triplet
//! was built in a rotated frame (graph-norm and polar constructions).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, identity_residual, CMat, CVec, C64};
use crate::operator::LinearMap;

/// Which space a coefficient vector is being used in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    D,
    H,
    Ddual,
}

/// Complex coefficients against `{e_k}` plus the space they are read in.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefVector {
    pub coords: CVec,
    pub label: Space,
}

impl CoefVector {
    pub fn new(coords: CVec, label: Space) -> Self {
        CoefVector { coords, label }
    }

    pub fn h(coords: CVec) -> Self {
        Self::new(coords, Space::H)
    }

    pub fn zeros(n: usize, label: Space) -> Self {
        Self::new(CVec::zeros(n), label)
    }

    /// Canonical basis vector `e_k` (1-based, matching `e_1, e_2, ...`).
    pub fn basis(n: usize, k: usize, label: Space) -> Self {
        assert!(k >= 1 && k <= n, "basis index {k} outside 1..={n}");
        let mut v = CVec::zeros(n);
        v[k - 1] = C64::new(1.0, 0.0);
        Self::new(v, label)
    }

    pub fn from_real(xs: &[f64], label: Space) -> Self {
        Self::new(
            CVec::from_iterator(xs.len(), xs.iter().map(|&x| C64::new(x, 0.0))),
            label,
        )
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn relabel(mut self, label: Space) -> Self {
        self.label = label;
        self
    }
}

/// Duality pairing `⟨Φ, f⟩ = Σ_k Φ_k conj(f_k)`: linear in `Φ`, conjugate-linear in `f`.
pub fn pairing(phi: &CoefVector, f: &CoefVector) -> Result<C64> {
    if phi.len() != f.len() {
        return Err(Error::dim(format!("pairing of lengths {} and {}", phi.len(), f.len())));
    }
    Ok(pair(&phi.coords, &f.coords))
}

#[inline]
pub(crate) fn pair(phi: &CVec, f: &CVec) -> C64 {
    f.dotc(phi)
}

/// Rule generating a weight vector for a given dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightRule {
    /// `w_k = 1`.
    Ones,
    /// `w_k = k` (the number-operator ladder).
    Linear,
    /// `w_k = k^alpha`, `alpha ≥ 0`.
    Power(f64),
}

impl WeightRule {
    pub fn weights(&self, n: usize) -> Vec<f64> {
        (1..=n)
            .map(|k| match self {
                WeightRule::Ones => 1.0,
                WeightRule::Linear => k as f64,
                WeightRule::Power(a) => (k as f64).powf(*a),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTriplet {
    weights: Vec<f64>,
    levels: usize,
    frame: Option<CMat>,
}

impl WeightedTriplet {
    /// Triplet with weights `w_k ≥ 1` and `levels ≥ 1` seminorm levels.
    pub fn new(weights: Vec<f64>, levels: usize) -> Result<Self> {
        if let Some((k, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 1.0 && w.is_finite())) {
            return Err(Error::Validation(format!(
                "weight w_{} = {w} must be finite and >= 1",
                k + 1
            )));
        }
        Self::new_positive(weights, levels)
    }

    /// As [`WeightedTriplet::new`] but only requires `w_k > 0`. Used for realized
    /// `H_{+1}` norms whose weights are singular values of an operator.
    pub fn new_positive(weights: Vec<f64>, levels: usize) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Validation("triplet dimension must be positive".into()));
        }
        if levels == 0 {
            return Err(Error::Validation("triplet needs at least one seminorm level".into()));
        }
        if let Some((k, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::Validation(format!(
                "weight w_{} = {w} must be finite and > 0",
                k + 1
            )));
        }
        Ok(WeightedTriplet {
            weights,
            levels,
            frame: None,
        })
    }

    pub fn from_rule(n: usize, rule: &WeightRule, levels: usize) -> Result<Self> {
        Self::new(rule.weights(n), levels)
    }

    /// All weights one: the triplet collapses onto `H`.
    pub fn trivial(n: usize, levels: usize) -> Self {
        Self::new(vec![1.0; n], levels).expect("trivial triplet is valid")
    }

    /// Attach an orthonormal frame `U`; seminorms then read `‖diag(w)^j U* f‖`.
    pub fn with_frame(mut self, frame: CMat) -> Result<Self> {
        if frame.shape() != (self.dim(), self.dim()) {
            return Err(Error::dim(format!(
                "frame is {}x{}, triplet dimension is {}",
                frame.nrows(),
                frame.ncols(),
                self.dim()
            )));
        }
        let r = identity_residual(&(frame.adjoint() * &frame));
        if r > 1e-10 {
            return Err(Error::Validation(format!("frame is not unitary (residual {r:e})")));
        }
        self.frame = Some(frame);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn frame(&self) -> Option<&CMat> {
        self.frame.as_ref()
    }

    fn check_level(&self, level: i32) -> Result<()> {
        let j = self.levels as i32;
        if level < -j || level > j {
            return Err(Error::LevelRange { level, min: -j, max: j });
        }
        Ok(())
    }

    /// `w^s` elementwise for a signed level `s`.
    pub fn level_scale(&self, level: i32) -> Vec<f64> {
        self.weights.iter().map(|w| w.powi(level)).collect()
    }

    /// `diag(w)^s U* m`: rows of `m` moved into the level-`s` frame.
    pub fn to_level(&self, m: &CMat, level: i32) -> CMat {
        let mut out = match &self.frame {
            Some(u) => u.adjoint() * m,
            None => m.clone(),
        };
        for (i, s) in self.level_scale(level).into_iter().enumerate() {
            out.row_mut(i).scale_mut(s);
        }
        out
    }

    /// `U diag(w)^{-s} m`: the inverse of [`WeightedTriplet::to_level`].
    pub fn from_level(&self, m: &CMat, level: i32) -> CMat {
        let mut out = m.clone();
        for (i, s) in self.level_scale(-level).into_iter().enumerate() {
            out.row_mut(i).scale_mut(s);
        }
        match &self.frame {
            Some(u) => u * out,
            None => out,
        }
    }

    /// `‖diag(w)^s U* f‖₂` for any signed level within range.
    pub fn level_norm(&self, f: &CVec, level: i32) -> Result<f64> {
        self.check_level(level)?;
        if f.len() != self.dim() {
            return Err(Error::dim(format!(
                "vector of length {} in triplet of dimension {}",
                f.len(),
                self.dim()
            )));
        }
        let g = match &self.frame {
            Some(u) => u.adjoint() * f,
            None => f.clone(),
        };
        let s = self.level_scale(level);
        Ok(g.iter().zip(&s).map(|(z, w)| (z * w).norm_sqr()).sum::<f64>().sqrt())
    }

    /// Level-`j` seminorm `p_j`, `0 ≤ j ≤ J`; `p_0` is the norm of `H`.
    pub fn seminorm(&self, f: &CoefVector, j: usize) -> Result<f64> {
        if j > self.levels {
            return Err(Error::LevelRange {
                level: j as i32,
                min: 0,
                max: self.levels as i32,
            });
        }
        self.level_norm(&f.coords, j as i32)
    }

    /// Dual norm on `D×` at level `1 ≤ j ≤ J`, i.e. `sup |⟨Φ, f⟩|` over `p_j(f) ≤ 1`.
    pub fn dual_norm(&self, phi: &CoefVector, j: usize) -> Result<f64> {
        if j == 0 || j > self.levels {
            return Err(Error::LevelRange {
                level: j as i32,
                min: 1,
                max: self.levels as i32,
            });
        }
        self.level_norm(&phi.coords, -(j as i32))
    }

    /// Maximizer of `|⟨Φ, f⟩|` on the level-`j` unit sphere: `U diag(w)^{-2j} U* Φ`, normalized.
    pub fn dual_maximizer(&self, phi: &CoefVector, j: usize) -> Result<CoefVector> {
        let m = CMat::from_column_slice(phi.len(), 1, phi.coords.as_slice());
        let inner = self.to_level(&m, -2 * j as i32);
        let f = self.from_level(&inner, 0).column(0).into_owned();
        let p = self.level_norm(&f, j as i32)?;
        if p == 0.0 {
            return Ok(CoefVector::zeros(phi.len(), Space::D));
        }
        Ok(CoefVector::new(f.unscale(p), Space::D))
    }
}

/// `J = 1` triplet of the graph norm `‖f‖_T = ‖(I + T*T)^{1/2} f‖`.
///
/// Weights are the square roots of the eigenvalues of `I + T*T`, the frame its
/// eigenvectors.
pub fn graph_norm_triplet(t: &LinearMap) -> Result<WeightedTriplet> {
    let m = t.matrix();
    if !m.is_square() {
        return Err(Error::dim(format!(
            "graph norm needs a square operator, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let g = CMat::identity(n, n) + m.adjoint() * m;
    let (vals, vecs) = hermitian_eigen(&g);
    let weights = vals.iter().map(|v| v.max(1.0).sqrt()).collect();
    WeightedTriplet::new(weights, 1)?.with_frame(vecs)
}
