use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{real_diag, sigma_max, CMat, CVec};
use crate::triplet::WeightedTriplet;

/// One entry of a continuity certificate: the operator norm from level
/// `from` to level `to` of a triplet. Negative levels are dual levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub from: i32,
    pub to: i32,
    pub norm: f64,
}

/// Dense matrix plus estimated operator norms between triplet levels.
///
/// A side whose dimension differs from the triplet (the `ℓ²` side of an
/// analysis map) only admits level 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: CMat,
    certificate: BTreeMap<(i32, i32), f64>,
}

impl LinearMap {
    pub fn new(matrix: CMat) -> Self {
        LinearMap {
            matrix,
            certificate: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(CMat::identity(n, n))
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self::new(real_diag(d))
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    pub fn apply(&self, v: &CVec) -> Result<CVec> {
        if v.len() != self.matrix.ncols() {
            return Err(Error::dim(format!(
                "applying {}x{} map to vector of length {}",
                self.matrix.nrows(),
                self.matrix.ncols(),
                v.len()
            )));
        }
        Ok(&self.matrix * v)
    }

    /// Conjugate transpose; in the canonical coordinates this is the formal adjoint.
    pub fn adjoint(&self) -> LinearMap {
        LinearMap::new(self.matrix.adjoint())
    }

    /// `σ_max(diag(w)^to U* · A · U diag(w)^{-from})` without recording it.
    pub fn norm_between(&self, triplet: &WeightedTriplet, from: i32, to: i32) -> Result<f64> {
        let (rows, cols) = self.matrix.shape();
        let n = triplet.dim();
        for (side, dim, level) in [("codomain", rows, to), ("domain", cols, from)] {
            if level != 0 && dim != n {
                return Err(Error::dim(format!(
                    "{side} has dimension {dim}; level {level} needs the triplet dimension {n}"
                )));
            }
            let j = triplet.levels() as i32;
            if level.abs() > j {
                return Err(Error::LevelRange { level, min: -j, max: j });
            }
        }
        let mut m = if to != 0 {
            triplet.to_level(&self.matrix, to)
        } else {
            self.matrix.clone()
        };
        if from != 0 {
            // right-multiply by U diag(w)^{-from}: (diag(w)^{-from} U* m*)*
            m = triplet.to_level(&m.adjoint(), -from).adjoint();
        }
        let norm = sigma_max(&m);
        if !norm.is_finite() {
            return Err(Error::Continuity(format!(
                "norm from level {from} to level {to} is not finite"
            )));
        }
        Ok(norm)
    }

    /// Compute and record the `(from, to)` certificate entry.
    pub fn certify(&mut self, triplet: &WeightedTriplet, from: i32, to: i32) -> Result<f64> {
        let norm = self.norm_between(triplet, from, to)?;
        self.certificate.insert((from, to), norm);
        Ok(norm)
    }

    pub fn certified(mut self, triplet: &WeightedTriplet, pairs: &[(i32, i32)]) -> Result<Self> {
        for &(from, to) in pairs {
            self.certify(triplet, from, to)?;
        }
        Ok(self)
    }

    pub fn certificate(&self, from: i32, to: i32) -> Option<f64> {
        self.certificate.get(&(from, to)).copied()
    }

    pub fn certificate_entries(&self) -> Vec<CertificateEntry> {
        self.certificate
            .iter()
            .map(|(&(from, to), &norm)| CertificateEntry { from, to, norm })
            .collect()
    }
}
