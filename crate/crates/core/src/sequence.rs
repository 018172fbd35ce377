//! Sequence families `{ξ_n}` in `D` with optional duals `{ζ_n}` in `D×`:
//! biorthogonality, analysis/synthesis/frame operators, Bessel-like and
//! Riesz-Fischer-like diagnostics, partial sums and weak expansions.
//!
//! Families are stored as `N×M` matrices whose columns are the vectors.
//! Column indices in this API are 0-based; `ξ_1` is column 0.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, identity_residual, numerical_rank, pinv, random_complex_normal, random_unit_vector, sigma_max,
    stream_rng, CMat, CVec, C64,
};
use crate::operator::LinearMap;
use crate::par::{self, Exec};
use crate::triplet::{pair, CoefVector, Space, WeightedTriplet};
use crate::verdict::Verdict;

pub const DEFAULT_BIORTHOGONALITY_TOL: f64 = 1e-10;

/// Relative slack when testing "constant at most 1" domination.
pub const UNIT_CONSTANT_SLACK: f64 = 1e-9;

const SAMPLE_CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFamily {
    family: CMat,
    dual: Option<CMat>,
    triplet: WeightedTriplet,
    tolerance: f64,
    tainted: bool,
}

impl SequenceFamily {
    pub fn new(family: CMat, triplet: WeightedTriplet) -> Result<Self> {
        if family.nrows() != triplet.dim() {
            return Err(Error::dim(format!(
                "family has {} rows, triplet dimension is {}",
                family.nrows(),
                triplet.dim()
            )));
        }
        if family.ncols() == 0 {
            return Err(Error::Validation("family has no columns".into()));
        }
        if let Some(k) = (0..family.ncols()).find(|&k| family.column(k).norm() == 0.0) {
            return Err(Error::Validation(format!("family column {} is zero", k + 1)));
        }
        Ok(SequenceFamily {
            family,
            dual: None,
            triplet,
            tolerance: DEFAULT_BIORTHOGONALITY_TOL,
            tainted: false,
        })
    }

    /// Attach a dual family; a biorthogonality residual above tolerance taints it.
    pub fn with_dual(mut self, dual: CMat) -> Result<Self> {
        if dual.shape() != self.family.shape() {
            return Err(Error::dim(format!(
                "dual is {}x{}, family is {}x{}",
                dual.nrows(),
                dual.ncols(),
                self.family.nrows(),
                self.family.ncols()
            )));
        }
        self.dual = Some(dual);
        self.refresh_taint();
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.refresh_taint();
        self
    }

    fn refresh_taint(&mut self) {
        self.tainted = match self.biorthogonality_residual() {
            Ok(r) => !(r <= self.tolerance),
            Err(_) => false,
        };
    }

    pub fn family(&self) -> &CMat {
        &self.family
    }

    pub fn dual(&self) -> Option<&CMat> {
        self.dual.as_ref()
    }

    pub fn triplet(&self) -> &WeightedTriplet {
        &self.triplet
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.family.nrows()
    }

    /// Number of vectors `M`.
    pub fn len(&self) -> usize {
        self.family.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.family.ncols() == 0
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn is_tainted(&self) -> bool {
        self.tainted
    }

    pub fn xi(&self, k: usize) -> CoefVector {
        CoefVector::new(self.family.column(k).into_owned(), Space::D)
    }

    pub fn zeta(&self, k: usize) -> Result<CoefVector> {
        Ok(CoefVector::new(
            self.require_dual()?.column(k).into_owned(),
            Space::Ddual,
        ))
    }

    fn require_dual(&self) -> Result<&CMat> {
        self.dual
            .as_ref()
            .ok_or_else(|| Error::State("family has no dual sequence".into()))
    }

    fn check_len(&self, v: &CoefVector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::dim(format!(
                "vector of length {} against family dimension {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Same family with columns reordered: column `k` of the result is column `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::dim("permutation length differs from family length"));
        }
        let take = |m: &CMat| CMat::from_fn(m.nrows(), perm.len(), |r, k| m[(r, perm[k])]);
        let mut out = SequenceFamily::new(take(&self.family), self.triplet.clone())?.with_tolerance(self.tolerance);
        if let Some(z) = &self.dual {
            out = out.with_dual(take(z))?;
        }
        Ok(out)
    }

    /// `max_{n,k} |⟨ζ_n, ξ_k⟩ − δ_{nk}|`.
    pub fn biorthogonality_residual(&self) -> Result<f64> {
        let z = self.require_dual()?;
        // (Ξ* Z)[k, n] = ⟨ζ_n, ξ_k⟩
        Ok(identity_residual(&(self.family.adjoint() * z)))
    }

    /// Coefficient map `η ↦ {conj⟨ζ_k, η⟩}_k = Z* η`.
    pub fn analysis(&self, eta: &CoefVector) -> Result<CVec> {
        self.check_len(eta)?;
        Ok(self.require_dual()?.adjoint() * &eta.coords)
    }

    /// `a ↦ Σ_k a_k ζ_k`, the adjoint of [`SequenceFamily::analysis`].
    pub fn synthesis(&self, a: &CVec) -> Result<CoefVector> {
        if a.len() != self.len() {
            return Err(Error::dim(format!(
                "{} coefficients for a family of {}",
                a.len(),
                self.len()
            )));
        }
        Ok(CoefVector::new(self.require_dual()? * a, Space::Ddual))
    }

    /// Frame operator `η ↦ Σ_k conj⟨ζ_k, η⟩ ζ_k`, matrix `Z Z*`, certified from
    /// level 1 into dual level 1.
    pub fn frame_operator(&self) -> Result<LinearMap> {
        let z = self.require_dual()?;
        LinearMap::new(z * z.adjoint()).certified(&self.triplet, &[(1, -1)])
    }

    /// Smallest eigenvalue of the Hermitian part of the frame operator.
    pub fn frame_min_eigenvalue(&self) -> Result<f64> {
        let f = self.frame_operator()?;
        Ok(hermitian_eigen(f.matrix()).0[0])
    }

    /// `γ` for the level-`j` unit ball: `sup_{p_j(η) ≤ 1} Σ_k |⟨ζ_k, η⟩|²`,
    /// the squared largest singular value of `Z* U diag(w)^{-j}`.
    pub fn bessel_bound(&self, j: usize) -> Result<f64> {
        self.check_level(j)?;
        let z = self.require_dual()?;
        // Z* U D^{-j} = (D^{-j} U* Z)*
        let s = sigma_max(&self.triplet.to_level(z, -(j as i32)));
        Ok(s * s)
    }

    fn check_level(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.triplet.levels() {
            return Err(Error::LevelRange {
                level: j as i32,
                min: 1,
                max: self.triplet.levels() as i32,
            });
        }
        Ok(())
    }

    /// Largest `Σ_k |⟨ζ_k, η⟩|²` over `samples` random points of the level-`j`
    /// unit sphere. Never exceeds [`SequenceFamily::bessel_bound`].
    pub fn bessel_sampled_sup(&self, j: usize, samples: usize, seed: u64, exec: Exec) -> Result<f64> {
        self.check_level(j)?;
        let z = self.require_dual()?;
        let n = self.dim();
        let chunks = samples.div_ceil(SAMPLE_CHUNK);
        let best = par::map_range(exec, chunks, |chunk| {
            let mut rng = stream_rng(seed, chunk as u64);
            let count = SAMPLE_CHUNK.min(samples - chunk * SAMPLE_CHUNK);
            let mut u = CMat::zeros(n, count);
            for k in 0..count {
                u.set_column(k, &random_unit_vector(&mut rng, n));
            }
            // η = U D^{-j} u lies on the level-j unit sphere
            let eta = self.triplet.from_level(&u, j as i32);
            let coeffs = z.adjoint() * eta;
            (0..count).map(|k| coeffs.column(k).norm_squared()).fold(0.0, f64::max)
        });
        Ok(best.into_iter().fold(0.0, f64::max))
    }

    /// `W` with `W e_n = ζ_n` (zero beyond `M`), certified from `H` into dual level 1.
    pub fn bessel_w_factor(&self) -> Result<LinearMap> {
        let z = self.require_dual()?;
        let (n, m) = (self.dim(), self.len());
        let cols = n.max(m);
        let w = CMat::from_fn(n, cols, |r, k| if k < m { z[(r, k)] } else { C64::new(0.0, 0.0) });
        LinearMap::new(w).certified(&self.triplet, &[(0, -1)])
    }

    /// Minimal-norm `S` with `S ξ_n = e_n` and the dual `ζ_k = S† e_k` it induces.
    pub fn riesz_fischer_check(&self) -> RieszFischerCheck {
        let (n, m) = (self.dim(), self.len());
        let (s, rank) = pinv(&self.family);
        if m > n || rank < m {
            return RieszFischerCheck {
                verdict: Verdict::Fail,
                rank,
                residual: f64::INFINITY,
                s: None,
                dual: None,
                note: "not Riesz-Fischer-like at this truncation: family is not full column rank".into(),
            };
        }
        let residual = identity_residual(&(&s * &self.family));
        let dual = s.adjoint();
        let map = LinearMap::new(s).certified(&self.triplet, &[(1, 0)]);
        match map {
            Ok(map) => RieszFischerCheck {
                verdict: Verdict::Pass,
                rank,
                residual,
                s: Some(map),
                dual: Some(dual),
                note: "minimal-norm solution; other duals may exist".into(),
            },
            Err(e) => RieszFischerCheck {
                verdict: Verdict::Fail,
                rank,
                residual,
                s: None,
                dual: None,
                note: e.to_string(),
            },
        }
    }

    /// Run [`SequenceFamily::riesz_fischer_check`] and store the dual it finds
    /// if the family has none.
    pub fn ensure_dual(self) -> Result<(Self, RieszFischerCheck)> {
        let check = self.riesz_fischer_check();
        let fam = match (&self.dual, &check.dual) {
            (None, Some(d)) => {
                let d = d.clone();
                self.with_dual(d)?
            }
            _ => self,
        };
        Ok((fam, check))
    }

    /// Second analysis operator: `{⟨Φ, ξ_k⟩}_k` and `Σ_k |⟨Φ, ξ_k⟩|²`.
    pub fn v_operator(&self, phi: &CoefVector) -> Result<VAnalysis> {
        self.check_len(phi)?;
        let coefficients = self.family.adjoint() * &phi.coords;
        let sq_sum = coefficients.norm_squared();
        Ok(VAnalysis { coefficients, sq_sum })
    }

    /// Surjectivity of `V` onto `ℓ²(M)` at truncation: `Ξ*` has rank `M`.
    pub fn v_surjective(&self) -> bool {
        numerical_rank(&self.family) == self.len()
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::LevelRange {
                level: n as i32,
                min: 0,
                max: self.len() as i32,
            });
        }
        Ok(())
    }

    /// `S_n f = Σ_{k<n} conj⟨ζ_k, f⟩ ξ_k`.
    pub fn partial_sum(&self, f: &CoefVector, n: usize) -> Result<CoefVector> {
        self.check_len(f)?;
        self.check_n(n)?;
        let z = self.require_dual()?;
        let coeffs = z.columns(0, n).adjoint() * &f.coords;
        Ok(CoefVector::new(self.family.columns(0, n) * coeffs, Space::D))
    }

    /// `S_n† Ψ = Σ_{k<n} ⟨Ψ, ξ_k⟩ ζ_k`.
    pub fn partial_sum_adjoint(&self, psi: &CoefVector, n: usize) -> Result<CoefVector> {
        self.check_len(psi)?;
        self.check_n(n)?;
        let z = self.require_dual()?;
        let coeffs = self.family.columns(0, n).adjoint() * &psi.coords;
        Ok(CoefVector::new(z.columns(0, n) * coeffs, Space::Ddual))
    }

    /// `|⟨Ψ, f⟩ − Σ_{k<n} ⟨Ψ, ξ_k⟩⟨ζ_k, f⟩|`.
    pub fn weak_expansion_residual(&self, psi: &CoefVector, f: &CoefVector, n: usize) -> Result<f64> {
        self.check_len(psi)?;
        self.check_len(f)?;
        self.check_n(n)?;
        let z = self.require_dual()?;
        let mut sum = C64::new(0.0, 0.0);
        for k in 0..n {
            let xi = self.family.column(k).into_owned();
            let zeta = z.column(k).into_owned();
            sum += pair(&psi.coords, &xi) * pair(&zeta, &f.coords);
        }
        Ok((pair(&psi.coords, &f.coords) - sum).norm())
    }

    /// Randomized search for the smallest level `q` with
    /// `p_j(Σ_{i≤n} c_i ξ_i) ≤ C · p_q(Σ_{i≤n+m} c_i ξ_i)` over all trials.
    pub fn schauder_inequality_probe(&self, p_level: usize, probe: &ProbeOptions) -> Result<SchauderProbe> {
        let levels = self.triplet.levels();
        if p_level > levels {
            return Err(Error::LevelRange {
                level: p_level as i32,
                min: 0,
                max: levels as i32,
            });
        }
        let m_len = self.len();
        let trial_ratios = par::map_range(Exec::default(), probe.trials, |t| {
            let mut rng = stream_rng(probe.seed, t as u64);
            let c = random_complex_normal(&mut rng, m_len);
            let n = rng.random_range(1..=m_len);
            let m = rng.random_range(0..=m_len - n);
            let head = self.family.columns(0, n) * c.rows(0, n);
            let full = self.family.columns(0, n + m) * c.rows(0, n + m);
            let top = self.triplet.level_norm(&head, p_level as i32).expect("level checked");
            (0..=levels)
                .map(|q| {
                    let bottom = self.triplet.level_norm(&full, q as i32).expect("level checked");
                    if bottom > 0.0 {
                        top / bottom
                    } else if top == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                })
                .collect::<Vec<f64>>()
        });
        let per_level: Vec<f64> = (0..=levels)
            .map(|q| trial_ratios.iter().map(|r| r[q]).fold(0.0, f64::max))
            .collect();
        let q_level = per_level
            .iter()
            .position(|&r| r <= probe.bound * (1.0 + UNIT_CONSTANT_SLACK));
        let worst_ratio = per_level[q_level.unwrap_or(levels)];
        Ok(SchauderProbe {
            q_level,
            worst_ratio,
            per_level,
            bound: probe.bound,
        })
    }
}

/// Settings shared by randomized probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub trials: usize,
    pub seed: u64,
    /// Largest constant accepted as "moderate" when picking a dominating level.
    pub bound: f64,
}

impl ProbeOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        ProbeOptions {
            trials,
            seed,
            bound: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchauderProbe {
    /// Smallest feasible level, `None` when no level works.
    pub q_level: Option<usize>,
    /// Worst ratio at `q_level`, or at the top level when none is feasible.
    pub worst_ratio: f64,
    pub per_level: Vec<f64>,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct RieszFischerCheck {
    pub verdict: Verdict,
    pub rank: usize,
    /// `max |S Ξ − I|`.
    pub residual: f64,
    pub s: Option<LinearMap>,
    pub dual: Option<CMat>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VAnalysis {
    pub coefficients: CVec,
    pub sq_sum: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, random_well_conditioned, real_diag};
    use crate::triplet::pairing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn number_op(n: usize) -> SequenceFamily {
        let xi: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
        let zeta: Vec<f64> = (1..=n).map(|k| k as f64).collect();
        let trip = WeightedTriplet::new((1..=n).map(|k| k as f64).collect(), 1).unwrap();
        SequenceFamily::new(real_diag(&xi), trip)
            .unwrap()
            .with_dual(real_diag(&zeta))
            .unwrap()
    }

    fn orthonormal(n: usize) -> SequenceFamily {
        SequenceFamily::new(CMat::identity(n, n), WeightedTriplet::trivial(n, 1))
            .unwrap()
            .with_dual(CMat::identity(n, n))
            .unwrap()
    }

    #[test]
    fn biorthogonality_examples() {
        assert_eq!(orthonormal(4).biorthogonality_residual().unwrap(), 0.0);
        assert!(number_op(4).biorthogonality_residual().unwrap() < 1e-15);
        let bad = SequenceFamily::new(CMat::identity(4, 4), WeightedTriplet::trivial(4, 1))
            .unwrap()
            .with_dual(CMat::identity(4, 4) * c(2.0, 0.0))
            .unwrap();
        assert_eq!(bad.biorthogonality_residual().unwrap(), 1.0);
        assert!(bad.is_tainted());
        let nodual = SequenceFamily::new(CMat::identity(2, 2), WeightedTriplet::trivial(2, 1)).unwrap();
        assert!(matches!(nodual.biorthogonality_residual(), Err(Error::State(_))));
    }

    #[test]
    fn rejects_zero_columns() {
        let mut m = CMat::identity(3, 3);
        m[(1, 1)] = c(0.0, 0.0);
        assert!(SequenceFamily::new(m, WeightedTriplet::trivial(3, 1)).is_err());
    }

    #[test]
    fn analysis_examples() {
        let fam = number_op(4);
        let a = fam.analysis(&CoefVector::basis(4, 2, Space::H)).unwrap();
        assert_eq!(
            a,
            CVec::from_vec(vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
        );
        assert_eq!(fam.analysis(&CoefVector::zeros(4, Space::H)).unwrap(), CVec::zeros(4));
        let eta = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(orthonormal(4).analysis(&CoefVector::h(eta.clone())).unwrap(), eta);
    }

    #[test]
    fn synthesis_examples() {
        let fam = number_op(4);
        let omega2 = CoefVector::basis(4, 2, Space::H).coords;
        let s = fam.synthesis(&omega2).unwrap();
        assert_eq!(
            s.coords,
            CoefVector::from_real(&[0.0, 2.0, 0.0, 0.0], Space::Ddual).coords
        );
        assert_eq!(s.label, Space::Ddual);
        assert_eq!(fam.synthesis(&CVec::zeros(4)).unwrap().coords, CVec::zeros(4));
        let a = CVec::from_vec(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 0.0), c(4.0, -1.0)]);
        assert_eq!(orthonormal(4).synthesis(&a).unwrap().coords, a);
        assert!(fam.synthesis(&CVec::zeros(3)).is_err());
    }

    #[test]
    fn frame_operator_examples() {
        let id = orthonormal(3).frame_operator().unwrap();
        assert_eq!(id.matrix(), &CMat::identity(3, 3));
        let f = number_op(4).frame_operator().unwrap();
        assert!(max_abs_diff(f.matrix(), &real_diag(&[1.0, 4.0, 9.0, 16.0])) < 1e-14);
        // certificate D_1 -> D×_1: diag(1/k) diag(k^2) diag(1/k) = I
        assert!((f.certificate(1, -1).unwrap() - 1.0).abs() < 1e-14);

        let mut z = CMat::identity(3, 3);
        z.set_column(1, &CVec::zeros(3));
        let fam = SequenceFamily::new(CMat::identity(3, 3), WeightedTriplet::trivial(3, 1))
            .unwrap()
            .with_dual(z)
            .unwrap();
        assert!(fam.frame_min_eigenvalue().unwrap() >= -1e-12);
        assert_eq!(numerical_rank(fam.frame_operator().unwrap().matrix()), 2);
    }

    #[test]
    fn bessel_examples() {
        assert!((number_op(4).bessel_bound(1).unwrap() - 1.0).abs() < 1e-14);
        let fam = SequenceFamily::new(
            CMat::identity(4, 4),
            WeightedTriplet::new(vec![1.0, 2.0, 3.0, 4.0], 1).unwrap(),
        )
        .unwrap()
        .with_dual(CMat::identity(4, 4))
        .unwrap();
        assert!((fam.bessel_bound(1).unwrap() - 1.0).abs() < 1e-14);
        let scaled = fam.clone().with_dual(CMat::identity(4, 4) * c(3.0, 0.0)).unwrap();
        assert!((scaled.bessel_bound(1).unwrap() - 9.0 * fam.bessel_bound(1).unwrap()).abs() < 1e-12);
        assert!(fam.bessel_bound(0).is_err());
        assert!(fam.bessel_bound(2).is_err());
    }

    #[test]
    fn bessel_sampling_never_exceeds_svd_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_well_conditioned(&mut rng, 5, 1.0, 3.0);
        let trip = WeightedTriplet::new(vec![1.0, 2.0, 1.5, 3.0, 1.2], 2).unwrap();
        let fam = SequenceFamily::new(crate::linalg::inverse(&t).unwrap(), trip)
            .unwrap()
            .with_dual(t.adjoint())
            .unwrap();
        for j in 1..=2 {
            let exact = fam.bessel_bound(j).unwrap();
            let sampled = fam.bessel_sampled_sup(j, 3000, 17, Exec::default()).unwrap();
            assert!(sampled <= exact * (1.0 + 1e-12), "{sampled} > {exact}");
            assert!(sampled > 0.5 * exact);
            let seq = fam.bessel_sampled_sup(j, 3000, 17, Exec::Sequential).unwrap();
            assert_eq!(seq, sampled);
        }
    }

    #[test]
    fn w_factor_examples() {
        assert_eq!(
            orthonormal(3).bessel_w_factor().unwrap().matrix(),
            &CMat::identity(3, 3)
        );
        let w = number_op(4).bessel_w_factor().unwrap();
        assert!(max_abs_diff(w.matrix(), &real_diag(&[1.0, 2.0, 3.0, 4.0])) < 1e-15);
        assert!((w.certificate(0, -1).unwrap() - 1.0).abs() < 1e-14);

        let z = CMat::from_fn(4, 2, |r, k| c((r + 2 * k) as f64, 1.0));
        let x = CMat::from_fn(4, 2, |r, k| c(if r == k { 1.0 } else { 0.0 }, 0.0));
        let fam = SequenceFamily::new(x, WeightedTriplet::trivial(4, 1))
            .unwrap()
            .with_dual(z.clone())
            .unwrap();
        let w = fam.bessel_w_factor().unwrap();
        assert_eq!(w.shape(), (4, 4));
        for n in 0..2 {
            let en = CoefVector::basis(4, n + 1, Space::H).coords;
            assert_eq!(w.apply(&en).unwrap(), z.column(n).into_owned());
        }
    }

    #[test]
    fn riesz_fischer_examples() {
        let rf = orthonormal(3).riesz_fischer_check();
        assert_eq!(rf.verdict, Verdict::Pass);
        assert!(rf.residual < 1e-15);
        assert!(max_abs_diff(rf.s.as_ref().unwrap().matrix(), &CMat::identity(3, 3)) < 1e-15);

        let xi: Vec<f64> = (1..=4).map(|k| 1.0 / k as f64).collect();
        let trip = WeightedTriplet::new(vec![1.0, 2.0, 3.0, 4.0], 1).unwrap();
        let fam = SequenceFamily::new(real_diag(&xi), trip).unwrap();
        let (fam, rf) = fam.ensure_dual().unwrap();
        assert_eq!(rf.verdict, Verdict::Pass);
        let k = real_diag(&[1.0, 2.0, 3.0, 4.0]);
        assert!(max_abs_diff(rf.s.as_ref().unwrap().matrix(), &k) < 1e-12);
        assert!(max_abs_diff(fam.dual().unwrap(), &k) < 1e-12);
        assert!((rf.s.unwrap().certificate(1, 0).unwrap() - 1.0).abs() < 1e-12);

        let mut dup = CMat::identity(3, 3);
        let col = dup.column(0).into_owned();
        dup.set_column(1, &col);
        let fam = SequenceFamily::new(dup, WeightedTriplet::trivial(3, 1)).unwrap();
        let rf = fam.riesz_fischer_check();
        assert_eq!(rf.verdict, Verdict::Fail);
        assert!(rf.s.is_none());
    }

    #[test]
    fn v_operator_examples() {
        let fam = number_op(4);
        let v = fam.v_operator(&CoefVector::zeros(4, Space::Ddual)).unwrap();
        assert_eq!(v.sq_sum, 0.0);
        let ones = CoefVector::from_real(&[1.0; 4], Space::Ddual);
        let v = fam.v_operator(&ones).unwrap();
        for k in 0..4 {
            assert!((v.coefficients[k] - c(1.0 / (k + 1) as f64, 0.0)).norm() < 1e-15);
        }
        assert!((v.sq_sum - (1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0)).abs() < 1e-15);
        assert!(fam.v_surjective());

        let phi = CVec::from_vec(vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let v = orthonormal(3)
            .v_operator(&CoefVector::new(phi.clone(), Space::Ddual))
            .unwrap();
        assert_eq!(v.coefficients, phi);
        assert!((v.sq_sum - phi.norm_squared()).abs() < 1e-14);
    }

    #[test]
    fn partial_sum_examples() {
        let fam = number_op(4);
        let e3 = CoefVector::basis(4, 3, Space::D);
        assert!(fam.partial_sum(&e3, 2).unwrap().coords.norm() < 1e-15);
        assert!((fam.partial_sum(&e3, 3).unwrap().coords - &e3.coords).norm() < 1e-15);
        assert_eq!(fam.partial_sum(&e3, 0).unwrap().coords, CVec::zeros(4));
        assert!(fam.partial_sum(&e3, 5).is_err());
        let f = CoefVector::new(
            CVec::from_vec(vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(0.5, 0.5)]),
            Space::D,
        );
        assert!((fam.partial_sum(&f, 4).unwrap().coords - &f.coords).norm() < 1e-14);
        // adjoint action reconstructs Ψ in D× as well
        assert!((fam.partial_sum_adjoint(&f, 4).unwrap().coords - &f.coords).norm() < 1e-14);
    }

    #[test]
    fn weak_expansion_examples() {
        let fam = number_op(4);
        let e2 = CoefVector::basis(4, 2, Space::H);
        assert_eq!(fam.weak_expansion_residual(&e2, &e2, 1).unwrap(), 1.0);
        assert!(fam.weak_expansion_residual(&e2, &e2, 2).unwrap() < 1e-15);
        // the single active term is ⟨e₂,ξ₂⟩⟨ζ₂,e₂⟩ = (1/2)·2
        let term = pairing(&e2, &fam.xi(1)).unwrap() * pairing(&fam.zeta(1).unwrap(), &e2).unwrap();
        assert_eq!(term, c(1.0, 0.0));
        let zero = CoefVector::zeros(4, Space::Ddual);
        assert_eq!(fam.weak_expansion_residual(&zero, &e2, 4).unwrap(), 0.0);
    }

    #[test]
    fn schauder_probe_examples() {
        let probe = ProbeOptions::new(500, 3);
        let r = orthonormal(5).schauder_inequality_probe(0, &probe).unwrap();
        assert_eq!(r.q_level, Some(0));
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);

        let xi: Vec<f64> = (1..=5).map(|k| 1.0 / k as f64).collect();
        let trip = WeightedTriplet::new((1..=5).map(|k| k as f64).collect(), 1).unwrap();
        let fam = SequenceFamily::new(real_diag(&xi), trip).unwrap();
        let r = fam.schauder_inequality_probe(1, &probe).unwrap();
        assert_eq!(r.q_level, Some(1));
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);
        assert!(r.per_level[0] > 1.0);

        let overlap = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.05, 0.0)]);
        let fam = SequenceFamily::new(overlap, WeightedTriplet::trivial(2, 1)).unwrap();
        let r = fam.schauder_inequality_probe(0, &probe).unwrap();
        assert!(r.per_level[0] > 1.0);
        assert_eq!(r.q_level, None);
    }
}
