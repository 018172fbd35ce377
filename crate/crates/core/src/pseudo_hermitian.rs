//! Nonself-adjoint Hamiltonians similar to a self-adjoint one through an
//! intertwining operator `T`, built from eigendata:
//! `H_sa = Σ_k λ_k ψ_k ψ_k*`, `H = T^{-1} H_sa T`, eigenvectors `ξ_k = T^{-1} ψ_k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, hermitian_eigen, identity_residual, inverse, max_abs_diff, numerical_rank, pinv, random_unitary,
    sigma_max, sigma_min, stream_rng, CMat, C64,
};
use crate::operator::LinearMap;
use crate::par::{self, Exec};
use crate::sequence::SequenceFamily;
use crate::trend::{classify, loglog_slope, Ladder, Side, GROWTH_THRESHOLD};
use crate::triplet::{pair, CoefVector, WeightedTriplet};
use crate::verdict::Verdict;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HamiltonianPair {
    h: LinearMap,
    h_sa: LinearMap,
    t: LinearMap,
    eigenvalues: Vec<f64>,
    psi: CMat,
    xi: CMat,
    repeated_eigenvalues: bool,
}

/// `Σ_k λ_k ψ_k ψ_k*` for orthonormal columns `ψ_k`.
pub fn build_hsa(lambda: &[f64], psi: &CMat) -> Result<LinearMap> {
    if psi.ncols() != lambda.len() {
        return Err(Error::dim(format!(
            "{} eigenvalues for {} eigenvectors",
            lambda.len(),
            psi.ncols()
        )));
    }
    if let Some(l) = lambda.iter().find(|l| !l.is_finite()) {
        return Err(Error::Validation(format!("eigenvalue {l} is not finite")));
    }
    let r = identity_residual(&(psi.adjoint() * psi));
    if !(r <= UNITARY_TOL) {
        return Err(Error::Validation(format!(
            "eigenvector matrix is not unitary (residual {r:e})"
        )));
    }
    let mut scaled = psi.clone();
    for (k, &l) in lambda.iter().enumerate() {
        scaled.column_mut(k).scale_mut(l);
    }
    let h = scaled * psi.adjoint();
    // exact Hermitian symmetry
    Ok(LinearMap::new((&h + h.adjoint()).scale(0.5)))
}

/// Pair with `H = T^{-1} H_sa T`, so that `H ξ_k = λ_k ξ_k` for `ξ_k = T^{-1} ψ_k`.
pub fn build_pair(lambda: &[f64], psi: &CMat, t: LinearMap) -> Result<HamiltonianPair> {
    let h_sa = build_hsa(lambda, psi)?;
    if t.shape() != h_sa.shape() {
        return Err(Error::dim(format!("T is {:?}, H_sa is {:?}", t.shape(), h_sa.shape())));
    }
    let t_inv = inverse(t.matrix())?;
    let h = &t_inv * h_sa.matrix() * t.matrix();
    let xi = &t_inv * psi;
    let mut sorted = lambda.to_vec();
    sorted.sort_by(f64::total_cmp);
    let scale = sorted.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let repeated_eigenvalues = sorted.windows(2).any(|w| (w[1] - w[0]).abs() <= 1e-12 * scale);
    Ok(HamiltonianPair {
        h: LinearMap::new(h),
        h_sa,
        t,
        eigenvalues: lambda.to_vec(),
        psi: psi.clone(),
        xi,
        repeated_eigenvalues,
    })
}

impl HamiltonianPair {
    pub fn h(&self) -> &LinearMap {
        &self.h
    }

    pub fn h_sa(&self) -> &LinearMap {
        &self.h_sa
    }

    pub fn t(&self) -> &LinearMap {
        &self.t
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn psi(&self) -> &CMat {
        &self.psi
    }

    pub fn xi(&self) -> &CMat {
        &self.xi
    }

    pub fn dim(&self) -> usize {
        self.h.shape().0
    }

    /// Set when two eigenvalues coincide; `ξ_k` is then not unique.
    pub fn has_repeated_eigenvalues(&self) -> bool {
        self.repeated_eigenvalues
    }

    /// Replace `H`, keeping the rest. Used for perturbation sweeps.
    pub fn with_hamiltonian(mut self, h: CMat) -> Result<Self> {
        if h.shape() != self.h.shape() {
            return Err(Error::dim("replacement Hamiltonian has a different shape"));
        }
        self.h = LinearMap::new(h);
        Ok(self)
    }

    /// Replace the recorded eigenvalues without rebuilding the operators.
    pub fn with_eigenvalues(mut self, lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != self.eigenvalues.len() {
            return Err(Error::dim("eigenvalue count changed"));
        }
        self.eigenvalues = lambda;
        Ok(self)
    }

    /// `|⟨Hξ, T†η⟩ − ⟨Tξ, H_sa η⟩|`.
    pub fn weak_similarity_residual(&self, xi: &CoefVector, eta: &CoefVector) -> Result<f64> {
        let h_xi = self.h.apply(&xi.coords)?;
        let t_dag_eta = self.t.adjoint().apply(&eta.coords)?;
        let t_xi = self.t.apply(&xi.coords)?;
        let hsa_eta = self.h_sa.apply(&eta.coords)?;
        Ok((pair(&h_xi, &t_dag_eta) - pair(&t_xi, &hsa_eta)).norm())
    }

    /// `max_k ‖H ξ_k − λ_k ξ_k‖₂ / ‖ξ_k‖₂`.
    pub fn eigen_residual(&self) -> f64 {
        let hx = self.h.matrix() * &self.xi;
        (0..self.xi.ncols())
            .map(|k| {
                let x = self.xi.column(k);
                (hx.column(k) - x * C64::new(self.eigenvalues[k], 0.0)).norm() / x.norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |H_sa − H_sa*|`.
    pub fn hsa_hermitian_residual(&self) -> f64 {
        max_abs_diff(self.h_sa.matrix(), &self.h_sa.matrix().adjoint())
    }

    /// `max_k ‖H_sa ψ_k − λ_k ψ_k‖₂`.
    pub fn hsa_eigen_residual(&self) -> f64 {
        let hp = self.h_sa.matrix() * &self.psi;
        (0..self.psi.ncols())
            .map(|k| (hp.column(k) - self.psi.column(k) * C64::new(self.eigenvalues[k], 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// `max |T ξ_k − ψ_k|`.
    pub fn xi_residual(&self) -> f64 {
        max_abs_diff(&(self.t.matrix() * &self.xi), &self.psi)
    }

    /// Eigenvalues of `H` from a Schur decomposition.
    pub fn spectrum(&self) -> Vec<C64> {
        eigenvalues(self.h.matrix())
    }

    /// Largest distance between the spectrum of `H` and `λ`, both sorted by real part.
    pub fn spectrum_error(&self) -> f64 {
        let mut spec = self.spectrum();
        spec.sort_by(|a, b| a.re.total_cmp(&b.re));
        let mut lambda = self.eigenvalues.clone();
        lambda.sort_by(f64::total_cmp);
        if spec.len() != lambda.len() {
            // λ only covers an isometric block; the rest of the spectrum is zero
            return f64::NAN;
        }
        spec.iter()
            .zip(&lambda)
            .map(|(z, l)| (z - C64::new(*l, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// `σ_max(H H* − H* H)`.
    pub fn non_normality(&self) -> f64 {
        let h = self.h.matrix();
        sigma_max(&(h * h.adjoint() - h.adjoint() * h))
    }

    /// `J = 1` triplet with `p_1(f) = ‖T f‖` (weights the singular values of `T`).
    pub fn induced_triplet(&self) -> Result<WeightedTriplet> {
        let t = self.t.matrix();
        let (vals, vecs) = hermitian_eigen(&(t.adjoint() * t));
        let weights = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
        WeightedTriplet::new_positive(weights, 1)?.with_frame(vecs)
    }

    /// Eigenvectors `ξ_k` with duals `ζ_k = T† ψ_k` in the induced triplet.
    pub fn eigen_family(&self) -> Result<SequenceFamily> {
        let dual = self.t.matrix().adjoint() * &self.psi;
        SequenceFamily::new(self.xi.clone(), self.induced_triplet()?)?.with_dual(dual)
    }
}

/// Eigenvalue rule `λ_k`, `k = 1..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaRule {
    /// `λ_k = k`
    Linear,
    /// `λ_k = c`
    Constant(f64),
    /// `λ_k = k^p`
    Power(f64),
}

impl LambdaRule {
    pub fn values(&self, n: usize) -> Vec<f64> {
        (1..=n)
            .map(|k| match self {
                LambdaRule::Linear => k as f64,
                LambdaRule::Constant(c) => *c,
                LambdaRule::Power(p) => (k as f64).powf(*p),
            })
            .collect()
    }
}

/// Intertwiner rule at size `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TRule {
    Identity,
    /// `T = diag(k^alpha)`
    DiagPower(f64),
}

impl TRule {
    pub fn operator(&self, n: usize) -> LinearMap {
        match self {
            TRule::Identity => LinearMap::identity(n),
            TRule::DiagPower(a) => LinearMap::diagonal(&(1..=n).map(|k| (k as f64).powf(*a)).collect::<Vec<_>>()),
        }
    }
}

/// Per-size recipe for a [`HamiltonianPair`]. Without `psi_seed` the eigenvectors
/// are the canonical basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub lambda_rule: LambdaRule,
    pub t_rule: TRule,
    pub psi_seed: Option<u64>,
}

impl PairSpec {
    /// `T = diag(k)`, `λ_k = k`, seeded random unitary eigenvectors.
    pub fn demo(psi_seed: u64) -> Self {
        PairSpec {
            lambda_rule: LambdaRule::Linear,
            t_rule: TRule::DiagPower(1.0),
            psi_seed: Some(psi_seed),
        }
    }

    pub fn psi(&self, n: usize) -> CMat {
        match self.psi_seed {
            Some(seed) => random_unitary(&mut stream_rng(seed, n as u64), n),
            None => CMat::identity(n, n),
        }
    }

    pub fn build(&self, n: usize) -> Result<HamiltonianPair> {
        build_pair(&self.lambda_rule.values(n), &self.psi(n), self.t_rule.operator(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendShape {
    Growing,
    Bounded,
    Decaying,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityTrend {
    pub ladder: Vec<usize>,
    /// Rank of the projection onto `{η : T†η ∈ H}` at each size.
    pub admissible_ranks: Vec<usize>,
    /// Largest principal angle between the admissible subspace and the whole space.
    pub principal_angles: Vec<f64>,
    /// `‖T† e_N‖` at each size.
    pub probe_norms: Vec<f64>,
    pub slope: Option<f64>,
    pub shape: TrendShape,
    pub verdict: Verdict,
    pub note: &'static str,
}

/// Growth of `‖T† e_N‖` over a ladder, the finite shadow of density of
/// `T† D(H_sa) ∩ H`. Growing trends are flagged `inconclusive`.
pub fn density_diagnostic(spec: &PairSpec, ladder: &Ladder, exec: Exec) -> Result<DensityTrend> {
    let points = par::try_map(exec, ladder.sizes(), |&n| -> Result<(usize, f64, f64)> {
        let t = spec.t_rule.operator(n);
        let t_dag = t.adjoint();
        let (proj_basis, rank) = {
            // orthonormal basis of the range of T (every η is admissible when T is invertible)
            let (p, rank) = pinv(t_dag.matrix());
            (t_dag.matrix() * p, rank)
        };
        let cos_min = if rank == 0 { 0.0 } else { sigma_min(&proj_basis) };
        let angle = cos_min.clamp(0.0, 1.0).acos();
        let probe = t_dag
            .apply(&CoefVector::basis(n, n, crate::triplet::Space::H).coords)?
            .norm();
        debug_assert_eq!(rank, numerical_rank(t.matrix()));
        Ok((rank, angle, probe))
    })?;
    let admissible_ranks = points.iter().map(|p| p.0).collect();
    let principal_angles = points.iter().map(|p| p.1).collect();
    let probe_norms: Vec<f64> = points.iter().map(|p| p.2).collect();
    let slope = loglog_slope(&ladder.as_f64(), &probe_norms);
    let (shape, verdict) = match slope.map(|s| (s, classify(s, GROWTH_THRESHOLD))) {
        Some((_, Side::Above)) => (TrendShape::Growing, Verdict::Inconclusive),
        Some((_, Side::Tie)) => (TrendShape::Growing, Verdict::Inconclusive),
        Some((s, Side::Below)) if classify(s, -GROWTH_THRESHOLD) == Side::Below => {
            (TrendShape::Decaying, Verdict::Pass)
        }
        Some(_) => (TrendShape::Bounded, Verdict::Pass),
        None => (TrendShape::Bounded, Verdict::Inconclusive),
    };
    Ok(DensityTrend {
        ladder: ladder.sizes().to_vec(),
        admissible_ranks,
        principal_angles,
        probe_norms,
        slope,
        shape,
        verdict,
        note:
            "at finite size the admissible set is the whole space for invertible T; only the norm trend is informative",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_unit_vector, real_diag};
    use crate::riesz::strictness_report;
    use crate::triplet::Space;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hsa_examples() {
        let h = build_hsa(&[1.0, 2.0, 3.0], &CMat::identity(3, 3)).unwrap();
        assert_eq!(h.matrix(), &real_diag(&[1.0, 2.0, 3.0]));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = random_unitary(&mut rng, 4);
        let h = build_hsa(&[2.5; 4], &q).unwrap();
        assert!(max_abs_diff(h.matrix(), &(CMat::identity(4, 4) * C64::new(2.5, 0.0))) < 1e-14);

        let q = random_unitary(&mut rng, 6);
        let h = build_hsa(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &q).unwrap();
        let (vals, _) = hermitian_eigen(h.matrix());
        for (k, v) in vals.iter().enumerate() {
            assert!((v - (k + 1) as f64).abs() < 1e-12);
        }
        assert!(build_hsa(&[1.0, 2.0], &real_diag(&[1.0, 2.0])).is_err());
        assert!(build_hsa(&[1.0], &CMat::identity(2, 2)).is_err());
    }

    #[test]
    fn pair_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = random_unitary(&mut rng, 5);
        let lambda = [1.0, 2.0, 3.0, 4.0, 5.0];
        let p = build_pair(&lambda, &q, LinearMap::identity(5)).unwrap();
        assert!(max_abs_diff(p.h().matrix(), p.h_sa().matrix()) < 1e-14);

        let q = random_unitary(&mut rng, 8);
        let lambda: Vec<f64> = (1..=8).map(|k| k as f64).collect();
        let p = build_pair(&lambda, &q, TRule::DiagPower(1.0).operator(8)).unwrap();
        assert!(p.non_normality() > 1e-3);
        assert!(p.spectrum_error() < 1e-8);
        assert!(p.eigen_residual() < 1e-10);
        assert!(p.xi_residual() < 1e-12);

        let p = build_pair(&lambda, &CMat::identity(8, 8), TRule::DiagPower(1.0).operator(8)).unwrap();
        assert!(max_abs_diff(p.h().matrix(), &real_diag(&lambda)) < 1e-14);
        assert!(build_pair(&lambda, &CMat::identity(8, 8), LinearMap::diagonal(&[0.0; 8])).is_err());
    }

    #[test]
    fn weak_similarity_is_an_identity() {
        let p = PairSpec::demo(4).build(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let xi = CoefVector::new(random_unit_vector(&mut rng, 8), Space::D);
            let eta = CoefVector::new(random_unit_vector(&mut rng, 8), Space::H);
            assert!(p.weak_similarity_residual(&xi, &eta).unwrap() < 1e-10);
        }
        let id = PairSpec {
            t_rule: TRule::Identity,
            ..PairSpec::demo(4)
        }
        .build(6)
        .unwrap();
        let xi = CoefVector::new(random_unit_vector(&mut rng, 6), Space::D);
        let eta = CoefVector::new(random_unit_vector(&mut rng, 6), Space::H);
        assert!(id.weak_similarity_residual(&xi, &eta).unwrap() < 1e-13);
    }

    #[test]
    fn perturbed_hamiltonian_residual_is_linear() {
        let p = PairSpec::demo(4).build(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let e = random_unitary(&mut rng, 8);
        let xi = CoefVector::new(random_unit_vector(&mut rng, 8), Space::D);
        let eta = CoefVector::new(random_unit_vector(&mut rng, 8), Space::H);
        let eps = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2];
        let res: Vec<f64> = eps
            .iter()
            .map(|&e_| {
                let h = p.h().matrix() + &e * C64::new(e_, 0.0);
                p.clone()
                    .with_hamiltonian(h)
                    .unwrap()
                    .weak_similarity_residual(&xi, &eta)
                    .unwrap()
            })
            .collect();
        let slope = loglog_slope(&eps, &res).unwrap();
        assert!((slope - 1.0).abs() < 1e-3, "slope {slope}");
    }

    #[test]
    fn corrupted_eigenvalue_is_detected() {
        let p = PairSpec::demo(3).build(6).unwrap();
        assert!(p.eigen_residual() < 1e-10);
        let mut lambda = p.eigenvalues().to_vec();
        lambda[0] += 1.0;
        let bad = p.with_eigenvalues(lambda).unwrap();
        assert!(bad.eigen_residual() >= 1.0 - 1e-10);
    }

    #[test]
    fn repeated_eigenvalues_are_flagged() {
        let spec = PairSpec {
            lambda_rule: LambdaRule::Constant(2.0),
            ..PairSpec::demo(1)
        };
        assert!(spec.build(4).unwrap().has_repeated_eigenvalues());
        assert!(!PairSpec::demo(1).build(4).unwrap().has_repeated_eigenvalues());
    }

    #[test]
    fn density_examples() {
        let ladder = Ladder::doubling(8, 4);
        let d = density_diagnostic(&PairSpec::demo(1), &ladder, Exec::default()).unwrap();
        for (&n, v) in d.ladder.iter().zip(&d.probe_norms) {
            assert!((v - n as f64).abs() < 1e-12);
        }
        assert_eq!(d.shape, TrendShape::Growing);
        assert!(d.admissible_ranks.iter().zip(&d.ladder).all(|(r, n)| r == n));
        assert!(d.principal_angles.iter().all(|a| a.abs() < 1e-6));

        let id = PairSpec {
            t_rule: TRule::Identity,
            ..PairSpec::demo(1)
        };
        let d = density_diagnostic(&id, &ladder, Exec::default()).unwrap();
        assert!(d.probe_norms.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert_eq!((d.shape, d.verdict), (TrendShape::Bounded, Verdict::Pass));

        let inv = PairSpec {
            t_rule: TRule::DiagPower(-1.0),
            ..PairSpec::demo(1)
        };
        let d = density_diagnostic(&inv, &ladder, Exec::default()).unwrap();
        assert_eq!((d.shape, d.verdict), (TrendShape::Decaying, Verdict::Pass));
    }

    #[test]
    fn eigenbasis_is_strict_in_induced_triplet() {
        let ladder = Ladder::doubling(8, 4);
        let spec = PairSpec::demo(5);
        let r = strictness_report(&ladder, Exec::default(), |n| spec.build(n)?.eigen_family()).unwrap();
        assert_eq!(r.verdict, Verdict::Strict);
        let fam = spec.build(8).unwrap().eigen_family().unwrap();
        assert!(fam.biorthogonality_residual().unwrap() < 1e-12);
    }
}
