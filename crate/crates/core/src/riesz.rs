//! Riesz-like bases: families carried onto the canonical orthonormal basis by
//! a continuous injective operator `T`, with duals `ζ_n = T† e_n`.
//!
//! Besides construction this module checks the positivity/seminorm
//! characterization through `S ξ_k = ζ_k`, the range identity `T†(H) = D(V)`
//! along a ladder of truncations, and strictness (continuity of `T^{-1}`)
//! through lower/upper frame-type constants.
//!
//! Strictness, completeness and range membership are statements about the
//! infinite-dimensional limit. At a single truncation every injective matrix
//! is boundedly invertible, so these verdicts come from trends over a
//! [`Ladder`] and say nothing beyond it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_part, hermitian_sqrt, identity_residual, inverse, max_abs, max_abs_diff, numerical_rank,
    pinv, random_unit_vector, sigma_max, sigma_min, singular_values, stream_rng, CMat, CVec, RANK_RTOL,
};
use crate::operator::LinearMap;
use crate::par::{self, Exec};
use crate::sequence::{ProbeOptions, SequenceFamily, UNIT_CONSTANT_SLACK};
use crate::trend::{classify, loglog_slope, Ladder, Side, DECAY_THRESHOLD, GROWTH_THRESHOLD, MIN_LADDER};
use crate::triplet::{CoefVector, Space, WeightedTriplet};
use crate::verdict::Verdict;

/// Recorded with every strictness and range verdict.
pub const TRUNCATION_NOTE: &str = "finite truncation: completeness is realized as full column rank and \
     the verdict is a log-log trend over the listed ladder only";

#[derive(Debug, Clone)]
pub struct RieszLikeBasis {
    t: LinearMap,
    family: SequenceFamily,
    strictness: Verdict,
}

/// Entrywise residuals of the defining identities of a constructed basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstructionResiduals {
    /// `max |T Ξ − I|`
    pub t_xi: f64,
    /// `max |Z − T*|`
    pub zeta_adjoint: f64,
    /// `max |T*T Ξ − Z|`
    pub t_dag_t_xi: f64,
}

impl ConstructionResiduals {
    pub fn max(&self) -> f64 {
        self.t_xi.max(self.zeta_adjoint).max(self.t_dag_t_xi)
    }
}

/// Build `ξ_n = T^{-1} e_n`, `ζ_n = T† e_n` from an injective `T` continuous from
/// level 1 into `H`.
pub fn make_riesz_like(t: LinearMap, triplet: WeightedTriplet) -> Result<RieszLikeBasis> {
    let (rows, cols) = t.shape();
    if rows != cols || rows != triplet.dim() {
        return Err(Error::dim(format!(
            "T is {rows}x{cols}, triplet dimension is {}",
            triplet.dim()
        )));
    }
    if t.matrix().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Continuity("T has non-finite entries".into()));
    }
    let s = singular_values(t.matrix());
    let (top, bottom) = (s[0], s[s.len() - 1]);
    if !top.is_finite() {
        return Err(Error::Continuity("T has non-finite singular values".into()));
    }
    if !(bottom > RANK_RTOL * top) {
        return Err(Error::Injectivity {
            sigma_min: bottom,
            tolerance: RANK_RTOL * top,
        });
    }
    let t = t.certified(&triplet, &[(1, 0)])?;
    let xi = inverse(t.matrix())?;
    let zeta = t.matrix().adjoint();
    let family = SequenceFamily::new(xi, triplet)?.with_dual(zeta)?;
    Ok(RieszLikeBasis {
        t,
        family,
        strictness: Verdict::Inconclusive,
    })
}

impl RieszLikeBasis {
    pub fn t(&self) -> &LinearMap {
        &self.t
    }

    pub fn family(&self) -> &SequenceFamily {
        &self.family
    }

    pub fn triplet(&self) -> &WeightedTriplet {
        self.family.triplet()
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// Current strictness verdict; `inconclusive` until a report is attached.
    pub fn strictness(&self) -> Verdict {
        self.strictness
    }

    pub fn with_strictness(mut self, report: &StrictnessReport) -> Self {
        self.strictness = report.verdict;
        self
    }

    pub fn construction_residuals(&self) -> ConstructionResiduals {
        let t = self.t.matrix();
        let xi = self.family.family();
        let zeta = self.family.dual().expect("constructed with dual");
        ConstructionResiduals {
            t_xi: identity_residual(&(t * xi)),
            zeta_adjoint: max_abs_diff(zeta, &t.adjoint()),
            t_dag_t_xi: max_abs_diff(&(t.adjoint() * t * xi), zeta),
        }
    }

    /// `T† g = Σ_k ⟨g, e_k⟩ ζ_k`.
    pub fn adjoint_action(&self, g: &CoefVector) -> Result<CoefVector> {
        Ok(CoefVector::new(self.t.adjoint().apply(&g.coords)?, Space::Ddual))
    }

    /// Dimension of `{g : T† g ∈ H}` at this truncation. Always full for an
    /// invertible `T`; reported only as the finite shadow of closability.
    pub fn adjoint_domain_dimension(&self) -> usize {
        numerical_rank(&self.t.matrix().adjoint())
    }
}

/// `p_ζ(f) = (Σ_k |⟨ζ_k, f⟩|²)^{1/2}`.
pub fn p_zeta_seminorm(fam: &SequenceFamily, f: &CoefVector) -> Result<f64> {
    Ok(fam.analysis(f)?.norm())
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeMembership {
    pub ladder: Vec<usize>,
    /// `Σ_k |⟨Ψ, ξ_k⟩|²` per ladder size.
    pub sq_sums: Vec<f64>,
    /// `max |T† h − Ψ|` for the reconstructed preimage `h = Σ_k ⟨Ψ, ξ_k⟩ e_k`.
    pub preimage_residuals: Vec<f64>,
    /// Log-log slope of the increments of `sq_sums`, `None` when they vanish.
    pub increment_slope: Option<f64>,
    pub in_range: Verdict,
    pub note: &'static str,
}

/// Membership of `Ψ` in `T†(H) = D(V)` along a ladder. `basis_at(N)` and
/// `psi_at(N)` evaluate the model and the coefficient rule at size `N`.
pub fn range_membership<B, P>(ladder: &Ladder, exec: Exec, basis_at: B, psi_at: P) -> Result<RangeMembership>
where
    B: Fn(usize) -> Result<RieszLikeBasis> + Sync + Send,
    P: Fn(usize) -> CoefVector + Sync + Send,
{
    let points = par::try_map(exec, ladder.sizes(), |&n| -> Result<(f64, f64)> {
        let basis = basis_at(n)?;
        let psi = psi_at(n);
        let v = basis.family().v_operator(&psi)?;
        let back = basis.t().adjoint().apply(&v.coefficients)?;
        let residual = back
            .iter()
            .zip(psi.coords.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok((v.sq_sum, residual))
    })?;
    let sq_sums: Vec<f64> = points.iter().map(|p| p.0).collect();
    let preimage_residuals = points.iter().map(|p| p.1).collect();

    let increments: Vec<f64> = sq_sums.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = sq_sums.iter().copied().fold(1.0, f64::max);
    let stationary = increments.iter().all(|d| d.abs() <= 1e-14 * scale);
    let increment_slope = if stationary {
        None
    } else {
        loglog_slope(&ladder.as_f64()[1..], &increments)
    };
    let in_range = if ladder.len() < MIN_LADDER {
        Verdict::Inconclusive
    } else if stationary {
        Verdict::Pass
    } else {
        match increment_slope.map(|s| classify(s, DECAY_THRESHOLD)) {
            Some(Side::Below) => Verdict::Pass,
            Some(Side::Above) => Verdict::Fail,
            _ => Verdict::Inconclusive,
        }
    };
    Ok(RangeMembership {
        ladder: ladder.sizes().to_vec(),
        sq_sums,
        preimage_residuals,
        increment_slope,
        in_range,
        note: TRUNCATION_NOTE,
    })
}

#[derive(Debug, Clone)]
pub struct EquivalenceCheck {
    /// `S` with `S ξ_k = ζ_k`.
    pub s: LinearMap,
    /// `max |S Ξ − Z|`.
    pub s_residual: f64,
    /// `max |S − S*|`.
    pub s_hermitian_residual: f64,
    pub s_min_eigenvalue: f64,
    /// Signed real part of the worst sampled `⟨Sf, f⟩ − Σ|a_k|²`.
    pub positivity: f64,
    /// Modulus of the same worst deviation.
    pub positivity_abs: f64,
    /// Exact `sup p_ζ(f) / p_j(f)` per level `j`.
    pub p_zeta_constants: Vec<f64>,
    /// Largest sampled ratio per level.
    pub p_zeta_sampled: Vec<f64>,
    pub p_zeta_level: Option<usize>,
    pub verdict: Verdict,
}

/// Check the three equivalent conditions tying a biorthogonal pair to a
/// positive `S`: `S ξ_k = ζ_k`, `⟨Sf, f⟩ = Σ|a_k|²` for `f = Σ a_k ξ_k`, and
/// continuity of `p_ζ` against some level seminorm.
pub fn equivalence_check(fam: &SequenceFamily, probe: &ProbeOptions) -> Result<EquivalenceCheck> {
    let fam = if fam.dual().is_some() {
        fam.clone()
    } else {
        let (fam, rf) = fam.clone().ensure_dual()?;
        if fam.dual().is_none() {
            return Err(Error::State(format!("no dual could be constructed: {}", rf.note)));
        }
        fam
    };
    let xi = fam.family();
    let zeta = fam.dual().expect("dual ensured");
    let xi_inv = if xi.is_square() {
        inverse(xi)?
    } else {
        let (p, rank) = pinv(xi);
        if rank < xi.ncols() {
            return Err(Error::Injectivity {
                sigma_min: sigma_min(xi),
                tolerance: RANK_RTOL * sigma_max(xi),
            });
        }
        p
    };
    let s = zeta * xi_inv;
    let s_residual = max_abs_diff(&(&s * xi), zeta);
    let s_hermitian_residual = max_abs_diff(&s, &s.adjoint());
    let s_min_eigenvalue = hermitian_eigen(&hermitian_part(&s)).0[0];

    let m = fam.len();
    let deviations = par::map_range(Exec::default(), probe.trials, |t| {
        let mut rng = stream_rng(probe.seed, t as u64);
        let a = random_unit_vector(&mut rng, m);
        let f = xi * &a;
        let sf = &s * &f;
        f.dotc(&sf) - a.norm_squared()
    });
    let worst = deviations
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default();

    let trip = fam.triplet();
    let levels = trip.levels();
    let p_zeta_constants: Vec<f64> = (0..=levels)
        .map(|j| sigma_max(&trip.to_level(zeta, -(j as i32))))
        .collect();
    let n = fam.dim();
    let ratios = par::map_range(Exec::default(), probe.trials, |t| {
        let mut rng = stream_rng(probe.seed ^ 0x9e37_79b9_7f4a_7c15, t as u64);
        let f = random_unit_vector(&mut rng, n);
        let pz = (zeta.adjoint() * &f).norm();
        (0..=levels)
            .map(|j| pz / trip.level_norm(&f, j as i32).expect("level in range"))
            .collect::<Vec<f64>>()
    });
    let p_zeta_sampled: Vec<f64> = (0..=levels)
        .map(|j| ratios.iter().map(|r| r[j]).fold(0.0, f64::max))
        .collect();
    let p_zeta_level = p_zeta_constants
        .iter()
        .position(|&c| c <= probe.bound * (1.0 + UNIT_CONSTANT_SLACK));

    let scale = max_abs(zeta).max(1.0);
    let tol = fam.tolerance() * scale;
    let ok = s_residual <= tol
        && s_hermitian_residual <= tol * max_abs(&s).max(1.0)
        && s_min_eigenvalue >= -tol
        && worst.norm() <= tol
        && p_zeta_level.is_some();
    Ok(EquivalenceCheck {
        s: LinearMap::new(s),
        s_residual,
        s_hermitian_residual,
        s_min_eigenvalue,
        positivity: worst.re,
        positivity_abs: worst.norm(),
        p_zeta_constants,
        p_zeta_sampled,
        p_zeta_level,
        verdict: Verdict::from_bool(ok),
    })
}

/// Rebuild an operator from a positive `S` as `S^{1/2}` and return it with the
/// residual of the Gram matrix of its images `S^{1/2} ξ_n` against the identity.
pub fn rebuild_from_s(s: &LinearMap, fam: &SequenceFamily) -> (LinearMap, f64) {
    let root = hermitian_sqrt(&hermitian_part(s.matrix()));
    let images = &root * fam.family();
    let gram = images.adjoint() * images;
    (LinearMap::new(root), identity_residual(&gram))
}

/// Strictness constants at one truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictnessPoint {
    /// Number of family vectors (the ladder coordinate).
    pub n: usize,
    pub rank_full: bool,
    /// `σ_min(diag(w) U* Ξ)²`: `Σ|c_i|² · lower ≤ p_1(Σ c_i ξ_i)²`.
    pub lower: f64,
    /// `C_q = σ_max(diag(w)^q U* Ξ)²` for `q = 0..=J`.
    pub upper: Vec<f64>,
}

pub fn strictness_constants(fam: &SequenceFamily) -> StrictnessPoint {
    let trip = fam.triplet();
    let xi = fam.family();
    let lower = sigma_min(&trip.to_level(xi, 1)).powi(2);
    let upper = (0..=trip.levels())
        .map(|q| sigma_max(&trip.to_level(xi, q as i32)).powi(2))
        .collect();
    StrictnessPoint {
        n: fam.len(),
        rank_full: numerical_rank(xi) == fam.len(),
        lower,
        upper,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StrictnessReport {
    pub ladder: Vec<usize>,
    pub points: Vec<StrictnessPoint>,
    /// Growth exponent of `1 / lower` over the ladder.
    pub lower_slope: Option<f64>,
    /// Growth exponent of `C_q` per level.
    pub upper_slopes: Vec<Option<f64>>,
    pub verdict: Verdict,
    pub note: &'static str,
}

impl StrictnessReport {
    pub fn lower_constants(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lower).collect()
    }

    /// `C_q(N)` across the ladder for level `q`.
    pub fn upper_constants(&self, q: usize) -> Vec<f64> {
        self.points.iter().map(|p| p.upper[q]).collect()
    }
}

/// Strictness verdict from constants over a ladder. `family_at(N)` builds the
/// family (with its triplet) at size `N`.
pub fn strictness_report<F>(ladder: &Ladder, exec: Exec, family_at: F) -> Result<StrictnessReport>
where
    F: Fn(usize) -> Result<SequenceFamily> + Sync + Send,
{
    let points = par::try_map(exec, ladder.sizes(), |&n| {
        family_at(n).map(|f| strictness_constants(&f))
    })?;
    let levels = points[0].upper.len();
    if points.iter().any(|p| p.upper.len() != levels) {
        return Err(Error::Validation(
            "seminorm level count changes along the ladder".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let inv_lower: Vec<f64> = points.iter().map(|p| 1.0 / p.lower).collect();
    let lower_slope = loglog_slope(&xs, &inv_lower);
    let upper_slopes: Vec<Option<f64>> = (0..levels)
        .map(|q| loglog_slope(&xs, &points.iter().map(|p| p.upper[q]).collect::<Vec<_>>()))
        .collect();

    let degenerate = points.iter().any(|p| !p.rank_full || !(p.lower > 0.0));
    let sides: Vec<Side> = std::iter::once(lower_slope)
        .chain(upper_slopes.iter().copied())
        .map(|s| s.map_or(Side::Tie, |s| classify(s, GROWTH_THRESHOLD)))
        .collect();
    let verdict = if degenerate || sides.contains(&Side::Above) {
        Verdict::NonStrict
    } else if ladder.len() < MIN_LADDER || sides.contains(&Side::Tie) {
        Verdict::Inconclusive
    } else {
        Verdict::Strict
    };
    Ok(StrictnessReport {
        ladder: ladder.sizes().to_vec(),
        points,
        lower_slope,
        upper_slopes,
        verdict,
        note: TRUNCATION_NOTE,
    })
}

/// [`strictness_report`] for bases produced by a per-size builder.
pub fn basis_strictness_report<B>(ladder: &Ladder, exec: Exec, basis_at: B) -> Result<StrictnessReport>
where
    B: Fn(usize) -> Result<RieszLikeBasis> + Sync + Send,
{
    strictness_report(ladder, exec, |n| basis_at(n).map(|b| b.family))
}

/// The `H_{+1} ⊂ H ⊂ H_{-1}` triplet induced by a basis.
#[derive(Debug, Clone)]
pub struct RealizedTriplet {
    /// `J = 1` triplet with `p_1(f) = ‖T f‖`; weights are the singular values of `T`.
    pub triplet: WeightedTriplet,
    /// `max |⟨ξ_i, ξ_j⟩_{+1} − δ_ij|`.
    pub plus_gram_residual: f64,
    /// `max |⟨ζ_i, ζ_j⟩_{-1} − δ_ij|`.
    pub minus_gram_residual: f64,
    /// Dual norm of each `ζ_n` in the realized triplet.
    pub dual_norms: Vec<f64>,
}

/// Realize `⟨ξ, η⟩_{+1} = ⟨Tξ, Tη⟩` from the polar decomposition of `T`.
pub fn hilbert_triplet_realization(basis: &RieszLikeBasis) -> Result<RealizedTriplet> {
    if basis.strictness() == Verdict::NonStrict {
        return Err(Error::State(
            "basis is non-strict; no Hilbert triplet is induced".into(),
        ));
    }
    let t = basis.t().matrix();
    let (vals, vecs) = hermitian_eigen(&(t.adjoint() * t));
    let weights: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    let triplet = WeightedTriplet::new_positive(weights, 1)?.with_frame(vecs)?;
    let gram = |m: &CMat| m.adjoint() * m;
    let xi_plus = triplet.to_level(basis.family().family(), 1);
    let zeta = basis.family().dual().expect("constructed with dual");
    let zeta_minus = triplet.to_level(zeta, -1);
    let dual_norms = (0..zeta.ncols())
        .map(|k| {
            let col: CVec = zeta.column(k).into_owned();
            triplet.level_norm(&col, -1)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RealizedTriplet {
        plus_gram_residual: identity_residual(&gram(&xi_plus)),
        minus_gram_residual: identity_residual(&gram(&zeta_minus)),
        triplet,
        dual_norms,
    })
}
