use crate::error::Result;
use crate::linalg::CMat;
use crate::operator::LinearMap;
use crate::riesz::{make_riesz_like, RieszLikeBasis};
use crate::sequence::SequenceFamily;
use crate::triplet::{WeightRule, WeightedTriplet};

/// Number operator `N e_k = k e_k` with seminorms `‖N^j ·‖`, `j ≤ J`, and the
/// basis `ξ_k = e_k / k` it maps onto `{e_k}`.
pub fn number_operator_model(n: usize, levels: usize) -> Result<(WeightedTriplet, RieszLikeBasis)> {
    let triplet = WeightedTriplet::from_rule(n, &WeightRule::Linear, levels)?;
    let t = LinearMap::diagonal(triplet.weights());
    let basis = make_riesz_like(t, triplet.clone())?;
    Ok((triplet, basis))
}

/// Hermite-coefficient model of the Schwartz space: weights `k`, and the
/// Hermite functions as a self-dual orthonormal family.
pub fn schwartz_hermite_model(n: usize, levels: usize) -> Result<(WeightedTriplet, SequenceFamily)> {
    let triplet = WeightedTriplet::from_rule(n, &WeightRule::Linear, levels)?;
    let family = SequenceFamily::new(CMat::identity(n, n), triplet.clone())?.with_dual(CMat::identity(n, n))?;
    Ok((triplet, family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, real_diag};
    use crate::par::Exec;
    use crate::riesz::{basis_strictness_report, strictness_report};
    use crate::trend::Ladder;
    use crate::triplet::{CoefVector, Space};
    use crate::verdict::Verdict;

    #[test]
    fn number_operator_examples() {
        let (_, b) = number_operator_model(4, 1).unwrap();
        assert!(max_abs_diff(b.family().family(), &real_diag(&[1.0, 0.5, 1.0 / 3.0, 0.25])) < 1e-15);
        let ladder = Ladder::doubling(4, 4);
        let r = basis_strictness_report(&ladder, Exec::default(), |n| Ok(number_operator_model(n, 1)?.1)).unwrap();
        assert_eq!(r.verdict, Verdict::Strict);

        let (trip, b) = number_operator_model(4, 2).unwrap();
        for k in 1..=4 {
            let p2 = trip.seminorm(&b.family().xi(k - 1), 2).unwrap();
            assert!((p2 - k as f64).abs() < 1e-14);
        }
        let r = basis_strictness_report(&ladder, Exec::default(), |n| Ok(number_operator_model(n, 2)?.1)).unwrap();
        assert_eq!(r.verdict, Verdict::NonStrict);

        let (trip, b) = number_operator_model(1, 1).unwrap();
        assert_eq!(trip.weights(), &[1.0]);
        assert_eq!(b.family().family()[(0, 0)].re, 1.0);
        assert_eq!(b.family().bessel_bound(1).unwrap(), 1.0);
    }

    #[test]
    fn schwartz_examples() {
        let (_, fam) = schwartz_hermite_model(6, 1).unwrap();
        assert_eq!(fam.biorthogonality_residual().unwrap(), 0.0);
        assert!((fam.bessel_bound(1).unwrap() - 1.0).abs() < 1e-14);
        let e3 = CoefVector::basis(6, 3, Space::D);
        assert_eq!(fam.analysis(&e3).unwrap(), e3.coords);
        let ladder = Ladder::doubling(4, 4);
        let r = strictness_report(&ladder, Exec::default(), |n| Ok(schwartz_hermite_model(n, 2)?.1)).unwrap();
        assert_eq!(r.verdict, Verdict::NonStrict);
    }
}
