//! Invariants over randomly generated triplets, families and vectors.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rieszlike::linalg::{random_complex_normal, random_unitary, random_well_conditioned, stream_rng, CMat};
use rieszlike::triplet::WeightedTriplet;
use rieszlike::{make_riesz_like, pairing, CoefVector, LinearMap, Space};

fn triplet(seed: u64, n: usize, levels: usize, framed: bool) -> WeightedTriplet {
    let mut rng = stream_rng(seed, 0);
    let mut w: Vec<f64> = random_complex_normal(&mut rng, n)
        .iter()
        .map(|z| 1.0 + 4.0 * z.norm())
        .collect();
    w.sort_by(f64::total_cmp);
    let t = WeightedTriplet::new(w, levels).unwrap();
    if framed {
        t.with_frame(random_unitary(&mut rng, n)).unwrap()
    } else {
        t
    }
}

fn vector(seed: u64, stream: u64, n: usize, label: Space) -> CoefVector {
    CoefVector::new(random_complex_normal(&mut stream_rng(seed, stream), n), label)
}

fn basis(seed: u64, n: usize, levels: usize) -> rieszlike::RieszLikeBasis {
    let t = random_well_conditioned(&mut stream_rng(seed, 7), n, 0.5, 3.0);
    make_riesz_like(LinearMap::new(t), triplet(seed, n, levels, seed.is_multiple_of(2))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cauchy_schwarz_between_levels(seed in any::<u64>(), n in 1usize..10, j in 1usize..=3, framed in any::<bool>()) {
        let t = triplet(seed, n, 3, framed);
        let phi = vector(seed, 1, n, Space::Ddual);
        let f = vector(seed, 2, n, Space::D);
        let lhs = pairing(&phi, &f).unwrap().norm();
        let rhs = t.dual_norm(&phi, j).unwrap() * t.seminorm(&f, j).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn dual_norm_is_attained(seed in any::<u64>(), n in 1usize..10, j in 1usize..=2, framed in any::<bool>()) {
        let t = triplet(seed, n, 2, framed);
        let phi = vector(seed, 3, n, Space::Ddual);
        let f = t.dual_maximizer(&phi, j).unwrap();
        prop_assert!((t.seminorm(&f, j).unwrap() - 1.0).abs() < 1e-12);
        let attained = pairing(&phi, &f).unwrap().norm();
        let norm = t.dual_norm(&phi, j).unwrap();
        prop_assert!((attained - norm).abs() <= 1e-12 * norm.max(1.0));
    }

    #[test]
    fn seminorms_increase_with_level(seed in any::<u64>(), n in 1usize..10, framed in any::<bool>()) {
        let t = triplet(seed, n, 4, framed);
        let f = vector(seed, 4, n, Space::D);
        let p: Vec<f64> = (0..=4).map(|j| t.seminorm(&f, j).unwrap()).collect();
        prop_assert!(p.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-14)));
    }

    #[test]
    fn frame_operator_is_synthesis_after_analysis(seed in any::<u64>(), n in 1usize..9) {
        let b = basis(seed, n, 1);
        let fam = b.family();
        let eta = vector(seed, 5, n, Space::D);
        let via = fam.synthesis(&fam.analysis(&eta).unwrap()).unwrap();
        let direct = fam.frame_operator().unwrap().apply(&eta.coords).unwrap();
        let scale = direct.norm().max(1.0);
        prop_assert!((via.coords - direct).norm() <= 1e-12 * scale);
    }

    #[test]
    fn analysis_and_synthesis_are_adjoint(seed in any::<u64>(), n in 1usize..9) {
        let b = basis(seed, n, 1);
        let fam = b.family();
        let eta = vector(seed, 6, n, Space::D);
        let a = random_complex_normal(&mut stream_rng(seed, 7), n);
        // ⟨Σ a_k ζ_k, η⟩ = Σ a_k conj(conj⟨ζ_k, η⟩)
        let lhs = pairing(&fam.synthesis(&a).unwrap(), &eta).unwrap();
        let coeffs = fam.analysis(&eta).unwrap();
        let rhs = coeffs.dotc(&a);
        prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + lhs.norm()));
    }

    #[test]
    fn expansion_is_unconditional(seed in any::<u64>(), n in 2usize..9) {
        let b = basis(seed, n, 1);
        let fam = b.family();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut stream_rng(seed, 8));
        let shuffled = fam.permuted(&perm).unwrap();
        let f = vector(seed, 9, n, Space::D);
        let full = fam.partial_sum(&f, n).unwrap();
        let reordered = shuffled.partial_sum(&f, n).unwrap();
        prop_assert!((full.coords.clone() - &f.coords).norm() <= 1e-10 * f.coords.norm());
        prop_assert!((full.coords - reordered.coords).norm() <= 1e-10 * f.coords.norm());
        prop_assert!(shuffled.biorthogonality_residual().unwrap() <= 1e-10);
    }

    #[test]
    fn strictness_constants_are_frame_invariant(seed in any::<u64>(), n in 2usize..8) {
        let b = basis(seed, n, 1);
        let c = rieszlike::riesz::strictness_constants(b.family());
        let u = random_unitary(&mut stream_rng(seed, 10), n);
        // rotate both the frame and the family; the level norms do not change
        let t = b.triplet();
        let rotated_frame = &u * t.frame().cloned().unwrap_or_else(|| CMat::identity(n, n));
        let rt = WeightedTriplet::new(t.weights().to_vec(), 1).unwrap().with_frame(rotated_frame).unwrap();
        let fam = rieszlike::SequenceFamily::new(&u * b.family().family(), rt).unwrap();
        let d = rieszlike::riesz::strictness_constants(&fam);
        prop_assert!((c.lower - d.lower).abs() <= 1e-9 * c.lower.max(1.0));
        for (x, y) in c.upper.iter().zip(&d.upper) {
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }
}
