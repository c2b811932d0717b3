mod common;

use bistoch::cut::{
    bgp_from_distribution, check_bgp, corollary_certificate, corollary_target, cosine_correlation, cut_membership,
    random_unit_factor, rank_one_terms, CutDistribution, SignVector,
};
use bistoch::linalg::{derive_seed, hermitian_eig, seeded_rng, RealMatrix};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn membership_agrees_with_exhaustive_oracles() {
    let (mut disagreements, mut inside) = (0, 0);
    for k in 0..200u64 {
        let n = 2 + (k % 4) as usize;
        let c = common::random_correlation(n, derive_seed(9, k));
        let ours = cut_membership(&c, 1e-8).unwrap().is_feasible();
        let lp = common::full_sign_lp(&c, 1e-8);
        let facets = common::facet_oracle(&c, 1e-8);
        if ours != lp || ours != facets {
            disagreements += 1;
        }
        inside += ours as usize;
    }
    assert_eq!(disagreements, 0);
    // both verdicts must be exercised
    assert!(inside >= 20 && inside <= 180, "inside = {inside}");
}

fn random_distribution(n: usize, seed: u64) -> CutDistribution {
    let mut rng = seeded_rng(seed);
    let raw: Vec<f64> = (0..1u32 << n).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().enumerate().map(|(m, w)| (SignVector::new(n, m as u32).unwrap(), w / total)).collect();
    CutDistribution::new(n, weights).unwrap()
}

proptest! {
    #[test]
    fn walsh_round_trip(n in 1usize..=8, seed in any::<u64>()) {
        let d = random_distribution(n, seed);
        let back = bgp_from_distribution(&d).subset_weights();
        for (a, b) in back.iter().zip(d.subset_weights()) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn feasible_verdicts_reconstruct(n in 2usize..=7, seed in any::<u64>()) {
        let c = common::random_correlation(n, seed);
        if let Some(d) = cut_membership(&c, 1e-9).unwrap().distribution() {
            let sum = rank_one_terms(d).iter().fold(RealMatrix::zeros(n, n), |acc, (w, m)| acc.lin_comb(1.0, m.matrix(), *w));
            prop_assert!(sum.max_abs_diff(c.matrix()) <= 1e-8);
            let f = bgp_from_distribution(d);
            prop_assert!(check_bgp(&f, &c, 1e-8).unwrap().passed);
        }
    }
}

#[test]
fn corollary_certificates_always_verify() {
    for k in 0..1000u64 {
        let n = 1 + (k % 10) as usize;
        let r = 1 + ((k / 10) % 4) as usize;
        let a = random_unit_factor(r, n, derive_seed(17, k));
        let f = corollary_certificate(&a).unwrap();
        let check = check_bgp(&f, &corollary_target(&a).unwrap(), 1e-9).unwrap();
        assert!(check.passed && check.walsh_min >= -1e-9, "trial {k}: {check:?}");
    }
}

#[test]
fn cosine_matrices_have_rank_two() {
    for m in 1..=32 {
        let c = cosine_correlation(m).unwrap();
        let eig = hermitian_eig(&c.matrix().to_complex()).unwrap().eigenvalues;
        assert!(eig.get(2).copied().unwrap_or(0.0) <= 1e-9, "m = {m}");
    }
}
