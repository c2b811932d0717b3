//! Oracles shared by the integration tests. None of them call into the
//! code paths they are used to check.
#![allow(dead_code)]

use bistoch::cut::{random_unit_factor, RealCorrelationMatrix};
use bistoch::linalg::{derive_seed, seeded_rng, RealMatrix};
use bistoch::lp::{solve_feasibility, verify_solution, FeasibilityProblem};
use rand::Rng;

/// Slack of every hypermetric inequality with coefficients in {0, ±1} and
/// support 3 or 5: `Σ b_i² + 2 Σ_{i<j} b_i b_j c_ij >= 1`. For n <= 5 these
/// (triangle and pentagonal) describe the cut polytope exactly.
pub fn facet_min_slack(c: &RealCorrelationMatrix) -> f64 {
    let n = c.n();
    assert!(n <= 5, "facet oracle is complete only for n <= 5");
    let mut worst = f64::INFINITY;
    let mut b = vec![0i32; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut k = code;
        for bi in b.iter_mut() {
            *bi = (k % 3) as i32 - 1;
            k /= 3;
        }
        let support = b.iter().filter(|&&x| x != 0).count();
        if support != 3 && support != 5 {
            continue;
        }
        let mut lhs = support as f64;
        for i in 0..n {
            for j in i + 1..n {
                lhs += 2.0 * (b[i] * b[j]) as f64 * c.get(i, j);
            }
        }
        worst = worst.min(lhs - 1.0);
    }
    worst
}

pub fn facet_oracle(c: &RealCorrelationMatrix, tol: f64) -> bool {
    c.n() < 3 || facet_min_slack(c) >= -tol
}

/// LP over all `2^n` sign vectors (no canonicalisation), accepted only
/// through `verify_solution`.
pub fn full_sign_lp(c: &RealCorrelationMatrix, tol: f64) -> bool {
    let n = c.n();
    let cols = 1usize << n;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let sign = |mask: usize, i: usize| if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
    let e = RealMatrix::from_fn(1 + pairs.len(), cols, |r, m| {
        if r == 0 {
            1.0
        } else {
            let (i, j) = pairs[r - 1];
            sign(m, i) * sign(m, j)
        }
    });
    let mut b = vec![1.0];
    b.extend(pairs.iter().map(|&(i, j)| c.get(i, j)));
    let p = FeasibilityProblem::new(e, b).unwrap();
    let r = solve_feasibility(&p, tol).unwrap();
    r.x.map(|x| verify_solution(&p, &x, 10.0 * tol).unwrap()).unwrap_or(false)
}

/// Random correlation matrix of random rank, shrunk toward `I` by a random
/// factor so that both verdicts occur.
pub fn random_correlation(n: usize, seed: u64) -> RealCorrelationMatrix {
    let mut rng = seeded_rng(seed);
    let r = rng.random_range(1..=n);
    let t: f64 = rng.random_range(0.3..=1.0);
    let a = random_unit_factor(r, n, derive_seed(seed, 1));
    RealCorrelationMatrix::from_factor(&a).unwrap().shrink(t).unwrap()
}
