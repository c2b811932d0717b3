//! H-unistochastic matrices and their convex hull.
//!
//! Exact membership in the hull is not available, so this module works with
//! two one-sided tests:
//!
//! * inner certificates: an LP over a finite generator set of Hermitian
//!   unitaries (involutions, the explicit 3×3 and 4×4 witnesses, random
//!   samples stratified by signature); feasibility proves membership;
//! * outer certificates: linear inequalities every hull element satisfies
//!   (the trace bound for odd `n`, the diagonal functional for `n = 4`).
//!
//! An infeasible LP alone never yields `outside`.

use serde::{Deserialize, Serialize};

use crate::birkhoff::{katz_block, segment_point, BistochasticMatrix, Permutation};
use crate::linalg::{derive_seed, random_unitary, ComplexMatrix, RealMatrix, C64};
use crate::lp::{solve_feasibility, verify_solution, FeasibilityProblem};
use crate::{Error, Result};

/// Hermitian and unitary tolerance for [`HermitianUnitary`].
pub const HU_TOL: f64 = 1e-10;
/// Slack below `-CONDITION_TOL` counts as a violated necessary condition.
pub const CONDITION_TOL: f64 = 1e-12;
/// Inside certificates must reconstruct the target to this accuracy.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
pub const MAX_INVOLUTION_N: usize = 10;

/// Matrix that is both Hermitian and unitary, so its eigenvalues are ±1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HermitianUnitary {
    matrix: ComplexMatrix,
    /// Number of eigenvalues equal to -1.
    signature: usize,
}

impl HermitianUnitary {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let h = matrix.hermitian_deviation();
        if h > HU_TOL {
            return Err(Error::NotHermitian { deviation: h });
        }
        let u = matrix.unitary_deviation();
        if u > HU_TOL {
            return Err(Error::NotUnitary { deviation: u });
        }
        let n = matrix.n() as f64;
        let trace = matrix.trace().re;
        let signature = ((n - trace) / 2.0).round().max(0.0) as usize;
        Ok(Self { matrix, signature })
    }

    pub fn from_permutation(perm: &Permutation) -> Result<Self> {
        if !perm.is_involution() {
            return Err(Error::InvalidPermutation("only involutions give Hermitian permutation matrices".into()));
        }
        Self::new(perm.matrix().to_complex())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn signature(&self) -> usize {
        self.signature
    }

    /// `U ∘ Ū`, always symmetric bistochastic.
    pub fn image(&self) -> BistochasticMatrix {
        let a = self.matrix.abs_squared();
        let n = a.rows();
        // symmetrise away rounding so the symmetric flag is exact
        let sym = RealMatrix::from_fn(n, n, |i, j| 0.5 * (a.get(i, j) + a.get(j, i)));
        BistochasticMatrix::new(sym).expect("image of a unitary is doubly stochastic")
    }

    pub fn direct_sum_one(&self) -> Self {
        let n = self.n();
        let mut m = ComplexMatrix::zeros(n + 1);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.matrix.get(i, j));
            }
        }
        m.set(n, n, C64::new(1.0, 0.0));
        Self { matrix: m, signature: self.signature }
    }

    pub fn permute(&self, perm: &Permutation) -> Self {
        Self { matrix: self.matrix.permute(perm.mapping()), signature: self.signature }
    }
}

/// Where a generator came from, enough to rebuild it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Origin {
    Involution { mapping: Vec<usize> },
    Witness { name: String },
    Random { seed: u64, signature: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Generator {
    pub origin: Origin,
    #[serde(skip)]
    pub unitary: HermitianUnitary,
}

/// `U ∘ Ū` for a unitary `U`.
pub fn uni_image(u: &ComplexMatrix) -> Result<BistochasticMatrix> {
    let deviation = u.unitary_deviation();
    if deviation > HU_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    BistochasticMatrix::new(u.abs_squared())
}

/// `V · diag(+1, …, -1, …) · V*` with `V` Haar-random and `minus_count` eigenvalues -1.
pub fn random_hermitian_unitary(n: usize, minus_count: usize, seed: u64) -> Result<HermitianUnitary> {
    if minus_count > n {
        return Err(Error::OutOfRange(format!("minus_count {minus_count} exceeds n = {n}")));
    }
    if minus_count == 0 || minus_count == n {
        let sign = if minus_count == 0 { 1.0 } else { -1.0 };
        return Ok(HermitianUnitary { matrix: ComplexMatrix::identity(n).scale_real(sign), signature: minus_count });
    }
    let v = random_unitary(n, seed);
    let signs: Vec<C64> = (0..n).map(|i| C64::new(if i < n - minus_count { 1.0 } else { -1.0 }, 0.0)).collect();
    let u = &(&v * &ComplexMatrix::diag(&signs)) * &v.adjoint();
    let herm = ComplexMatrix::from_fn(n, |i, j| (u.get(i, j) + u.get(j, i).conj()) * 0.5);
    Ok(HermitianUnitary { matrix: herm, signature: minus_count })
}

/// All involutions of `0..n` (lexicographic order).
pub fn involutions(n: usize) -> Vec<Permutation> {
    fn rec(mapping: &mut Vec<Option<usize>>, out: &mut Vec<Permutation>) {
        let Some(first) = mapping.iter().position(Option::is_none) else {
            let m = mapping.iter().map(|x| x.unwrap()).collect();
            out.push(Permutation::new(m).unwrap());
            return;
        };
        mapping[first] = Some(first);
        rec(mapping, out);
        for j in first + 1..mapping.len() {
            if mapping[j].is_none() {
                mapping[first] = Some(j);
                mapping[j] = Some(first);
                rec(mapping, out);
                mapping[j] = None;
            }
        }
        mapping[first] = None;
    }
    let mut out = Vec::new();
    rec(&mut vec![None; n], &mut out);
    out
}

/// Every symmetric permutation matrix of size `n` as a generator.
pub fn involution_generators(n: usize) -> Result<Vec<Generator>> {
    if n > MAX_INVOLUTION_N {
        return Err(Error::DimensionCap { n, cap: MAX_INVOLUTION_N });
    }
    involutions(n)
        .into_iter()
        .map(|p| {
            Ok(Generator {
                unitary: HermitianUnitary::from_permutation(&p)?,
                origin: Origin::Involution { mapping: p.mapping().to_vec() },
            })
        })
        .collect()
}

/// The 3×3 Hermitian unitary `(2J - 3I)/3`, whose image is `(2/3)B_3 + (1/3)W_3`.
pub fn witness_unitary_3() -> HermitianUnitary {
    let m = ComplexMatrix::from_fn(3, |i, j| C64::new(if i == j { -1.0 / 3.0 } else { 2.0 / 3.0 }, 0.0));
    HermitianUnitary::new(m).expect("(2J - 3I)/3 is a Hermitian unitary")
}

/// A symmetric bistochastic matrix together with an explicit convex
/// decomposition into H-unistochastic images.
#[derive(Clone, Debug, Serialize)]
pub struct PaperWitness {
    pub name: String,
    pub matrix: BistochasticMatrix,
    pub terms: Vec<(f64, Generator)>,
}

impl PaperWitness {
    /// `Σ w · (U ∘ Ū)` recomputed from the terms.
    pub fn reconstruct(&self) -> RealMatrix {
        weighted_image_sum(self.matrix.n(), self.terms.iter().map(|(w, g)| (*w, &g.unitary)))
    }
}

fn weighted_image_sum<'a>(n: usize, terms: impl Iterator<Item = (f64, &'a HermitianUnitary)>) -> RealMatrix {
    let mut acc = RealMatrix::zeros(n, n);
    for (w, u) in terms {
        let img = u.matrix().abs_squared();
        acc = acc.lin_comb(1.0, &img, w);
    }
    acc
}

/// Explicit witnesses that `(2/3)M + (1/3)W_n` lies in the hull for `n = 3, 4`.
pub fn paper_witnesses(n: usize) -> Result<Vec<PaperWitness>> {
    let u3 = witness_unitary_3();
    match n {
        3 => {
            let target = segment_point(&katz_block(3)?, 2.0 / 3.0)?;
            Ok(vec![PaperWitness {
                name: "prop1".into(),
                matrix: target,
                terms: vec![(1.0, Generator { origin: Origin::Witness { name: "u3".into() }, unitary: u3 })],
            }])
        }
        4 => {
            let pairings = [vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]];
            let pairs: Vec<Generator> = pairings
                .iter()
                .map(|m| {
                    let p = Permutation::new(m.clone())?;
                    Ok(Generator {
                        unitary: HermitianUnitary::from_permutation(&p)?,
                        origin: Origin::Involution { mapping: m.clone() },
                    })
                })
                .collect::<Result<_>>()?;
            let y_gen = Generator { origin: Origin::Witness { name: "u3+1".into() }, unitary: u3.direct_sum_one() };

            let x = RealMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 1.0 / 3.0 });
            let y = RealMatrix::from_fn(4, 4, |i, j| match (i, j) {
                (3, 3) => 1.0,
                (3, _) | (_, 3) => 0.0,
                _ if i == j => 1.0 / 9.0,
                _ => 4.0 / 9.0,
            });
            let m = crate::birkhoff::katz_extreme_point(&"3,1".parse()?, &Permutation::identity(4))?;
            let target = segment_point(&m, 2.0 / 3.0)?;

            let mut combined: Vec<(f64, Generator)> = pairs.iter().map(|g| (1.0 / 12.0, g.clone())).collect();
            combined.push((0.75, y_gen.clone()));
            Ok(vec![
                PaperWitness {
                    name: "X".into(),
                    matrix: BistochasticMatrix::new(x)?,
                    terms: pairs.into_iter().map(|g| (1.0 / 3.0, g)).collect(),
                },
                PaperWitness { name: "Y".into(), matrix: BistochasticMatrix::new(y)?, terms: vec![(1.0, y_gen)] },
                PaperWitness { name: "quarter_X_plus_three_quarter_Y".into(), matrix: target, terms: combined },
            ])
        }
        _ => Err(Error::OutOfRange(format!("explicit witnesses exist for n = 3, 4 only (got {n})"))),
    }
}

/// Witness unitaries for `n = 3, 4` and all their permutation conjugates.
pub fn witness_generators(n: usize) -> Vec<Generator> {
    let base = match n {
        3 => witness_unitary_3(),
        4 => witness_unitary_3().direct_sum_one(),
        _ => return Vec::new(),
    };
    let mut out: Vec<Generator> = Vec::new();
    for perm in Permutation::all(n) {
        let u = base.permute(&perm);
        if out.iter().all(|g| g.unitary.matrix().max_abs_diff(u.matrix()) > 1e-12) {
            out.push(Generator {
                origin: Origin::Witness { name: format!("witness{n}:{:?}", perm.mapping()) },
                unitary: u,
            });
        }
    }
    out
}

/// `count` random Hermitian unitaries, signatures cycling through `0..=n`.
pub fn random_generators(n: usize, count: usize, seed: u64) -> Result<Vec<Generator>> {
    (0..count)
        .map(|i| {
            let signature = i % (n + 1);
            let s = derive_seed(seed, i as u64);
            Ok(Generator { unitary: random_hermitian_unitary(n, signature, s)?, origin: Origin::Random { seed: s, signature } })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub name: String,
    pub value: f64,
    /// Nonnegative iff the condition holds.
    pub slack: f64,
    pub satisfied: bool,
}

/// Linear inequalities satisfied by every element of the H-unistochastic hull.
///
/// * odd `n`: `tr(A) >= 1/n` (a Hermitian unitary of odd size has `|tr U| >= 1`,
///   then Cauchy–Schwarz on the diagonal);
/// * `n = 4`: `3 Σ_{i≠j} a_ii - a_jj >= 0` for each `j` (trace of a 4×4
///   Hermitian unitary is even).
pub fn necessary_conditions(a: &BistochasticMatrix) -> Vec<ConditionReport> {
    let n = a.n();
    let mut out = Vec::new();
    if n % 2 == 1 && n > 1 {
        let trace = a.trace();
        let slack = trace - 1.0 / n as f64;
        out.push(ConditionReport {
            name: "odd_trace_bound".into(),
            value: trace,
            slack,
            satisfied: slack >= -CONDITION_TOL,
        });
    }
    if n == 4 {
        let d = a.matrix().diagonal();
        let total: f64 = d.iter().sum();
        for (j, &djj) in d.iter().enumerate() {
            let value = 3.0 * (total - djj) - djj;
            out.push(ConditionReport {
                name: format!("diagonal_functional_{}", j + 1),
                value,
                slack: value,
                satisfied: value >= -CONDITION_TOL,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipStatus {
    Inside,
    Outside,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedOrigin {
    pub origin: Origin,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    /// Convex weights over generators (inside only).
    pub weights: Vec<WeightedOrigin>,
    /// Violated conditions (outside only).
    pub violated: Vec<ConditionReport>,
    /// Independent reconstruction error of an inside certificate.
    pub reconstruction_error: Option<f64>,
    pub phase1_objective: f64,
}

/// Membership in the convex hull of the generators' images by LP
/// (`w >= 0`, `Σ w = 1`, `Σ w_g (U_g ∘ Ū_g) = A`, `n² + 1` rows).
pub fn sampled_hull_membership(a: &BistochasticMatrix, generators: &[Generator], tol: f64) -> Result<MembershipVerdict> {
    if generators.is_empty() {
        return Err(Error::OutOfRange("generator set is empty".into()));
    }
    let n = a.n();
    if let Some(g) = generators.iter().find(|g| g.unitary.n() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: g.unitary.n() });
    }
    let violated: Vec<ConditionReport> = necessary_conditions(a).into_iter().filter(|c| !c.satisfied).collect();
    if !violated.is_empty() {
        return Ok(MembershipVerdict {
            status: MembershipStatus::Outside,
            weights: Vec::new(),
            violated,
            reconstruction_error: None,
            phase1_objective: 0.0,
        });
    }

    let images: Vec<RealMatrix> = generators.iter().map(|g| g.unitary.matrix().abs_squared()).collect();
    let rows = n * n + 1;
    let e = RealMatrix::from_fn(rows, images.len(), |r, c| if r == n * n { 1.0 } else { images[c].as_slice()[r] });
    let mut b: Vec<f64> = a.matrix().as_slice().to_vec();
    b.push(1.0);
    let problem = FeasibilityProblem::new(e, b)?;
    let result = solve_feasibility(&problem, tol)?;

    let unknown = |phase1_objective| MembershipVerdict {
        status: MembershipStatus::Unknown,
        weights: Vec::new(),
        violated: Vec::new(),
        reconstruction_error: None,
        phase1_objective,
    };
    let Some(x) = result.x.filter(|x| verify_solution(&problem, x, 10.0 * tol).unwrap_or(false)) else {
        return Ok(unknown(result.phase1_objective));
    };

    let recon = weighted_image_sum(n, x.iter().zip(generators).map(|(&w, g)| (w, &g.unitary)));
    let reconstruction_error = recon.max_abs_diff(a.matrix());
    let weight_sum: f64 = x.iter().sum();
    if reconstruction_error > RECONSTRUCTION_TOL || (weight_sum - 1.0).abs() > 1e-9 {
        return Ok(unknown(result.phase1_objective));
    }
    let weights = x
        .iter()
        .zip(generators)
        .filter(|(&w, _)| w > 0.0)
        .map(|(&weight, g)| WeightedOrigin { origin: g.origin.clone(), weight })
        .collect();
    Ok(MembershipVerdict {
        status: MembershipStatus::Inside,
        weights,
        violated: Vec::new(),
        reconstruction_error: Some(reconstruction_error),
        phase1_objective: result.phase1_objective,
    })
}

/// Certified bracket `lower <= λ(M) <= upper` for the segment from `W_n` to `M`.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaBracket {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: BistochasticMatrix,
    pub lower: f64,
    pub upper: f64,
    pub samples_used: usize,
    pub seed: u64,
    pub generator_count: usize,
    /// Condition that produced `upper`, if any.
    pub upper_reason: Option<String>,
    /// Inside certificate at `k = lower`.
    pub certificate: Option<MembershipVerdict>,
}

/// Smallest `k` at which some necessary condition turns negative along the
/// segment, computed exactly since every condition is affine in `k`.
pub fn condition_crossing(m: &BistochasticMatrix) -> Result<(f64, Option<String>)> {
    let at0 = necessary_conditions(&segment_point(m, 0.0)?);
    let at1 = necessary_conditions(&segment_point(m, 1.0)?);
    let mut best = (1.0, None);
    for (c0, c1) in at0.iter().zip(&at1) {
        if c1.slack < -CONDITION_TOL && c0.slack > 0.0 {
            let k = c0.slack / (c0.slack - c1.slack);
            if k < best.0 {
                best = (k, Some(c0.name.clone()));
            }
        }
    }
    Ok(best)
}

pub const DEFAULT_RESOLUTION: f64 = 1e-3;
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Default inner generator set: involutions, witness orbits and stratified samples.
pub fn default_generators(n: usize, sample_count: usize, seed: u64) -> Result<Vec<Generator>> {
    let mut gens = involution_generators(n)?;
    gens.extend(witness_generators(n));
    gens.extend(random_generators(n, sample_count, seed)?);
    Ok(gens)
}

pub fn estimate_lambda(
    n: usize,
    m: &BistochasticMatrix,
    sample_count: usize,
    seed: u64,
    resolution: f64,
) -> Result<LambdaBracket> {
    if m.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.n() });
    }
    if !(resolution >= 1e-6) {
        return Err(Error::OutOfRange(format!("resolution {resolution} below 1e-6")));
    }
    if !m.is_symmetric() {
        return Err(Error::NotBistochastic("segment endpoint must be symmetric".into()));
    }
    let generators = default_generators(n, sample_count, seed)?;
    let (upper, upper_reason) = condition_crossing(m)?;

    let probe = |k: f64| -> Result<MembershipVerdict> {
        sampled_hull_membership(&segment_point(m, k)?, &generators, MEMBERSHIP_TOL)
    };
    let inside = |v: &MembershipVerdict| v.status == MembershipStatus::Inside;

    let top = probe(upper)?;
    let (lower, certificate) = if inside(&top) {
        (upper, Some(top))
    } else {
        let base = probe(0.0)?;
        if !inside(&base) {
            (0.0, None)
        } else {
            let (mut lo, mut hi, mut cert) = (0.0, upper, base);
            while hi - lo > resolution {
                let mid = 0.5 * (lo + hi);
                let v = probe(mid)?;
                if inside(&v) {
                    lo = mid;
                    cert = v;
                } else {
                    hi = mid;
                }
            }
            (lo, Some(cert))
        }
    };
    Ok(LambdaBracket {
        n,
        m: m.clone(),
        lower,
        upper,
        samples_used: sample_count,
        seed,
        generator_count: generators.len(),
        upper_reason,
        certificate,
    })
}

/// Bracket for `λ_n` itself: the minimum over one representative of every
/// Katz type (permutation similarity preserves both hulls).
pub fn estimate_lambda_n(n: usize, sample_count: usize, seed: u64, resolution: f64) -> Result<(f64, f64)> {
    let mut lower = 1.0_f64;
    let mut upper = 1.0_f64;
    for p in crate::birkhoff::katz_partitions(n) {
        let m = crate::birkhoff::katz_extreme_point(&p, &Permutation::identity(n))?;
        let b = estimate_lambda(n, &m, sample_count, seed, resolution)?;
        lower = lower.min(b.lower);
        upper = upper.min(b.upper);
    }
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birkhoff::{flat_matrix, katz_extreme_point, KatzPartition};
    use crate::linalg::{classify, fourier_matrix};

    fn katz31() -> BistochasticMatrix {
        katz_extreme_point(&"3,1".parse::<KatzPartition>().unwrap(), &Permutation::identity(4)).unwrap()
    }

    #[test]
    fn uni_image_examples() {
        let img = uni_image(witness_unitary_3().matrix()).unwrap();
        let expect = segment_point(&katz_block(3).unwrap(), 2.0 / 3.0).unwrap();
        assert!(img.matrix().max_abs_diff(expect.matrix()) < 1e-15);
        assert_eq!(uni_image(&ComplexMatrix::identity(3)).unwrap().matrix(), &RealMatrix::identity(3));
        let f3 = uni_image(&fourier_matrix(3)).unwrap();
        assert!(f3.matrix().max_abs_diff(flat_matrix(3).unwrap().matrix()) < 1e-15);
        let bad = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert!(matches!(uni_image(&bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn random_hermitian_unitary_contract() {
        assert_eq!(random_hermitian_unitary(4, 0, 5).unwrap().matrix(), &ComplexMatrix::identity(4));
        for seed in 0..20 {
            for mc in 0..=5 {
                let h = random_hermitian_unitary(5, mc, seed).unwrap();
                assert!(classify(h.matrix(), 1e-10).hermitian_unitary);
                assert!((h.matrix().trace().re - (5.0 - 2.0 * mc as f64)).abs() < 1e-10);
                assert_eq!(HermitianUnitary::new(h.matrix().clone()).unwrap().signature(), mc);
            }
            let h3 = random_hermitian_unitary(3, 1, seed).unwrap();
            assert!((h3.matrix().trace().re - 1.0).abs() < 1e-10);
        }
        assert_eq!(random_hermitian_unitary(3, 1, 9).unwrap(), random_hermitian_unitary(3, 1, 9).unwrap());
        assert!(random_hermitian_unitary(3, 4, 0).is_err());
    }

    #[test]
    fn involution_counts() {
        // involutions of S_n: 1, 2, 4, 10, 26, 76, ...
        let counts: Vec<usize> = (1..=6).map(|n| involutions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 10, 26, 76]);
        let two = involution_generators(2).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].unitary.matrix(), &ComplexMatrix::identity(2));
        assert!(matches!(involution_generators(11), Err(Error::DimensionCap { .. })));
        let four = involution_generators(4).unwrap();
        for m in [vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]] {
            assert!(four.iter().any(|g| g.origin == Origin::Involution { mapping: m.clone() }));
        }
    }

    #[test]
    fn witnesses_reproduce_targets() {
        let w3 = paper_witnesses(3).unwrap();
        assert_eq!(w3.len(), 1);
        assert!(w3[0].reconstruct().max_abs_diff(w3[0].matrix.matrix()) < 1e-15);

        let w4 = paper_witnesses(4).unwrap();
        for w in &w4 {
            assert!(w.reconstruct().max_abs_diff(w.matrix.matrix()) < 1e-12, "{}", w.name);
            let total: f64 = w.terms.iter().map(|t| t.0).sum();
            assert!((total - 1.0).abs() < 1e-15);
        }
        // ¼X + ¾Y against the segment point, by direct arithmetic
        let (x, y) = (w4[0].matrix.matrix(), w4[1].matrix.matrix());
        let seg = segment_point(&katz31(), 2.0 / 3.0).unwrap();
        assert!(x.lin_comb(0.25, y, 0.75).max_abs_diff(seg.matrix()) < 1e-12);
        assert!(paper_witnesses(5).is_err());
    }

    #[test]
    fn necessary_condition_values() {
        let b3 = necessary_conditions(&katz_block(3).unwrap());
        assert_eq!(b3.len(), 1);
        assert!(!b3[0].satisfied && b3[0].value == 0.0);

        let m = katz31();
        let c = necessary_conditions(&m);
        assert_eq!(c.len(), 4);
        assert_eq!(c[3].value, -1.0);
        assert!(!c[3].satisfied);

        let seg = necessary_conditions(&segment_point(&m, 2.0 / 3.0).unwrap());
        assert!(seg[3].value.abs() < 1e-12 && seg[3].satisfied);
        let past = necessary_conditions(&segment_point(&m, 2.0 / 3.0 + 1e-6).unwrap());
        assert!(!past[3].satisfied);

        assert!(necessary_conditions(&flat_matrix(6).unwrap()).is_empty());
    }

    #[test]
    fn membership_of_generators_and_centroid() {
        let gens = involution_generators(4).unwrap();
        for g in &gens {
            let v = sampled_hull_membership(&g.unitary.image(), &gens, 1e-9).unwrap();
            assert_eq!(v.status, MembershipStatus::Inside);
        }
        // W_4 = (1/4)I + (1/4)Σ pairings (explicit weights first)
        let pairing_mean: Vec<&Generator> = gens
            .iter()
            .filter(|g| matches!(&g.origin, Origin::Involution { mapping } if mapping.iter().enumerate().all(|(i, &m)| m != i)))
            .collect();
        assert_eq!(pairing_mean.len(), 3);
        let mut explicit = RealMatrix::identity(4).scale(0.25);
        for g in &pairing_mean {
            explicit = explicit.lin_comb(1.0, g.unitary.image().matrix(), 0.25);
        }
        assert!(explicit.max_abs_diff(flat_matrix(4).unwrap().matrix()) < 1e-15);
        let v = sampled_hull_membership(&flat_matrix(4).unwrap(), &gens, 1e-9).unwrap();
        assert_eq!(v.status, MembershipStatus::Inside);
        assert!(v.reconstruction_error.unwrap() <= RECONSTRUCTION_TOL);

        // pairings alone miss the diagonal mass of W_4
        let v = sampled_hull_membership(
            &flat_matrix(4).unwrap(),
            &pairing_mean.into_iter().cloned().collect::<Vec<_>>(),
            1e-9,
        )
        .unwrap();
        assert_eq!(v.status, MembershipStatus::Unknown);
    }

    #[test]
    fn b3_is_never_inside() {
        let gens = default_generators(3, 60, 4).unwrap();
        let v = sampled_hull_membership(&katz_block(3).unwrap(), &gens, 1e-9).unwrap();
        assert_eq!(v.status, MembershipStatus::Outside);
        assert_eq!(v.violated[0].name, "odd_trace_bound");
    }

    #[test]
    fn brackets_for_small_n() {
        let b = estimate_lambda(3, &katz_block(3).unwrap(), 30, 1, 1e-6).unwrap();
        assert!(b.lower >= 0.66 && b.lower <= 2.0 / 3.0 + 1e-12);
        assert!((b.upper - 2.0 / 3.0).abs() < 1e-12);

        let b = estimate_lambda(4, &katz31(), 30, 1, 1e-6).unwrap();
        assert!(b.lower >= 2.0 / 3.0 - 1e-6 && b.lower <= b.upper);
        assert!((b.upper - 2.0 / 3.0).abs() < 1e-12);

        let b = estimate_lambda(2, &katz_block(2).unwrap(), 5, 1, 1e-3).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
    }

    #[test]
    fn permuted_katz_point_uses_witness_orbit() {
        let perm = Permutation::new(vec![3, 1, 0, 2]).unwrap();
        let m = katz31().permute(&perm);
        let b = estimate_lambda(4, &m, 0, 0, 1e-4).unwrap();
        assert!((b.upper - 2.0 / 3.0).abs() < 1e-12);
        assert!(b.lower >= 2.0 / 3.0 - 1e-4);
    }
}
