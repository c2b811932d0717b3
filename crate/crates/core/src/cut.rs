//! Real correlation matrices and the convex hull of the rank-one ones
//! (`s sᵀ` for sign vectors `s`), i.e. the cut polytope.
//!
//! Membership is decided by an LP over canonical sign vectors (`s_1 = +1`),
//! and every positive answer can be turned into a subset function `f` whose
//! Walsh transform is nonnegative. [`verify_bgp`] re-checks such an `f` with
//! no reference to the LP.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{derive_seed, hermitian_eig, seeded_rng, square_json, RealMatrix};
use crate::lp::{solve_feasibility, verify_solution, FeasibilityProblem};
use crate::{Error, Result};

/// Symmetry, unit-diagonal and PSD tolerance for [`RealCorrelationMatrix`].
pub const CORRELATION_TOL: f64 = 1e-9;
/// Largest `n` accepted by the membership LP (`2^(n-1)` columns).
pub const MAX_CUT_N: usize = 12;
/// Largest `n` for subset functions (`2^n` values).
pub const MAX_BGP_N: usize = 20;
pub const CUT_TOL: f64 = 1e-9;
pub const DEFAULT_RHO_RESOLUTION: f64 = 1e-6;

/// Symmetric positive semidefinite matrix with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct RealCorrelationMatrix {
    matrix: RealMatrix,
}

impl Serialize for RealCorrelationMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        square_json::serialize(&self.matrix, serializer)
    }
}

impl<'de> Deserialize<'de> for RealCorrelationMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = square_json::deserialize(deserializer)?;
        RealCorrelationMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

impl RealCorrelationMatrix {
    pub fn new(matrix: RealMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotCorrelation(format!("{}x{} is not square", matrix.rows(), matrix.cols())));
        }
        if matrix.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sym = matrix.symmetry_deviation();
        if sym > CORRELATION_TOL {
            return Err(Error::NotCorrelation(format!("not symmetric (deviation {sym:e})")));
        }
        let diag = matrix.diagonal().iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
        if diag > CORRELATION_TOL {
            return Err(Error::NotCorrelation(format!("diagonal differs from 1 by {diag:e}")));
        }
        let min = min_eigenvalue(&matrix)?;
        if min < -CORRELATION_TOL {
            return Err(Error::NotCorrelation(format!("not positive semidefinite (min eigenvalue {min:e})")));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: RealMatrix::identity(n) }
    }

    /// `s sᵀ`.
    pub fn rank_one(s: &SignVector) -> Self {
        let v = s.values();
        Self { matrix: RealMatrix::from_fn(s.n, s.n, |i, j| v[i] * v[j]) }
    }

    /// Gram matrix `AᵀA` of a factor with unit columns.
    pub fn from_factor(a: &RealMatrix) -> Result<Self> {
        check_unit_columns(a)?;
        Self::new(a.transpose().matmul(a))
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    /// `t·C + (1 - t)·I`, again a correlation matrix for `t` in `[0, 1]`.
    pub fn shrink(&self, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfRange(format!("shrink factor {t} outside [0, 1]")));
        }
        let n = self.n();
        Ok(Self { matrix: self.matrix.lin_comb(t, &RealMatrix::identity(n), 1.0 - t) })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix).unwrap_or(f64::NAN)
    }
}

fn min_eigenvalue(m: &RealMatrix) -> Result<f64> {
    if m.rows() == 0 {
        return Ok(0.0);
    }
    Ok(hermitian_eig(&m.to_complex())?.min_eigenvalue())
}

fn check_unit_columns(a: &RealMatrix) -> Result<()> {
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    for j in 0..a.cols() {
        let norm = (0..a.rows()).map(|i| a.get(i, j).powi(2)).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > CORRELATION_TOL {
            return Err(Error::NotCorrelation(format!("column {j} has norm {norm}, expected 1")));
        }
    }
    Ok(())
}

/// Sign vector of length `n`; bit `j` of `mask` set means `s_{j+1} = -1`,
/// so `mask` is also the subset `A = {j : s_j = -1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    n: usize,
    mask: u32,
}

impl SignVector {
    pub fn new(n: usize, mask: u32) -> Result<Self> {
        if n > 31 || (n < 32 && mask >> n != 0) {
            return Err(Error::OutOfRange(format!("mask {mask:#b} does not fit {n} signs")));
        }
        Ok(Self { n, mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn sign(&self, i: usize) -> f64 {
        if self.mask >> i & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.sign(i)).collect()
    }

    /// Representative with `s_1 = +1` (`s` and `-s` give the same `s sᵀ`).
    pub fn canonical(&self) -> Self {
        if self.mask & 1 == 1 {
            Self { n: self.n, mask: !self.mask & ((1u32 << self.n) - 1) }
        } else {
            *self
        }
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.mask >> i & 1 == 1 { "-" } else { "+" })?;
        }
        Ok(())
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut mask = 0u32;
        let mut n = 0;
        for (i, c) in s.chars().enumerate() {
            match c {
                '+' => {}
                '-' => mask |= 1 << i.min(31),
                _ => return Err(Error::Input(format!("sign string {s:?} may contain only '+' and '-'"))),
            }
            n += 1;
        }
        SignVector::new(n, mask)
    }
}

/// Probability distribution over sign vectors (the LP emits canonical ones).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct CutDistribution {
    n: usize,
    weights: Vec<(SignVector, f64)>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    n: usize,
    weights: Vec<WeightRepr>,
}

#[derive(Serialize, Deserialize)]
struct WeightRepr {
    signs: String,
    w: f64,
}

impl TryFrom<DistributionRepr> for CutDistribution {
    type Error = Error;

    fn try_from(r: DistributionRepr) -> Result<Self> {
        let weights = r
            .weights
            .into_iter()
            .map(|w| Ok((w.signs.parse::<SignVector>()?, w.w)))
            .collect::<Result<Vec<_>>>()?;
        CutDistribution::new(r.n, weights)
    }
}

impl From<CutDistribution> for DistributionRepr {
    fn from(d: CutDistribution) -> Self {
        DistributionRepr {
            n: d.n,
            weights: d.weights.into_iter().map(|(s, w)| WeightRepr { signs: s.to_string(), w }).collect(),
        }
    }
}

impl CutDistribution {
    /// Merges repeated sign vectors; weights must be nonnegative and sum to
    /// one within `1e-9`. The membership LP only emits canonical vectors, but
    /// `s` and `-s` are kept apart here since they give different subset
    /// functions.
    pub fn new(n: usize, weights: Vec<(SignVector, f64)>) -> Result<Self> {
        let mut merged: Vec<(SignVector, f64)> = Vec::new();
        for (s, w) in weights {
            if s.n != n {
                return Err(Error::DimensionMismatch { expected: n, found: s.n });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeights(format!("weight {w} on {s} is negative or non-finite")));
            }
            match merged.iter_mut().find(|(t, _)| *t == s) {
                Some((_, acc)) => *acc += w,
                None => merged.push((s, w)),
            }
        }
        let total: f64 = merged.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > CORRELATION_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        merged.sort_by_key(|(s, _)| s.mask);
        Ok(Self { n, weights: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[(SignVector, f64)] {
        &self.weights
    }

    /// Second moments `Σ w_s s_i s_j`.
    pub fn correlation(&self) -> RealMatrix {
        let mut acc = RealMatrix::zeros(self.n, self.n);
        for (s, w) in &self.weights {
            acc = acc.lin_comb(1.0, RealCorrelationMatrix::rank_one(s).matrix(), *w);
        }
        acc
    }

    /// Probability of every subset `A = {j : s_j = -1}`, indexed by bitmask.
    pub fn subset_weights(&self) -> Vec<f64> {
        let mut p = vec![0.0; 1usize << self.n];
        for (s, w) in &self.weights {
            p[s.mask as usize] += w;
        }
        p
    }
}

/// Outcome of [`cut_membership`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CutMembership {
    Feasible { distribution: CutDistribution, residual: f64 },
    Infeasible { phase1_objective: f64 },
}

impl CutMembership {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CutMembership::Feasible { .. })
    }

    pub fn distribution(&self) -> Option<&CutDistribution> {
        match self {
            CutMembership::Feasible { distribution, .. } => Some(distribution),
            CutMembership::Infeasible { .. } => None,
        }
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Decide whether `C` is a convex combination of rank-one correlation matrices.
pub fn cut_membership(c: &RealCorrelationMatrix, tol: f64) -> Result<CutMembership> {
    let n = c.n();
    if n > MAX_CUT_N {
        return Err(Error::DimensionCap { n, cap: MAX_CUT_N });
    }
    if n == 0 {
        return Err(Error::OutOfRange("empty correlation matrix".into()));
    }
    let columns: Vec<SignVector> = (0..1u32 << (n - 1)).map(|k| SignVector { n, mask: k << 1 }).collect();
    let pair_list: Vec<(usize, usize)> = pairs(n).collect();
    let e = RealMatrix::from_fn(1 + pair_list.len(), columns.len(), |r, col| {
        if r == 0 {
            1.0
        } else {
            let (i, j) = pair_list[r - 1];
            columns[col].sign(i) * columns[col].sign(j)
        }
    });
    let mut b = vec![1.0];
    b.extend(pair_list.iter().map(|&(i, j)| c.get(i, j)));
    let problem = FeasibilityProblem::new(e, b)?;
    let result = solve_feasibility(&problem, tol)?;
    let Some(x) = result.x.filter(|x| verify_solution(&problem, x, 10.0 * tol).unwrap_or(false)) else {
        return Ok(CutMembership::Infeasible { phase1_objective: result.phase1_objective });
    };
    let total: f64 = x.iter().sum();
    let weights = columns.into_iter().zip(x).filter(|(_, w)| *w > 0.0).map(|(s, w)| (s, w / total)).collect();
    let distribution = CutDistribution::new(n, weights)?;
    let residual = distribution.correlation().max_abs_diff(c.matrix());
    Ok(CutMembership::Feasible { distribution, residual })
}

/// In-place unnormalised Walsh–Hadamard transform:
/// `out[S] = Σ_T (-1)^{|S ∩ T|} in[T]`. Length must be a power of two.
pub fn fwht(values: &mut [f64]) {
    let len = values.len();
    assert!(len.is_power_of_two(), "fwht length {len} is not a power of two");
    let mut h = 1;
    while h < len {
        for start in (0..len).step_by(2 * h) {
            for k in start..start + h {
                let (a, b) = (values[k], values[k + h]);
                values[k] = a + b;
                values[k + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Subset function `f` on `{1..n}`, indexed by bitmask (binary-counter order).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BgpRepr")]
pub struct BgpCertificate {
    n: usize,
    f: Vec<f64>,
}

#[derive(Deserialize)]
struct BgpRepr {
    n: usize,
    f: Vec<f64>,
}

impl TryFrom<BgpRepr> for BgpCertificate {
    type Error = Error;

    fn try_from(r: BgpRepr) -> Result<Self> {
        BgpCertificate::new(r.n, r.f)
    }
}

impl BgpCertificate {
    pub fn new(n: usize, f: Vec<f64>) -> Result<Self> {
        if n > MAX_BGP_N {
            return Err(Error::DimensionCap { n, cap: MAX_BGP_N });
        }
        if f.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: f.len() });
        }
        Ok(Self { n, f })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn value(&self, subset: usize) -> f64 {
        self.f[subset]
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.f
    }

    pub fn walsh(&self) -> Vec<f64> {
        let mut w = self.f.clone();
        fwht(&mut w);
        w
    }

    /// Inverse transform: the signed measure `p(A) = 2^-n Σ_T (-1)^{|A∩T|} f(T)`.
    pub fn subset_weights(&self) -> Vec<f64> {
        let scale = 1.0 / self.f.len() as f64;
        self.walsh().into_iter().map(|x| x * scale).collect()
    }
}

/// `f(T) = Σ_A p(A) (-1)^{|A ∩ T|}`.
pub fn bgp_from_distribution(p: &CutDistribution) -> BgpCertificate {
    let mut f = p.subset_weights();
    fwht(&mut f);
    BgpCertificate { n: p.n, f }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BgpCheck {
    /// `|f(∅) - 1|`.
    pub empty_set_error: f64,
    /// `max_{i<j} |f({i,j}) - c_ij|`.
    pub pair_residual: f64,
    pub walsh_min: f64,
    pub passed: bool,
}

/// Evaluate the three certificate conditions against `C`.
pub fn check_bgp(f: &BgpCertificate, c: &RealCorrelationMatrix, tol: f64) -> Result<BgpCheck> {
    if f.n != c.n() {
        return Err(Error::DimensionMismatch { expected: c.n(), found: f.n });
    }
    let empty_set_error = (f.f[0] - 1.0).abs();
    let pair_residual = pairs(f.n).map(|(i, j)| (f.f[(1 << i) | (1 << j)] - c.get(i, j)).abs()).fold(0.0, f64::max);
    let walsh_min = f.walsh().into_iter().fold(f64::INFINITY, f64::min);
    let passed = empty_set_error <= tol && pair_residual <= tol && walsh_min >= -tol;
    Ok(BgpCheck { empty_set_error, pair_residual, walsh_min, passed })
}

/// True when `f` certifies `C` (false also on dimension mismatch).
pub fn verify_bgp(f: &BgpCertificate, c: &RealCorrelationMatrix, tol: f64) -> bool {
    check_bgp(f, c, tol).map(|r| r.passed).unwrap_or(false)
}

/// `f(T) = (1/r) Σ_i Π_{j∈T} a_ij` for an `r × n` factor with unit columns;
/// it certifies `(1/r) AᵀA + ((r-1)/r) I`.
pub fn corollary_certificate(a: &RealMatrix) -> Result<BgpCertificate> {
    check_unit_columns(a)?;
    let (r, n) = (a.rows(), a.cols());
    if r == 0 {
        return Err(Error::OutOfRange("factor has no rows".into()));
    }
    if n > MAX_BGP_N {
        return Err(Error::DimensionCap { n, cap: MAX_BGP_N });
    }
    let size = 1usize << n;
    let mut f = vec![0.0; size];
    let mut prod = vec![0.0; size];
    for i in 0..r {
        prod[0] = 1.0;
        for t in 1..size {
            let low = t.trailing_zeros() as usize;
            prod[t] = prod[t & (t - 1)] * a.get(i, low);
        }
        for (acc, p) in f.iter_mut().zip(&prod) {
            *acc += p;
        }
    }
    let inv_r = 1.0 / r as f64;
    f.iter_mut().for_each(|x| *x *= inv_r);
    Ok(BgpCertificate { n, f })
}

/// The matrix certified by [`corollary_certificate`].
pub fn corollary_target(a: &RealMatrix) -> Result<RealCorrelationMatrix> {
    let c = RealCorrelationMatrix::from_factor(a)?;
    let r = a.rows() as f64;
    c.shrink(1.0 / r)
}

/// `cos(2π d / m)` with exact values at multiples of `π/6`'s quadrant points.
fn cos_turn(d: usize, m: usize) -> f64 {
    let d = d % m;
    if (12 * d) % m == 0 {
        match 12 * d / m {
            0 => return 1.0,
            2 | 10 => return 0.5,
            3 | 9 => return 0.0,
            4 | 8 => return -0.5,
            6 => return -1.0,
            _ => {}
        }
    }
    (2.0 * std::f64::consts::PI * d as f64 / m as f64).cos()
}

/// `C_m` with entries `cos(2π(j - k)/m)`: Gram matrix of `m` equally spaced
/// unit vectors in the plane.
pub fn cosine_correlation(m: usize) -> Result<RealCorrelationMatrix> {
    if m == 0 {
        return Err(Error::OutOfRange("m must be at least 1".into()));
    }
    let matrix = RealMatrix::from_fn(m, m, |j, k| cos_turn((j + m - k) % m, m));
    Ok(RealCorrelationMatrix { matrix })
}

/// The `2 × m` factor of [`cosine_correlation`]: columns `(cos θ_j, sin θ_j)`.
pub fn cosine_factor(m: usize) -> RealMatrix {
    RealMatrix::from_fn(2, m, |r, j| {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        if r == 0 {
            theta.cos()
        } else {
            theta.sin()
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoBisection {
    /// Largest grid `t` found feasible.
    pub t_max: f64,
    /// Smallest `t` found infeasible (1 when `C` itself is inside).
    pub t_infeasible: Option<f64>,
    pub distribution: CutDistribution,
    pub certificate: BgpCertificate,
}

/// Largest `t` with `t·C + (1 - t)·I` in the cut polytope, to `resolution`.
/// Membership is monotone in `t` because `I` is inside.
pub fn rho_bisection(c: &RealCorrelationMatrix, resolution: f64) -> Result<RhoBisection> {
    if !(resolution > 0.0) {
        return Err(Error::OutOfRange(format!("resolution must be positive, got {resolution}")));
    }
    let probe = |t: f64| -> Result<Option<CutDistribution>> {
        Ok(cut_membership(&c.shrink(t)?, CUT_TOL)?.distribution().cloned())
    };
    let finish = |t_max: f64, t_infeasible, distribution: CutDistribution| {
        let certificate = bgp_from_distribution(&distribution);
        Ok(RhoBisection { t_max, t_infeasible, distribution, certificate })
    };
    if let Some(d) = probe(1.0)? {
        return finish(1.0, None, d);
    }
    let mut best = probe(0.0)?.expect("the identity is the uniform mixture of all s sᵀ");
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        match probe(mid)? {
            Some(d) => {
                lo = mid;
                best = d;
            }
            None => hi = mid,
        }
    }
    finish(lo, Some(hi), best)
}

/// `(w_s, s sᵀ)` for every sign vector in the distribution.
pub fn rank_one_terms(p: &CutDistribution) -> Vec<(f64, RealCorrelationMatrix)> {
    p.weights.iter().map(|(s, w)| (*w, RealCorrelationMatrix::rank_one(s))).collect()
}

/// Smallest `t` at which a triangle inequality
/// `Σ_{a<b} β_a β_b c_ab >= -1` (`β ∈ {±1}³`) fails for `t·C + (1 - t)·I`;
/// 1 if none does. Every cut-polytope point satisfies these.
pub fn triangle_crossing(c: &RealCorrelationMatrix) -> f64 {
    let n = c.n();
    let mut best = 1.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for signs in 0..4u32 {
                    let bj = if signs & 1 == 1 { -1.0 } else { 1.0 };
                    let bk = if signs & 2 == 2 { -1.0 } else { 1.0 };
                    let s = bj * c.get(i, j) + bk * c.get(i, k) + bj * bk * c.get(j, k);
                    if s < -1.0 {
                        best = best.min(-1.0 / s);
                    }
                }
            }
        }
    }
    best
}

/// Random `r × n` factor with unit columns (Gaussian columns, normalised).
pub fn random_unit_factor(r: usize, n: usize, seed: u64) -> RealMatrix {
    let mut rng = seeded_rng(seed);
    let mut a = RealMatrix::from_fn(r, n, |_, _| StandardNormal.sample(&mut rng));
    for j in 0..n {
        let norm = (0..r).map(|i| a.get(i, j).powi(2)).sum::<f64>().sqrt();
        for i in 0..r {
            a.set(i, j, a.get(i, j) / norm);
        }
    }
    a
}

/// Bracket on `ρ_{n,r}`, the largest `t` with `t·C + (1 - t)·I` in the cut
/// polytope for every correlation `C` of rank at most `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoEstimate {
    pub n: usize,
    pub rank_cap: usize,
    /// `1/r`, certified for every `C` by [`corollary_certificate`].
    pub lower: f64,
    /// Minimum over the probed matrices of their certified infeasible `t`.
    pub upper: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `n × n` rank-two matrix containing `C_3` as its leading block (remaining
/// vectors repeat the first one).
pub fn embedded_c3(n: usize) -> Result<RealCorrelationMatrix> {
    if n < 3 {
        return Err(Error::OutOfRange(format!("need n >= 3, got {n}")));
    }
    let matrix = RealMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (i.min(3) % 3, j.min(3) % 3);
        cos_turn((a + 3 - b) % 3, 3)
    });
    RealCorrelationMatrix::new(matrix)
}

pub fn estimate_rho(n: usize, r: usize, samples: usize, seed: u64, resolution: f64) -> Result<RhoEstimate> {
    if r == 0 || n == 0 {
        return Err(Error::OutOfRange("n and r must be positive".into()));
    }
    let mut candidates = Vec::new();
    if n >= 3 && r >= 2 {
        candidates.push(embedded_c3(n)?);
    }
    for k in 0..samples {
        let a = random_unit_factor(r, n, derive_seed(seed, k as u64));
        candidates.push(RealCorrelationMatrix::from_factor(&a)?);
    }
    let mut upper = 1.0_f64;
    for c in &candidates {
        let bis = rho_bisection(c, resolution)?;
        upper = upper.min(triangle_crossing(c)).min(bis.t_infeasible.unwrap_or(1.0));
    }
    Ok(RhoEstimate { n, rank_cap: r, lower: (1.0 / r as f64).min(upper), upper, samples, seed })
}
