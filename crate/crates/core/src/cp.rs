//! Completely positive maps in weighted Kraus form `A ↦ Σ w_i V_i A V_i*`.
//!
//! Two Kraus families describe the same map iff their Choi matrices agree,
//! so every equality test in this module compares Choi matrices.

use serde::{Deserialize, Serialize};

use crate::birkhoff::katz_block;
use crate::cut::{
    bgp_from_distribution, check_bgp, cosine_correlation, cut_membership, BgpCheck, CutDistribution,
    RealCorrelationMatrix, CUT_TOL,
};
use crate::hull::{necessary_conditions, HermitianUnitary};
use crate::linalg::{fourier_matrix, hermitian_eig, kron, random_unitary, derive_seed, ComplexMatrix, RealMatrix, C64};
use crate::{Error, Result};

pub const MAP_TOL: f64 = 1e-9;
/// Kraus operators with max-entry below this are dropped.
pub const ZERO_OPERATOR_TOL: f64 = 1e-12;
pub const MAX_PIPELINE_N: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrausTerm {
    #[serde(rename = "w")]
    pub weight: f64,
    pub op: ComplexMatrix,
}

/// Weighted Kraus family on `n × n` matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KrausRepr")]
pub struct KrausMap {
    n: usize,
    terms: Vec<KrausTerm>,
}

#[derive(Deserialize)]
struct KrausRepr {
    n: usize,
    terms: Vec<KrausTerm>,
}

impl TryFrom<KrausRepr> for KrausMap {
    type Error = Error;

    fn try_from(r: KrausRepr) -> Result<Self> {
        KrausMap::new(r.n, r.terms)
    }
}

impl KrausMap {
    pub fn new(n: usize, terms: Vec<KrausTerm>) -> Result<Self> {
        for t in &terms {
            if t.op.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.op.n() });
            }
            if !(t.weight.is_finite() && t.weight > 0.0) {
                return Err(Error::InvalidWeights(format!("Kraus weight {} must be positive", t.weight)));
            }
            if t.op.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { n, terms })
    }

    /// Unit weights.
    pub fn from_operators(n: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(n, ops.into_iter().map(|op| KrausTerm { weight: 1.0, op }).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self { n, terms: vec![KrausTerm { weight: 1.0, op: ComplexMatrix::identity(n) }] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[KrausTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

pub fn apply_map(phi: &KrausMap, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.n() != phi.n {
        return Err(Error::DimensionMismatch { expected: phi.n, found: a.n() });
    }
    let mut acc = ComplexMatrix::zeros(phi.n);
    for t in &phi.terms {
        let term = &(&t.op * a) * &t.op.adjoint();
        acc = &acc + &term.scale_real(t.weight);
    }
    Ok(acc)
}

/// `Φ*(A) = Σ w_i V_i* A V_i`.
pub fn dual_map(phi: &KrausMap) -> KrausMap {
    KrausMap {
        n: phi.n,
        terms: phi.terms.iter().map(|t| KrausTerm { weight: t.weight, op: t.op.adjoint() }).collect(),
    }
}

/// `n² × n²` matrix whose `(i, j)` block is `Φ(E_ij)`; entry
/// `(i·n + a, j·n + b)` is `Φ(E_ij)_{ab}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn max_abs_diff(&self, other: &ChoiMatrix) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eig(&self.matrix).map(|s| s.min_eigenvalue()).unwrap_or(f64::NEG_INFINITY)
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

pub fn choi_matrix(phi: &KrausMap) -> ChoiMatrix {
    let n = phi.n;
    let mut m = ComplexMatrix::zeros(n * n);
    // Φ(E_ij) = Σ w V e_i e_jᵀ V*, so the Choi matrix is Σ w vec(V) vec(V)*
    // with vec(V)[i·n + a] = V_ai
    for t in &phi.terms {
        let v: Vec<C64> = (0..n * n).map(|r| t.op.get(r % n, r / n)).collect();
        for r in 0..n * n {
            for c in 0..n * n {
                let z = m.get(r, c) + v[r] * v[c].conj() * t.weight;
                m.set(r, c, z);
            }
        }
    }
    ChoiMatrix { matrix: m }
}

/// `max |Choi(Φ) - Choi(Ψ)|`, infinite for different sizes.
pub fn choi_distance(phi: &KrausMap, psi: &KrausMap) -> f64 {
    choi_matrix(phi).max_abs_diff(&choi_matrix(psi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapProperties {
    pub cp: bool,
    pub trace_preserving: bool,
    pub unital: bool,
    pub doubly_stochastic: bool,
    pub self_dual: bool,
    pub choi_min_eigenvalue: f64,
    pub trace_deviation: f64,
    pub unital_deviation: f64,
    pub self_dual_deviation: f64,
}

pub fn map_properties(phi: &KrausMap, tol: f64) -> Result<MapProperties> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance must be positive, got {tol}")));
    }
    let n = phi.n;
    let id = ComplexMatrix::identity(n);
    let mut vv = ComplexMatrix::zeros(n);
    let mut v_v = ComplexMatrix::zeros(n);
    for t in &phi.terms {
        let adj = t.op.adjoint();
        vv = &vv + &(&adj * &t.op).scale_real(t.weight);
        v_v = &v_v + &(&t.op * &adj).scale_real(t.weight);
    }
    let choi = choi_matrix(phi);
    let choi_min_eigenvalue = choi.min_eigenvalue();
    let trace_deviation = vv.max_abs_diff(&id);
    let unital_deviation = v_v.max_abs_diff(&id);
    let self_dual_deviation = choi.max_abs_diff(&choi_matrix(&dual_map(phi)));
    let cp = choi_min_eigenvalue >= -tol;
    let trace_preserving = trace_deviation <= tol;
    let unital = unital_deviation <= tol;
    Ok(MapProperties {
        cp,
        trace_preserving,
        unital,
        doubly_stochastic: cp && trace_preserving && unital,
        self_dual: self_dual_deviation <= tol,
        choi_min_eigenvalue,
        trace_deviation,
        unital_deviation,
        self_dual_deviation,
    })
}

/// Cartesian split `V = K + iL` of every Kraus operator of a self-dual map.
///
/// `Σ w (K A K + L A L) = ½(Φ + Φ*)(A) = Φ(A)`; the output may be
/// non-minimal.
pub fn hermitian_kraus(phi: &KrausMap, tol: f64) -> Result<KrausMap> {
    let deviation = choi_matrix(phi).max_abs_diff(&choi_matrix(&dual_map(phi)));
    if deviation > tol {
        return Err(Error::NotSelfDual { deviation });
    }
    let half = C64::new(0.5, 0.0);
    let minus_half_i = C64::new(0.0, -0.5);
    let mut terms = Vec::new();
    for t in &phi.terms {
        let adj = t.op.adjoint();
        let k = (&t.op + &adj).scale(half);
        let l = (&t.op - &adj).scale(minus_half_i);
        for op in [k, l] {
            if op.max_abs() > ZERO_OPERATOR_TOL {
                // remove rounding asymmetry so each operator is exactly Hermitian
                let h = ComplexMatrix::from_fn(op.n(), |i, j| (op.get(i, j) + op.get(j, i).conj()) * 0.5);
                terms.push(KrausTerm { weight: t.weight, op: h });
            }
        }
    }
    KrausMap::new(phi.n, terms)
}

/// `(Δ_Φ)_ij = Φ(E_jj)_ii = Σ w |V_ij|²`.
pub fn delta_matrix(phi: &KrausMap) -> RealMatrix {
    let n = phi.n;
    let mut d = RealMatrix::zeros(n, n);
    for t in &phi.terms {
        d = d.lin_comb(1.0, &t.op.abs_squared(), t.weight);
    }
    d
}

fn check_complex_correlation(c: &ComplexMatrix, tol: f64) -> Result<()> {
    let h = c.hermitian_deviation();
    if h > tol {
        return Err(Error::NotCorrelation(format!("not Hermitian (deviation {h:e})")));
    }
    let diag = c.diagonal().iter().map(|d| (d - C64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
    if diag > tol {
        return Err(Error::NotCorrelation(format!("diagonal differs from 1 by {diag:e}")));
    }
    Ok(())
}

/// Diagonal Kraus family realising `A ↦ C ∘ A` from `C = Σ λ_k v_k v_k*`:
/// operators `diag(√λ_k v_k)`.
pub fn schur_map(c: &ComplexMatrix) -> Result<KrausMap> {
    check_complex_correlation(c, MAP_TOL)?;
    let spec = hermitian_eig(c)?;
    let min = spec.min_eigenvalue();
    if min < -MAP_TOL {
        return Err(Error::NotCorrelation(format!("not positive semidefinite (min eigenvalue {min:e})")));
    }
    let n = c.n();
    let mut ops = Vec::new();
    for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        if s <= ZERO_OPERATOR_TOL {
            continue;
        }
        let col: Vec<C64> = spec.eigenvectors.column(k).into_iter().map(|z| z * s).collect();
        ops.push(ComplexMatrix::diag(&col));
    }
    KrausMap::from_operators(n, ops)
}

/// Recover `C` from a map fixing all diagonal matrices (`C = Φ(J)`),
/// checking `Φ(E_ij) = c_ij E_ij` on every matrix unit.
pub fn extract_schur(phi: &KrausMap, tol: f64) -> Result<ComplexMatrix> {
    let n = phi.n;
    let ones = ComplexMatrix::from_fn(n, |_, _| C64::new(1.0, 0.0));
    let c = apply_map(phi, &ones)?;
    let mut deviation = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let image = apply_map(phi, &ComplexMatrix::unit(n, i, j))?;
            let expect = ComplexMatrix::unit(n, i, j).scale(c.get(i, j));
            deviation = deviation.max(image.max_abs_diff(&expect));
        }
    }
    if deviation > tol {
        return Err(Error::NotDiagonalFixing { deviation });
    }
    Ok(c)
}

/// Kraus terms `(p_k, diag(v_k))` for `Σ p_k v_k v_k*` with unimodular `v_k`.
pub fn mixed_from_rank1(n: usize, decomposition: &[(f64, Vec<C64>)]) -> Result<KrausMap> {
    let total: f64 = decomposition.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > MAP_TOL || decomposition.iter().any(|(p, _)| !(*p >= 0.0)) {
        return Err(Error::InvalidWeights(format!("weights must be nonnegative and sum to 1 (sum {total})")));
    }
    let mut terms = Vec::new();
    for (p, v) in decomposition {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if let Some(z) = v.iter().find(|z| (z.norm() - 1.0).abs() > MAP_TOL) {
            return Err(Error::Input(format!("entry {z} is not unimodular")));
        }
        if *p > 0.0 {
            terms.push(KrausTerm { weight: *p, op: ComplexMatrix::diag(v) });
        }
    }
    KrausMap::new(n, terms)
}

/// Convex combination of conjugations by Hermitian unitaries.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedHermitianUnitary {
    n: usize,
    terms: Vec<(f64, HermitianUnitary)>,
}

#[derive(Serialize, Deserialize)]
struct MixedRepr {
    n: usize,
    terms: Vec<MixedTermRepr>,
}

#[derive(Serialize, Deserialize)]
struct MixedTermRepr {
    w: f64,
    op: ComplexMatrix,
    #[serde(default)]
    signature: usize,
}

impl Serialize for MixedHermitianUnitary {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MixedRepr {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(w, u)| MixedTermRepr { w: *w, op: u.matrix().clone(), signature: u.signature() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MixedHermitianUnitary {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = MixedRepr::deserialize(deserializer)?;
        let terms = r
            .terms
            .into_iter()
            .map(|t| Ok((t.w, HermitianUnitary::new(t.op)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        MixedHermitianUnitary::new(r.n, terms).map_err(serde::de::Error::custom)
    }
}

impl MixedHermitianUnitary {
    pub fn new(n: usize, terms: Vec<(f64, HermitianUnitary)>) -> Result<Self> {
        if let Some((_, u)) = terms.iter().find(|(_, u)| u.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: u.n() });
        }
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if terms.iter().any(|(w, _)| !(*w > 0.0)) || (total - 1.0).abs() > MAP_TOL {
            return Err(Error::InvalidWeights(format!("weights must be positive and sum to 1 (sum {total})")));
        }
        Ok(Self { n, terms })
    }

    /// `Σ p_s Γ_{diag(s)}` from a sign-vector distribution.
    pub fn from_cut_distribution(d: &CutDistribution) -> Result<Self> {
        let terms = d
            .weights()
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(s, w)| {
                let diag: Vec<C64> = s.values().into_iter().map(|x| C64::new(x, 0.0)).collect();
                Ok((*w, HermitianUnitary::new(ComplexMatrix::diag(&diag))?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d.n(), terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, HermitianUnitary)] {
        &self.terms
    }

    pub fn to_kraus(&self) -> KrausMap {
        KrausMap {
            n: self.n,
            terms: self.terms.iter().map(|(w, u)| KrausTerm { weight: *w, op: u.matrix().clone() }).collect(),
        }
    }

    /// `Σ p_k (U_k ∘ Ū_k)`, equal to `Δ` of the map.
    pub fn image_mixture(&self) -> RealMatrix {
        let mut acc = RealMatrix::zeros(self.n, self.n);
        for (w, u) in &self.terms {
            acc = acc.lin_comb(1.0, &u.matrix().abs_squared(), *w);
        }
        acc
    }
}

/// `Γ_U: A ↦ U A U*`.
pub fn conjugation_map(u: &ComplexMatrix) -> Result<KrausMap> {
    let deviation = u.unitary_deviation();
    if deviation > MAP_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(KrausMap { n: u.n(), terms: vec![KrausTerm { weight: 1.0, op: u.clone() }] })
}

/// `Φ ∘ Ψ`.
pub fn compose(phi: &KrausMap, psi: &KrausMap) -> Result<KrausMap> {
    if phi.n != psi.n {
        return Err(Error::DimensionMismatch { expected: phi.n, found: psi.n });
    }
    let mut terms = Vec::with_capacity(phi.len() * psi.len());
    for a in &phi.terms {
        for b in &psi.terms {
            terms.push(KrausTerm { weight: a.weight * b.weight, op: &a.op * &b.op });
        }
    }
    Ok(KrausMap { n: phi.n, terms })
}

/// `Φ ⊗ id_q`.
pub fn tensor_with_identity(phi: &KrausMap, q: usize) -> Result<KrausMap> {
    if q == 0 {
        return Err(Error::OutOfRange("q must be at least 1".into()));
    }
    let iq = ComplexMatrix::identity(q);
    Ok(KrausMap {
        n: phi.n * q,
        terms: phi.terms.iter().map(|t| KrausTerm { weight: t.weight, op: kron(&t.op, &iq) }).collect(),
    })
}

/// `Σ p_k Φ_k` with positive weights summing to one.
pub fn mix_maps(parts: &[(f64, KrausMap)]) -> Result<KrausMap> {
    let Some((_, first)) = parts.first() else {
        return Err(Error::InvalidWeights("empty mixture".into()));
    };
    let n = first.n;
    let total: f64 = parts.iter().map(|(p, _)| p).sum();
    if parts.iter().any(|(p, _)| !(*p > 0.0)) || (total - 1.0).abs() > MAP_TOL {
        return Err(Error::InvalidWeights(format!("mixture weights must be positive and sum to 1 (sum {total})")));
    }
    let mut terms = Vec::new();
    for (p, m) in parts {
        if m.n != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.n });
        }
        terms.extend(m.terms.iter().map(|t| KrausTerm { weight: p * t.weight, op: t.op.clone() }));
    }
    Ok(KrausMap { n, terms })
}

/// `½(Φ + Φ*)`, the self-dual part.
pub fn self_dual_part(phi: &KrausMap) -> KrausMap {
    mix_maps(&[(0.5, phi.clone()), (0.5, dual_map(phi))]).expect("weights are valid")
}

/// `Ξ = Γ_{U*} ∘ Φ_I ∘ Γ_U`: Kraus operators `U* E_kk U`.
pub fn xi_map(u: &ComplexMatrix) -> Result<KrausMap> {
    let deviation = u.unitary_deviation();
    if deviation > MAP_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let n = u.n();
    let adj = u.adjoint();
    let ops = (0..n).map(|k| &(&adj * &ComplexMatrix::unit(n, k, k)) * u).collect();
    KrausMap::from_operators(n, ops)
}

/// Mixture of `count` Haar-random unitary conjugations with random weights;
/// always doubly stochastic.
pub fn random_mixed_unitary(n: usize, count: usize, seed: u64) -> Result<KrausMap> {
    if count == 0 {
        return Err(Error::OutOfRange("count must be at least 1".into()));
    }
    let raw: Vec<f64> = (0..count).map(|k| 0.1 + (derive_seed(seed, 1000 + k as u64) >> 11) as f64 / (1u64 << 53) as f64).collect();
    let total: f64 = raw.iter().sum();
    let terms = raw
        .iter()
        .enumerate()
        .map(|(k, w)| KrausTerm { weight: w / total, op: random_unitary(n, derive_seed(seed, k as u64)) })
        .collect();
    KrausMap::new(n, terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineStatus {
    Success,
    /// The shrunk correlation matrix is outside the cut polytope.
    Infeasible,
    Failed,
}

pub const PIPELINE_DELTA_TOL: f64 = 1e-8;
pub const PIPELINE_HU_TOL: f64 = 1e-9;
pub const PIPELINE_SHIFT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub m: usize,
    pub q: usize,
    pub n: usize,
    pub rho: f64,
    pub status: PipelineStatus,
    /// `max_p |Φ_{C_m}(v_p v_p*) - ½(v_{p-1}v_{p-1}* + v_{p+1}v_{p+1}*)|`.
    pub shift_identity_residual: f64,
    pub cut_phase1_objective: Option<f64>,
    pub bgp_check: Option<BgpCheck>,
    /// `max |Δ_Ψ - (ρM + (1-ρ)W_n)|`.
    pub delta_residual: Option<f64>,
    pub hermitian_unitary_deviation: Option<f64>,
    /// `max |Σ p_k (H_k ∘ H̄_k) - Δ_Ψ|`, an explicit hull certificate for `Δ_Ψ`.
    pub hull_reconstruction_error: Option<f64>,
    pub necessary_conditions_hold: Option<bool>,
    pub target: RealMatrix,
    pub delta: Option<RealMatrix>,
    pub distribution: Option<CutDistribution>,
    pub decomposition: Option<MixedHermitianUnitary>,
}

/// `max_p` residual of the column-shift identity for the Fourier columns of size `m`.
pub fn shift_identity_residual(m: usize) -> Result<f64> {
    let c = cosine_correlation(m)?.matrix().to_complex();
    let phi = schur_map(&c)?;
    let f = fourier_matrix(m);
    let proj = |p: usize| {
        let v = f.column(p % m);
        ComplexMatrix::outer(&v, &v)
    };
    let mut worst = 0.0_f64;
    for p in 0..m {
        let lhs = apply_map(&phi, &proj(p))?;
        let rhs = (&proj(p + m - 1) + &proj(p + 1)).scale_real(0.5);
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    Ok(worst)
}

/// Synthesise a mixed Hermitian unitary map `Ψ` with `Δ_Ψ = ρM + (1-ρ)W_n`,
/// `M = B_m ⊗ I_q`, from a cut-polytope certificate for
/// `ρ·q(C_m ⊗ W_q) + (1-ρ)I`.
pub fn proposition4_pipeline(m: usize, q: usize, rho: f64) -> Result<PipelineReport> {
    if m < 3 || m % 2 == 0 {
        return Err(Error::OutOfRange(format!("m must be odd and at least 3, got {m}")));
    }
    if q == 0 {
        return Err(Error::OutOfRange("q must be at least 1".into()));
    }
    let n = m * q;
    if n > MAX_PIPELINE_N {
        return Err(Error::DimensionCap { n, cap: MAX_PIPELINE_N });
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::OutOfRange(format!("rho must lie in (0, 1], got {rho}")));
    }

    let bm = katz_block(m)?.into_matrix();
    let big_m = RealMatrix::from_fn(n, n, |r, c| if r % q == c % q { bm.get(r / q, c / q) } else { 0.0 });
    let target = big_m.lin_comb(rho, &RealMatrix::from_fn(n, n, |_, _| 1.0 / n as f64), 1.0 - rho);
    let cm = cosine_correlation(m)?;
    // q·(C_m ⊗ W_q) has every entry of block (j, k) equal to cos(2π(j-k)/m)
    let c = RealCorrelationMatrix::new(RealMatrix::from_fn(n, n, |r, s| cm.get(r / q, s / q)))?;
    let b = c.shrink(rho)?;
    let shift = shift_identity_residual(m)?;

    let mut report = PipelineReport {
        m,
        q,
        n,
        rho,
        status: PipelineStatus::Infeasible,
        shift_identity_residual: shift,
        cut_phase1_objective: None,
        bgp_check: None,
        delta_residual: None,
        hermitian_unitary_deviation: None,
        hull_reconstruction_error: None,
        necessary_conditions_hold: None,
        target: target.clone(),
        delta: None,
        distribution: None,
        decomposition: None,
    };
    let distribution = match cut_membership(&b, CUT_TOL)? {
        crate::cut::CutMembership::Infeasible { phase1_objective } => {
            report.cut_phase1_objective = Some(phase1_objective);
            return Ok(report);
        }
        crate::cut::CutMembership::Feasible { distribution, .. } => distribution,
    };
    let bgp = check_bgp(&bgp_from_distribution(&distribution), &b, 1e-8)?;

    let u = kron(&fourier_matrix(m), &fourier_matrix(q));
    let u_adj = u.adjoint();
    let mut hu_dev = 0.0_f64;
    let mut terms = Vec::new();
    for (s, w) in distribution.weights() {
        if *w <= 0.0 {
            continue;
        }
        let diag: Vec<C64> = s.values().into_iter().map(|x| C64::new(x, 0.0)).collect();
        let h = &(&u_adj * &ComplexMatrix::diag(&diag)) * &u;
        hu_dev = hu_dev.max(h.hermitian_deviation()).max(h.unitary_deviation());
        terms.push((*w, HermitianUnitary::new(h)?));
    }
    let mhu = MixedHermitianUnitary::new(n, terms)?;
    let psi = mhu.to_kraus();
    let delta = delta_matrix(&psi);
    let delta_residual = delta.max_abs_diff(&target);
    let hull_err = mhu.image_mixture().max_abs_diff(&delta);
    let conditions_hold = crate::birkhoff::BistochasticMatrix::new(delta.clone())
        .map(|d| necessary_conditions(&d).iter().all(|c| c.satisfied))
        .unwrap_or(false);

    let ok = bgp.passed
        && delta_residual <= PIPELINE_DELTA_TOL
        && hu_dev <= PIPELINE_HU_TOL
        && shift <= PIPELINE_SHIFT_TOL
        && conditions_hold;
    report.status = if ok { PipelineStatus::Success } else { PipelineStatus::Failed };
    report.bgp_check = Some(bgp);
    report.delta_residual = Some(delta_residual);
    report.hermitian_unitary_deviation = Some(hu_dev);
    report.hull_reconstruction_error = Some(hull_err);
    report.necessary_conditions_hold = Some(conditions_hold);
    report.delta = Some(delta);
    report.distribution = Some(distribution);
    report.decomposition = Some(mhu);
    Ok(report)
}

/// `½(Γ_U + Γ_{U*}) = p·Γ_I + (1-p)·Γ_R` for a 2×2 unitary.
///
/// With `U = V diag(λ₁, λ₂) V*`, the map is `Γ_V ∘ Φ_S ∘ Γ_{V*}` where `S` has
/// off-diagonal `c = Re(λ₁ λ̄₂)`; `p = (1 + c)/2` and `R = V diag(1, -1) V*`.
pub fn symmetrized_unitary_2x2(u: &ComplexMatrix) -> Result<MixedHermitianUnitary> {
    if u.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: u.n() });
    }
    let deviation = u.unitary_deviation();
    if deviation > MAP_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let one = C64::new(1.0, 0.0);
    let tr = u.trace();
    let det = u.get(0, 0) * u.get(1, 1) - u.get(0, 1) * u.get(1, 0);
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    let identity = HermitianUnitary::new(ComplexMatrix::identity(2))?;
    if (l1 - l2).norm() < 1e-12 {
        // a normal matrix with a double eigenvalue is scalar, so Γ_U = id
        return MixedHermitianUnitary::new(2, vec![(1.0, identity)]);
    }
    // eigenvector for λ₁ from the larger row of U - λ₁I
    let r0 = [u.get(0, 0) - l1, u.get(0, 1)];
    let r1 = [u.get(1, 0), u.get(1, 1) - l1];
    let row = if r0[0].norm_sqr() + r0[1].norm_sqr() >= r1[0].norm_sqr() + r1[1].norm_sqr() { r0 } else { r1 };
    let (mut x, mut y) = (row[1], -row[0]);
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if norm < 1e-300 {
        return MixedHermitianUnitary::new(2, vec![(1.0, identity)]);
    }
    x /= norm;
    y /= norm;
    let v = ComplexMatrix::new(2, vec![x, -y.conj(), y, x.conj()])?;
    let r = &(&v * &ComplexMatrix::diag(&[one, -one])) * &v.adjoint();
    let r = ComplexMatrix::from_fn(2, |i, j| (r.get(i, j) + r.get(j, i).conj()) * 0.5);

    let c = (l1 * l2.conj()).re.clamp(-1.0, 1.0);
    let p = 0.5 * (1.0 + c);
    let mut terms = Vec::new();
    if p > 1e-15 {
        terms.push((p, identity));
    }
    if 1.0 - p > 1e-15 {
        terms.push((1.0 - p, HermitianUnitary::new(r)?));
    }
    let total: f64 = terms.iter().map(|(w, _)| w).sum();
    terms.iter_mut().for_each(|(w, _)| *w /= total);
    MixedHermitianUnitary::new(2, terms)
}

/// Self-dual part of a mixture `Σ p_k Γ_{U_k}` of 2×2 unitary conjugations,
/// as a mixed Hermitian unitary map.
pub fn symmetrize_mixture_2x2(parts: &[(f64, ComplexMatrix)]) -> Result<MixedHermitianUnitary> {
    let total: f64 = parts.iter().map(|(p, _)| p).sum();
    if parts.is_empty() || parts.iter().any(|(p, _)| !(*p > 0.0)) || (total - 1.0).abs() > MAP_TOL {
        return Err(Error::InvalidWeights(format!("mixture weights must be positive and sum to 1 (sum {total})")));
    }
    let mut terms = Vec::new();
    for (p, u) in parts {
        for (w, h) in symmetrized_unitary_2x2(u)?.terms {
            terms.push((p * w, h));
        }
    }
    MixedHermitianUnitary::new(2, terms)
}

/// Whether a map given in Kraus form is a single unitary conjugation or a
/// mixture of them, read off from unitary operators and weights summing to 1.
pub fn as_unitary_mixture(phi: &KrausMap, tol: f64) -> Option<Vec<(f64, ComplexMatrix)>> {
    let total: f64 = phi.terms.iter().map(|t| t.weight).sum();
    if (total - 1.0).abs() > tol || phi.terms.iter().any(|t| t.op.unitary_deviation() > tol) {
        return None;
    }
    Some(phi.terms.iter().map(|t| (t.weight, t.op.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birkhoff::{flat_matrix, Permutation};
    use crate::linalg::schur_product;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_matrix(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |i, j| c(1.0 + i as f64 - 0.5 * j as f64, 0.3 * (i * j) as f64 - 0.2))
    }

    #[test]
    fn apply_examples() {
        let a = sample_matrix(3);
        assert_eq!(apply_map(&KrausMap::identity(3), &a).unwrap(), a);

        let p = Permutation::new(vec![1, 2, 0]).unwrap();
        let gp = conjugation_map(&p.matrix().to_complex()).unwrap();
        let d = ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let out = apply_map(&gp, &d).unwrap();
        // P e_j = e_{σ(j)}, so entry σ(j) receives d_j
        let expect = ComplexMatrix::diag(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(out.max_abs_diff(&expect) < 1e-15);

        let corr = ComplexMatrix::from_real_rows(&[vec![1.0, 0.3, -0.2], vec![0.3, 1.0, 0.5], vec![-0.2, 0.5, 1.0]]);
        let phi = schur_map(&corr).unwrap();
        let got = apply_map(&phi, &a).unwrap();
        assert!(got.max_abs_diff(&schur_product(&corr, &a).unwrap()) < 1e-12);
        assert!(apply_map(&phi, &sample_matrix(2)).is_err());
    }

    #[test]
    fn dual_examples() {
        let phi = random_mixed_unitary(3, 3, 1).unwrap();
        assert!(choi_distance(&dual_map(&dual_map(&phi)), &phi) < 1e-12);
        let u = random_unitary(3, 4);
        let gu = conjugation_map(&u).unwrap();
        assert!(choi_distance(&dual_map(&gu), &conjugation_map(&u.adjoint()).unwrap()) < 1e-15);
        let h = crate::hull::random_hermitian_unitary(3, 1, 9).unwrap();
        let gh = KrausMap::from_operators(3, vec![h.matrix().clone()]).unwrap();
        assert!(choi_distance(&dual_map(&gh), &gh) < 1e-12);
    }

    #[test]
    fn choi_examples() {
        let ch = choi_matrix(&KrausMap::identity(2));
        assert!((ch.matrix().trace() - c(2.0, 0.0)).norm() < 1e-15);
        let eig = hermitian_eig(ch.matrix()).unwrap().eigenvalues;
        assert!((eig[0] - 2.0).abs() < 1e-12 && eig[1..].iter().all(|x| x.abs() < 1e-12));

        let pinch = KrausMap::from_operators(2, vec![ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 1)]).unwrap();
        let ch = choi_matrix(&pinch);
        for r in 0..4 {
            for s in 0..4 {
                if r != s {
                    assert_eq!(ch.matrix().get(r, s), C64::new(0.0, 0.0));
                }
            }
        }
        assert!(ch.is_positive_semidefinite(1e-12));

        // block (i, j) is Φ(E_ij)
        let phi = random_mixed_unitary(2, 2, 3).unwrap();
        let ch = choi_matrix(&phi);
        for i in 0..2 {
            for j in 0..2 {
                let img = apply_map(&phi, &ComplexMatrix::unit(2, i, j)).unwrap();
                for a in 0..2 {
                    for b in 0..2 {
                        assert!((ch.matrix().get(i * 2 + a, j * 2 + b) - img.get(a, b)).norm() < 1e-14);
                    }
                }
            }
        }
        assert!(KrausMap::new(2, vec![KrausTerm { weight: -1.0, op: ComplexMatrix::identity(2) }]).is_err());
    }

    #[test]
    fn property_examples() {
        let u = random_unitary(3, 21);
        let p = map_properties(&conjugation_map(&u).unwrap(), 1e-9).unwrap();
        assert!(p.cp && p.trace_preserving && p.unital && p.doubly_stochastic && !p.self_dual);

        let corr = RealCorrelationMatrix::from_factor(&crate::cut::random_unit_factor(2, 4, 2)).unwrap();
        let p = map_properties(&schur_map(&corr.matrix().to_complex()).unwrap(), 1e-9).unwrap();
        assert!(p.self_dual && p.doubly_stochastic);

        let half = std::f64::consts::FRAC_1_SQRT_2;
        let m = KrausMap::from_operators(
            2,
            vec![ComplexMatrix::identity(2).scale_real(half), ComplexMatrix::unit(2, 0, 0).scale_real(half)],
        )
        .unwrap();
        assert!(!map_properties(&m, 1e-9).unwrap().trace_preserving);
    }

    #[test]
    fn hermitian_kraus_examples() {
        let h = crate::hull::random_hermitian_unitary(3, 1, 2).unwrap();
        let single = KrausMap::from_operators(3, vec![h.matrix().clone()]).unwrap();
        let out = hermitian_kraus(&single, 1e-9).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out.terms()[0].op.max_abs_diff(h.matrix()) < 1e-15);

        let u = random_unitary(3, 8);
        let sym = self_dual_part(&conjugation_map(&u).unwrap());
        let out = hermitian_kraus(&sym, 1e-9).unwrap();
        assert!(out.terms().iter().all(|t| t.op.hermitian_deviation() <= 1e-10));
        assert!(choi_distance(&out, &sym) <= 1e-10);

        assert!(matches!(hermitian_kraus(&conjugation_map(&u).unwrap(), 1e-9), Err(Error::NotSelfDual { .. })));
    }

    #[test]
    fn delta_examples() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let gp = conjugation_map(&p.matrix().to_complex()).unwrap();
        assert_eq!(delta_matrix(&gp), p.matrix());

        let u = random_unitary(4, 5);
        let gu = conjugation_map(&u).unwrap();
        assert!(delta_matrix(&gu).max_abs_diff(&u.abs_squared()) < 1e-15);
        // direct definition Φ(E_jj)_ii
        let d = delta_matrix(&gu);
        for j in 0..4 {
            let img = apply_map(&gu, &ComplexMatrix::unit(4, j, j)).unwrap();
            for i in 0..4 {
                assert!((d.get(i, j) - img.get(i, i).re).abs() < 1e-14);
            }
        }

        let xi = xi_map(&fourier_matrix(3)).unwrap();
        assert!(delta_matrix(&xi).max_abs_diff(flat_matrix(3).unwrap().matrix()) < 1e-14);
    }

    #[test]
    fn schur_examples() {
        let z = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let got = extract_schur(&conjugation_map(&z).unwrap(), 1e-12).unwrap();
        assert!(got.max_abs_diff(&ComplexMatrix::from_real_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]])) < 1e-15);

        let ones = ComplexMatrix::from_fn(3, |_, _| c(1.0, 0.0));
        assert!(choi_distance(&schur_map(&ones).unwrap(), &KrausMap::identity(3)) < 1e-12);

        for seed in 0..5 {
            let a = crate::cut::random_unit_factor(3, 4, seed);
            let corr = a.transpose().matmul(&a).to_complex();
            let back = extract_schur(&schur_map(&corr).unwrap(), 1e-10).unwrap();
            assert!(back.max_abs_diff(&corr) < 1e-10);
        }
        let u = random_unitary(3, 1);
        assert!(matches!(extract_schur(&conjugation_map(&u).unwrap(), 1e-9), Err(Error::NotDiagonalFixing { .. })));
    }

    #[test]
    fn schur_self_dual_iff_real() {
        // complex correlation: Gram matrix of unit complex vectors
        let v: Vec<C64> = (0..3).map(|k| C64::from_polar(1.0, 0.7 * k as f64)).collect();
        let w: Vec<C64> = (0..3).map(|k| C64::from_polar(1.0, -1.3 * (k * k) as f64)).collect();
        let cm = (&ComplexMatrix::outer(&v, &v) + &ComplexMatrix::outer(&w, &w)).scale_real(0.5);
        let props = map_properties(&schur_map(&cm).unwrap(), 1e-9).unwrap();
        assert!(!props.self_dual);
        assert!(cm.max_abs_diff(&cm.conj()) > 1e-9);
        let real = ComplexMatrix::from_fn(3, |i, j| c(cm.get(i, j).re, 0.0));
        assert!(map_properties(&schur_map(&real).unwrap(), 1e-9).unwrap().self_dual);
    }

    #[test]
    fn mixed_from_rank1_examples() {
        let c3 = cosine_correlation(3).unwrap();
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let v: Vec<C64> = (0..3).map(|k| omega.powu(k)).collect();
        let vbar: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        let phi = mixed_from_rank1(3, &[(0.5, v), (0.5, vbar)]).unwrap();
        let schur = schur_map(&c3.matrix().to_complex()).unwrap();
        assert!(choi_distance(&phi, &schur) < 1e-12);
        assert!(map_properties(&phi, 1e-9).unwrap().self_dual);
        assert!(!cut_membership(&c3, CUT_TOL).unwrap().is_feasible());

        let ones = vec![c(1.0, 0.0); 3];
        assert!(choi_distance(&mixed_from_rank1(3, &[(1.0, ones)]).unwrap(), &KrausMap::identity(3)) < 1e-15);
        assert!(mixed_from_rank1(2, &[(1.0, vec![c(0.5, 0.0), c(1.0, 0.0)])]).is_err());

        let target = c3.shrink(0.5).unwrap();
        let d = cut_membership(&target, CUT_TOL).unwrap().distribution().unwrap().clone();
        let mhu = MixedHermitianUnitary::from_cut_distribution(&d).unwrap();
        let schur = schur_map(&target.matrix().to_complex()).unwrap();
        assert!(choi_distance(&mhu.to_kraus(), &schur) < 1e-9);
    }

    #[test]
    fn conjugation_and_composition() {
        assert!(choi_distance(&conjugation_map(&ComplexMatrix::identity(3)).unwrap(), &KrausMap::identity(3)) < 1e-15);
        let f3 = fourier_matrix(3);
        let out = apply_map(&conjugation_map(&f3).unwrap(), &ComplexMatrix::unit(3, 0, 0)).unwrap();
        assert!(out.abs_squared().max_abs_diff(&RealMatrix::from_fn(3, 3, |_, _| 1.0 / 9.0)) < 1e-15);
        let u = random_unitary(3, 3);
        let round = compose(&conjugation_map(&u).unwrap(), &conjugation_map(&u.adjoint()).unwrap()).unwrap();
        assert!(choi_distance(&round, &KrausMap::identity(3)) < 1e-12);
        assert!(compose(&KrausMap::identity(2), &KrausMap::identity(3)).is_err());

        let z = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let pinch = mix_maps(&[(0.5, KrausMap::identity(2)), (0.5, conjugation_map(&z).unwrap())]).unwrap();
        let expect = KrausMap::from_operators(2, vec![ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 1)]).unwrap();
        assert!(choi_distance(&pinch, &expect) < 1e-15);
        assert!(mix_maps(&[(0.7, KrausMap::identity(2))]).is_err());

        let phi = random_mixed_unitary(2, 2, 7).unwrap();
        let big = tensor_with_identity(&phi, 3).unwrap();
        let a = sample_matrix(2);
        let b = sample_matrix(3);
        let lhs = apply_map(&big, &kron(&a, &b)).unwrap();
        let rhs = kron(&apply_map(&phi, &a).unwrap(), &b);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn xi_examples() {
        let xi = xi_map(&fourier_matrix(3)).unwrap();
        let d = ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let out = apply_map(&xi, &d).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(3).scale_real(2.0)) < 1e-14);
        let p = map_properties(&xi, 1e-9).unwrap();
        assert!(p.doubly_stochastic && p.self_dual);
        let u = kron(&fourier_matrix(3), &fourier_matrix(2));
        assert!(delta_matrix(&xi_map(&u).unwrap()).max_abs_diff(flat_matrix(6).unwrap().matrix()) < 1e-14);
    }

    #[test]
    fn pipeline_examples() {
        let r = proposition4_pipeline(3, 1, 2.0 / 3.0).unwrap();
        assert_eq!(r.status, PipelineStatus::Success, "{r:?}");
        let expect = crate::hull::witness_unitary_3().image();
        assert!(r.delta.as_ref().unwrap().max_abs_diff(expect.matrix()) < 1e-8);

        let r = proposition4_pipeline(3, 2, 0.5).unwrap();
        assert_eq!(r.status, PipelineStatus::Success);
        assert!(r.delta_residual.unwrap() <= 1e-8);
        assert!(r.shift_identity_residual <= 1e-10);

        let r = proposition4_pipeline(3, 1, 1.0).unwrap();
        assert_eq!(r.status, PipelineStatus::Infeasible);
        assert!(r.decomposition.is_none());
        assert!(proposition4_pipeline(4, 1, 0.5).is_err());
        assert!(matches!(proposition4_pipeline(5, 3, 0.5), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn two_by_two_examples() {
        let i = c(0.0, 1.0);
        let u = ComplexMatrix::diag(&[i, c(1.0, 0.0)]);
        let mhu = symmetrized_unitary_2x2(&u).unwrap();
        assert_eq!(mhu.terms().len(), 2);
        assert!((mhu.terms()[0].0 - 0.5).abs() < 1e-15);
        let r = mhu.terms()[1].1.matrix();
        assert!(r.max_abs_diff(&ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)])) < 1e-15
            || r.max_abs_diff(&ComplexMatrix::diag(&[c(-1.0, 0.0), c(1.0, 0.0)])) < 1e-15);
        // hand conjugation: off-diagonals pinched to 0
        let a = sample_matrix(2);
        let out = apply_map(&mhu.to_kraus(), &a).unwrap();
        assert!(out.get(0, 1).norm() < 1e-15 && out.get(1, 0).norm() < 1e-15);
        assert!((out.get(0, 0) - a.get(0, 0)).norm() < 1e-15);

        let h = crate::hull::random_hermitian_unitary(2, 1, 4).unwrap();
        let mhu = symmetrized_unitary_2x2(h.matrix()).unwrap();
        assert!(choi_distance(&mhu.to_kraus(), &conjugation_map(h.matrix()).unwrap()) < 1e-12);

        let mhu = symmetrized_unitary_2x2(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(mhu.terms().len(), 1);
        assert_eq!(mhu.terms()[0].0, 1.0);

        assert!(symmetrized_unitary_2x2(&ComplexMatrix::identity(3)).is_err());
        assert!(symmetrized_unitary_2x2(&ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]])).is_err());
    }

    #[test]
    fn json_shapes() {
        let m = KrausMap::from_operators(1, vec![ComplexMatrix::identity(1)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"n":1,"terms":[{"w":1.0,"op":{"n":1,"entries":[[1.0,0.0]]}}]}"#);
        assert_eq!(serde_json::from_str::<KrausMap>(&s).unwrap(), m);
        let mhu = symmetrized_unitary_2x2(&ComplexMatrix::identity(2)).unwrap();
        let s = serde_json::to_string(&mhu).unwrap();
        assert!(s.contains(r#""signature":0"#));
        assert_eq!(serde_json::from_str::<MixedHermitianUnitary>(&s).unwrap(), mhu);
    }
}
