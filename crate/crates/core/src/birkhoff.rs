//! Doubly stochastic and symmetric bistochastic matrices.
//!
//! Extreme points of the symmetric bistochastic polytope are, up to a
//! permutation similarity, direct sums of Katz blocks: `B_1 = (1)`, the swap
//! `B_2`, and for odd `k >= 3` the cycle matrix with `1/2` on the two cyclic
//! off-diagonals.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::linalg::{square_json, RealMatrix};
use crate::{Error, Result};

/// Tolerance on row/column sums and symmetry for [`BistochasticMatrix`].
pub const SUM_TOL: f64 = 1e-9;
/// Entries above `-NEG_TOL` count as nonnegative.
pub const NEG_TOL: f64 = 1e-12;
/// Entries at or below this are structural zeros in the extremality test.
pub const SUPPORT_TOL: f64 = 1e-9;

/// Real nonnegative square matrix with unit row and column sums.
#[derive(Clone, Debug, PartialEq)]
pub struct BistochasticMatrix {
    matrix: RealMatrix,
    symmetric: bool,
}

impl Serialize for BistochasticMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        square_json::serialize(&self.matrix, serializer)
    }
}

impl<'de> Deserialize<'de> for BistochasticMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = square_json::deserialize(deserializer)?;
        BistochasticMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

impl BistochasticMatrix {
    /// Validate and wrap; the symmetric flag is set when `max|M - Mᵀ| <= 1e-9`.
    pub fn new(matrix: RealMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotBistochastic(format!("{}x{} is not square", matrix.rows(), matrix.cols())));
        }
        let min = matrix.min_entry();
        if matrix.rows() > 0 && min < -NEG_TOL {
            return Err(Error::NotBistochastic(format!("negative entry {min:e}")));
        }
        let worst = matrix
            .row_sums()
            .into_iter()
            .chain(matrix.col_sums())
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max);
        if worst > SUM_TOL {
            return Err(Error::NotBistochastic(format!("line sum off by {worst:e}")));
        }
        let symmetric = matrix.symmetry_deviation() <= SUM_TOL;
        Ok(Self { matrix, symmetric })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn permute(&self, perm: &Permutation) -> Self {
        Self { matrix: self.matrix.permute(&perm.mapping), symmetric: self.symmetric }
    }
}

/// Partition of `n` into parts that are odd or equal to two.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct KatzPartition {
    parts: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    parts: Vec<usize>,
}

impl TryFrom<PartitionRepr> for KatzPartition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        KatzPartition::new(r.parts)
    }
}

impl From<KatzPartition> for PartitionRepr {
    fn from(p: KatzPartition) -> Self {
        PartitionRepr { parts: p.parts }
    }
}

impl KatzPartition {
    /// Parts are sorted into nonincreasing order.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidKatzBlock(0));
        }
        if let Some(&bad) = parts.iter().find(|&&k| !valid_block(k)) {
            return Err(Error::InvalidKatzBlock(bad));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Block-diagonal extreme point for the identity arrangement.
    pub fn block_matrix(&self) -> RealMatrix {
        let blocks: Vec<RealMatrix> = self.parts.iter().map(|&k| katz_block_matrix(k)).collect();
        RealMatrix::direct_sum(&blocks)
    }
}

impl std::fmt::Display for KatzPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.parts.iter().join("+"))
    }
}

impl std::str::FromStr for KatzPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split([',', '+'])
            .map(|p| p.trim().parse::<usize>().map_err(|e| Error::Input(format!("partition part {p:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        KatzPartition::new(parts)
    }
}

/// Permutation of `0..n`; `mapping[i]` is the image of `i`.
///
/// The associated matrix sends `e_i` to `e_{mapping[i]}`, so `P M Pᵀ` has
/// entry `(mapping[i], mapping[j])` equal to `M[i][j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidPermutation(format!("{mapping:?} is not a bijection of 0..{n}")));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self { mapping: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_involution(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| self.mapping[m] == i)
    }

    pub fn matrix(&self) -> RealMatrix {
        RealMatrix::from_fn(self.len(), self.len(), |i, j| if self.mapping[j] == i { 1.0 } else { 0.0 })
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (0..n).permutations(n).map(|mapping| Permutation { mapping })
    }
}

fn valid_block(k: usize) -> bool {
    k == 1 || k == 2 || k % 2 == 1
}

fn katz_block_matrix(k: usize) -> RealMatrix {
    match k {
        1 => RealMatrix::identity(1),
        2 => RealMatrix::from_fn(2, 2, |i, j| if i != j { 1.0 } else { 0.0 }),
        _ => RealMatrix::from_fn(k, k, |i, j| {
            let d = (i + k - j) % k;
            if d == 1 || d == k - 1 {
                0.5
            } else {
                0.0
            }
        }),
    }
}

/// The flat matrix `W_n` (every entry `1/n`).
pub fn flat_matrix(n: usize) -> Result<BistochasticMatrix> {
    if n == 0 {
        return Err(Error::OutOfRange("dimension must be positive".into()));
    }
    Ok(BistochasticMatrix {
        matrix: RealMatrix::from_fn(n, n, |_, _| 1.0 / n as f64),
        symmetric: true,
    })
}

/// Katz block `B_k` for `k = 1`, `k = 2` or odd `k`.
pub fn katz_block(k: usize) -> Result<BistochasticMatrix> {
    if k == 0 || !valid_block(k) {
        return Err(Error::InvalidKatzBlock(k));
    }
    Ok(BistochasticMatrix { matrix: katz_block_matrix(k), symmetric: true })
}

/// All Katz partitions of `n` in canonical order (lexicographically decreasing part lists).
pub fn katz_partitions(n: usize) -> Vec<KatzPartition> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<KatzPartition>) {
        if remaining == 0 {
            out.push(KatzPartition { parts: prefix.clone() });
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            if valid_block(part) {
                prefix.push(part);
                rec(remaining - part, part, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// `P · blockdiag(B_{n_1}, …, B_{n_m}) · Pᵀ`.
pub fn katz_extreme_point(p: &KatzPartition, perm: &Permutation) -> Result<BistochasticMatrix> {
    if perm.len() != p.n() {
        return Err(Error::InvalidPermutation(format!(
            "permutation of size {} for partition of {}",
            perm.len(),
            p.n()
        )));
    }
    Ok(BistochasticMatrix { matrix: p.block_matrix().permute(perm.mapping()), symmetric: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BistochasticCheck {
    pub doubly_stochastic: bool,
    pub symmetric: bool,
}

pub fn check_bistochastic(a: &RealMatrix, tol: f64) -> BistochasticCheck {
    if !a.is_square() {
        return BistochasticCheck { doubly_stochastic: false, symmetric: false };
    }
    let sums_ok = a.row_sums().into_iter().chain(a.col_sums()).all(|s| (s - 1.0).abs() <= tol);
    let nonneg = a.rows() == 0 || a.min_entry() >= -tol;
    BistochasticCheck { doubly_stochastic: sums_ok && nonneg, symmetric: a.symmetry_deviation() <= tol }
}

/// Homogeneous system whose null space holds the symmetric, zero-line-sum
/// perturbations supported inside `support(M)`. Unknowns are the supported
/// entries `(i, j)` with `i <= j`.
pub(crate) fn perturbation_system(m: &RealMatrix, tol: f64) -> (RealMatrix, Vec<(usize, usize)>) {
    let n = m.rows();
    let vars: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).filter(|&(i, j)| m.get(i, j) > tol).collect();
    let sys = RealMatrix::from_fn(n, vars.len(), |row, v| {
        let (i, j) = vars[v];
        if i == j {
            if row == i {
                1.0
            } else {
                0.0
            }
        } else if row == i || row == j {
            1.0
        } else {
            0.0
        }
    });
    (sys, vars)
}

/// A symmetric bistochastic `M` is extreme iff no nonzero symmetric `D` with
/// zero row sums and support inside `support(M)` exists, i.e. iff the
/// perturbation system has full column rank.
pub fn is_extreme_symmetric_bistochastic(m: &BistochasticMatrix, tol: f64) -> bool {
    if !m.is_symmetric() {
        return false;
    }
    let (sys, vars) = perturbation_system(m.matrix(), tol);
    sys.rank(1e-10) == vars.len()
}

/// `k·M + (1-k)·W_n`.
pub fn segment_point(m: &BistochasticMatrix, k: f64) -> Result<BistochasticMatrix> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::OutOfRange(format!("segment parameter {k} outside [0, 1]")));
    }
    let n = m.n();
    let w = 1.0 / n as f64;
    let matrix = RealMatrix::from_fn(n, n, |i, j| k * m.get(i, j) + (1.0 - k) * w);
    Ok(BistochasticMatrix { matrix, symmetric: m.symmetric })
}

/// Vertices of `{X symmetric, X >= 0, row sums 1}` by support enumeration
/// (n <= 4). Independent of Katz's characterisation.
pub fn enumerate_symmetric_vertices(n: usize) -> Result<Vec<RealMatrix>> {
    if n == 0 || n > 4 {
        return Err(Error::DimensionCap { n, cap: 4 });
    }
    let vars: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut vertices: Vec<RealMatrix> = Vec::new();
    for mask in 1u32..(1 << vars.len()) {
        let chosen: Vec<(usize, usize)> =
            vars.iter().enumerate().filter(|(v, _)| mask & (1 << v) != 0).map(|(_, &p)| p).collect();
        if chosen.len() > n {
            // a vertex has at most n nonzero unknowns (n equality rows)
            continue;
        }
        let sys = RealMatrix::from_fn(n, chosen.len(), |row, v| {
            let (i, j) = chosen[v];
            if row == i || row == j {
                1.0
            } else {
                0.0
            }
        });
        let Some(x) = sys.solve_unique(&vec![1.0; n], 1e-12) else { continue };
        if x.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let mut m = RealMatrix::zeros(n, n);
        for (&(i, j), &v) in chosen.iter().zip(&x) {
            let v = v.max(0.0);
            m.set(i, j, v);
            m.set(j, i, v);
        }
        if !vertices.iter().any(|u| u.max_abs_diff(&m) <= 1e-9) {
            vertices.push(m);
        }
    }
    Ok(vertices)
}

/// Orbit of all Katz extreme points of size `n` under permutation similarity.
pub fn katz_orbit(n: usize) -> Vec<RealMatrix> {
    let mut out: Vec<RealMatrix> = Vec::new();
    for p in katz_partitions(n) {
        let base = p.block_matrix();
        for perm in Permutation::all(n) {
            let m = base.permute(perm.mapping());
            if !out.iter().any(|u| u.max_abs_diff(&m) <= 1e-9) {
                out.push(m);
            }
        }
    }
    out
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn segment_points_stay_symmetric_bistochastic(idx in 0usize..6, perm_seed in 0usize..120, k in 0.0f64..=1.0) {
            let parts = katz_partitions(5);
            let p = &parts[idx % parts.len()];
            let perm = Permutation::all(5).nth(perm_seed).unwrap();
            let m = katz_extreme_point(p, &perm).unwrap();
            prop_assert!(is_extreme_symmetric_bistochastic(&m, SUPPORT_TOL));
            let s = segment_point(&m, k).unwrap();
            let c = check_bistochastic(s.matrix(), 1e-12);
            prop_assert!(c.doubly_stochastic && c.symmetric);
        }
    }
}
