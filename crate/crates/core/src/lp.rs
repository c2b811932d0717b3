//! Phase-I simplex feasibility: find `x >= 0` with `E x = b`.
//!
//! Dense tableau, Bland's rule, one artificial variable per row. Artificial
//! columns never re-enter the basis, so the tableau only carries the original
//! columns. Solutions are re-checked by [`verify_solution`], which shares no
//! state with the solver.

use serde::{Deserialize, Serialize};

use crate::linalg::RealMatrix;
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-11;
const REDUCED_COST_EPS: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityProblem {
    #[serde(rename = "E")]
    pub e: RealMatrix,
    pub b: Vec<f64>,
}

impl FeasibilityProblem {
    pub fn new(e: RealMatrix, b: Vec<f64>) -> Result<Self> {
        if e.rows() != b.len() {
            return Err(Error::DimensionMismatch { expected: e.rows(), found: b.len() });
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { e, b })
    }

    pub fn num_vars(&self) -> usize {
        self.e.cols()
    }

    pub fn num_eq(&self) -> usize {
        self.e.rows()
    }

    /// `max_i |(E x - b)_i|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.e.mul_vec(x).iter().zip(&self.b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    pub residual: f64,
    pub phase1_objective: f64,
    pub iterations: usize,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    // rows × (cols + 1); the last column is the right-hand side
    body: Vec<f64>,
    // reduced costs of the phase-I objective for the original columns
    cost: Vec<f64>,
    // basic variable per row; indices >= cols are artificials
    basis: Vec<usize>,
}

impl Tableau {
    fn new(p: &FeasibilityProblem) -> Self {
        let (rows, cols) = (p.num_eq(), p.num_vars());
        let w = cols + 1;
        let mut body = vec![0.0; rows * w];
        for i in 0..rows {
            let sign = if p.b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..cols {
                body[i * w + j] = sign * p.e.get(i, j);
            }
            body[i * w + cols] = sign * p.b[i];
        }
        let mut cost = vec![0.0; cols];
        for i in 0..rows {
            for j in 0..cols {
                cost[j] -= body[i * w + j];
            }
        }
        Self { rows, cols, body, cost, basis: (cols..cols + rows).collect() }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.body[i * (self.cols + 1) + j]
    }

    fn entering(&self) -> Option<usize> {
        self.cost.iter().position(|&d| d < -REDUCED_COST_EPS)
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, col);
            if a <= PIVOT_EPS {
                continue;
            }
            let ratio = self.at(i, self.cols) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.cols + 1;
        let p = self.at(row, col);
        for j in 0..w {
            self.body[row * w + j] /= p;
        }
        self.body[row * w + col] = 1.0;
        let pivot_row: Vec<f64> = self.body[row * w..(row + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let f = self.body[i * w + col];
            if f == 0.0 {
                continue;
            }
            let target = &mut self.body[i * w..(i + 1) * w];
            for (t, r) in target.iter_mut().zip(&pivot_row) {
                *t -= f * r;
            }
            target[col] = 0.0;
        }
        let f = self.cost[col];
        for (c, r) in self.cost.iter_mut().zip(&pivot_row) {
            *c -= f * r;
        }
        self.cost[col] = 0.0;
        self.basis[row] = col;
    }

    fn artificial_sum(&self) -> f64 {
        (0..self.rows).filter(|&i| self.basis[i] >= self.cols).map(|i| self.at(i, self.cols).abs()).sum()
    }

    fn solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.cols];
        for i in 0..self.rows {
            let v = self.basis[i];
            if v < self.cols {
                x[v] = self.at(i, self.cols).max(0.0);
            }
        }
        x
    }
}

/// Iteration cap used by [`solve_feasibility`].
pub fn iteration_cap(p: &FeasibilityProblem) -> usize {
    50 * (p.num_vars() + p.num_eq())
}

/// Decide feasibility of `{x >= 0 : E x = b}` by phase-I simplex.
pub fn solve_feasibility(p: &FeasibilityProblem, tol: f64) -> Result<FeasibilityResult> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance must be positive, got {tol}")));
    }
    let cap = iteration_cap(p);
    let mut t = Tableau::new(p);
    let mut iterations = 0;
    while let Some(col) = t.entering() {
        // unbounded ray cannot happen in phase I (objective is bounded below by 0)
        let Some(row) = t.leaving(col) else { break };
        if iterations >= cap {
            return Err(Error::IterationCap(cap));
        }
        t.pivot(row, col);
        iterations += 1;
    }
    let phase1_objective = t.artificial_sum();
    let x = t.solution();
    let residual = p.residual(&x);
    if phase1_objective <= tol && residual <= tol {
        Ok(FeasibilityResult { status: Status::Feasible, x: Some(x), residual, phase1_objective, iterations })
    } else {
        Ok(FeasibilityResult {
            status: Status::Infeasible,
            x: None,
            residual,
            phase1_objective: phase1_objective.max(residual),
            iterations,
        })
    }
}

/// Independent check that `x >= -tol` and `max |E x - b| <= tol`.
pub fn verify_solution(p: &FeasibilityProblem, x: &[f64], tol: f64) -> Result<bool> {
    if x.len() != p.num_vars() {
        return Err(Error::DimensionMismatch { expected: p.num_vars(), found: x.len() });
    }
    let nonneg = x.iter().all(|&v| v >= -tol);
    let mut worst = 0.0_f64;
    for i in 0..p.num_eq() {
        let row = p.e.row(i);
        let mut acc = -p.b[i];
        for (a, v) in row.iter().zip(x) {
            acc += a * v;
        }
        worst = worst.max(acc.abs());
    }
    Ok(nonneg && worst <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(rows: &[Vec<f64>], b: &[f64]) -> FeasibilityProblem {
        FeasibilityProblem::new(RealMatrix::from_rows(rows).unwrap(), b.to_vec()).unwrap()
    }

    #[test]
    fn simplex_sum_to_one() {
        let p = problem(&[vec![1.0, 1.0]], &[1.0]);
        let r = solve_feasibility(&p, DEFAULT_TOL).unwrap();
        assert!(r.is_feasible());
        let x = r.x.unwrap();
        assert_eq!(x, vec![1.0, 0.0]);
        assert!(verify_solution(&p, &x, 1e-12).unwrap());
    }

    #[test]
    fn negative_sum_is_infeasible() {
        let p = problem(&[vec![1.0, 1.0]], &[-1.0]);
        let r = solve_feasibility(&p, DEFAULT_TOL).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert!(r.phase1_objective > DEFAULT_TOL);
        assert!(r.x.is_none());
    }

    #[test]
    fn three_point_moment_system() {
        // columns: canonical sign vectors (+++), (++-), (+-+), (+--)
        // rows: total mass, s1s2, s1s3, s2s3
        let p = problem(
            &[
                vec![1.0, 1.0, 1.0, 1.0],
                vec![1.0, 1.0, -1.0, -1.0],
                vec![1.0, -1.0, 1.0, -1.0],
                vec![1.0, -1.0, -1.0, 1.0],
            ],
            &[1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0],
        );
        let r = solve_feasibility(&p, DEFAULT_TOL).unwrap();
        assert!(r.is_feasible());
        let x = r.x.unwrap();
        // the 4x4 system is nonsingular, so the hand solution is the only one
        let expect = [0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{x:?}");
        }
    }

    #[test]
    fn verify_rejects_negative_and_perturbed() {
        let p = problem(&[vec![1.0, 1.0, 1.0]], &[1.0]);
        assert!(!verify_solution(&p, &[1.1, 0.0, -0.1], 1e-9).unwrap());
        let ok = [0.5, 0.25, 0.25];
        assert!(verify_solution(&p, &ok, 1e-9).unwrap());
        assert!(!verify_solution(&p, &[0.5 + 1e-6, 0.25, 0.25], 1e-9).unwrap());
        assert!(matches!(verify_solution(&p, &[1.0], 1e-9), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dimension_mismatch() {
        let e = RealMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(matches!(FeasibilityProblem::new(e, vec![1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn redundant_rows_are_handled() {
        let p = problem(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]], &[1.0, 2.0, 0.5]);
        let r = solve_feasibility(&p, DEFAULT_TOL).unwrap();
        assert!(r.is_feasible());
        assert!(verify_solution(&p, r.x.as_ref().unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn json_shape() {
        let p = problem(&[vec![1.0, 2.0]], &[3.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"E":[[1.0,2.0]],"b":[3.0]}"#);
        let back: FeasibilityProblem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
