use bistoch::linalg::RealMatrix;
use bistoch::lp::{solve_feasibility, verify_solution, FeasibilityProblem, DEFAULT_TOL};
use proptest::prelude::*;

/// Feasible iff some set of linearly independent columns carries a
/// nonnegative solution (a basic feasible solution).
fn vertex_oracle(p: &FeasibilityProblem) -> bool {
    let (m, n) = (p.num_eq(), p.num_vars());
    if p.b.iter().all(|&x| x == 0.0) {
        return true;
    }
    for mask in 1u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        if cols.len() > m {
            continue;
        }
        let sub = RealMatrix::from_fn(m, cols.len(), |i, k| p.e.get(i, cols[k]));
        if let Some(x) = sub.solve_unique(&p.b, 1e-10) {
            if x.iter().all(|&v| v >= -1e-10) {
                return true;
            }
        }
    }
    false
}

fn problem_strategy() -> impl Strategy<Value = FeasibilityProblem> {
    (1usize..=4, 1usize..=6).prop_flat_map(|(m, n)| {
        (prop::collection::vec(-3i32..=3, m * n), prop::collection::vec(-3i32..=3, m)).prop_map(move |(e, b)| {
            let e = RealMatrix::new(m, n, e.into_iter().map(f64::from).collect()).unwrap();
            FeasibilityProblem::new(e, b.into_iter().map(f64::from).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn decision_matches_vertex_enumeration(p in problem_strategy()) {
        let r = solve_feasibility(&p, DEFAULT_TOL).unwrap();
        prop_assert_eq!(r.is_feasible(), vertex_oracle(&p));
        if let Some(x) = &r.x {
            prop_assert!(verify_solution(&p, x, 10.0 * DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn deterministic(p in problem_strategy()) {
        let a = solve_feasibility(&p, DEFAULT_TOL).unwrap();
        let b = solve_feasibility(&p, DEFAULT_TOL).unwrap();
        prop_assert_eq!(a, b);
    }
}
