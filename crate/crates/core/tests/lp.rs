mod common;

use common::{random_lps, vertex_enumeration};
use yieldcurve::lp::{simplex_solve, LinearProgram, LpError, Relation};

#[test]
fn simplex_matches_vertex_enumeration() {
    for (k, lp) in random_lps(7, 200).iter().enumerate() {
        let best = vertex_enumeration(lp).expect("generator makes feasible problems");
        let sol = simplex_solve(lp).unwrap_or_else(|e| panic!("lp {k}: {e}"));
        assert!(
            (sol.objective - best).abs() < 1e-9,
            "lp {k}: {} vs {best}",
            sol.objective
        );
        assert!(lp.max_violation(&sol.x) < 1e-9, "lp {k}");
    }
}

#[test]
fn contradictory_equalities_are_infeasible() {
    let mut lp = LinearProgram::new(2);
    lp.objective = vec![1.0, 1.0];
    lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0);
    lp.add_constraint(vec![(0, 2.0), (1, 2.0)], Relation::Eq, 3.0);
    assert!(matches!(
        simplex_solve(&lp),
        Err(LpError::Infeasible { .. })
    ));
}

#[test]
#[ignore]
fn many_more_seeds() {
    for seed in 0..50 {
        for (k, lp) in random_lps(1000 + seed, 200).iter().enumerate() {
            let Some(best) = vertex_enumeration(lp) else {
                panic!("{lp:?} {:?}", simplex_solve(lp))
            };
            let sol = simplex_solve(lp).unwrap_or_else(|e| panic!("seed {seed} lp {k}: {e}"));
            assert!(
                (sol.objective - best).abs() < 1e-9,
                "seed {seed} lp {k}: {} vs {best}",
                sol.objective
            );
        }
    }
}
