//! Helpers shared by the integration test targets.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yieldcurve::lp::{LinearProgram, Relation};

/// A random feasible and bounded LP with at most `max_vars` variables and
/// `max_rows` constraints. Every variable is bounded below, either by its
/// own lower bound or by an explicit row, and one row caps their sum.
pub fn random_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> LinearProgram {
    let n = rng.random_range(1..=max_vars);
    let mut lp = LinearProgram::new(n);
    let mut lower = vec![0.0; n];
    for j in 0..n {
        lp.objective[j] = round2(rng.random_range(-1.0..1.0));
        lower[j] = round2(rng.random_range(-2.0..0.5));
    }
    // an interior point keeps every row satisfiable
    let inner: Vec<f64> = lower
        .iter()
        .map(|l| l + rng.random_range(0.1..1.0))
        .collect();
    let cap = inner.iter().sum::<f64>() + rng.random_range(0.5..3.0);
    lp.add_constraint((0..n).map(|j| (j, 1.0)).collect(), Relation::Le, cap);
    let mut rows_left = max_rows.min(rng.random_range(1..=max_rows)) - 1;
    for j in 0..n {
        if rows_left > 0 && rng.random_bool(0.3) {
            lp.add_constraint(vec![(j, 1.0)], Relation::Ge, lower[j]);
            rows_left -= 1;
        } else {
            lp.lower_bounds[j] = Some(lower[j]);
        }
    }
    for _ in 0..rows_left {
        let mut terms = Vec::new();
        for j in 0..n {
            let a = round2(rng.random_range(-1.0..1.0));
            if a != 0.0 && rng.random_bool(0.7) {
                terms.push((j, a));
            }
        }
        if terms.is_empty() {
            terms.push((rng.random_range(0..n), 1.0));
        }
        let at: f64 = terms.iter().map(|&(j, a)| a * inner[j]).sum();
        let slack = rng.random_range(0.0..1.0);
        match rng.random_range(0..5) {
            0 => lp.add_constraint(terms, Relation::Eq, at),
            1 | 2 => lp.add_constraint(terms, Relation::Le, at + slack),
            _ => lp.add_constraint(terms, Relation::Ge, at - slack),
        }
    }
    lp
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn random_lps(seed: u64, count: usize) -> Vec<LinearProgram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_lp(&mut rng, 8, 8)).collect()
}

/// Every constraint and bound as a hyperplane `a.x = b`.
fn hyperplanes(lp: &LinearProgram) -> Vec<(Vec<f64>, f64)> {
    let n = lp.num_vars();
    let mut planes = Vec::new();
    for c in &lp.constraints {
        let mut a = vec![0.0; n];
        for &(j, v) in &c.terms {
            a[j] += v;
        }
        planes.push((a, c.rhs));
    }
    for (j, l) in lp.lower_bounds.iter().enumerate() {
        if let Some(l) = l {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            planes.push((a, *l));
        }
    }
    planes
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

fn next_combination(idx: &mut [usize], total: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < total - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimum of the objective over all feasible vertices, or `None` if no
/// vertex is feasible. Only meaningful for bounded problems. A vertex is
/// any feasible point where `n` independent constraints are tight.
pub fn vertex_enumeration(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars();
    let planes = hyperplanes(lp);
    if planes.len() < n {
        return None;
    }
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if lp.max_violation(&x) < 1e-9 {
                let v = lp.objective_value(&x);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        if !next_combination(&mut idx, planes.len()) {
            return best;
        }
    }
}
