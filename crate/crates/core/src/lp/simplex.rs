//! Two-phase dense tableau simplex.
//!
//! Pricing is Dantzig (most negative reduced cost). After a run of
//! degenerate pivots the solver switches to Bland's rule, which cannot
//! cycle, and returns to Dantzig once the objective moves again.
//!
//! Both phases run on a slightly perturbed right-hand side, which breaks
//! the heavy degeneracy of L1 fitting problems. The true right-hand side
//! is carried through the same row operations and restored at the end,
//! with dual simplex pivots to repair any infeasibility that leaves.

use super::{LinearProgram, LpError, LpSolution, Relation};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
/// Relative right-hand-side perturbation against degenerate stalling.
const PERTURBATION: f64 = 1e-9;
const NOISE_COST: f64 = 1e-8;
const DEGENERATE_STREAK: usize = 25;

/// How an original variable maps to standard-form columns.
#[derive(Clone, Copy)]
enum VarMap {
    Shifted { col: usize, lower: f64 },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    /// Perturbed right-hand side that drives pivoting.
    b: Vec<f64>,
    /// The true right-hand side under the same row operations.
    b0: Vec<f64>,
    basis: Vec<usize>,
    /// Active objective and its reduced costs.
    objective: Vec<f64>,
    cost: Vec<f64>,
    /// Current objective value of the active objective.
    value: f64,
    cost_scale: f64,
    enterable: Vec<bool>,
    iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
    Limit,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.cols + c]
    }

    /// Install objective `c` (one entry per column) as reduced costs w.r.t.
    /// the current basis.
    fn set_objective(&mut self, c: &[f64]) {
        self.objective = c.to_vec();
        self.cost = c.to_vec();
        self.cost_scale = c.iter().fold(1.0, |m, v| m.max(v.abs()));
        self.value = 0.0;
        for r in 0..self.rows {
            let cb = c[self.basis[r]];
            if cb != 0.0 {
                let row = &self.a[r * self.cols..(r + 1) * self.cols];
                for (d, a) in self.cost.iter_mut().zip(row) {
                    *d -= cb * a;
                }
                self.value += cb * self.b[r];
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let cols = self.cols;
        let inv = 1.0 / self.at(pr, pc);
        {
            let row = &mut self.a[pr * cols..(pr + 1) * cols];
            row.iter_mut().for_each(|v| *v *= inv);
            row[pc] = 1.0;
        }
        self.b[pr] *= inv;
        self.b0[pr] *= inv;
        let prow: Vec<f64> = self.a[pr * cols..(pr + 1) * cols].to_vec();
        let (pb, pb0) = (self.b[pr], self.b0[pr]);
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.a[r * cols + pc];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.a[r * cols..(r + 1) * cols];
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= f * p;
            }
            row[pc] = 0.0;
            self.b[r] -= f * pb;
            self.b0[r] -= f * pb0;
            if self.b0[r].abs() < 1e-13 {
                self.b0[r] = 0.0;
            }
        }
        let f = self.cost[pc];
        if f != 0.0 {
            for (d, p) in self.cost.iter_mut().zip(&prow) {
                *d -= f * p;
            }
            self.cost[pc] = 0.0;
            self.value += f * pb;
        }
        self.basis[pr] = pc;
        self.iterations += 1;
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let candidates = (0..self.cols).filter(|&j| self.enterable[j] && self.cost[j] < -COST_TOL);
        if bland {
            candidates.min()
        } else {
            candidates.min_by(|&i, &j| self.cost[i].total_cmp(&self.cost[j]))
        }
    }

    /// Minimum ratio test; ties go to the smallest basic column index.
    fn leaving(&self, pc: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, pc);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.b[r].max(0.0) / a;
            best = match best {
                None => Some((r, ratio)),
                Some((br, bratio)) => {
                    let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                    if (tie && self.basis[r] < self.basis[br]) || (!tie && ratio < bratio) {
                        Some((r, ratio))
                    } else {
                        Some((br, bratio))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    /// Drop the perturbation and repair any primal infeasibility it leaves
    /// with dual simplex pivots. Reduced costs must be dual feasible.
    fn restore_rhs(&mut self, max_iterations: usize) -> Result<(), LpError> {
        self.b.clone_from(&self.b0);
        let scale = self.b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        while let Some(pr) = (0..self.rows)
            .filter(|&r| self.b[r] < -1e-12 * scale)
            .min_by(|&i, &j| self.b[i].total_cmp(&self.b[j]))
        {
            if self.iterations >= max_iterations {
                return Err(LpError::IterationLimit {
                    iterations: self.iterations,
                    objective: self.value,
                });
            }
            let pc = (0..self.cols)
                .filter(|&j| self.enterable[j] && self.at(pr, j) < -PIVOT_TOL)
                .min_by(|&i, &j| {
                    let ri = self.cost[i].max(0.0) / -self.at(pr, i);
                    let rj = self.cost[j].max(0.0) / -self.at(pr, j);
                    ri.total_cmp(&rj).then(i.cmp(&j))
                })
                .ok_or(LpError::Infeasible {
                    phase_one_objective: -self.b[pr],
                })?;
            self.pivot(pr, pc);
        }
        for v in &mut self.b {
            *v = v.max(0.0);
        }
        self.b0.clone_from(&self.b);
        self.value = (0..self.rows)
            .map(|r| self.objective[self.basis[r]] * self.b[r])
            .sum();
        Ok(())
    }

    /// Shift every basic value up by a tiny row-dependent amount. Any such
    /// shift is the basic solution of some perturbed right-hand side.
    fn perturb(&mut self) {
        for r in 0..self.rows {
            // deterministic spread so that no two rows tie by accident
            let spread = 1.0 + (r as f64 * 0.618_033_988_749_895).fract();
            self.b[r] = self.b0[r] + PERTURBATION * spread * (1.0 + self.b0[r].abs());
        }
        self.value = (0..self.rows)
            .map(|r| self.objective[self.basis[r]] * self.b[r])
            .sum();
    }

    /// Optimise `c` from the current feasible basis: perturbed first, then
    /// on the true right-hand side.
    fn optimise(&mut self, c: &[f64], max_iterations: usize) -> Result<(), LpError> {
        self.set_objective(c);
        self.perturb();
        for restored in [false, true] {
            if restored {
                self.restore_rhs(max_iterations)?;
            }
            match self.run(max_iterations) {
                Outcome::Optimal => {}
                Outcome::Unbounded(c) => return Err(LpError::Unbounded { column: c }),
                Outcome::Limit => {
                    return Err(LpError::IterationLimit {
                        iterations: self.iterations,
                        objective: self.value,
                    })
                }
            }
        }
        Ok(())
    }

    fn run(&mut self, max_iterations: usize) -> Outcome {
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= max_iterations {
                return Outcome::Limit;
            }
            let Some(pc) = self.entering(degenerate >= DEGENERATE_STREAK) else {
                return Outcome::Optimal;
            };
            let Some(pr) = self.leaving(pc) else {
                // A ray whose reduced cost is rounding noise, e.g. the twin
                // of a basic split column, is not an unbounded direction.
                if self.cost[pc] > -NOISE_COST * self.cost_scale {
                    self.cost[pc] = 0.0;
                    continue;
                }
                return Outcome::Unbounded(pc);
            };
            let before = self.value;
            self.pivot(pr, pc);
            if (self.value - before).abs() <= 1e-14 * (1.0 + before.abs()) {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
        }
    }
}

pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;

    // Standard-form structural columns.
    let mut maps = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0;
    for lb in &lp.lower_bounds {
        maps.push(match lb {
            Some(lower) => {
                ncols += 1;
                VarMap::Shifted {
                    col: ncols - 1,
                    lower: *lower,
                }
            }
            None => {
                ncols += 2;
                VarMap::Split {
                    pos: ncols - 2,
                    neg: ncols - 1,
                }
            }
        });
    }
    let structural = ncols;

    // Rows with nonnegative right-hand sides.
    struct Row {
        coeffs: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    }
    let rows: Vec<Row> = lp
        .constraints
        .iter()
        .map(|c| {
            let mut rhs = c.rhs;
            let mut coeffs = Vec::with_capacity(c.terms.len() * 2);
            for &(j, a) in &c.terms {
                match maps[j] {
                    VarMap::Shifted { col, lower } => {
                        rhs -= a * lower;
                        coeffs.push((col, a));
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs.push((pos, a));
                        coeffs.push((neg, -a));
                    }
                }
            }
            let mut relation = c.relation;
            if rhs < 0.0 {
                rhs = -rhs;
                coeffs.iter_mut().for_each(|(_, a)| *a = -*a);
                relation = match relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            Row {
                coeffs,
                relation,
                rhs,
            }
        })
        .collect();

    let m = rows.len();
    // Crash basis: a structural column that appears in a single row with a
    // positive coefficient can start basic there instead of an artificial.
    let mut uses = vec![0usize; structural];
    for row in &rows {
        for &(c, a) in &row.coeffs {
            if a != 0.0 {
                uses[c] += 1;
            }
        }
    }
    let mut taken = vec![false; structural];
    let crash: Vec<Option<usize>> = rows
        .iter()
        .map(|row| {
            if row.relation == Relation::Le {
                return None;
            }
            let c = row
                .coeffs
                .iter()
                .find(|&&(c, a)| a > PIVOT_TOL && uses[c] == 1 && !taken[c])?
                .0;
            taken[c] = true;
            Some(c)
        })
        .collect();
    let slack_count = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let art_count = rows
        .iter()
        .zip(&crash)
        .filter(|(r, c)| r.relation != Relation::Le && c.is_none())
        .count();
    let cols = structural + slack_count + art_count;
    let mut t = Tableau {
        rows: m,
        cols,
        a: vec![0.0; m * cols],
        b: vec![0.0; m],
        b0: vec![0.0; m],
        basis: vec![0; m],
        objective: vec![0.0; cols],
        cost: vec![0.0; cols],
        value: 0.0,
        cost_scale: 1.0,
        enterable: vec![true; cols],
        iterations: 0,
    };
    let mut next_slack = structural;
    let mut next_art = structural + slack_count;
    let mut phase_one = vec![0.0; cols];
    for (r, row) in rows.iter().enumerate() {
        for &(c, a) in &row.coeffs {
            t.a[r * cols + c] += a;
        }
        t.b0[r] = row.rhs;
        t.b[r] = row.rhs;
        if row.relation != Relation::Eq {
            t.a[r * cols + next_slack] = if row.relation == Relation::Le {
                1.0
            } else {
                -1.0
            };
            if row.relation == Relation::Le {
                t.basis[r] = next_slack;
            }
            next_slack += 1;
        }
        if row.relation == Relation::Le {
            continue;
        }
        match crash[r] {
            Some(c) => {
                let inv = 1.0 / t.a[r * cols + c];
                t.a[r * cols..(r + 1) * cols]
                    .iter_mut()
                    .for_each(|v| *v *= inv);
                t.a[r * cols + c] = 1.0;
                t.b[r] *= inv;
                t.b0[r] *= inv;
                t.basis[r] = c;
            }
            None => {
                t.a[r * cols + next_art] = 1.0;
                t.basis[r] = next_art;
                phase_one[next_art] = 1.0;
                next_art += 1;
            }
        }
    }
    let is_art = |c: usize| c >= structural + slack_count;
    let max_iterations = 50 * (m + cols) + 1000;

    if art_count > 0 {
        t.optimise(&phase_one, max_iterations)?;
        let bscale = rows.iter().map(|r| r.rhs).fold(1.0, f64::max);
        if t.value > 1e-9 * bscale {
            return Err(LpError::Infeasible {
                phase_one_objective: t.value,
            });
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if !is_art(t.basis[r]) {
                continue;
            }
            if let Some(c) = (0..structural + slack_count)
                .filter(|&c| t.at(r, c).abs() > PIVOT_TOL)
                .max_by(|&i, &j| t.at(r, i).abs().total_cmp(&t.at(r, j).abs()))
            {
                t.pivot(r, c);
            }
        }
        for c in structural + slack_count..cols {
            t.enterable[c] = false;
        }
    }

    let mut phase_two = vec![0.0; cols];
    for (j, map) in maps.iter().enumerate() {
        match *map {
            VarMap::Shifted { col, .. } => phase_two[col] = lp.objective[j],
            VarMap::Split { pos, neg } => {
                phase_two[pos] = lp.objective[j];
                phase_two[neg] = -lp.objective[j];
            }
        }
    }
    t.optimise(&phase_two, max_iterations)?;

    let mut std_x = vec![0.0; cols];
    for r in 0..m {
        std_x[t.basis[r]] = t.b0[r].max(0.0);
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shifted { col, lower } => lower + std_x[col],
            VarMap::Split { pos, neg } => std_x[pos] - std_x[neg],
        })
        .collect();
    Ok(LpSolution {
        objective: lp.objective_value(&x),
        x,
        iterations: t.iterations,
    })
}
