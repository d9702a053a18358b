//! Small dense linear programs.

mod simplex;

use thiserror::Error;

pub use simplex::simplex_solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse row: `(variable index, coefficient)`.
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min c.x` subject to sparse constraints. Variables are free unless a
/// lower bound is set.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("problem is infeasible (phase one objective {phase_one_objective:e})")]
    Infeasible { phase_one_objective: f64 },
    #[error("problem is unbounded along variable column {column}")]
    Unbounded { column: usize },
    #[error("no optimum after {iterations} pivots (objective {objective:e})")]
    IterationLimit { iterations: usize, objective: f64 },
    #[error("malformed problem: {0}")]
    Malformed(String),
}

impl LinearProgram {
    /// All variables free, zero objective, no constraints.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            lower_bounds: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower_bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} lower bounds for {n} variables",
                self.lower_bounds.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite())
            || self.lower_bounds.iter().flatten().any(|l| !l.is_finite())
        {
            return Err(LpError::Malformed("non-finite objective or bound".into()));
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() || c.terms.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
                return Err(LpError::Malformed(format!("bad constraint row {r}")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| {
            let lhs: f64 = c.terms.iter().map(|&(j, a)| a * x[j]).sum();
            match c.relation {
                Relation::Le => (lhs - c.rhs).max(0.0),
                Relation::Ge => (c.rhs - lhs).max(0.0),
                Relation::Eq => (lhs - c.rhs).abs(),
            }
        });
        let bounds = self
            .lower_bounds
            .iter()
            .zip(x)
            .map(|(l, v)| l.map_or(0.0, |l| (l - v).max(0.0)));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}
