//! L1-optimal C1 cubic spline.
//!
//! For fixed knot values the second derivative of the Hermite cubic is
//! affine in the slopes, so minimising a quadrature of `|p''|` is a linear
//! program: one epigraph variable `e >= |p''(u)|` per sample point.
//!
//! With free boundary slopes the optimum can overshoot next to the ends
//! (step data `0,0,0,1,1` is an example), so natural ends `p'' = 0` are
//! imposed by default.

use crate::error::{Error, Result};
use crate::interpolation::{divided_differences, SlopeVector};
use crate::lp::{simplex_solve, LinearProgram, Relation};
use crate::pp::check_increasing;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LaveryBoundary {
    /// `p'' = 0` at both ends, as equality rows of the program.
    #[default]
    Natural,
    /// End slopes left to the optimiser.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaverySpec {
    samples_per_interval: usize,
    boundary: LaveryBoundary,
}

impl LaverySpec {
    pub fn new(samples_per_interval: usize) -> Result<Self> {
        if samples_per_interval < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples per interval, got {samples_per_interval}"
            )));
        }
        Ok(LaverySpec {
            samples_per_interval,
            boundary: LaveryBoundary::Natural,
        })
    }

    pub fn with_boundary(self, boundary: LaveryBoundary) -> Self {
        LaverySpec { boundary, ..self }
    }

    pub fn boundary(&self) -> LaveryBoundary {
        self.boundary
    }

    pub fn samples_per_interval(&self) -> usize {
        self.samples_per_interval
    }
}

impl Default for LaverySpec {
    fn default() -> Self {
        LaverySpec {
            samples_per_interval: 17,
            boundary: LaveryBoundary::Natural,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LaveryFit {
    pub slopes: SlopeVector,
    /// Discretised `\int |p''|` reported by the solver.
    pub objective: f64,
    pub iterations: usize,
}

/// Sample offset `xi in [0, 1]` and trapezoid weight (per unit interval length).
///
/// An odd count samples the midpoint, where `p''` changes sign whenever
/// both end slopes are equal; with an even count the rule overstates
/// `|p''|` there and biases the optimum away from such pieces.
fn samples(m: usize) -> impl Iterator<Item = (f64, f64)> {
    let step = 1.0 / (m - 1) as f64;
    (0..m).map(move |k| {
        let w = if k == 0 || k == m - 1 {
            0.5 * step
        } else {
            step
        };
        (k as f64 * step, w)
    })
}

/// `p''` on an interval of length `h` at fraction `xi`, as
/// `alpha + beta_l s_l + beta_r s_r`.
fn second_derivative_form(h: f64, d: f64, xi: f64) -> (f64, f64, f64) {
    (
        6.0 * d * (1.0 - 2.0 * xi) / h,
        (6.0 * xi - 4.0) / h,
        (6.0 * xi - 2.0) / h,
    )
}

/// Discretised L1 norm of `p''` for the Hermite spline with slopes `s`.
pub fn lavery_objective(times: &[f64], z: &[f64], s: &[f64], spec: LaverySpec) -> f64 {
    let d = divided_differences(times, z);
    let m = spec.samples_per_interval;
    d.iter()
        .enumerate()
        .map(|(i, &di)| {
            let h = times[i + 1] - times[i];
            samples(m)
                .map(|(xi, w)| {
                    let (a, bl, br) = second_derivative_form(h, di, xi);
                    w * h * (a + bl * s[i] + br * s[i + 1]).abs()
                })
                .sum::<f64>()
        })
        .sum()
}

/// The linear program whose first `n + 1` variables are the knot slopes.
pub fn lavery_program(times: &[f64], z: &[f64], spec: LaverySpec) -> Result<LinearProgram> {
    if times.len() < 2 {
        return Err(Error::TooFewKnots {
            need: 2,
            got: times.len(),
        });
    }
    if z.len() != times.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            got: z.len(),
        });
    }
    check_increasing(times)?;
    let d = divided_differences(times, z);
    let n = d.len();
    let m = spec.samples_per_interval;
    // h * p''(u_k) = pos_k - neg_k with both parts nonnegative
    let mut lp = LinearProgram::new(n + 1 + 2 * n * m);
    for i in 0..n {
        let h = times[i + 1] - times[i];
        for (k, (xi, w)) in samples(m).enumerate() {
            let pos = n + 1 + 2 * (i * m + k);
            let neg = pos + 1;
            lp.objective[pos] = w;
            lp.objective[neg] = w;
            lp.lower_bounds[pos] = Some(0.0);
            lp.lower_bounds[neg] = Some(0.0);
            let (a, bl, br) = second_derivative_form(h, d[i], xi);
            lp.add_constraint(
                vec![(pos, 1.0), (neg, -1.0), (i, -bl * h), (i + 1, -br * h)],
                Relation::Eq,
                a * h,
            );
        }
    }
    if spec.boundary == LaveryBoundary::Natural {
        let (a, bl, br) = second_derivative_form(1.0, d[0], 0.0);
        lp.add_constraint(vec![(0, bl), (1, br)], Relation::Eq, -a);
        let (a, bl, br) = second_derivative_form(1.0, d[n - 1], 1.0);
        lp.add_constraint(vec![(n - 1, bl), (n, br)], Relation::Eq, -a);
    }
    Ok(lp)
}

pub fn lavery_fit(times: &[f64], z: &[f64], spec: LaverySpec) -> Result<LaveryFit> {
    let lp = lavery_program(times, z, spec)?;
    let sol = simplex_solve(&lp)?;
    let slopes = SlopeVector::new(sol.x[..times.len()].to_vec())?;
    Ok(LaveryFit {
        slopes,
        objective: sol.objective,
        iterations: sol.iterations,
    })
}

pub fn lavery_slopes(times: &[f64], z: &[f64], spec: LaverySpec) -> Result<SlopeVector> {
    Ok(lavery_fit(times, z, spec)?.slopes)
}
