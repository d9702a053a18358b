//! Global calibration of log-discount knot values to market quotes.

mod lm;

use chrono::NaiveDate;

pub use lm::{fd_jacobian, levenberg_marquardt, LmOptions, LmReport, StopReason};

use crate::curve::{CurveScheme, DateGrid, DiscountCurve, ZeroCurve};
use crate::error::{Error, Result};
use crate::forward::ForwardSplineCurve;
use crate::instruments::{par_rate, Quote};

/// Quotes, interpolation scheme and the knot grid they induce: `t = 0`
/// plus one knot per instrument pillar date.
#[derive(Debug, Clone)]
pub struct CalibrationProblem {
    valuation_date: NaiveDate,
    quotes: Vec<Quote>,
    scheme: CurveScheme,
    grid: DateGrid,
}

impl CalibrationProblem {
    pub fn new(valuation_date: NaiveDate, quotes: Vec<Quote>, scheme: CurveScheme) -> Result<Self> {
        if quotes.is_empty() {
            return Err(Error::InvalidProblem("no quotes".into()));
        }
        for q in &quotes {
            q.instrument.validate(valuation_date)?;
        }
        if let Some(w) = quotes
            .windows(2)
            .find(|w| w[1].instrument.pillar_date() <= w[0].instrument.pillar_date())
        {
            return Err(Error::InvalidProblem(format!(
                "quotes must be sorted by strictly increasing maturity ({} then {})",
                w[0].instrument.pillar_date(),
                w[1].instrument.pillar_date()
            )));
        }
        let dates: Vec<NaiveDate> = quotes.iter().map(|q| q.instrument.pillar_date()).collect();
        let grid = DateGrid::from_dates(valuation_date, &dates)?;
        Ok(CalibrationProblem {
            valuation_date,
            quotes,
            scheme,
            grid,
        })
    }

    pub fn valuation_date(&self) -> NaiveDate {
        self.valuation_date
    }

    pub fn quotes(&self) -> &[Quote] {
        &self.quotes
    }

    pub fn scheme(&self) -> CurveScheme {
        self.scheme
    }

    /// Pillar times, without the origin.
    pub fn grid(&self) -> &DateGrid {
        &self.grid
    }

    pub fn with_scheme(&self, scheme: CurveScheme) -> Self {
        CalibrationProblem {
            scheme,
            ..self.clone()
        }
    }

    /// Candidate curve for knot values `z` (one per quote).
    pub fn model_curve(&self, z: &[f64]) -> Result<ModelCurve> {
        match self.scheme {
            CurveScheme::Spline(_) => Ok(ModelCurve::Zero(ZeroCurve::new(
                self.grid.clone(),
                z.to_vec(),
                self.scheme,
            )?)),
            CurveScheme::Forward(kind) => Ok(ModelCurve::Forward(
                ForwardSplineCurve::from_log_discounts(self.grid.clone(), z.to_vec(), kind)?,
            )),
        }
    }

    /// Flat curve at `rate`.
    pub fn flat_guess(&self, rate: f64) -> Vec<f64> {
        self.grid.times().iter().map(|t| -rate * t).collect()
    }
}

/// Pricing curve of a calibration: log-discount spline, or forward-space
/// quadratic priced directly.
#[derive(Debug, Clone)]
pub enum ModelCurve {
    Zero(ZeroCurve),
    Forward(ForwardSplineCurve),
}

impl ModelCurve {
    pub fn into_zero_curve(self) -> Result<ZeroCurve> {
        match self {
            ModelCurve::Zero(c) => Ok(c),
            ModelCurve::Forward(c) => c.to_zero_curve(),
        }
    }
}

impl DiscountCurve for ModelCurve {
    fn valuation_date(&self) -> NaiveDate {
        match self {
            ModelCurve::Zero(c) => c.valuation_date(),
            ModelCurve::Forward(c) => c.valuation_date(),
        }
    }

    fn log_discount(&self, t: f64) -> Result<f64> {
        match self {
            ModelCurve::Zero(c) => c.log_discount(t),
            ModelCurve::Forward(c) => c.log_discount(t),
        }
    }
}

/// Model par rate minus quoted rate, per quote.
pub fn residuals(z: &[f64], problem: &CalibrationProblem) -> Result<Vec<f64>> {
    if z.len() != problem.quotes.len() {
        return Err(Error::LengthMismatch {
            expected: problem.quotes.len(),
            got: z.len(),
        });
    }
    if let Some(index) = z.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteResidual { index });
    }
    let curve = problem.model_curve(z)?;
    pricing_residuals(&curve, &problem.quotes)
}

/// Par rate gaps of `quotes` on any curve.
pub fn pricing_residuals<C: DiscountCurve + ?Sized>(
    curve: &C,
    quotes: &[Quote],
) -> Result<Vec<f64>> {
    quotes
        .iter()
        .enumerate()
        .map(|(index, q)| {
            let r = par_rate(curve, &q.instrument)? - q.par_rate;
            if r.is_finite() {
                Ok(r)
            } else {
                Err(Error::NonFiniteResidual { index })
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CalibrationOptions {
    pub lm: LmOptions,
    /// The Lavery scheme solves a linear program per residual evaluation.
    pub allow_lavery: bool,
    /// Flat starting rate; defaults to the first quote.
    pub initial_rate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub curve: ZeroCurve,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
}

impl CalibrationResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

pub fn calibrate(
    problem: &CalibrationProblem,
    opts: &CalibrationOptions,
) -> Result<CalibrationResult> {
    if problem.scheme.is_lavery() && !opts.allow_lavery {
        return Err(Error::SchemeNotAllowed(
            "lavery in calibration (enable allow_lavery)".into(),
        ));
    }
    let rate = opts.initial_rate.unwrap_or(problem.quotes[0].par_rate);
    let x0 = problem.flat_guess(rate);
    let rep = levenberg_marquardt(|z: &[f64]| residuals(z, problem), &x0, &opts.lm)?;
    let curve = problem.model_curve(&rep.x)?.into_zero_curve()?;
    Ok(CalibrationResult {
        curve,
        residuals: rep.residuals,
        iterations: rep.iterations,
        converged: rep.converged,
        stop: rep.stop,
    })
}
