//! Log-discount curves and the accessor algebra between discount factors,
//! zero rates, and instantaneous and discrete forwards.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::dates::year_fraction;
use crate::error::{Error, Result};
use crate::forward::{ForwardKind, ForwardSplineCurve};
use crate::interpolation::{interpolate, SlopeScheme};
use crate::lavery::LaverySpec;
use crate::pp::{check_increasing, PiecewiseCubic};

/// Knot times in years (ACT/365-fixed) from a valuation date.
#[derive(Debug, Clone, PartialEq)]
pub struct DateGrid {
    valuation_date: NaiveDate,
    times: Vec<f64>,
}

impl DateGrid {
    pub fn new(valuation_date: NaiveDate, times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::TooFewKnots { need: 1, got: 0 });
        }
        check_increasing(&times)?;
        if times[0] < 0.0 {
            return Err(Error::NegativeTime(times[0]));
        }
        Ok(DateGrid {
            valuation_date,
            times,
        })
    }

    pub fn from_dates(valuation_date: NaiveDate, dates: &[NaiveDate]) -> Result<Self> {
        let times = dates
            .iter()
            .map(|&d| year_fraction(valuation_date, d))
            .collect::<Result<Vec<_>>>()?;
        DateGrid::new(valuation_date, times)
    }

    pub fn valuation_date(&self) -> NaiveDate {
        self.valuation_date
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Prepend `t = 0` with log-discount 0 unless it is already the first
    /// knot, in which case the value there must be 0.
    pub(crate) fn with_origin(self, z: Vec<f64>) -> Result<(DateGrid, Vec<f64>)> {
        if z.len() != self.times.len() {
            return Err(Error::LengthMismatch {
                expected: self.times.len(),
                got: z.len(),
            });
        }
        if self.times[0] == 0.0 {
            if z[0] != 0.0 {
                return Err(Error::InvalidGrid(format!(
                    "log-discount at t = 0 must be 0, got {}",
                    z[0]
                )));
            }
            return Ok((self, z));
        }
        let mut times = Vec::with_capacity(self.times.len() + 1);
        times.push(0.0);
        times.extend_from_slice(&self.times);
        let mut zz = Vec::with_capacity(z.len() + 1);
        zz.push(0.0);
        zz.extend(z);
        Ok((
            DateGrid {
                valuation_date: self.valuation_date,
                times,
            },
            zz,
        ))
    }
}

/// Interpolation scheme of a curve: a slope rule for the log-discount
/// spline, or a direct forward-space construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveScheme {
    Spline(SlopeScheme),
    Forward(ForwardKind),
}

impl CurveScheme {
    pub const ALL_NAMES: [&'static str; 8] = [
        "bessel",
        "c2",
        "smart-quad",
        "area-preserving",
        "harmonic",
        "rational",
        "van-albada",
        "lavery",
    ];

    pub fn is_lavery(&self) -> bool {
        matches!(self, CurveScheme::Spline(SlopeScheme::Lavery(_)))
    }
}

impl fmt::Display for CurveScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CurveScheme::Spline(SlopeScheme::Bessel) => "bessel",
            CurveScheme::Spline(SlopeScheme::C2Natural) => "c2",
            CurveScheme::Spline(SlopeScheme::Harmonic) => "harmonic",
            CurveScheme::Spline(SlopeScheme::RationalLimiter) => "rational",
            CurveScheme::Spline(SlopeScheme::VanAlbada) => "van-albada",
            CurveScheme::Spline(SlopeScheme::Lavery(_)) => "lavery",
            CurveScheme::Forward(ForwardKind::SmartQuadratic) => "smart-quad",
            CurveScheme::Forward(ForwardKind::AreaPreserving) => "area-preserving",
        };
        f.write_str(name)
    }
}

impl FromStr for CurveScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bessel" => CurveScheme::Spline(SlopeScheme::Bessel),
            "c2" => CurveScheme::Spline(SlopeScheme::C2Natural),
            "harmonic" => CurveScheme::Spline(SlopeScheme::Harmonic),
            "rational" => CurveScheme::Spline(SlopeScheme::RationalLimiter),
            "van-albada" => CurveScheme::Spline(SlopeScheme::VanAlbada),
            "lavery" => CurveScheme::Spline(SlopeScheme::Lavery(LaverySpec::default())),
            "smart-quad" => CurveScheme::Forward(ForwardKind::SmartQuadratic),
            "area-preserving" => CurveScheme::Forward(ForwardKind::AreaPreserving),
            other => return Err(Error::UnknownScheme(other.to_string())),
        })
    }
}

/// Anything that can produce discount factors on curve time.
pub trait DiscountCurve {
    fn valuation_date(&self) -> NaiveDate;

    /// `ln P(t)`.
    fn log_discount(&self, t: f64) -> Result<f64>;

    fn discount(&self, t: f64) -> Result<f64> {
        Ok(self.log_discount(t)?.exp())
    }

    fn time_of(&self, date: NaiveDate) -> Result<f64> {
        year_fraction(self.valuation_date(), date)
    }

    fn discount_on(&self, date: NaiveDate) -> Result<f64> {
        self.discount(self.time_of(date)?)
    }
}

/// Continuously compounded forward over `[u, v]`.
pub fn discrete_forward_cc<C: DiscountCurve + ?Sized>(curve: &C, u: f64, v: f64) -> Result<f64> {
    if !(u < v) {
        return Err(Error::InvalidPeriod { start: u, end: v });
    }
    Ok(-(curve.log_discount(v)? - curve.log_discount(u)?) / (v - u))
}

/// Simply compounded forward over `[u, v]` with accrual `accrual`.
pub fn discrete_forward_simple<C: DiscountCurve + ?Sized>(
    curve: &C,
    u: f64,
    v: f64,
    accrual: f64,
) -> Result<f64> {
    if !(u < v) {
        return Err(Error::InvalidPeriod { start: u, end: v });
    }
    if !(accrual > 0.0) {
        return Err(Error::InvalidAccrual(accrual));
    }
    Ok((curve.discount(u)? / curve.discount(v)? - 1.0) / accrual)
}

/// Point sample of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub discount: f64,
    pub zero: f64,
    pub inst_forward: f64,
    pub second_deriv_forward: f64,
}

/// Piecewise cubic interpolation of `z(t) = ln P(t)`, with `t = 0` as first
/// knot and linear extrapolation of `z` beyond the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCurve {
    grid: DateGrid,
    z: Vec<f64>,
    pp: PiecewiseCubic,
    scheme: CurveScheme,
}

impl ZeroCurve {
    pub fn new(grid: DateGrid, z: Vec<f64>, scheme: CurveScheme) -> Result<Self> {
        let (grid, z) = grid.with_origin(z)?;
        let pp = match scheme {
            CurveScheme::Spline(slopes) => interpolate(slopes, grid.times(), &z)?,
            CurveScheme::Forward(kind) => {
                ForwardSplineCurve::from_log_discounts(grid.clone(), z.clone(), kind)?
                    .log_discount_pp()?
            }
        };
        Ok(ZeroCurve {
            grid,
            z,
            pp,
            scheme,
        })
    }

    /// Assemble from an already-built spline; `pp` must interpolate `z`.
    pub fn from_parts(
        grid: DateGrid,
        z: Vec<f64>,
        pp: PiecewiseCubic,
        scheme: CurveScheme,
    ) -> Result<Self> {
        let (grid, z) = grid.with_origin(z)?;
        if pp.knots() != grid.times() {
            return Err(Error::InvalidGrid(
                "spline knots differ from curve grid".into(),
            ));
        }
        Ok(ZeroCurve {
            grid,
            z,
            pp,
            scheme,
        })
    }

    pub fn grid(&self) -> &DateGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    /// Log-discount values at the knots.
    pub fn knot_values(&self) -> &[f64] {
        &self.z
    }

    pub fn pp(&self) -> &PiecewiseCubic {
        &self.pp
    }

    pub fn scheme(&self) -> CurveScheme {
        self.scheme
    }

    fn last_time(&self) -> f64 {
        self.pp.end()
    }

    /// Slope of `z` used for extrapolation beyond the last knot.
    pub fn end_slope(&self) -> f64 {
        let last = self.pp.num_pieces() - 1;
        self.pp.piece_derivative(last, self.last_time(), 1)
    }

    fn check_time(t: f64) -> Result<()> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        Ok(())
    }

    /// `order`-th derivative of `z` at `t` (right limit at knots).
    pub fn z_derivative(&self, t: f64, order: u8) -> Result<f64> {
        Self::check_time(t)?;
        let tn = self.last_time();
        if t >= tn {
            return Ok(match order {
                0 => self.z[self.z.len() - 1] + self.end_slope() * (t - tn),
                1 => self.end_slope(),
                _ => 0.0,
            });
        }
        Ok(self.pp.derivative(t, order))
    }

    pub fn instantaneous_forward(&self, t: f64) -> Result<f64> {
        Ok(-self.z_derivative(t, 1)?)
    }

    pub fn zero_rate(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return self.instantaneous_forward(0.0);
        }
        Ok(-self.log_discount(t)? / t)
    }

    pub fn discrete_forward_cc(&self, u: f64, v: f64) -> Result<f64> {
        discrete_forward_cc(self, u, v)
    }

    pub fn discrete_forward_simple(&self, u: f64, v: f64, accrual: f64) -> Result<f64> {
        discrete_forward_simple(self, u, v, accrual)
    }

    pub fn sample(&self, t: f64) -> Result<CurveSample> {
        let z = self.z_derivative(t, 0)?;
        Ok(CurveSample {
            t,
            discount: z.exp(),
            zero: self.zero_rate(t)?,
            inst_forward: -self.z_derivative(t, 1)?,
            second_deriv_forward: -self.z_derivative(t, 3)?,
        })
    }
}

impl DiscountCurve for ZeroCurve {
    fn valuation_date(&self) -> NaiveDate {
        self.grid.valuation_date()
    }

    fn log_discount(&self, t: f64) -> Result<f64> {
        self.z_derivative(t, 0)
    }
}
