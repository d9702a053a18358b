//! Overnight-index instruments: deposits, Fed fund futures and compounded
//! OIS swaps, priced off any [`DiscountCurve`].

use chrono::NaiveDate;

use crate::curve::DiscountCurve;
use crate::dates::{
    act360, add_business_days, add_years, is_business_day, modified_following, next_business_day,
    SPOT_LAG_DAYS,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instrument {
    /// Single-period OIS from the valuation date.
    OvernightDeposit { maturity: NaiveDate },
    /// Arithmetic average of the overnight rate over `[start, end)`.
    FedFundFuture { start: NaiveDate, end: NaiveDate },
    /// Spot-starting swap with annual compounded coupons.
    OisSwap { maturity: NaiveDate },
}

impl Instrument {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Instrument::OvernightDeposit { .. } => "ois_deposit",
            Instrument::FedFundFuture { .. } => "ff_future",
            Instrument::OisSwap { .. } => "ois_swap",
        }
    }

    /// Last date the instrument depends on; used as a curve knot.
    pub fn pillar_date(&self) -> NaiveDate {
        match *self {
            Instrument::OvernightDeposit { maturity } | Instrument::OisSwap { maturity } => {
                maturity
            }
            Instrument::FedFundFuture { end, .. } => end,
        }
    }

    pub fn validate(&self, valuation: NaiveDate) -> Result<()> {
        match *self {
            Instrument::OvernightDeposit { maturity } | Instrument::OisSwap { maturity } => {
                if maturity <= valuation {
                    return Err(Error::DateBeforeValuation {
                        valuation,
                        date: maturity,
                    });
                }
            }
            Instrument::FedFundFuture { start, end } => {
                if start < valuation {
                    return Err(Error::DateBeforeValuation {
                        valuation,
                        date: start,
                    });
                }
                if end <= start {
                    return Err(Error::InvalidInstrument(format!(
                        "future ends {end} before it starts {start}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quote {
    pub instrument: Instrument,
    pub par_rate: f64,
}

impl Quote {
    pub fn new(instrument: Instrument, par_rate: f64) -> Result<Self> {
        if !par_rate.is_finite() {
            return Err(Error::InvalidInstrument(format!(
                "non-finite par rate {par_rate}"
            )));
        }
        Ok(Quote {
            instrument,
            par_rate,
        })
    }
}

/// Business days `t_j` of a period and their ACT/360 accruals `delta_j`,
/// each running to the next business day (or the period end).
#[derive(Debug, Clone, PartialEq)]
pub struct AccrualSchedule {
    dates: Vec<NaiveDate>,
    accruals: Vec<f64>,
    end: NaiveDate,
}

impl AccrualSchedule {
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn accruals(&self) -> &[f64] {
        &self.accruals
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn total_accrual(&self) -> f64 {
        self.accruals.iter().sum()
    }

    /// Date ending accrual period `j`.
    fn period_end(&self, j: usize) -> NaiveDate {
        self.dates.get(j + 1).copied().unwrap_or(self.end)
    }
}

/// All Monday to Friday dates in `[start, end)`.
pub fn business_day_schedule(start: NaiveDate, end: NaiveDate) -> Result<AccrualSchedule> {
    if start >= end {
        return Err(Error::InvalidInstrument(format!(
            "schedule start {start} not before end {end}"
        )));
    }
    let mut dates = Vec::new();
    let mut d = if is_business_day(start) {
        start
    } else {
        next_business_day(start)
    };
    while d < end {
        dates.push(d);
        d = next_business_day(d);
    }
    if dates.is_empty() {
        return Err(Error::EmptySchedule { start, end });
    }
    let accruals = (0..dates.len())
        .map(|j| {
            act360(
                dates[j],
                dates
                    .get(j + 1)
                    .copied()
                    .unwrap_or(end)
                    .min(next_business_day(dates[j])),
            )
        })
        .collect();
    Ok(AccrualSchedule {
        dates,
        accruals,
        end,
    })
}

/// Compounded growth factor `prod_j (1 + r_j delta_j) = P(t_1) / P(t_end)`,
/// using the telescoped form.
pub fn ois_compounded_coupon_rate<C: DiscountCurve + ?Sized>(
    curve: &C,
    sched: &AccrualSchedule,
) -> Result<f64> {
    let first = *sched.dates.first().ok_or(Error::EmptySchedule {
        start: sched.end,
        end: sched.end,
    })?;
    Ok(curve.discount_on(first)? / curve.discount_on(sched.end)?)
}

/// Same factor as the explicit product over overnight periods.
pub fn ois_compounded_product<C: DiscountCurve + ?Sized>(
    curve: &C,
    sched: &AccrualSchedule,
) -> Result<f64> {
    if sched.is_empty() {
        return Err(Error::EmptySchedule {
            start: sched.end,
            end: sched.end,
        });
    }
    (0..sched.len()).try_fold(1.0, |acc, j| {
        Ok(acc * curve.discount_on(sched.dates[j])? / curve.discount_on(sched.period_end(j))?)
    })
}

/// Arithmetic average overnight rate `R` of a futures period.
pub fn fed_fund_future_rate<C: DiscountCurve + ?Sized>(
    curve: &C,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<f64> {
    let sched = business_day_schedule(start, end)?;
    let mut sum = 0.0;
    for j in 0..sched.len() {
        sum += curve.discount_on(sched.dates[j])? / curve.discount_on(sched.period_end(j))? - 1.0;
    }
    Ok(sum / sched.total_accrual())
}

/// Futures price quoted as `100 (1 - R)`.
pub fn future_price(rate: f64) -> f64 {
    100.0 * (1.0 - rate)
}

pub fn future_rate_from_price(price: f64) -> f64 {
    1.0 - price / 100.0
}

pub fn deposit_par_rate<C: DiscountCurve + ?Sized>(curve: &C, maturity: NaiveDate) -> Result<f64> {
    let start = curve.valuation_date();
    Ok((curve.discount_on(start)? / curve.discount_on(maturity)? - 1.0) / act360(start, maturity))
}

/// PV per unit notional of receiving the floating leg and paying `rate`.
pub fn price_overnight_deposit<C: DiscountCurve + ?Sized>(
    curve: &C,
    maturity: NaiveDate,
    rate: f64,
) -> Result<f64> {
    let start = curve.valuation_date();
    Ok(curve.discount_on(start)? / curve.discount_on(maturity)?
        - 1.0
        - rate * act360(start, maturity))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupon {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub accrual: f64,
}

/// Annual coupon periods of a spot-starting swap. Period ends are the
/// start anniversaries, modified following, with the last one at
/// `maturity`; up to one year gives a single coupon.
pub fn ois_swap_coupons(valuation: NaiveDate, maturity: NaiveDate) -> Result<Vec<Coupon>> {
    let start = add_business_days(valuation, SPOT_LAG_DAYS);
    if maturity <= start {
        return Err(Error::InvalidInstrument(format!(
            "swap maturity {maturity} not after spot {start}"
        )));
    }
    let years = ((maturity - start).num_days() as f64 / 365.25).round() as u32;
    let mut ends: Vec<NaiveDate> = (1..years)
        .map(|k| modified_following(add_years(start, k)))
        .take_while(|&d| d < maturity)
        .collect();
    ends.push(maturity);
    let mut prev = start;
    Ok(ends
        .into_iter()
        .map(|end| {
            let c = Coupon {
                start: prev,
                end,
                accrual: act360(prev, end),
            };
            prev = end;
            c
        })
        .collect())
}

/// `sum_c P(s_c) - P(e_c)` and the annuity `sum_c delta_c P(e_c)`.
fn swap_legs<C: DiscountCurve + ?Sized>(curve: &C, maturity: NaiveDate) -> Result<(f64, f64)> {
    let coupons = ois_swap_coupons(curve.valuation_date(), maturity)?;
    let mut float = 0.0;
    let mut annuity = 0.0;
    for c in &coupons {
        let pe = curve.discount_on(c.end)?;
        float += curve.discount_on(c.start)? - pe;
        annuity += c.accrual * pe;
    }
    Ok((float, annuity))
}

pub fn price_ois_swap<C: DiscountCurve + ?Sized>(
    curve: &C,
    maturity: NaiveDate,
    rate: f64,
) -> Result<f64> {
    let (float, annuity) = swap_legs(curve, maturity)?;
    Ok(float - rate * annuity)
}

pub fn ois_swap_par_rate<C: DiscountCurve + ?Sized>(curve: &C, maturity: NaiveDate) -> Result<f64> {
    let (float, annuity) = swap_legs(curve, maturity)?;
    Ok(float / annuity)
}

/// Curve-implied par rate of an instrument, in the units of its quote.
pub fn par_rate<C: DiscountCurve + ?Sized>(curve: &C, instrument: &Instrument) -> Result<f64> {
    match *instrument {
        Instrument::OvernightDeposit { maturity } => deposit_par_rate(curve, maturity),
        Instrument::FedFundFuture { start, end } => fed_fund_future_rate(curve, start, end),
        Instrument::OisSwap { maturity } => ois_swap_par_rate(curve, maturity),
    }
}

/// PV per unit notional at the quoted rate; for futures, the rate gap
/// `R - quote`.
pub fn present_value<C: DiscountCurve + ?Sized>(curve: &C, quote: &Quote) -> Result<f64> {
    match quote.instrument {
        Instrument::OvernightDeposit { maturity } => {
            price_overnight_deposit(curve, maturity, quote.par_rate)
        }
        Instrument::FedFundFuture { start, end } => {
            Ok(fed_fund_future_rate(curve, start, end)? - quote.par_rate)
        }
        Instrument::OisSwap { maturity } => price_ois_swap(curve, maturity, quote.par_rate),
    }
}
