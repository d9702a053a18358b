//! Day counts and the weekend-only business day calendar.
//!
//! Curve time is ACT/365-fixed from the valuation date. Instrument accruals
//! use ACT/360. No holidays are modelled: every Monday to Friday is a
//! business day.

use chrono::{Datelike, Days, Months, NaiveDate, Weekday};

use crate::error::{Error, Result};

/// Spot lag of USD OIS swaps, in business days.
pub const SPOT_LAG_DAYS: u32 = 2;

/// ACT/365-fixed year fraction from `valuation` to `date`.
pub fn year_fraction(valuation: NaiveDate, date: NaiveDate) -> Result<f64> {
    let days = (date - valuation).num_days();
    if days < 0 {
        return Err(Error::DateBeforeValuation { valuation, date });
    }
    Ok(days as f64 / 365.0)
}

/// ACT/360 accrual fraction between two dates.
pub fn act360(start: NaiveDate, end: NaiveDate) -> f64 {
    (end - start).num_days() as f64 / 360.0
}

pub fn is_business_day(date: NaiveDate) -> bool {
    !matches!(date.weekday(), Weekday::Sat | Weekday::Sun)
}

/// First business day strictly after `date`.
pub fn next_business_day(date: NaiveDate) -> NaiveDate {
    let mut d = date + Days::new(1);
    while !is_business_day(d) {
        d = d + Days::new(1);
    }
    d
}

pub fn add_business_days(date: NaiveDate, n: u32) -> NaiveDate {
    (0..n).fold(date, |d, _| next_business_day(d))
}

/// Modified following: roll forward to a business day unless that crosses
/// into the next month, in which case roll backward.
pub fn modified_following(date: NaiveDate) -> NaiveDate {
    if is_business_day(date) {
        return date;
    }
    let forward = next_business_day(date);
    if forward.month() == date.month() {
        return forward;
    }
    let mut d = date;
    while !is_business_day(d) {
        d = d - Days::new(1);
    }
    d
}

/// Unadjusted date `years` calendar years after `date` (Feb 29 clamps to Feb 28).
pub fn add_years(date: NaiveDate, years: u32) -> NaiveDate {
    date.checked_add_months(Months::new(12 * years))
        .expect("date overflow")
}
