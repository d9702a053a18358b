//! CSV formats: market quotes, calibrated knot tables and sampled curve
//! reports.
//!
//! Files may start with `# key: value` comment lines. Quote files carry
//! `valuation_date`; knot tables carry `valuation_date` and `scheme`.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{Days, NaiveDate};
use thiserror::Error;

use crate::curve::{CurveScheme, DateGrid, ZeroCurve};
use crate::error::Error;
use crate::instruments::{Instrument, Quote};
use crate::tenor::tenor_curve_from_zero_curve;

pub const QUOTE_HEADER: [&str; 4] = ["instrument_kind", "maturity_date", "par_rate", "start_date"];
pub const KNOT_HEADER: [&str; 4] = ["date", "t", "z", "discount"];
pub const REPORT_HEADER: [&str; 6] = [
    "t",
    "discount",
    "zero",
    "inst_forward",
    "one_day_forward",
    "second_deriv",
];

/// Problems with input files, as opposed to numerical failures.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Line { line: u64, message: String },
    #[error("missing '# {0}:' directive")]
    MissingDirective(&'static str),
    #[error("bad directive '{0}'")]
    BadDirective(String),
    #[error("unexpected header, expected {expected}")]
    Header { expected: String },
    #[error("no quotes")]
    NoQuotes,
    #[error("invalid curve: {0}")]
    Curve(#[from] Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

type Result<T> = std::result::Result<T, InputError>;

#[derive(Debug, Clone, PartialEq)]
pub struct QuoteFile {
    pub valuation_date: NaiveDate,
    pub quotes: Vec<Quote>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn line_err(line: u64, message: impl Into<String>) -> InputError {
    InputError::Line {
        line,
        message: message.into(),
    }
}

/// `# key: value` lines, in order.
fn directives(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .map(str::trim)
        .filter(|l| l.starts_with('#'))
        .map(|l| {
            let body = l.trim_start_matches('#').trim();
            match body.split_once(':') {
                Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
                None => Err(InputError::BadDirective(l.to_string())),
            }
        })
        .collect()
}

fn directive<'a>(dirs: &'a [(String, String)], key: &'static str) -> Result<&'a str> {
    dirs.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or(InputError::MissingDirective(key))
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str], required: usize) -> Result<()> {
    let header = rdr.headers()?;
    let ok = header.len() >= required
        && header.len() <= expected.len()
        && header.iter().zip(expected).all(|(a, b)| a == *b);
    if !ok {
        return Err(InputError::Header {
            expected: expected.join(","),
        });
    }
    Ok(())
}

pub fn parse_quotes_str(text: &str) -> Result<QuoteFile> {
    let dirs = directives(text)?;
    let raw = directive(&dirs, "valuation_date")?;
    let valuation_date = parse_date(raw)
        .ok_or_else(|| InputError::BadDirective(format!("valuation_date: {raw}")))?;
    let mut rdr = reader(text);
    check_header(&mut rdr, &QUOTE_HEADER, 3)?;
    let mut quotes = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).filter(|s| !s.is_empty());
        let kind = field(0).ok_or_else(|| line_err(line, "missing instrument kind"))?;
        let maturity = field(1).and_then(parse_date).ok_or_else(|| {
            line_err(
                line,
                format!("bad maturity date '{}'", rec.get(1).unwrap_or("")),
            )
        })?;
        let rate_text = field(2).ok_or_else(|| line_err(line, "missing par rate"))?;
        let rate: f64 = rate_text
            .parse()
            .map_err(|_| line_err(line, format!("bad par rate '{rate_text}'")))?;
        let start = match field(3) {
            None => None,
            Some(s) => {
                Some(parse_date(s).ok_or_else(|| line_err(line, format!("bad start date '{s}'")))?)
            }
        };
        if rec.len() > QUOTE_HEADER.len() {
            return Err(line_err(line, "too many fields"));
        }
        let instrument = match (kind, start) {
            ("ois_deposit", None) => Instrument::OvernightDeposit { maturity },
            ("ois_swap", None) => Instrument::OisSwap { maturity },
            ("ff_future", Some(start)) => Instrument::FedFundFuture {
                start,
                end: maturity,
            },
            ("ff_future", None) => return Err(line_err(line, "future needs a start date")),
            ("ois_deposit" | "ois_swap", Some(_)) => {
                return Err(line_err(line, format!("{kind} takes no start date")))
            }
            (other, _) => return Err(line_err(line, format!("unknown instrument kind '{other}'"))),
        };
        let quote = Quote::new(instrument, rate).map_err(|e| line_err(line, e.to_string()))?;
        quotes.push(quote);
    }
    if quotes.is_empty() {
        return Err(InputError::NoQuotes);
    }
    Ok(QuoteFile {
        valuation_date,
        quotes,
    })
}

pub fn parse_quotes(path: &Path) -> Result<QuoteFile> {
    parse_quotes_str(&read(path)?)
}

pub fn format_quotes(file: &QuoteFile) -> String {
    let mut out = format!(
        "# valuation_date: {}\n{}\n",
        file.valuation_date,
        QUOTE_HEADER.join(",")
    );
    for q in &file.quotes {
        let i = &q.instrument;
        match *i {
            Instrument::FedFundFuture { start, end } => {
                out += &format!("{},{end},{},{start}\n", i.kind_name(), q.par_rate);
            }
            _ => out += &format!("{},{},{}\n", i.kind_name(), i.pillar_date(), q.par_rate),
        }
    }
    out
}

pub fn write_quotes(path: &Path, file: &QuoteFile) -> Result<()> {
    write_file(path, format_quotes(file).as_bytes())
}

/// Rates and times at 12 significant digits.
fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn knot_date(valuation: NaiveDate, t: f64) -> NaiveDate {
    valuation + Days::new((t * 365.0).round() as u64)
}

pub fn format_knot_table(curve: &ZeroCurve) -> String {
    let val = curve.grid().valuation_date();
    let mut out = format!(
        "# valuation_date: {val}\n# scheme: {}\n{}\n",
        curve.scheme(),
        KNOT_HEADER.join(",")
    );
    for (t, z) in curve.times().iter().zip(curve.knot_values()) {
        out += &format!(
            "{},{},{},{}\n",
            knot_date(val, *t),
            num(*t),
            num(*z),
            num(z.exp())
        );
    }
    out
}

pub fn write_knot_table(path: &Path, curve: &ZeroCurve) -> Result<()> {
    write_file(path, format_knot_table(curve).as_bytes())
}

/// Rebuild a curve from knot dates and log-discounts with its scheme.
pub fn parse_knot_table_str(text: &str) -> Result<ZeroCurve> {
    let dirs = directives(text)?;
    let raw = directive(&dirs, "valuation_date")?;
    let valuation = parse_date(raw)
        .ok_or_else(|| InputError::BadDirective(format!("valuation_date: {raw}")))?;
    let scheme: CurveScheme = directive(&dirs, "scheme")?.parse()?;
    let mut rdr = reader(text);
    check_header(&mut rdr, &KNOT_HEADER, KNOT_HEADER.len())?;
    let (mut dates, mut z) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let date = rec
            .get(0)
            .and_then(parse_date)
            .ok_or_else(|| line_err(line, "bad date"))?;
        let v: f64 = rec
            .get(2)
            .and_then(|s| s.parse().ok())
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| line_err(line, "bad z value"))?;
        dates.push(date);
        z.push(v);
    }
    if dates.is_empty() {
        return Err(InputError::Line {
            line: 0,
            message: "empty knot table".into(),
        });
    }
    let grid = DateGrid::from_dates(valuation, &dates)?;
    Ok(ZeroCurve::new(grid, z, scheme)?)
}

pub fn parse_knot_table(path: &Path) -> Result<ZeroCurve> {
    parse_knot_table_str(&read(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub t: f64,
    pub discount: f64,
    pub zero: f64,
    pub inst_forward: f64,
    /// Tenor forward starting at `t`.
    pub one_day_forward: f64,
    /// Second derivative of the tenor forward in its start date.
    pub second_deriv: f64,
}

/// Samples on `from, from + step, ..., to`.
pub fn sample_curve(
    curve: &ZeroCurve,
    from: f64,
    to: f64,
    step: f64,
    tenor: f64,
) -> crate::error::Result<Vec<ReportRow>> {
    if !(step > 0.0) || !(from >= 0.0) || !(to >= from) {
        return Err(Error::InvalidPeriod {
            start: from,
            end: to,
        });
    }
    let fc = tenor_curve_from_zero_curve(curve, tenor)?;
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|k| {
            let t = from + k as f64 * step;
            let s = curve.sample(t)?;
            Ok(ReportRow {
                t,
                discount: s.discount,
                zero: s.zero,
                inst_forward: s.inst_forward,
                one_day_forward: fc.forward(t),
                second_deriv: fc.derivative(t, 2),
            })
        })
        .collect()
}

pub fn format_report(rows: &[ReportRow]) -> String {
    let mut out = REPORT_HEADER.join(",") + "\n";
    for r in rows {
        let cols = [
            r.t,
            r.discount,
            r.zero,
            r.inst_forward,
            r.one_day_forward,
            r.second_deriv,
        ];
        out += &cols.map(num).join(",");
        out.push('\n');
    }
    out
}

pub fn write_report<W: Write>(mut w: W, rows: &[ReportRow]) -> std::io::Result<()> {
    w.write_all(format_report(rows).as_bytes())
}

/// Fed Funds quotes as of 2019-11-06, bundled with the crate.
pub const FEDFUND_QUOTES_CSV: &str = include_str!("../data/fedfund_2019-11-06.csv");

pub fn fedfund_quotes() -> QuoteFile {
    parse_quotes_str(FEDFUND_QUOTES_CSV).expect("bundled fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::SlopeScheme;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn fixture_has_every_quote() {
        let f = fedfund_quotes();
        assert_eq!(f.valuation_date, d(2019, 11, 6));
        assert_eq!(f.quotes.len(), 29);
        let ten = f
            .quotes
            .iter()
            .find(|q| q.instrument.pillar_date() == d(2029, 11, 8))
            .unwrap();
        assert_eq!(
            ten.instrument,
            Instrument::OisSwap {
                maturity: d(2029, 11, 8)
            }
        );
        assert_eq!(ten.par_rate, 0.01484);
        let kinds = |k: &str| {
            f.quotes
                .iter()
                .filter(|q| q.instrument.kind_name() == k)
                .count()
        };
        assert_eq!(
            (kinds("ois_deposit"), kinds("ff_future"), kinds("ois_swap")),
            (2, 10, 17)
        );
        assert_eq!(
            f.quotes[2].instrument,
            Instrument::FedFundFuture {
                start: d(2019, 12, 2),
                end: d(2020, 1, 2)
            }
        );
        assert!(f
            .quotes
            .windows(2)
            .all(|w| w[0].instrument.pillar_date() < w[1].instrument.pillar_date()));
    }

    #[test]
    fn quotes_round_trip() {
        let f = fedfund_quotes();
        assert_eq!(parse_quotes_str(&format_quotes(&f)).unwrap(), f);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("q.csv");
        write_quotes(&p, &f).unwrap();
        assert_eq!(parse_quotes(&p).unwrap(), f);
    }

    #[test]
    fn quote_errors() {
        let head =
            "# valuation_date: 2019-11-06\ninstrument_kind,maturity_date,par_rate,start_date\n";
        assert!(matches!(parse_quotes_str(head), Err(InputError::NoQuotes)));
        let e = parse_quotes_str(&format!(
            "{head}ois_swap,2029-11-08,0.01\nois_swap,2030-11-08,abc\n"
        ))
        .unwrap_err();
        assert!(matches!(e, InputError::Line { line: 4, .. }), "{e}");
        assert!(e.to_string().contains("abc"));
        let e = parse_quotes_str(&format!("{head}libor,2029-11-08,0.01\n")).unwrap_err();
        assert!(e.to_string().contains("unknown instrument kind"));
        assert!(parse_quotes_str(&format!("{head}ff_future,2020-01-02,0.01\n")).is_err());
        assert!(parse_quotes_str(&format!("{head}ois_swap,2029-13-08,0.01\n")).is_err());
        assert!(parse_quotes_str(&format!("{head}ois_swap,2029-11-08,NaN\n")).is_err());
        assert!(matches!(
            parse_quotes_str("instrument_kind,maturity_date,par_rate\nois_swap,2029-11-08,0.01\n"),
            Err(InputError::MissingDirective("valuation_date"))
        ));
        assert!(matches!(
            parse_quotes_str(
                "# valuation_date: 2019-11-06\nkind,date,rate\nois_swap,2029-11-08,0.01\n"
            ),
            Err(InputError::Header { .. })
        ));
    }

    #[test]
    fn knot_table_round_trip() {
        let val = d(2019, 11, 6);
        let dates = [d(2020, 11, 9), d(2024, 11, 8), d(2029, 11, 8)];
        let grid = DateGrid::from_dates(val, &dates).unwrap();
        let c = ZeroCurve::new(
            grid,
            vec![-0.015, -0.07, -0.15],
            CurveScheme::Spline(SlopeScheme::C2Natural),
        )
        .unwrap();
        let text = format_knot_table(&c);
        assert!(text.starts_with(
            "# valuation_date: 2019-11-06\n# scheme: c2\ndate,t,z,discount\n2019-11-06,"
        ));
        let back = parse_knot_table_str(&text).unwrap();
        assert_eq!(back.times(), c.times());
        assert_eq!(back.scheme(), c.scheme());
        for (a, b) in back.knot_values().iter().zip(c.knot_values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(parse_knot_table_str(
            "# valuation_date: 2019-11-06\n# scheme: spline\ndate,t,z,discount\n"
        )
        .is_err());
    }

    #[test]
    fn report_on_flat_curve() {
        let val = d(2019, 11, 6);
        let grid = DateGrid::new(val, vec![1.0, 10.0]).unwrap();
        let c = ZeroCurve::new(
            grid,
            vec![-0.02, -0.2],
            CurveScheme::Spline(SlopeScheme::Bessel),
        )
        .unwrap();
        let rows = sample_curve(&c, 0.0, 3.0, 0.25, 1.0 / 365.0).unwrap();
        assert_eq!(rows.len(), 13);
        for r in &rows {
            assert!((r.inst_forward - 0.02).abs() < 1e-15);
            assert!((r.one_day_forward - 0.02).abs() < 1e-13);
            assert!(r.second_deriv.abs() < 1e-9);
        }
        let text = format_report(&rows);
        assert_eq!(text.lines().count(), 14);
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("0.00000000000e0,1.00000000000e0,"));
        assert!(sample_curve(&c, 1.0, 0.0, 0.1, 0.1).is_err());
    }
}
