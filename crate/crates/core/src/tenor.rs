//! Constant-tenor discrete forward curves `fbar(t) = -(p(t + delta) - p(t)) / delta`,
//! indexed by the start date `t` of the forward period, and the two
//! conversions between them and log-discount splines.

use std::fmt;
use std::str::FromStr;

use crate::curve::ZeroCurve;
use crate::error::{Error, Result};
use crate::interpolation::{interpolate, SlopeScheme};
use crate::pp::{check_increasing, shift, Cubic, PiecewiseCubic};

/// Knots closer than this (years) are merged.
pub const KNOT_TOLERANCE: f64 = 1e-12;

fn check_tenor(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidTenor(delta));
    }
    Ok(())
}

fn sort_dedup(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|b, a| (*b - *a).abs() <= KNOT_TOLERANCE);
    v
}

/// Sorted union of `{t_i}` and `{t_i + delta}`, deduplicated.
///
/// These are the knots of a tenor forward indexed by its end date.
pub fn augment_knots(times: &[f64], delta: f64) -> Result<Vec<f64>> {
    check_tenor(delta)?;
    check_increasing(times)?;
    Ok(sort_dedup(
        times.iter().flat_map(|&t| [t, t + delta]).collect(),
    ))
}

/// Breakpoints of the tenor forward indexed by start date on `[t_0, t_n]`:
/// `{t_i}` together with the start dates `t_i - delta` whose period ends on
/// a knot.
pub fn start_date_knots(times: &[f64], delta: f64) -> Result<Vec<f64>> {
    check_tenor(delta)?;
    check_increasing(times)?;
    let t0 = times[0];
    let shifted = times
        .iter()
        .map(|&t| t - delta)
        .filter(|&s| s > t0 + KNOT_TOLERANCE);
    Ok(sort_dedup(times.iter().copied().chain(shifted).collect()))
}

/// Tenor forward as a piecewise cubic in the start date; flat outside its
/// knot range.
#[derive(Debug, Clone, PartialEq)]
pub struct TenorForwardCurve {
    tenor: f64,
    pp: PiecewiseCubic,
}

impl TenorForwardCurve {
    pub fn new(tenor: f64, pp: PiecewiseCubic) -> Result<Self> {
        check_tenor(tenor)?;
        Ok(TenorForwardCurve { tenor, pp })
    }

    /// Natural C2 cubic spline through tenor forward values at `knots`.
    pub fn interpolate(tenor: f64, knots: &[f64], values: &[f64]) -> Result<Self> {
        Self::new(tenor, interpolate(SlopeScheme::C2Natural, knots, values)?)
    }

    pub fn tenor(&self) -> f64 {
        self.tenor
    }

    pub fn knots(&self) -> &[f64] {
        self.pp.knots()
    }

    pub fn pp(&self) -> &PiecewiseCubic {
        &self.pp
    }

    pub fn start(&self) -> f64 {
        self.pp.start()
    }

    pub fn end(&self) -> f64 {
        self.pp.end()
    }

    /// `order`-th derivative in the start date (right limit at knots).
    pub fn derivative(&self, t: f64, order: u8) -> f64 {
        if t < self.start() {
            return if order == 0 {
                self.forward(self.start())
            } else {
                0.0
            };
        }
        if t >= self.end() {
            return if order == 0 {
                let last = self.pp.num_pieces() - 1;
                self.pp.piece_derivative(last, self.end(), 0)
            } else {
                0.0
            };
        }
        self.pp.derivative(t, order)
    }

    pub fn forward(&self, t: f64) -> f64 {
        self.derivative(t, 0)
    }

    /// Cubic valid on `[a, a + len]` expressed relative to `a`.
    fn local_cubic(&self, a: f64, len: f64) -> Cubic {
        let mid = a + 0.5 * len;
        if mid >= self.end() || mid < self.start() {
            return [self.forward(mid), 0.0, 0.0, 0.0];
        }
        let j = self.pp.piece_index(mid);
        shift(self.pp.coeffs()[j], a - self.pp.knots()[j])
    }
}

/// Piece of `z` (extended linearly past the last knot) covering
/// `[a, a + len]`, relative to `a`.
fn zero_curve_cubic(z: &ZeroCurve, a: f64, len: f64) -> Cubic {
    let pp = z.pp();
    let mid = a + 0.5 * len;
    if mid >= pp.end() {
        let zn = z.knot_values()[z.knot_values().len() - 1];
        return shift([zn, z.end_slope(), 0.0, 0.0], a - pp.end());
    }
    let j = pp.piece_index(mid);
    shift(pp.coeffs()[j], a - pp.knots()[j])
}

/// Exact piecewise cubic representation of the tenor forward implied by `z`.
pub fn tenor_curve_from_zero_curve(z: &ZeroCurve, delta: f64) -> Result<TenorForwardCurve> {
    let knots = start_date_knots(z.times(), delta)?;
    let coeffs = knots
        .windows(2)
        .map(|w| {
            let len = w[1] - w[0];
            let near = zero_curve_cubic(z, w[0], len);
            let far = zero_curve_cubic(z, w[0] + delta, len);
            // on a piece where both ends share a cubic the x^3 terms cancel exactly
            std::array::from_fn(|k| -(far[k] - near[k]) / delta)
        })
        .collect();
    TenorForwardCurve::new(delta, PiecewiseCubic::new(knots, coeffs)?)
}

/// How the tenor forward is continued to start dates before the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TenorExtrapolation {
    /// `fbar(t) = fbar(0)` for `t < 0`, so `p(t) = -t fbar(0)` on `[0, delta)`.
    #[default]
    Constant,
}

impl fmt::Display for TenorExtrapolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TenorExtrapolation::Constant => f.write_str("constant"),
        }
    }
}

impl FromStr for TenorExtrapolation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(TenorExtrapolation::Constant),
            other => Err(Error::UnsupportedExtrapolation(other.to_string())),
        }
    }
}

fn check_origin(fc: &TenorForwardCurve) -> Result<()> {
    if fc.start() != 0.0 {
        return Err(Error::InvalidGrid(format!(
            "tenor curve must start at t = 0, starts at {}",
            fc.start()
        )));
    }
    Ok(())
}

/// Log-discount recovered from a tenor curve by summing one period at a time
/// back to the stub `[0, delta)`. Evaluated pointwise.
pub fn log_discount_by_summation(
    fc: &TenorForwardCurve,
    t: f64,
    extrapolation: TenorExtrapolation,
) -> Result<f64> {
    check_origin(fc)?;
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let TenorExtrapolation::Constant = extrapolation;
    let delta = fc.tenor();
    let mut k = (t / delta).floor() as usize;
    if t - k as f64 * delta > delta - KNOT_TOLERANCE {
        k += 1;
    }
    let stub = (t - k as f64 * delta).max(0.0);
    let sum: f64 = (1..=k).map(|j| fc.forward(t - j as f64 * delta)).sum();
    Ok(-stub * fc.forward(0.0) - delta * sum)
}

/// Residues of the tenor curve knots modulo the tenor, always including 0.
fn residues(knots: &[f64], delta: f64) -> Vec<f64> {
    let r = knots.iter().map(|&t| {
        let r = t - (t / delta).floor() * delta;
        if r < KNOT_TOLERANCE || r > delta - KNOT_TOLERANCE {
            0.0
        } else {
            r
        }
    });
    sort_dedup(std::iter::once(0.0).chain(r).collect())
}

/// Piecewise cubic log-discount on `[0, end]` of the tenor curve, built on
/// the periodic extension `{r + k delta}` of the knot residues `r`.
///
/// Piece `m` is piece `m - |R|` (one tenor earlier) minus `delta` times the
/// tenor forward there, so the cost is linear in the number of pieces.
pub fn zero_curve_from_tenor_curve(
    fc: &TenorForwardCurve,
    extrapolation: TenorExtrapolation,
) -> Result<PiecewiseCubic> {
    check_origin(fc)?;
    let TenorExtrapolation::Constant = extrapolation;
    let delta = fc.tenor();
    let end = fc.end();
    let res = residues(fc.knots(), delta);
    let r = res.len();
    let at = |m: usize| res[m % r] + (m / r) as f64 * delta;

    let mut knots = Vec::new();
    let mut m = 0;
    while at(m) < end - KNOT_TOLERANCE {
        knots.push(at(m));
        m += 1;
    }
    knots.push(end);

    let f0 = fc.forward(0.0);
    let mut coeffs: Vec<Cubic> = Vec::with_capacity(knots.len() - 1);
    for m in 0..knots.len() - 1 {
        let sigma = knots[m];
        let c = if m < r {
            [-sigma * f0, -f0, 0.0, 0.0]
        } else {
            let prev = coeffs[m - r];
            let len = knots[m + 1] - sigma;
            let f = fc.local_cubic(knots[m - r], len);
            std::array::from_fn(|k| prev[k] - delta * f[k])
        };
        coeffs.push(c);
    }
    PiecewiseCubic::new(knots, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveScheme, DateGrid, DiscountCurve};
    use chrono::NaiveDate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn val() -> NaiveDate {
        NaiveDate::from_ymd_opt(2019, 11, 6).unwrap()
    }

    fn curve(times: Vec<f64>, z: Vec<f64>, scheme: SlopeScheme) -> ZeroCurve {
        ZeroCurve::new(
            DateGrid::new(val(), times).unwrap(),
            z,
            CurveScheme::Spline(scheme),
        )
        .unwrap()
    }

    fn random_curve(rng: &mut ChaCha8Rng, n: usize, scheme: SlopeScheme) -> ZeroCurve {
        let mut t = 0.0;
        let mut z = 0.0;
        let (mut ts, mut zs) = (Vec::new(), Vec::new());
        for _ in 0..n {
            let h = rng.random_range(0.1..2.0);
            t += h;
            z -= rng.random_range(-0.02..0.08) * h;
            ts.push(t);
            zs.push(z);
        }
        curve(ts, zs, scheme)
    }

    #[test]
    fn augment_examples() {
        assert_eq!(
            augment_knots(&[0.0, 0.5, 1.2], 0.25).unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.2, 1.45]
        );
        assert_eq!(
            augment_knots(&[0.0, 1.0], 0.5).unwrap(),
            vec![0.0, 0.5, 1.0, 1.5]
        );
        assert_eq!(
            augment_knots(&[0.0, 0.5, 1.0, 1.5], 0.5).unwrap(),
            vec![0.0, 0.5, 1.0, 1.5, 2.0]
        );
        assert!(matches!(
            augment_knots(&[0.0, 1.0], 0.0),
            Err(Error::InvalidTenor(_))
        ));
        assert!(matches!(
            augment_knots(&[0.0, 1.0], -0.1),
            Err(Error::InvalidTenor(_))
        ));
    }

    #[test]
    fn augment_is_idempotent_on_its_base() {
        let t = [0.0, 0.3, 0.55, 2.0];
        let a = augment_knots(&t, 0.25).unwrap();
        let b = augment_knots(&t, 0.25).unwrap();
        assert_eq!(a, b);
        let again = augment_knots(&a, 0.25).unwrap();
        for x in &a {
            assert!(again.iter().any(|y| (x - y).abs() <= KNOT_TOLERANCE));
        }
    }

    #[test]
    fn start_date_knots_example() {
        assert_eq!(
            start_date_knots(&[0.0, 0.5, 1.2], 0.25).unwrap(),
            vec![0.0, 0.25, 0.5, 0.95, 1.2]
        );
    }

    #[test]
    fn flat_curve_gives_flat_tenor_forward() {
        let c = curve(
            vec![0.5, 2.0, 5.0],
            vec![-0.015, -0.06, -0.15],
            SlopeScheme::C2Natural,
        );
        let fc = tenor_curve_from_zero_curve(&c, 0.25).unwrap();
        for k in 0..120 {
            assert!((fc.forward(k as f64 * 0.05) - 0.03).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_difference_quotient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for scheme in [SlopeScheme::C2Natural, SlopeScheme::Bessel] {
            let c = random_curve(&mut rng, 8, scheme);
            for delta in [1.0 / 365.0, 0.25, 1.0] {
                let fc = tenor_curve_from_zero_curve(&c, delta).unwrap();
                let end = *c.times().last().unwrap();
                for k in 0..=1000 {
                    let t = end * k as f64 / 1000.0;
                    let direct =
                        -(c.log_discount(t + delta).unwrap() - c.log_discount(t).unwrap()) / delta;
                    assert!((fc.forward(t) - direct).abs() < 1e-11, "{t} {delta}");
                }
            }
        }
    }

    #[test]
    fn single_interval_expansion() {
        // one cubic piece: fbar = -(z' + delta/2 z'' + delta^2/6 z''')
        let t = vec![0.0, 10.0];
        let z = vec![0.0, -0.3];
        let c = curve(t, z, SlopeScheme::C2Natural);
        let delta = 0.5;
        let fc = tenor_curve_from_zero_curve(&c, delta).unwrap();
        for x in [0.0, 1.0, 4.5, 9.0] {
            let expected = -(c.z_derivative(x, 1).unwrap()
                + delta / 2.0 * c.z_derivative(x, 2).unwrap()
                + delta * delta / 6.0 * c.z_derivative(x, 3).unwrap());
            assert!((fc.forward(x) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn quadratic_between_knots_and_c2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = random_curve(&mut rng, 10, SlopeScheme::C2Natural);
        let delta = 1.0 / 365.0;
        let fc = tenor_curve_from_zero_curve(&c, delta).unwrap();
        let t = c.times();
        let pp = fc.pp();
        let mut quadratic_pieces = 0;
        for (j, w) in pp.knots().windows(2).enumerate() {
            let i = t.partition_point(|&x| x <= w[0]) - 1;
            if i + 1 < t.len() && w[1] <= t[i + 1] - delta + KNOT_TOLERANCE {
                assert_eq!(pp.coeffs()[j][3], 0.0);
                quadratic_pieces += 1;
            }
        }
        assert_eq!(quadratic_pieces, t.len() - 1);
        let scale = pp.coeffs().iter().map(|c| c[2].abs()).fold(0.0, f64::max);
        assert!(pp.max_jump(0) < 1e-14);
        assert!(pp.max_jump(1) < 1e-10 * scale.max(1.0));
        assert!(pp.max_jump(2) < 1e-9 * scale);
    }

    #[test]
    fn constant_tenor_curve_recovers_linear_log_discount() {
        let pp = PiecewiseCubic::new(vec![0.0, 3.0], vec![[0.02, 0.0, 0.0, 0.0]]).unwrap();
        let fc = TenorForwardCurve::new(0.25, pp).unwrap();
        let p = zero_curve_from_tenor_curve(&fc, TenorExtrapolation::Constant).unwrap();
        for k in 0..=30 {
            let t = k as f64 * 0.1;
            assert!((p.value(t) + 0.02 * t).abs() < 1e-15);
        }
        // pure stub below one tenor
        let v = log_discount_by_summation(&fc, 0.2, TenorExtrapolation::Constant).unwrap();
        assert!((v + 0.004).abs() < 1e-17);
    }

    #[test]
    fn extrapolation_tags() {
        assert_eq!(
            "constant".parse::<TenorExtrapolation>().unwrap(),
            TenorExtrapolation::Constant
        );
        assert!(matches!(
            "linear".parse::<TenorExtrapolation>(),
            Err(Error::UnsupportedExtrapolation(_))
        ));
    }

    #[test]
    fn round_trip_on_day_grid() {
        // knots on whole days; tenor one day
        let days = [1.0, 2.0, 30.0, 91.0, 365.0, 730.0, 1826.0, 3652.0];
        let times: Vec<f64> = days.iter().map(|d| d / 365.0).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut z = 0.0;
        let mut prev = 0.0;
        let zs: Vec<f64> = times
            .iter()
            .map(|&t| {
                z -= rng.random_range(0.0..0.05) * (t - prev);
                prev = t;
                z
            })
            .collect();
        for scheme in [SlopeScheme::C2Natural, SlopeScheme::Bessel] {
            let c = curve(times.clone(), zs.clone(), scheme);
            let fc = tenor_curve_from_zero_curve(&c, 1.0 / 365.0).unwrap();
            let p = zero_curve_from_tenor_curve(&fc, TenorExtrapolation::Constant).unwrap();
            for (t, z) in c.times().iter().zip(c.knot_values()) {
                assert!(
                    (p.value(*t) - z).abs() < 1e-12,
                    "{t}: {} vs {z}",
                    p.value(*t)
                );
            }
        }
    }

    #[test]
    fn recursion_matches_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = random_curve(&mut rng, 6, SlopeScheme::C2Natural);
        let fc = tenor_curve_from_zero_curve(&c, 0.3).unwrap();
        let p = zero_curve_from_tenor_curve(&fc, TenorExtrapolation::Constant).unwrap();
        let end = fc.end();
        for k in 0..=500 {
            let t = end * k as f64 / 500.0;
            let s = log_discount_by_summation(&fc, t, TenorExtrapolation::Constant).unwrap();
            assert!((p.value(t) - s).abs() < 1e-13, "{t}");
        }
        assert!(p.max_jump(0) < 1e-14);
    }

    #[test]
    fn round_trip_exact_when_first_tenor_is_linear() {
        // first interval longer than the tenor and linear under Bessel ends
        // is not guaranteed, so build the curve from explicit slopes
        let t = vec![0.0, 1.0, 1.7, 3.0, 4.2];
        let z = vec![0.0, -0.02, -0.03, -0.07, -0.09];
        let s = vec![-0.02, -0.02, -0.025, -0.02, -0.015];
        let pp = crate::interpolation::hermite_coefficients(&t, &z, &s).unwrap();
        let grid = DateGrid::new(val(), t.clone()).unwrap();
        let c = ZeroCurve::from_parts(
            grid,
            z.clone(),
            pp,
            CurveScheme::Spline(SlopeScheme::Bessel),
        )
        .unwrap();
        let fc = tenor_curve_from_zero_curve(&c, 0.4).unwrap();
        let back = zero_curve_from_tenor_curve(&fc, TenorExtrapolation::Constant).unwrap();
        for (ti, zi) in t.iter().zip(&z) {
            assert!((back.value(*ti) - zi).abs() < 1e-13);
        }
    }

    #[test]
    fn standalone_interpolation_is_natural() {
        let fc =
            TenorForwardCurve::interpolate(0.25, &[0.0, 1.0, 2.0, 4.0], &[0.01, 0.02, 0.015, 0.03])
                .unwrap();
        assert!(fc.pp().max_jump(2) < 1e-15);
        assert!(fc.pp().derivative(0.0, 2).abs() < 1e-15);
        assert_eq!(fc.forward(10.0), 0.03);
        assert_eq!(fc.derivative(10.0, 1), 0.0);
    }

    #[test]
    fn rejects_curve_not_starting_at_zero() {
        let pp = PiecewiseCubic::new(vec![1.0, 3.0], vec![[0.02, 0.0, 0.0, 0.0]]).unwrap();
        let fc = TenorForwardCurve::new(0.25, pp).unwrap();
        assert!(zero_curve_from_tenor_curve(&fc, TenorExtrapolation::Constant).is_err());
    }

    proptest! {
        #[test]
        fn augmented_knots_sorted_and_complete(
            h in prop::collection::vec(0.01f64..2.0, 1..12),
            delta in 0.001f64..1.5,
        ) {
            let mut t = vec![0.0];
            for dh in h { t.push(t.last().unwrap() + dh); }
            let a = augment_knots(&t, delta).unwrap();
            prop_assert!(a.windows(2).all(|w| w[1] - w[0] > KNOT_TOLERANCE));
            for x in &t {
                prop_assert!(a.iter().any(|y| (x - y).abs() <= KNOT_TOLERANCE));
                prop_assert!(a.iter().any(|y| (x + delta - y).abs() <= KNOT_TOLERANCE));
            }
        }

        #[test]
        fn round_trip_on_multiples_of_tenor(
            k in prop::collection::vec(1u32..40, 2..8),
            f in prop::collection::vec(-0.02f64..0.08, 8),
            delta in prop::sample::select(vec![0.25, 0.5, 1.0 / 12.0]),
        ) {
            let mut t = Vec::new();
            let mut acc = 0;
            for ki in k { acc += ki; t.push(acc as f64 * delta); }
            let mut z = Vec::new();
            let mut prev = (0.0, 0.0);
            for (ti, fi) in t.iter().zip(&f) {
                prev = (*ti, prev.1 - fi * (ti - prev.0));
                z.push(prev.1);
            }
            let c = curve(t, z, SlopeScheme::C2Natural);
            let fc = tenor_curve_from_zero_curve(&c, delta).unwrap();
            let back = zero_curve_from_tenor_curve(&fc, TenorExtrapolation::Constant).unwrap();
            for (ti, zi) in c.times().iter().zip(c.knot_values()) {
                prop_assert!((back.value(*ti) - zi).abs() < 1e-12);
            }
        }
    }
}
