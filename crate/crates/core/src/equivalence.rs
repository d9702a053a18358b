//! Numerical checks that forward-space and log-discount constructions
//! coincide, run over seeded random curves.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{CurveScheme, DateGrid, ZeroCurve};
use crate::error::Result;
use crate::forward::{ForwardKind, ForwardSplineCurve};
use crate::interpolation::SlopeScheme;
use crate::par::{map_slice, Execution};
use crate::tenor::{tenor_curve_from_zero_curve, KNOT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomCurveSpec {
    pub min_knots: usize,
    pub max_knots: usize,
    pub min_forward: f64,
    pub max_forward: f64,
    pub min_spacing: f64,
    pub max_spacing: f64,
}

impl Default for RandomCurveSpec {
    fn default() -> Self {
        RandomCurveSpec {
            min_knots: 3,
            max_knots: 20,
            min_forward: -0.02,
            max_forward: 0.08,
            min_spacing: 0.05,
            max_spacing: 3.0,
        }
    }
}

impl RandomCurveSpec {
    pub fn with_knots(knots: usize) -> Self {
        RandomCurveSpec {
            min_knots: knots,
            max_knots: knots,
            ..Default::default()
        }
    }
}

/// Knot times from `t = 0` and log-discount values.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotCurve {
    pub times: Vec<f64>,
    pub z: Vec<f64>,
}

impl KnotCurve {
    pub fn from_zero_curve(c: &ZeroCurve) -> Self {
        KnotCurve {
            times: c.times().to_vec(),
            z: c.knot_values().to_vec(),
        }
    }

    fn grid(&self) -> Result<DateGrid> {
        DateGrid::new(NaiveDate::default(), self.times.clone())
    }

    pub fn zero_curve(&self, scheme: CurveScheme) -> Result<ZeroCurve> {
        ZeroCurve::new(self.grid()?, self.z.clone(), scheme)
    }

    pub fn forward_curve(&self, kind: ForwardKind) -> Result<ForwardSplineCurve> {
        ForwardSplineCurve::from_log_discounts(self.grid()?, self.z.clone(), kind)
    }

    pub fn discrete_forwards(&self) -> Vec<f64> {
        (1..self.times.len())
            .map(|i| -((self.z[i] - self.z[i - 1]) / (self.times[i] - self.times[i - 1])))
            .collect()
    }

    /// Largest absolute discrete forward, the unit for relative errors.
    pub fn forward_scale(&self) -> f64 {
        self.discrete_forwards()
            .iter()
            .fold(1e-8, |m, f| m.max(f.abs()))
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }
}

/// `spec.min_knots..=spec.max_knots` knots including `t = 0`, with uniform
/// random spacing and discrete forwards.
pub fn random_knot_curve<R: Rng>(rng: &mut R, spec: &RandomCurveSpec) -> KnotCurve {
    let n = rng.random_range(spec.min_knots..=spec.max_knots);
    let mut times = vec![0.0];
    let mut z = vec![0.0];
    for _ in 1..n {
        let h = rng.random_range(spec.min_spacing..spec.max_spacing);
        let f = rng.random_range(spec.min_forward..spec.max_forward);
        let (t, v) = (times[times.len() - 1], z[z.len() - 1]);
        times.push(t + h);
        z.push(v - f * h);
    }
    KnotCurve { times, z }
}

pub fn random_knot_curves(seed: u64, count: usize, spec: &RandomCurveSpec) -> Vec<KnotCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_knot_curve(&mut rng, spec))
        .collect()
}

/// Worst deviation found by a scan.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Deviation {
    pub max_abs: f64,
    /// Relative to the forward scale of the curve where it occurred.
    pub max_rel: f64,
    pub samples: usize,
}

impl Deviation {
    pub fn merge(self, other: Deviation) -> Deviation {
        Deviation {
            max_abs: self.max_abs.max(other.max_abs),
            max_rel: self.max_rel.max(other.max_rel),
            samples: self.samples + other.samples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalencePair {
    /// Smart quadratic forward against minus the Bessel spline slope.
    SmartQuadraticBessel,
    /// Area preserving quadratic against minus the natural C2 spline slope.
    AreaPreservingC2,
}

impl EquivalencePair {
    fn parts(self) -> (ForwardKind, SlopeScheme) {
        match self {
            EquivalencePair::SmartQuadraticBessel => {
                (ForwardKind::SmartQuadratic, SlopeScheme::Bessel)
            }
            EquivalencePair::AreaPreservingC2 => {
                (ForwardKind::AreaPreserving, SlopeScheme::C2Natural)
            }
        }
    }
}

/// `samples` evenly spaced points on `[0, t_n]`.
fn sample_points(end: f64, samples: usize) -> impl Iterator<Item = f64> {
    let n = samples.max(2) - 1;
    (0..=n).map(move |k| end * k as f64 / n as f64)
}

/// Compare the forward-space curve with minus the derivative of the
/// log-discount spline built on the same knot values.
pub fn forward_equivalence(
    curve: &KnotCurve,
    pair: EquivalencePair,
    samples: usize,
) -> Result<Deviation> {
    let (kind, slopes) = pair.parts();
    let fwd = curve.forward_curve(kind)?;
    let zc = curve.zero_curve(CurveScheme::Spline(slopes))?;
    let scale = curve.forward_scale();
    let mut max_abs: f64 = 0.0;
    let mut count = 0;
    for t in sample_points(curve.end(), samples) {
        let diff = (fwd.forward(t) + zc.z_derivative(t, 1)?).abs();
        max_abs = max_abs.max(diff);
        count += 1;
    }
    Ok(Deviation {
        max_abs,
        max_rel: max_abs / scale,
        samples: count,
    })
}

pub fn scan(
    curves: &[KnotCurve],
    pair: EquivalencePair,
    samples: usize,
    exec: Execution,
) -> Result<Deviation> {
    map_slice(exec, curves, |c| forward_equivalence(c, pair, samples))
        .into_iter()
        .try_fold(Deviation::default(), |acc, d| Ok(acc.merge(d?)))
}

/// Five-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Largest relative gap between the quadrature mean of the instantaneous
/// forward on an interval and the interval's discrete forward.
pub fn area_preservation(curve: &KnotCurve, scheme: CurveScheme) -> Result<f64> {
    let zc = curve.zero_curve(scheme)?;
    let fd = curve.discrete_forwards();
    let scale = curve.forward_scale();
    let mut worst: f64 = 0.0;
    for (i, w) in curve.times.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut mean = 0.0;
        for (x, wt) in GAUSS5 {
            mean += 0.5 * wt * zc.instantaneous_forward(mid + half * x)?;
        }
        worst = worst.max((mean - fd[i]).abs() / scale);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TenorCheck {
    /// Largest `|c3|` on pieces inside some `(t_i, t_{i+1} - delta)`,
    /// relative to the largest `|c3|` on any piece.
    pub max_cubic_rel: f64,
    /// Largest third derivative at sample points inside those windows,
    /// relative to the same scale.
    pub max_sampled_rel: f64,
    /// Largest jump of the second derivative across knots, relative to the
    /// largest second derivative.
    pub second_jump_rel: f64,
    pub quadratic_pieces: usize,
    pub samples: usize,
}

pub fn tenor_quadratic_check(curve: &ZeroCurve, delta: f64, samples: usize) -> Result<TenorCheck> {
    let fc = tenor_curve_from_zero_curve(curve, delta)?;
    let pp = fc.pp();
    let t = curve.times();
    // index of the original interval holding [a, b] if b <= t_{i+1} - delta
    let window = |a: f64, b: f64| {
        let i = t
            .partition_point(|&x| x <= a + KNOT_TOLERANCE)
            .checked_sub(1)?;
        (i + 1 < t.len() && b <= t[i + 1] - delta + KNOT_TOLERANCE).then_some(i)
    };
    let c3_scale = pp.coeffs().iter().fold(0.0f64, |m, c| m.max(c[3].abs()));
    let scale = if c3_scale > 0.0 { c3_scale } else { 1.0 };
    let mut max_c3: f64 = 0.0;
    let mut quadratic_pieces = 0;
    for (j, w) in pp.knots().windows(2).enumerate() {
        if window(w[0], w[1]).is_some() {
            max_c3 = max_c3.max(pp.coeffs()[j][3].abs());
            quadratic_pieces += 1;
        }
    }
    let mut max_sampled: f64 = 0.0;
    let mut count = 0;
    for x in sample_points(curve.times()[t.len() - 1], samples) {
        let i = t.partition_point(|&v| v <= x).saturating_sub(1);
        if i + 1 < t.len() && x > t[i] && x < t[i + 1] - delta {
            max_sampled = max_sampled.max(fc.derivative(x, 3).abs() / 6.0);
            count += 1;
        }
    }
    let second_scale = pp
        .coeffs()
        .iter()
        .fold(1e-300f64, |m, c| m.max((2.0 * c[2]).abs()));
    Ok(TenorCheck {
        max_cubic_rel: max_c3 / scale,
        max_sampled_rel: max_sampled / scale,
        second_jump_rel: pp.max_jump(2) / second_scale,
        quadratic_pieces,
        samples: count,
    })
}
