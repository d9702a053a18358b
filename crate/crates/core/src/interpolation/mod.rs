//! Piecewise cubic Hermite interpolation of log-discount factors.
//!
//! Every scheme here produces a slope `s_i` at each knot; the cubic on
//! `[t_i, t_{i+1}]` is then fixed by the values and slopes at both ends.
//! Since `z = ln P`, the slope is minus the instantaneous forward at the
//! knot, and the divided difference `d_i` is minus the discrete forward of
//! the interval.

mod tridiagonal;

use std::ops::Deref;

pub use tridiagonal::{tridiagonal_solve, TridiagonalSystem};

use crate::error::{Error, Result};
use crate::lavery::{lavery_slopes, LaverySpec};
use crate::pp::{check_increasing, Cubic, PiecewiseCubic};

/// How the knot slopes of the log-discount spline are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeScheme {
    /// Slope of the parabola through three consecutive points.
    Bessel,
    /// Standard C2 cubic spline with natural ends.
    C2Natural,
    /// Weighted harmonic mean of adjacent discrete forwards.
    Harmonic,
    RationalLimiter,
    VanAlbada,
    /// L1-optimal C1 spline, solved as a linear program.
    Lavery(LaverySpec),
}

/// Knot slopes `s_i` of a log-discount spline.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeVector(Vec<f64>);

impl SlopeVector {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite slope".into()));
        }
        Ok(SlopeVector(s))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for SlopeVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn check_data(times: &[f64], z: &[f64]) -> Result<()> {
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
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("non-finite value".into()));
    }
    Ok(())
}

/// Divided differences `d_i = (z_{i+1} - z_i) / (t_{i+1} - t_i)`.
pub fn divided_differences(times: &[f64], z: &[f64]) -> Vec<f64> {
    times
        .windows(2)
        .zip(z.windows(2))
        .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
        .collect()
}

/// Hermite form of the cubic on `[t_i, t_{i+1}]` from end values and slopes.
pub fn hermite_cubic(h: f64, z0: f64, z1: f64, s0: f64, s1: f64) -> Cubic {
    let d = (z1 - z0) / h;
    [
        z0,
        s0,
        (3.0 * d - s1 - 2.0 * s0) / h,
        -(2.0 * d - s1 - s0) / (h * h),
    ]
}

pub fn hermite_coefficients(times: &[f64], z: &[f64], s: &[f64]) -> Result<PiecewiseCubic> {
    check_data(times, z)?;
    if s.len() != times.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            got: s.len(),
        });
    }
    let coeffs = (0..times.len() - 1)
        .map(|i| hermite_cubic(times[i + 1] - times[i], z[i], z[i + 1], s[i], s[i + 1]))
        .collect();
    PiecewiseCubic::new(times.to_vec(), coeffs)
}

/// Fill `s_0` and `s_n` from the natural end conditions `p''(t_0) = p''(t_n) = 0`
/// given the interior slopes.
fn natural_ends(d: &[f64], s: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        s[0] = d[0];
        s[1] = d[0];
        return;
    }
    s[0] = d[0] - 0.5 * (s[1] - d[0]);
    s[n] = d[n - 1] - 0.5 * (s[n - 1] - d[n - 1]);
}

/// Interior slopes from a rule on the neighbouring discrete forwards
/// `(h_left, h_right, fd_left, fd_right) -> node forward`, natural ends.
fn forward_rule_slopes<F>(times: &[f64], z: &[f64], rule: F) -> Result<SlopeVector>
where
    F: Fn(f64, f64, f64, f64) -> f64,
{
    check_data(times, z)?;
    let d = divided_differences(times, z);
    let mut s = vec![0.0; times.len()];
    for i in 1..d.len() {
        let hl = times[i] - times[i - 1];
        let hr = times[i + 1] - times[i];
        s[i] = -rule(hl, hr, -d[i - 1], -d[i]);
    }
    natural_ends(&d, &mut s);
    SlopeVector::new(s)
}

pub fn bessel_slopes(times: &[f64], z: &[f64]) -> Result<SlopeVector> {
    check_data(times, z)?;
    let d = divided_differences(times, z);
    let mut s = vec![0.0; times.len()];
    for i in 1..d.len() {
        let hl = times[i] - times[i - 1];
        let hr = times[i + 1] - times[i];
        s[i] = (hl * d[i] + hr * d[i - 1]) / (times[i + 1] - times[i - 1]);
    }
    natural_ends(&d, &mut s);
    SlopeVector::new(s)
}

/// Assemble the C2 continuity system with natural end rows.
pub fn c2_natural_system(times: &[f64], z: &[f64]) -> Result<TridiagonalSystem> {
    check_data(times, z)?;
    let d = divided_differences(times, z);
    let n = d.len();
    let mut sys = TridiagonalSystem::zeros(n + 1);
    sys.diag[0] = 2.0;
    sys.sup[0] = 1.0;
    sys.rhs[0] = 3.0 * d[0];
    for i in 1..n {
        let hl = times[i] - times[i - 1];
        let hr = times[i + 1] - times[i];
        sys.sub[i] = hr;
        sys.diag[i] = 2.0 * (hl + hr);
        sys.sup[i] = hl;
        sys.rhs[i] = 3.0 * (hr * d[i - 1] + hl * d[i]);
    }
    sys.sub[n] = 1.0;
    sys.diag[n] = 2.0;
    sys.rhs[n] = 3.0 * d[n - 1];
    Ok(sys)
}

pub fn c2_natural_slopes(times: &[f64], z: &[f64]) -> Result<SlopeVector> {
    let sys = c2_natural_system(times, z)?;
    SlopeVector::new(tridiagonal_solve(&sys)?)
}

/// Harmonic node forward. Applied only when both neighbours have the same
/// strict sign; otherwise the node forward is zero.
pub fn harmonic_node_forward(hl: f64, hr: f64, fd_left: f64, fd_right: f64) -> f64 {
    if fd_left * fd_right <= 0.0 {
        return 0.0;
    }
    let w = 3.0 * (hl + hr);
    let inv = (hl + 2.0 * hr) / w / fd_left + (2.0 * hl + hr) / w / fd_right;
    1.0 / inv
}

pub fn rational_limiter_node_forward(fd_left: f64, fd_right: f64) -> f64 {
    let den = fd_right * fd_right + 4.0 * fd_right * fd_left + fd_left * fd_left;
    if den == 0.0 || fd_left * fd_right <= 0.0 {
        return 0.0;
    }
    3.0 * fd_right * fd_left * (fd_right + fd_left) / den
}

/// Van Albada node forward; zero when the neighbours change sign.
pub fn van_albada_node_forward(fd_left: f64, fd_right: f64) -> f64 {
    let den = fd_right * fd_right + fd_left * fd_left;
    if den == 0.0 || fd_left * fd_right < 0.0 {
        return 0.0;
    }
    (fd_right * fd_right * fd_left + fd_right * fd_left * fd_left) / den
}

pub fn harmonic_slopes(times: &[f64], z: &[f64]) -> Result<SlopeVector> {
    forward_rule_slopes(times, z, harmonic_node_forward)
}

pub fn rational_limiter_slopes(times: &[f64], z: &[f64]) -> Result<SlopeVector> {
    forward_rule_slopes(times, z, |_, _, l, r| rational_limiter_node_forward(l, r))
}

pub fn van_albada_slopes(times: &[f64], z: &[f64]) -> Result<SlopeVector> {
    forward_rule_slopes(times, z, |_, _, l, r| van_albada_node_forward(l, r))
}

pub fn slopes(scheme: SlopeScheme, times: &[f64], z: &[f64]) -> Result<SlopeVector> {
    match scheme {
        SlopeScheme::Bessel => bessel_slopes(times, z),
        SlopeScheme::C2Natural => c2_natural_slopes(times, z),
        SlopeScheme::Harmonic => harmonic_slopes(times, z),
        SlopeScheme::RationalLimiter => rational_limiter_slopes(times, z),
        SlopeScheme::VanAlbada => van_albada_slopes(times, z),
        SlopeScheme::Lavery(spec) => lavery_slopes(times, z, spec),
    }
}

/// Slopes for `scheme` followed by Hermite assembly.
pub fn interpolate(scheme: SlopeScheme, times: &[f64], z: &[f64]) -> Result<PiecewiseCubic> {
    let s = slopes(scheme, times, z)?;
    hermite_coefficients(times, z, &s)
}
