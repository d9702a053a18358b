//! Forward-rate space constructions: the smart quadratic (monotone convex
//! without the shape fix-ups) and the area preserving C1 quadratic spline.
//!
//! Both interpolate the instantaneous forward `f` with a quadratic on each
//! interval whose mean equals the interval's discrete forward `f_i^d`; they
//! differ in how the node forwards `f_i` are chosen.

use chrono::NaiveDate;

use crate::curve::{CurveScheme, DateGrid, DiscountCurve, ZeroCurve};
use crate::error::{Error, Result};
use crate::interpolation::{tridiagonal_solve, TridiagonalSystem};
use crate::pp::{Cubic, PiecewiseCubic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardKind {
    SmartQuadratic,
    AreaPreserving,
}

fn check_forwards(times: &[f64], fd: &[f64]) -> Result<()> {
    if fd.is_empty() {
        return Err(Error::TooFewKnots {
            need: 2,
            got: times.len(),
        });
    }
    if times.len() != fd.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: times.len() - 1,
            got: fd.len(),
        });
    }
    crate::pp::check_increasing(times)
}

/// Node forwards of the smart quadratic: time-weighted average of the two
/// adjacent discrete forwards, with end values extrapolated so that the
/// quadratic has zero curvature-free slope at the ends.
pub fn hagan_node_forwards(times: &[f64], fd: &[f64]) -> Result<Vec<f64>> {
    check_forwards(times, fd)?;
    let n = fd.len();
    let mut f = vec![0.0; n + 1];
    if n == 1 {
        f[0] = fd[0];
        f[1] = fd[0];
        return Ok(f);
    }
    for i in 1..n {
        let (l, r) = (times[i] - times[i - 1], times[i + 1] - times[i]);
        f[i] = (l * fd[i] + r * fd[i - 1]) / (times[i + 1] - times[i - 1]);
    }
    f[0] = fd[0] - 0.5 * (f[1] - fd[0]);
    f[n] = fd[n - 1] - 0.5 * (f[n - 1] - fd[n - 1]);
    Ok(f)
}

/// Derivative-matching system of the area preserving spline.
///
/// On interval `i` of length `h_i` the spline has end derivatives
/// `(-4 f_{i-1} - 2 f_i + 6 fd_i) / h_i` and `(2 f_{i-1} + 4 f_i - 6 fd_i) / h_i`.
/// Matching them at interior knots and setting them to zero at both ends
/// gives the rows assembled here.
pub fn area_preserving_system(times: &[f64], fd: &[f64]) -> Result<TridiagonalSystem> {
    check_forwards(times, fd)?;
    let n = fd.len();
    let mut sys = TridiagonalSystem::zeros(n + 1);
    sys.diag[0] = 2.0;
    sys.sup[0] = 1.0;
    sys.rhs[0] = 3.0 * fd[0];
    for i in 1..n {
        let (hl, hr) = (times[i] - times[i - 1], times[i + 1] - times[i]);
        sys.sub[i] = hr;
        sys.diag[i] = 2.0 * (hl + hr);
        sys.sup[i] = hl;
        sys.rhs[i] = 3.0 * (hr * fd[i - 1] + hl * fd[i]);
    }
    sys.sub[n] = 1.0;
    sys.diag[n] = 2.0;
    sys.rhs[n] = 3.0 * fd[n - 1];
    Ok(sys)
}

pub fn area_preserving_node_forwards(times: &[f64], fd: &[f64]) -> Result<Vec<f64>> {
    tridiagonal_solve(&area_preserving_system(times, fd)?)
}

/// Instantaneous forward interpolated directly in forward space.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardSplineCurve {
    grid: DateGrid,
    /// Log-discount at the knots, `z_0 = 0`.
    z: Vec<f64>,
    fd: Vec<f64>,
    f: Vec<f64>,
    kind: ForwardKind,
}

impl ForwardSplineCurve {
    /// Build from discrete forwards on consecutive intervals of a grid that
    /// starts at `t = 0`.
    pub fn from_discrete_forwards(grid: DateGrid, fd: Vec<f64>, kind: ForwardKind) -> Result<Self> {
        let t = grid.times();
        if t[0] != 0.0 {
            return Err(Error::InvalidGrid(
                "forward curve grid must start at t = 0".into(),
            ));
        }
        check_forwards(t, &fd)?;
        let mut z = Vec::with_capacity(t.len());
        z.push(0.0);
        for i in 0..fd.len() {
            z.push(z[i] - fd[i] * (t[i + 1] - t[i]));
        }
        Self::assemble(grid, z, fd, kind)
    }

    /// Build from log-discount values; `t = 0` is prepended as for
    /// [`ZeroCurve`].
    pub fn from_log_discounts(grid: DateGrid, z: Vec<f64>, kind: ForwardKind) -> Result<Self> {
        let (grid, z) = grid.with_origin(z)?;
        let t = grid.times();
        if t.len() < 2 {
            return Err(Error::TooFewKnots {
                need: 2,
                got: t.len(),
            });
        }
        let fd = (1..t.len())
            .map(|i| -((z[i] - z[i - 1]) / (t[i] - t[i - 1])))
            .collect();
        Self::assemble(grid, z, fd, kind)
    }

    fn assemble(grid: DateGrid, z: Vec<f64>, fd: Vec<f64>, kind: ForwardKind) -> Result<Self> {
        let f = match kind {
            ForwardKind::SmartQuadratic => hagan_node_forwards(grid.times(), &fd)?,
            ForwardKind::AreaPreserving => area_preserving_node_forwards(grid.times(), &fd)?,
        };
        Ok(ForwardSplineCurve {
            grid,
            z,
            fd,
            f,
            kind,
        })
    }

    pub fn grid(&self) -> &DateGrid {
        &self.grid
    }

    pub fn kind(&self) -> ForwardKind {
        self.kind
    }

    pub fn discrete_forwards(&self) -> &[f64] {
        &self.fd
    }

    pub fn node_forwards(&self) -> &[f64] {
        &self.f
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.z
    }

    fn t(&self) -> &[f64] {
        self.grid.times()
    }

    /// Interval `i` (1-based, `[t_{i-1}, t_i)`) containing `t`, or `None`
    /// outside the grid.
    fn interval(&self, t: f64) -> Option<usize> {
        let times = self.t();
        if t < times[0] || t >= times[times.len() - 1] {
            return None;
        }
        Some(times.partition_point(|&x| x <= t))
    }

    fn local(&self, i: usize, t: f64) -> (f64, f64) {
        let (a, b) = (self.t()[i - 1], self.t()[i]);
        ((t - a) / (b - a), b - a)
    }

    /// Instantaneous forward; flat beyond the grid.
    pub fn forward(&self, t: f64) -> f64 {
        match self.interval(t) {
            None if t < self.t()[0] => self.f[0],
            None => self.f[self.f.len() - 1],
            Some(i) => {
                let (x, _) = self.local(i, t);
                match self.kind {
                    ForwardKind::SmartQuadratic => self.smart_quadratic_at(i, x),
                    ForwardKind::AreaPreserving => self.area_preserving_at(i, x),
                }
            }
        }
    }

    fn smart_quadratic_at(&self, i: usize, x: f64) -> f64 {
        let fd = self.fd[i - 1];
        let g0 = self.f[i - 1] - fd;
        let g1 = self.f[i] - fd;
        g0 * (1.0 - 4.0 * x + 3.0 * x * x) + g1 * (-2.0 * x + 3.0 * x * x) + fd
    }

    fn area_preserving_at(&self, i: usize, x: f64) -> f64 {
        let (fl, fr, fd) = (self.f[i - 1], self.f[i], self.fd[i - 1]);
        fl * (1.0 - x) + fr * x - 3.0 * (fl + fr - 2.0 * fd) * x * (1.0 - x)
    }

    /// `f = a0 + a1 x + a2 x^2` on interval `i` in the local variable `x`.
    fn quadratic(&self, i: usize) -> [f64; 3] {
        let (fl, fr, fd) = (self.f[i - 1], self.f[i], self.fd[i - 1]);
        match self.kind {
            ForwardKind::SmartQuadratic => {
                let (g0, g1) = (fl - fd, fr - fd);
                [fd + g0, -4.0 * g0 - 2.0 * g1, 3.0 * (g0 + g1)]
            }
            ForwardKind::AreaPreserving => {
                let b = fl + fr - 2.0 * fd;
                [fl, fr - fl - 3.0 * b, 3.0 * b]
            }
        }
    }

    /// Integral of the local forward over `x in [0, xe]`, per unit length.
    fn mean_area(&self, i: usize, xe: f64) -> f64 {
        match self.kind {
            ForwardKind::SmartQuadratic => {
                let fd = self.fd[i - 1];
                let (g0, g1) = (self.f[i - 1] - fd, self.f[i] - fd);
                g0 * xe * (1.0 - 2.0 * xe + xe * xe) + g1 * xe * xe * (xe - 1.0) + fd * xe
            }
            ForwardKind::AreaPreserving => {
                let (fl, fr, fd) = (self.f[i - 1], self.f[i], self.fd[i - 1]);
                let b = fl + fr - 2.0 * fd;
                fl * (xe - 0.5 * xe * xe) + fr * 0.5 * xe * xe
                    - 3.0 * b * xe * xe * (0.5 - xe / 3.0)
            }
        }
    }

    /// Equivalent piecewise cubic in log-discount space (exact).
    pub fn log_discount_pp(&self) -> Result<PiecewiseCubic> {
        let t = self.t();
        let coeffs: Vec<Cubic> = (1..t.len())
            .map(|i| {
                let h = t[i] - t[i - 1];
                let [a0, a1, a2] = self.quadratic(i);
                [self.z[i - 1], -a0, -a1 / (2.0 * h), -a2 / (3.0 * h * h)]
            })
            .collect();
        PiecewiseCubic::new(t.to_vec(), coeffs)
    }

    pub fn to_zero_curve(&self) -> Result<ZeroCurve> {
        ZeroCurve::from_parts(
            self.grid.clone(),
            self.z.clone(),
            self.log_discount_pp()?,
            CurveScheme::Forward(self.kind),
        )
    }
}

impl DiscountCurve for ForwardSplineCurve {
    fn valuation_date(&self) -> NaiveDate {
        self.grid.valuation_date()
    }

    fn log_discount(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        let times = self.t();
        let n = times.len() - 1;
        if t >= times[n] {
            return Ok(self.z[n] - self.f[n] * (t - times[n]));
        }
        let i = self.interval(t).expect("t within grid");
        let (x, h) = self.local(i, t);
        Ok(self.z[i - 1] - h * self.mean_area(i, x))
    }
}

/// Smart quadratic forward at `t`.
pub fn smart_quadratic_eval(curve: &ForwardSplineCurve, t: f64) -> Result<f64> {
    if curve.kind != ForwardKind::SmartQuadratic {
        return Err(Error::SchemeNotAllowed(
            "area-preserving curve in smart quadratic eval".into(),
        ));
    }
    Ok(curve.forward(t))
}

/// Area preserving quadratic spline forward at `t`.
pub fn area_preserving_eval(curve: &ForwardSplineCurve, t: f64) -> Result<f64> {
    if curve.kind != ForwardKind::AreaPreserving {
        return Err(Error::SchemeNotAllowed(
            "smart quadratic curve in area preserving eval".into(),
        ));
    }
    Ok(curve.forward(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::{bessel_slopes, c2_natural_slopes};

    fn val() -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap()
    }

    fn curve(times: &[f64], fd: &[f64], kind: ForwardKind) -> ForwardSplineCurve {
        let grid = DateGrid::new(val(), times.to_vec()).unwrap();
        ForwardSplineCurve::from_discrete_forwards(grid, fd.to_vec(), kind).unwrap()
    }

    fn cumulative(times: &[f64], fd: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0];
        for i in 0..fd.len() {
            z.push(z[i] - fd[i] * (times[i + 1] - times[i]));
        }
        z
    }

    const T: [f64; 7] = [0.0, 0.25, 0.3, 1.0, 2.5, 3.0, 7.0];
    const FD: [f64; 6] = [0.015, 0.02, 0.012, -0.004, 0.03, 0.025];

    #[test]
    fn hagan_examples() {
        assert_eq!(
            hagan_node_forwards(&[0.0, 1.0, 2.0], &[0.02, 0.02]).unwrap(),
            vec![0.02; 3]
        );
        let f = hagan_node_forwards(&[0.0, 1.0, 2.0], &[0.01, 0.03]).unwrap();
        assert!((f[1] - 0.02).abs() < 1e-17);
        assert!((f[0] - 0.005).abs() < 1e-17);
        assert!((f[2] - 0.035).abs() < 1e-17);
        assert_eq!(
            hagan_node_forwards(&[0.0, 2.0], &[0.04]).unwrap(),
            vec![0.04, 0.04]
        );
        assert!(hagan_node_forwards(&[0.0], &[]).is_err());
    }

    #[test]
    fn hagan_matches_negative_bessel_slopes() {
        let f = hagan_node_forwards(&T, &FD).unwrap();
        let s = bessel_slopes(&T, &cumulative(&T, &FD)).unwrap();
        for (a, b) in f.iter().zip(s.iter()) {
            assert!((a + b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn area_preserving_matches_negative_c2_slopes() {
        let f = area_preserving_node_forwards(&T, &FD).unwrap();
        let s = c2_natural_slopes(&T, &cumulative(&T, &FD)).unwrap();
        for (a, b) in f.iter().zip(s.iter()) {
            assert!((a + b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn flat_forwards_stay_flat() {
        for kind in [ForwardKind::SmartQuadratic, ForwardKind::AreaPreserving] {
            let c = curve(&T, &[0.02; 6], kind);
            assert!(c.node_forwards().iter().all(|f| (f - 0.02).abs() < 1e-16));
            for k in 0..100 {
                assert!((c.forward(k as f64 * 0.08) - 0.02).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn endpoints_and_interval_means() {
        for kind in [ForwardKind::SmartQuadratic, ForwardKind::AreaPreserving] {
            let c = curve(&T, &FD, kind);
            let f = c.node_forwards();
            for i in 1..T.len() {
                let (a, b) = (T[i - 1], T[i]);
                assert!((c.forward(a) - f[i - 1]).abs() < 1e-16);
                // left limit at b
                let (x, _) = c.local(i, b);
                let end = match kind {
                    ForwardKind::SmartQuadratic => c.smart_quadratic_at(i, x),
                    ForwardKind::AreaPreserving => c.area_preserving_at(i, x),
                };
                assert!((end - f[i]).abs() < 1e-16);
                // Simpson is exact on quadratics
                let mean = (c.forward(a) + 4.0 * c.forward(0.5 * (a + b)) + end) / 6.0;
                assert!((mean - FD[i - 1]).abs() < 1e-12 * 0.03);
                assert!((c.mean_area(i, 1.0) - FD[i - 1]).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn area_preserving_is_c1_with_flat_ends() {
        let c = curve(&T, &FD, ForwardKind::AreaPreserving);
        let pp = c.log_discount_pp().unwrap();
        // pp'' = -f'
        assert!(pp.max_jump(2) < 1e-10 * 0.03);
        assert!(pp.derivative(0.0, 2).abs() < 1e-12);
        let last = pp.num_pieces() - 1;
        assert!(pp.piece_derivative(last, 7.0, 2).abs() < 1e-12);
        let smart = curve(&T, &FD, ForwardKind::SmartQuadratic)
            .log_discount_pp()
            .unwrap();
        assert!(smart.max_jump(1) < 1e-15);
        assert!(smart.max_jump(2) > 1e-4);
    }

    #[test]
    fn symmetric_data_gives_symmetric_forwards() {
        let t = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let fd = [0.01, 0.03, 0.02, 0.03, 0.01];
        let f = area_preserving_node_forwards(&t, &fd).unwrap();
        for i in 0..f.len() {
            assert!((f[i] - f[f.len() - 1 - i]).abs() < 1e-16);
        }
    }

    #[test]
    fn log_discount_matches_pp_and_knots() {
        for kind in [ForwardKind::SmartQuadratic, ForwardKind::AreaPreserving] {
            let c = curve(&T, &FD, kind);
            let pp = c.log_discount_pp().unwrap();
            for k in 0..=800 {
                let t = k as f64 * 0.01;
                let a = c.log_discount(t).unwrap();
                let b = if t >= 7.0 {
                    c.knot_values()[6] - c.node_forwards()[6] * (t - 7.0)
                } else {
                    pp.value(t)
                };
                assert!((a - b).abs() < 1e-15, "{t}: {a} vs {b}");
                if t < 7.0 {
                    assert!((c.forward(t) + pp.derivative(t, 1)).abs() < 1e-15);
                }
            }
            let z = cumulative(&T, &FD);
            for i in 0..T.len() {
                assert!((c.log_discount(T[i]).unwrap() - z[i]).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn eval_checks_kind() {
        let c = curve(&T, &FD, ForwardKind::SmartQuadratic);
        assert!(smart_quadratic_eval(&c, 0.5).is_ok());
        assert!(area_preserving_eval(&c, 0.5).is_err());
        assert_eq!(
            smart_quadratic_eval(&c, 100.0).unwrap(),
            c.node_forwards()[6]
        );
        assert_eq!(
            smart_quadratic_eval(&c, -1.0).unwrap(),
            c.node_forwards()[0]
        );
    }

    #[test]
    fn requires_origin() {
        let grid = DateGrid::new(val(), vec![1.0, 2.0]).unwrap();
        assert!(ForwardSplineCurve::from_discrete_forwards(
            grid,
            vec![0.01],
            ForwardKind::SmartQuadratic
        )
        .is_err());
    }
}
