//! Piecewise cubic polynomials in local (Hermite) form.

use crate::error::{Error, Result};

/// Coefficients `[c0, c1, c2, c3]` of `c0 + c1 x + c2 x^2 + c3 x^3`.
pub type Cubic = [f64; 4];

/// Coefficients of `x -> p(delta + x)`.
pub fn shift(c: Cubic, delta: f64) -> Cubic {
    let [c0, c1, c2, c3] = c;
    [
        c0 + delta * (c1 + delta * (c2 + delta * c3)),
        c1 + delta * (2.0 * c2 + 3.0 * delta * c3),
        c2 + 3.0 * delta * c3,
        c3,
    ]
}

/// Value of the `order`-th derivative of the cubic at local offset `x`.
pub fn eval_cubic(c: &Cubic, x: f64, order: u8) -> f64 {
    let [c0, c1, c2, c3] = *c;
    match order {
        0 => c0 + x * (c1 + x * (c2 + x * c3)),
        1 => c1 + x * (2.0 * c2 + 3.0 * x * c3),
        2 => 2.0 * c2 + 6.0 * x * c3,
        3 => 6.0 * c3,
        _ => 0.0,
    }
}

pub(crate) fn check_increasing(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("non-finite knot".into()));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "knots not strictly increasing: {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// A piecewise cubic on knots `t_0 < ... < t_n`. Piece `i` covers
/// `[t_i, t_{i+1})` and is stored relative to `t_i`. Outside the knot range
/// the first/last piece is extended.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCubic {
    knots: Vec<f64>,
    coeffs: Vec<Cubic>,
}

impl PiecewiseCubic {
    pub fn new(knots: Vec<f64>, coeffs: Vec<Cubic>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::TooFewKnots {
                need: 2,
                got: knots.len(),
            });
        }
        check_increasing(&knots)?;
        if coeffs.len() != knots.len() - 1 {
            return Err(Error::LengthMismatch {
                expected: knots.len() - 1,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidGrid("non-finite coefficient".into()));
        }
        Ok(PiecewiseCubic { knots, coeffs })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn coeffs(&self) -> &[Cubic] {
        &self.coeffs
    }

    pub fn num_pieces(&self) -> usize {
        self.coeffs.len()
    }

    pub fn start(&self) -> f64 {
        self.knots[0]
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    /// Index of the piece used at `t`.
    pub fn piece_index(&self, t: f64) -> usize {
        let k = self.knots.partition_point(|&x| x <= t);
        k.saturating_sub(1).min(self.coeffs.len() - 1)
    }

    pub fn derivative(&self, t: f64, order: u8) -> f64 {
        let i = self.piece_index(t);
        eval_cubic(&self.coeffs[i], t - self.knots[i], order)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(t, 0)
    }

    /// Evaluate piece `i` at `t`, regardless of which piece owns `t`. Used
    /// for one-sided limits at knots.
    pub fn piece_derivative(&self, i: usize, t: f64, order: u8) -> f64 {
        eval_cubic(&self.coeffs[i], t - self.knots[i], order)
    }

    /// Largest jump of the `order`-th derivative across interior knots.
    pub fn max_jump(&self, order: u8) -> f64 {
        (1..self.coeffs.len())
            .map(|i| {
                let t = self.knots[i];
                (self.piece_derivative(i - 1, t, order) - self.piece_derivative(i, t, order)).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn piece_lookup_uses_half_open_intervals() {
        let pp = PiecewiseCubic::new(
            vec![0.0, 1.0, 2.0],
            vec![[0.0, 1.0, 0.0, 0.0], [10.0, 0.0, 0.0, 0.0]],
        )
        .unwrap();
        assert_eq!(pp.piece_index(-1.0), 0);
        assert_eq!(pp.piece_index(0.5), 0);
        assert_eq!(pp.piece_index(1.0), 1);
        assert_eq!(pp.piece_index(2.0), 1);
        assert_eq!(pp.piece_index(5.0), 1);
        assert_eq!(pp.value(0.5), 0.5);
        assert_eq!(pp.value(1.0), 10.0);
        assert_eq!(pp.max_jump(0), 9.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PiecewiseCubic::new(vec![0.0], vec![]).is_err());
        assert!(PiecewiseCubic::new(vec![0.0, 0.0], vec![[0.0; 4]]).is_err());
        assert!(PiecewiseCubic::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(PiecewiseCubic::new(vec![0.0, 1.0], vec![[f64::NAN, 0.0, 0.0, 0.0]]).is_err());
    }

    proptest! {
        #[test]
        fn shift_is_taylor_expansion(
            c in prop::array::uniform4(-5.0f64..5.0),
            delta in -2.0f64..2.0,
            x in -2.0f64..2.0,
        ) {
            let s = shift(c, delta);
            for order in 0..4u8 {
                let a = eval_cubic(&s, x, order);
                let b = eval_cubic(&c, delta + x, order);
                prop_assert!((a - b).abs() < 1e-11 * (1.0 + b.abs()));
            }
        }
    }
}
