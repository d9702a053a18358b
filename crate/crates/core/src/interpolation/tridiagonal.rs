use crate::error::{Error, Result};

/// Tridiagonal system `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
/// `sub[0]` and `sup[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn zeros(n: usize) -> Self {
        TridiagonalSystem {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
            rhs: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x` for the stored matrix.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// Thomas algorithm, no pivoting. Callers are expected to pass diagonally
/// dominant systems.
pub fn tridiagonal_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let n = sys.len();
    for v in [&sys.sub, &sys.sup, &sys.rhs] {
        if v.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = sys.diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::SingularSystem { row: 0 });
    }
    c[0] = sys.sup[0] / pivot;
    d[0] = sys.rhs[0] / pivot;
    for i in 1..n {
        pivot = sys.diag[i] - sys.sub[i] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularSystem { row: i });
        }
        c[i] = if i + 1 < n { sys.sup[i] / pivot } else { 0.0 };
        d[i] = (sys.rhs[i] - sys.sub[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}
