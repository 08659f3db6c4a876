//! Toeplitz matrices stored by their diagonal coefficients.
//!
//! An `n x n` Toeplitz matrix is determined by the `2n - 1` values `a_k`,
//! `k = -(n-1) ..= n-1`, with `a_k` placed on every entry `(i, j)` whose
//! 1-based indices satisfy `i - j = k`. Coefficients are kept in a 0-based
//! vector with offset `n - 1`; the dense form is built only on request.

use num_complex::Complex64;

use crate::dense::DenseMatrix;
use crate::error::{LabError, Result};
use crate::fft::{fft_in_place, Direction};

/// Univariate profile `f` on `[-1, 1]` used to scale a kernel into a symbol
/// `a_k = f(k / n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelFunction {
    /// `f(x) = 1 - |x|`.
    Triangular,
    Constant(f64),
    Tabulated(TabulatedProfile),
}

impl KernelFunction {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            KernelFunction::Triangular => Ok(1.0 - x.abs()),
            KernelFunction::Constant(c) => Ok(*c),
            KernelFunction::Tabulated(t) => t.eval(x),
        }
    }
}

/// Piecewise-linear profile through `(nodes[i], values[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedProfile {
    /// Nodes must be finite, strictly increasing, at least two of them.
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(LabError::Dimension {
                expected: nodes.len(),
                got: values.len(),
            });
        }
        if nodes.len() < 2 {
            return Err(LabError::domain("a tabulated profile needs at least 2 nodes"));
        }
        if nodes.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(LabError::domain("tabulated profile has non-finite entries"));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::domain("tabulated nodes must be strictly increasing"));
        }
        Ok(TabulatedProfile { nodes, values })
    }

    /// Whether the grid spans all of `[-1, 1]`.
    pub fn covers_unit_interval(&self) -> bool {
        self.nodes[0] <= -1.0 && *self.nodes.last().unwrap() >= 1.0
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let first = self.nodes[0];
        let last = *self.nodes.last().unwrap();
        if !(first..=last).contains(&x) {
            return Err(LabError::domain(format!(
                "tabulated profile is undefined at {x} (grid covers [{first}, {last}])"
            )));
        }
        // index of the first node strictly greater than x, clamped to a valid segment
        let upper = self.nodes.partition_point(|&t| t <= x).clamp(1, self.nodes.len() - 1);
        let (x0, x1) = (self.nodes[upper - 1], self.nodes[upper]);
        let (y0, y1) = (self.values[upper - 1], self.values[upper]);
        if x == x0 {
            return Ok(y0);
        }
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }
}

/// Coefficient representation of an `n x n` Toeplitz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSymbol {
    n: usize,
    coeffs: Vec<f64>,
    symmetric: bool,
}

impl ToeplitzSymbol {
    /// `coeffs[k + n - 1] = a_k`. The symmetric flag is derived from the data.
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(LabError::domain("matrix order must be at least 1"));
        }
        if coeffs.len() != 2 * n - 1 {
            return Err(LabError::Dimension {
                expected: 2 * n - 1,
                got: coeffs.len(),
            });
        }
        let symmetric = coeffs.iter().eq(coeffs.iter().rev());
        Ok(ToeplitzSymbol {
            n,
            coeffs,
            symmetric,
        })
    }

    /// Builds `a_k = f(k)` for `k = -(n-1) ..= n-1`.
    pub fn from_diagonals(n: usize, mut f: impl FnMut(i64) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(LabError::domain("matrix order must be at least 1"));
        }
        let reach = n as i64 - 1;
        Self::new(n, (-reach..=reach).map(&mut f).collect())
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_diagonals(n, |k| if k == 0 { 1.0 } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Coefficients ordered `a_{-(n-1)}, ..., a_{n-1}`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `a_k`; zero outside the band `|k| <= n - 1`.
    #[inline]
    pub fn coeff(&self, k: i64) -> f64 {
        let reach = self.n as i64 - 1;
        if k.abs() > reach {
            0.0
        } else {
            self.coeffs[(k + reach) as usize]
        }
    }

    pub fn scale(&self, factor: f64) -> ToeplitzSymbol {
        ToeplitzSymbol {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            symmetric: self.symmetric,
        }
    }
}

/// `a_k = f(k / n)` for `-(n-1) <= k <= n-1`.
pub fn from_scaled_kernel(f: &KernelFunction, n: usize) -> Result<ToeplitzSymbol> {
    if n == 0 {
        return Err(LabError::domain("matrix order must be at least 1"));
    }
    let reach = n as i64 - 1;
    let coeffs = (-reach..=reach)
        .map(|k| f.eval(k as f64 / n as f64))
        .collect::<Result<Vec<_>>>()?;
    ToeplitzSymbol::new(n, coeffs)
}

/// The matrix `K_n` with entries `1 - |i - j| / n`.
pub fn triangular_symbol(n: usize) -> Result<ToeplitzSymbol> {
    ToeplitzSymbol::from_diagonals(n, |m| 1.0 - (m as f64 / n as f64).abs())
}

/// Dense `n x n` matrix with entry `(i, j) = a_{i-j}`.
pub fn materialize(s: &ToeplitzSymbol) -> DenseMatrix {
    DenseMatrix::from_fn(s.n, s.n, |i, j| s.coeff(i as i64 - j as i64))
}

fn check_len(s: &ToeplitzSymbol, v: &[f64]) -> Result<()> {
    if v.len() != s.n {
        return Err(LabError::Dimension {
            expected: s.n,
            got: v.len(),
        });
    }
    Ok(())
}

/// Direct `O(n^2)` product.
pub fn matvec_naive(s: &ToeplitzSymbol, v: &[f64]) -> Result<Vec<f64>> {
    check_len(s, v)?;
    let n = s.n;
    let reach = n - 1;
    Ok((0..n)
        .map(|i| {
            // a_{i-j} lives at coeffs[i - j + reach]; walk j upward, index downward
            v.iter()
                .enumerate()
                .map(|(j, vj)| s.coeffs[i + reach - j] * vj)
                .sum()
        })
        .collect())
}

/// Product via circulant embedding of length `2^ceil(log2(2n - 1))`.
pub fn matvec_fft(s: &ToeplitzSymbol, v: &[f64]) -> Result<Vec<f64>> {
    check_len(s, v)?;
    let n = s.n;
    let len = (2 * n - 1).next_power_of_two();

    // first column of the circulant: c[k] = a_k, c[len - k] = a_{-k}
    let mut column = vec![Complex64::new(0.0, 0.0); len];
    for (k, c) in column.iter_mut().take(n).enumerate() {
        *c = Complex64::new(s.coeff(k as i64), 0.0);
    }
    for k in 1..n {
        column[len - k] = Complex64::new(s.coeff(-(k as i64)), 0.0);
    }
    let mut padded = vec![Complex64::new(0.0, 0.0); len];
    for (p, &x) in padded.iter_mut().zip(v) {
        p.re = x;
    }

    fft_in_place(&mut column, Direction::Forward);
    fft_in_place(&mut padded, Direction::Forward);
    for (p, c) in padded.iter_mut().zip(&column) {
        *p *= c;
    }
    fft_in_place(&mut padded, Direction::Inverse);

    Ok(padded[..n].iter().map(|z| z.re).collect())
}

/// `n * a_0`.
pub fn trace(s: &ToeplitzSymbol) -> f64 {
    s.n as f64 * s.coeff(0)
}
