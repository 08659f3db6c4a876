//! The unipotent upper-triangular Toeplitz matrix `T_n(x) = I + x N`, where
//! `N` has ones on the first superdiagonal.

use crate::dense::DenseMatrix;
use crate::error::{LabError, Result};

/// Largest exponent for which every `C(k, j)` fits in 64 bits.
pub const MAX_BINOMIAL_EXPONENT: u64 = 62;
/// Largest exponent accepted by repeated squaring.
pub const MAX_DIRECT_EXPONENT: u64 = 1 << 20;

/// `T_n(x)`: ones on the diagonal, `x` on the superdiagonal, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnipotentSpec {
    pub n: usize,
    pub x: f64,
}

impl UnipotentSpec {
    pub fn new(n: usize, x: f64) -> Result<Self> {
        if n == 0 {
            return Err(LabError::domain("matrix order must be at least 1"));
        }
        Ok(UnipotentSpec { n, x })
    }

    pub fn materialize(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                1.0
            } else if j == i + 1 {
                self.x
            } else {
                0.0
            }
        })
    }
}

/// `C(k, j)` by the multiplicative formula; each partial product
/// `C(k, t+1) = C(k, t) (k - t) / (t + 1)` divides exactly.
pub fn binomial(k: u64, j: u64) -> Result<u64> {
    if k > MAX_BINOMIAL_EXPONENT {
        return Err(LabError::SizeGuard {
            what: "binomial exponent",
            value: k,
            limit: MAX_BINOMIAL_EXPONENT,
        });
    }
    if j > k {
        return Ok(0);
    }
    let j = j.min(k - j);
    let mut c: u128 = 1;
    for t in 0..j {
        c = c * (k - t) as u128 / (t + 1) as u128;
    }
    Ok(c as u64)
}

/// `T_n(x)^k = Σ_{j <= min(k, n-1)} C(k, j) x^j N^j`.
pub fn power_binomial(spec: UnipotentSpec, k: u64) -> Result<DenseMatrix> {
    if k > MAX_BINOMIAL_EXPONENT {
        return Err(LabError::SizeGuard {
            what: "power exponent",
            value: k,
            limit: MAX_BINOMIAL_EXPONENT,
        });
    }
    let n = spec.n;
    let band = (k as usize).min(n - 1);
    let mut out = DenseMatrix::zeros(n, n);
    for j in 0..=band {
        let value = binomial(k, j as u64)? as f64 * spec.x.powi(j as i32);
        for i in 0..n - j {
            out.set(i, i + j, value);
        }
    }
    Ok(out)
}

/// `T_n(x)^k` by square-and-multiply.
pub fn power_direct(spec: UnipotentSpec, k: u64) -> Result<DenseMatrix> {
    if k > MAX_DIRECT_EXPONENT {
        return Err(LabError::SizeGuard {
            what: "power exponent",
            value: k,
            limit: MAX_DIRECT_EXPONENT,
        });
    }
    let mut result = DenseMatrix::identity(spec.n);
    let mut base = spec.materialize();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = result.matmul(&base)?;
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base)?;
        }
    }
    Ok(result)
}

/// The `n` eigenvalues of `T_n(x)`, the diagonal of a triangular matrix: all 1.
pub fn eigenvalues_unipotent(spec: UnipotentSpec) -> Vec<f64> {
    vec![1.0; spec.n]
}

/// LU determinant of `T_n(x) - λ I`; equals `(1 - λ)^n` exactly in theory.
pub fn characteristic_det(spec: UnipotentSpec, lambda: f64) -> Result<f64> {
    let mut m = spec.materialize();
    for i in 0..spec.n {
        m.set(i, i, 1.0 - lambda);
    }
    m.determinant()
}

/// `coefficient · x^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    pub coefficient: u64,
    pub power: u32,
}

/// Entry `(i, j)` of `T_n(x)^k` as a monomial: the number of `k`-step words
/// over {stay, step right} with exactly `j - i` right steps, weighted by
/// `x^{j-i}`.
pub fn path_count(n: usize, k: u64, i: usize, j: usize) -> Result<Monomial> {
    if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(LabError::domain(format!("indices ({i}, {j}) outside 1..={n}")));
    }
    let zero = Monomial {
        coefficient: 0,
        power: 0,
    };
    if j < i {
        return Ok(zero);
    }
    let steps = (j - i) as u64;
    if steps > k.min(n as u64 - 1) {
        return Ok(zero);
    }
    Ok(Monomial {
        coefficient: binomial(k, steps)?,
        power: steps as u32,
    })
}
