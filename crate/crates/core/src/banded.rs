//! The tridiagonal Toeplitz matrix `E_n(x)` with `e_0 = 1`, `e_1 = x`,
//! `e_{-1} = -1`, and its determinant as an integer polynomial in `x`.

use std::fmt;

use crate::error::{LabError, Result};
use crate::toeplitz::{materialize, ToeplitzSymbol};

/// Largest order accepted by the Leibniz enumeration.
pub const LEIBNIZ_MAX_ORDER: usize = 20;

/// Integer polynomial, coefficient `j` multiplies `x^j`. Trailing zeros are
/// never stored, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial::default()
    }

    pub fn one() -> Self {
        IntPolynomial::new(vec![1])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> i64 {
        self.coeffs.get(j).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `x · self`.
    pub fn shift(&self) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0);
        coeffs.extend_from_slice(&self.coeffs);
        IntPolynomial { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..len).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    /// Adds `coefficient · x^power` in place.
    pub fn add_monomial(&mut self, coefficient: i64, power: usize) {
        if self.coeffs.len() <= power {
            self.coeffs.resize(power + 1, 0);
        }
        self.coeffs[power] += coefficient;
        *self = IntPolynomial::new(std::mem::take(&mut self.coeffs));
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }

    pub fn eval_int(&self, x: i64) -> i128 {
        self.coeffs
            .iter()
            .rev()
            .fold(0i128, |acc, &c| acc * x as i128 + c as i128)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.unsigned_abs();
            match (j, mag) {
                (0, _) => write!(f, "{mag}")?,
                (1, 1) => f.write_str("x")?,
                (1, _) => write!(f, "{mag}x")?,
                (_, 1) => write!(f, "x^{j}")?,
                _ => write!(f, "{mag}x^{j}")?,
            }
        }
        Ok(())
    }
}

/// `E_n(x)` as a Toeplitz symbol.
pub fn banded_symbol(n: usize, x: f64) -> Result<ToeplitzSymbol> {
    ToeplitzSymbol::from_diagonals(n, |k| match k {
        0 => 1.0,
        1 => x,
        -1 => -1.0,
        _ => 0.0,
    })
}

/// `det E_n(x)` from `D_n = D_{n-1} + x D_{n-2}`, `D_0 = D_1 = 1`.
///
/// Expanding along the last row: the `1` on the diagonal leaves `E_{n-1}`,
/// and the `-1` beside it pairs with the `x` above to give `+x · E_{n-2}`.
pub fn det_recurrence(n: usize) -> Result<IntPolynomial> {
    if n == 0 {
        return Err(LabError::domain("matrix order must be at least 1"));
    }
    let (mut older, mut newer) = (IntPolynomial::one(), IntPolynomial::one());
    for _ in 2..=n {
        let next = newer.add(&older.shift());
        older = std::mem::replace(&mut newer, next);
    }
    Ok(newer)
}

/// Sum over all `σ` with `|σ(i) - i| <= 1` of `sgn(σ) · x^{#forward} · (-1)^{#backward}`.
///
/// Such permutations are products of disjoint adjacent transpositions; they
/// are generated left to right, each position either fixed or opening a swap
/// with its right neighbour. For each one the sign is computed from its
/// inversion count, and forward (`σ(i) = i + 1`) and backward (`σ(i) = i - 1`)
/// steps are counted from the image, all three factors independently.
pub fn det_leibniz_bounded(n: usize) -> Result<IntPolynomial> {
    if n == 0 {
        return Err(LabError::domain("matrix order must be at least 1"));
    }
    if n > LEIBNIZ_MAX_ORDER {
        return Err(LabError::SizeGuard {
            what: "Leibniz enumeration order",
            value: n as u64,
            limit: LEIBNIZ_MAX_ORDER as u64,
        });
    }
    let mut total = IntPolynomial::zero();
    let mut image: Vec<usize> = (1..=n).collect();
    enumerate_tilings(&mut image, 0, &mut |sigma| {
        let forward = sigma.iter().enumerate().filter(|&(i, &v)| v == i + 2).count();
        let backward = sigma.iter().enumerate().filter(|&(i, &v)| v == i).count();
        let sign = permutation_sign(sigma);
        let backward_sign = if backward.is_multiple_of(2) { 1 } else { -1 };
        total.add_monomial(sign * backward_sign, forward);
    });
    Ok(total)
}

fn enumerate_tilings(image: &mut [usize], pos: usize, visit: &mut impl FnMut(&[usize])) {
    let n = image.len();
    if pos >= n {
        visit(image);
        return;
    }
    enumerate_tilings(image, pos + 1, visit);
    if pos + 1 < n {
        image.swap(pos, pos + 1);
        enumerate_tilings(image, pos + 2, visit);
        image.swap(pos, pos + 1);
    }
}

/// `(-1)^{inversions}`.
fn permutation_sign(image: &[usize]) -> i64 {
    let mut inversions = 0usize;
    for i in 0..image.len() {
        for j in (i + 1)..image.len() {
            inversions += usize::from(image[i] > image[j]);
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// LU determinant of the materialized `E_n(x_value)`.
pub fn det_numeric(n: usize, x_value: f64) -> Result<f64> {
    materialize(&banded_symbol(n, x_value)?).determinant()
}
