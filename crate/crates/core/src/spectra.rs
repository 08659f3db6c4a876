//! Dense symmetric eigenvalues and the spectral quantities built on them.

use std::f64::consts::PI;

use crate::dense::DenseMatrix;
use crate::error::{LabError, Result};
use crate::toeplitz::{matvec_naive, ToeplitzSymbol};

/// Componentwise tolerance for accepting an input as symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiOptions {
    /// Stop once the off-diagonal Frobenius norm is at most `tolerance · ‖A‖_F`.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        JacobiOptions {
            tolerance: 1e-12,
            max_sweeps: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    pub sweeps: usize,
    /// Off-diagonal Frobenius norm of the final working matrix.
    pub off_norm: f64,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += a[i * n + j] * a[i * n + j];
        }
    }
    (2.0 * sum).sqrt()
}

/// Cyclic-by-row Jacobi eigenvalue iteration on a private copy of `m`.
///
/// Each rotation `(p, q)` annihilates `a_pq`; the full symmetric working
/// matrix is kept so row updates run over contiguous memory and columns
/// are mirrored afterwards.
pub fn jacobi_eigen(m: &DenseMatrix, opts: JacobiOptions) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(LabError::domain(format!(
            "eigenvalues of a non-square {}x{} matrix",
            m.n_rows(),
            m.n_cols()
        )));
    }
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 || opts.max_sweeps == 0 {
        return Err(LabError::domain("Jacobi needs tolerance > 0 and max_sweeps >= 1"));
    }
    let asym = m.max_asymmetry();
    if asym > SYMMETRY_TOLERANCE {
        return Err(LabError::domain(format!(
            "matrix is not symmetric (max |a_ij - a_ji| = {asym:e})"
        )));
    }

    let n = m.n_rows();
    let mut a = m.entries().to_vec();
    let threshold = opts.tolerance * m.frobenius_norm();
    let mut sweeps = 0;
    let mut off_norm = off_diagonal_norm(&a, n);
    let mut row_p = vec![0.0; n];
    let mut row_q = vec![0.0; n];

    while off_norm > threshold {
        if sweeps == opts.max_sweeps {
            return Err(LabError::Convergence { sweeps, off_norm });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // after a few sweeps, drop entries that no longer move the diagonal
                if sweeps > 3 && app + 100.0 * apq.abs() == app && aqq + 100.0 * apq.abs() == aqq {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;

                row_p.copy_from_slice(&a[p * n..(p + 1) * n]);
                row_q.copy_from_slice(&a[q * n..(q + 1) * n]);
                for j in 0..n {
                    let (x, y) = (row_p[j], row_q[j]);
                    a[p * n + j] = c * x - s * y;
                    a[q * n + j] = s * x + c * y;
                }
                for j in 0..n {
                    a[j * n + p] = a[p * n + j];
                    a[j * n + q] = a[q * n + j];
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
        sweeps += 1;
        off_norm = off_diagonal_norm(&a, n);
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    Ok(Spectrum {
        eigenvalues,
        sweeps,
        off_norm,
    })
}

/// `Σ_{m=-(n-1)}^{n-1} (1 - |m|/n) cos(π k m / n)`.
///
/// The weights `n - m` are summed as integers before dividing by `n`, so
/// `k = 0` yields exactly `n`.
pub fn cosine_symbol_sum(n: usize, k: u64) -> f64 {
    let nf = n as f64;
    let weighted: f64 = (1..n)
        .map(|m| (n - m) as f64 * (PI * k as f64 * m as f64 / nf).cos())
        .sum();
    1.0 + 2.0 * weighted / nf
}

/// `∫_0^1 (1 - x) cos(π k x) dx = (1 - cos π k) / (π k)^2`, or `1/2` at `k = 0`.
pub fn one_sided_cosine_integral(k: u64) -> f64 {
    if k == 0 {
        0.5
    } else {
        let w = PI * k as f64;
        let cos_term = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        (1.0 - cos_term) / (w * w)
    }
}

/// `∫_{-1}^1 (1 - |x|) cos(π k x) dx`, the limit of `cosine_symbol_sum(n, k) / n`.
pub fn two_sided_cosine_integral(k: u64) -> f64 {
    2.0 * one_sided_cosine_integral(k)
}

/// `(v · S v) / (v · v)`.
pub fn rayleigh(s: &ToeplitzSymbol, v: &[f64]) -> Result<f64> {
    let sv = matvec_naive(s, v)?;
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    if norm_sq == 0.0 {
        return Err(LabError::domain("Rayleigh quotient of the zero vector"));
    }
    Ok(v.iter().zip(&sv).map(|(a, b)| a * b).sum::<f64>() / norm_sq)
}

/// `v_k(i) = cos(π k (i - 1) / n)` for `i = 1..=n`.
pub fn cosine_vector(n: usize, k: u64) -> Vec<f64> {
    (0..n)
        .map(|i| (PI * k as f64 * i as f64 / n as f64).cos())
        .collect()
}

/// `(1/n) Σ_j λ_j^p` from the Jacobi spectrum of `m`.
pub fn trace_powers(m: &DenseMatrix, p: u32, opts: JacobiOptions) -> Result<f64> {
    let spectrum = jacobi_eigen(m, opts)?;
    Ok(trace_powers_from(&spectrum, p))
}

/// `(1/n) Σ_j λ_j^p` for an already computed spectrum.
pub fn trace_powers_from(spectrum: &Spectrum, p: u32) -> f64 {
    let n = spectrum.eigenvalues.len() as f64;
    spectrum.eigenvalues.iter().map(|l| l.powi(p as i32)).sum::<f64>() / n
}

/// `4 / (π² (2k + 1)²)`.
pub fn paper_lambda(k: u64) -> f64 {
    let odd = (2 * k + 1) as f64;
    4.0 / (PI * PI * odd * odd)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEstimate {
    pub partial_sum: f64,
    /// Upper bound on the omitted tail.
    pub tail_bound: f64,
}

/// `Σ_{k < terms} paper_lambda(k)^p` with a bound on the remainder.
///
/// Summed from the smallest term upward.
pub fn paper_trace_limit(p: u32, terms: u64) -> Result<SeriesEstimate> {
    if p == 0 || terms == 0 {
        return Err(LabError::domain("paper_trace_limit needs p >= 1 and terms >= 1"));
    }
    let partial_sum = (0..terms).rev().map(|k| paper_lambda(k).powi(p as i32)).sum();
    let exponent = 1.0 - 2.0 * p as f64;
    let tail_bound =
        (4.0 / (PI * PI)).powi(p as i32) * (2.0 * terms as f64).powf(exponent) / (2.0 * p as f64 - 1.0);
    Ok(SeriesEstimate {
        partial_sum,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::{materialize, triangular_symbol};

    #[test]
    fn diagonal_input() {
        let m = DenseMatrix::from_row_major(3, 3, vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0])
            .unwrap();
        let s = jacobi_eigen(&m, JacobiOptions::default()).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0, 2.0, 1.0]);
        assert_eq!(s.sweeps, 0);
    }

    #[test]
    fn second_difference_matrix() {
        let sym = ToeplitzSymbol::from_diagonals(10, |k| match k {
            0 => 2.0,
            1 | -1 => -1.0,
            _ => 0.0,
        })
        .unwrap();
        let s = jacobi_eigen(&materialize(&sym), JacobiOptions::default()).unwrap();
        for (idx, lam) in s.eigenvalues.iter().enumerate() {
            let j = 10 - idx;
            let exact = 2.0 - 2.0 * (j as f64 * PI / 11.0).cos();
            assert!((lam - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let rect = DenseMatrix::zeros(2, 3);
        assert!(matches!(jacobi_eigen(&rect, JacobiOptions::default()), Err(LabError::Domain(_))));
        let asym = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 2.1, 1.0]).unwrap();
        assert!(matches!(jacobi_eigen(&asym, JacobiOptions::default()), Err(LabError::Domain(_))));
    }

    #[test]
    fn sweep_budget_exhaustion_is_a_convergence_error() {
        let m = materialize(&triangular_symbol(30).unwrap());
        let opts = JacobiOptions {
            tolerance: 1e-14,
            max_sweeps: 1,
        };
        assert!(matches!(jacobi_eigen(&m, opts), Err(LabError::Convergence { sweeps: 1, .. })));
    }

    #[test]
    fn converged_spectrum_meets_its_tolerance() {
        let m = materialize(&triangular_symbol(40).unwrap());
        let opts = JacobiOptions::default();
        let s = jacobi_eigen(&m, opts).unwrap();
        assert!(s.off_norm <= opts.tolerance * m.frobenius_norm());
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let sum: f64 = s.eigenvalues.iter().sum();
        assert!((sum - m.trace()).abs() <= 1e-9 * m.trace().abs());
    }

    #[test]
    fn zero_matrix() {
        let s = jacobi_eigen(&DenseMatrix::zeros(4, 4), JacobiOptions::default()).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 4]);
    }

    #[test]
    fn cosine_sums() {
        for n in [1, 2, 7, 100, 1000] {
            let s = cosine_symbol_sum(n, 0);
            assert!((s - n as f64).abs() <= 1e-12 * n as f64);
        }
        // quadrature oracle values: 2∫_0^1 (1-x)cos(πx)dx = 4/π², even k -> 0
        assert!((cosine_symbol_sum(100, 1) / 100.0 - 4.0 / (PI * PI)).abs() < 0.02);
        assert!((cosine_symbol_sum(100, 2) / 100.0).abs() < 0.02);
        assert_eq!(one_sided_cosine_integral(0), 0.5);
        assert_eq!(two_sided_cosine_integral(1), 4.0 / (PI * PI));
        assert_eq!(one_sided_cosine_integral(4), 0.0);
    }

    #[test]
    fn rayleigh_quotients() {
        let id = ToeplitzSymbol::identity(4).unwrap();
        assert!((rayleigh(&id, &[1.0, -2.0, 0.5, 3.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(rayleigh(&id, &[0.0; 4]).is_err());
        for n in [1usize, 2, 5, 50, 301] {
            let r = rayleigh(&triangular_symbol(n).unwrap(), &vec![1.0; n]).unwrap() / n as f64;
            let nf = n as f64;
            assert!((r - (2.0 / 3.0 + 1.0 / (3.0 * nf * nf))).abs() < 1e-13);
        }
    }

    #[test]
    fn trace_powers_small() {
        for n in [1, 5, 33] {
            let m = materialize(&triangular_symbol(n).unwrap());
            let t = trace_powers(&m, 1, JacobiOptions::default()).unwrap();
            assert!((t - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn paper_lambda_values() {
        assert!((paper_lambda(0) - 0.405_284_7).abs() < 1e-7);
        assert!((paper_lambda(1) - 0.045_031_6).abs() < 1e-7);
    }

    #[test]
    fn claimed_series_values() {
        let one = paper_trace_limit(1, 1).unwrap();
        assert_eq!(one.partial_sum, paper_lambda(0));
        let s = paper_trace_limit(2, 10_000).unwrap();
        assert!((s.partial_sum - 1.0 / 6.0).abs() < 1e-8);
        assert!(1.0 / 6.0 - s.partial_sum <= s.tail_bound);
        let s = paper_trace_limit(1, 1_000_000).unwrap();
        assert!((s.partial_sum - 0.5).abs() < 1e-6);
        assert!(0.5 - s.partial_sum <= s.tail_bound);
        assert!(paper_trace_limit(0, 5).is_err());
    }
}
