//! Integral operators on `L²[0, 1]` with piecewise-linear kernels.
//!
//! Three kernels are provided: the triangular kernel `1 - |x - y|`, the
//! Brownian covariance `min(x, y)`, and the self-convolution of the unit
//! indicator `∫_0^1 1[0,1](x - t) 1[0,1](y - t) dt` in closed form. Each
//! is linear in `y` on either side of `y = x`, which is what the exact
//! residual computation relies on.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::dense::DenseMatrix;
use crate::error::{LabError, Result};
use crate::spectra::{jacobi_eigen, paper_lambda, JacobiOptions};
use crate::toeplitz::{materialize, triangular_symbol};

mod report;

pub use report::{
    build_discrepancy_report, DiscrepancyEntry, DiscrepancyReport, ReportConfig, ReportValue,
    Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    /// `1 - |x - y|`
    Triangular,
    /// `min(x, y)`
    BrownianMin,
    /// `∫_0^1 1[0,1](x - t) 1[0,1](y - t) dt`
    ConvIndicator,
}

impl KernelId {
    pub const ALL: [KernelId; 3] = [KernelId::Triangular, KernelId::BrownianMin, KernelId::ConvIndicator];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Triangular => "triangular",
            KernelId::BrownianMin => "brownian-min",
            KernelId::ConvIndicator => "conv-indicator",
        }
    }

    /// `K(x, y) = α + β y` for `y < x` (left) and `y > x` (right).
    fn linear_pieces(self, x: f64) -> [(f64, f64); 2] {
        match self {
            KernelId::Triangular => [(1.0 - x, 1.0), (1.0 + x, -1.0)],
            KernelId::BrownianMin | KernelId::ConvIndicator => [(0.0, 1.0), (x, 0.0)],
        }
    }

    fn eval_unchecked(self, x: f64, y: f64) -> f64 {
        match self {
            KernelId::Triangular => 1.0 - (x - y).abs(),
            KernelId::BrownianMin => x.min(y),
            KernelId::ConvIndicator => {
                // support of t ↦ 1[0,1](x-t)·1[0,1](y-t)·1[0,1](t)
                let lo = 0.0f64.max(x.max(y) - 1.0);
                let hi = 1.0f64.min(x.min(y));
                (hi - lo).max(0.0)
            }
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "triangular" => Ok(KernelId::Triangular),
            "brownian-min" | "min" => Ok(KernelId::BrownianMin),
            "conv-indicator" | "conv" => Ok(KernelId::ConvIndicator),
            other => Err(LabError::domain(format!("unknown kernel '{other}'"))),
        }
    }
}

fn check_unit(v: f64, name: &str) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(LabError::domain(format!("{name} = {v} is outside [0, 1]")))
    }
}

pub fn kernel_eval(id: KernelId, x: f64, y: f64) -> Result<f64> {
    check_unit(x, "x")?;
    check_unit(y, "y")?;
    Ok(id.eval_unchecked(x, y))
}

/// Midpoint nodes `(i - 1/2) / m`, `i = 1..=m`.
pub fn midpoints(m: usize) -> Vec<f64> {
    (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect()
}

/// `(1/m) K(x_i, x_j)` on midpoint nodes.
pub fn nystrom(id: KernelId, m: usize) -> Result<DenseMatrix> {
    if m < 2 {
        return Err(LabError::domain("Nyström discretization needs m >= 2"));
    }
    let x = midpoints(m);
    let w = 1.0 / m as f64;
    let mut out = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = w * id.eval_unchecked(x[i], x[j]);
            out.set(i, j, v);
            out.set(j, i, v);
        }
    }
    Ok(out)
}

/// The `top` largest eigenvalues of `nystrom(id, m)`.
pub fn nystrom_spectrum(id: KernelId, m: usize, top: usize) -> Result<Vec<f64>> {
    if top > m {
        return Err(LabError::domain(format!("requested {top} eigenvalues of an order-{m} matrix")));
    }
    let spectrum = jacobi_eigen(&nystrom(id, m)?, JacobiOptions::default())?;
    Ok(spectrum.eigenvalues[..top].to_vec())
}

/// Shape of a trial eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenProfile {
    /// `cos(ω x)`
    Cosine,
    /// `sin(ω x)`
    Sine,
    Zero,
}

impl EigenProfile {
    fn eval(self, omega: f64, x: f64) -> f64 {
        match self {
            EigenProfile::Cosine => (omega * x).cos(),
            EigenProfile::Sine => (omega * x).sin(),
            EigenProfile::Zero => 0.0,
        }
    }

    /// Antiderivatives of `φ(y)` and `y φ(y)`.
    fn antiderivatives(self, omega: f64, y: f64) -> (f64, f64) {
        let (s, c) = (omega * y).sin_cos();
        let w2 = omega * omega;
        match self {
            EigenProfile::Cosine => (s / omega, y * s / omega + c / w2),
            EigenProfile::Sine => (-c / omega, -y * c / omega + s / w2),
            EigenProfile::Zero => (0.0, 0.0),
        }
    }
}

/// A candidate eigenpair `(λ, φ)` with `φ(x) = profile(ω x)`, `ω = (2k+1)π/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenpairClaim {
    pub k: u64,
    pub omega: f64,
    pub lambda: f64,
    pub profile: EigenProfile,
}

impl EigenpairClaim {
    /// The claimed pair for the triangular kernel: `cos((2k+1)πx/2)` with `λ_k = 4/(π²(2k+1)²)`.
    pub fn claimed(k: u64) -> Self {
        Self::with_profile(k, EigenProfile::Cosine)
    }

    /// `sin((2k+1)πx/2)` with the same `λ_k`; a true eigenpair of `min(x, y)`.
    pub fn sine_control(k: u64) -> Self {
        Self::with_profile(k, EigenProfile::Sine)
    }

    pub fn with_profile(k: u64, profile: EigenProfile) -> Self {
        EigenpairClaim {
            k,
            omega: (2 * k + 1) as f64 * PI / 2.0,
            lambda: paper_lambda(k),
            profile,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.profile.eval(self.omega, x)
    }

    /// `λ ω²`. The differential-equation route asserts `ω² = 2/λ`, i.e. 2.
    pub fn lambda_omega_sq(&self) -> f64 {
        self.lambda * self.omega * self.omega
    }
}

/// `(Kφ)(x)` with the inner integral in closed form, split at `y = x`.
pub fn apply_exact(id: KernelId, claim: &EigenpairClaim, x: f64) -> f64 {
    let [(al, bl), (ar, br)] = id.linear_pieces(x);
    let anti = |y| claim.profile.antiderivatives(claim.omega, y);
    let (f0_0, f1_0) = anti(0.0);
    let (f0_x, f1_x) = anti(x);
    let (f0_1, f1_1) = anti(1.0);
    al * (f0_x - f0_0) + bl * (f1_x - f1_0) + ar * (f0_1 - f0_x) + br * (f1_1 - f1_x)
}

/// `‖Kφ - λφ‖` in `L²[0,1]`, outer norm by composite midpoint over `quad_points` nodes.
pub fn eigenfunction_residual(id: KernelId, claim: &EigenpairClaim, quad_points: usize) -> Result<f64> {
    if quad_points < 64 {
        return Err(LabError::domain("residual quadrature needs at least 64 points"));
    }
    let sum_sq: f64 = midpoints(quad_points)
        .into_iter()
        .map(|x| {
            let r = apply_exact(id, claim, x) - claim.lambda * claim.eval(x);
            r * r
        })
        .sum();
    Ok((sum_sq / quad_points as f64).sqrt())
}

/// Composite midpoint value of `∫_0^1 (1 - t) cos((2k+1)πt/2) dt`.
pub fn lemma_integral(k: u64, quad_points: usize) -> Result<f64> {
    if quad_points < 64 {
        return Err(LabError::domain("lemma quadrature needs at least 64 points"));
    }
    let omega = (2 * k + 1) as f64 * PI / 2.0;
    let h = 1.0 / quad_points as f64;
    Ok(midpoints(quad_points)
        .into_iter()
        .map(|t| (1.0 - t) * (omega * t).cos())
        .sum::<f64>()
        * h)
}

/// Midpoint quadrature of `∫_0^1 K(x, x) dx`.
pub fn operator_trace(id: KernelId, quad_points: usize) -> Result<f64> {
    if quad_points < 2 {
        return Err(LabError::domain("trace quadrature needs at least 2 points"));
    }
    Ok(midpoints(quad_points)
        .into_iter()
        .map(|x| id.eval_unchecked(x, x))
        .sum::<f64>()
        / quad_points as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryRow {
    pub n: usize,
    /// `λ_k^{(n)} / n`, the `(k+1)`-th largest eigenvalue of `K_n` scaled by `1/n`.
    pub lambda_k_n_over_n: f64,
    pub paper_target: f64,
    /// `|value(n_prev) - value(n)|` against the previous row.
    pub drift: Option<f64>,
}

/// Scaled eigenvalues of `K_n` along `n_list`, paired with the claimed limit.
pub fn corollary_convergence(k: u64, n_list: &[usize]) -> Result<Vec<CorollaryRow>> {
    let mut rows: Vec<CorollaryRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if (n as u64) < k + 2 {
            return Err(LabError::domain(format!("n = {n} is too small for k = {k}")));
        }
        let spectrum = jacobi_eigen(&materialize(&triangular_symbol(n)?), JacobiOptions::default())?;
        rows.push(corollary_row(k, n, spectrum.eigenvalues[k as usize], rows.last()));
    }
    Ok(rows)
}

pub(crate) fn corollary_row(k: u64, n: usize, eigenvalue: f64, prev: Option<&CorollaryRow>) -> CorollaryRow {
    let value = eigenvalue / n as f64;
    CorollaryRow {
        n,
        lambda_k_n_over_n: value,
        paper_target: paper_lambda(k),
        drift: prev.map(|p| (p.lambda_k_n_over_n - value).abs()),
    }
}
