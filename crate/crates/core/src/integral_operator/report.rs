//! Side-by-side comparison of claimed values against independently computed ones.

use std::thread;

use serde::{Serialize, Serializer};

use super::{
    corollary_row, eigenfunction_residual, kernel_eval, lemma_integral, nystrom, operator_trace,
    EigenpairClaim, KernelId,
};
use crate::error::{LabError, Result};
use crate::spectra::{
    cosine_symbol_sum, cosine_vector, jacobi_eigen, one_sided_cosine_integral, paper_lambda,
    paper_trace_limit, rayleigh, two_sided_cosine_integral, JacobiOptions, Spectrum,
};
use crate::toeplitz::{materialize, triangular_symbol};

/// Terms kept when summing the claimed eigenvalue series.
const SERIES_TERMS: u64 = 1_000_000;
/// The pointwise kernel comparison runs on a `(GRID + 1)²` grid.
const GRID: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    /// Nyström mesh size.
    pub m: usize,
    pub quad_points: usize,
    /// Orders of `K_n` for the eigenvalue-convergence table.
    pub n_list: Vec<usize>,
    pub k_max: u64,
    pub p_max: u32,
    pub spectral_tolerance: f64,
    pub quadrature_tolerance: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            m: 400,
            quad_points: 4096,
            n_list: vec![100, 200, 400],
            k_max: 4,
            p_max: 3,
            spectral_tolerance: 1e-3,
            quadrature_tolerance: 1e-8,
        }
    }
}

impl ReportConfig {
    fn validate(&self) -> Result<()> {
        let top = self.k_max as usize + 1;
        if self.m < 2 || self.m < top {
            return Err(LabError::domain(format!(
                "m = {} must be at least 2 and at least k_max + 1 = {top}",
                self.m
            )));
        }
        if self.quad_points < 64 {
            return Err(LabError::domain("quad_points must be at least 64"));
        }
        if self.n_list.is_empty() {
            return Err(LabError::domain("n_list is empty"));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| (n as u64) < self.k_max + 2) {
            return Err(LabError::domain(format!("n = {n} is too small for k_max = {}", self.k_max)));
        }
        if self.p_max == 0 {
            return Err(LabError::domain("p_max must be at least 1"));
        }
        if !(self.spectral_tolerance > 0.0 && self.quadrature_tolerance > 0.0) {
            return Err(LabError::domain("tolerances must be positive"));
        }
        Ok(())
    }
}

/// A real number, or `"n/a"` when no reference exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReportValue {
    Number(f64),
    NotApplicable,
}

impl ReportValue {
    pub fn as_f64(self) -> Option<f64> {
        match self {
            ReportValue::Number(v) => Some(v),
            ReportValue::NotApplicable => None,
        }
    }
}

impl std::fmt::Display for ReportValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReportValue::Number(v) => write!(f, "{v}"),
            ReportValue::NotApplicable => f.write_str("n/a"),
        }
    }
}

impl Serialize for ReportValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ReportValue::Number(v) => serializer.serialize_f64(*v),
            ReportValue::NotApplicable => serializer.serialize_str("n/a"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Match,
    Mismatch,
    Unverified,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Match => "MATCH",
            Verdict::Mismatch => "MISMATCH",
            Verdict::Unverified => "UNVERIFIED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyEntry {
    pub quantity: String,
    pub paper_value: ReportValue,
    pub computed_value: f64,
    pub abs_diff: ReportValue,
    pub rel_diff: ReportValue,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl DiscrepancyEntry {
    /// `verdict` is MATCH iff `|computed - paper| <= tolerance`.
    pub fn compare(quantity: impl Into<String>, paper: f64, computed: f64, tolerance: f64) -> Self {
        let diff = (computed - paper).abs();
        DiscrepancyEntry {
            quantity: quantity.into(),
            paper_value: ReportValue::Number(paper),
            computed_value: computed,
            abs_diff: ReportValue::Number(diff),
            rel_diff: if paper != 0.0 {
                ReportValue::Number(diff / paper.abs())
            } else {
                ReportValue::NotApplicable
            },
            tolerance,
            verdict: if diff <= tolerance {
                Verdict::Match
            } else {
                Verdict::Mismatch
            },
        }
    }

    /// A computed value with nothing to compare it against.
    pub fn unverified(quantity: impl Into<String>, computed: f64, tolerance: f64) -> Self {
        DiscrepancyEntry {
            quantity: quantity.into(),
            paper_value: ReportValue::NotApplicable,
            computed_value: computed,
            abs_diff: ReportValue::NotApplicable,
            rel_diff: ReportValue::NotApplicable,
            tolerance,
            verdict: Verdict::Unverified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub config: ReportConfig,
    pub entries: Vec<DiscrepancyEntry>,
}

impl DiscrepancyReport {
    pub fn entry(&self, quantity: &str) -> Option<&DiscrepancyEntry> {
        self.entries.iter().find(|e| e.quantity == quantity)
    }
}

/// Spectra the report needs, computed concurrently.
struct Spectra {
    nystrom_triangular: Spectrum,
    nystrom_min: Spectrum,
    /// Spectrum of `K_n` for each `n` in `n_list`, same order.
    kn: Vec<Spectrum>,
}

fn compute_spectra(config: &ReportConfig) -> Result<Spectra> {
    let opts = JacobiOptions::default();
    thread::scope(|scope| {
        let tri = scope.spawn(|| jacobi_eigen(&nystrom(KernelId::Triangular, config.m)?, opts));
        let min = scope.spawn(|| jacobi_eigen(&nystrom(KernelId::BrownianMin, config.m)?, opts));
        let kn: Vec<_> = config
            .n_list
            .iter()
            .map(|&n| scope.spawn(move || jacobi_eigen(&materialize(&triangular_symbol(n)?), opts)))
            .collect();
        let join = |h: thread::ScopedJoinHandle<'_, Result<Spectrum>>| {
            h.join().expect("spectrum worker panicked")
        };
        Ok(Spectra {
            nystrom_triangular: join(tri)?,
            nystrom_min: join(min)?,
            kn: kn.into_iter().map(join).collect::<Result<_>>()?,
        })
    })
}

/// Assembles every comparison in a fixed order.
pub fn build_discrepancy_report(config: &ReportConfig) -> Result<DiscrepancyReport> {
    config.validate()?;
    let spectra = compute_spectra(config)?;
    let spec_tol = config.spectral_tolerance;
    let quad_tol = config.quadrature_tolerance;
    let quad = config.quad_points;
    let mut entries = Vec::new();

    // pointwise form of the indicator-convolution representation
    let grid: Vec<f64> = (0..=GRID).map(|i| i as f64 / GRID as f64).collect();
    let mut vs_triangular = 0.0f64;
    let mut vs_min = 0.0f64;
    for &x in &grid {
        for &y in &grid {
            let conv = kernel_eval(KernelId::ConvIndicator, x, y)?;
            vs_triangular = vs_triangular.max((conv - kernel_eval(KernelId::Triangular, x, y)?).abs());
            vs_min = vs_min.max((conv - kernel_eval(KernelId::BrownianMin, x, y)?).abs());
        }
    }
    entries.push(DiscrepancyEntry::compare("lemma_pointwise_max_diff", 0.0, vs_triangular, quad_tol));
    entries.push(DiscrepancyEntry::unverified("conv_indicator_vs_min_max_diff", vs_min, quad_tol));

    for k in 0..=config.k_max {
        entries.push(DiscrepancyEntry::compare(
            format!("lemma_integral_k{k}"),
            paper_lambda(k),
            lemma_integral(k, quad)?,
            quad_tol,
        ));
    }

    for k in 0..=config.k_max {
        let claim = EigenpairClaim::claimed(k);
        entries.push(DiscrepancyEntry::compare(
            format!("eigenfunction_residual_triangular_k{k}"),
            0.0,
            eigenfunction_residual(KernelId::Triangular, &claim, quad)?,
            quad_tol,
        ));
    }
    for k in 0..=config.k_max {
        let claim = EigenpairClaim::sine_control(k);
        entries.push(DiscrepancyEntry::compare(
            format!("eigenfunction_residual_min_sine_k{k}"),
            0.0,
            eigenfunction_residual(KernelId::BrownianMin, &claim, quad)?,
            quad_tol,
        ));
    }
    entries.push(DiscrepancyEntry::compare(
        "eigenpair_lambda_omega_sq",
        2.0,
        EigenpairClaim::claimed(0).lambda_omega_sq(),
        quad_tol,
    ));

    let lambda_sum = paper_trace_limit(1, SERIES_TERMS)?.partial_sum;
    entries.push(DiscrepancyEntry::compare(
        "operator_trace_vs_lambda_sum",
        lambda_sum,
        operator_trace(KernelId::Triangular, quad)?,
        quad_tol,
    ));

    let m = config.m;
    for k in 0..=config.k_max {
        entries.push(DiscrepancyEntry::compare(
            format!("nystrom_triangular_m{m}_mu_k{k}"),
            paper_lambda(k),
            spectra.nystrom_triangular.eigenvalues[k as usize],
            spec_tol,
        ));
    }
    for k in 0..=config.k_max {
        entries.push(DiscrepancyEntry::compare(
            format!("nystrom_min_m{m}_mu_k{k}"),
            paper_lambda(k),
            spectra.nystrom_min.eigenvalues[k as usize],
            spec_tol,
        ));
    }

    for k in 0..=config.k_max {
        let mut prev = None;
        for (&n, spectrum) in config.n_list.iter().zip(&spectra.kn) {
            let row = corollary_row(k, n, spectrum.eigenvalues[k as usize], prev.as_ref());
            entries.push(DiscrepancyEntry::compare(
                format!("corollary_k{k}_n{n}"),
                row.paper_target,
                row.lambda_k_n_over_n,
                spec_tol,
            ));
            if let (Some(drift), Some(p)) = (row.drift, prev.as_ref()) {
                entries.push(DiscrepancyEntry::compare(
                    format!("corollary_k{k}_drift_n{}_n{n}", p.n),
                    0.0,
                    drift,
                    spec_tol,
                ));
            }
            prev = Some(row);
        }
    }

    // traces of powers of K_n / n at the finest order
    let (&n_top, kn_top) = config
        .n_list
        .iter()
        .zip(&spectra.kn)
        .max_by_key(|(&n, _)| n)
        .expect("n_list validated non-empty");
    let nf = n_top as f64;
    for p in 1..=config.p_max {
        let sum_mu_p: f64 = kn_top.eigenvalues.iter().map(|l| (l / nf).powi(p as i32)).sum();
        entries.push(DiscrepancyEntry::compare(
            format!("trace_power_p{p}_n{n_top}"),
            paper_trace_limit(p, SERIES_TERMS)?.partial_sum,
            sum_mu_p,
            spec_tol,
        ));
    }

    // cosine-sum approximation, both normalizations and against the true eigenvalues
    for k in 0..=config.k_max {
        let scaled_sum = cosine_symbol_sum(n_top, k) / nf;
        entries.push(DiscrepancyEntry::compare(
            format!("cosine_sum_k{k}_n{n_top}_vs_one_sided_integral"),
            one_sided_cosine_integral(k),
            scaled_sum,
            spec_tol,
        ));
        entries.push(DiscrepancyEntry::compare(
            format!("cosine_sum_k{k}_n{n_top}_vs_two_sided_integral"),
            scaled_sum,
            two_sided_cosine_integral(k),
            spec_tol,
        ));
        entries.push(DiscrepancyEntry::compare(
            format!("cosine_sum_k{k}_n{n_top}_vs_eigenvalue"),
            scaled_sum,
            kn_top.eigenvalues[k as usize] / nf,
            spec_tol,
        ));
    }
    let kn = triangular_symbol(n_top)?;
    for k in [0, 1] {
        entries.push(DiscrepancyEntry::compare(
            format!("rayleigh_cosine_k{k}_n{n_top}"),
            cosine_symbol_sum(n_top, k) / nf,
            rayleigh(&kn, &cosine_vector(n_top, k))? / nf,
            spec_tol,
        ));
    }

    Ok(DiscrepancyReport {
        config: config.clone(),
        entries,
    })
}
