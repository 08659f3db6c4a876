//! Displacement statistics of permutations and the Toeplitz matrix `P_n`.
//!
//! For `σ` in one-line notation the displacement of index `i` is
//! `δ_i = i - σ(i)`, and `d_k` counts the indices with `δ_i = k`. Placing
//! `d_{i-j}` at entry `(i, j)` gives the Toeplitz matrix `P_n`.

use std::thread;

use crate::error::{LabError, Result};
use crate::rng::SplitMix64;
use crate::toeplitz::ToeplitzSymbol;

/// A bijection of `{1, ..., n}` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// Validates that `image` holds each of `1..=n` exactly once.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(LabError::domain("permutation of an empty set"));
        }
        let mut seen = vec![false; n];
        for &v in &image {
            if v == 0 || v > n {
                return Err(LabError::domain(format!("value {v} is outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(LabError::domain(format!("value {v} appears twice")));
            }
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((1..=n).collect())
    }

    /// `σ(i) = n + 1 - i`.
    pub fn reversal(n: usize) -> Result<Self> {
        Self::new((1..=n).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { image: inv }
    }

    pub fn fixed_points(&self) -> usize {
        self.image
            .iter()
            .enumerate()
            .filter(|&(i, &v)| v == i + 1)
            .count()
    }
}

/// Draws a uniform permutation of `{1, ..., n}` with a Fisher-Yates shuffle
/// driven by [`SplitMix64`] seeded with `seed`.
pub fn sample_uniform(n: usize, seed: u64) -> Result<Permutation> {
    let mut rng = SplitMix64::new(seed);
    sample_with(n, &mut rng)
}

fn sample_with(n: usize, rng: &mut SplitMix64) -> Result<Permutation> {
    if n == 0 {
        return Err(LabError::domain("permutation order must be at least 1"));
    }
    let mut image: Vec<usize> = (1..=n).collect();
    shuffle(&mut image, rng);
    Ok(Permutation { image })
}

fn shuffle(items: &mut [usize], rng: &mut SplitMix64) {
    for i in (1..items.len()).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// `δ_i = i - σ(i)` for `i = 1..=n`.
pub fn displacements(p: &Permutation) -> Vec<i64> {
    p.image
        .iter()
        .enumerate()
        .map(|(i, &v)| (i + 1) as i64 - v as i64)
        .collect()
}

/// Counts `d_k` for `k = -(n-1) ..= n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplacementHistogram {
    n: usize,
    counts: Vec<u64>,
}

impl DisplacementHistogram {
    pub fn order(&self) -> usize {
        self.n
    }

    /// `d_k`, zero outside `|k| <= n - 1`.
    pub fn count(&self, k: i64) -> u64 {
        let reach = self.n as i64 - 1;
        if k.abs() > reach {
            0
        } else {
            self.counts[(k + reach) as usize]
        }
    }

    /// Counts ordered `d_{-(n-1)}, ..., d_{n-1}`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `(k, d_k)` pairs in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        let reach = self.n as i64 - 1;
        self.counts
            .iter()
            .enumerate()
            .map(move |(idx, &c)| (idx as i64 - reach, c))
    }
}

pub fn histogram(p: &Permutation) -> DisplacementHistogram {
    let n = p.len();
    let reach = n as i64 - 1;
    let mut counts = vec![0u64; 2 * n - 1];
    for delta in displacements(p) {
        counts[(delta + reach) as usize] += 1;
    }
    DisplacementHistogram { n, counts }
}

/// Displacement count `d_k` of a single permutation, without building the whole histogram.
fn count_displacement(image: &[usize], k: i64) -> u64 {
    image
        .iter()
        .enumerate()
        .filter(|&(i, &v)| (i + 1) as i64 - v as i64 == k)
        .count() as u64
}

/// The Toeplitz symbol of `P_n`, `a_k = d_k`.
pub fn build_pn(h: &DisplacementHistogram) -> ToeplitzSymbol {
    ToeplitzSymbol::new(h.n, h.counts.iter().map(|&c| c as f64).collect())
        .expect("histogram has 2n - 1 counts")
}

/// `Tr(P_n) = n · d_0`, where `d_0` is the number of fixed points.
pub fn trace_pn(p: &Permutation) -> u64 {
    p.len() as u64 * p.fixed_points() as u64
}

fn check_diagonal(n: usize, k: i64) -> Result<()> {
    if n == 0 {
        return Err(LabError::domain("permutation order must be at least 1"));
    }
    if k.unsigned_abs() >= n as u64 {
        return Err(LabError::domain(format!(
            "diagonal {k} does not exist for n = {n} (need |k| <= {})",
            n - 1
        )));
    }
    Ok(())
}

/// `E[d_k] = (n - |k|) / n` under the uniform measure.
pub fn expected_dk(n: usize, k: i64) -> Result<f64> {
    check_diagonal(n, k)?;
    Ok((n as u64 - k.unsigned_abs()) as f64 / n as f64)
}

/// Exact `Var(d_k)` as a reduced-free fraction `(numerator, denominator)`.
///
/// With `N = n - |k|` indicators of probability `1/n` each and pairwise
/// covariance `1 / (n^2 (n-1))`:
/// `Var = N (1/n - 1/n^2) + N (N-1) / (n^2 (n-1))
///      = [N (n-1)^2 + N (N-1)] / (n^2 (n-1))`.
pub fn variance_dk_fraction(n: usize, k: i64) -> Result<(u128, u128)> {
    check_diagonal(n, k)?;
    if n < 2 {
        return Err(LabError::domain("variance needs n >= 2"));
    }
    let n = n as u128;
    let big_n = n - k.unsigned_abs() as u128;
    let numerator = big_n * (n - 1) * (n - 1) + big_n * (big_n - 1);
    let denominator = n * n * (n - 1);
    Ok((numerator, denominator))
}

/// Exact finite-`n` variance of `d_k`.
///
/// Evaluated as one division of two exact integers, so the result is the
/// correctly rounded value of the rational variance.
pub fn variance_dk_exact(n: usize, k: i64) -> Result<f64> {
    let (num, den) = variance_dk_fraction(n, k)?;
    Ok(num as f64 / den as f64)
}

/// Leading-order variance `(n-|k|)/n - (n-|k|)^2/n^2`.
pub fn variance_dk_asymptotic(n: usize, k: i64) -> Result<f64> {
    check_diagonal(n, k)?;
    let ratio = (n as u64 - k.unsigned_abs()) as f64 / n as f64;
    Ok(ratio - ratio * ratio)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Per-worker sums of `d_k` and `d_k^2`, exact in integers.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    sum: u64,
    sum_sq: u64,
}

impl Moments {
    fn merge(self, other: Moments) -> Moments {
        Moments {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }
}

/// Splits `trials` across `workers` threads. Worker `w` draws its permutations
/// sequentially from one generator seeded with `seed + w` and receives
/// `trials / workers` trials, plus one if `w < trials % workers`. Partial
/// results come back in worker order.
fn fan_out<T, F>(trials: u64, seed: u64, workers: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(SplitMix64, u64) -> T + Sync,
{
    let workers = workers.max(1) as u64;
    let base = trials / workers;
    let extra = trials % workers;
    let share = |w: u64| base + u64::from(w < extra);

    if workers == 1 {
        return vec![work(SplitMix64::new(seed), trials)];
    }
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let work = &work;
                scope.spawn(move || work(SplitMix64::new(seed.wrapping_add(w)), share(w)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("Monte Carlo worker panicked"))
            .collect()
    })
}

/// Visits `d_k` for each of `trials` permutations of one worker.
fn for_each_dk(n: usize, k: i64, mut rng: SplitMix64, trials: u64, mut visit: impl FnMut(u64)) {
    let mut image: Vec<usize> = (1..=n).collect();
    for _ in 0..trials {
        // reshuffling the previous draw is still uniform: the shuffle is a
        // uniform random bijection applied to any fixed arrangement
        shuffle(&mut image, &mut rng);
        visit(count_displacement(&image, k));
    }
}

/// Sample mean and unbiased variance of `d_k` over `trials` seeded uniform permutations.
///
/// Deterministic for fixed `(n, k, trials, seed, workers)`; the integer
/// moment sums make the result independent of merge order as well.
pub fn mc_moments_dk(n: usize, k: i64, trials: u64, seed: u64, workers: usize) -> Result<McEstimate> {
    check_diagonal(n, k)?;
    if trials < 2 {
        return Err(LabError::domain("Monte Carlo needs at least 2 trials"));
    }
    let total = fan_out(trials, seed, workers, |rng, share| {
        let mut m = Moments::default();
        for_each_dk(n, k, rng, share, |d| {
            m.count += 1;
            m.sum += d;
            m.sum_sq += d * d;
        });
        m
    })
    .into_iter()
    .fold(Moments::default(), Moments::merge);

    let t = total.count as u128;
    let s = total.sum as u128;
    let s2 = total.sum_sq as u128;
    let mean = s as f64 / t as f64;
    // (t·Σd² - (Σd)²) / (t (t-1)) evaluated exactly before the final division
    let variance = (t * s2 - s * s) as f64 / (t * (t - 1)) as f64;
    Ok(McEstimate {
        mean,
        variance,
        stderr: (variance / trials as f64).sqrt(),
        trials,
        seed,
    })
}

/// Outcome of the Chebyshev concentration check for one diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationCheck {
    /// Fraction of trials with `|d_k/n - E[d_k]/n| > ε`.
    pub empirical_prob: f64,
    /// `Var(d_k) / (n² ε²)`.
    pub chebyshev_bound: f64,
    /// `min(1, bound + 4 sqrt(bound / trials) + 10 / trials)`.
    pub slack_bound: f64,
    /// Fraction of trials with `|d_k/n - (n-|k|)/n| > ε`, i.e. measured
    /// against `E[d_k]` itself rather than the mean of `d_k / n`.
    pub uncentered_prob: f64,
    pub trials: u64,
}

impl ConcentrationCheck {
    pub fn within_bound(&self) -> bool {
        self.empirical_prob <= self.slack_bound
    }
}

pub fn concentration_check(
    n: usize,
    k: i64,
    epsilon: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<ConcentrationCheck> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(LabError::domain("epsilon must be a positive real"));
    }
    if trials == 0 {
        return Err(LabError::domain("need at least one trial"));
    }
    let variance = variance_dk_exact(n, k)?;
    let expected = expected_dk(n, k)?;
    let nf = n as f64;
    let centre = expected / nf;

    let (centered, uncentered) = fan_out(trials, seed, workers, |rng, share| {
        let (mut c, mut u) = (0u64, 0u64);
        for_each_dk(n, k, rng, share, |d| {
            let scaled = d as f64 / nf;
            c += u64::from((scaled - centre).abs() > epsilon);
            u += u64::from((scaled - expected).abs() > epsilon);
        });
        (c, u)
    })
    .into_iter()
    .fold((0, 0), |(a, b), (c, u)| (a + c, b + u));

    let t = trials as f64;
    let bound = variance / (nf * nf * epsilon * epsilon);
    Ok(ConcentrationCheck {
        empirical_prob: centered as f64 / t,
        chebyshev_bound: bound,
        slack_bound: (bound + 4.0 * (bound / t).sqrt() + 10.0 / t).min(1.0),
        uncentered_prob: uncentered as f64 / t,
        trials,
    })
}
