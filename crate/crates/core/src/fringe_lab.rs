//! Synthetic two-path fringes, visibility fits and the simulated experiment.
//!
//! Opening paths `i` and `j` gives the pattern `I(φ) ∝ 1 + V cos(φ − φ0)`.
//! Counts at each scan phase are Poisson with mean proportional to `I(φ)`;
//! the visibility is recovered by a linear least-squares fit of
//! `a + b cos φ + c sin φ`, `V̂ = √(b² + c²)/a`.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inequalities::{visibility_weight, CycleReport};
use crate::interferometer::{pairwise_visibility, InterferometerSpec};
use crate::robustness::NoiseModel;

pub const DEFAULT_PHASE_POINTS: usize = 32;
pub const MIN_SCAN_POINTS: usize = 8;

/// Bootstrap draws live on streams above this offset so they never collide
/// with the per-pair measurement streams.
const BOOTSTRAP_STREAM_BASE: u64 = 1 << 32;

/// `points` equally spaced phases on `[0, 2π)`.
pub fn phase_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| TAU * k as f64 / points as f64).collect()
}

/// `1 + v cos(φ − phase0)` at each phase.
pub fn ideal_fringe(v: f64, phase0: f64, phases: &[f64]) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("visibility {v} outside [0, 1]")));
    }
    Ok(phases.iter().map(|p| 1.0 + v * (p - phase0).cos()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    phases: Vec<f64>,
    counts: Vec<u64>,
    shots_per_point: u64,
}

impl FringeScan {
    pub fn new(phases: Vec<f64>, counts: Vec<u64>, shots_per_point: u64) -> Result<Self> {
        if phases.len() != counts.len() {
            return Err(Error::Size(format!(
                "{} phases but {} counts",
                phases.len(),
                counts.len()
            )));
        }
        if phases.len() < MIN_SCAN_POINTS {
            return Err(Error::Size(format!(
                "a scan needs at least {MIN_SCAN_POINTS} points, got {}",
                phases.len()
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("non-finite scan phase".into()));
        }
        Ok(Self { phases, counts, shots_per_point })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots_per_point(&self) -> u64 {
        self.shots_per_point
    }
}

fn poisson_draw(mean: f64, rng: &mut impl Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as u64
}

/// Poisson counts with mean `shots · I_k / mean(I)` at each phase.
pub fn sample_counts(phases: &[f64], intensities: &[f64], shots_per_point: u64, seed: u64) -> Result<FringeScan> {
    sample_counts_with(phases, intensities, shots_per_point, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_counts_with(
    phases: &[f64],
    intensities: &[f64],
    shots_per_point: u64,
    rng: &mut impl Rng,
) -> Result<FringeScan> {
    if shots_per_point == 0 {
        return Err(Error::Domain("shots_per_point must be at least 1".into()));
    }
    if phases.len() != intensities.len() {
        return Err(Error::Size("phases and intensities differ in length".into()));
    }
    if intensities.iter().any(|&i| !(i >= 0.0) || !i.is_finite()) {
        return Err(Error::Domain("intensities must be finite and nonnegative".into()));
    }
    let mean = intensities.iter().sum::<f64>() / intensities.len().max(1) as f64;
    if !(mean > 0.0) {
        return Err(Error::Domain("intensities are all zero".into()));
    }
    let scale = shots_per_point as f64 / mean;
    let counts = intensities.iter().map(|&i| poisson_draw(scale * i, rng)).collect();
    FringeScan::new(phases.to_vec(), counts, shots_per_point)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatedVisibility {
    pub v_hat: f64,
    pub std_err: f64,
}

/// Least-squares coefficients of `a + b cos φ + c sin φ` with their covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    pub offset: f64,
    pub cos_coeff: f64,
    pub sin_coeff: f64,
    pub covariance: Matrix3<f64>,
}

impl SinusoidFit {
    pub fn model(&self, phase: f64) -> f64 {
        self.offset + self.cos_coeff * phase.cos() + self.sin_coeff * phase.sin()
    }
}

/// Ordinary least squares; the covariance is the sandwich form with Poisson
/// variance taken from the fitted model (floored at one count).
pub fn fit_sinusoid(phases: &[f64], y: &[f64]) -> Result<SinusoidFit> {
    let mut xtx = Matrix3::zeros();
    let mut xty = Vector3::zeros();
    for (&p, &yk) in phases.iter().zip(y) {
        let x = Vector3::new(1.0, p.cos(), p.sin());
        xtx += x * x.transpose();
        xty += x * yk;
    }
    let inv = xtx
        .try_inverse()
        .ok_or_else(|| Error::Estimation("scan phases do not determine a sinusoid".into()))?;
    let beta = inv * xty;
    let mut meat = Matrix3::zeros();
    for &p in phases {
        let x = Vector3::new(1.0, p.cos(), p.sin());
        let var = x.dot(&beta).max(1.0);
        meat += x * x.transpose() * var;
    }
    Ok(SinusoidFit {
        offset: beta[0],
        cos_coeff: beta[1],
        sin_coeff: beta[2],
        covariance: inv * meat * inv,
    })
}

fn covers_full_period(phases: &[f64]) -> bool {
    let mut sorted = phases.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let m = sorted.len() as f64;
    let span = sorted[sorted.len() - 1] - sorted[0];
    span * m / (m - 1.0) >= TAU - 1e-9
}

pub fn estimate_visibility(scan: &FringeScan) -> Result<EstimatedVisibility> {
    if scan.phases.len() < MIN_SCAN_POINTS {
        return Err(Error::Size(format!("a scan needs at least {MIN_SCAN_POINTS} points")));
    }
    if !covers_full_period(&scan.phases) {
        return Err(Error::Precondition("scan phases must cover a full 2π period".into()));
    }
    let y: Vec<f64> = scan.counts.iter().map(|&c| c as f64).collect();
    let fit = fit_sinusoid(&scan.phases, &y)?;
    visibility_from_fit(&fit)
}

pub fn visibility_from_fit(fit: &SinusoidFit) -> Result<EstimatedVisibility> {
    let a = fit.offset;
    if !(a > 0.0) {
        return Err(Error::Estimation(format!("fitted mean level {a} is not positive")));
    }
    let (b, c) = (fit.cos_coeff, fit.sin_coeff);
    let amp = b.hypot(c);
    let v = amp / a;
    let cov = &fit.covariance;
    let var = if amp > 0.0 {
        let g = Vector3::new(-v / a, b / (a * amp), c / (a * amp));
        (g.transpose() * cov * g)[(0, 0)]
    } else {
        // no direction at zero amplitude: average the two quadrature variances
        0.5 * (cov[(1, 1)] + cov[(2, 2)]) / (a * a)
    };
    Ok(EstimatedVisibility { v_hat: v.clamp(0.0, 1.0), std_err: var.max(0.0).sqrt() })
}

/// Settings for [`run_experiment_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    pub shots_per_point: u64,
    pub seed: u64,
    pub phase_points: usize,
    /// A violation is certified when the margin exceeds this many standard errors.
    pub certify_sigmas: f64,
    /// Weight squared visibilities by `(|c_i|² + |c_j|²)²/(4|c_i c_j|²)` so that
    /// unbalanced interferometers can be used.
    pub asymmetric_weights: bool,
    /// Parametric bootstrap resamples for a cross-check of the standard error.
    pub bootstrap_resamples: Option<usize>,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            shots_per_point: 100_000,
            seed: 0,
            phase_points: DEFAULT_PHASE_POINTS,
            certify_sigmas: 5.0,
            asymmetric_weights: false,
            bootstrap_resamples: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEstimate {
    pub i: usize,
    pub j: usize,
    /// `η_ij V_ij`, the visibility the synthetic fringe was generated with.
    pub true_visibility: f64,
    pub phase0: f64,
    pub weight: f64,
    pub estimate: EstimatedVisibility,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub pairs: Vec<PairEstimate>,
    pub scans: Vec<FringeScan>,
    /// The cycle value computed from the true (noisy) visibilities.
    pub expected_s: f64,
    pub s_std_err: f64,
    /// Point estimate `ŝ` with bounds and margin.
    pub report: CycleReport,
    /// `margin / s_std_err`.
    pub significance: f64,
    pub certified: bool,
    pub bootstrap_std_err: Option<f64>,
    pub assumption: &'static str,
}

/// Cycle pairs `(1,2), (2,3), …, (n−1,n)` then the closing pair `(1,n)`,
/// zero-based.
pub fn cycle_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    pairs.push((0, n - 1));
    pairs
}

fn pair_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn signed_sum(values: &[f64], weights: &[f64]) -> f64 {
    let last = values.len() - 1;
    values
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(k, (v, w))| if k == last { -w * v * v } else { w * v * v })
        .sum()
}

pub fn run_experiment(spec: &InterferometerSpec, noise: &NoiseModel, shots: u64, seed: u64) -> Result<ExperimentReport> {
    run_experiment_with(spec, noise, &ExperimentOptions { shots_per_point: shots, seed, ..Default::default() })
}

/// Simulates exactly one fringe scan per cycle pair, fits each, and assembles
/// `S_n` with first-order error propagation `∂S/∂V = ±2wV`.
pub fn run_experiment_with(
    spec: &InterferometerSpec,
    noise: &NoiseModel,
    opts: &ExperimentOptions,
) -> Result<ExperimentReport> {
    let n = spec.n();
    if n < 3 {
        return Err(Error::Size(format!("cycle experiment needs n >= 3, got {n}")));
    }
    if !spec.is_symmetric() && !opts.asymmetric_weights {
        return Err(Error::Precondition(
            "unbalanced amplitudes: enable asymmetric weights to use them".into(),
        ));
    }
    if opts.phase_points < MIN_SCAN_POINTS {
        return Err(Error::Size(format!("need at least {MIN_SCAN_POINTS} phase points")));
    }
    let grid = phase_grid(opts.phase_points);
    let pairs = cycle_pairs(n);

    let measured: Vec<(PairEstimate, FringeScan)> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(i, j))| -> Result<_> {
            let mut rng = pair_rng(opts.seed, k as u64);
            let phase0 = rng.random_range(0.0..TAU);
            let true_visibility = (noise.factor(i, j) * pairwise_visibility(spec, i, j)?).clamp(0.0, 1.0);
            let weight = if opts.asymmetric_weights {
                visibility_weight(spec.amplitudes()[i], spec.amplitudes()[j])?
            } else {
                1.0
            };
            let intensities = ideal_fringe(true_visibility, phase0, &grid)?;
            let scan = sample_counts_with(&grid, &intensities, opts.shots_per_point, &mut rng)?;
            let estimate = estimate_visibility(&scan)?;
            Ok((PairEstimate { i, j, true_visibility, phase0, weight, estimate }, scan))
        })
        .collect::<Result<_>>()?;
    let (pair_estimates, scans): (Vec<_>, Vec<_>) = measured.into_iter().unzip();

    let weights: Vec<f64> = pair_estimates.iter().map(|p| p.weight).collect();
    let v_hat: Vec<f64> = pair_estimates.iter().map(|p| p.estimate.v_hat).collect();
    let v_true: Vec<f64> = pair_estimates.iter().map(|p| p.true_visibility).collect();
    let s_hat = signed_sum(&v_hat, &weights);
    let expected_s = signed_sum(&v_true, &weights);
    let s_std_err = pair_estimates
        .iter()
        .map(|p| (2.0 * p.weight * p.estimate.v_hat * p.estimate.std_err).powi(2))
        .sum::<f64>()
        .sqrt();

    let bootstrap_std_err = match opts.bootstrap_resamples {
        Some(b) if b >= 2 => Some(bootstrap_std_err(&scans, &weights, b, opts)?),
        Some(_) => return Err(Error::Domain("bootstrap needs at least 2 resamples".into())),
        None => None,
    };

    let report = CycleReport::new(n, s_hat)?;
    let significance = if s_std_err > 0.0 { report.margin / s_std_err } else { f64::INFINITY * report.margin.signum() };
    let certified = report.violates_classical && report.margin > opts.certify_sigmas * s_std_err;
    Ok(ExperimentReport {
        pairs: pair_estimates,
        scans,
        expected_s,
        s_std_err,
        report,
        significance,
        certified,
        bootstrap_std_err,
        assumption: noise.assumption(),
    })
}

/// Parametric bootstrap: redraw each scan from its own fitted sinusoid and
/// refit.
fn bootstrap_std_err(scans: &[FringeScan], weights: &[f64], resamples: usize, opts: &ExperimentOptions) -> Result<f64> {
    let fits: Vec<SinusoidFit> = scans
        .iter()
        .map(|s| {
            let y: Vec<f64> = s.counts.iter().map(|&c| c as f64).collect();
            fit_sinusoid(&s.phases, &y)
        })
        .collect::<Result<_>>()?;
    let m = scans.len() as u64;
    let values: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|b| -> Result<f64> {
            let mut v = Vec::with_capacity(scans.len());
            for (k, (scan, fit)) in scans.iter().zip(&fits).enumerate() {
                let mut rng = pair_rng(opts.seed, BOOTSTRAP_STREAM_BASE + b as u64 * m + k as u64);
                let y: Vec<f64> = scan
                    .phases
                    .iter()
                    .map(|&p| poisson_draw(fit.model(p).max(0.0), &mut rng) as f64)
                    .collect();
                v.push(visibility_from_fit(&fit_sinusoid(&scan.phases, &y)?)?.v_hat);
            }
            Ok(signed_sum(&v, weights))
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    Ok(var.sqrt())
}
