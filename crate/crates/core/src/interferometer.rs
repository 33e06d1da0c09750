//! The n-path interferometer: complex path amplitudes `c_i`, one pure detector
//! state per path, and the quantities observable by opening two paths at a time.
//!
//! Path kets are never materialised. Every quantity here depends only on the
//! moduli `|c_i|` and the detector states, so phases on the amplitudes are
//! carried but have no effect.

use num_complex::Complex64;

use crate::bloch::{overlap, overlap_matrix, DensityMatrix2, OverlapMatrix, PureQubit};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerSpec {
    amplitudes: Vec<Complex64>,
    detectors: Vec<PureQubit>,
}

impl InterferometerSpec {
    pub fn new(amplitudes: Vec<Complex64>, detectors: Vec<PureQubit>) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 {
            return Err(Error::Size(format!("need at least 2 paths, got {n}")));
        }
        if detectors.len() != n {
            return Err(Error::InvalidSpec(format!(
                "{n} amplitudes but {} detector states",
                detectors.len()
            )));
        }
        if let Some(i) = amplitudes.iter().position(|c| !(c.norm() > 0.0) || !c.norm().is_finite()) {
            return Err(Error::InvalidSpec(format!("amplitude c_{} is zero or not finite", i + 1)));
        }
        let total: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidSpec(format!("sum |c_i|^2 = {total}, expected 1")));
        }
        Ok(Self { amplitudes, detectors })
    }

    /// Balanced interferometer, `|c_i|² = 1/n`.
    pub fn symmetric(detectors: Vec<PureQubit>) -> Result<Self> {
        let n = detectors.len();
        let c = Complex64::new((1.0 / n as f64).sqrt(), 0.0);
        Self::new(vec![c; n], detectors)
    }

    /// Real amplitudes `sqrt(p_i)` from path probabilities, renormalised.
    pub fn from_path_probabilities(probs: &[f64], detectors: Vec<PureQubit>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|&p| !(p > 0.0)) || !total.is_finite() {
            return Err(Error::InvalidSpec(format!("path probabilities must be positive: {probs:?}")));
        }
        let amps = probs.iter().map(|&p| Complex64::new((p / total).sqrt(), 0.0)).collect();
        Self::new(amps, detectors)
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn detectors(&self) -> &[PureQubit] {
        &self.detectors
    }

    /// True when `|c_i|² = 1/n` within 1e-12 for every path.
    pub fn is_symmetric(&self) -> bool {
        let target = 1.0 / self.n() as f64;
        self.amplitudes.iter().all(|c| (c.norm_sqr() - target).abs() <= NORM_TOL)
    }

    fn require_symmetric(&self) -> Result<()> {
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(Error::Precondition("requires balanced amplitudes |c_i|^2 = 1/n".into()))
        }
    }

    pub fn overlaps(&self) -> Result<OverlapMatrix> {
        overlap_matrix(&self.detectors)
    }
}

/// Symmetric matrix of two-path visibilities with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityMatrix {
    n: usize,
    v: Vec<f64>,
}

impl VisibilityMatrix {
    /// Row-major `n × n`. Diagonal entries are ignored and stored as zero.
    pub fn new(n: usize, v: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Size(format!("visibility matrix needs n >= 2, got {n}")));
        }
        if v.len() != n * n {
            return Err(Error::Size(format!("expected {} entries, got {}", n * n, v.len())));
        }
        let mut v = v;
        for i in 0..n {
            v[i * n + i] = 0.0;
            for j in (i + 1)..n {
                let (a, b) = (v[i * n + j], v[j * n + i]);
                if !a.is_finite() || (a - b).abs() > 1e-12 {
                    return Err(Error::Domain(format!("V[{i}][{j}] = {a} but V[{j}][{i}] = {b}")));
                }
                if !(-1e-12..=1.0 + 1e-12).contains(&a) {
                    return Err(Error::Domain(format!("V[{i}][{j}] = {a} outside [0, 1]")));
                }
                let a = a.clamp(0.0, 1.0);
                v[i * n + j] = a;
                v[j * n + i] = a;
            }
        }
        Ok(Self { n, v })
    }

    /// Three-path matrix from `(V12, V23, V13)`.
    pub fn from_triple(v12: f64, v23: f64, v13: f64) -> Result<Self> {
        Self::new(3, vec![0.0, v12, v13, v12, 0.0, v23, v13, v23, 0.0])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range for n = {}", self.n);
        self.v[i * self.n + j]
    }

    /// Applies `f(i, j, v_ij)` to every off-diagonal entry.
    pub(crate) fn map(&self, f: impl Fn(usize, usize, f64) -> f64) -> Result<Self> {
        let n = self.n;
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    v[i * n + j] = f(i, j, self.get(i, j));
                }
            }
        }
        Self::new(n, v)
    }
}

/// `ρ_D = Σ |c_i|² |d_i⟩⟨d_i|`.
pub fn reduced_detector_state(spec: &InterferometerSpec) -> Result<DensityMatrix2> {
    let total: f64 = spec.amplitudes.iter().map(|c| c.norm_sqr()).sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidSpec(format!("sum |c_i|^2 = {total}, expected 1")));
    }
    let mut r = [0.0; 3];
    for (c, d) in spec.amplitudes.iter().zip(&spec.detectors) {
        let w = c.norm_sqr();
        for (acc, b) in r.iter_mut().zip(d.bloch()) {
            *acc += w * b;
        }
    }
    Ok(DensityMatrix2::from_bloch(r))
}

/// `V_ij = 2|c_i c_j| / (|c_i|² + |c_j|²) · |⟨d_i|d_j⟩|` for zero-based `i ≠ j`.
pub fn pairwise_visibility(spec: &InterferometerSpec, i: usize, j: usize) -> Result<f64> {
    let n = spec.n();
    if i == j || i >= n || j >= n {
        return Err(Error::Index(format!("need distinct paths in 0..{n}, got ({i}, {j})")));
    }
    let (ai, aj) = (spec.amplitudes[i].norm(), spec.amplitudes[j].norm());
    if !(ai > 0.0 && aj > 0.0) {
        return Err(Error::InvalidSpec(format!("zero amplitude on path {} or {}", i + 1, j + 1)));
    }
    let balance = 2.0 * ai * aj / (ai * ai + aj * aj);
    let modulus = overlap(&spec.detectors[i], &spec.detectors[j])?.sqrt();
    Ok((balance * modulus).clamp(0.0, 1.0))
}

pub fn visibility_matrix(spec: &InterferometerSpec) -> Result<VisibilityMatrix> {
    let n = spec.n();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let x = pairwise_visibility(spec, i, j)?;
            v[i * n + j] = x;
            v[j * n + i] = x;
        }
    }
    VisibilityMatrix::new(n, v)
}

/// `max_{i<j} |V_ij² − r_ij|` for a balanced interferometer.
pub fn symmetric_visibility_identity_check(spec: &InterferometerSpec) -> Result<f64> {
    spec.require_symmetric()?;
    let v = visibility_matrix(spec)?;
    let r = spec.overlaps()?;
    let n = spec.n();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((v.get(i, j).powi(2) - r.get(i, j)).abs());
        }
    }
    Ok(worst)
}

/// Hilbert–Schmidt coherence of `ρ_D` in the balanced case,
/// `C_HS = (1/n²) Σ_{i≠j} V_ij²`.
pub fn hs_coherence(spec: &InterferometerSpec) -> Result<f64> {
    spec.require_symmetric()?;
    let v = visibility_matrix(spec)?;
    let n = spec.n();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += v.get(i, j).powi(2);
            }
        }
    }
    Ok(sum / (n * n) as f64)
}
