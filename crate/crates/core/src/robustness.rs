//! Uniform visibility reduction `V_ij → η V_ij` and the resulting thresholds.
//!
//! Under the uniform model a squared-visibility cycle value scales by `η²`, so
//! a qubit-optimal violation survives iff `η > η_min = √((n − 2)/S_n^max)`.
//! Thresholds are only reported for the uniform case.

use crate::error::{Error, Result};
use crate::inequalities::{classical_bound, quantum_max};
use crate::interferometer::VisibilityMatrix;

/// Slack on the classical-bound comparison after noise.
pub const NOISY_VIOLATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    eta: f64,
    /// Optional per-pair factors (row-major `n × n`) replacing `eta`.
    pair_factors: Option<(usize, Vec<f64>)>,
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("efficiency factor {eta} outside (0, 1]")));
    }
    Ok(())
}

impl NoiseModel {
    pub fn uniform(eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self { eta, pair_factors: None })
    }

    pub fn ideal() -> Self {
        Self { eta: 1.0, pair_factors: None }
    }

    /// Per-pair factors `η_ij`; symmetric, each in `(0, 1]`. `eta` reports
    /// their smallest off-diagonal value.
    pub fn per_pair(n: usize, factors: Vec<f64>) -> Result<Self> {
        if factors.len() != n * n || n < 2 {
            return Err(Error::Size(format!("expected {} factors for n = {n}", n * n)));
        }
        let mut min = 1.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let f = factors[i * n + j];
                check_eta(f)?;
                if (f - factors[j * n + i]).abs() > 1e-12 {
                    return Err(Error::Domain(format!("factor ({i}, {j}) is not symmetric")));
                }
                min = min.min(f);
            }
        }
        Ok(Self { eta: min, pair_factors: Some((n, factors)) })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn is_uniform(&self) -> bool {
        self.pair_factors.is_none()
    }

    pub fn factor(&self, i: usize, j: usize) -> f64 {
        match &self.pair_factors {
            Some((n, f)) => f[i * n + j],
            None => self.eta,
        }
    }

    /// Short label stating the assumption behind any threshold reported.
    pub fn assumption(&self) -> &'static str {
        if self.is_uniform() {
            "uniform visibility reduction"
        } else {
            "per-pair visibility reduction (no threshold)"
        }
    }
}

pub fn apply_noise(v: &VisibilityMatrix, m: &NoiseModel) -> Result<VisibilityMatrix> {
    if let Some((n, _)) = &m.pair_factors {
        if *n != v.n() {
            return Err(Error::Size(format!("noise model is {n}x{n}, visibilities {0}x{0}", v.n())));
        }
    }
    v.map(|i, j, x| m.factor(i, j) * x)
}

/// `√((n − 2)/S_n^max)`; for `n = 3` this is `2/√5`.
pub fn eta_min(n: usize) -> Result<f64> {
    Ok((classical_bound(n)? / quantum_max(n)?).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyVerdict {
    /// `η² S_n^max`.
    pub noisy_s_max: f64,
    pub violates: bool,
}

pub fn violation_after_noise(n: usize, eta: f64) -> Result<NoisyVerdict> {
    check_eta(eta)?;
    let noisy_s_max = eta * eta * quantum_max(n)?;
    Ok(NoisyVerdict { noisy_s_max, violates: noisy_s_max > classical_bound(n)? + NOISY_VIOLATION_TOL })
}
