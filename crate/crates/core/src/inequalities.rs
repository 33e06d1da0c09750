//! Classical overlap inequalities and their qubit bounds.
//!
//! For three states the nontrivial facets of the classical overlap polytope
//! are `r12 + r23 − r13 ≤ 1` and its permutations. For a cycle of `n` states
//! the relevant facet is
//!
//! ```text
//! S_n = Σ_{i=1}^{n−1} r_{i,i+1} − r_{1n} ≤ n − 2,
//! ```
//!
//! while pure qubits reach `n cos²(π/2n) − 1` and no more.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::bloch::{overlap_matrix, OverlapMatrix, PureQubit};
use crate::error::{Error, Result};
use crate::interferometer::VisibilityMatrix;

/// Slack on `≤` comparisons of individual inequalities.
pub const FACET_TOL: f64 = 1e-12;

/// A cycle value must exceed the classical bound by more than this to count
/// as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FacetCheck {
    pub label: &'static str,
    pub lhs: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleCheck {
    pub label: &'static str,
    /// Disagreement probability of the closing pair.
    pub lhs: f64,
    /// Sum of the other two disagreement probabilities.
    pub rhs: f64,
    pub satisfied: bool,
}

fn require_three(r: &OverlapMatrix) -> Result<(f64, f64, f64)> {
    if r.n() != 3 {
        return Err(Error::Size(format!("three-path inequality needs n = 3, got {}", r.n())));
    }
    r.triple()
}

/// `r12 + r23 − r13`, `r12 + r13 − r23`, `r23 + r13 − r12`, each `≤ 1`.
pub fn three_path_facets(r: &OverlapMatrix) -> Result<[FacetCheck; 3]> {
    let (r12, r23, r13) = require_three(r)?;
    let facet = |label, lhs: f64| FacetCheck { label, lhs, satisfied: lhs <= 1.0 + FACET_TOL };
    Ok([
        facet("r12+r23-r13", r12 + r23 - r13),
        facet("r12+r13-r23", r12 + r13 - r23),
        facet("r23+r13-r12", r23 + r13 - r12),
    ])
}

/// The same three facets written as triangle inequalities on the disagreement
/// probabilities `1 − r_ij`, in the same order as [`three_path_facets`].
pub fn disagreement_triangle(r: &OverlapMatrix) -> Result<[TriangleCheck; 3]> {
    let (r12, r23, r13) = require_three(r)?;
    let (d12, d23, d13) = (1.0 - r12, 1.0 - r23, 1.0 - r13);
    let tri = |label, lhs: f64, rhs: f64| TriangleCheck {
        label,
        lhs,
        rhs,
        satisfied: lhs <= rhs + FACET_TOL,
    };
    Ok([
        tri("d13<=d12+d23", d13, d12 + d23),
        tri("d23<=d12+d13", d23, d12 + d13),
        tri("d12<=d23+d13", d12, d23 + d13),
    ])
}

/// Amplitude weight `(|c_i|² + |c_j|²)² / (4 |c_i c_j|²)` that turns `V_ij²`
/// back into `r_ij`.
pub fn visibility_weight(ci: Complex64, cj: Complex64) -> Result<f64> {
    let (pi, pj) = (ci.norm_sqr(), cj.norm_sqr());
    if !(pi > 0.0 && pj > 0.0) {
        return Err(Error::InvalidSpec("visibility weight needs nonzero amplitudes".into()));
    }
    Ok((pi + pj).powi(2) / (4.0 * pi * pj))
}

/// Left-hand side of the three-path visibility inequality for arbitrary
/// nonzero amplitudes: `w12 V12² + w23 V23² − w13 V13²`.
pub fn asymmetric_visibility_lhs(amplitudes: &[Complex64], v: &VisibilityMatrix) -> Result<f64> {
    if amplitudes.len() != 3 || v.n() != 3 {
        return Err(Error::Size(format!(
            "need 3 amplitudes and a 3x3 visibility matrix, got {} and {}",
            amplitudes.len(),
            v.n()
        )));
    }
    let term = |i: usize, j: usize| -> Result<f64> {
        Ok(visibility_weight(amplitudes[i], amplitudes[j])? * v.get(i, j).powi(2))
    };
    Ok(term(0, 1)? + term(1, 2)? - term(0, 2)?)
}

fn require_cycle(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Size(format!("cycle length must be at least 3, got {n}")));
    }
    Ok(())
}

/// `S_n = Σ_{i=1}^{n−1} r_{i,i+1} − r_{1n}` in label order.
pub fn cycle_value(r: &OverlapMatrix) -> Result<f64> {
    let n = r.n();
    require_cycle(n)?;
    let chain: f64 = (0..n - 1).map(|i| r.get(i, i + 1)).sum();
    Ok(chain - r.get(0, n - 1))
}

/// [`cycle_value`] of the overlaps of `states`.
pub fn cycle_value_of_states(states: &[PureQubit]) -> Result<f64> {
    require_cycle(states.len())?;
    cycle_value(&overlap_matrix(states)?)
}

/// `Σ V_{i,i+1}² − V_{1n}²`, which equals `S_n` for a balanced interferometer.
pub fn visibility_cycle_value(v: &VisibilityMatrix) -> Result<f64> {
    let n = v.n();
    require_cycle(n)?;
    let chain: f64 = (0..n - 1).map(|i| v.get(i, i + 1).powi(2)).sum();
    Ok(chain - v.get(0, n - 1).powi(2))
}

pub fn classical_bound(n: usize) -> Result<f64> {
    require_cycle(n)?;
    Ok(n as f64 - 2.0)
}

/// `n cos²(π/2n) − 1`, the largest `S_n` reachable with pure qubits.
pub fn quantum_max(n: usize) -> Result<f64> {
    require_cycle(n)?;
    let nf = n as f64;
    Ok(nf * (PI / (2.0 * nf)).cos().powi(2) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticGap {
    /// `quantum_max(n) − (n − 2)`.
    pub exact: f64,
    /// `1 − π²/(4n)`.
    pub first_order: f64,
    pub residual: f64,
}

pub fn asymptotic_gap(n: usize) -> Result<AsymptoticGap> {
    require_cycle(n)?;
    let nf = n as f64;
    // n cos²x − 1 − (n − 2) = 1 − n sin²x; the sine form avoids cancellation.
    let exact = 1.0 - nf * (PI / (2.0 * nf)).sin().powi(2);
    let first_order = 1.0 - PI * PI / (4.0 * nf);
    Ok(AsymptoticGap { exact, first_order, residual: exact - first_order })
}

/// Deterministic assignments `(r12, r23, r13)` of three states: each state
/// carries one ontic value and `r_ij = 1` exactly when the values agree.
pub const CLASSICAL_VERTICES: [[f64; 3]; 5] = [
    [1.0, 1.0, 1.0],
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
];

/// A random point of the classical three-state overlap polytope: a convex
/// combination of [`CLASSICAL_VERTICES`] with flat-Dirichlet weights.
pub fn classical_polytope_member_sample(seed: u64) -> OverlapMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..CLASSICAL_VERTICES.len()).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = raw.iter().sum();
    mix_vertices(&raw.iter().map(|w| w / total).collect::<Vec<_>>())
        .expect("convex weights give a valid overlap triple")
}

/// `Σ w_k · vertex_k` for weights over [`CLASSICAL_VERTICES`].
pub fn mix_vertices(weights: &[f64]) -> Result<OverlapMatrix> {
    if weights.len() != CLASSICAL_VERTICES.len() || weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::Domain(format!("expected 5 nonnegative weights, got {weights:?}")));
    }
    let mut r = [0.0; 3];
    for (w, vertex) in weights.iter().zip(CLASSICAL_VERTICES.iter()) {
        for k in 0..3 {
            r[k] += w * vertex[k];
        }
    }
    OverlapMatrix::from_triple(r[0], r[1], r[2])
}

/// `S_n` against its classical bound and qubit maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub n: usize,
    pub s_value: f64,
    pub classical_bound: f64,
    pub quantum_max: f64,
    pub violates_classical: bool,
    /// `s_value − classical_bound`.
    pub margin: f64,
}

impl CycleReport {
    pub fn new(n: usize, s_value: f64) -> Result<Self> {
        let classical_bound = classical_bound(n)?;
        let margin = s_value - classical_bound;
        Ok(Self {
            n,
            s_value,
            classical_bound,
            quantum_max: quantum_max(n)?,
            violates_classical: margin > VIOLATION_TOL,
            margin,
        })
    }

    pub fn from_overlaps(r: &OverlapMatrix) -> Result<Self> {
        Self::new(r.n(), cycle_value(r)?)
    }

    pub fn from_states(states: &[PureQubit]) -> Result<Self> {
        Self::new(states.len(), cycle_value_of_states(states)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::{visibility_matrix, InterferometerSpec};
    use crate::presets;

    fn triple(r12: f64, r23: f64, r13: f64) -> OverlapMatrix {
        OverlapMatrix::from_triple(r12, r23, r13).unwrap()
    }

    #[test]
    fn facet_examples() {
        let f = three_path_facets(&triple(0.75, 0.75, 0.25)).unwrap();
        assert!((f[0].lhs - 1.25).abs() < 1e-15);
        assert!(!f[0].satisfied);
        assert!(f[1].satisfied && f[2].satisfied);

        let f = three_path_facets(&triple(1.0, 1.0, 1.0)).unwrap();
        assert!(f.iter().all(|c| c.lhs == 1.0 && c.satisfied));

        let f = three_path_facets(&triple(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(f[0].lhs, 2.0);
        assert!(!f[0].satisfied);

        let four = OverlapMatrix::new(4, vec![1.0; 16]).unwrap();
        assert!(matches!(three_path_facets(&four), Err(Error::Size(_))));
        assert!(matches!(disagreement_triangle(&four), Err(Error::Size(_))));
    }

    #[test]
    fn triangle_examples() {
        let t = disagreement_triangle(&triple(0.75, 0.75, 0.25)).unwrap();
        assert!((t[0].lhs - 0.75).abs() < 1e-15 && (t[0].rhs - 0.5).abs() < 1e-15);
        assert!(!t[0].satisfied);

        let t = disagreement_triangle(&triple(1.0, 1.0, 1.0)).unwrap();
        assert!(t[0].lhs == 0.0 && t[0].rhs == 0.0 && t[0].satisfied);

        let t = disagreement_triangle(&triple(0.5, 0.5, 0.5)).unwrap();
        assert!(t[0].lhs == 0.5 && t[0].rhs == 1.0 && t[0].satisfied);
    }

    #[test]
    fn asymmetric_lhs_examples() {
        let h = Complex64::new((1.0f64 / 3.0).sqrt(), 0.0);
        let s3 = 3f64.sqrt() / 2.0;
        let v = VisibilityMatrix::from_triple(s3, s3, 0.5).unwrap();
        assert!((asymmetric_visibility_lhs(&[h, h, h], &v).unwrap() - 1.25).abs() < 1e-12);

        let d = PureQubit::from_polar(0.4, 0.4);
        let spec = InterferometerSpec::from_path_probabilities(&[0.6, 0.1, 0.3], vec![d; 3]).unwrap();
        let v = visibility_matrix(&spec).unwrap();
        assert!((asymmetric_visibility_lhs(spec.amplitudes(), &v).unwrap() - 1.0).abs() < 1e-12);

        let spec = InterferometerSpec::from_path_probabilities(
            &[0.5, 0.3, 0.2],
            presets::optimal_triple_detectors().to_vec(),
        )
        .unwrap();
        let v = visibility_matrix(&spec).unwrap();
        assert!((asymmetric_visibility_lhs(spec.amplitudes(), &v).unwrap() - 1.25).abs() < 1e-12);

        let z = Complex64::new(0.0, 0.0);
        assert!(matches!(asymmetric_visibility_lhs(&[h, z, h], &v), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn cycle_value_examples() {
        let r = overlap_matrix(&presets::optimal_triple_detectors()).unwrap();
        assert!((cycle_value(&r).unwrap() - 1.25).abs() < 1e-12);
        let ones = OverlapMatrix::new(4, vec![1.0; 16]).unwrap();
        assert_eq!(cycle_value(&ones).unwrap(), 2.0);
        let s4 = cycle_value_of_states(&presets::uniform_cycle(4)).unwrap();
        assert!((s4 - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        let two = OverlapMatrix::new(2, vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        assert!(matches!(cycle_value(&two), Err(Error::Size(_))));
    }

    #[test]
    fn bound_examples() {
        assert_eq!(classical_bound(3).unwrap(), 1.0);
        assert_eq!(classical_bound(5).unwrap(), 3.0);
        assert_eq!(classical_bound(100).unwrap(), 98.0);
        assert!(classical_bound(2).is_err());
        assert!((quantum_max(3).unwrap() - 1.25).abs() < 1e-12);
        assert!((quantum_max(4).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((quantum_max(6).unwrap() - (2.0 + 1.5 * 3f64.sqrt())).abs() < 1e-12);
        assert!(matches!(quantum_max(2), Err(Error::Size(_))));
    }

    /// `1 − n sin²(π/2n)` from the Taylor series of `sin²`, an independent
    /// route to the exact gap.
    fn gap_series(n: usize) -> f64 {
        let x = PI / (2.0 * n as f64);
        // sin²x = Σ_{k≥1} (−1)^{k+1} 2^{2k−1} x^{2k} / (2k)!
        let mut sum = 0.0;
        let mut term = x * x; // k = 1: 2 x² / 2!
        for k in 1..20 {
            sum += term;
            let k2 = 2.0 * k as f64;
            term *= -4.0 * x * x / ((k2 + 1.0) * (k2 + 2.0));
        }
        1.0 - n as f64 * sum
    }

    #[test]
    fn asymptotic_gap_examples() {
        let g = asymptotic_gap(3).unwrap();
        assert!((g.exact - 0.25).abs() < 1e-12);
        let g = asymptotic_gap(1000).unwrap();
        assert!((g.exact - gap_series(1000)).abs() < 1e-13);
        assert!(g.residual.abs() < 1e-7);
        // leading residual term is π⁴/(48 n³)
        let lead = PI.powi(4) / (48.0 * 1e9);
        assert!((g.residual - lead).abs() < 1e-3 * lead);

        let mut prev = asymptotic_gap(3).unwrap().exact;
        for n in 4..=10_000 {
            let cur = asymptotic_gap(n).unwrap().exact;
            assert!(cur > prev && cur < 1.0, "n = {n}");
            prev = cur;
        }
    }

    #[test]
    fn polytope_sampler_examples() {
        let pure = |k: usize| {
            let mut w = [0.0; 5];
            w[k] = 1.0;
            mix_vertices(&w).unwrap()
        };
        let f = three_path_facets(&pure(0)).unwrap();
        assert!(f.iter().all(|c| c.lhs == 1.0 && c.satisfied));
        let f = three_path_facets(&pure(1)).unwrap();
        assert!(f.iter().all(|c| c.lhs == 0.0));
        let half = mix_vertices(&[0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(half.triple().unwrap(), (0.5, 0.5, 0.5));
        assert!(three_path_facets(&half).unwrap().iter().all(|c| c.satisfied));

        assert_eq!(classical_polytope_member_sample(9), classical_polytope_member_sample(9));
        assert!(mix_vertices(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn report_fields() {
        let rep = CycleReport::from_states(&presets::optimal_triple_detectors()).unwrap();
        assert_eq!(rep.classical_bound, 1.0);
        assert!(rep.violates_classical);
        assert!((rep.margin - 0.25).abs() < 1e-12);
        let rep = CycleReport::from_states(&presets::classical_vertex_111()).unwrap();
        assert!(!rep.violates_classical);
        assert_eq!(rep.margin, 0.0);
        // rounding-level excess is not a violation
        let rep = CycleReport::new(3, 1.0 + 1e-11).unwrap();
        assert!(!rep.violates_classical);
    }
}
