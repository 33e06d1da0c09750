//! Pure qubit states stored as unit Bloch vectors.
//!
//! For pure states `|a⟩, |b⟩` with Bloch vectors `a, b` the squared overlap is
//! `|⟨a|b⟩|² = (1 + a·b)/2 = cos²(θ/2)` where `θ = arccos(a·b)` is the
//! geodesic angle on the sphere.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Bloch vectors must satisfy `| |v| - 1 | <= UNIT_TOL` after construction.
pub const UNIT_TOL: f64 = 1e-12;

/// Inputs further than this from unit norm are rejected instead of normalised.
pub const ACCEPT_TOL: f64 = 1e-6;

/// Scales `v` to unit length. Fails on a (numerically) zero vector.
pub fn normalize(v: [f64; 3]) -> Result<[f64; 3]> {
    let norm = norm3(&v);
    if !norm.is_finite() || norm < 1e-300 {
        return Err(Error::InvalidState(format!("cannot normalise {v:?}")));
    }
    Ok([v[0] / norm, v[1] / norm, v[2] / norm])
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

/// A pure qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureQubit {
    bloch: [f64; 3],
}

impl PureQubit {
    /// Accepts a Bloch vector within [`ACCEPT_TOL`] of unit norm and
    /// renormalises it to [`UNIT_TOL`].
    pub fn new(bloch: [f64; 3]) -> Result<Self> {
        if bloch.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite Bloch vector {bloch:?}")));
        }
        let norm = norm3(&bloch);
        if (norm - 1.0).abs() > ACCEPT_TOL {
            return Err(Error::InvalidState(format!(
                "Bloch vector {bloch:?} has norm {norm}, expected 1"
            )));
        }
        Ok(Self { bloch: normalize(bloch)? })
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`, i.e. polar angle `theta` and
    /// azimuth `phi` on the Bloch sphere.
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { bloch: [st * cp, st * sp, ct] }
    }

    /// `alpha|0⟩ + beta|1⟩`. The pair must be normalised to within
    /// [`ACCEPT_TOL`]; the global phase is discarded.
    pub fn from_amplitudes(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let p0 = alpha.norm_sqr();
        let p1 = beta.norm_sqr();
        if ((p0 + p1) - 1.0).abs() > ACCEPT_TOL {
            return Err(Error::InvalidState(format!(
                "amplitudes ({alpha}, {beta}) have total weight {}",
                p0 + p1
            )));
        }
        let cross = alpha.conj() * beta;
        Self::new([2.0 * cross.re, 2.0 * cross.im, p0 - p1])
    }

    /// Linear polarisation `cos a |H⟩ + sin a |V⟩` with `|H⟩ = |0⟩`.
    ///
    /// The Bloch vector sits at polar angle `2a` in the xz-plane, so two
    /// polarisations `a` apart have overlap `cos²(a)`.
    pub fn linear_polarization(angle: f64) -> Self {
        Self::from_polar(2.0 * angle, 0.0)
    }

    /// `|0⟩`, the +z pole.
    pub fn zero() -> Self {
        Self { bloch: [0.0, 0.0, 1.0] }
    }

    /// `|1⟩`, the −z pole.
    pub fn one() -> Self {
        Self { bloch: [0.0, 0.0, -1.0] }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    /// The orthogonal state.
    pub fn antipode(&self) -> Self {
        let [x, y, z] = self.bloch;
        Self { bloch: [-x, -y, -z] }
    }

    /// Amplitudes `(cos(θ/2), e^{iφ} sin(θ/2))` in the computational basis.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        let [x, y, z] = self.bloch;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        (
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        )
    }

    /// The rank-one projector `|d⟩⟨d|`.
    pub fn projector(&self) -> DensityMatrix2 {
        DensityMatrix2::from_bloch(self.bloch)
    }

    fn check(&self) -> Result<()> {
        let norm = norm3(&self.bloch);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidState(format!("Bloch vector norm {norm} is not 1")));
        }
        Ok(())
    }
}

/// Squared overlap `|⟨a|b⟩|² = (1 + a·b)/2`.
pub fn overlap(a: &PureQubit, b: &PureQubit) -> Result<f64> {
    a.check()?;
    b.check()?;
    Ok((0.5 * (1.0 + dot3(&a.bloch, &b.bloch))).clamp(0.0, 1.0))
}

/// Geodesic angle `arccos(a·b)` between the two Bloch vectors, in `[0, π]`.
pub fn geodesic_angle(a: &PureQubit, b: &PureQubit) -> Result<f64> {
    a.check()?;
    b.check()?;
    Ok(dot3(&a.bloch, &b.bloch).clamp(-1.0, 1.0).acos())
}

/// All pairwise overlaps of `states`.
pub fn overlap_matrix(states: &[PureQubit]) -> Result<OverlapMatrix> {
    let n = states.len();
    if n < 2 {
        return Err(Error::Size(format!("need at least 2 states, got {n}")));
    }
    let mut r = vec![1.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let o = overlap(&states[i], &states[j])?;
            r[i * n + j] = o;
            r[j * n + i] = o;
        }
    }
    Ok(OverlapMatrix { n, r })
}

/// `½|d⟩⟨d| + ½|d⊥⟩⟨d⊥|`, which is `𝕀/2` for every pure `d`.
pub fn equal_mixture_with_antipode(d: &PureQubit) -> Result<DensityMatrix2> {
    d.check()?;
    let p = d.projector();
    let q = d.antipode().projector();
    Ok(p.mix(&q, 0.5))
}

/// Symmetric matrix of squared overlaps `r_ij` with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    n: usize,
    r: Vec<f64>,
}

impl OverlapMatrix {
    /// Builds from a row-major `n × n` matrix. Entries within 1e-12 of
    /// `[0, 1]` are clamped; anything else is rejected.
    pub fn new(n: usize, r: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Size(format!("overlap matrix needs n >= 2, got {n}")));
        }
        if r.len() != n * n {
            return Err(Error::Size(format!("expected {} entries, got {}", n * n, r.len())));
        }
        let mut r = r;
        for i in 0..n {
            if (r[i * n + i] - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("r[{i}][{i}] = {} != 1", r[i * n + i])));
            }
            r[i * n + i] = 1.0;
            for j in (i + 1)..n {
                let (a, b) = (r[i * n + j], r[j * n + i]);
                if !a.is_finite() || (a - b).abs() > 1e-12 {
                    return Err(Error::Domain(format!("r[{i}][{j}] = {a} but r[{j}][{i}] = {b}")));
                }
                if !(-1e-12..=1.0 + 1e-12).contains(&a) {
                    return Err(Error::Domain(format!("r[{i}][{j}] = {a} outside [0, 1]")));
                }
                let v = a.clamp(0.0, 1.0);
                r[i * n + j] = v;
                r[j * n + i] = v;
            }
        }
        Ok(Self { n, r })
    }

    /// Three-state matrix from `(r12, r23, r13)`.
    pub fn from_triple(r12: f64, r23: f64, r13: f64) -> Result<Self> {
        Self::new(3, vec![1.0, r12, r13, r12, 1.0, r23, r13, r23, 1.0])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `r_ij` with zero-based indices. Panics when out of range.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range for n = {}", self.n);
        self.r[i * self.n + j]
    }

    /// `(r12, r23, r13)` for a three-state matrix.
    pub fn triple(&self) -> Result<(f64, f64, f64)> {
        if self.n != 3 {
            return Err(Error::Size(format!("expected 3 states, got {}", self.n)));
        }
        Ok((self.get(0, 1), self.get(1, 2), self.get(0, 2)))
    }
}

/// A 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    pub entries: [[Complex64; 2]; 2],
}

impl DensityMatrix2 {
    /// `(𝕀 + r·σ)/2`.
    pub fn from_bloch(r: [f64; 3]) -> Self {
        let [x, y, z] = r;
        Self {
            entries: [
                [Complex64::new(0.5 * (1.0 + z), 0.0), Complex64::new(0.5 * x, -0.5 * y)],
                [Complex64::new(0.5 * x, 0.5 * y), Complex64::new(0.5 * (1.0 - z), 0.0)],
            ],
        }
    }

    pub fn maximally_mixed() -> Self {
        Self::from_bloch([0.0, 0.0, 0.0])
    }

    /// `w·self + (1 − w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Self {
        let mut entries = self.entries;
        for (row, orow) in entries.iter_mut().zip(other.entries.iter()) {
            for (e, o) in row.iter_mut().zip(orow.iter()) {
                *e = *e * w + *o * (1.0 - w);
            }
        }
        Self { entries }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Bloch vector `(2 Re ρ10, 2 Im ρ10, ρ00 − ρ11)`.
    pub fn bloch(&self) -> [f64; 3] {
        let off = self.entries[1][0];
        [2.0 * off.re, 2.0 * off.im, (self.entries[0][0] - self.entries[1][1]).re]
    }

    /// Eigenvalues in ascending order, from the Hermitian part.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let b = 0.5 * (self.entries[0][1] + self.entries[1][0].conj());
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - rad, mean + rad]
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        m
    }

    /// Hermitian, unit trace and positive semidefinite to within 1e-12.
    pub fn validate(&self) -> Result<()> {
        let herm = (self.entries[0][1] - self.entries[1][0].conj()).norm()
            .max(self.entries[0][0].im.abs())
            .max(self.entries[1][1].im.abs());
        if herm > 1e-12 {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm})")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > 1e-12 {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let [lo, _] = self.eigenvalues();
        if lo < -1e-12 {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn optimal_triple() -> [PureQubit; 3] {
        let s3 = 3f64.sqrt() / 2.0;
        [
            PureQubit::from_amplitudes(Complex64::new(s3, 0.0), Complex64::new(0.5, 0.0)).unwrap(),
            PureQubit::zero(),
            PureQubit::from_amplitudes(Complex64::new(s3, 0.0), Complex64::new(-0.5, 0.0)).unwrap(),
        ]
    }

    #[test]
    fn overlap_examples() {
        let a = PureQubit::from_polar(0.7, 1.3);
        assert!((overlap(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!(overlap(&a, &a.antipode()).unwrap().abs() < 1e-15);
        let b = PureQubit::from_polar(0.7 + FRAC_PI_3, 1.3);
        assert!((overlap(&a, &b).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn geodesic_angle_examples() {
        let a = PureQubit::from_polar(1.1, -0.4);
        assert_eq!(geodesic_angle(&a, &a).unwrap(), 0.0);
        // overlap 1/4 <-> 2π/3, overlap 1/2 <-> π/2
        let b = PureQubit::from_polar(1.1 + 2.0 * PI / 3.0, -0.4);
        assert!((overlap(&a, &b).unwrap() - 0.25).abs() < 1e-12);
        assert!((geodesic_angle(&a, &b).unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
        let c = PureQubit::from_polar(1.1 + FRAC_PI_2, -0.4);
        assert!((overlap(&a, &c).unwrap() - 0.5).abs() < 1e-12);
        assert!((geodesic_angle(&a, &c).unwrap() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_off_unit_vectors() {
        assert!(matches!(PureQubit::new([0.0, 0.0, 1.1]), Err(Error::InvalidState(_))));
        assert!(matches!(PureQubit::new([0.0, 0.0, 0.0]), Err(Error::InvalidState(_))));
        assert!(PureQubit::new([f64::NAN, 0.0, 1.0]).is_err());
        let q = PureQubit::new([0.0, 0.0, 1.0 + 5e-7]).unwrap();
        assert!((norm3(&q.bloch()) - 1.0).abs() <= UNIT_TOL);
        assert!(normalize([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn overlap_matrix_examples() {
        let a = PureQubit::from_polar(0.3, 0.2);
        let m = overlap_matrix(&[a, a, a]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.get(i, j) - 1.0).abs() < 1e-15);
            }
        }
        let m = overlap_matrix(&optimal_triple()).unwrap();
        let (r12, r23, r13) = m.triple().unwrap();
        assert!((r12 - 0.75).abs() < 1e-12);
        assert!((r23 - 0.75).abs() < 1e-12);
        assert!((r13 - 0.25).abs() < 1e-12);
        let m = overlap_matrix(&[PureQubit::zero(), PureQubit::one()]).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert!(matches!(overlap_matrix(&[a]), Err(Error::Size(_))));
    }

    #[test]
    fn overlap_matrix_validation() {
        assert!(OverlapMatrix::from_triple(0.5, 0.5, 1.5).is_err());
        assert!(OverlapMatrix::new(2, vec![1.0, 0.2, 0.3, 1.0]).is_err());
        assert!(OverlapMatrix::new(2, vec![0.9, 0.2, 0.2, 1.0]).is_err());
        assert!(OverlapMatrix::new(2, vec![1.0, 0.2, 0.2]).is_err());
        let m = OverlapMatrix::from_triple(1.0, 1e-13 - 1e-13, 1.0 + 1e-13).unwrap();
        assert_eq!(m.get(0, 2), 1.0);
    }

    #[test]
    fn polarization_and_amplitude_constructors_agree() {
        let [d1, d2, d3] = optimal_triple();
        let p1 = PureQubit::linear_polarization(PI / 6.0);
        let p3 = PureQubit::linear_polarization(-PI / 6.0);
        for (a, b) in [(d1, p1), (d2, PureQubit::linear_polarization(0.0)), (d3, p3)] {
            let (x, y) = (a.bloch(), b.bloch());
            for k in 0..3 {
                assert!((x[k] - y[k]).abs() < 1e-12);
            }
        }
        let q = PureQubit::from_polar(2.1, 0.8);
        let (alpha, beta) = q.amplitudes();
        let back = PureQubit::from_amplitudes(alpha, beta).unwrap();
        for k in 0..3 {
            assert!((back.bloch()[k] - q.bloch()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn antipodal_mixture_is_maximally_mixed() {
        let half = DensityMatrix2::maximally_mixed();
        for d in [PureQubit::zero(), optimal_triple()[0], PureQubit::from_polar(2.3, -1.9)] {
            let rho = equal_mixture_with_antipode(&d).unwrap();
            assert!(rho.max_abs_diff(&half) < 1e-12);
            let [lo, hi] = rho.eigenvalues();
            assert!((lo - 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_is_a_valid_pure_state() {
        let p = PureQubit::from_polar(0.4, 2.0).projector();
        p.validate().unwrap();
        let [lo, hi] = p.eigenvalues();
        assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        let bad = DensityMatrix2::from_bloch([0.0, 0.0, 1.5]);
        assert!(bad.validate().is_err());
    }
}
