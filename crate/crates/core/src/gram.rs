//! Gram-matrix realisability of overlap triples.
//!
//! Three pure states with overlaps `r12, r23, r13` can be rephased so that the
//! Gram matrix depends on a single gauge-invariant phase `φ`, and
//!
//! ```text
//! det G = 1 + 2 √(r12 r23 r13) cos φ − r12 − r23 − r13.
//! ```
//!
//! The triple is realisable iff `det G ≥ 0` for some `φ`, i.e. at `cos φ = 1`.
//! With `x = √r13` that is the quadratic `x² − 2√(r12 r23) x + (r12 + r23 − 1) ≤ 0`,
//! whose roots are `x± = √(r12 r23) ± √((1 − r12)(1 − r23))`.

use std::f64::consts::TAU;

use crate::bloch::PureQubit;
use crate::error::{Error, Result};

/// Slack on `det G ≥ 0` and on the root interval.
pub const DET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramTriple {
    pub r12: f64,
    pub r23: f64,
    pub r13: f64,
    /// `θ13 − θ12 − θ23` in `[0, 2π)`, where `⟨d_i|d_j⟩ = √r_ij e^{iθ_ij}`.
    pub phase: f64,
}

impl GramTriple {
    pub fn new(r12: f64, r23: f64, r13: f64, phase: f64) -> Result<Self> {
        for (name, r) in [("r12", r12), ("r23", r23), ("r13", r13)] {
            check_prob(name, r)?;
        }
        if !phase.is_finite() {
            return Err(Error::Domain(format!("phase {phase} is not finite")));
        }
        Ok(Self { r12, r23, r13, phase: phase.rem_euclid(TAU) })
    }

    /// Overlaps and the realised gauge-invariant phase of three actual states.
    pub fn from_states(states: &[PureQubit; 3]) -> Self {
        let kets = states.map(|s| s.amplitudes());
        let inner = |i: usize, j: usize| {
            let (a, b) = (kets[i], kets[j]);
            a.0.conj() * b.0 + a.1.conj() * b.1
        };
        let (g12, g23, g13) = (inner(0, 1), inner(1, 2), inner(0, 2));
        // A vanishing overlap leaves the phase undefined; it then drops out of det G.
        let phase = (g13 * (g12 * g23).conj()).arg();
        Self {
            r12: g12.norm_sqr().clamp(0.0, 1.0),
            r23: g23.norm_sqr().clamp(0.0, 1.0),
            r13: g13.norm_sqr().clamp(0.0, 1.0),
            phase: phase.rem_euclid(TAU),
        }
    }
}

fn check_prob(name: &str, r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("{name} = {r} outside [0, 1]")));
    }
    Ok(())
}

pub fn gram_det(t: &GramTriple) -> f64 {
    1.0 + 2.0 * (t.r12 * t.r23 * t.r13).sqrt() * t.phase.cos() - t.r12 - t.r23 - t.r13
}

/// Roots `(x−, x+)` of the realisability quadratic in `x = √r13`.
fn roots(r12: f64, r23: f64) -> (f64, f64) {
    let a = (r12 * r23).sqrt();
    let b = ((1.0 - r12) * (1.0 - r23)).sqrt();
    (a - b, a + b)
}

/// Smallest `r13` compatible with `r12, r23`: `x−²` when `r12 + r23 > 1`, else 0.
pub fn min_r13(r12: f64, r23: f64) -> Result<f64> {
    check_prob("r12", r12)?;
    check_prob("r23", r23)?;
    if r12 + r23 <= 1.0 {
        return Ok(0.0);
    }
    let (lo, _) = roots(r12, r23);
    Ok(lo.max(0.0).powi(2).min(1.0))
}

/// Largest `r13` compatible with `r12, r23`: `min(x+², 1)`.
pub fn max_r13(r12: f64, r23: f64) -> Result<f64> {
    check_prob("r12", r12)?;
    check_prob("r23", r23)?;
    let (_, hi) = roots(r12, r23);
    Ok(hi.powi(2).min(1.0))
}

/// Whether some phase makes `(r12, r23, r13)` the overlaps of three pure states.
pub fn feasible(r12: f64, r23: f64, r13: f64) -> Result<bool> {
    check_prob("r13", r13)?;
    let lo = min_r13(r12, r23)?;
    let hi = max_r13(r12, r23)?;
    Ok(r13 >= lo - DET_TOL && r13 <= hi + DET_TOL)
}

/// `max S = r12 + r23 − min_r13(r12, r23)` over realisable `r13`.
#[allow(non_snake_case)]
pub fn max_S_given(r12: f64, r23: f64) -> Result<f64> {
    Ok(r12 + r23 - min_r13(r12, r23)?)
}
