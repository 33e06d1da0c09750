//! Maximising the n-cycle value over pure-qubit configurations.
//!
//! In Bloch form, with `θ_i` the geodesic step angles along the chain and
//! `θ_1n` the closing angle,
//!
//! ```text
//! S_n = (n − 2)/2 + ½ [Σ cos θ_i − cos θ_1n].
//! ```
//!
//! On configurations with total turning `Θ = Σ θ_i ≤ π` the triangle
//! inequality `θ_1n ≤ Θ` and concavity of `cos` on `[0, π/2]` reduce the
//! problem to the single-variable function
//!
//! ```text
//! H(φ) = (n − 2)/2 + ½ [(n − 1) cos φ − cos((n − 1) φ)],   φ ∈ [0, π/(n − 1)],
//! ```
//!
//! maximised at `φ = π/n`. This module has both sides of that story: the
//! closed-form chain (`coplanar_h`, stationary points, boundary comparison)
//! and a numerical multi-start search that has to find the same optimum on
//! its own.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bloch::{dot3, geodesic_angle, PureQubit};
use crate::error::{Error, Result};
use crate::inequalities::{cycle_value_of_states, quantum_max};

/// `|S − S_max|` below which an optimiser run counts as having found the
/// closed-form optimum.
pub const CLOSED_FORM_TOL: f64 = 1e-6;

/// A labelled set of `n ≥ 3` pure states, in cycle order.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    states: Vec<PureQubit>,
}

impl Configuration {
    pub fn new(states: Vec<PureQubit>) -> Result<Self> {
        if states.len() < 3 {
            return Err(Error::Size(format!("configuration needs n >= 3, got {}", states.len())));
        }
        Ok(Self { states })
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[PureQubit] {
        &self.states
    }

    pub fn cycle_value(&self) -> f64 {
        cycle_value_of_states(&self.states).expect("n >= 3 by construction")
    }
}

/// Positions on the xz great circle, first at angle 0, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CoplanarConfig {
    angles: Vec<f64>,
}

impl CoplanarConfig {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 3 {
            return Err(Error::Size(format!("need n >= 3 angles, got {}", angles.len())));
        }
        if angles[0] != 0.0 {
            return Err(Error::Domain(format!("first angle must be 0, got {}", angles[0])));
        }
        if angles.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(format!("angles must be strictly increasing: {angles:?}")));
        }
        Ok(Self { angles })
    }

    /// Equal steps of `π/n`: the optimal configuration.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new((0..n).map(|k| k as f64 * PI / n as f64).collect())
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Step angles `θ_i` between consecutive positions.
    pub fn steps(&self) -> Vec<f64> {
        self.angles.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn to_configuration(&self) -> Configuration {
        Configuration {
            states: self.angles.iter().map(|&a| PureQubit::from_polar(a, 0.0)).collect(),
        }
    }
}

fn require_cycle(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Size(format!("cycle length must be at least 3, got {n}")));
    }
    Ok(())
}

/// `H(φ)` on `[0, π/(n − 1)]`.
pub fn coplanar_h(phi: f64, n: usize) -> Result<f64> {
    require_cycle(n)?;
    let end = PI / (n - 1) as f64;
    if !(-1e-12..=end + 1e-12).contains(&phi) {
        return Err(Error::Domain(format!("phi = {phi} outside [0, {end}]")));
    }
    Ok(h_unchecked(phi, n))
}

fn h_unchecked(phi: f64, n: usize) -> f64 {
    let m = (n - 1) as f64;
    0.5 * (n as f64 - 2.0) + 0.5 * (m * phi.cos() - (m * phi).cos())
}

/// `H'(φ) = (n − 1)/2 · [sin((n − 1)φ) − sin φ]`.
pub fn coplanar_h_derivative(phi: f64, n: usize) -> f64 {
    let m = (n - 1) as f64;
    0.5 * m * ((m * phi).sin() - phi.sin())
}

/// `H''(φ) = (n − 1)/2 · [(n − 1) cos((n − 1)φ) − cos φ]`.
pub fn coplanar_h_second_derivative(phi: f64, n: usize) -> f64 {
    let m = (n - 1) as f64;
    0.5 * m * (m * (m * phi).cos() - phi.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    LocalMin,
    LocalMax,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint {
    pub phi: f64,
    pub second_derivative: f64,
    pub kind: Extremum,
}

/// Zeros of `H'` on `[0, π/(n − 1)]`, found by a sign-change scan and
/// bisection, and classified by `H''`.
pub fn h_stationary_points(n: usize) -> Result<Vec<StationaryPoint>> {
    require_cycle(n)?;
    let end = PI / (n - 1) as f64;
    let dh = |phi: f64| coplanar_h_derivative(phi, n);
    let mut roots = Vec::new();
    if dh(0.0).abs() <= 1e-12 {
        roots.push(0.0);
    }
    const GRID: usize = 4096;
    let at = |k: usize| end * k as f64 / GRID as f64;
    for k in 1..GRID {
        let (a, b) = (at(k), at(k + 1));
        let (fa, fb) = (dh(a), dh(b));
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = dh(mid);
                if fm == 0.0 || hi - lo < 1e-16 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    if dh(end).abs() <= 1e-12 {
        roots.push(end);
    }
    Ok(roots
        .into_iter()
        .map(|phi| {
            let second_derivative = coplanar_h_second_derivative(phi, n);
            let kind = if second_derivative < 0.0 {
                Extremum::LocalMax
            } else if second_derivative > 0.0 {
                Extremum::LocalMin
            } else {
                Extremum::Degenerate
            };
            StationaryPoint { phi, second_derivative, kind }
        })
        .collect())
}

/// `g(x) = x cos(π/x)`.
pub fn g_fn(x: f64) -> f64 {
    x * (PI / x).cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryComparison {
    /// `H(π/n)`.
    pub h_interior: f64,
    /// `H(π/(n − 1))`, the right end of the domain.
    pub h_boundary: f64,
    /// `g(n) − g(n − 1)`.
    pub delta_g: f64,
}

impl BoundaryComparison {
    /// `H(π/n) − H(π/(n − 1))`, which equals `(Δg(n) − 1)/2`.
    pub fn advantage(&self) -> f64 {
        self.h_interior - self.h_boundary
    }
}

pub fn boundary_comparison(n: usize) -> Result<BoundaryComparison> {
    require_cycle(n)?;
    let nf = n as f64;
    Ok(BoundaryComparison {
        h_interior: h_unchecked(PI / nf, n),
        h_boundary: h_unchecked(PI / (nf - 1.0), n),
        delta_g: g_fn(nf) - g_fn(nf - 1.0),
    })
}

/// Settings for [`maximize_cycle_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct AscentOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Central finite-difference step.
    pub fd_step: f64,
    /// A restart stops after `patience` consecutive iterations with `|ΔS| < tol`.
    pub tol: f64,
    pub patience: usize,
    pub max_iters: usize,
    pub initial_step: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            restarts: 50,
            seed: 0,
            fd_step: 1e-6,
            tol: 1e-12,
            patience: 5,
            max_iters: 10_000,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best: Configuration,
    pub s_value: f64,
    /// In-plane angles of the canonical representative of `best`.
    pub canonical_angles: Vec<f64>,
    /// Largest distance of a Bloch vector from the fitted plane.
    pub plane_residual: f64,
    pub matched_closed_form: bool,
    /// Iterations taken by the winning restart.
    pub iterations: usize,
    /// Index of the winning restart.
    pub best_restart: usize,
    pub seed: u64,
}

/// Bloch vectors from gauge-fixed spherical parameters:
/// state 1 at +z, state 2 at polar angle `p[0]` in the xz-plane,
/// state k ≥ 3 at `(p[2k−5], p[2k−4])`.
fn decode(params: &[f64], n: usize) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(n);
    out.push([0.0, 0.0, 1.0]);
    let (s, c) = params[0].sin_cos();
    out.push([s, 0.0, c]);
    for k in 0..n - 2 {
        let (st, ct) = params[1 + 2 * k].sin_cos();
        let (sp, cp) = params[2 + 2 * k].sin_cos();
        out.push([st * cp, st * sp, ct]);
    }
    out
}

fn cycle_value_bloch(v: &[[f64; 3]]) -> f64 {
    let n = v.len();
    let chain: f64 = v.windows(2).map(|w| dot3(&w[0], &w[1])).sum();
    0.5 * (n as f64 - 2.0) + 0.5 * (chain - dot3(&v[0], &v[n - 1]))
}

fn objective(params: &[f64], n: usize) -> f64 {
    cycle_value_bloch(&decode(params, n))
}

/// Keeps state 2 on the `x ≥ 0` half of the xz great circle.
fn project(params: &mut [f64]) {
    params[0] = params[0].clamp(0.0, PI);
}

struct RunOutcome {
    params: Vec<f64>,
    s_value: f64,
    iterations: usize,
}

fn ascend(n: usize, start: Vec<f64>, opts: &AscentOptions) -> RunOutcome {
    let dim = start.len();
    let mut p = start;
    project(&mut p);
    let mut s = objective(&p, n);
    let mut step = opts.initial_step;
    let mut quiet = 0;
    let mut grad = vec![0.0; dim];
    let mut probe = p.clone();
    let mut cand = p.clone();
    let mut iterations = 0;

    while iterations < opts.max_iters {
        iterations += 1;
        for k in 0..dim {
            probe.copy_from_slice(&p);
            probe[k] = p[k] + opts.fd_step;
            let up = objective(&probe, n);
            probe[k] = p[k] - opts.fd_step;
            let down = objective(&probe, n);
            grad[k] = (up - down) / (2.0 * opts.fd_step);
        }
        // Gradient components pushing state 2 past the gauge boundary are dropped.
        if (p[0] <= 0.0 && grad[0] < 0.0) || (p[0] >= PI && grad[0] > 0.0) {
            grad[0] = 0.0;
        }
        if grad.iter().all(|g| *g == 0.0) {
            break;
        }

        let mut delta = 0.0;
        while step > 1e-20 {
            for k in 0..dim {
                cand[k] = p[k] + step * grad[k];
            }
            project(&mut cand);
            let sc = objective(&cand, n);
            if sc > s {
                delta = sc - s;
                s = sc;
                p.copy_from_slice(&cand);
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }

        if delta.abs() < opts.tol {
            quiet += 1;
            if quiet >= opts.patience {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    RunOutcome { params: p, s_value: s, iterations }
}

fn random_start(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p = Vec::with_capacity(2 * n - 3);
    p.push(rng.random_range(-1.0f64..=1.0).acos());
    for _ in 0..n - 2 {
        p.push(rng.random_range(-1.0f64..=1.0).acos());
        p.push(rng.random_range(0.0..TAU));
    }
    p
}

/// Multi-start ascent of `S_n` with `restarts` independent starting points.
pub fn maximize_cycle(n: usize, restarts: usize, seed: u64) -> Result<OptResult> {
    maximize_cycle_with(n, &AscentOptions { restarts, seed, ..AscentOptions::default() })
}

/// Restarts run in parallel; restart `k` draws its start from stream `k` of a
/// ChaCha8 generator seeded with `opts.seed`, and the best run is chosen by
/// `s_value` with ties going to the lower index, so the result does not
/// depend on scheduling.
pub fn maximize_cycle_with(n: usize, opts: &AscentOptions) -> Result<OptResult> {
    require_cycle(n)?;
    if opts.restarts == 0 {
        return Err(Error::Domain("need at least one restart".into()));
    }
    let runs: Vec<RunOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            ascend(n, random_start(n, &mut rng), opts)
        })
        .collect();
    let (best_restart, best) = runs
        .iter()
        .enumerate()
        .reduce(|a, b| if b.1.s_value > a.1.s_value { b } else { a })
        .expect("at least one restart");

    let states = decode(&best.params, n)
        .into_iter()
        .map(PureQubit::new)
        .collect::<Result<Vec<_>>>()?;
    let config = Configuration::new(states)?;
    let canon = canonicalize(&config);
    let qmax = quantum_max(n)?;
    Ok(OptResult {
        s_value: best.s_value,
        canonical_angles: canon.angles,
        plane_residual: canon.residual,
        matched_closed_form: (best.s_value - qmax).abs() <= CLOSED_FORM_TOL,
        iterations: best.iterations,
        best_restart,
        seed: opts.seed,
        best: config,
    })
}

/// Canonical representative of a configuration modulo rotations, reflections
/// and cyclic relabelings.
#[derive(Debug, Clone, PartialEq)]
pub struct Canonical {
    /// In-plane angles in `[0, 2π)`, the first one 0.
    pub angles: Vec<f64>,
    /// Consecutive differences of `angles`, each in `[0, 2π)`.
    pub step_angles: Vec<f64>,
    /// Largest out-of-plane component of any Bloch vector.
    pub residual: f64,
    /// Label that ended up first.
    pub start: usize,
    /// Whether the in-plane orientation was flipped.
    pub reflected: bool,
}

/// Entries closer than this compare equal. Optimised angles carry noise of
/// order √(convergence tolerance) ≈ 1e-6, which must not decide the order.
const LEX_TOL: f64 = 1e-4;

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > LEX_TOL {
            return x.partial_cmp(y).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if TAU - w < 1e-12 {
        0.0
    } else {
        w
    }
}

/// Fits the plane through the origin closest to all Bloch vectors (smallest
/// principal axis of `Σ v vᵀ`), reads off in-plane angles, and keeps the
/// reflection × cyclic-shift representative whose step-angle list is
/// lexicographically smallest.
pub fn canonicalize(c: &Configuration) -> Canonical {
    let vs: Vec<Vector3<f64>> = c.states.iter().map(|s| Vector3::from(s.bloch())).collect();
    let scatter = vs.iter().fold(Matrix3::zeros(), |m, v| m + v * v.transpose());
    let eig = SymmetricEigen::new(scatter);
    let imin = eig.eigenvalues.imin();
    let normal = eig.eigenvectors.column(imin).into_owned();
    let residual = vs.iter().map(|v| v.dot(&normal).abs()).fold(0.0, f64::max);

    let in_plane: Vec<Vector3<f64>> = vs.iter().map(|v| v - normal * v.dot(&normal)).collect();
    let e1 = in_plane
        .iter()
        .find(|p| p.norm() > 1e-9)
        .map(|p| p.normalize())
        .unwrap_or_else(|| {
            // every state lies along the normal; any in-plane axis will do
            let trial = if normal.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            (trial - normal * trial.dot(&normal)).normalize()
        });
    let e2 = normal.cross(&e1);
    let raw: Vec<f64> = in_plane.iter().map(|p| p.dot(&e2).atan2(p.dot(&e1))).collect();

    let n = raw.len();
    let mut best: Option<Canonical> = None;
    for reflected in [false, true] {
        let sign = if reflected { -1.0 } else { 1.0 };
        for start in 0..n {
            let angles: Vec<f64> = (0..n)
                .map(|j| wrap_angle(sign * (raw[(start + j) % n] - raw[start])))
                .collect();
            let step_angles: Vec<f64> = angles.windows(2).map(|w| wrap_angle(w[1] - w[0])).collect();
            let better = match &best {
                None => true,
                Some(b) => lex_cmp(&step_angles, &b.step_angles) == Ordering::Less,
            };
            if better {
                best = Some(Canonical { angles, step_angles, residual, start, reflected });
            }
        }
    }
    best.expect("n >= 3")
}

/// The intermediate inequalities behind the closed-form bound, evaluated on
/// one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    /// Geodesic step angles `θ_i` along the chain.
    pub step_angles: Vec<f64>,
    /// `Θ = Σ θ_i`.
    pub total_turn: f64,
    /// `θ_1n`.
    pub closing_angle: f64,
    pub s_value: f64,
    /// `θ_1n ≤ Θ`, checked when `Θ ≤ π`.
    pub triangle_holds: Option<bool>,
    /// `Σ cos θ_i ≤ (n − 1) cos(Θ/(n − 1))`, checked when every `θ_i ≤ π/2`.
    pub jensen_holds: Option<bool>,
    /// `(n − 2)/2 + ½[Σ cos θ_i − cos Θ]`, valid when `Θ ≤ π`.
    pub step_bound: Option<f64>,
    /// `H(Θ/(n − 1))`, valid when `Θ ≤ π` and every `θ_i ≤ π/2`.
    pub h_bound: Option<f64>,
    pub quantum_max: f64,
}

const CHAIN_TOL: f64 = 1e-10;

impl ChainReport {
    /// `Θ − θ_1n`; zero when the triangle inequality is saturated.
    pub fn triangle_gap(&self) -> f64 {
        self.total_turn - self.closing_angle
    }

    /// `(n − 1) cos(Θ/(n − 1)) − Σ cos θ_i`; zero at equal steps.
    pub fn jensen_gap(&self) -> f64 {
        let m = self.step_angles.len() as f64;
        m * (self.total_turn / m).cos() - self.step_angles.iter().map(|t| t.cos()).sum::<f64>()
    }

    /// Every applicable link of `S_n ≤ step_bound ≤ H(Θ/(n−1)) ≤ S_max` holds.
    pub fn chain_holds(&self) -> bool {
        let mut ok = self.triangle_holds.unwrap_or(true) && self.jensen_holds.unwrap_or(true);
        ok &= self.s_value <= self.quantum_max + CHAIN_TOL;
        if let Some(b) = self.step_bound {
            ok &= self.s_value <= b + CHAIN_TOL;
            if let Some(h) = self.h_bound {
                ok &= b <= h + CHAIN_TOL && h <= self.quantum_max + CHAIN_TOL;
            }
        }
        ok
    }
}

pub fn verify_step_bound_chain(c: &Configuration) -> ChainReport {
    let n = c.n();
    let st = c.states();
    let step_angles: Vec<f64> = st
        .windows(2)
        .map(|w| geodesic_angle(&w[0], &w[1]).expect("validated states"))
        .collect();
    let total_turn: f64 = step_angles.iter().sum();
    let closing_angle = geodesic_angle(&st[0], &st[n - 1]).expect("validated states");
    let cos_sum: f64 = step_angles.iter().map(|t| t.cos()).sum();
    let m = (n - 1) as f64;
    let half_plane = total_turn <= PI;
    let acute = step_angles.iter().all(|&t| t <= FRAC_PI_2);

    let step_bound = half_plane.then(|| 0.5 * (n as f64 - 2.0) + 0.5 * (cos_sum - total_turn.cos()));
    ChainReport {
        triangle_holds: half_plane.then_some(closing_angle <= total_turn + CHAIN_TOL),
        jensen_holds: acute.then(|| cos_sum <= m * (total_turn / m).cos() + CHAIN_TOL),
        h_bound: (half_plane && acute).then(|| h_unchecked(total_turn / m, n)),
        step_bound,
        s_value: c.cycle_value(),
        quantum_max: quantum_max(n).expect("n >= 3"),
        step_angles,
        total_turn,
        closing_angle,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn h_examples() {
        for n in 3..10 {
            assert!((coplanar_h(0.0, n).unwrap() - (n as f64 - 2.0)).abs() < 1e-12);
        }
        assert!((coplanar_h(PI / 3.0, 3).unwrap() - 1.25).abs() < 1e-12);
        assert!((coplanar_h(PI / 4.0, 4).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!(matches!(coplanar_h(1.2, 4), Err(Error::Domain(_))));
        assert!(matches!(coplanar_h(-0.1, 4), Err(Error::Domain(_))));
        assert!(coplanar_h(0.1, 2).is_err());
    }

    #[test]
    fn h_matches_cycle_value_of_equal_steps() {
        for n in 3..9 {
            for k in 0..=10 {
                let phi = PI / (n - 1) as f64 * k as f64 / 10.0;
                let states: Vec<_> = (0..n).map(|i| PureQubit::from_polar(i as f64 * phi, 0.0)).collect();
                let s = cycle_value_of_states(&states).unwrap();
                assert!((coplanar_h(phi, n).unwrap() - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for n in [3, 5, 8] {
            for phi in [0.05, 0.2, 0.4] {
                let fd1 = (h_unchecked(phi + h, n) - h_unchecked(phi - h, n)) / (2.0 * h);
                assert!((fd1 - coplanar_h_derivative(phi, n)).abs() < 1e-8);
                let fd2 = (h_unchecked(phi + h, n) - 2.0 * h_unchecked(phi, n) + h_unchecked(phi - h, n)) / (h * h);
                assert!((fd2 - coplanar_h_second_derivative(phi, n)).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn stationary_point_examples() {
        let pts = h_stationary_points(3).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].phi, 0.0);
        assert_eq!(pts[0].kind, Extremum::LocalMin);
        assert!((pts[1].phi - PI / 3.0).abs() < 1e-12);
        assert!((pts[1].second_derivative + 1.5).abs() < 1e-12);
        assert_eq!(pts[1].kind, Extremum::LocalMax);

        let pts = h_stationary_points(4).unwrap();
        assert!((pts[0].second_derivative - 3.0).abs() < 1e-12);
        assert!((pts[1].phi - PI / 4.0).abs() < 1e-12);

        for n in 3..40 {
            let pts = h_stationary_points(n).unwrap();
            assert_eq!(pts.len(), 2, "n = {n}");
            let nf = n as f64;
            assert!((pts[1].phi - PI / nf).abs() < 1e-12);
            let want = -nf * (nf - 1.0) * (PI / nf).cos() / 2.0;
            assert!((pts[1].second_derivative - want).abs() < 1e-9);
            assert!((pts[0].second_derivative - (nf - 1.0) * (nf - 2.0) / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_examples() {
        let b = boundary_comparison(3).unwrap();
        assert!((b.delta_g - 1.5).abs() < 1e-15);
        let b = boundary_comparison(4).unwrap();
        assert!((b.delta_g - (2.0 * 2f64.sqrt() - 1.5)).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for n in 3..=100 {
            let b = boundary_comparison(n).unwrap();
            assert!(b.delta_g > 1.0 && b.delta_g < prev);
            assert!((b.advantage() - 0.5 * (b.delta_g - 1.0)).abs() < 1e-12);
            prev = b.delta_g;
        }
        assert!(prev - 1.0 < 1e-3);
    }

    #[test]
    fn h_at_pi_over_n_is_quantum_max() {
        for n in 3..=1000 {
            let h = coplanar_h(PI / n as f64, n).unwrap();
            assert!((h - quantum_max(n).unwrap()).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn coplanar_config_validation() {
        assert!(CoplanarConfig::new(vec![0.0, 0.5, 0.4]).is_err());
        assert!(CoplanarConfig::new(vec![0.1, 0.5, 0.9]).is_err());
        assert!(CoplanarConfig::new(vec![0.0, 0.5]).is_err());
        let u = CoplanarConfig::uniform(5).unwrap();
        assert!(u.steps().iter().all(|s| (s - PI / 5.0).abs() < 1e-15));
        let s = u.to_configuration().cycle_value();
        assert!((s - quantum_max(5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn optimizer_reaches_closed_form_for_small_n() {
        let r = maximize_cycle(3, 50, 1).unwrap();
        assert!((r.s_value - 1.25).abs() < 1e-6);
        assert!(r.matched_closed_form);
        let r = maximize_cycle(5, 50, 1).unwrap();
        assert!((r.s_value - (17.0 + 5.0 * 5f64.sqrt()) / 8.0).abs() < 1e-6);
        assert!(r.s_value <= quantum_max(5).unwrap() + 1e-9);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let a = maximize_cycle(4, 8, 42).unwrap();
        let b = maximize_cycle(4, 8, 42).unwrap();
        assert_eq!(a.s_value.to_bits(), b.s_value.to_bits());
        assert_eq!(a.best, b.best);
        assert!(maximize_cycle(2, 5, 0).is_err());
        assert!(maximize_cycle(4, 0, 0).is_err());
    }

    #[test]
    fn single_restart_flag_is_consistent() {
        let q = quantum_max(4).unwrap();
        for seed in 0..20 {
            let r = maximize_cycle(4, 1, seed).unwrap();
            assert_eq!(r.matched_closed_form, (r.s_value - q).abs() <= CLOSED_FORM_TOL);
            assert!(r.s_value <= q + 1e-9);
        }
    }

    fn rotate(v: [f64; 3], axis: Vector3<f64>, angle: f64) -> [f64; 3] {
        let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        let r = rot * Vector3::from(v);
        [r.x, r.y, r.z]
    }

    #[test]
    fn canonical_form_of_optimum() {
        let c = Configuration::new(presets::uniform_cycle(4)).unwrap();
        let canon = canonicalize(&c);
        assert!(canon.residual < 1e-8);
        for s in &canon.step_angles {
            assert!((s - PI / 4.0).abs() < 1e-12);
        }

        // rotated, reflected and relabelled copies
        let axis = Vector3::new(0.3, -1.0, 0.7);
        let rotated: Vec<_> = c
            .states()
            .iter()
            .map(|s| PureQubit::new(rotate(s.bloch(), axis, 1.1)).unwrap())
            .collect();
        let mirrored: Vec<_> = rotated
            .iter()
            .map(|s| {
                let [x, y, z] = s.bloch();
                PureQubit::new([-x, y, z]).unwrap()
            })
            .collect();
        let mut shifted = mirrored.clone();
        shifted.rotate_left(2);
        for copy in [rotated, mirrored, shifted] {
            let other = canonicalize(&Configuration::new(copy).unwrap());
            assert!(other.residual < 1e-8);
            for (a, b) in other.angles.iter().zip(&canon.angles) {
                assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", other.angles, canon.angles);
            }
        }
    }

    #[test]
    fn canonical_residual_reports_non_coplanar_input() {
        let c = Configuration::new(vec![
            PureQubit::new([1.0, 0.0, 0.0]).unwrap(),
            PureQubit::new([0.0, 1.0, 0.0]).unwrap(),
            PureQubit::new([0.0, 0.0, 1.0]).unwrap(),
        ])
        .unwrap();
        assert!(canonicalize(&c).residual > 0.5);

        let same = Configuration::new(vec![PureQubit::zero(); 3]).unwrap();
        let canon = canonicalize(&same);
        assert!(canon.angles.iter().all(|a| a.abs() < 1e-12));
    }

    #[test]
    fn chain_examples() {
        let c = Configuration::new(presets::uniform_cycle(4)).unwrap();
        let rep = verify_step_bound_chain(&c);
        assert!((rep.closing_angle - 3.0 * PI / 4.0).abs() < 1e-12);
        assert!((rep.total_turn - 3.0 * PI / 4.0).abs() < 1e-12);
        assert!(rep.triangle_gap().abs() < 1e-12 && rep.jensen_gap().abs() < 1e-12);
        assert_eq!(rep.triangle_holds, Some(true));
        assert_eq!(rep.jensen_holds, Some(true));
        assert!((rep.h_bound.unwrap() - rep.quantum_max).abs() < 1e-12);
        assert!(rep.chain_holds());

        let same = Configuration::new(vec![PureQubit::from_polar(0.3, 0.3); 5]).unwrap();
        let rep = verify_step_bound_chain(&same);
        assert!(rep.total_turn.abs() < 1e-7 && rep.closing_angle.abs() < 1e-7);
        assert!(rep.chain_holds());
    }

    #[test]
    fn chain_holds_on_random_half_plane_configurations() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 2000 {
            let n = rng.random_range(3..=7);
            let states: Vec<_> = (0..n)
                .map(|_| {
                    PureQubit::from_polar(rng.random_range(0.0..0.6), rng.random_range(0.0..TAU))
                })
                .collect();
            let rep = verify_step_bound_chain(&Configuration::new(states).unwrap());
            if rep.total_turn <= PI {
                assert_eq!(rep.triangle_holds, Some(true));
                assert!(rep.chain_holds(), "{rep:?}");
                checked += 1;
            }
        }
    }
}
