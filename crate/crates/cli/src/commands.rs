use fringecycle::bloch::overlap_matrix;
use fringecycle::fringe_lab::{run_experiment, ExperimentReport};
use fringecycle::gram::{feasible, gram_det, max_S_given, max_r13, min_r13, GramTriple};
use fringecycle::inequalities::{classical_bound, cycle_value, quantum_max, three_path_facets};
use fringecycle::optimizer::maximize_cycle;
use fringecycle::robustness::{eta_min, violation_after_noise, NoiseModel};
use fringecycle::{CycleReport, InterferometerSpec, OverlapMatrix};

use crate::config::{Command, RunConfig};
use crate::report::{Cell, Table};
use crate::CliError;

/// Exit status when a violation of the classical bound is found.
pub const EXIT_VIOLATION: u8 = 0;
/// Exit status when the classical bound holds.
pub const EXIT_NO_VIOLATION: u8 = 1;
/// Exit status for malformed input or usage.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Table,
    /// Raw fringe data, produced by `simulate`.
    pub scans: Option<Table>,
    pub exit_code: u8,
}

impl Outcome {
    fn ok(report: Table) -> Self {
        Self { report, scans: None, exit_code: 0 }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Bounds => bounds(cfg),
        Command::Table => table(cfg),
        Command::Certify => certify(cfg),
        Command::Simulate => simulate(cfg),
        Command::Gram => gram(cfg),
        Command::Optimize => optimize(cfg),
    }
}

fn n_of(cfg: &RunConfig) -> usize {
    cfg.n.expect("validated")
}

fn bounds(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = n_of(cfg);
    let noisy = violation_after_noise(n, cfg.eta)?;
    let mut t = Table::new(vec![
        "n",
        "classical_bound",
        "quantum_max",
        "eta_min",
        "eta",
        "noisy_s_max",
        "noisy_violates",
    ]);
    t.push(vec![
        n.into(),
        Cell::Int(n as i64 - 2),
        quantum_max(n)?.into(),
        eta_min(n)?.into(),
        cfg.eta.into(),
        noisy.noisy_s_max.into(),
        noisy.violates.into(),
    ]);
    Ok(Outcome::ok(t))
}

fn table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut t = Table::new(vec!["n", "classical_bound", "quantum_max", "eta_min"]).with_decimals(3);
    for n in 3..=cfg.n_max {
        t.push(vec![n.into(), Cell::Int(n as i64 - 2), quantum_max(n)?.into(), eta_min(n)?.into()]);
    }
    Ok(Outcome::ok(t))
}

/// Overlaps as seen through visibilities reduced by `eta`: `r_ij → η² r_ij`.
fn observed_overlaps(r: &OverlapMatrix, eta: f64) -> Result<OverlapMatrix, CliError> {
    let n = r.n();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(if i == j { 1.0 } else { eta * eta * r.get(i, j) });
        }
    }
    Ok(OverlapMatrix::new(n, data)?)
}

fn certify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let states = cfg.states.as_ref().expect("validated").states();
    let n = states.len();
    let ideal = overlap_matrix(&states)?;
    let r = observed_overlaps(&ideal, cfg.eta)?;
    let report = CycleReport::new(n, cycle_value(&r)?)?;

    let mut t = Table::new(vec!["quantity", "value", "holds"]);
    let mut row = |q: String, v: Cell, holds: Cell| t.push(vec![q.into(), v, holds]);
    row("n".into(), n.into(), Cell::Empty);
    row("eta".into(), cfg.eta.into(), Cell::Empty);
    for i in 0..n {
        for j in (i + 1)..n {
            row(format!("r_{}_{}", i + 1, j + 1), r.get(i, j).into(), Cell::Empty);
        }
    }
    row("S".into(), report.s_value.into(), Cell::Empty);
    row("classical_bound".into(), report.classical_bound.into(), Cell::Empty);
    row("quantum_max".into(), report.quantum_max.into(), Cell::Empty);
    row("margin".into(), report.margin.into(), Cell::Empty);
    if n == 3 {
        for f in three_path_facets(&r)? {
            row(format!("facet {}", f.label), f.lhs.into(), f.satisfied.into());
        }
        let (r12, r23, r13) = r.triple()?;
        row("gram_min_r13".into(), min_r13(r12, r23)?.into(), feasible(r12, r23, r13)?.into());
        if cfg.eta == 1.0 {
            let triple = GramTriple::from_states(&[states[0], states[1], states[2]]);
            row("gram_det".into(), gram_det(&triple).into(), Cell::Empty);
        }
    }
    row("violates_classical".into(), report.violates_classical.into(), Cell::Empty);

    let exit_code = if report.violates_classical { EXIT_VIOLATION } else { EXIT_NO_VIOLATION };
    Ok(Outcome { report: t, scans: None, exit_code })
}

fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let states = cfg.states.as_ref().expect("validated").states();
    let spec = InterferometerSpec::symmetric(states)?;
    let noise = NoiseModel::uniform(cfg.eta)?;
    let exp = run_experiment(&spec, &noise, cfg.shots, cfg.seed)?;
    Ok(Outcome { report: estimates_table(&exp), scans: Some(scans_table(&exp)), exit_code: 0 })
}

fn estimates_table(exp: &ExperimentReport) -> Table {
    let mut t = Table::new(vec!["label", "i", "j", "true_value", "estimate", "std_err"]);
    for p in &exp.pairs {
        t.push(vec![
            "V".into(),
            (p.i + 1).into(),
            (p.j + 1).into(),
            p.true_visibility.into(),
            p.estimate.v_hat.into(),
            p.estimate.std_err.into(),
        ]);
    }
    t.push(vec![
        "S".into(),
        Cell::Empty,
        Cell::Empty,
        exp.expected_s.into(),
        exp.report.s_value.into(),
        exp.s_std_err.into(),
    ]);
    t
}

fn scans_table(exp: &ExperimentReport) -> Table {
    let mut t = Table::new(vec!["i", "j", "phase", "counts", "shots_per_point"]);
    for (p, scan) in exp.pairs.iter().zip(&exp.scans) {
        for (&phase, &count) in scan.phases().iter().zip(scan.counts()) {
            t.push(vec![
                (p.i + 1).into(),
                (p.j + 1).into(),
                phase.into(),
                count.into(),
                scan.shots_per_point().into(),
            ]);
        }
    }
    t
}

fn gram(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (r12, r23, r13, triple) = match &cfg.states {
        Some(src) => {
            let s = src.states();
            let t = GramTriple::from_states(&[s[0], s[1], s[2]]);
            (t.r12, t.r23, Some(t.r13), Some(t))
        }
        None => (cfg.r12.expect("validated"), cfg.r23.expect("validated"), cfg.r13, None),
    };
    let mut t = Table::new(vec![
        "r12", "r23", "r13", "phase", "gram_det", "min_r13", "max_r13", "max_S", "feasible",
    ]);
    t.push(vec![
        r12.into(),
        r23.into(),
        r13.into(),
        triple.map(|g| g.phase).into(),
        triple.map(|g| gram_det(&g)).into(),
        min_r13(r12, r23)?.into(),
        max_r13(r12, r23)?.into(),
        max_S_given(r12, r23)?.into(),
        r13.map(|x| feasible(r12, r23, x)).transpose()?.into(),
    ]);
    Ok(Outcome::ok(t))
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(";")
}

fn optimize(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = n_of(cfg);
    let res = maximize_cycle(n, cfg.restarts, cfg.seed)?;
    let q = quantum_max(n)?;
    let canon = fringecycle::optimizer::canonicalize(&res.best);
    let mut t = Table::new(vec![
        "n",
        "s_value",
        "quantum_max",
        "abs_error",
        "matched_closed_form",
        "classical_bound",
        "plane_residual",
        "iterations",
        "best_restart",
        "restarts",
        "seed",
        "canonical_angles",
        "step_angles",
    ]);
    t.push(vec![
        n.into(),
        res.s_value.into(),
        q.into(),
        (res.s_value - q).abs().into(),
        res.matched_closed_form.into(),
        classical_bound(n)?.into(),
        res.plane_residual.into(),
        res.iterations.into(),
        res.best_restart.into(),
        cfg.restarts.into(),
        res.seed.into(),
        join(&res.canonical_angles).into(),
        join(&canon.step_angles).into(),
    ]);
    Ok(Outcome::ok(t))
}
