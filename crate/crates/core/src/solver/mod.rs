//! Time integration: the 3D pseudo-spectral solver for the perturbation
//! and the radial Crank–Nicolson engine.

pub mod radial;
pub mod spectral3d;

use crate::analytic::{oseen_gradient_constant, oseen_velocity};
use crate::decomposition::HELICAL_THRESHOLD;
use crate::diagnostics::record::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::spectral::helical::helical_defect;
use crate::spectral::ops::{l2_norm, max_divergence};
use crate::spectral::transform::inverse;

pub use radial::{growing_schedule, OuterBoundary, RadialEngine, RadialParity, Stencil};
pub use spectral3d::SpectralSolver;

/// Retries of a rejected step, halving `dt` each time.
pub const MAX_RETRIES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = cfl·min(dx, dy, dz)/max(|v| + |a u^LO|)`, capped at `dt_max`.
    Cfl { cfl: f64, dt_max: f64 },
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Cfl { cfl: 0.4, dt_max: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub t_end: f64,
    pub dt: DtPolicy,
    pub output_dt: f64,
    /// Background circulation.
    pub a: f64,
    /// Ladyzhenskaya constant used by the recorded `k⊥`, `K⊥`, `𝒦⊥`.
    pub c0: f64,
    /// Reject initial data whose helical defect exceeds the threshold.
    pub require_helical: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            t_end: 1.0,
            dt: DtPolicy::default(),
            output_dt: 0.1,
            a: 1.0,
            c0: 1.0,
            require_helical: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end = {} must be ≥ 0", self.t_end)));
        }
        if !(self.output_dt > 0.0) {
            return Err(Error::Config(format!("output_dt = {} must be > 0", self.output_dt)));
        }
        match self.dt {
            DtPolicy::Fixed(dt) if !(dt > 0.0) => {
                return Err(Error::Config(format!("fixed dt = {dt} must be > 0")))
            }
            DtPolicy::Cfl { cfl, dt_max } if !(cfl > 0.0 && cfl < 1.0 && dt_max > 0.0) => {
                return Err(Error::Config(format!(
                    "CFL number {cfl} must lie in (0, 1) and dt_max = {dt_max} be > 0"
                )))
            }
            _ => {}
        }
        if !self.a.is_finite() || !(self.c0 > 0.0) {
            return Err(Error::Config("a must be finite and c0 positive".into()));
        }
        Ok(())
    }
}

/// Perturbation `v` at time `t`; the full velocity is `v + a·u^LO(t)`.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub t: f64,
    pub v: SpectralField,
}

impl SimulationState {
    pub fn velocity(&self, a: f64) -> PhysicalField {
        let mut u = inverse(&self.v);
        if a != 0.0 {
            u.axpy(a, &oseen_velocity(self.t, self.v.grid()));
        }
        u
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    pub state: SimulationState,
    pub steps: usize,
    /// Set when the run stopped early; `records` hold everything up to it.
    pub failure: Option<Error>,
}

/// Checks the preconditions on initial data.
pub fn validate_initial(v0: &SpectralField, cfg: &SolverConfig) -> Result<()> {
    if v0.ncomp() != 3 {
        return Err(Error::Shape { expected: "3 components".into(), found: format!("{}", v0.ncomp()) });
    }
    let scale = l2_norm(v0) / v0.grid().volume().sqrt();
    let div = max_divergence(v0);
    if div > 1e-8 * scale.max(1e-300) && div > 1e-12 {
        return Err(Error::Precondition(format!("initial data is not solenoidal: max |div| = {div:.3e}")));
    }
    if cfg.require_helical {
        let d = helical_defect(v0);
        if d > HELICAL_THRESHOLD {
            return Err(Error::Precondition(format!(
                "initial data is not helical: defect {d:.3e} > {HELICAL_THRESHOLD:.0e}"
            )));
        }
    }
    Ok(())
}

/// Runs without an output hook.
pub fn run(v0: &SpectralField, cfg: &SolverConfig) -> Result<RunOutput> {
    run_with(v0, cfg, |_, _| Ok(()))
}

/// Advances `v0` from `t = 0` to `cfg.t_end`, calling `on_output` with the
/// record and state at every output time (including `t = 0`). Steps land
/// exactly on output times. Instabilities end the run early with
/// `failure` set; configuration and initial-data errors are returned.
pub fn run_with<F>(v0: &SpectralField, cfg: &SolverConfig, mut on_output: F) -> Result<RunOutput>
where
    F: FnMut(&DiagnosticsRecord, &SpectralField) -> Result<()>,
{
    cfg.validate()?;
    validate_initial(v0, cfg)?;
    let grid = *v0.grid();
    let mut solver = SpectralSolver::new(&grid, cfg.a);
    let growth = 2.0 * oseen_gradient_constant() * cfg.a.abs();
    let e0 = l2_norm(v0).powi(2).max(1e-300);

    let mut v = v0.clone();
    let mut t = 0.0;
    let mut records = vec![DiagnosticsRecord::compute(&v, t, cfg.a, cfg.c0, None)?];
    on_output(&records[0], &v)?;
    let mut steps = 0;
    let mut failure = None;

    let n_out = (cfg.t_end / cfg.output_dt - 1e-9).ceil().max(0.0) as usize;
    'outer: for k in 1..=n_out {
        let t_out = (k as f64 * cfg.output_dt).min(cfg.t_end);
        while t < t_out {
            let remaining = t_out - t;
            let mut dt = match cfg.dt {
                DtPolicy::Fixed(dt) => dt,
                DtPolicy::Cfl { cfl, dt_max } => solver.cfl_dt(&v, t, cfl)?.min(dt_max),
            };
            if dt >= remaining * (1.0 - 1e-9) {
                dt = remaining;
            } else if remaining < 2.0 * dt {
                // split the rest evenly instead of leaving a sliver
                dt = remaining / 2.0;
            }
            let mut attempts = 0;
            let next = loop {
                attempts += 1;
                match try_step(&mut solver, &v, t, dt, &cfg.dt) {
                    Ok(n) => break n,
                    Err(_) if attempts < MAX_RETRIES => dt /= 2.0,
                    Err(reason) => {
                        failure = Some(Error::StepFailure { t, attempts, reason });
                        break 'outer;
                    }
                }
            };
            v = next;
            t = if dt == remaining { t_out } else { t + dt };
            steps += 1;
            let e = l2_norm(&v).powi(2);
            let bound = 10.0 * e0 * (1.0 + t).powf(growth);
            if !e.is_finite() || e > bound {
                failure = Some(Error::Unstable {
                    t,
                    reason: format!("‖v‖² = {e:.3e} exceeds the energy bound {bound:.3e}"),
                });
                break 'outer;
            }
        }
        let rec = DiagnosticsRecord::compute(&v, t, cfg.a, cfg.c0, records.last())?;
        on_output(&rec, &v)?;
        records.push(rec);
    }
    Ok(RunOutput { records, state: SimulationState { t, v }, steps, failure })
}

/// One step plus the post-step CFL check; `Err` carries the reason for a
/// retry.
fn try_step(
    solver: &mut SpectralSolver,
    v: &SpectralField,
    t: f64,
    dt: f64,
    policy: &DtPolicy,
) -> std::result::Result<SpectralField, String> {
    let next = solver.step(v, t, dt).map_err(|e| e.to_string())?;
    if let DtPolicy::Cfl { cfl, .. } = *policy {
        // the advective limit must still hold at the end of the step
        let allowed = solver.cfl_dt(&next, t + dt, cfl).map_err(|e| e.to_string())?;
        if dt > 1.5 * allowed {
            return Err(format!("CFL violated after the step: dt = {dt:.3e} > 1.5 × {allowed:.3e}"));
        }
    }
    Ok(next)
}
