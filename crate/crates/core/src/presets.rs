//! Named experiments, one per verification criterion, plus the
//! config-driven `simulate` pipeline.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use crate::analytic::{
    oseen_u_theta, oseen_velocity, oseen_vorticity, oseen_w, random_helical_perturbation, shear_flow,
    PerturbationSpec,
};
use crate::decomposition::{circulation_a, circulation_radial, decompose};
use crate::diagnostics::fit::{decay_fit, log_energy_check, perp_decay_fit, trend, FitModel};
use crate::diagnostics::inequalities::{
    ladyzhenskaya_constant, ladyzhenskaya_ratio, oseen_difference_check, oseen_difference_exact,
    poincare_ratio,
};
use crate::diagnostics::rate::{rate_study, RateData, RateStudyConfig};
use crate::diagnostics::record::DiagnosticsRecord;
use crate::error::Result;
use crate::field::{PhysicalField, SpectralField};
use crate::grid::GridSpec;
use crate::io::config::{ExperimentConfig, InitialKind};
use crate::io::csv::{records_to_string, CsvSink};
use crate::io::report::PresetReport;
use crate::io::snapshot::Snapshot;
use crate::radial::RadialProfile;
use crate::solver::radial::{OuterBoundary, RadialEngine, RadialParity, Stencil};
use crate::solver::{run, run_with, DtPolicy, RunOutput, SolverConfig};
use crate::spectral::ops::{curl, h1_norm, l2_norm, perp_part};
use crate::spectral::transform::{forward, inverse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    OracleShear,
    OseenInvariance,
    RadialConvergence,
    Poincare,
    Ladyzhenskaya,
    Decomposition,
    TheoremTrend,
    PerpDecay,
    RateStudy,
    Lemma2,
    Structural,
}

impl Preset {
    pub const ALL: [Preset; 11] = [
        Preset::OracleShear,
        Preset::OseenInvariance,
        Preset::RadialConvergence,
        Preset::Poincare,
        Preset::Ladyzhenskaya,
        Preset::Decomposition,
        Preset::TheoremTrend,
        Preset::PerpDecay,
        Preset::RateStudy,
        Preset::Lemma2,
        Preset::Structural,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::OracleShear => "oracle-shear",
            Preset::OseenInvariance => "oseen-invariance",
            Preset::RadialConvergence => "radial-convergence",
            Preset::Poincare => "poincare",
            Preset::Ladyzhenskaya => "ladyzhenskaya",
            Preset::Decomposition => "decomposition",
            Preset::TheoremTrend => "theorem-trend",
            Preset::PerpDecay => "perp-decay",
            Preset::RateStudy => "rate-study",
            Preset::Lemma2 => "lemma2",
            Preset::Structural => "structural",
        }
    }

    /// Position in the verification table (1-based).
    pub fn criterion(self) -> u32 {
        Preset::ALL.iter().position(|&p| p == self).unwrap() as u32 + 1
    }

    pub fn parse(s: &str) -> Option<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn names() -> Vec<&'static str> {
        Preset::ALL.iter().map(|p| p.name()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetOptions {
    /// First seed of every seeded sweep.
    pub seed: u64,
    /// Directory for CSV and report artifacts; nothing is written if unset.
    pub out: Option<PathBuf>,
    /// Sweep size for the inequality suites.
    pub seed_count: usize,
    /// Weight exponents for the rate study.
    pub m_list: Vec<f64>,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions { seed: 1, out: None, seed_count: 100, m_list: vec![1.5, 1.2] }
    }
}

impl PresetOptions {
    fn save(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(dir) = &self.out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }

    fn save_records(&self, name: &str, records: &[DiagnosticsRecord]) -> Result<()> {
        if self.out.is_some() {
            self.save(name, &records_to_string(records)?)?;
        }
        Ok(())
    }
}

pub fn run_preset(p: Preset, opts: &PresetOptions) -> Result<PresetReport> {
    let report = match p {
        Preset::OracleShear => oracle_shear(opts),
        Preset::OseenInvariance => oseen_invariance(opts),
        Preset::RadialConvergence => radial_convergence(opts),
        Preset::Poincare => poincare_suite(opts),
        Preset::Ladyzhenskaya => ladyzhenskaya_suite(opts),
        Preset::Decomposition => decomposition_round_trip(opts),
        Preset::TheoremTrend => theorem_trend(opts),
        Preset::PerpDecay => perp_decay(opts),
        Preset::RateStudy => rate_study_preset(opts),
        Preset::Lemma2 => lemma2(opts),
        Preset::Structural => structural(opts),
    }?;
    opts.save(&format!("{}.json", p.name()), &report.to_json())?;
    Ok(report)
}

/// Divergence and orthogonal-splitting checks applied to every solver run.
fn structural_checks(r: &mut PresetReport, records: &[DiagnosticsRecord]) {
    let div = records.iter().map(|x| x.max_div).fold(0.0, f64::max);
    r.check("divergence", div < 1e-10, format!("max |div v| = {div:.3e} (< 1e-10)"));
    let py = records.iter().map(|x| x.pythagoras_defect).fold(0.0, f64::max);
    r.check("pythagoras", py < 1e-12, format!("max relative split defect {py:.3e} (< 1e-12)"));
}

fn run_checked(r: &mut PresetReport, out: &RunOutput) {
    let detail = match &out.failure {
        None => format!("{} steps to t = {}", out.steps, out.state.t),
        Some(e) => e.to_string(),
    };
    r.check("run-completed", out.failure.is_none(), detail);
}

pub fn oracle_shear(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::OracleShear.name(), 1);
    let g = GridSpec::new(64, 40.0, 1.0)?;
    let v0 = forward(&shear_flow(0.0, &g).0);
    let cfg = SolverConfig {
        t_end: 1.0,
        dt: DtPolicy::Cfl { cfl: 0.4, dt_max: 0.05 },
        output_dt: 0.1,
        a: 0.0,
        c0: 1.0,
        require_helical: true,
    };
    let out = run(&v0, &cfg)?;
    run_checked(&mut r, &out);
    let exact = forward(&shear_flow(out.state.t, &g).0);
    let err = l2_norm(&out.state.v.sub(&exact)) / l2_norm(&exact);
    r.value("relative_l2_error", err);
    r.check("shear-oracle", err < 1e-6, format!("relative L² error at t = 1: {err:.3e} (< 1e-6)"));
    structural_checks(&mut r, &out.records);
    opts.save_records("oracle-shear.csv", &out.records)?;
    Ok(r)
}

pub fn oseen_invariance(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::OseenInvariance.name(), 2);
    let g = GridSpec::new(32, 32.0, 1.0)?;
    let cfg = SolverConfig { t_end: 2.0, output_dt: 0.1, a: 1.0, ..Default::default() };
    let out = run(&SpectralField::zeros(&g, 3), &cfg)?;
    run_checked(&mut r, &out);
    let worst = out
        .records
        .iter()
        .flat_map(|x| {
            [x.l2_v, x.l2_grad_v, x.l2_uperp, x.l2_grad_uperp, x.l2_lap_uperp, x.l2_nbar]
        })
        .fold(0.0, f64::max);
    r.value("max_perturbation_norm", worst);
    r.check(
        "perturbation-norms",
        worst < 1e-10 && out.records.len() == 21,
        format!("max over {} records: {worst:.3e} (< 1e-10)", out.records.len()),
    );
    let u = out.state.velocity(1.0);
    let gap = u.sub(&oseen_velocity(out.state.t, &g)).max_abs();
    r.check("full-velocity", gap < 1e-10, format!("max |u − u^LO(2)| = {gap:.3e}"));
    structural_checks(&mut r, &out.records);
    opts.save_records("oseen-invariance.csv", &out.records)?;
    Ok(r)
}

/// Heat-flow errors of the radial engine for `e^{−r²/4}/(4π)` at `t = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialConvergence {
    pub n: Vec<usize>,
    /// Max error vs. the closed form, three-point stencil with `dt = dr/4`.
    pub errors_second: Vec<f64>,
    /// Observed order from successive self-differences.
    pub self_order: f64,
    /// Max error of the five-point stencil on the finest grid.
    pub error_fourth: f64,
}

pub fn radial_convergence_study(r_max: f64, t_end: f64, levels: &[usize]) -> Result<RadialConvergence> {
    let solve = |n: usize, stencil: Stencil, dt: f64| -> Result<RadialProfile> {
        let grid = RadialProfile::uniform_grid(n, r_max);
        let h0 = RadialProfile::from_fn(grid.clone(), |r| oseen_w(r, 0.0))?;
        let e = RadialEngine::new(&grid, RadialParity::Even, OuterBoundary::Decay { tol: 1e-10 })?
            .with_stencil(stencil);
        e.evolve(&h0, t_end, dt, None)
    };
    let err = |h: &RadialProfile| {
        h.r()
            .iter()
            .zip(h.values())
            .fold(0.0f64, |m, (r, v)| m.max((v - oseen_w(*r, t_end)).abs()))
    };
    let mut sols = Vec::new();
    let mut errors_second = Vec::new();
    for &n in levels {
        let h = solve(n, Stencil::Second, r_max / n as f64 / 4.0)?;
        errors_second.push(err(&h));
        sols.push(h);
    }
    // self-differences on the coarse nodes of each pair
    let diff = |c: &RadialProfile, f: &RadialProfile| {
        c.values()
            .iter()
            .enumerate()
            .fold(0.0f64, |m, (i, v)| m.max((v - f.values()[2 * i]).abs()))
    };
    let k = sols.len();
    let self_order = if k >= 3 {
        (diff(&sols[k - 3], &sols[k - 2]) / diff(&sols[k - 2], &sols[k - 1])).log2()
    } else {
        f64::NAN
    };
    let finest = *levels.last().unwrap();
    let dt4 = (r_max / finest as f64 / 4.0).min(2.5e-4);
    let error_fourth = err(&solve(finest, Stencil::Fourth, dt4)?);
    Ok(RadialConvergence { n: levels.to_vec(), errors_second, self_order, error_fourth })
}

pub fn radial_convergence(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::RadialConvergence.name(), 3);
    let s = radial_convergence_study(40.0, 1.0, &[256, 512, 1024, 2048])?;
    r.value("self_convergence_order", s.self_order);
    r.value("error_fourth_order_finest", s.error_fourth);
    for (n, e) in s.n.iter().zip(&s.errors_second) {
        r.value(&format!("error_second_order_n{n}"), *e);
    }
    r.check(
        "self-convergence-order",
        (s.self_order - 2.0).abs() < 0.2,
        format!("observed order {:.3} (2 ± 0.2)", s.self_order),
    );
    r.check(
        "closed-form-error",
        s.error_fourth < 1e-8,
        format!("max error at dr = R/2048: {:.3e} (< 1e-8)", s.error_fourth),
    );
    let mut csv = String::from("n,dr,max_error_second\n");
    for (n, e) in s.n.iter().zip(&s.errors_second) {
        csv.push_str(&format!("{n},{:.16e},{e:.16e}\n", 40.0 / *n as f64));
    }
    opts.save("radial-convergence.csv", &csv)?;
    Ok(r)
}

/// Fields in the inequality sweeps carry at most three vertical
/// harmonics, so a short vertical axis represents them exactly.
pub fn sweep_grid() -> Result<GridSpec> {
    GridSpec::with_shape(64, 64, 16, 16.0, 1.0)
}

fn sweep_spec(seed: u64, modes: Vec<u32>, sigma_max: f64) -> PerturbationSpec {
    // widths cycle through [0.75, 1]·sigma_max
    let sigma = sigma_max * (0.75 + 0.05 * (seed % 6) as f64);
    PerturbationSpec { seed, amplitude: 1.0, modes, sigma }
}

/// Poincaré ratios of `count` seeded zero-vertical-mean helical fields.
pub fn poincare_sweep(seed0: u64, count: usize, grid: &GridSpec) -> Result<Vec<f64>> {
    (0..count as u64)
        .map(|i| {
            let spec = sweep_spec(seed0 + i, vec![1, 2, 3], grid.lx / 16.0);
            let v = perp_part(&random_helical_perturbation(&spec, grid)?);
            poincare_ratio(&v)
        })
        .collect()
}

pub fn poincare_suite(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::Poincare.name(), 4);
    let g = sweep_grid()?;
    let pitch = g.pitch;
    let ratios = poincare_sweep(opts.seed, opts.seed_count, &g)?;
    let max = ratios.iter().copied().fold(0.0, f64::max);
    r.value("max_ratio", max);
    r.check(
        "sweep-bound",
        ratios.len() == opts.seed_count && max <= pitch * (1.0 + 1e-10),
        format!("max ratio over {} fields: {max:.12} (≤ L = {pitch})", ratios.len()),
    );
    let mode = forward(&PhysicalField::vector_from_fn(&g, |p| [(p[2] / pitch).sin(), 0.0, 0.0]));
    let eq = poincare_ratio(&mode)?;
    r.value("lowest_mode_ratio", eq);
    r.check(
        "equality-case",
        (eq - pitch).abs() <= 1e-10 * pitch,
        format!("k_z = ±1 mode ratio {eq:.15} (= L to 1e-10)"),
    );
    let csv: String = std::iter::once("seed,ratio\n".to_string())
        .chain(ratios.iter().enumerate().map(|(i, x)| format!("{},{x:.16e}\n", opts.seed + i as u64)))
        .collect();
    opts.save("poincare.csv", &csv)?;
    Ok(r)
}

/// Ladyzhenskaya ratios of `count` seeded helical fields.
pub fn ladyzhenskaya_sweep(seed0: u64, count: usize, grid: &GridSpec) -> Result<Vec<f64>> {
    (0..count as u64)
        .map(|i| {
            let spec = sweep_spec(seed0 + i, vec![0, 1, 2], grid.lx / 16.0);
            ladyzhenskaya_ratio(&random_helical_perturbation(&spec, grid)?)
        })
        .collect()
}

pub fn ladyzhenskaya_suite(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::Ladyzhenskaya.name(), 5);
    let g = sweep_grid()?;
    let ratios = ladyzhenskaya_sweep(opts.seed, opts.seed_count, &g)?;
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let finite = ratios.iter().all(|x| x.is_finite() && *x > 0.0);
    let c0 = ladyzhenskaya_constant(max, g.pitch);
    r.value("max_ratio", max);
    r.value("c0", c0);
    r.check(
        "ratios-finite",
        finite && ratios.len() == opts.seed_count,
        format!("{} ratios, max {max:.6}, fitted C₀ = L·max⁴ = {c0:.6}", ratios.len()),
    );
    // Same profiles with box, envelope and pitch all dilated by 2.
    let g2 = g.dilated(2.0);
    let ratios2 = ladyzhenskaya_sweep(opts.seed, opts.seed_count, &g2)?;
    let c0_2 = ladyzhenskaya_constant(ratios2.iter().copied().fold(0.0, f64::max), g2.pitch);
    let rel = (c0_2 - c0).abs() / c0;
    r.value("c0_doubled_pitch", c0_2);
    r.check(
        "pitch-doubling",
        rel <= 0.1,
        format!("C₀ = {c0:.6} at L = {}, {c0_2:.6} at L = {}: relative change {rel:.2e} (≤ 10%)", g.pitch, g2.pitch),
    );
    let csv: String = std::iter::once("seed,ratio,ratio_doubled\n".to_string())
        .chain(
            ratios
                .iter()
                .zip(&ratios2)
                .enumerate()
                .map(|(i, (a, b))| format!("{},{a:.16e},{b:.16e}\n", opts.seed + i as u64)),
        )
        .collect();
    opts.save("ladyzhenskaya.csv", &csv)?;
    Ok(r)
}

pub fn decomposition_round_trip(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::Decomposition.name(), 6);
    let g = GridSpec::new(48, 24.0, 1.0)?;
    let spec = PerturbationSpec { seed: opts.seed, amplitude: 0.5, modes: vec![0, 1, 2], sigma: 1.5 };
    let v = random_helical_perturbation(&spec, &g)?;
    let curl_v = inverse(&curl(&v));
    let mut text = String::new();
    for a in [-2.0, 0.5, 1.0] {
        let mut omega = curl_v.clone();
        omega.axpy(a, &oseen_vorticity(0.0, &g));
        let d = decompose(&omega, 1.5)?;
        let ea = (d.a - a).abs();
        let ev = h1_norm(&d.v.sub(&v));
        r.value(&format!("a_error[{a}]"), ea);
        r.value(&format!("v_h1_error[{a}]"), ev);
        r.check(
            &format!("round-trip a = {a}"),
            ea < 1e-10 && ev < 1e-8,
            format!("|Δa| = {ea:.3e} (< 1e-10), ‖Δv‖_H¹ = {ev:.3e} (< 1e-8)"),
        );
        text.push_str(&format!("# a = {a}\n{}", d.to_report()));
    }
    let (_, shear_vort) = shear_flow(0.0, &g);
    let a_grid = circulation_a(&shear_vort);
    let prof = RadialProfile::from_fn(RadialProfile::uniform_grid(4000, 40.0), |_| 0.0)?;
    let a_radial = circulation_radial(&prof);
    r.value("shear_circulation", a_grid);
    r.check(
        "shear-circulation",
        a_grid.abs() < 1e-14 && a_radial == 0.0,
        format!("grid circulation {a_grid:.3e}, radial {a_radial:.3e}"),
    );
    opts.save("decomposition.txt", &text)?;
    Ok(r)
}

/// Parameters of the shared perturbed-Oseen run.
pub fn perturbed_oseen_setup(seed: u64) -> Result<(SpectralField, SolverConfig)> {
    let g = GridSpec::new(64, 32.0, 1.0)?;
    let spec = PerturbationSpec { seed, amplitude: 0.1, modes: vec![0, 1, 2], sigma: 2.0 };
    let v0 = random_helical_perturbation(&spec, &g)?;
    let cfg = SolverConfig {
        t_end: 8.0,
        dt: DtPolicy::Cfl { cfl: 0.4, dt_max: 0.05 },
        output_dt: 0.1,
        a: 1.0,
        c0: 1.0,
        require_helical: true,
    };
    Ok((v0, cfg))
}

type SharedRun = Arc<(Vec<DiagnosticsRecord>, Option<String>)>;

/// The perturbed-Oseen run is shared by two presets; computed once per seed.
pub fn perturbed_oseen_run(seed: u64) -> Result<SharedRun> {
    static CACHE: OnceLock<Mutex<HashMap<u64, SharedRun>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(r) = guard.get(&seed) {
        return Ok(r.clone());
    }
    let (v0, cfg) = perturbed_oseen_setup(seed)?;
    let out = run(&v0, &cfg)?;
    let shared = Arc::new((out.records, out.failure.map(|e| e.to_string())));
    guard.insert(seed, shared.clone());
    Ok(shared)
}

pub fn theorem_trend(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::TheoremTrend.name(), 7);
    let run = perturbed_oseen_run(opts.seed)?;
    let (records, failure) = (&run.0, &run.1);
    r.check("run-completed", failure.is_none(), failure.clone().unwrap_or_else(|| "t = 8 reached".into()));
    let t: Vec<f64> = records.iter().map(|x| x.t).collect();
    let l2: Vec<f64> = records.iter().map(|x| x.l2_v).collect();
    let sg: Vec<f64> = records.iter().map(|x| x.sqrt_t_l2_grad_v).collect();
    let t1 = trend(&t, &l2)?;
    let t2 = trend(&t, &sg)?;
    r.value("transient_l2_v", t1.transient);
    r.value("transient_sqrt_t_grad_v", t2.transient);
    r.check(
        "l2-v-nonincreasing",
        t1.settled(),
        format!("‖v‖ median nonincreasing after t* = {:.2} (t* ≤ {:.1})", t1.transient, t1.t_end / 2.0),
    );
    r.check(
        "sqrt-t-grad-v-nonincreasing",
        t2.settled(),
        format!("√t‖∇v‖ median nonincreasing after t* = {:.2} (t* ≤ {:.1})", t2.transient, t2.t_end / 2.0),
    );
    let le = log_energy_check(records);
    r.value("log_energy_constant", le.constant);
    let (slope, hw) = le.tail.map(|f| (f.slope, f.slope_halfwidth)).unwrap_or((0.0, 0.0));
    r.value("log_energy_tail_slope", slope);
    r.check(
        "log-energy-bounded",
        le.bounded(),
        format!("ratio tail slope {slope:.3e} ≤ halfwidth {hw:.3e}; fitted C = {:.6e}", le.constant),
    );
    structural_checks(&mut r, records);
    opts.save_records("perturbed-oseen.csv", records)?;
    Ok(r)
}

pub fn perp_decay(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::PerpDecay.name(), 8);
    let run = perturbed_oseen_run(opts.seed)?;
    let (records, failure) = (&run.0, &run.1);
    r.check("run-completed", failure.is_none(), failure.clone().unwrap_or_else(|| "t = 8 reached".into()));
    let pitch = 1.0;
    let limit = -1.0 / (pitch * pitch) + 0.2 / (pitch * pitch);
    match perp_decay_fit(records)? {
        Some(f) => {
            r.value("perp_rate", f.exponent);
            r.value("perp_residual", f.residual);
            r.check("perp-rate", f.exponent <= limit, format!("{} (≤ {limit})", f.summary()));
        }
        None => {
            r.check("perp-rate", false, "perp part vanished identically; nothing to fit");
        }
    }
    let t: Vec<f64> = records.iter().map(|x| x.t).collect();
    let nb: Vec<f64> = records.iter().map(|x| x.l2_nbar).collect();
    let t_end = *t.last().unwrap();
    match decay_fit(&t, &nb, t_end / 2.0, t_end, FitModel::Exponential) {
        Ok(f) => {
            r.value("nbar_rate", f.exponent);
            r.value("nbar_residual", f.residual);
            r.check("nbar-fit", f.samples >= 20, f.summary());
        }
        Err(e) => {
            r.check("nbar-fit", false, e.to_string());
        }
    }
    // Constant for which the chain bound dominates every record.
    let chain_c0 = records
        .iter()
        .filter(|x| x.l2_uperp > 0.0)
        .map(|x| {
            let b = x.l2_uperp.sqrt() * x.l2_grad_uperp * x.l2_lap_uperp.sqrt();
            pitch * (x.l2_nbar / b).powi(2)
        })
        .fold(0.0, f64::max);
    r.value("chain_c0", chain_c0);
    Ok(r)
}

pub fn rate_study_preset(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::RateStudy.name(), 9);
    let cfg = RateStudyConfig::default();
    let mut csv = String::from("data,t,l2_v\n");
    for &m in &opts.m_list {
        let s = rate_study(RateData::PowerTail { m }, &cfg)?;
        let want = (1.0 - m) / 2.0;
        // tighter band where the decay is slower
        let tol = if m < 1.3 { 0.08 } else { 0.1 };
        r.value(&format!("exponent[m={m}]"), s.fit.exponent);
        r.value(&format!("pipeline_gap[m={m}]"), s.pipeline_gap);
        r.check(
            &format!("exponent m = {m}"),
            (s.fit.exponent - want).abs() <= tol && !s.super_rate,
            format!("{} (target {want:.3} ± {tol})", s.summary()),
        );
        for (t, y) in &s.series {
            csv.push_str(&format!("m={m},{t:.10e},{y:.16e}\n"));
        }
    }
    let gsn = rate_study(RateData::Gaussian, &cfg)?;
    r.value("exponent[gaussian]", gsn.fit.exponent);
    r.check("gaussian-super-rate", gsn.super_rate, gsn.summary());
    opts.save("rate-study.csv", &csv)?;
    Ok(r)
}

/// `(t₁, t₂)` pairs with `1 + t₁ ∈ {1, 2, 4}` and `(1 + t₂)/(1 + t₁) ∈ {2, 3, 4}`.
pub fn lemma2_lattice() -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for s1 in [1.0, 2.0, 4.0] {
        for rho in [2.0, 3.0, 4.0] {
            v.push((s1 - 1.0, rho * s1 - 1.0));
        }
    }
    v
}

pub fn lemma2(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::Lemma2.name(), 10);
    let g = GridSpec::with_shape(160, 160, 8, 96.0, 1.0)?;
    let rep = oseen_difference_check(&g, &lemma2_lattice())?;
    r.value("c_log", rep.c_log);
    r.value("c_inv", rep.c_inv);
    r.value("spread_log", rep.spread_log);
    r.value("spread_inv", rep.spread_inv);
    r.check(
        "log-form",
        rep.spread_log <= 0.1,
        format!("C = {:.6} (max), spread at fixed (1+t₂)/(1+t₁): {:.2e} (≤ 10%)", rep.c_log, rep.spread_log),
    );
    r.check(
        "inverse-form",
        rep.spread_inv <= 0.1,
        format!("C = {:.6} (max), spread at fixed (1+t₂)/(1+t₁): {:.2e} (≤ 10%)", rep.c_inv, rep.spread_inv),
    );
    let mut worst = 0.0f64;
    let mut csv = String::from("t1,t2,l2_sq,grad_sq,l2_sq_exact,grad_sq_exact,c_log,c_inv\n");
    for s in &rep.samples {
        let (el, eg) = oseen_difference_exact(s.t1, s.t2, g.pitch);
        worst = worst.max(((s.l2_sq - el) / el).abs()).max(((s.grad_sq - eg) / eg).abs());
        csv.push_str(&format!(
            "{},{},{:.16e},{:.16e},{el:.16e},{eg:.16e},{:.16e},{:.16e}\n",
            s.t1, s.t2, s.l2_sq, s.grad_sq, s.c_log, s.c_inv
        ));
    }
    r.value("closed_form_gap", worst);
    r.check("closed-form", worst < 1e-6, format!("largest relative gap to the closed forms {worst:.3e}"));
    opts.save("lemma2.csv", &csv)?;
    Ok(r)
}

pub fn structural(opts: &PresetOptions) -> Result<PresetReport> {
    let mut r = PresetReport::new(Preset::Structural.name(), 11);
    // Periodic images of the pressure field break the helical symmetry at
    // a rate that falls off quickly with the box size; Lx = 24σ keeps it
    // far below the tolerance.
    let g = GridSpec::with_shape(72, 72, 24, 24.0, 1.0)?;
    let spec = PerturbationSpec { seed: opts.seed, amplitude: 0.1, modes: vec![0, 1, 2], sigma: 1.0 };
    let v0 = random_helical_perturbation(&spec, &g)?;

    // Unit-time run around the vortex.
    let cfg = SolverConfig { t_end: 1.0, output_dt: 0.1, a: 1.0, ..Default::default() };
    let out = run(&v0, &cfg)?;
    run_checked(&mut r, &out);
    let d0 = out.records[0].helical_defect;
    let growth = out.records.iter().map(|x| x.helical_defect - d0).fold(0.0, f64::max);
    r.value("helical_defect_initial", d0);
    r.value("helical_defect_growth", growth);
    r.check(
        "helical-defect-growth",
        growth < 1e-6,
        format!("defect {d0:.3e} at t = 0, growth {growth:.3e} over unit time (< 1e-6)"),
    );
    structural_checks(&mut r, &out.records);

    // Energy identity without the vortex: E(t+2h) − E(t) = −2∫‖∇v‖².
    let h = 0.01;
    let cfg0 = SolverConfig {
        t_end: 0.2,
        dt: DtPolicy::Fixed(h),
        output_dt: h,
        a: 0.0,
        ..Default::default()
    };
    let out0 = run(&v0, &cfg0)?;
    run_checked(&mut r, &out0);
    let rec = &out0.records;
    let mut worst = 0.0f64;
    for i in (0..rec.len().saturating_sub(2)).step_by(2) {
        let de = rec[i + 2].l2_v.powi(2) - rec[i].l2_v.powi(2);
        let g2 = |k: usize| rec[k].l2_grad_v.powi(2);
        let pred = -2.0 * h / 3.0 * (g2(i) + 4.0 * g2(i + 1) + g2(i + 2));
        worst = worst.max(((de - pred) / pred).abs());
    }
    r.value("energy_identity_error", worst);
    r.check("energy-identity", worst < 1e-4, format!("max relative defect {worst:.3e} (< 1e-4)"));
    structural_checks(&mut r, rec);
    opts.save_records("structural-vortex.csv", &out.records)?;
    opts.save_records("structural-energy.csv", rec)?;
    Ok(r)
}

/// Initial perturbation described by a configuration.
pub fn initial_perturbation(cfg: &ExperimentConfig) -> Result<SpectralField> {
    let g = cfg.grid_spec()?;
    let a = cfg.physics.a;
    Ok(match cfg.initial.kind {
        InitialKind::OseenOnly => SpectralField::zeros(&g, 3),
        InitialKind::Shear => forward(&shear_flow(0.0, &g).0),
        InitialKind::Lamb2d => {
            // Gaussian core of width σ and the same circulation: the Oseen
            // profile at 1 + t = σ², minus the background.
            let t_core = cfg.initial.sigma * cfg.initial.sigma - 1.0;
            forward(&PhysicalField::vector_from_fn(&g, |p| {
                let r = p[0].hypot(p[1]);
                if r == 0.0 {
                    return [0.0; 3];
                }
                let q = a * (oseen_u_theta(r, t_core) - oseen_u_theta(r, 0.0)) / r;
                [-p[1] * q, p[0] * q, 0.0]
            }))
        }
        InitialKind::PerturbedOseen => random_helical_perturbation(&cfg.perturbation_spec(), &g)?,
    })
}

/// Full velocity and vorticity of the state, for snapshots.
pub fn snapshot_of(v: &SpectralField, t: f64, a: f64) -> Snapshot {
    let g = *v.grid();
    let mut u = inverse(v);
    let mut w = inverse(&curl(v));
    if a != 0.0 {
        u.axpy(a, &oseen_velocity(t, &g));
        w.axpy(a, &oseen_vorticity(t, &g));
    }
    Snapshot { time: t, velocity: u, vorticity: Some(w) }
}

/// Runs a configured simulation, writing the CSV, the echoed config and
/// optional snapshots below `out_dir`.
pub fn simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutput> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("config.toml"), cfg.to_toml())?;
    let v0 = initial_perturbation(cfg)?;
    let mut scfg = cfg.solver_config();
    scfg.require_helical = true;
    let mut sink = CsvSink::create(&out_dir.join(&cfg.output.csv))?;
    let every = cfg.output.snapshot_every;
    let snap_dir = out_dir.join(&cfg.output.snapshot_dir);
    if every > 0 {
        std::fs::create_dir_all(&snap_dir)?;
    }
    let a = cfg.physics.a;
    let mut k = 0usize;
    run_with(&v0, &scfg, |rec, v| {
        sink.push(rec)?;
        if every > 0 && k % every == 0 {
            snapshot_of(v, rec.t, a).write(&snap_dir.join(format!("snap_{k:05}.hlxf")))?;
        }
        k += 1;
        Ok(())
    })
}

/// Radial `v̄_θ` of a Lamb-type initial state, for reference.
pub fn lamb2d_swirl(r: f64, sigma: f64, a: f64) -> f64 {
    a * (oseen_u_theta(r, sigma * sigma - 1.0) - oseen_u_theta(r, 0.0))
}

/// Total vorticity mass of the Lamb-type core (equals `a`).
pub fn lamb2d_circulation(sigma: f64, a: f64) -> f64 {
    let s = sigma * sigma;
    let f = |r: f64| a * oseen_w(r, s - 1.0) * 2.0 * PI * r;
    crate::radial::integrate_to_infinity(f, 0.0, 4.0 * sigma, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip_and_criteria_are_ordered() {
        for (i, p) in Preset::ALL.iter().enumerate() {
            assert_eq!(Preset::parse(p.name()), Some(*p));
            assert_eq!(p.criterion(), i as u32 + 1);
        }
        assert_eq!(Preset::parse("nope"), None);
    }

    #[test]
    fn lattice_has_nine_pairs() {
        let l = lemma2_lattice();
        assert_eq!(l.len(), 9);
        assert!(l.contains(&(0.0, 1.0)) && l.contains(&(1.0, 3.0)) && l.contains(&(3.0, 7.0)));
    }

    #[test]
    fn lamb_core_keeps_circulation() {
        assert!((lamb2d_circulation(1.7, 0.8) - 0.8).abs() < 1e-10);
        assert_eq!(lamb2d_swirl(2.0, 1.0, 3.0), 0.0);
    }

    #[test]
    fn small_poincare_sweep() {
        let g = GridSpec::with_shape(64, 64, 8, 16.0, 0.7).unwrap();
        let v = poincare_sweep(3, 4, &g).unwrap();
        assert!(v.iter().all(|&x| x <= 0.7 * (1.0 + 1e-10)));
    }
}
