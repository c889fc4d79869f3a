//! Algebraic decay of the vertical-mean perturbation for algebraically
//! localized vorticity, measured with the radial engine.
//!
//! The initial perturbation is the pure swirl
//! `v̄_θ = r(1 + r²)^{−(q+1)/2}` with `q = m + δ`: its vorticity
//! `(1 + r²)^{−(q+3)/2}(2 + (1 − q)r²)` has zero mass and decays like
//! `r^{−(q+1)}`, so it lies in `L²_m` but not in `L²_{m'}` for `m' ≥ q`.
//! A pure swirl around a pure swirl feels no projected nonlinearity, so
//! `v̄_θ` obeys the `n = 1` radial heat equation exactly.

use std::f64::consts::PI;

use crate::analytic::oseen_w;
use crate::decomposition::{
    circulation_radial, oseen_extraction, radial_biot_savart, weighted_l2m_norm_radial,
};
use crate::error::{Error, Result};
use crate::radial::{integrate_to_infinity, RadialProfile};
use crate::solver::radial::{growing_schedule, OuterBoundary, RadialEngine, RadialParity, Stencil};

use super::fit::{power_fit, DecayFit};

/// Exponents below this are faster than any admissible `(1 − m)/2`.
pub const SUPER_RATE_THRESHOLD: f64 = -0.6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateStudyConfig {
    pub r_max: f64,
    pub dr: f64,
    pub t_end: f64,
    pub dt0: f64,
    pub growth: f64,
    pub dt_max: f64,
    /// `q − m`, the margin that keeps the data inside `L²_m`.
    pub delta: f64,
    /// Background circulation.
    pub a: f64,
    pub stencil: Stencil,
}

impl Default for RateStudyConfig {
    fn default() -> Self {
        RateStudyConfig {
            r_max: 1000.0,
            dr: 0.05,
            t_end: 100.0,
            dt0: 0.01,
            growth: 1.02,
            dt_max: 1.0,
            delta: 0.05,
            a: 1.0,
            stencil: Stencil::Fourth,
        }
    }
}

impl RateStudyConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.r_max > 0.0
            && self.dr > 0.0
            && self.r_max / self.dr >= 16.0
            && self.t_end > 0.0
            && self.dt0 > 0.0
            && self.growth >= 1.0
            && self.dt_max >= self.dt0
            && self.delta > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid rate-study configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateData {
    /// Power-law tail tuned to `L²_m`, `m ∈ (1, 2)`.
    PowerTail { m: f64 },
    /// `v̄_θ = r e^{−r²}`: in every `L²_m`.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudy {
    pub data: RateData,
    /// Circulation recovered from the full initial vorticity.
    pub a: f64,
    /// `max |v̄_θ(pipeline) − v̄_θ(closed form)| / max |v̄_θ|`.
    pub pipeline_gap: f64,
    /// Truncated weighted norm of the initial perturbation vorticity.
    pub weighted_norm: f64,
    pub fit: DecayFit,
    /// `(1 − m)/2` for power-tail data.
    pub expected: Option<f64>,
    pub super_rate: bool,
    /// `(t, ‖v̄(t)‖_{L²})` per step.
    pub series: Vec<(f64, f64)>,
}

impl RateStudy {
    pub fn summary(&self) -> String {
        let what = match self.data {
            RateData::PowerTail { m } => format!("m = {m}"),
            RateData::Gaussian => "gaussian".into(),
        };
        let exp = self
            .expected
            .map(|e| format!(", expected {e:.4}"))
            .unwrap_or_default();
        format!(
            "{what}: exponent {:.4}{exp}{}; a = {:.12}, pipeline gap {:.2e}",
            self.fit.exponent,
            if self.super_rate { " (super-rate)" } else { "" },
            self.a,
            self.pipeline_gap
        )
    }
}

fn initial_swirl(data: RateData, delta: f64) -> (Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>) {
    match data {
        RateData::PowerTail { m } => {
            let q = m + delta;
            (
                Box::new(move |r: f64| r * (1.0 + r * r).powf(-(q + 1.0) / 2.0)),
                Box::new(move |r: f64| {
                    (1.0 + r * r).powf(-(q + 3.0) / 2.0) * (2.0 + (1.0 - q) * r * r)
                }),
            )
        }
        RateData::Gaussian => (
            Box::new(|r: f64| r * (-r * r).exp()),
            Box::new(|r: f64| 2.0 * (1.0 - r * r) * (-r * r).exp()),
        ),
    }
}

pub fn rate_study(data: RateData, cfg: &RateStudyConfig) -> Result<RateStudy> {
    cfg.validate()?;
    if let RateData::PowerTail { m } = data {
        if !(m > 1.0 && m < 2.0) {
            return Err(Error::Precondition(format!("rate study needs 1 < m < 2, got m = {m}")));
        }
    }
    let n = (cfg.r_max / cfg.dr).round() as usize;
    let grid = RadialProfile::uniform_grid(n, cfg.r_max);
    let (swirl, vort) = initial_swirl(data, cfg.delta);

    // Full initial vorticity → circulation → Biot–Savart → extraction.
    let a_true = cfg.a;
    let omega_z = RadialProfile::from_fn(grid.clone(), |r| a_true * oseen_w(r, 0.0) + vort(r))?;
    let a = circulation_radial(&omega_z);
    let bs = radial_biot_savart(&omega_z.zeros_like(), &omega_z)?;
    let v0 = oseen_extraction(&bs.u_theta, a);
    let exact = RadialProfile::from_fn(grid.clone(), &swirl)?;
    let pipeline_gap = v0
        .values()
        .iter()
        .zip(exact.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / exact.max_abs();
    let w_pert = RadialProfile::from_fn(grid.clone(), &vort)?;
    let weighted_norm = match data {
        RateData::PowerTail { m } => weighted_l2m_norm_radial(&w_pert, m, 1.0),
        RateData::Gaussian => weighted_l2m_norm_radial(&w_pert, 1.5, 1.0),
    };

    // The decomposed profile is what gets evolved; the tail beyond R is
    // taken from the closed form and held fixed.
    let engine = RadialEngine::new(&grid, RadialParity::Odd, OuterBoundary::Frozen)?.with_stencil(cfg.stencil);
    let area = exact.area_weights();
    let tail = 2.0 * PI * integrate_to_infinity(|r| swirl(r).powi(2) * r, cfg.r_max, cfg.r_max, 1e-12);
    let norm = |h: &[f64]| -> f64 {
        let s: f64 = area.iter().zip(h).map(|(w, v)| w * v * v).sum();
        (2.0 * PI * s + tail).sqrt()
    };
    let mut series = vec![(0.0, norm(v0.values()))];
    let mut schedule = growing_schedule(cfg.t_end, cfg.dt0, cfg.growth, cfg.dt_max).into_iter();
    engine.evolve_schedule(&v0, &mut schedule, None, |t, h| series.push((t, norm(h))))?;

    let (t, y): (Vec<f64>, Vec<f64>) = series.iter().copied().unzip();
    let fit = power_fit(&t, &y)?;
    let expected = match data {
        RateData::PowerTail { m } => Some((1.0 - m) / 2.0),
        RateData::Gaussian => None,
    };
    Ok(RateStudy {
        data,
        a,
        pipeline_gap,
        weighted_norm,
        super_rate: fit.exponent < SUPER_RATE_THRESHOLD,
        fit,
        expected,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_m_outside_interval() {
        let c = RateStudyConfig::default();
        assert!(rate_study(RateData::PowerTail { m: 0.9 }, &c).is_err());
        assert!(rate_study(RateData::PowerTail { m: 2.0 }, &c).is_err());
    }

    #[test]
    fn gaussian_is_super_rate() {
        let c = RateStudyConfig { r_max: 200.0, t_end: 40.0, ..Default::default() };
        let s = rate_study(RateData::Gaussian, &c).unwrap();
        // ‖v̄(t)‖ ∝ (1 + 4t)^{−1}
        assert!(s.super_rate, "{}", s.summary());
        assert!((s.fit.exponent + 1.0).abs() < 0.05, "{}", s.summary());
        assert!((s.a - 1.0).abs() < 1e-4, "{}", s.summary());
    }
}
