//! Functional inequalities and the quadratic source term, evaluated on
//! discrete fields.

use std::f64::consts::PI;

use crate::analytic::oseen_velocity_difference;
use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::grid::GridSpec;
use crate::spectral::ops::{
    curl, dealias_inplace, grad_l2_norm, l2_norm, lap_l2_norm, leray_project, perp_part, vertical_mean,
};
use crate::spectral::transform::{forward, inverse};

/// `‖v‖_{L⁴} / (‖v‖_{L²}^{1/2} ‖∇v‖_{L²}^{1/2})`.
pub fn ladyzhenskaya_ratio(v: &SpectralField) -> Result<f64> {
    let l2 = l2_norm(v);
    let grad = grad_l2_norm(v);
    if l2 == 0.0 || grad == 0.0 {
        return Err(Error::Precondition("Ladyzhenskaya ratio of a constant field".into()));
    }
    let l4 = inverse(v).lp_norm(4.0);
    Ok(l4 / (l2.sqrt() * grad.sqrt()))
}

/// `C₀ = L·ratio⁴`, the constant implied by one sample.
pub fn ladyzhenskaya_constant(ratio: f64, pitch: f64) -> f64 {
    pitch * ratio.powi(4)
}

/// `‖v⊥‖_{L²}/‖∇v⊥‖_{L²}` after removing the vertical mean.
pub fn poincare_ratio(v: &SpectralField) -> Result<f64> {
    let p = perp_part(v);
    let grad = grad_l2_norm(&p);
    if grad == 0.0 {
        return Err(Error::Precondition("field has no zero-vertical-mean part".into()));
    }
    Ok(l2_norm(&p) / grad)
}

/// Norm of `N̄ = PQ(u⊥·∇u⊥)` and its Ladyzhenskaya-chain bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceNorm {
    pub norm: f64,
    /// `(C₀/L)^{1/2}‖u⊥‖^{1/2}‖∇u⊥‖‖Δu⊥‖^{1/2}`
    pub chain_bound: f64,
}

/// `PQ(u⊥·∇u⊥)` computed as `PQ(ω⊥×u⊥)` (the difference is a gradient),
/// with 2/3-rule dealiasing of the product.
pub fn source_term(uperp: &SpectralField) -> SpectralField {
    let u = inverse(uperp);
    let w = inverse(&curl(uperp));
    let mut prod = forward(&PhysicalField::cross(&w, &u));
    dealias_inplace(&mut prod);
    leray_project(&vertical_mean(&prod))
}

pub fn source_norm(uperp: &SpectralField, c0: f64) -> SourceNorm {
    let p = perp_part(uperp);
    let norm = l2_norm(&source_term(&p));
    let pitch = p.grid().pitch;
    let chain_bound =
        (c0 / pitch).sqrt() * l2_norm(&p).sqrt() * grad_l2_norm(&p) * lap_l2_norm(&p).sqrt();
    SourceNorm { norm, chain_bound }
}

/// One lattice point of the Oseen difference check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OseenDifferenceSample {
    pub t1: f64,
    pub t2: f64,
    pub l2_sq: f64,
    pub grad_sq: f64,
    /// `‖u^LO(t2) − u^LO(t1)‖² / (L ln((1+t2)/(1+t1)))`
    pub c_log: f64,
    /// `‖∇(u^LO(t2) − u^LO(t1))‖² / (L (1/(1+t1) − 1/(1+t2)))`
    pub c_inv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OseenDifferenceReport {
    pub samples: Vec<OseenDifferenceSample>,
    /// Fitted constants (max over the lattice).
    pub c_log: f64,
    pub c_inv: f64,
    /// Largest relative spread of each constant among samples sharing the
    /// same ratio `(1+t2)/(1+t1)`.
    pub spread_log: f64,
    pub spread_inv: f64,
}

/// Evaluates both Oseen difference norms on the grid for every `(t1, t2)`
/// pair. The differences have no net circulation and decay like Gaussians,
/// so they are periodic on a box much wider than the later core.
pub fn oseen_difference_check(grid: &GridSpec, pairs: &[(f64, f64)]) -> Result<OseenDifferenceReport> {
    let mut samples = Vec::with_capacity(pairs.len());
    for &(t1, t2) in pairs {
        if !(t1 >= 0.0 && t2 >= t1) {
            return Err(Error::Precondition(format!("need 0 ≤ t1 ≤ t2, got ({t1}, {t2})")));
        }
        let d = forward(&oseen_velocity_difference(t2, t1, grid));
        let l2_sq = l2_norm(&d).powi(2);
        let grad_sq = grad_l2_norm(&d).powi(2);
        let pitch = grid.pitch;
        let (s1, s2) = (1.0 + t1, 1.0 + t2);
        let (c_log, c_inv) = if t1 == t2 {
            (0.0, 0.0)
        } else {
            (
                l2_sq / (pitch * (s2 / s1).ln()),
                grad_sq / (pitch * (1.0 / s1 - 1.0 / s2)),
            )
        };
        samples.push(OseenDifferenceSample { t1, t2, l2_sq, grad_sq, c_log, c_inv });
    }
    let spread = |get: fn(&OseenDifferenceSample) -> f64| -> f64 {
        let mut worst = 0.0f64;
        for a in &samples {
            for b in &samples {
                let ra = (1.0 + a.t2) / (1.0 + a.t1);
                let rb = (1.0 + b.t2) / (1.0 + b.t1);
                if a.t1 != a.t2 && (ra - rb).abs() < 1e-12 * ra {
                    let (x, y) = (get(a), get(b));
                    worst = worst.max((x - y).abs() / x.max(y));
                }
            }
        }
        worst
    };
    let c_log = samples.iter().map(|s| s.c_log).fold(0.0, f64::max);
    let c_inv = samples.iter().map(|s| s.c_inv).fold(0.0, f64::max);
    Ok(OseenDifferenceReport {
        spread_log: spread(|s| s.c_log),
        spread_inv: spread(|s| s.c_inv),
        samples,
        c_log,
        c_inv,
    })
}

/// Closed forms over one vertical period, for `s = 1 + t`:
/// `‖u^LO(t2) − u^LO(t1)‖² = (L/2) ln((s1+s2)²/(4 s1 s2))` and
/// `‖∇(…)‖² = (L/4)(s2−s1)²/(s1 s2 (s1+s2))`.
pub fn oseen_difference_exact(t1: f64, t2: f64, pitch: f64) -> (f64, f64) {
    let (s1, s2) = (1.0 + t1, 1.0 + t2);
    let l2 = 0.5 * pitch * ((s1 + s2).powi(2) / (4.0 * s1 * s2)).ln();
    let grad = 2.0 * PI * pitch / (8.0 * PI) * (s2 - s1).powi(2) / (s1 * s2 * (s1 + s2));
    (l2, grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poincare_equality_for_lowest_mode() {
        let g = GridSpec::new(16, 8.0, 0.8).unwrap();
        let l = g.pitch;
        let v = forward(&PhysicalField::vector_from_fn(&g, |p| [(p[2] / l).sin(), 0.0, 0.0]));
        assert!((poincare_ratio(&v).unwrap() - l).abs() < 1e-10 * l);
        let v2 = forward(&PhysicalField::vector_from_fn(&g, |p| [0.0, (2.0 * p[2] / l).cos(), 0.0]));
        assert!(poincare_ratio(&v2).unwrap() <= l / 2.0 * (1.0 + 1e-12));
    }

    #[test]
    fn ladyzhenskaya_is_scale_invariant() {
        let g = GridSpec::new(16, 12.0, 1.0).unwrap();
        let v = forward(&PhysicalField::vector_from_fn(&g, |p| {
            let e = (-(p[0] * p[0] + p[1] * p[1]) / 2.0).exp();
            [-p[1] * e, p[0] * e, e * p[2].cos()]
        }));
        let r1 = ladyzhenskaya_ratio(&v).unwrap();
        let r2 = ladyzhenskaya_ratio(&v.scaled(-3.7)).unwrap();
        assert!((r1 - r2).abs() < 1e-13 * r1);
    }

    #[test]
    fn source_vanishes_without_perp_part() {
        let g = GridSpec::new(8, 4.0, 1.0).unwrap();
        let s = source_norm(&SpectralField::zeros(&g, 3), 1.0);
        assert_eq!(s.norm, 0.0);
        assert_eq!(s.chain_bound, 0.0);
    }

    #[test]
    fn equal_times_give_zero_difference() {
        let g = GridSpec::new(16, 40.0, 1.0).unwrap();
        let r = oseen_difference_check(&g, &[(2.0, 2.0)]).unwrap();
        assert_eq!(r.samples[0].l2_sq, 0.0);
    }
}
