//! Oseen extraction: splitting a helical vorticity field into a multiple of
//! the Oseen vortex plus a finite-energy remainder.
//!
//! On the box the remainder velocity is obtained directly from the spectral
//! Biot–Savart law applied to `ω − a·w^LO(0) e_z`, which has zero mean and
//! therefore a periodic velocity. The radial route (angular average, radial
//! Biot–Savart, Oseen subtraction) is evaluated alongside as an
//! independent consistency check of the mean part.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::analytic::{oseen_u_theta, oseen_vorticity, oseen_w};
use crate::error::{Error, Result};
use crate::field::{chunked_sum, PhysicalField, SpectralField};
use crate::grid::GridSpec;
use crate::radial::RadialProfile;
use crate::spectral::ops::{grad_l2_norm, h1_norm, inverse_curl, l2_norm, vertical_mean};
use crate::spectral::transform::{forward, inverse};
use crate::spectral::helical_defect;

/// Defect above which a vorticity field is not accepted as helical.
pub const HELICAL_THRESHOLD: f64 = 1e-6;

/// `(∫ (1 + r²)^m |ω|²)^{1/2}` over the box, `r` measured from the axis.
pub fn weighted_l2m_norm(omega: &PhysicalField, m: f64) -> f64 {
    let g = *omega.grid();
    let mag = omega.magnitude();
    let terms: Vec<f64> = mag
        .par_iter()
        .enumerate()
        .map(|(idx, w)| {
            let [x, y, _] = g.centered_at(idx);
            (1.0 + x * x + y * y).powf(m) * w * w
        })
        .collect();
    (chunked_sum(&terms, |v| *v) * g.cell_volume()).sqrt()
}

/// Weighted norm of an axisymmetric profile over one vertical period
/// (`2π·2πL ∫ (1 + r²)^m f² r dr`), without tail correction.
pub fn weighted_l2m_norm_radial(f: &RadialProfile, m: f64, pitch: f64) -> f64 {
    let g = f.map(|r, v| (1.0 + r * r).powf(m) * v * v);
    (4.0 * PI * PI * pitch * g.integrate_r()).sqrt()
}

/// Circulation `a = (1/(2πL)) ∫_Ω ω_z`, i.e. `Lx·Ly·mean(ω_z)`.
pub fn circulation_a(omega: &PhysicalField) -> f64 {
    let g = omega.grid();
    let c = if omega.ncomp() == 3 { 2 } else { 0 };
    g.lx * g.ly * omega.mean(c)
}

/// Circulation `2π ∫₀^∞ ω_z r dr` of a profile, with power-law tail.
pub fn circulation_radial(omega_z: &RadialProfile) -> f64 {
    2.0 * PI * (omega_z.integrate_r() + omega_z.tail_integral(1.0).unwrap_or(0.0))
}

#[derive(Debug, Clone)]
pub struct BiotSavart {
    pub u_theta: RadialProfile,
    pub u_z: RadialProfile,
    /// Estimated `∫_R^∞ ω_θ dρ` that was added to `u_z`.
    pub tail_estimate: f64,
    /// Set when `ω_θ` does not decay fast enough for the tail estimate.
    pub tail_warning: bool,
}

/// `u_θ(r) = (1/r)∫₀^r ω_z ρ dρ`, `u_z(r) = ∫_r^∞ ω_θ dρ`.
pub fn radial_biot_savart(omega_theta: &RadialProfile, omega_z: &RadialProfile) -> Result<BiotSavart> {
    if omega_theta.r() != omega_z.r() {
        return Err(Error::Shape {
            expected: "profiles on a common radial grid".into(),
            found: "different grids".into(),
        });
    }
    let r = omega_z.r();
    let rw: Vec<f64> = r.iter().zip(omega_z.values()).map(|(x, w)| x * w).collect();
    let cum_z = omega_z.cumulative_integral(&rw);
    let u_theta: Vec<f64> = r
        .iter()
        .zip(&cum_z)
        .map(|(&x, &c)| if x == 0.0 { 0.0 } else { c / x })
        .collect();

    let cum_t = omega_theta.cumulative_integral(omega_theta.values());
    let total = *cum_t.last().unwrap();
    let scale = omega_theta.max_abs() * omega_theta.r_max();
    let (tail, warn) = match omega_theta.tail_integral(0.0) {
        Some(t) => (t, scale > 0.0 && t.abs() > 1e-10 * scale),
        None => (0.0, true),
    };
    let u_z: Vec<f64> = cum_t.iter().map(|c| total - c + tail).collect();
    Ok(BiotSavart {
        u_theta: omega_z.with_values(u_theta)?,
        u_z: omega_z.with_values(u_z)?,
        tail_estimate: tail,
        tail_warning: warn,
    })
}

/// `v̄_θ(r) = ū_θ(r) − a·u^LO_θ(0, r)`.
pub fn oseen_extraction(u_theta: &RadialProfile, a: f64) -> RadialProfile {
    u_theta.map(|r, u| u - a * oseen_u_theta(r, 0.0))
}

/// Forward and backward forms of `r·v̄_θ(r)`:
/// `∫₀^r w̄_z ρ dρ` and `−∫_r^∞ w̄_z ρ dρ`, with `w̄_z = ω̄_z − a·w^LO(0)`.
/// They agree exactly when `a` is the full circulation. Returns the largest
/// disagreement relative to `max(max |forward|, |a|/2π)` (absolute if both
/// vanish).
pub fn mass_identity_discrepancy(omega_z: &RadialProfile, a: f64) -> f64 {
    let w = omega_z.map(|r, v| v - a * oseen_w(r, 0.0));
    let rw: Vec<f64> = w.r().iter().zip(w.values()).map(|(r, v)| r * v).collect();
    let forward = w.cumulative_integral(&rw);
    // Backward integral accumulated from the outer edge inwards.
    let n = rw.len();
    let rev_r: Vec<f64> = w.r().iter().rev().map(|r| w.r_max() - r).collect();
    let rev_g: Vec<f64> = rw.iter().rev().copied().collect();
    let rev = RadialProfile::new(rev_r, rev_g.clone()).expect("reversed grid is increasing");
    let from_edge = rev.cumulative_integral(&rev_g);
    let tail = w.tail_integral(1.0).unwrap_or(0.0);
    let scale = forward
        .iter()
        .fold(a.abs() / (2.0 * std::f64::consts::PI), |m, v| m.max(v.abs()));
    let gap = (0..n)
        .map(|i| {
            let backward = -(from_edge[n - 1 - i] + tail);
            (forward[i] - backward).abs()
        })
        .fold(0.0f64, f64::max);
    if scale > 0.0 {
        gap / scale
    } else {
        gap
    }
}

/// Angular average of the vertical mean of a field on `nx/2` rings of
/// spacing `dx`, with bilinear sampling. Vector fields are returned as
/// `(radial, azimuthal, axial)` profiles; scalars as a single profile.
pub fn angular_average(f: &PhysicalField) -> Vec<RadialProfile> {
    let g = *f.grid();
    let spec = forward(f);
    let mean = inverse(&vertical_mean(&spec));
    let plane: Vec<&[f64]> = (0..f.ncomp())
        .map(|c| &mean.component(c)[..g.nx * g.ny])
        .collect();
    let rings = g.nx / 2;
    let dr = g.dx();
    let r: Vec<f64> = (0..rings).map(|k| k as f64 * dr).collect();
    let sample = |comp: &[f64], x: f64, y: f64| -> f64 {
        let fx = (x + g.center[0]) / g.dx();
        let fy = (y + g.center[1]) / g.dy();
        let (i0, j0) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - i0, fy - j0);
        let wrap = |v: f64, n: usize| (v as i64).rem_euclid(n as i64) as usize;
        let (i0, j0) = (wrap(i0, g.nx), wrap(j0, g.ny));
        let (i1, j1) = ((i0 + 1) % g.nx, (j0 + 1) % g.ny);
        let at = |i: usize, j: usize| comp[i + g.nx * j];
        (1.0 - tx) * (1.0 - ty) * at(i0, j0)
            + tx * (1.0 - ty) * at(i1, j0)
            + (1.0 - tx) * ty * at(i0, j1)
            + tx * ty * at(i1, j1)
    };
    let nout = if f.ncomp() == 3 { 3 } else { 1 };
    let rows: Vec<Vec<f64>> = r
        .par_iter()
        .map(|&rad| {
            let count = ((2.0 * PI * rad / (0.5 * dr)).ceil() as usize).max(16);
            let mut acc = vec![0.0; nout];
            for s in 0..count {
                let th = 2.0 * PI * s as f64 / count as f64;
                let (c, sn) = (th.cos(), th.sin());
                let (x, y) = (rad * c, rad * sn);
                if nout == 1 {
                    acc[0] += sample(plane[0], x, y);
                } else {
                    let ux = sample(plane[0], x, y);
                    let uy = sample(plane[1], x, y);
                    acc[0] += c * ux + sn * uy;
                    acc[1] += -sn * ux + c * uy;
                    acc[2] += sample(plane[2], x, y);
                }
            }
            acc.iter().map(|v| v / count as f64).collect()
        })
        .collect();
    (0..nout)
        .map(|c| {
            let mut vals: Vec<f64> = rows.iter().map(|row| row[c]).collect();
            if nout == 3 && c < 2 {
                // e_r and e_θ are undefined on the axis; the components vanish there.
                vals[0] = 0.0;
            }
            RadialProfile::new(r.clone(), vals).expect("ring radii are increasing")
        })
        .collect()
}

/// `max |ū_r|` over grid nodes with `0 < r ≤ radius`, `ū = Q u`.
pub fn mean_radial_component_max(u: &SpectralField, radius: f64) -> f64 {
    let g = *u.grid();
    let mean = inverse(&vertical_mean(u));
    let plane = g.nx * g.ny;
    (0..plane)
        .into_par_iter()
        .map(|idx| {
            let [x, y, _] = g.centered_at(idx);
            let r = x.hypot(y);
            if r == 0.0 || r > radius {
                return 0.0;
            }
            ((x * mean.component(0)[idx] + y * mean.component(1)[idx]) / r).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// Output of [`decompose`].
#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub a: f64,
    /// Finite-energy remainder `v = u − a·u^LO(0)` (spectral, zero mean).
    pub v: SpectralField,
    pub l2_v: f64,
    pub grad_v: f64,
    pub h1_v: f64,
    pub m: f64,
    pub weighted_norm: f64,
    /// `‖v‖_{H¹}/‖ω‖_{L²_m}` (the embedding constant seen on this input).
    pub h1_over_weighted: f64,
    pub helical_defect: f64,
    /// Non-solenoidal part of the input vorticity (discarded).
    pub divergence_correction: f64,
    /// `max |ū_r|` of the vertical mean of `v` after angular averaging.
    pub mean_radial_max: f64,
    /// Largest gap between the grid and radial-route `v̄_θ` on `r ≤ Lx/4`.
    pub radial_route_gap: f64,
    /// Relative total mass of `w̄_z` on the radial route.
    pub mass_identity: f64,
}

impl DecompositionResult {
    /// `key = value` text report.
    pub fn to_report(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: f64| s.push_str(&format!("{k} = {v:.16e}\n"));
        kv("a", self.a);
        kv("m", self.m);
        kv("l2_v", self.l2_v);
        kv("l2_grad_v", self.grad_v);
        kv("h1_v", self.h1_v);
        kv("weighted_l2m_omega", self.weighted_norm);
        kv("h1_over_weighted", self.h1_over_weighted);
        kv("helical_defect", self.helical_defect);
        kv("divergence_correction", self.divergence_correction);
        kv("mean_radial_max", self.mean_radial_max);
        kv("radial_route_gap", self.radial_route_gap);
        kv("mass_identity", self.mass_identity);
        s
    }

    /// `v` on the grid.
    pub fn velocity(&self) -> PhysicalField {
        inverse(&self.v)
    }
}

/// Splits the helical vorticity `ω` (three components) as
/// `curl(a·u^LO(0) + v)`.
pub fn decompose(omega: &PhysicalField, m: f64) -> Result<DecompositionResult> {
    if !(m > 1.0) {
        return Err(Error::Precondition(format!(
            "weight exponent m = {m}: the decomposition needs m > 1 so that the weighted space embeds in L¹"
        )));
    }
    if omega.ncomp() != 3 {
        return Err(Error::Shape {
            expected: "3-component vorticity".into(),
            found: format!("{} component(s)", omega.ncomp()),
        });
    }
    if !omega.is_finite() {
        return Err(Error::NonFinite { what: "vorticity".into() });
    }
    let g: GridSpec = *omega.grid();
    let weighted = weighted_l2m_norm(omega, m);
    if !weighted.is_finite() {
        return Err(Error::Precondition("weighted vorticity norm is infinite".into()));
    }
    let spec = forward(omega);
    let defect = helical_defect(&spec);
    if defect > HELICAL_THRESHOLD {
        return Err(Error::Precondition(format!(
            "vorticity is not helical: masked defect {defect:.3e} > {HELICAL_THRESHOLD:.0e}"
        )));
    }

    let a = circulation_a(omega);
    let mut remainder = omega.clone();
    remainder.axpy(-a, &oseen_vorticity(0.0, &g));
    let inv = inverse_curl(&forward(&remainder));
    let v = inv.velocity;

    let l2_v = l2_norm(&v);
    let grad_v = grad_l2_norm(&v);
    let h1_v = h1_norm(&v);

    // Mean-part structure: the vertical mean of a helical field is
    // axisymmetric and solenoidal, hence has no radial component. Checked
    // at the grid nodes themselves so that no interpolation error enters.
    let v_phys = inverse(&v);
    let rmask = g.mask_radius();
    let mean_radial_max = mean_radial_component_max(&v, rmask);
    let v_mean = angular_average(&v_phys);

    let om = angular_average(omega);
    let bs = radial_biot_savart(&om[1], &om[2])?;
    // Circulation inside each ring differs from a only by the box-mean
    // vorticity outside, so use the grid circulation here too.
    let vbar_radial = oseen_extraction(&bs.u_theta, a);
    let radial_route_gap = vbar_radial
        .r()
        .iter()
        .zip(vbar_radial.values())
        .zip(v_mean[1].values())
        .filter(|((r, _), _)| **r <= rmask)
        .fold(0.0f64, |acc, ((_, x), y)| acc.max((x - y).abs()));
    let mass_identity = mass_identity_discrepancy(&om[2], a);

    Ok(DecompositionResult {
        a,
        v,
        l2_v,
        grad_v,
        h1_v,
        m,
        weighted_norm: weighted,
        h1_over_weighted: if weighted > 0.0 { h1_v / weighted } else { 0.0 },
        helical_defect: defect,
        divergence_correction: inv.divergence_correction,
        mean_radial_max,
        radial_route_gap,
        mass_identity,
    })
}

/// Pointwise envelope constants for the mean profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    /// `max |ū_z|(1+r)^m / (‖ω̄_θ‖_{L²_m}(1 + ln₊(1/r)^{1/2}))`
    pub c3: f64,
    /// `max |v̄_θ|(1+r)^m / ‖w̄_z‖_{L²_m}`
    pub c4: f64,
    pub a: f64,
}

fn ln_plus(x: f64) -> f64 {
    x.ln().max(0.0)
}

/// Fits the envelope constants on the profile grid (planar weighted norms).
pub fn bound_envelopes(omega_theta: &RadialProfile, omega_z: &RadialProfile, m: f64) -> Result<EnvelopeReport> {
    let bs = radial_biot_savart(omega_theta, omega_z)?;
    let a = circulation_radial(omega_z);
    let vbar = oseen_extraction(&bs.u_theta, a);
    let wbar = omega_z.map(|r, v| v - a * oseen_w(r, 0.0));
    let planar = |f: &RadialProfile| weighted_l2m_norm_radial(f, m, 1.0 / (2.0 * PI));
    let n_theta = planar(omega_theta);
    let n_z = planar(&wbar);
    let mut c3 = 0.0f64;
    let mut c4 = 0.0f64;
    for (i, &r) in omega_z.r().iter().enumerate().skip(1) {
        let w = (1.0 + r).powf(m);
        if n_theta > 0.0 {
            c3 = c3.max(bs.u_z.values()[i].abs() * w / (n_theta * (1.0 + ln_plus(1.0 / r).sqrt())));
        }
        if n_z > 0.0 {
            c4 = c4.max(vbar.values()[i].abs() * w / n_z);
        }
    }
    Ok(EnvelopeReport { c3, c4, a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{shear_f, shear_g};

    fn grid_r() -> Vec<f64> {
        RadialProfile::graded_grid(2000, 40.0, 1.0)
    }

    #[test]
    fn biot_savart_of_oseen_and_shear() {
        let r = grid_r();
        let wz = RadialProfile::from_fn(r.clone(), |x| oseen_w(x, 0.0)).unwrap();
        let zero = wz.zeros_like();
        let bs = radial_biot_savart(&zero, &wz).unwrap();
        for (x, u) in bs.u_theta.r().iter().zip(bs.u_theta.values()) {
            assert!((u - oseen_u_theta(*x, 0.0)).abs() < 1e-8);
        }
        assert_eq!(bs.u_z.max_abs(), 0.0);

        let wt = RadialProfile::from_fn(r, |x| shear_g(x, 0.0)).unwrap();
        let bs = radial_biot_savart(&wt, &wt.zeros_like()).unwrap();
        assert!(!bs.tail_warning);
        for (x, u) in bs.u_z.r().iter().zip(bs.u_z.values()) {
            assert!((u - shear_f(*x, 0.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn extraction_cancels_oseen_exactly() {
        let r = grid_r();
        let ut = RadialProfile::from_fn(r, |x| oseen_u_theta(x, 0.0)).unwrap();
        assert!(oseen_extraction(&ut, 1.0).max_abs() < 1e-10);
        assert_eq!(oseen_extraction(&ut, 0.0), ut);
    }

    #[test]
    fn rejects_small_m() {
        let g = GridSpec::new(16, 16.0, 1.0).unwrap();
        let w = oseen_vorticity(0.0, &g);
        assert!(decompose(&w, 1.0).is_err());
        assert!(decompose(&w, 0.5).is_err());
    }

    #[test]
    fn weighted_norm_reduces_to_l2() {
        let g = GridSpec::new(16, 20.0, 1.0).unwrap();
        let w = oseen_vorticity(0.0, &g);
        assert!((weighted_l2m_norm(&w, 0.0) - w.l2_norm()).abs() < 1e-12 * w.l2_norm());
        assert!(weighted_l2m_norm(&w, 2.0) >= weighted_l2m_norm(&w, 1.0));
    }
}
