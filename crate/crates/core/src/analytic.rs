//! Closed-form fields: the Oseen vortex, helical shear flows, the planar
//! heat kernel, and a seeded generator of helical perturbations.
//!
//! All samplers use coordinates centred on the vortex axis. Every profile
//! carries the built-in time offset `s = 1 + t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::decomposition::radial_biot_savart;
use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::grid::GridSpec;
use crate::radial::RadialProfile;
use crate::solver::radial::{OuterBoundary, RadialEngine, RadialParity};
use crate::spectral::ops::{curl, h1_norm, leray_project};
use crate::spectral::transform::forward;

/// Background vortex strength (circulation Reynolds number).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OseenParams {
    pub a: f64,
}

/// `u_θ/r` of the unit Oseen vortex as a function of `r²`; finite at 0.
#[inline]
pub fn oseen_swirl_rate(r2: f64, t: f64) -> f64 {
    let s = 1.0 + t;
    let x = r2 / (4.0 * s);
    if x < 1e-8 {
        // (1 − e^{−x})/x = 1 − x/2 + x²/6 − …
        (1.0 - x / 2.0 + x * x / 6.0) / (8.0 * PI * s)
    } else {
        -(-x).exp_m1() / (2.0 * PI * r2)
    }
}

/// Azimuthal velocity `(1/(2πr))(1 − e^{−r²/(4(1+t))})`, 0 at the axis.
#[inline]
pub fn oseen_u_theta(r: f64, t: f64) -> f64 {
    r * oseen_swirl_rate(r * r, t)
}

/// Axial vorticity `e^{−r²/(4(1+t))}/(4π(1+t))`.
#[inline]
pub fn oseen_w(r: f64, t: f64) -> f64 {
    let s = 1.0 + t;
    (-r * r / (4.0 * s)).exp() / (4.0 * PI * s)
}

/// `sup_x (1+t)·|∇u^LO(t, x)|` (Frobenius norm), independent of `t` by
/// self-similarity. Bounds the linear coupling in the perturbation energy
/// balance.
pub fn oseen_gradient_constant() -> f64 {
    // |∇u|² = (∂_r u_θ)² + (u_θ/r)² for a pure swirl, evaluated at t = 0.
    (0..=4000)
        .map(|i| {
            let r = i as f64 * 0.005;
            let q = oseen_swirl_rate(r * r, 0.0);
            let dudr = oseen_w(r, 0.0) - q;
            (dudr * dudr + q * q).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Cartesian velocity of the unit Oseen vortex at centred point `p`.
#[inline]
pub fn oseen_velocity_at(p: [f64; 3], t: f64) -> [f64; 3] {
    let q = oseen_swirl_rate(p[0] * p[0] + p[1] * p[1], t);
    [-p[1] * q, p[0] * q, 0.0]
}

/// Unit Oseen velocity sampled on the grid. Not periodic: the `1/r` tail
/// is cut at the box edges, so only products with localized fields or
/// zero-circulation differences should be transformed.
pub fn oseen_velocity(t: f64, grid: &GridSpec) -> PhysicalField {
    PhysicalField::vector_from_fn(grid, |p| oseen_velocity_at(p, t))
}

/// Unit Oseen vorticity `w^LO(t) e_z`.
pub fn oseen_vorticity(t: f64, grid: &GridSpec) -> PhysicalField {
    PhysicalField::vector_from_fn(grid, |p| [0.0, 0.0, oseen_w(p[0].hypot(p[1]), t)])
}

/// `u^LO(t1) − u^LO(t2)`: zero net circulation, Gaussian decay, periodic
/// to rounding on a box that contains both cores.
pub fn oseen_velocity_difference(t1: f64, t2: f64, grid: &GridSpec) -> PhysicalField {
    PhysicalField::vector_from_fn(grid, |p| {
        let a = oseen_velocity_at(p, t1);
        let b = oseen_velocity_at(p, t2);
        [a[0] - b[0], a[1] - b[1], 0.0]
    })
}

/// Shear-flow axial velocity `f = e^{−r²/(4s)}/(4πs)`.
#[inline]
pub fn shear_f(r: f64, t: f64) -> f64 {
    oseen_w(r, t)
}

/// Shear-flow azimuthal vorticity `g = −∂_r f = r e^{−r²/(4s)}/(8πs²)`.
#[inline]
pub fn shear_g(r: f64, t: f64) -> f64 {
    let s = 1.0 + t;
    r * (-r * r / (4.0 * s)).exp() / (8.0 * PI * s * s)
}

/// Velocity `f e_z` and vorticity `g e_θ` of the helical shear flow.
pub fn shear_flow(t: f64, grid: &GridSpec) -> (PhysicalField, PhysicalField) {
    let u = PhysicalField::vector_from_fn(grid, |p| [0.0, 0.0, shear_f(p[0].hypot(p[1]), t)]);
    let w = PhysicalField::vector_from_fn(grid, |p| {
        // g/r is smooth: e^{−r²/(4s)}/(8πs²)
        let s = 1.0 + t;
        let q = (-(p[0] * p[0] + p[1] * p[1]) / (4.0 * s)).exp() / (8.0 * PI * s * s);
        [-p[1] * q, p[0] * q, 0.0]
    });
    (u, w)
}

/// Planar heat kernel `G_t(x) = e^{−|x|²/(4t)}/(4πt)`.
#[inline]
pub fn heat_kernel_2d(t: f64, x: f64, y: f64) -> f64 {
    (-(x * x + y * y) / (4.0 * t)).exp() / (4.0 * PI * t)
}

/// Horizontal grid cells per envelope width needed to keep the sampled
/// perturbation helical to round-off.
pub const MIN_CELLS_PER_SIGMA: f64 = 3.0;

/// Recipe for a seeded helical divergence-free perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    pub seed: u64,
    /// Target `‖v‖_{H¹}`.
    pub amplitude: f64,
    /// Azimuthal orders `n ≥ 0`; each contributes `Re[c_n e^{in(θ − z/L)}]`.
    pub modes: Vec<u32>,
    /// Radial envelope width.
    pub sigma: f64,
}

impl PerturbationSpec {
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::Config(format!(
                "perturbation amplitude {} must be finite and ≥ 0",
                self.amplitude
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::Config(format!("envelope width sigma = {} must be positive", self.sigma)));
        }
        if self.sigma > grid.lx / 16.0 {
            return Err(Error::Config(format!(
                "envelope width sigma = {} exceeds lx/16 = {}: the perturbation would wrap around the box",
                self.sigma,
                grid.lx / 16.0
            )));
        }
        let h = grid.dx().max(grid.ly / grid.ny as f64);
        if self.sigma < MIN_CELLS_PER_SIGMA * h {
            return Err(Error::Config(format!(
                "envelope width sigma = {} is under-resolved: needs at least {MIN_CELLS_PER_SIGMA} cells ({})",
                self.sigma,
                MIN_CELLS_PER_SIGMA * h
            )));
        }
        if self.modes.is_empty() && self.amplitude > 0.0 {
            return Err(Error::Config("perturbation needs at least one helical mode".into()));
        }
        Ok(())
    }
}

/// Builds `v = curl A` with `A = ψ₁ e_z + ψ₂ e_B/σ`, `e_B = (−y, x, L)`,
/// where each `ψ = Σ_n Re[c_n ((x + iy)/σ)^n e^{−inz/L}]·e^{−r²/(2σ²)}` is a
/// helical scalar with seeded standard-normal complex coefficients. Helical
/// scalars times helical vectors are helical, and so is their curl; the
/// result is Leray-projected (a no-op up to rounding) and rescaled to the
/// requested `H¹` norm.
pub fn random_helical_perturbation(spec: &PerturbationSpec, grid: &GridSpec) -> Result<SpectralField> {
    spec.validate(grid)?;
    if spec.amplitude == 0.0 {
        return Ok(SpectralField::zeros(grid, 3));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let coeffs: Vec<(i32, Complex64, Complex64)> = spec
        .modes
        .iter()
        .map(|&n| {
            let c1 = Complex64::new(normal(), normal());
            let c2 = Complex64::new(normal(), normal());
            (n as i32, c1, c2)
        })
        .collect();
    let sigma = spec.sigma;
    let pitch = grid.pitch;
    let potential = PhysicalField::vector_from_fn(grid, |p| {
        let (x, y, z) = (p[0], p[1], p[2]);
        let env = (-(x * x + y * y) / (2.0 * sigma * sigma)).exp();
        let w = Complex64::new(x / sigma, y / sigma);
        let (mut psi1, mut psi2) = (0.0, 0.0);
        for &(n, c1, c2) in &coeffs {
            let phase = Complex64::from_polar(1.0, -(n as f64) * z / pitch);
            let basis = w.powi(n) * phase;
            psi1 += (c1 * basis).re;
            psi2 += (c2 * basis).re;
        }
        psi1 *= env;
        psi2 *= env / sigma;
        [-y * psi2, x * psi2, psi1 + pitch * psi2]
    });
    let v = leray_project(&curl(&forward(&potential)));
    let norm = h1_norm(&v);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Precondition("generated perturbation has zero norm".into()));
    }
    Ok(v.scaled(spec.amplitude / norm))
}

/// Two-dimensional vortex with axial vorticity `h(t, r)`: evolves `h0` by
/// the radial heat equation and rebuilds the swirl from the radial
/// Biot–Savart law. Returns `(velocity, vorticity)` on the grid together
/// with the evolved profile.
pub fn lamb_vortex_2d(
    h0: &RadialProfile,
    t: f64,
    grid: &GridSpec,
) -> Result<(PhysicalField, PhysicalField, RadialProfile)> {
    let engine = RadialEngine::new(h0.r(), RadialParity::Even, OuterBoundary::Decay { tol: 1e-10 })?;
    let h = engine.evolve(h0, t, default_radial_dt(h0), None)?;
    let bs = radial_biot_savart(&h.zeros_like(), &h)?;
    let u_theta = bs.u_theta;
    let vel = PhysicalField::vector_from_fn(grid, |p| {
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return [0.0; 3];
        }
        let q = u_theta.interpolate(r) / r;
        [-p[1] * q, p[0] * q, 0.0]
    });
    let vort = PhysicalField::vector_from_fn(grid, |p| [0.0, 0.0, h.interpolate(p[0].hypot(p[1]))]);
    Ok((vel, vort, h))
}

/// Step used by closed-form helpers: `dr/4`, small enough that the
/// Crank–Nicolson time error sits below the spatial error.
fn default_radial_dt(p: &RadialProfile) -> f64 {
    p.r()[1] / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::max_divergence;
    use crate::spectral::helical_defect;

    #[test]
    fn oseen_point_values() {
        assert_eq!(oseen_u_theta(0.0, 3.0), 0.0);
        let want = (1.0 - (-1.0f64).exp()) / (4.0 * PI);
        assert!((oseen_u_theta(2.0, 0.0) - want).abs() < 1e-15);
        assert!((oseen_u_theta(2.0, 0.0) - 0.050_302_56).abs() < 1e-8);
        assert!((oseen_w(0.0, 0.0) - 0.079_577_5).abs() < 1e-7);
        assert!((shear_f(0.0, 1.0) - 0.039_788_7).abs() < 1e-7);
        assert!((heat_kernel_2d(1.0, 0.0, 0.0) - 1.0 / (4.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn swirl_rate_series_matches_closed_form() {
        for r2 in [1e-9, 1e-8 * 0.99, 1e-8 * 1.01, 1e-6] {
            let s = 1.0 + 0.5;
            let x = r2 / (4.0 * s);
            let exact = (1.0 - (-x as f64).exp()) / (2.0 * PI * r2);
            let rel = (oseen_swirl_rate(r2, 0.5) - exact).abs() / exact;
            assert!(rel < 1e-7, "r2 = {r2}: {rel}");
        }
    }

    #[test]
    fn g_is_minus_radial_derivative_of_f() {
        for &t in &[0.0, 1.0, 4.0] {
            for i in 1..50 {
                let r = i as f64 * 0.2;
                let h = 1e-4;
                let df = (shear_f(r + h, t) - shear_f(r - h, t)) / (2.0 * h);
                assert!((shear_g(r, t) + df).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_amplitude_and_envelope_limits() {
        let g = GridSpec::with_shape(64, 64, 8, 16.0, 1.0).unwrap();
        let mut spec = PerturbationSpec {
            seed: 1,
            amplitude: 0.0,
            modes: vec![1],
            sigma: 0.8,
        };
        let v = random_helical_perturbation(&spec, &g).unwrap();
        assert_eq!(h1_norm(&v), 0.0);
        spec.amplitude = 1.0;
        spec.sigma = 1.5;
        assert!(random_helical_perturbation(&spec, &g).is_err());
        spec.sigma = 0.7;
        assert!(random_helical_perturbation(&spec, &g).is_err());
    }

    #[test]
    fn perturbation_is_normalized_helical_and_solenoidal() {
        let g = GridSpec::with_shape(64, 64, 16, 32.0, 1.0).unwrap();
        let spec = PerturbationSpec {
            seed: 42,
            amplitude: 0.3,
            modes: vec![0, 1, 2],
            sigma: 2.0,
        };
        let v = random_helical_perturbation(&spec, &g).unwrap();
        assert!((h1_norm(&v) / 0.3 - 1.0).abs() < 1e-10);
        assert!(helical_defect(&v) < 1e-8);
        assert!(max_divergence(&v) < 1e-10);
    }
}
