//! Differential operators and projections as Fourier multipliers.
//!
//! First-derivative operators use wavenumbers with the Nyquist bin zeroed so
//! that they map real fields to real fields; `|k|²`-type multipliers
//! (Laplacian, heat propagator, gradient norms) use the true wavenumber.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::field::{chunked_sum, three_mut, SpectralField};
use crate::grid::{GridSpec, Wavenumbers};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn wn(grid: &GridSpec) -> Wavenumbers {
    Wavenumbers::new(grid)
}

/// `∂/∂x_axis`: multiplication by `i·k_axis`.
pub fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    assert!(axis < 3);
    let g = *f.grid();
    let w = wn(&g);
    let mut out = f.clone();
    for comp in out.components_mut() {
        comp.par_iter_mut().enumerate().for_each(|(idx, v)| {
            let (i, j, k) = g.unravel(idx);
            *v *= I * w.k_deriv(i, j, k)[axis];
        });
    }
    out
}

/// Gradient of a scalar spectrum.
pub fn gradient(f: &SpectralField) -> SpectralField {
    assert_eq!(f.ncomp(), 1);
    SpectralField::stack([derivative(f, 0), derivative(f, 1), derivative(f, 2)])
}

pub fn divergence(u: &SpectralField) -> SpectralField {
    assert_eq!(u.ncomp(), 3);
    let g = *u.grid();
    let w = wn(&g);
    let c = u.components();
    let out: Vec<Complex64> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j, k) = g.unravel(idx);
            let kk = w.k_deriv(i, j, k);
            I * (c[0][idx] * kk[0] + c[1][idx] * kk[1] + c[2][idx] * kk[2])
        })
        .collect();
    SpectralField::from_components(&g, vec![out]).unwrap()
}

/// `i k × û`
pub fn curl(u: &SpectralField) -> SpectralField {
    assert_eq!(u.ncomp(), 3);
    let g = *u.grid();
    let w = wn(&g);
    let c = u.components();
    let mut out = SpectralField::zeros(&g, 3);
    let [o0, o1, o2] = three_mut(out.components_mut());
    o0.par_iter_mut()
        .zip(o1.par_iter_mut())
        .zip(o2.par_iter_mut())
        .enumerate()
        .for_each(|(idx, ((x, y), z))| {
            let (i, j, k) = g.unravel(idx);
            let kk = w.k_deriv(i, j, k);
            let (a, b, d) = (c[0][idx], c[1][idx], c[2][idx]);
            *x = I * (d * kk[1] - b * kk[2]);
            *y = I * (a * kk[2] - d * kk[0]);
            *z = I * (b * kk[0] - a * kk[1]);
        });
    out
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    let g = *f.grid();
    let w = wn(&g);
    let mut out = f.clone();
    out.apply_multiplier(|i, j, k| -w.k_squared(i, j, k));
    out
}

/// Exact heat propagator `e^{τΔ}`.
pub fn heat_propagate(f: &SpectralField, tau: f64) -> SpectralField {
    let g = *f.grid();
    let w = wn(&g);
    let mut out = f.clone();
    out.apply_multiplier(|i, j, k| (-w.k_squared(i, j, k) * tau).exp());
    out
}

/// Leray projection `û − k(k·û)/|k|²`; the mean mode is left unchanged.
pub fn leray_project(u: &SpectralField) -> SpectralField {
    assert_eq!(u.ncomp(), 3);
    let g = *u.grid();
    let w = wn(&g);
    let mut out = u.clone();
    let [o0, o1, o2] = three_mut(out.components_mut());
    o0.par_iter_mut()
        .zip(o1.par_iter_mut())
        .zip(o2.par_iter_mut())
        .enumerate()
        .for_each(|(idx, ((x, y), z))| {
            let (i, j, k) = g.unravel(idx);
            let kk = w.k_deriv(i, j, k);
            let k2 = kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2];
            if k2 == 0.0 {
                return;
            }
            let dot = (*x * kk[0] + *y * kk[1] + *z * kk[2]) / k2;
            *x -= dot * kk[0];
            *y -= dot * kk[1];
            *z -= dot * kk[2];
        });
    out
}

/// Vertical mean `Q`: keeps exactly the `kz = 0` modes.
pub fn vertical_mean(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    out.apply_multiplier(|_, _, k| if k == 0 { 1.0 } else { 0.0 });
    out
}

/// `(1 − Q)`: keeps the `kz ≠ 0` modes.
pub fn perp_part(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    out.apply_multiplier(|_, _, k| if k == 0 { 0.0 } else { 1.0 });
    out
}

/// Result of inverting the curl.
#[derive(Debug, Clone)]
pub struct InverseCurl {
    pub velocity: SpectralField,
    /// L² norm of the non-solenoidal part of the input that was discarded.
    pub divergence_correction: f64,
    /// L² norm of the discarded box-mean vorticity.
    pub mean_discarded: f64,
}

/// Zero-mean, divergence-free `u` with `curl u = P ω`:
/// `û = i k × ω̂ / |k|²` for `k ≠ 0`, and `û(0) = 0`.
pub fn inverse_curl(omega: &SpectralField) -> InverseCurl {
    assert_eq!(omega.ncomp(), 3);
    let g = *omega.grid();
    let w = wn(&g);
    let projected = leray_project(omega);
    let mut grad_part = omega.sub(&projected);
    let mut mean = SpectralField::zeros(&g, 3);
    for c in 0..3 {
        mean.component_mut(c)[0] = omega.component(c)[0];
        grad_part.component_mut(c)[0] = Complex64::new(0.0, 0.0);
    }
    let c = projected.components();
    let mut out = SpectralField::zeros(&g, 3);
    let [o0, o1, o2] = three_mut(out.components_mut());
    o0.par_iter_mut()
        .zip(o1.par_iter_mut())
        .zip(o2.par_iter_mut())
        .enumerate()
        .for_each(|(idx, ((x, y), z))| {
            let (i, j, k) = g.unravel(idx);
            let kk = w.k_deriv(i, j, k);
            let k2 = kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2];
            if k2 == 0.0 {
                return;
            }
            let (a, b, d) = (c[0][idx], c[1][idx], c[2][idx]);
            *x = I * (d * kk[1] - b * kk[2]) / k2;
            *y = I * (a * kk[2] - d * kk[0]) / k2;
            *z = I * (b * kk[0] - a * kk[1]) / k2;
        });
    InverseCurl {
        velocity: out,
        divergence_correction: l2_norm(&grad_part),
        mean_discarded: l2_norm(&mean),
    }
}

/// Largest retained mode number per axis under the 2/3 rule.
pub fn dealias_cutoff(grid: &GridSpec) -> [i64; 3] {
    [
        (grid.nx / 3) as i64,
        (grid.ny / 3) as i64,
        (grid.nz / 3) as i64,
    ]
}

/// 2/3-rule truncation: zero every coefficient with some `|m_i| > ⌊n_i/3⌋`.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_inplace(&mut out);
    out
}

pub fn dealias_inplace(f: &mut SpectralField) {
    let g = *f.grid();
    let w = wn(&g);
    let cut = dealias_cutoff(&g);
    f.apply_multiplier(|i, j, k| {
        let m = [w.modes[0][i], w.modes[1][j], w.modes[2][k]];
        if m[0].abs() > cut[0] || m[1].abs() > cut[1] || m[2].abs() > cut[2] {
            0.0
        } else {
            1.0
        }
    });
}

/// Largest coefficient magnitude outside the 2/3 band.
pub fn max_above_cutoff(f: &SpectralField) -> f64 {
    let g = *f.grid();
    let w = wn(&g);
    let cut = dealias_cutoff(&g);
    f.components()
        .iter()
        .map(|comp| {
            comp.par_iter()
                .enumerate()
                .map(|(idx, v)| {
                    let (i, j, k) = g.unravel(idx);
                    let m = [w.modes[0][i], w.modes[1][j], w.modes[2][k]];
                    if m[0].abs() > cut[0] || m[1].abs() > cut[1] || m[2].abs() > cut[2] {
                        v.norm()
                    } else {
                        0.0
                    }
                })
                .reduce(|| 0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Parseval weight: `‖f‖² = (V/N²) Σ |f̂|²` for the unnormalized forward FFT.
fn parseval_weight(g: &GridSpec) -> f64 {
    let n = g.len() as f64;
    g.volume() / (n * n)
}

/// `Σ_k weight(k)·|f̂(k)|²` scaled to an L² integral.
fn weighted_energy<F>(f: &SpectralField, weight: F) -> f64
where
    F: Fn(usize, usize, usize) -> f64 + Sync,
{
    let g = *f.grid();
    let total: f64 = f
        .components()
        .iter()
        .map(|comp| {
            let terms: Vec<f64> = comp
                .par_iter()
                .enumerate()
                .map(|(idx, v)| {
                    let (i, j, k) = g.unravel(idx);
                    weight(i, j, k) * v.norm_sqr()
                })
                .collect();
            chunked_sum(&terms, |x| *x)
        })
        .sum();
    total * parseval_weight(&g)
}

pub fn l2_norm(f: &SpectralField) -> f64 {
    weighted_energy(f, |_, _, _| 1.0).sqrt()
}

/// `‖∇f‖_{L²}` (all components).
pub fn grad_l2_norm(f: &SpectralField) -> f64 {
    let w = wn(f.grid());
    weighted_energy(f, |i, j, k| w.k_squared(i, j, k)).sqrt()
}

pub fn lap_l2_norm(f: &SpectralField) -> f64 {
    let w = wn(f.grid());
    weighted_energy(f, |i, j, k| w.k_squared(i, j, k).powi(2)).sqrt()
}

/// `‖∇Δf‖_{L²}`
pub fn grad_lap_l2_norm(f: &SpectralField) -> f64 {
    let w = wn(f.grid());
    weighted_energy(f, |i, j, k| w.k_squared(i, j, k).powi(3)).sqrt()
}

pub fn h1_norm(f: &SpectralField) -> f64 {
    let w = wn(f.grid());
    weighted_energy(f, |i, j, k| 1.0 + w.k_squared(i, j, k)).sqrt()
}

/// Real L² inner product `∫ f·g`.
pub fn inner(f: &SpectralField, h: &SpectralField) -> f64 {
    assert_eq!(f.ncomp(), h.ncomp());
    let g = *f.grid();
    let total: f64 = f
        .components()
        .iter()
        .zip(h.components())
        .map(|(a, b)| {
            let terms: Vec<f64> = a.par_iter().zip(b.par_iter()).map(|(x, y)| (x * y.conj()).re).collect();
            chunked_sum(&terms, |x| *x)
        })
        .sum();
    total * parseval_weight(&g)
}

/// Largest |∇·u| over the grid, evaluated spectrally.
pub fn max_divergence(u: &SpectralField) -> f64 {
    let d = divergence(u);
    super::transform::inverse(&d).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PhysicalField;
    use crate::spectral::transform::{forward, inverse};
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::with_shape(16, 16, 12, 6.0, 0.7).unwrap()
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid();
        let lx = g.lx;
        let kx = 2.0 * PI / lx;
        let f = PhysicalField::scalar_from_fn(&g, |p| (kx * p[0]).sin());
        let d = inverse(&derivative(&forward(&f), 0));
        let want = PhysicalField::scalar_from_fn(&g, |p| kx * (kx * p[0]).cos());
        assert!(d.sub(&want).max_abs() < 1e-12);
    }

    #[test]
    fn laplacian_of_constant_and_dz_of_column() {
        let g = grid();
        let c = forward(&PhysicalField::scalar_from_fn(&g, |_| 2.5));
        assert!(inverse(&laplacian(&c)).max_abs() < 1e-12);
        let col = forward(&PhysicalField::scalar_from_fn(&g, |p| (-(p[0] * p[0] + p[1] * p[1])).exp()));
        assert!(inverse(&derivative(&col, 2)).max_abs() < 1e-14);
    }

    #[test]
    fn gradients_are_annihilated() {
        let g = grid();
        let phi = PhysicalField::scalar_from_fn(&g, |p| {
            (-(p[0] * p[0] + p[1] * p[1])).exp() * (p[2] / 0.7).cos()
        });
        let grad = gradient(&dealias(&forward(&phi)));
        assert!(l2_norm(&leray_project(&grad)) < 1e-12 * l2_norm(&grad).max(1.0));
    }

    #[test]
    fn sin_z_is_pure_perp() {
        let g = grid();
        let pitch = g.pitch;
        let u = forward(&PhysicalField::vector_from_fn(&g, |p| [(p[2] / pitch).sin(), 0.0, 0.0]));
        assert!(l2_norm(&vertical_mean(&u)) < 1e-12);
        assert!((l2_norm(&perp_part(&u)) - l2_norm(&u)).abs() < 1e-12);
    }

    #[test]
    fn zero_vorticity_gives_zero_velocity() {
        let g = grid();
        let inv = inverse_curl(&SpectralField::zeros(&g, 3));
        assert_eq!(l2_norm(&inv.velocity), 0.0);
        assert_eq!(inv.divergence_correction, 0.0);
    }

    #[test]
    fn single_mode_norm_is_half_volume() {
        let g = grid();
        let kx = 2.0 * PI * 2.0 / g.lx;
        let f = forward(&PhysicalField::scalar_from_fn(&g, |p| (kx * p[0]).cos()));
        assert!((l2_norm(&f) - (g.volume() / 2.0).sqrt()).abs() < 1e-12);
        assert!((grad_l2_norm(&f) - kx * (g.volume() / 2.0).sqrt()).abs() < 1e-11);
    }
}
