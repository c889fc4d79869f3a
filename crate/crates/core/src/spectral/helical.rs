//! Helical-symmetry defect.
//!
//! A field is helical when its cylindrical components about the axis are
//! annihilated by `D = ∂_θ + L∂_z`, with `∂_θ = x∂_y − y∂_x` in centred
//! coordinates. Differentiating the frame vectors `e_r`, `e_θ` along `θ`
//! shows that the cylindrical components of the defect are the rotated
//! components of the Cartesian vector `D u − R u`, where
//! `R u = (−u_y, u_x, 0)` is the infinitesimal rotation. Since rotation
//! preserves pointwise magnitude, the L² norm can be taken on Cartesian
//! components directly, avoiding the coordinate singularity at `r = 0`.

use rayon::prelude::*;

use crate::field::{PhysicalField, SpectralField};
use crate::spectral::ops::{derivative, h1_norm};
use crate::spectral::transform::inverse;

/// Cartesian representation of the helical defect field: `D u − R u` for a
/// vector field, `D f` for a scalar.
pub fn helical_derivative(u: &SpectralField) -> PhysicalField {
    let g = *u.grid();
    let pitch = g.pitch;
    let dx = inverse(&derivative(u, 0));
    let dy = inverse(&derivative(u, 1));
    let dz = inverse(&derivative(u, 2));
    let phys = if u.ncomp() == 3 { Some(inverse(u)) } else { None };
    let mut out = PhysicalField::zeros(&g, u.ncomp());
    for c in 0..u.ncomp() {
        let (ax, ay, az) = (dx.component(c), dy.component(c), dz.component(c));
        let rot: Option<&[f64]> = phys.as_ref().and_then(|p| match c {
            0 => Some(p.component(1)),
            1 => Some(p.component(0)),
            _ => None,
        });
        let sign = if c == 0 { 1.0 } else { -1.0 };
        out.component_mut(c)
            .par_iter_mut()
            .enumerate()
            .for_each(|(idx, o)| {
                let [x, y, _] = g.centered_at(idx);
                let mut v = x * ay[idx] - y * ax[idx] + pitch * az[idx];
                if let Some(r) = rot {
                    // −(R u)_x = +u_y, −(R u)_y = −u_x
                    v += sign * r[idx];
                }
                *o = v;
            });
    }
    out
}

/// Masked helical defect `‖(D − R)u‖_{L²(r ≤ radius)} / ‖u‖_{H¹}`.
/// Returns 0 for the zero field.
pub fn helical_defect_masked(u: &SpectralField, radius: f64) -> f64 {
    let norm = h1_norm(u);
    if norm == 0.0 {
        return 0.0;
    }
    helical_derivative(u).masked_l2(radius) / norm
}

/// Helical defect with the default mask `r ≤ Lx/4`.
pub fn helical_defect(u: &SpectralField) -> f64 {
    helical_defect_masked(u, u.grid().mask_radius())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::spectral::transform::forward;

    // dx = 1/4 resolves the unit Gaussians below to round-off
    fn g() -> GridSpec {
        GridSpec::with_shape(64, 64, 16, 16.0, 1.0).unwrap()
    }

    fn gaussian(x: f64, y: f64) -> f64 {
        (-(x * x + y * y) / 2.0).exp()
    }

    #[test]
    fn zero_field_has_zero_defect() {
        assert_eq!(helical_defect(&SpectralField::zeros(&g(), 3)), 0.0);
    }

    #[test]
    fn helical_mode_vs_antihelical_mode() {
        let grid = g();
        let l = grid.pitch;
        // cos(θ − z/L)·g(r) with g(r) = r·e^{−r²/2}, written in Cartesian form.
        let helical = PhysicalField::vector_from_fn(&grid, |p| {
            let (c, s) = ((p[2] / l).cos(), (p[2] / l).sin());
            [0.0, 0.0, (p[0] * c + p[1] * s) * gaussian(p[0], p[1])]
        });
        let anti = PhysicalField::vector_from_fn(&grid, |p| {
            let (c, s) = ((p[2] / l).cos(), (p[2] / l).sin());
            [0.0, 0.0, (p[0] * c - p[1] * s) * gaussian(p[0], p[1])]
        });
        assert!(helical_defect(&forward(&helical)) < 1e-8);
        assert!(helical_defect(&forward(&anti)) > 0.1);
    }

    #[test]
    fn rigid_rotation_is_helical() {
        // u = e^{−r²/2}·(−y, x, 0) is a radial swirl.
        let grid = g();
        let u = PhysicalField::vector_from_fn(&grid, |p| {
            let e = gaussian(p[0], p[1]);
            [-p[1] * e, p[0] * e, 0.0]
        });
        assert!(helical_defect(&forward(&u)) < 1e-10);
    }
}
