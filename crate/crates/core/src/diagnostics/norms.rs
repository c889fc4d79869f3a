use crate::analytic::oseen_velocity;
use crate::field::{PhysicalField, SpectralField};
use crate::spectral::ops::{grad_l2_norm, h1_norm, l2_norm, lap_l2_norm};
use crate::spectral::transform::{forward, inverse};

/// Norm bundle of one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub l4: f64,
    pub linf: f64,
    pub h1: f64,
    pub grad_l2: f64,
    pub lap_l2: f64,
}

/// L²-type norms via Parseval, L⁴ and L∞ from the physical samples.
pub fn norms(f: &SpectralField) -> Norms {
    let phys = inverse(f);
    Norms {
        l2: l2_norm(f),
        l4: phys.lp_norm(4.0),
        linf: phys.max_abs(),
        h1: h1_norm(f),
        grad_l2: grad_l2_norm(f),
        lap_l2: lap_l2_norm(f),
    }
}

/// `(‖v‖_{L²}, √t‖∇v‖_{L²})` for `v = u − a·u^LO(t)`, with `u` the full
/// sampled velocity.
pub fn theorem_quantities(u: &PhysicalField, a: f64, t: f64) -> (f64, f64) {
    let mut v = u.clone();
    if a != 0.0 {
        v.axpy(-a, &oseen_velocity(t, u.grid()));
    }
    let vs = forward(&v);
    (l2_norm(&vs), t.sqrt() * grad_l2_norm(&vs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn zero_field_norms() {
        let g = GridSpec::new(8, 4.0, 1.0).unwrap();
        let n = norms(&SpectralField::zeros(&g, 3));
        assert_eq!(n, Norms { l2: 0.0, l4: 0.0, linf: 0.0, h1: 0.0, grad_l2: 0.0, lap_l2: 0.0 });
    }

    #[test]
    fn h1_is_l2_plus_gradient() {
        let g = GridSpec::new(16, 6.0, 1.0).unwrap();
        let f = forward(&PhysicalField::vector_from_fn(&g, |p| {
            [(-p[0] * p[0]).exp(), (p[2]).sin() * (-p[1] * p[1]).exp(), 0.1]
        }));
        let n = norms(&f);
        assert!((n.h1 * n.h1 - n.l2 * n.l2 - n.grad_l2 * n.grad_l2).abs() < 1e-14 * n.h1 * n.h1);
    }

    #[test]
    fn exact_oseen_has_zero_theorem_quantities() {
        let g = GridSpec::new(16, 20.0, 1.0).unwrap();
        let u = oseen_velocity(2.0, &g).scaled(1.5);
        let (a, b) = theorem_quantities(&u, 1.5, 2.0);
        assert!(a < 1e-15 && b < 1e-15);
    }
}
