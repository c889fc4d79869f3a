//! Radial profiles and one-dimensional quadrature.

mod profile;

pub use profile::RadialProfile;

/// Adaptive double-exponential quadrature of `f` on `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    quadrature::integrate(f, a, b, tol).integral
}

/// `∫_a^∞ f(r) dr`, mapped to a finite interval by `r = a + s/(1 − s)`.
///
/// The integrand is split at `a + scale` so that a localized bump near the
/// origin is resolved independently of a slowly decaying tail.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: f64) -> f64 {
    let head = integrate(&f, a, a + scale, tol);
    let b = a + scale;
    let tail = integrate(
        |s: f64| {
            if s >= 1.0 {
                return 0.0;
            }
            let r = b + scale * s / (1.0 - s);
            let v = f(r) * scale / ((1.0 - s) * (1.0 - s));
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    );
    head + tail
}

/// `(2π·2πL ∫₀^∞ (1 + r²)^m f(r)² r dr)^{1/2}`: the `L²_m(Ω)` norm of an
/// axisymmetric, z-independent function given in closed form.
pub fn weighted_l2m_norm_fn<F: Fn(f64) -> f64>(f: F, m: f64, pitch: f64, scale: f64) -> f64 {
    let i = integrate_to_infinity(
        |r| {
            let v = f(r);
            (1.0 + r * r).powf(m) * v * v * r
        },
        0.0,
        scale,
        1e-14,
    );
    (4.0 * std::f64::consts::PI * std::f64::consts::PI * pitch * i).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_moments() {
        // ∫₀^∞ e^{−r²/4} r dr = 2
        let v = integrate_to_infinity(|r| (-r * r / 4.0).exp() * r, 0.0, 5.0, 1e-14);
        assert!((v - 2.0).abs() < 1e-12);
        // ∫₀^∞ (1 + r²)^{-2} r dr = 1/2
        let v = integrate_to_infinity(|r| r / (1.0 + r * r).powi(2), 0.0, 5.0, 1e-14);
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn weighted_norm_of_oseen_at_m_zero() {
        // ‖w^LO(0)‖² over one period = 2πL/(8π)
        let w = |r: f64| (-r * r / 4.0).exp() / (4.0 * PI);
        let n = weighted_l2m_norm_fn(w, 0.0, 1.0, 10.0);
        assert!((n * n - 2.0 * PI / (8.0 * PI)).abs() < 1e-13);
    }
}
