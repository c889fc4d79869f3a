//! Frozen reference values, each derived independently of this crate from
//! the closed forms.

use helical_oseen::analytic::{
    oseen_gradient_constant, oseen_u_theta, oseen_velocity_difference, oseen_w, shear_g,
};
use helical_oseen::diagnostics::inequalities::{
    ladyzhenskaya_ratio, oseen_difference_exact, poincare_ratio,
};
use helical_oseen::spectral::ops::{grad_l2_norm, l2_norm};
use helical_oseen::spectral::transform::forward;
use helical_oseen::{GridSpec, PhysicalField};

fn close(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs(), "got {got:.16e}, want {want:.16e}");
}

#[test]
fn oseen_profiles() {
    close(oseen_u_theta(2.0, 0.0), 0.050_302_555_783_788_09, 1e-14);
    close(oseen_u_theta(3.0, 1.0), 0.035_828_299_374_944_59, 1e-14);
    close(oseen_w(0.0, 0.0), 0.079_577_471_545_947_67, 1e-15);
    close(oseen_w(2.0, 1.0), 0.024_133_088_157_513_48, 1e-14);
    close(shear_g(2.0, 1.0), 0.012_066_544_078_756_74, 1e-14);
}

#[test]
fn gradient_constant_is_attained_on_the_axis() {
    // √2/(8π)
    close(oseen_gradient_constant(), 0.056_269_769_759_819_14, 1e-12);
}

#[test]
fn oseen_difference_closed_forms() {
    let (l2, grad) = oseen_difference_exact(0.0, 1.0, 1.0);
    close(l2, 0.058_891_517_828_191_73, 1e-14);
    close(grad, 1.0 / 24.0, 1e-14);
    let (l2, grad) = oseen_difference_exact(1.0, 5.0, 2.0);
    close(l2, 0.287_682_072_451_780_85, 1e-14);
    close(grad, 1.0 / 12.0, 1e-14);
}

#[test]
fn oseen_difference_on_the_grid() {
    let g = GridSpec::with_shape(128, 128, 8, 80.0, 1.0).unwrap();
    let d = forward(&oseen_velocity_difference(0.0, 1.0, &g));
    close(l2_norm(&d).powi(2), 0.058_891_517_828_191_73, 1e-8);
    close(grad_l2_norm(&d).powi(2), 1.0 / 24.0, 1e-8);
}

#[test]
fn inequality_ratios_of_pure_modes() {
    let g = GridSpec::with_shape(16, 16, 16, 8.0, 1.0).unwrap();
    let mode = |k: f64| forward(&PhysicalField::vector_from_fn(&g, move |p| [(k * p[2]).sin(), 0.0, 0.0]));
    close(poincare_ratio(&mode(1.0)).unwrap(), 1.0, 1e-13);
    close(poincare_ratio(&mode(2.0)).unwrap(), 0.5, 1e-13);
    // (3/8)^{1/4}·√2·√L / |Ω|^{1/4} with |Ω| = 8·8·2π
    close(ladyzhenskaya_ratio(&mode(1.0)).unwrap(), 0.247_134_202_383_775_68, 1e-13);
}
