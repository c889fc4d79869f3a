//! One row of the monitored time series.

use crate::analytic::oseen_w;
use crate::error::Result;
use crate::field::{PhysicalField, SpectralField};
use crate::spectral::helical::helical_defect;
use crate::spectral::ops::{
    curl, grad_l2_norm, l2_norm, lap_l2_norm, max_divergence, perp_part, vertical_mean,
};
use crate::spectral::transform::inverse;

use super::inequalities::source_term;

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 15] = [
    "t",
    "l2_v",
    "l2_grad_v",
    "sqrt_t_l2_grad_v",
    "l2_uperp",
    "l2_grad_uperp",
    "l2_lap_uperp",
    "l2_Nbar",
    "helical_defect",
    "max_div",
    "circulation_a",
    "cum_enstrophy",
    "k_perp",
    "K_perp",
    "Kcal_perp",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2_v: f64,
    pub l2_grad_v: f64,
    pub sqrt_t_l2_grad_v: f64,
    pub l2_uperp: f64,
    pub l2_grad_uperp: f64,
    pub l2_lap_uperp: f64,
    pub l2_nbar: f64,
    pub helical_defect: f64,
    pub max_div: f64,
    pub circulation_a: f64,
    /// `∫₀ᵗ ‖∇v‖² ds`, trapezoid over output times.
    pub cum_enstrophy: f64,
    /// `(2C₀/L)‖∇ū‖²`
    pub k_perp: f64,
    /// `(8C₀/L)‖∇u‖²`
    pub big_k_perp: f64,
    /// `(36C₀/L)‖∇u‖²`
    pub kcal_perp: f64,
    /// `|‖v‖² − ‖Qv‖² − ‖(1−Q)v‖²| / ‖v‖²`; not written to CSV.
    pub pythagoras_defect: f64,
}

impl DiagnosticsRecord {
    /// Evaluates every column for the perturbation `v` at time `t` around
    /// `a·u^LO(t)`. `prev` continues the cumulative enstrophy integral.
    pub fn compute(
        v: &SpectralField,
        t: f64,
        a: f64,
        c0: f64,
        prev: Option<&DiagnosticsRecord>,
    ) -> Result<Self> {
        let g = *v.grid();
        let l2_v = l2_norm(v);
        let l2_grad_v = grad_l2_norm(v);

        // u^LO is independent of z, so (1−Q)u = (1−Q)v.
        let vbar = vertical_mean(v);
        let uperp = perp_part(v);
        let l2_uperp = l2_norm(&uperp);
        let grad_uperp = grad_l2_norm(&uperp);
        let l2_nbar = if l2_uperp > 0.0 { l2_norm(&source_term(&uperp)) } else { 0.0 };

        // ‖∇ū‖² = ‖∇v̄‖² + 2a⟨ω_z(v̄), w^LO⟩ + a²‖w^LO‖²; the cross term
        // uses ⟨∇f, ∇h⟩ = ⟨curl f, curl h⟩ for solenoidal fields.
        let grad_vbar_sq = grad_l2_norm(&vbar).powi(2);
        let mut grad_ubar_sq = grad_vbar_sq;
        if a != 0.0 {
            let s = 1.0 + t;
            let wz = inverse(&curl(&vbar).extract(2));
            let wo = PhysicalField::scalar_from_fn(&g, |p| oseen_w(p[0].hypot(p[1]), t));
            let prod: Vec<f64> =
                wz.component(0).iter().zip(wo.component(0)).map(|(x, y)| x * y).collect();
            let cross = crate::field::chunked_sum(&prod, |x| *x) * g.cell_volume();
            grad_ubar_sq += 2.0 * a * cross + a * a * g.pitch / (4.0 * s);
        }
        let grad_u_sq = grad_ubar_sq + grad_uperp * grad_uperp;
        let pitch = g.pitch;

        let energy = l2_v * l2_v;
        let pythagoras_defect = if energy > 0.0 {
            (energy - l2_norm(&vbar).powi(2) - l2_uperp * l2_uperp).abs() / energy
        } else {
            0.0
        };

        let cum_enstrophy = match prev {
            Some(p) => p.cum_enstrophy + 0.5 * (t - p.t) * (p.l2_grad_v.powi(2) + l2_grad_v.powi(2)),
            None => 0.0,
        };

        Ok(DiagnosticsRecord {
            t,
            l2_v,
            l2_grad_v,
            sqrt_t_l2_grad_v: t.sqrt() * l2_grad_v,
            l2_uperp,
            l2_grad_uperp: grad_uperp,
            l2_lap_uperp: lap_l2_norm(&uperp),
            l2_nbar,
            helical_defect: helical_defect(v),
            max_div: max_divergence(v),
            circulation_a: a,
            cum_enstrophy,
            k_perp: 2.0 * c0 / pitch * grad_ubar_sq.max(0.0),
            big_k_perp: 8.0 * c0 / pitch * grad_u_sq.max(0.0),
            kcal_perp: 36.0 * c0 / pitch * grad_u_sq.max(0.0),
            pythagoras_defect,
        })
    }

    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    pub fn values(&self) -> [f64; 15] {
        [
            self.t,
            self.l2_v,
            self.l2_grad_v,
            self.sqrt_t_l2_grad_v,
            self.l2_uperp,
            self.l2_grad_uperp,
            self.l2_lap_uperp,
            self.l2_nbar,
            self.helical_defect,
            self.max_div,
            self.circulation_a,
            self.cum_enstrophy,
            self.k_perp,
            self.big_k_perp,
            self.kcal_perp,
        ]
    }

    /// 17 significant digits, round-trips exactly.
    pub fn csv_row(&self) -> String {
        self.values().iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
    }

    pub fn from_csv_row(line: &str) -> Option<Self> {
        let vals: Vec<f64> = line.split(',').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?;
        if vals.len() != CSV_COLUMNS.len() {
            return None;
        }
        Some(DiagnosticsRecord {
            t: vals[0],
            l2_v: vals[1],
            l2_grad_v: vals[2],
            sqrt_t_l2_grad_v: vals[3],
            l2_uperp: vals[4],
            l2_grad_uperp: vals[5],
            l2_lap_uperp: vals[6],
            l2_nbar: vals[7],
            helical_defect: vals[8],
            max_div: vals[9],
            circulation_a: vals[10],
            cum_enstrophy: vals[11],
            k_perp: vals[12],
            big_k_perp: vals[13],
            kcal_perp: vals[14],
            pythagoras_defect: f64::NAN,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::spectral::transform::forward;

    #[test]
    fn zero_perturbation_row() {
        let g = GridSpec::new(16, 20.0, 1.0).unwrap();
        let r = DiagnosticsRecord::compute(&SpectralField::zeros(&g, 3), 1.0, 1.0, 2.0, None).unwrap();
        assert_eq!(r.l2_v, 0.0);
        assert_eq!(r.l2_nbar, 0.0);
        // ‖∇(a u^LO)‖² = a² L/(4(1+t))
        assert!((r.k_perp - 2.0 * 2.0 * 1.0 / 8.0).abs() < 1e-15);
        assert_eq!(r.big_k_perp * 36.0, r.kcal_perp * 8.0);
    }

    #[test]
    fn csv_round_trip_and_sqrt_column() {
        let g = GridSpec::new(16, 8.0, 1.0).unwrap();
        let v = forward(&PhysicalField::vector_from_fn(&g, |p| {
            let e = (-(p[0] * p[0] + p[1] * p[1])).exp();
            [e * p[2].sin(), 0.0, e]
        }));
        let r0 = DiagnosticsRecord::compute(&v, 0.0, 0.5, 1.0, None).unwrap();
        let r = DiagnosticsRecord::compute(&v, 2.0, 0.5, 1.0, Some(&r0)).unwrap();
        assert!((r.sqrt_t_l2_grad_v - 2f64.sqrt() * r.l2_grad_v).abs() <= 1e-14 * r.sqrt_t_l2_grad_v);
        assert!((r.cum_enstrophy - 2.0 * r.l2_grad_v.powi(2)).abs() < 1e-12 * r.cum_enstrophy);
        assert!(r.pythagoras_defect < 1e-12);
        let back = DiagnosticsRecord::from_csv_row(&r.csv_row()).unwrap();
        assert_eq!(back.values(), r.values());
        assert_eq!(DiagnosticsRecord::csv_header().split(',').count(), 15);
    }
}
