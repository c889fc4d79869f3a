//! Functions of radius on a 1-D grid.

use crate::error::{Error, Result};

/// Gauss–Legendre nodes/weights on [0, 1], exact for cubics.
const GL3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_3, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// Samples `values[i] = f(r[i])` on a strictly increasing grid with `r[0] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    r: Vec<f64>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r.len() != values.len() {
            return Err(Error::Shape {
                expected: format!("{} values", r.len()),
                found: format!("{}", values.len()),
            });
        }
        if r.len() < 4 {
            return Err(Error::Precondition("a radial grid needs at least 4 nodes".into()));
        }
        if r[0] != 0.0 {
            return Err(Error::Precondition("radial grid must start at r = 0".into()));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("radial grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "radial profile".into(),
            });
        }
        Ok(RadialProfile { r, values })
    }

    /// `n + 1` equispaced nodes on `[0, r_max]`.
    pub fn uniform_grid(n: usize, r_max: f64) -> Vec<f64> {
        let dr = r_max / n as f64;
        (0..=n).map(|i| i as f64 * dr).collect()
    }

    /// Nodes `r_max·sinh(βs)/sinh(β)`, `s = i/n`, clustered near the axis.
    pub fn graded_grid(n: usize, r_max: f64, beta: f64) -> Vec<f64> {
        if beta == 0.0 {
            return Self::uniform_grid(n, r_max);
        }
        (0..=n)
            .map(|i| r_max * (beta * i as f64 / n as f64).sinh() / beta.sinh())
            .collect()
    }

    pub fn from_fn<F: Fn(f64) -> f64>(r: Vec<f64>, f: F) -> Result<Self> {
        let values = r.iter().map(|&x| f(x)).collect();
        Self::new(r, values)
    }

    pub fn zeros_like(&self) -> Self {
        RadialProfile {
            r: self.r.clone(),
            values: vec![0.0; self.r.len()],
        }
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.r.clone(), values)
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Spacing if the grid is uniform (to rounding), else `None`.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let n = self.r.len() - 1;
        let dr = self.r_max() / n as f64;
        let uniform = self
            .r
            .iter()
            .enumerate()
            .all(|(i, &x)| (x - i as f64 * dr).abs() <= 1e-12 * self.r_max());
        uniform.then_some(dr)
    }

    pub fn map<F: Fn(f64, f64) -> f64>(&self, f: F) -> Self {
        RadialProfile {
            r: self.r.clone(),
            values: self.r.iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Four-node stencil start used for interval `[r_i, r_{i+1}]`.
    fn stencil_start(&self, i: usize) -> usize {
        let n = self.r.len();
        i.saturating_sub(1).min(n - 4)
    }

    /// Cubic Lagrange interpolation on the nearest four nodes.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= 0.0 {
            return self.values[0];
        }
        if x >= self.r_max() {
            return self.values[n - 1];
        }
        let i = match self.r.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let s = self.stencil_start(i);
        lagrange_eval(&self.r[s..s + 4], &self.values[s..s + 4], x)
    }

    /// Weights `w_i` such that `Σ w_i g(r_i) ≈ ∫₀^R g dr`, built from the
    /// per-interval cubic rule of [`Self::cumulative_integral`].
    pub fn line_weights(&self) -> Vec<f64> {
        let n = self.r.len();
        let mut w = vec![0.0; n];
        for i in 0..n - 1 {
            let s = self.stencil_start(i);
            let iw = interval_weights(&self.r[s..s + 4], self.r[i], self.r[i + 1]);
            for (k, v) in iw.iter().enumerate() {
                w[s + k] += v;
            }
        }
        w
    }

    /// Weights for `∫₀^R f(r) r dr`.
    pub fn area_weights(&self) -> Vec<f64> {
        self.line_weights()
            .into_iter()
            .zip(&self.r)
            .map(|(w, r)| w * r)
            .collect()
    }

    /// `∫₀^R f r dr` (no tail).
    pub fn integrate_r(&self) -> f64 {
        self.area_weights().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    /// Running integral `I_i = ∫₀^{r_i} g(ρ) dρ` of the samples `g` on this
    /// grid, fourth order on smooth data.
    pub fn cumulative_integral(&self, g: &[f64]) -> Vec<f64> {
        assert_eq!(g.len(), self.r.len());
        let n = self.r.len();
        let mut out = vec![0.0; n];
        for i in 0..n - 1 {
            let s = self.stencil_start(i);
            let iw = interval_weights(&self.r[s..s + 4], self.r[i], self.r[i + 1]);
            let inc: f64 = iw.iter().zip(&g[s..s + 4]).map(|(w, v)| w * v).sum();
            out[i + 1] = out[i] + inc;
        }
        out
    }

    /// `∫_R^∞ f(ρ) ρ^moment dρ` estimated from a local power-law fit of the
    /// last two samples. Returns `None` when the fitted tail is not
    /// integrable (non-decaying data).
    pub fn tail_integral(&self, moment: f64) -> Option<f64> {
        let n = self.r.len();
        let (r1, r2) = (self.r[n - 2], self.r[n - 1]);
        let (f1, f2) = (self.values[n - 2], self.values[n - 1]);
        if f2 == 0.0 {
            return Some(0.0);
        }
        if f1 == 0.0 || f1.signum() != f2.signum() {
            // Oscillating or just crossed zero: no usable power law.
            return Some(0.0);
        }
        let p = -(f2 / f1).ln() / (r2 / r1).ln();
        let q = p - moment;
        if q <= 1.0 {
            return None;
        }
        Some(f2 * r2.powf(moment + 1.0) / (q - 1.0))
    }

    /// Two-column CSV `r,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,value\n");
        for (r, v) in self.r.iter().zip(&self.values) {
            s.push_str(&format!("{r:.16e},{v:.16e}\n"));
        }
        s
    }
}

fn lagrange_eval(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..xs.len() {
        let mut l = 1.0;
        for j in 0..xs.len() {
            if i != j {
                l *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        sum += l * ys[i];
    }
    sum
}

/// `∫_a^b ℓ_k(x) dx` for the Lagrange basis on four nodes.
fn interval_weights(xs: &[f64], a: f64, b: f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    let h = b - a;
    for &(s, gw) in &GL3 {
        let x = a + s * h;
        for (k, wk) in w.iter_mut().enumerate() {
            let mut l = 1.0;
            for j in 0..4 {
                if j != k {
                    l *= (x - xs[j]) / (xs[k] - xs[j]);
                }
            }
            *wk += gw * h * l;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(RadialProfile::new(vec![0.1, 0.2, 0.3, 0.4], vec![0.0; 4]).is_err());
        assert!(RadialProfile::new(vec![0.0, 0.2, 0.2, 0.4], vec![0.0; 4]).is_err());
        assert!(RadialProfile::new(vec![0.0, 0.2, 0.3, 0.4], vec![0.0; 3]).is_err());
    }

    #[test]
    fn weights_integrate_cubics_exactly() {
        for r in [
            RadialProfile::uniform_grid(10, 3.0),
            RadialProfile::graded_grid(13, 3.0, 2.0),
        ] {
            let p = RadialProfile::from_fn(r, |x| 1.0 - 2.0 * x + 0.5 * x * x).unwrap();
            // ∫₀³ (1 − 2r + r²/2) r dr = 9/2 − 18 + 81/8
            let exact = 4.5 - 18.0 + 81.0 / 8.0;
            assert!((p.integrate_r() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let p = RadialProfile::from_fn(RadialProfile::graded_grid(20, 5.0, 1.5), |x| x * x * x - x).unwrap();
        for x in [0.01, 0.7, 2.345, 4.99] {
            assert!((p.interpolate(x) - (x * x * x - x)).abs() < 1e-11);
        }
    }

    #[test]
    fn power_law_tail() {
        let p = RadialProfile::from_fn(RadialProfile::uniform_grid(100, 50.0), |x| if x == 0.0 { 1.0 } else { x.powi(-3) }).unwrap();
        // ∫_50^∞ ρ^{-3} ρ dρ = 1/50
        let t = p.tail_integral(1.0).unwrap();
        assert!((t - 1.0 / 50.0).abs() < 1e-12);
        let flat = RadialProfile::from_fn(RadialProfile::uniform_grid(10, 5.0), |_| 1.0).unwrap();
        assert!(flat.tail_integral(1.0).is_none());
    }
}
