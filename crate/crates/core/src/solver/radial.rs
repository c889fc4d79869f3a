//! Crank–Nicolson engine for the radial heat operator
//! `∂_t h = h'' + h'/r − n²h/r² + S(t, r)` on a uniform grid `r_i = i·dr`.
//!
//! `n = 0` profiles (axial vorticity, axial velocity) are even in `r`;
//! `n = 1` profiles (azimuthal velocity) are odd and vanish on the axis.
//! Ghost values across the axis use that parity. The default spatial
//! stencil is the fourth-order five-point one, which makes the implicit
//! system pentadiagonal; the classical three-point stencil is kept for
//! comparison.

use crate::error::{Error, Result};
use crate::radial::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialParity {
    /// Azimuthal order 0: `h(−r) = h(r)`.
    Even,
    /// Azimuthal order 1: `h(−r) = −h(r)`, `h(0) = 0`.
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterBoundary {
    /// Profile must have decayed: `max |h|` over the outer 5% of the grid is
    /// checked against `tol·max|h|`, and `h(R) = 0` is imposed.
    Decay { tol: f64 },
    /// `h(R)` held at its initial value (slowly decaying far fields).
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Second,
    Fourth,
}

#[derive(Debug, Clone)]
pub struct RadialEngine {
    r: Vec<f64>,
    dr: f64,
    parity: RadialParity,
    outer: OuterBoundary,
    stencil: Stencil,
    /// Operator rows, coefficients at offsets −2..=2.
    rows: Vec<[f64; 5]>,
}

const D2_4: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const D1_4: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2_2: [f64; 5] = [0.0, 1.0, -2.0, 1.0, 0.0];
const D1_2: [f64; 5] = [0.0, -0.5, 0.0, 0.5, 0.0];

impl RadialEngine {
    pub fn new(r: &[f64], parity: RadialParity, outer: OuterBoundary) -> Result<Self> {
        let probe = RadialProfile::new(r.to_vec(), vec![0.0; r.len()])?;
        let dr = probe.uniform_spacing().ok_or_else(|| {
            Error::Precondition("the radial engine needs a uniform grid".into())
        })?;
        if r.len() < 8 {
            return Err(Error::Precondition("the radial engine needs at least 8 nodes".into()));
        }
        let mut e = RadialEngine {
            r: r.to_vec(),
            dr,
            parity,
            outer,
            stencil: Stencil::Fourth,
            rows: Vec::new(),
        };
        e.build();
        Ok(e)
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self.build();
        self
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    fn last(&self) -> usize {
        self.r.len() - 1
    }

    fn is_fixed(&self, i: usize) -> bool {
        i == self.last() || (i == 0 && self.parity == RadialParity::Odd)
    }

    fn build(&mut self) {
        let n = self.r.len();
        let last = n - 1;
        let dr2 = self.dr * self.dr;
        let sign = match self.parity {
            RadialParity::Even => 1.0,
            RadialParity::Odd => -1.0,
        };
        let mut rows = vec![[0.0; 5]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            if self.is_fixed(i) {
                continue;
            }
            let (d2, d1) = if self.stencil == Stencil::Fourth && i + 2 <= last {
                (D2_4, D1_4)
            } else {
                (D2_2, D1_2)
            };
            let mut full = [0.0; 5];
            if i == 0 {
                // Even parity on the axis: h'' + h'/r → 2h''(0).
                for o in 0..5 {
                    full[o] = 2.0 * d2[o] / dr2;
                }
            } else {
                let r = self.r[i];
                for o in 0..5 {
                    full[o] = d2[o] / dr2 + d1[o] / (self.dr * r);
                }
                if self.parity == RadialParity::Odd {
                    full[2] -= 1.0 / (r * r);
                }
            }
            // Fold ghost nodes j < 0 onto −j with the parity sign.
            for (o, &c) in full.iter().enumerate() {
                let j = i as i64 + o as i64 - 2;
                if c == 0.0 {
                    continue;
                }
                let (jj, s) = if j < 0 { ((-j) as usize, sign) } else { (j as usize, 1.0) };
                let off = jj as i64 - i as i64 + 2;
                row[off as usize] += s * c;
            }
        }
        self.rows = rows;
    }

    /// Discrete operator `A h` (zero on fixed nodes).
    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        let n = self.r.len();
        let mut out = vec![0.0; n];
        for (i, row) in self.rows.iter().enumerate() {
            let mut s = 0.0;
            for (o, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    s += c * h[i + o - 2];
                }
            }
            out[i] = s;
        }
        out
    }

    /// One Crank–Nicolson step. `source` holds `(S(t_n), S(t_{n+1}))`;
    /// `boundary` is the imposed value at `R`.
    pub fn step(&self, h: &[f64], dt: f64, source: Option<(&[f64], &[f64])>, boundary: f64) -> Vec<f64> {
        let n = self.r.len();
        let ah = self.apply(h);
        let mut band = vec![[0.0; 5]; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            if self.is_fixed(i) {
                band[i][2] = 1.0;
                rhs[i] = if i == 0 { 0.0 } else { boundary };
                continue;
            }
            for o in 0..5 {
                band[i][o] = -0.5 * dt * self.rows[i][o];
            }
            band[i][2] += 1.0;
            rhs[i] = h[i] + 0.5 * dt * ah[i];
            if let Some((s0, s1)) = source {
                rhs[i] += 0.5 * dt * (s0[i] + s1[i]);
            }
        }
        solve_pentadiagonal(&mut band, &mut rhs);
        rhs
    }

    fn boundary_value(&self, h0: &[f64]) -> f64 {
        match self.outer {
            OuterBoundary::Decay { .. } => 0.0,
            OuterBoundary::Frozen => h0[self.last()],
        }
    }

    fn check_decay(&self, h: &[f64], scale: f64) -> Result<()> {
        if let OuterBoundary::Decay { tol } = self.outer {
            if scale == 0.0 {
                return Ok(());
            }
            let start = self.r.len() - (self.r.len() / 20).max(2);
            let edge = h[start..].iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale;
            if edge > tol {
                return Err(Error::DomainTooSmall { value: edge, tolerance: tol });
            }
        }
        Ok(())
    }

    /// Advances `h0` to `t_end` with uniform steps of at most `dt`.
    pub fn evolve(
        &self,
        h0: &RadialProfile,
        t_end: f64,
        dt: f64,
        source: Option<&dyn Fn(f64) -> Vec<f64>>,
    ) -> Result<RadialProfile> {
        if t_end <= 0.0 {
            return Ok(h0.clone());
        }
        let steps = (t_end / dt).ceil().max(1.0) as usize;
        let dt = t_end / steps as f64;
        let mut schedule = std::iter::repeat(dt).take(steps);
        self.evolve_schedule(h0, &mut schedule, source, |_, _| {})
    }

    /// Advances with an explicit sequence of step sizes, calling
    /// `observe(t, h)` after each step.
    pub fn evolve_schedule<I, O>(
        &self,
        h0: &RadialProfile,
        schedule: &mut I,
        source: Option<&dyn Fn(f64) -> Vec<f64>>,
        mut observe: O,
    ) -> Result<RadialProfile>
    where
        I: Iterator<Item = f64>,
        O: FnMut(f64, &[f64]),
    {
        if h0.r() != self.r.as_slice() {
            return Err(Error::Shape {
                expected: "profile on the engine grid".into(),
                found: format!("{} nodes", h0.len()),
            });
        }
        let scale = h0.max_abs();
        self.check_decay(h0.values(), scale)?;
        let bval = self.boundary_value(h0.values());
        let mut h = h0.values().to_vec();
        if self.parity == RadialParity::Odd {
            h[0] = 0.0;
        }
        let mut t = 0.0;
        let mut s_prev = source.map(|s| s(0.0));
        for dt in schedule {
            let s_next = source.map(|s| s(t + dt));
            let src = match (&s_prev, &s_next) {
                (Some(a), Some(b)) => Some((a.as_slice(), b.as_slice())),
                _ => None,
            };
            h = self.step(&h, dt, src, bval);
            t += dt;
            s_prev = s_next;
            if h.iter().any(|v| !v.is_finite()) {
                return Err(Error::Unstable {
                    t,
                    reason: "non-finite radial profile".into(),
                });
            }
            observe(t, &h);
        }
        self.check_decay(&h, scale.max(h.iter().fold(0.0f64, |m, v| m.max(v.abs()))))?;
        h0.with_values(h)
    }
}

/// Geometric step schedule `dt0, dt0·g, …` capped at `dt_max`, ending
/// exactly at `t_end`.
pub fn growing_schedule(t_end: f64, dt0: f64, growth: f64, dt_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let (mut t, mut dt) = (0.0, dt0);
    while t < t_end * (1.0 - 1e-14) {
        let d = dt.min(t_end - t);
        out.push(d);
        t += d;
        dt = (dt * growth).min(dt_max);
    }
    out
}

/// In-place LU solve of a pentadiagonal system without pivoting.
/// `band[i][o]` holds `A[i][i + o − 2]`.
fn solve_pentadiagonal(band: &mut [[f64; 5]], rhs: &mut [f64]) {
    let n = rhs.len();
    for k in 0..n {
        let pivot = band[k][2];
        for i in k + 1..(k + 3).min(n) {
            let ik = k + 2 - i; // column k in row i
            let l = band[i][ik] / pivot;
            if l == 0.0 {
                continue;
            }
            band[i][ik] = 0.0;
            for j in k + 1..(k + 3).min(n) {
                let kj = j + 2 - k;
                let ij = j + 2 - i;
                band[i][ij] -= l * band[k][kj];
            }
            rhs[i] -= l * rhs[k];
        }
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..(i + 3).min(n) {
            s -= band[i][j + 2 - i] * rhs[j];
        }
        rhs[i] = s / band[i][2];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{oseen_u_theta, oseen_w};

    fn gaussian_error(n: usize, stencil: Stencil, dt: f64) -> f64 {
        let r = RadialProfile::uniform_grid(n, 40.0);
        let h0 = RadialProfile::from_fn(r.clone(), |x| oseen_w(x, 0.0)).unwrap();
        let e = RadialEngine::new(&r, RadialParity::Even, OuterBoundary::Decay { tol: 1e-12 })
            .unwrap()
            .with_stencil(stencil);
        let h = e.evolve(&h0, 1.0, dt, None).unwrap();
        h.r()
            .iter()
            .zip(h.values())
            .map(|(&x, v)| (v - oseen_w(x, 1.0)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn pentadiagonal_solver_matches_dense() {
        let n = 7;
        let mut band = vec![[0.0; 5]; n];
        for (i, row) in band.iter_mut().enumerate() {
            for (o, v) in row.iter_mut().enumerate() {
                let j = i as i64 + o as i64 - 2;
                if (0..n as i64).contains(&j) {
                    *v = if o == 2 { 10.0 + i as f64 } else { (i + 2 * o) as f64 * 0.3 - 1.0 };
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            for o in 0..5 {
                let j = i as i64 + o as i64 - 2;
                if (0..n as i64).contains(&j) {
                    b[i] += band[i][o] * x[j as usize];
                }
            }
        }
        solve_pentadiagonal(&mut band, &mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_stays_zero() {
        let r = RadialProfile::uniform_grid(64, 10.0);
        let e = RadialEngine::new(&r, RadialParity::Even, OuterBoundary::Decay { tol: 1e-10 }).unwrap();
        let h = e.evolve(&RadialProfile::new(r.clone(), vec![0.0; 65]).unwrap(), 1.0, 0.01, None).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn gaussian_stays_in_oseen_family() {
        // the time error (≈ 2.5e-3·dt²) dominates unless dt is small
        let e4 = gaussian_error(1024, Stencil::Fourth, 6.25e-4);
        assert!(e4 < 1e-8, "fourth-order error {e4:e}");
        let e2a = gaussian_error(256, Stencil::Second, 40.0 / 256.0 / 4.0);
        let e2b = gaussian_error(512, Stencil::Second, 40.0 / 512.0 / 4.0);
        let order = (e2a / e2b).log2();
        assert!((order - 2.0).abs() < 0.3, "second-order stencil order {order}");
    }

    #[test]
    fn odd_parity_evolves_oseen_swirl() {
        // The Oseen azimuthal velocity solves the n = 1 equation; its 1/r
        // tail needs the frozen far-field value.
        let r = RadialProfile::uniform_grid(800, 40.0);
        let u0 = RadialProfile::from_fn(r.clone(), |x| oseen_u_theta(x, 0.0)).unwrap();
        let e = RadialEngine::new(&r, RadialParity::Odd, OuterBoundary::Frozen).unwrap();
        let u = e.evolve(&u0, 1.0, 6.25e-4, None).unwrap();
        let err = u
            .r()
            .iter()
            .zip(u.values())
            .map(|(&x, v)| (v - oseen_u_theta(x, 1.0)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err:e}");
    }

    #[test]
    fn truncated_domain_is_reported() {
        let r = RadialProfile::uniform_grid(64, 4.0);
        let h0 = RadialProfile::from_fn(r.clone(), |x| oseen_w(x, 0.0)).unwrap();
        let e = RadialEngine::new(&r, RadialParity::Even, OuterBoundary::Decay { tol: 1e-8 }).unwrap();
        assert!(matches!(e.evolve(&h0, 1.0, 0.01, None), Err(Error::DomainTooSmall { .. })));
    }
}
