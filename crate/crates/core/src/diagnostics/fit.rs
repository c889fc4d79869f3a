//! Least-squares decay fits and trend tests over record streams.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

use super::record::DiagnosticsRecord;

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual.
    pub residual: f64,
    /// 95% confidence halfwidth of the slope (0 for two points).
    pub slope_halfwidth: f64,
    pub samples: usize,
}

/// Two-sided 97.5% Student-t quantile.
fn t_quantile(nu: usize) -> f64 {
    StudentsT::new(0.0, 1.0, nu as f64)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(f64::INFINITY)
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::Precondition(format!("linear fit needs ≥ 2 paired samples, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "fit samples".into() });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_halfwidth = if n > 2 {
        t_quantile(n - 2) * (ss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
        slope_halfwidth,
        samples: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `y ≈ C t^p`
    Power,
    /// `y ≈ C e^{λt}`
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub t1: f64,
    pub t2: f64,
    pub model: FitModel,
    /// `p` or `λ`.
    pub exponent: f64,
    /// RMS residual in log space.
    pub residual: f64,
    pub halfwidth: f64,
    pub samples: usize,
}

impl DecayFit {
    pub fn summary(&self) -> String {
        let m = match self.model {
            FitModel::Power => "power",
            FitModel::Exponential => "exponential",
        };
        format!(
            "{m} fit on [{:.4}, {:.4}]: exponent {:.6} ± {:.2e} (residual {:.2e}, n = {})",
            self.t1, self.t2, self.exponent, self.halfwidth, self.residual, self.samples
        )
    }
}

/// Fits `ln y` against `ln t` (power) or `t` (exponential) over the samples
/// with `t ∈ [t1, t2]`.
pub fn decay_fit(t: &[f64], y: &[f64], t1: f64, t2: f64, model: FitModel) -> Result<DecayFit> {
    if !(t2 > t1) {
        return Err(Error::Precondition(format!("empty fit window [{t1}, {t2}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&ti, &yi) in t.iter().zip(y) {
        if ti >= t1 && ti <= t2 {
            if !(yi > 0.0) {
                return Err(Error::Precondition(format!("non-positive value {yi} at t = {ti}")));
            }
            xs.push(match model {
                FitModel::Power => ti.ln(),
                FitModel::Exponential => ti,
            });
            ys.push(yi.ln());
        }
    }
    let f = linear_fit(&xs, &ys)?;
    Ok(DecayFit {
        t1,
        t2,
        model,
        exponent: f.slope,
        residual: f.residual,
        halfwidth: f.slope_halfwidth,
        samples: f.samples,
    })
}

/// Power-law fit on `[t_end/4, t_end]`.
pub fn power_fit(t: &[f64], y: &[f64]) -> Result<DecayFit> {
    let t_end = t.last().copied().unwrap_or(0.0);
    decay_fit(t, y, t_end / 4.0, t_end, FitModel::Power)
}

/// Exponential fit over the last half of the run, at least 20 samples.
pub fn exponential_tail_fit(t: &[f64], y: &[f64]) -> Result<DecayFit> {
    let t_end = t.last().copied().unwrap_or(0.0);
    let f = decay_fit(t, y, t_end / 2.0, t_end, FitModel::Exponential)?;
    if f.samples < 20 {
        return Err(Error::Precondition(format!(
            "exponential fit needs ≥ 20 samples in the tail window, got {}",
            f.samples
        )));
    }
    Ok(f)
}

/// Centred 3-sample moving median; the end points are kept.
pub fn moving_median3(x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    for i in 1..x.len().saturating_sub(1) {
        let mut w = [x[i - 1], x[i], x[i + 1]];
        w.sort_by(f64::total_cmp);
        out[i] = w[1];
    }
    out
}

/// Monotone-trend report for one scalar series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendReport {
    /// Time of the last increase of the smoothed series (the first sample
    /// time when it never increases).
    pub transient: f64,
    pub t_end: f64,
    /// Largest increase of the smoothed series over any step.
    pub max_increase: f64,
}

impl TrendReport {
    /// Nonincreasing after a transient that ends in the first half of the run.
    pub fn settled(&self) -> bool {
        self.transient <= 0.5 * self.t_end
    }
}

pub fn trend(t: &[f64], y: &[f64]) -> Result<TrendReport> {
    if t.len() != y.len() || t.is_empty() {
        return Err(Error::Precondition("trend needs a non-empty paired series".into()));
    }
    let m = moving_median3(y);
    let mut transient = t[0];
    let mut max_increase = 0.0f64;
    for i in 1..m.len() {
        let d = m[i] - m[i - 1];
        if d > 0.0 {
            transient = t[i];
            max_increase = max_increase.max(d);
        }
    }
    Ok(TrendReport { transient, t_end: *t.last().unwrap(), max_increase })
}

/// `(‖v‖² + 2∫‖∇v‖²)/(1 + ln(1+t))` and the slope of its last half.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEnergyReport {
    pub lhs: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Fitted bound constant: max of the ratio.
    pub constant: f64,
    pub tail: Option<LinearFit>,
}

impl LogEnergyReport {
    /// No upward drift beyond the fit confidence.
    pub fn bounded(&self) -> bool {
        match &self.tail {
            Some(f) => f.slope <= f.slope_halfwidth.max(1e-300),
            None => true,
        }
    }
}

pub fn log_energy_check(records: &[DiagnosticsRecord]) -> LogEnergyReport {
    let lhs: Vec<f64> = records
        .iter()
        .map(|r| r.l2_v * r.l2_v + 2.0 * r.cum_enstrophy)
        .collect();
    let ratio: Vec<f64> = records
        .iter()
        .zip(&lhs)
        .map(|(r, l)| l / (1.0 + (1.0 + r.t).ln()))
        .collect();
    let constant = ratio.iter().copied().fold(0.0, f64::max);
    let t_end = records.last().map(|r| r.t).unwrap_or(0.0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = records
        .iter()
        .zip(&ratio)
        .filter(|(r, _)| r.t >= t_end / 2.0)
        .map(|(r, q)| (r.t, *q))
        .unzip();
    let tail = if constant > 0.0 { linear_fit(&xs, &ys).ok() } else { None };
    LogEnergyReport { lhs, ratio, constant, tail }
}

/// Exponential fit of `‖(1−Q)u‖` over the last half of the run; `None`
/// when the perp part vanishes identically.
pub fn perp_decay_fit(records: &[DiagnosticsRecord]) -> Result<Option<DecayFit>> {
    if records.iter().all(|r| r.l2_uperp == 0.0) {
        return Ok(None);
    }
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let y: Vec<f64> = records.iter().map(|r| r.l2_uperp).collect();
    exponential_tail_fit(&t, &y).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!(f.residual < 1e-14 && f.slope_halfwidth < 1e-13);
    }

    #[test]
    fn t_quantile_values() {
        // tabulated 97.5% quantiles
        for (nu, q) in [(5, 2.570_582), (10, 2.228_139), (30, 2.042_272)] {
            assert!((t_quantile(nu) - q).abs() < 1e-5 * q, "{nu}");
        }
    }

    #[test]
    fn power_and_exponential_recovery() {
        let t: Vec<f64> = (1..=80).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-0.25)).collect();
        assert!((power_fit(&t, &y).unwrap().exponent + 0.25).abs() < 1e-12);
        let y: Vec<f64> = t.iter().map(|t| 0.1 * (-1.3 * t).exp()).collect();
        let f = exponential_tail_fit(&t, &y).unwrap();
        assert!((f.exponent + 1.3).abs() < 1e-12);
        assert_eq!(f.model, FitModel::Exponential);
    }

    #[test]
    fn too_few_tail_samples() {
        let t: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| (-t).exp()).collect();
        assert!(exponential_tail_fit(&t, &y).is_err());
    }

    #[test]
    fn median_suppresses_single_spike() {
        let t = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [5.0, 4.0, 4.5, 3.0, 2.0, 1.0];
        let r = trend(&t, &y).unwrap();
        assert_eq!(r.transient, 0.0);
        assert!(r.settled());
        let y = [1.0, 2.0, 3.0, 4.0, 5.0, 2.0];
        let r = trend(&t, &y).unwrap();
        assert_eq!(r.transient, 3.0);
        assert!(!r.settled());
    }
}
