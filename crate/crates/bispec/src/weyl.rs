//! Weyl-law and boundary-trace checks: growth exponent of the eigenvalue
//! sequence, uniform trace-ratio bounds, and absolute convergence of the
//! weighted trace series.

use crate::eig::SpectralDataset;
use crate::error::{Error, Result};

/// Least-squares slope of y against x.
pub fn linear_fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}

#[derive(Debug, Clone)]
pub struct WeylReport {
    /// least-squares slope of log lambda_k vs log k (target 4/3 in n = 3)
    pub fitted_exponent: f64,
    /// min and max of lambda_k / k^{4/3} over the fit window
    pub e1: f64,
    pub e2: f64,
    /// max_k R |a_k| / lambda_k^{1/2} over the window
    pub max_ratio_a: f64,
    /// max_k R |b_k| / lambda_k over the window
    pub max_ratio_b: f64,
    pub k_range: (usize, usize),
}

/// Fit the growth law lambda_k ~ E k^{4/3} over global indices
/// [k_min, k_max] (1-based).
pub fn weyl_fit(ds: &SpectralDataset, k_min: usize, k_max: usize) -> Result<WeylReport> {
    if k_min < 10 {
        return Err(Error::Precondition(format!("weyl_fit: kMin = {k_min} < 10")));
    }
    if k_max <= k_min || k_max > ds.len() {
        return Err(Error::Precondition(format!(
            "weyl_fit: kMax = {k_max} outside ({k_min}, {}]",
            ds.len()
        )));
    }
    let mut logs_k = Vec::with_capacity(k_max - k_min + 1);
    let mut logs_l = Vec::with_capacity(k_max - k_min + 1);
    let mut e1 = f64::INFINITY;
    let mut e2 = 0.0f64;
    let mut ra = 0.0f64;
    let mut rb = 0.0f64;
    for (k, mode) in ds.modes.iter().enumerate().take(k_max).skip(k_min - 1) {
        let kf = (k + 1) as f64;
        logs_k.push(kf.ln());
        logs_l.push(mode.lambda.ln());
        let ratio = mode.lambda / kf.powf(4.0 / 3.0);
        e1 = e1.min(ratio);
        e2 = e2.max(ratio);
        ra = ra.max(ds.radius * mode.a_trace.abs() / mode.lambda.sqrt());
        rb = rb.max(ds.radius * mode.b_trace.abs() / mode.lambda);
    }
    Ok(WeylReport {
        fitted_exponent: linear_fit_slope(&logs_k, &logs_l),
        e1,
        e2,
        max_ratio_a: ra,
        max_ratio_b: rb,
        k_range: (k_min, k_max),
    })
}

/// Maxima of R|a_k|/lambda_k^{1/2} and R|b_k|/lambda_k over the dataset.
pub fn trace_bound_check(ds: &SpectralDataset) -> (f64, f64) {
    let mut ra = 0.0f64;
    let mut rb = 0.0f64;
    for mode in &ds.modes {
        ra = ra.max(ds.radius * mode.a_trace.abs() / mode.lambda.sqrt());
        rb = rb.max(ds.radius * mode.b_trace.abs() / mode.lambda);
    }
    (ra, rb)
}

#[derive(Debug, Clone)]
pub struct SeriesCheck {
    pub m: usize,
    /// partial-sum checkpoints K (those <= dataset size among 50/100/200/400)
    pub checkpoints: Vec<usize>,
    /// partial sums of sum_k k^{-4m/3} R|a_k| at the checkpoints
    pub sums_a: Vec<f64>,
    /// same for the b-traces
    pub sums_b: Vec<f64>,
}

impl SeriesCheck {
    /// Cauchy property: consecutive increments are decreasing.
    pub fn increments_decreasing(&self) -> bool {
        let inc = |s: &[f64]| -> Vec<f64> { s.windows(2).map(|w| w[1] - w[0]).collect() };
        let ok = |d: &[f64]| d.windows(2).all(|w| w[1] <= w[0] + 1e-15);
        ok(&inc(&self.sums_a)) && ok(&inc(&self.sums_b))
    }
}

/// Partial sums of the k^{-4m/n}-weighted trace series (n = 3), at
/// K = 50, 100, 200, 400.
pub fn series_convergence_check(ds: &SpectralDataset, m: usize) -> Result<SeriesCheck> {
    if m < 2 {
        // absolute convergence needs m > n/4 + 1 = 7/4
        return Err(Error::Precondition(format!("series_convergence_check: m = {m} < 2")));
    }
    let checkpoints: Vec<usize> = [50usize, 100, 200, 400]
        .into_iter()
        .filter(|&k| k <= ds.len())
        .collect();
    if checkpoints.len() < 2 {
        return Err(Error::Precondition(format!(
            "series_convergence_check: dataset too small ({} modes)",
            ds.len()
        )));
    }
    let w = -(4.0 * m as f64) / 3.0;
    let mut sums_a = Vec::new();
    let mut sums_b = Vec::new();
    let mut sa = 0.0;
    let mut sb = 0.0;
    let mut next = 0usize;
    for (k, mode) in ds.modes.iter().enumerate() {
        let kf = (k + 1) as f64;
        sa += kf.powf(w) * ds.radius * mode.a_trace.abs();
        sb += kf.powf(w) * ds.radius * mode.b_trace.abs();
        if next < checkpoints.len() && k + 1 == checkpoints[next] {
            sums_a.push(sa);
            sums_b.push(sb);
            next += 1;
        }
    }
    Ok(SeriesCheck { m, checkpoints, sums_a, sums_b })
}

/// Per-mode CSV for plotting: k, lambda, lambda/k^{4/3}, ratioA, ratioB.
pub fn weyl_csv(ds: &SpectralDataset) -> String {
    let mut out = String::from("k,lambda,lambdaOverK43,ratioA,ratioB\n");
    for (k, mode) in ds.modes.iter().enumerate() {
        let kf = (k + 1) as f64;
        out.push_str(&format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            k + 1,
            mode.lambda,
            mode.lambda / kf.powf(4.0 / 3.0),
            ds.radius * mode.a_trace.abs() / mode.lambda.sqrt(),
            ds.radius * mode.b_trace.abs() / mode.lambda
        ));
    }
    out
}
