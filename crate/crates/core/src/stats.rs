//! Summary statistics, z-gates, geometric-law fitting, and log-log slope
//! estimation for the experiment harness.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Error, Result};

/// Basic unbiased sample statistics. For a single observation the standard
/// deviation (and standard error) are 0 by convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(samples: &[f64]) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::EmptyInput { what: "samples" });
    }
    let count = samples.len();
    let mean = samples.iter().sum::<f64>() / count as f64;
    let std_dev = if count < 2 {
        0.0
    } else {
        let ss = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        (ss / (count as f64 - 1.0)).sqrt()
    };
    let std_error = std_dev / (count as f64).sqrt();
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(Summary { count, mean, std_dev, std_error, min, max })
}

/// Default width of every statistical acceptance gate.
pub const DEFAULT_Z_MAX: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZComparison {
    pub z: f64,
    pub pass: bool,
}

/// Compares an empirical mean against an exact reference:
/// pass iff `|mean - reference| / SE <= z_max`. With fewer than two samples
/// or a zero standard error this degenerates to an exact equality check.
pub fn z_compare(summary: &Summary, reference: f64, z_max: f64) -> ZComparison {
    if summary.count < 2 || summary.std_error == 0.0 {
        let pass = summary.mean == reference;
        return ZComparison { z: if pass { 0.0 } else { f64::INFINITY }, pass };
    }
    let z = (summary.mean - reference).abs() / summary.std_error;
    ZComparison { z, pass: z <= z_max }
}

/// Maximum-likelihood geometric fit plus a chi-square goodness-of-fit test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricFit {
    /// MLE success rate `1 / mean`.
    pub p_hat: f64,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    /// Right-tail probability; 1.0 for degenerate fits with too few cells.
    pub p_value: f64,
    /// Number of cells after tail pooling.
    pub cells: usize,
}

/// Fits Geometric(p) on support {1, 2, ...} — a phase takes at least one
/// step, so counts start at 1 — and tests the fit with singleton cells
/// pooled into a tail so every expected cell count is at least 5. One degree
/// of freedom is spent on the estimated rate.
pub fn fit_geometric(counts: &[u64]) -> Result<GeometricFit> {
    if counts.is_empty() {
        return Err(Error::EmptyInput { what: "counts" });
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(invalid("counts", "geometric support starts at 1"));
    }
    let total = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / total;
    let p_hat = 1.0 / mean;
    if p_hat >= 1.0 {
        // every phase succeeded on the first try: nothing left to test
        return Ok(GeometricFit {
            p_hat: 1.0,
            chi_square: 0.0,
            degrees_of_freedom: 0,
            p_value: 1.0,
            cells: 1,
        });
    }
    let q = 1.0 - p_hat;

    // singleton cells for 1..boundary-1, one pooled tail cell [boundary, inf)
    let mut boundary = 1usize;
    loop {
        let cell_expected = total * p_hat * q.powi(boundary as i32 - 1);
        let tail_expected = total * q.powi(boundary as i32);
        if cell_expected < 5.0 || tail_expected < 5.0 {
            break;
        }
        boundary += 1;
    }
    let cells = boundary; // boundary - 1 singletons + 1 tail
    if cells < 3 {
        return Ok(GeometricFit {
            p_hat,
            chi_square: 0.0,
            degrees_of_freedom: 0,
            p_value: 1.0,
            cells,
        });
    }
    let mut observed = vec![0.0f64; cells];
    for &c in counts {
        let idx = (c as usize - 1).min(cells - 1);
        observed[idx] += 1.0;
    }
    let mut chi_square = 0.0;
    for (i, &obs) in observed.iter().enumerate() {
        let expected = if i + 1 < cells {
            total * p_hat * q.powi(i as i32)
        } else {
            total * q.powi(i as i32)
        };
        chi_square += (obs - expected) * (obs - expected) / expected;
    }
    let degrees_of_freedom = cells - 2;
    let dist = ChiSquared::new(degrees_of_freedom as f64)
        .expect("degrees of freedom is at least 1");
    let p_value = 1.0 - dist.cdf(chi_square);
    Ok(GeometricFit { p_hat, chi_square, degrees_of_freedom, p_value, cells })
}

/// Ordinary least squares on `(ln n, ln t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_sum_of_squares: f64,
}

pub fn loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(invalid("points", "need at least two points"));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(invalid("points", "all coordinates must be positive"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let count = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum::<f64>();
    if sxx == 0.0 {
        return Err(invalid("points", "all n values coincide"));
    }
    let sxy = logs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum::<f64>();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual_sum_of_squares = logs
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum::<f64>();
    Ok(SlopeFit { slope, intercept, residual_sum_of_squares })
}
