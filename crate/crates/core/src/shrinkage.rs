//! Wavelet-domain dimension reduction by hard thresholding.
//!
//! Covers the single-signal universal-threshold rule, the iid mean-signal
//! case, and the simultaneous rule for n independent curves: a detail
//! position (j,k) is kept only when the l2 norm of its n-vector of
//! coefficients exceeds a chi-square deviation threshold, and the keep/zero
//! decision is applied to all curves jointly. Scaling coefficients carry
//! the smooth part and are never thresholded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelets::{dwt, WaveletDecomposition, WaveletFilter};

pub const MAD_NORMALIZATION: f64 = 0.6745;

/// Parameters of the simultaneous rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShrinkageConfig {
    /// Miss probability budget q in (0,1); the chance of retaining any
    /// truly-null detail is bounded near q.
    pub q: f64,
    /// Known noise level; estimated by MAD on the finest level when absent.
    pub sigma: Option<f64>,
}

impl Default for ShrinkageConfig {
    fn default() -> Self {
        Self {
            q: 0.05,
            sigma: None,
        }
    }
}

/// Outcome of [`simultaneous_shrink`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShrinkageResult {
    /// Detail positions whose joint norm exceeded the threshold, sorted.
    pub kept: Vec<(usize, usize)>,
    /// Joint norms per detail position, in flat level-major order.
    pub norms: Vec<((usize, usize), f64)>,
    pub threshold: f64,
    pub sigma_hat: f64,
    /// The n decompositions with non-kept details zeroed.
    pub shrunk: Vec<WaveletDecomposition>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// MAD estimate of sigma: Med(|x - Med(x)|) / 0.6745.
pub fn mad_sigma(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidData("MAD of empty input".into()));
    }
    let mut work = values.to_vec();
    let med = median(&mut work);
    for v in work.iter_mut() {
        *v = (*v - med).abs();
    }
    Ok(median(&mut work) / MAD_NORMALIZATION)
}

/// Universal threshold sigma * sqrt(2 log n) for n >= 2 samples.
pub fn universal_threshold(n: f64, sigma: f64) -> f64 {
    sigma * (2.0 * n.ln()).sqrt()
}

/// Hard thresholding of one decomposition: details survive only when their
/// magnitude strictly exceeds delta; the scaling coefficient is untouched.
pub fn hard_threshold_single(coeffs: &WaveletDecomposition, delta: f64) -> WaveletDecomposition {
    let details = coeffs
        .details
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|&v| if v.abs() > delta { v } else { 0.0 })
                .collect()
        })
        .collect();
    WaveletDecomposition {
        scaling: coeffs.scaling,
        details,
    }
}

/// Signal recovery for n iid curves: threshold the mean curve's
/// decomposition at (sigma / sqrt(n)) * sqrt(2 log N).
pub fn mean_signal_shrink(
    curves: &[Vec<f64>],
    filter: WaveletFilter,
    sigma: f64,
) -> Result<WaveletDecomposition> {
    let n = curves.len();
    if n == 0 {
        return Err(Error::InvalidData("empty curve panel".into()));
    }
    let len = curves[0].len();
    if curves.iter().any(|c| c.len() != len) {
        return Err(Error::InvalidData("ragged curve lengths".into()));
    }
    let mut mean = vec![0.0; len];
    for curve in curves {
        for (m, v) in mean.iter_mut().zip(curve) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let coeffs = dwt(&mean, filter)?;
    let delta = universal_threshold(len as f64, sigma / (n as f64).sqrt());
    Ok(hard_threshold_single(&coeffs, delta))
}

/// Joint threshold for n curves on an N-point grid:
/// sigma * (2 log(N/q) + 2 sqrt(n log(N/q)) + n)^(1/2).
pub fn joint_threshold(n_grid: f64, n_curves: usize, q: f64, sigma_hat: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) || q == 0.0 {
        return Err(Error::InvalidConfig(format!("q must be in (0,1), got {q}")));
    }
    if n_curves == 0 {
        return Err(Error::InvalidData("need at least one curve".into()));
    }
    let x = (n_grid / q).ln();
    let n = n_curves as f64;
    Ok(sigma_hat * (2.0 * x + 2.0 * (n * x).sqrt() + n).sqrt())
}

/// Simultaneous hard thresholding of n decompositions of one functional
/// variable. Sigma defaults to the MAD estimate pooled over the finest
/// level of all n decompositions.
pub fn simultaneous_shrink(
    decomps: &[WaveletDecomposition],
    config: &ShrinkageConfig,
) -> Result<ShrinkageResult> {
    let n = decomps.len();
    if n == 0 {
        return Err(Error::InvalidData("empty decomposition panel".into()));
    }
    let levels = decomps[0].levels();
    if decomps.iter().any(|d| d.levels() != levels) {
        return Err(Error::InvalidData("mixed decomposition depths".into()));
    }
    let n_grid = (1usize << levels) as f64;

    let sigma_hat = match config.sigma {
        Some(s) => s,
        None => {
            let finest: Vec<f64> = decomps
                .iter()
                .flat_map(|d| d.details[levels - 1].iter().copied())
                .collect();
            mad_sigma(&finest)?
        }
    };
    let threshold = joint_threshold(n_grid, n, config.q, sigma_hat)?;

    let mut kept = Vec::new();
    let mut norms = Vec::new();
    let mut keep_mask: Vec<Vec<bool>> = Vec::with_capacity(levels);
    for j in 0..levels {
        let width = 1usize << j;
        let mut level_mask = vec![false; width];
        for k in 0..width {
            let norm = decomps
                .iter()
                .map(|d| {
                    let v = d.details[j][k];
                    v * v
                })
                .sum::<f64>()
                .sqrt();
            norms.push(((j, k), norm));
            if norm > threshold {
                level_mask[k] = true;
                kept.push((j, k));
            }
        }
        keep_mask.push(level_mask);
    }

    let shrunk = decomps
        .iter()
        .map(|d| WaveletDecomposition {
            scaling: d.scaling,
            details: d
                .details
                .iter()
                .enumerate()
                .map(|(j, level)| {
                    level
                        .iter()
                        .enumerate()
                        .map(|(k, &v)| if keep_mask[j][k] { v } else { 0.0 })
                        .collect()
                })
                .collect(),
        })
        .collect();

    Ok(ShrinkageResult {
        kept,
        norms,
        threshold,
        sigma_hat,
        shrunk,
    })
}
