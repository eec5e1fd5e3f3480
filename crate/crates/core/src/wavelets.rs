//! Orthonormal discrete wavelet transform on dyadic grids.
//!
//! Signals of length `N = 2^J` are decomposed by the pyramid algorithm with
//! periodic boundary handling down to a single scaling coefficient, giving
//! one scaling value and detail coefficients indexed by level `j` (0 =
//! coarsest, frequency increases with `j`) and position `k in 0..2^j`.
//!
//! Alongside the fast transform, [`basis_matrix`] builds the periodized
//! basis vectors explicitly. That matrix is the ground truth for wavelet
//! supports: which functions are non-null at a grid time has no closed form
//! once the basis is periodized, so supports are read off the sampled basis
//! with a hard zero threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Daubechies lowpass filters, exact to f64 precision.
///
/// db2 follows from the closed form ((1±√3)/(4√2) pattern); db4 from
/// spectral factorization of the Daubechies polynomial. Both satisfy
/// Σh = √2, Σh² = 1 and the shifted orthogonality identities to ~1e-15.
const DB2_LOWPASS: [f64; 4] = [
    0.48296291314453414,
    0.83651630373780791,
    0.22414386804201338,
    -0.12940952255126038,
];

const DB4_LOWPASS: [f64; 8] = [
    0.23037781330889650,
    0.71484657055291565,
    0.63088076792985891,
    -0.027983769416859854,
    -0.18703481171909308,
    0.030841381835560764,
    0.032883011666885200,
    -0.010597401785069032,
];

/// Daubechies filter choice: 2 or 4 vanishing moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFilter {
    Db2,
    Db4,
}

impl WaveletFilter {
    pub fn vanishing_moments(self) -> usize {
        match self {
            WaveletFilter::Db2 => 2,
            WaveletFilter::Db4 => 4,
        }
    }

    pub fn lowpass(self) -> &'static [f64] {
        match self {
            WaveletFilter::Db2 => &DB2_LOWPASS,
            WaveletFilter::Db4 => &DB4_LOWPASS,
        }
    }

    /// Quadrature-mirror highpass: g[m] = (-1)^m h[L-1-m].
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * h[l - 1 - m]
            })
            .collect()
    }

    pub fn len(self) -> usize {
        self.lowpass().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            WaveletFilter::Db2 => "db2",
            WaveletFilter::Db4 => "db4",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "db2" => Ok(WaveletFilter::Db2),
            "db4" => Ok(WaveletFilter::Db4),
            other => Err(Error::InvalidConfig(format!("unknown filter {other:?}"))),
        }
    }
}

/// Full-depth decomposition of one length-2^J signal.
///
/// `details[j]` holds the 2^j coefficients of level `j`; level 0 is the
/// coarsest detail. Total coefficient count (scaling included) equals the
/// signal length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletDecomposition {
    pub scaling: f64,
    pub details: Vec<Vec<f64>>,
}

impl WaveletDecomposition {
    /// Number of decomposition levels J.
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Signal length N = 2^J.
    pub fn len(&self) -> usize {
        1 << self.details.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn detail(&self, level: usize, pos: usize) -> f64 {
        self.details[level][pos]
    }

    /// Flat layout: index 0 is the scaling coefficient, detail (j,k) sits at
    /// `2^j + k`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.push(self.scaling);
        for level in &self.details {
            out.extend_from_slice(level);
        }
        out
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        let n = flat.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NonDyadicLength(n));
        }
        let levels = n.trailing_zeros() as usize;
        let mut details = Vec::with_capacity(levels);
        let mut at = 1;
        for j in 0..levels {
            let width = 1 << j;
            details.push(flat[at..at + width].to_vec());
            at += width;
        }
        Ok(Self {
            scaling: flat[0],
            details,
        })
    }

    /// Sum of squared coefficients; equals the signal energy (Parseval).
    pub fn energy(&self) -> f64 {
        let mut e = self.scaling * self.scaling;
        for level in &self.details {
            for v in level {
                e += v * v;
            }
        }
        e
    }
}

/// Flat-layout index of detail (level, pos); the scaling coefficient is 0.
pub fn flat_index(level: usize, pos: usize) -> usize {
    (1 << level) + pos
}

fn check_dyadic(n: usize, filter: WaveletFilter) -> Result<u32> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NonDyadicLength(n));
    }
    if n < filter.len() {
        return Err(Error::SignalTooShort {
            len: n,
            filter: filter.len(),
        });
    }
    Ok(n.trailing_zeros())
}

/// One analysis step: length-L circular filtering and downsampling.
fn analysis_step(input: &[f64], h: &[f64], g: &[f64], approx: &mut [f64], detail: &mut [f64]) {
    let len = input.len();
    let half = len / 2;
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (m, (&hm, &gm)) in h.iter().zip(g).enumerate() {
            let v = input[(2 * k + m) % len];
            a += hm * v;
            d += gm * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

/// One synthesis step, the transpose (= inverse) of [`analysis_step`].
fn synthesis_step(approx: &[f64], detail: &[f64], h: &[f64], g: &[f64], output: &mut [f64]) {
    let len = output.len();
    output.fill(0.0);
    for k in 0..len / 2 {
        for (m, (&hm, &gm)) in h.iter().zip(g).enumerate() {
            output[(2 * k + m) % len] += hm * approx[k] + gm * detail[k];
        }
    }
}

/// Discrete wavelet transform of a length-2^J signal (full depth, periodic).
pub fn dwt(signal: &[f64], filter: WaveletFilter) -> Result<WaveletDecomposition> {
    let levels = check_dyadic(signal.len(), filter)? as usize;
    let h = filter.lowpass();
    let g = filter.highpass();
    let mut current = signal.to_vec();
    let mut details: Vec<Vec<f64>> = (0..levels).map(|_| Vec::new()).collect();
    let mut approx = vec![0.0; signal.len() / 2];
    for j in (0..levels).rev() {
        let half = current.len() / 2;
        let mut detail = vec![0.0; half];
        analysis_step(&current, h, &g, &mut approx[..half], &mut detail);
        details[j] = detail;
        current.truncate(half);
        current.copy_from_slice(&approx[..half]);
    }
    Ok(WaveletDecomposition {
        scaling: current[0],
        details,
    })
}

/// Inverse transform; exact up to rounding by orthonormality.
pub fn idwt(coeffs: &WaveletDecomposition, filter: WaveletFilter) -> Result<Vec<f64>> {
    let levels = coeffs.levels();
    let n = 1usize << levels;
    check_dyadic(n, filter)?;
    for (j, level) in coeffs.details.iter().enumerate() {
        if level.len() != (1 << j) {
            return Err(Error::LayoutMismatch(format!(
                "level {j} has {} coefficients, expected {}",
                level.len(),
                1 << j
            )));
        }
    }
    let h = filter.lowpass();
    let g = filter.highpass();
    let mut current = vec![coeffs.scaling];
    for level in &coeffs.details {
        let mut next = vec![0.0; current.len() * 2];
        synthesis_step(&current, level, h, &g, &mut next);
        current = next;
    }
    Ok(current)
}

/// Periodized basis vectors sampled on the grid, built by explicit per-level
/// synthesis of every one-hot coefficient.
///
/// Row-major `n x n`: entry `[t * n + c]` is basis function `c` (flat
/// layout) evaluated at grid point `t`. Columns are orthonormal.
pub fn basis_matrix(filter: WaveletFilter, n: usize) -> Result<Vec<f64>> {
    let levels = check_dyadic(n, filter)? as usize;
    let h = filter.lowpass();
    let g = filter.highpass();
    // Basis images at the current scale; starts with the scaling one-hot.
    let mut columns: Vec<Vec<f64>> = vec![vec![1.0]];
    for j in 0..levels {
        let len = 1 << j;
        let out_len = len * 2;
        for col in columns.iter_mut() {
            let mut next = vec![0.0; out_len];
            for (k, &v) in col.iter().enumerate() {
                if v != 0.0 {
                    for (m, &hm) in h.iter().enumerate() {
                        next[(2 * k + m) % out_len] += hm * v;
                    }
                }
            }
            *col = next;
        }
        for k in 0..len {
            let mut next = vec![0.0; out_len];
            for (m, &gm) in g.iter().enumerate() {
                next[(2 * k + m) % out_len] += gm;
            }
            columns.push(next);
        }
    }
    let mut matrix = vec![0.0; n * n];
    for (c, col) in columns.iter().enumerate() {
        for (t, &v) in col.iter().enumerate() {
            matrix[t * n + c] = v;
        }
    }
    Ok(matrix)
}

/// Entries of the sampled basis below this magnitude count as null when
/// computing supports.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Precomputed wavelet supports for every grid time of a length-n grid.
#[derive(Debug, Clone)]
pub struct SupportTable {
    n: usize,
    levels: usize,
    per_time: Vec<Vec<(usize, usize)>>,
}

impl SupportTable {
    /// Build the table from the sampled basis matrix.
    pub fn new(filter: WaveletFilter, n: usize) -> Result<Self> {
        let levels = check_dyadic(n, filter)? as usize;
        let matrix = basis_matrix(filter, n)?;
        let mut per_time = Vec::with_capacity(n);
        for t in 0..n {
            let row = &matrix[t * n..(t + 1) * n];
            let mut support = Vec::new();
            for j in 0..levels {
                for k in 0..(1 << j) {
                    if row[flat_index(j, k)].abs() > SUPPORT_THRESHOLD {
                        support.push((j, k));
                    }
                }
            }
            per_time.push(support);
        }
        Ok(Self {
            n,
            levels,
            per_time,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// S(t): detail indices (j,k) whose periodized wavelet is non-null at
    /// grid index `t`.
    pub fn wavelet_support(&self, t: usize) -> Result<&[(usize, usize)]> {
        self.per_time
            .get(t)
            .map(Vec::as_slice)
            .ok_or(Error::OffGrid {
                index: t,
                len: self.n,
            })
    }

    /// S([a,b]): intersection of S(t) over grid indices a..=b.
    pub fn interval_support(&self, a: usize, b: usize) -> Result<Vec<(usize, usize)>> {
        if a > b {
            return Err(Error::InvalidConfig(format!(
                "interval start {a} after end {b}"
            )));
        }
        if b >= self.n {
            return Err(Error::OffGrid {
                index: b,
                len: self.n,
            });
        }
        let mut acc: Vec<(usize, usize)> = self.per_time[a].clone();
        for t in a + 1..=b {
            let cur = &self.per_time[t];
            acc.retain(|idx| cur.binary_search(idx).is_ok());
        }
        Ok(acc)
    }
}
