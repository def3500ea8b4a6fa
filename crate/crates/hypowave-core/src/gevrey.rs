//! Gevrey-regularity bookkeeping on the Fourier side.
//!
//! A field with finite weighted norm `M = ‖e^{D·L^{1/(2s)}} f‖` obeys the
//! power bounds `‖L^k f‖ ≤ M·A^{2k}·((2k)!)^s` with `A = (s/D)^s`: the scalar
//! multiplier `μ^k e^{−D μ^{1/(2s)}}` peaks at `e^{−2ks}(2ks/D)^{2ks}`, and
//! `n^n e^{−n} ≤ n!` turns the peak into the factorial form. This module
//! computes both sides (in logarithms, so nothing overflows), fits the order
//! `s` and constant `A` back out of a measured norm sequence, and checks the
//! sum-of-squares expansion `‖L^k f‖ ≤ Σ_{|w| = 2k} ‖σ_w f‖` over ladder
//! words, which is the combinatorial half of the regularity argument.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::spectral::SpectralField;
use crate::su2::{self, SpectralFieldSU2, Su2Error};

/// Largest power `k` the norm ladder is computed for.
pub const MAX_POWER_ORDER: usize = 64;
/// First `k` used by the order fit (small-`k` rows are constant-dominated).
pub const FIT_WINDOW_START: usize = 3;
/// Minimum number of usable rows for a meaningful three-parameter fit.
pub const MIN_FIT_POINTS: usize = 5;
/// Largest `k` for the word-expansion check (`2^{2k}` words are summed).
pub const MAX_MULTINOMIAL_ORDER: usize = 4;

/// Errors from the regularity bookkeeping.
#[derive(Debug, Error)]
pub enum GevreyError {
    #[error("power order {kmax} exceeds the supported maximum {max}")]
    OrderTooLarge { kmax: usize, max: usize },
    #[error("weight parameters need s > 0 and D ≥ 0 (got s = {s}, d = {d})")]
    BadWeight { d: f64, s: f64 },
    #[error("order fit needs at least {need} positive finite norms from k = {start}, found {positive}")]
    DegenerateFit { positive: usize, need: usize, start: usize },
    #[error("least-squares solve failed: {0}")]
    FitSolve(String),
    #[error(transparent)]
    Su2(#[from] Su2Error),
}

/// `ln(n!)` as a direct log-sum; exact to rounding for the small integer
/// arguments used here (no special-function machinery involved).
pub fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// `n!` in 128-bit integers, `None` on overflow (first fails at n = 35).
pub fn factorial_u128(n: u32) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, u128::checked_mul)
}

/// Norms `‖L^k f‖` for `k = 0, …, kmax` in the Plancherel normalisation.
pub fn lk_norms(field: &SpectralField, kmax: usize) -> Result<Vec<f64>, GevreyError> {
    if kmax > MAX_POWER_ORDER {
        return Err(GevreyError::OrderTooLarge { kmax, max: MAX_POWER_ORDER });
    }
    Ok((0..=kmax)
        .map(|k| field.weighted_rows(|mu| mu.powi(k as i32)).plancherel_norm())
        .collect())
}

/// Weighted norm `‖e^{D·L^{1/(2s)}} f‖`.
///
/// `d = 0` reduces to the plain Plancherel norm; the norm is nondecreasing
/// in `d`.
pub fn exp_norm(field: &SpectralField, d: f64, s: f64) -> Result<f64, GevreyError> {
    if !(s > 0.0) || !(d >= 0.0) {
        return Err(GevreyError::BadWeight { d, s });
    }
    Ok(field
        .weighted_rows(|mu| (d * mu.powf(1.0 / (2.0 * s))).exp())
        .plancherel_norm())
}

/// Peak of the scalar multiplier `μ^k e^{−D μ^{1/(2s)}}` over `μ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupMultiplier {
    /// The supremum `e^{−2ks}(2ks/D)^{2ks}`.
    pub value: f64,
    /// The maximiser `μ* = (2ks/D)^{2s}`.
    pub maximiser: f64,
}

/// Closed form of the scalar-multiplier peak (infinite when `d = 0`, `k ≥ 1`).
pub fn sup_multiplier(k: usize, d: f64, s: f64) -> Result<SupMultiplier, GevreyError> {
    if !(s > 0.0) || !(d >= 0.0) {
        return Err(GevreyError::BadWeight { d, s });
    }
    if k == 0 {
        return Ok(SupMultiplier { value: 1.0, maximiser: 0.0 });
    }
    if d == 0.0 {
        return Ok(SupMultiplier { value: f64::INFINITY, maximiser: f64::INFINITY });
    }
    let exponent = 2.0 * k as f64 * s;
    Ok(SupMultiplier {
        value: (-exponent).exp() * (exponent / d).powf(exponent),
        maximiser: (exponent / d).powf(2.0 * s),
    })
}

/// One row of the forward power-bound comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardRow {
    pub k: usize,
    /// `‖L^k f‖`.
    pub lk_norm: f64,
    /// `ln` of the measured norm (`−∞` for a vanishing field).
    pub log_norm: f64,
    /// `ln(M·A^{2k}·((2k)!)^s)`.
    pub log_bound: f64,
    /// `log_bound − log_norm` (`+∞` when the norm vanishes).
    pub margin: f64,
}

/// Outcome of the forward regularity bound across the power ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardReport {
    pub d: f64,
    pub s: f64,
    /// The constant `A = (s/D)^s` of the factorial bound.
    pub a: f64,
    /// `ln M` with `M` the weighted norm of the field.
    pub log_m: f64,
    pub rows: Vec<ForwardRow>,
}

impl ForwardReport {
    /// Smallest margin across the ladder (nonnegative when the bound holds).
    pub fn min_margin(&self) -> f64 {
        self.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        self.min_margin() >= 0.0
    }
}

/// Checks `‖L^k f‖ ≤ M·A^{2k}·((2k)!)^s` for `k = 0, …, kmax`, in logs.
pub fn forward_constant_check(
    field: &SpectralField,
    d: f64,
    s: f64,
    kmax: usize,
) -> Result<ForwardReport, GevreyError> {
    if !(d > 0.0) || !(s > 0.0) {
        return Err(GevreyError::BadWeight { d, s });
    }
    let norms = lk_norms(field, kmax)?;
    let m = exp_norm(field, d, s)?;
    let log_m = m.ln();
    let a = (s / d).powf(s);
    let log_a = s * (s.ln() - d.ln());
    let rows = norms
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let log_norm = n.ln();
            let log_bound = log_m + 2.0 * k as f64 * log_a + s * ln_factorial(2 * k);
            ForwardRow { k, lk_norm: n, log_norm, log_bound, margin: log_bound - log_norm }
        })
        .collect();
    Ok(ForwardReport { d, s, a, log_m, rows })
}

/// Result of fitting the factorial growth model to a norm sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevreyFit {
    /// Fitted order exponent (`s` in `((2k)!)^s`).
    pub s: f64,
    /// Fitted geometric constant (`A` in `A^{2k}`).
    pub a: f64,
    /// Fitted log-prefactor (`ln M`).
    pub log_m: f64,
    /// Root-mean-square log residual over the fit window.
    pub rms_residual: f64,
}

/// Recovers `(s, A, M)` from measured `‖L^k f‖` by least squares on
/// `ln n_k ≈ ln M + 2k·ln A + s·ln((2k)!)` over the window `k ≥ 3`.
///
/// `norms[k]` is the norm at power `k`. Rows that are zero, negative, or
/// non-finite are dropped; at least [`MIN_FIT_POINTS`] usable rows must
/// remain. A sequence with no factorial growth (geometric or constant) fits
/// to `s ≈ 0`.
pub fn gevrey_order_fit(norms: &[f64]) -> Result<GevreyFit, GevreyError> {
    let window: Vec<(usize, f64)> = norms
        .iter()
        .enumerate()
        .skip(FIT_WINDOW_START)
        .filter(|&(_, &n)| n > 0.0 && n.is_finite())
        .map(|(k, &n)| (k, n.ln()))
        .collect();
    if window.len() < MIN_FIT_POINTS {
        return Err(GevreyError::DegenerateFit {
            positive: window.len(),
            need: MIN_FIT_POINTS,
            start: FIT_WINDOW_START,
        });
    }
    let design = DMatrix::from_fn(window.len(), 3, |r, c| {
        let k = window[r].0;
        match c {
            0 => 1.0,
            1 => 2.0 * k as f64,
            _ => ln_factorial(2 * k),
        }
    });
    let target = DVector::from_iterator(window.len(), window.iter().map(|&(_, ln)| ln));
    let svd = design.clone().svd(true, true);
    let coeffs = svd
        .solve(&target, 1e-12)
        .map_err(|e| GevreyError::FitSolve(e.to_owned()))?;
    let residuals = design * &coeffs - target;
    Ok(GevreyFit {
        s: coeffs[2],
        a: coeffs[1].exp(),
        log_m: coeffs[0],
        rms_residual: (residuals.norm_squared() / window.len() as f64).sqrt(),
    })
}

/// Outcome of the word-expansion comparison at one power `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultinomialReport {
    pub k: usize,
    /// Number of ladder words of length `2k` summed on the right.
    pub word_count: usize,
    /// `‖L^k f‖`.
    pub lhs: f64,
    /// `Σ_{|w| = 2k} ‖σ_w f‖`.
    pub rhs: f64,
}

impl MultinomialReport {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn passed(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Applies a ladder word symbol to every coefficient block of a field.
fn apply_word(field: &SpectralFieldSU2, word: &[su2::Ladder]) -> Result<SpectralFieldSU2, Su2Error> {
    let coeffs: BTreeMap<_, _> = field
        .iter()
        .map(|(l, m)| (l, su2::word_symbol(word, l).matrix() * m))
        .collect();
    SpectralFieldSU2::from_parts(field.lmax(), coeffs)
}

/// Checks `‖L^k f‖ ≤ Σ_{|w| = 2k} ‖σ_w f‖` over ladder words on SU(2).
///
/// The sub-Laplacian power expands into `2^{2k}` words of the two ladder
/// symbols (with scalar weights summing to one per length), so the triangle
/// inequality gives the stated bound; `k = 0` is an exact equality.
pub fn multinomial_growth_check(
    field: &SpectralFieldSU2,
    k: usize,
) -> Result<MultinomialReport, GevreyError> {
    if k > MAX_MULTINOMIAL_ORDER {
        return Err(GevreyError::OrderTooLarge { kmax: k, max: MAX_MULTINOMIAL_ORDER });
    }
    let lhs = SpectralField::Su2(field.clone())
        .weighted_rows(|mu| mu.powi(k as i32))
        .plancherel_norm();
    let words = su2::words_of_length(2 * k);
    let word_count = words.len();
    let rhs = words
        .iter()
        .map(|w| apply_word(field, w).map(|g| g.plancherel_norm()))
        .sum::<Result<f64, _>>()?;
    Ok(MultinomialReport { k, word_count, lhs, rhs })
}
