//! Hermite-basis symbol calculus for the Heisenberg group ℍ₁.
//!
//! The Schrödinger representation at a nonzero real parameter `λ` acts on
//! L²(ℝ); expanding in the normalised Hermite eigenbasis of the harmonic
//! oscillator turns left-invariant operators into (infinite) matrices that we
//! truncate at basis size `N`. The sub-Laplacian is `diag(|λ|(2k+1))`; the two
//! generating fields are single-band ladder matrices; the central field is the
//! scalar `iλ`.
//!
//! Truncation is tracked explicitly: a product of `q` banded factors is exact
//! on the top-left `(N − q)` block (each factor couples nearest neighbours
//! only), so every norm and comparison is reported on that *valid block*.
//!
//! Riesz words use the complex pair `Z = X + iY`, `Z̄ = X − iY`, which is
//! computed from the generator matrices rather than transcribed: the computed
//! pair preserves the commutation algebra, which is the testable ground
//! truth. For `λ > 0` the symbol of `Z` is purely subdiagonal and `Z̄` purely
//! superdiagonal; a sign change of `λ` exchanges the two, so invariance checks
//! across signs must conjugate the word (swap every letter). Within one sign,
//! Riesz-word entries on the valid block are exactly independent of `λ`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, Band};

/// Highest Hermite index the three-term recurrence is certified for.
pub const MAX_HERMITE_INDEX: usize = 500;

/// Normalisation constant of the Plancherel quadrature (the `n = 1` density
/// is `c·|λ| dλ`; the constant is a fixed convention, and every acceptance
/// check uses ratios in which it cancels).
pub const PLANCHEREL_CONSTANT: f64 = 1.0 / (4.0 * PI * PI);

/// Errors from the Heisenberg symbol calculus.
#[derive(Debug, Error)]
pub enum HeisError {
    #[error("the representation parameter λ must be nonzero")]
    LambdaZero,
    #[error("truncation N = {n} too small; need N ≥ {need}")]
    TruncationTooSmall { n: usize, need: usize },
    #[error("word of length {len} needs truncation > {min} (got N = {n})")]
    WordTooLong { len: usize, n: usize, min: usize },
    #[error("Hermite index {k} beyond the certified recurrence domain {max}")]
    HermiteIndex { k: usize, max: usize },
    #[error("λ-grid must be strictly ascending and exclude zero")]
    BadGrid,
    #[error("each nonempty sign block of the λ-grid needs at least 2 points for quadrature")]
    GridTooSparse,
    #[error("coefficient matrix at grid index {index} must be {expected}×{expected}, got {rows}×{cols}")]
    CoefficientShape { index: usize, expected: usize, rows: usize, cols: usize },
    #[error("grid and coefficient counts differ: {lambdas} λ-points vs {coeffs} matrices")]
    LengthMismatch { lambdas: usize, coeffs: usize },
    #[error("not a word over Z and Zbar: {input:?}")]
    BadWord { input: String },
}

/// Normalised Hermite function `h_k(x)` via the stable three-term recurrence.
///
/// `h₀ = π^{−1/4} e^{−x²/2}`, `h₁ = √2·x·h₀`, and
/// `h_{k+1} = √(2/(k+1))·x·h_k − √(k/(k+1))·h_{k−1}`; the functions are
/// L²-normalised.
pub fn hermite_function(k: usize, x: f64) -> Result<f64, HeisError> {
    if k > MAX_HERMITE_INDEX {
        return Err(HeisError::HermiteIndex { k, max: MAX_HERMITE_INDEX });
    }
    let h0 = PI.powf(-0.25) * (-x * x / 2.0).exp();
    if k == 0 {
        return Ok(h0);
    }
    let mut prev = h0;
    let mut cur = 2f64.sqrt() * x * h0;
    for j in 1..k {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * x * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// The five left-invariant operators whose symbols this module builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorField {
    X,
    Y,
    Z,
    Zbar,
    T,
}

/// A letter of the Riesz alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZLetter {
    Z,
    Zbar,
}

impl ZLetter {
    /// The conjugate letter; conjugating a word realises the λ ↦ −λ symmetry.
    pub fn conjugate(self) -> Self {
        match self {
            ZLetter::Z => ZLetter::Zbar,
            ZLetter::Zbar => ZLetter::Z,
        }
    }
}

impl fmt::Display for ZLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZLetter::Z => write!(f, "Z"),
            ZLetter::Zbar => write!(f, "Zbar"),
        }
    }
}

/// Conjugates every letter of a word (swaps Z and Z̄).
pub fn conjugate_word(word: &[ZLetter]) -> Vec<ZLetter> {
    word.iter().map(|w| w.conjugate()).collect()
}

/// Parses words like `"ZZbarZ"`, `"Z,Zbar"` or the shorthand `"ZBZ"`
/// (`B` abbreviates the conjugate letter).
pub fn parse_z_word(s: &str) -> Result<Vec<ZLetter>, HeisError> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
    let upper = cleaned.to_ascii_uppercase();
    let mut rest = upper.as_str();
    let mut out = Vec::new();
    while !rest.is_empty() {
        if let Some(tail) = rest.strip_prefix("ZBAR") {
            out.push(ZLetter::Zbar);
            rest = tail;
        } else if let Some(tail) = rest.strip_prefix('Z') {
            out.push(ZLetter::Z);
            rest = tail;
        } else if let Some(tail) = rest.strip_prefix('B') {
            out.push(ZLetter::Zbar);
            rest = tail;
        } else {
            return Err(HeisError::BadWord { input: s.to_owned() });
        }
    }
    Ok(out)
}

/// Renders a word with explicit letters, e.g. `"Z·Zbar"`.
pub fn z_word_string(word: &[ZLetter]) -> String {
    word.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("·")
}

/// A truncated operator symbol at Schrödinger parameter `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSymbol {
    lambda: f64,
    trunc: usize,
    /// Number of banded factors composing the symbol; the top-left
    /// `(trunc − pad)` block is unaffected by truncation.
    pad: usize,
    matrix: DMatrix<Complex64>,
}

impl HermiteSymbol {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    /// Side length of the truncation-clean top-left block.
    pub fn valid_block(&self) -> usize {
        self.trunc - self.pad
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Owned copy of the valid top-left block.
    pub fn valid_matrix(&self) -> DMatrix<Complex64> {
        let b = self.valid_block();
        self.matrix.view((0, 0), (b, b)).into_owned()
    }

    /// Operator norm restricted to the valid block (dense SVD path).
    pub fn op_norm_valid(&self) -> f64 {
        linalg::operator_norm(&self.valid_matrix())
    }
}

/// `sgn(λ)·√|λ|`, the signed square root the generator symbols use.
fn signed_sqrt(lambda: f64) -> f64 {
    lambda.signum() * lambda.abs().sqrt()
}

fn require_lambda(lambda: f64) -> Result<(), HeisError> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(HeisError::LambdaZero);
    }
    Ok(())
}

/// Symbol of a left-invariant vector field at `(λ, N)`.
///
/// The generators are single-band ladder matrices: X has superdiagonal
/// `√|λ|·√((k+1)/2)` and subdiagonal `−√|λ|·√(k/2)`; Y carries the same
/// profiles times `i·sgn(λ)` with both signs positive; the central field T is
/// the scalar `iλ`. Z and Z̄ are computed as `X ± iY`.
pub fn vectorfield_symbol(
    which: VectorField,
    lambda: f64,
    n: usize,
) -> Result<HermiteSymbol, HeisError> {
    require_lambda(lambda)?;
    if n < 2 {
        return Err(HeisError::TruncationTooSmall { n, need: 2 });
    }
    let root_abs = lambda.abs().sqrt();
    let root_signed = signed_sqrt(lambda);
    let i = Complex64::new(0.0, 1.0);
    let matrix = match which {
        VectorField::X => {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for k in 0..n - 1 {
                m[(k, k + 1)] = Complex64::new(root_abs * ((k as f64 + 1.0) / 2.0).sqrt(), 0.0);
                m[(k + 1, k)] = Complex64::new(-root_abs * ((k as f64 + 1.0) / 2.0).sqrt(), 0.0);
            }
            m
        }
        VectorField::Y => {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for k in 0..n - 1 {
                let profile = ((k as f64 + 1.0) / 2.0).sqrt();
                m[(k, k + 1)] = i * root_signed * profile;
                m[(k + 1, k)] = i * root_signed * profile;
            }
            m
        }
        VectorField::Z => {
            let x = vectorfield_symbol(VectorField::X, lambda, n)?.matrix;
            let y = vectorfield_symbol(VectorField::Y, lambda, n)?.matrix;
            x + y.map(|z| z * i)
        }
        VectorField::Zbar => {
            let x = vectorfield_symbol(VectorField::X, lambda, n)?.matrix;
            let y = vectorfield_symbol(VectorField::Y, lambda, n)?.matrix;
            x - y.map(|z| z * i)
        }
        VectorField::T => DMatrix::from_diagonal_element(n, n, i * lambda),
    };
    let pad = if which == VectorField::T { 0 } else { 1 };
    Ok(HermiteSymbol { lambda, trunc: n, pad, matrix })
}

/// Diagonal sub-Laplacian symbol `diag(|λ|(2k+1))`, exact at every truncation.
pub fn sublaplacian_symbol(lambda: f64, n: usize) -> Result<HermiteSymbol, HeisError> {
    require_lambda(lambda)?;
    if n < 1 {
        return Err(HeisError::TruncationTooSmall { n, need: 1 });
    }
    let matrix = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|k| Complex64::new(lambda.abs() * (2.0 * k as f64 + 1.0), 0.0)),
    ));
    Ok(HermiteSymbol { lambda, trunc: n, pad: 0, matrix })
}

/// Sub-Laplacian eigenvalues `|λ|(2k+1)` for `k = 0..n`.
pub fn sublaplacian_eigenvalues(lambda: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lambda.abs() * (2.0 * k as f64 + 1.0)).collect()
}

/// Max deviation of `[π(X), π(Y)] − iλ·I` on the interior `(N−1)` block.
///
/// The commutation relation of the two generators reproduces the central
/// field exactly in this basis; only the last row and column feel the
/// truncation.
pub fn commutator_check(lambda: f64, n: usize) -> Result<f64, HeisError> {
    if n < 3 {
        return Err(HeisError::TruncationTooSmall { n, need: 3 });
    }
    let x = vectorfield_symbol(VectorField::X, lambda, n)?.matrix;
    let y = vectorfield_symbol(VectorField::Y, lambda, n)?.matrix;
    let commutator = &x * &y - &y * &x;
    let block = n - 1;
    let i_lambda = Complex64::new(0.0, lambda);
    let dev = (0..block)
        .flat_map(|r| (0..block).map(move |c| (r, c)))
        .map(|(r, c)| {
            let expected = if r == c { i_lambda } else { Complex64::new(0.0, 0.0) };
            (commutator[(r, c)] - expected).norm()
        })
        .fold(0.0, f64::max);
    Ok(dev)
}

/// Max deviation of `−(π(X)² + π(Y)²) − π(L)` on the interior `(N−2)` block.
///
/// Unlike the SU(2) ladder convention, the Cartesian sum-of-squares identity
/// holds exactly for these generator matrices.
pub fn sublaplacian_consistency(lambda: f64, n: usize) -> Result<f64, HeisError> {
    if n < 3 {
        return Err(HeisError::TruncationTooSmall { n, need: 3 });
    }
    let x = vectorfield_symbol(VectorField::X, lambda, n)?.matrix;
    let y = vectorfield_symbol(VectorField::Y, lambda, n)?.matrix;
    let l = sublaplacian_symbol(lambda, n)?.matrix;
    let lhs = -(&x * &x + &y * &y);
    let block = n - 2;
    let dev = (0..block)
        .flat_map(|r| (0..block).map(move |c| (r, c)))
        .map(|(r, c)| (lhs[(r, c)] - l[(r, c)]).norm())
        .fold(0.0, f64::max);
    Ok(dev)
}

/// Single-band form of a Riesz letter (crate-internal fast path).
///
/// Derived from `Z = X + iY`, `Z̄ = X − iY`: for `λ > 0` the superdiagonal of
/// Z cancels and its subdiagonal doubles (and dually for Z̄); a sign flip of
/// `λ` exchanges the two shapes.
fn z_band(letter: ZLetter, lambda: f64, n: usize) -> Band {
    let r = lambda.abs().sqrt();
    let lower = matches!(
        (letter, lambda > 0.0),
        (ZLetter::Z, true) | (ZLetter::Zbar, false)
    );
    if lower {
        // Entry (k, k−1) = −2√|λ|·√(k/2).
        Band::from_fn(n, -1, |k| -2.0 * r * (k as f64 / 2.0).sqrt())
    } else {
        // Entry (k, k+1) = 2√|λ|·√((k+1)/2).
        Band::from_fn(n, 1, |k| 2.0 * r * ((k as f64 + 1.0) / 2.0).sqrt())
    }
}

fn riesz_band(word: &[ZLetter], lambda: f64, n: usize) -> Result<Band, HeisError> {
    require_lambda(lambda)?;
    let q = word.len();
    if 2 * q >= n {
        return Err(HeisError::WordTooLong { len: q, n, min: 2 * q });
    }
    let product = word
        .iter()
        .fold(Band::identity(n), |acc, &w| acc.mul(&z_band(w, lambda, n)));
    let weights: Vec<f64> = sublaplacian_eigenvalues(lambda, n)
        .into_iter()
        .map(|mu| mu.powf(-(q as f64) / 2.0))
        .collect();
    Ok(product.mul_diag(&weights))
}

/// Riesz word symbol `π(w₁)···π(w_q)·π(L)^{−q/2}`.
///
/// The `√|λ|` factors of the letters telescope exactly against the
/// `|λ|^{−q/2}` of the weight, so valid-block entries do not depend on `λ`
/// within a sign; across signs they match the conjugated word. The empty word
/// returns the identity.
pub fn riesz_symbol(word: &[ZLetter], lambda: f64, n: usize) -> Result<HermiteSymbol, HeisError> {
    let band = riesz_band(word, lambda, n)?;
    Ok(HermiteSymbol { lambda, trunc: n, pad: word.len(), matrix: band.to_dense() })
}

/// Operator norm of a Riesz word on its valid block, via the single-diagonal
/// lemma (no dense matrix is built).
pub fn riesz_op_norm_valid(word: &[ZLetter], lambda: f64, n: usize) -> Result<f64, HeisError> {
    let band = riesz_band(word, lambda, n)?;
    Ok(band.op_norm_on_block(n - word.len()))
}

/// Largest valid-block entry deviation of Riesz symbols across a λ-grid.
///
/// Within each sign the word is compared as given; comparisons between
/// opposite signs conjugate the word (swap Z and Z̄), which is the exact
/// symmetry `π_{−λ}(w) = π_{|λ|}(w̄)` of these symbols.
pub fn lambda_invariance_max_dev(
    word: &[ZLetter],
    lambdas: &[f64],
    n: usize,
) -> Result<f64, HeisError> {
    if lambdas.is_empty() {
        return Err(HeisError::BadGrid);
    }
    let conjugated = conjugate_word(word);
    let reference = riesz_band(word, lambdas[0].abs(), n)?;
    let block = reference.dim() - word.len();
    let mut dev: f64 = 0.0;
    for &lambda in lambdas {
        let effective: &[ZLetter] = if lambda > 0.0 { word } else { &conjugated };
        let band = riesz_band(effective, lambda, n)?;
        // Conjugating the word when the sign flips also flips every letter's
        // diagonal side, so all compared bands share one offset and it
        // suffices to compare along that diagonal inside the valid block.
        debug_assert_eq!(band.offset(), reference.offset());
        for r in 0..block {
            let col = r as i64 + band.offset();
            if (0..block as i64).contains(&col) {
                dev = dev.max((band.entry(r) - reference.entry(r)).abs());
            }
        }
    }
    Ok(dev)
}

/// Valid-block deviation between a Riesz word computed at truncation `n` and
/// at truncation `2n` (truncation hygiene witness).
pub fn truncation_doubling_dev(word: &[ZLetter], lambda: f64, n: usize) -> Result<f64, HeisError> {
    let coarse = riesz_symbol(word, lambda, n)?;
    let fine = riesz_symbol(word, lambda, 2 * n)?;
    let block = coarse.valid_block();
    let a = coarse.matrix();
    let b = fine.matrix();
    let mut dev: f64 = 0.0;
    for r in 0..block {
        for c in 0..block {
            dev = dev.max((a[(r, c)] - b[(r, c)]).norm());
        }
    }
    Ok(dev)
}

/// Symmetric logarithmically spaced λ-grid `±[lmin, lmax]`, ascending.
pub fn log_lambda_grid(lmin: f64, lmax: f64, per_sign: usize) -> Vec<f64> {
    assert!(lmin > 0.0 && lmax > lmin && per_sign >= 2);
    let positives: Vec<f64> = (0..per_sign)
        .map(|i| {
            let t = i as f64 / (per_sign - 1) as f64;
            lmin * (lmax / lmin).powf(t)
        })
        .collect();
    let mut grid: Vec<f64> = positives.iter().rev().map(|&x| -x).collect();
    grid.extend(&positives);
    grid
}

/// The default verification grid: three decades per sign, 33 points each.
pub fn default_lambda_grid() -> Vec<f64> {
    log_lambda_grid(1e-2, 1e2, 33)
}

/// A Fourier-side field on ℍ₁: one truncated coefficient matrix per grid λ.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFieldHeis {
    trunc: usize,
    lambdas: Vec<f64>,
    coeffs: Vec<DMatrix<Complex64>>,
}

impl SpectralFieldHeis {
    /// Builds a field after validating the grid (strictly ascending, no zero,
    /// ≥ 2 points per nonempty sign block) and the coefficient shapes.
    pub fn new(
        trunc: usize,
        lambdas: Vec<f64>,
        coeffs: Vec<DMatrix<Complex64>>,
    ) -> Result<Self, HeisError> {
        if lambdas.len() != coeffs.len() {
            return Err(HeisError::LengthMismatch {
                lambdas: lambdas.len(),
                coeffs: coeffs.len(),
            });
        }
        if lambdas.iter().any(|&l| l == 0.0 || !l.is_finite())
            || lambdas.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(HeisError::BadGrid);
        }
        let negatives = lambdas.iter().filter(|&&l| l < 0.0).count();
        let positives = lambdas.len() - negatives;
        if negatives == 1 || positives == 1 {
            return Err(HeisError::GridTooSparse);
        }
        for (index, m) in coeffs.iter().enumerate() {
            if m.nrows() != trunc || m.ncols() != trunc {
                return Err(HeisError::CoefficientShape {
                    index,
                    expected: trunc,
                    rows: m.nrows(),
                    cols: m.ncols(),
                });
            }
        }
        Ok(SpectralFieldHeis { trunc, lambdas, coeffs })
    }

    /// Zero field on the given grid.
    pub fn zero(trunc: usize, lambdas: Vec<f64>) -> Result<Self, HeisError> {
        let coeffs = vec![DMatrix::zeros(trunc, trunc); lambdas.len()];
        SpectralFieldHeis::new(trunc, lambdas, coeffs)
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn coeff(&self, index: usize) -> &DMatrix<Complex64> {
        &self.coeffs[index]
    }

    pub fn coeff_mut(&mut self, index: usize) -> &mut DMatrix<Complex64> {
        &mut self.coeffs[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DMatrix<Complex64>)> {
        self.lambdas.iter().copied().zip(self.coeffs.iter())
    }

    /// Trapezoid quadrature weights, computed independently on each sign
    /// block so the excluded origin never enters a difference.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let mut weights = vec![0.0; self.lambdas.len()];
        let split = self.lambdas.iter().position(|&l| l > 0.0).unwrap_or(self.lambdas.len());
        for block in [&self.lambdas[..split], &self.lambdas[split..]] {
            if block.len() < 2 {
                continue;
            }
            let offset = if block.as_ptr() == self.lambdas.as_ptr() { 0 } else { split };
            for i in 0..block.len() {
                let lo = if i == 0 { block[0] } else { block[i - 1] };
                let hi = if i == block.len() - 1 { block[i] } else { block[i + 1] };
                weights[offset + i] = (hi - lo) / 2.0;
            }
        }
        weights
    }

    /// Plancherel-type norm `√(c · Σ_j w_j ‖f̂(λ_j)‖²_HS |λ_j|)` with the
    /// fixed constant [`PLANCHEREL_CONSTANT`] and per-sign trapezoid weights.
    pub fn plancherel_norm(&self) -> f64 {
        let weights = self.quadrature_weights();
        let sum: f64 = self
            .iter()
            .zip(&weights)
            .map(|((lambda, m), &w)| {
                w * lambda.abs() * m.iter().map(|z| z.norm_sqr()).sum::<f64>()
            })
            .sum();
        (PLANCHEREL_CONSTANT * sum).sqrt()
    }

    /// Scales every coefficient by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        SpectralFieldHeis {
            trunc: self.trunc,
            lambdas: self.lambdas.clone(),
            coeffs: self.coeffs.iter().map(|m| m.map(|z| z * factor)).collect(),
        }
    }

    /// Left-multiplies every coefficient by a function of the sub-Laplacian:
    /// row `k` of `f̂(λ)` is scaled by `g(|λ|(2k+1))`.
    pub fn weighted_rows(&self, g: impl Fn(f64) -> f64) -> Self {
        let coeffs = self
            .iter()
            .map(|(lambda, m)| {
                let mut out = m.clone();
                for (k, mu) in sublaplacian_eigenvalues(lambda, self.trunc).into_iter().enumerate()
                {
                    let w = g(mu);
                    for c in 0..out.ncols() {
                        out[(k, c)] *= w;
                    }
                }
                out
            })
            .collect();
        SpectralFieldHeis { trunc: self.trunc, lambdas: self.lambdas.clone(), coeffs }
    }

    /// Re-embeds the field at a larger truncation (new rows/columns zero).
    pub fn with_trunc(&self, trunc: usize) -> Result<Self, HeisError> {
        if trunc < self.trunc {
            return Err(HeisError::TruncationTooSmall { n: trunc, need: self.trunc });
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|m| {
                let mut out = DMatrix::<Complex64>::zeros(trunc, trunc);
                out.view_mut((0, 0), (self.trunc, self.trunc)).copy_from(m);
                out
            })
            .collect();
        SpectralFieldHeis::new(trunc, self.lambdas.clone(), coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Trapezoid quadrature of `f` over `[-20, 20]`; spectrally accurate for
    /// rapidly decaying smooth integrands.
    fn quad(f: impl Fn(f64) -> f64) -> f64 {
        let n = 4000;
        let (a, b) = (-20.0, 20.0);
        let h = (b - a) / n as f64;
        let mut sum = 0.5 * (f(a) + f(b));
        for i in 1..n {
            sum += f(a + i as f64 * h);
        }
        sum * h
    }

    #[test]
    fn hermite_ground_state_and_orthonormality() {
        let h0_at_0 = hermite_function(0, 0.0).unwrap();
        assert_relative_eq!(h0_at_0, PI.powf(-0.25), max_relative = 1e-12);
        assert!((h0_at_0 - 0.7511).abs() < 1e-4);

        let overlap = quad(|x| hermite_function(0, x).unwrap() * hermite_function(1, x).unwrap());
        assert!(overlap.abs() <= 1e-8);

        let norm3 = quad(|x| hermite_function(3, x).unwrap().powi(2));
        assert!((norm3 - 1.0).abs() <= 1e-8);

        assert!(hermite_function(501, 0.0).is_err());
    }

    #[test]
    fn generator_entries_match_hand_values() {
        // λ = 4, N = 3: X has (0,1) = √2, (1,0) = −√2, (1,2) = 2, (2,1) = −2.
        let x = vectorfield_symbol(VectorField::X, 4.0, 3).unwrap();
        let m = x.matrix();
        assert_relative_eq!(m[(0, 1)].re, 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(m[(1, 0)].re, -(2f64.sqrt()), max_relative = 1e-14);
        assert_relative_eq!(m[(1, 2)].re, 2.0, max_relative = 1e-14);
        assert_relative_eq!(m[(2, 1)].re, -2.0, max_relative = 1e-14);

        let t = vectorfield_symbol(VectorField::T, 2.0, 4).unwrap();
        for i in 0..4 {
            assert_eq!(t.matrix()[(i, i)], Complex64::new(0.0, 2.0));
        }
        assert_eq!(t.pad(), 0);
    }

    #[test]
    fn sublaplacian_diagonal_depends_on_abs_lambda() {
        let l = sublaplacian_symbol(1.0, 3).unwrap();
        assert_eq!(l.matrix()[(0, 0)].re, 1.0);
        assert_eq!(l.matrix()[(1, 1)].re, 3.0);
        assert_eq!(l.matrix()[(2, 2)].re, 5.0);

        let lp = sublaplacian_symbol(2.0, 5).unwrap();
        let ln = sublaplacian_symbol(-2.0, 5).unwrap();
        assert_eq!(lp.matrix()[(3, 3)].re, 14.0);
        assert_eq!(ln.matrix()[(3, 3)].re, 14.0);

        assert!(sublaplacian_symbol(0.0, 4).is_err());
    }

    #[test]
    fn z_is_single_band_and_matches_x_plus_iy() {
        for &lambda in &[1.0, -1.0, 2.5, -0.3] {
            let n = 6;
            let z = vectorfield_symbol(VectorField::Z, lambda, n).unwrap();
            let zbar = vectorfield_symbol(VectorField::Zbar, lambda, n).unwrap();
            // Band fast path agrees with the computed dense X + iY.
            let zb = z_band(ZLetter::Z, lambda, n).to_dense();
            let zbarb = z_band(ZLetter::Zbar, lambda, n).to_dense();
            assert!(linalg::max_entry_diff(&zb, z.matrix()) < 1e-13);
            assert!(linalg::max_entry_diff(&zbarb, zbar.matrix()) < 1e-13);
            // Single-band structure: one of the two off-diagonals vanishes.
            let sub: f64 = (1..n).map(|k| z.matrix()[(k, k - 1)].norm()).sum();
            let sup: f64 = (0..n - 1).map(|k| z.matrix()[(k, k + 1)].norm()).sum();
            assert!(sub == 0.0 || sup == 0.0);
        }
    }

    #[test]
    fn commutator_reproduces_central_field() {
        assert!(commutator_check(2.0, 8).unwrap() <= 1e-12);
        assert!(commutator_check(-3.0, 8).unwrap() <= 1e-12);
        assert!(commutator_check(1.0, 3).unwrap() <= 1e-12);
    }

    #[test]
    fn sum_of_squares_reproduces_sublaplacian() {
        for &lambda in &[1.0, -1.0, 4.0, -4.0] {
            assert!(sublaplacian_consistency(lambda, 64).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn sublaplacian_from_complex_pair() {
        // L = −(ZZ̄ + Z̄Z)/2 follows from Z = X + iY and the sum-of-squares
        // identity; it holds on the (N−2) block for both signs of λ.
        for &lambda in &[2.0, -2.0] {
            let n = 16;
            let z = vectorfield_symbol(VectorField::Z, lambda, n).unwrap().into_matrix();
            let zbar = vectorfield_symbol(VectorField::Zbar, lambda, n).unwrap().into_matrix();
            let l = sublaplacian_symbol(lambda, n).unwrap().into_matrix();
            let lhs = -(&z * &zbar + &zbar * &z) / Complex64::new(2.0, 0.0);
            let block = n - 2;
            for r in 0..block {
                for c in 0..block {
                    assert!((lhs[(r, c)] - l[(r, c)]).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn generators_are_skew_adjoint() {
        for &lambda in &[1.0, -2.0] {
            for which in [VectorField::X, VectorField::Y] {
                let m = vectorfield_symbol(which, lambda, 8).unwrap().into_matrix();
                let defect = linalg::max_entry_diff(&m.adjoint(), &m.map(|z| -z));
                assert!(defect <= 1e-13);
            }
        }
    }

    #[test]
    fn riesz_words_are_lambda_invariant_within_a_sign() {
        let word = [ZLetter::Z];
        let a = riesz_symbol(&word, 1.0, 64).unwrap();
        let b = riesz_symbol(&word, 5.0, 64).unwrap();
        let block = a.valid_block();
        for r in 0..block {
            for c in 0..block {
                assert!((a.matrix()[(r, c)] - b.matrix()[(r, c)]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn sign_flip_matches_conjugated_word() {
        let word = [ZLetter::Z, ZLetter::Z, ZLetter::Zbar];
        let neg = riesz_symbol(&word, -2.0, 32).unwrap();
        let pos = riesz_symbol(&conjugate_word(&word), 2.0, 32).unwrap();
        let block = neg.valid_block();
        for r in 0..block {
            for c in 0..block {
                assert!((neg.matrix()[(r, c)] - pos.matrix()[(r, c)]).norm() <= 1e-12);
            }
        }
        // Full-grid check through the invariance helper.
        let dev =
            lambda_invariance_max_dev(&word, &[-10.0, -1.0, -0.1, 0.1, 1.0, 10.0], 64).unwrap();
        assert!(dev <= 1e-12, "dev = {dev:.3e}");
    }

    #[test]
    fn balanced_word_is_diagonal_with_bounded_norm() {
        let symbol = riesz_symbol(&[ZLetter::Z, ZLetter::Zbar], 1.0, 64).unwrap();
        let block = symbol.valid_block();
        for r in 0..block {
            for c in 0..block {
                if r != c {
                    assert!(symbol.matrix()[(r, c)].norm() <= 1e-14);
                }
            }
        }
        assert!(symbol.op_norm_valid() <= 16.0);
        let fast = riesz_op_norm_valid(&[ZLetter::Z, ZLetter::Zbar], 1.0, 64).unwrap();
        assert_relative_eq!(fast, symbol.op_norm_valid(), max_relative = 1e-12);
    }

    #[test]
    fn empty_word_is_identity() {
        let symbol = riesz_symbol(&[], 3.0, 8).unwrap();
        let id = DMatrix::<Complex64>::identity(8, 8);
        assert!(linalg::max_entry_diff(symbol.matrix(), &id) <= 1e-15);
    }

    #[test]
    fn word_length_guard() {
        assert!(matches!(
            riesz_symbol(&[ZLetter::Z; 4], 1.0, 8),
            Err(HeisError::WordTooLong { .. })
        ));
    }

    #[test]
    fn truncation_doubling_leaves_valid_block() {
        let word = [ZLetter::Z, ZLetter::Zbar, ZLetter::Z];
        assert!(truncation_doubling_dev(&word, 1.5, 32).unwrap() <= 1e-12);
    }

    #[test]
    fn plancherel_norm_examples() {
        let grid = log_lambda_grid(0.5, 2.0, 3);
        let zero = SpectralFieldHeis::zero(4, grid.clone()).unwrap();
        assert_eq!(zero.plancherel_norm(), 0.0);

        // Unit entry at a single grid point: norm = √(c·w·|λ|).
        let mut f = SpectralFieldHeis::zero(4, grid.clone()).unwrap();
        let idx = 4; // second positive point
        f.coeff_mut(idx)[(0, 0)] = Complex64::new(1.0, 0.0);
        let w = f.quadrature_weights()[idx];
        let expected = (PLANCHEREL_CONSTANT * w * grid[idx].abs()).sqrt();
        assert_relative_eq!(f.plancherel_norm(), expected, max_relative = 1e-13);

        let tripled = f.scaled(Complex64::new(3.0, 0.0));
        assert_relative_eq!(tripled.plancherel_norm(), 3.0 * f.plancherel_norm(), max_relative = 1e-13);
    }

    #[test]
    fn grid_validation() {
        assert!(SpectralFieldHeis::zero(2, vec![-1.0, 0.0, 1.0, 2.0]).is_err());
        assert!(SpectralFieldHeis::zero(2, vec![1.0, 1.0, 2.0, 3.0]).is_err());
        assert!(SpectralFieldHeis::zero(2, vec![1.0]).is_err());
        assert!(SpectralFieldHeis::zero(2, vec![-2.0, -1.0, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn weighted_rows_tracks_eigenvalues() {
        let grid = vec![1.0, 2.0];
        let mut f = SpectralFieldHeis::zero(3, grid).unwrap();
        f.coeff_mut(0)[(1, 0)] = Complex64::new(1.0, 0.0);
        let lf = f.weighted_rows(|mu| mu);
        // Row k = 1 at λ = 1 scales by |λ|(2k+1) = 3.
        assert_relative_eq!(lf.coeff(0)[(1, 0)].re, 3.0, max_relative = 1e-15);
    }

    #[test]
    fn z_word_parsing() {
        assert_eq!(parse_z_word("ZZbar").unwrap(), vec![ZLetter::Z, ZLetter::Zbar]);
        assert_eq!(parse_z_word("Z,Zbar,Z").unwrap(), vec![
            ZLetter::Z,
            ZLetter::Zbar,
            ZLetter::Z
        ]);
        assert_eq!(parse_z_word("zbz").unwrap(), vec![ZLetter::Z, ZLetter::Zbar, ZLetter::Z]);
        assert!(parse_z_word("ZQ").is_err());
        assert_eq!(z_word_string(&[ZLetter::Z, ZLetter::Zbar]), "Z·Zbar");
    }

    proptest! {
        /// Riesz valid-block entries are λ-independent within the positive
        /// half-line for arbitrary words.
        #[test]
        fn riesz_lambda_invariance(l1 in 0.05f64..50.0, l2 in 0.05f64..50.0, mask in 0usize..8) {
            let word: Vec<ZLetter> = (0..3)
                .map(|i| if mask >> i & 1 == 0 { ZLetter::Z } else { ZLetter::Zbar })
                .collect();
            let a = riesz_symbol(&word, l1, 16).unwrap();
            let b = riesz_symbol(&word, l2, 16).unwrap();
            let block = a.valid_block();
            for r in 0..block {
                for c in 0..block {
                    prop_assert!((a.matrix()[(r, c)] - b.matrix()[(r, c)]).norm() <= 1e-11);
                }
            }
        }

        /// The generator symbols stay skew-Hermitian across the parameter
        /// range.
        #[test]
        fn skew_adjointness(lambda in -20.0f64..20.0) {
            prop_assume!(lambda.abs() > 1e-6);
            let x = vectorfield_symbol(VectorField::X, lambda, 6).unwrap().into_matrix();
            let defect = linalg::max_entry_diff(&x.adjoint(), &x.map(|z| -z));
            prop_assert!(defect <= 1e-12);
        }
    }
}
