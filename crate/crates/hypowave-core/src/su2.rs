//! Symbol calculus for the irreducible unitary representations of SU(2).
//!
//! Representations are indexed by a half-integer `l`; the representation space
//! has dimension `2l + 1` and carries explicit ladder matrices for the two
//! generating vector fields, the diagonal sub-Laplacian symbol
//! `diag(l(l+1) − m²)`, and the scalar Laplace–Beltrami symbol `l(l+1)·I`.
//! On top of those this module builds spectral powers, Riesz-transform words
//! `σ_w · σ_L^{−|w|/2}` with their operator-norm sweeps, Plancherel-weighted
//! field norms, and the Bessel-type trace sum that controls Sobolev embedding.
//!
//! Every word in the two ladder letters is supported on a single matrix
//! diagonal, so operator norms of word symbols equal their largest entry
//! modulus; sweeps exploit that through [`crate::linalg::Band`] arithmetic and
//! the tests cross-validate against dense SVD.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Band, MatrixNorms};

/// Tolerance on fitted growth exponents that are expected to vanish
/// (operator norms of Riesz words are uniform in `l`).
pub const FLAT_EXPONENT_TOL: f64 = 0.1;
/// Tolerance on the fitted exponent of the conjugated single-letter factor,
/// whose norm grows linearly in `l`.
pub const LINEAR_EXPONENT_TOL: f64 = 0.1;
/// Tolerance on the fitted exponent of the weighted factor, whose norm scales
/// like `l^{2−q}` for a length-`q` word.
pub const WEIGHTED_EXPONENT_TOL: f64 = 0.2;

/// Errors from the SU(2) symbol calculus.
#[derive(Debug, Error)]
pub enum Su2Error {
    /// Inverse powers of the sub-Laplacian are undefined on the trivial
    /// representation, whose symbol is the 1×1 zero matrix.
    #[error("l = 0 excluded: the sub-Laplacian symbol is not invertible there")]
    ZeroModeInverse,
    /// A negative or fractional matrix power hit a nonpositive eigenvalue.
    #[error("spectral power undefined: nonpositive eigenvalue {value:.6e}")]
    NonpositiveEigenvalue { value: f64 },
    /// Spectral powers require a diagonal or Hermitian input.
    #[error("matrix is not Hermitian (defect {defect:.3e}); spectral power undefined")]
    NotHermitian { defect: f64 },
    /// A field coefficient matrix does not match the dimension of its `l`.
    #[error("coefficient matrix for 2l = {twice} must be {expected}×{expected}, got {rows}×{cols}")]
    CoefficientShape { twice: u32, expected: usize, rows: usize, cols: usize },
    /// A field coefficient was inserted above the declared cutoff.
    #[error("representation 2l = {twice} exceeds the field cutoff 2l_max = {cutoff}")]
    AboveCutoff { twice: u32, cutoff: u32 },
    /// A string did not parse as a half-integer.
    #[error("not a half-integer: {input:?} (use e.g. \"3\", \"3.5\" or \"7/2\")")]
    BadHalfInt { input: String },
    /// A string did not parse as a ladder word.
    #[error("not a ladder word: {input:?} (expected letters X and Y)")]
    BadWord { input: String },
}

/// A nonnegative half-integer stored exactly as `2l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt {
    twice: u32,
}

impl HalfInt {
    /// Builds from the doubled value `2l`.
    pub const fn from_twice(twice: u32) -> Self {
        HalfInt { twice }
    }

    /// The doubled value `2l`.
    pub const fn twice(self) -> u32 {
        self.twice
    }

    /// The value `l` as a float.
    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Dimension `2l + 1` of the representation space.
    pub const fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub const fn is_zero(self) -> bool {
        self.twice == 0
    }

    /// `l(l+1)`, the Laplace–Beltrami eigenvalue, computed exactly.
    pub fn casimir(self) -> f64 {
        let t = self.twice as f64;
        t * (t + 2.0) / 4.0
    }

    /// All half-integers `0, 1/2, 1, …, lmax` in ascending order.
    pub fn range_inclusive(lmax: HalfInt) -> impl Iterator<Item = HalfInt> {
        (0..=lmax.twice).map(HalfInt::from_twice)
    }

    /// Converts a float that should be a half-integer (`2x` within 1e-9 of an
    /// integer).
    pub fn try_from_f64(x: f64) -> Result<Self, Su2Error> {
        let doubled = 2.0 * x;
        let rounded = doubled.round();
        if x < 0.0 || (doubled - rounded).abs() > 1e-9 || rounded > u32::MAX as f64 {
            return Err(Su2Error::BadHalfInt { input: format!("{x}") });
        }
        Ok(HalfInt::from_twice(rounded as u32))
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Su2Error;

    fn from_str(s: &str) -> Result<Self, Su2Error> {
        let bad = || Su2Error::BadHalfInt { input: s.to_owned() };
        if let Some((num, den)) = s.split_once('/') {
            if den.trim() != "2" {
                return Err(bad());
            }
            let twice: u32 = num.trim().parse().map_err(|_| bad())?;
            return Ok(HalfInt::from_twice(twice));
        }
        let x: f64 = s.trim().parse().map_err(|_| bad())?;
        HalfInt::try_from_f64(x)
    }
}

/// The two generating letters of the ladder alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ladder {
    X,
    Y,
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ladder::X => write!(f, "X"),
            Ladder::Y => write!(f, "Y"),
        }
    }
}

/// Parses a word like `"XYX"` into ladder letters.
pub fn parse_word(s: &str) -> Result<Vec<Ladder>, Su2Error> {
    s.trim()
        .chars()
        .map(|c| match c.to_ascii_uppercase() {
            'X' => Ok(Ladder::X),
            'Y' => Ok(Ladder::Y),
            _ => Err(Su2Error::BadWord { input: s.to_owned() }),
        })
        .collect()
}

/// Renders a word as a compact string like `"XYX"`.
pub fn word_string(word: &[Ladder]) -> String {
    word.iter().map(|w| w.to_string()).collect()
}

/// A dense operator symbol at the representation `l`.
///
/// Rows and columns are indexed by `m, n ∈ {−l, …, l}` in ascending order;
/// the storage index of `m` is `m + l`, kept exact through doubled integers.
#[derive(Debug, Clone, PartialEq)]
pub struct RepSymbol {
    l: HalfInt,
    matrix: DMatrix<Complex64>,
}

impl RepSymbol {
    /// Wraps a matrix after checking its shape against `dim(l)`.
    pub fn new(l: HalfInt, matrix: DMatrix<Complex64>) -> Result<Self, Su2Error> {
        if matrix.nrows() != l.dim() || matrix.ncols() != l.dim() {
            return Err(Su2Error::CoefficientShape {
                twice: l.twice(),
                expected: l.dim(),
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(RepSymbol { l, matrix })
    }

    pub fn l(&self) -> HalfInt {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Storage index of the doubled row label `m2 ∈ {−2l, −2l+2, …, 2l}`.
    pub fn storage_index(&self, m2: i64) -> usize {
        let t = self.l.twice() as i64;
        assert!(m2.abs() <= t && (m2 + t) % 2 == 0, "label out of range");
        ((m2 + t) / 2) as usize
    }

    /// Entry addressed by doubled mathematical labels `(m2, n2) = (2m, 2n)`.
    pub fn entry(&self, m2: i64, n2: i64) -> Complex64 {
        self.matrix[(self.storage_index(m2), self.storage_index(n2))]
    }

    /// Operator, max-entry and Hilbert–Schmidt norms (dense SVD path).
    pub fn norms(&self) -> MatrixNorms {
        linalg::matrix_norms(&self.matrix)
    }
}

/// Eigenvalues `l(l+1) − m²` of the sub-Laplacian symbol, by storage row.
pub fn sublaplacian_eigenvalues(l: HalfInt) -> Vec<f64> {
    let t = l.twice() as i64;
    (0..l.dim())
        .map(|r| {
            let m2 = 2 * r as i64 - t;
            // (t(t+2) − (2m)²)/4 with every product exact in f64.
            (t * (t + 2) - m2 * m2) as f64 / 4.0
        })
        .collect()
}

/// Ladder symbol as a single-diagonal band (crate-internal fast path).
pub(crate) fn ladder_band(which: Ladder, l: HalfInt) -> Band {
    let dim = l.dim();
    let t = l.twice() as usize;
    match which {
        // Entry (c+1, c) = −√((l−n)(l+n+1)) with column label n; in doubled
        // storage terms the product is (t − c)(c + 1), an exact integer.
        Ladder::X => Band::from_fn(dim, -1, |r| {
            let c = r - 1;
            -(((t - c) * (c + 1)) as f64).sqrt()
        }),
        // Entry (c−1, c) = −√((l+n)(l−n+1)); the doubled-storage product is
        // (r + 1)(t − r) for row r = c − 1.
        Ladder::Y => Band::from_fn(dim, 1, |r| -(((r + 1) * (t - r)) as f64).sqrt()),
    }
}

/// The ladder symbol of a generating letter at representation `l`.
///
/// Entries are `−√((l−n)(l+n+1))` on the subdiagonal (letter X) and
/// `−√((l+n)(l−n+1))` on the superdiagonal (letter Y), with `n` the column
/// label. At `l = 0` both are the 1×1 zero matrix.
pub fn ladder_symbol(which: Ladder, l: HalfInt) -> RepSymbol {
    RepSymbol { l, matrix: ladder_band(which, l).to_dense() }
}

/// The diagonal sub-Laplacian symbol `diag(l(l+1) − m²)`.
pub fn sublaplacian_symbol(l: HalfInt) -> RepSymbol {
    let eig = sublaplacian_eigenvalues(l);
    let matrix = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        l.dim(),
        eig.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    RepSymbol { l, matrix }
}

/// The scalar Laplace–Beltrami symbol `l(l+1)·I`.
pub fn laplacian_symbol(l: HalfInt) -> RepSymbol {
    let matrix = DMatrix::from_diagonal_element(l.dim(), l.dim(), Complex64::new(l.casimir(), 0.0));
    RepSymbol { l, matrix }
}

/// Applies `x ↦ x^p` to a scalar spectrum value, guarding domain errors.
fn scalar_power(x: f64, p: f64) -> Result<f64, Su2Error> {
    let needs_positive = p < 0.0 || p.fract() != 0.0;
    if needs_positive && x <= 0.0 && !(x == 0.0 && p > 0.0) {
        return Err(Su2Error::NonpositiveEigenvalue { value: x });
    }
    Ok(x.powf(p))
}

/// Functional calculus `f(sym)` for diagonal or Hermitian symbols.
fn spectral_map(
    sym: &RepSymbol,
    f: impl Fn(f64) -> Result<f64, Su2Error>,
) -> Result<RepSymbol, Su2Error> {
    let m = &sym.matrix;
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let is_diagonal = (0..n)
        .all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() <= 1e-14 * scale));
    if is_diagonal {
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            let d = m[(i, i)];
            if d.im.abs() > 1e-12 * scale {
                return Err(Su2Error::NotHermitian { defect: d.im.abs() });
            }
            out[(i, i)] = Complex64::new(f(d.re)?, 0.0);
        }
        return Ok(RepSymbol { l: sym.l, matrix: out });
    }
    let defect = linalg::hermitian_defect(m);
    if defect > 1e-10 * scale {
        return Err(Su2Error::NotHermitian { defect });
    }
    let eig = m.clone().symmetric_eigen();
    let mapped: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&x| f(x))
        .collect::<Result<_, _>>()?;
    let q = &eig.eigenvectors;
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        mapped.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    Ok(RepSymbol { l: sym.l, matrix: q * diag * q.adjoint() })
}

/// Matrix power `sym^p` through the spectrum.
///
/// Diagonal symbols are powered entrywise; Hermitian ones through an
/// eigendecomposition. Negative or fractional powers require a strictly
/// positive spectrum.
pub fn spectral_power(sym: &RepSymbol, p: f64) -> Result<RepSymbol, Su2Error> {
    spectral_map(sym, |x| scalar_power(x, p))
}

/// Exponential functional calculus `exp(c · sym^p)` under the same contract
/// as [`spectral_power`].
pub fn spectral_exp(sym: &RepSymbol, c: f64, p: f64) -> Result<RepSymbol, Su2Error> {
    spectral_map(sym, |x| Ok((c * scalar_power(x, p)?).exp()))
}

/// Plain word product `σ_{w₁}···σ_{w_q}` as a band.
pub(crate) fn word_band(word: &[Ladder], l: HalfInt) -> Band {
    word.iter()
        .fold(Band::identity(l.dim()), |acc, &w| acc.mul(&ladder_band(w, l)))
}

/// Plain word product `σ_{w₁}···σ_{w_q}` as a dense symbol.
pub fn word_symbol(word: &[Ladder], l: HalfInt) -> RepSymbol {
    RepSymbol { l, matrix: word_band(word, l).to_dense() }
}

/// Riesz word band `σ_w · σ_L^{−|w|/2}` (crate-internal fast path).
fn riesz_band(word: &[Ladder], l: HalfInt) -> Result<Band, Su2Error> {
    if l.is_zero() {
        return Err(Su2Error::ZeroModeInverse);
    }
    let q = word.len() as f64;
    let weights: Vec<f64> = sublaplacian_eigenvalues(l)
        .into_iter()
        .map(|mu| mu.powf(-q / 2.0))
        .collect();
    Ok(word_band(word, l).mul_diag(&weights))
}

/// The Riesz-transform word symbol `σ_w · σ_L^{−|w|/2}`.
///
/// Undefined on the trivial representation, whose sub-Laplacian symbol
/// vanishes; empty words return the identity.
pub fn riesz_symbol(word: &[Ladder], l: HalfInt) -> Result<RepSymbol, Su2Error> {
    Ok(RepSymbol { l, matrix: riesz_band(word, l)?.to_dense() })
}

/// Operator norm of the Riesz word symbol via the single-diagonal lemma
/// (largest entry modulus), without building a dense matrix.
pub fn riesz_op_norm(word: &[Ladder], l: HalfInt) -> Result<f64, Su2Error> {
    Ok(riesz_band(word, l)?.op_norm())
}

/// Sharp `l`-uniform bound `√(q!)·2^{q/2}` on Riesz word norms of length `q`.
///
/// The supremum over `l` is attained in the limit `l → ∞` by the pure words
/// `X^q` (and `Y^q`) at the extreme column `n = −l` (resp. `+l`), where the
/// sub-Laplacian weight is only `l` rather than order `l²` while each ladder
/// factor still contributes `≈ 2l`: the entry there is
/// `√(∏_{i<q} (2l−i)(i+1)) / l^{q/2} → √(q!)·2^{q/2}`.  Interior columns stay
/// below 1, so a per-letter product heuristic (`2^q`) holds only for `q ≤ 3`;
/// from `q = 4` the edge value `√(q!/2^q)·2^q` overtakes it.
pub fn riesz_uniform_bound(len: usize) -> f64 {
    let factorial = (1..=len).fold(1.0, |p, k| p * k as f64);
    factorial.sqrt() * 2f64.powf(len as f64 / 2.0)
}

/// Operator norms of the three factor shapes the word factorisation uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorNorms {
    /// `‖σ_w σ_L^{−1/2}‖` — uniformly bounded in `l` (measures √2, bound 2).
    pub single: f64,
    /// `‖σ_L^{1/2} σ_w σ_L^{−1/2}‖` — grows linearly in `l`.
    pub conjugated: f64,
    /// `‖σ_L^{1/2} σ_w σ_L^{−q/2}‖` — decays like `l^{1−q/2}`, driven by the
    /// extreme-weight rows where the diagonal weight is only `l` rather than
    /// order `l²`; interior rows decay faster, like `l^{2−q}`.
    pub weighted: f64,
}

/// Factor norms for a single letter at representation `l`, with the weighted
/// factor using the word length `q` of the ambient word.
pub fn riesz_factor_norms(letter: Ladder, l: HalfInt, q: usize) -> Result<FactorNorms, Su2Error> {
    if l.is_zero() {
        return Err(Su2Error::ZeroModeInverse);
    }
    let mu = sublaplacian_eigenvalues(l);
    let sqrt_mu: Vec<f64> = mu.iter().map(|&x| x.sqrt()).collect();
    let inv_sqrt_mu: Vec<f64> = mu.iter().map(|&x| 1.0 / x.sqrt()).collect();
    let inv_q: Vec<f64> = mu.iter().map(|&x| x.powf(-(q as f64) / 2.0)).collect();
    let base = ladder_band(letter, l);
    Ok(FactorNorms {
        single: base.mul_diag(&inv_sqrt_mu).op_norm(),
        conjugated: base.scale_rows(&sqrt_mu).mul_diag(&inv_sqrt_mu).op_norm(),
        weighted: base.scale_rows(&sqrt_mu).mul_diag(&inv_q).op_norm(),
    })
}

/// One row of a Riesz norm sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszSweepRow {
    pub l: HalfInt,
    pub word: String,
    pub op_norm: f64,
    pub max_norm: f64,
}

/// Enumerates all words over {X, Y} of the given length.
pub fn words_of_length(len: usize) -> Vec<Vec<Ladder>> {
    (0..1usize << len)
        .map(|mask| {
            (0..len)
                .map(|i| if mask >> i & 1 == 0 { Ladder::X } else { Ladder::Y })
                .collect()
        })
        .collect()
}

/// Sweeps Riesz word norms over every word of length `1..=max_len` and every
/// representation `1/2, 1, …, lmax`, in parallel over `l`.
///
/// For these single-diagonal symbols the operator norm equals the max-entry
/// norm exactly, so both reported columns come from the band fast path.
pub fn riesz_norm_sweep(max_len: usize, lmax: HalfInt) -> Vec<RieszSweepRow> {
    let words: Vec<Vec<Ladder>> =
        (1..=max_len).flat_map(words_of_length).collect();
    (1..=lmax.twice())
        .into_par_iter()
        .map(HalfInt::from_twice)
        .flat_map_iter(|l| {
            let words = &words;
            words.iter().map(move |word| {
                let band = riesz_band(word, l).expect("l ≥ 1/2 in sweep");
                let op = band.op_norm();
                RieszSweepRow { l, word: word_string(word), op_norm: op, max_norm: op }
            })
        })
        .collect()
}

/// Fitted exponent of `norms` against `l` on a log–log scale.
///
/// Zero-valued entries are skipped (they carry no scale information).
pub fn fitted_growth_exponent(ls: &[HalfInt], norms: &[f64]) -> f64 {
    let pairs: Vec<(f64, f64)> = ls
        .iter()
        .zip(norms)
        .filter(|(_, &n)| n > 0.0)
        .map(|(l, &n)| (l.value().ln(), n.ln()))
        .collect();
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    linalg::least_squares_line(&xs, &ys).0
}

/// A Fourier-side field on SU(2): one coefficient matrix per representation
/// up to a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFieldSU2 {
    lmax: HalfInt,
    coeffs: BTreeMap<HalfInt, DMatrix<Complex64>>,
}

impl SpectralFieldSU2 {
    /// Empty field with the given cutoff.
    pub fn new(lmax: HalfInt) -> Self {
        SpectralFieldSU2 { lmax, coeffs: BTreeMap::new() }
    }

    /// Builds from parts, validating every coefficient shape and the cutoff.
    pub fn from_parts(
        lmax: HalfInt,
        coeffs: BTreeMap<HalfInt, DMatrix<Complex64>>,
    ) -> Result<Self, Su2Error> {
        let mut field = SpectralFieldSU2::new(lmax);
        for (l, m) in coeffs {
            field.insert(l, m)?;
        }
        Ok(field)
    }

    /// Inserts (or replaces) the coefficient at `l`.
    pub fn insert(&mut self, l: HalfInt, matrix: DMatrix<Complex64>) -> Result<(), Su2Error> {
        if l > self.lmax {
            return Err(Su2Error::AboveCutoff { twice: l.twice(), cutoff: self.lmax.twice() });
        }
        if matrix.nrows() != l.dim() || matrix.ncols() != l.dim() {
            return Err(Su2Error::CoefficientShape {
                twice: l.twice(),
                expected: l.dim(),
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        self.coeffs.insert(l, matrix);
        Ok(())
    }

    /// Field with a single unit entry at doubled labels `(m2, n2)` of
    /// representation `l`.
    pub fn unit_entry(lmax: HalfInt, l: HalfInt, m2: i64, n2: i64) -> Result<Self, Su2Error> {
        let mut matrix = DMatrix::<Complex64>::zeros(l.dim(), l.dim());
        let t = l.twice() as i64;
        let row = ((m2 + t) / 2) as usize;
        let col = ((n2 + t) / 2) as usize;
        matrix[(row, col)] = Complex64::new(1.0, 0.0);
        let mut field = SpectralFieldSU2::new(lmax);
        field.insert(l, matrix)?;
        Ok(field)
    }

    pub fn lmax(&self) -> HalfInt {
        self.lmax
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, l: HalfInt) -> Option<&DMatrix<Complex64>> {
        self.coeffs.get(&l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (HalfInt, &DMatrix<Complex64>)> {
        self.coeffs.iter().map(|(&l, m)| (l, m))
    }

    /// Plancherel norm `√(Σ_l (2l+1)·‖f̂(l)‖²_HS)`.
    pub fn plancherel_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(l, m)| l.dim() as f64 * m.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Scales every coefficient by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&l, m)| (l, m.map(|z| z * factor)))
            .collect();
        SpectralFieldSU2 { lmax: self.lmax, coeffs }
    }

    /// Left-multiplies every coefficient by a function of the sub-Laplacian:
    /// row `m` of `f̂(l)` is scaled by `g(l(l+1) − m²)`.
    pub fn weighted_rows(&self, g: impl Fn(f64) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&l, m)| {
                let mut out = m.clone();
                for (r, mu) in sublaplacian_eigenvalues(l).into_iter().enumerate() {
                    let w = g(mu);
                    for c in 0..out.ncols() {
                        out[(r, c)] *= w;
                    }
                }
                (l, out)
            })
            .collect();
        SpectralFieldSU2 { lmax: self.lmax, coeffs }
    }

    /// Re-embeds the field under a larger cutoff (contents unchanged).
    pub fn with_cutoff(&self, lmax: HalfInt) -> Result<Self, Su2Error> {
        SpectralFieldSU2::from_parts(lmax, self.coeffs.clone())
    }
}

/// Partial Bessel-type trace sum `Σ_{l ≤ lmax} (2l+1)·‖(I + σ_L(l))^{−s}‖²_HS`.
///
/// The extreme weights `m = ±l` keep `1 + l(l+1) − m²` at `1 + l`, so shell
/// `l` contributes at least `(2l+1)·2·(1+l)^{−2s} ∼ l^{1−2s}` and the series
/// converges exactly when `s > 1` (at `s = 1` it diverges logarithmically).
/// [`bessel_doubling_increments`] exposes the increment behaviour that
/// witnesses either side.
pub fn bessel_partial_sum(s: f64, lmax: HalfInt) -> f64 {
    assert!(s > 0.0, "s must be positive");
    HalfInt::range_inclusive(lmax)
        .map(|l| {
            let block: f64 = sublaplacian_eigenvalues(l)
                .into_iter()
                .map(|mu| (1.0 + mu).powf(-2.0 * s))
                .sum();
            l.dim() as f64 * block
        })
        .sum()
}

/// Increments of the Bessel partial sum across doublings of `lmax`,
/// starting from `base` (e.g. 25 → 50 → 100 → …).
pub fn bessel_doubling_increments(s: f64, base: HalfInt, doublings: usize) -> Vec<f64> {
    let mut cuts = vec![base];
    for _ in 0..doublings {
        let last = cuts.last().unwrap().twice();
        cuts.push(HalfInt::from_twice(last * 2));
    }
    let sums: Vec<f64> = cuts.iter().map(|&c| bessel_partial_sum(s, c)).collect();
    sums.windows(2).map(|w| w[1] - w[0]).collect()
}
