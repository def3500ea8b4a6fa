//! Dense complex matrix helpers shared by the symbol modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// The three norms we track for every matrix symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixNorms {
    /// Operator (spectral) norm: largest singular value.
    pub op: f64,
    /// Largest entry modulus.
    pub max: f64,
    /// Hilbert–Schmidt (Frobenius) norm.
    pub hs: f64,
}

/// Computes operator, max-entry and Hilbert–Schmidt norms of a dense matrix.
///
/// The operator norm comes from a full SVD, so this is the slow, trustworthy
/// path; band-structured sweeps use [`crate::su2::riesz_norm_sweep`] and
/// cross-validate against this.
pub fn matrix_norms(m: &DMatrix<Complex64>) -> MatrixNorms {
    let max = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let hs = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let op = operator_norm(m);
    MatrixNorms { op, max, hs }
}

/// Largest singular value of a dense complex matrix.
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Max-entry norm of `m - m*` (deviation from being Hermitian).
pub fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Entrywise maximum modulus of the difference of two equally sized matrices.
pub fn max_entry_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "matrix shapes must agree");
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Ordinary least-squares line through `(xs, ys)`: returns `(slope, intercept)`.
///
/// Falls back to a horizontal line through the mean when the abscissae are
/// degenerate (all equal or fewer than two points).
pub(crate) fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len(), "sample lengths must agree");
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * n * (1.0 + mx * mx) {
        return (0.0, my);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// A real square matrix supported on a single diagonal: entry `(i, i + offset)`
/// is `entries[i]`, all other entries are zero.
///
/// Every ladder-word symbol in this crate has this shape, and products of such
/// matrices keep it (offsets add). Because the nonzero columns are mutually
/// orthogonal, the operator norm is exactly the largest entry modulus, so word
/// sweeps run in O(n) per product instead of O(n³) dense arithmetic. Dense
/// cross-checks live in the owning modules' tests.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Band {
    dim: usize,
    offset: i64,
    /// Row-indexed entries; rows whose column `i + offset` falls outside the
    /// matrix hold zero so indexing stays uniform.
    entries: Vec<f64>,
}

impl Band {
    /// Builds a band of the given offset, filling entry `(i, i + offset)` with
    /// `f(i)` for every row whose column is in range.
    pub fn from_fn(dim: usize, offset: i64, f: impl Fn(usize) -> f64) -> Self {
        let entries = (0..dim)
            .map(|i| {
                let col = i as i64 + offset;
                if (0..dim as i64).contains(&col) {
                    f(i)
                } else {
                    0.0
                }
            })
            .collect();
        Band { dim, offset, entries }
    }

    /// The identity matrix seen as a band of offset zero.
    pub fn identity(dim: usize) -> Self {
        Band::from_fn(dim, 0, |_| 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Entry at `(row, row + offset)`; zero when the column is out of range.
    pub fn entry(&self, row: usize) -> f64 {
        self.entries[row]
    }

    /// Matrix product `self · rhs`; the offsets add.
    pub fn mul(&self, rhs: &Band) -> Band {
        assert_eq!(self.dim, rhs.dim, "band dimensions must agree");
        let dim = self.dim;
        let entries = (0..dim)
            .map(|i| {
                let k = i as i64 + self.offset;
                if (0..dim as i64).contains(&k) {
                    self.entries[i] * rhs.entries[k as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Band { dim, offset: self.offset + rhs.offset, entries }
    }

    /// Left-multiplies by a diagonal matrix: entry `(i, i+o)` picks up `diag[i]`.
    pub fn scale_rows(&self, diag: &[f64]) -> Band {
        assert_eq!(diag.len(), self.dim, "diagonal length must match");
        let mut out = self.clone();
        for i in 0..self.dim {
            out.entries[i] *= diag[i];
        }
        out
    }

    /// Right-multiplies by a diagonal matrix: entry `(i, i+o)` picks up `diag[i+o]`.
    pub fn mul_diag(&self, diag: &[f64]) -> Band {
        assert_eq!(diag.len(), self.dim, "diagonal length must match");
        let mut out = self.clone();
        for i in 0..self.dim {
            let col = i as i64 + self.offset;
            if (0..self.dim as i64).contains(&col) {
                out.entries[i] *= diag[col as usize];
            }
        }
        out
    }

    /// Operator norm: the largest entry modulus (columns are orthogonal).
    pub fn op_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.abs()).fold(0.0, f64::max)
    }

    /// Largest entry modulus over the top-left `block × block` corner.
    pub fn op_norm_on_block(&self, block: usize) -> f64 {
        assert!(block <= self.dim);
        (0..block)
            .filter(|&i| {
                let col = i as i64 + self.offset;
                (0..block as i64).contains(&col)
            })
            .map(|i| self.entries[i].abs())
            .fold(0.0, f64::max)
    }

    /// Expands to a dense complex matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            let col = i as i64 + self.offset;
            if (0..self.dim as i64).contains(&col) {
                m[(i, col as usize)] = Complex64::new(self.entries[i], 0.0);
            }
        }
        m
    }
}
