//! Time-dependent propagation speeds `a(t)` and their regularisation.
//!
//! The energy machinery downstream distinguishes four regularity regimes of
//! the coefficient in `∂²ₜu + a(t) L u = 0`:
//!
//! 1. Lipschitz, strictly positive;
//! 2. `C^α` with `0 < α < 1`, strictly positive;
//! 3. `C^l` with `l ≥ 2`, possibly vanishing;
//! 4. `C^α` with `0 < α < 2`, possibly vanishing.
//!
//! Speeds come from a small analytic catalogue ([`SpeedSpec`]) so that lower
//! and upper bounds are certified, not sampled.  Regularisation replaces the
//! characteristic roots `±√a` by `±(√a ∗ φ_ε)` where `φ` is the standard
//! bump mollifier; in the degenerate Hölder regime the roots are additionally
//! shifted by `ε^α` and `2ε^α` to open a spectral gap.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from speed construction and regularisation.
#[derive(Debug, Error)]
pub enum CoefficientError {
    #[error("propagation speed must be nonnegative: {0}")]
    NegativeSpeed(String),
    #[error("invalid speed parameter: {0}")]
    InvalidParameter(String),
    #[error("shifted roots need a Hölder exponent, but the regularity class is {class}")]
    MissingShiftExponent { class: String },
    #[error("grid step {step:.3e} too coarse for epsilon {epsilon:.3e}; need step <= epsilon/10")]
    GridTooCoarse { step: f64, epsilon: f64 },
    #[error("mollification width must lie in (0, horizon], got {0}")]
    BadEpsilon(f64),
    #[error("sample grid must contain at least two points")]
    EmptyGrid,
}

/// Regularity regime of a speed, with the data the estimates need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegularityClass {
    /// Lipschitz and bounded below by a positive constant.
    LipschitzPositive,
    /// `C^α`, `0 < α < 1`, bounded below by a positive constant.
    HoelderPositive { alpha: f64 },
    /// `C^l`, `l ≥ 2`, allowed to vanish.
    SmoothDegenerate { order: u32 },
    /// `C^α`, `0 < α < 2`, allowed to vanish.
    HoelderDegenerate { alpha: f64 },
}

impl RegularityClass {
    /// Hölder exponent stored in the class, if any.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            RegularityClass::HoelderPositive { alpha }
            | RegularityClass::HoelderDegenerate { alpha } => Some(*alpha),
            _ => None,
        }
    }

    /// True when the class guarantees a positive lower bound.
    pub fn is_strictly_positive(&self) -> bool {
        matches!(
            self,
            RegularityClass::LipschitzPositive | RegularityClass::HoelderPositive { .. }
        )
    }

    /// Case index 1–4 in the order of the list above.
    pub fn case_index(&self) -> u8 {
        match self {
            RegularityClass::LipschitzPositive => 1,
            RegularityClass::HoelderPositive { .. } => 2,
            RegularityClass::SmoothDegenerate { .. } => 3,
            RegularityClass::HoelderDegenerate { .. } => 4,
        }
    }
}

impl std::fmt::Display for RegularityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegularityClass::LipschitzPositive => write!(f, "Lipschitz, positive"),
            RegularityClass::HoelderPositive { alpha } => {
                write!(f, "C^{alpha} Hölder, positive")
            }
            RegularityClass::SmoothDegenerate { order } => {
                write!(f, "C^{order} smooth, degenerate")
            }
            RegularityClass::HoelderDegenerate { alpha } => {
                write!(f, "C^{alpha} Hölder, degenerate")
            }
        }
    }
}

/// Analytic catalogue of speeds.  Every entry has certified bounds on
/// `[0, horizon]`, so class assignment never relies on sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum SpeedSpec {
    /// `a(t) = c`.
    Constant { c: f64 },
    /// `a(t) = c + b sin(ω t)`.
    Sine { c: f64, b: f64, omega: f64 },
    /// `a(t) = c + |t − t0|^α`.
    Cusp { c: f64, t0: f64, alpha: f64 },
    /// `a(t) = t²`.
    Quadratic,
    /// `a(t) = sin²(t)`.
    SineSquared,
}

impl SpeedSpec {
    fn eval(&self, t: f64) -> f64 {
        match *self {
            SpeedSpec::Constant { c } => c,
            SpeedSpec::Sine { c, b, omega } => c + b * (omega * t).sin(),
            SpeedSpec::Cusp { c, t0, alpha } => c + (t - t0).abs().powf(alpha),
            SpeedSpec::Quadratic => t * t,
            SpeedSpec::SineSquared => t.sin() * t.sin(),
        }
    }
}

/// Default sample density: points per unit time on uniform grids.
pub const DEFAULT_POINTS_PER_UNIT: usize = 4096;

/// Uniform sample grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub points_per_unit: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid {
            points_per_unit: DEFAULT_POINTS_PER_UNIT,
        }
    }
}

impl SampleGrid {
    pub fn new(points_per_unit: usize) -> Self {
        SampleGrid { points_per_unit }
    }

    /// Uniform times on `[0, horizon]`, at least two points.
    pub fn times(&self, horizon: f64) -> Vec<f64> {
        let n = ((self.points_per_unit as f64) * horizon).ceil() as usize;
        let n = n.max(2);
        (0..=n).map(|i| horizon * i as f64 / n as f64).collect()
    }
}

/// A real function sampled on a uniform grid over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledFn {
    /// Uniform step between consecutive samples.
    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// Linear interpolation, clamped to the sampled range.
    pub fn at(&self, t: f64) -> f64 {
        let h = self.step();
        let n = self.values.len();
        let x = (t - self.times[0]) / h;
        if x <= 0.0 {
            return self.values[0];
        }
        let i = x.floor() as usize;
        if i + 1 >= n {
            return self.values[n - 1];
        }
        let frac = x - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A propagation speed on a fixed time horizon with certified bounds.
#[derive(Debug, Clone)]
pub struct PropagationSpeed {
    spec: SpeedSpec,
    horizon: f64,
    a0: f64,
    a_sup: f64,
    class: RegularityClass,
}

impl PropagationSpeed {
    /// Builds a speed from a catalogue entry, deriving its bounds and class.
    ///
    /// Rejects speeds that can turn negative and non-sensible parameters
    /// (`α ∉ (0, 2)` for cusps, nonpositive horizon).
    pub fn from_spec(spec: SpeedSpec, horizon: f64) -> Result<Self, CoefficientError> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(CoefficientError::InvalidParameter(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        let (a0, a_sup, class) = match spec {
            SpeedSpec::Constant { c } => {
                if c < 0.0 || !c.is_finite() {
                    return Err(CoefficientError::NegativeSpeed(format!("constant {c}")));
                }
                let class = if c > 0.0 {
                    RegularityClass::LipschitzPositive
                } else {
                    RegularityClass::SmoothDegenerate { order: 2 }
                };
                (c, c, class)
            }
            SpeedSpec::Sine { c, b, omega } => {
                if !c.is_finite() || !b.is_finite() || !omega.is_finite() {
                    return Err(CoefficientError::InvalidParameter(
                        "sine speed parameters must be finite".into(),
                    ));
                }
                let lo = c - b.abs();
                let hi = c + b.abs();
                if lo < 0.0 {
                    return Err(CoefficientError::NegativeSpeed(format!(
                        "c - |b| = {lo} < 0 for c + b sin(omega t)"
                    )));
                }
                let class = if lo > 0.0 {
                    RegularityClass::LipschitzPositive
                } else {
                    RegularityClass::SmoothDegenerate { order: 2 }
                };
                (lo, hi, class)
            }
            SpeedSpec::Cusp { c, t0, alpha } => {
                if c < 0.0 {
                    return Err(CoefficientError::NegativeSpeed(format!("offset {c}")));
                }
                if !(alpha > 0.0 && alpha < 2.0) {
                    return Err(CoefficientError::InvalidParameter(format!(
                        "cusp exponent must lie in (0, 2), got {alpha}"
                    )));
                }
                let dmin = if (0.0..=horizon).contains(&t0) {
                    0.0
                } else {
                    t0.abs().min((t0 - horizon).abs())
                };
                let dmax = t0.abs().max((t0 - horizon).abs());
                let a0 = c + dmin.powf(alpha);
                let a_sup = c + dmax.powf(alpha);
                let class = if a0 > 0.0 {
                    if alpha < 1.0 {
                        RegularityClass::HoelderPositive { alpha }
                    } else {
                        // |t − t0|^α with α ≥ 1 is Lipschitz on a bounded interval.
                        RegularityClass::LipschitzPositive
                    }
                } else {
                    RegularityClass::HoelderDegenerate { alpha }
                };
                (a0, a_sup, class)
            }
            SpeedSpec::Quadratic => (
                0.0,
                horizon * horizon,
                RegularityClass::SmoothDegenerate { order: 2 },
            ),
            SpeedSpec::SineSquared => {
                let hi = if horizon >= std::f64::consts::FRAC_PI_2 {
                    1.0
                } else {
                    horizon.sin() * horizon.sin()
                };
                (0.0, hi, RegularityClass::SmoothDegenerate { order: 2 })
            }
        };
        Ok(PropagationSpeed {
            spec,
            horizon,
            a0,
            a_sup,
            class,
        })
    }

    pub fn spec(&self) -> &SpeedSpec {
        &self.spec
    }

    /// Evaluates `a(t)`.  Values are clamped at zero so that roundoff in a
    /// degenerate catalogue entry can never produce a negative speed.
    pub fn eval(&self, t: f64) -> f64 {
        self.spec.eval(t).max(0.0)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Certified lower bound of `a` on `[0, horizon]`.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Certified upper bound of `a` on `[0, horizon]`.
    pub fn a_sup(&self) -> f64 {
        self.a_sup
    }

    pub fn class(&self) -> RegularityClass {
        self.class
    }

    /// Analytic bound on `sup |a'|` for Lipschitz catalogue entries,
    /// `None` when the speed is not Lipschitz.
    pub fn lipschitz_derivative_bound(&self) -> Option<f64> {
        match *self.spec() {
            SpeedSpec::Constant { .. } => Some(0.0),
            SpeedSpec::Sine { b, omega, .. } => Some(b.abs() * omega.abs()),
            SpeedSpec::Cusp { t0, alpha, .. } => {
                if alpha >= 1.0 {
                    let dmax = t0.abs().max((t0 - self.horizon).abs());
                    Some(alpha * dmax.powf(alpha - 1.0))
                } else {
                    None
                }
            }
            SpeedSpec::Quadratic => Some(2.0 * self.horizon),
            SpeedSpec::SineSquared => {
                // a' = sin(2t), so the bound is 1 once the horizon passes π/4.
                if 2.0 * self.horizon >= std::f64::consts::FRAC_PI_2 {
                    Some(1.0)
                } else {
                    Some((2.0 * self.horizon).sin())
                }
            }
        }
    }

    /// Samples `√a` on a uniform grid.
    pub fn sample_sqrt(&self, grid: SampleGrid) -> SampledFn {
        let times = grid.times(self.horizon);
        let values = times.iter().map(|&t| self.eval(t).sqrt()).collect();
        SampledFn { times, values }
    }

    /// Dyadic-separation Hölder seminorm of `√a` with exponent `alpha`,
    /// measured on the default grid.
    pub fn sqrt_hoelder_seminorm(&self, alpha: f64, grid: SampleGrid) -> f64 {
        let s = self.sample_sqrt(grid);
        hoelder_seminorm(&s.values, s.step(), alpha)
    }
}

/// Hölder seminorm estimate on uniform samples: the supremum of
/// `|f(t+d) − f(t)| / d^α` over pairs with dyadic index separations.
///
/// Dyadic separations keep the pair count at `O(n log n)` while still seeing
/// every scale from one grid step up to the full window.
pub fn hoelder_seminorm(values: &[f64], step: f64, alpha: f64) -> f64 {
    let n = values.len();
    let mut sup: f64 = 0.0;
    let mut d = 1usize;
    while d < n {
        let dist = (d as f64 * step).powf(alpha);
        for i in 0..n - d {
            let diff = (values[i + d] - values[i]).abs() / dist;
            sup = sup.max(diff);
        }
        d *= 2;
    }
    sup
}

/// The standard bump `φ(t) = c · exp(−1/(1−t²))` on `(−1, 1)`, with `c`
/// fixed numerically so that `∫ φ = 1`.
///
/// All derivatives of `φ` vanish at `±1`, so trapezoid sums converge faster
/// than any power of the step; the stored quadrature weights are normalised
/// to unit discrete mass.
#[derive(Debug, Clone)]
pub struct Mollifier {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    normalisation: f64,
}

/// Unnormalised bump profile `exp(−1/(1−t²))`, zero outside `(−1, 1)`.
fn bump_profile(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

impl Mollifier {
    /// Builds the bump with `n` trapezoid nodes across `[−1, 1]`
    /// (`n` is rounded up to an odd count so that 0 is a node).
    pub fn new(n: usize) -> Self {
        let n = n.max(9) | 1;
        let h = 2.0 / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * h).collect();
        let raw: Vec<f64> = nodes.iter().map(|&u| bump_profile(u)).collect();
        // Trapezoid weights; the endpoints carry zero value anyway.
        let mut weights: Vec<f64> = raw.iter().map(|&v| v * h).collect();
        weights[0] *= 0.5;
        weights[n - 1] *= 0.5;
        let mass: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= mass;
        }
        Mollifier {
            nodes,
            weights,
            normalisation: 1.0 / mass,
        }
    }

    /// The constant `c` with `∫ c·exp(−1/(1−t²)) dt = 1`.
    pub fn normalisation(&self) -> f64 {
        self.normalisation
    }

    /// Discrete mass of the stored quadrature rule (normalised, so 1).
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Integrates the *normalised* bump `c·exp(−1/(1−t²))` on an independent
    /// trapezoid grid of `n` nodes.  Used to check that the normalisation
    /// constant is quadrature-converged.
    pub fn mass_on(&self, n: usize) -> f64 {
        let n = n.max(9) | 1;
        let h = 2.0 / (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let u = -1.0 + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * self.normalisation * bump_profile(u) * h;
        }
        acc
    }
}

impl Default for Mollifier {
    fn default() -> Self {
        Mollifier::new(257)
    }
}

/// Even reflection of `t` into `[0, horizon]` (about both endpoints).
fn reflect_into(t: f64, horizon: f64) -> f64 {
    let period = 2.0 * horizon;
    let mut s = t.rem_euclid(period);
    if s > horizon {
        s = period - s;
    }
    s
}

/// Mollified square root `(√a ∗ φ_ε)` sampled on a uniform grid.
///
/// Near the interval ends `√a` is extended by even reflection, which keeps
/// the convolution values inside `[min √a, max √a]`.
pub fn mollify_sqrt(
    a: &PropagationSpeed,
    epsilon: f64,
    grid: SampleGrid,
) -> Result<SampledFn, CoefficientError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() || epsilon > a.horizon() {
        return Err(CoefficientError::BadEpsilon(epsilon));
    }
    let moll = Mollifier::default();
    let times = grid.times(a.horizon());
    let values = times
        .iter()
        .map(|&t| {
            moll.nodes
                .iter()
                .zip(&moll.weights)
                .map(|(&u, &w)| {
                    let s = reflect_into(t - epsilon * u, a.horizon());
                    w * a.eval(s).sqrt()
                })
                .sum()
        })
        .collect();
    Ok(SampledFn { times, values })
}

/// Regularised characteristic roots `λ₁ ≤ λ₂` on a uniform grid.
///
/// Plain variant: `λ₁ = −(√a ∗ φ_ε)`, `λ₂ = +(√a ∗ φ_ε)`.
/// Shifted variant (degenerate Hölder speeds): `λ₁ = −(√a ∗ φ_ε) + ε^α`,
/// `λ₂ = +(√a ∗ φ_ε) + 2ε^α`, which keeps the gap `λ₂ − λ₁ ≥ ε^α`.
#[derive(Debug, Clone)]
pub struct RegularizedRoots {
    pub times: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub epsilon: f64,
    /// Shift exponent `α` when the roots are the shifted variant.
    pub shift_exponent: Option<f64>,
}

impl RegularizedRoots {
    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// Smallest root gap `λ₂ − λ₁` over the grid.
    pub fn gap_min(&self) -> f64 {
        self.lambda1
            .iter()
            .zip(&self.lambda2)
            .map(|(l1, l2)| l2 - l1)
            .fold(f64::INFINITY, f64::min)
    }

    /// Linear interpolation of both roots at time `t`.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let h = self.step();
        let n = self.times.len();
        let x = ((t - self.times[0]) / h).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        let frac = x - i as f64;
        (
            self.lambda1[i] * (1.0 - frac) + self.lambda1[i + 1] * frac,
            self.lambda2[i] * (1.0 - frac) + self.lambda2[i + 1] * frac,
        )
    }
}

/// Builds regularised roots; `shifted` takes the shift exponent from the
/// speed's regularity class (degenerate Hölder only).
pub fn regularized_roots(
    a: &PropagationSpeed,
    epsilon: f64,
    shifted: bool,
    grid: SampleGrid,
) -> Result<RegularizedRoots, CoefficientError> {
    if shifted {
        match a.class() {
            RegularityClass::HoelderDegenerate { alpha } => {
                regularized_roots_with_shift(a, epsilon, alpha, grid)
            }
            class => Err(CoefficientError::MissingShiftExponent {
                class: class.to_string(),
            }),
        }
    } else {
        let m = mollify_sqrt(a, epsilon, grid)?;
        Ok(RegularizedRoots {
            lambda1: m.values.iter().map(|v| -v).collect(),
            lambda2: m.values.clone(),
            times: m.times,
            epsilon,
            shift_exponent: None,
        })
    }
}

/// Shifted roots with an explicit shift exponent, for callers that work with
/// a different exponent convention than the one stored in the class (the
/// degenerate verification pipeline shifts by the Hölder exponent of `√a`,
/// which is half the exponent of `a`).
pub fn regularized_roots_with_shift(
    a: &PropagationSpeed,
    epsilon: f64,
    shift_exponent: f64,
    grid: SampleGrid,
) -> Result<RegularizedRoots, CoefficientError> {
    if !(shift_exponent > 0.0) || !shift_exponent.is_finite() {
        return Err(CoefficientError::InvalidParameter(format!(
            "shift exponent must be positive, got {shift_exponent}"
        )));
    }
    let m = mollify_sqrt(a, epsilon, grid)?;
    let shift = epsilon.powf(shift_exponent);
    Ok(RegularizedRoots {
        lambda1: m.values.iter().map(|v| -v + shift).collect(),
        lambda2: m.values.iter().map(|v| v + 2.0 * shift).collect(),
        times: m.times,
        epsilon,
        shift_exponent: Some(shift_exponent),
    })
}

/// Measured deviation constants of regularised roots from `±√a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationConstants {
    /// `sup_t |λ₁ + √a| / ε^α`.
    pub c1: f64,
    /// `sup_t |λ₂ − √a| / ε^α`.
    pub c2: f64,
}

/// Checks the root deviation law `|λ₂ − √a| ≤ c ε^α` (and its mirror for
/// `λ₁`), where `alpha` is the Hölder exponent of `√a`.  Returns the
/// measured constants.
pub fn root_deviation_check(
    roots: &RegularizedRoots,
    a: &PropagationSpeed,
    alpha: f64,
) -> DeviationConstants {
    let scale = roots.epsilon.powf(alpha);
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    for (i, &t) in roots.times.iter().enumerate() {
        let r = a.eval(t).sqrt();
        c1 = c1.max((roots.lambda1[i] + r).abs() / scale);
        c2 = c2.max((roots.lambda2[i] - r).abs() / scale);
    }
    DeviationConstants { c1, c2 }
}

/// Checks the root derivative law `|∂ₜλ₂| ≤ k ε^{α−1}` by central
/// differences and returns the measured `k = sup |∂ₜλ₂| · ε^{1−α}`.
///
/// The grid step must resolve the mollification scale (`step ≤ ε/10`).
pub fn root_derivative_check(
    roots: &RegularizedRoots,
    alpha: f64,
) -> Result<f64, CoefficientError> {
    let h = roots.step();
    if h > roots.epsilon / 10.0 {
        return Err(CoefficientError::GridTooCoarse {
            step: h,
            epsilon: roots.epsilon,
        });
    }
    let n = roots.lambda2.len();
    let mut sup: f64 = 0.0;
    for i in 1..n - 1 {
        let d = (roots.lambda2[i + 1] - roots.lambda2[i - 1]) / (2.0 * h);
        sup = sup.max(d.abs());
    }
    Ok(sup * roots.epsilon.powf(1.0 - alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn speed(spec: SpeedSpec, horizon: f64) -> PropagationSpeed {
        PropagationSpeed::from_spec(spec, horizon).expect("valid catalogue speed")
    }

    #[test]
    fn catalogue_bounds_and_classes() {
        let s = speed(
            SpeedSpec::Sine {
                c: 2.0,
                b: 1.0,
                omega: 4.0,
            },
            1.0,
        );
        assert_eq!(s.a0(), 1.0);
        assert_eq!(s.a_sup(), 3.0);
        assert_eq!(s.class(), RegularityClass::LipschitzPositive);
        assert_eq!(s.lipschitz_derivative_bound(), Some(4.0));

        let s = speed(
            SpeedSpec::Cusp {
                c: 1.0,
                t0: 0.5,
                alpha: 0.5,
            },
            1.0,
        );
        assert_eq!(s.a0(), 1.0);
        assert_relative_eq!(s.a_sup(), 1.0 + 0.5f64.sqrt(), max_relative = 1e-15);
        assert_eq!(s.class(), RegularityClass::HoelderPositive { alpha: 0.5 });

        let s = speed(
            SpeedSpec::Cusp {
                c: 0.0,
                t0: 0.5,
                alpha: 1.0,
            },
            1.0,
        );
        assert_eq!(s.a0(), 0.0);
        assert_eq!(s.class(), RegularityClass::HoelderDegenerate { alpha: 1.0 });

        let s = speed(SpeedSpec::Quadratic, 1.0);
        assert_eq!(s.class(), RegularityClass::SmoothDegenerate { order: 2 });
        assert_eq!((s.a0(), s.a_sup()), (0.0, 1.0));

        let s = speed(SpeedSpec::SineSquared, 1.0);
        assert_eq!(s.a0(), 0.0);
        assert_relative_eq!(s.a_sup(), 1.0f64.sin().powi(2), max_relative = 1e-15);
    }

    #[test]
    fn negative_speeds_are_rejected() {
        assert!(matches!(
            PropagationSpeed::from_spec(
                SpeedSpec::Sine {
                    c: 1.0,
                    b: 2.0,
                    omega: 1.0
                },
                1.0
            ),
            Err(CoefficientError::NegativeSpeed(_))
        ));
        assert!(matches!(
            PropagationSpeed::from_spec(SpeedSpec::Constant { c: -1.0 }, 1.0),
            Err(CoefficientError::NegativeSpeed(_))
        ));
        assert!(matches!(
            PropagationSpeed::from_spec(
                SpeedSpec::Cusp {
                    c: 0.0,
                    t0: 0.5,
                    alpha: 2.0
                },
                1.0
            ),
            Err(CoefficientError::InvalidParameter(_))
        ));
    }

    #[test]
    fn mollifier_mass_is_one_and_quadrature_converged() {
        let m = Mollifier::default();
        assert!((m.mass() - 1.0).abs() <= 1e-12);
        // The same normalisation constant must integrate to 1 on finer,
        // independent grids: the quadrature is converged.
        assert!((m.mass_on(1025) - 1.0).abs() <= 1e-12);
        assert!((m.mass_on(4097) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn mollified_constant_is_exact() {
        let s = speed(SpeedSpec::Constant { c: 4.0 }, 1.0);
        let m = mollify_sqrt(&s, 0.1, SampleGrid::new(512)).unwrap();
        for v in &m.values {
            assert!((v - 2.0).abs() <= 1e-12, "got {v}");
        }
    }

    /// Quadrature oracle: for `a(t) = t` the convolution `(√a ∗ φ_ε)(1/2)`
    /// approaches `√(1/2)` as `ε → 0`, with strictly shrinking error.
    #[test]
    fn mollified_sqrt_converges_to_sqrt() {
        let s = speed(
            SpeedSpec::Cusp {
                c: 0.0,
                t0: 0.0,
                alpha: 1.0,
            },
            1.0,
        );
        let target = 0.5f64.sqrt();
        let mut errs = Vec::new();
        for eps in [0.1, 0.05, 0.025] {
            let m = mollify_sqrt(&s, eps, SampleGrid::default()).unwrap();
            errs.push((m.at(0.5) - target).abs());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "errors {errs:?}");
        assert!(errs[2] < errs[0] / 2.0, "errors {errs:?}");
    }

    #[test]
    fn shifted_roots_on_zero_speed_are_pure_shifts() {
        let s = speed(SpeedSpec::Constant { c: 0.0 }, 1.0);
        let r = regularized_roots_with_shift(&s, 0.25, 1.0, SampleGrid::new(512)).unwrap();
        for (l1, l2) in r.lambda1.iter().zip(&r.lambda2) {
            assert_relative_eq!(*l1, 0.25, max_relative = 1e-12);
            assert_relative_eq!(*l2, 0.5, max_relative = 1e-12);
        }
        assert_relative_eq!(r.gap_min(), 0.25, max_relative = 1e-12);
    }

    #[test]
    fn shifted_roots_take_exponent_from_class() {
        let s = speed(
            SpeedSpec::Cusp {
                c: 0.0,
                t0: 0.5,
                alpha: 1.0,
            },
            1.0,
        );
        let r = regularized_roots(&s, 0.1, true, SampleGrid::default()).unwrap();
        assert_eq!(r.shift_exponent, Some(1.0));
        // Gap is at least ε^α everywhere.
        assert!(r.gap_min() >= 0.1 - 1e-12);

        let positive = speed(SpeedSpec::Constant { c: 1.0 }, 1.0);
        assert!(matches!(
            regularized_roots(&positive, 0.1, true, SampleGrid::default()),
            Err(CoefficientError::MissingShiftExponent { .. })
        ));
    }

    #[test]
    fn plain_roots_on_positive_speed_keep_a0_gap() {
        let s = speed(
            SpeedSpec::Sine {
                c: 2.0,
                b: 1.0,
                omega: 4.0,
            },
            1.0,
        );
        let r = regularized_roots(&s, 0.05, false, SampleGrid::default()).unwrap();
        // Mollification preserves the range of √a, so the gap 2(√a ∗ φ_ε)
        // stays above 2√a0.
        assert!(r.gap_min() >= 2.0 * s.a0().sqrt() - 1e-12);
    }

    #[test]
    fn deviations_vanish_for_constant_speed() {
        let s = speed(SpeedSpec::Constant { c: 1.0 }, 1.0);
        let r = regularized_roots(&s, 0.05, false, SampleGrid::default()).unwrap();
        let d = root_deviation_check(&r, &s, 0.5);
        assert!(d.c1 <= 1e-12 && d.c2 <= 1e-12, "{d:?}");
        let k = root_derivative_check(&r, 0.5).unwrap();
        assert!(k <= 1e-9, "derivative constant {k}");
    }

    /// Finite-difference oracle: for `a = |t − 1/2|` (so `√a` is `C^{1/2}`)
    /// the measured deviation and derivative constants stay bounded as
    /// `ε` shrinks — that boundedness is the ε-power law itself.
    #[test]
    fn cusp_root_constants_are_bounded_in_epsilon() {
        let s = speed(
            SpeedSpec::Cusp {
                c: 0.0,
                t0: 0.5,
                alpha: 1.0,
            },
            1.0,
        );
        let alpha_sqrt = 0.5;
        let mut dev = Vec::new();
        let mut der = Vec::new();
        for eps in [0.08, 0.04, 0.02, 0.01] {
            let r = regularized_roots_with_shift(&s, eps, alpha_sqrt, SampleGrid::default())
                .unwrap();
            let d = root_deviation_check(&r, &s, alpha_sqrt);
            dev.push(d.c1.max(d.c2));
            der.push(root_derivative_check(&r, alpha_sqrt).unwrap());
        }
        let dev_max = dev.iter().copied().fold(0.0, f64::max);
        let der_max = der.iter().copied().fold(0.0, f64::max);
        // Constants measured once and frozen: they must not blow up as ε→0.
        assert!(dev_max <= 4.0, "deviation constants {dev:?}");
        assert!(der_max <= 2.0, "derivative constants {der:?}");
    }

    #[test]
    fn derivative_check_requires_resolved_grid() {
        let s = speed(SpeedSpec::Constant { c: 1.0 }, 1.0);
        let r = regularized_roots(&s, 0.001, false, SampleGrid::new(512)).unwrap();
        assert!(matches!(
            root_derivative_check(&r, 0.5),
            Err(CoefficientError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn hoelder_seminorm_of_sqrt_cusp_is_one() {
        // f(t) = √|t − 1/2| has C^{1/2} seminorm exactly 1, attained at
        // pairs touching the cusp.
        let n = 10_000;
        let h = 1.0 / n as f64;
        let values: Vec<f64> = (0..=n)
            .map(|i| (i as f64 * h - 0.5f64).abs().sqrt())
            .collect();
        let semi = hoelder_seminorm(&values, h, 0.5);
        assert!(semi <= 1.0 + 1e-6, "seminorm {semi}");
        assert!(semi >= 0.9, "seminorm {semi}");
    }

    #[test]
    fn speed_spec_json_round_trip() {
        let spec = SpeedSpec::Cusp {
            c: 1.0,
            t0: 0.5,
            alpha: 0.5,
        };
        let js = serde_json::to_string(&spec).unwrap();
        assert!(js.contains("\"kind\":\"cusp\""), "{js}");
        let back: SpeedSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, spec);
        let quad: SpeedSpec = serde_json::from_str("{\"kind\":\"quadratic\"}").unwrap();
        assert_eq!(quad, SpeedSpec::Quadratic);
    }
}
