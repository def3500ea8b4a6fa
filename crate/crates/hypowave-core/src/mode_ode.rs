//! The scalar mode equation `v'' + β² a(t) v = 0` and its energy machinery.
//!
//! After Fourier decomposition of `∂²ₜu + a(t) L u = 0`, each spectral mode
//! satisfies this ODE with `β²` an eigenvalue of the operator symbol.  The
//! first-order reduction uses `V = (iβv, ∂ₜv)`, so `V' = iβ A(t) V` with
//! `A = [[0, 1], [a, 0]]`.
//!
//! Four verification devices live here, one per coefficient regime:
//!
//! * the symmetriser `S = diag(2a, 2)` (Lipschitz speeds),
//! * the quasi-symmetriser `Q_ε = S + 2ε² e₁₁` (smooth degenerate speeds),
//! * the transform `W = e^{ρ(t)β^{1/s}} (det H) H⁻¹ V` built from
//!   regularised roots `H = [[1, 1], [λ₁, λ₂]]` (Hölder speeds), and
//! * empirical energy envelopes fitted over a β-grid.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::coefficient::{
    regularized_roots, regularized_roots_with_shift, CoefficientError, PropagationSpeed,
    RegularityClass, RegularizedRoots, SampleGrid,
};
use crate::dopri5::{self, IntegrateError};

#[derive(Debug, Error)]
pub enum ModeOdeError {
    #[error(transparent)]
    Integration(#[from] IntegrateError),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
    #[error("energy form requires a Hermitian matrix (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("no mollification scale is associated with a Lipschitz positive speed")]
    EpsilonUndefinedForCase1,
    #[error("frequency {beta} lies below the envelope threshold beta0 = {beta0}")]
    BetaBelowThreshold { beta: f64, beta0: f64 },
    #[error("Gevrey index {s} outside the admissible range [1, {max}) for this case")]
    InvalidGevreyIndex { s: f64, max: f64 },
    #[error("singular root transform at t = {t:.6e} (root gap {gap:.3e})")]
    SingularTransform { t: f64, gap: f64 },
    #[error("operation defined for cases {expected}, but the speed is case {got}")]
    WrongCase { expected: &'static str, got: u8 },
    #[error("frequency grid must be nonempty")]
    EmptyBetaGrid,
}

/// A single spectral mode of the group wave equation.
#[derive(Debug, Clone)]
pub struct ModeProblem {
    pub beta: f64,
    pub speed: PropagationSpeed,
    pub v0: Complex64,
    pub v1: Complex64,
}

/// Integrated mode with its sampled derivative.
#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    pub beta: f64,
    pub times: Vec<f64>,
    pub v: Vec<Complex64>,
    pub dv: Vec<Complex64>,
    /// Relative tolerance the integration was accepted at.
    pub rel_tol: f64,
}

impl ModeTrajectory {
    /// Standard mode energy `β²|v|² + |∂ₜv|²` at each sample.
    pub fn standard_energy(&self) -> Vec<f64> {
        self.v
            .iter()
            .zip(&self.dv)
            .map(|(v, dv)| self.beta * self.beta * v.norm_sqr() + dv.norm_sqr())
            .collect()
    }

    /// Initial standard energy.
    pub fn e0(&self) -> f64 {
        self.beta * self.beta * self.v[0].norm_sqr() + self.dv[0].norm_sqr()
    }

    /// Reduced state `V(t) = (iβ v, ∂ₜv)` at sample `i`.
    pub fn reduced_state(&self, i: usize) -> Vector2<Complex64> {
        Vector2::new(
            Complex64::new(0.0, self.beta) * self.v[i],
            self.dv[i],
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    /// Number of uniform sample intervals on `[0, horizon]`.
    pub samples: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rel_tol: 1e-10,
            samples: 256,
        }
    }
}

/// First-order reduction: initial state `V(0) = (iβ v₀, v₁)` and the
/// coefficient matrix `A(t) = [[0, 1], [a(t), 0]]` with `V' = iβ A V`.
pub fn reduce_to_system(
    p: &ModeProblem,
) -> (Vector2<Complex64>, impl Fn(f64) -> Matrix2<f64> + '_) {
    let v0 = Vector2::new(Complex64::new(0.0, p.beta) * p.v0, p.v1);
    let speed = p.speed.clone();
    (v0, move |t| Matrix2::new(0.0, 1.0, speed.eval(t), 0.0))
}

/// Integrates a mode against an arbitrary speed function.  `a_sup` bounds
/// `a` on the integration window and sets the oscillation step cap
/// `2π / (20 β √a_sup)`.
pub fn integrate_mode_fn(
    beta: f64,
    a: impl Fn(f64) -> f64,
    a_sup: f64,
    v0: Complex64,
    v1: Complex64,
    times: &[f64],
    rel_tol: f64,
) -> Result<ModeTrajectory, ModeOdeError> {
    if beta == 0.0 {
        // Kernel mode: v'' = 0 exactly, so the solution drifts linearly.
        let v = times.iter().map(|&t| v0 + v1 * Complex64::from(t)).collect();
        let dv = times.iter().map(|_| v1).collect();
        return Ok(ModeTrajectory {
            beta,
            times: times.to_vec(),
            v,
            dv,
            rel_tol,
        });
    }
    let omega = beta * a_sup.sqrt();
    let max_step = if omega > 0.0 {
        std::f64::consts::TAU / (20.0 * omega)
    } else {
        f64::INFINITY
    };
    let opts = dopri5::Options {
        rel_tol,
        abs_tol: 1e-14,
        max_step,
        ..dopri5::Options::default()
    };
    let b2 = beta * beta;
    let f = |t: f64, y: &dopri5::State| {
        dopri5::State::new(y[1], -Complex64::from(b2 * a(t)) * y[0])
    };
    let y0 = dopri5::State::new(v0, v1);
    let states = dopri5::integrate(f, times[0], y0, times, opts)?;
    let (v, dv) = states.iter().map(|y| (y[0], y[1])).unzip();
    Ok(ModeTrajectory {
        beta,
        times: times.to_vec(),
        v,
        dv,
        rel_tol,
    })
}

/// Integrates a mode problem over `[0, horizon]` on a uniform sample grid.
pub fn integrate_mode(
    p: &ModeProblem,
    opts: IntegrateOptions,
) -> Result<ModeTrajectory, ModeOdeError> {
    let horizon = p.speed.horizon();
    let times: Vec<f64> = (0..=opts.samples)
        .map(|i| horizon * i as f64 / opts.samples as f64)
        .collect();
    integrate_mode_at(p, &times, opts.rel_tol)
}

/// Integrates a mode problem recording the state at the given times.
pub fn integrate_mode_at(
    p: &ModeProblem,
    times: &[f64],
    rel_tol: f64,
) -> Result<ModeTrajectory, ModeOdeError> {
    let speed = p.speed.clone();
    integrate_mode_fn(
        p.beta,
        move |t| speed.eval(t),
        p.speed.a_sup(),
        p.v0,
        p.v1,
        times,
        rel_tol,
    )
}

/// Closed-form solution for constant speed `a ≡ c`:
/// `v(t) = cos(ωt) v₀ + sin(ωt)/ω v₁`, `ω = β√c`, with the linear drift
/// limit at `ω = 0`.  Returns `(v, ∂ₜv)`.
pub fn const_speed_oracle(
    beta: f64,
    c: f64,
    v0: Complex64,
    v1: Complex64,
    t: f64,
) -> (Complex64, Complex64) {
    let omega = beta * c.sqrt();
    if omega == 0.0 {
        (v0 + v1 * Complex64::from(t), v1)
    } else {
        let (sin, cos) = (omega * t).sin_cos();
        (
            v0 * Complex64::from(cos) + v1 * Complex64::from(sin / omega),
            v0 * Complex64::from(-omega * sin) + v1 * Complex64::from(cos),
        )
    }
}

/// The symmetriser `S(t) = diag(2a(t), 2)` of `A(t)`.
pub fn symmetriser(a_val: f64) -> Matrix2<f64> {
    Matrix2::new(2.0 * a_val, 0.0, 0.0, 2.0)
}

/// The quasi-symmetriser `Q_ε(t) = S(t) + 2ε² e₁₁ = diag(2a + 2ε², 2)`.
pub fn quasi_symmetriser(a_val: f64, epsilon: f64) -> Matrix2<f64> {
    Matrix2::new(2.0 * (a_val + epsilon * epsilon), 0.0, 0.0, 2.0)
}

/// Max-entry norm of `S A − Aᵀ S` — identically zero: the symmetriser
/// symmetrises.  Exposed so tests can assert the identity numerically.
pub fn symmetriser_commutation_defect(a_val: f64) -> f64 {
    let s = symmetriser(a_val);
    let a = Matrix2::new(0.0, 1.0, a_val, 0.0);
    let d = s * a - a.transpose() * s;
    d.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Max-entry norm of `Q_ε A − Aᵀ Q_ε − 2ε² J`, `J = [[0,1],[-1,0]]` —
/// identically zero: the quasi-symmetriser defect is exactly the rotation.
pub fn quasi_commutation_defect(a_val: f64, epsilon: f64) -> f64 {
    let q = quasi_symmetriser(a_val, epsilon);
    let a = Matrix2::new(0.0, 1.0, a_val, 0.0);
    let j = Matrix2::new(0.0, 1.0, -1.0, 0.0);
    let d = q * a - a.transpose() * q - j * (2.0 * epsilon * epsilon);
    d.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Coercivity constant `c₁ = 2 max(1, ‖a‖_∞ + ε²)` with
/// `c₁⁻¹ ε² |V|² ≤ (Q_ε V, V) ≤ c₁ |V|²` for all `ε ∈ (0, 1]`.
pub fn quasi_coercivity_constant(a_sup: f64, epsilon: f64) -> f64 {
    2.0 * (a_sup + epsilon * epsilon).max(1.0)
}

/// Quadratic form `(M V, V)` for a Hermitian `M`; rejects non-Hermitian
/// input (max-entry defect above `1e-12` relative to the matrix scale).
pub fn energy(m: &Matrix2<Complex64>, v: &Vector2<Complex64>) -> Result<f64, ModeOdeError> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let defect = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > 1e-12 * (1.0 + scale) {
        return Err(ModeOdeError::NotHermitian { defect });
    }
    Ok(v.dotc(&(m * v)).re)
}

/// `(M V, V)` for a real symmetric `M` (cannot fail).
pub fn energy_real(m: &Matrix2<f64>, v: &Vector2<Complex64>) -> f64 {
    m[(0, 0)] * v[0].norm_sqr()
        + m[(1, 1)] * v[1].norm_sqr()
        + 2.0 * m[(0, 1)] * (v[0].conj() * v[1]).re
}

/// Mollification scale for a given case, applied to the exponent exactly as
/// stored in the regularity class:
/// case 2 `ε = 1/β`, case 3 `ε = β^{-l/(2+l)}`, case 4 `ε = β^{-1/(α+1)}`.
///
/// The degenerate verification pipeline works with the Hölder exponent of
/// `√a` instead; see [`CaseFrame::epsilon`].
pub fn case_epsilon(
    class: RegularityClass,
    beta: f64,
    beta0: f64,
) -> Result<f64, ModeOdeError> {
    if beta < beta0 {
        return Err(ModeOdeError::BetaBelowThreshold { beta, beta0 });
    }
    match class {
        RegularityClass::LipschitzPositive => Err(ModeOdeError::EpsilonUndefinedForCase1),
        RegularityClass::HoelderPositive { .. } => Ok(1.0 / beta),
        RegularityClass::SmoothDegenerate { order } => {
            let l = order as f64;
            Ok(beta.powf(-l / (2.0 + l)))
        }
        RegularityClass::HoelderDegenerate { alpha } => Ok(beta.powf(-1.0 / (alpha + 1.0))),
    }
}

/// Per-case scaling frame used by the verification pipeline.
///
/// For degenerate Hölder speeds the estimates run on the Hölder exponent of
/// `√a`, which is half the exponent of `a`; the frame performs that
/// conversion once so every downstream formula (`ε`, shift, prefactor,
/// admissible s-range) uses one consistent exponent.
#[derive(Debug, Clone, Copy)]
pub struct CaseFrame {
    pub case: u8,
    /// Hölder exponent of `√a` (1 for Lipschitz and smooth cases).
    pub root_alpha: f64,
    /// Smoothness order `l` for case 3.
    pub smoothness: Option<u32>,
    /// `ε = β^{-γ}`; zero for case 1 (no mollification scale).
    pub epsilon_exponent: f64,
    /// Energy prefactor `1 + β^p`.
    pub prefactor_exponent: f64,
    /// Strict upper bound of the admissible Gevrey range (`∞` for case 1).
    pub s_max: f64,
}

impl CaseFrame {
    pub fn for_class(class: RegularityClass) -> Self {
        match class {
            RegularityClass::LipschitzPositive => CaseFrame {
                case: 1,
                root_alpha: 1.0,
                smoothness: None,
                epsilon_exponent: 0.0,
                prefactor_exponent: 0.0,
                s_max: f64::INFINITY,
            },
            RegularityClass::HoelderPositive { alpha } => CaseFrame {
                case: 2,
                root_alpha: alpha,
                smoothness: None,
                epsilon_exponent: 1.0,
                prefactor_exponent: 0.0,
                s_max: 1.0 / (1.0 - alpha),
            },
            RegularityClass::SmoothDegenerate { order } => {
                let l = order as f64;
                let sigma = 1.0 + l / 2.0;
                CaseFrame {
                    case: 3,
                    root_alpha: 1.0,
                    smoothness: Some(order),
                    epsilon_exponent: l / (2.0 + l),
                    prefactor_exponent: l / sigma,
                    s_max: sigma,
                }
            }
            RegularityClass::HoelderDegenerate { alpha } => {
                let mu = alpha / 2.0;
                CaseFrame {
                    case: 4,
                    root_alpha: mu,
                    smoothness: None,
                    epsilon_exponent: 1.0 / (1.0 + mu),
                    prefactor_exponent: mu / (1.0 + mu),
                    s_max: 1.0 + mu,
                }
            }
        }
    }

    /// `σ = 1 + l/2` for case 3.
    pub fn sigma(&self) -> Option<f64> {
        self.smoothness.map(|l| 1.0 + l as f64 / 2.0)
    }

    /// Mollification scale `ε = β^{-γ}` in this frame's exponent convention.
    pub fn epsilon(&self, beta: f64, beta0: f64) -> Result<f64, ModeOdeError> {
        if beta < beta0 {
            return Err(ModeOdeError::BetaBelowThreshold { beta, beta0 });
        }
        if self.case == 1 {
            return Err(ModeOdeError::EpsilonUndefinedForCase1);
        }
        Ok(beta.powf(-self.epsilon_exponent))
    }

    /// Energy prefactor `1 + β^p` (identically 1 for cases 1 and 2).
    pub fn prefactor(&self, beta: f64) -> f64 {
        if self.prefactor_exponent == 0.0 {
            1.0
        } else {
            1.0 + beta.powf(self.prefactor_exponent)
        }
    }

    /// Validates a Gevrey index against this case's admissible range.
    pub fn check_s(&self, s: f64) -> Result<(), ModeOdeError> {
        let ok = match self.case {
            1 => s >= 1.0,
            3 => s >= 1.0 && s <= self.s_max,
            _ => s >= 1.0 && s < self.s_max,
        };
        if ok {
            Ok(())
        } else {
            Err(ModeOdeError::InvalidGevreyIndex { s, max: self.s_max })
        }
    }

    /// Abscissa of the envelope exponent: `β^{1/s}` for cases 2 and 4,
    /// `β^{1/σ}` for case 3 (the exponent there does not involve `s`),
    /// and `β^{1/s}` as a neutral reporting scale for case 1.
    pub fn envelope_abscissa(&self, beta: f64, s: f64) -> f64 {
        match self.case {
            3 => beta.powf(1.0 / self.sigma().expect("case 3 has sigma")),
            _ => beta.powf(1.0 / s),
        }
    }
}

/// Predicted energy envelope `E(t) ≤ envelope(t, β) · E(0)`:
///
/// * case 1: `C`,
/// * case 2: `C exp(K t β^{1/s})`,
/// * case 3: `C (1 + β^{l/σ}) exp(K β^{1/σ})`, `σ = 1 + l/2`,
/// * case 4: `C (1 + β^{μ/(1+μ)}) exp(K t β^{1/s})`, `μ` the root exponent.
pub fn predict_envelope(
    class: RegularityClass,
    s: f64,
    k_const: f64,
    c_const: f64,
    beta: f64,
    t: f64,
    e0: f64,
) -> Result<f64, ModeOdeError> {
    let frame = CaseFrame::for_class(class);
    frame.check_s(s)?;
    let x = frame.envelope_abscissa(beta, s);
    let value = match frame.case {
        1 => c_const,
        3 => c_const * frame.prefactor(beta) * (k_const * x).exp(),
        _ => c_const * frame.prefactor(beta) * (k_const * t * x).exp(),
    };
    Ok(value * e0)
}

/// `|W(t)|` along a trajectory: `W = e^{(ρ₀ − Kt)β^{1/s}} N(t) V(t)` with
/// `N = (det H) H⁻¹ = [[λ₂, −1], [−λ₁, 1]]` from regularised roots.
///
/// Roots are taken at the trajectory's sample times by linear interpolation
/// on the root grid; a nonpositive root gap is rejected.
pub fn transformed_energy(
    traj: &ModeTrajectory,
    roots: &RegularizedRoots,
    rho0: f64,
    k_const: f64,
    s: f64,
) -> Result<Vec<f64>, ModeOdeError> {
    let b = traj.beta.powf(1.0 / s);
    let mut out = Vec::with_capacity(traj.times.len());
    for (i, &t) in traj.times.iter().enumerate() {
        let (l1, l2) = roots.at(t);
        let gap = l2 - l1;
        if gap <= 0.0 {
            return Err(ModeOdeError::SingularTransform { t, gap });
        }
        let v = traj.reduced_state(i);
        let w1 = Complex64::from(l2) * v[0] - v[1];
        let w2 = -Complex64::from(l1) * v[0] + v[1];
        let scale = ((rho0 - k_const * t) * b).exp();
        out.push(scale * (w1.norm_sqr() + w2.norm_sqr()).sqrt());
    }
    Ok(out)
}

/// Grönwall rate for Lipschitz positive speeds:
/// `c' = sup‖∂ₜS‖ / c₀ = 2 sup|a'| / (2 min(a₀, 1))`.
pub fn groenwall_rate(speed: &PropagationSpeed) -> Option<f64> {
    if speed.class() != RegularityClass::LipschitzPositive {
        return None;
    }
    let lip = speed.lipschitz_derivative_bound()?;
    Some(lip / speed.a0().min(1.0))
}

/// Pointwise Grönwall check on the symmetriser energy
/// `E_S(t) = (S(t)V, V) = 2a(t)β²|v|² + 2|∂ₜv|²`: every discrete derivative
/// must stay below `c' E` up to finite-difference and integration slack.
#[derive(Debug, Clone)]
pub struct GroenwallReport {
    pub c_prime: f64,
    /// Largest ratio of measured discrete derivative to allowed bound.
    pub max_quotient: f64,
    pub passed: bool,
}

pub fn groenwall_pointwise_check(
    traj: &ModeTrajectory,
    speed: &PropagationSpeed,
    rel_tol: f64,
) -> Option<GroenwallReport> {
    let c_prime = groenwall_rate(speed)?;
    let e: Vec<f64> = traj
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let s = symmetriser(speed.eval(t));
            energy_real(&s, &traj.reduced_state(i))
        })
        .collect();
    let mut max_q: f64 = 0.0;
    for i in 0..e.len() - 1 {
        let dt = traj.times[i + 1] - traj.times[i];
        let de = (e[i + 1] - e[i]) / dt;
        let em = e[i].max(e[i + 1]);
        // c' E bounds the true derivative; (1 + c'dt) absorbs the offset of
        // the difference quotient, the rel_tol term integration noise.
        let allowed = c_prime * em * (1.0 + c_prime * dt) + 10.0 * rel_tol * em / dt;
        if allowed > 0.0 {
            max_q = max_q.max(de / allowed);
        }
    }
    Some(GroenwallReport {
        c_prime,
        max_quotient: max_q,
        passed: max_q <= 1.0,
    })
}

/// Unit-energy initial data pairs `(v₀, v₁) = (1/β, 0)` and `(0, 1)`.
pub fn unit_energy_data(beta: f64) -> [(Complex64, Complex64); 2] {
    let v0 = if beta > 0.0 { 1.0 / beta } else { 1.0 };
    [
        (Complex64::from(v0), Complex64::from(0.0)),
        (Complex64::from(0.0), Complex64::from(1.0)),
    ]
}

#[derive(Debug, Clone, Copy)]
pub struct EnvelopeOptions {
    pub rel_tol: f64,
    pub samples: usize,
    pub beta0: f64,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        EnvelopeOptions {
            rel_tol: 1e-10,
            samples: 256,
            beta0: 1.0,
        }
    }
}

/// Result of an envelope sweep over a β-grid.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub case: u8,
    pub s: f64,
    pub betas: Vec<f64>,
    /// `sup_t E(t) / (prefactor(β) · E(0))`, maximised over the two
    /// unit-energy data sets.
    pub sup_ratios: Vec<f64>,
    /// Envelope abscissae `x(β)` the fit ran against.
    pub abscissae: Vec<f64>,
    /// Fitted slope of `log sup_ratio` against `x(β)` — the empirical
    /// envelope constant `K` (times the effective horizon for cases 2/4).
    pub fitted_k: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Growth quotients `log(max(ratio, 1)) / x(β)`; bounded tails are what
    /// β-uniformity of the envelope constant means.
    pub fn growth_quotients(&self) -> Vec<f64> {
        self.sup_ratios
            .iter()
            .zip(&self.abscissae)
            .map(|(&r, &x)| r.max(1.0).ln() / x)
            .collect()
    }

    /// Largest ratio between sup-ratios across the grid (case-1 uniformity).
    pub fn ratio_spread(&self) -> f64 {
        let max = self.sup_ratios.iter().copied().fold(f64::MIN, f64::max);
        let min = self.sup_ratios.iter().copied().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Runs the envelope verification for a speed over a β-grid: integrates the
/// two unit-energy data sets per β, normalises the energy sup by the case
/// prefactor, and fits `log sup_ratio` against the envelope abscissa.
///
/// Passes iff every ratio is finite and the fit residuals stay within a
/// factor 10 (log-scale 2.30) of the fitted envelope.
pub fn verify_envelope(
    speed: &PropagationSpeed,
    betas: &[f64],
    s: f64,
    opts: EnvelopeOptions,
) -> Result<VerificationReport, ModeOdeError> {
    if betas.is_empty() {
        return Err(ModeOdeError::EmptyBetaGrid);
    }
    let frame = CaseFrame::for_class(speed.class());
    frame.check_s(s)?;
    for &beta in betas {
        if beta < opts.beta0 {
            return Err(ModeOdeError::BetaBelowThreshold {
                beta,
                beta0: opts.beta0,
            });
        }
    }
    let sup_ratios: Vec<f64> = betas
        .par_iter()
        .map(|&beta| -> Result<f64, ModeOdeError> {
            let mut sup = 0.0f64;
            for (v0, v1) in unit_energy_data(beta) {
                let p = ModeProblem {
                    beta,
                    speed: speed.clone(),
                    v0,
                    v1,
                };
                let traj = integrate_mode(
                    &p,
                    IntegrateOptions {
                        rel_tol: opts.rel_tol,
                        samples: opts.samples,
                    },
                )?;
                let e0 = traj.e0();
                let peak = traj
                    .standard_energy()
                    .into_iter()
                    .fold(0.0f64, f64::max);
                sup = sup.max(peak / e0);
            }
            Ok(sup / frame.prefactor(beta))
        })
        .collect::<Result<_, _>>()?;

    let abscissae: Vec<f64> = betas
        .iter()
        .map(|&b| frame.envelope_abscissa(b, s))
        .collect();
    let ys: Vec<f64> = sup_ratios.iter().map(|r| r.ln()).collect();
    let (fitted_k, intercept) = fit_line(&abscissae, &ys);
    let residuals: Vec<f64> = abscissae
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| y - (intercept + fitted_k * x))
        .collect();
    let finite = sup_ratios.iter().all(|r| r.is_finite())
        && fitted_k.is_finite()
        && intercept.is_finite();
    let max_res = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(VerificationReport {
        case: frame.case,
        s,
        betas: betas.to_vec(),
        sup_ratios,
        abscissae,
        fitted_k,
        intercept,
        residuals,
        passed: finite && max_res <= 10.0f64.ln(),
    })
}

/// Ordinary least squares `y = intercept + slope · x`; a degenerate abscissa
/// spread yields slope 0 with the mean as intercept.
fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 1e-300 {
        (0.0, my)
    } else {
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WMonotonicityOptions {
    /// Slack tolerance of the monotonicity assertion (relative to `|W(0)|`).
    pub rel_tol: f64,
    /// Tolerance the underlying mode integration runs at.
    pub ode_rel_tol: f64,
    pub beta0: f64,
    pub grid: SampleGrid,
}

impl Default for WMonotonicityOptions {
    fn default() -> Self {
        WMonotonicityOptions {
            rel_tol: 1e-8,
            ode_rel_tol: 1e-10,
            beta0: 1.0,
            grid: SampleGrid::default(),
        }
    }
}

/// Report of a `|W|`-monotonicity run at one frequency.
#[derive(Debug, Clone)]
pub struct WMonotonicityReport {
    pub beta: f64,
    pub epsilon: f64,
    pub s: f64,
    /// Smallest damping constant that makes the measured derivative bound
    /// nonpositive at every grid point: `sup_t rate(t) / (2β^{1/s})`.
    pub k_needed: f64,
    /// The damping actually applied (5% above `k_needed`, making the decay
    /// strict so integration noise cannot fake a violation).
    pub k_choice: f64,
    /// Largest increase `|W(t_{i+1})| − |W(t_i)|` over both data sets.
    pub max_rise: f64,
    /// `|W(0)|` scale the slack is measured against.
    pub w0: f64,
    pub passed: bool,
}

/// Measures the damping constant needed for `|W|`-monotonicity and verifies
/// it on integrated trajectories.  Applies to the Hölder regimes (cases 2
/// and 4); case 4 runs in the `√a` exponent convention of [`CaseFrame`].
///
/// The pointwise derivative bound is
/// `d/dt |W|² ≤ (−2Kβ^{1/s} + 2‖H⁻¹H_t‖ + 2|(det H)_t|/det H
///              + β‖H⁻¹AH − (H⁻¹AH)*‖) |W|²`,
/// and every norm on the right has a closed form in `λ₁, λ₂, a`.
pub fn w_monotonicity_check(
    speed: &PropagationSpeed,
    beta: f64,
    s: f64,
    opts: WMonotonicityOptions,
) -> Result<WMonotonicityReport, ModeOdeError> {
    let frame = CaseFrame::for_class(speed.class());
    if frame.case != 2 && frame.case != 4 {
        return Err(ModeOdeError::WrongCase {
            expected: "2 or 4",
            got: frame.case,
        });
    }
    frame.check_s(s)?;
    let epsilon = frame.epsilon(beta, opts.beta0)?;
    let roots = if frame.case == 2 {
        regularized_roots(speed, epsilon, false, opts.grid)?
    } else {
        regularized_roots_with_shift(speed, epsilon, frame.root_alpha, opts.grid)?
    };

    // Measured damping requirement over the root grid.
    let h = roots.step();
    if h > epsilon / 10.0 {
        return Err(ModeOdeError::Coefficient(
            CoefficientError::GridTooCoarse { step: h, epsilon },
        ));
    }
    let n = roots.times.len();
    let mut sup_rate = 0.0f64;
    for i in 1..n - 1 {
        let l1 = roots.lambda1[i];
        let l2 = roots.lambda2[i];
        let det = l2 - l1;
        if det <= 0.0 {
            return Err(ModeOdeError::SingularTransform {
                t: roots.times[i],
                gap: det,
            });
        }
        let d1 = (roots.lambda1[i + 1] - roots.lambda1[i - 1]) / (2.0 * h);
        let d2 = (roots.lambda2[i + 1] - roots.lambda2[i - 1]) / (2.0 * h);
        let a_val = speed.eval(roots.times[i]);
        // ‖H⁻¹H_t‖ for H⁻¹H_t = det⁻¹[[−λ₁', −λ₂'], [λ₁', λ₂']].
        let t1 = 2.0 * (2.0f64).sqrt() * (d1 * d1 + d2 * d2).sqrt() / det;
        let t2 = 2.0 * (d2 - d1).abs() / det;
        // ‖H⁻¹AH − (H⁻¹AH)*‖ = |λ₁² + λ₂² − 2a| / det.
        let t3 = beta * (l1 * l1 + l2 * l2 - 2.0 * a_val).abs() / det;
        sup_rate = sup_rate.max(t1 + t2 + t3);
    }
    let k_needed = sup_rate / (2.0 * beta.powf(1.0 / s));
    let k_choice = 1.05 * k_needed;

    let mut max_rise = 0.0f64;
    let mut w0_scale = 0.0f64;
    for (v0, v1) in unit_energy_data(beta) {
        let p = ModeProblem {
            beta,
            speed: speed.clone(),
            v0,
            v1,
        };
        // Sample exactly on the root grid: |W| then needs no interpolation.
        let traj = integrate_mode_at(&p, &roots.times, opts.ode_rel_tol)?;
        let w = transformed_energy(&traj, &roots, 0.0, k_choice, s)?;
        w0_scale = w0_scale.max(w[0]);
        for i in 0..w.len() - 1 {
            max_rise = max_rise.max(w[i + 1] - w[i]);
        }
    }
    Ok(WMonotonicityReport {
        beta,
        epsilon,
        s,
        k_needed,
        k_choice,
        max_rise,
        w0: w0_scale,
        passed: max_rise <= 10.0 * opts.rel_tol * w0_scale,
    })
}
