//! Acceptance gate for the workbench: ten independent desk-scale criteria,
//! one test each, each printing a single PASS/FAIL line (visible with
//! `cargo test --test acceptance -- --nocapture`; captured output is shown
//! automatically for any failing criterion).
//!
//! Two criteria are *expected to fail*; both trace to the extreme weight
//! labels m = ±l, where the sub-Laplacian eigenvalue l(l+1) − m² degenerates
//! to l rather than order l²:
//!
//! * criterion 2 demands Riesz word norms ≤ 2^len, but pure words reach
//!   √(len!)·2^{len/2} at the extreme column, overtaking 2^len at length 4
//!   (the l-uniform boundedness itself holds and is asserted);
//! * criterion 9 demands geometric decay of the s = 1 trace-sum increments,
//!   but that sum is logarithmically divergent (shell l contributes on the
//!   order of 2/l).
//!
//! Both tests fail honestly with the measured values in their messages; see
//! the README note on the test run.

use num_complex::Complex64;

use hypowave_core::coefficient::{PropagationSpeed, SpeedSpec};
use hypowave_core::gevrey::{forward_constant_check, gevrey_order_fit, ln_factorial, sup_multiplier};
use hypowave_core::heisenberg::{
    commutator_check, lambda_invariance_max_dev, sublaplacian_consistency, SpectralFieldHeis,
    ZLetter,
};
use hypowave_core::linalg;
use hypowave_core::mode_ode::{
    groenwall_rate, verify_envelope, w_monotonicity_check, EnvelopeOptions, WMonotonicityOptions,
};
use hypowave_core::spectral::SpectralField;
use hypowave_core::su2::{
    self, bessel_partial_sum, ladder_symbol, riesz_op_norm, sublaplacian_symbol, words_of_length,
    HalfInt, Ladder, SpectralFieldSU2,
};
use hypowave_core::wave::{
    solve_cauchy, verify_sobolev_wellposedness, SolveOptions,
};

fn half(twice: u32) -> HalfInt {
    HalfInt::from_twice(twice)
}

/// Prints the criterion's verdict line and returns the verdict unchanged so
/// the caller can assert on it.
fn report(name: &str, pass: bool, detail: &str) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {name}: {verdict} ({detail})");
    pass
}

fn speed(spec: SpeedSpec, horizon: f64) -> PropagationSpeed {
    PropagationSpeed::from_spec(spec, horizon).expect("catalogue speed is admissible")
}

/// Deterministic dense test block: entries vary with position and a seed so
/// different blocks are not proportional to one another.
fn dense_block(dim: usize, seed: f64) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_fn(dim, dim, |r, c| {
        let phase = seed + 1.7 * r as f64 + 0.9 * c as f64;
        Complex64::new(phase.sin(), phase.cos()) / (dim as f64)
    })
}

/// SU(2) data pair occupying every block `l ≤ lmax`.
fn su2_pair(lmax: HalfInt) -> (SpectralField, SpectralField) {
    let mut u0 = SpectralFieldSU2::new(lmax);
    let mut u1 = SpectralFieldSU2::new(lmax);
    for twice in 0..=lmax.twice() {
        let l = half(twice);
        u0.insert(l, dense_block(l.dim(), twice as f64)).unwrap();
        u1.insert(l, dense_block(l.dim(), twice as f64 + 0.5)).unwrap();
    }
    (SpectralField::Su2(u0), SpectralField::Su2(u1))
}

/// ℍ₁ data pair on the given λ-grid at Hermite truncation `trunc`.
fn heis_pair(trunc: usize, lambdas: &[f64]) -> (SpectralField, SpectralField) {
    let mut f0 = SpectralFieldHeis::zero(trunc, lambdas.to_vec()).unwrap();
    let mut f1 = f0.clone();
    for j in 0..lambdas.len() {
        *f0.coeff_mut(j) = dense_block(trunc, j as f64);
        *f1.coeff_mut(j) = dense_block(trunc, j as f64 + 0.5);
    }
    (SpectralField::Heis(f0), SpectralField::Heis(f1))
}

/// All words over {Z, Z̄} of the given length.
fn z_words_of_length(len: usize) -> Vec<Vec<ZLetter>> {
    (0..1usize << len)
        .map(|mask| {
            (0..len)
                .map(|i| if mask >> i & 1 == 0 { ZLetter::Z } else { ZLetter::Zbar })
                .collect()
        })
        .collect()
}

/// 1. The two ladder symbols reproduce the sub-Laplacian symbol through the
///    anticommutator, in both sign conventions, for every l up to 10.
#[test]
fn c01_su2_anticommutator_identity() {
    let mut worst = 0.0f64;
    for twice in 0..=20 {
        let l = half(twice);
        let x = ladder_symbol(Ladder::X, l).into_matrix();
        let y = ladder_symbol(Ladder::Y, l).into_matrix();
        let sl = sublaplacian_symbol(l).into_matrix();

        // Plain form: ½(XY + YX) = σ_L for the real ladder matrices.
        let anti = (&x * &y + &y * &x) * Complex64::new(0.5, 0.0);
        worst = worst.max(linalg::max_entry_diff(&anti, &sl));

        // Skew form: regauging each generator by i (the symbols of real
        // vector fields are skew-Hermitian) flips the sign: −½(X̃Ỹ + ỸX̃).
        let i = Complex64::new(0.0, 1.0);
        let xs = x.map(|z| z * i);
        let ys = y.map(|z| z * i);
        let anti_skew = (&xs * &ys + &ys * &xs) * Complex64::new(-0.5, 0.0);
        worst = worst.max(linalg::max_entry_diff(&anti_skew, &sl));
    }
    let pass = report(
        "01 su2-anticommutator",
        worst <= 1e-12,
        &format!("max deviation {worst:.3e} over l ≤ 10, both sign forms"),
    );
    assert!(pass, "anticommutator deviation {worst:.3e} exceeds 1e-12");
}

/// 2. Riesz word norms for words of length ≤ 6, l ≤ 50.  The l-uniform
///    boundedness itself holds (sharp constant √(q!)·2^{q/2}, verified here),
///    and the single-letter norm measures √2 — but the demanded per-letter
///    cap 2^{|α|} does NOT hold from length 4 on: the pure words X^q, Y^q
///    reach √(q!)·2^{q/2} at the extreme column n = ∓l, where the
///    sub-Laplacian weight is only l rather than order l².  This criterion
///    fails by measurement and is expected to fail here.
#[test]
fn c02_su2_riesz_uniform_bound() {
    let mut single_dev = 0.0f64;
    let mut sharp_excess = f64::MIN;
    // (measured worst norm/2^len quotient, witness word, witness l) per run.
    let mut worst = (f64::MIN, String::new(), 0u32);
    for len in 1..=6 {
        let cap = (1u64 << len) as f64;
        let sharp = su2::riesz_uniform_bound(len);
        for word in words_of_length(len) {
            for twice in 1..=100 {
                let op = riesz_op_norm(&word, half(twice)).unwrap();
                sharp_excess = sharp_excess.max(op / sharp - 1.0);
                if op / cap > worst.0 {
                    worst = (op / cap, su2::word_string(&word), twice);
                }
                if len == 1 {
                    single_dev = single_dev.max((op - 2f64.sqrt()).abs());
                }
            }
        }
    }
    let uniformity_ok = sharp_excess <= 1e-12 && single_dev <= 1e-10;
    let per_letter_cap_ok = worst.0 <= 1.0 + 1e-12;
    let pass = report(
        "02 su2-riesz-uniformity",
        uniformity_ok && per_letter_cap_ok,
        &format!(
            "sharp-bound excess {sharp_excess:.3e}; single-letter dev {single_dev:.3e}; \
             demanded norm ≤ 2^len fails: {} at 2l = {} measures {:.4}×2^len",
            worst.1, worst.2, worst.0
        ),
    );
    assert!(
        pass,
        "the demanded cap 2^len is exceeded: word {} at 2l = {} has Riesz norm {:.4}×2^len \
         (measured quotient over the sharp bound √(len!)·2^{{len/2}} is 1 + {sharp_excess:.3e}, \
         so uniform boundedness in l itself holds with that constant; single-letter deviation \
         from √2 is {single_dev:.3e}). A per-letter product bound ignores the extreme column \
         n = ∓l, where the sub-Laplacian eigenvalue l(l+1) − n² degenerates to l while each \
         ladder factor still contributes ≈ 2l; pure words push the column label monotonically \
         and collect √((2l)^q·q!)/l^{{q/2}} → √(q!)·2^{{q/2}} there, which overtakes 2^q at \
         q = 4 (√(24/16) > 1) and reaches ≈ 3.1×2^6 by q = 6.",
        worst.1,
        worst.2,
        worst.0
    );
}

/// 3. ℍ₁ Riesz symbols are λ-independent on the valid block: entries agree
///    to 1e−12 across five decades of |λ| and both signs, words of length ≤ 6.
#[test]
fn c03_heis_lambda_invariance() {
    let lambdas = [0.1, -0.1, 1.0, -1.0, 10.0, -10.0];
    let mut worst = 0.0f64;
    for len in 1..=6 {
        for word in z_words_of_length(len) {
            let dev = lambda_invariance_max_dev(&word, &lambdas, 128).unwrap();
            worst = worst.max(dev);
        }
    }
    let pass = report(
        "03 heis-lambda-invariance",
        worst <= 1e-12,
        &format!("max valid-block deviation {worst:.3e}, words ≤ 6, N = 128"),
    );
    assert!(pass, "λ-invariance deviation {worst:.3e} exceeds 1e-12");
}

/// 4. ℍ₁ generator matrices satisfy the commutation relation and the
///    sum-of-squares identity on the truncation-safe blocks.
#[test]
fn c04_heis_commutation_and_sum_of_squares() {
    let mut worst_comm = 0.0f64;
    let mut worst_sos = 0.0f64;
    for lambda in [1.0, -1.0, 4.0, -4.0] {
        worst_comm = worst_comm.max(commutator_check(lambda, 64).unwrap());
        worst_sos = worst_sos.max(sublaplacian_consistency(lambda, 64).unwrap());
    }
    let pass = report(
        "04 heis-commutation",
        worst_comm <= 1e-12 && worst_sos <= 1e-12,
        &format!("[X,Y] dev {worst_comm:.3e}; sum-of-squares dev {worst_sos:.3e}"),
    );
    assert!(pass, "commutator {worst_comm:.3e}, sum-of-squares {worst_sos:.3e}");
}

/// 5. Lipschitz positive speed a = 2 + sin 4t over T = 1: the energy sup
///    ratio is β-uniform within a factor 2 and below the Grönwall budget;
///    the constant-speed control run stays at ratio 1.
#[test]
fn c05_case1_energy_budget() {
    let betas = [1.0, 10.0, 100.0, 1000.0];
    let opts = EnvelopeOptions::default();

    let sp = speed(SpeedSpec::Sine { c: 2.0, b: 1.0, omega: 4.0 }, 1.0);
    let rep = verify_envelope(&sp, &betas, 1.0, opts).unwrap();
    assert_eq!(rep.case, 1);
    let spread = rep.ratio_spread();
    // Budget e^{c'} with c' = T·sup‖S_t‖/c₀ + ln(c₁/c₀): the symmetriser
    // derivative is 2a', so sup‖S_t‖/c₀ is the Grönwall rate, and the
    // coercivity gap contributes the ratio of the a-bounds.
    let rate = groenwall_rate(&sp).unwrap();
    let budget =
        (sp.horizon() * rate + (sp.a_sup().max(1.0) / sp.a0().min(1.0)).ln()).exp();
    let sup = rep.sup_ratios.iter().cloned().fold(0.0f64, f64::max);

    let ctrl = speed(SpeedSpec::Constant { c: 1.0 }, 1.0);
    let ctrl_rep = verify_envelope(&ctrl, &betas, 1.0, opts).unwrap();
    let ctrl_dev = ctrl_rep
        .sup_ratios
        .iter()
        .map(|r| (r - 1.0).abs())
        .fold(0.0f64, f64::max);

    let pass = report(
        "05 case1-energy",
        spread <= 2.0 && sup <= budget && ctrl_dev <= 1e-8,
        &format!(
            "spread {spread:.4} ≤ 2; sup ratio {sup:.4} ≤ budget {budget:.2}; const-speed dev {ctrl_dev:.3e}"
        ),
    );
    assert!(pass, "spread {spread}, sup {sup} vs budget {budget}, control dev {ctrl_dev:.3e}");
}

/// 6. Hölder and degenerate catalogue speeds: the fitted envelope slope is
///    bounded on the β-grid for s inside each admissible range, and the
///    |W|-monotonicity invariant holds with the 5%-padded damping choice.
#[test]
fn c06_envelopes_and_w_monotonicity() {
    let betas = [4.0, 16.0, 64.0, 256.0];
    let opts = EnvelopeOptions::default();
    // (speed, admissible s strictly inside its range, expected case index)
    let catalogue = [
        (speed(SpeedSpec::Cusp { c: 1.0, t0: 0.5, alpha: 0.5 }, 1.0), 1.5, 2u8),
        (speed(SpeedSpec::Cusp { c: 0.0, t0: 0.5, alpha: 0.5 }, 1.0), 1.2, 4),
        (speed(SpeedSpec::Quadratic, 1.0), 1.5, 3),
        (speed(SpeedSpec::SineSquared, 1.0), 1.5, 3),
    ];

    let mut detail = String::new();
    let mut pass = true;
    for (sp, s, case) in &catalogue {
        let rep = verify_envelope(sp, &betas, *s, opts).unwrap();
        assert_eq!(rep.case, *case);
        let slope_ok = rep.passed && rep.fitted_k.is_finite() && rep.fitted_k <= 10.0;
        pass &= slope_ok;
        detail.push_str(&format!("case {case} slope {:.3}; ", rep.fitted_k));
        if !slope_ok {
            eprintln!("case {case} envelope: slope {}, residual {}", rep.fitted_k, rep.max_residual());
        }
    }

    // Monotonicity of the transformed energy applies in the Hölder regimes.
    for (sp, s, case) in &catalogue[..2] {
        let mut worst_rel_rise = 0.0f64;
        for &beta in &betas {
            let w = w_monotonicity_check(sp, beta, *s, WMonotonicityOptions::default()).unwrap();
            assert!((w.k_choice / w.k_needed - 1.05).abs() <= 1e-12);
            pass &= w.passed;
            worst_rel_rise = worst_rel_rise.max(w.max_rise / w.w0);
        }
        detail.push_str(&format!("case {case} |W| rise {worst_rel_rise:.2e}; "));
    }

    let pass = report("06 envelopes-w-monotonicity", pass, detail.trim_end_matches("; "));
    assert!(pass, "envelope slope or |W|-monotonicity failed: {detail}");
}

/// 7. Wave solver against the constant-speed closed form on both groups;
///    Sobolev constant stable under truncation doubling; a ≡ 1 control has
///    constant exactly 1.
#[test]
fn c07_wave_solver_oracle() {
    let opts = SolveOptions { rel_tol: 1e-10, n_samples: 101 };
    let tol = 10.0 * opts.rel_tol;

    let c = 2.25;
    let sp_const = speed(SpeedSpec::Constant { c }, 1.0);
    let (u0, u1) = su2_pair(half(12));
    let sol = solve_cauchy(&sp_const, &u0, &u1, opts).unwrap();
    let su2_dev = sol.const_speed_deviation(c);

    let lambdas = [-4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0, 8.0];
    let (h0, h1) = heis_pair(32, &lambdas);
    let sol = solve_cauchy(&sp_const, &h0, &h1, opts).unwrap();
    let heis_dev = sol.const_speed_deviation(c);

    // Sobolev constant under a Lipschitz positive speed, stable when the
    // Hermite truncation doubles (the padded rows carry zero data).
    let sp = speed(SpeedSpec::Sine { c: 2.0, b: 1.0, omega: 4.0 }, 1.0);
    let c32 = verify_sobolev_wellposedness(&sp, &h0, &h1, 1.0, opts).unwrap().c_meas;
    let (h0d, h1d) = {
        let mut f0 = SpectralFieldHeis::zero(64, lambdas.to_vec()).unwrap();
        let mut f1 = f0.clone();
        for j in 0..lambdas.len() {
            let small0 = dense_block(32, j as f64);
            let small1 = dense_block(32, j as f64 + 0.5);
            for r in 0..32 {
                for col in 0..32 {
                    f0.coeff_mut(j)[(r, col)] = small0[(r, col)];
                    f1.coeff_mut(j)[(r, col)] = small1[(r, col)];
                }
            }
        }
        (SpectralField::Heis(f0), SpectralField::Heis(f1))
    };
    let c64 = verify_sobolev_wellposedness(&sp, &h0d, &h1d, 1.0, opts).unwrap().c_meas;
    let stability = (c32 - c64).abs() / c32;

    // a ≡ 1 with resting initial velocity: the pair-norm ratio peaks at
    // t = 0, so the measured constant is exactly 1.
    let unit = speed(SpeedSpec::Constant { c: 1.0 }, 1.0);
    let rest = SpectralField::Su2(SpectralFieldSU2::new(half(12)));
    let c_unit =
        verify_sobolev_wellposedness(&unit, &u0, &rest, 1.0, opts).unwrap().c_meas;
    let unit_dev = (c_unit - 1.0).abs();

    let pass = report(
        "07 wave-solver-oracle",
        su2_dev <= tol && heis_dev <= tol && stability <= 1e-8 && unit_dev <= 1e-8,
        &format!(
            "closed-form dev su2 {su2_dev:.3e}, heis {heis_dev:.3e} (tol {tol:.1e}); \
             C_meas drift under doubling {stability:.3e}; unit-speed C dev {unit_dev:.3e}"
        ),
    );
    assert!(
        pass,
        "su2 {su2_dev:.3e}, heis {heis_dev:.3e}, stability {stability:.3e}, unit {unit_dev:.3e}"
    );
}

/// 8. Forward power-growth bound: every margin is nonnegative for single-mode
///    and exponentially weighted fields, and the scalar multiplier peak at
///    (k, D, s) = (1, 1, 1) equals 4e⁻².
#[test]
fn c08_gevrey_forward_margins() {
    let single = SpectralField::Su2(
        SpectralFieldSU2::unit_entry(half(8), half(4), 0, 2).unwrap(),
    );
    let weighted = {
        let mut f = SpectralFieldSU2::new(half(12));
        for twice in 0..=12 {
            let l = half(twice);
            let w = Complex64::from((-((twice + 1) as f64)).exp());
            f.insert(l, nalgebra::DMatrix::from_diagonal_element(l.dim(), l.dim(), w))
                .unwrap();
        }
        SpectralField::Su2(f)
    };

    let mut worst_margin = f64::INFINITY;
    for field in [&single, &weighted] {
        for s in [1.0, 1.5, 2.0] {
            let rep = forward_constant_check(field, 1.0, s, 20).unwrap();
            worst_margin = worst_margin.min(rep.min_margin());
        }
    }
    let peak = sup_multiplier(1, 1.0, 1.0).unwrap().value;
    let peak_dev = (peak - 4.0 * (-2.0f64).exp()).abs();

    let pass = report(
        "08 gevrey-forward-margins",
        worst_margin >= 0.0 && peak_dev <= 1e-12,
        &format!("min margin {worst_margin:.4}; multiplier peak dev {peak_dev:.3e}"),
    );
    assert!(pass, "min margin {worst_margin}, peak deviation {peak_dev:.3e}");
}

/// 9. Trace sum of the Bessel-type weights: hand value at the smallest cutoff
///    and divergence at s = 0.5 both hold; the demanded geometric decay of
///    the s = 1 increments does NOT — that sum is logarithmically divergent,
///    so this criterion fails by measurement and is expected to fail here.
#[test]
fn c09_bessel_trace_threshold() {
    let hand = bessel_partial_sum(1.0, half(1));
    let hand_dev = (hand - 25.0 / 9.0).abs();

    let cuts = [half(50), half(100), half(200), half(400)]; // lmax 25·2^i
    let ratios = |s: f64| -> Vec<f64> {
        let sums: Vec<f64> = cuts.iter().map(|&c| bessel_partial_sum(s, c)).collect();
        let inc: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
        inc.windows(2).map(|w| w[1] / w[0]).collect()
    };

    let divergent_ok = ratios(0.5).iter().all(|&r| r >= 1.5);
    let s1_ratios = ratios(1.0);
    let s1_max = s1_ratios.iter().cloned().fold(0.0f64, f64::max);
    let geometric_decay = s1_max <= 2.0 / 3.0;

    let pass = report(
        "09 bessel-trace-threshold",
        hand_dev <= 1e-12 && divergent_ok && geometric_decay,
        &format!(
            "hand value dev {hand_dev:.3e}; s=0.5 increments grow ({divergent_ok}); \
             s=1 increment ratios {s1_ratios:?} vs demanded ≤ 2/3"
        ),
    );
    assert!(
        pass,
        "the s = 1 trace sum does not decay geometrically: measured increment ratios \
         {s1_ratios:?} (each lmax doubling beyond 25 adds ≈ 6.8, a logarithmic divergence). \
         The extreme-weight rows m = ±l keep the shifted eigenvalue 1 + l(l+1) − m² at 1 + l, \
         so shell l contributes at least (2l+1)·2·(1+l)^{{−2}} ≈ 2/l and the sum converges \
         only for s > 1. The demanded ratio ≤ 2/3 would need the shells to thin out a full \
         power faster than they do. Hand value dev {hand_dev:.3e} and s = 0.5 divergence \
         ({divergent_ok}) both hold; only the geometric-decay sub-check fails."
    );
}

/// 10. The factorial-growth fit recovers a planted Gevrey order within ±0.05.
#[test]
fn c10_gevrey_order_fit_recovery() {
    let (a, s) = (1.5f64, 1.2f64);
    let norms: Vec<f64> = (0..=12)
        .map(|k| (2.0 * k as f64 * a.ln() + s * ln_factorial(2 * k)).exp())
        .collect();
    let fit = gevrey_order_fit(&norms).unwrap();
    let dev = (fit.s - s).abs();
    let pass = report(
        "10 gevrey-order-fit",
        dev <= 0.05,
        &format!("planted s = {s}, fitted {:.4} (A fitted {:.4})", fit.s, fit.a),
    );
    assert!(pass, "fitted order {} misses planted {s} by {dev:.3}", fit.s);
}

/// Informational companion to criterion 6: at a short horizon the case-2
/// envelope exponent comes out near its admissible ceiling. Not asserted —
/// recorded so the measured value is visible alongside the gate.
#[test]
fn case2_short_horizon_exponent_note() {
    let sp = speed(SpeedSpec::Cusp { c: 1.0, t0: 0.05, alpha: 0.5 }, 0.1);
    let betas = [16.0, 64.0, 256.0, 1024.0];
    let s = 1.9; // near the ceiling 1/(1−α) = 2 for α = 1/2
    let rep = verify_envelope(&sp, &betas, s, EnvelopeOptions::default()).unwrap();
    println!(
        "note: case-2 short-horizon sweep at s = {s}: fitted slope {:.4}, max residual {:.4}",
        rep.fitted_k,
        rep.max_residual()
    );
}
