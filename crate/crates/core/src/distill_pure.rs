//! Single-copy local filtering of `sin(theta)|00> + cos(theta)|11>`.
//!
//! Bob couples his qubit to an ancilla `E` with a controlled-W gate and reads
//! `E` out. Outcome 0 applies `K0 = |0><0| + tan(theta)|1><1|`, which maps the
//! input onto the ebit. With a noisy ancilla measurement the rank-one branch
//! `K1` leaks into the accepted state; purifying the ancilla measurement
//! suppresses that leak.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::distill_mixed::DistillResult;
use crate::error::{check_unit_interval_open, Error, Result};
use crate::noise::{asymptotic_ratio, PurifiedCoeffs};
use crate::qmat::ComplexMatrix;
use crate::states::{bell_phi_plus, check_theta, pure_theta};

/// Kraus pair, rotation and controlled rotation for a given Schmidt angle.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterOps {
    pub k0: ComplexMatrix,
    pub k1: ComplexMatrix,
    pub w: ComplexMatrix,
    /// `|0><0| (x) I + |1><1| (x) W` on Bob's qubit and the ancilla.
    pub u: ComplexMatrix,
    pub theta: f64,
}

fn tan_and_leak(theta: f64) -> (f64, f64) {
    if (theta - FRAC_PI_4).abs() < 1e-12 {
        return (1.0, 0.0);
    }
    let t = theta.tan().min(1.0);
    (t, (1.0 - t * t).max(0.0).sqrt())
}

pub fn filter_ops(theta: f64) -> Result<FilterOps> {
    check_theta(theta)?;
    let (t, leak) = tan_and_leak(theta);
    let k0 = ComplexMatrix::from_real_diagonal(&[1.0, t]);
    let k1 = ComplexMatrix::from_real_diagonal(&[0.0, leak]);
    let w = ComplexMatrix::from_real_rows(&[&[t, -leak], &[leak, t]])?;
    let p0 = ComplexMatrix::basis_projector(2, 0);
    let p1 = ComplexMatrix::basis_projector(2, 1);
    let u = &p0.tensor(&ComplexMatrix::identity(2)) + &p1.tensor(&w);
    Ok(FilterOps { k0, k1, w, u, theta })
}

/// Weights of the accepted branches: `2 sin^2(theta)` for the ebit and
/// `1 - 2 sin^2(theta) = cos(2 theta)` for `|11>`.
fn branch_weights(theta: f64) -> (f64, f64) {
    let good = 2.0 * theta.sin().powi(2);
    (good, (1.0 - good).max(0.0))
}

/// Accepted unnormalized state `r0 2 sin^2(theta) |phi+><phi+| + r1 cos(2 theta) |11><11|`.
pub fn pure_post_state_unnormalized(theta: f64, coeffs: &PurifiedCoeffs) -> Result<ComplexMatrix> {
    check_theta(theta)?;
    let (good, bad) = branch_weights(theta);
    let phi = bell_phi_plus().density().into_matrix();
    let eleven = ComplexMatrix::basis_projector(4, 3);
    Ok(&phi.scale(coeffs.r0 * good) + &eleven.scale(coeffs.r1 * bad))
}

/// Singlet fraction after filtering with a purified ancilla measurement,
/// accepting only when every outcome of the gadget is 0.
pub fn pure_filter_fidelity(theta: f64, coeffs: &PurifiedCoeffs) -> Result<DistillResult> {
    let input = pure_theta(theta)?;
    let (good, bad) = branch_weights(theta);
    let p_succ = coeffs.r0 * good + coeffs.r1 * bad;
    if p_succ <= 0.0 {
        return Err(Error::DegeneratePostSelection);
    }
    let overlap = coeffs.r0 * good + 0.5 * coeffs.r1 * bad;
    Ok(DistillResult {
        fidelity_out: overlap / p_succ,
        p_succ,
        fidelity_in: input.density().singlet_fraction()?,
        weights: None,
    })
}

fn check_epsilon_positive(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            domain: "(0, 1)",
        })
    }
}

/// `lim_n F_n` with depolarized gadget CNOTs, through the fixed-point ratio `s`.
pub fn pure_filter_fidelity_limit(theta: f64, p: f64, epsilon: f64) -> Result<f64> {
    check_theta(theta)?;
    let s = asymptotic_ratio(p, epsilon)?;
    let (good, bad) = branch_weights(theta);
    Ok((good + 0.5 * s * bad) / (good + s * bad))
}

/// The same limit written directly in `cos(2 theta)`.
pub fn pure_filter_fidelity_limit_cos2(theta: f64, p: f64, epsilon: f64) -> Result<f64> {
    check_theta(theta)?;
    check_unit_interval_open("p", p)?;
    check_epsilon_positive(epsilon)?;
    let e = epsilon;
    let root = (e * e * (5.0 + 4.0 * (p - 2.0) * p) + 4.0 * (1.0 - p).powi(2) * (1.0 - 2.0 * e)).sqrt();
    let c = (2.0 * theta).cos();
    let num = 2.0 * e + (-2.0 + 2.0 * p - 2.0 * e * p + root) * c;
    let den = 2.0 * e + 2.0 * (-2.0 + e + 2.0 * p - 2.0 * e * p + root) * c;
    Ok(num / den)
}

/// Two-qubit state `(I (x) K) |psi>` as an unnormalized vector.
pub fn apply_bob(kraus: &ComplexMatrix, amplitudes: &[Complex64]) -> Result<Vec<Complex64>> {
    ComplexMatrix::identity(2).tensor(kraus).apply(amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{purified_coeffs, purified_coeffs_gate_noisy};
    use std::f64::consts::PI;

    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn kraus_completeness_error(ops: &FilterOps) -> f64 {
        let sum = &(&ops.k0.adjoint() * &ops.k0) + &(&ops.k1.adjoint() * &ops.k1);
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    #[test]
    fn ebit_needs_no_filtering() {
        let ops = filter_ops(PI / 4.0).unwrap();
        assert!(ops.k0.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert_eq!(ops.k1, ComplexMatrix::zeros(2));
        let r = pure_filter_fidelity(PI / 4.0, &purified_coeffs(&[0.3], 1).unwrap()).unwrap();
        close(r.fidelity_out, 1.0, 1e-12);
    }

    #[test]
    fn k0_maps_input_onto_ebit() {
        let theta = PI / 16.0;
        let ops = filter_ops(theta).unwrap();
        let psi = pure_theta(theta).unwrap();
        let out = apply_bob(&ops.k0, psi.amplitudes()).unwrap();
        let scale = 2f64.sqrt() * theta.sin();
        for (a, b) in out.iter().zip(bell_phi_plus().amplitudes()) {
            assert!((a - b * scale).norm() < 1e-15);
        }
        // Outcome-0 probability 2 sin^2(theta).
        let prob: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        close(prob, 2.0 * theta.sin().powi(2), 1e-15);
    }

    #[test]
    fn w_first_column() {
        let theta = PI / 8.0;
        let ops = filter_ops(theta).unwrap();
        let col = ops.w.apply(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        close(col[0].re, theta.tan(), 1e-15);
        close(col[1].re, (1.0 - theta.tan().powi(2)).sqrt(), 1e-15);
    }

    #[test]
    fn controlled_w_realizes_kraus_operators() {
        for theta in [0.05, PI / 16.0, 0.5, PI / 4.0] {
            let ops = filter_ops(theta).unwrap();
            assert!(ops.u.is_unitary(1e-10));
            assert!(ops.w.is_unitary(1e-10));
            // <m|_E U |0>_E with E the second factor.
            for m in 0..2 {
                let k = if m == 0 { &ops.k0 } else { &ops.k1 };
                for b_out in 0..2 {
                    for b_in in 0..2 {
                        let entry = ops.u.get(2 * b_out + m, 2 * b_in);
                        assert!((entry - k.get(b_out, b_in)).norm() < 1e-10);
                    }
                }
            }
        }
        assert!(filter_ops(0.0).is_err());
        assert!(filter_ops(1.0).is_err());
    }

    #[test]
    fn tabulated_single_shot_fidelity() {
        let theta = PI / 16.0;
        let r = pure_filter_fidelity(theta, &purified_coeffs(&[0.1], 1).unwrap()).unwrap();
        close(r.fidelity_out, 0.805, 5e-4);
        let r = pure_filter_fidelity(theta, &purified_coeffs(&[0.1; 3], 3).unwrap()).unwrap();
        close(r.fidelity_out, 0.999, 5e-4);
        close(r.fidelity_in, (1.0 + (PI / 8.0).sin()) / 2.0, 1e-14);
    }

    #[test]
    fn noiseless_filter_is_perfect() {
        let theta = 0.3;
        let r = pure_filter_fidelity(theta, &PurifiedCoeffs::noiseless()).unwrap();
        close(r.fidelity_out, 1.0, 1e-15);
        close(r.p_succ, 2.0 * theta.sin().powi(2), 1e-15);
    }

    #[test]
    fn post_state_is_consistent_with_fidelity() {
        let coeffs = purified_coeffs_gate_noisy(0.15, 0.05, 3).unwrap();
        let state = pure_post_state_unnormalized(0.2, &coeffs).unwrap();
        let r = pure_filter_fidelity(0.2, &coeffs).unwrap();
        close(state.trace().re, r.p_succ, 1e-14);
        close(crate::distill_mixed::normalized_singlet_fraction(&state).unwrap(), r.fidelity_out, 1e-14);
    }

    #[test]
    fn limit_examples() {
        let theta = PI / 16.0;
        let limit = pure_filter_fidelity_limit(theta, 0.1, 0.05).unwrap();
        // Frozen from an independent evaluation of both closed forms.
        close(limit, 0.924_662_837_649_2, 1e-12);
        let n12 = pure_filter_fidelity(theta, &purified_coeffs_gate_noisy(0.1, 0.05, 12).unwrap()).unwrap();
        assert!((n12.fidelity_out - limit).abs() < 1e-4);
        close(pure_filter_fidelity_limit(PI / 4.0, 0.1, 0.05).unwrap(), 1.0, 1e-12);
        close(pure_filter_fidelity_limit(PI / 4.0 - 1e-9, 0.1, 0.05).unwrap(), 1.0, 1e-7);
        assert!(pure_filter_fidelity_limit(theta, 0.1, 0.0).is_err());
    }

    #[test]
    fn both_limit_forms_agree() {
        for theta in [0.05, 0.1, PI / 16.0, 0.4, 0.7] {
            for p in [0.02, 0.1, 0.2, 0.3] {
                for eps in [0.01, 0.05, 0.1, 0.3] {
                    let a = pure_filter_fidelity_limit(theta, p, eps).unwrap();
                    let b = pure_filter_fidelity_limit_cos2(theta, p, eps).unwrap();
                    close(a, b, 1e-10);
                }
            }
        }
    }

    #[test]
    fn fidelity_is_monotone_in_depth() {
        for p in [0.05, 0.1, 0.3, 0.7] {
            for theta in [0.05, PI / 16.0, 0.6] {
                let mut last = 0.0;
                for n in 1..=12 {
                    let f = pure_filter_fidelity(theta, &purified_coeffs(&vec![p; n], n).unwrap())
                        .unwrap()
                        .fidelity_out;
                    assert!(f >= last, "p={p} theta={theta} n={n}");
                    last = f;
                }
                let far = purified_coeffs(&vec![p; 80], 80).unwrap();
                assert!(1.0 - pure_filter_fidelity(theta, &far).unwrap().fidelity_out < 1e-6);
            }
        }
    }

    proptest! {
        #[test]
        fn kraus_completeness(theta in 1e-6f64..std::f64::consts::FRAC_PI_4) {
            let ops = filter_ops(theta).unwrap();
            prop_assert!(kraus_completeness_error(&ops) < 1e-10);
            prop_assert!(ops.u.is_unitary(1e-10));
        }
    }
}
