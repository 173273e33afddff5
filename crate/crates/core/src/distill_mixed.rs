//! One round of two-copy recurrence distillation for isotropic states when
//! both parties read out the target pair with purified noisy measurements.
//!
//! Alice and Bob apply bilateral CNOTs to `rho_F (x) rho_F`, measure the second
//! pair and keep the first pair when their (purified) outcomes agree. With
//! purified measurements the acceptance operator on the measured pair is
//! `r_even Pi_0 + r_odd Pi_1`, where `Pi_0` and `Pi_1` project onto the even and
//! odd parity subspaces.

use crate::error::{check_unit_interval, check_unit_interval_open, Error, Result};
use crate::noise::{purified_coeffs, purified_coeffs_gate_noisy, PurifiedCoeffs};
use crate::qmat::{singlet_overlap, ComplexMatrix};
use crate::states::bell_phi_plus;

/// Probabilities that the two purified measurements report equal (`r_even`)
/// or opposite (`r_odd`) effective outcomes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParityWeights {
    pub r_even: f64,
    pub r_odd: f64,
    pub n: usize,
    pub m: usize,
}

impl ParityWeights {
    /// Perfect measurements on both sides.
    pub fn noiseless() -> Self {
        Self {
            r_even: 1.0,
            r_odd: 0.0,
            n: 1,
            m: 1,
        }
    }

    /// Combines one purified measurement per party.
    pub fn from_coeffs(alice: &PurifiedCoeffs, bob: &PurifiedCoeffs) -> Self {
        Self {
            r_even: alice.r0 * bob.r0 + alice.r1 * bob.r1,
            r_odd: alice.r0 * bob.r1 + alice.r1 * bob.r0,
            n: alice.n,
            m: bob.n,
        }
    }
}

/// Output of a single distillation or filtering round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistillResult {
    pub fidelity_out: f64,
    pub p_succ: f64,
    pub fidelity_in: f64,
    /// Parity weights for the mixed-state protocol; `None` for pure-state filtering.
    pub weights: Option<ParityWeights>,
}

/// Parity weights for noiseless gadget CNOTs and per-measurement noise fractions.
pub fn parity_weights(p_a: &[f64], p_b: &[f64]) -> Result<ParityWeights> {
    if p_a.is_empty() || p_b.is_empty() {
        return Err(Error::InvalidArgument("noise lists must be nonempty".into()));
    }
    let alice = purified_coeffs(p_a, p_a.len())?;
    let bob = purified_coeffs(p_b, p_b.len())?;
    Ok(ParityWeights::from_coeffs(&alice, &bob))
}

/// Parity weights when every gadget CNOT is depolarized with fraction `epsilon`.
pub fn parity_weights_gate_noisy(p: f64, epsilon: f64, n: usize, m: usize) -> Result<ParityWeights> {
    let alice = purified_coeffs_gate_noisy(p, epsilon, n)?;
    let bob = purified_coeffs_gate_noisy(p, epsilon, m)?;
    Ok(ParityWeights::from_coeffs(&alice, &bob))
}

fn check_weights(weights: &ParityWeights) -> Result<()> {
    if !(weights.r_even > 0.0 && weights.r_odd >= 0.0) {
        return Err(Error::DegeneratePostSelection);
    }
    Ok(())
}

/// Singlet fraction and success probability after one round.
///
/// With `q = (1 - F)/3` and `g = (F q + q^2) r_odd / r_even`:
/// `F' = (F^2 + q^2 + g) / (F^2 + 2 F q + 5 q^2 + 4 g)` and
/// `p_succ = r_even (F^2 + 2 F q + 5 q^2 + 4 g)`.
pub fn distill_map(f: f64, weights: &ParityWeights) -> Result<DistillResult> {
    check_unit_interval("F", f)?;
    check_weights(weights)?;
    let q = (1.0 - f) / 3.0;
    let g = (f * q + q * q) * weights.r_odd / weights.r_even;
    let numerator = f * f + q * q + g;
    let denominator = f * f + 2.0 * f * q + 5.0 * q * q + 4.0 * g;
    Ok(DistillResult {
        fidelity_out: numerator / denominator,
        p_succ: weights.r_even * denominator,
        fidelity_in: f,
        weights: Some(*weights),
    })
}

/// Repeats [`distill_map`] on its own output, one entry per round.
pub fn iterate_distill_map(f: f64, weights: &ParityWeights, rounds: usize) -> Result<Vec<DistillResult>> {
    let mut out = Vec::with_capacity(rounds);
    let mut current = f;
    for _ in 0..rounds {
        let r = distill_map(current, weights)?;
        current = r.fidelity_out.clamp(0.0, 1.0);
        out.push(r);
    }
    Ok(out)
}

/// `p_succ rho'` on the kept pair, as the combination of `|phi+><phi+|`,
/// `Pi_0 = |00><00| + |11><11|` and `Pi_1 = |01><01| + |10><10|`.
pub fn post_state_unnormalized(f: f64, weights: &ParityWeights) -> Result<ComplexMatrix> {
    check_unit_interval("F", f)?;
    let (re, ro) = (weights.r_even, weights.r_odd);
    let q = (1.0 - f) / 3.0;
    let phi = bell_phi_plus().density().into_matrix();
    let pi0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 1.0]);
    let pi1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 1.0, 0.0]);

    let coeff_phi = f * f * re - f * q * re - q * f * re + q * q * re;
    let coeff_pi0 = f * q * (re + ro) + q * f * re + q * q * ro;
    let coeff_pi1 = q * f * ro + q * q * (2.0 * re + ro);
    let out = &(&phi.scale(coeff_phi) + &pi0.scale(coeff_pi0)) + &pi1.scale(coeff_pi1);
    Ok(out)
}

/// Normalized singlet fraction of an unnormalized two-qubit operator.
pub fn normalized_singlet_fraction(unnormalized: &ComplexMatrix) -> Result<f64> {
    if unnormalized.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: unnormalized.dim(),
        });
    }
    let tr = unnormalized.trace().re;
    if tr <= 0.0 {
        return Err(Error::DegeneratePostSelection);
    }
    Ok(singlet_overlap(unnormalized) / tr)
}

/// Threshold `L = (r_even + r_odd) / (2 (r_even - r_odd))` above which one
/// round strictly increases the singlet fraction.
pub fn lower_bound(weights: &ParityWeights) -> Result<f64> {
    let (re, ro) = (weights.r_even, weights.r_odd);
    if re <= ro {
        return Err(Error::NoDistillableWindow { r_even: re, r_odd: ro });
    }
    Ok((re + ro) / (2.0 * (re - ro)))
}

/// Closed-form `lim_n L` for `n = m` purified measurements with depolarized
/// gadget CNOTs. `epsilon = 0` is rejected; the limit there is exactly 1/2.
pub fn lower_bound_limit(p: f64, epsilon: f64) -> Result<f64> {
    check_unit_interval_open("p", p)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            domain: "(0, 1)",
        });
    }
    let q = 1.0 - p;
    let e = epsilon;
    let root = (4.0 * q * q * (1.0 - 2.0 * e) + e * e * (5.0 + 4.0 * (p - 2.0) * p)).sqrt();
    let num = 2.0 * q * q * (1.0 - 2.0 * e) + e * e * (3.0 - 2.0 * (2.0 - p) * p) + e * root;
    Ok(num / (4.0 * (1.0 - e).powi(2) * q * q))
}
