//! Noisy measurements, collective CNOTs and purified-measurement coefficients.
//!
//! A purified measurement with `n - 1` ancillas, accepted only on unanimous
//! outcomes, acts on the measured qubit as the unnormalized POVM element
//! `r0 M_i + r1 M_{i+1}`. The pair `(r0, r1)` is all the downstream distillation
//! maps need.

use crate::error::{check_unit_interval_open, Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix};

/// Per-measurement noise fractions and the CNOT depolarizing fraction.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    pub p_list_a: Vec<f64>,
    pub p_list_b: Option<Vec<f64>>,
    pub epsilon: f64,
}

impl NoiseSpec {
    pub fn homogeneous(p: f64, n: usize, epsilon: f64) -> Self {
        Self {
            p_list_a: vec![p; n],
            p_list_b: None,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_interval_open("epsilon", self.epsilon)?;
        let lists = std::iter::once(&self.p_list_a).chain(self.p_list_b.as_ref());
        for list in lists {
            if list.is_empty() {
                return Err(Error::InvalidArgument("noise list must be nonempty".into()));
            }
            for &p in list {
                check_unit_interval_open("p", p)?;
            }
        }
        Ok(())
    }
}

/// Coefficients of the unnormalized purified POVM element `r0 M_i + r1 M_{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PurifiedCoeffs {
    pub r0: f64,
    pub r1: f64,
    pub n: usize,
    pub spec: NoiseSpec,
}

impl PurifiedCoeffs {
    /// A perfect projective measurement, `(r0, r1) = (1, 0)`.
    pub fn noiseless() -> Self {
        Self {
            r0: 1.0,
            r1: 0.0,
            n: 1,
            spec: NoiseSpec::homogeneous(0.0, 1, 0.0),
        }
    }

    /// Probability `p(0^n) + p(1^n)` that the outcomes agree.
    ///
    /// Independent of the measured state since `Q0 + Q1 = (r0 + r1) I`.
    pub fn acceptance(&self) -> f64 {
        self.r0 + self.r1
    }

    /// `tr[Q_i M_i] = r0 / (r0 + r1)`.
    pub fn fidelity(&self) -> f64 {
        self.r0 / (self.r0 + self.r1)
    }

    pub fn ratio(&self) -> f64 {
        self.r1 / self.r0
    }
}

fn check_bit(outcome: u8) -> Result<usize> {
    match outcome {
        0 | 1 => Ok(outcome as usize),
        _ => Err(Error::InvalidArgument(format!("outcome {outcome} is not a bit"))),
    }
}

/// `(1 - p)|i><i| + p I / 2`.
pub fn noisy_povm_element(outcome: u8, p: f64) -> Result<ComplexMatrix> {
    let i = check_bit(outcome)?;
    check_unit_interval_open("p", p)?;
    let mut diag = [p / 2.0; 2];
    diag[i] = 1.0 - p / 2.0;
    Ok(ComplexMatrix::from_real_diagonal(&diag))
}

fn check_positive(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

/// `V_n = |0><0| (x) I^(n-1) + |1><1| (x) X^(n-1)`; the control is qubit 0.
pub fn collective_cnot(n: usize) -> Result<ComplexMatrix> {
    check_positive("n", n)?;
    let dim = 1usize << n;
    let low = (dim >> 1) - 1;
    let high = dim >> 1;
    Ok(ComplexMatrix::permutation(dim, |x| if x & high != 0 { x ^ low } else { x }))
}

fn bit_mask(num_qubits: usize, qubit: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

fn check_pair(num_qubits: usize, control: usize, target: usize) -> Result<()> {
    for q in [control, target] {
        if q >= num_qubits {
            return Err(Error::InvalidSubsystem {
                index: q,
                count: num_qubits,
            });
        }
    }
    if control == target {
        return Err(Error::InvalidArgument(format!(
            "control and target coincide (qubit {control})"
        )));
    }
    Ok(())
}

/// CNOT between two qubits of an `num_qubits` register, as a full matrix.
pub fn cnot_on(num_qubits: usize, control: usize, target: usize) -> Result<ComplexMatrix> {
    check_pair(num_qubits, control, target)?;
    Ok(ComplexMatrix::permutation(1 << num_qubits, cnot_map(num_qubits, control, target)))
}

fn cnot_map(num_qubits: usize, control: usize, target: usize) -> impl Fn(usize) -> usize {
    let c = bit_mask(num_qubits, control);
    let t = bit_mask(num_qubits, target);
    move |x| if x & c != 0 { x ^ t } else { x }
}

fn qubit_count(op: &ComplexMatrix) -> Result<usize> {
    let dim = op.dim();
    if dim < 4 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a register of at least two qubits"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn depolarize_pair(
    op: &ComplexMatrix,
    control: usize,
    target: usize,
    epsilon: f64,
    replacement: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let k = qubit_count(op)?;
    check_pair(k, control, target)?;
    check_unit_interval_open("epsilon", epsilon)?;
    // CNOT is a self-inverse permutation, so V A V^dagger and V^dagger A V coincide.
    let rotated = op.permute_basis(cnot_map(k, control, target));
    if epsilon == 0.0 {
        return Ok(rotated);
    }
    let dims = vec![2; k];
    let mixed = op.replace_subsystems(&dims, &[control, target], replacement)?;
    Ok(&rotated.scale(1.0 - epsilon) + &mixed.scale(epsilon))
}

/// Depolarized CNOT on an operator in the Schrodinger picture:
/// `(1 - eps) V X V^dagger + eps tr_ct(X) (x) I/4`.
pub fn depolarized_cnot_channel(
    op: &ComplexMatrix,
    control: usize,
    target: usize,
    epsilon: f64,
) -> Result<ComplexMatrix> {
    let quarter = ComplexMatrix::identity(4).scale(0.25);
    depolarize_pair(op, control, target, epsilon, &quarter)
}

/// Adjoint of [`depolarized_cnot_channel`], for contracting with POVM elements:
/// `(1 - eps) V^dagger A V + (eps / 4) tr_ct(A) (x) I`.
pub fn depolarized_cnot_adjoint(
    op: &ComplexMatrix,
    control: usize,
    target: usize,
    epsilon: f64,
) -> Result<ComplexMatrix> {
    let identity = ComplexMatrix::identity(4);
    let k = qubit_count(op)?;
    check_pair(k, control, target)?;
    check_unit_interval_open("epsilon", epsilon)?;
    let rotated = op.permute_basis(cnot_map(k, control, target));
    let traced = op.replace_subsystems(&vec![2; k], &[control, target], &identity)?;
    Ok(&rotated.scale(1.0 - epsilon) + &traced.scale(epsilon / 4.0))
}

/// Applies a depolarized CNOT to a qubit register.
pub fn depolarized_cnot_apply(
    rho: &DensityMatrix,
    control: usize,
    target: usize,
    epsilon: f64,
) -> Result<DensityMatrix> {
    if rho.dims().iter().any(|&d| d != 2) {
        return Err(Error::InvalidArgument("depolarized CNOT needs a qubit register".into()));
    }
    let out = depolarized_cnot_channel(rho.matrix(), control, target, epsilon)?;
    Ok(DensityMatrix::from_trusted(out, rho.dims().to_vec()))
}

/// Noiseless purification coefficients `r0 = prod(1 - p_i/2)`, `r1 = prod(p_i/2)`.
pub fn purified_coeffs(p_list: &[f64], n: usize) -> Result<PurifiedCoeffs> {
    if p_list.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: p_list.len(),
        });
    }
    let spec = NoiseSpec {
        p_list_a: p_list.to_vec(),
        p_list_b: None,
        epsilon: 0.0,
    };
    spec.validate()?;
    let r0 = p_list.iter().map(|p| 1.0 - p / 2.0).product();
    let r1 = p_list.iter().map(|p| p / 2.0).product();
    Ok(PurifiedCoeffs { r0, r1, n, spec })
}

/// Purification coefficients with depolarized gadget CNOTs and a homogeneous noise fraction.
pub fn purified_coeffs_gate_noisy(p: f64, epsilon: f64, n: usize) -> Result<PurifiedCoeffs> {
    check_positive("n", n)?;
    purified_coeffs_gate_noisy_list(&vec![p; n], epsilon)
}

/// Gate-noisy recurrence with per-measurement noise fractions.
///
/// Qubit 0 is measured with `p_list[0]`; ancilla `j` is targeted by the `j`-th
/// CNOT and read with `p_list[j]`. The ancillas are folded in from last to
/// first, which is the order the readout is pulled back through the gates.
pub fn purified_coeffs_gate_noisy_list(p_list: &[f64], epsilon: f64) -> Result<PurifiedCoeffs> {
    let spec = NoiseSpec {
        p_list_a: p_list.to_vec(),
        p_list_b: None,
        epsilon,
    };
    spec.validate()?;
    let (first, rest) = p_list.split_first().expect("validated nonempty");
    let mut r0 = 1.0 - first / 2.0;
    let mut r1 = first / 2.0;
    for p in rest.iter().rev() {
        let mixed = epsilon / 4.0 * (r0 + r1);
        (r0, r1) = (
            (1.0 - epsilon) * r0 * (1.0 - p / 2.0) + mixed,
            (1.0 - epsilon) * r1 * (p / 2.0) + mixed,
        );
    }
    Ok(PurifiedCoeffs {
        r0,
        r1,
        n: p_list.len(),
        spec,
    })
}

/// Limit `s = lim r1/r0` of the gate-noisy recurrence.
///
/// `s` is the positive root of `(eps/4) s^2 + (1-eps)(1-p) s - eps/4 = 0`.
/// `epsilon = 0` is rejected; there the ratio tends to zero.
pub fn asymptotic_ratio(p: f64, epsilon: f64) -> Result<f64> {
    check_unit_interval_open("p", p)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            domain: "(0, 1)",
        });
    }
    let q = 1.0 - p;
    let radicand = 5.0 - 4.0 * p * (2.0 - p) + 4.0 * q * q / epsilon * (1.0 / epsilon - 2.0);
    Ok(2.0 * q * (1.0 - 1.0 / epsilon) + radicand.sqrt())
}

/// Unnormalized purified element `r0 M_i + r1 M_{i+1}`.
pub fn unnormalized_povm_element(outcome: u8, coeffs: &PurifiedCoeffs) -> Result<ComplexMatrix> {
    let i = check_bit(outcome)?;
    let mut diag = [coeffs.r1; 2];
    diag[i] = coeffs.r0;
    Ok(ComplexMatrix::from_real_diagonal(&diag))
}

/// Normalized purified element `Q_i = (r0 M_i + r1 M_{i+1}) / (r0 + r1)`.
pub fn purified_povm_element(outcome: u8, coeffs: &PurifiedCoeffs) -> Result<ComplexMatrix> {
    let total = coeffs.acceptance();
    if total <= 0.0 {
        return Err(Error::DegeneratePostSelection);
    }
    Ok(unnormalized_povm_element(outcome, coeffs)?.scale(1.0 / total))
}
