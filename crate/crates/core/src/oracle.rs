//! Brute-force density-matrix simulation of the purification gadget and of
//! both distillation protocols.
//!
//! Nothing here uses the closed forms; every quantity comes from explicit
//! registers, channels and measurement operators. The protocol simulations
//! first reduce each gadget to an effective single-qubit POVM and then run
//! the small protocol register. [`direct_mixed_full_register`] and
//! [`direct_pure_full_register`] skip the reduction and simulate every qubit.

use crate::distill_mixed::{normalized_singlet_fraction, DistillResult, ParityWeights};
use crate::distill_pure::filter_ops;
use crate::error::{Error, Result};
use crate::noise::{cnot_on, depolarized_cnot_adjoint, depolarized_cnot_channel, noisy_povm_element};
use crate::qmat::{singlet_overlap, tensor_all, ComplexMatrix};
use crate::states::{isotropic, pure_theta};

/// Largest gadget (measured qubit plus ancillas) the oracle will build.
pub const MAX_GADGET_QUBITS: usize = 6;
/// Largest register for the unreduced simulations.
pub const MAX_DIRECT_QUBITS: usize = 8;
/// Longest per-party noise list accepted by the mixed-protocol oracle.
pub const MAX_PROTOCOL_LIST: usize = 4;

/// Unnormalized POVM elements the gadget induces on its measured qubit,
/// conditioned on unanimous outcomes `0^n` and `1^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectivePovm {
    pub q0: ComplexMatrix,
    pub q1: ComplexMatrix,
    /// Diagonal of `q0`, i.e. the unnormalized `(r0, r1)`.
    pub yield_prob_basis: (f64, f64),
}

impl EffectivePovm {
    fn new(q0: ComplexMatrix, q1: ComplexMatrix) -> Self {
        let yield_prob_basis = (q0.get(0, 0).re, q0.get(1, 1).re);
        Self {
            q0,
            q1,
            yield_prob_basis,
        }
    }

    pub fn element(&self, outcome: u8) -> &ComplexMatrix {
        if outcome == 0 {
            &self.q0
        } else {
            &self.q1
        }
    }

    pub fn max_off_diagonal(&self) -> f64 {
        self.q0.off_diagonal_norm().max(self.q1.off_diagonal_norm())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.q0.max_abs_diff(&other.q0).max(self.q1.max_abs_diff(&other.q1))
    }
}

fn check_gadget(p_list: &[f64], n: usize) -> Result<()> {
    if p_list.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: p_list.len(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("gadget needs at least one qubit".into()));
    }
    if n > MAX_GADGET_QUBITS {
        return Err(Error::RegisterTooLarge {
            qubits: n,
            limit: MAX_GADGET_QUBITS,
        });
    }
    Ok(())
}

fn unanimous_outcome_operator(p_list: &[f64], outcome: u8) -> Result<ComplexMatrix> {
    let factors = p_list
        .iter()
        .map(|&p| noisy_povm_element(outcome, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(tensor_all(&factors))
}

/// Effective POVM of an `n`-qubit gadget, built in the Heisenberg picture.
///
/// Qubit 0 is measured, qubits `1..n` are ancillas prepared in `|0>`. The
/// CNOTs `0 -> j` run in ascending `j`, each depolarized with `epsilon`, and
/// qubit `i` is read out with noise fraction `p_list[i]`.
pub fn oracle_effective_povm(p_list: &[f64], epsilon: f64, n: usize) -> Result<EffectivePovm> {
    check_gadget(p_list, n)?;
    let stride = 1usize << (n - 1);
    let mut elements = Vec::with_capacity(2);
    for outcome in 0..2u8 {
        let mut op = unanimous_outcome_operator(p_list, outcome)?;
        // Last gate first when pulling the observable back.
        for j in (1..n).rev() {
            op = depolarized_cnot_adjoint(&op, 0, j, epsilon)?;
        }
        // <0...0|_anc op |0...0>_anc
        let mut q = ComplexMatrix::zeros(2);
        for a in 0..2 {
            for b in 0..2 {
                q.set(a, b, op.get(a * stride, b * stride));
            }
        }
        elements.push(q);
    }
    let q1 = elements.pop().expect("two outcomes");
    let q0 = elements.pop().expect("two outcomes");
    Ok(EffectivePovm::new(q0, q1))
}

/// The same effective POVM, obtained by pushing operator-basis inputs
/// `|a><b| (x) |0...0><0...0|` forward through the channels.
pub fn oracle_effective_povm_schrodinger(p_list: &[f64], epsilon: f64, n: usize) -> Result<EffectivePovm> {
    check_gadget(p_list, n)?;
    let ancillas = ComplexMatrix::basis_projector(1 << (n - 1), 0);
    let measurements = [
        unanimous_outcome_operator(p_list, 0)?,
        unanimous_outcome_operator(p_list, 1)?,
    ];
    let mut q = [ComplexMatrix::zeros(2), ComplexMatrix::zeros(2)];
    for a in 0..2 {
        for b in 0..2 {
            let mut unit = ComplexMatrix::zeros(2);
            unit.set(a, b, num_complex::Complex64::new(1.0, 0.0));
            let mut op = unit.tensor(&ancillas);
            for j in 1..n {
                op = depolarized_cnot_channel(&op, 0, j, epsilon)?;
            }
            // tr[rho Q] = sum_ab rho_ab Q_ba
            for (qx, m) in q.iter_mut().zip(&measurements) {
                qx.set(b, a, (&op * m).trace());
            }
        }
    }
    let [q0, q1] = q;
    Ok(EffectivePovm::new(q0, q1))
}

fn check_protocol_list(name: &str, list: &[f64]) -> Result<()> {
    if list.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} must be nonempty")));
    }
    if list.len() > MAX_PROTOCOL_LIST {
        return Err(Error::RegisterTooLarge {
            qubits: list.len(),
            limit: MAX_PROTOCOL_LIST,
        });
    }
    Ok(())
}

/// `tr_rest[rho E]` keeping `keep`, for a diagonal measurement operator `E`.
fn contract_diagonal(rho: &ComplexMatrix, diag: &[f64], num_qubits: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    let dim = rho.dim();
    let mut scaled = rho.clone();
    for i in 0..dim {
        for (j, &d) in diag.iter().enumerate() {
            scaled.set(i, j, rho.get(i, j) * d);
        }
    }
    scaled.partial_trace(&vec![2; num_qubits], keep)
}

/// `p_succ rho'` on `A1 B1` from the simulated two-copy round.
///
/// Register order is `A1 B1 A2 B2`. Bilateral CNOTs `A1 -> A2` and `B1 -> B2`
/// are ideal; `A2` and `B2` are contracted with the gadget POVMs, summed over
/// equal outcomes.
pub fn oracle_mixed_post_state(f: f64, p_a: &[f64], p_b: &[f64], epsilon: f64) -> Result<ComplexMatrix> {
    check_protocol_list("p_a", p_a)?;
    check_protocol_list("p_b", p_b)?;
    let alice = oracle_effective_povm(p_a, epsilon, p_a.len())?;
    let bob = oracle_effective_povm(p_b, epsilon, p_b.len())?;
    mixed_post_state_with(f, &alice, &bob)
}

fn bilateral_cnot_input(f: f64) -> Result<ComplexMatrix> {
    let pair = isotropic(f)?;
    let rho = pair.tensor(&pair).into_matrix();
    let bcnot = &cnot_on(4, 1, 3)? * &cnot_on(4, 0, 2)?;
    Ok(&(&bcnot * &rho) * &bcnot.adjoint())
}

fn mixed_post_state_with(f: f64, alice: &EffectivePovm, bob: &EffectivePovm) -> Result<ComplexMatrix> {
    let rho = bilateral_cnot_input(f)?;
    let accept = &alice.q0.tensor(&bob.q0) + &alice.q1.tensor(&bob.q1);
    let full = ComplexMatrix::embed(&accept, &[2, 2, 2, 2], &[2, 3])?;
    (&rho * &full).partial_trace(&[2, 2, 2, 2], &[0, 1])
}

fn result_from_post_state(post: &ComplexMatrix, fidelity_in: f64, weights: Option<ParityWeights>) -> Result<DistillResult> {
    Ok(DistillResult {
        fidelity_out: normalized_singlet_fraction(post)?,
        p_succ: post.trace().re,
        fidelity_in,
        weights,
    })
}

/// Simulated mixed-state round; the weights are read off the effective POVMs.
pub fn oracle_distill_mixed(f: f64, p_a: &[f64], p_b: &[f64], epsilon: f64) -> Result<DistillResult> {
    check_protocol_list("p_a", p_a)?;
    check_protocol_list("p_b", p_b)?;
    let alice = oracle_effective_povm(p_a, epsilon, p_a.len())?;
    let bob = oracle_effective_povm(p_b, epsilon, p_b.len())?;
    let post = mixed_post_state_with(f, &alice, &bob)?;
    let (a0, a1) = alice.yield_prob_basis;
    let (b0, b1) = bob.yield_prob_basis;
    let weights = ParityWeights {
        r_even: a0 * b0 + a1 * b1,
        r_odd: a0 * b1 + a1 * b0,
        n: p_a.len(),
        m: p_b.len(),
    };
    result_from_post_state(&post, f, Some(weights))
}

/// `p_succ rho_n` on `A B` from the simulated filtering circuit with the
/// ancilla `E` read out through a gadget with noise fractions `p_list`.
pub fn oracle_pure_post_state(theta: f64, p_list: &[f64], epsilon: f64) -> Result<ComplexMatrix> {
    let gadget = oracle_effective_povm(p_list, epsilon, p_list.len())?;
    let rho = filtered_input(theta)?;
    let full = ComplexMatrix::embed(&gadget.q0, &[2, 2, 2], &[2])?;
    (&rho * &full).partial_trace(&[2, 2, 2], &[0, 1])
}

/// `U^(BE) (|psi><psi| (x) |0><0|_E) U^(BE) dagger` on `A B E`.
fn filtered_input(theta: f64) -> Result<ComplexMatrix> {
    let psi = pure_theta(theta)?.density().into_matrix();
    let rho = psi.tensor(&ComplexMatrix::basis_projector(2, 0));
    let ops = filter_ops(theta)?;
    let u = ComplexMatrix::embed(&ops.u, &[2, 2, 2], &[1, 2])?;
    Ok(&(&u * &rho) * &u.adjoint())
}

/// Simulated pure-state filtering with a homogeneous `n`-qubit gadget.
pub fn oracle_distill_pure(theta: f64, p: f64, epsilon: f64, n: usize) -> Result<DistillResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let post = oracle_pure_post_state(theta, &vec![p; n], epsilon)?;
    let fidelity_in = pure_theta(theta)?.density().singlet_fraction()?;
    result_from_post_state(&post, fidelity_in, None)
}

/// Purification gadget placed on an explicit register.
struct Gadget<'a> {
    measured: usize,
    ancillas: Vec<usize>,
    p_list: &'a [f64],
}

impl Gadget<'_> {
    fn readout_qubits(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        std::iter::once(self.measured)
            .chain(self.ancillas.iter().copied())
            .zip(self.p_list.iter().copied())
    }
}

/// Runs the gadgets in the Schrodinger picture on a register whose ancillas are
/// already in `|0>`, then contracts every read-out qubit with the accepted
/// outcome operators. `accepted` lists one unanimous bit per gadget.
fn run_gadgets(
    mut rho: ComplexMatrix,
    num_qubits: usize,
    gadgets: &[Gadget<'_>],
    epsilon: f64,
    accepted: &[Vec<u8>],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    for g in gadgets {
        for &a in &g.ancillas {
            rho = depolarized_cnot_channel(&rho, g.measured, a, epsilon)?;
        }
    }
    let dim = 1usize << num_qubits;
    let mut diag = vec![0.0; dim];
    for bits in accepted {
        let mut factor = vec![1.0; dim];
        for (g, &x) in gadgets.iter().zip(bits) {
            for (q, p) in g.readout_qubits() {
                let m = noisy_povm_element(x, p)?;
                let shift = num_qubits - 1 - q;
                for (idx, w) in factor.iter_mut().enumerate() {
                    let b = (idx >> shift) & 1;
                    *w *= m.get(b, b).re;
                }
            }
        }
        for (d, w) in diag.iter_mut().zip(factor) {
            *d += w;
        }
    }
    contract_diagonal(&rho, &diag, num_qubits, keep)
}

fn direct_size_guard(qubits: usize) -> Result<()> {
    if qubits > MAX_DIRECT_QUBITS {
        Err(Error::RegisterTooLarge {
            qubits,
            limit: MAX_DIRECT_QUBITS,
        })
    } else {
        Ok(())
    }
}

/// Mixed-state round with every gadget ancilla simulated explicitly.
///
/// Register order: `A1 B1 A2 B2`, then Alice's ancillas, then Bob's.
pub fn direct_mixed_full_register(f: f64, p_a: &[f64], p_b: &[f64], epsilon: f64) -> Result<ComplexMatrix> {
    check_protocol_list("p_a", p_a)?;
    check_protocol_list("p_b", p_b)?;
    let (n, m) = (p_a.len(), p_b.len());
    let total = 4 + (n - 1) + (m - 1);
    direct_size_guard(total)?;
    let ancillas = ComplexMatrix::basis_projector(1 << (total - 4), 0);
    let rho = bilateral_cnot_input(f)?.tensor(&ancillas);
    let gadgets = [
        Gadget {
            measured: 2,
            ancillas: (4..4 + n - 1).collect(),
            p_list: p_a,
        },
        Gadget {
            measured: 3,
            ancillas: (4 + n - 1..total).collect(),
            p_list: p_b,
        },
    ];
    run_gadgets(rho, total, &gadgets, epsilon, &[vec![0, 0], vec![1, 1]], &[0, 1])
}

/// Pure-state filtering with the gadget ancillas simulated explicitly.
///
/// Register order: `A B E`, then the gadget ancillas.
pub fn direct_pure_full_register(theta: f64, p_list: &[f64], epsilon: f64) -> Result<ComplexMatrix> {
    if p_list.is_empty() {
        return Err(Error::InvalidArgument("p_list must be nonempty".into()));
    }
    let total = 3 + p_list.len() - 1;
    direct_size_guard(total)?;
    let ancillas = ComplexMatrix::basis_projector(1 << (total - 3), 0);
    let rho = filtered_input(theta)?.tensor(&ancillas);
    let gadget = Gadget {
        measured: 2,
        ancillas: (3..total).collect(),
        p_list,
    };
    run_gadgets(rho, total, &[gadget], epsilon, &[vec![0]], &[0, 1])
}

/// Singlet overlap and trace of an unnormalized two-qubit post-selected state.
pub fn fidelity_and_yield(post: &ComplexMatrix) -> Result<(f64, f64)> {
    let tr = post.trace().re;
    if tr <= 0.0 {
        return Err(Error::DegeneratePostSelection);
    }
    Ok((singlet_overlap(post) / tr, tr))
}
