//! Purification of noisy qubit measurements and its use in entanglement
//! distillation with imperfect local operations.
//!
//! A noisy computational-basis measurement `(1-p)|i><i| + p I/2` is purified by
//! copying the measured qubit onto `n-1` fresh ancillas with a collective CNOT,
//! measuring all `n` qubits and keeping the run only when every outcome agrees.
//! The crate provides:
//!
//! - [`qmat`]: dense complex matrices and density matrices (tensor products,
//!   partial traces, unitary conjugation, singlet fractions).
//! - [`noise`]: noisy POVMs, collective and depolarized CNOTs, and the
//!   purified-measurement coefficients `(r0, r1)` with and without gate noise.
//! - [`states`]: the ebit, isotropic states, twirling and Schmidt-form pure states.
//! - [`distill_mixed`]: the two-copy recurrence map for isotropic states with
//!   purified measurements, its success probability and distillability thresholds.
//! - [`distill_pure`]: single-copy local filtering of pure states through a
//!   controlled-W gate and a purified ancilla measurement.
//! - [`oracle`]: brute-force density-matrix simulation of the same circuits.
//! - [`verify`]: a seeded grid that checks every analytic quantity against the oracle.

pub mod distill_mixed;
pub mod distill_pure;
pub mod error;
pub mod noise;
pub mod oracle;
pub mod qmat;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
