//! Ebits, isotropic states, twirling and Schmidt-form pure states.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::error::{check_unit_interval, Error, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix, STATE_TOLERANCE};

/// Normalized state vector over a register of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let product: usize = dims.iter().product();
        if product != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: amplitudes.len(),
                found: product,
            });
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes, dims })
    }

    fn two_qubit_real(amps: [f64; 4]) -> Self {
        Self {
            amplitudes: amps.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            dims: vec![2, 2],
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: other.amplitudes.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(ComplexMatrix::outer(&self.amplitudes), self.dims.clone())
    }

    /// Schmidt coefficients of a bipartite pure state (descending).
    pub fn schmidt_coefficients(&self) -> Result<Vec<f64>> {
        if self.dims.len() != 2 {
            return Err(Error::InvalidArgument("Schmidt decomposition needs two subsystems".into()));
        }
        let rho_a = self.density().partial_trace(&[0])?;
        let mut coeffs: Vec<f64> = rho_a
            .matrix()
            .hermitian_eigenvalues()
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .collect();
        coeffs.reverse();
        Ok(coeffs)
    }
}

/// `(|00> + |11>) / sqrt(2)`.
pub fn bell_phi_plus() -> PureState {
    PureState::two_qubit_real([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])
}

/// `F |phi+><phi+| + (1 - F)/3 (I - |phi+><phi+|)`.
pub fn isotropic(f: f64) -> Result<DensityMatrix> {
    check_unit_interval("F", f)?;
    Ok(isotropic_unchecked(f))
}

fn isotropic_unchecked(f: f64) -> DensityMatrix {
    let phi = bell_phi_plus().density().into_matrix();
    let rest = &ComplexMatrix::identity(4) - &phi;
    let mat = &phi.scale(f) + &rest.scale((1.0 - f) / 3.0);
    DensityMatrix::from_trusted(mat, vec![2, 2])
}

/// Projection onto the isotropic family with the same singlet fraction.
pub fn twirl(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let f = rho.singlet_fraction()?;
    Ok(isotropic_unchecked(f.clamp(0.0, 1.0)))
}

/// `sin(theta)|00> + cos(theta)|11>` for `theta` in `(0, pi/4]`.
pub fn pure_theta(theta: f64) -> Result<PureState> {
    check_theta(theta)?;
    Ok(PureState::two_qubit_real([theta.sin(), 0.0, 0.0, theta.cos()]))
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= FRAC_PI_4 + 1e-15 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            domain: "(0, pi/4]",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use proptest::prelude::*;

    #[test]
    fn ebit_properties() {
        let phi = bell_phi_plus();
        assert!((phi.density().singlet_fraction().unwrap() - 1.0).abs() < 1e-15);
        let half = ComplexMatrix::identity(2).scale(0.5);
        for side in [0, 1] {
            let r = phi.density().partial_trace(&[side]).unwrap();
            assert!(r.matrix().max_abs_diff(&half) < 1e-15);
        }
        let overlap = phi.inner(&pure_theta(PI / 4.0).unwrap()).unwrap();
        assert!((overlap.re - 1.0).abs() < 1e-15 && overlap.im.abs() < 1e-15);
    }

    #[test]
    fn isotropic_examples() {
        let one = isotropic(1.0).unwrap();
        assert!(one.matrix().max_abs_diff(bell_phi_plus().density().matrix()) < 1e-15);
        let quarter = isotropic(0.25).unwrap();
        assert!(quarter.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);
        let ev = isotropic(0.7).unwrap().matrix().hermitian_eigenvalues();
        for (got, want) in ev.iter().zip([0.1, 0.1, 0.1, 0.7]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((isotropic(0.7).unwrap().singlet_fraction().unwrap() - 0.7).abs() < 1e-15);
        assert!(isotropic(1.1).is_err());
        assert!(isotropic(-0.1).is_err());
    }

    #[test]
    fn isotropic_is_a_valid_state() {
        for f in [0.0, 0.1, 0.25, 0.5, 0.9, 1.0] {
            let rho = isotropic(f).unwrap();
            DensityMatrix::new(rho.matrix().clone(), vec![2, 2]).unwrap();
        }
    }

    #[test]
    fn twirl_examples() {
        let iso = isotropic(0.63).unwrap();
        assert!(twirl(&iso).unwrap().matrix().max_abs_diff(iso.matrix()) < 1e-15);
        let phi = bell_phi_plus().density();
        assert!(twirl(&phi).unwrap().matrix().max_abs_diff(phi.matrix()) < 1e-15);

        let theta = PI / 16.0;
        let psi = pure_theta(theta).unwrap().density();
        let f = (theta.sin() + theta.cos()).powi(2) / 2.0;
        // Direct overlap computation.
        assert!((f - 0.691_341_716_182_545).abs() < 1e-12);
        let t = twirl(&psi).unwrap();
        assert!(t.matrix().max_abs_diff(isotropic(f).unwrap().matrix()) < 1e-14);
        assert!(twirl(&DensityMatrix::maximally_mixed(vec![2])).is_err());
    }

    #[test]
    fn pure_theta_examples() {
        let ebit = pure_theta(PI / 4.0).unwrap();
        for (a, b) in ebit.amplitudes().iter().zip(bell_phi_plus().amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        let f = pure_theta(PI / 16.0).unwrap().density().singlet_fraction().unwrap();
        assert!((f - 0.691_341_716_182_545).abs() < 1e-12);

        let theta = 0.3;
        let sc = pure_theta(theta).unwrap().schmidt_coefficients().unwrap();
        assert!((sc[0] - theta.cos()).abs() < 1e-12);
        assert!((sc[1] - theta.sin()).abs() < 1e-12);

        assert!(pure_theta(0.0).is_err());
        assert!(pure_theta(PI / 3.0).is_err());
    }

    #[test]
    fn pure_state_rejects_unnormalized_input() {
        let amps = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(PureState::new(amps, vec![2]).is_err());
    }

    fn random_two_qubit(parts: &[f64], mix: f64) -> DensityMatrix {
        let amps: Vec<Complex64> = parts.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.iter().map(|z| z / norm).collect();
        let pure = ComplexMatrix::outer(&amps);
        let mat = &pure.scale(1.0 - mix) + &ComplexMatrix::identity(4).scale(mix / 4.0);
        DensityMatrix::new(mat, vec![2, 2]).unwrap()
    }

    proptest! {
        #[test]
        fn twirl_is_idempotent_and_preserves_singlet_fraction(
            parts in prop::collection::vec(-1.0f64..1.0, 8),
            mix in 0.0f64..1.0,
        ) {
            prop_assume!(parts.iter().map(|x| x * x).sum::<f64>() > 1e-3);
            let rho = random_two_qubit(&parts, mix);
            let once = twirl(&rho).unwrap();
            let twice = twirl(&once).unwrap();
            prop_assert!(twice.matrix().max_abs_diff(once.matrix()) < 1e-12);
            let f0 = rho.singlet_fraction().unwrap();
            prop_assert!((once.singlet_fraction().unwrap() - f0).abs() < 1e-12);
        }
    }
}
