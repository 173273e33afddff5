//! Dense complex linear algebra for small multi-qubit registers.
//!
//! Basis states are indexed with the leftmost subsystem as the most significant
//! digit, so for qubits `|x1 x2 ... xn>` has index `x1 * 2^(n-1) + ... + xn`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when validating Hermiticity, trace and positivity.
pub const STATE_TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be at least 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a real matrix from its rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_vec(dim, data)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        m
    }

    /// `|psi><psi|` for an arbitrary (not necessarily normalized) vector.
    pub fn outer(ket: &[Complex64]) -> Self {
        let dim = ket.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = ket[i] * ket[j].conj();
            }
        }
        m
    }

    /// `|k><k|` in dimension `dim`.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.set(k, k, ONE);
        m
    }

    pub fn pauli_x() -> Self {
        let mut m = Self::zeros(2);
        m.set(0, 1, ONE);
        m.set(1, 0, ONE);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Matrix-vector product.
    pub fn apply(&self, ket: &[Complex64]) -> Result<Vec<Complex64>> {
        if ket.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: ket.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(ket)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_dim(rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_same_dim(rhs)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    fn check_same_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim == rhs.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            })
        }
    }

    /// Largest entrywise modulus of `self - other`; infinite on a dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Max entry deviation of `U U^dagger` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let prod = &(self * &self.adjoint());
        prod.max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal_norm(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        // Symmetrize first so rounding noise cannot leak into the spectrum.
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Kronecker product; `self` supplies the most significant index.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let (na, nb) = (self.dim, rhs.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        for ia in 0..na {
            for ja in 0..na {
                let a = self.data[ia * na + ja];
                if a == ZERO {
                    continue;
                }
                for ib in 0..nb {
                    for jb in 0..nb {
                        out.data[(ia * nb + ib) * n + ja * nb + jb] = a * rhs.data[ib * nb + jb];
                    }
                }
            }
        }
        out
    }

    /// Permutation matrix `P|i> = |perm(i)>`; `perm` must be a bijection on `0..dim`.
    pub fn permutation(dim: usize, perm: impl Fn(usize) -> usize) -> Self {
        let mut out = Self::zeros(dim);
        for j in 0..dim {
            out.data[perm(j) * dim + j] = ONE;
        }
        out
    }

    /// `P A P^dagger` for the basis permutation `P|i> = |perm(i)>`.
    ///
    /// `perm` must be a bijection on `0..dim`.
    pub fn permute_basis(&self, perm: impl Fn(usize) -> usize) -> Self {
        let n = self.dim;
        let map: Vec<usize> = (0..n).map(perm).collect();
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[map[i] * n + map[j]] = self.data[i * n + j];
            }
        }
        out
    }

    /// Partial trace over every subsystem not listed in `keep`.
    ///
    /// `dims` gives the subsystem dimensions; kept subsystems appear in their
    /// original order regardless of the order of `keep`.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let split = Split::new(dims, &keep, self.dim)?;
        let (dk, dt) = (split.dim_selected, split.dim_rest);
        let mut out = Self::zeros(dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = ZERO;
                for t in 0..dt {
                    acc += self.get(split.compose(a, t), split.compose(b, t));
                }
                out.data[a * dk + b] = acc;
            }
        }
        Ok(out)
    }

    /// `tr_T(self) (x) sigma`, with `sigma` placed on the subsystems `targets`
    /// (in the listed order) and the remaining factors left in place.
    pub fn replace_subsystems(&self, dims: &[usize], targets: &[usize], sigma: &Self) -> Result<Self> {
        let split = Split::new(dims, targets, self.dim)?;
        if sigma.dim != split.dim_selected {
            return Err(Error::DimensionMismatch {
                expected: split.dim_selected,
                found: sigma.dim,
            });
        }
        let (ds, dr) = (split.dim_selected, split.dim_rest);
        // Reduced operator on the complement.
        let mut rest = vec![ZERO; dr * dr];
        for a in 0..dr {
            for b in 0..dr {
                rest[a * dr + b] = (0..ds)
                    .map(|s| self.get(split.compose(s, a), split.compose(s, b)))
                    .sum();
            }
        }
        let mut out = Self::zeros(self.dim);
        for sa in 0..ds {
            for sb in 0..ds {
                let w = sigma.get(sa, sb);
                if w == ZERO {
                    continue;
                }
                for a in 0..dr {
                    for b in 0..dr {
                        let i = split.compose(sa, a);
                        let j = split.compose(sb, b);
                        out.data[i * self.dim + j] = w * rest[a * dr + b];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Embeds `op` acting on `targets` (first listed = most significant factor of
    /// `op`) into the full register, identity elsewhere.
    pub fn embed(op: &Self, dims: &[usize], targets: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        let split = Split::new(dims, targets, total)?;
        if op.dim != split.dim_selected {
            return Err(Error::DimensionMismatch {
                expected: split.dim_selected,
                found: op.dim,
            });
        }
        let mut out = Self::zeros(total);
        for sa in 0..split.dim_selected {
            for sb in 0..split.dim_selected {
                let w = op.get(sa, sb);
                if w == ZERO {
                    continue;
                }
                for r in 0..split.dim_rest {
                    out.set(split.compose(sa, r), split.compose(sb, r), w);
                }
            }
        }
        Ok(out)
    }
}

/// Kronecker product of two matrices (`a` is the most significant factor).
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

/// Kronecker product of a sequence of factors, left to right.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| acc.tensor(f))
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a dimension mismatch; use [`ComplexMatrix::try_mul`] otherwise.
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b).expect("matrix dimensions must agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b).expect("matrix dimensions must agree")
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

/// Index bookkeeping for splitting a register into selected subsystems and the rest.
struct Split {
    dim_selected: usize,
    dim_rest: usize,
    // full index for (selected, rest), row-major in `selected`
    table: Vec<usize>,
}

impl Split {
    fn new(dims: &[usize], selected: &[usize], total: usize) -> Result<Self> {
        let count = dims.len();
        let product: usize = dims.iter().product();
        if product != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: product,
            });
        }
        if selected.is_empty() {
            return Err(Error::InvalidArgument("subsystem selection must be nonempty".into()));
        }
        let mut seen = vec![false; count];
        for &s in selected {
            if s >= count {
                return Err(Error::InvalidSubsystem { index: s, count });
            }
            if seen[s] {
                return Err(Error::InvalidArgument(format!("subsystem {s} listed twice")));
            }
            seen[s] = true;
        }
        let rest: Vec<usize> = (0..count).filter(|i| !seen[*i]).collect();

        let mut strides = vec![1usize; count];
        for k in (0..count.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let offsets = |subsystems: &[usize]| -> Vec<usize> {
            let size: usize = subsystems.iter().map(|&s| dims[s]).product();
            (0..size)
                .map(|mut idx| {
                    let mut off = 0;
                    for &s in subsystems.iter().rev() {
                        off += (idx % dims[s]) * strides[s];
                        idx /= dims[s];
                    }
                    off
                })
                .collect()
        };
        let sel_off = offsets(selected);
        let rest_off = offsets(&rest);
        let mut table = Vec::with_capacity(sel_off.len() * rest_off.len());
        for &s in &sel_off {
            for &r in &rest_off {
                table.push(s + r);
            }
        }
        Ok(Self {
            dim_selected: sel_off.len(),
            dim_rest: rest_off.len(),
            table,
        })
    }

    #[inline]
    fn compose(&self, selected: usize, rest: usize) -> usize {
        self.table[selected * self.dim_rest + rest]
    }
}

/// Hermitian, positive-semidefinite, unit-trace matrix over a register of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at [`STATE_TOLERANCE`].
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let product: usize = dims.iter().product();
        if dims.is_empty() || product != mat.dim() {
            return Err(Error::DimensionMismatch {
                expected: mat.dim(),
                found: product,
            });
        }
        let herm = mat.hermiticity_error();
        if herm > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_ev = mat.hermitian_eigenvalues()[0];
        if min_ev < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:e}")));
        }
        Ok(Self { mat, dims })
    }

    /// Qubit register of `mat.dim() = 2^k`.
    pub fn from_qubits(mat: ComplexMatrix) -> Result<Self> {
        let dim = mat.dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} is not a qubit register"
            )));
        }
        let k = dim.trailing_zeros() as usize;
        Self::new(mat, vec![2; k])
    }

    /// For results of trace- and positivity-preserving maps on valid states.
    pub(crate) fn from_trusted(mat: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.dim());
        Self { mat, dims }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let dim: usize = dims.iter().product();
        Self::from_trusted(ComplexMatrix::identity(dim).scale(1.0 / dim as f64), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn tensor(&self, rhs: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        Self::from_trusted(self.mat.tensor(&rhs.mat), dims)
    }

    /// Reduced state on `keep`, in the original subsystem order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let reduced = self.mat.partial_trace(&self.dims, keep)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(Self::from_trusted(reduced, dims))
    }

    /// `u rho u^dagger`; `u` must be unitary to [`STATE_TOLERANCE`].
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let err = u.unitarity_error();
        if err > STATE_TOLERANCE {
            return Err(Error::NotUnitary(err));
        }
        let out = &(u * &self.mat) * &u.adjoint();
        Ok(Self::from_trusted(out, self.dims.clone()))
    }

    /// `tr[rho e]` (real part), with tiny negative rounding clamped to zero.
    pub fn expectation(&self, e: &ComplexMatrix) -> Result<f64> {
        if e.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: e.dim(),
            });
        }
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.mat.get(i, k) * e.get(k, i);
            }
        }
        let v = acc.re;
        Ok(if v < 0.0 && v > -1e-12 { 0.0 } else { v })
    }

    /// Overlap `<phi+|rho|phi+>` with the ebit; requires a two-qubit state.
    pub fn singlet_fraction(&self) -> Result<f64> {
        if self.dims != [2, 2] {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: self.dim(),
            });
        }
        Ok(singlet_overlap(&self.mat))
    }
}

/// `<phi+|m|phi+>` for any 4x4 matrix, without normalization.
pub(crate) fn singlet_overlap(m: &ComplexMatrix) -> f64 {
    0.5 * (m.get(0, 0) + m.get(0, 3) + m.get(3, 0) + m.get(3, 3)).re
}
