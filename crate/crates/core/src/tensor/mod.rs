//! Dense complex linear algebra over multipartite registers.
//!
//! A [`RegisterState`] is a pure vector or a density matrix together with a
//! [`RegisterShape`] listing the subsystem dimensions. Everything is stored
//! dense and row-major with subsystem 0 as the most significant digit of the
//! flat index; the intended scale is ambient dimension up to a few thousand.

mod eig;
mod json;
mod measure;
mod metrics;
pub(crate) mod ops;

pub use eig::{hermitian_eig, hermitian_fn, hermitian_power, matrix_sqrt};
pub use json::StateJson;
pub use measure::{computational_basis, projective_measure, MeasurementOutcome};
pub use metrics::{
    fidelity, overlap, purify, shannon_entropy, trace_distance, von_neumann_entropy,
};
pub use ops::{
    apply_unitary, kron, kron_unitary, partial_trace, permute_subsystems,
    permute_unitary_subsystems,
};

use crate::error::{Error, Result};
use crate::scalar::{c_zero, Cx, Real};
use nalgebra::{DMatrix, DVector};

/// Default numeric tolerance used by state validation.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigenvalue clip below which spectral weight is treated as zero.
///
/// Single source of truth for support decisions in every divergence.
pub const SUPPORT_CLIP: f64 = 1e-10;

/// Clip for negative eigenvalues when validating positive semidefiniteness.
pub const PSD_CLIP: f64 = 1e-12;

/// Ordered list of subsystem dimensions, optionally labelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterShape {
    dims: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl RegisterShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::ShapeMismatch(format!(
                "dims must be positive and non-empty, got {dims:?}"
            )));
        }
        Ok(Self { dims, labels: None })
    }

    pub fn with_labels(dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} subsystems",
                labels.len(),
                dims.len()
            )));
        }
        let mut shape = Self::new(dims)?;
        shape.labels = Some(labels);
        Ok(shape)
    }

    pub fn scalar() -> Self {
        Self { dims: vec![1], labels: None }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Product of all subsystem dimensions.
    pub fn ambient_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Concatenation of two shapes (labels dropped).
    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, labels: None }
    }

    /// Row-major strides: subsystem 0 is the most significant index digit.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dims.len());
        multi
            .iter()
            .zip(self.strides())
            .map(|(&i, s)| i * s)
            .sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut multi = vec![0usize; self.dims.len()];
        for (k, s) in strides.iter().enumerate() {
            multi[k] = flat / s;
            flat %= s;
        }
        multi
    }

    fn check_subsystems(&self, idx: &[usize]) -> Result<()> {
        for &k in idx {
            if k >= self.dims.len() {
                return Err(Error::ShapeMismatch(format!(
                    "subsystem index {k} out of range for {} subsystems",
                    self.dims.len()
                )));
            }
        }
        Ok(())
    }
}

/// Payload of a register state.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload<T: Real> {
    Pure(DVector<Cx<T>>),
    Density(DMatrix<Cx<T>>),
}

/// A multipartite quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState<T: Real> {
    shape: RegisterShape,
    payload: Payload<T>,
    tol: T,
}

impl<T: Real> RegisterState<T> {
    /// Pure state from an amplitude vector; validates the unit norm.
    pub fn pure(shape: RegisterShape, amplitudes: DVector<Cx<T>>) -> Result<Self> {
        Self::pure_with_tol(shape, amplitudes, T::of(DEFAULT_TOL))
    }

    pub fn pure_with_tol(shape: RegisterShape, amplitudes: DVector<Cx<T>>, tol: T) -> Result<Self> {
        if amplitudes.len() != shape.ambient_dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector length {} vs ambient dimension {}",
                amplitudes.len(),
                shape.ambient_dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > tol {
            return Err(Error::InvalidState(format!(
                "pure payload norm {} deviates from 1",
                norm.to_f64_lossy()
            )));
        }
        Ok(Self { shape, payload: Payload::Pure(amplitudes), tol })
    }

    /// Density state from a matrix; validates Hermiticity, positivity and trace.
    pub fn density(shape: RegisterShape, matrix: DMatrix<Cx<T>>) -> Result<Self> {
        Self::density_with_tol(shape, matrix, T::of(DEFAULT_TOL))
    }

    pub fn density_with_tol(shape: RegisterShape, matrix: DMatrix<Cx<T>>, tol: T) -> Result<Self> {
        let d = shape.ambient_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{} vs ambient dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        let herm_dev = (&matrix - matrix.adjoint()).norm();
        if herm_dev > tol * T::of_usize(d.max(1)) {
            return Err(Error::InvalidState(format!(
                "density payload is not Hermitian (deviation {})",
                herm_dev.to_f64_lossy()
            )));
        }
        let tr = trace_of(&matrix);
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!(
                "density payload trace {:?} deviates from 1",
                (tr.re.to_f64_lossy(), tr.im.to_f64_lossy())
            )));
        }
        let (eigs, _) = hermitian_eig(&matrix);
        if let Some(min) = eigs.last() {
            if *min < -T::of(PSD_CLIP).max(tol) {
                return Err(Error::InvalidState(format!(
                    "density payload has negative eigenvalue {}",
                    min.to_f64_lossy()
                )));
            }
        }
        Ok(Self { shape, payload: Payload::Density(matrix), tol })
    }

    /// Computational basis state |index> over the given shape.
    pub fn basis_state(shape: RegisterShape, index: usize) -> Result<Self> {
        let d = shape.ambient_dim();
        if index >= d {
            return Err(Error::ShapeMismatch(format!("basis index {index} out of range {d}")));
        }
        let mut v = DVector::from_element(d, c_zero::<T>());
        v[index] = Cx::new(T::one(), T::zero());
        Self::pure(shape, v)
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    pub fn is_pure_payload(&self) -> bool {
        matches!(self.payload, Payload::Pure(_))
    }

    pub fn payload(&self) -> &Payload<T> {
        &self.payload
    }

    pub fn pure_amplitudes(&self) -> Option<&DVector<Cx<T>>> {
        match &self.payload {
            Payload::Pure(v) => Some(v),
            Payload::Density(_) => None,
        }
    }

    /// Density-matrix view regardless of payload kind.
    pub fn density_matrix(&self) -> DMatrix<Cx<T>> {
        match &self.payload {
            Payload::Pure(v) => v * v.adjoint(),
            Payload::Density(m) => m.clone(),
        }
    }

    /// Replace the shape by a compatible one (same ambient dimension).
    pub fn reshaped(&self, shape: RegisterShape) -> Result<Self> {
        if shape.ambient_dim() != self.shape.ambient_dim() {
            return Err(Error::ShapeMismatch(format!(
                "reshape {} -> {} changes ambient dimension",
                self.shape.ambient_dim(),
                shape.ambient_dim()
            )));
        }
        let mut out = self.clone();
        out.shape = shape;
        Ok(out)
    }
}

/// A unitary operator over a multipartite register.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator<T: Real> {
    shape: RegisterShape,
    matrix: DMatrix<Cx<T>>,
}

impl<T: Real> UnitaryOperator<T> {
    pub fn new(shape: RegisterShape, matrix: DMatrix<Cx<T>>) -> Result<Self> {
        Self::with_tol(shape, matrix, T::of(DEFAULT_TOL))
    }

    pub fn with_tol(shape: RegisterShape, matrix: DMatrix<Cx<T>>, tol: T) -> Result<Self> {
        let d = shape.ambient_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{} vs ambient dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        let dev = (matrix.adjoint() * &matrix - DMatrix::identity(d, d)).norm();
        if dev > tol * T::of_usize(d.max(1)) {
            return Err(Error::NonUnitary(format!(
                "U^dag U deviates from identity by {}",
                dev.to_f64_lossy()
            )));
        }
        Ok(Self { shape, matrix })
    }

    pub fn identity(shape: RegisterShape) -> Self {
        let d = shape.ambient_dim();
        Self { shape, matrix: DMatrix::identity(d, d) }
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<Cx<T>> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { shape: self.shape.clone(), matrix: self.matrix.adjoint() }
    }
}

pub(crate) fn trace_of<T: Real>(m: &DMatrix<Cx<T>>) -> Cx<T> {
    let mut tr = c_zero::<T>();
    for i in 0..m.nrows().min(m.ncols()) {
        tr += m[(i, i)];
    }
    tr
}

/// Hermitize as (M + M^dag)/2; numerical hygiene before any spectral call.
pub(crate) fn hermitize<T: Real>(m: &DMatrix<Cx<T>>) -> DMatrix<Cx<T>> {
    let half = Cx::new(T::of(0.5), T::zero());
    (m + m.adjoint()).map(|z| z * half)
}
