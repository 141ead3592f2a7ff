//! Projective measurement on a subsystem subset.

use super::{Payload, RegisterState};
use crate::error::{Error, Result};
use crate::scalar::{c_zero, Cx, Real};
use nalgebra::{DMatrix, DVector};

/// One outcome of a projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome<T: Real> {
    /// Index of the basis vector that fired.
    pub outcome: usize,
    pub probability: T,
    /// Normalized post-measurement state, absent for zero-probability outcomes.
    pub post_state: Option<RegisterState<T>>,
}

/// Measure `target` subsystems in the given orthonormal basis.
///
/// The basis must be complete on the target factor. Probabilities sum to one
/// and each post-state is renormalized.
pub fn projective_measure<T: Real>(
    s: &RegisterState<T>,
    basis: &[DVector<Cx<T>>],
    target: &[usize],
) -> Result<Vec<MeasurementOutcome<T>>> {
    let dims = s.shape().dims();
    for &t in target {
        if t >= dims.len() {
            return Err(Error::ShapeMismatch(format!("target {t} out of range")));
        }
    }
    let target_dim: usize = target.iter().map(|&t| dims[t]).product();
    if basis.len() != target_dim {
        return Err(Error::InvalidBasis(format!(
            "{} basis vectors for target dimension {}",
            basis.len(),
            target_dim
        )));
    }
    for (i, b) in basis.iter().enumerate() {
        if b.len() != target_dim {
            return Err(Error::InvalidBasis(format!("basis vector {i} has wrong length")));
        }
        if (b.norm() - T::one()).abs() > s.tol() * T::of(10.0) {
            return Err(Error::InvalidBasis(format!("basis vector {i} is not normalized")));
        }
        for (j, b2) in basis.iter().enumerate().take(i) {
            let ip: Cx<T> = b.iter().zip(b2.iter()).map(|(x, y)| x.conj() * *y).sum();
            if T::cx_abs(ip) > s.tol() * T::of(10.0) {
                return Err(Error::InvalidBasis(format!("basis vectors {j},{i} not orthogonal")));
            }
        }
    }

    let full_strides = s.shape().strides();
    let target_strides: Vec<usize> = target.iter().map(|&t| full_strides[t]).collect();
    let target_dims: Vec<usize> = target.iter().map(|&t| dims[t]).collect();
    let mut target_offsets = vec![0usize; target_dim];
    for (j, slot) in target_offsets.iter_mut().enumerate() {
        let mut rem = j;
        let mut off = 0usize;
        for (k, &td) in target_dims.iter().enumerate().rev() {
            off += (rem % td) * target_strides[k];
            rem /= td;
        }
        *slot = off;
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !target.contains(k)).collect();
    let rest_dim: usize = rest.iter().map(|&k| dims[k]).product::<usize>().max(1);
    let mut rest_offsets = vec![0usize; rest_dim];
    for (t, slot) in rest_offsets.iter_mut().enumerate() {
        let mut rem = t;
        let mut off = 0usize;
        for &k in rest.iter().rev() {
            off += (rem % dims[k]) * full_strides[k];
            rem /= dims[k];
        }
        *slot = off;
    }

    let clip = T::of(1e-14);
    let mut outcomes = Vec::with_capacity(target_dim);
    match s.payload() {
        Payload::Pure(v) => {
            for (outcome, b) in basis.iter().enumerate() {
                // project: component of v along b on the target factor
                let mut proj = DVector::from_element(v.len(), c_zero::<T>());
                let mut prob = T::zero();
                for &base in &rest_offsets {
                    let mut amp = c_zero::<T>();
                    for (j, &off) in target_offsets.iter().enumerate() {
                        amp += b[j].conj() * v[base + off];
                    }
                    prob += amp.norm_sqr();
                    for (j, &off) in target_offsets.iter().enumerate() {
                        proj[base + off] = b[j] * amp;
                    }
                }
                let post_state = if prob > clip {
                    let scale = Cx::new(prob.sqrt(), T::zero());
                    let normd = proj.map(|z| z / scale);
                    Some(RegisterState::pure_with_tol(s.shape().clone(), normd, s.tol())?)
                } else {
                    None
                };
                outcomes.push(MeasurementOutcome { outcome, probability: prob, post_state });
            }
        }
        Payload::Density(m) => {
            let d = m.nrows();
            for (outcome, b) in basis.iter().enumerate() {
                // P rho P with P = |b><b| on the target factor
                let mut post = DMatrix::from_element(d, d, c_zero::<T>());
                let mut prob = T::zero();
                for &base_r in &rest_offsets {
                    for &base_c in &rest_offsets {
                        // amp = <b|_r rho |b>_c block contraction
                        let mut amp = c_zero::<T>();
                        for (jr, &offr) in target_offsets.iter().enumerate() {
                            for (jc, &offc) in target_offsets.iter().enumerate() {
                                amp += b[jr].conj() * m[(base_r + offr, base_c + offc)] * b[jc];
                            }
                        }
                        if base_r == base_c {
                            prob += amp.re;
                        }
                        for (jr, &offr) in target_offsets.iter().enumerate() {
                            for (jc, &offc) in target_offsets.iter().enumerate() {
                                post[(base_r + offr, base_c + offc)] +=
                                    b[jr] * amp * b[jc].conj();
                            }
                        }
                    }
                }
                let post_state = if prob > clip {
                    let scale = Cx::new(prob, T::zero());
                    let normd = post.map(|z| z / scale);
                    Some(RegisterState::density_with_tol(s.shape().clone(), normd, s.tol())?)
                } else {
                    None
                };
                outcomes.push(MeasurementOutcome { outcome, probability: prob, post_state });
            }
        }
    }
    Ok(outcomes)
}

/// Computational basis of the given dimension.
pub fn computational_basis<T: Real>(dim: usize) -> Vec<DVector<Cx<T>>> {
    (0..dim)
        .map(|i| {
            let mut v = DVector::from_element(dim, c_zero::<T>());
            v[i] = Cx::new(T::one(), T::zero());
            v
        })
        .collect()
}
