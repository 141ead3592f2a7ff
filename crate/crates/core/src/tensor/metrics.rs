//! Distances, entropies and purification.

use super::{hermitian_eig, matrix_sqrt, RegisterShape, RegisterState, SUPPORT_CLIP};
use crate::error::{Error, Result};
use crate::scalar::{c_zero, Cx, Real};
use crate::tensor::ops::partial_trace;
use nalgebra::{DMatrix, DVector};

fn check_same_shape<T: Real>(a: &RegisterState<T>, b: &RegisterState<T>) -> Result<()> {
    if a.shape().dims() != b.shape().dims() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            a.shape().dims(),
            b.shape().dims()
        )));
    }
    Ok(())
}

/// Trace distance `(1/2) || a - b ||_1`.
///
/// The difference of two states is Hermitian, so the trace norm is the sum of
/// absolute eigenvalues.
pub fn trace_distance<T: Real>(a: &RegisterState<T>, b: &RegisterState<T>) -> Result<T> {
    check_same_shape(a, b)?;
    let diff = a.density_matrix() - b.density_matrix();
    Ok(trace_norm_hermitian(&diff) * T::of(0.5))
}

pub(crate) fn trace_norm_hermitian<T: Real>(m: &DMatrix<Cx<T>>) -> T {
    let (w, _) = hermitian_eig(m);
    w.into_iter().map(|x| x.abs()).sum()
}

/// Uhlmann fidelity `|| sqrt(a) sqrt(b) ||_1^2 = (Tr sqrt(sqrt(a) b sqrt(a)))^2`.
pub fn fidelity<T: Real>(a: &RegisterState<T>, b: &RegisterState<T>) -> Result<T> {
    check_same_shape(a, b)?;
    let ra = matrix_sqrt(&a.density_matrix());
    let inner = &ra * b.density_matrix() * &ra;
    let (w, _) = hermitian_eig(&inner);
    let root_sum: T = w
        .into_iter()
        .map(|x| if x > T::zero() { x.sqrt() } else { T::zero() })
        .sum();
    Ok(root_sum * root_sum)
}

/// Shannon entropy in bits of a probability vector; `0 log 0 := 0`.
pub fn shannon_entropy<T: Real>(probs: &[T]) -> T {
    let clip = T::of(SUPPORT_CLIP);
    probs
        .iter()
        .filter(|&&p| p > clip)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Von Neumann entropy in bits of the (optionally reduced) state.
pub fn von_neumann_entropy<T: Real>(
    s: &RegisterState<T>,
    subsystems: Option<&[usize]>,
) -> Result<T> {
    let rho = match subsystems {
        Some(keep) => partial_trace(s, keep)?.density_matrix(),
        None => s.density_matrix(),
    };
    let (w, _) = hermitian_eig(&rho);
    Ok(shannon_entropy(&w))
}

/// Purify a density state to a pure state over (system, E).
///
/// E is appended as one extra subsystem of dimension `rank(rho)`, and tracing
/// E recovers the input.
pub fn purify<T: Real>(rho: &RegisterState<T>) -> Result<RegisterState<T>> {
    let m = rho.density_matrix();
    let (w, v) = hermitian_eig(&m);
    let clip = T::of(SUPPORT_CLIP);
    let rank = w.iter().filter(|&&x| x > clip).count().max(1);
    let d = m.nrows();
    let mut amps = DVector::from_element(d * rank, c_zero::<T>());
    for (e, &we) in w.iter().take(rank).enumerate() {
        if we <= clip {
            continue;
        }
        let scale = Cx::new(we.sqrt(), T::zero());
        for i in 0..d {
            // system index i, environment index e; E is the last subsystem
            amps[i * rank + e] = v[(i, e)] * scale;
        }
    }
    let mut dims = rho.shape().dims().to_vec();
    dims.push(rank);
    let shape = RegisterShape::new(dims)?;
    // normalize away clip-level truncation
    let norm = amps.norm();
    if norm <= T::zero() {
        return Err(Error::InvalidState("cannot purify a zero state".into()));
    }
    let amps = amps.map(|z| z / Cx::new(norm, T::zero()));
    RegisterState::pure_with_tol(shape, amps, rho.tol())
}

/// Convenience: squared overlap `<psi| rho |psi>` of a pure state with a state.
pub fn overlap<T: Real>(psi: &RegisterState<T>, rho: &RegisterState<T>) -> Result<T> {
    check_same_shape(psi, rho)?;
    let v = psi
        .pure_amplitudes()
        .ok_or_else(|| Error::KindMismatch("overlap needs a pure first argument".into()))?;
    let m = rho.density_matrix();
    let mv = &m * v;
    let mut acc = c_zero::<T>();
    for i in 0..v.len() {
        acc += v[i].conj() * mv[i];
    }
    Ok(acc.re)
}
