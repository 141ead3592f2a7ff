//! Register-level operations: tensor products, subsystem permutations,
//! partial traces and unitary application on subsystem subsets.

use super::{Payload, RegisterShape, RegisterState, UnitaryOperator};
use crate::error::{Error, Result};
use crate::scalar::{c_zero, Cx, Real};
use nalgebra::{DMatrix, DVector};

/// Tensor product of two states. The result shape is the concatenation.
pub fn kron<T: Real>(a: &RegisterState<T>, b: &RegisterState<T>) -> RegisterState<T> {
    let shape = a.shape().concat(b.shape());
    let tol = a.tol().max(b.tol());
    match (a.payload(), b.payload()) {
        (Payload::Pure(va), Payload::Pure(vb)) => {
            let v = va.kronecker(vb);
            RegisterState { shape, payload: Payload::Pure(v), tol }
        }
        _ => {
            let m = a.density_matrix().kronecker(&b.density_matrix());
            RegisterState { shape, payload: Payload::Density(m), tol }
        }
    }
}

/// Tensor product of two unitaries.
pub fn kron_unitary<T: Real>(a: &UnitaryOperator<T>, b: &UnitaryOperator<T>) -> UnitaryOperator<T> {
    let shape = a.shape().concat(b.shape());
    UnitaryOperator { shape, matrix: a.matrix().kronecker(b.matrix()) }
}

fn permuted_shape(shape: &RegisterShape, perm: &[usize]) -> Result<RegisterShape> {
    let n = shape.num_subsystems();
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "permutation length {} vs {} subsystems",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
        }
        seen[p] = true;
    }
    let dims = perm.iter().map(|&p| shape.dims()[p]).collect();
    let labels = shape
        .labels()
        .map(|ls| perm.iter().map(|&p| ls[p].clone()).collect::<Vec<_>>());
    match labels {
        Some(ls) => RegisterShape::with_labels(dims, ls),
        None => RegisterShape::new(dims),
    }
}

/// Flat-index map realizing a subsystem permutation.
///
/// `perm[k]` names the original subsystem that lands at position `k` of the
/// output, so `perm = [2, 0, 1]` sends |abc> to |cab>.
fn permutation_index_map(shape: &RegisterShape, perm: &[usize]) -> (RegisterShape, Vec<usize>) {
    let out_shape = permuted_shape(shape, perm).expect("validated permutation");
    let d = shape.ambient_dim();
    let out_strides = out_shape.strides();
    let mut map = vec![0usize; d];
    for (flat, slot) in map.iter_mut().enumerate() {
        let multi = shape.multi_index(flat);
        let mut out = 0usize;
        for (k, &p) in perm.iter().enumerate() {
            out += multi[p] * out_strides[k];
        }
        *slot = out;
    }
    (out_shape, map)
}

/// Relocate subsystems: output position `k` holds original subsystem `perm[k]`.
pub fn permute_subsystems<T: Real>(
    s: &RegisterState<T>,
    perm: &[usize],
) -> Result<RegisterState<T>> {
    permuted_shape(s.shape(), perm)?;
    let (out_shape, map) = permutation_index_map(s.shape(), perm);
    let payload = match s.payload() {
        Payload::Pure(v) => {
            let mut out = DVector::from_element(v.len(), c_zero::<T>());
            for (i, &j) in map.iter().enumerate() {
                out[j] = v[i];
            }
            Payload::Pure(out)
        }
        Payload::Density(m) => {
            let d = m.nrows();
            let mut out = DMatrix::from_element(d, d, c_zero::<T>());
            for r in 0..d {
                for c in 0..d {
                    out[(map[r], map[c])] = m[(r, c)];
                }
            }
            Payload::Density(out)
        }
    };
    Ok(RegisterState { shape: out_shape, payload, tol: s.tol() })
}

/// Same relocation applied to an operator (conjugation by the permutation).
pub fn permute_unitary_subsystems<T: Real>(
    u: &UnitaryOperator<T>,
    perm: &[usize],
) -> Result<UnitaryOperator<T>> {
    permuted_shape(u.shape(), perm)?;
    let (out_shape, map) = permutation_index_map(u.shape(), perm);
    let d = u.matrix().nrows();
    let mut out = DMatrix::from_element(d, d, c_zero::<T>());
    for r in 0..d {
        for c in 0..d {
            out[(map[r], map[c])] = u.matrix()[(r, c)];
        }
    }
    Ok(UnitaryOperator { shape: out_shape, matrix: out })
}

/// Partial trace keeping the listed subsystems (in ascending original order).
pub fn partial_trace<T: Real>(s: &RegisterState<T>, keep: &[usize]) -> Result<RegisterState<T>> {
    if keep.is_empty() {
        return Err(Error::ShapeMismatch("keep set must be non-empty".into()));
    }
    s.shape().check_subsystems(keep)?;
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() {
        return Err(Error::ShapeMismatch("keep set has duplicates".into()));
    }

    let dims = s.shape().dims();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();
    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let keep_shape = match s.shape().labels() {
        Some(ls) => RegisterShape::with_labels(
            keep_dims.clone(),
            keep_sorted.iter().map(|&k| ls[k].clone()).collect(),
        )?,
        None => RegisterShape::new(keep_dims.clone())?,
    };
    if traced.is_empty() {
        let mut out = s.clone();
        out.shape = keep_shape;
        return Ok(out);
    }

    let out_dim = keep_shape.ambient_dim();
    let trace_dim: usize = traced.iter().map(|&k| dims[k]).product();
    let full_strides = s.shape().strides();
    let keep_strides: Vec<usize> = keep_sorted.iter().map(|&k| full_strides[k]).collect();
    let traced_strides: Vec<usize> = traced.iter().map(|&k| full_strides[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let keep_out_strides = keep_shape.strides();

    // flat offsets contributed by the kept / traced digit groups
    let mut keep_offsets = vec![0usize; out_dim];
    for (out_flat, slot) in keep_offsets.iter_mut().enumerate() {
        let mut rem = out_flat;
        let mut offset = 0usize;
        for (k, &os) in keep_out_strides.iter().enumerate() {
            let digit = rem / os;
            rem %= os;
            offset += digit * keep_strides[k];
        }
        *slot = offset;
    }
    let mut traced_offsets = vec![0usize; trace_dim];
    for (t, slot) in traced_offsets.iter_mut().enumerate() {
        let mut rem = t;
        let mut offset = 0usize;
        for (k, &td) in traced_dims.iter().enumerate().rev() {
            let digit = rem % td;
            rem /= td;
            offset += digit * traced_strides[k];
        }
        *slot = offset;
    }

    let rho = s.density_matrix();
    let mut out = DMatrix::from_element(out_dim, out_dim, c_zero::<T>());
    for r in 0..out_dim {
        for c in 0..out_dim {
            let mut acc = c_zero::<T>();
            for &t in &traced_offsets {
                acc += rho[(keep_offsets[r] + t, keep_offsets[c] + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(RegisterState { shape: keep_shape, payload: Payload::Density(out), tol: s.tol() })
}

fn embedding_maps(
    shape: &RegisterShape,
    target: &[usize],
    op_dims: &[usize],
) -> Result<(Vec<usize>, Vec<usize>, usize)> {
    shape.check_subsystems(target)?;
    let mut seen = std::collections::BTreeSet::new();
    for &t in target {
        if !seen.insert(t) {
            return Err(Error::ShapeMismatch("target set has duplicates".into()));
        }
    }
    let dims = shape.dims();
    for (k, &t) in target.iter().enumerate() {
        if op_dims[k] != dims[t] {
            return Err(Error::DimMismatch(format!(
                "operator dim {} vs subsystem {} dim {}",
                op_dims[k], t, dims[t]
            )));
        }
    }
    let op_dim: usize = op_dims.iter().product();
    let full_strides = shape.strides();
    let target_strides: Vec<usize> = target.iter().map(|&t| full_strides[t]).collect();

    // offset of each operator basis index within the flat ambient index
    let mut op_offsets = vec![0usize; op_dim];
    for (j, slot) in op_offsets.iter_mut().enumerate() {
        let mut rem = j;
        let mut offset = 0usize;
        for (k, &od) in op_dims.iter().enumerate().rev() {
            let digit = rem % od;
            rem /= od;
            offset += digit * target_strides[k];
        }
        *slot = offset;
    }

    // enumerate the complementary (spectator) digit combinations
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !target.contains(k)).collect();
    let rest_dim: usize = rest.iter().map(|&k| dims[k]).product();
    let mut rest_offsets = vec![0usize; rest_dim.max(1)];
    for (t, slot) in rest_offsets.iter_mut().enumerate() {
        let mut rem = t;
        let mut offset = 0usize;
        for &k in rest.iter().rev() {
            let digit = rem % dims[k];
            rem /= dims[k];
            offset += digit * full_strides[k];
        }
        *slot = offset;
    }
    Ok((op_offsets, rest_offsets, op_dim))
}

fn apply_to_vector<T: Real>(
    v: &DVector<Cx<T>>,
    u: &DMatrix<Cx<T>>,
    op_offsets: &[usize],
    rest_offsets: &[usize],
) -> DVector<Cx<T>> {
    let mut out = v.clone();
    let op_dim = op_offsets.len();
    let mut slice = vec![c_zero::<T>(); op_dim];
    for &base in rest_offsets {
        for (j, &off) in op_offsets.iter().enumerate() {
            slice[j] = v[base + off];
        }
        for (i, &off_i) in op_offsets.iter().enumerate() {
            let mut acc = c_zero::<T>();
            for (j, &sj) in slice.iter().enumerate() {
                acc += u[(i, j)] * sj;
            }
            out[base + off_i] = acc;
        }
    }
    out
}

/// Apply a unitary to the listed target subsystems.
///
/// The order of `target` matches the subsystem order of `u`'s shape.
pub fn apply_unitary<T: Real>(
    s: &RegisterState<T>,
    u: &UnitaryOperator<T>,
    target: &[usize],
) -> Result<RegisterState<T>> {
    if target.len() != u.shape().num_subsystems() {
        return Err(Error::DimMismatch(format!(
            "{} targets for operator with {} subsystems",
            target.len(),
            u.shape().num_subsystems()
        )));
    }
    let (op_offsets, rest_offsets, _) = embedding_maps(s.shape(), target, u.shape().dims())?;
    let payload = match s.payload() {
        Payload::Pure(v) => Payload::Pure(apply_to_vector(v, u.matrix(), &op_offsets, &rest_offsets)),
        Payload::Density(m) => {
            // U rho U^dag: U on columns of rho, then U on columns of (U rho)^dag
            let d = m.nrows();
            let mut tmp = DMatrix::from_element(d, d, c_zero::<T>());
            for c in 0..d {
                let col = DVector::from_column_slice(m.column(c).as_slice());
                tmp.set_column(c, &apply_to_vector(&col, u.matrix(), &op_offsets, &rest_offsets));
            }
            let tmp_adj = tmp.adjoint();
            let mut out_adj = DMatrix::from_element(d, d, c_zero::<T>());
            for c in 0..d {
                let col = DVector::from_column_slice(tmp_adj.column(c).as_slice());
                out_adj.set_column(c, &apply_to_vector(&col, u.matrix(), &op_offsets, &rest_offsets));
            }
            Payload::Density(out_adj.adjoint())
        }
    };
    Ok(RegisterState { shape: s.shape().clone(), payload, tol: s.tol() })
}
