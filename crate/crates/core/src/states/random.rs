//! Seeded random instance generators used by the verification suites.

use super::{GeneralizedPrivateState, SchmidtState, TwistingUnitary};
use crate::error::Result;
use crate::scalar::{c_zero, Cx, Real};
use crate::tensor::{RegisterShape, RegisterState, UnitaryOperator};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Haar-like random unitary: QR of a complex Ginibre matrix with the phase of
/// R's diagonal absorbed into Q.
pub fn random_unitary<T: Real, R: Rng>(d: usize, rng: &mut R) -> UnitaryOperator<T> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Cx::new(T::of(rng.gen::<f64>() * 2.0 - 1.0), T::of(rng.gen::<f64>() * 2.0 - 1.0))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let rkk = r[(k, k)];
        let mag = T::cx_abs(rkk);
        if mag > T::of(1e-12) {
            let phase = rkk / Cx::new(mag, T::zero());
            for i in 0..d {
                q[(i, k)] *= phase;
            }
        }
    }
    UnitaryOperator::new(RegisterShape::new(vec![d]).expect("positive dim"), q)
        .expect("QR produces a unitary")
}

/// Random full-rank density matrix `G G^dag / Tr`.
pub fn random_density<T: Real, R: Rng>(dims: Vec<usize>, rng: &mut R) -> RegisterState<T> {
    let shape = RegisterShape::new(dims).expect("positive dims");
    let d = shape.ambient_dim();
    let g = DMatrix::from_fn(d, d, |_, _| {
        Cx::new(T::of(rng.gen::<f64>() * 2.0 - 1.0), T::of(rng.gen::<f64>() * 2.0 - 1.0))
    });
    let mut m = &g * g.adjoint();
    // small ridge keeps the spectrum away from zero
    for i in 0..d {
        m[(i, i)] += Cx::new(T::of(0.05), T::zero());
    }
    let tr: T = (0..d).map(|i| m[(i, i)].re).sum();
    let m = m.map(|z| z / Cx::new(tr, T::zero()));
    RegisterState::density(shape, m).expect("construction is PSD and unit trace")
}

/// Random probability vector bounded away from zero.
pub fn random_probs<T: Real, R: Rng>(k: usize, rng: &mut R) -> Vec<T> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 0.1).collect();
    let total: f64 = raw.iter().sum();
    let mut probs: Vec<T> = raw.iter().map(|&p| T::of(p / total)).collect();
    // re-normalize exactly in the target precision
    let sum: T = probs.iter().copied().sum();
    let last = probs.last_mut().expect("k >= 1");
    *last += T::one() - sum;
    probs
}

/// Random separable shield: a short mixture of product states.
pub fn random_separable_density<T: Real, R: Rng>(
    da: usize,
    db: usize,
    terms: usize,
    rng: &mut R,
) -> RegisterState<T> {
    let d = da * db;
    let mut m = DMatrix::from_element(d, d, c_zero::<T>());
    let weights = random_probs::<T, R>(terms, rng);
    for &w in &weights {
        let va = random_pure_vector::<T, R>(da, rng);
        let vb = random_pure_vector::<T, R>(db, rng);
        let v = va.kronecker(&vb);
        let dy = &v * v.adjoint();
        m += dy * Cx::new(w, T::zero());
    }
    RegisterState::density_with_tol(
        RegisterShape::new(vec![da, db]).expect("positive dims"),
        m,
        T::of(1e-9),
    )
    .expect("mixture of products is a state")
}

fn random_pure_vector<T: Real, R: Rng>(d: usize, rng: &mut R) -> DVector<Cx<T>> {
    let mut v = DVector::from_fn(d, |_, _| {
        Cx::new(T::of(rng.gen::<f64>() * 2.0 - 1.0), T::of(rng.gen::<f64>() * 2.0 - 1.0))
    });
    let n = v.norm();
    v /= Cx::new(n, T::zero());
    v
}

/// Random Schmidt data of rank `d_k` with Haar-random local bases.
pub fn random_schmidt<T: Real, R: Rng>(d_k: usize, rng: &mut R) -> Result<SchmidtState<T>> {
    let coeffs = random_probs::<T, R>(d_k, rng);
    let ua = random_unitary::<T, R>(d_k, rng);
    let ub = random_unitary::<T, R>(d_k, rng);
    let cols = |u: &UnitaryOperator<T>| -> Vec<DVector<Cx<T>>> {
        (0..d_k)
            .map(|i| DVector::from_column_slice(u.matrix().column(i).as_slice()))
            .collect()
    };
    SchmidtState::new(coeffs, cols(&ua), cols(&ub))
}

/// Random strictly irreducible generalized private state.
///
/// The shield is a separable mixture and every twist block is a product
/// unitary, so each conditional block stays separable by construction.
pub fn random_gsir<T: Real, R: Rng>(
    d_k: usize,
    da: usize,
    db: usize,
    rng: &mut R,
) -> Result<GeneralizedPrivateState<T>> {
    let key = random_schmidt::<T, R>(d_k, rng)?;
    let shield = random_separable_density::<T, R>(da, db, 3, rng);
    let shield_shape = RegisterShape::new(vec![da, db])?;
    let blocks = (0..d_k)
        .map(|_| {
            let va = random_unitary::<T, R>(da, rng);
            let vb = random_unitary::<T, R>(db, rng);
            let m = va.matrix().kronecker(vb.matrix());
            UnitaryOperator::new(shield_shape.clone(), m)
        })
        .collect::<Result<Vec<_>>>()?;
    GeneralizedPrivateState::new(key, shield, TwistingUnitary::new(blocks)?, (da, db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{check_strict_irreducibility, IrreducibilityVerdict};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [2usize, 3, 5] {
            let u = random_unitary::<f64, _>(d, &mut rng);
            let defect = (u.matrix().adjoint() * u.matrix()
                - nalgebra::DMatrix::identity(d, d))
            .norm();
            assert!(defect < 1e-10);
        }
    }

    #[test]
    fn random_gsir_is_valid_state_and_never_entangled_conditional() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let dk = rng.gen_range(2..=4);
            let da = rng.gen_range(1..=3);
            let db = rng.gen_range(1..=3);
            let g = random_gsir::<f64, _>(dk, da, db, &mut rng).unwrap();
            assert!(g.expand().is_ok());
            assert_ne!(
                check_strict_irreducibility(&g).unwrap(),
                IrreducibilityVerdict::EntangledConditional
            );
        }
    }

    #[test]
    fn probs_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_probs::<f64, _>(5, &mut rng);
        let sum: f64 = p.iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }
}
