//! Constructors for the concrete state families.

use super::{GeneralizedPrivateState, SchmidtState, TwistingUnitary};
use crate::error::{Error, Result};
use crate::scalar::{c_zero, Cx, Real};
use crate::tensor::{RegisterShape, RegisterState, UnitaryOperator};
use nalgebra::{DMatrix, DVector};

/// Maximally entangled pure state `(1/sqrt d) sum_i |ii>` over shape (d, d).
pub fn make_max_entangled<T: Real>(d: usize) -> Result<RegisterState<T>> {
    if d < 2 {
        return Err(Error::Domain(format!("need d >= 2, got {d}")));
    }
    let amp = Cx::new(T::one() / T::of_usize(d).sqrt(), T::zero());
    let mut v = DVector::from_element(d * d, c_zero::<T>());
    for i in 0..d {
        v[i * d + i] = amp;
    }
    RegisterState::pure(RegisterShape::new(vec![d, d])?, v)
}

/// Private state with a maximally entangled key part of dimension `d_k`.
pub fn make_private_state<T: Real>(
    d_k: usize,
    shield: RegisterState<T>,
    twist: TwistingUnitary<T>,
) -> Result<GeneralizedPrivateState<T>> {
    let split = shield_split_of(&shield)?;
    GeneralizedPrivateState::new(SchmidtState::uniform(d_k)?, shield, twist, split)
}

/// Generalized private state: arbitrary Schmidt key twisted with the shield.
pub fn make_generalized_private_state<T: Real>(
    key: SchmidtState<T>,
    shield: RegisterState<T>,
    twist: TwistingUnitary<T>,
) -> Result<GeneralizedPrivateState<T>> {
    let split = shield_split_of(&shield)?;
    GeneralizedPrivateState::new(key, shield, twist, split)
}

fn shield_split_of<T: Real>(shield: &RegisterState<T>) -> Result<(usize, usize)> {
    let dims = shield.shape().dims();
    if dims.len() != 2 {
        return Err(Error::DimMismatch(format!(
            "shield must have two subsystems (A_S, B_S), got {dims:?}"
        )));
    }
    Ok((dims[0], dims[1]))
}

/// Flower private bit: key dimension 2, shield `sigma = (1/d_s) sum |ii><ii|`
/// and second twist block built from the `d_s x d_s` unitary `u`, producing
/// the 4-block X-form with off-diagonal corners `(1/d_s) U^T` / `(1/d_s) U^*`.
pub fn make_flower_state<T: Real>(
    d_s: usize,
    u: &DMatrix<Cx<T>>,
) -> Result<GeneralizedPrivateState<T>> {
    if u.nrows() != d_s || u.ncols() != d_s {
        return Err(Error::DimMismatch(format!(
            "u is {}x{}, expected {d_s}x{d_s}",
            u.nrows(),
            u.ncols()
        )));
    }
    let unitary_defect = (u.adjoint() * u - DMatrix::identity(d_s, d_s)).norm();
    if unitary_defect > T::of(1e-10) * T::of_usize(d_s) {
        return Err(Error::NonUnitary(format!(
            "u deviates from unitarity by {}",
            unitary_defect.to_f64_lossy()
        )));
    }

    let shield_shape = RegisterShape::new(vec![d_s, d_s])?;
    let sd = d_s * d_s;
    // sigma = (1/d_s) sum_i |ii><ii|
    let mut sigma = DMatrix::from_element(sd, sd, c_zero::<T>());
    let w = Cx::new(T::one() / T::of_usize(d_s), T::zero());
    for i in 0..d_s {
        let k = i * d_s + i;
        sigma[(k, k)] = w;
    }
    let shield = RegisterState::density(shield_shape.clone(), sigma)?;

    // block 1 = sum_ij conj(u_ij) |ii><jj| + identity off the |ii> span,
    // so that sigma U_1^dag = (1/d_s) U^T on the maximally correlated span
    let mut b1 = DMatrix::from_element(sd, sd, c_zero::<T>());
    for i in 0..d_s {
        for j in 0..d_s {
            b1[(i * d_s + i, j * d_s + j)] = u[(i, j)].conj();
        }
    }
    for k in 0..d_s {
        for l in 0..d_s {
            if k != l {
                let idx = k * d_s + l;
                b1[(idx, idx)] = Cx::new(T::one(), T::zero());
            }
        }
    }
    let twist = TwistingUnitary::new(vec![
        UnitaryOperator::identity(shield_shape.clone()),
        UnitaryOperator::new(shield_shape, b1)?,
    ])?;
    make_private_state(2, shield, twist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use crate::tensor::{partial_trace, von_neumann_entropy};

    #[test]
    fn max_entangled_amplitudes() {
        let s2 = make_max_entangled::<f64>(2).unwrap();
        let v = s2.pure_amplitudes().unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0].re - r).abs() < 1e-15 && (v[3].re - r).abs() < 1e-15);
        assert!(v[1].re.abs() < 1e-15 && v[2].re.abs() < 1e-15);

        let s3 = make_max_entangled::<f64>(3).unwrap();
        let v3 = s3.pure_amplitudes().unwrap();
        let nonzero: Vec<f64> = v3.iter().filter(|z| z.re != 0.0).map(|z| z.re).collect();
        assert_eq!(nonzero.len(), 3);
        for a in nonzero {
            assert!((a - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        assert!(make_max_entangled::<f64>(1).is_err());
    }

    #[test]
    fn max_entangled_reduction_is_mixed() {
        let s = make_max_entangled::<f64>(3).unwrap();
        let red = partial_trace(&s, &[0]).unwrap();
        let m = red.density_matrix();
        for i in 0..3 {
            assert!((m[(i, i)].re - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!((von_neumann_entropy(&red, None).unwrap() - 3f64.log2()).abs() < 1e-10);
    }

    #[test]
    fn scalar_shield_gives_max_entangled() {
        let shield = RegisterState::<f64>::density(
            RegisterShape::new(vec![1, 1]).unwrap(),
            DMatrix::from_element(1, 1, cx(1.0, 0.0)),
        )
        .unwrap();
        let twist = TwistingUnitary::trivial(3, shield.shape().clone());
        let g = make_private_state(3, shield, twist).unwrap();
        let expanded = g.expand().unwrap();
        let phi = make_max_entangled::<f64>(3).unwrap();
        // same state up to the trivial shield factor
        let d = expanded.density_matrix();
        let p = phi.density_matrix();
        assert!((d - p).norm() < 1e-12);
    }

    #[test]
    fn generalized_specializes_to_private() {
        let shield = RegisterState::<f64>::density(
            RegisterShape::new(vec![2, 1]).unwrap(),
            DMatrix::from_row_slice(2, 2, &[
                cx(0.5, 0.0), cx(0.0, 0.0),
                cx(0.0, 0.0), cx(0.5, 0.0),
            ]),
        )
        .unwrap();
        let x = UnitaryOperator::new(
            shield.shape().clone(),
            DMatrix::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)]),
        )
        .unwrap();
        let twist = TwistingUnitary::new(vec![
            UnitaryOperator::identity(shield.shape().clone()),
            x,
        ])
        .unwrap();
        let a = make_private_state(2, shield.clone(), twist.clone()).unwrap();
        let b = make_generalized_private_state(SchmidtState::uniform(2).unwrap(), shield, twist)
            .unwrap();
        assert!(
            (a.expand().unwrap().density_matrix() - b.expand().unwrap().density_matrix()).norm()
                < 1e-12
        );
    }

    #[test]
    fn flower_matches_hand_built_x_form() {
        // d_s = 2, u = identity: corner blocks sigma, off-diagonal (1/2) U^T
        let u = DMatrix::from_row_slice(2, 2, &[
            cx::<f64>(1.0, 0.0), cx(0.0, 0.0),
            cx(0.0, 0.0), cx(1.0, 0.0),
        ]);
        let flower = make_flower_state(2, &u).unwrap();
        let got = flower.expand().unwrap().density_matrix();

        // hand-built 16x16: basis (key_a, key_b, s_a, s_b), sector (i,j) of the
        // key occupies rows (2i+j)*4..(2i+j)*4+4
        let mut want = DMatrix::from_element(16, 16, cx::<f64>(0.0, 0.0));
        let sigma_diag = [0usize, 3]; // |00>, |11> of the shield
        for &k in &sigma_diag {
            // (1/2) sigma in sectors (0,0)x(0,0) and (1,1)x(1,1)
            want[(k, k)] = cx(0.25, 0.0);
            want[(12 + k, 12 + k)] = cx(0.25, 0.0);
            // off-diagonal corners: (1/2)(1/2) sum_i |ii><ii| for u = 1
            want[(k, 12 + k)] = cx(0.25, 0.0);
            want[(12 + k, k)] = cx(0.25, 0.0);
        }
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn flower_is_unit_trace_psd() {
        let theta = 0.7f64;
        let u = DMatrix::from_row_slice(2, 2, &[
            cx::<f64>(theta.cos(), 0.0), cx(-theta.sin(), 0.0),
            cx(theta.sin(), 0.0), cx(theta.cos(), 0.0),
        ]);
        let flower = make_flower_state(2, &u).unwrap();
        // expand() validates Hermiticity, PSD and unit trace
        assert!(flower.expand().is_ok());
    }

    #[test]
    fn flower_rejects_non_unitary() {
        let bad = DMatrix::from_row_slice(2, 2, &[
            cx::<f64>(1.0, 0.0), cx(1.0, 0.0),
            cx(0.0, 0.0), cx(1.0, 0.0),
        ]);
        assert!(make_flower_state(2, &bad).is_err());
    }

    #[test]
    fn measuring_key_gives_uniform_correlated_dits() {
        let shield = RegisterState::<f64>::density(
            RegisterShape::new(vec![2, 1]).unwrap(),
            DMatrix::from_row_slice(2, 2, &[
                cx(0.5, 0.0), cx(0.0, 0.0),
                cx(0.0, 0.0), cx(0.5, 0.0),
            ]),
        )
        .unwrap();
        let h = UnitaryOperator::new(
            shield.shape().clone(),
            DMatrix::from_row_slice(2, 2, &[
                cx(std::f64::consts::FRAC_1_SQRT_2, 0.0), cx(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                cx(std::f64::consts::FRAC_1_SQRT_2, 0.0), cx(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ]),
        )
        .unwrap();
        let twist = TwistingUnitary::new(vec![
            UnitaryOperator::identity(shield.shape().clone()),
            h,
        ])
        .unwrap();
        let g = make_private_state(2, shield, twist).unwrap();
        let expanded = g.expand().unwrap();
        let outcomes = crate::tensor::projective_measure(
            &expanded,
            &crate::tensor::computational_basis(4),
            &[0, 1],
        )
        .unwrap();
        // only |00> and |11> fire, each with probability 1/2
        assert!((outcomes[0].probability - 0.5).abs() < 1e-10);
        assert!(outcomes[1].probability.abs() < 1e-10);
        assert!(outcomes[2].probability.abs() < 1e-10);
        assert!((outcomes[3].probability - 0.5).abs() < 1e-10);
        // conditional shield on outcome i is U_i rho U_i^dag
        let post = outcomes[3].post_state.as_ref().unwrap();
        let cond = partial_trace(post, &[2, 3]).unwrap();
        assert!((cond.density_matrix() - g.conditional_shield(1)).norm() < 1e-9);
    }
}
