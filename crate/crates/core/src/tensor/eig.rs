//! Hermitian spectral decomposition and matrix functions built on it.
//!
//! The solver is a cyclic complex Jacobi iteration. It is slower than a
//! Householder/QL pipeline but unconditionally robust on the highly
//! degenerate spectra this crate produces (twisted states are full of exact
//! zero eigenvalues), where nalgebra's `SymmetricEigen` can fail to converge.

use super::hermitize;
use crate::scalar::{c_zero, Cx, Real};
use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 42;

fn off_diagonal_norm<T: Real>(a: &DMatrix<Cx<T>>) -> T {
    let n = a.nrows();
    let mut acc = T::zero();
    for p in 0..n {
        for q in (p + 1)..n {
            acc += a[(p, q)].norm_sqr();
        }
    }
    (acc + acc).sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is hermitized as `(M + M^dag)/2` first. Eigenvalues come back
/// sorted descending with matching eigenvector columns, so that
/// `V diag(w) V^dag` reconstructs the input.
pub fn hermitian_eig<T: Real>(m: &DMatrix<Cx<T>>) -> (Vec<T>, DMatrix<Cx<T>>) {
    assert_eq!(m.nrows(), m.ncols(), "hermitian_eig needs a square matrix");
    let n = m.nrows();
    let mut a = hermitize(m);
    let mut v = DMatrix::from_element(n, n, c_zero::<T>());
    for i in 0..n {
        v[(i, i)] = Cx::new(T::one(), T::zero());
    }
    if n > 1 {
        let scale = a.norm().max(T::one());
        let target = scale * T::default_epsilon() * T::of_usize(n);
        for _sweep in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= target {
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .expect("Jacobi iteration keeps the diagonal finite")
    });
    let eigvals: Vec<T> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = DMatrix::from_element(n, n, c_zero::<T>());
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &v.column(src));
    }
    (eigvals, vecs)
}

/// One complex Jacobi rotation zeroing `a[(p, q)]`, accumulated into `v`.
fn jacobi_rotate<T: Real>(a: &mut DMatrix<Cx<T>>, v: &mut DMatrix<Cx<T>>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = T::cx_abs(apq);
    if r <= T::default_epsilon() * T::of(0.001) {
        return;
    }
    // phase factor making the pivot real, then a real Jacobi rotation
    let phase = apq / Cx::new(r, T::zero()); // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (r + r);
    // small root of t^2 - 2 tau t - 1 = 0
    let t = if tau >= T::zero() {
        -T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // J[p][p] = c, J[p][q] = -s, J[q][p] = conj(phase) s, J[q][q] = conj(phase) c
    let cs = Cx::new(c, T::zero());
    let ss = Cx::new(s, T::zero());
    let phase_conj = phase.conj();

    let n = a.nrows();
    // columns: A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cs + akq * (phase_conj * ss);
        a[(k, q)] = akq * (phase_conj * cs) - akp * ss;
    }
    // rows: A <- J^dag A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cs + aqk * (phase * ss);
        a[(q, k)] = aqk * (phase * cs) - apk * ss;
    }
    // pivot is annihilated exactly; scrub rounding residue
    a[(p, q)] = c_zero::<T>();
    a[(q, p)] = c_zero::<T>();
    a[(p, p)] = Cx::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Cx::new(a[(q, q)].re, T::zero());

    // eigenvectors: V <- V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs + vkq * (phase_conj * ss);
        v[(k, q)] = vkq * (phase_conj * cs) - vkp * ss;
    }
}

/// Apply a real function to the spectrum: `f(M) = V diag(f(w)) V^dag`.
pub fn hermitian_fn<T: Real>(m: &DMatrix<Cx<T>>, f: impl Fn(T) -> T) -> DMatrix<Cx<T>> {
    let (w, v) = hermitian_eig(m);
    let n = m.nrows();
    let mut diag = DMatrix::from_element(n, n, c_zero::<T>());
    for (i, &wi) in w.iter().enumerate() {
        diag[(i, i)] = Cx::new(f(wi), T::zero());
    }
    &v * diag * v.adjoint()
}

/// `M^p` on the support of `M`: eigenvalues below `clip` contribute zero.
///
/// Negative exponents therefore act as pseudo-inverse powers.
pub fn hermitian_power<T: Real>(m: &DMatrix<Cx<T>>, p: T, clip: T) -> DMatrix<Cx<T>> {
    hermitian_fn(m, |w| if w > clip { w.powf(p) } else { T::zero() })
}

/// Principal square root of a PSD matrix; small negative eigenvalues clip to 0.
pub fn matrix_sqrt<T: Real>(m: &DMatrix<Cx<T>>) -> DMatrix<Cx<T>> {
    hermitian_fn(m, |w| if w > T::zero() { w.sqrt() } else { T::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, rng: &mut StdRng) -> DMatrix<Cx<f64>> {
        let g = DMatrix::from_fn(n, n, |_, _| cx::<f64>(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        &g + g.adjoint()
    }

    fn reconstruct(w: &[f64], v: &DMatrix<Cx<f64>>) -> DMatrix<Cx<f64>> {
        let n = w.len();
        let mut d = DMatrix::from_element(n, n, cx::<f64>(0.0, 0.0));
        for i in 0..n {
            d[(i, i)] = cx(w[i], 0.0);
        }
        v * d * v.adjoint()
    }

    #[test]
    fn diagonal_case() {
        let m = DMatrix::from_row_slice(2, 2, &[
            cx::<f64>(1.0, 0.0), cx(0.0, 0.0),
            cx(0.0, 0.0), cx(3.0, 0.0),
        ]);
        let (w, v) = hermitian_eig(&m);
        assert!((w[0] - 3.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
        assert!((v[(1, 0)].norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_spectrum() {
        let m = DMatrix::from_row_slice(2, 2, &[
            cx::<f64>(0.0, 0.0), cx(1.0, 0.0),
            cx(1.0, 0.0), cx(0.0, 0.0),
        ]);
        let (w, _) = hermitian_eig(&m);
        assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_random_8() {
        let mut rng = StdRng::seed_from_u64(7);
        let m = random_hermitian(8, &mut rng);
        let (w, v) = hermitian_eig(&m);
        assert!((reconstruct(&w, &v) - &m).norm() < 1e-12 * m.norm().max(1.0));
        let gram = v.adjoint() * &v;
        assert!((gram - DMatrix::identity(8, 8)).norm() < 1e-12);
    }

    #[test]
    fn reconstruction_dim_256() {
        let mut rng = StdRng::seed_from_u64(13);
        let m = random_hermitian(256, &mut rng);
        let (w, v) = hermitian_eig(&m);
        assert!((reconstruct(&w, &v) - &m).norm() <= 1e-10 * m.norm());
    }

    #[test]
    fn degenerate_twisted_product_regression() {
        // nalgebra's SymmetricEigen returns NaN on this rank-deficient input
        use crate::states::make_flower_state;
        use crate::tensor::kron;
        let u1 = DMatrix::from_row_slice(2, 2, &[
            cx::<f64>(0.0, 0.0), cx(1.0, 0.0),
            cx(1.0, 0.0), cx(0.0, 0.0),
        ]);
        let g1 = make_flower_state(2, &u1).unwrap();
        let theta = 0.9f64;
        let u2 = DMatrix::from_row_slice(2, 2, &[
            cx::<f64>(theta.cos(), 0.0), cx(-theta.sin(), 0.0),
            cx(theta.sin(), 0.0), cx(theta.cos(), 0.0),
        ]);
        let g2 = make_flower_state(2, &u2).unwrap();
        let prod = kron(&g1.expand().unwrap(), &g2.expand().unwrap());
        let m = prod.density_matrix();
        let (w, v) = hermitian_eig(&m);
        assert!(w.iter().all(|x| x.is_finite()));
        assert!((reconstruct(&w, &v) - &m).norm() < 1e-11);
        let tr: f64 = w.iter().sum();
        assert!((tr - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = StdRng::seed_from_u64(3);
        let g = random_hermitian(4, &mut rng);
        let psd = &g * &g;
        let root = matrix_sqrt(&psd);
        assert!((&root * &root - &psd).norm() < 1e-10 * psd.norm());
    }

    #[test]
    fn works_in_f32() {
        let m = DMatrix::from_row_slice(2, 2, &[
            Cx::new(0.0f32, 0.0), Cx::new(0.0, -1.0),
            Cx::new(0.0, 1.0), Cx::new(0.0, 0.0),
        ]);
        let (w, _) = hermitian_eig(&m);
        assert!((w[0] - 1.0).abs() < 1e-5 && (w[1] + 1.0).abs() < 1e-5);
    }
}
