//! Hypothesis-testing divergence via the quantum Neyman-Pearson construction.
//!
//! `D_h^eps(rho || sigma) = -log2 inf { Tr[L sigma] : 0 <= L <= 1,
//! Tr[L rho] >= 1 - eps }`. The optimal test is a spectral projector of
//! `rho - t sigma` plus a fractional weight on the threshold eigenspace; the
//! threshold is located by bisection and the boundary weight is chosen so the
//! type-I constraint holds with equality.

use super::{DivergenceResult, DivergenceValue, Method};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};
use crate::tensor::{hermitian_eig, RegisterState, SUPPORT_CLIP};
use nalgebra::DMatrix;

/// Optimal type-II error `beta` of the eps-hypothesis test, with the sentinel
/// `None` standing for beta = 0 (infinite divergence).
pub fn neyman_pearson_beta<T: Real>(
    rho: &RegisterState<T>,
    sigma: &RegisterState<T>,
    epsilon: T,
) -> Result<Option<T>> {
    if rho.shape().dims() != sigma.shape().dims() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            rho.shape().dims(),
            sigma.shape().dims()
        )));
    }
    if epsilon < T::zero() || epsilon >= T::one() {
        return Err(Error::Domain(format!(
            "epsilon must lie in [0, 1), got {}",
            epsilon.to_f64_lossy()
        )));
    }
    let clip = T::of(SUPPORT_CLIP);
    let r = rho.density_matrix();
    let s = sigma.density_matrix();
    let n = r.nrows();

    // Split off ker(sigma): the projector onto it costs nothing, so all rho
    // weight there is collected for free.
    let (ws, vs) = hermitian_eig(&s);
    let support: Vec<usize> = (0..n).filter(|&j| ws[j] > clip).collect();
    let kernel: Vec<usize> = (0..n).filter(|&j| ws[j] <= clip).collect();
    let mut free_mass = T::zero();
    for &j in &kernel {
        free_mass += quadratic_form(&r, &vs, j);
    }
    let needed = T::one() - epsilon - free_mass;
    if needed <= T::zero() {
        return Ok(None); // test supported on ker(sigma): beta = 0
    }
    // Compress onto supp(sigma); sigma becomes diagonal there.
    let dim_s = support.len();
    let mut rho_s = DMatrix::from_element(dim_s, dim_s, Cx::new(T::zero(), T::zero()));
    let mut sig_s = DMatrix::from_element(dim_s, dim_s, Cx::new(T::zero(), T::zero()));
    for (a, &ja) in support.iter().enumerate() {
        sig_s[(a, a)] = Cx::new(ws[ja], T::zero());
        for (b, &jb) in support.iter().enumerate() {
            let mut acc = Cx::new(T::zero(), T::zero());
            for x in 0..n {
                let mut inner = Cx::new(T::zero(), T::zero());
                for y in 0..n {
                    inner += r[(x, y)] * vs[(y, jb)];
                }
                acc += vs[(x, ja)].conj() * inner;
            }
            rho_s[(a, b)] = acc;
        }
    }

    // g(t) = Tr[P_{rho - t sigma > 0} rho] is nonincreasing in t.
    let weight_above = |t: T| -> (T, T) {
        let a = &rho_s - &sig_s * Cx::new(t, T::zero());
        let (w, v) = hermitian_eig(&a);
        let mut p = T::zero();
        let mut b = T::zero();
        for (j, &wj) in w.iter().enumerate() {
            if wj > T::zero() {
                p += quadratic_form(&rho_s, &v, j);
                b += quadratic_form(&sig_s, &v, j);
            }
        }
        (p, b)
    };

    let mut t_lo = T::zero();
    let mut t_hi = T::one();
    while weight_above(t_hi).0 >= needed {
        t_hi = t_hi * T::of(2.0);
        if t_hi > T::of(1e18) {
            // sigma weight keeps vanishing along rho's support; treat as free
            return Ok(None);
        }
    }
    let t_tol = T::of(1e-13) * (T::one() + t_hi);
    while t_hi - t_lo > t_tol {
        let mid = (t_lo + t_hi) * T::of(0.5);
        if weight_above(mid).0 >= needed {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
    }

    // Classify the spectrum at the midpoint: strictly positive eigenvalues go
    // into the test; eigenvalues inside the bracket-wide band are boundary.
    let t_mid = (t_lo + t_hi) * T::of(0.5);
    let sig_top = ws.first().copied().unwrap_or(T::one());
    let mut band = (t_hi - t_lo) * (sig_top + T::one()) + T::of(1e-13);
    for _ in 0..60 {
        let a = &rho_s - &sig_s * Cx::new(t_mid, T::zero());
        let (w, v) = hermitian_eig(&a);
        let mut p_in = T::zero();
        let mut b_in = T::zero();
        let mut p_bd = T::zero();
        let mut b_bd = T::zero();
        for (j, &wj) in w.iter().enumerate() {
            if wj > band {
                p_in += quadratic_form(&rho_s, &v, j);
                b_in += quadratic_form(&sig_s, &v, j);
            } else if wj > -band {
                p_bd += quadratic_form(&rho_s, &v, j);
                b_bd += quadratic_form(&sig_s, &v, j);
            }
        }
        let slack = T::of(1e-11);
        if p_in <= needed + slack && needed <= p_in + p_bd + slack {
            let c = if p_bd > T::of(1e-15) {
                ((needed - p_in) / p_bd).clamp(T::zero(), T::one())
            } else {
                T::zero()
            };
            let beta = b_in + c * b_bd;
            return Ok(Some(beta.max(T::zero())));
        }
        // widen the boundary band until the constraint is straddled
        band = band * T::of(4.0);
    }
    Err(Error::Domain("Neyman-Pearson boundary classification failed".into()))
}

fn quadratic_form<T: Real>(m: &DMatrix<Cx<T>>, v: &DMatrix<Cx<T>>, col: usize) -> T {
    let n = m.nrows();
    let mut acc = T::zero();
    for a in 0..n {
        let mut inner = Cx::new(T::zero(), T::zero());
        for b in 0..n {
            inner += m[(a, b)] * v[(b, col)];
        }
        acc += (v[(a, col)].conj() * inner).re;
    }
    acc
}

/// `D_h^eps(rho || sigma)` in bits.
pub fn hypothesis_testing_divergence<T: Real>(
    rho: &RegisterState<T>,
    sigma: &RegisterState<T>,
    epsilon: T,
) -> Result<DivergenceResult<T>> {
    let beta = neyman_pearson_beta(rho, sigma, epsilon)?;
    Ok(match beta {
        Some(b) if b > T::zero() => {
            DivergenceResult { value: DivergenceValue::Finite(-b.log2()), method: Method::NeymanPearson }
        }
        _ => DivergenceResult { value: DivergenceValue::Infinite, method: Method::NeymanPearson },
    })
}
