//! Entropic divergences: relative entropy, sandwiched Renyi, max/min relative
//! entropies and the hypothesis-testing divergence.
//!
//! All values are in bits. Support projections use the crate-wide eigenvalue
//! clip [`crate::tensor::SUPPORT_CLIP`], the single source of truth for
//! support decisions across every divergence here.

mod hypothesis;
mod rates;

pub use hypothesis::{hypothesis_testing_divergence, neyman_pearson_beta};
pub use rates::{
    ccq_rate, check_dual_certificate, devetak_winter_rate, dual_certificate_value,
    kf_ensemble_value, yield_cost_bounds, DualCertificate,
};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};
use crate::tensor::{hermitian_eig, hermitian_power, RegisterState, SUPPORT_CLIP};
use nalgebra::DMatrix;

/// Value of a divergence; infinity is an explicit sentinel, never an overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceValue<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> DivergenceValue<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    pub fn finite(&self) -> Option<T> {
        match self {
            Self::Finite(x) => Some(*x),
            Self::Infinite => None,
        }
    }

    pub fn expect_finite(&self, what: &str) -> T {
        self.finite().unwrap_or_else(|| panic!("{what} is infinite"))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Finite(x) => x.to_f64_lossy(),
            Self::Infinite => f64::INFINITY,
        }
    }
}

/// How a divergence value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Eigendecomposition,
    NeymanPearson,
    Certificate,
}

#[derive(Debug, Clone, Copy)]
pub struct DivergenceResult<T> {
    pub value: DivergenceValue<T>,
    pub method: Method,
}

impl<T: Real> DivergenceResult<T> {
    fn finite(value: T, method: Method) -> Self {
        Self { value: DivergenceValue::Finite(value), method }
    }

    fn infinite(method: Method) -> Self {
        Self { value: DivergenceValue::Infinite, method }
    }
}

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

/// Weight of `rho` outside the support of the spectral data `(w, v)`.
fn mass_outside_support<T: Real>(
    rho: &DMatrix<Cx<T>>,
    w: &[T],
    v: &DMatrix<Cx<T>>,
    clip: T,
) -> T {
    let mut mass = T::zero();
    for (j, &wj) in w.iter().enumerate() {
        if wj <= clip {
            let col = v.column(j);
            let mut q = T::zero();
            for r in 0..rho.nrows() {
                let mut amp = Cx::new(T::zero(), T::zero());
                for c in 0..rho.ncols() {
                    amp += rho[(r, c)] * col[c];
                }
                q += (col[r].conj() * amp).re;
            }
            mass += q;
        }
    }
    mass
}

/// Quantum relative entropy `D(rho || sigma) = Tr[rho (log2 rho - log2 sigma)]`.
///
/// Returns the infinite sentinel when the support of `rho` is not contained
/// in the support of `sigma`.
pub fn relative_entropy<T: Real>(
    rho: &RegisterState<T>,
    sigma: &RegisterState<T>,
) -> Result<DivergenceResult<T>> {
    check_same_shape(rho, sigma)?;
    let clip = T::of(SUPPORT_CLIP);
    let r = rho.density_matrix();
    let s = sigma.density_matrix();
    let (ws, vs) = hermitian_eig(&s);
    if mass_outside_support(&r, &ws, &vs, clip) > clip {
        return Ok(DivergenceResult::infinite(Method::Eigendecomposition));
    }
    let (wr, _) = hermitian_eig(&r);
    let h_term: T = wr.iter().filter(|&&x| x > clip).map(|&x| x * x.log2()).sum();
    let mut cross = T::zero();
    for (j, &wj) in ws.iter().enumerate() {
        if wj > clip {
            let col = vs.column(j);
            let mut q = T::zero();
            for a in 0..r.nrows() {
                let mut amp = Cx::new(T::zero(), T::zero());
                for b in 0..r.ncols() {
                    amp += r[(a, b)] * col[b];
                }
                q += (col[a].conj() * amp).re;
            }
            cross += q * wj.log2();
        }
    }
    Ok(DivergenceResult::finite(h_term - cross, Method::Eigendecomposition))
}

/// Sandwiched Renyi relative entropy of order `alpha` (alpha != 1).
pub fn sandwiched_renyi<T: Real>(
    rho: &RegisterState<T>,
    sigma: &RegisterState<T>,
    alpha: T,
) -> Result<DivergenceResult<T>> {
    check_same_shape(rho, sigma)?;
    if alpha <= T::zero() || alpha == T::one() {
        return Err(Error::Domain(format!(
            "alpha must lie in (0,1) or (1,inf), got {}",
            alpha.to_f64_lossy()
        )));
    }
    let clip = T::of(SUPPORT_CLIP);
    let r = rho.density_matrix();
    let s = sigma.density_matrix();
    if alpha > T::one() {
        let (ws, vs) = hermitian_eig(&s);
        if mass_outside_support(&r, &ws, &vs, clip) > clip {
            return Ok(DivergenceResult::infinite(Method::Eigendecomposition));
        }
    }
    let p = (T::one() - alpha) / (alpha + alpha);
    let s_pow = hermitian_power(&s, p, clip);
    let inner = &s_pow * r * &s_pow;
    let (w, _) = hermitian_eig(&inner);
    let total: T = w
        .iter()
        .filter(|&&x| x > T::zero())
        .map(|&x| x.powf(alpha))
        .sum();
    if total <= T::zero() {
        return Ok(DivergenceResult::infinite(Method::Eigendecomposition));
    }
    let value = total.log2() / (alpha - T::one());
    Ok(DivergenceResult::finite(value, Method::Eigendecomposition))
}

/// Max-relative entropy `inf { lambda : rho <= 2^lambda sigma }`.
pub fn max_relative_entropy<T: Real>(
    rho: &RegisterState<T>,
    sigma: &RegisterState<T>,
) -> Result<DivergenceResult<T>> {
    check_same_shape(rho, sigma)?;
    let clip = T::of(SUPPORT_CLIP);
    let r = rho.density_matrix();
    let s = sigma.density_matrix();
    let (ws, vs) = hermitian_eig(&s);
    if mass_outside_support(&r, &ws, &vs, clip) > clip {
        return Ok(DivergenceResult::infinite(Method::Eigendecomposition));
    }
    let s_inv_half = hermitian_power(&s, -T::of(0.5), clip);
    let x = &s_inv_half * r * &s_inv_half;
    let (w, _) = hermitian_eig(&x);
    let top = w.first().copied().unwrap_or(T::zero());
    if top <= T::zero() {
        return Err(Error::InvalidState("rho has no weight on supp(sigma)".into()));
    }
    Ok(DivergenceResult::finite(top.log2(), Method::Eigendecomposition))
}

/// Min-relative entropy `-log2 Tr[Pi_rho sigma]`.
pub fn min_relative_entropy<T: Real>(
    rho: &RegisterState<T>,
    sigma: &RegisterState<T>,
) -> Result<DivergenceResult<T>> {
    check_same_shape(rho, sigma)?;
    let clip = T::of(SUPPORT_CLIP);
    let r = rho.density_matrix();
    let s = sigma.density_matrix();
    let (wr, vr) = hermitian_eig(&r);
    let mut overlap = T::zero();
    for (j, &wj) in wr.iter().enumerate() {
        if wj > clip {
            let col = vr.column(j);
            let mut q = T::zero();
            for a in 0..s.nrows() {
                let mut amp = Cx::new(T::zero(), T::zero());
                for b in 0..s.ncols() {
                    amp += s[(a, b)] * col[b];
                }
                q += (col[a].conj() * amp).re;
            }
            overlap += q;
        }
    }
    if overlap <= T::zero() {
        return Ok(DivergenceResult::infinite(Method::ClosedForm));
    }
    Ok(DivergenceResult::finite(-overlap.log2(), Method::ClosedForm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use crate::states::make_max_entangled;
    use crate::states::random::random_density;
    use crate::tensor::RegisterShape;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket0() -> RegisterState<f64> {
        RegisterState::basis_state(RegisterShape::new(vec![2]).unwrap(), 0).unwrap()
    }

    fn mixed(p: f64) -> RegisterState<f64> {
        let m = DMatrix::from_row_slice(2, 2, &[
            cx::<f64>(p, 0.0), cx(0.0, 0.0),
            cx(0.0, 0.0), cx(1.0 - p, 0.0),
        ]);
        RegisterState::density(RegisterShape::new(vec![2]).unwrap(), m).unwrap()
    }

    #[test]
    fn relative_entropy_self_is_zero() {
        let r = mixed(0.3);
        let d = relative_entropy(&r, &r).unwrap();
        assert!(d.value.expect_finite("D").abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_pure_vs_mixed() {
        // diagonal closed form: D(|0><0| || I/2) = log2 2 = 1
        let d = relative_entropy(&ket0(), &mixed(0.5)).unwrap();
        assert!((d.value.expect_finite("D") - 1.0).abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_support_violation_is_infinite() {
        let pure1 = RegisterState::<f64>::basis_state(RegisterShape::new(vec![2]).unwrap(), 1).unwrap();
        let sigma = RegisterState::density(
            RegisterShape::new(vec![2]).unwrap(),
            ket0().density_matrix(),
        )
        .unwrap();
        let d = relative_entropy(&pure1, &sigma).unwrap();
        assert!(d.value.is_infinite());
    }

    #[test]
    fn renyi_self_zero_and_alpha_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random_density::<f64, _>(vec![4], &mut rng);
        let sigma = random_density::<f64, _>(vec![4], &mut rng);
        for alpha in [0.5f64, 0.9, 2.0, 3.0] {
            let d = sandwiched_renyi(&rho, &rho, alpha).unwrap();
            assert!(d.value.expect_finite("D_a").abs() < 1e-9);
        }
        let lo = sandwiched_renyi(&rho, &sigma, 0.6).unwrap().value.expect_finite("lo");
        let hi = sandwiched_renyi(&rho, &sigma, 0.9).unwrap().value.expect_finite("hi");
        assert!(lo <= hi + 1e-10);
    }

    #[test]
    fn renyi_brackets_relative_entropy_near_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let rho = random_density::<f64, _>(vec![4], &mut rng);
            let sigma = random_density::<f64, _>(vec![4], &mut rng);
            let d = relative_entropy(&rho, &sigma).unwrap().value.expect_finite("D");
            let below = sandwiched_renyi(&rho, &sigma, 0.999).unwrap().value.expect_finite("lo");
            let above = sandwiched_renyi(&rho, &sigma, 1.001).unwrap().value.expect_finite("hi");
            assert!(below <= d + 1e-9 && d <= above + 1e-9);
            assert!((below - d).abs() < 1e-2 && (above - d).abs() < 1e-2);
        }
    }

    #[test]
    fn max_relative_entropy_values() {
        let r = mixed(0.3);
        assert!(max_relative_entropy(&r, &r).unwrap().value.expect_finite("Dmax").abs() < 1e-9);
        // ratio eigenvalue of |0><0| against I/2 is 2
        let d = max_relative_entropy(&ket0(), &mixed(0.5)).unwrap().value.expect_finite("Dmax");
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn max_relative_entropy_defining_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rho = random_density::<f64, _>(vec![3], &mut rng);
        let sigma = random_density::<f64, _>(vec![3], &mut rng);
        let lam = max_relative_entropy(&rho, &sigma).unwrap().value.expect_finite("Dmax");
        let check = |l: f64| -> bool {
            let m = sigma.density_matrix() * cx::<f64>(l.exp2(), 0.0) - rho.density_matrix();
            let (w, _) = hermitian_eig(&m);
            *w.last().unwrap() > -1e-9
        };
        assert!(check(lam + 1e-6));
        assert!(!check(lam - 0.01));
    }

    #[test]
    fn min_relative_entropy_values() {
        let r = mixed(0.3);
        assert!(min_relative_entropy(&r, &r).unwrap().value.expect_finite("Dmin").abs() < 1e-10);
        // <Phi+| dephased(Phi+) |Phi+> = 1/d
        for d in [2usize, 3] {
            let phi = make_max_entangled::<f64>(d).unwrap();
            let mut m = phi.density_matrix();
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    if r != c {
                        m[(r, c)] = cx(0.0, 0.0);
                    }
                }
            }
            let sigma_k = RegisterState::density(phi.shape().clone(), m).unwrap();
            let v = min_relative_entropy(&phi, &sigma_k).unwrap().value.expect_finite("Dmin");
            assert!((v - (d as f64).log2()).abs() < 1e-9);
        }
    }

    #[test]
    fn renyi_rejects_alpha_one() {
        let r = mixed(0.3);
        assert!(sandwiched_renyi(&r, &r, 1.0).is_err());
    }
}
