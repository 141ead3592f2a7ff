//! Key-rate machinery: Devetak-Winter rate, ensemble values of the key of
//! formation, the SDP dual certificate and yield-cost arithmetic.

use crate::error::{Error, Result};
use crate::report::BoundReport;
use crate::scalar::{c_zero, Cx, Real};
use crate::states::{
    check_strict_irreducibility, make_max_entangled, Ensemble, GeneralizedPrivateState,
    IrreducibilityVerdict,
};
use crate::tensor::{
    hermitian_eig, partial_trace, projective_measure, purify, trace_distance,
    von_neumann_entropy, RegisterState,
};
use nalgebra::{DMatrix, DVector};

/// Mutual information `I(X;Q)` of a cq ensemble via the Holevo form
/// `S(sum_i p_i rho_i) - sum_i p_i S(rho_i)`.
pub fn ccq_rate<T: Real>(
    probs: &[T],
    bob_states: &[RegisterState<T>],
    eve_states: &[RegisterState<T>],
) -> Result<T> {
    let i_xb = holevo(probs, bob_states)?;
    let i_xe = holevo(probs, eve_states)?;
    Ok(i_xb - i_xe)
}

fn holevo<T: Real>(probs: &[T], states: &[RegisterState<T>]) -> Result<T> {
    if probs.len() != states.len() || probs.is_empty() {
        return Err(Error::Ensemble("probability/state count mismatch".into()));
    }
    let mut avg = states[0].density_matrix() * Cx::new(probs[0], T::zero());
    for (p, s) in probs.iter().zip(states.iter()).skip(1) {
        avg += s.density_matrix() * Cx::new(*p, T::zero());
    }
    let avg_state =
        RegisterState::density_with_tol(states[0].shape().clone(), avg, T::of(1e-8))?;
    let mut cond = T::zero();
    for (p, s) in probs.iter().zip(states.iter()) {
        cond += *p * von_neumann_entropy(s, None)?;
    }
    Ok(von_neumann_entropy(&avg_state, None)? - cond)
}

/// Devetak-Winter rate `I(X;B) - I(X;E)` after measuring the key part of
/// Alice's side of the purified state in the Schmidt basis.
pub fn devetak_winter_rate<T: Real>(g: &GeneralizedPrivateState<T>) -> Result<T> {
    let expanded = g.expand()?;
    let pure = purify(&expanded)?; // subsystems (A_K, B_K, A_S, B_S, E)

    // measurement basis: Schmidt basis of A_K completed to a full basis
    let dim_a = g.key().dim_a();
    let mut basis: Vec<DVector<Cx<T>>> = g.key().basis_a().to_vec();
    complete_basis(&mut basis, dim_a);
    let outcomes = projective_measure(&pure, &basis, &[0])?;

    let mut probs = Vec::new();
    let mut bob = Vec::new();
    let mut eve = Vec::new();
    for o in outcomes {
        if o.probability <= T::of(1e-12) {
            continue;
        }
        let post = o.post_state.as_ref().expect("positive-probability outcome");
        probs.push(o.probability);
        bob.push(partial_trace(post, &[1, 3])?); // B_K, B_S
        eve.push(partial_trace(post, &[4])?); // E
    }
    ccq_rate(&probs, &bob, &eve)
}

/// Extend an orthonormal family to a full orthonormal basis (Gram-Schmidt
/// against the computational basis).
fn complete_basis<T: Real>(basis: &mut Vec<DVector<Cx<T>>>, dim: usize) {
    let mut k = 0usize;
    while basis.len() < dim && k < dim {
        let mut cand = DVector::from_element(dim, c_zero::<T>());
        cand[k] = Cx::new(T::one(), T::zero());
        for b in basis.iter() {
            let ip: Cx<T> = b.iter().zip(cand.iter()).map(|(x, y)| x.conj() * *y).sum();
            cand -= b * ip;
        }
        let norm = cand.norm();
        if norm > T::of(1e-6) {
            basis.push(cand.map(|z| z / Cx::new(norm, T::zero())));
        }
        k += 1;
    }
}

/// Ensemble value `sum_k p_k S_A(psi_k)`: an upper bound on the key of
/// formation of the mixture the ensemble reproduces.
///
/// Rejects ensembles whose members are not strictly irreducible or whose
/// mixture misses the declared target by more than `1e-9` in trace distance.
pub fn kf_ensemble_value<T: Real>(
    ensemble: &Ensemble<T>,
    target: &RegisterState<T>,
) -> Result<T> {
    for (k, (_, g)) in ensemble.members().iter().enumerate() {
        if check_strict_irreducibility(g)? == IrreducibilityVerdict::EntangledConditional {
            return Err(Error::Ensemble(format!(
                "member {k} has an entangled conditional shield"
            )));
        }
    }
    let mixture = ensemble.mixture()?;
    let mixture = mixture.reshaped(target.shape().clone())?;
    let dist = trace_distance(&mixture, target)?;
    if dist > T::of(1e-9) {
        return Err(Error::Ensemble(format!(
            "mixture misses the target by {} in trace distance",
            dist.to_f64_lossy()
        )));
    }
    Ok(ensemble
        .members()
        .iter()
        .map(|(p, g)| *p * g.key().entropy())
        .sum())
}

/// Dual feasible point for the hypothesis-testing SDP on a private state.
#[derive(Debug, Clone)]
pub struct DualCertificate<T: Real> {
    pub y: T,
    pub y_matrix: DMatrix<Cx<T>>,
    /// Objective `y (1 - eps) - Tr Y`.
    pub value: T,
    /// `Y >= (y Phi+ - sigma_k) x rho` up to 1e-10.
    pub feasible: bool,
}

/// Check feasibility and value of a candidate `(y, Y)` for key dimension
/// `d_k`, shield `rho` and error budget `eps`.
pub fn check_dual_certificate<T: Real>(
    y: T,
    y_matrix: DMatrix<Cx<T>>,
    d_k: usize,
    shield: &RegisterState<T>,
    epsilon: T,
) -> Result<DualCertificate<T>> {
    if y < T::zero() {
        return Err(Error::Domain("y must be non-negative".into()));
    }
    let phi = make_max_entangled::<T>(d_k)?.density_matrix();
    let kd = d_k * d_k;
    // sigma_k: the dephased maximally entangled state
    let mut sigma_k = DMatrix::from_element(kd, kd, c_zero::<T>());
    let w = Cx::new(T::one() / T::of_usize(d_k), T::zero());
    for i in 0..d_k {
        sigma_k[(i * d_k + i, i * d_k + i)] = w;
    }
    let inner = phi * Cx::new(y, T::zero()) - sigma_k;
    let rhs = inner.kronecker(&shield.density_matrix());
    let sd = shield.shape().ambient_dim();
    if y_matrix.nrows() != kd * sd || y_matrix.ncols() != kd * sd {
        return Err(Error::DimMismatch(format!(
            "Y is {}x{}, expected {}",
            y_matrix.nrows(),
            y_matrix.ncols(),
            kd * sd
        )));
    }
    let (w_y, _) = hermitian_eig(&y_matrix);
    if w_y.last().copied().unwrap_or(T::zero()) < -T::of(1e-10) {
        return Err(Error::Domain("Y must be PSD".into()));
    }
    let gap = &y_matrix - rhs;
    let (wg, _) = hermitian_eig(&gap);
    let feasible = wg.last().copied().unwrap_or(T::zero()) >= -T::of(1e-10);
    let mut tr_y = T::zero();
    for i in 0..y_matrix.nrows() {
        tr_y += y_matrix[(i, i)].re;
    }
    let value = y * (T::one() - epsilon) - tr_y;
    Ok(DualCertificate { y, y_matrix, value, feasible })
}

/// The certificate used in the lower-bound proof: `y = 1/d_k`, `Y = 0`,
/// value `(1 - eps)/d_k`.
pub fn dual_certificate_value<T: Real>(
    d_k: usize,
    shield: &RegisterState<T>,
    epsilon: T,
) -> Result<DualCertificate<T>> {
    let kd = d_k * d_k;
    let sd = shield.shape().ambient_dim();
    let zero = DMatrix::from_element(kd * sd, kd * sd, c_zero::<T>());
    check_dual_certificate(T::one() / T::of_usize(d_k), zero, d_k, shield, epsilon)
}

/// Yield-cost arithmetic on strictly irreducible private states: the
/// one-shot cost bracket and the distillation-vs-cost relation with its
/// `log2(1/(1 - eps1 - eps2))` correction.
pub fn yield_cost_bounds(d_k: usize, eps1: f64, eps2: f64) -> Result<Vec<BoundReport>> {
    if !(0.0..=1.0).contains(&eps1) || !(0.0..=1.0).contains(&eps2) || eps1 + eps2 >= 1.0 {
        return Err(Error::Domain(format!(
            "need eps1 + eps2 < 1 with both in [0,1], got {eps1} + {eps2}"
        )));
    }
    if d_k < 2 {
        return Err(Error::Domain("key dimension must be at least 2".into()));
    }
    let log_dk = (d_k as f64).log2();
    let correction = (1.0 / (1.0 - eps1 - eps2)).log2();
    let lower = log_dk - (1.0 / (1.0 - eps1)).log2();

    let bracket = BoundReport::new("key_cost_bracket", lower, log_dk, 1e-12)
        .with_param("d_k", serde_json::json!(d_k))
        .with_param("eps", serde_json::json!(eps1))
        .with_param("lower", serde_json::json!(lower))
        .with_param("upper", serde_json::json!(log_dk));
    // distillable key of the SIR state (log2 d_k) against cost + correction
    let relation = BoundReport::new("yield_cost", log_dk, log_dk + correction, 1e-12)
        .with_param("d_k", serde_json::json!(d_k))
        .with_param("eps1", serde_json::json!(eps1))
        .with_param("eps2", serde_json::json!(eps2))
        .with_param("correction", serde_json::json!(correction));
    Ok(vec![bracket, relation])
}
