//! The paper's state families: Schmidt data, twisting unitaries, generalized
//! private states, ensembles and device behaviors.

mod behavior;
mod families;
pub mod random;
mod sir;

pub use behavior::{behavior_from_realization, chsh_value, Behavior};
pub use families::{
    make_flower_state, make_generalized_private_state, make_max_entangled, make_private_state,
};
pub use sir::{
    check_strict_irreducibility, partial_transpose, sigma_ansatz, tensor_sir,
    IrreducibilityVerdict,
};

use crate::error::{Error, Result};
use crate::scalar::{c_zero, Cx, Real};
use crate::tensor::{RegisterShape, RegisterState, UnitaryOperator};
use nalgebra::{DMatrix, DVector};

/// Schmidt decomposition data of a pure bipartite key state.
///
/// `coeffs` are the Schmidt probabilities (they sum to one); the amplitudes
/// are their square roots.
#[derive(Debug, Clone)]
pub struct SchmidtState<T: Real> {
    coeffs: Vec<T>,
    basis_a: Vec<DVector<Cx<T>>>,
    basis_b: Vec<DVector<Cx<T>>>,
}

impl<T: Real> SchmidtState<T> {
    pub fn new(
        coeffs: Vec<T>,
        basis_a: Vec<DVector<Cx<T>>>,
        basis_b: Vec<DVector<Cx<T>>>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidState("empty Schmidt spectrum".into()));
        }
        if coeffs.iter().any(|&c| c <= T::zero()) {
            return Err(Error::InvalidState("Schmidt coefficients must be positive".into()));
        }
        let total: T = coeffs.iter().copied().sum();
        if (total - T::one()).abs() > T::of(1e-12) {
            return Err(Error::InvalidState(format!(
                "Schmidt coefficients sum to {}",
                total.to_f64_lossy()
            )));
        }
        if basis_a.len() != coeffs.len() || basis_b.len() != coeffs.len() {
            return Err(Error::InvalidState("basis count != coefficient count".into()));
        }
        validate_orthonormal(&basis_a, "basisA")?;
        validate_orthonormal(&basis_b, "basisB")?;
        Ok(Self { coeffs, basis_a, basis_b })
    }

    /// Computational-basis Schmidt state with the given probabilities.
    pub fn from_probs(coeffs: Vec<T>) -> Result<Self> {
        let k = coeffs.len();
        let basis: Vec<DVector<Cx<T>>> = (0..k)
            .map(|i| {
                let mut v = DVector::from_element(k, c_zero::<T>());
                v[i] = Cx::new(T::one(), T::zero());
                v
            })
            .collect();
        Self::new(coeffs, basis.clone(), basis)
    }

    /// Uniform Schmidt spectrum of rank `d` (the maximally entangled key).
    pub fn uniform(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("Schmidt rank must be >= 2, got {d}")));
        }
        Self::from_probs(vec![T::one() / T::of_usize(d); d])
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn basis_a(&self) -> &[DVector<Cx<T>>] {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &[DVector<Cx<T>>] {
        &self.basis_b
    }

    pub fn dim_a(&self) -> usize {
        self.basis_a[0].len()
    }

    pub fn dim_b(&self) -> usize {
        self.basis_b[0].len()
    }

    /// Local entropy of either marginal, in bits.
    pub fn entropy(&self) -> T {
        crate::tensor::shannon_entropy(&self.coeffs)
    }

    /// The pure key state as a register state over (A_K, B_K).
    pub fn vector(&self) -> Result<RegisterState<T>> {
        let (da, db) = (self.dim_a(), self.dim_b());
        let mut amps = DVector::from_element(da * db, c_zero::<T>());
        for ((c, ea), fb) in self.coeffs.iter().zip(&self.basis_a).zip(&self.basis_b) {
            let amp = Cx::new(c.sqrt(), T::zero());
            for r in 0..da {
                for s in 0..db {
                    amps[r * db + s] += amp * ea[r] * fb[s];
                }
            }
        }
        RegisterState::pure(RegisterShape::new(vec![da, db])?, amps)
    }
}

fn validate_orthonormal<T: Real>(vs: &[DVector<Cx<T>>], what: &str) -> Result<()> {
    let dim = vs[0].len();
    for (i, v) in vs.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::InvalidState(format!("{what}[{i}] dimension mismatch")));
        }
        if (v.norm() - T::one()).abs() > T::of(1e-10) {
            return Err(Error::InvalidState(format!("{what}[{i}] is not normalized")));
        }
        for (j, w) in vs.iter().enumerate().take(i) {
            let ip: Cx<T> = v.iter().zip(w.iter()).map(|(x, y)| x.conj() * *y).sum();
            if T::cx_abs(ip) > T::of(1e-10) {
                return Err(Error::InvalidState(format!("{what}[{j}],[{i}] not orthogonal")));
            }
        }
    }
    Ok(())
}

/// Controlled-unitary twist: block `i` acts on the joint shield when the key
/// reads `i` in the Schmidt bases.
#[derive(Debug, Clone)]
pub struct TwistingUnitary<T: Real> {
    blocks: Vec<UnitaryOperator<T>>,
}

impl<T: Real> TwistingUnitary<T> {
    pub fn new(blocks: Vec<UnitaryOperator<T>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidState("twist needs at least one block".into()));
        }
        let dims = blocks[0].shape().dims().to_vec();
        for (i, b) in blocks.iter().enumerate() {
            if b.shape().dims() != dims {
                return Err(Error::DimMismatch(format!("twist block {i} shape differs")));
            }
        }
        Ok(Self { blocks })
    }

    /// Identity blocks (no twisting) over the given shield shape.
    pub fn trivial(control_dim: usize, shield_shape: RegisterShape) -> Self {
        let blocks = (0..control_dim)
            .map(|_| UnitaryOperator::identity(shield_shape.clone()))
            .collect();
        Self { blocks }
    }

    pub fn control_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[UnitaryOperator<T>] {
        &self.blocks
    }
}

/// A (generalized) private state in canonical form: Schmidt key, shield state
/// over A_S x B_S and the twisting blocks.
#[derive(Debug, Clone)]
pub struct GeneralizedPrivateState<T: Real> {
    key: SchmidtState<T>,
    shield: RegisterState<T>,
    twist: TwistingUnitary<T>,
    shield_split: (usize, usize),
}

impl<T: Real> GeneralizedPrivateState<T> {
    pub fn new(
        key: SchmidtState<T>,
        shield: RegisterState<T>,
        twist: TwistingUnitary<T>,
        shield_split: (usize, usize),
    ) -> Result<Self> {
        if twist.control_dim() != key.rank() {
            return Err(Error::DimMismatch(format!(
                "twist has {} blocks for Schmidt rank {}",
                twist.control_dim(),
                key.rank()
            )));
        }
        let (da, db) = shield_split;
        if shield.shape().ambient_dim() != da * db {
            return Err(Error::DimMismatch(format!(
                "shield dimension {} vs split {da}x{db}",
                shield.shape().ambient_dim()
            )));
        }
        if twist.blocks()[0].shape().ambient_dim() != da * db {
            return Err(Error::DimMismatch("twist blocks do not match the shield".into()));
        }
        Ok(Self { key, shield, twist, shield_split })
    }

    pub fn key(&self) -> &SchmidtState<T> {
        &self.key
    }

    pub fn shield(&self) -> &RegisterState<T> {
        &self.shield
    }

    pub fn twist(&self) -> &TwistingUnitary<T> {
        &self.twist
    }

    pub fn shield_split(&self) -> (usize, usize) {
        self.shield_split
    }

    pub fn key_dim(&self) -> usize {
        self.key.rank()
    }

    /// Conditional shield state `U_i rho U_i^dag` as a raw matrix.
    pub fn conditional_shield(&self, i: usize) -> DMatrix<Cx<T>> {
        let u = self.twist.blocks()[i].matrix();
        u * self.shield.density_matrix() * u.adjoint()
    }

    /// Dense expansion over subsystems (A_K, B_K, A_S, B_S).
    pub fn expand(&self) -> Result<RegisterState<T>> {
        let (da, db) = (self.key.dim_a(), self.key.dim_b());
        let (sa, sb) = self.shield_split;
        let kd = da * db;
        let sd = sa * sb;
        let mut out = DMatrix::from_element(kd * sd, kd * sd, c_zero::<T>());
        let rho = self.shield.density_matrix();
        let blocks: Vec<&DMatrix<Cx<T>>> =
            self.twist.blocks().iter().map(|u| u.matrix()).collect();
        let rotated: Vec<DMatrix<Cx<T>>> = blocks.iter().map(|u| *u * &rho).collect();
        for i in 0..self.key.rank() {
            for j in 0..self.key.rank() {
                let w = Cx::new((self.key.coeffs[i] * self.key.coeffs[j]).sqrt(), T::zero());
                // key-part dyad |e_i f_i><e_j f_j|
                let mut key_vec_i = DVector::from_element(kd, c_zero::<T>());
                let mut key_vec_j = DVector::from_element(kd, c_zero::<T>());
                for r in 0..da {
                    for s in 0..db {
                        key_vec_i[r * db + s] = self.key.basis_a[i][r] * self.key.basis_b[i][s];
                        key_vec_j[r * db + s] = self.key.basis_a[j][r] * self.key.basis_b[j][s];
                    }
                }
                let shield_block = &rotated[i] * blocks[j].adjoint();
                for kr in 0..kd {
                    for kc in 0..kd {
                        let kv = key_vec_i[kr] * key_vec_j[kc].conj();
                        if kv == c_zero::<T>() {
                            continue;
                        }
                        for sr in 0..sd {
                            for sc in 0..sd {
                                out[(kr * sd + sr, kc * sd + sc)] +=
                                    w * kv * shield_block[(sr, sc)];
                            }
                        }
                    }
                }
            }
        }
        let shape = RegisterShape::new(vec![da, db, sa, sb])?;
        RegisterState::density_with_tol(shape, out, T::of(1e-9))
    }

    /// Entropy (bits) of the reduction to Alice's side (A_K, A_S).
    pub fn alice_entropy(&self) -> Result<T> {
        let full = self.expand()?;
        crate::tensor::von_neumann_entropy(&full, Some(&[0, 2]))
    }
}

/// An ensemble of generalized private states with mixing probabilities.
#[derive(Debug, Clone)]
pub struct Ensemble<T: Real> {
    members: Vec<(T, GeneralizedPrivateState<T>)>,
}

impl<T: Real> Ensemble<T> {
    /// Builds an ensemble; `local_dims` are the (|A|, |B|) dimensions of the
    /// mixture it decomposes, used for the Caratheodory cap
    /// `(|A| |B|)^2 + 1` on the member count.
    pub fn new(
        members: Vec<(T, GeneralizedPrivateState<T>)>,
        local_dims: (usize, usize),
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Ensemble("empty ensemble".into()));
        }
        let cap = (local_dims.0 * local_dims.1).pow(2) + 1;
        if members.len() > cap {
            return Err(Error::Ensemble(format!(
                "{} members exceed the cap {cap} for local dims {:?}",
                members.len(),
                local_dims
            )));
        }
        let total: T = members.iter().map(|(p, _)| *p).sum();
        if (total - T::one()).abs() > T::of(1e-12) {
            return Err(Error::Ensemble(format!(
                "probabilities sum to {}",
                total.to_f64_lossy()
            )));
        }
        if members.iter().any(|(p, _)| *p <= T::zero()) {
            return Err(Error::Ensemble("probabilities must be positive".into()));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(T, GeneralizedPrivateState<T>)] {
        &self.members
    }

    /// Dense mixture of the expanded members (shapes must agree).
    pub fn mixture(&self) -> Result<RegisterState<T>> {
        let first = self.members[0].1.expand()?;
        let mut acc = first.density_matrix() * Cx::new(self.members[0].0, T::zero());
        for (p, g) in &self.members[1..] {
            let m = g.expand()?;
            if m.shape().dims() != first.shape().dims() {
                return Err(Error::Ensemble("members have different expanded shapes".into()));
            }
            acc += m.density_matrix() * Cx::new(*p, T::zero());
        }
        RegisterState::density_with_tol(first.shape().clone(), acc, T::of(1e-9))
    }
}
