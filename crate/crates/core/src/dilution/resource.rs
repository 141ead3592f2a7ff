//! The resource private state consumed by the dilution protocol: a maximally
//! entangled key of dimension `|A|^L` twisted per codeword rank with the
//! tensor-power shield.

use super::ProtocolConfig;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::states::{GeneralizedPrivateState, SchmidtState, TwistingUnitary};
use crate::tensor::{kron, kron_unitary, permute_subsystems, permute_unitary_subsystems, RegisterShape, RegisterState, UnitaryOperator};
use crate::typ::{Codec, TypicalWord};

/// Shield cell content tracked by the symbolic backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellLabel {
    /// `U_a rho U_a^dag` sits in the cell.
    Twisted(u8),
    /// The untouched shield state `rho`.
    Plain,
    /// The blank filler.
    Blank,
}

/// Resource state descriptor: key dimension, codec and per-rank twist labels.
#[derive(Debug, Clone)]
pub struct ResourcePrivateState {
    codec: Codec,
    d_n: u128,
}

impl ResourcePrivateState {
    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    pub fn d_n(&self) -> u128 {
        self.d_n
    }

    pub fn code_len(&self) -> usize {
        self.codec.code_len()
    }

    /// Key bits `log2 d_n = L log2 |A|` consumed when the state is used up.
    pub fn key_bits(&self) -> f64 {
        self.codec.code_len() as f64 * (self.codec.alphabet_size() as f64).log2()
    }

    /// Twist labels of the shield cells for a given key rank: typical ranks
    /// carry the per-symbol twists, overflow ranks leave the shield plain.
    pub fn block_labels(&self, rank: usize) -> Vec<CellLabel> {
        let n = self.codec.typical().spec().n();
        match self.codec.typical().member(rank) {
            Some(seq) => seq.iter().map(|&a| CellLabel::Twisted(a)).collect(),
            None => vec![CellLabel::Plain; n],
        }
    }

    pub fn word_of_rank(&self, rank: usize) -> TypicalWord {
        match self.codec.typical().member(rank) {
            Some(seq) => TypicalWord::Member(seq.clone()),
            None => TypicalWord::Overflow(rank),
        }
    }
}

/// Build the resource descriptor; fails when the codec cannot be lossless.
pub fn build_resource_state<T: Real>(cfg: &ProtocolConfig<T>) -> Result<ResourcePrivateState> {
    let codec = cfg.build_codec()?;
    let d_n = codec.codeword_count();
    Ok(ResourcePrivateState { codec, d_n })
}

/// Dense expansion of the resource state at micro scale, as a generalized
/// private state with key `Phi+_{d_n}` and shield `rho^{x n}` regrouped to
/// the (A-side : B-side) split.
pub fn expand_resource_dense<T: Real>(
    cfg: &ProtocolConfig<T>,
    resource: &ResourcePrivateState,
) -> Result<GeneralizedPrivateState<T>> {
    let n = cfg.source().n();
    let d_n = resource.d_n;
    if d_n > 64 {
        return Err(Error::CapacityExceeded(format!("dense resource with d_n = {d_n}")));
    }
    let (sa, sb) = cfg.gps().shield_split();
    let ambient = (d_n as usize).pow(2) as u128 * (sa * sb).pow(n as u32) as u128;
    if ambient > 1 << 16 {
        return Err(Error::CapacityExceeded(format!("dense resource ambient {ambient}")));
    }

    // shield rho^{x n} on (A_S B_S)^n, regrouped to (A_S^n, B_S^n)
    let single = cfg.gps().shield().clone();
    let mut shield = single.clone();
    for _ in 1..n {
        shield = kron(&shield, &single);
    }
    let (shield, regroup_perm) = regroup_cells(shield, n, sa, sb)?;

    let shield_shape_joint = RegisterShape::new(vec![sa.pow(n as u32), sb.pow(n as u32)])?;
    let shield = shield.reshaped(shield_shape_joint.clone())?;

    let mut blocks = Vec::with_capacity(d_n as usize);
    for rank in 0..d_n as usize {
        let labels = resource.block_labels(rank);
        let mut op: Option<UnitaryOperator<T>> = None;
        for label in &labels {
            let factor = match label {
                CellLabel::Twisted(a) => cfg.gps().twist().blocks()[*a as usize].clone(),
                CellLabel::Plain => UnitaryOperator::identity(cfg.gps().shield().shape().clone()),
                CellLabel::Blank => unreachable!("resource cells are never blank"),
            };
            op = Some(match op {
                None => factor,
                Some(prev) => kron_unitary(&prev, &factor),
            });
        }
        let op = op.expect("n >= 1");
        let op = op.adjusted_shape(vec![sa, sb].repeat(n))?;
        let moved = permute_unitary_subsystems(&op, &regroup_perm)?;
        blocks.push(moved.adjusted_shape(shield_shape_joint.dims().to_vec())?);
    }

    GeneralizedPrivateState::new(
        SchmidtState::uniform(d_n as usize)?,
        shield,
        TwistingUnitary::new(blocks)?,
        (sa.pow(n as u32), sb.pow(n as u32)),
    )
}

/// Permutation regrouping `(A_S B_S)^n` into `(A_S^n, B_S^n)`.
fn regroup_cells<T: Real>(
    state: RegisterState<T>,
    n: usize,
    _sa: usize,
    _sb: usize,
) -> Result<(RegisterState<T>, Vec<usize>)> {
    // source subsystems: [A1, B1, A2, B2, ...]; target [A1..An, B1..Bn]
    let mut perm = Vec::with_capacity(2 * n);
    for i in 0..n {
        perm.push(2 * i);
    }
    for i in 0..n {
        perm.push(2 * i + 1);
    }
    Ok((permute_subsystems(&state, &perm)?, perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilution::{Backend, ProtocolConfig};
    use crate::scalar::cx;
    use crate::states::{check_strict_irreducibility, make_max_entangled, IrreducibilityVerdict};
    use crate::tensor::trace_distance;
    use crate::typ::Rational;
    use nalgebra::DMatrix;

    fn phase_twist_cfg(n: usize) -> ProtocolConfig<f64> {
        // |A| = 2, d_s = 1, twist blocks are phases
        ProtocolConfig::builder()
            .uniform_source(2, n, Rational::from_integer(1))
            .phase_twists(&[0.0, 1.234])
            .backend(Backend::Symbolic)
            .build()
            .unwrap()
    }

    #[test]
    fn single_copy_resource_has_two_blocks() {
        let cfg = phase_twist_cfg(1);
        let res = build_resource_state(&cfg).unwrap();
        assert_eq!(res.d_n(), 2);
        assert_eq!(res.code_len(), 1);
        assert_eq!(res.block_labels(0), vec![CellLabel::Twisted(0)]);
        assert_eq!(res.block_labels(1), vec![CellLabel::Twisted(1)]);
    }

    #[test]
    fn trivial_shield_resource_is_max_entangled() {
        // with a scalar shield and trivial twists the dense resource state is
        // exactly Phi+_{d_n} (up to the trivial shield factor)
        let cfg = ProtocolConfig::builder()
            .uniform_source(2, 2, Rational::from_integer(1))
            .phase_twists(&[0.0, 0.0])
            .backend(Backend::Dense)
            .build()
            .unwrap();
        let res = build_resource_state(&cfg).unwrap();
        assert_eq!(res.d_n(), 4);
        let dense = expand_resource_dense(&cfg, &res).unwrap();
        let expanded = dense.expand().unwrap();
        let phi = make_max_entangled::<f64>(4).unwrap();
        // strip the scalar shield subsystems
        let stripped = expanded
            .reshaped(crate::tensor::RegisterShape::new(vec![4, 4]).unwrap())
            .unwrap();
        assert!(trace_distance(&stripped, &phi).unwrap() < 1e-12);
    }

    #[test]
    fn strict_irreducibility_inherited_at_micro_scale() {
        // one qubit shield per side, X-twist: conditionals stay separable
        let shield_shape = crate::tensor::RegisterShape::new(vec![2, 1]).unwrap();
        let sigma = DMatrix::from_row_slice(2, 2, &[
            cx::<f64>(0.5, 0.0), cx(0.0, 0.0),
            cx(0.0, 0.0), cx(0.5, 0.0),
        ]);
        let shield = RegisterState::density(shield_shape.clone(), sigma).unwrap();
        let x = UnitaryOperator::new(
            shield_shape.clone(),
            DMatrix::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)]),
        )
        .unwrap();
        let twist = TwistingUnitary::new(vec![UnitaryOperator::identity(shield_shape), x]).unwrap();
        let cfg = ProtocolConfig::builder()
            .uniform_source(2, 2, Rational::from_integer(1))
            .shield_and_twist(shield, twist)
            .backend(Backend::Dense)
            .build()
            .unwrap();
        let res = build_resource_state(&cfg).unwrap();
        let dense = expand_resource_dense(&cfg, &res).unwrap();
        assert_ne!(
            check_strict_irreducibility(&dense).unwrap(),
            IrreducibilityVerdict::EntangledConditional
        );
    }
}
