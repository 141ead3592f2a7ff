//! The privacy dilution protocol on two backends: a symbolic labelled-branch
//! engine that scales to a dozen copies, and a dense amplitude-level oracle
//! at micro scale. Both run the same eight steps; the three correction
//! subroutines (cell permutation, phase correction, uncomputation) act inside
//! step seven.

mod compare;
mod dense;
mod formation;
mod resource;
mod symbolic;

pub use compare::{compare_to_target, ComparisonRecord};
pub use dense::{dense_oracle_run, DenseComparison};
pub use formation::{formation_protocol_run, FormationConfig, FormationReport};
pub use resource::{build_resource_state, expand_resource_dense, CellLabel, ResourcePrivateState};
pub use symbolic::{AncillaRegs, Branch, BranchState, RegContent, Stage};

use crate::error::{Error, Result};
use crate::scalar::{cx, Real};
use crate::states::{GeneralizedPrivateState, SchmidtState, TwistingUnitary};
use crate::tensor::{RegisterShape, RegisterState, UnitaryOperator};
use crate::typ::{Rational, SourceSpec};
use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Which engine executes the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Symbolic,
    Dense,
}

/// Protocol steps. `Permute`, `PhaseCorrect` and `UncomputePermute` are the
/// three subroutines of step seven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Superpose,
    Compress,
    XorAbort,
    Announce,
    Shift,
    Decompress,
    Permute,
    PhaseCorrect,
    UncomputePermute,
    RotateBasis,
}

/// Deliberate fault injection for harness self-tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultSpec {
    /// Flip one shield cell label on one branch after uncomputation.
    FlipShieldLabel { branch: usize, cell: usize },
}

/// Full protocol configuration.
#[derive(Debug, Clone)]
pub struct ProtocolConfig<T: Real> {
    source: SourceSpec,
    eta: Option<f64>,
    gps: GeneralizedPrivateState<T>,
    seed: u64,
    backend: Backend,
    fault: Option<FaultSpec>,
    max_outcomes: usize,
}

impl<T: Real> ProtocolConfig<T> {
    pub fn builder() -> ProtocolConfigBuilder<T> {
        ProtocolConfigBuilder::default()
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    pub fn eta(&self) -> Option<f64> {
        self.eta
    }

    pub fn gps(&self) -> &GeneralizedPrivateState<T> {
        &self.gps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn fault(&self) -> Option<FaultSpec> {
        self.fault
    }

    pub fn build_codec(&self) -> Result<crate::typ::Codec> {
        let typical = crate::typ::enumerate_typical_set(&self.source)?;
        crate::typ::Codec::new(typical, self.eta)
    }

    /// Nominal entanglement assistance `ceil(4 delta n)` in qubit units.
    pub fn nominal_ebits(&self) -> usize {
        let four_dn = self.source.delta()
            * Rational::from_integer(4 * self.source.n() as i64);
        four_dn.ceil().to_integer().to_usize().expect("fits usize")
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolConfigBuilder<T: Real> {
    source: Option<SourceSpec>,
    eta: Option<f64>,
    shield: Option<RegisterState<T>>,
    twist: Option<TwistingUnitary<T>>,
    seed: u64,
    backend: Backend,
    fault: Option<FaultSpec>,
    max_outcomes: usize,
}

impl<T: Real> Default for ProtocolConfigBuilder<T> {
    fn default() -> Self {
        Self {
            source: None,
            eta: None,
            shield: None,
            twist: None,
            seed: 0,
            backend: Backend::Symbolic,
            fault: None,
            max_outcomes: 16,
        }
    }
}

impl<T: Real> ProtocolConfigBuilder<T> {
    pub fn source(mut self, spec: SourceSpec) -> Self {
        self.source = Some(spec);
        self
    }

    pub fn uniform_source(mut self, k: usize, n: usize, delta: Rational) -> Self {
        self.source = Some(SourceSpec::uniform(k, n, delta).expect("valid uniform source"));
        self
    }

    /// Scalar shield with phase twist blocks `e^{i theta_a}`.
    pub fn phase_twists(mut self, thetas: &[f64]) -> Self {
        let shape = RegisterShape::new(vec![1, 1]).expect("scalar shield");
        let shield = RegisterState::density(
            shape.clone(),
            DMatrix::from_element(1, 1, cx::<T>(1.0, 0.0)),
        )
        .expect("scalar shield state");
        let blocks = thetas
            .iter()
            .map(|&th| {
                let z = cx::<T>(th.cos(), th.sin());
                UnitaryOperator::new(shape.clone(), DMatrix::from_element(1, 1, z))
                    .expect("phase is unitary")
            })
            .collect();
        self.shield = Some(shield);
        self.twist = Some(TwistingUnitary::new(blocks).expect("non-empty blocks"));
        self
    }

    pub fn shield_and_twist(mut self, shield: RegisterState<T>, twist: TwistingUnitary<T>) -> Self {
        self.shield = Some(shield);
        self.twist = Some(twist);
        self
    }

    pub fn eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn fault(mut self, fault: FaultSpec) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn max_outcomes(mut self, m: usize) -> Self {
        self.max_outcomes = m.max(1);
        self
    }

    pub fn build(self) -> Result<ProtocolConfig<T>> {
        let source = self.source.ok_or_else(|| Error::Config("source spec required".into()))?;
        let shield = self.shield.ok_or_else(|| Error::Config("shield required".into()))?;
        let twist = self.twist.ok_or_else(|| Error::Config("twist required".into()))?;
        if twist.control_dim() != source.alphabet_size() {
            return Err(Error::Config(format!(
                "{} twist blocks for alphabet size {}",
                twist.control_dim(),
                source.alphabet_size()
            )));
        }
        let coeffs: Vec<T> = source
            .probs()
            .iter()
            .map(|p| T::of(p.to_f64().expect("prob fits f64")))
            .collect();
        // re-normalize the float image of the exact probabilities
        let total: T = coeffs.iter().copied().sum();
        let coeffs: Vec<T> = coeffs.into_iter().map(|c| c / total).collect();
        let key = SchmidtState::from_probs(coeffs)?;
        let dims = shield.shape().dims().to_vec();
        if dims.len() != 2 {
            return Err(Error::Config("shield must carry an (A_S, B_S) split".into()));
        }
        let gps = GeneralizedPrivateState::new(key, shield, twist, (dims[0], dims[1]))?;
        Ok(ProtocolConfig {
            source,
            eta: self.eta,
            gps,
            seed: self.seed,
            backend: self.backend,
            fault: self.fault,
            max_outcomes: self.max_outcomes,
        })
    }
}

/// Resource and error accounting of one protocol run.
#[derive(Debug, Clone, Serialize)]
pub struct DilutionReport {
    pub backend: Backend,
    pub n: usize,
    pub alphabet_size: usize,
    pub code_len: usize,
    pub d_n: f64,
    /// `log2 d_n = L log2 |A|` bits of private key consumed.
    pub key_bits_consumed: f64,
    /// Teleported cells: `2 l_max` per run (both directions).
    pub ebit_cells: usize,
    /// Dimension of one teleported half-cell including the blank sector.
    pub cell_dim: usize,
    /// Qubit-count of the teleported cells, `2 l_max log2(cell_dim)`.
    pub ebit_qubits: f64,
    /// The nominal assistance `ceil(4 delta n)` quoted by the rate statement.
    pub nominal_ebits: usize,
    pub trace_distance_to_target: f64,
    pub trace_distance_typical: f64,
    pub ancilla_restored: bool,
    pub x_independent: bool,
    /// Exact abort-branch mass `1 - N`.
    pub failure_probability: f64,
    pub outcomes_checked: usize,
    pub structural_errors: Vec<String>,
}

/// Run the full eight-step protocol on the symbolic backend, checking every
/// announced outcome (all of them when `d_n <= 64`, a seeded sample
/// otherwise).
pub fn run_protocol<T: Real>(cfg: &ProtocolConfig<T>) -> Result<DilutionReport> {
    match cfg.backend {
        Backend::Symbolic => run_symbolic(cfg),
        Backend::Dense => {
            let cmp = dense_oracle_run(cfg)?;
            Ok(cmp.report)
        }
    }
}

fn run_symbolic<T: Real>(cfg: &ProtocolConfig<T>) -> Result<DilutionReport> {
    let resource = build_resource_state(cfg)?;
    if resource.codec().typical().len() > 4096 {
        return Err(Error::CapacityExceeded(format!(
            "{} typical branches exceed the symbolic guard",
            resource.codec().typical().len()
        )));
    }
    let outcomes = pick_outcomes(cfg, resource.d_n());
    let mut finals: Vec<BranchState<T>> = Vec::with_capacity(outcomes.len());
    for &xv in &outcomes {
        let mut state = symbolic::initial_state(cfg, &resource)?;
        state = symbolic::run_step(cfg, &resource, &state, Step::Superpose)?;
        state = symbolic::run_step(cfg, &resource, &state, Step::Compress)?;
        state = symbolic::run_step(cfg, &resource, &state, Step::XorAbort)?;
        state = symbolic::announce(cfg, &resource, &state, xv)?;
        for step in [
            Step::Shift,
            Step::Decompress,
            Step::Permute,
            Step::PhaseCorrect,
            Step::UncomputePermute,
            Step::RotateBasis,
        ] {
            state = symbolic::run_step(cfg, &resource, &state, step)?;
        }
        if let Some(FaultSpec::FlipShieldLabel { branch, cell }) = cfg.fault {
            symbolic::inject_label_fault(&mut state, branch, cell);
        }
        finals.push(state);
    }

    let x_independent = symbolic::all_equal(&finals);
    let first = finals.first().ok_or_else(|| Error::Config("no outcomes".into()))?;
    let record = compare_to_target(cfg, &resource, first)?;

    let l_max = cfg.source().l_max();
    let cell_dim = cfg.gps().shield_split().0 + 1;
    Ok(DilutionReport {
        backend: Backend::Symbolic,
        n: cfg.source().n(),
        alphabet_size: cfg.source().alphabet_size(),
        code_len: resource.code_len(),
        d_n: resource.d_n() as f64,
        key_bits_consumed: resource.key_bits(),
        ebit_cells: 2 * l_max,
        cell_dim,
        ebit_qubits: 2.0 * l_max as f64 * (cell_dim as f64).log2(),
        nominal_ebits: cfg.nominal_ebits(),
        trace_distance_to_target: record.distance_exact,
        trace_distance_typical: record.distance_typical,
        ancilla_restored: record.ancilla_restored,
        x_independent,
        failure_probability: record.failure_probability,
        outcomes_checked: outcomes.len(),
        structural_errors: record.structural_errors,
    })
}

fn pick_outcomes<T: Real>(cfg: &ProtocolConfig<T>, d_n: u128) -> Vec<u128> {
    if d_n <= 64 {
        (0..d_n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..cfg.max_outcomes)
            .map(|_| {
                let hi = rng.gen::<u64>() as u128;
                let lo = rng.gen::<u64>() as u128;
                ((hi << 64) | lo) % d_n
            })
            .collect()
    }
}
