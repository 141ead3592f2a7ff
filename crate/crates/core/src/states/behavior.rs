//! Device behaviors P(ab|xy) obtained from a state and local measurements.

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};
use crate::tensor::{hermitian_eig, RegisterState};
use nalgebra::DMatrix;

/// Conditional probability table P(ab|xy), stored as a 4-index array with
/// layout `[a][b][x][y]` flattened row-major.
#[derive(Debug, Clone)]
pub struct Behavior<T: Real> {
    outcomes_a: usize,
    outcomes_b: usize,
    inputs_x: usize,
    inputs_y: usize,
    table: Vec<T>,
}

impl<T: Real> Behavior<T> {
    pub fn new(
        outcomes_a: usize,
        outcomes_b: usize,
        inputs_x: usize,
        inputs_y: usize,
        table: Vec<T>,
    ) -> Result<Self> {
        if table.len() != outcomes_a * outcomes_b * inputs_x * inputs_y {
            return Err(Error::DimMismatch("behavior table size mismatch".into()));
        }
        if table.iter().any(|&p| p < -T::of(1e-10)) {
            return Err(Error::InvalidState("behavior has negative entries".into()));
        }
        let b = Self { outcomes_a, outcomes_b, inputs_x, inputs_y, table };
        for x in 0..inputs_x {
            for y in 0..inputs_y {
                let mut total = T::zero();
                for a in 0..outcomes_a {
                    for bb in 0..outcomes_b {
                        total += b.prob(a, bb, x, y);
                    }
                }
                if (total - T::one()).abs() > T::of(1e-10) {
                    return Err(Error::InvalidState(format!(
                        "P(..|{x}{y}) sums to {}",
                        total.to_f64_lossy()
                    )));
                }
            }
        }
        Ok(b)
    }

    pub fn prob(&self, a: usize, b: usize, x: usize, y: usize) -> T {
        let idx = ((a * self.outcomes_b + b) * self.inputs_x + x) * self.inputs_y + y;
        self.table[idx]
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.outcomes_a, self.outcomes_b, self.inputs_x, self.inputs_y)
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    /// Largest deviation of either party's marginal from input-independence.
    pub fn signaling_defect(&self) -> T {
        let mut worst = T::zero();
        // Alice's marginal must not depend on y
        for x in 0..self.inputs_x {
            for a in 0..self.outcomes_a {
                let mut per_y = Vec::with_capacity(self.inputs_y);
                for y in 0..self.inputs_y {
                    let mut m = T::zero();
                    for b in 0..self.outcomes_b {
                        m += self.prob(a, b, x, y);
                    }
                    per_y.push(m);
                }
                for w in per_y.windows(2) {
                    worst = worst.max((w[0] - w[1]).abs());
                }
            }
        }
        // Bob's marginal must not depend on x
        for y in 0..self.inputs_y {
            for b in 0..self.outcomes_b {
                let mut per_x = Vec::with_capacity(self.inputs_x);
                for x in 0..self.inputs_x {
                    let mut m = T::zero();
                    for a in 0..self.outcomes_a {
                        m += self.prob(a, b, x, y);
                    }
                    per_x.push(m);
                }
                for w in per_x.windows(2) {
                    worst = worst.max((w[0] - w[1]).abs());
                }
            }
        }
        worst
    }
}

fn validate_povm<T: Real>(povm: &[DMatrix<Cx<T>>], dim: usize, who: &str) -> Result<()> {
    let mut sum = DMatrix::from_element(dim, dim, Cx::new(T::zero(), T::zero()));
    for (k, e) in povm.iter().enumerate() {
        if e.nrows() != dim || e.ncols() != dim {
            return Err(Error::InvalidPovm(format!("{who} element {k} has wrong dimension")));
        }
        let (w, _) = hermitian_eig(e);
        if let Some(min) = w.last() {
            if *min < -T::of(1e-10) {
                return Err(Error::InvalidPovm(format!(
                    "{who} element {k} is not PSD (min eigenvalue {})",
                    min.to_f64_lossy()
                )));
            }
        }
        sum += e;
    }
    let defect = (&sum - DMatrix::identity(dim, dim)).norm();
    if defect > T::of(1e-10) * T::of_usize(dim) {
        return Err(Error::InvalidPovm(format!(
            "{who} elements sum to identity up to {}",
            defect.to_f64_lossy()
        )));
    }
    Ok(())
}

/// Evaluate `P(ab|xy) = Tr(rho M^a_x x N^b_y)` for a bipartite state and
/// per-input POVMs on each side.
pub fn behavior_from_realization<T: Real>(
    rho: &RegisterState<T>,
    meas_a: &[Vec<DMatrix<Cx<T>>>],
    meas_b: &[Vec<DMatrix<Cx<T>>>],
) -> Result<Behavior<T>> {
    let dims = rho.shape().dims();
    if dims.len() != 2 {
        return Err(Error::ShapeMismatch("behavior needs a bipartite state".into()));
    }
    let (da, db) = (dims[0], dims[1]);
    let outcomes_a = meas_a.first().map(|p| p.len()).unwrap_or(0);
    let outcomes_b = meas_b.first().map(|p| p.len()).unwrap_or(0);
    for (x, povm) in meas_a.iter().enumerate() {
        if povm.len() != outcomes_a {
            return Err(Error::InvalidPovm(format!("input {x}: outcome count differs")));
        }
        validate_povm(povm, da, "Alice")?;
    }
    for (y, povm) in meas_b.iter().enumerate() {
        if povm.len() != outcomes_b {
            return Err(Error::InvalidPovm(format!("input {y}: outcome count differs")));
        }
        validate_povm(povm, db, "Bob")?;
    }

    let m = rho.density_matrix();
    let mut table = vec![T::zero(); outcomes_a * outcomes_b * meas_a.len() * meas_b.len()];
    for (x, povm_a) in meas_a.iter().enumerate() {
        for (y, povm_b) in meas_b.iter().enumerate() {
            for (a, ea) in povm_a.iter().enumerate() {
                for (b, eb) in povm_b.iter().enumerate() {
                    let op = ea.kronecker(eb);
                    let mut tr = Cx::new(T::zero(), T::zero());
                    for r in 0..da * db {
                        for c in 0..da * db {
                            tr += m[(r, c)] * op[(c, r)];
                        }
                    }
                    let idx = ((a * outcomes_b + b) * meas_a.len() + x) * meas_b.len() + y;
                    table[idx] = tr.re;
                }
            }
        }
    }
    Behavior::new(outcomes_a, outcomes_b, meas_a.len(), meas_b.len(), table)
}

/// CHSH combination `E(0,0) + E(0,1) + E(1,0) - E(1,1)` for binary behaviors.
pub fn chsh_value<T: Real>(b: &Behavior<T>) -> Result<T> {
    let (oa, ob, ix, iy) = b.dims();
    if oa != 2 || ob != 2 || ix != 2 || iy != 2 {
        return Err(Error::DimMismatch("CHSH needs a 2x2x2x2 behavior".into()));
    }
    let correl = |x: usize, y: usize| -> T {
        let mut e = T::zero();
        for a in 0..2 {
            for bb in 0..2 {
                let sign = if (a + bb) % 2 == 0 { T::one() } else { -T::one() };
                e += sign * b.prob(a, bb, x, y);
            }
        }
        e
    };
    Ok(correl(0, 0) + correl(0, 1) + correl(1, 0) - correl(1, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use crate::states::make_max_entangled;
    use crate::tensor::{kron, RegisterShape};

    fn projectors_along(theta: f64) -> Vec<DMatrix<Cx<f64>>> {
        // +/- projectors of cos(theta) Z + sin(theta) X
        let c = theta.cos();
        let s = theta.sin();
        let plus = DMatrix::from_row_slice(2, 2, &[
            cx((1.0 + c) / 2.0, 0.0), cx(s / 2.0, 0.0),
            cx(s / 2.0, 0.0), cx((1.0 - c) / 2.0, 0.0),
        ]);
        let minus = DMatrix::from_row_slice(2, 2, &[
            cx((1.0 - c) / 2.0, 0.0), cx(-s / 2.0, 0.0),
            cx(-s / 2.0, 0.0), cx((1.0 + c) / 2.0, 0.0),
        ]);
        vec![plus, minus]
    }

    #[test]
    fn bell_with_zz_is_uniform_correlated() {
        let bell = make_max_entangled::<f64>(2).unwrap();
        let z = projectors_along(0.0);
        let b = behavior_from_realization(&bell, &[z.clone()], &[z]).unwrap();
        assert!((b.prob(0, 0, 0, 0) - 0.5).abs() < 1e-12);
        assert!((b.prob(1, 1, 0, 0) - 0.5).abs() < 1e-12);
        assert!(b.prob(0, 1, 0, 0).abs() < 1e-12);
        assert!(b.signaling_defect() < 1e-10);
    }

    #[test]
    fn product_state_has_product_distribution() {
        let zero = RegisterState::<f64>::basis_state(RegisterShape::new(vec![2]).unwrap(), 0).unwrap();
        let plus = RegisterState::pure(
            RegisterShape::new(vec![2]).unwrap(),
            nalgebra::DVector::from_vec(vec![
                cx(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                cx(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ]),
        )
        .unwrap();
        let prod = kron(&zero, &plus);
        let z = projectors_along(0.0);
        let b = behavior_from_realization(&prod, &[z.clone()], &[z]).unwrap();
        for a in 0..2 {
            for bb in 0..2 {
                let pa = b.prob(a, 0, 0, 0) + b.prob(a, 1, 0, 0);
                let pb = b.prob(0, bb, 0, 0) + b.prob(1, bb, 0, 0);
                assert!((b.prob(a, bb, 0, 0) - pa * pb).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn chsh_reaches_tsirelson_on_bell() {
        let bell = make_max_entangled::<f64>(2).unwrap();
        let pi = std::f64::consts::PI;
        // standard optimal settings: Alice Z, X; Bob at +/- pi/4
        let meas_a = vec![projectors_along(0.0), projectors_along(pi / 2.0)];
        let meas_b = vec![projectors_along(pi / 4.0), projectors_along(-pi / 4.0)];
        let b = behavior_from_realization(&bell, &meas_a, &meas_b).unwrap();
        let s = chsh_value(&b).unwrap();
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!(b.signaling_defect() < 1e-9);
    }

    #[test]
    fn invalid_povm_rejected() {
        let bell = make_max_entangled::<f64>(2).unwrap();
        let not_complete = vec![projectors_along(0.0)[0].clone()];
        assert!(behavior_from_realization(&bell, &[not_complete.clone()], &[not_complete]).is_err());
    }
}
