//! JSON wire format for states and unitaries.
//!
//! States serialize as `{"dims": [...], "kind": "pure"|"density",
//! "re": [...], "im": [...]}` with row-major flattening; small relative
//! round-trip error from the decimal encoding is tolerated.

use super::{Payload, RegisterShape, RegisterState, UnitaryOperator};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub kind: String,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateJson {
    pub fn from_state<T: Real>(s: &RegisterState<T>) -> Self {
        match s.payload() {
            Payload::Pure(v) => Self {
                dims: s.shape().dims().to_vec(),
                kind: "pure".into(),
                re: v.iter().map(|z| z.re.to_f64_lossy()).collect(),
                im: v.iter().map(|z| z.im.to_f64_lossy()).collect(),
            },
            Payload::Density(m) => {
                let d = m.nrows();
                let mut re = Vec::with_capacity(d * d);
                let mut im = Vec::with_capacity(d * d);
                for r in 0..d {
                    for c in 0..d {
                        re.push(m[(r, c)].re.to_f64_lossy());
                        im.push(m[(r, c)].im.to_f64_lossy());
                    }
                }
                Self { dims: s.shape().dims().to_vec(), kind: "density".into(), re, im }
            }
        }
    }

    pub fn to_state<T: Real>(&self) -> Result<RegisterState<T>> {
        let shape = RegisterShape::new(self.dims.clone())?;
        let d = shape.ambient_dim();
        if self.re.len() != self.im.len() {
            return Err(Error::Serde("re/im length mismatch".into()));
        }
        match self.kind.as_str() {
            "pure" => {
                if self.re.len() != d {
                    return Err(Error::Serde(format!(
                        "pure payload length {} vs ambient {d}",
                        self.re.len()
                    )));
                }
                let v = DVector::from_iterator(
                    d,
                    self.re.iter().zip(&self.im).map(|(&r, &i)| Cx::new(T::of(r), T::of(i))),
                );
                RegisterState::pure(shape, v)
            }
            "density" => {
                if self.re.len() != d * d {
                    return Err(Error::Serde(format!(
                        "density payload length {} vs ambient {d}^2",
                        self.re.len()
                    )));
                }
                let mut m = DMatrix::from_element(d, d, Cx::new(T::zero(), T::zero()));
                for r in 0..d {
                    for c in 0..d {
                        let k = r * d + c;
                        m[(r, c)] = Cx::new(T::of(self.re[k]), T::of(self.im[k]));
                    }
                }
                RegisterState::density(shape, m)
            }
            other => Err(Error::Serde(format!("unknown state kind {other:?}"))),
        }
    }

    pub fn from_unitary<T: Real>(u: &UnitaryOperator<T>) -> Self {
        let m = u.matrix();
        let d = m.nrows();
        let mut re = Vec::with_capacity(d * d);
        let mut im = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                re.push(m[(r, c)].re.to_f64_lossy());
                im.push(m[(r, c)].im.to_f64_lossy());
            }
        }
        Self { dims: u.shape().dims().to_vec(), kind: "unitary".into(), re, im }
    }

    pub fn to_unitary<T: Real>(&self) -> Result<UnitaryOperator<T>> {
        if self.kind != "unitary" {
            return Err(Error::Serde(format!("expected kind \"unitary\", got {:?}", self.kind)));
        }
        let shape = RegisterShape::new(self.dims.clone())?;
        let d = shape.ambient_dim();
        if self.re.len() != d * d || self.im.len() != d * d {
            return Err(Error::Serde("unitary payload length mismatch".into()));
        }
        let mut m = DMatrix::from_element(d, d, Cx::new(T::zero(), T::zero()));
        for r in 0..d {
            for c in 0..d {
                let k = r * d + c;
                m[(r, c)] = Cx::new(T::of(self.re[k]), T::of(self.im[k]));
            }
        }
        UnitaryOperator::new(shape, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn state_roundtrip() {
        let shape = RegisterShape::new(vec![2, 2]).unwrap();
        let v = DVector::from_vec(vec![
            cx::<f64>(0.5, 0.0), cx(0.0, 0.5), cx(0.5, 0.0), cx(0.0, -0.5),
        ]);
        let s = RegisterState::pure(shape, v).unwrap();
        let j = StateJson::from_state(&s);
        let text = serde_json::to_string(&j).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        let s2: RegisterState<f64> = back.to_state().unwrap();
        assert!((s.density_matrix() - s2.density_matrix()).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_kind() {
        let j = StateJson { dims: vec![2], kind: "weird".into(), re: vec![1.0, 0.0], im: vec![0.0, 0.0] };
        assert!(j.to_state::<f64>().is_err());
    }
}
