//! Catalog of static nonlinearities `f: R -> R`.
//!
//! Every form is a polynomial in its argument, so continuity and a polynomial
//! growth bound hold by construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NonlinearityError {
    #[error("unknown nonlinearity `{0}`")]
    UnknownName(String),
    #[error("nonlinearity `{name}` takes {expected} parameters, got {got}")]
    ParamCount {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("non-finite parameter for `{0}`")]
    NonFinite(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    Identity,
    /// `slope·u + offset`
    Affine { slope: f64, offset: f64 },
    /// `cubic·u³ + linear·u + offset`
    CubicAffine { cubic: f64, linear: f64, offset: f64 },
    /// `(u − shift)³`
    ShiftedCube { shift: f64 },
    /// `Σ coeffs[k]·u^k`, ascending powers.
    Polynomial(Vec<f64>),
}

impl Nonlinearity {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Self::Identity => u,
            Self::Affine { slope, offset } => slope * u + offset,
            Self::CubicAffine {
                cubic,
                linear,
                offset,
            } => cubic * u * u * u + linear * u + offset,
            Self::ShiftedCube { shift } => {
                let d = u - shift;
                d * d * d
            }
            Self::Polynomial(ref c) => c.iter().rev().fold(0.0, |acc, &a| acc * u + a),
        }
    }

    /// Catalog name and parameter list as written in scenario files.
    pub fn to_spec(&self) -> NonlinearitySpec {
        let (name, params) = match *self {
            Self::Identity => ("identity", vec![]),
            Self::Affine { slope, offset } => ("affine", vec![slope, offset]),
            Self::CubicAffine {
                cubic,
                linear,
                offset,
            } => ("cubic_affine", vec![cubic, linear, offset]),
            Self::ShiftedCube { shift } => ("shifted_cube", vec![shift]),
            Self::Polynomial(ref c) => ("polynomial", c.clone()),
        };
        NonlinearitySpec {
            name: name.to_string(),
            params,
        }
    }

    pub fn from_spec(spec: &NonlinearitySpec) -> Result<Self, NonlinearityError> {
        let p = &spec.params;
        if p.iter().any(|x| !x.is_finite()) {
            return Err(NonlinearityError::NonFinite(spec.name.clone()));
        }
        let want = |expected: usize| {
            if p.len() == expected {
                Ok(())
            } else {
                Err(NonlinearityError::ParamCount {
                    name: spec.name.clone(),
                    expected,
                    got: p.len(),
                })
            }
        };
        match spec.name.as_str() {
            "identity" => want(0).map(|_| Self::Identity),
            "affine" => want(2).map(|_| Self::Affine {
                slope: p[0],
                offset: p[1],
            }),
            "cubic_affine" => want(3).map(|_| Self::CubicAffine {
                cubic: p[0],
                linear: p[1],
                offset: p[2],
            }),
            "shifted_cube" => want(1).map(|_| Self::ShiftedCube { shift: p[0] }),
            "polynomial" => Ok(Self::Polynomial(p.clone())),
            other => Err(NonlinearityError::UnknownName(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_values() {
        let f1 = Nonlinearity::CubicAffine {
            cubic: -1.0,
            linear: -1.0,
            offset: 0.0,
        };
        assert_eq!(f1.eval(2.0), -10.0);
        let f2 = Nonlinearity::Affine {
            slope: -2.0,
            offset: 1.0,
        };
        assert_eq!(f2.eval(1.0), -1.0);
        assert_eq!(Nonlinearity::ShiftedCube { shift: 1.0 }.eval(3.0), 8.0);
        assert_eq!(Nonlinearity::Polynomial(vec![1.0, 0.0, 2.0]).eval(3.0), 19.0);
        assert_eq!(Nonlinearity::Identity.eval(-4.5), -4.5);
    }

    #[test]
    fn descriptor_round_trip_and_errors() {
        let f = Nonlinearity::CubicAffine {
            cubic: 1.0,
            linear: 0.0,
            offset: 1.0,
        };
        assert_eq!(Nonlinearity::from_spec(&f.to_spec()).unwrap(), f);
        let bad = NonlinearitySpec {
            name: "affine".into(),
            params: vec![1.0],
        };
        assert!(matches!(
            Nonlinearity::from_spec(&bad),
            Err(NonlinearityError::ParamCount { expected: 2, got: 1, .. })
        ));
        let unknown = NonlinearitySpec {
            name: "tanh".into(),
            params: vec![],
        };
        assert!(matches!(
            Nonlinearity::from_spec(&unknown),
            Err(NonlinearityError::UnknownName(_))
        ));
    }
}
