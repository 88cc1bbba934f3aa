//! Polynomials in the backward-shift operator, `C(z) = 1 + c_1 z + … + c_p z^p`.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolynomialError {
    #[error("polynomial needs at least one coefficient")]
    Empty,
    #[error("leading coefficient must be 1, got {0}")]
    NotNormalized(f64),
    #[error("non-finite coefficient at position {0}")]
    NonFinite(usize),
    #[error("root solver did not converge for degree {0}")]
    RootSolverFailure(usize),
}

/// Coefficients `[1, a_1, …, a_deg]` in ascending powers of the shift `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, PolynomialError> {
        match coeffs.first() {
            None => return Err(PolynomialError::Empty),
            Some(&c0) if c0 != 1.0 => return Err(PolynomialError::NotNormalized(c0)),
            _ => {}
        }
        if let Some(pos) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(PolynomialError::NonFinite(pos));
        }
        Ok(Self { coeffs })
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self { coeffs: vec![1.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Nominal degree, counting trailing zero coefficients.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^s`, zero beyond the stored degree.
    pub fn coeff(&self, s: usize) -> f64 {
        self.coeffs.get(s).copied().unwrap_or(0.0)
    }

    /// Value at `z = 1`, i.e. the sum of the coefficients.
    pub fn eval_at_one(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn eval(&self, z: Complex<f64>) -> Complex<f64> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Roots in the complex plane via eigenvalues of the companion matrix.
    pub fn roots(&self) -> Result<Vec<Complex<f64>>, PolynomialError> {
        let effective = self
            .coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0);
        if effective == 0 {
            return Ok(Vec::new());
        }
        let lead = self.coeffs[effective];
        let n = effective;
        // Companion matrix of the monic polynomial z^n + (a_{n-1}/lead) z^{n-1} + … .
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for r in 1..n {
            companion[(r, r - 1)] = 1.0;
        }
        for r in 0..n {
            companion[(r, n - 1)] = -self.coeffs[r] / lead;
        }
        let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 10_000)
            .ok_or(PolynomialError::RootSolverFailure(n))?;
        Ok(schur.complex_eigenvalues().iter().copied().collect())
    }

    /// Checks that every root lies strictly outside the closed unit disk by `margin`.
    pub fn check_stability(&self, margin: f64) -> Result<StabilityReport, PolynomialError> {
        let roots = self.roots()?;
        let stable = roots.iter().all(|z| z.norm() > 1.0 + margin);
        Ok(StabilityReport { stable, roots })
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = PolynomialError;

    fn try_from(coeffs: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub roots: Vec<Complex<f64>>,
}

impl StabilityReport {
    pub fn min_root_modulus(&self) -> Option<f64> {
        self.roots.iter().map(|z| z.norm()).min_by(f64::total_cmp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn value_at_one() {
        assert!((poly(&[1.0, 0.2, 0.0, 0.6]).eval_at_one() - 1.8).abs() < 1e-15);
        assert!((poly(&[1.0, -0.3, -1.2]).eval_at_one() + 0.5).abs() < 1e-15);
        assert_eq!(Polynomial::one().eval_at_one(), 1.0);
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert_eq!(Polynomial::new(vec![]), Err(PolynomialError::Empty));
        assert_eq!(
            Polynomial::new(vec![2.0, 1.0]),
            Err(PolynomialError::NotNormalized(2.0))
        );
        assert_eq!(
            Polynomial::new(vec![1.0, f64::NAN]),
            Err(PolynomialError::NonFinite(1))
        );
    }

    #[test]
    fn linear_factors() {
        let s = poly(&[1.0, -0.5]).check_stability(1e-9).unwrap();
        assert!(s.stable);
        assert!((s.roots[0].re - 2.0).abs() < 1e-12);
        let u = poly(&[1.0, -2.0]).check_stability(1e-9).unwrap();
        assert!(!u.stable);
        assert!((u.roots[0].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_is_vacuously_stable() {
        let s = Polynomial::one().check_stability(1e-9).unwrap();
        assert!(s.stable);
        assert!(s.roots.is_empty());
        // trailing zeros do not add roots
        let s = poly(&[1.0, 0.0, 0.0]).check_stability(1e-9).unwrap();
        assert!(s.stable && s.roots.is_empty());
    }

    #[test]
    fn cubic_roots_are_true_zeros_outside_unit_disk() {
        let p = poly(&[1.0, 0.2, 0.0, 0.6]);
        let s = p.check_stability(1e-9).unwrap();
        assert!(s.stable);
        assert_eq!(s.roots.len(), 3);
        for z in &s.roots {
            assert!(p.eval(*z).norm() < 1e-12, "residual at {z}");
        }
        let real: Vec<_> = s.roots.iter().filter(|z| z.im.abs() < 1e-9).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].re + 1.093).abs() < 1e-3);
        // product of root moduli equals |1 / 0.6|
        let product: f64 = s.roots.iter().map(|z| z.norm()).product();
        assert!((product - 1.0 / 0.6).abs() < 1e-12);
        let pair = s.roots.iter().find(|z| z.im.abs() > 1e-9).unwrap();
        assert!((pair.norm() - 1.235).abs() < 0.02);
    }
}
