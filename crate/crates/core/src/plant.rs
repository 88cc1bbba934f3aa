//! Single-agent open-loop dynamics.
//!
//! A Hammerstein agent applies the static map first and filters the result:
//! `v_k = f(u_k)`, `C(z) y_{k+1} = D(z) v_k`. A Wiener agent filters the input
//! and applies the map last: `C(z) v_{k+1} = D(z) u_k`, `y_{k+1} = f(v_{k+1})`.
//! `z` is the backward shift, `z y_{k+1} = y_k`.
//!
//! The difference-equation form in [`AgentPlant`] is what the simulator runs.
//! [`StateSpaceRealization`] is the equivalent observer-canonical form, kept as
//! an independent cross-check.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlinearity::Nonlinearity;
use crate::polynomial::Polynomial;

/// Below this, `C(1)` is treated as zero.
pub const DC_GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("non-finite plant value {value} (input {input})")]
    NonFiniteValue { value: f64, input: f64 },
    #[error("C(1) = {0} is zero; static gain undefined")]
    ZeroDcGain(f64),
    #[error("initial history has length {got}, expected at most {max}")]
    HistoryLength { got: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlantKind {
    #[serde(alias = "H")]
    Hammerstein,
    #[serde(alias = "W")]
    Wiener,
}

impl PlantKind {
    pub fn letter(self) -> char {
        match self {
            Self::Hammerstein => 'H',
            Self::Wiener => 'W',
        }
    }
}

/// Most-recent-first buffer of fixed length.
#[derive(Debug, Clone, PartialEq)]
struct History(VecDeque<f64>);

impl History {
    fn zeros(len: usize) -> Self {
        Self(VecDeque::from(vec![0.0; len]))
    }

    /// `self[s-1]` is the value `s` steps back.
    fn get(&self, back: usize) -> f64 {
        self.0[back - 1]
    }

    fn push(&mut self, x: f64) {
        if self.0.is_empty() {
            return;
        }
        self.0.pop_back();
        self.0.push_front(x);
    }

    fn seed(&mut self, values: &[f64]) -> Result<(), PlantError> {
        if values.len() > self.0.len() {
            return Err(PlantError::HistoryLength {
                got: values.len(),
                max: self.0.len(),
            });
        }
        for (slot, &v) in self.0.iter_mut().zip(values) {
            *slot = v;
        }
        Ok(())
    }
}

/// One agent's plant with its pre-time history.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentPlant {
    kind: PlantKind,
    c: Polynomial,
    d: Polynomial,
    f: Nonlinearity,
    /// Hammerstein: past outputs. Wiener: past internal values. Length `p`.
    filtered: History,
    /// Hammerstein: past internal values. Wiener: past inputs. Length `q`.
    driving: History,
    last_output: f64,
}

impl AgentPlant {
    /// Plant at rest: all values at indices `<= 0` are zero.
    pub fn new(kind: PlantKind, c: Polynomial, d: Polynomial, f: Nonlinearity) -> Self {
        let filtered = History::zeros(c.degree());
        let driving = History::zeros(d.degree());
        Self {
            kind,
            c,
            d,
            f,
            filtered,
            driving,
            last_output: 0.0,
        }
    }

    /// Overrides the pre-time history, most recent first. `filtered` holds past
    /// outputs (Hammerstein) or internal values (Wiener); `driving` holds past
    /// internal values (Hammerstein) or inputs (Wiener).
    pub fn with_history(mut self, filtered: &[f64], driving: &[f64]) -> Result<Self, PlantError> {
        self.filtered.seed(filtered)?;
        self.driving.seed(driving)?;
        if self.kind == PlantKind::Hammerstein {
            self.last_output = filtered.first().copied().unwrap_or(0.0);
        }
        Ok(self)
    }

    pub fn kind(&self) -> PlantKind {
        self.kind
    }

    pub fn c(&self) -> &Polynomial {
        &self.c
    }

    pub fn d(&self) -> &Polynomial {
        &self.d
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.f
    }

    /// Most recent output, zero before the first step.
    pub fn last_output(&self) -> f64 {
        self.last_output
    }

    /// Applies `u_k` and returns `y_{k+1}`.
    pub fn step(&mut self, u: f64) -> Result<f64, PlantError> {
        let (filtered_next, driving_now, y) = match self.kind {
            PlantKind::Hammerstein => {
                let v = self.f.eval(u);
                let y = self.filter(v);
                (y, v, y)
            }
            PlantKind::Wiener => {
                let v = self.filter(u);
                (v, u, self.f.eval(v))
            }
        };
        if !y.is_finite() || !filtered_next.is_finite() {
            return Err(PlantError::NonFiniteValue {
                value: if y.is_finite() { filtered_next } else { y },
                input: u,
            });
        }
        self.filtered.push(filtered_next);
        self.driving.push(driving_now);
        self.last_output = y;
        Ok(y)
    }

    /// `-Σ c_s x_{k+1-s} + w_k + Σ d_r w_{k-r}` for the current histories.
    fn filter(&self, w: f64) -> f64 {
        let mut acc = w;
        for s in 1..=self.c.degree() {
            acc -= self.c.coeff(s) * self.filtered.get(s);
        }
        for r in 1..=self.d.degree() {
            acc += self.d.coeff(r) * self.driving.get(r);
        }
        acc
    }

    pub fn static_gain(&self) -> Result<StaticGain, PlantError> {
        StaticGain::new(self.kind, &self.c, &self.d, self.f.clone())
    }

    pub fn state_space(&self) -> StateSpaceRealization {
        StateSpaceRealization::new(&self.c, &self.d)
    }

    /// Drives a copy of the plant with constant `u` for `horizon` steps and
    /// reports whether the output settled within `tol` of `h(u)`.
    pub fn steady_state_check(&self, u: f64, horizon: usize, tol: f64) -> bool {
        let Ok(gain) = self.static_gain() else {
            return false;
        };
        let target = gain.h(u);
        let mut copy = self.clone();
        let mut y = copy.last_output;
        for _ in 0..horizon {
            match copy.step(u) {
                Ok(v) => y = v,
                Err(_) => return false,
            }
        }
        (y - target).abs() < tol
    }
}

/// Observer-canonical realization `X_{k+1} = A X_k + B w_k`, `x_k = G₁ X_k`.
///
/// `A` carries `-c_1 … -c_n` down its first column and an identity block on the
/// superdiagonal; `B = [1, d_1, …, d_{n-1}]ᵀ`; `n = max(p, q) + 1` with missing
/// coefficients zero-padded.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceRealization {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub state: DVector<f64>,
}

impl StateSpaceRealization {
    pub fn new(c: &Polynomial, d: &Polynomial) -> Self {
        let n = c.degree().max(d.degree()) + 1;
        let mut a = DMatrix::zeros(n, n);
        for r in 0..n {
            a[(r, 0)] = -c.coeff(r + 1);
            if r + 1 < n {
                a[(r, r + 1)] = 1.0;
            }
        }
        let b = DVector::from_iterator(n, (0..n).map(|r| d.coeff(r)));
        Self {
            a,
            b,
            state: DVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `G₁ X`.
    pub fn output(&self) -> f64 {
        self.state[0]
    }

    /// Advances one step with input `w` and returns the new `G₁ X`.
    pub fn advance(&mut self, w: f64) -> f64 {
        self.state = &self.a * &self.state + &self.b * w;
        self.output()
    }

    /// Spectral norms `‖A^k‖₂` for `k = 1..=kmax`.
    pub fn power_norms(&self, kmax: usize) -> Vec<f64> {
        let mut power = DMatrix::identity(self.dim(), self.dim());
        (1..=kmax)
            .map(|_| {
                power = &self.a * &power;
                power.clone().svd(false, false).singular_values.max()
            })
            .collect()
    }

    /// Least-squares fit of `ln‖A^k‖ ≈ ln r − δ k` over `k = 1..=kmax`;
    /// returns `(r, δ)`. Powers that underflow to zero are skipped.
    pub fn fit_decay(&self, kmax: usize) -> Option<(f64, f64)> {
        let pts: Vec<(f64, f64)> = self
            .power_norms(kmax)
            .into_iter()
            .enumerate()
            .filter(|&(_, v)| v > 1e-300)
            .map(|(k, v)| ((k + 1) as f64, v.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let slope = sxy / sxx;
        Some(((my - slope * mx).exp(), -slope))
    }
}

/// Whole agent simulated through its state-space realization.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpacePlant {
    kind: PlantKind,
    f: Nonlinearity,
    pub realization: StateSpaceRealization,
}

impl StateSpacePlant {
    pub fn from_plant(plant: &AgentPlant) -> Self {
        Self {
            kind: plant.kind,
            f: plant.f.clone(),
            realization: plant.state_space(),
        }
    }

    pub fn step(&mut self, u: f64) -> f64 {
        match self.kind {
            PlantKind::Hammerstein => self.realization.advance(self.f.eval(u)),
            PlantKind::Wiener => {
                let v = self.realization.advance(u);
                self.f.eval(v)
            }
        }
    }
}

/// Steady-state input/output map `h` of one agent.
///
/// Hammerstein: `h(u) = (d/c)·f(u)`; Wiener: `h(u) = f((d/c)·u)`, with
/// `c = C(1)` and `d = D(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticGain {
    pub kind: PlantKind,
    pub c: f64,
    pub d: f64,
    pub f: Nonlinearity,
}

impl StaticGain {
    pub fn new(
        kind: PlantKind,
        c: &Polynomial,
        d: &Polynomial,
        f: Nonlinearity,
    ) -> Result<Self, PlantError> {
        let c = c.eval_at_one();
        if c.abs() < DC_GAIN_EPS {
            return Err(PlantError::ZeroDcGain(c));
        }
        Ok(Self {
            kind,
            c,
            d: d.eval_at_one(),
            f,
        })
    }

    /// Gain with `c = d = 1`, so `h = f` for either kind.
    pub fn from_map(f: Nonlinearity) -> Self {
        Self {
            kind: PlantKind::Hammerstein,
            c: 1.0,
            d: 1.0,
            f,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.d / self.c
    }

    pub fn h(&self, u: f64) -> f64 {
        match self.kind {
            PlantKind::Hammerstein => self.ratio() * self.f.eval(u),
            PlantKind::Wiener => self.f.eval(self.ratio() * u),
        }
    }

    /// Strict increase of `h` on `points` evenly spaced samples of `[lo, hi]`.
    pub fn is_increasing_on_grid(&self, lo: f64, hi: f64, points: usize) -> bool {
        let step = (hi - lo) / (points - 1) as f64;
        let mut prev = self.h(lo);
        (1..points).all(|k| {
            let next = self.h(lo + step * k as f64);
            let ok = next > prev;
            prev = next;
            ok
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn memoryless_pass_through() {
        let mut p = AgentPlant::new(
            PlantKind::Hammerstein,
            Polynomial::one(),
            Polynomial::one(),
            Nonlinearity::Identity,
        );
        assert_eq!(p.step(3.0).unwrap(), 3.0);
        assert_eq!(p.last_output(), 3.0);
        assert!(p.steady_state_check(-7.0, 1, 1e-12));
    }

    #[test]
    fn first_steps_from_rest() {
        let affine = Nonlinearity::Affine {
            slope: -2.0,
            offset: 1.0,
        };
        let c = poly(&[1.0, 0.6, 0.5, 0.4]);
        let d = poly(&[1.0, -1.0, -2.0]);
        let mut h = AgentPlant::new(PlantKind::Hammerstein, c.clone(), d.clone(), affine.clone());
        assert_eq!(h.step(1.0).unwrap(), -1.0);
        // second step: y = -0.6·(-1) + v + d_1·v_prev = 0.6 - 1 + 1
        assert!((h.step(1.0).unwrap() - 0.6).abs() < 1e-15);

        let mut w = AgentPlant::new(PlantKind::Wiener, c, d, affine);
        assert_eq!(w.step(1.0).unwrap(), -1.0);
    }

    #[test]
    fn state_space_shapes() {
        let ss = StateSpaceRealization::new(&poly(&[1.0, -0.5]), &Polynomial::one());
        assert_eq!(ss.a, DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.0, 0.0]));
        assert_eq!(ss.b.as_slice(), &[1.0, 0.0]);

        let ss = StateSpaceRealization::new(&Polynomial::one(), &Polynomial::one());
        assert_eq!(ss.dim(), 1);
        assert_eq!(ss.a[(0, 0)], 0.0);
        assert_eq!(ss.b[0], 1.0);

        let ss = StateSpaceRealization::new(&poly(&[1.0, 0.6, 0.5, 0.4]), &poly(&[1.0, -1.0, -2.0]));
        assert_eq!(ss.dim(), 4);
        let first: Vec<f64> = ss.a.column(0).iter().copied().collect();
        assert_eq!(first, vec![-0.6, -0.5, -0.4, -0.0]);
        assert_eq!(ss.b.as_slice(), &[1.0, -1.0, -2.0, 0.0]);
        for r in 0..3 {
            assert_eq!(ss.a[(r, r + 1)], 1.0);
        }
    }

    #[test]
    fn first_order_recursion_matches_state_space() {
        let c = poly(&[1.0, -0.5]);
        let mut plant = AgentPlant::new(
            PlantKind::Hammerstein,
            c.clone(),
            Polynomial::one(),
            Nonlinearity::Identity,
        );
        let mut ss = StateSpacePlant::from_plant(&plant);
        let mut y = 0.0;
        for k in 0..50 {
            let u = (k as f64 * 0.3).sin();
            y = 0.5 * y + u;
            assert!((plant.step(u).unwrap() - y).abs() < 1e-12);
            assert!((ss.step(u) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn static_gains() {
        let g = StaticGain::new(
            PlantKind::Hammerstein,
            &poly(&[1.0, 0.6, 0.5, 0.4]),
            &poly(&[1.0, -1.0, -2.0]),
            Nonlinearity::Affine {
                slope: -2.0,
                offset: 1.0,
            },
        )
        .unwrap();
        assert!((g.c - 2.5).abs() < 1e-15 && (g.d + 2.0).abs() < 1e-15);
        assert!((g.h(0.5)).abs() < 1e-15);
        assert!((g.h(1.0) - 0.8).abs() < 1e-14);

        let g = StaticGain::new(
            PlantKind::Hammerstein,
            &poly(&[1.0, -0.15, 0.0, 0.5]),
            &poly(&[1.0, 0.2, -0.4]),
            Nonlinearity::ShiftedCube { shift: 1.0 },
        )
        .unwrap();
        assert!((g.h(3.0) - 0.8 / 1.35 * 8.0).abs() < 1e-13);

        let id = StaticGain::new(
            PlantKind::Hammerstein,
            &Polynomial::one(),
            &Polynomial::one(),
            Nonlinearity::Identity,
        )
        .unwrap();
        assert_eq!(id.h(2.25), 2.25);

        assert!(matches!(
            StaticGain::new(
                PlantKind::Wiener,
                &poly(&[1.0, -1.0]),
                &Polynomial::one(),
                Nonlinearity::Identity
            ),
            Err(PlantError::ZeroDcGain(_))
        ));
    }

    #[test]
    fn settles_to_static_gain() {
        let p = AgentPlant::new(
            PlantKind::Hammerstein,
            poly(&[1.0, -0.5]),
            Polynomial::one(),
            Nonlinearity::Identity,
        );
        assert!((p.static_gain().unwrap().h(1.0) - 2.0).abs() < 1e-15);
        assert!(p.steady_state_check(1.0, 100, 1e-12));
        assert!(!p.steady_state_check(1.0, 3, 1e-3));

        let p4 = AgentPlant::new(
            PlantKind::Hammerstein,
            poly(&[1.0, 0.76, 0.5, 0.6]),
            poly(&[1.0, 0.5]),
            Nonlinearity::CubicAffine {
                cubic: 1.0,
                linear: 0.0,
                offset: 1.0,
            },
        );
        assert!((p4.static_gain().unwrap().h(0.0) - 0.524476).abs() < 1e-6);
        assert!(p4.steady_state_check(0.0, 2000, 1e-9));
    }

    #[test]
    fn non_finite_output_is_an_error() {
        let mut p = AgentPlant::new(
            PlantKind::Hammerstein,
            Polynomial::one(),
            Polynomial::one(),
            Nonlinearity::CubicAffine {
                cubic: 1.0,
                linear: 0.0,
                offset: 0.0,
            },
        );
        assert!(matches!(
            p.step(1e200),
            Err(PlantError::NonFiniteValue { .. })
        ));
    }

    #[test]
    fn seeded_history() {
        let p = AgentPlant::new(
            PlantKind::Hammerstein,
            poly(&[1.0, -0.5]),
            Polynomial::one(),
            Nonlinearity::Identity,
        );
        let mut seeded = p.clone().with_history(&[4.0], &[]).unwrap();
        assert_eq!(seeded.step(0.0).unwrap(), 2.0);
        assert!(p.with_history(&[1.0, 2.0], &[]).is_err());
    }

    #[test]
    fn decay_fit_for_stable_companion() {
        let ss = StateSpaceRealization::new(&poly(&[1.0, 0.2, 0.0, 0.6]), &poly(&[1.0, -0.3, -1.2]));
        let (r, delta) = ss.fit_decay(200).unwrap();
        assert!(r > 0.0);
        assert!(delta > 0.0);
    }
}
