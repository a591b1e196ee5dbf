use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::quadform::NormalFrame;

/// Smooth one-periodic weight multiplying a bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    #[default]
    Constant,
    /// `mean + amplitude · cos(2π (t + phase))`
    Harmonic {
        mean: f64,
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl TimeProfile {
    pub fn weight(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Harmonic {
                mean,
                amplitude,
                phase,
            } => mean + amplitude * (TAU * (t + phase)).cos(),
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Harmonic {
                mean, amplitude, ..
            } => mean.abs() + amplitude.abs(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TimeProfile::Constant)
            || matches!(self, TimeProfile::Harmonic { amplitude, .. } if *amplitude == 0.0)
    }
}

/// Compactly supported bump `amplitude · w(t) · (1 − ‖z − c‖²/ρ²)³` on the ball `‖z − c‖ < ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub time_profile: TimeProfile,
}

impl Bump {
    fn offset(&self, z: &DVector<f64>) -> (DVector<f64>, f64) {
        let d = DVector::from_fn(z.len(), |i, _| z[i] - self.center[i]);
        let u = d.norm_squared() / (self.radius * self.radius);
        (d, u)
    }

    pub fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        let (_, u) = self.offset(z);
        if u >= 1.0 {
            return 0.0;
        }
        self.amplitude * self.time_profile.weight(t) * (1.0 - u).powi(3)
    }

    pub fn add_gradient(&self, t: f64, z: &DVector<f64>, out: &mut DVector<f64>) {
        let (d, u) = self.offset(z);
        if u >= 1.0 {
            return;
        }
        let s = self.amplitude * self.time_profile.weight(t);
        let r2 = self.radius * self.radius;
        out.axpy(-6.0 * s * (1.0 - u).powi(2) / r2, &d, 1.0);
    }

    pub fn add_hessian(&self, t: f64, z: &DVector<f64>, out: &mut DMatrix<f64>) {
        let (d, u) = self.offset(z);
        if u >= 1.0 {
            return;
        }
        let s = self.amplitude * self.time_profile.weight(t);
        let r2 = self.radius * self.radius;
        let diag = -6.0 * s * (1.0 - u).powi(2) / r2;
        for i in 0..z.len() {
            out[(i, i)] += diag;
        }
        out.ger(24.0 * s * (1.0 - u) / (r2 * r2), &d, &d, 1.0);
    }
}

/// `H(t, z) = κ Q(z) + Σ bumps`, equal to `κQ` outside the ball of radius `support_radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSystem {
    pub frame: NormalFrame,
    pub kappa: f64,
    pub bumps: Vec<Bump>,
    pub support_radius: f64,
}

impl HamiltonianSystem {
    pub fn new(frame: NormalFrame, kappa: f64, bumps: Vec<Bump>, support_radius: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
        }
        if !(support_radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "support radius must be positive, got {support_radius}"
            )));
        }
        let dim = frame.dim();
        for (i, b) in bumps.iter().enumerate() {
            if b.center.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: b.center.len(),
                });
            }
            if !(b.radius > 0.0) {
                return Err(Error::InvalidInput(format!("bump {i}: radius must be positive")));
            }
            let reach = b.center.iter().map(|c| c * c).sum::<f64>().sqrt() + b.radius;
            if reach > support_radius * (1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!(
                    "bump {i} reaches radius {reach}, outside the support ball of radius {support_radius}"
                )));
            }
        }
        Ok(Self {
            frame,
            kappa,
            bumps,
            support_radius,
        })
    }

    pub fn unperturbed(frame: NormalFrame, support_radius: f64) -> Result<Self> {
        Self::new(frame, 1.0, Vec::new(), support_radius)
    }

    /// Upper bound for `sup |f|` over space and time.
    pub fn sup_perturbation(&self) -> f64 {
        self.bumps
            .iter()
            .map(|b| b.amplitude.abs() * b.time_profile.sup_abs())
            .sum()
    }

    pub fn perturbation(&self, t: f64, z: &DVector<f64>) -> f64 {
        self.bumps.iter().map(|b| b.value(t, z)).sum()
    }

    pub fn perturbation_part(&self) -> Perturbation {
        Perturbation {
            dim: self.frame.dim(),
            bumps: self.bumps.clone(),
        }
    }

    pub fn quadratic(&self) -> QuadraticHamiltonian {
        QuadraticHamiltonian {
            frame: self.frame.clone(),
            kappa: self.kappa,
        }
    }
}

impl Hamiltonian for HamiltonianSystem {
    fn dim(&self) -> usize {
        self.frame.dim()
    }

    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        self.kappa * self.frame.q_value(z) + self.perturbation(t, z)
    }

    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        let mut g = self.frame.q_gradient(z) * self.kappa;
        for b in &self.bumps {
            b.add_gradient(t, z, &mut g);
        }
        g
    }

    fn hessian(&self, t: f64, z: &DVector<f64>) -> DMatrix<f64> {
        let mut h = self.frame.hessian() * self.kappa;
        for b in &self.bumps {
            b.add_hessian(t, z, &mut h);
        }
        h
    }

    fn is_autonomous(&self) -> bool {
        self.bumps.iter().all(|b| b.time_profile.is_constant())
    }
}

/// The autonomous quadratic `κ Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticHamiltonian {
    pub frame: NormalFrame,
    pub kappa: f64,
}

impl Hamiltonian for QuadraticHamiltonian {
    fn dim(&self) -> usize {
        self.frame.dim()
    }
    fn value(&self, _t: f64, z: &DVector<f64>) -> f64 {
        self.kappa * self.frame.q_value(z)
    }
    fn gradient(&self, _t: f64, z: &DVector<f64>) -> DVector<f64> {
        self.frame.q_gradient(z) * self.kappa
    }
    fn hessian(&self, _t: f64, _z: &DVector<f64>) -> DMatrix<f64> {
        self.frame.hessian() * self.kappa
    }
    fn is_autonomous(&self) -> bool {
        true
    }
}

/// The compactly supported part `f = Σ bumps` on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub dim: usize,
    pub bumps: Vec<Bump>,
}

impl Hamiltonian for Perturbation {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        self.bumps.iter().map(|b| b.value(t, z)).sum()
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim);
        for b in &self.bumps {
            b.add_gradient(t, z, &mut g);
        }
        g
    }
    fn hessian(&self, t: f64, z: &DVector<f64>) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for b in &self.bumps {
            b.add_hessian(t, z, &mut h);
        }
        h
    }
    fn is_autonomous(&self) -> bool {
        self.bumps.iter().all(|b| b.time_profile.is_constant())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::{build_normal_form, BlockSpec};

    fn saddle() -> NormalFrame {
        build_normal_form(&BlockSpec::single(1.0, 1).unwrap()).unwrap()
    }

    fn bump_system() -> HamiltonianSystem {
        let bumps = vec![
            Bump {
                center: vec![0.1, -0.2],
                radius: 0.6,
                amplitude: 0.7,
                time_profile: TimeProfile::Harmonic {
                    mean: 1.0,
                    amplitude: 0.3,
                    phase: 0.1,
                },
            },
            Bump {
                center: vec![-0.3, 0.3],
                radius: 0.4,
                amplitude: -0.2,
                time_profile: TimeProfile::Constant,
            },
        ];
        HamiltonianSystem::new(saddle(), 1.0, bumps, 1.0).unwrap()
    }

    #[test]
    fn saddle_vector_field() {
        let h = HamiltonianSystem::unperturbed(saddle(), 1.0).unwrap();
        let v = h.vector_field(0.0, &DVector::from_vec(vec![1.0, 1.0]));
        assert_eq!(v.as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn outside_support_is_linear() {
        let h = bump_system();
        let lin = h.quadratic();
        for k in 0..50 {
            let a = k as f64 * 0.37;
            let z = DVector::from_vec(vec![1.2 * a.cos(), 1.2 * a.sin()]);
            assert_eq!(h.vector_field(0.3, &z), lin.vector_field(0.3, &z));
            assert_eq!(h.value(0.3, &z), lin.value(0.3, &z));
        }
    }

    #[test]
    fn bump_gradient_at_center_of_pure_bump() {
        let b = Bump {
            center: vec![0.0, 0.0],
            radius: 1.0,
            amplitude: 2.0,
            time_profile: TimeProfile::Constant,
        };
        let z = DVector::from_vec(vec![0.3, -0.1]);
        let mut g = DVector::zeros(2);
        b.add_gradient(0.0, &z, &mut g);
        let u: f64 = 0.1;
        let expect = -6.0 * 2.0 * (1.0 - u).powi(2);
        assert!((g[0] - expect * 0.3).abs() < 1e-14);
        assert!((g[1] + expect * 0.1).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = bump_system();
        let eps = 1e-6;
        for k in 0..40 {
            let z = DVector::from_vec(vec![(k as f64 * 0.7).sin() * 0.6, (k as f64 * 1.3).cos() * 0.6]);
            let t = k as f64 * 0.11;
            let g = h.gradient(t, &z);
            let hs = h.hessian(t, &z);
            for i in 0..2 {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[i] += eps;
                zm[i] -= eps;
                let fd = (h.value(t, &zp) - h.value(t, &zm)) / (2.0 * eps);
                assert!((fd - g[i]).abs() < 1e-7, "grad {i}: {fd} vs {}", g[i]);
                let fdg = (h.gradient(t, &zp) - h.gradient(t, &zm)) / (2.0 * eps);
                for j in 0..2 {
                    assert!((fdg[j] - hs[(j, i)]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn rejects_bump_outside_support() {
        let b = Bump {
            center: vec![0.8, 0.0],
            radius: 0.5,
            amplitude: 1.0,
            time_profile: TimeProfile::Constant,
        };
        assert!(HamiltonianSystem::new(saddle(), 1.0, vec![b], 1.0).is_err());
    }
}
