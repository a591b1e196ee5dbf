use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{Hamiltonian, Integrator};
use crate::error::{Error, Result};

/// Smootherstep ramp `λ` rising from 0 to 1 on `[start, end] ⊂ [0, 1]`, constant elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ramp {
    pub start: f64,
    pub end: f64,
}

impl Default for Ramp {
    fn default() -> Self {
        Self { start: 0.1, end: 0.9 }
    }
}

impl Ramp {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        let r = Self { start, end };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.start && self.start < self.end && self.end <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "ramp must satisfy 0 <= start < end <= 1, got [{}, {}]",
                self.start, self.end
            )));
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        let x = ((t - self.start) / (self.end - self.start)).clamp(0.0, 1.0);
        x * x * x * (x * (6.0 * x - 15.0) + 10.0)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let w = self.end - self.start;
        let x = (t - self.start) / w;
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        30.0 * x * x * (x - 1.0) * (x - 1.0) / w
    }
}

/// `Ḡ_t = K + λ′(t) · g_{λ(t)} ∘ φ_K^{λ(t) − t}`, a one-periodic Hamiltonian whose time-one
/// map equals that of `K + g` when `K` is autonomous.
pub struct Periodized<K, G> {
    pub k: K,
    pub g: G,
    pub ramp: Ramp,
    pub integrator: Integrator,
}

pub fn periodize<K: Hamiltonian, G: Hamiltonian>(
    k: K,
    g: G,
    ramp: Ramp,
    integrator: Integrator,
) -> Result<Periodized<K, G>> {
    ramp.validate()?;
    if !k.is_autonomous() {
        return Err(Error::InvalidInput("periodize needs an autonomous K".into()));
    }
    if k.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: g.dim(),
        });
    }
    Ok(Periodized { k, g, ramp, integrator })
}

impl<K: Hamiltonian, G: Hamiltonian> Periodized<K, G> {
    fn phase(t: f64) -> f64 {
        t.rem_euclid(1.0)
    }

    pub fn try_value(&self, t: f64, z: &DVector<f64>) -> Result<f64> {
        let s = Self::phase(t);
        let d = self.ramp.derivative(s);
        let mut v = self.k.value(t, z);
        if d != 0.0 {
            let l = self.ramp.value(s);
            let w = self.integrator.flow(&self.k, 0.0, l - s, z)?;
            v += d * self.g.value(l, &w);
        }
        Ok(v)
    }

    pub fn try_gradient(&self, t: f64, z: &DVector<f64>) -> Result<DVector<f64>> {
        let s = Self::phase(t);
        let d = self.ramp.derivative(s);
        let mut g = self.k.gradient(t, z);
        if d != 0.0 {
            let l = self.ramp.value(s);
            let (w, m) = self.integrator.flow_with_jacobian(&self.k, 0.0, l - s, z)?;
            g += m.transpose() * self.g.gradient(l, &w) * d;
        }
        Ok(g)
    }
}

impl<K: Hamiltonian, G: Hamiltonian> Hamiltonian for Periodized<K, G> {
    fn dim(&self) -> usize {
        self.k.dim()
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        self.try_value(t, z).unwrap_or(f64::NAN)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        self.try_gradient(t, z)
            .unwrap_or_else(|_| DVector::from_element(z.len(), f64::NAN))
    }
}
