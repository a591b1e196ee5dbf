use nalgebra::{DMatrix, DVector};

use super::{Hamiltonian, Integrator};
use crate::error::{Error, Result};

/// `(K♮H)_t = K_t + H_t ∘ (φ_K^t)^{-1}`, generating `φ_K^t ∘ φ_H^t`.
///
/// The inverse flow is computed by integrating `K` backwards from `t` to `0`. The
/// [`Hamiltonian`] impl returns NaN if that integration fails; use the `try_` methods
/// to see the error.
pub struct Composition<K, H> {
    pub k: K,
    pub h: H,
    pub integrator: Integrator,
}

pub fn compose_natural<K: Hamiltonian, H: Hamiltonian>(k: K, h: H, integrator: Integrator) -> Result<Composition<K, H>> {
    if k.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: h.dim(),
        });
    }
    Ok(Composition { k, h, integrator })
}

impl<K: Hamiltonian, H: Hamiltonian> Composition<K, H> {
    pub fn try_value(&self, t: f64, z: &DVector<f64>) -> Result<f64> {
        let w = self.integrator.flow(&self.k, t, 0.0, z)?;
        Ok(self.k.value(t, z) + self.h.value(t, &w))
    }

    pub fn try_gradient(&self, t: f64, z: &DVector<f64>) -> Result<DVector<f64>> {
        let (w, m) = self.integrator.flow_with_jacobian(&self.k, t, 0.0, z)?;
        Ok(self.k.gradient(t, z) + m.transpose() * self.h.gradient(t, &w))
    }
}

impl<K: Hamiltonian, H: Hamiltonian> Hamiltonian for Composition<K, H> {
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

/// `H^{♮k}_t = Σ_{j<k} H_t ∘ (φ_H^t)^{-j}`, generating `(φ_H^t)^k`.
pub struct Iterate<H> {
    pub h: H,
    pub k: usize,
    pub integrator: Integrator,
}

pub fn iterate<H: Hamiltonian>(h: H, k: usize, integrator: Integrator) -> Result<Iterate<H>> {
    if k == 0 {
        return Err(Error::InvalidInput("iteration count must be at least 1".into()));
    }
    Ok(Iterate { h, k, integrator })
}

impl<H: Hamiltonian> Iterate<H> {
    /// The points `(φ_H^t)^{-j} z`, `j = 0..count`.
    pub fn preimages(&self, t: f64, z: &DVector<f64>, count: usize) -> Result<Vec<DVector<f64>>> {
        let mut pts = Vec::with_capacity(count);
        let mut w = z.clone();
        for j in 0..count {
            if j > 0 {
                w = self.integrator.flow(&self.h, t, 0.0, &w)?;
            }
            pts.push(w.clone());
        }
        Ok(pts)
    }

    pub fn try_value(&self, t: f64, z: &DVector<f64>) -> Result<f64> {
        Ok(self
            .preimages(t, z, self.k)?
            .iter()
            .map(|w| self.h.value(t, w))
            .sum())
    }

    pub fn try_gradient(&self, t: f64, z: &DVector<f64>) -> Result<DVector<f64>> {
        let dim = z.len();
        let mut w = z.clone();
        let mut m = DMatrix::<f64>::identity(dim, dim);
        let mut g = self.h.gradient(t, &w);
        for _ in 1..self.k {
            let (next, step) = self.integrator.flow_with_jacobian(&self.h, t, 0.0, &w)?;
            m = step * m;
            w = next;
            g += m.transpose() * self.h.gradient(t, &w);
        }
        Ok(g)
    }
}

impl<H: Hamiltonian> Hamiltonian for Iterate<H> {
    fn dim(&self) -> usize {
        self.h.dim()
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        self.try_value(t, z).unwrap_or(f64::NAN)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        self.try_gradient(t, z)
            .unwrap_or_else(|_| DVector::from_element(z.len(), f64::NAN))
    }
    fn is_autonomous(&self) -> bool {
        self.h.is_autonomous()
    }
}

/// `H^{♮to} − H^{♮from} = Σ_{from ≤ j < to} H_t ∘ (φ_H^t)^{-j}`, summed directly.
pub struct IterateDifference<H> {
    pub h: H,
    pub from: usize,
    pub to: usize,
    pub integrator: Integrator,
}

pub fn iterate_difference<H: Hamiltonian>(
    h: H,
    from: usize,
    to: usize,
    integrator: Integrator,
) -> Result<IterateDifference<H>> {
    if from == 0 || to < from {
        return Err(Error::InvalidInput(format!(
            "need 1 <= from <= to, got from = {from}, to = {to}"
        )));
    }
    Ok(IterateDifference { h, from, to, integrator })
}

impl<H: Hamiltonian> IterateDifference<H> {
    pub fn try_value(&self, t: f64, z: &DVector<f64>) -> Result<f64> {
        let mut w = z.clone();
        let mut total = 0.0;
        for j in 0..self.to {
            if j > 0 {
                w = self.integrator.flow(&self.h, t, 0.0, &w)?;
            }
            if j >= self.from {
                total += self.h.value(t, &w);
            }
        }
        Ok(total)
    }

    pub fn try_gradient(&self, t: f64, z: &DVector<f64>) -> Result<DVector<f64>> {
        let dim = z.len();
        let mut w = z.clone();
        let mut m = DMatrix::<f64>::identity(dim, dim);
        let mut g = DVector::zeros(dim);
        for j in 0..self.to {
            if j > 0 {
                let (next, step) = self.integrator.flow_with_jacobian(&self.h, t, 0.0, &w)?;
                m = step * m;
                w = next;
            }
            if j >= self.from {
                g += m.transpose() * self.h.gradient(t, &w);
            }
        }
        Ok(g)
    }
}

impl<H: Hamiltonian> Hamiltonian for IterateDifference<H> {
    fn dim(&self) -> usize {
        self.h.dim()
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        self.try_value(t, z).unwrap_or(f64::NAN)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        self.try_gradient(t, z)
            .unwrap_or_else(|_| DVector::from_element(z.len(), f64::NAN))
    }
    fn is_autonomous(&self) -> bool {
        self.h.is_autonomous()
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;
    use crate::dynamics::{Bump, FnHamiltonian, HamiltonianSystem, TimeProfile};
    use crate::quadform::{build_normal_form, BlockSpec};

    fn system(profile: TimeProfile) -> HamiltonianSystem {
        let frame = build_normal_form(&BlockSpec::single(1.0, 1).unwrap()).unwrap();
        let bump = Bump {
            center: vec![0.1, 0.0],
            radius: 0.8,
            amplitude: 0.4,
            time_profile: profile,
        };
        HamiltonianSystem::new(frame, 1.0, vec![bump], 1.0).unwrap()
    }

    fn points() -> Vec<DVector<f64>> {
        (0..6)
            .map(|i| {
                let a = i as f64 * 1.1;
                DVector::from_vec(vec![0.5 * a.cos(), 0.4 * a.sin()])
            })
            .collect()
    }

    #[test]
    fn autonomous_iterate_is_multiple() {
        let h = system(TimeProfile::Constant);
        let it = iterate(&h, 4, Integrator::new(0.01)).unwrap();
        for z in points() {
            for t in [0.0, 0.37, 1.0] {
                assert!((it.value(t, &z) - 4.0 * h.value(t, &z)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn single_iterate_is_identity() {
        let h = system(TimeProfile::Harmonic {
            mean: 1.0,
            amplitude: 0.5,
            phase: 0.0,
        });
        let it = iterate(&h, 1, Integrator::new(0.01)).unwrap();
        for z in points() {
            assert_eq!(it.value(0.3, &z), h.value(0.3, &z));
            assert_eq!(it.gradient(0.3, &z), h.gradient(0.3, &z));
        }
    }

    #[test]
    fn composition_flow_is_composite_map() {
        let h = FnHamiltonian {
            dim: 2,
            value: |t: f64, z: &DVector<f64>| {
                z[0] * z[1] + 0.2 * (1.0 + 0.5 * (TAU * t).cos()) * z.norm_squared().powi(2)
            },
            gradient: |t: f64, z: &DVector<f64>| {
                DVector::from_vec(vec![z[1], z[0]])
                    + z * (0.8 * (1.0 + 0.5 * (TAU * t).cos()) * z.norm_squared())
            },
            autonomous: false,
        };
        let reference = Integrator::new(1e-3);
        let hh = compose_natural(&h, &h, Integrator::new(0.005)).unwrap();
        for z in points().into_iter().take(3) {
            let direct = reference
                .flow(&h, 0.0, 1.0, &reference.flow(&h, 0.0, 1.0, &z).unwrap())
                .unwrap();
            let composed = Integrator::new(0.005).flow(&hh, 0.0, 1.0, &z).unwrap();
            assert!((direct - composed).amax() < 1e-6);
        }
    }

    #[test]
    fn iterate_gradient_matches_finite_differences() {
        let h = system(TimeProfile::Harmonic {
            mean: 0.5,
            amplitude: 1.0,
            phase: 0.0,
        });
        let it = iterate(&h, 3, Integrator::new(0.005)).unwrap();
        let z = DVector::from_vec(vec![0.2, -0.3]);
        let g = it.gradient(0.6, &z);
        let eps = 1e-5;
        for i in 0..2 {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[i] += eps;
            zm[i] -= eps;
            let fd = (it.value(0.6, &zp) - it.value(0.6, &zm)) / (2.0 * eps);
            assert!((fd - g[i]).abs() < 1e-7);
        }
    }

    #[test]
    fn difference_matches_iterates() {
        let h = system(TimeProfile::Harmonic {
            mean: 0.5,
            amplitude: 1.0,
            phase: 0.2,
        });
        let integ = Integrator::new(0.01);
        let a = iterate(&h, 5, integ).unwrap();
        let b = iterate(&h, 2, integ).unwrap();
        let d = iterate_difference(&h, 2, 5, integ).unwrap();
        for z in points() {
            let expect = a.value(0.4, &z) - b.value(0.4, &z);
            assert!((d.value(0.4, &z) - expect).abs() < 1e-12);
            let ge = a.gradient(0.4, &z) - b.gradient(0.4, &z);
            assert!((d.gradient(0.4, &z) - ge).amax() < 1e-10);
        }
    }
}
