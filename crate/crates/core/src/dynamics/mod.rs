//! Flows, composition, iteration, action and norms for Hamiltonians that equal a
//! multiple of a hyperbolic quadratic form `Q` outside a compact set.
//!
//! Conventions: `ω = Σ dp_i ∧ dq_i`, `i_{X_H} ω = −dH`, hence `ṗ = −∂H/∂q`, `q̇ = ∂H/∂p`.

mod action;
mod compose;
mod hofer;
mod integrator;
mod periodize;
mod system;

pub use action::{action, action_along_flow, LoopSample};
pub use compose::{compose_natural, iterate, iterate_difference, Composition, Iterate, IterateDifference};
pub use hofer::{hofer_norm, hofer_norm_with, signed_sup_integral, HoferEstimate, HoferOptions};
pub use integrator::{exact_linear_flow, Integrator, Scheme, Trajectory};
pub use periodize::{periodize, Periodized, Ramp};
pub use system::{Bump, HamiltonianSystem, Perturbation, QuadraticHamiltonian, TimeProfile};

use nalgebra::{DMatrix, DVector};

use crate::linalg;

/// A time-dependent Hamiltonian `H(t, z)` on `R^{2n}`.
pub trait Hamiltonian: Sync {
    /// Phase-space dimension `2n`.
    fn dim(&self) -> usize;

    fn value(&self, t: f64, z: &DVector<f64>) -> f64;

    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64>;

    /// Defaults to central differences of the gradient.
    fn hessian(&self, t: f64, z: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let scale = 1.0 + z.amax();
        let h = 1e-6 * scale;
        let mut m = DMatrix::zeros(d, d);
        let mut zp = z.clone();
        for j in 0..d {
            zp[j] = z[j] + h;
            let gp = self.gradient(t, &zp);
            zp[j] = z[j] - h;
            let gm = self.gradient(t, &zp);
            zp[j] = z[j];
            m.set_column(j, &((gp - gm) / (2.0 * h)));
        }
        linalg::sym(&m)
    }

    fn is_autonomous(&self) -> bool {
        false
    }

    fn vector_field(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        hamiltonian_field(&self.gradient(t, z))
    }
}

/// `(∂H/∂p, ∂H/∂q) ↦ (−∂H/∂q, ∂H/∂p)`.
pub fn hamiltonian_field(grad: &DVector<f64>) -> DVector<f64> {
    let n = grad.len() / 2;
    DVector::from_fn(2 * n, |i, _| if i < n { -grad[n + i] } else { grad[i - n] })
}

impl<T: Hamiltonian + ?Sized> Hamiltonian for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        (**self).value(t, z)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        (**self).gradient(t, z)
    }
    fn hessian(&self, t: f64, z: &DVector<f64>) -> DMatrix<f64> {
        (**self).hessian(t, z)
    }
    fn is_autonomous(&self) -> bool {
        (**self).is_autonomous()
    }
}

impl<T: Hamiltonian + ?Sized + Send> Hamiltonian for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        (**self).value(t, z)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        (**self).gradient(t, z)
    }
    fn hessian(&self, t: f64, z: &DVector<f64>) -> DMatrix<f64> {
        (**self).hessian(t, z)
    }
    fn is_autonomous(&self) -> bool {
        (**self).is_autonomous()
    }
}

/// Pointwise sum `F + G`.
pub struct Sum<F, G>(pub F, pub G);

impl<F: Hamiltonian, G: Hamiltonian> Hamiltonian for Sum<F, G> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        self.0.value(t, z) + self.1.value(t, z)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        self.0.gradient(t, z) + self.1.gradient(t, z)
    }
    fn hessian(&self, t: f64, z: &DVector<f64>) -> DMatrix<f64> {
        self.0.hessian(t, z) + self.1.hessian(t, z)
    }
    fn is_autonomous(&self) -> bool {
        self.0.is_autonomous() && self.1.is_autonomous()
    }
}

/// Pointwise difference `F − G`.
pub struct Difference<F, G>(pub F, pub G);

impl<F: Hamiltonian, G: Hamiltonian> Hamiltonian for Difference<F, G> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        self.0.value(t, z) - self.1.value(t, z)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        self.0.gradient(t, z) - self.1.gradient(t, z)
    }
    fn hessian(&self, t: f64, z: &DVector<f64>) -> DMatrix<f64> {
        self.0.hessian(t, z) - self.1.hessian(t, z)
    }
    fn is_autonomous(&self) -> bool {
        self.0.is_autonomous() && self.1.is_autonomous()
    }
}

/// A Hamiltonian given by closures, mainly for tests and ad-hoc experiments.
pub struct FnHamiltonian<V, G> {
    pub dim: usize,
    pub value: V,
    pub gradient: G,
    pub autonomous: bool,
}

impl<V, G> Hamiltonian for FnHamiltonian<V, G>
where
    V: Fn(f64, &DVector<f64>) -> f64 + Sync,
    G: Fn(f64, &DVector<f64>) -> DVector<f64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        (self.value)(t, z)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        (self.gradient)(t, z)
    }
    fn is_autonomous(&self) -> bool {
        self.autonomous
    }
}
