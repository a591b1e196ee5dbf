use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::indices::SymplecticPath;
use crate::quadform::{vector_field_matrix, NormalFrame};

/// Time-stepping scheme. Both are symplectic and preserve quadratic invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Plain implicit midpoint, second order.
    Midpoint,
    /// Triple-jump composition of implicit midpoint steps, fourth order.
    #[default]
    TripleJump,
}

const CBRT2: f64 = 1.259_921_049_894_873_2;

impl Scheme {
    fn fractions(self) -> &'static [f64] {
        const MID: [f64; 1] = [1.0];
        const TJ: [f64; 3] = [
            1.0 / (2.0 - CBRT2),
            -CBRT2 / (2.0 - CBRT2),
            1.0 / (2.0 - CBRT2),
        ];
        match self {
            Scheme::Midpoint => &MID,
            Scheme::TripleJump => &TJ,
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Scheme::Midpoint => 2,
            Scheme::TripleJump => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integrator {
    /// Largest time step; intervals are split into equal steps not exceeding it.
    pub step: f64,
    pub scheme: Scheme,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self::new(1e-2)
    }
}

/// Sampled solution `t ↦ z(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.states.first().map_or(0, |z| z.len() / 2);
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("p{i}")));
        header.extend((1..=n).map(|i| format!("q{i}")));
        w.write_record(&header).map_err(io_err)?;
        for (t, z) in self.times.iter().zip(&self.states) {
            let mut row = vec![t.to_string()];
            row.extend(z.iter().map(|x| x.to_string()));
            w.write_record(&row).map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::InvalidInput(e.to_string()))?;
        self.write_csv(f)
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::InvalidInput(e.to_string())
}

/// `DX = Jₛ · Hess H`.
fn field_jacobian<H: Hamiltonian + ?Sized>(h: &H, t: f64, z: &DVector<f64>) -> DMatrix<f64> {
    let hs = h.hessian(t, z);
    let n = z.len() / 2;
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n {
            -hs[(n + i, j)]
        } else {
            hs[(i - n, j)]
        }
    })
}

impl Integrator {
    pub fn new(step: f64) -> Self {
        Self {
            step,
            scheme: Scheme::TripleJump,
            newton_tol: 1e-14,
            max_newton: 50,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidInput(format!("step must be positive, got {}", self.step)));
        }
        Ok(())
    }

    fn step_count(&self, span: f64) -> usize {
        ((span.abs() / self.step).ceil() as usize).max(1)
    }

    /// One implicit midpoint step; returns the midpoint `y = (z0 + z1)/2`.
    fn midpoint<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        t: f64,
        dt: f64,
        z0: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let tm = t + 0.5 * dt;
        let half = 0.5 * dt;
        let mut y = z0 + h.vector_field(t, z0) * half;
        let dim = z0.len();
        let id = DMatrix::<f64>::identity(dim, dim);
        let mut last = f64::INFINITY;
        for _ in 0..self.max_newton {
            let f = &y - z0 - h.vector_field(tm, &y) * half;
            let jac = &id - field_jacobian(h, tm, &y) * half;
            let delta = jac.lu().solve(&f).ok_or(Error::Integration {
                t,
                suggested_step: 0.5 * dt.abs(),
            })?;
            y -= &delta;
            let size = delta.amax();
            if !size.is_finite() {
                break;
            }
            if size <= self.newton_tol * (1.0 + y.amax()) || (size >= last && size < 1e-12 * (1.0 + y.amax())) {
                return Ok(y);
            }
            last = size;
        }
        Err(Error::Integration {
            t,
            suggested_step: 0.5 * dt.abs(),
        })
    }

    fn advance<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        t: f64,
        dt: f64,
        z: &mut DVector<f64>,
        mut jac: Option<&mut DMatrix<f64>>,
    ) -> Result<()> {
        let mut s = t;
        for &frac in self.scheme.fractions() {
            let sub = frac * dt;
            let y = self.midpoint(h, s, sub, z)?;
            if let Some(m) = jac.as_deref_mut() {
                let dx = field_jacobian(h, s + 0.5 * sub, &y) * (0.5 * sub);
                let dim = z.len();
                let id = DMatrix::<f64>::identity(dim, dim);
                let rhs = (&id + &dx) * &*m;
                *m = (&id - &dx).lu().solve(&rhs).ok_or(Error::Integration {
                    t: s,
                    suggested_step: 0.5 * dt.abs(),
                })?;
            }
            *z = &y * 2.0 - &*z;
            s += sub;
        }
        Ok(())
    }

    /// `φ_H^{t0 → t1}(z0)`; `t1 < t0` integrates backwards.
    pub fn flow<H: Hamiltonian + ?Sized>(&self, h: &H, t0: f64, t1: f64, z0: &DVector<f64>) -> Result<DVector<f64>> {
        self.validate()?;
        let steps = self.step_count(t1 - t0);
        let dt = (t1 - t0) / steps as f64;
        let mut z = z0.clone();
        for i in 0..steps {
            self.advance(h, t0 + i as f64 * dt, dt, &mut z, None)?;
        }
        Ok(z)
    }

    /// Flow together with its derivative `dφ`.
    pub fn flow_with_jacobian<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        t0: f64,
        t1: f64,
        z0: &DVector<f64>,
    ) -> Result<(DVector<f64>, DMatrix<f64>)> {
        self.validate()?;
        let steps = self.step_count(t1 - t0);
        let dt = (t1 - t0) / steps as f64;
        let mut z = z0.clone();
        let mut m = DMatrix::identity(z0.len(), z0.len());
        for i in 0..steps {
            self.advance(h, t0 + i as f64 * dt, dt, &mut z, Some(&mut m))?;
        }
        Ok((z, m))
    }

    /// States at every grid time, starting from `z0` at `grid[0]`.
    pub fn trajectory<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        z0: &DVector<f64>,
        grid: &[f64],
    ) -> Result<Trajectory> {
        let mut states = Vec::with_capacity(grid.len());
        let mut z = z0.clone();
        for (i, &t) in grid.iter().enumerate() {
            if i > 0 {
                z = self.flow(h, grid[i - 1], t, &z)?;
            }
            states.push(z.clone());
        }
        Ok(Trajectory {
            times: grid.to_vec(),
            states,
        })
    }

    /// `dφ^t` sampled on `grid` (which must start at the initial time).
    pub fn linearized_flow<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        z0: &DVector<f64>,
        grid: &[f64],
    ) -> Result<SymplecticPath> {
        self.validate()?;
        let dim = z0.len();
        let mut samples = Vec::with_capacity(grid.len());
        let mut z = z0.clone();
        let mut m = DMatrix::identity(dim, dim);
        for (i, &t) in grid.iter().enumerate() {
            if i > 0 {
                let t0 = grid[i - 1];
                let steps = self.step_count(t - t0);
                let dt = (t - t0) / steps as f64;
                for j in 0..steps {
                    self.advance(h, t0 + j as f64 * dt, dt, &mut z, Some(&mut m))?;
                }
            }
            samples.push((t - grid[0], m.clone()));
        }
        SymplecticPath::new(samples)
    }
}

/// `exp(t · X_{κQ})`.
pub fn exact_linear_flow(frame: &NormalFrame, kappa: f64, t: f64) -> DMatrix<f64> {
    (vector_field_matrix(frame) * (kappa * t)).exp()
}
