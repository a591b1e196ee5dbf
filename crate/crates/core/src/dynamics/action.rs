use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{Hamiltonian, Integrator};
use crate::error::{Error, Result};

/// Relative closure tolerance for sampled loops.
pub const CLOSURE_TOL: f64 = 1e-7;

/// Uniform samples of a loop `γ(t)`, `t ∈ [0, period]`; first and last points coincide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSample {
    pub points: Vec<DVector<f64>>,
    pub period: usize,
}

impl LoopSample {
    pub fn new(points: Vec<DVector<f64>>, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidInput("loop period must be at least 1".into()));
        }
        if points.len() < 16 * period + 1 {
            return Err(Error::InvalidInput(format!(
                "loop needs at least {} samples, got {}",
                16 * period + 1,
                points.len()
            )));
        }
        let s = Self { points, period };
        let gap = s.closure_gap();
        if gap > CLOSURE_TOL * (1.0 + s.scale()) {
            return Err(Error::OpenLoop { gap });
        }
        Ok(s)
    }

    pub fn constant(z: DVector<f64>, period: usize) -> Self {
        Self {
            points: vec![z; 16 * period + 1],
            period,
        }
    }

    /// Samples `φ^t(z0)` for `t ∈ [t0, t0 + period]` with `per_unit` intervals per unit time.
    pub fn along_flow<H: Hamiltonian + ?Sized>(
        h: &H,
        integ: &Integrator,
        z0: &DVector<f64>,
        t0: f64,
        period: usize,
        per_unit: usize,
    ) -> Result<Self> {
        let count = period * per_unit.max(16);
        let grid: Vec<f64> = (0..=count)
            .map(|j| t0 + period as f64 * j as f64 / count as f64)
            .collect();
        let traj = integ.trajectory(h, z0, &grid)?;
        Self::new(traj.states, period)
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.points.len() - 1;
        (0..=n)
            .map(|j| self.period as f64 * j as f64 / n as f64)
            .collect()
    }

    pub fn closure_gap(&self) -> f64 {
        (&self.points[0] - &self.points[self.points.len() - 1]).norm()
    }

    fn scale(&self) -> f64 {
        self.points.iter().fold(0.0, |m, z| m.max(z.amax()))
    }

    /// The `k`-fold traversal.
    pub fn iterate(&self, k: usize) -> Self {
        let mut points = Vec::with_capacity(k * (self.points.len() - 1) + 1);
        for _ in 0..k {
            points.extend_from_slice(&self.points[..self.points.len() - 1]);
        }
        points.push(self.points[0].clone());
        Self {
            points,
            period: self.period * k,
        }
    }
}

/// `½ (p·dq − q·dp)` between consecutive samples, summed (exact for the polygon).
fn polygon_area(points: &[DVector<f64>]) -> f64 {
    let n = points[0].len() / 2;
    let mut s = 0.0;
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for i in 0..n {
            s += a[i] * b[n + i] - a[n + i] * b[i];
        }
    }
    0.5 * s
}

/// `A_H(γ) = −∮ ½(p dq − q dp) + ∫ H_t(γ(t)) dt`, trapezoidal quadrature for the
/// Hamiltonian term. A counterclockwise circle of radius ρ in a `(p_i, q_i)` plane
/// has area term `πρ²`, so with `H ≡ 0` its action is `−πρ²`.
pub fn action<H: Hamiltonian + ?Sized>(h: &H, lp: &LoopSample) -> Result<f64> {
    let gap = lp.closure_gap();
    if gap > CLOSURE_TOL * (1.0 + lp.scale()) {
        return Err(Error::OpenLoop { gap });
    }
    if lp.points[0].len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: lp.points[0].len(),
        });
    }
    let times = lp.times();
    let dt = lp.period as f64 / (lp.points.len() - 1) as f64;
    let last = times.len() - 1;
    let ham: f64 = times
        .iter()
        .zip(&lp.points)
        .enumerate()
        .map(|(j, (&t, z))| {
            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
            w * h.value(t, z)
        })
        .sum::<f64>()
        * dt;
    Ok(-polygon_area(&lp.points) + ham)
}

/// Action of the orbit segment `φ^t(z0)`, `t ∈ [t0, t0 + duration]`, computed from the
/// velocity form `−½(p·q̇ − q·ṗ) + H` with Simpson's rule on `intervals` (rounded up to even)
/// subintervals. For a closed orbit this equals [`action`] of the sampled loop.
pub fn action_along_flow<H: Hamiltonian + ?Sized>(
    h: &H,
    integ: &Integrator,
    z0: &DVector<f64>,
    t0: f64,
    duration: f64,
    intervals: usize,
) -> Result<f64> {
    let m = (intervals.max(2) + 1) / 2 * 2;
    let dt = duration / m as f64;
    let n = z0.len() / 2;
    let mut z = z0.clone();
    let mut total = 0.0;
    for j in 0..=m {
        let t = t0 + j as f64 * dt;
        if j > 0 {
            z = integ.flow(h, t - dt, t, &z)?;
        }
        let v = h.vector_field(t, &z);
        let mut lam = 0.0;
        for i in 0..n {
            lam += z[i] * v[n + i] - z[n + i] * v[i];
        }
        let integrand = -0.5 * lam + h.value(t, &z);
        let w = if j == 0 || j == m {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        total += w * integrand;
    }
    Ok(total * dt / 3.0)
}
