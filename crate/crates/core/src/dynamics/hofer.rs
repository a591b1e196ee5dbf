use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Hamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoferOptions {
    pub ball_radius: f64,
    /// Grid points per axis across the ball's bounding cube.
    pub grid_density: usize,
    /// Trapezoid intervals on `[0, 1]`; ignored for autonomous `F`.
    pub time_samples: usize,
    /// Pattern-search refinement of the best grid candidates.
    pub refine: bool,
}

impl HoferOptions {
    pub fn new(ball_radius: f64, grid_density: usize) -> Self {
        Self {
            ball_radius,
            grid_density,
            time_samples: 8,
            refine: true,
        }
    }
}

/// `∫_{S¹} sup_B |F_t| dt` together with the resolution it was computed at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoferEstimate {
    pub value: f64,
    pub ball_radius: f64,
    pub grid_spacing: f64,
    pub points_per_slice: usize,
    pub time_slices: usize,
    /// Per-slice `(t, sup |F_t|, argmax)`.
    pub slices: Vec<(f64, f64, Vec<f64>)>,
}

pub fn hofer_norm<F: Hamiltonian + ?Sized>(f: &F, ball_radius: f64, grid_density: usize) -> HoferEstimate {
    hofer_norm_with(f, &HoferOptions::new(ball_radius, grid_density))
}

/// Candidate points: a cube grid restricted to the ball plus the radial projections of
/// the outside grid points onto the sphere.
fn sample_points(dim: usize, radius: f64, density: usize) -> (Vec<DVector<f64>>, f64) {
    let n = density.max(2);
    let spacing = 2.0 * radius / (n - 1) as f64;
    let total = n.pow(dim as u32);
    let mut pts = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        let z = DVector::from_fn(dim, |i, _| -radius + idx[i] as f64 * spacing);
        let norm = z.norm();
        if norm <= radius {
            pts.push(z);
        } else {
            pts.push(z * (radius / norm));
        }
        for d in idx.iter_mut() {
            *d += 1;
            if *d < n {
                break;
            }
            *d = 0;
        }
    }
    (pts, spacing)
}

fn project(z: DVector<f64>, radius: f64) -> DVector<f64> {
    let norm = z.norm();
    if norm > radius {
        z * (radius / norm)
    } else {
        z
    }
}

fn objective<F: Hamiltonian + ?Sized>(f: &F, t: f64, z: &DVector<f64>, signed: bool) -> f64 {
    let v = f.value(t, z);
    if signed {
        v
    } else {
        v.abs()
    }
}

fn refine<F: Hamiltonian + ?Sized>(
    f: &F,
    t: f64,
    start: &DVector<f64>,
    radius: f64,
    spacing: f64,
    signed: bool,
) -> (f64, DVector<f64>) {
    let mut best = start.clone();
    let mut best_val = objective(f, t, &best, signed);
    let mut step = 0.5 * spacing;
    let dim = start.len();
    while step > 1e-10 * (1.0 + radius) {
        let mut improved = false;
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut cand = best.clone();
                cand[i] += sign * step;
                let cand = project(cand, radius);
                let v = objective(f, t, &cand, signed);
                if v > best_val {
                    best_val = v;
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best_val, best)
}

fn slice_sup<F: Hamiltonian + ?Sized>(
    f: &F,
    t: f64,
    pts: &[DVector<f64>],
    opts: &HoferOptions,
    spacing: f64,
    signed: bool,
) -> (f64, DVector<f64>) {
    let mut vals: Vec<(f64, usize)> = pts
        .par_iter()
        .enumerate()
        .map(|(i, z)| (objective(f, t, z, signed), i))
        .collect();
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut best, i0) = vals[0];
    let mut arg = pts[i0].clone();
    if opts.refine {
        let refined: Vec<(f64, DVector<f64>)> = vals
            .iter()
            .take(4)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&&(_, i)| refine(f, t, &pts[i], opts.ball_radius, spacing, signed))
            .collect();
        for (v, z) in refined {
            if v > best {
                best = v;
                arg = z;
            }
        }
    }
    (best, arg)
}

/// Grid approximation of `‖F‖_B` for the ball `B` of the given radius about the origin.
/// Autonomous `F` is evaluated on the single slice `t = 1/2`.
pub fn hofer_norm_with<F: Hamiltonian + ?Sized>(f: &F, opts: &HoferOptions) -> HoferEstimate {
    ball_sup_integral(f, opts, false)
}

/// `∫_{S¹} sup_B F_t dt` without absolute values, on the same grid as [`hofer_norm_with`].
pub fn signed_sup_integral<F: Hamiltonian + ?Sized>(f: &F, opts: &HoferOptions) -> HoferEstimate {
    ball_sup_integral(f, opts, true)
}

fn ball_sup_integral<F: Hamiltonian + ?Sized>(f: &F, opts: &HoferOptions, signed: bool) -> HoferEstimate {
    let (pts, spacing) = sample_points(f.dim(), opts.ball_radius, opts.grid_density);
    let times: Vec<f64> = if f.is_autonomous() {
        vec![0.5]
    } else {
        let m = opts.time_samples.max(1);
        (0..=m).map(|j| j as f64 / m as f64).collect()
    };
    let mut slices = Vec::with_capacity(times.len());
    for &t in &times {
        let (v, z) = slice_sup(f, t, &pts, opts, spacing, signed);
        slices.push((t, v, z.iter().copied().collect()));
    }
    let value = if slices.len() == 1 {
        slices[0].1
    } else {
        let m = slices.len() - 1;
        slices
            .iter()
            .enumerate()
            .map(|(j, s)| if j == 0 || j == m { 0.5 * s.1 } else { s.1 })
            .sum::<f64>()
            / m as f64
    };
    HoferEstimate {
        value,
        ball_radius: opts.ball_radius,
        grid_spacing: spacing,
        points_per_slice: pts.len(),
        time_slices: times.len(),
        slices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FnHamiltonian, HamiltonianSystem};
    use crate::quadform::{build_normal_form, BlockSpec};

    #[test]
    fn constant_function() {
        let f = FnHamiltonian {
            dim: 2,
            value: |_t: f64, _z: &DVector<f64>| 1.0,
            gradient: |_t: f64, z: &DVector<f64>| DVector::zeros(z.len()),
            autonomous: false,
        };
        let est = hofer_norm(&f, 2.0, 11);
        assert!((est.value - 1.0).abs() < 1e-15);
        assert_eq!(est.time_slices, 9);
    }

    #[test]
    fn saddle_on_unit_ball() {
        let frame = build_normal_form(&BlockSpec::single(1.0, 1).unwrap()).unwrap();
        let h = HamiltonianSystem::unperturbed(frame, 1.0).unwrap();
        let est = hofer_norm(&h, 1.0, 8);
        assert!((est.value - 0.5).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn time_dependent_quadrature() {
        // sup_B |(1 + t) ρ²| on B(1) is 1 + t; its integral is 3/2 (trapezoid exact for linear).
        let f = FnHamiltonian {
            dim: 2,
            value: |t: f64, z: &DVector<f64>| (1.0 + t) * z.norm_squared(),
            gradient: |t: f64, z: &DVector<f64>| z * (2.0 * (1.0 + t)),
            autonomous: false,
        };
        let est = hofer_norm(&f, 1.0, 9);
        assert!((est.value - 1.5).abs() < 1e-12);
    }
}
