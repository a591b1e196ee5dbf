//! Fixed points and periodic orbits of time-one maps, found by multiple shooting.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{action_along_flow, Hamiltonian, HamiltonianSystem, Integrator, LoopSample};
use crate::error::{Error, Result};
use crate::indices::{index_report, is_degenerate, mean_index, rotation_function, IndexReport, SymplecticPath};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitOptions {
    pub integrator: Integrator,
    /// Target for the largest shooting defect, relative to `1 + max|z|`.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Acceptance threshold on the shooting residual.
    pub closure_tol: f64,
    /// Hausdorff distance below which two orbits are merged.
    pub dedup_tol: f64,
    /// Loop and monodromy samples per unit time.
    pub samples_per_unit: usize,
    /// Iterates leaving this radius are abandoned.
    pub escape_radius: f64,
    /// Compute the 2D topological index when the monodromy norm is below this.
    pub index_norm_cap: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::new(0.01),
            newton_tol: 1e-12,
            max_newton: 40,
            closure_tol: 1e-9,
            dedup_tol: 1e-6,
            samples_per_unit: 64,
            escape_radius: 10.0,
            index_norm_cap: 1e6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub z0: DVector<f64>,
    pub period: usize,
    /// `z_j = φ^j(z0)`, `j < period`, as solved by the shooting.
    pub points: Vec<DVector<f64>>,
    pub samples: LoopSample,
    pub monodromy: SymplecticPath,
    pub action: f64,
    pub index: IndexReport,
    pub minimal_period: usize,
    /// Largest defect `‖φ(z_j) − z_{j+1}‖` over the shooting segments.
    pub residual: f64,
    pub degenerate: bool,
    pub max_radius: f64,
    /// Winding number of `φ^k − id`; 2D only, `None` when not computed.
    pub topological_index: Option<i64>,
}

impl PeriodicOrbit {
    pub fn is_simple(&self) -> bool {
        self.minimal_period == self.period
    }

    pub fn mean_index(&self) -> f64 {
        self.index.mean
    }

    pub fn gap_ok(&self) -> bool {
        self.index.gap_ok
    }

    pub fn confined_to(&self, radius: f64) -> bool {
        self.max_radius <= radius
    }
}

/// Hausdorff distance between the point sets of two orbits.
pub fn orbit_distance(a: &PeriodicOrbit, b: &PeriodicOrbit) -> f64 {
    hausdorff(&a.points, &b.points)
}

fn hausdorff(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    let one_sided = |x: &[DVector<f64>], y: &[DVector<f64>]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

fn scale(points: &[DVector<f64>]) -> f64 {
    points.iter().fold(0.0, |m, z| m.max(z.amax()))
}

/// Defects `φ(z_i) − z_{i+1}` and segment Jacobians.
fn shoot<H: Hamiltonian + ?Sized>(
    h: &H,
    integ: &Integrator,
    z: &[DVector<f64>],
    with_jacobian: bool,
) -> Result<(Vec<DVector<f64>>, Vec<DMatrix<f64>>)> {
    let k = z.len();
    let mut defects = Vec::with_capacity(k);
    let mut jacs = Vec::with_capacity(k);
    for (i, zi) in z.iter().enumerate() {
        let t0 = i as f64;
        let end = if with_jacobian {
            let (end, m) = integ.flow_with_jacobian(h, t0, t0 + 1.0, zi)?;
            jacs.push(m);
            end
        } else {
            integ.flow(h, t0, t0 + 1.0, zi)?
        };
        defects.push(end - &z[(i + 1) % k]);
    }
    Ok((defects, jacs))
}

fn max_norm(v: &[DVector<f64>]) -> f64 {
    v.iter().map(|d| d.norm()).fold(0.0, f64::max)
}

/// Damped Newton on the shooting system. Returns the solved points and final residual, or
/// `None` when it stalls.
fn newton_shooting<H: Hamiltonian + ?Sized>(
    h: &H,
    guess: Vec<DVector<f64>>,
    opts: &OrbitOptions,
) -> Option<(Vec<DVector<f64>>, f64)> {
    let k = guess.len();
    let d = guess[0].len();
    let integ = &opts.integrator;
    let mut z = guess;
    let (mut defects, mut jacs) = shoot(h, integ, &z, true).ok()?;
    let mut res = max_norm(&defects);
    for _ in 0..opts.max_newton {
        if !res.is_finite() {
            return None;
        }
        if res < opts.newton_tol * (1.0 + scale(&z)) {
            return Some((z, res));
        }
        let size = d * k;
        let mut a = DMatrix::<f64>::zeros(size, size);
        let mut rhs = DVector::<f64>::zeros(size);
        for i in 0..k {
            let next = (i + 1) % k;
            a.view_mut((i * d, i * d), (d, d)).copy_from(&jacs[i]);
            for r in 0..d {
                a[(i * d + r, next * d + r)] -= 1.0;
                rhs[i * d + r] = -defects[i][r];
            }
        }
        let step = a.lu().solve(&rhs)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<DVector<f64>> = (0..k)
                .map(|i| &z[i] + step.rows(i * d, d) * lambda)
                .collect();
            if trial.iter().any(|p| p.norm() > opts.escape_radius) {
                lambda *= 0.5;
                continue;
            }
            if let Ok((td, tj)) = shoot(h, integ, &trial, true) {
                let tr = max_norm(&td);
                if tr.is_finite() && tr < res {
                    z = trial;
                    defects = td;
                    jacs = tj;
                    res = tr;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return (res < opts.newton_tol * (1.0 + scale(&z))).then_some((z, res));
        }
    }
    (res < opts.newton_tol * (1.0 + scale(&z))).then_some((z, res))
}

/// Iterates `z_0 … z_{count−1}` of the time-one map, stopping early on escape.
fn forward_orbit<H: Hamiltonian + ?Sized>(
    h: &H,
    integ: &Integrator,
    seed: &DVector<f64>,
    count: usize,
    escape_radius: f64,
) -> Vec<DVector<f64>> {
    let mut pts = Vec::with_capacity(count);
    let mut z = seed.clone();
    for i in 0..count {
        if i > 0 {
            match integ.flow(h, (i - 1) as f64, i as f64, &z) {
                Ok(next) if next.norm() <= escape_radius => z = next,
                _ => break,
            }
        }
        pts.push(z.clone());
    }
    pts
}

fn divisors(k: usize) -> Vec<usize> {
    (1..=k).filter(|d| k % d == 0).collect()
}

/// Smallest divisor `d` of the period with `‖z_d − z_0‖` below `tol`.
pub fn minimal_period(orbit: &PeriodicOrbit, tol: f64) -> usize {
    minimal_period_of(&orbit.points, tol)
}

fn minimal_period_of(points: &[DVector<f64>], tol: f64) -> usize {
    let k = points.len();
    let tol = tol * (1.0 + scale(points));
    divisors(k)
        .into_iter()
        .find(|&d| d == k || (&points[d] - &points[0]).norm() < tol)
        .unwrap_or(k)
}

fn rho_arg(m: &DMatrix<f64>) -> Option<f64> {
    rotation_function(m).ok().map(|r| r.arg())
}

/// Advances `(z, local)` from `t0` to `t1`, bisecting until consecutive samples of the full
/// path `local · carried` differ by less than π/8 in the rotation function.
#[allow(clippy::too_many_arguments)]
fn linearize_adaptive<H: Hamiltonian + ?Sized>(
    h: &H,
    integ: &Integrator,
    t0: f64,
    t1: f64,
    z: &mut DVector<f64>,
    local: &mut DMatrix<f64>,
    carried: &DMatrix<f64>,
    path: &mut Vec<(f64, DMatrix<f64>)>,
    depth: usize,
) -> Result<()> {
    let (z1, step) = integ.flow_with_jacobian(h, t0, t1, z)?;
    let m1 = &step * &*local;
    let before = rho_arg(&(&*local * carried));
    let after = rho_arg(&(&m1 * carried));
    let jump = match (before, after) {
        (Some(a), Some(b)) => linalg::wrap_angle(b - a).abs(),
        _ => 0.0,
    };
    if jump >= PI / 8.0 && depth < 16 {
        let mid = 0.5 * (t0 + t1);
        linearize_adaptive(h, integ, t0, mid, z, local, carried, path, depth + 1)?;
        return linearize_adaptive(h, integ, mid, t1, z, local, carried, path, depth + 1);
    }
    *z = z1;
    *local = m1;
    path.push((t1, &*local * carried));
    Ok(())
}

/// Loop samples, monodromy path and action assembled segment by segment from the solved
/// shooting points, so roundoff is not amplified across the whole period.
fn assemble<H: Hamiltonian + ?Sized>(
    h: &H,
    points: Vec<DVector<f64>>,
    residual: f64,
    opts: &OrbitOptions,
) -> Result<PeriodicOrbit> {
    let k = points.len();
    let d = points[0].len();
    let integ = &opts.integrator;
    let per = opts.samples_per_unit.max(16);
    let mut loop_pts = Vec::with_capacity(k * per + 1);
    let mut path = Vec::with_capacity(k * per + 1);
    path.push((0.0, DMatrix::<f64>::identity(d, d)));
    let mut carried = DMatrix::<f64>::identity(d, d);
    let mut act = 0.0;
    for (i, zi) in points.iter().enumerate() {
        let t0 = i as f64;
        let grid: Vec<f64> = (0..=per).map(|j| t0 + j as f64 / per as f64).collect();
        let traj = integ.trajectory(h, zi, &grid)?;
        loop_pts.extend_from_slice(&traj.states[..per]);
        let mut z = zi.clone();
        let mut local = DMatrix::<f64>::identity(d, d);
        for w in grid.windows(2) {
            linearize_adaptive(h, integ, w[0], w[1], &mut z, &mut local, &carried, &mut path, 0)?;
        }
        carried = local * &carried;
        act += action_along_flow(h, integ, zi, t0, 1.0, per)?;
    }
    loop_pts.push(points[0].clone());
    let max_radius = loop_pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let samples = LoopSample::new(loop_pts, k)?;
    let monodromy = SymplecticPath::new(path)?;
    let degenerate = is_degenerate(monodromy.monodromy());
    let index = index_report(&monodromy).unwrap_or_else(|_| IndexReport {
        cz: None,
        mean: mean_index(&monodromy).unwrap_or(f64::NAN),
        nondegenerate: !degenerate,
        gap_ok: false,
    });
    let minimal_period = minimal_period_of(&points, 1e-7);
    Ok(PeriodicOrbit {
        z0: points[0].clone(),
        period: k,
        points,
        samples,
        monodromy,
        action: act,
        index,
        minimal_period,
        residual,
        degenerate,
        max_radius,
        topological_index: None,
    })
}

/// Newton from an initial guess for the whole orbit (`guess.len()` is the period).
pub fn refine_orbit<H: Hamiltonian + ?Sized>(
    h: &H,
    guess: Vec<DVector<f64>>,
    opts: &OrbitOptions,
) -> Option<PeriodicOrbit> {
    if guess.is_empty() {
        return None;
    }
    let (points, residual) = newton_shooting(h, guess, opts)?;
    if residual >= opts.closure_tol {
        return None;
    }
    assemble(h, points, residual, opts).ok()
}

fn dedup(mut orbits: Vec<PeriodicOrbit>, tol: f64) -> Vec<PeriodicOrbit> {
    orbits.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut kept: Vec<PeriodicOrbit> = Vec::new();
    for o in orbits {
        if !kept
            .iter()
            .any(|k| k.period == o.period && orbit_distance(k, &o) < tol)
        {
            kept.push(o);
        }
    }
    kept.sort_by(|a, b| {
        a.z0.iter()
            .zip(b.z0.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|c| c.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    kept
}

/// Fills in the 2D topological index of each orbit, using the other orbits of the list as
/// the fixed points to stay away from.
fn attach_topological_indices<H: Hamiltonian + ?Sized>(h: &H, orbits: &mut [PeriodicOrbit], opts: &OrbitOptions) {
    if orbits.first().is_none_or(|o| o.z0.len() != 2) {
        return;
    }
    let all: Vec<Vec<DVector<f64>>> = orbits.iter().map(|o| o.points.clone()).collect();
    let idx: Vec<Option<i64>> = orbits
        .par_iter()
        .enumerate()
        .map(|(i, o)| {
            if o.monodromy.monodromy().amax() > opts.index_norm_cap {
                return None;
            }
            let others: Vec<DVector<f64>> = all
                .iter()
                .enumerate()
                .flat_map(|(j, pts)| {
                    pts.iter()
                        .enumerate()
                        .filter(move |&(m, _)| j != i || m != 0)
                        .map(|(_, p)| p.clone())
                })
                .collect();
            topological_index_2d(h, &opts.integrator, &o.z0, o.period, &others).ok()
        })
        .collect();
    for (o, i) in orbits.iter_mut().zip(idx) {
        o.topological_index = i;
    }
}

/// `k`-periodic orbits (iterated ones included) reached by Newton from the seeds. Each seed's
/// first `k` iterates form the initial shooting guess.
pub fn find_periodic<H: Hamiltonian + ?Sized>(
    h: &H,
    k: usize,
    seeds: &[DVector<f64>],
    opts: &OrbitOptions,
) -> Result<Vec<PeriodicOrbit>> {
    if k == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let found: Vec<PeriodicOrbit> = seeds
        .par_iter()
        .filter_map(|s| {
            let guess = forward_orbit(h, &opts.integrator, s, k, opts.escape_radius);
            if guess.len() < k {
                return None;
            }
            refine_orbit(h, guess, opts)
        })
        .collect();
    let mut orbits = dedup(found, opts.dedup_tol);
    attach_topological_indices(h, &mut orbits, opts);
    Ok(orbits)
}

fn vanishes_at_origin<H: Hamiltonian + ?Sized>(h: &H) -> bool {
    let zero = DVector::zeros(h.dim());
    (0..16).all(|j| h.gradient(j as f64 / 16.0, &zero).amax() == 0.0)
}

/// Fixed points reached from the seeds. The origin is included whenever `∇H_t(0) = 0`.
pub fn find_fixed_points<H: Hamiltonian + ?Sized>(
    h: &H,
    seeds: &[DVector<f64>],
    opts: &OrbitOptions,
) -> Result<Vec<PeriodicOrbit>> {
    let mut all = seeds.to_vec();
    if vanishes_at_origin(h) {
        all.push(DVector::zeros(h.dim()));
    }
    find_periodic(h, 1, &all, opts)
}

/// Winding number of `φ^k(z) − z` along a circle.
fn winding<H: Hamiltonian + ?Sized>(
    h: &H,
    integ: &Integrator,
    z0: &DVector<f64>,
    period: usize,
    radius: f64,
) -> Result<i64> {
    let disp = |a: f64| -> Result<(f64, f64)> {
        let z = DVector::from_vec(vec![z0[0] + radius * a.cos(), z0[1] + radius * a.sin()]);
        let mut w = z.clone();
        for i in 0..period {
            w = integ.flow(h, i as f64, i as f64 + 1.0, &w)?;
        }
        let d = w - z;
        Ok((d[0], d[1]))
    };
    let n0 = 64;
    let mut angles: Vec<f64> = (0..=n0).map(|j| TAU * j as f64 / n0 as f64).collect();
    let mut vals: Vec<(f64, f64)> = angles.iter().map(|&a| disp(a)).collect::<Result<_>>()?;
    let mut i = 0;
    let mut total = 0.0;
    while i + 1 < angles.len() {
        let (a0, a1) = (vals[i], vals[i + 1]);
        if a0.0.hypot(a0.1) == 0.0 || a1.0.hypot(a1.1) == 0.0 {
            return Err(Error::NotIsolated(z0.iter().copied().collect()));
        }
        let inc = (a0.0 * a1.1 - a0.1 * a1.0).atan2(a0.0 * a1.0 + a0.1 * a1.1);
        if inc.abs() > 0.5 && angles[i + 1] - angles[i] > 1e-9 {
            let mid = 0.5 * (angles[i] + angles[i + 1]);
            angles.insert(i + 1, mid);
            vals.insert(i + 1, disp(mid)?);
            continue;
        }
        total += inc;
        i += 1;
    }
    Ok((total / TAU).round() as i64)
}

/// Degree of `φ^k − id` at the isolated fixed point `z0` of `φ^k` (2D only). The circle
/// radius starts below half the distance to the nearest of `others` and is halved until two
/// consecutive radii agree.
pub fn topological_index_2d<H: Hamiltonian + ?Sized>(
    h: &H,
    integ: &Integrator,
    z0: &DVector<f64>,
    period: usize,
    others: &[DVector<f64>],
) -> Result<i64> {
    if z0.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: z0.len(),
        });
    }
    let nearest = others
        .iter()
        .map(|o| (o - z0).norm())
        .fold(f64::INFINITY, f64::min);
    if nearest < 1e-9 {
        return Err(Error::NotIsolated(z0.iter().copied().collect()));
    }
    let mut radius = (0.4 * nearest).min(1e-2);
    let mut prev = winding(h, integ, z0, period, radius)?;
    for _ in 0..8 {
        radius *= 0.5;
        let w = winding(h, integ, z0, period, radius)?;
        if w == prev {
            return Ok(w);
        }
        prev = w;
    }
    Err(Error::NotIsolated(z0.iter().copied().collect()))
}

/// Sorted distinct action values with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpectrum {
    pub values: Vec<(f64, usize)>,
    /// Smallest spacing between consecutive distinct values (`∞` for fewer than two).
    pub min_spacing: f64,
    /// Largest `a` such that no action other than 0 lies in `(−a, a)`.
    pub gap_radius: f64,
}

pub fn action_spectrum(orbits: &[PeriodicOrbit], tol: f64) -> ActionSpectrum {
    let mut acts: Vec<f64> = orbits.iter().map(|o| o.action).collect();
    acts.sort_by(f64::total_cmp);
    let mut values: Vec<(f64, usize)> = Vec::new();
    for a in acts {
        match values.last_mut() {
            Some((v, m)) if (a - *v).abs() <= tol * (1.0 + v.abs()) => *m += 1,
            _ => values.push((a, 1)),
        }
    }
    let min_spacing = values
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::INFINITY, f64::min);
    let gap_radius = values
        .iter()
        .map(|(v, _)| v.abs())
        .filter(|v| *v > tol)
        .fold(f64::INFINITY, f64::min);
    ActionSpectrum {
        values,
        min_spacing,
        gap_radius,
    }
}

/// Uniform grid of seeds in the ball of the given radius about `center`.
pub fn grid_seeds(center: &[f64], radius: f64, density: usize) -> Vec<DVector<f64>> {
    let dim = center.len();
    let n = density.max(2);
    let spacing = 2.0 * radius / (n - 1) as f64;
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    for _ in 0..n.pow(dim as u32) {
        let off = DVector::from_fn(dim, |i, _| -radius + idx[i] as f64 * spacing);
        if off.norm() <= radius {
            out.push(off + DVector::from_column_slice(center));
        }
        for d in idx.iter_mut() {
            *d += 1;
            if *d < n {
                break;
            }
            *d = 0;
        }
    }
    out
}

/// Seeds on `rays` rays and `rings` radii in `(0, radius]` about a 2D point.
pub fn ray_seeds(center: &DVector<f64>, radius: f64, rays: usize, rings: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(rays * rings);
    for r in 1..=rings {
        let d = radius * r as f64 / rings as f64;
        for a in 0..rays {
            let ang = TAU * (a as f64 + 0.5 * (r % 2) as f64) / rays as f64;
            out.push(DVector::from_vec(vec![center[0] + d * ang.cos(), center[1] + d * ang.sin()]));
        }
    }
    out
}

/// Seeds around every elliptic fixed point, out to `fraction` of the distance to the nearest
/// other fixed point.
pub fn island_seeds(fixed: &[PeriodicOrbit], fraction: f64, rays: usize, rings: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    for (i, f) in fixed.iter().enumerate() {
        if f.z0.len() != 2 || f.index.mean.abs() < 1e-9 || f.index.mean.fract().abs() < 1e-9 {
            continue;
        }
        let nearest = fixed
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| (&g.z0 - &f.z0).norm())
            .fold(f64::INFINITY, f64::min);
        if nearest.is_finite() {
            out.extend(ray_seeds(&f.z0, fraction * nearest, rays, rings));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HuntOptions {
    pub orbit: OrbitOptions,
    /// Newton starts per period, chosen by smallest return ratio.
    pub candidates: usize,
    /// Seeds whose ratio `‖z_p − z_0‖ / min_{j<p} ‖z_j − z_0‖` exceeds this are skipped.
    pub max_ratio: f64,
}

impl Default for HuntOptions {
    fn default() -> Self {
        Self {
            orbit: OrbitOptions::default(),
            candidates: 16,
            max_ratio: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodHunt {
    pub period: usize,
    pub candidates: usize,
    /// Simple orbits of this minimal period.
    pub simple: Vec<PeriodicOrbit>,
    /// Converged orbits whose minimal period is a proper divisor.
    pub iterated: usize,
}

/// Screens all seeds by their return ratio at every requested period, then runs Newton from
/// the best candidates. Only simple orbits are kept.
pub fn hunt<H: Hamiltonian + ?Sized>(
    h: &H,
    periods: &[usize],
    seeds: &[DVector<f64>],
    opts: &HuntOptions,
) -> Result<Vec<PeriodHunt>> {
    let max_p = periods.iter().copied().max().unwrap_or(0);
    if periods.contains(&0) {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let o = &opts.orbit;
    let orbits: Vec<Vec<DVector<f64>>> = seeds
        .par_iter()
        .map(|s| forward_orbit(h, &o.integrator, s, max_p + 1, o.escape_radius))
        .collect();
    let mut out = Vec::with_capacity(periods.len());
    for &p in periods {
        let mut scored: Vec<(f64, usize)> = orbits
            .iter()
            .enumerate()
            .filter(|(_, pts)| pts.len() > p)
            .map(|(i, pts)| {
                let dp = (&pts[p] - &pts[0]).norm();
                let dmin = (1..p)
                    .map(|j| (&pts[j] - &pts[0]).norm())
                    .fold(f64::INFINITY, f64::min);
                let ratio = if p == 1 { dp } else { dp / (dmin + 1e-300) };
                (ratio, i)
            })
            .filter(|(r, _)| *r <= opts.max_ratio)
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        scored.truncate(opts.candidates);
        let found: Vec<PeriodicOrbit> = scored
            .par_iter()
            .filter_map(|&(_, i)| refine_orbit(h, orbits[i][..p].to_vec(), o))
            .collect();
        let found = dedup(found, o.dedup_tol);
        let (mut simple, iterated): (Vec<_>, Vec<_>) = found.into_iter().partition(|x| x.is_simple());
        attach_topological_indices(h, &mut simple, o);
        out.push(PeriodHunt {
            period: p,
            candidates: scored.len(),
            simple,
            iterated: iterated.len(),
        });
    }
    Ok(out)
}

/// Does every sample of the orbit lie in the support ball of the system?
pub fn confined(h: &HamiltonianSystem, orbit: &PeriodicOrbit) -> bool {
    orbit.confined_to(h.support_radius * (1.0 + 1e-12))
}

pub fn write_orbits_csv<W: Write>(orbits: &[PeriodicOrbit], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidInput(e.to_string());
    let dim = orbits.first().map_or(0, |o| o.z0.len());
    let n = dim / 2;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "period",
        "minimal_period",
        "action",
        "cz",
        "mean",
        "nondegenerate",
        "topological_index",
        "residual",
        "max_radius",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((1..=n).map(|i| format!("p{i}")));
    header.extend((1..=n).map(|i| format!("q{i}")));
    w.write_record(&header).map_err(io)?;
    for o in orbits {
        let mut row = vec![
            o.period.to_string(),
            o.minimal_period.to_string(),
            format!("{:.12e}", o.action),
            o.index.cz_label(),
            format!("{:.12e}", o.index.mean),
            (!o.degenerate).to_string(),
            o.topological_index
                .map_or_else(|| "unknown".to_string(), |i| i.to_string()),
            format!("{:.3e}", o.residual),
            format!("{:.6}", o.max_radius),
        ];
        row.extend(o.z0.iter().map(|x| format!("{x:.15e}")));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}
