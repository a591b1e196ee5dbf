//! Maximum-principle checks for the linear Floer equation
//! `∂_s u + J_Q ∂_t u = −∇Q(u)` in frame coordinates, where `J_Q` is the standard
//! complex structure and the metric is the identity. Also slow homotopies and
//! continuation action shifts.

use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::{signed_sup_integral, hofer_norm_with, Difference, Hamiltonian, HoferOptions};
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::quadform::{check_smallness, slow_bound, NormalFrame};

/// Residual threshold for a field to count as a solution.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Uniform grid on `[s0, s1] × S¹`: `ns` nodes in `s` including both ends, `nt` in `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderGrid {
    pub s0: f64,
    pub s1: f64,
    pub ns: usize,
    pub nt: usize,
}

impl CylinderGrid {
    pub fn square(n: usize) -> Self {
        Self {
            s0: -0.5,
            s1: 0.5,
            ns: n,
            nt: n,
        }
    }

    pub fn hs(&self) -> f64 {
        (self.s1 - self.s0) / (self.ns - 1) as f64
    }

    pub fn ht(&self) -> f64 {
        1.0 / self.nt as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s0 + i as f64 * self.hs()
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.ht()
    }
}

/// `Re(c e^{μs} e^{2πikt} w)` summed over modes, with `(S + 2πk·iJ) w = −μ w`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFloerSolution {
    pub dim: usize,
    pub modes: Vec<(f64, i32, DVector<C64>)>,
}

impl LinearFloerSolution {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            modes: Vec::new(),
        }
    }

    /// The `j`-th eigenmode (eigenvalues of `S + 2πk·iJ` ascending) for Fourier mode `k`.
    pub fn mode(frame: &NormalFrame, k: i32, j: usize) -> Result<Self> {
        let dim = frame.dim();
        if j >= dim {
            return Err(Error::InvalidInput(format!("eigen index {j} out of range for dimension {dim}")));
        }
        let s = frame.hessian().map(|v| C64::new(v, 0.0));
        let jm = linalg::complex_structure(frame.half_dim()).map(|v| C64::new(0.0, TAU * k as f64 * v));
        let eig = (s + jm).symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let idx = order[j];
        let w = eig.eigenvectors.column(idx).into_owned();
        Ok(Self {
            dim,
            modes: vec![(-eig.eigenvalues[idx], k, w)],
        })
    }

    /// `Σ c_i u_i`.
    pub fn combine(parts: &[(C64, LinearFloerSolution)]) -> Self {
        let dim = parts.first().map(|p| p.1.dim).unwrap_or(0);
        let modes = parts
            .iter()
            .flat_map(|(c, u)| u.modes.iter().map(move |(mu, k, w)| (*mu, *k, w * *c)))
            .collect();
        Self { dim, modes }
    }

    /// `(u, u_s, u_t, u_ss + u_tt)` at `(s, t)`.
    pub fn jet(&self, s: f64, t: f64) -> [DVector<f64>; 4] {
        let mut out = [
            DVector::zeros(self.dim),
            DVector::zeros(self.dim),
            DVector::zeros(self.dim),
            DVector::zeros(self.dim),
        ];
        for (mu, k, w) in &self.modes {
            let nu = TAU * *k as f64;
            let e = C64::new(mu * s, nu * t).exp();
            let lap = mu * mu - nu * nu;
            for i in 0..self.dim {
                let v = e * w[i];
                out[0][i] += v.re;
                out[1][i] += mu * v.re;
                out[2][i] += (C64::new(0.0, nu) * v).re;
                out[3][i] += lap * v.re;
            }
        }
        out
    }

    pub fn value(&self, s: f64, t: f64) -> DVector<f64> {
        let [u, ..] = self.jet(s, t);
        u
    }

    /// Analytic `Δρ = ‖u_s‖² + ‖u_t‖² + ⟨u, Δu⟩` for `ρ = ‖u‖²/2`.
    pub fn laplacian_rho(&self, s: f64, t: f64) -> f64 {
        let [u, us, ut, lap] = self.jet(s, t);
        us.norm_squared() + ut.norm_squared() + u.dot(&lap)
    }

    /// `sup ‖u_s + J u_t + S u‖ / sup ‖u‖` over the grid nodes.
    pub fn residual(&self, frame: &NormalFrame, grid: &CylinderGrid) -> f64 {
        let j = linalg::complex_structure(frame.half_dim());
        let s = frame.hessian();
        let mut num = 0.0_f64;
        let mut den = 0.0_f64;
        for a in 0..grid.ns {
            for b in 0..grid.nt {
                let [u, us, ut, _] = self.jet(grid.s(a), grid.t(b));
                num = num.max((us + &j * ut + &s * &u).norm());
                den = den.max(u.norm());
            }
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

/// Samples of a solution on a [`CylinderGrid`], index `[i * nt + j]` for node `(s_i, t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderField {
    pub grid: CylinderGrid,
    pub values: Vec<DVector<f64>>,
    /// Relative PDE residual measured at construction.
    pub residual: f64,
}

impl CylinderField {
    pub fn from_solution(sol: &LinearFloerSolution, frame: &NormalFrame, grid: CylinderGrid) -> Self {
        let mut values = Vec::with_capacity(grid.ns * grid.nt);
        for i in 0..grid.ns {
            for j in 0..grid.nt {
                values.push(sol.value(grid.s(i), grid.t(j)));
            }
        }
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        if scale > 0.0 {
            for v in &mut values {
                *v /= scale;
            }
        }
        Self {
            grid,
            values,
            residual: sol.residual(frame, &grid),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &DVector<f64> {
        &self.values[i * self.grid.nt + j]
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        0.5 * self.at(i, j).norm_squared()
    }

    /// Five-point Laplacian of `ρ` at an interior node, periodic in `t`.
    pub fn discrete_laplacian(&self, i: usize, j: usize) -> f64 {
        let nt = self.grid.nt;
        let (hs, ht) = (self.grid.hs(), self.grid.ht());
        let c = self.rho(i, j);
        (self.rho(i + 1, j) - 2.0 * c + self.rho(i - 1, j)) / (hs * hs)
            + (self.rho(i, (j + 1) % nt) - 2.0 * c + self.rho(i, (j + nt - 1) % nt)) / (ht * ht)
    }

    /// Columns `s, t, u_1..u_2n, rho, lap_rho` (the last empty on the `s`-boundary).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dim = self.values.first().map(|v| v.len()).unwrap_or(0);
        let mut header = vec!["s".to_string(), "t".to_string()];
        header.extend((1..=dim).map(|i| format!("u{i}")));
        header.push("rho".into());
        header.push("lap_rho".into());
        let err = |e: csv::Error| Error::InvalidInput(e.to_string());
        w.write_record(&header).map_err(err)?;
        for i in 0..self.grid.ns {
            for j in 0..self.grid.nt {
                let mut rec = vec![self.grid.s(i).to_string(), self.grid.t(j).to_string()];
                rec.extend(self.at(i, j).iter().map(|v| v.to_string()));
                rec.push(self.rho(i, j).to_string());
                rec.push(if i == 0 || i + 1 == self.grid.ns {
                    String::new()
                } else {
                    self.discrete_laplacian(i, j).to_string()
                });
                w.write_record(&rec).map_err(err)?;
            }
        }
        w.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(())
    }
}

/// Samples the `j`-th eigenmode with Fourier mode `k`, normalized to `max ‖u‖ = 1` on the grid.
pub fn make_linear_floer_solution(frame: &NormalFrame, k: i32, j: usize, grid: CylinderGrid) -> Result<CylinderField> {
    if !check_smallness(frame).all() {
        return Err(Error::InvalidInput("frame fails the smallness conditions".into()));
    }
    let sol = LinearFloerSolution::mode(frame, k, j)?;
    Ok(CylinderField::from_solution(&sol, frame, grid))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubharmonicReport {
    /// `min (Δρ − (3λ²/10)‖u‖²)` over interior nodes.
    pub min_margin: f64,
    pub tolerance: f64,
    pub argmax: (usize, usize),
    pub argmax_on_boundary: bool,
}

impl SubharmonicReport {
    pub fn pass(&self) -> bool {
        self.min_margin >= -self.tolerance && self.argmax_on_boundary
    }
}

/// Discrete check of `Δρ ≥ (3λ²/10)‖u‖²` with tolerance `10·max(h_s, h_t)²`, and of the
/// location of the maximum of `ρ`.
pub fn subharmonicity_check(field: &CylinderField, frame: &NormalFrame) -> Result<SubharmonicReport> {
    if !(field.residual < RESIDUAL_TOL) {
        return Err(Error::UnverifiedField {
            residual: field.residual,
        });
    }
    let g = field.grid;
    let c = 0.3 * frame.lambda * frame.lambda;
    let mut min_margin = f64::INFINITY;
    for i in 1..g.ns - 1 {
        for j in 0..g.nt {
            let m = field.discrete_laplacian(i, j) - 2.0 * c * field.rho(i, j);
            min_margin = min_margin.min(m);
        }
    }
    let mut argmax = (0, 0);
    let mut best = f64::NEG_INFINITY;
    for i in 0..g.ns {
        for j in 0..g.nt {
            let r = field.rho(i, j);
            if r > best {
                best = r;
                argmax = (i, j);
            }
        }
    }
    // ties with the boundary maximum count as boundary maxima
    let boundary_best = (0..g.nt)
        .flat_map(|j| [field.rho(0, j), field.rho(g.ns - 1, j)])
        .fold(f64::NEG_INFINITY, f64::max);
    let h = g.hs().max(g.ht());
    Ok(SubharmonicReport {
        min_margin,
        tolerance: 10.0 * h * h,
        argmax,
        argmax_on_boundary: argmax.0 == 0 || argmax.0 == g.ns - 1 || boundary_best >= best,
    })
}

/// Samples of `k(s)` and `k′(s)`; `k` is constant outside the sampled window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyProfile {
    pub s: Vec<f64>,
    pub k: Vec<f64>,
    pub dk: Vec<f64>,
}

impl HomotopyProfile {
    pub fn new(s: Vec<f64>, k: Vec<f64>, dk: Vec<f64>) -> Result<Self> {
        if s.len() < 2 || s.len() != k.len() || s.len() != dk.len() {
            return Err(Error::InvalidInput("profile needs at least two matching samples".into()));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("profile s-samples must increase".into()));
        }
        if let Some(i) = k.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::InvalidInput(format!("k must be positive, got {} at s = {}", k[i], s[i])));
        }
        Ok(Self { s, k, dk })
    }

    pub fn from_fn(s0: f64, s1: f64, samples: usize, k: impl Fn(f64) -> f64, dk: impl Fn(f64) -> f64) -> Result<Self> {
        let m = samples.max(2);
        let s: Vec<f64> = (0..m).map(|i| s0 + (s1 - s0) * i as f64 / (m - 1) as f64).collect();
        let kv = s.iter().map(|&x| k(x)).collect();
        let dv = s.iter().map(|&x| dk(x)).collect();
        Self::new(s, kv, dv)
    }

    /// `k` rising linearly from `k0` at `s0` to `k1` at `s1`.
    pub fn linear(k0: f64, k1: f64, s0: f64, s1: f64, samples: usize) -> Result<Self> {
        let slope = (k1 - k0) / (s1 - s0);
        Self::from_fn(s0, s1, samples, |s| k0 + slope * (s - s0), |_| slope)
    }

    /// `max |k′|/k²`.
    pub fn rate(&self) -> f64 {
        self.k
            .iter()
            .zip(&self.dk)
            .map(|(k, d)| d.abs() / (k * k))
            .fold(0.0, f64::max)
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (self.k[0], self.k[self.k.len() - 1])
    }
}

pub fn is_slow(profile: &HomotopyProfile, frame: &NormalFrame) -> bool {
    profile.rate() <= slow_bound(frame) * (1.0 + 1e-12)
}

/// Stretches the `s`-axis about its left end by the least integer factor making the profile slow.
pub fn reparametrize_to_slow(profile: &HomotopyProfile, frame: &NormalFrame) -> HomotopyProfile {
    let factor = (profile.rate() / slow_bound(frame)).ceil().max(1.0);
    let s0 = profile.s[0];
    HomotopyProfile {
        s: profile.s.iter().map(|s| s0 + factor * (s - s0)).collect(),
        k: profile.k.clone(),
        dk: profile.dk.iter().map(|d| d / factor).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// `min ((3λ²/10) k² ‖u‖² − 2|k′||Q(u)|) / ‖u‖²`.
    pub min_margin: f64,
    pub witness: Option<(f64, Vec<f64>)>,
}

impl AuditReport {
    pub fn holds(&self) -> bool {
        self.min_margin >= -1e-12
    }
}

/// Pointwise check of `(3λ²/10) k(s)² ‖u‖² ≥ 2|k′(s)| |Q(u)|` over profile samples × points.
pub fn slow_inequality_audit(frame: &NormalFrame, profile: &HomotopyProfile, points: &[DVector<f64>]) -> AuditReport {
    let c = 0.3 * frame.lambda * frame.lambda;
    let mut worst = AuditReport {
        min_margin: f64::INFINITY,
        witness: None,
    };
    for u in points {
        let n2 = u.norm_squared();
        if n2 == 0.0 {
            continue;
        }
        let q = frame.q_value(u).abs();
        for ((s, k), dk) in profile.s.iter().zip(&profile.k).zip(&profile.dk) {
            let m = (c * k * k * n2 - 2.0 * dk.abs() * q) / n2;
            if m < worst.min_margin {
                worst.min_margin = m;
                worst.witness = Some((*s, u.iter().copied().collect()));
            }
        }
    }
    worst
}

/// Fits `d ≈ c·Q` on a shell outside the ball and rejects when the remainder does not vanish.
fn check_compact_difference<F: Hamiltonian + ?Sized>(d: &F, frame: &NormalFrame, ball_radius: f64) -> Result<()> {
    let dim = d.dim();
    let mut pts = Vec::new();
    let dirs = 24;
    for a in 0..dirs {
        for radius in [1.05, 1.5, 2.0] {
            let mut z = DVector::zeros(dim);
            let th = TAU * (a as f64 + 0.37) / dirs as f64;
            let i = a % dim;
            let j = (a / dim + i + 1) % dim;
            z[i] = th.cos();
            z[j] += th.sin();
            if z.norm() == 0.0 {
                z[i] = 1.0;
            }
            let z = z.normalize() * (radius * ball_radius);
            pts.push(z);
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut samples = Vec::new();
    for t in [0.0, 0.25, 0.5, 0.75] {
        for z in &pts {
            let v = d.value(t, z);
            let q = frame.q_value(z);
            num += v * q;
            den += q * q;
            samples.push((v, q));
        }
    }
    let c = if den > 0.0 { num / den } else { 0.0 };
    let scale = samples.iter().fold(0.0_f64, |m, (v, _)| m.max(v.abs()));
    let resid = samples.iter().fold(0.0_f64, |m, (v, q)| m.max((v - c * q).abs()));
    if !(resid <= 1e-8 * (1.0 + scale)) {
        return Err(Error::UnboundedSupport { ball_radius });
    }
    Ok(())
}

/// `C = ‖H1 − H0‖_B` for the linear homotopy, after checking that `H1 − H0` is a multiple of
/// `Q` outside `B`.
pub fn continuation_shift<H0: Hamiltonian, H1: Hamiltonian>(
    h0: &H0,
    h1: &H1,
    frame: &NormalFrame,
    opts: &HoferOptions,
) -> Result<f64> {
    if h0.dim() != h1.dim() {
        return Err(Error::DimensionMismatch {
            expected: h0.dim(),
            got: h1.dim(),
        });
    }
    let d = Difference(h1, h0);
    check_compact_difference(&d, frame, opts.ball_radius)?;
    Ok(hofer_norm_with(&d, opts).value)
}

struct SDerivative<'a, F> {
    family: &'a F,
    s: f64,
    ds: f64,
    dim: usize,
}

impl<F, H> Hamiltonian for SDerivative<'_, F>
where
    F: Fn(f64) -> H + Sync,
    H: Hamiltonian,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        ((self.family)(self.s + self.ds).value(t, z) - (self.family)(self.s - self.ds).value(t, z)) / (2.0 * self.ds)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        ((self.family)(self.s + self.ds).gradient(t, z) - (self.family)(self.s - self.ds).gradient(t, z))
            / (2.0 * self.ds)
    }
}

/// `∫∫ sup_B ∂_s F_s dt ds` over `s ∈ [s0, s1]` (trapezoid in `s`, central differences for `∂_s`).
/// `F_s` must be constant in `s` outside `[s0, s1]`; the family's `s`-variation must vanish
/// outside `B` up to multiples of `Q`.
pub fn continuation_shift_general<F, H>(
    family: &F,
    frame: &NormalFrame,
    s0: f64,
    s1: f64,
    s_steps: usize,
    opts: &HoferOptions,
) -> Result<f64>
where
    F: Fn(f64) -> H + Sync,
    H: Hamiltonian,
{
    let m = s_steps.max(1);
    let hs = (s1 - s0) / m as f64;
    let dim = family(s0).dim();
    let mut total = 0.0;
    for i in 0..=m {
        let d = SDerivative {
            family,
            s: s0 + i as f64 * hs,
            ds: 1e-4 * hs.max(1e-3),
            dim,
        };
        check_compact_difference(&d, frame, opts.ball_radius)?;
        let w = if i == 0 || i == m { 0.5 } else { 1.0 };
        total += w * signed_sup_integral(&d, opts).value;
    }
    Ok(total * hs)
}

/// Directions realizing `|Q(u)| = form_norm · ‖u‖²`: `(v, ±u)/√2` for the top singular pair of `A`.
pub fn extremal_directions(frame: &NormalFrame) -> Vec<DVector<f64>> {
    let svd = frame.a.clone().svd(true, true);
    let i = svd.singular_values.imax();
    let u = svd.u.expect("u requested").column(i).into_owned();
    let v = svd.v_t.expect("v_t requested").row(i).transpose();
    vec![
        linalg::join_pq(&v, &u) / 2f64.sqrt(),
        linalg::join_pq(&v, &(-u)) / 2f64.sqrt(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Bump, FnHamiltonian, HamiltonianSystem, TimeProfile};
    use crate::quadform::{build_normal_form, rescale_to_small, BlockSpec};
    use crate::smooth;

    fn saddle() -> NormalFrame {
        build_normal_form(&BlockSpec::single(1.0, 1).unwrap()).unwrap()
    }

    #[test]
    fn mode_zero_is_gradient_line() {
        let f = saddle();
        let grid = CylinderGrid::square(16);
        let sol = LinearFloerSolution::mode(&f, 0, 0).unwrap();
        let (mu, _, w) = &sol.modes[0];
        // S = [[0,1],[1,0]] has eigenvalues ±1, ascending order puts −1 first: μ = 1
        assert!((mu - 1.0).abs() < 1e-12);
        let u0 = w.map(|c| c.re);
        for s in [-0.5, 0.0, 0.3] {
            let expect = (-f.hessian() * s).exp() * &u0;
            assert!((sol.value(s, 0.7) - expect).amax() < 1e-12);
        }
        assert!(sol.residual(&f, &grid) < 1e-13);
    }

    #[test]
    fn residual_by_finite_differences() {
        let f = rescale_to_small(&build_normal_form(&BlockSpec::single(1.5, 2).unwrap()).unwrap());
        let j = linalg::complex_structure(2);
        let s = f.hessian();
        for k in [-2, 1, 3] {
            let sol = LinearFloerSolution::mode(&f, k, 1).unwrap();
            let h = 1e-5;
            for (a, b) in [(0.1, 0.2), (-0.3, 0.9)] {
                let us = (sol.value(a + h, b) - sol.value(a - h, b)) / (2.0 * h);
                let ut = (sol.value(a, b + h) - sol.value(a, b - h)) / (2.0 * h);
                let r = us + &j * ut + &s * sol.value(a, b);
                let scale = 1.0 + sol.value(a, b).norm() * (1.0 + TAU * k.abs() as f64);
                assert!(r.norm() < 1e-7 * scale, "{}", r.norm());
            }
        }
    }

    #[test]
    fn zero_field_is_trivially_subharmonic() {
        let f = saddle();
        let field = CylinderField::from_solution(&LinearFloerSolution::zero(2), &f, CylinderGrid::square(16));
        assert!(field.values.iter().all(|v| v.amax() == 0.0));
        let rep = subharmonicity_check(&field, &f).unwrap();
        assert_eq!(rep.min_margin, 0.0);
        assert!(rep.pass());
    }

    #[test]
    fn saddle_mode_zero_margin() {
        let f = saddle();
        for j in 0..2 {
            let field = make_linear_floer_solution(&f, 0, j, CylinderGrid::square(64)).unwrap();
            let rep = subharmonicity_check(&field, &f).unwrap();
            assert!(rep.min_margin >= -1e-6, "{rep:?}");
            assert!(rep.argmax_on_boundary);
        }
    }

    #[test]
    fn unverified_field_rejected() {
        let f = saddle();
        let mut field = make_linear_floer_solution(&f, 1, 0, CylinderGrid::square(8)).unwrap();
        field.residual = 1e-3;
        assert!(matches!(subharmonicity_check(&field, &f), Err(Error::UnverifiedField { .. })));
    }

    #[test]
    fn stencil_converges_quadratically() {
        let f = saddle();
        let sol = LinearFloerSolution::combine(&[
            (C64::new(1.0, 0.0), LinearFloerSolution::mode(&f, 1, 0).unwrap()),
            (C64::new(0.3, 0.2), LinearFloerSolution::mode(&f, 0, 1).unwrap()),
        ]);
        let exact = sol.laplacian_rho(0.0, 0.25);
        let mut errs = Vec::new();
        for n in [32usize, 64, 128] {
            let grid = CylinderGrid {
                s0: -0.5,
                s1: 0.5,
                ns: n + 1,
                nt: n,
            };
            let mut values = Vec::new();
            for i in 0..grid.ns {
                for j in 0..grid.nt {
                    values.push(sol.value(grid.s(i), grid.t(j)));
                }
            }
            let field = CylinderField {
                grid,
                values,
                residual: 0.0,
            };
            errs.push((field.discrete_laplacian(n / 2, n / 4) - exact).abs());
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 4.0).abs() < 0.2, "{errs:?}");
        }
    }

    #[test]
    fn slow_examples() {
        let f = saddle();
        let constant = HomotopyProfile::from_fn(0.0, 1.0, 10, |_| 3.0, |_| 0.0).unwrap();
        assert!(is_slow(&constant, &f));
        let ramp = HomotopyProfile::linear(1.0, 2.0, 0.0, 1.0, 101).unwrap();
        assert!((ramp.rate() - 1.0).abs() < 1e-12);
        assert!(!is_slow(&ramp, &f));
        let slow = reparametrize_to_slow(&ramp, &f);
        assert!(is_slow(&slow, &f));
        assert!((slow.s[slow.s.len() - 1] - slow.s[0] - (1.0 / slow_bound(&f)).ceil()).abs() < 1e-12);
        assert_eq!(slow.endpoints(), ramp.endpoints());
        assert!(HomotopyProfile::from_fn(0.0, 1.0, 10, |s| s - 0.5, |_| 1.0).is_err());
    }

    #[test]
    fn audit_at_the_slow_boundary() {
        let f = saddle();
        let bound = slow_bound(&f);
        let edge = HomotopyProfile::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![bound, bound]).unwrap();
        let dirs = extremal_directions(&f);
        let rep = slow_inequality_audit(&f, &edge, &dirs);
        assert!(rep.min_margin.abs() < 1e-12 && rep.holds());
        let fast = HomotopyProfile::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0 * bound, 0.0]).unwrap();
        let rep = slow_inequality_audit(&f, &fast, &dirs);
        assert!(!rep.holds());
        assert_eq!(rep.witness.unwrap().0, 0.0);
    }

    #[test]
    fn shift_of_identical_and_plateau() {
        let f = saddle();
        let h0 = HamiltonianSystem::new(
            f.clone(),
            1.0,
            vec![Bump {
                center: vec![0.0, 0.0],
                radius: 0.5,
                amplitude: 0.2,
                time_profile: TimeProfile::Constant,
            }],
            1.0,
        )
        .unwrap();
        let opts = HoferOptions::new(1.0, 21);
        assert_eq!(continuation_shift(&h0, &h0, &f, &opts).unwrap(), 0.0);
        let plateau = FnHamiltonian {
            dim: 2,
            value: |_t: f64, z: &DVector<f64>| z[0] * z[1] + 0.7 * (1.0 - smooth::step((z.norm() - 0.9) / 0.1)),
            gradient: |_t: f64, z: &DVector<f64>| DVector::from_vec(vec![z[1], z[0]]),
            autonomous: true,
        };
        let base = HamiltonianSystem::unperturbed(f.clone(), 1.0).unwrap();
        let c = continuation_shift(&base, &plateau, &f, &opts).unwrap();
        assert!((c - 0.7).abs() < 1e-12);
        let wide = HoferOptions::new(0.5, 11);
        assert!(matches!(
            continuation_shift(&base, &plateau, &f, &wide),
            Err(Error::UnboundedSupport { .. })
        ));
    }

    #[test]
    fn general_shift_of_linear_homotopy() {
        let f = saddle();
        let fam = |s: f64| {
            let g = smooth::step(s);
            FnHamiltonian {
                dim: 2,
                value: move |_t: f64, z: &DVector<f64>| {
                    z[0] * z[1] + g * 0.4 * (1.0 - smooth::step((z.norm() - 0.8) / 0.1))
                },
                gradient: |_t: f64, z: &DVector<f64>| DVector::from_vec(vec![z[1], z[0]]),
                autonomous: true,
            }
        };
        let c = continuation_shift_general(&fam, &f, 0.0, 1.0, 40, &HoferOptions::new(1.0, 11)).unwrap();
        assert!((c - 0.4).abs() < 1e-4, "{c}");
    }
}
