//! The taming Hamiltonian `Q̃`: equal to `Q` on the support ball `V`, to `εQ` outside a
//! ball of radius `R = C₁/√ε`, with `sup |Q̃|` bounded independently of `ε`. Also the
//! iteration bookkeeping (`B_k`, `C₃`) for `H̃ = Q̃ + f`.
//!
//! `Q` here is the quadratic part `κ⟨Ap, q⟩` of a [`HamiltonianSystem`], in frame coordinates.

use std::io::Write;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    exact_linear_flow, hofer_norm_with, iterate, iterate_difference, periodize, Difference, Hamiltonian,
    HamiltonianSystem, HoferOptions, Integrator, Perturbation, QuadraticHamiltonian, Ramp,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::quadform::NormalFrame;
use crate::smooth::{self, Cutoff};

/// Odd monotone `η` with `η(x) = x` for `|x| ≤ c` and `η(x) = εx` for `|x| ≥ c′ = 2c/ε`.
///
/// On `[c, c′]`, `η′ = ε/2 + (1 − ε/2)(1 − S((x−c)/w)) + (ε/2) S((x − c′ + w)/w)` with
/// `w = εc`, which integrates to exactly `εc′ − c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eta {
    pub epsilon: f64,
    pub c: f64,
    pub c_prime: f64,
    pub width: f64,
}

impl Eta {
    pub fn new(epsilon: f64, c: f64) -> Self {
        Self {
            epsilon,
            c,
            c_prime: 2.0 * c / epsilon,
            width: epsilon * c,
        }
    }

    fn positive(&self, x: f64) -> f64 {
        if x <= self.c {
            return x;
        }
        if x >= self.c_prime {
            return self.epsilon * x;
        }
        let (e, c, w) = (self.epsilon, self.c, self.width);
        let a2 = self.c_prime - w;
        let d = x - c;
        c + 0.5 * e * d
            + (1.0 - 0.5 * e) * (d - w * smooth::step_integral(d / w))
            + 0.5 * e * w * (smooth::step_integral((x - a2) / w) - smooth::step_integral((c - a2) / w))
    }

    pub fn value(&self, x: f64) -> f64 {
        if x < 0.0 {
            -self.positive(-x)
        } else {
            self.positive(x)
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let x = x.abs();
        if x <= self.c {
            return 1.0;
        }
        if x >= self.c_prime {
            return self.epsilon;
        }
        let (e, w) = (self.epsilon, self.width);
        0.5 * e
            + (1.0 - 0.5 * e) * (1.0 - smooth::step((x - self.c) / w))
            + 0.5 * e * smooth::step((x - self.c_prime + w) / w)
    }
}

/// All constants of the construction for one `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTildeProfile {
    pub frame: NormalFrame,
    pub kappa: f64,
    pub epsilon: f64,
    /// Radius of the support ball `V`.
    pub r: f64,
    /// Smallest eigenvalue of `κA`.
    pub lambda: f64,
    /// `sup_V |Q|`.
    pub c: f64,
    pub c_prime: f64,
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    pub big_r: f64,
    pub c1: f64,
    /// `sup_{B(1)} |Q|`.
    pub m: f64,
    pub c2: f64,
    pub sup_f: f64,
    pub c3: f64,
    pub eta: Eta,
    /// `φ(‖q‖)` on `[a0, a1]`.
    pub phi: Cutoff,
    /// `ψ(‖p‖)` on `[b0, b1]`.
    pub psi: Cutoff,
}

pub fn build_profile(h: &HamiltonianSystem, epsilon: f64) -> Result<QTildeProfile> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidInput(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let r = h.support_radius;
    let kappa = h.kappa;
    let lambda = kappa * h.frame.lambda;
    // sup over the ball of radius ρ of |⟨Ap, q⟩| is ρ² σ_max(A)/2
    let m = kappa * h.frame.form_norm;
    let c = m * r * r;
    let a0 = r / epsilon.sqrt();
    let a1 = 2.0 * a0;
    let b0 = r.max(32.0 * c / (lambda * r * epsilon.sqrt()));
    let b1 = 2.0 * b0;
    let big_r = (a1 * a1 + b1 * b1).sqrt();
    let c1 = big_r * epsilon.sqrt();
    let c2 = 3.0 * c1 * c1 * m + 4.0 * c;
    let sup_f = h.sup_perturbation();
    let c3 = 7.0 * c1 * c1 * m + c2 + sup_f;
    let eta = Eta::new(epsilon, c);
    Ok(QTildeProfile {
        frame: h.frame.clone(),
        kappa,
        epsilon,
        r,
        lambda,
        c,
        c_prime: eta.c_prime,
        a0,
        a1,
        b0,
        b1,
        big_r,
        c1,
        m,
        c2,
        sup_f,
        c3,
        eta,
        phi: Cutoff { start: a0, end: a1 },
        psi: Cutoff { start: b0, end: b1 },
    })
}

impl QTildeProfile {
    pub fn q(&self, z: &DVector<f64>) -> f64 {
        self.kappa * self.frame.q_value(z)
    }

    fn norms(&self, z: &DVector<f64>) -> (f64, f64) {
        let n = self.frame.half_dim();
        (z.rows(0, n).norm(), z.rows(n, n).norm())
    }

    /// `Q̃ = εQ + (1 − ψ(‖p‖))(1 − φ(‖q‖))(η(Q) − εQ)`, with the two pure regions
    /// returned without arithmetic so that `Q̃ = Q` on `V` and `Q̃ = εQ` far out hold exactly.
    pub fn value(&self, z: &DVector<f64>) -> f64 {
        let q = self.q(z);
        let (np, nq) = self.norms(z);
        let w = (1.0 - self.psi.value(np)) * (1.0 - self.phi.value(nq));
        if w == 0.0 {
            self.epsilon * q
        } else if w == 1.0 {
            self.eta.value(q)
        } else {
            self.epsilon * q + w * (self.eta.value(q) - self.epsilon * q)
        }
    }

    pub fn gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        let n = self.frame.half_dim();
        let q = self.q(z);
        let (np, nq) = self.norms(z);
        let (ps, pf) = (self.psi.value(np), self.phi.value(nq));
        let w = (1.0 - ps) * (1.0 - pf);
        let e = self.epsilon;
        let grad_q = self.frame.q_gradient(z) * self.kappa;
        let mut g = grad_q * (e + w * (self.eta.derivative(q) - e));
        let gap = self.eta.value(q) - e * q;
        let dps = self.psi.derivative(np);
        if dps != 0.0 && gap != 0.0 {
            let f = -dps * (1.0 - pf) * gap / np;
            for i in 0..n {
                g[i] += f * z[i];
            }
        }
        let dpf = self.phi.derivative(nq);
        if dpf != 0.0 && gap != 0.0 {
            let f = -(1.0 - ps) * dpf * gap / nq;
            for i in 0..n {
                g[n + i] += f * z[n + i];
            }
        }
        g
    }

    /// `£_{X_Q̃} ‖q‖² = 2⟨q, ∂Q̃/∂p⟩` and `£_{X_Q̃} ‖p‖² = −2⟨p, ∂Q̃/∂q⟩`.
    pub fn lyapunov_derivatives(&self, z: &DVector<f64>) -> (f64, f64) {
        let n = self.frame.half_dim();
        let g = self.gradient(z);
        let dq = 2.0 * z.rows(n, n).dot(&g.rows(0, n));
        let dp = -2.0 * z.rows(0, n).dot(&g.rows(n, n));
        (dq, dp)
    }

    /// `R_k = ‖φ^{ε(k−1)}_Q‖ R`.
    pub fn bk_radius(&self, k: usize) -> f64 {
        assert!(k >= 1, "iteration count must be at least 1");
        if k == 1 {
            return self.big_r;
        }
        linalg::op_norm(&exact_linear_flow(&self.frame, self.kappa * self.epsilon, (k - 1) as f64)) * self.big_r
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

impl Hamiltonian for QTildeProfile {
    fn dim(&self) -> usize {
        self.frame.dim()
    }
    fn value(&self, _t: f64, z: &DVector<f64>) -> f64 {
        QTildeProfile::value(self, z)
    }
    fn gradient(&self, _t: f64, z: &DVector<f64>) -> DVector<f64> {
        QTildeProfile::gradient(self, z)
    }
    fn is_autonomous(&self) -> bool {
        true
    }
}

/// `H̃ = Q̃ + f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tamed {
    pub profile: QTildeProfile,
    pub f: Perturbation,
}

impl Tamed {
    pub fn new(h: &HamiltonianSystem, epsilon: f64) -> Result<Self> {
        Ok(Self {
            profile: build_profile(h, epsilon)?,
            f: h.perturbation_part(),
        })
    }

    /// `kεQ`, the quadratic part of `H̃^{♮k}`.
    pub fn linear_part(&self, k: usize) -> QuadraticHamiltonian {
        QuadraticHamiltonian {
            frame: self.profile.frame.clone(),
            kappa: k as f64 * self.profile.epsilon * self.profile.kappa,
        }
    }
}

impl Hamiltonian for Tamed {
    fn dim(&self) -> usize {
        self.profile.frame.dim()
    }
    fn value(&self, t: f64, z: &DVector<f64>) -> f64 {
        self.profile.value(z) + self.f.value(t, z)
    }
    fn gradient(&self, t: f64, z: &DVector<f64>) -> DVector<f64> {
        self.profile.gradient(z) + self.f.gradient(t, z)
    }
    fn is_autonomous(&self) -> bool {
        self.f.is_autonomous()
    }
}

/// One verified property with its measured value and bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub epsilon: f64,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub epsilon: f64,
    pub rows: Vec<CheckRow>,
}

impl ProfileReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, check: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.check == check)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows, out)
    }
}

pub fn write_rows<W: Write>(rows: &[CheckRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(())
}

fn witness(z: &DVector<f64>) -> String {
    z.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(" ")
}

pub(crate) fn unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 1e-3 && norm <= 1.0 {
            return v / norm;
        }
    }
}

fn with_radius(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    unit(rng, n) * rng.random_range(lo..=hi)
}

/// Tracks the worst sample for a check of the form `margin ≥ 0` (or `> 0` when strict).
struct Worst {
    margin: f64,
    value: f64,
    at: Option<DVector<f64>>,
}

impl Worst {
    fn new() -> Self {
        Self {
            margin: f64::INFINITY,
            value: f64::NAN,
            at: None,
        }
    }

    fn update(&mut self, margin: f64, value: f64, z: &DVector<f64>) {
        if margin < self.margin {
            self.margin = margin;
            self.value = value;
            self.at = Some(z.clone());
        }
    }

    fn row(self, check: &str, epsilon: f64, bound: f64, strict: bool) -> CheckRow {
        let pass = if strict { self.margin > 0.0 } else { self.margin >= 0.0 };
        CheckRow {
            check: check.into(),
            epsilon,
            value: self.value,
            bound,
            margin: self.margin,
            pass,
            witness: self.at.as_ref().map(witness).unwrap_or_default(),
        }
    }
}

/// Sampled verification of the construction: exactness on `V` and outside `R`, the
/// bound `sup_{V_ε} |Q̃| ≤ C₂`, the `η` estimates, and the Lyapunov inequalities
/// (b) `£‖q‖² ≥ (ελ/2)‖q‖²` for `‖p‖ ≤ b0` and (c) `£‖p‖² < 0` for `‖p‖ ≥ b0`, `q ≠ 0`.
/// Margins of (b) and (c) are normalized by `‖q‖²` and `‖p‖²`.
pub fn verify_profile(profile: &QTildeProfile, sample_count: usize, seed: u64) -> ProfileReport {
    let n = profile.frame.half_dim();
    let eps = profile.epsilon;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = sample_count.max(1);
    let mut rows = Vec::new();

    let mut inside = Worst::new();
    let mut outside = Worst::new();
    for _ in 0..count {
        let z = with_radius(&mut rng, 2 * n, 0.0, profile.r);
        let d = (profile.value(&z) - profile.q(&z)).abs();
        inside.update(-d, d, &z);
        let z = with_radius(&mut rng, 2 * n, profile.big_r, 3.0 * profile.big_r);
        let d = (profile.value(&z) - eps * profile.q(&z)).abs();
        outside.update(-d, d, &z);
    }
    rows.push(inside.row("equals_q_on_v", eps, 0.0, false));
    rows.push(outside.row("equals_eps_q_outside_r", eps, 0.0, false));

    let density = ((count as f64).powf(1.0 / (2 * n) as f64).ceil() as usize).max(9);
    let sup = hofer_norm_with(profile, &HoferOptions::new(profile.big_r, density));
    rows.push(CheckRow {
        check: "sup_qtilde_le_c2".into(),
        epsilon: eps,
        value: sup.value,
        bound: profile.c2,
        margin: profile.c2 - sup.value,
        pass: sup.value <= profile.c2,
        witness: sup.slices[0].2.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(" "),
    });

    let m = count.max(1000);
    let top = 1.5 * profile.c_prime;
    let mut shift = Worst::new();
    let mut slope = Worst::new();
    let mut odd = 0.0_f64;
    for j in 0..=m {
        let x = top * j as f64 / m as f64;
        let z = DVector::from_element(1, x);
        let s = (profile.eta.value(x) - eps * x).abs();
        shift.update(4.0 * profile.c - s, s, &z);
        let d = profile.eta.derivative(x);
        slope.update(d - 0.5 * eps, d, &z);
        odd = odd.max((profile.eta.value(-x) + profile.eta.value(x)).abs());
    }
    rows.push(shift.row("eta_shift_le_4c", eps, 4.0 * profile.c, false));
    rows.push(slope.row("eta_slope_ge_eps_half", eps, 0.5 * eps, false));
    rows.push(CheckRow {
        check: "eta_odd".into(),
        epsilon: eps,
        value: odd,
        bound: 0.0,
        margin: -odd,
        pass: odd == 0.0,
        witness: String::new(),
    });

    let lam = profile.lambda;
    let mut lyap_b = Worst::new();
    let mut lyap_c = Worst::new();
    let mut proof_c = Worst::new();
    let q_top = 1.2 * profile.a1;
    for _ in 0..count {
        let p = with_radius(&mut rng, n, 0.0, profile.b0);
        let q = with_radius(&mut rng, n, 1e-3 * profile.r, q_top);
        let z = linalg::join_pq(&p, &q);
        let (dq, _) = profile.lyapunov_derivatives(&z);
        let nq2 = q.norm_squared();
        lyap_b.update((dq - 0.5 * eps * lam * nq2) / nq2, dq, &z);

        let p = with_radius(&mut rng, n, profile.b0, 1.2 * profile.b1);
        let q = with_radius(&mut rng, n, 1e-3 * profile.r, q_top);
        let z = linalg::join_pq(&p, &q);
        let (_, dp) = profile.lyapunov_derivatives(&z);
        let np = p.norm();
        lyap_c.update(-dp / (np * np), dp, &z);
        let bound = -0.5 * eps * lam * np * np + 16.0 * profile.c * eps.sqrt() / profile.r * np;
        proof_c.update(-bound / (np * np), bound, &z);
    }
    rows.push(lyap_b.row("lyapunov_q_growth", eps, 0.5 * eps * lam, false));
    rows.push(lyap_c.row("lyapunov_p_decay", eps, 0.0, true));
    rows.push(proof_c.row("lyapunov_p_proof_bound", eps, 0.0, false));

    ProfileReport { epsilon: eps, rows }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub k: usize,
    pub radius: f64,
    pub samples: usize,
    /// `max |H̃^{♮k} − kεQ|` over samples outside `B_k`.
    pub max_abs: f64,
    pub witness: Vec<f64>,
}

impl SupportReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.max_abs < tol
    }
}

/// Samples `h_k = H̃^{♮k} − kεQ` on the shell `R_k < ‖z‖ ≤ 1.5 R_k` at random times.
pub fn iterate_support_check(
    tamed: &Tamed,
    k: usize,
    samples: usize,
    integrator: Integrator,
    seed: u64,
) -> Result<SupportReport> {
    let radius = tamed.profile.bk_radius(k);
    let it = iterate(tamed, k, integrator)?;
    let lin = tamed.linear_part(k);
    let dim = tamed.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0_f64, vec![0.0; dim]);
    for _ in 0..samples {
        let z = with_radius(&mut rng, dim, radius * (1.0 + 1e-9), 1.5 * radius);
        let t = rng.random_range(0.0..=1.0);
        let d = (it.try_value(t, &z)? - lin.value(t, &z)).abs();
        if d > worst.0 {
            worst = (d, z.iter().copied().collect());
        }
    }
    Ok(SupportReport {
        k,
        radius,
        samples,
        max_abs: worst.0,
        witness: worst.1,
    })
}

/// Largest `ε` with `‖φ^{ε(iterations − 1)}_Q‖ ≤ 2`.
pub fn max_shift_epsilon(frame: &NormalFrame, kappa: f64, iterations: usize) -> f64 {
    if iterations <= 1 {
        return 1.0;
    }
    let norm = |s: f64| linalg::op_norm(&exact_linear_flow(frame, kappa, s));
    let (mut lo, mut hi) = (0.0, 1.0);
    while norm(hi) <= 2.0 {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if norm(mid) <= 2.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo / (iterations - 1) as f64).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub k: usize,
    pub l: usize,
    pub epsilon: f64,
    pub radius: f64,
    /// `‖H̃^{♮(k+l)} − H̃^{♮k}‖_{B_{k+l}}`.
    pub raw: f64,
    /// The same norm for the one-periodic reparametrizations of both iterates.
    pub periodized: Option<f64>,
    pub bound: f64,
    pub grid_spacing: f64,
}

impl ShiftReport {
    pub fn pass(&self) -> bool {
        self.raw <= self.bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftOptions {
    pub grid_density: usize,
    pub time_samples: usize,
    pub step: f64,
    pub periodized: bool,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        Self {
            grid_density: 25,
            time_samples: 8,
            step: 0.05,
            periodized: false,
        }
    }
}

/// Measures the iteration shift and compares it with `C₃ l`. Rejects `(k, l, ε)` violating
/// `‖φ^{ε(k+l−1)}_Q‖ ≤ 2`.
pub fn shift_bound_check(tamed: &Tamed, k: usize, l: usize, opts: &ShiftOptions) -> Result<ShiftReport> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidInput("k and l must be at least 1".into()));
    }
    let p = &tamed.profile;
    let norm = linalg::op_norm(&exact_linear_flow(&p.frame, p.kappa * p.epsilon, (k + l - 1) as f64));
    if norm > 2.0 * (1.0 + 1e-12) {
        return Err(Error::Precondition {
            reason: format!("flow norm {norm} exceeds 2"),
            max_epsilon: max_shift_epsilon(&p.frame, p.kappa, k + l),
        });
    }
    let integ = Integrator::new(opts.step);
    let radius = p.bk_radius(k + l);
    let hopts = HoferOptions {
        ball_radius: radius,
        grid_density: opts.grid_density,
        time_samples: opts.time_samples,
        refine: true,
    };
    let diff = iterate_difference(tamed, k, k + l, integ)?;
    let raw = hofer_norm_with(&diff, &hopts);
    let periodized = if opts.periodized {
        let hi = periodize(
            tamed.linear_part(k + l),
            Difference(iterate(tamed, k + l, integ)?, tamed.linear_part(k + l)),
            Ramp::default(),
            integ,
        )?;
        let lo = periodize(
            tamed.linear_part(k),
            Difference(iterate(tamed, k, integ)?, tamed.linear_part(k)),
            Ramp::default(),
            integ,
        )?;
        let mut o = hopts;
        o.time_samples = opts.time_samples.max(16);
        Some(hofer_norm_with(&Difference(hi, lo), &o).value)
    } else {
        None
    };
    Ok(ShiftReport {
        k,
        l,
        epsilon: p.epsilon,
        radius,
        raw: raw.value,
        periodized,
        bound: p.c3 * l as f64,
        grid_spacing: raw.grid_spacing,
    })
}
