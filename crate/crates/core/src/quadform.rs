//! Hyperbolic quadratic forms with real spectrum in normal form.
//!
//! A form is given as a direct sum of blocks
//! `σ Σ p_i q_i − Σ p_i q_{i+1}` (one per positive eigenvalue `σ` of multiplicity `m`),
//! written as `Q(p, q) = ⟨A p, q⟩` with `A` lower bidiagonal. A symplectic diagonal
//! rescaling `p_i ↦ s_i p_i`, `q_i ↦ q_i / s_i` shrinks the strictly lower part `E` of
//! `A = D + E` until the smallness conditions needed by the maximum principle hold.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// One normal block: eigenvalue `sigma > 0` with multiplicity `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub sigma: f64,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlockSpec {
    pub blocks: Vec<Block>,
}

impl BlockSpec {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let spec = Self { blocks };
        spec.validate()?;
        Ok(spec)
    }

    pub fn single(sigma: f64, m: usize) -> Result<Self> {
        Self::new(vec![Block { sigma, m }])
    }

    /// Accepts complex eigenvalues `re ± i·im` only to reject them with a distinct error.
    pub fn from_eigenvalue(re: f64, im: f64, m: usize) -> Result<Self> {
        if im != 0.0 {
            return Err(Error::ComplexSpectrum { re, im });
        }
        Self::single(re.abs(), m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::DimensionZero);
        }
        for b in &self.blocks {
            if !(b.sigma.is_finite() && b.sigma > 0.0) || b.m == 0 {
                return Err(Error::InvalidBlock {
                    sigma: b.sigma,
                    m: b.m,
                });
            }
        }
        Ok(())
    }

    /// Half-dimension `n = Σ m`.
    pub fn half_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.m).sum()
    }
}

/// `Q(p, q) = ⟨A p, q⟩` in the current (possibly rescaled) symplectic coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFrame {
    pub a: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub e: DMatrix<f64>,
    /// Coordinates relative to the unscaled normal form: `p = S p'`, `q = S⁻¹ q'`.
    pub scale: DVector<f64>,
    /// `min_i D_ii`.
    pub lambda: f64,
    /// `max |eig A|`.
    pub lambda_max: f64,
    /// `sup |Q(x)| / ‖x‖² = σ_max(A) / 2`, the largest eigenvalue of `Q` with respect to `‖x‖²`.
    pub form_norm: f64,
}

pub fn build_normal_form(spec: &BlockSpec) -> Result<NormalFrame> {
    spec.validate()?;
    let n = spec.half_dim();
    let mut a = DMatrix::zeros(n, n);
    let mut offset = 0;
    for b in &spec.blocks {
        for i in 0..b.m {
            a[(offset + i, offset + i)] = b.sigma;
            if i + 1 < b.m {
                // −p_i q_{i+1}
                a[(offset + i + 1, offset + i)] = -1.0;
            }
        }
        offset += b.m;
    }
    Ok(NormalFrame::from_matrix(a, DVector::from_element(n, 1.0)))
}

impl NormalFrame {
    fn from_matrix(a: DMatrix<f64>, scale: DVector<f64>) -> Self {
        let n = a.nrows();
        let d = DMatrix::from_diagonal(&a.diagonal());
        let e = &a - &d;
        let diag = a.diagonal();
        let lambda = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        // A is triangular: its eigenvalues are its diagonal entries
        let lambda_max = diag.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let form_norm = if n == 0 { 0.0 } else { linalg::op_norm(&a) / 2.0 };
        Self {
            a,
            d,
            e,
            scale,
            lambda,
            lambda_max,
            form_norm,
        }
    }

    pub fn half_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn dim(&self) -> usize {
        2 * self.half_dim()
    }

    pub fn q_value(&self, z: &DVector<f64>) -> f64 {
        let n = self.half_dim();
        let p = z.rows(0, n);
        let q = z.rows(n, n);
        q.dot(&(&self.a * p))
    }

    /// Gradient `(∂Q/∂p, ∂Q/∂q) = (Aᵀq, Ap)`.
    pub fn q_gradient(&self, z: &DVector<f64>) -> DVector<f64> {
        let n = self.half_dim();
        let p = z.rows(0, n).into_owned();
        let q = z.rows(n, n).into_owned();
        linalg::join_pq(&(self.a.transpose() * q), &(&self.a * p))
    }

    /// Hessian `[[0, Aᵀ], [A, 0]]`.
    pub fn hessian(&self) -> DMatrix<f64> {
        let n = self.half_dim();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        h.view_mut((0, n), (n, n)).copy_from(&self.a.transpose());
        h.view_mut((n, 0), (n, n)).copy_from(&self.a);
        h
    }

    /// Transport a point from unscaled normal coordinates into this frame.
    pub fn to_frame(&self, z: &DVector<f64>) -> DVector<f64> {
        let n = self.half_dim();
        DVector::from_fn(2 * n, |i, _| {
            if i < n {
                z[i] / self.scale[i]
            } else {
                z[i] * self.scale[i - n]
            }
        })
    }

    pub fn from_frame(&self, z: &DVector<f64>) -> DVector<f64> {
        let n = self.half_dim();
        DVector::from_fn(2 * n, |i, _| {
            if i < n {
                z[i] * self.scale[i]
            } else {
                z[i] / self.scale[i - n]
            }
        })
    }
}

/// Linear Hamiltonian field of `Q`: `ṗ = −A p`, `q̇ = Aᵀ q`.
pub fn vector_field_matrix(frame: &NormalFrame) -> DMatrix<f64> {
    linalg::poisson(frame.half_dim()) * frame.hessian()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    /// `‖sym(E²)‖ ≤ λ²/10`
    pub cond_i: bool,
    /// `‖sym(DE)‖, ‖sym(ED)‖ ≤ λ²/20`
    pub cond_ii: bool,
    /// `‖E − Eᵀ‖ ≤ λ/8`
    pub cond_iii: bool,
    /// `λ_min(sym A) ≥ λ/2`, i.e. `£‖p‖² ≤ −λ‖p‖²` and `£‖q‖² ≥ λ‖q‖²` along `X_Q`.
    pub cond_lyapunov: bool,
    pub norm_e2: f64,
    pub norm_de: f64,
    pub norm_ed: f64,
    pub norm_skew: f64,
    pub min_sym_a: f64,
    pub lambda: f64,
}

impl SmallnessReport {
    pub fn all(&self) -> bool {
        self.cond_i && self.cond_ii && self.cond_iii && self.cond_lyapunov
    }

    /// Smallest slack over all conditions (non-negative iff all hold).
    pub fn margin(&self) -> f64 {
        let l2 = self.lambda * self.lambda;
        [
            l2 / 10.0 - self.norm_e2,
            l2 / 20.0 - self.norm_de,
            l2 / 20.0 - self.norm_ed,
            self.lambda / 8.0 - self.norm_skew,
            self.min_sym_a - self.lambda / 2.0,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

pub fn check_smallness(frame: &NormalFrame) -> SmallnessReport {
    let (d, e) = (&frame.d, &frame.e);
    let lambda = frame.lambda;
    let l2 = lambda * lambda;
    let norm_e2 = linalg::sym_op_norm(&linalg::sym(&(e * e)));
    let norm_de = linalg::sym_op_norm(&linalg::sym(&(d * e)));
    let norm_ed = linalg::sym_op_norm(&linalg::sym(&(e * d)));
    let norm_skew = linalg::op_norm(&(e - e.transpose()));
    let min_sym_a = linalg::min_sym_eigenvalue(&linalg::sym(&frame.a));
    SmallnessReport {
        cond_i: norm_e2 <= l2 / 10.0,
        cond_ii: norm_de <= l2 / 20.0 && norm_ed <= l2 / 20.0,
        cond_iii: norm_skew <= lambda / 8.0,
        cond_lyapunov: min_sym_a >= lambda / 2.0,
        norm_e2,
        norm_de,
        norm_ed,
        norm_skew,
        min_sym_a,
        lambda,
    }
}

/// Apply the ladder `s_i = c^{-i}` with `c` halved from 1 until every smallness
/// condition holds. Entries of `E` are multiplied by powers `c^{i-j} ≤ c`, `D` is untouched.
pub fn rescale_to_small(frame: &NormalFrame) -> NormalFrame {
    let n = frame.half_dim();
    let mut c = 1.0_f64;
    loop {
        let ladder = DVector::from_fn(n, |i, _| c.powi(-(i as i32)));
        // A' = S⁻¹ A S in the new coordinates p = S p', q = S⁻¹ q'
        let a = DMatrix::from_fn(n, n, |i, j| frame.a[(i, j)] * ladder[j] / ladder[i]);
        let scale = frame.scale.component_mul(&ladder);
        let candidate = NormalFrame::from_matrix(a, scale);
        if check_smallness(&candidate).all() || c < 1e-12 {
            return candidate;
        }
        c *= 0.5;
    }
}

/// Slow-homotopy rate bound `(3λ²/20) · inf_{x≠0} ‖x‖²/|Q(x)| = 3λ²/(20 · form_norm)`.
pub fn slow_bound(frame: &NormalFrame) -> f64 {
    3.0 * frame.lambda * frame.lambda / (20.0 * frame.form_norm)
}

/// Complex structure and metric adapted to a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptedStructure {
    /// `J_Q` in the unscaled normal coordinates.
    pub jq: DMatrix<f64>,
    /// Gram matrix of `⟨·,·⟩_Q = ω(J_Q·, ·)` in the unscaled normal coordinates.
    pub g: DMatrix<f64>,
}

impl AdaptedStructure {
    /// `J_Q` and the metric expressed in the frame's own coordinates: standard `J`, identity metric.
    pub fn in_frame_coordinates(n: usize) -> Self {
        let jq = linalg::complex_structure(n);
        let g = jq.transpose() * linalg::omega(n);
        Self { jq, g }
    }
}

pub fn adapted_structure(frame: &NormalFrame) -> AdaptedStructure {
    let n = frame.half_dim();
    // z_unscaled = T z_frame with T = diag(S, S⁻¹)
    let t = DMatrix::from_diagonal(&DVector::from_fn(2 * n, |i, _| {
        if i < n {
            frame.scale[i]
        } else {
            1.0 / frame.scale[i - n]
        }
    }));
    let t_inv = DMatrix::from_diagonal(&t.diagonal().map(|v| 1.0 / v));
    let local = AdaptedStructure::in_frame_coordinates(n);
    let jq = &t * &local.jq * &t_inv;
    let g = linalg::omega(n);
    let g = jq.transpose() * g;
    AdaptedStructure { jq, g }
}
