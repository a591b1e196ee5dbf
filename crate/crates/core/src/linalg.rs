//! Small dense linear-algebra helpers shared across modules.
//!
//! Phase space is ordered `z = (p_1..p_n, q_1..q_n)` everywhere in the crate.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

/// Gram matrix of `ω = Σ dp_i ∧ dq_i`: `ω(x, y) = xᵀ Ω y`.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        m[(n + i, i)] = -1.0;
    }
    m
}

/// Matrix mapping a gradient to the Hamiltonian vector field:
/// `X_H = Jₛ ∇H` with `ṗ = −∂H/∂q`, `q̇ = ∂H/∂p`.
pub fn poisson(n: usize) -> DMatrix<f64> {
    -omega(n)
}

/// The complex structure with `J ∂_p = −∂_q`, i.e. `J(p, q) = (q, −p)`.
pub fn complex_structure(n: usize) -> DMatrix<f64> {
    omega(n)
}

pub fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest singular value.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Largest absolute eigenvalue of a symmetric matrix, i.e. `sup |xᵀMx| / ‖x‖²`.
pub fn sym_op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn min_sym_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

/// `‖MᵀΩM − Ω‖_max`.
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let om = omega(n);
    (m.transpose() * &om * m - om).amax()
}

/// Unitary polar factor `U` of `M = U P`.
pub fn polar_unitary(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    u * vt
}

/// Complex `n×n` matrix of a `2n×2n` real matrix commuting with `J`, under the
/// identification `w = q + i p` (so that `J` acts as multiplication by `i`).
pub fn complexify(u: &DMatrix<f64>) -> DMatrix<C64> {
    let n = u.nrows() / 2;
    DMatrix::from_fn(n, n, |i, j| C64::new(u[(n + i, n + j)], u[(i, n + j)]))
}

/// Phase of `det_C U` for a symplectic matrix, `U` its unitary polar factor.
pub fn unitary_phase(m: &DMatrix<f64>) -> f64 {
    let c = complexify(&polar_unitary(m));
    c.determinant().arg()
}

pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut x = (a + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    }
    x
}

pub fn split_pq(z: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let n = z.len() / 2;
    (z.rows(0, n).into_owned(), z.rows(n, n).into_owned())
}

pub fn join_pq(p: &DVector<f64>, q: &DVector<f64>) -> DVector<f64> {
    let n = p.len();
    DVector::from_fn(2 * n, |i, _| if i < n { p[i] } else { q[i - n] })
}

/// Singular values of a complex matrix, ascending, with right singular vectors as columns.
pub fn smallest_right_singular(m: &DMatrix<C64>, count: usize) -> (Vec<f64>, DMatrix<C64>) {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let cols = m.ncols();
    let take = count.min(order.len());
    let mut basis = DMatrix::zeros(cols, take);
    let mut values = Vec::with_capacity(take);
    for (k, &idx) in order.iter().take(take).enumerate() {
        values.push(svd.singular_values[idx]);
        for r in 0..cols {
            basis[(r, k)] = vt[(idx, r)].conj();
        }
    }
    (values, basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_matrices_are_consistent() {
        let n = 3;
        let j = complex_structure(n);
        let id = DMatrix::<f64>::identity(2 * n, 2 * n);
        assert!((&j * &j + &id).amax() < 1e-15);
        // metric ω(J·,·) is the identity
        assert!((j.transpose() * omega(n) - &id).amax() < 1e-15);
    }

    #[test]
    fn complexify_rotation() {
        let th: f64 = 0.7;
        let m = DMatrix::from_row_slice(2, 2, &[th.cos(), th.sin(), -th.sin(), th.cos()]);
        let c = complexify(&m);
        assert!((c[(0, 0)].arg() - th).abs() < 1e-14);
        assert!((unitary_phase(&m) - th).abs() < 1e-14);
    }

    #[test]
    fn wrap_angle_range() {
        for k in -10..10 {
            let a = 0.3 + k as f64 * std::f64::consts::TAU;
            assert!((wrap_angle(a) - 0.3).abs() < 1e-12);
        }
        assert!((wrap_angle(std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-15);
    }
}
