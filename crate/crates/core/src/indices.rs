//! Mean index and Conley–Zehnder index of symplectic paths.
//!
//! Normalization: a non-degenerate maximum of an autonomous Hamiltonian with small Hessian
//! has `μ_CZ = n`, a hyperbolic path has `μ_CZ = 0`.
//!
//! The mean index is computed from the continuous lift of the rotation function
//! `ρ: Sp(2n) → S¹`, the product of the Krein-positive eigenvalues on the unit circle times
//! `(−1)^{m/2}`, `m` the number of negative real eigenvalues. `ρ` is continuous, so along a
//! path its argument lifts to `r(Φ)`, and `Δ(Φ) = r(Φ)/π`. The Krein form is
//! `h(v, w) = −i ω(v̄, w)`; it is positive on the `e^{iθ}` eigenvector of the clockwise
//! rotation `(p, q) ↦ (p cos θ + q sin θ, −p sin θ + q cos θ)`, which is the time-θ map of
//! `H = −(p² + q²)/2`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};

const CIRCLE_TOL: f64 = 1e-7;
const CLUSTER_TOL: f64 = 1e-6;
const DEGENERACY_TOL: f64 = 1e-9;
const SYMPLECTIC_TOL: f64 = 1e-8;
const MAX_INCREMENT: f64 = PI / 4.0;

/// Samples `(t, Φ(t))` of a path in `Sp(2n)` with `Φ(0) = Id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticPath {
    pub samples: Vec<(f64, DMatrix<f64>)>,
}

impl SymplecticPath {
    pub fn new(samples: Vec<(f64, DMatrix<f64>)>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::InvalidInput("empty symplectic path".into()))?;
        let dim = first.1.nrows();
        if dim == 0 || dim % 2 == 1 {
            return Err(Error::InvalidInput(format!("odd or zero path dimension {dim}")));
        }
        if (&first.1 - DMatrix::<f64>::identity(dim, dim)).amax() > 1e-12 {
            return Err(Error::InvalidInput("path does not start at the identity".into()));
        }
        for (t, m) in &samples {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.nrows(),
                });
            }
            let defect = linalg::symplectic_defect(m);
            if defect > SYMPLECTIC_TOL * m.amax().max(1.0).powi(2) {
                return Err(Error::InvalidInput(format!(
                    "sample at t = {t} is not symplectic (defect {defect:e})"
                )));
            }
        }
        Ok(Self { samples })
    }

    /// `exp(tX)` at `steps + 1` equally spaced times on `[0, duration]`.
    pub fn linear(x: &DMatrix<f64>, duration: f64, steps: usize) -> Result<Self> {
        let steps = steps.max(1);
        let samples = (0..=steps)
            .map(|j| {
                let t = duration * j as f64 / steps as f64;
                (t, (x * t).exp())
            })
            .collect();
        Self::new(samples)
    }

    pub fn dim(&self) -> usize {
        self.samples[0].1.nrows()
    }

    pub fn half_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0)
    }

    pub fn monodromy(&self) -> &DMatrix<f64> {
        &self.samples[self.samples.len() - 1].1
    }

    /// The `k`-fold iterate `t ↦ Φ(t − jT) Φ(T)^j` on `[0, kT]`.
    pub fn iterate(&self, k: usize) -> Self {
        let period = self.duration();
        let m = self.monodromy().clone();
        let dim = self.dim();
        let mut power = DMatrix::<f64>::identity(dim, dim);
        let mut samples = Vec::with_capacity(k * (self.samples.len() - 1) + 1);
        samples.push(self.samples[0].clone());
        for j in 0..k {
            for (t, phi) in &self.samples[1..] {
                samples.push((t + j as f64 * period, phi * &power));
            }
            power = &m * power;
        }
        Self { samples }
    }

    pub fn max_symplectic_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, m)| linalg::symplectic_defect(m))
            .fold(0.0, f64::max)
    }
}

/// Spectral data of a symplectic matrix relevant to the indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticSpectrum {
    /// Arguments in `[0, 2π)` of the Krein-positive eigenvalues on the unit circle
    /// (excluding ±1), repeated with multiplicity.
    pub angles: Vec<f64>,
    /// Number of negative real eigenvalues (even).
    pub negative_real: usize,
    /// Number of non-real eigenvalues off the unit circle.
    pub off_circle_complex: usize,
    /// False if some eigenvalue on the circle has a nontrivial Jordan block.
    pub semisimple: bool,
}

impl EllipticSpectrum {
    pub fn rho(&self) -> C64 {
        let phase: f64 = self.angles.iter().sum::<f64>() + PI * (self.negative_real / 2) as f64;
        C64::from_polar(1.0, phase)
    }
}

/// Closed-form endpoint angle in dimension two: `θ ∈ (0, 2π)` for elliptic `M`.
pub fn elliptic_angle_2d(m: &DMatrix<f64>) -> Option<f64> {
    let tr = m[(0, 0)] + m[(1, 1)];
    if tr.abs() >= 2.0 {
        return None;
    }
    let base = (0.5 * tr).acos();
    Some(if m[(0, 1)] > 0.0 { base } else { TAU - base })
}

fn spectrum_2d(m: &DMatrix<f64>) -> EllipticSpectrum {
    let tr = m[(0, 0)] + m[(1, 1)];
    match elliptic_angle_2d(m) {
        Some(theta) => EllipticSpectrum {
            angles: vec![theta],
            negative_real: 0,
            off_circle_complex: 0,
            semisimple: true,
        },
        None => EllipticSpectrum {
            angles: Vec::new(),
            negative_real: if tr < 0.0 { 2 } else { 0 },
            off_circle_complex: 0,
            semisimple: (m - DMatrix::identity(2, 2) * tr.signum()).amax() < 1e-12 || tr.abs() > 2.0,
        },
    }
}

/// Krein-positive dimension of the invariant subspace for a cluster of `size` eigenvalues
/// near `center`, plus whether the cluster is semisimple.
fn krein_cluster(m: &DMatrix<f64>, center: C64, size: usize) -> (usize, bool) {
    let dim = m.nrows();
    let n = dim / 2;
    let shifted: DMatrix<C64> = DMatrix::from_fn(dim, dim, |i, j| {
        let v = C64::new(m[(i, j)], 0.0);
        if i == j {
            v - center
        } else {
            v
        }
    });
    let scale = 1.0 + m.amax();
    let (sv, _) = linalg::smallest_right_singular(&shifted, size);
    let geometric = sv.iter().filter(|&&s| s < 1e-6 * scale).count();
    let mut power = shifted.clone();
    for _ in 1..size {
        power = &power * &shifted;
    }
    let (_, basis) = linalg::smallest_right_singular(&power, size);
    let omega = linalg::omega(n).map(|x| C64::new(x, 0.0));
    let gram = basis.adjoint() * omega * &basis * C64::new(0.0, -1.0);
    let herm = (gram.clone() + gram.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigenvalues();
    let positive = eig.iter().filter(|&&e| e > 0.0).count();
    (positive, geometric >= size)
}

/// Krein-positive elliptic angles, negative real count and semisimplicity of `M`.
pub fn elliptic_spectrum(m: &DMatrix<f64>) -> Result<EllipticSpectrum> {
    let dim = m.nrows();
    if dim == 2 {
        return Ok(spectrum_2d(m));
    }
    let eig = m.complex_eigenvalues();
    let mut negative_real = 0;
    let mut off_circle_complex = 0;
    let mut on_circle: Vec<C64> = Vec::new();
    for &l in eig.iter() {
        let real = l.im.abs() <= 1e-12 * l.norm().max(1.0);
        if real {
            if l.re < 0.0 {
                negative_real += 1;
            }
        } else if (l.norm() - 1.0).abs() < CIRCLE_TOL {
            on_circle.push(l);
        } else {
            off_circle_complex += 1;
        }
    }
    if negative_real % 2 == 1 {
        return Err(Error::IndexUnavailable(
            "odd number of negative real eigenvalues; matrix is not symplectic to working precision".into(),
        ));
    }
    // greedy clustering on the circle
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for l in on_circle {
        match clusters
            .iter_mut()
            .find(|c| c.iter().any(|x| (x - l).norm() < CLUSTER_TOL))
        {
            Some(c) => c.push(l),
            None => clusters.push(vec![l]),
        }
    }
    let mut angles = Vec::new();
    let mut semisimple = true;
    for c in clusters {
        let mean = c.iter().sum::<C64>() / c.len() as f64;
        let center = mean / mean.norm();
        let (positive, ss) = krein_cluster(m, center, c.len());
        semisimple &= ss;
        let angle = center.arg().rem_euclid(TAU);
        angles.extend(std::iter::repeat(angle).take(positive));
    }
    angles.sort_by(f64::total_cmp);
    Ok(EllipticSpectrum {
        angles,
        negative_real,
        off_circle_complex,
        semisimple,
    })
}

/// `ρ(M) ∈ S¹`.
pub fn rotation_function(m: &DMatrix<f64>) -> Result<C64> {
    Ok(elliptic_spectrum(m)?.rho())
}

/// Continuous lift of `arg ρ` along the path, starting from 0 at the identity.
pub fn rotation_lift(path: &SymplecticPath) -> Result<f64> {
    let mut total = 0.0;
    let mut prev = 0.0;
    for (t, m) in &path.samples[1..] {
        let a = rotation_function(m)?.arg();
        let inc = linalg::wrap_angle(a - prev);
        if inc.abs() >= MAX_INCREMENT {
            return Err(Error::RefinePath { t: *t, increment: inc });
        }
        total += inc;
        prev = a;
    }
    Ok(total)
}

/// Mean index `Δ`.
pub fn mean_index(path: &SymplecticPath) -> Result<f64> {
    Ok(rotation_lift(path)? / PI)
}

/// Cross-check: winding of `arg det_C U(t)` (`U` the unitary polar factor) over the
/// `iterates`-fold path, divided by `iterates · π`. Converges to `Δ` like `1/iterates`.
pub fn mean_index_polar(path: &SymplecticPath, iterates: usize) -> Result<f64> {
    let it = path.iterate(iterates.max(1));
    let mut total = 0.0;
    let mut prev = 0.0;
    for (t, m) in &it.samples[1..] {
        let a = linalg::unitary_phase(m);
        let inc = linalg::wrap_angle(a - prev);
        if inc.abs() >= PI / 2.0 {
            return Err(Error::RefinePath { t: *t, increment: inc });
        }
        total += inc;
        prev = a;
    }
    Ok(total / (iterates.max(1) as f64 * PI))
}

/// Mean index of `t ↦ exp(tX)`, `t ∈ [0, duration]`, from the spectrum of the Hamiltonian
/// matrix `X`: `(duration/π) Σ α`, summed over Krein-positive eigenvalues `iα` of `X`.
pub fn closed_form_mean_index(x: &DMatrix<f64>, duration: f64) -> Result<f64> {
    let dim = x.nrows();
    let n = dim / 2;
    let eig = x.complex_eigenvalues();
    let scale = 1.0 + x.amax();
    let mut imag: Vec<f64> = eig
        .iter()
        .filter(|l| l.re.abs() < 1e-9 * scale && l.im > 1e-9 * scale)
        .map(|l| l.im)
        .collect();
    imag.sort_by(f64::total_cmp);
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for a in imag {
        match groups.last_mut() {
            Some((c, k)) if (a - *c).abs() < CLUSTER_TOL * scale => *k += 1,
            _ => groups.push((a, 1)),
        }
    }
    let omega = linalg::omega(n).map(|v| C64::new(v, 0.0));
    let mut sum = 0.0;
    for (alpha, size) in groups {
        let shifted: DMatrix<C64> = DMatrix::from_fn(dim, dim, |i, j| {
            let v = C64::new(x[(i, j)], 0.0);
            if i == j {
                v - C64::new(0.0, alpha)
            } else {
                v
            }
        });
        let mut power = shifted.clone();
        for _ in 1..size {
            power = &power * &shifted;
        }
        let (_, basis) = linalg::smallest_right_singular(&power, size);
        let gram = basis.adjoint() * &omega * &basis * C64::new(0.0, -1.0);
        let herm = (gram.clone() + gram.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigenvalues();
        let pos = eig.iter().filter(|&&e| e > 0.0).count() as f64;
        let neg = eig.iter().filter(|&&e| e < 0.0).count() as f64;
        sum += alpha * (pos - neg);
    }
    Ok(duration * sum / PI)
}

/// Whether `M` has eigenvalue 1 (smallest singular value of `M − Id` below tolerance).
pub fn is_degenerate(m: &DMatrix<f64>) -> bool {
    let dim = m.nrows();
    let shifted = m - DMatrix::<f64>::identity(dim, dim);
    shifted.singular_values().min() <= DEGENERACY_TOL * (1.0 + m.amax())
}

fn cz_from(delta: f64, spec: &EllipticSpectrum) -> Result<i64> {
    let value = delta + spec.angles.iter().map(|th| 1.0 - th / PI).sum::<f64>();
    let rounded = value.round();
    if (value - rounded).abs() > 1e-6 {
        return Err(Error::IndexUnavailable(format!(
            "index sum {value} is not integral; path sampling or spectrum is unreliable"
        )));
    }
    Ok(rounded as i64)
}

/// Conley–Zehnder index `μ_CZ = Δ + Σ (1 − θ_j/π)`, the sum over Krein-positive endpoint
/// eigenvalues `e^{iθ_j}`, `θ_j ∈ (0, 2π)`.
pub fn cz_index(path: &SymplecticPath) -> Result<i64> {
    let m = path.monodromy();
    if is_degenerate(m) {
        return Err(Error::Degenerate);
    }
    let spec = elliptic_spectrum(m)?;
    if !spec.semisimple {
        return Err(Error::IndexUnavailable(
            "non-semisimple monodromy on the unit circle".into(),
        ));
    }
    cz_from(mean_index(path)?, &spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    /// `None` when degenerate.
    pub cz: Option<i64>,
    pub mean: f64,
    pub nondegenerate: bool,
    pub gap_ok: bool,
}

impl IndexReport {
    pub fn cz_label(&self) -> String {
        self.cz.map_or_else(|| "degenerate".into(), |c| c.to_string())
    }
}

pub fn index_report(path: &SymplecticPath) -> Result<IndexReport> {
    let mean = mean_index(path)?;
    let m = path.monodromy();
    let nondegenerate = !is_degenerate(m);
    let cz = if nondegenerate {
        let spec = elliptic_spectrum(m)?;
        if !spec.semisimple {
            return Err(Error::IndexUnavailable(
                "non-semisimple monodromy on the unit circle".into(),
            ));
        }
        Some(cz_from(mean, &spec)?)
    } else {
        None
    };
    let mut report = IndexReport {
        cz,
        mean,
        nondegenerate,
        gap_ok: false,
    };
    report.gap_ok = nondegenerate && check_gap(&report, path.half_dim());
    Ok(report)
}

/// `0 ≤ |Δ − μ_CZ| < n`, strict on the right.
pub fn check_gap(report: &IndexReport, n: usize) -> bool {
    match report.cz {
        Some(cz) => (report.mean - cz as f64).abs() < n as f64,
        None => false,
    }
}

/// Spectral type of a non-degenerate 4D monodromy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourDimClass {
    /// All eigenvalues real.
    Hyperbolic,
    /// A quadruple `{λ, λ̄, 1/λ, 1/λ̄}` off the unit circle.
    ComplexQuadruple,
    /// Two elliptic pairs whose Krein-positive angles are opposite, `θ₂ = 2π − θ₁`.
    OppositeElliptic,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourDimVerdict {
    pub class: FourDimClass,
    pub mean: f64,
    pub cz: i64,
    pub zero_mean: bool,
    /// Zero mean index with a spectral type outside the dichotomy.
    pub flagged: bool,
}

impl FourDimVerdict {
    pub fn holds(&self) -> bool {
        self.zero_mean && self.class != FourDimClass::Other && self.cz == 0
    }
}

pub fn classify_4d(path: &SymplecticPath) -> Result<FourDimVerdict> {
    if path.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: path.dim(),
        });
    }
    let m = path.monodromy();
    if is_degenerate(m) {
        return Err(Error::Degenerate);
    }
    let spec = elliptic_spectrum(m)?;
    let mean = mean_index(path)?;
    let cz = cz_index(path)?;
    let class = if spec.off_circle_complex == 4 {
        FourDimClass::ComplexQuadruple
    } else if spec.angles.is_empty() && spec.off_circle_complex == 0 {
        FourDimClass::Hyperbolic
    } else if spec.angles.len() == 2 && (spec.angles[0] + spec.angles[1] - TAU).abs() < 1e-6 {
        FourDimClass::OppositeElliptic
    } else {
        FourDimClass::Other
    };
    let zero_mean = mean.abs() < 1e-6;
    Ok(FourDimVerdict {
        class,
        mean,
        cz,
        zero_mean,
        flagged: zero_mean && class == FourDimClass::Other,
    })
}

/// True iff the path has zero mean index, its monodromy is hyperbolic or made of two
/// conjugate pairs, and its Conley–Zehnder index is zero.
pub fn zero_mean_implies_zero_cz_4d(path: &SymplecticPath) -> Result<bool> {
    Ok(classify_4d(path)?.holds())
}

/// Block-diagonal Hamiltonian matrix acting on `(p, q)` coordinates from 2D generators.
pub fn direct_sum_generators(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = blocks.len();
    let mut x = DMatrix::zeros(2 * n, 2 * n);
    for (i, b) in blocks.iter().enumerate() {
        x[(i, i)] = b[(0, 0)];
        x[(i, n + i)] = b[(0, 1)];
        x[(n + i, i)] = b[(1, 0)];
        x[(n + i, n + i)] = b[(1, 1)];
    }
    x
}

/// 2D generator of the flow of `H = −(ω/2)(p² + q²)`: clockwise rotation at rate `ω`.
pub fn rotation_generator(omega: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, omega, -omega, 0.0])
}

/// 2D generator of the flow of `H = a·pq`.
pub fn saddle_generator(a: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[-a, 0.0, 0.0, a])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot_path(rate: f64, duration: f64) -> SymplecticPath {
        SymplecticPath::linear(&rotation_generator(rate), duration, 400).unwrap()
    }

    #[test]
    fn hyperbolic_path() {
        let p = SymplecticPath::linear(&saddle_generator(1.0), 1.0, 50).unwrap();
        assert_eq!(mean_index(&p).unwrap(), 0.0);
        assert_eq!(cz_index(&p).unwrap(), 0);
    }

    #[test]
    fn small_rotation() {
        let a = 0.05;
        let p = rot_path(TAU * a, 1.0);
        assert!((mean_index(&p).unwrap() - 2.0 * a).abs() < 1e-12);
        assert_eq!(cz_index(&p).unwrap(), 1);
        let r = index_report(&p).unwrap();
        assert!(r.gap_ok);
    }

    #[test]
    fn counter_rotation_is_minimum() {
        let p = rot_path(-0.3, 1.0);
        assert!((mean_index(&p).unwrap() + 0.3 / PI).abs() < 1e-12);
        assert_eq!(cz_index(&p).unwrap(), -1);
    }

    #[test]
    fn long_rotation_indices() {
        // angle 5π/2: Δ = 2.5, endpoint angle π/2, μ = 2.5 + 0.5 = 3
        let p = rot_path(2.5 * PI, 1.0);
        assert!((mean_index(&p).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(cz_index(&p).unwrap(), 3);
    }

    #[test]
    fn two_dim_spectrum_matches_general() {
        for &(rate, t) in &[(0.4, 1.0), (2.0, 1.3), (-1.1, 0.7)] {
            let m = (rotation_generator(rate) * t).exp();
            let th = elliptic_angle_2d(&m).unwrap();
            // embed as a 4D matrix by direct sum with a saddle
            let x = direct_sum_generators(&[rotation_generator(rate), saddle_generator(0.5)]);
            let spec = elliptic_spectrum(&(x * t).exp()).unwrap();
            assert_eq!(spec.angles.len(), 1);
            assert!((spec.angles[0] - th).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_endpoint() {
        let p = rot_path(TAU, 1.0);
        assert_eq!(cz_index(&p), Err(Error::Degenerate));
        assert!(!index_report(&p).unwrap().nondegenerate);
    }

    #[test]
    fn coarse_path_is_rejected() {
        let p = SymplecticPath::linear(&rotation_generator(3.0), 1.0, 2).unwrap();
        assert!(matches!(mean_index(&p), Err(Error::RefinePath { .. })));
    }

    #[test]
    fn gap_is_strict() {
        let r = IndexReport {
            cz: Some(1),
            mean: 2.0,
            nondegenerate: true,
            gap_ok: false,
        };
        assert!(!check_gap(&r, 1));
        assert!(check_gap(&r, 2));
    }

    #[test]
    fn polar_winding_cross_check() {
        let x = direct_sum_generators(&[rotation_generator(0.9), saddle_generator(0.4)]);
        let p = SymplecticPath::linear(&x, 1.0, 40).unwrap();
        let exact = closed_form_mean_index(&x, 1.0).unwrap();
        assert!((mean_index(&p).unwrap() - exact).abs() < 1e-10);
        let polar = mean_index_polar(&p, 8).unwrap();
        assert!((polar - exact).abs() < 0.2);
    }

    #[test]
    fn four_dim_dichotomy() {
        let hh = direct_sum_generators(&[saddle_generator(1.0), saddle_generator(0.5)]);
        let p = SymplecticPath::linear(&hh, 1.0, 20).unwrap();
        assert!(zero_mean_implies_zero_cz_4d(&p).unwrap());

        let ee = direct_sum_generators(&[rotation_generator(0.8), rotation_generator(-0.8)]);
        let p = SymplecticPath::linear(&ee, 1.0, 40).unwrap();
        let v = classify_4d(&p).unwrap();
        assert_eq!(v.class, FourDimClass::OppositeElliptic);
        assert!(v.holds());

        let eh = direct_sum_generators(&[rotation_generator(0.3), saddle_generator(1.0)]);
        let p = SymplecticPath::linear(&eh, 1.0, 40).unwrap();
        assert!(!zero_mean_implies_zero_cz_4d(&p).unwrap());
    }

    #[test]
    fn complex_quadruple() {
        // X = [[−B, 0], [0, Bᵀ]] with B having eigenvalues a ± ib
        let b = DMatrix::from_row_slice(2, 2, &[0.5, 1.2, -1.2, 0.5]);
        let mut x = DMatrix::zeros(4, 4);
        x.view_mut((0, 0), (2, 2)).copy_from(&(-&b));
        x.view_mut((2, 2), (2, 2)).copy_from(&b.transpose());
        let p = SymplecticPath::linear(&x, 1.0, 40).unwrap();
        let v = classify_4d(&p).unwrap();
        assert_eq!(v.class, FourDimClass::ComplexQuadruple);
        assert!(v.holds());
    }
}
