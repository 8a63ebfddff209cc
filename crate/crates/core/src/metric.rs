//! The Bures metric in its spectral form, with the closed-form entries used
//! to check it.
//!
//! In the eigenbasis of ρ the line element is
//! `ds² = c Σ_{k,l} |⟨k|dρ|l⟩|² / (λ_k + λ_l)` with `c = 1/2`.

use nalgebra::{DMatrix, Matrix2, SMatrix};
use num_complex::Complex64;

use crate::error::{BuresError, Result};
use crate::state_space::{
    self, bloch_unchecked, eigen_jet, ParameterPoint, Spectrum, DEFAULT_DEGENERACY_THRESHOLD,
};

pub type Matrix8 = SMatrix<f64, 8, 8>;
pub type Matrix6 = SMatrix<f64, 6, 6>;

/// Global normalization of the spectral metric.
pub const BURES_CALIBRATION: f64 = 0.5;

/// Blocks with a larger condition number are reported as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    pub calibration: f64,
    pub degeneracy_threshold: f64,
    pub max_condition: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            calibration: BURES_CALIBRATION,
            degeneracy_threshold: DEFAULT_DEGENERACY_THRESHOLD,
            max_condition: MAX_CONDITION,
        }
    }
}

/// Metric, inverse and volume density at one point, coordinates ordered
/// `(α, τ, a, β, b, θ, ζ₁, ζ₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAtPoint {
    pub g: Matrix8,
    pub g_inv: Matrix8,
    pub sqrt_det: f64,
}

/// `c Σ Re[W_x[k,l] W_y[l,k]] / (λ_k + λ_l)` for Hermitian `W_x`.
pub(crate) fn spectral_metric<const N: usize, const M: usize>(
    w: &[SMatrix<Complex64, N, N>; M],
    lambda: &[f64; N],
    calibration: f64,
) -> SMatrix<f64, M, M> {
    let scaled: [SMatrix<Complex64, N, N>; M] = std::array::from_fn(|x| {
        SMatrix::from_fn(|k, l| w[x][(k, l)] / (lambda[k] + lambda[l]).sqrt())
    });
    let mut g = SMatrix::<f64, M, M>::zeros();
    for x in 0..M {
        for y in x..M {
            let mut acc = 0.0;
            for (u, v) in scaled[x].iter().zip(scaled[y].iter()) {
                acc += u.re * v.re + u.im * v.im;
            }
            g[(x, y)] = calibration * acc;
            g[(y, x)] = calibration * acc;
        }
    }
    g
}

/// The 8×8 metric alone, with the degeneracy guard but no range check.
pub fn metric_tensor(p: &ParameterPoint, config: &MetricConfig) -> Result<Matrix8> {
    p.check_finite()?;
    p.spectrum()
        .check_nondegenerate(config.degeneracy_threshold)?;
    let jet = eigen_jet(p);
    Ok(spectral_metric(
        &jet.w,
        &jet.spectrum.as_array(),
        config.calibration,
    ))
}

pub fn metric(p: &ParameterPoint) -> Result<MetricAtPoint> {
    metric_with(p, &MetricConfig::default())
}

pub fn metric_with(p: &ParameterPoint, config: &MetricConfig) -> Result<MetricAtPoint> {
    let g = metric_tensor(p, config)?;
    let (g_inv, sqrt_det) = blockwise_inverse(&g, config.max_condition)?;
    Ok(MetricAtPoint { g, g_inv, sqrt_det })
}

/// Inverts the angular 6×6 and spectral 2×2 blocks separately so the
/// off-block zeros stay exact. Returns the inverse and `√det g`.
fn blockwise_inverse(g: &Matrix8, max_condition: f64) -> Result<(Matrix8, f64)> {
    let angular: Matrix6 = g.fixed_view::<6, 6>(0, 0).into_owned();
    let spectral: Matrix2<f64> = g.fixed_view::<2, 2>(6, 6).into_owned();

    check_condition(angular.symmetric_eigenvalues().as_slice(), max_condition)?;
    check_condition(spectral.symmetric_eigenvalues().as_slice(), max_condition)?;

    let chol = angular.cholesky().ok_or(BuresError::SingularMetric {
        condition: f64::INFINITY,
    })?;
    let angular_inv = chol.inverse();
    let det6: f64 = chol.l_dirty().diagonal().iter().map(|d| d * d).product();
    let det2 = spectral.determinant();
    let spectral_inv = Matrix2::new(
        spectral[(1, 1)],
        -spectral[(0, 1)],
        -spectral[(1, 0)],
        spectral[(0, 0)],
    ) / det2;

    let mut inv = Matrix8::zeros();
    inv.fixed_view_mut::<6, 6>(0, 0)
        .copy_from(&symmetrize6(&angular_inv));
    inv.fixed_view_mut::<2, 2>(6, 6).copy_from(&spectral_inv);
    Ok((inv, (det6 * det2).sqrt()))
}

fn symmetrize6(m: &Matrix6) -> Matrix6 {
    (m + m.transpose()) * 0.5
}

fn check_condition(eigenvalues: &[f64], max_condition: f64) -> Result<()> {
    let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigenvalues.iter().copied().fold(0.0, f64::max);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > max_condition {
        return Err(BuresError::SingularMetric { condition });
    }
    Ok(())
}

/// The subexpressions `A` and `B` that recur in the metric entries.
pub fn closed_form_ab(s: &Spectrum) -> (f64, f64) {
    let (l1, l2) = (s.lambda1, s.lambda2);
    let a = 3.0 - 7.0 * l1 + 4.0 * l1 * l1 + 7.0 * (-1.0 + l1) * l2 + 4.0 * l2 * l2;
    let b = 4.0 * l1.powi(3)
        + l1 * l1 * (-9.0 + 5.0 * l2)
        + l1 * (-1.0 + l2) * (-7.0 + 5.0 * l2)
        + (-1.0 + l2) * (2.0 + l2 * (-5.0 + 4.0 * l2));
    (a, b)
}

/// Reference closed forms for three entries of the metric and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormEntries {
    pub g_theta_theta: f64,
    pub g_inv_beta_beta: f64,
    pub g_inv_alpha_alpha: f64,
}

/// The reference closed forms, transcribed without correction:
///
/// ```text
/// g_θθ = −(B + A(λ₁ − λ₂) cos 2b) / (2(λ₁ − 1)(λ₂ − 1))
/// g^ββ = −(B + A(λ₁ − λ₂) cos 2b) csc²θ / (8(−1 + 2λ₁ + λ₂)²(−1 + λ₁ + 2λ₂)²)
/// g^αα = g^ββ csc²β sec²β / 4
/// ```
///
/// The `g^ββ` expression is a factor of four below the inverse of the metric
/// that reproduces `g_θθ` and the volume density; see the crate README.
pub fn closed_form_entries(p: &ParameterPoint) -> Result<ClosedFormEntries> {
    p.check_finite()?;
    let s = p.spectrum();
    s.check_nondegenerate(DEFAULT_DEGENERACY_THRESHOLD)?;
    let (a, b) = closed_form_ab(&s);
    let (l1, l2) = (s.lambda1, s.lambda2);
    let numerator = b + a * (l1 - l2) * (2.0 * p.b).cos();
    let g_theta_theta = -numerator / (2.0 * (l1 - 1.0) * (l2 - 1.0));
    let gap13 = -1.0 + 2.0 * l1 + l2;
    let gap23 = -1.0 + l1 + 2.0 * l2;
    let g_inv_beta_beta =
        -numerator / p.theta.sin().powi(2) / (8.0 * gap13 * gap13 * gap23 * gap23);
    let g_inv_alpha_alpha = g_inv_beta_beta / (p.beta.sin().powi(2) * p.beta.cos().powi(2)) / 4.0;
    Ok(ClosedFormEntries {
        g_theta_theta,
        g_inv_beta_beta,
        g_inv_alpha_alpha,
    })
}

/// `√det g` from the assembled metric.
pub fn volume_element(p: &ParameterPoint) -> Result<f64> {
    Ok(metric(p)?.sqrt_det)
}

/// The closed-form volume density, carried over to `(ζ₁, ζ₂)` by the
/// Jacobian of `(λ₁, λ₂)`.
pub fn closed_form_volume(p: &ParameterPoint) -> Result<f64> {
    p.check_finite()?;
    let s = p.spectrum();
    s.check_nondegenerate(DEFAULT_DEGENERACY_THRESHOLD)?;
    Ok(closed_form_volume_lambda(p, &s) * state_space::zeta_jacobian(p.zeta1, p.zeta2))
}

/// The same density in `(λ₁, λ₂)` coordinates.
pub fn closed_form_volume_lambda(p: &ParameterPoint, s: &Spectrum) -> f64 {
    let [l1, l2, l3] = s.as_array();
    let angular =
        (2.0 * p.b).sin() * (2.0 * p.beta).sin() * p.theta.sin().powi(2) * (2.0 * p.theta).sin();
    let gaps = ((l1 - l2) * (l1 - l3) * (l2 - l3)).powi(2);
    let sums = (l1 + l2) * (l1 + l3) * (l2 + l3);
    angular / (8.0 * (l1 * l2 * l3).sqrt()) * gaps / sums
}

/// A metric on a coordinate patch, as consumed by the curvature code.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;

    /// Metric at raw coordinates `x` (length `dim`).
    fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>>;
}

/// The qutrit Bures metric in `(α, τ, a, β, b, θ, ζ₁, ζ₂)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QutritBures {
    pub config: MetricConfig,
}

impl MetricField for QutritBures {
    fn dim(&self) -> usize {
        8
    }

    fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let p = ParameterPoint::from_array(x.try_into().expect("eight coordinates"));
        let g = metric_tensor(&p, &self.config)?;
        Ok(DMatrix::from_column_slice(8, 8, g.as_slice()))
    }
}

/// The qubit Bures metric in Bloch coordinates `(r, θ_s, φ_s)`, a round
/// three-sphere of radius 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitBures {
    pub calibration: f64,
}

impl Default for QubitBures {
    fn default() -> Self {
        Self {
            calibration: BURES_CALIBRATION,
        }
    }
}

impl QubitBures {
    pub fn metric3(&self, r: f64, theta_s: f64, phi_s: f64) -> SMatrix<f64, 3, 3> {
        let st = bloch_unchecked(r, theta_s, phi_s);
        let v = st.eigenvectors;
        let va = v.adjoint();
        let w = st.partials.map(|d| va * d * v);
        spectral_metric(&w, &st.eigenvalues, self.calibration)
    }
}

impl MetricField for QubitBures {
    fn dim(&self) -> usize {
        3
    }

    fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if !(x[0] > 0.0 && x[0] < 1.0) {
            return Err(BuresError::OutOfDomain {
                coordinate: "r",
                value: x[0],
                lower: 0.0,
                upper: 1.0,
            });
        }
        let g = self.metric3(x[0], x[1], x[2]);
        Ok(DMatrix::from_column_slice(3, 3, g.as_slice()))
    }
}
