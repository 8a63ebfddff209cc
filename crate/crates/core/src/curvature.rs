//! Levi-Civita curvature of a metric field from finite differences of the
//! analytic metric.
//!
//! Index conventions: `Γ^i_{jk}` is symmetric in `(j, k)`,
//! `R^i_{jkl} = ∂_kΓ^i_{lj} − ∂_lΓ^i_{kj} + Γ^i_{km}Γ^m_{lj} − Γ^i_{lm}Γ^m_{kj}`,
//! `R_{ijkl} = g_{im}R^m_{jkl}`, `Ric_{jl} = R^i_{jil}` and `s = g^{jl}Ric_{jl}`.
//! With these signs round spheres have positive scalar curvature.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{BuresError, Result};
use crate::metric::{Matrix8, MetricField, QutritBures};
use crate::spin7::PairIndex;
use crate::state_space::{ParameterPoint, Spectrum};

/// Finite-difference settings for the metric jet.
#[derive(Debug, Clone, PartialEq)]
pub struct JetOptions {
    /// Base step, used for every coordinate without an override.
    pub step: f64,
    /// Per-coordinate steps; overrides `step` when present.
    pub steps: Option<Vec<f64>>,
    /// Combine steps `h` and `h/2` to cancel the `O(h²)` error.
    pub richardson: bool,
}

impl Default for JetOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            steps: None,
            richardson: true,
        }
    }
}

impl JetOptions {
    fn steps_for(&self, dim: usize) -> Vec<f64> {
        match &self.steps {
            Some(s) => {
                assert_eq!(s.len(), dim, "one step per coordinate");
                s.clone()
            }
            None => vec![self.step; dim],
        }
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            step: self.step * factor,
            steps: self
                .steps
                .as_ref()
                .map(|s| s.iter().map(|h| h * factor).collect()),
            richardson: self.richardson,
        }
    }
}

/// Metric with its first and second coordinate derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub dim: usize,
    pub g: DMatrix<f64>,
    /// `dg[idx3(i, j, k)] = ∂_k g_ij`.
    pub dg: Vec<f64>,
    /// `ddg[idx4(i, j, k, l)] = ∂_k ∂_l g_ij`.
    pub ddg: Vec<f64>,
}

#[inline]
fn idx3(n: usize, i: usize, j: usize, k: usize) -> usize {
    (i * n + j) * n + k
}

#[inline]
fn idx4(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

impl MetricJet {
    pub fn dg(&self, i: usize, j: usize, k: usize) -> f64 {
        self.dg[idx3(self.dim, i, j, k)]
    }

    pub fn ddg(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.ddg[idx4(self.dim, i, j, k, l)]
    }
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(k, d) in moves {
        y[k] += d;
    }
    y
}

/// Plain central differences at fixed steps.
fn central_jet(
    field: &dyn MetricField,
    x: &[f64],
    g0: &DMatrix<f64>,
    h: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = field.dim();
    let mut dg = vec![0.0; n * n * n];
    let mut ddg = vec![0.0; n * n * n * n];
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for k in 0..n {
        plus.push(field.metric_at(&shifted(x, &[(k, h[k])]))?);
        minus.push(field.metric_at(&shifted(x, &[(k, -h[k])]))?);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let (p, m, c) = (plus[k][(i, j)], minus[k][(i, j)], g0[(i, j)]);
                dg[idx3(n, i, j, k)] = (p - m) / (2.0 * h[k]);
                ddg[idx4(n, i, j, k, k)] = (p - 2.0 * c + m) / (h[k] * h[k]);
            }
        }
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let pp = field.metric_at(&shifted(x, &[(k, h[k]), (l, h[l])]))?;
            let pm = field.metric_at(&shifted(x, &[(k, h[k]), (l, -h[l])]))?;
            let mp = field.metric_at(&shifted(x, &[(k, -h[k]), (l, h[l])]))?;
            let mm = field.metric_at(&shifted(x, &[(k, -h[k]), (l, -h[l])]))?;
            let scale = 1.0 / (4.0 * h[k] * h[l]);
            for i in 0..n {
                for j in 0..n {
                    let v = (pp[(i, j)] - pm[(i, j)] - mp[(i, j)] + mm[(i, j)]) * scale;
                    ddg[idx4(n, i, j, k, l)] = v;
                    ddg[idx4(n, i, j, l, k)] = v;
                }
            }
        }
    }
    Ok((dg, ddg))
}

fn jet_once(field: &dyn MetricField, x: &[f64], opts: &JetOptions) -> Result<MetricJet> {
    let n = field.dim();
    let g = field.metric_at(x)?;
    let h = opts.steps_for(n);
    let (mut dg, mut ddg) = central_jet(field, x, &g, &h)?;
    if opts.richardson {
        let half: Vec<f64> = h.iter().map(|s| 0.5 * s).collect();
        let (dg2, ddg2) = central_jet(field, x, &g, &half)?;
        for (coarse, fine) in dg.iter_mut().zip(&dg2) {
            *coarse = (4.0 * fine - *coarse) / 3.0;
        }
        for (coarse, fine) in ddg.iter_mut().zip(&ddg2) {
            *coarse = (4.0 * fine - *coarse) / 3.0;
        }
    }
    Ok(MetricJet { dim: n, g, dg, ddg })
}

/// Metric jet at raw coordinates. If a stencil point trips the degeneracy
/// guard the steps shrink tenfold once before the error is returned.
pub fn metric_jet_field(
    field: &dyn MetricField,
    x: &[f64],
    opts: &JetOptions,
) -> Result<MetricJet> {
    match jet_once(field, x, opts) {
        Err(BuresError::DegenerateSpectrum { .. }) => jet_once(field, x, &opts.scaled(0.1)),
        other => other,
    }
}

pub fn metric_jet(p: &ParameterPoint, opts: &JetOptions) -> Result<MetricJet> {
    metric_jet_field(&QutritBures::default(), &p.to_array(), opts)
}

/// Connection and curvature at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannAtPoint {
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `christoffel[idx3(m, i, j)] = Γ^m_ij`.
    pub christoffel: Vec<f64>,
    /// `riemann_0_4[idx4(i, j, k, l)] = R_ijkl`.
    pub riemann_0_4: Vec<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl RiemannAtPoint {
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.riemann_0_4[idx4(self.dim, i, j, k, l)]
    }

    pub fn gamma(&self, m: usize, i: usize, j: usize) -> f64 {
        self.christoffel[idx3(self.dim, m, i, j)]
    }

    /// Frobenius norm of `R_ijkl` in coordinates.
    pub fn norm(&self) -> f64 {
        self.riemann_0_4.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest violations of `R_ijkl = −R_jikl`, `R_ijkl = −R_ijlk`,
    /// `R_ijkl = R_klij` and `R_ijkl + R_iklj + R_iljk = 0`.
    pub fn symmetry_defects(&self) -> [f64; 4] {
        let n = self.dim;
        let mut d = [0.0f64; 4];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.r(i, j, k, l);
                        d[0] = d[0].max((r + self.r(j, i, k, l)).abs());
                        d[1] = d[1].max((r + self.r(i, j, l, k)).abs());
                        d[2] = d[2].max((r - self.r(k, l, i, j)).abs());
                        d[3] = d[3].max((r + self.r(i, k, l, j) + self.r(i, l, j, k)).abs());
                    }
                }
            }
        }
        d
    }
}

pub fn riemann_from_jet(jet: &MetricJet) -> Result<RiemannAtPoint> {
    let n = jet.dim;
    let g_inv = jet
        .g
        .clone()
        .cholesky()
        .ok_or(BuresError::SingularMetric {
            condition: f64::INFINITY,
        })?
        .inverse();

    // Γ_{k,ij} = ½(∂_i g_kj + ∂_j g_ki − ∂_k g_ij)
    let mut lowered = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                lowered[idx3(n, k, i, j)] =
                    0.5 * (jet.dg(k, j, i) + jet.dg(k, i, j) - jet.dg(i, j, k));
            }
        }
    }
    let mut christoffel = vec![0.0; n * n * n];
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                christoffel[idx3(n, m, i, j)] = (0..n)
                    .map(|k| g_inv[(m, k)] * lowered[idx3(n, k, i, j)])
                    .sum();
            }
        }
    }

    // R_ijkl = ½(g_il,jk + g_jk,il − g_ik,jl − g_jl,ik) + Γ_{m,il}Γ^m_kj − Γ_{m,ik}Γ^m_lj
    let mut riemann = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let second = 0.5
                        * (jet.ddg(i, l, j, k) + jet.ddg(j, k, i, l)
                            - jet.ddg(i, k, j, l)
                            - jet.ddg(j, l, i, k));
                    let mut quad = 0.0;
                    for m in 0..n {
                        quad += lowered[idx3(n, m, i, l)] * christoffel[idx3(n, m, k, j)]
                            - lowered[idx3(n, m, i, k)] * christoffel[idx3(n, m, l, j)];
                    }
                    riemann[idx4(n, i, j, k, l)] = second + quad;
                }
            }
        }
    }

    let mut ricci = DMatrix::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for k in 0..n {
                    acc += g_inv[(i, k)] * riemann[idx4(n, i, j, k, l)];
                }
            }
            ricci[(j, l)] = acc;
        }
    }
    let ricci = (&ricci + ricci.transpose()) * 0.5;
    let scalar = g_inv.component_mul(&ricci).sum();

    Ok(RiemannAtPoint {
        dim: n,
        g: jet.g.clone(),
        g_inv,
        christoffel,
        riemann_0_4: riemann,
        ricci,
        scalar,
    })
}

pub fn riemann_field(
    field: &dyn MetricField,
    x: &[f64],
    opts: &JetOptions,
) -> Result<RiemannAtPoint> {
    riemann_from_jet(&metric_jet_field(field, x, opts)?)
}

pub fn riemann(p: &ParameterPoint) -> Result<RiemannAtPoint> {
    riemann_field(
        &QutritBures::default(),
        &p.to_array(),
        &JetOptions::default(),
    )
}

/// `s = 2(28e₃ − 49e₂ − 9)/(e₃ − e₂)`.
pub fn scalar_curvature_closed_form(s: &Spectrum) -> Result<f64> {
    let denom = s.e3 - s.e2;
    if denom == 0.0 {
        return Err(BuresError::DegenerateSpectrum {
            lambda1: s.lambda1,
            lambda2: s.lambda2,
            lambda3: s.lambda3,
            reason: "e3 equals e2",
        });
    }
    Ok(2.0 * (28.0 * s.e3 - 49.0 * s.e2 - 9.0) / denom)
}

/// Settings for the covariant derivative of the Ricci tensor. The nested
/// differences amplify rounding, so the defaults use wider steps than a
/// plain curvature evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CodazziOptions {
    pub jet: JetOptions,
    /// Step of the outer central difference of Ricci (Richardson-refined).
    pub outer_step: f64,
}

impl Default for CodazziOptions {
    fn default() -> Self {
        Self {
            jet: JetOptions {
                step: 3e-3,
                ..JetOptions::default()
            },
            outer_step: 3e-2,
        }
    }
}

/// Antisymmetrized covariant derivative of Ricci at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CodazziReport {
    /// `max |∇_i Ric_jk − ∇_j Ric_ik|`.
    pub max_defect: f64,
    /// Frobenius norm of `∇_i Ric_jk`.
    pub covariant_norm: f64,
    /// Frobenius norm of the coordinate derivative `∂_i Ric_jk`.
    pub partial_norm: f64,
    /// `max_defect / partial_norm`.
    pub residual: f64,
}

fn ricci_derivative(
    field: &dyn MetricField,
    x: &[f64],
    k: usize,
    h: f64,
    jet: &JetOptions,
) -> Result<DMatrix<f64>> {
    let plus = riemann_field(field, &shifted(x, &[(k, h)]), jet)?.ricci;
    let minus = riemann_field(field, &shifted(x, &[(k, -h)]), jet)?.ricci;
    Ok((plus - minus) / (2.0 * h))
}

pub fn codazzi_report_field(
    field: &dyn MetricField,
    x: &[f64],
    opts: &CodazziOptions,
) -> Result<CodazziReport> {
    let n = field.dim();
    let centre = riemann_field(field, x, &opts.jet)?;
    let h = opts.outer_step;
    // d_ricci[i][(j, k)] = ∂_i Ric_jk
    let mut d_ricci = Vec::with_capacity(n);
    for i in 0..n {
        let coarse = ricci_derivative(field, x, i, h, &opts.jet)?;
        let fine = ricci_derivative(field, x, i, 0.5 * h, &opts.jet)?;
        d_ricci.push((fine * 4.0 - coarse) / 3.0);
    }
    let ric = &centre.ricci;
    let mut nabla = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = d_ricci[i][(j, k)];
                for m in 0..n {
                    v -= centre.gamma(m, i, j) * ric[(m, k)] + centre.gamma(m, i, k) * ric[(j, m)];
                }
                nabla[idx3(n, i, j, k)] = v;
            }
        }
    }
    let mut max_defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                max_defect =
                    max_defect.max((nabla[idx3(n, i, j, k)] - nabla[idx3(n, j, i, k)]).abs());
            }
        }
    }
    let covariant_norm = nabla.iter().map(|v| v * v).sum::<f64>().sqrt();
    let partial_norm = d_ricci.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
    Ok(CodazziReport {
        max_defect,
        covariant_norm,
        partial_norm,
        residual: max_defect / partial_norm,
    })
}

/// Normalized Codazzi defect of the qutrit metric.
pub fn codazzi_residual(p: &ParameterPoint) -> Result<f64> {
    Ok(codazzi_report_field(
        &QutritBures::default(),
        &p.to_array(),
        &CodazziOptions::default(),
    )?
    .residual)
}

/// How the orthonormal frame is chosen from the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrameChoice {
    /// `E = (Lᵀ)⁻¹` with `g = LLᵀ`.
    #[default]
    Cholesky,
    /// `E = g^{-1/2}`.
    SymmetricInverseSqrt,
}

/// Curvature two-form in an orthonormal frame: for each frame pair `a < b`
/// the skew matrix `F_ab[i][j] = R_ijab`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTwoForm {
    pub f: [Matrix8; 28],
    pub frame: Matrix8,
}

impl CurvatureTwoForm {
    pub fn zero() -> Self {
        Self {
            f: [Matrix8::zeros(); 28],
            frame: Matrix8::identity(),
        }
    }

    pub fn component(&self, a: usize, b: usize) -> Matrix8 {
        let pairs = PairIndex::new();
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.f[pairs.index(a, b)],
            std::cmp::Ordering::Greater => -self.f[pairs.index(b, a)],
            std::cmp::Ordering::Equal => Matrix8::zeros(),
        }
    }

    /// `Σ_{a<b} ⟨F_ab, F_ab⟩`.
    pub fn norm_squared(&self) -> f64 {
        self.f.iter().map(|m| m.norm_squared()).sum()
    }

    /// Singular values of each `F_ab`, descending.
    pub fn singular_values(&self) -> Vec<[f64; 8]> {
        self.f
            .iter()
            .map(|m| {
                let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
                s.sort_by(|a, b| b.total_cmp(a));
                s.try_into().expect("eight singular values")
            })
            .collect()
    }
}

pub fn orthonormal_frame(g: &Matrix8, choice: FrameChoice) -> Result<Matrix8> {
    match choice {
        FrameChoice::Cholesky => {
            let chol = g.cholesky().ok_or(BuresError::SingularMetric {
                condition: f64::INFINITY,
            })?;
            chol.l()
                .transpose()
                .try_inverse()
                .ok_or(BuresError::SingularMetric {
                    condition: f64::INFINITY,
                })
        }
        FrameChoice::SymmetricInverseSqrt => {
            let eig = SymmetricEigen::new(*g);
            if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
                return Err(BuresError::SingularMetric {
                    condition: f64::INFINITY,
                });
            }
            let d = Matrix8::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
            Ok(eig.eigenvectors * d * eig.eigenvectors.transpose())
        }
    }
}

/// Converts all four indices of `R_ijkl` to the frame `E` and assembles the
/// 28 skew matrices.
pub fn two_form_from_riemann(r: &RiemannAtPoint, frame: &Matrix8) -> CurvatureTwoForm {
    assert_eq!(
        r.dim, 8,
        "the two-form lives on the eight-dimensional manifold"
    );
    const N: usize = 8;
    let mut cur = r.riemann_0_4.clone();
    let mut next = vec![0.0; N * N * N * N];
    // contract one slot at a time; each pass rotates the result so the next
    // coordinate index moves to the front
    for _ in 0..4 {
        for a in 0..N {
            for j in 0..N {
                for k in 0..N {
                    for l in 0..N {
                        let mut acc = 0.0;
                        for i in 0..N {
                            acc += cur[idx4(N, i, j, k, l)] * frame[(i, a)];
                        }
                        // new layout (j, k, l, a)
                        next[idx4(N, j, k, l, a)] = acc;
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let pairs = PairIndex::new();
    let mut f = [Matrix8::zeros(); 28];
    for (p, (a, b)) in pairs.iter().enumerate() {
        let m = Matrix8::from_fn(|i, j| cur[idx4(N, i, j, a, b)]);
        f[p] = (m - m.transpose()) * 0.5;
    }
    CurvatureTwoForm { f, frame: *frame }
}

/// Curvature two-form of `field` at `p` together with `√det g` there.
pub fn frame_curvature_field(
    field: &QutritBures,
    p: &ParameterPoint,
    opts: &JetOptions,
    choice: FrameChoice,
) -> Result<(CurvatureTwoForm, f64)> {
    let r = riemann_field(field, &p.to_array(), opts)?;
    let g = Matrix8::from_column_slice(r.g.as_slice());
    let sqrt_det = g
        .cholesky()
        .ok_or(BuresError::SingularMetric {
            condition: f64::INFINITY,
        })?
        .l_dirty()
        .diagonal()
        .product();
    let frame = orthonormal_frame(&g, choice)?;
    Ok((two_form_from_riemann(&r, &frame), sqrt_det))
}

pub fn frame_curvature_with(
    p: &ParameterPoint,
    opts: &JetOptions,
    choice: FrameChoice,
) -> Result<CurvatureTwoForm> {
    Ok(frame_curvature_field(&QutritBures::default(), p, opts, choice)?.0)
}

pub fn frame_curvature(p: &ParameterPoint) -> Result<CurvatureTwoForm> {
    frame_curvature_with(p, &JetOptions::default(), FrameChoice::Cholesky)
}
