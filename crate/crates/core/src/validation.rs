//! Acceptance checks: closed-form oracles, algebraic identities and the
//! quadrature contracts, each reported as a measured value against a bound.
//!
//! Pointwise checks draw their points with [`interior_point`], keeping every
//! coordinate 5% of its range away from the box faces and the spectrum at
//! least [`SEPARATION`] away from the degenerate set.

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::curvature::{
    codazzi_report_field, codazzi_residual, frame_curvature, riemann, riemann_field,
    scalar_curvature_closed_form, CodazziOptions, CurvatureTwoForm, JetOptions,
};
use crate::error::{BuresError, Result};
use crate::invariants::invariant_row;
use crate::metric::{
    closed_form_entries, closed_form_volume, metric_tensor, metric_with, Matrix8, MetricConfig,
    QubitBures,
};
use crate::quadrature::{interior_point, survey, uniform, Field, QuadratureSpec, Survey};
use crate::spin7::{decompose, projectors, set_a_residuals, set_b_residuals, Matrix28};
use crate::state_space::{Coord, ParameterPoint, Spectrum};
use crate::submersion::coordinate_curvature;

pub const MARGIN: f64 = 0.05;
pub const SEPARATION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: String,
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    /// Soft targets are reported but never fail.
    pub soft: bool,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn below(id: &str, name: &'static str, measured: f64, bound: f64, detail: String) -> Self {
        Self {
            id: id.to_string(),
            name,
            measured,
            bound,
            soft: false,
            passed: measured < bound,
            detail,
        }
    }

    fn above(id: &str, name: &'static str, measured: f64, bound: f64, detail: String) -> Self {
        Self {
            passed: measured > bound,
            ..Self::below(id, name, measured, bound, detail)
        }
    }

    fn within(mut self, elapsed: Duration, limit: Duration) -> Self {
        if elapsed > limit {
            self.passed = false;
        }
        self.detail = format!(
            "{} time={:.2}s/{}s",
            self.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        self
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.soft, self.passed) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        write!(
            f,
            "{status} {:<4} {:<40} measured={:.3e} bound={:.1e} {}",
            self.id, self.name, self.measured, self.bound, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    /// Calibration of the metric under test; the oracles keep the standard one.
    pub calibration: f64,
    pub seed: u64,
    pub mc_samples: u64,
    pub lattice_nodes: u32,
    /// Sample count for the byte-identity rerun.
    pub determinism_samples: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            calibration: MetricConfig::default().calibration,
            seed: 20_240_607,
            mc_samples: 20_000,
            lattice_nodes: 4,
            determinism_samples: 500,
        }
    }
}

impl ValidationOptions {
    fn config(&self) -> MetricConfig {
        MetricConfig {
            calibration: self.calibration,
            ..MetricConfig::default()
        }
    }

    fn points(&self, stream: u64, n: usize) -> Vec<ParameterPoint> {
        (0..n as u64)
            .map(|i| interior_point(self.seed ^ (stream << 32), i, MARGIN, SEPARATION))
            .collect()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Criterion 1, split into the three closed forms and the zero pattern.
pub fn check_metric_oracles(opts: &ValidationOptions) -> Result<Vec<CheckOutcome>> {
    let start = Instant::now();
    let config = opts.config();
    let (mut tt, mut bb, mut aa, mut zeros) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in opts.points(1, 100) {
        let m = metric_with(&p, &config)?;
        let c = closed_form_entries(&p)?;
        let [alpha, tau, a, beta, b, theta] = [
            Coord::Alpha,
            Coord::Tau,
            Coord::A,
            Coord::Beta,
            Coord::B,
            Coord::Theta,
        ]
        .map(Coord::index);
        tt = tt.max(rel(m.g[(theta, theta)], c.g_theta_theta));
        bb = bb.max(rel(m.g_inv[(beta, beta)], c.g_inv_beta_beta));
        aa = aa.max(rel(m.g_inv[(alpha, alpha)], c.g_inv_alpha_alpha));
        // each entry is measured against the geometric mean of its two diagonals
        let scaled =
            |h: &Matrix8, i: usize, j: usize| h[(i, j)].abs() / (h[(i, i)] * h[(j, j)]).sqrt();
        let entries = [
            scaled(&m.g, tau, b),
            scaled(&m.g, tau, theta),
            scaled(&m.g, a, b),
            scaled(&m.g, a, theta),
            scaled(&m.g, b, theta),
            scaled(&m.g_inv, alpha, beta),
            scaled(&m.g_inv, a, b),
            scaled(&m.g_inv, a, theta),
        ];
        zeros = zeros.max(max_of(entries));
    }
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(10);
    Ok(vec![
        CheckOutcome::below(
            "1a",
            "metric g_theta_theta closed form",
            tt,
            1e-8,
            "max rel, 100 pts".into(),
        )
        .within(elapsed, limit),
        CheckOutcome::below(
            "1b",
            "metric inverse g^beta_beta closed form",
            bb,
            1e-8,
            "max rel, 100 pts".into(),
        )
        .within(elapsed, limit),
        CheckOutcome::below(
            "1c",
            "metric inverse g^alpha_alpha closed form",
            aa,
            1e-8,
            "max rel, 100 pts".into(),
        )
        .within(elapsed, limit),
        CheckOutcome::below(
            "1d",
            "metric eight zero entries",
            zeros,
            1e-12,
            "max scaled, 100 pts".into(),
        )
        .within(elapsed, limit),
    ])
}

/// Criterion 2.
pub fn check_volume_element(opts: &ValidationOptions) -> Result<CheckOutcome> {
    let start = Instant::now();
    let config = opts.config();
    let mut worst = 0.0f64;
    for p in opts.points(2, 100) {
        worst = worst.max(rel(
            metric_with(&p, &config)?.sqrt_det,
            closed_form_volume(&p)?,
        ));
    }
    Ok(CheckOutcome::below(
        "2",
        "volume element closed form",
        worst,
        1e-8,
        "max rel, 100 pts".into(),
    )
    .within(start.elapsed(), Duration::from_secs(10)))
}

/// Criterion 3: central differences with step 1e-5 along `α` and `a`.
pub fn check_killing(opts: &ValidationOptions) -> Result<CheckOutcome> {
    let config = opts.config();
    let h = 1e-5;
    let mut worst = 0.0f64;
    for p in opts.points(3, 50) {
        for c in [Coord::Alpha, Coord::A] {
            let x = p.get(c);
            let plus = metric_tensor(&p.with(c, x + h), &config)?;
            let minus = metric_tensor(&p.with(c, x - h), &config)?;
            worst = worst.max(((plus - minus) / (2.0 * h)).abs().max());
        }
    }
    Ok(CheckOutcome::below(
        "3",
        "Killing directions alpha and a",
        worst,
        1e-8,
        "max abs dg, 50 pts".into(),
    ))
}

/// The point with spectrum `(λ₁, λ₂)` and the angles of `p`.
fn with_spectrum(p: &ParameterPoint, lambda1: f64, lambda2: f64) -> ParameterPoint {
    let zeta1 = lambda1.sqrt().acos();
    let zeta2 = (lambda2 / (1.0 - lambda1)).sqrt().acos();
    p.with(Coord::Zeta1, zeta1).with(Coord::Zeta2, zeta2)
}

/// Scalar curvature from the exact coordinate tensor.
fn exact_scalar(p: &ParameterPoint) -> Result<f64> {
    let config = MetricConfig::default();
    let r = coordinate_curvature(p, &config)?;
    let gi = metric_with(p, &config)?.g_inv;
    let mut s = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                for l in 0..8 {
                    s += gi[(i, k)] * gi[(j, l)] * r[((i * 8 + j) * 8 + k) * 8 + l];
                }
            }
        }
    }
    Ok(s)
}

/// Criterion 4. The limit spectrum `(1/3 + 2ε, 1/3 − ε, 1/3 − ε)` has a
/// repeated eigenvalue, where the coordinates break down, so the curvature
/// is evaluated there in closed form and, through the exact tensor, at
/// `(1/3 + 2ε, 1/3 − ε + δ)` with `δ = ε/10`.
pub fn check_scalar_curvature(opts: &ValidationOptions) -> Result<Vec<CheckOutcome>> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for p in opts.points(4, 20) {
        worst = worst.max(rel(
            riemann(&p)?.scalar,
            scalar_curvature_closed_form(&p.spectrum())?,
        ));
    }
    let eps = 1e-3;
    let closed = scalar_curvature_closed_form(&Spectrum::from_eigenvalues(
        1.0 / 3.0 + 2.0 * eps,
        1.0 / 3.0 - eps,
    ))?;
    let base = opts.points(4, 1)[0];
    let near = exact_scalar(&with_spectrum(
        &base,
        1.0 / 3.0 + 2.0 * eps,
        1.0 / 3.0 - 0.9 * eps,
    ))?;
    let gap = (closed - 164.0).abs().max((near - 164.0).abs());
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(120);
    Ok(vec![
        CheckOutcome::below(
            "4a",
            "scalar curvature closed form",
            worst,
            1e-5,
            "max rel, 20 pts".into(),
        )
        .within(elapsed, limit),
        CheckOutcome::below(
            "4b",
            "scalar curvature near fully mixed",
            gap,
            0.1,
            format!("closed={closed:.6} exact={near:.6} target=164"),
        )
        .within(elapsed, limit),
    ])
}

/// Criterion 5. Bloch points keep `r ∈ [0.3, 0.9]` and `θ_s` at least 0.3
/// from the poles: the polar chart is singular at the centre of the ball and
/// on the axis, and the nested differences of the Codazzi check resolve the
/// round sphere to 1e-6 only away from both.
pub fn check_codazzi(opts: &ValidationOptions) -> Result<Vec<CheckOutcome>> {
    let qubit = QubitBures::default();
    let (mut scalar, mut qubit_codazzi) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let u = |slot| uniform(opts.seed, i, 0, slot);
        let x = [
            0.3 + 0.6 * u(0),
            0.3 + (std::f64::consts::PI - 0.6) * u(1),
            std::f64::consts::TAU * u(2),
        ];
        scalar =
            scalar.max((riemann_field(&qubit, &x, &JetOptions::default())?.scalar - 24.0).abs());
        qubit_codazzi = qubit_codazzi
            .max(codazzi_report_field(&qubit, &x, &CodazziOptions::default())?.residual);
    }
    let mut qutrit = f64::INFINITY;
    for p in opts.points(5, 20) {
        qutrit = qutrit.min(codazzi_residual(&p)?);
    }
    Ok(vec![
        CheckOutcome::below(
            "5a",
            "qubit scalar curvature 24",
            scalar,
            1e-4,
            "max abs, 20 pts".into(),
        ),
        CheckOutcome::below(
            "5b",
            "qubit Codazzi residual",
            qubit_codazzi,
            1e-6,
            "max, 20 pts".into(),
        ),
        CheckOutcome::above(
            "5c",
            "qutrit Codazzi residual",
            qutrit,
            1e-3,
            "min, 20 pts".into(),
        ),
    ])
}

/// Criterion 6.
pub fn check_spin7(forms: &[CurvatureTwoForm]) -> Vec<CheckOutcome> {
    let d = projectors();
    let identity = Matrix28::identity();
    let projector = max_of([
        (d.p_plus * d.p_plus - d.p_plus).abs().max(),
        (d.p_minus * d.p_minus - d.p_minus).abs().max(),
        (d.p_plus * d.p_minus).abs().max(),
        (d.p_plus + d.p_minus - identity).abs().max(),
    ]);
    let mut spectrum: Vec<f64> = d.phi.symmetric_eigenvalues().iter().copied().collect();
    spectrum.sort_by(f64::total_cmp);
    let phi = max_of(
        spectrum
            .iter()
            .enumerate()
            .map(|(i, v)| (v - if i < 7 { -3.0 } else { 1.0 }).abs()),
    );
    let mut residual = 0.0f64;
    for f in forms {
        let (plus, minus) = decompose(f);
        let norm = f.norm_squared().sqrt();
        residual = residual.max(max_of(set_a_residuals(&plus)) / norm);
        residual = residual.max(max_of(set_b_residuals(&minus)) / norm);
    }
    vec![
        CheckOutcome::below(
            "6a",
            "Spin(7) projector identities",
            projector,
            1e-13,
            "max abs".into(),
        ),
        CheckOutcome::below(
            "6b",
            "Spin(7) Phi spectrum {1x21, -3x7}",
            phi,
            1e-12,
            "max abs".into(),
        ),
        CheckOutcome::below(
            "6c",
            "Spin(7) set a/b residuals",
            residual,
            1e-10,
            "max rel, 20 pts".into(),
        ),
    ]
}

/// Criterion 7: ratio of the second smallest to the largest singular value.
pub fn check_degeneracy(forms: &[CurvatureTwoForm]) -> CheckOutcome {
    let mut worst = 0.0f64;
    for f in forms {
        for sv in f.singular_values() {
            let mut s = sv;
            s.sort_by(f64::total_cmp);
            if s[7] > 0.0 {
                worst = worst.max(s[1] / s[7]);
            }
        }
    }
    CheckOutcome::below(
        "7",
        "two-form pairs with zero singular pair",
        worst,
        1e-6,
        "max s2/s8, 20 pts x 28 pairs".into(),
    )
}

/// Criterion 8.
pub fn check_flatness(forms: &[CurvatureTwoForm]) -> Vec<CheckOutcome> {
    let ratios = |f: &CurvatureTwoForm| {
        let r = invariant_row(f);
        [
            r.f2f2 / r.ff2,
            r.f3f3() / (r.ff2 * r.ff),
            r.f4f4() / (r.ff2 * r.ff2),
        ]
    };
    let mut bures = [0.0f64; 3];
    let mut parts = [f64::INFINITY; 3];
    for f in forms {
        let (plus, minus) = decompose(f);
        for (w, v) in bures.iter_mut().zip(ratios(f)) {
            *w = w.max(v);
        }
        for side in [plus, minus] {
            for (w, v) in parts.iter_mut().zip(ratios(&side)) {
                *w = w.min(v);
            }
        }
    }
    let names = ["F2", "F3", "F4"];
    let mut out = Vec::new();
    for k in 0..3 {
        out.push(CheckOutcome::below(
            &format!("8{}", ['a', 'b', 'c'][k]),
            [
                "Bures (F2,F2)/(F,F)^2 vanishes",
                "Bures (F3,F3)/(F,F)^3 vanishes",
                "Bures (F4,F4)/(F,F)^4 vanishes",
            ][k],
            bures[k],
            1e-6,
            format!("max {} ratio, 20 pts", names[k]),
        ));
    }
    for k in 0..3 {
        out.push(CheckOutcome::above(
            &format!("8{}", ['d', 'e', 'f'][k]),
            [
                "F+/F- (F2,F2)/(F,F)^2 nonzero",
                "F+/F- (F3,F3)/(F,F)^3 nonzero",
                "F+/F- (F4,F4)/(F,F)^4 nonzero",
            ][k],
            parts[k],
            1e-3,
            format!("min {} ratio over both parts, 20 pts", names[k]),
        ));
    }
    out
}

/// Criterion 9.
pub fn check_additivity(s: &Survey) -> CheckOutcome {
    let a = s.actions();
    CheckOutcome::below(
        "9",
        "action additivity",
        a.additivity_defect(),
        1e-10,
        format!(
            "total={:.6e} sd={:.6e} asd={:.6e}",
            a.total.value, a.self_dual.value, a.anti_self_dual.value
        ),
    )
}

/// Criterion 10, first half: same seed twice, once on a one-thread pool.
pub fn check_determinism(opts: &ValidationOptions) -> Result<CheckOutcome> {
    let spec = QuadratureSpec::monte_carlo(opts.determinism_samples, opts.seed);
    let first = survey(&spec)?.to_csv()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| BuresError::InvalidSpec(e.to_string()))?;
    let second = pool.install(|| survey(&spec))?.to_csv()?;
    let differing = first
        .bytes()
        .zip(second.bytes())
        .filter(|(a, b)| a != b)
        .count()
        + first.len().abs_diff(second.len());
    Ok(CheckOutcome::below(
        "10a",
        "quadrature CSV byte identity",
        differing as f64,
        0.5,
        format!("{} samples, differing bytes", opts.determinism_samples),
    ))
}

/// Criterion 10, second half: MC against the lattice on the F⁺ and F⁻ rows.
pub fn check_consistency(mc: &Survey, lattice: &Survey, elapsed: Duration) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for (id, field) in [("10b", Field::Sd), ("10c", Field::Asd)] {
        let m = mc.get(field, "ff2");
        let l = lattice.get(field, "ff2");
        let se = m.stderr.unwrap_or(f64::NAN);
        let name = if field == Field::Sd {
            "mc vs lattice int (F+,F+)^2"
        } else {
            "mc vs lattice int (F-,F-)^2"
        };
        let rejected = m.n_rejected as f64 / (m.n_evaluated + m.n_rejected) as f64;
        out.push(
            CheckOutcome::below(
                id,
                name,
                (m.value - l.value).abs() / se,
                3.0,
                format!(
                    "mc={:.4e}+-{:.2e} lattice={:.4e} mc_rejected={rejected:.1e}",
                    m.value, se, l.value
                ),
            )
            .within(elapsed, Duration::from_secs(1800)),
        );
    }
    out
}

/// Criterion 11: reported, never failing.
pub fn report_ratio(mc: &Survey, lattice: &Survey) -> CheckOutcome {
    let ratio = |s: &Survey| s.get(Field::Sd, "ff2").value / s.get(Field::Asd, "ff2").value;
    CheckOutcome {
        id: "11".into(),
        name: "ratio int(F+,F+)^2 / int(F-,F-)^2",
        measured: ratio(mc),
        bound: 9.0,
        soft: true,
        passed: true,
        detail: format!(
            "mc={:.4} lattice={:.4} reference~9.0",
            ratio(mc),
            ratio(lattice)
        ),
    }
}

/// Curvature two-forms at the twenty points shared by criteria 6 to 8.
pub fn sample_forms(opts: &ValidationOptions) -> Result<Vec<CurvatureTwoForm>> {
    opts.points(6, 20).iter().map(frame_curvature).collect()
}

/// Every check in order, stopping at the first evaluation error.
pub fn run_all(opts: &ValidationOptions) -> Result<Vec<CheckOutcome>> {
    let mut out = check_metric_oracles(opts)?;
    out.push(check_volume_element(opts)?);
    out.push(check_killing(opts)?);
    out.extend(check_scalar_curvature(opts)?);
    out.extend(check_codazzi(opts)?);
    let forms = sample_forms(opts)?;
    out.extend(check_spin7(&forms));
    out.push(check_degeneracy(&forms));
    out.extend(check_flatness(&forms));
    let start = Instant::now();
    let mc = survey(&QuadratureSpec::monte_carlo(opts.mc_samples, opts.seed))?;
    let lattice = survey(&QuadratureSpec::lattice(opts.lattice_nodes))?;
    let elapsed = start.elapsed();
    out.push(check_additivity(&mc));
    out.push(check_determinism(opts)?);
    out.extend(check_consistency(&mc, &lattice, elapsed));
    out.push(report_ratio(&mc, &lattice));
    Ok(out)
}
