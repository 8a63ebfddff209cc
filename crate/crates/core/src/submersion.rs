//! Curvature of the Bures metric in closed form.
//!
//! Writing `ρ = WW†` with `tr WW† = 1` exhibits the metric (at calibration
//! ½) as the base of a Riemannian submersion from the unit sphere of
//! amplitudes `W`, the fibres being the orbits `W ↦ WV` of `U(3)`. At
//! `W = √ρ` the horizontal lift of a tangent vector `X` is `G_X W` with
//! `ρG_X + G_Xρ = X`, and the O'Neill tensor of two horizontal vectors is the
//! vertical vector `√ρ K` with
//!
//! `K_kl = 2 N_kl √(λ_k λ_l) / (λ_k + λ_l)`, `N = ½[G_Y, G_X]`
//!
//! in the eigenbasis of `ρ`. O'Neill's formula on the unit sphere,
//!
//! `⟨R(X,Y)Z,W⟩ = ⟨Y,Z⟩⟨X,W⟩ − ⟨X,Z⟩⟨Y,W⟩ − 2⟨A_X Y, A_Z W⟩ + ⟨A_Y Z, A_X W⟩ − ⟨A_X Z, A_Y W⟩`,
//!
//! then gives every component exactly, with no differentiation, and stays
//! accurate near coordinate singularities and near the boundary where finite
//! differences of the metric lose all precision.

use num_complex::Complex64;

use crate::curvature::{orthonormal_frame, CurvatureTwoForm, FrameChoice};
use crate::error::{BuresError, Result};
use crate::metric::{metric_tensor, Matrix8, MetricConfig};
use crate::spin7::PairIndex;
use crate::state_space::{eigen_jet, CMatrix3, ParameterPoint};

#[inline]
fn idx4(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

/// `R_abcd` (in the sign convention of [`crate::curvature`], so that round
/// spheres have `R_abab > 0`) for tangent vectors given in the eigenbasis
/// as `W_a = U†(∂_a ρ)U`.
pub fn curvature_tensor(w: &[CMatrix3], lambda: &[f64; 3], calibration: f64) -> Result<Vec<f64>> {
    if lambda.iter().any(|l| !(*l > 0.0)) {
        return Err(BuresError::DegenerateSpectrum {
            lambda1: lambda[0],
            lambda2: lambda[1],
            lambda3: lambda[2],
            reason: "an eigenvalue is below the degeneracy threshold",
        });
    }
    let n = w.len();
    let g: Vec<CMatrix3> = w
        .iter()
        .map(|m| CMatrix3::from_fn(|k, l| m[(k, l)] / (lambda[k] + lambda[l])))
        .collect();

    // ⟨X̃, Ỹ⟩ = Re tr(G_X ρ G_Y) on the sphere
    let mut lift = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let mut acc = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    acc += (g[a][(k, l)] * lambda[l] * g[b][(l, k)]).re;
                }
            }
            lift[a * n + b] = acc;
            lift[b * n + a] = acc;
        }
    }

    let weight = CMatrix3::from_fn(|k, l| {
        Complex64::from(2.0 * (lambda[k] * lambda[l]).sqrt() / (lambda[k] + lambda[l]))
    });
    // oneill[a * n + b] = K for A_{X_a} X_b
    let mut oneill = vec![CMatrix3::zeros(); n * n];
    for a in 0..n {
        for b in (a + 1)..n {
            let comm = (g[b] * g[a] - g[a] * g[b]) * Complex64::from(0.5);
            let k = comm.component_mul(&weight);
            oneill[b * n + a] = -k;
            oneill[a * n + b] = k;
        }
    }
    let vert = |p: &CMatrix3, q: &CMatrix3| -> f64 {
        let mut acc = 0.0;
        for k in 0..3 {
            for l in 0..3 {
                acc += (p[(k, l)].conj() * q[(k, l)]).re * lambda[k];
            }
        }
        acc
    };
    let mut pair_inner = vec![0.0; n * n * n * n];
    for ab in 0..n * n {
        for cd in ab..n * n {
            let v = vert(&oneill[ab], &oneill[cd]);
            pair_inner[ab * n * n + cd] = v;
            pair_inner[cd * n * n + ab] = v;
        }
    }
    let aa = |a: usize, b: usize, c: usize, d: usize| pair_inner[(a * n + b) * n * n + c * n + d];
    let h = |a: usize, b: usize| lift[a * n + b];

    let scale = 2.0 * calibration;
    let mut r = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    // ⟨R(X_a, X_b)X_c, X_d⟩ with R(X,Y,Y,X) the sectional numerator
                    let std = h(b, c) * h(a, d) - h(a, c) * h(b, d) - 2.0 * aa(a, b, c, d)
                        + aa(b, c, a, d)
                        - aa(a, c, b, d);
                    r[idx4(n, a, b, c, d)] = -scale * std;
                }
            }
        }
    }
    Ok(r)
}

/// `R_ijkl` in the Euler coordinates.
pub fn coordinate_curvature(p: &ParameterPoint, config: &MetricConfig) -> Result<Vec<f64>> {
    p.check_finite()?;
    p.spectrum()
        .check_nondegenerate(config.degeneracy_threshold)?;
    let jet = eigen_jet(p);
    curvature_tensor(&jet.w, &jet.spectrum.as_array(), config.calibration)
}

/// Exact counterpart of [`crate::curvature::frame_curvature_field`]: the
/// curvature two-form in the chosen frame of the Euler coordinates, with
/// `√det g`.
pub fn frame_curvature_exact(
    p: &ParameterPoint,
    config: &MetricConfig,
    choice: FrameChoice,
) -> Result<(CurvatureTwoForm, f64)> {
    let g = metric_tensor(p, config)?;
    let sqrt_det = g
        .cholesky()
        .ok_or(BuresError::SingularMetric {
            condition: f64::INFINITY,
        })?
        .l_dirty()
        .diagonal()
        .product();
    let frame = orthonormal_frame(&g, choice)?;
    let jet = eigen_jet(p);
    let framed: Vec<CMatrix3> = (0..8)
        .map(|a| {
            (0..8).fold(CMatrix3::zeros(), |acc, i| {
                acc + jet.w[i] * Complex64::from(frame[(i, a)])
            })
        })
        .collect();
    let r = curvature_tensor(&framed, &jet.spectrum.as_array(), config.calibration)?;
    let pairs = PairIndex::new();
    let mut f = [Matrix8::zeros(); 28];
    for (slot, (a, b)) in f.iter_mut().zip(pairs.iter()) {
        let m = Matrix8::from_fn(|i, j| r[idx4(8, i, j, a, b)]);
        *slot = (m - m.transpose()) * 0.5;
    }
    Ok((CurvatureTwoForm { f, frame }, sqrt_det))
}
