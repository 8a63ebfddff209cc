//! Euler-angle parameterization of 3×3 density matrices.
//!
//! A point of the manifold is `ρ = U diag(λ₁, λ₂, λ₃) U†` with
//!
//! ```text
//! U = exp(iΛ₃α) exp(iΛ₂β) exp(iΛ₃γ) exp(iΛ₅θ) exp(iΛ₃a) exp(iΛ₂b),   γ = τ − a
//! λ₁ = cos²ζ₁,  λ₂ = sin²ζ₁ cos²ζ₂,  λ₃ = 1 − λ₁ − λ₂
//! ```
//!
//! The trailing `exp(iΛ₃c) exp(iΛ₈φ)` torus factors of a full SU(3) element
//! commute with the diagonal spectrum and are dropped.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{BuresError, Result};

pub type CMatrix3 = Matrix3<Complex64>;
pub type CMatrix2 = Matrix2<Complex64>;

/// Upper end of the ζ₁ range, `arccos(3^{-1/2})`. At `(ZETA1_MAX, ZETA2_MAX)`
/// the spectrum is fully mixed.
pub const ZETA1_MAX: f64 = 0.955_316_618_124_509_2;
pub const ZETA2_MAX: f64 = FRAC_PI_4;

/// Default spectral degeneracy threshold: smallest eigenvalue and smallest
/// eigenvalue gap must both exceed it.
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The eight manifold coordinates, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    Alpha,
    Tau,
    A,
    Beta,
    B,
    Theta,
    Zeta1,
    Zeta2,
}

impl Coord {
    pub const ALL: [Coord; 8] = [
        Coord::Alpha,
        Coord::Tau,
        Coord::A,
        Coord::Beta,
        Coord::B,
        Coord::Theta,
        Coord::Zeta1,
        Coord::Zeta2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::Alpha => "alpha",
            Coord::Tau => "tau",
            Coord::A => "a",
            Coord::Beta => "beta",
            Coord::B => "b",
            Coord::Theta => "theta",
            Coord::Zeta1 => "zeta1",
            Coord::Zeta2 => "zeta2",
        }
    }

    /// Closed coordinate range of the integration box.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Coord::Alpha | Coord::Tau | Coord::A => (0.0, PI),
            Coord::Beta | Coord::B | Coord::Theta => (0.0, FRAC_PI_2),
            Coord::Zeta1 => (0.0, ZETA1_MAX),
            Coord::Zeta2 => (0.0, ZETA2_MAX),
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point of the eight-dimensional manifold. `γ = τ − a` is implicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterPoint {
    pub alpha: f64,
    pub tau: f64,
    pub a: f64,
    pub beta: f64,
    pub b: f64,
    pub theta: f64,
    pub zeta1: f64,
    pub zeta2: f64,
}

impl ParameterPoint {
    /// Builds a point and checks every coordinate against its range.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        tau: f64,
        a: f64,
        beta: f64,
        b: f64,
        theta: f64,
        zeta1: f64,
        zeta2: f64,
    ) -> Result<Self> {
        let p = Self {
            alpha,
            tau,
            a,
            beta,
            b,
            theta,
            zeta1,
            zeta2,
        };
        p.check_domain()?;
        Ok(p)
    }

    /// No range check; stencils of the finite-difference code step slightly
    /// past the box faces.
    pub fn from_array(x: [f64; 8]) -> Self {
        Self {
            alpha: x[0],
            tau: x[1],
            a: x[2],
            beta: x[3],
            b: x[4],
            theta: x[5],
            zeta1: x[6],
            zeta2: x[7],
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.alpha, self.tau, self.a, self.beta, self.b, self.theta, self.zeta1, self.zeta2,
        ]
    }

    pub fn gamma(&self) -> f64 {
        self.tau - self.a
    }

    pub fn get(&self, coord: Coord) -> f64 {
        self.to_array()[coord.index()]
    }

    pub fn with(&self, coord: Coord, value: f64) -> Self {
        let mut x = self.to_array();
        x[coord.index()] = value;
        Self::from_array(x)
    }

    pub fn check_finite(&self) -> Result<()> {
        for coord in Coord::ALL {
            if !self.get(coord).is_finite() {
                return Err(BuresError::NonFiniteInput {
                    coordinate: coord.name(),
                });
            }
        }
        Ok(())
    }

    pub fn check_domain(&self) -> Result<()> {
        self.check_finite()?;
        for coord in Coord::ALL {
            let (lower, upper) = coord.bounds();
            let value = self.get(coord);
            // a few ulps of slack so that rounded corner constants are accepted
            let slack = 4.0 * f64::EPSILON * upper.abs().max(1.0);
            if value < lower - slack || value > upper + slack {
                return Err(BuresError::OutOfDomain {
                    coordinate: coord.name(),
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }

    /// The spectrum encoded by `(ζ₁, ζ₂)`.
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::from_angles(self.zeta1, self.zeta2)
    }
}

/// Density-matrix eigenvalues with the two symmetric polynomials that enter
/// the scalar curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spectrum {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub e2: f64,
    pub e3: f64,
}

impl Spectrum {
    /// `λ₃` is the unit-trace remainder.
    pub fn from_eigenvalues(lambda1: f64, lambda2: f64) -> Self {
        let lambda3 = 1.0 - lambda1 - lambda2;
        Self {
            lambda1,
            lambda2,
            lambda3,
            e2: lambda1 - lambda1 * lambda1 + lambda2 - lambda1 * lambda2 - lambda2 * lambda2,
            e3: lambda1 * lambda2 * lambda3,
        }
    }

    /// Spherical spectral coordinates without range checks.
    pub fn from_angles(zeta1: f64, zeta2: f64) -> Self {
        let (s1, c1) = zeta1.sin_cos();
        let c2 = zeta2.cos();
        Self::from_eigenvalues(c1 * c1, s1 * s1 * c2 * c2)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.lambda1, self.lambda2, self.lambda3]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.lambda1.min(self.lambda2).min(self.lambda3)
    }

    pub fn min_gap(&self) -> f64 {
        let [l1, l2, l3] = self.as_array();
        (l1 - l2).abs().min((l1 - l3).abs()).min((l2 - l3).abs())
    }

    pub fn check_nondegenerate(&self, threshold: f64) -> Result<()> {
        let reason = if self.min_eigenvalue() < threshold {
            "an eigenvalue is below the degeneracy threshold"
        } else if self.min_gap() < threshold {
            "two eigenvalues are closer than the degeneracy threshold"
        } else {
            return Ok(());
        };
        Err(BuresError::DegenerateSpectrum {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            lambda3: self.lambda3,
            reason,
        })
    }
}

/// `∂(λ₁, λ₂, λ₃)/∂(ζ₁, ζ₂)`, column per angle.
pub fn spectrum_angle_derivatives(zeta1: f64, zeta2: f64) -> [[f64; 3]; 2] {
    let (s1, c1) = zeta1.sin_cos();
    let (s2, c2) = zeta2.sin_cos();
    let d1_1 = -2.0 * s1 * c1;
    let d2_1 = 2.0 * s1 * c1 * c2 * c2;
    let d2_2 = -2.0 * s1 * s1 * s2 * c2;
    [[d1_1, d2_1, -d1_1 - d2_1], [0.0, d2_2, -d2_2]]
}

/// `|det ∂(λ₁, λ₂)/∂(ζ₁, ζ₂)|`.
pub fn zeta_jacobian(zeta1: f64, zeta2: f64) -> f64 {
    let [d1, d2] = spectrum_angle_derivatives(zeta1, zeta2);
    (d1[0] * d2[1] - d1[1] * d2[0]).abs()
}

pub fn spectrum_from_spherical(zeta1: f64, zeta2: f64) -> Result<Spectrum> {
    for (coord, value) in [(Coord::Zeta1, zeta1), (Coord::Zeta2, zeta2)] {
        if !value.is_finite() {
            return Err(BuresError::NonFiniteInput {
                coordinate: coord.name(),
            });
        }
        let (lower, upper) = coord.bounds();
        if value < lower || value > upper + 4.0 * f64::EPSILON {
            return Err(BuresError::OutOfDomain {
                coordinate: coord.name(),
                value,
                lower,
                upper,
            });
        }
    }
    Ok(Spectrum::from_angles(zeta1, zeta2))
}

/// The standard Gell-Mann matrices Λ₁..Λ₈ (index 0 holds Λ₁).
pub fn gell_mann_basis() -> [CMatrix3; 8] {
    let z = c(0.0);
    let one = c(1.0);
    let r3 = c(1.0 / 3f64.sqrt());
    [
        CMatrix3::new(z, one, z, one, z, z, z, z, z),
        CMatrix3::new(z, -I, z, I, z, z, z, z, z),
        CMatrix3::new(one, z, z, z, -one, z, z, z, z),
        CMatrix3::new(z, z, one, z, z, z, one, z, z),
        CMatrix3::new(z, z, -I, z, z, z, I, z, z),
        CMatrix3::new(z, z, z, z, z, one, z, one, z),
        CMatrix3::new(z, z, z, z, z, -I, z, I, z),
        CMatrix3::new(r3, z, z, z, r3, z, z, z, -r3 * 2.0),
    ]
}

/// `exp(i t Λ_k)` for `k ∈ 1..=7` (one-based). These generators have
/// spectrum {1, −1, 0}, so the exponential is the quadratic polynomial
/// `1 + i sin t Λ + (cos t − 1) Λ²`.
pub fn generator_exp(k: usize, t: f64) -> CMatrix3 {
    assert!((1..=7).contains(&k), "closed-form exponential needs Λ1..Λ7");
    let lam = gell_mann_basis()[k - 1];
    let (s, co) = t.sin_cos();
    CMatrix3::identity() + lam * (I * s) + (lam * lam) * c(co - 1.0)
}

/// One-based generators of the six factors of the Euler chain.
const CHAIN_GENERATORS: [usize; 6] = [3, 2, 3, 5, 3, 2];

fn chain_angles(p: &ParameterPoint) -> [f64; 6] {
    [p.alpha, p.beta, p.gamma(), p.theta, p.a, p.b]
}

pub fn euler_unitary(p: &ParameterPoint) -> Result<CMatrix3> {
    p.check_finite()?;
    Ok(unitary_unchecked(p))
}

fn unitary_unchecked(p: &ParameterPoint) -> CMatrix3 {
    chain_angles(p)
        .iter()
        .zip(CHAIN_GENERATORS)
        .fold(CMatrix3::identity(), |acc, (&t, k)| {
            acc * generator_exp(k, t)
        })
}

/// A density matrix with its diagonalizing unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianState {
    pub rho: CMatrix3,
    pub unitary: CMatrix3,
    pub spectrum: Spectrum,
}

pub fn density(p: &ParameterPoint) -> Result<HermitianState> {
    p.check_domain()?;
    Ok(density_unchecked(p))
}

pub(crate) fn density_unchecked(p: &ParameterPoint) -> HermitianState {
    let unitary = unitary_unchecked(p);
    let spectrum = p.spectrum();
    let d = diag(&spectrum);
    HermitianState {
        rho: unitary * d * unitary.adjoint(),
        unitary,
        spectrum,
    }
}

fn diag(s: &Spectrum) -> CMatrix3 {
    CMatrix3::from_diagonal(&nalgebra::Vector3::new(
        c(s.lambda1),
        c(s.lambda2),
        c(s.lambda3),
    ))
}

/// Everything the metric needs at one point, expressed in the eigenbasis of ρ.
#[derive(Debug, Clone)]
pub(crate) struct EigenJet {
    pub unitary: CMatrix3,
    pub spectrum: Spectrum,
    /// `W_x = U† (∂ρ/∂x) U` for the eight coordinates.
    pub w: [CMatrix3; 8],
}

/// Analytic `U†∂ρU` by the product rule over the exponential chain.
///
/// For factor `k` of `U = A·E_k·B`, `U†∂U = i B†Λ_k B`, and
/// `U†(∂ρ)U = [U†∂U, D]`. With `γ = τ − a` the τ-derivative is that of the γ
/// factor and the a-derivative is the a factor minus the γ factor.
pub(crate) fn eigen_jet(p: &ParameterPoint) -> EigenJet {
    let angles = chain_angles(p);
    let lams = gell_mann_basis();
    let factors: [CMatrix3; 6] =
        std::array::from_fn(|k| generator_exp(CHAIN_GENERATORS[k], angles[k]));

    // suffix[k] = E_{k+1} ... E_5
    let mut suffix = [CMatrix3::identity(); 6];
    for k in (0..5).rev() {
        suffix[k] = factors[k + 1] * suffix[k + 1];
    }
    let unitary = factors[0] * suffix[0];
    let kgen: [CMatrix3; 6] = std::array::from_fn(|k| {
        let lam = lams[CHAIN_GENERATORS[k] - 1];
        suffix[k].adjoint() * lam * suffix[k] * I
    });

    let spectrum = p.spectrum();
    let lambda = spectrum.as_array();
    let commutator = |k: &CMatrix3| -> CMatrix3 {
        CMatrix3::from_fn(|r, s| k[(r, s)] * (lambda[s] - lambda[r]))
    };
    let dl = spectrum_angle_derivatives(p.zeta1, p.zeta2);
    let spectral = |d: [f64; 3]| {
        diag(&Spectrum {
            lambda1: d[0],
            lambda2: d[1],
            lambda3: d[2],
            e2: 0.0,
            e3: 0.0,
        })
    };

    let w = [
        commutator(&kgen[0]),
        commutator(&kgen[2]),
        commutator(&(kgen[4] - kgen[2])),
        commutator(&kgen[1]),
        commutator(&kgen[5]),
        commutator(&kgen[3]),
        spectral(dl[0]),
        spectral(dl[1]),
    ];
    EigenJet {
        unitary,
        spectrum,
        w,
    }
}

/// `∂ρ/∂x` for `x ∈ (α, τ, a, β, b, θ, ζ₁, ζ₂)`.
pub fn density_partials(p: &ParameterPoint) -> Result<[CMatrix3; 8]> {
    p.check_domain()?;
    let jet = eigen_jet(p);
    let u = jet.unitary;
    let ua = u.adjoint();
    Ok(std::array::from_fn(|x| u * jet.w[x] * ua))
}

/// A qubit state in Bloch coordinates together with its analytic partials.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochState {
    pub rho: CMatrix2,
    /// `∂ρ/∂r`, `∂ρ/∂θ_s`, `∂ρ/∂φ_s`.
    pub partials: [CMatrix2; 3],
    /// `((1 + r)/2, (1 − r)/2)`.
    pub eigenvalues: [f64; 2],
    /// Columns are the eigenvectors matching `eigenvalues`.
    pub eigenvectors: CMatrix2,
}

pub fn pauli() -> [CMatrix2; 3] {
    let z = c(0.0);
    let one = c(1.0);
    [
        CMatrix2::new(z, one, one, z),
        CMatrix2::new(z, -I, I, z),
        CMatrix2::new(one, z, z, -one),
    ]
}

/// `ρ = (1 + r n̂·σ)/2` with `n̂ = (sin θ cos φ, sin θ sin φ, cos θ)`.
pub fn bloch_density2(r: f64, theta_s: f64, phi_s: f64) -> Result<BlochState> {
    for (name, v) in [("r", r), ("theta_s", theta_s), ("phi_s", phi_s)] {
        if !v.is_finite() {
            return Err(BuresError::NonFiniteInput { coordinate: name });
        }
    }
    if r <= 0.0 || r >= 1.0 {
        return Err(BuresError::OutOfDomain {
            coordinate: "r",
            value: r,
            lower: 0.0,
            upper: 1.0,
        });
    }
    Ok(bloch_unchecked(r, theta_s, phi_s))
}

pub(crate) fn bloch_unchecked(r: f64, theta_s: f64, phi_s: f64) -> BlochState {
    let [sx, sy, sz] = pauli();
    let (st, ct) = theta_s.sin_cos();
    let (sp, cp) = phi_s.sin_cos();
    let dot = |v: [f64; 3]| sx * c(v[0]) + sy * c(v[1]) + sz * c(v[2]);
    let n = [st * cp, st * sp, ct];
    let half = c(0.5);
    let rho = (CMatrix2::identity() + dot(n) * c(r)) * half;
    let partials = [
        dot(n) * half,
        dot([ct * cp, ct * sp, -st]) * c(0.5 * r),
        dot([-st * sp, st * cp, 0.0]) * c(0.5 * r),
    ];
    let (sh, ch) = (0.5 * theta_s).sin_cos();
    let phase = Complex64::from_polar(1.0, phi_s);
    let eigenvectors = CMatrix2::new(c(ch), -phase.conj() * sh, phase * sh, c(ch));
    BlochState {
        rho,
        partials,
        eigenvalues: [0.5 * (1.0 + r), 0.5 * (1.0 - r)],
        eigenvectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::ComplexField;

    fn sample_point() -> ParameterPoint {
        ParameterPoint::new(0.3, 1.1, 0.7, 0.4, 0.6, 0.8, 0.5, 0.3).unwrap()
    }

    fn max_abs3(m: &CMatrix3) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `exp(iH)` through a Hermitian eigendecomposition.
    fn expm_oracle(h: &CMatrix3) -> CMatrix3 {
        let eig = (*h).symmetric_eigen();
        let v = eig.eigenvectors;
        let d = CMatrix3::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l)));
        v * d * v.adjoint()
    }

    #[test]
    fn gell_mann_conventions() {
        let g = gell_mann_basis();
        assert_eq!(
            g[2],
            CMatrix3::from_diagonal(&nalgebra::Vector3::new(c(1.0), c(-1.0), c(0.0)))
        );
        for (i, a) in g.iter().enumerate() {
            assert!(max_abs3(&(a - a.adjoint())) == 0.0);
            assert!(a.trace().norm() < 1e-15);
            for (j, b) in g.iter().enumerate() {
                let t = (a * b).trace();
                let expect = if i == j { 2.0 } else { 0.0 };
                assert!(
                    (t - c(expect)).norm() < 1e-15,
                    "tr(Λ{}Λ{}) = {t}",
                    i + 1,
                    j + 1
                );
            }
        }
        assert!(((g[4] * g[4]).trace() - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn spectrum_corners_and_direct_evaluation() {
        let mixed = spectrum_from_spherical(ZETA1_MAX, ZETA2_MAX).unwrap();
        for l in mixed.as_array() {
            assert!((l - 1.0 / 3.0).abs() < 1e-15);
        }
        let pure = spectrum_from_spherical(0.0, 0.4).unwrap();
        assert_eq!(pure.as_array(), [1.0, 0.0, 0.0]);

        let s = spectrum_from_spherical(0.5, 0.3).unwrap();
        let l1 = 0.5f64.cos().powi(2);
        let l2 = 0.5f64.sin().powi(2) * 0.3f64.cos().powi(2);
        assert!((s.lambda1 - l1).abs() < 1e-15);
        assert!((s.lambda2 - l2).abs() < 1e-15);
        assert!((s.lambda3 - (1.0 - l1 - l2)).abs() < 1e-15);
        assert!((s.e3 - l1 * l2 * (1.0 - l1 - l2)).abs() < 1e-15);
        let e2 = l1 * l2 + l1 * s.lambda3 + l2 * s.lambda3;
        assert!((s.e2 - e2).abs() < 1e-15);
    }

    #[test]
    fn spectrum_rejects_out_of_range_angles() {
        assert!(matches!(
            spectrum_from_spherical(1.2, 0.1),
            Err(BuresError::OutOfDomain {
                coordinate: "zeta1",
                ..
            })
        ));
        assert!(matches!(
            spectrum_from_spherical(0.2, -0.1),
            Err(BuresError::OutOfDomain {
                coordinate: "zeta2",
                ..
            })
        ));
        assert!(matches!(
            spectrum_from_spherical(f64::NAN, 0.1),
            Err(BuresError::NonFiniteInput { .. })
        ));
    }

    #[test]
    fn zero_angles_give_identity() {
        let p = ParameterPoint::from_array([0.0; 8]);
        let u = euler_unitary(&p).unwrap();
        assert!(max_abs3(&(u - CMatrix3::identity())) < 1e-15);
    }

    #[test]
    fn unitary_is_special_unitary() {
        let u = euler_unitary(&sample_point()).unwrap();
        assert!(max_abs3(&(u * u.adjoint() - CMatrix3::identity())) < 1e-13);
        assert!((u.determinant() - c(1.0)).norm() < 1e-13);
    }

    #[test]
    fn generator_exponentials_match_eigen_oracle() {
        let g = gell_mann_basis();
        for k in 1..=7 {
            for t in [0.3, -1.2, std::f64::consts::FRAC_PI_2] {
                let oracle = expm_oracle(&(g[k - 1] * c(t)));
                assert!(max_abs3(&(generator_exp(k, t) - oracle)) < 1e-13);
            }
        }
        // θ = π/2 alone: exp(iΛ₅π/2) swaps basis vectors 1 and 3 with signs.
        let p = ParameterPoint::from_array([
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            std::f64::consts::FRAC_PI_2,
            0.0,
            0.0,
        ]);
        let u = euler_unitary(&p).unwrap();
        let expect = CMatrix3::new(
            c(0.0),
            c(0.0),
            c(1.0),
            c(0.0),
            c(1.0),
            c(0.0),
            c(-1.0),
            c(0.0),
            c(0.0),
        );
        assert!(max_abs3(&(u - expect)) < 1e-15, "{u}");
        assert!(max_abs3(&(u - expm_oracle(&(g[4] * c(std::f64::consts::FRAC_PI_2))))) < 1e-13);
    }

    #[test]
    fn density_is_a_state() {
        let st = density(&sample_point()).unwrap();
        assert!(max_abs3(&(st.rho - st.rho.adjoint())) < 1e-14);
        assert!((st.rho.trace() - c(1.0)).abs() < 1e-14);
    }

    #[test]
    fn pure_state_is_idempotent() {
        let p = sample_point().with(Coord::Zeta1, 0.0);
        let st = density(&p).unwrap();
        assert!(max_abs3(&(st.rho * st.rho - st.rho)) < 1e-13);
    }

    #[test]
    fn density_eigenvalues_match_chosen_spectrum() {
        // λ = (0.5, 0.3, 0.2): cos²ζ₁ = 0.5, sin²ζ₁cos²ζ₂ = 0.3
        let z1 = 0.5f64.sqrt().acos();
        let z2 = (0.3f64 / 0.5).sqrt().acos();
        let p = sample_point().with(Coord::Zeta1, z1).with(Coord::Zeta2, z2);
        let st = density(&p).unwrap();
        let mut ev: Vec<f64> = st
            .rho
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        for (got, want) in ev.iter().zip([0.5, 0.3, 0.2]) {
            assert!((got - want).abs() < 1e-13, "{ev:?}");
        }
    }

    #[test]
    fn alpha_partial_is_a_commutator() {
        let p = sample_point();
        let st = density(&p).unwrap();
        let d = density_partials(&p).unwrap();
        let l3 = gell_mann_basis()[2];
        let comm = (l3 * st.rho - st.rho * l3) * I;
        assert!(max_abs3(&(d[0] - comm)) < 1e-15);
        for m in &d {
            assert!(m.trace().norm() < 1e-15);
            assert!(max_abs3(&(m - m.adjoint())) < 1e-15);
        }
    }

    #[test]
    fn partials_match_central_differences() {
        let p = sample_point();
        let d = density_partials(&p).unwrap();
        let h = 1e-6;
        for coord in Coord::ALL {
            let x = p.get(coord);
            let plus = density_unchecked(&p.with(coord, x + h)).rho;
            let minus = density_unchecked(&p.with(coord, x - h)).rho;
            let fd = (plus - minus) / c(2.0 * h);
            let err = max_abs3(&(fd - d[coord.index()]));
            assert!(err < 1e-8, "{coord}: {err:e}");
        }
    }

    #[test]
    fn bloch_state_and_partials() {
        let st = bloch_density2(0.5, 0.7, 1.1).unwrap();
        assert_eq!(st.eigenvalues, [0.75, 0.25]);
        assert!((st.rho.trace() - c(1.0)).norm() < 1e-15);
        let ev = st.rho.symmetric_eigen().eigenvalues;
        let (hi, lo) = (ev[0].max(ev[1]), ev[0].min(ev[1]));
        assert!((hi - 0.75).abs() < 1e-14 && (lo - 0.25).abs() < 1e-14);
        let v = st.eigenvectors;
        let diag = v.adjoint() * st.rho * v;
        assert!((diag[(0, 0)] - c(0.75)).norm() < 1e-14);
        assert!((diag[(1, 1)] - c(0.25)).norm() < 1e-14);
        assert!(diag[(0, 1)].norm() < 1e-14);

        let h = 1e-6;
        let base = [0.5, 0.7, 1.1];
        for k in 0..3 {
            let mut xp = base;
            let mut xm = base;
            xp[k] += h;
            xm[k] -= h;
            let fd = (bloch_unchecked(xp[0], xp[1], xp[2]).rho
                - bloch_unchecked(xm[0], xm[1], xm[2]).rho)
                / c(2.0 * h);
            let err = (fd - st.partials[k])
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-8, "partial {k}: {err:e}");
        }
        assert!(matches!(
            bloch_density2(1.0, 0.1, 0.1),
            Err(BuresError::OutOfDomain { .. })
        ));
        assert!(matches!(
            bloch_density2(0.0, 0.1, 0.1),
            Err(BuresError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn domain_errors_name_the_coordinate() {
        let err = ParameterPoint::new(0.1, 0.1, 0.1, 2.0, 0.1, 0.1, 0.1, 0.1).unwrap_err();
        assert!(matches!(
            err,
            BuresError::OutOfDomain {
                coordinate: "beta",
                ..
            }
        ));
        let err =
            ParameterPoint::new(0.1, f64::INFINITY, 0.1, 0.2, 0.1, 0.1, 0.1, 0.1).unwrap_err();
        assert!(matches!(
            err,
            BuresError::NonFiniteInput { coordinate: "tau" }
        ));
    }

    #[test]
    fn degeneracy_guard() {
        let s = Spectrum::from_eigenvalues(0.5, 0.3);
        assert!(s.check_nondegenerate(1e-8).is_ok());
        let s = Spectrum::from_eigenvalues(0.4, 0.4);
        assert!(matches!(
            s.check_nondegenerate(1e-8),
            Err(BuresError::DegenerateSpectrum { .. })
        ));
        let s = Spectrum::from_eigenvalues(0.6, 0.4);
        assert!(s.check_nondegenerate(1e-8).is_err());
    }

    #[test]
    fn zeta1_max_constant() {
        assert!((ZETA1_MAX - (1.0 / 3f64.sqrt()).acos()).abs() < 1e-16);
    }

    #[test]
    fn density_spectrum_matches_over_the_box() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let x = Coord::ALL.map(|c| {
                let (lo, hi) = c.bounds();
                lo + (hi - lo) * next()
            });
            let p = ParameterPoint::from_array(x);
            let st = density(&p).unwrap();
            let mut got: Vec<f64> = st
                .rho
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            let mut want = spectrum_from_spherical(p.zeta1, p.zeta2)
                .unwrap()
                .as_array()
                .to_vec();
            got.sort_by(|a, b| b.total_cmp(a));
            want.sort_by(|a, b| b.total_cmp(a));
            for (g, w) in got.iter().zip(&want) {
                worst = worst.max((g - w).abs());
            }
        }
        assert!(worst < 1e-12, "{worst:e}");
    }

    #[test]
    fn eigenvalue_order_is_not_fixed_by_the_box() {
        // λ₁ = cos²ζ₁ falls below λ₂ for ζ₁ near its upper end
        let s = Spectrum::from_angles(0.9, 0.1);
        assert!(s.lambda1 < s.lambda2);
        let s = Spectrum::from_angles(0.5, 0.3);
        assert!(s.lambda1 > s.lambda2 && s.lambda2 > s.lambda3);
    }
}
