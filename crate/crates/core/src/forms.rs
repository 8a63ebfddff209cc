//! Exterior algebra over eight generators with matrix or scalar coefficients.
//!
//! Multi-indices are stored as bitmasks over `0..8`; bit `i` stands for the
//! generator `e^i`. Components of a [`MatrixForm`] are kept in lexicographic
//! order of the increasing index tuples, so degree 2 matches [`PairIndex`].
//!
//! [`PairIndex`]: crate::spin7::PairIndex

use std::sync::OnceLock;

use crate::curvature::CurvatureTwoForm;
use crate::error::{BuresError, Result};
use crate::metric::Matrix8;

pub const GENERATORS: usize = 8;

struct Tables {
    by_degree: [Vec<u8>; 9],
    rank: [usize; 256],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut by_degree: [Vec<u8>; 9] = Default::default();
        for p in 0..=GENERATORS {
            let mut out = Vec::new();
            combinations(0, p, 0, &mut out);
            by_degree[p] = out;
        }
        let mut rank = [0; 256];
        for list in &by_degree {
            for (r, &m) in list.iter().enumerate() {
                rank[m as usize] = r;
            }
        }
        Tables { by_degree, rank }
    })
}

fn combinations(start: usize, left: usize, mask: u8, out: &mut Vec<u8>) {
    if left == 0 {
        out.push(mask);
        return;
    }
    for i in start..=(GENERATORS - left) {
        combinations(i + 1, left - 1, mask | (1 << i), out);
    }
}

/// Increasing multi-indices of length `p`, lexicographic.
pub fn multi_indices(p: usize) -> &'static [u8] {
    &tables().by_degree[p]
}

/// Position of a multi-index within [`multi_indices`] of its degree.
pub fn rank(mask: u8) -> usize {
    tables().rank[mask as usize]
}

pub fn mask_of(indices: &[usize]) -> u8 {
    indices.iter().fold(0u8, |m, &i| {
        assert!(i < GENERATORS, "generator {i} out of range");
        assert!(m & (1 << i) == 0, "repeated generator {i}");
        m | (1 << i)
    })
}

pub fn indices_of(mask: u8) -> Vec<usize> {
    (0..GENERATORS).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of the permutation sorting the concatenation `(J, K)`, with `J` and
/// `K` disjoint and each increasing.
pub fn shuffle_sign(j: u8, k: u8) -> f64 {
    debug_assert_eq!(j & k, 0);
    let mut inversions = 0u32;
    let mut rest = k;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        // generators of J sitting above this one of K
        inversions += (j as u32 >> (bit + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Homogeneous form of degree `p` with 8×8 matrix coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixForm {
    degree: usize,
    components: Vec<Matrix8>,
}

impl MatrixForm {
    pub fn zero(degree: usize) -> Result<Self> {
        if degree > GENERATORS {
            return Err(BuresError::DegreeOverflow { degree });
        }
        Ok(Self {
            degree,
            components: vec![Matrix8::zeros(); binomial(GENERATORS, degree)],
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Components in lexicographic multi-index order.
    pub fn components(&self) -> &[Matrix8] {
        &self.components
    }

    pub fn get(&self, mask: u8) -> &Matrix8 {
        assert_eq!(mask.count_ones() as usize, self.degree);
        &self.components[rank(mask)]
    }

    pub fn get_mut(&mut self, mask: u8) -> &mut Matrix8 {
        assert_eq!(mask.count_ones() as usize, self.degree);
        &mut self.components[rank(mask)]
    }

    pub fn from_two_form(f: &CurvatureTwoForm) -> Self {
        Self {
            degree: 2,
            components: f.f.to_vec(),
        }
    }

    /// Coefficient-wise trace, a scalar form of the same degree.
    pub fn trace(&self) -> ScalarForm {
        let mut out = ScalarForm::zero();
        for (&m, c) in multi_indices(self.degree).iter().zip(&self.components) {
            out.coeffs[m as usize] = c.trace();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|x| *x == 0.0))
    }
}

/// `(F∧G)_I = Σ_{J⊔K=I} sign(J,K) F_J G_K` with matrix products in that order.
pub fn wedge(f: &MatrixForm, g: &MatrixForm) -> Result<MatrixForm> {
    let degree = f.degree + g.degree;
    let mut out = MatrixForm::zero(degree)?;
    let left = multi_indices(f.degree);
    for (slot, &i) in out.components.iter_mut().zip(multi_indices(degree)) {
        for (fj, &j) in f.components.iter().zip(left) {
            if j & !i != 0 {
                continue;
            }
            let k = i ^ j;
            *slot += fj * g.get(k) * shuffle_sign(j, k);
        }
    }
    Ok(out)
}

/// `Σ_I tr(F_Iᵀ G_I)`.
pub fn inner(f: &MatrixForm, g: &MatrixForm) -> Result<f64> {
    if f.degree != g.degree {
        return Err(BuresError::DegreeMismatch {
            left: f.degree,
            right: g.degree,
        });
    }
    Ok(f.components
        .iter()
        .zip(&g.components)
        .map(|(a, b)| a.dot(b))
        .sum())
}

/// Inhomogeneous real form, one coefficient per subset of the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarForm {
    pub coeffs: [f64; 256],
}

impl ScalarForm {
    pub fn zero() -> Self {
        Self { coeffs: [0.0; 256] }
    }

    pub fn one() -> Self {
        let mut s = Self::zero();
        s.coeffs[0] = 1.0;
        s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn support(&self) -> Vec<(u8, f64)> {
        (0..=255u8)
            .filter_map(|m| {
                let c = self.coeffs[m as usize];
                (c != 0.0).then_some((m, c))
            })
            .collect()
    }

    pub fn wedge(&self, other: &ScalarForm) -> ScalarForm {
        let mut out = ScalarForm::zero();
        let right = other.support();
        for (j, a) in self.support() {
            for &(k, b) in &right {
                if j & k == 0 {
                    out.coeffs[(j | k) as usize] += shuffle_sign(j, k) * a * b;
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &ScalarForm, s: f64) {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a += s * b;
        }
    }
}

/// Characteristic coefficients `σ₀..σ₈` of the 8×8 matrix of scalar
/// two-forms `Ω_ij = Σ_{a<b} (F_ab)_ij e^{ab}`, so that
/// `det(1 + tΩ) = Σ σ_k t^k`. Two-forms commute, so the principal minors
/// expand by the Leibniz rule exactly as over a field.
pub fn sigma_invariants(f: &MatrixForm) -> Result<[ScalarForm; 9]> {
    if f.degree != 2 {
        return Err(BuresError::DegreeMismatch {
            left: f.degree,
            right: 2,
        });
    }
    let omega: Vec<Vec<ScalarForm>> = (0..8)
        .map(|i| {
            (0..8)
                .map(|j| {
                    let mut s = ScalarForm::zero();
                    for (&m, c) in multi_indices(2).iter().zip(&f.components) {
                        s.coeffs[m as usize] = c[(i, j)];
                    }
                    s
                })
                .collect()
        })
        .collect();

    let mut sigma: [ScalarForm; 9] = std::array::from_fn(|_| ScalarForm::zero());
    sigma[0] = ScalarForm::one();
    // σ_k has degree 2k, so only k ≤ 4 can be nonzero
    for k in 1..=4 {
        for &rows in multi_indices(k) {
            let rows = indices_of(rows);
            leibniz(
                &omega,
                &rows,
                0,
                rows.iter().fold(0u8, |m, r| m | (1 << r)),
                1.0,
                ScalarForm::one(),
                &mut sigma[k],
            );
        }
    }
    Ok(sigma)
}

fn leibniz(
    omega: &[Vec<ScalarForm>],
    rows: &[usize],
    depth: usize,
    free_cols: u8,
    sign: f64,
    acc: ScalarForm,
    out: &mut ScalarForm,
) {
    if depth == rows.len() {
        out.add_scaled(&acc, sign);
        return;
    }
    let r = rows[depth];
    for c in indices_of(free_cols) {
        let entry = &omega[r][c];
        if entry.is_zero() {
            continue;
        }
        let next = acc.wedge(entry);
        if next.is_zero() {
            continue;
        }
        let below = (free_cols & ((1u8 << c) - 1)).count_ones();
        let s = if below % 2 == 0 { sign } else { -sign };
        leibniz(omega, rows, depth + 1, free_cols & !(1 << c), s, next, out);
    }
}
