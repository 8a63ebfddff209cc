//! Spin(7) duality on two-forms in eight dimensions.
//!
//! The 28-dimensional space of two-forms splits into a 7-dimensional piece,
//! spanned by the normals of the seven "set a" equations, and its
//! 21-dimensional complement cut out by the twenty-one "set b" equations.
//! The invariant four-form acts as `Φ = P⁺ − 3P⁻`; "self-dual" here means the
//! eigenvalue +1 (rank 21) part and "anti-self-dual" the eigenvalue −3 (rank 7)
//! part.

use nalgebra::SMatrix;

use crate::curvature::CurvatureTwoForm;
use crate::metric::Matrix8;

pub type Matrix28 = SMatrix<f64, 28, 28>;
pub type Vector28 = SMatrix<f64, 28, 1>;

/// Lexicographic numbering of the pairs `a < b` of `0..8`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairIndex;

impl PairIndex {
    pub const COUNT: usize = 28;

    pub fn new() -> Self {
        PairIndex
    }

    /// Zero-based `(a, b)` with `a < b` to `0..28`.
    pub fn index(&self, a: usize, b: usize) -> usize {
        assert!(
            a < b && b < 8,
            "pair ({a}, {b}) is not an increasing pair of 0..8"
        );
        7 * a - a * (a.saturating_sub(1)) / 2 + (b - a - 1)
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        assert!(index < Self::COUNT);
        let mut rest = index;
        for a in 0..8 {
            let row = 7 - a;
            if rest < row {
                return (a, a + 1 + rest);
            }
            rest -= row;
        }
        unreachable!()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> {
        (0..8).flat_map(|a| ((a + 1)..8).map(move |b| (a, b)))
    }
}

/// One linear equation on the components `F_ab`, pairs one-based.
type Equation = [(u8, u8, f64); 4];

const SET_A: [Equation; 7] = [
    [(1, 2, 1.0), (3, 4, 1.0), (5, 6, 1.0), (7, 8, 1.0)],
    [(1, 3, 1.0), (2, 4, -1.0), (5, 7, 1.0), (6, 8, -1.0)],
    [(1, 4, 1.0), (2, 3, 1.0), (6, 7, -1.0), (5, 8, -1.0)],
    [(1, 5, 1.0), (2, 6, -1.0), (3, 7, -1.0), (4, 8, 1.0)],
    [(1, 6, 1.0), (2, 5, 1.0), (3, 8, 1.0), (4, 7, 1.0)],
    [(1, 7, 1.0), (2, 8, -1.0), (3, 5, 1.0), (4, 6, -1.0)],
    [(1, 8, 1.0), (2, 7, 1.0), (3, 6, -1.0), (4, 5, -1.0)],
];

/// The twenty-one two-term equations `F_ab + s F_cd = 0` as `(a, b, s, c, d)`.
const SET_B: [(u8, u8, f64, u8, u8); 21] = [
    (1, 2, -1.0, 3, 4),
    (1, 2, -1.0, 5, 6),
    (1, 2, -1.0, 7, 8),
    (1, 3, 1.0, 2, 4),
    (1, 3, -1.0, 5, 7),
    (1, 3, 1.0, 6, 8),
    (1, 4, -1.0, 2, 3),
    (1, 4, 1.0, 6, 7),
    (1, 4, 1.0, 5, 8),
    (1, 5, 1.0, 2, 6),
    (1, 5, 1.0, 3, 7),
    (1, 5, -1.0, 4, 8),
    (1, 6, -1.0, 2, 5),
    (1, 6, -1.0, 3, 8),
    (1, 6, -1.0, 4, 7),
    (1, 7, 1.0, 2, 8),
    (1, 7, -1.0, 3, 5),
    (1, 7, 1.0, 4, 6),
    (1, 8, -1.0, 2, 7),
    (1, 8, 1.0, 3, 6),
    (1, 8, 1.0, 4, 5),
];

fn slot(a: u8, b: u8) -> usize {
    PairIndex.index(a as usize - 1, b as usize - 1)
}

/// Normals of the seven "set a" equations (`F⁺` satisfies them).
pub fn set_a_basis() -> [Vector28; 7] {
    SET_A.map(|eq| {
        let mut v = Vector28::zeros();
        for (a, b, s) in eq {
            v[slot(a, b)] = s;
        }
        v
    })
}

/// Normals of the twenty-one "set b" equations (`F⁻` satisfies them).
pub fn set_b_basis() -> [Vector28; 21] {
    SET_B.map(|(a, b, s, c, d)| {
        let mut v = Vector28::zeros();
        v[slot(a, b)] = 1.0;
        v[slot(c, d)] = s;
        v
    })
}

/// Spin(7) projectors on the pair index.
#[derive(Debug, Clone, PartialEq)]
pub struct DualityOperator {
    pub phi: Matrix28,
    pub p_plus: Matrix28,
    pub p_minus: Matrix28,
}

/// `P⁻ = ¼ Σ v_k v_kᵀ`, `P⁺ = 1 − P⁻`, `Φ = P⁺ − 3P⁻`.
pub fn projectors() -> DualityOperator {
    let p_minus = set_a_basis()
        .iter()
        .fold(Matrix28::zeros(), |acc, v| acc + v * v.transpose() * 0.25);
    let p_plus = Matrix28::identity() - p_minus;
    DualityOperator {
        phi: p_plus - p_minus * 3.0,
        p_plus,
        p_minus,
    }
}

impl DualityOperator {
    pub fn new() -> Self {
        projectors()
    }

    fn apply(m: &Matrix28, f: &CurvatureTwoForm) -> CurvatureTwoForm {
        let mut out = [Matrix8::zeros(); 28];
        for (p, slot) in out.iter_mut().enumerate() {
            for q in 0..28 {
                let w = m[(p, q)];
                if w != 0.0 {
                    *slot += f.f[q] * w;
                }
            }
        }
        CurvatureTwoForm {
            f: out,
            frame: f.frame,
        }
    }

    /// `(F⁺, F⁻) = (P⁺F, P⁻F)`, applied along the pair index entrywise.
    pub fn decompose(&self, f: &CurvatureTwoForm) -> (CurvatureTwoForm, CurvatureTwoForm) {
        (Self::apply(&self.p_plus, f), Self::apply(&self.p_minus, f))
    }

    /// `†F = F⁺ − F⁻`.
    pub fn dagger(&self, f: &CurvatureTwoForm) -> CurvatureTwoForm {
        Self::apply(&(self.p_plus - self.p_minus), f)
    }
}

impl Default for DualityOperator {
    fn default() -> Self {
        projectors()
    }
}

pub fn decompose(f: &CurvatureTwoForm) -> (CurvatureTwoForm, CurvatureTwoForm) {
    projectors().decompose(f)
}

fn residual(v: &Vector28, f: &CurvatureTwoForm) -> f64 {
    let mut m = Matrix8::zeros();
    for (q, w) in v.iter().enumerate() {
        if *w != 0.0 {
            m += f.f[q] * *w;
        }
    }
    m.norm()
}

/// Frobenius norms of the seven signed combinations of set a.
pub fn set_a_residuals(f: &CurvatureTwoForm) -> [f64; 7] {
    set_a_basis().map(|v| residual(&v, f))
}

/// Frobenius norms of the twenty-one combinations of set b.
pub fn set_b_residuals(f: &CurvatureTwoForm) -> [f64; 21] {
    set_b_basis().map(|v| residual(&v, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn single(a: usize, b: usize, k: Matrix8) -> CurvatureTwoForm {
        let mut f = CurvatureTwoForm::zero();
        f.f[PairIndex.index(a, b)] = k;
        f
    }

    fn skew(seed: u64) -> Matrix8 {
        let mut s = seed;
        let m = Matrix8::from_fn(|_, _| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        });
        m - m.transpose()
    }

    fn random_form(seed: u64) -> CurvatureTwoForm {
        let mut f = CurvatureTwoForm::zero();
        for (p, slot) in f.f.iter_mut().enumerate() {
            *slot = skew(seed * 31 + p as u64);
        }
        f
    }

    #[test]
    fn pair_index_is_lexicographic_bijection() {
        let pi = PairIndex;
        for (n, (a, b)) in pi.iter().enumerate() {
            assert_eq!(pi.index(a, b), n);
            assert_eq!(pi.pair(n), (a, b));
        }
        assert_eq!(pi.iter().count(), 28);
        assert_eq!(pi.index(6, 7), 27);
    }

    #[test]
    fn set_a_vectors() {
        let va = set_a_basis();
        for (i, v) in va.iter().enumerate() {
            assert_eq!(v.iter().filter(|x| **x != 0.0).count(), 4);
            assert!(v.iter().all(|x| [0.0, 1.0, -1.0].contains(x)));
            for (j, w) in va.iter().enumerate() {
                let expect = if i == j { 4.0 } else { 0.0 };
                assert_eq!(v.dot(w), expect);
            }
        }
        for (a, b) in [(0, 1), (2, 3), (4, 5), (6, 7)] {
            assert_eq!(va[0][PairIndex.index(a, b)], 1.0);
        }
    }

    #[test]
    fn set_b_is_the_orthogonal_complement() {
        let vb = set_b_basis();
        for v in &vb {
            for w in set_a_basis() {
                assert_eq!(v.dot(&w), 0.0);
            }
        }
        let m = SMatrix::<f64, 28, 21>::from_columns(&vb);
        assert_eq!(m.rank(1e-10), 21);
    }

    #[test]
    fn projector_algebra() {
        let d = projectors();
        let id = Matrix28::identity();
        assert!((d.p_minus * d.p_minus - d.p_minus).abs().max() < 1e-13);
        assert!((d.p_plus * d.p_plus - d.p_plus).abs().max() < 1e-13);
        assert!((d.p_plus * d.p_minus).abs().max() < 1e-13);
        assert!((d.p_plus + d.p_minus - id).abs().max() < 1e-13);
        assert!((d.p_minus.trace() - 7.0).abs() < 1e-13);
        assert!((d.p_plus.trace() - 21.0).abs() < 1e-13);

        let mut ev: Vec<f64> = SymmetricEigen::new(d.phi)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        for (i, l) in ev.iter().enumerate() {
            let expect = if i < 7 { -3.0 } else { 1.0 };
            assert!((l - expect).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn projecting_a_single_pair() {
        // only v₁ touches pair 12, so P⁻e₁₂ = v₁/4
        let d = projectors();
        let col = d.p_minus.column(PairIndex.index(0, 1)).into_owned();
        assert!((col - set_a_basis()[0] * 0.25).abs().max() < 1e-15);

        let k = skew(7);
        let (plus, minus) = d.decompose(&single(0, 1, k));
        for (p, (a, b)) in PairIndex.iter().enumerate() {
            let expect = if [(0, 1), (2, 3), (4, 5), (6, 7)].contains(&(a, b)) {
                k * 0.25
            } else {
                Matrix8::zeros()
            };
            assert!((minus.f[p] - expect).abs().max() < 1e-15);
        }
        assert!((plus.f[0] - k * 0.75).abs().max() < 1e-15);
    }

    #[test]
    fn set_a_pattern_has_no_self_dual_part() {
        let k = skew(3);
        let mut f = CurvatureTwoForm::zero();
        for (a, b) in [(0, 1), (2, 3), (4, 5), (6, 7)] {
            f.f[PairIndex.index(a, b)] = k;
        }
        let (plus, minus) = decompose(&f);
        assert!(plus.norm_squared() < 1e-28);
        assert!((minus.norm_squared() - f.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn decomposition_of_random_forms() {
        let d = projectors();
        for seed in 0..5 {
            let f = random_form(seed);
            let (plus, minus) = d.decompose(&f);
            let total = f.norm_squared();
            assert!(((plus.norm_squared() + minus.norm_squared()) / total - 1.0).abs() < 1e-12);
            for p in 0..28 {
                assert!((plus.f[p] + minus.f[p] - f.f[p]).abs().max() < 1e-12);
            }
            let scale = total.sqrt();
            assert!(set_a_residuals(&plus).iter().all(|r| *r < 1e-10 * scale));
            assert!(set_b_residuals(&minus).iter().all(|r| *r < 1e-10 * scale));

            // idempotence and ††F = F
            let (pp, pm) = d.decompose(&plus);
            assert!(pm.norm_squared() < 1e-24 * total);
            assert!((pp.norm_squared() - plus.norm_squared()).abs() < 1e-12 * total);
            let twice = d.dagger(&d.dagger(&f));
            for p in 0..28 {
                assert!((twice.f[p] - f.f[p]).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn set_b_solutions_are_strongly_self_dual() {
        // a real two-form in the span of the set-a normals solves set b; as a
        // skew matrix all eight singular values coincide
        let va = set_a_basis();
        for seed in 0..10u64 {
            let coeffs: Vec<f64> = (0..7)
                .map(|k| ((seed * 7 + k) as f64 * 0.731).sin())
                .collect();
            let v = va
                .iter()
                .zip(&coeffs)
                .fold(Vector28::zeros(), |acc, (v, c)| acc + v * *c);
            let mut omega = Matrix8::zeros();
            for (p, (a, b)) in PairIndex.iter().enumerate() {
                omega[(a, b)] = v[p];
                omega[(b, a)] = -v[p];
            }
            for w in set_b_basis() {
                assert!(w.dot(&v).abs() < 1e-14);
            }
            let sv = omega.singular_values();
            let hi = sv.max();
            let lo = sv.min();
            assert!((hi - lo) / hi < 1e-10, "{sv}");
            // eigen-solver oracle: ω² = −|ω|² I up to scale
            let sq = omega * omega;
            let ev = SymmetricEigen::new(sq).eigenvalues;
            assert!((ev.max() - ev.min()).abs() < 1e-10 * ev.abs().max());
        }
    }

    proptest::proptest! {
        #[test]
        fn decomposition_is_an_orthogonal_splitting(seed in 0u64..1_000_000, scale in 1e-6f64..1e6) {
            let mut f = random_form(seed);
            for m in f.f.iter_mut() {
                *m *= scale;
            }
            let (plus, minus) = decompose(&f);
            let norm = f.norm_squared();
            let parts = plus.norm_squared() + minus.norm_squared();
            proptest::prop_assert!((norm - parts).abs() <= 1e-12 * norm);
            let (pp, pm) = decompose(&plus);
            for (a, b) in pp.f.iter().zip(&plus.f) {
                proptest::prop_assert!((a - b).abs().max() <= 1e-12 * scale);
            }
            proptest::prop_assert!(pm.norm_squared() <= 1e-24 * norm);
        }
    }
}
