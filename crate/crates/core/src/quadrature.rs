//! Seeded Monte-Carlo and midpoint-lattice integration over the parameter box.
//!
//! Sampling is counter based: the point with a given `(seed, index)` depends
//! on nothing else, so a parallel run and a serial run see the same points.
//! Each uniform variate is the SplitMix64 finalizer applied to a chain of
//! keys built from the seed, the sample index, the attempt number and the
//! coordinate slot (see [`uniform`]). Reductions walk the samples in index
//! order with pairwise summation, so the reported numbers are bitwise stable.
//!
//! The integrands never depend on `α` or `a`; those two coordinates are held
//! at [`FIXED_ANGLE`] and their range is accounted for by the factor
//! [`box_volume`].

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{frame_curvature_field, FrameChoice, JetOptions};
use crate::error::{BuresError, Result};
use crate::invariants::{invariant_row, InvariantRow};
use crate::metric::{MetricConfig, QutritBures};
use crate::spin7::DualityOperator;
use crate::state_space::{Coord, ParameterPoint, DEFAULT_DEGENERACY_THRESHOLD};
use crate::submersion::frame_curvature_exact;

/// Value of `α` and `a` at every sample.
pub const FIXED_ANGLE: f64 = 0.0;

/// Coordinates that are actually sampled.
pub const ACTIVE: [Coord; 6] = [
    Coord::Tau,
    Coord::Beta,
    Coord::B,
    Coord::Theta,
    Coord::Zeta1,
    Coord::Zeta2,
];

pub const DEFAULT_MAX_ATTEMPTS: u32 = 64;

/// Euclidean volume `π⁷/32 · arccos(3^{-1/2})` of the full eight-dimensional box.
pub fn box_volume() -> f64 {
    Coord::ALL
        .iter()
        .map(|c| {
            let (lo, hi) = c.bounds();
            hi - lo
        })
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MonteCarlo { samples: u64 },
    Lattice { nodes: u32 },
}

/// How the integrand obtains the curvature at each sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureSource {
    /// Closed form from the submersion picture; accurate up to the boundary.
    #[default]
    Exact,
    /// Richardson-extrapolated differences of the metric. Near pure states
    /// and near `θ = 0` the rounding error grows without bound and dominates
    /// the quartic invariants.
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub method: Method,
    pub seed: u64,
    pub degeneracy_threshold: f64,
    pub curvature: CurvatureSource,
    /// Only used with [`CurvatureSource::FiniteDifference`].
    pub jet: JetOptions,
    /// Draws per Monte-Carlo sample before giving up.
    pub max_attempts: u32,
}

impl QuadratureSpec {
    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Self::with_method(Method::MonteCarlo { samples }, seed)
    }

    pub fn lattice(nodes: u32) -> Self {
        Self::with_method(Method::Lattice { nodes }, 0)
    }

    fn with_method(method: Method, seed: u64) -> Self {
        Self {
            method,
            seed,
            degeneracy_threshold: DEFAULT_DEGENERACY_THRESHOLD,
            curvature: CurvatureSource::Exact,
            jet: JetOptions::default(),
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::MonteCarlo { samples: 0 } => {
                return Err(BuresError::InvalidSpec("samples must be at least 1".into()))
            }
            Method::Lattice { nodes } if nodes < 2 => {
                return Err(BuresError::InvalidSpec(
                    "nodes per dimension must be at least 2".into(),
                ))
            }
            Method::Lattice { nodes } if (nodes as u64).pow(6) > u32::MAX as u64 => {
                return Err(BuresError::InvalidSpec(format!(
                    "{nodes}^6 lattice nodes is too many"
                )))
            }
            _ => {}
        }
        if !(self.degeneracy_threshold > 0.0) {
            return Err(BuresError::InvalidSpec(
                "degeneracy threshold must be positive".into(),
            ));
        }
        if self.max_attempts == 0 {
            return Err(BuresError::InvalidSpec(
                "at least one attempt per sample is needed".into(),
            ));
        }
        Ok(())
    }

    fn planned(&self) -> u64 {
        match self.method {
            Method::MonteCarlo { samples } => samples,
            Method::Lattice { nodes } => (nodes as u64).pow(6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Standard error; Monte-Carlo only.
    pub stderr: Option<f64>,
    pub n_evaluated: u64,
    pub n_rejected: u64,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform variate in `[0, 1)` for `(seed, index, attempt, slot)`:
/// `mix(mix(mix(seed + φ) ⊕ index) + (8·attempt + slot + 1)·φ)` with
/// `φ = 0x9e3779b97f4a7c15`, keeping the top 53 bits.
pub fn uniform(seed: u64, index: u64, attempt: u32, slot: u32) -> f64 {
    let stream = mix64(mix64(seed.wrapping_add(GOLDEN)) ^ index);
    let key = (attempt as u64) * 8 + slot as u64 + 1;
    let bits = mix64(stream.wrapping_add(key.wrapping_mul(GOLDEN)));
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn draw(seed: u64, index: u64, attempt: u32) -> ParameterPoint {
    let mut x = [FIXED_ANGLE; 8];
    for (slot, c) in ACTIVE.iter().enumerate() {
        let (lo, hi) = c.bounds();
        x[c.index()] = lo + (hi - lo) * uniform(seed, index, attempt, slot as u32);
    }
    ParameterPoint::from_array(x)
}

/// Uniform point of the active box for `(seed, index)`.
pub fn sample_point(seed: u64, index: u64) -> ParameterPoint {
    draw(seed, index, 0)
}

/// Midpoint of lattice cell `index` with `nodes` cells per active axis; the
/// last active coordinate varies fastest.
pub fn lattice_point(nodes: u32, index: u64) -> ParameterPoint {
    let k = nodes as u64;
    let mut x = [FIXED_ANGLE; 8];
    let mut rest = index;
    for c in ACTIVE.iter().rev() {
        let digit = rest % k;
        rest /= k;
        let (lo, hi) = c.bounds();
        x[c.index()] = lo + (hi - lo) * (digit as f64 + 0.5) / k as f64;
    }
    ParameterPoint::from_array(x)
}

/// Interior point for pointwise checks: every coordinate, including `α` and
/// `a`, is drawn from its range shrunk by `margin` of the width at each end,
/// and the spectrum is redrawn until all eigenvalues and their gaps are at
/// least `separation`.
pub fn interior_point(seed: u64, index: u64, margin: f64, separation: f64) -> ParameterPoint {
    for attempt in 0.. {
        let mut x = [0.0; 8];
        for c in Coord::ALL {
            let (lo, hi) = c.bounds();
            let w = hi - lo;
            let u = uniform(seed, index, attempt, c.index() as u32);
            x[c.index()] = lo + margin * w + (1.0 - 2.0 * margin) * w * u;
        }
        let p = ParameterPoint::from_array(x);
        let s = p.spectrum();
        if s.min_eigenvalue() >= separation && s.min_gap() >= separation {
            return p;
        }
    }
    unreachable!()
}

/// Sum in a fixed binary tree over the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn is_rejection(e: &BuresError) -> bool {
    matches!(
        e,
        BuresError::DegenerateSpectrum { .. } | BuresError::SingularMetric { .. }
    )
}

enum Outcome {
    Value(Vec<f64>, u32),
    Rejected,
}

/// Integrates a vector-valued `integrand` of width `width` over the box and
/// multiplies by its volume. The integrand must include the `√det g` weight.
///
/// Monte Carlo redraws a rejected sample (degenerate or singular metric) up
/// to `max_attempts` times; `n_evaluated` is then the number of accepted
/// samples and `n_rejected` the number of discarded draws. On the lattice a
/// rejected node contributes zero and `n_evaluated + n_rejected = k⁶`.
pub fn integrate<F>(spec: &QuadratureSpec, width: usize, integrand: F) -> Result<Vec<Estimate>>
where
    F: Fn(&ParameterPoint) -> Result<Vec<f64>> + Sync,
{
    spec.validate()?;
    let total = spec.planned();
    let outcomes: Vec<Result<Outcome>> = (0..total)
        .into_par_iter()
        .map(|index| match spec.method {
            Method::MonteCarlo { .. } => {
                for attempt in 0..spec.max_attempts {
                    match integrand(&draw(spec.seed, index, attempt)) {
                        Ok(v) => return Ok(Outcome::Value(v, attempt)),
                        Err(e) if is_rejection(&e) => continue,
                        Err(e) => return Err(e),
                    }
                }
                Err(BuresError::RetryExhausted {
                    index,
                    attempts: spec.max_attempts,
                })
            }
            Method::Lattice { nodes } => match integrand(&lattice_point(nodes, index)) {
                Ok(v) => Ok(Outcome::Value(v, 0)),
                Err(e) if is_rejection(&e) => Ok(Outcome::Rejected),
                Err(e) => Err(e),
            },
        })
        .collect();

    let mut columns = vec![Vec::with_capacity(total as usize); width];
    let mut n_evaluated = 0u64;
    let mut n_rejected = 0u64;
    for outcome in outcomes {
        match outcome? {
            Outcome::Value(v, redraws) => {
                assert_eq!(v.len(), width, "integrand width");
                for (col, x) in columns.iter_mut().zip(v) {
                    col.push(x);
                }
                n_evaluated += 1;
                n_rejected += redraws as u64;
            }
            Outcome::Rejected => {
                for col in columns.iter_mut() {
                    col.push(0.0);
                }
                n_rejected += 1;
            }
        }
    }

    let volume = box_volume();
    let n = total as f64;
    Ok(columns
        .iter()
        .map(|col| {
            let mean = pairwise_sum(col) / n;
            let stderr = match spec.method {
                Method::MonteCarlo { .. } if total > 1 => {
                    let dev: Vec<f64> = col.iter().map(|x| (x - mean) * (x - mean)).collect();
                    let var = pairwise_sum(&dev) / (n - 1.0);
                    Some(volume * (var / n).sqrt())
                }
                Method::MonteCarlo { .. } => Some(f64::NAN),
                Method::Lattice { .. } => None,
            };
            Estimate {
                value: mean * volume,
                stderr,
                n_evaluated,
                n_rejected,
            }
        })
        .collect())
}

/// Fields whose invariants are tabulated, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    /// The full curvature `F`.
    Bures,
    /// `F⁻`, the seven-dimensional part.
    Asd,
    /// `F⁺`, the twenty-one-dimensional part.
    Sd,
    /// `†F = F⁺ − F⁻`.
    Diff,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::Bures, Field::Asd, Field::Sd, Field::Diff];

    pub fn name(self) -> &'static str {
        match self {
            Field::Bures => "bures",
            Field::Asd => "asd",
            Field::Sd => "sd",
            Field::Diff => "diff",
        }
    }
}

/// Pointwise invariant rows of the four fields at one point, plus `√det g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointInvariants {
    pub sqrt_det: f64,
    pub rows: [InvariantRow; 4],
}

pub fn point_invariants(
    field: &QutritBures,
    duality: &DualityOperator,
    p: &ParameterPoint,
    source: CurvatureSource,
    jet: &JetOptions,
) -> Result<PointInvariants> {
    let (f, sqrt_det) = match source {
        CurvatureSource::Exact => frame_curvature_exact(p, &field.config, FrameChoice::Cholesky)?,
        CurvatureSource::FiniteDifference => {
            frame_curvature_field(field, p, jet, FrameChoice::Cholesky)?
        }
    };
    let (plus, minus) = duality.decompose(&f);
    let dagger = duality.dagger(&f);
    Ok(PointInvariants {
        sqrt_det,
        rows: [
            invariant_row(&f),
            invariant_row(&minus),
            invariant_row(&plus),
            invariant_row(&dagger),
        ],
    })
}

/// Integrated invariants of all four fields from one pass over the samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Survey {
    pub method: Method,
    pub seed: u64,
    /// `estimates[field][entry]`, entries in [`InvariantRow::FIELDS`] order.
    pub estimates: [[Estimate; 6]; 4],
}

pub fn survey(spec: &QuadratureSpec) -> Result<Survey> {
    let field = QutritBures {
        config: MetricConfig {
            degeneracy_threshold: spec.degeneracy_threshold,
            ..MetricConfig::default()
        },
    };
    let duality = DualityOperator::new();
    let flat = integrate(spec, 24, |p| {
        let pi = point_invariants(&field, &duality, p, spec.curvature, &spec.jet)?;
        Ok(pi
            .rows
            .iter()
            .flat_map(|r| r.to_array().map(|v| v * pi.sqrt_det))
            .collect())
    })?;
    let estimates = std::array::from_fn(|f| std::array::from_fn(|e| flat[6 * f + e]));
    Ok(Survey {
        method: spec.method,
        seed: spec.seed,
        estimates,
    })
}

/// Yang-Mills type actions `∫(F,F) dvol` with unit coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Actions {
    pub total: Estimate,
    pub self_dual: Estimate,
    pub anti_self_dual: Estimate,
}

impl Actions {
    /// `|‖F‖² − ‖F⁺‖² − ‖F⁻‖²| / ‖F‖²`.
    pub fn additivity_defect(&self) -> f64 {
        let t = self.total.value;
        ((t - self.self_dual.value - self.anti_self_dual.value) / t).abs()
    }
}

const TABLE_COLUMNS: [usize; 5] = [1, 2, 3, 4, 5];

impl Survey {
    pub fn get(&self, field: Field, entry: &str) -> Estimate {
        let e = InvariantRow::FIELDS
            .iter()
            .position(|n| *n == entry)
            .unwrap_or_else(|| panic!("unknown invariant {entry}"));
        self.estimates[field as usize][e]
    }

    pub fn actions(&self) -> Actions {
        Actions {
            total: self.estimates[Field::Bures as usize][0],
            self_dual: self.estimates[Field::Sd as usize][0],
            anti_self_dual: self.estimates[Field::Asd as usize][0],
        }
    }

    /// Table CSV with rows `bures, asd, sd, diff`; values in `{:.16e}`,
    /// standard errors empty for the lattice.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["field".to_string()];
        header.extend(TABLE_COLUMNS.map(|c| InvariantRow::FIELDS[c].to_string()));
        header.extend(TABLE_COLUMNS.map(|c| format!("stderr_{}", InvariantRow::FIELDS[c])));
        w.write_record(&header).map_err(csv_error)?;
        for field in Field::ALL {
            let row = &self.estimates[field as usize];
            let mut rec = vec![field.name().to_string()];
            rec.extend(TABLE_COLUMNS.map(|c| format!("{:.16e}", row[c].value)));
            rec.extend(TABLE_COLUMNS.map(|c| {
                row[c]
                    .stderr
                    .map(|s| format!("{s:.16e}"))
                    .unwrap_or_default()
            }));
            w.write_record(&rec).map_err(csv_error)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| BuresError::InvalidSpec(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii output"))
    }
}

fn csv_error(e: csv::Error) -> BuresError {
    BuresError::InvalidSpec(format!("csv: {e}"))
}

/// The four-row invariant table.
pub fn invariant_table(spec: &QuadratureSpec) -> Result<Survey> {
    survey(spec)
}

pub fn ym_actions(spec: &QuadratureSpec) -> Result<Actions> {
    Ok(survey(spec)?.actions())
}
