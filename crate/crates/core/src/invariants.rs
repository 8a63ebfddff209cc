//! Pointwise curvature invariants built from wedge powers of the curvature
//! two-form. All inner products use `⟨X, Y⟩ = tr(XᵀY)`.

use serde::Serialize;

use crate::curvature::CurvatureTwoForm;
use crate::error::{BuresError, Result};
use crate::forms::{inner, wedge, MatrixForm};
use crate::metric::Matrix8;

/// `tr F² = −2 Σ_{a<b} F_ab F_ab`.
pub fn trace_form_square(f: &MatrixForm) -> Result<Matrix8> {
    if f.degree() != 2 {
        return Err(BuresError::DegreeMismatch {
            left: f.degree(),
            right: 2,
        });
    }
    Ok(f.components()
        .iter()
        .fold(Matrix8::zeros(), |acc, m| acc + m * m)
        * -2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct InvariantRow {
    pub ff: f64,
    pub ff2: f64,
    pub f2f2: f64,
    pub trf2: f64,
    pub f3f3_23: f64,
    pub f4f4_12: f64,
}

impl InvariantRow {
    pub const FIELDS: [&'static str; 6] = ["ff", "ff2", "f2f2", "trf2", "f3f3_23", "f4f4_12"];

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.ff,
            self.ff2,
            self.f2f2,
            self.trf2,
            self.f3f3_23,
            self.f4f4_12,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            ff: a[0],
            ff2: a[1],
            f2f2: a[2],
            trf2: a[3],
            f3f3_23: a[4],
            f4f4_12: a[5],
        }
    }

    /// `(F³, F³)` undoing the two-thirds power.
    pub fn f3f3(&self) -> f64 {
        self.f3f3_23.powf(1.5)
    }

    /// `(F⁴, F⁴)` undoing the square root.
    pub fn f4f4(&self) -> f64 {
        self.f4f4_12 * self.f4f4_12
    }
}

pub fn invariant_row(f: &CurvatureTwoForm) -> InvariantRow {
    let f1 = MatrixForm::from_two_form(f);
    // degrees stay at most 8 and match by construction
    let f2 = wedge(&f1, &f1).expect("degree 4");
    let f3 = wedge(&f2, &f1).expect("degree 6");
    let f4 = wedge(&f2, &f2).expect("degree 8");
    let ff = inner(&f1, &f1).expect("same degree");
    let tr = trace_form_square(&f1).expect("degree 2");
    InvariantRow {
        ff,
        ff2: ff * ff,
        f2f2: inner(&f2, &f2).expect("same degree"),
        trf2: tr.dot(&tr),
        f3f3_23: inner(&f3, &f3).expect("same degree").powf(2.0 / 3.0),
        f4f4_12: inner(&f4, &f4).expect("same degree").sqrt(),
    }
}
