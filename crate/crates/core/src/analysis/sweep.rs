use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::peaks::{find_peaks, Classification, Peak, DEFAULT_PROMINENCE_FLOOR};
use super::profile::{evaluate_profile, Window};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Evenly spaced values min..=max; a single value when count == 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn fixed(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            count: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        let mut v: Vec<f64> = (0..self.count).map(|k| self.min + step * k as f64).collect();
        v[self.count - 1] = self.max;
        v
    }

    fn validate(&self, field: &'static str) -> Result<()> {
        if self.count < 1 {
            return Err(Error::InvalidParameter {
                field,
                constraint: "count must be >= 1".into(),
            });
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(Error::InvalidParameter {
                field,
                constraint: "need finite min <= max".into(),
            });
        }
        Ok(())
    }
}

/// Cartesian grid over (Im Λ, c1^2, d, b2); every other parameter is taken
/// from `base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: ModelParams,
    pub lambda_im: Axis,
    pub c1_sq: Axis,
    pub d: Axis,
    pub b2: Axis,
}

impl SweepSpec {
    /// All axes pinned at the values of `base`.
    pub fn around(base: ModelParams) -> Self {
        Self {
            base,
            lambda_im: Axis::fixed(base.lambda_im),
            c1_sq: Axis::fixed(base.c1_sq),
            d: Axis::fixed(base.d),
            b2: Axis::fixed(base.b2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.lambda_im.validate("sweep.lambda_im")?;
        self.c1_sq.validate("sweep.c1_sq")?;
        self.d.validate("sweep.d")?;
        self.b2.validate("sweep.b2")
    }

    pub fn len(&self) -> usize {
        self.lambda_im.count * self.c1_sq.count * self.d.count * self.b2.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cells in row-major order, b2 varying fastest.
    pub fn cells(&self) -> Vec<([usize; 4], ModelParams)> {
        let axes = [self.lambda_im.values(), self.c1_sq.values(), self.d.values(), self.b2.values()];
        let mut out = Vec::with_capacity(self.len());
        for (i, li) in axes[0].iter().enumerate() {
            for (j, c) in axes[1].iter().enumerate() {
                for (k, d) in axes[2].iter().enumerate() {
                    for (l, b2) in axes[3].iter().enumerate() {
                        let mut p = self.base;
                        p.lambda_im = *li;
                        p.c1_sq = *c;
                        p.d = *d;
                        p.b2 = *b2;
                        out.push(([i, j, k, l], p));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    pub classification: Classification,
    pub peaks: Vec<Peak>,
    pub fwhm_main: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub index: [usize; 4],
    pub params: ModelParams,
    pub outcome: std::result::Result<CellOutcome, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn count_split(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(&c.outcome, Ok(o) if o.classification.is_split()))
            .count()
    }

    pub fn count_single(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(&c.outcome, Ok(o) if !o.classification.is_split()))
            .count()
    }
}

/// Evaluates every cell in parallel; output order follows [`SweepSpec::cells`]
/// regardless of scheduling. Failing cells keep their error.
pub fn sweep(spec: &SweepSpec, window: Window, n_points: usize) -> Result<SweepResult> {
    spec.validate()?;
    Window::new(window.lo, window.hi)?;
    let cells = spec
        .cells()
        .into_par_iter()
        .map(|(index, params)| {
            let outcome = evaluate_profile(&params, window, n_points).map(|curve| {
                let report = find_peaks(&curve, DEFAULT_PROMINENCE_FLOOR);
                CellOutcome {
                    classification: report.classification,
                    peaks: report.peaks,
                    fwhm_main: report.fwhm_main,
                }
            });
            SweepCell { index, params, outcome }
        })
        .collect();
    Ok(SweepResult { cells })
}
