//! Globally adaptive 21-point Gauss-Kronrod quadrature for complex-valued
//! integrands, with optional interior breakpoints and a rational map for
//! semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How [`integrate_semi_infinite`] treats the unbounded end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// Integrate panels of doubling width until their contribution vanishes.
    None,
    /// x = a + scale * s / (1 - s), s in [0, 1).
    #[default]
    SemiInfiniteRational,
}

impl Transform {
    pub fn as_str(self) -> &'static str {
        match self {
            Transform::None => "none",
            Transform::SemiInfiniteRational => "semi_infinite_rational",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Bisections allowed per call, on top of the initial breakpoint panels.
    pub max_subdivisions: usize,
    pub transform: Transform,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            max_subdivisions: 20_000,
            transform: Transform::SemiInfiniteRational,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "rel_tol",
                constraint: "must be > 0".into(),
            });
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "abs_tol",
                constraint: "must be >= 0".into(),
            });
        }
        if self.max_subdivisions < 16 {
            return Err(Error::InvalidParameter {
                field: "max_subdivisions",
                constraint: "must be >= 16".into(),
            });
        }
        Ok(())
    }

    fn tolerance(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &F, a: f64, b: f64) -> Segment
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
    }
}

/// Integrates `f` over [a, b], starting from panels split at `points`.
pub fn integrate<F>(
    operation: &'static str,
    f: F,
    a: f64,
    b: f64,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut edges: Vec<f64> = points
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > lo && *p < hi)
        .collect();
    edges.push(lo);
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut heap = BinaryHeap::with_capacity(edges.len() + 64);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in edges.windows(2) {
        let seg = gauss_kronrod(&f, w[0], w[1]);
        value += seg.value;
        error += seg.error;
        heap.push(seg);
    }
    let mut evaluations = 21 * heap.len();
    let mut subdivisions = 0;

    while error > cfg.tolerance(value) {
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::NonConvergent {
                operation,
                subdivisions,
                error,
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval can no longer be split in f64.
            return Err(Error::NonConvergent {
                operation,
                subdivisions,
                error,
            });
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Running sums drift; resynchronise now and then.
        if subdivisions % 256 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(QuadResult {
        value: value * sign,
        error,
        evaluations,
        subdivisions,
    })
}

/// Integrates `f` over [a, inf). `scale` sets where the rational map puts
/// its midpoint (or the first panel width without a transform).
pub fn integrate_semi_infinite<F>(
    operation: &'static str,
    f: F,
    a: f64,
    scale: f64,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    assert!(scale > 0.0, "scale must be positive");
    match cfg.transform {
        Transform::SemiInfiniteRational => {
            let mapped: Vec<f64> = points
                .iter()
                .filter(|p| **p > a && p.is_finite())
                .map(|p| (p - a) / (scale + p - a))
                .collect();
            let g = |s: f64| {
                let one_minus = 1.0 - s;
                let x = a + scale * s / one_minus;
                let jac = scale / (one_minus * one_minus);
                let v = f(x) * jac;
                if v.is_finite() {
                    v
                } else {
                    Complex64::new(0.0, 0.0)
                }
            };
            integrate(operation, g, 0.0, 1.0, &mapped, cfg)
        }
        Transform::None => {
            let mut total = QuadResult {
                value: Complex64::new(0.0, 0.0),
                error: 0.0,
                evaluations: 0,
                subdivisions: 0,
            };
            let mut lo = a;
            let mut width = scale;
            let mut quiet = 0;
            for _ in 0..400 {
                let hi = lo + width;
                let panel = integrate(operation, &f, lo, hi, points, cfg)?;
                total.value += panel.value;
                total.error += panel.error;
                total.evaluations += panel.evaluations;
                total.subdivisions += panel.subdivisions;
                if panel.value.norm() <= 0.1 * cfg.tolerance(total.value) {
                    quiet += 1;
                    if quiet == 2 {
                        return Ok(total);
                    }
                } else {
                    quiet = 0;
                }
                lo = hi;
                width *= 2.0;
            }
            Err(Error::NonConvergent {
                operation,
                subdivisions: total.subdivisions,
                error: total.error,
            })
        }
    }
}
