//! Closed-form resolvent of the bath coupling and the reduced T-matrix.
//!
//! All complex logarithms use the principal branch, arg in (-pi, pi]. The
//! explicit `-i pi` of T1's denominator is kept as a separate term, so for
//! Im z > 0 the expression coincides with the physical sheet (where
//! `ln(zeta) - i pi = ln(-zeta)`), while for Im z < 0 it is the continuation
//! through the positive real axis.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ComplexEnergy, ModelParams};

/// Source of T1 inside the T-matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BathCoupling {
    /// The closed-form T1(z).
    #[default]
    ClosedForm,
    /// T1 == 0: only the instantaneous potential Λ acts on the excited state.
    LambdaOnly,
}

/// Numerical guards for [`t1_of_z_with`] and [`t_matrix_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub coupling: BathCoupling,
    /// Smallest admissible |denominator of T1| (dimensionless).
    pub denominator_floor: f64,
    /// Smallest admissible |z - e2 - Λ - T1| in eV.
    pub pole_floor: f64,
    /// Radius, in units of d, around zeta = i d treated as the removable point.
    pub removable_tolerance: f64,
    /// Evaluate near zeta = i d by shifting zeta along the real axis by
    /// `removable_tolerance * d` instead of failing.
    pub limit_handling: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            coupling: BathCoupling::ClosedForm,
            denominator_floor: 1e-13,
            pole_floor: 1e-13,
            removable_tolerance: 1e-6,
            limit_handling: true,
        }
    }
}

impl EvalOptions {
    pub fn lambda_only() -> Self {
        Self {
            coupling: BathCoupling::LambdaOnly,
            ..Self::default()
        }
    }
}

/// psi(k) = c1 (d^2 + k^2)^(-1/2).
pub fn form_factor(k_mag: f64, params: &ModelParams) -> f64 {
    params.c1() / params.d.hypot(k_mag)
}

/// Denominator of T1 at zeta = z - e1, grouped so that the two large
/// d^2/zeta^2 terms are combined before they meet the O(1) terms.
pub fn t1_denominator(zeta: Complex64, params: &ModelParams) -> Complex64 {
    let r = params.b2_over_b1();
    let d = params.d;
    let ratio = d / zeta;
    let ln_d = (d / params.d0).ln();
    ratio * ratio * (ln_d - r) + (zeta / params.d0).ln() - PI * 0.5 * ratio - r
        - Complex64::new(0.0, PI)
}

/// Closed-form T1(z) with default guards.
pub fn t1_of_z(z: ComplexEnergy, params: &ModelParams) -> Result<Complex64> {
    t1_of_z_with(z, params, &EvalOptions::default())
}

pub fn t1_of_z_with(z: ComplexEnergy, params: &ModelParams, opts: &EvalOptions) -> Result<Complex64> {
    if opts.coupling == BathCoupling::LambdaOnly {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut zeta = z - params.e1;
    if zeta.norm() == 0.0 || !zeta.is_finite() {
        return Err(Error::Domain {
            operation: "t1_of_z",
            requirement: "finite z != e1",
        });
    }
    // Numerator and denominator both vanish at zeta = +i d; at -i d only the
    // numerator does (the denominator equals -2 pi i there).
    let removable = Complex64::new(0.0, params.d);
    let distance = (zeta - removable).norm();
    let radius = opts.removable_tolerance * params.d;
    if distance < radius {
        if !opts.limit_handling {
            return Err(Error::RemovableSingularity { distance });
        }
        zeta += radius;
    }
    let d = params.d;
    let ratio = d / zeta;
    let numerator = ratio * ratio + 1.0;
    let denominator = t1_denominator(zeta, params);
    if denominator.norm() < opts.denominator_floor {
        return Err(Error::DenominatorNearZero {
            magnitude: denominator.norm(),
            floor: opts.denominator_floor,
        });
    }
    Ok(params.b1() * numerator / denominator)
}

/// The reduced amplitudes t_ij(z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TMatrixElements {
    pub t11: Complex64,
    pub t12: Complex64,
    pub t21: Complex64,
    pub t22: Complex64,
}

impl TMatrixElements {
    pub fn determinant(&self) -> Complex64 {
        self.t22 * self.t11 - self.t12 * self.t21
    }
}

/// Everything needed to assemble the T-matrix at one z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolvent {
    pub t1: Complex64,
    /// D = z - e2 - Λ - T1.
    pub denominator: Complex64,
    pub elements: TMatrixElements,
}

pub fn t_matrix(z: ComplexEnergy, params: &ModelParams) -> Result<TMatrixElements> {
    Ok(resolvent(z, params, &EvalOptions::default())?.elements)
}

pub fn t_matrix_with(z: ComplexEnergy, params: &ModelParams, opts: &EvalOptions) -> Result<TMatrixElements> {
    Ok(resolvent(z, params, opts)?.elements)
}

pub fn resolvent(z: ComplexEnergy, params: &ModelParams, opts: &EvalOptions) -> Result<Resolvent> {
    let detuning = z - params.e2;
    if detuning.norm() == 0.0 {
        return Err(Error::Domain {
            operation: "t_matrix",
            requirement: "z != e2",
        });
    }
    let lambda = params.lambda();
    let t1 = t1_of_z_with(z, params, opts)?;
    let denominator = detuning - lambda - t1;
    if denominator.norm() < opts.pole_floor {
        return Err(Error::PoleProximity {
            magnitude: denominator.norm(),
            floor: opts.pole_floor,
        });
    }
    let off_diagonal = t1 * detuning / denominator;
    Ok(Resolvent {
        t1,
        denominator,
        elements: TMatrixElements {
            t22: (lambda + t1) * detuning / denominator,
            t11: t1 * (detuning - lambda) / denominator,
            t12: off_diagonal,
            t21: off_diagonal,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Preset;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn form_factor_values() {
        let mut p = Preset::A.params();
        p.d = 1e7;
        assert_relative_eq!(form_factor(0.0, &p), 5e-7, max_relative = 1e-15);
        assert_relative_eq!(form_factor(p.d, &p), 5.0 / (1e7 * 2f64.sqrt()), max_relative = 1e-15);
        let k = 1e15;
        assert_relative_eq!(form_factor(k, &p) * k, 5.0, max_relative = 1e-12);
    }

    #[test]
    fn form_factor_is_decreasing() {
        let p = Preset::B.params();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let k = 1e3 * 1.2f64.powi(i);
            let v = form_factor(k, &p);
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    // Golden value from tests/oracles/golden_values.py (50-digit evaluation).
    #[test]
    fn t1_golden_row_c() {
        let p = Preset::C.params();
        let t1 = t1_of_z(c(p.e2, 100.0), &p).unwrap();
        assert_relative_eq!(t1.re, -216.42116924310491517, max_relative = 1e-9);
        assert_relative_eq!(t1.im, -40.320825838462727387, max_relative = 1e-9);
    }

    #[test]
    fn denominator_imaginary_part_is_minus_pi_on_real_axis() {
        for preset in Preset::ALL {
            let p = preset.params();
            for &x in &[1.0, 50.0, 1e3, 9e4, 102_697.0, 1e6, 1e9] {
                let den = t1_denominator(c(x, 0.0), &p);
                assert_eq!(den.im, -PI);
                // Same statement through T1 itself.
                let t1 = t1_of_z(c(p.e1 + x, 0.0), &p).unwrap();
                let n = (p.d * p.d + x * x) / (x * x);
                assert_relative_eq!((p.b1() * n / t1).im, -PI, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn removable_point_is_handled_or_reported() {
        let p = Preset::A.params();
        let z = c(p.e1, p.d);
        let strict = EvalOptions {
            limit_handling: false,
            ..EvalOptions::default()
        };
        assert!(matches!(
            t1_of_z_with(z, &p, &strict),
            Err(Error::RemovableSingularity { .. })
        ));
        let at = t1_of_z(z, &p).unwrap();
        let near = t1_of_z(z + 1e-3 * p.d, &p).unwrap();
        assert!(at.is_finite());
        assert_relative_eq!(at.re, near.re, max_relative = 1e-2);
        // -i d is a zero of T1, not a singular point.
        let below = t1_of_z(c(p.e1, -p.d), &p).unwrap();
        assert!(below.norm() < 1e-12);
    }

    #[test]
    fn z_at_e1_is_rejected() {
        let p = Preset::A.params();
        assert!(matches!(t1_of_z(c(p.e1, 0.0), &p), Err(Error::Domain { .. })));
    }

    #[test]
    fn lambda_only_elements_vanish_without_lambda() {
        let mut p = Preset::A.params();
        p.lambda_im = 0.0;
        let t = t_matrix_with(c(p.e2 + 10.0, 3.0), &p, &EvalOptions::lambda_only()).unwrap();
        for v in [t.t11, t.t12, t.t21, t.t22] {
            assert_eq!(v, c(0.0, 0.0));
        }
    }

    #[test]
    fn pole_proximity_is_reported() {
        let p = Preset::A.params();
        let opts = EvalOptions::lambda_only();
        let z = p.lambda() + p.e2;
        assert!(matches!(
            t_matrix_with(z, &p, &opts),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn large_radius_expansion_decays_as_inverse_cube_log() {
        // Oracle: fit the decay exponent of |T1 - b1/L - b2/L^2| against |L|
        // along a geometric sequence of radii.
        for preset in Preset::ALL {
            let mut p = preset.params();
            p.b2 *= 0.1;
            let remainder = |k: i32| {
                let r = p.d * 10f64.powi(k);
                let t1 = t1_of_z(c(p.e1, r), &p).unwrap();
                let l = c(r.ln(), 0.0) + c(0.0, PI / 2.0) - c(0.0, PI);
                ((t1 - p.b1() / l - p.b2 / (l * l)).norm(), l.norm())
            };
            let (r1, l1) = remainder(40);
            let (r2, l2) = remainder(120);
            let exponent = (r2 / r1).ln() / (l2 / l1).ln();
            assert!((exponent + 3.0).abs() < 0.35, "{preset}: exponent {exponent}");
        }
    }

    proptest! {
        #[test]
        fn off_diagonal_elements_are_identical(
            re in -2e5f64..2e5, im in -5e3f64..5e3, which in 0usize..4
        ) {
            let p = Preset::ALL[which].params();
            let z = c(p.e2 + re, im);
            if let Ok(t) = t_matrix(z, &p) {
                prop_assert_eq!(t.t12.re.to_bits(), t.t21.re.to_bits());
                prop_assert_eq!(t.t12.im.to_bits(), t.t21.im.to_bits());
            }
        }

        #[test]
        fn determinant_identity(
            re in -2e5f64..2e5, im in 1f64..5e3, lre in -500f64..500.0, lim in -500f64..500.0,
            c1_sq in 0.05f64..30.0, which in 0usize..4
        ) {
            let mut p = Preset::ALL[which].params();
            p.lambda_re = lre;
            p.lambda_im = lim;
            p.c1_sq = c1_sq;
            let z = c(p.e2 + re, im);
            let r = resolvent(z, &p, &EvalOptions::default()).unwrap();
            let expected = p.lambda() * r.t1 * (z - p.e2) / r.denominator;
            let got = r.elements.determinant();
            prop_assert!((got - expected).norm() <= 1e-12 * expected.norm().max(1e-300) + 1e-300,
                "{got} vs {expected}");
        }
    }
}
