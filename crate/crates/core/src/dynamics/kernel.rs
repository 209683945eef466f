use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ComplexEnergy, ModelParams};
use crate::quadrature::{integrate_semi_infinite, QuadratureConfig};

/// J(z) = 4 pi c1^2 \int_0^inf w^2/(d^2+w^2) (z - e1 - w)^-2 dw.
///
/// Integrated in units of d so the integrand is O(1) for |z - e1| <~ d.
pub fn kernel_integral(z: ComplexEnergy, params: &ModelParams, q: &QuadratureConfig) -> Result<Complex64> {
    q.validate()?;
    let zeta = z - params.e1;
    if zeta.im.abs() <= 1e-12 * zeta.norm() && zeta.re >= 0.0 {
        return Err(Error::PoleOnPath {
            re: zeta.re,
            im: zeta.im,
        });
    }
    let scaled = zeta / params.d;
    let integrand = |x: f64| {
        let x2 = x * x;
        let gap = scaled - x;
        Complex64::new(x2 / (1.0 + x2), 0.0) / (gap * gap)
    };
    let mut points = vec![1.0];
    if scaled.re > 0.0 {
        let w = scaled.im.abs();
        for k in [0.0, 1.0, -1.0, 10.0, -10.0, 100.0, -100.0] {
            points.push(scaled.re + k * w);
        }
    }
    let r = integrate_semi_infinite("kernel_integral", integrand, 0.0, 1.0, &points, q)?;
    Ok(4.0 * PI * params.c1_sq / params.d * r.value)
}
