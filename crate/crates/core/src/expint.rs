//! Generalized exponential integrals E_n(w) for Re w >= 0, used by the
//! analytic tail of oscillatory contour integrals:
//! \int_X^inf e^{-i u t} u^{-n} du = X^{1-n} E_n(i X t).

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// E_n(w), n >= 1, Re w >= 0, w != 0 when n == 1.
pub fn exp_integral_e(n: u32, w: Complex64) -> Complex64 {
    assert!(n >= 1, "E_n needs n >= 1");
    if w.norm() == 0.0 {
        assert!(n > 1, "E_1 diverges at 0");
        return Complex64::new(1.0 / f64::from(n - 1), 0.0);
    }
    if w.norm() < 1.0 {
        let mut e = e1_series(w);
        let ew = (-w).exp();
        for k in 1..n {
            e = (ew - w * e) / f64::from(k);
        }
        e
    } else {
        en_continued_fraction(n, w)
    }
}

fn e1_series(w: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..200 {
        let kf = f64::from(k);
        term *= -w / kf;
        let add = term / kf;
        sum += add;
        if add.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    -EULER_GAMMA - w.ln() - sum
}

// Modified Lentz evaluation of the continued fraction
// E_n(w) = e^{-w} / (w + n - 1*n / (w + n + 2 - 2(n+1) / (w + n + 4 - ...))).
fn en_continued_fraction(n: u32, w: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let nf = f64::from(n);
    let mut b = w + nf;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..100_000 {
        let fi = f64::from(i);
        let an = -fi * (nf - 1.0 + fi);
        b += 2.0;
        d = an * d + b;
        if d.norm() < tiny {
            d = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        c = b + an / c;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-w).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(n: u32, w: Complex64, re: f64, im: f64) {
        let got = exp_integral_e(n, w);
        let want = Complex64::new(re, im);
        assert!(
            (got - want).norm() <= 1e-12 * want.norm(),
            "E_{n}({w}) = {got}, want {want}"
        );
    }

    // Reference values: mpmath.expint at 30 digits.
    #[test]
    fn matches_reference_values() {
        let i = |v: f64| Complex64::new(0.0, v);
        check(1, i(0.3), 0.64917293297116178031, -1.2722922829878534688);
        check(1, i(1.5), -0.47035631719539988668, -0.24611279562277693886);
        check(1, i(4000.0), 0.0001708303054420159113, 0.00018252943604757922586);
        check(1, i(-7.0), -0.076695278482184518383, 0.11619971254680302862);
        check(1, Complex64::new(0.5, 0.2), 0.49276871233198506069, -0.22342522586908422747);
        check(2, i(0.3), 0.57364880422924999641, -0.49027208655268809138);
        check(2, i(0.9), -0.017683086173978877099, -0.5348658622064878082);
        check(2, i(40.0), -0.01938635925674634261, 0.015687155369001891492);
        check(2, i(1e-6), 0.9999984292041732051, -0.000014238294893062823978);
        check(3, i(1.5), -0.18360178227436449565, -0.27492349947718034182);
        check(3, i(4000.0), 0.00017073895542880149747, 0.00018261475982366480683);
        check(3, i(-7.0), -0.043467645530588796937, 0.12025823216428657759);
        check(4, i(0.3), 0.29506475397869628065, -0.13891947871176983338);
        check(4, i(0.9), 0.092091502946252781651, -0.28214357371855161125);
        check(4, i(40.0), -0.020037955280721165294, 0.014641259121458302488);
        check(4, i(1e-6), 0.3333333333328333336, -4.9999999999748803934e-7);
    }

    #[test]
    fn value_at_origin() {
        assert_eq!(exp_integral_e(3, Complex64::new(0.0, 0.0)), Complex64::new(0.5, 0.0));
    }
}
