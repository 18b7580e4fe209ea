//! The two radial integrals every PGFL exponent reduces to:
//!
//! ```text
//! F1(z,p,α,P,Q,T) = ∫_0^T (1 − (1 + z p Q r^−α)^−P) r dr
//! F2(z,p,α,P,Q,T) = ∫_T^∞ (1 − (1 + z p Q r^−α)^−P) r dr
//! ```
//!
//! Both are incomplete Beta functions of `w = z p Q / T^α`. Each is summed
//! with a hypergeometric series whose argument stays inside `|x| ≤ 1/√2`
//! (`w/(1+w)` when `|w| ≤ 1`, `1/(1+w)` otherwise); the other integral
//! follows from the complete value
//! `F1 + F2 = ½ (zpQ)^{2/α} Γ(1 − 2/α) Γ(P + 2/α) / Γ(P)`.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::quadrature::{integrate_panels, QuadratureSpec};
use super::special::{exp_m1, ln_1p};
use crate::error::{Error, Result};

const MAX_TERMS: usize = 4000;

/// Validated parameters shared by both integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Radial {
    c: Complex64,
    alpha: f64,
    delta: f64,
    shape: f64,
}

impl Radial {
    fn new(z: Complex64, p: f64, alpha: f64, shape: f64, scale: f64) -> Result<Self> {
        if !(alpha > 2.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("radial integrals diverge unless alpha > 2, got {alpha}")));
        }
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::param("P", format!("must be > 0, got {shape}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("Q", format!("must be > 0, got {scale}")));
        }
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::param("p", format!("must be >= 0, got {p}")));
        }
        if !(z.re >= 0.0 && z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("MGF argument {z} must have a non-negative real part")));
        }
        Ok(Self { c: z * (p * scale), alpha, delta: 2.0 / alpha, shape })
    }

    /// `F1 + F2` over the whole half-line.
    fn complete(&self) -> Complex64 {
        let d = self.delta;
        let g = (ln_gamma(1.0 - d) + ln_gamma(self.shape + d) - ln_gamma(self.shape)).exp();
        0.5 * g * self.c.powf(d)
    }

    /// `F2` for `|w| ≤ 1`.
    fn outer_series(&self, t: f64, w: Complex64) -> Result<Complex64> {
        let (d, pp) = (self.delta, self.shape);
        let q = w / (1.0 + w);
        let (mut a, mut b) = (1.0, 1.0);
        let mut qn = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut quiet = 0;
        for n in 1..MAX_TERMS {
            let nf = n as f64;
            a *= (nf - d) / nf;
            b *= (nf - pp - d) / nf;
            qn *= q;
            let term = qn * ((a - b) / (nf - d));
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                quiet += 1;
                if quiet == 3 {
                    return Ok(0.5 * t * t * d * (1.0 + w).powf(d) * sum);
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::Domain(format!("outer radial series did not settle at w = {w}")))
    }

    /// `F1` for `|w| ≥ 1`.
    fn inner_series(&self, t: f64, w: Complex64) -> Result<Complex64> {
        let (d, pp) = (self.delta, self.shape);
        let q = w / (1.0 + w);
        let x = 1.0 / (1.0 + w);
        let mut coef = 1.0;
        let mut xn = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(1.0 / (pp + d), 0.0);
        let mut quiet = 0;
        for n in 1..MAX_TERMS {
            let nf = n as f64;
            coef *= (nf + d) / nf;
            xn *= x;
            let term = xn * (coef / (pp + d + nf));
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                quiet += 1;
                if quiet == 3 {
                    let tail = d * q.powf(d) * x.powf(pp) * sum;
                    return Ok(0.5 * t * t * (1.0 - tail));
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::Domain(format!("inner radial series did not settle at w = {w}")))
    }
}

fn check_radius(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("T", format!("must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// `∫_0^T (1 − (1 + z p Q r^−α)^−P) r dr`; `Re z ≥ 0`.
pub fn f1_integral(z: Complex64, p: f64, alpha: f64, shape: f64, scale: f64, t: f64) -> Result<Complex64> {
    let rad = Radial::new(z, p, alpha, shape, scale)?;
    check_radius(t)?;
    if rad.c == Complex64::new(0.0, 0.0) || t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let w = rad.c / t.powf(alpha);
    if w.norm() >= 1.0 {
        rad.inner_series(t, w)
    } else {
        Ok(rad.complete() - rad.outer_series(t, w)?)
    }
}

/// `∫_T^∞ (1 − (1 + z p Q r^−α)^−P) r dr`; `Re z ≥ 0`, `T = 0` allowed.
pub fn f2_integral(z: Complex64, p: f64, alpha: f64, shape: f64, scale: f64, t: f64) -> Result<Complex64> {
    let rad = Radial::new(z, p, alpha, shape, scale)?;
    check_radius(t)?;
    if rad.c == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if t == 0.0 {
        return Ok(rad.complete());
    }
    let w = rad.c / t.powf(alpha);
    if w.norm() >= 1.0 {
        Ok(rad.complete() - rad.inner_series(t, w)?)
    } else {
        rad.outer_series(t, w)
    }
}

/// `1 − (1 + ε)^−P` without cancellation for small `ε`.
fn radial_integrand(eps: Complex64, shape: f64) -> Complex64 {
    -exp_m1(-shape * ln_1p(eps))
}

fn oracle_spec() -> QuadratureSpec {
    QuadratureSpec { rel_tol: 1e-13, abs_tol: 1e-300, max_subdivisions: 4000, ..QuadratureSpec::default() }
}

/// Direct adaptive quadrature of the F1 defining integral (test oracle).
pub fn f1_quadrature(z: Complex64, p: f64, alpha: f64, shape: f64, scale: f64, t: f64) -> Result<Complex64> {
    let rad = Radial::new(z, p, alpha, shape, scale)?;
    check_radius(t)?;
    if rad.c.norm() == 0.0 || t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // r = T e^{-x}; below r_min the integrand is 1 to working precision
    let r_min = t.min(rad.c.norm().powf(1.0 / alpha)) * 1e-7;
    let x_max = (t / r_min).ln();
    let knee = (t / rad.c.norm().powf(1.0 / alpha)).ln().clamp(0.0, x_max);
    let mut f = |x: f64| {
        let r = t * (-x).exp();
        radial_integrand(rad.c * r.powf(-alpha), shape) * (r * r)
    };
    let est = integrate_panels(&mut f, &[0.0, knee, x_max], &oracle_spec()).require()?;
    let head = 0.5 * r_min * r_min;
    Ok(est.value + head)
}

/// Direct adaptive quadrature of the F2 defining integral (test oracle).
pub fn f2_quadrature(z: Complex64, p: f64, alpha: f64, shape: f64, scale: f64, t: f64) -> Result<Complex64> {
    let rad = Radial::new(z, p, alpha, shape, scale)?;
    check_radius(t)?;
    if rad.c.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let knee_r = rad.c.norm().powf(1.0 / alpha);
    let lower = if t > 0.0 { t } else { knee_r * 1e-7 };
    // beyond r_max, |c| r^-α ≤ 1e-10 and a two-term expansion is exact enough
    let r_max = lower.max(knee_r * 1e10f64.powf(1.0 / alpha));
    let x_max = (r_max / lower).ln();
    let knee = (knee_r / lower).ln().clamp(0.0, x_max);
    let mut f = |x: f64| {
        let r = lower * x.exp();
        radial_integrand(rad.c * r.powf(-alpha), shape) * (r * r)
    };
    let est = integrate_panels(&mut f, &[0.0, knee, x_max], &oracle_spec()).require()?;
    let eps = rad.c * r_max.powf(-alpha);
    let tail = r_max
        * r_max
        * (eps * (shape / (alpha - 2.0)) - eps * eps * (shape * (shape + 1.0) / (2.0 * (2.0 * alpha - 2.0))));
    let head = if t > 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.5 * lower * lower, 0.0) };
    Ok(est.value + tail + head)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn zero_argument_gives_zero() {
        assert_eq!(f1_integral(c(0.0, 0.0), 0.2, 4.0, 7.5, 1.0, 1.0).unwrap(), c(0.0, 0.0));
        assert_eq!(f2_integral(c(0.0, 0.0), 0.1, 4.0, 1.0, 1.0, 1.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn real_argument_f1_is_bounded() {
        for z in [1e-3, 0.3, 4.0, 1e3] {
            let v = f1_integral(c(z, 0.0), 0.2, 4.0, 7.5, 1.0, 1.0).unwrap();
            assert!(v.re > 0.0 && v.re <= 0.5 && v.im.abs() < 1e-15, "{z}: {v}");
        }
    }

    #[test]
    fn alpha_at_most_two_diverges() {
        assert!(matches!(
            f2_integral(c(0.0, 1.0), 0.1, 2.0, 1.0, 1.0, 1.0),
            Err(Error::Parameter { name: "alpha", .. })
        ));
    }

    #[test]
    fn exponential_case_has_arctan_form() {
        // α = 4, P = 1: F2 = ½ √c arctan-type closed form, F2(T) = ½√c (π/2 − atan(T²/√c)) for real c
        let cc: f64 = 0.37;
        let t = 0.8;
        let want = 0.5 * cc.sqrt() * (std::f64::consts::FRAC_PI_2 - (t * t / cc.sqrt()).atan());
        let got = f2_integral(c(cc, 0.0), 1.0, 4.0, 1.0, 1.0, t).unwrap();
        assert!((got.re - want).abs() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn golden_values_against_quadrature() {
        let a = f1_integral(c(0.0, 1.0), 0.2, 4.0, 7.5, 1.0, 1.0).unwrap();
        let b = f1_quadrature(c(0.0, 1.0), 0.2, 4.0, 7.5, 1.0, 1.0).unwrap();
        assert!(rel(a, b) < 1e-10, "{a} vs {b}");
        let a = f2_integral(c(0.0, 1.0), 0.1, 4.0, 1.0, 1.0, 1.0).unwrap();
        let b = f2_quadrature(c(0.0, 1.0), 0.1, 4.0, 1.0, 1.0, 1.0).unwrap();
        assert!(rel(a, b) < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn both_regimes_agree_at_the_switch() {
        for w in [c(0.999_999, 0.0), c(0.0, 1.000_001), c(0.6, 0.8)] {
            let f1 = f1_integral(w, 1.0, 3.5, 8.0, 1.0, 1.0).unwrap();
            let f2 = f2_integral(w, 1.0, 3.5, 8.0, 1.0, 1.0).unwrap();
            let total = f2_integral(w, 1.0, 3.5, 8.0, 1.0, 0.0).unwrap();
            assert!(rel(f1 + f2, total) < 1e-13);
            assert!(rel(f1, f1_quadrature(w, 1.0, 3.5, 8.0, 1.0, 1.0).unwrap()) < 1e-10);
        }
    }
}
