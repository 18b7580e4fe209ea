//! Gamma helpers and the Gauss hypergeometric function at complex argument.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

const SERIES_MAX_TERMS: usize = 20_000;
const ODE_MAX_STEPS: usize = 20_000;

/// `true` when `x` is a non-positive integer.
pub fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `1 / Γ(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `(ln|Γ(x)|, sign Γ(x))`; `x` must not be a pole.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        (ln_gamma(x), 1.0)
    } else {
        let s = (PI * x).sin();
        (PI.ln() - s.abs().ln() - ln_gamma(1.0 - x), s.signum())
    }
}

/// `ln(1 + x)` accurate for small `|x|`.
pub fn ln_1p(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        // alternating series to x^6
        let mut term = x;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..=6 {
            sum += term / k as f64 * if k % 2 == 1 { 1.0 } else { -1.0 };
            term *= x;
        }
        sum
    } else {
        (1.0 + x).ln()
    }
}

/// `exp(x) - 1` accurate for small `|x|`.
pub fn exp_m1(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        let mut term = x;
        let mut sum = x;
        for k in 2..=7 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        x.exp() - 1.0
    }
}

/// Which evaluation route [`hyp2f1_traced`] took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hyp2f1Route {
    Polynomial,
    Series,
    Pfaff,
    Reciprocal,
    Continuation,
}

/// Partial sums of the Gauss series; errors if it has not settled.
fn gauss_series(a: f64, b: f64, c: f64, z: Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut quiet = 0;
    for n in 0..SERIES_MAX_TERMS {
        let n = n as f64;
        term *= z * ((a + n) * (b + n) / ((c + n) * (n + 1.0)));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            quiet += 1;
            if quiet == 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
        if term.norm() == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::Domain(format!("2F1({a}, {b}; {c}; {z}) series did not converge")))
}

fn polynomial(a: f64, b: f64, c: f64, z: Complex64) -> Complex64 {
    let m = -(if is_nonpositive_integer(a) { a } else { b }) as usize;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..m {
        let n = n as f64;
        term *= z * ((a + n) * (b + n) / ((c + n) * (n + 1.0)));
        sum += term;
    }
    sum
}

fn near_integer(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() < tol
}

/// `Γ(c) Γ(d1) / (Γ(n1) Γ(n2))` with signs, zero if a denominator is at a pole.
fn gamma_ratio(c: f64, d1: f64, n1: f64, n2: f64) -> f64 {
    if is_nonpositive_integer(n1) || is_nonpositive_integer(n2) {
        return 0.0;
    }
    let (lc, sc) = ln_gamma_signed(c);
    let (ld, sd) = ln_gamma_signed(d1);
    let (l1, s1) = ln_gamma_signed(n1);
    let (l2, s2) = ln_gamma_signed(n2);
    sc * sd * s1 * s2 * (lc + ld - l1 - l2).exp()
}

fn reciprocal(a: f64, b: f64, c: f64, z: Complex64) -> Result<Complex64> {
    let w = 1.0 / z;
    let mz = -z;
    let t1 = gamma_ratio(c, b - a, b, c - a) * mz.powf(-a) * gauss_series(a, a - c + 1.0, a - b + 1.0, w)?;
    let t2 = gamma_ratio(c, a - b, a, c - b) * mz.powf(-b) * gauss_series(b, b - c + 1.0, b - a + 1.0, w)?;
    Ok(t1 + t2)
}

/// Taylor re-expansion of the hypergeometric ODE along a polyline.
fn continuation(a: f64, b: f64, c: f64, z: Complex64) -> Result<Complex64> {
    let start = z * (0.5 / z.norm());
    let mut f = gauss_series(a, b, c, start)?;
    let mut df = gauss_series(a + 1.0, b + 1.0, c + 1.0, start)? * (a * b / c);
    let one = Complex64::new(1.0, 0.0);

    // detour around the branch point when the straight path grazes it
    let mut waypoints = Vec::with_capacity(2);
    let dir = z - start;
    let t = ((one - start) * dir.conj()).re / dir.norm_sqr();
    let closest = start + dir * t.clamp(0.0, 1.0);
    if (closest - one).norm() < 0.25 {
        let side = if z.im < 0.0 { -1.0 } else { 1.0 };
        waypoints.push(Complex64::new(1.0, 0.6 * side));
    }
    waypoints.push(z);

    let mut here = start;
    let mut steps = 0;
    for target in waypoints {
        while (target - here).norm() > 0.0 {
            steps += 1;
            if steps > ODE_MAX_STEPS {
                return Err(Error::Domain(format!("2F1 continuation to {z} did not terminate")));
            }
            let radius = here.norm().min((here - one).norm());
            let remaining = (target - here).norm();
            let h =
                if remaining <= 0.5 * radius { target - here } else { (target - here) * (0.5 * radius / remaining) };
            let z0 = here;
            let denom = z0 * (one - z0);
            let (mut c0, mut c1) = (f, df);
            let mut hn = one;
            let mut val = c0 + c1 * h;
            let mut der = c1;
            let mut quiet = 0;
            for n in 0..2000usize {
                let nf = n as f64;
                let c2 = -((nf + 1.0) * ((1.0 - 2.0 * z0) * nf + c - (a + b + 1.0) * z0) * c1
                    - (nf + a) * (nf + b) * c0)
                    / (denom * ((nf + 2.0) * (nf + 1.0)));
                hn *= h;
                let tv = c2 * hn * h;
                let td = c2 * hn * (nf + 2.0);
                val += tv;
                der += td;
                if tv.norm() <= 1e-17 * val.norm() && td.norm() <= 1e-17 * der.norm().max(val.norm()) {
                    quiet += 1;
                    if quiet == 3 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                c0 = c1;
                c1 = c2;
            }
            f = val;
            df = der;
            here = if h == target - here { target } else { here + h };
        }
    }
    Ok(f)
}

/// Gauss hypergeometric function `₂F₁(a, b; c; z)` for real parameters and
/// complex argument, principal branch (cut along `[1, ∞)`).
pub fn hyp2f1(a: f64, b: f64, c: f64, z: Complex64) -> Result<Complex64> {
    hyp2f1_traced(a, b, c, z).map(|(v, _)| v)
}

pub fn hyp2f1_traced(a: f64, b: f64, c: f64, z: Complex64) -> Result<(Complex64, Hyp2f1Route)> {
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("2F1 undefined for c = {c}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("2F1 argument {z} is not finite")));
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return Ok((polynomial(a, b, c, z), Hyp2f1Route::Polynomial));
    }
    if z.norm() <= 0.75 {
        return Ok((gauss_series(a, b, c, z)?, Hyp2f1Route::Series));
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::Domain(format!("2F1 argument {z} lies on the branch cut")));
    }
    let one = Complex64::new(1.0, 0.0);
    let pfaff = z / (z - one);
    if pfaff.norm() <= 0.75 {
        let v = (one - z).powf(-b) * gauss_series(c - a, b, c, pfaff)?;
        return Ok((v, Hyp2f1Route::Pfaff));
    }
    if z.norm() >= 1.33 && !near_integer(b - a, 1e-3) {
        return Ok((reciprocal(a, b, c, z)?, Hyp2f1Route::Reciprocal));
    }
    Ok((continuation(a, b, c, z)?, Hyp2f1Route::Continuation))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_term() {
        assert_eq!(hyp2f1(0.3, 1.7, 2.2, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn logarithm_identity() {
        // ₂F₁(1,1;2;z) = -ln(1-z)/z
        let v = hyp2f1(1.0, 1.0, 2.0, c(0.5, 0.0)).unwrap();
        assert!((v.re - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        for z in [c(-3.0, 0.0), c(0.9, 0.3), c(-20.0, 5.0), c(0.5, 0.866), c(2.0, -1e-3)] {
            let want = -(c(1.0, 0.0) - z).ln() / z;
            let (got, route) = hyp2f1_traced(1.0, 1.0, 2.0, z).unwrap();
            assert!((got - want).norm() < 1e-12 * want.norm(), "{z} {route:?}: {got} vs {want}");
        }
    }

    #[test]
    fn binomial_identity_in_every_route() {
        // ₂F₁(a,b;b;z) = (1-z)^{-a}
        let a = 0.37;
        for z in [c(0.2, 0.1), c(-2.0, 0.5), c(-40.0, -3.0), c(0.5, -0.86), c(1.1, 0.4), c(3.0, 2.0)] {
            let want = (c(1.0, 0.0) - z).powf(-a);
            let got = hyp2f1(a, 1.3, 1.3, z).unwrap();
            assert!((got - want).norm() < 1e-12 * want.norm(), "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn continuation_matches_reciprocal_formula() {
        for z in [c(-1.0, 0.2), c(0.6, 0.9), c(1.2, 0.5), c(-5.0, 3.0)] {
            let r = reciprocal(0.25, 1.6, 2.9, z).unwrap();
            let o = continuation(0.25, 1.6, 2.9, z).unwrap();
            assert!((r - o).norm() < 1e-11 * r.norm(), "{z}: {r} vs {o}");
        }
    }

    #[test]
    fn degenerate_b_minus_a_uses_continuation() {
        // ₂F₁(1,2;3;z) = 2(-z - ln(1-z))/z² ... b - a = 1
        let z = c(-6.0, 2.0);
        let (v, route) = hyp2f1_traced(1.0, 2.0, 3.0, z).unwrap();
        assert_eq!(route, Hyp2f1Route::Continuation);
        let want = (-z - (c(1.0, 0.0) - z).ln()) * 2.0 / (z * z);
        assert!((v - want).norm() < 1e-11 * want.norm());
    }

    #[test]
    fn polynomial_case() {
        // ₂F₁(-2,b;c;z) = 1 - 2bz/c + b(b+1)z²/(c(c+1))
        let (b, cc, z) = (1.5, 2.5, c(7.0, -3.0));
        let want = c(1.0, 0.0) - z * (2.0 * b / cc) + z * z * (b * (b + 1.0) / (cc * (cc + 1.0)));
        assert!((hyp2f1(-2.0, b, cc, z).unwrap() - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn rejects_invalid_input() {
        assert!(hyp2f1(1.0, 1.0, -2.0, c(0.1, 0.0)).is_err());
        assert!(hyp2f1(0.5, 0.5, 1.5, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn small_argument_helpers() {
        let x = c(3e-5, -2e-5);
        let direct = (c(1.0, 0.0) + x).ln();
        assert!((ln_1p(x) - direct).norm() < 1e-15);
        assert!((exp_m1(ln_1p(x)) - x).norm() < 1e-20);
        assert!((exp_m1(c(0.5, 0.2)) - (c(0.5, 0.2).exp() - 1.0)).norm() < 1e-15);
    }

    #[test]
    fn gamma_helpers() {
        assert_eq!(rgamma(-3.0), 0.0);
        assert!((rgamma(0.5) - 1.0 / PI.sqrt()).abs() < 1e-15);
        let (l, s) = ln_gamma_signed(-0.5);
        assert!((s * l.exp() + 2.0 * PI.sqrt()).abs() < 1e-13);
    }
}
