//! SINR distribution by Gil-Pelaez inversion.
//!
//! With `Y = X/x − I − ν` and `M(z) = E exp(−zV)`,
//!
//! ```text
//! P(γ > x) = P(Y > 0) = (1 − a)/2 + (1/π) ∫_0^∞ Im[(M_X(−js/x) − a) M_I(js) e^{−jsν}] ds/s
//! ```
//!
//! where `a = P(X = 0)` is split off so the integrand decays even when the
//! interference is absent. The integral is taken in `u = ln s` over the
//! region where the integrand is not negligible, on half-decade panels
//! further split at the noise half-period `π/ν`.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;

use super::quadrature::{integrate_panels, QuadratureSpec};
use super::table::{ConditionedTable, ExponentTable};
use crate::error::{Error, Result};
use crate::gamma_approx::{gamma_sum_mgf, GammaTerm};

/// A nonnegative random variable described by its MGF on `Re z ≥ 0`.
pub trait Mgf {
    fn mgf(&self, z: Complex64) -> Complex64;

    /// `P(V = 0)`.
    fn atom_at_zero(&self) -> f64 {
        0.0
    }
}

impl Mgf for ExponentTable {
    fn mgf(&self, z: Complex64) -> Complex64 {
        ExponentTable::mgf(self, z)
    }
}

impl Mgf for ConditionedTable {
    fn mgf(&self, z: Complex64) -> Complex64 {
        self.conditional_mgf(z)
    }
}

impl Mgf for Vec<GammaTerm> {
    fn mgf(&self, z: Complex64) -> Complex64 {
        gamma_sum_mgf(self, z)
    }

    fn atom_at_zero(&self) -> f64 {
        if self.iter().all(|t| t.beta == 0.0) {
            1.0
        } else {
            0.0
        }
    }
}

impl Mgf for GammaTerm {
    fn mgf(&self, z: Complex64) -> Complex64 {
        GammaTerm::mgf(self, z)
    }
}

/// Identically zero variable (switched-off interference).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zero;

impl Mgf for Zero {
    fn mgf(&self, _z: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn atom_at_zero(&self) -> f64 {
        1.0
    }
}

/// A table-backed signal with a known mass at zero.
#[derive(Debug, Clone, Copy)]
pub struct WithAtom<'a> {
    pub table: &'a ExponentTable,
    pub atom: f64,
}

impl Mgf for WithAtom<'_> {
    fn mgf(&self, z: Complex64) -> Complex64 {
        self.table.mgf(z)
    }

    fn atom_at_zero(&self) -> f64 {
        self.atom
    }
}

/// Result of one inversion; `cdf` is not clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfEstimate {
    pub cdf: f64,
    /// Quadrature error estimate.
    pub error: f64,
    /// Bound on the neglected integrand outside the integration window.
    pub tail: f64,
    pub evaluations: usize,
}

impl CdfEstimate {
    pub fn ccdf(&self) -> f64 {
        1.0 - self.cdf
    }

    pub fn clamped(&self) -> f64 {
        self.cdf.clamp(0.0, 1.0)
    }
}

const SCAN_FROM: f64 = -40.0;
const NEGLIGIBLE: f64 = 1e-13;
const MAX_PANELS: usize = 20_000;

/// `P(γ ≤ x)` with `γ = X / (Σ I + ν)`.
pub fn gil_pelaez_cdf(
    x: f64,
    signal: &dyn Mgf,
    interference: &[&dyn Mgf],
    noise: f64,
    quad: &QuadratureSpec,
) -> Result<CdfEstimate> {
    quad.validate()?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::param("x", format!("SINR threshold must be finite and > 0, got {x}")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::param("noise", format!("must be >= 0, got {noise}")));
    }
    let atom = signal.atom_at_zero();
    let continuous = 1.0 - atom;
    if continuous <= 0.0 {
        return Ok(CdfEstimate { cdf: 1.0, error: 0.0, tail: 0.0, evaluations: 0 });
    }
    let phi = |u: f64| -> Complex64 {
        let s = u.exp();
        let mut v = signal.mgf(Complex64::new(0.0, -s / x)) - atom;
        for i in interference {
            v *= i.mgf(Complex64::new(0.0, s));
        }
        v * Complex64::new(0.0, -s * noise).exp()
    };

    // half-decade scan for the window where the integrand matters; with
    // noise, the oscillation makes the remainder past s at most ~|φ|/(sν)
    let step = 0.5 * LN_10;
    let u_end = quad.s_truncation.ln();
    let n = ((u_end - SCAN_FROM * LN_10) / step).ceil() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|i| SCAN_FROM * LN_10 + step * i as f64).collect();
    let envelope: Vec<f64> = grid
        .iter()
        .map(|&u| {
            let v = phi(u);
            let damping = if noise > 0.0 { (1.0 / (u.exp() * noise)).min(1.0) } else { 1.0 };
            v.norm().min((v - continuous).norm()) * damping
        })
        .collect();
    let mut evaluations = n;
    let active: Vec<usize> = (0..n).filter(|&i| envelope[i] > NEGLIGIBLE).collect();
    let (Some(&first), Some(&last)) = (active.first(), active.last()) else {
        return Ok(CdfEstimate {
            cdf: 1.0 - continuous / 2.0,
            error: 0.0,
            tail: envelope.iter().cloned().fold(0.0, f64::max),
            evaluations,
        });
    };
    let lo = first.saturating_sub(1);
    let mut hi = (last + 1).min(n - 1);

    let mut breaks = Vec::new();
    for i in lo..hi {
        let (a, b) = (grid[i], grid[i + 1]);
        if noise > 0.0 {
            let (sa, sb) = (a.exp(), b.exp());
            let halves = ((sb - sa) * noise / PI).floor();
            if breaks.len() as f64 + halves + 1.0 >= MAX_PANELS as f64 {
                hi = i;
                break;
            }
            breaks.push(a);
            let halves = halves as usize;
            for k in 1..=halves {
                let s = sa + k as f64 * (sb - sa) / (halves + 1) as f64;
                breaks.push(s.ln());
            }
        } else {
            breaks.push(a);
        }
    }
    breaks.push(grid[hi]);

    // leading integration-by-parts term of ∫_S^∞ φ(s) ds/s when the
    // window was cut short inside the oscillatory region
    let s_end = grid[hi].exp();
    let (remainder, tail) = if noise > 0.0 && s_end * noise > 1.0 {
        let v = phi(grid[hi]);
        evaluations += 1;
        ((v / Complex64::new(0.0, noise * s_end)).im, 2.0 * v.norm() / (noise * s_end).powi(2))
    } else if hi == n - 1 {
        (0.0, envelope[hi].max(envelope[lo]))
    } else {
        // envelopes decay at least like e^{δu} beyond the window
        (0.0, 10.0 * envelope[lo].max(envelope[hi]))
    };

    let spec = QuadratureSpec {
        rel_tol: quad.rel_tol,
        abs_tol: quad.abs_tol,
        max_subdivisions: quad.max_subdivisions.max(breaks.len()),
        s_truncation: quad.s_truncation,
    };
    let mut f = |u: f64| phi(u).im;
    let est = integrate_panels(&mut f, &breaks, &spec);
    evaluations += est.evaluations;
    let ccdf = continuous / 2.0 + (est.value + remainder) / PI;
    Ok(CdfEstimate { cdf: 1.0 - ccdf, error: est.error / PI, tail: tail / PI, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma_lr;

    #[test]
    fn gamma_signal_without_interference() {
        let x_var = GammaTerm::new(1.0, 7.5, 1.0).unwrap();
        let quad = QuadratureSpec::with_tol(1e-8, 1e-10);
        for thr in [0.5, 3.0, 7.5, 12.0] {
            let got = gil_pelaez_cdf(thr, &x_var, &[], 1.0, &quad).unwrap();
            let want = gamma_lr(7.5, thr);
            assert!((got.cdf - want).abs() < 1e-7, "{thr}: {} vs {want}", got.cdf);
        }
    }

    #[test]
    fn exponential_signal_and_interference() {
        // X ~ Exp(1), I ~ Exp(b), ν = 0: P(X > x I) = 1/(1 + x b)
        let x_var = GammaTerm::new(1.0, 1.0, 1.0).unwrap();
        let i_var = GammaTerm::new(0.4, 1.0, 1.0).unwrap();
        let quad = QuadratureSpec::with_tol(1e-9, 1e-11);
        for thr in [0.1, 1.0, 10.0] {
            let got = gil_pelaez_cdf(thr, &x_var, &[&i_var], 0.0, &quad).unwrap();
            assert!((got.ccdf() - 1.0 / (1.0 + 0.4 * thr)).abs() < 1e-7);
        }
    }

    #[test]
    fn atom_in_signal_is_outage_mass() {
        // X = 0 with probability a, otherwise Exp(1); noise 1
        struct Mixed(f64);
        impl Mgf for Mixed {
            fn mgf(&self, z: Complex64) -> Complex64 {
                self.0 + (1.0 - self.0) / (1.0 + z)
            }
            fn atom_at_zero(&self) -> f64 {
                self.0
            }
        }
        let quad = QuadratureSpec::with_tol(1e-9, 1e-11);
        let got = gil_pelaez_cdf(2.0, &Mixed(0.3), &[], 1.0, &quad).unwrap();
        assert!((got.ccdf() - 0.7 * (-2.0f64).exp()).abs() < 1e-7, "{}", got.ccdf());
    }

    #[test]
    fn rejects_non_positive_threshold() {
        let x_var = GammaTerm::new(1.0, 2.0, 1.0).unwrap();
        assert!(gil_pelaez_cdf(0.0, &x_var, &[], 1.0, &QuadratureSpec::default()).is_err());
    }
}
