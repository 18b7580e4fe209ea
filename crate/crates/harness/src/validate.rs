//! Oracle cross-checks (`validate`) and special-function golden values
//! (`selftest`).

use std::f64::consts::{LN_2, PI};
use std::fmt;

use fdcran_core::analytic::special::{exp_m1, ln_1p, ln_gamma_signed, rgamma};
use fdcran_core::analytic::{
    f1_integral, f1_quadrature, f2_integral, f2_quadrature, gil_pelaez_cdf, hyp2f1, se_cutset, se_infinite_fronthaul,
    se_user_centric, QuadratureSpec,
};
use fdcran_core::beamforming::{zf_decoder, zf_precoder};
use fdcran_core::channel::sample_rayleigh_matrix;
use fdcran_core::gamma_approx::GammaTerm;
use fdcran_core::{Clustering, NetworkConfig};
use num_complex::Complex64;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }

    fn from_result(name: &str, r: fdcran_core::Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// `(α, P, z)` grid for the radial integrals: 100 points with real,
/// imaginary and diagonal arguments.
pub fn radial_grid() -> Vec<(f64, f64, Complex64)> {
    let mut grid = Vec::with_capacity(100);
    for alpha in [3.0, 3.5, 4.0] {
        for shape in [0.125, 1.0, 7.125, 8.0] {
            for mag in [1e-2, 1.0, 1e2, 1e3] {
                grid.push((alpha, shape, Complex64::new(mag, 0.0)));
                grid.push((alpha, shape, Complex64::new(0.0, mag)));
            }
        }
    }
    for mag in [1e-2, 1.0, 1e2, 1e3] {
        grid.push((3.5, 1.0, Complex64::from_polar(mag, PI / 4.0)));
    }
    grid
}

/// Largest relative gap between the closed forms and quadrature on
/// [`radial_grid`], over `(p, T)` in {(0.2, 0.7), (0.1, 2)}.
pub fn radial_duality_error() -> fdcran_core::Result<f64> {
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
    let mut worst = 0f64;
    for (alpha, shape, z) in radial_grid() {
        for (p, t) in [(0.2, 0.7), (0.1, 2.0)] {
            worst =
                worst.max(rel(f1_integral(z, p, alpha, shape, 1.0, t)?, f1_quadrature(z, p, alpha, shape, 1.0, t)?));
            worst =
                worst.max(rel(f2_integral(z, p, alpha, shape, 1.0, t)?, f2_quadrature(z, p, alpha, shape, 1.0, t)?));
        }
    }
    Ok(worst)
}

/// Largest `|F_GP(x) - P(κ, xν/θ)|` over 50 log-spaced thresholds for a
/// Gamma signal without interference.
pub fn gil_pelaez_gamma_error(kappa: f64, theta: f64, noise: f64, quad: &QuadratureSpec) -> fdcran_core::Result<f64> {
    let signal = GammaTerm::new(1.0, kappa, theta)?;
    let mut worst = 0f64;
    for i in 0..50 {
        let x = 10f64.powf(-2.0 + 4.0 * i as f64 / 49.0);
        let got = gil_pelaez_cdf(x, &signal, &[], noise, quad)?;
        worst = worst.max((got.cdf - signal.cdf(x * noise)).abs());
    }
    Ok(worst)
}

/// Largest `|se_cutset(step at γ, C) - min(ln(1+γ), C)|` over a few cases.
pub fn cutset_step_error() -> fdcran_core::Result<f64> {
    let quad = QuadratureSpec { rel_tol: 1e-13, abs_tol: 1e-13, max_subdivisions: 1000, ..QuadratureSpec::default() };
    let mut worst = 0f64;
    for (g, c) in [(3.0f64, 10.0), (3.0, 0.5), (1e4, 40.0), (0.2, f64::INFINITY)] {
        let got = se_cutset(|x| Ok(if x < g { 0.0 } else { 1.0 }), c, &quad)?;
        worst = worst.max((got.value - g.ln_1p().min(c)).abs());
    }
    Ok(worst)
}

/// Relative gap between the cut-set bound at `C = 40` and the
/// unconstrained-fronthaul SE (DL, UL) for user-centric clustering.
pub fn saturated_fronthaul_gap(cfg: &NetworkConfig, quad: &QuadratureSpec) -> fdcran_core::Result<(f64, f64)> {
    let bounded = se_user_centric(&NetworkConfig { c_d: 40.0, c_u: 40.0, ..cfg.clone() }, quad)?;
    let free = se_infinite_fronthaul(cfg, Clustering::UserCentric)?;
    Ok(((bounded.dl_se - free.dl_se).abs() / free.dl_se, (bounded.ul_se - free.ul_se).abs() / free.ul_se))
}

/// Largest off-diagonal `|g_j v_k|` and `|w_k h_j|` over random draws.
pub fn zf_leakage(draws: u64) -> fdcran_core::Result<f64> {
    let mut worst = 0f64;
    for seed in 0..draws {
        let g = sample_rayleigh_matrix(3, 8, seed)?;
        let p = zf_precoder(&g)?;
        let h = sample_rayleigh_matrix(8, 3, seed + draws)?;
        let d = zf_decoder(&h)?;
        for j in 0..3 {
            for k in 0..3 {
                if j == k {
                    continue;
                }
                let gv: Complex64 = g.row(j).iter().zip(p.column(k)).map(|(a, b)| a * b).sum();
                let wh: Complex64 = d.row(k).iter().zip(h.column(j).iter()).map(|(a, b)| a * b).sum();
                worst = worst.max(gv.norm()).max(wh.norm());
            }
        }
    }
    Ok(worst)
}

/// Oracle cross-check suites. The saturated-fronthaul check evaluates the
/// full cut-set bound and takes several seconds.
pub fn validate(quad: &QuadratureSpec) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::from_result(
        "radial integrals vs quadrature",
        radial_duality_error().map(|e| (e <= 1e-8, format!("max rel error {e:.3e} on 100 points (tol 1e-8)"))),
    ));
    out.push(Check::from_result(
        "Gil-Pelaez vs incomplete gamma",
        [(7.5, 1.0, 1.0), (2.0, 3.0, 0.5), (1.0 / 3.0, 10.0, 2.0)]
            .iter()
            .map(|&(k, t, n)| gil_pelaez_gamma_error(k, t, n, quad))
            .try_fold(0f64, |m, e| e.map(|e| m.max(e)))
            .map(|e| (e <= 1e-4, format!("max abs error {e:.3e} on 3x50 thresholds (tol 1e-4)"))),
    ));
    out.push(Check::from_result(
        "cut-set of a step CDF",
        cutset_step_error().map(|e| (e <= 1e-10, format!("max abs error {e:.3e} (tol 1e-10)"))),
    ));
    out.push(Check::from_result(
        "ZF nulling",
        zf_leakage(50).map(|e| (e <= 1e-10, format!("max leakage {e:.3e} over 50 draws (tol 1e-10)"))),
    ));
    out.push(Check::from_result(
        "C = 40 vs unconstrained fronthaul",
        saturated_fronthaul_gap(&NetworkConfig::default(), quad)
            .map(|(d, u)| (d.max(u) <= 0.01, format!("DL {:.3}%, UL {:.3}% (tol 1%)", 100.0 * d, 100.0 * u))),
    ));
    out
}

/// Golden values of the special functions.
pub fn selftest() -> Vec<Check> {
    let c = |re: f64| Complex64::new(re, 0.0);
    let close = |got: Complex64, want: Complex64, tol: f64| (got - want).norm() <= tol * want.norm().max(1.0);
    let mut out = Vec::new();
    let mut hyp = |name: &str, a: f64, b: f64, cc: f64, z: Complex64, want: Complex64, tol: f64| {
        let check = match hyp2f1(a, b, cc, z) {
            Ok(v) => Check::new(name, close(v, want, tol), format!("{v:.15e} vs {want:.15e}")),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        };
        out.push(check);
    };
    hyp("2F1(1,1;2;1/2) = 2 ln 2", 1.0, 1.0, 2.0, c(0.5), c(2.0 * LN_2), 1e-14);
    hyp("2F1(1,1;2;-1) = ln 2", 1.0, 1.0, 2.0, c(-1.0), c(LN_2), 1e-13);
    hyp("2F1(1,1;2;-9) = ln 10 / 9", 1.0, 1.0, 2.0, c(-9.0), c(10f64.ln() / 9.0), 1e-12);
    let z = Complex64::new(0.3, 0.4);
    hyp("2F1(1/2,1;1;z) = (1-z)^-1/2", 0.5, 1.0, 1.0, z, (1.0 - z).powf(-0.5), 1e-13);
    hyp("2F1(1/2,1/2;3/2;x^2) = asin(x)/x", 0.5, 0.5, 1.5, c(0.25), c(0.5f64.asin() / 0.5), 1e-14);
    hyp("2F1(1/2,1;3/2;-x^2) = atan(x)/x", 0.5, 1.0, 1.5, c(-100.0), c(10f64.atan() / 10.0), 1e-12);
    let w = Complex64::new(-50.0, 20.0);
    hyp("2F1(1,1;2;w) = -ln(1-w)/w", 1.0, 1.0, 2.0, w, -(1.0 - w).ln() / w, 1e-12);
    hyp("2F1(a,b;c;0) = 1", 2.5, -0.5, 0.5, c(0.0), c(1.0), 0.0);

    let pairs = [
        ("1/Gamma(5) = 1/24", rgamma(5.0), 1.0 / 24.0, 1e-14),
        ("1/Gamma(-2) = 0", rgamma(-2.0), 0.0, 0.0),
        ("1/Gamma(1/2) = 1/sqrt(pi)", rgamma(0.5), 1.0 / PI.sqrt(), 1e-14),
        ("ln|Gamma(-1/2)| = ln(2 sqrt(pi))", ln_gamma_signed(-0.5).0, (2.0 * PI.sqrt()).ln(), 1e-14),
        ("sign Gamma(-1/2) = -1", ln_gamma_signed(-0.5).1, -1.0, 0.0),
        ("expm1(1e-10)", exp_m1(c(1e-10)).re, 1.00000000005e-10, 1e-15),
        ("log1p(-1e-12)", ln_1p(c(-1e-12)).re, -1.0000000000005e-12, 1e-15),
    ];
    for (name, got, want, tol) in pairs {
        let ok = (got - want).abs() <= tol * want.abs().max(f64::MIN_POSITIVE) || got == want;
        out.push(Check::new(name, ok, format!("{got:.15e} vs {want:.15e}")));
    }
    out
}
