//! PGFL-based moment generating functions `M(z) = E exp(−z V)` of the
//! intended signal, inter-cluster interference and mutual interference.
//!
//! Every MGF here has the form `exp(−E(z))`; the `*_exponent` methods return
//! `E(z)` (real part ≥ 0 whenever `Re z ≥ 0`).

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::integrals::{f1_integral, f2_integral};
use super::quadrature::{integrate, QuadratureSpec};
use super::special::exp_m1;
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::geometry::xi_unchecked;

/// Scalar parameters the MGFs depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct MgfModel {
    pub lambda_d: f64,
    pub lambda_u: f64,
    pub alpha: f64,
    pub p_d: f64,
    pub p_u: f64,
    pub k_d: f64,
    pub dl_shape: f64,
    pub ul_shape: f64,
    pub mean_rus: f64,
    pub radius: f64,
    pub exclusion: f64,
    /// Tolerances of the angular and radial integrals.
    pub inner: QuadratureSpec,
}

impl MgfModel {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            lambda_d: cfg.lambda_d,
            lambda_u: cfg.lambda_u(),
            alpha: cfg.alpha,
            p_d: cfg.p_d,
            p_u: cfg.p_u,
            k_d: cfg.k_d as f64,
            dl_shape: cfg.dl_signal_shape(),
            ul_shape: cfg.ul_signal_shape(),
            mean_rus: cfg.mean_rus(),
            radius: cfg.cluster_radius(),
            exclusion: cfg.exclusion_radius(),
            inner: QuadratureSpec {
                rel_tol: 1e-10,
                abs_tol: 1e-300,
                max_subdivisions: 400,
                ..QuadratureSpec::default()
            },
        })
    }

    /// `∫_0^{2π} g(Ξ(y, θ, R)) dθ`, using `Ξ(y, π − θ) = Ξ(y, θ)` and the kink
    /// at `θ = 0` when `y = R`.
    pub fn angular<G>(&self, y: f64, g: G) -> Result<Complex64>
    where
        G: Fn(f64) -> Result<Complex64>,
    {
        let r = self.radius;
        if !(0.0..=r).contains(&y) {
            return Err(Error::Domain(format!("offset {y} outside [0, {r}]")));
        }
        if y == 0.0 {
            return Ok(2.0 * PI * g(r)?);
        }
        let failure = Cell::new(None);
        let f = |theta: f64| match g(xi_unchecked(y, theta, r)) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        };
        let lower = integrate(&f, -FRAC_PI_2, 0.0, &self.inner);
        let upper = integrate(&f, 0.0, FRAC_PI_2, &self.inner);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let lower = lower.require()?;
        let upper = upper.require()?;
        Ok(2.0 * (lower.value + upper.value))
    }

    /// `2πλ_d ∫_0^R (1 − exp(−λ Θ(y))) y dy` for an angular exponent `Θ`,
    /// or with `complement` its distance `2πλ_d ∫_0^R exp(−λ Θ(y)) y dy`
    /// from the saturation value `L`.
    fn nested<G>(&self, lambda: f64, complement: bool, theta: G) -> Result<Complex64>
    where
        G: Fn(f64) -> Result<Complex64>,
    {
        if !complement && lambda == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let failure = Cell::new(None);
        let f = |y: f64| match theta(y) {
            Ok(v) if complement => (-lambda * v).exp() * y,
            Ok(v) => -exp_m1(-lambda * v) * y,
            Err(e) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        };
        let spec = QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: if complement { 1e-40 } else { self.inner.abs_tol },
            ..self.inner
        };
        let est = integrate(f, 0.0, self.radius, &spec);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(2.0 * PI * self.lambda_d * est.require()?.value)
    }

    // user-centric

    pub fn x_dl_uc_exponent(&self, z: Complex64) -> Result<Complex64> {
        Ok(2.0 * PI * self.lambda_d * f1_integral(z, self.p_d, self.alpha, self.dl_shape, 1.0, self.radius)?)
    }

    pub fn x_ul_uc_exponent(&self, z: Complex64) -> Result<Complex64> {
        Ok(2.0 * PI * self.lambda_d * f1_integral(z, self.p_u, self.alpha, self.ul_shape, 1.0, self.radius)?)
    }

    pub fn ici_dl_uc_exponent(&self, z: Complex64) -> Result<Complex64> {
        Ok(2.0 * PI * self.lambda_d * f2_integral(z, self.p_d, self.alpha, self.k_d, 1.0, self.radius)?)
    }

    // shared by both clustering modes

    /// UL inter-cluster interference (UL UEs outside the cluster ball, one
    /// `1/L` Gamma term per in-cluster RU).
    pub fn ici_ul_exponent(&self, z: Complex64) -> Result<Complex64> {
        self.ici_ul(z, false)
    }

    /// `L − E` for the UL inter-cluster exponent `E`; see
    /// [`MgfModel::cmi_ul_complement`].
    pub fn ici_ul_complement(&self, z: Complex64) -> Result<Complex64> {
        self.ici_ul(z, true)
    }

    fn ici_ul(&self, z: Complex64, complement: bool) -> Result<Complex64> {
        let shape = 1.0 / self.mean_rus;
        self.nested(self.lambda_u, complement, |y| {
            self.angular(y, |t| f2_integral(z, self.p_u, self.alpha, shape, 1.0, t))
        })
    }

    /// UE-to-UE interference from UL UEs outside the exclusion ball.
    pub fn cmi_dl_exponent(&self, z: Complex64) -> Result<Complex64> {
        Ok(2.0 * PI * self.lambda_u * f2_integral(z, self.p_u, self.alpha, 1.0, 1.0, self.exclusion)?)
    }

    /// RU-to-RU interference from RUs outside the cluster ball.
    pub fn cmi_ul_exponent(&self, z: Complex64) -> Result<Complex64> {
        self.cmi_ul(z, false)
    }

    /// `L − E` for the UL mutual-interference exponent `E`. Both UL
    /// interference terms are sums over the in-cluster RUs, so they vanish
    /// exactly when the cluster is empty; the complement resolves the
    /// conditional MGF `(M − e^{−L}) / (1 − e^{−L})` where `E` is close to `L`.
    pub fn cmi_ul_complement(&self, z: Complex64) -> Result<Complex64> {
        self.cmi_ul(z, true)
    }

    fn cmi_ul(&self, z: Complex64, complement: bool) -> Result<Complex64> {
        let shape = self.k_d / self.mean_rus;
        self.nested(self.lambda_d, complement, |y| {
            self.angular(y, |t| f2_integral(z, self.p_d, self.alpha, shape, 1.0, t))
        })
    }

    // disjoint, conditioned on the reference-UE offset d

    pub fn x_dl_disjoint_exponent(&self, z: Complex64, d: f64) -> Result<Complex64> {
        Ok(self.lambda_d * self.angular(d, |t| f1_integral(z, self.p_d, self.alpha, self.dl_shape, 1.0, t))?)
    }

    pub fn x_ul_disjoint_exponent(&self, z: Complex64, d: f64) -> Result<Complex64> {
        Ok(self.lambda_d * self.angular(d, |t| f1_integral(z, self.p_u, self.alpha, self.ul_shape, 1.0, t))?)
    }

    pub fn ici_dl_disjoint_exponent(&self, z: Complex64, d: f64) -> Result<Complex64> {
        Ok(self.lambda_d * self.angular(d, |t| f2_integral(z, self.p_d, self.alpha, self.k_d, 1.0, t))?)
    }

    /// Probability that the cluster holds no RU, `exp(−L)`: the mass of the
    /// intended signal at zero.
    pub fn empty_cluster_probability(&self) -> f64 {
        (-self.lambda_d * PI * self.radius * self.radius).exp()
    }
}

fn mgf(e: Result<Complex64>) -> Result<Complex64> {
    e.map(|e| (-e).exp())
}

pub fn mgf_x_dl_disjoint(s: Complex64, d: f64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.x_dl_disjoint_exponent(s, d))
}

pub fn mgf_x_ul_disjoint(s: Complex64, d: f64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.x_ul_disjoint_exponent(s, d))
}

pub fn mgf_ici_dl_disjoint(s: Complex64, d: f64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.ici_dl_disjoint_exponent(s, d))
}

pub fn mgf_ici_ul_disjoint(s: Complex64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.ici_ul_exponent(s))
}

pub fn mgf_cmi_dl(s: Complex64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.cmi_dl_exponent(s))
}

pub fn mgf_cmi_ul(s: Complex64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.cmi_ul_exponent(s))
}

pub fn mgf_x_dl_uc(s: Complex64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.x_dl_uc_exponent(s))
}

pub fn mgf_x_ul_uc(s: Complex64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.x_ul_uc_exponent(s))
}

pub fn mgf_ici_dl_uc(s: Complex64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.ici_dl_uc_exponent(s))
}

pub fn mgf_ici_ul_uc(s: Complex64, cfg: &NetworkConfig) -> Result<Complex64> {
    mgf(MgfModel::new(cfg)?.ici_ul_exponent(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ClusterSize, Exclusion};

    fn js(s: f64) -> Complex64 {
        Complex64::new(0.0, s)
    }

    #[test]
    fn unit_at_zero() {
        let cfg = NetworkConfig::default();
        let zero = js(0.0);
        for v in [
            mgf_x_dl_uc(zero, &cfg),
            mgf_x_ul_uc(zero, &cfg),
            mgf_ici_dl_uc(zero, &cfg),
            mgf_ici_ul_uc(zero, &cfg),
            mgf_cmi_dl(zero, &cfg),
            mgf_cmi_ul(zero, &cfg),
            mgf_x_dl_disjoint(zero, 0.3, &cfg),
            mgf_ici_dl_disjoint(zero, 0.3, &cfg),
        ] {
            assert_eq!(v.unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn no_uplink_users_means_no_ue_interference() {
        let cfg =
            NetworkConfig { lambda_u: Some(0.0), exclusion: Exclusion::ClusterRadius, ..NetworkConfig::default() };
        assert_eq!(mgf_cmi_dl(js(3.0), &cfg).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(mgf_ici_ul_uc(js(3.0), &cfg).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn sparse_rus_mean_no_downlink_interference() {
        let cfg = NetworkConfig { lambda_d: 1e-12, cluster: ClusterSize::Radius(0.5), ..NetworkConfig::default() };
        let v = mgf_ici_dl_uc(js(2.0), &cfg).unwrap();
        assert!((v - 1.0).norm() < 1e-10);
    }

    #[test]
    fn disjoint_centre_user_matches_user_centric() {
        let cfg = NetworkConfig::default();
        for s in [0.01, 1.0, 50.0] {
            let a = mgf_x_dl_disjoint(js(s), 0.0, &cfg).unwrap();
            let b = mgf_x_dl_uc(js(s), &cfg).unwrap();
            assert!((a - b).norm() < 1e-13);
        }
        let m = MgfModel::new(&cfg).unwrap();
        // the angular quadrature path, nudged off the y = 0 shortcut
        let a = m.x_dl_disjoint_exponent(js(2.0), 1e-9).unwrap();
        let b = m.x_dl_uc_exponent(js(2.0)).unwrap();
        assert!((a - b).norm() < 1e-8 * b.norm());
    }

    #[test]
    fn characteristic_functions_are_bounded() {
        let cfg = NetworkConfig::default();
        let m = MgfModel::new(&cfg).unwrap();
        for s in [1e-3, 0.7, 30.0, 1e4] {
            for e in [
                m.x_dl_uc_exponent(js(s)),
                m.ici_ul_exponent(js(s)),
                m.cmi_ul_exponent(js(-s)),
                m.x_ul_disjoint_exponent(js(s), m.radius),
                m.ici_dl_disjoint_exponent(js(-s), 0.5 * m.radius),
            ] {
                assert!((-e.unwrap()).exp().norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn signal_saturates_at_empty_cluster_probability() {
        let cfg = NetworkConfig::default();
        let m = MgfModel::new(&cfg).unwrap();
        let e = m.x_dl_uc_exponent(js(1e12)).unwrap();
        assert!((e.re - m.mean_rus).abs() < 1e-6, "{e}");
        assert!((m.empty_cluster_probability() - (-3.0f64).exp()).abs() < 1e-14);
    }
}
