//! Scalar system parameters shared by the analytic and simulation routes.
//!
//! Units: distances in km, densities in points/km², powers and noise in W,
//! fronthaul capacities in nat/s/Hz (`f64::INFINITY` for ideal fronthaul).

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clustering {
    Disjoint,
    UserCentric,
}

impl fmt::Display for Clustering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clustering::Disjoint => "disjoint",
            Clustering::UserCentric => "uc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Duplex {
    Fd,
    Hd,
}

impl fmt::Display for Duplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Duplex::Fd => "fd",
            Duplex::Hd => "hd",
        })
    }
}

/// Duplexing mode together with the FD fronthaul split.
///
/// In FD both directions share every resource block, so the DL gets
/// `fd_split` of its fronthaul and the UL gets `1 - fd_split`. In HD each
/// direction is active in one of two blocks with the full fronthaul.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuplexMode {
    pub mode: Duplex,
    pub fd_split: f64,
}

impl DuplexMode {
    pub fn fd() -> Self {
        Self { mode: Duplex::Fd, fd_split: 0.5 }
    }

    pub fn hd() -> Self {
        Self { mode: Duplex::Hd, fd_split: 0.5 }
    }

    pub fn with_mode(self, mode: Duplex) -> Self {
        Self { mode, ..self }
    }

    pub fn is_fd(&self) -> bool {
        self.mode == Duplex::Fd
    }

    /// Effective (DL, UL) per-block capacity caps.
    pub fn effective_capacity(&self, c_d: f64, c_u: f64) -> (f64, f64) {
        match self.mode {
            Duplex::Fd => (c_d * self.fd_split, c_u * (1.0 - self.fd_split)),
            Duplex::Hd => (c_d, c_u),
        }
    }

    /// Fraction of the two resource blocks during which a direction is active.
    pub fn activity(&self) -> f64 {
        match self.mode {
            Duplex::Fd => 1.0,
            Duplex::Hd => 0.5,
        }
    }
}

/// Cluster size given either as the mean number of cooperating RUs or as
/// an explicit radius. The two are tied by `L = λ_d π R²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClusterSize {
    MeanRus(f64),
    Radius(f64),
}

/// Radius of the SIC exclusion ball around the reference DL UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exclusion {
    Zero,
    ClusterRadius,
    Km(f64),
}

/// What a Monte-Carlo trial does when the reference cluster holds no RU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmptyClusterPolicy {
    /// Count the trial as an outage (zero SINR, zero SE).
    Outage,
    /// Redraw the topology until the cluster is non-empty.
    Resample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub lambda_d: f64,
    /// `None` means `k_u * lambda_d`.
    pub lambda_u: Option<f64>,
    pub n_d: usize,
    pub n_u: usize,
    pub k_d: usize,
    pub k_u: usize,
    pub p_d: f64,
    pub p_u: f64,
    pub noise_d: f64,
    pub noise_u: f64,
    pub alpha: f64,
    pub cluster: ClusterSize,
    pub exclusion: Exclusion,
    pub c_d: f64,
    pub c_u: f64,
    pub clustering: Clustering,
    pub duplex: DuplexMode,
    /// Radius of the simulated deployment region (Monte-Carlo only).
    pub region_radius: f64,
    pub empty_cluster: EmptyClusterPolicy,
    /// Post-cancellation self-interference power added to the FD UL noise.
    pub residual_si: f64,
}

/// Scalar parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Mean RUs per cluster `L`.
    MeanRus,
    /// Antennas per RU, `N_d = N_u`.
    Antennas,
    /// Users per RU and block, `K_d = K_u`.
    Users,
    /// Fronthaul capacity, `C_d = C_u`.
    Capacity,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::MeanRus => "L",
            SweepAxis::Antennas => "N",
            SweepAxis::Users => "K",
            SweepAxis::Capacity => "C",
        }
    }

    /// `cfg` with this parameter set to `value`, validated.
    pub fn apply(&self, cfg: &NetworkConfig, value: f64) -> Result<NetworkConfig> {
        let mut out = cfg.clone();
        let count = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 && v < 1e6 {
                Ok(v as usize)
            } else {
                Err(Error::param("sweep", format!("{} must be a positive integer, got {v}", self.name())))
            }
        };
        match self {
            SweepAxis::MeanRus => out.cluster = ClusterSize::MeanRus(value),
            SweepAxis::Antennas => {
                out.n_d = count(value)?;
                out.n_u = out.n_d;
            }
            SweepAxis::Users => {
                out.k_d = count(value)?;
                out.k_u = out.k_d;
            }
            SweepAxis::Capacity => {
                out.c_d = value;
                out.c_u = value;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One swept parameter and its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Converts dBm to watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl Default for NetworkConfig {
    fn default() -> Self {
        let noise = dbm_to_watt(-104.0);
        Self {
            lambda_d: 4.0 / PI,
            lambda_u: None,
            n_d: 8,
            n_u: 8,
            k_d: 1,
            k_u: 1,
            p_d: 0.2,
            p_u: 0.1,
            noise_d: noise,
            noise_u: noise,
            alpha: 4.0,
            cluster: ClusterSize::MeanRus(3.0),
            exclusion: Exclusion::ClusterRadius,
            c_d: f64::INFINITY,
            c_u: f64::INFINITY,
            clustering: Clustering::UserCentric,
            duplex: DuplexMode::fd(),
            region_radius: 20.0,
            empty_cluster: EmptyClusterPolicy::Outage,
            residual_si: 0.0,
        }
    }
}

impl NetworkConfig {
    pub fn lambda_u(&self) -> f64 {
        self.lambda_u.unwrap_or(self.k_u as f64 * self.lambda_d)
    }

    /// Mean number of cooperating RUs per cluster, `L`.
    pub fn mean_rus(&self) -> f64 {
        match self.cluster {
            ClusterSize::MeanRus(l) => l,
            ClusterSize::Radius(r) => self.lambda_d * PI * r * r,
        }
    }

    /// Cluster radius `R` in km.
    pub fn cluster_radius(&self) -> f64 {
        match self.cluster {
            ClusterSize::MeanRus(l) => (l / (self.lambda_d * PI)).sqrt(),
            ClusterSize::Radius(r) => r,
        }
    }

    /// SIC exclusion radius `E` in km.
    pub fn exclusion_radius(&self) -> f64 {
        match self.exclusion {
            Exclusion::Zero => 0.0,
            Exclusion::ClusterRadius => self.cluster_radius(),
            Exclusion::Km(e) => e,
        }
    }

    /// Fading shape of the DL intended gain per in-cluster RU.
    pub fn dl_signal_shape(&self) -> f64 {
        self.n_d as f64 - self.k_d as f64 + 1.0 / self.mean_rus()
    }

    pub fn ul_signal_shape(&self) -> f64 {
        self.n_u as f64 - self.k_u as f64 + 1.0 / self.mean_rus()
    }

    pub fn validate(&self) -> Result<()> {
        fn finite_nonneg(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and >= 0, got {v}")))
            }
        }
        finite_nonneg("lambda_d", self.lambda_d)?;
        if self.lambda_d == 0.0 {
            return Err(Error::param("lambda_d", "must be > 0"));
        }
        finite_nonneg("lambda_u", self.lambda_u())?;
        finite_nonneg("p_d", self.p_d)?;
        finite_nonneg("p_u", self.p_u)?;
        finite_nonneg("noise_d", self.noise_d)?;
        finite_nonneg("noise_u", self.noise_u)?;
        finite_nonneg("residual_si", self.residual_si)?;
        if self.n_d == 0 || self.n_u == 0 {
            return Err(Error::param("n_d/n_u", "antenna counts must be >= 1"));
        }
        if self.k_d == 0 || self.k_u == 0 {
            return Err(Error::param("k_d/k_u", "user counts must be >= 1"));
        }
        if self.k_d > self.n_d {
            return Err(Error::param("k_d", format!("K_d = {} exceeds N_d = {}", self.k_d, self.n_d)));
        }
        if self.k_u > self.n_u {
            return Err(Error::param("k_u", format!("K_u = {} exceeds N_u = {}", self.k_u, self.n_u)));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be > 2, got {}", self.alpha)));
        }
        match self.cluster {
            ClusterSize::MeanRus(l) if !(l > 0.0 && l.is_finite()) => {
                return Err(Error::param("L", format!("must be > 0, got {l}")))
            }
            ClusterSize::Radius(r) if !(r > 0.0 && r.is_finite()) => {
                return Err(Error::param("R", format!("must be > 0, got {r}")))
            }
            _ => {}
        }
        let e = self.exclusion_radius();
        if !(e >= 0.0 && e.is_finite()) {
            return Err(Error::param("E", format!("must be >= 0, got {e}")));
        }
        for (name, c) in [("c_d", self.c_d), ("c_u", self.c_u)] {
            if c.is_nan() || c < 0.0 {
                return Err(Error::param(name, format!("must be >= 0, got {c}")));
            }
        }
        if !(self.duplex.fd_split > 0.0 && self.duplex.fd_split < 1.0) {
            return Err(Error::param("fd_split", format!("must lie in (0, 1), got {}", self.duplex.fd_split)));
        }
        if !(self.region_radius > self.cluster_radius()) {
            return Err(Error::param(
                "region_radius",
                format!("must exceed the cluster radius {:.4} km, got {}", self.cluster_radius(), self.region_radius),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_reference_setup() {
        let cfg = NetworkConfig::default();
        assert!((cfg.lambda_d - 4.0 / PI).abs() < 1e-15);
        assert_eq!(cfg.lambda_u(), cfg.lambda_d);
        assert!((cfg.noise_d - 3.981_071_705_534_97e-14).abs() < 1e-24);
        cfg.validate().unwrap();
    }

    #[test]
    fn mean_rus_and_radius_are_consistent() {
        let mut cfg = NetworkConfig::default();
        cfg.cluster = ClusterSize::MeanRus(3.0);
        let r = cfg.cluster_radius();
        assert!((r - 3f64.sqrt() / 2.0).abs() < 1e-14);
        cfg.cluster = ClusterSize::Radius(r);
        assert!((cfg.mean_rus() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_more_users_than_antennas() {
        let cfg = NetworkConfig { k_d: 9, ..NetworkConfig::default() };
        assert!(matches!(cfg.validate(), Err(Error::Parameter { name: "k_d", .. })));
    }

    #[test]
    fn fd_split_divides_fronthaul() {
        let d = DuplexMode::fd();
        assert_eq!(d.effective_capacity(4.0, 2.0), (2.0, 1.0));
        assert_eq!(DuplexMode::hd().effective_capacity(4.0, 2.0), (4.0, 2.0));
    }
}
