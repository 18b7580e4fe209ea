//! Spectral efficiency of full-duplex and half-duplex cloud radio access
//! networks under Poisson deployments.
//!
//! Two independent routes are provided:
//!
//! * [`analytic`]: semi-closed-form SE upper bounds built from Gamma
//!   moment-matched signal statistics, PGFL-based MGFs, Gil-Pelaez inversion
//!   and the fronthaul cut-set bound.
//! * [`montecarlo`]: a system simulator that drops Poisson RUs and UEs,
//!   draws Rayleigh channels, applies cooperative zero-forcing and measures
//!   the resulting SINRs directly.
//!
//! Supporting modules: [`geometry`] (point processes and clusters),
//! [`channel`] (path loss and fading), [`beamforming`] (ZF precoders and
//! decoders) and [`gamma_approx`] (moment-matched channel power gains).

pub mod analytic;
pub mod beamforming;
pub mod channel;
pub mod config;
pub mod error;
pub mod gamma_approx;
pub mod geometry;
pub mod montecarlo;
pub mod rng;

pub use config::{
    ClusterSize, Clustering, Duplex, DuplexMode, EmptyClusterPolicy, Exclusion, NetworkConfig, Sweep, SweepAxis,
};
pub use error::{Error, Result};
