//! Sweeps behind the four result figures.
//!
//! | figure | axis | default values |
//! |--------|------|----------------|
//! | 1 | mean RUs per cluster `L` | 1, 2, ..., 8 |
//! | 2 | antennas per RU `N` | 2, 4, ..., 16 |
//! | 3 | users per RU `K` | 1, 2, ..., 8 |
//! | 4 | fronthaul capacity `C` (nat/s/Hz) | 1 ... 20 |
//!
//! Every point is evaluated analytically and by Monte-Carlo, for FD and HD
//! and both clustering modes.

use std::fmt;
use std::str::FromStr;

use fdcran_core::analytic::{evaluate, Method, QuadratureSpec, Request};
use fdcran_core::montecarlo::{estimate_se, point_seed, run_experiment, simulate_many, with_threads, TrialOutcome};
use fdcran_core::{Clustering, Duplex, NetworkConfig, Sweep, SweepAxis};

use crate::error::{HarnessError, Result};
use crate::output::{ResultRow, RowKey};

/// Problem size preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// 20 km region, 2000 trials per point.
    Desk,
    /// 50 km region, 20000 trials per point.
    Full,
}

impl Scale {
    pub fn region_km(&self) -> f64 {
        match self {
            Scale::Desk => 20.0,
            Scale::Full => 50.0,
        }
    }

    pub fn trials(&self) -> usize {
        match self {
            Scale::Desk => 2000,
            Scale::Full => 20_000,
        }
    }

    pub fn rel_tol(&self) -> f64 {
        1e-6
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Desk => "desk",
            Scale::Full => "full",
        })
    }
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "desk" => Ok(Scale::Desk),
            "full" => Ok(Scale::Full),
            _ => Err(format!("scale must be `desk` or `full`, got `{s}`")),
        }
    }
}

pub fn figure_axis(id: u8) -> Result<(SweepAxis, Vec<f64>)> {
    let range = |a: u32, b: u32, step: usize| (a..=b).step_by(step).map(f64::from).collect();
    match id {
        1 => Ok((SweepAxis::MeanRus, range(1, 8, 1))),
        2 => Ok((SweepAxis::Antennas, range(2, 16, 2))),
        3 => Ok((SweepAxis::Users, range(1, 8, 1))),
        4 => Ok((SweepAxis::Capacity, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0])),
        _ => Err(HarnessError::Config {
            line: 0,
            key: "figure".into(),
            reason: format!("figure must be 1, 2, 3 or 4, got {id}"),
        }),
    }
}

/// Knobs of a figure run; `None` fields fall back to the scale preset.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub scale: Scale,
    pub seed: u64,
    pub trials: Option<usize>,
    pub region_km: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    /// Replaces the default sweep values.
    pub values: Option<Vec<f64>>,
    pub clusterings: Vec<Clustering>,
    pub analytic: bool,
    pub mc: bool,
    pub threads: Option<usize>,
}

impl FigureOptions {
    pub fn new(scale: Scale, seed: u64) -> Self {
        Self {
            scale,
            seed,
            trials: None,
            region_km: None,
            rel_tol: None,
            abs_tol: None,
            values: None,
            clusterings: vec![Clustering::Disjoint, Clustering::UserCentric],
            analytic: true,
            mc: true,
            threads: None,
        }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        let mut q =
            QuadratureSpec::with_tol(self.rel_tol.unwrap_or(self.scale.rel_tol()), QuadratureSpec::default().abs_tol);
        if let Some(a) = self.abs_tol {
            q.abs_tol = a;
        }
        q
    }

    pub fn trial_count(&self) -> usize {
        self.trials.unwrap_or(self.scale.trials())
    }
}

/// Analytic method for a configuration: the real-axis form when neither
/// fronthaul link is limited, the cut-set bound otherwise.
pub fn analytic_method(cfg: &NetworkConfig) -> Method {
    if cfg.c_d.is_infinite() && cfg.c_u.is_infinite() {
        Method::AnalyticInfinite
    } else {
        Method::AnalyticCutset
    }
}

/// Analytic FD and HD rows for one configuration.
pub fn analytic_rows(cfg: &NetworkConfig, key: RowKey, quad: &QuadratureSpec) -> Result<Vec<ResultRow>> {
    let method = analytic_method(cfg);
    let duplexes = [Duplex::Fd, Duplex::Hd];
    let requests: Vec<Request> =
        duplexes.iter().map(|&d| Request { duplex: cfg.duplex.with_mode(d), method }).collect();
    let results = evaluate(cfg, quad, &requests)?;
    Ok(duplexes
        .iter()
        .zip(&results)
        .map(|(&d, se)| ResultRow::new(key, cfg, d, se, None, Some(quad.abs_tol)))
        .collect())
}

/// MC FD and HD rows for one configuration, sharing one set of drops.
pub fn mc_rows(cfg: &NetworkConfig, key: RowKey, trials: usize, seed: u64) -> Result<Vec<ResultRow>> {
    let s = point_seed(seed, 0, cfg.clustering);
    let draws = simulate_many(cfg, cfg.clustering, trials, s, None)?;
    [Duplex::Fd, Duplex::Hd]
        .iter()
        .map(|&d| {
            let duplex = cfg.duplex.with_mode(d);
            let outcomes: Vec<TrialOutcome> = draws.iter().map(|x| x.outcome(duplex)).collect();
            let se = estimate_se(&outcomes, cfg.c_d, cfg.c_u, duplex)?;
            Ok(ResultRow::new(key, cfg, d, &se, Some(s), None))
        })
        .collect()
}

/// All rows of figure `id`, ordered by sweep value, clustering, method
/// (analytic before MC) and duplex (FD before HD).
pub fn figure_sweep(id: u8, base: &NetworkConfig, opts: &FigureOptions) -> Result<Vec<ResultRow>> {
    let (axis, defaults) = figure_axis(id)?;
    let values = opts.values.clone().unwrap_or(defaults);
    if values.is_empty() {
        return Err(HarnessError::Config { line: 0, key: "values".into(), reason: "empty sweep".into() });
    }
    let mut cfg = base.clone();
    cfg.region_radius = opts.region_km.unwrap_or(opts.scale.region_km());
    cfg.validate()?;
    let quad = opts.quadrature();
    let sweep = Sweep { axis, values: values.clone() };
    let duplexes = [cfg.duplex.with_mode(Duplex::Fd), cfg.duplex.with_mode(Duplex::Hd)];

    with_threads(opts.threads, || -> Result<Vec<ResultRow>> {
        let mc = if opts.mc {
            run_experiment(&cfg, &sweep, &opts.clusterings, &duplexes, opts.trial_count(), opts.seed, None)?
        } else {
            Vec::new()
        };
        let mut rows = Vec::new();
        for &value in &values {
            let key = RowKey { figure: Some(id), axis: Some(axis), value: Some(value) };
            for &clustering in &opts.clusterings {
                let point = NetworkConfig { clustering, ..axis.apply(&cfg, value)? };
                if opts.analytic {
                    rows.extend(analytic_rows(&point, key, &quad)?);
                }
                for r in mc.iter().filter(|r| r.value == value && r.clustering == clustering) {
                    rows.push(ResultRow::new(key, &point, r.duplex.mode, &r.se, Some(r.seed), None));
                }
            }
        }
        Ok(rows)
    })?
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_axes() {
        assert_eq!(figure_axis(1).unwrap().1.len(), 8);
        assert_eq!(figure_axis(2).unwrap().0, SweepAxis::Antennas);
        assert!(figure_axis(5).is_err());
        assert!(figure_axis(0).is_err());
    }

    #[test]
    fn mc_only_sweep_has_one_row_per_duplex_and_mode() {
        let opts = FigureOptions {
            trials: Some(20),
            values: Some(vec![1.0, 2.0]),
            region_km: Some(5.0),
            analytic: false,
            ..FigureOptions::new(Scale::Desk, 1)
        };
        let rows = figure_sweep(1, &NetworkConfig::default(), &opts).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        assert!(rows.iter().all(|r| r.method == Method::Mc && r.trials == Some(20) && r.region_km == 5.0));
        assert_eq!(rows[0].value, Some(1.0));
        assert_eq!((rows[0].clustering, rows[0].duplex), (Clustering::Disjoint, Duplex::Fd));
    }
}
