//! Line-oriented `key = value` configuration files.
//!
//! ```text
//! # default deployment, spelled out
//! lambda_d = 1.2732395447351628
//! noise    = -104 dBm
//! p_d      = 23 dBm
//! L        = 3
//! E        = R
//! C        = infinite
//! ```
//!
//! Values may carry a unit suffix: `dBm` or `W` for powers, `km` for
//! distances, `nat` for fronthaul capacities. Bare numbers use the base
//! unit (W, km, nat/s/Hz). Later lines override earlier ones.

use std::fmt::Write as _;

use fdcran_core::config::dbm_to_watt;
use fdcran_core::{ClusterSize, Clustering, Duplex, EmptyClusterPolicy, Exclusion, NetworkConfig};

use crate::error::{HarnessError, Result};
use crate::figures::Scale;

/// Every key accepted in a configuration document.
pub const KEYS: &[(&str, &str)] = &[
    ("lambda_d", "RU density, RUs/km²"),
    ("lambda_u", "UL UE density, UEs/km², or `auto` for K_u·lambda_d"),
    ("n_d", "DL antennas per RU"),
    ("n_u", "UL antennas per RU"),
    ("n", "sets n_d and n_u"),
    ("k_d", "DL users per RU and block"),
    ("k_u", "UL users per RU and block"),
    ("k", "sets k_d and k_u"),
    ("p_d", "DL transmit power per user (W or dBm)"),
    ("p_u", "UL transmit power (W or dBm)"),
    ("noise_d", "DL noise power (W or dBm)"),
    ("noise_u", "UL noise power (W or dBm)"),
    ("noise", "sets noise_d and noise_u"),
    ("alpha", "path-loss exponent, > 2"),
    ("L", "mean RUs per cluster"),
    ("R", "cluster radius (km); replaces L"),
    ("E", "SIC exclusion radius (km), `zero` or `R`"),
    ("c_d", "DL fronthaul capacity (nat) or `infinite`"),
    ("c_u", "UL fronthaul capacity (nat) or `infinite`"),
    ("C", "sets c_d and c_u"),
    ("fd_split", "share of the FD fronthaul given to the DL"),
    ("clustering", "`disjoint` or `user_centric`"),
    ("duplex", "`FD` or `HD`"),
    ("region", "simulation region radius (km)"),
    ("empty_cluster", "`outage` or `resample`"),
    ("residual_si", "residual self-interference power (W or dBm)"),
    ("trials", "Monte-Carlo trials per sweep point"),
    ("seed", "master seed"),
    ("rel_tol", "quadrature relative tolerance"),
    ("abs_tol", "quadrature absolute tolerance"),
    ("figure", "figure id (1-4)"),
    ("scale", "`desk` or `full`"),
];

/// Run settings that may appear next to the network keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSettings {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub figure: Option<u8>,
    pub scale: Option<Scale>,
}

/// A parsed document: the network plus optional run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub network: NetworkConfig,
    pub run: RunSettings,
}

impl Default for Document {
    fn default() -> Self {
        Self { network: NetworkConfig::default(), run: RunSettings::default() }
    }
}

/// Parses and validates a network configuration; run keys are rejected.
pub fn parse_config(text: &str) -> Result<NetworkConfig> {
    let doc = parse_document(text)?;
    if doc.run != RunSettings::default() {
        return Err(HarnessError::Config {
            line: 0,
            key: "run".into(),
            reason: "run settings are not part of a network configuration".into(),
        });
    }
    Ok(doc.network)
}

/// Parses a document with network keys and run settings.
pub fn parse_document(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HarnessError::Config {
                line: i + 1,
                key: line.to_string(),
                reason: "expected `key = value`".into(),
            });
        };
        apply(&mut doc, key.trim(), value.trim()).map_err(|e| e.at_line(i + 1))?;
    }
    doc.network.validate().map_err(|e| HarnessError::Config { line: 0, key: core_key(&e), reason: e.to_string() })?;
    Ok(doc)
}

/// Applies one `key = value` setting to a document.
pub fn apply(doc: &mut Document, key: &str, value: &str) -> Result<()> {
    let bad = |reason: String| HarnessError::Config { line: 0, key: key.to_string(), reason };
    let cfg = &mut doc.network;
    match key {
        "lambda_d" => cfg.lambda_d = number(value, &[]).map_err(bad)?,
        "lambda_u" => {
            cfg.lambda_u =
                if value.eq_ignore_ascii_case("auto") { None } else { Some(number(value, &[]).map_err(bad)?) }
        }
        "n_d" => cfg.n_d = count(value).map_err(bad)?,
        "n_u" => cfg.n_u = count(value).map_err(bad)?,
        "n" => {
            cfg.n_d = count(value).map_err(bad)?;
            cfg.n_u = cfg.n_d;
        }
        "k_d" => cfg.k_d = count(value).map_err(bad)?,
        "k_u" => cfg.k_u = count(value).map_err(bad)?,
        "k" => {
            cfg.k_d = count(value).map_err(bad)?;
            cfg.k_u = cfg.k_d;
        }
        "p_d" => cfg.p_d = power(value).map_err(bad)?,
        "p_u" => cfg.p_u = power(value).map_err(bad)?,
        "noise_d" => cfg.noise_d = power(value).map_err(bad)?,
        "noise_u" => cfg.noise_u = power(value).map_err(bad)?,
        "noise" => {
            cfg.noise_d = power(value).map_err(bad)?;
            cfg.noise_u = cfg.noise_d;
        }
        "alpha" => cfg.alpha = number(value, &[]).map_err(bad)?,
        "L" => cfg.cluster = ClusterSize::MeanRus(number(value, &[]).map_err(bad)?),
        "R" => cfg.cluster = ClusterSize::Radius(number(value, &["km"]).map_err(bad)?),
        "E" => {
            cfg.exclusion = match value {
                "zero" | "0" => Exclusion::Zero,
                "R" => Exclusion::ClusterRadius,
                _ => Exclusion::Km(number(value, &["km"]).map_err(bad)?),
            }
        }
        "c_d" => cfg.c_d = capacity(value).map_err(bad)?,
        "c_u" => cfg.c_u = capacity(value).map_err(bad)?,
        "C" => {
            cfg.c_d = capacity(value).map_err(bad)?;
            cfg.c_u = cfg.c_d;
        }
        "fd_split" => cfg.duplex.fd_split = number(value, &[]).map_err(bad)?,
        "clustering" => cfg.clustering = clustering(value).map_err(bad)?,
        "duplex" => cfg.duplex.mode = duplex(value).map_err(bad)?,
        "region" => cfg.region_radius = number(value, &["km"]).map_err(bad)?,
        "empty_cluster" => {
            cfg.empty_cluster = match value {
                "outage" => EmptyClusterPolicy::Outage,
                "resample" => EmptyClusterPolicy::Resample,
                _ => return Err(bad(format!("expected `outage` or `resample`, got `{value}`"))),
            }
        }
        "residual_si" => cfg.residual_si = power(value).map_err(bad)?,
        "trials" => doc.run.trials = Some(count(value).map_err(bad)?),
        "seed" => doc.run.seed = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
        "rel_tol" => doc.run.rel_tol = Some(number(value, &[]).map_err(bad)?),
        "abs_tol" => doc.run.abs_tol = Some(number(value, &[]).map_err(bad)?),
        "figure" => doc.run.figure = Some(figure_id(value).map_err(bad)?),
        "scale" => doc.run.scale = Some(value.parse().map_err(bad)?),
        _ => return Err(HarnessError::Config { line: 0, key: key.to_string(), reason: "unknown key".into() }),
    }
    Ok(())
}

/// Renders a document in the grammar accepted by [`parse_document`].
pub fn render_document(doc: &Document) -> String {
    let cfg = &doc.network;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("lambda_d", num(cfg.lambda_d));
    kv("lambda_u", cfg.lambda_u.map_or("auto".into(), num));
    kv("n_d", cfg.n_d.to_string());
    kv("n_u", cfg.n_u.to_string());
    kv("k_d", cfg.k_d.to_string());
    kv("k_u", cfg.k_u.to_string());
    kv("p_d", format!("{} W", num(cfg.p_d)));
    kv("p_u", format!("{} W", num(cfg.p_u)));
    kv("noise_d", format!("{} W", num(cfg.noise_d)));
    kv("noise_u", format!("{} W", num(cfg.noise_u)));
    kv("alpha", num(cfg.alpha));
    match cfg.cluster {
        ClusterSize::MeanRus(l) => kv("L", num(l)),
        ClusterSize::Radius(r) => kv("R", format!("{} km", num(r))),
    }
    kv(
        "E",
        match cfg.exclusion {
            Exclusion::Zero => "zero".into(),
            Exclusion::ClusterRadius => "R".into(),
            Exclusion::Km(e) => format!("{} km", num(e)),
        },
    );
    kv("c_d", cap(cfg.c_d));
    kv("c_u", cap(cfg.c_u));
    kv("fd_split", num(cfg.duplex.fd_split));
    kv(
        "clustering",
        match cfg.clustering {
            Clustering::Disjoint => "disjoint".into(),
            Clustering::UserCentric => "user_centric".into(),
        },
    );
    kv("duplex", cfg.duplex.mode.to_string().to_uppercase());
    kv("region", format!("{} km", num(cfg.region_radius)));
    kv(
        "empty_cluster",
        match cfg.empty_cluster {
            EmptyClusterPolicy::Outage => "outage".into(),
            EmptyClusterPolicy::Resample => "resample".into(),
        },
    );
    kv("residual_si", format!("{} W", num(cfg.residual_si)));
    let run = &doc.run;
    if let Some(f) = run.figure {
        kv("figure", f.to_string());
    }
    if let Some(s) = run.scale {
        kv("scale", s.to_string());
    }
    if let Some(t) = run.trials {
        kv("trials", t.to_string());
    }
    if let Some(s) = run.seed {
        kv("seed", s.to_string());
    }
    if let Some(t) = run.rel_tol {
        kv("rel_tol", num(t));
    }
    if let Some(t) = run.abs_tol {
        kv("abs_tol", num(t));
    }
    out
}

/// Shortest text that parses back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn cap(c: f64) -> String {
    if c.is_infinite() {
        "infinite".into()
    } else {
        format!("{} nat", num(c))
    }
}

fn split_unit(value: &str) -> (&str, Option<&str>) {
    let v = value.trim();
    match v.rfind(|c: char| c.is_ascii_whitespace()) {
        Some(i) => (v[..i].trim(), Some(v[i + 1..].trim())),
        None => {
            // allow a glued suffix such as `23dBm`
            let cut = v
                .char_indices()
                .find(|&(i, c)| c.is_ascii_alphabetic() && !is_exponent(v, i) && !v[i..].starts_with("inf"))
                .map(|(i, _)| i);
            match cut {
                Some(i) if i > 0 => (&v[..i], Some(&v[i..])),
                _ => (v, None),
            }
        }
    }
}

fn is_exponent(v: &str, i: usize) -> bool {
    let b = v.as_bytes();
    (b[i] == b'e' || b[i] == b'E')
        && i > 0
        && b[i - 1].is_ascii_digit()
        && i + 1 < b.len()
        && (b[i + 1].is_ascii_digit() || b[i + 1] == b'-' || b[i + 1] == b'+')
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

fn number(value: &str, units: &[&str]) -> std::result::Result<f64, String> {
    let (v, unit) = split_unit(value);
    if let Some(u) = unit {
        if !units.contains(&u) {
            return Err(format!("unit `{u}` not accepted here"));
        }
    }
    parse_f64(v)
}

fn power(value: &str) -> std::result::Result<f64, String> {
    let (v, unit) = split_unit(value);
    let x = parse_f64(v)?;
    match unit {
        None | Some("W") => Ok(x),
        Some("dBm") => Ok(dbm_to_watt(x)),
        Some(u) => Err(format!("unit `{u}` is not a power unit (W, dBm)")),
    }
}

fn capacity(value: &str) -> std::result::Result<f64, String> {
    match value {
        "infinite" | "inf" | "Infinity" => Ok(f64::INFINITY),
        _ => number(value, &["nat"]),
    }
}

fn count(value: &str) -> std::result::Result<usize, String> {
    value.parse::<usize>().map_err(|_| format!("`{value}` is not a non-negative integer"))
}

fn figure_id(value: &str) -> std::result::Result<u8, String> {
    match value.parse::<u8>() {
        Ok(f @ 1..=4) => Ok(f),
        _ => Err(format!("figure must be 1, 2, 3 or 4, got `{value}`")),
    }
}

pub fn clustering(value: &str) -> std::result::Result<Clustering, String> {
    match value.to_ascii_lowercase().as_str() {
        "disjoint" | "dj" => Ok(Clustering::Disjoint),
        "user_centric" | "user-centric" | "uc" => Ok(Clustering::UserCentric),
        _ => Err(format!("expected `disjoint` or `user_centric`, got `{value}`")),
    }
}

pub fn duplex(value: &str) -> std::result::Result<Duplex, String> {
    match value.to_ascii_lowercase().as_str() {
        "fd" => Ok(Duplex::Fd),
        "hd" => Ok(Duplex::Hd),
        _ => Err(format!("expected `FD` or `HD`, got `{value}`")),
    }
}

/// Config key responsible for a validation error.
fn core_key(e: &fdcran_core::Error) -> String {
    match e {
        fdcran_core::Error::Parameter { name, .. } => name.to_string(),
        _ => "config".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversion() {
        let cfg = parse_config("noise = -104 dBm\np_d = 23 dBm").unwrap();
        assert!((cfg.noise_d / 3.981e-14 - 1.0).abs() < 1e-3);
        assert_eq!(cfg.noise_d, cfg.noise_u);
        assert!((cfg.p_d - 0.1995).abs() < 1e-4);
    }

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), NetworkConfig::default());
        assert_eq!(parse_config("# only a comment\n\n").unwrap(), NetworkConfig::default());
    }

    #[test]
    fn symbolic_values() {
        let cfg = parse_config("E = zero\nC = infinite\nR = 0.5 km\nclustering = disjoint\nduplex = HD").unwrap();
        assert_eq!(cfg.exclusion, Exclusion::Zero);
        assert!(cfg.c_d.is_infinite() && cfg.c_u.is_infinite());
        assert_eq!(cfg.cluster, ClusterSize::Radius(0.5));
        assert_eq!(cfg.clustering, Clustering::Disjoint);
        assert_eq!(cfg.duplex.mode, Duplex::Hd);
        let cfg = parse_config("E = R\nc_d = 3 nat\nc_u = 2.5").unwrap();
        assert_eq!(cfg.exclusion, Exclusion::ClusterRadius);
        assert_eq!((cfg.c_d, cfg.c_u), (3.0, 2.5));
        assert_eq!(parse_config("p_u = 20dBm").unwrap().p_u, dbm_to_watt(20.0));
        assert_eq!(parse_config("alpha = 3.5e0").unwrap().alpha, 3.5);
    }

    #[test]
    fn errors_name_the_key() {
        let err = parse_config("lambda_d = 1\nbogus = 3").unwrap_err().to_string();
        assert!(err.contains("bogus") && err.contains("line 2"), "{err}");
        let err = parse_config("k_d = 9").unwrap_err().to_string();
        assert!(err.contains("k_d"), "{err}");
        let err = parse_config("alpha = 2").unwrap_err().to_string();
        assert!(err.contains("alpha"), "{err}");
        let err = parse_config("p_d = 3 km").unwrap_err().to_string();
        assert!(err.contains("p_d"), "{err}");
        assert!(parse_config("lambda_d").is_err());
        assert!(parse_config("seed = 3").is_err());
    }

    #[test]
    fn rendering_round_trips() {
        let text = "L = 5\nE = 0.3 km\nC = 7.25\nnoise = -100 dBm\nlambda_u = 2\nseed = 42\ntrials = 10\nfigure = 2\nscale = full";
        let doc = parse_document(text).unwrap();
        assert_eq!(parse_document(&render_document(&doc)).unwrap(), doc);
        let doc = Document::default();
        assert_eq!(parse_document(&render_document(&doc)).unwrap(), doc);
    }
}
