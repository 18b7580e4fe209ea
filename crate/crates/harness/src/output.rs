//! Result tables: CSV with a fixed column order plus a run manifest.
//!
//! Floating-point cells are written with 17 significant digits, so a table
//! read back with [`read_results`] reproduces every value bit for bit.
//! The manifest next to each table (`<path>.manifest`) is a configuration
//! document that regenerates it.

use std::fs;
use std::path::{Path, PathBuf};

use fdcran_core::analytic::{Method, SeResult};
use fdcran_core::{Clustering, Duplex, EmptyClusterPolicy, NetworkConfig, SweepAxis};

use crate::config_file::{self, render_document, Document};
use crate::error::{HarnessError, Result};

/// Identifier of this build: `FDCRAN_BUILD` at compile time (e.g. the
/// output of `git describe`), else the package version.
pub const BUILD_ID: &str = match option_env!("FDCRAN_BUILD") {
    Some(b) => b,
    None => concat!("v", env!("CARGO_PKG_VERSION")),
};

pub const COLUMNS: &[&str] = &[
    "figure",
    "axis",
    "value",
    "clustering",
    "duplex",
    "method",
    "dl_se",
    "ul_se",
    "dl_error",
    "ul_error",
    "lambda_d",
    "lambda_u",
    "n_d",
    "n_u",
    "k_d",
    "k_u",
    "p_d",
    "p_u",
    "noise_d",
    "noise_u",
    "alpha",
    "L",
    "R_km",
    "E_km",
    "c_d",
    "c_u",
    "fd_split",
    "region_km",
    "empty_cluster",
    "residual_si",
    "trials",
    "seed",
    "rel_tol",
    "abs_tol",
    "build",
];

/// One SE estimate with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub figure: Option<u8>,
    pub axis: Option<SweepAxis>,
    pub value: Option<f64>,
    pub clustering: Clustering,
    pub duplex: Duplex,
    pub method: Method,
    pub dl_se: f64,
    pub ul_se: f64,
    pub dl_error: f64,
    pub ul_error: f64,
    pub lambda_d: f64,
    pub lambda_u: f64,
    pub n_d: usize,
    pub n_u: usize,
    pub k_d: usize,
    pub k_u: usize,
    pub p_d: f64,
    pub p_u: f64,
    pub noise_d: f64,
    pub noise_u: f64,
    pub alpha: f64,
    pub mean_rus: f64,
    pub radius_km: f64,
    pub exclusion_km: f64,
    pub c_d: f64,
    pub c_u: f64,
    pub fd_split: f64,
    pub region_km: f64,
    pub empty_cluster: EmptyClusterPolicy,
    pub residual_si: f64,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub build: String,
}

/// Where a row sits in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RowKey {
    pub figure: Option<u8>,
    pub axis: Option<SweepAxis>,
    pub value: Option<f64>,
}

impl ResultRow {
    pub fn new(
        key: RowKey,
        cfg: &NetworkConfig,
        duplex: Duplex,
        se: &SeResult,
        seed: Option<u64>,
        abs_tol: Option<f64>,
    ) -> Self {
        Self {
            figure: key.figure,
            axis: key.axis,
            value: key.value,
            clustering: cfg.clustering,
            duplex,
            method: se.method,
            dl_se: se.dl_se,
            ul_se: se.ul_se,
            dl_error: se.dl_error,
            ul_error: se.ul_error,
            lambda_d: cfg.lambda_d,
            lambda_u: cfg.lambda_u(),
            n_d: cfg.n_d,
            n_u: cfg.n_u,
            k_d: cfg.k_d,
            k_u: cfg.k_u,
            p_d: cfg.p_d,
            p_u: cfg.p_u,
            noise_d: cfg.noise_d,
            noise_u: cfg.noise_u,
            alpha: cfg.alpha,
            mean_rus: cfg.mean_rus(),
            radius_km: cfg.cluster_radius(),
            exclusion_km: cfg.exclusion_radius(),
            c_d: cfg.c_d,
            c_u: cfg.c_u,
            fd_split: cfg.duplex.fd_split,
            region_km: cfg.region_radius,
            empty_cluster: cfg.empty_cluster,
            residual_si: cfg.residual_si,
            trials: se.trials,
            seed,
            rel_tol: se.rel_tol,
            abs_tol: if se.method == Method::Mc { None } else { abs_tol },
            build: BUILD_ID.to_string(),
        }
    }

    fn cells(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            opt(self.figure.map(|f| f.to_string())),
            opt(self.axis.map(|a| a.name().to_string())),
            opt(self.value.map(float)),
            clustering_name(self.clustering).into(),
            self.duplex.to_string(),
            self.method.to_string(),
            float(self.dl_se),
            float(self.ul_se),
            float(self.dl_error),
            float(self.ul_error),
            float(self.lambda_d),
            float(self.lambda_u),
            self.n_d.to_string(),
            self.n_u.to_string(),
            self.k_d.to_string(),
            self.k_u.to_string(),
            float(self.p_d),
            float(self.p_u),
            float(self.noise_d),
            float(self.noise_u),
            float(self.alpha),
            float(self.mean_rus),
            float(self.radius_km),
            float(self.exclusion_km),
            float(self.c_d),
            float(self.c_u),
            float(self.fd_split),
            float(self.region_km),
            match self.empty_cluster {
                EmptyClusterPolicy::Outage => "outage".into(),
                EmptyClusterPolicy::Resample => "resample".into(),
            },
            float(self.residual_si),
            opt(self.trials.map(|t| t.to_string())),
            opt(self.seed.map(|s| s.to_string())),
            opt(self.rel_tol.map(float)),
            opt(self.abs_tol.map(float)),
            self.build.clone(),
        ]
    }

    fn from_cells(cells: &[&str]) -> Result<Self> {
        if cells.len() != COLUMNS.len() {
            return Err(HarnessError::Format(format!("expected {} cells, got {}", COLUMNS.len(), cells.len())));
        }
        let c = |i: usize| cells[i];
        let f = |i: usize| parse_cell::<f64>(COLUMNS[i], c(i));
        let u = |i: usize| parse_cell::<usize>(COLUMNS[i], c(i));
        let opt_f = |i: usize| if c(i).is_empty() { Ok(None) } else { f(i).map(Some) };
        let fmt = |i: usize, e: String| HarnessError::Format(format!("{}: {e}", COLUMNS[i]));
        Ok(Self {
            figure: if c(0).is_empty() { None } else { Some(parse_cell("figure", c(0))?) },
            axis: match c(1) {
                "" => None,
                "L" => Some(SweepAxis::MeanRus),
                "N" => Some(SweepAxis::Antennas),
                "K" => Some(SweepAxis::Users),
                "C" => Some(SweepAxis::Capacity),
                other => return Err(fmt(1, format!("unknown axis `{other}`"))),
            },
            value: opt_f(2)?,
            clustering: config_file::clustering(c(3)).map_err(|e| fmt(3, e))?,
            duplex: config_file::duplex(c(4)).map_err(|e| fmt(4, e))?,
            method: match c(5) {
                "analytic_cutset" => Method::AnalyticCutset,
                "analytic_infinite" => Method::AnalyticInfinite,
                "mc" => Method::Mc,
                other => return Err(fmt(5, format!("unknown method `{other}`"))),
            },
            dl_se: f(6)?,
            ul_se: f(7)?,
            dl_error: f(8)?,
            ul_error: f(9)?,
            lambda_d: f(10)?,
            lambda_u: f(11)?,
            n_d: u(12)?,
            n_u: u(13)?,
            k_d: u(14)?,
            k_u: u(15)?,
            p_d: f(16)?,
            p_u: f(17)?,
            noise_d: f(18)?,
            noise_u: f(19)?,
            alpha: f(20)?,
            mean_rus: f(21)?,
            radius_km: f(22)?,
            exclusion_km: f(23)?,
            c_d: f(24)?,
            c_u: f(25)?,
            fd_split: f(26)?,
            region_km: f(27)?,
            empty_cluster: match c(28) {
                "outage" => EmptyClusterPolicy::Outage,
                "resample" => EmptyClusterPolicy::Resample,
                other => return Err(fmt(28, format!("unknown policy `{other}`"))),
            },
            residual_si: f(29)?,
            trials: if c(30).is_empty() { None } else { Some(u(30)?) },
            seed: if c(31).is_empty() { None } else { Some(parse_cell("seed", c(31))?) },
            rel_tol: opt_f(32)?,
            abs_tol: opt_f(33)?,
            build: c(34).to_string(),
        })
    }
}

fn clustering_name(c: Clustering) -> &'static str {
    match c {
        Clustering::Disjoint => "disjoint",
        Clustering::UserCentric => "user_centric",
    }
}

/// 17 significant digits.
fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn parse_cell<T: std::str::FromStr>(name: &str, cell: &str) -> Result<T> {
    cell.parse().map_err(|_| HarnessError::Format(format!("{name}: cannot parse `{cell}`")))
}

/// Renders a table as CSV text (header row first, LF line endings).
pub fn render_results(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let csv_err = |e: csv::Error| HarnessError::Format(e.to_string());
    w.write_record(COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.cells()).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Format(e.to_string()))
}

/// Parses CSV text produced by [`render_results`].
pub fn parse_results(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| HarnessError::Format(e.to_string()))?;
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(HarnessError::Format("unexpected header".into()));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| HarnessError::Format(e.to_string()))?;
            ResultRow::from_cells(&rec.iter().collect::<Vec<_>>())
        })
        .collect()
}

pub fn manifest_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".manifest");
    PathBuf::from(p)
}

/// Run manifest: tool version plus the document that regenerates the table.
pub fn render_manifest(command: &str, doc: &Document) -> String {
    format!(
        "# fdcran {BUILD_ID}\n# command: {command}\n# rerun: fdcran {command} --config <this file>\n{}",
        render_document(doc)
    )
}

/// Writes the table to `path` and the manifest to `<path>.manifest`.
pub fn emit_results(rows: &[ResultRow], path: &Path, command: &str, doc: &Document) -> Result<()> {
    fs::write(path, render_results(rows)?).map_err(|e| HarnessError::io(path, e))?;
    let m = manifest_path(path);
    fs::write(&m, render_manifest(command, doc)).map_err(|e| HarnessError::io(&m, e))
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_results(&text)
}
