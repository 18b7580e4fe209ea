//! Per-user spectral efficiency: fronthaul cut-set bound over the SINR
//! distribution, and the unconstrained SE from the real-axis MGFs.
//!
//! ```text
//! S_C = ∫_0^C P(γ > e^τ − 1) dτ                         (= E min(ln(1+γ), C))
//! S_∞ = ∫_0^∞ (1 − M_X(z)) Π M_I(z) e^{−zν} dz/z
//! ```
//!
//! MGF exponents are tabulated once per configuration (and per UE offset in
//! disjoint clustering), so the many inversions share the PGFL work.

use std::cell::Cell;
use std::f64::consts::LN_10;

use num_complex::Complex64;
use rayon::prelude::*;

use super::inversion::{gil_pelaez_cdf, Mgf, WithAtom};
use super::mgf::MgfModel;
use super::quadrature::{integrate_panels, kronrod15, QuadratureSpec};
use super::table::{ConditionedTable, ExponentTable, Ray, TableGrid};
use crate::config::{Clustering, DuplexMode, NetworkConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    AnalyticCutset,
    AnalyticInfinite,
    Mc,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::AnalyticCutset => "analytic_cutset",
            Method::AnalyticInfinite => "analytic_infinite",
            Method::Mc => "mc",
        })
    }
}

/// Per-user DL and UL SE in nat/s/Hz, averaged over two resource blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeResult {
    pub dl_se: f64,
    pub ul_se: f64,
    pub method: Method,
    /// Quadrature error estimate, or standard error for [`Method::Mc`].
    pub dl_error: f64,
    pub ul_error: f64,
    /// Number of trials behind an MC estimate.
    pub trials: Option<usize>,
    /// Relative tolerance behind an analytic estimate.
    pub rel_tol: Option<f64>,
}

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarEstimate {
    pub value: f64,
    pub error: f64,
}

const CCDF_NEGLIGIBLE: f64 = 1e-10;
const MAX_TAU: f64 = 700.0;

/// `∫_0^C (1 − F(e^τ − 1)) dτ` for a CDF `F` of the SINR.
///
/// An infinite `C` is truncated where the CCDF drops below 1e−10.
pub fn se_cutset<F>(mut cdf: F, c: f64, quad: &QuadratureSpec) -> Result<ScalarEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    quad.validate()?;
    if !(c >= 0.0) {
        return Err(Error::param("C", format!("must be >= 0, got {c}")));
    }
    if c == 0.0 {
        return Ok(ScalarEstimate { value: 0.0, error: 0.0 });
    }
    let mut breaks = vec![0.0];
    let mut tau = 0.5;
    loop {
        if tau >= c.min(MAX_TAU) {
            breaks.push(c.min(MAX_TAU));
            break;
        }
        breaks.push(tau);
        if 1.0 - cdf(tau.exp_m1())? < CCDF_NEGLIGIBLE {
            break;
        }
        tau *= 2.0;
    }
    let failure = Cell::new(None);
    let mut f = |t: f64| match cdf(t.exp_m1()) {
        Ok(v) => (1.0 - v).clamp(0.0, 1.0),
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let est = integrate_panels(&mut f, &breaks, quad);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let est = est.require()?;
    Ok(ScalarEstimate { value: est.value, error: est.error })
}

/// SE of one link from real-axis MGFs.
fn se_real_axis(
    signal: &dyn Mgf,
    interference: &[&dyn Mgf],
    noise: f64,
    quad: &QuadratureSpec,
) -> Result<ScalarEstimate> {
    let g = |u: f64| {
        let z = Complex64::new(u.exp(), 0.0);
        let mut v = 1.0 - signal.mgf(z).re;
        for i in interference {
            v *= i.mgf(z).re;
        }
        v * (-z.re * noise).exp()
    };
    let step = 0.5 * LN_10;
    let u_start = -40.0 * LN_10;
    let n = ((quad.s_truncation.ln() - u_start) / step).ceil() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|i| u_start + step * i as f64).collect();
    let active: Vec<usize> = (0..n).filter(|&i| g(grid[i]) > 1e-14).collect();
    let (Some(&first), Some(&last)) = (active.first(), active.last()) else {
        return Ok(ScalarEstimate { value: 0.0, error: 0.0 });
    };
    let breaks = &grid[first.saturating_sub(1)..=(last + 1).min(n - 1)];
    let spec = QuadratureSpec { max_subdivisions: quad.max_subdivisions.max(breaks.len()), ..*quad };
    let mut f = g;
    let est = integrate_panels(&mut f, breaks, &spec).require()?;
    Ok(ScalarEstimate { value: est.value, error: est.error })
}

/// What to compute from one set of tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Request {
    pub duplex: DuplexMode,
    pub method: Method,
}

#[derive(Clone, Copy)]
enum Direction {
    Down,
    Up,
}

/// Tables that do not depend on the UE offset.
struct Shared {
    ray: Ray,
    cmi_dl: Option<ExponentTable>,
    ici_ul: ConditionedTable,
    cmi_ul: Option<ConditionedTable>,
    /// User-centric signal and DL interference tables.
    uc: Option<[ExponentTable; 3]>,
}

struct Evaluator<'a> {
    cfg: &'a NetworkConfig,
    model: MgfModel,
    quad: QuadratureSpec,
    atom: f64,
}

impl Evaluator<'_> {
    fn grid(&self, p: f64) -> TableGrid {
        let r = self.model.radius;
        TableGrid::around(r.powf(self.model.alpha) / p.max(f64::MIN_POSITIVE))
    }

    fn table<F>(&self, ray: Ray, p: f64, f: F) -> Result<ExponentTable>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        ExponentTable::build(ray, self.grid(p), f)
    }

    /// UL interference tables are conditioned on a non-empty cluster, the
    /// event on which the intended signal is non-zero.
    fn conditioned<F, G>(&self, ray: Ray, p: f64, f: F, g: G) -> Result<ConditionedTable>
    where
        F: Fn(Complex64) -> Result<Complex64>,
        G: Fn(Complex64) -> Result<Complex64>,
    {
        let grid = self.grid(p).with_half_width(NESTED_HALF_WIDTH);
        ConditionedTable::build(ray, grid, self.model.mean_rus, f, g)
    }

    fn shared(&self, ray: Ray, cmi: bool) -> Result<Shared> {
        let m = &self.model;
        let cmi_dl = if cmi { Some(self.table(ray, m.p_u, |z| m.cmi_dl_exponent(z))?) } else { None };
        let cmi_ul = if cmi {
            Some(self.conditioned(ray, m.p_d, |z| m.cmi_ul_exponent(z), |z| m.cmi_ul_complement(z))?)
        } else {
            None
        };
        let ici_ul = self.conditioned(ray, m.p_u, |z| m.ici_ul_exponent(z), |z| m.ici_ul_complement(z))?;
        let uc = match self.cfg.clustering {
            Clustering::UserCentric => Some([
                self.table(ray, m.p_d, |z| m.x_dl_uc_exponent(z))?,
                self.table(ray, m.p_u, |z| m.x_ul_uc_exponent(z))?,
                self.table(ray, m.p_d, |z| m.ici_dl_uc_exponent(z))?,
            ]),
            Clustering::Disjoint => None,
        };
        Ok(Shared { ray, cmi_dl, ici_ul, cmi_ul, uc })
    }

    fn noise(&self, dir: Direction, duplex: DuplexMode) -> f64 {
        match dir {
            Direction::Down => self.cfg.noise_d,
            Direction::Up if duplex.is_fd() => self.cfg.noise_u + self.cfg.residual_si,
            Direction::Up => self.cfg.noise_u,
        }
    }

    fn capacity(&self, dir: Direction, duplex: DuplexMode) -> f64 {
        let (c_d, c_u) = duplex.effective_capacity(self.cfg.c_d, self.cfg.c_u);
        match dir {
            Direction::Down => c_d,
            Direction::Up => c_u,
        }
    }

    /// Per-block SE of one direction; the activity factor is applied by the
    /// caller. `cmi` is dropped in HD.
    fn link_se(
        &self,
        dir: Direction,
        signal: &ExponentTable,
        ici: &dyn Mgf,
        cmi: Option<&dyn Mgf>,
        req: Request,
    ) -> Result<ScalarEstimate> {
        let signal = WithAtom { table: signal, atom: self.atom };
        let mut interference: Vec<&dyn Mgf> = vec![ici];
        if req.duplex.is_fd() {
            interference.extend(cmi);
        }
        let noise = self.noise(dir, req.duplex);
        match req.method {
            Method::AnalyticInfinite => se_real_axis(&signal, &interference, noise, &self.quad),
            Method::AnalyticCutset => {
                let mut gp_error: f64 = 0.0;
                let mut est = se_cutset(
                    |x| {
                        let c = gil_pelaez_cdf(x, &signal, &interference, noise, &self.quad)?;
                        gp_error = gp_error.max(c.error + c.tail);
                        Ok(c.cdf)
                    },
                    self.capacity(dir, req.duplex),
                    &self.quad,
                )?;
                // CDF error integrated over the truncated range
                est.error += gp_error * est.value.max(1.0);
                Ok(est)
            }
            Method::Mc => Err(Error::param("method", "analytic evaluator cannot produce MC estimates")),
        }
    }

    /// (DL, UL) per-block SE for every request at UE offset `d` (`None` in
    /// user-centric mode).
    fn at_offset(
        &self,
        d: Option<f64>,
        shared: &[Shared],
        requests: &[Request],
    ) -> Result<Vec<(ScalarEstimate, ScalarEstimate)>> {
        let m = &self.model;
        let mut per_ray = Vec::new();
        for sh in shared {
            let own;
            let [x_dl, x_ul, ici_dl] = match (d, &sh.uc) {
                (Some(d), _) => {
                    own = [
                        self.table(sh.ray, m.p_d, |z| m.x_dl_disjoint_exponent(z, d))?,
                        self.table(sh.ray, m.p_u, |z| m.x_ul_disjoint_exponent(z, d))?,
                        self.table(sh.ray, m.p_d, |z| m.ici_dl_disjoint_exponent(z, d))?,
                    ];
                    &own
                }
                (None, Some(uc)) => uc,
                (None, None) => return Err(Error::param("d", "disjoint clustering needs a UE offset")),
            };
            let mut out = Vec::new();
            for req in requests.iter().filter(|r| ray_of(r.method) == sh.ray) {
                let dl =
                    self.link_se(Direction::Down, x_dl, ici_dl, sh.cmi_dl.as_ref().map(|t| t as &dyn Mgf), *req)?;
                let ul =
                    self.link_se(Direction::Up, x_ul, &sh.ici_ul, sh.cmi_ul.as_ref().map(|t| t as &dyn Mgf), *req)?;
                out.push((*req, dl, ul));
            }
            per_ray.extend(out);
        }
        // restore request order
        Ok(requests
            .iter()
            .map(|r| {
                let (_, dl, ul) = per_ray.iter().find(|(q, _, _)| q == r).expect("every request evaluated");
                (*dl, *ul)
            })
            .collect())
    }
}

const NESTED_HALF_WIDTH: f64 = 10.0;

fn ray_of(method: Method) -> Ray {
    match method {
        Method::AnalyticInfinite => Ray::Real,
        _ => Ray::Imaginary,
    }
}

/// Evaluates several duplex modes and methods for one configuration,
/// sharing the MGF tables. The clustering mode is taken from `cfg`.
pub fn evaluate(cfg: &NetworkConfig, quad: &QuadratureSpec, requests: &[Request]) -> Result<Vec<SeResult>> {
    quad.validate()?;
    let model = MgfModel::new(cfg)?;
    let ev = Evaluator { cfg, atom: model.empty_cluster_probability(), model, quad: *quad };
    let m = &ev.model;

    let mut shared = Vec::new();
    for ray in [Ray::Imaginary, Ray::Real] {
        let wanted: Vec<&Request> = requests.iter().filter(|r| ray_of(r.method) == ray).collect();
        if !wanted.is_empty() {
            shared.push(ev.shared(ray, wanted.iter().any(|r| r.duplex.is_fd()))?);
        }
    }

    let per_block: Vec<(ScalarEstimate, ScalarEstimate)> = match cfg.clustering {
        Clustering::UserCentric => ev.at_offset(None, &shared, requests)?,
        Clustering::Disjoint => {
            // d has density 2d/R²; with v = (d/R)² the average is ∫_0^1 S(R√v) dv
            let rule = kronrod15(0.0, 1.0);
            let values: Vec<Vec<(ScalarEstimate, ScalarEstimate)>> = rule
                .par_iter()
                .map(|&(v, _, _)| ev.at_offset(Some(m.radius * v.sqrt()), &shared, requests))
                .collect::<Result<_>>()?;
            (0..requests.len())
                .map(|k| {
                    let mut acc = [(0.0, 0.0, 0.0); 2];
                    for (node, &(_, wk, wg)) in values.iter().zip(&rule) {
                        for (j, e) in [node[k].0, node[k].1].into_iter().enumerate() {
                            acc[j].0 += wk * e.value;
                            acc[j].1 += wg * e.value;
                            acc[j].2 += wk * e.error;
                        }
                    }
                    let est = |a: (f64, f64, f64)| ScalarEstimate { value: a.0, error: (a.0 - a.1).abs() + a.2 };
                    (est(acc[0]), est(acc[1]))
                })
                .collect()
        }
    };

    Ok(requests
        .iter()
        .zip(per_block)
        .map(|(req, (dl, ul))| {
            let a = req.duplex.activity();
            SeResult {
                dl_se: a * dl.value,
                ul_se: a * ul.value,
                method: req.method,
                dl_error: a * dl.error,
                ul_error: a * ul.error,
                trials: None,
                rel_tol: Some(quad.rel_tol),
            }
        })
        .collect())
}

fn single(cfg: &NetworkConfig, quad: &QuadratureSpec, method: Method) -> Result<SeResult> {
    let out = evaluate(cfg, quad, &[Request { duplex: cfg.duplex, method }])?;
    Ok(out[0])
}

/// Cut-set SE bound with the UE offset averaged over the cluster disk.
pub fn se_disjoint(cfg: &NetworkConfig, quad: &QuadratureSpec) -> Result<SeResult> {
    let cfg = NetworkConfig { clustering: Clustering::Disjoint, ..cfg.clone() };
    single(&cfg, quad, Method::AnalyticCutset)
}

/// Cut-set SE bound with the cluster centred on the UE.
pub fn se_user_centric(cfg: &NetworkConfig, quad: &QuadratureSpec) -> Result<SeResult> {
    let cfg = NetworkConfig { clustering: Clustering::UserCentric, ..cfg.clone() };
    single(&cfg, quad, Method::AnalyticCutset)
}

/// SE without fronthaul constraint for the given clustering mode.
pub fn se_infinite_fronthaul(cfg: &NetworkConfig, mode: Clustering) -> Result<SeResult> {
    let cfg = NetworkConfig { clustering: mode, ..cfg.clone() };
    single(&cfg, &QuadratureSpec::default(), Method::AnalyticInfinite)
}
