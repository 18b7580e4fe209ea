//! System-level simulation: PPP drops, Rayleigh channels, exact cooperative
//! ZF in the reference cluster and the received powers of every signal
//! class at the reference DL and UL users.
//!
//! Out-of-cluster nodes use independent Haar (random orthonormal) precoders.
//! Because the fading is circularly symmetric, a unit-norm combiner or an
//! orthonormal precoder applied to a fresh Rayleigh channel yields i.i.d.
//! CN(0, σ²) entries, so each interfering link is drawn directly as
//! `σ² Σ_k |CN(0,1)|²`. This is exact in distribution and avoids forming the
//! `N_u L_c × N_d` RU-to-RU matrices.

mod experiment;

pub use experiment::{point_seed, run_experiment, simulate_many, with_threads, SweepRow};

use rand::Rng;

use crate::analytic::{Method, SeResult};
use crate::beamforming::{zf_decoder, zf_precoder};
use crate::channel::{cn01, dl_channel, ul_channel, FadingConfig, MIN_DISTANCE_KM};
use crate::config::{Clustering, DuplexMode, EmptyClusterPolicy, NetworkConfig};
use crate::error::{Error, Result};
use crate::geometry::{sample_ppp_with, Point, Region};
use crate::rng;

/// Received powers at one reference user, in W.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Components {
    pub signal: f64,
    pub ici: f64,
    pub cmi: f64,
    pub noise: f64,
}

impl Components {
    /// `X / (ICI + CMI + ν)`, with 0 for a zero signal.
    pub fn sinr(&self) -> f64 {
        if self.signal == 0.0 {
            0.0
        } else {
            self.signal / (self.ici + self.cmi + self.noise)
        }
    }
}

/// One trial after duplex accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub dl_sinr: f64,
    pub ul_sinr: f64,
    pub dl: Components,
    pub ul: Components,
    /// The topology or fading was redrawn at least once.
    pub resampled: bool,
    pub empty_cluster: bool,
}

/// One drop with all interference classes present; [`Draw::outcome`]
/// applies the duplex mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub dl: Components,
    pub ul: Components,
    pub residual_si: f64,
    pub resampled: bool,
    pub empty_cluster: bool,
}

impl Draw {
    /// HD removes both mutual-interference terms and the self-interference
    /// residual; FD keeps them.
    pub fn outcome(&self, duplex: DuplexMode) -> TrialOutcome {
        let (dl, ul) = if duplex.is_fd() {
            let ul = Components { noise: self.ul.noise + self.residual_si, ..self.ul };
            (self.dl, ul)
        } else {
            (Components { cmi: 0.0, ..self.dl }, Components { cmi: 0.0, ..self.ul })
        };
        TrialOutcome {
            dl_sinr: dl.sinr(),
            ul_sinr: ul.sinr(),
            dl,
            ul,
            resampled: self.resampled,
            empty_cluster: self.empty_cluster,
        }
    }
}

/// Per-interferer contributions behind a [`Draw`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub dl_ici: Vec<f64>,
    pub dl_cmi: Vec<f64>,
    pub ul_ici: Vec<f64>,
    pub ul_cmi: Vec<f64>,
}

const MAX_REDRAWS: usize = 1000;

/// Runs one trial from `rng_seed`.
pub fn run_trial(
    cfg: &NetworkConfig,
    clustering: Clustering,
    duplex: DuplexMode,
    rng_seed: u64,
) -> Result<TrialOutcome> {
    let draw = simulate(cfg, clustering, &mut rng::seeded(rng_seed))?;
    Ok(draw.outcome(duplex))
}

pub fn simulate<R: Rng + ?Sized>(cfg: &NetworkConfig, clustering: Clustering, rng: &mut R) -> Result<Draw> {
    simulate_inner(cfg, clustering, rng, None)
}

/// As [`simulate`], also returning every interfering contribution.
pub fn simulate_traced<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    clustering: Clustering,
    rng: &mut R,
) -> Result<(Draw, Trace)> {
    let mut trace = Trace::default();
    let draw = simulate_inner(cfg, clustering, rng, Some(&mut trace))?;
    Ok((draw, trace))
}

fn gain(a: &Point, b: &Point, alpha: f64) -> f64 {
    a.dist(b).max(MIN_DISTANCE_KM).powf(-alpha)
}

/// `Σ_{k<n} |CN(0,1)|²`.
fn chi2<R: Rng + ?Sized>(n: usize, rng: &mut R) -> f64 {
    (0..n).map(|_| cn01(rng).norm_sqr()).sum()
}

fn push(trace: &mut Option<&mut Trace>, pick: fn(&mut Trace) -> &mut Vec<f64>, v: f64) {
    if let Some(t) = trace.as_deref_mut() {
        pick(t).push(v);
    }
}

fn simulate_inner<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    clustering: Clustering,
    rng: &mut R,
    mut trace: Option<&mut Trace>,
) -> Result<Draw> {
    cfg.validate()?;
    let r = cfg.cluster_radius();
    let alpha = cfg.alpha;
    let fading = FadingConfig::new(alpha)?;
    if !(cfg.region_radius > r) {
        return Err(Error::param(
            "region_radius",
            format!("must exceed the cluster radius {r}, got {}", cfg.region_radius),
        ));
    }
    let region = Region::new(Point::ORIGIN, cfg.region_radius)?;
    let cluster_disk = Region::new(Point::ORIGIN, r)?;
    let center = Point::ORIGIN;
    let (ref_dl, ref_ul) = match clustering {
        Clustering::UserCentric => (center, center),
        Clustering::Disjoint => (cluster_disk.sample_uniform(rng), cluster_disk.sample_uniform(rng)),
    };

    let mut resampled = false;
    let mut attempts = 0;
    let (members, outsiders) = loop {
        let rus = sample_ppp_with(cfg.lambda_d, region, rng)?;
        let (m, o): (Vec<Point>, Vec<Point>) = rus.points.into_iter().partition(|p| p.dist(&center) <= r);
        if !m.is_empty() || cfg.empty_cluster == EmptyClusterPolicy::Outage {
            break (m, o);
        }
        resampled = true;
        attempts += 1;
        if attempts >= MAX_REDRAWS {
            return Err(Error::EmptyCluster);
        }
    };
    let ues = sample_ppp_with(cfg.lambda_u(), region, rng)?;

    // DL interference does not depend on the in-cluster precoders
    let mut dl = Components { noise: cfg.noise_d, ..Components::default() };
    for m in &outsiders {
        let v = cfg.p_d * gain(m, &ref_dl, alpha) * chi2(cfg.k_d, rng);
        dl.ici += v;
        push(&mut trace, |t| &mut t.dl_ici, v);
    }
    let e = cfg.exclusion_radius();
    for u in ues.points.iter().filter(|u| u.dist(&ref_dl) > e) {
        let v = cfg.p_u * gain(u, &ref_dl, alpha) * cn01(rng).norm_sqr();
        dl.cmi += v;
        push(&mut trace, |t| &mut t.dl_cmi, v);
    }
    let mut ul = Components { noise: cfg.noise_u, ..Components::default() };
    let empty_cluster = members.is_empty();
    if !empty_cluster {
        let lc = members.len();
        let mut redraw = 0;
        let (signal_dl, signal_ul, block_norms) = loop {
            let mut dl_ues = vec![ref_dl];
            dl_ues.extend((1..lc * cfg.k_d).map(|_| cluster_disk.sample_uniform(rng)));
            let mut ul_ues = vec![ref_ul];
            ul_ues.extend((1..lc * cfg.k_u).map(|_| cluster_disk.sample_uniform(rng)));
            let attempt = (|| -> Result<(f64, f64, Vec<f64>)> {
                let g = dl_channel(&members, &dl_ues, cfg.n_d, fading, rng)?;
                let h = ul_channel(&members, &ul_ues, cfg.n_u, fading, rng)?;
                let v = zf_precoder(&g)?;
                let w = zf_decoder(&h)?;
                let x_dl = (g.row(0) * v.v.column(0))[(0, 0)].norm_sqr();
                let x_ul = (w.w.row(0) * h.column(0))[(0, 0)].norm_sqr();
                let norms = (0..lc).map(|l| (0..cfg.n_u).map(|a| w.w[(0, l * cfg.n_u + a)].norm_sqr()).sum()).collect();
                Ok((cfg.p_d * x_dl, cfg.p_u * x_ul, norms))
            })();
            match attempt {
                Ok(v) => break v,
                // co-located nodes or an ill-conditioned draw
                Err(Error::RankDeficient(_) | Error::Singular(_)) => {
                    resampled = true;
                    redraw += 1;
                    if redraw >= MAX_REDRAWS {
                        return Err(Error::RankDeficient(0.0));
                    }
                }
                Err(e) => return Err(e),
            }
        };
        dl.signal = signal_dl;
        ul.signal = signal_ul;
        let spread =
            |p: &Point| -> f64 { members.iter().zip(&block_norms).map(|(ru, n)| gain(p, ru, alpha) * n).sum() };
        for u in ues.points.iter().filter(|u| u.dist(&center) > r) {
            let v = cfg.p_u * spread(u) * cn01(rng).norm_sqr();
            ul.ici += v;
            push(&mut trace, |t| &mut t.ul_ici, v);
        }
        for m in &outsiders {
            let v = cfg.p_d * spread(m) * chi2(cfg.k_d, rng);
            ul.cmi += v;
            push(&mut trace, |t| &mut t.ul_cmi, v);
        }
    }
    Ok(Draw { dl, ul, residual_si: cfg.residual_si, resampled, empty_cluster })
}

/// Bias from truncating the deployment at `region_radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBias {
    /// Upper bound on the mean interference power (W) from nodes beyond the
    /// region at either reference user.
    pub neglected: f64,
    /// Mean interference from nodes between `R` and the region edge around
    /// a user at the cluster centre.
    pub retained: f64,
}

impl TruncationBias {
    pub fn ratio(&self) -> f64 {
        self.neglected / self.retained
    }
}

/// Every neglected node is at least `R_g - R` away from the reference
/// users, and a unit-norm beamformer spreads unit mean power, so with
/// `Λ = λ_d p_d K_d + λ_u p_u`:
///
/// ```text
/// neglected ≤ 2πΛ ∫_{R_g}^∞ (r − R)^{−α} r dr
///           = 2πΛ ((R_g − R)^{2−α}/(α − 2) + R (R_g − R)^{1−α}/(α − 1))
/// retained  = 2πΛ (R^{2−α} − R_g^{2−α})/(α − 2)
/// ```
pub fn truncation_bias(cfg: &NetworkConfig) -> Result<TruncationBias> {
    cfg.validate()?;
    let (a, r, rg) = (cfg.alpha, cfg.cluster_radius(), cfg.region_radius);
    if rg <= r {
        return Err(Error::param("region", format!("region radius {rg} km must exceed R = {r} km")));
    }
    let lam = 2.0 * std::f64::consts::PI * (cfg.lambda_d * cfg.p_d * cfg.k_d as f64 + cfg.lambda_u() * cfg.p_u);
    let gap = rg - r;
    Ok(TruncationBias {
        neglected: lam * (gap.powf(2.0 - a) / (a - 2.0) + r * gap.powf(1.0 - a) / (a - 1.0)),
        retained: lam * (r.powf(2.0 - a) - rg.powf(2.0 - a)) / (a - 2.0),
    })
}

/// Cut-set SE over two resource blocks with standard errors.
///
/// FD: `mean min(ln(1+γ), C_eff)` with the fronthaul split between
/// directions; HD: `½ mean min(ln(1+γ), C)`.
pub fn estimate_se(trials: &[TrialOutcome], c_d: f64, c_u: f64, duplex: DuplexMode) -> Result<SeResult> {
    if trials.is_empty() {
        return Err(Error::Empty("trial list"));
    }
    if !(c_d >= 0.0 && c_u >= 0.0) {
        return Err(Error::param("C", format!("capacities must be >= 0, got ({c_d}, {c_u})")));
    }
    let (cap_d, cap_u) = duplex.effective_capacity(c_d, c_u);
    let a = duplex.activity();
    let stats = |f: &dyn Fn(&TrialOutcome) -> f64| {
        let n = trials.len() as f64;
        let mean = trials.iter().map(f).sum::<f64>() / n;
        let var =
            if trials.len() > 1 { trials.iter().map(|t| (f(t) - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        (a * mean, a * (var / n).sqrt())
    };
    let (dl_se, dl_error) = stats(&|t| t.dl_sinr.ln_1p().min(cap_d));
    let (ul_se, ul_error) = stats(&|t| t.ul_sinr.ln_1p().min(cap_u));
    Ok(SeResult { dl_se, ul_se, method: Method::Mc, dl_error, ul_error, trials: Some(trials.len()), rel_tol: None })
}
