//! Unbounded path loss, Rayleigh fading and assembly of the stacked
//! cooperative channel matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rng;

/// Closest node separation the unbounded path-loss model accepts, in km.
pub const MIN_DISTANCE_KM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingConfig {
    pub alpha: f64,
}

impl FadingConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 2.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be > 2, got {alpha}")));
        }
        Ok(Self { alpha })
    }
}

/// `r^(-alpha)`.
pub fn path_loss(r: f64, alpha: f64) -> Result<f64> {
    if !(r >= MIN_DISTANCE_KM) {
        return Err(Error::Singular(r));
    }
    Ok(r.powf(-alpha))
}

/// Path loss between two nodes.
pub fn link_gain(a: &Point, b: &Point, alpha: f64) -> Result<f64> {
    path_loss(a.dist(b), alpha)
}

/// One CN(0, 1) sample.
#[inline]
pub fn cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn sample_rayleigh_matrix(rows: usize, cols: usize, rng_seed: u64) -> Result<DMatrix<Complex64>> {
    sample_rayleigh_matrix_with(rows, cols, &mut rng::seeded(rng_seed))
}

pub fn sample_rayleigh_matrix_with<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape { expected: "rows, cols >= 1".into(), got: format!("{rows}x{cols}") });
    }
    // column-major fill order
    Ok(DMatrix::from_fn(rows, cols, |_, _| cn01(rng)))
}

/// Antenna and user counts per RU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Antennas {
    pub n_d: usize,
    pub n_u: usize,
}

/// All channels of one reference cluster.
///
/// `dl_intended` is `(#DL UEs) x (L_c N_d)` with row `k` holding
/// `[√β_{l,k} f_{l,k}]_l`; `ul_intended` is `(L_c N_u) x (#UL UEs)`.
/// `ue_ue[i]` is the cross-mode scalar from UL UE `i` to the reference DL UE
/// (row 0 of `dl_intended`), and `ru_ru[m]` is the `(L_c N_u) x N_d` channel
/// from interfering RU `m` to the cooperating RUs.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub dl_intended: DMatrix<Complex64>,
    pub ul_intended: DMatrix<Complex64>,
    pub ue_ue: Vec<Complex64>,
    pub ru_ru: Vec<DMatrix<Complex64>>,
}

/// Node placement for [`assemble_channels`].
#[derive(Debug, Clone, PartialEq)]
pub struct Topology<'a> {
    pub cluster_rus: &'a [Point],
    /// DL UEs of the cluster, reference first.
    pub dl_ues: &'a [Point],
    /// UL UEs of the cluster, reference first.
    pub ul_ues: &'a [Point],
    /// UL UEs whose signal reaches the reference DL UE.
    pub interfering_ul_ues: &'a [Point],
    /// RUs outside the cluster.
    pub interfering_rus: &'a [Point],
}

/// Stacked DL channel: row per UE, `n_d`-wide block per RU.
pub fn dl_channel<R: Rng + ?Sized>(
    rus: &[Point],
    ues: &[Point],
    n_d: usize,
    fading: FadingConfig,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    let mut g = DMatrix::zeros(ues.len(), rus.len() * n_d);
    for (l, ru) in rus.iter().enumerate() {
        for (k, ue) in ues.iter().enumerate() {
            let amp = link_gain(ru, ue, fading.alpha)?.sqrt();
            for a in 0..n_d {
                g[(k, l * n_d + a)] = cn01(rng) * amp;
            }
        }
    }
    Ok(g)
}

/// Stacked UL channel: column per UE, `n_u`-tall block per RU.
pub fn ul_channel<R: Rng + ?Sized>(
    rus: &[Point],
    ues: &[Point],
    n_u: usize,
    fading: FadingConfig,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    let mut h = DMatrix::zeros(rus.len() * n_u, ues.len());
    for (k, ue) in ues.iter().enumerate() {
        for (l, ru) in rus.iter().enumerate() {
            let amp = link_gain(ru, ue, fading.alpha)?.sqrt();
            for a in 0..n_u {
                h[(l * n_u + a, k)] = cn01(rng) * amp;
            }
        }
    }
    Ok(h)
}

pub fn assemble_channels(
    topology: &Topology<'_>,
    fading: FadingConfig,
    antennas: Antennas,
    rng_seed: u64,
) -> Result<ChannelSet> {
    let mut rng = rng::seeded(rng_seed);
    let reference = topology.dl_ues.first().ok_or(Error::Empty("DL UEs (the reference DL UE comes first)"))?;
    let dl_intended = dl_channel(topology.cluster_rus, topology.dl_ues, antennas.n_d, fading, &mut rng)?;
    let ul_intended = ul_channel(topology.cluster_rus, topology.ul_ues, antennas.n_u, fading, &mut rng)?;
    let ue_ue = topology
        .interfering_ul_ues
        .iter()
        .map(|ue| Ok(cn01(&mut rng) * link_gain(ue, reference, fading.alpha)?.sqrt()))
        .collect::<Result<Vec<_>>>()?;
    let rows = topology.cluster_rus.len() * antennas.n_u;
    let ru_ru = topology
        .interfering_rus
        .iter()
        .map(|m| {
            let mut g = DMatrix::zeros(rows, antennas.n_d);
            for (l, ru) in topology.cluster_rus.iter().enumerate() {
                let amp = link_gain(m, ru, fading.alpha)?.sqrt();
                for a in 0..antennas.n_u {
                    for b in 0..antennas.n_d {
                        g[(l * antennas.n_u + a, b)] = cn01(&mut rng) * amp;
                    }
                }
            }
            Ok(g)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelSet { dl_intended, ul_intended, ue_ue, ru_ru })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_loss_values() {
        assert_eq!(path_loss(1.0, 4.0).unwrap(), 1.0);
        assert_eq!(path_loss(2.0, 4.0).unwrap(), 0.0625);
        assert!((path_loss(0.5, 3.0).unwrap() - 8.0).abs() < 1e-12);
        assert!(matches!(path_loss(0.0, 4.0), Err(Error::Singular(_))));
    }

    #[test]
    fn fading_config_requires_alpha_above_two() {
        assert!(FadingConfig::new(2.0).is_err());
        assert!(FadingConfig::new(3.5).is_ok());
    }

    #[test]
    fn rayleigh_matrix_shape_and_determinism() {
        let a = sample_rayleigh_matrix(3, 2, 9).unwrap();
        assert_eq!(a.shape(), (3, 2));
        assert_eq!(a, sample_rayleigh_matrix(3, 2, 9).unwrap());
        assert!(sample_rayleigh_matrix(0, 2, 9).is_err());
    }

    #[test]
    fn assembled_shapes() {
        let rus = [Point::new(1.0, 0.0), Point::new(-1.0, 0.0)];
        let dl = [Point::new(0.0, 0.1)];
        let ul = [Point::new(0.0, -0.2)];
        let others = [Point::new(3.0, 3.0)];
        let topo = Topology {
            cluster_rus: &rus,
            dl_ues: &dl,
            ul_ues: &ul,
            interfering_ul_ues: &others,
            interfering_rus: &others,
        };
        let set = assemble_channels(&topo, FadingConfig::new(4.0).unwrap(), Antennas { n_d: 2, n_u: 3 }, 1).unwrap();
        assert_eq!(set.dl_intended.shape(), (1, 4));
        assert_eq!(set.ul_intended.shape(), (6, 1));
        assert_eq!(set.ue_ue.len(), 1);
        assert_eq!(set.ru_ru[0].shape(), (6, 2));
    }

    #[test]
    fn coincident_nodes_are_singular() {
        let rus = [Point::ORIGIN];
        let ues = [Point::ORIGIN];
        let topo =
            Topology { cluster_rus: &rus, dl_ues: &ues, ul_ues: &[], interfering_ul_ues: &[], interfering_rus: &[] };
        let err = assemble_channels(&topo, FadingConfig::new(4.0).unwrap(), Antennas { n_d: 1, n_u: 1 }, 0);
        assert!(matches!(err, Err(Error::Singular(_))));
    }
}
