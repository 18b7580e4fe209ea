//! Gamma moment matching of the intended and interfering channel power
//! gains under cooperative ZF beamforming.
//!
//! Every gain is represented as `Σ_j β_j ψ_j` with independent
//! `ψ_j ~ Gamma(shape_j, scale_j)`; see [`GammaTerm`].

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};
use crate::rng;

/// One contribution `β ψ` with `ψ ~ Gamma(shape, scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTerm {
    pub beta: f64,
    pub shape: f64,
    pub scale: f64,
}

impl GammaTerm {
    pub fn new(beta: f64, shape: f64, scale: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::param("beta", format!("must be >= 0, got {beta}")));
        }
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::param("shape", format!("must be > 0, got {shape}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("scale", format!("must be > 0, got {scale}")));
        }
        Ok(Self { beta, shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.beta * self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        let s = self.beta * self.scale;
        self.shape * s * s
    }

    /// `E{exp(-z β ψ)} = (1 + z β θ)^(-κ)`.
    pub fn mgf(&self, z: Complex64) -> Complex64 {
        (1.0 + z * (self.beta * self.scale)).powc(Complex64::new(-self.shape, 0.0))
    }

    /// `P(β ψ <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if self.beta == 0.0 {
            return 1.0;
        }
        gamma_lr(self.shape, x / (self.beta * self.scale))
    }
}

/// Shape and scale of the Gamma law with prescribed mean and variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentMatch {
    pub shape: f64,
    pub scale: f64,
}

impl MomentMatch {
    pub fn from_moments(mean: f64, variance: f64) -> Result<Self> {
        if !(mean > 0.0 && variance > 0.0) {
            return Err(Error::param("moments", format!("mean {mean} and variance {variance} must be > 0")));
        }
        Ok(Self { shape: mean * mean / variance, scale: variance / mean })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }
}

/// Gamma law matching `Σ_j β_j ‖f_j‖²` with `f_j ~ CN(0, I_N)`:
/// shape `N (Σβ)² / Σβ²`, scale `Σβ² / Σβ`.
pub fn match_channel_strength(betas: &[f64], antennas: usize) -> Result<MomentMatch> {
    if betas.is_empty() {
        return Err(Error::Empty("path-loss gains"));
    }
    if let Some(b) = betas.iter().find(|&&b| !(b > 0.0 && b.is_finite())) {
        return Err(Error::param("beta", format!("must be > 0, got {b}")));
    }
    if antennas == 0 {
        return Err(Error::param("antennas", "must be >= 1"));
    }
    let s1: f64 = betas.iter().sum();
    let s2: f64 = betas.iter().map(|b| b * b).sum();
    Ok(MomentMatch { shape: antennas as f64 * s1 * s1 / s2, scale: s2 / s1 })
}

fn uniform_terms(betas: &[f64], shape: f64) -> Result<Vec<GammaTerm>> {
    betas.iter().map(|&b| GammaTerm::new(b, shape, 1.0)).collect()
}

fn check_users(name: &'static str, antennas: usize, users: usize, mean_rus: f64) -> Result<()> {
    if users > antennas {
        return Err(Error::param(name, format!("{users} users exceed {antennas} antennas")));
    }
    if !(mean_rus >= 1.0) {
        return Err(Error::param("L", format!("must be >= 1, got {mean_rus}")));
    }
    Ok(())
}

/// DL intended gain `|g v|²`: one `(β, N_d − K_d + 1/L, 1)` term per in-cluster RU.
pub fn intended_terms_dl(betas: &[f64], n_d: usize, k_d: usize, mean_rus: f64) -> Result<Vec<GammaTerm>> {
    check_users("k_d", n_d, k_d, mean_rus)?;
    uniform_terms(betas, n_d as f64 - k_d as f64 + 1.0 / mean_rus)
}

/// UL intended gain `|w^T h|²`: one `(β, N_u − K_u + 1/L, 1)` term per in-cluster RU.
pub fn intended_terms_ul(betas: &[f64], n_u: usize, k_u: usize, mean_rus: f64) -> Result<Vec<GammaTerm>> {
    check_users("k_u", n_u, k_u, mean_rus)?;
    uniform_terms(betas, n_u as f64 - k_u as f64 + 1.0 / mean_rus)
}

/// DL inter-cluster interference: `(β, K_d, 1)` per interfering RU.
pub fn ici_terms_dl(betas: &[f64], k_d: usize) -> Result<Vec<GammaTerm>> {
    uniform_terms(betas, k_d as f64)
}

/// UL inter-cluster interference of one UE: `(β, 1/L, 1)` per in-cluster RU.
pub fn ici_terms_ul(betas: &[f64], mean_rus: f64) -> Result<Vec<GammaTerm>> {
    if !(mean_rus > 0.0) {
        return Err(Error::param("L", format!("must be > 0, got {mean_rus}")));
    }
    uniform_terms(betas, 1.0 / mean_rus)
}

/// DL UE-to-UE interference: exactly exponential, `(β, 1, 1)`.
pub fn cmi_term_dl(beta: f64) -> Result<GammaTerm> {
    GammaTerm::new(beta, 1.0, 1.0)
}

/// UL RU-to-RU interference: `(β, K_d/L, 1)` per (interfering RU, in-cluster RU) pair.
pub fn cmi_terms_ul(betas: &[f64], k_d: usize, mean_rus: f64) -> Result<Vec<GammaTerm>> {
    if !(mean_rus > 0.0) {
        return Err(Error::param("L", format!("must be > 0, got {mean_rus}")));
    }
    uniform_terms(betas, k_d as f64 / mean_rus)
}

/// Product MGF `Π_j (1 + z β_j θ_j)^(-κ_j)` of a term list.
pub fn gamma_sum_mgf(terms: &[GammaTerm], z: Complex64) -> Complex64 {
    terms.iter().map(|t| t.mgf(z)).product()
}

pub fn sample_gamma_sum(terms: &[GammaTerm], rng_seed: u64) -> Result<f64> {
    sample_gamma_sum_with(terms, &mut rng::seeded(rng_seed))
}

/// One draw of `Σ_j β_j ψ_j`.
pub fn sample_gamma_sum_with<R: Rng + ?Sized>(terms: &[GammaTerm], rng: &mut R) -> Result<f64> {
    let mut total = 0.0;
    for t in terms {
        let g = Gamma::new(t.shape, t.scale).map_err(|e| Error::param("shape", e.to_string()))?;
        total += t.beta * g.sample(rng);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_betas_multiply_shape() {
        let m = match_channel_strength(&[0.5; 4], 8).unwrap();
        assert!((m.shape - 32.0).abs() < 1e-12);
        assert!((m.scale - 0.5).abs() < 1e-15);
        let m = match_channel_strength(&[0.3], 6).unwrap();
        assert!((m.shape - 6.0).abs() < 1e-12 && (m.scale - 0.3).abs() < 1e-15);
        assert!(match_channel_strength(&[], 2).is_err());
    }

    #[test]
    fn two_betas_match_direct_moments() {
        // Σβ‖f‖² with ‖f‖² ~ Gamma(8,1): mean 8 Σβ, variance 8 Σβ²
        let m = match_channel_strength(&[1.0, 0.0625], 8).unwrap();
        assert!((m.mean() - 8.5).abs() < 1e-12);
        assert!((m.variance() - 8.0 * (1.0 + 0.0625f64.powi(2))).abs() < 1e-12);
    }

    #[test]
    fn intended_shapes() {
        assert_eq!(intended_terms_dl(&[1.0], 8, 1, 1.0).unwrap()[0].shape, 8.0);
        assert_eq!(intended_terms_dl(&[1.0], 8, 1, 4.0).unwrap()[0].shape, 7.25);
        let sum: f64 = intended_terms_dl(&[1.0; 3], 8, 2, 3.0).unwrap().iter().map(GammaTerm::mean).sum();
        assert!((sum - 3.0 * (8.0 - 2.0 + 1.0 / 3.0)).abs() < 1e-12);
        assert!(intended_terms_dl(&[1.0], 2, 3, 1.0).is_err());

        assert_eq!(intended_terms_ul(&[1.0], 8, 1, 2.0).unwrap()[0].shape, 7.5);
        assert_eq!(intended_terms_ul(&[1.0], 4, 4, 1.0).unwrap()[0].shape, 1.0);
        let a = intended_terms_ul(&[0.2], 8, 1, 2.0).unwrap()[0].mean();
        let b = intended_terms_ul(&[0.6], 8, 1, 2.0).unwrap()[0].mean();
        assert!((b - 3.0 * a).abs() < 1e-12);
    }

    #[test]
    fn interference_shapes() {
        assert_eq!(ici_terms_dl(&[1.0], 1).unwrap()[0].shape, 1.0);
        assert!((ici_terms_dl(&[0.01], 4).unwrap()[0].mean() - 0.04).abs() < 1e-15);
        assert!(ici_terms_dl(&[], 4).unwrap().is_empty());

        let t = ici_terms_ul(&[0.2, 0.4], 4.0).unwrap();
        assert!(t.iter().all(|t| t.shape == 0.25));
        assert!(ici_terms_ul(&[], 4.0).unwrap().is_empty());

        let c = cmi_term_dl(0.3).unwrap();
        assert!((c.mean() - 0.3).abs() < 1e-15);
        assert!((c.cdf(0.3 * std::f64::consts::LN_2) - 0.5).abs() < 1e-12);

        let t = cmi_terms_ul(&[0.1, 0.2, 0.3], 2, 4.0).unwrap();
        assert!(t.iter().all(|t| t.shape == 0.5));
        assert_eq!(cmi_terms_ul(&[1.0], 3, 3.0).unwrap()[0].shape, 1.0);
        let total: f64 = t.iter().map(GammaTerm::mean).sum();
        assert!((total - 0.5 * 0.6).abs() < 1e-12);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(sample_gamma_sum(&[], 3).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn moment_match_reproduces_moments(mean in 1e-3f64..1e3, var in 1e-3f64..1e3) {
            let m = MomentMatch::from_moments(mean, var).unwrap();
            prop_assert!((m.mean() - mean).abs() <= 1e-12 * mean);
            prop_assert!((m.variance() - var).abs() <= 1e-12 * var);
        }
    }
}
