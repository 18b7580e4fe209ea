//! Poisson point processes, cooperation clusters and the boundary distance
//! function used by the disjoint-cluster analysis.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::config::Clustering;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(r: f64, phi: f64) -> Self {
        Self { x: r * phi.cos(), y: r * phi.sin() }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Disk-shaped deployment region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub center: Point,
    pub radius: f64,
}

impl Region {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("radius", format!("must be > 0, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.center.dist(p) <= self.radius
    }

    /// Uniform point in the disk (inverse transform on the radius).
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let r = self.radius * rng.random::<f64>().sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        let p = Point::polar(r, phi);
        Point::new(self.center.x + p.x, self.center.y + p.y)
    }
}

/// One realization of a homogeneous PPP restricted to a region.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub points: Vec<Point>,
    pub density: f64,
    pub region: Region,
}

impl PointPattern {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Samples a homogeneous PPP with the given density on `region`.
pub fn sample_ppp(density: f64, region: Region, rng_seed: u64) -> Result<PointPattern> {
    sample_ppp_with(density, region, &mut rng::seeded(rng_seed))
}

pub fn sample_ppp_with<R: Rng + ?Sized>(density: f64, region: Region, rng: &mut R) -> Result<PointPattern> {
    if !(density >= 0.0 && density.is_finite()) {
        return Err(Error::param("density", format!("must be >= 0, got {density}")));
    }
    let mean = density * region.area();
    let count = if mean > 0.0 {
        let poisson = Poisson::new(mean).map_err(|e| Error::param("density", e.to_string()))?;
        poisson.sample(rng) as usize
    } else {
        0
    };
    let points = (0..count).map(|_| region.sample_uniform(rng)).collect();
    Ok(PointPattern { points, density, region })
}

/// Distance from a point at offset `y` from the center of a disk of radius
/// `r` to the disk boundary along the direction `theta`.
///
/// `Ξ(y, θ, R) = √(R² − y² cos² θ) + y sin θ`, measured with the offset along
/// the negative vertical axis so that `θ = π/2` points away from the nearest
/// boundary point.
pub fn xi(y: f64, theta: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("cluster radius must be > 0, got {r}")));
    }
    if !(0.0..=r).contains(&y) {
        return Err(Error::Domain(format!("offset {y} outside [0, {r}]")));
    }
    Ok(xi_unchecked(y, theta, r))
}

#[inline]
pub(crate) fn xi_unchecked(y: f64, theta: f64, r: f64) -> f64 {
    let c = y * theta.cos();
    let root = (r * r - c * c).max(0.0).sqrt();
    let s = y * theta.sin();
    if s >= 0.0 {
        root + s
    } else {
        // rationalized to avoid cancellation when the UE is near the edge
        ((r - y) * (r + y) / (root - s)).max(0.0)
    }
}

/// Distance of the reference UE from the center of a disjoint cluster of
/// radius `r`: density `2d/R²` on `[0, R]`.
pub fn sample_disjoint_user_distance(r: f64, rng_seed: u64) -> Result<f64> {
    sample_disjoint_user_distance_with(r, &mut rng::seeded(rng_seed))
}

pub fn sample_disjoint_user_distance_with<R: Rng + ?Sized>(r: f64, rng: &mut R) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("R", format!("must be > 0, got {r}")));
    }
    Ok(r * rng.random::<f64>().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterGeometry {
    pub mode: Clustering,
    pub cluster_radius: f64,
    /// Reference-user offset from the cluster center (disjoint only).
    pub ref_user_distance: f64,
    pub exclusion_radius: f64,
}

impl ClusterGeometry {
    pub fn validate(&self) -> Result<()> {
        let r = self.cluster_radius;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::param("R", format!("must be > 0, got {r}")));
        }
        if !(0.0..=r).contains(&self.ref_user_distance) {
            return Err(Error::param("d", format!("must lie in [0, R], got {}", self.ref_user_distance)));
        }
        if !(0.0..=r).contains(&self.exclusion_radius) {
            return Err(Error::param("E", format!("must lie in [0, R], got {}", self.exclusion_radius)));
        }
        Ok(())
    }
}

/// RUs of one cooperation cluster and everything outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub center: Point,
    pub radius: f64,
    pub members: Vec<Point>,
    pub outsiders: Vec<Point>,
}

/// Splits an RU pattern into the cooperation cluster and its complement.
///
/// Disjoint clusters are centered on the region center; user-centric ones on
/// `reference_ue`. Returns [`Error::EmptyCluster`] when no RU falls inside.
pub fn build_cluster(ru_pattern: &PointPattern, geometry: &ClusterGeometry, reference_ue: Point) -> Result<Cluster> {
    geometry.validate()?;
    let center = match geometry.mode {
        Clustering::Disjoint => ru_pattern.region.center,
        Clustering::UserCentric => reference_ue,
    };
    let (members, outsiders): (Vec<Point>, Vec<Point>) =
        ru_pattern.points.iter().partition(|p| p.dist(&center) <= geometry.cluster_radius);
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    Ok(Cluster { center, radius: geometry.cluster_radius, members, outsiders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uc(r: f64) -> ClusterGeometry {
        ClusterGeometry {
            mode: Clustering::UserCentric,
            cluster_radius: r,
            ref_user_distance: 0.0,
            exclusion_radius: 0.0,
        }
    }

    fn pattern(points: Vec<Point>) -> PointPattern {
        PointPattern { points, density: 1.0, region: Region::new(Point::ORIGIN, 10.0).unwrap() }
    }

    #[test]
    fn zero_density_is_empty() {
        let region = Region::new(Point::ORIGIN, 5.0).unwrap();
        assert!(sample_ppp(0.0, region, 1).unwrap().is_empty());
    }

    #[test]
    fn negative_density_is_rejected() {
        let region = Region::new(Point::ORIGIN, 5.0).unwrap();
        assert!(matches!(sample_ppp(-1.0, region, 1), Err(Error::Parameter { name: "density", .. })));
    }

    #[test]
    fn ppp_is_seed_deterministic_and_inside_region() {
        let region = Region::new(Point::new(1.0, -2.0), 3.0).unwrap();
        let a = sample_ppp(2.0, region, 11).unwrap();
        let b = sample_ppp(2.0, region, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().all(|p| region.contains(p)));
    }

    #[test]
    fn xi_special_angles() {
        let r = 2.0;
        assert!((xi(0.0, 0.3, r).unwrap() - r).abs() < 1e-15);
        assert!((xi(0.7, PI / 2.0, r).unwrap() - (r + 0.7)).abs() < 1e-15);
        assert!((xi(0.7, -PI / 2.0, r).unwrap() - (r - 0.7)).abs() < 1e-15);
        assert!(matches!(xi(2.5, 0.0, r), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn xi_lands_on_the_boundary(frac in 0.0f64..=1.0, theta in -PI..PI, r in 0.1f64..10.0) {
            // reference point sits at (0, -y); the ray leaves along (cos θ, sin θ)
            let y = frac * r;
            let t = xi(y, theta, r).unwrap();
            prop_assert!((0.0..=2.0 * r + 1e-12).contains(&t));
            let exit = Point::new(t * theta.cos(), -y + t * theta.sin());
            prop_assert!((exit.norm() - r).abs() < 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn disjoint_distance_moments() {
        let mut rng = rng::seeded(5);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_disjoint_user_distance_with(1.0, &mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.005, "mean {mean}");
        let below = draws.iter().filter(|&&d| d <= 0.5).count() as f64 / n as f64;
        assert!((below - 0.25).abs() < 0.005, "cdf {below}");
        let mut rng = rng::seeded(6);
        let max = (0..n).map(|_| sample_disjoint_user_distance_with(2.0, &mut rng).unwrap()).fold(0.0, f64::max);
        assert!(max <= 2.0);
    }

    #[test]
    fn cluster_membership() {
        let c = build_cluster(&pattern(vec![Point::ORIGIN]), &uc(1.0), Point::ORIGIN).unwrap();
        assert_eq!(c.members, vec![Point::ORIGIN]);

        let far = pattern(vec![Point::new(1.5, 0.0)]);
        assert_eq!(build_cluster(&far, &uc(1.0), Point::ORIGIN), Err(Error::EmptyCluster));

        let mixed = pattern(vec![Point::new(0.5, 0.0), Point::new(1.5, 0.0)]);
        let c = build_cluster(&mixed, &uc(1.0), Point::ORIGIN).unwrap();
        assert_eq!(c.members.len(), 1);
        assert_eq!(c.outsiders, vec![Point::new(1.5, 0.0)]);
    }

    #[test]
    fn user_centric_cluster_follows_the_user() {
        let p = pattern(vec![Point::new(3.0, 0.0)]);
        let c = build_cluster(&p, &uc(0.5), Point::new(3.2, 0.0)).unwrap();
        assert_eq!(c.center, Point::new(3.2, 0.0));
        assert_eq!(c.members.len(), 1);
    }
}
