//! Log-log spline tables of MGF exponents along a ray of the complex plane.
//!
//! `ln E(s·dir)` is smooth in `u = ln s` and tends to straight lines at both
//! ends (power laws or saturation), so a natural cubic spline in `u` with
//! linear extrapolation reproduces `E` to about 1e−7 relative with 16 nodes
//! per decade.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Ray along which a table is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ray {
    /// `z = s`, `s > 0`.
    Real,
    /// `z = j s`; negative `s` uses `E(−js) = conj E(js)`.
    Imaginary,
}

/// Natural cubic spline on an equally spaced grid in `u`, extended linearly.
#[derive(Debug, Clone, PartialEq)]
struct Spline {
    u0: f64,
    h: f64,
    y: Vec<Complex64>,
    m: Vec<Complex64>,
}

impl Spline {
    fn new(u0: f64, h: f64, y: Vec<Complex64>) -> Self {
        let m = natural_spline_moments(&y, h);
        Self { u0, h, y, m }
    }

    fn u_max(&self) -> f64 {
        self.u0 + self.h * (self.y.len() - 1) as f64
    }

    fn eval(&self, u: f64) -> Complex64 {
        let Spline { u0, h, y, m } = self;
        let (u0, h) = (*u0, *h);
        let n = y.len();
        let pos = (u - u0) / h;
        if pos <= 0.0 {
            let slope = (y[1] - y[0]) / h - (2.0 * m[0] + m[1]) * (h / 6.0);
            y[0] + slope * (u - u0)
        } else if pos >= (n - 1) as f64 {
            let last = n - 1;
            let slope = (y[last] - y[last - 1]) / h + (m[last - 1] + 2.0 * m[last]) * (h / 6.0);
            y[last] + slope * (u - self.u_max())
        } else {
            let i = (pos.floor() as usize).min(n - 2);
            let a = (i + 1) as f64 - pos;
            let b = pos - i as f64;
            y[i] * a + y[i + 1] * b + (m[i] * (a * a * a - a) + m[i + 1] * (b * b * b - b)) * (h * h / 6.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    /// `E ≡ 0`.
    Zero,
    /// Spline of `ln E`.
    Spline(Spline),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTable {
    pub ray: Ray,
    body: Body,
}

/// Grid layout of a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableGrid {
    /// Characteristic argument modulus the grid is centred on.
    pub center: f64,
    /// Decades covered on each side of `center`.
    pub half_width_decades: f64,
    pub nodes_per_decade: usize,
}

impl TableGrid {
    pub fn around(center: f64) -> Self {
        Self { center, half_width_decades: 16.0, nodes_per_decade: 16 }
    }

    pub fn with_half_width(self, decades: f64) -> Self {
        Self { half_width_decades: decades, ..self }
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = (2.0 * self.half_width_decades * self.nodes_per_decade as f64).ceil() as usize + 1;
        let u0 = self.center.ln() - self.half_width_decades * std::f64::consts::LN_10;
        let h = std::f64::consts::LN_10 / self.nodes_per_decade as f64;
        (0..n).map(|i| u0 + h * i as f64).collect()
    }
}

impl ExponentTable {
    /// Samples `exponent` on the grid; the sampling is sequential so that
    /// callers may parallelize at a coarser level.
    pub fn build<F>(ray: Ray, grid: TableGrid, exponent: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        if !(grid.center > 0.0 && grid.center.is_finite()) || grid.nodes_per_decade == 0 {
            return Err(Error::param("grid", format!("invalid table grid {grid:?}")));
        }
        let us = grid.nodes();
        let mut values = Vec::with_capacity(us.len());
        for &u in &us {
            values.push(exponent(point(ray, u.exp()))?);
        }
        Self::from_samples(ray, &us, values)
    }

    pub fn from_samples(ray: Ray, us: &[f64], values: Vec<Complex64>) -> Result<Self> {
        if values.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            return Ok(Self { ray, body: Body::Zero });
        }
        if us.len() < 3 || values.len() != us.len() {
            return Err(Error::Shape {
                expected: format!("{} samples (at least 3)", us.len()),
                got: values.len().to_string(),
            });
        }
        let mut y = Vec::with_capacity(values.len());
        for (u, v) in us.iter().zip(&values) {
            if !(v.re > 0.0) || !v.im.is_finite() {
                return Err(Error::Domain(format!("exponent {v} at ln s = {u} has non-positive real part")));
            }
            y.push(v.ln());
        }
        Ok(Self { ray, body: Body::Spline(Spline::new(us[0], us[1] - us[0], y)) })
    }

    pub fn is_zero(&self) -> bool {
        self.body == Body::Zero
    }

    /// Interpolated exponent at `z`, which must lie on the table's ray.
    pub fn exponent(&self, z: Complex64) -> Complex64 {
        on_ray(self.ray, z, |u| match &self.body {
            Body::Zero => Complex64::new(0.0, 0.0),
            Body::Spline(sp) => sp.eval(u).exp(),
        })
    }

    /// `exp(−E(z))`.
    pub fn mgf(&self, z: Complex64) -> Complex64 {
        (-self.exponent(z)).exp()
    }
}

/// Evaluates `f(ln s)` for `z` on the ray, conjugating on the lower half
/// of the imaginary axis; `z = 0` maps to 0.
fn on_ray<F: Fn(f64) -> Complex64>(ray: Ray, z: Complex64, f: F) -> Complex64 {
    let (s, conj) = match ray {
        Ray::Real => (z.re, false),
        Ray::Imaginary => (z.im.abs(), z.im < 0.0),
    };
    if s == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let v = f(s.ln());
    if conj {
        v.conj()
    } else {
        v
    }
}

/// Conditional MGF `(M(z) − e^{−L}) / (1 − e^{−L})` of a variable that is
/// zero exactly on an event of probability `e^{−L}`, where `M = exp(−E)`
/// and `E → L`.
///
/// Near saturation `E` itself cannot resolve `L − E`, so the complement
/// `C = L − E` is tabulated directly wherever `|E| > L/4`, as a spline of
/// `ln C` with the phase unwrapped along the grid. Past the point where `C`
/// underflows it is taken as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedTable {
    exponent: ExponentTable,
    complement: Option<Spline>,
    limit: f64,
}

const COMPLEMENT_FLOOR: f64 = 1e-250;

impl ConditionedTable {
    pub fn build<F, G>(ray: Ray, grid: TableGrid, limit: f64, exponent: F, complement: G) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64>,
        G: Fn(Complex64) -> Result<Complex64>,
    {
        if !(limit > 0.0 && limit.is_finite()) {
            return Err(Error::param("limit", format!("saturation value must be > 0, got {limit}")));
        }
        let exponent = ExponentTable::build(ray, grid, exponent)?;
        let us = grid.nodes();
        let mut ln_c: Vec<Complex64> = Vec::with_capacity(us.len());
        for &u in &us {
            let z = point(ray, u.exp());
            let e = exponent.exponent(z);
            let c = if e.norm() > 0.25 * limit { complement(z)? } else { limit - e };
            if !(c.norm() > COMPLEMENT_FLOOR) {
                break;
            }
            let mut l = c.ln();
            if let Some(prev) = ln_c.last() {
                let turns = ((prev.im - l.im) / (2.0 * std::f64::consts::PI)).round();
                l.im += 2.0 * std::f64::consts::PI * turns;
            }
            ln_c.push(l);
        }
        let complement = (ln_c.len() >= 3).then(|| Spline::new(us[0], us[1] - us[0], ln_c));
        Ok(Self { exponent, complement, limit })
    }

    /// Conditional MGF at `z` on the table's ray.
    pub fn conditional_mgf(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let e = self.exponent.exponent(z);
        if e.norm() < 0.5 * self.limit {
            return one + exp_m1(-e) / (-(-self.limit).exp_m1());
        }
        let c = on_ray(self.exponent.ray, z, |u| match &self.complement {
            Some(sp) if u <= sp.u_max() => sp.eval(u).exp(),
            _ => Complex64::new(0.0, 0.0),
        });
        exp_m1(c) / self.limit.exp_m1()
    }
}

fn exp_m1(z: Complex64) -> Complex64 {
    super::special::exp_m1(z)
}

fn point(ray: Ray, s: f64) -> Complex64 {
    match ray {
        Ray::Real => Complex64::new(s, 0.0),
        Ray::Imaginary => Complex64::new(0.0, s),
    }
}

/// Second derivatives of the natural cubic spline through equally spaced
/// samples (Thomas algorithm).
fn natural_spline_moments(y: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = y.len();
    let mut m = vec![Complex64::new(0.0, 0.0); n];
    if n < 3 {
        return m;
    }
    let k = n - 2;
    let mut diag = vec![4.0; k];
    let mut rhs: Vec<Complex64> = (1..n - 1).map(|i| (y[i + 1] - y[i] * 2.0 + y[i - 1]) * (6.0 / (h * h))).collect();
    for i in 1..k {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        let prev = rhs[i - 1];
        rhs[i] -= prev * w;
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for i in (0..k - 1).rev() {
        m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_power_law_exactly() {
        // ln E linear in u: spline and extrapolation are exact
        let f = |z: Complex64| Ok(z.powf(0.5) * 3.0);
        let t = ExponentTable::build(Ray::Imaginary, TableGrid::around(1.0), f).unwrap();
        for s in [1e-30, 1e-3, 0.77, 5e4, 1e25] {
            let z = Complex64::new(0.0, s);
            let want = z.powf(0.5) * 3.0;
            assert!((t.exponent(z) - want).norm() < 1e-10 * want.norm(), "{s}");
            assert!((t.exponent(z.conj()) - want.conj()).norm() < 1e-10 * want.norm());
        }
    }

    #[test]
    fn interpolates_smooth_crossover() {
        // E(s) = ln(1 + s): slope 1 below, logarithmic growth above
        let f = |z: Complex64| Ok(Complex64::new(z.re.ln_1p(), 0.0));
        let t = ExponentTable::build(Ray::Real, TableGrid::around(1.0), f).unwrap();
        for s in [1e-5, 0.3, 1.0, 2.9, 40.0, 1e6] {
            let want = (1.0f64 + s).ln();
            let got = t.exponent(Complex64::new(s, 0.0)).re;
            assert!((got - want).abs() < 1e-7 * want, "{s}: {got} vs {want}");
        }
    }

    #[test]
    fn conditioned_table_resolves_saturation() {
        // V = Σ_{i ≤ N} Exp(1), N ~ Poisson(L): E(z) = L z / (1 + z)
        let l = 2.5;
        let grid = TableGrid::around(1.0);
        let t =
            ConditionedTable::build(Ray::Imaginary, grid, l, |z| Ok(z * l / (1.0 + z)), |z| Ok(l / (1.0 + z))).unwrap();
        for s in [1e-6, 0.01, 1.0, 40.0, 1e5, 1e9] {
            for z in [Complex64::new(0.0, s), Complex64::new(0.0, -s)] {
                let m = (-z * l / (1.0 + z)).exp();
                let want = (m - (-l).exp()) / (1.0 - (-l).exp());
                let got = t.conditional_mgf(z);
                assert!((got - want).norm() < 1e-7 * want.norm().max(1e-6), "{z}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn zero_table() {
        let t = ExponentTable::build(Ray::Imaginary, TableGrid::around(1.0), |_| Ok(Complex64::new(0.0, 0.0))).unwrap();
        assert!(t.is_zero());
        assert_eq!(t.mgf(Complex64::new(0.0, 5.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_bad_samples() {
        let bad = ExponentTable::build(Ray::Real, TableGrid::around(1.0), |z| Ok(-z));
        assert!(matches!(bad, Err(Error::Domain(_))));
    }
}
