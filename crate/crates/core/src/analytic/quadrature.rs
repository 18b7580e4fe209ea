//! Globally adaptive 21-point Gauss-Kronrod quadrature for real and complex
//! integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_386_356,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Values the integrator can accumulate.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    const ZERO: Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    const ZERO: Self = 0.0;
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    const ZERO: Self = Complex64 { re: 0.0, im: 0.0 };
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Tolerances and limits for one-dimensional integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Upper end of the Gil-Pelaez integration variable.
    pub s_truncation: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-12, max_subdivisions: 200, s_truncation: 1e40 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::param("tolerance", "rel_tol and abs_tol must be > 0"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::param("max_subdivisions", "must be >= 1"));
        }
        if !(self.s_truncation > 0.0) {
            return Err(Error::param("s_truncation", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl<V: Integrand> Estimate<V> {
    /// Turns a non-converged estimate into [`Error::Quadrature`].
    pub fn require(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Quadrature { value: self.value.magnitude(), error: self.error, evaluations: self.evaluations })
        }
    }
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<V> Eq for Panel<V> {}

impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod panel. Returns (value, error, ∫|f|).
pub fn gk21<V: Integrand, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = V::ZERO;
    let mut resabs = fc.magnitude() * WGK[10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        let sum = f1 + f2;
        kronrod = kronrod + sum * WGK[j];
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
    }
    let h = half.abs();
    let err = (kronrod - gauss).magnitude() * h;
    let resabs = resabs * h;
    // roundoff floor
    let err = err.max(50.0 * f64::EPSILON * resabs);
    (kronrod * half, err, resabs)
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// Converged when the summed error estimate is below
/// `max(abs_tol, rel_tol |I|)`; otherwise the best estimate is returned
/// with `converged = false`.
pub fn integrate<V: Integrand, F: FnMut(f64) -> V>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Estimate<V> {
    integrate_panels(&mut f, &[a, b], spec)
}

/// As [`integrate`], starting from the given breakpoints (sorted).
pub fn integrate_panels<V: Integrand, F: FnMut(f64) -> V>(
    f: &mut F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Estimate<V> {
    let mut heap = BinaryHeap::new();
    let mut total = V::ZERO;
    let mut err = 0.0;
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (v, e, _) = gk21(f, w[0], w[1]);
        evaluations += 21;
        total = total + v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let target = |t: &V| spec.abs_tol.max(spec.rel_tol * t.magnitude());
    let mut splits = 0;
    while err > target(&total) && splits < spec.max_subdivisions {
        let Some(p) = heap.pop() else { break };
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            heap.push(p);
            break;
        }
        let (v1, e1, _) = gk21(f, p.a, mid);
        let (v2, e2, _) = gk21(f, mid, p.b);
        evaluations += 42;
        total = total - p.value + v1 + v2;
        err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: p.b, value: v2, error: e2 });
        splits += 1;
    }
    // re-sum to shed accumulated update roundoff
    let (value, error) = heap.iter().fold((V::ZERO, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Estimate { value, error, evaluations, converged: error <= target(&value) }
}

const XK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod rule on `[a, b]` as `(node, kronrod weight, gauss weight)`;
/// the 7-point Gauss weights are zero off the Gauss nodes.
pub fn kronrod15(a: f64, b: f64) -> Vec<(f64, f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = Vec::with_capacity(15);
    for i in 0..7 {
        let g = if i % 2 == 1 { WG7[i / 2] * h } else { 0.0 };
        out.push((c - h * XK15[i], WK15[i] * h, g));
        out.push((c + h * XK15[i], WK15[i] * h, g));
    }
    out.push((c, WK15[7] * h, WG7[3] * h));
    out
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on the Legendre
/// recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
