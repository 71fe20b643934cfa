//! Globally adaptive Gauss–Kronrod (7/15) quadrature and compensated sums.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalars::C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of complex numbers, componentwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = CompensatedSum::new();
    for x in xs {
        s.add(x);
    }
    s.value()
}

/// Tolerances and budget for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error.total_cmp(&o.error) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error).then(o.a.total_cmp(&self.a))
    }
}

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        k += (f1 + f2) * w;
        if i % 2 == 1 {
            g += (f1 + f2) * WG[i / 2];
        }
    }
    let err = ((k - g) * h).norm();
    (k * h, err)
}

/// Integrate a complex-valued `f` over `[a, b]`, splitting first at the given
/// interior breakpoints.
pub fn integrate_complex_with<F>(
    mut f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult<C64>>
where
    F: FnMut(f64) -> C64,
{
    if breaks.len() < 2 {
        return Err(Error::Invalid(
            "quadrature needs at least two endpoints".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::QuadratureFailed("non-finite endpoint".into()));
        }
        if a == b {
            continue;
        }
        let (value, error) = gk15(&mut f, a, b);
        heap.push(Piece { a, b, value, error });
    }
    loop {
        let mut total = crate::quadrature::ComplexSum::new();
        let mut err = CompensatedSum::new();
        for p in heap.iter() {
            total.add(p.value);
            err.add(p.error);
        }
        let (value, error) = (total.value(), err.value());
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::QuadratureFailed(
                "integrand produced a non-finite value".into(),
            ));
        }
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.norm()) {
            return Ok(QuadResult {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= cfg.max_intervals {
            return Err(Error::QuadratureFailed(alloc::format!(
                "error estimate {error:.3e} above tolerance after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::QuadratureFailed(
                "interval below floating-point resolution".into(),
            ));
        }
        for (a, b) in [(worst.a, m), (m, worst.b)] {
            let (value, error) = gk15(&mut f, a, b);
            heap.push(Piece { a, b, value, error });
        }
    }
}

pub fn integrate_complex<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult<C64>>
where
    F: FnMut(f64) -> C64,
{
    integrate_complex_with(f, &[a, b], cfg)
}

pub fn integrate_with<F>(mut f: F, breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult<f64>>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_complex_with(|x| C64::new(f(x), 0.0), breaks, cfg)?;
    Ok(QuadResult {
        value: r.value.re,
        error: r.error,
        intervals: r.intervals,
    })
}

pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>>
where
    F: FnMut(f64) -> f64,
{
    integrate_with(f, &[a, b], cfg)
}

/// `n + 1` evenly spaced breakpoints on `[a, b]`.
pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|i| {
            if i == n {
                b
            } else {
                a + (b - a) * i as f64 / n as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let cfg = QuadConfig::default();
        let r = integrate(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, &cfg).unwrap();
        let exact = (256.0 - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn smooth_and_peaked() {
        let cfg = QuadConfig::default();
        let r = integrate(libm::sin, 0.0, PI, &cfg).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, &cfg).unwrap();
        let exact = 2.0 * libm::atan(100.0) * 100.0;
        assert!((r.value - exact).abs() < 1e-8 * exact);
        let r = integrate(libm::sqrt, 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn complex_integrand() {
        let cfg = QuadConfig::default();
        let r = integrate_complex(|x| C64::new(0.0, x).exp(), 0.0, PI, &cfg).unwrap();
        assert!((r.value - C64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let cfg = QuadConfig {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_intervals: 8,
        };
        let r = integrate(|x| libm::sin(1.0 / x), 1e-6, 1.0, &cfg);
        assert!(matches!(r, Err(Error::QuadratureFailed(_))));
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
        let mut s = ComplexSum::new();
        s.add(C64::new(1e16, -1e16));
        s.add(C64::new(1.0, 3.0));
        s.add(C64::new(-1e16, 1e16));
        assert_eq!(s.value(), C64::new(1.0, 3.0));
    }
}
