//! Test-function triples `(k, h, g)`.
//!
//! `k` is a function of the point-pair invariant `δ ≥ 1`, `h` its
//! Selberg–Harish-Chandra transform as a function of `λ = 1 − s²`, and `g` the
//! Fourier transform of `t ↦ h(1 + t²)`. With `t = e^u` the transform reads
//!
//! ```text
//! h(1 − s²) = (4π / s) ∫₀^∞ k(cosh u) sinh u sinh(s u) du,
//! ```
//!
//! with the `s → 0` value `4π ∫₀^∞ k(cosh u) u sinh u du`. Under this
//! normalization `g(ℓ) = 2π ∫_{cosh ℓ}^∞ k(x) dx`, which the tests use as an
//! independent route.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_complex_with, integrate_with, uniform_breaks, QuadConfig, QuadResult,
};
use crate::scalars::C64;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// Largest `u` considered when `k` has unbounded support.
const MAX_U: f64 = 60.0;

/// `k(δ)` on `[1, ∞)`, with the declared support bound.
#[derive(Clone)]
pub struct PointPairFunction {
    k: RealFn,
    support_bound: f64,
    smooth: bool,
}

impl core::fmt::Debug for PointPairFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PointPairFunction")
            .field("support_bound", &self.support_bound)
            .field("smooth", &self.smooth)
            .finish()
    }
}

impl PointPairFunction {
    /// `support_bound` may be `f64::INFINITY`.
    pub fn new<F>(k: F, support_bound: f64, smooth: bool) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(support_bound >= 1.0) {
            return Err(Error::Invalid("support bound must be ≥ 1".into()));
        }
        Ok(PointPairFunction {
            k: Arc::new(k),
            support_bound,
            smooth,
        })
    }

    pub fn zero() -> Self {
        PointPairFunction {
            k: Arc::new(|_| 0.0),
            support_bound: 1.0,
            smooth: true,
        }
    }

    /// The smooth bump `exp(1 − 1/(1 − v²))`, `v = (δ − 1)/(b − 1)`, supported
    /// on `[1, b]` and equal to one at `δ = 1`.
    pub fn bump(b: f64) -> Result<Self> {
        if !(b > 1.0 && b.is_finite()) {
            return Err(Error::Invalid(
                "bump needs a finite support bound > 1".into(),
            ));
        }
        Self::new(move |x| bump_profile((x - 1.0) / (b - 1.0)), b, true)
    }

    /// `c₁ k₁ + c₂ k₂`.
    pub fn combine(c1: f64, k1: &PointPairFunction, c2: f64, k2: &PointPairFunction) -> Self {
        let (a, b) = (k1.k.clone(), k2.k.clone());
        PointPairFunction {
            k: Arc::new(move |x| c1 * a(x) + c2 * b(x)),
            support_bound: k1.support_bound.max(k2.support_bound),
            smooth: k1.smooth && k2.smooth,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x > self.support_bound {
            0.0
        } else {
            (self.k)(x)
        }
    }

    pub fn support_bound(&self) -> f64 {
        self.support_bound
    }

    pub fn has_bounded_support(&self) -> bool {
        self.support_bound.is_finite()
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    /// Upper limit of the `u`-integration: `acosh(support)` for bounded
    /// support, otherwise the point past which `k(cosh u)·e^{w u}` has decayed
    /// below `1e-18` relative to its largest sampled value.
    fn u_limit(&self, growth: f64) -> f64 {
        if self.has_bounded_support() {
            return libm::acosh(self.support_bound);
        }
        let weight = |u: f64| self.eval(libm::cosh(u)).abs() * libm::exp((growth + 1.0) * u);
        let mut peak = 0.0f64;
        let mut u = 0.25;
        while u < MAX_U {
            let w = weight(u);
            peak = peak.max(w);
            if u > 2.0
                && w <= 1e-18 * peak.max(f64::MIN_POSITIVE)
                && weight(1.5 * u) <= 1e-18 * peak.max(f64::MIN_POSITIVE)
            {
                return u;
            }
            u += 0.25;
        }
        MAX_U
    }
}

fn bump_profile(v: f64) -> f64 {
    if !(-1.0..1.0).contains(&v) {
        return 0.0;
    }
    libm::exp(1.0 - 1.0 / (1.0 - v * v))
}

/// `sinh(s u)/s`, continuous at `s = 0`.
fn sinh_over_s(s: C64, u: f64) -> C64 {
    let z = s * u;
    if z.norm() < 1e-4 {
        let z2 = z * z;
        return (C64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0) * u;
    }
    (z).sinh() / s
}

/// Quadrature at the configured breakpoints and again with every piece
/// halved; disagreement above `1e-6` (relative to `max(1, |value|)`) fails.
fn checked_integral<F>(f: F, breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult<C64>>
where
    F: Fn(f64) -> C64,
{
    let coarse = integrate_complex_with(&f, breaks, cfg)?;
    let mut fine = Vec::with_capacity(2 * breaks.len());
    for w in breaks.windows(2) {
        fine.push(w[0]);
        fine.push(0.5 * (w[0] + w[1]));
    }
    fine.push(*breaks.last().expect("nonempty"));
    let refined = integrate_complex_with(&f, &fine, cfg)?;
    let gap = (coarse.value - refined.value).norm();
    if gap > 1e-6 * refined.value.norm().max(1.0) {
        return Err(Error::QuadratureFailed(alloc::format!(
            "doubled-resolution estimates differ by {gap:.3e}"
        )));
    }
    Ok(QuadResult {
        value: refined.value,
        error: refined.error.max(gap),
        intervals: refined.intervals,
    })
}

fn shc_config() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-10,
        max_intervals: 4000,
    }
}

/// `h(λ)` for `λ = 1 − s²`, with `s` the principal square root of `1 − λ`.
pub fn shc_transform(k: &PointPairFunction, lambda: C64) -> Result<C64> {
    let s = (C64::new(1.0, 0.0) - lambda).sqrt();
    shc_transform_at_s(k, s)
}

/// `h(1 − s²)`; even in `s`.
pub fn shc_transform_at_s(k: &PointPairFunction, s: C64) -> Result<C64> {
    let top = k.u_limit(s.re.abs());
    if top <= 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let pieces = 8 + libm::ceil(s.im.abs() * top / PI) as usize;
    let breaks = uniform_breaks(0.0, top, pieces.min(2000));
    let r = checked_integral(
        |u| sinh_over_s(s, u) * (k.eval(libm::cosh(u)) * libm::sinh(u)),
        &breaks,
        &shc_config(),
    )?;
    Ok(r.value * (4.0 * PI))
}

/// `g(ℓ) = 2π ∫_{cosh ℓ}^∞ k(x) dx`, the geodesic function of `k` computed
/// without passing through `h`.
pub fn abel_g(k: &PointPairFunction, ell: f64) -> Result<f64> {
    let lo = libm::cosh(ell);
    let top = libm::cosh(k.u_limit(0.0));
    if lo >= top {
        return Ok(0.0);
    }
    let breaks = uniform_breaks(lo, top, 8);
    let r = integrate_with(|x| k.eval(x), &breaks, &shc_config())?;
    Ok(2.0 * PI * r.value)
}

/// `h(λ)` together with its declared analytic envelope.
#[derive(Clone)]
pub struct SpectralTestFunction {
    h: ComplexFn,
    /// Half-width of the strip `|Im s| < w` of holomorphy.
    pub strip_halfwidth: f64,
    /// `p` in `|h(1 + t²)| ≤ C (1 + t²)^{−p}` for real `t`.
    pub decay_exponent: f64,
    /// `C` in the same bound; sampled when absent.
    pub decay_constant: Option<f64>,
}

impl core::fmt::Debug for SpectralTestFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SpectralTestFunction")
            .field("strip_halfwidth", &self.strip_halfwidth)
            .field("decay_exponent", &self.decay_exponent)
            .field("decay_constant", &self.decay_constant)
            .finish()
    }
}

impl SpectralTestFunction {
    pub fn new<F>(
        h: F,
        strip_halfwidth: f64,
        decay_exponent: f64,
        decay_constant: Option<f64>,
    ) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        SpectralTestFunction {
            h: Arc::new(h),
            strip_halfwidth,
            decay_exponent,
            decay_constant,
        }
    }

    pub fn zero() -> Self {
        Self::new(
            |_| C64::new(0.0, 0.0),
            f64::INFINITY,
            f64::INFINITY,
            Some(0.0),
        )
    }

    pub fn eval(&self, lambda: C64) -> C64 {
        (self.h)(lambda)
    }

    /// `h(1 + t²)` for real `t`.
    pub fn on_line(&self, t: f64) -> C64 {
        (self.h)(C64::new(1.0 + t * t, 0.0))
    }

    fn bound_constant(&self, p: f64) -> f64 {
        if let Some(c) = self.decay_constant {
            return c;
        }
        let mut c = 0.0f64;
        let mut t = 0.0;
        while t <= 1e4 {
            let w = 1.0 + t * t;
            c = c.max(self.on_line(t).norm() * libm::pow(w, p));
            t = if t < 1.0 { t + 0.125 } else { t * 1.05 };
        }
        c
    }

    /// Truncation point `T₀` with `(1/π) ∫_{T₀}^∞ C t^{−2p} dt ≤ tail`.
    pub fn truncation(&self, tail: f64) -> Result<f64> {
        let p = self.decay_exponent;
        if !(p > 0.5) {
            return Err(Error::InadmissibleH(alloc::format!(
                "decay exponent {p} does not make h(1+t²) integrable"
            )));
        }
        let p_eff = p.min(40.0);
        let c = self.bound_constant(p_eff);
        if c == 0.0 {
            return Ok(0.0);
        }
        let q = 2.0 * p_eff - 1.0;
        let log_t = (libm::log(c) - libm::log(tail * PI * q)) / q;
        Ok(libm::exp(log_t).max(1.0))
    }
}

/// `g` as an even function of a real variable.
#[derive(Clone)]
pub struct GeodesicTestFunction {
    g: RealFn,
}

impl core::fmt::Debug for GeodesicTestFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GeodesicTestFunction")
            .field("g(0)", &self.eval(0.0))
            .finish()
    }
}

impl GeodesicTestFunction {
    pub fn new<F>(g: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        GeodesicTestFunction { g: Arc::new(g) }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.g)(x.abs())
    }

    pub fn at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    /// Tabulate `g` from `k` by the Abel-type integral.
    pub fn from_kernel(k: &PointPairFunction) -> Self {
        let k = k.clone();
        Self::new(move |x| abel_g(&k, x).unwrap_or(f64::NAN))
    }
}

/// Tail tolerance for [`fourier_g`].
pub const FOURIER_TAIL: f64 = 1e-10;

/// `g(x) = (1/π) ∫₀^∞ h(1 + t²) cos(t x) dt`, truncated at the point where
/// the declared decay bound makes the tail smaller than [`FOURIER_TAIL`].
pub fn fourier_g(h: &SpectralTestFunction, x: f64) -> Result<f64> {
    let top = h.truncation(FOURIER_TAIL)?;
    if top == 0.0 {
        return Ok(0.0);
    }
    let period_pieces = libm::ceil(top * x.abs() / PI) as usize;
    let pieces = (16 + period_pieces).min(20_000);
    let breaks = uniform_breaks(0.0, top, pieces);
    let cfg = QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 4 * pieces + 4000,
    };
    let r = checked_integral(|t| h.on_line(t) * libm::cos(t * x), &breaks, &cfg)?;
    Ok(r.value.re / PI)
}

/// `h(1 + t²) = ∫ g(x) e^{itx} dx`, truncated where `|g|` is negligible.
pub fn inverse_fourier(g: &GeodesicTestFunction, t: f64, cutoff: f64) -> Result<f64> {
    let pieces = 16 + libm::ceil(cutoff * t.abs() / PI) as usize;
    let breaks = uniform_breaks(0.0, cutoff, pieces);
    let cfg = QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 4 * pieces + 4000,
    };
    let r = checked_integral(
        |x| C64::new(g.eval(x) * libm::cos(t * x), 0.0),
        &breaks,
        &cfg,
    )?;
    Ok(2.0 * r.value.re)
}

/// The two analytically known pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedFormPair {
    Heat { t: f64 },
    Resolvent { s: f64, b: f64 },
}

/// `(h, g)` for a closed-form pair.
pub fn closed_form_pair(p: ClosedFormPair) -> Result<(SpectralTestFunction, GeodesicTestFunction)> {
    match p {
        ClosedFormPair::Heat { t } => {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Invalid("heat pair needs t > 0".into()));
            }
            let h = SpectralTestFunction::new(
                move |z: C64| (-z * t).exp(),
                f64::INFINITY,
                f64::INFINITY,
                None,
            );
            let norm = libm::exp(-t) / libm::sqrt(4.0 * PI * t);
            let g = GeodesicTestFunction::new(move |r| norm * libm::exp(-r * r / (4.0 * t)));
            Ok((h, g))
        }
        ClosedFormPair::Resolvent { s, b } => {
            if !(s > 1.0) {
                return Err(Error::OutsideAdmissibleRegion);
            }
            if !(b > s && b.is_finite()) {
                return Err(Error::OutsideAdmissibleRegion);
            }
            let h = SpectralTestFunction::new(
                move |w: C64| (w + (s * s - 1.0)).inv() - (w + (b * b - 1.0)).inv(),
                s,
                2.0,
                Some(b * b - s * s),
            );
            let g = GeodesicTestFunction::new(move |x| {
                libm::exp(-s * x) / (2.0 * s) - libm::exp(-b * x) / (2.0 * b)
            });
            Ok((h, g))
        }
    }
}

/// The point-pair function of the heat pair at time `t`:
/// `k(cosh ℓ) = e^{−t} ℓ e^{−ℓ²/(4t)} / ((4πt)^{3/2} sinh ℓ)`, with the limit
/// `e^{−t}/(4πt)^{3/2}` at `ℓ = 0`.
pub fn heat_point_pair(t: f64) -> Result<PointPairFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Invalid("heat pair needs t > 0".into()));
    }
    let norm = libm::exp(-t) / libm::pow(4.0 * PI * t, 1.5);
    PointPairFunction::new(
        move |x| {
            let ell = libm::acosh(x.max(1.0));
            let ratio = if ell < 1e-6 {
                1.0 - ell * ell / 6.0
            } else {
                ell / libm::sinh(ell)
            };
            norm * ratio * libm::exp(-ell * ell / (4.0 * t))
        },
        f64::INFINITY,
        true,
    )
}

/// `ε` in the `3/2 − ε` growth exponent used by [`check_admissible`].
pub const ADMISSIBILITY_EPS: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub pass: bool,
    pub growth_bounded: bool,
    pub even: bool,
    pub strip_ok: bool,
    pub max_ratio: f64,
    /// `(t, |h(1+t²)|·(1+t²)^{−(3/2−ε)})` at the sample that broke the bound.
    pub offending: Option<(f64, f64)>,
}

/// Sample `|h(1+t²)|·(1+t²)^{−(3/2−ε)}` on a geometric grid in `[1, 10⁴]`.
/// The bound counts as violated when a sample in the last decade exceeds ten
/// times the largest sample of the first decade (or one, if larger), or is not
/// finite.
pub fn check_admissible(h: &SpectralTestFunction) -> AdmissibilityReport {
    let exponent = 1.5 - ADMISSIBILITY_EPS;
    let samples: Vec<(f64, f64)> = (0..=80)
        .map(|i| {
            let t = libm::pow(10.0, i as f64 / 20.0);
            let w = 1.0 + t * t;
            (t, h.on_line(t).norm() * libm::pow(w, -exponent))
        })
        .collect();
    let first = samples
        .iter()
        .filter(|(t, _)| *t <= 10.0)
        .map(|s| s.1)
        .fold(0.0f64, f64::max);
    let limit = 10.0 * first.max(1.0);
    let max_ratio = samples.iter().map(|s| s.1).fold(0.0f64, f64::max);
    let offending = samples
        .iter()
        .find(|(t, r)| !r.is_finite() || (*t >= 1e3 && *r > limit))
        .copied();
    let even = samples.iter().all(|&(t, _)| {
        let a = h.eval(C64::new(1.0, 0.0) + C64::new(t, 0.0) * C64::new(t, 0.0));
        let b = h.eval(C64::new(1.0, 0.0) + C64::new(-t, 0.0) * C64::new(-t, 0.0));
        (a - b).norm() <= 1e-12 * a.norm().max(1.0)
    });
    let strip_ok =
        h.strip_halfwidth > 2.0 || h.strip_halfwidth > 1.0 && h.decay_exponent.is_finite();
    let growth_bounded = offending.is_none();
    AdmissibilityReport {
        pass: growth_bounded && even,
        growth_bounded,
        even,
        strip_ok,
        max_ratio,
        offending,
    }
}
