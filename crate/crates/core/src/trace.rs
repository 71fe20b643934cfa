//! Both sides of the trace identity on finite data: closed-form class terms,
//! a quadrature oracle for orbital integrals, the spectral sum, and the
//! elliptic number, heat trace and norm gap built from them.
//!
//! A loxodromic class `{T}` contributes
//!
//! ```text
//! tr χ(T⁻¹)* · g(log N(T)) · log N(T₀) / (|𝓔(T)| · |a(T) − a(T)⁻¹|²)
//! ```
//!
//! and an elliptic class `{R}` contributes
//! `tr χ(R⁻¹)* · g(0) · log N(T₀) / (|𝓔(R)| · |tr(R)² − 4|)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::conjugacy::{CentralizerData, ClassKind, ClassRecord};
use crate::correspondence::{chi_layer_inverse, CorrespondenceData, ElementRef, UnitaryRep};
use crate::error::{Error, Result};
use crate::groupdata::{GroupSlice, Listing};
use crate::isometry::{apply, classify, conjugate_to_normal_form, delta, Isometry, PointH3};
use crate::linalg::CMatrix;
use crate::quadrature::{integrate_with, uniform_breaks, CompensatedSum, ComplexSum, QuadConfig};
use crate::scalars::C64;
use crate::transforms::{GeodesicTestFunction, PointPairFunction, SpectralTestFunction};

/// Threshold on `|tr² − 4|` below which an elliptic class is rejected.
pub const DEGENERATE_ELLIPTIC: f64 = 1e-12;

fn centralizer(c: &ClassRecord) -> Result<&CentralizerData> {
    c.centralizer.as_ref().map_err(|e| e.clone())
}

/// `log N(T₀) / (|𝓔| · |a − a⁻¹|²)`, the χ- and `g`-free loxodromic weight.
pub fn loxodromic_weight(c: &ClassRecord) -> Result<f64> {
    if c.kind != ClassKind::Loxodromic {
        return Err(Error::Precondition("loxodromic class expected".into()));
    }
    let z = centralizer(c)?;
    let a = c
        .a_of_t
        .ok_or_else(|| Error::Precondition("loxodromic class without eigenvalue".into()))?;
    let gap = (a - a.inv()).norm_sqr();
    Ok(libm::log(z.n_t0) / (f64::from(z.elliptic_order) * gap))
}

/// `log N(T₀) / (|𝓔| · |tr² − 4|)` for an elliptic class.
pub fn elliptic_weight(c: &ClassRecord) -> Result<f64> {
    if c.kind != ClassKind::Elliptic {
        return Err(Error::Precondition("elliptic class expected".into()));
    }
    if c.trace_gap < DEGENERATE_ELLIPTIC {
        return Err(Error::DegenerateElliptic);
    }
    let z = centralizer(c)?;
    Ok(libm::log(z.n_t0) / (f64::from(z.elliptic_order) * c.trace_gap))
}

pub fn loxodromic_term(c: &ClassRecord, g: &GeodesicTestFunction, chi_weight: C64) -> Result<C64> {
    let w = loxodromic_weight(c)?;
    let len = c.length().expect("loxodromic");
    Ok(chi_weight * (g.eval(len) * w))
}

pub fn elliptic_term(c: &ClassRecord, g0: f64, chi_weight: C64) -> Result<C64> {
    Ok(chi_weight * (g0 * elliptic_weight(c)?))
}

/// Relative accuracy demanded of the oracle's doubled-resolution check.
pub const ORACLE_REL_TOL: f64 = 1e-4;

/// `∫ k(δ(P, TP)) dv` over a fundamental domain of the centralizer, by
/// direct three-dimensional quadrature.
///
/// `T` is first conjugated to normal form, so the axis is vertical and `T₀`
/// scales the quaternion norm `|P|` by `N(T₀)`; `𝓔` rotates about the axis.
/// The domain is the shell `1 ≤ |P| < N(T₀)` cut to the sector
/// `0 ≤ arg z < 2π/|𝓔|`. In shell coordinates `P = R(sin θ e^{iφ} + cos θ j)`
/// the volume element is `(dR/R) · (sin θ / cos³ θ) dθ dφ`.
pub fn orbital_integral_oracle(
    t: &Isometry,
    cent: &CentralizerData,
    k: &PointPairFunction,
) -> Result<f64> {
    let (c, d) = conjugate_to_normal_form(t)?;
    let t0 = c.conjugate(&cent.t0);
    let m0 = t0.matrix();
    if m0.b.norm().max(m0.c.norm()) > 1e-8 * (1.0 + libm::sqrt(m0.frob2())) {
        return Err(Error::Precondition(
            "T0 does not share the axis of T".into(),
        ));
    }
    if cent.elliptic_order == 0 || !(cent.n_t0 > 1.0) {
        return Err(Error::Precondition("centralizer data out of range".into()));
    }
    let log_n0 = libm::log(cent.n_t0);
    let sector = 2.0 * PI / f64::from(cent.elliptic_order);
    let theta_top = theta_limit(&d, k)?;
    if theta_top <= 0.0 {
        return Ok(0.0);
    }
    let integrand = |log_r: f64, phi: f64, theta: f64| -> Result<f64> {
        let r = libm::exp(log_r);
        let (st, ct) = (libm::sin(theta), libm::cos(theta));
        let p = PointH3::new(C64::from_polar(r * st, phi), r * ct)?;
        let q = apply(&d, &p);
        Ok(k.eval(delta(&p, &q)) * st / (ct * ct * ct))
    };
    let run = |pieces: usize| -> Result<f64> {
        let cfg = QuadConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-9,
            max_intervals: 2000,
        };
        let theta_breaks = uniform_breaks(0.0, theta_top, 8 * pieces);
        let mut failure: Option<Error> = None;
        let mut fail = |e: Error| {
            failure.get_or_insert(e);
            0.0
        };
        let outer = integrate_with(
            |log_r| {
                let mid = integrate_with(
                    |phi| {
                        integrate_with(
                            |th| integrand(log_r, phi, th).unwrap_or_else(&mut fail),
                            &theta_breaks,
                            &cfg,
                        )
                        .map(|q| q.value)
                        .unwrap_or_else(&mut fail)
                    },
                    &uniform_breaks(0.0, sector, pieces),
                    &cfg,
                );
                mid.map(|q| q.value).unwrap_or_else(&mut fail)
            },
            &uniform_breaks(0.0, log_n0, pieces),
            &cfg,
        );
        let value = outer.map(|q| q.value).unwrap_or_else(fail);
        match failure {
            Some(e) => Err(Error::OracleQuadratureFailed(format!("{e}"))),
            None => Ok(value),
        }
    };
    let coarse = run(1)?;
    let fine = run(2)?;
    if (coarse - fine).abs() > ORACLE_REL_TOL * fine.abs().max(1e-300)
        && (coarse - fine).abs() > 1e-15
    {
        return Err(Error::OracleQuadratureFailed(format!(
            "resolutions disagree: {coarse:e} vs {fine:e}"
        )));
    }
    Ok(fine)
}

/// Largest polar angle at which `k(δ(P, DP))` can be nonzero.
fn theta_limit(d: &Isometry, k: &PointPairFunction) -> Result<f64> {
    let half = core::f64::consts::FRAC_PI_2;
    // δ(P, DP) = A tan²θ + B on the unit shell for diagonal D
    let at = |theta: f64| -> Result<f64> {
        let p = PointH3::new(C64::new(libm::sin(theta), 0.0), libm::cos(theta))?;
        Ok(delta(&p, &apply(d, &p)))
    };
    let b = at(0.0)?;
    let a = at(PI / 4.0)? - b;
    if k.has_bounded_support() {
        let top = k.support_bound();
        if top < b {
            return Ok(0.0);
        }
        if a <= 0.0 {
            return Err(Error::Precondition("T acts trivially on the shell".into()));
        }
        return Ok(libm::atan(libm::sqrt((top - b) / a)).min(half));
    }
    // unbounded support: stop where the weighted integrand is negligible
    let weight = |theta: f64| -> Result<f64> {
        let (st, ct) = (libm::sin(theta), libm::cos(theta));
        Ok(k.eval(at(theta)?).abs() * st / (ct * ct * ct))
    };
    let mut peak = 0.0f64;
    let steps = 2000;
    let mut last = 0.0;
    for i in 1..steps {
        let theta = half * i as f64 / steps as f64;
        let w = weight(theta)?;
        if !w.is_finite() {
            break;
        }
        peak = peak.max(w);
        if w > 1e-16 * peak {
            last = half * (i + 1) as f64 / steps as f64;
        }
    }
    Ok(last.min(half * (1.0 - 1e-9)))
}

/// The class terms on one side of the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricSide {
    /// `(class index, value)` in class order.
    pub elliptic_terms: Vec<(usize, C64)>,
    pub loxodromic_terms: Vec<(usize, C64)>,
    pub elliptic_total: C64,
    pub loxodromic_total: C64,
    pub total: C64,
    /// χ-free elliptic number of the classes summed.
    pub elliptic_number: f64,
    pub truncation_radius: f64,
    pub chi_weights_applied: bool,
    pub tail: TailEstimate,
}

/// An estimate of the loxodromic classes missing from a truncated slice.
///
/// Classes of length up to `complete_below` are taken as complete. Beyond it
/// the weight density is modelled as `κ e^{ℓ}`, with `κ` fitted to the
/// classes below the cutoff, and the estimate is `κ ∫ |g(ℓ)| e^{ℓ} dℓ` over
/// `ℓ ≥ complete_below`. Every missing length exceeds `log c₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate {
    pub complete_below: f64,
    pub density: f64,
    pub value: f64,
}

impl TailEstimate {
    fn zero(complete_below: f64) -> Self {
        TailEstimate {
            complete_below,
            density: 0.0,
            value: 0.0,
        }
    }
}

fn is_identity_rep(chi: &UnitaryRep) -> bool {
    chi.is_trivial_on_gamma() && chi.chi_alpha().max_diff(&CMatrix::identity(chi.dim())) <= 1e-10
}

/// `tr χ(T⁻¹)*` for the class representative.
fn chi_weight(
    s: &GroupSlice,
    cd: Option<&CorrespondenceData>,
    listing: &Listing,
    c: &ClassRecord,
    chi: &UnitaryRep,
) -> Result<C64> {
    if chi.word(ElementRef::Layer(c.rep_index)).is_none() && is_identity_rep(chi) {
        return Ok(C64::new(chi.dim() as f64, 0.0));
    }
    let inv = match (chi.chi_layer(c.rep_index), cd) {
        (Some((_, inv)), _) => inv,
        (None, Some(cd)) => chi_layer_inverse(s, cd, chi, listing, c.rep_index)?,
        (None, None) => return Err(Error::MissingWord(format!("double_coset:{}", c.rep_index))),
    };
    Ok(inv.adjoint().trace())
}

/// Options for [`geometric_side`].
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct GeometricOptions {
    /// Covering radius of Γ, if known. Classes with `log N(T)` below
    /// `radius − 2·covering_radius` are then complete.
    pub covering_radius: Option<f64>,
}

/// Sum the class terms of `classes`, which must come from the layer of `s`.
/// The coset data `cd` lets χ be evaluated on representatives without a
/// recorded word.
pub fn geometric_side(
    s: &GroupSlice,
    cd: Option<&CorrespondenceData>,
    classes: &[ClassRecord],
    g: &GeodesicTestFunction,
    chi: &UnitaryRep,
    opts: &GeometricOptions,
) -> Result<GeometricSide> {
    let g0 = g.at_zero();
    let mut ell_sum = ComplexSum::new();
    let mut lox_sum = ComplexSum::new();
    let mut e_sum = CompensatedSum::new();
    let mut elliptic_terms = Vec::new();
    let mut loxodromic_terms = Vec::new();
    let listing = s.gamma_listing();
    let radius = s.radius;
    for (i, c) in classes.iter().enumerate() {
        if !c.resolved {
            return Err(Error::Precondition(format!("class {i} is unresolved")));
        }
        let w = chi_weight(s, cd, &listing, c, chi)?;
        match c.kind {
            ClassKind::Elliptic => {
                let v = elliptic_term(c, g0, w)?;
                e_sum.add(elliptic_weight(c)?);
                ell_sum.add(v);
                elliptic_terms.push((i, v));
            }
            ClassKind::Loxodromic => {
                let v = loxodromic_term(c, g, w)?;
                lox_sum.add(v);
                loxodromic_terms.push((i, v));
            }
        }
    }
    let complete_below = match opts.covering_radius {
        Some(rho) => radius - 2.0 * rho,
        None => radius,
    };
    let tail = tail_estimate(classes, g, complete_below)?;
    let (elliptic_total, loxodromic_total) = (ell_sum.value(), lox_sum.value());
    Ok(GeometricSide {
        elliptic_terms,
        loxodromic_terms,
        elliptic_total,
        loxodromic_total,
        total: elliptic_total + loxodromic_total,
        elliptic_number: e_sum.value(),
        truncation_radius: radius,
        chi_weights_applied: !is_identity_rep(chi),
        tail,
    })
}

fn tail_estimate(
    classes: &[ClassRecord],
    g: &GeodesicTestFunction,
    complete_below: f64,
) -> Result<TailEstimate> {
    let lox: Vec<&ClassRecord> = classes
        .iter()
        .filter(|c| c.kind == ClassKind::Loxodromic)
        .collect();
    if lox.is_empty() {
        return Ok(TailEstimate::zero(complete_below));
    }
    let c0 = norm_gap(classes)?;
    let lo = libm::log(c0);
    if complete_below <= lo {
        return Ok(TailEstimate {
            complete_below,
            density: f64::NAN,
            value: f64::INFINITY,
        });
    }
    let mut found = CompensatedSum::new();
    for c in &lox {
        if c.length().expect("loxodromic") <= complete_below {
            found.add(loxodromic_weight(c)?);
        }
    }
    let density = found.value() / (libm::exp(complete_below) - libm::exp(lo));
    let top = complete_below + 60.0;
    let cfg = QuadConfig {
        abs_tol: 1e-300,
        rel_tol: 1e-8,
        max_intervals: 4000,
    };
    let integral = integrate_with(
        |l| g.eval(l).abs() * libm::exp(l),
        &uniform_breaks(complete_below, top, 60),
        &cfg,
    )?;
    Ok(TailEstimate {
        complete_below,
        density,
        value: density * integral.value,
    })
}

/// Ordering of spectral entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralConvention {
    /// One entry per eigenline, repeated eigenvalues allowed.
    WithMultiplicity,
    /// One entry per distinct eigenvalue, `ω(λ)` a trace over the eigenspace.
    Distinct,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEntry {
    pub lambda: f64,
    pub omega: C64,
}

impl SpectralEntry {
    /// The root of `s² = 1 − λ` with nonnegative real and imaginary parts.
    pub fn s(&self) -> C64 {
        spectral_parameter(self.lambda)
    }
}

pub fn spectral_parameter(lambda: f64) -> C64 {
    let x = 1.0 - lambda;
    if x >= 0.0 {
        C64::new(libm::sqrt(x), 0.0)
    } else {
        C64::new(0.0, libm::sqrt(-x))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    entries: Vec<SpectralEntry>,
    convention: SpectralConvention,
}

impl SpectralData {
    pub fn new(entries: Vec<SpectralEntry>, convention: SpectralConvention) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if !(e.lambda >= 0.0
                && e.lambda.is_finite()
                && e.omega.re.is_finite()
                && e.omega.im.is_finite())
            {
                return Err(Error::Invalid(format!(
                    "spectral entry {i} is not finite with λ ≥ 0"
                )));
            }
        }
        for (i, w) in entries.windows(2).enumerate() {
            let ok = match convention {
                SpectralConvention::WithMultiplicity => w[0].lambda <= w[1].lambda,
                SpectralConvention::Distinct => w[0].lambda < w[1].lambda,
            };
            if !ok {
                return Err(Error::Invalid(format!(
                    "spectral entries {i} and {} are out of order",
                    i + 1
                )));
            }
        }
        Ok(SpectralData {
            entries,
            convention,
        })
    }

    pub fn empty() -> Self {
        SpectralData {
            entries: Vec::new(),
            convention: SpectralConvention::Distinct,
        }
    }

    pub fn entries(&self) -> &[SpectralEntry] {
        &self.entries
    }

    pub fn convention(&self) -> SpectralConvention {
        self.convention
    }

    /// Merge equal eigenvalues, summing their `ω`.
    pub fn to_distinct(&self) -> SpectralData {
        let mut out: Vec<SpectralEntry> = Vec::new();
        for e in &self.entries {
            match out.last_mut() {
                Some(last) if last.lambda == e.lambda => last.omega += e.omega,
                _ => out.push(*e),
            }
        }
        SpectralData {
            entries: out,
            convention: SpectralConvention::Distinct,
        }
    }
}

pub fn spectral_side(sd: &SpectralData, h: &SpectralTestFunction) -> C64 {
    let mut sum = ComplexSum::new();
    for e in &sd.entries {
        sum.add(h.eval(C64::new(e.lambda, 0.0)) * e.omega);
    }
    sum.value()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthEntry {
    pub mu: f64,
    pub weight: f64,
}

/// Lengths `log N(T)` with their aggregated loxodromic weights.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthSpectrum {
    entries: Vec<LengthEntry>,
}

/// Relative tolerance under which two class lengths are merged.
pub const LENGTH_MERGE_TOL: f64 = 1e-9;

impl LengthSpectrum {
    pub fn new(entries: Vec<LengthEntry>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if !(e.mu > 0.0 && e.mu.is_finite() && e.weight > 0.0 && e.weight.is_finite()) {
                return Err(Error::Invalid(format!(
                    "length entry {i} needs μ > 0 and weight > 0"
                )));
            }
        }
        if entries.windows(2).any(|w| w[0].mu >= w[1].mu) {
            return Err(Error::Invalid("lengths must be strictly increasing".into()));
        }
        Ok(LengthSpectrum { entries })
    }

    pub fn empty() -> Self {
        LengthSpectrum {
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[LengthEntry] {
        &self.entries
    }

    /// Aggregate the loxodromic classes by length.
    pub fn from_classes(classes: &[ClassRecord]) -> Result<Self> {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for c in classes.iter().filter(|c| c.kind == ClassKind::Loxodromic) {
            pts.push((c.length().expect("loxodromic"), loxodromic_weight(c)?));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut entries: Vec<LengthEntry> = Vec::new();
        let mut sums: Vec<CompensatedSum> = Vec::new();
        for (mu, w) in pts {
            match entries.last_mut() {
                Some(last) if (mu - last.mu).abs() <= LENGTH_MERGE_TOL * mu.max(1.0) => {
                    sums.last_mut().expect("parallel").add(w);
                }
                _ => {
                    entries.push(LengthEntry { mu, weight: 0.0 });
                    let mut s = CompensatedSum::new();
                    s.add(w);
                    sums.push(s);
                }
            }
        }
        for (e, s) in entries.iter_mut().zip(&sums) {
            e.weight = s.value();
        }
        Self::new(entries)
    }
}

/// The χ-free sum of elliptic weights.
pub fn elliptic_number(classes: &[ClassRecord]) -> Result<f64> {
    let mut sum = CompensatedSum::new();
    for c in classes.iter().filter(|c| c.kind == ClassKind::Elliptic) {
        sum.add(elliptic_weight(c)?);
    }
    Ok(sum.value())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatTrace {
    pub t: f64,
    pub elliptic_piece: f64,
    pub loxodromic_piece: f64,
    pub total: f64,
}

/// `(e^{−t}/√(4πt)) · (E + Σ_lox e^{−(log N(T))²/(4t)} · weight)`.
pub fn heat_trace_geometric(
    classes: &[ClassRecord],
    elliptic_number: f64,
    t: f64,
) -> Result<HeatTrace> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Invalid("heat trace needs t > 0".into()));
    }
    let pre = libm::exp(-t) / libm::sqrt(4.0 * PI * t);
    let mut lox = CompensatedSum::new();
    for c in classes.iter().filter(|c| c.kind == ClassKind::Loxodromic) {
        let len = c.length().expect("loxodromic");
        lox.add(libm::exp(-len * len / (4.0 * t)) * loxodromic_weight(c)?);
    }
    let (elliptic_piece, loxodromic_piece) = (pre * elliptic_number, pre * lox.value());
    Ok(HeatTrace {
        t,
        elliptic_piece,
        loxodromic_piece,
        total: elliptic_piece + loxodromic_piece,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatAsymptoticRow {
    pub t: f64,
    pub heat: f64,
    pub leading: f64,
    pub remainder: f64,
    /// `remainder / √t`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatAsymptoticReport {
    pub rows: Vec<HeatAsymptoticRow>,
    /// Least-squares slope of `log ratio` against `log t`.
    pub slope: f64,
    pub max_ratio: f64,
    pub bounded: bool,
}

/// Slope below which the remainder ratio counts as growing as `t → 0`.
pub const GROWTH_SLOPE: f64 = -0.5;

/// Compare the heat trace of `classes` with the claimed leading term
/// `E/√(4πt)` along a decreasing grid; the remainder should be `O(√t)`.
pub fn heat_asymptotic_check(
    classes: &[ClassRecord],
    claimed_e: f64,
    t_grid: &[f64],
) -> Result<HeatAsymptoticReport> {
    if t_grid.is_empty()
        || t_grid.iter().any(|&t| !(t > 0.0))
        || t_grid.windows(2).any(|w| w[0] <= w[1])
    {
        return Err(Error::Invalid(
            "t grid must be positive and decreasing".into(),
        ));
    }
    let actual_e = elliptic_number(classes)?;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let heat = heat_trace_geometric(classes, actual_e, t)?.total;
        let leading = claimed_e / libm::sqrt(4.0 * PI * t);
        let remainder = (heat - leading).abs();
        rows.push(HeatAsymptoticRow {
            t,
            heat,
            leading,
            remainder,
            ratio: remainder / libm::sqrt(t),
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.ratio > 0.0)
        .map(|r| (libm::log(r.t), libm::log(r.ratio)))
        .collect();
    let slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    } else {
        0.0
    };
    Ok(HeatAsymptoticReport {
        rows,
        slope,
        max_ratio,
        bounded: slope > GROWTH_SLOPE,
    })
}

/// Least norm among the loxodromic classes.
pub fn norm_gap(classes: &[ClassRecord]) -> Result<f64> {
    let c0 = classes
        .iter()
        .filter_map(|c| c.norm)
        .fold(None, |m: Option<f64>, n| Some(m.map_or(n, |m| m.min(n))))
        .ok_or_else(|| Error::Precondition("norm gap needs a loxodromic class".into()))?;
    if c0 <= 1.0 + 1e-9 {
        return Err(Error::NormGapViolated);
    }
    Ok(c0)
}

/// `vol / (8π^{3/2}) · t^{−3/2}`.
pub fn weyl_prediction(vol: f64, t: f64) -> Result<f64> {
    if !(vol > 0.0 && t > 0.0) {
        return Err(Error::Invalid(
            "Weyl prediction needs vol > 0 and t > 0".into(),
        ));
    }
    Ok(vol / (8.0 * libm::pow(PI, 1.5)) * libm::pow(t, -1.5))
}

/// A class record for a single element with known centralizer data, for
/// planted examples.
pub fn planted_class(t: &Isometry, centralizer: CentralizerData) -> Result<ClassRecord> {
    let c = classify(t)?;
    let kind = match c.kind {
        crate::isometry::Kind::Elliptic => ClassKind::Elliptic,
        crate::isometry::Kind::Loxodromic => ClassKind::Loxodromic,
        _ => {
            return Err(Error::Precondition(String::from(
                "planted class must be elliptic or loxodromic",
            )))
        }
    };
    let tr = t.trace();
    Ok(ClassRecord {
        representative: t.clone(),
        rep_index: 0,
        kind,
        members: Vec::from([0]),
        trace: tr,
        a_of_t: c.a_of_t,
        norm: c.norm,
        trace_gap: (tr * tr - 4.0).norm(),
        invariant: None,
        resolved: true,
        centralizer: Ok(centralizer),
    })
}
