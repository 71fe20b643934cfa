//! Rigidity comparisons between spectral packages.
//!
//! A [`SpectrumPackage`] bundles the distinct eigenvalue spectrum with its
//! Hecke traces, the length spectrum and the elliptic number. The resolvent
//! identity ties the three together for the test pair
//! `g(x) = e^{−s|x|}/(2s) − e^{−B|x|}/(2B)`, and the comparators report how two
//! packages differ.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quadrature::ComplexSum;
use crate::scalars::C64;
use crate::trace::{spectral_parameter, LengthSpectrum, SpectralConvention, SpectralData};

/// Tolerance on values and weights when matching spectrum entries.
pub const MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPackage {
    pub label: String,
    pub spectrum: Option<SpectralData>,
    pub lengths: Option<LengthSpectrum>,
    pub elliptic_number: Option<f64>,
}

impl SpectrumPackage {
    /// Builds a package, converting the eigenvalue list to one entry per distinct λ.
    pub fn new(
        label: impl Into<String>,
        spectrum: Option<SpectralData>,
        lengths: Option<LengthSpectrum>,
        elliptic_number: Option<f64>,
    ) -> Result<Self> {
        if let Some(e) = elliptic_number {
            if !e.is_finite() {
                return Err(Error::Invalid("elliptic number must be finite".into()));
            }
        }
        let spectrum = spectrum.map(|s| match s.convention() {
            SpectralConvention::Distinct => s,
            SpectralConvention::WithMultiplicity => s.to_distinct(),
        });
        Ok(SpectrumPackage {
            label: label.into(),
            spectrum,
            lengths,
            elliptic_number,
        })
    }

    pub fn empty(label: impl Into<String>) -> Self {
        SpectrumPackage {
            label: label.into(),
            spectrum: Some(SpectralData::empty()),
            lengths: Some(LengthSpectrum::empty()),
            elliptic_number: Some(0.0),
        }
    }
}

fn required<'a, T>(x: &'a Option<T>, what: &str) -> Result<&'a T> {
    x.as_ref()
        .ok_or_else(|| Error::Precondition(alloc::format!("package has no {what}")))
}

/// The two sides of the resolvent identity at one `(s, B)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolventSides {
    /// `Σ w (e^{−sμ}/(2s) − e^{−Bμ}/(2B))` over the length spectrum.
    pub lengths: C64,
    /// `Σ ω (1/(s² − s_n²) − 1/(B² − s_n²))` over the distinct spectrum.
    pub spectral: C64,
    /// `(1/(2s) − 1/(2B)) E`.
    pub elliptic: C64,
}

impl ResolventSides {
    pub fn residual(&self) -> C64 {
        self.lengths - (self.spectral - self.elliptic)
    }
}

pub fn resolvent_sides(p: &SpectrumPackage, s: C64, b: C64) -> Result<ResolventSides> {
    if !(s.re > 1.0) || !(b.re > 1.0) {
        return Err(Error::OutsideConvergenceRegion);
    }
    if !(s.re < b.re) {
        return Err(Error::Precondition("Re s < Re B required".into()));
    }
    let sd = required(&p.spectrum, "eigenvalue spectrum")?;
    let ls = required(&p.lengths, "length spectrum")?;
    let e = *required(&p.elliptic_number, "elliptic number")?;

    let g = |x: f64| (-s * x).exp() / (s * 2.0) - (-b * x).exp() / (b * 2.0);
    let mut lengths = ComplexSum::new();
    for entry in ls.entries() {
        lengths.add(g(entry.mu) * entry.weight);
    }
    let (s2, b2) = (s * s, b * b);
    let mut spectral = ComplexSum::new();
    for entry in sd.entries() {
        let sn = spectral_parameter(entry.lambda);
        let sn2 = sn * sn;
        let (ds, db) = (s2 - sn2, b2 - sn2);
        if ds.norm() == 0.0 || db.norm() == 0.0 {
            return Err(Error::DivisionByZero);
        }
        spectral.add(entry.omega * (ds.inv() - db.inv()));
    }
    Ok(ResolventSides {
        lengths: lengths.value(),
        spectral: spectral.value(),
        elliptic: g(0.0) * e,
    })
}

/// Length side minus spectral side of the resolvent identity.
pub fn resolvent_identity_residual(p: &SpectrumPackage, s: C64, b: C64) -> Result<C64> {
    Ok(resolvent_sides(p, s, b)?.residual())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareMode {
    Eigenvalues,
    Lengths,
}

impl CompareMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CompareMode::Eigenvalues => "S",
            CompareMode::Lengths => "L",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Identical,
    /// `k` entries unmatched in total, a minority of both lists.
    Finite(usize),
    Cofinite(usize),
}

impl Outcome {
    pub fn describe(&self) -> String {
        match self {
            Outcome::Identical => "identical".into(),
            Outcome::Finite(k) => alloc::format!("finite difference of size {k}"),
            Outcome::Cofinite(_) => "cofinitely different".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityReport {
    pub mode: CompareMode,
    pub left_label: String,
    pub right_label: String,
    pub outcome: Outcome,
    /// Indices of unmatched entries in each list.
    pub only_left: Vec<usize>,
    pub only_right: Vec<usize>,
    pub contradiction: bool,
    pub left_elliptic: Option<f64>,
    pub right_elliptic: Option<f64>,
    pub elliptic_equal: Option<bool>,
}

impl RigidityReport {
    /// The same report with the two sides exchanged.
    pub fn swapped(&self) -> RigidityReport {
        RigidityReport {
            mode: self.mode,
            left_label: self.right_label.clone(),
            right_label: self.left_label.clone(),
            outcome: self.outcome,
            only_left: self.only_right.clone(),
            only_right: self.only_left.clone(),
            contradiction: self.contradiction,
            left_elliptic: self.right_elliptic,
            right_elliptic: self.left_elliptic,
            elliptic_equal: self.elliptic_equal,
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MATCH_TOL * (1.0 + a.abs().max(b.abs()))
}

fn close_c(a: C64, b: C64) -> bool {
    (a - b).norm() <= MATCH_TOL * (1.0 + a.norm().max(b.norm()))
}

/// Merges two strictly increasing lists. Entries of equal value pair up and
/// count as matched only when their weights agree as well.
fn match_entries<W: Copy>(
    left: &[(f64, W)],
    right: &[(f64, W)],
    same_weight: impl Fn(W, W) -> bool,
) -> (Vec<usize>, Vec<usize>) {
    let (mut only_left, mut only_right) = (Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if close(left[i].0, right[j].0) {
            if !same_weight(left[i].1, right[j].1) {
                only_left.push(i);
                only_right.push(j);
            }
            i += 1;
            j += 1;
        } else if left[i].0 < right[j].0 {
            only_left.push(i);
            i += 1;
        } else {
            only_right.push(j);
            j += 1;
        }
    }
    only_left.extend(i..left.len());
    only_right.extend(j..right.len());
    (only_left, only_right)
}

fn outcome(n_left: usize, n_right: usize, only_left: usize, only_right: usize) -> Outcome {
    let k = only_left + only_right;
    if k == 0 {
        Outcome::Identical
    } else if 2 * only_left > n_left || 2 * only_right > n_right {
        Outcome::Cofinite(k)
    } else {
        Outcome::Finite(k)
    }
}

pub fn compare_spectra(
    a: &SpectrumPackage,
    b: &SpectrumPackage,
    mode: CompareMode,
) -> Result<RigidityReport> {
    let (only_left, only_right, n_left, n_right) = match mode {
        CompareMode::Lengths => {
            let list = |p: &SpectrumPackage| -> Result<Vec<(f64, f64)>> {
                Ok(required(&p.lengths, "length spectrum")?
                    .entries()
                    .iter()
                    .map(|e| (e.mu, e.weight))
                    .collect())
            };
            let (l, r) = (list(a)?, list(b)?);
            let (ol, or) = match_entries(&l, &r, close);
            (ol, or, l.len(), r.len())
        }
        CompareMode::Eigenvalues => {
            let list = |p: &SpectrumPackage| -> Result<Vec<(f64, C64)>> {
                Ok(required(&p.spectrum, "eigenvalue spectrum")?
                    .entries()
                    .iter()
                    .map(|e| (e.lambda, e.omega))
                    .collect())
            };
            let (l, r) = (list(a)?, list(b)?);
            let (ol, or) = match_entries(&l, &r, close_c);
            (ol, or, l.len(), r.len())
        }
    };
    let outcome = outcome(n_left, n_right, only_left.len(), only_right.len());
    let elliptic_equal = match (a.elliptic_number, b.elliptic_number) {
        (Some(x), Some(y)) => Some(close(x, y)),
        _ => None,
    };
    Ok(RigidityReport {
        mode,
        left_label: a.label.clone(),
        right_label: b.label.clone(),
        outcome,
        only_left,
        only_right,
        contradiction: matches!(outcome, Outcome::Finite(_)),
        left_elliptic: a.elliptic_number,
        right_elliptic: b.elliptic_number,
        elliptic_equal,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorollaryReport {
    /// Indices into the shared λ list where the Hecke traces differ.
    pub differing: Vec<usize>,
    pub outcome: Outcome,
    pub contradiction: bool,
}

/// Compares the Hecke traces of two packages over one shared eigenvalue list.
pub fn corollary_check(a: &SpectrumPackage, b: &SpectrumPackage) -> Result<CorollaryReport> {
    let (l, r) = (
        required(&a.spectrum, "eigenvalue spectrum")?,
        required(&b.spectrum, "eigenvalue spectrum")?,
    );
    let (l, r) = (l.entries(), r.entries());
    if l.len() != r.len() || l.iter().zip(r).any(|(x, y)| !close(x.lambda, y.lambda)) {
        return Err(Error::NotSingleGroupComparison);
    }
    let differing: Vec<usize> = l
        .iter()
        .zip(r)
        .enumerate()
        .filter(|(_, (x, y))| !close_c(x.omega, y.omega))
        .map(|(i, _)| i)
        .collect();
    let k = differing.len();
    let outcome = if k == 0 {
        Outcome::Identical
    } else if 2 * k > l.len() {
        Outcome::Cofinite(k)
    } else {
        Outcome::Finite(k)
    };
    Ok(CorollaryReport {
        differing,
        outcome,
        contradiction: matches!(outcome, Outcome::Finite(_)),
    })
}
