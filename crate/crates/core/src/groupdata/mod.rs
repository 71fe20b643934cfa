//! Finite, radius-bounded slices of a cocompact group and of one double
//! coset, and the arithmetic factory producing them from a quaternion order.

mod order;

pub use order::{
    anisotropy_report, centralizer_units, enumerate_order, find_conjugator, reference_order,
    split_order, AnisotropyReport, Coefficients, FactoryOutput, OrderConfig, PrimeCheck,
    UnitSearch,
};

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::isometry::{classify, CMat, ExactMat, Isometry, IsometryIndex, Kind};
use crate::scalars::{Exact, FieldSpec, DEFAULT_TOL};

/// Scalar backend of a slice.
#[derive(Clone, Debug, PartialEq)]
pub enum SliceField {
    Exact(Arc<FieldSpec>),
    Approx,
}

/// A matrix as it appears in a data file, before validation.
#[derive(Clone, Debug, PartialEq)]
pub enum RawMatrix {
    Exact(ExactMat),
    Approx(CMat),
}

impl RawMatrix {
    pub fn from_isometry(g: &Isometry) -> Self {
        match g.exact() {
            Some(x) => RawMatrix::Exact(x.clone()),
            None => RawMatrix::Approx(*g.matrix()),
        }
    }
}

/// Unvalidated slice contents.
#[derive(Clone, Debug)]
pub struct RawSlice {
    pub field: SliceField,
    pub radius: f64,
    pub alpha: RawMatrix,
    pub gamma: Vec<RawMatrix>,
    pub double_coset: Vec<RawMatrix>,
    /// Determinant of the stored α-layer matrices (exact backend); absent
    /// means the layer is stored with determinant one.
    pub hecke_norm: Option<Exact>,
    pub centralizer_witnesses: Vec<RawMatrix>,
    pub provenance: String,
}

/// A validated slice. Every listed element satisfies
/// `δ(g·j, j) ≤ cosh(radius)`; the Γ list is complete within that radius.
#[derive(Clone, Debug)]
pub struct GroupSlice {
    pub field: SliceField,
    pub radius: f64,
    pub alpha: Isometry,
    pub gamma: Vec<Isometry>,
    pub double_coset: Vec<Isometry>,
    pub hecke_norm: Option<Exact>,
    /// Γ elements beyond the radius, each certified by exact arithmetic,
    /// supplied so that centralizer generators can be witnessed.
    pub centralizer_witnesses: Vec<Isometry>,
    pub provenance: String,
}

/// Whether `α ∈ Γ` is tolerated (degenerate decompositions only).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    Strict,
    Plumbing,
}

fn unimodular(raw: &RawMatrix, target: Option<&Exact>, what: &str) -> Result<Isometry> {
    match raw {
        RawMatrix::Exact(x) => {
            let det = x.det();
            let ok = match target {
                Some(t) => &det == t,
                None => det.is_one(),
            };
            if !ok {
                return Err(Error::NotUnimodular(format!(
                    "{what}: determinant {:?}",
                    det.to_complex()
                )));
            }
            Isometry::from_exact(x.clone())
        }
        RawMatrix::Approx(m) => {
            let det = m.det();
            if (det - 1.0).norm() > DEFAULT_TOL * (1.0 + m.frob2()) {
                return Err(Error::NotUnimodular(format!("{what}: determinant {det}")));
            }
            Isometry::from_complex(*m)
        }
    }
}

/// Membership by listing: an index over a list with its displacement bound.
#[derive(Clone, Debug)]
pub struct Listing {
    index: IsometryIndex,
    /// `cosh` of the radius within which the listing is complete.
    pub cosh_radius: f64,
}

/// Outcome of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Member(usize),
    NotMember,
    /// The element lies outside the radius, so the listing cannot decide.
    Undecided,
}

impl Listing {
    pub fn new(items: &[Isometry], radius: f64) -> Self {
        Listing {
            index: IsometryIndex::new(items),
            cosh_radius: libm::cosh(radius),
        }
    }

    pub fn query(&self, items: &[Isometry], g: &Isometry) -> Membership {
        if let Some(i) = self.index.find(items, g, DEFAULT_TOL) {
            return Membership::Member(i);
        }
        if g.displacement_cosh() <= self.cosh_radius * (1.0 - 1e-9) {
            Membership::NotMember
        } else {
            Membership::Undecided
        }
    }

    /// As [`query`](Self::query) for a product known numerically; the exact
    /// product is formed only to confirm a candidate.
    pub fn query_lazy<F>(&self, items: &[Isometry], approx: &CMat, exact: F) -> Membership
    where
        F: FnOnce() -> Option<Isometry>,
    {
        if let Some(i) = self.index.find_lazy(items, approx, exact, DEFAULT_TOL) {
            return Membership::Member(i);
        }
        if approx.frob2() / 2.0 <= self.cosh_radius * (1.0 - 1e-9) {
            Membership::NotMember
        } else {
            Membership::Undecided
        }
    }
}

impl GroupSlice {
    /// Validate raw contents: determinants, duplicates, the identity,
    /// closure under inverses, the radius bound, and `α ∉ Γ`.
    pub fn from_raw(raw: RawSlice, strictness: Strictness) -> Result<Self> {
        if !(raw.radius > 0.0 && raw.radius.is_finite()) {
            return Err(Error::Invalid("radius must be positive".into()));
        }
        if let (SliceField::Exact(f), Some(h)) = (&raw.field, &raw.hecke_norm) {
            if h.field != *f {
                return Err(Error::FieldMismatch);
            }
        }
        let check_field = |m: &RawMatrix| -> Result<()> {
            match (&raw.field, m) {
                (SliceField::Exact(f), RawMatrix::Exact(x)) => {
                    if x.entries().iter().all(|e| e.field == *f) {
                        Ok(())
                    } else {
                        Err(Error::FieldMismatch)
                    }
                }
                (SliceField::Approx, RawMatrix::Approx(_)) => Ok(()),
                _ => Err(Error::FieldMismatch),
            }
        };
        for m in raw
            .gamma
            .iter()
            .chain(&raw.double_coset)
            .chain(&raw.centralizer_witnesses)
            .chain(core::iter::once(&raw.alpha))
        {
            check_field(m)?;
        }
        let layer_det = raw.hecke_norm.as_ref();
        let gamma = raw
            .gamma
            .iter()
            .enumerate()
            .map(|(i, m)| unimodular(m, None, &format!("gamma[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let double_coset = raw
            .double_coset
            .iter()
            .enumerate()
            .map(|(i, m)| unimodular(m, layer_det, &format!("double_coset[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let alpha = unimodular(&raw.alpha, layer_det, "alpha")?;
        let centralizer_witnesses = raw
            .centralizer_witnesses
            .iter()
            .enumerate()
            .map(|(i, m)| unimodular(m, None, &format!("centralizer_witnesses[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let slice = GroupSlice {
            field: raw.field,
            radius: raw.radius,
            alpha,
            gamma,
            double_coset,
            hecke_norm: raw.hecke_norm,
            centralizer_witnesses,
            provenance: raw.provenance,
        };
        slice.check_invariants(strictness)?;
        Ok(slice)
    }

    fn check_invariants(&self, strictness: Strictness) -> Result<()> {
        let bound = libm::cosh(self.radius) * (1.0 + 1e-9);
        for (name, list) in [("gamma", &self.gamma), ("double_coset", &self.double_coset)] {
            for (i, g) in list.iter().enumerate() {
                if g.displacement_cosh() > bound {
                    return Err(Error::Invalid(format!(
                        "{name}[{i}] lies outside the slice radius"
                    )));
                }
            }
            let index = IsometryIndex::new(list);
            for (i, g) in list.iter().enumerate() {
                for j in index.find_all(list, g, DEFAULT_TOL) {
                    if j != i {
                        return Err(Error::Duplicate(format!("{name}[{i}] and {name}[{j}]")));
                    }
                }
            }
        }
        let listing = Listing::new(&self.gamma, self.radius);
        if !self.gamma.iter().any(|g| g.is_identity(DEFAULT_TOL)) {
            return Err(Error::Invalid("identity missing from gamma".into()));
        }
        for (i, g) in self.gamma.iter().enumerate() {
            if !matches!(
                listing.query(&self.gamma, &g.inverse()),
                Membership::Member(_)
            ) {
                return Err(Error::ClosureViolation(format!(
                    "inverse of gamma[{i}] is not listed"
                )));
            }
        }
        if strictness == Strictness::Strict
            && matches!(
                listing.query(&self.gamma, &self.alpha),
                Membership::Member(_)
            )
        {
            return Err(Error::AlphaInGamma);
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.field, SliceField::Exact(_))
    }

    pub fn gamma_listing(&self) -> Listing {
        Listing::new(&self.gamma, self.radius)
    }

    pub fn layer_listing(&self) -> Listing {
        Listing::new(&self.double_coset, self.radius)
    }

    /// Conjugate every element by `c` (`g ↦ c⁻¹ g c`); the radius is kept, so
    /// the result is only meaningful for checks that do not rely on listing
    /// completeness.
    pub fn conjugated_by(&self, c: &Isometry) -> GroupSlice {
        let conj = |g: &Isometry| c.conjugate(g);
        GroupSlice {
            field: if c.is_exact() {
                self.field.clone()
            } else {
                SliceField::Approx
            },
            radius: self.radius,
            alpha: conj(&self.alpha),
            gamma: self.gamma.iter().map(conj).collect(),
            double_coset: self.double_coset.iter().map(conj).collect(),
            hecke_norm: None,
            centralizer_witnesses: self.centralizer_witnesses.iter().map(conj).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Result of [`validate_cocompact_consistency`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub gamma_counts: [usize; 4],
    pub layer_counts: [usize; 4],
    /// `(list, index)` of every parabolic element found.
    pub parabolics: Vec<(String, usize)>,
    /// Elements whose classification was numerically unstable.
    pub unstable: Vec<(String, usize)>,
    /// Smallest displacement `d(g·j, j)` over non-identity Γ elements.
    pub min_displacement: Option<f64>,
}

impl ConsistencyReport {
    pub fn ok(&self) -> bool {
        self.parabolics.is_empty()
    }
}

fn kind_slot(k: Kind) -> usize {
    match k {
        Kind::Identity => 0,
        Kind::Elliptic => 1,
        Kind::Parabolic => 2,
        Kind::Loxodromic => 3,
    }
}

/// Classify every listed element; parabolics falsify cocompactness.
pub fn validate_cocompact_consistency(s: &GroupSlice) -> ConsistencyReport {
    let mut rep = ConsistencyReport {
        gamma_counts: [0; 4],
        layer_counts: [0; 4],
        parabolics: Vec::new(),
        unstable: Vec::new(),
        min_displacement: None,
    };
    for (name, list) in [("gamma", &s.gamma), ("double_coset", &s.double_coset)] {
        for (i, g) in list.iter().enumerate() {
            match classify(g) {
                Ok(c) => {
                    let counts = if name == "gamma" {
                        &mut rep.gamma_counts
                    } else {
                        &mut rep.layer_counts
                    };
                    counts[kind_slot(c.kind)] += 1;
                    if c.kind == Kind::Parabolic {
                        rep.parabolics.push((name.into(), i));
                    }
                    if name == "gamma" && c.kind != Kind::Identity {
                        let d = g.displacement();
                        rep.min_displacement =
                            Some(rep.min_displacement.map_or(d, |m: f64| m.min(d)));
                    }
                }
                Err(_) => rep.unstable.push((name.into(), i)),
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::C64;
    use alloc::vec;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn raw(m: CMat) -> RawMatrix {
        RawMatrix::Approx(m)
    }

    fn small_slice() -> RawSlice {
        let t = CMat::diag(c(2.0), c(0.5));
        let rot = CMat::diag(C64::new(0.0, 1.0), C64::new(0.0, -1.0));
        RawSlice {
            field: SliceField::Approx,
            radius: 2.0,
            alpha: raw(CMat::diag(c(1.5), c(1.0 / 1.5))),
            gamma: vec![raw(CMat::identity()), raw(t), raw(t.adj()), raw(rot)],
            double_coset: vec![raw(CMat::diag(c(1.5), c(1.0 / 1.5)))],
            hecke_norm: None,
            centralizer_witnesses: vec![],
            provenance: "test".into(),
        }
    }

    #[test]
    fn loads_valid_slice() {
        let s = GroupSlice::from_raw(small_slice(), Strictness::Strict).unwrap();
        assert_eq!(s.gamma.len(), 4);
    }

    #[test]
    fn rejects_det_two() {
        let mut r = small_slice();
        r.gamma.push(raw(CMat::diag(c(2.0), c(1.0))));
        assert!(matches!(
            GroupSlice::from_raw(r, Strictness::Strict),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn rejects_missing_inverse() {
        let mut r = small_slice();
        r.gamma.remove(2);
        assert!(matches!(
            GroupSlice::from_raw(r, Strictness::Strict),
            Err(Error::ClosureViolation(_))
        ));
    }

    #[test]
    fn rejects_duplicates_and_alpha_in_gamma() {
        let mut r = small_slice();
        r.gamma.push(raw(CMat::diag(c(-2.0), c(-0.5))));
        assert!(matches!(
            GroupSlice::from_raw(r, Strictness::Strict),
            Err(Error::Duplicate(_))
        ));
        let mut r = small_slice();
        r.alpha = raw(CMat::diag(c(2.0), c(0.5)));
        assert_eq!(
            GroupSlice::from_raw(r.clone(), Strictness::Strict).unwrap_err(),
            Error::AlphaInGamma
        );
        assert!(GroupSlice::from_raw(r, Strictness::Plumbing).is_ok());
    }

    #[test]
    fn consistency_flags_parabolic() {
        let mut r = small_slice();
        r.gamma.push(raw(CMat::new(c(1.0), c(1.0), c(0.0), c(1.0))));
        r.gamma
            .push(raw(CMat::new(c(1.0), c(-1.0), c(0.0), c(1.0))));
        let s = GroupSlice::from_raw(r, Strictness::Strict).unwrap();
        let rep = validate_cocompact_consistency(&s);
        assert_eq!(rep.parabolics.len(), 2);
        assert!(!rep.ok());
        let clean = GroupSlice::from_raw(small_slice(), Strictness::Strict).unwrap();
        let rep = validate_cocompact_consistency(&clean);
        assert!(rep.ok());
        assert!((rep.min_displacement.unwrap() - 0.0).abs() < 1e-12);
    }
}
