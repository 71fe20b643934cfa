//! Orientation-preserving isometries of hyperbolic 3-space as projective
//! 2×2 complex matrices, acting on upper half-space points `z + rj`.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::ComplexFloat;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalars::{Exact, C64, DEFAULT_TOL};

/// A 2×2 complex matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl CMat {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        CMat { a, b, c, d }
    }

    pub fn identity() -> Self {
        CMat::new(C64::one(), C64::zero(), C64::zero(), C64::one())
    }

    pub fn diag(a: C64, d: C64) -> Self {
        CMat::new(a, C64::zero(), C64::zero(), d)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        CMat::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Adjugate; the inverse when `det = 1`.
    pub fn adj(&self) -> CMat {
        CMat::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn neg(&self) -> CMat {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn frob2(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_diff(&self, o: &CMat) -> f64 {
        self.entries()
            .iter()
            .zip(o.entries().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Distance to `o` in the projective sense: `min(|M − N|, |M + N|)`.
    pub fn proj_diff(&self, o: &CMat) -> f64 {
        self.max_diff(o).min(self.max_diff(&o.neg()))
    }

    /// Rescale to determinant one and apply the sign rule: the first entry
    /// that is nonzero under `tol` gets argument in `(−π/2, π/2]`.
    pub fn canonical(&self, tol: f64) -> Result<CMat> {
        let det = self.det();
        if det.norm() <= tol * tol {
            return Err(Error::Singular);
        }
        let m = if (det - 1.0).norm() <= 8.0 * f64::EPSILON {
            *self
        } else {
            self.scale(det.sqrt().inv())
        };
        Ok(m.sign_canonical(tol))
    }

    fn sign_canonical(&self, tol: f64) -> CMat {
        for z in self.entries() {
            let r = z.norm();
            if r > tol {
                let flip = if z.re.abs() <= tol * r {
                    z.im < 0.0
                } else {
                    z.re < 0.0
                };
                return if flip { self.neg() } else { *self };
            }
        }
        *self
    }

    fn lex_cmp(&self, o: &CMat) -> Ordering {
        for (x, y) in self.entries().iter().zip(o.entries().iter()) {
            let c = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    }
}

/// A 2×2 matrix over the exact field. Any nonzero determinant is allowed;
/// the projective class is what matters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactMat {
    pub a: Exact,
    pub b: Exact,
    pub c: Exact,
    pub d: Exact,
}

impl ExactMat {
    pub fn new(a: Exact, b: Exact, c: Exact, d: Exact) -> Result<Self> {
        a.try_add(&b)?;
        a.try_add(&c)?;
        a.try_add(&d)?;
        Ok(ExactMat { a, b, c, d })
    }

    pub fn identity(field: &alloc::sync::Arc<crate::scalars::FieldSpec>) -> Self {
        let one = Exact::one(field);
        let zero = Exact::zero(field);
        ExactMat {
            a: one.clone(),
            b: zero.clone(),
            c: zero,
            d: one,
        }
    }

    pub fn entries(&self) -> [&Exact; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> Exact {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn trace(&self) -> Exact {
        &self.a + &self.d
    }

    pub fn mul(&self, o: &ExactMat) -> ExactMat {
        ExactMat {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    pub fn add(&self, o: &ExactMat) -> ExactMat {
        ExactMat {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            c: &self.c + &o.c,
            d: &self.d + &o.d,
        }
    }

    pub fn sub(&self, o: &ExactMat) -> ExactMat {
        ExactMat {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
            c: &self.c - &o.c,
            d: &self.d - &o.d,
        }
    }

    pub fn adj(&self) -> ExactMat {
        ExactMat {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn scale(&self, s: &Exact) -> ExactMat {
        ExactMat {
            a: &self.a * s,
            b: &self.b * s,
            c: &self.c * s,
            d: &self.d * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.is_zero())
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Divide by the first nonzero entry.
    pub fn normalized(&self) -> Result<ExactMat> {
        let lead = self
            .entries()
            .into_iter()
            .find(|e| !e.is_zero())
            .ok_or(Error::Singular)?;
        if lead.is_one() {
            return Ok(self.clone());
        }
        Ok(self.scale(&lead.inv()?))
    }

    /// `self = λ·o` for some nonzero scalar `λ`.
    pub fn proportional(&self, o: &ExactMat) -> bool {
        let x = self.entries();
        let y = o.entries();
        if self.is_zero() || o.is_zero() {
            return false;
        }
        for i in 0..4 {
            if x[i].is_zero() != y[i].is_zero() {
                return false;
            }
        }
        let Some(p) = (0..4).find(|&i| !x[i].is_zero()) else {
            return false;
        };
        (0..4)
            .filter(|&j| j != p)
            .all(|j| (x[p] * y[j]) == (x[j] * y[p]))
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::new(
            self.a.to_complex(),
            self.b.to_complex(),
            self.c.to_complex(),
            self.d.to_complex(),
        )
    }

    /// `tr² / det`, the conjugacy invariant of a projective class.
    pub fn trace_sq_over_det(&self) -> Result<Exact> {
        let t = self.trace();
        (&t * &t).try_div(&self.det())
    }
}

/// An element of PSL(2, C). On the exact backend it carries the matrix it was
/// built from (of any nonzero determinant); the floating-point matrix is
/// always the determinant-one, sign-canonical representative.
#[derive(Clone, Debug)]
pub struct Isometry {
    exact: Option<ExactMat>,
    m: CMat,
}

impl Isometry {
    pub fn from_exact(raw: ExactMat) -> Result<Self> {
        if raw.det().is_zero() {
            return Err(Error::Singular);
        }
        let m = raw.to_cmat().canonical(0.0)?;
        Ok(Isometry {
            exact: Some(raw),
            m,
        })
    }

    pub fn from_complex(m: CMat) -> Result<Self> {
        Ok(Isometry {
            exact: None,
            m: m.canonical(DEFAULT_TOL)?,
        })
    }

    pub fn identity() -> Self {
        Isometry {
            exact: None,
            m: CMat::identity(),
        }
    }

    pub fn diag(a: C64) -> Result<Self> {
        if a.norm() == 0.0 {
            return Err(Error::Singular);
        }
        Self::from_complex(CMat::diag(a, a.inv()))
    }

    /// The determinant-one, sign-canonical matrix.
    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    /// The exact matrix this element was built from.
    pub fn exact(&self) -> Option<&ExactMat> {
        self.exact.as_ref()
    }

    /// The exact matrix divided by its first nonzero entry; a canonical key
    /// for the projective class.
    pub fn exact_key(&self) -> Option<ExactMat> {
        self.exact
            .as_ref()
            .map(|x| x.normalized().expect("nonsingular"))
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Drop the exact representative.
    pub fn to_approx(&self) -> Isometry {
        Isometry {
            exact: None,
            m: self.m,
        }
    }

    pub fn mul(&self, o: &Isometry) -> Isometry {
        match (&self.exact, &o.exact) {
            (Some(x), Some(y)) => {
                Isometry::from_exact(x.mul(y)).expect("product of invertible matrices")
            }
            _ => Isometry {
                exact: None,
                m: self.m.mul(&o.m).sign_canonical(DEFAULT_TOL),
            },
        }
    }

    pub fn mul_approx(&self, o: &Isometry) -> CMat {
        self.m.mul(&o.m)
    }

    pub fn inverse(&self) -> Isometry {
        match &self.exact {
            Some(x) => Isometry {
                exact: Some(x.adj()),
                m: self.m.adj().sign_canonical(0.0),
            },
            None => Isometry {
                exact: None,
                m: self.m.adj().sign_canonical(DEFAULT_TOL),
            },
        }
    }

    /// `self⁻¹ · t · self`.
    pub fn conjugate(&self, t: &Isometry) -> Isometry {
        self.inverse().mul(t).mul(self)
    }

    pub fn pow(&self, n: i64) -> Isometry {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = match &self.exact {
            Some(x) => Isometry::from_exact(ExactMat::identity(&x.a.field)).expect("identity"),
            None => Isometry::identity(),
        };
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Backend equality in PSL: exact proportionality when both sides are
    /// exact, otherwise entrywise up to sign within `tol`.
    pub fn eq_tol(&self, o: &Isometry, tol: f64) -> bool {
        match (&self.exact, &o.exact) {
            (Some(x), Some(y)) => x.proportional(y),
            _ => self.m.proj_diff(&o.m) <= tol,
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        match &self.exact {
            Some(x) => x.is_scalar(),
            None => self.m.proj_diff(&CMat::identity()) <= tol,
        }
    }

    /// `MN = ±NM`.
    pub fn commutes(&self, o: &Isometry, tol: f64) -> bool {
        match (&self.exact, &o.exact) {
            (Some(x), Some(y)) => x.mul(y).proportional(&y.mul(x)),
            _ => {
                let p = self.m.mul(&o.m);
                let q = o.m.mul(&self.m);
                p.proj_diff(&q) <= tol * (1.0 + p.frob2().sqrt())
            }
        }
    }

    /// Trace of the determinant-one representative (defined up to sign).
    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// `δ(g·j, j)`, which equals `‖g‖²_F / 2` for a determinant-one matrix.
    pub fn displacement_cosh(&self) -> f64 {
        self.m.frob2() / 2.0
    }

    pub fn displacement(&self) -> f64 {
        libm::acosh(self.displacement_cosh().max(1.0))
    }

    /// Deterministic total order: normalized exact entries when both sides
    /// are exact, otherwise lexicographic on canonical complex entries.
    pub fn canonical_cmp(&self, o: &Isometry) -> Ordering {
        match (&self.exact, &o.exact) {
            (Some(_), Some(_)) => self.exact_key().cmp(&o.exact_key()),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.m.lex_cmp(&o.m),
        }
    }
}

/// Sort isometries by [`Isometry::canonical_cmp`], computing each exact key
/// once.
pub fn sort_canonical(items: &mut Vec<Isometry>) {
    let mut keyed: Vec<(Option<ExactMat>, Isometry)> =
        items.drain(..).map(|g| (g.exact_key(), g)).collect();
    keyed.sort_by(|(ka, a), (kb, b)| match (ka, kb) {
        (Some(x), Some(y)) => x.cmp(y),
        _ => a.canonical_cmp(b),
    });
    items.extend(keyed.into_iter().map(|(_, g)| g));
}

/// A point `z + rj` of upper half-space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointH3 {
    pub z: C64,
    pub r: f64,
}

impl PointH3 {
    pub fn new(z: C64, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Invalid("point needs finite z and r > 0".into()));
        }
        Ok(PointH3 { z, r })
    }

    pub fn j() -> Self {
        PointH3 {
            z: C64::zero(),
            r: 1.0,
        }
    }
}

/// Möbius action on upper half-space.
pub fn apply(g: &Isometry, p: &PointH3) -> PointH3 {
    apply_mat(g.matrix(), p)
}

pub fn apply_mat(m: &CMat, p: &PointH3) -> PointH3 {
    let cz_d = m.c * p.z + m.d;
    let den = cz_d.norm_sqr() + m.c.norm_sqr() * p.r * p.r;
    let num = (m.a * p.z + m.b) * cz_d.conj() + m.a * m.c.conj() * (p.r * p.r);
    PointH3 {
        z: num / den,
        r: p.r / den,
    }
}

/// `δ(P, Q) = (|z − z'|² + r² + r'²) / (2 r r')`, the hyperbolic cosine of
/// the distance.
pub fn delta(p: &PointH3, q: &PointH3) -> f64 {
    ((p.z - q.z).norm_sqr() + p.r * p.r + q.r * q.r) / (2.0 * p.r * q.r)
}

/// Density of `dv` against `dx dy dr`.
pub fn hyperbolic_volume_element_weight(p: &PointH3) -> f64 {
    1.0 / (p.r * p.r * p.r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Identity => "identity",
            Kind::Elliptic => "elliptic",
            Kind::Parabolic => "parabolic",
            Kind::Loxodromic => "loxodromic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometryClassification {
    pub kind: Kind,
    /// Eigenvalue of modulus > 1 (loxodromic only).
    pub a_of_t: Option<C64>,
    /// `N(T) = |a(T)|²` (loxodromic only).
    pub norm: Option<f64>,
    /// `φ/2` for a rotation by `φ ∈ (0, π]` (elliptic only).
    pub half_angle: Option<f64>,
    /// `tr²` of the determinant-one representative.
    pub trace_sq: C64,
}

impl IsometryClassification {
    /// Rotation angle `φ`.
    pub fn rotation_angle(&self) -> Option<f64> {
        self.half_angle.map(|h| 2.0 * h)
    }
}

fn large_eigenvalue(t: C64) -> C64 {
    let disc = (t * t - 4.0).sqrt();
    let l1 = (t + disc) / 2.0;
    let l2 = (t - disc) / 2.0;
    if l1.norm() >= l2.norm() {
        l1
    } else {
        l2
    }
}

fn finish(kind: Kind, m: &CMat, exact_trace_sq: Option<C64>) -> IsometryClassification {
    let trace_sq = exact_trace_sq.unwrap_or_else(|| m.trace() * m.trace());
    let t = match exact_trace_sq {
        Some(sq) => {
            let r = sq.sqrt();
            let approx = m.trace();
            if (r - approx).norm() <= (r + approx).norm() {
                r
            } else {
                -r
            }
        }
        None => m.trace(),
    };
    let mut out = IsometryClassification {
        kind,
        a_of_t: None,
        norm: None,
        half_angle: None,
        trace_sq,
    };
    match kind {
        Kind::Loxodromic => {
            let a = large_eigenvalue(t);
            out.a_of_t = Some(a);
            out.norm = Some(a.norm_sqr());
        }
        Kind::Elliptic => {
            let half_trace = libm::sqrt(trace_sq.re.max(0.0)) / 2.0;
            out.half_angle = Some(libm::acos(half_trace.min(1.0)));
        }
        _ => {}
    }
    out
}

fn classify_numeric(m: &CMat, tol: f64) -> Result<Kind> {
    if m.proj_diff(&CMat::identity()) <= tol {
        return Ok(Kind::Identity);
    }
    let t = m.trace();
    if (t * t - 4.0).norm() <= tol {
        return Ok(Kind::Parabolic);
    }
    let im = t.im.abs();
    let re = t.re.abs();
    if im <= tol && re < 2.0 - tol {
        return Ok(Kind::Elliptic);
    }
    if im > 100.0 * tol || re > 2.0 + 100.0 * tol {
        return Ok(Kind::Loxodromic);
    }
    Err(Error::ClassificationUnstable)
}

/// Classify by the conjugation invariant `tr²/det`; exact whenever the
/// invariant is rational.
pub fn classify(g: &Isometry) -> Result<IsometryClassification> {
    classify_tol(g, DEFAULT_TOL)
}

pub fn classify_tol(g: &Isometry, tol: f64) -> Result<IsometryClassification> {
    let m = g.matrix();
    let mut exact_sq = None;
    let kind = match g.exact() {
        Some(x) if x.is_scalar() => Kind::Identity,
        Some(x) => {
            let inv = x.trace_sq_over_det()?;
            exact_sq = Some(inv.to_complex());
            match inv.as_rational() {
                Some(r) => {
                    let four = num_rational::BigRational::from_integer(4.into());
                    if *r == four {
                        Kind::Parabolic
                    } else if !crate::scalars::sign_of(r).is_lt() && *r < four {
                        Kind::Elliptic
                    } else {
                        Kind::Loxodromic
                    }
                }
                None => classify_numeric(m, tol)?,
            }
        }
        None => classify_numeric(m, tol)?,
    };
    Ok(finish(kind, m, exact_sq))
}

fn eigvec(m: &CMat, l: C64) -> (C64, C64) {
    let v1 = (m.b, l - m.a);
    let v2 = (l - m.d, m.c);
    if v1.0.norm_sqr() + v1.1.norm_sqr() >= v2.0.norm_sqr() + v2.1.norm_sqr() {
        v1
    } else {
        v2
    }
}

/// Returns `(C, D)` with `C⁻¹ M C = D` diagonal: `D = diag(a(T), a(T)⁻¹)`
/// with `|a(T)| > 1` for loxodromic `M`, `D = R(φ)` with `φ ∈ (0, 2π)` for
/// elliptic `M`.
pub fn conjugate_to_normal_form(g: &Isometry) -> Result<(Isometry, Isometry)> {
    let cls = classify(g)?;
    let m = *g.matrix();
    let (l1, l2) = match cls.kind {
        Kind::Identity | Kind::Parabolic => return Err(Error::NoDiagonalForm),
        Kind::Loxodromic => {
            let a = cls.a_of_t.expect("loxodromic eigenvalue");
            (a, a.inv())
        }
        Kind::Elliptic => {
            let t = m.trace();
            let disc = (t * t - 4.0).sqrt();
            let mut l = (t + disc) / 2.0;
            if l.im < 0.0 {
                l = (t - disc) / 2.0;
            }
            (l, l.inv())
        }
    };
    let off = m.b.norm().max(m.c.norm());
    let scale = 1.0 + m.frob2().sqrt();
    let c = if off <= 1e-14 * scale {
        if (m.a - l1).norm() <= (m.d - l1).norm() {
            CMat::identity()
        } else {
            CMat::new(C64::zero(), C64::new(-1.0, 0.0), C64::one(), C64::zero())
        }
    } else {
        let v1 = eigvec(&m, l1);
        let v2 = eigvec(&m, l2);
        let raw = CMat::new(v1.0, v2.0, v1.1, v2.1);
        let det = raw.det();
        if det.norm() == 0.0 {
            return Err(Error::NoDiagonalForm);
        }
        raw.scale(det.sqrt().inv())
    };
    let d = CMat::diag(l1, l2);
    Ok((
        Isometry { exact: None, m: c },
        Isometry { exact: None, m: d },
    ))
}

/// The rotation `R(φ) = diag(e^{iφ/2}, e^{−iφ/2})`.
pub fn rotation(phi: f64) -> Isometry {
    let h = C64::from_polar(1.0, phi / 2.0);
    Isometry {
        exact: None,
        m: CMat::diag(h, h.inv()).sign_canonical(DEFAULT_TOL),
    }
}

/// Lookup structure over a list of isometries: candidates are screened on
/// the determinant-one matrices and certified exactly when both sides carry
/// an exact representative.
#[derive(Clone, Debug, Default)]
pub struct IsometryIndex {
    sorted: Vec<(f64, usize)>,
    mats: Vec<CMat>,
}

impl IsometryIndex {
    pub fn new(items: &[Isometry]) -> Self {
        let mats: Vec<CMat> = items.iter().map(|g| *g.matrix()).collect();
        let mut sorted: Vec<(f64, usize)> =
            mats.iter().enumerate().map(|(i, m)| (m.a.re, i)).collect();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        IsometryIndex { sorted, mats }
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Index of an entry equal to `m` up to sign within `tol` (scaled by the
    /// size of `m`).
    pub fn find_approx(&self, m: &CMat, tol: f64) -> Option<usize> {
        let tol = tol * (1.0 + m.frob2().sqrt());
        for cand in [*m, m.neg()] {
            let key = cand.a.re;
            let start = self.sorted.partition_point(|(k, _)| *k < key - tol);
            for &(k, i) in &self.sorted[start..] {
                if k > key + tol {
                    break;
                }
                if self.mats[i].max_diff(&cand) <= tol {
                    return Some(i);
                }
            }
        }
        None
    }

    /// Every entry equal to `m` up to sign within the scaled tolerance.
    pub fn find_all_approx(&self, m: &CMat, tol: f64) -> Vec<usize> {
        let tol = tol * (1.0 + m.frob2().sqrt());
        let mut out = Vec::new();
        for cand in [*m, m.neg()] {
            let key = cand.a.re;
            let start = self.sorted.partition_point(|(k, _)| *k < key - tol);
            for &(k, i) in &self.sorted[start..] {
                if k > key + tol {
                    break;
                }
                if self.mats[i].max_diff(&cand) <= tol && !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Every entry of `items` equal to `g` in PSL.
    pub fn find_all(&self, items: &[Isometry], g: &Isometry, tol: f64) -> Vec<usize> {
        self.find_all_approx(g.matrix(), tol)
            .into_iter()
            .filter(|&i| match (g.exact(), items[i].exact()) {
                (Some(x), Some(y)) => x.proportional(y),
                _ => true,
            })
            .collect()
    }

    /// Find `g` among `items` (the list this index was built from). The exact
    /// representative, when available on both sides, decides.
    pub fn find(&self, items: &[Isometry], g: &Isometry, tol: f64) -> Option<usize> {
        let i = self.find_approx(g.matrix(), tol)?;
        match (g.exact(), items[i].exact()) {
            (Some(x), Some(y)) => x.proportional(y).then_some(i),
            _ => Some(i),
        }
    }

    /// Like [`find`](Self::find) for a product that has only been formed
    /// numerically; `exact` is evaluated only when a candidate exists.
    pub fn find_lazy<F>(
        &self,
        items: &[Isometry],
        approx: &CMat,
        exact: F,
        tol: f64,
    ) -> Option<usize>
    where
        F: FnOnce() -> Option<Isometry>,
    {
        let canon = approx.sign_canonical(tol);
        let i = self.find_approx(&canon, tol)?;
        if items[i].exact().is_none() {
            return Some(i);
        }
        match exact() {
            Some(g) => match (g.exact(), items[i].exact()) {
                (Some(x), Some(y)) => x.proportional(y).then_some(i),
                _ => Some(i),
            },
            None => Some(i),
        }
    }
}

/// Random determinant-one matrix with entries of moderate size, for tests and
/// property checks.
pub fn random_isometry<R: FnMut() -> f64>(mut unif: R) -> Isometry {
    loop {
        let mut e = || C64::new(4.0 * unif() - 2.0, 4.0 * unif() - 2.0);
        let m = CMat::new(e(), e(), e(), e());
        if m.det().norm() > 0.1 {
            return Isometry::from_complex(m).expect("nonsingular");
        }
    }
}

pub fn two_pi() -> f64 {
    2.0 * PI
}
