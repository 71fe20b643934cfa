//! Exact arithmetic in an imaginary quadratic field `K = Q(√−m)` and in a
//! relative quadratic extension `L = K(√θ)`, plus the double-precision
//! complex numbers the geometry runs on.
//!
//! Group elements of arithmetic Kleinian groups built from a division
//! quaternion algebra over `K` cannot have all matrix entries in `K` itself,
//! so matrices carry [`Exact`] entries in `L`; elements of `K` embed with a
//! zero `√θ` component.

use alloc::sync::Arc;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Approximate complex scalar.
pub type ComplexApprox = Complex64;

/// Default absolute tolerance for approximate equality.
pub const DEFAULT_TOL: f64 = 1e-9;

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn is_squarefree(m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let mut n = m;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `a + b·√(−m)` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadExact {
    pub a: BigRational,
    pub b: BigRational,
    pub m: u64,
}

impl QuadExact {
    pub fn new(a: BigRational, b: BigRational, m: u64) -> Result<Self> {
        if !is_squarefree(m) {
            return Err(Error::Invalid(alloc::format!(
                "m = {m} is not a positive squarefree integer"
            )));
        }
        Ok(QuadExact { a, b, m })
    }

    pub fn from_ints(a: i64, b: i64, m: u64) -> Self {
        QuadExact {
            a: BigRational::from_integer(a.into()),
            b: BigRational::from_integer(b.into()),
            m,
        }
    }

    pub fn from_rational(a: BigRational, m: u64) -> Self {
        QuadExact {
            a,
            b: BigRational::zero(),
            m,
        }
    }

    pub fn zero(m: u64) -> Self {
        Self::from_ints(0, 0, m)
    }

    pub fn one(m: u64) -> Self {
        Self::from_ints(1, 0, m)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadExact {
            a: self.a.clone(),
            b: -self.b.clone(),
            m: self.m,
        }
    }

    /// `|x|² = x·conj(x) = a² + m b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a + &self.b * &self.b * BigRational::from_integer(self.m.into())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(QuadExact {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            m: self.m,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = BigRational::from_integer(self.m.into());
        Ok(QuadExact {
            a: &self.a * &other.a - &self.b * &other.b * m,
            b: &self.a * &other.b + &self.b * &other.a,
            m: self.m,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(QuadExact {
            a: &self.a / &n,
            b: -(&self.b / &n),
            m: self.m,
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inv()?)
    }

    pub fn to_complex(&self) -> C64 {
        let s = libm::sqrt(self.m as f64);
        C64::new(rat_to_f64(&self.a), rat_to_f64(&self.b) * s)
    }
}

impl Add for &QuadExact {
    type Output = QuadExact;
    fn add(self, rhs: Self) -> QuadExact {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Sub for &QuadExact {
    type Output = QuadExact;
    fn sub(self, rhs: Self) -> QuadExact {
        self.try_add(&-rhs).expect("field mismatch")
    }
}

impl Mul for &QuadExact {
    type Output = QuadExact;
    fn mul(self, rhs: Self) -> QuadExact {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &QuadExact {
    type Output = QuadExact;
    fn neg(self) -> QuadExact {
        QuadExact {
            a: -self.a.clone(),
            b: -self.b.clone(),
            m: self.m,
        }
    }
}

impl fmt::Display for QuadExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let b = if self.b.abs().is_one() {
            alloc::string::String::new()
        } else {
            alloc::format!("{}·", self.b.abs())
        };
        match (self.a.is_zero(), self.b.is_negative()) {
            (true, false) => write!(f, "{b}√-{}", self.m),
            (true, true) => write!(f, "-{b}√-{}", self.m),
            (false, false) => write!(f, "{} + {b}√-{}", self.a, self.m),
            (false, true) => write!(f, "{} - {b}√-{}", self.a, self.m),
        }
    }
}

/// The field entries live in: `K = Q(√−m)`, optionally extended by `√θ`
/// for a non-square `θ ∈ K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub m: u64,
    pub theta: Option<QuadExact>,
}

impl FieldSpec {
    pub fn base(m: u64) -> Arc<Self> {
        Arc::new(FieldSpec { m, theta: None })
    }

    pub fn extension(theta: QuadExact) -> Arc<Self> {
        Arc::new(FieldSpec {
            m: theta.m,
            theta: Some(theta),
        })
    }

    /// Principal square root of `θ` in double precision.
    pub fn sqrt_theta(&self) -> C64 {
        match &self.theta {
            Some(t) => t.to_complex().sqrt(),
            None => C64::zero(),
        }
    }
}

/// An element `x + y·√θ` of `L = K(√θ)` with `x, y ∈ K`.
#[derive(Clone, Debug)]
pub struct Exact {
    pub x: QuadExact,
    pub y: QuadExact,
    pub field: Arc<FieldSpec>,
}

impl PartialEq for Exact {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y && same_field(&self.field, &other.field)
    }
}

impl Eq for Exact {}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.x.a, &self.x.b, &self.y.a, &self.y.b)
            .cmp(&(&other.x.a, &other.x.b, &other.y.a, &other.y.b))
    }
}

fn same_field(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Exact {
    pub fn from_base(x: QuadExact, field: &Arc<FieldSpec>) -> Result<Self> {
        if x.m != field.m {
            return Err(Error::FieldMismatch);
        }
        let m = field.m;
        Ok(Exact {
            x,
            y: QuadExact::zero(m),
            field: field.clone(),
        })
    }

    pub fn new(x: QuadExact, y: QuadExact, field: &Arc<FieldSpec>) -> Result<Self> {
        if x.m != field.m || y.m != field.m {
            return Err(Error::FieldMismatch);
        }
        if field.theta.is_none() && !y.is_zero() {
            return Err(Error::Invalid("√θ component without an extension".into()));
        }
        Ok(Exact {
            x,
            y,
            field: field.clone(),
        })
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        Exact {
            x: QuadExact::zero(field.m),
            y: QuadExact::zero(field.m),
            field: field.clone(),
        }
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        Exact {
            x: QuadExact::one(field.m),
            y: QuadExact::zero(field.m),
            field: field.clone(),
        }
    }

    pub fn from_int(n: i64, field: &Arc<FieldSpec>) -> Self {
        Exact {
            x: QuadExact::from_ints(n, 0, field.m),
            y: QuadExact::zero(field.m),
            field: field.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.y.is_zero() && self.x.b.is_zero() && self.x.a.is_one()
    }

    /// True when the element lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.y.is_zero() && self.x.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.x.a)
    }

    pub fn in_base(&self) -> bool {
        self.y.is_zero()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Exact {
            x: &self.x + &other.x,
            y: &self.y + &other.y,
            field: self.field.clone(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut x = &self.x * &other.x;
        if let Some(t) = &self.field.theta {
            if !self.y.is_zero() && !other.y.is_zero() {
                x = &x + &(&(&self.y * &other.y) * t);
            }
        }
        let y = &(&self.x * &other.y) + &(&self.y * &other.x);
        Ok(Exact {
            x,
            y,
            field: self.field.clone(),
        })
    }

    /// Galois conjugate `x − y√θ`.
    pub fn galois(&self) -> Self {
        Exact {
            x: self.x.clone(),
            y: -&self.y,
            field: self.field.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.y.is_zero() {
            return Ok(Exact {
                x: self.x.inv()?,
                y: self.y.clone(),
                field: self.field.clone(),
            });
        }
        let theta = self
            .field
            .theta
            .as_ref()
            .expect("extension present when y ≠ 0");
        let n = &(&self.x * &self.x) - &(&(&self.y * &self.y) * theta);
        let ninv = n.inv()?;
        Ok(Exact {
            x: &self.x * &ninv,
            y: -&(&self.y * &ninv),
            field: self.field.clone(),
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inv()?)
    }

    pub fn to_complex(&self) -> C64 {
        let x = self.x.to_complex();
        if self.y.is_zero() {
            return x;
        }
        x + self.y.to_complex() * self.field.sqrt_theta()
    }
}

impl Add for &Exact {
    type Output = Exact;
    fn add(self, rhs: Self) -> Exact {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Sub for &Exact {
    type Output = Exact;
    fn sub(self, rhs: Self) -> Exact {
        self.try_add(&-rhs).expect("field mismatch")
    }
}

impl Mul for &Exact {
    type Output = Exact;
    fn mul(self, rhs: Self) -> Exact {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            x: -&self.x,
            y: -&self.y,
            field: self.field.clone(),
        }
    }
}

/// A scalar from either backend.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Exact),
    Approx(C64),
}

impl Scalar {
    pub fn to_complex(&self) -> C64 {
        match self {
            Scalar::Exact(e) => e.to_complex(),
            Scalar::Approx(c) => *c,
        }
    }
}

pub fn to_complex(x: &QuadExact) -> ComplexApprox {
    x.to_complex()
}

/// Backend equality: exact field equality, or `|x − y| ≤ tol` when either
/// side is approximate.
pub fn scalar_eq(x: &Scalar, y: &Scalar, tol: f64) -> Result<bool> {
    if tol < 0.0 || tol.is_nan() {
        return Err(Error::Invalid("tolerance must be non-negative".into()));
    }
    match (x, y) {
        (Scalar::Exact(a), Scalar::Exact(b)) => {
            a.check(b)?;
            Ok(a == b)
        }
        _ => Ok((x.to_complex() - y.to_complex()).norm() <= tol),
    }
}

/// Exact `|x|²` of an element of `L` as a complex number's squared modulus.
///
/// Only meaningful numerically: `|·|` is not a field operation on `L`.
pub fn abs2(x: &Exact) -> f64 {
    x.to_complex().norm_sqr()
}

pub(crate) fn sign_of(x: &BigRational) -> Ordering {
    if x.is_positive() {
        Ordering::Greater
    } else if x.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}
