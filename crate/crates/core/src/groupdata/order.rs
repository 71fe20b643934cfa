//! Enumeration of norm-one units and of a fixed-norm layer in a quaternion
//! order embedded in 2×2 matrices, plus unit searches inside commutative
//! suborders.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{GroupSlice, RawMatrix, RawSlice, SliceField, Strictness};
use crate::error::{Error, Result};
use crate::isometry::{conjugate_to_normal_form, sort_canonical, CMat, ExactMat, Isometry};
use crate::lattice::{integer_kernel, lll_reduce, solve_rational, ReducedForm};
use crate::scalars::{Exact, FieldSpec, QuadExact, C64};

/// Ring over which the basis is combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// Integer combinations of the four basis matrices.
    Integers,
    /// Combinations with coefficients in the ring of integers of `Q(√−m)`.
    FieldIntegers,
}

/// A quaternion order given by a basis of 2×2 matrices over the field.
#[derive(Clone, Debug)]
pub struct OrderConfig {
    pub field: Arc<FieldSpec>,
    pub basis: [ExactMat; 4],
    pub coefficients: Coefficients,
    /// Displacement bound (the slice radius).
    pub norm_one_bound: f64,
    /// Reduced norm selecting the α-layer; an element of `Q(√−m)`.
    pub hecke_norm: Exact,
}

/// The generator `ω` of the ring of integers of `Q(√−m)` over `Z`.
fn omega(m: u64) -> QuadExact {
    if m % 4 == 3 {
        QuadExact::new(
            BigRational::new(1.into(), 2.into()),
            BigRational::new(1.into(), 2.into()),
            m,
        )
        .expect("squarefree")
    } else {
        QuadExact::from_ints(0, 1, m)
    }
}

fn exact_coords(e: &Exact) -> [BigRational; 4] {
    [e.x.a.clone(), e.x.b.clone(), e.y.a.clone(), e.y.b.clone()]
}

fn flatten(m: &ExactMat) -> Vec<BigRational> {
    m.entries().iter().flat_map(|e| exact_coords(e)).collect()
}

fn int_rows(cols: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    let n = cols.len();
    let rows = cols.first().map_or(0, |c| c.len());
    (0..rows)
        .map(|r| {
            let lcm = (0..n).fold(BigInt::one(), |acc, c| acc.lcm(cols[c][r].denom()));
            (0..n)
                .map(|c| (&cols[c][r] * BigRational::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect()
}

impl OrderConfig {
    /// Matrices whose integer combinations form the order.
    pub fn generators(&self) -> Vec<ExactMat> {
        let mut g: Vec<ExactMat> = self.basis.to_vec();
        if self.coefficients == Coefficients::FieldIntegers {
            let w = Exact::from_base(omega(self.field.m), &self.field).expect("base element");
            g.extend(self.basis.iter().map(|b| b.scale(&w)));
        }
        g
    }

    fn check_fields(&self) -> Result<()> {
        if self.hecke_norm.field != self.field || !self.hecke_norm.in_base() {
            return Err(Error::BadBasis(
                "hecke norm must lie in the base field".into(),
            ));
        }
        for b in &self.basis {
            if b.entries().iter().any(|e| e.field != self.field) {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(())
    }

    /// Integer coordinates of the identity in [`generators`](Self::generators).
    pub fn identity_coordinates(&self) -> Result<Vec<BigInt>> {
        let gens = self.generators();
        let cols: Vec<Vec<BigRational>> = gens.iter().map(flatten).collect();
        let rows = cols[0].len();
        let a: Vec<Vec<BigRational>> = (0..rows)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        let b = flatten(&ExactMat::identity(&self.field));
        let x = solve_rational(&a, &b)?
            .ok_or_else(|| Error::BadBasis("identity is not in the span of the basis".into()))?;
        if x.iter().any(|v| !v.is_integer()) {
            return Err(Error::BadBasis(
                "identity is not an integral combination of the basis".into(),
            ));
        }
        Ok(x.into_iter().map(|v| v.to_integer()).collect())
    }

    fn approx_generators(&self) -> Vec<CMat> {
        self.generators().iter().map(|g| g.to_cmat()).collect()
    }

    /// Gram matrix of `x ↦ ‖Σ xᵢ Gᵢ‖²_F`.
    fn frobenius_gram(gens: &[CMat]) -> Vec<Vec<f64>> {
        let n = gens.len();
        let mut g = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = gens[i]
                    .entries()
                    .iter()
                    .zip(gens[j].entries().iter())
                    .map(|(x, y)| (x.conj() * y).re)
                    .sum();
            }
        }
        g
    }
}

fn combo_approx(gens: &[CMat], x: &[i64]) -> CMat {
    let mut m = CMat::new(
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    );
    for (g, &c) in gens.iter().zip(x) {
        if c != 0 {
            let c = c as f64;
            m.a += g.a * c;
            m.b += g.b * c;
            m.c += g.c * c;
            m.d += g.d * c;
        }
    }
    m
}

fn combo_exact(gens: &[ExactMat], x: &[i64], field: &Arc<FieldSpec>) -> ExactMat {
    let zero = Exact::zero(field);
    let mut m = ExactMat {
        a: zero.clone(),
        b: zero.clone(),
        c: zero.clone(),
        d: zero,
    };
    for (g, &c) in gens.iter().zip(x) {
        if c != 0 {
            m = m.add(&g.scale(&Exact::from_int(c, field)));
        }
    }
    m
}

fn first_nonzero_positive(x: &[i64]) -> bool {
    x.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

/// Output of [`enumerate_order`].
#[derive(Clone, Debug)]
pub struct FactoryOutput {
    pub slice: GroupSlice,
    pub warnings: Vec<String>,
    /// Lattice vectors visited by the enumeration.
    pub visited: usize,
}

/// Enumerate norm-one units and the `hecke_norm` layer within the
/// displacement bound. Candidates come from short-vector enumeration under
/// `‖x‖²_F` (for a determinant-one `x` this is half of `‖x‖²_F + ‖x⁻¹‖²_F`,
/// and equals `2δ(x·j, j)`); the determinant is then checked exactly.
pub fn enumerate_order(cfg: &OrderConfig) -> Result<FactoryOutput> {
    cfg.check_fields()?;
    if !(cfg.norm_one_bound > 0.0 && cfg.norm_one_bound.is_finite()) {
        return Err(Error::Invalid("norm_one_bound must be positive".into()));
    }
    cfg.identity_coordinates()?;
    let gens = cfg.generators();
    let approx = cfg.approx_generators();
    let form = ReducedForm::new(&OrderConfig::frobenius_gram(&approx))
        .map_err(|_| Error::BadBasis("basis is degenerate".into()))?;
    let nu = cfg.hecke_norm.clone();
    let nu_c = nu.to_complex();
    let cosh_r = libm::cosh(cfg.norm_one_bound);
    let one = Exact::one(&cfg.field);

    let mut visited = 0;
    let mut collect = |target: &Exact, target_c: C64| -> Vec<Isometry> {
        let bound = 2.0 * cosh_r * target_c.norm();
        let mut found: BTreeMap<ExactMat, ExactMat> = BTreeMap::new();
        visited += form.enumerate(bound, |x| {
            if !first_nonzero_positive(x) {
                return;
            }
            let m = combo_approx(&approx, x);
            if (m.det() - target_c).norm() > 1e-6 * (1.0 + m.frob2()) {
                return;
            }
            let e = combo_exact(&gens, x, &cfg.field);
            if &e.det() == target {
                found.insert(e.normalized().expect("nonsingular"), e);
            }
        });
        let mut list: Vec<Isometry> = found
            .into_values()
            .map(|e| Isometry::from_exact(e).expect("nonsingular"))
            .collect();
        list.retain(|g| g.displacement_cosh() <= cosh_r * (1.0 + 1e-12));
        sort_canonical(&mut list);
        list
    };
    let gamma = collect(&one, C64::new(1.0, 0.0));
    let layer = collect(&nu, nu_c);

    let mut warnings = Vec::new();
    if gamma.len() <= 1 {
        warnings.push("slice trivial".into());
    }
    let alpha = layer
        .iter()
        .min_by(|a, b| a.displacement_cosh().total_cmp(&b.displacement_cosh()))
        .cloned()
        .ok_or_else(|| {
            Error::Invalid("no element of the requested norm within the bound".into())
        })?;
    let raw = RawSlice {
        field: SliceField::Exact(cfg.field.clone()),
        radius: cfg.norm_one_bound,
        alpha: RawMatrix::from_isometry(&alpha),
        gamma: gamma.iter().map(RawMatrix::from_isometry).collect(),
        double_coset: layer.iter().map(RawMatrix::from_isometry).collect(),
        hecke_norm: if nu.is_one() { None } else { Some(nu.clone()) },
        centralizer_witnesses: Vec::new(),
        provenance: format!(
            "enumerate_order: norm-one units and reduced norm {} at radius {}",
            nu.x, cfg.norm_one_bound
        ),
    };
    let slice = match GroupSlice::from_raw(raw.clone(), Strictness::Strict) {
        Ok(s) => s,
        Err(Error::AlphaInGamma) => {
            warnings.push("alpha in Gamma".into());
            GroupSlice::from_raw(raw, Strictness::Plumbing)?
        }
        Err(e) => return Err(e),
    };
    Ok(FactoryOutput {
        slice,
        warnings,
        visited,
    })
}

/// Units of the order commuting with a given element, found by a sweep of
/// skewed short-vector searches.
#[derive(Clone, Debug)]
pub struct UnitSearch {
    /// Commuting norm-one units, one per projective class, each oriented so
    /// that its translation length is `≥ 0`, sorted by length.
    pub units: Vec<Isometry>,
    /// Translation length `log N(u)` of each unit (zero for torsion).
    pub lengths: Vec<f64>,
    /// Norm-one units `S` with `S·T = −T·S` (only for trace-zero `T`).
    pub anti_units: Vec<Isometry>,
    /// Largest translation length covered completely by the sweep.
    pub max_length: f64,
}

fn kernel_basis(gens: &[ExactMat], map: impl Fn(&ExactMat) -> ExactMat) -> Result<Vec<Vec<i64>>> {
    let cols: Vec<Vec<BigRational>> = gens.iter().map(|g| flatten(&map(g))).collect();
    let rows = int_rows(&cols);
    let ker = integer_kernel(&rows, gens.len());
    ker.into_iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    x.to_i64()
                        .ok_or_else(|| Error::Invalid("kernel basis overflow".into()))
                })
                .collect()
        })
        .collect()
}

/// Norm-one `x` in the order with `x·t₁ = sign·t₂·x`, each with the skew
/// coordinate `ℓ = log|σ₁(x)|²`, for `ℓ` in `[lo, hi]`.
///
/// With `Cₖ⁻¹ tₖ Cₖ` diagonal, `M = C₂⁻¹ x C₁` is diagonal or antidiagonal
/// on the solution lattice; call its two nonzero entries `σ₁, σ₂`. Units
/// have `|σ₁σ₂| = 1`, so the form `A⁻²|σ₁|² + A²|σ₂|²` is at most `2cosh(w)`
/// on units with `|ℓ − 2 log A| ≤ w`. Sweeping `2 log A` in steps of `w`
/// finds every unit in the window.
fn unit_solutions(
    cfg: &OrderConfig,
    t1: &Isometry,
    t2: &Isometry,
    sign: i64,
    lo: f64,
    hi: f64,
) -> Result<Vec<(f64, ExactMat)>> {
    let e1 = t1
        .exact()
        .ok_or_else(|| Error::Precondition("unit search needs exact elements".into()))?;
    let e2 = t2
        .exact()
        .ok_or_else(|| Error::Precondition("unit search needs exact elements".into()))?;
    if e1.is_scalar() || e2.is_scalar() {
        return Err(Error::Precondition(
            "unit search needs non-identity elements".into(),
        ));
    }
    let gens = cfg.generators();
    let s = Exact::from_int(sign, &cfg.field);
    let basis = kernel_basis(&gens, |g| g.mul(e1).sub(&e2.mul(g).scale(&s)))?;
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let (c1, _) = conjugate_to_normal_form(t1)?;
    let (c2, _) = conjugate_to_normal_form(t2)?;
    let (c1, c2_inv) = (*c1.matrix(), c2.matrix().adj());
    let approx = cfg.approx_generators();
    let frame = |x: &[i64]| c2_inv.mul(&combo_approx(&approx, x)).mul(&c1);
    let diagonal = basis
        .iter()
        .map(|b| frame(b))
        .all(|m| m.b.norm().max(m.c.norm()) <= 1e-8 * (1.0 + libm::sqrt(m.frob2())));
    // the larger coordinate is read off the frame; the smaller one follows
    // from the exact determinant, which keeps it accurate at large skew
    let cache: RefCell<BTreeMap<Vec<i64>, (C64, C64)>> = RefCell::new(BTreeMap::new());
    let sigma = |x: &[i64]| -> (C64, C64) {
        if let Some(v) = cache.borrow().get(x) {
            return *v;
        }
        let m = frame(x);
        let (p, q) = if diagonal { (m.a, m.d) } else { (m.b, m.c) };
        let det = combo_exact(&gens, x, &cfg.field).det().to_complex();
        let det = if diagonal { det } else { -det };
        let v = if p.norm() >= q.norm() {
            (p, if p.norm() == 0.0 { q } else { det / p })
        } else {
            (det / q, q)
        };
        cache.borrow_mut().insert(x.to_vec(), v);
        v
    };
    let lift = |y: &[i64], basis: &[Vec<i64>]| -> Vec<i64> {
        let mut x = vec![0i64; gens.len()];
        for (coef, b) in y.iter().zip(basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += coef * bi;
            }
        }
        x
    };
    let skewed = |a2: f64| {
        move |u: &[i64], v: &[i64]| {
            let (a1, a2s) = sigma(u);
            let (b1, b2) = sigma(v);
            (a1.conj() * b1).re / a2 + (a2s.conj() * b2).re * a2
        }
    };
    let one = Exact::one(&cfg.field);
    let width = 1.0;
    let mut found: BTreeMap<ExactMat, (f64, ExactMat)> = BTreeMap::new();
    let mut basis = lll_reduce(basis, skewed(libm::exp(lo)));
    let mut centre = lo;
    while centre - width <= hi {
        let a2 = libm::exp(centre);
        basis = lll_reduce(basis, skewed(a2));
        let form_of = skewed(a2);
        let gram: Vec<Vec<f64>> = basis
            .iter()
            .map(|u| basis.iter().map(|v| form_of(u, v)).collect())
            .collect();
        let form = ReducedForm::new(&gram)?;
        form.enumerate(2.0 * libm::cosh(width), |y| {
            if !first_nonzero_positive(y) {
                return;
            }
            let x = lift(y, &basis);
            let e = combo_exact(&gens, &x, &cfg.field);
            if e.det() != one {
                return;
            }
            let len = libm::log(sigma(&x).0.norm_sqr());
            if len >= lo - 1e-9 && len <= hi + 1e-9 {
                let key = e.normalized().expect("nonsingular");
                found.entry(key).or_insert((len, e));
            }
        });
        centre += width;
    }
    Ok(found.into_values().collect())
}

/// Norm-one units of the order commuting with `t` up to translation length
/// `max_length`, and for trace-zero `t` the units anticommuting with it.
pub fn centralizer_units(cfg: &OrderConfig, t: &Isometry, max_length: f64) -> Result<UnitSearch> {
    let sols = unit_solutions(cfg, t, t, 1, 0.0, max_length)?;
    if sols.is_empty() {
        return Err(Error::Invalid("commutant contains no units".into()));
    }
    let mut units: Vec<(f64, Isometry)> = sols
        .into_iter()
        .map(|(len, e)| {
            (
                if len.abs() < 1e-9 { 0.0 } else { len },
                Isometry::from_exact(e).expect("unit"),
            )
        })
        .collect();
    // a torsion unit and its inverse both have length zero; keep one
    let mut torsion: Vec<Isometry> = Vec::new();
    units.retain(|(len, u)| {
        if *len != 0.0 {
            return true;
        }
        if torsion.iter().any(|v| v.eq_tol(&u.inverse(), 0.0)) {
            return false;
        }
        torsion.push(u.clone());
        true
    });
    units.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.canonical_cmp(&b.1)));
    let anti_units = if t.exact().is_some_and(|e| e.trace().is_zero()) {
        let mut a: Vec<Isometry> = unit_solutions(cfg, t, t, -1, -max_length, max_length)?
            .into_iter()
            .map(|(_, e)| Isometry::from_exact(e).expect("unit"))
            .collect();
        a.sort_by(|x, y| {
            x.displacement_cosh()
                .total_cmp(&y.displacement_cosh())
                .then(x.canonical_cmp(y))
        });
        a
    } else {
        Vec::new()
    };
    Ok(UnitSearch {
        lengths: units.iter().map(|u| u.0).collect(),
        units: units.into_iter().map(|u| u.1).collect(),
        anti_units,
        max_length,
    })
}

/// A norm-one unit `x` of the order with `x⁻¹·t₂·x = t₁` in PSL, of least
/// displacement among those with skew coordinate within `±max_length`.
pub fn find_conjugator(
    cfg: &OrderConfig,
    t1: &Isometry,
    t2: &Isometry,
    max_length: f64,
) -> Result<Option<Isometry>> {
    let mut best: Option<Isometry> = None;
    for sign in [1, -1] {
        for (_, e) in unit_solutions(cfg, t1, t2, sign, -max_length, max_length)? {
            let x = Isometry::from_exact(e).expect("unit");
            let better = best.as_ref().is_none_or(|b| {
                x.displacement_cosh()
                    .total_cmp(&b.displacement_cosh())
                    .then(x.canonical_cmp(b))
                    == core::cmp::Ordering::Less
            });
            if better {
                best = Some(x);
            }
        }
    }
    Ok(best)
}

/// One prime of the anisotropy sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeCheck {
    /// Rational prime below the prime ideal.
    pub p: u64,
    /// Residue of `√−m` defining the prime ideal `(p, √−m − r)`.
    pub r: u64,
    /// Exponent `e` of the modulus `𝔭^e`.
    pub exponent: u32,
    /// `Some(true)` when a primitive vector with reduced norm `≡ 0 mod 𝔭^e`
    /// exists; `None` when the prime was skipped.
    pub primitive_zero: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnisotropyReport {
    pub checks: Vec<PrimeCheck>,
    /// Primes at which no primitive zero exists modulo `𝔭²`; at such a prime
    /// the algebra cannot be a matrix algebra, so it is a division algebra.
    pub anisotropic_at: Vec<(u64, u64)>,
}

impl AnisotropyReport {
    pub fn division(&self) -> bool {
        !self.anisotropic_at.is_empty()
    }
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn reduce_rational(q: &BigRational, modulus: u64) -> Option<u64> {
    let m = BigInt::from(modulus);
    let num = q.numer().mod_floor(&m).to_u64()?;
    let den = q.denom().mod_floor(&m).to_u64()?;
    Some((num as u128 * inv_mod(den, modulus)? as u128 % modulus as u128) as u64)
}

fn reduce_quad(x: &QuadExact, r: u64, modulus: u64) -> Option<u64> {
    let a = reduce_rational(&x.a, modulus)?;
    let b = reduce_rational(&x.b, modulus)?;
    Some(((a as u128 + b as u128 * r as u128) % modulus as u128) as u64)
}

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Sample the reduced-norm form modulo `𝔭²` at degree-one primes `𝔭` above
/// odd rational primes `p ≤ max_p` (searches larger than `limit` vectors are
/// skipped). For a division algebra ramified at `𝔭` every primitive vector
/// has `v_𝔭(nrd) ≤ 1`; a matrix algebra has primitive zeros at every prime.
pub fn anisotropy_report(cfg: &OrderConfig, max_p: u64, limit: u64) -> Result<AnisotropyReport> {
    cfg.check_fields()?;
    let m = cfg.field.m;
    let basis = &cfg.basis;
    // nrd(Σ x_k e_k) = Σ_k x_k² det(e_k) + Σ_{k<l} x_k x_l (det(e_k + e_l) − det e_k − det e_l)
    let mut coeffs: Vec<(usize, usize, Exact)> = Vec::new();
    for k in 0..4 {
        coeffs.push((k, k, basis[k].det()));
        for l in k + 1..4 {
            let c = &(&basis[k].add(&basis[l]).det() - &basis[k].det()) - &basis[l].det();
            coeffs.push((k, l, c));
        }
    }
    if coeffs.iter().any(|(_, _, c)| !c.in_base()) {
        return Err(Error::BadBasis(
            "reduced norm does not lie in the base field".into(),
        ));
    }
    let mut checks = Vec::new();
    let mut anisotropic_at = Vec::new();
    for p in (3..=max_p).filter(|&p| is_prime(p) && !m.is_multiple_of(p)) {
        let neg_m = (p - m % p) % p;
        let roots: Vec<u64> = (1..p).filter(|r| r * r % p == neg_m).collect();
        for r0 in roots {
            let e = 2u32;
            let modulus = p.pow(e);
            let mut r = r0;
            let inv2r = inv_mod(2 * r % p, p);
            if let Some(inv) = inv2r {
                let f = (r as u128 * r as u128 + m as u128) % modulus as u128;
                let corr = (f as u64 / p) % p * inv % p;
                r = (r + modulus - corr * p % modulus) % modulus;
            }
            debug_assert_eq!((r as u128 * r as u128 + m as u128) % modulus as u128, 0);
            let size = modulus.checked_pow(4);
            if size.is_none_or(|s| s > limit) {
                checks.push(PrimeCheck {
                    p,
                    r,
                    exponent: e,
                    primitive_zero: None,
                });
                continue;
            }
            let reduced: Option<Vec<(usize, usize, u64)>> = coeffs
                .iter()
                .map(|(k, l, c)| reduce_quad(&c.x, r, modulus).map(|v| (*k, *l, v)))
                .collect();
            let Some(reduced) = reduced else {
                checks.push(PrimeCheck {
                    p,
                    r,
                    exponent: e,
                    primitive_zero: None,
                });
                continue;
            };
            let mut zero = false;
            let mut x = [0u64; 4];
            'outer: for i in 0..size.expect("checked") {
                let mut v = i;
                for xi in x.iter_mut() {
                    *xi = v % modulus;
                    v /= modulus;
                }
                if x.iter().all(|&xi| xi % p == 0) {
                    continue;
                }
                let mut s: u128 = 0;
                for &(k, l, c) in &reduced {
                    s += c as u128 * (x[k] as u128 * x[l] as u128 % modulus as u128)
                        % modulus as u128;
                }
                if s.is_multiple_of(modulus as u128) {
                    zero = true;
                    break 'outer;
                }
            }
            if !zero {
                anisotropic_at.push((p, r));
            }
            checks.push(PrimeCheck {
                p,
                r,
                exponent: e,
                primitive_zero: Some(zero),
            });
        }
    }
    Ok(AnisotropyReport {
        checks,
        anisotropic_at,
    })
}

/// A maximal order `{(1+j+k)/2, (i+2j+k)/4, j, k}` of the quaternion algebra
/// `(−2, −5)` over `Q(i)`, which is ramified exactly at the two primes above 5.
/// It is embedded over `Q(i)(√−2)` by
/// `x0 + x1 i + x2 j + x3 k ↦ [[x0 + x1√−2, −5(x2 + x3√−2)], [x2 − x3√−2, x0 − x1√−2]]`.
/// `hecke_norm` is `a + b·i` given as `(a, b)`.
pub fn reference_order(radius: f64, hecke_norm: (i64, i64)) -> OrderConfig {
    let field = FieldSpec::extension(QuadExact::from_ints(-2, 0, 1));
    let entry = |re: &BigRational, sqrt_part: &BigRational| {
        Exact::new(
            QuadExact::from_rational(re.clone(), 1),
            QuadExact::from_rational(sqrt_part.clone(), 1),
            &field,
        )
        .expect("entries in the tower field")
    };
    let element = |x: [(i64, i64); 4]| {
        let [x0, x1, x2, x3] = x.map(|(p, q)| BigRational::new(p.into(), q.into()));
        let minus_five = BigRational::from_integer((-5).into());
        ExactMat::new(
            entry(&x0, &x1),
            entry(&(&x2 * &minus_five), &(&x3 * &minus_five)),
            entry(&x2, &-x3.clone()),
            entry(&x0, &-x1.clone()),
        )
        .expect("same field")
    };
    let basis = [
        element([(1, 2), (0, 1), (1, 2), (1, 2)]),
        element([(0, 1), (1, 4), (1, 2), (1, 4)]),
        element([(0, 1), (0, 1), (1, 1), (0, 1)]),
        element([(0, 1), (0, 1), (0, 1), (1, 1)]),
    ];
    OrderConfig {
        hecke_norm: Exact::from_base(QuadExact::from_ints(hecke_norm.0, hecke_norm.1, 1), &field)
            .expect("base field"),
        field,
        basis,
        coefficients: Coefficients::FieldIntegers,
        norm_one_bound: radius,
    }
}

/// The matrix order `M₂(Z[i])`, whose units form the Picard group.
pub fn split_order(radius: f64) -> OrderConfig {
    let f = FieldSpec::base(1);
    let z = Exact::zero(&f);
    let o = Exact::one(&f);
    let m = |a: &Exact, b: &Exact, c: &Exact, d: &Exact| {
        ExactMat::new(a.clone(), b.clone(), c.clone(), d.clone()).unwrap()
    };
    OrderConfig {
        field: f.clone(),
        basis: [
            m(&o, &z, &z, &z),
            m(&z, &o, &z, &z),
            m(&z, &z, &o, &z),
            m(&z, &z, &z, &o),
        ],
        coefficients: Coefficients::FieldIntegers,
        norm_one_bound: radius,
        hecke_norm: Exact::one(&f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_integral() {
        let cfg = reference_order(1.0, (1, 1));
        let x = cfg.identity_coordinates().unwrap();
        let want: Vec<BigInt> = [2, 0, -1, -1, 0, 0, 0, 0]
            .iter()
            .map(|&v| BigInt::from(v))
            .collect();
        assert_eq!(x, want);
    }

    #[test]
    fn non_integral_identity_is_bad_basis() {
        let mut cfg = reference_order(1.0, (1, 1));
        let three = Exact::from_int(3, &cfg.field);
        cfg.basis[0] = cfg.basis[0].scale(&three);
        assert!(matches!(enumerate_order(&cfg), Err(Error::BadBasis(_))));
    }

    #[test]
    fn split_order_identity_layer() {
        // stabilizer of j in PSL(2, Z[i]) near the identity: 1, diag(i, −i), and the two swaps
        let out = enumerate_order(&split_order(0.5)).unwrap();
        assert_eq!(out.slice.gamma.len(), 4);
        assert_eq!(out.slice.double_coset.len(), 4);
        assert!(out.slice.gamma.iter().all(|g| g.displacement() < 1e-9));
        assert!(out.warnings.iter().any(|w| w == "alpha in Gamma"));
    }

    #[test]
    fn division_order_units_are_exact_and_closed() {
        let out = enumerate_order(&reference_order(2.0, (1, 1))).unwrap();
        let s = &out.slice;
        assert!(s.gamma.len() > 1);
        for g in &s.gamma {
            assert!(g.exact().unwrap().det().is_one());
        }
        let nu = s.hecke_norm.clone().unwrap();
        for g in &s.double_coset {
            assert_eq!(g.exact().unwrap().det(), nu);
        }
    }

    #[test]
    fn anisotropy_distinguishes_division_from_split() {
        let div = anisotropy_report(&reference_order(1.0, (1, 1)), 50, 2_000_000).unwrap();
        assert!(div.division());
        assert!(div.anisotropic_at.iter().all(|&(p, _)| p == 5));
        assert_eq!(div.anisotropic_at.len(), 2);
        let split = anisotropy_report(&split_order(1.0), 50, 2_000_000).unwrap();
        assert!(!split.division());
        assert!(split.checks.iter().any(|c| c.primitive_zero == Some(true)));
    }
}
