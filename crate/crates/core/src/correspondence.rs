//! Coset decomposition of a double coset, the Hecke operator on kernels, and
//! checks of the hypotheses on the representation and on `α`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::groupdata::{GroupSlice, Listing, Membership};
use crate::isometry::{apply, delta, Isometry, PointH3};
use crate::linalg::CMatrix;
use crate::quadrature::ComplexSum;
use crate::scalars::C64;
use crate::transforms::PointPairFunction;

const UNITARY_TOL: f64 = 1e-10;

/// An element of the slice addressed by its list and position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ElementRef {
    Gamma(usize),
    Layer(usize),
}

impl ElementRef {
    /// Parse `gamma:<i>`, `double_coset:<i>`, or a bare index (a Γ element).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad element reference '{s}'"));
        let (list, idx) = match s.split_once(':') {
            Some((l, i)) => (l, i),
            None => ("gamma", s),
        };
        let i: usize = idx.trim().parse().map_err(|_| bad())?;
        match list.trim() {
            "gamma" => Ok(ElementRef::Gamma(i)),
            "double_coset" => Ok(ElementRef::Layer(i)),
            _ => Err(bad()),
        }
    }
}

impl core::fmt::Display for ElementRef {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ElementRef::Gamma(i) => write!(f, "gamma:{i}"),
            ElementRef::Layer(i) => write!(f, "double_coset:{i}"),
        }
    }
}

/// One letter of a word in the generators and `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Letter {
    Gen { name: String, inverse: bool },
    Alpha { inverse: bool },
}

impl Letter {
    pub fn parse(s: &str) -> Result<Self> {
        let (base, inverse) = match s.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (s, false),
        };
        if base.is_empty() {
            return Err(Error::Invalid(format!("empty word letter '{s}'")));
        }
        Ok(if base == "alpha" {
            Letter::Alpha { inverse }
        } else {
            Letter::Gen {
                name: base.to_string(),
                inverse,
            }
        })
    }

    fn inverted(&self) -> Letter {
        match self {
            Letter::Gen { name, inverse } => Letter::Gen {
                name: name.clone(),
                inverse: !inverse,
            },
            Letter::Alpha { inverse } => Letter::Alpha { inverse: !inverse },
        }
    }
}

/// A finite-dimensional representation given on generators, together with
/// its value on `α` and, optionally, on `α⁻¹`.
#[derive(Clone, Debug)]
pub struct UnitaryRep {
    dim: usize,
    generators: BTreeMap<String, CMatrix>,
    alpha: CMatrix,
    alpha_inv: CMatrix,
    alpha_inv_given: bool,
    words: BTreeMap<ElementRef, Vec<Letter>>,
    trivial_on_gamma: bool,
}

impl UnitaryRep {
    /// The one-dimensional trivial representation.
    pub fn trivial() -> Self {
        UnitaryRep {
            dim: 1,
            generators: BTreeMap::new(),
            alpha: CMatrix::identity(1),
            alpha_inv: CMatrix::identity(1),
            alpha_inv_given: false,
            words: BTreeMap::new(),
            trivial_on_gamma: true,
        }
    }

    /// Validate and build. Generator images must be unitary within `1e−10`
    /// and `α` must act invertibly. Without `alpha_inv`, `χ(α⁻¹)` is taken to
    /// be `χ(α)⁻¹`.
    pub fn new(
        dim: usize,
        generators: BTreeMap<String, CMatrix>,
        alpha: CMatrix,
        alpha_inv: Option<CMatrix>,
        words: BTreeMap<ElementRef, Vec<Letter>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid(
                "representation dimension must be positive".into(),
            ));
        }
        let check_dim = |m: &CMatrix, what: &str| {
            if m.dim() == dim {
                Ok(())
            } else {
                Err(Error::Invalid(format!(
                    "{what} has dimension {} instead of {dim}",
                    m.dim()
                )))
            }
        };
        for (name, u) in &generators {
            check_dim(u, name)?;
            if name == "alpha" {
                return Err(Error::Invalid("'alpha' is reserved".into()));
            }
            if !u.is_unitary(UNITARY_TOL) {
                return Err(Error::Invalid(format!(
                    "generator image '{name}' is not unitary"
                )));
            }
        }
        check_dim(&alpha, "alpha")?;
        let inv = alpha
            .inverse()
            .map_err(|_| Error::Invalid("alpha image is not invertible".into()))?;
        let cond = alpha.max_abs() * inv.max_abs() * dim as f64;
        if !cond.is_finite() || cond > 1e12 {
            return Err(Error::Invalid("alpha image is numerically singular".into()));
        }
        if let Some(a) = &alpha_inv {
            check_dim(a, "alpha_inv")?;
        }
        for (key, word) in &words {
            for l in word {
                match l {
                    Letter::Gen { name, .. } if !generators.contains_key(name) => {
                        return Err(Error::Invalid(format!(
                            "word for {key} uses unknown generator '{name}'"
                        )));
                    }
                    Letter::Alpha { .. } if matches!(key, ElementRef::Gamma(_)) => {
                        return Err(Error::Invalid(format!("word for {key} contains alpha")));
                    }
                    _ => {}
                }
            }
        }
        let id = CMatrix::identity(dim);
        let trivial_on_gamma = generators.values().all(|u| u.max_diff(&id) <= UNITARY_TOL);
        Ok(UnitaryRep {
            dim,
            generators,
            alpha,
            alpha_inv_given: alpha_inv.is_some(),
            alpha_inv: alpha_inv.unwrap_or(inv),
            words,
            trivial_on_gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chi_alpha(&self) -> &CMatrix {
        &self.alpha
    }

    pub fn chi_alpha_inv(&self) -> &CMatrix {
        &self.alpha_inv
    }

    pub fn alpha_inv_given(&self) -> bool {
        self.alpha_inv_given
    }

    pub fn is_trivial_on_gamma(&self) -> bool {
        self.trivial_on_gamma
    }

    pub fn word(&self, r: ElementRef) -> Option<&[Letter]> {
        self.words.get(&r).map(|w| w.as_slice())
    }

    fn letter(&self, l: &Letter) -> CMatrix {
        match l {
            Letter::Gen { name, inverse } => {
                let u = &self.generators[name];
                if *inverse {
                    u.adjoint()
                } else {
                    u.clone()
                }
            }
            Letter::Alpha { inverse: false } => self.alpha.clone(),
            Letter::Alpha { inverse: true } => self.alpha_inv.clone(),
        }
    }

    pub fn eval_word(&self, w: &[Letter]) -> CMatrix {
        w.iter().fold(CMatrix::identity(self.dim), |acc, l| {
            acc.mul(&self.letter(l))
        })
    }

    fn eval_inverse_word(&self, w: &[Letter]) -> CMatrix {
        w.iter().rev().fold(CMatrix::identity(self.dim), |acc, l| {
            acc.mul(&self.letter(&l.inverted()))
        })
    }

    /// `χ(γ)` for the Γ element at index `i`.
    pub fn chi_gamma(&self, i: usize) -> Result<CMatrix> {
        match self.words.get(&ElementRef::Gamma(i)) {
            Some(w) => Ok(self.eval_word(w)),
            None if self.trivial_on_gamma => Ok(CMatrix::identity(self.dim)),
            None => Err(Error::MissingWord(ElementRef::Gamma(i).to_string())),
        }
    }

    /// `χ(T)` and `χ(T⁻¹)` for a layer element, when a word was supplied.
    pub fn chi_layer(&self, i: usize) -> Option<(CMatrix, CMatrix)> {
        self.words
            .get(&ElementRef::Layer(i))
            .map(|w| (self.eval_word(w), self.eval_inverse_word(w)))
    }
}

/// Coset representatives of `Γ ∩ α⁻¹Γα` in `Γ` and of Γ in `Γα⁻¹Γ`.
#[derive(Clone, Debug)]
pub struct CorrespondenceData {
    pub degree: usize,
    /// Right coset representatives `εᵢ` (Γ elements).
    pub epsilon: Vec<Isometry>,
    pub epsilon_index: Vec<usize>,
    /// `αᵢ = α εᵢ`.
    pub alpha_i: Vec<Isometry>,
    /// Representatives with `Γα⁻¹Γ = ⊔ Γβᵢ` (layer elements).
    pub beta: Vec<Isometry>,
    pub beta_index: Vec<usize>,
    /// `χ(αᵢ) = χ(α) χ(εᵢ)`.
    pub chi_alpha_i: Vec<CMatrix>,
    /// Coset of each Γ element, `None` where the radius could not decide.
    pub coset_of: Vec<Option<usize>>,
    pub coset_sizes: Vec<usize>,
    pub unclassified: usize,
    /// Layer elements whose coset under the `αᵢ` was certified by the audit.
    pub audited_layer: usize,
    pub radius: f64,
}

/// Element order used for representative choice: displacement, then the
/// identity, then canonical order.
fn rep_order(a: &Isometry, b: &Isometry) -> Ordering {
    a.displacement_cosh()
        .total_cmp(&b.displacement_cosh())
        .then_with(|| b.is_identity(1e-12).cmp(&a.is_identity(1e-12)))
        .then_with(|| a.canonical_cmp(b))
}

fn sorted_indices(list: &[Isometry]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..list.len()).collect();
    idx.sort_by(|&i, &j| rep_order(&list[i], &list[j]));
    idx
}

/// Partition `list` by a relation tested against representatives; `test(g, r)`
/// decides whether `g` lies in the class of representative `r`.
fn partition<F>(list: &[Isometry], mut test: F) -> (Vec<usize>, Vec<Option<usize>>)
where
    F: FnMut(&Isometry, &Isometry) -> Membership,
{
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = alloc::vec![None; list.len()];
    for i in sorted_indices(list) {
        let mut undecided = false;
        let mut hit = None;
        for (k, &r) in reps.iter().enumerate() {
            match test(&list[i], &list[r]) {
                Membership::Member(_) => {
                    hit = Some(k);
                    break;
                }
                Membership::Undecided => undecided = true,
                Membership::NotMember => {}
            }
        }
        match hit {
            Some(k) => class_of[i] = Some(k),
            None if !undecided => {
                class_of[i] = Some(reps.len());
                reps.push(i);
            }
            None => {}
        }
    }
    (reps, class_of)
}

fn gamma_query(listing: &Listing, s: &GroupSlice, factors: &[&Isometry]) -> Membership {
    let approx = factors
        .iter()
        .skip(1)
        .fold(*factors[0].matrix(), |acc, f| acc.mul(f.matrix()));
    listing.query_lazy(&s.gamma, &approx, || {
        factors.iter().all(|f| f.is_exact()).then(|| {
            factors
                .iter()
                .skip(1)
                .fold((*factors[0]).clone(), |acc, f| acc.mul(f))
        })
    })
}

/// Decompose `Γ` into right cosets of `Γ ∩ α⁻¹Γα` and the layer into left
/// cosets of Γ, using the slice listing as the membership oracle.
///
/// An element whose relation tests fall outside the radius is left
/// unclassified. The decomposition is rejected with `RadiusInsufficient` when
/// the two coset counts differ or when a layer element that the radius can
/// decide is not covered by exactly one `αᵢ⁻¹Γ`.
pub fn decompose(s: &GroupSlice, chi: &UnitaryRep) -> Result<CorrespondenceData> {
    let listing = s.gamma_listing();
    let alpha = &s.alpha;
    let alpha_inv = alpha.inverse();
    let inv_of = |g: &Isometry| -> Isometry { g.inverse() };

    let (eps_idx, coset_of) = partition(&s.gamma, |g, r| {
        let r_inv = inv_of(r);
        gamma_query(&listing, s, &[alpha, g, &r_inv, &alpha_inv])
    });
    let (beta_idx, _) = partition(&s.double_coset, |t, r| {
        let r_inv = inv_of(r);
        gamma_query(&listing, s, &[t, &r_inv])
    });

    let degree = eps_idx.len();
    if beta_idx.len() != degree {
        return Err(Error::RadiusInsufficient(format!(
            "found {} cosets in Γ but {} in the layer",
            degree,
            beta_idx.len()
        )));
    }
    let epsilon: Vec<Isometry> = eps_idx.iter().map(|&i| s.gamma[i].clone()).collect();
    let alpha_i: Vec<Isometry> = epsilon.iter().map(|e| alpha.mul(e)).collect();

    let max_alpha_i = alpha_i.iter().map(|a| a.displacement()).fold(0.0, f64::max);
    let mut audited = 0;
    for (t_idx, t) in s.double_coset.iter().enumerate() {
        if t.displacement() + max_alpha_i > s.radius * (1.0 - 1e-9) {
            continue;
        }
        let hits = alpha_i
            .iter()
            .filter(|a| matches!(gamma_query(&listing, s, &[a, t]), Membership::Member(_)))
            .count();
        if hits != 1 {
            return Err(Error::RadiusInsufficient(format!(
                "layer element {t_idx} lies in {hits} of the {degree} cosets αᵢ⁻¹Γ"
            )));
        }
        audited += 1;
    }

    let mut coset_sizes = alloc::vec![0; degree];
    for c in coset_of.iter().flatten() {
        coset_sizes[*c] += 1;
    }
    let chi_alpha_i = eps_idx
        .iter()
        .map(|&i| Ok(chi.chi_alpha().mul(&chi.chi_gamma(i)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrespondenceData {
        degree,
        beta: beta_idx
            .iter()
            .map(|&i| s.double_coset[i].clone())
            .collect(),
        beta_index: beta_idx,
        epsilon,
        epsilon_index: eps_idx,
        alpha_i,
        chi_alpha_i,
        unclassified: coset_of.iter().filter(|c| c.is_none()).count(),
        coset_of,
        coset_sizes,
        audited_layer: audited,
        radius: s.radius,
    })
}

/// The two evaluations of the Hecke-transformed kernel at `(P, Q)`.
#[derive(Clone, Debug)]
pub struct HeckeKernelValue {
    /// `Σ_{T ∈ Γα⁻¹Γ} χ(T⁻¹)* k(δ(P, TQ))`.
    pub direct: CMatrix,
    /// `Σᵢ χ(αᵢ)* Σ_{γ ∈ Γ} χ(γ) k(δ(αᵢP, γQ))`.
    pub via_operator: CMatrix,
    pub max_diff: f64,
    /// Number of nonzero terms in the direct sum.
    pub terms: usize,
}

impl HeckeKernelValue {
    pub fn value(&self) -> &CMatrix {
        &self.direct
    }
}

fn point_distance_to_j(p: &PointH3) -> f64 {
    libm::acosh(delta(p, &PointH3::j()).max(1.0))
}

/// `χ(T⁻¹)` for a layer element: from its word, or through the coset
/// factorization `T = αᵢ⁻¹γ` as `χ(γ)⁻¹ χ(αᵢ)`.
pub fn chi_layer_inverse(
    s: &GroupSlice,
    cd: &CorrespondenceData,
    chi: &UnitaryRep,
    listing: &Listing,
    t_idx: usize,
) -> Result<CMatrix> {
    if let Some((_, inv)) = chi.chi_layer(t_idx) {
        return Ok(inv);
    }
    let t = &s.double_coset[t_idx];
    for (a, chi_a) in cd.alpha_i.iter().zip(&cd.chi_alpha_i) {
        if let Membership::Member(g) = gamma_query(listing, s, &[a, t]) {
            return Ok(chi.chi_gamma(g)?.adjoint().mul(chi_a));
        }
    }
    if chi.is_trivial_on_gamma()
        && chi.chi_alpha().max_diff(&CMatrix::identity(chi.dim())) <= UNITARY_TOL
    {
        return Ok(CMatrix::identity(chi.dim()));
    }
    Err(Error::MissingWord(format!("double_coset:{t_idx}")))
}

/// Evaluate `K_𝓜(P, Q)` directly over the layer and as `𝓜_P K_Γ(P, Q)`,
/// and require the two to agree within `1e−9`.
pub fn hecke_apply_to_kernel(
    s: &GroupSlice,
    cd: &CorrespondenceData,
    chi: &UnitaryRep,
    k: &PointPairFunction,
    p: &PointH3,
    q: &PointH3,
) -> Result<HeckeKernelValue> {
    let n = chi.dim();
    if !k.has_bounded_support() {
        return Err(Error::TruncationUnsound(
            "kernel support is unbounded".into(),
        ));
    }
    let u = libm::acosh(k.support_bound().max(1.0));
    let dp = point_distance_to_j(p);
    let dq = point_distance_to_j(q);
    let max_alpha_i = cd
        .alpha_i
        .iter()
        .map(|a| a.displacement())
        .fold(0.0, f64::max);
    let need = dp + u + dq + max_alpha_i;
    if need > s.radius {
        return Err(Error::TruncationUnsound(format!(
            "kernel reaches displacement {need:.6} beyond the slice radius {}",
            s.radius
        )));
    }
    let listing = s.gamma_listing();
    let accumulate = |sums: &mut Vec<ComplexSum>, m: &CMatrix, w: f64| {
        for i in 0..n {
            for j in 0..n {
                sums[i * n + j].add(m.get(i, j) * w);
            }
        }
    };
    let finish = |sums: Vec<ComplexSum>| -> CMatrix {
        let rows: Vec<Vec<C64>> = (0..n)
            .map(|i| (0..n).map(|j| sums[i * n + j].value()).collect())
            .collect();
        CMatrix::from_rows(&rows).expect("square")
    };

    let mut direct = alloc::vec![ComplexSum::default(); n * n];
    let mut terms = 0;
    for (t_idx, t) in s.double_coset.iter().enumerate() {
        let w = k.eval(delta(p, &apply(t, q)));
        if w == 0.0 {
            continue;
        }
        terms += 1;
        let m = chi_layer_inverse(s, cd, chi, &listing, t_idx)?.adjoint();
        accumulate(&mut direct, &m, w);
    }

    let mut via = alloc::vec![ComplexSum::default(); n * n];
    let gq: Vec<PointH3> = s.gamma.iter().map(|g| apply(g, q)).collect();
    for (a, chi_a) in cd.alpha_i.iter().zip(&cd.chi_alpha_i) {
        let ap = apply(a, p);
        let adj = chi_a.adjoint();
        for (g_idx, x) in gq.iter().enumerate() {
            let w = k.eval(delta(&ap, x));
            if w == 0.0 {
                continue;
            }
            accumulate(&mut via, &adj.mul(&chi.chi_gamma(g_idx)?), w);
        }
    }
    let direct = finish(direct);
    let via_operator = finish(via);
    let max_diff = direct.max_diff(&via_operator);
    if max_diff > 1e-9 * (1.0 + direct.max_abs()) {
        return Err(Error::Invalid(format!(
            "kernel identity violated: the two evaluations differ by {max_diff:e}"
        )));
    }
    Ok(HeckeKernelValue {
        direct,
        via_operator,
        max_diff,
        terms,
    })
}

/// Evidence for the hypotheses on `χ` and `α`, all valid within the radius.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    /// Products `γ₁γ₂` checked for `χ(γ₁γ₂) = χ(γ₁)χ(γ₂)`.
    pub homomorphism_checks: usize,
    /// Layer words checked against `χ(εᵢ)⁻¹ χ(α⁻¹) χ(γ)`.
    pub extension_checks: usize,
    pub max_multiplicativity_error: f64,
    pub assumption1: bool,
    /// `α` lies in the listed layer `Γα⁻¹Γ`.
    pub alpha_in_inverse_layer: bool,
    /// Every layer element has its inverse in the layer.
    pub layer_inverse_closed: bool,
    pub chi_alpha_inverse_is_adjoint: bool,
    pub assumption2: bool,
    pub radius: f64,
}

/// Sample the multiplicativity of `χ` on slice-expressible products and test
/// the self-adjointness hypotheses by exhaustive layer comparison.
pub fn check_assumptions(
    s: &GroupSlice,
    cd: &CorrespondenceData,
    chi: &UnitaryRep,
) -> Result<AssumptionReport> {
    let listing = s.gamma_listing();
    let mut max_err: f64 = 0.0;
    let mut hom = 0;
    if !chi.is_trivial_on_gamma() {
        let chis: Vec<Option<CMatrix>> =
            (0..s.gamma.len()).map(|i| chi.chi_gamma(i).ok()).collect();
        let sample: Vec<usize> = sorted_indices(&s.gamma).into_iter().take(64).collect();
        for &i in &sample {
            for &j in &sample {
                let (Some(a), Some(b)) = (&chis[i], &chis[j]) else {
                    continue;
                };
                if let Membership::Member(k) = gamma_query(&listing, s, &[&s.gamma[i], &s.gamma[j]])
                {
                    if let Some(c) = &chis[k] {
                        max_err = max_err.max(a.mul(b).max_diff(c));
                        hom += 1;
                    }
                }
            }
        }
    }
    let mut ext = 0;
    for t_idx in 0..s.double_coset.len() {
        let Some((chi_t, _)) = chi.chi_layer(t_idx) else {
            continue;
        };
        let t = &s.double_coset[t_idx];
        for (i, a) in cd.alpha_i.iter().enumerate() {
            if let Membership::Member(g) = gamma_query(&listing, s, &[a, t]) {
                // T = εᵢ⁻¹ α⁻¹ γ
                let want = chi
                    .chi_gamma(cd.epsilon_index[i])?
                    .adjoint()
                    .mul(chi.chi_alpha_inv())
                    .mul(&chi.chi_gamma(g)?);
                max_err = max_err.max(chi_t.max_diff(&want));
                ext += 1;
                break;
            }
        }
    }
    let assumption1 = max_err <= 1e-9;

    let layer = s.layer_listing();
    let alpha_in_inverse_layer = matches!(
        layer.query(&s.double_coset, &s.alpha),
        Membership::Member(_)
    );
    let layer_inverse_closed = s.double_coset.iter().all(|t| {
        matches!(
            layer.query(&s.double_coset, &t.inverse()),
            Membership::Member(_)
        )
    });
    let chi_alpha_inverse_is_adjoint =
        chi.chi_alpha_inv().max_diff(&chi.chi_alpha().adjoint()) <= 1e-10;
    Ok(AssumptionReport {
        homomorphism_checks: hom,
        extension_checks: ext,
        max_multiplicativity_error: max_err,
        assumption1,
        alpha_in_inverse_layer,
        layer_inverse_closed,
        chi_alpha_inverse_is_adjoint,
        assumption2: alpha_in_inverse_layer && layer_inverse_closed && chi_alpha_inverse_is_adjoint,
        radius: s.radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupdata::{enumerate_order, reference_order};

    #[test]
    fn letters_parse() {
        assert_eq!(
            Letter::parse("a^-1").unwrap(),
            Letter::Gen {
                name: "a".into(),
                inverse: true
            }
        );
        assert_eq!(
            Letter::parse("alpha").unwrap(),
            Letter::Alpha { inverse: false }
        );
        assert_eq!(
            ElementRef::parse("double_coset:4").unwrap(),
            ElementRef::Layer(4)
        );
        assert_eq!(ElementRef::parse("7").unwrap(), ElementRef::Gamma(7));
        assert!(ElementRef::parse("beta:1").is_err());
    }

    #[test]
    fn reference_degree_is_three() {
        let s = enumerate_order(&reference_order(3.0, (1, 1)))
            .unwrap()
            .slice;
        let cd = decompose(&s, &UnitaryRep::trivial()).unwrap();
        assert_eq!(cd.degree, 3);
        assert_eq!(
            cd.coset_sizes.iter().sum::<usize>() + cd.unclassified,
            s.gamma.len()
        );
        assert!(cd.epsilon[0].is_identity(0.0));
    }
}
