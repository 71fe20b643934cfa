//! Γ-conjugacy classes of the double-coset layer, their invariants, and the
//! structure of their centralizers in Γ.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::groupdata::{centralizer_units, find_conjugator, GroupSlice, Membership, OrderConfig};
use crate::isometry::{
    classify, conjugate_to_normal_form, CMat, ExactMat, Isometry, IsometryIndex, Kind,
};
use crate::scalars::{Exact, C64, DEFAULT_TOL};

/// Cap on the order of an elliptic generator.
pub const ELLIPTIC_ORDER_CAP: u32 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassKind {
    Elliptic,
    Loxodromic,
}

impl ClassKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassKind::Elliptic => "elliptic",
            ClassKind::Loxodromic => "loxodromic",
        }
    }
}

/// Which case of the elliptic structure of a centralizer holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureCase {
    /// Every elliptic element is a power of one generator.
    Cyclic,
    /// An order-two element with a further half-turn `S` reversing its axis.
    Order2Extension,
}

impl StructureCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            StructureCase::Cyclic => "cyclic",
            StructureCase::Order2Extension => "order2_extension",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CentralizerData {
    /// Loxodromic element of least norm among the collected centralizer.
    pub t0: Isometry,
    pub n_t0: f64,
    /// Order of the maximal finite subgroup `𝓔`.
    pub elliptic_order: u32,
    /// Generator of the rotations about the common axis, if nontrivial.
    pub elliptic_generator: Option<Isometry>,
    /// The axis-reversing half-turn in the extension case.
    pub extension: Option<Isometry>,
    pub structure_case: StructureCase,
    /// Centralizer elements found among Γ and the witnesses.
    pub collected: usize,
    pub t0_primitive: bool,
}

#[derive(Clone, Debug)]
pub struct ClassRecord {
    pub representative: Isometry,
    pub rep_index: usize,
    pub kind: ClassKind,
    /// Layer indices of the members found, ascending.
    pub members: Vec<usize>,
    /// Trace of the determinant-one representative, sign fixed so that the
    /// real part is nonnegative.
    pub trace: C64,
    /// `a(T)` and `N(T)` for loxodromic classes.
    pub a_of_t: Option<C64>,
    pub norm: Option<f64>,
    /// `|tr² − 4|` on determinant one.
    pub trace_gap: f64,
    /// Exact `tr²/det`, when the slice is exact.
    pub invariant: Option<Exact>,
    /// False when another class shares the invariant and no conjugator or
    /// certificate of distinctness was found.
    pub resolved: bool,
    pub centralizer: core::result::Result<CentralizerData, Error>,
}

impl ClassRecord {
    pub fn members_found(&self) -> usize {
        self.members.len()
    }

    /// `log N(T)` for loxodromic classes.
    pub fn length(&self) -> Option<f64> {
        self.norm.map(libm::log)
    }
}

#[derive(Clone, Debug)]
pub struct ClassReduction {
    pub classes: Vec<ClassRecord>,
    /// Layer elements equal to the identity (only when `α ∈ Γ`).
    pub identity_members: usize,
    pub unresolved: usize,
    pub radius: f64,
}

fn canonical_trace(t: C64) -> C64 {
    if t.re < 0.0 || (t.re == 0.0 && t.im < 0.0) {
        -t
    } else {
        t
    }
}

fn conjugators(s: &GroupSlice) -> Vec<Isometry> {
    s.gamma
        .iter()
        .chain(&s.centralizer_witnesses)
        .cloned()
        .collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// `σ⁻¹Tσ = T'` in PSL, decided exactly when all three are exact.
fn certify_conjugate(sigma: &Isometry, t: &Isometry, target: &Isometry) -> bool {
    match (sigma.exact(), t.exact(), target.exact()) {
        (Some(s), Some(x), Some(y)) => s.adj().mul(x).mul(s).proportional(y),
        _ => true,
    }
}

/// Partition the layer into Γ-conjugacy classes certified by explicit
/// conjugators from the slice (Γ and the witnesses), and compute invariants
/// and centralizer data for each class.
pub fn reduce_classes(s: &GroupSlice) -> Result<ClassReduction> {
    let layer = &s.double_coset;
    let mut kinds = Vec::with_capacity(layer.len());
    for t in layer {
        let c = classify(t)?;
        if c.kind == Kind::Parabolic {
            return Err(Error::ParabolicInDoubleCoset);
        }
        kinds.push(c);
    }
    let index = IsometryIndex::new(layer);
    let sigmas = conjugators(s);
    let sigma_inv: Vec<CMat> = sigmas.iter().map(|g| g.matrix().adj()).collect();
    let mut uf = UnionFind((0..layer.len()).collect());
    for (i, t) in layer.iter().enumerate() {
        if kinds[i].kind == Kind::Identity {
            continue;
        }
        for (sigma, inv) in sigmas.iter().zip(&sigma_inv) {
            let m = inv.mul(t.matrix()).mul(sigma.matrix());
            let Some(j) = index.find_approx(&m, DEFAULT_TOL) else {
                continue;
            };
            if uf.find(i) != uf.find(j) && certify_conjugate(sigma, t, &layer[j]) {
                uf.union(i, j);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut identity_members = 0;
    for i in 0..layer.len() {
        if kinds[i].kind == Kind::Identity {
            identity_members += 1;
            continue;
        }
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut classes = Vec::with_capacity(groups.len());
    for members in groups.into_values() {
        let rep_index = *members.iter().min().expect("nonempty");
        let rep = layer[rep_index].clone();
        let c = kinds[rep_index];
        let kind = match c.kind {
            Kind::Elliptic => ClassKind::Elliptic,
            Kind::Loxodromic => ClassKind::Loxodromic,
            _ => unreachable!("identity and parabolic handled above"),
        };
        for &m in &members {
            if kinds[m].kind != c.kind {
                return Err(Error::Invalid(format!(
                    "class of layer element {rep_index} mixes kinds"
                )));
            }
        }
        let tr = canonical_trace(rep.trace());
        classes.push(ClassRecord {
            trace: tr,
            a_of_t: c.a_of_t,
            norm: c.norm,
            trace_gap: (tr * tr - 4.0).norm(),
            invariant: rep.exact().map(|x| x.trace_sq_over_det()).transpose()?,
            centralizer: centralizer_data(s, &rep),
            representative: rep,
            rep_index,
            kind,
            members,
            resolved: true,
        });
    }
    sort_classes(&mut classes);
    let unresolved = flag_unresolved(&mut classes);
    Ok(ClassReduction {
        classes,
        identity_members,
        unresolved,
        radius: s.radius,
    })
}

fn sort_classes(classes: &mut [ClassRecord]) {
    classes.sort_by(|a, b| {
        a.kind
            .cmp(&b.kind)
            .then_with(|| match (a.norm, b.norm) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                _ => b.trace_gap.total_cmp(&a.trace_gap),
            })
            .then_with(|| a.representative.canonical_cmp(&b.representative))
    });
}

fn same_invariant(a: &ClassRecord, b: &ClassRecord) -> bool {
    match (&a.invariant, &b.invariant) {
        (Some(x), Some(y)) => x == y,
        _ => {
            let (x, y) = (a.trace * a.trace, b.trace * b.trace);
            (x - y).norm() <= 1e-9 * (1.0 + x.norm())
        }
    }
}

/// Mark classes sharing their invariant with another class; returns how many.
fn flag_unresolved(classes: &mut [ClassRecord]) -> usize {
    let n = classes.len();
    let mut flagged = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            if classes[i].kind == classes[j].kind && same_invariant(&classes[i], &classes[j]) {
                flagged[i] = true;
                flagged[j] = true;
            }
        }
    }
    for (c, f) in classes.iter_mut().zip(&flagged) {
        c.resolved = !f;
    }
    flagged.iter().filter(|&&f| f).count()
}

/// Sign `ε` with `ab = ε·ba` on the stored representatives, if any.
fn commute_sign(a: &Isometry, b: &Isometry) -> Option<i8> {
    let (p, q) = (a.matrix().mul(b.matrix()), b.matrix().mul(a.matrix()));
    let tol = 1e-7 * (1.0 + libm::sqrt(a.matrix().frob2() * b.matrix().frob2()));
    let approx = if p.max_diff(&q) <= tol {
        1
    } else if p.max_diff(&q.neg()) <= tol {
        -1
    } else {
        return None;
    };
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => {
            let (p, q) = (x.mul(y), y.mul(x));
            if p == q {
                Some(1)
            } else if p == q.scale(&Exact::from_int(-1, &p.a.field)) {
                Some(-1)
            } else {
                None
            }
        }
        _ => Some(approx),
    }
}

fn rotation_angle_mod(g: &Isometry) -> Option<f64> {
    let phi = classify(g).ok()?.rotation_angle()?;
    let two_pi = 2.0 * core::f64::consts::PI;
    let phi = phi - two_pi * libm::floor(phi / two_pi);
    Some(phi.min(two_pi - phi))
}

/// Order of an elliptic element in PSL, by iteration.
pub fn elliptic_order(g: &Isometry) -> Result<u32> {
    let mut acc = g.clone();
    for k in 1..=ELLIPTIC_ORDER_CAP {
        if acc.is_identity(1e-9) {
            return Ok(k);
        }
        acc = acc.mul(g);
    }
    Err(Error::EllipticOrderCap(ELLIPTIC_ORDER_CAP))
}

/// Centralizer structure of `t` from the elements of Γ and the witnesses
/// that commute with it.
pub fn centralizer_data(s: &GroupSlice, t: &Isometry) -> Result<CentralizerData> {
    let cls = classify(t)?;
    if !matches!(cls.kind, Kind::Elliptic | Kind::Loxodromic) {
        return Err(Error::Precondition(
            "centralizer of an elliptic or loxodromic element only".into(),
        ));
    }
    let mut plus: Vec<Isometry> = Vec::new();
    let mut minus: Vec<Isometry> = Vec::new();
    for g in s.gamma.iter().chain(&s.centralizer_witnesses) {
        match commute_sign(g, t) {
            Some(1) => plus.push(g.clone()),
            Some(_) => minus.push(g.clone()),
            None => {}
        }
    }
    let collected = plus.len() + minus.len();
    let mut lox: Vec<(f64, &Isometry)> = Vec::new();
    let mut ell: Vec<(f64, &Isometry)> = Vec::new();
    for g in &plus {
        let c = classify(g)?;
        match c.kind {
            Kind::Loxodromic => lox.push((c.norm.expect("loxodromic norm"), g)),
            Kind::Elliptic => ell.push((rotation_angle_mod(g).unwrap_or(0.0), g)),
            Kind::Identity => {}
            Kind::Parabolic => {
                return Err(Error::Invalid(
                    "parabolic element commutes with the class representative".into(),
                ))
            }
        }
    }
    let (n_t0, t0) = lox
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.canonical_cmp(b.1)))
        .map(|(n, g)| (*n, (*g).clone()))
        .ok_or(Error::RadiusInsufficientForT0)?;
    if n_t0 <= 1.0 + 1e-9 {
        return Err(Error::NormGapViolated);
    }

    let generator = ell
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.canonical_cmp(b.1)))
        .map(|(_, g)| (*g).clone());
    let cyclic_order = match &generator {
        Some(g) => elliptic_order(g)?,
        None => 1,
    };
    let powers: Vec<Isometry> = match &generator {
        Some(g) => (0..cyclic_order as i64).map(|k| g.pow(k)).collect(),
        None => vec![t0.pow(0)],
    };
    let in_powers = |e: &Isometry| e.is_identity(1e-9) || powers.iter().any(|p| p.eq_tol(e, 1e-8));
    for (_, e) in &ell {
        if !in_powers(e) {
            return Err(Error::Invalid(
                "rotations about the axis do not form a cyclic group".into(),
            ));
        }
    }

    let order_two = cls.kind == Kind::Elliptic && t.trace().norm() <= 1e-9;
    let extension = if order_two {
        minus
            .iter()
            .filter(|g| {
                classify(g)
                    .map(|c| c.kind == Kind::Elliptic)
                    .unwrap_or(false)
            })
            .min_by(|a, b| {
                a.displacement_cosh()
                    .total_cmp(&b.displacement_cosh())
                    .then_with(|| a.canonical_cmp(b))
            })
            .cloned()
    } else {
        None
    };
    let structure_case = if extension.is_some() {
        StructureCase::Order2Extension
    } else {
        StructureCase::Cyclic
    };
    let elliptic_order = if extension.is_some() {
        2 * cyclic_order
    } else {
        cyclic_order
    };

    // every commuting element is T0ⁿ·E with E a rotation about the axis
    let (c, _) = conjugate_to_normal_form(t)?;
    let diag_log = |g: &Isometry| -> f64 {
        let m = c.matrix().adj().mul(g.matrix()).mul(c.matrix());
        libm::log(m.a.norm())
    };
    let step = diag_log(&t0);
    for g in &plus {
        let n = libm::round(diag_log(g) / step);
        if (diag_log(g) - n * step).abs() > 1e-6 * (1.0 + n.abs()) {
            return Err(Error::Invalid(
                "centralizer element is not a power of T0 times a rotation".into(),
            ));
        }
        let e = t0.pow(-(n as i64)).mul(g);
        if !in_powers(&e) {
            return Err(Error::Invalid(
                "centralizer element is not a power of T0 times a rotation".into(),
            ));
        }
    }
    for g in &minus {
        if classify(g)?.kind != Kind::Elliptic {
            return Err(Error::Invalid(
                "anticommuting centralizer element is not a half-turn".into(),
            ));
        }
    }
    Ok(CentralizerData {
        t0_primitive: is_primitive(s, &t0),
        t0,
        n_t0,
        elliptic_order,
        elliptic_generator: generator,
        extension,
        structure_case,
        collected,
    })
}

/// True iff no loxodromic `S` among Γ and the witnesses has `Sᵐ = T0` for an
/// integer `m ≥ 2`.
pub fn is_primitive(s: &GroupSlice, t0: &Isometry) -> bool {
    let Ok(c0) = classify(t0) else { return true };
    let Some(n0) = c0.norm else { return true };
    let l0 = libm::log(n0);
    for g in s.gamma.iter().chain(&s.centralizer_witnesses) {
        let Ok(c) = classify(g) else { continue };
        let Some(n) = c.norm else { continue };
        let l = libm::log(n);
        if l <= 1e-12 {
            continue;
        }
        let m = libm::round(l0 / l);
        if m < 2.0 || (m * l - l0).abs() > 1e-8 * (1.0 + l0) {
            continue;
        }
        if g.pow(m as i64).eq_tol(t0, 1e-8) {
            return false;
        }
    }
    true
}

/// Outcome of [`augment_witnesses`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AugmentReport {
    pub conjugators_added: usize,
    pub centralizer_units_added: usize,
    pub rounds: usize,
}

/// Add exact Γ elements beyond the radius to the slice's witness list:
/// conjugators merging classes with a common invariant, and centralizer
/// units (minimal translations, rotations, half-turns) of every class
/// representative. Repeats until the class partition is stable.
pub fn augment_witnesses(
    cfg: &OrderConfig,
    s: &mut GroupSlice,
    max_length: f64,
) -> Result<AugmentReport> {
    if !s.is_exact() {
        return Err(Error::Precondition(
            "witness search needs an exact slice".into(),
        ));
    }
    let mut report = AugmentReport::default();
    let listing = s.gamma_listing();
    let mut known: BTreeMap<ExactMat, ()> = s
        .gamma
        .iter()
        .chain(&s.centralizer_witnesses)
        .filter_map(|g| g.exact_key())
        .map(|k| (k, ()))
        .collect();
    let add = |s: &mut GroupSlice, g: Isometry, known: &mut BTreeMap<ExactMat, ()>| -> bool {
        let key = g.exact_key().expect("exact unit");
        if known.contains_key(&key) || matches!(listing.query(&s.gamma, &g), Membership::Member(_))
        {
            return false;
        }
        known.insert(key, ());
        s.centralizer_witnesses.push(g);
        true
    };
    let mut processed: BTreeMap<ExactMat, ()> = BTreeMap::new();
    loop {
        report.rounds += 1;
        let red = reduce_classes(s)?;
        let mut changed = false;
        for i in 0..red.classes.len() {
            for j in i + 1..red.classes.len() {
                let (a, b) = (&red.classes[i], &red.classes[j]);
                if a.kind != b.kind || !same_invariant(a, b) {
                    continue;
                }
                if let Some(x) =
                    find_conjugator(cfg, &a.representative, &b.representative, max_length)?
                {
                    if add(s, x, &mut known) {
                        report.conjugators_added += 1;
                        changed = true;
                    }
                }
            }
        }
        if changed {
            continue;
        }
        for class in &red.classes {
            let key = class.representative.exact_key().expect("exact");
            if processed.contains_key(&key) {
                continue;
            }
            processed.insert(key, ());
            let units = centralizer_units(cfg, &class.representative, max_length)?;
            let shortest = units
                .lengths
                .iter()
                .copied()
                .filter(|&l| l > 0.0)
                .fold(f64::INFINITY, f64::min);
            for (u, &l) in units.units.iter().zip(&units.lengths) {
                if (l == 0.0 || (l - shortest).abs() < 1e-9) && add(s, u.clone(), &mut known) {
                    report.centralizer_units_added += 1;
                    changed = true;
                }
            }
            for u in &units.anti_units {
                if add(s, u.clone(), &mut known) {
                    report.centralizer_units_added += 1;
                    changed = true;
                }
            }
        }
        if !changed || report.rounds >= 8 {
            break;
        }
    }
    s.centralizer_witnesses.sort_by(|a, b| a.canonical_cmp(b));
    Ok(report)
}

/// Decide the remaining equal-invariant pairs exactly: conjugators of
/// `T₁` into `T₂` form a coset of the centralizer of `T₁`, so a search over
/// a window of skew coordinates at least `log N(T0)` wide is complete. Pairs
/// shown non-conjugate are marked resolved; returns the number of classes
/// still unresolved.
pub fn certify_distinct(cfg: &OrderConfig, red: &mut ClassReduction) -> Result<usize> {
    let n = red.classes.len();
    let mut undecided = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&red.classes[i], &red.classes[j]);
            if a.kind != b.kind || !same_invariant(a, b) {
                continue;
            }
            let window = match &a.centralizer {
                Ok(c) => libm::log(c.n_t0) + 1e-6,
                Err(_) => {
                    undecided[i] = true;
                    undecided[j] = true;
                    continue;
                }
            };
            if find_conjugator(cfg, &a.representative, &b.representative, window)?.is_some() {
                return Err(Error::Invalid(format!(
                    "classes {i} and {j} are conjugate; run the witness search before certifying"
                )));
            }
        }
    }
    for (c, u) in red.classes.iter_mut().zip(&undecided) {
        c.resolved = !u;
    }
    red.unresolved = undecided.iter().filter(|&&u| u).count();
    Ok(red.unresolved)
}
