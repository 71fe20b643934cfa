use std::collections::BTreeSet;

use hecke_trace_core::conjugacy::{
    augment_witnesses, centralizer_data, certify_distinct, is_primitive, reduce_classes, ClassKind,
    StructureCase,
};
use hecke_trace_core::groupdata::{enumerate_order, reference_order, GroupSlice, SliceField};
use hecke_trace_core::isometry::{CMat, Isometry, IsometryIndex};
use hecke_trace_core::scalars::C64;
use hecke_trace_core::Error;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn iso(a: C64, b: C64, cc: C64, d: C64) -> Isometry {
    Isometry::from_complex(CMat::new(a, b, cc, d)).unwrap()
}

fn approx_slice(gamma: Vec<Isometry>, layer: Vec<Isometry>) -> GroupSlice {
    GroupSlice {
        field: SliceField::Approx,
        radius: 10.0,
        alpha: iso(c(3.0), c(1.0), c(2.0), c(1.0)),
        gamma,
        double_coset: layer,
        hecke_norm: None,
        centralizer_witnesses: Vec::new(),
        provenance: "test".into(),
    }
}

fn translation() -> Isometry {
    Isometry::diag(c(2.0)).unwrap()
}

fn half_turn() -> Isometry {
    Isometry::diag(C64::new(0.0, 1.0)).unwrap()
}

fn flip() -> Isometry {
    iso(c(0.0), c(1.0), c(-1.0), c(0.0))
}

/// `Dᵏ Eᵉ Sᶠ` for the translation `D`, the half-turn `E` about its axis and
/// the axis-reversing half-turn `S`.
fn axis_group(k_max: i64) -> Vec<Isometry> {
    let mut out: Vec<Isometry> = Vec::new();
    for k in -k_max..=k_max {
        for e in 0..2 {
            for f in 0..2 {
                let g = translation()
                    .pow(k)
                    .mul(&half_turn().pow(e))
                    .mul(&flip().pow(f));
                if !out.iter().any(|h| h.eq_tol(&g, 1e-12)) {
                    out.push(g);
                }
            }
        }
    }
    out
}

fn partition(members: impl Iterator<Item = Vec<usize>>) -> BTreeSet<Vec<usize>> {
    members
        .map(|mut m| {
            m.sort();
            m
        })
        .collect()
}

#[test]
fn planted_conjugate_pair_is_merged() {
    let t = iso(c(2.0), c(1.0), c(1.0), c(1.0));
    let other = iso(c(3.0), c(1.0), c(2.0), c(1.0));
    let gamma = vec![Isometry::identity(), flip()];
    let layer = vec![t.clone(), flip().conjugate(&t), other];
    let red = reduce_classes(&approx_slice(gamma, layer)).unwrap();
    assert_eq!(
        partition(red.classes.iter().map(|c| c.members.clone())),
        BTreeSet::from([vec![0, 1], vec![2]])
    );
    for class in &red.classes {
        assert_eq!(class.kind, ClassKind::Loxodromic);
        assert!(class.resolved);
    }
}

#[test]
fn planted_parabolic_is_rejected() {
    let layer = vec![
        iso(c(2.0), c(1.0), c(1.0), c(1.0)),
        iso(c(1.0), c(1.0), c(0.0), c(1.0)),
    ];
    let err = reduce_classes(&approx_slice(vec![Isometry::identity()], layer)).unwrap_err();
    assert_eq!(err, Error::ParabolicInDoubleCoset);
}

#[test]
fn loxodromic_centralizer_with_rotation() {
    let t = Isometry::diag(c(4.0)).unwrap();
    let s = approx_slice(axis_group(3), vec![t.clone()]);
    let data = centralizer_data(&s, &t).unwrap();
    assert!((data.n_t0 - 4.0).abs() < 1e-12);
    assert_eq!(data.elliptic_order, 2);
    assert_eq!(data.structure_case, StructureCase::Cyclic);
    assert!(data.extension.is_none());
    assert!(data.t0_primitive);
    // commuting elements are Dᵏ and DᵏE
    assert_eq!(data.collected, 2 * 7);
}

#[test]
fn order_two_rotation_has_extension() {
    let e = half_turn();
    let s = approx_slice(axis_group(2), vec![e.clone()]);
    let data = centralizer_data(&s, &e).unwrap();
    assert_eq!(data.structure_case, StructureCase::Order2Extension);
    assert_eq!(data.elliptic_order, 4);
    assert!((data.n_t0 - 4.0).abs() < 1e-12);
    let ext = data.extension.unwrap();
    let (p, q) = (ext.matrix().mul(e.matrix()), e.matrix().mul(ext.matrix()));
    assert!(p.max_diff(&q.neg()) < 1e-12);
}

#[test]
fn rotation_of_order_three_is_cyclic() {
    let w = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
    let r = Isometry::diag(w).unwrap();
    let mut gamma = Vec::new();
    for k in -2..=2 {
        for e in 0..3 {
            gamma.push(translation().pow(k).mul(&r.pow(e)));
        }
    }
    let s = approx_slice(gamma, vec![r.clone()]);
    let data = centralizer_data(&s, &r).unwrap();
    assert_eq!(data.elliptic_order, 3);
    assert_eq!(data.structure_case, StructureCase::Cyclic);
}

#[test]
fn missing_translation_is_reported() {
    let t = Isometry::diag(c(4.0)).unwrap();
    let s = approx_slice(vec![Isometry::identity(), half_turn()], vec![t.clone()]);
    assert_eq!(
        centralizer_data(&s, &t).unwrap_err(),
        Error::RadiusInsufficientForT0
    );
}

#[test]
fn primitivity() {
    let s = approx_slice(axis_group(3), vec![]);
    assert!(is_primitive(&s, &translation()));
    assert!(!is_primitive(&s, &translation().pow(2)));
    assert!(!is_primitive(&s, &translation().pow(3)));
    assert!(is_primitive(&s, &Isometry::diag(c(3.0)).unwrap()));
}

/// Connected components of "σ⁻¹Tᵢσ = Tⱼ for some listed σ", every pair tried.
fn brute_force_classes(s: &GroupSlice) -> BTreeSet<Vec<usize>> {
    let layer = &s.double_coset;
    let sigmas: Vec<&Isometry> = s.gamma.iter().chain(&s.centralizer_witnesses).collect();
    let n = layer.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            let hit = sigmas.iter().any(|g| {
                let m = g.matrix().adj().mul(layer[i].matrix()).mul(g.matrix());
                m.proj_diff(layer[j].matrix()) < 1e-6 && {
                    let (x, y, z) = (
                        g.exact().unwrap(),
                        layer[i].exact().unwrap(),
                        layer[j].exact().unwrap(),
                    );
                    x.adj().mul(y).mul(x).proportional(z)
                }
            });
            if hit {
                adj[i].push(j);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = BTreeSet::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort();
        out.insert(comp);
    }
    out
}

#[test]
fn reduction_matches_all_pairs_oracle() {
    let cfg = reference_order(2.5, (1, 1));
    let mut s = enumerate_order(&cfg).unwrap().slice;
    let red = reduce_classes(&s).unwrap();
    assert_eq!(
        partition(red.classes.iter().map(|c| c.members.clone())),
        brute_force_classes(&s)
    );
    assert_eq!(red.identity_members, 0);

    let report = augment_witnesses(&cfg, &mut s, 30.0).unwrap();
    assert!(report.rounds >= 1);
    let mut red = reduce_classes(&s).unwrap();
    assert_eq!(
        partition(red.classes.iter().map(|c| c.members.clone())),
        brute_force_classes(&s)
    );
    for class in &red.classes {
        let z = class.centralizer.as_ref().unwrap();
        assert!(z.n_t0 > 1.0);
        assert!(z.t0_primitive);
        // T0 commutes with the representative and is a certified group element
        assert!(z.t0.commutes(&class.representative, 0.0));
        assert!(z.t0.exact().unwrap().det().is_one());
    }
    // pairs with equal invariants are shown non-conjugate
    assert_eq!(certify_distinct(&cfg, &mut red).unwrap(), 0);
    assert!(red.classes.iter().all(|c| c.resolved));
}

#[test]
fn members_are_pairwise_distinct_and_cover_the_layer() {
    let cfg = reference_order(2.5, (1, 1));
    let s = enumerate_order(&cfg).unwrap().slice;
    let red = reduce_classes(&s).unwrap();
    let mut all: Vec<usize> = red.classes.iter().flat_map(|c| c.members.clone()).collect();
    all.sort();
    assert_eq!(all, (0..s.double_coset.len()).collect::<Vec<_>>());
    let index = IsometryIndex::new(&s.double_coset);
    for class in &red.classes {
        assert_eq!(
            index.find(&s.double_coset, &class.representative, 1e-9),
            Some(class.rep_index)
        );
        let len = class.length().unwrap();
        for &m in &class.members {
            let n = hecke_trace_core::isometry::classify(&s.double_coset[m])
                .unwrap()
                .norm
                .unwrap();
            assert!((n.ln() - len).abs() < 1e-9);
        }
    }
}
