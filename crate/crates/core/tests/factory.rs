use hecke_trace_core::groupdata::{
    centralizer_units, enumerate_order, reference_order, validate_cocompact_consistency,
};
use hecke_trace_core::isometry::{classify, CMat, ExactMat, Isometry, Kind};
use hecke_trace_core::scalars::{Exact, C64};

fn gram(gens: &[CMat]) -> Vec<Vec<f64>> {
    gens.iter()
        .map(|a| {
            gens.iter()
                .map(|b| {
                    a.entries()
                        .iter()
                        .zip(b.entries().iter())
                        .map(|(x, y)| (x.conj() * y).re)
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn inverse(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))
            .unwrap();
        a.swap(c, p);
        let d = a[c][c];
        a[c].iter_mut().for_each(|v| *v /= d);
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                let pivot = a[c].clone();
                a[r].iter_mut().zip(&pivot).for_each(|(v, w)| *v -= f * w);
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Every determinant-`target` combination inside the coordinate box that
/// contains the Frobenius ellipsoid, found by exhaustive search.
fn cube_search(gens: &[ExactMat], target: &Exact, cosh_r: f64) -> Vec<ExactMat> {
    let approx: Vec<CMat> = gens.iter().map(|g| g.to_cmat()).collect();
    let ginv = inverse(&gram(&approx));
    let bound = 2.0 * cosh_r * target.to_complex().norm();
    let widths: Vec<i64> = (0..gens.len())
        .map(|i| (bound * ginv[i][i]).sqrt().floor() as i64)
        .collect();
    let total: i64 = widths.iter().map(|w| 2 * w + 1).product();
    assert!(total < 20_000_000, "box too large: {total}");
    let field = target.field.clone();
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let mut x = Vec::with_capacity(gens.len());
        for w in &widths {
            x.push(rest % (2 * w + 1) - w);
            rest /= 2 * w + 1;
        }
        let mut m = CMat::new(
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        );
        for (g, &c) in approx.iter().zip(&x) {
            let c = c as f64;
            m.a += g.a * c;
            m.b += g.b * c;
            m.c += g.c * c;
            m.d += g.d * c;
        }
        if (m.det() - target.to_complex()).norm() > 1e-6 * (1.0 + m.frob2()) {
            continue;
        }
        let mut e = ExactMat::identity(&field).scale(&Exact::zero(&field));
        for (g, &c) in gens.iter().zip(&x) {
            e = e.add(&g.scale(&Exact::from_int(c, &field)));
        }
        if &e.det() != target {
            continue;
        }
        let iso = Isometry::from_exact(e.clone()).unwrap();
        if iso.displacement_cosh() <= cosh_r * (1.0 + 1e-12) {
            out.push(e.normalized().unwrap());
        }
    }
    out.sort();
    out.dedup();
    out
}

fn keys(list: &[Isometry]) -> Vec<ExactMat> {
    let mut k: Vec<ExactMat> = list
        .iter()
        .map(|g| g.exact().unwrap().normalized().unwrap())
        .collect();
    k.sort();
    k
}

#[test]
fn enumeration_agrees_with_exhaustive_box() {
    let cfg = reference_order(1.2, (1, 1));
    let out = enumerate_order(&cfg).unwrap();
    let cosh_r = cfg.norm_one_bound.cosh();
    let gens = cfg.generators();
    let one = Exact::one(&cfg.field);
    assert!(out.slice.gamma.len() > 1);
    assert_eq!(keys(&out.slice.gamma), cube_search(&gens, &one, cosh_r));
    assert_eq!(
        keys(&out.slice.double_coset),
        cube_search(&gens, &cfg.hecke_norm, cosh_r)
    );
}

#[test]
fn slices_grow_with_radius() {
    let small = enumerate_order(&reference_order(2.0, (1, 1)))
        .unwrap()
        .slice;
    let large = enumerate_order(&reference_order(2.8, (1, 1)))
        .unwrap()
        .slice;
    assert!(large.gamma.len() > small.gamma.len());
    let big = keys(&large.gamma);
    for k in keys(&small.gamma) {
        assert!(big.binary_search(&k).is_ok());
    }
}

#[test]
fn reference_group_is_torsion_free_and_cocompact_at_norm_one_plus_i() {
    let slice = enumerate_order(&reference_order(3.0, (1, 1)))
        .unwrap()
        .slice;
    let report = validate_cocompact_consistency(&slice);
    assert!(report.ok());
    assert!(report.parabolics.is_empty());
    for t in &slice.double_coset {
        assert_eq!(classify(t).unwrap().kind, Kind::Loxodromic);
    }
    // shortest nontrivial displacement, cosh⁻¹ of the minimal Frobenius value
    assert!((report.min_displacement.unwrap() - 1.163_9).abs() < 5e-4);
}

#[test]
fn centralizer_search_contains_commuting_slice_elements() {
    let cfg = reference_order(3.0, (1, 1));
    let slice = enumerate_order(&cfg).unwrap().slice;
    for t in slice.double_coset.iter().take(6) {
        let search = centralizer_units(&cfg, t, 12.0).unwrap();
        for (u, len) in search.units.iter().zip(&search.lengths) {
            assert!(u.exact().unwrap().det().is_one());
            assert!(u.commutes(t, 1e-9));
            assert!(
                (classify(u).ok().and_then(|c| c.norm).map_or(0.0, f64::ln) - len).abs() < 1e-8
                    || *len == 0.0
            );
        }
        for g in slice.gamma.iter().filter(|g| g.commutes(t, 1e-9)) {
            assert!(search
                .units
                .iter()
                .any(|u| u.eq_tol(g, 1e-9) || u.eq_tol(&g.inverse(), 1e-9)));
        }
        assert!(search.units.iter().any(|u| !u.is_identity(1e-9)));
    }
}

#[test]
fn counts_match_independent_enumeration() {
    let out = enumerate_order(&reference_order(4.0, (1, 1))).unwrap();
    assert_eq!(out.slice.gamma.len(), 957);
    assert_eq!(out.slice.double_coset.len(), 2844);
}
