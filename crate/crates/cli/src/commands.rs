use std::f64::consts::PI;

use hecke_trace_core::conjugacy::{
    augment_witnesses, certify_distinct, reduce_classes, ClassKind, ClassReduction,
};
use hecke_trace_core::correspondence::{check_assumptions, decompose, hecke_apply_to_kernel};
use hecke_trace_core::groupdata::{
    enumerate_order, validate_cocompact_consistency, GroupSlice, Strictness,
};
use hecke_trace_core::huber::{
    compare_spectra, corollary_check, resolvent_sides, CompareMode, SpectrumPackage,
};
use hecke_trace_core::isometry::{delta, PointH3};
use hecke_trace_core::scalars::C64;
use hecke_trace_core::trace::{
    elliptic_number, geometric_side, heat_asymptotic_check, norm_gap, spectral_side,
    GeometricOptions, LengthSpectrum,
};
use hecke_trace_core::transforms::{
    closed_form_pair, fourier_g, ClosedFormPair, GeodesicTestFunction, PointPairFunction,
    SpectralTestFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::*;
use crate::formats::{self, LoadedSlice};
use crate::output::{Cell, Report, Table};
use crate::CliError;

type Res<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn run(cli: Cli) -> Res<Report> {
    match cli.command {
        Command::Transform(a) => transform(&a),
        Command::Factory(a) => factory(&a),
        Command::Decompose(a) => decompose_cmd(&a, cli.seed),
        Command::Classes(a) => classes(&a),
        Command::Trace(a) => trace(&a),
        Command::Heat(a) => heat(&a),
        Command::Resolvent(a) => resolvent(&a),
        Command::Huber(a) => huber(&a),
        Command::Validate(a) => validate(&a),
    }
}

fn closed_pair(p: &PairArgs) -> Res<(ClosedFormPair, SpectralTestFunction, GeodesicTestFunction)> {
    let pair = match p.pair {
        PairName::Heat => {
            if p.s.is_some() || p.b.is_some() {
                return Err(invalid("the heat pair takes --t only"));
            }
            ClosedFormPair::Heat {
                t: p.t.ok_or_else(|| invalid("the heat pair needs --t"))?,
            }
        }
        PairName::Resolvent => {
            if p.t.is_some() {
                return Err(invalid("the resolvent pair takes --s and --B only"));
            }
            ClosedFormPair::Resolvent {
                s: p.s.ok_or_else(|| invalid("the resolvent pair needs --s"))?,
                b: p.b.ok_or_else(|| invalid("the resolvent pair needs --B"))?,
            }
        }
    };
    let (h, g) = closed_form_pair(pair)?;
    Ok((pair, h, g))
}

fn pair_params(r: &mut Report, pair: ClosedFormPair) {
    match pair {
        ClosedFormPair::Heat { t } => {
            r.param("pair", "heat").param("t", t);
        }
        ClosedFormPair::Resolvent { s, b } => {
            r.param("pair", "resolvent").param("s", s).param("B", b);
        }
    }
}

fn transform(a: &TransformArgs) -> Res<Report> {
    let (pair, h, g) = closed_pair(&a.pair)?;
    let mut r = Report::new("transform");
    r.param("radius", "none");
    pair_params(&mut r, pair);
    if a.check {
        r.param("fourier_tail", hecke_trace_core::transforms::FOURIER_TAIL);
    }
    let mut cols = vec!["function", "argument", "re", "im"];
    if a.check {
        cols.extend(["quadrature", "abs_diff"]);
    }
    let mut t = Table::new("values", &cols);
    let xs = if a.x.is_empty() && a.lambda.is_empty() {
        vec![0.0]
    } else {
        a.x.clone()
    };
    for &x in &xs {
        let v = g.eval(x);
        let mut row: Vec<Cell> = vec!["g".into(), x.into(), v.into(), 0.0.into()];
        if a.check {
            let q = fourier_g(&h, x)?;
            row.extend([q.into(), (q - v).abs().into()]);
        }
        t.push(row);
    }
    for &lambda in &a.lambda {
        let v = h.eval(C64::new(lambda, 0.0));
        let mut row: Vec<Cell> = vec!["h".into(), lambda.into(), v.re.into(), v.im.into()];
        if a.check {
            row.extend([Cell::Empty, Cell::Empty]);
        }
        t.push(row);
    }
    r.table(t);
    Ok(r)
}

fn factory(a: &FactoryArgs) -> Res<Report> {
    let file = formats::OrderFile::parse(&formats::read_text(&a.config)?)?;
    let cfg = file.to_config(a.radius)?;
    let out = enumerate_order(&cfg)?;
    let mut slice = out.slice;
    let mut r = Report::new("factory");
    r.param("radius", cfg.norm_one_bound);
    let mut t = Table::new("summary", &["quantity", "value"]);
    t.push(vec!["gamma".into(), slice.gamma.len().into()]);
    t.push(vec!["double_coset".into(), slice.double_coset.len().into()]);
    t.push(vec!["visited".into(), out.visited.into()]);
    if let Some(len) = a.augment {
        r.param("augment", len);
        let rep = augment_witnesses(&cfg, &mut slice, len)?;
        t.push(vec!["augment_rounds".into(), rep.rounds.into()]);
        t.push(vec![
            "conjugators_added".into(),
            rep.conjugators_added.into(),
        ]);
        t.push(vec![
            "centralizer_units_added".into(),
            rep.centralizer_units_added.into(),
        ]);
    }
    t.push(vec![
        "centralizer_witnesses".into(),
        slice.centralizer_witnesses.len().into(),
    ]);
    for w in &out.warnings {
        t.push(vec!["warning".into(), w.as_str().into()]);
    }
    formats::write_text(&a.out, &formats::slice_to_json(&slice, Some(&cfg)))?;
    r.table(t);
    Ok(r)
}

fn random_point(rng: &mut ChaCha8Rng, spread: f64) -> PointH3 {
    let bound = spread.cosh();
    loop {
        let r = rng.gen_range(-spread..=spread).exp();
        let rho = rng.gen_range(0.0..=spread);
        let theta = rng.gen_range(0.0..2.0 * PI);
        let p = PointH3::new(C64::from_polar(rho, theta), r).expect("finite point");
        if delta(&p, &PointH3::j()) <= bound {
            return p;
        }
    }
}

fn decompose_cmd(a: &DecomposeArgs, seed: u64) -> Res<Report> {
    let loaded = formats::load_slice(&a.slice)?;
    let s = &loaded.slice;
    let chi = formats::load_rep(a.rep.as_deref())?;
    let cd = decompose(s, &chi)?;
    let rep = check_assumptions(s, &cd, &chi)?;
    let mut r = Report::new("decompose");
    r.param("radius", s.radius);
    let mut t = Table::new("summary", &["quantity", "value"]);
    t.push(vec!["d".into(), cd.degree.into()]);
    t.push(vec!["layer_cosets".into(), cd.beta.len().into()]);
    t.push(vec!["unclassified".into(), cd.unclassified.into()]);
    t.push(vec!["audited_layer".into(), cd.audited_layer.into()]);
    t.push(vec!["assumption1".into(), rep.assumption1.into()]);
    t.push(vec!["assumption2".into(), rep.assumption2.into()]);
    t.push(vec![
        "alpha_in_inverse_layer".into(),
        rep.alpha_in_inverse_layer.into(),
    ]);
    t.push(vec![
        "layer_inverse_closed".into(),
        rep.layer_inverse_closed.into(),
    ]);
    t.push(vec![
        "chi_alpha_inverse_is_adjoint".into(),
        rep.chi_alpha_inverse_is_adjoint.into(),
    ]);
    t.push(vec![
        "homomorphism_checks".into(),
        rep.homomorphism_checks.into(),
    ]);
    t.push(vec!["extension_checks".into(), rep.extension_checks.into()]);
    t.push(vec![
        "max_multiplicativity_error".into(),
        rep.max_multiplicativity_error.into(),
    ]);
    r.table(t);
    let mut eps = Table::new(
        "epsilon",
        &[
            "i",
            "gamma_index",
            "displacement",
            "coset_size",
            "beta_index",
        ],
    );
    for i in 0..cd.degree {
        eps.push(vec![
            i.into(),
            cd.epsilon_index[i].into(),
            cd.epsilon[i].displacement().into(),
            cd.coset_sizes[i].into(),
            cd.beta_index.get(i).copied().into(),
        ]);
    }
    r.table(eps);
    if a.kernel_pairs > 0 {
        let reach = cd
            .alpha_i
            .iter()
            .map(|x| x.displacement())
            .fold(0.0, f64::max);
        let support = s.radius - 2.0 * a.spread - reach - 0.05;
        if support <= 0.0 {
            return Err(invalid(
                "the slice radius leaves no room for a kernel of positive support",
            ));
        }
        let k = PointPairFunction::bump(support.cosh())?;
        r.param("seed", seed as usize)
            .param("kernel_support_cosh", support.cosh())
            .param("kernel_tol", 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut kt = Table::new(
            "kernel",
            &["pair", "terms", "direct_re", "via_operator_re", "max_diff"],
        );
        for i in 0..a.kernel_pairs {
            let p = random_point(&mut rng, a.spread);
            let q = random_point(&mut rng, a.spread);
            let v = hecke_apply_to_kernel(s, &cd, &chi, &k, &p, &q)?;
            kt.push(vec![
                i.into(),
                v.terms.into(),
                v.direct.trace().re.into(),
                v.via_operator.trace().re.into(),
                v.max_diff.into(),
            ]);
        }
        r.table(kt);
    }
    Ok(r)
}

/// Reduce the layer to classes, deciding equal-invariant pairs exactly when
/// the slice records its order.
pub fn reduce(loaded: &LoadedSlice) -> Res<ClassReduction> {
    let mut red = reduce_classes(&loaded.slice)?;
    if let Some(cfg) = &loaded.order {
        if red.unresolved > 0 {
            certify_distinct(cfg, &mut red)?;
        }
    }
    Ok(red)
}

fn classes(a: &ClassesArgs) -> Res<Report> {
    let loaded = formats::load_slice(&a.slice)?;
    let red = reduce(&loaded)?;
    let mut r = Report::new("classes");
    r.param("radius", red.radius)
        .param("classes", red.classes.len())
        .param(
            "unresolved",
            red.classes.iter().filter(|c| !c.resolved).count(),
        );
    let mut t = Table::new(
        "classes",
        &[
            "index",
            "kind",
            "trace_re",
            "trace_im",
            "norm",
            "a_re",
            "a_im",
            "norm_t0",
            "m",
            "members_found",
            "resolved",
            "centralizer",
        ],
    );
    for (i, c) in red.classes.iter().enumerate() {
        let (n0, m, status) = match &c.centralizer {
            Ok(z) => (
                Some(z.n_t0),
                Some(z.elliptic_order),
                z.structure_case.as_str().to_string(),
            ),
            Err(e) => (None, None, format!("error: {e}")),
        };
        t.push(vec![
            i.into(),
            c.kind.as_str().into(),
            c.trace.re.into(),
            c.trace.im.into(),
            c.norm.into(),
            c.a_of_t.map(|a| a.re).into(),
            c.a_of_t.map(|a| a.im).into(),
            n0.into(),
            m.into(),
            c.members_found().into(),
            c.resolved.into(),
            status.into(),
        ]);
    }
    r.table(t);
    if let Some(out) = &a.package_out {
        let spectrum = a
            .spectral
            .as_deref()
            .map(|p| formats::parse_spectral_csv(&formats::read_text(p)?))
            .transpose()?;
        let lengths = LengthSpectrum::from_classes(&red.classes)?;
        let e = elliptic_number(&red.classes)?;
        let p = SpectrumPackage::new(a.label.clone(), spectrum, Some(lengths), Some(e))?;
        formats::write_text(out, &formats::package_to_json(&p))?;
        r.param("package", out.display().to_string());
    }
    Ok(r)
}

fn trace(a: &TraceArgs) -> Res<Report> {
    let (pair, h, g) = closed_pair(&a.pair)?;
    let loaded = formats::load_slice(&a.slice)?;
    let s = &loaded.slice;
    let red = reduce(&loaded)?;
    let chi = formats::load_rep(a.rep.as_deref())?;
    let cd = if a.rep.is_some() {
        Some(decompose(s, &chi)?)
    } else {
        None
    };
    let opts = GeometricOptions {
        covering_radius: a.covering_radius,
    };
    let side = geometric_side(s, cd.as_ref(), &red.classes, &g, &chi, &opts)?;
    let mut r = Report::new("trace");
    r.param("radius", side.truncation_radius);
    pair_params(&mut r, pair);
    r.param("complete_below", side.tail.complete_below)
        .param("tail_estimate", side.tail.value);
    let mut t = Table::new(
        "classes",
        &["index", "kind", "length", "term_re", "term_im"],
    );
    let mut rows: Vec<(usize, C64)> = side
        .elliptic_terms
        .iter()
        .chain(&side.loxodromic_terms)
        .copied()
        .collect();
    rows.sort_by_key(|x| x.0);
    for (i, v) in rows {
        let c = &red.classes[i];
        t.push(vec![
            i.into(),
            c.kind.as_str().into(),
            c.length().into(),
            v.re.into(),
            v.im.into(),
        ]);
    }
    r.table(t);
    let mut tot = Table::new("totals", &["quantity", "re", "im"]);
    tot.push(vec![
        "elliptic".into(),
        side.elliptic_total.re.into(),
        side.elliptic_total.im.into(),
    ]);
    tot.push(vec![
        "loxodromic".into(),
        side.loxodromic_total.re.into(),
        side.loxodromic_total.im.into(),
    ]);
    tot.push(vec![
        "total".into(),
        side.total.re.into(),
        side.total.im.into(),
    ]);
    tot.push(vec![
        "elliptic_number".into(),
        side.elliptic_number.into(),
        0.0.into(),
    ]);
    if let Some(p) = &a.spectral {
        let sd = formats::parse_spectral_csv(&formats::read_text(p)?)?;
        let spec = spectral_side(&sd, &h);
        tot.push(vec!["spectral".into(), spec.re.into(), spec.im.into()]);
        let d = spec - side.total;
        tot.push(vec![
            "spectral_minus_geometric".into(),
            d.re.into(),
            d.im.into(),
        ]);
    }
    r.table(tot);
    Ok(r)
}

fn heat(a: &HeatArgs) -> Res<Report> {
    let loaded = formats::load_slice(&a.slice)?;
    let red = reduce(&loaded)?;
    if let Some((i, c)) = red.classes.iter().enumerate().find(|(_, c)| !c.resolved) {
        return Err(invalid(format!(
            "class {i} of kind {} is unresolved",
            c.kind.as_str()
        )));
    }
    let e = elliptic_number(&red.classes)?;
    let claimed = a.claimed_e.unwrap_or(e);
    let rep = heat_asymptotic_check(&red.classes, claimed, &a.tgrid)?;
    let has_lox = red.classes.iter().any(|c| c.kind == ClassKind::Loxodromic);
    let c0 = if has_lox {
        Some(norm_gap(&red.classes)?)
    } else {
        None
    };
    let mut r = Report::new("heat");
    r.param("radius", red.radius)
        .param("growth_slope", hecke_trace_core::trace::GROWTH_SLOPE);
    let mut t = Table::new("rows", &["t", "heat", "leading", "remainder", "ratio"]);
    for row in &rep.rows {
        t.push(vec![
            row.t.into(),
            row.heat.into(),
            row.leading.into(),
            row.remainder.into(),
            row.ratio.into(),
        ]);
    }
    r.table(t);
    let mut s = Table::new("summary", &["quantity", "value"]);
    s.push(vec!["elliptic_number".into(), e.into()]);
    s.push(vec!["claimed_elliptic_number".into(), claimed.into()]);
    s.push(vec!["slope".into(), rep.slope.into()]);
    s.push(vec!["max_ratio".into(), rep.max_ratio.into()]);
    s.push(vec!["bounded".into(), rep.bounded.into()]);
    s.push(vec!["norm_gap".into(), c0.into()]);
    r.table(s);
    Ok(r)
}

/// Parses `x`, `x+yi` or `x-yi`.
pub fn parse_complex(s: &str) -> Res<C64> {
    let bad = || invalid(format!("bad complex number '{s}'"));
    let t = s.trim().replace(' ', "");
    if let Ok(x) = t.parse::<f64>() {
        return Ok(C64::new(x, 0.0));
    }
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with(['e', 'E']))
        .map(|(i, _)| i)
        .last();
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "+" | "" => "1",
        "-" => "-1",
        x => x,
    };
    Ok(C64::new(
        re.parse().map_err(|_| bad())?,
        im.trim_start_matches('+').parse().map_err(|_| bad())?,
    ))
}

fn resolvent(a: &ResolventArgs) -> Res<Report> {
    let p = formats::load_package(&a.package)?;
    let (s, b) = (parse_complex(&a.s)?, parse_complex(&a.b)?);
    let sides = resolvent_sides(&p, s, b)?;
    let res = sides.residual();
    let mut r = Report::new("resolvent");
    r.param("radius", "none")
        .param("label", p.label.as_str())
        .param("s", a.s.as_str())
        .param("B", a.b.as_str());
    let mut t = Table::new("resolvent", &["quantity", "re", "im"]);
    for (name, v) in [
        ("lengths", sides.lengths),
        ("spectral", sides.spectral),
        ("elliptic", sides.elliptic),
        ("residual", res),
    ] {
        t.push(vec![name.into(), v.re.into(), v.im.into()]);
    }
    r.table(t);
    Ok(r)
}

fn huber(a: &HuberArgs) -> Res<Report> {
    let left = formats::load_package(&a.left)?;
    let right = formats::load_package(&a.right)?;
    let mut r = Report::new("huber");
    r.param("radius", "none")
        .param("match_tol", hecke_trace_core::huber::MATCH_TOL);
    let mut t = Table::new("report", &["quantity", "value"]);
    match a.mode {
        HuberMode::Corollary => {
            r.param("mode", "corollary");
            let c = corollary_check(&left, &right)?;
            t.push(vec!["outcome".into(), c.outcome.describe().into()]);
            t.push(vec!["differing".into(), c.differing.len().into()]);
            t.push(vec!["contradiction".into(), c.contradiction.into()]);
            for i in &c.differing {
                t.push(vec![
                    "differs_at_lambda".into(),
                    left.spectrum.as_ref().expect("checked").entries()[*i]
                        .lambda
                        .into(),
                ]);
            }
        }
        HuberMode::S | HuberMode::L => {
            let mode = if a.mode == HuberMode::S {
                CompareMode::Eigenvalues
            } else {
                CompareMode::Lengths
            };
            r.param("mode", mode.as_str());
            let c = compare_spectra(&left, &right, mode)?;
            t.push(vec!["left".into(), c.left_label.as_str().into()]);
            t.push(vec!["right".into(), c.right_label.as_str().into()]);
            t.push(vec!["outcome".into(), c.outcome.describe().into()]);
            t.push(vec!["only_left".into(), c.only_left.len().into()]);
            t.push(vec!["only_right".into(), c.only_right.len().into()]);
            t.push(vec!["contradiction".into(), c.contradiction.into()]);
            t.push(vec!["left_elliptic_number".into(), c.left_elliptic.into()]);
            t.push(vec![
                "right_elliptic_number".into(),
                c.right_elliptic.into(),
            ]);
            t.push(vec!["elliptic_equal".into(), c.elliptic_equal.into()]);
        }
    }
    r.table(t);
    Ok(r)
}

fn validate(a: &ValidateArgs) -> Res<Report> {
    let text = formats::read_text(&a.slice)?;
    let loaded = formats::parse_slice(&text, Strictness::Strict)?;
    let s: &GroupSlice = &loaded.slice;
    let rep = validate_cocompact_consistency(s);
    if let Some((list, i)) = rep.parabolics.first() {
        return Err(invalid(format!(
            "parabolic element at {list}:{i}, dataset invalid"
        )));
    }
    if let Some((list, i)) = rep.unstable.first() {
        return Err(CliError::Numerical(format!(
            "classification unstable at {list}:{i}"
        )));
    }
    let mut r = Report::new("validate");
    r.param("radius", s.radius);
    let mut t = Table::new(
        "counts",
        &["list", "identity", "elliptic", "parabolic", "loxodromic"],
    );
    for (name, c) in [
        ("gamma", rep.gamma_counts),
        ("double_coset", rep.layer_counts),
    ] {
        t.push(vec![
            name.into(),
            c[0].into(),
            c[1].into(),
            c[2].into(),
            c[3].into(),
        ]);
    }
    r.table(t);
    let mut m = Table::new("summary", &["quantity", "value"]);
    m.push(vec![
        "centralizer_witnesses".into(),
        s.centralizer_witnesses.len().into(),
    ]);
    m.push(vec!["min_displacement".into(), rep.min_displacement.into()]);
    m.push(vec!["order_recorded".into(), loaded.order.is_some().into()]);
    m.push(vec!["provenance".into(), s.provenance.as_str().into()]);
    r.table(m);
    Ok(r)
}
