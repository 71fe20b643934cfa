//! JSON and CSV file formats.
//!
//! Scalars are written as `{"a": "p/q", "b": "p/q", "m": n}` for an element
//! `a + b√−m` of the base field, as `{"x": …, "y": …}` for `x + y√θ` in a
//! quadratic extension of it, and as `[re, im]` when approximate. A matrix is
//! `{"a": …, "b": …, "c": …, "d": …}`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use hecke_trace_core::correspondence::{ElementRef, Letter, UnitaryRep};
use hecke_trace_core::groupdata::{
    Coefficients, GroupSlice, OrderConfig, RawMatrix, RawSlice, SliceField, Strictness,
};
use hecke_trace_core::huber::SpectrumPackage;
use hecke_trace_core::isometry::{CMat, ExactMat, Isometry};
use hecke_trace_core::linalg::CMatrix;
use hecke_trace_core::scalars::{Exact, FieldSpec, QuadExact, C64};
use hecke_trace_core::trace::{
    LengthEntry, LengthSpectrum, SpectralConvention, SpectralData, SpectralEntry,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

pub const SLICE_VERSION: u32 = 1;

type Res<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn read_text(path: &Path) -> Res<String> {
    std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Res<()> {
    std::fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Res<T> {
    serde_json::from_str(text).map_err(|e| invalid(format!("{what}: {e}")))
}

// ---------------------------------------------------------------- scalars

fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(v: &Value) -> Res<BigRational> {
    let bad = || invalid(format!("bad rational {v}"));
    match v {
        Value::String(s) => {
            let (p, q) = match s.split_once('/') {
                Some((p, q)) => (p.trim(), q.trim()),
                None => (s.trim(), "1"),
            };
            let p: BigInt = p.parse().map_err(|_| bad())?;
            let q: BigInt = q.parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        Value::Number(n) => n
            .as_i64()
            .map(|i| BigRational::from_integer(i.into()))
            .ok_or_else(bad),
        _ => Err(bad()),
    }
}

pub fn quad_to_json(q: &QuadExact) -> Value {
    json!({"a": rational_to_string(&q.a), "b": rational_to_string(&q.b), "m": q.m})
}

fn object<'a>(v: &'a Value, keys: &[&str], what: &str) -> Res<&'a serde_json::Map<String, Value>> {
    let obj = v
        .as_object()
        .ok_or_else(|| invalid(format!("{what}: expected an object")))?;
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(invalid(format!("{what}: unknown field '{k}'")));
        }
    }
    Ok(obj)
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str, what: &str) -> Res<&'a Value> {
    obj.get(key)
        .ok_or_else(|| invalid(format!("{what}: missing field '{key}'")))
}

pub fn quad_from_json(v: &Value) -> Res<QuadExact> {
    let obj = object(v, &["a", "b", "m"], "scalar")?;
    let m = field(obj, "m", "scalar")?
        .as_u64()
        .ok_or_else(|| invalid("scalar: m must be a positive integer"))?;
    QuadExact::new(
        parse_rational(field(obj, "a", "scalar")?)?,
        parse_rational(field(obj, "b", "scalar")?)?,
        m,
    )
    .map_err(CliError::from)
}

pub fn exact_to_json(e: &Exact) -> Value {
    match e.field.theta {
        None => quad_to_json(&e.x),
        Some(_) => json!({"x": quad_to_json(&e.x), "y": quad_to_json(&e.y)}),
    }
}

pub fn exact_from_json(v: &Value, f: &Arc<FieldSpec>) -> Res<Exact> {
    if v.get("x").is_some() {
        let obj = object(v, &["x", "y"], "scalar")?;
        let x = quad_from_json(field(obj, "x", "scalar")?)?;
        let y = quad_from_json(field(obj, "y", "scalar")?)?;
        Exact::new(x, y, f).map_err(CliError::from)
    } else {
        Exact::from_base(quad_from_json(v)?, f).map_err(CliError::from)
    }
}

pub fn complex_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value) -> Res<C64> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(invalid(format!("bad complex number {v}"))),
        },
        _ => Err(invalid(format!("bad complex number {v}"))),
    }
}

// ---------------------------------------------------------------- matrices

pub fn raw_matrix_to_json(m: &RawMatrix) -> Value {
    match m {
        RawMatrix::Exact(x) => {
            let [a, b, c, d] = x.entries();
            json!({"a": exact_to_json(a), "b": exact_to_json(b), "c": exact_to_json(c), "d": exact_to_json(d)})
        }
        RawMatrix::Approx(m) => {
            let [a, b, c, d] = m.entries();
            json!({"a": complex_to_json(a), "b": complex_to_json(b), "c": complex_to_json(c), "d": complex_to_json(d)})
        }
    }
}

pub fn isometry_to_json(g: &Isometry) -> Value {
    raw_matrix_to_json(&RawMatrix::from_isometry(g))
}

pub fn raw_matrix_from_json(v: &Value, f: &SliceField) -> Res<RawMatrix> {
    let obj = object(v, &["a", "b", "c", "d"], "matrix")?;
    let get = |k: &str| field(obj, k, "matrix");
    match f {
        SliceField::Exact(f) => {
            let e = |k: &str| exact_from_json(get(k)?, f);
            Ok(RawMatrix::Exact(ExactMat::new(
                e("a")?,
                e("b")?,
                e("c")?,
                e("d")?,
            )?))
        }
        SliceField::Approx => {
            let e = |k: &str| complex_from_json(get(k)?);
            Ok(RawMatrix::Approx(CMat::new(
                e("a")?,
                e("b")?,
                e("c")?,
                e("d")?,
            )))
        }
    }
}

// ---------------------------------------------------------------- order configs

/// Order description: either a named preset or an explicit basis.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OrderFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_theta: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<String>,
    /// `[a, b]` for `a + b·√−m` with a preset, a scalar otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hecke_norm: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

fn field_spec(m: u64, theta: Option<&Value>) -> Res<Arc<FieldSpec>> {
    match theta {
        None | Some(Value::Null) => Ok(FieldSpec::base(m)),
        Some(t) => {
            let t = quad_from_json(t)?;
            if t.m != m {
                return Err(invalid("field_theta must lie in the base field"));
            }
            Ok(FieldSpec::extension(t))
        }
    }
}

fn int_pair(v: &Value) -> Res<(i64, i64)> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([a, b]) => match (a.as_i64(), b.as_i64()) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(invalid("hecke_norm must be [a, b] with integers")),
        },
        _ => Err(invalid("hecke_norm must be [a, b] with integers")),
    }
}

impl OrderFile {
    pub fn parse(text: &str) -> Res<OrderFile> {
        parse_json(text, "order config")
    }

    /// Builds the order; `radius` overrides the value in the file.
    pub fn to_config(&self, radius: Option<f64>) -> Res<OrderConfig> {
        let radius = radius
            .or(self.radius)
            .ok_or_else(|| invalid("order config: no radius given"))?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("radius must be positive"));
        }
        if let Some(p) = &self.preset {
            if self.basis.is_some()
                || self.field_m.is_some()
                || self.field_theta.is_some()
                || self.coefficients.is_some()
            {
                return Err(invalid(
                    "order config: a preset takes only hecke_norm and radius",
                ));
            }
            return match p.as_str() {
                "reference" => {
                    let nu = self
                        .hecke_norm
                        .as_ref()
                        .map(int_pair)
                        .transpose()?
                        .unwrap_or((1, 1));
                    Ok(hecke_trace_core::groupdata::reference_order(radius, nu))
                }
                "split" => {
                    if self.hecke_norm.is_some() {
                        return Err(invalid("order config: the split preset has no hecke_norm"));
                    }
                    Ok(hecke_trace_core::groupdata::split_order(radius))
                }
                other => Err(invalid(format!("unknown order preset '{other}'"))),
            };
        }
        let m = self
            .field_m
            .ok_or_else(|| invalid("order config: missing field_m"))?;
        let f = field_spec(m, self.field_theta.as_ref())?;
        let basis = self
            .basis
            .as_ref()
            .ok_or_else(|| invalid("order config: missing basis"))?;
        if basis.len() != 4 {
            return Err(invalid("order config: basis needs four matrices"));
        }
        let sf = SliceField::Exact(f.clone());
        let mats = basis
            .iter()
            .map(|v| match raw_matrix_from_json(v, &sf)? {
                RawMatrix::Exact(x) => Ok(x),
                RawMatrix::Approx(_) => unreachable!("exact field"),
            })
            .collect::<Res<Vec<_>>>()?;
        let coefficients = match self.coefficients.as_deref().unwrap_or("integers") {
            "integers" => Coefficients::Integers,
            "field_integers" => Coefficients::FieldIntegers,
            other => return Err(invalid(format!("unknown coefficient ring '{other}'"))),
        };
        let hecke_norm = match &self.hecke_norm {
            Some(v) => exact_from_json(v, &f)?,
            None => Exact::one(&f),
        };
        Ok(OrderConfig {
            field: f,
            basis: [
                mats[0].clone(),
                mats[1].clone(),
                mats[2].clone(),
                mats[3].clone(),
            ],
            coefficients,
            norm_one_bound: radius,
            hecke_norm,
        })
    }

    /// Explicit description of a configuration.
    pub fn from_config(cfg: &OrderConfig) -> OrderFile {
        OrderFile {
            preset: None,
            field_m: Some(cfg.field.m),
            field_theta: cfg.field.theta.as_ref().map(quad_to_json),
            basis: Some(
                cfg.basis
                    .iter()
                    .map(|b| raw_matrix_to_json(&RawMatrix::Exact(b.clone())))
                    .collect(),
            ),
            coefficients: Some(
                match cfg.coefficients {
                    Coefficients::Integers => "integers",
                    Coefficients::FieldIntegers => "field_integers",
                }
                .into(),
            ),
            hecke_norm: Some(exact_to_json(&cfg.hecke_norm)),
            radius: Some(cfg.norm_one_bound),
        }
    }
}

// ---------------------------------------------------------------- slices

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SliceFile {
    version: u32,
    field_m: Option<u64>,
    #[serde(default)]
    field_theta: Option<Value>,
    radius: f64,
    alpha: Value,
    gamma: Vec<Value>,
    double_coset: Vec<Value>,
    #[serde(default)]
    hecke_norm: Option<Value>,
    #[serde(default)]
    centralizer_witnesses: Vec<Value>,
    provenance: String,
    #[serde(default)]
    order: Option<OrderFile>,
}

/// A slice together with the order it was generated from, when known.
#[derive(Clone, Debug)]
pub struct LoadedSlice {
    pub slice: GroupSlice,
    pub order: Option<OrderConfig>,
}

pub fn parse_raw_slice(text: &str) -> Res<(RawSlice, Option<OrderConfig>)> {
    let f: SliceFile = parse_json(text, "slice")?;
    if f.version != SLICE_VERSION {
        return Err(invalid(format!(
            "unsupported slice version {} (expected {SLICE_VERSION})",
            f.version
        )));
    }
    let field = match f.field_m {
        Some(m) => SliceField::Exact(field_spec(m, f.field_theta.as_ref())?),
        None => {
            if f.field_theta.is_some() {
                return Err(invalid("field_theta given without field_m"));
            }
            SliceField::Approx
        }
    };
    let mats = |list: &[Value]| {
        list.iter()
            .map(|v| raw_matrix_from_json(v, &field))
            .collect::<Res<Vec<_>>>()
    };
    let hecke_norm = match (&f.hecke_norm, &field) {
        (None | Some(Value::Null), _) => None,
        (Some(v), SliceField::Exact(fs)) => Some(exact_from_json(v, fs)?),
        (Some(_), SliceField::Approx) => return Err(invalid("hecke_norm needs an exact field")),
    };
    let raw = RawSlice {
        radius: f.radius,
        alpha: raw_matrix_from_json(&f.alpha, &field)?,
        gamma: mats(&f.gamma)?,
        double_coset: mats(&f.double_coset)?,
        hecke_norm,
        centralizer_witnesses: mats(&f.centralizer_witnesses)?,
        provenance: f.provenance,
        field,
    };
    let order = f.order.as_ref().map(|o| o.to_config(None)).transpose()?;
    Ok((raw, order))
}

pub fn parse_slice(text: &str, strictness: Strictness) -> Res<LoadedSlice> {
    let (raw, order) = parse_raw_slice(text)?;
    Ok(LoadedSlice {
        slice: GroupSlice::from_raw(raw, strictness)?,
        order,
    })
}

pub fn load_slice(path: &Path) -> Res<LoadedSlice> {
    parse_slice(&read_text(path)?, Strictness::Strict)
}

pub fn slice_to_json(s: &GroupSlice, order: Option<&OrderConfig>) -> String {
    let (field_m, field_theta) = match &s.field {
        SliceField::Exact(f) => (Some(f.m), f.theta.as_ref().map(quad_to_json)),
        SliceField::Approx => (None, None),
    };
    let file = SliceFile {
        version: SLICE_VERSION,
        field_m,
        field_theta,
        radius: s.radius,
        alpha: isometry_to_json(&s.alpha),
        gamma: s.gamma.iter().map(isometry_to_json).collect(),
        double_coset: s.double_coset.iter().map(isometry_to_json).collect(),
        hecke_norm: s.hecke_norm.as_ref().map(exact_to_json),
        centralizer_witnesses: s
            .centralizer_witnesses
            .iter()
            .map(isometry_to_json)
            .collect(),
        provenance: s.provenance.clone(),
        order: order.map(OrderFile::from_config),
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

// ---------------------------------------------------------------- representations

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepFile {
    dim: usize,
    #[serde(default)]
    generators: BTreeMap<String, Value>,
    alpha: Value,
    #[serde(default)]
    alpha_inv: Option<Value>,
    #[serde(default)]
    words: BTreeMap<String, Vec<String>>,
}

/// A `dim × dim` matrix as rows of `[re, im]` entries.
fn cmatrix_from_json(v: &Value, what: &str) -> Res<CMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| invalid(format!("{what}: expected rows")))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| invalid(format!("{what}: expected a row")))?
                .iter()
                .map(complex_from_json)
                .collect()
        })
        .collect::<Res<Vec<Vec<C64>>>>()?;
    Ok(CMatrix::from_rows(&rows)?)
}

pub fn parse_rep(text: &str) -> Res<UnitaryRep> {
    let f: RepFile = parse_json(text, "representation")?;
    let generators = f
        .generators
        .iter()
        .map(|(k, v)| Ok((k.clone(), cmatrix_from_json(v, k)?)))
        .collect::<Res<BTreeMap<_, _>>>()?;
    let alpha = cmatrix_from_json(&f.alpha, "alpha")?;
    let alpha_inv = f
        .alpha_inv
        .as_ref()
        .map(|v| cmatrix_from_json(v, "alpha_inv"))
        .transpose()?;
    let mut words = BTreeMap::new();
    for (k, w) in &f.words {
        let letters = w
            .iter()
            .map(|l| Letter::parse(l))
            .collect::<Result<Vec<_>, _>>()?;
        words.insert(ElementRef::parse(k)?, letters);
    }
    Ok(UnitaryRep::new(f.dim, generators, alpha, alpha_inv, words)?)
}

pub fn load_rep(path: Option<&Path>) -> Res<UnitaryRep> {
    match path {
        Some(p) => parse_rep(&read_text(p)?),
        None => Ok(UnitaryRep::trivial()),
    }
}

// ---------------------------------------------------------------- packages

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PackageFile {
    label: String,
    #[serde(rename = "S")]
    s: Option<Vec<[f64; 3]>>,
    #[serde(rename = "L")]
    l: Option<Vec<[f64; 2]>>,
    #[serde(rename = "E")]
    e: Option<f64>,
}

pub fn parse_package(text: &str) -> Res<SpectrumPackage> {
    let f: PackageFile = parse_json(text, "package")?;
    let spectrum =
        f.s.map(|rows| {
            let entries = rows
                .iter()
                .map(|r| SpectralEntry {
                    lambda: r[0],
                    omega: C64::new(r[1], r[2]),
                })
                .collect();
            SpectralData::new(entries, SpectralConvention::WithMultiplicity)
        })
        .transpose()?;
    let lengths =
        f.l.map(|rows| {
            LengthSpectrum::new(
                rows.iter()
                    .map(|r| LengthEntry {
                        mu: r[0],
                        weight: r[1],
                    })
                    .collect(),
            )
        })
        .transpose()?;
    Ok(SpectrumPackage::new(f.label, spectrum, lengths, f.e)?)
}

pub fn load_package(path: &Path) -> Res<SpectrumPackage> {
    parse_package(&read_text(path)?)
}

pub fn package_to_json(p: &SpectrumPackage) -> String {
    let f = PackageFile {
        label: p.label.clone(),
        s: p.spectrum.as_ref().map(|s| {
            s.entries()
                .iter()
                .map(|e| [e.lambda, e.omega.re, e.omega.im])
                .collect()
        }),
        l: p.lengths
            .as_ref()
            .map(|l| l.entries().iter().map(|e| [e.mu, e.weight]).collect()),
        e: p.elliptic_number,
    };
    serde_json::to_string_pretty(&f).expect("serializable") + "\n"
}

// ---------------------------------------------------------------- spectral CSV

/// Rows `lambda,omega_re,omega_im`; a header row and `#` comments are skipped.
pub fn parse_spectral_csv(text: &str) -> Res<SpectralData> {
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("lambda") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| invalid(format!("spectral CSV line {}: bad number '{s}'", n + 1)))
        };
        let (lambda, re, im) = match cols.as_slice() {
            [l, r] => (num(l)?, num(r)?, 0.0),
            [l, r, i] => (num(l)?, num(r)?, num(i)?),
            _ => {
                return Err(invalid(format!(
                    "spectral CSV line {}: expected lambda,omega_re,omega_im",
                    n + 1
                )))
            }
        };
        entries.push(SpectralEntry {
            lambda,
            omega: C64::new(re, im),
        });
    }
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(SpectralData::new(
        entries,
        SpectralConvention::WithMultiplicity,
    )?)
}
