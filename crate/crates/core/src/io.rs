//! File formats: operator and vector JSON, function registries, scan CSV and
//! frame reports.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calculus::CalculusResult;
use crate::clifford::CliffordNum;
use crate::error::{Error, Result};
use crate::module::{CliffordOperator, ModuleVector};
use crate::quadratic::{FrameBounds, FrameError, QuadGridConfig};
use crate::slice::{certify_decay, IntrinsicFunction, Profile, SamplePlan};
use crate::spectrum::{scan_spectrum_slice, SliceGrid, SpectrumScan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub n: usize,
    pub m: usize,
    pub matrix: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub n: usize,
    pub m: usize,
    pub entries: Vec<Vec<f64>>,
}

fn schema(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), msg: msg.into() }
}

fn json_error(e: serde_json::Error) -> Error {
    schema(format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

fn coefficient(n: usize, coeffs: &[f64], path: String) -> Result<CliffordNum> {
    let want = 1usize << n;
    if coeffs.len() != want {
        return Err(schema(path, format!("expected {want} coefficients for n = {n}, got {}", coeffs.len())));
    }
    if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
        return Err(schema(format!("{path}[{k}]"), "coefficient is not finite"));
    }
    CliffordNum::from_coeffs(n, coeffs.to_vec()).map_err(|e| schema(path, e.to_string()))
}

impl OperatorFile {
    pub fn from_operator(t: &CliffordOperator) -> Self {
        let m = t.m();
        OperatorFile {
            n: t.n(),
            m,
            matrix: (0..m).map(|i| (0..m).map(|j| t.entry(i, j).coeffs().to_vec()).collect()).collect(),
        }
    }

    pub fn to_operator(&self) -> Result<CliffordOperator> {
        if self.m == 0 {
            return Err(schema("m", "module rank must be positive"));
        }
        if self.matrix.len() != self.m {
            return Err(schema("matrix", format!("expected {} rows, got {}", self.m, self.matrix.len())));
        }
        let mut entries = Vec::with_capacity(self.m * self.m);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.m {
                return Err(schema(format!("matrix[{i}]"), format!("expected {} entries, got {}", self.m, row.len())));
            }
            for (j, c) in row.iter().enumerate() {
                entries.push(coefficient(self.n, c, format!("matrix[{i}][{j}]"))?);
            }
        }
        CliffordOperator::new(self.n, self.m, entries)
    }
}

impl VectorFile {
    pub fn from_vector(v: &ModuleVector) -> Self {
        VectorFile { n: v.n(), m: v.m(), entries: v.entries().iter().map(|c| c.coeffs().to_vec()).collect() }
    }

    pub fn to_vector(&self) -> Result<ModuleVector> {
        if self.entries.len() != self.m || self.m == 0 {
            return Err(schema("entries", format!("expected {} entries, got {}", self.m, self.entries.len())));
        }
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, c)| coefficient(self.n, c, format!("entries[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        ModuleVector::new(entries)
    }
}

pub fn parse_operator(text: &str) -> Result<CliffordOperator> {
    serde_json::from_str::<OperatorFile>(text).map_err(json_error)?.to_operator()
}

pub fn parse_vector(text: &str) -> Result<ModuleVector> {
    serde_json::from_str::<VectorFile>(text).map_err(json_error)?.to_vector()
}

pub fn read_operator(path: &Path) -> Result<CliffordOperator> {
    parse_operator(&std::fs::read_to_string(path)?)
}

pub fn read_vector(path: &Path) -> Result<ModuleVector> {
    parse_vector(&std::fs::read_to_string(path)?)
}

pub fn operator_json(t: &CliffordOperator) -> String {
    serde_json::to_string_pretty(&OperatorFile::from_operator(t)).expect("finite coefficients")
}

pub fn vector_json(v: &ModuleVector) -> String {
    serde_json::to_string_pretty(&VectorFile::from_vector(v)).expect("finite coefficients")
}

/// The operator JSON of the result plus its error fields.
pub fn calculus_result_value(r: &CalculusResult) -> Value {
    let mut v = serde_json::to_value(OperatorFile::from_operator(&r.op)).expect("serializable");
    v["trunc_err"] = json!(r.trunc_err);
    v["disc_err"] = json!(r.disc_err);
    v
}

/// `x,y,sigma_min` rows followed by a `# detections:` line with a JSON array.
pub fn write_scan_csv<W: Write>(scan: &SpectrumScan, mut out: W) -> Result<()> {
    writeln!(out, "x,y,sigma_min")?;
    for i in 0..scan.grid.nx {
        for k in 0..scan.grid.ny {
            writeln!(out, "{},{},{}", scan.grid.x(i), scan.grid.y(k), scan.value(i, k))?;
        }
    }
    let det = serde_json::to_string(&scan.detections).expect("serializable");
    writeln!(out, "# detections: {det}")?;
    Ok(())
}

/// Scans `t` on `grid` and writes the CSV to `path`.
pub fn emit_heatmap(t: &CliffordOperator, grid: &SliceGrid, path: &Path) -> Result<SpectrumScan> {
    let scan = scan_spectrum_slice(t, grid)?;
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_scan_csv(&scan, &mut w)?;
    w.flush()?;
    Ok(scan)
}

fn field<'a>(params: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    params.get(key).ok_or_else(|| schema(format!("{path}.params.{key}"), "missing field"))
}

fn number(params: &Value, key: &str, path: &str) -> Result<f64> {
    field(params, key, path)?
        .as_f64()
        .ok_or_else(|| schema(format!("{path}.params.{key}"), "expected a number"))
}

fn optional_number(params: &Value, key: &str, path: &str) -> Result<Option<f64>> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v.as_f64().map(Some).ok_or_else(|| schema(format!("{path}.params.{key}"), "expected a number")),
    }
}

fn numbers(params: &Value, key: &str, path: &str) -> Result<Vec<f64>> {
    let arr = field(params, key, path)?
        .as_array()
        .ok_or_else(|| schema(format!("{path}.params.{key}"), "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| v.as_f64().ok_or_else(|| schema(format!("{path}.params.{key}[{i}]"), "expected a number")))
        .collect()
}

fn order(coeffs: &[f64]) -> Option<usize> {
    coeffs.iter().position(|&c| c != 0.0)
}

fn degree(coeffs: &[f64]) -> Option<usize> {
    coeffs.iter().rposition(|&c| c != 0.0)
}

/// Decay exponent of a real rational function at `0` and `infinity`, if both
/// are positive.
pub fn rational_decay_exponent(num: &[f64], den: &[f64]) -> Option<f64> {
    let (on, od) = (order(num)?, order(den)?);
    let (dn, dd) = (degree(num)?, degree(den)?);
    if on > od && dd > dn {
        Some(((on - od).min(dd - dn)) as f64)
    } else {
        None
    }
}

/// Resolves one registry entry `{"name": .., "params": {..}}`. `theta` is the
/// domain angle used where the entry does not set one.
pub fn parse_function(entry: &Value, theta: f64, path: &str) -> Result<IntrinsicFunction> {
    let name = entry
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| schema(format!("{path}.name"), "expected a builtin name"))?;
    let empty = json!({});
    let params = entry.get("params").unwrap_or(&empty);
    if !params.is_object() {
        return Err(schema(format!("{path}.params"), "expected an object"));
    }
    let theta = optional_number(params, "theta", path)?.unwrap_or(theta);
    let at = |e: Error| match e {
        Error::Schema { .. } => e,
        other => schema(path.to_string(), other.to_string()),
    };
    let inner = |key: &str| -> Result<IntrinsicFunction> {
        parse_function(field(params, key, path)?, theta, &format!("{path}.params.{key}"))
    };
    let list = |key: &str| -> Result<Vec<IntrinsicFunction>> {
        let arr = field(params, key, path)?
            .as_array()
            .ok_or_else(|| schema(format!("{path}.params.{key}"), "expected an array of registry entries"))?;
        arr.iter().enumerate().map(|(i, v)| parse_function(v, theta, &format!("{path}.params.{key}[{i}]"))).collect()
    };
    let f = match name {
        "regularizer" => IntrinsicFunction::regularizer(theta).map_err(at)?,
        "e_alpha" => IntrinsicFunction::e_alpha(number(params, "alpha", path)?, theta).map_err(at)?,
        "rational" => {
            let num = numbers(params, "num", path)?;
            let den = numbers(params, "den", path)?;
            let f = IntrinsicFunction::rational(num.clone(), den.clone(), theta).map_err(at)?;
            let alpha = optional_number(params, "alpha", path)?.or_else(|| rational_decay_exponent(&num, &den));
            match alpha {
                Some(a) => {
                    let cert = certify_decay(&f, a, &SamplePlan::default()).map_err(at)?;
                    f.with_decay(cert)
                }
                None => f,
            }
        }
        "const" => IntrinsicFunction::constant(number(params, "c", path)?, theta).map_err(at)?,
        "scaled" => IntrinsicFunction::scaled(&inner("f")?, number(params, "t", path)?).map_err(at)?,
        "f_ab" => IntrinsicFunction::f_ab(&inner("f")?, number(params, "a", path)?, number(params, "b", path)?).map_err(at)?,
        "product" => IntrinsicFunction::product(list("factors")?).map_err(at)?,
        "sum" => IntrinsicFunction::sum(list("terms")?).map_err(at)?,
        other => return Err(schema(format!("{path}.name"), format!("unknown builtin {other:?}"))),
    };
    match entry.get("label").and_then(Value::as_str) {
        Some(label) => Ok(f.with_name(label)),
        None => Ok(f),
    }
}

/// Registry entry reproducing `f`; certificates are recomputed on parsing.
pub fn registry_entry(f: &IntrinsicFunction) -> Value {
    let theta = f.theta();
    let (name, params) = match f.profile() {
        Profile::Regularizer => ("regularizer", json!({ "theta": theta })),
        Profile::EAlpha(a) => ("e_alpha", json!({ "alpha": a, "theta": theta })),
        Profile::Rational { num, den } => ("rational", json!({ "num": num, "den": den, "theta": theta })),
        Profile::Scaled { f, t } => ("scaled", json!({ "f": registry_entry(f), "t": t })),
        Profile::FAb { f, a, b } => ("f_ab", json!({ "f": registry_entry(f), "a": a, "b": b })),
        Profile::Product(fs) => ("product", json!({ "factors": fs.iter().map(registry_entry).collect::<Vec<_>>() })),
        Profile::Sum(fs) => ("sum", json!({ "terms": fs.iter().map(registry_entry).collect::<Vec<_>>() })),
    };
    json!({ "name": name, "params": params, "label": f.name() })
}

/// A single registry entry or an array of entries.
pub fn parse_registry(text: &str, theta: f64) -> Result<Vec<IntrinsicFunction>> {
    let v: Value = serde_json::from_str(text).map_err(json_error)?;
    match &v {
        Value::Array(items) => items.iter().enumerate().map(|(i, e)| parse_function(e, theta, &format!("[{i}]"))).collect(),
        _ => Ok(vec![parse_function(&v, theta, "$")?]),
    }
}

pub fn read_registry(path: &Path, theta: f64) -> Result<Vec<IntrinsicFunction>> {
    parse_registry(&std::fs::read_to_string(path)?, theta)
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameReport {
    pub c_lower: f64,
    pub d_upper: f64,
    pub theta_eigenvalues: Vec<f64>,
    pub grid: QuadGridConfig,
    pub error_estimates: FrameError,
}

impl From<&FrameBounds> for FrameReport {
    fn from(b: &FrameBounds) -> Self {
        FrameReport {
            c_lower: b.c_lower,
            d_upper: b.d_upper,
            theta_eigenvalues: b.theta_eigenvalues.clone(),
            grid: b.grid,
            error_estimates: b.error,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_operator, random_vector};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const VALID: &str = r#"{"n": 1, "m": 2, "matrix": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]}"#;

    #[test]
    fn parses_valid_operator() {
        let t = parse_operator(VALID).unwrap();
        assert_eq!((t.n(), t.m()), (1, 2));
        assert_eq!(t.entry(0, 1).coeffs(), &[1.0, 0.0]);
    }

    #[test]
    fn wrong_coefficient_count_names_the_entry() {
        let bad = r#"{"n": 1, "m": 2, "matrix": [[[1, 0], [1, 0]], [[0, 0], [1, 0, 3]]]}"#;
        match parse_operator(bad) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "matrix[1][1]"),
            other => panic!("{other:?}"),
        }
        let ragged = r#"{"n": 1, "m": 2, "matrix": [[[1, 0]], [[0, 0], [1, 0]]]}"#;
        assert!(matches!(parse_operator(ragged), Err(Error::Schema { path, .. }) if path == "matrix[0]"));
        let syntax = "{\"n\": 1,\n \"m\": }";
        assert!(matches!(parse_operator(syntax), Err(Error::Schema { path, .. }) if path.starts_with("line 2")));
        let vec_bad = r#"{"n": 2, "m": 1, "entries": [[1, 2]]}"#;
        assert!(matches!(parse_vector(vec_bad), Err(Error::Schema { path, .. }) if path == "entries[0]"));
    }

    proptest! {
        #[test]
        fn operator_round_trip_is_bitwise(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_operator(&mut rng, n, m);
            let back = parse_operator(&operator_json(&t)).unwrap();
            for (a, b) in t.entries().iter().zip(back.entries()) {
                let bits = |c: &CliffordNum| c.coeffs().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
                prop_assert_eq!(bits(a), bits(b));
            }
            let v = random_vector(&mut rng, n, m);
            prop_assert_eq!(parse_vector(&vector_json(&v)).unwrap(), v);
        }
    }

    #[test]
    fn registry_builtins() {
        let text = r#"[
            {"name": "regularizer"},
            {"name": "e_alpha", "params": {"alpha": 0.5}},
            {"name": "rational", "params": {"num": [0, 0, 1], "den": [1, 0, 1]}},
            {"name": "rational", "params": {"num": [0, 1], "den": [1, 0, 1]}},
            {"name": "scaled", "params": {"f": {"name": "regularizer"}, "t": 2}},
            {"name": "f_ab", "params": {"f": {"name": "regularizer"}, "a": 0.1, "b": 10}},
            {"name": "product", "params": {"factors": [{"name": "regularizer"}, {"name": "regularizer"}]}},
            {"name": "sum", "params": {"terms": [{"name": "regularizer"}, {"name": "e_alpha", "params": {"alpha": 1}}]}},
            {"name": "const", "params": {"c": 1}, "label": "one"}
        ]"#;
        let fs = parse_registry(text, 1.0).unwrap();
        assert_eq!(fs.len(), 9);
        assert!(fs[2].decay().is_none());
        let cert = fs[3].decay().unwrap();
        assert_eq!(cert.alpha, 1.0);
        assert!((cert.c_alpha - 1.0 / 1f64.cos()).abs() < 1e-3);
        assert_eq!(fs[6].decay().unwrap().alpha, 2.0);
        assert_eq!(fs[8].name(), "one");
        let z = num_complex::Complex64::new(0.3, 0.2);
        assert_eq!(fs[0].eval_complex(z).unwrap(), fs[3].eval_complex(z).unwrap());
        for f in &fs {
            let back = parse_function(&registry_entry(f), 0.5, "$").unwrap();
            assert_eq!(&back, f);
        }
        let unknown = parse_registry(r#"{"name": "gamma"}"#, 1.0);
        assert!(matches!(unknown, Err(Error::Schema { path, .. }) if path == "$.name"));
        let missing = parse_registry(r#"{"name": "scaled", "params": {"t": 1}}"#, 1.0);
        assert!(matches!(missing, Err(Error::Schema { path, .. }) if path == "$.params.f"));
    }

    #[test]
    fn scan_csv_layout() {
        let t = CliffordOperator::diagonal(1, &[1.0, -2.0]);
        let grid = SliceGrid::new(-3.0, 3.0, 61, 0.0, 1.0, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.csv");
        let scan = emit_heatmap(&t, &grid, &path).unwrap();
        assert_eq!(scan.detections.len(), 2);
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,sigma_min"));
        let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 61 * 11);
        assert!(rows.iter().all(|r| r.split(',').count() == 3));
        let block = text.lines().last().unwrap().strip_prefix("# detections: ").unwrap();
        let det: Vec<Value> = serde_json::from_str(block).unwrap();
        assert_eq!(det.len(), 2);

        let far = SliceGrid::new(10.0, 12.0, 5, 0.0, 1.0, 5).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&scan_spectrum_slice(&t, &far).unwrap(), &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("# detections: []\n"));
        assert!(emit_heatmap(&t, &grid, &dir.path().join("missing/scan.csv")).is_err());
    }
}
