//! JSON encodings and problem-spec files.
//!
//! Integers are written as JSON numbers of any size. Ring elements are
//! strings in the input grammar (`"3-2*w"`), so every report value can be
//! read back with the same parser.
//!
//! ```text
//! ideal   {"ring": "Q(sqrt(-1))", "basis": [[p, q], [0, r]], "norm": N}
//!         {"ring": "Z", "generator": g}
//! matrix  {"ring": "Z", "n": 2, "rows": [["1", "0"], ["0", "1"]]}
//! ```

use std::path::Path;

use num_bigint::BigInt;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::matrix::MatR;
use crate::ring::{Ring, RingElem};

pub fn bigint_number(x: &BigInt) -> Number {
    x.to_string().parse().expect("integer literal")
}

pub fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    bigint_number(x).serialize(s)
}

pub fn ser_opt_bigint<S: Serializer>(x: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.as_ref().map(bigint_number).serialize(s)
}

impl Serialize for Ring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for RingElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for Ideal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("ring", &self.ring())?;
        if self.ring().is_integers() {
            let g = self.int_generator().cloned().unwrap_or_default();
            map.serialize_entry("generator", &bigint_number(&g))?;
        } else {
            match self.hnf() {
                Some((p, q, r)) => {
                    let basis = [
                        [bigint_number(p), bigint_number(q)],
                        [Number::from(0), bigint_number(r)],
                    ];
                    map.serialize_entry("basis", &basis)?;
                    map.serialize_entry("norm", &bigint_number(&(p * r)))?;
                }
                None => {
                    map.serialize_entry("basis", &Vec::<Vec<Number>>::new())?;
                    map.serialize_entry("norm", &Number::from(0))?;
                }
            }
        }
        map.serialize_entry("display", &self.to_string())?;
        map.end()
    }
}

impl Serialize for MatR {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("ring", &self.ring())?;
        map.serialize_entry("n", &self.n())?;
        let rows: Vec<Vec<String>> = self
            .rows()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        map.serialize_entry("rows", &rows)?;
        map.end()
    }
}

fn spec_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Spec {
        location: location.into(),
        message: message.into(),
    }
}

fn parse_ring_value(v: &Value, loc: &str) -> Result<Ring> {
    let s = v
        .as_str()
        .ok_or_else(|| spec_err(loc, "expected a ring name string"))?;
    s.parse().map_err(|e: Error| spec_err(loc, e.to_string()))
}

fn value_bigint(v: &Value, loc: &str) -> Result<BigInt> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        _ => return Err(spec_err(loc, "expected an integer")),
    };
    text.parse()
        .map_err(|_| spec_err(loc, format!("not an integer: {text}")))
}

fn value_u64(v: &Value, loc: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| spec_err(loc, "expected a nonnegative integer"))
}

/// A ring element from a JSON number or a grammar string.
pub fn elem_from_value(ring: Ring, v: &Value, loc: &str) -> Result<RingElem> {
    match v {
        Value::Number(n) => {
            let x: BigInt = n
                .to_string()
                .parse()
                .map_err(|_| spec_err(loc, format!("not an integer: {n}")))?;
            Ok(RingElem::from_int(ring, x))
        }
        Value::String(s) => RingElem::parse(ring, s).map_err(|e| spec_err(loc, e.to_string())),
        _ => Err(spec_err(loc, "expected a number or a ring element string")),
    }
}

/// Matrix from `[[..], ..]`, a literal string such as `"[[1,w],[0,1]]"`, a
/// scalar (read as `1x1`), or the `{"ring", "n", "rows"}` object.
pub fn matrix_from_value(ring: Ring, v: &Value, loc: &str) -> Result<MatR> {
    match v {
        Value::Object(map) => {
            if let Some(r) = map.get("ring") {
                let given = parse_ring_value(r, &format!("{loc}.ring"))?;
                if given != ring {
                    return Err(spec_err(loc, format!("matrix over {given}, expected {ring}")));
                }
            }
            let rows = map
                .get("rows")
                .ok_or_else(|| spec_err(loc, "missing field `rows`"))?;
            let m = matrix_from_value(ring, rows, &format!("{loc}.rows"))?;
            if let Some(n) = map.get("n") {
                let n = value_u64(n, &format!("{loc}.n"))?;
                if n as usize != m.n() {
                    return Err(spec_err(loc, format!("n = {n} but {} rows", m.n())));
                }
            }
            Ok(m)
        }
        Value::Array(rows) => {
            let mut out = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let cells = row
                    .as_array()
                    .ok_or_else(|| spec_err(format!("{loc}[{i}]"), "expected a row array"))?;
                let parsed = cells
                    .iter()
                    .enumerate()
                    .map(|(j, c)| elem_from_value(ring, c, &format!("{loc}[{i}][{j}]")))
                    .collect::<Result<Vec<_>>>()?;
                out.push(parsed);
            }
            MatR::from_rows(ring, out).map_err(|e| spec_err(loc, e.to_string()))
        }
        Value::String(s) => parse_matrix(ring, s).map_err(|e| spec_err(loc, e.to_string())),
        Value::Number(_) => {
            let x = elem_from_value(ring, v, loc)?;
            Ok(MatR::scalar(&x, 1))
        }
        _ => Err(spec_err(loc, "expected a matrix")),
    }
}

/// Matrix literal `[[a, b], [c, d]]`; a bare element is a `1x1` matrix.
pub fn parse_matrix(ring: Ring, s: &str) -> Result<MatR> {
    let t = s.trim();
    if !t.starts_with('[') {
        return Ok(MatR::scalar(&RingElem::parse(ring, t)?, 1));
    }
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Invalid(format!("unbalanced brackets in {s:?}")))?;
    let mut rows = Vec::new();
    for row in split_top(inner)? {
        let row = row.trim();
        let cells = row
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Invalid(format!("row {row:?} is not bracketed")))?;
        rows.push(
            split_top(cells)?
                .into_iter()
                .map(|c| RingElem::parse(ring, c))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    MatR::from_rows(ring, rows)
}

/// Split on commas at bracket depth zero.
fn split_top(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Invalid(format!("unbalanced brackets in {s:?}")));
        }
    }
    if depth != 0 {
        return Err(Error::Invalid(format!("unbalanced brackets in {s:?}")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

/// Inverse of the `Ideal` encoding.
pub fn ideal_from_value(v: &Value, loc: &str) -> Result<Ideal> {
    let map = v
        .as_object()
        .ok_or_else(|| spec_err(loc, "expected an ideal object"))?;
    let ring = parse_ring_value(map.get("ring").unwrap_or(&Value::Null), &format!("{loc}.ring"))?;
    if ring.is_integers() {
        let g = map
            .get("generator")
            .ok_or_else(|| spec_err(loc, "missing field `generator`"))?;
        return Ok(Ideal::from_int_generator(
            ring,
            value_bigint(g, &format!("{loc}.generator"))?,
        ));
    }
    let basis = map
        .get("basis")
        .and_then(Value::as_array)
        .ok_or_else(|| spec_err(loc, "missing array field `basis`"))?;
    if basis.is_empty() {
        return Ok(Ideal::zero(ring));
    }
    let cell = |i: usize, j: usize| -> Result<BigInt> {
        let at = format!("{loc}.basis[{i}][{j}]");
        let v = basis
            .get(i)
            .and_then(|r| r.get(j))
            .ok_or_else(|| spec_err(&at, "missing"))?;
        value_bigint(v, &at)
    };
    Ideal::from_hnf(ring, cell(0, 0)?, cell(0, 1)?, cell(1, 1)?).map_err(|e| spec_err(loc, e.to_string()))
}

/// Parsed problem specification. Every field is optional at this level;
/// subcommands check what they need.
#[derive(Clone, Debug, Default)]
pub struct ProblemSpec {
    pub ring: Option<Ring>,
    pub n: Option<usize>,
    pub poly: Option<String>,
    pub coeffs: Vec<MatR>,
    pub exps: Option<Vec<u64>>,
    pub b: Option<MatR>,
    pub max_m: Option<u64>,
    pub entry_box: Option<i64>,
    pub mode: Option<String>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub residue_cap: Option<u64>,
    pub subset_cap: Option<usize>,
    pub all_orders: Option<bool>,
}

const SPEC_FIELDS: &[&str] = &[
    "ring",
    "n",
    "poly",
    "coeffs",
    "exps",
    "B",
    "max_m",
    "entry_box",
    "mode",
    "samples",
    "seed",
    "residue_cap",
    "subset_cap",
    "all_orders",
];

/// Read a `.toml` or `.json` problem file (by extension; other names are
/// tried as JSON, then TOML).
pub fn load_spec(path: &Path) -> Result<ProblemSpec> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| spec_err(&name, e.to_string()))?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let value = match ext {
        "toml" => toml_to_json(&text, &name)?,
        "json" => serde_json::from_str(&text).map_err(|e| spec_err(&name, e.to_string()))?,
        _ => match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(_) => toml_to_json(&text, &name)?,
        },
    };
    spec_from_value(&value, &name)
}

fn toml_to_json(text: &str, name: &str) -> Result<Value> {
    let t: toml::Table =
        toml::from_str(text).map_err(|e| spec_err(name, e.to_string().trim_end().to_string()))?;
    serde_json::to_value(t).map_err(|e| spec_err(name, e.to_string()))
}

pub fn spec_from_value(v: &Value, name: &str) -> Result<ProblemSpec> {
    let empty = Map::new();
    let map = match v {
        Value::Object(m) => m,
        Value::Null => &empty,
        _ => return Err(spec_err(name, "top level must be a table/object")),
    };
    if let Some(k) = map.keys().find(|k| !SPEC_FIELDS.contains(&k.as_str())) {
        return Err(spec_err(format!("{name}: field `{k}`"), "unknown field"));
    }
    let loc = |field: &str| format!("{name}: field `{field}`");
    let mut spec = ProblemSpec::default();
    if let Some(r) = map.get("ring") {
        spec.ring = Some(parse_ring_value(r, &loc("ring"))?);
    }
    let ring = spec.ring.unwrap_or(Ring::Integers);
    if let Some(x) = map.get("n") {
        spec.n = Some(value_u64(x, &loc("n"))? as usize);
    }
    if let Some(x) = map.get("poly") {
        spec.poly = Some(
            x.as_str()
                .ok_or_else(|| spec_err(loc("poly"), "expected a string"))?
                .to_string(),
        );
    }
    if let Some(x) = map.get("coeffs") {
        let arr = x
            .as_array()
            .ok_or_else(|| spec_err(loc("coeffs"), "expected an array of matrices"))?;
        for (i, c) in arr.iter().enumerate() {
            spec.coeffs
                .push(matrix_from_value(ring, c, &format!("{}[{i}]", loc("coeffs")))?);
        }
    }
    if let Some(x) = map.get("exps") {
        let arr = x
            .as_array()
            .ok_or_else(|| spec_err(loc("exps"), "expected an array"))?;
        spec.exps = Some(
            arr.iter()
                .enumerate()
                .map(|(i, e)| value_u64(e, &format!("{}[{i}]", loc("exps"))))
                .collect::<Result<_>>()?,
        );
    }
    if let Some(x) = map.get("B") {
        spec.b = Some(matrix_from_value(ring, x, &loc("B"))?);
    }
    if let Some(x) = map.get("max_m") {
        spec.max_m = Some(value_u64(x, &loc("max_m"))?);
    }
    if let Some(x) = map.get("entry_box") {
        spec.entry_box = Some(
            x.as_i64()
                .ok_or_else(|| spec_err(loc("entry_box"), "expected an integer"))?,
        );
    }
    if let Some(x) = map.get("mode") {
        let m = x
            .as_str()
            .ok_or_else(|| spec_err(loc("mode"), "expected a string"))?;
        if m != "exact" && m != "sampled" {
            return Err(spec_err(
                loc("mode"),
                format!("expected \"exact\" or \"sampled\", got {m:?}"),
            ));
        }
        spec.mode = Some(m.to_string());
    }
    if let Some(x) = map.get("samples") {
        spec.samples = Some(value_u64(x, &loc("samples"))?);
    }
    if let Some(x) = map.get("seed") {
        spec.seed = Some(value_u64(x, &loc("seed"))?);
    }
    if let Some(x) = map.get("residue_cap") {
        spec.residue_cap = Some(value_u64(x, &loc("residue_cap"))?);
    }
    if let Some(x) = map.get("subset_cap") {
        spec.subset_cap = Some(value_u64(x, &loc("subset_cap"))? as usize);
    }
    if let Some(x) = map.get("all_orders") {
        spec.all_orders = Some(
            x.as_bool()
                .ok_or_else(|| spec_err(loc("all_orders"), "expected a boolean"))?,
        );
    }
    if let (Some(n), Some(c)) = (spec.n, spec.coeffs.iter().find(|c| c.n() != spec.n.unwrap_or(0))) {
        return Err(spec_err(
            loc("coeffs"),
            format!("coefficient is {0}x{0} but n = {n}", c.n()),
        ));
    }
    Ok(spec)
}
