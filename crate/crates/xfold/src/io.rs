//! File formats: JSON for structure, CSV for large matrices.  Rationals
//! always serialize as `"p/q"` strings, floats as shortest round-trip
//! decimals.  serde_json's default map keeps keys sorted, so a given value
//! has exactly one rendering and reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::bounds::BoundsReport;
use crate::error::Error;
use crate::extension::{ExtendedSystem, ProjectionReport};
use crate::mat::Mat;
use crate::polygon::{LinearSystemH, PointVec, PolygonV};
use crate::rounding::{RecoveryReport, RoundedSystem};
use crate::scalar::{Scalar, ScalarMode};
use crate::slack::VerifyReport;

/// Panics on non-finite floats: every constructor and parser in the crate
/// rejects them, so one here is a bug, not bad input.
pub fn scalar_to_json<S: Scalar>(v: &S) -> Value {
    match S::MODE {
        ScalarMode::Rational => Value::String(v.render()),
        ScalarMode::Float64 => {
            Value::Number(serde_json::Number::from_f64(v.to_f64()).expect("finite float"))
        }
    }
}

pub fn scalar_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<S, Error> {
    match (S::MODE, v) {
        (ScalarMode::Rational, Value::String(s)) => S::parse(s),
        (ScalarMode::Rational, other) => Err(Error::Parse(format!(
            "{ctx}: expected a \"p/q\" string in rational mode, got {other}"
        ))),
        (ScalarMode::Float64, Value::Number(_)) => {
            let f = v
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("{ctx}: number out of f64 range")))?;
            S::parse(&format!("{f}"))
        }
        (ScalarMode::Float64, other) => {
            Err(Error::Parse(format!("{ctx}: expected a number in float mode, got {other}")))
        }
    }
}

pub fn vec_to_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

pub fn vec_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<Vec<S>, Error> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{ctx}: expected an array")))?;
    arr.iter()
        .enumerate()
        .map(|(i, e)| scalar_from_json(e, &format!("{ctx}[{i}]")))
        .collect()
}

/// `{"rows": m, "cols": n, "data": [...]}` with `data` row-major.
pub fn mat_to_json<S: Scalar>(m: &Mat<S>) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "data": Value::Array(m.data().iter().map(scalar_to_json).collect()),
    })
}

pub fn mat_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<Mat<S>, Error> {
    let rows = get_usize(v, "rows", ctx)?;
    let cols = get_usize(v, "cols", ctx)?;
    let data: Vec<S> = vec_from_json(get(v, "data", ctx)?, &format!("{ctx}.data"))?;
    Mat::new(rows, cols, data)
}

/// Row-major CSV, one row per line, entries in the scalar's render form.
pub fn mat_to_csv<S: Scalar>(m: &Mat<S>) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| v.render()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn mat_from_csv<S: Scalar>(text: &str, ctx: &str) -> Result<Mat<S>, Error> {
    let mut rows: Vec<Vec<S>> = Vec::new();
    for (num, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<S> = line
            .split(',')
            .map(|cell| {
                S::parse(cell.trim())
                    .map_err(|e| Error::Parse(format!("{ctx} line {}: {e}", num + 1)))
            })
            .collect::<Result<_, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "{ctx} line {}: {} cells where the first row has {}",
                    num + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{ctx}: empty matrix")));
    }
    Mat::from_rows(rows)
}

/// `{"mode": ..., "vertices": [[x, y], ...]}`.
pub fn polygon_to_json<S: Scalar>(p: &PolygonV<S>) -> Value {
    let vertices: Vec<Value> = p
        .vertices()
        .iter()
        .map(|v| Value::Array(v.coords().iter().map(scalar_to_json).collect()))
        .collect();
    json!({ "mode": S::MODE.as_str(), "vertices": Value::Array(vertices) })
}

/// Re-validates convexity and orientation through `PolygonV::new`.
pub fn polygon_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<PolygonV<S>, Error> {
    check_mode::<S>(v, ctx)?;
    let verts = get(v, "vertices", ctx)?
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{ctx}.vertices: expected an array")))?;
    let points: Vec<PointVec<S>> = verts
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let coords: Vec<S> = vec_from_json(row, &format!("{ctx}.vertices[{i}]"))?;
            Ok(PointVec::new(coords))
        })
        .collect::<Result<_, Error>>()?;
    PolygonV::new(points)
}

/// `{"A": [[...], ...], "b": [...]}` — scalar encoding implies the mode.
pub fn hrep_to_json<S: Scalar>(h: &LinearSystemH<S>) -> Value {
    let a_rows: Vec<Value> = (0..h.m()).map(|i| vec_to_json(h.a().row(i))).collect();
    json!({ "A": Value::Array(a_rows), "b": vec_to_json(h.b()) })
}

pub fn hrep_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<LinearSystemH<S>, Error> {
    let a = rows_from_json(get(v, "A", ctx)?, &format!("{ctx}.A"))?;
    let b: Vec<S> = vec_from_json(get(v, "b", ctx)?, &format!("{ctx}.b"))?;
    LinearSystemH::new(a, b)
}

pub fn verify_report_to_json<S: Scalar>(r: &VerifyReport<S>) -> Value {
    json!({
        "max_residual": scalar_to_json(&r.max_residual),
        "argmax": [r.argmax.0, r.argmax.1],
        "smax": scalar_to_json(&r.smax),
        "entries_checked": r.entries_checked,
        "factors_nonneg": r.factors_nonneg,
        "pass": r.pass,
        "mode": S::MODE.as_str(),
    })
}

pub fn projection_report_to_json<S: Scalar>(r: &ProjectionReport<S>) -> Value {
    json!({
        "max_gap": scalar_to_json(&r.max_gap),
        "worst_row": r.worst_row,
        "unbounded_rows": r.unbounded_rows.clone(),
        "pass": r.pass,
        "mode": S::MODE.as_str(),
    })
}

pub fn bounds_report_to_json(r: &BoundsReport) -> Value {
    json!({
        "face_count_bound": r.face_count_bound,
        "linear_rank_bound": r.linear_rank_bound,
        "construction_rank": r.construction_rank,
        "gap": r.gap,
    })
}

/// `{"A": ..., "T": ..., "b": ..., "d": ..., "r": ...}`.
pub fn extension_to_json<S: Scalar>(q: &ExtendedSystem<S>) -> Value {
    let a_rows: Vec<Value> = (0..q.m()).map(|i| vec_to_json(q.a().row(i))).collect();
    let t_rows: Vec<Value> = (0..q.m()).map(|i| vec_to_json(q.t().row(i))).collect();
    json!({
        "A": Value::Array(a_rows),
        "T": Value::Array(t_rows),
        "b": vec_to_json(q.b()),
        "d": q.d(),
        "r": q.r(),
    })
}

pub fn rounded_system_to_json(rs: &RoundedSystem) -> Value {
    let a_rows: Vec<Value> =
        (0..rs.a_bar().rows()).map(|i| vec_to_json(rs.a_bar().row(i))).collect();
    let t_rows: Vec<Value> =
        (0..rs.t_bar().rows()).map(|i| vec_to_json(rs.t_bar().row(i))).collect();
    json!({
        "A": Value::Array(a_rows),
        "T": Value::Array(t_rows),
        "b": vec_to_json(rs.b_bar()),
        "delta": scalar_to_json(rs.delta()),
        "epsilon": scalar_to_json(&rs.epsilon()),
        "grid_step": scalar_to_json(&rs.grid_step()),
        "d": rs.d(),
        "r": rs.r(),
    })
}

pub fn recovery_report_to_json(r: &RecoveryReport) -> Value {
    let disagreements: Vec<Value> =
        r.disagreements.iter().map(|p| json!([p[0], p[1]])).collect();
    json!({
        "points_checked": r.points_checked,
        "disagreements": Value::Array(disagreements),
        "pass": r.pass,
    })
}

/// Everything one construction run produces, bundled for disk.  The matrices
/// live in sibling CSV files referenced by name from the JSON.
#[derive(Clone, Debug)]
pub struct Bundle<S: Scalar> {
    pub n: u64,
    /// Folding steps (polygon: number of axes; permutahedron: network size).
    pub q: u64,
    pub rank: u64,
    pub t: Mat<S>,
    pub u: Mat<S>,
    /// `None` when the slack matrix was too large to materialize.
    pub s: Option<Mat<S>>,
    pub residual: f64,
    pub network: Option<NetworkMeta>,
}

#[derive(Clone, Debug)]
pub struct NetworkMeta {
    pub size: u64,
    pub comparators: Vec<(usize, usize)>,
}

fn sibling(path: &Path, suffix: &str) -> Result<(PathBuf, String), Error> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::InvalidInput(format!("bad bundle path {}", path.display())))?;
    let name = format!("{stem}.{suffix}.csv");
    Ok((path.with_file_name(&name), name))
}

/// Writes `<stem>.json` plus `<stem>.T.csv`, `<stem>.U.csv` and (when the
/// slack matrix is present) `<stem>.S.csv` next to it.
pub fn write_bundle<S: Scalar>(path: &Path, bundle: &Bundle<S>) -> Result<(), Error> {
    let (t_path, t_name) = sibling(path, "T")?;
    let (u_path, u_name) = sibling(path, "U")?;
    write_text(&t_path, &mat_to_csv(&bundle.t))?;
    write_text(&u_path, &mat_to_csv(&bundle.u))?;
    let s_ref = match &bundle.s {
        Some(s) => {
            let (s_path, s_name) = sibling(path, "S")?;
            write_text(&s_path, &mat_to_csv(s))?;
            Value::String(s_name)
        }
        None => Value::Null,
    };
    let mut doc = json!({
        "mode": S::MODE.as_str(),
        "n": bundle.n,
        "q": bundle.q,
        "rank": bundle.rank,
        "residual": Value::Number(
            serde_json::Number::from_f64(bundle.residual).expect("finite residual")
        ),
        "T": Value::String(t_name),
        "U": Value::String(u_name),
        "S": s_ref,
    });
    if let Some(net) = &bundle.network {
        let comps: Vec<Value> = net.comparators.iter().map(|&(j, k)| json!([j, k])).collect();
        doc["network_size"] = json!(net.size);
        doc["comparators"] = Value::Array(comps);
    }
    write_json(path, &doc)
}

pub fn read_bundle<S: Scalar>(path: &Path) -> Result<Bundle<S>, Error> {
    let ctx = path.display().to_string();
    let doc = read_json(path)?;
    check_mode::<S>(&doc, &ctx)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let load = |key: &str| -> Result<Mat<S>, Error> {
        let name = get(&doc, key, &ctx)?
            .as_str()
            .ok_or_else(|| Error::Parse(format!("{ctx}.{key}: expected a file name")))?;
        let file = dir.join(name);
        let text = read_text(&file)?;
        mat_from_csv(&text, &file.display().to_string())
    };
    let s = match get(&doc, "S", &ctx)? {
        Value::Null => None,
        _ => Some(load("S")?),
    };
    let network = match doc.get("network_size") {
        None => None,
        Some(size) => {
            let size = size
                .as_u64()
                .ok_or_else(|| Error::Parse(format!("{ctx}.network_size: expected an integer")))?;
            let comps = get(&doc, "comparators", &ctx)?
                .as_array()
                .ok_or_else(|| Error::Parse(format!("{ctx}.comparators: expected an array")))?
                .iter()
                .map(|pair| {
                    let j = pair.get(0).and_then(Value::as_u64);
                    let k = pair.get(1).and_then(Value::as_u64);
                    match (j, k) {
                        (Some(j), Some(k)) => Ok((j as usize, k as usize)),
                        _ => Err(Error::Parse(format!("{ctx}.comparators: expected [j, k]"))),
                    }
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Some(NetworkMeta { size, comparators: comps })
        }
    };
    Ok(Bundle {
        n: get_u64(&doc, "n", &ctx)?,
        q: get_u64(&doc, "q", &ctx)?,
        rank: get_u64(&doc, "rank", &ctx)?,
        t: load("T")?,
        u: load("U")?,
        s,
        residual: get(&doc, "residual", &ctx)?
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("{ctx}.residual: expected a number")))?,
        network,
    })
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), Error> {
    write_text(path, &render_json(v))
}

pub fn read_json(path: &Path) -> Result<Value, Error> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads a matrix from `.csv` or `.json` by extension.
pub fn read_matrix_file<S: Scalar>(path: &Path) -> Result<Mat<S>, Error> {
    let ctx = path.display().to_string();
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => mat_from_json(&read_json(path)?, &ctx),
        _ => {
            let text = read_text(path)?;
            mat_from_csv(&text, &ctx)
        }
    }
}

fn get<'a>(v: &'a Value, key: &str, ctx: &str) -> Result<&'a Value, Error> {
    v.get(key).ok_or_else(|| Error::Parse(format!("{ctx}: missing field \"{key}\"")))
}

fn get_u64(v: &Value, key: &str, ctx: &str) -> Result<u64, Error> {
    get(v, key, ctx)?
        .as_u64()
        .ok_or_else(|| Error::Parse(format!("{ctx}.{key}: expected an integer")))
}

fn get_usize(v: &Value, key: &str, ctx: &str) -> Result<usize, Error> {
    Ok(get_u64(v, key, ctx)? as usize)
}

fn check_mode<S: Scalar>(v: &Value, ctx: &str) -> Result<(), Error> {
    let mode = get(v, "mode", ctx)?
        .as_str()
        .ok_or_else(|| Error::Parse(format!("{ctx}.mode: expected a string")))?;
    if mode != S::MODE.as_str() {
        return Err(Error::UnsupportedMode(format!(
            "{ctx}: file is {mode}, reader expects {}",
            S::MODE.as_str()
        )));
    }
    Ok(())
}

fn rows_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<Mat<S>, Error> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{ctx}: expected an array of rows")))?;
    let rows: Vec<Vec<S>> = arr
        .iter()
        .enumerate()
        .map(|(i, row)| vec_from_json(row, &format!("{ctx}[{i}]")))
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err(Error::Parse(format!("{ctx}: empty matrix")));
    }
    Mat::from_rows(rows)
}
