//! On-disk formats: map description files, diagram/graph files, CSV
//! emitters. Exact rationals are encoded as "p/q" strings; everything is
//! written atomically (temp file + rename) with deterministic ordering.

use anyhow::{anyhow, bail, Context, Result};
use entromap_core::hofbauer::HofbauerDiagram;
use entromap_core::maps::{BranchFn, PiecewiseMonotoneMap};
use entromap_core::poly::Poly;
use entromap_core::scalar::{Interval, Scalar};
use entromap_core::OrientedGraph;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

/// Floating output carries 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{:.11e}", x)
}

pub fn scalar_repr(s: &Scalar) -> serde_json::Value {
    match s {
        Scalar::Exact(r) => serde_json::Value::String(format!("{}", r)),
        Scalar::Float(x) => serde_json::json!(x),
    }
}

pub fn scalar_from_repr(v: &serde_json::Value) -> Result<Scalar> {
    match v {
        serde_json::Value::String(s) => {
            Scalar::parse_exact(s).ok_or_else(|| anyhow!("bad rational literal `{s}`"))
        }
        serde_json::Value::Number(n) => Ok(Scalar::Float(
            n.as_f64().ok_or_else(|| anyhow!("bad number"))?,
        )),
        other => bail!("expected number or \"p/q\" string, got {other}"),
    }
}

// ---------------------------------------------------------------------------
// Map description file
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub pieces: Vec<PieceRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceRepr {
    pub interval: [serde_json::Value; 2],
    pub coeffs: Vec<serde_json::Value>,
}

fn smoothness_from(v: &Option<serde_json::Value>) -> Result<f64> {
    match v {
        None => Ok(f64::INFINITY),
        Some(serde_json::Value::Number(n)) => {
            n.as_f64().ok_or_else(|| anyhow!("bad smoothness number"))
        }
        Some(serde_json::Value::String(s)) if s == "inf" => Ok(f64::INFINITY),
        Some(other) => bail!("bad smoothness field {other}"),
    }
}

pub fn load_map(path: &Path) -> Result<PiecewiseMonotoneMap> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("file not found: {}", path.display()))?;
    let file: MapFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    map_from_file(&file)
}

pub fn map_from_file(file: &MapFile) -> Result<PiecewiseMonotoneMap> {
    match file.kind.as_str() {
        "builtin" => {
            let name = file
                .name
                .as_deref()
                .ok_or_else(|| anyhow!("builtin map file needs a `name`"))?;
            Ok(entromap_core::builtins::builtin_map(name)?)
        }
        "piecewise_linear" | "piecewise_poly" => {
            let exact = file.kind == "piecewise_linear";
            let mut pieces = Vec::new();
            for p in &file.pieces {
                let lo = scalar_from_repr(&p.interval[0])?;
                let hi = scalar_from_repr(&p.interval[1])?;
                let coeffs: Vec<Scalar> = p
                    .coeffs
                    .iter()
                    .map(|c| scalar_from_repr(c))
                    .collect::<Result<_>>()?;
                if exact {
                    if coeffs.len() > 2 {
                        bail!("piecewise_linear pieces take at most two coefficients");
                    }
                    for c in coeffs.iter().chain([&lo, &hi]) {
                        if !c.is_exact() {
                            bail!("piecewise_linear data must be rational (\"p/q\" strings)");
                        }
                    }
                }
                pieces.push((Interval::new(lo, hi), BranchFn::Poly(Poly::new(coeffs))));
            }
            let r = smoothness_from(&file.r)?;
            let name = file.name.clone().unwrap_or_else(|| file.kind.clone());
            Ok(PiecewiseMonotoneMap::from_pieces(pieces, r, name)?)
        }
        other => bail!("unknown map type `{other}`"),
    }
}

/// Resolves `builtin:...` grammar or a path on disk.
pub fn resolve_map(spec: &str) -> Result<PiecewiseMonotoneMap> {
    if spec.starts_with("builtin:") {
        return Ok(entromap_core::builtins::builtin_map(spec)?);
    }
    load_map(Path::new(spec))
}

// ---------------------------------------------------------------------------
// Diagram / graph files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct DiagramFile {
    pub vertices: Vec<VertexRepr>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<DiagramMeta>,
    /// E_L-tagged vertex ids for convergence inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tagged: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
pub struct VertexRepr {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[serde_json::Value; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

#[derive(Serialize, Deserialize)]
pub struct DiagramMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

pub fn diagram_to_file(d: &HofbauerDiagram, map_name: &str) -> DiagramFile {
    DiagramFile {
        vertices: d
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| VertexRepr {
                id,
                label: None,
                base: Some(v.base_letter),
                interval: Some([
                    scalar_repr(&v.image_interval.lo),
                    scalar_repr(&v.image_interval.hi),
                ]),
                depth: Some(v.depth),
            })
            .collect(),
        edges: d.edges.iter().map(|&(a, b)| [a, b]).collect(),
        meta: Some(DiagramMeta {
            map: Some(map_name.to_string()),
            n: Some(d.truncation_depth),
        }),
        tagged: None,
    }
}

pub fn load_graph(path: &Path) -> Result<(OrientedGraph, Vec<Option<String>>, Option<Vec<usize>>)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("file not found: {}", path.display()))?;
    let file: DiagramFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let n = file.vertices.len();
    let graph = OrientedGraph::new(n, file.edges.iter().map(|e| (e[0], e[1])))?;
    let mut labels = vec![None; n];
    for v in &file.vertices {
        if v.id >= n {
            bail!("vertex id {} out of range", v.id);
        }
        labels[v.id] = v.label.clone();
    }
    Ok((graph, labels, file.tagged))
}

/// Accepts a numeric id or a vertex label.
pub fn resolve_vertex(spec: &str, labels: &[Option<String>]) -> Result<usize> {
    if let Ok(id) = spec.parse::<usize>() {
        if id < labels.len() {
            return Ok(id);
        }
        bail!("vertex id {id} out of range (graph has {} vertices)", labels.len());
    }
    labels
        .iter()
        .position(|l| l.as_deref() == Some(spec))
        .ok_or_else(|| anyhow!("no vertex labelled `{spec}`"))
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

/// Writes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, &text)
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv {
            buf: format!("{header}\n"),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn write(self, path: &Path) -> Result<()> {
        write_atomic(path, &self.buf)
    }
}
