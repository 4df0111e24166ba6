//! JSON documents for CDCs, triangulations, partitions, covers, and
//! schemes, with input type detected from the top-level keys.

use serde_json::{json, Value};
use thiserror::Error;

use crate::cdc::{Cdc, CdcError};
use crate::covers::{BicliqueCover, CoverFile, IbScheme};
use crate::generators::{triangulation_to_cdc, GeneratorError, GridTriangulation};
use crate::geometry::{partition_to_cdc, GeometryError, PlanarPartition};
use crate::nodeset::NodeSet;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unrecognised document: {0}")]
    Format(String),
    #[error(transparent)]
    Cdc(#[from] CdcError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone)]
pub enum Document {
    Cdc(Cdc),
    Triangulation(GridTriangulation),
    Partition(PlanarPartition),
    Cover(BicliqueCover),
    Scheme(IbScheme),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Cdc(_) => "cdc",
            Document::Triangulation(_) => "triangulation",
            Document::Partition(_) => "partition",
            Document::Cover(_) => "cover",
            Document::Scheme(_) => "scheme",
        }
    }

    /// The CDC described by the document, for the three CDC sources.
    pub fn to_cdc(&self) -> Result<Cdc, IoError> {
        match self {
            Document::Cdc(c) => Ok(c.clone()),
            Document::Triangulation(t) => Ok(triangulation_to_cdc(t)?),
            Document::Partition(p) => Ok(partition_to_cdc(p)?),
            other => Err(IoError::Format(format!("a {} does not describe a CDC", other.kind()))),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Document::Cdc(c) => cdc_to_json(c),
            Document::Triangulation(t) => serde_json::to_value(t).expect("plain data serialises"),
            Document::Partition(p) => p.to_json(),
            Document::Cover(c) => serde_json::to_value(c.to_file()).expect("plain data serialises"),
            Document::Scheme(s) => scheme_to_json(s),
        }
    }
}

pub fn read_document(text: &str) -> Result<Document, IoError> {
    let v: Value = serde_json::from_str(text)?;
    let has = |k: &str| v.get(k).is_some();
    if has("ground_set") {
        Ok(Document::Cdc(cdc_from_json(&v)?))
    } else if has("triangles") {
        Ok(Document::Triangulation(serde_json::from_value(v)?))
    } else if has("polygons") {
        Ok(Document::Partition(PlanarPartition::from_json(&v)?))
    } else if has("k") && has("levels") {
        Ok(Document::Scheme(scheme_from_json(&v)?))
    } else if has("nodes") && has("levels") {
        let f: CoverFile = serde_json::from_value(v)?;
        Ok(Document::Cover(BicliqueCover::from_file(&f)))
    } else {
        Err(IoError::Format("expected one of ground_set, triangles, polygons, or levels".into()))
    }
}

fn label(v: &Value) -> Result<String, IoError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(IoError::Format("labels must be strings or numbers".into())),
    }
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| IoError::Format(format!("{what} must be an array")))
}

/// Reads `{"ground_set": [...], "sets": [[...], ...]}` with strict
/// validation.
pub fn cdc_from_json(v: &Value) -> Result<Cdc, IoError> {
    let ground: Vec<String> = array(&v["ground_set"], "ground_set")?.iter().map(label).collect::<Result<_, _>>()?;
    let sets: Vec<Vec<String>> = array(&v["sets"], "sets")?
        .iter()
        .map(|s| array(s, "each set")?.iter().map(label).collect())
        .collect::<Result<_, _>>()?;
    Ok(Cdc::new(ground, sets)?)
}

pub fn cdc_to_json(cdc: &Cdc) -> Value {
    let sets: Vec<Vec<String>> = cdc.sets().iter().map(|s| cdc.labels_of(s)).collect();
    json!({ "ground_set": cdc.labels(), "sets": sets })
}

pub fn scheme_to_json(s: &IbScheme) -> Value {
    let levels: Vec<Vec<Vec<usize>>> = s.levels().iter().map(|l| l.iter().map(NodeSet::to_vec).collect()).collect();
    json!({ "nodes": s.node_count(), "k": s.k(), "levels": levels })
}

/// Reads `{"nodes": n, "k": k, "levels": [[[i, ...], ...], ...]}` with
/// 0-based indices.
pub fn scheme_from_json(v: &Value) -> Result<IbScheme, IoError> {
    let num =
        |k: &str| v[k].as_u64().map(|x| x as usize).ok_or_else(|| IoError::Format(format!("{k} must be an integer")));
    let (n, k) = (num("nodes")?, num("k")?);
    let levels: Vec<Vec<Vec<usize>>> = serde_json::from_value(v["levels"].clone())?;
    for level in &levels {
        if level.len() > k || level.iter().flatten().any(|&i| i >= n) {
            return Err(IoError::Format("scheme level out of range".into()));
        }
    }
    let levels = levels.into_iter().map(|l| l.into_iter().map(NodeSet::from_iter).collect()).collect();
    Ok(IbScheme::new(n, k, levels))
}
