//! Scenario files: parsing, serialization and evaluation.
//!
//! A document is a stream of JSON values. Each value is a scenario object
//! `{"kind": ..., "id"?: ..., ...}`, an array of them, or an object with a
//! `"scenarios"` array.

use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::checks;
use super::report::{Outcome, Report};
use crate::charclass::SeriesSpec;
use crate::equivariant::{infer_field, Block};
use crate::error::{Error, Result};
use crate::exactnum::{rational_from_json, rational_to_json, Modulus, Scalar};
use crate::ncseries::{Matrix, NilpotentMatrix};
use crate::par::{map_ordered, ExecMode};
use crate::variety::{multiprojective, VarietyModel};

#[derive(Clone, Debug)]
pub enum Scenario {
    Hrr { variety: VarietyModel, lines: Vec<Vec<i64>>, todd: Option<SeriesSpec> },
    GrrProjection { variety: VarietyModel, keep: Vec<usize>, line: Vec<i64> },
    GrrEmbedding { m: u32, n: u32, k: i64 },
    AtiyahBott { n: u32, blocks: Vec<Block>, k: i64 },
    EquivariantHrr { n: u32, blocks: Vec<Block>, k: i64 },
    EquivariantGrr { n: u32, blocks: Vec<Block>, component: usize, k: i64, mu: Option<Scalar> },
    DexpWords { trunc: usize },
    DexpMatrix { x: NilpotentMatrix, y: NilpotentMatrix },
    ToddConsistency { variety: VarietyModel, series: SeriesSpec, lines: Option<Vec<Vec<i64>>> },
}

#[derive(Clone, Debug)]
pub struct ScenarioEntry {
    pub id: String,
    pub scenario: Scenario,
}

impl ScenarioEntry {
    pub fn new(id: impl Into<String>, scenario: Scenario) -> Self {
        ScenarioEntry { id: id.into(), scenario }
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.scenario.to_json();
        v.as_object_mut().expect("scenarios serialize to objects").insert("id".into(), json!(self.id));
        v
    }
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Hrr { .. } => "hrr",
            Scenario::GrrProjection { .. } => "grr_projection",
            Scenario::GrrEmbedding { .. } => "grr_embedding",
            Scenario::AtiyahBott { .. } => "atiyah_bott",
            Scenario::EquivariantHrr { .. } => "equivariant_hrr",
            Scenario::EquivariantGrr { .. } => "equivariant_grr",
            Scenario::DexpWords { .. } | Scenario::DexpMatrix { .. } => "dexp",
            Scenario::ToddConsistency { .. } => "todd_consistency",
        }
    }

    pub fn run(&self) -> Result<Report> {
        match self {
            Scenario::Hrr { variety, lines, todd: None } => checks::hrr_check(variety, lines),
            Scenario::Hrr { variety, lines, todd: Some(s) } => checks::hrr_check_with(variety, lines, s),
            Scenario::GrrProjection { variety, keep, line } => checks::grr_projection_check(variety, keep, line),
            Scenario::GrrEmbedding { m, n, k } => checks::grr_embedding_check(*m, *n, *k),
            Scenario::AtiyahBott { n, blocks, k } => checks::atiyah_bott_check(*n, blocks, *k),
            Scenario::EquivariantHrr { n, blocks, k } => checks::equivariant_hrr_check(*n, blocks, *k),
            Scenario::EquivariantGrr { n, blocks, component, k, mu } => {
                checks::equivariant_grr_check(*n, blocks, *component, *k, mu.as_ref())
            }
            Scenario::DexpWords { trunc } => checks::dexp_word_check(*trunc),
            Scenario::DexpMatrix { x, y } => checks::dexp_matrix_check(x, y),
            Scenario::ToddConsistency { variety, series, lines } => {
                checks::todd_consistency_check(variety, series, lines.as_deref())
            }
        }
    }

    /// The scenario as it would appear in a file; [`parse_scenario`]
    /// reads it back.
    pub fn to_json(&self) -> Value {
        let mut v = match self {
            Scenario::Hrr { variety, lines, todd } => {
                let mut v = json!({"variety": variety_json(variety), "lines": lines});
                if let Some(s) = todd {
                    v["todd"] = series_json(s);
                }
                v
            }
            Scenario::GrrProjection { variety, keep, line } => {
                json!({"variety": variety_json(variety), "keep": keep, "line": line})
            }
            Scenario::GrrEmbedding { m, n, k } => json!({"m": m, "n": n, "k": k}),
            Scenario::AtiyahBott { n, blocks, k } | Scenario::EquivariantHrr { n, blocks, k } => {
                let mut v = json!({"n": n, "blocks": blocks_json(blocks), "k": k});
                add_block_field(&mut v, blocks);
                v
            }
            Scenario::EquivariantGrr { n, blocks, component, k, mu } => {
                let mut v = json!({"n": n, "blocks": blocks_json(blocks), "component": component, "k": k});
                if let Some(mu) = mu {
                    v["mu"] = compact_scalar(mu);
                }
                add_block_field(&mut v, blocks);
                v
            }
            Scenario::DexpWords { trunc } => json!({"N": trunc}),
            Scenario::DexpMatrix { x, y } => json!({"matrix": {
                "size": x.size(),
                "X": x.matrix().to_json(),
                "Y": y.matrix().to_json(),
            }}),
            Scenario::ToddConsistency { variety, series, lines } => {
                let mut v = json!({"variety": variety_json(variety), "series": series_json(series)});
                if let Some(ls) = lines {
                    v["lines"] = json!(ls);
                }
                v
            }
        };
        v["kind"] = json!(self.kind());
        v
    }
}

fn variety_json(x: &VarietyModel) -> Value {
    let mut v = json!({"factors": x.factors()});
    if !x.field().is_rational() {
        v["modulus"] = x.field().to_json();
    }
    v
}

fn series_json(s: &SeriesSpec) -> Value {
    match s.name() {
        "exp" | "todd" | "inv_todd" => json!({"name": s.name()}),
        _ => json!({"coeffs": s.coeffs().iter().map(rational_to_json).collect::<Vec<_>>()}),
    }
}

/// A scalar whose field is recorded elsewhere in the scenario: a rational
/// string when possible, else its bare coefficient list.
fn compact_scalar(s: &Scalar) -> Value {
    match s.as_rational() {
        Some(r) => rational_to_json(r),
        None => json!({"coeffs": s.coeffs().iter().map(rational_to_json).collect::<Vec<_>>()}),
    }
}

fn blocks_json(blocks: &[Block]) -> Value {
    Value::Array(blocks.iter().map(|b| json!({"alpha": compact_scalar(&b.alpha), "mult": b.mult})).collect())
}

fn add_block_field(v: &mut Value, blocks: &[Block]) {
    if let Some(b) = blocks.first() {
        if !b.alpha.modulus().is_rational() {
            v["modulus"] = b.alpha.modulus().to_json();
        }
    }
}

/// Serializes entries as a JSON array with one scenario per line.
pub fn document_string(entries: &[ScenarioEntry]) -> String {
    let lines: Vec<String> = entries.iter().map(|e| e.to_json().to_string()).collect();
    if lines.is_empty() {
        "[]\n".to_string()
    } else {
        format!("[\n{}\n]\n", lines.join(",\n"))
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawScenario {
    Hrr {
        variety: Value,
        line: Option<Vec<i64>>,
        lines: Option<Vec<Vec<i64>>>,
        todd: Option<Value>,
    },
    GrrProjection {
        variety: Value,
        keep: Vec<usize>,
        line: Vec<i64>,
    },
    GrrEmbedding {
        m: u32,
        n: u32,
        k: i64,
    },
    AtiyahBott {
        n: u32,
        blocks: Vec<RawBlock>,
        k: i64,
        modulus: Option<Value>,
    },
    EquivariantHrr {
        n: u32,
        blocks: Vec<RawBlock>,
        k: i64,
        modulus: Option<Value>,
    },
    EquivariantGrr {
        n: u32,
        blocks: Vec<RawBlock>,
        component: usize,
        k: i64,
        mu: Option<Value>,
        modulus: Option<Value>,
    },
    Dexp {
        #[serde(rename = "N")]
        n: Option<usize>,
        matrix: Option<RawMatrix>,
    },
    ToddConsistency {
        variety: Value,
        series: Option<Value>,
        lines: Option<Vec<Vec<i64>>>,
    },
}

#[derive(Deserialize)]
struct RawBlock {
    alpha: Value,
    #[serde(default = "one")]
    mult: u32,
}

fn one() -> u32 {
    1
}

#[derive(Deserialize)]
struct RawMatrix {
    size: Option<usize>,
    #[serde(rename = "X")]
    x: Vec<Vec<Value>>,
    #[serde(rename = "Y")]
    y: Vec<Vec<Value>>,
}

fn parse_blocks(raw: &[RawBlock], modulus: Option<&Value>, extra: Option<&Value>) -> Result<Vec<Block>> {
    let field = match modulus {
        Some(m) => Arc::new(Modulus::from_json(m)?),
        None => infer_field(raw.iter().map(|b| &b.alpha).chain(extra))?,
    };
    raw.iter().map(|b| Ok(Block::new(Scalar::from_json(&b.alpha, Some(&field))?, b.mult))).collect()
}

fn parse_matrix(rows: &[Vec<Value>], size: Option<usize>) -> Result<NilpotentMatrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(rational_from_json).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if let Some(s) = size {
        if rows.len() != s {
            return Err(Error::Parse(format!("matrix has {} rows, expected size {s}", rows.len())));
        }
    }
    NilpotentMatrix::new(Matrix::from_rows(rows)?)
}

fn resolve(raw: RawScenario) -> Result<Scenario> {
    Ok(match raw {
        RawScenario::Hrr { variety, line, lines, todd } => {
            let variety = VarietyModel::from_json(&variety)?;
            let lines = match (line, lines) {
                (Some(l), None) => vec![l],
                (None, Some(ls)) => ls,
                _ => return Err(Error::Parse("hrr needs exactly one of \"line\" or \"lines\"".into())),
            };
            let todd = todd.map(|t| SeriesSpec::from_json(&t, variety.dimension() as usize)).transpose()?;
            Scenario::Hrr { variety, lines, todd }
        }
        RawScenario::GrrProjection { variety, keep, line } => {
            Scenario::GrrProjection { variety: VarietyModel::from_json(&variety)?, keep, line }
        }
        RawScenario::GrrEmbedding { m, n, k } => Scenario::GrrEmbedding { m, n, k },
        RawScenario::AtiyahBott { n, blocks, k, modulus } => {
            Scenario::AtiyahBott { n, blocks: parse_blocks(&blocks, modulus.as_ref(), None)?, k }
        }
        RawScenario::EquivariantHrr { n, blocks, k, modulus } => {
            Scenario::EquivariantHrr { n, blocks: parse_blocks(&blocks, modulus.as_ref(), None)?, k }
        }
        RawScenario::EquivariantGrr { n, blocks, component, k, mu, modulus } => {
            let blocks = parse_blocks(&blocks, modulus.as_ref(), mu.as_ref())?;
            let field =
                blocks.first().map(|b| b.alpha.modulus().clone()).ok_or_else(|| Error::Parse("no blocks".into()))?;
            let mu = mu.map(|m| Scalar::from_json(&m, Some(&field))).transpose()?;
            Scenario::EquivariantGrr { n, blocks, component, k, mu }
        }
        RawScenario::Dexp { n: Some(trunc), matrix: None } => Scenario::DexpWords { trunc },
        RawScenario::Dexp { n: None, matrix: Some(m) } => {
            Scenario::DexpMatrix { x: parse_matrix(&m.x, m.size)?, y: parse_matrix(&m.y, m.size)? }
        }
        RawScenario::Dexp { .. } => return Err(Error::Parse("dexp needs exactly one of \"N\" or \"matrix\"".into())),
        RawScenario::ToddConsistency { variety, series, lines } => {
            let variety = VarietyModel::from_json(&variety)?;
            let d = variety.dimension() as usize;
            let series = match series {
                Some(s) => SeriesSpec::from_json(&s, d)?,
                None => SeriesSpec::todd(d),
            };
            Scenario::ToddConsistency { variety, series, lines }
        }
    })
}

/// Parses one scenario object; `default_id` is used when it has no `"id"`.
pub fn parse_scenario(v: &Value, default_id: &str) -> Result<ScenarioEntry> {
    let obj = v.as_object().ok_or_else(|| Error::Parse(format!("{default_id}: scenario must be an object")))?;
    let id = match obj.get("id") {
        None => default_id.to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    };
    let mut payload: Map<String, Value> = obj.clone();
    payload.remove("id");
    let raw: RawScenario =
        serde_json::from_value(Value::Object(payload)).map_err(|e| Error::Parse(format!("{id}: {e}")))?;
    let scenario = resolve(raw).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{id}: {msg}")),
        other => Error::Parse(format!("{id}: {other}")),
    })?;
    Ok(ScenarioEntry { id, scenario })
}

/// Parses every scenario in `text`. Scenarios without an id get
/// `"{source}#{index}"`, counting from 0 across the document.
pub fn parse_document(text: &str, source: &str) -> Result<Vec<ScenarioEntry>> {
    let mut flat = Vec::new();
    for value in serde_json::Deserializer::from_str(text).into_iter::<Value>() {
        let value = value.map_err(|e| Error::Parse(format!("{source}: {e}")))?;
        match value {
            Value::Array(items) => flat.extend(items),
            Value::Object(ref map) if map.get("kind").is_none() && map.contains_key("scenarios") => {
                match map.get("scenarios") {
                    Some(Value::Array(items)) => flat.extend(items.iter().cloned()),
                    _ => return Err(Error::Parse(format!("{source}: \"scenarios\" must be an array"))),
                }
            }
            other => flat.push(other),
        }
    }
    flat.iter().enumerate().map(|(i, v)| parse_scenario(v, &format!("{source}#{i}"))).collect()
}

pub fn evaluate(entry: &ScenarioEntry) -> Report {
    match entry.scenario.run() {
        Ok(r) => r.with_id(&entry.id),
        Err(e) => Report::errored(&entry.id, entry.scenario.kind(), &e),
    }
}

/// Evaluates every scenario; reports come back in input order.
pub fn run_all(entries: &[ScenarioEntry], mode: ExecMode) -> Vec<Report> {
    map_ordered(entries, mode, evaluate)
}

/// Evaluates in order and stops after the first report that does not pass.
pub fn run_until_failure(entries: &[ScenarioEntry]) -> Vec<Report> {
    let mut out = Vec::new();
    for e in entries {
        let r = evaluate(e);
        let stop = r.outcome() != Outcome::Passed;
        out.push(r);
        if stop {
            break;
        }
    }
    out
}

/// Shorthand used by grids and tests: `P^{n_1} x ...` over `Q`.
pub fn rational_variety(factors: &[u32]) -> VarietyModel {
    multiprojective(factors, Arc::new(Modulus::rational()))
}
