//! JSON problem/result/conditions file schemas. All exact numbers travel
//! as expression-grammar strings (never floats), so files round-trip
//! losslessly and reruns are byte-identical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use bispec::darboux::BoundsOverride;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextText {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointsText {
    pub x_point: String,
    pub y_point: String,
    /// "sym" or "inf"
    pub x_mode: String,
    pub y_mode: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub context: ContextText,
    /// Transforming operator in the context dialect; absent = trivial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    pub endpoints: EndpointsText,
    pub l_target: usize,
    pub m_target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds_override: Option<BoundsOverride>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairText {
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemText {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformReport {
    pub u: String,
    pub p: String,
    pub q: String,
    pub d1: usize,
    pub d2: usize,
    pub unit: String,
    pub f_monic: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultFile {
    pub problem: ProblemFile,
    pub transform: TransformReport,
    pub dimension: usize,
    pub system: SystemText,
    pub positive_order_guaranteed: Option<bool>,
    pub basis: Vec<PairText>,
    pub nonconstant_witness: Option<PairText>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub point: String,
    pub coeffs: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionsFile {
    pub conditions: Vec<ConditionEntry>,
}
