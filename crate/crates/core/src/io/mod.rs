//! JSON file formats for states, symmetry groups, product operators and
//! protocol trees. Party indices in files are 1-based.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row lists.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{LocalOperator, ProductOperator};
use crate::protocol::{LoccNode, LoccRound, Outcome};
use crate::scalar::Real;
use crate::seed::{make_abstract_group, GroupElement, GroupMode, StabilizerGroup, StateVector};

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub party_dims: Vec<usize>,
    pub amplitudes: Vec<JsonComplex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    pub factors: Vec<JsonMatrix>,
    #[serde(default = "unit_phase")]
    pub phase: JsonComplex,
}

fn unit_phase() -> JsonComplex {
    [1.0, 0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub party_dims: Vec<usize>,
    pub elements: Vec<ElementFile>,
}

/// A class member `g|Ψ_s⟩` given by its local factors. `seed` optionally
/// names a built-in class such as `"l-state"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductFile {
    pub party_dims: Vec<usize>,
    pub factors: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
}

/// Deserializes with the failing field path and source position in the
/// error message.
pub fn parse_json<D: DeserializeOwned>(text: &str) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let field = if path.is_empty() || path == "." { String::new() } else { format!(" at field '{path}'") };
        Error::Format(format!("{inner}{field}"))
    })
}

pub fn to_json_string<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("in-memory values serialize")
}

fn complex_from<T: Real>(z: JsonComplex) -> Result<Complex<T>> {
    if !z[0].is_finite() || !z[1].is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(Complex::new(T::lit(z[0]), T::lit(z[1])))
}

fn complex_to<T: Real>(z: Complex<T>) -> JsonComplex {
    [z.re.as_f64(), z.im.as_f64()]
}

pub fn matrix_from_json<T: Real>(m: &JsonMatrix) -> Result<LocalOperator<T>> {
    let rows = m
        .iter()
        .map(|row| row.iter().map(|&z| complex_from(z)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    LocalOperator::from_rows(&rows)
}

pub fn matrix_to_json<T: Real>(m: &LocalOperator<T>) -> JsonMatrix {
    m.rows().into_iter().map(|row| row.into_iter().map(complex_to).collect()).collect()
}

fn context(what: &str, err: Error) -> Error {
    Error::Format(format!("{what}: {err}"))
}

fn factors_from_json<T: Real>(dims: &[usize], factors: &[JsonMatrix], what: &str) -> Result<ProductOperator<T>> {
    if factors.len() != dims.len() {
        return Err(Error::Format(format!("{what}: {} factors for {} parties", factors.len(), dims.len())));
    }
    let ops = factors
        .iter()
        .enumerate()
        .map(|(p, m)| {
            let op = matrix_from_json::<T>(m).map_err(|e| context(&format!("{what}, party {}", p + 1), e))?;
            if op.dim() != dims[p] {
                return Err(Error::Format(format!(
                    "{what}, party {}: {}x{} matrix for a party of dimension {}",
                    p + 1,
                    op.dim(),
                    op.dim(),
                    dims[p]
                )));
            }
            Ok(op)
        })
        .collect::<Result<Vec<_>>>()?;
    ProductOperator::new(ops)
}

impl StateFile {
    pub fn from_state<T: Real>(s: &StateVector<T>) -> Self {
        Self {
            party_dims: s.party_dims().to_vec(),
            amplitudes: s.amplitudes().iter().map(|&z| complex_to(z)).collect(),
        }
    }

    pub fn to_state<T: Real>(&self) -> Result<StateVector<T>> {
        let amps = self.amplitudes.iter().map(|&z| complex_from(z)).collect::<Result<Vec<_>>>()?;
        StateVector::new(self.party_dims.clone(), amps)
    }
}

impl GroupFile {
    pub fn from_group<T: Real>(g: &StabilizerGroup<T>) -> Self {
        Self {
            party_dims: g.party_dims().to_vec(),
            elements: g
                .elements()
                .iter()
                .map(|e| ElementFile {
                    factors: e.operator.factors().iter().map(matrix_to_json).collect(),
                    phase: complex_to(e.phase),
                })
                .collect(),
        }
    }

    /// Builds the group after checking unitarity, identity and closure. The
    /// recorded phases are kept; stabilization is only checked once a state
    /// is attached.
    pub fn to_group<T: Real>(&self, tol: T) -> Result<StabilizerGroup<T>> {
        let mut ops = Vec::with_capacity(self.elements.len());
        let mut phases = Vec::with_capacity(self.elements.len());
        for (i, e) in self.elements.iter().enumerate() {
            ops.push(factors_from_json::<T>(&self.party_dims, &e.factors, &format!("element {}", i + 1))?);
            phases.push(complex_from::<T>(e.phase)?);
        }
        let checked = make_abstract_group(self.party_dims.clone(), ops, tol)?;
        let elements = checked
            .elements()
            .iter()
            .zip(phases)
            .map(|(e, phase)| GroupElement { operator: e.operator.clone(), phase })
            .collect();
        Ok(StabilizerGroup::from_elements(self.party_dims.clone(), elements, GroupMode::Abstract))
    }
}

impl ProductFile {
    pub fn from_operator<T: Real>(g: &ProductOperator<T>, seed: Option<&str>) -> Self {
        Self {
            party_dims: g.dims(),
            factors: g.factors().iter().map(matrix_to_json).collect(),
            seed: seed.map(str::to_string),
        }
    }

    pub fn to_operator<T: Real>(&self) -> Result<ProductOperator<T>> {
        factors_from_json(&self.party_dims, &self.factors, "operator")
    }
}

/// Serializes a protocol tree as `{"node": ...}`.
pub fn protocol_to_json<T: Real>(node: &LoccNode<T>) -> Value {
    json!({ "node": node_to_json(node) })
}

fn node_to_json<T: Real>(node: &LoccNode<T>) -> Value {
    match node {
        LoccNode::Leaf => Value::String("leaf".into()),
        LoccNode::Round(r) => {
            let outcomes: Vec<Value> = r
                .outcomes
                .iter()
                .map(|o| {
                    let corrections: Map<String, Value> =
                        o.corrections.iter().map(|(k, u)| ((k + 1).to_string(), json!(matrix_to_json(u)))).collect();
                    json!({
                        "operator": matrix_to_json(&o.operator),
                        "corrections": corrections,
                        "child": node_to_json(&o.child),
                    })
                })
                .collect();
            json!({ "party": r.party + 1, "outcomes": outcomes })
        }
    }
}

pub fn parse_protocol<T: Real>(text: &str) -> Result<LoccNode<T>> {
    let value: Value = parse_json(text)?;
    let Some(obj) = value.as_object() else {
        return Err(Error::Format("protocol file must be an object with a 'node' field".into()));
    };
    if let Some(extra) = obj.keys().find(|k| *k != "node") {
        return Err(Error::Format(format!("unknown field '{extra}' at top level")));
    }
    let node = obj.get("node").ok_or_else(|| Error::Format("missing field 'node'".into()))?;
    node_from_json(node, "node")
}

fn node_from_json<T: Real>(v: &Value, path: &str) -> Result<LoccNode<T>> {
    if v.as_str() == Some("leaf") {
        return Ok(LoccNode::Leaf);
    }
    let obj = v.as_object().ok_or_else(|| Error::Format(format!("{path}: expected \"leaf\" or a round object")))?;
    for k in obj.keys() {
        if k != "party" && k != "outcomes" {
            return Err(Error::Format(format!("{path}: unknown field '{k}'")));
        }
    }
    let party = obj
        .get("party")
        .and_then(Value::as_u64)
        .filter(|&p| p >= 1)
        .ok_or_else(|| Error::Format(format!("{path}.party: expected a 1-based party index")))?;
    let outcomes = obj
        .get("outcomes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Format(format!("{path}.outcomes: expected an array")))?;
    let outcomes = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| outcome_from_json(o, &format!("{path}.outcomes[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(LoccNode::Round(LoccRound { party: party as usize - 1, outcomes }))
}

fn matrix_field<T: Real>(v: &Value, path: &str) -> Result<LocalOperator<T>> {
    let m: JsonMatrix = serde_json::from_value(v.clone())
        .map_err(|e| Error::Format(format!("{path}: expected a matrix of [re, im] pairs ({e})")))?;
    matrix_from_json(&m).map_err(|e| context(path, e))
}

fn outcome_from_json<T: Real>(v: &Value, path: &str) -> Result<Outcome<T>> {
    let obj = v.as_object().ok_or_else(|| Error::Format(format!("{path}: expected an object")))?;
    for k in obj.keys() {
        if !matches!(k.as_str(), "operator" | "corrections" | "child") {
            return Err(Error::Format(format!("{path}: unknown field '{k}'")));
        }
    }
    let operator = matrix_field(obj.get("operator").unwrap_or(&Value::Null), &format!("{path}.operator"))?;
    let mut corrections = BTreeMap::new();
    if let Some(c) = obj.get("corrections") {
        let map = c.as_object().ok_or_else(|| Error::Format(format!("{path}.corrections: expected an object")))?;
        for (k, m) in map {
            let party: usize =
                k.parse().ok().filter(|&p: &usize| p >= 1).ok_or_else(|| {
                    Error::Format(format!("{path}.corrections: key '{k}' is not a 1-based party index"))
                })?;
            corrections.insert(party - 1, matrix_field(m, &format!("{path}.corrections.{k}"))?);
        }
    }
    let child = match obj.get("child") {
        None => LoccNode::Leaf,
        Some(c) => node_from_json(c, &format!("{path}.child"))?,
    };
    Ok(Outcome { operator, corrections, child })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::build_paper_example;
    use crate::scalar::Tolerances;

    #[test]
    fn protocol_roundtrip() {
        let ex = build_paper_example::<f64>(0.05, Tolerances::default()).unwrap();
        let text = protocol_to_json(&ex.protocol).to_string();
        let back: LoccNode<f64> = parse_protocol(&text).unwrap();
        assert_eq!(back.round_count(), 3);
        assert_eq!(back.leaf_count(), 4);
        let LoccNode::Round(r) = &back else { panic!() };
        assert_eq!(r.party, 0);
        assert!((&r.outcomes[1].operator - &ex_root_op(&ex.protocol, 1)).frobenius_norm() < 1e-15);
    }

    fn ex_root_op(node: &LoccNode<f64>, i: usize) -> LocalOperator<f64> {
        let LoccNode::Round(r) = node else { panic!() };
        r.outcomes[i].operator.clone()
    }

    #[test]
    fn protocol_errors_name_fields() {
        let err = parse_protocol::<f64>(r#"{"node": {"party": 1, "outcomes": [{"operator": [[1, 0]]}]}}"#).unwrap_err();
        assert!(err.to_string().contains("node.outcomes[0].operator"), "{err}");
        let err = parse_protocol::<f64>(r#"{"node": {"party": 0, "outcomes": []}}"#).unwrap_err();
        assert!(err.to_string().contains("node.party"), "{err}");
        let err = parse_protocol::<f64>("{\n  \"node\": \n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn state_file_errors_carry_path() {
        let err = parse_json::<StateFile>(r#"{"party_dims": [2, 2], "amplitudes": [[1, 0], [0]]}"#).unwrap_err();
        assert!(err.to_string().contains("amplitudes[1]"), "{err}");
        let err = parse_json::<StateFile>(r#"{"party_dims": [2], "amps": []}"#).unwrap_err();
        assert!(err.to_string().contains("amps"), "{err}");
    }

    #[test]
    fn group_file_keeps_phases_and_checks_unitarity() {
        let one = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]];
        let x = vec![vec![[0.0, 0.0], [1.0, 0.0]], vec![[1.0, 0.0], [0.0, 0.0]]];
        let two = vec![vec![[2.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [2.0, 0.0]]];
        let file = GroupFile {
            party_dims: vec![2, 2],
            elements: vec![
                ElementFile { factors: vec![one.clone(), one.clone()], phase: [1.0, 0.0] },
                ElementFile { factors: vec![x.clone(), x.clone()], phase: [-1.0, 0.0] },
            ],
        };
        let g = file.to_group::<f64>(1e-9).unwrap();
        assert_eq!(g.element(1).phase, Complex::new(-1.0, 0.0));
        let back = GroupFile::from_group(&g);
        assert_eq!(back, file);
        let mut bad = file.clone();
        bad.elements.push(ElementFile { factors: vec![one, two], phase: [1.0, 0.0] });
        assert_eq!(bad.to_group::<f64>(1e-9).unwrap_err().to_string(), "non-unitary factor at element 3, party 2");
    }
}
