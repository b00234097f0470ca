//! Canonical JSON form of a threshold system:
//!
//! ```text
//! {"n":3,"padlocks":3,"circuit":{"t":"thr","m":2,"ch":[{"t":"lock","id":0},...]},"keys":[[0],[1],[2]]}
//! ```
//!
//! Circuits are written as trees; shared gates are repeated at each use and
//! re-interned when parsed.

use serde::{Deserialize, Serialize};

use super::circuit::{CircuitBuilder, DeviceCircuit, Gate, NodeId, PadlockId};
use super::system::{KeyDistribution, ThresholdSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t", deny_unknown_fields)]
pub enum NodeDoc {
    #[serde(rename = "lock")]
    Lock { id: u32 },
    #[serde(rename = "thr")]
    Threshold { m: u32, ch: Vec<NodeDoc> },
    #[serde(rename = "wthr")]
    Weighted {
        #[serde(rename = "W")]
        required: u32,
        w: Vec<u32>,
        ch: Vec<NodeDoc>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub n: usize,
    pub padlocks: u32,
    pub circuit: NodeDoc,
    pub keys: Vec<Vec<u32>>,
}

impl DeviceCircuit {
    pub fn to_doc(&self) -> NodeDoc {
        self.node_doc(self.root())
    }

    fn node_doc(&self, id: NodeId) -> NodeDoc {
        match self.gate(id) {
            Gate::Lock(p) => NodeDoc::Lock { id: p.0 },
            Gate::Threshold { required, children } => NodeDoc::Threshold {
                m: *required,
                ch: children.iter().map(|c| self.node_doc(*c)).collect(),
            },
            Gate::Weighted {
                required,
                weights,
                children,
            } => NodeDoc::Weighted {
                required: *required,
                w: weights.clone(),
                ch: children.iter().map(|c| self.node_doc(*c)).collect(),
            },
        }
    }

    pub fn from_doc(doc: &NodeDoc, padlocks: u32) -> Result<DeviceCircuit> {
        let mut b = CircuitBuilder::new(padlocks);
        let root = build_node(&mut b, doc, "circuit")?;
        Ok(b.finish(root))
    }
}

fn build_node(b: &mut CircuitBuilder, doc: &NodeDoc, path: &str) -> Result<NodeId> {
    let located = |e: Error| match e {
        Error::Structure(message) => Error::Parse {
            path: path.to_string(),
            message,
        },
        other => other,
    };
    match doc {
        NodeDoc::Lock { id } => b.lock(PadlockId(*id)).map_err(located),
        NodeDoc::Threshold { m, ch } => {
            let children = ch
                .iter()
                .enumerate()
                .map(|(i, c)| build_node(b, c, &format!("{path}.ch[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            b.threshold(*m as usize, children).map_err(located)
        }
        NodeDoc::Weighted { required, w, ch } => {
            let children = ch
                .iter()
                .enumerate()
                .map(|(i, c)| build_node(b, c, &format!("{path}.ch[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            b.weighted(*required, w.clone(), children).map_err(located)
        }
    }
}

impl ThresholdSystem {
    pub fn to_doc(&self) -> SystemDoc {
        SystemDoc {
            n: self.participants(),
            padlocks: self.padlock_count() as u32,
            circuit: self.circuit().to_doc(),
            keys: self
                .keys()
                .iter()
                .map(|ks| ks.iter().map(|k| k.0).collect())
                .collect(),
        }
    }

    pub fn from_doc(doc: &SystemDoc) -> Result<ThresholdSystem> {
        if doc.keys.len() != doc.n {
            return Err(Error::Parse {
                path: "keys".into(),
                message: format!("{} key lists for n = {}", doc.keys.len(), doc.n),
            });
        }
        let circuit = DeviceCircuit::from_doc(&doc.circuit, doc.padlocks)?;
        let keys = KeyDistribution::from_lists(doc.keys.iter().map(|k| k.iter().copied()));
        ThresholdSystem::new(circuit, keys).map_err(|e| match e {
            Error::Structure(message) => Error::Parse {
                path: "keys".into(),
                message,
            },
            other => other,
        })
    }

    /// Canonical compact JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("system documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<ThresholdSystem> {
        let doc: SystemDoc = parse_json(text)?;
        ThresholdSystem::from_doc(&doc)
    }
}

/// Deserializes `text`, reporting the JSON path of the first offending value.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_OF_THREE: &str = r#"{"n":3,"padlocks":3,"circuit":{"t":"thr","m":2,"ch":[{"t":"lock","id":0},{"t":"lock","id":1},{"t":"lock","id":2}]},"keys":[[0],[1],[2]]}"#;

    #[test]
    fn canonical_round_trip() {
        let s = ThresholdSystem::from_json(TWO_OF_THREE).unwrap();
        assert_eq!(s.to_json(), TWO_OF_THREE);
    }

    #[test]
    fn weighted_round_trip() {
        let text = r#"{"n":2,"padlocks":2,"circuit":{"t":"wthr","W":2,"w":[2,1],"ch":[{"t":"lock","id":0},{"t":"lock","id":1}]},"keys":[[0],[1]]}"#;
        assert_eq!(ThresholdSystem::from_json(text).unwrap().to_json(), text);
    }

    #[test]
    fn malformed_input_names_path() {
        let bad = TWO_OF_THREE.replace(r#""m":2"#, r#""m":"two""#);
        match ThresholdSystem::from_json(&bad) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "circuit"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = TWO_OF_THREE.replace(r#"{"t":"lock","id":2}"#, r#"{"t":"lock","id":7}"#);
        match ThresholdSystem::from_json(&bad) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "circuit.ch[2]"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = TWO_OF_THREE.replace("[[0],[1],[2]]", "[[0],[1],[\"x\"]]");
        match ThresholdSystem::from_json(&bad) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "keys[2][0]"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
