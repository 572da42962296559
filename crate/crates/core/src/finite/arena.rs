use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::FiniteError;
use crate::ptga::Owner;
use crate::rational::{parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub owner: Owner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArenaEdge {
    pub from: usize,
    pub label: String,
    pub to: usize,
    pub weight: Rational,
}

/// A finite game graph; node order is the tie-breaking order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteArena {
    nodes: Vec<Node>,
    edges: Vec<ArenaEdge>,
    out: Vec<Vec<usize>>,
}

impl FiniteArena {
    pub fn new(nodes: Vec<Node>, edges: Vec<ArenaEdge>) -> Result<Self, FiniteError> {
        let mut out = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            if e.from >= nodes.len() || e.to >= nodes.len() {
                return Err(FiniteError::BadEdge(i));
            }
            out[e.from].push(i);
        }
        if let Some(v) = out.iter().position(|o| o.is_empty()) {
            return Err(FiniteError::NoOutgoingEdge(nodes[v].id.clone()));
        }
        Ok(FiniteArena { nodes, edges, out })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[ArenaEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &ArenaEdge {
        &self.edges[e]
    }

    /// Outgoing edge indices of `v`, in declaration order.
    pub fn out(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn owner(&self, v: usize) -> Owner {
        self.nodes[v].owner
    }

    pub fn from_json(text: &str) -> Result<Self, FiniteError> {
        let raw: RawArena = serde_json::from_str(text).map_err(|e| FiniteError::Json(e.to_string()))?;
        let mut index = HashMap::new();
        let mut nodes = Vec::new();
        for n in raw.nodes {
            if index.insert(n.id.clone(), nodes.len()).is_some() {
                return Err(FiniteError::DuplicateNode(n.id));
            }
            nodes.push(Node { id: n.id, owner: n.owner });
        }
        let lookup = |id: &str| index.get(id).copied().ok_or_else(|| FiniteError::UnknownNode(id.to_string()));
        let edges = raw
            .edges
            .into_iter()
            .map(|e| {
                Ok(ArenaEdge {
                    from: lookup(&e.from)?,
                    to: lookup(&e.to)?,
                    weight: parse_rational(&e.weight).map_err(|err| FiniteError::Json(err.to_string()))?,
                    label: e.label,
                })
            })
            .collect::<Result<Vec<_>, FiniteError>>()?;
        FiniteArena::new(nodes, edges)
    }

    pub fn to_json(&self) -> String {
        let raw = RawArena {
            nodes: self.nodes.iter().map(|n| RawNode { id: n.id.clone(), owner: n.owner }).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    from: self.nodes[e.from].id.clone(),
                    label: e.label.clone(),
                    to: self.nodes[e.to].id.clone(),
                    weight: e.weight.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("plain data serializes")
    }

    /// Successor lists with weights, restricted by an optional choice per node.
    pub fn restricted(&self, choice: &[Option<usize>]) -> Vec<Vec<(usize, Rational)>> {
        (0..self.len())
            .map(|v| match choice[v] {
                Some(e) => vec![(self.edges[e].to, self.edges[e].weight.clone())],
                None => self.out[v].iter().map(|&e| (self.edges[e].to, self.edges[e].weight.clone())).collect(),
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArena {
    nodes: Vec<RawNode>,
    edges: Vec<RawEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    owner: Owner,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    from: String,
    label: String,
    to: String,
    weight: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn json_round_trip() {
        let text = r#"{"nodes":[{"id":"a","owner":"min"},{"id":"b","owner":"max"}],
            "edges":[{"from":"a","label":"go","to":"b","weight":"1/2"},
                     {"from":"b","label":"back","to":"a","weight":"-3"}]}"#;
        let a = FiniteArena::from_json(text).unwrap();
        assert_eq!(a.edge(0).weight, ratio(1, 2));
        assert_eq!(FiniteArena::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn rejects_sinks_and_bad_references() {
        let sink = r#"{"nodes":[{"id":"a","owner":"min"}],"edges":[]}"#;
        assert!(matches!(FiniteArena::from_json(sink), Err(FiniteError::NoOutgoingEdge(_))));
        let unknown = r#"{"nodes":[{"id":"a","owner":"min"}],"edges":[{"from":"a","label":"x","to":"z","weight":"0"}]}"#;
        assert!(matches!(FiniteArena::from_json(unknown), Err(FiniteError::UnknownNode(_))));
    }
}
