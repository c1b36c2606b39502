use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Historical marking of a connection gene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Innovation(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Input,
    Output,
    Hidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    /// `1 / (1 + e^(-4.9 x))`
    SteepenedSigmoid,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::SteepenedSigmoid => 1.0 / (1.0 + (-4.9 * x).exp()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    pub id: NodeId,
    pub kind: NodeKind,
    pub activation: Activation,
}

impl NodeGene {
    pub fn hidden(id: NodeId) -> Self {
        NodeGene {
            id,
            kind: NodeKind::Hidden,
            activation: Activation::SteepenedSigmoid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionGene {
    pub innovation: Innovation,
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenomeError {
    #[error("expected {expected} {what} nodes, found {found}")]
    LayoutMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("node {0} appears more than once")]
    DuplicateNode(NodeId),
    #[error("innovation {0} appears more than once")]
    DuplicateInnovation(u64),
    #[error("connection {0} references a missing node")]
    DanglingConnection(u64),
    #[error("connection {0} targets an input node")]
    InputTarget(u64),
    #[error("connection {source_node}->{target_node} appears more than once")]
    DuplicateEdge {
        source_node: NodeId,
        target_node: NodeId,
    },
    #[error("connection {0} has weight outside the allowed range")]
    WeightOutOfRange(u64),
    #[error("genes are not sorted")]
    Unsorted,
}

/// A NEAT chromosome.
///
/// Node ids `0..inputs` are inputs, `inputs..inputs + outputs` are outputs,
/// and hidden nodes take ids above that. `nodes` is sorted by id and
/// `connections` by innovation number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub inputs: usize,
    pub outputs: usize,
    pub nodes: Vec<NodeGene>,
    pub connections: Vec<ConnectionGene>,
    pub fitness: f64,
}

impl Genome {
    /// Inputs and outputs only, no connections.
    pub fn minimal(inputs: usize, outputs: usize) -> Self {
        let nodes = (0..inputs + outputs)
            .map(|i| NodeGene {
                id: NodeId(i as u32),
                kind: if i < inputs {
                    NodeKind::Input
                } else {
                    NodeKind::Output
                },
                activation: if i < inputs {
                    Activation::Identity
                } else {
                    Activation::SteepenedSigmoid
                },
            })
            .collect();
        Genome {
            inputs,
            outputs,
            nodes,
            connections: Vec::new(),
            fitness: 0.0,
        }
    }

    pub fn input_id(&self, i: usize) -> NodeId {
        NodeId(i as u32)
    }

    pub fn output_id(&self, j: usize) -> NodeId {
        NodeId((self.inputs + j) as u32)
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeGene> {
        self.nodes
            .binary_search_by_key(&id, |n| n.id)
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn has_node(&self, id: NodeId) -> bool {
        self.node(id).is_some()
    }

    pub fn hidden_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Hidden)
            .count()
    }

    pub fn enabled_connections(&self) -> impl Iterator<Item = &ConnectionGene> {
        self.connections.iter().filter(|c| c.enabled)
    }

    pub fn has_edge(&self, source: NodeId, target: NodeId) -> bool {
        self.connections
            .iter()
            .any(|c| c.source == source && c.target == target)
    }

    pub fn connection(&self, innovation: Innovation) -> Option<&ConnectionGene> {
        self.connections
            .binary_search_by_key(&innovation, |c| c.innovation)
            .ok()
            .map(|i| &self.connections[i])
    }

    /// Inserts a connection, keeping innovation order. Returns false if the
    /// innovation is already present.
    pub fn insert_connection(&mut self, gene: ConnectionGene) -> bool {
        match self
            .connections
            .binary_search_by_key(&gene.innovation, |c| c.innovation)
        {
            Ok(_) => false,
            Err(at) => {
                self.connections.insert(at, gene);
                true
            }
        }
    }

    pub fn insert_node(&mut self, gene: NodeGene) -> bool {
        match self.nodes.binary_search_by_key(&gene.id, |n| n.id) {
            Ok(_) => false,
            Err(at) => {
                self.nodes.insert(at, gene);
                true
            }
        }
    }

    /// Drops hidden nodes that no connection touches.
    pub fn prune_orphans(&mut self) {
        let used: HashSet<NodeId> = self
            .connections
            .iter()
            .flat_map(|c| [c.source, c.target])
            .collect();
        self.nodes
            .retain(|n| n.kind != NodeKind::Hidden || used.contains(&n.id));
    }

    /// Structural validity: layout, sortedness, unique markings, no dangling
    /// or duplicate edges.
    pub fn validate(&self) -> Result<(), GenomeError> {
        let count = |k| self.nodes.iter().filter(|n| n.kind == k).count();
        let inputs = count(NodeKind::Input);
        if inputs != self.inputs {
            return Err(GenomeError::LayoutMismatch {
                what: "input",
                expected: self.inputs,
                found: inputs,
            });
        }
        let outputs = count(NodeKind::Output);
        if outputs != self.outputs {
            return Err(GenomeError::LayoutMismatch {
                what: "output",
                expected: self.outputs,
                found: outputs,
            });
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let expected_kind = if i < self.inputs {
                NodeKind::Input
            } else if i < self.inputs + self.outputs {
                NodeKind::Output
            } else {
                NodeKind::Hidden
            };
            if n.kind != expected_kind || (i < self.inputs + self.outputs && n.id.0 as usize != i) {
                return Err(GenomeError::Unsorted);
            }
        }
        for w in self.nodes.windows(2) {
            if w[0].id == w[1].id {
                return Err(GenomeError::DuplicateNode(w[0].id));
            }
            if w[0].id > w[1].id {
                return Err(GenomeError::Unsorted);
            }
        }
        for w in self.connections.windows(2) {
            if w[0].innovation == w[1].innovation {
                return Err(GenomeError::DuplicateInnovation(w[0].innovation.0));
            }
            if w[0].innovation > w[1].innovation {
                return Err(GenomeError::Unsorted);
            }
        }
        let mut edges = HashSet::new();
        for c in &self.connections {
            let (Some(_), Some(t)) = (self.node(c.source), self.node(c.target)) else {
                return Err(GenomeError::DanglingConnection(c.innovation.0));
            };
            if t.kind == NodeKind::Input {
                return Err(GenomeError::InputTarget(c.innovation.0));
            }
            if !edges.insert((c.source, c.target)) {
                return Err(GenomeError::DuplicateEdge {
                    source_node: c.source,
                    target_node: c.target,
                });
            }
        }
        Ok(())
    }

    pub fn validate_weights(&self, weight_range: f64) -> Result<(), GenomeError> {
        match self
            .connections
            .iter()
            .find(|c| !(c.weight.is_finite() && c.weight.abs() <= weight_range))
        {
            Some(c) => Err(GenomeError::WeightOutOfRange(c.innovation.0)),
            None => Ok(()),
        }
    }
}
