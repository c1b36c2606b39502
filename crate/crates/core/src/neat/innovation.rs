use super::genome::{Innovation, NodeId};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Numbers handed out when a connection is split by add-node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitInnovation {
    pub node: NodeId,
    pub incoming: Innovation,
    pub outgoing: Innovation,
}

/// Historical-marking bookkeeping.
///
/// Input→output edges carry fixed numbers `input * outputs + output`, so the
/// seeded population aligns regardless of which edges each genome drew. All
/// other edges and splits are numbered from shared counters. Within one
/// generation the same structural change always gets the same numbers;
/// [`reset_generation`](Self::reset_generation) forgets those caches but the
/// counters keep rising for the whole run.
///
/// The caches are not serialized: checkpoints are written between
/// generations, and the next reproduction step starts with a reset anyway.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnovationRegistry {
    inputs: usize,
    outputs: usize,
    next_innovation: u64,
    next_node: u32,
    #[serde(skip)]
    edges: HashMap<(NodeId, NodeId), Innovation>,
    #[serde(skip)]
    splits: HashMap<Innovation, SplitInnovation>,
}

impl PartialEq for InnovationRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.next_innovation == other.next_innovation
            && self.next_node == other.next_node
    }
}

impl InnovationRegistry {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        InnovationRegistry {
            inputs,
            outputs,
            next_innovation: (inputs * outputs) as u64,
            next_node: (inputs + outputs) as u32,
            edges: HashMap::new(),
            splits: HashMap::new(),
        }
    }

    /// Fixed marking of the seed edge from input `i` to output `j`.
    pub fn seed_innovation(&self, input: usize, output: usize) -> Innovation {
        Innovation((input * self.outputs + output) as u64)
    }

    fn is_seed_edge(&self, source: NodeId, target: NodeId) -> bool {
        let (s, t) = (source.0 as usize, target.0 as usize);
        s < self.inputs && t >= self.inputs && t < self.inputs + self.outputs
    }

    /// Marking for a new `source → target` connection.
    pub fn connection(&mut self, source: NodeId, target: NodeId) -> Innovation {
        if self.is_seed_edge(source, target) {
            return self.seed_innovation(source.0 as usize, target.0 as usize - self.inputs);
        }
        if let Some(&innov) = self.edges.get(&(source, target)) {
            return innov;
        }
        let innov = self.bump_innovation();
        self.edges.insert((source, target), innov);
        innov
    }

    /// Node id and markings for splitting `connection` (`source → target`).
    pub fn split(
        &mut self,
        connection: Innovation,
        source: NodeId,
        target: NodeId,
    ) -> SplitInnovation {
        if let Some(&s) = self.splits.get(&connection) {
            return s;
        }
        let node = NodeId(self.next_node);
        self.next_node += 1;
        let incoming = self.bump_innovation();
        let outgoing = self.bump_innovation();
        self.edges.insert((source, node), incoming);
        self.edges.insert((node, target), outgoing);
        let s = SplitInnovation {
            node,
            incoming,
            outgoing,
        };
        self.splits.insert(connection, s);
        s
    }

    pub fn reset_generation(&mut self) {
        self.edges.clear();
        self.splits.clear();
    }

    pub fn next_innovation(&self) -> u64 {
        self.next_innovation
    }

    pub fn next_node(&self) -> u32 {
        self.next_node
    }

    fn bump_innovation(&mut self) -> Innovation {
        let i = Innovation(self.next_innovation);
        self.next_innovation += 1;
        i
    }
}
