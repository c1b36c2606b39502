//! Phenotype evaluation.
//!
//! Enabled connections are classified once with a depth-first search from
//! the nodes in id order: an edge into a node that is still on the DFS stack
//! closes a cycle and is treated as recurrent, reading the source's value
//! from the previous activation. Everything else is evaluated in topological
//! order within the same activation. Node state starts at zero.

use super::genome::{Activation, Genome, NodeKind};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy)]
struct Link {
    source: usize,
    weight: f64,
    recurrent: bool,
}

#[derive(Debug, Clone)]
pub struct Network {
    inputs: usize,
    outputs: usize,
    activations: Vec<Activation>,
    incoming: Vec<Vec<Link>>,
    order: Vec<usize>,
    values: Vec<f64>,
    previous: Vec<f64>,
}

impl Network {
    pub fn from_genome(genome: &Genome) -> Self {
        let index: HashMap<_, _> = genome
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect();
        let n = genome.nodes.len();
        let mut outgoing: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for c in genome.enabled_connections() {
            if let (Some(&s), Some(&t)) = (index.get(&c.source), index.get(&c.target)) {
                outgoing[s].push((t, c.weight));
            }
        }

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            OnStack,
            Done,
        }
        let mut mark = vec![Mark::New; n];
        let mut postorder = Vec::with_capacity(n);
        let mut incoming: Vec<Vec<Link>> = vec![Vec::new(); n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            // Iterative DFS: (node, next outgoing edge to examine).
            let mut stack = vec![(root, 0usize)];
            mark[root] = Mark::OnStack;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(&(target, weight)) = outgoing[node].get(*next) {
                    *next += 1;
                    let recurrent = mark[target] == Mark::OnStack;
                    incoming[target].push(Link {
                        source: node,
                        weight,
                        recurrent,
                    });
                    if mark[target] == Mark::New {
                        mark[target] = Mark::OnStack;
                        stack.push((target, 0));
                    }
                } else {
                    mark[node] = Mark::Done;
                    postorder.push(node);
                    stack.pop();
                }
            }
        }
        let order = postorder
            .into_iter()
            .rev()
            .filter(|&i| genome.nodes[i].kind != NodeKind::Input)
            .collect();

        Network {
            inputs: genome.inputs,
            outputs: genome.outputs,
            activations: genome.nodes.iter().map(|n| n.activation).collect(),
            incoming,
            order,
            values: vec![0.0; n],
            previous: vec![0.0; n],
        }
    }

    pub fn input_count(&self) -> usize {
        self.inputs
    }

    pub fn output_count(&self) -> usize {
        self.outputs
    }

    pub fn has_recurrence(&self) -> bool {
        self.incoming.iter().flatten().any(|l| l.recurrent)
    }

    /// Clears recurrent state.
    pub fn reset(&mut self) {
        self.values.fill(0.0);
        self.previous.fill(0.0);
    }

    /// One activation pass. `inputs` must have `input_count()` entries;
    /// missing entries read as zero.
    pub fn activate(&mut self, inputs: &[f64]) -> &[f64] {
        self.previous.copy_from_slice(&self.values);
        for i in 0..self.inputs {
            self.values[i] = inputs.get(i).copied().unwrap_or(0.0);
        }
        for &node in &self.order {
            let mut sum = 0.0;
            for link in &self.incoming[node] {
                let v = if link.recurrent {
                    self.previous[link.source]
                } else {
                    self.values[link.source]
                };
                sum += link.weight * v;
            }
            self.values[node] = self.activations[node].apply(sum);
        }
        &self.values[self.inputs..self.inputs + self.outputs]
    }
}

/// Single activation of a fresh network built from `genome`.
pub fn activate_once(genome: &Genome, inputs: &[f64]) -> Vec<f64> {
    Network::from_genome(genome).activate(inputs).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neat::genome::{ConnectionGene, Innovation, NodeGene, NodeId};

    fn conn(innov: u64, s: u32, t: u32, w: f64) -> ConnectionGene {
        ConnectionGene {
            innovation: Innovation(innov),
            source: NodeId(s),
            target: NodeId(t),
            weight: w,
            enabled: true,
        }
    }

    fn sigmoid(x: f64) -> f64 {
        1.0 / (1.0 + (-4.9 * x).exp())
    }

    #[test]
    fn disconnected_outputs_read_half() {
        let g = Genome::minimal(40, 3);
        assert_eq!(activate_once(&g, &[1.0; 40]), vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn zero_weight_connection_reads_half() {
        let mut g = Genome::minimal(40, 3);
        g.insert_connection(conn(2, 0, 42, 0.0));
        for x in [0.0, 0.3, 1.0] {
            let mut inp = [0.0; 40];
            inp[0] = x;
            assert_eq!(activate_once(&g, &inp)[2], 0.5);
        }
    }

    #[test]
    fn hand_traced_two_connection_network() {
        // in0 --1.5--> h3 --(-2.0)--> out2,  in1 unused.
        let mut g = Genome::minimal(2, 1);
        g.insert_node(NodeGene::hidden(NodeId(3)));
        g.insert_connection(conn(10, 0, 3, 1.5));
        g.insert_connection(conn(11, 3, 2, -2.0));
        let out = activate_once(&g, &[0.4, 0.9]);
        // h = sigmoid(0.6) = 0.9497887..., out = sigmoid(-1.8995774...) = 0.0000906939...
        let h = 1.0 / (1.0 + (-4.9f64 * 0.6).exp());
        assert!((h - 0.949_788_726_8).abs() < 1e-10);
        let expected = 1.0 / (1.0 + (4.9 * 2.0 * h).exp());
        assert!((out[0] - expected).abs() < 1e-15);
        assert!((out[0] - 9.069_392_15e-5).abs() < 1e-12);
    }

    #[test]
    fn disabled_connections_are_ignored() {
        let mut g = Genome::minimal(1, 1);
        let mut c = conn(0, 0, 1, 3.0);
        c.enabled = false;
        g.insert_connection(c);
        assert_eq!(activate_once(&g, &[1.0]), vec![0.5]);
    }

    #[test]
    fn cycle_uses_previous_tick() {
        // in0 -> out1 (w=1), out1 -> h2 (w=1), h2 -> out1 (w=1): a cycle through out1.
        let mut g = Genome::minimal(1, 1);
        g.insert_node(NodeGene::hidden(NodeId(2)));
        g.insert_connection(conn(0, 0, 1, 1.0));
        g.insert_connection(conn(5, 1, 2, 1.0));
        g.insert_connection(conn(6, 2, 1, 1.0));
        let mut net = Network::from_genome(&g);
        assert!(net.has_recurrence());
        // DFS from in0 reaches out1, then h2; h2 -> out1 is the back edge.
        let t1 = net.activate(&[1.0])[0];
        let h1 = sigmoid(t1);
        assert_eq!(t1, sigmoid(1.0));
        let t2 = net.activate(&[1.0])[0];
        assert!((t2 - sigmoid(1.0 + h1)).abs() < 1e-15);
        net.reset();
        assert_eq!(net.activate(&[1.0])[0], t1);
    }

    #[test]
    fn self_loop_is_recurrent() {
        let mut g = Genome::minimal(1, 1);
        g.insert_connection(conn(0, 0, 1, 0.5));
        g.insert_connection(conn(1, 1, 1, 1.0));
        let mut net = Network::from_genome(&g);
        let a = net.activate(&[1.0])[0];
        assert_eq!(a, sigmoid(0.5));
        let b = net.activate(&[1.0])[0];
        assert!((b - sigmoid(0.5 + a)).abs() < 1e-15);
    }
}
