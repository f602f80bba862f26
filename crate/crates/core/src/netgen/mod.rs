//! Network generation: preferential attachment, spreading-group planting,
//! eigenvector centrality and edge-list serialization.

mod centrality;
mod edgelist;
mod generate;

use std::collections::BTreeSet;

use thiserror::Error;

pub use centrality::{eigenvector_centrality, top_k, CentralityConfig};
pub use edgelist::{read_edge_list, write_edge_list};
pub use generate::{generate_ba, group_size, plant_group};

#[derive(Debug, Error)]
pub enum NetgenError {
    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),
    #[error("eigenvector centrality did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parameters for [`generate_ba`] followed by [`plant_group`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n: usize,
    /// Edges added by every node that joins after the seed clique.
    pub m_attach: usize,
    /// Fraction of nodes in the spreading group.
    pub r: f64,
    /// Probability of each missing intra-group edge being added.
    pub q_intra: f64,
    pub rng_seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n: 10_000,
            m_attach: 2,
            r: 0.0,
            q_intra: 0.1,
            rng_seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), NetgenError> {
        if self.m_attach == 0 {
            return Err(NetgenError::InvalidParams("m_attach must be positive".into()));
        }
        if self.m_attach >= self.n {
            return Err(NetgenError::InvalidParams(format!(
                "m_attach ({}) must be smaller than n ({})",
                self.m_attach, self.n
            )));
        }
        if !(0.0..1.0).contains(&self.r) {
            return Err(NetgenError::InvalidParams(format!("r = {} outside [0, 1)", self.r)));
        }
        if !(0.0..=1.0).contains(&self.q_intra) {
            return Err(NetgenError::InvalidParams(format!(
                "q_intra = {} outside [0, 1]",
                self.q_intra
            )));
        }
        Ok(())
    }
}

/// Simple undirected graph on nodes `0..n` with an optional spreading group.
///
/// Neighbor lists are kept sorted and free of duplicates and self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    group: BTreeSet<usize>,
}

impl Graph {
    /// Graph with `n` isolated nodes.
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            group: BTreeSet::new(),
        }
    }

    /// Builds a graph from an edge iterator. Self-loops and duplicates are
    /// dropped; endpoints must be below `n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, NetgenError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(NetgenError::InvalidParams(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            adjacency,
            group: BTreeSet::new(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|list| list.binary_search(&v).is_ok())
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn group_members(&self) -> &BTreeSet<usize> {
        &self.group
    }

    pub fn is_group_member(&self, node: usize) -> bool {
        self.group.contains(&node)
    }

    /// Replaces the group membership set. Ids must be valid nodes.
    pub fn set_group<I: IntoIterator<Item = usize>>(&mut self, members: I) -> Result<(), NetgenError> {
        let n = self.node_count();
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&m| m >= n) {
            return Err(NetgenError::InvalidParams(format!("group member {bad} outside 0..{n}")));
        }
        self.group = members;
        Ok(())
    }

    /// Inserts an undirected edge; returns false if it already existed or is a loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        match self.adjacency[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adjacency[u].insert(pos, v);
                let pos = self.adjacency[v].binary_search(&u).unwrap_err();
                self.adjacency[v].insert(pos, u);
                true
            }
        }
    }

    /// Checks the structural invariants; used by tests and after parsing.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.node_count();
        for (u, list) in self.adjacency.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("neighbors of {u} not strictly sorted"));
            }
            for &v in list {
                if v >= n {
                    return Err(format!("neighbor {v} of {u} out of range"));
                }
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if self.adjacency[v].binary_search(&u).is_err() {
                    return Err(format!("edge {u}-{v} not symmetric"));
                }
            }
        }
        if let Some(&m) = self.group.iter().next_back() {
            if m >= n {
                return Err(format!("group member {m} out of range"));
            }
        }
        Ok(())
    }
}
