use rand::seq::index;
use rand::Rng;

use super::{GenParams, Graph, NetgenError};
use crate::seed::rng_from_seed;

/// Preferential-attachment graph.
///
/// Starts from a complete graph on `m_attach + 1` nodes. Every later node
/// connects to `m_attach` distinct existing nodes, each picked with
/// probability proportional to its current degree (sampling without
/// replacement, rejecting repeats). `r` and `q_intra` are ignored here; see
/// [`plant_group`].
pub fn generate_ba(params: &GenParams) -> Result<Graph, NetgenError> {
    params.validate()?;
    let n = params.n;
    let m = params.m_attach;
    let mut rng = rng_from_seed(params.rng_seed);

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    // Each edge contributes both endpoints, so a uniform draw from this list
    // is a degree-proportional draw over nodes.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * (m * (m + 1) / 2 + (n - m - 1) * m));

    for u in 0..=m {
        for v in (u + 1)..=m {
            adjacency[u].push(v);
            adjacency[v].push(u);
            endpoints.push(u);
            endpoints.push(v);
        }
    }

    let mut targets: Vec<usize> = Vec::with_capacity(m);
    for new in (m + 1)..n {
        targets.clear();
        while targets.len() < m {
            let candidate = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&candidate) {
                targets.push(candidate);
            }
        }
        for &t in &targets {
            adjacency[new].push(t);
            adjacency[t].push(new);
            endpoints.push(new);
            endpoints.push(t);
        }
    }

    Graph::from_edges(
        n,
        adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v))),
    )
}

/// `⌈n·r⌉`, ignoring floating-point noise just above an integer.
pub fn group_size(n: usize, r: f64) -> usize {
    let x = n as f64 * r;
    let nearest = x.round();
    let k = if (x - nearest).abs() < 1e-9 { nearest } else { x.ceil() };
    (k.max(0.0) as usize).min(n)
}

/// Marks `⌈n·r⌉` uniformly chosen nodes as the spreading group and overlays
/// an Erdős–Rényi graph with edge probability `q_intra` on them.
///
/// Existing edges are kept; only missing member pairs can gain an edge.
pub fn plant_group(mut graph: Graph, r: f64, q_intra: f64, rng_seed: u64) -> Graph {
    let n = graph.node_count();
    let k = group_size(n, r);
    if k == 0 {
        graph.group.clear();
        return graph;
    }
    let mut rng = rng_from_seed(rng_seed);
    let mut members = index::sample(&mut rng, n, k).into_vec();
    members.sort_unstable();

    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            if !graph.has_edge(u, v) && rng.gen::<f64>() < q_intra {
                graph.add_edge(u, v);
            }
        }
    }
    graph.group = members.into_iter().collect();
    graph
}
