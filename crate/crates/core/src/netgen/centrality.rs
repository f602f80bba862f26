use std::cmp::Ordering;

use super::{Graph, NetgenError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralityConfig {
    /// Stop once successive iterates differ by less than this (L2 norm).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CentralityConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 1_000,
        }
    }
}

/// Eigenvector centrality by power iteration.
///
/// Iterates with `A + I` instead of `A`: the eigenvectors are the same, but
/// the shift removes the `-λ` eigenvalue of bipartite components (stars,
/// paths, trees) that would otherwise make plain power iteration oscillate.
/// The result is non-negative with unit L2 norm. Isolated nodes score 0; a
/// graph without edges yields all zeros.
pub fn eigenvector_centrality(graph: &Graph, config: &CentralityConfig) -> Result<Vec<f64>, NetgenError> {
    let n = graph.node_count();
    let active = (0..n).filter(|&u| graph.degree(u) > 0).count();
    if active == 0 {
        return Ok(vec![0.0; n]);
    }

    let init = 1.0 / (active as f64).sqrt();
    let mut x: Vec<f64> = (0..n).map(|u| if graph.degree(u) > 0 { init } else { 0.0 }).collect();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;

    for _ in 0..config.max_iter {
        for (u, slot) in next.iter_mut().enumerate() {
            *slot = x[u] + graph.neighbors(u).iter().map(|&v| x[v]).sum::<f64>();
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut next {
            *v /= norm;
        }
        residual = x.iter().zip(&next).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        std::mem::swap(&mut x, &mut next);
        if residual < config.tol {
            return Ok(x);
        }
    }
    Err(NetgenError::NoConvergence {
        iterations: config.max_iter,
        residual,
    })
}

/// Indices of the `k` largest scores; equal scores are ordered by node id.
pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l))).unwrap()
    }

    #[test]
    fn star_center_dominates() {
        let s = eigenvector_centrality(&star(3), &CentralityConfig::default()).unwrap();
        assert!(s[0] > s[1]);
        assert!((s[1] - s[2]).abs() < 1e-9 && (s[2] - s[3]).abs() < 1e-9);
        // exact: center / leaf = sqrt(3)
        assert!((s[0] / s[1] - 3f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn cycle_is_uniform() {
        let c5 = Graph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let s = eigenvector_centrality(&c5, &CentralityConfig::default()).unwrap();
        for v in s {
            assert!((v - 1.0 / 5f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn path_ratio_matches_exact_eigenvector() {
        // Adjacency of P3 has dominant eigenvector (1, sqrt2, 1) / 2.
        let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = eigenvector_centrality(&p3, &CentralityConfig::default()).unwrap();
        assert!((s[1] / s[0] - 2f64.sqrt()).abs() < 1e-6);
        assert!((s[0] - 0.5).abs() < 1e-6);
        assert!((s[1] - 2f64.sqrt() / 2.0).abs() < 1e-6);
    }

    #[test]
    fn isolated_nodes_score_zero() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let s = eigenvector_centrality(&g, &CentralityConfig::default()).unwrap();
        assert_eq!(s[3], 0.0);
        let norm: f64 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph_is_all_zero() {
        let s = eigenvector_centrality(&Graph::empty(3), &CentralityConfig::default()).unwrap();
        assert_eq!(s, vec![0.0; 3]);
    }

    #[test]
    fn non_convergence_reports_residual() {
        let cfg = CentralityConfig {
            tol: 1e-14,
            max_iter: 2,
        };
        match eigenvector_centrality(&star(6), &cfg) {
            Err(NetgenError::NoConvergence { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 0.0 && residual.is_finite());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn top_k_breaks_ties_by_id() {
        assert_eq!(top_k(&[0.5, 0.9, 0.5, 0.9], 3), vec![1, 3, 0]);
        assert_eq!(top_k(&[1.0], 0), Vec::<usize>::new());
    }
}
