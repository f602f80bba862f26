use cascadelab::netgen::{
    eigenvector_centrality, generate_ba, group_size, plant_group, top_k, CentralityConfig, GenParams, Graph,
};
use cascadelab::seed::mix;
use cascadelab::spreadstats::fit_power_law_samples;
use proptest::prelude::*;

fn ba(n: usize, m_attach: usize, seed: u64) -> Graph {
    generate_ba(&GenParams {
        n,
        m_attach,
        r: 0.0,
        q_intra: 0.0,
        rng_seed: seed,
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_graphs_are_simple_and_sized(n in 4usize..300, m in 1usize..4, seed: u64) {
        prop_assume!(n > m);
        let g = ba(n, m, seed);
        prop_assert!(g.check_invariants().is_ok());
        prop_assert_eq!(g.node_count(), n);
        prop_assert_eq!(g.edge_count(), m * (m + 1) / 2 + (n - m - 1) * m);
        prop_assert!(g.degrees().iter().all(|&d| d >= m));
    }

    #[test]
    fn planting_only_adds_member_edges(n in 10usize..200, r in 0.0f64..0.5, q in 0.0f64..=1.0, seed: u64) {
        let base = ba(n, 2, seed);
        let planted = plant_group(base.clone(), r, q, seed ^ 1);
        prop_assert!(planted.check_invariants().is_ok());
        prop_assert_eq!(planted.group_members().len(), group_size(n, r));
        prop_assert!(group_size(n, r) as f64 >= n as f64 * r - 1e-9);
        for (u, v) in base.edges() {
            prop_assert!(planted.has_edge(u, v));
        }
        for (u, v) in planted.edges() {
            if !base.has_edge(u, v) {
                prop_assert!(planted.is_group_member(u) && planted.is_group_member(v));
            }
        }
    }

    #[test]
    fn generation_is_deterministic(n in 4usize..200, seed: u64) {
        let a = plant_group(ba(n, 2, seed), 0.1, 0.3, seed);
        let b = plant_group(ba(n, 2, seed), 0.1, 0.3, seed);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn degree_exponent_near_three() {
    let mut sum = 0.0;
    for rep in 0..10 {
        let g = ba(10_000, 2, mix(31, &[rep]));
        let degrees: Vec<u64> = g.degrees().into_iter().map(|d| d as u64).collect();
        sum += fit_power_law_samples(&degrees, 6, 300).unwrap().alpha;
    }
    let alpha = sum / 10.0;
    assert!((2.5..=3.5).contains(&alpha), "alpha {alpha}");
}

#[test]
fn overlay_density_matches_binomial() {
    // 100 members; each missing member pair gains an edge with probability 0.1.
    let reps = 20;
    let (mut added, mut expected, mut variance) = (0.0, 0.0, 0.0);
    for rep in 0..reps {
        let base = ba(10_000, 2, mix(5, &[rep]));
        let planted = plant_group(base.clone(), 0.01, 0.1, mix(6, &[rep]));
        let members: Vec<usize> = planted.group_members().iter().copied().collect();
        assert_eq!(members.len(), 100);
        let mut open_pairs = 0usize;
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                if !base.has_edge(u, v) {
                    open_pairs += 1;
                }
            }
        }
        added += (planted.edge_count() - base.edge_count()) as f64;
        expected += 0.1 * open_pairs as f64;
        variance += 0.1 * 0.9 * open_pairs as f64;
    }
    assert!(
        (added - expected).abs() <= 3.0 * variance.sqrt(),
        "added {added}, expected {expected}"
    );
    let per_member = 2.0 * added / (100.0 * reps as f64);
    assert!((per_member - 9.9).abs() < 0.5, "mean added degree {per_member}");
}

#[test]
fn members_have_higher_mean_degree() {
    let g = plant_group(ba(10_000, 2, 8), 0.03, 0.1, 9);
    let (mut inside, mut outside) = ((0usize, 0usize), (0usize, 0usize));
    for v in 0..g.node_count() {
        let slot = if g.is_group_member(v) {
            &mut inside
        } else {
            &mut outside
        };
        slot.0 += g.degree(v);
        slot.1 += 1;
    }
    let mean_in = inside.0 as f64 / inside.1 as f64;
    let mean_out = outside.0 as f64 / outside.1 as f64;
    assert!(mean_in > mean_out + 20.0, "{mean_in} vs {mean_out}");
}

/// Cyclic Jacobi eigenvalue iteration for a small symmetric matrix; returns
/// the eigenvector of the largest eigenvalue.
fn jacobi_principal(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (row_p, row_q) = (a[p].clone(), a[q].clone());
                for k in 0..n {
                    a[p][k] = c * row_p[k] - s * row_q[k];
                    a[q][k] = s * row_p[k] + c * row_q[k];
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let top = (0..n).max_by(|&i, &j| a[i][i].total_cmp(&a[j][j])).unwrap();
    let mut x: Vec<f64> = v.iter().map(|row| row[top]).collect();
    let sign = if x.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let norm = x.iter().map(|y| y * y).sum::<f64>().sqrt();
    x.iter_mut().for_each(|y| *y *= sign / norm);
    x
}

fn connected_graph() -> impl Strategy<Value = Graph> {
    (3usize..=8).prop_flat_map(|n| {
        let tree = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n), 0..12);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut edges: Vec<(usize, usize)> = tree
                .iter()
                .enumerate()
                .map(|(i, ix)| (i + 1, ix.index(i + 1)))
                .collect();
            edges.extend(extra);
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn centrality_matches_exact_eigenvector(g in connected_graph()) {
        let n = g.node_count();
        let mut a = vec![vec![0.0; n]; n];
        for (u, v) in g.edges() {
            a[u][v] = 1.0;
            a[v][u] = 1.0;
        }
        let exact = jacobi_principal(a);
        let cfg = CentralityConfig { tol: 1e-12, max_iter: 100_000 };
        let got = eigenvector_centrality(&g, &cfg).unwrap();
        for (x, y) in got.iter().zip(&exact) {
            prop_assert!((x - y).abs() < 1e-5, "{:?} vs {:?}", got, exact);
        }
    }

    #[test]
    fn centrality_follows_relabelling(g in connected_graph(), shuffle_seed: u64) {
        use rand::seq::SliceRandom;
        let n = g.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut cascadelab::seed::rng_from_seed(shuffle_seed));
        let relabelled = Graph::from_edges(n, g.edges().map(|(u, v)| (perm[u], perm[v]))).unwrap();
        let cfg = CentralityConfig::default();
        let a = eigenvector_centrality(&g, &cfg).unwrap();
        let b = eigenvector_centrality(&relabelled, &cfg).unwrap();
        for v in 0..n {
            prop_assert!((a[v] - b[perm[v]]).abs() < 1e-6);
        }
        let top = top_k(&a, n);
        for w in top.windows(2) {
            prop_assert!(a[w[0]] >= a[w[1]]);
        }
    }
}
