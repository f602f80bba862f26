//! Seed selection and the retention-decay independent cascade.
//!
//! A node exposed at step `s` tries to pass the message to each unexposed
//! neighbor at every later step `t`, independently, with probability
//! `p0 / c^(t - s - 1)`. Once that probability drops below `p_floor` the
//! node is dormant for good.
//!
//! [`DecayClock::Message`] swaps the node's own age for the age of the
//! message (`t - 1`), so every holder transmits with the same, globally
//! decaying probability.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgen::{eigenvector_centrality, top_k, CentralityConfig, Graph, NetgenError};
use crate::seed::rng_from_seed;

#[derive(Debug, Error)]
pub enum CascadeError {
    #[error("invalid cascade parameters: {0}")]
    InvalidParams(String),
    #[error("spreading group has {available} members, cannot draw {requested} seeds")]
    InsufficientGroup { requested: usize, available: usize },
    #[error("cannot draw {requested} seeds from {available} nodes")]
    TooManySeeds { requested: usize, available: usize },
    #[error("seed {0} is not a node of the graph")]
    UnknownSeed(usize),
    #[error("seed set is empty")]
    NoSeeds,
    #[error("centrality ranking failed: {0}")]
    Centrality(#[from] NetgenError),
}

/// How the initial seed set is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeedPolicy {
    /// Uniform sample of all nodes.
    RandomAll,
    /// Uniform sample of the spreading group.
    RandomGroup,
    /// The highest eigenvector-centrality nodes.
    TopCentrality,
}

impl SeedPolicy {
    pub const ALL: [SeedPolicy; 3] = [
        SeedPolicy::RandomAll,
        SeedPolicy::RandomGroup,
        SeedPolicy::TopCentrality,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SeedPolicy::RandomAll => "random",
            SeedPolicy::RandomGroup => "group",
            SeedPolicy::TopCentrality => "centrality",
        }
    }
}

impl fmt::Display for SeedPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeedPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" | "random-all" | "randomall" => Ok(SeedPolicy::RandomAll),
            "group" | "random-group" | "randomgroup" => Ok(SeedPolicy::RandomGroup),
            "centrality" | "top-centrality" | "topcentrality" => Ok(SeedPolicy::TopCentrality),
            other => Err(format!("unknown seed policy '{other}' (random, group, centrality)")),
        }
    }
}

/// Picks `k` distinct seeds.
///
/// Random policies return ids in ascending order; `TopCentrality` returns
/// them by decreasing score.
pub fn select_seeds(graph: &Graph, policy: SeedPolicy, k: usize, rng_seed: u64) -> Result<Vec<usize>, CascadeError> {
    match policy {
        SeedPolicy::TopCentrality => {
            check_k(graph, k)?;
            let scores = eigenvector_centrality(graph, &CentralityConfig::default())?;
            Ok(top_k(&scores, k))
        }
        _ => select_seeds_ranked(graph, policy, k, rng_seed, &[]),
    }
}

/// Like [`select_seeds`], but reuses precomputed centrality scores for
/// `TopCentrality` so a graph shared by many runs is ranked only once.
pub fn select_seeds_ranked(
    graph: &Graph,
    policy: SeedPolicy,
    k: usize,
    rng_seed: u64,
    scores: &[f64],
) -> Result<Vec<usize>, CascadeError> {
    let n = graph.node_count();
    match policy {
        SeedPolicy::RandomAll => {
            check_k(graph, k)?;
            let mut rng = rng_from_seed(rng_seed);
            let mut seeds = index::sample(&mut rng, n, k).into_vec();
            seeds.sort_unstable();
            Ok(seeds)
        }
        SeedPolicy::RandomGroup => {
            let members: Vec<usize> = graph.group_members().iter().copied().collect();
            if k > members.len() || members.is_empty() {
                return Err(CascadeError::InsufficientGroup {
                    requested: k,
                    available: members.len(),
                });
            }
            let mut rng = rng_from_seed(rng_seed);
            let mut seeds: Vec<usize> = index::sample(&mut rng, members.len(), k)
                .into_iter()
                .map(|i| members[i])
                .collect();
            seeds.sort_unstable();
            Ok(seeds)
        }
        SeedPolicy::TopCentrality => {
            check_k(graph, k)?;
            if scores.len() != n {
                return select_seeds(graph, policy, k, rng_seed);
            }
            Ok(top_k(scores, k))
        }
    }
}

fn check_k(graph: &Graph, k: usize) -> Result<(), CascadeError> {
    if k > graph.node_count() {
        return Err(CascadeError::TooManySeeds {
            requested: k,
            available: graph.node_count(),
        });
    }
    Ok(())
}

/// Which age the retention decay is applied to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecayClock {
    /// Steps since the transmitting node was itself exposed.
    #[default]
    Node,
    /// Steps since the seeds were exposed.
    Message,
}

impl fmt::Display for DecayClock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayClock::Node => "node",
            DecayClock::Message => "message",
        })
    }
}

impl FromStr for DecayClock {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "node" => Ok(DecayClock::Node),
            "message" => Ok(DecayClock::Message),
            other => Err(format!("unknown decay clock '{other}' (node, message)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeParams {
    /// Transmission probability at age 0.
    pub p0: f64,
    /// Retention loss factor; the probability is divided by `c` every step.
    pub c: f64,
    /// Nodes whose transmission probability falls below this go dormant.
    pub p_floor: f64,
    /// Hard cap on simulated steps.
    pub max_steps: u32,
    pub clock: DecayClock,
    pub rng_seed: u64,
}

impl Default for CascadeParams {
    fn default() -> Self {
        Self {
            p0: 0.05,
            c: 3.0,
            p_floor: 1e-6,
            max_steps: 10_000,
            clock: DecayClock::Node,
            rng_seed: 0,
        }
    }
}

impl CascadeParams {
    pub fn validate(&self) -> Result<(), CascadeError> {
        if !(0.0..=1.0).contains(&self.p0) {
            return Err(CascadeError::InvalidParams(format!("p0 = {} outside [0, 1]", self.p0)));
        }
        if !self.c.is_finite() || self.c <= 1.0 {
            return Err(CascadeError::InvalidParams(format!("c = {} must exceed 1", self.c)));
        }
        if self.p0 > 0.0 && !(self.p_floor > 0.0 && self.p_floor < self.p0) {
            return Err(CascadeError::InvalidParams(format!(
                "p_floor = {} must lie in (0, p0)",
                self.p_floor
            )));
        }
        if self.max_steps == 0 {
            return Err(CascadeError::InvalidParams("max_steps must be positive".into()));
        }
        Ok(())
    }

    /// Transmission probability by age, `p(a + 1) = p(a) / c`, up to the
    /// last age whose probability is still at least `p_floor`.
    pub fn decay_schedule(&self) -> Vec<f64> {
        let mut schedule = Vec::new();
        let mut p = self.p0;
        while p > 0.0 && p >= self.p_floor {
            schedule.push(p);
            p /= self.c;
        }
        schedule
    }
}

/// First exposure of `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exposure {
    pub step: u32,
    /// Transmitting neighbor; `None` for seeds.
    pub source: Option<usize>,
    pub target: usize,
    /// The seed whose cascade reached `target`.
    pub root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeTrace {
    /// Ordered by step, then target id (seeds keep their given order).
    pub events: Vec<Exposure>,
    pub final_step: u32,
    /// Set when `max_steps` cut the run short.
    pub truncated: bool,
}

impl CascadeTrace {
    pub fn exposed_count(&self) -> usize {
        self.events.len()
    }

    pub fn seed_count(&self) -> usize {
        self.events.iter().take_while(|e| e.source.is_none()).count()
    }

    /// Replays the events and checks the trace invariants.
    pub fn validate(&self, graph: &Graph) -> Result<(), String> {
        let mut exposed_at: Vec<Option<u32>> = vec![None; graph.node_count()];
        let mut last_step = 0;
        for (i, e) in self.events.iter().enumerate() {
            if e.target >= graph.node_count() {
                return Err(format!("event {i}: unknown node {}", e.target));
            }
            if e.step < last_step {
                return Err(format!("event {i}: steps out of order"));
            }
            last_step = e.step;
            if exposed_at[e.target].is_some() {
                return Err(format!("event {i}: node {} exposed twice", e.target));
            }
            match e.source {
                None => {
                    if e.step != 0 || e.root != e.target {
                        return Err(format!("event {i}: malformed seed event"));
                    }
                }
                Some(src) => {
                    match exposed_at[src] {
                        Some(s) if s < e.step => {}
                        _ => return Err(format!("event {i}: source {src} not exposed earlier")),
                    }
                    if !graph.has_edge(src, e.target) {
                        return Err(format!("event {i}: {src} and {} are not adjacent", e.target));
                    }
                    let parent_root = self.events.iter().find(|p| p.target == src).map(|p| p.root);
                    if parent_root != Some(e.root) {
                        return Err(format!("event {i}: root not inherited from source"));
                    }
                }
            }
            exposed_at[e.target] = Some(e.step);
        }
        Ok(())
    }
}

/// Runs one cascade from `seeds`.
///
/// Steps are synchronous. When several transmitters reach the same node in
/// one step, the recorded source is chosen uniformly among them. The run
/// ends once the exposed count has not changed for two consecutive steps
/// and no node can transmit any more (every exposed node is dormant or has
/// no unexposed neighbor), or when `max_steps` is reached.
pub fn run_cascade(graph: &Graph, seeds: &[usize], params: &CascadeParams) -> Result<CascadeTrace, CascadeError> {
    params.validate()?;
    if seeds.is_empty() {
        return Err(CascadeError::NoSeeds);
    }
    let n = graph.node_count();
    let schedule = params.decay_schedule();
    let mut rng = rng_from_seed(params.rng_seed);

    let mut exposed_at: Vec<Option<u32>> = vec![None; n];
    let mut root_of: Vec<usize> = vec![usize::MAX; n];
    let mut events = Vec::new();
    for &s in seeds {
        if s >= n {
            return Err(CascadeError::UnknownSeed(s));
        }
        if exposed_at[s].is_some() {
            continue;
        }
        exposed_at[s] = Some(0);
        root_of[s] = s;
        events.push(Exposure {
            step: 0,
            source: None,
            target: s,
            root: s,
        });
    }

    // Exposed nodes that may still transmit, in exposure order.
    let mut active: Vec<usize> = events.iter().map(|e| e.target).collect();
    let mut hits: Vec<u32> = vec![0; n];
    let mut chosen: Vec<usize> = vec![0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut unchanged = 0u32;
    let mut step = 0u32;

    loop {
        if step >= params.max_steps {
            return Ok(CascadeTrace {
                events,
                final_step: step,
                truncated: true,
            });
        }
        step += 1;

        let age_at = |u: usize, step: u32| -> usize {
            match params.clock {
                DecayClock::Node => (step - 1 - exposed_at[u].unwrap_or(0)) as usize,
                DecayClock::Message => (step - 1) as usize,
            }
        };
        active.retain(|&u| {
            age_at(u, step) < schedule.len() && graph.neighbors(u).iter().any(|&v| exposed_at[v].is_none())
        });

        for &u in &active {
            let p = schedule[age_at(u, step)];
            for &v in graph.neighbors(u) {
                if exposed_at[v].is_some() || rng.gen::<f64>() >= p {
                    continue;
                }
                hits[v] += 1;
                if hits[v] == 1 {
                    chosen[v] = u;
                    touched.push(v);
                } else if rng.gen_range(0..hits[v]) == 0 {
                    chosen[v] = u;
                }
            }
        }

        touched.sort_unstable();
        for &v in &touched {
            let src = chosen[v];
            exposed_at[v] = Some(step);
            root_of[v] = root_of[src];
            hits[v] = 0;
            events.push(Exposure {
                step,
                source: Some(src),
                target: v,
                root: root_of[src],
            });
            active.push(v);
        }

        if touched.is_empty() {
            unchanged += 1;
        } else {
            unchanged = 0;
        }
        touched.clear();

        if unchanged >= 2 {
            let live = active.iter().any(|&u| {
                let next_age = match params.clock {
                    DecayClock::Node => (step - exposed_at[u].unwrap_or(0)) as usize,
                    DecayClock::Message => step as usize,
                };
                next_age < schedule.len() && graph.neighbors(u).iter().any(|&v| exposed_at[v].is_none())
            });
            if !live {
                return Ok(CascadeTrace {
                    events,
                    final_step: step,
                    truncated: false,
                });
            }
        }
    }
}
