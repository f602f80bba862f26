//! Simulated message logs: several cascades on one graph, exported into the
//! log schema so the empirical analytics can run on them unchanged.

use crate::cascade::{run_cascade, select_seeds_ranked, CascadeError, CascadeParams, CascadeTrace, SeedPolicy};
use crate::netgen::{eigenvector_centrality, CentralityConfig, Graph};
use crate::seed::mix;
use crate::tweetlog::{export_trace, MessageLog};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub policy: SeedPolicy,
    pub seed_count: usize,
    /// `rng_seed` here is the base seed for all messages.
    pub cascade: CascadeParams,
    pub messages: usize,
    /// Message `i` gets id `<run_prefix>-<i>`.
    pub run_prefix: String,
    pub user_prefix: String,
}

/// Runs `spec.messages` independent cascades and concatenates their logs.
pub fn simulate_log(graph: &Graph, spec: &SimulationSpec) -> Result<(MessageLog, Vec<CascadeTrace>), CascadeError> {
    let scores = if spec.policy == SeedPolicy::TopCentrality {
        eigenvector_centrality(graph, &CentralityConfig::default())?
    } else {
        Vec::new()
    };
    let base = spec.cascade.rng_seed;
    let mut log = MessageLog::default();
    let mut traces = Vec::with_capacity(spec.messages);
    for i in 0..spec.messages {
        let seeds = select_seeds_ranked(graph, spec.policy, spec.seed_count, mix(base, &[i as u64, 1]), &scores)?;
        let params = CascadeParams {
            rng_seed: mix(base, &[i as u64, 2]),
            ..spec.cascade.clone()
        };
        let trace = run_cascade(graph, &seeds, &params)?;
        log.extend(export_trace(
            &trace,
            &format!("{}-{i}", spec.run_prefix),
            &spec.user_prefix,
        ));
        traces.push(trace);
    }
    Ok((log, traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{generate_ba, plant_group, GenParams};
    use crate::spreadstats::repetition_counts;

    #[test]
    fn log_matches_traces() {
        let g = generate_ba(&GenParams {
            n: 300,
            rng_seed: 1,
            ..GenParams::default()
        })
        .unwrap();
        let g = plant_group(g, 0.05, 0.2, 2);
        let spec = SimulationSpec {
            policy: SeedPolicy::RandomGroup,
            seed_count: 5,
            cascade: CascadeParams {
                p0: 0.1,
                c: 2.0,
                rng_seed: 9,
                ..CascadeParams::default()
            },
            messages: 4,
            run_prefix: "sim".into(),
            user_prefix: "u".into(),
        };
        let (log, traces) = simulate_log(&g, &spec).unwrap();
        let table = repetition_counts(&log);
        assert_eq!(table.message_count(), 4);
        for (i, t) in traces.iter().enumerate() {
            t.validate(&g).unwrap();
            assert_eq!(table.count(&format!("sim-{i}")), Some(t.exposed_count() as u64));
            let retweets = log
                .iter()
                .filter(|r| r.message_id == format!("sim-{i}") && r.is_retweet)
                .count();
            assert_eq!(retweets, t.exposed_count() - 5);
        }
        assert_eq!(simulate_log(&g, &spec).unwrap().0, log);
    }
}
