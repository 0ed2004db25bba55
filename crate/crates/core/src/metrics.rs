//! Peak counting: reduce a final swarm to distinct candidate optima, match
//! them against a reference catalog and aggregate replicated runs into the
//! average number of optima found (ANOF) and the peak ratio.

use serde::{Deserialize, Serialize};

use crate::benchmarks::BenchmarkId;
use crate::catalog::OptimaCatalog;
use crate::error::{Error, Result};
use crate::swarm::{distance, Algorithm, Bounds, Swarm};

/// Default position radius as a fraction of the narrowest box side.
pub const DEFAULT_POSITION_FRACTION: f64 = 0.05;
/// Default value slack as a fraction of the catalog's value range.
pub const DEFAULT_FITNESS_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchCriteria {
    pub position_epsilon: f64,
    pub fitness_epsilon: f64,
}

impl MatchCriteria {
    pub fn new(position_epsilon: f64, fitness_epsilon: f64) -> Result<Self> {
        if !(position_epsilon > 0.0) || !(fitness_epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "match epsilons must be positive (position {position_epsilon}, fitness {fitness_epsilon})"
            )));
        }
        Ok(Self {
            position_epsilon,
            fitness_epsilon,
        })
    }

    pub fn defaults_for(bounds: &Bounds, catalog: &OptimaCatalog) -> Self {
        let range = catalog.max_value() - catalog.min_value();
        let fitness_epsilon = if range > 0.0 {
            DEFAULT_FITNESS_FRACTION * range
        } else {
            DEFAULT_FITNESS_FRACTION * catalog.min_value().abs().max(1.0)
        };
        Self {
            position_epsilon: DEFAULT_POSITION_FRACTION * bounds.min_width(),
            fitness_epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub position: Vec<f64>,
    /// Objective value (minimization orientation).
    pub value: f64,
}

/// Greedy niche reduction over the final personal bests: fittest first, a
/// pbest is kept iff it lies farther than `position_epsilon` from every
/// candidate kept before it.
pub fn extract_candidates(swarm: &Swarm, position_epsilon: f64) -> Vec<Candidate> {
    let mut order: Vec<usize> = (0..swarm.len()).collect();
    order.sort_by(|&a, &b| {
        swarm.particles[b]
            .pbest_fitness
            .total_cmp(&swarm.particles[a].pbest_fitness)
            .then(a.cmp(&b))
    });
    let mut kept: Vec<Candidate> = Vec::new();
    for i in order {
        let p = &swarm.particles[i];
        if kept
            .iter()
            .all(|c| distance(&c.position, &p.pbest_position) > position_epsilon)
        {
            kept.push(Candidate {
                position: p.pbest_position.clone(),
                value: -p.pbest_fitness,
            });
        }
    }
    kept
}

/// `(candidate index, catalog entry index)` pairs. Each candidate is tested
/// only against its nearest entry; each entry is claimed by the first
/// candidate that satisfies both tolerances.
pub fn match_candidates(
    candidates: &[Candidate],
    catalog: &OptimaCatalog,
    criteria: &MatchCriteria,
) -> Vec<(usize, usize)> {
    let mut claimed = vec![false; catalog.len()];
    let mut pairs = Vec::new();
    if catalog.is_empty() {
        return pairs;
    }
    for (ci, c) in candidates.iter().enumerate() {
        let (ei, d) = catalog
            .entries
            .iter()
            .enumerate()
            .map(|(k, e)| (k, distance(&c.position, &e.position)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("catalog is non-empty");
        let entry = &catalog.entries[ei];
        if !claimed[ei] && d <= criteria.position_epsilon && (c.value - entry.value).abs() <= criteria.fitness_epsilon {
            claimed[ei] = true;
            pairs.push((ci, ei));
        }
    }
    pairs
}

pub fn count_found_optima(candidates: &[Candidate], catalog: &OptimaCatalog, criteria: &MatchCriteria) -> usize {
    match_candidates(candidates, catalog, criteria).len()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn peak_ratio(anof: f64, denominator: usize) -> f64 {
    anof / denominator as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub function: BenchmarkId,
    pub algorithm: Algorithm,
    pub population: usize,
    pub iterations: usize,
    pub runs: usize,
    pub found_per_run: Vec<usize>,
    pub anof: f64,
    pub peak_ratio: f64,
    pub denominator: usize,
}

/// Identifies the experiment a set of run counts belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunLabel {
    pub function: BenchmarkId,
    pub algorithm: Algorithm,
    pub population: usize,
    pub iterations: usize,
}

pub fn aggregate(label: RunLabel, found_per_run: Vec<usize>, denominator: usize) -> Result<ExperimentResult> {
    if found_per_run.is_empty() {
        return Err(Error::InvalidConfig("cannot aggregate zero runs".into()));
    }
    if denominator == 0 {
        return Err(Error::InvalidConfig("denominator must be positive".into()));
    }
    if let Some(&k) = found_per_run.iter().find(|&&k| k > denominator) {
        return Err(Error::InvalidConfig(format!(
            "run found {k} optima, more than the denominator {denominator}"
        )));
    }
    let as_real: Vec<f64> = found_per_run.iter().map(|&k| k as f64).collect();
    let anof = mean(&as_real);
    Ok(ExperimentResult {
        function: label.function,
        algorithm: label.algorithm,
        population: label.population,
        iterations: label.iterations,
        runs: found_per_run.len(),
        found_per_run,
        anof,
        peak_ratio: peak_ratio(anof, denominator),
        denominator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{CatalogEntry, OptimumKind, CATALOG_FORMAT_VERSION};
    use crate::swarm::Particle;

    fn label() -> RunLabel {
        RunLabel {
            function: BenchmarkId::F1SixHumpCamel,
            algorithm: Algorithm::Ferpso,
            population: 30,
            iterations: 60,
        }
    }

    fn catalog(points: &[(f64, f64, f64)]) -> OptimaCatalog {
        OptimaCatalog {
            version: CATALOG_FORMAT_VERSION,
            function: BenchmarkId::F1SixHumpCamel,
            grid_step: 0.01,
            position_tolerance: 0.01,
            entries: points
                .iter()
                .map(|&(x, y, v)| CatalogEntry {
                    position: vec![x, y],
                    value: v,
                    kind: OptimumKind::Local,
                })
                .collect(),
        }
    }

    fn swarm_of(points: &[(f64, f64, f64)]) -> Swarm {
        Swarm::new(points.iter().map(|&(x, y, v)| Particle::at(vec![x, y], -v)).collect())
    }

    #[test]
    fn collapsed_swarm_yields_one_candidate() {
        let swarm = swarm_of(&[(0.0, 0.0, 3.0), (0.01, 0.0, 1.0), (0.0, 0.02, 2.0)]);
        let c = extract_candidates(&swarm, 0.1);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].value, 1.0);
        assert_eq!(c[0].position, vec![0.01, 0.0]);
    }

    #[test]
    fn two_clusters_two_candidates() {
        let swarm = swarm_of(&[(0.0, 0.0, 1.0), (0.01, 0.0, 1.5), (5.0, 5.0, 2.0), (5.0, 5.01, 2.5)]);
        assert_eq!(extract_candidates(&swarm, 0.1).len(), 2);
    }

    #[test]
    fn exact_hits_count_everything() {
        let pts = [(0.0, 0.0, 1.0), (1.0, 0.0, 2.0), (0.0, 1.0, 3.0)];
        let cat = catalog(&pts);
        let swarm = swarm_of(&pts);
        let criteria = MatchCriteria::new(0.1, 0.1).unwrap();
        let cands = extract_candidates(&swarm, 0.1);
        assert_eq!(count_found_optima(&cands, &cat, &criteria), 3);
        assert_eq!(count_found_optima(&[], &cat, &criteria), 0);
    }

    #[test]
    fn value_slack_is_enforced() {
        let cat = catalog(&[(0.0, 0.0, 1.0)]);
        let criteria = MatchCriteria::new(0.1, 0.1).unwrap();
        let near_but_wrong = [Candidate {
            position: vec![0.0, 0.0],
            value: 1.5,
        }];
        assert_eq!(count_found_optima(&near_but_wrong, &cat, &criteria), 0);
    }

    #[test]
    fn entry_counted_once() {
        let cat = catalog(&[(0.0, 0.0, 1.0)]);
        let criteria = MatchCriteria::new(0.5, 0.5).unwrap();
        let cands = vec![
            Candidate {
                position: vec![0.1, 0.0],
                value: 1.0,
            },
            Candidate {
                position: vec![-0.1, 0.0],
                value: 1.0,
            },
        ];
        assert_eq!(match_candidates(&cands, &cat, &criteria), vec![(0, 0)]);
    }

    #[test]
    fn aggregate_ferpso_row() {
        // 21 optima over ten runs.
        let r = aggregate(label(), vec![2, 2, 2, 2, 2, 2, 2, 2, 2, 3], 6).unwrap();
        assert!((r.anof - 2.1).abs() < 1e-12);
        assert!((r.peak_ratio - 0.35).abs() < 1e-12);
        assert_eq!(r.runs, 10);
    }

    #[test]
    fn aggregate_constant_runs() {
        let r = aggregate(label(), vec![4; 7], 6).unwrap();
        assert_eq!(r.anof, 4.0);
        assert_eq!(r.peak_ratio * 6.0, r.anof);
    }

    #[test]
    fn aggregate_rejects_bad_input() {
        assert!(aggregate(label(), vec![], 6).is_err());
        assert!(aggregate(label(), vec![1], 0).is_err());
        assert!(aggregate(label(), vec![7], 6).is_err());
    }

    #[test]
    fn criteria_must_be_positive() {
        assert!(MatchCriteria::new(0.0, 1.0).is_err());
        assert!(MatchCriteria::new(1.0, -1.0).is_err());
    }
}
