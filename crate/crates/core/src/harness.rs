//! Seeded, replicated experiments with on-disk artifacts.
//!
//! Run `k` of an experiment uses seed `base_seed + k` (wrapping), so any
//! single run can be reproduced in isolation. Runs execute concurrently but
//! results are reduced in run-index order and every artifact is a pure
//! function of the experiment spec.
//!
//! Within a run all uniforms come from one ChaCha8 stream seeded with the
//! run seed, consumed in this order:
//!
//! 1. initialization: for each particle, one draw per dimension;
//! 2. each iteration, local search (LSEPSO only): for each particle in index
//!    order, the neighbor count if randomized, then one draw per dimension
//!    for every trial point (nearest neighbor first);
//! 3. each iteration, the update: for each particle in index order and each
//!    dimension, `r1` then `r2`.
//!
//! Artifacts written to the output directory:
//!
//! * `summary.json`: spec, match criteria, catalog metadata, aggregated row
//!   and per-run counters;
//! * `results.csv`: the aggregated row;
//! * `candidates_run<k>.csv`: candidate optima of run `k` and the catalog
//!   entry each matched;
//! * `trajectory_run<k>.csv` (opt-in): `run,iteration,particle,x1,x2,f`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::BenchmarkId;
use crate::catalog::{build_catalog, OptimaCatalog, OracleParams};
use crate::error::{Error, Result};
use crate::local_search::LsVariant;
use crate::metrics::{
    aggregate, extract_candidates, match_candidates, Candidate, ExperimentResult, MatchCriteria, RunLabel,
};
use crate::optimizers::run_with;
use crate::swarm::{Algorithm, RngStream, Swarm, SwarmConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub function: BenchmarkId,
    /// Hyperparameters shared by every run; `swarm.seed` is ignored in favor
    /// of the per-run derived seed.
    pub swarm: SwarmConfig,
    pub runs: usize,
    pub base_seed: u64,
    pub position_epsilon: Option<f64>,
    pub fitness_epsilon: Option<f64>,
    pub denominator_override: Option<usize>,
    pub trajectory: bool,
    /// Trajectory sampling stride; iteration 1 and every multiple of the
    /// stride are recorded.
    pub stride: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            function: BenchmarkId::F1SixHumpCamel,
            swarm: SwarmConfig::default(),
            runs: 10,
            base_seed: 0,
            position_epsilon: None,
            fitness_epsilon: None,
            denominator_override: None,
            trajectory: false,
            stride: 1,
        }
    }
}

impl ExperimentSpec {
    pub fn seed_for_run(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be positive".into()));
        }
        if self.stride == 0 {
            return Err(Error::InvalidConfig("stride must be positive".into()));
        }
        if self.denominator_override == Some(0) {
            return Err(Error::InvalidConfig("denominator override must be positive".into()));
        }
        self.swarm.validate()
    }

    fn label(&self) -> RunLabel {
        RunLabel {
            function: self.function,
            algorithm: self.swarm.algorithm,
            population: self.swarm.population,
            iterations: self.swarm.iterations,
        }
    }

    pub fn samples_iteration(&self, iteration: usize) -> bool {
        iteration == 1 || iteration % self.stride == 0
    }
}

/// Objective evaluations a run is expected to spend, when that number is
/// fixed in advance (it is not when the neighbor count is randomized).
pub fn expected_evaluations(config: &SwarmConfig) -> Option<u64> {
    let pop = config.population as u64;
    let iters = config.iterations as u64;
    let main = pop * (1 + iters);
    if !config.uses_local_search() || config.population < 2 {
        return Some(main);
    }
    if config.n_randomized && config.ls_variant == LsVariant::ProseNTrials {
        return None;
    }
    let per_call = config.local_search().evaluations_per_call(config.n_neighbors);
    Some(main + pop * iters * per_call)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub run: usize,
    pub iteration: usize,
    pub particle: usize,
    pub position: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub found: usize,
    pub candidates: usize,
    pub main_evaluations: u64,
    pub ls_evaluations: u64,
    pub total_evaluations: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub swarm: Swarm,
    pub candidates: Vec<Candidate>,
    /// `(candidate index, catalog entry index)`.
    pub matches: Vec<(usize, usize)>,
    pub trajectory: Vec<TrajectoryRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogInfo {
    pub entries: usize,
    pub global: usize,
    pub grid_step: f64,
    pub position_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub spec: ExperimentSpec,
    pub criteria: MatchCriteria,
    pub catalog: CatalogInfo,
    pub result: ExperimentResult,
    pub expected_evaluations_per_run: Option<u64>,
    pub runs: Vec<RunSummary>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub summary: ExperimentSummary,
    pub outcomes: Vec<RunOutcome>,
}

/// Match criteria for `spec`, defaults filled from the function box and
/// catalog.
pub fn criteria_for(spec: &ExperimentSpec, catalog: &OptimaCatalog) -> Result<MatchCriteria> {
    let defaults = MatchCriteria::defaults_for(&spec.function.bounds(), catalog);
    MatchCriteria::new(
        spec.position_epsilon.unwrap_or(defaults.position_epsilon),
        spec.fitness_epsilon.unwrap_or(defaults.fitness_epsilon),
    )
}

/// Default-parameter catalog, loaded from `cache_dir/<fn>.json` when present
/// and compatible, otherwise built (and cached if a directory was given).
pub fn catalog_for(function: BenchmarkId, cache_dir: Option<&Path>) -> Result<OptimaCatalog> {
    let params = OracleParams::defaults_for(&function.bounds());
    let path = cache_dir.map(|d| d.join(format!("{}.json", function.key())));
    if let Some(path) = path.as_deref().filter(|p| p.exists()) {
        if let Ok(cached) = OptimaCatalog::load(path) {
            if cached.function == function && cached.params() == params {
                return Ok(cached);
            }
        }
    }
    let catalog = build_catalog(function, params.grid_step, params.position_tolerance)?;
    if let Some(path) = path {
        catalog.save(&path)?;
    }
    Ok(catalog)
}

/// One seeded run: optimize, reduce to candidates, match.
pub fn run_single(
    spec: &ExperimentSpec,
    catalog: &OptimaCatalog,
    criteria: &MatchCriteria,
    run: usize,
) -> Result<RunOutcome> {
    let seed = spec.seed_for_run(run);
    let config = SwarmConfig {
        seed,
        ..spec.swarm.clone()
    };
    let problem = spec.function.problem();
    let mut rng = RngStream::new(seed);
    let mut trajectory = Vec::new();
    let swarm = run_with(&config, &problem, &mut rng, |iteration, swarm| {
        if spec.trajectory && spec.samples_iteration(iteration) {
            trajectory.extend(swarm.particles.iter().enumerate().map(|(k, p)| TrajectoryRecord {
                run,
                iteration,
                particle: k,
                position: p.position.clone(),
                value: -p.fitness,
            }));
        }
    })?;
    let candidates = extract_candidates(&swarm, criteria.position_epsilon);
    let matches = match_candidates(&candidates, catalog, criteria);
    Ok(RunOutcome {
        summary: RunSummary {
            run,
            seed,
            found: matches.len(),
            candidates: candidates.len(),
            main_evaluations: swarm.main_evaluations,
            ls_evaluations: swarm.ls_evaluations,
            total_evaluations: swarm.evaluations(),
        },
        swarm,
        candidates,
        matches,
        trajectory,
    })
}

/// Runs every replication against an already built catalog without touching
/// the file system.
pub fn run_replicates(spec: &ExperimentSpec, catalog: &OptimaCatalog) -> Result<ExperimentReport> {
    spec.validate()?;
    if catalog.function != spec.function {
        return Err(Error::InvalidConfig(format!(
            "catalog is for {}, experiment is on {}",
            catalog.function, spec.function
        )));
    }
    let criteria = criteria_for(spec, catalog)?;
    let outcomes: Vec<RunOutcome> = (0..spec.runs)
        .into_par_iter()
        .map(|run| run_single(spec, catalog, &criteria, run))
        .collect::<Result<_>>()?;
    let found: Vec<usize> = outcomes.iter().map(|o| o.summary.found).collect();
    let denominator = spec.denominator_override.unwrap_or(catalog.len()).max(1);
    let result = aggregate(spec.label(), found, denominator)?;
    let summary = ExperimentSummary {
        spec: spec.clone(),
        criteria,
        catalog: CatalogInfo {
            entries: catalog.len(),
            global: catalog.global_count(),
            grid_step: catalog.grid_step,
            position_tolerance: catalog.position_tolerance,
        },
        result,
        expected_evaluations_per_run: expected_evaluations(&spec.swarm),
        runs: outcomes.iter().map(|o| o.summary.clone()).collect(),
    };
    Ok(ExperimentReport { summary, outcomes })
}

/// Runs the experiment and, when `out_dir` is given, writes its artifacts.
pub fn run_experiment(
    spec: &ExperimentSpec,
    catalog_cache: Option<&Path>,
    out_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    spec.validate()?;
    let catalog = catalog_for(spec.function, catalog_cache)?;
    let report = run_replicates(spec, &catalog)?;
    if let Some(dir) = out_dir {
        write_artifacts(&report, &catalog, dir)?;
    }
    Ok(report)
}

fn write_file(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

pub fn write_artifacts(report: &ExperimentReport, catalog: &OptimaCatalog, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json = serde_json::to_string_pretty(&report.summary).map_err(|e| Error::json(dir.join("summary.json"), e))?;
    write_file(dir.join("summary.json"), &(json + "\n"))?;
    write_file(
        dir.join("results.csv"),
        &format_results_csv(std::slice::from_ref(&report.summary.result)),
    )?;
    for outcome in &report.outcomes {
        let run = outcome.summary.run;
        write_file(
            dir.join(format!("candidates_run{run}.csv")),
            &format_candidates_csv(outcome, catalog),
        )?;
        if report.summary.spec.trajectory {
            write_file(
                dir.join(format!("trajectory_run{run}.csv")),
                &format_trajectory_csv(&outcome.trajectory, report.summary.spec.function.dimension()),
            )?;
        }
    }
    Ok(())
}

pub fn format_trajectory_csv(records: &[TrajectoryRecord], dim: usize) -> String {
    let mut out = String::from("run,iteration,particle");
    for d in 1..=dim {
        let _ = write!(out, ",x{d}");
    }
    out.push_str(",f\n");
    for r in records {
        let _ = write!(out, "{},{},{}", r.run, r.iteration, r.particle);
        for x in &r.position {
            let _ = write!(out, ",{x}");
        }
        let _ = writeln!(out, ",{}", r.value);
    }
    out
}

fn format_candidates_csv(outcome: &RunOutcome, catalog: &OptimaCatalog) -> String {
    let dim = catalog.entries.first().map_or(2, |e| e.position.len());
    let mut out = String::new();
    for d in 1..=dim {
        let _ = write!(out, "x{d},");
    }
    out.push_str("f,matched_entry\n");
    for (ci, c) in outcome.candidates.iter().enumerate() {
        for x in &c.position {
            let _ = write!(out, "{x},");
        }
        let matched = outcome
            .matches
            .iter()
            .find(|(m, _)| *m == ci)
            .map(|(_, e)| e.to_string())
            .unwrap_or_default();
        let _ = writeln!(out, "{},{matched}", c.value);
    }
    out
}

pub fn format_results_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from("function,algorithm,particles,iterations,runs,anof,peak_ratio,denominator\n");
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.function, r.algorithm, r.population, r.iterations, r.runs, r.anof, r.peak_ratio, r.denominator
        );
    }
    out
}

/// Human-readable ANOF / peak-ratio table.
pub fn format_table(results: &[ExperimentResult]) -> String {
    let mut out = format!(
        "{:<8} {:<8} {:>9} {:>10} {:>5} {:>9} {:>11} {:>6}\n",
        "function", "algo", "particles", "iterations", "runs", "ANOF", "peak_ratio", "denom"
    );
    for r in results {
        let _ = writeln!(
            out,
            "{:<8} {:<8} {:>9} {:>10} {:>5} {:>9.2} {:>11.6} {:>6}",
            r.function.key(),
            r.algorithm.name(),
            r.population,
            r.iterations,
            r.runs,
            r.anof,
            r.peak_ratio,
            r.denominator
        );
    }
    out
}

pub fn load_summary(path: &Path) -> Result<ExperimentSummary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}

/// Finds every `summary.json` below `root` (sorted by path) and
/// re-aggregates its per-run counts, optionally with a new denominator.
pub fn reaggregate(root: &Path, denominator_override: Option<usize>) -> Result<Vec<ExperimentResult>> {
    let mut paths = Vec::new();
    collect_summaries(root, &mut paths)?;
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let s = load_summary(p)?;
            let denominator = denominator_override.unwrap_or(s.result.denominator);
            aggregate(s.spec.label(), s.result.found_per_run.clone(), denominator)
        })
        .collect()
}

fn collect_summaries(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    if dir.is_file() {
        out.push(dir.to_path_buf());
        return Ok(());
    }
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_summaries(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == "summary.json") {
            out.push(path);
        }
    }
    Ok(())
}

/// Shorthand used by tests and examples.
pub fn spec(
    function: BenchmarkId,
    algorithm: Algorithm,
    population: usize,
    iterations: usize,
    runs: usize,
) -> ExperimentSpec {
    ExperimentSpec {
        function,
        swarm: SwarmConfig {
            population,
            iterations,
            algorithm,
            ..SwarmConfig::default()
        },
        runs,
        ..ExperimentSpec::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_follow_base_plus_run() {
        let s = ExperimentSpec {
            base_seed: u64::MAX,
            ..ExperimentSpec::default()
        };
        assert_eq!(s.seed_for_run(0), u64::MAX);
        assert_eq!(s.seed_for_run(1), 0);
    }

    #[test]
    fn stride_sampling() {
        let s = ExperimentSpec {
            stride: 5,
            ..ExperimentSpec::default()
        };
        let sampled: Vec<usize> = (1..=20).filter(|&t| s.samples_iteration(t)).collect();
        assert_eq!(sampled, vec![1, 5, 10, 15, 20]);
    }

    #[test]
    fn expected_evaluation_formula() {
        let mut c = SwarmConfig {
            population: 400,
            iterations: 20,
            n_neighbors: 3,
            ..SwarmConfig::default()
        };
        assert_eq!(expected_evaluations(&c), Some(400 * 21 + 400 * 20 * 3));
        c.ls_variant = LsVariant::PseudocodeBestNeighbor;
        assert_eq!(expected_evaluations(&c), Some(400 * 21 + 400 * 20));
        c.algorithm = Algorithm::Epso;
        assert_eq!(expected_evaluations(&c), Some(400 * 21));
        c.algorithm = Algorithm::Lsepso;
        c.ls_variant = LsVariant::ProseNTrials;
        c.n_randomized = true;
        assert_eq!(expected_evaluations(&c), None);
    }

    #[test]
    fn trajectory_header() {
        let rec = TrajectoryRecord {
            run: 0,
            iteration: 1,
            particle: 2,
            position: vec![0.5, -1.0],
            value: 3.25,
        };
        assert_eq!(
            format_trajectory_csv(&[rec], 2),
            "run,iteration,particle,x1,x2,f\n0,1,2,0.5,-1,3.25\n"
        );
    }

    #[test]
    fn invalid_specs() {
        assert!(ExperimentSpec {
            runs: 0,
            ..ExperimentSpec::default()
        }
        .validate()
        .is_err());
        assert!(ExperimentSpec {
            stride: 0,
            ..ExperimentSpec::default()
        }
        .validate()
        .is_err());
    }
}
