use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use lsepso::catalog::{build_catalog, OracleParams};
use lsepso::harness::{expected_evaluations, format_table, reaggregate, run_experiment, ExperimentSpec};
use lsepso::{Algorithm, BenchmarkId, LsVariant, SwarmConfig};

/// Replicated niching-PSO experiments on multimodal benchmarks.
#[derive(Debug, Parser)]
#[command(name = "lsepso", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run seeded replications of one optimizer on one benchmark.
    Run(RunArgs),
    /// Build the reference catalog of a benchmark's minima.
    Catalog(CatalogArgs),
    /// Re-aggregate stored experiment summaries.
    Report(ReportArgs),
}

#[derive(Debug, Args, Default)]
struct RunArgs {
    /// Key-value config file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// f1..f5 or six-hump-camel, ackley, rastrigin, shubert, dejong5.
    #[arg(long)]
    function: Option<String>,
    /// pso, epso, ferpso or lsepso.
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; run k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_neighbors: Option<usize>,
    /// prose, pseudocode or off.
    #[arg(long)]
    ls_variant: Option<String>,
    /// Draw the neighbor count uniformly in 1..=n on every local-search call.
    #[arg(long)]
    n_randomized: bool,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    ls_c1: Option<f64>,
    #[arg(long)]
    vmax_fraction: Option<f64>,
    #[arg(long)]
    position_epsilon: Option<f64>,
    #[arg(long)]
    fitness_epsilon: Option<f64>,
    #[arg(long)]
    denominator_override: Option<usize>,
    /// Write per-run trajectory files.
    #[arg(long)]
    trajectory: bool,
    /// Trajectory sampling stride (iteration 1 and every multiple).
    #[arg(long)]
    stride: Option<usize>,
    /// Directory for catalog JSON files (reused across runs).
    #[arg(long)]
    catalog_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Same keys as the `run` flags, kebab-case.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    function: Option<String>,
    algorithm: Option<String>,
    particles: Option<usize>,
    iterations: Option<usize>,
    runs: Option<usize>,
    seed: Option<u64>,
    n_neighbors: Option<usize>,
    ls_variant: Option<String>,
    n_randomized: Option<bool>,
    w: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
    ls_c1: Option<f64>,
    vmax_fraction: Option<f64>,
    position_epsilon: Option<f64>,
    fitness_epsilon: Option<f64>,
    denominator_override: Option<usize>,
    trajectory: Option<bool>,
    stride: Option<usize>,
    catalog_dir: Option<PathBuf>,
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CatalogArgs {
    #[arg(long)]
    function: String,
    /// Grid spacing of the seeding pass (default: narrowest side / 500).
    #[arg(long)]
    grid_step: Option<f64>,
    /// Merge radius of converged points (default: narrowest side / 200).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output JSON path (default: catalogs/<function>.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// A summary.json file or a directory searched recursively.
    dir: PathBuf,
    #[arg(long)]
    denominator_override: Option<usize>,
}

fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn build_spec(args: &RunArgs, file: &FileConfig) -> Result<(ExperimentSpec, Option<PathBuf>, Option<PathBuf>)> {
    let base = ExperimentSpec::default();
    let defaults = SwarmConfig::default();

    let function: BenchmarkId = match args.function.as_ref().or(file.function.as_ref()) {
        Some(s) => s.parse()?,
        None => base.function,
    };
    let algorithm: Algorithm = match args.algorithm.as_ref().or(file.algorithm.as_ref()) {
        Some(s) => s.parse()?,
        None => defaults.algorithm,
    };
    let ls_variant: LsVariant = match args.ls_variant.as_ref().or(file.ls_variant.as_ref()) {
        Some(s) => s.parse()?,
        None => defaults.ls_variant,
    };

    let swarm = SwarmConfig {
        population: args.particles.or(file.particles).unwrap_or(defaults.population),
        iterations: args.iterations.or(file.iterations).unwrap_or(defaults.iterations),
        w: args.w.or(file.w).unwrap_or(defaults.w),
        c1: args.c1.or(file.c1).unwrap_or(defaults.c1),
        c2: args.c2.or(file.c2).unwrap_or(defaults.c2),
        n_neighbors: args.n_neighbors.or(file.n_neighbors).unwrap_or(defaults.n_neighbors),
        vmax_fraction: args
            .vmax_fraction
            .or(file.vmax_fraction)
            .unwrap_or(defaults.vmax_fraction),
        seed: 0,
        algorithm,
        ls_variant,
        ls_c1: args.ls_c1.or(file.ls_c1).or(defaults.ls_c1),
        n_randomized: args.n_randomized || file.n_randomized.unwrap_or(defaults.n_randomized),
    };
    let spec = ExperimentSpec {
        function,
        swarm,
        runs: args.runs.or(file.runs).unwrap_or(base.runs),
        base_seed: args.seed.or(file.seed).unwrap_or(base.base_seed),
        position_epsilon: args.position_epsilon.or(file.position_epsilon),
        fitness_epsilon: args.fitness_epsilon.or(file.fitness_epsilon),
        denominator_override: args.denominator_override.or(file.denominator_override),
        trajectory: args.trajectory || file.trajectory.unwrap_or(false),
        stride: args.stride.or(file.stride).unwrap_or(base.stride),
    };
    let catalog_dir = args.catalog_dir.clone().or_else(|| file.catalog_dir.clone());
    let out = args.out.clone().or_else(|| file.out.clone());
    Ok((spec, catalog_dir, out))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };
    let (spec, catalog_dir, out) = build_spec(&args, &file)?;
    let report = run_experiment(&spec, catalog_dir.as_deref(), out.as_deref())?;
    let summary = &report.summary;

    print!("{}", format_table(std::slice::from_ref(&summary.result)));
    println!(
        "found per run: {:?}  (catalog: {} entries, {} global; match: position {}, value {})",
        summary.result.found_per_run,
        summary.catalog.entries,
        summary.catalog.global,
        summary.criteria.position_epsilon,
        summary.criteria.fitness_epsilon
    );
    if let Some(first) = summary.runs.first() {
        println!(
            "evaluations per run: main {} + local search {} = {}{}",
            first.main_evaluations,
            first.ls_evaluations,
            first.total_evaluations,
            expected_evaluations(&spec.swarm)
                .map(|e| format!(" (expected {e})"))
                .unwrap_or_default()
        );
    }
    if let Some(dir) = out {
        println!("artifacts written to {}", dir.display());
    }
    Ok(())
}

fn cmd_catalog(args: CatalogArgs) -> Result<()> {
    let function: BenchmarkId = args.function.parse()?;
    let defaults = OracleParams::defaults_for(&function.bounds());
    let grid_step = args.grid_step.unwrap_or(defaults.grid_step);
    let tolerance = args.tolerance.unwrap_or(defaults.position_tolerance);
    let catalog = build_catalog(function, grid_step, tolerance)?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from("catalogs").join(format!("{}.json", function.key())));
    catalog.save(&out)?;
    println!(
        "{}: {} optima ({} global, {} local), minimum {}; grid step {}, tolerance {} -> {}",
        function,
        catalog.len(),
        catalog.global_count(),
        catalog.len() - catalog.global_count(),
        catalog.min_value(),
        grid_step,
        tolerance,
        out.display()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let results = reaggregate(&args.dir, args.denominator_override)?;
    if results.is_empty() {
        bail!("no summary.json found under {}", args.dir.display());
    }
    print!("{}", format_table(&results));
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Catalog(args) => cmd_catalog(args),
        Command::Report(args) => cmd_report(args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("function = \"f5\"\nparticles = 400\nruns = 3\n").unwrap();
        let args = RunArgs {
            particles: Some(50),
            ..RunArgs::default()
        };
        let (spec, _, _) = build_spec(&args, &file).unwrap();
        assert_eq!(spec.function, BenchmarkId::F5DeJong5);
        assert_eq!(spec.swarm.population, 50);
        assert_eq!(spec.runs, 3);
        assert_eq!(spec.swarm.iterations, SwarmConfig::default().iterations);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("particle = 3\n").is_err());
    }

    #[test]
    fn bad_names_list_valid_values() {
        let args = RunArgs {
            algorithm: Some("spso".into()),
            ..RunArgs::default()
        };
        let err = build_spec(&args, &FileConfig::default()).unwrap_err().to_string();
        assert!(err.contains("pso, epso, ferpso, lsepso"), "{err}");
    }
}
