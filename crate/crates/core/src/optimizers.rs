//! Attractor selection rules and per-iteration step functions.
//!
//! Every step reads the swarm as it stood at the start of the update phase
//! to choose one attractor per particle, then moves the particles in index
//! order. The attractor replaces the global best of the classic velocity
//! update:
//!
//! * PSO: the swarm's best personal best;
//! * EPSO: the personal best exerting the strongest Coulomb-like pull
//!   `α·q_i·q_j/d²` on particle `i`'s personal best;
//! * FERPSO: the personal best with the largest fitness-Euclidean-distance
//!   ratio `α·(f(p_j) − f(x_i))/‖p_j − x_i‖`;
//! * LSEPSO: a local-search pass over the personal bests, then EPSO selection
//!   with `α = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_search::local_search_phase;
use crate::swarm::{
    distance, init_swarm, sq_distance, step_position, update_personal_best, update_velocity, Algorithm, Bounds,
    Problem, Swarm, SwarmConfig, UniformSource,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractorChoice {
    pub particle_index: usize,
    pub target_index: usize,
    /// The winning force or ratio; `-inf` when degenerate.
    pub score: f64,
    /// No admissible candidate existed (every other personal best coincides
    /// with the reference point); the particle attracts to its own pbest.
    pub degenerate: bool,
}

/// Positive "charges" derived from personal-best fitness by shifting the
/// worst one to a small positive `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeView {
    pub shifted_fitness: Vec<f64>,
}

impl ChargeView {
    pub fn from_fitness(fitness: &[f64]) -> Self {
        let (best, worst) = extremes(fitness.iter().copied());
        let delta = (1e-6 * (best - worst)).max(1e-9);
        Self {
            shifted_fitness: fitness.iter().map(|f| f - worst + delta).collect(),
        }
    }

    pub fn from_swarm(swarm: &Swarm) -> Self {
        let fitness: Vec<f64> = swarm.particles.iter().map(|p| p.pbest_fitness).collect();
        Self::from_fitness(&fitness)
    }
}

fn extremes(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), v| (hi.max(v), lo.min(v)))
}

pub fn coulomb_force(charge_i: f64, charge_j: f64, distance: f64, alpha: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::NonPositiveDistance(distance));
    }
    Ok(alpha * charge_i * charge_j / (distance * distance))
}

/// `‖s‖ / (best − worst)` with `‖s‖` the box diagonal; 1 when the population
/// is flat.
pub fn compute_alpha(bounds: &Bounds, best_fitness: f64, worst_fitness: f64) -> f64 {
    let spread = best_fitness - worst_fitness;
    if spread > 0.0 && spread.is_finite() {
        bounds.diagonal() / spread
    } else {
        1.0
    }
}

/// Alpha for the swarm's current personal bests.
pub fn swarm_alpha(swarm: &Swarm, bounds: &Bounds) -> f64 {
    let (best, worst) = extremes(swarm.particles.iter().map(|p| p.pbest_fitness));
    compute_alpha(bounds, best, worst)
}

pub fn fer_value(pbest_fitness_j: f64, current_fitness_i: f64, distance: f64, alpha: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::NonPositiveDistance(distance));
    }
    Ok(alpha * (pbest_fitness_j - current_fitness_i) / distance)
}

fn argmax_target(i: usize, size: usize, mut score: impl FnMut(usize) -> Option<f64>) -> Result<AttractorChoice> {
    if size < 2 {
        return Err(Error::SwarmTooSmall(size));
    }
    let mut best: Option<(usize, f64)> = None;
    for j in (0..size).filter(|&j| j != i) {
        if let Some(s) = score(j) {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((j, s));
            }
        }
    }
    Ok(match best {
        Some((j, s)) => AttractorChoice {
            particle_index: i,
            target_index: j,
            score: s,
            degenerate: false,
        },
        None => AttractorChoice {
            particle_index: i,
            target_index: i,
            score: f64::NEG_INFINITY,
            degenerate: true,
        },
    })
}

/// The personal best pulling hardest on particle `i`'s personal best.
pub fn select_electrostatic_target(
    i: usize,
    swarm: &Swarm,
    charges: &ChargeView,
    alpha: f64,
) -> Result<AttractorChoice> {
    let me = &swarm.particles[i].pbest_position;
    let qi = charges.shifted_fitness[i];
    argmax_target(i, swarm.len(), |j| {
        let d2 = sq_distance(me, &swarm.particles[j].pbest_position);
        (d2 > 0.0).then(|| alpha * qi * charges.shifted_fitness[j] / d2)
    })
}

/// The personal best with the largest fitness-distance ratio seen from
/// particle `i`'s current position.
pub fn select_fer_target(i: usize, swarm: &Swarm, alpha: f64) -> Result<AttractorChoice> {
    let me = &swarm.particles[i];
    argmax_target(i, swarm.len(), |j| {
        let other = &swarm.particles[j];
        let d = distance(&me.position, &other.pbest_position);
        (d > 0.0).then(|| alpha * (other.pbest_fitness - me.fitness) / d)
    })
}

/// How EPSO's α is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    /// Recomputed every iteration from the box diagonal and fitness spread.
    Scaled,
    Fixed(f64),
}

pub fn electrostatic_choices(swarm: &Swarm, bounds: &Bounds, alpha: AlphaMode) -> Result<Vec<AttractorChoice>> {
    let alpha = match alpha {
        AlphaMode::Scaled => swarm_alpha(swarm, bounds),
        AlphaMode::Fixed(a) => a,
    };
    let charges = ChargeView::from_swarm(swarm);
    (0..swarm.len())
        .map(|i| select_electrostatic_target(i, swarm, &charges, alpha))
        .collect()
}

pub fn fer_choices(swarm: &Swarm, bounds: &Bounds) -> Result<Vec<AttractorChoice>> {
    let alpha = swarm_alpha(swarm, bounds);
    (0..swarm.len()).map(|i| select_fer_target(i, swarm, alpha)).collect()
}

/// Velocity and position update for every particle toward the given
/// attractor indices, followed by evaluation and pbest bookkeeping.
fn move_swarm(
    swarm: &mut Swarm,
    targets: &[usize],
    config: &SwarmConfig,
    problem: &Problem,
    rng: &mut impl UniformSource,
) {
    let attractors: Vec<Vec<f64>> = targets
        .iter()
        .map(|&t| swarm.particles[t].pbest_position.clone())
        .collect();
    let bounds = problem.bounds();
    let vmax = config.vmax(bounds);
    for (particle, attractor) in swarm.particles.iter_mut().zip(&attractors) {
        particle.velocity = update_velocity(particle, attractor, config, &vmax, rng);
        step_position(particle, bounds);
        particle.fitness = problem.fitness(&particle.position);
        update_personal_best(particle);
    }
    swarm.main_evaluations += swarm.len() as u64;
}

fn targets_of(choices: &[AttractorChoice]) -> Vec<usize> {
    choices.iter().map(|c| c.target_index).collect()
}

fn self_targets(swarm: &Swarm) -> Vec<usize> {
    (0..swarm.len()).collect()
}

pub fn pso_step(
    swarm: &mut Swarm,
    config: &SwarmConfig,
    problem: &Problem,
    rng: &mut impl UniformSource,
) -> Result<()> {
    let g = swarm.best_index();
    let targets = vec![g; swarm.len()];
    move_swarm(swarm, &targets, config, problem, rng);
    Ok(())
}

pub fn epso_step_with_alpha(
    swarm: &mut Swarm,
    config: &SwarmConfig,
    problem: &Problem,
    rng: &mut impl UniformSource,
    alpha: AlphaMode,
) -> Result<()> {
    let targets = if swarm.len() < 2 {
        self_targets(swarm)
    } else {
        targets_of(&electrostatic_choices(swarm, problem.bounds(), alpha)?)
    };
    move_swarm(swarm, &targets, config, problem, rng);
    Ok(())
}

pub fn epso_step(
    swarm: &mut Swarm,
    config: &SwarmConfig,
    problem: &Problem,
    rng: &mut impl UniformSource,
) -> Result<()> {
    epso_step_with_alpha(swarm, config, problem, rng, AlphaMode::Scaled)
}

pub fn ferpso_step(
    swarm: &mut Swarm,
    config: &SwarmConfig,
    problem: &Problem,
    rng: &mut impl UniformSource,
) -> Result<()> {
    let targets = if swarm.len() < 2 {
        self_targets(swarm)
    } else {
        targets_of(&fer_choices(swarm, problem.bounds())?)
    };
    move_swarm(swarm, &targets, config, problem, rng);
    Ok(())
}

/// Local search over all personal bests, then EPSO selection with `α = 1`
/// and the usual update.
pub fn lsepso_step(
    swarm: &mut Swarm,
    config: &SwarmConfig,
    problem: &Problem,
    rng: &mut impl UniformSource,
) -> Result<()> {
    local_search_phase(swarm, &config.local_search(), problem, rng)?;
    epso_step_with_alpha(swarm, config, problem, rng, AlphaMode::Fixed(1.0))
}

pub fn step(swarm: &mut Swarm, config: &SwarmConfig, problem: &Problem, rng: &mut impl UniformSource) -> Result<()> {
    match config.algorithm {
        Algorithm::Pso => pso_step(swarm, config, problem, rng),
        Algorithm::Epso => epso_step(swarm, config, problem, rng),
        Algorithm::Ferpso => ferpso_step(swarm, config, problem, rng),
        Algorithm::Lsepso => lsepso_step(swarm, config, problem, rng),
    }
}

/// Initializes a swarm and runs `config.iterations` steps, calling
/// `observe(iteration, &swarm)` after each (iterations are 1-based).
pub fn run_with(
    config: &SwarmConfig,
    problem: &Problem,
    rng: &mut impl UniformSource,
    mut observe: impl FnMut(usize, &Swarm),
) -> Result<Swarm> {
    let mut swarm = init_swarm(config, problem, rng)?;
    for iteration in 1..=config.iterations {
        step(&mut swarm, config, problem, rng)?;
        observe(iteration, &swarm);
    }
    Ok(swarm)
}
