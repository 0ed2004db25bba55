//! Swarm state and the update law shared by every optimizer.
//!
//! The engine maximizes an internal fitness equal to the negated objective
//! value, so that "larger is better" holds for every score used by the
//! attractor-selection rules.
//!
//! # Random stream contract
//!
//! Each run owns exactly one [`RngStream`]. Draws are consumed in this order:
//!
//! 1. initialization: for each particle in index order, one draw per
//!    dimension for the position;
//! 2. every iteration, local-search phase (LSEPSO only): for each particle in
//!    index order, one draw for `n` when randomized, then one draw per
//!    dimension for every trial point, neighbors visited nearest first;
//! 3. every iteration, update phase: for each particle in index order, per
//!    dimension one `R1` draw followed by one `R2` draw.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_search::{LocalSearchConfig, LsVariant};

/// A source of uniform reals in `[0, 1)`.
pub trait UniformSource {
    fn uniform(&mut self) -> f64;
}

/// Seeded, portable pseudo-random stream (ChaCha8).
#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl UniformSource for RngStream {
    fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }
}

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidConfig("bounds must have at least one dimension".into()));
        }
        for (dim, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidBounds {
                    dim,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same `[lo, hi]` interval in every one of `dim` dimensions.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    /// Narrowest side of the box.
    pub fn min_width(&self) -> f64 {
        (0..self.dim()).map(|d| self.width(d)).fold(f64::INFINITY, f64::min)
    }

    /// Euclidean length of the box diagonal.
    pub fn diagonal(&self) -> f64 {
        (0..self.dim()).map(|d| self.width(d).powi(2)).sum::<f64>().sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn clamp_in_place(&self, x: &mut [f64]) {
        for (d, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[d], self.upper[d]);
        }
    }
}

/// An objective function (minimized) together with its search box.
#[derive(Clone)]
pub struct Problem {
    name: String,
    bounds: Bounds,
    objective: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new<F>(name: impl Into<String>, bounds: Bounds, objective: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            bounds,
            objective: Arc::new(objective),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    /// Objective value (minimization orientation).
    pub fn objective(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    /// Internal fitness, the negated objective.
    pub fn fitness(&self, x: &[f64]) -> f64 {
        -(self.objective)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "pso")]
    Pso,
    #[serde(rename = "epso")]
    Epso,
    #[serde(rename = "ferpso")]
    Ferpso,
    #[serde(rename = "lsepso")]
    Lsepso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Pso, Algorithm::Epso, Algorithm::Ferpso, Algorithm::Lsepso];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pso => "pso",
            Algorithm::Epso => "epso",
            Algorithm::Ferpso => "ferpso",
            Algorithm::Lsepso => "lsepso",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "algorithm",
                name: s.to_string(),
                valid: Algorithm::ALL.map(|a| a.name()).join(", "),
            })
    }
}

/// All hyperparameters of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmConfig {
    pub population: usize,
    pub iterations: usize,
    /// Inertia weight.
    pub w: f64,
    /// Cognitive coefficient.
    pub c1: f64,
    /// Social coefficient.
    pub c2: f64,
    /// Neighbor count used by the local search.
    pub n_neighbors: usize,
    /// Per-dimension velocity limit as a fraction of the box width.
    pub vmax_fraction: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub ls_variant: LsVariant,
    /// Local-search step coefficient; `None` reuses `c1`.
    pub ls_c1: Option<f64>,
    /// Draw the neighbor count uniformly from `1..=n_neighbors` on every call.
    pub n_randomized: bool,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            population: 30,
            iterations: 60,
            w: 0.7298,
            c1: 1.49618,
            c2: 1.49618,
            n_neighbors: 3,
            vmax_fraction: 0.5,
            seed: 0,
            algorithm: Algorithm::Lsepso,
            ls_variant: LsVariant::ProseNTrials,
            ls_c1: None,
            n_randomized: false,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.population == 0 {
            return bad("population must be positive".into());
        }
        if self.iterations == 0 {
            return bad("iterations must be positive".into());
        }
        for (name, v) in [("w", self.w), ("c1", self.c1), ("c2", self.c2)] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if let Some(c) = self.ls_c1 {
            if !(c >= 0.0) || !c.is_finite() {
                return bad(format!("ls_c1 must be finite and >= 0, got {c}"));
            }
        }
        if !(self.vmax_fraction > 0.0 && self.vmax_fraction <= 1.0) {
            return bad(format!("vmax_fraction must lie in (0, 1], got {}", self.vmax_fraction));
        }
        if self.n_neighbors == 0 {
            return bad("n_neighbors must be positive".into());
        }
        if self.uses_local_search() && self.n_neighbors >= self.population {
            return Err(Error::TooManyNeighbors {
                n: self.n_neighbors,
                population: self.population,
            });
        }
        Ok(())
    }

    pub fn uses_local_search(&self) -> bool {
        self.algorithm == Algorithm::Lsepso && self.ls_variant != LsVariant::Off
    }

    pub fn local_search(&self) -> LocalSearchConfig {
        LocalSearchConfig {
            n_neighbors: self.n_neighbors,
            c1_ls: self.ls_c1.unwrap_or(self.c1),
            variant: self.ls_variant,
            n_randomized: self.n_randomized,
        }
    }

    /// Per-dimension velocity limits for `bounds`.
    pub fn vmax(&self, bounds: &Bounds) -> Vec<f64> {
        (0..bounds.dim())
            .map(|d| self.vmax_fraction * bounds.width(d))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Internal fitness at `position`.
    pub fitness: f64,
    pub pbest_position: Vec<f64>,
    pub pbest_fitness: f64,
}

impl Particle {
    /// A resting particle whose personal best is its current position.
    pub fn at(position: Vec<f64>, fitness: f64) -> Self {
        Self {
            velocity: vec![0.0; position.len()],
            pbest_position: position.clone(),
            pbest_fitness: fitness,
            position,
            fitness,
        }
    }
}

/// The particles of one run plus its objective-evaluation counters.
#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    /// Evaluations spent on initialization and position updates.
    pub main_evaluations: u64,
    /// Evaluations spent on local-search trial points.
    pub ls_evaluations: u64,
}

impl Swarm {
    pub fn new(particles: Vec<Particle>) -> Self {
        Self {
            particles,
            main_evaluations: 0,
            ls_evaluations: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn evaluations(&self) -> u64 {
        self.main_evaluations + self.ls_evaluations
    }

    /// Index of the particle with the highest personal-best fitness (first wins).
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.particles.iter().enumerate() {
            if p.pbest_fitness > self.particles[best].pbest_fitness {
                best = i;
            }
        }
        best
    }
}

pub(crate) fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    sq_distance(a, b).sqrt()
}

/// Uniform random swarm inside the problem box, at rest, evaluated once.
pub fn init_swarm(config: &SwarmConfig, problem: &Problem, rng: &mut impl UniformSource) -> Result<Swarm> {
    config.validate()?;
    let bounds = problem.bounds();
    let particles: Vec<Particle> = (0..config.population)
        .map(|_| {
            let position: Vec<f64> = (0..bounds.dim())
                .map(|d| {
                    let x = bounds.lower()[d] + rng.uniform() * bounds.width(d);
                    x.min(bounds.upper()[d])
                })
                .collect();
            let fitness = problem.fitness(&position);
            Particle::at(position, fitness)
        })
        .collect();
    let mut swarm = Swarm::new(particles);
    swarm.main_evaluations = config.population as u64;
    Ok(swarm)
}

/// `w·v + R1·c1·(pbest − x) + R2·c2·(attractor − x)`, clamped to `±vmax`.
///
/// `R1` and `R2` are fresh per dimension, drawn in that order.
pub fn update_velocity(
    particle: &Particle,
    attractor: &[f64],
    config: &SwarmConfig,
    vmax: &[f64],
    rng: &mut impl UniformSource,
) -> Vec<f64> {
    debug_assert_eq!(attractor.len(), particle.position.len());
    (0..particle.position.len())
        .map(|d| {
            let r1 = rng.uniform();
            let r2 = rng.uniform();
            let x = particle.position[d];
            let v = config.w * particle.velocity[d]
                + r1 * config.c1 * (particle.pbest_position[d] - x)
                + r2 * config.c2 * (attractor[d] - x);
            v.clamp(-vmax[d], vmax[d])
        })
        .collect()
}

/// Moves the particle by its velocity and clamps it into `bounds`.
///
/// A dimension that hit a wall has its velocity component zeroed.
pub fn step_position(particle: &mut Particle, bounds: &Bounds) {
    for d in 0..particle.position.len() {
        let moved = particle.position[d] + particle.velocity[d];
        let clamped = moved.clamp(bounds.lower()[d], bounds.upper()[d]);
        if clamped != moved {
            particle.velocity[d] = 0.0;
        }
        particle.position[d] = clamped;
    }
}

/// Replaces the personal best on strict improvement. Returns whether it did.
pub fn update_personal_best(particle: &mut Particle) -> bool {
    if particle.fitness > particle.pbest_fitness {
        particle.pbest_fitness = particle.fitness;
        particle.pbest_position.clone_from(&particle.position);
        true
    } else {
        false
    }
}
