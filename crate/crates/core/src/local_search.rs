//! Personal-best improvement by trial points placed along the lines joining a
//! particle's personal best to those of its nearest neighbors.
//!
//! For a neighbor at least as fit as the particle the trial point moves
//! toward it, `t[d] = p[d] + c·r·(q[d] − p[d])`; for a less fit neighbor it
//! moves away, `t[d] = p[d] + c·r·(p[d] − q[d])`, with a fresh `r` per
//! dimension.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::swarm::{sq_distance, Bounds, Problem, Swarm, UniformSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsVariant {
    /// One trial point per neighbor; the best trial competes with the pbest.
    ProseNTrials,
    /// A single trial point toward (or away from) the fittest of the `n`
    /// nearest neighbors.
    PseudocodeBestNeighbor,
    Off,
}

impl LsVariant {
    pub const ALL: [LsVariant; 3] = [
        LsVariant::ProseNTrials,
        LsVariant::PseudocodeBestNeighbor,
        LsVariant::Off,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LsVariant::ProseNTrials => "prose",
            LsVariant::PseudocodeBestNeighbor => "pseudocode",
            LsVariant::Off => "off",
        }
    }
}

impl fmt::Display for LsVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LsVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LsVariant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "local-search variant",
                name: s.to_string(),
                valid: LsVariant::ALL.map(|v| v.name()).join(", "),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalSearchConfig {
    pub n_neighbors: usize,
    pub c1_ls: f64,
    pub variant: LsVariant,
    pub n_randomized: bool,
}

impl LocalSearchConfig {
    /// Evaluations a single improvement call spends for neighbor count `n`.
    pub fn evaluations_per_call(&self, n: usize) -> u64 {
        match self.variant {
            LsVariant::ProseNTrials => n as u64,
            LsVariant::PseudocodeBestNeighbor => 1,
            LsVariant::Off => 0,
        }
    }
}

/// Indices of the `n` personal bests closest to particle `i`'s, nearest
/// first, ties to the lower index.
pub fn n_nearest_neighbors(i: usize, swarm: &Swarm, n: usize) -> Result<Vec<usize>> {
    let size = swarm.len();
    if n >= size {
        return Err(Error::TooManyNeighbors { n, population: size });
    }
    let me = &swarm.particles[i].pbest_position;
    let mut order: Vec<(f64, usize)> = swarm
        .particles
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, p)| (sq_distance(me, &p.pbest_position), j))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(order.into_iter().take(n).map(|(_, j)| j).collect())
}

/// Trial point before clamping; one draw per dimension.
pub fn trial_point_unclamped(
    own: &[f64],
    own_fitness: f64,
    neighbor: &[f64],
    neighbor_fitness: f64,
    c1_ls: f64,
    rng: &mut impl UniformSource,
) -> Vec<f64> {
    let toward = neighbor_fitness >= own_fitness;
    own.iter()
        .zip(neighbor)
        .map(|(&p, &q)| {
            let step = c1_ls * rng.uniform();
            if toward {
                p + step * (q - p)
            } else {
                p + step * (p - q)
            }
        })
        .collect()
}

pub fn trial_point(
    own: &[f64],
    own_fitness: f64,
    neighbor: &[f64],
    neighbor_fitness: f64,
    c1_ls: f64,
    bounds: &Bounds,
    rng: &mut impl UniformSource,
) -> Vec<f64> {
    let mut t = trial_point_unclamped(own, own_fitness, neighbor, neighbor_fitness, c1_ls, rng);
    bounds.clamp_in_place(&mut t);
    t
}

/// Tries to improve particle `i`'s personal best. Returns whether it was
/// replaced.
pub fn local_search_improve(
    i: usize,
    swarm: &mut Swarm,
    cfg: &LocalSearchConfig,
    problem: &Problem,
    rng: &mut impl UniformSource,
) -> Result<bool> {
    if cfg.variant == LsVariant::Off {
        return Ok(false);
    }
    let n = if cfg.n_randomized {
        (1 + (rng.uniform() * cfg.n_neighbors as f64) as usize).min(cfg.n_neighbors)
    } else {
        cfg.n_neighbors
    };
    let neighbors = n_nearest_neighbors(i, swarm, n)?;
    let own = &swarm.particles[i];
    let bounds = problem.bounds();

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluations = 0u64;
    let mut try_neighbor = |j: usize, rng: &mut _| {
        let q = &swarm.particles[j];
        let t = trial_point(
            &own.pbest_position,
            own.pbest_fitness,
            &q.pbest_position,
            q.pbest_fitness,
            cfg.c1_ls,
            bounds,
            rng,
        );
        let ft = problem.fitness(&t);
        evaluations += 1;
        if best.as_ref().is_none_or(|(_, fb)| ft > *fb) {
            best = Some((t, ft));
        }
    };
    match cfg.variant {
        LsVariant::ProseNTrials => {
            for &j in &neighbors {
                try_neighbor(j, rng);
            }
        }
        LsVariant::PseudocodeBestNeighbor => {
            let mut pick = neighbors[0];
            for &j in &neighbors[1..] {
                if swarm.particles[j].pbest_fitness > swarm.particles[pick].pbest_fitness {
                    pick = j;
                }
            }
            try_neighbor(pick, rng);
        }
        LsVariant::Off => unreachable!(),
    }

    swarm.ls_evaluations += evaluations;
    let particle = &mut swarm.particles[i];
    match best {
        Some((t, ft)) if ft > particle.pbest_fitness => {
            particle.pbest_position = t;
            particle.pbest_fitness = ft;
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Runs the improvement for every particle in index order; later particles
/// see earlier replacements.
pub fn local_search_phase(
    swarm: &mut Swarm,
    cfg: &LocalSearchConfig,
    problem: &Problem,
    rng: &mut impl UniformSource,
) -> Result<usize> {
    if cfg.variant == LsVariant::Off || swarm.len() < 2 {
        return Ok(0);
    }
    let mut replaced = 0;
    for i in 0..swarm.len() {
        if local_search_improve(i, swarm, cfg, problem, rng)? {
            replaced += 1;
        }
    }
    Ok(replaced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swarm::tests::FixedDraws;
    use crate::swarm::{Particle, RngStream};

    fn line_swarm(xs: &[f64]) -> Swarm {
        Swarm::new(xs.iter().map(|&x| Particle::at(vec![x, 0.0], -x.abs())).collect())
    }

    fn wide() -> Bounds {
        Bounds::uniform(2, -10.0, 10.0).unwrap()
    }

    #[test]
    fn nearest_on_a_line() {
        let swarm = line_swarm(&[0.0, 1.0, 3.0, 10.0]);
        assert_eq!(n_nearest_neighbors(0, &swarm, 2).unwrap(), vec![1, 2]);
        assert_eq!(n_nearest_neighbors(2, &swarm, 3).unwrap(), vec![1, 0, 3]);
        assert!(matches!(
            n_nearest_neighbors(0, &swarm, 4),
            Err(Error::TooManyNeighbors { n: 4, population: 4 })
        ));
    }

    #[test]
    fn nearest_ties_prefer_lower_index() {
        let swarm = line_swarm(&[0.0, -1.0, 1.0, 2.0]);
        assert_eq!(n_nearest_neighbors(0, &swarm, 2).unwrap(), vec![1, 2]);
    }

    #[test]
    fn toward_better_neighbor() {
        let mut half = FixedDraws::new(vec![0.5]);
        let t = trial_point(&[0.0, 0.0], 1.0, &[1.0, 1.0], 2.0, 1.0, &wide(), &mut half);
        assert_eq!(t, vec![0.5, 0.5]);
    }

    #[test]
    fn away_from_worse_neighbor() {
        let mut half = FixedDraws::new(vec![0.5]);
        let t = trial_point_unclamped(&[0.0, 0.0], 2.0, &[1.0, 1.0], 1.0, 1.0, &mut half);
        assert_eq!(t, vec![-0.5, -0.5]);
    }

    #[test]
    fn equal_fitness_moves_toward() {
        let mut one = FixedDraws::new(vec![1.0]);
        let t = trial_point_unclamped(&[0.0, 0.0], 1.0, &[2.0, 4.0], 1.0, 0.5, &mut one);
        assert_eq!(t, vec![1.0, 2.0]);
    }

    #[test]
    fn trial_is_clamped() {
        let mut one = FixedDraws::new(vec![1.0]);
        let b = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let t = trial_point(&[0.8, 0.0], 2.0, &[0.0, 0.0], 1.0, 2.0, &b, &mut one);
        assert_eq!(t, vec![1.0, 0.0]);
    }

    #[test]
    fn collapsed_swarm_never_replaces() {
        let problem = Problem::new("bowl", wide(), |x: &[f64]| x[0] * x[0] + x[1] * x[1]);
        let p = Particle::at(vec![1.0, 1.0], problem.fitness(&[1.0, 1.0]));
        let mut swarm = Swarm::new(vec![p; 5]);
        let cfg = LocalSearchConfig {
            n_neighbors: 3,
            c1_ls: 1.49618,
            variant: LsVariant::ProseNTrials,
            n_randomized: false,
        };
        let before = swarm.clone();
        let replaced = local_search_phase(&mut swarm, &cfg, &problem, &mut RngStream::new(5)).unwrap();
        assert_eq!(replaced, 0);
        assert_eq!(swarm.particles, before.particles);
        assert_eq!(swarm.ls_evaluations, 15);
    }

    #[test]
    fn evaluation_budget_per_variant() {
        let problem = Problem::new("bowl", wide(), |x: &[f64]| x[0] * x[0] + x[1] * x[1]);
        let swarm = Swarm::new(
            (0..6)
                .map(|k| {
                    let x = vec![k as f64 - 2.5, 0.5 * k as f64];
                    let f = problem.fitness(&x);
                    Particle::at(x, f)
                })
                .collect(),
        );
        for (variant, per_call) in [
            (LsVariant::ProseNTrials, 4),
            (LsVariant::PseudocodeBestNeighbor, 1),
            (LsVariant::Off, 0),
        ] {
            let cfg = LocalSearchConfig {
                n_neighbors: 4,
                c1_ls: 1.0,
                variant,
                n_randomized: false,
            };
            let mut s = swarm.clone();
            local_search_phase(&mut s, &cfg, &problem, &mut RngStream::new(1)).unwrap();
            assert_eq!(s.ls_evaluations, 6 * per_call);
            assert_eq!(cfg.evaluations_per_call(4), per_call);
        }
    }

    #[test]
    fn pseudocode_uses_fittest_neighbor() {
        // Particle 0 at x=0; neighbors 1 (x=1, poor) and 2 (x=-2, good on this bowl centered at -3).
        let problem = Problem::new("shifted", wide(), |x: &[f64]| (x[0] + 3.0).powi(2) + x[1] * x[1]);
        let particles: Vec<Particle> = [0.0, 1.0, -2.0, 9.0]
            .iter()
            .map(|&x| Particle::at(vec![x, 0.0], problem.fitness(&[x, 0.0])))
            .collect();
        let mut swarm = Swarm::new(particles);
        let cfg = LocalSearchConfig {
            n_neighbors: 2,
            c1_ls: 1.0,
            variant: LsVariant::PseudocodeBestNeighbor,
            n_randomized: false,
        };
        // r = 1 moves the trial all the way onto neighbor 2's pbest.
        let replaced = local_search_improve(0, &mut swarm, &cfg, &problem, &mut FixedDraws::new(vec![1.0])).unwrap();
        assert!(replaced);
        assert_eq!(swarm.particles[0].pbest_position, vec![-2.0, 0.0]);
        assert_eq!(swarm.particles[0].position, vec![0.0, 0.0]);
    }

    #[test]
    fn randomized_n_stays_in_range() {
        let problem = Problem::new("bowl", wide(), |x: &[f64]| x[0] * x[0] + x[1] * x[1]);
        let particles: Vec<Particle> = (0..8)
            .map(|k| {
                let x = vec![k as f64, -(k as f64)];
                let f = problem.fitness(&x);
                Particle::at(x, f)
            })
            .collect();
        let cfg = LocalSearchConfig {
            n_neighbors: 5,
            c1_ls: 1.0,
            variant: LsVariant::ProseNTrials,
            n_randomized: true,
        };
        let mut rng = RngStream::new(17);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let mut s = Swarm::new(particles.clone());
            local_search_improve(3, &mut s, &cfg, &problem, &mut rng).unwrap();
            seen.insert(s.ls_evaluations);
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn variant_names_parse() {
        assert_eq!("prose".parse::<LsVariant>().unwrap(), LsVariant::ProseNTrials);
        assert_eq!(
            "PSEUDOCODE".parse::<LsVariant>().unwrap(),
            LsVariant::PseudocodeBestNeighbor
        );
        assert!("both".parse::<LsVariant>().is_err());
    }
}
