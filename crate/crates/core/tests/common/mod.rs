//! Brute-force reference implementations shared by the integration tests.
//! They deliberately avoid the library's own selection and reduction code.
#![allow(dead_code)]

use lsepso::{Particle, Swarm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]).powi(2);
    }
    s.sqrt()
}

/// Random swarm with independent current and pbest positions in `[-half, half]²`
/// and fitness values drawn from `[-100, 0]`, pbest at least as fit as current.
pub fn random_swarm(rng: &mut ChaCha8Rng, n: usize, half: f64) -> Swarm {
    let particles = (0..n)
        .map(|_| {
            let position = vec![rng.random_range(-half..half), rng.random_range(-half..half)];
            let pbest_position = vec![rng.random_range(-half..half), rng.random_range(-half..half)];
            let fitness = rng.random_range(-100.0..0.0);
            let pbest_fitness = fitness + rng.random_range(0.0..50.0);
            Particle {
                velocity: vec![0.0; 2],
                position,
                fitness,
                pbest_position,
                pbest_fitness,
            }
        })
        .collect();
    Swarm::new(particles)
}

/// Full force matrix, then a first-wins argmax per row.
pub fn brute_electrostatic(swarm: &Swarm, charges: &[f64], alpha: f64) -> Vec<Option<usize>> {
    let n = swarm.len();
    let mut force = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            let d = euclid(&swarm.particles[i].pbest_position, &swarm.particles[j].pbest_position);
            if i != j && d > 0.0 {
                force[i][j] = Some(alpha * charges[i] * charges[j] / (d * d));
            }
        }
    }
    force.iter().map(|row| first_argmax(row)).collect()
}

pub fn brute_fer(swarm: &Swarm, alpha: f64) -> Vec<Option<usize>> {
    let n = swarm.len();
    let mut ratio = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            let pi = &swarm.particles[i];
            let pj = &swarm.particles[j];
            let d = euclid(&pi.position, &pj.pbest_position);
            if i != j && d > 0.0 {
                ratio[i][j] = Some(alpha * (pj.pbest_fitness - pi.fitness) / d);
            }
        }
    }
    ratio.iter().map(|row| first_argmax(row)).collect()
}

fn first_argmax(row: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in row.iter().enumerate() {
        if let Some(v) = *v {
            match best {
                Some((_, b)) if v <= b => {}
                _ => best = Some((j, v)),
            }
        }
    }
    best.map(|(j, _)| j)
}

/// Shifted charges: `f − worst + max(1e-9, 1e-6·(best − worst))`.
pub fn charges(fitness: &[f64]) -> Vec<f64> {
    let best = fitness.iter().cloned().fold(f64::MIN, f64::max);
    let worst = fitness.iter().cloned().fold(f64::MAX, f64::min);
    let delta = f64::max(1e-9, 1e-6 * (best - worst));
    fitness.iter().map(|f| f - worst + delta).collect()
}

/// Full sort of all other pbests by `(distance, index)`.
pub fn brute_nearest(swarm: &Swarm, i: usize, n: usize) -> Vec<usize> {
    let me = &swarm.particles[i].pbest_position;
    let mut all: Vec<(f64, usize)> = (0..swarm.len())
        .filter(|&j| j != i)
        .map(|j| (euclid(me, &swarm.particles[j].pbest_position), j))
        .collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.into_iter().take(n).map(|(_, j)| j).collect()
}

/// Take the fittest remaining pbest, discard everything within `eps` of it,
/// repeat.
pub fn brute_candidates(swarm: &Swarm, eps: f64) -> Vec<Vec<f64>> {
    let mut remaining: Vec<usize> = (0..swarm.len()).collect();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let mut pick = remaining[0];
        for &k in &remaining {
            if swarm.particles[k].pbest_fitness > swarm.particles[pick].pbest_fitness {
                pick = k;
            }
        }
        let center = swarm.particles[pick].pbest_position.clone();
        remaining.retain(|&k| euclid(&swarm.particles[k].pbest_position, &center) > eps);
        out.push(center);
    }
    out
}
