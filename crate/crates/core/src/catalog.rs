//! Reference catalogs of the local and global minimizers of a benchmark.
//!
//! A catalog is built by evaluating the objective on a dense grid, seeding a
//! bounded compass search from every grid node that is no worse than its
//! neighbors, merging converged points that coincide, and keeping only points
//! that pass a ring-probe minimality check.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::benchmarks::BenchmarkId;
use crate::error::{Error, Result};
use crate::swarm::{distance, Bounds, Problem};

pub const CATALOG_FORMAT_VERSION: u32 = 1;

/// Grid nodes per unit of the narrowest box side.
pub const DEFAULT_GRID_DIVISIONS: f64 = 500.0;
pub const DEFAULT_TOLERANCE_DIVISIONS: f64 = 200.0;

/// Values within this of the catalog minimum are classified global.
pub const GLOBAL_VALUE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimumKind {
    Global,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub position: Vec<f64>,
    pub value: f64,
    pub kind: OptimumKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    pub grid_step: f64,
    pub position_tolerance: f64,
}

impl OracleParams {
    pub fn defaults_for(bounds: &Bounds) -> Self {
        let w = bounds.min_width();
        Self {
            grid_step: w / DEFAULT_GRID_DIVISIONS,
            position_tolerance: w / DEFAULT_TOLERANCE_DIVISIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimaCatalog {
    pub version: u32,
    pub function: BenchmarkId,
    pub grid_step: f64,
    pub position_tolerance: f64,
    /// Sorted by ascending objective value, ties by position.
    pub entries: Vec<CatalogEntry>,
}

impl OptimaCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn global_count(&self) -> usize {
        self.entries.iter().filter(|e| e.kind == OptimumKind::Global).count()
    }

    pub fn min_value(&self) -> f64 {
        self.entries.iter().map(|e| e.value).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.entries.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn params(&self) -> OracleParams {
        OracleParams {
            grid_step: self.grid_step,
            position_tolerance: self.position_tolerance,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::json(path, e))?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let catalog: OptimaCatalog = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        if catalog.version != CATALOG_FORMAT_VERSION {
            return Err(Error::IncompatibleCatalog {
                path: path.to_path_buf(),
                reason: format!("format version {} (expected {CATALOG_FORMAT_VERSION})", catalog.version),
            });
        }
        Ok(catalog)
    }
}

/// Catalog of `id` with the default oracle parameters.
pub fn default_catalog(id: BenchmarkId) -> OptimaCatalog {
    let params = OracleParams::defaults_for(&id.bounds());
    build_catalog(id, params.grid_step, params.position_tolerance).expect("default oracle parameters are valid")
}

pub fn build_catalog(id: BenchmarkId, grid_step: f64, position_tolerance: f64) -> Result<OptimaCatalog> {
    let entries = find_minima(&id.problem(), grid_step, position_tolerance)?;
    Ok(OptimaCatalog {
        version: CATALOG_FORMAT_VERSION,
        function: id,
        grid_step,
        position_tolerance,
        entries,
    })
}

/// Grid-seeded enumeration of the strict local minimizers of `problem`.
pub fn find_minima(problem: &Problem, grid_step: f64, position_tolerance: f64) -> Result<Vec<CatalogEntry>> {
    if !(grid_step > 0.0) || !(position_tolerance > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "grid_step ({grid_step}) and position_tolerance ({position_tolerance}) must be positive"
        )));
    }
    let bounds = problem.bounds();
    let grid = Grid::new(bounds, grid_step)?;
    let values: Vec<f64> = (0..grid.len()).map(|k| problem.objective(&grid.point(k))).collect();

    let mut converged: Vec<(Vec<f64>, f64)> = (0..grid.len())
        .filter(|&k| grid.neighbors(k).all(|n| values[k] <= values[n]))
        .map(|k| compass_descent(problem, grid.point(k), values[k], grid_step))
        .collect();

    converged.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| cmp_position(&a.0, &b.0)));
    let mut kept: Vec<(Vec<f64>, f64)> = Vec::new();
    for (x, v) in converged {
        if kept.iter().all(|(y, _)| distance(&x, y) > 2.0 * position_tolerance) {
            kept.push((x, v));
        }
    }
    kept.retain(|(x, v)| passes_probe(problem, x, *v, 0.5 * position_tolerance));

    let min = kept.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    Ok(kept
        .into_iter()
        .map(|(position, value)| CatalogEntry {
            kind: if value <= min + GLOBAL_VALUE_SLACK {
                OptimumKind::Global
            } else {
                OptimumKind::Local
            },
            position,
            value,
        })
        .collect())
}

fn cmp_position(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Probe points on a ring of `radius` around `x`: 8 directions in 2-D, the
/// signed coordinate axes otherwise.
pub fn probe_points(x: &[f64], radius: f64) -> Vec<Vec<f64>> {
    if x.len() == 2 {
        (0..8)
            .map(|k| {
                let angle = k as f64 * std::f64::consts::FRAC_PI_4;
                vec![x[0] + radius * angle.cos(), x[1] + radius * angle.sin()]
            })
            .collect()
    } else {
        (0..x.len())
            .flat_map(|d| {
                [-radius, radius].map(|s| {
                    let mut y = x.to_vec();
                    y[d] += s;
                    y
                })
            })
            .collect()
    }
}

fn passes_probe(problem: &Problem, x: &[f64], value: f64, radius: f64) -> bool {
    probe_points(x, radius).iter().all(|y| value <= problem.objective(y))
}

/// Bounded compass search, halving the step until it falls below a relative
/// floor.
fn compass_descent(problem: &Problem, mut x: Vec<f64>, mut fx: f64, initial_step: f64) -> (Vec<f64>, f64) {
    let bounds = problem.bounds();
    let floor = 1e-11 * bounds.min_width();
    let mut step = initial_step;
    let mut trial = x.clone();
    let mut budget = 200_000usize;
    while step > floor && budget > 0 {
        let mut improved = false;
        for d in 0..x.len() {
            for sign in [-1.0, 1.0] {
                trial.copy_from_slice(&x);
                trial[d] = (x[d] + sign * step).clamp(bounds.lower()[d], bounds.upper()[d]);
                if trial[d] == x[d] {
                    continue;
                }
                budget = budget.saturating_sub(1);
                let ft = problem.objective(&trial);
                if ft < fx {
                    x.copy_from_slice(&trial);
                    fx = ft;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Regular grid with exact endpoints on every side of the box.
struct Grid<'a> {
    bounds: &'a Bounds,
    /// Intervals per dimension (nodes = intervals + 1).
    intervals: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl<'a> Grid<'a> {
    fn new(bounds: &'a Bounds, step: f64) -> Result<Self> {
        let intervals: Vec<usize> = (0..bounds.dim())
            .map(|d| (bounds.width(d) / step).ceil().max(1.0) as usize)
            .collect();
        let mut strides = Vec::with_capacity(intervals.len());
        let mut len = 1usize;
        for n in &intervals {
            strides.push(len);
            len = len
                .checked_mul(n + 1)
                .filter(|&l| l <= 200_000_000)
                .ok_or_else(|| Error::InvalidConfig(format!("grid step {step} is too fine")))?;
        }
        Ok(Self {
            bounds,
            intervals,
            strides,
            len,
        })
    }

    fn len(&self) -> usize {
        self.len
    }

    fn coords(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.strides
            .iter()
            .zip(&self.intervals)
            .map(move |(s, n)| (k / s) % (n + 1))
    }

    fn point(&self, k: usize) -> Vec<f64> {
        self.coords(k)
            .enumerate()
            .map(|(d, i)| {
                if i == self.intervals[d] {
                    self.bounds.upper()[d]
                } else {
                    self.bounds.lower()[d] + self.bounds.width(d) * i as f64 / self.intervals[d] as f64
                }
            })
            .collect()
    }

    /// All existing nodes in the surrounding 3^d − 1 block.
    fn neighbors(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let dim = self.intervals.len();
        let coords: Vec<usize> = self.coords(k).collect();
        (0..3usize.pow(dim as u32)).filter_map(move |code| {
            let mut idx = 0isize;
            let mut rest = code;
            let mut center = true;
            for d in 0..dim {
                let off = (rest % 3) as isize - 1;
                rest /= 3;
                center &= off == 0;
                let c = coords[d] as isize + off;
                if c < 0 || c > self.intervals[d] as isize {
                    return None;
                }
                idx += c * self.strides[d] as isize;
            }
            (!center).then_some(idx as usize)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_the_two_minima_of_a_double_well() {
        let bounds = Bounds::new(vec![-2.0, -1.0], vec![2.0, 1.0]).unwrap();
        let problem = Problem::new("double-well", bounds, |x: &[f64]| {
            (x[0] * x[0] - 1.0).powi(2) + 0.1 * x[0] + x[1] * x[1]
        });
        let entries = find_minima(&problem, 0.01, 0.01).unwrap();
        assert_eq!(entries.len(), 2, "{entries:?}");
        assert_eq!(entries[0].kind, OptimumKind::Global);
        assert_eq!(entries[1].kind, OptimumKind::Local);
        assert!(entries[0].position[0] < 0.0);
        assert!(entries[1].position[0] > 0.0);
        assert!(entries[0].position[1].abs() < 1e-6);
    }

    #[test]
    fn boundary_slopes_are_not_minima() {
        let bounds = Bounds::uniform(2, 0.0, 1.0).unwrap();
        let problem = Problem::new("plane", bounds, |x: &[f64]| x[0] + 2.0 * x[1]);
        assert!(find_minima(&problem, 0.01, 0.01).unwrap().is_empty());
    }

    #[test]
    fn grid_neighbors_respect_edges() {
        let bounds = Bounds::uniform(2, 0.0, 1.0).unwrap();
        let grid = Grid::new(&bounds, 0.5).unwrap();
        assert_eq!(grid.len(), 9);
        assert_eq!(grid.neighbors(0).count(), 3);
        assert_eq!(grid.neighbors(4).count(), 8);
        assert_eq!(grid.point(8), vec![1.0, 1.0]);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        let problem = BenchmarkId::F1SixHumpCamel.problem();
        assert!(find_minima(&problem, 0.0, 0.01).is_err());
        assert!(find_minima(&problem, 0.01, -1.0).is_err());
    }

    #[test]
    fn json_round_trip_and_version_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f1.json");
        let catalog = default_catalog(BenchmarkId::F1SixHumpCamel);
        catalog.save(&path).unwrap();
        assert_eq!(OptimaCatalog::load(&path).unwrap(), catalog);

        let mut stale = catalog.clone();
        stale.version = 0;
        stale.save(&path).unwrap();
        assert!(matches!(
            OptimaCatalog::load(&path),
            Err(Error::IncompatibleCatalog { .. })
        ));
    }
}
