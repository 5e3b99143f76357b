//! Seeded test instances.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{shortest_paths, SpannerGraph};
use crate::metric::Metric;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Distribution {
    /// Uniform in the unit cube.
    Uniform,
    /// `k` unit cubes whose corners are `sep` apart along the first axis.
    Clustered { k: usize, sep: f64 },
    /// Integer lattice, filled in row-major order.
    Grid,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Uniform => f.write_str("uniform"),
            Distribution::Clustered { k, sep } => write!(f, "clustered:{k}:{sep}"),
            Distribution::Grid => f.write_str("grid"),
        }
    }
}

/// `uniform`, `grid`, `clustered` (2 clusters, gap 100) or
/// `clustered:<k>:<sep>`.
impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let bad = || Error::Parse(format!("unknown distribution {s:?}"));
        match parts.next() {
            Some("uniform") if parts.next().is_none() => Ok(Distribution::Uniform),
            Some("grid") if parts.next().is_none() => Ok(Distribution::Grid),
            Some("clustered") => {
                let k: usize = parts.next().map_or(Ok(2), str::parse).map_err(|_| bad())?;
                let sep: f64 = parts.next().map_or(Ok(100.0), str::parse).map_err(|_| bad())?;
                if parts.next().is_some() || k == 0 || !sep.is_finite() || sep <= 0.0 {
                    return Err(bad());
                }
                Ok(Distribution::Clustered { k, sep })
            }
            _ => Err(bad()),
        }
    }
}

/// Coordinates for `n` points in `dim` dimensions.
pub fn generate_points(dist: Distribution, n: usize, dim: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if dim == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = match dist {
        Distribution::Uniform => (0..n)
            .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
            .collect(),
        Distribution::Clustered { k, sep } => (0..n)
            .map(|i| {
                let mut p: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
                p[0] += (i % k) as f64 * sep;
                p
            })
            .collect(),
        Distribution::Grid => {
            let mut side = 1usize;
            while side.pow(dim as u32) < n {
                side += 1;
            }
            (0..n)
                .map(|mut i| {
                    let mut p = vec![0.0; dim];
                    for c in p.iter_mut().rev() {
                        *c = (i % side) as f64;
                        i /= side;
                    }
                    p
                })
                .collect()
        }
    };
    Ok(pts)
}

pub fn generate(dist: Distribution, n: usize, dim: usize, seed: u64) -> Result<Metric> {
    Metric::euclidean(generate_points(dist, n, dim, seed)?)
}

/// Shortest-path metric of a random geometric graph on `n` uniform points
/// in the unit square. The connection radius starts at `sqrt(2 ln n / n)`
/// and grows by 20% until the graph is connected.
pub fn random_geometric_matrix(n: usize, seed: u64) -> Result<Metric> {
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, got: n });
    }
    let pts = generate(Distribution::Uniform, n, 2, seed)?;
    let mut radius = (2.0 * (n as f64).ln() / n as f64).sqrt();
    loop {
        let mut g = SpannerGraph::new(n, 2.0);
        for i in 0..n {
            for j in i + 1..n {
                let d = pts.dist(i, j);
                if d <= radius {
                    g.add_edge(i, j, d)?;
                }
            }
        }
        let rows: Vec<Vec<f64>> = (0..n).map(|i| shortest_paths(&g, i)).collect();
        if rows.iter().all(|r| r.iter().all(|d| d.is_finite())) {
            let sym = (0..n)
                .map(|i| (0..n).map(|j| rows[i][j].min(rows[j][i])).collect())
                .collect();
            return Metric::from_matrix(sym, true);
        }
        radius *= 1.2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{diam, set_distance, IdSet};

    #[test]
    fn sizes_and_determinism() {
        assert_eq!(generate_points(Distribution::Uniform, 2, 3, 1).unwrap().len(), 2);
        assert_eq!(
            generate_points(Distribution::Uniform, 20, 2, 7).unwrap(),
            generate_points(Distribution::Uniform, 20, 2, 7).unwrap()
        );
        let grid = generate_points(Distribution::Grid, 9, 2, 0).unwrap();
        assert_eq!(grid.len(), 9);
        assert_eq!(grid[4], vec![1.0, 1.0]);
        assert!(generate(Distribution::Grid, 9, 2, 0).is_ok());
    }

    #[test]
    fn clusters_are_separated() {
        let m = generate(Distribution::Clustered { k: 2, sep: 100.0 }, 40, 2, 3).unwrap();
        let a: IdSet = (0..40).step_by(2).collect();
        let b: IdSet = (1..40).step_by(2).collect();
        assert!(diam(&m, &a).unwrap() < 2f64.sqrt());
        assert!(diam(&m, &b).unwrap() < 2f64.sqrt());
        assert!(set_distance(&m, &a, &b).unwrap() > 98.0);
    }

    #[test]
    fn parse_distribution() {
        assert_eq!("uniform".parse::<Distribution>().unwrap(), Distribution::Uniform);
        assert_eq!(
            "clustered:3:50".parse::<Distribution>().unwrap(),
            Distribution::Clustered { k: 3, sep: 50.0 }
        );
        assert!("clustered:0".parse::<Distribution>().is_err());
        assert!("gaussian".parse::<Distribution>().is_err());
    }

    #[test]
    fn geometric_matrix_is_a_metric() {
        let m = random_geometric_matrix(60, 4).unwrap();
        assert_eq!(m.len(), 60);
        assert!(m.aspect_ratio().unwrap().alpha > 1.0);
    }
}
