//! The order in which unordered point pairs are considered.
//!
//! Both constructions are defined for an arbitrary order, so the order is an
//! explicit input. Each strategy enumerates every unordered pair exactly once;
//! the orientation of an emitted pair decides which agent performs the check
//! in the simulator.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::Metric;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderStrategy {
    /// Seeded shuffle with random orientation.
    Random,
    Lexicographic,
    ReverseLexicographic,
    DecreasingDistance,
    IncreasingDistance,
    Explicit(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairOrder {
    pub strategy: OrderStrategy,
    pub seed: u64,
}

impl Default for PairOrder {
    fn default() -> Self {
        PairOrder::random(0)
    }
}

impl PairOrder {
    pub fn random(seed: u64) -> Self {
        PairOrder {
            strategy: OrderStrategy::Random,
            seed,
        }
    }

    pub fn new(strategy: OrderStrategy) -> Self {
        PairOrder { strategy, seed: 0 }
    }

    pub fn explicit(pairs: Vec<(usize, usize)>) -> Self {
        PairOrder::new(OrderStrategy::Explicit(pairs))
    }

    /// Short human-readable descriptor, e.g. `random:7`.
    pub fn describe(&self) -> String {
        match &self.strategy {
            OrderStrategy::Random => format!("random:{}", self.seed),
            OrderStrategy::Explicit(p) => format!("explicit:{}", p.len()),
            other => strategy_name(other).to_string(),
        }
    }

    /// All unordered pairs of `0..n`, in this order.
    pub fn pairs(&self, metric: &Metric) -> Result<Vec<(usize, usize)>> {
        let n = metric.len();
        let mut all: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        match &self.strategy {
            OrderStrategy::Lexicographic => {}
            OrderStrategy::ReverseLexicographic => all.reverse(),
            OrderStrategy::IncreasingDistance => {
                all.sort_by(|a, b| metric.dist(a.0, a.1).total_cmp(&metric.dist(b.0, b.1)));
            }
            OrderStrategy::DecreasingDistance => {
                all.sort_by(|a, b| metric.dist(b.0, b.1).total_cmp(&metric.dist(a.0, a.1)));
            }
            OrderStrategy::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                all.shuffle(&mut rng);
                for p in all.iter_mut() {
                    if rng.gen::<bool>() {
                        *p = (p.1, p.0);
                    }
                }
            }
            OrderStrategy::Explicit(list) => {
                validate_explicit(list, n)?;
                return Ok(list.clone());
            }
        }
        Ok(all)
    }
}

fn validate_explicit(list: &[(usize, usize)], n: usize) -> Result<()> {
    let expected = n * n.saturating_sub(1) / 2;
    if list.len() != expected {
        return Err(Error::InvalidOrder(format!(
            "{} pairs listed, expected {expected}",
            list.len()
        )));
    }
    let mut seen = vec![false; n * n];
    for &(u, v) in list {
        if u >= n || v >= n || u == v {
            return Err(Error::InvalidOrder(format!("bad pair ({u}, {v})")));
        }
        let k = u.min(v) * n + u.max(v);
        if seen[k] {
            return Err(Error::InvalidOrder(format!("pair ({u}, {v}) repeated")));
        }
        seen[k] = true;
    }
    Ok(())
}

fn strategy_name(s: &OrderStrategy) -> &'static str {
    match s {
        OrderStrategy::Random => "random",
        OrderStrategy::Lexicographic => "lex",
        OrderStrategy::ReverseLexicographic => "rev-lex",
        OrderStrategy::DecreasingDistance => "dec",
        OrderStrategy::IncreasingDistance => "inc",
        OrderStrategy::Explicit(_) => "explicit",
    }
}

impl fmt::Display for PairOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl FromStr for OrderStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" => OrderStrategy::Random,
            "lex" | "lexicographic" => OrderStrategy::Lexicographic,
            "rev-lex" | "reverse-lexicographic" => OrderStrategy::ReverseLexicographic,
            "dec" | "decreasing-distance" => OrderStrategy::DecreasingDistance,
            "inc" | "increasing-distance" => OrderStrategy::IncreasingDistance,
            other => return Err(Error::InvalidOrder(format!("unknown strategy {other:?}"))),
        })
    }
}

/// Every permutation of `items` (Heap's algorithm). Used to enumerate all
/// selection orders on tiny fixtures.
pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    fn heap<T: Clone>(k: usize, a: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a = items.to_vec();
    let mut out = Vec::new();
    heap(a.len(), &mut a, &mut out);
    out
}
