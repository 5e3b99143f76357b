//! Greedy well-separated pair decomposition.
//!
//! Repeatedly take a pair `(p, q)` that no emitted pair covers yet, emit the
//! ball pair `(B_r(p), B_r(q))` with `r = |pq| / (2 + 2s)` and mark every
//! cross pair of the two balls as covered. The pair-selection order is an
//! input; every order yields a valid decomposition.

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::cover_radius;
use crate::metric::{is_s_well_separated, IdSet, Metric};
use crate::order::PairOrder;

impl Serialize for IdSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IdSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Vec::<usize>::deserialize(d).map(IdSet::new)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WspPair {
    pub seq: u64,
    #[serde(rename = "a")]
    pub center_a: usize,
    #[serde(rename = "b")]
    pub center_b: usize,
    #[serde(rename = "r")]
    pub radius: f64,
    /// Ball membership snapshot taken when the pair was emitted.
    #[serde(rename = "A")]
    pub members_a: IdSet,
    #[serde(rename = "B")]
    pub members_b: IdSet,
}

impl WspPair {
    /// Orientation-free coverage test.
    pub fn covers(&self, x: usize, y: usize) -> bool {
        (self.members_a.contains(x) && self.members_b.contains(y))
            || (self.members_b.contains(x) && self.members_a.contains(y))
    }

    pub fn size(&self) -> usize {
        self.members_a.len() + self.members_b.len()
    }
}

pub fn pair_covers(pair: &WspPair, x: usize, y: usize) -> bool {
    pair.covers(x, y)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wspd {
    pub s: f64,
    #[serde(default)]
    pub order: String,
    pub pairs: Vec<WspPair>,
}

/// Upper-triangular bit table of covered point pairs.
#[derive(Clone, Debug)]
pub struct CoverTable {
    n: usize,
    bits: BitVec,
    uncovered: usize,
}

impl CoverTable {
    pub fn new(n: usize) -> Self {
        CoverTable {
            n,
            bits: bitvec![0; n * n],
            uncovered: n * n.saturating_sub(1) / 2,
        }
    }

    fn slot(&self, x: usize, y: usize) -> usize {
        x.min(y) * self.n + x.max(y)
    }

    pub fn is_covered(&self, x: usize, y: usize) -> bool {
        self.bits[self.slot(x, y)]
    }

    /// Marks all cross pairs of `a` and `b`; returns how many were new.
    pub fn mark(&mut self, a: &IdSet, b: &IdSet) -> usize {
        let mut fresh = 0;
        for x in a.iter() {
            for y in b.iter() {
                if x == y {
                    continue;
                }
                let k = self.slot(x, y);
                if !self.bits[k] {
                    self.bits.set(k, true);
                    fresh += 1;
                }
            }
        }
        self.uncovered -= fresh;
        fresh
    }

    pub fn uncovered(&self) -> usize {
        self.uncovered
    }

    pub fn uncovered_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in x + 1..self.n {
                if !self.bits[x * self.n + y] {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

pub fn check_separation_parameter(s: f64) -> Result<()> {
    if s.is_finite() && s > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSeparation(s))
    }
}

pub fn build_greedy_wspd(metric: &Metric, s: f64, order: &PairOrder) -> Result<Wspd> {
    check_separation_parameter(s)?;
    if metric.len() < 2 {
        return Err(Error::TooFewPoints {
            need: 2,
            got: metric.len(),
        });
    }
    let mut cover = CoverTable::new(metric.len());
    let mut pairs = Vec::new();
    for (p, q) in order.pairs(metric)? {
        if cover.uncovered() == 0 {
            break;
        }
        if cover.is_covered(p, q) {
            continue;
        }
        let radius = cover_radius(metric.dist(p, q), s);
        let members_a = metric.ball(p, radius);
        let members_b = metric.ball(q, radius);
        cover.mark(&members_a, &members_b);
        pairs.push(WspPair {
            seq: pairs.len() as u64,
            center_a: p,
            center_b: q,
            radius,
            members_a,
            members_b,
        });
    }
    Ok(Wspd {
        s,
        order: order.describe(),
        pairs,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct WspdReport {
    /// Seqs of pairs that fail `s`-separation.
    pub non_separated: Vec<u64>,
    pub uncovered: Vec<(usize, usize)>,
    pub pair_count: usize,
    /// Σ (|A_i| + |B_i|).
    pub total_members: usize,
}

impl WspdReport {
    pub fn is_clean(&self) -> bool {
        self.non_separated.is_empty() && self.uncovered.is_empty()
    }
}

pub fn verify_wspd(metric: &Metric, w: &Wspd) -> WspdReport {
    let mut cover = CoverTable::new(metric.len());
    let mut report = WspdReport {
        pair_count: w.pairs.len(),
        ..Default::default()
    };
    for pair in &w.pairs {
        if !is_s_well_separated(metric, &pair.members_a, &pair.members_b, w.s) {
            report.non_separated.push(pair.seq);
        }
        report.total_members += pair.size();
        cover.mark(&pair.members_a, &pair.members_b);
    }
    report.uncovered = cover.uncovered_pairs();
    report
}

/// Replays a greedy decomposition in seq order and returns the seqs whose
/// generating pair was already covered when they were emitted, plus any pair
/// whose recorded balls differ from the metric's balls.
pub fn greedy_replay_violations(metric: &Metric, w: &Wspd) -> Vec<u64> {
    let mut cover = CoverTable::new(metric.len());
    let mut bad = Vec::new();
    let mut pairs: Vec<&WspPair> = w.pairs.iter().collect();
    pairs.sort_by_key(|p| p.seq);
    for pair in pairs {
        let r = cover_radius(metric.dist(pair.center_a, pair.center_b), w.s);
        if cover.is_covered(pair.center_a, pair.center_b)
            || r != pair.radius
            || metric.ball(pair.center_a, r) != pair.members_a
            || metric.ball(pair.center_b, r) != pair.members_b
        {
            bad.push(pair.seq);
        }
        cover.mark(&pair.members_a, &pair.members_b);
    }
    bad
}
