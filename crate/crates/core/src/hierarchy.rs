//! Discrete center hierarchy and the deformable spanner built on it.
//!
//! Distances are divided by the closest-pair distance, so level `i` uses
//! radius `2^i`. Level `0` is every point; each level above is a greedy
//! maximal subset of the one below, scanned in ascending id order. The
//! cousin pairs of the deformable spanner form a second, independent
//! well-separated pair decomposition used to cross-check the greedy one.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{IdSet, Metric};
use crate::wspd::{WspPair, Wspd};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct DiscreteCenterHierarchy {
    /// Closest-pair distance used for normalization.
    scale: f64,
    /// `levels[i]` = ids of `S_i`, ascending.
    levels: Vec<Vec<usize>>,
    /// `parent[i][p]` = parent in `S_{i+1}` of `p ∈ S_i`, else `NONE`.
    parent: Vec<Vec<usize>>,
    /// `ancestor[i][p]` = ancestor of point `p` at level `i`.
    ancestor: Vec<Vec<usize>>,
}

impl DiscreteCenterHierarchy {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Index of the top level (`S_0 .. S_L`).
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, i: usize) -> &[usize] {
        &self.levels[i]
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    /// Parent in `S_{i+1}` of `p ∈ S_i`.
    pub fn parent(&self, i: usize, p: usize) -> Option<usize> {
        self.parent
            .get(i)
            .and_then(|row| row.get(p))
            .copied()
            .filter(|&x| x != NONE)
    }

    /// `P^{(i)}(p)`.
    pub fn ancestor(&self, p: usize, i: usize) -> usize {
        self.ancestor[i][p]
    }

    /// Level-0 descendants of `u ∈ S_i`.
    pub fn descendants(&self, i: usize, u: usize) -> IdSet {
        self.ancestor[i]
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == u)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn normalized(&self, metric: &Metric, a: usize, b: usize) -> f64 {
        metric.dist(a, b) / self.scale
    }
}

pub fn build_hierarchy(metric: &Metric) -> Result<DiscreteCenterHierarchy> {
    let n = metric.len();
    if n == 0 {
        return Err(Error::TooFewPoints { need: 1, got: 0 });
    }
    let scale = metric.aspect_ratio().map(|a| a.d_min).unwrap_or(1.0);
    let nd = |a: usize, b: usize| metric.dist(a, b) / scale;

    let mut levels = vec![(0..n).collect::<Vec<_>>()];
    let mut parent: Vec<Vec<usize>> = Vec::new();
    let mut radius = 1.0f64;
    while levels.last().unwrap().len() > 1 {
        radius *= 2.0;
        let below = levels.last().unwrap();
        let mut kept: Vec<usize> = Vec::new();
        for &p in below {
            if kept.iter().all(|&k| nd(p, k) >= radius) {
                kept.push(p);
            }
        }
        let kept_set: HashSet<usize> = kept.iter().copied().collect();
        let mut up = vec![NONE; n];
        for &p in below {
            up[p] = if kept_set.contains(&p) {
                p
            } else {
                *kept
                    .iter()
                    .filter(|&&k| nd(p, k) <= radius)
                    .min()
                    .expect("maximal set covers")
            };
        }
        parent.push(up);
        levels.push(kept);
    }
    parent.push(vec![NONE; n]);

    let mut ancestor = vec![(0..n).collect::<Vec<_>>()];
    for i in 1..levels.len() {
        let prev = &ancestor[i - 1];
        let row = (0..n).map(|p| parent[i - 1][prev[p]]).collect();
        ancestor.push(row);
    }
    Ok(DiscreteCenterHierarchy {
        scale,
        levels,
        parent,
        ancestor,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HierarchyReport {
    /// `(level, point)` whose parent is farther than `2^level`.
    pub covering: Vec<(usize, usize)>,
    /// `(level, a, b)` with two centers closer than `2^level`.
    pub separation: Vec<(usize, usize, usize)>,
    /// `(level, point)` whose ancestor is farther than `2^{level+1}`.
    pub ancestor: Vec<(usize, usize)>,
    /// Levels that are not subsets of the level below.
    pub nesting: Vec<usize>,
    pub top_is_single: bool,
    pub level_bound_ok: bool,
}

impl HierarchyReport {
    pub fn is_clean(&self) -> bool {
        self.covering.is_empty()
            && self.separation.is_empty()
            && self.ancestor.is_empty()
            && self.nesting.is_empty()
            && self.top_is_single
            && self.level_bound_ok
    }
}

/// Exhaustive check of every hierarchy invariant.
pub fn check_hierarchy(metric: &Metric, h: &DiscreteCenterHierarchy) -> HierarchyReport {
    let mut report = HierarchyReport {
        top_is_single: h.level(h.top()).len() == 1 && h.level(0).len() == metric.len(),
        ..Default::default()
    };
    let alpha = metric.aspect_ratio().map(|a| a.alpha).unwrap_or(1.0);
    report.level_bound_ok = h.top() as f64 <= alpha.log2().ceil().max(0.0) + 1.0;
    for i in 1..=h.top() {
        let r = 2f64.powi(i as i32);
        let below: HashSet<usize> = h.level(i - 1).iter().copied().collect();
        if !h.level(i).iter().all(|p| below.contains(p)) {
            report.nesting.push(i);
        }
        for &p in h.level(i - 1) {
            match h.parent(i - 1, p) {
                Some(q) if h.normalized(metric, p, q) <= r && h.level(i).binary_search(&q).is_ok() => {}
                _ => report.covering.push((i, p)),
            }
        }
        let centers = h.level(i);
        for (k, &a) in centers.iter().enumerate() {
            for &b in &centers[k + 1..] {
                if h.normalized(metric, a, b) < r {
                    report.separation.push((i, a, b));
                }
            }
        }
    }
    for i in 0..=h.top() {
        let r = 2f64.powi(i as i32 + 1);
        for p in 0..metric.len() {
            if h.normalized(metric, p, h.ancestor(p, i)) > r {
                report.ancestor.push((i, p));
            }
        }
    }
    report
}

#[derive(Clone, Debug)]
pub struct DeformableSpanner {
    c: f64,
    /// Per-level edges `(u, v)`, `u < v`.
    levels: Vec<Vec<(usize, usize)>>,
    lookup: Vec<HashSet<(usize, usize)>>,
}

impl DeformableSpanner {
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `c = 4 + 16/ε`.
    pub fn c_for_epsilon(eps: f64) -> f64 {
        4.0 + 16.0 / eps
    }

    /// `c = 4(s + 1)`, whose cousin pairs are `s`-well-separated.
    pub fn c_for_separation(s: f64) -> f64 {
        4.0 * (s + 1.0)
    }

    pub fn level_edges(&self, i: usize) -> &[(usize, usize)] {
        &self.levels[i]
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    /// Same point, or an edge at level `i`.
    pub fn linked(&self, i: usize, u: usize, v: usize) -> bool {
        u == v || self.lookup[i].contains(&(u.min(v), u.max(v)))
    }

    pub fn level_edge_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Point pairs joined at some level.
    pub fn distinct_edges(&self) -> Vec<(usize, usize)> {
        let mut all: Vec<(usize, usize)> = self.levels.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn total_weight(&self, metric: &Metric) -> f64 {
        self.distinct_edges()
            .iter()
            .map(|&(u, v)| metric.dist(u, v))
            .sum()
    }

    /// Largest number of same-level neighbors of any center.
    pub fn max_level_degree(&self) -> usize {
        let mut best = 0;
        for edges in &self.levels {
            let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
            for &(u, v) in edges {
                *deg.entry(u).or_default() += 1;
                *deg.entry(v).or_default() += 1;
            }
            best = best.max(deg.values().copied().max().unwrap_or(0));
        }
        best
    }

    /// `(1 + 2c)^d − 1`, the per-level degree bound for points in `R^d`.
    pub fn degree_bound(&self, dim: usize) -> f64 {
        (1.0 + 2.0 * self.c).powi(dim as i32) - 1.0
    }
}

pub fn build_deformable_spanner(metric: &Metric, h: &DiscreteCenterHierarchy, c: f64) -> Result<DeformableSpanner> {
    if c.is_nan() || c < 1.0 || !c.is_finite() {
        return Err(Error::InvalidSpannerConstant(c));
    }
    let mut levels = Vec::new();
    let mut lookup = Vec::new();
    for i in 0..=h.top() {
        let limit = c * 2f64.powi(i as i32);
        let centers = h.level(i);
        let mut edges = Vec::new();
        for (k, &u) in centers.iter().enumerate() {
            for &v in &centers[k + 1..] {
                if h.normalized(metric, u, v) <= limit {
                    edges.push((u, v));
                }
            }
        }
        lookup.push(edges.iter().copied().collect());
        levels.push(edges);
    }
    Ok(DeformableSpanner { c, levels, lookup })
}

/// Level-`i` center pairs that are not linked while their parents are.
pub fn cousin_pairs(h: &DiscreteCenterHierarchy, ds: &DeformableSpanner) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..h.top() {
        let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &u in h.level(i) {
            children.entry(h.parent(i, u).expect("parent below top")).or_default().push(u);
        }
        let mut parent_links: Vec<(usize, usize)> = ds.level_edges(i + 1).to_vec();
        parent_links.extend(h.level(i + 1).iter().map(|&p| (p, p)));
        for (pu, pv) in parent_links {
            let (Some(cu), Some(cv)) = (children.get(&pu), children.get(&pv)) else {
                continue;
            };
            for &u in cu {
                for &v in cv {
                    if (pu != pv || u < v) && !ds.linked(i, u, v) {
                        out.push((i, u.min(v), u.max(v)));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// One pair of descendant sets per cousin pair. The result is
/// `(c/4 − 1)`-well-separated; it does not cover pairs whose level-0 points
/// are already linked.
pub fn cousin_pair_wspd(metric: &Metric, h: &DiscreteCenterHierarchy, ds: &DeformableSpanner) -> Wspd {
    let pairs = cousin_pairs(h, ds)
        .into_iter()
        .enumerate()
        .map(|(k, (i, u, v))| WspPair {
            seq: k as u64,
            center_a: u,
            center_b: v,
            radius: 2f64.powi(i as i32 + 1) * h.scale(),
            members_a: h.descendants(i, u),
            members_b: h.descendants(i, v),
        })
        .collect();
    let _ = metric;
    Wspd {
        s: ds.c() / 4.0 - 1.0,
        order: "cousin".into(),
        pairs,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CousinRef {
    pub level: usize,
    pub u: usize,
    pub v: usize,
}

/// The lowest level whose ancestors of `p` and `q` are not linked while the
/// next level's are. `None` when `p` and `q` are linked at level 0.
pub fn map_to_cousin_pair(h: &DiscreteCenterHierarchy, ds: &DeformableSpanner, p: usize, q: usize) -> Option<CousinRef> {
    if ds.linked(0, p, q) {
        return None;
    }
    for i in 0..h.top() {
        let (u, v) = (h.ancestor(p, i), h.ancestor(q, i));
        let (pu, pv) = (h.ancestor(p, i + 1), h.ancestor(q, i + 1));
        if !ds.linked(i, u, v) && ds.linked(i + 1, pu, pv) {
            return Some(CousinRef {
                level: i,
                u: u.min(v),
                v: u.max(v),
            });
        }
    }
    None
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MappingHistogram {
    pub mapped: usize,
    /// Pairs whose endpoints are linked at level 0.
    pub excluded: usize,
    pub max_multiplicity: usize,
    pub distinct_targets: usize,
    /// `multiplicity -> number of cousin pairs with that many greedy pairs`.
    pub histogram: BTreeMap<usize, usize>,
}

/// Maps every pair of `w` (by its centers) to a cousin pair and counts how
/// many land on each.
pub fn mapping_histogram(h: &DiscreteCenterHierarchy, ds: &DeformableSpanner, w: &Wspd) -> MappingHistogram {
    let mut counts: BTreeMap<CousinRef, usize> = BTreeMap::new();
    let mut out = MappingHistogram::default();
    for pair in &w.pairs {
        match map_to_cousin_pair(h, ds, pair.center_a, pair.center_b) {
            Some(target) => {
                *counts.entry(target).or_default() += 1;
                out.mapped += 1;
            }
            None => out.excluded += 1,
        }
    }
    for &c in counts.values() {
        *out.histogram.entry(c).or_default() += 1;
    }
    out.max_multiplicity = counts.values().copied().max().unwrap_or(0);
    out.distinct_targets = counts.len();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct HierarchyExport {
    pub scale: f64,
    pub levels: Vec<Vec<usize>>,
    /// `parents[i]` lists `[child, parent]` for every child in level `i`.
    pub parents: Vec<Vec<[usize; 2]>>,
}

impl From<&DiscreteCenterHierarchy> for HierarchyExport {
    fn from(h: &DiscreteCenterHierarchy) -> Self {
        let parents = (0..h.top())
            .map(|i| {
                h.level(i)
                    .iter()
                    .map(|&p| [p, h.parent(i, p).expect("parent below top")])
                    .collect()
            })
            .collect();
        HierarchyExport {
            scale: h.scale(),
            levels: h.levels().to_vec(),
            parents,
        }
    }
}
