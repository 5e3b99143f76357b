//! The uncoordinated spanner.
//!
//! Pairs are checked in an arbitrary order; the edge `pq` is built unless an
//! existing edge `p'q'` already has `p` and `q` inside its endpoint balls of
//! radius `|p'q'| / (2s + 2)` (either orientation). The resulting edges are
//! exactly the generating pairs of the greedy WSPD under the same order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{shortest_paths, Edge, SpannerGraph};
use crate::metric::{mst_weight, Metric};
use crate::order::PairOrder;
use crate::wspd::{check_separation_parameter, CoverTable, WspPair, Wspd};

/// Worst-case stretch `(s + 1) / (s - 1)`.
pub fn stretch_bound(s: f64) -> f64 {
    (s + 1.0) / (s - 1.0)
}

/// Hop budget `⌈2 · x^{1/(1 + lg s)}⌉` for a pair at closest-pair-normalized
/// distance `x`.
pub fn hop_bound(normalized_dist: f64, s: f64) -> usize {
    (2.0 * normalized_dist.powf(1.0 / (1.0 + s.log2()))).ceil() as usize
}

#[inline]
fn edge_covers(metric: &Metric, e: &Edge, p: usize, q: usize) -> bool {
    (metric.dist(p, e.u) <= e.r && metric.dist(q, e.v) <= e.r)
        || (metric.dist(p, e.v) <= e.r && metric.dist(q, e.u) <= e.r)
}

/// The admission rule, evaluated against every edge of `graph`.
pub fn edge_rule_admits(metric: &Metric, graph: &SpannerGraph, p: usize, q: usize) -> bool {
    !graph.edges().any(|e| edge_covers(metric, e, p, q))
}

/// Same answer as [`edge_rule_admits`], looking only at edges incident to
/// points within `|pq| / (2s)` of `p`. A covering edge of length `L` has
/// `L <= |pq| + 2L / (2s + 2)`, so its endpoint near `p` is at most
/// `L / (2s + 2) <= |pq| / (2s)` away.
pub fn edge_rule_admits_local(metric: &Metric, graph: &SpannerGraph, p: usize, q: usize) -> bool {
    let reach = metric.dist(p, q) / (2.0 * graph.s()) * (1.0 + 1e-9);
    for y in metric.ball(p, reach).iter() {
        if graph.incident(y).any(|e| edge_covers(metric, e, p, q)) {
            return false;
        }
    }
    true
}

pub fn build_spanner(metric: &Metric, s: f64, order: &PairOrder) -> Result<SpannerGraph> {
    check_separation_parameter(s)?;
    let mut g = SpannerGraph::new(metric.len(), s);
    for (p, q) in order.pairs(metric)? {
        if edge_rule_admits_local(metric, &g, p, q) {
            g.add_edge(p, q, metric.dist(p, q))?;
        }
    }
    Ok(g)
}

/// The decomposition implied by a spanner: one ball pair per edge, balls
/// taken over the current point set.
pub fn induced_wspd(metric: &Metric, graph: &SpannerGraph) -> Wspd {
    let pairs = graph
        .edges()
        .map(|e| WspPair {
            seq: e.seq,
            center_a: e.u,
            center_b: e.v,
            radius: e.r,
            members_a: metric.ball(e.u, e.r),
            members_b: metric.ball(e.v, e.r),
        })
        .collect();
    Wspd {
        s: graph.s(),
        order: "induced".into(),
        pairs,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SeparationReport {
    /// Non-edges `(p, q)` with no covering edge.
    pub uncovered_non_edges: Vec<(usize, usize)>,
    /// `(earlier seq, later seq)` where the later edge sits inside the earlier
    /// edge's balls.
    pub order_violations: Vec<(u64, u64)>,
}

impl SeparationReport {
    pub fn is_clean(&self) -> bool {
        self.uncovered_non_edges.is_empty() && self.order_violations.is_empty()
    }
}

/// Both parts of the separation lemma. The order check only visits edges
/// with an endpoint within `|pq| / (2s)` of `p` when recorded lengths match
/// the metric, and scans all pairs of edges otherwise.
pub fn verify_separation_lemma(metric: &Metric, graph: &SpannerGraph) -> SeparationReport {
    let mut cover = CoverTable::new(metric.len());
    let mut edges: Vec<&Edge> = graph.edges().collect();
    edges.sort_by_key(|e| e.seq);
    for e in &edges {
        cover.mark(&metric.ball(e.u, e.r), &metric.ball(e.v, e.r));
    }
    let uncovered_non_edges = cover
        .uncovered_pairs()
        .into_iter()
        .filter(|&(p, q)| !graph.has_edge(p, q))
        .collect();
    let exact_lengths = edges.iter().all(|e| e.len == metric.dist(e.u, e.v));
    let mut order_violations = Vec::new();
    if exact_lengths {
        for later in &edges {
            let reach = later.len / (2.0 * graph.s()) * (1.0 + 1e-9);
            for y in metric.ball(later.u, reach).iter() {
                for earlier in graph.incident(y) {
                    if earlier.seq < later.seq && edge_covers(metric, earlier, later.u, later.v) {
                        order_violations.push((earlier.seq, later.seq));
                    }
                }
            }
        }
        order_violations.sort_unstable();
        order_violations.dedup();
    } else {
        for (k, earlier) in edges.iter().enumerate() {
            for later in &edges[k + 1..] {
                if edge_covers(metric, earlier, later.u, later.v) {
                    order_violations.push((earlier.seq, later.seq));
                }
            }
        }
    }
    SeparationReport {
        uncovered_non_edges,
        order_violations,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StretchReport {
    pub max_stretch: f64,
    pub argmax: Option<(usize, usize)>,
    /// Stretch at the 10%, 20%, ..., 100% quantiles of checked pairs.
    pub deciles: Vec<f64>,
    pub connected: bool,
    pub pairs_checked: usize,
    pub exact: bool,
}

fn stretch_from_sources(metric: &Metric, graph: &SpannerGraph, sources: &[usize], exact: bool) -> StretchReport {
    let n = metric.len();
    let mut ratios = Vec::new();
    let mut max_stretch: f64 = if n < 2 { 1.0 } else { 0.0 };
    let mut argmax = None;
    let mut connected = true;
    for &src in sources {
        let dist = shortest_paths(graph, src);
        for (t, &d) in dist.iter().enumerate() {
            if t == src || (exact && t < src) {
                continue;
            }
            let ratio = d / metric.dist(src, t);
            if d.is_infinite() {
                connected = false;
            }
            if ratio > max_stretch {
                max_stretch = ratio;
                argmax = Some((src.min(t), src.max(t)));
            }
            ratios.push(ratio);
        }
    }
    ratios.sort_by(f64::total_cmp);
    let deciles = if ratios.is_empty() {
        Vec::new()
    } else {
        (1..=10)
            .map(|k| ratios[((k * ratios.len()).div_ceil(10)).max(1) - 1])
            .collect()
    };
    StretchReport {
        max_stretch,
        argmax,
        deciles,
        connected,
        pairs_checked: ratios.len(),
        exact,
    }
}

/// Exact stretch over all pairs (one Dijkstra per source).
pub fn stretch_report(metric: &Metric, graph: &SpannerGraph) -> StretchReport {
    let sources: Vec<usize> = (0..metric.len()).collect();
    stretch_from_sources(metric, graph, &sources, true)
}

/// Stretch over all targets of `sources` randomly chosen sources.
pub fn stretch_report_sampled(metric: &Metric, graph: &SpannerGraph, sources: usize, seed: u64) -> StretchReport {
    let n = metric.len();
    if sources >= n {
        return stretch_report(metric, graph);
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ids.truncate(sources);
    ids.sort_unstable();
    stretch_from_sources(metric, graph, &ids, false)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightDegreeStats {
    pub total_weight: f64,
    pub max_degree: usize,
    pub avg_degree: f64,
    pub edges: usize,
    pub mst_weight: f64,
    pub alpha: f64,
    /// `max(1, lg α)`, the normalizer for the two ratios below.
    pub lg_alpha: f64,
    /// `total_weight / (|MST| · lg α)`.
    pub weight_ratio: f64,
    /// `max_degree / lg α`.
    pub degree_ratio: f64,
}

pub fn weight_degree_stats(metric: &Metric, graph: &SpannerGraph) -> Result<WeightDegreeStats> {
    let aspect = metric.aspect_ratio()?;
    let n = metric.len();
    let total_weight: f64 = graph.edges().map(|e| e.len).sum();
    let max_degree = (0..n).map(|x| graph.degree(x)).max().unwrap_or(0);
    let mst = mst_weight(metric);
    let lg_alpha = aspect.lg_norm();
    Ok(WeightDegreeStats {
        total_weight,
        max_degree,
        avg_degree: 2.0 * graph.edge_count() as f64 / n as f64,
        edges: graph.edge_count(),
        mst_weight: mst,
        alpha: aspect.alpha,
        lg_alpha,
        weight_ratio: total_weight / (mst * lg_alpha),
        degree_ratio: max_degree as f64 / lg_alpha,
    })
}

/// Per-point lookup of the pairs containing it, in seq order.
#[derive(Clone, Debug)]
pub struct WspdIndex<'a> {
    wspd: &'a Wspd,
    by_point: Vec<Vec<usize>>,
}

impl<'a> WspdIndex<'a> {
    pub fn new(wspd: &'a Wspd, n: usize) -> Self {
        let mut by_point = vec![Vec::new(); n];
        for (k, pair) in wspd.pairs.iter().enumerate() {
            for x in pair.members_a.iter().chain(pair.members_b.iter()) {
                by_point[x].push(k);
            }
        }
        for list in &mut by_point {
            list.sort_by_key(|&k| wspd.pairs[k].seq);
        }
        WspdIndex { wspd, by_point }
    }

    /// The lowest-seq pair covering `(x, y)`, oriented as
    /// `(center on x's side, center on y's side, pair)`.
    pub fn cover(&self, x: usize, y: usize) -> Option<(usize, usize, &'a WspPair)> {
        self.by_point.get(x)?.iter().find_map(|&k| {
            let pair = &self.wspd.pairs[k];
            if pair.members_a.contains(x) && pair.members_b.contains(y) {
                Some((pair.center_a, pair.center_b, pair))
            } else if pair.members_b.contains(x) && pair.members_a.contains(y) {
                Some((pair.center_b, pair.center_a, pair))
            } else {
                None
            }
        })
    }
}

/// Recursive covering-edge path: `p ⇝ p'`, edge `p'q'`, `q' ⇝ q`.
pub fn hop_stretch_path(graph: &SpannerGraph, index: &WspdIndex<'_>, p: usize, q: usize) -> Result<Vec<usize>> {
    fn walk(graph: &SpannerGraph, index: &WspdIndex<'_>, p: usize, q: usize, out: &mut Vec<usize>) -> Result<()> {
        if p == q {
            return Ok(());
        }
        let (near, far, _) = index.cover(p, q).ok_or(Error::MissingCover(p, q))?;
        if !graph.has_edge(near, far) {
            return Err(Error::MissingEdge(near, far));
        }
        walk(graph, index, p, near, out)?;
        out.push(far);
        walk(graph, index, far, q, out)
    }
    let mut path = vec![p];
    walk(graph, index, p, q, &mut path)?;
    Ok(path)
}

pub fn path_length(metric: &Metric, path: &[usize]) -> f64 {
    path.windows(2).map(|w| metric.dist(w[0], w[1])).sum()
}
