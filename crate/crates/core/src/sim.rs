//! Agent simulator.
//!
//! Every point is an agent that only knows the edge records it has been
//! notified of. A check `(x, y)` is decided by `x` from its own store plus one
//! distance probe per record; a built edge `pq` notifies every present node
//! in `B_r(p)` and `B_r(q)`. Checks are serialized, so the run is a
//! deterministic function of the metric, `s` and the schedule.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cover_radius, SpannerGraph};
use crate::metric::{IdSet, Metric, NewPoint};
use crate::order::PairOrder;
use crate::spanner::{
    hop_bound, induced_wspd, path_length, stretch_bound, stretch_report, verify_separation_lemma,
    SeparationReport,
};
use crate::wspd::{check_separation_parameter, verify_wspd, WspdReport};

/// What a node stores about one edge whose ball contains it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub len: f64,
    pub r: f64,
    /// The endpoint whose ball holds this node.
    pub my_side: usize,
    pub my_dist: f64,
    pub seq: u64,
}

impl EdgeRecord {
    pub fn far(&self) -> usize {
        if self.my_side == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AgentState {
    pub id: usize,
    /// Records in ascending `seq`.
    pub store: Vec<EdgeRecord>,
}

/// Closed balls restricted to present nodes.
#[derive(Clone, Copy, Debug)]
pub struct NearNeighborOracle<'a> {
    metric: &'a Metric,
    present: &'a [bool],
}

impl<'a> NearNeighborOracle<'a> {
    pub fn query(&self, center: usize, r: f64) -> IdSet {
        self.metric
            .ball(center, r)
            .iter()
            .filter(|&j| self.present[j])
            .collect()
    }
}

/// Order in which a joining node checks the present peers.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JoinOrder {
    #[default]
    Ascending,
    Descending,
    Random(u64),
}

impl JoinOrder {
    fn arrange(&self, peers: &mut [usize]) {
        match self {
            JoinOrder::Ascending => peers.sort_unstable(),
            JoinOrder::Descending => peers.sort_unstable_by(|a, b| b.cmp(a)),
            JoinOrder::Random(seed) => {
                peers.sort_unstable();
                peers.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    EdgeBuilt { u: usize, v: usize, len: f64, seq: u64 },
    NotifyBatch { seq: u64, recipients: usize },
    Join { id: usize, records: usize },
    Leave { id: usize, removed_edges: usize, notified: usize },
    Recheck { node: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogEntry {
    pub t: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Route {
    pub path: Vec<usize>,
    /// Distance probes spent choosing records.
    pub probes: usize,
}

impl Route {
    pub fn hops(&self) -> usize {
        self.path.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct SimState {
    metric: Metric,
    s: f64,
    present: Vec<bool>,
    agents: Vec<AgentState>,
    graph: SpannerGraph,
    holders: HashMap<u64, Vec<usize>>,
    message_count: u64,
    checks: u64,
    schedule: PairOrder,
    log: Vec<LogEntry>,
}

/// Runs the whole schedule with every point present.
pub fn run_construction(metric: &Metric, s: f64, schedule: &PairOrder) -> Result<SimState> {
    let mut sim = SimState::dormant(metric.clone(), s)?;
    sim.present.iter_mut().for_each(|p| *p = true);
    sim.schedule = schedule.clone();
    for (x, y) in schedule.pairs(metric)? {
        sim.check(x, y)?;
    }
    Ok(sim)
}

impl SimState {
    /// A system that knows every point of `metric` but has none present.
    pub fn dormant(metric: Metric, s: f64) -> Result<SimState> {
        check_separation_parameter(s)?;
        let n = metric.len();
        Ok(SimState {
            s,
            present: vec![false; n],
            agents: (0..n).map(|id| AgentState { id, store: Vec::new() }).collect(),
            graph: SpannerGraph::new(n, s),
            holders: HashMap::new(),
            message_count: 0,
            checks: 0,
            schedule: PairOrder::default(),
            log: Vec::new(),
            metric,
        })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn graph(&self) -> &SpannerGraph {
        &self.graph
    }

    pub fn schedule(&self) -> &PairOrder {
        &self.schedule
    }

    pub fn message_count(&self) -> u64 {
        self.message_count
    }

    pub fn checks(&self) -> u64 {
        self.checks
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn agent(&self, id: usize) -> &AgentState {
        &self.agents[id]
    }

    pub fn is_present(&self, id: usize) -> bool {
        self.present.get(id).copied().unwrap_or(false)
    }

    /// Present ids, ascending.
    pub fn present_ids(&self) -> Vec<usize> {
        (0..self.present.len()).filter(|&i| self.present[i]).collect()
    }

    pub fn oracle(&self) -> NearNeighborOracle<'_> {
        NearNeighborOracle {
            metric: &self.metric,
            present: &self.present,
        }
    }

    pub fn max_store(&self) -> usize {
        self.agents.iter().map(|a| a.store.len()).max().unwrap_or(0)
    }

    pub fn total_store(&self) -> usize {
        self.agents.iter().map(|a| a.store.len()).sum()
    }

    fn require(&self, id: usize) -> Result<()> {
        if self.is_present(id) {
            Ok(())
        } else {
            Err(Error::NodeAbsent(id))
        }
    }

    fn emit(&mut self, event: Event) {
        let t = self.log.len() as u64;
        self.log.push(LogEntry { t, event });
    }

    /// `x` checks the pair `(x, y)` against its store and builds the edge if
    /// no record covers it. Returns whether an edge was built.
    pub fn check(&mut self, x: usize, y: usize) -> Result<bool> {
        self.require(x)?;
        self.require(y)?;
        if x == y {
            return Err(Error::SelfLoop(x, y));
        }
        self.checks += 1;
        let covered = self.agents[x]
            .store
            .iter()
            .any(|rec| self.metric.dist(y, rec.far()) <= rec.r);
        if covered {
            return Ok(false);
        }
        let len = self.metric.dist(x, y);
        let edge = self.graph.add_edge(x, y, len)?;
        let r = cover_radius(len, self.s);
        let oracle = self.oracle();
        let bx = oracle.query(x, r);
        let by = oracle.query(y, r);
        self.emit(Event::EdgeBuilt {
            u: x,
            v: y,
            len,
            seq: edge.seq,
        });
        let mut notified = Vec::with_capacity(bx.len() + by.len());
        for (side, ball) in [(x, &bx), (y, &by)] {
            for m in ball.iter() {
                let rec = EdgeRecord {
                    u: x,
                    v: y,
                    len,
                    r,
                    my_side: side,
                    my_dist: self.metric.dist(m, side),
                    seq: edge.seq,
                };
                self.agents[m].store.push(rec);
                notified.push(m);
            }
        }
        self.message_count += notified.len() as u64;
        self.emit(Event::NotifyBatch {
            seq: edge.seq,
            recipients: notified.len(),
        });
        self.holders.insert(edge.seq, notified);
        Ok(true)
    }

    /// Adds a point. A point equal to a known but absent one rejoins under
    /// its old id; a point equal to a present one is rejected.
    pub fn insert_node(&mut self, point: NewPoint, order: &JoinOrder) -> Result<usize> {
        let n = self.metric.len();
        let dists: Vec<f64> = match &point {
            NewPoint::Coords(c) => (0..n)
                .map(|j| match self.metric.point(j) {
                    Some(p) => crate::kdtree::euclidean(p, c),
                    None => f64::NAN,
                })
                .collect(),
            NewPoint::Distances(d) => d.clone(),
        };
        let id = match dists.iter().position(|&d| d == 0.0) {
            Some(j) if self.present[j] => return Err(Error::DuplicatePoint(j, n)),
            Some(j) => {
                if let NewPoint::Distances(d) = &point {
                    if let Some(k) = (0..n).find(|&k| d[k] != self.metric.dist(j, k)) {
                        return Err(Error::TriangleViolation(j, j, k));
                    }
                }
                j
            }
            None => {
                let id = self.metric.push(point)?;
                self.present.push(false);
                self.agents.push(AgentState {
                    id,
                    store: Vec::new(),
                });
                self.graph.grow(id + 1);
                id
            }
        };
        self.join(id, order)?;
        Ok(id)
    }

    /// Brings a known absent id online: peers hand over the records of their
    /// edges whose balls contain it, then it checks every present peer.
    pub fn join(&mut self, x: usize, order: &JoinOrder) -> Result<()> {
        self.metric.check_id(x)?;
        if self.present[x] {
            return Err(Error::DuplicatePoint(x, x));
        }
        self.present[x] = true;
        let mut records = Vec::new();
        for e in self.graph.edges() {
            for side in [e.u, e.v] {
                let d = self.metric.dist(x, side);
                if d <= e.r {
                    records.push(EdgeRecord {
                        u: e.u,
                        v: e.v,
                        len: e.len,
                        r: e.r,
                        my_side: side,
                        my_dist: d,
                        seq: e.seq,
                    });
                }
            }
        }
        records.sort_by_key(|r| r.seq);
        for rec in &records {
            self.holders.entry(rec.seq).or_default().push(x);
        }
        self.message_count += records.len() as u64;
        self.emit(Event::Join {
            id: x,
            records: records.len(),
        });
        self.agents[x].store = records;
        let mut peers: Vec<usize> = self.present_ids().into_iter().filter(|&y| y != x).collect();
        order.arrange(&mut peers);
        for y in peers {
            self.check(x, y)?;
        }
        Ok(())
    }

    /// Removes `y` and its edges. Holders of a removed edge drop the record
    /// and recheck themselves against every present node.
    pub fn delete_node(&mut self, y: usize) -> Result<()> {
        self.require(y)?;
        self.present[y] = false;
        for rec in std::mem::take(&mut self.agents[y].store) {
            if let Some(h) = self.holders.get_mut(&rec.seq) {
                h.retain(|&m| m != y);
            }
        }
        let removed = self.graph.remove_incident(y);
        let mut affected = BTreeSet::new();
        let mut notified = 0;
        for e in &removed {
            for h in self.holders.remove(&e.seq).unwrap_or_default() {
                self.agents[h].store.retain(|rec| rec.seq != e.seq);
                affected.insert(h);
                notified += 1;
            }
        }
        self.message_count += notified as u64;
        self.emit(Event::Leave {
            id: y,
            removed_edges: removed.len(),
            notified,
        });
        let present = self.present_ids();
        for a in affected {
            self.emit(Event::Recheck { node: a });
            for &b in &present {
                if b != a {
                    self.check(a, b)?;
                }
            }
        }
        Ok(())
    }

    /// Routes from `p` to `q` using only the stores along the way.
    pub fn local_route(&self, p: usize, q: usize) -> Result<Route> {
        fn walk(sim: &SimState, p: usize, q: usize, out: &mut Route) -> Result<()> {
            if p == q {
                return Ok(());
            }
            let mut hit = None;
            for rec in &sim.agents[p].store {
                out.probes += 1;
                if sim.metric.dist(q, rec.far()) <= rec.r {
                    hit = Some(*rec);
                    break;
                }
            }
            let rec = hit.ok_or_else(|| {
                Error::ProtocolViolation(format!("node {p} has no record covering ({p}, {q})"))
            })?;
            walk(sim, p, rec.my_side, out)?;
            out.path.push(rec.far());
            walk(sim, rec.far(), q, out)
        }
        self.require(p)?;
        self.require(q)?;
        let mut route = Route {
            path: vec![p],
            probes: 0,
        };
        walk(self, p, q, &mut route)?;
        Ok(route)
    }

    /// The nearest endpoint among `x`'s stored records, lowest id on ties.
    pub fn local_nearest_neighbor(&self, x: usize) -> Result<usize> {
        self.require(x)?;
        let mut best: Option<(f64, usize)> = None;
        for rec in &self.agents[x].store {
            for c in [rec.u, rec.v] {
                if c == x {
                    continue;
                }
                let d = self.metric.dist(x, c);
                if best.is_none_or(|(bd, bc)| d < bd || (d == bd && c < bc)) {
                    best = Some((d, c));
                }
            }
        }
        best.map(|(_, c)| c).ok_or_else(|| {
            Error::ProtocolViolation(format!("node {x} has an empty store"))
        })
    }

    /// Brute-force nearest present neighbor, lowest id on ties.
    pub fn brute_nearest_neighbor(&self, x: usize) -> Option<usize> {
        self.present_ids()
            .into_iter()
            .filter(|&j| j != x)
            .min_by(|&a, &b| {
                self.metric
                    .dist(x, a)
                    .total_cmp(&self.metric.dist(x, b))
                    .then(a.cmp(&b))
            })
    }

    /// The present part of the system, renumbered by ascending id.
    pub fn snapshot(&self) -> Result<Snapshot> {
        let ids = self.present_ids();
        Ok(Snapshot {
            metric: self.metric.restrict(&ids)?,
            graph: self.graph.restrict(&ids),
            ids,
        })
    }

    /// Nodes whose store differs from the edges whose balls contain them.
    pub fn store_mismatches(&self) -> Vec<usize> {
        let mut bad = Vec::new();
        for x in self.present_ids() {
            let mut expected: Vec<(u64, usize)> = Vec::new();
            for e in self.graph.edges() {
                for side in [e.u, e.v] {
                    if self.metric.dist(x, side) <= e.r {
                        expected.push((e.seq, side));
                    }
                }
            }
            expected.sort_unstable();
            let got: Vec<(u64, usize)> = self.agents[x]
                .store
                .iter()
                .map(|r| (r.seq, r.my_side))
                .collect();
            if got != expected {
                bad.push(x);
            }
        }
        for x in 0..self.present.len() {
            if !self.present[x] && !self.agents[x].store.is_empty() {
                bad.push(x);
            }
        }
        bad.sort_unstable();
        bad
    }

    pub fn write_log<W: Write>(&self, mut w: W) -> Result<()> {
        for entry in &self.log {
            serde_json::to_writer(&mut w, entry)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    /// `ids[k]` is the original id of snapshot point `k`.
    pub ids: Vec<usize>,
    pub metric: Metric,
    pub graph: SpannerGraph,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub nodes: usize,
    pub edges: usize,
    pub separation: SeparationReport,
    pub max_stretch: f64,
    pub stretch_ok: bool,
    pub connected: bool,
    pub coverage: WspdReport,
    /// `(node, local answer, brute-force answer)`.
    pub nn_mismatches: Vec<(usize, usize, usize)>,
    /// Local answers farther than `1 + 1/(2s + 1)` times the true distance.
    pub nn_approx_violations: Vec<usize>,
    pub store_mismatches: Vec<usize>,
    pub route_failures: Vec<(usize, usize)>,
    pub route_stretch_violations: Vec<(usize, usize)>,
    pub hop_violations: Vec<(usize, usize)>,
    pub max_hops: usize,
    pub max_route_stretch: f64,
}

impl InvariantReport {
    pub fn is_clean(&self) -> bool {
        self.separation.is_clean()
            && self.stretch_ok
            && self.coverage.is_clean()
            && self.nn_mismatches.is_empty()
            && self.nn_approx_violations.is_empty()
            && self.store_mismatches.is_empty()
            && self.route_failures.is_empty()
            && self.route_stretch_violations.is_empty()
            && self.hop_violations.is_empty()
    }

    /// Every check except exact nearest neighbors.
    pub fn is_clean_except_nn(&self) -> bool {
        self.nn_approx_violations.is_empty()
            && InvariantReport {
                nn_mismatches: Vec::new(),
                ..self.clone()
            }
            .is_clean()
    }
}

const BOUND_SLACK: f64 = 1e-9;

/// Separation lemma, exact stretch, coverage of the induced decomposition,
/// nearest neighbors, store consistency and, when `routes` is set, local
/// routing between every present pair.
pub fn check_invariants(sim: &SimState, routes: bool) -> Result<InvariantReport> {
    let snap = sim.snapshot()?;
    let m = &snap.metric;
    let stretch = stretch_report(m, &snap.graph);
    let bound = stretch_bound(sim.s);
    let coverage = verify_wspd(m, &induced_wspd(m, &snap.graph));

    let mut nn_mismatches = Vec::new();
    let mut nn_approx_violations = Vec::new();
    if snap.ids.len() >= 2 {
        let factor = 1.0 + 1.0 / (2.0 * sim.s + 1.0);
        for &x in &snap.ids {
            let local = sim.local_nearest_neighbor(x)?;
            let brute = sim.brute_nearest_neighbor(x).expect("n >= 2");
            if local != brute {
                nn_mismatches.push((x, local, brute));
            }
            if sim.metric.dist(x, local) > factor * sim.metric.dist(x, brute) * (1.0 + BOUND_SLACK) {
                nn_approx_violations.push(x);
            }
        }
    }

    let mut report = InvariantReport {
        nodes: snap.ids.len(),
        edges: snap.graph.edge_count(),
        separation: verify_separation_lemma(m, &snap.graph),
        max_stretch: stretch.max_stretch,
        stretch_ok: stretch.connected && stretch.max_stretch <= bound + BOUND_SLACK,
        connected: stretch.connected,
        coverage,
        nn_mismatches,
        nn_approx_violations,
        store_mismatches: sim.store_mismatches(),
        route_failures: Vec::new(),
        route_stretch_violations: Vec::new(),
        hop_violations: Vec::new(),
        max_hops: 0,
        max_route_stretch: 1.0,
    };
    if routes && snap.ids.len() >= 2 {
        let d_min = m.aspect_ratio()?.d_min;
        for (k, &p) in snap.ids.iter().enumerate() {
            for &q in &snap.ids[k + 1..] {
                match sim.local_route(p, q) {
                    Ok(route) => {
                        let d = sim.metric.dist(p, q);
                        let ratio = path_length(&sim.metric, &route.path) / d;
                        report.max_route_stretch = report.max_route_stretch.max(ratio);
                        report.max_hops = report.max_hops.max(route.hops());
                        if ratio > bound + BOUND_SLACK {
                            report.route_stretch_violations.push((p, q));
                        }
                        if route.hops() > hop_bound(d / d_min, sim.s) {
                            report.hop_violations.push((p, q));
                        }
                    }
                    Err(_) => report.route_failures.push((p, q)),
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimSummary {
    pub edges: usize,
    pub messages: u64,
    pub max_store: usize,
    pub max_stretch: f64,
    pub max_hops: usize,
}

impl SimSummary {
    pub fn from_report(sim: &SimState, report: &InvariantReport) -> SimSummary {
        SimSummary {
            edges: sim.graph.edge_count(),
            messages: sim.message_count,
            max_store: sim.max_store(),
            max_stretch: report.max_stretch,
            max_hops: report.max_hops,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{permutations, OrderStrategy};
    use crate::spanner::{build_spanner, hop_stretch_path, WspdIndex};
    use rand::Rng;

    fn line(xs: &[f64]) -> Metric {
        Metric::euclidean(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    fn cloud(seed: u64, n: usize) -> Metric {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Metric::euclidean((0..n).map(|_| vec![rng.gen(), rng.gen()]).collect()).unwrap()
    }

    fn edge_keys(g: &SpannerGraph) -> Vec<(usize, usize, u64)> {
        g.edges().map(|e| (e.u, e.v, e.seq)).collect()
    }

    #[test]
    fn two_points() {
        let m = line(&[0.0, 5.0]);
        let sim = run_construction(&m, 2.0, &PairOrder::random(1)).unwrap();
        assert_eq!(sim.graph().edge_count(), 1);
        assert_eq!(sim.message_count(), 2);
        assert_eq!(sim.local_nearest_neighbor(0).unwrap(), 1);
        assert_eq!(sim.local_nearest_neighbor(1).unwrap(), 0);
        assert_eq!(sim.local_route(0, 1).unwrap().path, vec![0, 1]);
    }

    #[test]
    fn collinear_three_all_orders() {
        let m = line(&[0.0, 1.0, 2.0]);
        for perm in permutations(&[(0, 1), (0, 2), (1, 2)]) {
            let sim = run_construction(&m, 2.0, &PairOrder::explicit(perm)).unwrap();
            assert_eq!(sim.graph().edge_count(), 3);
            assert_eq!(sim.message_count(), 6);
            assert_eq!(sim.local_nearest_neighbor(1).unwrap(), 0);
            assert!(check_invariants(&sim, true).unwrap().is_clean());
        }
    }

    #[test]
    fn log_is_json_lines() {
        let m = line(&[0.0, 1.0, 2.0]);
        let sim = run_construction(&m, 2.0, &PairOrder::new(OrderStrategy::Lexicographic)).unwrap();
        let mut buf = Vec::new();
        sim.write_log(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0]["kind"], "edge_built");
        assert_eq!(lines[0]["t"], 0);
        assert_eq!(lines[1]["kind"], "notify_batch");
        assert_eq!(lines[1]["recipients"], 2);
    }

    #[test]
    fn store_decisions_match_global_rule() {
        for seed in 0..6 {
            let m = cloud(seed, 120);
            for order in [
                PairOrder::random(seed),
                PairOrder::new(OrderStrategy::DecreasingDistance),
                PairOrder::new(OrderStrategy::IncreasingDistance),
            ] {
                let sim = run_construction(&m, 2.0, &order).unwrap();
                let g = build_spanner(&m, 2.0, &order).unwrap();
                assert_eq!(edge_keys(sim.graph()), edge_keys(&g));
                let w = induced_wspd(&m, &g);
                let members: usize = w.pairs.iter().map(|p| p.size()).sum();
                assert_eq!(sim.total_store(), members);
                assert_eq!(sim.message_count() as usize, members);
            }
        }
    }

    #[test]
    fn route_matches_recursive_path() {
        let m = cloud(3, 80);
        let order = PairOrder::random(3);
        let sim = run_construction(&m, 2.0, &order).unwrap();
        let w = induced_wspd(&m, sim.graph());
        let index = WspdIndex::new(&w, m.len());
        for p in 0..m.len() {
            for q in 0..m.len() {
                if p != q {
                    let local = sim.local_route(p, q).unwrap().path;
                    assert_eq!(local, hop_stretch_path(sim.graph(), &index, p, q).unwrap());
                }
            }
        }
        let r = check_invariants(&sim, true).unwrap();
        assert!(r.route_failures.is_empty() && r.hop_violations.is_empty());
    }

    /// `(0, 2)` is checked first and its far ball swallows point 1, so node 0
    /// never hears of any edge reaching 1.
    #[test]
    fn local_nn_can_miss_the_true_neighbor() {
        let m = line(&[0.0, 1.0, 1.15]);
        let order = PairOrder::explicit(vec![(0, 2), (0, 1), (1, 2)]);
        let sim = run_construction(&m, 2.0, &order).unwrap();
        assert!(!sim.graph().has_edge(0, 1));
        assert_eq!(sim.brute_nearest_neighbor(0), Some(1));
        assert_eq!(sim.local_nearest_neighbor(0).unwrap(), 2);
        let r = check_invariants(&sim, true).unwrap();
        assert_eq!(r.nn_mismatches, vec![(0, 2, 1)]);
        assert!(r.is_clean_except_nn());
    }

    #[test]
    fn local_nn_within_approximation_factor() {
        for seed in 0..5 {
            let sim = run_construction(&cloud(seed, 150), 2.0, &PairOrder::random(seed)).unwrap();
            let r = check_invariants(&sim, false).unwrap();
            assert!(r.nn_approx_violations.is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn insert_into_small_systems() {
        let m = line(&[0.0, 3.0]);
        let mut sim = SimState::dormant(m, 2.0).unwrap();
        sim.join(0, &JoinOrder::Ascending).unwrap();
        assert_eq!(sim.checks(), 0);
        sim.join(1, &JoinOrder::Ascending).unwrap();
        assert_eq!(sim.checks(), 1);
        assert_eq!(sim.graph().edge_count(), 1);
        let id = sim.insert_node(NewPoint::Coords(vec![10.0]), &JoinOrder::Ascending).unwrap();
        assert_eq!(id, 2);
        assert!(check_invariants(&sim, true).unwrap().is_clean());
        assert!(matches!(
            sim.insert_node(NewPoint::Coords(vec![3.0]), &JoinOrder::Ascending),
            Err(Error::DuplicatePoint(1, _))
        ));
    }

    #[test]
    fn incremental_build_passes_invariants() {
        let full = cloud(5, 100);
        let ids: Vec<usize> = (0..99).collect();
        let base = full.restrict(&ids).unwrap();
        let mut sim = run_construction(&base, 2.0, &PairOrder::random(5)).unwrap();
        let last = full.point(99).unwrap().to_vec();
        sim.insert_node(NewPoint::Coords(last), &JoinOrder::Ascending).unwrap();
        assert!(check_invariants(&sim, true).unwrap().is_clean_except_nn());
    }

    #[test]
    fn closest_partner_gets_direct_edge() {
        let mut sim = run_construction(&line(&[0.0, 4.0, 9.0, 20.0]), 2.0, &PairOrder::random(2)).unwrap();
        let id = sim.insert_node(NewPoint::Coords(vec![9.5]), &JoinOrder::Descending).unwrap();
        assert!(sim.graph().has_edge(2, id));
    }

    #[test]
    fn delete_one_of_two() {
        let mut sim = run_construction(&line(&[0.0, 1.0]), 2.0, &PairOrder::random(0)).unwrap();
        sim.delete_node(1).unwrap();
        assert_eq!(sim.graph().edge_count(), 0);
        assert!(sim.agent(0).store.is_empty() && sim.agent(1).store.is_empty());
        assert!(matches!(sim.delete_node(1), Err(Error::NodeAbsent(1))));
    }

    #[test]
    fn delete_and_rejoin() {
        let m = cloud(8, 100);
        let mut sim = run_construction(&m, 2.0, &PairOrder::random(8)).unwrap();
        let before = sim.max_store();
        let victim = (0..m.len()).max_by_key(|&x| sim.graph().degree(x)).unwrap();
        sim.delete_node(victim).unwrap();
        assert!(check_invariants(&sim, true).unwrap().is_clean_except_nn());
        let coords = m.point(victim).unwrap().to_vec();
        let id = sim.insert_node(NewPoint::Coords(coords), &JoinOrder::Ascending).unwrap();
        assert_eq!(id, victim);
        assert!(check_invariants(&sim, true).unwrap().is_clean_except_nn());
        assert!(sim.max_store() <= 2 * before);
    }

    #[test]
    fn matrix_rejoin_requires_same_row() {
        let rows = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ];
        let m = Metric::from_matrix(rows, true).unwrap();
        let mut sim = run_construction(&m, 2.0, &PairOrder::random(0)).unwrap();
        sim.delete_node(2).unwrap();
        assert!(sim
            .insert_node(NewPoint::Distances(vec![2.0, 1.5, 0.0]), &JoinOrder::Ascending)
            .is_err());
        let id = sim
            .insert_node(NewPoint::Distances(vec![2.0, 1.0, 0.0]), &JoinOrder::Ascending)
            .unwrap();
        assert_eq!(id, 2);
        assert!(check_invariants(&sim, true).unwrap().is_clean());
    }
}
