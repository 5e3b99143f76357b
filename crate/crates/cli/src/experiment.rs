use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use emergent_spanner::export::{to_dot, to_svg, verify_graph, GraphFile, VerifyReport};
use emergent_spanner::hierarchy::{
    build_deformable_spanner, build_hierarchy, check_hierarchy, cousin_pair_wspd, mapping_histogram,
    DeformableSpanner, HierarchyExport,
};
use emergent_spanner::metric::{Metric, MetricKind};
use emergent_spanner::order::PairOrder;
use emergent_spanner::sim::{check_invariants, run_construction};
use emergent_spanner::spanner::{build_spanner, weight_degree_stats};
use emergent_spanner::wspd::{build_greedy_wspd, verify_wspd};

#[derive(Clone, Debug, Serialize)]
pub struct InstanceInfo {
    pub source: String,
    pub metric: &'static str,
    pub n: usize,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ratios {
    pub edges_per_n: f64,
    pub degree_per_lg_alpha: f64,
    pub weight_per_mst_lg_alpha: f64,
    pub messages_per_n_lg_alpha: f64,
    pub store_per_lg_alpha: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Invariants {
    /// Store-only simulation equals the global-information build.
    pub locality: bool,
    /// Spanner edges equal the greedy decomposition's generating pairs.
    pub equivalence: bool,
    pub separation: bool,
    pub stretch: bool,
    pub wspd: bool,
    pub induced_wspd: bool,
    pub stores: bool,
    pub routes: Option<bool>,
    pub nearest_neighbor: bool,
    pub nn_mismatches: usize,
    pub hierarchy: bool,
    pub cousin_separation: bool,
    pub verify: bool,
}

impl Invariants {
    fn all(&self) -> bool {
        self.locality
            && self.equivalence
            && self.separation
            && self.stretch
            && self.wspd
            && self.induced_wspd
            && self.stores
            && self.routes.unwrap_or(true)
            && self.nearest_neighbor
            && self.hierarchy
            && self.cousin_separation
            && self.verify
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub instance: InstanceInfo,
    pub s: f64,
    pub epsilon: Option<f64>,
    pub order: String,
    pub edges: usize,
    pub messages: u64,
    pub max_store: usize,
    pub max_stretch: f64,
    pub max_hops: Option<usize>,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub total_weight: f64,
    pub mst_weight: f64,
    pub alpha: f64,
    pub lg_alpha: f64,
    pub ratios: Ratios,
    pub wspd_pairs: usize,
    pub hierarchy_levels: usize,
    pub mapping_max_multiplicity: usize,
    pub invariants: Invariants,
    pub ok: bool,
}

pub struct RunConfig {
    pub s: f64,
    pub epsilon: Option<f64>,
    pub order: PairOrder,
    pub routes: bool,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Builds, simulates and verifies one instance, writing every artifact
/// into `out`.
pub fn run_instance(metric: &Metric, info: InstanceInfo, cfg: &RunConfig, out: &Path) -> Result<Summary> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let s = cfg.s;
    let sim = run_construction(metric, s, &cfg.order)?;
    let graph = build_spanner(metric, s, &cfg.order)?;
    let keys = |g: &emergent_spanner::SpannerGraph| -> Vec<(usize, usize, u64)> {
        g.edges().map(|e| (e.u, e.v, e.seq)).collect()
    };
    let locality = keys(sim.graph()) == keys(&graph);

    let wspd = build_greedy_wspd(metric, s, &cfg.order)?;
    let generating: Vec<(usize, usize, u64)> = wspd
        .pairs
        .iter()
        .map(|p| (p.center_a, p.center_b, p.seq))
        .collect();
    let equivalence = generating == keys(&graph);
    let wspd_ok = verify_wspd(metric, &wspd).is_clean();

    let report = check_invariants(&sim, cfg.routes)?;
    let stats = weight_degree_stats(metric, &graph)?;

    let h = build_hierarchy(metric)?;
    let hierarchy_ok = check_hierarchy(metric, &h).is_clean();
    let ds = build_deformable_spanner(metric, &h, DeformableSpanner::c_for_separation(s))?;
    let cousin_ok = verify_wspd(metric, &cousin_pair_wspd(metric, &h, &ds))
        .non_separated
        .is_empty();
    let mapping = mapping_histogram(&h, &ds, &wspd);

    let file = GraphFile::from(&graph);
    let verify = verify_graph(metric, &file, s)?;

    write_json(&out.join("graph.json"), &file)?;
    fs::write(out.join("graph.dot"), to_dot(metric, &graph))?;
    if let Some(svg) = to_svg(metric, &graph) {
        fs::write(out.join("graph.svg"), svg)?;
    }
    write_json(&out.join("wspd.json"), &wspd)?;
    write_json(&out.join("hierarchy.json"), &HierarchyExport::from(&h))?;
    write_verify(&out.join("verify.json"), &verify)?;
    let mut log = Vec::new();
    sim.write_log(&mut log)?;
    fs::write(out.join("events.jsonl"), log)?;

    let invariants = Invariants {
        locality,
        equivalence,
        separation: report.separation.is_clean(),
        stretch: report.stretch_ok,
        wspd: wspd_ok,
        induced_wspd: report.coverage.is_clean(),
        stores: report.store_mismatches.is_empty(),
        routes: cfg.routes.then_some(
            report.route_failures.is_empty()
                && report.route_stretch_violations.is_empty()
                && report.hop_violations.is_empty(),
        ),
        nearest_neighbor: report.nn_mismatches.is_empty() && report.nn_approx_violations.is_empty(),
        nn_mismatches: report.nn_mismatches.len(),
        hierarchy: hierarchy_ok,
        cousin_separation: cousin_ok,
        verify: verify.is_clean(),
    };
    let n = metric.len() as f64;
    let summary = Summary {
        instance: info,
        s,
        epsilon: cfg.epsilon,
        order: cfg.order.describe(),
        edges: graph.edge_count(),
        messages: sim.message_count(),
        max_store: sim.max_store(),
        max_stretch: report.max_stretch,
        max_hops: cfg.routes.then_some(report.max_hops),
        avg_degree: stats.avg_degree,
        max_degree: stats.max_degree,
        total_weight: stats.total_weight,
        mst_weight: stats.mst_weight,
        alpha: stats.alpha,
        lg_alpha: stats.lg_alpha,
        ratios: Ratios {
            edges_per_n: stats.edges as f64 / n,
            degree_per_lg_alpha: stats.degree_ratio,
            weight_per_mst_lg_alpha: stats.weight_ratio,
            messages_per_n_lg_alpha: sim.message_count() as f64 / (n * stats.lg_alpha),
            store_per_lg_alpha: sim.max_store() as f64 / stats.lg_alpha,
        },
        wspd_pairs: wspd.pairs.len(),
        hierarchy_levels: h.top() + 1,
        mapping_max_multiplicity: mapping.max_multiplicity,
        ok: invariants.all(),
        invariants,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// The verification report, in the exact form `emspan verify` prints.
pub fn render_verify(report: &VerifyReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn write_verify(path: &Path, report: &VerifyReport) -> Result<()> {
    fs::write(path, render_verify(report)?).with_context(|| format!("writing {}", path.display()))
}

pub fn metric_label(m: &Metric) -> &'static str {
    match m.kind() {
        MetricKind::Euclidean => "euclidean",
        MetricKind::Matrix => "matrix",
    }
}
