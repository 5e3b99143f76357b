//! Graph files (JSON, DOT, SVG) and offline verification of imported graphs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpannerGraph;
use crate::metric::{Metric, MetricKind};
use crate::spanner::{induced_wspd, stretch_bound, stretch_report, verify_separation_lemma, SeparationReport};
use crate::wspd::{check_separation_parameter, verify_wspd, WspdReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub u: usize,
    pub v: usize,
    pub len: f64,
    pub seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub s: f64,
    pub edges: Vec<EdgeEntry>,
}

impl From<&SpannerGraph> for GraphFile {
    fn from(g: &SpannerGraph) -> Self {
        GraphFile {
            n: g.n(),
            s: g.s(),
            edges: g
                .edges()
                .map(|e| EdgeEntry {
                    u: e.u,
                    v: e.v,
                    len: e.len,
                    seq: e.seq,
                })
                .collect(),
        }
    }
}

impl GraphFile {
    /// Rebuilds the graph, keeping the recorded lengths.
    pub fn to_graph(&self) -> Result<SpannerGraph> {
        check_separation_parameter(self.s)?;
        let mut g = SpannerGraph::new(self.n, self.s);
        let mut edges = self.edges.clone();
        edges.sort_by_key(|e| e.seq);
        for e in edges {
            g.insert(e.u, e.v, e.len, e.seq)?;
        }
        Ok(g)
    }
}

pub fn to_dot(metric: &Metric, g: &SpannerGraph) -> String {
    let mut out = String::from("graph spanner {\n  node [shape=point];\n");
    for i in 0..g.n() {
        match metric.point(i) {
            Some(p) if p.len() == 2 => {
                let _ = writeln!(out, "  {i} [pos=\"{},{}!\"];", p[0], p[1]);
            }
            _ => {
                let _ = writeln!(out, "  {i};");
            }
        }
    }
    for e in g.edges() {
        let _ = writeln!(out, "  {} -- {} [len={}, seq={}];", e.u, e.v, e.len, e.seq);
    }
    out.push_str("}\n");
    out
}

/// A 600×600 drawing; `None` unless the metric is Euclidean in the plane.
pub fn to_svg(metric: &Metric, g: &SpannerGraph) -> Option<String> {
    if metric.kind() != MetricKind::Euclidean || metric.dim_hint() != Some(2) || metric.is_empty() {
        return None;
    }
    let pts: Vec<&[f64]> = (0..metric.len()).map(|i| metric.point(i).unwrap()).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let size = 600.0;
    let pad = 10.0;
    let xy = |p: &[f64]| {
        (
            pad + (p[0] - lo[0]) / span * (size - 2.0 * pad),
            size - pad - (p[1] - lo[1]) / span * (size - 2.0 * pad),
        )
    };
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g stroke=\"#4060a0\" stroke-width=\"0.8\">\n"
    );
    for e in g.edges() {
        let (x1, y1) = xy(pts[e.u]);
        let (x2, y2) = xy(pts[e.v]);
        let _ = writeln!(out, "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>");
    }
    out.push_str("</g>\n<g fill=\"#c03030\">\n");
    for p in &pts {
        let (x, y) = xy(p);
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.5\"/>");
    }
    out.push_str("</g>\n</svg>\n");
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub s: f64,
    pub edges: usize,
    /// Edges whose recorded length differs from the metric distance.
    pub length_mismatches: Vec<(usize, usize)>,
    pub separation: SeparationReport,
    pub coverage: WspdReport,
    pub max_stretch: f64,
    pub stretch_bound: f64,
    pub connected: bool,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.length_mismatches.is_empty()
            && self.separation.is_clean()
            && self.coverage.is_clean()
            && self.connected
            && self.max_stretch <= self.stretch_bound + 1e-9
    }
}

/// Full offline check of a graph against a metric under separation `s`.
pub fn verify_graph(metric: &Metric, file: &GraphFile, s: f64) -> Result<VerifyReport> {
    if file.n != metric.len() {
        return Err(Error::Parse(format!(
            "graph has {} nodes, point set has {}",
            file.n,
            metric.len()
        )));
    }
    let g = GraphFile { s, ..file.clone() }.to_graph()?;
    let length_mismatches = g
        .edges()
        .filter(|e| e.len != metric.dist(e.u, e.v))
        .map(|e| (e.u, e.v))
        .collect();
    let stretch = stretch_report(metric, &g);
    Ok(VerifyReport {
        n: metric.len(),
        s,
        edges: g.edge_count(),
        length_mismatches,
        separation: verify_separation_lemma(metric, &g),
        coverage: verify_wspd(metric, &induced_wspd(metric, &g)),
        max_stretch: stretch.max_stretch,
        stretch_bound: stretch_bound(s),
        connected: stretch.connected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::PairOrder;
    use crate::spanner::build_spanner;

    fn line(xs: &[f64]) -> Metric {
        Metric::euclidean(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn json_roundtrip_verifies() {
        let m = line(&[0.0, 1.0, 3.0, 7.0, 15.0]);
        let g = build_spanner(&m, 2.0, &PairOrder::random(4)).unwrap();
        let file = GraphFile::from(&g);
        let text = serde_json::to_string(&file).unwrap();
        let back: GraphFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        let report = verify_graph(&m, &back, 2.0).unwrap();
        assert!(report.is_clean(), "{report:?}");
        assert_eq!(report.edges, g.edge_count());
    }

    #[test]
    fn corrupted_length_is_reported() {
        let m = line(&[0.0, 1.0, 2.0]);
        let g = build_spanner(&m, 2.0, &PairOrder::random(0)).unwrap();
        let mut file = GraphFile::from(&g);
        file.edges[0].len += 0.5;
        let report = verify_graph(&m, &file, 2.0).unwrap();
        assert_eq!(report.length_mismatches.len(), 1);
        assert!(!report.is_clean());
    }

    #[test]
    fn mst_only_graph_lacks_the_long_edge() {
        let m = line(&[0.0, 1.0, 2.0]);
        let file = GraphFile {
            n: 3,
            s: 2.0,
            edges: vec![
                EdgeEntry { u: 0, v: 1, len: 1.0, seq: 0 },
                EdgeEntry { u: 1, v: 2, len: 1.0, seq: 1 },
            ],
        };
        let report = verify_graph(&m, &file, 2.0).unwrap();
        assert_eq!(report.separation.uncovered_non_edges, vec![(0, 2)]);
        assert!(!report.is_clean());
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let m = line(&[0.0, 1.0]);
        let file = GraphFile { n: 3, s: 2.0, edges: vec![] };
        assert!(verify_graph(&m, &file, 2.0).is_err());
    }

    #[test]
    fn drawings() {
        let m = Metric::euclidean(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let g = build_spanner(&m, 2.0, &PairOrder::random(0)).unwrap();
        let svg = to_svg(&m, &g).unwrap();
        assert_eq!(svg.matches("<line").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 3);
        let dot = to_dot(&m, &g);
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert!(to_svg(&line(&[0.0, 1.0]), &build_spanner(&line(&[0.0, 1.0]), 2.0, &PairOrder::random(0)).unwrap()).is_none());
    }
}
