//! Point sets with a distance oracle.
//!
//! A [`Metric`] is either a set of Euclidean points or an explicit symmetric
//! distance table. Everything else in the crate runs over this type and only
//! ever asks it for `dist(i, j)` and closed-ball queries.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::kdtree::{euclidean, KdTree};

/// Relative slack when validating the triangle inequality of an explicit
/// table. Shortest-path tables summed in different orders disagree in the
/// last bits; the construction itself never uses this constant.
pub const TRIANGLE_SLACK: f64 = 1e-12;

/// Sorted, duplicate-free list of point ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IdSet(Vec<usize>);

impl IdSet {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        IdSet(ids)
    }

    pub fn singleton(id: usize) -> Self {
        IdSet(vec![id])
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn is_subset(&self, other: &IdSet) -> bool {
        self.iter().all(|id| other.contains(id))
    }
}

impl FromIterator<usize> for IdSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IdSet::new(iter.into_iter().collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    Euclidean,
    Matrix,
}

#[derive(Clone, Debug)]
enum Repr {
    Euclidean { dim: usize, coords: Vec<f64> },
    Matrix { n: usize, table: Vec<f64> },
}

/// A point added to an existing metric: coordinates for Euclidean metrics,
/// distances to every existing point for explicit tables.
#[derive(Clone, Debug, PartialEq)]
pub enum NewPoint {
    Coords(Vec<f64>),
    Distances(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AspectRatio {
    pub alpha: f64,
    pub d_min: f64,
    pub d_max: f64,
    /// A pair realizing `d_min`, lowest ids first.
    pub closest: (usize, usize),
}

impl AspectRatio {
    /// Base-2 logarithm of the aspect ratio, floored at 1 so that it can be
    /// used as a normalizer for instances with α < 2.
    pub fn lg_norm(&self) -> f64 {
        self.alpha.log2().max(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct Metric {
    repr: Repr,
    index: Option<KdTree>,
    extremes: Option<AspectRatio>,
}

impl Metric {
    /// Euclidean metric from one row of coordinates per point.
    pub fn euclidean(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index: i,
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Euclidean metric from a row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 && !coords.is_empty() {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: 1,
                got: 0,
            });
        }
        if dim > 0 && !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                index: coords.len() / dim,
                expected: dim,
                got: coords.len() % dim,
            });
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i / dim.max(1)));
        }
        let mut m = Metric {
            repr: Repr::Euclidean { dim, coords },
            index: None,
            extremes: None,
        };
        m.reindex();
        for i in 0..m.len() {
            if let Some(j) = m.ball(i, 0.0).iter().find(|&j| j != i) {
                return Err(Error::DuplicatePoint(i.min(j), i.max(j)));
            }
        }
        m.extremes = m.scan_extremes();
        Ok(m)
    }

    /// Explicit distance table. Checks shape, zero diagonal, symmetry,
    /// positivity off the diagonal and (optionally) the triangle inequality.
    pub fn from_matrix(rows: Vec<Vec<f64>>, check_triangle: bool) -> Result<Self> {
        let n = rows.len();
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    expected: n,
                    got: row.len(),
                });
            }
            table.extend_from_slice(row);
        }
        for i in 0..n {
            if table[i * n + i] != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
            for j in 0..n {
                let d = table[i * n + j];
                if !d.is_finite() {
                    return Err(Error::NonFinite(i));
                }
                if d < 0.0 {
                    return Err(Error::NegativeDistance(i, j));
                }
                if d != table[j * n + i] {
                    return Err(Error::Asymmetric(i.min(j), i.max(j)));
                }
                if i < j && d == 0.0 {
                    return Err(Error::DuplicatePoint(i, j));
                }
            }
        }
        if check_triangle {
            for i in 0..n {
                for j in 0..n {
                    let dij = table[i * n + j];
                    for k in 0..n {
                        let via = dij + table[j * n + k];
                        if table[i * n + k] > via * (1.0 + TRIANGLE_SLACK) {
                            return Err(Error::TriangleViolation(i, j, k));
                        }
                    }
                }
            }
        }
        let mut m = Metric {
            repr: Repr::Matrix { n, table },
            index: None,
            extremes: None,
        };
        m.extremes = m.scan_extremes();
        Ok(m)
    }

    fn reindex(&mut self) {
        self.index = match &self.repr {
            Repr::Euclidean { dim, coords } if *dim > 0 => Some(KdTree::build(coords, *dim)),
            _ => None,
        };
    }

    fn scan_extremes(&self) -> Option<AspectRatio> {
        let n = self.len();
        if n < 2 {
            return None;
        }
        let mut best = AspectRatio {
            alpha: 1.0,
            d_min: f64::INFINITY,
            d_max: 0.0,
            closest: (0, 1),
        };
        for i in 0..n {
            for j in i + 1..n {
                let d = self.dist(i, j);
                if d < best.d_min {
                    best.d_min = d;
                    best.closest = (i, j);
                }
                best.d_max = best.d_max.max(d);
            }
        }
        best.alpha = best.d_max / best.d_min;
        Some(best)
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Euclidean { dim, coords } => {
                if *dim == 0 {
                    0
                } else {
                    coords.len() / dim
                }
            }
            Repr::Matrix { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> MetricKind {
        match self.repr {
            Repr::Euclidean { .. } => MetricKind::Euclidean,
            Repr::Matrix { .. } => MetricKind::Matrix,
        }
    }

    /// Ambient dimension for Euclidean inputs.
    pub fn dim_hint(&self) -> Option<usize> {
        match self.repr {
            Repr::Euclidean { dim, .. } => Some(dim),
            Repr::Matrix { .. } => None,
        }
    }

    pub fn point(&self, i: usize) -> Option<&[f64]> {
        match &self.repr {
            Repr::Euclidean { dim, coords } => coords.get(i * dim..(i + 1) * dim),
            Repr::Matrix { .. } => None,
        }
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Euclidean { dim, coords } => euclidean(
                &coords[i * dim..(i + 1) * dim],
                &coords[j * dim..(j + 1) * dim],
            ),
            Repr::Matrix { n, table } => table[i * n + j],
        }
    }

    /// Closed ball `{j : dist(center, j) <= r}`, via the spatial index when
    /// there is one.
    pub fn ball(&self, center: usize, r: f64) -> IdSet {
        match (&self.repr, &self.index) {
            (Repr::Euclidean { dim, coords }, Some(tree)) => {
                let mut out = Vec::new();
                let q = &coords[center * dim..(center + 1) * dim];
                tree.within(coords, q, r, &mut out);
                IdSet::new(out)
            }
            _ => self.ball_scan(center, r),
        }
    }

    /// Reference linear-scan ball.
    pub fn ball_scan(&self, center: usize, r: f64) -> IdSet {
        IdSet((0..self.len()).filter(|&j| self.dist(center, j) <= r).collect())
    }

    pub fn aspect_ratio(&self) -> Result<AspectRatio> {
        self.extremes.ok_or(Error::TooFewPoints {
            need: 2,
            got: self.len(),
        })
    }

    pub fn check_id(&self, id: usize) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::IdOutOfRange(id, self.len()))
        }
    }

    /// Appends a point, returning its id. Rejects coincident points.
    pub fn push(&mut self, point: NewPoint) -> Result<usize> {
        let n = self.len();
        let new_dists: Vec<f64> = match (&self.repr, &point) {
            (Repr::Euclidean { dim, coords }, NewPoint::Coords(c)) => {
                if c.len() != *dim {
                    return Err(Error::DimensionMismatch {
                        index: n,
                        expected: *dim,
                        got: c.len(),
                    });
                }
                if c.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite(n));
                }
                (0..n)
                    .map(|j| euclidean(c, &coords[j * dim..(j + 1) * dim]))
                    .collect()
            }
            (Repr::Matrix { n: m, table }, NewPoint::Distances(d)) => {
                if d.len() != *m {
                    return Err(Error::NotSquare {
                        row: n,
                        expected: *m,
                        got: d.len(),
                    });
                }
                for (j, &x) in d.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(Error::NonFinite(n));
                    }
                    if x < 0.0 {
                        return Err(Error::NegativeDistance(n, j));
                    }
                }
                for i in 0..*m {
                    for j in 0..*m {
                        let via = d[i] + table[i * m + j];
                        if d[j] > via * (1.0 + TRIANGLE_SLACK) {
                            return Err(Error::TriangleViolation(n, i, j));
                        }
                        if table[i * m + j] > (d[i] + d[j]) * (1.0 + TRIANGLE_SLACK) {
                            return Err(Error::TriangleViolation(i, n, j));
                        }
                    }
                }
                d.clone()
            }
            _ => {
                return Err(Error::Parse(
                    "new point does not match the metric kind".into(),
                ))
            }
        };
        if let Some(j) = new_dists.iter().position(|&d| d == 0.0) {
            return Err(Error::DuplicatePoint(j, n));
        }
        match (&mut self.repr, point) {
            (Repr::Euclidean { coords, .. }, NewPoint::Coords(c)) => coords.extend(c),
            (Repr::Matrix { n: m, table }, NewPoint::Distances(d)) => {
                let old = std::mem::take(table);
                let size = *m + 1;
                let mut grown = vec![0.0; size * size];
                for i in 0..*m {
                    grown[i * size..i * size + *m].copy_from_slice(&old[i * *m..(i + 1) * *m]);
                    grown[i * size + *m] = d[i];
                    grown[*m * size + i] = d[i];
                }
                *table = grown;
                *m = size;
            }
            _ => unreachable!(),
        }
        self.reindex();
        if let Some(ext) = &mut self.extremes {
            for (j, &d) in new_dists.iter().enumerate() {
                if d < ext.d_min {
                    ext.d_min = d;
                    ext.closest = (j, n);
                }
                ext.d_max = ext.d_max.max(d);
            }
            ext.alpha = ext.d_max / ext.d_min;
        } else {
            self.extremes = self.scan_extremes();
        }
        Ok(n)
    }

    /// The metric induced on `ids`, renumbered `0..ids.len()` in the given
    /// order.
    pub fn restrict(&self, ids: &[usize]) -> Result<Metric> {
        match &self.repr {
            Repr::Euclidean { dim, .. } => {
                let mut coords = Vec::with_capacity(ids.len() * dim);
                for &i in ids {
                    self.check_id(i)?;
                    coords.extend_from_slice(self.point(i).expect("euclidean"));
                }
                Metric::from_flat(*dim, coords)
            }
            Repr::Matrix { .. } => {
                let rows = ids
                    .iter()
                    .map(|&i| ids.iter().map(|&j| self.dist(i, j)).collect())
                    .collect();
                Metric::from_matrix(rows, false)
            }
        }
    }

    /// Reads a point file: one point per line, comma separated, with an
    /// optional `# dim=<d>` header. Other `#` lines are comments.
    pub fn read_points<R: Read>(reader: R) -> Result<Metric> {
        let mut dim: Option<usize> = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                if let Some(d) = rest.trim().strip_prefix("dim=") {
                    dim = Some(d.trim().parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad dim header", lineno + 1))
                    })?);
                }
                continue;
            }
            rows.push(parse_row(t, lineno)?);
        }
        if let Some(d) = dim {
            if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
                return Err(Error::DimensionMismatch {
                    index: i,
                    expected: d,
                    got: r.len(),
                });
            }
        }
        Metric::euclidean(rows)
    }

    pub fn read_matrix<R: Read>(reader: R, check_triangle: bool) -> Result<Metric> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (lineno, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("row {}: bad number {f:?}", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Metric::from_matrix(rows, check_triangle)
    }

    pub fn load_points(path: impl AsRef<Path>) -> Result<Metric> {
        Self::read_points(std::fs::File::open(path)?)
    }

    pub fn load_matrix(path: impl AsRef<Path>, check_triangle: bool) -> Result<Metric> {
        Self::read_matrix(std::fs::File::open(path)?, check_triangle)
    }

    /// Writes one point per line, or the full table for a matrix metric.
    /// Floats use shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match &self.repr {
            Repr::Euclidean { dim, coords } => {
                for p in coords.chunks(*dim) {
                    write_row(&mut w, p)?;
                }
            }
            Repr::Matrix { n, table } => {
                for row in table.chunks(*n) {
                    write_row(&mut w, row)?;
                }
            }
        }
        Ok(())
    }
}

fn parse_row(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: bad number {f:?}", lineno + 1)))
        })
        .collect()
}

fn write_row<W: Write>(w: &mut W, row: &[f64]) -> Result<()> {
    let mut first = true;
    for x in row {
        if !first {
            write!(w, ",")?;
        }
        write!(w, "{x:?}")?;
        first = false;
    }
    writeln!(w)?;
    Ok(())
}

pub fn diam(metric: &Metric, set: &IdSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let ids = set.as_slice();
    let mut best = 0.0f64;
    for (k, &i) in ids.iter().enumerate() {
        for &j in &ids[k + 1..] {
            best = best.max(metric.dist(i, j));
        }
    }
    Ok(best)
}

pub fn set_distance(metric: &Metric, a: &IdSet, b: &IdSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = f64::INFINITY;
    for i in a.iter() {
        for j in b.iter() {
            best = best.min(metric.dist(i, j));
        }
    }
    Ok(best)
}

/// `d(A, B) >= s * max(diam A, diam B)`, compared exactly. Empty sets are never
/// separated.
pub fn is_s_well_separated(metric: &Metric, a: &IdSet, b: &IdSet, s: f64) -> bool {
    match (set_distance(metric, a, b), diam(metric, a), diam(metric, b)) {
        (Ok(d), Ok(da), Ok(db)) => d >= s * da.max(db),
        _ => false,
    }
}

/// Weight of a minimum spanning tree of the complete distance graph (dense
/// Prim, O(n²)).
pub fn mst_weight(metric: &Metric) -> f64 {
    let n = metric.len();
    if n < 2 {
        return 0.0;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut bu = f64::INFINITY;
        for v in 0..n {
            if !in_tree[v] && best[v] < bu {
                bu = best[v];
                u = v;
            }
        }
        in_tree[u] = true;
        total += bu;
        for v in 0..n {
            if !in_tree[v] {
                let d = metric.dist(u, v);
                if d < best[v] {
                    best[v] = d;
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn line(xs: &[f64]) -> Metric {
        Metric::euclidean(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    fn ids(v: &[usize]) -> IdSet {
        IdSet::new(v.to_vec())
    }

    #[test]
    fn aspect_ratio_examples() {
        let a = line(&[0.0, 1.0, 3.0]).aspect_ratio().unwrap();
        assert_eq!(a.alpha, 3.0);
        assert_eq!((a.d_min, a.d_max), (1.0, 3.0));
        assert_eq!(a.closest, (0, 1));
        let b = line(&[0.0, 5.0]).aspect_ratio().unwrap();
        assert_eq!(b.alpha, 1.0);
        assert!(matches!(
            line(&[2.0]).aspect_ratio(),
            Err(Error::TooFewPoints { got: 1, .. })
        ));
    }

    #[test]
    fn ball_examples() {
        let m = line(&[0.0, 1.0, 2.0]);
        assert_eq!(m.ball(1, 1.0), ids(&[0, 1, 2]));
        assert_eq!(m.ball(2, 0.0), ids(&[2]));
        let m = line(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(m.ball(0, 2.5), ids(&[0, 1]));
    }

    #[test]
    fn diam_and_set_distance() {
        let m = line(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(diam(&m, &ids(&[2])).unwrap(), 0.0);
        assert_eq!(diam(&m, &ids(&[0, 1])).unwrap(), 1.0);
        assert_eq!(set_distance(&m, &ids(&[0, 1]), &ids(&[2, 3])).unwrap(), 9.0);
        assert_eq!(set_distance(&m, &ids(&[0, 1]), &ids(&[0, 1])).unwrap(), 0.0);
        assert!(matches!(diam(&m, &IdSet::default()), Err(Error::EmptySet)));
        assert!(matches!(
            set_distance(&m, &IdSet::default(), &ids(&[0])),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn well_separated_examples() {
        let m = line(&[0.0, 1.0, 10.0, 11.0]);
        assert!(is_s_well_separated(&m, &ids(&[0]), &ids(&[3]), 1e6));
        assert!(is_s_well_separated(&m, &ids(&[0, 1]), &ids(&[2, 3]), 9.0));
        assert!(!is_s_well_separated(&m, &ids(&[0, 1]), &ids(&[2, 3]), 9.01));
        assert!(!is_s_well_separated(&m, &ids(&[0, 1]), &ids(&[1, 2]), 0.1));
    }

    #[test]
    fn mst_examples() {
        assert_eq!(mst_weight(&line(&[0.0, 1.0, 2.0])), 2.0);
        assert_eq!(mst_weight(&line(&[0.0, 7.0])), 7.0);
        let square = Metric::euclidean(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        // Brute force over the 16 spanning trees of K4 (all 3-edge subsets
        // that connect the four corners).
        let pairs: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .collect();
        let mut best = f64::INFINITY;
        let mut trees = 0;
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            let mut comp: Vec<usize> = (0..4).collect();
            let mut w = 0.0;
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    w += square.dist(i, j);
                    let (ci, cj) = (comp[i], comp[j]);
                    comp.iter_mut().filter(|c| **c == cj).for_each(|c| *c = ci);
                }
            }
            if comp.iter().all(|&c| c == comp[0]) {
                trees += 1;
                best = best.min(w);
            }
        }
        assert_eq!(trees, 16);
        assert_eq!(best, 3.0);
        assert_eq!(mst_weight(&square), best);
    }

    #[test]
    fn rejects_duplicates_and_bad_matrices() {
        assert!(matches!(
            line(&[0.0, 1.0]).restrict(&[0, 0]),
            Err(Error::DuplicatePoint(0, 1))
        ));
        assert!(matches!(
            Metric::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]], true),
            Err(Error::Asymmetric(0, 1))
        ));
        assert!(matches!(
            Metric::from_matrix(vec![vec![1.0, 1.0], vec![1.0, 0.0]], true),
            Err(Error::NonzeroDiagonal(0))
        ));
        assert!(matches!(
            Metric::from_matrix(vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]], true),
            Err(Error::TriangleViolation(..))
        ));
        assert!(Metric::from_matrix(
            vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]],
            false
        )
        .is_ok());
        assert!(matches!(
            Metric::from_matrix(vec![vec![0.0, 0.0], vec![0.0, 0.0]], true),
            Err(Error::DuplicatePoint(0, 1))
        ));
    }

    #[test]
    fn push_updates_extremes_and_index() {
        let mut m = line(&[0.0, 4.0]);
        assert_eq!(m.push(NewPoint::Coords(vec![5.0])).unwrap(), 2);
        let a = m.aspect_ratio().unwrap();
        assert_eq!((a.d_min, a.d_max, a.closest), (1.0, 5.0, (1, 2)));
        assert_eq!(m.ball(2, 1.0), ids(&[1, 2]));
        assert!(matches!(
            m.push(NewPoint::Coords(vec![4.0])),
            Err(Error::DuplicatePoint(1, 3))
        ));

        let mut t = Metric::from_matrix(vec![vec![0.0, 2.0], vec![2.0, 0.0]], true).unwrap();
        t.push(NewPoint::Distances(vec![1.0, 1.0])).unwrap();
        assert_eq!(t.dist(2, 0), 1.0);
        assert_eq!(t.dist(1, 2), 1.0);
        assert!(matches!(
            t.push(NewPoint::Distances(vec![0.5, 5.0, 1.0])),
            Err(Error::TriangleViolation(..))
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let m = Metric::euclidean(vec![vec![0.1, 0.2], vec![1.0 / 3.0, 7.0]]).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = Metric::read_points(&buf[..]).unwrap();
        assert_eq!(back.point(1), m.point(1));
        assert_eq!(back.dim_hint(), Some(2));

        let bad = "# dim=3\n1,2\n";
        assert!(matches!(
            Metric::read_points(bad.as_bytes()),
            Err(Error::DimensionMismatch { .. })
        ));

        let t = Metric::read_matrix("0,1.5\n1.5,0\n".as_bytes(), true).unwrap();
        assert_eq!(t.dist(0, 1), 1.5);
        assert_eq!(t.kind(), MetricKind::Matrix);
    }

    fn points_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 2), 2..60)
    }

    proptest! {
        #[test]
        fn index_ball_equals_scan(points in points_strategy(), r in 0.0f64..8.0, c in 0usize..60) {
            if let Ok(m) = Metric::euclidean(points) {
                let c = c % m.len();
                prop_assert_eq!(m.ball(c, r), m.ball_scan(c, r));
            }
        }

        #[test]
        fn ball_is_monotone(points in points_strategy(), r1 in 0.0f64..5.0, dr in 0.0f64..5.0) {
            if let Ok(m) = Metric::euclidean(points) {
                for c in 0..m.len() {
                    prop_assert!(m.ball(c, r1).is_subset(&m.ball(c, r1 + dr)));
                }
            }
        }

        #[test]
        fn mst_at_least_diameter(points in points_strategy()) {
            if let Ok(m) = Metric::euclidean(points) {
                let a = m.aspect_ratio().unwrap();
                prop_assert!(mst_weight(&m) >= a.d_max);
            }
        }

        #[test]
        fn separation_monotone_in_s(points in points_strategy(), s1 in 0.01f64..10.0, ds in 0.0f64..10.0) {
            if let Ok(m) = Metric::euclidean(points) {
                let n = m.len();
                let a: IdSet = (0..n / 2).collect();
                let b: IdSet = (n / 2..n).collect();
                if is_s_well_separated(&m, &a, &b, s1 + ds) {
                    prop_assert!(is_s_well_separated(&m, &a, &b, s1));
                }
            }
        }
    }
}
