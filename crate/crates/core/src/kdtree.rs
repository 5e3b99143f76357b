//! Static k-d tree over a flat coordinate buffer, answering closed-ball range
//! queries.
//!
//! Distances are recomputed with [`euclidean`] for every candidate, so a query
//! returns exactly the ids a linear scan would. Pruning uses a slightly
//! inflated radius since `sqrt` of a sum of squares can round one ulp below a
//! single axis gap.

/// Distance between two coordinate slices, the single definition used by the
/// whole crate.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

const PRUNE_SLACK: f64 = 1e-9;
const LEAF_SIZE: usize = 8;

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug)]
pub struct KdTree {
    dim: usize,
    perm: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn build(coords: &[f64], dim: usize) -> Self {
        let n = coords.len().checked_div(dim).unwrap_or(0);
        let mut tree = KdTree {
            dim,
            perm: (0..n).collect(),
            nodes: Vec::new(),
        };
        if n > 0 {
            tree.build_node(coords, 0, n, 0);
        }
        tree
    }

    fn build_node(&mut self, coords: &[f64], start: usize, end: usize, depth: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = depth % self.dim;
        let dim = self.dim;
        let mid = (start + end) / 2;
        self.perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            coords[a * dim + axis].total_cmp(&coords[b * dim + axis])
        });
        let value = coords[self.perm[mid] * dim + axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(coords, start, mid, depth + 1);
        let right = self.build_node(coords, mid, end, depth + 1);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    /// Ids of all points within distance `r` (inclusive) of `query`, unsorted.
    pub fn within(&self, coords: &[f64], query: &[f64], r: f64, out: &mut Vec<usize>) {
        if self.nodes.is_empty() {
            return;
        }
        let reach = r * (1.0 + PRUNE_SLACK) + f64::MIN_POSITIVE;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            match self.nodes[node] {
                Node::Leaf { start, end } => {
                    for &id in &self.perm[start..end] {
                        let p = &coords[id * self.dim..(id + 1) * self.dim];
                        if euclidean(query, p) <= r {
                            out.push(id);
                        }
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    let gap = query[axis] - value;
                    // left holds coordinates <= value, right holds >= value
                    if gap <= reach {
                        stack.push(left);
                    }
                    if -gap <= reach {
                        stack.push(right);
                    }
                }
            }
        }
    }
}
