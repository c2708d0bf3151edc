//! Exact k-nearest-neighbor queries over 6-D points with a kd-tree.
//!
//! Results are ordered by ascending squared Euclidean distance with ties
//! broken by ascending row id, and equal a linear scan bit for bit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const LEAF_SIZE: usize = 16;

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Clone, Debug)]
pub struct NeighborIndex {
    points: Vec<[f64; 6]>,
    /// Row ids permuted so every leaf owns a contiguous range.
    order: Vec<usize>,
    root: Node,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub dist2: f64,
}

impl Neighbor {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.dist2.total_cmp(&other.dist2).then(self.id.cmp(&other.id))
    }
}

impl Eq for Neighbor {}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

#[inline]
fn dist2(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    let mut s = 0.0;
    for k in 0..6 {
        let d = a[k] - b[k];
        s += d * d;
    }
    s
}

fn build(points: &[[f64; 6]], order: &mut [usize], offset: usize) -> Node {
    let n = order.len();
    if n <= LEAF_SIZE {
        return Node::Leaf {
            start: offset,
            end: offset + n,
        };
    }
    // split the widest dimension at the median
    let mut dim = 0;
    let mut widest = -1.0;
    for k in 0..6 {
        let (lo, hi) = order.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            (lo.min(points[i][k]), hi.max(points[i][k]))
        });
        if hi - lo > widest {
            widest = hi - lo;
            dim = k;
        }
    }
    if widest <= 0.0 {
        return Node::Leaf {
            start: offset,
            end: offset + n,
        };
    }
    let mid = n / 2;
    order.select_nth_unstable_by(mid, |&a, &b| points[a][dim].total_cmp(&points[b][dim]).then(a.cmp(&b)));
    let value = points[order[mid]][dim];
    let (l, r) = order.split_at_mut(mid);
    Node::Split {
        dim,
        value,
        left: Box::new(build(points, l, offset)),
        right: Box::new(build(points, r, offset + mid)),
    }
}

impl NeighborIndex {
    pub fn build(points: Vec<[f64; 6]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        let root = build(&points, &mut order, 0);
        Ok(NeighborIndex { points, order, root })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: usize) -> &[f64; 6] {
        &self.points[id]
    }

    /// The `min(k, N)` nearest rows to `q`.
    pub fn knn(&self, q: &[f64; 6], k: usize) -> Vec<Neighbor> {
        let k = k.min(self.points.len());
        if k == 0 {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.search(&self.root, q, k, &mut heap);
        let mut out = heap.into_vec();
        out.sort();
        out
    }

    pub fn nearest(&self, q: &[f64; 6]) -> Neighbor {
        self.knn(q, 1)[0]
    }

    fn search(&self, node: &Node, q: &[f64; 6], k: usize, heap: &mut BinaryHeap<Neighbor>) {
        match node {
            Node::Leaf { start, end } => {
                for &id in &self.order[*start..*end] {
                    let cand = Neighbor {
                        id,
                        dist2: dist2(q, &self.points[id]),
                    };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("heap holds k items") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = q[*dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, k, heap);
                // Visit the far side unless it is strictly farther than the
                // current worst; equal distances may still win on row id.
                let visit = heap.len() < k || diff * diff <= heap.peek().map_or(f64::INFINITY, |w| w.dist2);
                if visit {
                    self.search(far, q, k, heap);
                }
            }
        }
    }
}

/// Linear-scan reference implementation.
pub fn brute_force_knn(points: &[[f64; 6]], q: &[f64; 6], k: usize) -> Vec<Neighbor> {
    let mut all: Vec<Neighbor> = points
        .iter()
        .enumerate()
        .map(|(id, p)| Neighbor { id, dist2: dist2(q, p) })
        .collect();
    all.sort();
    all.truncate(k);
    all
}
