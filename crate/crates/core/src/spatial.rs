//! Incremental k-d tree for nearest and fixed-radius queries.
//!
//! Points are appended one at a time and identified by their insertion
//! index. Leaves hold up to `BUCKET` points and split at the median of
//! their widest coordinate.

use crate::geometry::distance_sq;
use crate::scalar::Real;

const BUCKET: usize = 24;

/// Leaves keep a copy of their points' coordinates so a query scans
/// contiguous memory.
#[derive(Debug, Clone)]
enum KdNode<T> {
    Leaf { ids: Vec<usize>, coords: Vec<T> },
    Split { axis: usize, value: T, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct KdTree<T> {
    dim: usize,
    coords: Vec<T>,
    nodes: Vec<KdNode<T>>,
}

impl<T: Real> KdTree<T> {
    pub fn new(dim: usize) -> Self {
        Self { dim, coords: Vec::new(), nodes: vec![KdNode::Leaf { ids: Vec::new(), coords: Vec::new() }] }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, id: usize) -> &[T] {
        &self.coords[id * self.dim..(id + 1) * self.dim]
    }

    /// Appends a point and returns its id.
    pub fn insert(&mut self, x: &[T]) -> usize {
        assert_eq!(x.len(), self.dim, "kd-tree point dimension");
        let id = self.len();
        self.coords.extend_from_slice(x);
        let mut node = 0;
        loop {
            match &mut self.nodes[node] {
                KdNode::Split { axis, value, left, right } => {
                    node = if x[*axis] < *value { *left } else { *right };
                }
                KdNode::Leaf { ids, coords } => {
                    ids.push(id);
                    coords.extend_from_slice(x);
                    if ids.len() > BUCKET {
                        self.split_leaf(node);
                    }
                    return id;
                }
            }
        }
    }

    fn split_leaf(&mut self, node: usize) {
        let items = match &self.nodes[node] {
            KdNode::Leaf { ids, .. } => ids.clone(),
            KdNode::Split { .. } => unreachable!(),
        };
        let axis = (0..self.dim)
            .max_by(|&a, &b| self.spread(&items, a).partial_cmp(&self.spread(&items, b)).unwrap())
            .unwrap_or(0);
        let mut values: Vec<T> = items.iter().map(|&i| self.point(i)[axis]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let value = values[values.len() / 2];
        let (left, right): (Vec<usize>, Vec<usize>) = items.iter().partition(|&&i| self.point(i)[axis] < value);
        // All points identical along the widest axis: keep the bucket.
        if left.is_empty() || right.is_empty() {
            return;
        }
        let l = self.nodes.len();
        let leaf = |ids: Vec<usize>| {
            let coords = ids.iter().flat_map(|&i| self.point(i).iter().copied()).collect();
            KdNode::Leaf { ids, coords }
        };
        let (left, right) = (leaf(left), leaf(right));
        self.nodes.push(left);
        self.nodes.push(right);
        self.nodes[node] = KdNode::Split { axis, value, left: l, right: l + 1 };
    }

    fn spread(&self, items: &[usize], axis: usize) -> T {
        let (lo, hi) = items.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &i| {
            let v = self.point(i)[axis];
            (lo.min(v), hi.max(v))
        });
        hi - lo
    }

    /// Exact nearest neighbour: `(id, distance)`, ties broken by lowest id.
    pub fn nearest(&self, q: &[T]) -> Option<(usize, T)> {
        if self.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, T::infinity());
        self.nearest_rec(0, q, &mut best);
        Some((best.0, best.1.sqrt()))
    }

    fn nearest_rec(&self, node: usize, q: &[T], best: &mut (usize, T)) {
        match &self.nodes[node] {
            KdNode::Leaf { ids, coords } => {
                for (&i, p) in ids.iter().zip(coords.chunks_exact(self.dim)) {
                    let d = distance_sq(q, p);
                    if d < best.1 || (d == best.1 && i < best.0) {
                        *best = (i, d);
                    }
                }
            }
            KdNode::Split { axis, value, left, right } => {
                let diff = q[*axis] - *value;
                let (first, second) = if diff < T::zero() { (*left, *right) } else { (*right, *left) };
                self.nearest_rec(first, q, best);
                if diff * diff <= best.1 {
                    self.nearest_rec(second, q, best);
                }
            }
        }
    }

    /// Ids of all points within `radius` (inclusive), in ascending id order.
    pub fn within(&self, q: &[T], radius: T) -> Vec<usize> {
        let mut out: Vec<usize> = self.within_sq(q, radius).into_iter().map(|(i, _)| i).collect();
        out.sort_unstable();
        out
    }

    /// `(id, squared distance)` for every point within `radius`, in
    /// traversal order. The order depends only on the insertion sequence.
    pub fn within_sq(&self, q: &[T], radius: T) -> Vec<(usize, T)> {
        let mut out = Vec::new();
        if !self.is_empty() && radius >= T::zero() {
            self.within_rec(0, q, radius * radius, &mut out);
        }
        out
    }

    fn within_rec(&self, node: usize, q: &[T], r_sq: T, out: &mut Vec<(usize, T)>) {
        match &self.nodes[node] {
            KdNode::Leaf { ids, coords } => {
                for (&i, p) in ids.iter().zip(coords.chunks_exact(self.dim)) {
                    let d = distance_sq(q, p);
                    if d <= r_sq {
                        out.push((i, d));
                    }
                }
            }
            KdNode::Split { axis, value, left, right } => {
                let diff = q[*axis] - *value;
                let (first, second) = if diff < T::zero() { (*left, *right) } else { (*right, *left) };
                self.within_rec(first, q, r_sq, out);
                if diff * diff <= r_sq {
                    self.within_rec(second, q, r_sq, out);
                }
            }
        }
    }
}
