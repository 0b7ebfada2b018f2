//! RRT* search tree: parent links, cost-to-come, spatial index, and the
//! extend/choose-parent/rewire step.

use crate::error::{Error, Result};
use crate::geometry::{slice_distance, Configuration, Path, Problem};
use crate::scalar::{unit_ball_measure, Real};
use crate::spatial::KdTree;

/// Node bookkeeping. The configuration lives in the tree's spatial index
/// and the cost-to-come in a dense array scanned by every neighbourhood
/// query; read them with [`Tree::config`] and [`Tree::cost`].
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode<T> {
    pub parent: Option<usize>,
    /// Length of the edge from the parent (zero for the root).
    pub edge_cost: T,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Tree<T> {
    nodes: Vec<TreeNode<T>>,
    costs: Vec<T>,
    index: KdTree<T>,
}

impl<T: Real> Tree<T> {
    pub fn new(root: &[T]) -> Self {
        let mut index = KdTree::new(root.len());
        index.insert(root);
        Self {
            nodes: vec![TreeNode { parent: None, edge_cost: T::zero(), children: Vec::new() }],
            costs: vec![T::zero()],
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.index.point(0).len()
    }

    pub fn node(&self, id: usize) -> &TreeNode<T> {
        &self.nodes[id]
    }

    pub fn config(&self, id: usize) -> &[T] {
        self.index.point(id)
    }

    pub fn cost(&self, id: usize) -> T {
        self.costs[id]
    }

    pub fn parent(&self, id: usize) -> Option<usize> {
        self.nodes[id].parent
    }

    pub fn nearest(&self, x: &[T]) -> usize {
        self.index.nearest(x).expect("tree always holds the root").0
    }

    /// All nodes within `radius` of `x`, ascending by id.
    pub fn near(&self, x: &[T], radius: T) -> Vec<usize> {
        self.index.within(x, radius)
    }

    /// `(id, distance)` for the nodes within `radius` of `x`, in an order
    /// fixed by the insertion history.
    fn near_with_distances(&self, x: &[T], radius: T) -> Vec<(usize, T)> {
        let mut near = self.index.within_sq(x, radius);
        for entry in &mut near {
            entry.1 = entry.1.sqrt();
        }
        near
    }

    /// Appends `x` as a child of `parent`.
    pub fn add(&mut self, parent: usize, x: &[T]) -> usize {
        let edge_cost = slice_distance(self.config(parent), x);
        let id = self.index.insert(x);
        self.nodes.push(TreeNode { parent: Some(parent), edge_cost, children: Vec::new() });
        self.costs.push(self.costs[parent] + edge_cost);
        self.nodes[parent].children.push(id);
        id
    }

    /// Moves `child` under `new_parent` and refreshes the costs of its
    /// whole subtree. The caller guarantees `new_parent` is not a
    /// descendant of `child`.
    pub fn reparent(&mut self, child: usize, new_parent: usize) {
        if let Some(old) = self.nodes[child].parent {
            let siblings = &mut self.nodes[old].children;
            if let Some(pos) = siblings.iter().position(|&c| c == child) {
                siblings.swap_remove(pos);
            }
        }
        let edge_cost = slice_distance(self.config(new_parent), self.config(child));
        self.nodes[new_parent].children.push(child);
        let base = self.costs[new_parent];
        let node = &mut self.nodes[child];
        node.parent = Some(new_parent);
        node.edge_cost = edge_cost;
        self.costs[child] = base + edge_cost;
        let mut stack = self.nodes[child].children.clone();
        while let Some(id) = stack.pop() {
            let parent = self.nodes[id].parent.expect("non-root node has a parent");
            self.costs[id] = self.costs[parent] + self.nodes[id].edge_cost;
            stack.extend_from_slice(&self.nodes[id].children);
        }
    }

    /// Waypoints from the root to `id`.
    pub fn path_to(&self, id: usize) -> Result<Path<T>> {
        let mut chain = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            chain.push(p);
            cur = p;
            if chain.len() > self.nodes.len() {
                return Err(Error::InvalidArgument("cycle in tree".into()));
            }
        }
        chain.reverse();
        let waypoints = chain.iter().map(|&i| Configuration::from_vec_unchecked(self.config(i).to_vec())).collect();
        Path::new(if chain.len() == 1 { vec![Configuration::from_vec_unchecked(self.config(id).to_vec()); 2] } else { waypoints })
    }

    /// Verifies the structural invariants: single root, consistent
    /// parent/child links, acyclic and fully connected, and
    /// `cost(child) = cost(parent) + |child - parent|` within `tol`
    /// (relative to the cost magnitude).
    pub fn check_integrity(&self, tol: T) -> std::result::Result<(), String> {
        if self.nodes[0].parent.is_some() {
            return Err("root has a parent".into());
        }
        for (id, node) in self.nodes.iter().enumerate().skip(1) {
            let p = node.parent.ok_or_else(|| format!("node {id} has no parent"))?;
            if p >= self.nodes.len() {
                return Err(format!("node {id} has dangling parent {p}"));
            }
            if !self.nodes[p].children.contains(&id) {
                return Err(format!("node {id} missing from children of {p}"));
            }
            let expected = self.costs[p] + slice_distance(self.config(p), self.config(id));
            if (expected - self.costs[id]).abs() > tol * expected.max(T::one()) {
                return Err(format!("node {id}: cost {} != {}", self.costs[id], expected));
            }
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        let mut count = 0;
        while let Some(id) = stack.pop() {
            if seen[id] {
                return Err(format!("node {id} reached twice"));
            }
            seen[id] = true;
            count += 1;
            for &c in &self.nodes[id].children {
                if self.nodes[c].parent != Some(id) {
                    return Err(format!("child {c} of {id} points elsewhere"));
                }
                stack.push(c);
            }
        }
        if count != self.nodes.len() {
            return Err(format!("{} of {} nodes unreachable from the root", self.nodes.len() - count, self.nodes.len()));
        }
        Ok(())
    }
}

/// Default RRT* rewiring constant
/// `2 (1 + 1/n)^(1/n) (measure / zeta_n)^(1/n)` for a free space whose
/// measure is bounded above by `measure`.
pub fn default_gamma<T: Real>(measure: T, n: usize) -> T {
    let inv_n = T::one() / T::of_usize(n);
    T::of(2.0) * (T::one() + inv_n).powf(inv_n) * (measure / unit_ball_measure::<T>(n)).powf(inv_n)
}

/// Near-neighbour radius `gamma (ln k / k)^(1/n) (1 - phi)^(-1/n)`, capped at
/// the steering step.
pub fn rewire_radius<T: Real>(tree_size: usize, n: usize, gamma: T, phi: T, steer_step: T) -> T {
    let k = T::of_usize(tree_size.max(2));
    let inv_n = T::one() / T::of_usize(n);
    let base = gamma * (k.ln() / k).powf(inv_n);
    let factor = (T::one() - phi).powf(-inv_n);
    (base * factor).min(steer_step)
}

/// Outcome of one extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendOutcome<T> {
    /// The incumbent improved to the given cost.
    Improved(T),
    /// A node was added without improving the incumbent.
    Extended,
    /// Nothing was added (collision, or the steered point already exists).
    Rejected,
}

/// An RRT* tree bound to a problem, tracking the goal node.
#[derive(Debug, Clone)]
pub struct RrtStar<'a, T> {
    problem: &'a Problem<T>,
    tree: Tree<T>,
    steer_step: T,
    goal_node: Option<usize>,
}

impl<'a, T: Real> RrtStar<'a, T> {
    pub fn new(problem: &'a Problem<T>, steer_step: T) -> Self {
        Self { problem, tree: Tree::new(problem.start()), steer_step, goal_node: None }
    }

    /// Starts from a chain of nodes along `path`, which must run from the
    /// start to the goal through free space.
    pub fn from_path(problem: &'a Problem<T>, steer_step: T, path: &Path<T>) -> Result<Self> {
        let wps = path.waypoints();
        if wps[0].as_slice() != problem.start().as_slice() || wps[wps.len() - 1].as_slice() != problem.goal().as_slice() {
            return Err(Error::InvalidArgument("initial path must run from start to goal".into()));
        }
        let mut search = Self::new(problem, steer_step);
        let mut prev = 0;
        for w in wps.windows(2) {
            if problem.edge_in_collision(&w[0], &w[1]) {
                return Err(Error::InvalidArgument("initial path is in collision".into()));
            }
            prev = search.tree.add(prev, &w[1]);
        }
        search.goal_node = Some(prev);
        Ok(search)
    }

    pub fn tree(&self) -> &Tree<T> {
        &self.tree
    }

    pub fn goal_node(&self) -> Option<usize> {
        self.goal_node
    }

    pub fn best_cost(&self) -> T {
        self.goal_node.map_or(T::infinity(), |g| self.tree.cost(g))
    }

    /// Incumbent path from start to goal.
    pub fn extract_solution(&self) -> Result<Path<T>> {
        let goal = self.goal_node.ok_or(Error::NoSolution)?;
        self.tree.path_to(goal)
    }

    fn steer(&self, from: &[T], to: &[T]) -> Vec<T> {
        let d = slice_distance(from, to);
        if d <= self.steer_step {
            return to.to_vec();
        }
        let t = self.steer_step / d;
        from.iter().zip(to).map(|(&a, &b)| a + (b - a) * t).collect()
    }

    /// Steers toward `x`, picks the cheapest collision-free parent among the
    /// nodes within `radius`, inserts the new node, then rewires neighbours
    /// through it when that lowers their cost-to-come.
    pub fn extend_and_rewire(&mut self, x: &[T], radius: T) -> ExtendOutcome<T> {
        let before = self.best_cost();
        let nearest = self.tree.nearest(x);
        let new = self.steer(self.tree.config(nearest), x);
        let d_nearest = slice_distance(self.tree.config(nearest), &new);
        // `new` lies on the segment from `nearest` toward `x`, so a positive
        // distance here also rules out duplicating any other node.
        if !(d_nearest > T::zero()) || self.problem.point_in_collision(&new) {
            return ExtendOutcome::Rejected;
        }
        if self.problem.edge_in_collision(self.tree.config(nearest), &new) {
            return ExtendOutcome::Rejected;
        }

        // (id, distance to `new`, cost-to-come at query time)
        let near: Vec<(usize, T, T)> =
            self.tree.near_with_distances(&new, radius).into_iter().map(|(id, d)| (id, d, self.tree.cost(id))).collect();
        let via_nearest = self.tree.cost(nearest) + d_nearest;
        let order = |a: &(T, usize), b: &(T, usize)| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1));
        let free = |id: usize| !self.problem.edge_in_collision(self.tree.config(id), &new);
        let candidate = |&(id, d, cost): &(usize, T, T)| (id != nearest && d > T::zero()).then_some((cost + d, id));
        // The cheapest candidate is usually free; sort only when it is not.
        let best = near.iter().filter_map(candidate).filter(|c| c.0 < via_nearest).min_by(order);
        let parent = match best {
            None => nearest,
            Some((_, id)) if free(id) => id,
            Some(_) => {
                let mut candidates: Vec<(T, usize)> =
                    near.iter().filter_map(candidate).filter(|c| c.0 < via_nearest).collect();
                candidates.sort_by(order);
                candidates.iter().skip(1).find(|c| free(c.1)).map_or(nearest, |c| c.1)
            }
        };
        let new_id = self.tree.add(parent, &new);
        let new_cost = self.tree.cost(new_id);
        let eps = T::epsilon() * T::of(16.0);
        let improves = |through: T, current: T| through < current - eps * current.max(T::one());
        for &(id, d, cached) in &near {
            if id == parent {
                continue;
            }
            let through = new_cost + d;
            // Costs only decrease, so the cached value is an upper bound and
            // a failed check here is final.
            if improves(through, cached)
                && improves(through, self.tree.cost(id))
                && !self.problem.edge_in_collision(&new, self.tree.config(id))
            {
                self.tree.reparent(id, new_id);
            }
        }

        if self.goal_node.is_none() && new.as_slice() == self.problem.goal().as_slice() {
            self.goal_node = Some(new_id);
        }
        let after = self.best_cost();
        if after < before {
            ExtendOutcome::Improved(after)
        } else {
            ExtendOutcome::Extended
        }
    }
}
