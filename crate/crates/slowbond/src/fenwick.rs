//! Dynamic categorical sampling over nonnegative weights.
//!
//! A complete binary tree of partial sums supports O(log n) weight updates
//! and O(log n) inverse-CDF sampling. Internal nodes are recomputed as exact
//! sums of their children on every update, so no floating-point drift
//! accumulates across millions of events.

#[derive(Debug, Clone)]
pub struct RateTree {
    n: usize,
    size: usize,
    nodes: Vec<f64>,
}

impl RateTree {
    pub fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        let size = n.next_power_of_two().max(2);
        let mut nodes = vec![0.0; 2 * size];
        nodes[size..size + n].copy_from_slice(weights);
        for i in (1..size).rev() {
            nodes[i] = nodes[2 * i] + nodes[2 * i + 1];
        }
        RateTree { n, size, nodes }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.nodes[self.size + i]
    }

    pub fn set(&mut self, i: usize, w: f64) {
        debug_assert!(w >= 0.0);
        let mut idx = self.size + i;
        self.nodes[idx] = w;
        while idx > 1 {
            idx /= 2;
            self.nodes[idx] = self.nodes[2 * idx] + self.nodes[2 * idx + 1];
        }
    }

    /// Index i with Σ_{j<i} w_j ≤ target < Σ_{j≤i} w_j, for target ∈ [0, total).
    ///
    /// If roundoff lands the descent on a zero-weight leaf, the nearest
    /// positive-weight neighbour is returned instead.
    pub fn sample(&self, mut target: f64) -> usize {
        debug_assert!(self.total() > 0.0);
        let mut idx = 1;
        while idx < self.size {
            let left = self.nodes[2 * idx];
            if target < left {
                idx = 2 * idx;
            } else {
                target -= left;
                idx = 2 * idx + 1;
            }
        }
        let mut i = idx - self.size;
        if self.weight(i.min(self.n - 1)) > 0.0 && i < self.n {
            return i;
        }
        i = i.min(self.n - 1);
        let fwd = (i..self.n).find(|&j| self.weight(j) > 0.0);
        fwd.or_else(|| (0..i).rev().find(|&j| self.weight(j) > 0.0))
            .expect("sample called with zero total weight")
    }
}
