//! Weighted undirected graphs and their matrix representations.
//!
//! Every edge is stored with canonical orientation `tail < head`; the incidence
//! column of edge `k` carries `+1` at the tail and `-1` at the head. Edge order
//! is the construction order, so all matrices built from one graph share
//! column indices.

mod forest;
pub mod io;
mod paths;

use std::collections::{HashMap, VecDeque};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use forest::{essential_edge_laplacian, ForestDecomposition};
pub use paths::brute_force_path_edge_set;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub tail: usize,
    pub head: usize,
    pub weight: T,
}

impl<T> Edge<T> {
    pub fn endpoints(&self) -> (usize, usize) {
        (self.tail, self.head)
    }
}

/// Undirected simple graph with real, nonzero edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<T> {
    node_count: usize,
    edges: Vec<Edge<T>>,
}

/// Connected components with labels ordered by each component's smallest node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    pub labels: Vec<usize>,
}

impl Components {
    pub fn same(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Split of the edge set by weight sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPartition {
    pub positive_edges: Vec<usize>,
    pub negative_edges: Vec<usize>,
}

/// Negative edges that join distinct components of the positive subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCut {
    pub cut_exists: bool,
    pub cut_edges: Vec<usize>,
}

/// Builds a graph, validating every edge. Alias of [`WeightedGraph::new`].
pub fn build_graph<T: Real>(
    node_count: usize,
    edges: impl IntoIterator<Item = (usize, usize, T)>,
) -> Result<WeightedGraph<T>> {
    WeightedGraph::new(node_count, edges)
}

impl<T: Real> WeightedGraph<T> {
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut out = Vec::new();
        for (index, (u, v, w)) in edges.into_iter().enumerate() {
            if u >= node_count || v >= node_count {
                return Err(Error::NodeOutOfRange { index, tail: u, head: v, node_count });
            }
            if u == v {
                return Err(Error::SelfLoop { index, tail: u, head: v });
            }
            if !w.is_finite() || w == T::zero() {
                return Err(Error::InvalidWeight {
                    index,
                    tail: u,
                    head: v,
                    weight: w.to_f64().unwrap_or(f64::NAN),
                });
            }
            let (tail, head) = if u < v { (u, v) } else { (v, u) };
            if let Some(&first) = seen.get(&(tail, head)) {
                return Err(Error::DuplicateEdge { index, first, tail: u, head: v });
            }
            seen.insert((tail, head), index);
            out.push(Edge { tail, head, weight: w });
        }
        Ok(Self { node_count, edges: out })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge<T> {
        &self.edges[k]
    }

    pub fn weights(&self) -> Vec<T> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    /// Index of the edge joining `u` and `v`, in either orientation.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.iter().position(|e| e.tail == a && e.head == b)
    }

    pub(crate) fn check_node(&self, u: usize) -> Result<()> {
        if u >= self.node_count {
            return Err(Error::InvalidArgument(format!(
                "node {u} outside 0..{}",
                self.node_count
            )));
        }
        Ok(())
    }

    pub(crate) fn check_edge(&self, k: usize) -> Result<()> {
        if k >= self.edges.len() {
            return Err(Error::InvalidArgument(format!(
                "edge {k} outside 0..{}",
                self.edges.len()
            )));
        }
        Ok(())
    }

    /// Neighbor lists `(neighbor, edge index)` sorted by neighbor.
    pub(crate) fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.tail].push((e.head, k));
            adj[e.head].push((e.tail, k));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// `n × m` incidence matrix: `+1` at the tail, `-1` at the head.
    pub fn incidence_matrix(&self) -> Array2<T> {
        self.incidence_of(&(0..self.edges.len()).collect::<Vec<_>>())
    }

    /// Incidence columns for a subset of edges, in the given order.
    pub fn incidence_of(&self, edge_subset: &[usize]) -> Array2<T> {
        let mut e = Array2::zeros((self.node_count, edge_subset.len()));
        for (col, &k) in edge_subset.iter().enumerate() {
            let edge = &self.edges[k];
            e[[edge.tail, col]] = T::one();
            e[[edge.head, col]] = -T::one();
        }
        e
    }

    /// Weighted Laplacian `E W Eᵀ`.
    pub fn laplacian(&self) -> Array2<T> {
        self.laplacian_with_weights(&self.weights())
    }

    /// Laplacian of this topology under replacement weights (zeros allowed).
    pub fn laplacian_with_weights(&self, weights: &[T]) -> Array2<T> {
        assert_eq!(weights.len(), self.edges.len(), "one weight per edge");
        let n = self.node_count;
        let mut l = Array2::zeros((n, n));
        for (e, &w) in self.edges.iter().zip(weights) {
            let (i, j) = e.endpoints();
            l[[i, i]] += w;
            l[[j, j]] += w;
            l[[i, j]] -= w;
            l[[j, i]] -= w;
        }
        l
    }

    pub fn connected_components(&self) -> Components {
        self.components_over(|_| true)
    }

    pub(crate) fn components_over(&self, keep: impl Fn(&Edge<T>) -> bool) -> Components {
        let n = self.node_count;
        let mut adj = vec![Vec::new(); n];
        for e in self.edges.iter().filter(|e| keep(e)) {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        let mut labels = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if labels[start] != usize::MAX {
                continue;
            }
            labels[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if labels[v] == usize::MAX {
                        labels[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        Components { count, labels }
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().count == 1
    }

    pub fn spanning_forest(&self) -> ForestDecomposition<T> {
        ForestDecomposition::new(self)
    }

    pub fn signed_partition(&self) -> SignedPartition {
        let (positive_edges, negative_edges) =
            (0..self.edges.len()).partition(|&k| self.edges[k].weight > T::zero());
        SignedPartition { positive_edges, negative_edges }
    }

    /// Subgraph on all nodes keeping only `edge_subset`; returns the original
    /// index of each retained edge.
    pub fn edge_subgraph(&self, edge_subset: &[usize]) -> (WeightedGraph<T>, Vec<usize>) {
        let edges = edge_subset.iter().map(|&k| self.edges[k]).collect();
        (WeightedGraph { node_count: self.node_count, edges }, edge_subset.to_vec())
    }

    /// `G+`: positive edges over the full node set.
    pub fn positive_subgraph(&self) -> (WeightedGraph<T>, Vec<usize>) {
        self.edge_subgraph(&self.signed_partition().positive_edges)
    }

    /// `G-`: negative edges over the full node set.
    pub fn negative_subgraph(&self) -> (WeightedGraph<T>, Vec<usize>) {
        self.edge_subgraph(&self.signed_partition().negative_edges)
    }

    /// Graph with edge `k` deleted.
    pub fn without_edge(&self, k: usize) -> WeightedGraph<T> {
        let keep: Vec<usize> = (0..self.edges.len()).filter(|&j| j != k).collect();
        self.edge_subgraph(&keep).0
    }

    /// Same topology with edge `k` reweighted. Fails if the new weight is zero
    /// or non-finite.
    pub fn with_weight(&self, k: usize, weight: T) -> Result<WeightedGraph<T>> {
        self.check_edge(k)?;
        let mut edges: Vec<_> = self.edges.iter().map(|e| (e.tail, e.head, e.weight)).collect();
        edges[k].2 = weight;
        WeightedGraph::new(self.node_count, edges)
    }

    /// Graph with an extra edge appended (index `edge_count()`).
    pub fn with_edge(&self, u: usize, v: usize, weight: T) -> Result<WeightedGraph<T>> {
        let edges = self
            .edges
            .iter()
            .map(|e| (e.tail, e.head, e.weight))
            .chain(std::iter::once((u, v, weight)));
        WeightedGraph::new(self.node_count, edges)
    }

    /// Negative edges joining distinct components of `G+`; a cut exists iff
    /// `G+` has more components than `G`.
    pub fn negative_cut_components(&self) -> NegativeCut {
        let whole = self.connected_components();
        let plus = self.components_over(|e| e.weight > T::zero());
        let cut_edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.weight < T::zero() && !plus.same(e.tail, e.head))
            .map(|(k, _)| k)
            .collect();
        NegativeCut { cut_exists: plus.count > whole.count, cut_edges }
    }

    /// Structural balance: a two-coloring exists with negative edges
    /// bichromatic and positive edges monochromatic.
    pub fn is_balanced(&self) -> bool {
        let adj = self.adjacency();
        let mut color: Vec<Option<bool>> = vec![None; self.node_count];
        let mut queue = VecDeque::new();
        for start in 0..self.node_count {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap_or(false);
                for &(v, k) in &adj[u] {
                    let want = cu ^ (self.edges[k].weight < T::zero());
                    match color[v] {
                        None => {
                            color[v] = Some(want);
                            queue.push_back(v);
                        }
                        Some(c) if c != want => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    /// Edges lying on at least one simple `u`–`v` path (sorted).
    ///
    /// These are exactly the edges of the blocks (biconnected components)
    /// met on the block–cut tree path from `u` to `v`; empty when `u` and
    /// `v` are in different components.
    pub fn path_edge_set(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::InvalidArgument(format!("path endpoints coincide (node {u})")));
        }
        Ok(paths::path_edge_set(self, u, v))
    }
}
