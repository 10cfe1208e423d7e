//! Graph generators and independent reference computations shared by the
//! integration tests. The references use nalgebra and brute force only; none
//! of them call back into the library's numerics.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use ndarray::Array2;
use rand::Rng;
use resistnet_core::graph::WeightedGraph;
use resistnet_core::{build_graph, Graph, Signature};

pub fn to_na(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Laplacian assembled edge by edge.
pub fn laplacian(n: usize, edges: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for &(u, v, w) in edges {
        l[(u, u)] += w;
        l[(v, v)] += w;
        l[(u, v)] -= w;
        l[(v, u)] -= w;
    }
    l
}

pub fn edge_list(g: &Graph) -> Vec<(usize, usize, f64)> {
    g.edges().iter().map(|e| (e.tail, e.head, e.weight)).collect()
}

/// Laplacian of `g`'s edges under replacement weights (zeros allowed).
pub fn reweighted_laplacian(g: &Graph, weights: &[f64]) -> DMatrix<f64> {
    let edges: Vec<_> = g.edges().iter().zip(weights).map(|(e, &w)| (e.tail, e.head, w)).collect();
    laplacian(g.node_count(), &edges)
}

pub fn graph_laplacian(g: &Graph) -> DMatrix<f64> {
    laplacian(g.node_count(), &edge_list(g))
}

pub fn sorted_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Inertia with zero band `tol · max(1, max|λ|)`.
pub fn inertia(a: &DMatrix<f64>, tol: f64) -> Signature {
    let ev = sorted_eigenvalues(a);
    let thr = tol * ev.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    Signature::new(
        ev.iter().filter(|&&x| x > thr).count(),
        ev.iter().filter(|&&x| x < -thr).count(),
        ev.iter().filter(|&&x| x.abs() <= thr).count(),
    )
}

/// `L†` of a connected graph through `(L + 11ᵀ/n)⁻¹ - 11ᵀ/n`.
pub fn connected_pinv(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    (l + &j).try_inverse().expect("connected Laplacian") - j
}

pub fn resistance(g: &Graph, u: usize, v: usize) -> f64 {
    let p = connected_pinv(&graph_laplacian(g));
    p[(u, u)] + p[(v, v)] - 2.0 * p[(u, v)]
}

/// Resistance across each listed edge, via one `L†`.
pub fn edge_resistances(g: &Graph, edges: &[usize]) -> Vec<f64> {
    let p = connected_pinv(&graph_laplacian(g));
    edges
        .iter()
        .map(|&k| {
            let (u, v) = g.edge(k).endpoints();
            p[(u, u)] + p[(v, v)] - 2.0 * p[(u, v)]
        })
        .collect()
}

/// `E_Δᵀ L† E_Δ`.
pub fn resistance_matrix(g: &Graph, edges: &[usize]) -> DMatrix<f64> {
    let p = connected_pinv(&graph_laplacian(g));
    let e = incidence(g, edges);
    e.transpose() * p * e
}

pub fn incidence(g: &Graph, edges: &[usize]) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(g.node_count(), edges.len());
    for (j, &k) in edges.iter().enumerate() {
        let (u, v) = g.edge(k).endpoints();
        e[(u, j)] = 1.0;
        e[(v, j)] = -1.0;
    }
    e
}

/// Node-space transfer `E_Δᵀ (jωI + L)⁻¹ E_Δ` for `ω > 0`.
pub fn node_transfer(g: &Graph, edges: &[usize], omega: f64) -> DMatrix<Complex<f64>> {
    let n = g.node_count();
    let l = graph_laplacian(g).map(|x| Complex::new(x, 0.0));
    let a = l + DMatrix::<Complex<f64>>::identity(n, n) * Complex::new(0.0, omega);
    let inv = a.try_inverse().expect("jω + L is invertible for ω > 0");
    let e = incidence(g, edges).map(|x| Complex::new(x, 0.0));
    e.transpose() * inv * e
}

pub fn sigma_max(a: &DMatrix<f64>) -> f64 {
    a.clone().svd(false, false).singular_values.max()
}

pub fn sigma_max_complex(a: &DMatrix<Complex<f64>>) -> f64 {
    a.clone().svd(false, false).singular_values.max()
}

/// Union-find component count.
pub fn component_count(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = n;
    for (u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

/// Exhaustive search over all 2-colorings.
pub fn balanced_by_search(n: usize, edges: &[(usize, usize, f64)]) -> bool {
    (0u32..1 << n).any(|mask| {
        edges.iter().all(|&(u, v, w)| {
            let same = (mask >> u & 1) == (mask >> v & 1);
            if w > 0.0 {
                same
            } else {
                !same
            }
        })
    })
}

/// Union of the edges of every simple `u`–`v` path, by depth-first
/// enumeration.
pub fn simple_path_union(n: usize, edges: &[(usize, usize, f64)], u: usize, v: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for (k, &(a, b, _)) in edges.iter().enumerate() {
        adj[a].push((b, k));
        adj[b].push((a, k));
    }
    let mut used = vec![false; edges.len()];
    let mut on_path = vec![false; n];
    let mut stack = Vec::new();
    fn walk(
        x: usize,
        target: usize,
        adj: &[Vec<(usize, usize)>],
        on_path: &mut [bool],
        stack: &mut Vec<usize>,
        used: &mut [bool],
    ) {
        if x == target {
            for &k in stack.iter() {
                used[k] = true;
            }
            return;
        }
        on_path[x] = true;
        for &(y, k) in &adj[x] {
            if !on_path[y] {
                stack.push(k);
                walk(y, target, adj, on_path, stack, used);
                stack.pop();
            }
        }
        on_path[x] = false;
    }
    walk(u, v, &adj, &mut on_path, &mut stack, &mut used);
    (0..edges.len()).filter(|&k| used[k]).collect()
}

/// Random spanning tree plus extra edges with probability `p`; weights
/// uniform in `[lo, hi)`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, p: f64, lo: f64, hi: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push((j, i, rng.random_range(lo..hi)));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !edges.iter().any(|&(a, b, _)| (a, b) == (i, j) || (a, b) == (j, i)) && rng.random_bool(p) {
                edges.push((i, j, rng.random_range(lo..hi)));
            }
        }
    }
    build_graph(n, edges).unwrap()
}

/// Random simple graph (possibly disconnected) where each present edge is
/// negative with probability `q`.
pub fn random_signed<R: Rng>(rng: &mut R, n: usize, p: f64, q: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                let w = rng.random_range(0.2..3.0);
                edges.push((i, j, if rng.random_bool(q) { -w } else { w }));
            }
        }
    }
    build_graph(n, edges).unwrap()
}

/// Positive blocks joined only by negative edges, so the negative edges
/// always separate `G₊`. Negative magnitudes are `mag`.
pub fn negative_cut_graph<R: Rng>(rng: &mut R, n: usize, mag: f64) -> Graph {
    let blocks = rng.random_range(2..=n.min(4));
    let label: Vec<usize> = (0..n).map(|i| if i < blocks { i } else { rng.random_range(0..blocks) }).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if label[i] == label[j] {
                if rng.random_bool(0.7) {
                    edges.push((i, j, rng.random_range(0.5..2.0)));
                }
            } else if rng.random_bool(0.3) {
                edges.push((i, j, -mag));
            }
        }
    }
    // at least one negative edge between two different blocks
    if !edges.iter().any(|&(_, _, w)| w < 0.0) {
        let (a, b) = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| label[i] != label[j]).unwrap();
        edges.push((a, b, -mag));
    }
    build_graph(n, edges).unwrap()
}

/// Cactus: every new piece hangs off an existing node and is either a
/// pendant edge or a cycle of length 3..=5. Returns the graph and the edge
/// lists of its cycles.
pub fn random_cactus<R: Rng>(rng: &mut R, max_nodes: usize) -> (Graph, Vec<Vec<usize>>) {
    let mut n = 1;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut cycles = Vec::new();
    while n < max_nodes {
        let anchor = rng.random_range(0..n);
        let room = max_nodes - n;
        if room >= 2 && rng.random_bool(0.7) {
            let len = rng.random_range(3..=(room + 1).min(5));
            let mut ids = Vec::new();
            let mut prev = anchor;
            for _ in 0..len - 1 {
                ids.push(edges.len());
                edges.push((prev, n, rng.random_range(0.5..3.0)));
                prev = n;
                n += 1;
            }
            ids.push(edges.len());
            edges.push((anchor, prev, rng.random_range(0.5..3.0)));
            cycles.push(ids);
        } else {
            edges.push((anchor, n, rng.random_range(0.5..3.0)));
            n += 1;
        }
    }
    (build_graph(n, edges).unwrap(), cycles)
}

pub fn with_weights(g: &Graph, weights: &[f64]) -> Graph {
    WeightedGraph::new(g.node_count(), g.edges().iter().zip(weights).map(|(e, &w)| (e.tail, e.head, w))).unwrap()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
