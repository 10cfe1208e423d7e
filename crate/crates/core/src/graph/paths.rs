//! Edges on simple paths between two nodes.
//!
//! An edge lies on some simple `u`–`v` path exactly when its biconnected
//! component (block) sits on the path from `u` to `v` in the block–vertex
//! tree. Blocks come from an iterative Tarjan edge-stack search.

use std::collections::VecDeque;

use super::WeightedGraph;
use crate::scalar::Real;

/// Block id of every edge.
fn edge_blocks<T: Real>(g: &WeightedGraph<T>) -> (Vec<usize>, usize) {
    let n = g.node_count();
    let adj = g.adjacency();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut block = vec![usize::MAX; g.edge_count()];
    let mut blocks = 0;
    let mut clock = 0;
    let mut edge_stack: Vec<usize> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = clock;
        low[root] = clock;
        clock += 1;
        // (node, edge to parent, next neighbor position)
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        while let Some(top) = stack.last_mut() {
            let (u, parent_edge, i) = *top;
            if i < adj[u].len() {
                top.2 += 1;
                let (w, k) = adj[u][i];
                if Some(k) == parent_edge {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(k);
                    disc[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    stack.push((w, Some(k), 0));
                } else if disc[w] < disc[u] {
                    edge_stack.push(k);
                    low[u] = low[u].min(disc[w]);
                }
                continue;
            }
            stack.pop();
            let Some(&(p, _, _)) = stack.last() else { continue };
            low[p] = low[p].min(low[u]);
            if low[u] >= disc[p] {
                let tree_edge = parent_edge.expect("non-root node has a parent edge");
                while let Some(e) = edge_stack.pop() {
                    block[e] = blocks;
                    if e == tree_edge {
                        break;
                    }
                }
                blocks += 1;
            }
        }
    }
    (block, blocks)
}

pub(super) fn path_edge_set<T: Real>(g: &WeightedGraph<T>, u: usize, v: usize) -> Vec<usize> {
    let n = g.node_count();
    let (block, count) = edge_blocks(g);

    // Block–vertex tree: vertices 0..n, blocks n..n+count.
    let mut tree: Vec<Vec<usize>> = vec![Vec::new(); n + count];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (k, e) in g.edges().iter().enumerate() {
        for x in [e.tail, e.head] {
            if !members[block[k]].contains(&x) {
                members[block[k]].push(x);
            }
        }
    }
    for (b, nodes) in members.iter().enumerate() {
        for &x in nodes {
            tree[x].push(n + b);
            tree[n + b].push(x);
        }
    }

    let mut parent = vec![usize::MAX; n + count];
    parent[u] = u;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        if x == v {
            break;
        }
        for &y in &tree[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    if parent[v] == usize::MAX {
        return Vec::new();
    }
    let mut on_path = vec![false; count];
    let mut x = v;
    while x != u {
        if x >= n {
            on_path[x - n] = true;
        }
        x = parent[x];
    }
    (0..g.edge_count()).filter(|&k| on_path[block[k]]).collect()
}

/// Reference implementation by exhaustive simple-path enumeration.
/// Exponential; intended for small graphs and cross-checks.
pub fn brute_force_path_edge_set<T: Real>(g: &WeightedGraph<T>, u: usize, v: usize) -> Vec<usize> {
    fn walk(
        adj: &[Vec<(usize, usize)>],
        x: usize,
        target: usize,
        visited: &mut [bool],
        path: &mut Vec<usize>,
        hit: &mut [bool],
    ) {
        if x == target {
            for &k in path.iter() {
                hit[k] = true;
            }
            return;
        }
        for &(y, k) in &adj[x] {
            if !visited[y] {
                visited[y] = true;
                path.push(k);
                walk(adj, y, target, visited, path, hit);
                path.pop();
                visited[y] = false;
            }
        }
    }

    let adj = g.adjacency();
    let mut visited = vec![false; g.node_count()];
    let mut hit = vec![false; g.edge_count()];
    visited[u] = true;
    walk(&adj, u, v, &mut visited, &mut Vec::new(), &mut hit);
    (0..g.edge_count()).filter(|&k| hit[k]).collect()
}
