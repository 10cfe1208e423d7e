use std::collections::VecDeque;

use ndarray::{s, Array2};

use super::WeightedGraph;
use crate::linalg::Lu;
use crate::scalar::Real;

/// Spanning-forest / cycle split of the edge set with the cut-set matrix
/// `R` and Tucker matrix `T`.
///
/// `R` is stored in the graph's own edge column order; the `[I T]` layout
/// appears after permuting columns to `(forest, cycle)` order, see
/// [`ForestDecomposition::cut_set_blocked`].
#[derive(Debug, Clone)]
pub struct ForestDecomposition<T> {
    pub forest_edges: Vec<usize>,
    pub cycle_edges: Vec<usize>,
    pub component_count: usize,
    pub component_labels: Vec<usize>,
    /// `|F| × |E|`.
    pub r: Array2<T>,
    /// `|F| × |C|`.
    pub t: Array2<T>,
    /// `E_F`, `n × |F|`.
    pub e_forest: Array2<T>,
    /// Unweighted forest edge Laplacian `E_Fᵀ E_F`.
    pub le_forest: Array2<T>,
    /// Left inverse `L_e(F)⁻¹ E_Fᵀ`, `|F| × n`.
    pub left_inverse: Array2<T>,
}

impl<T: Real> ForestDecomposition<T> {
    /// Breadth-first forest from the lowest node of each component,
    /// neighbors visited in index order.
    pub fn new(g: &WeightedGraph<T>) -> Self {
        let n = g.node_count();
        let m = g.edge_count();
        let adj = g.adjacency();
        let mut in_forest = vec![false; m];
        let mut seen = vec![false; n];
        let mut labels = vec![0; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            labels[root] = count;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for &(v, k) in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        labels[v] = count;
                        in_forest[k] = true;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        let (forest_edges, cycle_edges): (Vec<usize>, Vec<usize>) = (0..m).partition(|&k| in_forest[k]);

        let e_forest = g.incidence_of(&forest_edges);
        let e_cycle = g.incidence_of(&cycle_edges);
        let le_forest = e_forest.t().dot(&e_forest);
        // Forest columns are independent, so the factorization cannot fail.
        let lu = Lu::factor(&le_forest.view()).expect("forest edge Laplacian is nonsingular");
        let left_inverse = lu.solve(&e_forest.t());
        let t = left_inverse.dot(&e_cycle);

        let f = forest_edges.len();
        let mut r = Array2::zeros((f, m));
        for (i, &k) in forest_edges.iter().enumerate() {
            r[[i, k]] = T::one();
        }
        for (j, &k) in cycle_edges.iter().enumerate() {
            r.column_mut(k).assign(&t.column(j));
        }

        Self {
            forest_edges,
            cycle_edges,
            component_count: count,
            component_labels: labels,
            r,
            t,
            e_forest,
            le_forest,
            left_inverse,
        }
    }

    pub fn forest_size(&self) -> usize {
        self.forest_edges.len()
    }

    /// `R = [I T]` with columns in `(forest, cycle)` order.
    pub fn cut_set_blocked(&self) -> Array2<T> {
        let f = self.forest_edges.len();
        let mut out = Array2::zeros((f, f + self.cycle_edges.len()));
        out.slice_mut(s![.., ..f]).assign(&Array2::eye(f));
        out.slice_mut(s![.., f..]).assign(&self.t);
        out
    }

    /// `R W Rᵀ` for edge weights given in graph order.
    pub fn rwr(&self, weights: &[T]) -> Array2<T> {
        let mut rw = self.r.clone();
        for (mut col, &w) in rw.columns_mut().into_iter().zip(weights) {
            col.mapv_inplace(|x| x * w);
        }
        rw.dot(&self.r.t())
    }

    /// Essential edge Laplacian `L_e(F) R W Rᵀ`.
    pub fn essential_edge_laplacian(&self, weights: &[T]) -> Array2<T> {
        self.le_forest.dot(&self.rwr(weights))
    }

    /// Normalized component indicators `N`, `n × c`.
    pub fn component_basis(&self) -> Array2<T> {
        let n = self.component_labels.len();
        let mut sizes = vec![0usize; self.component_count];
        for &l in &self.component_labels {
            sizes[l] += 1;
        }
        let mut out = Array2::zeros((n, self.component_count));
        for (i, &l) in self.component_labels.iter().enumerate() {
            out[[i, l]] = T::one() / T::from_usize_lossy(sizes[l]).sqrt();
        }
        out
    }

    /// Basis `S = [(E_F^L)ᵀ N]` with `S⁻¹ = [E_Fᵀ; Nᵀ]`, under which
    /// `S⁻¹ L S = blockdiag(L_e(F) R W Rᵀ, 0)`.
    pub fn similarity_basis(&self) -> (Array2<T>, Array2<T>) {
        let n = self.component_labels.len();
        let f = self.forest_edges.len();
        let nb = self.component_basis();
        let mut basis = Array2::zeros((n, n));
        basis.slice_mut(s![.., ..f]).assign(&self.left_inverse.t());
        basis.slice_mut(s![.., f..]).assign(&nb);
        let mut inverse = Array2::zeros((n, n));
        inverse.slice_mut(s![..f, ..]).assign(&self.e_forest.t());
        inverse.slice_mut(s![f.., ..]).assign(&nb.t());
        (basis, inverse)
    }
}

/// Free-function form of [`ForestDecomposition::essential_edge_laplacian`]
/// using the graph's own weights.
pub fn essential_edge_laplacian<T: Real>(g: &WeightedGraph<T>, f: &ForestDecomposition<T>) -> Array2<T> {
    f.essential_edge_laplacian(&g.weights())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::spectral::signature_of;
    use crate::linalg::symmetric_eigen;

    #[test]
    fn tree_has_identity_cut_set() {
        let g = build_graph::<f64>(4, [(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5)]).unwrap();
        let f = g.spanning_forest();
        assert!(f.cycle_edges.is_empty());
        assert_eq!(f.t.ncols(), 0);
        assert_eq!(f.r, Array2::<f64>::eye(3));
    }

    #[test]
    fn triangle_tucker_matrix() {
        // edges 0:(0,1) 1:(0,2) 2:(1,2); forest {0,1}, cycle {2}.
        // Edge (1,2) = -(0,1) + (0,2) in incidence columns.
        let g = build_graph::<f64>(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let f = g.spanning_forest();
        assert_eq!(f.forest_edges, vec![0, 1]);
        assert_eq!(f.cycle_edges, vec![2]);
        assert!((f.t[[0, 0]] + 1.0).abs() < 1e-14);
        assert!((f.t[[1, 0]] - 1.0).abs() < 1e-14);
        assert_eq!(f.r.dim(), (2, 3));
        assert_eq!(f.cut_set_blocked(), f.r);
    }

    #[test]
    fn disconnected_forest_size() {
        let g = build_graph::<f64>(5, [(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0), (2, 4, 1.0)]).unwrap();
        let f = g.spanning_forest();
        assert_eq!(f.component_count, 2);
        assert_eq!(f.forest_size(), 5 - 2);
        assert_eq!(f.cycle_edges, vec![2]);
    }

    #[test]
    fn essential_laplacian_examples() {
        let g = build_graph::<f64>(2, [(0, 1, 1.75)]).unwrap();
        let f = g.spanning_forest();
        let l = essential_edge_laplacian(&g, &f);
        assert!((l[[0, 0]] - 3.5).abs() < 1e-14);

        let tri = build_graph::<f64>(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let l = essential_edge_laplacian(&tri, &tri.spanning_forest());
        // Eigenvalues {3, 3}: trace 6, determinant 9.
        let tr = l[[0, 0]] + l[[1, 1]];
        let det = l[[0, 0]] * l[[1, 1]] - l[[0, 1]] * l[[1, 0]];
        assert!((tr - 6.0).abs() < 1e-12);
        assert!((det - 9.0).abs() < 1e-12);

        let lap = tri.laplacian();
        let eig = symmetric_eigen(&lap.view());
        assert!(eig.values[0].abs() < 1e-12);
        assert_eq!(signature_of(&lap.view(), 1e-9).unwrap().n_zero, 1);
    }

    #[test]
    fn similarity_reconstructs_block_diagonal() {
        let g = build_graph::<f64>(4, [(0, 1, 1.0), (1, 2, -0.3), (0, 2, 2.0), (2, 3, 0.7)]).unwrap();
        let f = g.spanning_forest();
        let (s, sinv) = f.similarity_basis();
        let id = sinv.dot(&s);
        for i in 0..4 {
            for j in 0..4 {
                assert!((id[[i, j]] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        let block = sinv.dot(&g.laplacian()).dot(&s);
        let ess = essential_edge_laplacian(&g, &f);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i < 3 && j < 3 { ess[[i, j]] } else { 0.0 };
                assert!((block[[i, j]] - want).abs() < 1e-12);
            }
        }
    }
}
